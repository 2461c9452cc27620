//! Martingale residuals u(X_T) − u(X_0) − ∫𝒜u(X_s)ds for five test
//! functions under the radial, Dunkl and two-parameter processes, with the
//! bias allowance calibrated on Brownian motion.
//!
//! cargo run --release --example martingale_battery [-- paths]

use dunkl_lab::root_systems::MultiplicityFunction;
use dunkl_lab::stat_verify::{martingale_reports, render_table, SuiteSettings, SuiteTarget};

fn main() -> dunkl_lab::Result<()> {
    let paths = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2000);
    let target = SuiteTarget::b2_default();
    let k_prime = MultiplicityFunction::new(&target.system, &[1.5, 1.5])?;
    let settings = SuiteSettings {
        martingale_paths: paths,
        ..SuiteSettings::default()
    };
    let reports = martingale_reports(&target, &k_prime, &settings)?;
    print!("{}", render_table(&reports));
    Ok(())
}
