//! Run the full verification battery on B2 with k ≡ 1 and print the table.
//!
//!     cargo run --release --example verification_suite [-- --quick]

use dunkl_lab::stat_verify::{render_table, run_suite, SuiteSettings, SuiteTarget};

fn main() -> dunkl_lab::Result<()> {
    let mut settings = SuiteSettings::default();
    if std::env::args().any(|a| a == "--quick") {
        settings.ks_paths = 2000;
        settings.moment_paths = 5000;
        settings.fold_paths = 4000;
        settings.martingale_paths = 1000;
        settings.wall_paths = 500;
    }
    let outcome = run_suite(&SuiteTarget::b2_default(), &settings)?;
    print!("{}", render_table(&outcome.reports));
    for r in &outcome.reports {
        if !r.detail.is_empty() {
            println!("{}: {}", r.name, r.detail);
        }
    }
    println!("checks passed: {}, vacuous controls: {:?}", outcome.checks_passed(), outcome.vacuous);
    Ok(())
}
