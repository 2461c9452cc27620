//! Rank-one wall hitting: fraction of paths reaching the wall by T = 1 from
//! x0 = 0.2 as k crosses 1/2, next to the exact Bessel hitting probability
//! Q(|ν|, x0²/2T) with |ν| = (1 − 2k)/2.
//!
//! cargo run --release --example wall_hitting

use dunkl_lab::radial_sde::SimulationConfig;
use dunkl_lab::stat_verify::{hit_fractions, WALL_SWEEP};
use statrs::function::gamma::gamma_ur;

fn main() -> dunkl_lab::Result<()> {
    let x0 = 0.2;
    for dt in [1e-3, 1e-4] {
        let cfg = SimulationConfig::new(1.0, dt, 2000, 5);
        println!("dt = {dt:e}");
        println!("{:>6} {:>10} {:>10}", "k", "simulated", "exact");
        for (k, f) in hit_fractions(&WALL_SWEEP, x0, &cfg)? {
            let exact = if k < 0.5 { gamma_ur(0.5 - k, x0 * x0 / 2.0) } else { 0.0 };
            println!("{k:>6} {f:>10.4} {exact:>10.4}");
        }
    }
    Ok(())
}
