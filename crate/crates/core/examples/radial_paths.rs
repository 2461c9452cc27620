//! Radial paths on B2 with k ≡ 1 from (2, 1): E‖X_t‖² grows like 5 + 10t,
//! and a few paths are written as CSV.
//!
//! cargo run --release --example radial_paths

use dunkl_lab::radial_sde::{mean_and_se, simulate_radial, Recording, SimulationConfig, SimulationSummary};
use dunkl_lab::root_systems::{MultiplicityFunction, RootSystem};
use dunkl_lab::trajectory::write_csv;

fn main() -> dunkl_lab::Result<()> {
    let s = RootSystem::type_b(2)?;
    let k = MultiplicityFunction::uniform(&s, 1.0)?;
    let x0 = [2.0, 1.0];
    let cfg = SimulationConfig::new(1.0, 1e-3, 4000, 1).with_recording(Recording::Every(250));
    let paths = simulate_radial(&s, &k, &x0, &cfg)?;

    println!("{:>6} {:>10} {:>9} {:>8}", "t", "E|X|^2", "se", "5+10t");
    for j in 0..paths[0].len() {
        let t = paths[0].times[j];
        let sq: Vec<f64> = paths.iter().map(|p| p.state(j).iter().map(|v| v * v).sum()).collect();
        let (m, se) = mean_and_se(&sq);
        println!("{t:>6.3} {m:>10.4} {se:>9.4} {:>8.3}", 5.0 + 10.0 * t);
    }
    let summary = SimulationSummary::from_trajectories(&paths, &cfg);
    println!("{}", serde_json::to_string_pretty(&summary)?);

    println!("first two paths:");
    write_csv(std::io::stdout().lock(), &paths[..2])?;
    Ok(())
}
