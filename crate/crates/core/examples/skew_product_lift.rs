//! The full jump process on B2 built from the radial process, root by root,
//! in shortcut and general-clock mode.
//!
//! cargo run --release --example skew_product_lift

use std::sync::Arc;

use dunkl_lab::jump_lift::{fold_check_regions, DunklSimulator, ModeRequest};
use dunkl_lab::radial_sde::{Recording, SimulationConfig};
use dunkl_lab::root_systems::{MultiplicityFunction, RootSystem};

fn main() -> dunkl_lab::Result<()> {
    let s = Arc::new(RootSystem::type_b(2)?);
    let k = MultiplicityFunction::uniform(&s, 1.0)?;
    let x0 = [2.0, 1.0];
    let cfg = SimulationConfig::new(1.0, 1e-3, 2000, 3).with_recording(Recording::Endpoints);

    for mode in [ModeRequest::Shortcut, ModeRequest::General] {
        let sim = DunklSimulator::full(s.clone(), k.clone(), None, mode)?.track_regions(true);
        println!("{mode:?}: layer modes {:?}", sim.plan().modes);
        let paths = sim.simulate(&x0, &cfg)?;
        let jumps: usize = paths.iter().map(|p| p.jumps.len()).sum();
        let violations: u64 = paths.iter().map(|p| p.diagnostics.region_violations).sum();
        let mut per_root = vec![0usize; s.roots().len()];
        for j in paths.iter().flat_map(|p| &p.jumps) {
            per_root[j.root] += 1;
        }
        let chambers = paths.iter().filter(|p| s.chamber_element(p.final_state()).is_some()).count();
        println!(
            "  {jumps} jumps over {} paths, per positive root {:?}, region violations {violations}, {chambers} endpoints off the walls",
            paths.len(),
            s.positive().iter().map(|&r| per_root[r]).collect::<Vec<_>>()
        );
        if let Some(j) = paths.iter().flat_map(|p| &p.jumps).next() {
            println!("  first jump: t = {:.4}, root {}, {:?} -> {:?}", j.time, j.root, j.pre, j.post);
        }
    }

    let sim = DunklSimulator::full(s.clone(), k.clone(), None, ModeRequest::Auto)?;
    let start = s.weyl_group().inverse_index(s.chamber_element(&x0).unwrap());
    let regions = fold_check_regions(&s, sim.plan(), start);
    println!(
        "regions C_0..C_4 hold {:?} chambers, disjoint steps {:?}",
        regions.regions.iter().map(Vec::len).collect::<Vec<_>>(),
        regions.disjoint
    );

    // Two-parameter variant: jump rates k′ = 2 on every root.
    let kp = MultiplicityFunction::uniform(&s, 2.0)?;
    let two = DunklSimulator::full(s.clone(), k, Some(&kp), ModeRequest::Auto)?;
    let jumps: usize = two.simulate(&x0, &cfg)?.iter().map(|p| p.jumps.len()).sum();
    println!("k′ = 2: {jumps} jumps");
    Ok(())
}
