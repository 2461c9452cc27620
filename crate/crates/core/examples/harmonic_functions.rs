//! Harmonic functions of the radial generator: δ, δ̄, Δπ = 0 and the power
//! identity, evaluated by finite differences.
//!
//! cargo run --example harmonic_functions

use std::sync::Arc;

use dunkl_lab::dunkl_calculus::{apply_generator, delta, GeneratorSpec, HarmonicTarget, TestFunction};
use dunkl_lab::root_systems::{MultiplicityFunction, RootSystem};
use dunkl_lab::stat_verify::{harmonicity_check, render_table};

fn main() -> dunkl_lab::Result<()> {
    let a2 = Arc::new(RootSystem::type_a(3)?);
    let b2 = Arc::new(RootSystem::type_b(2)?);
    let mut reports = Vec::new();
    for kv in [0.8, 1.5] {
        let k = MultiplicityFunction::uniform(&a2, kv)?;
        reports.push(harmonicity_check(&format!("A2 k={kv} delta"), HarmonicTarget::Delta, &a2, &k, 100, 1e-5, 1)?);
    }
    let k = MultiplicityFunction::new(&b2, &[0.75, 1.25])?;
    reports.push(harmonicity_check("B2 (0.75, 1.25) delta", HarmonicTarget::Delta, &b2, &k, 100, 1e-5, 2)?);
    let half = MultiplicityFunction::new(&b2, &[1.0, 0.5])?;
    reports.push(harmonicity_check("B2 (1, 1/2) delta_bar", HarmonicTarget::DeltaBar, &b2, &half, 100, 1e-5, 3)?);
    reports.push(harmonicity_check("B2 laplacian pi", HarmonicTarget::Pi, &b2, &k, 100, 1e-6, 4)?);
    reports.push(harmonicity_check(
        "B2 power identity k=0.3",
        HarmonicTarget::PowerIdentity { k: 0.3 },
        &b2,
        &k,
        100,
        1e-6,
        5,
    )?);
    print!("{}", render_table(&reports));

    // A single evaluation, with the generator split into its parts.
    let x = [2.0, 1.0];
    let (s, kk) = (b2.clone(), k.clone());
    let u = TestFunction::new("delta", move |y| delta(&s, &kk, y).unwrap_or(f64::NAN));
    let g = apply_generator(&GeneratorSpec::radial(b2.clone(), k.clone()), &u, &x)?;
    println!(
        "at {x:?}: ½Δδ = {:.6e}, drift·∇δ = {:.6e}, sum = {:.3e}",
        g.laplacian_term, g.drift_term, g.value
    );
    Ok(())
}
