//! Rotating the process rotates the root system and transports k. The
//! generator identity is checked pointwise and the rotated law by KS; the
//! untransported k on the two-orbit B2 breaks the identity.
//!
//! cargo run --release --example rotation_covariance

use std::f64::consts::PI;
use std::sync::Arc;

use dunkl_lab::dunkl_calculus::{rotate_spec, GeneratorSpec};
use dunkl_lab::linalg::Transform;
use dunkl_lab::radial_sde::SimulationConfig;
use dunkl_lab::root_systems::{MultiplicityFunction, RootSystem};
use dunkl_lab::stat_verify::{render_table, rotation_identity, rotation_identity_control, rotation_law, Role};

fn main() -> dunkl_lab::Result<()> {
    let s = Arc::new(RootSystem::type_b(2)?);
    let k = MultiplicityFunction::new(&s, &[0.75, 1.25])?;
    let spec = GeneratorSpec::dunkl(s.clone(), k.clone());
    let theta = Transform::givens(2, 0, 1, PI / 4.0);

    let rotated = rotate_spec(&spec, &theta)?;
    println!("θR positive roots: {:?}", rotated.system.positive_roots());
    println!("k_θ per orbit: {:?}", rotated.drift.per_orbit());

    let cfg = SimulationConfig::new(1.0, 1e-3, 5000, 9);
    let reports = vec![
        rotation_identity("identity, 50 random (θ, u, x)", &spec, 50, 1)?,
        rotation_identity_control("untransported k, θ = 45°", &spec, &theta, 50, 2)?,
        rotation_law("law, θ = 0.7 rad", Role::Check, &s, &k, &Transform::givens(2, 0, 1, 0.7), &[2.0, 1.0], &cfg, true)?,
    ];
    print!("{}", render_table(&reports));
    Ok(())
}
