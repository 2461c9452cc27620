//! Folding identity at j = 1 on B2: P(Y^0_t ∈ A) = P(Y^1_t ∈ A) + P(Y^1_t ∈ σA)
//! on rectangles inside the starting chamber, with the σA term dropped as a
//! control.
//!
//! cargo run --release --example folding_identity

use std::sync::Arc;

use dunkl_lab::jump_lift::{LiftMode, LiftPlan, ModeRequest};
use dunkl_lab::radial_sde::SimulationConfig;
use dunkl_lab::root_systems::{MultiplicityFunction, RootSystem};
use dunkl_lab::stat_verify::{folding_identity, rectangles_near, render_table, Role};

fn main() -> dunkl_lab::Result<()> {
    let s = Arc::new(RootSystem::type_b(2)?);
    let k = MultiplicityFunction::uniform(&s, 1.0)?;
    let x0 = [2.0, 1.0];
    let mut plan = LiftPlan::new(&s, s.positive(), &k, ModeRequest::Auto)?;
    plan.modes[0] = LiftMode::General;
    let rects = rectangles_near(&s, &x0, 0.5, 10);
    let cfg = SimulationConfig::new(1.0, 1e-3, 10_000, 7);
    let check = folding_identity("fold j=1", Role::Check, &s, &k, &plan, 1, &x0, &cfg, &rects, false)?;
    let control = folding_identity("fold j=1 without σA", Role::NegativeControl, &s, &k, &plan, 1, &x0, &cfg, &rects, true)?;
    print!("{}", render_table(&[check.clone(), control.clone()]));
    println!("{}\n{}", check.detail, control.detail);
    Ok(())
}
