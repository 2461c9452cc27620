//! Root systems of type A and B: Weyl groups, orbits, chambers and the
//! invariance table of the default enumeration.
//!
//! cargo run --example root_systems

use dunkl_lab::root_systems::{check_invariance_condition, RootSystem};

fn main() -> dunkl_lab::Result<()> {
    let systems = [
        ("A2", RootSystem::type_a(3)?),
        ("A3", RootSystem::type_a(4)?),
        ("B2", RootSystem::type_b(2)?),
        ("B3", RootSystem::type_b(3)?),
    ];
    for (name, s) in &systems {
        let m = s.positive().len();
        let table: Vec<bool> = (1..=m)
            .map(|i| check_invariance_condition(s, s.positive(), i))
            .collect::<dunkl_lab::Result<_>>()?;
        println!(
            "{name}: {} roots, |W| = {}, {} orbit(s), invariance {:?}",
            s.roots().len(),
            s.weyl_group().order(),
            s.positive_orbits().len(),
            table
        );
    }

    let b2 = &systems[2].1;
    for (i, a) in b2.positive_roots().iter().enumerate() {
        println!("B2 α_{} = {:?}", i + 1, a);
    }
    let x = [-0.3, 1.7];
    let (y, w) = b2.project_to_chamber(&x);
    println!("{x:?} folds to {y:?} by Weyl element {w}");
    Ok(())
}
