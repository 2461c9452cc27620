use std::sync::Arc;

use dunkl_lab::dunkl_calculus::*;
use dunkl_lab::linalg::{dot, Transform};
use dunkl_lab::root_systems::{MultiplicityFunction, RootSystem};
use dunkl_lab::Error;
use proptest::prelude::*;

fn b2() -> Arc<RootSystem> {
    Arc::new(RootSystem::type_b(2).unwrap())
}

fn chamber_point(s: &RootSystem, raw: &[f64]) -> Option<Vec<f64>> {
    let mut x = raw[..s.dimension()].to_vec();
    s.fold_into_chamber(&mut x);
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    s.positive_roots().iter().all(|a| dot(a, &x) > 0.15 * r).then_some(x).filter(|_| r > 0.3)
}

#[test]
fn b2_reference_values() {
    let s = b2();
    let k = MultiplicityFunction::uniform(&s, 1.0).unwrap();
    let x = [2.0, 1.0];
    let d = drift(&s, &k, &x).unwrap();
    assert!((d[0] - 11.0 / 6.0).abs() < 1e-14 && (d[1] - 1.0 / 3.0).abs() < 1e-14);
    assert!((weight_varpi(&s, &k, &x).unwrap() - 12.0).abs() < 1e-12);
}

#[test]
fn generator_of_norm_squared_is_besq_dimension() {
    let s = b2();
    let k = MultiplicityFunction::new(&s, &[0.75, 1.25]).unwrap();
    let u = TestFunction::norm_squared();
    let want = 2.0 + 2.0 * k.gamma(&s);
    for spec in [GeneratorSpec::radial(s.clone(), k.clone()), GeneratorSpec::dunkl(s.clone(), k.clone())] {
        let g = apply_generator(&spec, &u, &[1.3, -0.4]).unwrap();
        assert!((g.value - want).abs() < 1e-6 * g.scale, "{} vs {want}", g.value);
    }
}

#[test]
fn constants_are_annihilated() {
    let s = b2();
    let k = MultiplicityFunction::uniform(&s, 1.0).unwrap();
    let g = apply_generator(&GeneratorSpec::dunkl(s, k), &TestFunction::constant(3.0), &[0.4, 2.0]).unwrap();
    assert!(g.value.abs() < 1e-9);
}

#[test]
fn wall_points_are_rejected() {
    let s = b2();
    let k = MultiplicityFunction::uniform(&s, 1.0).unwrap();
    let r = apply_generator(&GeneratorSpec::dunkl(s.clone(), k.clone()), &TestFunction::norm_squared(), &[1.0, 1.0]);
    assert!(matches!(r, Err(Error::WallContact { .. })));
    assert!(matches!(drift(&s, &k, &[1.0, 0.0]), Err(Error::WallContact { .. })));
}

#[test]
fn partial_generators_grow_to_full() {
    let s = b2();
    let k = MultiplicityFunction::uniform(&s, 1.0).unwrap();
    let u = TestFunction::linear(vec![0.3, -1.1]);
    let x = [1.7, -0.6];
    let full = apply_generator(&GeneratorSpec::dunkl(s.clone(), k.clone()), &u, &x).unwrap().value;
    let last = apply_generator(&GeneratorSpec::partial(s.clone(), k.clone(), 4).unwrap(), &u, &x).unwrap().value;
    let none = apply_generator(&GeneratorSpec::partial(s.clone(), k.clone(), 0).unwrap(), &u, &x).unwrap().value;
    let radial = apply_generator(&GeneratorSpec::radial(s, k), &u, &x).unwrap().value;
    assert!((full - last).abs() < 1e-12);
    assert!((none - radial).abs() < 1e-12);
}

#[test]
fn point_jump_adds_its_rate() {
    let s = b2();
    let k = MultiplicityFunction::uniform(&s, 1.0).unwrap();
    let u = TestFunction::linear(vec![1.0, 0.0]);
    let x = [2.0, 1.0];
    let base = GeneratorSpec::radial(s.clone(), k.clone());
    let a = s.root(0).to_vec();
    let lifted = base.clone().with_point_jump(0.7, a.clone());
    let diff = apply_generator(&lifted, &u, &x).unwrap().value - apply_generator(&base, &u, &x).unwrap().value;
    let jumped = dunkl_lab::root_systems::reflect(&a, &x);
    assert!((diff - 0.7 * (jumped[0] - x[0])).abs() < 1e-12);
}

#[test]
fn harmonic_targets_on_a2() {
    let s = Arc::new(RootSystem::type_a(3).unwrap());
    for kv in [0.8, 1.5] {
        let k = MultiplicityFunction::uniform(&s, kv).unwrap();
        let (r, sc) = harmonicity_residual(HarmonicTarget::Delta, &s, &k, &[2.0, 0.5, -1.0]).unwrap();
        assert!(r.abs() <= 1e-5 * sc);
    }
}

#[test]
fn delta_bar_needs_a_half() {
    let s = b2();
    let k = MultiplicityFunction::uniform(&s, 1.0).unwrap();
    assert!(delta_bar(&s, &k, &[2.0, 1.0]).is_err());
}

fn k_pair() -> impl Strategy<Value = (f64, f64)> {
    (0.0f64..2.5, 0.0f64..2.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn drift_is_gradient_of_log_varpi(raw in proptest::collection::vec(-3.0f64..3.0, 2), (kl, ks) in k_pair()) {
        let s = b2();
        let Some(x) = chamber_point(&s, &raw) else { return Ok(()) };
        let k = MultiplicityFunction::new(&s, &[kl, ks]).unwrap();
        let ss = s.clone();
        let kk = k.clone();
        let log_w = TestFunction::new("log varpi", move |y| weight_varpi(&ss, &kk, y).unwrap().ln())
            .with_domain(Domain::chamber(&s));
        let g = derivatives(&log_w, &x).unwrap().gradient;
        let d = drift(&s, &k, &x).unwrap();
        for (a, b) in g.iter().zip(&d) {
            prop_assert!((a - b).abs() <= 1e-6 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn omega_is_varpi_squared(raw in proptest::collection::vec(-3.0f64..3.0, 3), kv in 0.0f64..2.0) {
        let s = RootSystem::type_a(3).unwrap();
        let Some(x) = chamber_point(&s, &raw) else { return Ok(()) };
        let k = MultiplicityFunction::uniform(&s, kv).unwrap();
        let w = weight_varpi(&s, &k, &x).unwrap();
        let o = weight_omega(&s, &k, &x);
        prop_assert!((o - w * w).abs() <= 1e-12 * (1.0 + o.abs()));
    }

    #[test]
    fn generator_is_linear(
        raw in proptest::collection::vec(-3.0f64..3.0, 2),
        (a, b) in (-2.0f64..2.0, -2.0f64..2.0),
        (kl, ks) in k_pair(),
    ) {
        let s = b2();
        let x = raw.clone();
        if s.positive_roots().iter().any(|r| dot(r, &x).abs() < 0.2) {
            return Ok(());
        }
        let k = MultiplicityFunction::new(&s, &[kl, ks]).unwrap();
        let spec = GeneratorSpec::dunkl(s.clone(), k);
        let u = TestFunction::new("u", |y| (y[0] * 0.7).sin() + y[1] * y[1] * y[0]);
        let v = TestFunction::new("v", |y| (-(y[0] * y[0] + y[1] * y[1]) / 3.0).exp());
        let w = TestFunction::new("w", move |y| a * ((y[0] * 0.7).sin() + y[1] * y[1] * y[0]) + b * (-(y[0] * y[0] + y[1] * y[1]) / 3.0).exp());
        let lu = apply_generator(&spec, &u, &x).unwrap();
        let lv = apply_generator(&spec, &v, &x).unwrap();
        let lw = apply_generator(&spec, &w, &x).unwrap();
        let scale = a.abs() * lu.scale + b.abs() * lv.scale + 1.0;
        prop_assert!((lw.value - a * lu.value - b * lv.value).abs() <= 1e-6 * scale);
    }

    #[test]
    fn invariant_functions_see_no_jumps(raw in proptest::collection::vec(-3.0f64..3.0, 2), (kl, ks) in k_pair()) {
        let s = b2();
        let x = raw.clone();
        if s.positive_roots().iter().any(|r| dot(r, &x).abs() < 0.2) {
            return Ok(());
        }
        let k = MultiplicityFunction::new(&s, &[kl, ks]).unwrap();
        // x₁²x₂² + x₁⁴ + x₂⁴ is invariant under signed permutations.
        let u = TestFunction::new("inv", |y| y[0] * y[0] * y[1] * y[1] + y[0].powi(4) + y[1].powi(4));
        let full = apply_generator(&GeneratorSpec::dunkl(s.clone(), k.clone()), &u, &x).unwrap();
        let radial = apply_generator(&GeneratorSpec::radial(s, k), &u, &x).unwrap();
        prop_assert!(full.jump_term.abs() <= 1e-9 * (1.0 + full.scale));
        prop_assert!((full.value - radial.value).abs() <= 1e-9 * (1.0 + full.scale));
    }

    #[test]
    fn rotation_identity_holds(angle in 0.0f64..6.28, raw in proptest::collection::vec(-3.0f64..3.0, 2), (kl, ks) in k_pair()) {
        let s = b2();
        let x = raw.clone();
        if s.positive_roots().iter().any(|r| dot(r, &x).abs() < 0.2) {
            return Ok(());
        }
        let k = MultiplicityFunction::new(&s, &[kl, ks]).unwrap();
        let spec = GeneratorSpec::dunkl(s, k);
        let theta = Transform::givens(2, 0, 1, angle);
        let rotated = rotate_spec(&spec, &theta).unwrap();
        let u = TestFunction::new("u", |y| (y[0] - 0.3 * y[1]).sin() + y[0] * y[1] * y[1]);
        let lhs = apply_generator(&rotated, &u, &theta.apply(&x)).unwrap();
        let rhs = apply_generator(&spec, &u.compose(&theta), &x).unwrap();
        prop_assert!((lhs.value - rhs.value).abs() <= 1e-6 * (1.0 + lhs.scale.max(rhs.scale)));
    }
}
