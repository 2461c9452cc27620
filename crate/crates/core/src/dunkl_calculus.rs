//! Weights, drifts, harmonic functions and generators applied numerically
//! to test functions.
//!
//! Derivatives are second-order central differences at steps `h` and `h/2`
//! combined by one Richardson level, with `h = 1e-3·(1 + ‖x‖)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, Transform};
use crate::root_systems::{reflect, MultiplicityFunction, RootSystem};

/// `a^p` for `a > 0`, with integer `p` fast-pathed.
#[inline]
fn pow_pos(a: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if p.fract() == 0.0 && p.abs() < 64.0 {
        a.powi(p as i32)
    } else {
        (p * a.ln()).exp()
    }
}

fn require_chamber(system: &RootSystem, x: &[f64]) -> Result<()> {
    for &r in system.positive() {
        let d = dot(system.root(r), x);
        if !(d > 0.0) {
            return Err(Error::Domain(format!("x·α = {d:e} ≤ 0 for root {r}")));
        }
    }
    Ok(())
}

/// `ω_k(y) = ∏_{α∈R_+} |α·y|^{2k(α)}`.
pub fn weight_omega(system: &RootSystem, k: &MultiplicityFunction, y: &[f64]) -> f64 {
    system
        .positive()
        .iter()
        .map(|&r| {
            let a = dot(system.root(r), y).abs();
            let p = 2.0 * k.value(r);
            if a == 0.0 {
                if p == 0.0 { 1.0 } else { 0.0 }
            } else {
                pow_pos(a, p)
            }
        })
        .product()
}

/// `ϖ_k(x) = ∏_{α∈R_+} (α·x)^{k(α)}`. Non-integer powers need `α·x > 0`.
pub fn weight_varpi(system: &RootSystem, k: &MultiplicityFunction, x: &[f64]) -> Result<f64> {
    let mut out = 1.0;
    for &r in system.positive() {
        let d = dot(system.root(r), x);
        let p = k.value(r);
        if p.fract() == 0.0 {
            out *= d.powi(p as i32);
        } else if d > 0.0 {
            out *= pow_pos(d, p);
        } else {
            return Err(Error::Domain(format!("x·α = {d:e} ≤ 0 with non-integer k for root {r}")));
        }
    }
    Ok(out)
}

/// `∇ log ϖ_k(x) = Σ_{α∈R_+} k(α) α/(x·α)`.
pub fn drift(system: &RootSystem, k: &MultiplicityFunction, x: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; x.len()];
    for &r in system.positive() {
        let a = system.root(r);
        let d = dot(a, x);
        if d == 0.0 {
            return Err(Error::WallContact { root: r, value: d });
        }
        let c = k.value(r) / d;
        for (o, ai) in out.iter_mut().zip(a) {
            *o += c * ai;
        }
    }
    Ok(out)
}

/// `δ(x) = ∏_{α∈R_+} (α·x)^{1−2k(α)}` on the open chamber.
pub fn delta(system: &RootSystem, k: &MultiplicityFunction, x: &[f64]) -> Result<f64> {
    require_chamber(system, x)?;
    Ok(system
        .positive()
        .iter()
        .map(|&r| pow_pos(dot(system.root(r), x), 1.0 - 2.0 * k.value(r)))
        .product())
}

/// `δ̄(x) = ∏_{k(α)≠½} (α·x)^{1−2k(α)} · log ∏_{k(α)=½} (α·x)`.
pub fn delta_bar(system: &RootSystem, k: &MultiplicityFunction, x: &[f64]) -> Result<f64> {
    if !system.positive().iter().any(|&r| k.value(r) == 0.5) {
        return Err(Error::InvalidArgument("δ̄ needs an orbit with k = 1/2".into()));
    }
    require_chamber(system, x)?;
    let mut power = 1.0;
    let mut log_arg = 1.0;
    for &r in system.positive() {
        let d = dot(system.root(r), x);
        let kv = k.value(r);
        if kv == 0.5 {
            log_arg *= d;
        } else {
            power *= pow_pos(d, 1.0 - 2.0 * kv);
        }
    }
    Ok(power * log_arg.ln())
}

/// Region on which a test function is smooth and finite-difference stencils
/// are trusted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Everywhere,
    Ball { center: Vec<f64>, radius: f64 },
    /// `{x : x·v > 0 for every listed v}`.
    HalfSpaces(Vec<Vec<f64>>),
}

impl Domain {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::Everywhere => true,
            Domain::Ball { center, radius } => {
                x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() < *radius
            }
            Domain::HalfSpaces(normals) => normals.iter().all(|v| dot(v, x) > 0.0),
        }
    }

    /// The open chamber of `system`.
    pub fn chamber(system: &RootSystem) -> Self {
        Domain::HalfSpaces(system.positive_roots().iter().map(|r| r.to_vec()).collect())
    }
}

type ScalarFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A scalar function on ℝⁿ together with the region where it is smooth.
#[derive(Clone)]
pub struct TestFunction {
    f: Arc<ScalarFn>,
    domain: Domain,
    name: String,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

impl TestFunction {
    pub fn new(name: impl Into<String>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            domain: Domain::Everywhere,
            name: name.into(),
        }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    /// `u ∘ θ`.
    pub fn compose(&self, theta: &Transform) -> TestFunction {
        let f = self.f.clone();
        let t = theta.clone();
        let domain = match &self.domain {
            Domain::Everywhere => Domain::Everywhere,
            Domain::Ball { center, radius } => Domain::Ball {
                center: theta.transpose().apply(center),
                radius: *radius,
            },
            Domain::HalfSpaces(v) => Domain::HalfSpaces(v.iter().map(|n| theta.transpose().apply(n)).collect()),
        };
        TestFunction {
            f: Arc::new(move |x: &[f64]| f(&t.apply(x))),
            domain,
            name: format!("{}∘θ", self.name),
        }
    }

    /// Constant, for sanity checks.
    pub fn constant(c: f64) -> Self {
        Self::new("const", move |_| c)
    }

    /// `‖x‖²`.
    pub fn norm_squared() -> Self {
        Self::new("norm_sq", |x| x.iter().map(|v| v * v).sum())
    }

    /// `v·x`.
    pub fn linear(v: Vec<f64>) -> Self {
        Self::new("linear", move |x| dot(&v, x))
    }
}

/// Finite-difference gradient and Laplacian.
#[derive(Debug, Clone)]
pub struct Derivatives {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub laplacian: f64,
    /// Diagonal second derivatives `∂_ii u`.
    pub hessian_diagonal: Vec<f64>,
}

/// Base finite-difference step at `x`.
pub fn fd_step(x: &[f64]) -> f64 {
    1e-3 * (1.0 + norm(x))
}

fn central(u: &TestFunction, x: &[f64], h: f64, center: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = x.len();
    let mut grad = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut p = x.to_vec();
    for i in 0..n {
        p[i] = x[i] + h;
        if !u.domain.contains(&p) {
            return Err(Error::StencilOutsideDomain);
        }
        let fp = u.eval(&p);
        p[i] = x[i] - h;
        if !u.domain.contains(&p) {
            return Err(Error::StencilOutsideDomain);
        }
        let fm = u.eval(&p);
        p[i] = x[i];
        grad[i] = (fp - fm) / (2.0 * h);
        diag[i] = (fp - 2.0 * center + fm) / (h * h);
    }
    Ok((grad, diag))
}

/// Gradient and Laplacian of `u` at `x`, Richardson-extrapolated.
pub fn derivatives(u: &TestFunction, x: &[f64]) -> Result<Derivatives> {
    if !u.domain.contains(x) {
        return Err(Error::StencilOutsideDomain);
    }
    let h = fd_step(x);
    let value = u.eval(x);
    let (g1, d1) = central(u, x, h, value)?;
    let (g2, d2) = central(u, x, 0.5 * h, value)?;
    let rich = |a: f64, b: f64| (4.0 * b - a) / 3.0;
    let gradient: Vec<f64> = g1.iter().zip(&g2).map(|(&a, &b)| rich(a, b)).collect();
    let hessian_diagonal: Vec<f64> = d1.iter().zip(&d2).map(|(&a, &b)| rich(a, b)).collect();
    Ok(Derivatives {
        value,
        laplacian: hessian_diagonal.iter().sum(),
        gradient,
        hessian_diagonal,
    })
}

/// Which roots carry reflection jumps, and with which coefficient.
#[derive(Debug, Clone)]
pub struct JumpPart {
    /// Jump multiplicity: `k` (Dunkl), `k′` (two-parameter) or `l`.
    pub coefficients: MultiplicityFunction,
    /// Active positive roots (root indices), a subset of `R_+`.
    pub active: Vec<usize>,
}

/// Extra term `λ(u(σ_α x) − u(x))`.
#[derive(Debug, Clone)]
pub struct PointJump {
    pub rate: f64,
    pub root: Vec<f64>,
}

/// A generator
/// `½Δu + Σ_{R_+} k(α) ∇u·α/(x·α) + Σ_{active} c(α)(u(σ_α x) − u(x))/(x·α)² [+ λ(u(σ_α x) − u(x))]`.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub system: Arc<RootSystem>,
    pub drift: MultiplicityFunction,
    pub jumps: Option<JumpPart>,
    pub point_jump: Option<PointJump>,
}

impl GeneratorSpec {
    /// The radial generator (no jumps).
    pub fn radial(system: Arc<RootSystem>, k: MultiplicityFunction) -> Self {
        Self {
            system,
            drift: k,
            jumps: None,
            point_jump: None,
        }
    }

    /// The Dunkl generator: jumps on all of `R_+` with coefficient `k`.
    pub fn dunkl(system: Arc<RootSystem>, k: MultiplicityFunction) -> Self {
        let active = system.positive().to_vec();
        Self {
            system,
            jumps: Some(JumpPart {
                coefficients: k.clone(),
                active,
            }),
            drift: k,
            point_jump: None,
        }
    }

    /// Independent drift and jump multiplicities (`k′`, or `l`).
    pub fn two_parameter(system: Arc<RootSystem>, k: MultiplicityFunction, jump: MultiplicityFunction) -> Self {
        let active = system.positive().to_vec();
        Self {
            system,
            drift: k,
            jumps: Some(JumpPart {
                coefficients: jump,
                active,
            }),
            point_jump: None,
        }
    }

    /// The partial generator with jumps on the first `i` roots of the
    /// system's enumeration.
    pub fn partial(system: Arc<RootSystem>, k: MultiplicityFunction, i: usize) -> Result<Self> {
        let m = system.positive().len();
        if i > m {
            return Err(Error::IndexOutOfRange { index: i, len: m });
        }
        let active = system.positive()[..i].to_vec();
        Ok(Self {
            system,
            jumps: Some(JumpPart {
                coefficients: k.clone(),
                active,
            }),
            drift: k,
            point_jump: None,
        })
    }

    pub fn with_point_jump(mut self, rate: f64, root: Vec<f64>) -> Self {
        self.point_jump = Some(PointJump { rate, root });
        self
    }

    pub fn dimension(&self) -> usize {
        self.system.dimension()
    }

    fn validate(&self) -> Result<()> {
        if let Some(j) = &self.jumps {
            if let Some(&bad) = j.active.iter().find(|&&r| !self.system.is_positive(r)) {
                return Err(Error::InvalidArgument(format!("active root {bad} is not in R_+")));
            }
        }
        if let Some(p) = &self.point_jump {
            if !(p.rate >= 0.0) {
                return Err(Error::InvalidArgument("point-jump rate must be ≥ 0".into()));
            }
            if p.root.len() != self.dimension() {
                return Err(Error::DimensionMismatch { expected: self.dimension(), got: p.root.len() });
            }
        }
        Ok(())
    }
}

/// A generator value and its parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorValue {
    pub value: f64,
    pub laplacian_term: f64,
    pub drift_term: f64,
    pub jump_term: f64,
    /// `|½Δu| + |drift·∇u| + Σ|jump terms|`.
    pub scale: f64,
}

/// Apply `spec` to `u` at `x`.
pub fn apply_generator(spec: &GeneratorSpec, u: &TestFunction, x: &[f64]) -> Result<GeneratorValue> {
    let system = &spec.system;
    if x.len() != system.dimension() {
        return Err(Error::DimensionMismatch { expected: system.dimension(), got: x.len() });
    }
    spec.validate()?;
    let wall_tol = 1e-14 * (1.0 + norm(x));
    for &r in system.positive() {
        let d = dot(system.root(r), x);
        if d.abs() <= wall_tol {
            return Err(Error::WallContact { root: r, value: d });
        }
    }
    let der = derivatives(u, x)?;
    let laplacian_term = 0.5 * der.laplacian;
    let mut drift_term = 0.0;
    for &r in system.positive() {
        let a = system.root(r);
        drift_term += spec.drift.value(r) * dot(&der.gradient, a) / dot(a, x);
    }
    let mut jump_term = 0.0;
    let mut jump_abs = 0.0;
    if let Some(j) = &spec.jumps {
        for &r in &j.active {
            let c = j.coefficients.value(r);
            if c == 0.0 {
                continue;
            }
            let a = system.root(r);
            let d = dot(a, x);
            let t = c * (u.eval(&reflect(a, x)) - der.value) / (d * d);
            jump_term += t;
            jump_abs += t.abs();
        }
    }
    if let Some(p) = &spec.point_jump {
        let t = p.rate * (u.eval(&reflect(&p.root, x)) - der.value);
        jump_term += t;
        jump_abs += t.abs();
    }
    Ok(GeneratorValue {
        value: laplacian_term + drift_term + jump_term,
        laplacian_term,
        drift_term,
        jump_term,
        scale: laplacian_term.abs() + drift_term.abs() + jump_abs,
    })
}

/// Functions whose harmonicity can be checked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HarmonicTarget {
    /// `L_k^W δ = 0` in the chamber.
    Delta,
    /// `L_k^W δ̄ = 0` in the chamber.
    DeltaBar,
    /// `Δπ = 0` for `π(x) = ∏_{α∈R_+} α·x`.
    Pi,
    /// `Δπ^{1−2k} + 2∇π^{1−2k}·∇log π^k = 0` for a scalar `k`.
    PowerIdentity { k: f64 },
}

/// `(residual, scale)`; a function is harmonic when `|residual| ≪ scale`.
pub fn harmonicity_residual(
    target: HarmonicTarget,
    system: &Arc<RootSystem>,
    k: &MultiplicityFunction,
    x: &[f64],
) -> Result<(f64, f64)> {
    let chamber = Domain::chamber(system);
    match target {
        HarmonicTarget::Delta | HarmonicTarget::DeltaBar => {
            let sys = system.clone();
            let kk = k.clone();
            let u = if target == HarmonicTarget::Delta {
                delta(system, k, x)?;
                TestFunction::new("delta", move |y| delta(&sys, &kk, y).unwrap_or(f64::NAN))
            } else {
                delta_bar(system, k, x)?;
                TestFunction::new("delta_bar", move |y| delta_bar(&sys, &kk, y).unwrap_or(f64::NAN))
            }
            .with_domain(chamber);
            let spec = GeneratorSpec::radial(system.clone(), k.clone());
            let g = apply_generator(&spec, &u, x)?;
            Ok((g.value, g.scale))
        }
        HarmonicTarget::Pi => {
            let sys = system.clone();
            let pi = TestFunction::new("pi", move |y| sys.positive_roots().iter().map(|a| dot(a, y)).product());
            let d = derivatives(&pi, x)?;
            Ok((d.laplacian, d.hessian_diagonal.iter().map(|v| v.abs()).sum()))
        }
        HarmonicTarget::PowerIdentity { k: kk } => {
            require_chamber(system, x)?;
            let sys = system.clone();
            let pi = move |y: &[f64]| -> f64 { sys.positive_roots().iter().map(|a| dot(a, y)).product() };
            let pi2 = pi.clone();
            let power = TestFunction::new("pi_pow", move |y| pow_pos(pi(y), 1.0 - 2.0 * kk)).with_domain(chamber.clone());
            let log_pow = TestFunction::new("log_pi_k", move |y| kk * pi2(y).ln()).with_domain(chamber);
            let dp = derivatives(&power, x)?;
            let dl = derivatives(&log_pow, x)?;
            let lap = dp.laplacian;
            let cross = 2.0 * dot(&dp.gradient, &dl.gradient);
            Ok((lap + cross, lap.abs() + cross.abs()))
        }
    }
}

/// Transport a spec by an orthogonal `θ`: the result lives on `θR` with
/// `k_θ(θα) = k(α)` and satisfies `L_{k_θ}^{θR} u(θx) = L_k^R (u∘θ)(x)`.
pub fn rotate_spec(spec: &GeneratorSpec, theta: &Transform) -> Result<GeneratorSpec> {
    let system = Arc::new(spec.system.rotated(theta)?);
    let drift = MultiplicityFunction::new(&system, spec.drift.per_orbit())?;
    let jumps = match &spec.jumps {
        Some(j) => Some(JumpPart {
            coefficients: MultiplicityFunction::new(&system, j.coefficients.per_orbit())?,
            active: j.active.clone(),
        }),
        None => None,
    };
    let point_jump = spec.point_jump.as_ref().map(|p| PointJump {
        rate: p.rate,
        root: theta.apply(&p.root),
    });
    Ok(GeneratorSpec {
        system,
        drift,
        jumps,
        point_jump,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::SQRT_2;

    fn b2() -> Arc<RootSystem> {
        Arc::new(RootSystem::type_b(2).unwrap())
    }

    #[test]
    fn weights_on_b2() {
        let s = b2();
        let k = MultiplicityFunction::uniform(&s, 1.0).unwrap();
        assert_relative_eq!(weight_omega(&s, &k, &[2.0, 1.0]), 144.0, max_relative = 1e-14);
        assert_relative_eq!(weight_varpi(&s, &k, &[2.0, 1.0]).unwrap(), 12.0, max_relative = 1e-14);
        assert_eq!(weight_omega(&s, &k, &[1.0, 1.0]), 0.0);
        let k0 = MultiplicityFunction::uniform(&s, 0.0).unwrap();
        assert_eq!(weight_varpi(&s, &k0, &[0.3, -2.0]).unwrap(), 1.0);
        let kh = MultiplicityFunction::uniform(&s, 0.5).unwrap();
        assert!(weight_varpi(&s, &kh, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn rank_one_varpi_and_drift() {
        let s = RootSystem::rank_one();
        let k = MultiplicityFunction::uniform(&s, 0.7).unwrap();
        assert_relative_eq!(
            weight_varpi(&s, &k, &[0.9]).unwrap(),
            (SQRT_2 * 0.9f64).powf(0.7),
            max_relative = 1e-14
        );
        let k1 = MultiplicityFunction::uniform(&s, 1.0).unwrap();
        assert_relative_eq!(drift(&s, &k1, &[0.5]).unwrap()[0], 2.0, max_relative = 1e-15);
    }

    #[test]
    fn drift_b2_closed_form_and_scaling() {
        let s = b2();
        let k = MultiplicityFunction::uniform(&s, 1.0).unwrap();
        let d = drift(&s, &k, &[2.0, 1.0]).unwrap();
        assert_relative_eq!(d[0], 11.0 / 6.0, max_relative = 1e-14);
        assert_relative_eq!(d[1], 1.0 / 3.0, max_relative = 1e-14);
        let d3 = drift(&s, &k, &[6.0, 3.0]).unwrap();
        assert_relative_eq!(d3[0], d[0] / 3.0, max_relative = 1e-14);
        assert!(matches!(drift(&s, &k, &[1.0, 1.0]), Err(Error::WallContact { .. })));
    }

    #[test]
    fn delta_examples() {
        let s = b2();
        let k = MultiplicityFunction::uniform(&s, 1.0).unwrap();
        assert_relative_eq!(delta(&s, &k, &[2.0, 1.0]).unwrap(), 1.0 / 12.0, max_relative = 1e-14);
        let kh = MultiplicityFunction::uniform(&s, 0.5).unwrap();
        assert_eq!(delta(&s, &kh, &[2.0, 1.0]).unwrap(), 1.0);
        assert!(delta(&s, &k, &[1.0, 2.0]).is_err());
        // long orbit k = 1, short orbit k = 1/2
        let km = MultiplicityFunction::new(&s, &[1.0, 0.5]).unwrap();
        let x = [2.0, 1.0];
        let want = 1.0 / ((x[0] - x[1]) * (x[0] + x[1])) * (SQRT_2 * x[0] * SQRT_2 * x[1]).ln();
        assert_relative_eq!(delta_bar(&s, &km, &x).unwrap(), want, max_relative = 1e-14);
        assert!(delta_bar(&s, &k, &x).is_err());
    }

    #[test]
    fn constant_is_annihilated() {
        let s = b2();
        let k = MultiplicityFunction::uniform(&s, 1.3).unwrap();
        let u = TestFunction::constant(4.2);
        for spec in [
            GeneratorSpec::radial(s.clone(), k.clone()),
            GeneratorSpec::dunkl(s.clone(), k.clone()),
            GeneratorSpec::dunkl(s.clone(), k.clone()).with_point_jump(2.0, s.root(0).to_vec()),
        ] {
            let g = apply_generator(&spec, &u, &[1.7, -0.4]).unwrap();
            assert!(g.value.abs() < 1e-9, "{}", g.value);
        }
    }

    #[test]
    fn norm_squared_gives_n_plus_two_gamma() {
        let s = b2();
        let k = MultiplicityFunction::new(&s, &[0.75, 1.25]).unwrap();
        let spec = GeneratorSpec::radial(s.clone(), k.clone());
        let g = apply_generator(&spec, &TestFunction::norm_squared(), &[2.3, 0.4]).unwrap();
        assert_relative_eq!(g.laplacian_term, 2.0, max_relative = 1e-8);
        assert_relative_eq!(g.drift_term, 2.0 * k.gamma(&s), max_relative = 1e-8);
        assert_relative_eq!(g.value, 2.0 + 2.0 * 4.0, max_relative = 1e-8);
    }

    #[test]
    fn linear_function_is_dunkl_harmonic() {
        // x ↦ v·x is a martingale for the full Dunkl process.
        let s = b2();
        let k = MultiplicityFunction::new(&s, &[0.8, 1.9]).unwrap();
        let spec = GeneratorSpec::dunkl(s.clone(), k);
        let g = apply_generator(&spec, &TestFunction::linear(vec![0.3, -1.1]), &[-0.7, 2.1]).unwrap();
        assert!(g.value.abs() <= 1e-8 * g.scale, "{g:?}");
    }

    #[test]
    fn delta_is_radially_harmonic() {
        let s = b2();
        let k = MultiplicityFunction::new(&s, &[0.75, 1.25]).unwrap();
        let (r, sc) = harmonicity_residual(HarmonicTarget::Delta, &s, &k, &[2.0, 0.7]).unwrap();
        assert!(r.abs() <= 1e-6 * sc, "{r} vs {sc}");
    }

    #[test]
    fn stencil_outside_domain_is_reported() {
        let s = b2();
        let k = MultiplicityFunction::uniform(&s, 1.0).unwrap();
        let u = TestFunction::norm_squared().with_domain(Domain::Ball {
            center: vec![0.0, 0.0],
            radius: 1.0,
        });
        let spec = GeneratorSpec::radial(s, k);
        assert!(matches!(apply_generator(&spec, &u, &[0.9995, 0.01]), Err(Error::StencilOutsideDomain)));
    }

    #[test]
    fn rotate_identity_is_noop() {
        let s = b2();
        let k = MultiplicityFunction::new(&s, &[0.75, 1.25]).unwrap();
        let spec = GeneratorSpec::dunkl(s.clone(), k);
        let r = rotate_spec(&spec, &Transform::identity(2)).unwrap();
        assert_eq!(r.system.roots(), s.roots());
        assert_eq!(r.drift, spec.drift);
        let bad = Transform::from_rows(&[vec![1.0, 0.1], vec![0.0, 1.0]]);
        assert!(matches!(rotate_spec(&spec, &bad), Err(Error::NotOrthogonal { .. })));
    }
}
