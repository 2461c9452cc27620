use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use super::ks::ks_two_sample;
use super::oracle::bessel_em_oracle;
use super::report::{Role, VerificationReport};
use crate::dunkl_calculus::{apply_generator, rotate_spec, GeneratorSpec, HarmonicTarget, TestFunction};
use crate::error::{Error, Result};
use crate::jump_lift::{fold_check_regions, DunklSimulator, LiftPlan, ModeRequest};
use crate::linalg::{dot, max_abs_diff, norm, norm_sq, Transform};
use crate::radial_sde::{mean_and_se, run_paths, Recording, SimulationConfig, WallPolicy};
use crate::rng::{child_seed, fill_gaussian, path_rng, substream, PathRng};
use crate::root_systems::{check_invariance_condition, reflect, MultiplicityFunction, RootSystem};
use crate::trajectory::{Termination, Trajectory};

pub const DEFAULT_SIGNIFICANCE: f64 = 0.01;

/// Final states of the paths that reached the horizon, and how many did not.
pub fn endpoints(sim: &DunklSimulator, x0: &[f64], config: &SimulationConfig) -> Result<(Vec<Vec<f64>>, usize)> {
    let cfg = config.clone().with_recording(Recording::Endpoints);
    let trs = sim.simulate(x0, &cfg)?;
    let total = trs.len();
    let ok: Vec<Vec<f64>> = trs
        .into_iter()
        .filter(Trajectory::reached_horizon)
        .map(|t| t.final_state().to_vec())
        .collect();
    let flagged = total - ok.len();
    Ok((ok, flagged))
}

fn project_all(xs: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    xs.iter().map(|x| dot(x, v)).collect()
}

/// KS on `x·v` for each `v`, Bonferroni-adjusted: the reported p-value is
/// `min(1, m·min_i p_i)`.
pub fn ks_bonferroni(
    name: &str,
    role: Role,
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    directions: &[Vec<f64>],
    significance: f64,
) -> VerificationReport {
    let mut worst_d: f64 = 0.0;
    let mut min_p: f64 = 1.0;
    let mut parts = Vec::new();
    for v in directions {
        let r = ks_two_sample(&project_all(a, v), &project_all(b, v));
        worst_d = worst_d.max(r.statistic);
        min_p = min_p.min(r.p_value);
        parts.push(format!("D={:.4} p={:.4}", r.statistic, r.p_value));
    }
    let adjusted = (min_p * directions.len() as f64).min(1.0);
    VerificationReport::significance(name, role, worst_d, adjusted, significance, a.len().min(b.len()))
        .with_detail(format!("n_a={} n_b={} [{}]", a.len(), b.len(), parts.join("; ")))
}

fn coordinate_directions(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect()
}

fn besq_dimension(system: &RootSystem, k: &MultiplicityFunction) -> f64 {
    system.dimension() as f64 + 2.0 * k.gamma(system)
}

/// Sample mean of `‖X_T‖²` against `‖x0‖² + (n + 2γ + offset)T`, within 3 SE.
pub fn besq_moment(
    name: &str,
    role: Role,
    sim: &DunklSimulator,
    x0: &[f64],
    config: &SimulationConfig,
    dimension_offset: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let (ends, flagged) = endpoints(sim, x0, config)?;
    let sq: Vec<f64> = ends.iter().map(|x| norm_sq(x)).collect();
    let (mean, se) = mean_and_se(&sq);
    let d = besq_dimension(sim.system(), sim.multiplicity()) + dimension_offset;
    let target = norm_sq(x0) + d * config.horizon;
    Ok(
        VerificationReport::tolerance(name, role, mean, Some(se), target, 3.0 * se, sq.len())
            .with_detail(format!("dimension {d}, flagged paths {flagged}"))
            .timed(start),
    )
}

/// KS between `‖X_T‖` and the 1-D Bessel EM oracle of dimension
/// `n + 2γ + offset` run at `dt/10`.
pub fn norm_is_bessel(
    name: &str,
    role: Role,
    sim: &DunklSimulator,
    x0: &[f64],
    config: &SimulationConfig,
    dimension_offset: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let (ends, flagged) = endpoints(sim, x0, config)?;
    let norms: Vec<f64> = ends.iter().map(|x| norm(x)).collect();
    let d = besq_dimension(sim.system(), sim.multiplicity()) + dimension_offset;
    let oracle = bessel_em_oracle(
        d,
        norm(x0),
        config.horizon,
        config.dt / 10.0,
        config.paths,
        child_seed(config.seed, "bessel-oracle"),
    )?;
    let r = ks_two_sample(&norms, &oracle);
    Ok(
        VerificationReport::significance(name, role, r.statistic, r.p_value, DEFAULT_SIGNIFICANCE, norms.len())
            .with_detail(format!("oracle dimension {d}, flagged paths {flagged}"))
            .timed(start),
    )
}

/// Coordinatewise KS between the chamber projection of `full` at the horizon
/// and `radial` started at the projection of `x0`.
pub fn projection_agreement(
    name: &str,
    role: Role,
    full: &DunklSimulator,
    radial: &DunklSimulator,
    x0: &[f64],
    config: &SimulationConfig,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let system = full.system();
    let (mut a, _) = endpoints(full, x0, config)?;
    for y in &mut a {
        system.fold_into_chamber(y);
    }
    let (px0, _) = system.project_to_chamber(x0);
    let mut rcfg = config.clone();
    rcfg.seed = child_seed(config.seed, "projection-radial");
    let (b, _) = endpoints(radial, &px0, &rcfg)?;
    let dirs = coordinate_directions(system.dimension());
    Ok(ks_bonferroni(name, role, &a, &b, &dirs, DEFAULT_SIGNIFICANCE).timed(start))
}

/// KS on `Y_T·v` between two simulators, the second run on a derived seed.
pub fn law_agreement(
    name: &str,
    role: Role,
    first: &DunklSimulator,
    second: &DunklSimulator,
    x0: &[f64],
    config: &SimulationConfig,
    directions: &[Vec<f64>],
) -> Result<VerificationReport> {
    let start = Instant::now();
    let (a, _) = endpoints(first, x0, config)?;
    let mut cfg2 = config.clone();
    cfg2.seed = child_seed(config.seed, "law-agreement-second");
    let (b, _) = endpoints(second, x0, &cfg2)?;
    Ok(ks_bonferroni(name, role, &a, &b, directions, DEFAULT_SIGNIFICANCE).timed(start))
}

/// Structural checks on lifted paths: every logged jump is the reflection of
/// its pre-state, chamber projections agree across jumps, and each level
/// stays in its region `C_i`. The estimate is the largest relative jump
/// error.
pub fn jump_structure(
    name: &str,
    sim: &DunklSimulator,
    x0: &[f64],
    config: &SimulationConfig,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let system = sim.system();
    let tracked = sim.clone().track_regions(true);
    let trs = tracked.simulate(x0, config)?;
    let mut worst: f64 = 0.0;
    let mut projection_gap: f64 = 0.0;
    let mut jumps = 0usize;
    let mut violations = 0u64;
    let mut exact = 0usize;
    for tr in &trs {
        violations += tr.diagnostics.region_violations;
        for j in &tr.jumps {
            jumps += 1;
            let scale = 1.0 + norm(&j.pre);
            let want = reflect(system.root(j.root), &j.pre);
            let err = max_abs_diff(&want, &j.post) / scale;
            if err == 0.0 {
                exact += 1;
            }
            worst = worst.max(err);
            let mut p = j.pre.clone();
            let mut q = j.post.clone();
            system.fold_into_chamber(&mut p);
            system.fold_into_chamber(&mut q);
            projection_gap = projection_gap.max(max_abs_diff(&p, &q) / scale);
        }
    }
    let mut r = VerificationReport::tolerance(name, Role::Check, worst, None, 0.0, 1e-12, trs.len());
    r.passed = r.passed && projection_gap <= 1e-12 && violations == 0 && jumps > 0;
    Ok(r.with_detail(format!(
        "jumps {jumps} ({exact} bit-exact), max projection gap {projection_gap:.2e}, region violations {violations}"
    ))
    .timed(start))
}

/// An axis-aligned box `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Rectangle {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Rectangle {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.lo).zip(&self.hi).all(|((v, a), b)| a <= v && v < b)
    }

    fn corners(&self) -> Vec<Vec<f64>> {
        let n = self.lo.len();
        (0..1usize << n)
            .map(|mask| (0..n).map(|i| if mask >> i & 1 == 1 { self.hi[i] } else { self.lo[i] }).collect())
            .collect()
    }
}

/// Up to `count` boxes of side `side` on a grid around `center`, each lying
/// inside a single chamber of `system` that contains `center`.
pub fn rectangles_near(system: &RootSystem, center: &[f64], side: f64, count: usize) -> Vec<Rectangle> {
    let n = center.len();
    let Some(home) = system.chamber_element(center) else {
        return Vec::new();
    };
    let span = 3i64;
    let mut offsets: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..n {
        offsets = offsets
            .into_iter()
            .flat_map(|o| {
                (-span..span).map(move |d| {
                    let mut o = o.clone();
                    o.push(d);
                    o
                })
            })
            .collect();
    }
    let mut boxes: Vec<(f64, Rectangle)> = offsets
        .into_iter()
        .map(|o| {
            let lo: Vec<f64> = center.iter().zip(&o).map(|(c, &d)| c + d as f64 * side).collect();
            let hi: Vec<f64> = lo.iter().map(|v| v + side).collect();
            let mid: Vec<f64> = lo.iter().map(|v| v + 0.5 * side).collect();
            (norm_sq(&mid.iter().zip(center).map(|(a, b)| a - b).collect::<Vec<_>>()), Rectangle::new(lo, hi))
        })
        .filter(|(_, r)| r.corners().iter().all(|c| system.chamber_element(c) == Some(home)))
        .collect();
    boxes.sort_by(|a, b| a.0.total_cmp(&b.0));
    boxes.into_iter().take(count).map(|(_, r)| r).collect()
}

/// `P^{j−1}(A) = P^j(A) + P^j(σ_{α_j}A)` on each rectangle `A ⊂ C_{j−1}`,
/// within 3 pooled standard errors. The estimate is the largest
/// standardized gap. With `omit_reflected` the `σA` term is dropped, which
/// must fail.
#[allow(clippy::too_many_arguments)]
pub fn folding_identity(
    name: &str,
    role: Role,
    system: &Arc<RootSystem>,
    k: &MultiplicityFunction,
    plan: &LiftPlan,
    j: usize,
    x0: &[f64],
    config: &SimulationConfig,
    rectangles: &[Rectangle],
    omit_reflected: bool,
) -> Result<VerificationReport> {
    let start = Instant::now();
    if j == 0 || j > plan.len() {
        return Err(Error::IndexOutOfRange { index: j, len: plan.len() });
    }
    let w = system
        .chamber_element(x0)
        .ok_or_else(|| Error::InvalidArgument("x0 lies on a wall".into()))?;
    let start_elt = system.weyl_group().inverse_index(w);
    let seq = fold_check_regions(system, plan, start_elt);
    if !seq.disjoint[j - 1] || !check_invariance_condition(system, &plan.enumeration, j)? {
        return Ok(VerificationReport::skipped(
            name,
            role,
            Error::HypothesisNotMet(format!("C_{} ∩ σ(C_{}) ≠ ∅ or the invariance condition fails at j = {j}", j - 1, j - 1))
                .to_string(),
        ));
    }
    let usable: Vec<&Rectangle> = rectangles
        .iter()
        .filter(|r| {
            let cs = r.corners();
            let first = system.chamber_element(&cs[0]);
            first.is_some_and(|g| seq.regions[j - 1].contains(&system.weyl_group().inverse_index(g)))
                && cs.iter().all(|c| system.chamber_element(c) == first)
        })
        .collect();
    if usable.is_empty() {
        return Err(Error::InvalidArgument("no rectangle lies inside C_{j−1}".into()));
    }
    let lower = DunklSimulator::with_plan(system.clone(), k.clone(), plan.truncated(j - 1))?;
    let upper = DunklSimulator::with_plan(system.clone(), k.clone(), plan.truncated(j))?;
    let (a, _) = endpoints(&lower, x0, config)?;
    let mut cfg = config.clone();
    cfg.seed = child_seed(config.seed, "folding-upper");
    let (b, _) = endpoints(&upper, x0, &cfg)?;
    let alpha = system.root(plan.enumeration[j - 1]);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for r in &usable {
        let p0 = a.iter().filter(|y| r.contains(y)).count() as f64 / na;
        let q = b
            .iter()
            .filter(|y| r.contains(y) || (!omit_reflected && r.contains(&reflect(alpha, y))))
            .count() as f64
            / nb;
        let se = (p0 * (1.0 - p0) / na + q * (1.0 - q) / nb).sqrt();
        let z = if se > 0.0 { (p0 - q).abs() / se } else if p0 == q { 0.0 } else { f64::INFINITY };
        worst = worst.max(z);
        parts.push(format!("{p0:.4}/{q:.4}"));
    }
    Ok(
        VerificationReport::tolerance(name, role, worst, None, 0.0, 3.0, a.len().min(b.len()))
            .with_detail(format!("{} rectangles, P^(j-1)/P^j+reflected: {}", usable.len(), parts.join(" ")))
            .timed(start),
    )
}

/// Fraction of rank-one paths from `x0` that reach the wall by the horizon,
/// for each `k`.
pub fn hit_fractions(ks: &[f64], x0: f64, config: &SimulationConfig) -> Result<Vec<(f64, f64)>> {
    let system = Arc::new(RootSystem::rank_one());
    let cfg = config.clone().with_recording(Recording::Endpoints);
    ks.iter()
        .map(|&kv| {
            let k = MultiplicityFunction::uniform(&system, kv)?;
            let trs = DunklSimulator::radial(system.clone(), k).simulate(&[x0], &cfg)?;
            let hits = trs.iter().filter(|t| t.hit_wall()).count();
            Ok((kv, hits as f64 / trs.len() as f64))
        })
        .collect()
}

pub const WALL_SWEEP: [f64; 6] = [0.1, 0.3, 0.45, 0.5, 0.6, 1.0];

/// Hit fractions must be nonincreasing in `k`, at least 1/2 at `k = 0.1` and
/// at most 1% for `k ≥ 0.6`. The estimate is the fraction at the smallest `k`.
pub fn wall_hitting_profile(name: &str, role: Role, x0: f64, config: &SimulationConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let f = hit_fractions(&WALL_SWEEP, x0, config)?;
    let monotone = f.windows(2).all(|w| w[1].1 <= w[0].1);
    let low = f[0].1 >= 0.5;
    let high = f.iter().filter(|(k, _)| *k >= 0.6).all(|(_, v)| *v <= 0.01);
    let r = VerificationReport::flag(name, role, f[0].1, monotone && low && high, config.paths);
    let listing: Vec<String> = f.iter().map(|(k, v)| format!("k={k}: {v:.4}")).collect();
    Ok(r.with_detail(format!(
        "{} (monotone {monotone}, k=0.1 ≥ 0.5 {low}, k ≥ 0.6 ≤ 0.01 {high}, policy {:?})",
        listing.join(", "),
        config.wall_policy
    ))
    .timed(start))
}

/// A random orthogonal transform (rotation, possibly composed with a
/// coordinate reflection).
pub fn random_orthogonal(n: usize, rng: &mut PathRng) -> Transform {
    let mut t = Transform::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            t = Transform::givens(n, i, j, rng.random_range(0.0..2.0 * PI)).compose(&t);
        }
    }
    if rng.random_bool(0.5) {
        let mut e = vec![0.0; n];
        e[0] = 2f64.sqrt();
        t = Transform::reflection(&e).compose(&t);
    }
    t
}

/// A random smooth test function `exp(−‖x−c‖²/4)(1 + a·x) + sin(b·x)`.
pub fn random_test_function(n: usize, rng: &mut PathRng) -> TestFunction {
    let mut draw = |s: f64| -> Vec<f64> { (0..n).map(|_| rng.random_range(-s..s)).collect() };
    let (a, b, c) = (draw(1.0), draw(1.0), draw(2.0));
    TestFunction::new("random", move |x| {
        let d: f64 = x.iter().zip(&c).map(|(p, q)| (p - q).powi(2)).sum();
        (-d / 4.0).exp() * (1.0 + dot(&a, x)) + dot(&b, x).sin()
    })
}

/// A point with `|x·α| ≥ margin·‖x‖` for every root, norm in `[0.5, 3]`,
/// in a random chamber (or in `C` when `in_chamber`).
pub fn random_point_off_walls(system: &RootSystem, margin: f64, in_chamber: bool, rng: &mut PathRng) -> Vec<f64> {
    let n = system.dimension();
    let mut x = vec![0.0; n];
    loop {
        fill_gaussian(rng, 1.0, &mut x);
        let r = norm(&x);
        if r == 0.0 {
            continue;
        }
        let target = rng.random_range(0.5..3.0);
        x.iter_mut().for_each(|v| *v *= target / r);
        if in_chamber {
            system.fold_into_chamber(&mut x);
        }
        if system.positive_roots().iter().all(|a| dot(a, &x).abs() >= margin * target) {
            return x;
        }
    }
}

/// Largest relative residual `|L^{θR}_{k_θ} u(θx) − L^R_k(u∘θ)(x)| / scale`
/// over random `(θ, u, x)`.
pub fn rotation_identity(name: &str, spec: &GeneratorSpec, trials: usize, seed: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut rng = path_rng(seed, substream::SAMPLING, 0);
    let n = spec.dimension();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let theta = random_orthogonal(n, &mut rng);
        let u = random_test_function(n, &mut rng);
        let x = random_point_off_walls(&spec.system, 0.1, false, &mut rng);
        let rotated = rotate_spec(spec, &theta)?;
        worst = worst.max(identity_residual(spec, &rotated, &theta, &u, &x)?);
    }
    Ok(VerificationReport::tolerance(name, Role::Check, worst, None, 0.0, 1e-6, trials).timed(start))
}

fn identity_residual(
    spec: &GeneratorSpec,
    rotated: &GeneratorSpec,
    theta: &Transform,
    u: &TestFunction,
    x: &[f64],
) -> Result<f64> {
    let lhs = apply_generator(rotated, u, &theta.apply(x))?;
    let rhs = apply_generator(spec, &u.compose(theta), x)?;
    Ok((lhs.value - rhs.value).abs() / lhs.scale.max(rhs.scale))
}

/// The spec on `θR` with `k` looked up by vector in the original `R`
/// instead of transported. Requires `θR = R`.
pub fn untransported_spec(spec: &GeneratorSpec, theta: &Transform) -> Result<GeneratorSpec> {
    let rotated = spec.system.rotated(theta)?;
    let lookup = |m: &MultiplicityFunction| -> Result<MultiplicityFunction> {
        let per_orbit = rotated
            .orbits()
            .iter()
            .map(|orbit| {
                let v = rotated.root(orbit[0]);
                spec.system
                    .find_root(v)
                    .map(|j| m.value(j))
                    .ok_or_else(|| Error::InvalidArgument("θ does not map R onto itself".into()))
            })
            .collect::<Result<Vec<f64>>>()?;
        MultiplicityFunction::new(&rotated, &per_orbit)
    };
    let drift = lookup(&spec.drift)?;
    let jumps = match &spec.jumps {
        Some(j) => Some(crate::dunkl_calculus::JumpPart {
            coefficients: lookup(&j.coefficients)?,
            active: j.active.clone(),
        }),
        None => None,
    };
    Ok(GeneratorSpec {
        system: Arc::new(rotated),
        drift,
        jumps,
        point_jump: spec.point_jump.clone(),
    })
}

/// Negative control: the generator identity with the untransported
/// multiplicity, for a symmetry `θ` of `R` that permutes orbits.
pub fn rotation_identity_control(
    name: &str,
    spec: &GeneratorSpec,
    theta: &Transform,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let naive = untransported_spec(spec, theta)?;
    let mut rng = path_rng(seed, substream::SAMPLING, 1);
    let n = spec.dimension();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let u = random_test_function(n, &mut rng);
        let x = random_point_off_walls(&spec.system, 0.1, false, &mut rng);
        worst = worst.max(identity_residual(spec, &naive, theta, &u, &x)?);
    }
    Ok(VerificationReport::tolerance(name, Role::NegativeControl, worst, None, 0.0, 1e-6, trials).timed(start))
}

/// Simulate under `(k, R, x0)`, rotate endpoints by `θ`, and compare with a
/// simulation under `(k_θ, θR, θx0)`; coordinatewise KS with Bonferroni.
/// With `transport = false` the rotated run uses the untransported `k`.
#[allow(clippy::too_many_arguments)]
pub fn rotation_law(
    name: &str,
    role: Role,
    system: &Arc<RootSystem>,
    k: &MultiplicityFunction,
    theta: &Transform,
    x0: &[f64],
    config: &SimulationConfig,
    transport: bool,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let base = DunklSimulator::full(system.clone(), k.clone(), None, ModeRequest::Auto)?;
    let (a, _) = endpoints(&base, x0, config)?;
    let a: Vec<Vec<f64>> = a.iter().map(|y| theta.apply(y)).collect();
    let spec = GeneratorSpec::dunkl(system.clone(), k.clone());
    let rspec = if transport { rotate_spec(&spec, theta)? } else { untransported_spec(&spec, theta)? };
    let rotated = DunklSimulator::full(rspec.system.clone(), rspec.drift.clone(), None, ModeRequest::Auto)?;
    let mut cfg = config.clone();
    cfg.seed = child_seed(config.seed, "rotation-law");
    let (b, _) = endpoints(&rotated, &theta.apply(x0), &cfg)?;
    let dirs = coordinate_directions(system.dimension());
    Ok(ks_bonferroni(name, role, &a, &b, &dirs, DEFAULT_SIGNIFICANCE).timed(start))
}

/// Martingale residual statistics for one test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MartingaleEstimate {
    pub mean: f64,
    pub standard_error: f64,
    pub paths: usize,
    /// Paths dropped because they stopped early or met a wall.
    pub dropped: usize,
}

/// The five standard test functions in dimension `n`: `‖x‖²`, a linear
/// form, a cubic, a trigonometric product and a Gaussian bump at `center`.
pub fn standard_test_functions(n: usize, center: &[f64]) -> Vec<TestFunction> {
    let v: Vec<f64> = (0..n).map(|i| 1.0 / (i + 1) as f64).collect();
    let c = center.to_vec();
    vec![
        TestFunction::norm_squared(),
        TestFunction::linear(v),
        TestFunction::new("cubic", move |x| if x.len() > 1 { x[0] * x[0] * x[1] } else { x[0].powi(3) }),
        TestFunction::new("trig", |x| x[0].cos() * if x.len() > 1 { x[1].sin() } else { 1.0 }),
        TestFunction::new("bump", move |x| {
            (-0.5 * x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>()).exp()
        }),
    ]
}

fn path_residuals(tr: &Trajectory, spec: &GeneratorSpec, tests: &[TestFunction]) -> Option<Vec<f64>> {
    if tr.termination != Termination::Horizon {
        return None;
    }
    let m = tr.len();
    let mut out = Vec::with_capacity(tests.len());
    for u in tests {
        let mut integral = 0.0;
        for j in 0..m - 1 {
            let g = apply_generator(spec, u, tr.state(j)).ok()?;
            integral += g.value * (tr.times[j + 1] - tr.times[j]);
        }
        out.push(u.eval(tr.final_state()) - u.eval(tr.state(0)) - integral);
    }
    Some(out)
}

fn summarize(rows: Vec<Option<Vec<f64>>>, count: usize) -> Vec<MartingaleEstimate> {
    let total = rows.len();
    let ok: Vec<Vec<f64>> = rows.into_iter().flatten().collect();
    (0..count)
        .map(|i| {
            let col: Vec<f64> = ok.iter().map(|r| r[i]).collect();
            let (mean, se) = mean_and_se(&col);
            MartingaleEstimate {
                mean,
                standard_error: se,
                paths: ok.len(),
                dropped: total - ok.len(),
            }
        })
        .collect()
}

/// `u(X_T) − u(X_0) − Σ_j 𝒜u(X_{t_j})(t_{j+1} − t_j)` averaged over paths of
/// `sim`, for every test function.
pub fn martingale_estimates(
    sim: &DunklSimulator,
    spec: &GeneratorSpec,
    tests: &[TestFunction],
    x0: &[f64],
    config: &SimulationConfig,
) -> Result<Vec<MartingaleEstimate>> {
    if spec.dimension() != sim.system().dimension() {
        return Err(Error::DimensionMismatch { expected: sim.system().dimension(), got: spec.dimension() });
    }
    let cfg = config.clone().with_recording(Recording::EveryStep);
    sim.validate(x0, &cfg)?;
    let rows = run_paths(cfg.paths, cfg.threads, |i| {
        sim.simulate_path(x0, &cfg, i).ok().and_then(|tr| path_residuals(&tr, spec, tests))
    });
    Ok(summarize(rows, tests.len()))
}

/// Brownian paths (exact Gaussian increments on the grid).
fn brownian_path(x0: &[f64], config: &SimulationConfig, i: u64) -> Trajectory {
    let mut rng = path_rng(config.seed, substream::DIFFUSION, i);
    let grid = config.grid();
    let mut tr = Trajectory::new(i, x0.len());
    let mut x = x0.to_vec();
    let mut dw = vec![0.0; x0.len()];
    tr.push(0.0, &x);
    for w in grid.windows(2) {
        fill_gaussian(&mut rng, w[1] - w[0], &mut dw);
        x.iter_mut().zip(&dw).for_each(|(a, b)| *a += b);
        tr.push(w[1], &x);
    }
    tr
}

/// Bias slopes `c_u = |mean residual|/dt` measured on Brownian motion
/// (`k ≡ 0`), where the exact residual mean is zero.
pub fn calibrate_bias(
    system: &Arc<RootSystem>,
    tests: &[TestFunction],
    x0: &[f64],
    config: &SimulationConfig,
) -> Result<Vec<f64>> {
    let k0 = MultiplicityFunction::uniform(system, 0.0)?;
    let spec = GeneratorSpec::radial(system.clone(), k0);
    let mut cfg = config.clone();
    cfg.seed = child_seed(config.seed, "bias-calibration");
    let rows: Vec<Option<Vec<f64>>> = (0..cfg.paths as u64)
        .into_par_iter()
        .map(|i| path_residuals(&brownian_path(x0, &cfg, i), &spec, tests))
        .collect();
    Ok(summarize(rows, tests.len()).iter().map(|e| e.mean.abs() / cfg.dt).collect())
}

/// Pass iff `|mean| ≤ 3·SE + c·dt`.
pub fn martingale_report(name: &str, role: Role, e: &MartingaleEstimate, bias_slope: f64, dt: f64) -> VerificationReport {
    let allowance = bias_slope * dt;
    VerificationReport::tolerance(name, role, e.mean, Some(e.standard_error), 0.0, 3.0 * e.standard_error + allowance, e.paths)
        .with_detail(format!("bias slope c = {bias_slope:.4e}, allowance {allowance:.3e}, dropped paths {}", e.dropped))
}

/// Largest relative harmonicity residual over random chamber points.
pub fn harmonicity_check(
    name: &str,
    target: HarmonicTarget,
    system: &Arc<RootSystem>,
    k: &MultiplicityFunction,
    points: usize,
    tolerance: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut rng = path_rng(seed, substream::SAMPLING, 2);
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let x = random_point_off_walls(system, 0.1, true, &mut rng);
        let (r, s) = crate::dunkl_calculus::harmonicity_residual(target, system, k, &x)?;
        worst = worst.max(if s > 0.0 { r.abs() / s } else { r.abs() });
    }
    Ok(VerificationReport::tolerance(name, Role::Check, worst, None, 0.0, tolerance, points).timed(start))
}

/// Rank-one wall sweep with every `k` forced to reject-and-halve. No path
/// can register a hit, so the profile must fail.
pub fn wall_hitting_control(name: &str, x0: f64, config: &SimulationConfig) -> Result<VerificationReport> {
    let cfg = config.clone().with_wall_policy(WallPolicy::RejectAndHalve);
    wall_hitting_profile(name, Role::NegativeControl, x0, &cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangles_lie_in_one_chamber() {
        let s = RootSystem::type_b(2).unwrap();
        let rs = rectangles_near(&s, &[2.0, 1.0], 0.4, 10);
        assert_eq!(rs.len(), 10);
        for r in &rs {
            for c in r.corners() {
                assert!(s.positive_roots().iter().all(|a| dot(a, &c) > 0.0));
            }
        }
    }

    #[test]
    fn untransported_k_swaps_orbits() {
        let s = Arc::new(RootSystem::type_b(2).unwrap());
        let k = MultiplicityFunction::new(&s, &[0.75, 1.25]).unwrap();
        let spec = GeneratorSpec::dunkl(s.clone(), k);
        let theta = Transform::givens(2, 0, 1, PI / 4.0);
        let naive = untransported_spec(&spec, &theta).unwrap();
        assert_eq!(naive.drift.per_orbit(), &[1.25, 0.75]);
        assert!(untransported_spec(&spec, &Transform::givens(2, 0, 1, 0.3)).is_err());
    }

    #[test]
    fn constant_has_zero_residual() {
        let s = Arc::new(RootSystem::type_b(2).unwrap());
        let k = MultiplicityFunction::uniform(&s, 1.0).unwrap();
        let sim = DunklSimulator::full(s.clone(), k.clone(), None, ModeRequest::Auto).unwrap();
        let spec = GeneratorSpec::dunkl(s, k);
        let cfg = SimulationConfig::new(0.2, 1e-2, 20, 1);
        let e = martingale_estimates(&sim, &spec, &[TestFunction::constant(3.0)], &[2.0, 1.0], &cfg).unwrap();
        assert_eq!(e[0].mean, 0.0);
    }
}
