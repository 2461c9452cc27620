//! Euler–Maruyama simulation of the radial Dunkl process
//! `dX = dβ + ∇log ϖ_k(X) dt` in the Weyl chamber.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dunkl_calculus::drift;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, norm_sq};
use crate::rng::{fill_gaussian, path_rng, substream, PathRng};
use crate::root_systems::{MultiplicityFunction, RootSystem};
use crate::trajectory::{Termination, Trajectory};

/// What to do when a proposed step leaves the chamber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WallPolicy {
    /// Reject and retry with half the step when `min k ≥ 1/2`, stop at `T_0`
    /// otherwise.
    #[default]
    Auto,
    RejectAndHalve,
    StopAtT0,
}

impl WallPolicy {
    pub fn resolve(self, k: &MultiplicityFunction) -> WallPolicy {
        match self {
            WallPolicy::Auto if k.min() >= 0.5 => WallPolicy::RejectAndHalve,
            WallPolicy::Auto => WallPolicy::StopAtT0,
            p => p,
        }
    }
}

/// Which grid times are stored in a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recording {
    #[default]
    EveryStep,
    Every(usize),
    Endpoints,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub horizon: f64,
    pub dt: f64,
    pub paths: usize,
    pub seed: u64,
    #[serde(default)]
    pub wall_policy: WallPolicy,
    #[serde(default = "default_halvings")]
    pub max_halvings: u32,
    /// Relative wall threshold: a state is at the wall once
    /// `min |α·x| ≤ wall_epsilon·(1 + ‖x‖)`.
    #[serde(default = "default_wall_epsilon")]
    pub wall_epsilon: f64,
    #[serde(default)]
    pub recording: Recording,
    /// Worker threads, 0 for the rayon default.
    #[serde(default)]
    pub threads: usize,
}

fn default_halvings() -> u32 {
    20
}

fn default_wall_epsilon() -> f64 {
    1e-8
}

impl SimulationConfig {
    pub fn new(horizon: f64, dt: f64, paths: usize, seed: u64) -> Self {
        Self {
            horizon,
            dt,
            paths,
            seed,
            wall_policy: WallPolicy::Auto,
            max_halvings: default_halvings(),
            wall_epsilon: default_wall_epsilon(),
            recording: Recording::EveryStep,
            threads: 0,
        }
    }

    pub fn with_recording(mut self, recording: Recording) -> Self {
        self.recording = recording;
        self
    }

    pub fn with_wall_policy(mut self, policy: WallPolicy) -> Self {
        self.wall_policy = policy;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad("horizon must be positive");
        }
        if !(self.dt > 0.0) {
            return bad("dt must be positive");
        }
        if self.dt > self.horizon {
            return bad("dt must not exceed the horizon");
        }
        if self.paths == 0 {
            return bad("at least one path is required");
        }
        if self.max_halvings > 60 {
            return bad("max_halvings must be at most 60");
        }
        if !(self.wall_epsilon >= 0.0) {
            return bad("wall_epsilon must be nonnegative");
        }
        if let Recording::Every(0) = self.recording {
            return bad("recording stride must be positive");
        }
        Ok(())
    }

    /// Grid times `0 = t_0 < … < t_M = T`.
    pub fn grid(&self) -> Vec<f64> {
        let m = (self.horizon / self.dt - 1e-9).ceil().max(1.0) as usize;
        (0..=m).map(|j| (j as f64 * self.dt).min(self.horizon)).collect()
    }

    pub(crate) fn records(&self, j: usize, last: usize) -> bool {
        j == 0
            || j == last
            || match self.recording {
                Recording::EveryStep => true,
                Recording::Every(s) => j % s == 0,
                Recording::Endpoints => false,
            }
    }
}

/// One Euler–Maruyama step `x + dW + drift(k, x)·dt`.
pub fn em_step(system: &RootSystem, k: &MultiplicityFunction, x: &[f64], dt: f64, dw: &[f64]) -> Result<Vec<f64>> {
    if x.len() != system.dimension() || dw.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: system.dimension(), got: dw.len().min(x.len()) });
    }
    let b = drift(system, k, x)?;
    Ok(x.iter().zip(dw).zip(&b).map(|((xi, wi), bi)| xi + wi + bi * dt).collect())
}

/// Outcome of advancing the diffusion over a fixed time span.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Advance {
    Done,
    /// Wall reached after the given elapsed time; the state holds the
    /// interpolated contact point.
    Hit(f64),
    /// Halvings exhausted after the given elapsed time.
    Failed(f64),
}

/// The radial drift field over the chamber containing the start point.
#[derive(Debug, Clone)]
pub(crate) struct DiffusionField<'a> {
    system: &'a RootSystem,
    k: &'a MultiplicityFunction,
    /// `(root index, sign of α·x)` for every positive root.
    signs: Vec<(usize, f64)>,
    policy: WallPolicy,
    max_halvings: u32,
    wall_epsilon: f64,
    dw: Vec<f64>,
    cand: Vec<f64>,
    b: Vec<f64>,
}

impl<'a> DiffusionField<'a> {
    pub(crate) fn new(
        system: &'a RootSystem,
        k: &'a MultiplicityFunction,
        x0: &[f64],
        config: &SimulationConfig,
    ) -> Result<Self> {
        let n = system.dimension();
        if x0.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
        }
        let mut field = Self {
            system,
            k,
            signs: Vec::new(),
            policy: config.wall_policy.resolve(k),
            max_halvings: config.max_halvings,
            wall_epsilon: config.wall_epsilon,
            dw: vec![0.0; n],
            cand: vec![0.0; n],
            b: vec![0.0; n],
        };
        field.reset_chamber(x0)?;
        Ok(field)
    }

    /// Re-anchor on the chamber containing `x`.
    pub(crate) fn reset_chamber(&mut self, x: &[f64]) -> Result<()> {
        let tol = self.wall_epsilon * (1.0 + norm(x));
        self.signs.clear();
        for &r in self.system.positive() {
            let d = dot(self.system.root(r), x);
            if d.abs() <= tol {
                return Err(Error::WallContact { root: r, value: d });
            }
            self.signs.push((r, d.signum()));
        }
        Ok(())
    }

    /// Smallest signed wall distance minus the wall threshold.
    fn margin(&self, x: &[f64]) -> f64 {
        let tol = self.wall_epsilon * (1.0 + norm(x));
        self.signs
            .iter()
            .map(|&(r, s)| s * dot(self.system.root(r), x) - tol)
            .fold(f64::INFINITY, f64::min)
    }

    fn propose(&mut self, x: &[f64], h: f64, rng: &mut PathRng) {
        fill_gaussian(rng, h, &mut self.dw);
        self.b.iter_mut().for_each(|v| *v = 0.0);
        for &(r, _) in &self.signs {
            let a = self.system.root(r);
            let c = self.k.value(r) / dot(a, x);
            for (bi, ai) in self.b.iter_mut().zip(a) {
                *bi += c * ai;
            }
        }
        for i in 0..x.len() {
            self.cand[i] = x[i] + self.dw[i] + self.b[i] * h;
        }
    }

    /// Advance `x` by exactly `span` time units.
    pub(crate) fn advance(&mut self, x: &mut [f64], span: f64, rng: &mut PathRng, rejected: &mut u64) -> Advance {
        match self.policy {
            WallPolicy::StopAtT0 => {
                self.propose(x, span, rng);
                let m1 = self.margin(&self.cand);
                if m1 > 0.0 {
                    x.copy_from_slice(&self.cand);
                    return Advance::Done;
                }
                let m0 = self.margin(x).max(0.0);
                let f = if m0 - m1 > 0.0 { (m0 / (m0 - m1)).clamp(0.0, 1.0) } else { 0.0 };
                for i in 0..x.len() {
                    x[i] += f * (self.cand[i] - x[i]);
                }
                Advance::Hit(f * span)
            }
            _ => {
                let mut elapsed = 0.0;
                let mut level = 0u32;
                loop {
                    let remaining = span - elapsed;
                    let step = span * 0.5f64.powi(level as i32);
                    let last = step >= remaining * (1.0 - 1e-12);
                    let h = if last { remaining } else { step };
                    self.propose(x, h, rng);
                    if self.margin(&self.cand) > 0.0 {
                        x.copy_from_slice(&self.cand);
                        if last {
                            return Advance::Done;
                        }
                        elapsed += h;
                        level = level.saturating_sub(1);
                    } else {
                        *rejected += 1;
                        level += 1;
                        if level > self.max_halvings {
                            return Advance::Failed(elapsed);
                        }
                    }
                }
            }
        }
    }
}

/// Run `f(path_index)` for every path, in parallel, results in path order.
pub(crate) fn run_paths<T, F>(paths: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Send + Sync,
{
    let go = || (0..paths as u64).into_par_iter().map(&f).collect();
    if threads == 0 {
        go()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(go),
            Err(_) => go(),
        }
    }
}

fn require_interior(system: &RootSystem, x0: &[f64]) -> Result<()> {
    if x0.len() != system.dimension() {
        return Err(Error::DimensionMismatch { expected: system.dimension(), got: x0.len() });
    }
    if system.positive_roots().iter().any(|a| !(dot(a, x0) > 0.0)) {
        return Err(Error::InvalidArgument("x0 must lie in the open chamber".into()));
    }
    Ok(())
}

/// Simulate one radial path. `x0` may lie in any open chamber; the path stays
/// in that chamber.
pub fn simulate_radial_path(
    system: &RootSystem,
    k: &MultiplicityFunction,
    x0: &[f64],
    config: &SimulationConfig,
    path_index: u64,
) -> Result<Trajectory> {
    config.validate()?;
    let mut field = DiffusionField::new(system, k, x0, config)?;
    let mut rng = path_rng(config.seed, substream::DIFFUSION, path_index);
    let grid = config.grid();
    let last = grid.len() - 1;
    let mut tr = Trajectory::new(path_index, system.dimension());
    let mut x = x0.to_vec();
    tr.push(0.0, &x);
    for j in 1..=last {
        let t0 = grid[j - 1];
        let span = grid[j] - t0;
        match field.advance(&mut x, span, &mut rng, &mut tr.diagnostics.rejected_steps) {
            Advance::Done => {
                if config.records(j, last) {
                    tr.push(grid[j], &x);
                }
            }
            Advance::Hit(dt) => {
                let t = t0 + dt;
                tr.push(t, &x);
                tr.termination = Termination::HitWall { time: t };
                tr.diagnostics.wall_artifact = k.min() >= 0.5;
                return Ok(tr);
            }
            Advance::Failed(dt) => {
                let t = t0 + dt;
                if *tr.times.last().unwrap() < t {
                    tr.push(t, &x);
                }
                tr.termination = Termination::StepFailure { time: t };
                return Ok(tr);
            }
        }
    }
    Ok(tr)
}

/// Simulate `config.paths` independent radial paths from `x0 ∈ C`.
pub fn simulate_radial(
    system: &RootSystem,
    k: &MultiplicityFunction,
    x0: &[f64],
    config: &SimulationConfig,
) -> Result<Vec<Trajectory>> {
    config.validate()?;
    require_interior(system, x0)?;
    run_paths(config.paths, config.threads, |i| simulate_radial_path(system, k, x0, config, i))
        .into_iter()
        .collect()
}

/// A radial model bundled for repeated use.
#[derive(Debug, Clone)]
pub struct RadialModel {
    pub system: Arc<RootSystem>,
    pub k: MultiplicityFunction,
}

impl RadialModel {
    pub fn new(system: Arc<RootSystem>, k: MultiplicityFunction) -> Self {
        Self { system, k }
    }

    pub fn simulate(&self, x0: &[f64], config: &SimulationConfig) -> Result<Vec<Trajectory>> {
        simulate_radial(&self.system, &self.k, x0, config)
    }

    /// BESQ dimension `n + 2γ` of `‖X‖²`.
    pub fn besq_dimension(&self) -> f64 {
        self.system.dimension() as f64 + 2.0 * self.k.gamma(&self.system)
    }
}

/// Endpoint statistics of a batch of paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub paths: usize,
    pub horizon: f64,
    /// Mean of `‖X_T‖²` over paths that reached the horizon.
    pub mean_norm_sq: f64,
    pub se_norm_sq: f64,
    pub hit_fraction: f64,
    pub failure_fraction: f64,
    pub rejected_steps: u64,
    pub jumps: u64,
    pub wall_epsilon: f64,
}

impl SimulationSummary {
    pub fn from_trajectories(trajectories: &[Trajectory], config: &SimulationConfig) -> Self {
        let finals: Vec<f64> = trajectories
            .iter()
            .filter(|t| t.reached_horizon())
            .map(|t| norm_sq(t.final_state()))
            .collect();
        let (mean, se) = mean_and_se(&finals);
        let n = trajectories.len().max(1) as f64;
        Self {
            paths: trajectories.len(),
            horizon: config.horizon,
            mean_norm_sq: mean,
            se_norm_sq: se,
            hit_fraction: trajectories.iter().filter(|t| t.hit_wall()).count() as f64 / n,
            failure_fraction: trajectories
                .iter()
                .filter(|t| matches!(t.termination, Termination::StepFailure { .. }))
                .count() as f64
                / n,
            rejected_steps: trajectories.iter().map(|t| t.diagnostics.rejected_steps).sum(),
            jumps: trajectories.iter().map(|t| t.jumps.len() as u64).sum(),
            wall_epsilon: config.wall_epsilon,
        }
    }
}

/// Sample mean and its standard error.
pub fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, f64::INFINITY);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    #[test]
    fn em_step_examples() {
        let s = RootSystem::rank_one();
        let k = MultiplicityFunction::uniform(&s, 1.0).unwrap();
        let y = em_step(&s, &k, &[0.5], 0.01, &[0.0]).unwrap();
        assert!((y[0] - 0.52).abs() < 1e-15);
        let b2 = RootSystem::type_b(2).unwrap();
        let k0 = MultiplicityFunction::uniform(&b2, 0.0).unwrap();
        assert_eq!(em_step(&b2, &k0, &[1.0, 0.5], 0.1, &[0.3, -0.2]).unwrap(), vec![1.3, 0.3]);
    }

    #[test]
    fn em_step_is_w_equivariant() {
        let s = RootSystem::type_b(2).unwrap();
        let k = MultiplicityFunction::new(&s, &[0.7, 1.3]).unwrap();
        let x = [2.0, 0.6];
        let dw = [0.05, -0.02];
        let base = em_step(&s, &k, &x, 0.01, &dw).unwrap();
        for w in s.weyl_group().elements() {
            let y = em_step(&s, &k, &w.apply(&x), 0.01, &w.apply(&dw)).unwrap();
            assert!(max_abs_diff(&y, &w.apply(&base)) < 1e-13);
        }
    }

    #[test]
    fn config_validation() {
        assert!(SimulationConfig::new(1.0, 0.1, 1, 0).validate().is_ok());
        assert!(SimulationConfig::new(1.0, 2.0, 1, 0).validate().is_err());
        assert!(SimulationConfig::new(1.0, 0.1, 0, 0).validate().is_err());
        assert!(SimulationConfig::new(-1.0, 0.1, 1, 0).validate().is_err());
        let g = SimulationConfig::new(1.0, 0.3, 1, 0).grid();
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
    }

    #[test]
    fn radial_paths_stay_in_chamber_and_replay() {
        let s = RootSystem::type_b(2).unwrap();
        let k = MultiplicityFunction::uniform(&s, 1.0).unwrap();
        let cfg = SimulationConfig::new(0.5, 1e-3, 8, 7);
        let a = simulate_radial(&s, &k, &[2.0, 1.0], &cfg).unwrap();
        let b = simulate_radial(&s, &k, &[2.0, 1.0], &cfg.clone().with_threads(1)).unwrap();
        assert_eq!(a, b);
        for tr in &a {
            assert!(tr.reached_horizon());
            assert!(tr.jumps.is_empty());
            assert!(tr.times.windows(2).all(|w| w[0] < w[1]));
            for x in tr.states() {
                assert!(s.positive_roots().iter().all(|r| dot(r, x) > 0.0));
            }
        }
    }

    #[test]
    fn off_chamber_start_is_rejected() {
        let s = RootSystem::type_b(2).unwrap();
        let k = MultiplicityFunction::uniform(&s, 1.0).unwrap();
        let cfg = SimulationConfig::new(0.1, 0.01, 1, 0);
        assert!(simulate_radial(&s, &k, &[1.0, 2.0], &cfg).is_err());
        assert!(simulate_radial(&s, &k, &[1.0, 1.0], &cfg).is_err());
    }

    #[test]
    fn small_k_hits_the_wall() {
        let s = RootSystem::rank_one();
        let k = MultiplicityFunction::uniform(&s, 0.3).unwrap();
        let cfg = SimulationConfig::new(1.0, 1e-3, 200, 3).with_recording(Recording::Endpoints);
        let trs = simulate_radial(&s, &k, &[0.2], &cfg).unwrap();
        let hits = trs.iter().filter(|t| t.hit_wall()).count();
        assert!(hits > 20, "{hits}");
        for t in trs.iter().filter(|t| t.hit_wall()) {
            assert!(t.final_state()[0].abs() < 1e-6);
            assert!(!t.diagnostics.wall_artifact);
        }
    }
}
