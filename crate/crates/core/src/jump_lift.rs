//! Reconstruction of the full Dunkl process from its radial part by adding
//! reflection jumps one positive root at a time.
//!
//! Layer `i` of a [`LiftPlan`] turns a process `Y^{i−1}` into `Y^i` by jumping
//! across `α_i` at intensity `c_i/(y·α_i)²`. Each layer keeps an integrated
//! intensity `Λ` and an `Exp(1)` threshold; the layer fires when `Λ` reaches
//! the threshold. In shortcut mode the firing flips a parity so that
//! `Y^i = σ_{α_i}^{N} Y^{i−1}`. In general mode the reflected point becomes
//! the new starting point of the lower dynamics.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, Transform};
use crate::radial_sde::{run_paths, Advance, DiffusionField, SimulationConfig};
use crate::rng::{path_rng, substream, unit_exponential, PathRng};
use crate::root_systems::{check_invariance_condition, reflect_in_place, MultiplicityFunction, RootSystem};
use crate::trajectory::{JumpEvent, Termination, Trajectory};

/// Largest integrated intensity allowed to accumulate over one sub-step.
pub const LAMBDA_MAX: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftMode {
    /// Independent Poisson flips of the lower process.
    Shortcut,
    /// One clock driving reflect-and-restart of the lower dynamics.
    General,
}

/// Requested mode; `Auto` picks shortcut wherever the invariance condition
/// holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeRequest {
    Shortcut,
    General,
    #[default]
    Auto,
}

impl std::str::FromStr for ModeRequest {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shortcut" => Ok(ModeRequest::Shortcut),
            "general" => Ok(ModeRequest::General),
            "auto" => Ok(ModeRequest::Auto),
            _ => Err(Error::InvalidArgument(format!("unknown mode {s:?}"))),
        }
    }
}

/// Enumerated roots, per-root jump rates and modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftPlan {
    pub enumeration: Vec<usize>,
    pub modes: Vec<LiftMode>,
    pub rates: Vec<f64>,
}

impl LiftPlan {
    pub fn empty() -> Self {
        Self {
            enumeration: Vec::new(),
            modes: Vec::new(),
            rates: Vec::new(),
        }
    }

    /// A plan over `enumeration` (a prefix of an ordering of `R_+`) with
    /// rates read from `rates`.
    pub fn new(
        system: &RootSystem,
        enumeration: &[usize],
        rates: &MultiplicityFunction,
        mode: ModeRequest,
    ) -> Result<Self> {
        let mut modes = Vec::with_capacity(enumeration.len());
        for i in 1..=enumeration.len() {
            modes.push(match mode {
                ModeRequest::Shortcut => LiftMode::Shortcut,
                ModeRequest::General => LiftMode::General,
                ModeRequest::Auto if check_invariance_condition(system, enumeration, i)? => LiftMode::Shortcut,
                ModeRequest::Auto => LiftMode::General,
            });
        }
        let plan = Self {
            enumeration: enumeration.to_vec(),
            modes,
            rates: enumeration.iter().map(|&r| rates.value(r)).collect(),
        };
        plan.validate(system)?;
        Ok(plan)
    }

    pub fn len(&self) -> usize {
        self.enumeration.len()
    }

    pub fn is_empty(&self) -> bool {
        self.enumeration.is_empty()
    }

    /// The first `i` layers.
    pub fn truncated(&self, i: usize) -> Self {
        let i = i.min(self.len());
        Self {
            enumeration: self.enumeration[..i].to_vec(),
            modes: self.modes[..i].to_vec(),
            rates: self.rates[..i].to_vec(),
        }
    }

    pub fn validate(&self, system: &RootSystem) -> Result<()> {
        let m = self.enumeration.len();
        if self.modes.len() != m || self.rates.len() != m {
            return Err(Error::InvalidPlan("enumeration, modes and rates differ in length".into()));
        }
        for (i, &r) in self.enumeration.iter().enumerate() {
            if r >= system.roots().len() || !system.is_positive(r) {
                return Err(Error::InvalidPlan(format!("entry {} (root {r}) is not a positive root", i + 1)));
            }
            if self.enumeration[..i].contains(&r) {
                return Err(Error::InvalidPlan(format!("root {r} listed twice")));
            }
            if !(self.rates[i] >= 0.0 && self.rates[i].is_finite()) {
                return Err(Error::InvalidPlan(format!("rate {} must be finite and ≥ 0", i + 1)));
            }
            if self.modes[i] == LiftMode::Shortcut && !check_invariance_condition(system, &self.enumeration, i + 1)? {
                return Err(Error::InvalidPlan(format!(
                    "shortcut requested at i = {} where σ_{{α_i}}(R^{{i−1}}) ≠ R^{{i−1}}",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// `C_i` as sets of Weyl group elements `g`, each standing for the chamber
/// `g·C_0` with `C_0` the chamber of the start point.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSequence {
    pub regions: Vec<Vec<usize>>,
    /// `disjoint[i−1]`: whether `C_{i−1} ∩ σ_{α_i}(C_{i−1}) = ∅`.
    pub disjoint: Vec<bool>,
    /// `C_m` is all of ℝⁿ (up to walls).
    pub covers_space: bool,
}

impl RegionSequence {
    /// Whether `y` (off all walls) lies in `C_i`.
    pub fn contains(&self, system: &RootSystem, i: usize, y: &[f64]) -> bool {
        match system.chamber_element(y) {
            Some(w) => self.regions[i].contains(&system.weyl_group().inverse_index(w)),
            None => false,
        }
    }

    /// Half-space normals of each chamber making up `C_i`.
    pub fn descriptors(&self, system: &RootSystem, i: usize) -> Vec<Vec<Vec<f64>>> {
        self.regions[i]
            .iter()
            .map(|&g| {
                let w = system.weyl_group().element(g);
                system.positive_roots().iter().map(|a| w.apply(a)).collect()
            })
            .collect()
    }
}

fn reflection_element(system: &RootSystem, root: usize) -> usize {
    system
        .weyl_group()
        .find(&Transform::reflection(system.root(root)))
        .expect("root reflections belong to the Weyl group")
}

/// `C_0 = g_0·C`, `C_i = C_{i−1} ∪ σ_{α_i}(C_{i−1})`.
pub fn fold_check_regions(system: &RootSystem, plan: &LiftPlan, start_element: usize) -> RegionSequence {
    let group = system.weyl_group();
    let mut regions = vec![vec![start_element]];
    let mut disjoint = Vec::with_capacity(plan.len());
    for &r in &plan.enumeration {
        let s = reflection_element(system, r);
        let prev = regions.last().unwrap().clone();
        let image: Vec<usize> = prev.iter().map(|&g| group.compose_index(s, g)).collect();
        disjoint.push(image.iter().all(|g| !prev.contains(g)));
        let mut next = prev;
        for g in image {
            if !next.contains(&g) {
                next.push(g);
            }
        }
        next.sort_unstable();
        regions.push(next);
    }
    let covers_space = regions.last().unwrap().len() == group.order();
    RegionSequence {
        regions,
        disjoint,
        covers_space,
    }
}

/// Trapezoidal `Ã_t = ∫_0^t ds/(Y_s·α)²` at the recorded times.
pub fn cumulative_time_change(trajectory: &Trajectory, alpha: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(trajectory.len());
    let mut prev = 0.0;
    let mut acc = 0.0;
    for (i, (&t, y)) in trajectory.times.iter().zip(trajectory.states()).enumerate() {
        let d = dot(y, alpha);
        if d == 0.0 {
            return Err(Error::SingularClock { index: i });
        }
        let v = 1.0 / (d * d);
        if i > 0 {
            acc += 0.5 * (t - trajectory.times[i - 1]) * (prev + v);
        }
        out.push(acc);
        prev = v;
    }
    Ok(out)
}

/// `τ̃(a) = inf{t : Ã_t > a}`, linearly interpolated on the grid.
pub fn inverse_time_change(times: &[f64], clock: &[f64], a: f64) -> Option<f64> {
    let j = clock.iter().position(|&c| c > a)?;
    if j == 0 {
        return Some(times[0]);
    }
    let (c0, c1) = (clock[j - 1], clock[j]);
    let f = (a - c0) / (c1 - c0);
    Some(times[j - 1] + f * (times[j] - times[j - 1]))
}

/// Simulator of `Y^ℓ` for a plan with `ℓ` layers on top of the radial
/// process with multiplicity `k`.
#[derive(Debug, Clone)]
pub struct DunklSimulator {
    system: Arc<RootSystem>,
    k: MultiplicityFunction,
    plan: LiftPlan,
    track_regions: bool,
}

impl DunklSimulator {
    /// No lifts: the (extended) radial process.
    pub fn radial(system: Arc<RootSystem>, k: MultiplicityFunction) -> Self {
        Self {
            system,
            k,
            plan: LiftPlan::empty(),
            track_regions: false,
        }
    }

    pub fn with_plan(system: Arc<RootSystem>, k: MultiplicityFunction, plan: LiftPlan) -> Result<Self> {
        plan.validate(&system)?;
        Ok(Self {
            system,
            k,
            plan,
            track_regions: false,
        })
    }

    /// All of `R_+` in the system's enumeration, jump rates from `jump`
    /// (defaults to `k`).
    pub fn full(
        system: Arc<RootSystem>,
        k: MultiplicityFunction,
        jump: Option<&MultiplicityFunction>,
        mode: ModeRequest,
    ) -> Result<Self> {
        let plan = LiftPlan::new(&system, system.positive(), jump.unwrap_or(&k), mode)?;
        Self::with_plan(system, k, plan)
    }

    /// Add one more layer jumping across `root`.
    pub fn lift(mut self, root: usize, rate: f64, mode: LiftMode) -> Result<Self> {
        self.plan.enumeration.push(root);
        self.plan.rates.push(rate);
        self.plan.modes.push(mode);
        self.plan.validate(&self.system)?;
        Ok(self)
    }

    /// Count grid times at which a level leaves its region `C_i`. Levels
    /// below a general-mode layer are internal state and are not checked.
    pub fn track_regions(mut self, on: bool) -> Self {
        self.track_regions = on;
        self
    }

    pub fn plan(&self) -> &LiftPlan {
        &self.plan
    }

    pub fn system(&self) -> &Arc<RootSystem> {
        &self.system
    }

    pub fn multiplicity(&self) -> &MultiplicityFunction {
        &self.k
    }

    /// Errors that [`Self::simulate`] would report for this start and config.
    pub fn validate(&self, x0: &[f64], config: &SimulationConfig) -> Result<()> {
        config.validate()?;
        if x0.len() != self.system.dimension() {
            return Err(Error::DimensionMismatch { expected: self.system.dimension(), got: x0.len() });
        }
        if !self.plan.is_empty() && self.k.min() < 0.5 {
            return Err(Error::UnsupportedRegime(format!(
                "jump lifts need k ≥ 1/2 on every root (min k = {})",
                self.k.min()
            )));
        }
        let tol = config.wall_epsilon * (1.0 + norm(x0));
        if let Some(&r) = self.system.positive().iter().find(|&&r| dot(self.system.root(r), x0).abs() <= tol) {
            return Err(Error::WallContact { root: r, value: dot(self.system.root(r), x0) });
        }
        Ok(())
    }

    pub fn simulate(&self, x0: &[f64], config: &SimulationConfig) -> Result<Vec<Trajectory>> {
        self.validate(x0, config)?;
        run_paths(config.paths, config.threads, |i| self.run_path(x0, config, i))
            .into_iter()
            .collect()
    }

    pub fn simulate_path(&self, x0: &[f64], config: &SimulationConfig, path_index: u64) -> Result<Trajectory> {
        self.validate(x0, config)?;
        self.run_path(x0, config, path_index)
    }

    fn run_path(&self, x0: &[f64], config: &SimulationConfig, path_index: u64) -> Result<Trajectory> {
        let mut state = LiftState::new(self, x0, config, path_index)?;
        state.run(self, config)
    }
}

struct LiftState<'a> {
    field: DiffusionField<'a>,
    n: usize,
    base: Vec<f64>,
    parity: Vec<bool>,
    lam: Vec<f64>,
    threshold: Vec<f64>,
    /// Levels `y_0, …, y_ℓ`, flattened.
    levels: Vec<f64>,
    rng_diffusion: PathRng,
    rng_clock: PathRng,
    rng_poisson: PathRng,
    regions: Option<(RegionSequence, usize)>,
    tr: Trajectory,
}

impl<'a> LiftState<'a> {
    fn new(sim: &'a DunklSimulator, x0: &[f64], config: &SimulationConfig, path_index: u64) -> Result<Self> {
        let system: &RootSystem = &sim.system;
        let l = sim.plan.len();
        let n = system.dimension();
        let mut rng_clock = path_rng(config.seed, substream::CLOCK, path_index);
        let mut rng_poisson = path_rng(config.seed, substream::POISSON, path_index);
        let threshold = sim
            .plan
            .modes
            .iter()
            .map(|m| match m {
                LiftMode::Shortcut => unit_exponential(&mut rng_poisson),
                LiftMode::General => unit_exponential(&mut rng_clock),
            })
            .collect();
        let regions = if sim.track_regions {
            let w = system
                .chamber_element(x0)
                .ok_or_else(|| Error::InvalidArgument("x0 lies on a wall".into()))?;
            let start = system.weyl_group().inverse_index(w);
            let lowest = sim.plan.modes.iter().rposition(|&m| m == LiftMode::General).map_or(0, |j| j + 1);
            Some((fold_check_regions(system, &sim.plan, start), lowest))
        } else {
            None
        };
        Ok(Self {
            field: DiffusionField::new(system, &sim.k, x0, config)?,
            n,
            base: x0.to_vec(),
            parity: vec![false; l],
            lam: vec![0.0; l],
            threshold,
            levels: vec![0.0; (l + 1) * n],
            rng_diffusion: path_rng(config.seed, substream::DIFFUSION, path_index),
            rng_clock,
            rng_poisson,
            regions,
            tr: Trajectory::new(path_index, n),
        })
    }

    fn level(&self, i: usize) -> &[f64] {
        &self.levels[i * self.n..(i + 1) * self.n]
    }

    fn top(&self) -> &[f64] {
        self.level(self.parity.len())
    }

    fn compute_levels(&mut self, sim: &DunklSimulator) {
        let n = self.n;
        self.levels[..n].copy_from_slice(&self.base);
        for j in 1..=self.parity.len() {
            let (lower, upper) = self.levels.split_at_mut(j * n);
            let y = &mut upper[..n];
            y.copy_from_slice(&lower[(j - 1) * n..]);
            if self.parity[j - 1] {
                reflect_in_place(sim.system.root(sim.plan.enumeration[j - 1]), y);
            }
        }
    }

    /// Intensities `c_j/(y_{j−1}·α_j)²` at the current levels.
    fn intensities(&self, sim: &DunklSimulator, out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            let c = sim.plan.rates[j];
            *o = if c == 0.0 {
                0.0
            } else {
                let d = dot(self.level(j), sim.system.root(sim.plan.enumeration[j]));
                c / (d * d)
            };
        }
    }

    fn record(&mut self, sim: &DunklSimulator, t: f64) {
        let top = self.top().to_vec();
        self.tr.push(t, &top);
        if let Some((regions, lowest)) = &self.regions {
            let system: &RootSystem = &sim.system;
            let bad = (*lowest..=self.parity.len()).any(|i| !regions.contains(system, i, self.level(i)));
            if bad {
                self.tr.diagnostics.region_violations += 1;
            }
        }
    }

    fn fire(&mut self, sim: &DunklSimulator, j: usize, t: f64) -> Result<()> {
        let system: &RootSystem = &sim.system;
        let pre = self.top().to_vec();
        let root = sim.plan.enumeration[j];
        match sim.plan.modes[j] {
            LiftMode::Shortcut => {
                self.parity[j] = !self.parity[j];
                self.threshold[j] = unit_exponential(&mut self.rng_poisson);
            }
            LiftMode::General => {
                let mut z = self.level(j + 1).to_vec();
                reflect_in_place(system.root(root), &mut z);
                self.base.copy_from_slice(&z);
                self.parity[..j].iter_mut().for_each(|p| *p = false);
                self.field.reset_chamber(&self.base)?;
                self.threshold[j] = unit_exponential(&mut self.rng_clock);
            }
        }
        self.lam[j] = 0.0;
        self.compute_levels(sim);
        let mut r = root;
        for l in j + 1..self.parity.len() {
            if self.parity[l] {
                r = system.reflect_index(sim.plan.enumeration[l], r);
            }
        }
        self.tr.jumps.push(JumpEvent {
            time: t,
            root: system.positive_representative(r),
            level: j + 1,
            pre,
            post: self.top().to_vec(),
        });
        Ok(())
    }

    fn run(&mut self, sim: &DunklSimulator, config: &SimulationConfig) -> Result<Trajectory> {
        let grid = config.grid();
        let last = grid.len() - 1;
        let layers = self.parity.len();
        self.compute_levels(sim);
        self.record(sim, 0.0);
        let mut left = vec![0.0; layers];
        let mut right = vec![0.0; layers];
        let mut fire = Vec::with_capacity(layers);
        for jg in 1..=last {
            let t_end = grid[jg];
            let mut t = grid[jg - 1];
            let min_step = 1e-12 * config.dt;
            while t_end - t > min_step {
                self.intensities(sim, &mut left);
                let mut h = t_end - t;
                let mut truncated_by = None;
                for j in 0..layers {
                    if left[j] > 0.0 {
                        let cross = (self.threshold[j] - self.lam[j]).max(0.0) / left[j];
                        if cross < h {
                            h = cross;
                            truncated_by = Some(j);
                        }
                        let cap = LAMBDA_MAX / left[j];
                        if cap < h {
                            h = cap;
                            truncated_by = None;
                        }
                    }
                }
                if h <= min_step && truncated_by.is_none() {
                    h = min_step;
                }
                if h > min_step || truncated_by.is_none() {
                    let at_end = truncated_by.is_none() && h >= t_end - t;
                    let mut rejected = 0;
                    let outcome = self.field.advance(&mut self.base, h, &mut self.rng_diffusion, &mut rejected);
                    self.tr.diagnostics.rejected_steps += rejected;
                    let stop = match outcome {
                        Advance::Done => None,
                        Advance::Hit(dt) => Some((t + dt, Termination::HitWall { time: t + dt })),
                        Advance::Failed(dt) => Some((t + dt, Termination::StepFailure { time: t + dt })),
                    };
                    self.compute_levels(sim);
                    if let Some((tt, termination)) = stop {
                        self.record(sim, tt);
                        self.tr.termination = termination;
                        self.tr.diagnostics.wall_artifact = sim.k.min() >= 0.5 && matches!(termination, Termination::HitWall { .. });
                        return Ok(std::mem::replace(&mut self.tr, Trajectory::new(0, self.n)));
                    }
                    self.intensities(sim, &mut right);
                    for j in 0..layers {
                        self.lam[j] += 0.5 * h * (left[j] + right[j]);
                    }
                    t = if at_end { t_end } else { t + h };
                }
                fire.clear();
                fire.extend((0..layers).filter(|&j| self.lam[j] >= self.threshold[j] || truncated_by == Some(j)));
                for &j in &fire {
                    self.fire(sim, j, t)?;
                }
            }
            if config.records(jg, last) {
                self.record(sim, t_end);
            }
        }
        Ok(std::mem::replace(&mut self.tr, Trajectory::new(0, self.n)))
    }
}

/// The Dunkl process (or its `(k, k′)` analogue when `k_prime` is given)
/// started at `x0` off every wall.
pub fn simulate_dunkl(
    system: Arc<RootSystem>,
    k: MultiplicityFunction,
    k_prime: Option<&MultiplicityFunction>,
    enumeration: Option<&[usize]>,
    mode: ModeRequest,
    x0: &[f64],
    config: &SimulationConfig,
) -> Result<Vec<Trajectory>> {
    let order = enumeration.unwrap_or(system.positive()).to_vec();
    if order.len() != system.positive().len() {
        return Err(Error::InvalidPlan(format!(
            "enumeration has {} roots, R_+ has {}",
            order.len(),
            system.positive().len()
        )));
    }
    let plan = LiftPlan::new(&system, &order, k_prime.unwrap_or(&k), mode)?;
    DunklSimulator::with_plan(system, k, plan)?.simulate(x0, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_sde::Recording;
    use crate::root_systems::reflect;

    fn b2() -> Arc<RootSystem> {
        Arc::new(RootSystem::type_b(2).unwrap())
    }

    #[test]
    fn regions_for_b2() {
        let s = b2();
        let k = MultiplicityFunction::uniform(&s, 1.0).unwrap();
        let plan = LiftPlan::new(&s, s.positive(), &k, ModeRequest::Auto).unwrap();
        assert!(plan.modes.iter().all(|&m| m == LiftMode::Shortcut));
        let id = s.weyl_group().find(&Transform::identity(2)).unwrap();
        let seq = fold_check_regions(&s, &plan, id);
        assert_eq!(seq.regions[0], vec![id]);
        // |W| = 8 chambers are covered after three doublings, so the fourth
        // step overlaps.
        assert_eq!(seq.disjoint, vec![true, true, true, false]);
        assert_eq!(seq.regions.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 2, 4, 8, 8]);
        assert!(seq.covers_space);
        assert!(seq.contains(&s, 0, &[2.0, 1.0]));
        assert!(!seq.contains(&s, 0, &[1.0, 2.0]));
        assert!(seq.contains(&s, 1, &[1.0, 2.0]));
    }

    #[test]
    fn shortcut_where_condition_fails_is_rejected() {
        let s = Arc::new(RootSystem::type_a(3).unwrap());
        let k = MultiplicityFunction::uniform(&s, 1.0).unwrap();
        assert!(matches!(
            LiftPlan::new(&s, s.positive(), &k, ModeRequest::Shortcut),
            Err(Error::InvalidPlan(_))
        ));
        let auto = LiftPlan::new(&s, s.positive(), &k, ModeRequest::Auto).unwrap();
        assert_eq!(auto.modes[1], LiftMode::General);
        let json = serde_json::to_string(&auto).unwrap();
        assert!(json.starts_with("{\"enumeration\":[0,1,2],\"modes\":[\"shortcut\",\"general\",\"shortcut\"]"));
        assert_eq!(serde_json::from_str::<LiftPlan>(&json).unwrap(), auto);
    }

    #[test]
    fn time_change_of_constant_path() {
        let mut tr = Trajectory::new(0, 2);
        let alpha = [2.0f64.sqrt(), 0.0];
        for i in 0..=10 {
            tr.push(i as f64 * 0.1, &[2.0f64.sqrt(), 5.0]);
        }
        let a = cumulative_time_change(&tr, &alpha).unwrap();
        for (t, v) in tr.times.iter().zip(&a) {
            assert!((v - t / 4.0).abs() < 1e-14);
        }
        let tau = inverse_time_change(&tr.times, &a, 0.125).unwrap();
        assert!((tau - 0.5).abs() < 1e-12);
        let mut bad = Trajectory::new(0, 2);
        bad.push(0.0, &[0.0, 1.0]);
        assert!(matches!(cumulative_time_change(&bad, &alpha), Err(Error::SingularClock { index: 0 })));
    }

    #[test]
    fn zero_rate_means_no_jumps() {
        let s = b2();
        let k = MultiplicityFunction::uniform(&s, 1.0).unwrap();
        let kp = MultiplicityFunction::uniform(&s, 0.0).unwrap();
        let cfg = SimulationConfig::new(0.5, 1e-3, 4, 1);
        let trs = simulate_dunkl(s.clone(), k.clone(), Some(&kp), None, ModeRequest::Auto, &[2.0, 1.0], &cfg).unwrap();
        assert!(trs.iter().all(|t| t.jumps.is_empty()));
        let radial = crate::radial_sde::simulate_radial(&s, &k, &[2.0, 1.0], &cfg).unwrap();
        for (a, b) in trs.iter().zip(&radial) {
            assert_eq!(a.final_state(), b.final_state());
        }
    }

    #[test]
    fn jumps_are_reflections_and_regions_hold() {
        let s = b2();
        let k = MultiplicityFunction::uniform(&s, 1.0).unwrap();
        let cfg = SimulationConfig::new(1.0, 1e-3, 16, 5).with_recording(Recording::Every(10));
        for mode in [ModeRequest::Shortcut, ModeRequest::General] {
            let sim = DunklSimulator::full(s.clone(), k.clone(), None, mode).unwrap().track_regions(true);
            let trs = sim.simulate(&[2.0, 1.0], &cfg).unwrap();
            let mut jumps = 0;
            for tr in &trs {
                assert!(tr.reached_horizon());
                assert_eq!(tr.diagnostics.region_violations, 0);
                for j in &tr.jumps {
                    jumps += 1;
                    let want = reflect(s.root(j.root), &j.pre);
                    let err = crate::linalg::max_abs_diff(&want, &j.post);
                    assert!(err <= 1e-12 * (1.0 + norm(&j.pre)), "{err}");
                }
            }
            assert!(jumps > 0);
        }
    }

    #[test]
    fn low_multiplicity_is_unsupported() {
        let s = b2();
        let k = MultiplicityFunction::uniform(&s, 0.3).unwrap();
        let cfg = SimulationConfig::new(0.1, 1e-2, 1, 0);
        let r = simulate_dunkl(s, k, None, None, ModeRequest::Auto, &[2.0, 1.0], &cfg);
        assert!(matches!(r, Err(Error::UnsupportedRegime(_))));
    }
}
