use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::checks::*;
use super::report::{Role, VerificationReport};
use crate::dunkl_calculus::{GeneratorSpec, HarmonicTarget};
use crate::error::{Error, Result};
use crate::jump_lift::{DunklSimulator, LiftMode, LiftPlan, ModeRequest};
use crate::linalg::Transform;
use crate::radial_sde::SimulationConfig;
use crate::rng::{child_seed, path_rng, substream};
use crate::root_systems::{MultiplicityFunction, RootSystem};

/// Sample sizes and discretization for the battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteSettings {
    pub seed: u64,
    pub horizon: f64,
    pub dt: f64,
    pub ks_paths: usize,
    pub moment_paths: usize,
    pub fold_paths: usize,
    pub martingale_paths: usize,
    pub wall_paths: usize,
    pub wall_dt: f64,
    pub rotation_trials: usize,
    pub harmonic_points: usize,
    pub threads: usize,
}

impl Default for SuiteSettings {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            horizon: 1.0,
            dt: 1e-3,
            ks_paths: 5000,
            moment_paths: 20_000,
            fold_paths: 10_000,
            martingale_paths: 5000,
            wall_paths: 2000,
            wall_dt: 1e-4,
            rotation_trials: 50,
            harmonic_points: 100,
            threads: 0,
        }
    }
}

impl SuiteSettings {
    fn config(&self, paths: usize, label: &str) -> SimulationConfig {
        SimulationConfig::new(self.horizon, self.dt, paths, child_seed(self.seed, label)).with_threads(self.threads)
    }
}

/// The process under test.
#[derive(Debug, Clone)]
pub struct SuiteTarget {
    pub system: Arc<RootSystem>,
    pub k: MultiplicityFunction,
    /// Jump multiplicity of the two-parameter variant; `k + 1/2` when absent.
    pub k_prime: Option<MultiplicityFunction>,
    pub x0: Vec<f64>,
}

impl SuiteTarget {
    /// `B_2`, `k ≡ 1`, `x0 = (2, 1)`.
    pub fn b2_default() -> Self {
        let system = Arc::new(RootSystem::type_b(2).expect("B2 is a root system"));
        let k = MultiplicityFunction::uniform(&system, 1.0).expect("k ≥ 0");
        Self {
            system,
            k,
            k_prime: None,
            x0: vec![2.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub reports: Vec<VerificationReport>,
    /// Negative controls that passed.
    pub vacuous: Vec<String>,
}

impl SuiteOutcome {
    /// Every non-skipped check passed.
    pub fn checks_passed(&self) -> bool {
        self.reports
            .iter()
            .filter(|r| r.role == Role::Check && !r.skipped)
            .all(|r| r.passed)
    }

    pub fn ok(&self) -> bool {
        self.checks_passed() && self.vacuous.is_empty()
    }

    pub fn into_result(self) -> Result<Self> {
        if self.vacuous.is_empty() {
            Ok(self)
        } else {
            Err(Error::VacuousCheck(self.vacuous.join(", ")))
        }
    }
}

/// Harmonicity of `δ`, `δ̄` (when some orbit has `k = 1/2`), `Δπ = 0` and
/// the power identity.
pub fn harmonic_reports(target: &SuiteTarget, points: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    let s = &target.system;
    let k = &target.k;
    let mut out = vec![harmonicity_check("harmonic/delta", HarmonicTarget::Delta, s, k, points, 1e-5, seed)?];
    if k.per_orbit().contains(&0.5) {
        out.push(harmonicity_check("harmonic/delta_bar", HarmonicTarget::DeltaBar, s, k, points, 1e-5, seed)?);
    }
    out.push(harmonicity_check("harmonic/laplacian_pi", HarmonicTarget::Pi, s, k, points, 1e-6, seed)?);
    out.push(harmonicity_check(
        "harmonic/power_identity",
        HarmonicTarget::PowerIdentity { k: k.per_orbit()[0] },
        s,
        k,
        points,
        1e-6,
        seed,
    )?);
    Ok(out)
}

/// Run the full battery with negative controls.
pub fn run_suite(target: &SuiteTarget, settings: &SuiteSettings) -> Result<SuiteOutcome> {
    let mut reports = Vec::new();
    let s = target.system.clone();
    let k = target.k.clone();
    let x0 = target.x0.as_slice();
    let n = s.dimension();
    if k.min() < 0.5 {
        return Err(Error::UnsupportedRegime("the suite needs k ≥ 1/2 on every root".into()));
    }
    let k_prime = match &target.k_prime {
        Some(kp) => kp.clone(),
        None => {
            let shifted: Vec<f64> = k.per_orbit().iter().map(|v| v + 0.5).collect();
            MultiplicityFunction::new(&s, &shifted)?
        }
    };

    reports.extend(harmonic_reports(target, settings.harmonic_points, child_seed(settings.seed, "harmonic"))?);

    let radial = DunklSimulator::radial(s.clone(), k.clone());
    let full = DunklSimulator::full(s.clone(), k.clone(), None, ModeRequest::Auto)?;

    let cfg = settings.config(settings.moment_paths, "moment");
    reports.push(besq_moment("besq_moment/radial", Role::Check, &radial, x0, &cfg, 0.0)?);
    reports.push(besq_moment("besq_moment/off_by_one", Role::NegativeControl, &radial, x0, &cfg, 1.0)?);

    let cfg = settings.config(settings.ks_paths, "norm-law");
    reports.push(norm_is_bessel("norm_is_bessel/radial", Role::Check, &radial, x0, &cfg, 0.0)?);
    reports.push(norm_is_bessel("norm_is_bessel/dunkl", Role::Check, &full, x0, &cfg, 0.0)?);
    reports.push(norm_is_bessel("norm_is_bessel/off_by_one", Role::NegativeControl, &radial, x0, &cfg, 1.0)?);

    let first = s.positive()[0];
    let rate = k.value(first);
    let shortcut = DunklSimulator::radial(s.clone(), k.clone()).lift(first, rate, LiftMode::Shortcut)?;
    let general = DunklSimulator::radial(s.clone(), k.clone()).lift(first, rate, LiftMode::General)?;
    let silent = DunklSimulator::radial(s.clone(), k.clone()).lift(first, 0.0, LiftMode::General)?;
    let mut dirs: Vec<Vec<f64>> = vec![s.root(first).to_vec()];
    dirs.extend((0..n.min(2)).map(|i| {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        e
    }));
    let cfg = settings.config(settings.ks_paths, "modes");
    reports.push(law_agreement("mode_equivalence/i=1", Role::Check, &shortcut, &general, x0, &cfg, &dirs)?);
    reports.push(law_agreement("mode_equivalence/zero_rate", Role::NegativeControl, &shortcut, &silent, x0, &cfg, &dirs)?);

    let cfg = settings.config(settings.ks_paths, "projection");
    reports.push(projection_agreement("projection_agreement", Role::Check, &full, &radial, x0, &cfg)?);
    let shifted: Vec<f64> = k.per_orbit().iter().map(|v| v + 0.5).collect();
    let wrong = DunklSimulator::radial(s.clone(), MultiplicityFunction::new(&s, &shifted)?);
    reports.push(projection_agreement("projection_agreement/mismatched_k", Role::NegativeControl, &full, &wrong, x0, &cfg)?);
    let cfg = settings.config(settings.ks_paths.min(1000), "jumps");
    reports.push(jump_structure("jump_structure", &full, x0, &cfg)?);

    let mut plan = LiftPlan::new(&s, s.positive(), &k, ModeRequest::Auto)?;
    plan.modes[0] = LiftMode::General;
    let rects = rectangles_near(&s, x0, 0.5, 10);
    let cfg = settings.config(settings.fold_paths, "folding");
    reports.push(folding_identity("folding_identity/j=1", Role::Check, &s, &k, &plan, 1, x0, &cfg, &rects, false)?);
    reports.push(folding_identity(
        "folding_identity/without_reflection",
        Role::NegativeControl,
        &s,
        &k,
        &plan,
        1,
        x0,
        &cfg,
        &rects,
        true,
    )?);

    let wall_cfg = SimulationConfig::new(1.0, settings.wall_dt, settings.wall_paths, child_seed(settings.seed, "wall"))
        .with_threads(settings.threads);
    reports.push(wall_hitting_profile("wall_hitting_profile", Role::Check, 0.2, &wall_cfg)?);
    reports.push(wall_hitting_control("wall_hitting_profile/no_stopping", 0.2, &wall_cfg)?);

    let spec = GeneratorSpec::dunkl(s.clone(), k.clone());
    reports.push(rotation_identity(
        "rotation_covariance/identity",
        &spec,
        settings.rotation_trials,
        child_seed(settings.seed, "rotation"),
    )?);
    let b2 = Arc::new(RootSystem::type_b(2)?);
    let two_orbit = GeneratorSpec::dunkl(b2.clone(), MultiplicityFunction::new(&b2, &[0.75, 1.25])?);
    reports.push(rotation_identity_control(
        "rotation_covariance/untransported_k",
        &two_orbit,
        &Transform::givens(2, 0, 1, PI / 4.0),
        settings.rotation_trials,
        child_seed(settings.seed, "rotation-control"),
    )?);
    let mut rng = path_rng(child_seed(settings.seed, "rotation-law"), substream::SAMPLING, 0);
    let theta = random_orthogonal(n, &mut rng);
    let cfg = settings.config(settings.ks_paths, "rotation-law");
    reports.push(rotation_law("rotation_covariance/law", Role::Check, &s, &k, &theta, x0, &cfg, true)?);

    reports.extend(martingale_reports(target, &k_prime, settings)?);

    let vacuous = reports
        .iter()
        .filter(|r| r.role == Role::NegativeControl && !r.skipped && r.passed)
        .map(|r| r.name.clone())
        .collect();
    Ok(SuiteOutcome { reports, vacuous })
}

/// Five test functions against the radial, Dunkl and `(k, k′)` processes,
/// plus the Dunkl process tested against the radial generator.
pub fn martingale_reports(
    target: &SuiteTarget,
    k_prime: &MultiplicityFunction,
    settings: &SuiteSettings,
) -> Result<Vec<VerificationReport>> {
    let s = &target.system;
    let k = &target.k;
    let x0 = target.x0.as_slice();
    let tests = standard_test_functions(s.dimension(), x0);
    let cfg = settings.config(settings.martingale_paths, "martingale");
    let slopes = calibrate_bias(s, &tests, x0, &cfg)?;
    let cases = [
        ("radial", DunklSimulator::radial(s.clone(), k.clone()), GeneratorSpec::radial(s.clone(), k.clone())),
        (
            "dunkl",
            DunklSimulator::full(s.clone(), k.clone(), None, ModeRequest::Auto)?,
            GeneratorSpec::dunkl(s.clone(), k.clone()),
        ),
        (
            "two_parameter",
            DunklSimulator::full(s.clone(), k.clone(), Some(k_prime), ModeRequest::Auto)?,
            GeneratorSpec::two_parameter(s.clone(), k.clone(), k_prime.clone()),
        ),
    ];
    let mut out = Vec::new();
    for (label, sim, spec) in &cases {
        let t0 = Instant::now();
        let est = martingale_estimates(sim, spec, &tests, x0, &cfg)?;
        for ((u, e), c) in tests.iter().zip(&est).zip(&slopes) {
            out.push(
                martingale_report(&format!("martingale/{label}/{}", u.name()), Role::Check, e, *c, cfg.dt)
                    .timed(t0),
            );
        }
    }
    let t0 = Instant::now();
    let linear = &tests[1..2];
    let est = martingale_estimates(&cases[1].1, &cases[0].2, linear, x0, &cfg)?;
    out.push(
        martingale_report("martingale/dunkl_vs_radial_generator", Role::NegativeControl, &est[0], slopes[1], cfg.dt)
            .timed(t0),
    );
    Ok(out)
}
