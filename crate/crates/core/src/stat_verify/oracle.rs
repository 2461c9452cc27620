//! One-dimensional Bessel samplers used as reference laws.

use rand_distr::{ChiSquared, Distribution};

use crate::error::{Error, Result};
use crate::rng::{path_rng, standard_normal, substream};

/// `R_t` for the Bessel process of dimension `d ≥ 2`,
/// `dR = dβ + (d−1)/(2R) dt`, by Euler–Maruyama on a grid of step `dt`.
pub fn bessel_em_oracle(dimension: f64, r0: f64, t: f64, dt: f64, samples: usize, seed: u64) -> Result<Vec<f64>> {
    if !(dimension >= 2.0) {
        return Err(Error::InvalidArgument("EM Bessel oracle needs dimension ≥ 2".into()));
    }
    if !(r0 > 0.0 && t > 0.0 && dt > 0.0) {
        return Err(Error::InvalidArgument("r0, t and dt must be positive".into()));
    }
    let steps = (t / dt).round().max(1.0) as usize;
    let h = t / steps as f64;
    let sh = h.sqrt();
    let c = 0.5 * (dimension - 1.0);
    Ok((0..samples as u64)
        .map(|i| {
            let mut rng = path_rng(seed, substream::ORACLE, i);
            let mut r = r0;
            for _ in 0..steps {
                r = (r + sh * standard_normal(&mut rng) + c / r * h).abs();
            }
            r
        })
        .collect())
}

/// Exact `R_t²` for BESQ of dimension `d > 1`:
/// `t·(χ²_{d−1} + (Z + r0/√t)²)`.
pub fn besq_exact_oracle(dimension: f64, r0: f64, t: f64, samples: usize, seed: u64) -> Result<Vec<f64>> {
    if !(dimension > 1.0) {
        return Err(Error::InvalidArgument("exact BESQ oracle needs dimension > 1".into()));
    }
    let chi = ChiSquared::new(dimension - 1.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let shift = r0 / t.sqrt();
    Ok((0..samples as u64)
        .map(|i| {
            let mut rng = path_rng(seed, substream::ORACLE ^ 0x1, i);
            let z = standard_normal(&mut rng) + shift;
            t * (chi.sample(&mut rng) + z * z)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stat_verify::ks::ks_two_sample;

    #[test]
    fn em_oracle_matches_exact_law() {
        let em = bessel_em_oracle(10.0, 5f64.sqrt(), 1.0, 1e-3, 3000, 11).unwrap();
        let exact: Vec<f64> = besq_exact_oracle(10.0, 5f64.sqrt(), 1.0, 3000, 12)
            .unwrap()
            .into_iter()
            .map(f64::sqrt)
            .collect();
        let r = ks_two_sample(&em, &exact);
        assert!(r.p_value > 0.01, "{r:?}");
    }

    #[test]
    fn exact_mean() {
        let v = besq_exact_oracle(3.0, 1.0, 2.0, 40000, 3).unwrap();
        let m = v.iter().sum::<f64>() / v.len() as f64;
        // E R_t² = r0² + d t = 7, sd ≈ √(4·r0²·t + 2d t²)/√N
        assert!((m - 7.0).abs() < 4.0 * (8.0f64 + 24.0).sqrt() / 200.0, "{m}");
    }
}
