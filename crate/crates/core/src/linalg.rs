//! Small dense helpers for points in ℝⁿ and n×n transforms.

use serde::{Deserialize, Serialize};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Row-major square matrix, used for Weyl group elements and rotations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transform {
    n: usize,
    entries: Vec<f64>,
}

impl Transform {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self { n, entries }
    }

    /// Build from rows; panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "transform rows must be square");
        Self {
            n,
            entries: rows.iter().flatten().copied().collect(),
        }
    }

    /// Matrix of x ↦ x − (α·x)α for a root with α·α = 2.
    pub fn reflection(alpha: &[f64]) -> Self {
        let n = alpha.len();
        let mut t = Self::identity(n);
        for i in 0..n {
            for j in 0..n {
                t.entries[i * n + j] -= alpha[i] * alpha[j];
            }
        }
        t
    }

    /// Planar rotation by `angle` in the (i, j) coordinate plane.
    pub fn givens(n: usize, i: usize, j: usize, angle: f64) -> Self {
        let mut t = Self::identity(n);
        let (s, c) = angle.sin_cos();
        t.entries[i * n + i] = c;
        t.entries[j * n + j] = c;
        t.entries[i * n + j] = -s;
        t.entries[j * n + i] = s;
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.apply_into(x, &mut out);
        out
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(&self.entries[i * self.n..(i + 1) * self.n], x);
        }
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Transform) -> Transform {
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = (0..n).map(|l| self.entry(i, l) * other.entry(l, j)).sum();
            }
        }
        Transform { n, entries }
    }

    pub fn transpose(&self) -> Transform {
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entry(i, j);
            }
        }
        Transform { n, entries }
    }

    /// max |θᵀθ − I| over entries.
    pub fn orthogonality_defect(&self) -> f64 {
        let p = self.transpose().compose(self);
        max_abs_diff(&p.entries, &Transform::identity(self.n).entries)
    }

    pub fn distance(&self, other: &Transform) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.distance(&Transform::identity(self.n)) <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_matrix_matches_formula() {
        let a = [1.0, -1.0];
        let t = Transform::reflection(&a);
        assert_eq!(t.apply(&[1.0, 0.0]), vec![0.0, 1.0]);
        assert!(t.compose(&t).is_identity(0.0));
    }

    #[test]
    fn givens_is_orthogonal() {
        let t = Transform::givens(3, 0, 2, 0.7);
        assert!(t.orthogonality_defect() < 1e-15);
        assert!((t.compose(&t.transpose())).is_identity(1e-15));
    }
}
