//! Root systems, Weyl groups, chambers and the projection onto a closed
//! chamber.
//!
//! All roots are stored with `α·α = 2`, so the reflection in the hyperplane
//! orthogonal to `α` is `σ_α(x) = x − (α·x)α`. A [`RootSystem`] owns its
//! roots, an ordered positive subsystem (the enumeration `α_1, …, α_m` used
//! by the jump lift), the W-orbit partition, the Weyl group in a fixed
//! breadth-first order, and the permutation each reflection induces on the
//! roots.

use std::collections::HashMap;
use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, max_abs_diff, norm_sq, Transform};

/// Entrywise tolerance for root equality and group-element deduplication.
pub const ROOT_TOL: f64 = 1e-9;
/// Default cap on the Weyl group closure.
pub const DEFAULT_WEYL_CAP: usize = 1_000_000;
/// Default tolerance for chamber-boundary classification.
pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-12;

/// `σ_α(x) = x − (α·x)α`; `alpha` must satisfy `α·α = 2`.
pub fn reflect(alpha: &[f64], x: &[f64]) -> Vec<f64> {
    let mut out = x.to_vec();
    reflect_in_place(alpha, &mut out);
    out
}

#[inline]
pub fn reflect_in_place(alpha: &[f64], x: &mut [f64]) {
    let c = dot(alpha, x);
    for (xi, ai) in x.iter_mut().zip(alpha) {
        *xi -= c * ai;
    }
}

/// Rescale every root to squared norm 2. Roots already at norm² 2 (to
/// within 1e-15) are returned bit-for-bit.
pub fn normalize_roots(raw: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    raw.iter()
        .enumerate()
        .map(|(i, r)| {
            let ns = norm_sq(r);
            if ns == 0.0 || !ns.is_finite() {
                return Err(Error::InvalidArgument(format!("root {i} is zero or not finite")));
            }
            if (ns - 2.0).abs() <= 1e-15 {
                return Ok(r.clone());
            }
            let s = SQRT_2 / ns.sqrt();
            Ok(r.iter().map(|v| v * s).collect())
        })
        .collect()
}

fn find_vector(set: &[Vec<f64>], v: &[f64]) -> Option<usize> {
    set.iter().position(|r| max_abs_diff(r, v) <= ROOT_TOL)
}

/// Ordered positive subsystem `{α ∈ R : α·β > 0}`, in the order the roots
/// appear in `roots`.
pub fn positive_subsystem(roots: &[Vec<f64>], beta: &[f64]) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(roots.len() / 2);
    for (i, r) in roots.iter().enumerate() {
        let d = dot(r, beta);
        if d.abs() <= ROOT_TOL {
            return Err(Error::DegenerateDirection { root: i });
        }
        if d > 0.0 {
            out.push(i);
        }
    }
    Ok(out)
}

/// Finite group generated by a set of reflections, listed in breadth-first
/// order from the identity. That order is the canonical order used for
/// tie-breaking.
#[derive(Debug, Clone)]
pub struct WeylGroup {
    elements: Vec<Transform>,
    index: HashMap<Vec<i64>, Vec<usize>>,
}

fn quantize(t: &Transform) -> Vec<i64> {
    t.entries().iter().map(|v| (v * 1e6).round() as i64).collect()
}

impl WeylGroup {
    fn from_elements(elements: Vec<Transform>) -> Self {
        let mut index: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            index.entry(quantize(e)).or_default().push(i);
        }
        Self { elements, index }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Transform] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Transform {
        &self.elements[i]
    }

    /// Index of `t` in the group, if present (max-entry distance 1e-9).
    pub fn find(&self, t: &Transform) -> Option<usize> {
        self.index
            .get(&quantize(t))
            .and_then(|cands| cands.iter().copied().find(|&i| self.elements[i].distance(t) <= ROOT_TOL))
            .or_else(|| self.elements.iter().position(|e| e.distance(t) <= ROOT_TOL))
    }

    /// Index of `a ∘ b`.
    pub fn compose_index(&self, a: usize, b: usize) -> usize {
        let c = self.elements[a].compose(&self.elements[b]);
        self.find(&c).expect("group is closed under composition")
    }

    pub fn inverse_index(&self, a: usize) -> usize {
        self.find(&self.elements[a].transpose()).expect("group is closed under inverse")
    }
}

/// Closure of `{σ_α : α ∈ roots}` under composition.
pub fn generate_weyl_group(roots: &[Vec<f64>], cap: usize) -> Result<WeylGroup> {
    let n = roots.first().map(Vec::len).unwrap_or(0);
    let generators: Vec<Transform> = roots.iter().map(|r| Transform::reflection(r)).collect();
    let mut elements = vec![Transform::identity(n)];
    let mut seen: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    seen.insert(quantize(&elements[0]), vec![0]);
    let mut head = 0;
    while head < elements.len() {
        let g = elements[head].clone();
        head += 1;
        for s in &generators {
            let h = s.compose(&g);
            let key = quantize(&h);
            let dup = seen
                .get(&key)
                .is_some_and(|c| c.iter().any(|&i| elements[i].distance(&h) <= ROOT_TOL));
            if dup {
                continue;
            }
            if elements.len() >= cap {
                return Err(Error::CapExceeded { cap });
            }
            seen.entry(key).or_default().push(elements.len());
            elements.push(h);
        }
    }
    Ok(WeylGroup::from_elements(elements))
}

/// Partition of root indices into W-orbits, ordered by smallest member.
pub fn orbit_decomposition(roots: &[Vec<f64>], group: &WeylGroup) -> Vec<Vec<usize>> {
    let mut orbit_of = vec![usize::MAX; roots.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..roots.len() {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = Vec::new();
        for w in group.elements() {
            let image = w.apply(&roots[i]);
            if let Some(j) = find_vector(roots, &image) {
                if orbit_of[j] == usize::MAX {
                    orbit_of[j] = id;
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        orbits.push(members);
    }
    orbits
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChamberMembership {
    Interior,
    Boundary,
    Exterior,
}

/// Classify `x` against `C = {x : x·α > 0, α ∈ R_+}`.
pub fn chamber_contains(positive_roots: &[&[f64]], x: &[f64], tol: f64) -> ChamberMembership {
    let mut on_wall = false;
    for a in positive_roots {
        let d = dot(a, x);
        if d < -tol {
            return ChamberMembership::Exterior;
        }
        if d <= tol {
            on_wall = true;
        }
    }
    if on_wall {
        ChamberMembership::Boundary
    } else {
        ChamberMembership::Interior
    }
}

/// A validated root system with a chosen, ordered positive subsystem.
#[derive(Debug, Clone)]
pub struct RootSystem {
    dimension: usize,
    roots: Vec<Vec<f64>>,
    positive: Vec<usize>,
    orbits: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
    negation: Vec<usize>,
    /// `reflection_perm[r][s]` is the index of `σ_{α_r}(α_s)`.
    reflection_perm: Vec<Vec<usize>>,
    group: WeylGroup,
}

impl RootSystem {
    /// `A_{n−1}` in ℝⁿ: roots `±(e_i − e_j)`, positive `e_i − e_j` (i < j)
    /// in lexicographic order, chamber `x₁ > x₂ > … > x_n`.
    pub fn type_a(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("type A needs n ≥ 2, got {n}")));
        }
        let mut pos = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let mut r = vec![0.0; n];
                r[i] = 1.0;
                r[j] = -1.0;
                pos.push(r);
            }
        }
        Self::from_positive_list(pos)
    }

    /// `B_n` in ℝⁿ with short roots rescaled to `√2·e_i`. Positive roots are
    /// listed `e_i − e_j, e_i + e_j` (i < j) followed by `√2·e_i`; for n = 2
    /// this is `(e₁−e₂, e₁+e₂, √2e₁, √2e₂)`. Orbit 0 holds the long roots
    /// `±e_i ± e_j`, orbit 1 the short ones.
    pub fn type_b(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("type B needs n ≥ 2, got {n}")));
        }
        let mut pos = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let mut minus = vec![0.0; n];
                minus[i] = 1.0;
                minus[j] = -1.0;
                let mut plus = vec![0.0; n];
                plus[i] = 1.0;
                plus[j] = 1.0;
                pos.push(minus);
                pos.push(plus);
            }
        }
        for i in 0..n {
            let mut r = vec![0.0; n];
            r[i] = SQRT_2;
            pos.push(r);
        }
        Self::from_positive_list(pos)
    }

    /// The rank-one system `{±√2·e₁}` in ℝ¹.
    pub fn rank_one() -> Self {
        Self::from_positive_list(vec![vec![SQRT_2]]).expect("rank-one system is valid")
    }

    /// Roots listed as positives followed by their negatives.
    fn from_positive_list(pos: Vec<Vec<f64>>) -> Result<Self> {
        let m = pos.len();
        let mut roots = pos.clone();
        roots.extend(pos.iter().map(|r| r.iter().map(|v| -v).collect::<Vec<_>>()));
        Self::assemble(roots, (0..m).collect(), DEFAULT_WEYL_CAP)
    }

    /// Build from arbitrary nonzero roots (rescaled to norm² 2). The positive
    /// subsystem is chosen by `beta`, or by a fixed generic direction when
    /// `beta` is `None`.
    pub fn from_roots(raw: &[Vec<f64>], beta: Option<&[f64]>) -> Result<Self> {
        let roots = normalize_roots(raw)?;
        let n = roots
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidArgument("empty root set".into()))?;
        if roots.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("roots have mixed dimensions".into()));
        }
        let positive = match beta {
            Some(b) => {
                if b.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: b.len() });
                }
                positive_subsystem(&roots, b)?
            }
            None => positive_subsystem(&roots, &canonical_direction(&roots)?)?,
        };
        Self::assemble(roots, positive, DEFAULT_WEYL_CAP)
    }

    fn assemble(roots: Vec<Vec<f64>>, positive: Vec<usize>, cap: usize) -> Result<Self> {
        let dimension = roots[0].len();
        validate_axioms(&roots)?;
        let negation: Vec<usize> = roots
            .iter()
            .map(|r| {
                let neg: Vec<f64> = r.iter().map(|v| -v).collect();
                find_vector(&roots, &neg).expect("axioms guarantee −α ∈ R")
            })
            .collect();
        let reflection_perm: Vec<Vec<usize>> = roots
            .iter()
            .map(|a| {
                roots
                    .iter()
                    .map(|b| find_vector(&roots, &reflect(a, b)).expect("axioms guarantee closure"))
                    .collect()
            })
            .collect();
        validate_positive(&roots, &negation, &positive)?;
        let gens: Vec<Vec<f64>> = positive.iter().map(|&i| roots[i].clone()).collect();
        let group = generate_weyl_group(&gens, cap)?;
        let orbits = orbit_decomposition(&roots, &group);
        let mut orbit_of = vec![0; roots.len()];
        for (o, members) in orbits.iter().enumerate() {
            for &i in members {
                orbit_of[i] = o;
            }
        }
        Ok(Self {
            dimension,
            roots,
            positive,
            orbits,
            orbit_of,
            negation,
            reflection_perm,
            group,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn roots(&self) -> &[Vec<f64>] {
        &self.roots
    }

    pub fn root(&self, i: usize) -> &[f64] {
        &self.roots[i]
    }

    /// The ordered enumeration `α_1, …, α_m` as root indices.
    pub fn positive(&self) -> &[usize] {
        &self.positive
    }

    pub fn positive_roots(&self) -> Vec<&[f64]> {
        self.positive.iter().map(|&i| self.roots[i].as_slice()).collect()
    }

    pub fn is_positive(&self, i: usize) -> bool {
        self.positive.contains(&i)
    }

    /// Index of `−α_i`.
    pub fn negation(&self, i: usize) -> usize {
        self.negation[i]
    }

    /// The positive member of `{α_i, −α_i}`.
    pub fn positive_representative(&self, i: usize) -> usize {
        if self.is_positive(i) {
            i
        } else {
            self.negation[i]
        }
    }

    /// Index of `σ_{α_r}(α_s)`.
    pub fn reflect_index(&self, r: usize, s: usize) -> usize {
        self.reflection_perm[r][s]
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn orbit_of(&self, root: usize) -> usize {
        self.orbit_of[root]
    }

    /// `R_+^i = R^i ∩ R_+` for each orbit.
    pub fn positive_orbits(&self) -> Vec<Vec<usize>> {
        self.orbits
            .iter()
            .map(|o| o.iter().copied().filter(|&i| self.is_positive(i)).collect())
            .collect()
    }

    pub fn weyl_group(&self) -> &WeylGroup {
        &self.group
    }

    pub fn find_root(&self, v: &[f64]) -> Option<usize> {
        find_vector(&self.roots, v)
    }

    /// Same roots with the positive subsystem chosen by `beta`.
    pub fn with_positive_direction(&self, beta: &[f64]) -> Result<Self> {
        if beta.len() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, got: beta.len() });
        }
        let positive = positive_subsystem(&self.roots, beta)?;
        self.with_positive_unchecked(positive)
    }

    /// Reorder (or replace) the positive enumeration. `order` must contain
    /// exactly one of each `±α` and form a genuine positive subsystem.
    pub fn with_enumeration(&self, order: &[usize]) -> Result<Self> {
        validate_positive(&self.roots, &self.negation, order)?;
        self.with_positive_unchecked(order.to_vec())
    }

    fn with_positive_unchecked(&self, positive: Vec<usize>) -> Result<Self> {
        let mut out = self.clone();
        out.positive = positive;
        Ok(out)
    }

    /// `θR` with the same indexing; `k_θ(θα) = k(α)` therefore keeps the
    /// per-orbit values unchanged.
    pub fn rotated(&self, theta: &Transform) -> Result<Self> {
        if theta.dim() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, got: theta.dim() });
        }
        let deviation = theta.orthogonality_defect();
        if deviation > 1e-12 {
            return Err(Error::NotOrthogonal { deviation });
        }
        let roots: Vec<Vec<f64>> = self.roots.iter().map(|r| theta.apply(r)).collect();
        let tt = theta.transpose();
        let elements = self
            .group
            .elements()
            .iter()
            .map(|w| theta.compose(w).compose(&tt))
            .collect();
        Ok(Self {
            dimension: self.dimension,
            roots,
            positive: self.positive.clone(),
            orbits: self.orbits.clone(),
            orbit_of: self.orbit_of.clone(),
            negation: self.negation.clone(),
            reflection_perm: self.reflection_perm.clone(),
            group: WeylGroup::from_elements(elements),
        })
    }

    pub fn chamber_contains(&self, x: &[f64], tol: f64) -> ChamberMembership {
        chamber_contains(&self.positive_roots(), x, tol)
    }

    /// Smallest `x·α` over the positive roots.
    pub fn wall_distance(&self, x: &[f64]) -> f64 {
        self.positive
            .iter()
            .map(|&i| dot(&self.roots[i], x))
            .fold(f64::INFINITY, f64::min)
    }

    /// `(w·x, w)` with `w·x ∈ C̄`; `w` is the first such element in the
    /// canonical group order.
    pub fn project_to_chamber(&self, x: &[f64]) -> (Vec<f64>, usize) {
        let tol = 1e-12 * (1.0 + norm_sq(x).sqrt());
        let mut buf = vec![0.0; self.dimension];
        for (i, w) in self.group.elements().iter().enumerate() {
            w.apply_into(x, &mut buf);
            if self.positive.iter().all(|&r| dot(&self.roots[r], &buf) >= -tol) {
                return (buf, i);
            }
        }
        unreachable!("every W-orbit meets the closed chamber")
    }

    /// Same point as [`Self::project_to_chamber`], computed by repeatedly
    /// reflecting in the most violated wall. Allocation-free; used on hot
    /// paths.
    pub fn fold_into_chamber(&self, x: &mut [f64]) {
        loop {
            let mut worst = 0.0;
            let mut which = None;
            for &r in &self.positive {
                let d = dot(&self.roots[r], x);
                if d < worst {
                    worst = d;
                    which = Some(r);
                }
            }
            match which {
                Some(r) => reflect_in_place(&self.roots[r], x),
                None => return,
            }
        }
    }

    /// Index of the unique `w` with `w·x` in the open chamber, for `x` off
    /// every wall.
    pub fn chamber_element(&self, x: &[f64]) -> Option<usize> {
        let mut buf = vec![0.0; self.dimension];
        self.group.elements().iter().position(|w| {
            w.apply_into(x, &mut buf);
            self.positive.iter().all(|&r| dot(&self.roots[r], &buf) > 0.0)
        })
    }

    /// Whether `σ_{α_i}(R^{i−1}) = R^{i−1}` for the system's own enumeration
    /// (1-based `i`).
    pub fn invariance_condition(&self, i: usize) -> Result<bool> {
        check_invariance_condition(self, &self.positive, i)
    }

    pub fn to_document(&self) -> RootSystemDocument {
        RootSystemDocument {
            dimension: self.dimension,
            roots: self.roots.clone(),
            positive: self.positive.clone(),
            orbits: self.orbits.clone(),
        }
    }

    pub fn from_document(doc: &RootSystemDocument) -> Result<Self> {
        if doc.roots.iter().any(|r| r.len() != doc.dimension) {
            return Err(Error::InvalidArgument("root length differs from dimension".into()));
        }
        let roots = normalize_roots(&doc.roots)?;
        let sys = Self::assemble(roots, doc.positive.clone(), DEFAULT_WEYL_CAP)?;
        let mut want: Vec<Vec<usize>> = doc.orbits.iter().map(|o| {
            let mut o = o.clone();
            o.sort_unstable();
            o
        }).collect();
        want.sort();
        let mut have = sys.orbits.clone();
        have.sort();
        if want != have {
            return Err(Error::InvalidArgument("orbits do not match the Weyl group action".into()));
        }
        Ok(sys)
    }
}

/// JSON form: `{dimension, roots, positive, orbits}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootSystemDocument {
    pub dimension: usize,
    pub roots: Vec<Vec<f64>>,
    pub positive: Vec<usize>,
    pub orbits: Vec<Vec<usize>>,
}

/// `σ_{α_i}(R^{i−1}) = R^{i−1}` with `R^{i−1} = {±α_1, …, ±α_{i−1}}` taken
/// from `enumeration` (root indices), `i` 1-based.
pub fn check_invariance_condition(system: &RootSystem, enumeration: &[usize], i: usize) -> Result<bool> {
    if i == 0 || i > enumeration.len() {
        return Err(Error::IndexOutOfRange { index: i, len: enumeration.len() });
    }
    let reflector = enumeration[i - 1];
    let previous: Vec<usize> = enumeration[..i - 1]
        .iter()
        .flat_map(|&r| [r, system.negation(r)])
        .collect();
    Ok(previous
        .iter()
        .all(|&r| previous.contains(&system.reflect_index(reflector, r))))
}

fn validate_axioms(roots: &[Vec<f64>]) -> Result<()> {
    for (i, a) in roots.iter().enumerate() {
        if (norm_sq(a) - 2.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("root {i} is not normalized")));
        }
        // R ∩ ℝα = {±α}: with equal norms, a collinear root is ±α.
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        if find_vector(roots, &neg).is_none() {
            return Err(Error::InvalidArgument(format!("−α missing for root {i}")));
        }
        for (j, b) in roots.iter().enumerate() {
            if j != i && max_abs_diff(a, b) <= ROOT_TOL {
                return Err(Error::InvalidArgument(format!("roots {i} and {j} coincide")));
            }
            if find_vector(roots, &reflect(a, b)).is_none() {
                return Err(Error::InvalidArgument(format!(
                    "σ_{i}(α_{j}) is not a root: the set is not reflection-closed"
                )));
            }
        }
    }
    Ok(())
}

fn validate_positive(roots: &[Vec<f64>], negation: &[usize], positive: &[usize]) -> Result<()> {
    if positive.len() * 2 != roots.len() {
        return Err(Error::InvalidArgument(format!(
            "positive subsystem has {} roots, expected {}",
            positive.len(),
            roots.len() / 2
        )));
    }
    let mut seen = vec![false; roots.len()];
    for &p in positive {
        if p >= roots.len() {
            return Err(Error::IndexOutOfRange { index: p, len: roots.len() });
        }
        if seen[p] || seen[negation[p]] {
            return Err(Error::InvalidArgument(format!("root {p} or its negative listed twice")));
        }
        seen[p] = true;
    }
    let n = roots[0].len();
    let mut rho = vec![0.0; n];
    for &p in positive {
        for (s, v) in rho.iter_mut().zip(&roots[p]) {
            *s += v;
        }
    }
    if positive.iter().any(|&p| dot(&roots[p], &rho) <= ROOT_TOL) {
        return Err(Error::InvalidArgument("selection is not a positive subsystem of any chamber".into()));
    }
    Ok(())
}

/// A generic direction for custom systems: `(n, n−1, …, 1)` perturbed by
/// small irrational offsets so no root is orthogonal to it.
fn canonical_direction(roots: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = roots[0].len();
    let mut beta: Vec<f64> = (0..n).map(|i| (n - i) as f64).collect();
    if roots.iter().all(|r| dot(r, &beta).abs() > ROOT_TOL) {
        return Ok(beta);
    }
    for (i, b) in beta.iter_mut().enumerate() {
        *b += 1e-3 * ((i + 2) as f64).sqrt();
    }
    if let Some(i) = roots.iter().position(|r| dot(r, &beta).abs() <= ROOT_TOL) {
        return Err(Error::DegenerateDirection { root: i });
    }
    Ok(beta)
}

/// A W-invariant nonnegative multiplicity function, stored per orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityFunction {
    per_orbit: Vec<f64>,
    per_root: Vec<f64>,
}

impl MultiplicityFunction {
    pub fn new(system: &RootSystem, per_orbit: &[f64]) -> Result<Self> {
        if per_orbit.len() != system.orbits().len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} orbit values, got {}",
                system.orbits().len(),
                per_orbit.len()
            )));
        }
        if per_orbit.iter().any(|&k| !(k >= 0.0) || !k.is_finite()) {
            return Err(Error::InvalidArgument("multiplicities must be finite and ≥ 0".into()));
        }
        let per_root = (0..system.roots().len())
            .map(|i| per_orbit[system.orbit_of(i)])
            .collect();
        Ok(Self {
            per_orbit: per_orbit.to_vec(),
            per_root,
        })
    }

    pub fn uniform(system: &RootSystem, k: f64) -> Result<Self> {
        Self::new(system, &vec![k; system.orbits().len()])
    }

    pub fn per_orbit(&self) -> &[f64] {
        &self.per_orbit
    }

    /// `k(α)` for root index `i`.
    pub fn value(&self, root: usize) -> f64 {
        self.per_root[root]
    }

    /// `γ = Σ_{α∈R_+} k(α)`.
    pub fn gamma(&self, system: &RootSystem) -> f64 {
        system.positive().iter().map(|&i| self.per_root[i]).sum()
    }

    pub fn min(&self) -> f64 {
        self.per_orbit.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_order(roots: &[Vec<f64>]) -> usize {
        // Independent closure: repeatedly multiply every known element by
        // every reflection until nothing new appears.
        let n = roots[0].len();
        let gens: Vec<Transform> = roots.iter().map(|r| Transform::reflection(r)).collect();
        let mut set = vec![Transform::identity(n)];
        loop {
            let mut added = false;
            let snapshot = set.clone();
            for g in &snapshot {
                for s in &gens {
                    let h = g.compose(s);
                    if !set.iter().any(|e| e.distance(&h) < 1e-9) {
                        set.push(h);
                        added = true;
                    }
                }
            }
            if !added {
                return set.len();
            }
        }
    }

    #[test]
    fn reflect_examples() {
        assert_eq!(reflect(&[1.0, -1.0], &[1.0, 0.0]), vec![0.0, 1.0]);
        assert_eq!(reflect(&[1.0, -1.0], &[0.3, 0.3]), vec![0.3, 0.3]);
        let b2 = RootSystem::type_b(2).unwrap();
        for r in b2.roots() {
            let img = reflect(r, r);
            assert!(max_abs_diff(&img, &r.iter().map(|v| -v).collect::<Vec<_>>()) < 1e-15);
        }
    }

    #[test]
    fn type_a_sizes() {
        let a1 = RootSystem::type_a(2).unwrap();
        assert_eq!(a1.roots().len(), 2);
        assert_eq!(a1.positive().len(), 1);
        assert_eq!(a1.weyl_group().order(), 2);
        let a2 = RootSystem::type_a(3).unwrap();
        assert_eq!(a2.roots().len(), 6);
        assert_eq!(a2.positive().len(), 3);
        assert_eq!(a2.weyl_group().order(), brute_force_order(a2.roots()));
        assert_eq!(a2.weyl_group().order(), 6);
        assert!(RootSystem::type_a(1).is_err());
    }

    #[test]
    fn type_b_sizes() {
        let b2 = RootSystem::type_b(2).unwrap();
        assert_eq!(b2.roots().len(), 8);
        assert_eq!(b2.positive().len(), 4);
        assert_eq!(b2.orbits().len(), 2);
        assert!(b2.positive_orbits().iter().all(|o| o.len() == 2));
        assert_eq!(brute_force_order(b2.roots()), 8);
        assert_eq!(b2.weyl_group().order(), 8);
        let b3 = RootSystem::type_b(3).unwrap();
        assert_eq!(brute_force_order(b3.roots()), 48);
        assert_eq!(b3.weyl_group().order(), 48);
        assert!(RootSystem::type_b(0).is_err());
    }

    #[test]
    fn normalize_examples() {
        let out = normalize_roots(&[vec![1.0, 0.0], vec![1.0, -1.0]]).unwrap();
        assert_eq!(out[0], vec![SQRT_2, 0.0]);
        assert_eq!(out[1], vec![1.0, -1.0]);
        assert!(normalize_roots(&[vec![0.0, 0.0]]).is_err());
        let raw: Vec<Vec<f64>> = vec![
            vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0],
            vec![1.0, 1.0], vec![-1.0, -1.0], vec![1.0, -1.0], vec![-1.0, 1.0],
        ];
        let sys = RootSystem::from_roots(&raw, Some(&[2.0, 1.0])).unwrap();
        assert_eq!(sys.weyl_group().order(), 8);
    }

    #[test]
    fn rejects_non_root_systems() {
        let raw = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![1.0, 1.0], vec![-1.0, -1.0]];
        assert!(RootSystem::from_roots(&raw, None).is_err());
    }

    #[test]
    fn positive_subsystem_examples() {
        let a2 = RootSystem::type_a(3).unwrap();
        let p = positive_subsystem(a2.roots(), &[3.0, 2.0, 1.0]).unwrap();
        let got: Vec<&Vec<f64>> = p.iter().map(|&i| &a2.roots()[i]).collect();
        assert_eq!(got, vec![&vec![1.0, -1.0, 0.0], &vec![1.0, 0.0, -1.0], &vec![0.0, 1.0, -1.0]]);

        let b2 = RootSystem::type_b(2).unwrap();
        let p = positive_subsystem(b2.roots(), &[2.0, 1.0]).unwrap();
        assert_eq!(p, b2.positive());
        let want = [[1.0, -1.0], [1.0, 1.0], [SQRT_2, 0.0], [0.0, SQRT_2]];
        for (idx, w) in p.iter().zip(want) {
            assert_eq!(b2.root(*idx), &w);
        }
        let q = positive_subsystem(b2.roots(), &[-2.0, -1.0]).unwrap();
        for i in 0..8 {
            assert!(p.contains(&i) != q.contains(&i));
        }
        assert!(matches!(
            positive_subsystem(b2.roots(), &[1.0, 1.0]),
            Err(Error::DegenerateDirection { .. })
        ));
    }

    #[test]
    fn orbit_counts() {
        assert_eq!(RootSystem::type_a(2).unwrap().orbits().len(), 1);
        assert_eq!(RootSystem::type_a(3).unwrap().orbits().len(), 1);
        assert_eq!(RootSystem::type_b(2).unwrap().orbits().len(), 2);
        assert_eq!(RootSystem::type_b(3).unwrap().orbits().len(), 2);
    }

    #[test]
    fn chamber_examples() {
        let b2 = RootSystem::type_b(2).unwrap();
        let t = DEFAULT_BOUNDARY_TOL;
        assert_eq!(b2.chamber_contains(&[2.0, 1.0], t), ChamberMembership::Interior);
        assert_eq!(b2.chamber_contains(&[1.0, 1.0], t), ChamberMembership::Boundary);
        assert_eq!(b2.chamber_contains(&[1.0, 2.0], t), ChamberMembership::Exterior);
    }

    #[test]
    fn projection_examples() {
        let a2 = RootSystem::type_a(3).unwrap();
        let (p, _) = a2.project_to_chamber(&[1.0, 3.0, 2.0]);
        assert!(max_abs_diff(&p, &[3.0, 2.0, 1.0]) < 1e-15);
        let b2 = RootSystem::type_b(2).unwrap();
        let (p, _) = b2.project_to_chamber(&[-1.0, 3.0]);
        assert!(max_abs_diff(&p, &[3.0, 1.0]) < 1e-15);
        let (p, w) = b2.project_to_chamber(&[2.0, 1.0]);
        assert_eq!(p, vec![2.0, 1.0]);
        assert_eq!(w, 0);
        assert!(b2.weyl_group().element(0).is_identity(0.0));
    }

    #[test]
    fn invariance_condition_examples() {
        let b2 = RootSystem::type_b(2).unwrap();
        for i in 1..=4 {
            assert!(b2.invariance_condition(i).unwrap(), "B2 i = {i}");
        }
        let a2 = RootSystem::type_a(3).unwrap();
        assert!(a2.invariance_condition(1).unwrap());
        assert!(!a2.invariance_condition(2).unwrap());
        assert!(a2.invariance_condition(3).unwrap());
        assert!(matches!(b2.invariance_condition(0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(b2.invariance_condition(5), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn enumeration_must_be_positive_system() {
        let b2 = RootSystem::type_b(2).unwrap();
        let p = b2.positive().to_vec();
        assert!(b2.with_enumeration(&[p[3], p[2], p[1], p[0]]).is_ok());
        // e₁−e₂, e₁+e₂ together with −√2e₁: one of each pair but no chamber.
        let bad = [p[0], p[1], b2.negation(p[2]), p[3]];
        assert!(b2.with_enumeration(&bad).is_err());
        assert!(b2.with_enumeration(&[p[0], p[0], p[1], p[2]]).is_err());
    }

    #[test]
    fn document_round_trip_and_sqrt2_text() {
        let b2 = RootSystem::type_b(2).unwrap();
        let text = serde_json::to_string(&b2.to_document()).unwrap();
        assert!(text.contains("1.4142135623730951"));
        let doc: RootSystemDocument = serde_json::from_str(&text).unwrap();
        let back = RootSystem::from_document(&doc).unwrap();
        assert_eq!(back.roots(), b2.roots());
        assert_eq!(back.positive(), b2.positive());
        let mut bad = doc.clone();
        bad.orbits = vec![(0..8).collect()];
        assert!(RootSystem::from_document(&bad).is_err());
    }

    #[test]
    fn multiplicity_gamma() {
        let b2 = RootSystem::type_b(2).unwrap();
        let k = MultiplicityFunction::new(&b2, &[0.75, 1.25]).unwrap();
        assert_eq!(k.gamma(&b2), 4.0);
        assert!(MultiplicityFunction::new(&b2, &[1.0]).is_err());
        assert!(MultiplicityFunction::new(&b2, &[1.0, -0.1]).is_err());
    }

    #[test]
    fn weyl_cap_is_enforced() {
        let b3 = RootSystem::type_b(3).unwrap();
        let gens: Vec<Vec<f64>> = b3.positive_roots().iter().map(|r| r.to_vec()).collect();
        assert!(matches!(generate_weyl_group(&gens, 10), Err(Error::CapExceeded { cap: 10 })));
    }
}
