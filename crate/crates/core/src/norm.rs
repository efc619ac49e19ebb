//! Groupwise norms, their duals, and constructive Hölder witnesses.
//!
//! For a partition of `{1..d}` into groups `G_1..G_db`, positive weights
//! `alpha`, and exponents `p, s >= 1`, the norm computed here is
//!
//! ```text
//! ||x|| = ( sum_j  alpha_j^s * ||x(G_j)||_p^s )^(1/s)
//! ```
//!
//! with the usual max-norm limits when `p` or `s` is infinite. Its dual norm
//! swaps each weight for its reciprocal and each exponent for its conjugate,
//! and [`dual_witness`] constructs a vector on the unit sphere attaining the
//! Hölder bound `a'b <= ||a|| * ||b||_dual` with equality.

use crate::error::{Error, Result};

/// An exponent in `[1, ∞]`, tagged so that max-norm limits never go through
/// floating-point infinity arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(e: f64) -> Result<Self> {
        if e.is_infinite() && e > 0.0 {
            Ok(Exponent::Infinity)
        } else if e.is_finite() && e >= 1.0 {
            Ok(Exponent::Finite(e))
        } else {
            Err(Error::InvalidNormSpec(format!(
                "exponent must lie in [1, inf], got {e}"
            )))
        }
    }

    /// Conjugate exponent: `e / (e - 1)` with `1 <-> ∞` and `2 -> 2`.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(e) if e == 1.0 => Exponent::Infinity,
            Exponent::Finite(e) if e == 2.0 => Exponent::Finite(2.0),
            Exponent::Finite(e) => Exponent::Finite(e / (e - 1.0)),
        }
    }

    pub fn is_one(self) -> bool {
        matches!(self, Exponent::Finite(e) if e == 1.0)
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(e) => write!(f, "{e}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// A disjoint cover of the predictor indices `{0..d-1}` into nonempty groups.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPartition {
    d: usize,
    groups: Vec<Vec<usize>>,
}

impl GroupPartition {
    /// Validates that the groups are nonempty, pairwise disjoint, and cover
    /// `{0..d-1}` exactly. Indices are zero-based.
    pub fn new(d: usize, groups: Vec<Vec<usize>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidPartition("d must be positive".into()));
        }
        let mut seen = vec![false; d];
        let mut covered = 0usize;
        for (j, g) in groups.iter().enumerate() {
            if g.is_empty() {
                return Err(Error::InvalidPartition(format!("group {j} is empty")));
            }
            for &i in g {
                if i >= d {
                    return Err(Error::InvalidPartition(format!(
                        "group {j} contains index {i} >= d = {d}"
                    )));
                }
                if seen[i] {
                    return Err(Error::InvalidPartition(format!(
                        "index {i} appears in more than one group"
                    )));
                }
                seen[i] = true;
                covered += 1;
            }
        }
        if covered != d {
            return Err(Error::InvalidPartition(format!(
                "groups cover {covered} of {d} indices"
            )));
        }
        Ok(GroupPartition { d, groups })
    }

    /// One group per coordinate.
    pub fn singletons(d: usize) -> Self {
        GroupPartition {
            d,
            groups: (0..d).map(|i| vec![i]).collect(),
        }
    }

    /// Consecutive groups of the given sizes.
    pub fn contiguous(sizes: &[usize]) -> Result<Self> {
        let d: usize = sizes.iter().sum();
        let mut groups = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &g in sizes {
            groups.push((start..start + g).collect());
            start += g;
        }
        GroupPartition::new(d, groups)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.len()).collect()
    }
}

/// Weights and exponents defining a groupwise norm.
#[derive(Debug, Clone, PartialEq)]
pub struct NormSpec {
    pub alpha: Vec<f64>,
    pub p: Exponent,
    pub s: Exponent,
}

impl NormSpec {
    pub fn new(alpha: Vec<f64>, p: Exponent, s: Exponent) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidNormSpec("alpha is empty".into()));
        }
        if let Some(a) = alpha.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidNormSpec(format!(
                "weights must be strictly positive, got {a}"
            )));
        }
        Ok(NormSpec { alpha, p, s })
    }

    /// The standard group-lasso penalty norm for a partition: square-root
    /// group sizes as weights, inner 2-norm, outer 1-norm.
    pub fn l21_sqrt_sizes(part: &GroupPartition) -> Self {
        NormSpec {
            alpha: part.groups().iter().map(|g| (g.len() as f64).sqrt()).collect(),
            p: Exponent::Finite(2.0),
            s: Exponent::Finite(1.0),
        }
    }

    /// Dual spec: reciprocal weights, conjugate exponents.
    pub fn dual(&self) -> NormSpec {
        NormSpec {
            alpha: self.alpha.iter().map(|a| 1.0 / a).collect(),
            p: self.p.conjugate(),
            s: self.s.conjugate(),
        }
    }

    fn check(&self, part: &GroupPartition) -> Result<()> {
        if self.alpha.len() != part.group_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} groups",
                self.alpha.len(),
                part.group_count()
            )));
        }
        Ok(())
    }
}

/// `p`-norm of the entries of `x` selected by `idx`, scaled to avoid
/// overflow for large exponents.
fn lp_norm_indexed(x: &[f64], idx: &[usize], p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => idx.iter().map(|&i| x[i].abs()).fold(0.0, f64::max),
        Exponent::Finite(e) if e == 1.0 => idx.iter().map(|&i| x[i].abs()).sum(),
        Exponent::Finite(e) if e == 2.0 => {
            let m = idx.iter().map(|&i| x[i].abs()).fold(0.0, f64::max);
            if m == 0.0 {
                return 0.0;
            }
            let sum: f64 = idx
                .iter()
                .map(|&i| {
                    let t = x[i] / m;
                    t * t
                })
                .sum();
            m * sum.sqrt()
        }
        Exponent::Finite(e) => {
            let m = idx.iter().map(|&i| x[i].abs()).fold(0.0, f64::max);
            if m == 0.0 {
                return 0.0;
            }
            let sum: f64 = idx.iter().map(|&i| (x[i].abs() / m).powf(e)).sum();
            m * sum.powf(1.0 / e)
        }
    }
}

/// Outer combination of the weighted per-group norms.
fn outer_norm(terms: &[f64], s: Exponent) -> f64 {
    match s {
        Exponent::Infinity => terms.iter().copied().fold(0.0, f64::max),
        Exponent::Finite(e) if e == 1.0 => terms.iter().sum(),
        Exponent::Finite(e) => {
            let m = terms.iter().copied().fold(0.0, f64::max);
            if m == 0.0 {
                return 0.0;
            }
            let sum: f64 = terms.iter().map(|t| (t / m).powf(e)).sum();
            m * sum.powf(1.0 / e)
        }
    }
}

/// Evaluates the groupwise norm of `x`.
pub fn group_norm(x: &[f64], part: &GroupPartition, spec: &NormSpec) -> Result<f64> {
    spec.check(part)?;
    if x.len() != part.d() {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} != d = {}",
            x.len(),
            part.d()
        )));
    }
    let terms: Vec<f64> = part
        .groups()
        .iter()
        .zip(&spec.alpha)
        .map(|(g, &a)| a * lp_norm_indexed(x, g, spec.p))
        .collect();
    Ok(outer_norm(&terms, spec.s))
}

/// Unit-`p`-norm vector `u` with `u'v = ||v||_q`, `q` conjugate to `p`.
/// Ties at boundary exponents break to the lowest index. Returns zeros for
/// `v = 0`.
fn lp_holder_witness(v: &[f64], p: Exponent) -> Vec<f64> {
    let n = v.len();
    let mut u = vec![0.0; n];
    let m = v.iter().map(|t| t.abs()).fold(0.0, f64::max);
    if m == 0.0 {
        return u;
    }
    match p {
        // q = ∞: all weight on the largest entry, lowest index on ties.
        Exponent::Finite(e) if e == 1.0 => {
            let mut k = 0;
            for i in 1..n {
                if v[i].abs() > v[k].abs() {
                    k = i;
                }
            }
            u[k] = v[k].signum();
        }
        // q = 1: sign vector.
        Exponent::Infinity => {
            for i in 0..n {
                if v[i] != 0.0 {
                    u[i] = v[i].signum();
                }
            }
        }
        Exponent::Finite(e) => {
            // u_i = sign(v_i) |v_i|^(q-1) / ||v||_q^(q-1), computed on the
            // max-rescaled entries for overflow safety.
            let q = match Exponent::Finite(e).conjugate() {
                Exponent::Finite(q) => q,
                Exponent::Infinity => unreachable!(),
            };
            let scaled_norm: f64 = v
                .iter()
                .map(|t| (t.abs() / m).powf(q))
                .sum::<f64>()
                .powf(1.0 / q);
            for i in 0..n {
                if v[i] != 0.0 {
                    u[i] = v[i].signum() * (v[i].abs() / m / scaled_norm).powf(q - 1.0);
                }
            }
        }
    }
    u
}

/// Constructs `a` with `group_norm(a) = 1` and `a'b = group_norm(b, dual)`,
/// i.e. a vector attaining the Hölder bound for `b`.
///
/// The construction works at two levels: an outer witness for the plain
/// `(s, t)` pair applied to the vector of weighted per-group dual norms, and
/// an inner witness per group for the `(p, q)` pair. Groups where `b`
/// vanishes receive a zero block. Errors when `b = 0`, where the direction
/// is undefined.
pub fn dual_witness(b: &[f64], part: &GroupPartition, spec: &NormSpec) -> Result<Vec<f64>> {
    spec.check(part)?;
    if b.len() != part.d() {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} != d = {}",
            b.len(),
            part.d()
        )));
    }
    if b.iter().all(|t| *t == 0.0) {
        return Err(Error::InvalidInput(
            "dual witness of the zero vector is undefined".into(),
        ));
    }
    let q = spec.p.conjugate();
    // Weighted per-group dual norms: beta_j = ||b(G_j)||_q / alpha_j.
    let beta: Vec<f64> = part
        .groups()
        .iter()
        .zip(&spec.alpha)
        .map(|(g, &a)| lp_norm_indexed(b, g, q) / a)
        .collect();
    // Outer witness w: nonnegative, ||w||_s = 1, w'beta = ||beta||_t.
    let mut w = vec![0.0; beta.len()];
    match spec.s {
        // t = ∞: all weight on the dominant group, lowest index on ties.
        Exponent::Finite(e) if e == 1.0 => {
            let mut k = 0;
            for j in 1..beta.len() {
                if beta[j] > beta[k] {
                    k = j;
                }
            }
            w[k] = 1.0;
        }
        Exponent::Infinity => {
            w.fill(1.0);
        }
        Exponent::Finite(e) => {
            let t = match Exponent::Finite(e).conjugate() {
                Exponent::Finite(t) => t,
                Exponent::Infinity => unreachable!(),
            };
            let m = beta.iter().copied().fold(0.0, f64::max);
            let scaled_norm: f64 = beta
                .iter()
                .map(|v| (v / m).powf(t))
                .sum::<f64>()
                .powf(1.0 / t);
            for j in 0..beta.len() {
                if beta[j] > 0.0 {
                    w[j] = (beta[j] / m / scaled_norm).powf(t - 1.0);
                }
            }
        }
    }
    // Assemble a(G_j) = (w_j / alpha_j) * inner witness.
    let mut a = vec![0.0; part.d()];
    for (j, g) in part.groups().iter().enumerate() {
        if w[j] == 0.0 || beta[j] == 0.0 {
            continue;
        }
        let block: Vec<f64> = g.iter().map(|&i| b[i]).collect();
        let u = lp_holder_witness(&block, spec.p);
        let scale = w[j] / spec.alpha[j];
        for (slot, &i) in g.iter().enumerate() {
            a[i] = scale * u[slot];
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(alpha: &[f64], p: f64, s: f64) -> NormSpec {
        NormSpec::new(
            alpha.to_vec(),
            Exponent::new(p).unwrap(),
            Exponent::new(s).unwrap(),
        )
        .unwrap()
    }

    fn two_groups() -> GroupPartition {
        GroupPartition::contiguous(&[2, 2]).unwrap()
    }

    #[test]
    fn partition_rejects_bad_covers() {
        assert!(GroupPartition::new(3, vec![vec![0, 1]]).is_err());
        assert!(GroupPartition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(GroupPartition::new(3, vec![vec![0, 1, 2], vec![]]).is_err());
        assert!(GroupPartition::new(2, vec![vec![0, 2]]).is_err());
        assert!(GroupPartition::new(3, vec![vec![0], vec![1], vec![2]]).is_ok());
    }

    #[test]
    fn conjugate_pairs() {
        assert_eq!(Exponent::new(1.0).unwrap().conjugate(), Exponent::Infinity);
        assert_eq!(Exponent::Infinity.conjugate(), Exponent::Finite(1.0));
        assert_eq!(
            Exponent::new(2.0).unwrap().conjugate(),
            Exponent::Finite(2.0)
        );
        assert_eq!(
            Exponent::new(3.0).unwrap().conjugate(),
            Exponent::Finite(1.5)
        );
        assert!(Exponent::new(0.5).is_err());
    }

    #[test]
    fn norm_hand_computed_two_group_case() {
        // x = (3,4 | 0,1), alpha = (1,2), p = 2, s = 1: 1*5 + 2*1 = 7.
        let part = two_groups();
        let x = [3.0, 4.0, 0.0, 1.0];
        let v = group_norm(&x, &part, &spec(&[1.0, 2.0], 2.0, 1.0)).unwrap();
        assert!((v - 7.0).abs() < 1e-12);
    }

    #[test]
    fn norm_of_zero_is_zero() {
        let part = two_groups();
        let x = [0.0; 4];
        for (p, s) in [(1.0, 1.0), (2.0, 1.0), (2.0, f64::INFINITY), (3.0, 2.0)] {
            let v = group_norm(&x, &part, &spec(&[1.0, 2.0], p, s)).unwrap();
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn norm_outer_max() {
        // s = ∞: max(1*5, 2*1) = 5.
        let part = two_groups();
        let x = [3.0, 4.0, 0.0, 1.0];
        let v = group_norm(&x, &part, &spec(&[1.0, 2.0], 2.0, f64::INFINITY)).unwrap();
        assert!((v - 5.0).abs() < 1e-12);
    }

    #[test]
    fn dual_spec_example() {
        let s = spec(&[1.0, 2.0], 2.0, 1.0);
        let d = s.dual();
        assert_eq!(d.alpha, vec![1.0, 0.5]);
        assert_eq!(d.p, Exponent::Finite(2.0));
        assert_eq!(d.s, Exponent::Infinity);
    }

    #[test]
    fn dual_of_sqrt_size_l21() {
        let part = GroupPartition::contiguous(&[4, 9]).unwrap();
        let s = NormSpec::l21_sqrt_sizes(&part);
        let d = s.dual();
        assert_eq!(d.alpha, vec![0.5, 1.0 / 3.0]);
        assert_eq!(d.p, Exponent::Finite(2.0));
        assert_eq!(d.s, Exponent::Infinity);
    }

    #[test]
    fn dual_spec_is_involution_on_dyadic_weights() {
        // Reciprocals of powers of two and the 1 <-> ∞, 2 <-> 2, 3 <-> 1.5
        // conjugations are all exact in floating point.
        for (p, s) in [(1.0, 2.0), (2.0, 1.0), (3.0, f64::INFINITY), (1.5, 3.0)] {
            let sp = spec(&[0.25, 4.0], p, s);
            assert_eq!(sp.dual().dual(), sp);
        }
    }

    #[test]
    fn scalar_witness() {
        let part = GroupPartition::singletons(1);
        let sp = spec(&[1.0], 2.0, 1.0);
        let a = dual_witness(&[-7.0], &part, &sp).unwrap();
        assert!((a[0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn witness_of_zero_vector_is_an_error() {
        let part = two_groups();
        let sp = spec(&[1.0, 2.0], 2.0, 1.0);
        assert!(dual_witness(&[0.0; 4], &part, &sp).is_err());
    }

    #[test]
    fn witness_supported_on_nonzero_groups() {
        let part = two_groups();
        let sp = spec(&[1.0, 2.0], 2.0, 1.0);
        let b = [0.0, 0.0, 3.0, -4.0];
        let a = dual_witness(&b, &part, &sp).unwrap();
        assert_eq!(a[0], 0.0);
        assert_eq!(a[1], 0.0);
        assert!(a[2] != 0.0 || a[3] != 0.0);
    }

    #[test]
    fn witness_attains_dual_norm_across_exponents() {
        // Deterministic but irregular inputs; covers interior and boundary
        // exponents including the degenerate power-formula cases.
        let part = GroupPartition::contiguous(&[3, 2, 4]).unwrap();
        let b: Vec<f64> = (0..9)
            .map(|i| ((i as f64) * 0.77 + 0.3).sin() * (1.0 + i as f64 * 0.2))
            .collect();
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            for s in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
                let sp = spec(&[0.7, 1.3, 2.1], p, s);
                let a = dual_witness(&b, &part, &sp).unwrap();
                let norm_a = group_norm(&a, &part, &sp).unwrap();
                let dual = group_norm(&b, &part, &sp.dual()).unwrap();
                let inner: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
                assert!(
                    (norm_a - 1.0).abs() < 1e-12,
                    "||a|| = {norm_a} at p={p}, s={s}"
                );
                assert!(
                    (inner - dual).abs() <= 1e-9 * dual.max(1.0),
                    "a'b = {inner}, dual = {dual} at p={p}, s={s}"
                );
            }
        }
    }

    #[test]
    fn singleton_groups_reduce_to_lp_norm() {
        let part = GroupPartition::singletons(5);
        let x = [1.0, -2.0, 3.0, -4.0, 5.0];
        for p in [1.0, 2.0, 3.0, f64::INFINITY] {
            let sp = spec(&[1.0; 5], p, p);
            let v = group_norm(&x, &part, &sp).unwrap();
            let expect = match p {
                p if p.is_infinite() => 5.0,
                p if p == 1.0 => 15.0,
                _ => x.iter().map(|t| t.abs().powf(p)).sum::<f64>().powf(1.0 / p),
            };
            assert!((v - expect).abs() < 1e-12 * expect);
        }
    }
}
