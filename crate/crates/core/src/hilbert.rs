//! Finite-dimensional real Hilbert space ℝⁿ and sequence convergence checks.
//!
//! Asymptotic notions (limits, liminf) are evaluated on a finite tail window
//! supplied by the caller: a check over `tail` entries inspects the last
//! `tail` elements of the sequence.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Absolute tolerance used when a caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A dense vector in ℝⁿ with finite coordinates.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Builds a vector, rejecting empty input and non-finite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("vector must have dim ≥ 1".into()));
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Vector(coords))
    }

    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        Vector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    /// The `i`-th standard basis vector.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    // The arithmetic below assumes equal dimensions; callers validate once
    // up front and then run the hot loops unchecked.

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|a| s * a).collect())
    }

    pub fn neg(&self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }

    /// `self + t·(other − self)`, evaluated coordinatewise in that order.
    pub fn toward(&self, other: &Vector, t: f64) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + t * (b - a))
                .collect(),
        )
    }

    /// `s·self + (1 − s)·other`, evaluated coordinatewise in that order.
    pub fn convex(&self, s: f64, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        let r = 1.0 - s;
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| s * a + r * b)
                .collect(),
        )
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub(crate) fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Vector::new(value)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

/// Σᵢ aᵢ·bᵢ.
pub fn inner(a: &Vector, b: &Vector) -> Result<f64> {
    Error::dims(a.dim(), b.dim())?;
    Ok(a.dot(b))
}

pub fn norm(a: &Vector) -> f64 {
    a.norm()
}

/// Outcome of a finite-horizon convergence check.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceVerdict {
    pub converged: bool,
    /// The candidate limit, present only when `converged` holds.
    pub limit_estimate: Option<Vector>,
    /// Largest deviation from the candidate seen on the tail.
    pub tail_deviation: f64,
    /// Length of the inspected sequence.
    pub horizon: usize,
}

fn tail_of(seq: &[Vector], tail: usize) -> Result<&[Vector]> {
    if seq.is_empty() || tail == 0 {
        return Err(Error::EmptyTrace);
    }
    if tail > seq.len() {
        return Err(Error::InvalidArgument(format!(
            "tail {tail} exceeds sequence length {}",
            seq.len()
        )));
    }
    Ok(&seq[seq.len() - tail..])
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")))
    }
}

/// Norm convergence of `seq` to `p` on the last `tail` entries.
pub fn check_strong_convergence(
    seq: &[Vector],
    p: &Vector,
    tail: usize,
    tol: f64,
) -> Result<ConvergenceVerdict> {
    check_tol(tol)?;
    let window = tail_of(seq, tail)?;
    let mut worst = 0.0_f64;
    for x in window {
        Error::dims(p.dim(), x.dim())?;
        worst = worst.max(x.dist(p));
    }
    let converged = worst <= tol;
    Ok(ConvergenceVerdict {
        converged,
        limit_estimate: converged.then(|| p.clone()),
        tail_deviation: worst,
        horizon: seq.len(),
    })
}

/// Weak convergence tested through the functionals `⟨·, y⟩` for each `y`
/// in `test_vectors`.
pub fn check_weak_convergence(
    seq: &[Vector],
    p: &Vector,
    test_vectors: &[Vector],
    tail: usize,
    tol: f64,
) -> Result<ConvergenceVerdict> {
    check_tol(tol)?;
    if test_vectors.is_empty() {
        return Err(Error::InvalidArgument("no test vectors".into()));
    }
    let window = tail_of(seq, tail)?;
    for y in test_vectors {
        Error::dims(p.dim(), y.dim())?;
    }
    let targets: Vec<f64> = test_vectors.iter().map(|y| p.dot(y)).collect();
    let mut worst = 0.0_f64;
    for x in window {
        Error::dims(p.dim(), x.dim())?;
        for (y, target) in test_vectors.iter().zip(&targets) {
            worst = worst.max((x.dot(y) - target).abs());
        }
    }
    let converged = worst <= tol;
    Ok(ConvergenceVerdict {
        converged,
        limit_estimate: converged.then(|| p.clone()),
        tail_deviation: worst,
        horizon: seq.len(),
    })
}

/// Finite-horizon surrogate of `‖p‖ ≤ liminf ‖xₙ‖`: compares against the
/// minimum norm over the tail.
pub fn check_norm_lsc(seq: &[Vector], p: &Vector, tail: usize, slack: f64) -> Result<bool> {
    if slack < 0.0 {
        return Err(Error::InvalidArgument("slack must be nonnegative".into()));
    }
    let window = tail_of(seq, tail)?;
    let min_norm = window.iter().map(Vector::norm).fold(f64::INFINITY, f64::min);
    Ok(p.norm() <= min_norm + slack)
}

/// Standard basis of ℝᵈ followed by 8 seeded random unit vectors.
pub fn default_test_vectors(dim: usize, seed: u64) -> Vec<Vector> {
    let mut rng = rng::seeded(seed);
    let mut out: Vec<Vector> = (0..dim).map(|i| Vector::basis(dim, i)).collect();
    out.extend((0..8).map(|_| rng::unit(&mut rng, dim)));
    out
}

/// Draws a uniform point of the unit sphere in ℝᵈ.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    rng::unit(rng, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn inner_examples() {
        assert_eq!(inner(&v(&[1., 0.]), &v(&[0., 1.])).unwrap(), 0.0);
        assert_eq!(inner(&v(&[1., 2.]), &v(&[1., 2.])).unwrap(), 5.0);
        // 3·(−4) + 4·3
        assert_eq!(inner(&v(&[3., 4.]), &v(&[-4., 3.])).unwrap(), 0.0);
    }

    #[test]
    fn inner_dim_mismatch() {
        assert_eq!(
            inner(&v(&[1., 0.]), &v(&[1., 0., 0.])),
            Err(Error::DimMismatch { expected: 2, got: 3 })
        );
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(&Vector::zeros(3)), 0.0);
        assert_eq!(norm(&v(&[3., 4.])), 5.0);
        assert_eq!(norm(&v(&[1., 1., 1., 1.])), 2.0);
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        );
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
        assert!(Vector::new(vec![]).is_err());
    }

    #[test]
    fn strong_constant_sequence() {
        let p = v(&[1., -2.]);
        let seq = vec![p.clone(); 10];
        let r = check_strong_convergence(&seq, &p, 10, 1e-12).unwrap();
        assert!(r.converged);
        assert_eq!(r.tail_deviation, 0.0);
        assert_eq!(r.limit_estimate, Some(p));
    }

    #[test]
    fn strong_geometric_decay() {
        let seq: Vec<Vector> = (0..30).map(|k| v(&[0.5f64.powi(k), 0.])).collect();
        let r = check_strong_convergence(&seq, &Vector::zeros(2), 5, 1e-3).unwrap();
        assert!(r.converged);
        // worst tail entry is k = 25
        assert_eq!(r.tail_deviation, 0.5f64.powi(25));
    }

    #[test]
    fn strong_oscillation_fails() {
        let seq: Vec<Vector> = (0..20)
            .map(|k| if k % 2 == 0 { v(&[1., 0.]) } else { v(&[-1., 0.]) })
            .collect();
        let r = check_strong_convergence(&seq, &Vector::zeros(2), 10, 0.5).unwrap();
        assert!(!r.converged);
        assert!(r.limit_estimate.is_none());
        assert_eq!(r.tail_deviation, 1.0);
    }

    #[test]
    fn strong_empty_trace() {
        assert_eq!(
            check_strong_convergence(&[], &Vector::zeros(2), 1, 1e-3),
            Err(Error::EmptyTrace)
        );
    }

    #[test]
    fn weak_examples() {
        let p = v(&[0.5, 0.5]);
        let tv = vec![v(&[1., 0.]), v(&[0., 1.])];
        let seq = vec![p.clone(); 4];
        assert!(check_weak_convergence(&seq, &p, &tv, 4, 1e-9).unwrap().converged);

        // 1/k ≤ 1/1000 < 1e-2 on the tail k ≥ 1000
        let seq: Vec<Vector> = (1..=2000).map(|k| v(&[1.0 / k as f64, 0.])).collect();
        let r = check_weak_convergence(&seq, &Vector::zeros(2), &tv, 1001, 1e-2).unwrap();
        assert!(r.converged);
        assert_eq!(r.tail_deviation, 1.0 / 1000.0);

        let seq: Vec<Vector> = (0..20)
            .map(|k| if k % 2 == 0 { v(&[1., 0.]) } else { v(&[-1., 0.]) })
            .collect();
        let r = check_weak_convergence(&seq, &Vector::zeros(2), &tv[..1], 20, 0.5).unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn weak_dim_mismatch() {
        let seq = vec![Vector::zeros(2)];
        let err = check_weak_convergence(&seq, &Vector::zeros(2), &[Vector::zeros(3)], 1, 0.1);
        assert!(matches!(err, Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn norm_lsc_examples() {
        let p = v(&[1., 0.]);
        assert!(check_norm_lsc(&vec![p.clone(); 5], &p, 5, 0.0).unwrap());
        let seq: Vec<Vector> = (1..50).map(|k| p.scale(1.0 + 1.0 / k as f64)).collect();
        assert!(check_norm_lsc(&seq, &p, 10, 0.0).unwrap());
        assert!(!check_norm_lsc(&vec![Vector::zeros(2); 5], &p, 5, 0.0).unwrap());
        assert_eq!(check_norm_lsc(&[], &p, 1, 0.0), Err(Error::EmptyTrace));
    }

    #[test]
    fn default_test_vectors_shape() {
        let tv = default_test_vectors(3, 11);
        assert_eq!(tv.len(), 11);
        assert!(tv[3..].iter().all(|y| (y.norm() - 1.0).abs() < 1e-12));
        assert_eq!(tv, default_test_vectors(3, 11));
    }

    fn pair() -> impl Strategy<Value = (Vector, Vector)> {
        (1usize..12).prop_flat_map(|d| {
            (
                prop::collection::vec(-1e3f64..1e3, d),
                prop::collection::vec(-1e3f64..1e3, d),
            )
                .prop_map(|(a, b)| (Vector::from_raw(a), Vector::from_raw(b)))
        })
    }

    proptest! {
        #[test]
        fn cauchy_schwarz((a, b) in pair()) {
            let bound = a.norm() * b.norm();
            prop_assert!(inner(&a, &b).unwrap().abs() <= bound + 1e-12 * bound);
        }

        #[test]
        fn parallelogram((a, b) in pair()) {
            let lhs = a.add(&b).norm_sq() + a.sub(&b).norm_sq();
            let rhs = 2.0 * a.norm_sq() + 2.0 * b.norm_sq();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-300));
        }

        #[test]
        fn inner_is_symmetric((a, b) in pair()) {
            prop_assert_eq!(inner(&a, &b).unwrap(), inner(&b, &a).unwrap());
        }

        // strong at τ implies weak at τ·max‖y‖ for any family of test vectors
        #[test]
        fn strong_implies_weak(
            seed in 0u64..1000,
            dim in 1usize..8,
            scale in 1e-6f64..1.0,
            tau in 1e-4f64..1e-1,
        ) {
            let mut rng = rng::seeded(seed);
            let p = rng::gaussian(&mut rng, dim);
            let seq: Vec<Vector> = (0..40)
                .map(|k| p.add(&rng::unit(&mut rng, dim).scale(scale * 0.8f64.powi(k))))
                .collect();
            let strong = check_strong_convergence(&seq, &p, 10, tau).unwrap();
            if strong.converged {
                let tv = default_test_vectors(dim, seed);
                let ymax = tv.iter().map(Vector::norm).fold(0.0, f64::max);
                let weak = check_weak_convergence(&seq, &p, &tv, 10, tau * ymax).unwrap();
                prop_assert!(weak.converged);
            }
        }
    }
}
