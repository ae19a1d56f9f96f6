//! Composable nonexpansive operators on ℝⁿ.
//!
//! Every descriptor that can be built here is nonexpansive: projections and
//! reflections onto convex sets, plane rotations, affine maps whose linear
//! part has spectral norm at most one, averages and compositions of these.
//! The certification routines check the defining inequalities on seeded
//! samples; they certify, they do not prove.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hilbert::Vector;
use crate::rng;
use crate::sets::{ConvexSetDesc, SetKind};

/// Slack allowed on the spectral norm of an affine map's linear part.
pub const AFFINE_NORM_SLACK: f64 = 1e-10;

/// Standard deviation used when sampling unbounded domains.
pub const SAMPLE_SCALE: f64 = 5.0;

/// Pairs with `‖x − y‖` at or below this are skipped when forming ratios.
const MIN_SEPARATION: f64 = 1e-12;

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::BadOperator("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::BadOperator("matrix must be square".into()));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::BadOperator("matrix entries must be finite".into()));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix { n, data }
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.data.iter_mut().for_each(|x| *x *= s);
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    fn mul(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn mul_t(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (row, xi) in self.data.chunks(self.n).zip(x) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * xi;
            }
        }
        out
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Spectral norm by power iteration on `AᵀA`.
    pub fn spectral_norm(&self) -> f64 {
        let fro = self.frobenius();
        if fro == 0.0 {
            return 0.0;
        }
        let mut rng = rng::seeded(0x5eed);
        let mut v = rng::unit(&mut rng, self.n).into_coords();
        let mut estimate = 0.0_f64;
        for _ in 0..20_000 {
            let w = self.mul_t(&self.mul(&v));
            let len = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if len == 0.0 {
                break;
            }
            let next = len.sqrt();
            v = w.into_iter().map(|x| x / len).collect();
            let done = (next - estimate).abs() <= 1e-15 * next;
            estimate = next;
            if done {
                break;
            }
        }
        estimate
    }
}

/// `x ↦ matrix·x + shift` with `‖matrix‖₂ ≤ 1 + AFFINE_NORM_SLACK`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    matrix: Matrix,
    shift: Vector,
}

impl AffineMap {
    pub fn new(matrix: Matrix, shift: Vector) -> Result<Self> {
        Error::dims(matrix.dim(), shift.dim())?;
        // The Frobenius norm bounds the spectral norm from above.
        if matrix.frobenius() > 1.0 + AFFINE_NORM_SLACK {
            let norm = matrix.spectral_norm();
            if norm > 1.0 + AFFINE_NORM_SLACK {
                return Err(Error::BadOperator(format!(
                    "linear part has operator norm {norm} > 1"
                )));
            }
        }
        Ok(AffineMap { matrix, shift })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn shift(&self) -> &Vector {
        &self.shift
    }

    fn apply(&self, x: &Vector) -> Vector {
        Vector::from_raw(
            self.matrix
                .mul(x.coords())
                .into_iter()
                .zip(self.shift.coords())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind {
    Identity,
    NegIdentity,
    Projection(ConvexSetDesc),
    /// `2·P_C − I`
    Reflection(ConvexSetDesc),
    /// Rotation by `theta` radians in the coordinate plane `(i, j)`; the
    /// remaining coordinates are left unchanged.
    Rotation2D { theta: f64, plane: (usize, usize) },
    Affine(AffineMap),
    /// `(1 − λ)·I + λ·T`
    Average { inner: OperatorDesc, lambda: f64 },
    /// `second ∘ first`
    Compose { first: OperatorDesc, second: OperatorDesc },
}

/// A nonexpansive operator descriptor. Cheap to clone.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorDesc(Arc<OperatorKind>);

impl OperatorDesc {
    pub fn identity() -> Self {
        Self::wrap(OperatorKind::Identity)
    }

    pub fn neg_identity() -> Self {
        Self::wrap(OperatorKind::NegIdentity)
    }

    pub fn projection(set: ConvexSetDesc) -> Self {
        Self::wrap(OperatorKind::Projection(set))
    }

    pub fn reflection(set: ConvexSetDesc) -> Self {
        Self::wrap(OperatorKind::Reflection(set))
    }

    pub fn rotation2d(theta: f64, i: usize, j: usize) -> Result<Self> {
        if i == j {
            return Err(Error::BadOperator("rotation plane indices must differ".into()));
        }
        if !theta.is_finite() {
            return Err(Error::BadOperator("rotation angle must be finite".into()));
        }
        Ok(Self::wrap(OperatorKind::Rotation2D { theta, plane: (i, j) }))
    }

    pub fn affine(matrix: Matrix, shift: Vector) -> Result<Self> {
        Ok(Self::wrap(OperatorKind::Affine(AffineMap::new(matrix, shift)?)))
    }

    pub fn average(inner: OperatorDesc, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::BadOperator(format!("average weight {lambda} outside [0, 1]")));
        }
        Ok(Self::wrap(OperatorKind::Average { inner, lambda }))
    }

    /// `second ∘ first`.
    pub fn compose(first: OperatorDesc, second: OperatorDesc) -> Self {
        Self::wrap(OperatorKind::Compose { first, second })
    }

    fn wrap(kind: OperatorKind) -> Self {
        OperatorDesc(Arc::new(kind))
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.0
    }

    /// Checks that the descriptor tree can act on vectors of dimension `dim`.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self.kind() {
            OperatorKind::Identity | OperatorKind::NegIdentity => Ok(()),
            OperatorKind::Projection(c) | OperatorKind::Reflection(c) => Error::dims(c.dim(), dim),
            OperatorKind::Rotation2D { plane: (i, j), .. } => {
                if *i < dim && *j < dim {
                    Ok(())
                } else {
                    Err(Error::BadOperator(format!(
                        "rotation plane ({i}, {j}) outside dimension {dim}"
                    )))
                }
            }
            OperatorKind::Affine(a) => Error::dims(a.shift.dim(), dim),
            OperatorKind::Average { inner, .. } => inner.check_dim(dim),
            OperatorKind::Compose { first, second } => {
                first.check_dim(dim)?;
                second.check_dim(dim)
            }
        }
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        self.check_dim(x.dim())?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &Vector) -> Vector {
        match self.kind() {
            OperatorKind::Identity => x.clone(),
            OperatorKind::NegIdentity => x.neg(),
            OperatorKind::Projection(c) => c.project_unchecked(x),
            OperatorKind::Reflection(c) => {
                let p = c.project_unchecked(x);
                Vector::from_raw(
                    p.coords()
                        .iter()
                        .zip(x.coords())
                        .map(|(p, x)| 2.0 * p - x)
                        .collect(),
                )
            }
            OperatorKind::Rotation2D { theta, plane: (i, j) } => {
                let (s, c) = theta.sin_cos();
                let mut y = x.clone();
                let (a, b) = (x.coords()[*i], x.coords()[*j]);
                let coords = y.coords_mut();
                coords[*i] = c * a - s * b;
                coords[*j] = s * a + c * b;
                y
            }
            OperatorKind::Affine(a) => a.apply(x),
            OperatorKind::Average { inner, lambda } => {
                x.toward(&inner.apply_unchecked(x), *lambda)
            }
            OperatorKind::Compose { first, second } => {
                second.apply_unchecked(&first.apply_unchecked(x))
            }
        }
    }

    /// `‖Tx − x‖`.
    pub fn residual(&self, x: &Vector) -> Result<f64> {
        Ok(self.apply(x)?.dist(x))
    }

    /// Exact descriptor of `Fix T` in dimension `dim`, when the descriptor
    /// tree admits one.
    pub fn known_fixed_set(&self, dim: usize) -> Option<ConvexSetDesc> {
        self.check_dim(dim).ok()?;
        match self.kind() {
            OperatorKind::Identity => Some(ConvexSetDesc::full(dim)),
            OperatorKind::NegIdentity => Some(ConvexSetDesc::point(Vector::zeros(dim))),
            OperatorKind::Projection(c) | OperatorKind::Reflection(c) => Some(c.clone()),
            OperatorKind::Rotation2D { theta, plane: (i, j) } => {
                let turns = theta / std::f64::consts::TAU;
                if turns == turns.round() {
                    return Some(ConvexSetDesc::full(dim));
                }
                let directions = (0..dim)
                    .filter(|k| k != i && k != j)
                    .map(|k| Vector::basis(dim, k))
                    .collect();
                ConvexSetDesc::affine(Vector::zeros(dim), directions).ok()
            }
            OperatorKind::Affine(_) => None,
            OperatorKind::Average { inner, lambda } => {
                if *lambda > 0.0 {
                    inner.known_fixed_set(dim)
                } else {
                    Some(ConvexSetDesc::full(dim))
                }
            }
            OperatorKind::Compose { first, second } => {
                if matches!(first.kind(), OperatorKind::Identity) {
                    return second.known_fixed_set(dim);
                }
                if matches!(second.kind(), OperatorKind::Identity) {
                    return first.known_fixed_set(dim);
                }
                match (first.kind(), second.kind()) {
                    (OperatorKind::Projection(a), OperatorKind::Projection(b)) if a == b => {
                        Some(a.clone())
                    }
                    _ => None,
                }
            }
        }
    }

    /// Short lowercase name of the root node.
    pub fn kind_name(&self) -> &'static str {
        match self.kind() {
            OperatorKind::Identity => "identity",
            OperatorKind::NegIdentity => "neg_identity",
            OperatorKind::Projection(_) => "projection",
            OperatorKind::Reflection(_) => "reflection",
            OperatorKind::Rotation2D { .. } => "rotation2d",
            OperatorKind::Affine(_) => "affine",
            OperatorKind::Average { .. } => "average",
            OperatorKind::Compose { .. } => "compose",
        }
    }
}

pub fn apply(op: &OperatorDesc, x: &Vector) -> Result<Vector> {
    op.apply(x)
}

pub fn residual(op: &OperatorDesc, x: &Vector) -> Result<f64> {
    op.residual(x)
}

pub fn known_fixed_set(op: &OperatorDesc, dim: usize) -> Option<ConvexSetDesc> {
    op.known_fixed_set(dim)
}

/// Sampled certification of a Lipschitz-type inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct CertReport {
    pub pairs_tested: usize,
    pub worst_ratio: f64,
    /// A pair attaining `worst_ratio`, present iff the certificate failed.
    pub witness: Option<(Vector, Vector)>,
    pub certified: bool,
}

impl CertReport {
    fn finish(pairs_tested: usize, worst_ratio: f64, worst: Option<(Vector, Vector)>, tol: f64) -> Self {
        let certified = worst_ratio <= 1.0 + tol;
        CertReport {
            pairs_tested,
            worst_ratio,
            witness: if certified { None } else { worst },
            certified,
        }
    }
}

/// Seeded pairs `(x, y)` drawn from `domain`. Half of the pairs are close
/// (second point a small perturbation of the first, pulled back into the
/// domain by its projection) so local expansion is probed as well.
pub fn sample_pairs(domain: &ConvexSetDesc, pairs: usize, seed: u64) -> Vec<(Vector, Vector)> {
    let mut rng = rng::seeded(seed);
    let dim = domain.dim();
    (0..pairs)
        .map(|k| {
            let x = domain.sample(&mut rng, SAMPLE_SCALE);
            let y = if k % 2 == 0 {
                domain.sample(&mut rng, SAMPLE_SCALE)
            } else {
                let step = 10f64.powf(-3.0 * rand::Rng::random::<f64>(&mut rng));
                domain.project_unchecked(&x.add(&rng::unit(&mut rng, dim).scale(step)))
            };
            (x, y)
        })
        .collect()
}

fn ratio_scan<F>(pairs: &[(Vector, Vector)], mut ratio: F, tol: f64) -> CertReport
where
    F: FnMut(&Vector, &Vector) -> Option<f64>,
{
    let mut worst = 0.0_f64;
    let mut witness = None;
    let mut tested = 0;
    for (x, y) in pairs {
        if let Some(r) = ratio(x, y) {
            tested += 1;
            if r > worst || witness.is_none() {
                worst = worst.max(r);
                witness = Some((x.clone(), y.clone()));
            }
        }
    }
    CertReport::finish(tested, worst, witness, tol)
}

/// Worst `‖Tx − Ty‖ / ‖x − y‖` over the given pairs.
pub fn nonexpansive_ratio_on(op: &OperatorDesc, pairs: &[(Vector, Vector)], tol: f64) -> Result<CertReport> {
    if let Some((x, _)) = pairs.first() {
        op.check_dim(x.dim())?;
    }
    Ok(ratio_scan(
        pairs,
        |x, y| {
            let d = x.dist(y);
            (d > MIN_SEPARATION).then(|| op.apply_unchecked(x).dist(&op.apply_unchecked(y)) / d)
        },
        tol,
    ))
}

pub fn certify_nonexpansive(
    op: &OperatorDesc,
    domain: &ConvexSetDesc,
    pairs: usize,
    seed: u64,
    tol: f64,
) -> Result<CertReport> {
    if pairs == 0 {
        return Err(Error::InvalidArgument("need at least one pair".into()));
    }
    op.check_dim(domain.dim())?;
    nonexpansive_ratio_on(op, &sample_pairs(domain, pairs, seed), tol)
}

fn validate_fixed_points(
    op: &OperatorDesc,
    domain: &ConvexSetDesc,
    fixed_points: &[Vector],
    tol: f64,
) -> Result<()> {
    for (index, y) in fixed_points.iter().enumerate() {
        let residual = op.residual(y)?;
        if residual > tol || !domain.contains(y, tol)? {
            return Err(Error::NotAFixedPoint { index, residual });
        }
    }
    Ok(())
}

/// Worst `‖Tx − y‖ / ‖x − y‖` over sampled `x` and every supplied fixed
/// point `y`.
pub fn certify_quasinonexpansive(
    op: &OperatorDesc,
    domain: &ConvexSetDesc,
    fixed_points: &[Vector],
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<CertReport> {
    if fixed_points.is_empty() || samples == 0 {
        return Err(Error::InvalidArgument("need fixed points and samples".into()));
    }
    op.check_dim(domain.dim())?;
    validate_fixed_points(op, domain, fixed_points, tol)?;
    let mut rng = rng::seeded(seed);
    let pairs: Vec<(Vector, Vector)> = (0..samples)
        .flat_map(|_| {
            let x = domain.sample(&mut rng, SAMPLE_SCALE);
            fixed_points.iter().map(move |y| (x.clone(), y.clone())).collect::<Vec<_>>()
        })
        .collect();
    Ok(ratio_scan(
        &pairs,
        |x, y| {
            let d = x.dist(y);
            (d > MIN_SEPARATION).then(|| op.apply_unchecked(x).dist(y) / d)
        },
        tol,
    ))
}

/// Checks `⟨y − Tx, x − Tx⟩ ≤ ½‖Tx − x‖² + tol` for every probe `x`, which
/// holds for each fixed point `y` of a quasinonexpansive `T`.
pub fn check_fix_halfspace_characterization(
    op: &OperatorDesc,
    domain: &ConvexSetDesc,
    y: &Vector,
    probes: &[Vector],
    tol: f64,
) -> Result<bool> {
    op.check_dim(domain.dim())?;
    validate_fixed_points(op, domain, std::slice::from_ref(y), tol)?;
    let mut holds = true;
    for (index, x) in probes.iter().enumerate() {
        if !domain.contains(x, tol)? {
            return Err(Error::SampleOutsideSet { index });
        }
        let tx = op.apply_unchecked(x);
        let lhs = y.sub(&tx).dot(&x.sub(&tx));
        let rhs = 0.5 * tx.dist(x).powi(2);
        holds &= lhs <= rhs + tol;
    }
    Ok(holds)
}

/// Counts sampled domain points whose image leaves the domain by more
/// than `tol`; `T(D) ⊆ D` cannot be decided for general descriptors.
pub fn count_self_map_violations(
    op: &OperatorDesc,
    domain: &ConvexSetDesc,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<usize> {
    op.check_dim(domain.dim())?;
    if matches!(domain.kind(), SetKind::FullSpace { .. }) {
        return Ok(0);
    }
    let mut rng = rng::seeded(seed);
    let mut violations = 0;
    for _ in 0..samples {
        let x = domain.sample(&mut rng, SAMPLE_SCALE);
        if !domain.contains(&op.apply_unchecked(&x), tol)? {
            violations += 1;
        }
    }
    Ok(violations)
}
