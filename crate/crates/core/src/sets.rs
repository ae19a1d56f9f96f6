//! Closed convex sets with closed-form projections.
//!
//! Every [`ConvexSetDesc`] denotes a nonempty closed convex subset of ℝⁿ.
//! Intersections are not a set kind; feasibility over intersections goes
//! through composed projection operators instead.

use rand::Rng;

use crate::error::{Error, Result};
use crate::hilbert::Vector;
use crate::rng;

const ORTHONORMAL_TOL: f64 = 1e-10;

/// Shape and parameters of a convex set.
#[derive(Debug, Clone, PartialEq)]
pub enum SetKind {
    Ball { center: Vector, radius: f64 },
    Box { lo: Vector, hi: Vector },
    /// `{x : ⟨normal, x⟩ ≤ offset}`
    Halfspace { normal: Vector, offset: f64 },
    /// `{x : ⟨normal, x⟩ = offset}`
    Hyperplane { normal: Vector, offset: f64 },
    /// `basepoint + span(directions)`, directions orthonormal.
    AffineSubspace { basepoint: Vector, directions: Vec<Vector> },
    FullSpace { dim: usize },
}

/// A validated convex set descriptor. Construct through the named
/// constructors; the invariants of each kind are checked there.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexSetDesc {
    kind: SetKind,
}

impl ConvexSetDesc {
    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::BadSet(format!("radius must be positive, got {radius}")));
        }
        Ok(Self::from_kind(SetKind::Ball { center, radius }))
    }

    pub fn boxed(lo: Vector, hi: Vector) -> Result<Self> {
        Error::dims(lo.dim(), hi.dim())?;
        if let Some(i) = (0..lo.dim()).find(|&i| lo.coords()[i] > hi.coords()[i]) {
            return Err(Error::BadSet(format!("box has lo > hi at coordinate {i}")));
        }
        if lo == hi {
            return Err(Error::BadSet("degenerate box; encode a point as an affine subspace".into()));
        }
        Ok(Self::from_kind(SetKind::Box { lo, hi }))
    }

    pub fn halfspace(normal: Vector, offset: f64) -> Result<Self> {
        Self::check_normal(&normal, offset)?;
        Ok(Self::from_kind(SetKind::Halfspace { normal, offset }))
    }

    pub fn hyperplane(normal: Vector, offset: f64) -> Result<Self> {
        Self::check_normal(&normal, offset)?;
        Ok(Self::from_kind(SetKind::Hyperplane { normal, offset }))
    }

    pub fn affine(basepoint: Vector, directions: Vec<Vector>) -> Result<Self> {
        let dim = basepoint.dim();
        if directions.len() > dim {
            return Err(Error::BadSet("more directions than the dimension".into()));
        }
        for (i, d) in directions.iter().enumerate() {
            Error::dims(dim, d.dim())?;
            for (j, e) in directions.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                if (d.dot(e) - target).abs() > ORTHONORMAL_TOL {
                    return Err(Error::BadSet(format!(
                        "directions {i} and {j} are not orthonormal"
                    )));
                }
            }
        }
        Ok(Self::from_kind(SetKind::AffineSubspace { basepoint, directions }))
    }

    /// The singleton `{p}`.
    pub fn point(p: Vector) -> Self {
        Self::from_kind(SetKind::AffineSubspace { basepoint: p, directions: Vec::new() })
    }

    pub fn full(dim: usize) -> Self {
        Self::from_kind(SetKind::FullSpace { dim })
    }

    fn from_kind(kind: SetKind) -> Self {
        ConvexSetDesc { kind }
    }

    fn check_normal(normal: &Vector, offset: f64) -> Result<()> {
        if normal.norm_sq() == 0.0 {
            return Err(Error::BadSet("normal must be nonzero".into()));
        }
        if !offset.is_finite() {
            return Err(Error::BadSet("offset must be finite".into()));
        }
        Ok(())
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            SetKind::Ball { center, .. } => center.dim(),
            SetKind::Box { lo, .. } => lo.dim(),
            SetKind::Halfspace { normal, .. } | SetKind::Hyperplane { normal, .. } => normal.dim(),
            SetKind::AffineSubspace { basepoint, .. } => basepoint.dim(),
            SetKind::FullSpace { dim } => *dim,
        }
    }

    /// Short lowercase name of the kind, as used in config files.
    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            SetKind::Ball { .. } => "ball",
            SetKind::Box { .. } => "box",
            SetKind::Halfspace { .. } => "halfspace",
            SetKind::Hyperplane { .. } => "hyperplane",
            SetKind::AffineSubspace { .. } => "affine",
            SetKind::FullSpace { .. } => "full",
        }
    }

    /// Euclidean distance from `x` to the set, computed from the kind's
    /// membership description.
    fn distance_unchecked(&self, x: &Vector) -> f64 {
        match &self.kind {
            SetKind::Ball { center, radius } => (x.dist(center) - radius).max(0.0),
            SetKind::Box { lo, hi } => x
                .coords()
                .iter()
                .zip(lo.coords().iter().zip(hi.coords()))
                .map(|(&v, (&l, &h))| {
                    let e = (l - v).max(v - h).max(0.0);
                    e * e
                })
                .sum::<f64>()
                .sqrt(),
            SetKind::Halfspace { normal, offset } => {
                ((normal.dot(x) - offset) / normal.norm()).max(0.0)
            }
            SetKind::Hyperplane { normal, offset } => {
                (normal.dot(x) - offset).abs() / normal.norm()
            }
            SetKind::AffineSubspace { basepoint, directions } => {
                let mut r = x.sub(basepoint);
                for d in directions {
                    let c = r.dot(d);
                    r = r.sub(&d.scale(c));
                }
                r.norm()
            }
            SetKind::FullSpace { .. } => 0.0,
        }
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        Error::dims(self.dim(), x.dim())?;
        Ok(self.distance_unchecked(x) <= tol)
    }

    /// Nearest point of the set to `u`.
    pub fn project(&self, u: &Vector) -> Result<Vector> {
        Error::dims(self.dim(), u.dim())?;
        Ok(self.project_unchecked(u))
    }

    pub(crate) fn project_unchecked(&self, u: &Vector) -> Vector {
        match &self.kind {
            SetKind::Ball { center, radius } => {
                let d = u.dist(center);
                if d <= *radius {
                    u.clone()
                } else {
                    center.toward(u, radius / d)
                }
            }
            SetKind::Box { lo, hi } => Vector::from_raw(
                u.coords()
                    .iter()
                    .zip(lo.coords().iter().zip(hi.coords()))
                    .map(|(&v, (&l, &h))| v.clamp(l, h))
                    .collect(),
            ),
            SetKind::Halfspace { normal, offset } => {
                let excess = normal.dot(u) - offset;
                if excess <= 0.0 {
                    u.clone()
                } else {
                    u.sub(&normal.scale(excess / normal.norm_sq()))
                }
            }
            SetKind::Hyperplane { normal, offset } => {
                let excess = normal.dot(u) - offset;
                if excess == 0.0 {
                    u.clone()
                } else {
                    u.sub(&normal.scale(excess / normal.norm_sq()))
                }
            }
            SetKind::AffineSubspace { basepoint, directions } => {
                let r = u.sub(basepoint);
                let mut p = basepoint.clone();
                for d in directions {
                    p = p.add(&d.scale(r.dot(d)));
                }
                p
            }
            SetKind::FullSpace { .. } => u.clone(),
        }
    }

    /// Draws a member of the set. Bounded kinds are sampled uniformly;
    /// unbounded kinds draw Gaussian coordinates of standard deviation
    /// `scale` around a reference point of the set.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Vector {
        let dim = self.dim();
        match &self.kind {
            SetKind::Ball { center, radius } => {
                let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
                center.add(&rng::unit(rng, dim).scale(r))
            }
            SetKind::Box { lo, hi } => Vector::from_raw(
                lo.coords()
                    .iter()
                    .zip(hi.coords())
                    .map(|(&l, &h)| l + (h - l) * rng.random::<f64>())
                    .collect(),
            ),
            SetKind::Halfspace { normal, offset } => {
                let nsq = normal.norm_sq();
                let x = normal.scale(offset / nsq).add(&rng::gaussian(rng, dim).scale(scale));
                let excess = normal.dot(&x) - offset;
                if excess > 0.0 {
                    // mirror across the boundary
                    x.sub(&normal.scale(2.0 * excess / nsq))
                } else {
                    x
                }
            }
            SetKind::Hyperplane { normal, offset } => {
                let nsq = normal.norm_sq();
                let g = rng::gaussian(rng, dim).scale(scale);
                let g = g.sub(&normal.scale(normal.dot(&g) / nsq));
                normal.scale(offset / nsq).add(&g)
            }
            SetKind::AffineSubspace { basepoint, directions } => {
                let mut x = basepoint.clone();
                for d in directions {
                    let c: f64 = rng.sample(rand_distr::StandardNormal);
                    x = x.add(&d.scale(scale * c));
                }
                x
            }
            SetKind::FullSpace { .. } => rng::gaussian(rng, dim).scale(scale),
        }
    }
}

/// Result of certifying a candidate projection through the variational
/// inequality `⟨u − p, w − p⟩ ≤ 0` over sampled members `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionReport {
    pub point: Vector,
    pub vi_violation: f64,
    pub oracle_gap: Option<f64>,
    /// `vi_violation ≤ tol`.
    pub valid: bool,
}

pub fn contains(set: &ConvexSetDesc, x: &Vector, tol: f64) -> Result<bool> {
    set.contains(x, tol)
}

pub fn project(set: &ConvexSetDesc, u: &Vector) -> Result<Vector> {
    set.project(u)
}

pub fn check_projection_vi(
    set: &ConvexSetDesc,
    u: &Vector,
    p: &Vector,
    samples: &[Vector],
    tol: f64,
) -> Result<ProjectionReport> {
    Error::dims(set.dim(), u.dim())?;
    Error::dims(set.dim(), p.dim())?;
    let direction = u.sub(p);
    let mut violation = 0.0_f64;
    for (index, w) in samples.iter().enumerate() {
        if !set.contains(w, tol)? {
            return Err(Error::SampleOutsideSet { index });
        }
        violation = violation.max(direction.dot(&w.sub(p)));
    }
    Ok(ProjectionReport {
        point: p.clone(),
        vi_violation: violation,
        oracle_gap: None,
        valid: violation <= tol,
    })
}

/// Approximates the projection of `u` by derivative-free search, without
/// using the closed-form projections. Solid sets are searched through
/// membership tests (random sampling, then local perturbation plus
/// bisection toward `u`); flat sets are searched in coordinates of an
/// orthonormal parametrization. `budget` counts objective or membership
/// evaluations. Intended for tests.
pub fn oracle_project(set: &ConvexSetDesc, u: &Vector, budget: usize, seed: u64) -> Result<Vector> {
    Error::dims(set.dim(), u.dim())?;
    if budget < 1000 {
        return Err(Error::InvalidArgument("oracle budget must be at least 1000".into()));
    }
    if set.contains(u, 0.0)? {
        return Ok(u.clone());
    }
    let mut rng = rng::seeded(seed);
    Ok(match set.kind() {
        SetKind::Ball { .. } | SetKind::Box { .. } | SetKind::Halfspace { .. } => {
            oracle_solid(set, u, budget, &mut rng)
        }
        SetKind::Hyperplane { normal, offset } => {
            let base = normal.scale(offset / normal.norm_sq());
            let dirs = complement_basis(normal);
            oracle_flat(&base, &dirs, u, budget, &mut rng)
        }
        SetKind::AffineSubspace { basepoint, directions } => {
            oracle_flat(basepoint, directions, u, budget, &mut rng)
        }
        SetKind::FullSpace { .. } => u.clone(),
    })
}

const BISECTIONS: usize = 34;

fn oracle_solid<R: Rng + ?Sized>(set: &ConvexSetDesc, u: &Vector, budget: usize, rng: &mut R) -> Vector {
    let member = |x: &Vector| set.distance_unchecked(x) <= 0.0;
    let scale = 1.0 + u.norm();
    let mut evals = 0usize;

    // Last member on the segment from a member `x` toward `y`.
    let pull_to = |x: &Vector, y: &Vector, evals: &mut usize| {
        let (mut inside, mut outside) = (0.0_f64, 1.0_f64);
        for _ in 0..BISECTIONS {
            let mid = 0.5 * (inside + outside);
            *evals += 1;
            if member(&x.toward(y, mid)) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        x.toward(y, inside)
    };
    let pull = |x: &Vector, evals: &mut usize| pull_to(x, u, evals);

    // Coordinate sweep: along each axis move to the point of the line
    // nearest u, clipped by bisection to stay in C.
    let sweep = |x: Vector, evals: &mut usize| {
        let mut x = x;
        for i in 0..x.dim() {
            let target = {
                let mut t = x.clone();
                t.coords_mut()[i] = u.coords()[i];
                t
            };
            *evals += 1;
            x = if member(&target) { target } else { pull_to(&x, &target, evals) };
        }
        x
    };

    // Global phase: seeded samples of C, each pulled toward u.
    let mut best = pull(&set.sample(rng, scale), &mut evals);
    let mut best_d = best.dist(u);
    while evals < budget / 10 {
        let x = pull(&set.sample(rng, scale), &mut evals);
        let d = x.dist(u);
        if d < best_d {
            best = x;
            best_d = d;
        }
    }

    // Local phase, alternating two moves, each followed by a pull toward u:
    // part of the way toward a fresh sample (in C by convexity) then a
    // sweep, or a small Gaussian step (skipped if it leaves C).
    best = sweep(best, &mut evals);
    best_d = best.dist(u);
    let mut lambda = 0.5_f64;
    let mut sigma = 0.1 * best_d.max(1e-3);
    let cost = (BISECTIONS + 1) * (u.dim() + 1) + 1;
    let mut toward_sample = true;
    while evals + cost <= budget {
        toward_sample = !toward_sample;
        let start = if toward_sample {
            best.toward(&set.sample(rng, scale), lambda)
        } else {
            let y = best.add(&rng::gaussian(rng, u.dim()).scale(sigma));
            evals += 1;
            if !member(&y) {
                continue;
            }
            y
        };
        let pulled = pull(&start, &mut evals);
        let x = if toward_sample { sweep(pulled, &mut evals) } else { pulled };
        let d = x.dist(u);
        let improved = d < best_d;
        if improved {
            best = x;
            best_d = d;
        }
        match (toward_sample, improved) {
            (true, true) => lambda = (lambda * 1.5).min(1.0),
            (true, false) => lambda = (lambda * 0.95).max(1e-12),
            (false, true) => sigma *= 1.5,
            (false, false) => sigma = (sigma * 0.9).max(1e-14),
        }
    }
    best
}

fn oracle_flat<R: Rng + ?Sized>(
    base: &Vector,
    dirs: &[Vector],
    u: &Vector,
    budget: usize,
    rng: &mut R,
) -> Vector {
    if dirs.is_empty() {
        return base.clone();
    }
    let k = dirs.len();
    let point = |c: &[f64]| {
        dirs.iter()
            .zip(c)
            .fold(base.clone(), |acc, (d, &ci)| acc.add(&d.scale(ci)))
    };
    let mut coeffs = vec![0.0; k];
    let mut best_d = point(&coeffs).dist(u);
    let mut step = best_d.max(1.0);
    for _ in 0..budget {
        let dir = rng::unit(rng, k);
        let trial: Vec<f64> = coeffs.iter().zip(dir.coords()).map(|(c, d)| c + step * d).collect();
        let d = point(&trial).dist(u);
        if d < best_d {
            best_d = d;
            coeffs = trial;
            step *= 1.5;
        } else {
            step *= 0.85;
        }
        if step < 1e-15 {
            break;
        }
    }
    point(&coeffs)
}

/// Orthonormal basis of the complement of `normal` by Gram–Schmidt over
/// the standard basis.
fn complement_basis(normal: &Vector) -> Vec<Vector> {
    let dim = normal.dim();
    let n = normal.scale(1.0 / normal.norm());
    let mut basis: Vec<Vector> = Vec::with_capacity(dim - 1);
    for i in 0..dim {
        let mut e = Vector::basis(dim, i);
        e = e.sub(&n.scale(e.dot(&n)));
        for b in &basis {
            e = e.sub(&b.scale(e.dot(b)));
        }
        let len = e.norm();
        if len > 1e-8 {
            basis.push(e.scale(1.0 / len));
        }
        if basis.len() + 1 == dim {
            break;
        }
    }
    basis
}
