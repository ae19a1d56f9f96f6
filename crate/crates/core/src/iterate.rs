//! Step-weight schedules and the Picard, Krasnosel'skiĭ–Mann and Halpern
//! runners.
//!
//! Runners store exactly what the update formula yields, so a trace can be
//! replayed step by step and compared bit-for-bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::Vector;
use crate::operators::OperatorDesc;
use crate::sets::ConvexSetDesc;

/// Membership tolerance for starting points and anchors.
pub const INIT_TOL: f64 = 1e-9;
/// Tolerance used when recording iterates that leave the domain.
pub const DOMAIN_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleFamily {
    Constant { alpha: f64 },
    /// `αₙ = 1/(n + k)`
    OneOverNPlusK { k: u64 },
    Custom { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    family: ScheduleFamily,
    declared_horizon: usize,
}

impl Schedule {
    pub fn constant(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::BadSchedule("alpha must be finite".into()));
        }
        Ok(Schedule { family: ScheduleFamily::Constant { alpha }, declared_horizon: usize::MAX })
    }

    pub fn one_over_n_plus_k(k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::BadSchedule("k must be positive".into()));
        }
        Ok(Schedule { family: ScheduleFamily::OneOverNPlusK { k }, declared_horizon: usize::MAX })
    }

    /// A finite list of weights; the declared horizon is the list length.
    pub fn custom(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySchedule);
        }
        if values.iter().any(|a| !a.is_finite()) {
            return Err(Error::BadSchedule("weights must be finite".into()));
        }
        let declared_horizon = values.len();
        Ok(Schedule { family: ScheduleFamily::Custom { values }, declared_horizon })
    }

    /// Default Halpern schedule, `αₙ = 1/(n + 2)`.
    pub fn halpern_default() -> Self {
        Schedule { family: ScheduleFamily::OneOverNPlusK { k: 2 }, declared_horizon: usize::MAX }
    }

    pub fn from_family(family: ScheduleFamily) -> Result<Self> {
        match family {
            ScheduleFamily::Constant { alpha } => Self::constant(alpha),
            ScheduleFamily::OneOverNPlusK { k } => Self::one_over_n_plus_k(k),
            ScheduleFamily::Custom { values } => Self::custom(values),
        }
    }

    pub fn family(&self) -> &ScheduleFamily {
        &self.family
    }

    /// Number of weights available; unbounded for the analytic families.
    pub fn declared_horizon(&self) -> usize {
        self.declared_horizon
    }

    pub fn alpha(&self, n: usize) -> Option<f64> {
        match &self.family {
            ScheduleFamily::Constant { alpha } => Some(*alpha),
            ScheduleFamily::OneOverNPlusK { k } => Some(1.0 / (n as f64 + *k as f64)),
            ScheduleFamily::Custom { values } => values.get(n).copied(),
        }
    }

    fn weights(&self, horizon: usize) -> impl Iterator<Item = f64> + '_ {
        (0..horizon).map_while(move |n| self.alpha(n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionStatus {
    Proven,
    FiniteHorizonConsistent,
    Violated,
}

impl ConditionStatus {
    pub fn is_violated(self) -> bool {
        self == ConditionStatus::Violated
    }

    fn proven_if(ok: bool) -> Self {
        if ok {
            ConditionStatus::Proven
        } else {
            ConditionStatus::Violated
        }
    }

    fn consistent_if(ok: bool) -> Self {
        if ok {
            ConditionStatus::FiniteHorizonConsistent
        } else {
            ConditionStatus::Violated
        }
    }
}

/// Status of each step-weight condition.
///
/// KM: (1) `αₙ ∈ [0,1]`, (2) `Σ αₙ(1 − αₙ) = ∞`.
/// Halpern: (1) `αₙ ∈ (0,1)`, (2) `αₙ → 0`, (3) `Σ αₙ = ∞`,
/// (4) `Σ |αₙ₊₁ − αₙ| < ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleVerdict {
    pub km_cond1: ConditionStatus,
    pub km_cond2: ConditionStatus,
    pub h_cond1: ConditionStatus,
    pub h_cond2: ConditionStatus,
    pub h_cond3: ConditionStatus,
    pub h_cond4: ConditionStatus,
    /// First index outside `[0, 1]`, when there is one.
    pub range_witness: Option<usize>,
}

/// Thresholds used to classify finite [`ScheduleFamily::Custom`] lists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteHorizonThresholds {
    /// A partial sum at least this large counts as consistent with divergence.
    pub divergence: f64,
    /// Largest weight on the last decade consistent with `αₙ → 0`.
    pub vanishing: f64,
    /// Largest growth of `Σ|Δα|` over the last decade consistent with summability.
    pub flatness: f64,
}

impl Default for FiniteHorizonThresholds {
    fn default() -> Self {
        FiniteHorizonThresholds { divergence: 1.0, vanishing: 0.1, flatness: 1e-2 }
    }
}

pub fn validate_schedule(s: &Schedule, horizon: usize) -> Result<ScheduleVerdict> {
    validate_schedule_with(s, horizon, FiniteHorizonThresholds::default())
}

pub fn validate_schedule_with(
    s: &Schedule,
    horizon: usize,
    th: FiniteHorizonThresholds,
) -> Result<ScheduleVerdict> {
    use ConditionStatus as S;
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    Ok(match s.family() {
        ScheduleFamily::Constant { alpha } => {
            let a = *alpha;
            let in_closed = (0.0..=1.0).contains(&a);
            let in_open = a > 0.0 && a < 1.0;
            ScheduleVerdict {
                km_cond1: S::proven_if(in_closed),
                km_cond2: S::proven_if(in_open),
                h_cond1: S::proven_if(in_open),
                h_cond2: S::proven_if(a == 0.0),
                h_cond3: S::proven_if(a > 0.0),
                h_cond4: S::Proven,
                range_witness: (!in_closed).then_some(0),
            }
        }
        // 1/(n+k): harmonic tail diverges, differences telescope to 1/k.
        // For k = 1 the first weight is 1, outside the open interval.
        ScheduleFamily::OneOverNPlusK { k } => ScheduleVerdict {
            km_cond1: S::Proven,
            km_cond2: S::Proven,
            h_cond1: S::proven_if(*k >= 2),
            h_cond2: S::Proven,
            h_cond3: S::Proven,
            h_cond4: S::Proven,
            range_witness: None,
        },
        ScheduleFamily::Custom { values } => {
            if values.is_empty() {
                return Err(Error::EmptySchedule);
            }
            let w: Vec<f64> = s.weights(horizon).collect();
            let range_witness = w.iter().position(|a| !(0.0..=1.0).contains(a));
            let open = w.iter().all(|&a| a > 0.0 && a < 1.0);
            let km_sum: f64 = w.iter().map(|a| a * (1.0 - a)).sum();
            let sum: f64 = w.iter().sum();
            let decade = (w.len() / 10).max(1);
            let last = &w[w.len() - decade..];
            let tail_max = last.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
            let tail_variation: f64 = w[w.len() - decade - usize::from(w.len() > decade)..]
                .windows(2)
                .map(|p| (p[1] - p[0]).abs())
                .sum();
            ScheduleVerdict {
                km_cond1: S::proven_if(range_witness.is_none()),
                km_cond2: S::consistent_if(km_sum >= th.divergence),
                h_cond1: S::proven_if(open),
                h_cond2: S::consistent_if(tail_max <= th.vanishing),
                h_cond3: S::consistent_if(sum >= th.divergence),
                h_cond4: S::consistent_if(tail_variation <= th.flatness),
                range_witness,
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Picard,
    Km,
    Halpern,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Picard => "picard",
            Method::Km => "km",
            Method::Halpern => "halpern",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    MaxIter,
    ResidualBelow,
    StepBelow,
}

/// Record of a run: `iterates[n]` is `xₙ`, `residuals[n]` is `‖Txₙ − xₙ‖`
/// and `alphas_used[n]` is the weight of the step from `xₙ` to `xₙ₊₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub method: Method,
    pub iterates: Vec<Vector>,
    pub residuals: Vec<f64>,
    pub alphas_used: Vec<f64>,
    pub stop_reason: StopReason,
    /// Halpern anchor `u`.
    pub anchor: Option<Vector>,
    /// Indices of iterates found outside the domain by more than [`DOMAIN_TOL`].
    pub domain_violations: Vec<usize>,
}

impl IterationTrace {
    /// Number of steps taken.
    pub fn steps(&self) -> usize {
        self.alphas_used.len()
    }

    pub fn last(&self) -> &Vector {
        self.iterates.last().expect("traces hold at least x₀")
    }

    pub fn final_residual(&self) -> f64 {
        *self.residuals.last().expect("traces hold at least x₀")
    }

    pub fn dim(&self) -> usize {
        self.iterates[0].dim()
    }

    /// `‖xₙ₊₁ − xₙ‖` for each step.
    pub fn step_norms(&self) -> Vec<f64> {
        self.iterates.windows(2).map(|w| w[1].dist(&w[0])).collect()
    }
}

#[derive(Debug, Clone)]
pub struct KmConfig {
    pub operator: OperatorDesc,
    pub domain: ConvexSetDesc,
    pub x0: Vector,
    pub schedule: Schedule,
    pub max_iter: usize,
    pub stop_residual: f64,
}

#[derive(Debug, Clone)]
pub struct HalpernConfig {
    pub operator: OperatorDesc,
    pub domain: ConvexSetDesc,
    pub x0: Vector,
    pub u: Vector,
    pub schedule: Schedule,
    pub max_iter: usize,
    pub stop_step: f64,
}

/// Checks that `schedule` supplies a weight in `[0, 1]` for every step up
/// to `max_iter`.
fn check_weights(schedule: &Schedule, max_iter: usize) -> Result<()> {
    if schedule.declared_horizon() < max_iter {
        return Err(Error::BadSchedule(format!(
            "schedule covers {} steps, run needs {max_iter}",
            schedule.declared_horizon()
        )));
    }
    let verdict = validate_schedule(schedule, max_iter.max(1))?;
    if let Some(i) = verdict.range_witness {
        return Err(Error::BadSchedule(format!(
            "weight {} at step {i} outside [0, 1]",
            schedule.alpha(i).unwrap_or(f64::NAN)
        )));
    }
    Ok(())
}

fn domain_violation(domain: &ConvexSetDesc, x: &Vector) -> bool {
    !matches!(domain.contains(x, DOMAIN_TOL), Ok(true))
}

/// `xₙ₊₁ = T xₙ`.
pub fn run_picard(op: &OperatorDesc, x0: &Vector, max_iter: usize, stop_residual: f64) -> Result<IterationTrace> {
    op.check_dim(x0.dim())?;
    let mut iterates = vec![x0.clone()];
    let mut residuals = Vec::new();
    let mut alphas_used = Vec::new();
    let stop_reason = loop {
        let n = iterates.len() - 1;
        let tx = op.apply_unchecked(&iterates[n]);
        let r = tx.dist(&iterates[n]);
        residuals.push(r);
        if r <= stop_residual {
            break StopReason::ResidualBelow;
        }
        if n >= max_iter {
            break StopReason::MaxIter;
        }
        alphas_used.push(1.0);
        iterates.push(tx);
    };
    Ok(IterationTrace {
        method: Method::Picard,
        iterates,
        residuals,
        alphas_used,
        stop_reason,
        anchor: None,
        domain_violations: Vec::new(),
    })
}

/// `xₙ₊₁ = xₙ + αₙ (T xₙ − xₙ)`.
pub fn run_km(cfg: &KmConfig) -> Result<IterationTrace> {
    let op = &cfg.operator;
    op.check_dim(cfg.x0.dim())?;
    Error::dims(cfg.domain.dim(), cfg.x0.dim())?;
    if !cfg.domain.contains(&cfg.x0, INIT_TOL)? {
        return Err(Error::InitOutsideDomain);
    }
    check_weights(&cfg.schedule, cfg.max_iter)?;

    let mut iterates = vec![cfg.x0.clone()];
    let mut residuals = Vec::new();
    let mut alphas_used = Vec::new();
    let mut domain_violations = Vec::new();
    let stop_reason = loop {
        let n = iterates.len() - 1;
        let x = &iterates[n];
        let tx = op.apply_unchecked(x);
        let r = tx.dist(x);
        residuals.push(r);
        if r <= cfg.stop_residual {
            break StopReason::ResidualBelow;
        }
        if n >= cfg.max_iter {
            break StopReason::MaxIter;
        }
        let alpha = cfg.schedule.alpha(n).expect("horizon checked");
        let next = x.toward(&tx, alpha);
        if domain_violation(&cfg.domain, &next) {
            domain_violations.push(n + 1);
        }
        alphas_used.push(alpha);
        iterates.push(next);
    };
    Ok(IterationTrace {
        method: Method::Km,
        iterates,
        residuals,
        alphas_used,
        stop_reason,
        anchor: None,
        domain_violations,
    })
}

/// `xₙ₊₁ = αₙ u + (1 − αₙ) T xₙ`.
///
/// Weights must lie in `[0, 1]`; boundary weights are accepted so that
/// degenerate schedules can be run, while [`validate_schedule`] reports
/// them against the open-interval condition.
pub fn run_halpern(cfg: &HalpernConfig) -> Result<IterationTrace> {
    let op = &cfg.operator;
    op.check_dim(cfg.x0.dim())?;
    Error::dims(cfg.domain.dim(), cfg.x0.dim())?;
    Error::dims(cfg.x0.dim(), cfg.u.dim())?;
    if !cfg.domain.contains(&cfg.x0, INIT_TOL)? {
        return Err(Error::InitOutsideDomain);
    }
    if !cfg.domain.contains(&cfg.u, INIT_TOL)? {
        return Err(Error::AnchorOutsideDomain);
    }
    check_weights(&cfg.schedule, cfg.max_iter)?;

    let mut iterates = vec![cfg.x0.clone()];
    let mut residuals = Vec::new();
    let mut alphas_used = Vec::new();
    let mut domain_violations = Vec::new();
    let mut tx = op.apply_unchecked(&cfg.x0);
    residuals.push(tx.dist(&cfg.x0));
    let stop_reason = loop {
        let n = iterates.len() - 1;
        if n >= cfg.max_iter {
            break StopReason::MaxIter;
        }
        let alpha = cfg.schedule.alpha(n).expect("horizon checked");
        let next = cfg.u.convex(alpha, &tx);
        let step = next.dist(&iterates[n]);
        tx = op.apply_unchecked(&next);
        residuals.push(tx.dist(&next));
        if domain_violation(&cfg.domain, &next) {
            domain_violations.push(n + 1);
        }
        alphas_used.push(alpha);
        iterates.push(next);
        if step <= cfg.stop_step {
            break StopReason::StepBelow;
        }
    };
    Ok(IterationTrace {
        method: Method::Halpern,
        iterates,
        residuals,
        alphas_used,
        stop_reason,
        anchor: Some(cfg.u.clone()),
        domain_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Matrix;
    use std::f64::consts::{FRAC_PI_2, SQRT_2};
    use ConditionStatus::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn constant_half_verdict() {
        let r = validate_schedule(&Schedule::constant(0.5).unwrap(), 100).unwrap();
        assert_eq!(r.km_cond1, Proven);
        assert_eq!(r.km_cond2, Proven);
        assert_eq!(r.h_cond2, Violated);
        assert_eq!(r.h_cond1, Proven);
    }

    #[test]
    fn harmonic_verdict_all_proven() {
        let r = validate_schedule(&Schedule::one_over_n_plus_k(2).unwrap(), 100).unwrap();
        for c in [r.km_cond1, r.km_cond2, r.h_cond1, r.h_cond2, r.h_cond3, r.h_cond4] {
            assert_eq!(c, Proven);
        }
        // α₀ = 1 is outside (0, 1)
        let r = validate_schedule(&Schedule::one_over_n_plus_k(1).unwrap(), 100).unwrap();
        assert_eq!(r.h_cond1, Violated);
        assert_eq!(r.km_cond1, Proven);
    }

    #[test]
    fn custom_range_violation_witness() {
        let s = Schedule::custom(vec![0.5, 1.5, 0.5, 0.5]).unwrap();
        let r = validate_schedule(&s, 4).unwrap();
        assert_eq!(r.km_cond1, Violated);
        assert_eq!(r.range_witness, Some(1));
    }

    #[test]
    fn custom_harmonic_is_consistent() {
        let values: Vec<f64> = (0..1000).map(|n| 1.0 / (n as f64 + 2.0)).collect();
        let r = validate_schedule(&Schedule::custom(values).unwrap(), 1000).unwrap();
        assert_eq!(r.h_cond1, Proven);
        for c in [r.km_cond2, r.h_cond2, r.h_cond3, r.h_cond4] {
            assert_eq!(c, FiniteHorizonConsistent);
        }
    }

    #[test]
    fn custom_oscillating_is_not_summable() {
        let values: Vec<f64> = (0..1000).map(|n| if n % 2 == 0 { 0.25 } else { 0.75 }).collect();
        let r = validate_schedule(&Schedule::custom(values).unwrap(), 1000).unwrap();
        assert_eq!(r.h_cond4, Violated);
        assert_eq!(r.h_cond2, Violated);
        assert_eq!(r.km_cond2, FiniteHorizonConsistent);
    }

    #[test]
    fn empty_custom_schedule() {
        assert_eq!(Schedule::custom(vec![]), Err(Error::EmptySchedule));
    }

    #[test]
    fn picard_identity_stops_immediately() {
        let t = run_picard(&OperatorDesc::identity(), &v(&[1., 2.]), 100, 1e-9).unwrap();
        assert_eq!(t.stop_reason, StopReason::ResidualBelow);
        assert_eq!(t.iterates.len(), 1);
    }

    #[test]
    fn picard_neg_identity_oscillates() {
        let t = run_picard(&OperatorDesc::neg_identity(), &v(&[1., 0.]), 10, 1e-9).unwrap();
        assert_eq!(t.stop_reason, StopReason::MaxIter);
        assert_eq!(t.iterates.len(), 11);
        for (n, x) in t.iterates.iter().enumerate() {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(*x, v(&[s, 0.]));
        }
        assert!(t.residuals.iter().all(|&r| r == 2.0));
    }

    #[test]
    fn picard_halving_map() {
        let half = OperatorDesc::affine(Matrix::identity(2).scaled(0.5), Vector::zeros(2)).unwrap();
        let t = run_picard(&half, &v(&[8., 0.]), 20, 0.0).unwrap();
        for (n, x) in t.iterates.iter().enumerate() {
            assert_eq!(*x, v(&[8.0 / 2f64.powi(n as i32), 0.]));
        }
    }

    fn km(op: OperatorDesc, x0: Vector, s: Schedule, max_iter: usize) -> KmConfig {
        KmConfig {
            operator: op,
            domain: ConvexSetDesc::full(x0.dim()),
            x0,
            schedule: s,
            max_iter,
            stop_residual: 0.0,
        }
    }

    #[test]
    fn km_neg_identity_one_step() {
        let t = run_km(&km(OperatorDesc::neg_identity(), v(&[5., -2.]), Schedule::constant(0.5).unwrap(), 50))
            .unwrap();
        assert_eq!(t.iterates[1], v(&[0., 0.]));
        assert_eq!(t.stop_reason, StopReason::ResidualBelow);
        assert_eq!(t.steps(), 1);
    }

    #[test]
    fn km_rotation_norm_decay() {
        let rot = OperatorDesc::rotation2d(FRAC_PI_2, 0, 1).unwrap();
        let t = run_km(&km(rot, v(&[1., 0.]), Schedule::constant(0.5).unwrap(), 60)).unwrap();
        // (I + R)/2 = [[½, −½], [½, ½]]; its n-th power scales norms by (√2/2)ⁿ
        let mut m = [[1.0, 0.0], [0.0, 1.0]];
        for (n, x) in t.iterates.iter().enumerate() {
            let expect = (SQRT_2 / 2.0).powi(n as i32);
            assert!((x.norm() - expect).abs() <= 1e-14 * expect.max(1e-300), "n={n}");
            let col = [m[0][0], m[1][0]];
            assert!(x.dist(&v(&col)) <= 1e-14);
            m = [
                [0.5 * m[0][0] - 0.5 * m[1][0], 0.5 * m[0][1] - 0.5 * m[1][1]],
                [0.5 * m[0][0] + 0.5 * m[1][0], 0.5 * m[0][1] + 0.5 * m[1][1]],
            ];
        }
    }

    #[test]
    fn km_identity_constant() {
        let t = run_km(&km(OperatorDesc::identity(), v(&[3., 1.]), Schedule::one_over_n_plus_k(2).unwrap(), 50))
            .unwrap();
        assert_eq!(t.iterates.len(), 1);
        assert_eq!(t.stop_reason, StopReason::ResidualBelow);
    }

    #[test]
    fn km_rejects_bad_inputs() {
        let mut cfg = km(OperatorDesc::identity(), v(&[3., 0.]), Schedule::constant(0.5).unwrap(), 5);
        cfg.domain = ConvexSetDesc::ball(Vector::zeros(2), 1.0).unwrap();
        assert_eq!(run_km(&cfg).unwrap_err(), Error::InitOutsideDomain);

        let cfg = km(OperatorDesc::neg_identity(), v(&[3., 0.]), Schedule::custom(vec![0.5, 1.5]).unwrap(), 2);
        assert!(matches!(run_km(&cfg), Err(Error::BadSchedule(_))));

        let cfg = km(OperatorDesc::neg_identity(), v(&[3., 0.]), Schedule::custom(vec![0.5]).unwrap(), 2);
        assert!(matches!(run_km(&cfg), Err(Error::BadSchedule(_))));
    }

    fn halpern(op: OperatorDesc, x0: Vector, u: Vector, s: Schedule, max_iter: usize) -> HalpernConfig {
        HalpernConfig {
            operator: op,
            domain: ConvexSetDesc::full(x0.dim()),
            x0,
            u,
            schedule: s,
            max_iter,
            stop_step: -1.0,
        }
    }

    #[test]
    fn halpern_identity_anchor_fixed() {
        let u = v(&[2., -1.]);
        let t = run_halpern(&halpern(OperatorDesc::identity(), u.clone(), u.clone(), Schedule::halpern_default(), 30))
            .unwrap();
        assert!(t.iterates.iter().all(|x| *x == u));
        assert_eq!(t.iterates.len(), 31);
    }

    #[test]
    fn halpern_first_step_by_hand() {
        let p = OperatorDesc::projection(ConvexSetDesc::ball(Vector::zeros(2), 1.0).unwrap());
        let u = v(&[2., 0.]);
        let t = run_halpern(&halpern(p, u.clone(), u, Schedule::halpern_default(), 3)).unwrap();
        assert_eq!(t.iterates[1], v(&[1.5, 0.]));
    }

    #[test]
    fn halpern_unit_weights_pin_to_anchor() {
        let u = v(&[0.3, 0.4]);
        let rot = OperatorDesc::rotation2d(1.0, 0, 1).unwrap();
        let t = run_halpern(&halpern(rot, v(&[1., 1.]), u.clone(), Schedule::custom(vec![1.0; 10]).unwrap(), 10))
            .unwrap();
        assert!(t.iterates[1..].iter().all(|x| *x == u));
    }

    #[test]
    fn halpern_anchor_outside_domain() {
        let mut cfg = halpern(OperatorDesc::identity(), v(&[0., 0.]), v(&[5., 0.]), Schedule::halpern_default(), 3);
        cfg.domain = ConvexSetDesc::ball(Vector::zeros(2), 1.0).unwrap();
        assert_eq!(run_halpern(&cfg).unwrap_err(), Error::AnchorOutsideDomain);
    }

    #[test]
    fn halpern_stops_on_small_step() {
        let mut cfg = halpern(OperatorDesc::identity(), v(&[1., 0.]), v(&[1., 0.]), Schedule::halpern_default(), 100);
        cfg.stop_step = 0.0;
        let t = run_halpern(&cfg).unwrap();
        assert_eq!(t.stop_reason, StopReason::StepBelow);
        assert_eq!(t.steps(), 1);
    }

    #[test]
    fn trace_lengths_line_up() {
        let rot = OperatorDesc::rotation2d(0.3, 0, 1).unwrap();
        let t = run_km(&km(rot.clone(), v(&[1., 2.]), Schedule::constant(0.3).unwrap(), 40)).unwrap();
        assert_eq!(t.iterates.len(), t.residuals.len());
        assert_eq!(t.iterates.len(), t.alphas_used.len() + 1);
        for (x, r) in t.iterates.iter().zip(&t.residuals) {
            assert!((rot.residual(x).unwrap() - r).abs() <= 1e-12);
        }
    }
}
