//! Experiment files.
//!
//! An experiment is a TOML document. Top-level keys describe the run, named
//! sets live under `[sets.<name>]`, the operator is a nested `kind`-tagged
//! table under `[operator]`, and requested diagnostics under
//! `[checks.<name>]`. See `docs/config.md` at the repository root for the
//! full grammar.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Vector, DEFAULT_TOL};
use crate::iterate::{Method, Schedule, ScheduleFamily, INIT_TOL};
use crate::operators::{Matrix, OperatorDesc};
use crate::sets::ConvexSetDesc;

pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Every diagnostic a config may request.
pub const CHECK_NAMES: &[&str] = &[
    "nonexpansive",
    "self_map",
    "fejer",
    "fejer_bounded",
    "km_key_inequality",
    "residual_to_zero",
    "identify_limit",
    "weak_convergence",
    "halpern_coupling",
    "halpern_exp_bound",
];

fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_output_dir() -> String {
    "out".into()
}

fn is_default_tol(x: &f64) -> bool {
    *x == DEFAULT_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetSpec {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Halfspace { normal: Vec<f64>, offset: f64 },
    Hyperplane { normal: Vec<f64>, offset: f64 },
    Affine { basepoint: Vec<f64>, directions: Vec<Vec<f64>> },
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorSpec {
    Identity,
    NegIdentity,
    Projection { set: String },
    Reflection { set: String },
    Rotation2d { theta: f64, plane: [usize; 2] },
    Affine { matrix: Vec<Vec<f64>>, shift: Vec<f64> },
    Average { lambda: f64, inner: Box<OperatorSpec> },
    Compose { first: Box<OperatorSpec>, second: Box<OperatorSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    #[serde(default = "default_tol", skip_serializing_if = "is_default_tol")]
    pub tol: f64,
    /// Tail window; defaults to a tenth of the trace.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<usize>,
    /// ε of the Halpern exponential estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

impl Default for CheckSpec {
    fn default() -> Self {
        CheckSpec { tol: DEFAULT_TOL, tail: None, eps: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub dim: usize,
    pub method: Method,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub stop_residual: f64,
    #[serde(default = "default_tol")]
    pub stop_step: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    pub x0: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    /// Name of the domain set; the whole space when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    /// Explicit fixed points for the Fejér-type checks.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub anchors: Vec<Vec<f64>>,
    /// Checks this experiment is expected to fail.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expect_failures: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleFamily>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sets: BTreeMap<String, SetSpec>,
    pub operator: OperatorSpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub checks: BTreeMap<String, CheckSpec>,
}

/// Domain objects constructed from a validated config.
#[derive(Debug, Clone)]
pub struct BuiltExperiment {
    pub operator: OperatorDesc,
    pub domain: ConvexSetDesc,
    pub x0: Vector,
    pub u: Option<Vector>,
    pub schedule: Option<Schedule>,
    pub anchors: Vec<Vector>,
    pub fixed_set: Option<ConvexSetDesc>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates an experiment file.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(0, |s| line_of(text, s.start));
        Error::Parse { line, message: e.message().to_string() }
    })?;
    cfg.build()?;
    Ok(cfg)
}

/// Serializes a config back into the file format; the inverse of
/// [`parse_config`].
pub fn render_config(cfg: &ExperimentConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::Write(e.to_string()))
}

fn vector(path: &str, coords: &[f64], dim: usize) -> Result<Vector> {
    if coords.len() != dim {
        return Err(Error::validation(
            path,
            format!("expected {dim} coordinates, got {}", coords.len()),
        ));
    }
    Vector::new(coords.to_vec()).map_err(|e| Error::validation(path, e.to_string()))
}

impl ExperimentConfig {
    /// Re-checks every invariant and constructs the domain objects.
    pub fn build(&self) -> Result<BuiltExperiment> {
        let dim = self.dim;
        if dim == 0 {
            return Err(Error::validation("dim", "must be positive"));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::validation("name", "must be a nonempty file-name-safe string"));
        }
        for (path, t) in [("stop_residual", self.stop_residual), ("stop_step", self.stop_step)] {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::validation(path, "must be a nonnegative number"));
            }
        }

        let mut sets = BTreeMap::new();
        for (name, spec) in &self.sets {
            sets.insert(name.as_str(), build_set(&format!("sets.{name}"), spec, dim)?);
        }
        let domain = match &self.domain {
            Some(name) => sets
                .get(name.as_str())
                .cloned()
                .ok_or_else(|| Error::validation("domain", format!("unknown set `{name}`")))?,
            None => ConvexSetDesc::full(dim),
        };
        let operator = build_operator("operator", &self.operator, &sets, dim)?;
        operator
            .check_dim(dim)
            .map_err(|e| Error::validation("operator", e.to_string()))?;

        let x0 = vector("x0", &self.x0, dim)?;
        if !domain.contains(&x0, INIT_TOL)? {
            return Err(Error::validation("x0", "outside the domain"));
        }
        let u = match (&self.u, self.method) {
            (Some(u), _) => {
                let u = vector("u", u, dim)?;
                if !domain.contains(&u, INIT_TOL)? {
                    return Err(Error::validation("u", "outside the domain"));
                }
                Some(u)
            }
            (None, Method::Halpern) => return Err(Error::validation("u", "u required for halpern")),
            (None, _) => None,
        };

        let schedule = match (&self.schedule, self.method) {
            (Some(f), Method::Km | Method::Halpern) => {
                let s = Schedule::from_family(f.clone())
                    .map_err(|e| Error::validation("schedule", e.to_string()))?;
                if s.declared_horizon() < self.max_iter {
                    return Err(Error::validation("schedule", "fewer weights than max_iter"));
                }
                let verdict = crate::iterate::validate_schedule(&s, self.max_iter.max(1))?;
                if let Some(i) = verdict.range_witness {
                    return Err(Error::validation(format!("schedule.values[{i}]"), "outside [0, 1]"));
                }
                Some(s)
            }
            (None, Method::Km) => return Err(Error::validation("schedule", "schedule required for km")),
            (None, Method::Halpern) => Some(Schedule::halpern_default()),
            (_, Method::Picard) => None,
        };

        let anchors = self
            .anchors
            .iter()
            .enumerate()
            .map(|(i, a)| vector(&format!("anchors[{i}]"), a, dim))
            .collect::<Result<Vec<_>>>()?;
        let fixed_set = operator.known_fixed_set(dim);

        for (name, check) in &self.checks {
            let path = format!("checks.{name}");
            if !CHECK_NAMES.contains(&name.as_str()) {
                return Err(Error::validation(path, "unknown check"));
            }
            if !(check.tol > 0.0 && check.tol.is_finite()) {
                return Err(Error::validation(format!("{path}.tol"), "must be positive"));
            }
            if check.eps.is_some_and(|e| !(e > 0.0)) {
                return Err(Error::validation(format!("{path}.eps"), "must be positive"));
            }
            if check.tail == Some(0) {
                return Err(Error::validation(format!("{path}.tail"), "must be positive"));
            }
            let needs = |m: Method| {
                if self.method == m {
                    Ok(())
                } else {
                    Err(Error::validation(&path, format!("only valid for method {}", m.name())))
                }
            };
            match name.as_str() {
                "km_key_inequality" => needs(Method::Km)?,
                "halpern_coupling" => needs(Method::Halpern)?,
                "halpern_exp_bound" => {
                    needs(Method::Halpern)?;
                    if fixed_set.is_none() {
                        return Err(Error::validation(path, "needs an operator with a known fixed-point set"));
                    }
                }
                _ => {}
            }
        }
        for name in &self.expect_failures {
            if !self.checks.contains_key(name) {
                return Err(Error::validation("expect_failures", format!("`{name}` is not a requested check")));
            }
        }

        Ok(BuiltExperiment { operator, domain, x0, u, schedule, anchors, fixed_set })
    }
}

fn build_set(path: &str, spec: &SetSpec, dim: usize) -> Result<ConvexSetDesc> {
    let bad = |e: Error| match e {
        Error::BadSet(m) if m.contains("radius") => Error::validation(format!("{path}.radius"), m),
        Error::BadSet(m) => Error::validation(path, m),
        other => Error::validation(path, other.to_string()),
    };
    match spec {
        SetSpec::Ball { center, radius } => {
            ConvexSetDesc::ball(vector(&format!("{path}.center"), center, dim)?, *radius).map_err(bad)
        }
        SetSpec::Box { lo, hi } => ConvexSetDesc::boxed(
            vector(&format!("{path}.lo"), lo, dim)?,
            vector(&format!("{path}.hi"), hi, dim)?,
        )
        .map_err(bad),
        SetSpec::Halfspace { normal, offset } => {
            ConvexSetDesc::halfspace(vector(&format!("{path}.normal"), normal, dim)?, *offset).map_err(bad)
        }
        SetSpec::Hyperplane { normal, offset } => {
            ConvexSetDesc::hyperplane(vector(&format!("{path}.normal"), normal, dim)?, *offset).map_err(bad)
        }
        SetSpec::Affine { basepoint, directions } => {
            let dirs = directions
                .iter()
                .enumerate()
                .map(|(i, d)| vector(&format!("{path}.directions[{i}]"), d, dim))
                .collect::<Result<Vec<_>>>()?;
            ConvexSetDesc::affine(vector(&format!("{path}.basepoint"), basepoint, dim)?, dirs).map_err(bad)
        }
        SetSpec::Full => Ok(ConvexSetDesc::full(dim)),
    }
}

fn build_operator(
    path: &str,
    spec: &OperatorSpec,
    sets: &BTreeMap<&str, ConvexSetDesc>,
    dim: usize,
) -> Result<OperatorDesc> {
    let lookup = |name: &str| {
        sets.get(name)
            .cloned()
            .ok_or_else(|| Error::validation(format!("{path}.set"), format!("unknown set `{name}`")))
    };
    let bad = |e: Error| Error::validation(path, e.to_string());
    Ok(match spec {
        OperatorSpec::Identity => OperatorDesc::identity(),
        OperatorSpec::NegIdentity => OperatorDesc::neg_identity(),
        OperatorSpec::Projection { set } => OperatorDesc::projection(lookup(set)?),
        OperatorSpec::Reflection { set } => OperatorDesc::reflection(lookup(set)?),
        OperatorSpec::Rotation2d { theta, plane } => {
            let op = OperatorDesc::rotation2d(*theta, plane[0], plane[1]).map_err(bad)?;
            op.check_dim(dim).map_err(|e| Error::validation(format!("{path}.plane"), e.to_string()))?;
            op
        }
        OperatorSpec::Affine { matrix, shift } => {
            if matrix.len() != dim {
                return Err(Error::validation(format!("{path}.matrix"), format!("expected {dim} rows")));
            }
            let m = Matrix::from_rows(matrix).map_err(|e| Error::validation(format!("{path}.matrix"), e.to_string()))?;
            OperatorDesc::affine(m, vector(&format!("{path}.shift"), shift, dim)?)
                .map_err(|e| Error::validation(format!("{path}.matrix"), e.to_string()))?
        }
        OperatorSpec::Average { lambda, inner } => {
            let inner = build_operator(&format!("{path}.inner"), inner, sets, dim)?;
            OperatorDesc::average(inner, *lambda)
                .map_err(|e| Error::validation(format!("{path}.lambda"), e.to_string()))?
        }
        OperatorSpec::Compose { first, second } => OperatorDesc::compose(
            build_operator(&format!("{path}.first"), first, sets, dim)?,
            build_operator(&format!("{path}.second"), second, sets, dim)?,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "tiny"
dim = 2
method = "picard"
x0 = [1.0, 0.0]

[operator]
kind = "neg_identity"
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.max_iter, 10_000);
        assert_eq!(cfg.stop_residual, 1e-9);
        assert_eq!(cfg.stop_step, 1e-9);
        assert_eq!(cfg.method, Method::Picard);
        assert!(cfg.checks.is_empty());
    }

    #[test]
    fn halpern_requires_u() {
        let text = MINIMAL.replace("\"picard\"", "\"halpern\"");
        match parse_config(&text) {
            Err(Error::Validation { path, message }) => {
                assert_eq!(path, "u");
                assert!(message.contains("u required"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn km_requires_schedule() {
        let text = MINIMAL.replace("\"picard\"", "\"km\"");
        assert!(matches!(parse_config(&text), Err(Error::Validation { path, .. }) if path == "schedule"));
    }

    #[test]
    fn negative_radius_rejected() {
        let text = format!("{MINIMAL}\n[sets.b]\nkind = \"ball\"\ncenter = [0.0, 0.0]\nradius = -1.0\n");
        match parse_config(&text) {
            Err(e @ Error::Validation { .. }) => {
                assert!(e.to_string().starts_with("ValidationError"));
                assert!(e.to_string().contains("radius"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_reports_line() {
        let text = "name = \"x\"\ndim = 2\nmethod = = \"km\"\n";
        match parse_config(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_set_reference() {
        let text = MINIMAL.replace("kind = \"neg_identity\"", "kind = \"projection\"\nset = \"nope\"");
        assert!(matches!(parse_config(&text), Err(Error::Validation { path, .. }) if path == "operator.set"));
    }

    #[test]
    fn unknown_check_and_wrong_method() {
        let text = format!("{MINIMAL}\n[checks.bogus]\n");
        assert!(matches!(parse_config(&text), Err(Error::Validation { path, .. }) if path == "checks.bogus"));
        let text = format!("{MINIMAL}\n[checks.km_key_inequality]\n");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn nested_operator_round_trip() {
        let text = r#"
name = "nested"
dim = 3
method = "km"
x0 = [0.1, 0.2, 0.3]
domain = "b"
anchors = [[0.0, 0.0, 0.0]]

[schedule]
kind = "one_over_n_plus_k"
k = 3

[sets.b]
kind = "ball"
center = [0.0, 0.0, 0.0]
radius = 2.0

[sets.h]
kind = "halfspace"
normal = [1.0, 1.0, 0.0]
offset = 0.5

[operator]
kind = "average"
lambda = 0.25

[operator.inner]
kind = "compose"
first = { kind = "projection", set = "h" }
second = { kind = "rotation2d", theta = 0.3, plane = [0, 2] }

[checks.fejer]
tol = 1e-10

[checks.residual_to_zero]
tail = 5
"#;
        let cfg = parse_config(text).unwrap();
        let again = parse_config(&render_config(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
    }
}
