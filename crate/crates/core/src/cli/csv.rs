//! Trace CSV.
//!
//! Header `n,alpha,residual,step_norm,x_0,...,x_{d-1}`, then one row per
//! iterate. Reals are written in scientific notation with 17 significant
//! digits, which round-trips every `f64` exactly. Row 0 leaves `alpha` and
//! `step_norm` empty; row `n > 0` carries the weight and the length of the
//! step that produced `xₙ`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::iterate::IterationTrace;

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders the CSV text of a trace.
pub fn render_trace_csv(trace: &IterationTrace) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header: Vec<String> = ["n", "alpha", "residual", "step_norm"].map(String::from).to_vec();
    header.extend((0..trace.dim()).map(|i| format!("x_{i}")));
    w.write_record(&header).expect("writing to memory");
    for (n, x) in trace.iterates.iter().enumerate() {
        let mut row = vec![n.to_string()];
        row.push(if n > 0 { real(trace.alphas_used[n - 1]) } else { String::new() });
        row.push(real(trace.residuals[n]));
        row.push(if n > 0 { real(x.dist(&trace.iterates[n - 1])) } else { String::new() });
        row.extend(x.coords().iter().map(|&c| real(c)));
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("ASCII output")
}

pub fn emit_trace_csv(trace: &IterationTrace, path: &Path) -> Result<()> {
    fs::write(path, render_trace_csv(trace))
        .map_err(|e| Error::Write(format!("{}: {e}", path.display())))
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub n: usize,
    pub alpha: Option<f64>,
    pub residual: f64,
    pub step_norm: Option<f64>,
    pub coords: Vec<f64>,
}

/// Reads a trace CSV back into rows.
pub fn read_trace_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let bad = |line: u64, message: String| Error::Parse { line: line as usize, message };
    let header = reader.headers().map_err(|e| bad(1, e.to_string()))?.clone();
    let fixed = ["n", "alpha", "residual", "step_norm"];
    if header.len() < 5 || header.iter().take(4).ne(fixed) || &header[4] != "x_0" {
        return Err(bad(1, "unexpected header".into()));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |s: &str| -> Result<f64> { s.parse().map_err(|_| bad(line, format!("bad number `{s}`"))) };
        let optional = |s: &str| -> Result<Option<f64>> { if s.is_empty() { Ok(None) } else { field(s).map(Some) } };
        rows.push(CsvRow {
            n: record[0].parse().map_err(|_| bad(line, "bad index".into()))?,
            alpha: optional(&record[1])?,
            residual: field(&record[2])?,
            step_norm: optional(&record[3])?,
            coords: record.iter().skip(4).map(field).collect::<Result<_>>()?,
        });
    }
    Ok(rows)
}
