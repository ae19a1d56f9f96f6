//! Declarative experiments: parse a TOML config, run it, and read back the
//! written trace.

use fixiter::cli::{execute, parse_config, read_trace_csv};

const CONFIG: &str = r#"
name = "halpern-ball"
dim = 2
method = "halpern"
max_iter = 2000
stop_step = 0.0
x0 = [3.0, 4.0]
u = [3.0, 4.0]

[schedule]
kind = "one_over_n_plus_k"
k = 2

[sets.disk]
kind = "ball"
center = [0.0, 0.0]
radius = 1.0

[operator]
kind = "projection"
set = "disk"

[checks.identify_limit]
tol = 1e-2

[checks.halpern_exp_bound]
eps = 1e-2
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = parse_config(CONFIG)?;
    let dir = std::env::temp_dir().join("fixiter-example");
    cfg.output_dir = dir.to_string_lossy().into_owned();

    let out = execute(&cfg)?;
    print!("{}", out.summary.render());

    let rows = read_trace_csv(&std::fs::read_to_string(&out.paths.trace)?)?;
    let last = rows.last().expect("trace has rows");
    println!("trace.csv: {} rows, last iterate {:?}", rows.len(), last.coords);
    Ok(())
}
