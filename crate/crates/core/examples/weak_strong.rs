//! In finite dimensions weak and strong convergence coincide; both
//! detectors agree on convergent and oscillating traces.

use std::f64::consts::PI;

use fixiter::hilbert::{check_strong_convergence, check_weak_convergence, default_test_vectors};
use fixiter::iterate::{run_km, run_picard, KmConfig, Schedule};
use fixiter::{ConvexSetDesc, OperatorDesc, Vector};

fn main() -> fixiter::Result<()> {
    let dim = 4;
    let x0 = Vector::new(vec![1.0, -2.0, 0.5, 3.0])?;
    let rot = OperatorDesc::rotation2d(2.0 * PI / 3.0, 0, 1)?;
    let limit = rot.known_fixed_set(dim).expect("rotation has a known fixed set").project(&x0)?;

    let averaged = run_km(&KmConfig {
        operator: rot.clone(),
        domain: ConvexSetDesc::full(dim),
        x0: x0.clone(),
        schedule: Schedule::constant(0.5)?,
        max_iter: 300,
        stop_residual: 0.0,
    })?;
    let cycling = run_picard(&rot, &x0, 300, 0.0)?;

    let tests = default_test_vectors(dim, 11);
    for (name, trace) in [("KM", &averaged), ("Picard", &cycling)] {
        let strong = check_strong_convergence(&trace.iterates, &limit, 30, 1e-8)?;
        let weak = check_weak_convergence(&trace.iterates, &limit, &tests, 30, 1e-8)?;
        println!(
            "{name:<7} strong {:<5} (tail deviation {:.1e})  weak {:<5} (tail deviation {:.1e})",
            strong.converged, strong.tail_deviation, weak.converged, weak.tail_deviation
        );
    }
    Ok(())
}
