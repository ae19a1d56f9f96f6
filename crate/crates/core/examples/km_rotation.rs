//! KM with a quarter-turn rotation: Picard would cycle, the averaged
//! iteration spirals into the origin.

use std::f64::consts::FRAC_PI_2;

use fixiter::diagnostics::{check_fejer, check_km_key_inequality};
use fixiter::iterate::{run_km, KmConfig, Schedule};
use fixiter::{ConvexSetDesc, OperatorDesc, Vector};

fn main() -> fixiter::Result<()> {
    let trace = run_km(&KmConfig {
        operator: OperatorDesc::rotation2d(FRAC_PI_2, 0, 1)?,
        domain: ConvexSetDesc::full(2),
        x0: Vector::new(vec![1.0, 0.0])?,
        schedule: Schedule::constant(0.5)?,
        max_iter: 60,
        stop_residual: 1e-12,
    })?;

    for (n, x) in trace.iterates.iter().enumerate().step_by(10) {
        println!("n={n:3}  x=({:+.6}, {:+.6})  residual {:.3e}", x.coords()[0], x.coords()[1], trace.residuals[n]);
    }

    let origin = Vector::zeros(2);
    let fejer = check_fejer(&trace, std::slice::from_ref(&origin), 1e-12)?;
    let key = check_km_key_inequality(&trace, &origin, 1e-12)?;
    println!("Fejér w.r.t. 0: {}", fejer.holds);
    // For a rotation the key inequality is an identity.
    let gap = key.per_step_lhs.iter().zip(&key.per_step_rhs).map(|(l, r)| (l - r).abs()).fold(0.0, f64::max);
    println!("key inequality holds: {} (max |lhs - rhs| = {gap:.1e})", key.holds);
    Ok(())
}
