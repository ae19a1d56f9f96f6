//! Convex feasibility: find a point of a ball ∩ halfspace by KM on the
//! composition of the two projections.

use fixiter::diagnostics::{check_fejer, check_residual_to_zero, identify_limit};
use fixiter::iterate::{run_km, KmConfig, Schedule};
use fixiter::{ConvexSetDesc, OperatorDesc, Vector};

fn main() -> fixiter::Result<()> {
    let dim = 20;
    let ball = ConvexSetDesc::ball(Vector::zeros(dim), 1.0)?;
    let normal = Vector::basis(dim, 0);
    let half = ConvexSetDesc::halfspace(normal.clone(), -0.8)?;
    let op = OperatorDesc::compose(OperatorDesc::projection(half.clone()), OperatorDesc::projection(ball.clone()));

    let mut x0 = vec![0.05; dim];
    x0[0] = 0.6;
    let trace = run_km(&KmConfig {
        operator: op.clone(),
        domain: ball.clone(),
        x0: Vector::new(x0)?,
        schedule: Schedule::constant(0.5)?,
        max_iter: 100_000,
        stop_residual: 1e-14,
    })?;
    println!("{} steps, stop reason {:?}, final residual {:.3e}", trace.steps(), trace.stop_reason, trace.final_residual());

    let anchor = normal.scale(-0.9);
    let fejer = check_fejer(&trace, &[anchor], 1e-10)?;
    println!("Fejér against (-0.9, 0, ...): {}", fejer.holds);
    println!("residuals decrease to 1e-6: {}", check_residual_to_zero(&trace, 1, 1e-6)?);

    let limit = ball.project(&half.project(trace.last())?)?;
    println!(
        "limit in ball: {}, in halfspace: {}, residual {:.1e}",
        ball.contains(&limit, 1e-6)?,
        half.contains(&limit, 1e-6)?,
        op.residual(&limit)?
    );
    let tail = (trace.iterates.len() / 10).max(1);
    println!("iterates settle at the limit: {}", identify_limit(&trace, &limit, tail, 1e-5)?);
    Ok(())
}
