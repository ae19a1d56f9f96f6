//! T = −I is nonexpansive with Fix T = {0}, yet Picard iteration
//! oscillates forever. One averaged step lands on the fixed point.

use fixiter::diagnostics::check_fejer;
use fixiter::iterate::{run_km, run_picard, KmConfig, Schedule};
use fixiter::{ConvexSetDesc, OperatorDesc, Vector};

fn main() -> fixiter::Result<()> {
    let neg = OperatorDesc::neg_identity();
    let x0 = Vector::new(vec![1.0, 2.0])?;

    let picard = run_picard(&neg, &x0, 50, 0.0)?;
    println!("Picard: {} steps, residuals {:?} ...", picard.steps(), &picard.residuals[..4]);
    let generic = Vector::new(vec![0.5, 0.5])?;
    let fejer = check_fejer(&picard, &[generic], 1e-12)?;
    println!("Fejér w.r.t. a non-fixed anchor: {} (violation {:.3})", fejer.holds, fejer.worst_violation);

    let km = run_km(&KmConfig {
        operator: neg,
        domain: ConvexSetDesc::full(2),
        x0,
        schedule: Schedule::constant(0.5)?,
        max_iter: 50,
        stop_residual: 0.0,
    })?;
    println!("KM with α = 1/2: {} step(s), final iterate {:?}", km.steps(), km.last().coords());
    Ok(())
}
