//! Halpern iteration with T = P_C converges strongly to the point of C
//! nearest the anchor u, at the rate the weights dictate.

use fixiter::diagnostics::{check_halpern_coupling, check_halpern_exp_bound};
use fixiter::iterate::{run_halpern, validate_schedule, HalpernConfig, Schedule};
use fixiter::{ConvexSetDesc, OperatorDesc, Vector};

fn main() -> fixiter::Result<()> {
    let c = ConvexSetDesc::boxed(Vector::new(vec![0.0, 0.0, 0.0])?, Vector::new(vec![1.0, 1.0, 1.0])?)?;
    let u = Vector::new(vec![3.0, -2.0, 0.5])?;
    let schedule = Schedule::halpern_default();
    let verdict = validate_schedule(&schedule, 10_000)?;
    println!("schedule: {verdict:?}");

    let run = |x0: Vector| {
        run_halpern(&HalpernConfig {
            operator: OperatorDesc::projection(c.clone()),
            domain: ConvexSetDesc::full(3),
            x0,
            u: u.clone(),
            schedule: schedule.clone(),
            max_iter: 10_000,
            stop_step: 0.0,
        })
    };
    let from_u = run(u.clone())?;
    let from_elsewhere = run(Vector::new(vec![-4.0, 4.0, 4.0])?)?;

    let p = c.project(&u)?;
    for n in [10, 100, 1000, 10_000] {
        println!("n={n:5}  ‖x_n - P_C u‖ = {:.3e}", from_u.iterates[n].dist(&p));
    }

    let coupling = check_halpern_coupling(&from_u, &from_elsewhere, &schedule, 1e-9)?;
    println!("coupling bound holds: {} (max excess {:.1e})", coupling.holds, coupling.max_excess);
    let exp = check_halpern_exp_bound(&from_u, &p, &schedule, 1e-2, 1e-12)?;
    println!("exponential estimate holds from m = {:?}", exp.index);
    Ok(())
}
