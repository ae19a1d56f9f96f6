//! Closed-form projections against the sampling oracle and the
//! variational inequality.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fixiter::sets::{check_projection_vi, oracle_project};
use fixiter::{ConvexSetDesc, Vector};

fn main() -> fixiter::Result<()> {
    let sets = [
        ConvexSetDesc::ball(Vector::new(vec![1.0, 0.0, 0.0])?, 1.5)?,
        ConvexSetDesc::boxed(Vector::zeros(3), Vector::new(vec![1.0, 2.0, 3.0])?)?,
        ConvexSetDesc::halfspace(Vector::new(vec![1.0, 1.0, 1.0])?, 1.0)?,
        ConvexSetDesc::hyperplane(Vector::new(vec![0.0, 0.0, 2.0])?, 1.0)?,
        ConvexSetDesc::affine(Vector::zeros(3), vec![Vector::basis(3, 1)])?,
    ];
    let u = Vector::new(vec![4.0, -3.0, 5.0])?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for set in &sets {
        let p = set.project(&u)?;
        let oracle = oracle_project(set, &u, 100_000, 7)?;
        let members: Vec<Vector> = (0..1000).map(|_| set.sample(&mut rng, 5.0)).collect();
        let vi = check_projection_vi(set, &u, &p, &members, 1e-10)?;
        println!(
            "{:<10} P(u) = {:?}  oracle gap {:.1e}  VI violation {:.1e}",
            set.kind_name(),
            p.coords(),
            p.dist(&oracle),
            vi.vi_violation
        );
    }
    Ok(())
}
