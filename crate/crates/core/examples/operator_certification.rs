//! Sampled certification of nonexpansiveness, quasi-nonexpansiveness and
//! the half-space description of Fix T.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fixiter::operators::{
    certify_nonexpansive, certify_quasinonexpansive, check_fix_halfspace_characterization, Matrix,
};
use fixiter::{ConvexSetDesc, OperatorDesc, Vector};

fn main() -> fixiter::Result<()> {
    let dim = 3;
    let domain = ConvexSetDesc::ball(Vector::zeros(dim), 3.0)?;
    let ball = ConvexSetDesc::ball(Vector::new(vec![0.5, 0.0, 0.0])?, 1.0)?;
    let plane = ConvexSetDesc::hyperplane(Vector::basis(dim, 2), 0.2)?;
    let ops = [
        OperatorDesc::reflection(ball.clone()),
        OperatorDesc::average(OperatorDesc::rotation2d(1.0, 0, 1)?, 0.25)?,
        OperatorDesc::compose(OperatorDesc::projection(ball), OperatorDesc::reflection(plane)),
        OperatorDesc::affine(Matrix::identity(dim).scaled(-0.5), Vector::new(vec![1.0, 0.0, 0.0])?)?,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for op in &ops {
        let ne = certify_nonexpansive(op, &domain, 2000, 3, 1e-10)?;
        print!("{:<12} nonexpansive {:<5} (worst ratio {:.6})", op.kind_name(), ne.certified, ne.worst_ratio);
        if let Some(fix) = op.known_fixed_set(dim) {
            let y = fix.project(&Vector::zeros(dim))?;
            let q = certify_quasinonexpansive(op, &domain, std::slice::from_ref(&y), 2000, 3, 1e-10)?;
            let probes: Vec<Vector> = (0..1000).map(|_| domain.sample(&mut rng, 1.0)).collect();
            let hs = check_fix_halfspace_characterization(op, &domain, &y, &probes, 1e-10)?;
            print!("  quasi {}  half-space test {}", q.certified, hs);
        }
        println!();
    }

    let expansion = OperatorDesc::affine(Matrix::identity(dim).scaled(1.5), Vector::zeros(dim));
    println!("1.5 I rejected: {}", expansion.unwrap_err());
    Ok(())
}
