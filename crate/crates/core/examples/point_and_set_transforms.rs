//! Γ on points, halfspaces, boxes and ellipsoids, with a membership spot check.

use nalgebra::DMatrix;
use radial::{gamma_point, Ellipsoid, Halfspace, LiftedPoint, Polyhedron, RadialSet};

fn main() -> radial::Result<()> {
    let p = LiftedPoint::new(vec![2.0], 4.0)?;
    let q = gamma_point(&p)?;
    println!("Γ(2, 4) = ({}, {})", q.x[0], q.u);

    // u ≤ 1 becomes v ≥ 1.
    let cut = Halfspace::new(vec![0.0], 1.0, LiftedPoint::new(vec![0.0], 1.0)?)?;
    let image = cut.transform()?;
    println!(
        "u <= 1  ->  normal ({}, {}) through ({}, {})",
        image.normal_x[0], image.normal_u, image.anchor.x[0], image.anchor.u
    );

    let square = Polyhedron::lifted_box(&[-1.0], &[1.0], 1.0, 3.0)?;
    let square_image = square.transform()?;
    println!(
        "box [-1,1]x[1,3] maps to {} halfspaces",
        square_image.halfspaces.len()
    );

    let ball = Ellipsoid::new(LiftedPoint::new(vec![0.0], 2.0)?, DMatrix::identity(2, 2))?;
    let e = ball.transform()?;
    println!(
        "ellipsoid center ({}, {:.6})",
        e.center().x[0],
        e.center().u
    );
    println!("shape {:.6}", e.shape());

    // Off-boundary grid points keep their membership under Γ.
    let (mut agree, mut total) = (0, 0);
    for i in 0..100 {
        let x = -1.2 + 2.4 * (i as f64 + 0.37) / 100.0;
        for j in 0..100 {
            let pt = LiftedPoint::new(vec![x], 0.04 * (j as f64 + 0.61))?;
            total += 1;
            if ball.contains(&pt) == e.contains(&gamma_point(&pt)?) {
                agree += 1;
            }
        }
    }
    println!("membership agrees at {agree}/{total} points");
    Ok(())
}
