//! Maximizing a nonnegative function by minimizing its upper transform,
//! without and with a constraint set.

use radial::{
    catalog, optimality_product, solve_via_dual, solve_via_dual_constrained, SetOracle,
    SolverParams,
};

fn main() -> radial::Result<()> {
    let params = SolverParams::default();
    let f = catalog::shifted_parabola();

    let (dual, primal) = solve_via_dual(&f, &[5.0], &params)?;
    println!(
        "unconstrained: y*={:.8?} d*={} -> x*={:.8?} p*={} ({} iterations)",
        dual.y_star, dual.d_star, primal.x_star, primal.p_star, dual.iterations
    );
    println!("p*·d* = {}", optimality_product(primal.p_star, dual.d_star));

    let ball = SetOracle::ball(1, 0.5);
    let (dual, primal) = solve_via_dual_constrained(&f, &ball, &[5.0], &params)?;
    println!(
        "over |x| <= 0.5: x*={:.8?} p*={} ({} iterations)",
        primal.x_star, primal.p_star, dual.iterations
    );

    match solve_via_dual(&catalog::bumped_quadratic(), &[0.0], &params) {
        Err(e) => println!("(x+1)^2+1/2: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
