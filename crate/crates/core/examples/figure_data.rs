//! Point clouds for plotting: a function with its transforms and bidual,
//! and the image of the curve u = 2 + sin x under Γ.

use radial::grid::{linspace, tabulate, Emit, GridSpec};
use radial::{catalog, gamma_point, LiftedPoint, TransformSettings};

fn main() -> radial::Result<()> {
    let spec: GridSpec = "-3:3:13".parse()?;
    let emit: Emit = "primal,dual,lower,bidual".parse()?;
    let table = tabulate(
        &catalog::exp_bump(),
        &spec,
        emit,
        &TransformSettings::default(),
    )?;
    print!("{}", table.to_csv());

    println!("\nx,u,y,v");
    for x in linspace(-10.0, 10.0, 21) {
        let p = LiftedPoint::new(vec![x], 2.0 + x.sin())?;
        let q = gamma_point(&p)?;
        println!("{x},{:.6},{:.6},{:.6}", p.u, q.x[0], q.u);
    }
    Ok(())
}
