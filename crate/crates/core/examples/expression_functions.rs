//! Functions given as text: parsing, evaluation, derivatives and error
//! reporting.

use radial::expr::Expr;
use radial::{gradient, parse_function, DualHandle};

fn main() -> radial::Result<()> {
    let f = parse_function("pos(sqrt(1 - x0^2 - 0.5*x1^2))", 2)?;
    println!("{} at (0.3, 0.4) = {}", f.label(), f.eval(&[0.3, 0.4])?);
    println!("gradient {:?}", gradient(&f, &[0.3, 0.4])?);
    println!("hessian {:.4}", f.hessian(&[0.3, 0.4])?);
    println!(
        "upper transform at (1, 1) = {}",
        DualHandle::upper(f).value(&[1.0, 1.0])?
    );

    let e = Expr::parse("max(2, x0)*ball(1) + exp(-abs(x1))", 2)?;
    println!("parsed back: {e}");

    for bad in ["max(", "foo(x0)", "x3 + 1", "min(x0)"] {
        match parse_function(bad, 2) {
            Err(err) => println!("{bad:>10}: {err}"),
            Ok(_) => println!("{bad:>10}: accepted"),
        }
    }
    Ok(())
}
