//! Closed-form gradient and Hessian of the upper transform, checked against
//! finite differences of bisection values.

use radial::{dual_gradient, dual_hessian, parse_function, DualHandle};

fn main() -> radial::Result<()> {
    let f = parse_function("pos(2 - (x0-0.3)^2 - 3*(x1+0.2)^2 - x0*x1)", 2)?;
    let h = DualHandle::upper(f.clone()).with_tol(1e-15)?;
    let y = [0.4, -0.6];
    let d = h.value(&y)?.value();
    let g = dual_gradient(&f, &y, d)?;
    let hess = dual_hessian(&f, &y, d)?;

    let val = |a: f64, b: f64| h.value(&[a, b]).map(|v| v.value());
    let e = 1e-5;
    let fd_g = [
        (val(y[0] + e, y[1])? - val(y[0] - e, y[1])?) / (2.0 * e),
        (val(y[0], y[1] + e)? - val(y[0], y[1] - e)?) / (2.0 * e),
    ];
    println!("dual value      {d:.12}");
    println!("gradient        {:.9?}", g);
    println!("finite diff     {:.9?}", fd_g);

    let e = 1e-4;
    let c = val(y[0], y[1])?;
    let hxx = (val(y[0] + e, y[1])? - 2.0 * c + val(y[0] - e, y[1])?) / (e * e);
    let hyy = (val(y[0], y[1] + e)? - 2.0 * c + val(y[0], y[1] - e)?) / (e * e);
    let hxy = (val(y[0] + e, y[1] + e)? - val(y[0] + e, y[1] - e)? - val(y[0] - e, y[1] + e)?
        + val(y[0] - e, y[1] - e)?)
        / (4.0 * e * e);
    println!("hessian         {hess:.6}");
    println!("second diff     [[{hxx:.6}, {hxy:.6}], [{hxy:.6}, {hyy:.6}]]");
    Ok(())
}
