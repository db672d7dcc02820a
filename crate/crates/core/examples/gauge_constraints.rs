//! Gauges of convex sets as transforms of their indicators.

use radial::{gauge, DualHandle, SetOracle};

fn main() -> radial::Result<()> {
    let ball = SetOracle::ball(2, 1.0);
    let square = SetOracle::boxed(vec![-1.0, -1.0], vec![1.0, 1.0])?;
    let triangle = SetOracle::polytope(
        vec![vec![1.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]],
        vec![1.0, 0.5, 0.5],
    )?;
    for y in [[3.0, 4.0], [0.5, -2.0], [0.2, 0.2]] {
        println!(
            "y={y:?}: ball {}  box {}  triangle {}",
            gauge(&ball, &y)?,
            gauge(&square, &y)?,
            gauge(&triangle, &y)?
        );
    }

    // The same value through the generic upper transform of the indicator.
    let via_indicator = DualHandle::upper(ball.indicator());
    println!(
        "indicator transform at (3,4): {}",
        via_indicator.value(&[3.0, 4.0])?
    );

    let off_center = SetOracle::boxed(vec![1.0], vec![2.0])?;
    match off_center.gauge_handle() {
        Err(e) => println!("box [1,2]: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
