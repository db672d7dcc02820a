//! Fractional-linear maps and the transform they induce on functions.

use nalgebra::DMatrix;
use radial::{catalog, fractional_map, general_transform, DualHandle, LiftedPoint};

fn main() -> radial::Result<()> {
    let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, -0.3, 1.0]);
    let alpha = [0.4, -1.0];
    let d = 2.5;
    let f = catalog::hemisphere(2);
    let g = general_transform(&a, &alpha, d, &DualHandle::upper(f.clone()))?;

    // An epigraph point of f lands in the hypograph of g.
    for x in [[0.1, 0.2], [-0.5, 0.3], [0.0, 0.0]] {
        let u = f.value(&x)? * 1.3;
        let image = fractional_map(&a, &alpha, d, &LiftedPoint::new(x.to_vec(), u)?)?;
        let gy = g.value(&image.x)?;
        println!(
            "({:?}, {u:.3}) -> ({:.4?}, {:.4}); g there = {gy:.4}; below: {}",
            x,
            image.x,
            image.u,
            image.u <= gy
        );
    }
    Ok(())
}
