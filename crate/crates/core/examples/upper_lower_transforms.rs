//! Upper and lower transforms of a few one-dimensional functions.

use radial::{catalog, DualHandle, Sense, TransformSettings};

fn main() -> radial::Result<()> {
    let cases = [
        ("sqrt(1-x^2)", catalog::hemisphere(1)),
        ("exp(-|x|)+1/2", catalog::exp_bump()),
        ("|x|", catalog::absolute()),
        ("cap", catalog::cap()),
    ];
    println!("{:>16} {:>6} {:>14} {:>14}", "f", "y", "upper", "lower");
    for (name, f) in cases {
        let up = DualHandle::upper(f.clone());
        let lo = DualHandle::lower(f);
        for y in [-2.0, -0.5, 0.0, 1.0, 2.5] {
            println!(
                "{name:>16} {y:>6} {:>14} {:>14}",
                up.value(&[y])?.to_string(),
                lo.value(&[y])?.to_string()
            );
        }
    }

    // The bracket certifies the answer to the requested tolerance.
    let h = DualHandle::new(
        catalog::hemisphere(1),
        Sense::Upper,
        TransformSettings::default().with_tol(1e-6)?,
    )?;
    let ev = h.evaluate(&[1.0])?;
    println!(
        "sqrt(2) bracketed by {:?} in {} evaluations",
        ev.bracket, ev.evals
    );
    Ok(())
}
