//! Sampled radiality verdicts for catalog functions.

use radial::{catalog, check_radial, CheckConfig};

fn main() -> radial::Result<()> {
    let cases = [
        ("sqrt(1-x^2)", catalog::hemisphere(1)),
        ("|x|", catalog::absolute()),
        ("(x+1)^2+1/2", catalog::bumped_quadratic()),
        ("exp(-|x|)+1/2", catalog::exp_bump()),
        ("tent", catalog::polyhedral_tent()),
    ];
    for (name, f) in cases {
        let report = check_radial(&f, &CheckConfig::new(1).with_seed(7))?;
        println!("{name:>14}: {}", report.describe());
        if let Some(w) = report.witnesses.first() {
            println!(
                "{:>14}  perspective drops from {:.4e} to {:.4e} between v={:.4e} and v={:.4e} on y={:.4?}",
                "", w.p, w.p_next, w.v, w.v_next, w.y
            );
        }
    }
    Ok(())
}
