//! Transform rules for scaling, composition with a linear map, minima,
//! maxima and k-th order statistics, compared with direct bisection.

use nalgebra::DMatrix;
use radial::{
    catalog, check_radial, parse_function, rule_kth, rule_linear, rule_max, rule_min, rule_scale,
    CheckConfig, DualHandle, FunctionOracle, KthKind,
};

fn compare(name: &str, rule: &FunctionOracle, direct: &FunctionOracle) -> radial::Result<()> {
    let direct = DualHandle::upper(direct.clone());
    let mut worst: f64 = 0.0;
    for i in 0..=20 {
        let y = -2.0 + 0.2 * i as f64;
        let a = rule.eval(&[y])?;
        let b = direct.value(&[y])?;
        worst = worst.max(a.distance(b));
    }
    println!("{name:>8}: max gap {worst:.2e}");
    Ok(())
}

fn main() -> radial::Result<()> {
    let f = catalog::hemisphere(1);
    let g = catalog::exp_bump();
    let (fd, gd) = (DualHandle::upper(f.clone()), DualHandle::upper(g.clone()));

    let scaled = FunctionOracle::new(1, |x| 3.0 * (1.0 - x[0] * x[0]).max(0.0).sqrt());
    compare("scale", &rule_scale(3.0, &fd)?, &scaled)?;

    let a = DMatrix::from_row_slice(1, 1, &[0.5]);
    let composed = FunctionOracle::new(1, |x| (1.0 - 0.25 * x[0] * x[0]).max(0.0).sqrt());
    compare("linear", &rule_linear(&a, &fd)?, &composed)?;

    let (f2, g2) = (f.clone(), g.clone());
    let lower = FunctionOracle::try_new(1, move |x| Ok(f2.eval(x)?.min(g2.eval(x)?)));
    compare("min", &rule_min(&fd, &gd)?, &lower)?;
    let (f3, g3) = (f.clone(), g.clone());
    let upper = FunctionOracle::try_new(1, move |x| Ok(f3.eval(x)?.max(g3.eval(x)?)));
    compare("max", &rule_max(&fd, &gd)?, &upper)?;

    // Parsed functions carry no radiality claim; the sampled check supplies one.
    let h = parse_function("pos(1 + 0.5*x0)", 1)?;
    let report = check_radial(&h, &CheckConfig::new(1))?;
    let hd = DualHandle::upper(h.with_meta(report.to_meta()));
    let middle = parse_function("max(min(pos(sqrt(1-x0^2)), exp(-abs(x0))+0.5), min(max(pos(sqrt(1-x0^2)), exp(-abs(x0))+0.5), pos(1+0.5*x0)))", 1)?;
    let duals = [fd.clone(), gd.clone(), hd];
    compare("2nd-min", &rule_kth(KthKind::KMin, 2, &duals)?, &middle)?;
    Ok(())
}
