//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use radial::grid::linspace;
use radial::transform::duality_residuals;
use radial::{
    catalog, check_radial, dual_gradient, dual_hessian, duality_residual, fractional_map,
    gamma_point, gauge, general_transform, optimality_product, rule_kth, rule_linear, rule_max,
    rule_min, rule_scale, solve_via_dual, upper_value, CheckConfig, DualHandle, Ellipsoid, ExtPos,
    FunctionOracle, Halfspace, KthKind, LiftedPoint, Polyhedron, RadialSet, SetOracle,
    SolverParams, TransformSettings, Verdict,
};

use common::*;

// Tolerances, as stated per criterion.
const AC1_TOL: f64 = 1e-9;
const AC1_TIME: Duration = Duration::from_secs(1);
const AC2_TOL: f64 = 5e-10;
const AC2_TIME: Duration = Duration::from_secs(10);
const AC3_GAP: f64 = 0.1;
const AC4_REL: f64 = 1e-6;
const AC5_REL: f64 = 1e-5;
const AC5_EIG_FLOOR: f64 = -1e-9;
const AC6_SHAPE_TOL: f64 = 1e-12;
const AC6_ROUNDTRIP_TOL: f64 = 1e-9;
const AC8_TOL: f64 = 5e-10;
const AC9_TOL: f64 = 1e-9;
const AC9_HOMOGENEITY: f64 = 2e-10;
const AC10_TOL: f64 = 1e-6;
const AC10_PRODUCT_TOL: f64 = 5e-10;
const AC10_TIME: Duration = Duration::from_secs(5);
const AC11_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: radial::Error) -> String {
    format!("error: {e}")
}

/// Closed-form dual of the clamped hemisphere on 601 points of [-3, 3].
fn ac1() -> Outcome {
    let start = Instant::now();
    let h = DualHandle::upper(catalog::hemisphere(1));
    let mut worst: f64 = 0.0;
    for y in linspace(-3.0, 3.0, 601) {
        let v = upper_value(&h, &[y]).map_err(err)?.value();
        worst = worst.max((v - hemisphere_dual(&[y])).abs());
    }
    let t = start.elapsed();
    check(
        worst <= AC1_TOL && t < AC1_TIME,
        format!("max error {worst:.2e} (<= {AC1_TOL:e}), {t:.2?}"),
    )
}

/// f^ΓΓ = f on strictly radial functions.
fn ac2() -> Outcome {
    let start = Instant::now();
    let line = |lo, hi, n| {
        linspace(lo, hi, n)
            .into_iter()
            .map(|x| vec![x])
            .collect::<Vec<_>>()
    };
    let mut plane = Vec::new();
    for a in linspace(-1.5, 1.5, 50) {
        for b in linspace(-1.5, 1.5, 50) {
            plane.push(vec![a, b]);
        }
    }
    let cases: Vec<(&str, FunctionOracle, Vec<Vec<f64>>)> = vec![
        ("hemisphere", catalog::hemisphere(1), line(-3.0, 3.0, 601)),
        ("exp bump", catalog::exp_bump(), line(-3.0, 3.0, 601)),
        (
            "parabola",
            catalog::shifted_parabola(),
            line(-3.0, 3.0, 601),
        ),
        (
            "constant 2",
            catalog::constant(2.0, 1).map_err(err)?,
            line(-3.0, 3.0, 100),
        ),
        ("hemisphere 2-D", catalog::hemisphere(2), plane),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, f, grid) in cases {
        let r = duality_residual(&f, &grid).map_err(err)?;
        ok &= r <= AC2_TOL;
        parts.push(format!("{name} {r:.1e}"));
    }
    let t = start.elapsed();
    check(ok && t < AC2_TIME, format!("{}; {t:.2?}", parts.join(", ")))
}

/// The bumped quadratic is not recovered by its bidual.
fn ac3() -> Outcome {
    let f = catalog::bumped_quadratic();
    let grid: Vec<Vec<f64>> = linspace(-3.0, 1.0, 401)
        .into_iter()
        .map(|x| vec![x])
        .collect();
    let res = duality_residuals(&f, &grid, &TransformSettings::default().global()).map_err(err)?;
    let (i, gap) = res
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
    check(
        gap > AC3_GAP,
        format!("max residual {gap:.3} at x = {:.2}", grid[i][0]),
    )
}

fn fd_gradient(h: &DualHandle, y: &[f64], step: f64) -> radial::Result<Vec<f64>> {
    let mut p = y.to_vec();
    let mut g = Vec::new();
    for i in 0..y.len() {
        p[i] = y[i] + step;
        let a = h.value(&p)?.value();
        p[i] = y[i] - step;
        let b = h.value(&p)?.value();
        p[i] = y[i];
        g.push((a - b) / (2.0 * step));
    }
    Ok(g)
}

/// Gradient formula against central differences.
fn ac4() -> Outcome {
    let mut r = rng(4);
    let cases: Vec<(&str, FunctionOracle, f64)> = vec![
        ("hemisphere", catalog::hemisphere(1), 3.0),
        ("hemisphere 2-D", catalog::hemisphere(2), 3.0),
        ("exp bump", catalog::exp_bump(), 3.0),
        ("parabola", catalog::shifted_parabola(), 3.0),
        ("cap", catalog::cap(), 0.95),
    ];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (name, f, range) in cases {
        let h = DualHandle::upper(f.clone()).with_tol(1e-15).map_err(err)?;
        let mut taken = 0;
        while taken < 100 {
            let y: Vec<f64> = (0..f.dim())
                .map(|_| uniform(&mut r, -range, range))
                .collect();
            // Stay off the kink of the exp bump.
            if y.iter().all(|c| c.abs() < 1e-3) {
                continue;
            }
            let d = h.value(&y).map_err(err)?.value();
            let g = dual_gradient(&f, &y, d).map_err(|e| format!("{name} at {y:?}: {e}"))?;
            let fd = fd_gradient(&h, &y, 1e-5).map_err(err)?;
            let scale = g.iter().fold(1.0f64, |m, c| m.max(c.abs()));
            for (a, b) in g.iter().zip(&fd) {
                worst = worst.max((a - b).abs() / scale);
            }
            taken += 1;
            count += 1;
        }
    }
    check(
        worst <= AC4_REL,
        format!("{count} points, max relative error {worst:.2e}"),
    )
}

/// Hessian formula against second differences, and convexity of duals of
/// concave functions.
fn ac5() -> Outcome {
    let mut r = rng(5);
    let quad =
        radial::parse_function("pos(2 - (x0-0.3)^2 - 3*(x1+0.2)^2 - x0*x1)", 2).map_err(err)?;
    let cases: Vec<(&str, FunctionOracle, f64)> = vec![
        ("hemisphere", catalog::hemisphere(1), 3.0),
        ("hemisphere 2-D", catalog::hemisphere(2), 2.0),
        ("parabola", catalog::shifted_parabola(), 3.0),
        ("concave quadratic", quad, 1.0),
    ];
    let mut worst: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    let e = 2e-4;
    for (name, f, range) in cases {
        let h = DualHandle::upper(f.clone()).with_tol(1e-15).map_err(err)?;
        let n = f.dim();
        for _ in 0..50 {
            let y: Vec<f64> = (0..n).map(|_| uniform(&mut r, -range, range)).collect();
            let d = h.value(&y).map_err(err)?.value();
            let hess = dual_hessian(&f, &y, d).map_err(|e| format!("{name} at {y:?}: {e}"))?;
            let val = |p: &[f64]| h.value(p).map(ExtPos::value);
            let mut fd = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let at = |si: f64, sj: f64| {
                        let mut p = y.clone();
                        p[i] += si * e;
                        p[j] += sj * e;
                        val(&p)
                    };
                    fd[(i, j)] = if i == j {
                        (at(1.0, 0.0).map_err(err)? - 2.0 * d + at(-1.0, 0.0).map_err(err)?)
                            / (e * e)
                    } else {
                        (at(1.0, 1.0).map_err(err)?
                            - at(1.0, -1.0).map_err(err)?
                            - at(-1.0, 1.0).map_err(err)?
                            + at(-1.0, -1.0).map_err(err)?)
                            / (4.0 * e * e)
                    };
                }
            }
            let scale = hess.amax().max(1.0);
            worst = worst.max((&hess - &fd).amax() / scale);
            min_eig = min_eig.min(radial::linalg::min_eigenvalue(&hess));
        }
    }
    check(
        worst <= AC5_REL && min_eig >= AC5_EIG_FLOOR,
        format!("200 points, max relative error {worst:.2e}, min eigenvalue {min_eig:.3e}"),
    )
}

/// The worked ellipsoid, membership under Γ and the double transform.
fn ac6() -> Outcome {
    let e = Ellipsoid::new(
        LiftedPoint::new(vec![0.0], 2.0).unwrap(),
        DMatrix::identity(2, 2),
    )
    .map_err(err)?;
    let img = e.transform().map_err(err)?;
    let expected = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 9.0]);
    let shape_err = (img.shape() - &expected).amax();
    let center_err = img.center().x[0]
        .abs()
        .max((img.center().u - 2.0 / 3.0).abs());
    let mut r = rng(6);
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let p =
            LiftedPoint::new(vec![uniform(&mut r, -1.5, 1.5)], uniform(&mut r, 0.5, 3.5)).unwrap();
        if e.contains(&p) != img.contains(&gamma_point(&p).map_err(err)?) {
            mismatches += 1;
        }
    }
    let back = img.transform().map_err(err)?;
    let round = (back.shape() - e.shape())
        .amax()
        .max((back.center().u - 2.0).abs())
        .max(back.center().x[0].abs());
    check(
        shape_err <= AC6_SHAPE_TOL
            && center_err <= AC6_SHAPE_TOL
            && mismatches == 0
            && round <= AC6_ROUNDTRIP_TOL,
        format!(
            "shape error {shape_err:.1e}, center error {center_err:.1e}, {mismatches} mismatches, round trip {round:.1e}"
        ),
    )
}

/// Halfspace and polyhedron membership under Γ.
fn ac7() -> Outcome {
    type Test = Box<dyn Fn(&LiftedPoint) -> (bool, bool)>;
    let mut r = rng(7);
    let mut instances: Vec<(usize, Test)> = Vec::new();
    for _ in 0..5 {
        let anchor = LiftedPoint::new(
            vec![uniform(&mut r, -1.0, 1.0), uniform(&mut r, -1.0, 1.0)],
            uniform(&mut r, 0.5, 2.0),
        )
        .map_err(err)?;
        let normal = vec![uniform(&mut r, -2.0, 2.0), uniform(&mut r, -2.0, 2.0)];
        let h = Halfspace::new(normal, uniform(&mut r, -2.0, 2.0), anchor).map_err(err)?;
        let img = h.transform().map_err(err)?;
        instances.push((
            2,
            Box::new(move |p| (h.contains(p), img.contains(&gamma_point(p).unwrap()))),
        ));
    }
    let square = Polyhedron::lifted_box(&[-1.0], &[1.0], 1.0, 3.0).map_err(err)?;
    let img = square.transform().map_err(err)?;
    let faces = img.halfspaces.len();
    instances.push((
        1,
        Box::new(move |p| (square.contains(p), img.contains(&gamma_point(p).unwrap()))),
    ));
    let cube =
        Polyhedron::lifted_box(&[-1.0, -0.5, 0.0], &[0.5, 2.0, 1.0], 0.5, 2.5).map_err(err)?;
    let cimg = cube.transform().map_err(err)?;
    instances.push((
        3,
        Box::new(move |p| (cube.contains(p), cimg.contains(&gamma_point(p).unwrap()))),
    ));

    let mut mismatches = 0;
    let mut inside = 0;
    for (dim, test) in &instances {
        for _ in 0..10_000 {
            let x: Vec<f64> = (0..*dim).map(|_| uniform(&mut r, -3.0, 3.0)).collect();
            let p = LiftedPoint::new(x, uniform(&mut r, 0.05, 4.0)).map_err(err)?;
            let (a, b) = test(&p);
            mismatches += usize::from(a != b);
            inside += usize::from(a);
        }
    }
    check(
        mismatches == 0 && faces == 4,
        format!(
            "{} instances x 10^4 points ({inside} inside), {mismatches} mismatches; box image has {faces} faces",
            instances.len()
        ),
    )
}

fn max_gap(
    rule: &FunctionOracle,
    direct: impl Fn(&[f64]) -> f64,
    grid: &[Vec<f64>],
) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for y in grid {
        let a = rule.eval(y).map_err(err)?.value();
        let b = upper_by_bisection(&direct, y);
        let gap = if a.is_infinite() && b.is_infinite() {
            0.0
        } else {
            relative(a, b)
        };
        worst = worst.max(gap);
    }
    Ok(worst)
}

/// Transform rules against bisection of the composed primal.
fn ac8() -> Outcome {
    let grid: Vec<Vec<f64>> = linspace(-2.5, 2.5, 100)
        .into_iter()
        .map(|y| vec![y])
        .collect();
    let hd = DualHandle::upper(catalog::hemisphere(1));
    let ed = DualHandle::upper(catalog::exp_bump());
    let pd = DualHandle::upper(catalog::shifted_parabola());
    let td = DualHandle::upper(catalog::polyhedral_tent());
    let three = [hd.clone(), ed.clone(), pd.clone()];
    let vals3 = |x: &[f64]| {
        let mut v = [hemisphere(x), exp_bump(x), parabola(x)];
        v.sort_by(f64::total_cmp);
        v
    };

    let mut results: Vec<(&str, f64)> = Vec::new();
    results.push((
        "scale",
        max_gap(
            &rule_scale(2.5, &ed).map_err(err)?,
            |x| 2.5 * exp_bump(x),
            &grid,
        )?,
    ));
    let a = DMatrix::from_row_slice(2, 1, &[0.6, -0.3]);
    let lin = rule_linear(&a, &DualHandle::upper(catalog::hemisphere(2))).map_err(err)?;
    results.push((
        "linear",
        max_gap(&lin, |x| hemisphere(&[0.6 * x[0], -0.3 * x[0]]), &grid)?,
    ));
    results.push((
        "min",
        max_gap(
            &rule_min(&hd, &td).map_err(err)?,
            |x| hemisphere(x).min(tent(x)),
            &grid,
        )?,
    ));
    results.push((
        "max",
        max_gap(
            &rule_max(&ed, &pd).map_err(err)?,
            |x| exp_bump(x).max(parabola(x)),
            &grid,
        )?,
    ));
    for k in 1..=3 {
        let kmin = rule_kth(KthKind::KMin, k, &three).map_err(err)?;
        results.push(("k-min", max_gap(&kmin, |x| vals3(x)[k - 1], &grid)?));
        let kmax = rule_kth(KthKind::KMax, k, &three).map_err(err)?;
        results.push(("k-max", max_gap(&kmax, |x| vals3(x)[3 - k], &grid)?));
        let kminavg = rule_kth(KthKind::KMinAvg, k, &three).map_err(err)?;
        results.push((
            "k-min-avg",
            max_gap(
                &kminavg,
                |x| vals3(x)[..k].iter().sum::<f64>() / k as f64,
                &grid,
            )?,
        ));
        let kmaxavg = rule_kth(KthKind::KMaxAvg, k, &three).map_err(err)?;
        results.push((
            "k-max-avg",
            max_gap(
                &kmaxavg,
                |x| vals3(x)[3 - k..].iter().sum::<f64>() / k as f64,
                &grid,
            )?,
        ));
    }
    let (name, worst) = results
        .iter()
        .copied()
        .fold(("", 0.0), |acc, r| if r.1 >= acc.1 { r } else { acc });
    check(
        worst <= AC8_TOL,
        format!("{} rule instances, worst {name} {worst:.1e}", results.len()),
    )
}

/// Gauge of the unit ball and positive homogeneity.
fn ac9() -> Outcome {
    let mut r = rng(9);
    let ball = SetOracle::ball(3, 1.0);
    let poly = SetOracle::polytope(
        vec![
            vec![1.0, 1.0, 0.0],
            vec![-1.0, 0.0, 0.5],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, -1.0],
            vec![0.0, 0.0, 1.0],
        ],
        vec![1.0, 0.5, 0.5, 2.0, 1.0],
    )
    .map_err(err)?;
    let (mut worst, mut homog): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let y: Vec<f64> = (0..3).map(|_| uniform(&mut r, -5.0, 5.0)).collect();
        let norm = y.iter().map(|c| c * c).sum::<f64>().sqrt();
        let g = gauge(&ball, &y).map_err(err)?.value();
        worst = worst.max((g - norm).abs());
        let lambda = uniform(&mut r, 0.1, 10.0);
        let ly: Vec<f64> = y.iter().map(|c| lambda * c).collect();
        for s in [&ball, &poly] {
            let a = gauge(s, &ly).map_err(err)?.value();
            let b = lambda * gauge(s, &y).map_err(err)?.value();
            homog = homog.max(relative(a, b));
        }
    }
    check(
        worst <= AC9_TOL && homog <= AC9_HOMOGENEITY,
        format!("max |gauge - norm| {worst:.1e}, homogeneity {homog:.1e}"),
    )
}

/// Solving through the dual, and sup f · inf f^Γ = 1.
fn ac10() -> Outcome {
    let start = Instant::now();
    let params = SolverParams::default();
    let (dual, primal) =
        solve_via_dual(&catalog::shifted_parabola(), &[5.0], &params).map_err(err)?;
    let x_err = (primal.x_star[0] - 1.0).abs();
    let p_err = (primal.p_star.value() - 2.0).abs();
    let d_err = (dual.d_star.value() - 0.5).abs();

    // (function, sup f, start)
    let catalog: Vec<(&str, FunctionOracle, f64, Vec<f64>)> = vec![
        ("hemisphere", catalog::hemisphere(1), 1.0, vec![2.0]),
        (
            "hemisphere 2-D",
            catalog::hemisphere(2),
            1.0,
            vec![2.0, -1.0],
        ),
        ("parabola", catalog::shifted_parabola(), 2.0, vec![-3.0]),
        ("exp bump", catalog::exp_bump(), 1.5, vec![1.0]),
        (
            "constant 2",
            catalog::constant(2.0, 1).map_err(err)?,
            2.0,
            vec![1.0],
        ),
        ("cap", catalog::cap(), 2.0, vec![0.7]),
        ("tent", catalog::polyhedral_tent(), 2.0, vec![0.9]),
    ];
    let mut worst: f64 = 0.0;
    let mut worst_name = "";
    for (name, f, sup, y0) in catalog {
        let (d, _) = solve_via_dual(&f, &y0, &params).map_err(|e| format!("{name}: {e}"))?;
        let prod = optimality_product(ExtPos::finite(sup).map_err(err)?, d.d_star);
        let gap = (prod.value() - 1.0).abs();
        if gap >= worst {
            worst = gap;
            worst_name = name;
        }
    }
    let t = start.elapsed();
    check(
        x_err <= AC10_TOL && p_err <= AC10_TOL && worst <= AC10_PRODUCT_TOL && t < AC10_TIME,
        format!(
            "x* error {x_err:.1e}, p* error {p_err:.1e}, d* error {d_err:.1e}; worst |p*d* - 1| {worst:.1e} ({worst_name}); {t:.2?}"
        ),
    )
}

/// Fractional-linear transform identity and the epigraph/hypograph relation.
fn ac11() -> Outcome {
    let mut r = rng(11);
    let f = catalog::hemisphere(2);
    let base = DualHandle::upper(f.clone());
    let (mut worst, mut violations, mut pairs, mut tries) = (0.0f64, 0, 0, 0);
    while pairs < 10 {
        tries += 1;
        let a = DMatrix::from_fn(2, 2, |_, _| uniform(&mut r, -2.0, 2.0));
        let sv = a.clone().singular_values();
        if sv.min() <= 0.0 || sv.max() / sv.min() > 1e3 {
            continue;
        }
        pairs += 1;
        let alpha = [uniform(&mut r, -1.0, 1.0), uniform(&mut r, -1.0, 1.0)];
        let d = uniform(&mut r, 0.1, 10.0);
        let g = general_transform(&a, &alpha, d, &base).map_err(err)?;
        let inv = a.clone().try_inverse().ok_or("singular draw")?;
        for _ in 0..100 {
            let y = nalgebra::DVector::from_fn(2, |_, _| uniform(&mut r, -3.0, 3.0));
            let z = &inv * (&y - nalgebra::DVector::from_column_slice(&alpha));
            let expected = hemisphere_dual(z.as_slice()) / d;
            let got = g.eval(y.as_slice()).map_err(err)?.value();
            worst = worst.max(relative(got, expected));
            // An epigraph point of f.
            let x = [uniform(&mut r, -1.2, 1.2), uniform(&mut r, -1.2, 1.2)];
            let u = hemisphere(&x) + uniform(&mut r, 0.01, 2.0);
            let img = fractional_map(
                &a,
                &alpha,
                d,
                &LiftedPoint::new(x.to_vec(), u).map_err(err)?,
            )
            .map_err(err)?;
            let gy = g.eval(&img.x).map_err(err)?.value();
            if img.u > gy * (1.0 + 1e-12) {
                violations += 1;
            }
        }
    }
    check(
        worst <= AC11_TOL && violations == 0,
        format!(
            "{pairs} maps ({tries} draws), max relative error {worst:.1e}, {violations}/1000 epigraph images outside the hypograph"
        ),
    )
}

/// Sampled verdicts across ten seeds.
fn ac12() -> Outcome {
    let cases: Vec<(&str, FunctionOracle, Verdict, Option<bool>)> = vec![
        (
            "hemisphere",
            catalog::hemisphere(1),
            Verdict::Radial,
            Some(true),
        ),
        ("|x|", catalog::absolute(), Verdict::Radial, Some(false)),
        (
            "(x+1)^2+1/2",
            catalog::bumped_quadratic(),
            Verdict::NotRadial,
            None,
        ),
    ];
    let mut wrong = Vec::new();
    for seed in 0..10 {
        for (name, f, verdict, strict) in &cases {
            let rep = check_radial(f, &CheckConfig::new(1).with_seed(seed)).map_err(err)?;
            let strict_ok = strict.is_none_or(|s| rep.strict == Some(s));
            if rep.verdict != *verdict || !strict_ok {
                wrong.push(format!("{name} seed {seed}: {}", rep.describe()));
            }
        }
    }
    check(
        wrong.is_empty(),
        if wrong.is_empty() {
            "30 runs, 0 misclassifications".into()
        } else {
            wrong.join("; ")
        },
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("AC1 closed-form dual of the hemisphere", ac1),
        ("AC2 bidual recovers strictly radial functions", ac2),
        ("AC3 bidual gap for a non-radial quadratic", ac3),
        ("AC4 dual gradient formula", ac4),
        ("AC5 dual Hessian formula and convexity", ac5),
        ("AC6 ellipsoid transform", ac6),
        ("AC7 halfspace and polyhedron transforms", ac7),
        ("AC8 transform rules", ac8),
        ("AC9 gauge of the unit ball", ac9),
        ("AC10 optimality correspondence", ac10),
        ("AC11 fractional-linear transform", ac11),
        ("AC12 radiality verdicts", ac12),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{t:.2?}]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} [{t:.2?}]");
            }
        }
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
