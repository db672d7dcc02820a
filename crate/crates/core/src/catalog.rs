//! Analytic test functions with known radiality and, where available,
//! closed-form transforms.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ext::{dot, ExtPos};
use crate::function::{FunctionOracle, RadialityMeta};

/// `√(1 − ‖x‖²)` on the open unit ball, `0` elsewhere. Strictly radial with
/// transform `√(1 + ‖y‖²)`.
pub fn hemisphere(dim: usize) -> FunctionOracle {
    let value = |x: &[f64]| {
        let r2 = dot(x, x);
        if r2 < 1.0 {
            (1.0 - r2).sqrt()
        } else {
            0.0
        }
    };
    FunctionOracle::new(dim, value)
        .with_gradient(move |x| {
            let f = value(x);
            if f <= 0.0 {
                return Err(Error::OutsideDomain);
            }
            Ok(x.iter().map(|c| -c / f).collect())
        })
        .with_hessian(move |x| {
            let f = value(x);
            if f <= 0.0 {
                return Err(Error::OutsideDomain);
            }
            let n = x.len();
            let f3 = f * f * f;
            Ok(DMatrix::from_fn(n, n, |i, j| {
                let d = if i == j { -1.0 / f } else { 0.0 };
                d - x[i] * x[j] / f3
            }))
        })
        .with_meta(RadialityMeta::STRICT)
        .with_label("sqrt(1 - |x|^2)")
}

/// `e^{−|x|} + 1/2` on the line. Strictly radial, neither concave nor
/// convex, with a kink at the origin.
pub fn exp_bump() -> FunctionOracle {
    FunctionOracle::new(1, |x| (-x[0].abs()).exp() + 0.5)
        .with_gradient(|x| {
            if x[0] == 0.0 {
                return Err(Error::NotDifferentiable);
            }
            Ok(vec![-x[0].signum() * (-x[0].abs()).exp()])
        })
        .with_hessian(|x| {
            if x[0] == 0.0 {
                return Err(Error::NotDifferentiable);
            }
            Ok(DMatrix::from_element(1, 1, (-x[0].abs()).exp()))
        })
        .with_meta(RadialityMeta::STRICT)
        .with_label("exp(-|x|) + 1/2")
}

/// `max(2 − (x − 1)², 0)`. Strictly radial and concave on its domain, with
/// maximum `2` at `x = 1`.
pub fn shifted_parabola() -> FunctionOracle {
    FunctionOracle::new(1, |x| {
        let v = 2.0 - (x[0] - 1.0).powi(2);
        if v > 0.0 {
            v
        } else {
            0.0
        }
    })
    .with_gradient(|x| Ok(vec![-2.0 * (x[0] - 1.0)]))
    .with_hessian(|_| Ok(DMatrix::from_element(1, 1, -2.0)))
    .with_meta(RadialityMeta::STRICT)
    .with_label("max(2 - (x - 1)^2, 0)")
}

/// Closed-form transform of [`shifted_parabola`]: the positive root of
/// `v² + (2y − 1)v − y² = 0`.
pub fn shifted_parabola_dual(y: f64) -> f64 {
    let b = 2.0 * y - 1.0;
    0.5 * (-b + (b * b + 4.0 * y * y).sqrt())
}

/// The constant `c > 0`; transform `1/c`.
pub fn constant(c: f64, dim: usize) -> Result<FunctionOracle> {
    ExtPos::finite(c)?;
    Ok(FunctionOracle::new(dim, move |_| c)
        .with_gradient(move |x| Ok(vec![0.0; x.len()]))
        .with_hessian(move |x| Ok(DMatrix::zeros(x.len(), x.len())))
        .with_meta(RadialityMeta::STRICT)
        .with_label(format!("{c}")))
}

/// `|x|`: radial but not strictly. Upper transform is `∞` on `[−1, 1]` and
/// `0` outside; the lower transform is `∞` only on the open interval.
pub fn absolute() -> FunctionOracle {
    FunctionOracle::new(1, |x| x[0].abs())
        .with_gradient(|x| {
            if x[0] == 0.0 {
                Err(Error::NotDifferentiable)
            } else {
                Ok(vec![x[0].signum()])
            }
        })
        .with_meta(RadialityMeta::RADIAL)
        .with_label("|x|")
}

/// `(x + 1)² + 1/2`: not upper radial. Its perspective decreases in `v`
/// along rays through `|x| > √1.5`.
pub fn bumped_quadratic() -> FunctionOracle {
    FunctionOracle::new(1, |x| (x[0] + 1.0).powi(2) + 0.5)
        .with_gradient(|x| Ok(vec![2.0 * (x[0] + 1.0)]))
        .with_hessian(|_| Ok(DMatrix::from_element(1, 1, 2.0)))
        .with_meta(RadialityMeta::NOT_RADIAL)
        .with_label("(x + 1)^2 + 1/2")
}

/// `1 + √(1 − x²)` on `[−1, 1]`, `0` elsewhere. Its transform
/// `(y² + 1)/2` on `[−1, 1]` and `|y|` outside is differentiable everywhere
/// although the primal is not differentiable at `±1`.
pub fn cap() -> FunctionOracle {
    FunctionOracle::new(1, |x| {
        if x[0].abs() <= 1.0 {
            1.0 + (1.0 - x[0] * x[0]).sqrt()
        } else {
            0.0
        }
    })
    .with_gradient(|x| {
        if x[0].abs() >= 1.0 {
            return Err(Error::NotDifferentiable);
        }
        Ok(vec![-x[0] / (1.0 - x[0] * x[0]).sqrt()])
    })
    .with_meta(RadialityMeta::STRICT)
    .with_label("1 + sqrt(1 - x^2)")
}

pub fn cap_dual(y: f64) -> f64 {
    if y.abs() <= 1.0 {
        0.5 * (y * y + 1.0)
    } else {
        y.abs()
    }
}

/// `max(min(2 − x, 2 + x), 0)`: concave polyhedral on its domain, with
/// transform `(1 + |y|)/2`.
pub fn polyhedral_tent() -> FunctionOracle {
    FunctionOracle::new(1, |x| (2.0 - x[0].abs()).max(0.0))
        .with_gradient(|x| {
            if x[0] == 0.0 {
                Err(Error::NotDifferentiable)
            } else {
                Ok(vec![-x[0].signum()])
            }
        })
        .with_meta(RadialityMeta::STRICT)
        .with_label("min(2 - x, 2 + x)")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::gradient;

    #[test]
    fn values() {
        assert_eq!(hemisphere(1).value(&[0.0]).unwrap(), 1.0);
        assert_eq!(hemisphere(2).eval(&[1.0, 0.0]).unwrap(), ExtPos::Zero);
        assert_eq!(exp_bump().value(&[0.0]).unwrap(), 1.5);
        assert_eq!(shifted_parabola().value(&[1.0]).unwrap(), 2.0);
        assert_eq!(shifted_parabola().eval(&[5.0]).unwrap(), ExtPos::Zero);
        assert_eq!(cap().value(&[1.0]).unwrap(), 1.0);
        assert_eq!(polyhedral_tent().value(&[0.5]).unwrap(), 1.5);
        assert!(constant(0.0, 1).is_err());
        assert!((shifted_parabola_dual(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn analytic_gradients_match_differences() {
        let eval_fd = |f: &FunctionOracle, x: &[f64]| {
            crate::function::central_difference(&|p: &[f64]| f.eval(p), x).unwrap()
        };
        for (f, x) in [
            (hemisphere(2), vec![0.3, -0.4]),
            (exp_bump(), vec![0.7]),
            (shifted_parabola(), vec![0.2]),
            (cap(), vec![-0.5]),
            (bumped_quadratic(), vec![-2.0]),
        ] {
            let a = gradient(&f, &x).unwrap();
            let d = eval_fd(&f, &x);
            for (ai, di) in a.iter().zip(&d) {
                assert!((ai - di).abs() <= 1e-6 * ai.abs().max(1.0), "{}", f.label());
            }
        }
    }
}
