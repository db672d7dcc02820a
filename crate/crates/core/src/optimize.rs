//! Primal/dual solution correspondences and a small descent solver that
//! maximizes `f` by minimizing its upper transform.

use serde::Serialize;

use crate::calculus::{dual_gradient, SetOracle};
use crate::error::{Error, Result};
use crate::ext::{gamma_point, norm, ExtPos, LiftedPoint};
use crate::function::{gradient, FunctionOracle, Tri};
use crate::transform::{check_radial, CheckConfig, DualHandle, Sense, TransformSettings, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Certificate {
    /// Obtained from a dual solution through the point transform.
    Mapped,
    /// Obtained by evaluating `f` directly.
    DirectEval,
}

/// A candidate for `p* = max f(x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimalSolution {
    pub x_star: Vec<f64>,
    pub p_star: ExtPos,
    pub certificate: Certificate,
}

/// A candidate for `d* = min f^Γ(y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualSolution {
    pub y_star: Vec<f64>,
    pub d_star: ExtPos,
    pub iterations: usize,
    /// Norm of the final descent direction; `None` when the solution was
    /// not produced by the solver.
    pub grad_norm: Option<f64>,
}

/// `(x*, p*) = Γ(y*, d*)`.
pub fn map_dual_to_primal(s: &DualSolution) -> Result<PrimalSolution> {
    let d = s.d_star.as_finite().ok_or(Error::InfiniteValue)?;
    let p = gamma_point(&LiftedPoint::new(s.y_star.clone(), d)?)?;
    Ok(PrimalSolution {
        x_star: p.x,
        p_star: ExtPos::finite(p.u)?,
        certificate: Certificate::Mapped,
    })
}

/// `(y*, d*) = Γ(x*, p*)`.
pub fn map_primal_to_dual(s: &PrimalSolution) -> Result<DualSolution> {
    let p = s.p_star.as_finite().ok_or(Error::InfiniteValue)?;
    let d = gamma_point(&LiftedPoint::new(s.x_star.clone(), p)?)?;
    Ok(DualSolution {
        y_star: d.x,
        d_star: ExtPos::finite(d.u)?,
        iterations: 0,
        grad_norm: None,
    })
}

/// Image of a primal stationary point.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryImage {
    pub y: Vec<f64>,
    pub dual_value: f64,
    /// `∇f^Γ(y)` from the closed-form dual gradient; zero up to roundoff.
    pub dual_gradient: Vec<f64>,
}

/// Gradient norm above which a point is not considered stationary.
pub const STATIONARY_TOL: f64 = 1e-8;

/// Maps a stationary point `x` of `f` to `(y, f^Γ(y)) = Γ(x, f(x))`, with
/// the dual gradient at `y` as witness.
pub fn map_stationary(x: &[f64], f: &FunctionOracle) -> Result<StationaryImage> {
    if f.meta().upper_radial == Tri::No {
        return Err(Error::RadialityRequired);
    }
    let fx = f.eval(x)?.as_finite().ok_or(Error::InfiniteValue)?;
    let g = gradient(f, x)?;
    let gn = norm(&g);
    if gn > STATIONARY_TOL {
        return Err(Error::NotStationary(gn));
    }
    let p = gamma_point(&LiftedPoint::new(x.to_vec(), fx)?)?;
    let dg = dual_gradient(f, &p.x, p.u)?;
    Ok(StationaryImage {
        y: p.x,
        dual_value: p.u,
        dual_gradient: dg,
    })
}

/// Parameters of [`solve_via_dual`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    /// Iteration budget.
    pub budget: usize,
    /// Stop when the descent direction is at most this long.
    pub tol_grad: f64,
    /// Sufficient-decrease constant.
    pub armijo: f64,
    /// Trial step of the first iteration. Later iterations start from the
    /// Barzilai-Borwein estimate.
    pub initial_step: f64,
    /// Tolerance of the inner transform evaluations.
    pub transform_tol: f64,
    /// Pieces within this relative gap of the maximum count as active.
    pub active_tol: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            budget: 10_000,
            tol_grad: 1e-8,
            armijo: 1e-4,
            initial_step: 1.0,
            transform_tol: 1e-13,
            active_tol: 1e-8,
        }
    }
}

/// Maximizes an upper radial `f` by backtracking descent on `f^Γ`, then
/// maps the minimizer back. `Unknown` radiality is settled by
/// [`check_radial`] first.
pub fn solve_via_dual(
    f: &FunctionOracle,
    y0: &[f64],
    params: &SolverParams,
) -> Result<(DualSolution, PrimalSolution)> {
    solve_pieces(f, None, y0, params)
}

/// Maximizes `f` over a set `S` containing the origin by minimizing
/// `max{f^Γ, γ_S}`.
pub fn solve_via_dual_constrained(
    f: &FunctionOracle,
    s: &SetOracle,
    y0: &[f64],
    params: &SolverParams,
) -> Result<(DualSolution, PrimalSolution)> {
    solve_pieces(f, Some(s), y0, params)
}

fn ensure_radial(f: &FunctionOracle) -> Result<()> {
    match f.meta().upper_radial {
        Tri::Yes => Ok(()),
        Tri::No => Err(Error::RadialityRequired),
        Tri::Unknown => {
            let report = check_radial(f, &CheckConfig::new(f.dim()))?;
            if report.verdict == Verdict::Radial {
                Ok(())
            } else {
                Err(Error::RadialityRequired)
            }
        }
    }
}

struct Piece {
    handle: DualHandle,
    /// Base for the closed-form dual gradient (absent for gauges).
    primal: Option<FunctionOracle>,
}

impl Piece {
    fn value(&self, y: &[f64]) -> Result<f64> {
        self.handle.value(y).map(ExtPos::value)
    }

    fn gradient(&self, y: &[f64], value: f64) -> Result<Vec<f64>> {
        if let Some(f) = &self.primal {
            if let Ok(g) = dual_gradient(f, y, value) {
                return Ok(g);
            }
        }
        let mut p = y.to_vec();
        let mut g = Vec::with_capacity(y.len());
        for i in 0..y.len() {
            let h = 1e-7 * y[i].abs().max(1.0);
            p[i] = y[i] + h;
            let fp = self.value(&p)?;
            p[i] = y[i] - h;
            let fm = self.value(&p)?;
            p[i] = y[i];
            g.push((fp - fm) / (2.0 * h));
        }
        if g.iter().all(|c| c.is_finite()) {
            Ok(g)
        } else {
            Err(Error::NotDifferentiable)
        }
    }
}

/// Consecutive iterations without a decrease beyond evaluation noise after
/// which the iterate is reported as stationary.
const STALL_LIMIT: usize = 20;

fn solve_pieces(
    f: &FunctionOracle,
    set: Option<&SetOracle>,
    y0: &[f64],
    params: &SolverParams,
) -> Result<(DualSolution, PrimalSolution)> {
    if y0.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: y0.len(),
        });
    }
    if params.budget == 0 {
        return Err(Error::InvalidArgument("budget must be positive".into()));
    }
    ensure_radial(f)?;
    let settings = TransformSettings::default().with_tol(params.transform_tol)?;
    let mut pieces = vec![Piece {
        handle: DualHandle::new(f.clone(), Sense::Upper, settings)?,
        primal: Some(f.clone()),
    }];
    if let Some(s) = set {
        if s.dim() != f.dim() {
            return Err(Error::DimensionMismatch {
                expected: f.dim(),
                found: s.dim(),
            });
        }
        pieces.push(Piece {
            handle: s.gauge_handle()?.with_settings(settings)?,
            primal: None,
        });
    }
    let objective = |y: &[f64]| -> Result<(f64, Vec<f64>)> {
        let vals = pieces
            .iter()
            .map(|p| p.value(y))
            .collect::<Result<Vec<_>>>()?;
        let m = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok((m, vals))
    };

    let mut y = y0.to_vec();
    let (mut phi, mut vals) = objective(&y)?;
    if !phi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "dual objective is not finite at the start point (value {phi})"
        )));
    }
    let mut grad_norm = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let (mut best, mut stalled) = (phi, 0);
    while iterations < params.budget {
        let scale = phi.abs().max(1.0);
        let mut grads = Vec::new();
        for (p, &v) in pieces.iter().zip(&vals) {
            if phi - v <= params.active_tol * scale {
                grads.push(p.gradient(&y, v)?);
            }
        }
        let dir = min_norm_combination(&grads);
        grad_norm = norm(&dir);
        if grad_norm <= params.tol_grad {
            converged = true;
            break;
        }
        iterations += 1;
        let noise = 2.0 * params.transform_tol * scale;
        // Barzilai-Borwein trial step, then halve until Armijo holds.
        let mut t = params.initial_step;
        if let Some((py, pd)) = &prev {
            let sy: Vec<f64> = y.iter().zip(py).map(|(a, b)| a - b).collect();
            let sg: Vec<f64> = dir.iter().zip(pd).map(|(a, b)| a - b).collect();
            let curv = crate::ext::dot(&sy, &sg);
            if curv > 0.0 {
                t = (crate::ext::dot(&sy, &sy) / curv).clamp(1e-10, 1e10);
            }
        }
        prev = Some((y.clone(), dir.clone()));
        let mut accepted = None;
        while t * grad_norm > 1e-16 * norm(&y).max(1.0) {
            let trial: Vec<f64> = y.iter().zip(&dir).map(|(a, d)| a - t * d).collect();
            let (tphi, tvals) = objective(&trial)?;
            if tphi <= phi - params.armijo * t * grad_norm * grad_norm + noise && tphi < phi + noise
            {
                accepted = Some((trial, tphi, tvals));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((ny, nphi, nvals)) => {
                let moved = ny.iter().zip(&y).any(|(a, b)| a != b);
                y = ny;
                phi = nphi;
                vals = nvals;
                // At a kink the gradient never shrinks; steps only wander
                // inside the evaluation noise.
                if phi < best - noise {
                    best = phi;
                    stalled = 0;
                } else {
                    stalled += 1;
                }
                if !moved || stalled >= STALL_LIMIT {
                    converged = true;
                    break;
                }
            }
            None => {
                // No decrease down to roundoff: stationary to working precision.
                converged = true;
                break;
            }
        }
    }
    let dual = DualSolution {
        y_star: y,
        d_star: ExtPos::from_value(phi)?,
        iterations,
        grad_norm: Some(grad_norm),
    };
    if !converged {
        return Err(Error::BudgetExhausted {
            iterations,
            grad_norm,
            best: Box::new(dual),
        });
    }
    let primal = map_dual_to_primal(&dual)?;
    Ok((dual, primal))
}

/// Minimum-norm point of the convex hull of `gs`.
fn min_norm_combination(gs: &[Vec<f64>]) -> Vec<f64> {
    match gs {
        [] => Vec::new(),
        [g] => g.clone(),
        [a, b] => {
            // argmin over t in [0, 1] of |t a + (1 - t) b|.
            let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            let dd = crate::ext::dot(&diff, &diff);
            let t = if dd == 0.0 {
                0.5
            } else {
                (-crate::ext::dot(&diff, b) / dd).clamp(0.0, 1.0)
            };
            a.iter()
                .zip(b)
                .map(|(x, y)| t * x + (1.0 - t) * y)
                .collect()
        }
        _ => {
            // Frank-Wolfe on the simplex.
            let k = gs.len();
            let mut w = vec![1.0 / k as f64; k];
            let combo = |w: &[f64]| -> Vec<f64> {
                let mut v = vec![0.0; gs[0].len()];
                for (wi, g) in w.iter().zip(gs) {
                    v.iter_mut().zip(g).for_each(|(a, b)| *a += wi * b);
                }
                v
            };
            for it in 0..500 {
                let v = combo(&w);
                let j = (0..k)
                    .min_by(|&i, &j| {
                        crate::ext::dot(&gs[i], &v).total_cmp(&crate::ext::dot(&gs[j], &v))
                    })
                    .unwrap();
                let gamma = 2.0 / (it as f64 + 2.0);
                w.iter_mut().for_each(|c| *c *= 1.0 - gamma);
                w[j] += gamma;
            }
            combo(&w)
        }
    }
}
