//! Function oracles `E → [0, ∞]` with optional derivative callbacks.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::ext::ExtPos;

/// Three-valued answer for declared or checked properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Provenance {
    Declared,
    Checked,
}

/// What is known about the ray monotonicity of a function's perspective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct RadialityMeta {
    pub upper_radial: Tri,
    pub strictly_radial: Tri,
    pub provenance: Provenance,
}

impl RadialityMeta {
    pub const UNKNOWN: RadialityMeta = RadialityMeta {
        upper_radial: Tri::Unknown,
        strictly_radial: Tri::Unknown,
        provenance: Provenance::Declared,
    };

    pub const STRICT: RadialityMeta = RadialityMeta {
        upper_radial: Tri::Yes,
        strictly_radial: Tri::Yes,
        provenance: Provenance::Declared,
    };

    pub const RADIAL: RadialityMeta = RadialityMeta {
        upper_radial: Tri::Yes,
        strictly_radial: Tri::No,
        provenance: Provenance::Declared,
    };

    pub const NOT_RADIAL: RadialityMeta = RadialityMeta {
        upper_radial: Tri::No,
        strictly_radial: Tri::No,
        provenance: Provenance::Declared,
    };

    pub fn new(upper_radial: Tri, strictly_radial: Tri, provenance: Provenance) -> Result<Self> {
        if strictly_radial == Tri::Yes && upper_radial != Tri::Yes {
            return Err(Error::InvalidArgument(
                "strictly radial functions must be upper radial".into(),
            ));
        }
        Ok(RadialityMeta {
            upper_radial,
            strictly_radial,
            provenance,
        })
    }
}

type EvalFn = dyn Fn(&[f64]) -> Result<ExtPos> + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync;
type HessFn = dyn Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync;

/// Evaluation handle for `f : Rⁿ → [0, ∞]`. Cheap to clone.
#[derive(Clone)]
pub struct FunctionOracle {
    dim: usize,
    eval: Arc<EvalFn>,
    grad: Option<Arc<GradFn>>,
    hess: Option<Arc<HessFn>>,
    meta: RadialityMeta,
    label: Arc<str>,
}

impl fmt::Debug for FunctionOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionOracle")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("grad", &self.grad.is_some())
            .field("hess", &self.hess.is_some())
            .field("meta", &self.meta)
            .finish()
    }
}

impl FunctionOracle {
    /// Wraps a real-valued closure. Negative or NaN results surface as
    /// errors at evaluation time.
    pub fn new(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self::try_new(dim, move |x| ExtPos::from_value(f(x)))
    }

    pub fn try_new(
        dim: usize,
        f: impl Fn(&[f64]) -> Result<ExtPos> + Send + Sync + 'static,
    ) -> Self {
        FunctionOracle {
            dim,
            eval: Arc::new(f),
            grad: None,
            hess: None,
            meta: RadialityMeta::UNKNOWN,
            label: Arc::from("f"),
        }
    }

    pub fn with_gradient(
        mut self,
        g: impl Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        self.grad = Some(Arc::new(g));
        self
    }

    pub fn with_hessian(
        mut self,
        h: impl Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync + 'static,
    ) -> Self {
        self.hess = Some(Arc::new(h));
        self
    }

    pub fn with_meta(mut self, meta: RadialityMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn with_label(mut self, label: impl AsRef<str>) -> Self {
        self.label = Arc::from(label.as_ref());
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn meta(&self) -> RadialityMeta {
        self.meta
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_gradient(&self) -> bool {
        self.grad.is_some()
    }

    pub fn has_hessian(&self) -> bool {
        self.hess.is_some()
    }

    pub fn eval(&self, x: &[f64]) -> Result<ExtPos> {
        self.check_dim(x)?;
        (self.eval)(x)
    }

    /// Numeric view of [`eval`](Self::eval).
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.eval(x).map(ExtPos::value)
    }

    /// Hessian from the callback; only meaningful where `eval` is finite.
    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_dim(x)?;
        let h = self.hess.as_ref().ok_or(Error::HessianUnavailable)?;
        if !self.eval(x)?.is_finite() {
            return Err(Error::OutsideDomain);
        }
        h(x)
    }

    pub(crate) fn analytic_gradient(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        self.grad.as_ref().map(|g| g(x))
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }
}

/// `v·f(y/v)`, with `f(y/v) = ∞` giving `∞` and `f(y/v) = 0` giving `0`.
pub fn perspective(f: &FunctionOracle, y: &[f64], v: f64) -> Result<ExtPos> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::NotPositive(v));
    }
    if v == 1.0 {
        return f.eval(y);
    }
    let x: Vec<f64> = y.iter().map(|c| c / v).collect();
    Ok(f.eval(&x)?.scale(v))
}

/// Gradient at a point where `f` is finite: the analytic callback when
/// present, central differences otherwise.
pub fn gradient(f: &FunctionOracle, x: &[f64]) -> Result<Vec<f64>> {
    if !f.eval(x)?.is_finite() {
        return Err(Error::OutsideDomain);
    }
    match f.analytic_gradient(x) {
        Some(g) => g,
        None => central_difference(&|p: &[f64]| f.eval(p), x),
    }
}

/// Central differences with step `max(1e-6, 1e-8·|x_i|)`. Fails with
/// `NotDifferentiable` when a neighbour leaves the domain or the one-sided
/// quotients disagree by more than `1e-3` relative.
pub fn central_difference(eval: &dyn Fn(&[f64]) -> Result<ExtPos>, x: &[f64]) -> Result<Vec<f64>> {
    let f0 = eval(x)?.as_finite().ok_or(Error::OutsideDomain)?;
    let mut p = x.to_vec();
    let mut g = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let h = (1e-8 * x[i].abs()).max(1e-6);
        p[i] = x[i] + h;
        let fp = eval(&p)?.as_finite();
        p[i] = x[i] - h;
        let fm = eval(&p)?.as_finite();
        p[i] = x[i];
        let (Some(fp), Some(fm)) = (fp, fm) else {
            return Err(Error::NotDifferentiable);
        };
        let dp = (fp - f0) / h;
        let dm = (f0 - fm) / h;
        if (dp - dm).abs() > 1e-3 * dp.abs().max(dm.abs()).max(1.0) {
            return Err(Error::NotDifferentiable);
        }
        g.push((fp - fm) / (2.0 * h));
    }
    Ok(g)
}

/// Builds an oracle from the expression language. Gradients and Hessians
/// come from forward-mode differentiation; at kinks the gradient falls back
/// to central differences and the Hessian reports `NotDifferentiable`.
pub fn parse_function(text: &str, dim: usize) -> Result<FunctionOracle> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    let expr = Arc::new(Expr::parse(text, dim)?);
    let eval_expr = expr.clone();
    let eval = move |x: &[f64]| ExtPos::from_value(eval_expr.eval(x));
    let grad_expr = expr.clone();
    let grad = move |x: &[f64]| {
        let j = grad_expr.jet(x);
        if j.kink || j.g.iter().any(|c| !c.is_finite()) {
            let e = grad_expr.clone();
            central_difference(&move |p: &[f64]| ExtPos::from_value(e.eval(p)), x)
        } else {
            Ok(j.g)
        }
    };
    let hess_expr = expr.clone();
    let hess = move |x: &[f64]| {
        let j = hess_expr.jet(x);
        if j.kink || j.h.iter().any(|c| !c.is_finite()) {
            Err(Error::NotDifferentiable)
        } else {
            Ok(DMatrix::from_row_slice(dim, dim, &j.h))
        }
    };
    Ok(FunctionOracle::try_new(dim, eval)
        .with_gradient(grad)
        .with_hessian(hess)
        .with_label(text.trim()))
}
