//! Transform rules, gauges, dual derivatives and the fractional-linear
//! transform.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ext::{dot, ExtPos, LiftedPoint};
use crate::function::{gradient, FunctionOracle, Provenance, RadialityMeta, Tri};
use crate::linalg;
use crate::sets::NormalVector;
use crate::transform::{DualHandle, Sense};

/// Threshold below which `(∇f(x), −1)ᵀ(x, f(x))` counts as nonnegative.
pub const STRICTNESS_THRESHOLD: f64 = 1e-12;

const DUAL_META: RadialityMeta = RadialityMeta {
    upper_radial: Tri::Yes,
    strictly_radial: Tri::Unknown,
    provenance: Provenance::Declared,
};

fn require_upper(h: &DualHandle) -> Result<()> {
    if h.sense() == Sense::Upper {
        Ok(())
    } else {
        Err(Error::UnsupportedSense)
    }
}

fn require_radial(h: &DualHandle) -> Result<()> {
    if h.base().meta().upper_radial == Tri::Yes {
        Ok(())
    } else {
        Err(Error::RadialityRequired)
    }
}

/// Transform of `λ·f`: `y ↦ f^Γ(λy)/λ`.
pub fn rule_scale(lambda: f64, f: &DualHandle) -> Result<FunctionOracle> {
    require_upper(f)?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::NotPositive(lambda));
    }
    let h = f.clone();
    Ok(FunctionOracle::try_new(f.dim(), move |y| {
        let z: Vec<f64> = y.iter().map(|c| lambda * c).collect();
        Ok(h.value(&z)?.scale(1.0 / lambda))
    })
    .with_meta(DUAL_META))
}

/// Transform of `f∘A` for `A : Rⁿ → Rᵐ` (an `m × n` matrix): `y ↦ f^Γ(Ay)`.
pub fn rule_linear(a: &DMatrix<f64>, f: &DualHandle) -> Result<FunctionOracle> {
    require_upper(f)?;
    if a.nrows() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: a.nrows(),
        });
    }
    let a = a.clone();
    let h = f.clone();
    Ok(FunctionOracle::try_new(a.ncols(), move |y| {
        let z = &a * DVector::from_column_slice(y);
        h.value(z.as_slice())
    })
    .with_meta(DUAL_META))
}

fn same_dims(duals: &[DualHandle]) -> Result<usize> {
    let first = duals
        .first()
        .ok_or_else(|| Error::InvalidArgument("at least one operand is required".into()))?;
    for d in duals {
        require_upper(d)?;
        if d.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: d.dim(),
            });
        }
    }
    Ok(first.dim())
}

fn pointwise(
    duals: &[DualHandle],
    combine: impl Fn(&mut Vec<ExtPos>) -> ExtPos + Send + Sync + 'static,
) -> Result<FunctionOracle> {
    let dim = same_dims(duals)?;
    let hs: Arc<[DualHandle]> = duals.into();
    Ok(FunctionOracle::try_new(dim, move |y| {
        let mut vals = hs.iter().map(|h| h.value(y)).collect::<Result<Vec<_>>>()?;
        Ok(combine(&mut vals))
    })
    .with_meta(DUAL_META))
}

/// Transform of `min{f₁, f₂}`: the pointwise maximum of the transforms.
pub fn rule_min(f1: &DualHandle, f2: &DualHandle) -> Result<FunctionOracle> {
    pointwise(&[f1.clone(), f2.clone()], |v| v[0].max(v[1]))
}

/// Transform of `max{f₁, f₂}`: the pointwise minimum of the transforms.
/// Both operands must be upper radial.
pub fn rule_max(f1: &DualHandle, f2: &DualHandle) -> Result<FunctionOracle> {
    require_radial(f1)?;
    require_radial(f2)?;
    pointwise(&[f1.clone(), f2.clone()], |v| v[0].min(v[1]))
}

/// Order-statistic operations on the primal side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KthKind {
    /// k-th smallest primal value.
    KMin,
    /// k-th largest primal value.
    KMax,
    /// Average of the k smallest primal values.
    KMinAvg,
    /// Average of the k largest primal values.
    KMaxAvg,
}

/// Transform of an order statistic of `f₁, …, fₙ` given their transforms.
///
/// The k-th smallest primal value maps to the k-th largest transform value
/// and vice versa. The averaged variants have no pointwise formula in the
/// transforms; they are evaluated as the max (resp. min) over k-subsets of
/// the transform of the subset average, each computed by bisection on the
/// base oracles.
///
/// Anything that is a max of primals needs upper radial operands: `KMin`
/// with `k > 1`, `KMax` with `k < n`, `KMaxAvg` with `k < n`.
pub fn rule_kth(kind: KthKind, k: usize, duals: &[DualHandle]) -> Result<FunctionOracle> {
    let n = duals.len();
    same_dims(duals)?;
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "order k = {k} must lie in 1..={n}"
        )));
    }
    let needs_radial = match kind {
        KthKind::KMin => k > 1,
        KthKind::KMax | KthKind::KMaxAvg => k < n,
        KthKind::KMinAvg => false,
    };
    if needs_radial {
        duals.iter().try_for_each(require_radial)?;
    }
    match kind {
        KthKind::KMin => pointwise(duals, move |v| {
            v.sort_unstable_by(|a, b| b.cmp(a));
            v[k - 1]
        }),
        KthKind::KMax => pointwise(duals, move |v| {
            v.sort_unstable();
            v[k - 1]
        }),
        KthKind::KMinAvg | KthKind::KMaxAvg => {
            let subsets: Vec<DualHandle> = k_subsets(n, k)
                .into_iter()
                .map(|idx| {
                    let bases: Vec<FunctionOracle> =
                        idx.iter().map(|&i| duals[i].base().clone()).collect();
                    DualHandle::new(average(&bases), Sense::Upper, *duals[0].settings())
                })
                .collect::<Result<_>>()?;
            if kind == KthKind::KMinAvg {
                pointwise(&subsets, |v| {
                    v.iter().copied().max().unwrap_or(ExtPos::Zero)
                })
            } else {
                pointwise(&subsets, |v| {
                    v.iter().copied().min().unwrap_or(ExtPos::Zero)
                })
            }
        }
    }
}

fn average(fs: &[FunctionOracle]) -> FunctionOracle {
    let fs: Vec<FunctionOracle> = fs.to_vec();
    let dim = fs[0].dim();
    let all_radial = fs.iter().all(|f| f.meta().upper_radial == Tri::Yes);
    let oracle = FunctionOracle::try_new(dim, move |x| {
        let mut sum = 0.0;
        for f in &fs {
            sum += f.eval(x)?.value();
        }
        ExtPos::from_value(sum / fs.len() as f64)
    });
    // Sums of upper radial functions are upper radial.
    if all_radial {
        oracle.with_meta(RadialityMeta::new(Tri::Yes, Tri::Unknown, Provenance::Declared).unwrap())
    } else {
        oracle
    }
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// A closed-form rule applied to transforms.
#[derive(Debug, Clone, PartialEq)]
pub enum TransformRule {
    Scale(f64),
    LinearCompose(DMatrix<f64>),
    Min,
    Max,
    KMin(usize),
    KMax(usize),
    KMinAvg(usize),
    KMaxAvg(usize),
}

impl TransformRule {
    pub fn apply(&self, duals: &[DualHandle]) -> Result<FunctionOracle> {
        let single = || -> Result<&DualHandle> {
            match duals {
                [d] => Ok(d),
                _ => Err(Error::InvalidArgument(format!(
                    "rule takes one operand, got {}",
                    duals.len()
                ))),
            }
        };
        match self {
            TransformRule::Scale(l) => rule_scale(*l, single()?),
            TransformRule::LinearCompose(a) => rule_linear(a, single()?),
            TransformRule::Min => rule_kth(KthKind::KMin, 1, duals),
            TransformRule::Max => rule_kth(KthKind::KMax, 1, duals),
            TransformRule::KMin(k) => rule_kth(KthKind::KMin, *k, duals),
            TransformRule::KMax(k) => rule_kth(KthKind::KMax, *k, duals),
            TransformRule::KMinAvg(k) => rule_kth(KthKind::KMinAvg, *k, duals),
            TransformRule::KMaxAvg(k) => rule_kth(KthKind::KMaxAvg, *k, duals),
        }
    }
}

type MemberFn = dyn Fn(&[f64]) -> bool + Send + Sync;

/// Membership oracle for a set in `Rⁿ`.
#[derive(Clone)]
pub struct SetOracle {
    dim: usize,
    member: Arc<MemberFn>,
    contains_origin: bool,
}

impl std::fmt::Debug for SetOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SetOracle")
            .field("dim", &self.dim)
            .field("contains_origin", &self.contains_origin)
            .finish()
    }
}

impl SetOracle {
    /// The set must be star-shaped about the origin (convex with `0 ∈ S`
    /// suffices) for its gauge to be meaningful.
    pub fn new(dim: usize, member: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        let contains_origin = member(&vec![0.0; dim]);
        SetOracle {
            dim,
            member: Arc::new(member),
            contains_origin,
        }
    }

    pub fn ball(dim: usize, radius: f64) -> Self {
        SetOracle::new(dim, move |x| dot(x, x).sqrt() <= radius)
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        let dim = lo.len();
        Ok(SetOracle::new(dim, move |x| {
            x.iter()
                .zip(lo.iter().zip(&hi))
                .all(|(c, (a, b))| a <= c && c <= b)
        }))
    }

    /// `{x : Ax ≤ b}` with `A` given by rows.
    pub fn polytope(a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        let dim = a.first().map_or(0, Vec::len);
        if a.iter().any(|r| r.len() != dim) {
            return Err(Error::Schema("polytope rows have unequal lengths".into()));
        }
        Ok(SetOracle::new(dim, move |x| {
            a.iter().zip(&b).all(|(r, bi)| dot(r, x) <= *bi)
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains_origin(&self) -> bool {
        self.contains_origin
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        (self.member)(x)
    }

    /// `∞` on the set, `0` off it.
    pub fn indicator(&self) -> FunctionOracle {
        let member = self.member.clone();
        let meta = if self.contains_origin {
            RadialityMeta::RADIAL
        } else {
            RadialityMeta::UNKNOWN
        };
        FunctionOracle::try_new(self.dim, move |x| {
            Ok(if member(x) {
                ExtPos::Infinity
            } else {
                ExtPos::Zero
            })
        })
        .with_meta(meta)
        .with_label("indicator")
    }

    /// The gauge as a transform handle (the upper transform of the
    /// indicator).
    pub fn gauge_handle(&self) -> Result<DualHandle> {
        if !self.contains_origin {
            return Err(Error::OriginNotInSet);
        }
        Ok(DualHandle::upper(self.indicator()))
    }
}

/// `inf{λ > 0 : y ∈ λS}`.
pub fn gauge(s: &SetOracle, y: &[f64]) -> Result<ExtPos> {
    s.gauge_handle()?.value(y)
}

/// `x = y / f^Γ(y)` together with `f(x)`, `∇f(x)` and the strictness
/// denominator `(∇f(x), −1)ᵀ(x, f(x))`.
fn dual_base_point(
    f: &FunctionOracle,
    y: &[f64],
    f_dual_y: f64,
) -> Result<(Vec<f64>, f64, Vec<f64>, f64)> {
    if !(f_dual_y > 0.0) || !f_dual_y.is_finite() {
        return Err(Error::NotPositive(f_dual_y));
    }
    if y.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: y.len(),
        });
    }
    let x: Vec<f64> = y.iter().map(|c| c / f_dual_y).collect();
    let fx = f.eval(&x)?.as_finite().ok_or(Error::OutsideDomain)?;
    let g = gradient(f, &x)?;
    let den = dot(&g, &x) - fx;
    if den >= -STRICTNESS_THRESHOLD {
        return Err(Error::StrictnessViolated(den));
    }
    Ok((x, fx, g, den))
}

/// `∇f^Γ(y) = ∇f(x) / (∇f(x), −1)ᵀ(x, f(x))` with `x = y / f^Γ(y)`. The
/// transform value is passed in so the caller controls its accuracy.
pub fn dual_gradient(f: &FunctionOracle, y: &[f64], f_dual_y: f64) -> Result<Vec<f64>> {
    let (_, _, g, den) = dual_base_point(f, y, f_dual_y)?;
    Ok(g.iter().map(|c| c / den).collect())
}

/// `∇²f^Γ(y) = (f(x)/den)·J∇²f(x)Jᵀ` with `J = I − ∇f(x)xᵀ/den` and `den`
/// the strictness denominator.
pub fn dual_hessian(f: &FunctionOracle, y: &[f64], f_dual_y: f64) -> Result<DMatrix<f64>> {
    if !f.has_hessian() {
        return Err(Error::HessianUnavailable);
    }
    let (x, fx, g, den) = dual_base_point(f, y, f_dual_y)?;
    let h = f.hessian(&x)?;
    let n = x.len();
    let j = DMatrix::from_fn(n, n, |r, c| {
        let id = if r == c { 1.0 } else { 0.0 };
        id - g[r] * x[c] / den
    });
    let out = (&j * h * j.transpose()) * (fx / den);
    Ok(0.5 * (&out + out.transpose()))
}

/// Maps a normal `(ζ, δ)` of the hypograph of `f` at `(x, u)` to the
/// subgradient `ζ / (ζ, δ)ᵀ(x, u)` of `f^Γ` at `y = x/u`.
pub fn dual_subgradient(n: &NormalVector) -> Result<Vec<f64>> {
    let pairing = n.pairing();
    if !(pairing > 0.0) {
        return Err(Error::DegenerateNormal(pairing));
    }
    Ok(n.zeta.iter().map(|c| c / pairing).collect())
}

/// Point `y = x/u` at which [`dual_subgradient`] applies.
pub fn subgradient_point(n: &NormalVector) -> Vec<f64> {
    n.at.x.iter().map(|c| c / n.at.u).collect()
}

fn invert_affine(a: &DMatrix<f64>, alpha: &[f64], d: f64) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    if alpha.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: alpha.len(),
        });
    }
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::NotPositive(d));
    }
    linalg::inverse(a)
}

/// `y ↦ (1/d)·f^Γ(A⁻¹(y − α))`, the transform induced by
/// [`fractional_map`].
pub fn general_transform(
    a: &DMatrix<f64>,
    alpha: &[f64],
    d: f64,
    f: &DualHandle,
) -> Result<FunctionOracle> {
    require_upper(f)?;
    let inv = invert_affine(a, alpha, d)?;
    if a.nrows() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: a.nrows(),
        });
    }
    let alpha = DVector::from_column_slice(alpha);
    let h = f.clone();
    Ok(FunctionOracle::try_new(f.dim(), move |y| {
        let z = &inv * (DVector::from_column_slice(y) - &alpha);
        Ok(h.value(z.as_slice())?.scale(1.0 / d))
    })
    .with_meta(DUAL_META))
}

/// The fractional-linear point map `(x, u) ↦ (Ax + αu, 1/d)/u` whose
/// hypograph image relation produces [`general_transform`]. Its inverse is
/// `(y, v) ↦ (A⁻¹(y − α), 1)/(dv)`.
pub fn fractional_map(
    a: &DMatrix<f64>,
    alpha: &[f64],
    d: f64,
    p: &LiftedPoint,
) -> Result<LiftedPoint> {
    invert_affine(a, alpha, d)?;
    p.validate()?;
    if p.dim() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.ncols(),
            found: p.dim(),
        });
    }
    let ax = a * DVector::from_column_slice(&p.x);
    let y: Vec<f64> = ax
        .iter()
        .zip(alpha)
        .map(|(v, al)| (v + al * p.u) / p.u)
        .collect();
    LiftedPoint::new(y, 1.0 / (d * p.u))
}
