//! Upper and lower radial transforms by bracketing and bisection on the
//! perspective `v ↦ v·f(y/v)`, the sampled radiality checker, and duality
//! residuals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::{dot, ExtPos};
use crate::function::{
    central_difference, gradient, perspective, FunctionOracle, Provenance, RadialityMeta, Tri,
};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const V_MAX: f64 = 1e12;
pub const V_MIN: f64 = 1e-12;
/// Size of the geometric scan used by [`SearchMode::Global`].
pub const GLOBAL_GRID: usize = 1024;
/// Relative decrease of the perspective that counts as non-monotone.
pub const MONOTONE_SLACK: f64 = 1e-9;
/// Absolute rounding error of `f` at a point, per unit of `v`, in `v·f(y/v)`.
/// Cancellation inside `f` costs a few hundred ulps of its intermediate
/// values, and the product with `v` scales that loss.
pub const PERSPECTIVE_ROUNDOFF: f64 = 1e-13;

/// Whether the drop from `p` (at `v`) to `p_next` (at `v_next > v`) is
/// larger than rounding can explain.
fn significant_decrease(p: f64, p_next: f64, v_next: f64) -> bool {
    p - p_next > MONOTONE_SLACK * p.abs().max(1.0) + PERSPECTIVE_ROUNDOFF * v_next
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Expand from `v = 1` by doubling or halving, then bisect. Requires a
    /// monotone perspective.
    Monotone,
    /// Scan a geometric grid over `[v_min, v_max]` for the extreme feasible
    /// cell, then bisect inside it. An approximation for non-radial input.
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformSettings {
    pub tol: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub mode: SearchMode,
}

impl Default for TransformSettings {
    fn default() -> Self {
        TransformSettings {
            tol: DEFAULT_TOL,
            v_min: V_MIN,
            v_max: V_MAX,
            mode: SearchMode::Monotone,
        }
    }
}

impl TransformSettings {
    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Error::NotPositive(tol));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn global(mut self) -> Self {
        self.mode = SearchMode::Global;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::NotPositive(self.tol));
        }
        if !(self.v_min > 0.0 && self.v_min < 1.0 && self.v_max > 1.0 && self.v_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "search caps must satisfy 0 < v_min < 1 < v_max < inf (got {}, {})",
                self.v_min, self.v_max
            )));
        }
        Ok(())
    }
}

/// Result of one transform evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: ExtPos,
    /// Final `(lo, hi)` bracket of the level-1 crossing. `None` when the
    /// value is a `Zero`/`Infinity` tag decided at a search cap.
    pub bracket: Option<(f64, f64)>,
    pub evals: usize,
}

/// The transform `f^Γ` (upper) or `f_Γ` (lower) of a base oracle.
#[derive(Debug, Clone)]
pub struct DualHandle {
    base: FunctionOracle,
    sense: Sense,
    settings: TransformSettings,
}

impl DualHandle {
    pub fn new(base: FunctionOracle, sense: Sense, settings: TransformSettings) -> Result<Self> {
        settings.validate()?;
        Ok(DualHandle {
            base,
            sense,
            settings,
        })
    }

    pub fn upper(base: FunctionOracle) -> Self {
        DualHandle {
            base,
            sense: Sense::Upper,
            settings: TransformSettings::default(),
        }
    }

    pub fn lower(base: FunctionOracle) -> Self {
        DualHandle {
            base,
            sense: Sense::Lower,
            settings: TransformSettings::default(),
        }
    }

    pub fn with_settings(mut self, settings: TransformSettings) -> Result<Self> {
        settings.validate()?;
        self.settings = settings;
        Ok(self)
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        self.settings = self.settings.with_tol(tol)?;
        Ok(self)
    }

    pub fn base(&self) -> &FunctionOracle {
        &self.base
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn settings(&self) -> &TransformSettings {
        &self.settings
    }

    pub fn tol(&self) -> f64 {
        self.settings.tol
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn value(&self, y: &[f64]) -> Result<ExtPos> {
        self.evaluate(y).map(|e| e.value)
    }

    pub fn evaluate(&self, y: &[f64]) -> Result<Evaluation> {
        if y.len() != self.base.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.base.dim(),
                found: y.len(),
            });
        }
        if y.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("transform argument"));
        }
        let mut search = Search {
            f: &self.base,
            y,
            sense: self.sense,
            s: &self.settings,
            evals: 0,
        };
        match self.settings.mode {
            SearchMode::Monotone => search.monotone(),
            SearchMode::Global => search.global(),
        }
    }

    /// Views the transform as an oracle so it can be transformed again or
    /// composed. The gradient uses the closed-form dual gradient where the
    /// base has one and the strictness condition holds, central
    /// differences otherwise.
    pub fn to_oracle(&self) -> FunctionOracle {
        let me = self.clone();
        let meta = match self.sense {
            Sense::Upper => RadialityMeta {
                upper_radial: Tri::Yes,
                strictly_radial: Tri::Unknown,
                provenance: Provenance::Declared,
            },
            Sense::Lower => RadialityMeta::UNKNOWN,
        };
        let label = match self.sense {
            Sense::Upper => format!("({})^G", self.base.label()),
            Sense::Lower => format!("({})_G", self.base.label()),
        };
        let eval_handle = me.clone();
        let mut oracle =
            FunctionOracle::try_new(self.dim(), move |y| eval_handle.value(y)).with_meta(meta);
        if self.sense == Sense::Upper && self.base.has_gradient() {
            let grad_handle = me.clone();
            oracle = oracle.with_gradient(move |y| {
                let fy = grad_handle.value(y)?;
                let fy = fy.as_finite().ok_or(Error::OutsideDomain)?;
                match crate::calculus::dual_gradient(&grad_handle.base, y, fy) {
                    Ok(g) => Ok(g),
                    Err(_) => central_difference(&|p: &[f64]| grad_handle.value(p), y),
                }
            });
            if self.base.has_hessian() {
                let hess_handle = me;
                oracle = oracle.with_hessian(move |y| {
                    let fy = hess_handle.value(y)?;
                    let fy = fy.as_finite().ok_or(Error::OutsideDomain)?;
                    crate::calculus::dual_hessian(&hess_handle.base, y, fy)
                });
            }
        }
        oracle.with_label(label)
    }
}

/// `sup{v > 0 : v·f(y/v) ≤ 1}` for an upper handle.
pub fn upper_value(h: &DualHandle, y: &[f64]) -> Result<ExtPos> {
    if h.sense != Sense::Upper {
        return Err(Error::UnsupportedSense);
    }
    h.value(y)
}

/// `inf{v > 0 : v·f(y/v) ≥ 1}` for a lower handle. The infimum of an empty
/// set is `Infinity`.
pub fn lower_value(h: &DualHandle, y: &[f64]) -> Result<ExtPos> {
    if h.sense != Sense::Lower {
        return Err(Error::UnsupportedSense);
    }
    h.value(y)
}

struct Search<'a> {
    f: &'a FunctionOracle,
    y: &'a [f64],
    sense: Sense,
    s: &'a TransformSettings,
    evals: usize,
}

impl Search<'_> {
    fn p(&mut self, v: f64) -> Result<f64> {
        self.evals += 1;
        Ok(perspective(self.f, self.y, v)?.value())
    }

    fn feasible(&self, p: f64) -> bool {
        match self.sense {
            Sense::Upper => p <= 1.0,
            Sense::Lower => p >= 1.0,
        }
    }

    fn check_monotone(&self, (v, pv): (f64, f64), (w, pw): (f64, f64)) -> Result<()> {
        // (v, pv) precedes (w, pw) in increasing v.
        if self.f.meta().upper_radial == Tri::Yes {
            return Ok(());
        }
        if significant_decrease(pv, pw, w) {
            return Err(Error::NonMonotonePerspective {
                v,
                v_next: w,
                from: pv,
                to: pw,
            });
        }
        Ok(())
    }

    fn tag(&self, value: ExtPos) -> Result<Evaluation> {
        Ok(Evaluation {
            value,
            bracket: None,
            evals: self.evals,
        })
    }

    fn monotone(&mut self) -> Result<Evaluation> {
        let p1 = self.p(1.0)?;
        let up = self.feasible(p1) == (self.sense == Sense::Upper);
        // Feasible points lie to the left for Upper and to the right for
        // Lower. Walk from 1 toward the crossing.
        let (mut a, mut pa): (f64, _) = (1.0, p1);
        let (lo, hi);
        if up {
            loop {
                let b = (2.0 * a).min(self.s.v_max);
                let pb = self.p(b)?;
                self.check_monotone((a, pa), (b, pb))?;
                let still = self.feasible(pb) == (self.sense == Sense::Upper);
                if !still {
                    (lo, hi) = (a, b);
                    break;
                }
                if b >= self.s.v_max {
                    // Upper: feasible up to the cap. Lower: never feasible.
                    return self.tag(ExtPos::Infinity);
                }
                (a, pa) = (b, pb);
            }
        } else {
            loop {
                let b = (0.5 * a).max(self.s.v_min);
                let pb = self.p(b)?;
                self.check_monotone((b, pb), (a, pa))?;
                let still = self.feasible(pb) != (self.sense == Sense::Upper);
                if !still {
                    (lo, hi) = (b, a);
                    break;
                }
                if b <= self.s.v_min {
                    return self.tag(ExtPos::Zero);
                }
                (a, pa) = (b, pb);
            }
        }
        self.bisect(lo, hi)
    }

    fn global(&mut self) -> Result<Evaluation> {
        let n = GLOBAL_GRID;
        let (l0, l1) = (self.s.v_min.ln(), self.s.v_max.ln());
        let grid: Vec<f64> = (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.s.v_max
                } else {
                    (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()
                }
            })
            .collect();
        let mut feas = Vec::with_capacity(n);
        for &v in &grid {
            let p = self.p(v)?;
            feas.push(self.feasible(p));
        }
        match self.sense {
            Sense::Upper => match feas.iter().rposition(|&b| b) {
                None => self.tag(ExtPos::Zero),
                Some(k) if k == n - 1 => self.tag(ExtPos::Infinity),
                Some(k) => self.bisect(grid[k], grid[k + 1]),
            },
            Sense::Lower => match feas.iter().position(|&b| b) {
                None => self.tag(ExtPos::Infinity),
                Some(0) => self.tag(ExtPos::Zero),
                Some(k) => self.bisect(grid[k - 1], grid[k]),
            },
        }
    }

    /// Shrinks a bracket whose left end is feasible for Upper (right end
    /// for Lower) until its width is at most `tol·max(1, v)`.
    fn bisect(&mut self, mut lo: f64, mut hi: f64) -> Result<Evaluation> {
        while hi - lo > self.s.tol * lo.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let p = self.p(mid)?;
            let left = self.feasible(p) == (self.sense == Sense::Upper);
            if left {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let v = match self.sense {
            Sense::Upper => lo,
            Sense::Lower => hi,
        };
        Ok(Evaluation {
            value: ExtPos::finite(v)?,
            bracket: Some((lo, hi)),
            evals: self.evals,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Radial,
    NotRadial,
    Inconclusive,
}

/// A sampled decrease of the perspective: `v < v_next` but `p > p_next`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub y: Vec<f64>,
    pub v: f64,
    pub v_next: f64,
    pub p: f64,
    pub p_next: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialityReport {
    pub verdict: Verdict,
    /// Whether the perspective was strictly increasing on the sampled
    /// domain; `None` when nothing finite was sampled or the verdict is not
    /// `Radial`.
    pub strict: Option<bool>,
    pub witnesses: Vec<Witness>,
    pub checked_rays: usize,
    pub checked_points_per_ray: usize,
    /// Points where `(∇f(x), −1)ᵀ(x, f(x)) > 0` was observed.
    pub gradient_flags: usize,
    /// Evaluations that raised an error and were skipped.
    pub errors: usize,
}

impl RadialityReport {
    pub fn to_meta(&self) -> RadialityMeta {
        let (upper_radial, strictly_radial) = match (self.verdict, self.strict) {
            (Verdict::Radial, Some(true)) => (Tri::Yes, Tri::Yes),
            (Verdict::Radial, Some(false)) => (Tri::Yes, Tri::No),
            (Verdict::Radial, None) => (Tri::Yes, Tri::Unknown),
            (Verdict::NotRadial, _) => (Tri::No, Tri::No),
            (Verdict::Inconclusive, _) => (Tri::Unknown, Tri::Unknown),
        };
        RadialityMeta {
            upper_radial,
            strictly_radial,
            provenance: Provenance::Checked,
        }
    }

    pub fn describe(&self) -> &'static str {
        match (self.verdict, self.strict) {
            (Verdict::Radial, Some(true)) => "strictly radial (sampled)",
            (Verdict::Radial, _) => "radial, not strictly (sampled)",
            (Verdict::NotRadial, _) => "not upper radial",
            (Verdict::Inconclusive, _) => "inconclusive",
        }
    }
}

/// Sampling parameters for [`check_radial`].
#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    pub rays: usize,
    pub points_per_ray: usize,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub seed: u64,
    pub v_min: f64,
    pub v_max: f64,
}

impl CheckConfig {
    /// 64 rays × 200 points over the box `[−3, 3]^dim`.
    pub fn new(dim: usize) -> Self {
        CheckConfig {
            rays: 64,
            points_per_ray: 200,
            lo: vec![-3.0; dim],
            hi: vec![3.0; dim],
            seed: 0,
            v_min: V_MIN,
            v_max: V_MAX,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

const MAX_WITNESSES: usize = 16;
const STRICT_SLACK: f64 = 1e-12;

/// Samples directions `y` in the box and a geometric `v`-grid along each
/// ray, looking for decreases of the perspective. With a gradient, also
/// tests the sign of `(∇f(x), −1)ᵀ(x, f(x))` at the sampled points and
/// searches near each positive for an actual decrease. A `Radial` verdict
/// means no violation was sampled.
pub fn check_radial(f: &FunctionOracle, cfg: &CheckConfig) -> Result<RadialityReport> {
    if cfg.rays == 0 || cfg.points_per_ray < 2 {
        return Err(Error::InvalidArgument(
            "need at least one ray and two points per ray".into(),
        ));
    }
    if cfg.lo.len() != f.dim() || cfg.hi.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: cfg.lo.len(),
        });
    }
    if cfg.lo.iter().zip(&cfg.hi).any(|(a, b)| !(a <= b)) {
        return Err(Error::InvalidArgument(
            "box bounds must satisfy lo <= hi".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ys: Vec<Vec<f64>> = (0..cfg.rays)
        .map(|_| {
            cfg.lo
                .iter()
                .zip(&cfg.hi)
                .map(|(&a, &b)| if a == b { a } else { rng.random_range(a..=b) })
                .collect()
        })
        .collect();
    let m = cfg.points_per_ray;
    let (l0, l1) = (cfg.v_min.ln(), cfg.v_max.ln());
    let vs: Vec<f64> = (0..m)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (m - 1) as f64).exp())
        .collect();

    let rays: Vec<RayOutcome> = ys.par_iter().map(|y| check_ray(f, y, &vs)).collect();

    let mut report = RadialityReport {
        verdict: Verdict::Radial,
        strict: None,
        witnesses: Vec::new(),
        checked_rays: cfg.rays,
        checked_points_per_ray: m,
        gradient_flags: 0,
        errors: 0,
    };
    let mut any_finite_pair = false;
    let mut all_strict = true;
    for r in rays {
        report.errors += r.errors;
        report.gradient_flags += r.gradient_flag as usize;
        any_finite_pair |= r.finite_pairs > 0;
        all_strict &= r.strict;
        for w in r.witnesses {
            if report.witnesses.len() < MAX_WITNESSES {
                report.witnesses.push(w);
            }
        }
    }
    if !report.witnesses.is_empty() {
        report.verdict = Verdict::NotRadial;
    } else if report.gradient_flags > 0 || report.errors > 0 {
        report.verdict = Verdict::Inconclusive;
    } else if any_finite_pair {
        report.strict = Some(all_strict);
    }
    Ok(report)
}

#[derive(Default)]
struct RayOutcome {
    witnesses: Vec<Witness>,
    strict: bool,
    finite_pairs: usize,
    gradient_flag: bool,
    errors: usize,
}

fn check_ray(f: &FunctionOracle, y: &[f64], vs: &[f64]) -> RayOutcome {
    let mut out = RayOutcome {
        strict: true,
        ..Default::default()
    };
    let mut prev: Option<(f64, ExtPos)> = None;
    for &v in vs {
        let p = match perspective(f, y, v) {
            Ok(p) => p,
            Err(_) => {
                out.errors += 1;
                prev = None;
                continue;
            }
        };
        if let Some((u, pu)) = prev {
            let (a, b) = (pu.value(), p.value());
            if significant_decrease(a, b, v) {
                out.witnesses.push(Witness {
                    y: y.to_vec(),
                    v: u,
                    v_next: v,
                    p: a,
                    p_next: b,
                });
                return out;
            }
            if pu.is_finite() && p.is_finite() {
                out.finite_pairs += 1;
                if b - a <= STRICT_SLACK * a {
                    out.strict = false;
                }
            }
        }
        prev = Some((v, p));
    }

    // Derivative test at the point y itself.
    if let Ok(fy) = f.eval(y) {
        if let Some(fv) = fy.as_finite() {
            if let Ok(g) = gradient(f, y) {
                let s = dot(&g, y) - fv;
                let scale = fv.max(1.0);
                if s > 1e-9 * scale {
                    match search_near_one(f, y) {
                        Some(w) => out.witnesses.push(w),
                        None => out.gradient_flag = true,
                    }
                } else if s >= -STRICT_SLACK * scale {
                    out.strict = false;
                }
            }
        }
    }
    out
}

fn search_near_one(f: &FunctionOracle, y: &[f64]) -> Option<Witness> {
    let p1 = perspective(f, y, 1.0).ok()?.value();
    for d in [1e-1, 1e-2, 1e-3, 1e-4] {
        let v = 1.0 - d;
        let pv = perspective(f, y, v).ok()?.value();
        if significant_decrease(pv, p1, 1.0) {
            return Some(Witness {
                y: y.to_vec(),
                v,
                v_next: 1.0,
                p: pv,
                p_next: p1,
            });
        }
    }
    None
}

/// `f^ΓΓ` as a handle. The inner transform runs at `tol/100` so the outer
/// tolerance dominates the error, and reports the infeasible end of its
/// bracket. That keeps the outer perspective from being underestimated,
/// which would otherwise turn `f = 0` on the edge of the domain into a
/// small positive bidual.
pub fn bidual(f: &FunctionOracle, settings: &TransformSettings) -> Result<DualHandle> {
    let inner_settings = TransformSettings {
        tol: settings.tol * 1e-2,
        ..*settings
    };
    let inner = DualHandle::new(f.clone(), Sense::Upper, inner_settings)?;
    let oracle = FunctionOracle::try_new(f.dim(), move |y| {
        let ev = inner.evaluate(y)?;
        match (ev.value, ev.bracket) {
            (ExtPos::Finite(_), Some((_, hi))) => ExtPos::finite(hi),
            (v, _) => Ok(v),
        }
    })
    .with_meta(RadialityMeta {
        upper_radial: Tri::Yes,
        strictly_radial: Tri::Unknown,
        provenance: Provenance::Declared,
    })
    .with_label(format!("({})^GG", f.label()));
    DualHandle::new(
        oracle,
        Sense::Upper,
        TransformSettings {
            mode: SearchMode::Monotone,
            ..*settings
        },
    )
}

/// Pointwise `|f^ΓΓ(x) − f(x)|`, infinite where exactly one side is.
pub fn duality_residuals(
    f: &FunctionOracle,
    grid: &[Vec<f64>],
    settings: &TransformSettings,
) -> Result<Vec<f64>> {
    let bd = bidual(f, settings)?;
    grid.par_iter()
        .map(|x| Ok(bd.value(x)?.distance(f.eval(x)?)))
        .collect()
}

/// `max_x |f^ΓΓ(x) − f(x)|` over the grid with default settings.
pub fn duality_residual(f: &FunctionOracle, grid: &[Vec<f64>]) -> Result<f64> {
    duality_residual_with(f, grid, &TransformSettings::default())
}

pub fn duality_residual_with(
    f: &FunctionOracle,
    grid: &[Vec<f64>],
    settings: &TransformSettings,
) -> Result<f64> {
    Ok(duality_residuals(f, grid, settings)?
        .into_iter()
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::function::parse_function;

    fn close(a: ExtPos, b: f64, tol: f64) -> bool {
        (a.value() - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn upper_examples() {
        let h = DualHandle::upper(catalog::hemisphere(1));
        assert!(close(upper_value(&h, &[1.0]).unwrap(), 2f64.sqrt(), 2e-10));
        let e = DualHandle::upper(catalog::exp_bump());
        assert!(close(upper_value(&e, &[0.0]).unwrap(), 2.0 / 3.0, 2e-10));
        let a = DualHandle::upper(parse_function("abs(x0)", 1).unwrap());
        assert_eq!(upper_value(&a, &[0.5]).unwrap(), ExtPos::Infinity);
        assert_eq!(upper_value(&a, &[1.0]).unwrap(), ExtPos::Infinity);
        assert_eq!(upper_value(&a, &[2.0]).unwrap(), ExtPos::Zero);
        assert!(matches!(
            upper_value(&DualHandle::lower(catalog::absolute()), &[0.0]),
            Err(Error::UnsupportedSense)
        ));
    }

    #[test]
    fn lower_examples() {
        let a = DualHandle::lower(catalog::absolute());
        assert_eq!(lower_value(&a, &[1.0]).unwrap(), ExtPos::Zero);
        assert_eq!(lower_value(&a, &[0.5]).unwrap(), ExtPos::Infinity);
        assert_eq!(lower_value(&a, &[2.0]).unwrap(), ExtPos::Zero);
        let h = DualHandle::lower(catalog::hemisphere(1));
        assert!(close(lower_value(&h, &[1.0]).unwrap(), 2f64.sqrt(), 2e-10));
        let c = DualHandle::lower(catalog::constant(2.0, 1).unwrap());
        assert!(close(lower_value(&c, &[7.0]).unwrap(), 0.5, 2e-10));
    }

    #[test]
    fn bracket_certificate() {
        let f = catalog::hemisphere(1);
        let h = DualHandle::upper(f.clone());
        for y in [-2.5, -0.3, 0.0, 0.8, 2.0] {
            let ev = h.evaluate(&[y]).unwrap();
            let v = ev.value.value();
            let (lo, hi) = ev.bracket.unwrap();
            assert_eq!(lo, v);
            assert!(perspective(&f, &[y], v).unwrap().value() <= 1.0);
            assert!(perspective(&f, &[y], hi).unwrap().value() > 1.0);
            let step = v + 4.0 * h.tol() * v.max(1.0);
            assert!(perspective(&f, &[y], step).unwrap().value() > 1.0);
        }
    }

    #[test]
    fn non_monotone_detected_and_global_mode() {
        let q = parse_function("(x0+1)^2 + 0.5", 1).unwrap();
        let h = DualHandle::upper(q.clone());
        assert!(matches!(
            h.value(&[-2.0]),
            Err(Error::NonMonotonePerspective { .. })
        ));
        let g = DualHandle::upper(q)
            .with_settings(TransformSettings::default().global())
            .unwrap();
        // v(( y/v + 1)^2 + 1/2) = 1 at y = -2: 1.5 v^2 - 5 v + 4 = 0, largest root 2.
        let v = g.value(&[-2.0]).unwrap().value();
        assert!((v - 2.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn residual_examples() {
        let grid: Vec<Vec<f64>> = (0..19).map(|i| vec![-0.9 + 0.1 * i as f64]).collect();
        let r = duality_residual(&catalog::hemisphere(1), &grid).unwrap();
        assert!(r <= 5e-10, "{r}");
        let grid: Vec<Vec<f64>> = (0..61).map(|i| vec![-3.0 + 0.1 * i as f64]).collect();
        let r = duality_residual(&catalog::exp_bump(), &grid).unwrap();
        assert!(r <= 5e-10, "{r}");
    }

    #[test]
    fn residual_of_non_radial_quadratic() {
        let q = catalog::bumped_quadratic();
        let s = TransformSettings::default().global();
        let r = duality_residuals(&q, &[vec![-2.0], vec![-1.0], vec![0.5]], &s).unwrap();
        assert!(r[0] > 0.5, "{r:?}");
        assert!(r[1] < 1e-9, "{r:?}");
        assert!(r[2] < 1e-9, "{r:?}");
    }

    #[test]
    fn checker_classifies_catalog() {
        let cfg = CheckConfig::new(1);
        let r = check_radial(&parse_function("pos(sqrt(1-x0^2))", 1).unwrap(), &cfg).unwrap();
        assert_eq!((r.verdict, r.strict), (Verdict::Radial, Some(true)));
        let r = check_radial(&parse_function("(x0+1)^2 + 0.5", 1).unwrap(), &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::NotRadial);
        let w = &r.witnesses[0];
        assert!(w.v < w.v_next && w.p > w.p_next);
        let r = check_radial(&catalog::constant(1.0, 1).unwrap(), &cfg).unwrap();
        assert_eq!((r.verdict, r.strict), (Verdict::Radial, Some(true)));
        let r = check_radial(&parse_function("abs(x0)", 1).unwrap(), &cfg).unwrap();
        assert_eq!((r.verdict, r.strict), (Verdict::Radial, Some(false)));
        assert_eq!(r.to_meta().strictly_radial, Tri::No);
    }

    #[test]
    fn handles_compose() {
        let h = DualHandle::upper(catalog::constant(4.0, 1).unwrap());
        let hh = DualHandle::upper(h.to_oracle());
        assert!(close(hh.value(&[0.3]).unwrap(), 4.0, 5e-10));
    }
}
