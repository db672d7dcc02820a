//! Exact radial transforms of halfspaces, polyhedra and ellipsoids in
//! `E × R₊₊`, plus the matching map on normal vectors.
//!
//! All membership predicates use plain floating-point arithmetic with no
//! tolerance; boundary points are members.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::{gamma_point, LiftedPoint};
use crate::linalg;

/// Version tag written into every JSON document.
pub const SCHEMA: &str = "radial/v1";

/// A set of lifted points that maps to a set of the same kind under `Γ`.
pub trait RadialSet: Sized {
    fn contains(&self, p: &LiftedPoint) -> bool;
    fn transform(&self) -> Result<Self>;
}

/// `{(x', u') : (ζ, δ)ᵀ((x', u') − (x, u)) ≤ 0}`, anchored at `(x, u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal_x: Vec<f64>,
    pub normal_u: f64,
    pub anchor: LiftedPoint,
}

impl Halfspace {
    pub fn new(normal_x: Vec<f64>, normal_u: f64, anchor: LiftedPoint) -> Result<Self> {
        let h = Halfspace {
            normal_x,
            normal_u,
            anchor,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        self.anchor.validate()?;
        if self.normal_x.len() != self.anchor.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.anchor.dim(),
                found: self.normal_x.len(),
            });
        }
        if !self.normal_u.is_finite() || self.normal_x.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("halfspace normal"));
        }
        if self.normal_u == 0.0 && self.normal_x.iter().all(|&c| c == 0.0) {
            return Err(Error::ZeroNormal);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.normal_x.len()
    }

    /// Right-hand side `b` of the equivalent form `(ζ, δ)ᵀ(x', u') ≤ b`.
    pub fn offset(&self) -> f64 {
        self.anchor.pair(&self.normal_x, self.normal_u)
    }
}

impl RadialSet for Halfspace {
    fn contains(&self, p: &LiftedPoint) -> bool {
        let s: f64 = self
            .normal_x
            .iter()
            .zip(p.x.iter().zip(&self.anchor.x))
            .map(|(z, (a, b))| z * (a - b))
            .sum::<f64>()
            + self.normal_u * (p.u - self.anchor.u);
        s <= 0.0
    }

    fn transform(&self) -> Result<Self> {
        self.validate()?;
        let anchor = gamma_point(&self.anchor)?;
        Halfspace::new(self.normal_x.clone(), -self.offset(), anchor)
    }
}

/// Intersection of finitely many halfspaces with `E × R₊₊`. The empty list
/// is all of `E × R₊₊`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polyhedron {
    pub halfspaces: Vec<Halfspace>,
}

impl Polyhedron {
    pub fn new(halfspaces: Vec<Halfspace>) -> Result<Self> {
        let p = Polyhedron { halfspaces };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let Some(first) = self.halfspaces.first() else {
            return Ok(());
        };
        for h in &self.halfspaces {
            h.validate()?;
            if h.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: h.dim(),
                });
            }
        }
        Ok(())
    }

    /// The box `∏[lo_i, hi_i] × [u_lo, u_hi]` as `2(n + 1)` halfspaces.
    pub fn lifted_box(lo: &[f64], hi: &[f64], u_lo: f64, u_hi: f64) -> Result<Self> {
        let n = lo.len();
        if hi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: hi.len(),
            });
        }
        let mut halfspaces = Vec::with_capacity(2 * n + 2);
        let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let u_mid = 0.5 * (u_lo + u_hi);
        for i in 0..n {
            for (sign, bound) in [(1.0, hi[i]), (-1.0, lo[i])] {
                let mut zeta = vec![0.0; n];
                zeta[i] = sign;
                let mut x = mid.clone();
                x[i] = bound;
                halfspaces.push(Halfspace::new(zeta, 0.0, LiftedPoint::new(x, u_mid)?)?);
            }
        }
        for (sign, bound) in [(1.0, u_hi), (-1.0, u_lo)] {
            halfspaces.push(Halfspace::new(
                vec![0.0; n],
                sign,
                LiftedPoint::new(mid.clone(), bound)?,
            )?);
        }
        Polyhedron::new(halfspaces)
    }
}

impl RadialSet for Polyhedron {
    fn contains(&self, p: &LiftedPoint) -> bool {
        self.halfspaces.iter().all(|h| h.contains(p))
    }

    fn transform(&self) -> Result<Self> {
        let halfspaces = self
            .halfspaces
            .iter()
            .map(Halfspace::transform)
            .collect::<Result<_>>()?;
        Polyhedron::new(halfspaces)
    }
}

/// `{p : (p − c)ᵀ H (p − c) ≤ 1}` with `H` positive definite over `E × R`,
/// required to lie inside `E × R₊₊`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    center: LiftedPoint,
    shape: DMatrix<f64>,
}

impl Ellipsoid {
    pub fn new(center: LiftedPoint, shape: DMatrix<f64>) -> Result<Self> {
        center.validate()?;
        let n = center.dim() + 1;
        if shape.nrows() != n || shape.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: shape.nrows(),
            });
        }
        linalg::certify_positive_definite(&shape)?;
        let margin = containment_margin(&center, &shape)?;
        if !(margin > 0.0) {
            return Err(Error::ContainmentViolated(margin + 1.0));
        }
        Ok(Ellipsoid { center, shape })
    }

    pub fn center(&self) -> &LiftedPoint {
        &self.center
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// `(p − c)ᵀ H (p − c)`.
    pub fn quadratic_form(&self, p: &LiftedPoint) -> f64 {
        let n = self.dim();
        let d = DVector::from_fn(n + 1, |i, _| {
            if i < n {
                p.x[i] - self.center.x[i]
            } else {
                p.u - self.center.u
            }
        });
        d.dot(&(&self.shape * &d))
    }
}

impl RadialSet for Ellipsoid {
    fn contains(&self, p: &LiftedPoint) -> bool {
        self.quadratic_form(p) <= 1.0
    }

    /// Closed-form image under `Γ`. With blocks `H₁₁, H₁₂, H₂₂` of the
    /// shape and center `(x, u)`, the image has center
    /// `G⁻¹(−H₁₂, H₁₂ᵀx + H₂₂u)` and shape `G / (cᵀGc − H₂₂)`, where `G` is
    /// [`dual_form_matrix`].
    fn transform(&self) -> Result<Self> {
        let n = self.dim();
        let h = &self.shape;
        let g = dual_form_matrix(&self.center, h);
        linalg::certify_positive_definite(&g)?;
        let h12 = h.view((0, n), (n, 1));
        let h22 = h[(n, n)];
        let x = DVector::from_column_slice(&self.center.x);
        let rhs = DVector::from_fn(n + 1, |i, _| {
            if i < n {
                -h12[(i, 0)]
            } else {
                h12.column(0).dot(&x) + h22 * self.center.u
            }
        });
        let c = linalg::solve(&g, &rhs)?;
        let radius2 = c.dot(&(&g * &c)) - h22;
        if !(radius2 > 0.0) || !radius2.is_finite() {
            return Err(Error::ContainmentViolated(radius2));
        }
        let center = LiftedPoint::new(c.rows(0, n).iter().copied().collect(), c[n])?;
        let mut shape = g / radius2;
        shape = 0.5 * (&shape + shape.transpose());
        Ellipsoid::new(center, shape)
    }
}

/// `u²(H₂₂ − H₁₂ᵀH₁₁⁻¹H₁₂) − 1`; positive exactly when the ellipsoid lies in
/// `E × R₊₊`.
pub fn containment_margin(center: &LiftedPoint, shape: &DMatrix<f64>) -> Result<f64> {
    let n = center.dim();
    let h22 = shape[(n, n)];
    let schur = if n == 0 {
        h22
    } else {
        let h11 = shape.view((0, 0), (n, n)).into_owned();
        let h12 = shape.view((0, n), (n, 1)).column(0).into_owned();
        let z = linalg::solve(&h11, &h12)?;
        h22 - h12.dot(&z)
    };
    Ok(center.u * center.u * schur - 1.0)
}

/// The matrix
///
/// ```text
/// G = [ H₁₁                 −(H₁₁x + H₁₂u) ]
///     [ −(H₁₁x + H₁₂u)ᵀ     (x,u)ᵀH(x,u) − 1 ]
/// ```
///
/// which is positive definite exactly when the ellipsoid is contained in
/// `E × R₊₊`. Computed without any validation so it can be inspected for
/// straddling ellipsoids too.
pub fn dual_form_matrix(center: &LiftedPoint, shape: &DMatrix<f64>) -> DMatrix<f64> {
    let n = center.dim();
    let z = DVector::from_fn(n + 1, |i, _| if i < n { center.x[i] } else { center.u });
    let hz = shape * &z;
    let mut g = DMatrix::zeros(n + 1, n + 1);
    g.view_mut((0, 0), (n, n))
        .copy_from(&shape.view((0, 0), (n, n)));
    for i in 0..n {
        g[(i, n)] = -hz[i];
        g[(n, i)] = -hz[i];
    }
    g[(n, n)] = z.dot(&hz) - 1.0;
    g
}

/// Whether the normal is a supporting-halfspace normal or a proximal one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalKind {
    Convex,
    Proximal,
}

/// A normal vector `(ζ, δ)` of some set at the point `at`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalVector {
    pub zeta: Vec<f64>,
    pub delta: f64,
    pub kind: NormalKind,
    pub at: LiftedPoint,
}

impl NormalVector {
    pub fn new(zeta: Vec<f64>, delta: f64, kind: NormalKind, at: LiftedPoint) -> Result<Self> {
        at.validate()?;
        if zeta.len() != at.dim() {
            return Err(Error::DimensionMismatch {
                expected: at.dim(),
                found: zeta.len(),
            });
        }
        if delta == 0.0 && zeta.iter().all(|&c| c == 0.0) {
            return Err(Error::ZeroNormal);
        }
        Ok(NormalVector {
            zeta,
            delta,
            kind,
            at,
        })
    }

    /// `(ζ, δ)ᵀ(x, u)` at the base point.
    pub fn pairing(&self) -> f64 {
        self.at.pair(&self.zeta, self.delta)
    }
}

/// Maps a normal of `S` at `(x, u)` to the normal
/// `(ζ, −(ζ, δ)ᵀ(x, u))` of `ΓS` at `Γ(x, u)`, keeping its kind.
pub fn transform_normal(n: &NormalVector) -> Result<NormalVector> {
    let at = gamma_point(&n.at)?;
    NormalVector::new(n.zeta.clone(), -n.pairing(), n.kind, at)
}

/// Any of the exactly transformable set kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum AnySet {
    Halfspace(Halfspace),
    Ellipsoid(Ellipsoid),
    Polyhedron(Polyhedron),
}

impl RadialSet for AnySet {
    fn contains(&self, p: &LiftedPoint) -> bool {
        match self {
            AnySet::Halfspace(h) => h.contains(p),
            AnySet::Ellipsoid(e) => e.contains(p),
            AnySet::Polyhedron(q) => q.contains(p),
        }
    }

    fn transform(&self) -> Result<Self> {
        Ok(match self {
            AnySet::Halfspace(h) => AnySet::Halfspace(h.transform()?),
            AnySet::Ellipsoid(e) => AnySet::Ellipsoid(e.transform()?),
            AnySet::Polyhedron(q) => AnySet::Polyhedron(q.transform()?),
        })
    }
}

/// Membership of a lifted point; the sampling oracle used in tests.
pub fn membership<S: RadialSet>(p: &LiftedPoint, s: &S) -> bool {
    s.contains(p)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SetBody {
    Halfspace {
        normal_x: Vec<f64>,
        normal_u: f64,
        anchor: LiftedPoint,
    },
    Ellipsoid {
        center: LiftedPoint,
        shape: Vec<Vec<f64>>,
    },
    Polyhedron {
        halfspaces: Vec<Halfspace>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SetDocument {
    schema: String,
    #[serde(flatten)]
    body: SetBody,
}

impl AnySet {
    /// Parses a `radial/v1` set document and validates every invariant.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SetDocument =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        if doc.schema != SCHEMA {
            return Err(Error::Schema(format!(
                "unsupported schema `{}` (expected `{SCHEMA}`)",
                doc.schema
            )));
        }
        Ok(match doc.body {
            SetBody::Halfspace {
                normal_x,
                normal_u,
                anchor,
            } => AnySet::Halfspace(Halfspace::new(normal_x, normal_u, anchor)?),
            SetBody::Ellipsoid { center, shape } => {
                AnySet::Ellipsoid(Ellipsoid::new(center, linalg::matrix_from_rows(&shape)?)?)
            }
            SetBody::Polyhedron { halfspaces } => AnySet::Polyhedron(Polyhedron::new(halfspaces)?),
        })
    }

    pub fn to_json(&self) -> String {
        let body = match self {
            AnySet::Halfspace(h) => SetBody::Halfspace {
                normal_x: h.normal_x.clone(),
                normal_u: h.normal_u,
                anchor: h.anchor.clone(),
            },
            AnySet::Ellipsoid(e) => SetBody::Ellipsoid {
                center: e.center.clone(),
                shape: linalg::matrix_to_rows(&e.shape),
            },
            AnySet::Polyhedron(p) => SetBody::Polyhedron {
                halfspaces: p.halfspaces.clone(),
            },
        };
        let doc = SetDocument {
            schema: SCHEMA.to_string(),
            body,
        };
        serde_json::to_string_pretty(&doc).expect("set documents always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(x: &[f64], u: f64) -> LiftedPoint {
        LiftedPoint::new(x.to_vec(), u).unwrap()
    }

    #[test]
    fn halfspace_examples() {
        let h = Halfspace::new(vec![1.0], -1.0, lp(&[0.0], 1.0)).unwrap();
        let t = h.transform().unwrap();
        assert_eq!(t.normal_x, vec![1.0]);
        assert_eq!(t.normal_u, 1.0);
        assert_eq!(t.anchor, lp(&[0.0], 1.0));

        let cut = Halfspace::new(vec![0.0], 1.0, lp(&[0.0], 1.0)).unwrap();
        let t = cut.transform().unwrap();
        assert_eq!(t.normal_u, -1.0);
        assert!(t.contains(&lp(&[0.0], 2.0)));
        assert!(!t.contains(&lp(&[0.0], 0.5)));
        assert!(cut.contains(&lp(&[0.0], 0.5)));
        assert_eq!(t.transform().unwrap(), cut);
    }

    #[test]
    fn halfspace_rejects_zero_normal() {
        assert!(matches!(
            Halfspace::new(vec![0.0], 0.0, lp(&[0.0], 1.0)),
            Err(Error::ZeroNormal)
        ));
    }

    #[test]
    fn ellipsoid_identity_example() {
        let e = Ellipsoid::new(lp(&[0.0], 2.0), DMatrix::identity(2, 2)).unwrap();
        let t = e.transform().unwrap();
        assert!(t.center().x[0].abs() < 1e-15);
        assert!((t.center().u - 2.0 / 3.0).abs() < 1e-15);
        let expected = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 9.0]);
        assert!((t.shape() - expected).amax() < 1e-12);
        // Boundary points Γ(0,1) = (0,1) and Γ(0,3) = (0,1/3) stay on the boundary.
        assert!((t.quadratic_form(&lp(&[0.0], 1.0)) - 1.0).abs() < 1e-12);
        assert!((t.quadratic_form(&lp(&[0.0], 1.0 / 3.0)) - 1.0).abs() < 1e-12);
        assert!(e.contains(&lp(&[0.0], 1.0)));
    }

    #[test]
    fn ellipsoid_containment_checked() {
        let err = Ellipsoid::new(lp(&[0.0], 0.5), DMatrix::identity(2, 2)).unwrap_err();
        assert!(matches!(err, Error::ContainmentViolated(_)));
        let not_pd = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(Ellipsoid::new(lp(&[0.0], 5.0), not_pd).is_err());
    }

    #[test]
    fn normal_examples() {
        let n = NormalVector::new(vec![1.0], 0.0, NormalKind::Convex, lp(&[2.0], 1.0)).unwrap();
        let t = transform_normal(&n).unwrap();
        assert_eq!(t.zeta, vec![1.0]);
        assert_eq!(t.delta, -2.0);
        assert_eq!(t.at, lp(&[2.0], 1.0));
        assert_eq!(t.kind, NormalKind::Convex);
        let back = transform_normal(&t).unwrap();
        assert!((back.delta - n.delta).abs() <= 1e-12);
    }

    #[test]
    fn membership_examples() {
        let e = Ellipsoid::new(lp(&[0.0], 2.0), DMatrix::identity(2, 2)).unwrap();
        assert!(membership(&lp(&[0.0], 1.0), &e));
        let cut = Halfspace::new(vec![0.0], 1.0, lp(&[0.0], 1.0)).unwrap();
        assert!(membership(&lp(&[0.0], 0.5), &cut));
        let square = Polyhedron::lifted_box(&[-1.0], &[1.0], 1.0, 3.0).unwrap();
        assert!(!membership(&lp(&[5.0], 1.0), &square));
        assert!(membership(&lp(&[0.0], 2.0), &square));
    }

    #[test]
    fn empty_polyhedron_is_everything() {
        let p = Polyhedron::default();
        assert_eq!(p.transform().unwrap(), p);
        assert!(p.contains(&lp(&[1e9], 1e-9)));
    }

    #[test]
    fn json_documents() {
        let e =
            AnySet::Ellipsoid(Ellipsoid::new(lp(&[0.0], 2.0), DMatrix::identity(2, 2)).unwrap());
        let text = e.to_json();
        assert!(text.contains("\"schema\": \"radial/v1\""));
        assert!(text.contains("\"kind\": \"ellipsoid\""));
        assert_eq!(AnySet::from_json(&text).unwrap(), e);

        let bad = r#"{"schema":"radial/v1","kind":"ellipsoid","center":{"x":[0],"u":0.5},"shape":[[1,0],[0,1]]}"#;
        assert!(matches!(
            AnySet::from_json(bad),
            Err(Error::ContainmentViolated(_))
        ));
        let wrong = r#"{"schema":"radial/v0","kind":"polyhedron","halfspaces":[]}"#;
        assert!(matches!(AnySet::from_json(wrong), Err(Error::Schema(_))));
    }
}
