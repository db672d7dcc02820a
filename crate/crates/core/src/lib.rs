//! Radial transformations of points, sets and functions.
//!
//! The point map `Γ(x, u) = (x, 1)/u` is an involution of `E × R₊₊`. It
//! sends halfspaces, polyhedra and ellipsoids to sets of the same kind
//! ([`sets`]) and induces the upper transform
//! `f^Γ(y) = sup{v > 0 : v·f(y/v) ≤ 1}` of nonnegative functions
//! ([`transform`]). For upper radial `f`, maximizing `f` is equivalent to
//! minimizing `f^Γ` ([`optimize`]), with closed-form rules for scaling,
//! composition, minima, maxima, gauges and derivatives ([`calculus`]).
//!
//! ```
//! use radial::{catalog, DualHandle};
//!
//! let f = catalog::hemisphere(1);
//! let dual = DualHandle::upper(f);
//! let v = dual.value(&[1.0]).unwrap().value();
//! assert!((v - 2f64.sqrt()).abs() < 1e-9);
//! ```

pub mod calculus;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod expr;
pub mod ext;
pub mod function;
pub mod grid;
pub mod linalg;
pub mod optimize;
pub mod sets;
pub mod transform;

pub use calculus::{
    dual_gradient, dual_hessian, dual_subgradient, fractional_map, gauge, general_transform,
    rule_kth, rule_linear, rule_max, rule_min, rule_scale, KthKind, SetOracle, TransformRule,
};
pub use error::{Error, Result};
pub use ext::{gamma_point, optimality_product, ExtPos, LiftedPoint, Positive};
pub use function::{gradient, parse_function, perspective, FunctionOracle, RadialityMeta, Tri};
pub use optimize::{
    map_dual_to_primal, map_primal_to_dual, map_stationary, solve_via_dual,
    solve_via_dual_constrained, Certificate, DualSolution, PrimalSolution, SolverParams,
};
pub use sets::{
    membership, transform_normal, AnySet, Ellipsoid, Halfspace, NormalKind, NormalVector,
    Polyhedron, RadialSet,
};
pub use transform::{
    check_radial, duality_residual, lower_value, upper_value, CheckConfig, DualHandle,
    RadialityReport, Sense, TransformSettings, Verdict,
};
