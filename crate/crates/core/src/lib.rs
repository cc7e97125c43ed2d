//! Exact symbolic calculus on infinite jet spaces.
//!
//! Expressions are polynomials in the canonical coordinates `(x^i, p^j_σ)`
//! of `J^∞π` (plus named constant parameters) with rational coefficients.
//! On top of them the crate provides total derivatives, C-differential
//! operators, the universal linearization `ℓ_F`, evolutionary derivations
//! `э_G`, the Jacobi bracket `{F, G}`, the Hessian `Hess_F`, and exact
//! residual checks for the identities relating them.
//!
//! ```
//! use jetcalc_core::{jacobi_bracket, PolyExpr, Signature, VectorOperator};
//!
//! let sig = Signature::new(["x"], ["u"], ["c"]).unwrap();
//! let p = PolyExpr::jet(&sig, 0, &[1]).unwrap();
//! let c = PolyExpr::param(&sig, "c").unwrap();
//! let x = PolyExpr::base(&sig, 0).unwrap();
//! let f = VectorOperator::scalar(&p * &p);
//! let g = VectorOperator::scalar(&p + &(&c * &x));
//! assert_eq!(jacobi_bracket(&f, &g).unwrap().to_string(), "2*c*u_x");
//! ```

pub mod cdiff;
pub mod error;
pub mod identities;
pub mod json;
pub mod multiindex;
pub mod structures;
pub mod symexpr;
pub mod varcalc;

pub use cdiff::CDiffOperator;
pub use error::{JetError, Result};
pub use identities::{Residual, ResidualValue};
pub use multiindex::MultiIndex;
pub use symexpr::{JetCoordinate, Monomial, PolyExpr, Rational, Signature};
pub use varcalc::{
    ad_apply, evolutionary_apply, evolutionary_apply_vec, hessian_form, hessian_operator,
    jacobi_bracket, jacobi_bracket_coord, linearize, VectorOperator,
};
