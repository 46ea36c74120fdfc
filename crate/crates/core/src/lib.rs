//! Exact verification of finite polynomial and harmonic-number identities
//! built from binomial coefficients at integer and half-integer arguments.

pub mod beta;
pub mod corpus;
pub mod dsl;
pub mod error;
pub mod exact;
pub mod model;
pub mod poly;
pub mod report;
pub mod special;

pub use beta::{
    beta_transform, central_transform_uv, central_transform_v, differentiate, differentiate_traced,
    eval_closed, verify_closed, ClosedIdentity,
};
pub use error::{Error, Result};
pub use exact::{HalfInt, Monomial, Rational, SymConst};
pub use model::{load_identity, Identity, Side, Status};
pub use poly::{verify_poly, verify_poly_range, DensePoly};
pub use report::{Point, Verdict, VerificationReport};
