//! Exact verification engine for braided tensor products of `U_q(q_n)`-module superalgebras.
//!
//! The core is generic over the scalar field ([`qscalar::QField`]); the aliases below
//! fix it to exact rational functions in `q`.

pub mod actions;
pub mod braidiso;
pub mod cli;
pub mod error;
pub mod invariants;
pub mod presentations;
pub mod qscalar;
pub mod report;
pub mod suites;
pub mod supertensor;
pub mod texpr;

pub use error::{Error, Result};
pub use qscalar::{QField, Scalar, Q73};

pub type Operator = supertensor::TensorOperator<Scalar>;
pub type Element = presentations::Elem<Scalar>;
pub type Algebra = presentations::Presentation<Scalar>;
