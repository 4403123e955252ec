pub mod arc_ring;
pub mod bimodule;
pub mod braid;
pub mod error;
pub mod k0;
pub mod laurent;
pub mod linalg;
pub mod planar;
pub mod scalar;
pub mod slnaction;
pub mod tqft;

pub use error::{Error, Result};
pub use laurent::LaurentPoly;
pub use num_bigint::BigInt;
pub use scalar::Coeff;

/// Laurent polynomials with arbitrary-precision coefficients.
pub type Laurent = LaurentPoly<num_bigint::BigInt>;

/// Laurent polynomials with machine-integer coefficients.
pub type LaurentI64 = LaurentPoly<i64>;

/// `K_0` operators and classes over arbitrary-precision integers.
pub type K0OperatorBig = k0::K0Operator<BigInt>;
pub type K0ClassBig = k0::K0Class<BigInt>;
