//! Rational points on genus-2 curves `y^2 = f(x)`.

pub mod chabauty;
pub mod curve;
pub mod descent;
pub mod error;
pub mod factor;
pub mod fields;
pub mod group;
pub mod integer;
pub mod ipoly;
pub mod jacobian;
pub mod local;
pub mod padic;
pub mod pipeline;
pub mod poly;
pub mod real;
pub mod scalar;
pub mod search;
pub mod serial;
pub mod sieve;

pub use error::{Error, Result};
pub use fields::{Fp, Fp2, Zpk};
pub use ipoly::{IPoly, RatPoly};
pub use poly::Poly;
pub use scalar::Scalar;

pub type Int = num_bigint::BigInt;
pub type Rat = num_rational::BigRational;
pub type FpPoly = Poly<Fp>;
