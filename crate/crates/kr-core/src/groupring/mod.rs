//! Exact arithmetic in the integral group ring of the weight lattice and in
//! its localization at geometric-series denominators.
//!
//! Four layers build on each other:
//!
//! * [`GroupRingElem`]: finite integer combinations of formal exponentials
//!   `e^w` of (possibly fractional) weights, with exact division by binomial
//!   factors `1 - e^w` and `1 + e^w`.
//! * [`GeoFraction`]: quotients whose denominators stay factored as a
//!   positive integer times a multiset of binomial factors, so reciprocals
//!   of products of such factors never need expanding.
//! * [`AltForm`]: Weyl-alternating elements stored by their dominant
//!   exponents, which keeps character-sized computations near-linear.
//! * [`RandomPoint`]: evaluation of all of the above at a random point of
//!   the torus over the field with `2^61 - 1` elements, used for fast
//!   probabilistic cross-checks of exact identities.

mod alt;
mod elem;
mod eval;
mod fraction;

pub use alt::AltForm;
pub use elem::GroupRingElem;
pub use eval::{addmod, modinv, modpow, mulmod, submod, RandomPoint, PRIME};
pub use fraction::{DenomFactor, FactorSign, GeoFraction};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RingError {
    #[error("division by the vanishing binomial factor 1 - e^0")]
    DivisionByZeroFraction,
    #[error("element is not exactly divisible by {0}")]
    NotDivisible(String),
    #[error("random point with seed {seed} hit a zero denominator")]
    UnluckyPoint { seed: u64 },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
}
