//! Exact computation of open-closed topological string amplitudes on the
//! real quintic: special-geometry generators, Feynman-diagram assembly of
//! the amplitudes, holomorphic-ambiguity fixing and BPS number extraction.
//!
//! Everything is exact rational arithmetic; no floating point appears
//! anywhere, and re-running any computation yields bit-identical output.

pub mod series;
pub mod ratfun;
pub mod geometry;
pub mod ring;
pub mod feynman;
pub mod solver;
pub mod cache;
pub mod golden;

pub use num_bigint::BigInt;
pub use num_rational::BigRational as Rat;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("variable mismatch: {0} vs {1}")]
    VarMismatch(&'static str, &'static str),
    #[error("log grade {0} exceeds the supported bound 3")]
    LogOverflow(usize),
    #[error("division by a series with no nonzero tracked coefficient")]
    DivByZeroSeries,
    #[error("quarter-integer exponent: exponent grid is fixed at step 1/2")]
    OffGrid,
    #[error("reversion input must be an integer-exponent series with leading term z^1, coefficient 1")]
    BadReversionInput,
    #[error("composition undefined: inner series must have leading exponent 1{0}")]
    BadComposition(&'static str),
    #[error("insufficient truncation: need order {need2}/2, have {have2}/2")]
    InsufficientTruncation { need2: i64, have2: i64 },
    #[error("wrong basis: expected {0}")]
    WrongBasis(&'static str),
    #[error("section weight mismatch: element carries {found:?}, caller expects {expected:?}")]
    WeightMismatch { expected: (i64, i64), found: (i64, i64) },
    #[error("unknown generator `{0}` for this basis")]
    UnknownGenerator(String),
    #[error("division by a field element outside the invertible class (z^a (1-3125z)^b monomials)")]
    NonUnitField,
    #[error("field element denominator vanishes at z=0 beyond its declared pole order")]
    UndeclaredPole,
    #[error("linear system for the holomorphic ambiguity is {0}")]
    AmbiguitySystem(&'static str),
    #[error("({g},{h}) is in the excluded base set (0,0),(1,0),(0,1),(0,2)")]
    ExcludedBase { g: u32, h: u32 },
    #[error("({g},{h}) is outside the verified range; pass --experimental to compute it")]
    OutOfRange { g: u32, h: u32 },
    #[error("missing amplitude F^{{({g},{h})}}_{n} in the store")]
    MissingAmplitude { g: u32, h: u32, n: u32 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cache integrity failure: {0}")]
    CacheCorrupt(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Convenience: an exact rational from an integer literal.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Convenience: the exact fraction n/d.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}
