//! Composition semigroups of rational functions in one variable.
//!
//! Exact arithmetic is generic over [`scalar::FieldElem`]; the aliases below
//! fix the common fields. Heights, preperiodic points and freeness
//! certificates work over Q; growth enumeration, power series and the
//! fixed-point tests work over any supported field.

pub mod enumerate;
pub mod escape;
pub mod expr;
pub mod freeness;
pub mod growth;
pub mod heights;
pub mod interval;
pub mod kummer;
pub mod poly;
pub mod powerseries;
pub mod preper;
pub mod ratfun;
pub mod scalar;
pub mod words;

pub use interval::HeightInterval;
pub use ratfun::{ProjPoint, RatFun};
pub use scalar::{Field, FieldElem, Fp, PrimeModulus, Rational};
pub use words::Word;

pub type RatFunQ = RatFun<Rational>;
pub type RatFunFp = RatFun<Fp>;
pub type PointQ = ProjPoint<Rational>;
pub type PointFp = ProjPoint<Fp>;
pub type PolyQ = poly::Poly<Rational>;
pub type SeriesQ = powerseries::Series<Rational>;
pub type SeriesFp = powerseries::Series<Fp>;
