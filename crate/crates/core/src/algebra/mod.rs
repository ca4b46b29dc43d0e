//! Exact polynomial algebra over the rationals: arithmetic, resultants,
//! Gröbner bases, decomposition and certified real root isolation.

pub mod complex;
pub mod decompose;
pub mod gcd;
pub mod groebner;
pub mod interval;
pub mod poly;
pub mod rational;
pub mod resultant;
pub mod roots;

pub use complex::{substitute, ComplexPoly, ComplexPolyPair, ComplexRational, RationalFunction};
pub use decompose::{decompose_zero_dimensional, Component, Decomposition};
pub use groebner::{groebner_basis, groebner_elimination, Budget};
pub use poly::Poly;
pub use rational::Rational;
pub use resultant::resultant;
pub use interval::Interval;
pub use roots::{real_roots_univariate, real_solve, OpenInterval, RealPoint};

pub type ExactPoly = Poly<Rational>;
