//! Exact fixed divisors of sparse exponential polynomials over `Z`,
//! imaginary quadratic rings of integers and matrix rings `M_n(R)`, with
//! certified searches for Selfridge-type divisibility solutions.

pub mod cli;
pub mod error;
pub mod fixdiv;
pub mod ideal;
pub mod io;
pub mod matrix;
pub mod par;
pub mod parse;
pub mod poly;
pub mod residue;
pub mod ring;
pub mod search;
pub mod selfridge;

pub use error::{Error, Result};
pub use fixdiv::{fixdiv_int, fixdiv_matrix, fixdiv_ring, Certification, FixdivMode, MatrixFixdiv};
pub use ideal::Ideal;
pub use matrix::{MatR, SpectralClass};
pub use poly::{MatrixPoly, ScalarPoly};
pub use ring::{Ring, RingElem};
pub use search::{bound_b_norm, check, check_a, check_b1, check_b2, search_b, search_tuples, SearchConfig};
pub use selfridge::{base_b_pairs, divides_fixdiv, ruderman_pairs, selfridge_pairs, PairReport};
