//! Construction and exhaustive verification of Sidon sets of order `h`
//! (B_h[g] sets) and of Sidon systems for integer linear forms.
//!
//! - [`ff`]: finite fields GF(p^(k·h)), generators and discrete logs
//! - [`classical`]: representation functions, the B_h[g] predicate and the
//!   Bose–Chowla set
//! - [`linear_form`]: linear forms, system profiles, translation and the
//!   counting bound
//! - [`admissibility`]: primes `q` with `gcd(q^h - 1, c_i) = 1`
//! - [`builder`]: systems of multiplicity at most `h!` and lower-bound witnesses
//! - [`oracle`]: exact extremal values by exhaustive search
//! - [`cli`]: the `sidon` command-line tool

pub mod admissibility;
pub mod arith;
pub mod builder;
pub mod classical;
pub mod cli;
pub mod error;
pub mod ff;
pub mod linear_form;
pub mod oracle;

pub use error::{Error, Result};
