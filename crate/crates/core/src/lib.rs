//! Computational additive combinatorics in F_2^n.
//!
//! The crate provides exact sumset arithmetic on subsets of F_2^I, the
//! lex-order compression operators `C_J` and their fixpoints, the
//! counter-redistribution defect process behind expansion bounds for
//! shift-minimal downsets, exhaustive scans of downsets and SMDs for
//! Freiman-type covering quantities, and the binary-entropy optimization
//! giving the Hamming-ball lower-bound exponent.

pub mod entropy;
pub mod error;
pub mod expansion;
pub mod group;
pub mod io;
pub mod lex;
pub mod ratio;
pub mod sample;
pub mod scan;

pub use error::{Error, Result};
pub use group::{IndexSet, Point, PointSet};
