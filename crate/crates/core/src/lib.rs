//! Fox H-functions on the positive real ray.
//!
//! [`spec`] holds the parameter algebra and the JSON format, [`eval`] the
//! Mellin–Barnes contour and residue-series evaluators, [`foxwright`] the
//! Fox–Wright and Mittag-Leffler series, [`transforms`] the Laplace and
//! Hankel images and the measure representations, and [`harness`] the
//! numerical property checkers with the theorem registry.  [`cli`] is the
//! `foxh` command-line front end.
//!
//! The `examples/` directory walks through each of these:
//!
//! ```text
//! cargo run -p foxh --example evaluate_h
//! cargo run -p foxh --example fox_wright
//! cargo run -p foxh --example classify_and_reshape
//! cargo run -p foxh --example transforms
//! cargo run -p foxh --example representations
//! cargo run -p foxh --example checkers
//! cargo run -p foxh --example theorem_suite -- h3 5
//! cargo run -p foxh --example command_line
//! ```

pub mod bessel;
pub mod cli;
pub mod eval;
pub mod foxwright;
pub mod gamma;
pub mod harness;
pub mod quad;
pub mod spec;
pub mod transforms;

#[cfg(test)]
mod proptests;
