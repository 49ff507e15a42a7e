//! Exact computation and empirical verification of the density of hypersurface
//! sections with quasismooth zero loci on projective simplicial toric
//! varieties over finite fields.
//!
//! The crate is organized along the pipeline:
//! fields ([`ff`]) -> fans and graded rings ([`toric`]) -> closed points
//! ([`points`]) -> jet ranks ([`quasismooth`]) -> exact densities
//! ([`density`]) and local lengths ([`jets`]) -> experiments ([`harness`]).

pub mod error;
pub mod ff;
pub mod intmat;
pub mod linalg;
pub mod points;
pub mod quasismooth;
pub mod toric;

pub use error::{Error, Result};

/// CLI entry point; returns the process exit code.
pub fn run_cli() -> i32 {
    // wired up once the subcommand surface lands
    eprintln!("CLI not yet assembled");
    2
}
