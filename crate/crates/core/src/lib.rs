//! Exact diagonalization of the transverse-field Ising model on anisotropic
//! triangular patches, with negativity-based measures of multipartite
//! quantum correlation in ground and thermal states.
//!
//! The pipeline runs [`lattice`] → [`hamiltonian`] → [`eigen`] →
//! [`thermal`] → [`qstate`] / [`mqc`], and [`sweep`] repeats it over
//! parameter grids. The guide in `book/` walks through each step.
//!
//! ```
//! use trimqc::{eigen, hamiltonian::{CouplingParams, HamiltonianOp}, lattice::Lattice, mqc};
//!
//! let lattice = Lattice::new(2)?;
//! let op = HamiltonianOp::new(&lattice, CouplingParams::new(-6.0, 1.0, 1.0))?;
//! let ground = eigen::low_spectrum(&op, 1)?.ground_state();
//! let result = mqc::mqc(&ground, 2)?;
//! assert!(result.t_n > 0.9);
//! # Ok::<(), trimqc::Error>(())
//! ```

pub mod cli;
pub mod eigen;
pub mod error;
pub mod format;
pub mod hamiltonian;
pub mod lattice;
pub mod mqc;
pub mod qstate;
pub mod sweep;
pub mod thermal;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/hamiltonian.md")]
    mod hamiltonian {}
    #[doc = include_str!("../../../book/src/eigensolvers.md")]
    mod eigensolvers {}
    #[doc = include_str!("../../../book/src/negativity.md")]
    mod negativity {}
    #[doc = include_str!("../../../book/src/mqc.md")]
    mod mqc {}
    #[doc = include_str!("../../../book/src/thermal.md")]
    mod thermal {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
