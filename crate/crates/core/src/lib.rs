//! Inverse Stefan problems solved with special-function heat series, and a
//! statevector simulation of the HHL algorithm for the resulting systems.
//!
//! The modules follow the data flow:
//!
//! * [`specfun`]: Gamma, Pochhammer, Kummer and Laguerre functions and the
//!   two heat-equation basis families;
//! * [`heat_series`]: truncated expansions built from those bases;
//! * [`problems`]: the three problem kinds and their assembly into labelled
//!   linear systems;
//! * [`linsys`]: Hermitian embedding, padding, spectral scaling and the
//!   classical LU reference;
//! * [`hhl`]: the quantum linear-system algorithm on a dense statevector;
//! * [`problem_file`], [`run`] and [`report`]: the `stefan-hhl` command line.
//!
//! The guide in `book/` walks through each of these with runnable examples.
//!
//! ```
//! use stefan_hhl::problem_file::parse_problem_str;
//! use stefan_hhl::linsys::LinearSystem;
//! use stefan_hhl::hhl::{solve_system, PipelineOptions};
//!
//! let spec = parse_problem_str(
//!     "kind = model\nnu = 1\ndiffusivity = 1\nalpha = 2\nf_taylor = [0, 3]\n\
//!      conductivity = 1\nlatent_heat = 1\ndensity = 1\ntruncation = 1\n",
//! )?;
//! let sys = spec.assemble()?;
//! let linear = LinearSystem::from_real(&sys.matrix, &sys.rhs)?;
//! let hhl = solve_system(&linear, &PipelineOptions::new(4))?;
//! assert!(hhl.fidelity > 0.999);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

// Reference constants keep every published digit; `!(x > 0.0)` is used on
// purpose so NaN fails validation.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod heat_series;
pub mod hhl;
pub mod linsys;
pub mod problem_file;
pub mod problems;
pub mod report;
pub mod run;
pub mod specfun;

// The guide's code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/special-functions.md")]
    pub mod special_functions {}
    #[doc = include_str!("../../../book/src/heat-series.md")]
    pub mod heat_series {}
    #[doc = include_str!("../../../book/src/problems.md")]
    pub mod problems {}
    #[doc = include_str!("../../../book/src/linear-systems.md")]
    pub mod linear_systems {}
    #[doc = include_str!("../../../book/src/hhl.md")]
    pub mod hhl {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
