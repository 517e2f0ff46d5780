//! Finite-element laboratory for the weak maximum principle (WMP) of
//! parabolic equations on polygonal domains.
//!
//! The crate builds quasi-uniform triangulations of polygons, assembles
//! Lagrange P1/P2 spaces with mass/stiffness operators, time-steps the heat
//! equation with Dirichlet boundary data (BDF-1..6, a semi-discrete
//! reference, and variable-step dG(0)), and measures the stability
//! constants, symbol/resolvent bounds, transform identities and discrete
//! Green's-function estimates that underpin the WMP.
//!
//! Module map:
//! - [`mesh`]: polygons, conforming triangulations, uniform refinement,
//!   boundary bands and dyadic annuli.
//! - [`fem`]: FE spaces, fields, operators, interpolation/projection,
//!   discrete and regularized delta functions, norms, shifted solves.
//! - [`stepper`]: BDF-k tables and schemes, starting values, semi-discrete
//!   reference, discrete harmonic extension, dG(0), solution splitting.
//! - [`symbol`]: BDF generating symbols on sectors, z-transform/Laplace
//!   consistency, boundary-to-solution maps, resolvent norms, contour
//!   reconstruction.
//! - [`green`]: discrete/reference parabolic Green's functions, the
//!   boundary-band gradient estimate, annulus diagnostics.
//! - [`harness`]: experiment configs, boundary data families, WMP ratio
//!   runs, sweeps and the acceptance suite.

pub mod error;
pub mod fem;
pub mod geom;
pub mod green;
pub mod harness;
pub mod mesh;
pub mod quad;
pub mod sparse;
pub mod stepper;
pub mod symbol;

pub use error::{Error, Result};
pub use geom::Point2;
