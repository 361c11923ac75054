//! Computer-algebra kernel for conformally parametrized surfaces in the
//! superspace `R^(1,1|2)` and their classical counterparts.
//!
//! The crate is organized in layers:
//!
//! * [`ring`] — the coefficient-ring abstraction shared by scalars and jets;
//! * [`grassmann`] — exact arithmetic in a finite-generator complex Grassmann
//!   algebra (bitmask monomials, canonical ordering, nilpotent series);
//! * [`jet`] — truncated bivariate Taylor jets in the even coordinates;
//! * [`superfield`] — Grassmann elements over jets with the two distinguished
//!   odd coordinates, covariant derivatives `D±` and SUSY generators `J±`;
//! * [`geometry`] — frame matrices, Gauss-Codazzi residuals, zero-curvature
//!   condition, fundamental forms and curvatures (SUSY and classical);
//! * [`algebra`] — graded structure constants, brackets, adjoint exponentials
//!   and polynomial vector-field realizations of the symmetry algebras;
//! * [`catalog`] — builders and a verification driver for the invariant
//!   solution families;
//! * [`report`] — machine-readable residual reports.

pub mod algebra;
pub mod catalog;
pub mod geometry;
pub mod grassmann;
pub mod jet;
pub mod report;
pub mod ring;
pub mod superfield;

pub use grassmann::{Generator, GrassmannElement, GrassmannError, Parity};
pub use jet::{BasePoint, Jet, JetError};
pub use ring::{Ring, RingError};
pub use superfield::{Superfield, SuperVector3, SuperfieldError};
