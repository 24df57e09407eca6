//! Cartan's equivalence method for differential equations.
//!
//! The crate is layered bottom-up:
//!
//! * [`expr`]: exact rational-function expressions over jet-space charts.
//! * [`linalg`]: Gaussian elimination over the expression field.
//! * [`exterior`]: differential forms, coframes and dual frames.
//! * [`pfaffian`]: linear Pfaffian systems, torsion absorption, Cartan
//!   characters and prolongation.
//! * [`problems`]: concrete equivalence problems (second-order ODEs, ODE and
//!   PDE systems, Painlevé I).

pub mod expr;
pub mod exterior;
pub mod linalg;
pub mod pfaffian;
pub mod problems;

pub use expr::{Chart, Expression, Var};
