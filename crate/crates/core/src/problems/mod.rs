//! Concrete equivalence problems built on the lower layers.
//!
//! Each problem has a fixed chart:
//!
//! | problem            | coordinates            | parameters | functions              |
//! |--------------------|------------------------|------------|------------------------|
//! | second-order ODE   | `x y p`                | `a3`       | `f(x,y,p)`             |
//! | ODE system         | `t x1 x2 dx1 dx2`      |            | `F1, F2` on all five   |
//! | PDE system         | `x1 x2 u u1 u2`        |            | `f11 f12 f22` on all   |
//! | third-order swell  | `x y p q r`            |            | `xi, eta` on `x y p`   |

mod ode2;
mod swell;
mod systems;

use thiserror::Error;

use crate::exterior::FormError;
use crate::expr::{Chart, ExprError, Expression, Var};
use crate::pfaffian::PfaffianError;

pub use ode2::{
    check_flat_ode2, ode2_chart, painleve_map, pullback_ode2, run_equivalence_ode2, syzygies_ode2,
    EquivalenceReport, Ode2Problem, PainleveAnswer, PainleveVerdict, StructuralGroup, Syzygies,
};
pub use swell::{contact_prolongation_ode3, swell_chart, ProlongationOde3};
pub use systems::{check_flat_ode_system, check_flat_pde_system, ode_system_chart, pde_system_chart};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("vanishing Jacobian: {0} is identically zero")]
    VanishingJacobian(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Pfaffian(#[from] PfaffianError),
}

/// A named residual of a flatness test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    pub name: String,
    pub value: Expression,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatnessReport {
    pub flat: bool,
    pub residuals: Vec<Residual>,
}

impl FlatnessReport {
    fn new(residuals: Vec<Residual>) -> Self {
        FlatnessReport {
            flat: residuals.iter().all(|r| r.value.is_zero()),
            residuals,
        }
    }

    /// Residuals that do not vanish.
    pub fn failing(&self) -> impl Iterator<Item = &Residual> {
        self.residuals.iter().filter(|r| !r.value.is_zero())
    }
}

/// Rejects expressions using parameters, or coordinates outside `allowed`.
/// Opaque derivative symbols are accepted.
fn ensure_vars(chart: &Chart, e: &Expression, allowed: &[&str], what: &str) -> Result<(), ProblemError> {
    for v in e.vars() {
        let ok = match v {
            Var::Jet(_) => true,
            Var::Param(_) => false,
            Var::Coord(_) => allowed.iter().any(|n| chart.var(n).ok() == Some(v)),
        };
        if !ok {
            let name = if chart.contains(v) {
                chart.var_name(v)
            } else {
                format!("{v:?}")
            };
            return Err(ProblemError::Domain(format!("{what} may not depend on {name}")));
        }
    }
    Ok(())
}

/// Rejects expressions that contain any opaque derivative symbol.
fn ensure_concrete(chart: &Chart, e: &Expression, what: &str) -> Result<(), ProblemError> {
    if let Some(v) = e.vars().into_iter().find(|v| matches!(v, Var::Jet(_))) {
        return Err(ProblemError::Domain(format!(
            "{what} must be explicit, found {}",
            chart.var_name(v)
        )));
    }
    Ok(())
}
