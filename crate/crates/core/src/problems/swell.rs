//! Prolongation of a contact transformation to third-order jets.
//!
//! This is the computation a direct method has to carry out before it can
//! even state the equivalence problem for `y''' = f`; it is kept as a
//! benchmark of expression growth.

use crate::expr::{Chart, Derivation, Expression};

use super::{ensure_vars, ProblemError};

/// Chart `(x, y, p, q, r)` with `xi(x, y, p)` and `eta(x, y, p)`.
pub fn swell_chart() -> Chart {
    Chart::new(&["x", "y", "p", "q", "r"], &[])
        .and_then(|c| c.with_function("xi", &["x", "y", "p"]))
        .and_then(|c| c.with_function("eta", &["x", "y", "p"]))
        .expect("fixed chart")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProlongationOde3 {
    pub pbar: Expression,
    pub qbar: Expression,
    pub rbar: Expression,
    /// Numerator monomial counts of `p̄, q̄, r̄`.
    pub monomials: [usize; 3],
}

/// `p̄ = D_x η / D_x ξ`, `q̄ = D_x p̄ / D_x ξ`, `r̄ = D_x q̄ / D_x ξ` with
/// `D_x = ∂_x + p ∂_y + q ∂_p + r ∂_q`.
pub fn contact_prolongation_ode3(xi: &Expression, eta: &Expression) -> Result<ProlongationOde3, ProblemError> {
    let chart = swell_chart();
    for (e, what) in [(xi, "xi"), (eta, "eta")] {
        chart
            .check(e)
            .map_err(|_| ProblemError::Domain(format!("{what} is not on the chart")))?;
        ensure_vars(&chart, e, &["x", "y", "p"], what)?;
    }
    let dx = Derivation::from_pairs(
        &chart,
        "D_x",
        &[
            ("x", Expression::one()),
            ("y", chart.sym("p")?),
            ("p", chart.sym("q")?),
            ("q", chart.sym("r")?),
        ],
    )?;
    let dxi = dx.apply(&chart, xi)?;
    if dxi.is_zero() {
        return Err(ProblemError::VanishingJacobian("D_x(xi)".into()));
    }
    let step = |e: &Expression| -> Result<Expression, ProblemError> {
        Ok(dx.apply(&chart, e)?.checked_div(&dxi)?)
    };
    let pbar = step(eta)?;
    let qbar = step(&pbar)?;
    let rbar = step(&qbar)?;
    let monomials = [pbar.numer().len(), qbar.numer().len(), rbar.numer().len()];
    Ok(ProlongationOde3 {
        pbar,
        qbar,
        rbar,
        monomials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_shift() {
        let c = swell_chart();
        let s = |n: &str| c.sym(n).unwrap();
        let out = contact_prolongation_ode3(&s("x"), &s("y")).unwrap();
        assert_eq!((out.pbar, out.qbar, out.rbar), (s("p"), s("q"), s("r")));
        assert_eq!(out.monomials, [1, 1, 1]);

        let out = contact_prolongation_ode3(&s("x"), &(s("y") + s("x").pow(2))).unwrap();
        assert_eq!(out.pbar, s("p") + Expression::int(2) * s("x"));
        assert_eq!(out.qbar, s("q") + Expression::int(2));
        assert_eq!(out.rbar, s("r"));
    }

    #[test]
    fn constant_xi_is_rejected() {
        let c = swell_chart();
        assert!(matches!(
            contact_prolongation_ode3(&Expression::int(1), &c.sym("y").unwrap()),
            Err(ProblemError::VanishingJacobian(_))
        ));
    }
}
