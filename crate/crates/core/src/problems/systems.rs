//! Flatness tests for second-order ODE systems and PDE systems.

use crate::expr::{Chart, Derivation, Expression};

use super::{ensure_vars, FlatnessReport, ProblemError, Residual};

/// Chart `(t, x1, x2, dx1, dx2)` with `F1, F2` on all coordinates.
pub fn ode_system_chart() -> Chart {
    let coords = ["t", "x1", "x2", "dx1", "dx2"];
    Chart::new(&coords, &[])
        .and_then(|c| c.with_function("F1", &coords))
        .and_then(|c| c.with_function("F2", &coords))
        .expect("fixed chart")
}

/// Chart `(x1, x2, u, u1, u2)` with `f11, f12, f22` on all coordinates.
pub fn pde_system_chart() -> Chart {
    let coords = ["x1", "x2", "u", "u1", "u2"];
    Chart::new(&coords, &[])
        .and_then(|c| c.with_function("f11", &coords))
        .and_then(|c| c.with_function("f12", &coords))
        .and_then(|c| c.with_function("f22", &coords))
        .expect("fixed chart")
}

fn on_chart(chart: &Chart, e: &Expression, what: &str) -> Result<(), ProblemError> {
    chart
        .check(e)
        .map_err(|_| ProblemError::Domain(format!("{what} is not on the chart")))?;
    ensure_vars(chart, e, &chart.coords().iter().map(String::as_str).collect::<Vec<_>>(), what)
}

/// Conditions for `ẍ^a = F^a(t, x, ẋ)` to be point-equivalent to `ẍ = 0`.
pub fn check_flat_ode_system(f1: &Expression, f2: &Expression) -> Result<FlatnessReport, ProblemError> {
    let chart = ode_system_chart();
    on_chart(&chart, f1, "F1")?;
    on_chart(&chart, f2, "F2")?;
    let d = |e: &Expression, wrt: &[&str]| -> Result<Expression, ProblemError> {
        let mut out = e.clone();
        for w in wrt {
            out = out.partial(&chart, chart.var(w)?)?;
        }
        Ok(out)
    };
    let dt = Derivation::from_pairs(
        &chart,
        "D_t",
        &[
            ("t", Expression::one()),
            ("x1", chart.sym("dx1")?),
            ("x2", chart.sym("dx2")?),
            ("dx1", f1.clone()),
            ("dx2", f2.clone()),
        ],
    )?;
    let dtd = |e: &Expression, wrt: &str| -> Result<Expression, ProblemError> {
        Ok(dt.apply(&chart, &d(e, &[wrt])?)?)
    };
    let k = Expression::int;

    let f1_1 = d(f1, &["dx1"])?;
    let f1_2 = d(f1, &["dx2"])?;
    let f2_1 = d(f2, &["dx1"])?;
    let f2_2 = d(f2, &["dx2"])?;
    let residuals = vec![
        ("F2_dx1_dx1_dx1", d(f2, &["dx1", "dx1", "dx1"])?),
        ("F1_dx2_dx2_dx2", d(f1, &["dx2", "dx2", "dx2"])?),
        (
            "F2_dx2_dx2_dx2 - 3*F1_dx1_dx2_dx2",
            d(f2, &["dx2", "dx2", "dx2"])? - k(3) * d(f1, &["dx1", "dx2", "dx2"])?,
        ),
        (
            "F1_dx1_dx1_dx1 - 3*F2_dx1_dx1_dx2",
            d(f1, &["dx1", "dx1", "dx1"])? - k(3) * d(f2, &["dx1", "dx1", "dx2"])?,
        ),
        (
            "F1_dx1_dx1_dx2 - F2_dx1_dx2_dx2",
            d(f1, &["dx1", "dx1", "dx2"])? - d(f2, &["dx1", "dx2", "dx2"])?,
        ),
        (
            "2*D_t(F1_dx2) - F1_dx2*F1_dx1 - F2_dx2*F1_dx2 - 4*F1_x2",
            k(2) * dtd(f1, "dx2")? - &f1_2 * &f1_1 - &f2_2 * &f1_2 - k(4) * d(f1, &["x2"])?,
        ),
        (
            "-F2_dx2^2 - 2*D_t(F1_dx1) - 4*F2_x2 + 4*F1_x1 + 2*D_t(F2_dx2) + F1_dx1^2",
            -f2_2.pow(2) - k(2) * dtd(f1, "dx1")? - k(4) * d(f2, &["x2"])? + k(4) * d(f1, &["x1"])?
                + k(2) * dtd(f2, "dx2")?
                + f1_1.pow(2),
        ),
        (
            "-2*D_t(F2_dx1) + F2_dx2*F2_dx1 + 4*F2_x1 + F1_dx1*F2_dx1",
            -(k(2) * dtd(f2, "dx1")?) + &f2_2 * &f2_1 + k(4) * d(f2, &["x1"])? + &f1_1 * &f2_1,
        ),
    ];
    Ok(FlatnessReport::new(
        residuals
            .into_iter()
            .map(|(name, value)| Residual {
                name: name.into(),
                value,
            })
            .collect(),
    ))
}

/// Conditions for `u_{αβ} = f_{αβ}(x, u, u')` to be equivalent to `u'' = 0`.
pub fn check_flat_pde_system(
    f11: &Expression,
    f12: &Expression,
    f22: &Expression,
) -> Result<FlatnessReport, ProblemError> {
    let chart = pde_system_chart();
    on_chart(&chart, f11, "f11")?;
    on_chart(&chart, f12, "f12")?;
    on_chart(&chart, f22, "f22")?;
    let (u1, u2) = (chart.var("u1")?, chart.var("u2")?);
    let d2 = |e: &Expression, a, b| -> Result<Expression, ProblemError> {
        Ok(e.partial(&chart, a)?.partial(&chart, b)?)
    };
    let residuals = vec![
        ("f11_u2_u2", d2(f11, u2, u2)?),
        ("f22_u1_u1", d2(f22, u1, u1)?),
        ("f12_u2_u2 - f11_u1_u2", d2(f12, u2, u2)? - d2(f11, u1, u2)?),
        ("f22_u1_u2", d2(f22, u1, u2)?),
        (
            "f11_u1_u1 - 4*f12_u1_u2 + f22_u2_u2",
            d2(f11, u1, u1)? - Expression::int(4) * d2(f12, u1, u2)? + d2(f22, u2, u2)?,
        ),
    ];
    Ok(FlatnessReport::new(
        residuals
            .into_iter()
            .map(|(name, value)| Residual {
                name: name.into(),
                value,
            })
            .collect(),
    ))
}
