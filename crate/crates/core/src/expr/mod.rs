//! Exact symbolic expressions over a jet-space chart.
//!
//! Scalars are rational functions with rational coefficients in the chart's
//! coordinates, group parameters and derivative symbols of opaque functions.
//! Every value is kept in canonical form, which makes zero-testing exact.

mod chart;
mod derivation;
mod expression;
mod gcd;
mod heugcd;
mod poly;
mod render;

use std::collections::HashMap;

use thiserror::Error;

pub use chart::{Chart, JetSymbol, OpaqueFunction, Var, MAX_ARITY};
pub use derivation::{Derivation, FrameDerivation, TotalDerivation};
pub use expression::{normalize, Expression, RawExpr};
pub use gcd::gcd;
pub use poly::{Monomial, Poly};
pub use render::{latex, latex_var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("function `{0}` has too many arguments")]
    ArityTooLarge(String),
    #[error("`{var}` is not an argument of `{func}`")]
    NotAnArgument { func: String, var: String },
    #[error("expression does not belong to the chart")]
    ChartMismatch,
    #[error("binding for `{0}` mentions names outside its declared arguments")]
    ArgumentEscape(String),
}

/// True iff `e` is identically zero.
pub fn is_zero(e: &Expression) -> bool {
    e.is_zero()
}

/// Replaces opaque functions by concrete expressions.
///
/// Each derivative symbol `f_I` becomes the honest partial derivative
/// `∂_I` of the bound expression. Bindings are keyed by function name.
pub fn substitute(
    chart: &Chart,
    e: &Expression,
    bindings: &[(&str, Expression)],
) -> Result<Expression, ExprError> {
    let mut bound: HashMap<u16, &Expression> = HashMap::new();
    for (name, value) in bindings {
        let id = chart.function_id(name)?;
        let args = &chart.function(id).args;
        for v in value.vars() {
            let ok = match v {
                Var::Coord(k) => args.contains(&(k as usize)),
                Var::Param(_) => false,
                Var::Jet(j) => {
                    j.func != id && chart.function(j.func).args.iter().all(|a| args.contains(a))
                }
            };
            if !ok {
                return Err(ExprError::ArgumentEscape(name.to_string()));
            }
        }
        bound.insert(id, value);
    }

    let mut map: HashMap<Var, Expression> = HashMap::new();
    for v in e.vars() {
        let Var::Jet(j) = v else { continue };
        let Some(value) = bound.get(&j.func) else {
            continue;
        };
        let args = &chart.function(j.func).args;
        let mut d = (*value).clone();
        for (pos, &k) in args.iter().enumerate() {
            for _ in 0..j.orders[pos] {
                d = d.partial(chart, Var::Coord(k as u16))?;
            }
        }
        map.insert(v, d);
    }
    if map.is_empty() {
        return Ok(e.clone());
    }
    e.substitute_vars(&map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn chart() -> Chart {
        Chart::new(&["x", "y", "p"], &["a3"])
            .unwrap()
            .with_function("f", &["x", "y", "p"])
            .unwrap()
    }

    fn s(c: &Chart, n: &str) -> Expression {
        c.sym(n).unwrap()
    }

    #[test]
    fn telescoping_sum_is_zero() {
        let c = chart();
        let (x, y) = (s(&c, "x"), s(&c, "y"));
        let e = &x * &(&y + &Expression::one()) - &x * &y - x;
        assert!(is_zero(&e));
    }

    #[test]
    fn quotient_reduces_by_gcd() {
        let c = chart();
        let (x, y) = (s(&c, "x"), s(&c, "y"));
        let e = (&x * &x - &y * &y).checked_div(&(&x - &y)).unwrap();
        assert_eq!(e, &x + &y);

        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let (xv, yv) = loop {
                let a = BigRational::new(rng.gen_range(-50..50).into(), rng.gen_range(1..20).into());
                let b = BigRational::new(rng.gen_range(-50..50).into(), rng.gen_range(1..20).into());
                if a != b {
                    break (a, b);
                }
            };
            let at = |v: Var| if v == Var::Coord(0) { xv.clone() } else { yv.clone() };
            let direct = (&xv * &xv - &yv * &yv) / (&xv - &yv);
            assert_eq!(e.eval(&at).unwrap(), direct);
        }
    }

    #[test]
    fn products_of_jets_commute() {
        let c = chart();
        let fp = c.fun("f", &["p"]).unwrap();
        let fy = c.fun("f", &["y"]).unwrap();
        assert!(is_zero(&(&fp * &fy - &fy * &fp)));
        assert!(is_zero(&(&fp - &fp)));
    }

    #[test]
    fn binomial_identity() {
        let c = chart();
        let (x, y) = (s(&c, "x"), s(&c, "y"));
        let e = (&x + &y).pow(2) - &x * &x - Expression::int(2) * &x * &y - &y * &y;
        assert!(is_zero(&e));
        assert!(is_zero(&Expression::zero()));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let c = chart();
        let x = s(&c, "x");
        assert_eq!(x.checked_div(&(&x - &x)), Err(ExprError::DivisionByZero));
        let raw = RawExpr::Div(
            Box::new(RawExpr::Num(BigRational::from_integer(1.into()))),
            Box::new(RawExpr::Sub(
                Box::new(RawExpr::Var(Var::Coord(0))),
                Box::new(RawExpr::Var(Var::Coord(0))),
            )),
        );
        assert_eq!(normalize(&raw), Err(ExprError::DivisionByZero));
    }

    #[test]
    fn partial_chain_rule() {
        let c = chart();
        let f = c.fun("f", &[]).unwrap();
        let p = c.var("p").unwrap();
        let got = f.pow(2).partial(&c, p).unwrap();
        assert_eq!(got, Expression::int(2) * &f * c.fun("f", &["p"]).unwrap());
        assert!(s(&c, "y").partial(&c, c.var("x").unwrap()).unwrap().is_zero());
        let fp = c.fun("f", &["p"]).unwrap();
        let fy = c.fun("f", &["y"]).unwrap();
        assert_eq!(
            fp.partial(&c, c.var("y").unwrap()).unwrap(),
            fy.partial(&c, p).unwrap()
        );
        assert_eq!(fp.partial(&c, c.var("y").unwrap()).unwrap(), c.fun("f", &["y", "p"]).unwrap());
    }

    #[test]
    fn partial_by_unknown_name_fails() {
        let c = chart();
        assert!(matches!(
            s(&c, "x").partial(&c, Var::Coord(9)),
            Err(ExprError::UnknownName(_))
        ));
    }

    #[test]
    fn substitution_of_concrete_functions() {
        let c = chart();
        let (x, y, p) = (s(&c, "x"), s(&c, "y"), s(&c, "p"));
        let fppp = c.fun("f", &["p", "p", "p"]).unwrap();
        assert_eq!(
            substitute(&c, &fppp, &[("f", p.pow(3))]).unwrap(),
            Expression::int(6)
        );
        let f = c.fun("f", &[]).unwrap();
        assert!(substitute(&c, &f, &[("f", Expression::zero())]).unwrap().is_zero());

        // I1 = -1/4 f_p^2 - f_y + 1/2 D_x f_p at Painlevé I.
        let fp = c.fun("f", &["p"]).unwrap();
        let dx_fp = c.fun("f", &["x", "p"]).unwrap()
            + &p * c.fun("f", &["y", "p"]).unwrap()
            + &f * c.fun("f", &["p", "p"]).unwrap();
        let i1 = Expression::ratio(-1, 4) * fp.pow(2) - c.fun("f", &["y"]).unwrap()
            + Expression::ratio(1, 2) * dx_fp;
        let pain = Expression::int(6) * y.pow(2) + x;
        assert_eq!(
            substitute(&c, &i1, &[("f", pain)]).unwrap(),
            Expression::int(-12) * y
        );
    }

    #[test]
    fn substitution_rejects_escaping_arguments() {
        let c = Chart::new(&["x", "y", "p"], &["a3"])
            .unwrap()
            .with_function("eta", &["x", "y"])
            .unwrap();
        let eta = c.fun("eta", &[]).unwrap();
        assert_eq!(
            substitute(&c, &eta, &[("eta", s(&c, "p"))]),
            Err(ExprError::ArgumentEscape("eta".into()))
        );
        assert!(substitute(&c, &eta, &[("eta", s(&c, "a3"))]).is_err());
    }

    #[test]
    fn canonical_zero_is_unique() {
        let c = chart();
        let x = s(&c, "x");
        let z = &x.checked_div(&x).unwrap() - &Expression::one();
        assert_eq!(z, Expression::zero());
        assert!(z.numer().is_zero() && z.denom().is_one());
    }
}
