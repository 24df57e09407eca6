//! Plain-text and LaTeX rendering of canonical expressions.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::chart::{Chart, Var};
use super::poly::Poly;
use super::Expression;

pub(crate) struct Text<'a> {
    pub chart: &'a Chart,
    pub expr: &'a Expression,
}

impl fmt::Display for Text<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |v: Var| self.chart.var_name(v);
        let num = self.expr.numer();
        let den = self.expr.denom();
        if den.is_one() {
            return write!(f, "{}", num.display_with(&name));
        }
        if num.len() == 1 {
            write!(f, "{}", num.display_with(&name))?;
        } else {
            write!(f, "({})", num.display_with(&name))?;
        }
        let (m, _) = &den.terms()[0];
        if den.len() == 1 && m.iter().count() == 1 {
            write!(f, "/{}", den.display_with(&name))
        } else {
            write!(f, "/({})", den.display_with(&name))
        }
    }
}

/// LaTeX name of an indeterminate: `a_{3}`, `f_{yp}`, `F1_{dx1 dx2}`.
pub fn latex_var(chart: &Chart, v: Var) -> String {
    match v {
        Var::Jet(j) if j.order() > 0 => {
            let full = chart.var_name(v);
            let (head, tail) = full.split_once('_').expect("jet names carry a suffix");
            format!("{}_{{{}}}", head, tail.replace('_', " "))
        }
        _ => {
            let n = chart.var_name(v);
            let split = n.trim_end_matches(|c: char| c.is_ascii_digit()).len();
            if split > 0 && split < n.len() {
                format!("{}_{{{}}}", &n[..split], &n[split..])
            } else {
                n
            }
        }
    }
}

fn latex_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    }
}

fn latex_poly(chart: &Chart, p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        let mut parts = Vec::new();
        if !a.is_one() || m.is_one() {
            parts.push(latex_rational(&a));
        }
        for (v, e) in m.iter() {
            let n = latex_var(chart, v);
            if e > 1 {
                parts.push(format!("{{{}}}^{{{}}}", n, e));
            } else {
                parts.push(n);
            }
        }
        out.push_str(&parts.join(" "));
    }
    out
}

/// LaTeX rendering of an expression.
pub fn latex(chart: &Chart, e: &Expression) -> String {
    let num = latex_poly(chart, e.numer());
    if e.denom().is_one() {
        num
    } else {
        format!("\\frac{{{}}}{{{}}}", num, latex_poly(chart, e.denom()))
    }
}
