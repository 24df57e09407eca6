//! Test oracles shared by the integration suites. Everything here is written
//! independently of the library's own algorithms: plain rational Gaussian
//! elimination, direct tree evaluation, explicit 2×2 inverses.

#![allow(dead_code)]

use std::collections::HashMap;

use cartan::expr::{Chart, Expression, RawExpr, Var};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::Rng;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn small_rational(rng: &mut StdRng) -> BigRational {
    q(rng.gen_range(-5..=5), rng.gen_range(1..=3))
}

/// Random polynomial in `vars` with at most `terms` terms of degree ≤ `deg`.
pub fn random_poly(rng: &mut StdRng, vars: &[Expression], deg: u32, terms: usize) -> Expression {
    let mut acc = Expression::zero();
    for _ in 0..terms {
        let mut t = Expression::rational(small_rational(rng));
        let d = rng.gen_range(0..=deg);
        for _ in 0..d {
            t = t * &vars[rng.gen_range(0..vars.len())];
        }
        acc = acc + t;
    }
    acc
}

/// Random tree over the given leaves; divisions are by `1 + v²`-style
/// denominators or by leaves, so most trees are defined.
pub fn random_raw(rng: &mut StdRng, leaves: &[Var], depth: u32) -> RawExpr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.4) {
            RawExpr::Num(small_rational(rng))
        } else {
            RawExpr::Var(leaves[rng.gen_range(0..leaves.len())])
        };
    }
    let a = Box::new(random_raw(rng, leaves, depth - 1));
    match rng.gen_range(0..6) {
        0 => RawExpr::Add(a, Box::new(random_raw(rng, leaves, depth - 1))),
        1 => RawExpr::Sub(a, Box::new(random_raw(rng, leaves, depth - 1))),
        2 => RawExpr::Mul(a, Box::new(random_raw(rng, leaves, depth - 1))),
        3 => RawExpr::Div(a, Box::new(random_raw(rng, leaves, depth - 1))),
        4 => RawExpr::Pow(a, rng.gen_range(0..=3)),
        _ => RawExpr::Neg(a),
    }
}

/// Direct evaluation of a tree; `None` on division by zero.
pub fn eval_raw(raw: &RawExpr, point: &HashMap<Var, BigRational>) -> Option<BigRational> {
    Some(match raw {
        RawExpr::Num(c) => c.clone(),
        RawExpr::Var(v) => point[v].clone(),
        RawExpr::Neg(a) => -eval_raw(a, point)?,
        RawExpr::Add(a, b) => eval_raw(a, point)? + eval_raw(b, point)?,
        RawExpr::Sub(a, b) => eval_raw(a, point)? - eval_raw(b, point)?,
        RawExpr::Mul(a, b) => eval_raw(a, point)? * eval_raw(b, point)?,
        RawExpr::Div(a, b) => {
            let d = eval_raw(b, point)?;
            if d.is_zero() {
                return None;
            }
            eval_raw(a, point)? / d
        }
        RawExpr::Pow(a, e) => {
            let base = eval_raw(a, point)?;
            (0..*e).fold(BigRational::one(), |acc, _| acc * &base)
        }
    })
}

pub fn random_point(rng: &mut StdRng, vars: &[Var]) -> HashMap<Var, BigRational> {
    vars.iter()
        .map(|&v| (v, q(rng.gen_range(-40..=40), rng.gen_range(1..=9))))
        .collect()
}

/// Rebuilds a raw tree from the canonical terms of `e`.
pub fn to_raw(e: &Expression) -> RawExpr {
    let poly = |p: &cartan::expr::Poly| -> RawExpr {
        let mut acc = RawExpr::Num(BigRational::zero());
        for (m, c) in p.terms() {
            let mut t = RawExpr::Num(c.clone());
            for (v, k) in m.iter() {
                t = RawExpr::Mul(Box::new(t), Box::new(RawExpr::Pow(Box::new(RawExpr::Var(v)), k)));
            }
            acc = RawExpr::Add(Box::new(acc), Box::new(t));
        }
        acc
    };
    RawExpr::Div(Box::new(poly(e.numer())), Box::new(poly(e.denom())))
}

/// Rank of a rational matrix by plain Gaussian elimination.
pub fn rank_q(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = &m[i][c] / &pivot;
                for j in c..cols {
                    let sub = &factor * &m[r][j];
                    m[i][j] -= sub;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Numeric value of a constant expression.
pub fn val(e: &Expression) -> BigRational {
    e.constant_value().expect("constant expression")
}

/// Brute-force absorption test: is `Σ A^α_{ρj} λ^ρ_k − A^α_{ρk} λ^ρ_j = T^α_{jk}`
/// solvable? Built directly from the definition, one row per `(α, j<k)`.
pub fn absorption_solvable(
    a: &[Vec<Vec<BigRational>>],
    t: &[Vec<Vec<BigRational>>],
    n: usize,
    r: usize,
) -> bool {
    let mut lhs = Vec::new();
    let mut aug = Vec::new();
    for alpha in 0..a.len() {
        for j in 0..n {
            for k in j + 1..n {
                let mut row = vec![BigRational::zero(); r * n];
                for rho in 0..r {
                    row[rho * n + k] += &a[alpha][rho][j];
                    row[rho * n + j] -= &a[alpha][rho][k];
                }
                let mut full = row.clone();
                full.push(t[alpha][j][k].clone());
                lhs.push(row);
                aug.push(full);
            }
        }
    }
    if lhs.is_empty() {
        return true;
    }
    rank_q(lhs) == rank_q(aug)
}

/// Flat system `ẍ̄ = 0` pulled back by `x̄^a = φ^a(t, x)`, `t̄ = t`:
/// `F = −J⁻¹ (φ_tt + 2 ẋ^b φ_tb + ẋ^b ẋ^c φ_bc)` with `J = ∂φ/∂x`.
pub fn flat_system_pullback(chart: &Chart, phi: [&Expression; 2]) -> (Expression, Expression) {
    let v = |n: &str| chart.var(n).unwrap();
    let s = |n: &str| chart.sym(n).unwrap();
    let xs = [v("x1"), v("x2")];
    let dots = [s("dx1"), s("dx2")];
    let t = v("t");
    let g: Vec<Expression> = phi
        .iter()
        .map(|p| {
            let pt = p.partial(chart, t).unwrap();
            let mut acc = pt.partial(chart, t).unwrap();
            for b in 0..2 {
                acc = acc + Expression::int(2) * &dots[b] * pt.partial(chart, xs[b]).unwrap();
                let pb = p.partial(chart, xs[b]).unwrap();
                for c in 0..2 {
                    acc = acc + &dots[b] * &dots[c] * pb.partial(chart, xs[c]).unwrap();
                }
            }
            acc
        })
        .collect();
    let j = |a: usize, b: usize| phi[a].partial(chart, xs[b]).unwrap();
    let det = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
    assert!(!det.is_zero(), "point transformation must be invertible");
    let f1 = (-(j(1, 1) * &g[0] - j(0, 1) * &g[1])).checked_div(&det).unwrap();
    let f2 = (-(j(0, 0) * &g[1] - j(1, 0) * &g[0])).checked_div(&det).unwrap();
    (f1, f2)
}
