//! Heuristic GCD by evaluation at large integers.
//!
//! Variables are replaced one at a time by an integer `ξ`; the GCD of the
//! images is lifted back by reading its coefficients as balanced base-`ξ`
//! digits. Every candidate is confirmed by exact division, so a wrong guess
//! costs time but never correctness. Gives up after a few points.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::chart::Var;
use super::poly::{Monomial, Poly};

/// Integer polynomial keyed by exponent vectors over a fixed variable list.
type IntPoly = BTreeMap<Vec<u32>, BigInt>;

const ATTEMPTS: usize = 6;
/// Above this many bits in an evaluation point the heuristic is not worth it.
const MAX_POINT_BITS: u64 = 1 << 16;

/// Monic GCD of two nonzero polynomials, or `None` if the heuristic fails.
pub(super) fn heuristic_gcd(a: &Poly, b: &Poly) -> Option<Poly> {
    let mut vars: Vec<Var> = a.vars().union(&b.vars()).copied().collect();
    // The last variable is evaluated first, at the smallest point; give that
    // slot to the highest degrees.
    vars.sort_by_key(|&v| a.degree_in(v).max(b.degree_in(v)));
    let fa = to_int(a, &vars);
    let fb = to_int(b, &vars);
    let h = heu(&fa, &fb, vars.len())?;
    Some(from_int(&h, &vars).monic())
}

fn to_int(p: &Poly, vars: &[Var]) -> IntPoly {
    let (p, _) = p.clear_denominators();
    p.terms()
        .iter()
        .map(|(m, c)| {
            let e = vars.iter().map(|&v| m.exponent(v)).collect();
            (e, c.to_integer())
        })
        .collect()
}

fn from_int(p: &IntPoly, vars: &[Var]) -> Poly {
    Poly::from_terms(p.iter().map(|(e, c)| {
        let m = e
            .iter()
            .zip(vars)
            .filter(|(&k, _)| k > 0)
            .fold(Monomial::one(), |m, (&k, &v)| m.mul(&Monomial::power(v, k)));
        (m, BigRational::from_integer(c.clone()))
    }))
}

fn is_constant(p: &IntPoly) -> bool {
    p.len() == 1 && p.keys().next().is_some_and(|e| e.iter().all(|&k| k == 0))
}

fn content(p: &IntPoly) -> BigInt {
    p.values().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn scale_down(p: &IntPoly, k: &BigInt) -> IntPoly {
    p.iter().map(|(e, c)| (e.clone(), c / k)).collect()
}

fn max_norm(p: &IntPoly) -> BigInt {
    p.values().map(BigInt::abs).max().unwrap_or_default()
}

/// Leading coefficient in lex order.
fn lead(p: &IntPoly) -> &BigInt {
    p.values().next_back().expect("nonzero polynomial")
}

/// Substitutes `x` for variable `k - 1`.
fn eval_last(p: &IntPoly, x: &BigInt, k: usize) -> IntPoly {
    let mut out = IntPoly::new();
    for (e, c) in p {
        let key = e[..k - 1].to_vec();
        let v = c * x.pow(e[k - 1]);
        let slot = out.entry(key).or_default();
        *slot += v;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Balanced residue in `(-x/2, x/2]`.
fn balanced(c: &BigInt, x: &BigInt) -> BigInt {
    let r = c.mod_floor(x);
    if &r * 2 > *x {
        r - x
    } else {
        r
    }
}

/// Reads the coefficients of `h` as base-`x` digits of a new last variable.
fn interpolate(mut h: IntPoly, x: &BigInt) -> IntPoly {
    let mut out = IntPoly::new();
    let mut power = 0u32;
    while !h.is_empty() {
        let mut next = IntPoly::new();
        for (e, c) in &h {
            let digit = balanced(c, x);
            if !digit.is_zero() {
                let mut key = e.clone();
                key.push(power);
                out.insert(key, digit.clone());
            }
            let rest = (c - digit) / x;
            if !rest.is_zero() {
                next.insert(e.clone(), rest);
            }
        }
        h = next;
        power += 1;
    }
    let positive = out.values().next_back().is_some_and(|c| c.is_positive());
    if positive {
        out
    } else {
        out.into_iter().map(|(e, c)| (e, -c)).collect()
    }
}

/// Whether `d` divides `p` over ℤ, by exact division in lex order.
fn divides(p: &IntPoly, d: &IntPoly) -> bool {
    let (de, dc) = d.iter().next_back().expect("nonzero divisor");
    let mut r = p.clone();
    while let Some((re, rc)) = r.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
        if re.iter().zip(de).any(|(a, b)| a < b) {
            return false;
        }
        let (q, rem) = rc.div_rem(dc);
        if !rem.is_zero() {
            return false;
        }
        let shift: Vec<u32> = re.iter().zip(de).map(|(a, b)| a - b).collect();
        for (e, c) in d {
            let key: Vec<u32> = e.iter().zip(&shift).map(|(a, b)| a + b).collect();
            let slot = r.entry(key.clone()).or_default();
            *slot -= &q * c;
            if slot.is_zero() {
                r.remove(&key);
            }
        }
    }
    true
}

fn heu(f: &IntPoly, g: &IntPoly, k: usize) -> Option<IntPoly> {
    let cf = content(f);
    let cg = content(g);
    let c = cf.gcd(&cg);
    let constant = |c: BigInt| Some(IntPoly::from([(vec![0; k], c)]));
    if k == 0 || is_constant(f) || is_constant(g) {
        return constant(c);
    }
    let f = scale_down(f, &cf);
    let g = scale_down(g, &cg);
    let (nf, ng) = (max_norm(&f), max_norm(&g));
    let b: BigInt = nf.clone().min(ng.clone()) * 2 + 29;
    let lower = (nf / lead(&f).abs()).min(ng / lead(&g).abs()) * 2 + 4;
    let mut x = b.clone().min(b.sqrt() * 99).max(lower);
    for _ in 0..ATTEMPTS {
        if x.bits() > MAX_POINT_BITS {
            return None;
        }
        let ff = eval_last(&f, &x, k);
        let gg = eval_last(&g, &x, k);
        if !ff.is_empty() && !gg.is_empty() {
            if let Some(h) = heu(&ff, &gg, k - 1) {
                let h = interpolate(h, &x);
                let ch = content(&h);
                let h = scale_down(&h, &ch);
                if divides(&f, &h) && divides(&g, &h) {
                    return Some(h.into_iter().map(|(e, v)| (e, v * &c)).collect());
                }
            }
        }
        x = (x.clone() * 73794 * x.sqrt().sqrt()) / 27011;
    }
    None
}
