//! Multivariate polynomial GCD over ℚ.
//!
//! Most GCDs arising in rational-function arithmetic are trivial. Those are
//! certified without any coefficient growth by evaluating all but one
//! variable modulo a large prime: if the image GCD has degree zero in `v`
//! (and the leading coefficients survive), the true GCD has degree zero in
//! `v`. Only variables that fail the test go through the recursive
//! primitive pseudo-remainder sequence.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::chart::Var;
use super::heugcd::heuristic_gcd;
use super::poly::{invmod, mulmod, Monomial, Poly};

/// 2^61 - 1.
const PRIME: u64 = (1u64 << 61) - 1;
const IMAGE_ATTEMPTS: usize = 3;

/// Monic greatest common divisor; `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }

    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mono = ma.gcd(&mb);
    let a1 = strip(a, &ma);
    let b1 = strip(b, &mb);
    let rest = gcd_content_free(&a1, &b1);
    rest.mul_term(&mono, &BigRational::one()).monic()
}

fn strip(p: &Poly, m: &Monomial) -> Poly {
    if m.is_one() {
        p.clone()
    } else {
        p.div_exact(&Poly::term(m.clone(), BigRational::one()))
            .expect("monomial content divides")
    }
}

fn gcd_content_free(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let va = a.vars();
    let vb = b.vars();
    let shared: BTreeSet<Var> = va.intersection(&vb).copied().collect();
    if shared.is_empty() {
        return Poly::one();
    }
    if a.len() == 1 || b.len() == 1 {
        // Monomial content is already removed, so a single term is constant.
        return Poly::one();
    }

    let mut suspicious = Vec::new();
    for &v in &shared {
        match image_gcd_degree(a, b, v) {
            Some(0) => {}
            _ => suspicious.push(v),
        }
    }
    if suspicious.is_empty() {
        return Poly::one();
    }

    // Cheap exact-division shortcuts before the full recursion.
    if a.len() <= b.len() {
        if b.div_exact(a).is_some() {
            return a.monic();
        }
    } else if a.div_exact(b).is_some() {
        return b.monic();
    }

    if let Some(g) = heuristic_gcd(a, b) {
        return g;
    }

    let main = *suspicious
        .iter()
        .min_by_key(|&&v| (a.degree_in(v).min(b.degree_in(v)), v))
        .expect("nonempty");
    gcd_recursive(a, b, main)
}

/// Degree in `v` of the GCD of modular images, or `None` if no usable
/// evaluation point was found.
fn image_gcd_degree(a: &Poly, b: &Poly, v: Var) -> Option<usize> {
    let da = a.degree_in(v) as usize;
    let db = b.degree_in(v) as usize;
    let mut rng = StdRng::seed_from_u64(0x5eed_cafe ^ ((da as u64) << 32) ^ db as u64);
    for _ in 0..IMAGE_ATTEMPTS {
        let seed: u64 = rng.gen();
        let point = move |w: Var| {
            let mut h = StdRng::seed_from_u64(seed ^ var_hash(w));
            h.gen_range(2..PRIME - 1)
        };
        let (Some(ia), Some(ib)) = (a.image_mod(v, PRIME, &point), b.image_mod(v, PRIME, &point))
        else {
            continue;
        };
        if ia.len() != da + 1 || ib.len() != db + 1 || ia[da] == 0 || ib[db] == 0 {
            continue;
        }
        return Some(univariate_gcd_degree(ia, ib));
    }
    None
}

fn var_hash(v: Var) -> u64 {
    use std::hash::{Hash, Hasher};
    let mut h = std::collections::hash_map::DefaultHasher::new();
    v.hash(&mut h);
    h.finish()
}

fn trim(p: &mut Vec<u64>) {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
}

fn univariate_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.len() == 1 {
            return if b[0] == 0 { a.len() - 1 } else { 0 };
        }
        // a := a mod b
        let lead_inv = invmod(*b.last().unwrap(), PRIME);
        while a.len() >= b.len() && !(a.len() == 1 && a[0] == 0) {
            let shift = a.len() - b.len();
            let factor = mulmod(*a.last().unwrap(), lead_inv, PRIME);
            for (i, &bi) in b.iter().enumerate() {
                let sub = mulmod(factor, bi, PRIME);
                a[shift + i] = (a[shift + i] + PRIME - sub) % PRIME;
            }
            a.pop();
            if a.is_empty() {
                a.push(0);
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
}

fn gcd_many(polys: impl IntoIterator<Item = Poly>) -> Poly {
    let mut g = Poly::zero();
    for p in polys {
        if p.is_zero() {
            continue;
        }
        g = gcd(&g, &p);
        if g.is_one() {
            break;
        }
    }
    g
}

fn divide_coeffs(coeffs: &[Poly], d: &Poly) -> Vec<Poly> {
    if d.is_one() {
        return coeffs.to_vec();
    }
    coeffs
        .iter()
        .map(|c| c.div_exact(d).expect("content divides every coefficient"))
        .collect()
}

fn gcd_recursive(a: &Poly, b: &Poly, v: Var) -> Poly {
    let ua = a.to_univariate(v);
    let ub = b.to_univariate(v);
    let ca = gcd_many(ua.iter().cloned());
    let cb = gcd_many(ub.iter().cloned());
    let content = gcd(&ca, &cb);
    let mut pa = divide_coeffs(&ua, &ca);
    let mut pb = divide_coeffs(&ub, &cb);
    if pa.len() < pb.len() {
        std::mem::swap(&mut pa, &mut pb);
    }
    while pb.len() > 1 {
        let r = pseudo_remainder(&pa, &pb);
        if r.iter().all(Poly::is_zero) {
            break;
        }
        let rc = gcd_many(r.iter().cloned());
        let r = divide_coeffs(&r, &rc);
        pa = pb;
        pb = r;
    }
    let primitive = if pb.len() == 1 {
        Poly::one()
    } else {
        Poly::from_univariate(&pb, v)
    };
    content.mul(&primitive).monic()
}

/// `lc(b)^(deg a - deg b + 1) * a mod b`, coefficients indexed by degree.
fn pseudo_remainder(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r: Vec<Poly> = a.to_vec();
    while r.len() > db && r.len() > 0 {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        if lr.is_zero() {
            r.pop();
            continue;
        }
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = c.mul(lb);
        }
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] = r[shift + i].sub(&bi.mul(&lr));
        }
        r.pop();
    }
    while r.len() > 1 && r.last().is_some_and(Poly::is_zero) {
        r.pop();
    }
    if r.is_empty() {
        r.push(Poly::zero());
    }
    r
}
