use std::collections::{BTreeSet, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::chart::{Chart, Var};
use super::gcd::gcd;
use super::poly::{Monomial, Poly};
use super::ExprError;

/// Exact rational function in canonical form.
///
/// `num / den` with `gcd(num, den) = 1` and `den` monic in the graded-lex
/// order. Zero is `0 / 1`. Two expressions are equal iff their
/// representations are identical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Expression {
    num: Poly,
    den: Poly,
}

impl Default for Expression {
    fn default() -> Self {
        Expression::zero()
    }
}

impl Expression {
    pub fn zero() -> Self {
        Expression {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `n / d` as a constant.
    pub fn ratio(n: i64, d: i64) -> Self {
        Self::rational(BigRational::new(n.into(), d.into()))
    }

    pub fn rational(c: BigRational) -> Self {
        Expression {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn var(v: Var) -> Self {
        Expression {
            num: Poly::var(v),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        Expression {
            num: p,
            den: Poly::one(),
        }
    }

    /// Canonical form of `num / den`.
    pub fn from_parts(num: Poly, den: Poly) -> Result<Self, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        if den.is_constant() {
            let k = den.leading_coeff().recip();
            return Ok(Expression {
                num: num.scale(&k),
                den: Poly::one(),
            });
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let k = den.leading_coeff().recip();
        Ok(Expression {
            num: num.scale(&k),
            den: den.scale(&k),
        })
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    /// Node-count measure used to pick small pivots.
    pub fn size(&self) -> usize {
        self.num.size() + self.den.size()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.num.degree_in(v) > 0 || self.den.degree_in(v) > 0
    }

    pub fn scale(&self, k: &BigRational) -> Expression {
        if k.is_zero() {
            return Self::zero();
        }
        Expression {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    pub fn checked_div(&self, other: &Expression) -> Result<Expression, ExprError> {
        Ok(self * &other.inv()?)
    }

    pub fn inv(&self) -> Result<Expression, ExprError> {
        if self.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        let k = self.num.leading_coeff().recip();
        Ok(Expression {
            num: self.den.scale(&k),
            den: self.num.scale(&k),
        })
    }

    pub fn pow(&self, e: u32) -> Expression {
        Expression {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    pub fn powi(&self, e: i32) -> Result<Expression, ExprError> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs()))
        }
    }

    /// Partial derivative with respect to a coordinate or parameter, with
    /// the chain rule `∂_v f_I = f_{I+v}` on derivative symbols.
    pub fn partial(&self, chart: &Chart, v: Var) -> Result<Expression, ExprError> {
        let basis = chart
            .basis_index(v)
            .filter(|_| chart.contains(v))
            .ok_or(ExprError::UnknownName(format!("{v:?}")))?;
        let rule = |w: Var| -> Option<Option<Var>> {
            match w {
                Var::Jet(j) => chart.jet_partial(j, basis).map(|k| Some(Var::Jet(k))),
                other if other == v => Some(None),
                _ => None,
            }
        };
        Ok(self.derive_with(rule))
    }

    /// Derivative of a polynomial indeterminate (no chain rule on jets).
    pub fn diff_var(&self, v: Var) -> Expression {
        self.derive_with(|w| if w == v { Some(None) } else { None })
    }

    fn derive_with(&self, rule: impl Fn(Var) -> Option<Option<Var>> + Copy) -> Expression {
        let dn = self.num.derive(rule);
        if self.den.is_one() {
            return Expression {
                num: dn,
                den: Poly::one(),
            };
        }
        let dd = self.den.derive(rule);
        if dd.is_zero() {
            return Expression::from_parts(dn, self.den.clone()).expect("nonzero denominator");
        }
        // With g = gcd(d, d'), h = d/g, k = d'/g:
        // (n/d)' = (n'h - nk) / (g h²), and only g can share a factor with the
        // new numerator, so the expensive gcd never sees h².
        let g = gcd(&self.den, &dd);
        let (h, k) = if g.is_one() {
            (self.den.clone(), dd)
        } else {
            (
                self.den.div_exact(&g).expect("gcd divides"),
                dd.div_exact(&g).expect("gcd divides"),
            )
        };
        let num = dn.mul(&h).sub(&self.num.mul(&k));
        if num.is_zero() {
            return Expression::zero();
        }
        let c = gcd(&num, &g);
        let (num, g) = if c.is_one() {
            (num, g)
        } else {
            (
                num.div_exact(&c).expect("gcd divides"),
                g.div_exact(&c).expect("gcd divides"),
            )
        };
        let den = g.mul(&h.pow(2));
        let s = den.leading_coeff().recip();
        Expression {
            num: num.scale(&s),
            den: den.scale(&s),
        }
    }

    /// Replaces each listed indeterminate by an expression.
    pub fn substitute_vars(&self, map: &HashMap<Var, Expression>) -> Result<Expression, ExprError> {
        let n = subst_poly(&self.num, map);
        let d = subst_poly(&self.den, map);
        n.checked_div(&d)
    }

    /// Evaluation at a point; `None` when a denominator vanishes there.
    pub fn eval(&self, value: &impl Fn(Var) -> BigRational) -> Option<BigRational> {
        let d = self.den.eval(value);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(value) / d)
    }
}

fn subst_poly(p: &Poly, map: &HashMap<Var, Expression>) -> Expression {
    let mut powers: HashMap<(Var, u32), Expression> = HashMap::new();
    let mut acc = Expression::zero();
    let mut kept = Vec::new();
    for (m, c) in p.terms() {
        let mut rest = Monomial::one();
        let mut factor = Expression::rational(c.clone());
        for (v, e) in m.iter() {
            match map.get(&v) {
                Some(val) => {
                    let pw = powers.entry((v, e)).or_insert_with(|| val.pow(e));
                    factor = &factor * &*pw;
                }
                None => rest = rest.mul(&Monomial::power(v, e)),
            }
        }
        if factor.is_polynomial() {
            kept.push((rest, factor));
        } else {
            acc = &acc + &(&factor * &Expression::from_poly(Poly::term(rest, BigRational::one())));
        }
    }
    let mut poly_part = Poly::zero();
    for (rest, factor) in kept {
        poly_part = poly_part.add(&factor.num.mul_term(&rest, &BigRational::one()));
    }
    &acc + &Expression::from_poly(poly_part)
}

/// Raw expression tree before canonicalization.
#[derive(Clone, Debug, PartialEq)]
pub enum RawExpr {
    Num(BigRational),
    Var(Var),
    Neg(Box<RawExpr>),
    Add(Box<RawExpr>, Box<RawExpr>),
    Sub(Box<RawExpr>, Box<RawExpr>),
    Mul(Box<RawExpr>, Box<RawExpr>),
    Div(Box<RawExpr>, Box<RawExpr>),
    Pow(Box<RawExpr>, u32),
}

/// Canonical form of a raw tree.
pub fn normalize(raw: &RawExpr) -> Result<Expression, ExprError> {
    Ok(match raw {
        RawExpr::Num(c) => Expression::rational(c.clone()),
        RawExpr::Var(v) => Expression::var(*v),
        RawExpr::Neg(a) => -&normalize(a)?,
        RawExpr::Add(a, b) => &normalize(a)? + &normalize(b)?,
        RawExpr::Sub(a, b) => &normalize(a)? - &normalize(b)?,
        RawExpr::Mul(a, b) => &normalize(a)? * &normalize(b)?,
        RawExpr::Div(a, b) => normalize(a)?.checked_div(&normalize(b)?)?,
        RawExpr::Pow(a, e) => normalize(a)?.pow(*e),
    })
}

impl<'a> Add<&'a Expression> for &'a Expression {
    type Output = Expression;

    fn add(self, other: &Expression) -> Expression {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            if self.den.is_one() {
                return Expression::from_poly(num);
            }
            return Expression::from_parts(num, self.den.clone()).expect("nonzero denominator");
        }
        if self.den.is_one() {
            let num = self.num.mul(&other.den).add(&other.num);
            return Expression {
                num,
                den: other.den.clone(),
            };
        }
        if other.den.is_one() {
            let num = other.num.mul(&self.den).add(&self.num);
            return Expression {
                num,
                den: self.den.clone(),
            };
        }
        let g = gcd(&self.den, &other.den);
        let (bs, bo) = if g.is_one() {
            (self.den.clone(), other.den.clone())
        } else {
            (
                self.den.div_exact(&g).expect("gcd divides"),
                other.den.div_exact(&g).expect("gcd divides"),
            )
        };
        let num = self.num.mul(&bo).add(&other.num.mul(&bs));
        let den = bs.mul(&other.den);
        if g.is_one() {
            // Fractions with coprime denominators add to a reduced fraction.
            if num.is_zero() {
                return Expression::zero();
            }
            let k = den.leading_coeff().recip();
            return Expression {
                num: num.scale(&k),
                den: den.scale(&k),
            };
        }
        Expression::from_parts(num, den).expect("nonzero denominator")
    }
}

impl<'a> Sub<&'a Expression> for &'a Expression {
    type Output = Expression;

    fn sub(self, other: &Expression) -> Expression {
        self + &(-other)
    }
}

impl<'a> Mul<&'a Expression> for &'a Expression {
    type Output = Expression;

    fn mul(self, other: &Expression) -> Expression {
        if self.is_zero() || other.is_zero() {
            return Expression::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return Expression::from_poly(self.num.mul(&other.num));
        }
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let div = |p: &Poly, g: &Poly| {
            if g.is_one() {
                p.clone()
            } else {
                p.div_exact(g).expect("gcd divides")
            }
        };
        let num = div(&self.num, &g1).mul(&div(&other.num, &g2));
        let den = div(&self.den, &g2).mul(&div(&other.den, &g1));
        let k = den.leading_coeff().recip();
        Expression {
            num: num.scale(&k),
            den: den.scale(&k),
        }
    }
}

impl Neg for &Expression {
    type Output = Expression;

    fn neg(self) -> Expression {
        Expression {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Expression> for Expression {
            type Output = Expression;
            fn $method(self, other: Expression) -> Expression {
                (&self).$method(&other)
            }
        }
        impl<'a> $trait<&'a Expression> for Expression {
            type Output = Expression;
            fn $method(self, other: &Expression) -> Expression {
                (&self).$method(other)
            }
        }
        impl<'a> $trait<Expression> for &'a Expression {
            type Output = Expression;
            fn $method(self, other: Expression) -> Expression {
                self.$method(&other)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for Expression {
    type Output = Expression;

    fn neg(self) -> Expression {
        -&self
    }
}

impl From<i64> for Expression {
    fn from(n: i64) -> Self {
        Expression::int(n)
    }
}

impl std::iter::Sum for Expression {
    fn sum<I: Iterator<Item = Expression>>(iter: I) -> Self {
        iter.fold(Expression::zero(), |a, b| &a + &b)
    }
}

impl One for Expression {
    fn one() -> Self {
        Expression::one()
    }
}

impl Zero for Expression {
    fn zero() -> Self {
        Expression::zero()
    }

    fn is_zero(&self) -> bool {
        Expression::is_zero(self)
    }
}
