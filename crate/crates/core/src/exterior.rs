//! Alternating differential forms with expression coefficients.
//!
//! A k-form is stored as a map from strictly increasing k-tuples of basis
//! indices to nonzero coefficients. The basis is either the coordinate
//! differentials of a chart or an abstract coframe `θ^1, .., θ^n`; wedge
//! products only need the dimension, the exterior derivative needs a chart.
//! Basis 2-forms are oriented as `e_i ∧ e_j` with `i < j`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Signed;
use thiserror::Error;

use crate::expr::{Chart, Derivation, ExprError, Expression};
use crate::linalg::{self, LinalgError, Matrix, PolyInverse};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("degree {0} exceeds the dimension {1}")]
    DegreeOverflow(usize, usize),
    #[error("forms live on spaces of different dimension")]
    DimensionMismatch,
    #[error("coframe is not invertible")]
    SingularCoframe,
    #[error("expected a {expected}-form, got a {got}-form")]
    WrongDegree { expected: usize, got: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl From<LinalgError> for FormError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::Singular => FormError::SingularCoframe,
            LinalgError::Shape => FormError::DimensionMismatch,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialForm {
    degree: usize,
    dim: usize,
    terms: BTreeMap<Vec<usize>, Expression>,
}

/// Sign of the permutation sorting `idx`, or `None` if an index repeats.
fn sort_sign(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && idx[j - 1] == idx[j] {
            return None;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

impl DifferentialForm {
    pub fn zero(degree: usize, dim: usize) -> Self {
        DifferentialForm {
            degree,
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// 0-form.
    pub fn scalar(e: Expression, dim: usize) -> Self {
        let mut f = Self::zero(0, dim);
        f.add_term(vec![], e);
        f
    }

    /// Basis 1-form `e_i`.
    pub fn basis(i: usize, dim: usize) -> Self {
        let mut f = Self::zero(1, dim);
        f.add_term(vec![i], Expression::one());
        f
    }

    /// `d(name)` for a coordinate or parameter of `chart`.
    pub fn differential(chart: &Chart, name: &str) -> Result<Self, FormError> {
        let v = chart.var(name)?;
        let i = chart.basis_index(v).expect("coordinate or parameter");
        Ok(Self::basis(i, chart.dim()))
    }

    /// 1-form `Σ c_i e_i`.
    pub fn one_form(coeffs: Vec<Expression>) -> Self {
        let dim = coeffs.len();
        let mut f = Self::zero(1, dim);
        for (i, c) in coeffs.into_iter().enumerate() {
            f.add_term(vec![i], c);
        }
        f
    }

    /// Builds a form from arbitrary (not necessarily sorted) index tuples.
    pub fn from_terms(
        degree: usize,
        dim: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, Expression)>,
    ) -> Result<Self, FormError> {
        if degree > dim {
            return Err(FormError::DegreeOverflow(degree, dim));
        }
        let mut f = Self::zero(degree, dim);
        for (mut idx, c) in terms {
            if idx.len() != degree || idx.iter().any(|&i| i >= dim) {
                return Err(FormError::DimensionMismatch);
            }
            if let Some(s) = sort_sign(&mut idx) {
                f.add_term(idx, if s < 0 { -c } else { c });
            }
        }
        Ok(f)
    }

    fn add_term(&mut self, idx: Vec<usize>, c: Expression) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&idx) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&idx);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(idx, c);
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &Expression)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Coefficient of `e_{i1} ∧ .. ∧ e_{ik}` for any ordering of the indices.
    pub fn coefficient(&self, idx: &[usize]) -> Expression {
        let mut k = idx.to_vec();
        match sort_sign(&mut k) {
            None => Expression::zero(),
            Some(s) => {
                let c = self.terms.get(&k).cloned().unwrap_or_default();
                if s < 0 {
                    -c
                } else {
                    c
                }
            }
        }
    }

    /// Coefficients of a 1-form as a dense vector.
    pub fn components(&self) -> Vec<Expression> {
        (0..self.dim).map(|i| self.coefficient(&[i])).collect()
    }

    fn check_same(&self, other: &Self) -> Result<(), FormError> {
        if self.dim != other.dim {
            return Err(FormError::DimensionMismatch);
        }
        if self.degree != other.degree {
            return Err(FormError::WrongDegree {
                expected: self.degree,
                got: other.degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, FormError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FormError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&Expression::int(-1))
    }

    pub fn scale(&self, e: &Expression) -> Self {
        let mut out = Self::zero(self.degree, self.dim);
        if e.is_zero() {
            return out;
        }
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c * e);
        }
        out
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self, FormError> {
        if self.dim != other.dim {
            return Err(FormError::DimensionMismatch);
        }
        let deg = self.degree + other.degree;
        if deg > self.dim {
            return Err(FormError::DegreeOverflow(deg, self.dim));
        }
        let mut out = Self::zero(deg, self.dim);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let mut idx: Vec<usize> = ka.iter().chain(kb.iter()).copied().collect();
                if let Some(s) = sort_sign(&mut idx) {
                    let c = ca * cb;
                    out.add_term(idx, if s < 0 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative on the coordinate basis of `chart`.
    pub fn d(&self, chart: &Chart) -> Result<Self, FormError> {
        if self.dim != chart.dim() {
            return Err(FormError::DimensionMismatch);
        }
        if self.degree + 1 > self.dim {
            return Err(FormError::DegreeOverflow(self.degree + 1, self.dim));
        }
        let mut out = Self::zero(self.degree + 1, self.dim);
        for (k, c) in &self.terms {
            for v in 0..self.dim {
                if k.contains(&v) {
                    continue;
                }
                let dc = c.partial(chart, chart.basis_var(v))?;
                if dc.is_zero() {
                    continue;
                }
                let before = k.iter().filter(|&&i| i < v).count();
                let mut idx = k.clone();
                idx.insert(before, v);
                out.add_term(idx, if before % 2 == 1 { -dc } else { dc });
            }
        }
        Ok(out)
    }

    /// Pullback along a linear change of basis: basis element `i` is replaced
    /// by the 1-form `images[i]`.
    pub fn change_basis(&self, images: &[DifferentialForm]) -> Result<Self, FormError> {
        if images.len() != self.dim {
            return Err(FormError::DimensionMismatch);
        }
        let new_dim = images.first().map_or(self.dim, |f| f.dim);
        let mut out = Self::zero(self.degree, new_dim);
        for (k, c) in &self.terms {
            let mut acc = Self::scalar(c.clone(), new_dim);
            for &i in k {
                acc = acc.wedge(&images[i])?;
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }

    pub fn display<'a>(&'a self, chart: &'a Chart, basis: &'a [String]) -> impl fmt::Display + 'a {
        FormDisplay {
            form: self,
            chart,
            basis,
        }
    }
}

struct FormDisplay<'a> {
    form: &'a DifferentialForm,
    chart: &'a Chart,
    basis: &'a [String],
}

impl fmt::Display for FormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.form.is_zero() {
            return write!(f, "0");
        }
        for (n, (k, c)) in self.form.terms.iter().enumerate() {
            let wedge: Vec<&str> = k.iter().map(|&i| self.basis[i].as_str()).collect();
            let wedge = wedge.join("∧");
            let neg = c.constant_value().is_some_and(|v| v.is_negative());
            let mag = if neg { -c } else { c.clone() };
            let body = if mag.is_one() && !k.is_empty() {
                String::new()
            } else if mag.is_constant() {
                format!("{}*", self.chart.display(&mag))
            } else {
                format!("({})*", self.chart.display(&mag))
            };
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if k.is_empty() {
                write!(f, "{}", body.trim_end_matches('*'))?;
            } else {
                write!(f, "{}{}", body, wedge)?;
            }
        }
        Ok(())
    }
}

/// An invertible set of n 1-forms on an n-dimensional chart.
#[derive(Clone, Debug)]
pub struct Coframe {
    forms: Vec<DifferentialForm>,
    /// `θ^i = Σ_j matrix[i][j] dx_j`.
    matrix: Matrix,
    inverse: Matrix,
    poly_inverse: PolyInverse,
}

impl Coframe {
    pub fn new(forms: Vec<DifferentialForm>) -> Result<Self, FormError> {
        let n = forms.len();
        if forms.iter().any(|f| f.dim() != n) {
            return Err(FormError::DimensionMismatch);
        }
        if let Some(f) = forms.iter().find(|f| f.degree() != 1) {
            return Err(FormError::WrongDegree {
                expected: 1,
                got: f.degree(),
            });
        }
        let matrix = Matrix::from_rows(forms.iter().map(|f| f.components()).collect())?;
        let poly_inverse = linalg::poly_inverse(&matrix)?;
        let mut inverse = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inverse.set(i, j, poly_inverse.entry(i, j));
            }
        }
        Ok(Coframe {
            forms,
            matrix,
            inverse,
            poly_inverse,
        })
    }

    pub fn forms(&self) -> &[DifferentialForm] {
        &self.forms
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Rewrites a form on the coordinate basis in the basis `θ^1..θ^n`.
    ///
    /// `dx_I = Σ_J det(inv[I, J]) θ^J`; the minors are taken on the
    /// polynomial adjugate and divided exactly by `det^(k-1)`, so each
    /// coefficient meets the determinant only once.
    pub fn to_frame(&self, form: &DifferentialForm) -> Result<DifferentialForm, FormError> {
        let n = self.len();
        if form.dim() != n {
            return Err(FormError::DimensionMismatch);
        }
        let k = form.degree();
        if k == 0 {
            return Ok(form.clone());
        }
        let p = &self.poly_inverse;
        let det_power = p.det.pow(k as u32 - 1);
        let targets = subsets(n, k);
        let mut sums: Vec<Expression> = vec![Expression::zero(); targets.len()];
        for (rows, c) in form.terms() {
            for (t, cols) in targets.iter().enumerate() {
                let minor = linalg::poly_determinant(
                    rows.iter()
                        .map(|&r| cols.iter().map(|&c| p.adj[r][c].clone()).collect())
                        .collect(),
                );
                if minor.is_zero() {
                    continue;
                }
                let mut q = if det_power.is_one() {
                    minor
                } else {
                    minor.div_exact(&det_power).expect("adjugate minors carry det^(k-1)")
                };
                for &c in cols {
                    q = q.mul(&p.scales[c]);
                }
                sums[t] = &sums[t] + &(c * &Expression::from_poly(q));
            }
        }
        let det = Expression::from_poly(p.det.clone());
        let mut out = DifferentialForm::zero(k, n);
        for (cols, s) in targets.into_iter().zip(sums) {
            if !s.is_zero() {
                out.add_term(cols, s.checked_div(&det)?);
            }
        }
        Ok(out)
    }

    /// Inverse of [`Coframe::to_frame`].
    pub fn from_frame(&self, form: &DifferentialForm) -> Result<DifferentialForm, FormError> {
        form.change_basis(&self.forms)
    }

    /// Coefficients `c_ij` (i < j) with `Ω = Σ c_ij θ^i ∧ θ^j`.
    pub fn express(&self, omega: &DifferentialForm) -> Result<BTreeMap<(usize, usize), Expression>, FormError> {
        if omega.degree() != 2 {
            return Err(FormError::WrongDegree {
                expected: 2,
                got: omega.degree(),
            });
        }
        let framed = self.to_frame(omega)?;
        Ok(framed
            .terms()
            .map(|(k, c)| ((k[0], k[1]), c.clone()))
            .collect())
    }

    /// Vector fields `X_i` with `θ^j(X_i) = δ_ij`.
    pub fn dual_frame(&self) -> Vec<Derivation> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let comps = (0..n).map(|a| self.inverse.get(a, i).clone()).collect();
                Derivation::new(format!("X{}", i + 1), comps)
            })
            .collect()
    }
}

/// Increasing `k`-tuples from `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub fn wedge(a: &DifferentialForm, b: &DifferentialForm) -> Result<DifferentialForm, FormError> {
    a.wedge(b)
}

pub fn d(chart: &Chart, omega: &DifferentialForm) -> Result<DifferentialForm, FormError> {
    omega.d(chart)
}

/// Pairing `θ(X)` of a 1-form with a vector field.
pub fn pairing(theta: &DifferentialForm, x: &Derivation) -> Expression {
    theta
        .terms()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| c * &x.components[k[0]])
        .sum()
}

pub fn express_in_coframe(
    omega: &DifferentialForm,
    coframe: &Coframe,
) -> Result<BTreeMap<(usize, usize), Expression>, FormError> {
    coframe.express(omega)
}

pub fn dual_frame(coframe: &Coframe) -> Vec<Derivation> {
    coframe.dual_frame()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Chart {
        Chart::new(&["x", "y", "p"], &[])
            .unwrap()
            .with_function("f", &["x", "y", "p"])
            .unwrap()
    }

    fn dv(c: &Chart, n: &str) -> DifferentialForm {
        DifferentialForm::differential(c, n).unwrap()
    }

    #[test]
    fn wedge_basics() {
        let c = chart();
        let (dx, dy) = (dv(&c, "x"), dv(&c, "y"));
        assert!(dx.wedge(&dx).unwrap().is_zero());
        let w = dx.wedge(&dy).unwrap();
        assert_eq!(w.coefficient(&[0, 1]), Expression::one());
        assert_eq!(w.coefficient(&[1, 0]), Expression::int(-1));
        let p = c.sym("p").unwrap();
        let f = c.fun("f", &[]).unwrap();
        let w = dx.scale(&p).wedge(&dy.scale(&f)).unwrap();
        assert_eq!(w.coefficient(&[0, 1]), &p * &f);
        let three = w.wedge(&dv(&c, "p")).unwrap();
        assert!(matches!(
            three.wedge(&dx),
            Err(FormError::DegreeOverflow(4, 3))
        ));
    }

    #[test]
    fn exterior_derivative_examples() {
        let c = chart();
        let (x, p) = (c.sym("x").unwrap(), c.sym("p").unwrap());
        let (dx, dy, dp) = (dv(&c, "x"), dv(&c, "y"), dv(&c, "p"));
        assert_eq!(dy.scale(&x).d(&c).unwrap(), dx.wedge(&dy).unwrap());
        assert_eq!(dx.scale(&p).d(&c).unwrap(), dp.wedge(&dx).unwrap());
        let contact = dy.sub(&dx.scale(&p)).unwrap();
        assert_eq!(contact.d(&c).unwrap(), dx.wedge(&dp).unwrap());
    }

    #[test]
    fn coframe_expression_and_dual() {
        let c = chart();
        let (dx, dy, dp) = (dv(&c, "x"), dv(&c, "y"), dv(&c, "p"));
        let id = Coframe::new(vec![dx.clone(), dy.clone(), dp.clone()]).unwrap();
        let cs = id.express(&dx.wedge(&dy).unwrap()).unwrap();
        assert_eq!(cs.get(&(0, 1)), Some(&Expression::one()));
        assert_eq!(cs.len(), 1);
        for (i, x) in id.dual_frame().iter().enumerate() {
            for j in 0..3 {
                let want = if i == j { 1 } else { 0 };
                assert_eq!(x.components[j], Expression::int(want));
            }
        }
        let singular = Coframe::new(vec![dx.clone(), dx.clone(), dp.clone()]);
        assert!(matches!(singular, Err(FormError::SingularCoframe)));
    }
}
