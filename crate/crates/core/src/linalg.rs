//! Gaussian elimination over the field of rational expressions.
//!
//! Pivots are chosen by smallest canonical size among the admissible rows,
//! which keeps intermediate expressions small. Ties break on row index, so
//! results are deterministic.

use thiserror::Error;

use crate::expr::{gcd, Expression, Poly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch")]
    Shape,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Expression>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Expression::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Expression::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Expression>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Shape);
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Expression {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Expression) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Expression] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape);
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s: Expression = (0..self.cols)
                    .filter(|&k| !self.get(i, k).is_zero() && !other.get(k, j).is_zero())
                    .map(|k| self.get(i, k) * other.get(k, j))
                    .sum();
                out.set(i, j, s);
            }
        }
        Ok(out)
    }

    /// Appends the columns of `other`.
    pub fn augment(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::Shape);
        }
        let rows = (0..self.rows)
            .map(|r| {
                let mut v = self.row(r).to_vec();
                v.extend_from_slice(other.row(r));
                v
            })
            .collect();
        Matrix::from_rows(rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Expression::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// Reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub matrix: Matrix,
    /// `(row, column)` of each pivot, in elimination order.
    pub pivots: Vec<(usize, usize)>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.pivots.iter().map(|&(_, c)| c).collect()
    }
}

/// Row-reduces `m`, pivoting only on the listed columns in the given order.
///
/// Columns not listed are carried along (augmented right-hand sides).
pub fn rref_on(m: &Matrix, columns: &[usize]) -> Echelon {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut next = 0;
    for &col in columns {
        if next == a.rows {
            break;
        }
        let best = (next..a.rows)
            .filter(|&r| !a.get(r, col).is_zero())
            .min_by_key(|&r| (a.get(r, col).size(), r));
        let Some(pr) = best else { continue };
        a.swap_rows(next, pr);
        let inv = a.get(next, col).inv().expect("nonzero pivot");
        for c in 0..a.cols {
            if !a.get(next, c).is_zero() {
                let v = a.get(next, c) * &inv;
                a.set(next, c, v);
            }
        }
        for r in 0..a.rows {
            if r == next {
                continue;
            }
            let factor = a.get(r, col).clone();
            if factor.is_zero() {
                continue;
            }
            for c in 0..a.cols {
                let pv = a.get(next, c);
                if pv.is_zero() {
                    continue;
                }
                let v = a.get(r, c) - &(&factor * pv);
                a.set(r, c, v);
            }
        }
        pivots.push((next, col));
        next += 1;
    }
    Echelon { matrix: a, pivots }
}

pub fn rref(m: &Matrix) -> Echelon {
    let cols: Vec<usize> = (0..m.cols).collect();
    rref_on(m, &cols)
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).rank()
}

/// `m⁻¹ = adj · diag(scales) / det` with polynomial entries.
///
/// Row `i` of `m` times `scales[i]` is polynomial; `adj / det` is the inverse
/// of that scaled matrix, so `k × k` minors of `adj` are divisible by
/// `det^(k-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyInverse {
    pub adj: Vec<Vec<Poly>>,
    pub det: Poly,
    pub scales: Vec<Poly>,
}

impl PolyInverse {
    pub fn entry(&self, i: usize, j: usize) -> Expression {
        let v = &self.adj[i][j];
        if v.is_zero() {
            return Expression::zero();
        }
        Expression::from_parts(v.mul(&self.scales[j]), self.det.clone()).expect("nonzero determinant")
    }
}

/// Fraction-free Gauss-Jordan elimination on the row-scaled matrix. No
/// intermediate rational function is formed.
pub fn poly_inverse(m: &Matrix) -> Result<PolyInverse, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::Shape);
    }
    let n = m.rows;
    let w = 2 * n;
    let mut scales = Vec::with_capacity(n);
    let mut a: Vec<Vec<Poly>> = Vec::with_capacity(n);
    for r in 0..n {
        let mut l = Poly::one();
        for e in m.row(r) {
            let g = gcd(&l, e.denom());
            l = l.mul(&e.denom().div_exact(&g).expect("gcd divides"));
        }
        let mut row: Vec<Poly> = m
            .row(r)
            .iter()
            .map(|e| e.numer().mul(&l.div_exact(e.denom()).expect("lcm is a multiple")))
            .collect();
        row.extend((0..n).map(|c| if c == r { Poly::one() } else { Poly::zero() }));
        a.push(row);
        scales.push(l);
    }
    let mut prev = Poly::one();
    for k in 0..n {
        let Some(pr) = (k..n).filter(|&r| !a[r][k].is_zero()).min_by_key(|&r| (a[r][k].len(), r)) else {
            return Err(LinalgError::Singular);
        };
        a.swap(k, pr);
        let pivot = a[k][k].clone();
        for i in (0..n).filter(|&i| i != k) {
            let f = a[i][k].clone();
            for j in 0..w {
                if j == k {
                    continue;
                }
                let v = pivot.mul(&a[i][j]).sub(&f.mul(&a[k][j]));
                a[i][j] = if prev.is_one() {
                    v
                } else {
                    v.div_exact(&prev).expect("fraction-free step is exact")
                };
            }
            a[i][k] = Poly::zero();
        }
        prev = pivot;
    }
    // The left block is now det·I.
    let det = if n == 0 { Poly::one() } else { a[n - 1][n - 1].clone() };
    let adj = a.into_iter().map(|row| row[n..].to_vec()).collect();
    Ok(PolyInverse { adj, det, scales })
}

pub fn inverse(m: &Matrix) -> Result<Matrix, LinalgError> {
    let p = poly_inverse(m)?;
    let n = m.rows;
    let mut inv = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv.set(i, j, p.entry(i, j));
        }
    }
    Ok(inv)
}

/// Determinant of a square polynomial matrix by Bareiss elimination.
pub fn poly_determinant(mut a: Vec<Vec<Poly>>) -> Poly {
    let n = a.len();
    match n {
        0 => return Poly::one(),
        1 => return a[0][0].clone(),
        2 => return a[0][0].mul(&a[1][1]).sub(&a[0][1].mul(&a[1][0])),
        _ => {}
    }
    let mut negate = false;
    let mut prev = Poly::one();
    for k in 0..n - 1 {
        let Some(pr) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return Poly::zero();
        };
        if pr != k {
            a.swap(k, pr);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[k][k].mul(&a[i][j]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = if prev.is_one() {
                    v
                } else {
                    v.div_exact(&prev).expect("Bareiss step is exact")
                };
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        d.neg()
    } else {
        d
    }
}

pub fn determinant(m: &Matrix) -> Result<Expression, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::Shape);
    }
    let mut a = m.clone();
    let n = a.rows;
    let mut det = Expression::one();
    for col in 0..n {
        let Some(pr) = (col..n)
            .filter(|&r| !a.get(r, col).is_zero())
            .min_by_key(|&r| (a.get(r, col).size(), r))
        else {
            return Ok(Expression::zero());
        };
        if pr != col {
            a.swap_rows(col, pr);
            det = -det;
        }
        let pivot = a.get(col, col).clone();
        det = &det * &pivot;
        let inv = pivot.inv().expect("nonzero pivot");
        for r in col + 1..n {
            let factor = a.get(r, col) * &inv;
            if factor.is_zero() {
                continue;
            }
            for c in col..n {
                let v = a.get(r, c) - &(&factor * a.get(col, c));
                a.set(r, c, v);
            }
        }
    }
    Ok(det)
}

/// Basis of `{v : m v = 0}`, one vector per free column.
pub fn null_space(m: &Matrix) -> Vec<Vec<Expression>> {
    let e = rref(m);
    let pivot_cols = e.pivot_columns();
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![Expression::zero(); m.cols];
        v[free] = Expression::one();
        for &(r, c) in &e.pivots {
            v[c] = -e.matrix.get(r, free);
        }
        basis.push(v);
    }
    basis
}

/// Reduced echelon basis of `{y : y m = 0}`; unique for a given matrix.
pub fn left_null_space(m: &Matrix) -> Vec<Vec<Expression>> {
    let basis = null_space(&m.transpose());
    if basis.is_empty() {
        return basis;
    }
    let e = rref(&Matrix::from_rows(basis).expect("rectangular"));
    (0..e.rank()).map(|r| e.matrix.row(r).to_vec()).collect()
}

/// Solution set of `m x = b`: a particular solution (free unknowns zero) and
/// a kernel basis, or `None` when inconsistent.
pub fn solve(m: &Matrix, b: &[Expression]) -> Option<(Vec<Expression>, Vec<Vec<Expression>>)> {
    assert_eq!(b.len(), m.rows);
    let rhs = Matrix::from_rows(b.iter().map(|x| vec![x.clone()]).collect()).ok()?;
    let aug = if m.rows == 0 {
        Matrix::zeros(0, m.cols + 1)
    } else {
        m.augment(&rhs).ok()?
    };
    let cols: Vec<usize> = (0..m.cols).collect();
    let e = rref_on(&aug, &cols);
    for r in e.rank()..m.rows {
        if !e.matrix.get(r, m.cols).is_zero() {
            return None;
        }
    }
    let mut x = vec![Expression::zero(); m.cols];
    for &(r, c) in &e.pivots {
        x[c] = e.matrix.get(r, m.cols).clone();
    }
    Some((x, null_space(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Chart;

    fn k(n: i64) -> Expression {
        Expression::int(n)
    }

    #[test]
    fn inverse_of_symbolic_matrix() {
        let c = Chart::new(&["x", "y"], &[]).unwrap();
        let (x, y) = (c.sym("x").unwrap(), c.sym("y").unwrap());
        let m = Matrix::from_rows(vec![vec![x.clone(), y.clone()], vec![k(0), x.clone()]]).unwrap();
        let inv = inverse(&m).unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(2));
        assert_eq!(determinant(&m).unwrap(), &x * &x);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = Matrix::from_rows(vec![vec![k(1), k(2)], vec![k(2), k(4)]]).unwrap();
        assert_eq!(inverse(&m), Err(LinalgError::Singular));
        assert!(determinant(&m).unwrap().is_zero());
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn kernels() {
        let m = Matrix::from_rows(vec![vec![k(1), k(2), k(3)]]).unwrap();
        let ns = null_space(&m);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let s: Expression = v.iter().zip(m.row(0)).map(|(a, b)| a * b).sum();
            assert!(s.is_zero());
        }
        let left = left_null_space(&Matrix::from_rows(vec![vec![k(1)], vec![k(2)]]).unwrap());
        assert_eq!(left, vec![vec![k(1), Expression::ratio(-1, 2)]]);
    }

    #[test]
    fn solve_reports_inconsistency() {
        let m = Matrix::from_rows(vec![vec![k(1), k(1)], vec![k(2), k(2)]]).unwrap();
        assert!(solve(&m, &[k(1), k(3)]).is_none());
        let (x, ker) = solve(&m, &[k(1), k(2)]).unwrap();
        assert_eq!(x, vec![k(1), k(0)]);
        assert_eq!(ker.len(), 1);
    }
}
