use crate::expr::Expression;
use crate::linalg::{self, Matrix};

use super::StructureEquations;

/// Result of absorbing torsion into `π^ρ ↦ π^ρ − λ^ρ_i θ^i`.
///
/// The absorption equations are
/// `A^α_{ρj} λ^ρ_k − A^α_{ρk} λ^ρ_j = T^α_{jk}`, one per `(α, j<k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsorptionSolution {
    /// `(ρ, i)` for each unknown, in lexicographic order.
    pub unknowns: Vec<(usize, usize)>,
    /// `(α, j, k)` for each equation row.
    pub equations: Vec<(usize, usize, usize)>,
    /// Solution with every free unknown set to zero.
    pub particular: Vec<Expression>,
    /// Indices into `unknowns` left undetermined.
    pub free: Vec<usize>,
    /// Homogeneous solutions, one per free unknown.
    pub kernel: Vec<Vec<Expression>>,
    /// Reduced echelon basis `y` of `{y : y L = 0}`.
    pub conditions: Vec<Vec<Expression>>,
    /// `y · T` for each condition row.
    pub values: Vec<Expression>,
}

impl AbsorptionSolution {
    /// Nonzero essential torsion combinations.
    pub fn essential_torsion(&self) -> Vec<Expression> {
        self.values.iter().filter(|v| !v.is_zero()).cloned().collect()
    }

    /// Torsion left after substituting `λ = particular`.
    pub fn absorbed(&self, eq: &StructureEquations) -> StructureEquations {
        let mut out = eq.clone();
        let l = lambda_matrix(eq);
        for (row, &(alpha, j, k)) in self.equations.iter().enumerate() {
            let shift: Expression = (0..self.unknowns.len())
                .filter(|&u| !l.get(row, u).is_zero() && !self.particular[u].is_zero())
                .map(|u| l.get(row, u) * &self.particular[u])
                .sum();
            out.set_torsion(alpha, j, k, eq.torsion(alpha, j, k) - &shift);
        }
        out
    }
}

/// Coefficient matrix of the absorption equations in the `λ` unknowns.
pub(crate) fn lambda_matrix(eq: &StructureEquations) -> Matrix {
    let (n, r) = (eq.n(), eq.r());
    let rows: Vec<Vec<Expression>> = equations(eq)
        .into_iter()
        .map(|(alpha, j, k)| {
            let mut row = vec![Expression::zero(); r * n];
            for rho in 0..r {
                row[rho * n + k] = row[rho * n + k].clone() + eq.tableau(alpha, rho, j);
                row[rho * n + j] = row[rho * n + j].clone() - eq.tableau(alpha, rho, k);
            }
            row
        })
        .collect();
    if rows.is_empty() {
        Matrix::zeros(0, r * n)
    } else {
        Matrix::from_rows(rows).expect("rectangular")
    }
}

fn equations(eq: &StructureEquations) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for alpha in 0..eq.a() {
        for j in 0..eq.n() {
            for k in j + 1..eq.n() {
                out.push((alpha, j, k));
            }
        }
    }
    out
}

pub fn absorb_torsion(eq: &StructureEquations) -> AbsorptionSolution {
    let (n, r) = (eq.n(), eq.r());
    let unknowns: Vec<(usize, usize)> = (0..r).flat_map(|rho| (0..n).map(move |i| (rho, i))).collect();
    let equations = equations(eq);
    let l = lambda_matrix(eq);
    let t: Vec<Expression> = equations
        .iter()
        .map(|&(alpha, j, k)| eq.torsion(alpha, j, k).clone())
        .collect();

    let cols: Vec<usize> = (0..unknowns.len()).collect();
    let rhs = Matrix::from_rows(t.iter().map(|x| vec![x.clone()]).collect()).ok();
    let aug = match rhs {
        Some(rhs) if l.rows() > 0 => l.augment(&rhs).expect("same row count"),
        _ => Matrix::zeros(0, unknowns.len() + 1),
    };
    let ech = linalg::rref_on(&aug, &cols);
    let mut particular = vec![Expression::zero(); unknowns.len()];
    for &(row, col) in &ech.pivots {
        particular[col] = ech.matrix.get(row, unknowns.len()).clone();
    }
    let pivot_cols = ech.pivot_columns();
    let free: Vec<usize> = cols.iter().copied().filter(|c| !pivot_cols.contains(c)).collect();
    let kernel = if l.rows() == 0 {
        free.iter()
            .map(|&f| {
                let mut v = vec![Expression::zero(); unknowns.len()];
                v[f] = Expression::one();
                v
            })
            .collect()
    } else {
        linalg::null_space(&l)
    };

    let conditions = if l.rows() == 0 {
        Vec::new()
    } else if l.cols() == 0 {
        (0..l.rows())
            .map(|i| {
                let mut v = vec![Expression::zero(); l.rows()];
                v[i] = Expression::one();
                v
            })
            .collect()
    } else {
        linalg::left_null_space(&l)
    };
    let values = conditions
        .iter()
        .map(|y| {
            y.iter()
                .zip(&t)
                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect();

    AbsorptionSolution {
        unknowns,
        equations,
        particular,
        free,
        kernel,
        conditions,
        values,
    }
}
