use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::expr::{Expression, Var};
use crate::linalg::{self, Matrix};

use super::absorption::lambda_matrix;
use super::StructureEquations;

const FLAG_TRIALS: u64 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvolutionReport {
    /// Reduced characters `s_1 ≥ .. ≥ s_n`.
    pub characters: Vec<usize>,
    /// Dimension of the first prolongation of the tableau.
    pub prolonged_dim: usize,
    pub involutive: bool,
}

impl InvolutionReport {
    /// `s_1 + 2 s_2 + .. + n s_n`.
    pub fn cartan_bound(&self) -> usize {
        self.characters.iter().enumerate().map(|(k, s)| (k + 1) * s).sum()
    }
}

/// Rank of a matrix of expressions. A random rational specialization gives a
/// lower bound; if it is already maximal the exact computation is skipped.
fn generic_rank(rows: Vec<Vec<Expression>>, rng: &mut StdRng) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let full = rows.len().min(rows[0].len());
    let mut point: HashMap<Var, BigRational> = HashMap::new();
    for v in rows.iter().flatten().flat_map(Expression::vars) {
        point
            .entry(v)
            .or_insert_with(|| BigRational::new(rng.gen_range(-97..=97).into(), rng.gen_range(1..=13).into()));
    }
    let value = |v: Var| point.get(&v).cloned().unwrap_or_else(BigRational::zero);
    let numeric: Option<Vec<Vec<Expression>>> = rows
        .iter()
        .map(|r| r.iter().map(|e| e.eval(&value).map(Expression::rational)).collect())
        .collect();
    if let Some(numeric) = numeric {
        if linalg::rank(&Matrix::from_rows(numeric).expect("rectangular")) == full {
            return full;
        }
    }
    linalg::rank(&Matrix::from_rows(rows).expect("rectangular"))
}

/// Rows `(α, j)` for `j < k`, columns `ρ`: `Σ_i A^α_{ρi} v_j^i`.
fn flag_matrix(eq: &StructureEquations, flag: &[Vec<i64>], k: usize) -> Vec<Vec<Expression>> {
    let mut rows = Vec::new();
    for alpha in 0..eq.a() {
        for v in &flag[..k] {
            rows.push(
                (0..eq.r())
                    .map(|rho| {
                        (0..eq.n())
                            .filter(|&i| v[i] != 0 && !eq.tableau(alpha, rho, i).is_zero())
                            .map(|i| eq.tableau(alpha, rho, i) * &Expression::int(v[i]))
                            .sum()
                    })
                    .collect(),
            );
        }
    }
    rows
}

/// Reduced Cartan characters at a generic flag, and Cartan's test.
///
/// `s_1 + .. + s_k` is the generic rank of the tableau restricted to the
/// first `k` flag directions; the maximum over a few seeded random flags is
/// taken. The first prolongation is the space of symmetric `A λ`, computed
/// as the image of the homogeneous absorption solutions.
pub fn cartan_characters(eq: &StructureEquations) -> InvolutionReport {
    let n = eq.n();
    let mut rng = StdRng::seed_from_u64(0x5eed_c4a7);
    let mut ranks = vec![0usize; n + 1];
    for _ in 0..FLAG_TRIALS {
        let flag: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-5..=5)).collect())
            .collect();
        for k in 1..=n {
            let r = generic_rank(flag_matrix(eq, &flag, k), &mut rng);
            ranks[k] = ranks[k].max(r);
        }
    }
    let characters: Vec<usize> = (1..=n).map(|k| ranks[k].saturating_sub(ranks[k - 1])).collect();

    let l = lambda_matrix(eq);
    let kernel = if l.rows() == 0 {
        (0..l.cols())
            .map(|c| {
                let mut v = vec![Expression::zero(); l.cols()];
                v[c] = Expression::one();
                v
            })
            .collect()
    } else {
        linalg::null_space(&l)
    };
    // λ ↦ (α, i, k) ↦ Σ_ρ A^α_{ρi} λ^ρ_k
    let images: Vec<Vec<Expression>> = kernel
        .iter()
        .map(|lam| {
            let mut img = Vec::new();
            for alpha in 0..eq.a() {
                for i in 0..n {
                    for k in 0..n {
                        img.push(
                            (0..eq.r())
                                .filter(|&rho| !lam[rho * n + k].is_zero())
                                .map(|rho| eq.tableau(alpha, rho, i) * &lam[rho * n + k])
                                .sum(),
                        );
                    }
                }
            }
            img
        })
        .collect();
    let prolonged_dim = generic_rank(images, &mut rng);
    let mut report = InvolutionReport {
        characters,
        prolonged_dim,
        involutive: false,
    };
    report.involutive = report.prolonged_dim == report.cartan_bound();
    report
}
