use crate::exterior::DifferentialForm;
use crate::expr::Expression;

use super::PfaffianError;

/// Tableau and torsion of a linear Pfaffian system:
///
/// `dω^α ≡ A^α_{ρi} π^ρ ∧ θ^i + ½ T^α_{jk} θ^j ∧ θ^k  mod [I]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureEquations {
    a: usize,
    n: usize,
    r: usize,
    /// `tableau[α][ρ][i]`.
    tableau: Vec<Vec<Vec<Expression>>>,
    /// `torsion[α][j][k]`, antisymmetric in `j, k`.
    torsion: Vec<Vec<Vec<Expression>>>,
}

impl StructureEquations {
    pub fn new(a: usize, n: usize, r: usize) -> Self {
        StructureEquations {
            a,
            n,
            r,
            tableau: vec![vec![vec![Expression::zero(); n]; r]; a],
            torsion: vec![vec![vec![Expression::zero(); n]; n]; a],
        }
    }

    /// Builds structure equations from dense arrays; `torsion` entries with
    /// `j >= k` are ignored and rebuilt by antisymmetry.
    pub fn from_parts(
        tableau: Vec<Vec<Vec<Expression>>>,
        torsion_upper: Vec<Vec<Vec<Expression>>>,
    ) -> Self {
        let a = tableau.len();
        let r = tableau.first().map_or(0, Vec::len);
        let n = torsion_upper
            .first()
            .map(Vec::len)
            .or_else(|| tableau.first().and_then(|t| t.first()).map(Vec::len))
            .unwrap_or(0);
        let mut out = StructureEquations::new(a, n, r);
        out.tableau = tableau;
        for (alpha, t) in torsion_upper.into_iter().enumerate() {
            for j in 0..n {
                for k in j + 1..n {
                    out.set_torsion(alpha, j, k, t[j][k].clone());
                }
            }
        }
        out
    }

    /// Number of forms in the system `I`.
    pub fn a(&self) -> usize {
        self.a
    }

    /// Number of independence forms.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of complementary forms `π`.
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn tableau(&self, alpha: usize, rho: usize, i: usize) -> &Expression {
        &self.tableau[alpha][rho][i]
    }

    pub fn torsion(&self, alpha: usize, j: usize, k: usize) -> &Expression {
        &self.torsion[alpha][j][k]
    }

    pub fn set_torsion(&mut self, alpha: usize, j: usize, k: usize, v: Expression) {
        self.torsion[alpha][k][j] = -&v;
        self.torsion[alpha][j][k] = v;
    }

    pub fn tableau_is_zero(&self) -> bool {
        self.tableau.iter().flatten().flatten().all(Expression::is_zero)
    }

    pub fn torsion_is_zero(&self) -> bool {
        self.torsion.iter().flatten().flatten().all(Expression::is_zero)
    }

    /// Splits framed 2-forms into tableau and torsion.
    ///
    /// Frame indices are laid out as `ω` in `0..omega`, `θ` next, `π` last.
    /// Terms involving an `ω` are dropped (reduction mod `[I]`).
    pub(crate) fn decompose(
        framed: &[DifferentialForm],
        omega: usize,
        n: usize,
        r: usize,
    ) -> Result<Self, PfaffianError> {
        let mut out = StructureEquations::new(framed.len(), n, r);
        for (alpha, form) in framed.iter().enumerate() {
            for (idx, c) in form.terms() {
                let (i, j) = (idx[0], idx[1]);
                if i < omega {
                    continue;
                }
                let (i, j) = (i - omega, j - omega);
                match (i < n, j < n) {
                    (true, true) => out.set_torsion(alpha, i, j, c.clone()),
                    // θ^i ∧ π^ρ = -π^ρ ∧ θ^i
                    (true, false) => out.tableau[alpha][j - n][i] = -c,
                    (false, false) => {
                        return Err(PfaffianError::NotLinear { form: alpha })
                    }
                    (false, true) => unreachable!("indices are increasing"),
                }
            }
        }
        Ok(out)
    }

    /// `A π∧θ + ½ T θ∧θ` as framed 2-forms on `omega + n + r` dimensions.
    pub fn reconstruct(&self, omega: usize) -> Vec<DifferentialForm> {
        let dim = omega + self.n + self.r;
        (0..self.a)
            .map(|alpha| {
                let mut terms = Vec::new();
                for rho in 0..self.r {
                    for i in 0..self.n {
                        let c = &self.tableau[alpha][rho][i];
                        if !c.is_zero() {
                            terms.push((vec![omega + self.n + rho, omega + i], c.clone()));
                        }
                    }
                }
                for j in 0..self.n {
                    for k in j + 1..self.n {
                        let c = &self.torsion[alpha][j][k];
                        if !c.is_zero() {
                            terms.push((vec![omega + j, omega + k], c.clone()));
                        }
                    }
                }
                DifferentialForm::from_terms(2, dim, terms).expect("valid indices")
            })
            .collect()
    }
}
