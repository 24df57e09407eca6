use super::chart::Chart;
use super::{ExprError, Expression};

/// First-order derivation `Σ_v c_v ∂/∂v` on a chart.
///
/// Used both for total derivatives on jet space (`D_x = ∂_x + p∂_y + f∂_p`)
/// and for the invariant derivations dual to a coframe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub name: String,
    /// One coefficient per basis differential of the chart.
    pub components: Vec<Expression>,
}

pub type TotalDerivation = Derivation;
pub type FrameDerivation = Derivation;

impl Derivation {
    pub fn new(name: impl Into<String>, components: Vec<Expression>) -> Self {
        Derivation {
            name: name.into(),
            components,
        }
    }

    /// Builds a derivation from `(name, coefficient)` pairs; unlisted
    /// coordinates get coefficient zero.
    pub fn from_pairs(
        chart: &Chart,
        name: impl Into<String>,
        pairs: &[(&str, Expression)],
    ) -> Result<Self, ExprError> {
        let mut components = vec![Expression::zero(); chart.dim()];
        for (n, c) in pairs {
            let v = chart.var(n)?;
            let i = chart.basis_index(v).expect("coordinate or parameter");
            components[i] = c.clone();
        }
        Ok(Derivation::new(name, components))
    }

    /// Applies the derivation: `Σ_v c_v ∂e/∂v`.
    pub fn apply(&self, chart: &Chart, e: &Expression) -> Result<Expression, ExprError> {
        if self.components.len() != chart.dim() {
            return Err(ExprError::ChartMismatch);
        }
        chart.check(e)?;
        let mut acc = Expression::zero();
        for (i, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = e.partial(chart, chart.basis_var(i))?;
            if !d.is_zero() {
                acc = &acc + &(c * &d);
            }
        }
        Ok(acc)
    }

    /// `D^k e`.
    pub fn apply_n(&self, chart: &Chart, e: &Expression, k: usize) -> Result<Expression, ExprError> {
        let mut out = e.clone();
        for _ in 0..k {
            out = self.apply(chart, &out)?;
        }
        Ok(out)
    }
}
