//! Linear Pfaffian systems with independence condition.
//!
//! A system is given on a chart by three blocks of 1-forms, `ω` (the system
//! `I`), `θ` (independence forms) and `π` (completion), which together form
//! a coframe. Everything downstream works on the framed differentials
//! `dω^α` written in that coframe.

mod absorption;
mod characters;
mod structure;

use thiserror::Error;

use crate::exterior::{Coframe, DifferentialForm, FormError};
use crate::expr::{Chart, ExprError, Expression};

pub use absorption::{absorb_torsion, AbsorptionSolution};
pub use characters::{cartan_characters, InvolutionReport};
pub use structure::StructureEquations;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PfaffianError {
    #[error("dω^{} has a π∧π term; the system is not linear", .form + 1)]
    NotLinear { form: usize },
    #[error("{0} essential torsion condition(s) remain unresolved")]
    NonEmptyEssentialTorsion(usize),
    #[error("expected {expected} forms for a {expected}-dimensional chart, got {got}")]
    FormCount { expected: usize, got: usize },
    #[error(transparent)]
    Form(#[from] FormError),
}

impl From<ExprError> for PfaffianError {
    fn from(e: ExprError) -> Self {
        PfaffianError::Form(FormError::Expr(e))
    }
}

#[derive(Clone, Debug)]
pub struct PfaffianSystem {
    chart: Chart,
    omega: Vec<DifferentialForm>,
    theta: Vec<DifferentialForm>,
    pi: Vec<DifferentialForm>,
    coframe: Coframe,
}

impl PfaffianSystem {
    pub fn new(
        chart: Chart,
        omega: Vec<DifferentialForm>,
        theta: Vec<DifferentialForm>,
        pi: Vec<DifferentialForm>,
    ) -> Result<Self, PfaffianError> {
        let got = omega.len() + theta.len() + pi.len();
        if got != chart.dim() {
            return Err(PfaffianError::FormCount {
                expected: chart.dim(),
                got,
            });
        }
        let all: Vec<DifferentialForm> = omega.iter().chain(&theta).chain(&pi).cloned().collect();
        let coframe = Coframe::new(all)?;
        Ok(PfaffianSystem {
            chart,
            omega,
            theta,
            pi,
            coframe,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn omega(&self) -> &[DifferentialForm] {
        &self.omega
    }

    pub fn theta(&self) -> &[DifferentialForm] {
        &self.theta
    }

    pub fn pi(&self) -> &[DifferentialForm] {
        &self.pi
    }

    pub fn a(&self) -> usize {
        self.omega.len()
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn r(&self) -> usize {
        self.pi.len()
    }

    pub fn coframe(&self) -> &Coframe {
        &self.coframe
    }

    /// `dω^α` written in the `(ω, θ, π)` coframe.
    pub fn framed_differentials(&self) -> Result<Vec<DifferentialForm>, PfaffianError> {
        self.omega
            .iter()
            .map(|w| Ok(self.coframe.to_frame(&w.d(&self.chart)?)?))
            .collect()
    }

    pub fn is_linear(&self) -> Result<bool, PfaffianError> {
        match self.structure_equations() {
            Ok(_) => Ok(true),
            Err(PfaffianError::NotLinear { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    }

    pub fn structure_equations(&self) -> Result<StructureEquations, PfaffianError> {
        let framed = self.framed_differentials()?;
        StructureEquations::decompose(&framed, self.a(), self.n(), self.r())
    }

    /// Checks `dω^α ≡ A π∧θ + ½ T θ∧θ mod [I]` symbolically.
    pub fn verify_reconstruction(&self, eq: &StructureEquations) -> Result<bool, PfaffianError> {
        let framed = self.framed_differentials()?;
        let rebuilt = eq.reconstruct(self.a());
        for (f, g) in framed.iter().zip(&rebuilt) {
            let diff = f.sub(g)?;
            if diff.terms().any(|(k, _)| k[0] >= self.a()) {
                return Ok(false);
            }
        }
        Ok(framed.len() == rebuilt.len())
    }
}

/// Structure equations of a coframe `(θ, π)` on its own: the targets are the
/// `θ`'s, so `dθ^i ≡ A π∧θ + ½ T θ∧θ` with nothing reduced away.
pub fn coframe_structure(
    chart: &Chart,
    theta: &[DifferentialForm],
    pi: &[DifferentialForm],
) -> Result<StructureEquations, PfaffianError> {
    let all: Vec<DifferentialForm> = theta.iter().chain(pi).cloned().collect();
    if all.len() != chart.dim() {
        return Err(PfaffianError::FormCount {
            expected: chart.dim(),
            got: all.len(),
        });
    }
    let coframe = Coframe::new(all)?;
    let framed = theta
        .iter()
        .map(|t| Ok(coframe.to_frame(&t.d(chart)?)?))
        .collect::<Result<Vec<_>, PfaffianError>>()?;
    StructureEquations::decompose(&framed, 0, theta.len(), pi.len())
}

fn jet_name(dep: usize, m: usize, idx: &[usize]) -> String {
    let mut s = if m == 1 { "u".to_string() } else { format!("u{}_", dep + 1) };
    for &i in idx {
        s.push_str(&(i + 1).to_string());
    }
    s
}

/// Nondecreasing multi-indices over `0..n` of length `len`.
fn multi_indices(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v: Vec<usize>| {
                let start = v.last().copied().unwrap_or(0);
                (start..n).map(move |i| {
                    let mut w = v.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
    }
    out
}

/// The contact system of `J^q(R^n, R^m)`.
///
/// Coordinates are `x` (or `x1..xn`), `u` (or `u1_, u2_, ..`) and jets named
/// by appending 1-based derivative indices, e.g. `u1`, `u12`, `u2_11`.
/// `ω = du_I − u_{I,i} dx^i` for `|I| < q`, `θ = dx^i`, `π = du_J` for `|J| = q`.
pub fn contact_system(n: usize, m: usize, q: usize) -> Result<PfaffianSystem, PfaffianError> {
    assert!(n >= 1 && m >= 1 && q >= 1, "contact_system needs n, m, q >= 1");
    let xs: Vec<String> = if n == 1 {
        vec!["x".into()]
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    };
    let mut names = xs.clone();
    for order in 0..=q {
        for dep in 0..m {
            for idx in multi_indices(n, order) {
                names.push(jet_name(dep, m, &idx));
            }
        }
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let chart = Chart::new(&refs, &[])?;
    let dim = chart.dim();
    let dx = |i: usize| DifferentialForm::basis(i, dim);
    let du = |name: &str| DifferentialForm::differential(&chart, name);

    let mut omega = Vec::new();
    for order in 0..q {
        for dep in 0..m {
            for idx in multi_indices(n, order) {
                let mut w = du(&jet_name(dep, m, &idx))?;
                for i in 0..n {
                    let mut next = idx.clone();
                    next.push(i);
                    next.sort_unstable();
                    let coeff = chart.sym(&jet_name(dep, m, &next))?;
                    w = w.sub(&dx(i).scale(&coeff))?;
                }
                omega.push(w);
            }
        }
    }
    let theta = (0..n).map(dx).collect();
    let mut pi = Vec::new();
    for dep in 0..m {
        for idx in multi_indices(n, q) {
            pi.push(du(&jet_name(dep, m, &idx))?);
        }
    }
    PfaffianSystem::new(chart, omega, theta, pi)
}

/// One prolongation step: the integral planes `π^ρ = λ^ρ_i θ^i` become new
/// forms of the system, with the free `λ`'s as new coordinates `lam{k}`.
pub fn prolong(
    system: &PfaffianSystem,
    sol: &AbsorptionSolution,
) -> Result<PfaffianSystem, PfaffianError> {
    let essential = sol.essential_torsion();
    if !essential.is_empty() {
        return Err(PfaffianError::NonEmptyEssentialTorsion(essential.len()));
    }
    let old = system.chart();
    let n_coords = old.coords().len();
    let names: Vec<String> = (1..)
        .map(|k| format!("lam{k}"))
        .filter(|nm| old.var(nm).is_err())
        .take(sol.free.len())
        .collect();
    let chart = old.extend_coords(&names)?;
    let extra = names.len();
    let dim = chart.dim();

    let embed = |f: &DifferentialForm| -> Result<DifferentialForm, PfaffianError> {
        let images: Vec<DifferentialForm> = (0..old.dim())
            .map(|b| {
                let target = if b < n_coords { b } else { b + extra };
                DifferentialForm::basis(target, dim)
            })
            .collect();
        Ok(f.change_basis(&images)?)
    };

    let mu: Vec<Expression> = names
        .iter()
        .map(|nm| chart.sym(nm))
        .collect::<Result<_, _>>()?;
    let lambda: Vec<Expression> = (0..sol.unknowns.len())
        .map(|u| {
            let mut v = sol.particular[u].clone();
            for (k, ker) in sol.kernel.iter().enumerate() {
                if !ker[u].is_zero() {
                    v = v + &ker[u] * &mu[k];
                }
            }
            v
        })
        .collect();

    let theta: Vec<DifferentialForm> = system.theta().iter().map(embed).collect::<Result<_, _>>()?;
    let mut omega: Vec<DifferentialForm> = system.omega().iter().map(embed).collect::<Result<_, _>>()?;
    let n = system.n();
    for (rho, p) in system.pi().iter().enumerate() {
        let mut w = embed(p)?;
        for (i, t) in theta.iter().enumerate() {
            let l = &lambda[rho * n + i];
            if !l.is_zero() {
                w = w.sub(&t.scale(l))?;
            }
        }
        omega.push(w);
    }
    let pi = (0..extra).map(|k| DifferentialForm::basis(n_coords + k, dim)).collect();
    PfaffianSystem::new(chart, omega, theta, pi)
}

/// Outcome of one round of the prolongation loop.
#[derive(Clone, Debug)]
pub struct ProlongationStep {
    pub dim: usize,
    pub essential_torsion: Vec<Expression>,
    pub involution: InvolutionReport,
}

/// Absorb, test involution, prolong; at most `max_steps` prolongations.
///
/// Stops early on involution or on essential torsion.
pub fn prolongation_tower(
    system: &PfaffianSystem,
    max_steps: usize,
) -> Result<Vec<ProlongationStep>, PfaffianError> {
    let mut current = system.clone();
    let mut steps = Vec::new();
    for round in 0..=max_steps {
        let eq = current.structure_equations()?;
        let sol = absorb_torsion(&eq);
        let involution = cartan_characters(&eq);
        let essential = sol.essential_torsion();
        let stop = involution.involutive || !essential.is_empty() || round == max_steps;
        steps.push(ProlongationStep {
            dim: current.chart().dim(),
            essential_torsion: essential,
            involution,
        });
        if stop {
            break;
        }
        current = prolong(&current, &sol)?;
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(names: &[&str]) -> Chart {
        Chart::new(names, &[]).unwrap()
    }

    fn dv(c: &Chart, n: &str) -> DifferentialForm {
        DifferentialForm::differential(c, n).unwrap()
    }

    #[test]
    fn jet_one_contact_form() {
        let c = chart(&["x", "y", "p"]);
        let w = dv(&c, "y").sub(&dv(&c, "x").scale(&c.sym("p").unwrap())).unwrap();
        let s = PfaffianSystem::new(c.clone(), vec![w], vec![dv(&c, "x")], vec![dv(&c, "p")]).unwrap();
        assert!(s.is_linear().unwrap());
        let eq = s.structure_equations().unwrap();
        // dω = -dp∧dx = -π∧θ
        assert_eq!(eq.tableau(0, 0, 0), &Expression::int(-1));
        assert!(eq.torsion_is_zero());
        assert!(s.verify_reconstruction(&eq).unwrap());
    }

    #[test]
    fn pi_wedge_pi_is_not_linear() {
        let c = chart(&["x1", "x2", "x3", "x4"]);
        let w = dv(&c, "x1").sub(&dv(&c, "x4").scale(&c.sym("x3").unwrap())).unwrap();
        let s = PfaffianSystem::new(
            c.clone(),
            vec![w],
            vec![dv(&c, "x2")],
            vec![dv(&c, "x3"), dv(&c, "x4")],
        )
        .unwrap();
        assert!(!s.is_linear().unwrap());
        assert_eq!(s.structure_equations(), Err(PfaffianError::NotLinear { form: 0 }));
    }

    #[test]
    fn no_pi_forms_is_linear() {
        let c = chart(&["x", "y"]);
        let w = dv(&c, "y").scale(&c.sym("x").unwrap());
        let s = PfaffianSystem::new(c.clone(), vec![w], vec![dv(&c, "x")], vec![]).unwrap();
        assert!(s.is_linear().unwrap());
        let eq = s.structure_equations().unwrap();
        assert_eq!(eq.r(), 0);
    }

    #[test]
    fn closed_forms_have_no_structure() {
        let c = chart(&["x", "y", "z"]);
        let w = dv(&c, "y").add(&dv(&c, "z").scale(&Expression::int(3))).unwrap();
        let s = PfaffianSystem::new(c.clone(), vec![w], vec![dv(&c, "x")], vec![dv(&c, "z")]).unwrap();
        let eq = s.structure_equations().unwrap();
        assert!(eq.tableau_is_zero() && eq.torsion_is_zero());
    }

    #[test]
    fn contact_systems() {
        let s = contact_system(1, 1, 1).unwrap();
        assert_eq!(s.chart().coords(), ["x", "u", "u1"]);
        assert_eq!((s.a(), s.n(), s.r()), (1, 1, 1));

        let s = contact_system(1, 1, 2).unwrap();
        assert_eq!(s.chart().coords(), ["x", "u", "u1", "u11"]);
        let c = s.chart();
        let expected = dv(c, "u1").sub(&dv(c, "x").scale(&c.sym("u11").unwrap())).unwrap();
        assert_eq!(s.omega()[1], expected);

        let s = contact_system(2, 1, 1).unwrap();
        let c = s.chart();
        let expected = dv(c, "u")
            .sub(&dv(c, "x1").scale(&c.sym("u1").unwrap()))
            .unwrap()
            .sub(&dv(c, "x2").scale(&c.sym("u2").unwrap()))
            .unwrap();
        assert_eq!(s.omega(), [expected]);

        for (n, m, q) in [(1, 1, 1), (2, 1, 2), (1, 2, 2), (2, 2, 1), (3, 1, 2)] {
            let s = contact_system(n, m, q).unwrap();
            assert!(s.is_linear().unwrap(), "{n} {m} {q}");
            let eq = s.structure_equations().unwrap();
            assert!(s.verify_reconstruction(&eq).unwrap());
            assert!(eq.torsion_is_zero());
        }
    }

    #[test]
    fn prolonging_first_order_contact_gives_second_order() {
        let s = contact_system(1, 1, 1).unwrap();
        let sol = absorb_torsion(&s.structure_equations().unwrap());
        assert_eq!(sol.free.len(), 1);
        let p = prolong(&s, &sol).unwrap();
        assert_eq!(p.chart().dim(), s.chart().dim() + 1);
        let target = contact_system(1, 1, 2).unwrap();
        assert_eq!(
            p.structure_equations().unwrap(),
            target.structure_equations().unwrap()
        );
    }

    #[test]
    fn prolonging_without_free_unknowns_keeps_dimension() {
        let c = chart(&["x", "y"]);
        let s = PfaffianSystem::new(c.clone(), vec![dv(&c, "y")], vec![dv(&c, "x")], vec![]).unwrap();
        let sol = absorb_torsion(&s.structure_equations().unwrap());
        assert!(sol.free.is_empty());
        let p = prolong(&s, &sol).unwrap();
        assert_eq!(p.chart().dim(), 2);
    }

    #[test]
    fn prolongation_refuses_essential_torsion() {
        // dω = dx∧dy with θ = (dx, dy) and no π: pure torsion
        let c = chart(&["x", "y", "z"]);
        let w = dv(&c, "z").sub(&dv(&c, "y").scale(&c.sym("x").unwrap())).unwrap();
        let s = PfaffianSystem::new(c.clone(), vec![w], vec![dv(&c, "x"), dv(&c, "y")], vec![]).unwrap();
        let sol = absorb_torsion(&s.structure_equations().unwrap());
        assert_eq!(sol.essential_torsion().len(), 1);
        assert_eq!(
            prolong(&s, &sol).unwrap_err(),
            PfaffianError::NonEmptyEssentialTorsion(1)
        );
    }

    #[test]
    fn tower_stops_on_involution() {
        let steps = prolongation_tower(&contact_system(1, 1, 1).unwrap(), 3).unwrap();
        assert_eq!(steps.len(), 1);
        assert!(steps[0].involution.involutive);
    }
}
