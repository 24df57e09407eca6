//! Point equivalence of `y'' = f(x, y, y')` under `(x, y) ↦ (x + C, η(x, y))`.

use std::collections::{BTreeMap, HashMap};

use crate::exterior::{Coframe, DifferentialForm};
use crate::expr::{Chart, Derivation, Expression, Var};
use crate::linalg::{self, Matrix};
use crate::pfaffian::{
    absorb_torsion, cartan_characters, coframe_structure, AbsorptionSolution, InvolutionReport,
    StructureEquations,
};

use super::{ensure_concrete, ensure_vars, FlatnessReport, ProblemError, Residual};

/// Chart `(x, y, p | a3)` with `f(x, y, p)` and `a3 ≠ 0`.
pub fn ode2_chart() -> Chart {
    let chart = Chart::new(&["x", "y", "p"], &["a3"])
        .and_then(|c| c.with_function("f", &["x", "y", "p"]))
        .expect("fixed chart");
    let a3 = chart.sym("a3").expect("declared");
    chart.assume_nonzero(a3)
}

/// Entries of the structural group after reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuralGroup {
    pub a1: Expression,
    pub a2: Expression,
    pub a3: Expression,
}

/// An equation `y'' = f` on [`ode2_chart`].
#[derive(Clone, Debug)]
pub struct Ode2Problem {
    pub chart: Chart,
    pub f: Expression,
    pub group: StructuralGroup,
}

impl Ode2Problem {
    /// `f` is an expression on [`ode2_chart`] in `x, y, p` and derivatives of
    /// the opaque `f`; passing the bare symbol `f` gives the symbolic problem.
    pub fn new(f: Expression) -> Result<Self, ProblemError> {
        let chart = ode2_chart();
        chart.check(&f).map_err(|_| {
            ProblemError::Domain("f must be an expression in x, y, p".into())
        })?;
        ensure_vars(&chart, &f, &["x", "y", "p"], "f")?;
        let a3 = chart.sym("a3")?;
        let fp = f.partial(&chart, chart.var("p")?)?;
        let group = StructuralGroup {
            a1: a3.clone(),
            a2: -(Expression::ratio(1, 2) * &fp * &a3),
            a3,
        };
        Ok(Ode2Problem { chart, f, group })
    }

    /// The equation with `f` left opaque.
    pub fn symbolic() -> Self {
        let f = ode2_chart().fun("f", &[]).expect("declared");
        Self::new(f).expect("symbolic f is in the domain")
    }

    /// `D_x = ∂_x + p ∂_y + f ∂_p`.
    pub fn total_derivative(&self) -> Derivation {
        let p = self.chart.sym("p").expect("declared");
        Derivation::from_pairs(
            &self.chart,
            "D_x",
            &[("x", Expression::one()), ("y", p), ("p", self.f.clone())],
        )
        .expect("fixed chart")
    }

    fn d(&self, name: &str) -> DifferentialForm {
        DifferentialForm::differential(&self.chart, name).expect("declared")
    }

    /// `ω_f = (dp − f dx, dy − p dx, dx)`.
    pub fn omega_f(&self) -> [DifferentialForm; 3] {
        let p = self.chart.sym("p").expect("declared");
        let dx = self.d("x");
        [
            self.d("p").sub(&dx.scale(&self.f)).expect("same chart"),
            self.d("y").sub(&dx.scale(&p)).expect("same chart"),
            dx,
        ]
    }

    /// `g(a) ω_f` with the reduced group.
    pub fn lifted_coframe(&self) -> [DifferentialForm; 3] {
        let [w1, w2, w3] = self.omega_f();
        let g = &self.group;
        [
            w1.scale(&g.a1).add(&w2.scale(&g.a2)).expect("same chart"),
            w2.scale(&g.a3),
            w3,
        ]
    }
}

/// Outcome of the equivalence run.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub problem: Ode2Problem,
    /// Structure equations of the lifted coframe, `π = da3/a3`.
    pub lifted: StructureEquations,
    pub absorption: AbsorptionSolution,
    /// `θ^1 .. θ^4`.
    pub coframe: Coframe,
    /// `dθ^i = Σ_{j<k} c^i_{jk} θ^j ∧ θ^k`, 0-based keys.
    pub structure: Vec<BTreeMap<(usize, usize), Expression>>,
    pub invariants: [Expression; 3],
    /// `X_1 .. X_4`.
    pub derivations: Vec<Derivation>,
    /// Cartan's test on the completed coframe.
    pub involution: InvolutionReport,
}

impl EquivalenceReport {
    pub fn chart(&self) -> &Chart {
        &self.problem.chart
    }

    pub fn theta(&self) -> &[DifferentialForm] {
        self.coframe.forms()
    }

    /// `dθ^i` as a 2-form on the frame basis.
    pub fn structure_form(&self, i: usize) -> DifferentialForm {
        DifferentialForm::from_terms(
            2,
            4,
            self.structure[i].iter().map(|(&(j, k), c)| (vec![j, k], c.clone())),
        )
        .expect("valid indices")
    }

    pub fn frame_names() -> Vec<String> {
        (1..=4).map(|i| format!("θ{i}")).collect()
    }
}

/// Runs the method on `y'' = f`.
///
/// The lifted coframe `θ = g(a) ω_f` uses the reduced group
/// `a1 = a3, a2 = −½ f_p a3`. Its structure equations with `π = da3/a3` are
/// absorbed; the absorption fixes every `λ`, which completes the coframe
/// with `θ^4 = π − λ_i θ^i`. The invariants are read off the structure
/// equations of `θ^1 .. θ^4`.
pub fn run_equivalence_ode2(f: &Expression) -> Result<EquivalenceReport, ProblemError> {
    run(Ode2Problem::new(f.clone())?)
}

fn run(problem: Ode2Problem) -> Result<EquivalenceReport, ProblemError> {
    let chart = &problem.chart;
    let a3 = chart.sym("a3")?;
    let theta = problem.lifted_coframe();
    let pi = problem.d("a3").scale(&a3.inv()?);
    let lifted = coframe_structure(chart, &theta, std::slice::from_ref(&pi))?;
    let absorption = absorb_torsion(&lifted);
    if !absorption.free.is_empty() {
        return Err(ProblemError::Domain(
            "absorption left free unknowns; the reduction does not apply".into(),
        ));
    }
    let mut theta4 = pi;
    for (i, t) in theta.iter().enumerate() {
        let l = &absorption.particular[i];
        if !l.is_zero() {
            theta4 = theta4.sub(&t.scale(l))?;
        }
    }
    let [t1, t2, t3] = theta;
    let coframe = Coframe::new(vec![t1, t2, t3, theta4])?;
    let mut structure = Vec::with_capacity(4);
    for t in coframe.forms() {
        structure.push(coframe.express(&t.d(chart)?)?);
    }
    let coeff = |i: usize, j: usize, k: usize| -> Expression {
        structure[i].get(&(j, k)).cloned().unwrap_or_default()
    };
    let invariants = [coeff(0, 1, 2), coeff(3, 0, 1), coeff(3, 1, 2)];
    let derivations = coframe.dual_frame();
    let framed: Vec<DifferentialForm> = (0..4)
        .map(|i| {
            DifferentialForm::from_terms(
                2,
                4,
                structure[i].iter().map(|(&(j, k), c)| (vec![j, k], c.clone())),
            )
            .expect("valid indices")
        })
        .collect();
    let completed = StructureEquations::decompose(&framed, 0, 4, 0)?;
    let involution = cartan_characters(&completed);
    Ok(EquivalenceReport {
        problem,
        lifted,
        absorption,
        coframe,
        structure,
        invariants,
        derivations,
        involution,
    })
}

/// Relations among the invariants and their frame derivatives, derived from
/// `d(dθ^i) = 0` without going back to coordinates.
#[derive(Clone, Debug)]
pub struct Syzygies {
    /// Chart of the formal symbols `I1, I2, I3` and `X{l}I{m}`.
    pub chart: Chart,
    /// Reduced echelon basis of the relations, each asserted to vanish.
    pub relations: Vec<Expression>,
    /// Each relation expanded in the coordinates of the report.
    pub expanded: Vec<Expression>,
    symbols: Vec<Var>,
}

impl Syzygies {
    /// Whether `rel` (on [`Syzygies::chart`]) lies in the span of the
    /// relations, with coefficients rational functions of the invariants.
    pub fn contains(&self, rel: &Expression) -> bool {
        let mut rows: Vec<Vec<Expression>> = self.relations.iter().map(|r| self.row(r)).collect();
        let base = if rows.is_empty() {
            0
        } else {
            linalg::rank(&Matrix::from_rows(rows.clone()).expect("rectangular"))
        };
        rows.push(self.row(rel));
        linalg::rank(&Matrix::from_rows(rows).expect("rectangular")) == base
    }

    fn row(&self, rel: &Expression) -> Vec<Expression> {
        linear_row(rel, &self.symbols)
    }

    /// Symbol `X{l}I{m}` (1-based).
    pub fn symbol(&self, l: usize, m: usize) -> Expression {
        self.chart.sym(&format!("X{l}I{m}")).expect("declared")
    }

    /// Symbol `I{m}` (1-based).
    pub fn invariant(&self, m: usize) -> Expression {
        self.chart.sym(&format!("I{m}")).expect("declared")
    }
}

/// `[∂rel/∂s for s in symbols] ++ [rel − Σ s ∂rel/∂s]`; `rel` is affine in
/// the symbols.
fn linear_row(rel: &Expression, symbols: &[Var]) -> Vec<Expression> {
    let mut row: Vec<Expression> = symbols.iter().map(|&s| rel.diff_var(s)).collect();
    let mut rest = rel.clone();
    for (&s, c) in symbols.iter().zip(&row) {
        if !c.is_zero() {
            rest = rest - c * &Expression::var(s);
        }
    }
    row.push(rest);
    row
}

pub fn syzygies_ode2(rep: &EquivalenceReport) -> Result<Syzygies, ProblemError> {
    let mut names: Vec<String> = (1..=3).map(|m| format!("I{m}")).collect();
    for m in 1..=3 {
        for l in 1..=4 {
            names.push(format!("X{l}I{m}"));
        }
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let formal = Chart::new(&refs, &[])?;
    let inv_sym: Vec<Expression> = (1..=3).map(|m| formal.sym(&format!("I{m}"))).collect::<Result<_, _>>()?;
    let x_sym = |l: usize, m: usize| formal.sym(&format!("X{}I{}", l + 1, m + 1)).expect("declared");

    // Structure functions in terms of the formal invariants.
    let to_formal = |c: &Expression| -> Result<Expression, ProblemError> {
        if c.is_constant() {
            return Ok(c.clone());
        }
        for (m, inv) in rep.invariants.iter().enumerate() {
            if inv.is_constant() {
                continue;
            }
            let k = c.checked_div(inv)?;
            if let Some(k) = k.constant_value() {
                return Ok(inv_sym[m].scale(&k));
            }
        }
        Err(ProblemError::Domain(
            "structure function is not a multiple of a fundamental invariant".into(),
        ))
    };
    let mut s_forms = Vec::with_capacity(4);
    let mut coeffs = Vec::with_capacity(4);
    for eq in &rep.structure {
        let mut terms = Vec::new();
        for (&(j, k), c) in eq {
            terms.push(((j, k), to_formal(c)?));
        }
        s_forms.push(DifferentialForm::from_terms(
            2,
            4,
            terms.iter().map(|((j, k), c)| (vec![*j, *k], c.clone())),
        )?);
        coeffs.push(terms);
    }
    let basis = |i: usize| DifferentialForm::basis(i, 4);

    let mut raw = Vec::new();
    for terms in &coeffs {
        let mut omega = DifferentialForm::zero(3, 4);
        for ((j, k), c) in terms {
            // dc = Σ_l Σ_m ∂c/∂I_m X_l(I_m) θ^l
            let mut dc = DifferentialForm::zero(1, 4);
            for m in 0..3 {
                let dcm = c.diff_var(formal.var(&format!("I{}", m + 1))?);
                if dcm.is_zero() {
                    continue;
                }
                for l in 0..4 {
                    dc = dc.add(&basis(l).scale(&(&dcm * &x_sym(l, m))))?;
                }
            }
            let tjk = basis(*j).wedge(&basis(*k))?;
            omega = omega.add(&dc.wedge(&tjk)?)?;
            let inner = s_forms[*j].wedge(&basis(*k))?.sub(&basis(*j).wedge(&s_forms[*k])?)?;
            omega = omega.add(&inner.scale(c))?;
        }
        raw.extend(omega.terms().map(|(_, c)| c.clone()));
    }

    let mut symbols = Vec::new();
    for m in 0..3 {
        for l in 0..4 {
            symbols.push(formal.var(&format!("X{}I{}", l + 1, m + 1))?);
        }
    }
    let relations = if raw.is_empty() {
        Vec::new()
    } else {
        let rows: Vec<Vec<Expression>> = raw.iter().map(|r| linear_row(r, &symbols)).collect();
        let ech = linalg::rref(&Matrix::from_rows(rows).expect("rectangular"));
        (0..ech.rank())
            .map(|r| {
                let row = ech.matrix.row(r);
                let mut e = row[symbols.len()].clone();
                for (s, c) in symbols.iter().zip(row) {
                    if !c.is_zero() {
                        e = e + c * &Expression::var(*s);
                    }
                }
                e
            })
            .filter(|e| !e.is_zero())
            .collect()
    };

    // Back to coordinates.
    let chart = rep.chart();
    let mut map: HashMap<Var, Expression> = HashMap::new();
    for m in 0..3 {
        map.insert(formal.var(&format!("I{}", m + 1))?, rep.invariants[m].clone());
        for l in 0..4 {
            let v = rep.derivations[l].apply(chart, &rep.invariants[m])?;
            map.insert(formal.var(&format!("X{}I{}", l + 1, m + 1))?, v);
        }
    }
    let expanded = relations
        .iter()
        .map(|r| r.substitute_vars(&map))
        .collect::<Result<_, _>>()?;
    Ok(Syzygies {
        chart: formal,
        relations,
        expanded,
        symbols,
    })
}

/// Flatness of `y'' = f`: `f_ppp = 0` and
/// `f_xp + f_pp f − 2 f_y − ½ f_p² + p f_yp = 0`.
pub fn check_flat_ode2(f: &Expression) -> Result<FlatnessReport, ProblemError> {
    let problem = Ode2Problem::new(f.clone())?;
    let chart = &problem.chart;
    let d = |e: &Expression, v: &str| e.partial(chart, chart.var(v).expect("declared"));
    let p = chart.sym("p")?;
    let fp = d(f, "p")?;
    let fpp = d(&fp, "p")?;
    let fppp = d(&fpp, "p")?;
    let r2 = d(&fp, "x")? + &fpp * f - Expression::int(2) * d(f, "y")? - Expression::ratio(1, 2) * fp.pow(2)
        + &p * d(&fp, "y")?;
    Ok(FlatnessReport::new(vec![
        Residual {
            name: "f_ppp".into(),
            value: fppp,
        },
        Residual {
            name: "f_xp + f_pp*f - 2*f_y - 1/2*f_p^2 + p*f_yp".into(),
            value: r2,
        },
    ]))
}

/// The `f` with `(x + C, η)` mapping solutions of `y'' = f` to solutions of
/// `ȳ'' = f̄`:
/// `f = (f̄(x + C, η, η_x + p η_y) − η_xx − 2p η_xy − p² η_yy) / η_y`.
///
/// All three inputs live on [`ode2_chart`]; `target` uses `x, y, p` for the
/// barred coordinates.
pub fn pullback_ode2(eta: &Expression, c: &Expression, target: &Expression) -> Result<Expression, ProblemError> {
    let chart = ode2_chart();
    for (e, what) in [(eta, "eta"), (c, "C"), (target, "target")] {
        chart
            .check(e)
            .map_err(|_| ProblemError::Domain(format!("{what} is not on the chart (x, y, p)")))?;
        ensure_concrete(&chart, e, what)?;
    }
    ensure_vars(&chart, eta, &["x", "y"], "eta")?;
    ensure_vars(&chart, c, &[], "C")?;
    ensure_vars(&chart, target, &["x", "y", "p"], "target")?;

    let (x, y, p) = (chart.var("x")?, chart.var("y")?, chart.var("p")?);
    let pe = Expression::var(p);
    let d = |e: &Expression, v: Var| e.partial(&chart, v);
    let eta_x = d(eta, x)?;
    let eta_y = d(eta, y)?;
    if eta_y.is_zero() {
        return Err(ProblemError::VanishingJacobian("eta_y".into()));
    }
    let map = HashMap::from([
        (x, Expression::var(x) + c),
        (y, eta.clone()),
        (p, &eta_x + &(&pe * &eta_y)),
    ]);
    let moved = target.substitute_vars(&map)?;
    let num = moved - d(&eta_x, x)? - Expression::int(2) * &pe * d(&eta_x, y)? - pe.pow(2) * d(&eta_y, y)?;
    Ok(num.checked_div(&eta_y)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PainleveVerdict {
    Equivalent,
    /// `I2` or `I3` does not vanish.
    NotInClass { invariant: String, value: Expression },
    /// A compatibility condition fails; `residual` is its value.
    NotEquivalent { condition: String, residual: Expression },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PainleveAnswer {
    pub verdict: PainleveVerdict,
    pub eta: Option<Expression>,
    pub c: Option<Expression>,
}

impl PainleveAnswer {
    pub fn is_equivalent(&self) -> bool {
        self.verdict == PainleveVerdict::Equivalent
    }
}

/// Recovers `(x̄, ȳ) = (x + C, η)` taking `y'' = f` to `ȳ'' = 6ȳ² + x̄`.
///
/// From the invariants: `η = −I1/12` and
/// `C = −I1²/24 − X3²(I1)/12 − x`. The map exists iff `I2 = I3 = 0`, `η`
/// depends on `x, y` only and `X_i(C) = 0`. The `i`-th condition is
/// reported as `−12 X_i(C)`, e.g. `I1 X3(I1) + X3³(I1) + 12` for `i = 3`.
pub fn painleve_map(f: &Expression) -> Result<PainleveAnswer, ProblemError> {
    let rep = run_equivalence_ode2(f)?;
    let chart = rep.chart();
    for (m, name) in [(1, "I2"), (2, "I3")] {
        if !rep.invariants[m].is_zero() {
            return Ok(PainleveAnswer {
                verdict: PainleveVerdict::NotInClass {
                    invariant: name.into(),
                    value: rep.invariants[m].clone(),
                },
                eta: None,
                c: None,
            });
        }
    }
    let i1 = &rep.invariants[0];
    let eta = i1.scale(&num_rational::BigRational::new((-1).into(), 12.into()));
    let x3 = &rep.derivations[2];
    let c = Expression::ratio(-1, 24) * i1.pow(2) - Expression::ratio(1, 12) * x3.apply_n(chart, i1, 2)?
        - chart.sym("x")?;
    let not_equivalent = |condition: String, residual: Expression| PainleveAnswer {
        verdict: PainleveVerdict::NotEquivalent { condition, residual },
        eta: Some(eta.clone()),
        c: Some(c.clone()),
    };
    for (i, x) in rep.derivations.iter().enumerate() {
        let r = Expression::int(-12) * x.apply(chart, &c)?;
        if !r.is_zero() {
            return Ok(not_equivalent(format!("X{}(C) = 0", i + 1), r));
        }
    }
    for v in ["p", "a3"] {
        let dv = eta.partial(chart, chart.var(v)?)?;
        if !dv.is_zero() {
            return Ok(not_equivalent(format!("d(eta)/d{v} = 0"), dv));
        }
    }
    let eta_y = eta.partial(chart, chart.var("y")?)?;
    if eta_y.is_zero() {
        return Ok(not_equivalent("eta_y != 0".into(), eta_y));
    }
    Ok(PainleveAnswer {
        verdict: PainleveVerdict::Equivalent,
        eta: Some(eta),
        c: Some(c),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(chart: &Chart, terms: &[(i64, &[(&str, u32)])]) -> Expression {
        terms
            .iter()
            .map(|(k, vars)| {
                vars.iter()
                    .fold(Expression::int(*k), |acc, (n, e)| acc * chart.sym(n).unwrap().pow(*e))
            })
            .sum()
    }

    #[test]
    fn painleve_itself() {
        let c = ode2_chart();
        let f = parse(&c, &[(6, &[("y", 2)]), (1, &[("x", 1)])]);
        let rep = run_equivalence_ode2(&f).unwrap();
        assert_eq!(rep.invariants[0], Expression::int(-12) * c.sym("y").unwrap());
        assert!(rep.invariants[1].is_zero() && rep.invariants[2].is_zero());
        let ans = painleve_map(&f).unwrap();
        assert!(ans.is_equivalent());
        assert_eq!(ans.eta, Some(c.sym("y").unwrap()));
        assert_eq!(ans.c, Some(Expression::zero()));
    }

    #[test]
    fn flat_equation_is_not_painleve() {
        let ans = painleve_map(&Expression::zero()).unwrap();
        assert_eq!(
            ans.verdict,
            PainleveVerdict::NotEquivalent {
                condition: "X3(C) = 0".into(),
                residual: Expression::int(12)
            }
        );
    }

    #[test]
    fn flatness_examples() {
        let c = ode2_chart();
        assert!(check_flat_ode2(&Expression::zero()).unwrap().flat);
        let y = c.sym("y").unwrap();
        let f = (-c.sym("p").unwrap().pow(2)).checked_div(&y).unwrap();
        assert!(check_flat_ode2(&f).unwrap().flat);
        let f = parse(&c, &[(6, &[("y", 2)]), (1, &[("x", 1)])]);
        let rep = check_flat_ode2(&f).unwrap();
        assert!(!rep.flat);
        assert_eq!(rep.residuals[1].value, Expression::int(-24) * &y);
        let rep = check_flat_ode2(&c.sym("p").unwrap().pow(3)).unwrap();
        assert_eq!(rep.residuals[0].value, Expression::int(6));
    }

    #[test]
    fn pullback_examples() {
        let c = ode2_chart();
        let y = c.sym("y").unwrap();
        let zero = Expression::zero();
        assert!(pullback_ode2(&y, &zero, &zero).unwrap().is_zero());
        let f = pullback_ode2(&y.pow(2), &zero, &zero).unwrap();
        assert_eq!(f, (-c.sym("p").unwrap().pow(2)).checked_div(&y).unwrap());
        let target = parse(&c, &[(6, &[("y", 2)]), (1, &[("x", 1)])]);
        let f = pullback_ode2(&y, &Expression::int(5), &target).unwrap();
        assert_eq!(f, target + Expression::int(5));
        assert_eq!(
            pullback_ode2(&c.sym("x").unwrap(), &zero, &zero).unwrap_err(),
            ProblemError::VanishingJacobian("eta_y".into())
        );
    }

    #[test]
    fn domain_errors() {
        let c = ode2_chart();
        assert!(matches!(
            run_equivalence_ode2(&c.sym("a3").unwrap()),
            Err(ProblemError::Domain(_))
        ));
    }
}
