//! Command-line front end: parse expressions, run a problem, render the answer.

pub mod parse;
pub mod report;

use cartan::expr::{latex_var, Chart, Expression};
use cartan::pfaffian::{contact_system, prolongation_tower, PfaffianError};
use cartan::problems::{
    check_flat_ode2, check_flat_ode_system, check_flat_pde_system, contact_prolongation_ode3, ode2_chart,
    ode_system_chart, painleve_map, pde_system_chart, pullback_ode2, run_equivalence_ode2, swell_chart,
    syzygies_ode2, EquivalenceReport, FlatnessReport, PainleveVerdict, ProblemError,
};
use cartan::exterior::DifferentialForm;
use clap::{Parser, Subcommand};
use thiserror::Error;

pub use parse::{parse_expression, ParseError};
pub use report::{Format, Line, Named, Report};

#[derive(Debug, Parser)]
#[command(name = "cartan", version, about = "Cartan's equivalence method for differential equations")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether an equation is equivalent to the flat one.
    CheckFlat {
        #[command(subcommand)]
        problem: FlatProblem,
    },
    /// Fundamental invariants I1, I2, I3 of y'' = f(x, y, p).
    Invariants {
        /// Right-hand side; the default `f` keeps it symbolic.
        #[arg(long, default_value = "f", allow_hyphen_values = true)]
        f: String,
    },
    /// Relations among the invariants and their frame derivatives.
    Syzygies {
        #[arg(long, default_value = "f", allow_hyphen_values = true)]
        f: String,
    },
    /// Structure equations: of the completed coframe of y'' = f, or of a
    /// contact system with its prolongation tower.
    Structure {
        #[arg(long, allow_hyphen_values = true, conflicts_with = "contact")]
        f: Option<String>,
        /// `n,m,q`: contact system of q-jets of maps R^n -> R^m.
        #[arg(long, value_parser = parse_triple)]
        contact: Option<(usize, usize, usize)>,
        /// Maximal number of prolongations for --contact.
        #[arg(long, default_value_t = 2)]
        max_prolong: usize,
    },
    /// Map y'' = f to Painlevé I, y'' = 6y^2 + x, if possible.
    Painleve {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
    /// Pull y'' = target back along (x, y) -> (x + C, eta(x, y)).
    Pullback {
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        #[arg(long = "C", allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        target: String,
    },
    /// Prolong a contact map to third-order jets and count monomials.
    SwellDemo {
        #[arg(long, default_value = "xi", allow_hyphen_values = true)]
        xi: String,
        #[arg(long, default_value = "eta", allow_hyphen_values = true)]
        eta: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum FlatProblem {
    /// y'' = f(x, y, p).
    Ode2 {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
    /// x1'' = F1, x2'' = F2 on (t, x1, x2, dx1, dx2).
    Odesys {
        #[arg(long = "F1", allow_hyphen_values = true)]
        f1: String,
        #[arg(long = "F2", allow_hyphen_values = true)]
        f2: String,
    },
    /// u_ab = f_ab on (x1, x2, u, u1, u2).
    Pdesys {
        #[arg(long, allow_hyphen_values = true)]
        f11: String,
        #[arg(long, allow_hyphen_values = true)]
        f12: String,
        #[arg(long, allow_hyphen_values = true)]
        f22: String,
    },
}

fn parse_triple(s: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [n, m, q] => Ok((n, m, q)),
        _ => Err("expected three comma-separated integers n,m,q".into()),
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("--{arg}: {err}")]
    Parse { arg: &'static str, err: ParseError },
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    /// 2 for malformed input, 3 for input outside the problem's domain.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse {
                err: ParseError::DivisionByZero { .. },
                ..
            }
            | CliError::Domain(_) => 3,
            CliError::Parse { .. } => 2,
        }
    }
}

impl From<ProblemError> for CliError {
    fn from(e: ProblemError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<PfaffianError> for CliError {
    fn from(e: PfaffianError) -> Self {
        CliError::Domain(e.to_string())
    }
}

fn arg(text: &str, chart: &Chart, name: &'static str) -> Result<Expression, CliError> {
    parse_expression(text, chart).map_err(|err| CliError::Parse { arg: name, err })
}

/// Runs a command and renders its report.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    Ok(execute(&cli.command)?.render(cli.format))
}

/// Runs a command.
pub fn execute(cmd: &Command) -> Result<Report, CliError> {
    match cmd {
        Command::CheckFlat { problem } => check_flat(problem),
        Command::Invariants { f } => {
            let rep = equivalence(f)?;
            let mut out = Report::new(rep.chart().clone(), "ode2");
            out.invariants = Some(rep.invariants.clone());
            Ok(out)
        }
        Command::Syzygies { f } => {
            let rep = equivalence(f)?;
            let syz = syzygies_ode2(&rep)?;
            let mut out = Report::new(rep.chart().clone(), "ode2");
            out.syzygies = Some((syz.chart.clone(), syz.relations.clone()));
            if let Some(k) = syz.expanded.iter().position(|e| !e.is_zero()) {
                out.notes.push(format!("relation {} does not vanish in coordinates", k + 1));
            }
            Ok(out)
        }
        Command::Structure { f, contact, max_prolong } => match (f, contact) {
            (_, Some((n, m, q))) => contact_structure(*n, *m, *q, *max_prolong),
            (f, None) => ode2_structure(f.as_deref().unwrap_or("f")),
        },
        Command::Painleve { f } => painleve(f),
        Command::Pullback { eta, c, target } => {
            let chart = ode2_chart();
            let eta = arg(eta, &chart, "eta")?;
            let c = arg(c, &chart, "C")?;
            let target = arg(target, &chart, "target")?;
            let f = pullback_ode2(&eta, &c, &target)?;
            let mut out = Report::new(chart, "ode2");
            out.eta = Some(eta);
            out.c = Some(c);
            out.f = Some(f);
            Ok(out)
        }
        Command::SwellDemo { xi, eta } => {
            let chart = swell_chart();
            let xi = arg(xi, &chart, "xi")?;
            let eta = arg(eta, &chart, "eta")?;
            let pro = contact_prolongation_ode3(&xi, &eta)?;
            let mut out = Report::new(chart, "ode3 contact prolongation");
            out.swell = Some(pro.monomials);
            Ok(out)
        }
    }
}

fn flatness(chart: Chart, problem: &str, rep: FlatnessReport) -> Report {
    let mut out = Report::new(chart, problem);
    out.flat = Some(rep.flat);
    out.residuals = Some(
        rep.residuals
            .into_iter()
            .map(|r| Named {
                name: r.name,
                value: r.value,
            })
            .collect(),
    );
    out
}

fn check_flat(problem: &FlatProblem) -> Result<Report, CliError> {
    match problem {
        FlatProblem::Ode2 { f } => {
            let chart = ode2_chart();
            let f = arg(f, &chart, "f")?;
            Ok(flatness(chart, "ode2", check_flat_ode2(&f)?))
        }
        FlatProblem::Odesys { f1, f2 } => {
            let chart = ode_system_chart();
            let f1 = arg(f1, &chart, "F1")?;
            let f2 = arg(f2, &chart, "F2")?;
            Ok(flatness(chart, "odesys", check_flat_ode_system(&f1, &f2)?))
        }
        FlatProblem::Pdesys { f11, f12, f22 } => {
            let chart = pde_system_chart();
            let f11 = arg(f11, &chart, "f11")?;
            let f12 = arg(f12, &chart, "f12")?;
            let f22 = arg(f22, &chart, "f22")?;
            Ok(flatness(chart, "pdesys", check_flat_pde_system(&f11, &f12, &f22)?))
        }
    }
}

fn equivalence(f: &str) -> Result<EquivalenceReport, CliError> {
    let f = arg(f, &ode2_chart(), "f")?;
    Ok(run_equivalence_ode2(&f)?)
}

fn painleve(f: &str) -> Result<Report, CliError> {
    let chart = ode2_chart();
    let ans = painleve_map(&arg(f, &chart, "f")?)?;
    let mut out = Report::new(chart, "ode2");
    out.equivalent = Some(ans.is_equivalent());
    match &ans.verdict {
        PainleveVerdict::Equivalent => {}
        PainleveVerdict::NotInClass { invariant, value } => {
            out.residuals = Some(vec![Named {
                name: invariant.clone(),
                value: value.clone(),
            }]);
            out.notes.push(format!("{invariant} does not vanish"));
        }
        PainleveVerdict::NotEquivalent { condition, residual } => {
            out.residuals = Some(vec![Named {
                name: condition.clone(),
                value: residual.clone(),
            }]);
            out.notes.push(format!("{condition} fails"));
        }
    }
    out.eta = ans.eta;
    out.c = ans.c;
    Ok(out)
}

fn coordinate_basis(chart: &Chart) -> (Vec<String>, Vec<String>) {
    (0..chart.dim())
        .map(|i| {
            let v = chart.basis_var(i);
            (format!("d{}", chart.var_name(v)), format!("d{}", latex_var(chart, v)))
        })
        .unzip()
}

fn ode2_structure(f: &str) -> Result<Report, CliError> {
    let rep = equivalence(f)?;
    let chart = rep.chart().clone();
    let (dx, dx_tex) = coordinate_basis(&chart);
    let frame = EquivalenceReport::frame_names();
    let frame_tex: Vec<String> = (1..=4).map(|i| format!("\\theta^{{{i}}}")).collect();
    let mut lines = Vec::new();
    for (i, th) in rep.theta().iter().enumerate() {
        lines.push(Line {
            text: format!("{} = {}", frame[i], th.display(&chart, &dx)),
            latex: format!("{} &= {}", frame_tex[i], report::latex_form(&chart, th, &dx_tex)),
        });
    }
    for i in 0..4 {
        let form = rep.structure_form(i);
        lines.push(Line {
            text: format!("d{} = {}", frame[i], form.display(&chart, &frame)),
            latex: format!("d{} &= {}", frame_tex[i], report::latex_form(&chart, &form, &frame_tex)),
        });
    }
    let inv = &rep.involution;
    lines.push(Line {
        text: format!("characters {:?}, involutive {}", inv.characters, inv.involutive),
        latex: format!("\\text{{characters}} &: {:?},\\ \\text{{involutive}}: \\text{{{}}}", inv.characters, inv.involutive),
    });
    let mut out = Report::new(chart, "ode2");
    out.structure = Some(lines);
    Ok(out)
}

fn contact_structure(n: usize, m: usize, q: usize, max_prolong: usize) -> Result<Report, CliError> {
    if n == 0 || m == 0 || q == 0 {
        return Err(CliError::Domain("--contact needs n, m, q >= 1".into()));
    }
    let sys = contact_system(n, m, q)?;
    let chart = sys.chart().clone();
    let eq = sys.structure_equations()?;
    let (dx, dx_tex) = coordinate_basis(&chart);
    let (a, n, r) = (eq.a(), eq.n(), eq.r());
    let mut lines = Vec::new();
    let families = [("ω", "\\omega", sys.omega()), ("θ", "\\theta", sys.theta()), ("π", "\\pi", sys.pi())];
    for (name, tex, forms) in families {
        for (k, w) in forms.iter().enumerate() {
            lines.push(Line {
                text: format!("{name}{} = {}", k + 1, w.display(&chart, &dx)),
                latex: format!("{tex}^{{{}}} &= {}", k + 1, report::latex_form(&chart, w, &dx_tex)),
            });
        }
    }
    // dω on the basis π^1..π^r, θ^1..θ^n.
    let basis: Vec<String> = (1..=r).map(|k| format!("π{k}")).chain((1..=n).map(|k| format!("θ{k}"))).collect();
    let basis_tex: Vec<String> = (1..=r)
        .map(|k| format!("\\pi^{{{k}}}"))
        .chain((1..=n).map(|k| format!("\\theta^{{{k}}}")))
        .collect();
    for alpha in 0..a {
        let mut terms = Vec::new();
        for rho in 0..r {
            for i in 0..n {
                terms.push((vec![rho, r + i], eq.tableau(alpha, rho, i).clone()));
            }
        }
        for j in 0..n {
            for k in j + 1..n {
                terms.push((vec![r + j, r + k], eq.torsion(alpha, j, k).clone()));
            }
        }
        let form = DifferentialForm::from_terms(2, r + n, terms).map_err(|e| CliError::Domain(e.to_string()))?;
        lines.push(Line {
            text: format!("dω{} ≡ {} mod I", alpha + 1, form.display(&chart, &basis)),
            latex: format!(
                "d\\omega^{{{}}} &\\equiv {} \\mod I",
                alpha + 1,
                report::latex_form(&chart, &form, &basis_tex)
            ),
        });
    }
    for (k, step) in prolongation_tower(&sys, max_prolong)?.iter().enumerate() {
        let inv = &step.involution;
        let text = format!(
            "step {k}: dim {}, characters {:?}, prolonged dim {}, Cartan bound {}, essential torsion {}, involutive {}",
            step.dim,
            inv.characters,
            inv.prolonged_dim,
            inv.cartan_bound(),
            step.essential_torsion.len(),
            inv.involutive
        );
        lines.push(Line {
            latex: format!("&\\text{{{text}}}"),
            text,
        });
    }
    let mut out = Report::new(chart, format!("contact {n},{m},{q}"));
    out.structure = Some(lines);
    Ok(out)
}
