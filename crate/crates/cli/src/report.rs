//! The result of one command and its three renderings.

use cartan::exterior::DifferentialForm;
use cartan::expr::{latex, Chart, Expression};
use num_traits::Signed;
use serde::Serialize;

/// Output format selected by `--format`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Latex,
}

/// A line with separate plain and LaTeX spellings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub text: String,
    pub latex: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Named {
    pub name: String,
    pub value: Expression,
}

/// Everything a command can report. Absent sections are omitted.
#[derive(Clone, Debug)]
pub struct Report {
    pub chart: Chart,
    pub problem: String,
    pub flat: Option<bool>,
    pub equivalent: Option<bool>,
    pub residuals: Option<Vec<Named>>,
    pub invariants: Option<[Expression; 3]>,
    pub eta: Option<Expression>,
    pub c: Option<Expression>,
    pub f: Option<Expression>,
    /// Relations on their own chart, each asserted to vanish.
    pub syzygies: Option<(Chart, Vec<Expression>)>,
    pub structure: Option<Vec<Line>>,
    /// Numerator monomial counts of `p̄, q̄, r̄`.
    pub swell: Option<[usize; 3]>,
    /// Free-form remarks, shown in text and LaTeX only.
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(chart: Chart, problem: impl Into<String>) -> Self {
        Report {
            chart,
            problem: problem.into(),
            flat: None,
            equivalent: None,
            residuals: None,
            invariants: None,
            eta: None,
            c: None,
            f: None,
            syzygies: None,
            structure: None,
            swell: None,
            notes: Vec::new(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Json => self.json(),
            Format::Latex => self.latex(),
        }
    }

    fn show(&self, e: &Expression) -> String {
        self.chart.display(e).to_string()
    }

    fn text(&self) -> String {
        let mut out = vec![format!("problem: {}", self.problem)];
        if let Some(b) = self.flat {
            out.push(format!("flat: {b}"));
        }
        if let Some(b) = self.equivalent {
            out.push(format!("equivalent: {b}"));
        }
        if let Some(rs) = &self.residuals {
            out.push("residuals:".into());
            out.extend(rs.iter().map(|r| format!("  {}: {}", r.name, self.show(&r.value))));
        }
        if let Some(inv) = &self.invariants {
            out.push("invariants:".into());
            out.extend(inv.iter().enumerate().map(|(m, e)| format!("  I{} = {}", m + 1, self.show(e))));
        }
        if let Some(e) = &self.eta {
            out.push(format!("eta: {}", self.show(e)));
        }
        if let Some(e) = &self.c {
            out.push(format!("C: {}", self.show(e)));
        }
        if let Some(e) = &self.f {
            out.push(format!("f: {}", self.show(e)));
        }
        if let Some((chart, rels)) = &self.syzygies {
            out.push("syzygies:".into());
            out.extend(rels.iter().map(|r| format!("  {} = 0", chart.display(r))));
        }
        if let Some(lines) = &self.structure {
            out.push("structure:".into());
            out.extend(lines.iter().map(|l| format!("  {}", l.text)));
        }
        if let Some([p, q, r]) = self.swell {
            out.push(format!("swell: numerator monomials pbar {p}, qbar {q}, rbar {r}"));
        }
        out.extend(self.notes.iter().map(|n| format!("note: {n}")));
        out.join("\n") + "\n"
    }

    fn json(&self) -> String {
        let show = |e: &Expression| self.show(e);
        let doc = Json {
            problem: &self.problem,
            flat: self.flat,
            equivalent: self.equivalent,
            residuals: self.residuals.as_ref().map(|rs| rs.iter().map(|r| show(&r.value)).collect()),
            invariants: self.invariants.as_ref().map(|[a, b, c]| Invariants {
                i1: show(a),
                i2: show(b),
                i3: show(c),
            }),
            eta: self.eta.as_ref().map(show),
            c: self.c.as_ref().map(show),
            f: self.f.as_ref().map(show),
            syzygies: self
                .syzygies
                .as_ref()
                .map(|(chart, rels)| rels.iter().map(|r| chart.display(r).to_string()).collect()),
            structure: self.structure.as_ref().map(|ls| ls.iter().map(|l| l.text.clone()).collect()),
            swell: self.swell.map(|[_, _, r]| Swell { monomials_rbar: r }),
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes") + "\n"
    }

    fn latex(&self) -> String {
        let tex = |e: &Expression| latex(&self.chart, e);
        let mut rows = vec![format!("\\text{{problem}} &: \\text{{{}}}", escape(&self.problem))];
        if let Some(b) = self.flat {
            rows.push(format!("\\text{{flat}} &: \\text{{{b}}}"));
        }
        if let Some(b) = self.equivalent {
            rows.push(format!("\\text{{equivalent}} &: \\text{{{b}}}"));
        }
        if let Some(rs) = &self.residuals {
            rows.extend(rs.iter().map(|r| format!("\\text{{{}}} &= {}", escape(&r.name), tex(&r.value))));
        }
        if let Some(inv) = &self.invariants {
            rows.extend(inv.iter().enumerate().map(|(m, e)| format!("I_{{{}}} &= {}", m + 1, tex(e))));
        }
        if let Some(e) = &self.eta {
            rows.push(format!("\\eta &= {}", tex(e)));
        }
        if let Some(e) = &self.c {
            rows.push(format!("C &= {}", tex(e)));
        }
        if let Some(e) = &self.f {
            rows.push(format!("f &= {}", tex(e)));
        }
        if let Some((chart, rels)) = &self.syzygies {
            rows.extend(rels.iter().map(|r| format!("{} &= 0", syzygy_latex(&latex(chart, r)))));
        }
        if let Some(lines) = &self.structure {
            rows.extend(lines.iter().map(|l| l.latex.clone()));
        }
        if let Some([p, q, r]) = self.swell {
            rows.push(format!("\\#\\bar p, \\#\\bar q, \\#\\bar r &: {p}, {q}, {r}"));
        }
        rows.extend(self.notes.iter().map(|n| format!("&\\text{{{}}}", escape(n))));
        format!("\\begin{{align*}}\n{}\n\\end{{align*}}\n", rows.join(" \\\\\n"))
    }
}

#[derive(Serialize)]
struct Invariants {
    #[serde(rename = "I1")]
    i1: String,
    #[serde(rename = "I2")]
    i2: String,
    #[serde(rename = "I3")]
    i3: String,
}

#[derive(Serialize)]
struct Swell {
    monomials_rbar: usize,
}

#[derive(Serialize)]
struct Json<'a> {
    problem: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    flat: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equivalent: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residuals: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    invariants: Option<Invariants>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta: Option<String>,
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    c: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    syzygies: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    structure: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    swell: Option<Swell>,
}

/// Escapes text for `\text{..}`.
fn escape(s: &str) -> String {
    s.replace('\\', "\\textbackslash{}")
        .replace('_', "\\_")
        .replace('&', "\\&")
        .replace('#', "\\#")
        .replace('%', "\\%")
        .replace('∧', "$\\wedge$")
}

/// `X_{1}I_{3}` for the symbol rendered as `X1I_{3}`.
fn syzygy_latex(s: &str) -> String {
    (1..=9).fold(s.to_string(), |acc, l| acc.replace(&format!("X{l}I_"), &format!("X_{{{l}}}I_")))
}

/// LaTeX for a form whose basis elements are already LaTeX.
pub fn latex_form(chart: &Chart, form: &DifferentialForm, basis: &[String]) -> String {
    if form.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (n, (idx, c)) in form.terms().enumerate() {
        let neg = c.constant_value().is_some_and(|v| v.is_negative());
        let mag = if neg { -c } else { c.clone() };
        out.push_str(match (n, neg) {
            (0, true) => "-",
            (0, false) => "",
            (_, true) => " - ",
            (_, false) => " + ",
        });
        let wedge: Vec<&str> = idx.iter().map(|&i| basis[i].as_str()).collect();
        let wedge = wedge.join(" \\wedge ");
        if idx.is_empty() {
            out.push_str(&latex(chart, &mag));
        } else if mag.is_one() {
            out.push_str(&wedge);
        } else if mag.is_constant() {
            out.push_str(&format!("{} {}", latex(chart, &mag), wedge));
        } else {
            out.push_str(&format!("\\left({}\\right) {}", latex(chart, &mag), wedge));
        }
    }
    out
}
