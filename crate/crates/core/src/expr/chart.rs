//! Coordinate charts: coordinates, group parameters and opaque functions.

use std::collections::HashMap;
use std::fmt;

use super::{ExprError, Expression};

/// Largest number of arguments an opaque function may take.
pub const MAX_ARITY: usize = 6;

/// Derivative symbol `f_I` of an opaque function.
///
/// `orders[k]` counts how many times the `k`-th declared argument appears in
/// the multi-index, so partials commute by construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetSymbol {
    pub func: u16,
    pub orders: [u8; MAX_ARITY],
}

impl JetSymbol {
    pub fn base(func: u16) -> Self {
        JetSymbol {
            func,
            orders: [0; MAX_ARITY],
        }
    }

    /// Total order `|I|` of the multi-index.
    pub fn order(&self) -> u32 {
        self.orders.iter().map(|&o| o as u32).sum()
    }
}

/// An indeterminate of the polynomial ring underlying [`Expression`].
///
/// The derived ordering is the global name order used by the monomial order:
/// coordinates first (in chart order), then group parameters, then jet symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Coord(u16),
    Param(u16),
    Jet(JetSymbol),
}

/// Declaration of an unknown function and the coordinates it depends on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpaqueFunction {
    pub name: String,
    /// Indices into the chart's coordinate list.
    pub args: Vec<usize>,
}

/// A local chart: coordinates, group parameters and opaque functions.
///
/// Every [`Expression`] is interpreted relative to one chart. The basis of
/// differentials is `dcoord_0, .., dcoord_{n-1}, dparam_0, ..`.
#[derive(Clone, Debug, Default)]
pub struct Chart {
    coords: Vec<String>,
    params: Vec<String>,
    functions: Vec<OpaqueFunction>,
    nonvanishing: Vec<Expression>,
    index: HashMap<String, Var>,
    func_index: HashMap<String, u16>,
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
            && self.params == other.params
            && self.functions == other.functions
    }
}

impl Chart {
    pub fn new(coords: &[&str], params: &[&str]) -> Result<Chart, ExprError> {
        let mut chart = Chart::default();
        for c in coords {
            chart.push_name(c, Var::Coord(chart.coords.len() as u16))?;
            chart.coords.push(c.to_string());
        }
        for a in params {
            chart.push_name(a, Var::Param(chart.params.len() as u16))?;
            chart.params.push(a.to_string());
        }
        Ok(chart)
    }

    fn push_name(&mut self, name: &str, var: Var) -> Result<(), ExprError> {
        if name.is_empty() || self.index.contains_key(name) || self.func_index.contains_key(name)
        {
            return Err(ExprError::DuplicateName(name.to_string()));
        }
        self.index.insert(name.to_string(), var);
        Ok(())
    }

    /// Declares an opaque function of the named coordinates.
    pub fn with_function(mut self, name: &str, args: &[&str]) -> Result<Chart, ExprError> {
        if name.is_empty()
            || name.contains('_')
            || self.index.contains_key(name)
            || self.func_index.contains_key(name)
        {
            return Err(ExprError::DuplicateName(name.to_string()));
        }
        if args.len() > MAX_ARITY {
            return Err(ExprError::ArityTooLarge(name.to_string()));
        }
        let mut idx = Vec::with_capacity(args.len());
        for a in args {
            match self.index.get(*a) {
                Some(Var::Coord(k)) if !idx.contains(&(*k as usize)) => idx.push(*k as usize),
                _ => return Err(ExprError::UnknownName(a.to_string())),
            }
        }
        self.func_index
            .insert(name.to_string(), self.functions.len() as u16);
        self.functions.push(OpaqueFunction {
            name: name.to_string(),
            args: idx,
        });
        Ok(self)
    }

    /// Same chart with extra coordinates appended after the existing ones.
    ///
    /// Parameters keep their `Var`s but move up in the basis order.
    pub fn extend_coords(&self, names: &[String]) -> Result<Chart, ExprError> {
        let mut out = self.clone();
        let mut coord_count = self.coords.len();
        for n in names {
            out.push_name(n, Var::Coord(coord_count as u16))?;
            out.coords.push(n.clone());
            coord_count += 1;
        }
        Ok(out)
    }

    /// Records that `e` is assumed not to vanish on the chart's domain.
    pub fn assume_nonzero(mut self, e: Expression) -> Chart {
        self.nonvanishing.push(e);
        self
    }

    pub fn nonvanishing(&self) -> &[Expression] {
        &self.nonvanishing
    }

    /// Is `e` nonzero by one of the recorded assumptions (up to a constant
    /// factor and integer powers)?
    pub fn excludes_vanishing(&self, e: &Expression) -> bool {
        if e.is_zero() {
            return false;
        }
        if e.is_constant() {
            return true;
        }
        self.nonvanishing.iter().any(|a| {
            let mut power = a.clone();
            for _ in 0..4 {
                if let Ok(ratio) = e.checked_div(&power) {
                    if ratio.is_constant() {
                        return true;
                    }
                }
                power = &power * a;
            }
            false
        })
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn functions(&self) -> &[OpaqueFunction] {
        &self.functions
    }

    /// Number of basis differentials (coordinates plus parameters).
    pub fn dim(&self) -> usize {
        self.coords.len() + self.params.len()
    }

    pub fn basis_var(&self, i: usize) -> Var {
        if i < self.coords.len() {
            Var::Coord(i as u16)
        } else {
            Var::Param((i - self.coords.len()) as u16)
        }
    }

    pub fn basis_index(&self, v: Var) -> Option<usize> {
        match v {
            Var::Coord(k) => Some(k as usize),
            Var::Param(k) => Some(self.coords.len() + k as usize),
            Var::Jet(_) => None,
        }
    }

    /// Looks up a coordinate or parameter by name.
    pub fn var(&self, name: &str) -> Result<Var, ExprError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| ExprError::UnknownName(name.to_string()))
    }

    /// Coordinate or parameter as an expression.
    pub fn sym(&self, name: &str) -> Result<Expression, ExprError> {
        Ok(Expression::var(self.var(name)?))
    }

    pub fn function_id(&self, name: &str) -> Result<u16, ExprError> {
        self.func_index
            .get(name)
            .copied()
            .ok_or_else(|| ExprError::UnknownName(name.to_string()))
    }

    pub fn function(&self, id: u16) -> &OpaqueFunction {
        &self.functions[id as usize]
    }

    /// Derivative symbol of `func` with respect to the named arguments, e.g.
    /// `jet("f", &["y", "p"])` is `f_yp`.
    pub fn jet(&self, func: &str, wrt: &[&str]) -> Result<Var, ExprError> {
        let id = self.function_id(func)?;
        let mut sym = JetSymbol::base(id);
        for w in wrt {
            let k = match self.var(w)? {
                Var::Coord(k) => k as usize,
                _ => return Err(ExprError::UnknownName(w.to_string())),
            };
            let pos = self.functions[id as usize]
                .args
                .iter()
                .position(|&a| a == k)
                .ok_or_else(|| ExprError::NotAnArgument {
                    func: func.to_string(),
                    var: w.to_string(),
                })?;
            sym.orders[pos] += 1;
        }
        Ok(Var::Jet(sym))
    }

    /// Same as [`Chart::jet`] but wrapped as an expression.
    pub fn fun(&self, func: &str, wrt: &[&str]) -> Result<Expression, ExprError> {
        Ok(Expression::var(self.jet(func, wrt)?))
    }

    /// `∂/∂(basis i)` of a derivative symbol, or `None` if it vanishes.
    pub fn jet_partial(&self, sym: JetSymbol, basis: usize) -> Option<JetSymbol> {
        if basis >= self.coords.len() {
            return None;
        }
        let f = &self.functions[sym.func as usize];
        let pos = f.args.iter().position(|&a| a == basis)?;
        let mut out = sym;
        out.orders[pos] += 1;
        Some(out)
    }

    /// Whether `v` names something declared on this chart.
    pub fn contains(&self, v: Var) -> bool {
        match v {
            Var::Coord(k) => (k as usize) < self.coords.len(),
            Var::Param(k) => (k as usize) < self.params.len(),
            Var::Jet(j) => {
                let Some(f) = self.functions.get(j.func as usize) else {
                    return false;
                };
                j.orders[f.args.len()..].iter().all(|&o| o == 0)
            }
        }
    }

    pub fn check(&self, e: &Expression) -> Result<(), ExprError> {
        match e.vars().into_iter().find(|v| !self.contains(*v)) {
            Some(_) => Err(ExprError::ChartMismatch),
            None => Ok(()),
        }
    }

    /// Printable name of an indeterminate: `x`, `a3`, `f_yp`, `F1_dx2_dx2`.
    pub fn var_name(&self, v: Var) -> String {
        match v {
            Var::Coord(k) => self.coords[k as usize].clone(),
            Var::Param(k) => self.params[k as usize].clone(),
            Var::Jet(j) => {
                let f = &self.functions[j.func as usize];
                if j.order() == 0 {
                    return f.name.clone();
                }
                let names: Vec<&str> = f
                    .args
                    .iter()
                    .zip(j.orders.iter())
                    .flat_map(|(&a, &o)| std::iter::repeat(self.coords[a].as_str()).take(o as usize))
                    .collect();
                if names.iter().all(|n| n.chars().count() == 1) {
                    format!("{}_{}", f.name, names.concat())
                } else {
                    format!("{}_{}", f.name, names.join("_"))
                }
            }
        }
    }

    /// Inverse of [`Chart::var_name`].
    pub fn resolve(&self, name: &str) -> Result<Var, ExprError> {
        if let Some(v) = self.index.get(name) {
            return Ok(*v);
        }
        let (head, tail) = match name.split_once('_') {
            Some((h, t)) => (h, Some(t)),
            None => (name, None),
        };
        let id = self.function_id(head)?;
        let Some(tail) = tail else {
            return Ok(Var::Jet(JetSymbol::base(id)));
        };
        let f = &self.functions[id as usize];
        let single = f.args.iter().all(|&a| self.coords[a].chars().count() == 1);
        let parts: Vec<String> = if single {
            tail.chars().map(|c| c.to_string()).collect()
        } else {
            tail.split('_').map(str::to_string).collect()
        };
        let mut sym = JetSymbol::base(id);
        for p in parts {
            let pos = f
                .args
                .iter()
                .position(|&a| self.coords[a] == p)
                .ok_or_else(|| ExprError::UnknownName(name.to_string()))?;
            sym.orders[pos] += 1;
        }
        Ok(Var::Jet(sym))
    }

    pub fn display<'a>(&'a self, e: &'a Expression) -> impl fmt::Display + 'a {
        super::render::Text { chart: self, expr: e }
    }
}
