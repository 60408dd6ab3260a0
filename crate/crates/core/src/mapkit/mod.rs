//! Rational maps: representation, the text format, invariants and iteration.

mod iterate;

pub use iterate::{degree_sequence, iterate, IterateSet, DEFAULT_TERM_CEILING};

use crate::error::{Error, Result};
use crate::symcore::parse::parse_ratfunc_at;
use crate::symcore::subst::compose;
use crate::symcore::{Poly, RatFunc, Scalar, VarSet};

/// A rational map `x -> (NX_1/DX_1, ..., NX_d/DX_d)` with named polynomial
/// invariants.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMap {
    name: String,
    vars: VarSet,
    component_names: Vec<String>,
    components: Vec<RatFunc>,
    invariants: Vec<(String, Poly)>,
}

const TODA3_DOC: &str = include_str!("../../assets/toda3.map");

/// The map document for the 3-point Toda map.
pub fn toda3_document() -> &'static str {
    TODA3_DOC
}

/// The 3-point Toda map over `(x, y, z, u, v, w)` with invariants
/// `r, t, f, g`.
pub fn builtin_toda3() -> RationalMap {
    parse_map(TODA3_DOC).expect("bundled Toda document parses")
}

/// Names accepted by [`builtin`].
pub fn builtin_names() -> &'static [&'static str] {
    &["toda3"]
}

pub fn builtin(name: &str) -> Option<RationalMap> {
    match name {
        "toda3" => Some(builtin_toda3()),
        _ => None,
    }
}

impl RationalMap {
    pub fn new(
        name: &str,
        vars: VarSet,
        component_names: Vec<String>,
        components: Vec<RatFunc>,
        invariants: Vec<(String, Poly)>,
    ) -> Result<RationalMap> {
        if components.len() != vars.len() || component_names.len() != vars.len() {
            return Err(Error::InvalidInput(format!(
                "{} variables but {} components",
                vars.len(),
                components.len()
            )));
        }
        if invariants.len() > vars.len() {
            return Err(Error::InvalidInput("more invariants than variables".into()));
        }
        for c in &components {
            if c.vars() != &vars {
                return Err(Error::VarsetMismatch("component varset".into()));
            }
        }
        Ok(RationalMap {
            name: name.to_string(),
            vars,
            component_names,
            components,
            invariants,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    /// Dimension `d`.
    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn component_names(&self) -> &[String] {
        &self.component_names
    }

    pub fn component_index(&self, name: &str) -> Option<usize> {
        self.component_names.iter().position(|n| n == name)
    }

    pub fn components(&self) -> &[RatFunc] {
        &self.components
    }

    pub fn invariants(&self) -> &[(String, Poly)] {
        &self.invariants
    }

    pub fn invariant_names(&self) -> Vec<String> {
        self.invariants.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn with_invariants(&self, invariants: Vec<(String, Poly)>) -> RationalMap {
        RationalMap {
            invariants,
            ..self.clone()
        }
    }

    /// Exact image of a rational point, or [`Error::Pole`] naming the first
    /// component whose denominator vanishes.
    pub fn apply_point(&self, point: &[Scalar]) -> Result<Vec<Scalar>> {
        if point.len() != self.dim() {
            return Err(Error::InvalidInput("point dimension".into()));
        }
        self.components
            .iter()
            .enumerate()
            .map(|(j, c)| c.eval(point).map_err(|_| Error::Pole { component: j }))
            .collect()
    }

    /// `self ∘ values`: each component with `values` substituted.
    pub fn compose_with(&self, values: &[RatFunc]) -> Result<Vec<RatFunc>> {
        let target = values[0].vars().clone();
        let vals: Vec<Option<RatFunc>> = values.iter().cloned().map(Some).collect();
        crate::par::map(&self.components, |c| compose(c, &vals, &target))
            .into_iter()
            .collect()
    }

    /// The map in the text format accepted by [`parse_map`].
    pub fn to_document(&self) -> String {
        let mut s = format!("map {}\nvars {}\n", self.name, self.vars.names().join(" "));
        for (n, h) in &self.invariants {
            s.push_str(&format!("inv {n} = {h}\n"));
        }
        for (n, c) in self.component_names.iter().zip(&self.components) {
            s.push_str(&format!("{n} = {c}\n"));
        }
        s
    }
}

/// Result of checking one invariant.
#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub name: String,
    /// `H(F(x)) - H(x)`, zero when the invariant holds.
    pub residual: RatFunc,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.residual.is_zero()
    }
}

pub fn verify_invariants(map: &RationalMap) -> Result<Vec<InvariantReport>> {
    let vals: Vec<Option<RatFunc>> = map.components.iter().cloned().map(Some).collect();
    map.invariants
        .iter()
        .map(|(name, h)| {
            let image = crate::symcore::substitute(h, &vals, map.vars())?;
            Ok(InvariantReport {
                name: name.clone(),
                residual: image.sub(&RatFunc::from_poly(h.clone())),
            })
        })
        .collect()
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_alphabetic() || c == '_')
        && cs.all(|c| c.is_alphanumeric() || c == '_')
}

/// Parses a map document:
///
/// ```text
/// map <name>
/// vars <v1> <v2> ...
/// inv <name> = <expr>        (repeatable)
/// <Component> = <expr>       (one per variable, in image order)
/// ```
///
/// Blank lines and `#` comments are ignored.
pub fn parse_map(text: &str) -> Result<RationalMap> {
    let mut name: Option<String> = None;
    let mut vars: Option<VarSet> = None;
    let mut invariants: Vec<(String, Poly)> = Vec::new();
    let mut comp_names: Vec<String> = Vec::new();
    let mut comps: Vec<RatFunc> = Vec::new();
    let mut last_line = 0;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap();
        let trimmed = content.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = content.len() - trimmed.len();
        let col_of = |sub: &str| indent + (sub.as_ptr() as usize - trimmed.as_ptr() as usize) + 1;
        let (head, rest) = match trimmed.find(char::is_whitespace) {
            Some(i) => (&trimmed[..i], trimmed[i..].trim_start()),
            None => (trimmed, ""),
        };
        match head {
            "map" => {
                if !is_ident(rest.trim()) {
                    return Err(syntax(line, col_of(rest), "expected a map name"));
                }
                name = Some(rest.trim().to_string());
            }
            "vars" => {
                if vars.is_some() {
                    return Err(syntax(line, indent + 1, "duplicate `vars` line"));
                }
                let names: Vec<&str> = rest.split_whitespace().collect();
                if names.is_empty() {
                    return Err(syntax(line, indent + 5, "expected variable names"));
                }
                for n in &names {
                    if !is_ident(n) {
                        return Err(syntax(line, col_of(n), format!("bad variable name `{n}`")));
                    }
                }
                vars = Some(VarSet::new(&names).map_err(|e| syntax(line, indent + 1, e.to_string()))?);
            }
            _ => {
                let (lhs, rhs, is_inv) = if head == "inv" {
                    let Some(eq) = rest.find('=') else {
                        return Err(syntax(line, col_of(rest), "expected `=`"));
                    };
                    (rest[..eq].trim(), &rest[eq + 1..], true)
                } else {
                    let Some(eq) = trimmed.find('=') else {
                        return Err(syntax(line, indent + 1, "expected `<name> = <expr>`"));
                    };
                    (trimmed[..eq].trim(), &trimmed[eq + 1..], false)
                };
                if !is_ident(lhs) {
                    return Err(syntax(line, indent + 1, format!("bad name `{lhs}`")));
                }
                let Some(vs) = &vars else {
                    return Err(syntax(line, indent + 1, "`vars` must come before expressions"));
                };
                let value = parse_ratfunc_at(rhs, vs, line, col_of(rhs))?;
                if is_inv {
                    if !value.is_poly() {
                        return Err(syntax(line, col_of(rhs), "invariants must be polynomials"));
                    }
                    invariants.push((lhs.to_string(), value.into_parts().0));
                } else {
                    comp_names.push(lhs.to_string());
                    comps.push(value);
                }
            }
        }
    }
    let vars = vars.ok_or_else(|| syntax(last_line.max(1), 1, "missing `vars` line"))?;
    if comps.len() != vars.len() {
        return Err(syntax(
            last_line.max(1),
            1,
            format!("{} variables but {} component lines", vars.len(), comps.len()),
        ));
    }
    RationalMap::new(
        name.as_deref().unwrap_or("unnamed"),
        vars,
        comp_names,
        comps,
        invariants,
    )
}
