//! The condition system cutting out a singular variety and its
//! parameterization by invariant values.

use crate::error::{Error, Result};
use crate::mapkit::{IterateSet, RationalMap};
use crate::symcore::parse::parse_ratfunc_at;
use crate::symcore::{squarefree_part, substitute, Poly, RatFunc, VarSet};

/// Conditions `DX_i^(k) = 0` for `k = 1..=d-p` and `H_k(x) = h_k`.
#[derive(Clone, Debug)]
pub struct SigmaConditions {
    pub map: RationalMap,
    pub component: usize,
    pub zero_conditions: Vec<Poly>,
    /// Each invariant polynomial paired with the name of its value variable.
    pub invariant_conditions: Vec<(Poly, String)>,
    pub hvars: VarSet,
}

/// A point of the singular variety with coordinates rational in `hvars`.
#[derive(Clone, Debug, PartialEq)]
pub struct Parameterization {
    pub hvars: VarSet,
    pub values: Vec<RatFunc>,
}

impl Parameterization {
    pub fn new(hvars: VarSet, values: Vec<RatFunc>) -> Result<Parameterization> {
        if values.iter().any(|v| v.vars() != &hvars) {
            return Err(Error::VarsetMismatch("parameterization coordinates".into()));
        }
        Ok(Parameterization { hvars, values })
    }

    /// Values as a substitution vector for polynomials in the map variables.
    pub fn assignment(&self) -> Vec<Option<RatFunc>> {
        self.values.iter().cloned().map(Some).collect()
    }

    /// One `coord_k = <expr>` line per coordinate (k from 1).
    pub fn to_text(&self) -> String {
        let mut s = format!("hvars {}\n", self.hvars.names().join(" "));
        for (k, v) in self.values.iter().enumerate() {
            s.push_str(&format!("coord_{} = {}\n", k + 1, v));
        }
        s
    }

    /// Inverse of [`Parameterization::to_text`].
    pub fn from_text(text: &str) -> Result<Parameterization> {
        let mut hvars: Option<VarSet> = None;
        let mut values: Vec<(usize, RatFunc)> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix("hvars") {
                let names: Vec<&str> = rest.split_whitespace().collect();
                hvars = Some(VarSet::new(&names)?);
                continue;
            }
            let Some(eq) = content.find('=') else {
                return Err(Error::Syntax {
                    line,
                    column: 1,
                    message: "expected `coord_k = <expr>`".into(),
                });
            };
            let lhs = content[..eq].trim();
            let k: usize = lhs
                .strip_prefix("coord_")
                .and_then(|s| s.parse().ok())
                .filter(|k| *k >= 1)
                .ok_or_else(|| Error::Syntax {
                    line,
                    column: 1,
                    message: format!("bad coordinate name `{lhs}`"),
                })?;
            let Some(hv) = &hvars else {
                return Err(Error::Syntax {
                    line,
                    column: 1,
                    message: "`hvars` must come first".into(),
                });
            };
            let offset = raw.find('=').unwrap() + 2;
            values.push((k, parse_ratfunc_at(&content[eq + 1..], hv, line, offset)?));
        }
        let hvars = hvars.ok_or_else(|| Error::InvalidInput("missing `hvars` line".into()))?;
        values.sort_by_key(|(k, _)| *k);
        if values.iter().enumerate().any(|(i, (k, _))| *k != i + 1) {
            return Err(Error::InvalidInput("coordinates must be coord_1..coord_d".into()));
        }
        Parameterization::new(hvars, values.into_iter().map(|(_, v)| v).collect())
    }
}

/// Builds the condition system for component `i` from precomputed iterates
/// (`iterates.len() >= d - p`). Invariant values are named after the
/// invariants themselves.
pub fn build_conditions(iterates: &IterateSet, i: usize) -> Result<SigmaConditions> {
    let map = iterates.map();
    let d = map.dim();
    let p = map.invariants().len();
    if p == 0 || p > d {
        return Err(Error::InvalidInput("map needs between 1 and d invariants".into()));
    }
    if iterates.len() < d - p {
        return Err(Error::InvalidInput(format!(
            "need {} iterates, have {}",
            d - p,
            iterates.len()
        )));
    }
    let names = map.invariant_names();
    if names.iter().any(|n| map.vars().index_of(n).is_some()) {
        return Err(Error::InvalidInput(
            "invariant names must differ from the map variables".into(),
        ));
    }
    let hvars = VarSet::new(&names)?;
    let zero_conditions = (1..=d - p)
        .map(|k| Ok(iterates.component(k, i)?.den().clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(SigmaConditions {
        map: map.clone(),
        component: i,
        zero_conditions,
        invariant_conditions: map
            .invariants()
            .iter()
            .map(|(n, h)| (h.clone(), n.clone()))
            .collect(),
        hvars,
    })
}

/// Outcome of [`verify_param`]: every residual must vanish.
#[derive(Clone, Debug)]
pub struct ParamReport {
    /// Substituted zero conditions.
    pub zero_residuals: Vec<RatFunc>,
    /// `H_k(p) - h_k` for each invariant.
    pub invariant_residuals: Vec<(String, RatFunc)>,
}

impl ParamReport {
    pub fn passed(&self) -> bool {
        self.zero_residuals.iter().all(|r| r.is_zero())
            && self.invariant_residuals.iter().all(|(_, r)| r.is_zero())
    }
}

pub fn verify_param(cond: &SigmaConditions, param: &Parameterization) -> Result<ParamReport> {
    if param.hvars != cond.hvars {
        return Err(Error::VarsetMismatch(format!(
            "parameterization over {:?}, conditions over {:?}",
            param.hvars, cond.hvars
        )));
    }
    let vals = param.assignment();
    let zero_residuals = crate::par::map(&cond.zero_conditions, |c| substitute(c, &vals, &param.hvars))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let invariant_residuals = cond
        .invariant_conditions
        .iter()
        .map(|(h, name)| {
            let v = substitute(h, &vals, &param.hvars)?;
            let hv = Poly::var_named(&param.hvars, name)?;
            Ok((name.clone(), v.sub(&RatFunc::from_poly(hv))))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ParamReport {
        zero_residuals,
        invariant_residuals,
    })
}

/// Result of [`eliminate_triangular`]: the parameterization plus the
/// polynomials (in `hvars`) whose vanishing the generic solve excluded.
#[derive(Clone, Debug)]
pub struct Elimination {
    pub param: Parameterization,
    pub excluded: Vec<Poly>,
}

/// Solves the condition system one unknown at a time in `solve_order`
/// (indices of map variables). Each stage takes the remaining condition of
/// degree 1 in the unknown with the fewest terms, solves it, and
/// substitutes into the rest; coefficients may involve unknowns not yet
/// solved, which are resolved by back-substitution at the end.
pub fn eliminate_triangular(cond: &SigmaConditions, solve_order: &[usize]) -> Result<Elimination> {
    let xv = cond.map.vars().clone();
    let d = xv.len();
    let mut seen = vec![false; d];
    if solve_order.len() != d || solve_order.iter().any(|&i| i >= d || std::mem::replace(&mut seen[i], true)) {
        return Err(Error::InvalidInput(format!(
            "solve order must be a permutation of the {d} map variables"
        )));
    }
    let all = xv.union(&cond.hvars);
    let identity: Vec<Option<RatFunc>> = (0..all.len())
        .map(|i| Some(RatFunc::from_poly(Poly::var(&all, i))))
        .collect();
    let mut pending: Vec<Poly> = Vec::new();
    for c in &cond.zero_conditions {
        pending.push(c.promote(&all)?);
    }
    for (h, name) in &cond.invariant_conditions {
        pending.push(h.promote(&all)?.sub(&Poly::var_named(&all, name)?));
    }
    let mut solved: Vec<(usize, RatFunc)> = Vec::new();
    let mut excluded: Vec<Poly> = Vec::new();
    for (stage, &x) in solve_order.iter().enumerate() {
        let stage = stage + 1;
        let pick = pending
            .iter()
            .enumerate()
            .filter(|(_, c)| c.degree_in(x) == 1)
            .min_by_key(|(_, c)| c.nterms())
            .map(|(i, _)| i);
        let Some(i) = pick else {
            let reason = if pending.iter().any(|c| c.degree_in(x) >= 2) {
                format!("every remaining condition in `{}` is of degree 2 or more", xv.name(x))
            } else {
                format!("no remaining condition involves `{}`", xv.name(x))
            };
            return Err(Error::Unsolvable { stage, reason });
        };
        let c = pending.swap_remove(i);
        let cs = c.coeffs_in(x);
        let value = RatFunc::new(cs[0].neg(), cs[1].clone())?;
        if !cs[1].is_constant() {
            excluded.push(cs[1].clone());
        }
        let mut vals = identity.clone();
        vals[x] = Some(value.clone());
        let mut next = Vec::with_capacity(pending.len());
        for q in &pending {
            let r = substitute(q, &vals, &all)?;
            if r.is_zero() {
                continue;
            }
            if r.num().is_constant() {
                return Err(Error::Inconsistent(format!(
                    "after solving for `{}` a condition reduces to a nonzero constant",
                    xv.name(x)
                )));
            }
            next.push(squarefree_part(r.num())?.primitive_part());
        }
        pending = next;
        for (_, v) in solved.iter_mut() {
            *v = crate::symcore::subst::compose(v, &vals, &all)?;
        }
        solved.push((x, value));
    }
    if let Some(c) = pending.first() {
        return Err(Error::Inconsistent(format!(
            "a condition is left over after all unknowns are solved: {c}"
        )));
    }
    // Each solved value was updated as later unknowns were solved, so all
    // of them are now free of unknowns.
    let mut values = vec![None; d];
    for (x, v) in solved {
        values[x] = Some(v);
    }
    let hcoords: Vec<RatFunc> = values
        .into_iter()
        .map(|v| restrict(&v.expect("every unknown solved"), &cond.hvars))
        .collect::<Result<_>>()?;
    let param = Parameterization::new(cond.hvars.clone(), hcoords)?;
    let report = verify_param(cond, &param)?;
    if !report.passed() {
        return Err(Error::Unsolvable {
            stage: d + 1,
            reason: "the eliminated parameterization fails its own verification".into(),
        });
    }
    let on_param = param_on(&all, &xv, &param);
    let mut excl: Vec<Poly> = Vec::new();
    for e in &excluded {
        let r = substitute(e, &on_param, &cond.hvars)?;
        for (f, _) in crate::symcore::squarefree(r.num())? {
            let f = crate::symcore::gcd::normalize(&f);
            if !f.is_constant() && !excl.contains(&f) {
                excl.push(f);
            }
        }
    }
    excl.sort_by(|a, b| a.canonical_cmp(b));
    let excluded = excl;
    Ok(Elimination { param, excluded })
}

/// Assignment over `all = x ∪ h` sending each x to its coordinate and each
/// h to itself, in `hvars`.
fn param_on(all: &VarSet, xv: &VarSet, param: &Parameterization) -> Vec<Option<RatFunc>> {
    (0..all.len())
        .map(|i| {
            let name = all.name(i);
            if let Some(j) = xv.index_of(name) {
                Some(param.values[j].clone())
            } else {
                Poly::var_named(&param.hvars, name).ok().map(RatFunc::from_poly)
            }
        })
        .collect()
}

/// Re-expresses a rational function that only involves `target`'s names.
fn restrict(r: &RatFunc, target: &VarSet) -> Result<RatFunc> {
    let vals: Vec<Option<RatFunc>> = r
        .vars()
        .names()
        .iter()
        .map(|n| Poly::var_named(target, n).ok().map(RatFunc::from_poly))
        .collect();
    for (i, v) in vals.iter().enumerate() {
        if v.is_none() && (r.num().degree_in(i) > 0 || r.den().degree_in(i) > 0) {
            return Err(Error::Unsolvable {
                stage: 0,
                reason: format!("a coordinate still depends on `{}`", r.vars().name(i)),
            });
        }
    }
    substitute(r.num(), &vals, target)?.div(&substitute(r.den(), &vals, target)?)
}

const TODA_PARAM: &str = "\
hvars r t f g
coord_1 = r*(-g^2*t + g*f^2 + f^2*r)/g^3
coord_2 = g^2*f/(-g^2*t + f^2*r)
coord_3 = (-g^2*t + f^2*r)*g/((-g^2*t + g*f^2 + f^2*r)*f)
coord_4 = -(r + g)*(-g^2*t + f^2*r)/g^3
coord_5 = -g*(-g^2*t + g*f^2 + f^2*r)/((-g^2*t + f^2*r)*f)
coord_6 = g^2*f/(-g^2*t + g*f^2 + f^2*r)
";

/// The parameterization of the singular variety of the Toda map's first
/// component by `(r, t, f, g)`.
pub fn builtin_toda_param() -> Parameterization {
    Parameterization::from_text(TODA_PARAM).expect("bundled parameterization parses")
}
