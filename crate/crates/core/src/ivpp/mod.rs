//! Invariant varieties of periodic points: extraction of the defining
//! polynomials from denominators of the restricted iterates, the factor
//! ledger that separates new factors from known ones, and numeric
//! verification.

mod fixtures;
mod ledger;
mod verify;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sctrace::{Tag, Tracer};
use crate::symcore::gcd::normalize;
use crate::symcore::{resultant, squarefree, squarefree_part, Poly, Scalar};

pub use fixtures::{builtin_gamma_table, builtin_period2_surfaces};
pub use ledger::{seed_ledger, strip, FactorLedger, LedgerEntry, Provenance};
pub use verify::{check_period2, verify_ivpp, PeriodicityWitness, VerifyOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Derivation {
    DenominatorVanishing,
    ComponentIdentification,
    Fixture,
}

/// Where a step's new denominator factor was read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DenominatorSource {
    /// The cleared substituted denominator, stripped.
    Record,
    /// The denominator of the reduced component value; used when every
    /// factor of the record is already known.
    ReducedValue,
}

/// How a later denominator was combined with the first IVPP polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Combination {
    /// The first polynomial is a single variable, set to zero.
    Substituted { var: String },
    /// Resultant with respect to `var`, stripped.
    Eliminated { var: String },
    Unchanged,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepEvidence {
    pub step: usize,
    pub source: DenominatorSource,
    /// The new factor of the denominator at this step.
    pub denominator: Poly,
    pub combination: Combination,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IVPPCandidate {
    pub period: usize,
    pub gammas: Vec<Poly>,
    /// Squarefree factorization of each gamma before multiplicities were
    /// dropped.
    pub multiplicities: Vec<Vec<(Poly, u32)>>,
    pub derivation: Derivation,
    pub evidence: Vec<StepEvidence>,
}

impl IVPPCandidate {
    pub fn new(period: usize, gammas: Vec<Poly>, derivation: Derivation) -> IVPPCandidate {
        let multiplicities = gammas
            .iter()
            .map(|g| if g.is_constant() { Vec::new() } else { squarefree(g).unwrap_or_default() })
            .collect();
        IVPPCandidate {
            period,
            gammas,
            multiplicities,
            derivation,
            evidence: Vec::new(),
        }
    }

    /// Machine-readable record.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "period": self.period,
            "derivation": self.derivation,
            "gammas": self.gammas.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "multiplicities": self.multiplicities.iter().map(|fs| {
                fs.iter().map(|(f, e)| serde_json::json!({"factor": f.to_string(), "mult": e})).collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
            "evidence": self.evidence.iter().map(|e| serde_json::json!({
                "step": e.step,
                "source": e.source,
                "denominator": e.denominator.to_string(),
                "combination": e.combination,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Two candidates agree when their gammas have the same squarefree parts up
/// to sign and scalar, position by position.
pub fn same_variety(a: &[Poly], b: &[Poly]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| match (squarefree_part(x), squarefree_part(y)) {
            (Ok(p), Ok(q)) => normalize(&p) == normalize(&q),
            _ => false,
        })
}

/// Squarefree, primitive, positive leading coefficient.
fn clean(p: &Poly) -> Result<Poly> {
    if p.is_constant() {
        return Ok(Poly::one(p.vars()));
    }
    Ok(normalize(&squarefree_part(p)?))
}

/// When `gamma1` is a single variable `v`, returns `gamma2` at `v = 0`
/// (after dividing out powers of `v`), squarefree and normalized; otherwise
/// `gamma2` unchanged.
pub fn reduce_pair(gamma1: &Poly, gamma2: &Poly) -> Poly {
    match gamma1.primitive_part().as_single_variable() {
        Some(v) => {
            let mut q = gamma2.clone();
            let x = Poly::var(gamma2.vars(), v);
            while !q.is_zero() && q.degree_in(v) > 0 {
                match q.div_exact(&x) {
                    Some(r) => q = r,
                    None => break,
                }
            }
            let r = q.eval_var(v, &Scalar::zero());
            if r.is_zero() {
                return r;
            }
            clean(&r).expect("nonzero")
        }
        None => gamma2.clone(),
    }
}

/// Eliminates a shared variable between `gamma1` and `d` by resultants and
/// strips the result. Among the variables giving a nonconstant result, the
/// one with the fewest terms wins, then the lowest total degree, then the
/// earliest variable.
pub fn eliminate_against(gamma1: &Poly, d: &Poly, known: &FactorLedger) -> Result<Option<(Poly, usize)>> {
    let s1 = gamma1.support();
    let s2 = d.support();
    let mut best: Option<(Poly, usize)> = None;
    for v in s1.into_iter().filter(|v| s2.contains(v)) {
        let r = resultant(gamma1, d, v)?;
        if r.is_zero() {
            continue;
        }
        let s = strip(&r, known)?;
        if s.is_constant() {
            continue;
        }
        let better = match &best {
            None => true,
            Some((b, _)) => (s.nterms(), s.total_degree()) < (b.nterms(), b.total_degree()),
        };
        if better {
            best = Some((s, v));
        }
    }
    Ok(best)
}

fn fixed_steps(tracer: &Tracer, n: usize) -> usize {
    let d = tracer.map().dim();
    let p = tracer.map().invariants().len();
    d.saturating_sub(p).max(1) + n
}

fn window_check(tracer: &mut Tracer, n: usize, comp: usize) -> Result<()> {
    let last = fixed_steps(tracer, n);
    tracer.extend_to(last)?;
    let name = tracer.map().component_names()[comp].clone();
    let window: Vec<usize> = (1..=tracer.len()).filter(|k| !tracer.statuses(*k).iter().all(|s| s.is_fin())).collect();
    for k in n + 1..=last {
        let s = &tracer.statuses(k)[comp];
        let zero = s.value.as_ref().is_some_and(|v| v.is_zero());
        if s.tag != Tag::Fin || zero {
            let what = if zero { "identically zero".to_string() } else { s.tag.to_string() };
            return Err(Error::Derivation(format!(
                "period {n} is not reachable from this parameterization: component {name} is {what} at step {k}, \
                 inside the singularity window (non-finite steps {window:?}), so its denominator carries no \
                 information about period-{n} points; impose the periodicity conditions directly instead"
            )));
        }
    }
    Ok(())
}

/// The factor of the component-`comp` denominator at step `k` not explained
/// by `known` or by the poles of the previous point.
fn new_denominator_factor(
    tracer: &mut Tracer,
    known: &FactorLedger,
    k: usize,
    comp: usize,
) -> Result<(Poly, DenominatorSource)> {
    let record = tracer.denominator_at(k, comp)?;
    // Poles of a finite previous point are inherited, not new: when p^(k-1)
    // is infinite somewhere, so is p^(k) in general.
    let mut base = known.clone();
    let mut base_gammas = known.ivpp_only();
    if tracer.statuses(k - 1).iter().all(|s| s.is_fin()) {
        for s in tracer.statuses(k - 1) {
            let den = s.value.as_ref().expect("finite").den();
            if !den.is_constant() {
                base.insert(den, Provenance::ParameterizationArtifact)?;
                base_gammas.insert(den, Provenance::ParameterizationArtifact)?;
            }
        }
    }
    let d = strip(&record, &base)?;
    if !d.is_constant() {
        return Ok((d, DenominatorSource::Record));
    }
    let value = tracer.statuses(k)[comp].value.clone().expect("window checked");
    Ok((strip(value.den(), &base_gammas)?, DenominatorSource::ReducedValue))
}

/// Derives the IVPP polynomials of period `n` from the vanishing of the
/// denominators of component `comp` at steps `n+1 ..= n+d-p`, and records
/// them in the ledger.
pub fn derive_ivpp(
    tracer: &mut Tracer,
    ledger: &mut FactorLedger,
    n: usize,
    comp: usize,
) -> Result<IVPPCandidate> {
    if n < 2 {
        return Err(Error::InvalidInput("period must be at least 2".into()));
    }
    if comp >= tracer.map().dim() {
        return Err(Error::InvalidInput(format!("no component {comp}")));
    }
    if ledger.hvars() != &tracer.param().hvars {
        return Err(Error::VarsetMismatch("ledger and parameterization".into()));
    }
    window_check(tracer, n, comp)?;
    let known = ledger.before_period(n);
    let hv = tracer.param().hvars.clone();
    let mut gammas: Vec<Poly> = Vec::new();
    let mut raw: Vec<Poly> = Vec::new();
    let mut evidence = Vec::new();
    for k in n + 1..=fixed_steps(tracer, n) {
        let (d, source) = new_denominator_factor(tracer, &known, k, comp)?;
        let mut combination = Combination::Unchanged;
        let mut g = d.clone();
        let mut g_raw = d.clone();
        for earlier in &gammas {
            if g.is_constant() {
                break;
            }
            if let Some(v) = earlier.as_single_variable() {
                combination = Combination::Substituted { var: hv.name(v).to_string() };
                let x = Poly::var(&hv, v);
                let mut q = g.clone();
                while q.degree_in(v) > 0 {
                    match q.div_exact(&x) {
                        Some(r) => q = r,
                        None => break,
                    }
                }
                g_raw = normalize(&q.eval_var(v, &Scalar::zero()));
                g = reduce_pair(earlier, &g);
            } else {
                let mut with_earlier = known.clone();
                with_earlier.insert(earlier, Provenance::Ivpp(n))?;
                if let Some((e, v)) = eliminate_against(earlier, &g, &with_earlier)? {
                    combination = Combination::Eliminated { var: hv.name(v).to_string() };
                    g = e.clone();
                    g_raw = e;
                }
            }
        }
        evidence.push(StepEvidence {
            step: k,
            source,
            denominator: d,
            combination,
        });
        if !g.is_constant() && !g.is_zero() {
            gammas.push(g);
            raw.push(g_raw);
        }
    }
    if gammas.is_empty() {
        return Err(Error::Derivation(format!(
            "period {n}: every denominator factor is already in the ledger (empty candidate)"
        )));
    }
    for g in &gammas {
        ledger.insert(g, Provenance::Ivpp(n))?;
    }
    let mut cand = IVPPCandidate::new(n, gammas, Derivation::DenominatorVanishing);
    cand.multiplicities = raw
        .iter()
        .map(|g| if g.is_constant() { Vec::new() } else { squarefree(g).unwrap_or_default() })
        .collect();
    cand.evidence = evidence;
    Ok(cand)
}

/// Compares each component at step `n+1` with step 1 projectively,
/// `N^(n+1) D^(1) - N^(1) D^(n+1)`, and returns the stripped nonconstant
/// differences made pairwise coprime.
pub fn identify_components(tracer: &mut Tracer, ledger: &FactorLedger, n: usize) -> Result<Vec<Poly>> {
    tracer.extend_to(n + 1)?;
    let hv = tracer.param().hvars.clone();
    let names = tracer.map().component_names().to_vec();
    let proj = |k: usize, j: usize, tr: &Tracer| -> Option<(Poly, Poly)> {
        let s = &tr.statuses(k)[j];
        match s.tag {
            Tag::Fin => {
                let v = s.value.as_ref().unwrap();
                Some((v.num().clone(), v.den().clone()))
            }
            Tag::Inf => Some((Poly::one(&hv), Poly::zero(&hv))),
            Tag::Ind => None,
        }
    };
    let mut bad = Vec::new();
    let mut out = FactorLedger::empty(&hv);
    for (j, name) in names.iter().enumerate() {
        let (Some((n1, d1)), Some((nk, dk))) = (proj(1, j, tracer), proj(n + 1, j, tracer)) else {
            bad.push(name.clone());
            continue;
        };
        let diff = nk.mul(&d1).sub(&n1.mul(&dk));
        if diff.is_zero() {
            continue;
        }
        let s = strip(&diff, ledger)?;
        if !s.is_constant() {
            out.insert(&s, Provenance::DerivedGcd)?;
        }
    }
    if !bad.is_empty() {
        return Err(Error::Derivation(format!(
            "components {} are indeterminate at step 1 or {}; no projective value to compare",
            bad.join(", "),
            n + 1
        )));
    }
    let mut polys: Vec<Poly> = out.polys().cloned().collect();
    polys.sort_by(|a, b| a.canonical_cmp(b));
    Ok(polys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::{parse_poly, VarSet};

    fn p(s: &str) -> Poly {
        parse_poly(s, &VarSet::of(&["r", "t", "f", "g"])).unwrap()
    }

    #[test]
    fn reduce_pair_examples() {
        assert_eq!(reduce_pair(&p("f"), &p("-g^2*t+f^2*r")), p("g*t"));
        assert_eq!(reduce_pair(&p("f"), &p("f*g")), p("g"));
        let any = p("r^2 + f*g - 3");
        assert_eq!(reduce_pair(&p("t*f+g"), &any), any);
    }

    #[test]
    fn elimination_recovers_the_period_four_pair() {
        let hv = VarSet::of(&["r", "t", "f", "g"]);
        let known = FactorLedger::new(&hv);
        let a = p("g^2*t-f^2*r");
        let d = p("2*r^2*f^3 - 2*r*t*f*g^2 + r*f^3*g + g^4");
        let (e, v) = eliminate_against(&a, &d, &known).unwrap().unwrap();
        assert_eq!(e, p("t*f+g"));
        assert_eq!(hv.name(v), "r");
    }

    #[test]
    fn variety_comparison_ignores_sign_scalar_and_multiplicity() {
        assert!(same_variety(&[p("f"), p("t*g^2")], &[p("-2*f"), p("g*t")]));
        assert!(!same_variety(&[p("f")], &[p("g")]));
    }
}
