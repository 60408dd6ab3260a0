//! Known polynomial factors in the invariants, kept pairwise coprime.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sigma::Parameterization;
use crate::symcore::gcd::{certainly_coprime, gcd, normalize};
use crate::symcore::{squarefree, squarefree_part, Poly, VarSet};

/// Why a factor is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    HVariable,
    ParameterizationArtifact,
    /// An IVPP polynomial of the given period.
    Ivpp(usize),
    /// A piece split off when two entries shared a factor.
    DerivedGcd,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerEntry {
    pub poly: Poly,
    pub provenance: Provenance,
    /// Periods whose IVPP polynomials contain this entry, whatever its
    /// original provenance (an h-variable can also be an IVPP factor).
    pub periods: Vec<usize>,
}

/// Pairwise coprime, squarefree, primitive entries with positive leading
/// coefficients. Entries are never dropped; when a new factor shares a
/// proper factor with an entry, the entry is replaced by its coprime pieces.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorLedger {
    hvars: VarSet,
    entries: Vec<LedgerEntry>,
}

impl FactorLedger {
    pub fn empty(hvars: &VarSet) -> FactorLedger {
        FactorLedger {
            hvars: hvars.clone(),
            entries: Vec::new(),
        }
    }

    /// A ledger holding the h-variables.
    pub fn new(hvars: &VarSet) -> FactorLedger {
        let mut l = FactorLedger::empty(hvars);
        for i in 0..hvars.len() {
            l.entries.push(LedgerEntry {
                poly: Poly::var(hvars, i),
                provenance: Provenance::HVariable,
                periods: Vec::new(),
            });
        }
        l
    }

    pub fn hvars(&self) -> &VarSet {
        &self.hvars
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn polys(&self) -> impl Iterator<Item = &Poly> {
        self.entries.iter().map(|e| &e.poly)
    }

    pub fn position(&self, p: &Poly) -> Option<usize> {
        let q = normalize(p);
        self.entries.iter().position(|e| e.poly == q)
    }

    pub fn contains(&self, p: &Poly) -> bool {
        self.position(p).is_some()
    }

    /// Adds every squarefree factor of `p`, keeping the entries coprime.
    pub fn insert(&mut self, p: &Poly, provenance: Provenance) -> Result<()> {
        if p.vars() != &self.hvars {
            return Err(Error::VarsetMismatch("ledger insertion".into()));
        }
        if p.is_zero() {
            return Err(Error::ZeroInput("ledger insertion".into()));
        }
        for (f, _) in squarefree(p)? {
            self.insert_factor(f, provenance);
        }
        Ok(())
    }

    fn insert_factor(&mut self, f: Poly, provenance: Provenance) {
        let mut work = vec![(normalize(&f), provenance)];
        while let Some((q, prov)) = work.pop() {
            if q.is_constant() {
                continue;
            }
            let mut placed = false;
            for i in 0..self.entries.len() {
                let e = self.entries[i].poly.clone();
                if certainly_coprime(&q, &e) {
                    continue;
                }
                let g = normalize(&gcd(&q, &e));
                if g.is_constant() {
                    continue;
                }
                placed = true;
                if g == e {
                    if g != q {
                        work.push((q.div_exact(&e).expect("gcd divides"), prov));
                    }
                    self.tag(i, prov);
                } else {
                    // Replace the entry by g and e/g, then continue with q/g.
                    let old = self.entries[i].clone();
                    self.entries[i] = LedgerEntry {
                        poly: g.clone(),
                        provenance: Provenance::DerivedGcd,
                        periods: old.periods.clone(),
                    };
                    self.tag(i, prov);
                    let rest = e.div_exact(&g).expect("gcd divides");
                    work.push((rest, Provenance::DerivedGcd));
                    if g != q {
                        work.push((q.div_exact(&g).expect("gcd divides"), prov));
                    }
                }
                break;
            }
            if !placed {
                let periods = match prov {
                    Provenance::Ivpp(n) => vec![n],
                    _ => Vec::new(),
                };
                self.entries.push(LedgerEntry {
                    poly: q,
                    provenance: prov,
                    periods,
                });
            }
        }
    }

    fn tag(&mut self, i: usize, prov: Provenance) {
        if let Provenance::Ivpp(n) = prov {
            let ps = &mut self.entries[i].periods;
            if !ps.contains(&n) {
                ps.push(n);
                ps.sort_unstable();
            }
        }
    }

    /// The ledger as it stood before period `n` was derived: IVPP entries of
    /// period `n` or later are left out.
    pub fn before_period(&self, n: usize) -> FactorLedger {
        let entries = self
            .entries
            .iter()
            .filter(|e| !matches!(e.provenance, Provenance::Ivpp(m) if m >= n))
            .map(|e| LedgerEntry {
                poly: e.poly.clone(),
                provenance: e.provenance,
                periods: e.periods.iter().copied().filter(|m| *m < n).collect(),
            })
            .collect();
        FactorLedger {
            hvars: self.hvars.clone(),
            entries,
        }
    }

    /// Only the entries that belong to some IVPP.
    pub fn ivpp_only(&self) -> FactorLedger {
        FactorLedger {
            hvars: self.hvars.clone(),
            entries: self
                .entries
                .iter()
                .filter(|e| !e.periods.is_empty())
                .cloned()
                .collect(),
        }
    }
}

/// The h-variables plus the coprime closure of every numerator and
/// denominator factor of the parameterization.
pub fn seed_ledger(param: &Parameterization) -> Result<FactorLedger> {
    let mut l = FactorLedger::new(&param.hvars);
    for v in &param.values {
        for p in [v.num(), v.den()] {
            if !p.is_constant() {
                l.insert(p, Provenance::ParameterizationArtifact)?;
            }
        }
    }
    Ok(l)
}

/// Divides out every ledger entry to maximal multiplicity and returns the
/// squarefree part of what is left, normalized; `1` when nothing is left.
pub fn strip(poly: &Poly, ledger: &FactorLedger) -> Result<Poly> {
    if poly.is_zero() {
        return Err(Error::ZeroInput("strip".into()));
    }
    let mut q = poly.primitive_part();
    for e in ledger.polys() {
        if q.is_constant() {
            break;
        }
        if e.vars() != q.vars() {
            return Err(Error::VarsetMismatch("strip".into()));
        }
        while !q.is_constant() && may_divide(e, &q) {
            match q.div_exact(e) {
                Some(r) => q = r,
                None => break,
            }
        }
    }
    if q.is_constant() {
        return Ok(Poly::one(poly.vars()));
    }
    Ok(normalize(&squarefree_part(&q)?))
}

fn may_divide(e: &Poly, q: &Poly) -> bool {
    e.total_degree() <= q.total_degree()
        && e.degrees().iter().zip(q.degrees()).all(|(a, b)| *a <= b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigma::builtin_toda_param;
    use crate::symcore::parse_poly;

    fn hv() -> VarSet {
        VarSet::of(&["r", "t", "f", "g"])
    }

    #[test]
    fn seed_contains_the_parameterization_factors() {
        let l = seed_ledger(&builtin_toda_param()).unwrap();
        let p = |s: &str| parse_poly(s, &hv()).unwrap();
        for s in ["r", "t", "f", "g", "r+g", "-g^2*t+f^2*r", "-g^2*t+g*f^2+f^2*r"] {
            assert!(l.contains(&p(s)), "{s}");
        }
        assert_eq!(l.len(), 7);
    }

    #[test]
    fn splitting_keeps_entries_coprime() {
        let h = hv();
        let p = |s: &str| parse_poly(s, &h).unwrap();
        let mut l = FactorLedger::empty(&h);
        l.insert(&p("(r+1)*(t+1)"), Provenance::ParameterizationArtifact).unwrap();
        l.insert(&p("(t+1)*(f+2)"), Provenance::Ivpp(3)).unwrap();
        let mut got: Vec<String> = l.polys().map(|q| q.to_string()).collect();
        got.sort();
        assert_eq!(got, vec!["f + 2", "r + 1", "t + 1"]);
        let t1 = &l.entries()[l.position(&p("t+1")).unwrap()];
        assert_eq!(t1.periods, vec![3]);
    }

    #[test]
    fn strip_examples() {
        let h = hv();
        let p = |s: &str| parse_poly(s, &h).unwrap();
        let mut l = FactorLedger::empty(&h);
        l.insert(&p("f*g"), Provenance::HVariable).unwrap();
        assert_eq!(strip(&p("f^2*g^3*(t*f+g)"), &l).unwrap(), p("t*f+g"));
        assert!(strip(&p("g^3"), &l).unwrap().is_one());
        assert!(strip(&p("0"), &l).is_err());
    }
}
