//! Iterates `F^(k)` kept in factored form over a shared factor base.

use super::RationalMap;
use crate::error::Result;
use crate::symcore::factored::{FactorBase, Factored};
use crate::symcore::{squarefree, Poly, RatFunc, Scalar};

/// Default ceiling on the number of terms of any expanded intermediate.
pub const DEFAULT_TERM_CEILING: usize = 2_000_000;

/// A map component written as `unit * prod P_i^e_i` over distinct polynomials.
#[derive(Clone, Debug)]
struct ComponentShape {
    unit: Scalar,
    factors: Vec<(usize, i32)>,
}

/// `F^(1), ..., F^(K)` with every component reduced.
#[derive(Clone, Debug)]
pub struct IterateSet {
    base: RationalMap,
    factors: FactorBase,
    polys: Vec<Poly>,
    shapes: Vec<ComponentShape>,
    items: Vec<Vec<Factored>>,
}

impl IterateSet {
    pub fn map(&self) -> &RationalMap {
        &self.base
    }

    /// Number of iterates held.
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn factor_base(&self) -> &FactorBase {
        &self.factors
    }

    /// Component `j` of `F^(k)` (`k >= 1`) in factored form.
    pub fn factored(&self, k: usize, j: usize) -> Factored {
        self.factors.canon(&self.items[k - 1][j])
    }

    /// Component `j` of `F^(k)` as a reduced rational function.
    pub fn component(&self, k: usize, j: usize) -> Result<RatFunc> {
        self.factors.expand(&self.factored(k, j))
    }

    pub fn step(&self, k: usize) -> Result<Vec<RatFunc>> {
        (0..self.base.dim()).map(|j| self.component(k, j)).collect()
    }

    /// Maximum total degree of the reduced numerators and denominators of
    /// `F^(k)`.
    pub fn max_degree(&self, k: usize) -> u32 {
        (0..self.base.dim())
            .map(|j| {
                let v = self.factored(k, j);
                let dn: u32 = v
                    .numerator_factors()
                    .map(|(i, e)| self.factors.poly(i).total_degree() * e)
                    .sum();
                let dd: u32 = v
                    .denominator_factors()
                    .map(|(i, e)| self.factors.poly(i).total_degree() * e)
                    .sum();
                dn.max(dd)
            })
            .max()
            .unwrap_or(0)
    }
}

fn shapes(map: &RationalMap) -> Result<(Vec<Poly>, Vec<ComponentShape>)> {
    let mut polys: Vec<Poly> = Vec::new();
    let mut out = Vec::new();
    let index_of = |p: Poly, polys: &mut Vec<Poly>| -> usize {
        match polys.iter().position(|q| *q == p) {
            Some(i) => i,
            None => {
                polys.push(p);
                polys.len() - 1
            }
        }
    };
    for c in map.components() {
        let mut factors = Vec::new();
        let mut rebuilt = Poly::one(map.vars());
        for (part, sign) in [(c.num(), 1), (c.den(), -1)] {
            if part.is_constant() {
                continue;
            }
            for (f, m) in squarefree(part)? {
                let i = index_of(f.clone(), &mut polys);
                factors.push((i, sign * m as i32));
                if sign > 0 {
                    rebuilt = rebuilt.mul(&f.pow(m));
                }
            }
        }
        let lc_rebuilt = if c.num().is_constant() {
            Scalar::one()
        } else {
            rebuilt.leading_coeff()
        };
        let unit = if c.is_zero() {
            Scalar::zero()
        } else {
            &c.num().leading_coeff() / &lc_rebuilt
        };
        // Denominators are primitive with positive leading coefficient, as
        // are the squarefree factors, so only the numerator carries a unit.
        out.push(ComponentShape { unit, factors });
    }
    Ok((polys, out))
}

impl IterateSet {
    /// An empty set (no iterates yet) ready for [`IterateSet::extend_to`].
    pub fn new(map: &RationalMap, term_ceiling: usize) -> Result<IterateSet> {
        let (polys, shapes) = shapes(map)?;
        Ok(IterateSet {
            base: map.clone(),
            factors: FactorBase::new(map.vars()).with_term_ceiling(term_ceiling),
            polys,
            shapes,
            items: Vec::new(),
        })
    }

    /// Computes further iterates until `k_max` are held.
    pub fn extend_to(&mut self, k_max: usize) -> Result<()> {
        while self.items.len() < k_max {
            self.advance()?;
        }
        Ok(())
    }

    fn advance(&mut self) -> Result<()> {
        let fb = &mut self.factors;
        let current: Vec<Factored> = match self.items.last() {
            Some(row) => row.iter().map(|v| fb.canon(v)).collect(),
            None => (0..self.base.dim()).map(|i| fb.var(i)).collect(),
        };
        let mut evals = Vec::with_capacity(self.polys.len());
        for p in &self.polys {
            evals.push(fb.eval_poly(p, &current)?);
        }
        let mut next = Vec::with_capacity(self.shapes.len());
        for s in &self.shapes {
            let mut acc = Factored::constant(s.unit.clone());
            for &(i, e) in &s.factors {
                let v = fb.canon(&evals[i]);
                let piece = if e > 0 {
                    v.pow(e as u32)
                } else {
                    v.recip()?.pow((-e) as u32)
                };
                acc = acc.mul(&piece);
            }
            next.push(fb.canon(&acc));
        }
        self.items.push(next);
        Ok(())
    }
}

/// Computes `F^(1..=K)` with reduction after every step, failing with a
/// resource cutoff if any expanded intermediate exceeds `term_ceiling`.
pub fn iterate(map: &RationalMap, k_max: usize, term_ceiling: usize) -> Result<IterateSet> {
    assert!(k_max >= 1, "iterate needs K >= 1");
    let mut it = IterateSet::new(map, term_ceiling)?;
    it.extend_to(k_max)?;
    Ok(it)
}

/// `max(deg NX, deg DX)` over the components of each `F^(k)`, `k = 1..=K`.
pub fn degree_sequence(map: &RationalMap, k_max: usize, term_ceiling: usize) -> Result<Vec<u32>> {
    let it = iterate(map, k_max, term_ceiling)?;
    Ok((1..=k_max).map(|k| it.max_degree(k)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapkit::builtin_toda3;

    #[test]
    fn first_iterate_is_the_map() {
        let m = builtin_toda3();
        let it = iterate(&m, 1, DEFAULT_TERM_CEILING).unwrap();
        assert_eq!(it.step(1).unwrap(), m.components().to_vec());
    }

    #[test]
    fn second_iterate_matches_composition() {
        let m = builtin_toda3();
        let it = iterate(&m, 2, DEFAULT_TERM_CEILING).unwrap();
        let direct = m.compose_with(m.components()).unwrap();
        assert_eq!(it.step(2).unwrap(), direct);
    }
}
