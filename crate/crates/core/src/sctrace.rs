//! Restriction of the iterates to a parameterized singular variety: status
//! of every component along the orbit, the recovery step, and the orbit in
//! invariant space once it is finite again.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mapkit::{IterateSet, RationalMap};
use crate::sigma::Parameterization;
use crate::symcore::{substitute_cleared, Poly, RatFunc, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Tag {
    #[serde(rename = "FIN")]
    Fin,
    #[serde(rename = "INF")]
    Inf,
    #[serde(rename = "IND")]
    Ind,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tag::Fin => "FIN",
            Tag::Inf => "INF",
            Tag::Ind => "IND",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompStatus {
    pub tag: Tag,
    /// Present exactly when `tag` is [`Tag::Fin`].
    pub value: Option<RatFunc>,
}

impl CompStatus {
    /// Classifies from whether the substituted numerator and denominator
    /// vanish identically.
    pub fn classify(num_zero: bool, den_zero: bool, value: impl FnOnce() -> RatFunc) -> CompStatus {
        match (num_zero, den_zero) {
            (_, false) => CompStatus {
                tag: Tag::Fin,
                value: Some(value()),
            },
            (false, true) => CompStatus {
                tag: Tag::Inf,
                value: None,
            },
            (true, true) => CompStatus {
                tag: Tag::Ind,
                value: None,
            },
        }
    }

    pub fn is_fin(&self) -> bool {
        self.tag == Tag::Fin
    }

    fn label(&self) -> String {
        match &self.value {
            Some(v) => v.to_string(),
            None => self.tag.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitStep {
    pub k: usize,
    pub statuses: Vec<CompStatus>,
}

impl OrbitStep {
    pub fn all_fin(&self) -> bool {
        self.statuses.iter().all(CompStatus::is_fin)
    }

    /// The finite values of an all-finite step.
    pub fn values(&self) -> Option<Vec<RatFunc>> {
        self.statuses.iter().map(|s| s.value.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SCReport {
    pub component_names: Vec<String>,
    /// Step 0 is the parameterization itself.
    pub steps: Vec<OrbitStep>,
    pub recovery_index: Option<usize>,
    pub sc_steps: Option<usize>,
}

#[derive(Serialize)]
struct Record<'a> {
    k: usize,
    component: &'a str,
    tag: Tag,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<String>,
}

impl SCReport {
    /// Status table, one row per step.
    pub fn to_table(&self) -> String {
        let mut rows: Vec<Vec<String>> = vec![std::iter::once("k".to_string())
            .chain(self.component_names.iter().cloned())
            .collect()];
        for st in &self.steps {
            rows.push(
                std::iter::once(st.k.to_string())
                    .chain(st.statuses.iter().map(CompStatus::label))
                    .collect(),
            );
        }
        let ncol = rows[0].len();
        let widths: Vec<usize> = (0..ncol)
            .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for r in &rows {
            let cells: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:<w$}"))
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        match (self.recovery_index, self.sc_steps) {
            (Some(k), Some(m)) => out.push_str(&format!("recovery k* = {k}, m = {m}\n")),
            _ => out.push_str("recovery: none within kmax\n"),
        }
        out
    }

    /// One JSON object per `(k, component)`, then a summary line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for st in &self.steps {
            for (name, s) in self.component_names.iter().zip(&st.statuses) {
                let rec = Record {
                    k: st.k,
                    component: name,
                    tag: s.tag,
                    value: s.value.as_ref().map(|v| v.to_string()),
                };
                out.push_str(&serde_json::to_string(&rec).expect("record serializes"));
                out.push('\n');
            }
        }
        let summary = serde_json::json!({
            "recovery_index": self.recovery_index,
            "sc_steps": self.sc_steps,
        });
        out.push_str(&summary.to_string());
        out.push('\n');
        out
    }
}

/// Value of one factor of the factor base at the base point.
#[derive(Clone, Debug)]
struct FactorImage {
    cleared: Poly,
    value: RatFunc,
}

#[derive(Clone, Debug)]
struct StepData {
    statuses: Vec<CompStatus>,
    /// Cleared numerator of each substituted denominator, normalized; zero
    /// when the denominator vanishes identically.
    den_records: Vec<Poly>,
}

/// Incremental restriction engine. Steps right after an all-finite step are
/// taken directly in invariant space; otherwise the x-space iterate
/// `F^(k-j)` is restricted to the last all-finite point `p^(j)`.
pub struct Tracer {
    map: RationalMap,
    param: Parameterization,
    iterates: IterateSet,
    base: usize,
    images: HashMap<usize, FactorImage>,
    steps: Vec<StepData>,
}

fn normalized(p: Poly) -> Poly {
    if p.is_zero() {
        p
    } else {
        crate::symcore::gcd::normalize(&p)
    }
}

impl Tracer {
    pub fn new(map: &RationalMap, param: &Parameterization, term_ceiling: usize) -> Result<Tracer> {
        if param.values.len() != map.dim() {
            return Err(Error::VarsetMismatch(format!(
                "parameterization has {} coordinates, map has {}",
                param.values.len(),
                map.dim()
            )));
        }
        let hv = &param.hvars;
        let start = StepData {
            statuses: param
                .values
                .iter()
                .map(|v| CompStatus {
                    tag: Tag::Fin,
                    value: Some(v.clone()),
                })
                .collect(),
            den_records: vec![Poly::one(hv); map.dim()],
        };
        Ok(Tracer {
            map: map.clone(),
            param: param.clone(),
            iterates: IterateSet::new(map, term_ceiling)?,
            base: 0,
            images: HashMap::new(),
            steps: vec![start],
        })
    }

    pub fn map(&self) -> &RationalMap {
        &self.map
    }

    pub fn param(&self) -> &Parameterization {
        &self.param
    }

    /// Number of steps computed so far, not counting step 0.
    pub fn len(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn statuses(&self, k: usize) -> &[CompStatus] {
        &self.steps[k].statuses
    }

    pub fn extend_to(&mut self, k_max: usize) -> Result<()> {
        while self.len() < k_max {
            self.advance()?;
        }
        Ok(())
    }

    /// The cleared numerator of the substituted denominator of component `j`
    /// at step `k`, primitive with positive leading coefficient.
    pub fn denominator_at(&mut self, k: usize, j: usize) -> Result<Poly> {
        if k == 0 {
            return Err(Error::InvalidInput("step 0 has no denominator".into()));
        }
        self.extend_to(k)?;
        let rec = &self.steps[k].den_records[j];
        if rec.is_zero() {
            return Err(Error::VanishingDenominator { step: k, component: j });
        }
        Ok(rec.clone())
    }

    pub fn report(&self) -> SCReport {
        let steps: Vec<OrbitStep> = self
            .steps
            .iter()
            .enumerate()
            .map(|(k, s)| OrbitStep {
                k,
                statuses: s.statuses.clone(),
            })
            .collect();
        let recovery_index = steps.iter().skip(1).find(|s| s.all_fin()).map(|s| s.k);
        SCReport {
            component_names: self.map.component_names().to_vec(),
            steps,
            recovery_index,
            sc_steps: recovery_index.map(|k| k - 1),
        }
    }

    fn advance(&mut self) -> Result<()> {
        let k = self.steps.len();
        let prev = &self.steps[k - 1];
        let data = if prev.statuses.iter().all(CompStatus::is_fin) {
            let point: Vec<RatFunc> = prev.statuses.iter().map(|s| s.value.clone().unwrap()).collect();
            if self.base != k - 1 {
                self.base = k - 1;
                self.images.clear();
            }
            h_step(&self.map, &point)?
        } else {
            self.x_step(k - self.base)?
        };
        log::debug!("step {k} done");
        self.steps.push(data);
        Ok(())
    }

    fn base_point(&self) -> Vec<Option<RatFunc>> {
        self.steps[self.base]
            .statuses
            .iter()
            .map(|s| s.value.clone())
            .collect()
    }

    /// Step `base + l` from the x-space iterate `F^(l)`.
    fn x_step(&mut self, l: usize) -> Result<StepData> {
        self.iterates.extend_to(l)?;
        let d = self.map.dim();
        let comps: Vec<_> = (0..d).map(|j| self.iterates.factored(l, j)).collect();
        let mut needed: Vec<usize> = comps
            .iter()
            .flat_map(|c| {
                c.numerator_factors()
                    .chain(c.denominator_factors())
                    .map(|(i, _)| i)
                    .collect::<Vec<_>>()
            })
            .filter(|i| !self.images.contains_key(i))
            .collect();
        needed.sort_unstable();
        needed.dedup();
        let point = self.base_point();
        let hv = self.param.hvars.clone();
        let fb = self.iterates.factor_base();
        let fresh = crate::par::map(&needed, |&i| -> Result<FactorImage> {
            let c = substitute_cleared(fb.poly(i), &point, &hv)?;
            let cleared = c.num.clone();
            Ok(FactorImage {
                cleared,
                value: c.reduce(),
            })
        });
        for (i, img) in needed.into_iter().zip(fresh) {
            self.images.insert(i, img?);
        }
        let mut statuses = Vec::with_capacity(d);
        let mut den_records = Vec::with_capacity(d);
        for c in &comps {
            let num_zero = c.is_zero() || c.numerator_factors().any(|(i, _)| self.images[&i].value.is_zero());
            let den_zero = c.denominator_factors().any(|(i, _)| self.images[&i].value.is_zero());
            let rec = if den_zero {
                Poly::zero(&hv)
            } else {
                let parts: Vec<Poly> = c
                    .denominator_factors()
                    .map(|(i, e)| self.images[&i].cleared.pow(e))
                    .collect();
                normalized(Poly::product(&hv, &parts))
            };
            den_records.push(rec);
            statuses.push(CompStatus::classify(num_zero, den_zero, || {
                let mut v = RatFunc::constant(&hv, c.unit.clone());
                for (i, e) in c.numerator_factors() {
                    v = v.mul(&self.images[&i].value.pow(e));
                }
                for (i, e) in c.denominator_factors() {
                    let den = self.images[&i].value.pow(e);
                    v = v.div(&den).expect("finite factor value is nonzero");
                }
                v
            }));
        }
        Ok(StepData { statuses, den_records })
    }
}

/// One step of the map applied to a point of invariant space.
fn h_step(map: &RationalMap, point: &[RatFunc]) -> Result<StepData> {
    let hv = point[0].vars().clone();
    let vals: Vec<Option<RatFunc>> = point.iter().cloned().map(Some).collect();
    let per = crate::par::map(map.components(), |c| -> Result<(CompStatus, Poly)> {
        let n = substitute_cleared(c.num(), &vals, &hv)?;
        let dn = substitute_cleared(c.den(), &vals, &hv)?;
        let num_zero = n.num.is_zero();
        let den_zero = dn.num.is_zero();
        let rec = normalized(dn.num.clone());
        let status = CompStatus::classify(num_zero, den_zero, || {
            n.reduce().div(&dn.reduce()).expect("denominator is nonzero")
        });
        Ok((status, rec))
    });
    let mut statuses = Vec::with_capacity(per.len());
    let mut den_records = Vec::with_capacity(per.len());
    for r in per {
        let (s, rec) = r?;
        statuses.push(s);
        den_records.push(rec);
    }
    Ok(StepData { statuses, den_records })
}

/// Restricts `F^(1..=kmax)` to the parameterized variety and classifies
/// every component.
pub fn trace(map: &RationalMap, param: &Parameterization, kmax: usize, term_ceiling: usize) -> Result<SCReport> {
    if kmax == 0 {
        return Err(Error::InvalidInput("kmax must be at least 1".into()));
    }
    let mut t = Tracer::new(map, param, term_ceiling)?;
    t.extend_to(kmax)?;
    Ok(t.report())
}

/// `(k*, m)` from a report.
pub fn detect_recovery(report: &SCReport) -> (Option<usize>, Option<usize>) {
    let k = report.steps.iter().skip(1).find(|s| s.all_fin()).map(|s| s.k);
    (k, k.map(|k| k - 1))
}

/// One point of an invariant-space orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct HStep {
    pub point: Vec<RatFunc>,
    /// Cleared numerator of each substituted denominator, normalized,
    /// before the new point was reduced.
    pub den_records: Vec<Poly>,
}

/// Iterates the map on a finite point of invariant space; entry `s` of the
/// result is the image after `s + 1` steps.
pub fn h_orbit(map: &RationalMap, start: &[RatFunc], steps: usize) -> Result<Vec<HStep>> {
    if start.len() != map.dim() || start.is_empty() {
        return Err(Error::InvalidInput("start point has the wrong dimension".into()));
    }
    let mut out = Vec::with_capacity(steps);
    let mut cur = start.to_vec();
    for s in 1..=steps {
        let data = h_step(map, &cur)?;
        if let Some(j) = data.statuses.iter().position(|st| !st.is_fin()) {
            return Err(Error::VanishingDenominator { step: s, component: j });
        }
        cur = data.statuses.into_iter().map(|st| st.value.unwrap()).collect();
        out.push(HStep {
            point: cur.clone(),
            den_records: data.den_records,
        });
    }
    Ok(out)
}

/// Exact orbit of `p^(0)(h)` with one coordinate of the vanishing
/// denominator of component `i` shifted by `delta`. Returns the largest
/// absolute coordinate at steps `0..=steps`.
pub fn numeric_probe(
    map: &RationalMap,
    param: &Parameterization,
    i: usize,
    h: &[Scalar],
    delta: &Scalar,
    steps: usize,
) -> Result<Vec<Scalar>> {
    if h.len() != param.hvars.len() {
        return Err(Error::InvalidInput("one value per invariant is needed".into()));
    }
    let mut x: Vec<Scalar> = param
        .values
        .iter()
        .map(|v| v.eval(h).map_err(|_| Error::InvalidInput("h lies on a pole of the parameterization".into())))
        .collect::<Result<_>>()?;
    let den = map.components()[i].den();
    // Shift the first coordinate the denominator actually depends on.
    let c = (0..map.dim())
        .find(|&m| den.degree_in(m) > 0 && !den.derivative(m).eval(&x).is_zero())
        .or_else(|| (0..map.dim()).find(|&m| den.degree_in(m) > 0))
        .unwrap_or(0);
    x[c] = &x[c] + delta;
    let mag = |x: &[Scalar]| x.iter().map(Scalar::abs).max().unwrap_or_else(Scalar::zero);
    let mut out = vec![mag(&x)];
    for s in 1..=steps {
        x = match map.apply_point(&x) {
            Ok(y) => y,
            Err(Error::Pole { component }) => return Err(Error::VanishingDenominator { step: s, component }),
            Err(e) => return Err(e),
        };
        out.push(mag(&x));
    }
    Ok(out)
}
