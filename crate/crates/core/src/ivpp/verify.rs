//! Numeric periodicity checks at multiprecision.
//!
//! A sample fixes all but two invariant values at random rationals, solves
//! the two candidate equations for the remaining pair through a resultant
//! and back-substitution, builds a point on the corresponding level set of
//! the invariants, and iterates the map on it.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::IVPPCandidate;
use crate::error::{Error, Result};
use crate::mapkit::{builtin_toda3, RationalMap};
use crate::numeric::{bits_for_digits, level_set_point, roots, CompiledPoly, CompiledRat, MpComplex};
use crate::symcore::{resultant, squarefree_part, Poly, Scalar, VarSet};

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub samples: usize,
    /// Relative tolerance on periodicity residuals.
    pub tol: f64,
    /// Working precision in decimal digits.
    pub digits: u32,
    pub seed: u64,
    /// Bound on numerator and denominator of random rationals.
    pub height: i64,
    /// Names of the solved variable and the eliminated variable; chosen
    /// automatically when absent.
    pub unknowns: Option<(String, String)>,
    /// Attempts before giving up; `0` means `10 * samples + 20`.
    pub max_attempts: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 20,
            tol: 1e-9,
            digits: 50,
            seed: 1,
            height: 20,
            unknowns: None,
            max_attempts: 0,
        }
    }
}

impl VerifyOptions {
    fn attempts(&self) -> usize {
        if self.max_attempts == 0 {
            10 * self.samples + 20
        } else {
            self.max_attempts
        }
    }
}

#[derive(Clone, Debug)]
pub struct PeriodicityWitness {
    /// Attempt index the witness came from.
    pub sample: usize,
    /// Invariant values (empty for the period-2 surface check).
    pub h: Vec<MpComplex>,
    pub point: Vec<MpComplex>,
    pub period: usize,
    /// `max_i |F^n(x)_i - x_i| / max(1, |x_i|)`.
    pub residual: f64,
    /// The same quantity for `F^j`, `j = 1..n-1`.
    pub minimality: Vec<f64>,
    /// `max_k |H_k(F(x)) - H_k(x)| / max(1, |H_k(x)|)`.
    pub invariant_residual: f64,
}

impl PeriodicityWitness {
    pub fn to_json(&self, digits: usize) -> serde_json::Value {
        let fmt = |v: &[MpComplex]| v.iter().map(|z| z.to_decimal(digits)).collect::<Vec<_>>();
        serde_json::json!({
            "sample": self.sample,
            "period": self.period,
            "h": fmt(&self.h),
            "point": fmt(&self.point),
            "residual": format!("{:.3e}", self.residual),
            "minimality": self.minimality.iter().map(|r| format!("{r:.3e}")).collect::<Vec<_>>(),
            "invariant_residual": format!("{:.3e}", self.invariant_residual),
        })
    }
}

fn random_rational<R: Rng>(rng: &mut R, height: i64) -> Scalar {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-height..=height);
    }
    Scalar::new(n, rng.gen_range(1..=height))
}

fn sample_rng(seed: u64, attempt: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt as u64);
    rng
}

/// Numeric map, invariants and orbit residuals at a fixed precision.
struct Orbit {
    comps: Vec<CompiledRat<MpComplex>>,
    invs: Vec<CompiledPoly<MpComplex>>,
    floor: f64,
}

impl Orbit {
    fn new(map: &RationalMap, prec: usize, digits: u32) -> Orbit {
        Orbit {
            comps: map.components().iter().map(|c| CompiledRat::new(c, prec)).collect(),
            invs: map.invariants().iter().map(|(_, h)| CompiledPoly::new(h, prec)).collect(),
            floor: 10f64.powi(-(digits as i32) + 10),
        }
    }

    fn step(&self, x: &[MpComplex]) -> Option<Vec<MpComplex>> {
        self.comps.iter().map(|c| c.eval(x, self.floor)).collect()
    }

    fn distance(a: &[MpComplex], b: &[MpComplex]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(p, q)| (p - q).abs_f64() / q.abs_f64().max(1.0))
            .fold(0.0, f64::max)
    }

    /// Residuals of `F^j(x)` against `x` for `j = 1..=n`, or `None` at a pole.
    fn residuals(&self, x: &[MpComplex], n: usize) -> Option<Vec<f64>> {
        let mut cur = x.to_vec();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            cur = self.step(&cur)?;
            out.push(Orbit::distance(&cur, x));
        }
        Some(out)
    }

    fn invariant_drift(&self, x: &[MpComplex]) -> Option<f64> {
        let y = self.step(x)?;
        Some(
            self.invs
                .iter()
                .map(|h| {
                    let a = h.eval(x);
                    let b = h.eval(&y);
                    (&b - &a).abs_f64() / a.abs_f64().max(1.0)
                })
                .fold(0.0, f64::max),
        )
    }

    fn witness(&self, x: Vec<MpComplex>, h: Vec<MpComplex>, n: usize, tol: f64, sample: usize) -> Option<std::result::Result<PeriodicityWitness, f64>> {
        let res = self.residuals(&x, n)?;
        let residual = res[n - 1];
        let minimality = res[..n - 1].to_vec();
        if residual <= tol && minimality.iter().all(|r| *r > tol) {
            let invariant_residual = self.invariant_drift(&x)?;
            Some(Ok(PeriodicityWitness {
                sample,
                h,
                point: x,
                period: n,
                residual,
                minimality,
                invariant_residual,
            }))
        } else {
            Some(Err(residual))
        }
    }
}

/// Coefficients (low to high) of a polynomial that depends on `var` only.
fn univariate(p: &Poly, var: usize) -> Vec<Scalar> {
    let d = p.degree_in(var) as usize;
    let mut c = vec![Scalar::zero(); d + 1];
    for t in p.terms() {
        c[t.exps[var] as usize] = t.coeff.clone();
    }
    c
}

fn horner(c: &[MpComplex], z: &MpComplex) -> MpComplex {
    let mut acc = c.last().cloned().unwrap();
    for a in c[..c.len() - 1].iter().rev() {
        acc = &(&acc * z) + a;
    }
    acc
}

/// Drops leading coefficients that vanish to working accuracy.
fn trim(mut c: Vec<MpComplex>, rel: f64) -> Vec<MpComplex> {
    let scale = c.iter().map(|z| z.abs_f64()).fold(0.0, f64::max);
    while c.len() > 1 && c.last().unwrap().abs_f64() <= rel * scale {
        c.pop();
    }
    c
}

/// How the two candidate equations are solved.
struct Plan {
    g: [Poly; 2],
    /// `Res_w(g1, g2)`, a polynomial free of `w`.
    res: Poly,
    u: usize,
    w: usize,
    free: Vec<usize>,
}

fn lex_last(vars: &VarSet, among: &[usize]) -> Option<usize> {
    among.iter().copied().max_by(|a, b| vars.name(*a).cmp(vars.name(*b)))
}

fn plan(gammas: &[Poly], unknowns: &Option<(String, String)>) -> Result<Plan> {
    if gammas.len() != 2 {
        return Err(Error::InvalidInput(format!(
            "numeric verification solves two equations, candidate has {}",
            gammas.len()
        )));
    }
    if gammas.iter().any(|g| g.is_constant()) {
        return Err(Error::InvalidInput("candidate polynomials must be nonconstant".into()));
    }
    let vars = gammas[0].vars().clone();
    if vars.len() < 2 {
        return Err(Error::InvalidInput("need at least two invariants".into()));
    }
    let g = [squarefree_part(&gammas[0])?, squarefree_part(&gammas[1])?];
    let (u, w) = match unknowns {
        Some((a, b)) => {
            let find = |n: &str| {
                vars.index_of(n)
                    .ok_or_else(|| Error::InvalidInput(format!("unknown variable `{n}`")))
            };
            (find(a)?, find(b)?)
        }
        None => {
            let s0 = g[0].support();
            let s1 = g[1].support();
            let shared: Vec<usize> = s0.iter().copied().filter(|v| s1.contains(v)).collect();
            let w = if shared.is_empty() {
                let mut all = s0.clone();
                all.extend(s1.iter().copied());
                lex_last(&vars, &all)
            } else {
                lex_last(&vars, &shared)
            }
            .expect("nonconstant gammas have support");
            let r = resultant(&g[0], &g[1], w)?;
            let cands: Vec<usize> = r.support().into_iter().filter(|v| *v != w).collect();
            let low = cands.iter().map(|v| r.degree_in(*v)).min();
            let u = low
                .and_then(|m| {
                    let tied: Vec<usize> = cands.iter().copied().filter(|v| r.degree_in(*v) == m).collect();
                    lex_last(&vars, &tied)
                })
                .ok_or_else(|| Error::InvalidInput("the candidate equations do not determine a finite set".into()))?;
            (u, w)
        }
    };
    if u == w {
        return Err(Error::InvalidInput("solved and eliminated variables coincide".into()));
    }
    let res = resultant(&g[0], &g[1], w)?;
    if res.is_zero() {
        return Err(Error::InvalidInput("candidate polynomials share a factor".into()));
    }
    let free = (0..vars.len()).filter(|v| *v != u && *v != w).collect();
    Ok(Plan { g, res, u, w, free })
}

enum Attempt {
    Degenerate,
    Witness(PeriodicityWitness),
    Failed(String),
}

struct Sampler<'a> {
    plan: Plan,
    orbit: Orbit,
    invariants: Vec<Poly>,
    period: usize,
    opts: &'a VerifyOptions,
    prec: usize,
}

impl Sampler<'_> {
    /// All solutions `h` of the two equations with the free values fixed.
    fn solve(&self, free_vals: &[(usize, Scalar)]) -> Result<Option<Vec<Vec<MpComplex>>>> {
        let prec = self.prec;
        let rel = 10f64.powi(-(self.opts.digits as i32) + 10);
        let fix = |p: &Poly| {
            free_vals.iter().fold(p.clone(), |q, (v, s)| q.eval_var(*v, s))
        };
        let ru = fix(&self.plan.res);
        if ru.is_zero() || ru.degree_in(self.plan.u) == 0 {
            return Ok(None);
        }
        let ru = squarefree_part(&ru)?;
        let cu: Vec<MpComplex> = univariate(&ru, self.plan.u)
            .iter()
            .map(|c| MpComplex::from_scalar(c, prec))
            .collect();
        let us = roots(&cu, prec)?;
        let coeffs: Vec<Vec<Vec<MpComplex>>> = self
            .plan
            .g
            .iter()
            .map(|g| {
                fix(g)
                    .coeffs_in(self.plan.w)
                    .iter()
                    .map(|c| {
                        univariate(c, self.plan.u)
                            .iter()
                            .map(|s| MpComplex::from_scalar(s, prec))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let nv = self.plan.g[0].vars().len();
        let mut out = Vec::new();
        for u0 in &us {
            let polys: Vec<Vec<MpComplex>> = coeffs
                .iter()
                .map(|cs| trim(cs.iter().map(|c| horner(c, u0)).collect(), rel))
                .collect();
            let mut order: Vec<usize> = (0..2).filter(|i| polys[*i].len() > 1).collect();
            order.sort_by_key(|i| polys[*i].len());
            let Some(&main) = order.first() else {
                continue;
            };
            let other = 1 - main;
            for w0 in roots(&polys[main], prec)? {
                let val = horner(&polys[other], &w0);
                let scale: f64 = polys[other]
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c.abs_f64() * w0.abs_f64().powi(k as i32))
                    .sum();
                if val.abs_f64() > rel.sqrt() * scale.max(f64::MIN_POSITIVE) {
                    continue;
                }
                let mut h = vec![MpComplex::zero(prec); nv];
                for (v, s) in free_vals {
                    h[*v] = MpComplex::from_scalar(s, prec);
                }
                h[self.plan.u] = u0.clone();
                h[self.plan.w] = w0;
                out.push(h);
            }
        }
        Ok(Some(out))
    }

    fn attempt(&self, a: usize) -> Result<Attempt> {
        let mut rng = sample_rng(self.opts.seed, a);
        let free_vals: Vec<(usize, Scalar)> = self
            .plan
            .free
            .iter()
            .map(|v| (*v, random_rational(&mut rng, self.opts.height)))
            .collect();
        let Some(hs) = self.solve(&free_vals)? else {
            return Ok(Attempt::Degenerate);
        };
        let mut built = 0;
        let mut best = f64::INFINITY;
        for h in hs {
            for _ in 0..3 {
                let Some(x) = level_set_point(&self.invariants, &h, self.prec, &mut rng) else {
                    continue;
                };
                match self.orbit.witness(x, h.clone(), self.period, self.opts.tol, a) {
                    None => continue,
                    Some(Ok(w)) => return Ok(Attempt::Witness(w)),
                    Some(Err(r)) => {
                        built += 1;
                        best = best.min(r);
                        break;
                    }
                }
            }
        }
        if built == 0 {
            return Ok(Attempt::Degenerate);
        }
        let vals: Vec<String> = free_vals
            .iter()
            .map(|(v, s)| format!("{}={}", self.plan.g[0].vars().name(*v), s))
            .collect();
        Ok(Attempt::Failed(format!(
            "sample {a} ({}): {built} point(s) built, none has minimal period {} (smallest residual {best:.3e})",
            vals.join(", "),
            self.period
        )))
    }
}

/// Samples points on the candidate variety and checks that they have
/// minimal period `candidate.period`. Fails on the first sample none of
/// whose solutions verifies, or when too many samples are degenerate.
pub fn verify_ivpp(
    map: &RationalMap,
    candidate: &IVPPCandidate,
    opts: &VerifyOptions,
) -> Result<Vec<PeriodicityWitness>> {
    let n = candidate.period;
    if n < 1 {
        return Err(Error::InvalidInput("period must be positive".into()));
    }
    let hnames = map.invariant_names();
    if candidate.gammas.first().map(|g| g.vars().names().to_vec()) != Some(hnames.clone()) {
        return Err(Error::VarsetMismatch("candidate polynomials must be over the map's invariant names".into()));
    }
    let prec = bits_for_digits(opts.digits);
    let sampler = Sampler {
        plan: plan(&candidate.gammas, &opts.unknowns)?,
        orbit: Orbit::new(map, prec, opts.digits),
        invariants: map.invariants().iter().map(|(_, h)| h.clone()).collect(),
        period: n,
        opts,
        prec,
    };
    let mut witnesses = Vec::new();
    let mut degenerate = 0;
    let mut next = 0;
    let limit = opts.attempts();
    while witnesses.len() < opts.samples && next < limit {
        let batch = (opts.samples - witnesses.len()).max(4).min(limit - next);
        let results = crate::par::map_range(batch, |i| sampler.attempt(next + i));
        next += batch;
        for r in results {
            match r? {
                Attempt::Degenerate => degenerate += 1,
                Attempt::Witness(w) => {
                    if witnesses.len() < opts.samples {
                        witnesses.push(w);
                    }
                }
                Attempt::Failed(msg) => return Err(Error::Verification(msg)),
            }
        }
    }
    if witnesses.len() < opts.samples {
        return Err(Error::Verification(format!(
            "only {} of {} samples verified after {next} attempts; {degenerate} slices were degenerate \
             (no finite solution, or every orbit built on them met a pole)",
            witnesses.len(),
            opts.samples
        )));
    }
    Ok(witnesses)
}

/// Points on the three period-2 surfaces of the Toda map: random rational
/// `(x, y, z)`, all root combinations of the three cubics, one witness per
/// slice with `|F^2(x) - x| <= tol < |F(x) - x|`.
pub fn check_period2(opts: &VerifyOptions) -> Result<Vec<PeriodicityWitness>> {
    let map = builtin_toda3();
    let surfaces = super::builtin_period2_surfaces();
    let prec = bits_for_digits(opts.digits);
    let orbit = Orbit::new(&map, prec, opts.digits);
    let attempt = |a: usize| -> Result<Option<PeriodicityWitness>> {
        let mut rng = sample_rng(opts.seed, a);
        let xyz: Vec<Scalar> = (0..3).map(|_| random_rational(&mut rng, opts.height)).collect();
        let mut rootsets = Vec::with_capacity(3);
        for (k, s) in surfaces.iter().enumerate() {
            let q = (0..3).fold(s.clone(), |q, v| q.eval_var(v, &xyz[v]));
            if q.degree_in(3 + k) != 3 {
                return Ok(None);
            }
            let c: Vec<MpComplex> = univariate(&q, 3 + k).iter().map(|c| MpComplex::from_scalar(c, prec)).collect();
            rootsets.push(roots(&c, prec)?);
        }
        let base: Vec<MpComplex> = xyz.iter().map(|s| MpComplex::from_scalar(s, prec)).collect();
        for u in &rootsets[0] {
            for v in &rootsets[1] {
                for w in &rootsets[2] {
                    let mut x = base.clone();
                    x.extend([u.clone(), v.clone(), w.clone()]);
                    if let Some(Ok(wit)) = orbit.witness(x, Vec::new(), 2, opts.tol, a) {
                        return Ok(Some(wit));
                    }
                }
            }
        }
        Ok(None)
    };
    let mut out = Vec::new();
    let mut next = 0;
    let limit = opts.attempts();
    while out.len() < opts.samples && next < limit {
        let batch = (opts.samples - out.len()).max(4).min(limit - next);
        let results = crate::par::map_range(batch, |i| attempt(next + i));
        next += batch;
        for r in results {
            if let Some(w) = r? {
                if out.len() < opts.samples {
                    out.push(w);
                }
            }
        }
    }
    if out.len() < opts.samples {
        return Err(Error::Verification(format!(
            "only {} of {} period-2 witnesses after {next} slices",
            out.len(),
            opts.samples
        )));
    }
    Ok(out)
}
