use ivpp_core::ivpp::{
    builtin_gamma_table, check_period2, derive_ivpp, seed_ledger, verify_ivpp, Derivation, IVPPCandidate,
    PeriodicityWitness, VerifyOptions,
};
use ivpp_core::mapkit::{builtin, builtin_names, verify_invariants};
use ivpp_core::sctrace::{numeric_probe, Tracer};
use ivpp_core::sigma::{eliminate_triangular, verify_param};
use ivpp_core::symcore::{parse_poly, Scalar, VarSet};
use ivpp_core::{Error, Result};
use serde_json::json;

use crate::config::{
    parse_order, parse_periods, parse_scalar, DeriveArgs, MapArgs, NumericArgs, OutputArgs, ParamArgs, ProbeArgs,
    SolveArgs, TraceArgs,
};

fn emit(v: serde_json::Value) {
    println!("{v}");
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn maps_list(out: &OutputArgs) -> Result<u8> {
    for name in builtin_names() {
        let m = builtin(name).expect("listed maps exist");
        if out.machine() {
            emit(json!({"name": name, "dim": m.dim(), "invariants": m.invariant_names()}));
        } else {
            println!("{name}  (d = {}, invariants {})", m.dim(), m.invariant_names().join(" "));
        }
    }
    Ok(0)
}

pub fn maps_show(map: &MapArgs) -> Result<u8> {
    print!("{}", map.load()?.to_document());
    Ok(0)
}

pub fn invariants_verify(map: &MapArgs, out: &OutputArgs) -> Result<u8> {
    let m = map.load()?;
    let reports = verify_invariants(&m)?;
    let mut all = true;
    for r in &reports {
        all &= r.passed();
        if out.machine() {
            emit(json!({"invariant": r.name, "passed": r.passed(), "residual": r.residual.to_string()}));
        } else if r.passed() {
            println!("PASS {}", r.name);
        } else {
            println!("FAIL {}  residual {}", r.name, r.residual);
        }
    }
    Ok(if all { 0 } else { 1 })
}

pub fn sigma_build(param: &ParamArgs, out: &OutputArgs) -> Result<u8> {
    let m = param.map.load()?;
    let c = param.conditions(&m)?;
    let name = &m.component_names()[c.component];
    for (k, z) in c.zero_conditions.iter().enumerate() {
        if out.machine() {
            emit(json!({"condition": "zero", "step": k + 1, "component": name, "poly": z.to_string()}));
        } else {
            println!("D{name}^({}) = {z} = 0", k + 1);
        }
    }
    for (h, v) in &c.invariant_conditions {
        if out.machine() {
            emit(json!({"condition": "invariant", "value": v, "poly": h.to_string()}));
        } else {
            println!("{h} = {v}");
        }
    }
    Ok(0)
}

pub fn sigma_verify(param: &ParamArgs, out: &OutputArgs) -> Result<u8> {
    let m = param.map.load()?;
    let c = param.conditions(&m)?;
    let p = param.parameterization(&m)?;
    let rep = verify_param(&c, &p)?;
    for (k, r) in rep.zero_residuals.iter().enumerate() {
        if out.machine() {
            emit(json!({"condition": "zero", "step": k + 1, "passed": r.is_zero(), "residual": r.to_string()}));
        } else {
            println!("{} zero condition {}  residual {r}", status(r.is_zero()), k + 1);
        }
    }
    for (name, r) in &rep.invariant_residuals {
        if out.machine() {
            emit(json!({"condition": "invariant", "value": name, "passed": r.is_zero(), "residual": r.to_string()}));
        } else {
            println!("{} {name}  residual {r}", status(r.is_zero()));
        }
    }
    Ok(if rep.passed() { 0 } else { 1 })
}

pub fn sigma_solve(args: &SolveArgs) -> Result<u8> {
    let pa = ParamArgs {
        map: args.map.clone(),
        component: args.component.clone(),
        param_file: None,
        order: None,
    };
    let m = args.map.load()?;
    let c = pa.conditions(&m)?;
    let e = eliminate_triangular(&c, &parse_order(&m, &args.order)?)?;
    if args.out.machine() {
        for (k, v) in e.param.values.iter().enumerate() {
            emit(json!({"coord": k + 1, "value": v.to_string()}));
        }
        emit(json!({"excluded": e.excluded.iter().map(|p| p.to_string()).collect::<Vec<_>>()}));
    } else {
        print!("{}", e.param.to_text());
        for p in &e.excluded {
            println!("# generic: assumes {p} != 0");
        }
    }
    Ok(0)
}

pub fn sc_trace(args: &TraceArgs) -> Result<u8> {
    if args.kmax == 0 {
        return Err(Error::InvalidInput("--kmax must be at least 1".into()));
    }
    let m = args.param.map.load()?;
    let p = args.param.parameterization(&m)?;
    let i = args.param.component(&m)?;
    let mut tr = Tracer::new(&m, &p, args.param.map.term_ceiling)?;
    tr.extend_to(args.kmax)?;
    let rep = tr.report();
    if args.out.machine() {
        print!("{}", rep.to_json_lines());
    } else {
        println!("singular variety of component {}", m.component_names()[i]);
        print!("{}", rep.to_table());
    }
    Ok(0)
}

pub fn sc_probe(args: &ProbeArgs) -> Result<u8> {
    let m = args.param.map.load()?;
    let p = args.param.parameterization(&m)?;
    let i = args.param.component(&m)?;
    let h: Vec<Scalar> = args.h.split(',').map(parse_scalar).collect::<Result<_>>()?;
    let delta = parse_scalar(&args.delta)?;
    if delta.is_zero() {
        return Err(Error::InvalidInput("--delta must be nonzero".into()));
    }
    let prof = numeric_probe(&m, &p, i, &h, &delta, args.steps)?;
    for (k, x) in prof.iter().enumerate() {
        if args.out.machine() {
            emit(json!({"k": k, "max_abs": x.to_string(), "approx": format!("{:.6e}", x.to_f64())}));
        } else {
            println!("{k:>3}  {:.6e}", x.to_f64());
        }
    }
    Ok(0)
}

pub fn derive(args: &DeriveArgs) -> Result<u8> {
    let periods = parse_periods(&args.period)?;
    let m = args.param.map.load()?;
    let p = args.param.parameterization(&m)?;
    let comp = args.param.component(&m)?;
    let mut tr = Tracer::new(&m, &p, args.param.map.term_ceiling)?;
    let mut ledger = seed_ledger(&p)?;
    let mut code = 0;
    let last = *periods.last().expect("nonempty");
    // Lower periods are derived first even when not requested: their
    // polynomials join the ledger that later periods are stripped against.
    for n in 2..=last {
        let wanted = periods.contains(&n);
        match derive_ivpp(&mut tr, &mut ledger, n, comp) {
            Ok(c) if wanted => print_candidate(&c, args.out.machine()),
            Ok(_) => {}
            Err(e @ Error::ResourceCutoff { .. }) => return Err(e),
            Err(e) if wanted => {
                code = 1;
                if args.out.machine() {
                    emit(json!({"period": n, "error": e.to_string()}));
                } else {
                    eprintln!("period {n}: {e}");
                }
            }
            Err(_) => {}
        }
    }
    Ok(code)
}

fn print_candidate(c: &IVPPCandidate, machine: bool) {
    if machine {
        emit(c.to_json());
        return;
    }
    println!("period {}:", c.period);
    for (g, parts) in c.gammas.iter().zip(&c.multiplicities) {
        let raw: Vec<String> = parts
            .iter()
            .map(|(q, e)| if *e == 1 { format!("({q})") } else { format!("({q})^{e}") })
            .collect();
        if parts.len() == 1 && parts[0].1 == 1 {
            println!("  {g} = 0");
        } else {
            println!("  {g} = 0    [from {}]", raw.join("*"));
        }
    }
}

pub fn verify(map: &MapArgs, period: usize, gammas: &[String], numeric: &NumericArgs, out: &OutputArgs) -> Result<u8> {
    let opts = VerifyOptions {
        samples: numeric.samples,
        tol: numeric.tol,
        digits: numeric.digits,
        seed: numeric.seed,
        ..Default::default()
    };
    if numeric.samples == 0 || numeric.tol.is_nan() || numeric.tol <= 0.0 || numeric.digits < 10 {
        return Err(Error::InvalidInput("need samples >= 1, tol > 0 and digits >= 10".into()));
    }
    let m = map.load()?;
    let witnesses = if period == 2 && gammas.is_empty() {
        if !map.is_builtin_toda() {
            return Err(Error::InvalidInput("the period-2 surfaces ship for the built-in Toda map only".into()));
        }
        check_period2(&opts)?
    } else {
        let cand = if gammas.is_empty() {
            if !map.is_builtin_toda() {
                return Err(Error::InvalidInput("give the candidate with --gamma twice".into()));
            }
            builtin_gamma_table()
                .into_iter()
                .find(|c| c.period == period)
                .ok_or_else(|| Error::InvalidInput(format!("no shipped pair for period {period}; use --gamma")))?
        } else {
            let hv = VarSet::new(&m.invariant_names())?;
            let gs = gammas.iter().map(|g| parse_poly(g, &hv)).collect::<Result<Vec<_>>>()?;
            IVPPCandidate::new(period, gs, Derivation::Fixture)
        };
        verify_ivpp(&m, &cand, &opts)?
    };
    print_witnesses(period, &witnesses, numeric, out.machine());
    Ok(0)
}

fn print_witnesses(period: usize, ws: &[PeriodicityWitness], numeric: &NumericArgs, machine: bool) {
    let worst = ws.iter().map(|w| w.residual).fold(0.0, f64::max);
    let closest = ws
        .iter()
        .flat_map(|w| w.minimality.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let drift = ws.iter().map(|w| w.invariant_residual).fold(0.0, f64::max);
    let digits = (numeric.digits as usize).min(30);
    if machine {
        for w in ws {
            emit(w.to_json(digits));
        }
        emit(json!({
            "period": period,
            "witnesses": ws.len(),
            "max_residual": format!("{worst:.3e}"),
            "min_minimality": if closest.is_finite() { format!("{closest:.3e}") } else { "none".into() },
            "max_invariant_residual": format!("{drift:.3e}"),
        }));
    } else {
        println!(
            "period {period}: {} witnesses at tol {:e}, {} digits, seed {}",
            ws.len(),
            numeric.tol,
            numeric.digits,
            numeric.seed
        );
        println!("  max |F^{period}(x) - x| (relative)   {worst:.3e}");
        if closest.is_finite() {
            println!("  min |F^j(x) - x|, j < {period}        {closest:.3e}");
        }
        println!("  max invariant drift               {drift:.3e}");
        if let Some(w) = ws.first() {
            let pt: Vec<String> = w.point.iter().map(|z| z.to_decimal(12)).collect();
            println!("  first point: ({})", pt.join(", "));
        }
    }
}
