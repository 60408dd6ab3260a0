//! Canonical text form: terms in descending graded-lex order, explicit `*`
//! and `^`, variables in varset order. The output reparses to the same value.

use std::fmt;

use num_traits::Signed;

use super::poly::Poly;
use super::ratfunc::RatFunc;

fn write_term(out: &mut String, p: &Poly, idx: usize) {
    let t = &p.terms()[idx];
    let vars = p.vars();
    let mut factors: Vec<String> = Vec::new();
    for (i, &e) in t.exps.iter().enumerate() {
        match e {
            0 => {}
            1 => factors.push(vars.name(i).to_string()),
            _ => factors.push(format!("{}^{}", vars.name(i), e)),
        }
    }
    let c = t.coeff.abs();
    let neg = t.coeff.is_negative();
    if idx == 0 {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    let mut parts: Vec<String> = Vec::new();
    if !c.is_one() || factors.is_empty() {
        if c.denom().is_positive() && !c.is_integer() && !factors.is_empty() {
            parts.push(format!("{}/{}", c.numer(), c.denom()));
        } else {
            parts.push(c.to_string());
        }
    }
    parts.extend(factors);
    out.push_str(&parts.join("*"));
}

pub fn poly_to_string(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for i in 0..p.nterms() {
        write_term(&mut out, p, i);
    }
    out
}

fn needs_parens(p: &Poly) -> bool {
    p.nterms() > 1 || p.terms()[0].coeff.is_negative() || !p.terms()[0].coeff.is_integer()
}

pub fn ratfunc_to_string(r: &RatFunc) -> String {
    let n = poly_to_string(r.num());
    if r.den().is_one() {
        return n;
    }
    let d = poly_to_string(r.den());
    let n = if r.num().nterms() > 1 { format!("({n})") } else { n };
    let d = if needs_parens(r.den()) || d.contains('*') {
        format!("({d})")
    } else {
        d
    };
    format!("{n}/{d}")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&poly_to_string(self))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&ratfunc_to_string(self))
    }
}

#[cfg(test)]
mod tests {
    use crate::symcore::{parse_ratfunc, VarSet};

    #[test]
    fn round_trip() {
        let v = VarSet::of(&["r", "t", "f", "g"]);
        for s in [
            "g^2*f/(-g^2*t+f^2*r)",
            "-(r+g)*(-g^2*t+f^2*r)/g^3",
            "-3/7*r*t + 1/2",
            "-g/f",
            "5*r/(2*g*f)",
        ] {
            let a = parse_ratfunc(s, &v).unwrap();
            let printed = a.to_string();
            let b = parse_ratfunc(&printed, &v).unwrap();
            assert_eq!(a, b, "{s} -> {printed}");
        }
    }

    #[test]
    fn explicit_operators() {
        let v = VarSet::of(&["r", "t", "f", "g"]);
        let a = parse_ratfunc("t*f+g", &v).unwrap();
        assert_eq!(a.to_string(), "t*f + g");
        let b = parse_ratfunc("g^2*t - f^2*r", &v).unwrap();
        assert_eq!(b.to_string(), "-r*f^2 + t*g^2");
    }
}
