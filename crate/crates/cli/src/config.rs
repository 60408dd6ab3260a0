//! Flags shared by the subcommands and their resolution into library inputs.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use ivpp_core::mapkit::{builtin, builtin_names, iterate, parse_map, RationalMap, DEFAULT_TERM_CEILING};
use ivpp_core::sigma::{build_conditions, builtin_toda_param, eliminate_triangular, Parameterization, SigmaConditions};
use ivpp_core::symcore::Scalar;
use ivpp_core::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// `machine` prints one JSON record per line.
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

impl OutputArgs {
    pub fn machine(&self) -> bool {
        self.format == Format::Machine
    }
}

#[derive(Args, Debug, Clone)]
pub struct MapArgs {
    /// Built-in map name.
    #[arg(long, default_value = "toda3")]
    pub map: String,
    /// Map definition file; overrides `--map`.
    #[arg(long)]
    pub map_file: Option<PathBuf>,
    /// Abort when an intermediate polynomial exceeds this many terms.
    #[arg(long, default_value_t = DEFAULT_TERM_CEILING)]
    pub term_ceiling: usize,
}

impl MapArgs {
    pub fn load(&self) -> Result<RationalMap> {
        match &self.map_file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
                parse_map(&text)
            }
            None => builtin(&self.map).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown map `{}`; built-in maps: {}",
                    self.map,
                    builtin_names().join(", ")
                ))
            }),
        }
    }

    /// Whether the shipped Toda data applies.
    pub fn is_builtin_toda(&self) -> bool {
        self.map_file.is_none() && self.map == "toda3"
    }
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    #[command(flatten)]
    pub map: MapArgs,
    /// Component whose singular variety is used, by name or 0-based index.
    #[arg(long)]
    pub component: Option<String>,
    /// Parameterization file (`hvars ...` then `coord_k = ...` lines).
    #[arg(long)]
    pub param_file: Option<PathBuf>,
    /// Solve order for triangular elimination, comma-separated map
    /// variables; used when no parameterization file is given.
    #[arg(long)]
    pub order: Option<String>,
}

impl ParamArgs {
    pub fn component(&self, map: &RationalMap) -> Result<usize> {
        match &self.component {
            None => Ok(0),
            Some(c) => map
                .component_index(c)
                .or_else(|| c.parse::<usize>().ok().filter(|i| *i < map.dim()))
                .ok_or_else(|| Error::InvalidInput(format!("no component `{c}`"))),
        }
    }

    pub fn conditions(&self, map: &RationalMap) -> Result<SigmaConditions> {
        let i = self.component(map)?;
        let d = map.dim();
        let p = map.invariants().len();
        let it = iterate(map, d.saturating_sub(p).max(1), self.map.term_ceiling)?;
        build_conditions(&it, i)
    }

    /// The parameterization: from a file, by elimination, or the shipped one
    /// for the first component of the built-in Toda map.
    pub fn parameterization(&self, map: &RationalMap) -> Result<Parameterization> {
        if let Some(path) = &self.param_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
            return Parameterization::from_text(&text);
        }
        if let Some(order) = &self.order {
            let cond = self.conditions(map)?;
            return Ok(eliminate_triangular(&cond, &parse_order(map, order)?)?.param);
        }
        if self.map.is_builtin_toda() && self.component(map)? == 0 {
            return Ok(builtin_toda_param());
        }
        Err(Error::InvalidInput(
            "no parameterization: give --param-file or --order".into(),
        ))
    }
}

pub fn parse_order(map: &RationalMap, order: &str) -> Result<Vec<usize>> {
    order
        .split(',')
        .map(|n| {
            let n = n.trim();
            map.vars()
                .index_of(n)
                .ok_or_else(|| Error::InvalidInput(format!("`{n}` is not a map variable")))
        })
        .collect()
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long)]
    pub component: Option<String>,
    /// Comma-separated map variables in solve order.
    #[arg(long)]
    pub order: String,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct TraceArgs {
    #[command(flatten)]
    pub param: ParamArgs,
    #[arg(long, default_value_t = 6)]
    pub kmax: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub param: ParamArgs,
    /// Comma-separated rational invariant values, e.g. `1,1,2,1`.
    #[arg(long)]
    pub h: String,
    /// Rational shift off the singular variety.
    #[arg(long, default_value = "1/1000")]
    pub delta: String,
    #[arg(long, default_value_t = 6)]
    pub steps: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct DeriveArgs {
    #[command(flatten)]
    pub param: ParamArgs,
    /// A period, a list `3,5` or a range `3..6`.
    #[arg(long)]
    pub period: String,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct NumericArgs {
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Relative tolerance on periodicity residuals.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Working precision in decimal digits.
    #[arg(long, default_value_t = 50)]
    pub digits: u32,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

pub fn parse_periods(spec: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidInput(format!("bad period list `{spec}`"));
    let mut out = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() || out[0] == 0 {
        return Err(bad());
    }
    Ok(out)
}

pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let bad = || Error::InvalidInput(format!("bad rational `{s}`"));
    let (n, d) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: i64 = n.parse().map_err(|_| bad())?;
    let d: i64 = d.parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Scalar::new(n, d))
}

/// 0 success, 1 verification or derivation failure, 2 input error, 3
/// resource cutoff.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ResourceCutoff { .. } => 3,
        Error::Verification(_)
        | Error::Derivation(_)
        | Error::Unsolvable { .. }
        | Error::Inconsistent(_)
        | Error::Numeric(_)
        | Error::VanishingDenominator { .. }
        | Error::Indeterminate { .. }
        | Error::Pole { .. } => 1,
        Error::InvalidInput(_)
        | Error::VarsetMismatch(_)
        | Error::DivisionByZero
        | Error::ZeroInput(_)
        | Error::Unassigned(_)
        | Error::Syntax { .. }
        | Error::UnknownIdentifier { .. } => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_lists() {
        assert_eq!(parse_periods("4").unwrap(), vec![4]);
        assert_eq!(parse_periods("3..6").unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(parse_periods("5,3,3").unwrap(), vec![3, 5]);
        assert!(parse_periods("6..3").is_err());
        assert!(parse_periods("x").is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_scalar("1/1000").unwrap(), Scalar::new(1, 1000));
        assert_eq!(parse_scalar("-3").unwrap(), Scalar::from_int(-3));
        assert!(parse_scalar("1/0").is_err());
    }
}
