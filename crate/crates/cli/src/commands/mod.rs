mod misc;
mod state;
mod ur;

use anyhow::{bail, Context, Result};
use uncstates_core::reps::{build_rep, OperatorMatrix, RepKind, RepSpec};
use uncstates_core::uncertainty::multimode_quadratures;

use crate::args::{Cli, Command, StateCmd, UrCmd};
use crate::config::RunConfig;
use crate::report::Outcome;

/// Global settings after merging the config file with command-line flags.
pub struct Ctx<'a> {
    pub cli: &'a Cli,
    pub cfg: RunConfig,
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let ctx = Ctx { cli, cfg };
    match &cli.command {
        Command::State(StateCmd::Build(a)) => state::build(&ctx, a),
        Command::Ur(UrCmd::Check(a)) => ur::check(&ctx, a),
        Command::Ur(UrCmd::Scan(a)) | Command::Scan(a) => ur::scan(&ctx, a),
        Command::Ur(UrCmd::AppendixB(a)) | Command::AppendixB(a) => ur::appendix_b(&ctx, a),
        Command::Distance(a) => misc::distance(&ctx, a),
        Command::Dynamics(a) => misc::dynamics(&ctx, a),
        Command::DumpOps(a) => misc::dump_ops(&ctx, a),
        Command::Selftest(a) => misc::selftest(&ctx, a),
    }
}

fn op_names(spec: &str) -> Vec<String> {
    let named: &[&str] = match spec.trim() {
        "qp" => &["q", "p"],
        "x1x2" => &["x1", "x2"],
        "x1x2x3" => &["x1", "x2", "x3"],
        other => return other.split(',').map(|s| s.trim().to_lowercase()).filter(|s| !s.is_empty()).collect(),
    };
    named.iter().map(|s| s.to_string()).collect()
}

/// Resolves an operator tuple on the representation of a state.
pub fn resolve_ops(rep: RepSpec, spec: &str) -> Result<Vec<OperatorMatrix>> {
    if let RepKind::MultiMode { modes } = rep.kind {
        if spec.trim() != "quadratures" {
            bail!("multimode states support only --ops quadratures");
        }
        return Ok(multimode_quadratures(rep.truncation, modes));
    }
    let set = build_rep(&rep)?;
    let names = op_names(spec);
    if names.is_empty() {
        bail!("empty operator list");
    }
    names
        .iter()
        .map(|n| set.by_name(n).cloned().with_context(|| format!("unknown operator {n:?} for {:?}", rep.kind)))
        .collect()
}

/// `2`, `1,3`, `1..3` or `1..=3`.
pub fn parse_orders(s: &str) -> Result<Vec<usize>> {
    let num = |p: &str| p.trim().parse::<usize>().with_context(|| format!("bad order {p:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            bail!("empty order range {s:?}");
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(num).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(parse_orders("2").unwrap(), vec![2]);
        assert_eq!(parse_orders("1,3").unwrap(), vec![1, 3]);
        assert_eq!(parse_orders("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_orders("1..=2").unwrap(), vec![1, 2]);
        assert!(parse_orders("3..1").is_err());
        assert!(parse_orders("x").is_err());
    }

    #[test]
    fn operator_tuples() {
        let heis = RepSpec::heisenberg(16);
        assert_eq!(resolve_ops(heis, "qp").unwrap().len(), 2);
        assert_eq!(resolve_ops(RepSpec::su2(1.0), "x1x2x3").unwrap().len(), 3);
        assert!(resolve_ops(RepSpec::su2(1.0), "q").is_err());
        assert!(resolve_ops(heis, "").is_err());
        let mm = RepSpec::new(RepKind::MultiMode { modes: 2 }, 8).unwrap();
        assert_eq!(resolve_ops(mm, "quadratures").unwrap().len(), 4);
        assert!(resolve_ops(mm, "qp").is_err());
    }
}
