//! Subcommand registry: each experiment or query implements `Command` and
//! is registered by name; dispatch is a lookup at startup.

use clap::ArgMatches;
use std::path::{Path, PathBuf};

use origami_lab::affine::SurfacePoint;
use origami_lab::hyperbolic::OrbitElement;
use origami_lab::{GeneratorSet, Origami};

use crate::context::{CliError, CliResult, RunContext};

mod experiments;
mod group;
mod spectral_cmd;
mod surface;
mod veech_cmd;

pub trait Command: Sync {
    fn name(&self) -> &'static str;
    fn clap(&self) -> clap::Command;
    fn run(&self, args: &ArgMatches, ctx: &mut RunContext) -> CliResult<()>;
}

pub fn registry() -> Vec<Box<dyn Command>> {
    vec![
        Box::new(surface::Validate),
        Box::new(surface::StratumCmd),
        Box::new(surface::Canonical),
        Box::new(surface::Reduced),
        Box::new(veech_cmd::Veech),
        Box::new(veech_cmd::Member),
        Box::new(group::Delta),
        Box::new(group::Shells),
        Box::new(spectral_cmd::SpectralNorm),
        Box::new(spectral_cmd::ProjectTest),
        Box::new(experiments::Target),
        Box::new(experiments::BcSeries),
        Box::new(experiments::Survivors),
        Box::new(experiments::HitCount),
    ]
}

// ---- shared argument helpers ----

pub(crate) fn load_origami(ctx: &mut RunContext, path: &Path) -> CliResult<Origami> {
    let text = ctx.read_input(path)?;
    Ok(Origami::parse_str(&text)?)
}

pub(crate) fn load_gens(
    ctx: &mut RunContext,
    path: &Path,
    claimed_convex_cocompact: bool,
) -> CliResult<GeneratorSet> {
    let text = ctx.read_input(path)?;
    Ok(GeneratorSet::parse_str(&text, claimed_convex_cocompact)?)
}

pub(crate) fn path_arg(args: &ArgMatches, name: &str) -> PathBuf {
    PathBuf::from(args.get_one::<String>(name).expect("required arg"))
}

pub(crate) fn f64_arg(args: &ArgMatches, name: &str) -> CliResult<f64> {
    let raw = args.get_one::<String>(name).expect("defaulted arg");
    raw.parse::<f64>()
        .map_err(|_| CliError::Usage(format!("--{name} expects a number, got '{raw}'")))
}

pub(crate) fn u64_arg(args: &ArgMatches, name: &str) -> CliResult<u64> {
    let raw = args.get_one::<String>(name).expect("defaulted arg");
    raw.parse::<u64>()
        .map_err(|_| CliError::Usage(format!("--{name} expects an integer, got '{raw}'")))
}

/// `start:end:step`, inclusive of the endpoint up to rounding.
pub(crate) fn parse_grid(raw: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "grid '{raw}' must be start:end:step"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad grid number '{p}'")))
        })
        .collect::<CliResult<_>>()?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if step <= 0.0 || end < start {
        return Err(CliError::Usage(format!("degenerate grid '{raw}'")));
    }
    let mut out = Vec::new();
    let mut k = 0u32;
    loop {
        let v = start + step * k as f64;
        if v > end + 1e-9 {
            break;
        }
        out.push(v);
        k += 1;
    }
    Ok(out)
}

pub(crate) fn parse_point(raw: &str) -> CliResult<SurfacePoint> {
    Ok(SurfacePoint::parse(raw)?)
}

/// Enumeration dump rows `a,b,c,d,norm,word`, witness word when recorded.
pub(crate) fn element_csv(elements: &[OrbitElement]) -> String {
    let mut out = String::from("a,b,c,d,norm,word\n");
    for e in elements {
        let word = match &e.word {
            Some(w) => w.to_string(),
            None => e.g.decompose().to_string(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            e.g.a,
            e.g.b,
            e.g.c,
            e.g.d,
            e.g.operator_norm(),
            word
        ));
    }
    out
}
