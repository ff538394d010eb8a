//! Group-side experiments: critical-exponent estimation and shells.

use clap::{Arg, ArgAction, ArgMatches};
use std::path::Path;

use origami_lab::hyperbolic::{
    build_shells, estimate_delta, DeltaOptions, EnumOptions, HPoint,
};

use super::{element_csv, f64_arg, load_gens, path_arg, u64_arg, Command};
use crate::context::{CliError, CliResult, RunContext};

pub(crate) fn group_args(cmd: clap::Command) -> clap::Command {
    cmd.arg(
        Arg::new("group")
            .long("group")
            .required(true)
            .value_name("GENERATOR_FILE"),
    )
    .arg(
        Arg::new("claimed-convex-cocompact")
            .long("claimed-convex-cocompact")
            .action(ArgAction::SetTrue)
            .help("Caller asserts the generators span a convex cocompact group"),
    )
}

pub(crate) fn parse_basepoint(raw: &str) -> CliResult<HPoint> {
    let (x, y) = raw
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("basepoint '{raw}' must be x,y")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("bad basepoint coordinate '{t}'")))
    };
    Ok(HPoint::new(parse(x)?, parse(y)?)?)
}

pub struct Delta;

impl Command for Delta {
    fn name(&self) -> &'static str {
        "delta"
    }

    fn clap(&self) -> clap::Command {
        group_args(
            clap::Command::new(self.name())
                .about("Estimate the critical exponent by hyperbolic orbit counting"),
        )
        .arg(
            Arg::new("r-max")
                .long("r-max")
                .value_name("R")
                .default_value("12"),
        )
        .arg(
            Arg::new("basepoint")
                .long("basepoint")
                .value_name("x,y")
                .default_value("0,1"),
        )
        .arg(Arg::new("output").long("output").value_name("CSV"))
    }

    fn run(&self, args: &ArgMatches, ctx: &mut RunContext) -> CliResult<()> {
        let gens = load_gens(
            ctx,
            &path_arg(args, "group"),
            args.get_flag("claimed-convex-cocompact"),
        )?;
        let r_max = f64_arg(args, "r-max")?;
        let basepoint = parse_basepoint(args.get_one::<String>("basepoint").unwrap())?;
        ctx.record("r_max", r_max);
        ctx.record("basepoint", format!("{},{}", basepoint.x, basepoint.y));
        let est = estimate_delta(&gens, r_max, basepoint, &DeltaOptions::default())?;
        println!(
            "delta_hat={} alt_basepoint_delta={} discrepancy={} residual={} window={}..{}",
            est.slope,
            est.alt_slope,
            est.basepoint_discrepancy(),
            est.residual,
            est.window.0,
            est.window.1
        );
        if let Some(path) = args.get_one::<String>("output") {
            let mut csv = String::from("R,count\n");
            for (r, c) in &est.counts {
                csv.push_str(&format!("{r},{c}\n"));
            }
            ctx.write_output(Path::new(path), &csv)?;
        }
        Ok(())
    }
}

pub struct Shells;

impl Command for Shells {
    fn name(&self) -> &'static str {
        "shells"
    }

    fn clap(&self) -> clap::Command {
        group_args(
            clap::Command::new(self.name())
                .about("Dump the displacement shell (2n - kappa, 2n] of a subgroup"),
        )
        .arg(Arg::new("n").long("n").required(true).value_name("N"))
        .arg(
            Arg::new("kappa")
                .long("kappa")
                .value_name("WIDTH")
                .default_value("2"),
        )
        .arg(
            Arg::new("output")
                .long("output")
                .required(true)
                .value_name("CSV"),
        )
    }

    fn run(&self, args: &ArgMatches, ctx: &mut RunContext) -> CliResult<()> {
        let gens = load_gens(
            ctx,
            &path_arg(args, "group"),
            args.get_flag("claimed-convex-cocompact"),
        )?;
        let n = u64_arg(args, "n")? as u32;
        let kappa = f64_arg(args, "kappa")?;
        ctx.record("n", n);
        ctx.record("kappa", kappa);
        let mut opts = EnumOptions::default();
        opts.record_words = true;
        let shell = build_shells(&gens, n, kappa, HPoint::I, &opts)?;
        let mut out = format!("n={n} kappa={kappa} size={}\n", shell.len());
        out.push_str(&element_csv(&shell.elements));
        ctx.write_output(Path::new(args.get_one::<String>("output").unwrap()), &out)?;
        println!("n={n} kappa={kappa} size={}", shell.len());
        Ok(())
    }
}
