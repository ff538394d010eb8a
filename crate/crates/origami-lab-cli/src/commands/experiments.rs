//! Shrinking-target experiment runners.

use clap::{Arg, ArgMatches};
use std::path::{Path, PathBuf};

use origami_lab::hyperbolic::{estimate_delta, DeltaOptions, HPoint};
use origami_lab::target::{
    bc_series, quantitative_hit_count, survivor_measure, sweep_alpha, ExperimentConfig,
    SeriesVariant,
};
use origami_lab::GeneratorSet;
use origami_lab::Origami;

use super::group::group_args;
use super::{f64_arg, load_gens, load_origami, parse_grid, parse_point, path_arg, u64_arg, Command};
use crate::context::{CliError, CliResult, RunContext};

fn experiment_args(cmd: clap::Command) -> clap::Command {
    group_args(cmd)
        .arg(Arg::new("surface").long("surface").required(true).value_name("ORIGAMI_FILE"))
        .arg(
            Arg::new("target")
                .long("target")
                .value_name("SQ:S,T")
                .default_value("1:3/7,2/7")
                .help("Target center; a regular point with denominator-7 coordinates by default"),
        )
        .arg(Arg::new("norm-max").long("norm-max").value_name("R").default_value("300"))
        .arg(Arg::new("samples").long("samples").value_name("N").default_value("200"))
        .arg(Arg::new("seed").long("seed").value_name("SEED").default_value("7"))
}

struct Loaded {
    origami: Origami,
    gens: GeneratorSet,
    target: origami_lab::affine::SurfacePoint,
    norm_max: f64,
    samples: usize,
    seed: u64,
}

fn load_experiment(args: &ArgMatches, ctx: &mut RunContext) -> CliResult<Loaded> {
    let origami = load_origami(ctx, &path_arg(args, "surface"))?;
    let gens = load_gens(
        ctx,
        &path_arg(args, "group"),
        args.get_flag("claimed-convex-cocompact"),
    )?;
    let target = parse_point(args.get_one::<String>("target").unwrap())?;
    let norm_max = f64_arg(args, "norm-max")?;
    let samples = u64_arg(args, "samples")? as usize;
    let seed = u64_arg(args, "seed")?;
    ctx.record("target", target);
    ctx.record("norm_max", norm_max);
    ctx.record("samples", samples);
    ctx.record("seed", seed);
    ctx.seed = Some(seed);
    if origami_lab::affine::is_singular_point(&origami, &target) {
        eprintln!("warning: target center is a cone point; measures carry the cone factor");
    }
    Ok(Loaded {
        origami,
        gens,
        target,
        norm_max,
        samples,
        seed,
    })
}

pub struct Target;

impl Command for Target {
    fn name(&self) -> &'static str {
        "target"
    }

    fn clap(&self) -> clap::Command {
        experiment_args(
            clap::Command::new(self.name())
                .about("Shrinking-target transition sweep over the exponent grid"),
        )
        .arg(
            Arg::new("alpha-grid")
                .long("alpha-grid")
                .value_name("START:END:STEP")
                .default_value("0.25:2.5:0.25"),
        )
        .arg(
            Arg::new("output-dir")
                .long("output-dir")
                .value_name("DIR")
                .default_value("."),
        )
    }

    fn run(&self, args: &ArgMatches, ctx: &mut RunContext) -> CliResult<()> {
        let loaded = load_experiment(args, ctx)?;
        let alphas = parse_grid(args.get_one::<String>("alpha-grid").unwrap())?;
        ctx.record("alpha_grid", args.get_one::<String>("alpha-grid").unwrap());
        let config = ExperimentConfig::new(
            loaded.origami,
            loaded.gens,
            loaded.target,
            alphas,
            loaded.norm_max,
            loaded.samples,
            loaded.seed,
        )?;
        ctx.record("kappa", config.kappa);
        ctx.record("sample_denominator", config.sample_denominator);
        let delta_hat =
            estimate_delta(&config.gens, 12.0, HPoint::I, &DeltaOptions::default())
                .map(|e| e.slope)
                .unwrap_or(f64::NAN);
        ctx.record("delta_hat", delta_hat);

        let sweep = sweep_alpha(&config)?;
        let dir = PathBuf::from(args.get_one::<String>("output-dir").unwrap());
        ctx.set_manifest_path(dir.join("manifest.json"));

        let mut results = String::from("alpha,sample,hits_total,hits_top_decade,min_norm_first_hit\n");
        for r in &sweep.rows {
            let min_norm = r
                .min_norm_first_hit
                .map(|v| v.to_string())
                .unwrap_or_default();
            results.push_str(&format!(
                "{},{},{},{},{}\n",
                r.alpha, r.sample, r.hits_total, r.hits_top_decade, min_norm
            ));
        }
        ctx.write_output(&dir.join("results.csv"), &results)?;

        let alpha_star = sweep
            .alpha_star
            .map(|v| v.to_string())
            .unwrap_or_default();
        let mut summary = String::from("alpha,fraction_accruing,delta_hat,alpha_star\n");
        for s in &sweep.summary {
            summary.push_str(&format!(
                "{},{},{delta_hat},{alpha_star}\n",
                s.alpha, s.fraction_accruing
            ));
        }
        ctx.write_output(&dir.join("summary.csv"), &summary)?;
        println!("alpha_star={alpha_star} delta_hat={delta_hat}");
        Ok(())
    }
}

pub struct BcSeries;

impl Command for BcSeries {
    fn name(&self) -> &'static str {
        "bc-series"
    }

    fn clap(&self) -> clap::Command {
        clap::Command::new(self.name())
            .about("Partial sums and verdicts of the summability conditions")
            .arg(
                Arg::new("variant")
                    .long("variant")
                    .required(true)
                    .value_name("stated1|proof1|stated2"),
            )
            .arg(Arg::new("delta").long("delta").required(true).value_name("DELTA"))
            .arg(Arg::new("alpha").long("alpha").required(true).value_name("ALPHA"))
            .arg(Arg::new("terms").long("terms").value_name("N").default_value("100000"))
            .arg(Arg::new("output").long("output").required(true).value_name("CSV"))
    }

    fn run(&self, args: &ArgMatches, ctx: &mut RunContext) -> CliResult<()> {
        let variant: SeriesVariant = args
            .get_one::<String>("variant")
            .unwrap()
            .parse()
            .map_err(CliError::Lab)?;
        let delta = f64_arg(args, "delta")?;
        let alpha = f64_arg(args, "alpha")?;
        let terms = u64_arg(args, "terms")?;
        ctx.record("variant", variant.name());
        ctx.record("delta", delta);
        ctx.record("alpha", alpha);
        ctx.record("terms", terms);
        let report = bc_series(variant, delta, alpha, terms)?;
        let verdict = if report.converges_analytic {
            "converges"
        } else {
            "diverges"
        };
        let mut csv = String::from("variant,n,term,partial_sum,verdict\n");
        for &(n, sum) in &report.checkpoints {
            csv.push_str(&format!(
                "{},{n},{},{sum},{verdict}\n",
                variant.name(),
                variant.term(delta, alpha, n)
            ));
        }
        ctx.write_output(Path::new(args.get_one::<String>("output").unwrap()), &csv)?;
        println!(
            "variant={} verdict={verdict} empirical_agrees={} stated1_vs_proof1_discrepancy={}",
            variant.name(),
            report.converges_empirical == report.converges_analytic,
            report.variant_discrepancy
        );
        Ok(())
    }
}

pub struct Survivors;

impl Command for Survivors {
    fn name(&self) -> &'static str {
        "survivors"
    }

    fn clap(&self) -> clap::Command {
        experiment_args(
            clap::Command::new(self.name())
                .about("Survivor-set fractions against the reference decay shape"),
        )
        .arg(Arg::new("alpha").long("alpha").required(true).value_name("ALPHA"))
        .arg(Arg::new("n-min").long("n-min").value_name("N").default_value("0"))
        .arg(Arg::new("n-max").long("n-max").value_name("N").default_value("5"))
        .arg(
            Arg::new("delta-hat")
                .long("delta-hat")
                .value_name("DELTA")
                .help("Critical exponent for the decay shape; estimated when absent"),
        )
        .arg(Arg::new("output").long("output").required(true).value_name("CSV"))
    }

    fn run(&self, args: &ArgMatches, ctx: &mut RunContext) -> CliResult<()> {
        let loaded = load_experiment(args, ctx)?;
        let alpha = f64_arg(args, "alpha")?;
        let n_min = u64_arg(args, "n-min")? as u32;
        let n_max = u64_arg(args, "n-max")? as u32;
        let delta_hat = match args.get_one::<String>("delta-hat") {
            Some(raw) => raw
                .parse::<f64>()
                .map_err(|_| CliError::Usage("bad --delta-hat".into()))?,
            None => estimate_delta(&loaded.gens, 12.0, HPoint::I, &DeltaOptions::default())?.slope,
        };
        ctx.record("alpha", alpha);
        ctx.record("n_min", n_min);
        ctx.record("n_max", n_max);
        ctx.record("delta_hat", delta_hat);
        let config = ExperimentConfig::new(
            loaded.origami,
            loaded.gens,
            loaded.target,
            vec![alpha],
            loaded.norm_max,
            loaded.samples,
            loaded.seed,
        )?;
        let rows = survivor_measure(&config, alpha, n_min..=n_max, delta_hat)?;
        let mut csv = String::from("n,survivor_fraction,standard_error,scaled_bound\n");
        for r in &rows {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                r.n, r.survivor_fraction, r.standard_error, r.scaled_bound
            ));
        }
        ctx.write_output(Path::new(args.get_one::<String>("output").unwrap()), &csv)?;
        println!("levels {}..{} written", n_min, n_max);
        Ok(())
    }
}

pub struct HitCount;

impl Command for HitCount {
    fn name(&self) -> &'static str {
        "hitcount"
    }

    fn clap(&self) -> clap::Command {
        experiment_args(
            clap::Command::new(self.name())
                .about("Quantitative hit counts A(N, x) against the measure sum"),
        )
        .arg(Arg::new("alpha").long("alpha").required(true).value_name("ALPHA"))
        .arg(
            Arg::new("checkpoints")
                .long("checkpoints")
                .value_name("N1,N2,...")
                .default_value("300"),
        )
        .arg(Arg::new("output").long("output").required(true).value_name("CSV"))
    }

    fn run(&self, args: &ArgMatches, ctx: &mut RunContext) -> CliResult<()> {
        let loaded = load_experiment(args, ctx)?;
        let alpha = f64_arg(args, "alpha")?;
        let checkpoints: Vec<f64> = args
            .get_one::<String>("checkpoints")
            .unwrap()
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("bad checkpoint '{t}'")))
            })
            .collect::<CliResult<_>>()?;
        ctx.record("alpha", alpha);
        ctx.record("checkpoints", args.get_one::<String>("checkpoints").unwrap());
        let config = ExperimentConfig::new(
            loaded.origami,
            loaded.gens,
            loaded.target,
            vec![alpha],
            loaded.norm_max,
            loaded.samples,
            loaded.seed,
        )?;
        let ball = config.enumerate()?;
        let mut csv = String::from("sample,checkpoint,hits,expected,ratio\n");
        for sample in 0..config.samples {
            let x = config.sample_point(sample);
            let rows = quantitative_hit_count(&config, &ball, &x, alpha, &checkpoints)?;
            for r in &rows {
                csv.push_str(&format!(
                    "{sample},{},{},{},{}\n",
                    r.checkpoint, r.hits, r.expected, r.ratio
                ));
            }
        }
        ctx.write_output(Path::new(args.get_one::<String>("output").unwrap()), &csv)?;
        println!("{} samples at {} checkpoints", config.samples, checkpoints.len());
        Ok(())
    }
}
