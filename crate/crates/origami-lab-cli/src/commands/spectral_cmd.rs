//! Spectral experiments: the shell-averaged operator-norm trend and the
//! projection-identity battery.

use clap::{Arg, ArgMatches};
use std::path::Path;

use origami_lab::hyperbolic::{
    estimate_delta, shell_band, DeltaOptions, EnumOptions, HPoint,
};
use origami_lab::spectral::{
    averaged_norm, fiber_average, project, FreqVec, GridFunction,
};
use origami_lab::Error;

use super::group::group_args;
use super::{f64_arg, load_gens, load_origami, path_arg, u64_arg, Command};
use crate::context::{CliResult, RunContext};

pub struct SpectralNorm;

impl Command for SpectralNorm {
    fn name(&self) -> &'static str {
        "spectral-norm"
    }

    fn clap(&self) -> clap::Command {
        group_args(
            clap::Command::new(self.name())
                .about("Averaged-operator norm bounds over displacement shells"),
        )
        .arg(Arg::new("n-min").long("n-min").value_name("N").default_value("4"))
        .arg(Arg::new("n-max").long("n-max").value_name("N").default_value("10"))
        .arg(Arg::new("kappa").long("kappa").value_name("WIDTH").default_value("2"))
        .arg(
            Arg::new("iterations")
                .long("iterations")
                .value_name("J")
                .default_value("1"),
        )
        .arg(
            Arg::new("support-cap")
                .long("support-cap")
                .value_name("CELLS")
                .default_value("10000000"),
        )
        .arg(
            Arg::new("delta-hat")
                .long("delta-hat")
                .value_name("DELTA")
                .help("Critical exponent for the reference curve; estimated when absent"),
        )
        .arg(Arg::new("output").long("output").required(true).value_name("CSV"))
    }

    fn run(&self, args: &ArgMatches, ctx: &mut RunContext) -> CliResult<()> {
        let gens = load_gens(
            ctx,
            &path_arg(args, "group"),
            args.get_flag("claimed-convex-cocompact"),
        )?;
        let n_min = u64_arg(args, "n-min")? as u32;
        let n_max = u64_arg(args, "n-max")? as u32;
        let kappa = f64_arg(args, "kappa")?;
        let iterations = u64_arg(args, "iterations")? as usize;
        let support_cap = u64_arg(args, "support-cap")? as usize;
        let delta_hat = match args.get_one::<String>("delta-hat") {
            Some(raw) => raw
                .parse::<f64>()
                .map_err(|_| crate::context::CliError::Usage("bad --delta-hat".into()))?,
            None => estimate_delta(&gens, 12.0, HPoint::I, &DeltaOptions::default())?.slope,
        };
        for (k, v) in [
            ("n_min", n_min as f64),
            ("n_max", n_max as f64),
            ("kappa", kappa),
            ("iterations", iterations as f64),
            ("support_cap", support_cap as f64),
            ("delta_hat", delta_hat),
        ] {
            ctx.record(k, v);
        }
        if n_min == 0 || n_min > n_max {
            return Err(crate::context::CliError::Usage(
                "need 0 < n-min <= n-max".into(),
            ));
        }

        let seeds = [FreqVec::new(1, 0)?, FreqVec::new(0, 1)?];
        let opts = EnumOptions::default();
        let mut rows = Vec::new();
        for n in n_min..=n_max {
            let shell = shell_band(&gens, n as f64, kappa, HPoint::I, &opts)?;
            let report = averaged_norm(&shell, iterations, &seeds, support_cap)?;
            rows.push((n, shell.len(), report.lower_bound, report.upper_companion));
        }
        // reference curve with the constant fitted at the first level
        let (n0, _, lb0, _) = rows[0];
        let fitted_c = lb0.ln() + 0.5 * delta_hat * n0 as f64 - 2.0 * (n0 as f64).ln();
        let curve =
            |n: u32| (-0.5 * delta_hat * n as f64 + 2.0 * (n as f64).ln() + fitted_c).exp();
        let mut csv =
            String::from("n,shell_size,lower_bound,upper_companion,paper_bound_with_fitted_C\n");
        for &(n, size, lb, up) in &rows {
            csv.push_str(&format!("{n},{size},{lb},{up},{}\n", curve(n)));
        }
        ctx.write_output(Path::new(args.get_one::<String>("output").unwrap()), &csv)?;
        println!(
            "levels {}..{} delta_hat={delta_hat} fitted_C={fitted_c}",
            n_min, n_max
        );
        Ok(())
    }
}

pub struct ProjectTest;

impl Command for ProjectTest {
    fn name(&self) -> &'static str {
        "project-test"
    }

    fn clap(&self) -> clap::Command {
        clap::Command::new(self.name())
            .about("Check the fiber-average and projection identities on random grid functions")
            .arg(Arg::new("surface").required(true).value_name("ORIGAMI_FILE"))
            .arg(
                Arg::new("resolution")
                    .long("resolution")
                    .value_name("CELLS")
                    .default_value("32"),
            )
            .arg(Arg::new("count").long("count").value_name("N").default_value("100"))
            .arg(Arg::new("seed").long("seed").value_name("SEED").default_value("7"))
    }

    fn run(&self, args: &ArgMatches, ctx: &mut RunContext) -> CliResult<()> {
        let origami = load_origami(ctx, &path_arg(args, "surface"))?;
        let resolution = u64_arg(args, "resolution")? as usize;
        let count = u64_arg(args, "count")? as usize;
        let seed = u64_arg(args, "seed")?;
        ctx.record("resolution", resolution);
        ctx.record("count", count);
        ctx.seed = Some(seed);

        let n = origami.degree();
        let mut state = seed.max(1);
        // xorshift stream; good enough to fill test functions
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state as f64 / u64::MAX as f64) * 2.0 - 1.0
        };
        let mut worst: [f64; 4] = [0.0; 4];
        for _ in 0..count {
            let f = GridFunction::from_fn(n, resolution, |_, _, _| next());
            let h = GridFunction::from_fn(n, resolution, |_, _, _| next());
            let p = project(&f);
            let pp = project(&p);
            worst[0] = worst[0].max(pp.sub(&p).norm());
            worst[1] = worst[1].max((p.inner(&h) - f.inner(&project(&h))).abs());
            let a = fiber_average(&f);
            worst[2] = worst[2].max((a.mean() - f.mean()).abs());
            if n > 1 {
                let base = GridFunction::from_fn(1, resolution, |_, _, _| next());
                let base2 = GridFunction::from_fn(1, resolution, |_, _, _| next());
                let err = (base.pullback(n).inner(&base2.pullback(n))
                    - base.inner(&base2))
                .abs();
                worst[3] = worst[3].max(err);
            }
        }
        println!(
            "idempotence={} self_adjointness={} integral_preservation={} pullback_isometry={}",
            worst[0], worst[1], worst[2], worst[3]
        );
        let tolerances = [1e-10, 1e-10, 1e-12, 1e-12];
        for (w, t) in worst.iter().zip(tolerances) {
            if *w > t {
                return Err(Error::InternalInconsistency(format!(
                    "projection identity violated: error {w} above {t}"
                ))
                .into());
            }
        }
        Ok(())
    }
}
