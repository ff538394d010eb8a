//! Surface-level queries: validation, stratum, canonical form, reducedness.

use clap::{Arg, ArgMatches};

use origami_lab::flat;
use origami_lab::Origami;

use super::{f64_arg, load_origami, path_arg, Command};
use crate::context::{CliResult, RunContext};

fn surface_positional() -> Arg {
    Arg::new("surface").required(true).value_name("ORIGAMI_FILE")
}

pub struct Validate;

impl Command for Validate {
    fn name(&self) -> &'static str {
        "validate"
    }

    fn clap(&self) -> clap::Command {
        clap::Command::new(self.name())
            .about("Validate an origami file and print its stratum summary")
            .arg(surface_positional())
    }

    fn run(&self, args: &ArgMatches, ctx: &mut RunContext) -> CliResult<()> {
        let path = path_arg(args, "surface");
        let origami = load_origami(ctx, &path)?;
        let stratum = origami.stratum()?;
        println!(
            "ok degree={} genus={} cone_angles={:?} vertices={}",
            origami.degree(),
            stratum.genus,
            stratum.cone_orders,
            stratum.vertex_count
        );
        Ok(())
    }
}

pub struct StratumCmd;

impl Command for StratumCmd {
    fn name(&self) -> &'static str {
        "stratum"
    }

    fn clap(&self) -> clap::Command {
        clap::Command::new(self.name())
            .about("Print cone orders and genus of an origami")
            .arg(surface_positional())
    }

    fn run(&self, args: &ArgMatches, ctx: &mut RunContext) -> CliResult<()> {
        let origami = load_origami(ctx, &path_arg(args, "surface"))?;
        let stratum = origami.stratum()?;
        let angles: Vec<String> = stratum
            .cone_orders
            .iter()
            .map(|k| format!("{}pi", 2 * k))
            .collect();
        println!(
            "genus {} with {} cone point(s): [{}]",
            stratum.genus,
            stratum.cone_orders.len(),
            angles.join(", ")
        );
        Ok(())
    }
}

pub struct Canonical;

impl Command for Canonical {
    fn name(&self) -> &'static str {
        "canonical"
    }

    fn clap(&self) -> clap::Command {
        clap::Command::new(self.name())
            .about("Print the canonical relabelling of an origami")
            .arg(surface_positional())
            .arg(Arg::new("output").long("output").value_name("FILE"))
    }

    fn run(&self, args: &ArgMatches, ctx: &mut RunContext) -> CliResult<()> {
        let origami = load_origami(ctx, &path_arg(args, "surface"))?;
        let canonical = Origami::from_canonical(&origami.canonical_form());
        let text = canonical.to_file_string();
        match args.get_one::<String>("output") {
            Some(path) => ctx.write_output(std::path::Path::new(path), &text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

pub struct Reduced;

impl Command for Reduced {
    fn name(&self) -> &'static str {
        "reduced"
    }

    fn clap(&self) -> clap::Command {
        clap::Command::new(self.name())
            .about("Decide whether the period lattice is all of Z^2")
            .arg(surface_positional())
            .arg(
                Arg::new("cap")
                    .long("cap")
                    .value_name("LENGTH")
                    .default_value("8"),
            )
    }

    fn run(&self, args: &ArgMatches, ctx: &mut RunContext) -> CliResult<()> {
        let origami = load_origami(ctx, &path_arg(args, "surface"))?;
        let cap = f64_arg(args, "cap")?;
        ctx.record("cap", cap);
        let verdict = flat::reducedness(&origami, cap)?;
        let basis = verdict
            .basis
            .map(|b| format!("[({},{}),({},{})]", b[0].0, b[0].1, b[1].0, b[1].1))
            .unwrap_or_else(|| "incomplete".into());
        println!(
            "reduced={} lattice_index={} basis={} holonomies={}",
            verdict.reduced, verdict.index, basis, verdict.holonomy_count
        );
        Ok(())
    }
}
