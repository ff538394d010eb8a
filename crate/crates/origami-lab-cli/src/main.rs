//! Experiment runner for the origami laboratory. Subcommands live in a
//! registry; every run writes its manifest next to its outputs so results
//! can be reproduced bit for bit.

mod commands;
mod context;

use context::RunContext;

fn main() {
    let registry = commands::registry();
    let mut cli = clap::Command::new("origami-lab")
        .about("Square-tiled surface laboratory: Veech groups, orbit counting, shrinking targets")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true);
    for cmd in &registry {
        cli = cli.subcommand(cmd.clap());
    }
    let matches = cli.get_matches();
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let cmd = registry
        .iter()
        .find(|c| c.name() == name)
        .expect("registry covers all subcommands");

    let mut ctx = RunContext::new(name);
    let run = cmd.run(sub, &mut ctx).and_then(|()| ctx.finish());
    if let Err(err) = run {
        eprintln!("error: category={} message=\"{err}\"", err.category_name());
        std::process::exit(err.exit_code());
    }
}
