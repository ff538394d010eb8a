//! Veech group computation and membership, with cached orbit graphs.

use clap::{Arg, ArgAction, ArgMatches};
use std::path::PathBuf;

use origami_lab::sl2::GroupElement;
use origami_lab::veech::{is_member, veech_group, OrbitGraph, SignConvention, VeechOptions};
use origami_lab::Letter;

use super::{load_origami, path_arg, u64_arg, Command};
use crate::context::{cache_key, CliError, CliResult, RunContext};

pub struct Veech;

impl Command for Veech {
    fn name(&self) -> &'static str {
        "veech"
    }

    fn clap(&self) -> clap::Command {
        clap::Command::new(self.name())
            .about("Compute stabilizer generators and the orbit graph of a reduced origami")
            .arg(Arg::new("surface").required(true).value_name("ORIGAMI_FILE"))
            .arg(
                Arg::new("output-dir")
                    .long("output-dir")
                    .value_name("DIR")
                    .default_value("."),
            )
            .arg(
                Arg::new("orbit-budget")
                    .long("orbit-budget")
                    .value_name("N")
                    .default_value("100000"),
            )
            .arg(
                Arg::new("reducedness-cap")
                    .long("reducedness-cap")
                    .value_name("LENGTH")
                    .default_value("8"),
            )
    }

    fn run(&self, args: &ArgMatches, ctx: &mut RunContext) -> CliResult<()> {
        let path = path_arg(args, "surface");
        let text = ctx.read_input(&path)?;
        let origami = origami_lab::Origami::parse_str(&text)?;
        let budget = u64_arg(args, "orbit-budget")? as usize;
        let cap: f64 = super::f64_arg(args, "reducedness-cap")?;
        ctx.record("orbit_budget", budget);
        ctx.record("reducedness_cap", cap);

        let dir = PathBuf::from(args.get_one::<String>("output-dir").unwrap());
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "origami".into());
        let gens_path = dir.join(format!("{stem}.generators.csv"));
        let nodes_path = dir.join(format!("{stem}.orbit-nodes.txt"));
        let edges_path = dir.join(format!("{stem}.orbit-edges.csv"));
        ctx.set_manifest_path(dir.join(format!("{stem}.veech.manifest.json")));

        let key = cache_key(&["veech", &text, &budget.to_string(), &cap.to_string()]);
        let (gens_csv, nodes_txt, edges_csv) = match ctx.cache_get(&key) {
            Some(blob) => {
                let mut parts = blob.split('\u{1e}');
                let gens = parts.next().unwrap_or_default().to_string();
                let nodes = parts.next().unwrap_or_default().to_string();
                let edges = parts.next().unwrap_or_default().to_string();
                (gens, nodes, edges)
            }
            None => {
                let opts = VeechOptions {
                    orbit_budget: budget,
                    reducedness_cap: Some(cap),
                };
                let (data, graph) = veech_group(&origami, &opts)?;
                let gens = generators_csv(&data);
                let nodes = nodes_dump(&graph);
                let edges = edges_csv(&graph);
                ctx.cache_put(&key, &format!("{gens}\u{1e}{nodes}\u{1e}{edges}"));
                (gens, nodes, edges)
            }
        };
        ctx.write_output(&gens_path, &gens_csv)?;
        ctx.write_output(&nodes_path, &nodes_txt)?;
        ctx.write_output(&edges_path, &edges_csv)?;
        let index_line = gens_csv.lines().next().unwrap_or_default().to_string();
        println!("{index_line}");
        Ok(())
    }
}

fn generators_csv(data: &origami_lab::veech::VeechData) -> String {
    let mut out = format!(
        "index={} convention=matrix projective_index={}\n",
        data.index_matrix, data.index_projective
    );
    for (g, word) in &data.generators {
        out.push_str(&format!("{},{},{},{},{}\n", g.a, g.b, g.c, g.d, word));
    }
    out
}

fn nodes_dump(graph: &OrbitGraph) -> String {
    let mut out = String::new();
    for node in 0..graph.node_count() {
        out.push_str(&format!("# node {node}\n"));
        out.push_str(&graph.origami(node).to_file_string());
        out.push('\n');
    }
    out
}

fn edges_csv(graph: &OrbitGraph) -> String {
    let mut out = String::from("node,letter,node\n");
    for (u, letter, v) in graph.edges() {
        let l = match letter {
            Letter::T => "T",
            Letter::L => "L",
            _ => unreachable!("orbit edges carry T and L only"),
        };
        out.push_str(&format!("{u},{l},{v}\n"));
    }
    out
}

pub struct Member;

impl Command for Member {
    fn name(&self) -> &'static str {
        "member"
    }

    fn clap(&self) -> clap::Command {
        clap::Command::new(self.name())
            .about("Test whether a matrix lies in the Veech group of a reduced origami")
            .arg(Arg::new("surface").required(true).value_name("ORIGAMI_FILE"))
            .arg(
                Arg::new("matrix")
                    .long("matrix")
                    .required(true)
                    .value_name("a,b,c,d"),
            )
            .arg(
                Arg::new("projective")
                    .long("projective")
                    .action(ArgAction::SetTrue)
                    .help("Identify g with -g"),
            )
    }

    fn run(&self, args: &ArgMatches, ctx: &mut RunContext) -> CliResult<()> {
        let origami = load_origami(ctx, &path_arg(args, "surface"))?;
        let raw = args.get_one::<String>("matrix").unwrap();
        let nums: Vec<i64> = raw
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| CliError::Usage(format!("bad matrix entry '{t}'")))
            })
            .collect::<CliResult<_>>()?;
        if nums.len() != 4 {
            return Err(CliError::Usage("matrix needs four entries a,b,c,d".into()));
        }
        let g = GroupElement::new(nums[0], nums[1], nums[2], nums[3])?;
        let convention = if args.get_flag("projective") {
            SignConvention::Projective
        } else {
            SignConvention::Matrix
        };
        ctx.record("convention", convention);
        let (_, graph) = veech_group(&origami, &VeechOptions::default())?;
        println!("{}", is_member(&g, &graph, convention));
        Ok(())
    }
}
