//! `ssc`: decide strong structural controllability of structured networks,
//! classify node systems, reduce networks to standard node systems, test
//! pattern ranks, export graphs and benchmark the direct vs. reduced tests.
//!
//! Exit codes: 0 controllable / success, 1 not controllable, 2 usage or
//! parse error, 3 internal inconsistency (method disagreement or a numeric
//! refutation of a positive structural verdict).

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use ssc_core::error::Error;
use ssc_core::graph::{derived_set, export_dot, full_row_rank, rank_deficiency_witness};
use ssc_core::io;
use ssc_core::network::{verdict_report, Method, StructuredNetwork, Verdict};
use ssc_core::node::NodeSystem;
use ssc_core::oracle::{network_numeric_check, SampleConfig};
use ssc_core::pattern::{stack_rows, PatternMatrix};
use ssc_core::{gen, is_independent};

const EXIT_OK: u8 = 0;
const EXIT_NOT_CONTROLLABLE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INCONSISTENT: u8 = 3;

#[derive(Parser)]
#[command(name = "ssc", version, about = "Strong structural controllability of structured networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Seed for sampling and generation
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Relative rank tolerance for numeric tests
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Direct,
    Reduced,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Decide controllability of a network (JSON file or manifest directory)
    Check {
        network: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        /// Additionally run this many seeded numeric samples
        #[arg(long, default_value_t = 0)]
        verify_samples: usize,
    },
    /// Classify a node system into its condition C1-C6
    Classify { node: PathBuf },
    /// Replace every node by its standard node system
    Reduce { network: PathBuf },
    /// Structural full row rank of a pattern matrix
    Rank { pattern: PathBuf },
    /// Independence of one pattern row from the remaining rows
    Independent {
        pattern: PathBuf,
        /// 1-based row to test
        #[arg(long)]
        row: usize,
    },
    /// Sample numeric realizations of a network and run the Kalman test
    SampleVerify {
        network: PathBuf,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// DOT graph of a network's closed-loop pattern or of a pattern file
    ExportDot {
        input: PathBuf,
        /// Reduce the network to standard node systems first
        #[arg(long)]
        reduced: bool,
        /// Use the bar-modified assembly
        #[arg(long)]
        bar: bool,
    },
    /// Time the direct against the reduced test on random networks
    Bench {
        #[arg(long, default_value_t = 10)]
        nodes: usize,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        #[arg(long, default_value_t = 2)]
        inputs: usize,
        /// Emit per-instance CSV instead of the summary table
        #[arg(long)]
        csv: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    match &cli.command {
        Command::Check { network, method, verify_samples } => {
            cmd_check(cli, network, *method, *verify_samples)
        }
        Command::Classify { node } => cmd_classify(cli, node),
        Command::Reduce { network } => cmd_reduce(cli, network),
        Command::Rank { pattern } => cmd_rank(cli, pattern),
        Command::Independent { pattern, row } => cmd_independent(cli, pattern, *row),
        Command::SampleVerify { network, trials } => cmd_sample_verify(cli, network, *trials),
        Command::ExportDot { input, reduced, bar } => cmd_export_dot(input, *reduced, *bar),
        Command::Bench { nodes, dim, instances, inputs, csv } => {
            cmd_bench(cli, *nodes, *dim, *instances, *inputs, *csv)
        }
    }
}

fn sample_config(cli: &Cli, trials: usize) -> SampleConfig {
    SampleConfig {
        seed: cli.seed,
        trials,
        rank_tolerance: cli.tolerance,
        ..SampleConfig::default()
    }
}

fn cmd_check(
    cli: &Cli,
    path: &Path,
    method: MethodArg,
    verify_samples: usize,
) -> Result<u8, Error> {
    let net = io::load_network(path)?;

    let (primary, secondary) = match method {
        MethodArg::Direct => (net.is_controllable(Method::Direct)?, None),
        MethodArg::Reduced => (net.is_controllable(Method::Reduced)?, None),
        MethodArg::Both => (
            net.is_controllable(Method::Direct)?,
            Some(net.is_controllable(Method::Reduced)?),
        ),
    };

    let mut inconsistent = false;
    if let Some(reduced) = &secondary {
        if reduced.controllable != primary.controllable {
            inconsistent = true;
            let repro = format!("ssc-disagreement-{}.json", std::process::id());
            std::fs::write(&repro, io::network_to_json(&net))?;
            eprintln!(
                "internal inconsistency: direct and reduced verdicts disagree; network written to {repro}"
            );
        }
    }

    let numeric = if verify_samples > 0 {
        Some(network_numeric_check(&net, &sample_config(cli, verify_samples))?)
    } else {
        None
    };
    if let Some(summary) = &numeric {
        if primary.controllable && summary.failures > 0 {
            inconsistent = true;
            eprintln!(
                "internal inconsistency: structural verdict is controllable but trial {} fails numerically",
                summary.first_failure_trial.unwrap_or_default()
            );
        }
    }

    match cli.format {
        Format::Text => {
            print!("{}", verdict_report(&primary));
            if let Some(reduced) = &secondary {
                print!("\nreduced method:\n{}", verdict_report(reduced));
                println!(
                    "method agreement: {}",
                    if reduced.controllable == primary.controllable { "yes" } else { "NO" }
                );
            }
            if let Some(summary) = &numeric {
                println!(
                    "numeric samples: {}/{} controllable (seed {}, tolerance {:e})",
                    summary.passes, summary.trials, summary.seed, summary.tolerance
                );
            }
        }
        Format::Json => {
            let value = json!({
                "verdict": primary,
                "reduced_verdict": secondary,
                "numeric_check": numeric,
                "consistent": !inconsistent,
            });
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
    }

    if inconsistent {
        Ok(EXIT_INCONSISTENT)
    } else if primary.controllable {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_NOT_CONTROLLABLE)
    }
}

fn cmd_classify(cli: &Cli, path: &Path) -> Result<u8, Error> {
    let node = io::load_node(path)?;

    let plain = node.classify();
    let bar = node.bar().classify();
    if plain.is_err() || bar.is_err() {
        let side = if plain.is_err() { "[A B]" } else { "[Abar B]" };
        let msg = match (&plain, &bar) {
            (Err(e), _) => e.to_string(),
            (_, Err(e)) => e.to_string(),
            _ => unreachable!(),
        };
        if msg.contains("node_uncontrollable") {
            println!("node_uncontrollable: {side} is not structurally full row rank");
            return Ok(EXIT_NOT_CONTROLLABLE);
        }
        return Err(plain.err().or(bar.err()).expect("one side failed"));
    }
    let condition = plain.expect("checked above");
    let bar_condition = bar.expect("checked above");
    let flags = node.properties()?;
    let detail = node.coloring_detail()?;
    let standard = condition.standard_node();
    let bar_standard = bar_condition.standard_node();

    match cli.format {
        Format::Text => {
            let yn = |b: bool| if b { "yes" } else { "no" };
            println!("S1: {}", yn(flags.s1));
            println!("S2: {}", yn(flags.s2));
            println!("S3: {}", yn(flags.s3));
            println!("S4: {}", yn(flags.s4));
            println!("condition: {condition}");
            println!("input row j: {}", detail.input_row);
            println!("derived set S(col(A, C)): {}", detail.base.black_set_string());
            println!(
                "seeded colorings: with output row -> {}, with input row -> {}",
                detail.extended_s2.black_set_string(),
                detail.extended_s4.black_set_string()
            );
            println!("\nstandard node system ({condition}):");
            print!("{}", io::node_to_text(&standard));
            println!("\nbar variant condition: {bar_condition}");
            println!("standard node system of the bar variant ({bar_condition}):");
            print!("{}", io::node_to_text(&bar_standard));
        }
        Format::Json => {
            let value = json!({
                "properties": flags,
                "condition": condition,
                "input_row": detail.input_row,
                "derived_set": detail.base.black().iter().collect::<Vec<_>>(),
                "standard_node": io::NodeRepr::from(&standard),
                "bar_condition": bar_condition,
                "bar_standard_node": io::NodeRepr::from(&bar_standard),
            });
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
    }
    Ok(EXIT_OK)
}

fn cmd_reduce(cli: &Cli, path: &Path) -> Result<u8, Error> {
    let net = io::load_network(path)?;
    let (hat, bar_hat) = net.reduce()?;
    match cli.format {
        Format::Text => {
            println!(
                "original state dimension: {}, reduced: {} (plain), {} (bar)",
                net.state_dim(),
                hat.state_dim(),
                bar_hat.state_dim()
            );
            for (k, node) in net.nodes().iter().enumerate() {
                println!(
                    "node {}: {} -> dim {}, bar {} -> dim {}",
                    k + 1,
                    node.classify()?,
                    hat.nodes()[k].dim(),
                    node.bar().classify()?,
                    bar_hat.nodes()[k].dim()
                );
            }
        }
        Format::Json => {
            let value = json!({
                "reduced": io::NetworkRepr::from(&hat),
                "reduced_bar": io::NetworkRepr::from(&bar_hat),
            });
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
    }
    Ok(EXIT_OK)
}

fn cmd_rank(cli: &Cli, path: &Path) -> Result<u8, Error> {
    let pattern = io::load_pattern(path)?;
    let frr = full_row_rank(&pattern);
    let coloring = derived_set(&pattern, &BTreeSet::new())?;
    let witness = rank_deficiency_witness(&pattern);
    match cli.format {
        Format::Text => {
            println!("pattern: {}x{}", pattern.rows(), pattern.cols());
            println!("full row rank: {}", if frr { "yes" } else { "no" });
            println!("derived set: {}", coloring.black_set_string());
            if let Some((t, z)) = &witness {
                let zs: Vec<String> = z.iter().map(|v| format!("{v}")).collect();
                println!("witness z = [{}]", zs.join(", "));
                println!("witness realization:\n{t}");
            }
        }
        Format::Json => {
            let value = json!({
                "rows": pattern.rows(),
                "cols": pattern.cols(),
                "full_row_rank": frr,
                "derived_set": coloring.black().iter().collect::<Vec<_>>(),
                "witness": witness.map(|(t, z)| json!({"matrix": t, "z": z})),
            });
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
    }
    Ok(EXIT_OK)
}

fn cmd_independent(cli: &Cli, path: &Path, row: usize) -> Result<u8, Error> {
    let pattern = io::load_pattern(path)?;
    if row == 0 || row > pattern.rows() {
        return Err(Error::Argument(format!(
            "row {} out of range 1..={}",
            row,
            pattern.rows()
        )));
    }
    let m = pattern.row_matrix(row - 1);
    let rest = if pattern.rows() == 1 {
        PatternMatrix::empty(pattern.cols())
    } else {
        pattern.without_row(row - 1)
    };
    let independent = is_independent(&m, &rest)?;
    let stacked = stack_rows(&[m, rest])?;
    let coloring = derived_set(&stacked, &BTreeSet::new())?;
    match cli.format {
        Format::Text => {
            println!("independent: {}", if independent { "yes" } else { "no" });
            println!(
                "derived set (row {row} moved to the top): {}",
                coloring.black_set_string()
            );
        }
        Format::Json => {
            let value = json!({
                "row": row,
                "independent": independent,
                "derived_set": coloring.black().iter().collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
    }
    Ok(EXIT_OK)
}

fn cmd_sample_verify(cli: &Cli, path: &Path, trials: usize) -> Result<u8, Error> {
    let net = io::load_network(path)?;
    let summary = network_numeric_check(&net, &sample_config(cli, trials))?;
    match cli.format {
        Format::Text => {
            println!(
                "numeric samples: {}/{} controllable (seed {}, tolerance {:e})",
                summary.passes, summary.trials, summary.seed, summary.tolerance
            );
            if let Some(trial) = summary.first_failure_trial {
                println!("first failing trial: {trial}");
            }
        }
        Format::Json => println!("{}", serde_json::to_string_pretty(&summary)?),
    }
    Ok(if summary.all_passed() { EXIT_OK } else { EXIT_NOT_CONTROLLABLE })
}

fn cmd_export_dot(path: &Path, reduced: bool, bar: bool) -> Result<u8, Error> {
    let pattern = if path.is_dir() || path.extension().map(|e| e == "json").unwrap_or(false) {
        match io::load_network(path) {
            Ok(net) => {
                if reduced {
                    let (hat, bar_hat) = net.reduce()?;
                    if bar { bar_hat.assemble(false) } else { hat.assemble(false) }
                } else {
                    net.assemble(bar)
                }
            }
            Err(_) => io::load_pattern(path)?,
        }
    } else {
        if reduced {
            return Err(Error::Argument(
                "--reduced applies to networks, not pattern files".into(),
            ));
        }
        let p = io::load_pattern(path)?;
        if bar {
            p.bar()?
        } else {
            p
        }
    };
    print!("{}", export_dot(&pattern, None));
    Ok(EXIT_OK)
}

fn cmd_bench(
    cli: &Cli,
    nodes: usize,
    dim: usize,
    instances: usize,
    inputs: usize,
    csv: bool,
) -> Result<u8, Error> {
    if nodes == 0 || dim == 0 || instances == 0 || inputs == 0 {
        return Err(Error::Argument("bench parameters must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let dims = vec![dim; nodes];
    let mut direct_us = Vec::with_capacity(instances);
    let mut reduced_us = Vec::with_capacity(instances);
    let mut agreements = 0usize;
    if csv {
        println!("instance,nodes,dim,inputs,direct_us,reduced_us,agree");
    }
    for i in 0..instances {
        let net = gen::random_network(&mut rng, &dims, inputs);
        let t0 = Instant::now();
        let direct = net.is_controllable(Method::Direct)?;
        let d_us = t0.elapsed().as_micros();
        let t1 = Instant::now();
        let reduced = net.is_controllable(Method::Reduced)?;
        let r_us = t1.elapsed().as_micros();
        let agree = direct.controllable == reduced.controllable;
        if agree {
            agreements += 1;
        } else {
            let repro = format!("ssc-disagreement-{}.json", std::process::id());
            std::fs::write(&repro, io::network_to_json(&net))?;
            eprintln!("disagreement on instance {i}; network written to {repro}");
        }
        direct_us.push(d_us);
        reduced_us.push(r_us);
        if csv {
            println!("{i},{nodes},{dim},{inputs},{d_us},{r_us},{agree}");
        }
    }
    let stats = |xs: &mut Vec<u128>| {
        xs.sort_unstable();
        let mean = xs.iter().sum::<u128>() / xs.len() as u128;
        let median = xs[xs.len() / 2];
        (mean, median)
    };
    let (d_mean, d_median) = stats(&mut direct_us);
    let (r_mean, r_median) = stats(&mut reduced_us);
    if !csv {
        println!("instances: {instances} (N={nodes}, dim={dim}, m={inputs})");
        println!("direct : mean {d_mean} us, median {d_median} us");
        println!("reduced: mean {r_mean} us, median {r_median} us");
        if r_mean > 0 {
            println!("speedup: {:.2}x", d_mean as f64 / r_mean as f64);
        }
        println!("agreement: {agreements}/{instances}");
    }
    Ok(if agreements == instances { EXIT_OK } else { EXIT_INCONSISTENT })
}
