use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use activegm::engine::{Algorithm, EngineConfig};
use activegm::graph::{gen_multi_clique_chain, gen_power_law, gen_single_clique_chain};
use activegm::{GaussianModel, Graph};
use activegm_bench::battery::{budget_for, build_model};
use activegm_bench::config::{BenchConfig, BudgetRule, ModelSpec};
use activegm_bench::io::{write_curve, write_esc, write_reports, write_trace};
use activegm_bench::{esc_summary, hamming_curve, run_battery, Result};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "activegm", version, about = "Active-marginalization Gaussian graph recovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    SingleClique,
    MultiClique,
    PowerLaw,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic graph as an edge list.
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        p: usize,
        /// Clique size for single-clique.
        #[arg(long, default_value_t = 12)]
        clique: usize,
        /// Comma-separated clique sizes for multi-clique.
        #[arg(long, value_delimiter = ',', default_value = "5,8,10,11")]
        cliques: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        seed_size: usize,
        #[arg(long, default_value_t = 1)]
        edges_per_step: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the default precision model for the graph.
        #[arg(long)]
        model_out: Option<PathBuf>,
    },
    /// Recover one graph and write its trace and edge list.
    Run {
        /// Edge list; the model is built from it with the weight options.
        #[arg(long, required_unless_present = "model", conflicts_with = "model")]
        graph: Option<PathBuf>,
        /// Model text as written by `generate --model-out`.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, value_parser = parse_algorithm)]
        algo: Algorithm,
        /// Sample-size constant; the full sample count for mb.
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 0.1)]
        xi: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda0: f64,
        /// `none`, `sufficient`, `scaled:F` or a scalar count.
        #[arg(long, default_value = "none")]
        budget: BudgetRule,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Off-diagonal precision entry; defaults to 0.3/sqrt(d_max).
        #[arg(long)]
        edge_weight: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        diag_boost: f64,
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Run a configured battery and write reports, ESC summary and curves.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: activegm::Error| e.to_string())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            family,
            p,
            clique,
            cliques,
            seed_size,
            edges_per_step,
            seed,
            out,
            model_out,
        } => {
            let g = match family {
                Family::SingleClique => gen_single_clique_chain(p, clique)?,
                Family::MultiClique => gen_multi_clique_chain(p, &cliques)?,
                Family::PowerLaw => gen_power_law(p, seed_size, edges_per_step, seed)?,
            };
            fs::write(&out, g.to_edge_list())?;
            if let Some(path) = model_out {
                fs::write(path, build_model(&ModelSpec::default(), &g, 0)?.to_text())?;
            }
            let stats = activegm::degree_stats(&g);
            println!(
                "wrote {} (p = {}, edges = {}, d_max = {}, dbar_max = {})",
                out.display(),
                g.p(),
                g.edge_count(),
                stats.d_max,
                stats.dbar_max
            );
        }
        Command::Run {
            graph,
            model,
            algo,
            c,
            xi,
            lambda0,
            budget,
            seed,
            edge_weight,
            diag_boost,
            out_prefix,
        } => {
            let model = match (graph, model) {
                (_, Some(path)) => GaussianModel::parse_text(&fs::read_to_string(path)?)?,
                (Some(path), None) => {
                    let g = Graph::parse_edge_list(&fs::read_to_string(path)?)?;
                    let spec = ModelSpec {
                        edge_weight,
                        diag_boost,
                        ..ModelSpec::default()
                    };
                    build_model(&spec, &g, 0)?
                }
                (None, None) => unreachable!("clap requires --graph or --model"),
            };
            let g = model.graph().clone();
            let mut engine = EngineConfig::new(algo, c, xi, lambda0);
            engine.seed = seed;
            engine.budget = budget_for(budget, algo, c, &g);
            let run = engine.run(&model)?;
            write_trace(BufWriter::new(File::create(with_suffix(&out_prefix, ".trace.csv"))?), &run.trace)?;
            fs::write(with_suffix(&out_prefix, ".edges.txt"), run.graph.to_edge_list())?;
            let hamming = activegm::hamming_distance(&g, &run.graph)?;
            println!(
                "{algo}: status = {}, hamming = {hamming}, scalar_total = {}, effective_samples = {:.1}",
                run.status.label(),
                run.scalar_total(),
                run.effective_samples()
            );
        }
        Command::Bench { config, out_dir } => {
            let cfg = BenchConfig::parse(&fs::read_to_string(&config)?)?;
            let provenance = cfg.to_text();
            fs::create_dir_all(&out_dir)?;
            let reports = run_battery(&cfg)?;
            write_reports(BufWriter::new(File::create(out_dir.join("trials.csv"))?), &reports, &provenance)?;
            let mut esc = esc_summary(&reports, 0.9);
            esc.extend(esc_summary(&reports, 1.0));
            write_esc(BufWriter::new(File::create(out_dir.join("esc.csv"))?), &esc, &provenance)?;
            write_curve(
                BufWriter::new(File::create(out_dir.join("hamming_curve.csv"))?),
                &hamming_curve(&reports),
                &provenance,
            )?;
            for s in &esc {
                let mean = s.mean_esc.map_or("-".to_string(), |m| format!("{m:.1}"));
                println!(
                    "{:<10} {:<16} target {:<4} esc {:>10} ({} trials, {} censored)",
                    s.algo, s.graph, s.target, mean, s.trials, s.censored
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
