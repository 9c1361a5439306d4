//! `certlab`: generators, reconstructors and evaluation harnesses from the command line.

mod config;
mod selftest;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use certlab::graph::{exact_deck_equal, BipartiteIncidence, Deck, Deckable, Graph};
use certlab::harness::{
    evaluate_involution, evaluate_rota, generate_bipartite, run_recon_bench, Bench,
    HardNegativeBuffer, MetricTable, ReconBenchConfig, ReconFamily, ReconInstance,
};
use certlab::involutions::{Exp1Map, Exp2Map, Exp3Map, InvolutionMap};
use certlab::planar::generate_planar;
use certlab::rng::{derive_seed, stream, Purpose};
use certlab::rota::{CircuitFeature, Policy, PolicyId};
use certlab::{bipartite, planar};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use config::RunConfig;

/// Why a run did not succeed; selects the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, files or settings: exit 2.
    Usage(String),
    /// The evaluation itself failed: exit 1.
    Eval(String),
}

impl From<certlab::Error> for Failure {
    fn from(e: certlab::Error) -> Self {
        Failure::Eval(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "certlab",
    version,
    about = "Exact verifiers and local-correction harnesses"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON settings file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Report format. CSV is available for metric tables only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true, env = "CERTLAB_SEED")]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Random 2-connected non-regular bipartite instances with scrambled decks.
    GenBipartite {
        /// Vertices per side.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Random planar instances with scrambled decks.
    GenPlanar {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Reconstruct a bipartite graph from a deck file.
    ReconBipartite {
        #[arg(long)]
        deck: PathBuf,
        #[arg(long)]
        u: usize,
        #[arg(long)]
        v: usize,
        /// Record to read when the file holds a list of generated instances.
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Reconstruct a planar graph from a deck file.
    ReconPlanar {
        #[arg(long)]
        deck: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Worst-of-S reconstruction benchmark over generated instances.
    ReconBench {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, value_delimiter = ',', default_value = "6,7,8")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        scrambles: usize,
        /// Hard-negative buffer: replayed first, then updated with new failures.
        #[arg(long)]
        buffer: Option<PathBuf>,
    },
    /// Involution metrics on generated Latin squares.
    LatinEval {
        #[arg(long, value_enum)]
        map: MapName,
        #[arg(long, value_delimiter = ',', default_value = "8,10,12,14")]
        orders: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        per_order: usize,
        #[arg(long)]
        isotopy_stress: bool,
        /// Score the locality of successful moves.
        #[arg(long)]
        locality: bool,
    },
    /// Rainbow-basis benchmark for one policy.
    RotaEval {
        #[arg(long)]
        bench: Bench,
        #[arg(long, value_enum)]
        policy: PolicyName,
        /// Switch off the policy's random terms.
        #[arg(long)]
        derandomize: bool,
        /// Override the preset's instance count per rank.
        #[arg(long)]
        instances_per_rank: Option<usize>,
        /// Column described by the circuit-size feature of repair moves.
        #[arg(long, value_enum, default_value_t = CircuitChoice::Target)]
        circuit_feature: CircuitChoice,
    },
    /// Exhaustive Latin-square and circuit-search oracles.
    Selftest,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Bipartite,
    Planar,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MapName {
    E1,
    E2,
    E3,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CircuitChoice {
    Target,
    RepairSource,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyName {
    Rank5,
    Rank7,
    Scale,
}

#[derive(Serialize)]
struct GeneratedBipartite {
    index: usize,
    seed: u64,
    u: usize,
    v: usize,
    instance: BipartiteIncidence,
    deck: Deck,
}

#[derive(Serialize)]
struct GeneratedPlanar {
    index: usize,
    seed: u64,
    n: usize,
    instance: Graph,
    deck: Deck,
}

#[derive(Serialize)]
struct ReconReport<G> {
    reconstruction: Option<G>,
    exact: bool,
    error: Option<String>,
}

/// What a subcommand produced.
enum Output {
    Json(Value),
    Table {
        json: Value,
        header: Vec<&'static str>,
        rows: Vec<Vec<String>>,
    },
}

fn json<T: Serialize>(value: &T) -> Result<Value, Failure> {
    serde_json::to_value(value).map_err(|e| Failure::Eval(e.to_string()))
}

fn table<T: Serialize + MetricTable>(report: &T) -> Result<Output, Failure> {
    Ok(Output::Table {
        json: json(report)?,
        header: report.header(),
        rows: report.rows(),
    })
}

fn read_deck(path: &Path, index: usize) -> Result<Deck, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let record = match value {
        Value::Array(mut items) if index < items.len() => items.swap_remove(index),
        Value::Array(items) => {
            return Err(Failure::Usage(format!(
                "index {index} out of range for {} records",
                items.len()
            )))
        }
        other => other,
    };
    let deck = match record {
        Value::Object(mut map) if map.contains_key("deck") => map.remove("deck").expect("checked"),
        other => other,
    };
    serde_json::from_value(deck)
        .map_err(|e| Failure::Usage(format!("{} does not hold a deck: {e}", path.display())))
}

fn reconstruct<G: Deckable + Serialize>(
    deck: &Deck,
    result: certlab::Result<G>,
) -> Result<(Value, bool), Failure> {
    let report = match result {
        Ok(g) => {
            let exact = exact_deck_equal(&g.deck(), deck);
            ReconReport {
                reconstruction: Some(g),
                exact,
                error: None,
            }
        }
        Err(e) => ReconReport {
            reconstruction: None,
            exact: false,
            error: Some(e.to_string()),
        },
    };
    let ok = report.exact;
    Ok((json(&report)?, ok))
}

fn run(cli: Cli) -> Result<(Output, bool), Failure> {
    let config = RunConfig::load(cli.common.config.as_deref())?;
    if let Some(threads) = cli.common.threads.or(config.threads) {
        if threads == 0 {
            return Err(Failure::Usage("threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let seed = cli.common.seed.or(config.seed).unwrap_or(0);
    let bench_config = ReconBenchConfig {
        weights: config.score_weights.unwrap_or_default(),
        bipartite: config.bipartite.unwrap_or_default(),
        planar: config.planar.unwrap_or_default(),
        ..ReconBenchConfig::default()
    };
    match cli.command {
        Command::GenBipartite { n, count } => {
            let records = (0..count)
                .map(|i| {
                    let s = derive_seed(seed, Purpose::Instance, i as u64);
                    let m = generate_bipartite(n, s, &bench_config.bipartite)?;
                    let deck = m.deck().scrambled(&mut stream(s, Purpose::Scramble, 0));
                    Ok(GeneratedBipartite {
                        index: i,
                        seed: s,
                        u: n,
                        v: n,
                        instance: m,
                        deck,
                    })
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            Ok((Output::Json(json(&records)?), true))
        }
        Command::GenPlanar { n, count } => {
            let records = (0..count)
                .map(|i| {
                    let s = derive_seed(seed, Purpose::Instance, i as u64);
                    let g = generate_planar(n, s, &bench_config.planar)?;
                    let deck = g.deck().scrambled(&mut stream(s, Purpose::Scramble, 0));
                    Ok(GeneratedPlanar {
                        index: i,
                        seed: s,
                        n,
                        instance: g,
                        deck,
                    })
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            Ok((Output::Json(json(&records)?), true))
        }
        Command::ReconBipartite { deck, u, v, index } => {
            let deck = read_deck(&deck, index)?;
            let (value, ok) = reconstruct(&deck, bipartite::reconstruct_bipartite(&deck, u, v))?;
            Ok((Output::Json(value), ok))
        }
        Command::ReconPlanar { deck, n, index } => {
            let deck = read_deck(&deck, index)?;
            let (value, ok) = reconstruct(&deck, planar::reconstruct_planar(&deck, n))?;
            Ok((Output::Json(value), ok))
        }
        Command::ReconBench {
            family,
            count,
            sizes,
            scrambles,
            buffer,
        } => {
            if sizes.is_empty() {
                return Err(Failure::Usage("--sizes must list at least one size".into()));
            }
            let family = match family {
                Family::Bipartite => ReconFamily::Bipartite,
                Family::Planar => ReconFamily::Planar,
            };
            let mut hard: HardNegativeBuffer<ReconInstance> = match &buffer {
                Some(path) => HardNegativeBuffer::load(path)?,
                None => HardNegativeBuffer::default(),
            };
            let replayed: Vec<ReconInstance> = hard
                .iter()
                .filter(|i| i.family == family)
                .copied()
                .collect();
            let mut instances = replayed;
            instances.extend(ReconInstance::batch(family, count, &sizes, seed));
            let report = run_recon_bench(
                family,
                &instances,
                &ReconBenchConfig {
                    scrambles,
                    ..bench_config
                },
            )?;
            if let Some(path) = &buffer {
                report.record_failures(&mut hard);
                hard.save(path)?;
            }
            Ok((table(&report)?, true))
        }
        Command::LatinEval {
            map,
            orders,
            per_order,
            isotopy_stress,
            locality,
        } => {
            let map: Box<dyn InvolutionMap> = match map {
                MapName::E1 => Box::new(Exp1Map::new(config.exp1.unwrap_or_default())),
                MapName::E2 => Box::new(Exp2Map),
                MapName::E3 => Box::new(Exp3Map),
            };
            let report = evaluate_involution(
                map.as_ref(),
                &orders,
                per_order,
                seed,
                isotopy_stress,
                locality,
            )
            .map_err(|e| Failure::Usage(e.to_string()))?;
            Ok((table(&report)?, true))
        }
        Command::RotaEval {
            bench,
            policy,
            derandomize,
            instances_per_rank,
            circuit_feature,
        } => {
            let id = match policy {
                PolicyName::Rank5 => PolicyId::Rank5,
                PolicyName::Rank7 => PolicyId::Rank7,
                PolicyName::Scale => PolicyId::ScaleAware,
            };
            let policy = if derandomize {
                Policy::derandomized(id)
            } else {
                Policy::new(id)
            };
            let mut bench_cfg = bench.config();
            if let Some(k) = instances_per_rank {
                bench_cfg.instances_per_rank = k;
            }
            bench_cfg.circuit_feature = match circuit_feature {
                CircuitChoice::Target => CircuitFeature::Target,
                CircuitChoice::RepairSource => CircuitFeature::RepairSource,
            };
            if let Some(w) = config.fitness_weights {
                bench_cfg.weights = w;
            }
            let report = evaluate_rota(&policy, &bench_cfg, seed)?;
            Ok((table(&report)?, true))
        }
        Command::Selftest => {
            let report = selftest::run(seed);
            Ok((Output::Json(json(&report)?), report.passed))
        }
    }
}

fn render(output: &Output, format: Format) -> Result<Vec<u8>, Failure> {
    match (output, format) {
        (Output::Json(v) | Output::Table { json: v, .. }, Format::Json) => {
            let mut bytes =
                serde_json::to_vec_pretty(v).map_err(|e| Failure::Eval(e.to_string()))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        (Output::Table { header, rows, .. }, Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Failure::Eval(e.to_string());
            w.write_record(header).map_err(io)?;
            for r in rows {
                w.write_record(r).map_err(io)?;
            }
            w.into_inner().map_err(|e| Failure::Eval(e.to_string()))
        }
        (Output::Json(_), Format::Csv) => {
            Err(Failure::Usage("this subcommand has no CSV form".into()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (format, out) = (cli.common.format, cli.common.out.clone());
    let result = run(cli).and_then(|(output, ok)| {
        let bytes = render(&output, format)?;
        match &out {
            Some(path) => fs::write(path, &bytes)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?,
            None => io::stdout()
                .write_all(&bytes)
                .map_err(|e| Failure::Eval(e.to_string()))?,
        }
        Ok(ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Eval(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
