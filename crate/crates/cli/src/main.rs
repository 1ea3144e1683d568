use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use socsim_core::exec::{self, Execution};
use socsim_core::gcn::{self, GcnConfig, TrainInputs, Variant};
use socsim_core::graph::io::read_graph_dir;
use socsim_core::graph::SocialGraph;
use socsim_core::harness::{self, ExperimentPlan};
use socsim_core::sdna::{self, output, SimConfig};
use socsim_core::similarity::{self, io as matrix_io, SimilarityKind, SimilaritySpec, Thresholds};

#[derive(Parser)]
#[command(
    name = "socsim",
    version,
    about = "Simulate sDNA social networks and run GCN experiments on them"
)]
struct Cli {
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a network and write one directory per snapshot.
    Simulate {
        /// JSON file with the simulator fields; defaults to the desk profile.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        snapshots: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a timestamped edge stream, one edge per socialise round.
    Events {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        events: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a graph representative from a snapshot directory.
    Representative {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "adjacency")]
        kind: String,
        #[arg(long, default_value_t = 0.005)]
        beta: f64,
        #[arg(long, default_value_t = 5)]
        max_power: u32,
        #[arg(long, default_value_t = 0.85)]
        alpha: f64,
        /// Two numbers `LO HI`, or the single word `auto`.
        #[arg(long, num_args = 1..=2, value_names = ["LO", "HI"])]
        thresholds: Option<Vec<String>>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
    /// Train one model on one fold of a snapshot directory.
    Train {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "FTvanilla")]
        variant: String,
        #[arg(long)]
        use_s: bool,
        #[arg(long, default_value = "adjacency")]
        kind: String,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, default_value_t = 0)]
        fold: usize,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory receiving `model.socm` and `history.csv`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a cross-validated experiment plan.
    Experiment {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a stored report.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
        format: ReportFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Csv,
    Best,
    Json,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn sim_config(path: Option<&Path>) -> Result<SimConfig> {
    let cfg = match path {
        Some(p) => read_json(p)?,
        None => SimConfig::desk(),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Reads a snapshot directory, taking the snapshot index from `meta.json`
/// when the simulator wrote one.
fn load_graph(dir: &Path) -> Result<SocialGraph> {
    let mut g = read_graph_dir(dir)?;
    let meta = dir.join(output::META_FILE);
    if meta.exists() {
        let meta: output::SnapshotMeta = read_json(&meta)?;
        g.set_snapshot_index(meta.snapshot_index);
    }
    Ok(g)
}

fn parse_thresholds(raw: Option<&[String]>) -> Result<Thresholds> {
    match raw {
        None => Ok(Thresholds::default()),
        Some([one]) if one.eq_ignore_ascii_case("auto") => Ok(Thresholds::Auto),
        Some([lo, hi]) => Ok(Thresholds::Range {
            lo: lo.parse().context("parsing LO")?,
            hi: hi.parse().context("parsing HI")?,
        }),
        Some(other) => bail!("--thresholds takes `LO HI` or `auto`, got {other:?}"),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match cli.command {
        Command::Simulate { config, snapshots, out } => {
            let cfg = sim_config(config.as_deref())?;
            let snaps = sdna::run_dynamic(&cfg, snapshots)?;
            let dirs = output::write_snapshots(&out, &cfg, &snaps)?;
            for (dir, snap) in dirs.iter().zip(&snaps) {
                println!(
                    "{}: {} edges (+{})",
                    dir.display(),
                    snap.graph.edge_count(),
                    snap.added_edges
                );
            }
        }
        Command::Events { config, events, out } => {
            let cfg = sim_config(config.as_deref())?;
            let stream = sdna::emit_event_stream(&cfg, events)?;
            output::write_events(&out, &stream.events)?;
            println!("{} events written to {}", stream.events.len(), out.display());
            if stream.saturated {
                eprintln!(
                    "graph saturated after {} of {} events",
                    stream.events.len(),
                    stream.requested
                );
            }
        }
        Command::Representative {
            graph,
            kind,
            beta,
            max_power,
            alpha,
            thresholds,
            out,
            out_csv,
        } => {
            let g = load_graph(&graph)?;
            let spec = SimilaritySpec {
                kind: kind.parse()?,
                katz_beta: beta,
                katz_max_power: max_power,
                rpr_alpha: alpha,
                thresholds: parse_thresholds(thresholds.as_deref())?,
            };
            let rep = similarity::build_representative(&g, &spec)?;
            matrix_io::write_matrix_bin(&out, &rep.matrix)?;
            if let Some(csv) = out_csv {
                matrix_io::write_matrix_csv(&csv, &rep.matrix)?;
            }
            println!("{} ({}x{})", rep.provenance, rep.dim(), rep.dim());
        }
        Command::Train {
            graph,
            variant,
            use_s,
            kind,
            folds,
            fold,
            epochs,
            seed,
            out,
        } => {
            let g = load_graph(&graph)?;
            let variant: Variant = variant.parse()?;
            let kind: SimilarityKind = kind.parse()?;
            let rep = similarity::build_representative(&g, &SimilaritySpec::of(kind, Thresholds::default()))?;
            let labels = g.sdna_of();
            let masks = harness::make_folds(labels, folds, seed)?;
            let Some(split) = masks.get(fold) else {
                bail!("--fold {fold} out of range for {folds} folds");
            };
            let cfg = GcnConfig {
                variant,
                use_s,
                epochs,
                seed,
                num_classes: labels.iter().max().map_or(0, |m| m + 1),
                ..GcnConfig::default()
            };
            let inputs = TrainInputs::new(&rep, g.features(), labels, &split.train, &split.test)?;
            let (model, history) = gcn::train(&inputs, &cfg)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            gcn::save_checkpoint(&out.join("model.socm"), &model)?;
            gcn::write_history_csv(&out.join("history.csv"), &history)?;
            println!("test accuracy {:.3}", gcn::evaluate(&model, &inputs)?);
        }
        Command::Experiment { plan, out } => {
            let plan: ExperimentPlan = read_json(&plan)?;
            let report = harness::run_experiment_with(&plan, exec, |snap| {
                let failed = snap.cells.iter().filter(|c| !c.is_ok()).count();
                eprintln!(
                    "{}: best {} hypothesis {:?}{}",
                    snap.name,
                    snap.best.as_deref().unwrap_or("none"),
                    snap.hypothesis,
                    if failed > 0 {
                        format!(" ({failed} failed cells)")
                    } else {
                        String::new()
                    }
                );
            })?;
            harness::emit_report(&report, &out)?;
            let failed = report.failed_cells();
            if failed > 0 {
                eprintln!(
                    "{failed} cell(s) failed; see {}",
                    out.join(harness::REPORT_FILE).display()
                );
                return Ok(ExitCode::from(2));
            }
        }
        Command::Report { input, format } => {
            let report = harness::load_report(&input)?;
            match format {
                ReportFormat::Csv => print!("{}", harness::render_summary_csv(&report)),
                ReportFormat::Best => print!("{}", harness::render_best_csv(&report)),
                ReportFormat::Json => println!("{}", serde_json::to_string_pretty(&report)?),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    if let Ok(w) = std::env::var("SOCSIM_WORKERS") {
        match w.parse::<usize>() {
            Ok(n) if n > 0 => {
                exec::set_worker_count(n);
            }
            _ => eprintln!("ignoring SOCSIM_WORKERS={w:?}"),
        }
    }
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
