use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use brickrl::service::{serve_stream, serve_tcp, ServeOptions};
use brickrl::workflows::{evaluate_pairs, gen_fixtures, load_target, read_pairs, FixtureOptions};
use brickrl_core::construct::{legalize, ConstructorOptions, TargetParams};
use brickrl_core::dataset::{convert_corpus_file, ConvertMode};
use brickrl_core::metrics::{aggregate, emit_report, ReportFormat};
use brickrl_core::parser::{parse_structure, serialize_structure, Layout};
use brickrl_core::reward::score_completion;
use brickrl_core::WorldConfig;
use clap::{Parser, Subcommand, ValueEnum};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

#[derive(Parser)]
#[command(name = "brickrl", version, about = "Brick structure parsing, scoring, evaluation and reward serving")]
struct Cli {
    /// World size as X,Y,Z.
    #[arg(long, global = true, default_value = "20,20,20", value_parser = parse_world)]
    world: WorldConfig,
    /// Seed for the constructor and fixture generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse brick text and print the parse report with the normalized listing.
    Parse {
        /// Brick text file; stdin when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Score one completion against a target.
    Score {
        /// Target file: point-token text or base64 voxel codec.
        #[arg(long)]
        target: PathBuf,
        /// Completion text file.
        #[arg(long)]
        completion: PathBuf,
    },
    /// Evaluate a file of completion/target pairs.
    Eval {
        /// Newline-delimited JSON pairs.
        #[arg(long)]
        pairs: PathBuf,
        /// Report destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Tabular)]
        format: Format,
        /// Exit 3 unless every sample parses, is collision-free and in bounds.
        #[arg(long)]
        acceptance: bool,
    },
    /// Convert brick layouts into fine-tuning or RL records.
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Legalize a voxel target into a brick listing.
    Construct {
        /// Target file: point-token text or base64 voxel codec.
        #[arg(long)]
        grid: PathBuf,
        /// Offset odd layers so seams alternate.
        #[arg(long)]
        stagger: bool,
        /// Take the first fitting brick instead of the largest.
        #[arg(long)]
        first_fit: bool,
    },
    /// Write seeded random layouts and evaluation pairs.
    GenFixtures {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = TargetParams::default().max_components)]
        max_components: u32,
        #[arg(long, default_value_t = TargetParams::default().fill_prob)]
        fill_prob: f64,
        /// Allow floating blobs instead of columns grounded at z = 0.
        #[arg(long)]
        floating: bool,
        #[arg(long)]
        stagger: bool,
    },
    /// Serve reward requests as newline-delimited JSON over stdio or TCP.
    Serve {
        /// Listen on this TCP port instead of stdio.
        #[arg(long)]
        tcp: Option<u16>,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tabular,
    Records,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Sft,
    Grpo,
}

fn parse_world(s: &str) -> std::result::Result<WorldConfig, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [x, y, z] = parts.as_slice() else {
        return Err("expected X,Y,Z".into());
    };
    let num = |v: &str| v.parse::<u32>().map_err(|e| format!("{v:?}: {e}"));
    WorldConfig::new(num(x)?, num(y)?, num(z)?).map_err(|e| e.to_string())
}

fn read_text(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            Ok(s)
        }
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Runs a command; `Ok` carries the exit code, `Err` is an I/O or input failure.
fn run(cli: Cli) -> Result<u8> {
    let world = cli.world;
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    let mut stdout = io::stdout().lock();

    match cli.command {
        Command::Parse { input } => {
            let text = read_text(input.as_deref())?;
            let (structure, report) = parse_structure(&text);
            let out = serde_json::json!({
                "report": report,
                "normalized": serialize_structure(&structure, Layout::OnePerLine),
            });
            writeln!(stdout, "{}", serde_json::to_string_pretty(&out)?)?;
            Ok(0)
        }
        Command::Score { target, completion } => {
            let target = load_target(&target, world)?;
            let text = read_text(Some(&completion))?;
            let breakdown = score_completion(&text, &target, world)?;
            writeln!(stdout, "{}", serde_json::to_string_pretty(&breakdown)?)?;
            Ok(0)
        }
        Command::Eval {
            pairs,
            out,
            format,
            acceptance,
        } => {
            let file = File::open(&pairs).with_context(|| format!("opening {}", pairs.display()))?;
            let pairs = read_pairs(BufReader::new(file))?;
            let samples = evaluate_pairs(&pairs, world, threads)?;
            let report = aggregate(&samples)?;
            let format = match format {
                Format::Tabular => ReportFormat::TabularText,
                Format::Records => ReportFormat::StructuredRecords,
            };
            let mut w = open_out(out.as_deref())?;
            emit_report(&mut w, &report, &samples, format)?;
            w.flush()?;
            if acceptance {
                let failing = samples.iter().filter(|s| !(s.parsed && s.collision_free && s.in_bounds)).count();
                if failing > 0 {
                    eprintln!("acceptance: {failing} of {} samples are unparsed, colliding or out of bounds", samples.len());
                    return Ok(EXIT_VALIDATION);
                }
            }
            Ok(0)
        }
        Command::Convert { input, output, mode } => {
            let mode = match mode {
                Mode::Sft => ConvertMode::Sft,
                Mode::Grpo => ConvertMode::Grpo,
            };
            let stats = convert_corpus_file(&input, &output, mode, world)
                .with_context(|| format!("converting {} to {}", input.display(), output.display()))?;
            eprintln!("converted {} records, skipped {}", stats.converted, stats.skipped);
            Ok(0)
        }
        Command::Construct {
            grid,
            stagger,
            first_fit,
        } => {
            let target = load_target(&grid, world)?;
            let opts = ConstructorOptions {
                stagger,
                seed: cli.seed,
                largest_first: !first_fit,
            };
            let structure = legalize(&target, &opts);
            writeln!(stdout, "{}", serialize_structure(&structure, Layout::OnePerLine))?;
            Ok(0)
        }
        Command::GenFixtures {
            out,
            count,
            max_components,
            fill_prob,
            floating,
            stagger,
        } => {
            let opts = FixtureOptions {
                count,
                seed: cli.seed,
                target: TargetParams {
                    max_components,
                    fill_prob,
                    grounded: !floating,
                },
                constructor: ConstructorOptions {
                    stagger,
                    seed: cli.seed,
                    largest_first: true,
                },
            };
            gen_fixtures(&out, &opts, world)?;
            Ok(0)
        }
        Command::Serve { tcp, bind } => {
            let opts = ServeOptions { threads, world };
            match tcp {
                Some(port) => {
                    let listener = TcpListener::bind((bind.as_str(), port))
                        .with_context(|| format!("binding {bind}:{port}"))?;
                    log::info!("listening on {}", listener.local_addr()?);
                    serve_tcp(listener, opts)?;
                }
                None => {
                    drop(stdout);
                    let stats = serve_stream(io::stdin().lock(), BufWriter::new(io::stdout()), opts)?;
                    log::info!("served {} requests", stats.requests);
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_IO)
        }
    }
}
