use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use dota_learn::bench::{generate_random_dota, run_benchmark, BenchReport, GenParams};
use dota_learn::error::{Error, Result};
use dota_learn::learner::{learn, write_trace, LearnerOptions};
use dota_learn::model::Model;
use dota_learn::oracle::model_counterexample;
use dota_learn::teacher::{ScriptedTeacher, SimulatedTeacher, Teacher};
use dota_learn::word::TimedWord;

#[derive(Parser)]
#[command(name = "dota-learn", version, about = "Active learning of one-clock timed automata and timed Mealy machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Dota,
    Dtmm,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a model from a simulated teacher holding the target.
    Learn {
        #[arg(long)]
        target: PathBuf,
        #[arg(long, value_enum, default_value = "dota")]
        mode: Mode,
        /// `internal` or `smtlib:<path to solver binary>`.
        #[arg(long, default_value = "internal")]
        solver: String,
        /// Membership answers also tell whether the sink was hit.
        #[arg(long)]
        sink_info: bool,
        /// Counterexamples to hand out first, one timed word per line.
        #[arg(long)]
        scripted_ctx: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        stats: Option<PathBuf>,
        /// JSON lines, one event per line.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = 500)]
        max_iterations: usize,
        /// Seconds.
        #[arg(long, default_value_t = 600)]
        timeout: u64,
    },
    /// Exit 0 if the two models are equivalent, 1 with a counterexample otherwise.
    CheckEquiv { a: PathBuf, b: PathBuf },
    /// Write random complete automata as JSON files.
    Gen {
        #[arg(long)]
        locations: usize,
        #[arg(long)]
        alphabet: usize,
        #[arg(long)]
        kappa: u32,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Learn a batch of random targets and report query counts.
    Bench {
        /// `|Q|_|Σ|_κ`, e.g. `6_2_10`.
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Per-model budget in seconds.
        #[arg(long, default_value_t = 600)]
        timeout: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads, 0 for one per core.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value = "internal")]
        solver: String,
    },
}

fn read_script(path: &PathBuf, alphabet: &[String]) -> Result<Vec<TimedWord>> {
    fs::read_to_string(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| TimedWord::parse(l, alphabet))
        .collect()
}

fn write_json(path: &PathBuf, value: &impl serde::Serialize) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn verdict(m: &Model, w: &TimedWord) -> Result<serde_json::Value> {
    Ok(match m {
        Model::Dota(a) => json!(a.complete().accepts(w)?),
        Model::Dtmm(d) => json!(d.complete_with_void_loops().run_named(w)?),
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Learn { target, mode, solver, sink_info, scripted_ctx, out, stats, trace, max_iterations, timeout } => {
            let model = Model::load(&target)?;
            let kind_ok = matches!((&model, mode), (Model::Dota(_), Mode::Dota) | (Model::Dtmm(_), Mode::Dtmm));
            if !kind_ok {
                return Err(Error::Input("--mode does not match the target file".into()));
            }
            let inner = SimulatedTeacher::new(model.clone()).with_sink_info(sink_info);
            let mut teacher: Box<dyn Teacher> = match &scripted_ctx {
                Some(p) => Box::new(ScriptedTeacher::new(inner, read_script(p, model.alphabet())?)),
                None => Box::new(inner),
            };
            let options = LearnerOptions {
                solver,
                use_sink: sink_info,
                max_iterations,
                time_budget: Duration::from_secs(timeout),
            };
            let outcome = learn(teacher.as_mut(), &options)?;
            if let Some(p) = &trace {
                write_trace(&outcome.trace, BufWriter::new(File::create(p)?))?;
            }
            if let Some(p) = &stats {
                write_json(p, &outcome.stats)?;
            }
            match &out {
                Some(p) => outcome.model.save(p)?,
                None => println!("{}", outcome.model.to_json()),
            }
            eprintln!(
                "learned {} locations with {} membership and {} equivalence queries in {:.3}s",
                outcome.stats.locations,
                outcome.stats.membership,
                outcome.stats.equivalence,
                outcome.stats.wall_time.as_secs_f64()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckEquiv { a, b } => {
            let (ma, mb) = (Model::load(&a)?, Model::load(&b)?);
            match model_counterexample(&ma, &mb)? {
                None => {
                    println!("{}", json!({ "equivalent": true }));
                    Ok(ExitCode::SUCCESS)
                }
                Some(w) => {
                    let alphabet = ma.alphabet();
                    let pairs: Vec<_> =
                        w.to_named(alphabet).into_iter().map(|(s, d)| json!([s, d.to_string()])).collect();
                    let report = json!({
                        "equivalent": false,
                        "counterexample": w.display(alphabet).to_string(),
                        "word": pairs,
                        "a": verdict(&ma, &w)?,
                        "b": verdict(&mb, &w)?,
                    });
                    println!("{}", serde_json::to_string_pretty(&report)?);
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Gen { locations, alphabet, kappa, count, seed, out } => {
            fs::create_dir_all(&out)?;
            let base = GenParams { locations, alphabet_size: alphabet, kappa, seed };
            for i in 0..count {
                let p = base.instance(i);
                let path = out.join(format!("{}_{:03}.json", p.group(), i));
                Model::Dota(generate_random_dota(&p)?).save(&path)?;
                println!("{}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { group, count, timeout, seed, threads, report, csv, solver } => {
            let params = GenParams::from_group(&group, seed)?;
            let options = LearnerOptions { solver, time_budget: Duration::from_secs(timeout), ..Default::default() };
            let r = run_benchmark(&params, count, &options, threads);
            if let Some(p) = &report {
                write_json(p, &r)?;
            }
            let table = format!("{}\n{}\n", BenchReport::CSV_HEADER, r.csv_row());
            if let Some(p) = &csv {
                fs::write(p, &table)?;
            }
            print!("{table}");
            for i in r.instances.iter().filter(|i| !i.verified) {
                eprintln!("seed {}: {}", i.seed, i.error.as_deref().unwrap_or("not verified"));
            }
            Ok(if r.learnt == r.count { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
