use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tep_core::channel::{transmit, ReceivedWord};
use tep_core::de::{self, DeConfig};
use tep_core::ensemble::{sample_graph, CodeGraph, DegreeDistribution, Encoder};
use tep_core::graph::{ResolutionLedger, TannerGraph};
use tep_core::harness::{ml_oracle_decode, parse_eps_grid, records_csv, wer_campaign, Decoder};
use tep_core::trace::{format_sig, trajectory_csv};
use tep_core::{bp_run, tep_run, tep_trace, Error, Result, Schedule};

#[derive(Parser)]
#[command(name = "tep", version, about = "BP and TEP decoding of LDPC codes over the erasure channel")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a code from an LDPC ensemble.
    Sample {
        #[command(flatten)]
        dd: DdArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transmit a codeword over the erasure channel and decode it.
    Decode(DecodeArgs),
    /// Word-error-rate campaign.
    Wer {
        #[command(flatten)]
        dd: DdArgs,
        #[arg(long)]
        n: usize,
        /// `start:stop:step` or a comma-separated list.
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 100)]
        graphs: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value = "bp,tep")]
        decoders: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Density evolution.
    De {
        #[command(subcommand)]
        cmd: DeCmd,
    },
    /// Maximum-likelihood decoding by Gaussian elimination.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        input: ChannelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DeCmd {
    /// Largest erasure probability at which peeling succeeds asymptotically.
    BpThreshold {
        #[command(flatten)]
        dd: DdArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower bound on the TEP threshold from the Stage A / Stage B analysis.
    TepThreshold {
        #[command(flatten)]
        dd: DdArgs,
        #[command(flatten)]
        num: NumArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stage A (and optionally Stage B) trajectory from the BP stall.
    Trace {
        #[command(flatten)]
        dd: DdArgs,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        num: NumArgs,
        #[arg(long, value_enum, default_value_t = Stages::A)]
        stages: Stages,
        /// Keep every k-th Euler step.
        #[arg(long, default_value_t = 100)]
        every: usize,
        #[arg(long, default_value_t = 64)]
        max_cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Stages {
    A,
    Ab,
}

#[derive(Args)]
struct DdArgs {
    /// Edge-perspective variable polynomial, e.g. `x^2`.
    #[arg(long, requires = "rho", conflicts_with = "dd")]
    lambda: Option<String>,
    #[arg(long, requires = "lambda")]
    rho: Option<String>,
    /// Degree-distribution file (`L d c` / `R d c` lines or `lambda`/`rho` lines).
    #[arg(long)]
    dd: Option<PathBuf>,
}

impl DdArgs {
    fn load(&self) -> Result<DegreeDistribution> {
        match (&self.lambda, &self.rho, &self.dd) {
            (Some(l), Some(r), None) => DegreeDistribution::from_polynomials(l, r),
            (None, None, Some(p)) => DegreeDistribution::parse(&fs::read_to_string(p)?),
            _ => Err(Error::InvalidArgument("give --lambda and --rho, or --dd".into())),
        }
    }
}

#[derive(Args)]
struct NumArgs {
    #[arg(long, default_value_t = DeConfig::DEFAULT_E_REF)]
    e_ref: f64,
    /// Euler step relative to r2 at the stall.
    #[arg(long, default_value_t = DeConfig::DEFAULT_DT_REL)]
    dt: f64,
    #[arg(long, default_value_t = DeConfig::DEFAULT_D_MAX)]
    d_max: usize,
}

impl NumArgs {
    fn config(&self) -> DeConfig {
        DeConfig {
            e_ref: self.e_ref,
            dt_rel: self.dt,
            d_max: self.d_max,
            record_every: 0,
        }
    }
}

#[derive(Args)]
struct ChannelArgs {
    /// Received word as a string over `0`, `1`, `?`.
    #[arg(long, conflicts_with_all = ["eps", "seed"])]
    received: Option<String>,
    #[arg(long, requires = "seed")]
    eps: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Transmit the all-zero word instead of a random codeword.
    #[arg(long)]
    zero: bool,
}

impl ChannelArgs {
    /// The received word and, when known, the transmitted codeword.
    fn receive(&self, code: &CodeGraph) -> Result<(ReceivedWord, Option<Vec<u8>>)> {
        if let Some(text) = &self.received {
            let values = text
                .trim()
                .chars()
                .map(|c| match c {
                    '0' => Ok(Some(0)),
                    '1' => Ok(Some(1)),
                    '?' => Ok(None),
                    other => Err(Error::Parse(format!("bad received symbol '{other}'"))),
                })
                .collect::<Result<Vec<_>>>()?;
            if values.len() != code.num_vars() {
                return Err(Error::LengthMismatch {
                    expected: code.num_vars(),
                    got: values.len(),
                });
            }
            return Ok((
                ReceivedWord {
                    values,
                    epsilon: f64::NAN,
                    seed: 0,
                },
                None,
            ));
        }
        let (Some(eps), Some(seed)) = (self.eps, self.seed) else {
            return Err(Error::InvalidArgument("give --received, or --eps with --seed".into()));
        };
        let codeword = if self.zero {
            vec![0; code.num_vars()]
        } else {
            let enc = Encoder::new(code);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x636f_6465_776f_7264);
            let msg: Vec<u8> = (0..enc.message_len()).map(|_| rng.gen_range(0..2)).collect();
            enc.encode(&msg)?
        };
        Ok((transmit(&codeword, eps, seed)?, Some(codeword)))
    }
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    input: ChannelArgs,
    #[arg(long, default_value = "tep")]
    decoder: String,
    #[arg(long, default_value = "practical")]
    schedule: String,
    /// Write the degree-distribution trajectory (TEP only).
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    every: usize,
    /// Write the residual graph on a stall.
    #[arg(long)]
    residual: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn word_string(bits: &[Option<u8>]) -> String {
    bits.iter()
        .map(|b| match b {
            Some(0) => '0',
            Some(_) => '1',
            None => '?',
        })
        .collect()
}

fn run_decode(a: &DecodeArgs) -> Result<()> {
    let code = CodeGraph::parse(&fs::read_to_string(&a.graph)?)?;
    let (rw, sent) = a.input.receive(&code)?;
    let decoder: Decoder = a.decoder.parse()?;
    let schedule: Schedule = a.schedule.parse()?;
    let mut g = TannerGraph::initialize(&code, &rw)?;
    let mut ledger = ResolutionLedger::from_received(&rw);
    let out = match decoder {
        Decoder::Bp => bp_run(&mut g, &mut ledger)?,
        Decoder::Tep if a.trace.is_some() => {
            let (out, rows) = tep_trace(&mut g, &mut ledger, schedule, a.every)?;
            fs::write(a.trace.as_ref().unwrap(), trajectory_csv(&rows, usize::MAX))?;
            out
        }
        Decoder::Tep => tep_run(&mut g, &mut ledger, schedule)?,
        Decoder::Ml => ml_oracle_decode(&code, &rw)?,
    };
    if let (Some(p), false) = (&a.residual, out.is_success()) {
        fs::write(p, g.dump_residual())?;
    }
    let c = g.counters();
    let mut text = format!(
        "status={}\ndecoder={decoder}\nerasures={}\niterations={}\npeels={}\nmerges={}\nunresolved={}\n",
        if out.is_success() { "success" } else { "stalled" },
        rw.erasures(),
        out.iterations,
        c.peels,
        c.merges,
        out.assignment.iter().filter(|b| b.is_none()).count(),
    );
    if let Some(sent) = sent {
        let correct = out
            .assignment
            .iter()
            .zip(&sent)
            .all(|(b, s)| b.is_none_or(|b| b == *s));
        text.push_str(&format!("consistent_with_sent={}\n", correct as u8));
    }
    text.push_str(&format!("word={}\n", word_string(&out.assignment)));
    emit(&a.out, &text)
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Sample { dd, n, seed, out } => {
            let inst = sample_graph(&dd.load()?, n, seed)?;
            let text = format!(
                "# seed {seed} sockets {} collapsed_pairs {}\n{}",
                inst.edges,
                inst.collapsed_pairs,
                inst.code.to_text()
            );
            emit(&out, &text)
        }
        Cmd::Decode(a) => run_decode(&a),
        Cmd::Wer {
            dd,
            n,
            eps,
            graphs,
            trials,
            decoders,
            seed,
            out,
        } => {
            let decoders = decoders.split(',').map(str::parse).collect::<Result<Vec<Decoder>>>()?;
            let grid = parse_eps_grid(&eps)?;
            let recs = wer_campaign(&dd.load()?, n, &grid, graphs, trials, seed, &decoders)?;
            emit(&out, &records_csv(&recs))
        }
        Cmd::Oracle { graph, input, out } => {
            let code = CodeGraph::parse(&fs::read_to_string(&graph)?)?;
            let (rw, _) = input.receive(&code)?;
            let res = ml_oracle_decode(&code, &rw)?;
            let text = format!(
                "status={}\nerasures={}\nrank={}\nunresolved={}\nword={}\n",
                if res.is_success() { "success" } else { "ambiguous" },
                rw.erasures(),
                res.iterations,
                res.residual.alive_vars,
                word_string(&res.assignment)
            );
            emit(&out, &text)
        }
        Cmd::De { cmd } => match cmd {
            DeCmd::BpThreshold { dd, out } => {
                let t = de::bp_threshold(&dd.load()?);
                emit(&out, &format!("eps_bp={}\n", format_sig(t, 9)))
            }
            DeCmd::TepThreshold { dd, num, out } => {
                let started = Instant::now();
                let t = de::tep_threshold_lower_bound(&dd.load()?, &num.config())?;
                let mut text = t.report();
                text.push_str(&format!("seconds={}\n", format_sig(started.elapsed().as_secs_f64(), 4)));
                emit(&out, &text)
            }
            DeCmd::Trace {
                dd,
                eps,
                num,
                stages,
                every,
                max_cap,
                out,
            } => {
                let dd = dd.load()?;
                let mut cfg = num.config();
                cfg.record_every = every.max(1);
                let start = de::residual_dd_at_stall(&dd, eps, cfg.e_ref)?;
                let dt = cfg.step_for(&start);
                let a = de::stage_a_integrate(&start, dt, &cfg)?;
                let mut states = a.trajectory.clone();
                if matches!(stages, Stages::Ab) && a.end_reason == de::EndReason::PbReachedOne {
                    let b = de::stage_b_integrate(&a.final_state, dt, &cfg)?;
                    // Stage B continues the clock of Stage A
                    states.extend(b.trajectory.into_iter().skip(1));
                }
                let rows: Vec<_> = states.iter().map(|s| s.to_row(de::p_shared_check(s))).collect();
                emit(&out, &trajectory_csv(&rows, max_cap))
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Contradiction { .. } => 1,
                _ => 2,
            })
        }
    }
}
