//! `nilaw`: batch front end for the nilpotency-law workbench.
//!
//! Exit status: 0 on success, 1 when `verify` finds a bad certificate,
//! 2 on validation or budget errors, 3 when a soundness check fails.

use std::path::{Path, PathBuf};
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use nilaw_core::catalog::{self, GroupSpec};
use nilaw_core::certificate::{verify_bundle, CertificateBundle};
use nilaw_core::density::{
    commuting_probability_via_classes, exact_density, mc_density, DEFAULT_DENSITY_BUDGET,
};
use nilaw_core::lemma::{
    proof_step_identities, search_left_version, search_length4, verify_lemma_exhaustive,
    verify_lemma_randomized, SearchConfig, DEFAULT_SEARCH_BUDGET, PROOF_STEP_MAX_ORDER,
};
use nilaw_core::replay::{replay, ReplayOptions, DEFAULT_WITNESS_MAX_ORDER};
use nilaw_core::report::ratio_string;
use nilaw_core::{formats, Error, Group, Report, Side, TranslationPattern, DEFAULT_ORDER_CAP};

#[derive(Parser, Debug)]
#[command(name = "nilaw", version, about = "Nilpotency laws, commutator lemmas and class-2 replays on finite groups")]
struct Cli {
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Largest group order accepted.
    #[arg(long, global = true, default_value_t = DEFAULT_ORDER_CAP)]
    cap: usize,
    /// Work budget in elementary steps, overriding each operation's default.
    #[arg(long, global = true, env = "NILAW_BUDGET")]
    budget: Option<u128>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Leave `elapsed_ms` out of the report.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GroupArg {
    /// Group spec, e.g. `S3`, `Q8`, `heisenberg(3) x S3`, `cayley(table.txt)`.
    #[arg(long, short = 'g', conflicts_with = "group_file", required_unless_present = "group_file")]
    group: Option<String>,
    /// Cayley table or permutation-generator file (detected from the first line).
    #[arg(long)]
    group_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Density of N_k(G), exact or sampled.
    Density {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, short = 'k', default_value_t = 1)]
        k: usize,
        /// Exact count (the default unless --samples is given).
        #[arg(long, conflicts_with = "samples")]
        exact: bool,
        /// Sample this many tuples instead of counting.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check the twelve-condition lemma on a group.
    VerifyLemma {
        #[command(flatten)]
        group: GroupArg,
        /// Sweep every instance.
        #[arg(long, conflicts_with = "trials")]
        exhaustive: bool,
        /// Sample this many instances instead.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Pattern file (`side=right|left` header, one row per line).
        #[arg(long)]
        pattern: Option<PathBuf>,
        /// Override the side of the pattern.
        #[arg(long, value_enum)]
        side: Option<SideArg>,
    },
    /// Counterexample search for the left-translated or length-4 variants.
    Search {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, value_enum, default_value_t = SearchKind::Left)]
        kind: SearchKind,
        #[arg(long)]
        seed: Option<u64>,
        /// Samples drawn when the group is too large to sweep.
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        /// Arity-4 pattern file for `--kind length4`.
        #[arg(long)]
        pattern: Option<PathBuf>,
    },
    /// Replay the translate-intersection argument and certify <U>.
    Replay {
        #[command(flatten)]
        group: GroupArg,
        /// Also write the certificate bundle here.
        #[arg(long)]
        certificate: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_WITNESS_MAX_ORDER)]
        witness_max_order: usize,
    },
    /// List catalog groups, or print one group's Cayley table.
    Catalog {
        #[arg(long, default_value_t = 100)]
        max_order: usize,
        /// Print this group's table in the Cayley format instead.
        #[arg(long)]
        cayley: Option<String>,
    },
    /// Independently recheck a certificate bundle.
    Verify {
        #[arg(long)]
        certificate: PathBuf,
        #[command(flatten)]
        group: GroupArg,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SideArg {
    Right,
    Left,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SearchKind {
    Left,
    Length4,
}

enum Failure {
    Core(Error),
    Certificate(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
            eprintln!("nilaw: cannot start {workers} workers: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Certificate(msg)) => {
            eprintln!("nilaw: certificate rejected: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("nilaw: {e}");
            match e {
                Error::Soundness(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn read_file(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_group(arg: &GroupArg, cap: usize) -> Result<(String, Group), Error> {
    if let Some(path) = &arg.group_file {
        let text = read_file(path)?;
        let first = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#'));
        let spec = if first.is_some_and(|l| l.starts_with('(')) {
            GroupSpec::PermFile(path.clone())
        } else {
            GroupSpec::CayleyFile(path.clone())
        };
        let g = catalog::build(&spec, cap)?;
        return Ok((spec.to_string(), g));
    }
    let text = arg.group.as_deref().expect("clap requires --group or --group-file");
    let spec: GroupSpec = text.parse()?;
    let g = catalog::build(&spec, cap)?;
    Ok((text.to_string(), g))
}

fn require_seed(seed: Option<u64>, what: &str) -> Result<u64, Error> {
    seed.ok_or_else(|| Error::Argument(format!("{what} is randomized and needs --seed")))
}

fn emit(cli: &Cli, report: Report, started: Instant) -> Result<(), Error> {
    let report = if cli.no_timing {
        report
    } else {
        report.with_elapsed(started.elapsed().as_millis() as u64)
    };
    let mut text = report.to_json();
    text.push('\n');
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => write_stdout(&text),
    }
}

// A closed pipe (`nilaw ... | head`) is not an error.
fn write_stdout(text: &str) -> Result<(), Error> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let started = Instant::now();
    let report = match &cli.command {
        Command::Density {
            group,
            k,
            exact: _,
            samples,
            seed,
        } => {
            let (spec, g) = load_group(group, cli.cap)?;
            match samples {
                Some(samples) => {
                    let seed = require_seed(*seed, "sampled density")?;
                    let d = mc_density(&g, *k, *samples, seed)?;
                    let (low, high) = d.interval();
                    Report::new(
                        "density",
                        Some((&spec, &g)),
                        json!({"k": k, "mode": "sampled", "samples": samples}),
                        Some(seed),
                        &json!({"estimate": d, "value": d.value(), "ci95": [low, high]}),
                    )?
                }
                None => {
                    let budget = cli.budget.unwrap_or(DEFAULT_DENSITY_BUDGET);
                    let d = exact_density(&g, *k, budget)?;
                    let exact = d.exact().expect("exact mode");
                    let mut result = json!({
                        "estimate": d,
                        "value": ratio_string(&exact),
                        "decimal": d.value(),
                    });
                    if *k == 1 {
                        let oracle = commuting_probability_via_classes(&g);
                        if oracle != exact {
                            return Err(Error::Soundness(format!(
                                "commuting density {exact} differs from class count ratio {oracle}"
                            ))
                            .into());
                        }
                        result["class_count_ratio"] = json!(ratio_string(&oracle));
                    }
                    Report::new(
                        "density",
                        Some((&spec, &g)),
                        json!({"k": k, "mode": "exact", "budget": budget.to_string()}),
                        None,
                        &result,
                    )?
                }
            }
        }
        Command::VerifyLemma {
            group,
            exhaustive: _,
            trials,
            seed,
            pattern,
            side,
        } => {
            let (spec, g) = load_group(group, cli.cap)?;
            let mut pat = match pattern {
                Some(path) => read_file(path)?.parse::<TranslationPattern>()?,
                None => TranslationPattern::canonical_right(),
            };
            if let Some(side) = side {
                pat = pat.with_side(match side {
                    SideArg::Right => Side::Right,
                    SideArg::Left => Side::Left,
                });
            }
            let (report, used_seed) = match trials {
                Some(trials) => {
                    let seed = require_seed(*seed, "a sampled lemma check")?;
                    (verify_lemma_randomized(&g, &pat, *trials, seed)?, Some(seed))
                }
                None => {
                    let budget = cli.budget.unwrap_or(DEFAULT_SEARCH_BUDGET);
                    (verify_lemma_exhaustive(&g, &pat, budget)?, None)
                }
            };
            if report.contradicts_lemma() {
                return Err(Error::Soundness(format!(
                    "{} violations of the right-translated lemma in {}",
                    report.violation_count, report.group
                ))
                .into());
            }
            let steps = if g.order() <= PROOF_STEP_MAX_ORDER {
                let steps = proof_step_identities(&g)?;
                if !steps.all_hold() {
                    return Err(Error::Soundness(format!("commutator identities fail: {steps:?}")).into());
                }
                Some(steps)
            } else {
                None
            };
            Report::new(
                "verify-lemma",
                Some((&spec, &g)),
                json!({
                    "mode": report.mode,
                    "trials": trials,
                    "pattern": pat.to_text(),
                }),
                used_seed,
                &json!({"lemma": report, "proof_steps": steps}),
            )?
        }
        Command::Search {
            group,
            kind,
            seed,
            trials,
            pattern,
        } => {
            let (spec, g) = load_group(group, cli.cap)?;
            let cfg = SearchConfig {
                budget: cli.budget.unwrap_or(DEFAULT_SEARCH_BUDGET),
                seed: *seed,
                trials: *trials,
            };
            let (name, outcome) = match kind {
                SearchKind::Left => ("left", search_left_version(&g, &cfg)?),
                SearchKind::Length4 => {
                    let pat = match pattern {
                        Some(path) => Some(read_file(path)?.parse::<TranslationPattern>()?),
                        None => None,
                    };
                    ("length4", search_length4(&g, pat.as_ref(), &cfg)?)
                }
            };
            Report::new(
                "search",
                Some((&spec, &g)),
                json!({"kind": name, "budget": cfg.budget.to_string(), "trials": trials}),
                outcome.seed,
                &outcome,
            )?
        }
        Command::Replay {
            group,
            certificate,
            witness_max_order,
        } => {
            let (spec, g) = load_group(group, cli.cap)?;
            let result = replay(
                &g,
                &ReplayOptions {
                    witness_max_order: *witness_max_order,
                },
            )?;
            if let Some(path) = certificate {
                let bundle = result.bundle(&spec);
                let text = serde_json::to_string_pretty(&bundle).map_err(Error::from)? + "\n";
                std::fs::write(path, text).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
            }
            let density = result.density.exact().expect("replay density is exact");
            Report::new(
                "replay",
                Some((&spec, &g)),
                json!({"witness_max_order": witness_max_order}),
                None,
                &json!({
                    "density_n2": ratio_string(&density),
                    "u_size": result.u.len(),
                    "h_order": result.h_order,
                    "index": result.index,
                    "h_class": result.h_class,
                    "replay": result,
                }),
            )?
        }
        Command::Catalog { max_order, cayley } => {
            if let Some(text) = cayley {
                let spec: GroupSpec = text.parse()?;
                let g = catalog::build(&spec, cli.cap)?;
                write_stdout(&formats::to_cayley(&g))?;
                return Ok(());
            }
            let rows = catalog::standard_catalog(*max_order)
                .into_iter()
                .map(|spec| {
                    let g = catalog::build(&spec, cli.cap)?;
                    let class = g.whole().nilpotency_class();
                    Ok(json!({
                        "spec": spec.to_string(),
                        "order": g.order(),
                        "abelian": g.is_abelian(),
                        "nilpotency_class": class,
                    }))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Report::new(
                "catalog",
                None,
                json!({"max_order": max_order}),
                None,
                &json!({ "groups": rows }),
            )?
        }
        Command::Verify { certificate, group } => {
            let (spec, g) = load_group(group, cli.cap)?;
            let bundle: CertificateBundle =
                serde_json::from_str(&read_file(certificate)?).map_err(Error::from)?;
            let summary = verify_bundle(&g, &bundle).map_err(|f| Failure::Certificate(f.to_string()))?;
            Report::new(
                "verify",
                Some((&spec, &g)),
                json!({"certificate": certificate.display().to_string()}),
                None,
                &summary,
            )?
        }
    };
    emit(cli, report, started)?;
    Ok(())
}
