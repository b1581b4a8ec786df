//! `pgcl`: build p-groups, run verification suites, replay witness certificates.

mod report;
mod suites;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::json;

use pcgroup::constructions::GroupRecipe;
use pcgroup::format::{emit_presentation, parse_presentation, presentation_digest};
use pcgroup::witness::{replay_certificate, WitnessCertificate};
use pcgroup::{Error, Gate, PcPresentation};

use report::{
    CheckResult, GroupReport, RunConfig, RunReport, Verdict, EXIT_FAIL, EXIT_PASS, EXIT_USAGE,
};
use suites::{run_suite, Options, Suite, Target};

#[derive(Debug, Parser)]
#[command(
    name = "pgcl",
    version,
    about = "Verify commutator constructions in finite p-groups"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Prime for recipe groups.
    #[arg(long, global = true, default_value_t = 5)]
    p: u32,
    /// Generator count for families that take one.
    #[arg(long, global = true)]
    d: Option<usize>,
    /// Largest order enumerated element by element (default from PGCL_GATE, else 5^6).
    #[arg(long, global = true)]
    gate: Option<u128>,
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here; wall times go to `<path>.timings.json`.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the presentation of a recipe group.
    Build {
        group: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run check suites on a recipe group or presentation file.
    Check {
        group: String,
        #[arg(value_enum, ignore_case = true, required = true)]
        suites: Vec<Suite>,
        /// Allow `d <= p + 1` in the witness search when `(G')^p = 1`.
        #[arg(long)]
        relaxed: bool,
        /// Random congruence instances for the hall suite.
        #[arg(long, default_value_t = 100)]
        random_hall: usize,
        /// Write the theorem-b certificate here.
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Run suites over a list of groups.
    Corpus {
        /// JSON file with `groups` (recipes or paths) and optional `suites`.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Re-verify a witness certificate against a presentation file.
    CertifyReplay {
        certificate: PathBuf,
        presentation: PathBuf,
    },
}

#[derive(Debug, Deserialize)]
struct CorpusConfig {
    #[serde(default)]
    groups: Vec<String>,
    #[serde(default)]
    suites: Option<Vec<String>>,
}

struct Loaded {
    name: String,
    pres: PcPresentation,
    recipe: Option<GroupRecipe>,
}

fn load_group(spec: &str, common: &Common) -> Result<Loaded, String> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{spec}: {e}"))?;
        let pres = parse_presentation(&text).map_err(|e| format!("{spec}: {e}"))?;
        return Ok(Loaded {
            name: spec.to_string(),
            pres,
            recipe: None,
        });
    }
    let recipe = GroupRecipe::from_spec(spec, common.p, common.d).map_err(|e| e.to_string())?;
    let pres = recipe.build().map_err(|e| format!("{recipe}: {e}"))?;
    Ok(Loaded {
        name: recipe.to_string(),
        pres,
        recipe: Some(recipe),
    })
}

fn gate_of(common: &Common) -> Gate {
    let gate = Gate::from_env();
    match common.gate {
        Some(g) => gate.with_max_order(g),
        None => gate,
    }
}

fn check_group(g: &Loaded, suites: &[Suite], opts: &Options) -> GroupReport {
    let target = Target {
        pres: &g.pres,
        recipe: g.recipe.as_ref(),
    };
    let mut checks = Vec::new();
    for &s in suites {
        let start = Instant::now();
        let mut results = run_suite(s, &target, opts);
        let elapsed = start.elapsed() / results.len().max(1) as u32;
        for r in &mut results {
            r.elapsed = elapsed;
        }
        checks.extend(results);
    }
    GroupReport {
        group: g.name.clone(),
        digest: Some(presentation_digest(&g.pres)),
        verdict: Verdict::combine(checks.iter().map(|c| c.verdict)),
        checks,
    }
}

fn load_failure(name: &str, message: String) -> GroupReport {
    GroupReport {
        group: name.to_string(),
        digest: None,
        checks: vec![CheckResult::new(
            "load",
            Verdict::Fail,
            json!({ "summary": message }),
        )],
        verdict: Verdict::Fail,
    }
}

fn emit(report: &RunReport, common: &Common) -> i32 {
    if let Some(path) = &common.json {
        let body = serde_json::to_string_pretty(report).expect("report serializes");
        let timings = serde_json::to_string_pretty(&report.timings()).expect("timings serialize");
        let mut sidecar = path.clone().into_os_string();
        sidecar.push(".timings.json");
        if let Err(e) =
            std::fs::write(path, body + "\n").and_then(|_| std::fs::write(&sidecar, timings + "\n"))
        {
            eprintln!("error: writing {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    if !common.quiet {
        print!("{}", report.render_text());
    }
    report.verdict.exit_code()
}

fn run(cli: Cli) -> i32 {
    let common = &cli.common;
    if let Some(jobs) = common.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global();
    }
    let gate = gate_of(common);
    match cli.command {
        Command::Build { group, out } => {
            let g = match load_group(&group, common) {
                Ok(g) => g,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_USAGE;
                }
            };
            let text = format!("# {}\n{}", g.name, emit_presentation(&g.pres));
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("error: writing {}: {e}", path.display());
                        return EXIT_USAGE;
                    }
                    if !common.quiet {
                        println!(
                            "{} order {}^{} -> {}",
                            g.name,
                            g.pres.p(),
                            g.pres.n(),
                            path.display()
                        );
                    }
                }
                None => print!("{text}"),
            }
            EXIT_PASS
        }
        Command::Check {
            group,
            suites,
            relaxed,
            random_hall,
            cert_out,
        } => {
            let g = match load_group(&group, common) {
                Ok(g) => g,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_USAGE;
                }
            };
            let opts = Options {
                gate,
                seed: common.seed,
                relaxed,
                random_hall,
            };
            let mut suites = suites;
            suites.dedup();
            let group_report = check_group(&g, &suites, &opts);
            if let Some(path) = cert_out {
                let cert = group_report
                    .checks
                    .iter()
                    .find(|c| c.name == "theorem-b")
                    .and_then(|c| c.details.get("certificate"));
                match cert {
                    Some(c) => {
                        let body = serde_json::to_string_pretty(c).expect("certificate serializes");
                        if let Err(e) = std::fs::write(&path, body + "\n") {
                            eprintln!("error: writing {}: {e}", path.display());
                            return EXIT_USAGE;
                        }
                    }
                    None => eprintln!("warning: no theorem-b certificate to write"),
                }
            }
            let report = RunReport::new(config_echo(&opts), vec![group_report]);
            emit(&report, common)
        }
        Command::Corpus { config } => {
            let (groups, suites) = match config {
                Some(path) => match read_corpus(&path) {
                    Ok(c) => c,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return EXIT_USAGE;
                    }
                },
                None => (
                    GroupRecipe::corpus(common.p)
                        .iter()
                        .map(ToString::to_string)
                        .collect(),
                    Suite::defaults(),
                ),
            };
            let opts = Options {
                gate,
                seed: common.seed,
                relaxed: false,
                random_hall: 100,
            };
            let reports: Vec<GroupReport> = groups
                .par_iter()
                .map(|spec| match load_group(spec, common) {
                    Ok(g) => check_group(&g, &suites, &opts),
                    Err(e) => load_failure(spec, e),
                })
                .collect();
            let report = RunReport::new(config_echo(&opts), reports);
            emit(&report, common)
        }
        Command::CertifyReplay {
            certificate,
            presentation,
        } => certify_replay(&certificate, &presentation, gate, common.quiet),
    }
}

fn config_echo(opts: &Options) -> RunConfig {
    RunConfig {
        max_order: opts.gate.max_order,
        max_pairs: opts.gate.max_pairs,
        seed: opts.seed,
        relaxed: opts.relaxed,
    }
}

fn read_corpus(path: &Path) -> Result<(Vec<String>, Vec<Suite>), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let cfg: CorpusConfig =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let suites = match cfg.suites {
        None => Suite::defaults(),
        Some(names) => names
            .iter()
            .map(|n| {
                <Suite as clap::ValueEnum>::from_str(n, true)
                    .map_err(|_| format!("unknown suite `{n}`"))
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    Ok((cfg.groups, suites))
}

fn certify_replay(cert_path: &Path, pres_path: &Path, gate: Gate, quiet: bool) -> i32 {
    let loaded = std::fs::read_to_string(cert_path)
        .map_err(|e| format!("{}: {e}", cert_path.display()))
        .and_then(|t| {
            serde_json::from_str::<WitnessCertificate>(&t)
                .map_err(|e| format!("{}: {e}", cert_path.display()))
        })
        .and_then(|c| {
            let text = std::fs::read_to_string(pres_path)
                .map_err(|e| format!("{}: {e}", pres_path.display()))?;
            let pres =
                parse_presentation(&text).map_err(|e| format!("{}: {e}", pres_path.display()))?;
            Ok((c, pres))
        });
    let (cert, pres) = match loaded {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match replay_certificate(&pres, &cert, &gate) {
        Ok(r) if r.pass() => {
            if !quiet {
                println!("PASS {} rungs replayed, K_x(G) = G'", r.rungs.len());
            }
            EXIT_PASS
        }
        Ok(r) => {
            if !quiet {
                match &r.first_failure {
                    Some((rung, why)) => println!("FAIL rung {rung}: {why}"),
                    None => println!("FAIL chain ends do not match G' and 1, or K_x(G) != G'"),
                }
            }
            EXIT_FAIL
        }
        Err(Error::Usage(why)) => {
            println!("REJECTED {why}");
            EXIT_USAGE
        }
        Err(e) => {
            println!(
                "{} {e}",
                if matches!(e, Error::Infeasible { .. }) {
                    "SKIPPED"
                } else {
                    "FAIL"
                }
            );
            if matches!(e, Error::Infeasible { .. }) {
                report::EXIT_SKIPPED
            } else {
                EXIT_FAIL
            }
        }
    }
}

fn main() {
    std::process::exit(run(Cli::parse()));
}
