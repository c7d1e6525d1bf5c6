//! Command-line front end: parsing, model checking, satisfiability and
//! validity with countermodel extraction, model transformation and
//! validation, axiom-corpus emission, and oracle fuzzing.
//!
//! Exit codes: 0 for true/sat/valid/ok, 1 for false/unsat/invalid/violations
//! (and fuzzing disagreements), 2 for usage, input, or resource errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use lgdda::agents::{Agent, Group};
use lgdda::axioms::{corpus, CorpusBounds};
use lgdda::formula::{parse, parse_with_agents, OuterFormula};
use lgdda::json::{
    dox_model_from_str, dox_model_to_value, magbm_from_str, magbm_to_value, model_from_str,
    verdict_to_value, ModelFile,
};
use lgdda::kripke::{eval_designated, validate_ngdm, validate_qngdm, DoxModel};
use lgdda::oracle::{cross_check, CrossCheckError, GenConfig, SearchBounds};
use lgdda::semantics::{check, disagreement_degree, Magbm};
use lgdda::tableau::{decide_formula, Mode, TableauConfig, Verdict};
use lgdda::transforms::{filtrate, magbm_to_qngdm, ngdm_to_magbm, qngdm_to_ngdm};

#[derive(Parser)]
#[command(name = "lgdda", version, about = "Graded distributed belief reasoner")]
struct Cli {
    /// Emit machine-readable JSON instead of plain text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Qngdm,
    Ngdm,
    Magbm,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrictKind {
    Qngdm,
    Ngdm,
}

#[derive(clap::Args)]
struct DecideFlags {
    /// Write the witness model (or countermodel) here
    #[arg(long, value_name = "FILE")]
    extract_model: Option<PathBuf>,
    /// Also print search statistics
    #[arg(long)]
    stats: bool,
    /// Abort past this modal recursion depth instead of deciding
    #[arg(long)]
    max_depth: Option<usize>,
    /// Permute the exploration order (verdicts are unaffected)
    #[arg(long)]
    seed_order: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and echo its canonical form
    Parse { formula: String },
    /// Check a formula at a model's designated point
    Mc {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Decide satisfiability of a formula
    Sat {
        formula: String,
        #[command(flatten)]
        flags: DecideFlags,
    },
    /// Decide validity of a formula
    Valid {
        formula: String,
        #[command(flatten)]
        flags: DecideFlags,
    },
    /// Print a group's disagreement degree in a belief-base model
    Disagree {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// Space-separated agent names
        #[arg(long)]
        group: String,
    },
    /// Convert a model between the three classes
    Transform {
        #[arg(long, value_enum)]
        from: ModelKind,
        #[arg(long, value_enum)]
        to: ModelKind,
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Formula whose truth the conversion must preserve (defaults to
        /// `true`, which only matters for the fresh-atom collision check)
        #[arg(long)]
        formula: Option<String>,
    },
    /// Quotient a model by agreement on a formula's subformulas
    Filtrate {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Check a model against the strict or relaxed distance conditions
    Validate {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long = "as", value_enum)]
        kind: StrictKind,
    },
    /// Emit the bounded axiom-instance corpus, one formula per line
    Axioms {
        #[arg(long, default_value_t = 2)]
        agents: usize,
        #[arg(long, default_value_t = 2)]
        max_grade: u64,
        #[arg(long, default_value_t = 2)]
        atoms: usize,
        #[arg(long, default_value_t = 2)]
        max_omega: usize,
        #[arg(long, default_value_t = 2)]
        max_psi: usize,
        /// Write to this file instead of stdout
        #[arg(long, value_name = "FILE")]
        emit: Option<PathBuf>,
    },
    /// Cross-check the tableau against the brute-force oracle
    Fuzz {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        agents: usize,
        #[arg(long, default_value_t = 2)]
        atoms: usize,
        #[arg(long, default_value_t = 2)]
        max_grade: u64,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        max_worlds: usize,
        #[arg(long, default_value_t = 2)]
        max_support: usize,
        #[arg(long, default_value_t = 20_000_000)]
        budget: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let json = cli.json;
    match cli.command {
        Command::Parse { formula } => {
            let parsed = parse(&formula)?;
            if json {
                println!("{}", serde_json::json!({ "formula": parsed.to_string() }));
            } else {
                println!("{parsed}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Mc { model, formula } => {
            let text = fs::read_to_string(&model)
                .with_context(|| format!("reading {}", model.display()))?;
            let holds = match model_from_str(&text)? {
                ModelFile::Magbm(m) => check(&m, &parse_with_agents(&formula, &m.agents)?),
                ModelFile::Dox(m) => {
                    eval_designated(&m, &parse_with_agents(&formula, m.agents())?)
                }
            };
            if json {
                println!("{}", serde_json::json!({ "result": holds }));
            } else {
                println!("{holds}");
            }
            Ok(exit_bool(holds))
        }
        Command::Sat { formula, flags } => decide(&formula, Mode::Sat, flags, json),
        Command::Valid { formula, flags } => decide(&formula, Mode::Valid, flags, json),
        Command::Disagree { model, group } => {
            let m = load_magbm(&model)?;
            let members: Vec<Agent> = group.split_whitespace().map(Agent::new).collect();
            for a in &members {
                if !m.agents.contains(a) {
                    bail!("agent not declared: {a}");
                }
            }
            let group = Group::new(members).map_err(|e| anyhow::anyhow!(e))?;
            let degree = disagreement_degree(&m, &group);
            if json {
                println!("{}", serde_json::json!({ "degree": degree }));
            } else {
                println!("{degree}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Transform {
            from,
            to,
            input,
            out,
            formula,
        } => {
            let phi = match &formula {
                Some(text) => parse(text)?,
                None => OuterFormula::top(),
            };
            let text = fs::read_to_string(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            let value = match (from, to) {
                (ModelKind::Qngdm, ModelKind::Ngdm) => {
                    dox_model_to_value(&qngdm_to_ngdm(&dox_model_from_str(&text)?, &phi)?)
                }
                (ModelKind::Ngdm, ModelKind::Magbm) => {
                    magbm_to_value(&ngdm_to_magbm(&dox_model_from_str(&text)?)?)
                }
                (ModelKind::Magbm, ModelKind::Qngdm) => {
                    dox_model_to_value(&magbm_to_qngdm(&magbm_from_str(&text)?)?)
                }
                _ => bail!(
                    "unsupported conversion; supported: qngdm->ngdm, ngdm->magbm, magbm->qngdm"
                ),
            };
            fs::write(&out, format!("{value:#}\n"))
                .with_context(|| format!("writing {}", out.display()))?;
            if json {
                println!(
                    "{}",
                    serde_json::json!({ "ok": true, "out": out.display().to_string() })
                );
            } else {
                println!("wrote {}", out.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Filtrate {
            input,
            formula,
            out,
        } => {
            let model = load_dox(&input)?;
            let phi = parse_with_agents(&formula, model.agents())?;
            let filtered = filtrate(&model, &phi)?;
            fs::write(&out, format!("{:#}\n", dox_model_to_value(&filtered)))
                .with_context(|| format!("writing {}", out.display()))?;
            if json {
                println!(
                    "{}",
                    serde_json::json!({ "ok": true, "worlds": filtered.worlds().len() })
                );
            } else {
                println!(
                    "wrote {} ({} worlds)",
                    out.display(),
                    filtered.worlds().len()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { input, kind } => {
            let model = load_dox(&input)?;
            let report = match kind {
                StrictKind::Qngdm => validate_qngdm(&model)?,
                StrictKind::Ngdm => validate_ngdm(&model)?,
            };
            if json {
                let violations: Vec<String> =
                    report.violations.iter().map(|v| v.to_string()).collect();
                println!(
                    "{}",
                    serde_json::json!({ "ok": report.ok(), "violations": violations })
                );
            } else if report.ok() {
                println!("ok");
            } else {
                for v in &report.violations {
                    println!("{v}");
                }
            }
            Ok(exit_bool(report.ok()))
        }
        Command::Axioms {
            agents,
            max_grade,
            atoms,
            max_omega,
            max_psi,
            emit,
        } => {
            let bounds = CorpusBounds {
                agents,
                max_grade,
                atoms,
                max_omega,
                max_psi,
            };
            let formulas = corpus(&bounds);
            let mut lines = String::new();
            for f in &formulas {
                lines.push_str(&f.to_string());
                lines.push('\n');
            }
            match &emit {
                Some(path) => {
                    fs::write(path, lines).with_context(|| format!("writing {}", path.display()))?
                }
                None => print!("{lines}"),
            }
            if json {
                println!("{}", serde_json::json!({ "count": formulas.len() }));
            } else if emit.is_some() {
                println!("{} formulas", formulas.len());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fuzz {
            n,
            seed,
            agents,
            atoms,
            max_grade,
            depth,
            max_worlds,
            max_support,
            budget,
        } => {
            let cfg = GenConfig {
                agents,
                atoms,
                max_grade,
                max_depth: depth,
                seed,
                ..Default::default()
            };
            let bounds = SearchBounds {
                max_worlds,
                max_grade,
                max_support,
                budget,
            };
            match cross_check(n, &cfg, &bounds) {
                Ok(report) => {
                    if json {
                        println!("{}", serde_json::to_string(&report)?);
                    } else {
                        println!(
                            "{} formulas: {} sat, {} unsat (confirmed), {} unsat (oracle budget out)",
                            report.n, report.sat, report.unsat_confirmed, report.unsat_unconfirmed
                        );
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(CrossCheckError::Failure(failure)) => {
                    eprintln!("{}", serde_json::to_string_pretty(&*failure)?);
                    Ok(ExitCode::from(1))
                }
                Err(err @ CrossCheckError::Tableau { .. }) => Err(err.into()),
            }
        }
    }
}

fn decide(formula: &str, mode: Mode, flags: DecideFlags, json: bool) -> Result<ExitCode> {
    let phi = parse(formula)?;
    let config = TableauConfig {
        max_depth: flags.max_depth,
        max_denominators: None,
        order_seed: flags.seed_order,
    };
    let verdict = decide_formula(&phi, mode, flags.extract_model.is_some(), &config)?;
    if let (Some(path), Some(model)) = (&flags.extract_model, &verdict.model) {
        fs::write(path, format!("{:#}\n", dox_model_to_value(model)))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    print_verdict(&verdict, flags.stats, json);
    Ok(exit_bool(verdict.outcome.affirmative()))
}

fn print_verdict(verdict: &Verdict, stats: bool, json: bool) {
    if json {
        println!("{}", verdict_to_value(verdict));
    } else {
        println!("{}", verdict.outcome);
        if stats {
            let s = &verdict.stats;
            println!(
                "depth {} | nodes {} | denominators {} | peak branch {}",
                s.max_depth, s.nodes_visited, s.denominators_generated, s.peak_branch_formulas
            );
        }
    }
}

fn exit_bool(affirmative: bool) -> ExitCode {
    if affirmative {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn load_magbm(path: &PathBuf) -> Result<Magbm> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(magbm_from_str(&text)?)
}

fn load_dox(path: &PathBuf) -> Result<DoxModel> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(dox_model_from_str(&text)?)
}
