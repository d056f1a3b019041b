//! Command-line interface: answer sets, classification, characteristic
//! automata, canonical machines, product stepping, compilation,
//! decomposition, pipeline runs, and certificate verification.
//!
//! Exit codes: 0 success (an inconsistent program is a successful answer),
//! 1 domain errors, 2 usage errors, 3 inconclusive search.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use krasp::asp::{canonical_program, CanonicalProgram, Program, DEFAULT_ENUM_CAP};
use krasp::automata::{
    canonical_automaton, characteristic_automaton, Automaton, BuildMode, CanonicalAutomaton,
    DEFAULT_CHAR_CAP,
};
use krasp::decompose::{
    build_tn_embedding, compile_positive_tight, decompose_automaton, kr_pipeline, DecomposeConfig,
    DecomposeOutcome, PipelineConfig, PipelineOutcome, DEFAULT_PIPELINE_ATOMS, DEFAULT_TN_BUDGET,
};
use krasp::io::{
    automaton_from_json, automaton_to_json, bundle_from_json, bundle_to_json,
    certificate_from_json, product_from_json,
};
use krasp::parse::parse_program;
use krasp::represent::{answer_sets_via_product, verify_certificate, Product};

#[derive(Parser)]
#[command(
    name = "krasp",
    version,
    about = "Answer-set semantics, characteristic automata, \
and certified cascade decompositions of normal logic programs"
)]
struct Cli {
    /// Alphabet-size cap for exhaustive enumeration (answer sets, explicit
    /// characteristic automata, pipeline budget). Defaults are per command.
    #[arg(long, global = true)]
    atoms_cap: Option<usize>,

    /// State cap for explicit products and search budgets.
    #[arg(long, global = true)]
    state_cap: Option<usize>,

    /// Seed for corpus-generation test helpers. Accepted for reproducible
    /// tooling; the subcommands here never consult it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print all answer sets of a program, one per line.
    Answersets { program: PathBuf },
    /// Report positivity and tightness (with a level mapping when tight).
    Classify { program: PathBuf },
    /// Build the characteristic automaton of a program.
    Charaut {
        program: PathBuf,
        /// Defer transition evaluation instead of tabulating up front.
        #[arg(long)]
        lazy: bool,
        /// Emit DOT instead of the default text table.
        #[arg(long, conflicts_with = "json")]
        dot: bool,
        /// Emit the automaton JSON object.
        #[arg(long)]
        json: bool,
    },
    /// Print a canonical program or automaton.
    Canonical {
        /// One of: reset, standard N, tn N, elevator, facts M.
        kind: String,
        n: Option<usize>,
        /// Print the program text form (default).
        #[arg(long, conflicts_with = "as_automaton")]
        as_program: bool,
        /// Print the automaton JSON form.
        #[arg(long)]
        as_automaton: bool,
    },
    /// Apply one synchronous product step to a state tuple.
    ProductStep {
        product: PathBuf,
        /// State tuple, e.g. ({1},{}).
        #[arg(long)]
        state: String,
        /// Global input label, e.g. {a}.
        #[arg(long)]
        input: String,
    },
    /// Compile a positive tight program into a verified product of resets.
    CompilePositive {
        program: PathBuf,
        #[arg(short)]
        output: PathBuf,
    },
    /// Verify the full-transformation embedding for a given n.
    TnEmbed { n: usize },
    /// Decompose an automaton (or a program's characteristic automaton) into
    /// a verified cascade of reset and standard automata.
    Decompose {
        automaton: Option<PathBuf>,
        #[arg(long)]
        program: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        max_factors: usize,
        #[arg(short)]
        output: PathBuf,
    },
    /// Run the whole pipeline: decompose a program's characteristic automaton
    /// and transport the result to a verified product of reset and standard
    /// programs, with answer sets attached when the certificate allows.
    KrPipeline {
        program: PathBuf,
        #[arg(short)]
        output: PathBuf,
    },
    /// Verify a representation certificate.
    Verify(VerifyArgs),
    /// Compute answer sets through a verified product bundle.
    AnswersetsVia {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        bundle: PathBuf,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    product: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    cert: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    match &cli.command {
        Command::Answersets { program } => {
            let p = load_program(program)?;
            let cap = cli.atoms_cap.unwrap_or(DEFAULT_ENUM_CAP);
            let sets = p.answer_sets(cap).map_err(|e| e.to_string())?;
            if sets.is_empty() {
                println!("no answer sets");
            } else {
                for s in sets {
                    println!("{}", p.alphabet().render_interp(s));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify { program } => {
            let p = load_program(program)?;
            let cls = p.classify();
            println!("positive: {}", if cls.positive { "yes" } else { "no" });
            match cls.tightness {
                Some(levels) => {
                    println!("tight: yes");
                    println!("levels: {}", levels.render());
                }
                None => println!("tight: no"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Charaut {
            program,
            lazy,
            dot,
            json,
        } => {
            let p = load_program(program)?;
            let mode = if *lazy {
                BuildMode::Lazy
            } else {
                BuildMode::Explicit
            };
            let cap = cli.atoms_cap.unwrap_or(DEFAULT_CHAR_CAP);
            let aut = characteristic_automaton(&p, mode, cap).map_err(|e| e.to_string())?;
            if *dot {
                print!("{}", aut.to_dot().map_err(|e| e.to_string())?);
            } else if *json {
                let v = automaton_to_json(&aut).map_err(|e| e.to_string())?;
                println!(
                    "{}",
                    serde_json::to_string_pretty(&v).map_err(|e| e.to_string())?
                );
            } else {
                print_table(&aut, cli.state_cap.unwrap_or(64))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Canonical {
            kind,
            n,
            as_program,
            as_automaton,
        } => canonical_cmd(kind, *n, *as_program, *as_automaton),
        Command::ProductStep {
            product,
            state,
            input,
        } => {
            let v = load_json(product)?;
            let prod = product_from_json(&v).map_err(|e| e.to_string())?;
            match prod {
                Product::Programs(pp) => {
                    let s = pp.parse_state(state).map_err(|e| e.to_string())?;
                    let x = (0..pp.global_inputs().count())
                        .find(|&i| pp.global_inputs().label(i) == input.trim())
                        .ok_or_else(|| format!("unknown input `{input}`"))?;
                    let next = pp.step(&s, x).map_err(|e| e.to_string())?;
                    println!("{}", pp.render_state(&next));
                }
                Product::Automata(spec) => {
                    let s = spec.parse_state(state).map_err(|e| e.to_string())?;
                    let x = spec
                        .input_index(input.trim())
                        .ok_or_else(|| format!("unknown input `{input}`"))?;
                    let next = spec.step(&s, x).map_err(|e| e.to_string())?;
                    println!("{}", spec.render_state(&next));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CompilePositive { program, output } => {
            let p = load_program(program)?;
            let result = compile_positive_tight(&p).map_err(|e| e.to_string())?;
            let target = characteristic_automaton(&p, BuildMode::Explicit, p.atom_count())
                .map_err(|e| e.to_string())?;
            let sets = answer_sets_via_product(&p, &result.product, &result.certificate)
                .map_err(|e| e.to_string())?;
            let set_labels: Vec<String> = sets
                .iter()
                .map(|s| p.alphabet().render_interp(*s))
                .collect();
            let bundle = bundle_to_json(
                &target,
                Some((&result.product, &result.certificate, Some(&set_labels))),
                "verified",
                None,
            )
            .map_err(|e| e.to_string())?;
            write_json(output, &bundle)?;
            println!(
                "{} (factors: {})",
                result.report.summary(),
                result.census.render()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::TnEmbed { n } => {
            let budget = cli.atoms_cap.unwrap_or(DEFAULT_TN_BUDGET);
            let emb = build_tn_embedding(*n, budget).map_err(|e| e.to_string())?;
            println!(
                "embedding verified: n={}, {} equations checked",
                emb.n, emb.report.equations_checked
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Decompose {
            automaton,
            program,
            max_factors,
            output,
        } => {
            let target = match (automaton, program) {
                (Some(path), None) => {
                    automaton_from_json(&load_json(path)?).map_err(|e| e.to_string())?
                }
                (None, Some(path)) => {
                    let p = load_program(path)?;
                    let cap = cli.atoms_cap.unwrap_or(DEFAULT_CHAR_CAP);
                    characteristic_automaton(&p, BuildMode::Explicit, cap)
                        .map_err(|e| e.to_string())?
                }
                _ => {
                    eprintln!("error: pass exactly one of <aut.json> or --program <prog.lp>");
                    return Ok(ExitCode::from(2));
                }
            };
            let mut config = DecomposeConfig {
                max_factors: *max_factors,
                ..Default::default()
            };
            if let Some(cap) = cli.state_cap {
                config.product_cap = cap;
                config.search.max_states = cap;
            }
            let outcome = decompose_automaton(&target, &config).map_err(|e| e.to_string())?;
            match outcome {
                DecomposeOutcome::Verified(result) => {
                    let bundle = bundle_to_json(
                        &target,
                        Some((&result.product, &result.certificate, None)),
                        "verified",
                        None,
                    )
                    .map_err(|e| e.to_string())?;
                    write_json(output, &bundle)?;
                    println!("verified: factors: {}", result.census.render());
                    Ok(ExitCode::SUCCESS)
                }
                DecomposeOutcome::Inconclusive {
                    reason,
                    sequences_tried,
                    tables_tried,
                } => {
                    let bundle = bundle_to_json(&target, None, "inconclusive", Some(&reason))
                        .map_err(|e| e.to_string())?;
                    write_json(output, &bundle)?;
                    println!(
                        "inconclusive: {reason} ({sequences_tried} sequences, {tables_tried} tables tried)"
                    );
                    Ok(ExitCode::from(3))
                }
            }
        }
        Command::KrPipeline { program, output } => {
            let p = load_program(program)?;
            let mut config = PipelineConfig {
                max_atoms: cli.atoms_cap.unwrap_or(DEFAULT_PIPELINE_ATOMS),
                ..Default::default()
            };
            if let Some(cap) = cli.state_cap {
                config.decompose.product_cap = cap;
                config.decompose.search.max_states = cap;
            }
            let target = characteristic_automaton(&p, BuildMode::Explicit, p.atom_count())
                .map_err(|e| e.to_string())?;
            match kr_pipeline(&p, &config).map_err(|e| e.to_string())? {
                PipelineOutcome::Verified(result) => {
                    let set_labels: Option<Vec<String>> = result.answer_sets.as_ref().map(|sets| {
                        sets.iter()
                            .map(|s| p.alphabet().render_interp(*s))
                            .collect()
                    });
                    let bundle = bundle_to_json(
                        &target,
                        Some((
                            &result.decomposition.product,
                            &result.decomposition.certificate,
                            set_labels.as_deref(),
                        )),
                        "verified",
                        None,
                    )
                    .map_err(|e| e.to_string())?;
                    write_json(output, &bundle)?;
                    println!(
                        "verified: factors: {}",
                        result.decomposition.census.render()
                    );
                    if let Some(sets) = &set_labels {
                        if sets.is_empty() {
                            println!("answer sets: none");
                        } else {
                            println!("answer sets: {}", sets.join(" "));
                        }
                    }
                    Ok(ExitCode::SUCCESS)
                }
                PipelineOutcome::Inconclusive { reason } => {
                    let bundle = bundle_to_json(&target, None, "inconclusive", Some(&reason))
                        .map_err(|e| e.to_string())?;
                    write_json(output, &bundle)?;
                    println!("inconclusive: {reason}");
                    Ok(ExitCode::from(3))
                }
            }
        }
        Command::Verify(args) => {
            let product =
                product_from_json(&load_json(&args.product)?).map_err(|e| e.to_string())?;
            let target =
                automaton_from_json(&load_json(&args.target)?).map_err(|e| e.to_string())?;
            let cert = certificate_from_json(&load_json(&args.cert)?, &product, &target)
                .map_err(|e| e.to_string())?;
            let report = verify_certificate(&product, &target, &cert, cert.claim)
                .map_err(|e| e.to_string())?;
            if report.verdict {
                println!("verified: {}", cert.claim.as_str());
                Ok(ExitCode::SUCCESS)
            } else {
                println!("FAILED: {}", report.summary());
                for v in &report.violations {
                    println!("  {v}");
                }
                Ok(ExitCode::from(1))
            }
        }
        Command::AnswersetsVia { program, bundle } => {
            let p = load_program(program)?;
            let parsed = bundle_from_json(&load_json(bundle)?).map_err(|e| e.to_string())?;
            let product = parsed.product.ok_or("bundle has no product spec")?;
            let cert = parsed.certificate.ok_or("bundle has no certificate")?;
            let sets = answer_sets_via_product(&p, &product, &cert).map_err(|e| e.to_string())?;
            if sets.is_empty() {
                println!("no answer sets");
            } else {
                for s in sets {
                    println!("{}", p.alphabet().render_interp(s));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn canonical_cmd(
    kind: &str,
    n: Option<usize>,
    _as_program: bool,
    as_automaton: bool,
) -> Result<ExitCode, String> {
    let need_n = |what: &str| -> Result<usize, String> {
        n.ok_or_else(|| format!("`canonical {what}` needs a size argument"))
    };
    if as_automaton {
        let aut = match kind {
            "reset" => canonical_automaton(CanonicalAutomaton::Reset),
            "standard" => canonical_automaton(CanonicalAutomaton::Standard(need_n("standard")?)),
            "tn" => canonical_automaton(CanonicalAutomaton::Tn(need_n("tn")?)),
            "elevator" => canonical_automaton(CanonicalAutomaton::Elevator),
            other => return Err(format!("no canonical automaton named `{other}`")),
        }
        .map_err(|e| e.to_string())?;
        let v = automaton_to_json(&aut).map_err(|e| e.to_string())?;
        println!(
            "{}",
            serde_json::to_string_pretty(&v).map_err(|e| e.to_string())?
        );
    } else {
        let program = match kind {
            "reset" => canonical_program(CanonicalProgram::Reset),
            "standard" => canonical_program(CanonicalProgram::Standard(need_n("standard")?)),
            "tn" => canonical_program(CanonicalProgram::Tn(need_n("tn")?)),
            "elevator" => canonical_program(CanonicalProgram::Elevator),
            "facts" => canonical_program(CanonicalProgram::Facts(need_n("facts")?)),
            other => return Err(format!("no canonical program named `{other}`")),
        }
        .map_err(|e| e.to_string())?;
        print!("{}", program.render());
    }
    Ok(ExitCode::SUCCESS)
}

fn print_table(aut: &Automaton, cap: usize) -> Result<(), String> {
    let n = aut.state_count();
    let nx = aut.input_count();
    if n > cap {
        println!("{n} states, {nx} inputs (table omitted; over the state cap {cap})");
        return Ok(());
    }
    for q in 0..n {
        for x in 0..nx {
            println!(
                "{} --{}--> {}",
                aut.state_label(q),
                aut.input_label(x),
                aut.state_label(aut.step(q, x))
            );
        }
    }
    Ok(())
}

fn load_program(path: &PathBuf) -> Result<Program, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_program(&text).map_err(|e| e.to_string())
}

fn load_json(path: &PathBuf) -> Result<serde_json::Value, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_json(path: &PathBuf, value: &serde_json::Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    fs::write(path, text + "\n").map_err(|e| format!("cannot write {}: {e}", path.display()))
}
