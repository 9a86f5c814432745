//! Command-line front end: exact weighted model counting, corpus checking
//! against the brute-force oracle, normal-form printing and fragment/prefix
//! classification.
//!
//! Exit codes: 0 ok, 1 mismatch or check failure, 2 usage, 3 parse error.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use wfomc_core::engine::{self, Engine};
use wfomc_core::normalize::{
    describe_corrections, fo2func_normalize, scott_normal_form, skolemize, ScottFragment,
    WeightedSentence,
};
use wfomc_core::oracle;
use wfomc_core::prefix::{classify_prefix, PrefixClass};
use wfomc_core::syntax::{
    classify_fragment, normalize_scopes, parse_sentence_file, parse_weights, WeightMap,
};

#[derive(Parser)]
#[command(name = "wfomc", about = "Exact symmetric weighted first-order model counting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Sentence file (optional `vocab:` header, `#` comments).
    #[arg(long)]
    sentence: PathBuf,
    /// Weights file; omitted predicates default to (1, 1).
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute WFOMC(φ, n, w, w̄) for one n or a range.
    Count {
        #[command(flatten)]
        input: InputArgs,
        /// Domain size (decimal; the algorithms scale polynomially in its
        /// magnitude, matching a unary-input reading).
        #[arg(long, conflicts_with = "n_range")]
        n: Option<usize>,
        /// Inclusive range `a..b` of domain sizes.
        #[arg(long)]
        n_range: Option<String>,
        /// auto, fo2func, su1, u1 or oracle.
        #[arg(long, default_value = "auto")]
        engine: String,
        /// plain or json-lines.
        #[arg(long, default_value = "plain")]
        format: String,
    },
    /// Run every applicable engine against the oracle over a corpus
    /// directory.
    Check {
        /// Directory of `<name>.sent` + `<name>.w1` … files.
        #[arg(long)]
        corpus: PathBuf,
        /// Largest domain size to verify (oracle-bound permitting).
        #[arg(long, default_value_t = 3)]
        max_n: usize,
    },
    /// Print the transformed sentence, extended weights and the correction
    /// ledger.
    Normalize {
        #[command(flatten)]
        input: InputArgs,
        /// scott, skolem, fo2func or auto.
        #[arg(long, default_value = "auto")]
        op: String,
    },
    /// Classify a quantifier prefix (A/E string) or a sentence's fragment.
    Classify {
        /// Quantifier prefix such as "AEA".
        #[arg(long)]
        prefix: Option<String>,
        /// Sentence file to classify by fragment.
        #[arg(long)]
        sentence: Option<PathBuf>,
        /// Explain which classification clause applied.
        #[arg(long)]
        explain: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

#[derive(Debug)]
struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> CliError {
        CliError { message: msg.into(), code: 2 }
    }
    fn parse(msg: impl Into<String>) -> CliError {
        CliError { message: msg.into(), code: 3 }
    }
    fn run(msg: impl Into<String>) -> CliError {
        CliError { message: msg.into(), code: 1 }
    }
    fn exit_code(&self) -> u8 {
        self.code
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

fn load_input(input: &InputArgs) -> Result<WeightedSentence, CliError> {
    let text = std::fs::read_to_string(&input.sentence)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", input.sentence.display())))?;
    let (sentence, vocab) =
        parse_sentence_file(&text).map_err(|e| CliError::parse(e.to_string()))?;
    let weights = match &input.weights {
        Some(path) => {
            let wtext = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            parse_weights(&wtext, &vocab).map_err(|e| CliError::parse(e.to_string()))?
        }
        None => WeightMap::ones(&vocab),
    };
    Ok(WeightedSentence::new(sentence, vocab, weights))
}

use wfomc_core::show_rational;

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Count { input, n, n_range, engine, format } => {
            let ws = load_input(&input)?;
            let engine: Engine = engine.parse().map_err(CliError::usage)?;
            let range = match (n, n_range) {
                (Some(n), None) => n..=n,
                (None, Some(spec)) => {
                    let (a, b) = spec
                        .split_once("..")
                        .ok_or_else(|| CliError::usage("expected --n-range a..b"))?;
                    let a: usize =
                        a.parse().map_err(|_| CliError::usage("bad range start"))?;
                    let b: usize = b.parse().map_err(|_| CliError::usage("bad range end"))?;
                    a..=b
                }
                _ => return Err(CliError::usage("exactly one of --n or --n-range is required")),
            };
            for n in range {
                let count = engine::count(&ws, n, engine)
                    .map_err(|e| CliError::run(e.to_string()))?;
                match format.as_str() {
                    "plain" => println!("n={n}: {}", show_rational(&count)),
                    "json-lines" => println!(
                        "{}",
                        serde_json::json!({ "n": n, "count": show_rational(&count) })
                    ),
                    other => return Err(CliError::usage(format!("unknown format `{other}`"))),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { corpus, max_n } => {
            let entries = wfomc_core::corpus::load_corpus(&corpus)
                .map_err(|e| CliError::parse(e.to_string()))?;
            if entries.is_empty() {
                eprintln!("warning: empty corpus at {}", corpus.display());
                return Ok(ExitCode::SUCCESS);
            }
            let mut mismatches = 0usize;
            let mut checks = 0usize;
            for entry in &entries {
                let verdict = classify_fragment(&entry.sentence);
                for (map_idx, (map_name, _)) in entry.weight_maps.iter().enumerate() {
                    let ws = entry.weighted(map_idx);
                    for n in 1..=max_n {
                        let expected = match oracle::wfomc_brute(
                            &ws.sentence,
                            &ws.vocab,
                            n,
                            &ws.weights,
                        ) {
                            Ok(v) => v,
                            Err(oracle::OracleError::BoundExceeded { .. }) => continue,
                            Err(e) => return Err(CliError::run(e.to_string())),
                        };
                        let mut engines = vec![Engine::Auto];
                        if verdict.is_fo2 || verdict.is_fo2_plus_functionality {
                            engines.push(Engine::Fo2Func);
                        }
                        if verdict.is_su1 {
                            engines.push(Engine::Su1);
                        }
                        if verdict.is_u1 {
                            engines.push(Engine::U1);
                        }
                        for eng in engines {
                            let got = engine::count(&ws, n, eng)
                                .map_err(|e| CliError::run(e.to_string()))?;
                            checks += 1;
                            if got != expected {
                                mismatches += 1;
                                println!(
                                    "MISMATCH {} [{}] n={} engine={:?}: engine {} vs oracle {}",
                                    entry.name,
                                    map_name,
                                    n,
                                    eng,
                                    show_rational(&got),
                                    show_rational(&expected)
                                );
                            }
                        }
                    }
                }
            }
            println!("{} checks, {} mismatches", checks, mismatches);
            if mismatches == 0 {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Command::Normalize { input, op } => {
            let ws = load_input(&input)?;
            let prepared = WeightedSentence {
                sentence: normalize_scopes(&ws.sentence),
                ..ws.clone()
            };
            let result = match op.as_str() {
                "scott" => {
                    let fragment = if classify_fragment(&prepared.sentence).is_fo2 {
                        ScottFragment::Fo2
                    } else {
                        ScottFragment::U1
                    };
                    scott_normal_form(&prepared, fragment)
                        .map_err(|e| CliError::run(e.to_string()))?
                }
                "skolem" => {
                    let fragment = if classify_fragment(&prepared.sentence).is_fo2 {
                        ScottFragment::Fo2
                    } else {
                        ScottFragment::U1
                    };
                    let sc = scott_normal_form(&prepared, fragment)
                        .map_err(|e| CliError::run(e.to_string()))?;
                    skolemize(&sc).map_err(|e| CliError::run(e.to_string()))?
                }
                "fo2func" | "auto"
                    if classify_fragment(&prepared.sentence).is_fo2_plus_functionality =>
                {
                    let normal =
                        fo2func_normalize(&prepared).map_err(|e| CliError::run(e.to_string()))?;
                    println!("normal form cases:");
                    for (weight, phi0) in &normal.cases {
                        println!(
                            "  case weight {}: forall x forall y ({}) & forall x exists=1 y ({})",
                            show_rational(weight),
                            phi0.forall_matrix,
                            phi0.exists_matrix
                        );
                    }
                    println!("weights:\n{}", normal.weights);
                    println!("corrections: {}", describe_corrections(&normal.corrections));
                    return Ok(ExitCode::SUCCESS);
                }
                "auto" => {
                    let sc = scott_normal_form(&prepared, ScottFragment::U1)
                        .map_err(|e| CliError::run(e.to_string()))?;
                    skolemize(&sc).map_err(|e| CliError::run(e.to_string()))?
                }
                other => return Err(CliError::usage(format!("unknown op `{other}`"))),
            };
            println!("{}", result.sentence);
            println!("weights:\n{}", result.weights);
            println!("corrections: {}", describe_corrections(&result.corrections));
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify { prefix, sentence, explain } => {
            match (prefix, sentence) {
                (Some(p), None) => {
                    let verdict = classify_prefix(&p).map_err(|e| CliError::usage(e.to_string()))?;
                    let label = match verdict.verdict {
                        PrefixClass::Ptime => "ptime",
                        PrefixClass::ContainsSharpP1Complete => "contains-#P1-complete",
                    };
                    println!("{}: {}", verdict.prefix, label);
                    if explain {
                        println!("{}", verdict.explanation());
                    }
                    Ok(ExitCode::SUCCESS)
                }
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        CliError::usage(format!("cannot read {}: {e}", path.display()))
                    })?;
                    let (f, _) =
                        parse_sentence_file(&text).map_err(|e| CliError::parse(e.to_string()))?;
                    let v = classify_fragment(&f);
                    println!("fo2: {}", v.is_fo2);
                    println!("fo2+functionality: {}", v.is_fo2_plus_functionality);
                    println!("su1: {}", v.is_su1);
                    println!("u1: {}", v.is_u1);
                    println!("forallstar-conjunction: {}", v.is_forallstar_conjunction);
                    println!("prefix: {}", v.prefix.as_deref().unwrap_or("-"));
                    Ok(ExitCode::SUCCESS)
                }
                _ => Err(CliError::usage("pass exactly one of --prefix or --sentence")),
            }
        }
    }
}
