//! `circ` — command-line front end for the circumstance-model engine.
//!
//! Exit codes: 0 success (and `compat`: compatible); 1 bad flags or input
//! errors; 2 model parse/validation errors; 3 impossible evidence;
//! 4 incompatible moment vectors. Commands never write partial output
//! files: everything is rendered in memory first and written at the end.

mod render;
mod simulate;

use std::path::{Path, PathBuf};

use circ_engine::{
    compatible, dsl, gamma_points_with_cap, gen_balls_with_cap, gen_coin, index_by_plausibility,
    marginal, moments, predict, update, CircumstanceModel, Compatibility, Error, Observation,
    DEFAULT_MAX_N,
};
use clap::{Parser, Subcommand, ValueEnum};
use render::{
    classes_json, classes_text, distribution_json, distribution_text, json_document,
    observations_json, rational_pair, DECIMAL_DIGITS,
};
use serde_json::json;

const ENV_MAX_N: &str = "CIRC_ENGINE_MAX_N";

#[derive(Parser)]
#[command(
    name = "circ",
    version,
    about = "Exact-arithmetic inference over finite circumstance models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BuiltinName {
    Coin,
    Balls,
}

#[derive(Subcommand)]
enum Command {
    /// List the plausibility-indexed equivalence classes of a model
    Index {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Marginal outcome distribution of one measurement
    Marginal {
        file: PathBuf,
        /// Measurement to marginalize
        #[arg(long)]
        target: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Update the circumstance weights on observed outcomes
    Update {
        file: PathBuf,
        /// Observation as MEASUREMENT=OUTCOME; repeatable
        #[arg(long = "observe", value_parser = parse_observation)]
        observations: Vec<Observation>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Predictive distribution of an unobserved measurement
    Predict {
        file: PathBuf,
        /// Measurement to predict
        #[arg(long)]
        target: String,
        /// Observation as MEASUREMENT=OUTCOME; repeatable
        #[arg(long = "observe", value_parser = parse_observation)]
        observations: Vec<Observation>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a built-in model as a .cm file
    Gen {
        name: BuiltinName,
        /// Ball parameter for the balls model (chest holds 2N balls)
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the projected class points of the balls model as CSV
    Gamma {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the moment vectors of two analyses of the same context
    Compat {
        file_a: PathBuf,
        file_b: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Seeded simulation with sequential updating and a ratio audit
    Simulate {
        file: PathBuf,
        /// Seed for the ChaCha12 random stream (defaults to 0)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fix the hidden circumstance by id
        #[arg(long)]
        hidden: Option<String>,
        /// Draw the hidden circumstance from the prior weights
        #[arg(long)]
        draw_hidden: bool,
        /// Comma-separated measurements to observe, in order
        #[arg(long, value_delimiter = ',')]
        sequence: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canonically reformat a model file
    Fmt {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidModel(_) => 2,
            Error::ImpossibleEvidence => 3,
            _ => 1,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn parse_observation(raw: &str) -> Result<Observation, String> {
    match raw.split_once('=') {
        Some((m, o)) if !m.is_empty() && !o.is_empty() => Ok(Observation::new(m, o)),
        _ => Err(format!("'{raw}' is not of the form MEASUREMENT=OUTCOME")),
    }
}

fn load_model(path: &Path) -> Result<CircumstanceModel, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    dsl::parse(&text).map_err(|errors| {
        let rendered: Vec<String> = errors
            .iter()
            .map(|e| format!("{}:{e}", path.display()))
            .collect();
        CliError {
            code: 2,
            message: rendered.join("\n"),
        }
    })
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn max_n() -> Result<u32, CliError> {
    match std::env::var(ENV_MAX_N) {
        Ok(raw) => raw.parse().map_err(|_| {
            CliError::input(format!(
                "{ENV_MAX_N} must be a positive integer, got '{raw}'"
            ))
        }),
        Err(_) => Ok(DEFAULT_MAX_N),
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Index { file, format, out } => {
            let model = load_model(&file)?;
            let indexed = index_by_plausibility(&model)?;
            let content = match format {
                Format::Text => format!(
                    "model {}: {} {}\n{}",
                    indexed.source_name,
                    indexed.classes.len(),
                    if indexed.classes.len() == 1 {
                        "class"
                    } else {
                        "classes"
                    },
                    classes_text(&indexed)
                ),
                Format::Json => json_document(&json!({
                    "model": indexed.source_name,
                    "classes": classes_json(&indexed),
                })),
            };
            emit(out.as_deref(), &content)
        }
        Command::Marginal {
            file,
            target,
            format,
            out,
        } => {
            let model = load_model(&file)?;
            let dist = marginal(&model, &target)?;
            let outcomes = &model.measurement(&target).expect("checked above").outcomes;
            let content = match format {
                Format::Text => distribution_text(outcomes, &dist),
                Format::Json => json_document(&json!({
                    "model": model.name,
                    "target": target,
                    "distribution": distribution_json(outcomes, &dist),
                })),
            };
            emit(out.as_deref(), &content)
        }
        Command::Update {
            file,
            observations,
            format,
            out,
        } => {
            let model = load_model(&file)?;
            let posterior = update(&model, &observations)?;
            let indexed = index_by_plausibility(&posterior.model)?;
            let content = match format {
                Format::Text => format!(
                    "evidence {}\nposterior classes:\n{}",
                    rational_pair(&posterior.evidence),
                    classes_text(&indexed)
                ),
                Format::Json => json_document(&json!({
                    "model": model.name,
                    "observations": observations_json(&posterior.conditioning),
                    "evidence": posterior.evidence.to_string(),
                    "evidence_decimal": posterior.evidence.to_decimal(DECIMAL_DIGITS),
                    "posterior": { "classes": classes_json(&indexed) },
                })),
            };
            emit(out.as_deref(), &content)
        }
        Command::Predict {
            file,
            target,
            observations,
            format,
            out,
        } => {
            let model = load_model(&file)?;
            let dist = predict(&model, &target, &observations)?;
            let outcomes = &model.measurement(&target).expect("checked above").outcomes;
            let content = match format {
                Format::Text => distribution_text(outcomes, &dist),
                Format::Json => json_document(&json!({
                    "model": model.name,
                    "target": target,
                    "observations": observations_json(&observations),
                    "distribution": distribution_json(outcomes, &dist),
                })),
            };
            emit(out.as_deref(), &content)
        }
        Command::Gen { name, n, out } => {
            let model = match (name, n) {
                (BuiltinName::Coin, None) => gen_coin(),
                (BuiltinName::Coin, Some(_)) => {
                    return Err(CliError::input("--n only applies to the balls model"))
                }
                (BuiltinName::Balls, Some(n)) => gen_balls_with_cap(n, max_n()?)?,
                (BuiltinName::Balls, None) => {
                    return Err(CliError::input("the balls model requires --n"))
                }
            };
            let content = dsl::serialize(&model)?;
            emit(out.as_deref(), &content)
        }
        Command::Gamma { n, out } => {
            let points = gamma_points_with_cap(n, max_n()?)?;
            let mut content = String::from("qLa,qN1,weight,members,qLa_dec,qN1_dec,weight_dec\n");
            for p in points {
                content.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    p.q_letter_a,
                    p.q_number_1,
                    p.weight,
                    p.members,
                    p.q_letter_a.to_decimal(DECIMAL_DIGITS),
                    p.q_number_1.to_decimal(DECIMAL_DIGITS),
                    p.weight.to_decimal(DECIMAL_DIGITS),
                ));
            }
            emit(out.as_deref(), &content)
        }
        Command::Compat {
            file_a,
            file_b,
            format,
        } => {
            let model_a = load_model(&file_a)?;
            let model_b = load_model(&file_b)?;
            let moments_a = moments(&index_by_plausibility(&model_a)?);
            let moments_b = moments(&index_by_plausibility(&model_b)?);
            match compatible(&moments_a, &moments_b)? {
                Compatibility::Compatible => {
                    let content = match format {
                        Format::Text => "compatible\n".to_string(),
                        Format::Json => json_document(&json!({
                            "compatible": true,
                            "moments": moments_a.to_json(),
                        })),
                    };
                    print!("{content}");
                    Ok(())
                }
                Compatibility::FirstDifference {
                    rendered_key,
                    left,
                    right,
                    ..
                } => {
                    let content = match format {
                        Format::Text => format!(
                            "incompatible at {rendered_key}: {} vs {}\n",
                            rational_pair(&left),
                            rational_pair(&right)
                        ),
                        Format::Json => json_document(&json!({
                            "compatible": false,
                            "first_difference": {
                                "key": rendered_key,
                                "left": left.to_string(),
                                "right": right.to_string(),
                            },
                            "moments": {
                                "left": moments_a.to_json(),
                                "right": moments_b.to_json(),
                            },
                        })),
                    };
                    print!("{content}");
                    Err(CliError {
                        code: 4,
                        message: String::new(),
                    })
                }
            }
        }
        Command::Simulate {
            file,
            seed,
            hidden,
            draw_hidden,
            sequence,
            out,
        } => {
            let model = load_model(&file)?;
            let content = simulate::run(simulate::SimulationArgs {
                model: &model,
                seed,
                hidden: hidden.as_deref(),
                draw_hidden,
                sequence: &sequence,
            })
            .map_err(|e| match e {
                simulate::SimError::Input(message) => CliError::input(message),
                simulate::SimError::Engine(err) => err.into(),
            })?;
            emit(out.as_deref(), &content)
        }
        Command::Fmt { file, out } => {
            let model = load_model(&file)?;
            let content = dsl::serialize(&model)?;
            emit(out.as_deref(), &content)
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not failures.
            if e.use_stderr() {
                eprint!("{e}");
                std::process::exit(1);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    if let Err(e) = run(cli.command) {
        if !e.message.is_empty() {
            eprintln!("error: {}", e.message);
        }
        std::process::exit(e.code);
    }
}
