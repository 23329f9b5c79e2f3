mod cache;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use umod_core::algebra::UpsetAlgebra;
use umod_core::coloring::{Model, Variety};
use umod_core::decide::{decide_in, refute, Countermodel, DecideError, FreeAlgebra, RefuteOutcome};
use umod_core::document::{AlgebraDocument, ModelDocument};
use umod_core::dot::{algebra_dot, poset_dot};
use umod_core::partition::{maximal_partitions, PartialCorrectPartition, SubalgebraMode};
use umod_core::term::parse_term_for;
use umod_core::universal::Limits;
use umod_core::verify::{verify_duality, verify_maximal_subalgebras};

/// Exit status: 0 valid / passed, 1 invalid / failed, 2 unknown or error.
const EXIT_INVALID: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;

#[derive(Parser)]
#[command(name = "umod", version, about = "Universal models, free algebras and validity for nuclear implicative semilattices")]
struct Cli {
    /// Do not read or write the model cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Args, Clone, Copy)]
struct LimitArgs {
    /// Stop after this many layers.
    #[arg(long, default_value_t = Limits::default().max_layer)]
    max_layer: usize,
    /// Stop once this many points have been generated.
    #[arg(long, default_value_t = Limits::default().max_elements)]
    max_elements: usize,
}

impl From<LimitArgs> for Limits {
    fn from(a: LimitArgs) -> Limits {
        Limits { max_layer: a.max_layer, max_elements: a.max_elements }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the n-universal model of a variety.
    Build {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "nis")]
        variety: Variety,
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write the document here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the free n-generated algebra of a variety.
    Free {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "nis")]
        variety: Variety,
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether `term = 1` holds in a variety.
    Decide {
        term: String,
        #[arg(long, default_value = "nis")]
        variety: Variety,
        #[command(flatten)]
        limits: LimitArgs,
        /// Write a countermodel here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search small S-posets for a countermodel to `term = 1`.
    Refute {
        term: String,
        #[arg(long, default_value = "nis")]
        variety: Variety,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a model document, optionally for irreducibility.
    Check {
        input: PathBuf,
        /// Test the structural irreducibility criterion and the generation oracle.
        #[arg(long)]
        irreducible: bool,
        /// Number of colors, when the document does not say.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "nis")]
        variety: Variety,
    },
    /// List subalgebras of the upset algebra of an S-poset as partitions.
    Subalgebras {
        input: PathBuf,
        #[arg(long, default_value = "nuclear")]
        mode: SubalgebraMode,
        /// Only the maximal ones.
        #[arg(long)]
        maximal: bool,
    },
    /// Embed an irreducible model into the universal model.
    Embed {
        input: PathBuf,
        #[arg(long, default_value = "nis")]
        variety: Variety,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Convert a model or algebra document.
    Export {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the exhaustive duality and subalgebra checks.
    VerifyDuality {
        #[arg(long, default_value_t = 3)]
        max_size: usize,
    },
}

/// Writes one line to stdout. A closed pipe ends the process quietly.
fn say(line: &str) {
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = writeln!(stdout, "{line}").and_then(|_| stdout.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: writing output: {e}");
        std::process::exit(EXIT_UNKNOWN.into());
    }
}

macro_rules! out {
    ($($arg:tt)*) => { say(&format!($($arg)*)) };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_UNKNOWN)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => cache::write_atomic(path, text),
        None => {
            say(text.trim_end_matches('\n'));
            Ok(())
        }
    }
}

fn read_model_doc(path: &Path) -> Result<ModelDocument> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ModelDocument::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_model(path: &Path, n: Option<usize>) -> Result<Model> {
    let mut doc = read_model_doc(path)?;
    if let Some(n) = n {
        doc.n_vars = Some(n);
    }
    Ok(doc.to_model()?)
}

fn run(cli: Cli) -> Result<u8> {
    let use_cache = !cli.no_cache;
    match cli.command {
        Command::Build { n, variety, limits, format, out } => {
            let lm = cache::universal_model(n, variety, limits.into(), use_cache)?;
            let text = match format {
                Format::Json => ModelDocument::from_layered(&lm).to_json(),
                Format::Dot => poset_dot(lm.poset(), Some(lm.model().sposet().s()), Some(lm.model().colors())),
            };
            emit(out.as_deref(), &text)?;
            eprintln!("layers: {:?}", lm.layer_sizes());
            eprintln!("height: {}", lm.height());
            if let Some(t) = lm.truncation() {
                eprintln!("truncated: {:?} at layer {} after {} points", t.reason, t.layer, t.generated);
            }
            Ok(0)
        }
        Command::Free { n, variety, limits, format, out } => {
            let lm = cache::universal_model(n, variety, limits.into(), use_cache)?;
            let free = FreeAlgebra::from_model(lm)?;
            let (ua, alg) = free.tabulate(umod_core::algebra::MAX_TABULATED)?;
            let labels = (0..ua.len())
                .map(|i| {
                    let names: Vec<String> = ua.upset(i).members().iter().map(|x| free.universal_model().name(x)).collect();
                    format!("{{{}}}", names.join(","))
                })
                .collect();
            let alg = alg.with_labels(labels);
            let text = match format {
                Format::Json => {
                    let mut doc = AlgebraDocument::from_algebra(&alg);
                    doc.generators = Some(free.generator_indices(&ua));
                    doc.variant = Some(variety);
                    doc.to_json()
                }
                Format::Dot => algebra_dot(&alg),
            };
            emit(out.as_deref(), &text)?;
            eprintln!("elements: {}", alg.len());
            Ok(0)
        }
        Command::Decide { term, variety, limits, out } => {
            let t = parse_term_for(&term, variety)?;
            let n = t.variables().len();
            let lm = cache::universal_model(n, variety, limits.into(), use_cache)?;
            let free = match FreeAlgebra::from_model(lm) {
                Ok(f) => f,
                Err(e @ DecideError::Truncated { .. }) => {
                    out!("UNKNOWN: {e}");
                    return Ok(EXIT_UNKNOWN);
                }
                Err(e) => return Err(e.into()),
            };
            let verdict = decide_in(&t, &free)?;
            if verdict.valid {
                out!("VALID");
                return Ok(0);
            }
            report_countermodel(&verdict.countermodel.expect("invalid verdicts carry a countermodel"), out.as_deref())?;
            Ok(EXIT_INVALID)
        }
        Command::Refute { term, variety, max_size, out } => {
            let t = parse_term_for(&term, variety)?;
            match refute(&t, variety, max_size)? {
                RefuteOutcome::Invalid(cm) => {
                    report_countermodel(&cm, out.as_deref())?;
                    Ok(EXIT_INVALID)
                }
                RefuteOutcome::Unknown { max_size, models_checked } => {
                    out!("UNKNOWN: no countermodel with at most {max_size} points ({models_checked} assignments checked)");
                    Ok(EXIT_UNKNOWN)
                }
            }
        }
        Command::Check { input, irreducible, n, variety } => {
            let m = read_model(&input, n)?;
            let mut report = json!({
                "n_elements": m.len(),
                "n_vars": m.n(),
                "s": m.sposet().s().to_vec(),
                "height": m.poset().height(),
            });
            let mut code = 0;
            if irreducible {
                let violation = m.violation(variety)?;
                let oracle = match UpsetAlgebra::new(m.poset()) {
                    Ok(ua) => Value::Bool(m.generates_in(&ua, variety)),
                    Err(_) => Value::Null,
                };
                report["variety"] = json!(variety);
                report["irreducible"] = json!(violation.is_none());
                report["violation"] = json!(violation);
                report["generates"] = oracle;
                if violation.is_some() {
                    code = EXIT_INVALID;
                }
            }
            out!("{}", serde_json::to_string_pretty(&report)?);
            Ok(code)
        }
        Command::Subalgebras { input, mode, maximal } => {
            let sp = read_model_doc(&input)?.to_sposet()?;
            let ua = UpsetAlgebra::new(sp.poset())?;
            let parts: Vec<PartialCorrectPartition> = if maximal {
                maximal_partitions(&sp, mode)
            } else {
                let alg = ua.nuclear(sp.s(), mode == SubalgebraMode::BoundedNuclear);
                alg.subalgebras(mode.signature())
                    .iter()
                    .map(|b| PartialCorrectPartition::of_subalgebra(&ua, b))
                    .collect::<Result<_, _>>()?
            };
            let name = |x: usize| sp.poset().name(x);
            let list: Vec<Value> = parts
                .iter()
                .map(|p| {
                    json!({
                        "domain": p.domain().iter().map(name).collect::<Vec<_>>(),
                        "classes": p.classes().iter().map(|c| c.iter().map(|&x| name(x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                        "size": p.subalgebra(&ua).count(),
                        "classification": p.classify(Some(sp.s())),
                    })
                })
                .collect();
            out!("{}", serde_json::to_string_pretty(&json!({ "mode": mode, "maximal": maximal, "partitions": list }))?);
            eprintln!("{} partitions", list.len());
            Ok(0)
        }
        Command::Embed { input, variety, n, limits } => {
            let m = read_model(&input, n)?;
            let lm = cache::universal_model(m.n(), variety, limits.into(), use_cache)?;
            match lm.embed(&m) {
                Ok(image) => {
                    let pairs: Vec<Value> = image
                        .iter()
                        .enumerate()
                        .map(|(x, &y)| json!({ "point": m.poset().name(x), "image": lm.name(y) }))
                        .collect();
                    out!("{}", serde_json::to_string_pretty(&pairs)?);
                    Ok(0)
                }
                Err(e) => {
                    out!("NOT EMBEDDED: {e}");
                    Ok(EXIT_INVALID)
                }
            }
        }
        Command::Export { input, format, out } => {
            let text = fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", input.display()))?;
            let rendered = if value.get("meet").is_some() {
                let alg = AlgebraDocument::from_json(&text)?.to_algebra()?;
                match format {
                    Format::Dot => algebra_dot(&alg),
                    Format::Json => AlgebraDocument::from_algebra(&alg).to_json(),
                }
            } else {
                let doc = ModelDocument::from_json(&text)?;
                let sp = doc.to_sposet()?;
                match format {
                    Format::Dot => poset_dot(sp.poset(), Some(sp.s()), doc.colors.as_deref()),
                    Format::Json => {
                        doc.to_model()?;
                        doc.to_json()
                    }
                }
            };
            emit(out.as_deref(), &rendered)?;
            Ok(0)
        }
        Command::VerifyDuality { max_size } => {
            let duality = verify_duality(max_size, max_size.min(3), max_size.min(2))?;
            let subalgebras = verify_maximal_subalgebras(max_size)?;
            let passed = duality.passed() && subalgebras.passed();
            out!("{}", serde_json::to_string_pretty(&json!({ "duality": duality, "subalgebras": subalgebras, "passed": passed }))?);
            eprintln!(
                "{} S-posets, {} Köhler morphisms, {} homomorphisms, {} composites, {} maximal-subalgebra comparisons: {}",
                duality.sposets,
                duality.kohler_morphisms,
                duality.homomorphisms,
                duality.compositions,
                subalgebras.maximal_checks,
                if passed { "all checks pass" } else { "FAILURES" }
            );
            Ok(if passed { 0 } else { EXIT_INVALID })
        }
    }
}

fn report_countermodel(cm: &Countermodel, out: Option<&Path>) -> Result<()> {
    let mut doc = ModelDocument::from_model(&cm.model);
    doc.names = Some((0..cm.model.len()).map(|x| cm.model.poset().name(x)).collect());
    let text = doc.to_json();
    let vars: Vec<String> = cm.variables.iter().map(|v| format!("x{v}")).collect();
    match out {
        Some(path) => {
            cache::write_atomic(path, &text)?;
            out!("INVALID: countermodel with {} points written to {}", cm.model.len(), path.display());
        }
        None => {
            out!("INVALID: countermodel with {} points", cm.model.len());
            out!("{text}");
        }
    }
    if !vars.is_empty() {
        eprintln!("color i stands for {}", vars.iter().enumerate().map(|(i, v)| format!("{}={v}", i + 1)).collect::<Vec<_>>().join(", "));
    }
    Ok(())
}
