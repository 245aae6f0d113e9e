use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stabffg::constructions::Boundary;
use stabffg::dsl::{self, Body, Definition, Diagnostic, Document, EvalError, Rows};
use stabffg::ffg::{certify_prop1, FfgError, Verdict};
use stabffg::inference::{simulate, ChannelModel, DecodeMode, InferenceError, SimRecord};
use stabffg::symplectic::{brute_force_dual, gf4_rank, is_gf4_linear, min_coset_weight, SymplecticError};
use stabffg::StabilizerCode;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "stabffg", version, about = "Stabilizer label codes as factor graphs")]
struct CliConfig {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report self-orthogonality, self-duality and GF(4)-linearity
    Check(Target),
    /// Print the symplectic dual as a code block
    Dual {
        #[command(flatten)]
        target: Target,
        /// Cross-check against full enumeration up to this length
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
        bound_dual: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Print the global code of a factor graph as a code block
    Extract {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        out: Output,
    },
    /// Minimum symplectic weight of the normalizer outside the stabilizer
    Distance {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..))]
        bound_distance: u64,
    },
    /// Check every local code of a factor graph
    Certify(Target),
    /// Add a construction to a document and print it with its dependencies
    #[command(subcommand)]
    Build(Build),
    /// Monte Carlo logical error rate under depolarizing noise
    DecodeSim(DecodeSim),
    /// Write the bundled example files
    Examples {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct Target {
    file: PathBuf,
    name: String,
}

#[derive(Debug, Args)]
struct Output {
    /// Write to this file instead of stdout
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BuildCommon {
    file: PathBuf,
    /// Name of the new definition
    #[arg(long)]
    name: String,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Subcommand)]
enum Build {
    /// CSS code from two binary matrices
    Css {
        #[command(flatten)]
        common: BuildCommon,
        b1: String,
        b2: String,
    },
    /// Chain of copies of a trellis section
    Conv {
        #[command(flatten)]
        common: BuildCommon,
        section: String,
        #[arg(long)]
        length: usize,
        #[arg(long, value_enum, default_value_t = BoundaryArg::Terminated)]
        boundary: BoundaryArg,
    },
    /// Serial concatenation through an interleaver
    Turbo {
        #[command(flatten)]
        common: BuildCommon,
        outer: String,
        inner: String,
        /// 1-based interleaver, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        perm: Vec<usize>,
        /// Inner half-edges fed by the interleaver, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        inputs: Vec<String>,
    },
    /// Factor graph of a graph state
    Graphstate {
        #[command(flatten)]
        common: BuildCommon,
        graph: String,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Terminated,
    Tailbiting,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DecoderArg {
    MlError,
    MlCoset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Debug, Args)]
struct DecodeSim {
    #[command(flatten)]
    target: Target,
    /// Depolarizing probabilities, comma separated
    #[arg(long, value_delimiter = ',', value_parser = probability, required = true)]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = DecoderArg::MlCoset)]
    decoder: DecoderArg,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    bound_decode: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn probability(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("{s:?} is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{diag}", path.display())]
    Syntax { path: PathBuf, diag: Diagnostic },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Code(#[from] SymplecticError),
    #[error(transparent)]
    Ffg(#[from] FfgError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error("{0}")]
    Other(String),
}

fn load(path: &Path) -> Result<Document, CliError> {
    let bytes = fs::read(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    let text = String::from_utf8(bytes).map_err(|e| CliError::Other(format!("{}: not UTF-8: {e}", path.display())))?;
    dsl::parse(&text).map_err(|diag| CliError::Syntax { path: path.into(), diag })
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn summary(c: &StabilizerCode) -> String {
    format!(
        "self-orthogonal: {}, self-dual: {}, rank {}, n {}",
        yes(c.is_self_orthogonal()),
        yes(c.is_self_dual()),
        c.rank(),
        c.n()
    )
}

fn code_block(name: &str, c: &StabilizerCode, comments: Vec<String>) -> String {
    let mut doc = Document::new();
    doc.insert(Definition {
        name: name.to_string(),
        comments,
        body: Body::Code { n: c.n(), rows: Rows::Pauli(c.basis_vectors()) },
    });
    dsl::serialize(&doc)
}

fn emit(out: &Output, text: &str) -> Result<(), CliError> {
    match &out.out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check(t: &Target) -> Result<String, CliError> {
    let c = load(&t.file)?.code(&t.name)?;
    let mut s = summary(&c) + "\n";
    match gf4_rank(&c) {
        Some(k) if is_gf4_linear(&c) => writeln!(s, "GF(4)-linear: yes, GF(4) rank {k}"),
        _ => writeln!(s, "GF(4)-linear: no"),
    }
    .expect("string write");
    Ok(s)
}

fn dual(t: &Target, bound: u64) -> Result<String, CliError> {
    let c = load(&t.file)?.code(&t.name)?;
    let d = c.dual();
    let mut comments = vec![format!("dual of {}: {}", t.name, summary(&d))];
    if c.n() as u64 <= bound {
        if !brute_force_dual(&c, c.n())?.same_code(&d) {
            return Err(CliError::Other("dual disagrees with enumeration".into()));
        }
        comments.push("checked against enumeration".into());
    }
    Ok(code_block(&format!("{}-dual", t.name), &d, comments))
}

fn extract(t: &Target) -> Result<String, CliError> {
    let doc = load(&t.file)?;
    let g = doc.ffg(&t.name)?;
    let c = stabffg::ffg::extract_global_code(&g)?;
    let comments = vec![format!("global code of {}: {}", t.name, summary(&c))];
    Ok(code_block(&format!("{}-code", t.name), &c, comments))
}

fn distance(t: &Target, bound: u64) -> Result<String, CliError> {
    let c = load(&t.file)?.code(&t.name)?;
    let w = min_coset_weight(&c, 2 * bound as usize)?;
    let witness = w.witness.to_pauli().expect("binary");
    Ok(if w.self_dual {
        format!("self-dual: min nonzero weight of C⊥: {}\nwitness: {witness}\n", w.weight)
    } else {
        format!("min weight of C⊥∖C: {}\nwitness: {witness}\n", w.weight)
    })
}

fn certify(t: &Target) -> Result<String, CliError> {
    let g = load(&t.file)?.ffg(&t.name)?;
    let cert = certify_prop1(&g)?;
    let verdict = match cert.verdict {
        Verdict::SelfDual => "SelfDual (global code is self-dual)",
        Verdict::SelfOrthogonal => "SelfOrthogonal (global code is self-orthogonal)",
        Verdict::NoCertificate => "NoCertificate",
    };
    let mut s = format!("verdict: {verdict}\n");
    for f in &cert.factors {
        writeln!(s, "factor {}: self-orthogonal {}, self-dual {}", f.name, yes(f.self_orthogonal), yes(f.self_dual))
            .expect("string write");
    }
    let failing = cert.failing();
    if !failing.is_empty() {
        writeln!(s, "not self-orthogonal: {}", failing.join(", ")).expect("string write");
    }
    Ok(s)
}

fn build(b: &Build) -> Result<(String, &Output), CliError> {
    let (common, body) = match b {
        Build::Css { common, b1, b2 } => (common, Body::Css { b1: b1.clone(), b2: b2.clone() }),
        Build::Conv { common, section, length, boundary } => {
            let boundary = match boundary {
                BoundaryArg::Terminated => Boundary::Terminated,
                BoundaryArg::Tailbiting => Boundary::TailBiting,
            };
            (common, Body::Chain { section: section.clone(), len: *length, boundary })
        }
        Build::Turbo { common, outer, inner, perm, inputs } => {
            if perm.contains(&0) {
                return Err(CliError::Other("interleaver entries are 1-based".into()));
            }
            let perm = perm.iter().map(|p| p - 1).collect();
            (common, Body::Turbo { outer: outer.clone(), inner: inner.clone(), perm, inputs: inputs.clone() })
        }
        Build::Graphstate { common, graph } => (common, Body::GraphState { graph: graph.clone() }),
    };
    let mut doc = load(&common.file)?;
    if doc.get(&common.name).is_some() {
        return Err(CliError::Other(format!("{} is already defined", common.name)));
    }
    doc.insert(Definition { name: common.name.clone(), comments: Vec::new(), body });
    let c = doc.code(&common.name)?;
    let mut out = doc.closure(&common.name);
    let mut def = out.get(&common.name).cloned().expect("inserted");
    def.comments = vec![format!("global code: {}", summary(&c))];
    out.insert(def);
    let text = dsl::serialize(&out);
    if let Err(diag) = dsl::parse(&text) {
        return Err(CliError::Other(format!("construction does not serialize: {diag}")));
    }
    Ok((text, &common.out))
}

fn decode_sim(a: &DecodeSim) -> Result<String, CliError> {
    let c = load(&a.target.file)?.code(&a.target.name)?;
    let mode = match a.decoder {
        DecoderArg::MlError => DecodeMode::MostLikelyError,
        DecoderArg::MlCoset => DecodeMode::MostLikelyCoset,
    };
    let mut s = String::new();
    for &eps in &a.eps {
        let ch = ChannelModel::depolarizing(c.n(), eps)?;
        let r = simulate(&c, &ch, a.trials, a.seed, mode, a.bound_decode as usize)?;
        let rec = SimRecord::new(eps, &r, mode, a.seed);
        match a.format {
            Format::Records => {
                s.push_str(&serde_json::to_string(&rec).map_err(|e| CliError::Other(e.to_string()))?);
                s.push('\n');
            }
            Format::Text => writeln!(
                s,
                "eps {eps}: {} failures in {} trials, rate {:.6e} ± {:.6e} ({}, seed {})",
                r.failures,
                r.trials,
                r.rate,
                r.ci_halfwidth,
                mode.name(),
                a.seed
            )
            .expect("string write"),
        }
    }
    Ok(s)
}

fn examples(dir: &Path) -> Result<String, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.into(), source })?;
    let mut s = String::new();
    for (name, text) in dsl::CORPUS {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|source| CliError::Io { path: path.clone(), source })?;
        writeln!(s, "{}", path.display()).expect("string write");
    }
    Ok(s)
}

fn run(cfg: &CliConfig) -> Result<(), CliError> {
    let stdout = Output { out: None };
    let (text, out) = match &cfg.command {
        Command::Check(t) => (check(t)?, &stdout),
        Command::Dual { target, bound_dual, out } => (dual(target, *bound_dual)?, out),
        Command::Extract { target, out } => (extract(target)?, out),
        Command::Distance { target, bound_distance } => (distance(target, *bound_distance)?, &stdout),
        Command::Certify(t) => (certify(t)?, &stdout),
        Command::Build(b) => build(b)?,
        Command::DecodeSim(a) => (decode_sim(a)?, &stdout),
        Command::Examples { out } => (examples(out)?, &stdout),
    };
    emit(out, &text)?;
    std::io::stdout().flush().map_err(|source| CliError::Io { path: "<stdout>".into(), source })
}

fn main() -> ExitCode {
    let cfg = match CliConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
