use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use monact::certify::{self, CertifyError, ReportFormat};
use monact::config::Config;
use monact::functors;
use monact::mset;
use monact::rewriting::Word;

const BUNDLED: &[(&str, &str)] = &[
    ("paper.cfg", include_str!("../configs/paper.cfg")),
    ("identity.cfg", include_str!("../configs/identity.cfg")),
];

#[derive(Parser)]
#[command(
    name = "monact",
    version,
    about = "Finitely presented monoids, right M-sets, and a mechanical \
             verification that a hyperconnected local geometric morphism \
             need not be locally connected"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// Config file path; `paper.cfg` and `identity.cfg` resolve to the
    /// bundled copies when no such file exists on disk.
    #[arg(short = 'c', long = "config", default_value = "paper.cfg")]
    config: String,
}

#[derive(Subcommand)]
enum Command {
    /// Print the normal form of a word in a declared presentation.
    Normalize {
        #[command(flatten)]
        config: ConfigArg,
        /// Presentation name.
        #[arg(short = 'm', long = "monoid")]
        monoid: String,
        /// Space-separated generator word; `1` is the empty word.
        #[arg(short = 'w', long = "word")]
        word: String,
    },
    /// Run the end-to-end verification and print the report.
    Verify {
        #[command(flatten)]
        config: ConfigArg,
        /// Degree bound (defaults to the config's `bound` line).
        #[arg(long)]
        bound: Option<usize>,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Enumerate the connected components of an M-set up to a bound.
    Components {
        #[command(flatten)]
        config: ConfigArg,
        /// M-set name.
        #[arg(short = 's', long = "mset")]
        mset: String,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Compute the tensor partition f_!(X) = X (x)_M N up to a bound.
    Tensor {
        #[command(flatten)]
        config: ConfigArg,
        /// M-set name.
        #[arg(short = 's', long = "mset")]
        mset: String,
        /// Morphism inducing f_! (defaults to the verify block's).
        #[arg(long)]
        morphism: Option<String>,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Check local confluence of a presentation's rewrite rules.
    Confluence {
        #[command(flatten)]
        config: ConfigArg,
        /// Presentation name.
        #[arg(short = 'm', long = "monoid")]
        monoid: String,
    },
    /// Re-check a declared morphism and report generator surjectivity.
    MorphismCheck {
        #[command(flatten)]
        config: ConfigArg,
        /// Morphism name.
        #[arg(long = "morphism")]
        morphism: String,
        #[arg(long)]
        bound: Option<usize>,
    },
}

fn load_config(arg: &ConfigArg) -> Result<Config, String> {
    if Path::new(&arg.config).exists() {
        return Config::load(&arg.config).map_err(|e| e.to_string());
    }
    for (name, text) in BUNDLED {
        if arg.config == *name {
            return Config::parse(text).map_err(|e| e.to_string());
        }
    }
    Err(format!("config file `{}` not found", arg.config))
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

/// Writes to stdout, exiting quietly when the reader has gone away
/// (e.g. `monact components | head`).
fn emit(text: impl AsRef<str>) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_ref().as_bytes()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}

macro_rules! outln {
    ($($arg:tt)*) => { emit(format!("{}\n", format_args!($($arg)*))) };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => usage_error(&msg),
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Normalize { config, monoid, word } => {
            let cfg = load_config(&config)?;
            let p = cfg
                .monoid(&monoid)
                .ok_or_else(|| format!("no monoid named `{monoid}`"))?;
            let w = Word::parse(&word);
            p.check_word(&w).map_err(|e| e.to_string())?;
            outln!("{}", p.normalize(&w));
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { config, bound, json } => {
            let cfg = load_config(&config)?;
            let bound = bound.unwrap_or(cfg.default_bound);
            let report = match certify::verify_counterexample(&cfg, bound) {
                Ok(r) => r,
                Err(e @ CertifyError::BoundTooSmall(_)) => return Err(e.to_string()),
                Err(e) => return Err(e.to_string()),
            };
            let format = if json { ReportFormat::Json } else { ReportFormat::Text };
            emit(certify::render_report(&report, format));
            Ok(if report.concluded() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Components { config, mset, bound } => {
            let cfg = load_config(&config)?;
            let bound = bound.unwrap_or(cfg.default_bound);
            let x = cfg
                .mset(&mset)
                .ok_or_else(|| format!("no mset named `{mset}`"))?;
            let part = mset::components(x, bound);
            outln!(
                "{}: {} component(s) at bound {bound}",
                x.name,
                part.class_count()
            );
            for class in part.classes() {
                let members: Vec<String> = class.iter().map(|e| e.to_string()).collect();
                outln!("  {{ {} }}", members.join(", "));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Tensor { config, mset, morphism, bound } => {
            let cfg = load_config(&config)?;
            let bound = bound.unwrap_or(cfg.default_bound);
            let x = cfg
                .mset(&mset)
                .ok_or_else(|| format!("no mset named `{mset}`"))?;
            let phi = resolve_morphism(&cfg, morphism.as_deref())?;
            let part = functors::tensor(x, &phi, bound).map_err(|e| e.to_string())?;
            outln!(
                "f_!({}) at bound {bound}: {} class(es)",
                x.name,
                part.class_count()
            );
            for rep in part.representatives() {
                outln!("  {} (x) {}", rep.0, rep.1);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Confluence { config, monoid } => {
            let cfg = load_config(&config)?;
            let p = cfg
                .monoid(&monoid)
                .ok_or_else(|| format!("no monoid named `{monoid}`"))?;
            // Construction already enforces confluence; re-run the check
            // and show the critical pairs for the record.
            let ok = p.is_locally_confluent();
            outln!("locally confluent: {}", if ok { "yes" } else { "no" });
            outln!("critical pairs: {}", p.critical_pairs().len());
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::MorphismCheck { config, morphism, bound } => {
            let cfg = load_config(&config)?;
            let bound = bound.unwrap_or(cfg.default_bound);
            let f = cfg
                .morphisms
                .get(&morphism)
                .ok_or_else(|| format!("no morphism named `{morphism}`"))?;
            outln!(
                "{} : {} -> {} preserves all relations: yes",
                f.name, f.source.name, f.target.name
            );
            let v = f.check_surjective_on_generators(bound);
            for (g, w) in &v.witnesses {
                match w {
                    Some(w) => println!("  {g} = {}({w})", f.name),
                    None => println!("  no preimage of {g} up to length {bound}"),
                }
            }
            outln!(
                "surjective on generators: {}",
                if v.accepted { "yes" } else { "no" }
            );
            Ok(if v.accepted { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn resolve_morphism(
    cfg: &Config,
    name: Option<&str>,
) -> Result<Arc<monact::MonoidMorphism>, String> {
    if let Some(name) = name {
        return cfg
            .morphisms
            .get(name)
            .cloned()
            .ok_or_else(|| format!("no morphism named `{name}`"));
    }
    if let Some(v) = &cfg.verify {
        return Ok(cfg.morphisms[&v.morphism].clone());
    }
    Err("no --morphism given and the config has no verify block".to_owned())
}
