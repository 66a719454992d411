use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wittcheck::config::{ConfigError, ExtensionSource, Format, RunConfig, Suite, DEFAULT_M, DEFAULT_TRIALS};
use wittcheck::{emit_report, run};
use wittcheck_core::cohomology::trace_image_exponent;
use wittcheck_core::extension::build_extension;
use wittcheck_core::universal::{f_polynomial, g_polynomial, sum_polynomials, ResourceLimits};

/// Verification harness for trace-zero Witt vectors over ramified
/// degree-p extensions.
#[derive(Parser, Debug)]
#[command(name = "wittcheck", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    verify: VerifyArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run verification suites (the default).
    Verify(VerifyArgs),
    /// Print a universal polynomial in the exchange format.
    WittPoly(PolyArgs),
    /// Print p, e_K, e_L, t and d for an extension.
    ExtensionInfo(InfoArgs),
}

#[derive(Args, Debug, Clone)]
struct ExtensionArgs {
    /// Built-in extension: quadratic-gaussian, quadratic-sqrt2, cyclotomic-step.
    #[arg(long, conflicts_with = "spec_file")]
    extension: Option<String>,
    /// TOML extension spec.
    #[arg(long)]
    spec_file: Option<PathBuf>,
    /// Prime for cyclotomic-step (default 3).
    #[arg(long)]
    p: Option<u64>,
    /// Working precision N (default 32, or the spec file's value).
    #[arg(long)]
    precision: Option<u32>,
}

impl ExtensionArgs {
    fn source(&self) -> Result<ExtensionSource, ConfigError> {
        match (&self.extension, &self.spec_file) {
            (_, Some(path)) => Ok(ExtensionSource::File(path.clone())),
            (Some(name), None) => Ok(ExtensionSource::Builtin { name: name.clone(), p: self.p }),
            (None, None) => Err(ConfigError("one of --extension or --spec-file is required".into())),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct VerifyArgs {
    #[command(flatten)]
    ext: ExtensionArgs,
    /// Witt length minus one.
    #[arg(long, default_value_t = DEFAULT_M)]
    m: usize,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated subset of symbolic, trace-lemmas, cascade,
    /// proposition, h1, negative-control; or `all`.
    #[arg(long, default_value = "all")]
    suites: String,
    /// text, json or csv.
    #[arg(long, default_value = "text")]
    format: String,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Bound on projected symbolic term counts.
    #[arg(long, default_value_t = ResourceLimits::default().max_terms)]
    max_terms: u128,
    /// Record wall-clock time per suite (reports are then not reproducible).
    #[arg(long)]
    timings: bool,
}

impl VerifyArgs {
    fn config(&self) -> Result<RunConfig, ConfigError> {
        Ok(RunConfig {
            extension: self.ext.source()?,
            precision: self.ext.precision,
            m: self.m,
            trials: self.trials,
            seed: self.seed,
            suites: Suite::parse_list(&self.suites)?,
            format: Format::parse(&self.format)?,
            limits: ResourceLimits { max_terms: self.max_terms },
            timings: self.timings,
        })
    }
}

#[derive(Args, Debug)]
struct PolyArgs {
    #[arg(long)]
    p: u64,
    /// Level n; for `g` this selects g_{n-2}.
    #[arg(long)]
    level: usize,
    /// Number of summands for `z` (f and g always use p).
    #[arg(long, default_value_t = 2)]
    arity: usize,
    /// z, f or g.
    #[arg(long, default_value = "z")]
    which: String,
    #[arg(long, default_value_t = ResourceLimits::default().max_terms)]
    max_terms: u128,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InfoArgs {
    #[command(flatten)]
    ext: ExtensionArgs,
    /// text or json.
    #[arg(long, default_value = "text")]
    format: String,
}

fn write_out(out: &Option<PathBuf>, bytes: &[u8]) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(bytes).map_err(|e| e.to_string()),
    }
}

fn verify(args: &VerifyArgs) -> ExitCode {
    let outcome = match args.config().and_then(|c| run(&c).map(|o| (c, o))) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let (config, outcome) = outcome;
    if let Err(e) = write_out(&args.out, &emit_report(&outcome.report, config.format)) {
        eprintln!("{e}");
        return ExitCode::from(2);
    }
    ExitCode::from(outcome.exit_code as u8)
}

fn witt_poly(args: &PolyArgs) -> ExitCode {
    let limits = ResourceLimits { max_terms: args.max_terms };
    let poly = match args.which.as_str() {
        "z" => sum_polynomials(args.p, args.level, args.arity, &limits).map(|z| z[args.level].clone()),
        "f" => f_polynomial(args.p, args.level, &limits),
        "g" => g_polynomial(args.p, args.level, &limits),
        other => {
            eprintln!("configuration error: --which must be z, f or g, not {other:?}");
            return ExitCode::from(2);
        }
    };
    match poly {
        Ok(poly) => match write_out(&args.out, poly.to_exchange().as_bytes()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(2)
        }
    }
}

fn extension_info(args: &InfoArgs) -> ExitCode {
    let result = (|| -> Result<String, ConfigError> {
        let config = RunConfig { extension: args.ext.source()?, precision: args.ext.precision, ..Default::default() };
        let spec = config.resolve_spec()?;
        let ext = build_extension(&spec).map_err(|e| ConfigError(e.to_string()))?;
        let d = trace_image_exponent(&ext).map_err(|e| ConfigError(e.to_string()))?;
        match Format::parse(&args.format)? {
            Format::Json => {
                let v = serde_json::json!({
                    "extension": ext.name(),
                    "p": ext.p(),
                    "precision": ext.precision(),
                    "e_K": ext.e_k(),
                    "e_L": ext.e_l(),
                    "t": ext.t(),
                    "d": d,
                });
                Ok(serde_json::to_string_pretty(&v).expect("json") + "\n")
            }
            Format::Text => Ok(format!(
                "extension {}\np {}\nprecision {}\ne_K {}\ne_L {}\nt {}\nd {}\n",
                ext.name(),
                ext.p(),
                ext.precision(),
                ext.e_k(),
                ext.e_l(),
                ext.t(),
                d
            )),
            Format::Csv => Err(ConfigError("extension-info supports text and json".into())),
        }
    })();
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Some(Command::Verify(args)) => verify(args),
        Some(Command::WittPoly(args)) => witt_poly(args),
        Some(Command::ExtensionInfo(args)) => extension_info(args),
        None => verify(&cli.verify),
    }
}
