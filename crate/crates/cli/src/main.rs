use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use stdvb::bundle::validate_bundle;
use stdvb::json::{self, PresheafJson, SiteJson};
use stdvb::projective::{base_change, check_onfunc, check_oninf, sample_base_change, ChartRule};
use stdvb::{verify, Error, ProjSite, RingDesc, StdBundle};

type BoxError = Box<dyn std::error::Error>;

#[derive(Parser)]
#[command(name = "stdvb", version, about = "Standard vector bundles on finite Zariski sites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Site descriptions
    #[command(subcommand)]
    Site(SiteCmd),
    /// Free presheaves
    #[command(subcommand)]
    Presheaf(PresheafCmd),
    /// Bundle operations
    #[command(subcommand)]
    Bundle(BundleCmd),
    /// Projective spaces and twisted bundles
    #[command(subcommand)]
    Proj(ProjCmd),
    /// Run the claim suite
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum SiteCmd {
    /// Validate the category, ring data, pullbacks and coverings
    Check { file: PathBuf },
}

#[derive(Subcommand)]
enum PresheafCmd {
    /// Validate identities and functoriality
    Check { file: PathBuf },
}

#[derive(Args)]
struct Out {
    /// Write here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BundleCmd {
    /// E ⊕ F
    Sum {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// E ⊗ F
    Tensor {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Pull back to the small site of an object
    Pullback {
        file: PathBuf,
        /// Object whose small site receives the bundle
        #[arg(long)]
        to: String,
        #[command(flatten)]
        out: Out,
    },
    /// Dump transition matrices on a declared covering of the terminal object
    Cocycle {
        file: PathBuf,
        /// Index among the declared coverings of the terminal object
        /// (default: the first one that is not just the identity)
        #[arg(long)]
        covering: Option<usize>,
        #[command(flatten)]
        out: Out,
    },
    /// Validate bundle data
    Verify { file: PathBuf },
}

#[derive(Subcommand)]
enum ProjCmd {
    /// The standard site of P^r over Q
    Build {
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[command(flatten)]
        out: Out,
    },
    /// O(n) on P^r
    Twist {
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[command(flatten)]
        out: Out,
    },
    /// Check that O(n) restricts to the trivial bundle at the point at infinity
    VerifyOninf {
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
    },
    /// Check that O(n) is preserved by base change
    VerifyOnfunc {
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// `all` or a claim id
    #[arg(long, default_value = "all")]
    scope: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 25)]
    trials: usize,
    /// Print the report as JSON
    #[arg(long)]
    json: bool,
    /// Include wall time per claim
    #[arg(long)]
    timings: bool,
    /// List claim ids and exit
    #[arg(long)]
    list: bool,
}

fn read<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, BoxError> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

/// Writes to standard output; a closed pipe on the reading end is not an error.
fn say(text: &str) -> Result<(), BoxError> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit<T: Serialize>(value: &T, out: &Out) -> Result<(), BoxError> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match &out.out {
        Some(p) => fs::write(p, text)?,
        None => say(&text)?,
    }
    Ok(())
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn verdict(ok: bool, what: &str) -> Result<ExitCode, BoxError> {
    say(&format!("{}: {what}\n", if ok { "PASS" } else { "FAIL" }))?;
    Ok(status(ok))
}

fn report(valid: bool, text: String) -> Result<ExitCode, BoxError> {
    say(&text)?;
    Ok(status(valid))
}

fn run(cli: Cli) -> Result<ExitCode, BoxError> {
    match cli.command {
        Command::Site(SiteCmd::Check { file }) => {
            let j: SiteJson = read(&file)?;
            let rep = json::site_from_json(&j)?.validate();
            report(rep.is_valid(), rep.to_string())
        }
        Command::Presheaf(PresheafCmd::Check { file }) => {
            let j: PresheafJson = read(&file)?;
            let rep = json::presheaf_from_json(&j)?.validate();
            report(rep.violations.is_empty(), rep.to_string())
        }
        Command::Bundle(cmd) => bundle(cmd),
        Command::Proj(cmd) => proj(cmd),
        Command::Verify(a) => {
            if a.list {
                say(&verify::claim_ids().iter().map(|id| format!("{id}\n")).collect::<String>())?;
                return Ok(ExitCode::SUCCESS);
            }
            let rep = verify::run(&a.scope, a.seed, a.trials, a.timings)?;
            if a.json {
                say(&(serde_json::to_string_pretty(&rep)? + "\n"))?;
            } else {
                say(&rep.table())?;
            }
            Ok(status(rep.passed()))
        }
    }
}

fn bundle(cmd: BundleCmd) -> Result<ExitCode, BoxError> {
    match cmd {
        BundleCmd::Sum { a, b, out } => {
            let (e, f) = json::bundle_pair_from_json(&read(&a)?, &read(&b)?)?;
            emit(&json::bundle_to_json(&e.direct_sum(&f)?), &out)?;
        }
        BundleCmd::Tensor { a, b, out } => {
            let (e, f) = json::bundle_pair_from_json(&read(&a)?, &read(&b)?)?;
            emit(&json::bundle_to_json(&e.tensor(&f)?), &out)?;
        }
        BundleCmd::Pullback { file, to, out } => {
            let e = json::bundle_from_json(&read(&file)?)?;
            let y = e.site().object_by_name(&to).ok_or_else(|| Error::Site(format!("unknown object `{to}`")))?;
            emit(&json::bundle_to_json(&e.restrict_small(y)?), &out)?;
        }
        BundleCmd::Cocycle { file, covering, out } => {
            let e = json::bundle_from_json(&read(&file)?)?;
            let cover = chosen_covering(&e, covering)?;
            emit(&json::cocycle_dump(&e, &cover)?, &out)?;
        }
        BundleCmd::Verify { file } => {
            let p = json::presheaf_from_json(&read(&file)?)?;
            let rep = validate_bundle(&p);
            return report(rep.violations.is_empty(), rep.to_string());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn chosen_covering(e: &StdBundle, index: Option<usize>) -> Result<Vec<stdvb::MorId>, BoxError> {
    let s = e.site();
    let t = s.terminal().ok_or_else(|| Error::Site("the site has no terminal object".into()))?;
    let covs = s.coverings(t);
    let c = match index {
        Some(k) => covs.get(k).ok_or_else(|| format!("covering {k} out of range ({} declared)", covs.len()))?,
        None => covs
            .iter()
            .find(|c| !c.iter().all(|&m| s.is_identity(m)))
            .or(covs.first())
            .ok_or("the terminal object has no declared covering")?,
    };
    Ok(c.clone())
}

fn proj(cmd: ProjCmd) -> Result<ExitCode, BoxError> {
    let q = RingDesc::rationals();
    match cmd {
        ProjCmd::Build { r, out } => {
            let ps = ProjSite::new(r, &q)?;
            emit(&json::site_to_json(ps.site()), &out)?;
            Ok(ExitCode::SUCCESS)
        }
        ProjCmd::Twist { r, n, out } => {
            let ps = ProjSite::new(r, &q)?;
            emit(&json::bundle_to_json(&ps.twisted_bundle(n)?), &out)?;
            Ok(ExitCode::SUCCESS)
        }
        ProjCmd::VerifyOninf { n } => verdict(check_oninf(n, ChartRule::Largest)?, &format!("i_inf* O({n}) = O")),
        ProjCmd::VerifyOnfunc { r, n } => {
            let bc = base_change(r, &sample_base_change()?)?;
            verdict(check_onfunc(&bc, n)?, &format!("g* O({n}) = O({n}) on P^{r}"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
