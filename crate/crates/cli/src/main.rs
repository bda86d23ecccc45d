use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hecke_forge::json;
use hecke_forge::klpoly::{KlEngine, KlTable};
use hecke_forge::satake::{self, Satake};
use hecke_forge::verify::{self, Options, Suite};
use hecke_forge::{Coweight, Error, ExtAffineElt, RootDatum, WeylElt};

/// Exact computations in affine Hecke algebras.
#[derive(Parser, Debug)]
#[command(name = "hecke-forge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct DatumArgs {
    /// Cartan type: A1–A4, B2–B4, C2–C4, D3, D4 or G2.
    #[arg(long = "type", value_name = "TYPE")]
    cartan_type: String,
    /// `sc`, `ad`, or a JSON basis matrix of X_* in fundamental-coweight coordinates.
    #[arg(long, default_value = "sc")]
    lattice: String,
}

#[derive(clap::Args, Debug, Clone)]
struct Common {
    /// Directory holding KL caches; HECKE_FORGE_CACHE takes precedence.
    #[arg(long, value_name = "DIR")]
    cache: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Output::Json)]
    output: Output,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Satake,
    Macdonald,
    Character,
    Kl,
    Cprime,
    Gk,
    Zonal,
    Whittaker,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CacheOp {
    Stats,
    Clear,
    Path,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute one object and print it.
    Compute {
        #[arg(value_enum)]
        kind: Kind,
        #[command(flatten)]
        datum: DatumArgs,
        /// Coweight in X_* coordinates, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        /// Affine word such as "s1,s0,s2" (for gk: a finite word).
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run identity suites; exit 1 if any identity fails.
    Verify {
        /// Suite names, or `all`.
        #[arg(required_unless_present = "suite")]
        suites: Vec<String>,
        /// Same as the positional names; may be repeated or comma separated.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
        #[command(flatten)]
        datum: DatumArgs,
        /// Bound on ⟨2ρ, μ⟩ for the μ-grid (default 12, 10 for G2).
        #[arg(long)]
        max_height: Option<i64>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        jobs: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Inspect or remove the KL cache of one root datum.
    Cache {
        #[arg(value_enum)]
        op: CacheOp,
        #[command(flatten)]
        datum: DatumArgs,
        #[command(flatten)]
        common: Common,
    },
}

/// Exit status 1: an identity failed. Exit status 2: bad input.
enum Failure {
    Identity(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::IdentityViolation(_) | Error::NotDivisible | Error::Internal(_) => Failure::Identity(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Res<T> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Res<T> {
    Err(Failure::Usage(msg.into()))
}

fn build(args: &DatumArgs) -> Res<RootDatum> {
    Ok(RootDatum::build(&args.cartan_type, &args.lattice)?)
}

fn parse_mu(d: &RootDatum, mu: Option<&str>) -> Res<Coweight> {
    let Some(mu) = mu else { return usage("--mu is required") };
    let coords = mu
        .split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|_| Failure::Usage(format!("bad coordinate {c:?} in --mu"))))
        .collect::<Res<Vec<_>>>()?;
    Ok(d.coweight(&coords)?)
}

/// Generator names: `s0` is the affine reflection, `s1..sr` the finite ones,
/// and a bare `s` means `s1` in rank one. `e` or an empty word is the identity.
fn parse_word(d: &RootDatum, word: &str, allow_affine: bool) -> Res<Vec<usize>> {
    let word = word.trim();
    if word.is_empty() || word == "e" {
        return Ok(Vec::new());
    }
    word.split(',')
        .map(|g| {
            let g = g.trim();
            let idx = match g.strip_prefix('s') {
                Some("") if d.rank() == 1 => 1,
                Some(n) => n.parse::<usize>().map_err(|_| Failure::Usage(format!("bad generator {g:?}")))?,
                None => return usage(format!("bad generator {g:?}")),
            };
            if idx > d.rank() || (idx == 0 && !allow_affine) {
                return usage(format!("generator {g:?} out of range"));
            }
            Ok(idx)
        })
        .collect()
}

fn word_name(d: &RootDatum, x: &ExtAffineElt) -> String {
    let w = d.reduced_word(x);
    let mut name = w.letters.iter().map(|i| format!("s{i}")).collect::<Vec<_>>().join(",");
    if w.omega != d.ew_identity() {
        name.push_str(&format!(" ω{:?}", w.omega.t.coords()));
    }
    if name.is_empty() { "e".into() } else { name }
}

fn parse_elt(d: &RootDatum, word: Option<&str>, flag: &str) -> Res<ExtAffineElt> {
    let Some(word) = word else { return usage(format!("{flag} is required")) };
    Ok(d.from_affine_word(&parse_word(d, word, true)?)?)
}

fn parse_finite(d: &RootDatum, word: Option<&str>) -> Res<WeylElt> {
    let Some(word) = word else { return usage("--x is required") };
    Ok(d.weyl_from_word(&parse_word(d, word, false)?)?)
}

fn cache_dir(common: &Common) -> Option<PathBuf> {
    std::env::var_os("HECKE_FORGE_CACHE").map(PathBuf::from).or_else(|| common.cache.clone())
}

fn cache_file(dir: &Path, d: &RootDatum) -> PathBuf {
    let lattice: String = d.lattice().to_string().chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    dir.join(format!("kl-{}-{lattice}.jsonl", d.cartan_type()))
}

fn load_cache(common: &Common, d: &RootDatum) -> Res<(Option<PathBuf>, KlTable)> {
    let Some(dir) = cache_dir(common) else { return Ok((None, KlTable::new(d))) };
    let path = cache_file(&dir, d);
    let table = if path.exists() { KlTable::load(d, &path)? } else { KlTable::new(d) };
    Ok((Some(path), table))
}

fn save_cache(path: Option<PathBuf>, d: &RootDatum, table: &mut KlTable) -> Res<()> {
    if let Some(path) = path {
        if table.is_dirty() {
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(Error::from)?;
            }
            table.store(d, &path)?;
        }
    }
    Ok(())
}

fn header(d: &RootDatum, kind: &str) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("cartan_type".into(), json!(d.cartan_type().to_string()));
    m.insert("lattice".into(), json!(d.lattice().to_string()));
    m.insert("kind".into(), json!(kind));
    m
}

/// Returns the JSON payload and a one-line text rendering.
fn compute(kind: Kind, d: &RootDatum, mu: Option<&str>, x: Option<&str>, y: Option<&str>, common: &Common) -> Res<(Value, String)> {
    let mut out = header(d, &format!("{kind:?}").to_lowercase());
    let text;
    match kind {
        Kind::Satake | Kind::Macdonald | Kind::Character => {
            let mu = parse_mu(d, mu)?;
            let value = match kind {
                Kind::Satake => Satake::new(d).satake_of(&mu)?,
                Kind::Macdonald => satake::macdonald_closed_form(d, &mu)?,
                _ => satake::weyl_character(d, &mu)?,
            };
            text = value.to_string();
            out.insert("mu".into(), json::coweight(&mu));
            out.insert("value".into(), json::group_alg(&value));
        }
        Kind::Zonal => {
            let mu = parse_mu(d, mu)?;
            let value = Satake::new(d).zonal_spherical(&mu)?;
            text = value.to_string();
            out.insert("mu".into(), json::coweight(&mu));
            out.insert("value".into(), json::ratfun(&value));
        }
        Kind::Whittaker => {
            let mu = parse_mu(d, mu)?;
            let rep = Satake::new(d).casselman_shalika(&mu)?;
            if !rep.equal {
                return Err(Failure::Identity(format!("Casselman–Shalika identity fails at μ = {:?}", mu.coords())));
            }
            text = rep.lhs.to_string();
            out.insert("mu".into(), json::coweight(&mu));
            out.insert("value".into(), json::group_alg(&rep.lhs));
            out.insert("report".into(), rep.to_json());
        }
        Kind::Gk => {
            let w = parse_finite(d, x)?;
            let value = satake::gindikin_karpelevich(d, w);
            text = value.to_string();
            out.insert("w".into(), json::weyl(d, w));
            out.insert("value".into(), json::ratfun(&value));
        }
        Kind::Kl | Kind::Cprime => {
            let y_elt = parse_elt(d, y, "--y")?;
            let (path, mut table) = load_cache(common, d)?;
            let mut engine = KlEngine::new(d);
            engine.absorb(&table)?;
            out.insert("y".into(), json::elt(d, &y_elt));
            if kind == Kind::Kl {
                let x_elt = parse_elt(d, x, "--x")?;
                let p = engine.kl_polynomial(&x_elt, &y_elt)?;
                text = p.to_string();
                out.insert("x".into(), json::elt(d, &x_elt));
                out.insert("value".into(), json::poly(&p));
                out.insert("text".into(), json!(p.to_string()));
            } else {
                let c = engine.cprime(&y_elt)?;
                text = c
                    .terms()
                    .map(|(x, c)| format!("({c}) T[{}]", word_name(d, x)))
                    .collect::<Vec<_>>()
                    .join(" + ");
                out.insert("value".into(), json::hecke(d, &c));
            }
            table.merge(&engine.export())?;
            save_cache(path, d, &mut table)?;
        }
    }
    Ok((Value::Object(out), text))
}

fn parse_suites(names: &[String]) -> Res<Vec<Suite>> {
    let mut out = Vec::new();
    for n in names {
        if n == "all" {
            out.extend(Suite::ALL);
        } else {
            out.push(n.parse::<Suite>()?);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn run_verify(suites: &[String], d: &RootDatum, max_height: Option<i64>, jobs: u32, common: &Common) -> Res<(Value, String, bool)> {
    let suites = parse_suites(suites)?;
    let (path, mut table) = load_cache(common, d)?;
    let opts = Options { max_height, jobs: jobs as usize };
    let mut reports = Vec::new();
    let mut lines = Vec::new();
    let mut all = true;
    for s in suites {
        let rep = verify::run(s, d, &opts, &mut table)?;
        all &= rep.passed();
        for c in rep.tally.checks() {
            lines.push(format!("{} {:<13} {} ({} cases)", if c.passed() { "PASS" } else { "FAIL" }, s.name(), c.identity, c.cases));
        }
        reports.push(rep.to_json());
    }
    save_cache(path, d, &mut table)?;
    let mut out = header(d, "verify");
    out.insert("passed".into(), json!(all));
    out.insert("suites".into(), Value::Array(reports));
    Ok((Value::Object(out), lines.join("\n"), all))
}

fn run_cache(op: CacheOp, d: &RootDatum, common: &Common) -> Res<(Value, String)> {
    let Some(dir) = cache_dir(common) else { return usage("no cache directory: pass --cache or set HECKE_FORGE_CACHE") };
    let path = cache_file(&dir, d);
    let mut out = header(d, "cache");
    out.insert("path".into(), json!(path.display().to_string()));
    let text = match op {
        CacheOp::Path => path.display().to_string(),
        CacheOp::Stats => {
            let table = if path.exists() { KlTable::load(d, &path)? } else { KlTable::new(d) };
            out.insert("entries".into(), json!(table.len()));
            out.insert("columns".into(), json!(table.columns()));
            format!("{} entries in {} columns", table.len(), table.columns())
        }
        CacheOp::Clear => {
            let existed = path.exists();
            if existed {
                std::fs::remove_file(&path).map_err(Error::from)?;
            }
            out.insert("removed".into(), json!(existed));
            if existed { "removed" } else { "nothing to remove" }.to_string()
        }
    };
    Ok((Value::Object(out), text))
}

fn emit(output: Output, value: &Value, text: &str) {
    match output {
        Output::Json => println!("{}", serde_json::to_string_pretty(value).expect("serializable")),
        Output::Text => println!("{text}"),
    }
}

fn run(cli: Cli) -> Res<bool> {
    match cli.command {
        Command::Compute { kind, datum, mu, x, y, common } => {
            let d = build(&datum)?;
            let (v, t) = compute(kind, &d, mu.as_deref(), x.as_deref(), y.as_deref(), &common)?;
            emit(common.output, &v, &t);
            Ok(true)
        }
        Command::Verify { mut suites, suite, datum, max_height, jobs, common } => {
            suites.extend(suite);
            let d = build(&datum)?;
            let (v, t, ok) = run_verify(&suites, &d, max_height, jobs, &common)?;
            emit(common.output, &v, &t);
            Ok(ok)
        }
        Command::Cache { op, datum, common } => {
            let d = build(&datum)?;
            let (v, t) = run_cache(op, &d, &common)?;
            emit(common.output, &v, &t);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Identity(msg)) => {
            eprintln!("error: identity violation: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
