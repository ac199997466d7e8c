//! The `bertini` command line.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::bounds::{
    bound_general, bound_simple, bound_thm_b, corollary_pipeline, ehr_constraint, BoundQuery, BoundReport, PointMode,
    SolveOptions, ZetaSpec,
};
use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::harness::{
    run_fraction, sample_ci, verify_bk, verify_lemma_suite, ExperimentPlan, Mode, Suite, SuiteParams,
};
use crate::polyring::{FormTuple, HomogeneousForm};
use crate::rigor::{default_bits, Enclosure, MAX_BITS};
use crate::scheme::{census, section_decide, section_decide_groebner, EmbeddedScheme, SectionEngine};
use crate::zeta::{
    euler_product_enclosure, ln_euler_product_enclosure, ln_zeta_enclosure, WeilModel, ZetaQuery, ZetaSource,
    DEFAULT_E_CUTOFF,
};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_UNSAT: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "bertini", version, about = "Certified degree bounds and smooth-section experiments over finite fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Re-run the command recorded in a JSON report and check the result matches.
    #[arg(long, global = true)]
    pub replay: Option<PathBuf>,

    /// Worker threads for experiments.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Working precision in bits (default from BERTINI_PRECISION_BITS, else 64).
    #[arg(long, global = true)]
    pub bits: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Least certified degree for a degree condition.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Genus bound B_{n,q} for curves with E^n in their Jacobian.
    Corollary {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Enclosure of ζ_X(s).
    Zeta(ZetaArgs),
    /// Enclosure of the Euler product for k smooth sections.
    Euler {
        #[command(flatten)]
        source: ZetaArgs,
        #[arg(long)]
        k: u32,
    },
    /// Smooth-section fractions over finite fields.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Run a verifier suite.
    Verify(VerifyArgs),
    /// Check g - sqrt(log log g / (6 log q)) >= n.
    Ehr {
        #[arg(long)]
        n: BigUint,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        g: BigUint,
    },
    /// Point and closed-point counts of X over F_{q^e}.
    Census {
        #[command(flatten)]
        x: SchemeArgs,
        #[arg(long, default_value_t = 6)]
        e_max: u32,
    },
    /// Classify one tuple of forms on X.
    Decide {
        #[command(flatten)]
        x: SchemeArgs,
        /// Forms separated by ';'.
        #[arg(long)]
        forms: String,
        #[arg(long, value_enum, default_value_t = EngineName::Groebner)]
        engine: EngineName,
        #[arg(long, default_value_t = 8)]
        e_max: u32,
        /// Include the Gröbner basis of the singular-locus ideal.
        #[arg(long)]
        dump_gb: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum BoundCmd {
    /// k sections with smooth intersection of dimension n - k.
    ThmB(BoundArgs),
    /// A smooth curve on X, with its Castelnuovo genus bound.
    General(BoundArgs),
    /// A curve on a simple abelian variety.
    Simple {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        deg: BigUint,
        #[command(flatten)]
        solve: SolveArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct BoundArgs {
    #[arg(long)]
    pub q: u64,
    /// Ambient dimension.
    #[arg(long)]
    pub r: u32,
    /// Dimension of X.
    #[arg(long)]
    pub n: u32,
    /// Number of sections (default n - 1).
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, default_value = "1")]
    pub deg: BigUint,
    /// Weil model for ζ_X, e.g. `pn:2` or `segre-power:elliptic:a=0^2`.
    #[arg(long, conflicts_with_all = ["zeta_value", "en_upper"])]
    pub model: Option<String>,
    /// A real number to use as ζ_X(n + 1/2).
    #[arg(long, conflicts_with = "en_upper")]
    pub zeta_value: Option<String>,
    /// Use the uniform bound for ζ_{E^n}(n + 1/2).
    #[arg(long)]
    pub en_upper: bool,
    #[arg(long, default_value_t = DEFAULT_E_CUTOFF)]
    pub e_cutoff: u32,
    /// #X(F_2): an integer, `pr` or `weil-av`.
    #[arg(long, default_value = "pr")]
    pub points: String,
    #[command(flatten)]
    pub solve: SolveArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    /// Give up beyond d = 2^this.
    #[arg(long, default_value_t = 65536)]
    pub d_max_bits: u32,
    #[arg(long, default_value_t = 10_000)]
    pub linear_limit: u64,
    #[arg(long)]
    pub d_min: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct SchemeArgs {
    /// `pn:<r>` or `ci:<r>;<form>;...`.
    #[arg(long)]
    pub x: String,
    /// Field order, `p^m`, or `p^m:<modulus>`.
    #[arg(long)]
    pub gf: String,
}

#[derive(Args, Debug, Clone)]
pub struct ZetaArgs {
    /// Weil model, e.g. `pn:2@gf:3`.
    #[arg(long, conflicts_with = "x")]
    pub model: Option<String>,
    /// Scheme given by equations; counted by a census.
    #[arg(long, requires = "gf")]
    pub x: Option<String>,
    #[arg(long)]
    pub gf: Option<String>,
    /// Census depth for `--x`.
    #[arg(long, default_value_t = 6)]
    pub census_e_max: u32,
    /// Evaluation point (default dim + 1/2).
    #[arg(long)]
    pub s: Option<String>,
    #[arg(long, default_value_t = DEFAULT_E_CUTOFF)]
    pub e_cutoff: u32,
}

#[derive(Subcommand, Debug)]
pub enum ExperimentCmd {
    /// Fraction of tuples cutting X smoothly in the expected dimension.
    Fraction(ExperimentArgs),
    /// Certify the error-term inequality against an exhaustive fraction.
    VerifyBk {
        #[command(flatten)]
        plan: ExperimentArgs,
        #[arg(long, default_value_t = DEFAULT_E_CUTOFF)]
        e_cutoff: u32,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ExperimentArgs {
    /// Plan file of key=value lines; flags given here are ignored.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub gf: Option<String>,
    /// Uniform degrees to sweep, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<u32>,
    /// Number of forms for each uniform degree.
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// An explicit non-decreasing degree tuple instead of `--d`.
    #[arg(long, value_delimiter = ',', conflicts_with = "d")]
    pub degrees: Vec<u32>,
    #[arg(long, value_enum, default_value_t = ModeName::Exhaustive)]
    pub mode: ModeName,
    #[arg(long)]
    pub count: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = EngineName::Groebner)]
    pub engine: EngineName,
    #[arg(long, default_value_t = 8)]
    pub e_max: u32,
    #[arg(long, default_value_t = 64)]
    pub partitions: u64,
    /// Significance level of the sampled confidence interval.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeName {
    Exhaustive,
    Sample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineName {
    Groebner,
    Pointscan,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// lemma33, lemma34, prop32 or lemma52.
    pub suite: String,
    /// Required by the randomized lemma33 suite.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 10_000)]
    pub sequences: u64,
    #[arg(long, default_value_t = 9)]
    pub qmax: u64,
    #[arg(long, default_value_t = 6)]
    pub nmax: u32,
    #[arg(long, default_value_t = 6)]
    pub tmax: u32,
    #[arg(long, default_value_t = DEFAULT_E_CUTOFF)]
    pub e_cutoff: u32,
    #[arg(long, default_value_t = 256)]
    pub max_bits: u32,
    #[arg(long, default_value_t = 10)]
    pub hf_max: u32,
}

/// One output cell; enclosures keep full precision in csv and are
/// rounded to 12 digits in tables.
#[derive(Clone, Debug)]
pub enum Cell {
    Text(String),
    Enc(Enclosure),
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<Enclosure> for Cell {
    fn from(e: Enclosure) -> Self {
        Cell::Enc(e)
    }
}

type Row = Vec<(String, Cell)>;

fn row<I, K, C>(items: I) -> Row
where
    I: IntoIterator<Item = (K, C)>,
    K: Into<String>,
    C: Into<Cell>,
{
    items.into_iter().map(|(k, c)| (k.into(), c.into())).collect()
}

/// A finished command: JSON body plus flat rows for csv and tables.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub argv: Vec<String>,
    pub params: Value,
    pub result: Value,
    pub rows: Vec<Row>,
    /// Exit status of a completed run (nonzero for failed verifications).
    pub status: i32,
}

impl Report {
    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "argv": self.argv,
            "params": self.params,
            "result": self.result,
        })
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json");
                s.push('\n');
                s
            }
            Format::Csv => self.csv(),
            Format::Table => self.table(),
        }
    }

    fn csv(&self) -> String {
        let mut header = Vec::new();
        for r in &self.rows {
            for (k, c) in r {
                let names = match c {
                    Cell::Text(_) => vec![k.clone()],
                    Cell::Enc(_) => vec![format!("{k}_lo"), format!("{k}_hi")],
                };
                for n in names {
                    if !header.contains(&n) {
                        header.push(n);
                    }
                }
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header).expect("in-memory csv");
        for r in &self.rows {
            let mut m = BTreeMap::new();
            for (k, c) in r {
                match c {
                    Cell::Text(s) => {
                        m.insert(k.clone(), s.clone());
                    }
                    Cell::Enc(e) => {
                        let d = e.serial_digits();
                        m.insert(format!("{k}_lo"), e.lo_string(d));
                        m.insert(format!("{k}_hi"), e.hi_string(d));
                    }
                }
            }
            w.write_record(header.iter().map(|h| m.get(h).map_or("", String::as_str)))
                .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
    }

    fn table(&self) -> String {
        let mut out = format!("{}\n", self.command);
        for (i, r) in self.rows.iter().enumerate() {
            if self.rows.len() > 1 {
                out.push_str(&format!("-- {}\n", i + 1));
            }
            let width = r.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, c) in r {
                let v = match c {
                    Cell::Text(s) => s.clone(),
                    Cell::Enc(e) => e.to_string(),
                };
                out.push_str(&format!("  {k:<width$}  {v}\n"));
            }
        }
        out
    }
}

/// Failure of a run, with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnsatWithinCap(_) => EXIT_UNSAT,
            Error::Parse(_) => EXIT_USAGE,
            Error::Domain(_) | Error::Capacity(_) | Error::Divergence(_) => EXIT_DOMAIN,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: msg.into() }
}

/// Canonical argument list, rebuilt from resolved values.
#[derive(Default)]
struct Argv(Vec<String>);

impl Argv {
    fn new(words: &[&str]) -> Self {
        Argv(words.iter().map(|s| s.to_string()).collect())
    }

    fn opt(&mut self, name: &str, v: impl ToString) -> &mut Self {
        self.0.push(format!("--{name}"));
        self.0.push(v.to_string());
        self
    }

    fn flag(&mut self, name: &str, on: bool) -> &mut Self {
        if on {
            self.0.push(format!("--{name}"));
        }
        self
    }

    fn solve(&mut self, s: &SolveArgs) -> &mut Self {
        self.opt("d-max-bits", s.d_max_bits).opt("linear-limit", s.linear_limit);
        if let Some(d) = s.d_min {
            self.opt("d-min", d);
        }
        self
    }
}

struct Ctx {
    bits: u32,
}

/// Parse `argv` (without the program name handling) and run it.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            return if code == 0 { (0, e.to_string(), String::new()) } else { (code, String::new(), e.to_string()) };
        }
    };
    match dispatch(&cli) {
        Ok((report, warn)) => {
            let text = report.emit(cli.format);
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    return (1, String::new(), format!("cannot write {}: {e}\n", path.display()));
                }
                return (report.status, String::new(), warn);
            }
            (report.status, text, warn)
        }
        Err(f) => (f.code, String::new(), format!("error: {}\n", f.message)),
    }
}

/// Entry point for the binary.
pub fn main_with_args() -> i32 {
    let (code, out, err) = run(std::env::args_os());
    print!("{out}");
    eprint!("{err}");
    let _ = std::io::stdout().flush();
    code
}

fn dispatch(cli: &Cli) -> std::result::Result<(Report, String), Failure> {
    if let Some(n) = cli.jobs {
        // A second initialisation in the same process is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    if let Some(path) = &cli.replay {
        return replay(path);
    }
    let command = cli.command.as_ref().ok_or_else(|| usage("no command given; see --help"))?;
    let bits = cli.bits.unwrap_or_else(default_bits);
    if !(16..=MAX_BITS).contains(&bits) {
        return Err(usage(format!("--bits must lie in 16..={MAX_BITS}")));
    }
    Ok((execute(command, &Ctx { bits })?, String::new()))
}

fn replay(path: &PathBuf) -> std::result::Result<(Report, String), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let stored: Value = serde_json::from_str(&text).map_err(|e| usage(format!("not a JSON report: {e}")))?;
    if stored["schema"] != json!(SCHEMA_VERSION) {
        return Err(usage("unsupported report schema"));
    }
    let argv: Vec<String> = stored["argv"]
        .as_array()
        .and_then(|a| a.iter().map(|v| v.as_str().map(String::from)).collect())
        .ok_or_else(|| usage("report has no argv"))?;
    let inner = Cli::try_parse_from(std::iter::once("bertini".to_string()).chain(argv))
        .map_err(|e| usage(format!("recorded argv does not parse: {e}")))?;
    let command = inner.command.as_ref().ok_or_else(|| usage("report has no command"))?;
    let bits = inner.bits.ok_or_else(|| usage("report does not record its precision"))?;
    let mut report = execute(command, &Ctx { bits })?;
    let mut warn = String::new();
    if report.to_json() != stored {
        warn = "replay: the recomputed report differs from the stored one\n".into();
        report.status = 1;
    }
    Ok((report, warn))
}

fn execute(command: &Command, ctx: &Ctx) -> std::result::Result<Report, Failure> {
    let mut report = match command {
        Command::Bound(b) => bound(b, ctx)?,
        Command::Corollary { n, q, solve } => {
            let rep = corollary_pipeline(*n, *q, &solve_options(solve, ctx))?;
            let mut argv = Argv::new(&["corollary"]);
            argv.opt("n", n).opt("q", q).solve(solve);
            bound_report("corollary", argv, json!({ "n": n, "q": q }), &rep)
        }
        Command::Zeta(z) => zeta(z, None, ctx)?,
        Command::Euler { source, k } => zeta(source, Some(*k), ctx)?,
        Command::Experiment(e) => experiment(e, ctx)?,
        Command::Verify(v) => verify(v, ctx)?,
        Command::Ehr { n, q, g } => {
            let v = ehr_constraint(n, *q, g, ctx.bits)?;
            let mut argv = Argv::new(&["ehr"]);
            argv.opt("n", n).opt("q", q).opt("g", g);
            Report {
                command: "ehr".into(),
                argv: argv.0,
                params: json!({ "n": n.to_string(), "q": q, "g": g.to_string() }),
                result: json!({ "verdict": v }),
                rows: vec![row([("verdict", format!("{v:?}").to_lowercase())])],
                status: 0,
            }
        }
        Command::Census { x, e_max } => {
            let (scheme, field) = parse_scheme(&x.x, &x.gf)?;
            let c = census(&scheme, *e_max)?;
            let mut argv = Argv::new(&["census"]);
            argv.opt("x", &x.x).opt("gf", field.name()).opt("e-max", e_max);
            let rows = (0..c.n.len())
                .map(|i| row([("e", (i + 1).to_string()), ("points", c.n[i].to_string()), ("closed", c.a[i].to_string())]))
                .collect();
            Report {
                command: "census".into(),
                argv: argv.0,
                params: json!({ "x": scheme.to_string(), "gf": field.name(), "e_max": e_max }),
                result: json!({ "points": c.n, "closed_points": c.a, "dim": c.dim, "degree": c.degree }),
                rows,
                status: 0,
            }
        }
        Command::Decide { x, forms, engine, e_max, dump_gb } => decide(x, forms, *engine, *e_max, *dump_gb)?,
    };
    report.argv.push("--bits".into());
    report.argv.push(ctx.bits.to_string());
    if let Value::Object(m) = &mut report.params {
        m.insert("bits".into(), json!(ctx.bits));
    }
    Ok(report)
}

fn solve_options(s: &SolveArgs, ctx: &Ctx) -> SolveOptions {
    SolveOptions {
        start_bits: ctx.bits,
        d_max: BigUint::from(1u32) << s.d_max_bits,
        linear_limit: s.linear_limit,
        d_min: s.d_min,
        ..SolveOptions::default()
    }
}

fn parse_points(s: &str) -> Result<PointMode> {
    match s {
        "pr" => Ok(PointMode::PrBound),
        "weil-av" => Ok(PointMode::WeilAvBound),
        v => v
            .parse::<u64>()
            .map(PointMode::Exact)
            .map_err(|_| Error::parse(format!("--points takes an integer, 'pr' or 'weil-av', not '{v}'"))),
    }
}

fn bound(cmd: &BoundCmd, ctx: &Ctx) -> std::result::Result<Report, Failure> {
    match cmd {
        BoundCmd::Simple { q, n, deg, solve } => {
            let query = BoundQuery::new(*q, *n, *n, deg.clone())?;
            let rep = bound_simple(&query, &solve_options(solve, ctx))?;
            let mut argv = Argv::new(&["bound", "simple"]);
            argv.opt("q", q).opt("n", n).opt("deg", deg).solve(solve);
            Ok(bound_report("bound simple", argv, json!({ "q": q, "n": n, "deg": deg.to_string() }), &rep))
        }
        BoundCmd::ThmB(a) | BoundCmd::General(a) => {
            let general = matches!(cmd, BoundCmd::General(_));
            let mut query = BoundQuery::new(a.q, a.r, a.n, a.deg.clone())?.with_points(parse_points(&a.points)?);
            if let Some(k) = a.k {
                query = query.with_k(k)?;
            }
            let mut argv = Argv::new(&["bound", if general { "general" } else { "thm-b" }]);
            argv.opt("q", a.q).opt("r", a.r).opt("n", a.n).opt("deg", &a.deg).opt("points", &a.points);
            if let Some(k) = a.k {
                argv.opt("k", k);
            }
            if let Some(m) = &a.model {
                let model = WeilModel::parse(m, Some(a.q))?;
                if model.q() != a.q || model.dim() != a.n {
                    return Err(Error::domain("the model must have dimension n over F_q").into());
                }
                query = query.with_zeta(ZetaSpec::Model { model: model.clone(), e_cutoff: a.e_cutoff });
                argv.opt("model", model).opt("e-cutoff", a.e_cutoff);
            } else if let Some(v) = &a.zeta_value {
                query = query.with_zeta(ZetaSpec::Value(Enclosure::parse(v, ctx.bits.max(64))?));
                argv.opt("zeta-value", v);
            } else if a.en_upper {
                query = query.with_zeta(ZetaSpec::EnUpper { n: a.n, q: a.q });
                argv.flag("en-upper", true);
            }
            argv.solve(&a.solve);
            let opts = solve_options(&a.solve, ctx);
            let (name, rep) = if general {
                ("bound general", bound_general(&query, &opts)?)
            } else {
                ("bound thm-b", bound_thm_b(&query, &opts)?)
            };
            Ok(bound_report(name, argv, query.to_json(), &rep))
        }
    }
}

fn bound_report(command: &str, argv: Argv, params: Value, rep: &BoundReport) -> Report {
    let mut r: Row = Vec::new();
    let text = |v: &Value| match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    let j = rep.to_json();
    for key in ["minimal_d", "curve_degree", "genus_bound", "jacobian_dim_bound", "sharper_genus_bound", "precision_bits"] {
        if !j[key].is_null() {
            r.push((key.into(), Cell::Text(text(&j[key]))));
        }
    }
    if let Some(c) = &rep.certificate {
        r.push(("lhs_log2".into(), Cell::Enc(c.lhs_log2.clone())));
        r.push(("rhs_log2".into(), Cell::Enc(c.rhs_log2.clone())));
    }
    if let Some(a) = &rep.alternate {
        r.push(("alternate_d".into(), Cell::Text(a.d.to_string())));
    }
    Report { command: command.into(), argv: argv.0, params, result: j, rows: vec![r], status: 0 }
}

fn parse_scheme(x: &str, gf: &str) -> Result<(EmbeddedScheme, FieldSpec)> {
    let field = FieldSpec::parse(gf)?;
    Ok((EmbeddedScheme::parse(x, &field)?, field))
}

fn zeta(z: &ZetaArgs, k: Option<u32>, ctx: &Ctx) -> std::result::Result<Report, Failure> {
    let mut argv = Argv::new(&[if k.is_some() { "euler" } else { "zeta" }]);
    let (source, desc) = match (&z.model, &z.x) {
        (Some(m), None) => {
            let model = WeilModel::parse(m, None)?;
            argv.opt("model", &model);
            (ZetaSource::Model(model.clone()), model.to_string())
        }
        (None, Some(x)) => {
            let (scheme, field) = parse_scheme(x, z.gf.as_deref().unwrap_or_default())?;
            argv.opt("x", x).opt("gf", field.name()).opt("census-e-max", z.census_e_max);
            (ZetaSource::Census(census(&scheme, z.census_e_max)?), format!("{scheme} over {}", field.name()))
        }
        _ => return Err(usage("give exactly one of --model or --x")),
    };
    argv.opt("e-cutoff", z.e_cutoff);
    if let Some(k) = k {
        argv.opt("k", k);
        let n = source.dim();
        let ln = ln_euler_product_enclosure(&source, n, k, z.e_cutoff, ctx.bits)?;
        let v = euler_product_enclosure(&source, n, k, z.e_cutoff, ctx.bits)?;
        return Ok(Report {
            command: "euler".into(),
            argv: argv.0,
            params: json!({ "source": desc, "n": n, "k": k, "e_cutoff": z.e_cutoff }),
            result: json!({ "euler_product": v.to_json(), "ln_euler_product": ln.to_json() }),
            rows: vec![row([("euler_product", v), ("ln_euler_product", ln)])],
            status: 0,
        });
    }
    let mut query = ZetaQuery::half_past(source);
    if let Some(s) = &z.s {
        query.s = BigRational::from_str(s).map_err(|_| Error::parse(format!("bad rational s '{s}'")))?;
        argv.opt("s", &query.s);
    }
    query.e_cutoff = z.e_cutoff;
    let ln = ln_zeta_enclosure(&query, ctx.bits)?;
    let v = ln.exp().with_bits(ctx.bits);
    Ok(Report {
        command: "zeta".into(),
        argv: argv.0,
        params: json!({ "source": desc, "s": query.s.to_string(), "e_cutoff": z.e_cutoff }),
        result: json!({ "zeta": v.to_json(), "ln_zeta": ln.to_json() }),
        rows: vec![row([("zeta", v), ("ln_zeta", ln)])],
        status: 0,
    })
}

fn engine_of(name: EngineName, e_max: u32) -> SectionEngine {
    match name {
        EngineName::Groebner => SectionEngine::Groebner,
        EngineName::Pointscan => SectionEngine::PointScan { e_max },
    }
}

/// Resolve flags (or a config file) into one plan per swept degree tuple.
fn plans(a: &ExperimentArgs) -> Result<Vec<ExperimentPlan>> {
    if let Some(path) = &a.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::parse(format!("cannot read {}: {e}", path.display())))?;
        return Ok(vec![ExperimentPlan::from_config(&text)?]);
    }
    let x = a.x.as_deref().ok_or_else(|| Error::parse("--x is required without --config"))?;
    let gf = a.gf.as_deref().ok_or_else(|| Error::parse("--gf is required without --config"))?;
    let (scheme, _) = parse_scheme(x, gf)?;
    let mode = match a.mode {
        ModeName::Exhaustive => Mode::Exhaustive,
        ModeName::Sample => Mode::Sample {
            count: a.count.ok_or_else(|| Error::parse("--mode sample needs --count"))?,
            seed: a.seed.ok_or_else(|| Error::parse("--mode sample needs an explicit --seed"))?,
        },
    };
    let tuples: Vec<Vec<u32>> = if !a.degrees.is_empty() {
        vec![a.degrees.clone()]
    } else if !a.d.is_empty() {
        a.d.iter().map(|&d| vec![d; a.k as usize]).collect()
    } else {
        return Err(Error::parse("give --d or --degrees"));
    };
    tuples
        .into_iter()
        .map(|t| Ok(ExperimentPlan::new(scheme.clone(), t, mode, engine_of(a.engine, a.e_max))?.with_partitions(a.partitions)))
        .collect()
}

fn plan_argv(argv: &mut Argv, p: &ExperimentPlan) {
    let j = p.to_json();
    argv.opt("x", j["x"].as_str().unwrap()).opt("gf", j["gf"].as_str().unwrap());
    let degrees: Vec<String> = p.degrees.iter().map(u32::to_string).collect();
    argv.opt("degrees", degrees.join(","));
    match p.mode {
        Mode::Exhaustive => argv.opt("mode", "exhaustive"),
        Mode::Sample { count, seed } => argv.opt("mode", "sample").opt("count", count).opt("seed", seed),
    };
    match p.engine {
        SectionEngine::Groebner => argv.opt("engine", "groebner"),
        SectionEngine::PointScan { e_max } => argv.opt("engine", "pointscan").opt("e-max", e_max),
    };
    argv.opt("partitions", p.partitions);
}

fn experiment(cmd: &ExperimentCmd, ctx: &Ctx) -> std::result::Result<Report, Failure> {
    let (a, e_cutoff) = match cmd {
        ExperimentCmd::Fraction(a) => (a, None),
        ExperimentCmd::VerifyBk { plan, e_cutoff } => (plan, Some(*e_cutoff)),
    };
    let plans = plans(a)?;
    let sub = if e_cutoff.is_some() { "verify-bk" } else { "fraction" };
    let mut argv = Argv::new(&["experiment", sub]);
    plan_argv(&mut argv, &plans[0]);
    // A sweep over uniform degrees is recorded as --d/--k.
    if a.config.is_none() && a.degrees.is_empty() {
        let pos = argv.0.iter().position(|w| w == "--degrees").unwrap();
        let d: Vec<String> = a.d.iter().map(u32::to_string).collect();
        argv.0[pos] = "--d".into();
        argv.0[pos + 1] = d.join(",");
        argv.opt("k", a.k);
    }
    if plans[0].mode != Mode::Exhaustive {
        argv.opt("alpha", a.alpha);
    }
    let mut results = Vec::new();
    let mut rows = Vec::new();
    let mut status = 0;
    for p in &plans {
        let degrees: Vec<String> = p.degrees.iter().map(u32::to_string).collect();
        let mut r: Row = row([("degrees", degrees.join(","))]);
        let body = if let Some(ec) = e_cutoff {
            let rep = verify_bk(p, ec, ctx.bits)?;
            if rep.verdict != crate::rigor::Verdict::Holds {
                status = 1;
            }
            fraction_row(&mut r, &rep.result);
            r.push(("euler_product".into(), Cell::Enc(rep.euler_product.clone())));
            r.push(("error_bound".into(), Cell::Enc(rep.error_bound.clone())));
            r.push(("margin".into(), Cell::Enc(rep.margin.clone())));
            r.push(("verdict".into(), Cell::Text(format!("{:?}", rep.verdict).to_lowercase())));
            rep.to_json()
        } else {
            let res = run_fraction(p)?;
            fraction_row(&mut r, &res);
            let mut j = res.to_json();
            if !res.exhaustive {
                let (lo, hi) = sample_ci(&res, a.alpha)?;
                j["ci"] = json!({ "alpha": a.alpha, "lo": lo, "hi": hi });
                r.push(("ci_lo".into(), Cell::Text(format!("{lo:.12}"))));
                r.push(("ci_hi".into(), Cell::Text(format!("{hi:.12}"))));
            }
            j
        };
        results.push(json!({ "degrees": p.degrees, "result": body }));
        rows.push(r);
    }
    if let Some(ec) = e_cutoff {
        argv.opt("e-cutoff", ec);
    }
    let mut params = plans[0].to_json();
    params["d"] = json!(plans.iter().map(|p| p.degrees.clone()).collect::<Vec<_>>());
    if let Some(ec) = e_cutoff {
        params["e_cutoff"] = json!(ec);
    }
    Ok(Report {
        command: format!("experiment {sub}"),
        argv: argv.0,
        params,
        result: json!({ "runs": results }),
        rows,
        status,
    })
}

fn fraction_row(r: &mut Row, res: &crate::harness::ExperimentResult) {
    r.push(("total".into(), Cell::Text(res.total.to_string())));
    for v in crate::scheme::SectionVerdict::ALL {
        r.push((v.as_str().into(), Cell::Text(res.counts.get(v).to_string())));
    }
    r.push(("fraction".into(), Cell::Text(res.fraction.to_string())));
    r.push(("exact".into(), Cell::Text(res.exact.to_string())));
}

fn verify(v: &VerifyArgs, ctx: &Ctx) -> std::result::Result<Report, Failure> {
    let suite: Suite = v.suite.parse()?;
    let mut params = SuiteParams {
        sequences: v.sequences,
        qmax: v.qmax,
        nmax: v.nmax,
        tmax: v.tmax,
        e_cutoff: v.e_cutoff,
        bits: ctx.bits.max(64),
        max_bits: v.max_bits.max(ctx.bits),
        hf_max: v.hf_max,
        ..SuiteParams::default()
    };
    let mut argv = Argv::new(&["verify", suite.as_str()]);
    let mut pj = json!({ "suite": suite.as_str() });
    match suite {
        Suite::Lemma33 => {
            params.seed = v.seed.ok_or_else(|| usage("lemma33 draws random sequences; pass --seed"))?;
            argv.opt("seed", params.seed).opt("sequences", v.sequences);
            pj["seed"] = json!(params.seed);
            pj["sequences"] = json!(v.sequences);
        }
        Suite::Lemma34 => {
            argv.opt("qmax", v.qmax).opt("nmax", v.nmax).opt("tmax", v.tmax).opt("max-bits", params.max_bits);
            pj["qmax"] = json!(v.qmax);
            pj["nmax"] = json!(v.nmax);
            pj["tmax"] = json!(v.tmax);
            pj["max_bits"] = json!(params.max_bits);
        }
        Suite::Prop32 => {
            argv.opt("e-cutoff", v.e_cutoff).opt("max-bits", params.max_bits);
            pj["e_cutoff"] = json!(v.e_cutoff);
            pj["max_bits"] = json!(params.max_bits);
        }
        Suite::Lemma52 => {
            argv.opt("hf-max", v.hf_max);
            pj["hf_max"] = json!(v.hf_max);
            pj["curves"] = json!(params.curves.iter().map(|c| c.name.clone()).collect::<Vec<_>>());
        }
    }
    let rep = verify_lemma_suite(suite, &params)?;
    let r = row([
        ("suite", suite.as_str().to_string()),
        ("passed", rep.passed().to_string()),
        ("cases", rep.cases.to_string()),
        ("inconclusive", rep.inconclusive.len().to_string()),
        ("max_bits_used", rep.max_bits_used.to_string()),
    ]);
    Ok(Report {
        command: format!("verify {}", suite.as_str()),
        argv: argv.0,
        params: pj,
        result: rep.to_json(),
        rows: vec![r],
        status: if rep.passed() { 0 } else { 1 },
    })
}

fn decide(
    x: &SchemeArgs,
    forms: &str,
    engine: EngineName,
    e_max: u32,
    dump_gb: bool,
) -> std::result::Result<Report, Failure> {
    let (scheme, field) = parse_scheme(&x.x, &x.gf)?;
    let fs = forms
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| HomogeneousForm::parse(&field, scheme.nvars(), s))
        .collect::<Result<Vec<_>>>()?;
    let tuple = FormTuple::new(fs)?;
    let mut argv = Argv::new(&["decide"]);
    argv.opt("x", &x.x).opt("gf", field.name()).opt("forms", forms);
    let eng = engine_of(engine, e_max);
    let (verdict, gb) = match eng {
        SectionEngine::Groebner => {
            argv.opt("engine", "groebner");
            section_decide_groebner(&scheme, &tuple)?
        }
        SectionEngine::PointScan { .. } => {
            argv.opt("engine", "pointscan").opt("e-max", e_max);
            (section_decide(&scheme, &tuple, eng)?, None)
        }
    };
    argv.flag("dump-gb", dump_gb);
    let mut result = json!({ "verdict": verdict.as_str() });
    if dump_gb {
        result["groebner_basis"] = json!(gb.map(|g| g.elements().iter().map(|f| f.to_string()).collect::<Vec<_>>()));
    }
    let forms_out: Vec<String> = tuple.forms().iter().map(|f| f.to_string()).collect();
    Ok(Report {
        command: "decide".into(),
        argv: argv.0,
        params: json!({ "x": scheme.to_string(), "gf": field.name(), "forms": forms_out }),
        result,
        rows: vec![row([("verdict", verdict.as_str())])],
        status: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> (i32, String, String) {
        run(std::iter::once("bertini").chain(args.iter().copied()))
    }

    #[test]
    fn simple_bound_json() {
        let (code, out, _) = go(&["bound", "simple", "--q", "2", "--n", "2", "--deg", "18", "--bits", "64"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["result"]["minimal_d"], "2");
        assert_eq!(v["result"]["curve_degree"], "36");
        assert_eq!(v["result"]["genus_bound"], "1332");
        assert_eq!(v["result"]["sharper_genus_bound"], "1330");
        let again = go(&["bound", "simple", "--q", "2", "--n", "2", "--deg", "18", "--bits", "64"]).1;
        assert_eq!(out, again);
    }

    #[test]
    fn fraction_and_sweep_csv() {
        let (code, out, _) = go(&["experiment", "fraction", "--x", "pn:2", "--gf", "2", "--d", "1", "--k", "1", "--mode", "exhaustive"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["result"]["runs"][0]["result"]["fraction"], "7/8");
        let (_, csv, _) = go(&["experiment", "fraction", "--x", "pn:2", "--gf", "2", "--d", "1,2", "--format", "csv"]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("degrees,total"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(go(&["bound", "simple", "--q", "2", "--n", "2", "--deg", "18", "--bogus"]).0, EXIT_USAGE);
        assert_eq!(go(&["bound", "simple", "--q", "6", "--n", "2", "--deg", "18"]).0, EXIT_DOMAIN);
        assert_eq!(go(&["experiment", "fraction", "--x", "pn:2", "--gf", "2", "--d", "2", "--mode", "sample", "--count", "5"]).0, EXIT_USAGE);
        assert_eq!(go(&["verify", "lemma33"]).0, EXIT_USAGE);
        let unsat = go(&["bound", "general", "--q", "3", "--r", "2", "--n", "2", "--model", "pn:2", "--d-max-bits", "4", "--linear-limit", "4"]);
        assert_eq!(unsat.0, EXIT_UNSAT, "{}", unsat.2);
    }

    #[test]
    fn table_digits() {
        let (_, out, _) = go(&["zeta", "--model", "pn:2@gf:2", "--format", "table", "--bits", "128"]);
        let line = out.lines().find(|l| l.trim_start().starts_with("zeta ")).unwrap();
        let lo = line.split('[').nth(1).unwrap().split(',').next().unwrap();
        assert_eq!(lo.chars().filter(|c| c.is_ascii_digit()).count(), 12, "{line}");
    }

    #[test]
    fn replay_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let p = path.to_str().unwrap();
        let (code, out, _) = go(&["verify", "lemma52", "--out", p]);
        assert_eq!((code, out.as_str()), (0, ""));
        let stored = std::fs::read_to_string(&path).unwrap();
        let (code, again, err) = go(&["--replay", p]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(again, stored);
    }
}
