use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;
use tropical_core::oracle::{brute_force_lambda, enumerate_small_capped, DEFAULT_ORACLE_CAP};
use tropical_core::{
    critical_structure, csr_build, csr_product, default_threshold_horizon, evaluate, fast_terms,
    is_orbit_periodic, kleene_star, max_cycle_mean_of, nachtigall_expand, orbit_conditions,
    orbit_growth_rate, simulate_orbit, ultimate_expand, ultimate_threshold, CriticalSelection,
    Expansion, ExpansionKind, Threshold, TropicalMatrix,
};

use crate::input::{parse_matrix, parse_vector, Format, ParseError, Semiring};
use crate::report::{indices, number, object, Writer};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "tropical",
    version,
    about = "Max-plus matrix powers, expansions and orbits"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input file format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Auto)]
    format: Format,
    /// Interpretation of the entries; max-times values are read and reported
    /// on the multiplicative scale.
    #[arg(long, global = true, value_enum, default_value_t = Semiring::Maxplus)]
    semiring: Semiring,
    /// Add wall-clock timings to the report.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Debug, Args)]
struct Input {
    /// Matrix file, or `-` for standard input.
    file: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Rule {
    Canonical,
    Cycle,
}

impl Rule {
    fn selection(self) -> CriticalSelection {
        match self {
            Rule::Canonical => CriticalSelection::Full,
            Rule::Cycle => CriticalSelection::SingleCycle,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// A^t.
    Power {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        t: u64,
    },
    /// Kleene star A*.
    Star {
        #[command(flatten)]
        input: Input,
    },
    /// Maximum cycle mean, overall and per nontrivial component.
    Lambda {
        #[command(flatten)]
        input: Input,
    },
    /// Critical graph.
    Critical {
        #[command(flatten)]
        input: Input,
    },
    /// Cyclic classes of the critical components.
    Classes {
        #[command(flatten)]
        input: Input,
    },
    /// CSR triple of A - λ and its product at t.
    Csr {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        t: u64,
        #[arg(long, value_enum, default_value_t = Rule::Canonical)]
        rule: Rule,
    },
    /// Nachtigall expansion evaluated at t.
    Nachtigall {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        t: u64,
        #[arg(long, value_enum, default_value_t = Rule::Canonical)]
        rule: Rule,
    },
    /// Ultimate expansion evaluated at t.
    Ultimate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        t: u64,
    },
    /// First t from which the ultimate expansion equals A^t.
    Threshold {
        #[command(flatten)]
        input: Input,
        /// Last exponent scanned; defaults to 30n².
        #[arg(long)]
        tmax: Option<u64>,
    },
    /// Decide whether every orbit is ultimately linear periodic.
    OrbitCheck {
        #[command(flatten)]
        input: Input,
        /// Also run the Boolean-power reference check.
        #[arg(long)]
        oracle: bool,
    },
    /// Iterate A^t y and detect linear periodicity.
    Orbit {
        #[command(flatten)]
        input: Input,
        /// Start vector file.
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        tmax: usize,
    },
    /// Cross-check the production routes against brute-force oracles.
    Verify {
        #[command(flatten)]
        input: Input,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Power { .. } => "power",
            Command::Star { .. } => "star",
            Command::Lambda { .. } => "lambda",
            Command::Critical { .. } => "critical",
            Command::Classes { .. } => "classes",
            Command::Csr { .. } => "csr",
            Command::Nachtigall { .. } => "nachtigall",
            Command::Ultimate { .. } => "ultimate",
            Command::Threshold { .. } => "threshold",
            Command::OrbitCheck { .. } => "orbit-check",
            Command::Orbit { .. } => "orbit",
            Command::Verify { .. } => "verify",
        }
    }

    fn input(&self) -> &Input {
        match self {
            Command::Power { input, .. }
            | Command::Star { input }
            | Command::Lambda { input }
            | Command::Critical { input }
            | Command::Classes { input }
            | Command::Csr { input, .. }
            | Command::Nachtigall { input, .. }
            | Command::Ultimate { input, .. }
            | Command::Threshold { input, .. }
            | Command::OrbitCheck { input, .. }
            | Command::Orbit { input, .. }
            | Command::Verify { input } => input,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Precondition(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Precondition(_) => EXIT_PRECONDITION,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Precondition(_) => "precondition",
        }
    }
}

impl From<tropical_core::Error> for CliError {
    fn from(e: tropical_core::Error) -> Self {
        use tropical_core::Error as E;
        match e {
            E::Dimension { .. }
            | E::Empty
            | E::InvalidEntry { .. }
            | E::NodeOutOfRange { .. }
            | E::ZeroVector => CliError::Input(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

fn located(path: &Path, e: ParseError) -> CliError {
    CliError::Input(format!("{}:{e}", path.display()))
}

/// What a finished command hands back to `main`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Settings {
    tol: f64,
    cap: usize,
}

fn settings() -> Result<Settings, CliError> {
    let tol = match std::env::var("TROPICAL_TOL") {
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite() && *x >= 0.0)
            .ok_or_else(|| {
                CliError::Input(format!("TROPICAL_TOL: not a nonnegative number: `{s}`"))
            })?,
        Err(_) => DEFAULT_TOL,
    };
    let cap = match std::env::var("TROPICAL_ORACLE_CAP") {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&c| (1..=DEFAULT_ORACLE_CAP).contains(&c))
            .ok_or_else(|| {
                CliError::Input(format!(
                    "TROPICAL_ORACLE_CAP: expected an integer in 1..={DEFAULT_ORACLE_CAP}, found `{s}`"
                ))
            })?,
        Err(_) => DEFAULT_ORACLE_CAP,
    };
    Ok(Settings { tol, cap })
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        std::io::Read::read_to_end(&mut std::io::stdin(), &mut buf)
            .map_err(|e| CliError::Input(format!("stdin: {e}")))?;
        return Ok(buf);
    }
    std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn text(path: &Path, bytes: &[u8]) -> Result<String, CliError> {
    String::from_utf8(bytes.to_vec())
        .map_err(|_| CliError::Input(format!("{}: not valid UTF-8", path.display())))
}

fn digest(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn ms(since: Instant) -> Value {
    number(since.elapsed().as_secs_f64() * 1e3)
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: rendered,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: rendered,
                    stderr: String::new(),
                }
            };
        }
    };
    let name = cli.command.name();
    match execute(&cli) {
        Ok((report, code)) => Outcome {
            code,
            stdout: format!("{report}\n"),
            stderr: String::new(),
        },
        Err(e) => {
            let report = object([
                ("command", Value::from(name)),
                (
                    "error",
                    object([
                        ("kind", Value::from(e.kind())),
                        ("message", Value::from(e.to_string())),
                    ]),
                ),
            ]);
            Outcome {
                code: e.code(),
                stdout: format!("{report}\n"),
                stderr: format!("tropical {name}: {e}\n"),
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<(Value, i32), CliError> {
    let settings = settings()?;
    let start = Instant::now();
    let path = &cli.command.input().file;
    let bytes = read(path)?;
    let a = parse_matrix(&text(path, &bytes)?, cli.format, cli.semiring)
        .map_err(|e| located(path, e))?;
    let parse_ms = ms(start);

    let w = Writer {
        semiring: cli.semiring,
    };
    let compute = Instant::now();
    let (mut fields, code) = match &cli.command {
        Command::Power { t, .. } => (power(&w, &a, *t), EXIT_OK),
        Command::Star { .. } => (star(&w, &a)?, EXIT_OK),
        Command::Lambda { .. } => (lambda(&w, &a)?, EXIT_OK),
        Command::Critical { .. } => (critical(&w, &a)?, EXIT_OK),
        Command::Classes { .. } => (classes(&a)?, EXIT_OK),
        Command::Csr { t, rule, .. } => (csr(&w, &a, *t, *rule)?, EXIT_OK),
        Command::Nachtigall { t, rule, .. } => {
            let e = nachtigall_expand(&a, rule.selection())?;
            (expansion(&w, &a, &e, *t, &settings), EXIT_OK)
        }
        Command::Ultimate { t, .. } => {
            let e = ultimate_expand(&a)?;
            (expansion(&w, &a, &e, *t, &settings), EXIT_OK)
        }
        Command::Threshold { tmax, .. } => (threshold(&a, *tmax)?, EXIT_OK),
        Command::OrbitCheck { oracle, .. } => (orbit_check(&a, *oracle)?, EXIT_OK),
        Command::Orbit { y, tmax, .. } => (orbit(&w, cli, &a, y, *tmax)?, EXIT_OK),
        Command::Verify { .. } => {
            let (fields, passed) = verify(&a, &settings)?;
            (fields, if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
    };
    fields.insert("command".into(), Value::from(cli.command.name()));
    fields.insert("input_digest".into(), Value::from(digest(&bytes)));
    fields.insert("n".into(), Value::from(a.dim()));
    fields.insert("semiring".into(), Value::from(cli.semiring.name()));
    if cli.timings {
        fields.insert(
            "timings".into(),
            object([("compute_ms", ms(compute)), ("parse_ms", parse_ms)]),
        );
    }
    Ok((Value::Object(fields), code))
}

type Fields = Map<String, Value>;

fn fields<const N: usize>(items: [(&str, Value); N]) -> Fields {
    items.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn power(w: &Writer, a: &TropicalMatrix, t: u64) -> Fields {
    fields([("t", Value::from(t)), ("matrix", w.matrix(&a.pow(t)))])
}

fn star(w: &Writer, a: &TropicalMatrix) -> Result<Fields, CliError> {
    Ok(fields([("matrix", w.matrix(&kleene_star(a)?))]))
}

fn lambda(w: &Writer, a: &TropicalMatrix) -> Result<Fields, CliError> {
    let cs = match critical_structure(a) {
        Ok(cs) => cs,
        Err(tropical_core::Error::NoCycles) => {
            return Ok(fields([
                ("lambda", Value::Null),
                ("per_component", Value::Array(vec![])),
                ("components", Value::Array(vec![])),
            ]))
        }
        Err(e) => return Err(e.into()),
    };
    let scc = cs.scc();
    let nontrivial: Vec<usize> = (0..scc.len()).filter(|&c| !scc.is_trivial(c)).collect();
    Ok(fields([
        ("lambda", w.scalar(cs.lambda())),
        (
            "per_component",
            Value::Array(
                nontrivial
                    .iter()
                    .map(|&c| w.scalar(cs.lambda_of_component()[c]))
                    .collect(),
            ),
        ),
        (
            "components",
            Value::Array(nontrivial.iter().map(|&c| indices(scc.nodes(c))).collect()),
        ),
    ]))
}

fn edges(list: &[(usize, usize)]) -> Value {
    Value::Array(list.iter().map(|&(i, j)| indices(&[i, j])).collect())
}

fn critical(w: &Writer, a: &TropicalMatrix) -> Result<Fields, CliError> {
    let cs = critical_structure(a)?;
    let comps: Vec<Value> = cs
        .critical_components()
        .iter()
        .map(|c| {
            object([
                ("nodes", indices(c.nodes())),
                ("cyclicity", Value::from(c.cyclicity())),
            ])
        })
        .collect();
    Ok(fields([
        ("lambda", w.scalar(cs.lambda())),
        ("nodes", indices(cs.critical_nodes())),
        ("edges", edges(cs.critical_edges())),
        ("components", Value::Array(comps)),
        ("gamma", Value::from(cs.gamma())),
    ]))
}

fn classes(a: &TropicalMatrix) -> Result<Fields, CliError> {
    let cs = critical_structure(a)?;
    let comps: Vec<Value> = cs
        .critical_components()
        .iter()
        .map(|c| {
            object([
                ("nodes", indices(c.nodes())),
                ("cyclicity", Value::from(c.cyclicity())),
                (
                    "classes",
                    Value::Array(c.class_members().iter().map(|m| indices(m)).collect()),
                ),
            ])
        })
        .collect();
    Ok(fields([
        ("gamma", Value::from(cs.gamma())),
        ("components", Value::Array(comps)),
    ]))
}

fn csr(w: &Writer, a: &TropicalMatrix, t: u64, rule: Rule) -> Result<Fields, CliError> {
    let lambda = max_cycle_mean_of(a);
    if !lambda.is_finite() {
        return Err(tropical_core::Error::NoCycles.into());
    }
    let d = a.scale(-lambda);
    let triple = csr_build(&d, rule.selection())?;
    let p = csr_product(&triple, t);
    Ok(fields([
        ("lambda", w.scalar(lambda)),
        ("gamma", Value::from(triple.gamma())),
        ("critical_nodes", indices(triple.n_c())),
        ("transient", Value::from(triple.transient())),
        ("t", Value::from(t)),
        ("t_residue", Value::from(p.t_residue)),
        ("c", w.matrix(triple.c())),
        ("s", w.matrix(triple.s())),
        ("r", w.matrix(triple.r())),
        ("scaling", w.row(triple.scaling().z())),
        ("product", w.matrix(&p.matrix)),
    ]))
}

fn close(a: &TropicalMatrix, b: &TropicalMatrix, tol: f64) -> bool {
    let scale = a.max_abs_finite().max(b.max_abs_finite());
    a.approx_eq(b, tol * (1.0 + scale)).unwrap_or(false)
}

fn below(a: &TropicalMatrix, b: &TropicalMatrix, tol: f64) -> bool {
    let scale = a.max_abs_finite().max(b.max_abs_finite());
    a.approx_le(b, tol * (1.0 + scale)).unwrap_or(false)
}

fn expansion(w: &Writer, a: &TropicalMatrix, e: &Expansion, t: u64, s: &Settings) -> Fields {
    let ev = evaluate(e, t);
    let terms: Vec<Value> = e
        .terms()
        .iter()
        .zip(&ev.per_term)
        .map(|(term, value)| {
            let mut m = fields([
                ("lambda", w.scalar(term.lambda())),
                ("gamma", Value::from(term.triple.gamma())),
                ("nodes", indices(&term.step.k_set)),
                ("critical_nodes", indices(term.triple.n_c())),
                ("product", w.matrix(&term.product(t))),
                ("value", w.matrix(value)),
            ]);
            if let Some(m_set) = &term.step.m_set {
                m.insert("removed".into(), indices(m_set));
            }
            Value::Object(m)
        })
        .collect();
    let mut out = fields([
        ("kind", Value::from(e.kind().name())),
        ("t", Value::from(t)),
        ("gamma", Value::from(e.gamma())),
        ("terms", Value::Array(terms)),
        ("matrix", w.matrix(&ev.matrix)),
        (
            "equals_power",
            Value::from(close(&ev.matrix, &a.pow(t), s.tol)),
        ),
        (
            "validity_threshold",
            e.validity_threshold().map_or(Value::Null, Value::from),
        ),
    ]);
    if let Some(sigma) = e.sigma() {
        out.insert("sigma".into(), indices(sigma));
    }
    out
}

fn threshold(a: &TropicalMatrix, tmax: Option<u64>) -> Result<Fields, CliError> {
    let e = ultimate_expand(a)?;
    let horizon = tmax.unwrap_or_else(|| default_threshold_horizon(a.dim()));
    let (value, found) = match ultimate_threshold(a, &e, horizon) {
        Threshold::Found(t) => (Value::from(t), true),
        Threshold::Exceeds(_) => (Value::Null, false),
    };
    Ok(fields([
        ("threshold", value),
        ("found", Value::from(found)),
        ("horizon", Value::from(horizon)),
        ("gamma", Value::from(e.gamma())),
    ]))
}

fn orbit_check(a: &TropicalMatrix, oracle: bool) -> Result<Fields, CliError> {
    let r = is_orbit_periodic(a)?;
    let pairs =
        |v: &[(usize, usize)]| Value::Array(v.iter().map(|&(c, d)| indices(&[c, d])).collect());
    let support: Vec<Value> = r
        .support_violations
        .iter()
        .map(|v| {
            object([
                ("mu", Value::from(v.mu)),
                ("nu", Value::from(v.nu)),
                ("i", Value::from(v.i)),
                ("j", Value::from(v.j)),
            ])
        })
        .collect();
    let mut out = fields([
        ("verdict", Value::from(r.verdict)),
        ("gamma_u", Value::from(r.gamma_u)),
        ("acyclic", Value::from(r.acyclic)),
        ("condition1_violations", pairs(&r.condition1_violations)),
        ("support_violations", Value::Array(support)),
    ]);
    if oracle {
        let o = orbit_conditions(a)?;
        out.insert("oracle_verdict".into(), Value::from(o.verdict));
        out.insert(
            "condition2_violations".into(),
            pairs(&o.condition2_violations),
        );
    }
    Ok(out)
}

fn orbit(
    w: &Writer,
    cli: &Cli,
    a: &TropicalMatrix,
    y_path: &Path,
    tmax: usize,
) -> Result<Fields, CliError> {
    let bytes = read(y_path)?;
    let y = parse_vector(&text(y_path, &bytes)?, cli.format, cli.semiring)
        .map_err(|e| located(y_path, e))?;
    if y.dim() != a.dim() {
        return Err(CliError::Input(format!(
            "{}: vector has {} entries, matrix is {}x{}",
            y_path.display(),
            y.dim(),
            a.dim(),
            a.dim()
        )));
    }
    if y.is_zero_vector() {
        return Err(tropical_core::Error::ZeroVector.into());
    }
    let trace = simulate_orbit(a, &y, tmax)?;
    let predicted = orbit_growth_rate(a, &y).map_or(Value::Null, |r| w.scalar(r));
    let opt = |v: Option<usize>| v.map_or(Value::Null, Value::from);
    Ok(fields([
        ("y_digest", Value::from(digest(&bytes))),
        ("tmax", Value::from(tmax)),
        (
            "samples",
            Value::Array(trace.samples.iter().map(|v| w.vector(v)).collect()),
        ),
        ("linear_periodic", Value::from(trace.is_linear_periodic())),
        ("detected_period", opt(trace.detected_period)),
        ("transient", opt(trace.transient)),
        (
            "growth_rate",
            trace.growth_rate.map_or(Value::Null, |r| w.scalar(r)),
        ),
        ("predicted_growth_rate", predicted),
    ]))
}

struct Checks(Vec<(String, bool)>);

impl Checks {
    fn add(&mut self, name: &str, passed: bool) {
        self.0.push((name.to_string(), passed));
    }
}

fn verify(a: &TropicalMatrix, s: &Settings) -> Result<(Fields, bool), CliError> {
    let n = a.dim();
    let t_max = tropical_core::oracle::MAX_ORACLE_LENGTH;
    let table = enumerate_small_capped(a, t_max, s.cap)?;
    let mut checks = Checks(Vec::new());

    let karp = max_cycle_mean_of(a);
    let brute = brute_force_lambda(a);
    checks.add(
        "lambda_matches_cycle_enumeration",
        karp == brute || (karp - brute).abs() <= s.tol * (1.0 + brute.abs()),
    );
    let mut power = TropicalMatrix::identity(n);
    let mut powers_ok = true;
    for t in 0..=t_max as usize {
        if t > 0 {
            power = power.otimes(a)?;
        }
        powers_ok &= close(&power, &table.all[t], s.tol);
    }
    checks.add("powers_match_path_weights", powers_ok);

    let orbit = is_orbit_periodic(a)?;
    checks.add(
        "orbit_support_matches_strong_access",
        orbit.verdict == orbit_conditions(a)?.verdict,
    );

    if karp.is_finite() {
        let t0 = 3 * (n * n) as u64;
        let nacht = nachtigall_expand(a, CriticalSelection::Full)?;
        let mut p = a.pow(t0);
        let mut ok = true;
        for t in t0..=t0 + 2 * nacht.gamma() as u64 {
            if t > t0 {
                p = p.otimes(a)?;
            }
            ok &= close(&evaluate(&nacht, t).matrix, &p, s.tol);
        }
        checks.add("nachtigall_matches_powers", ok);

        let heavy_ok = nacht.terms().iter().enumerate().all(|(mu, term)| {
            (0..=t_max).all(|t| below(&table.mu_heavy[mu][t as usize], &term.value(t), s.tol))
        });
        checks.add("heavy_paths_below_nachtigall_terms", heavy_ok);

        let ult = ultimate_expand(a)?;
        let hard_ok = ult.terms().iter().enumerate().all(|(mu, term)| {
            (0..=t_max).all(|t| below(&table.mu_hard[mu][t as usize], &term.value(t), s.tol))
        });
        checks.add("hard_paths_below_ultimate_terms", hard_ok);

        let found = match ultimate_threshold(a, &ult, default_threshold_horizon(n)) {
            Threshold::Found(t) => (t..=t + 2 * ult.gamma() as u64)
                .all(|t| close(&evaluate(&ult, t).matrix, &a.pow(t), s.tol)),
            Threshold::Exceeds(_) => false,
        };
        checks.add("ultimate_matches_powers", found);

        let fast = fast_terms(a, t0, ExpansionKind::NachtigallCanonical)?;
        checks.add(
            "fast_terms_match_literal",
            fast.iter()
                .zip(nacht.terms())
                .all(|(f, term)| close(f, &term.product(t0), s.tol)),
        );
    }

    let passed = checks.0.iter().all(|(_, ok)| *ok);
    let list: Vec<Value> = checks
        .0
        .iter()
        .map(|(name, ok)| {
            object([
                ("name", Value::from(name.as_str())),
                ("passed", Value::from(*ok)),
            ])
        })
        .collect();
    Ok((
        fields([
            ("checks", Value::Array(list)),
            ("passed", Value::from(passed)),
            ("oracle_cap", Value::from(s.cap)),
            ("tolerance", number(s.tol)),
        ]),
        passed,
    ))
}
