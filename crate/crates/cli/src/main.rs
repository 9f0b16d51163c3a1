//! `symorth` command-line front end. CSV and JSON on standard output for
//! plotting and regression diffs.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde::Serialize;

use symorth::basis::{Basis, GenericBasis, SubclassBasis};
use symorth::core_class::{eigenvalue, monic_coeffs, ode_residual, recurrence_c};
use symorth::expansion::{expand, expand_sampled, reconstruct_many, BasisDescriptor, ExpansionSeries};
use symorth::legendre::LegendreKind;
use symorth::subclasses::SubclassSpec;
use symorth::verify::{generic_weight, gram_matrix, GramReport};
use symorth::{Error, Params};

#[derive(Parser)]
#[command(name = "symorth", version, about = "Symmetric orthogonal polynomial classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Value of the monic polynomial of degree n at x.
    Eval {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
    /// Monic coefficients as JSON, in decreasing power.
    Coeffs {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        n: usize,
    },
    /// Gram matrix of degrees 0..=nmax as JSON. Exits 0 only when it passes.
    Gram {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        nmax: usize,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// ODE residuals at interior points as CSV `x,residual`.
    VerifyOde {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// Weight samples as CSV `x,w`.
    Weights {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Expansion coefficients as JSON, reconstruction as CSV `x,f,fN,abs_err`.
    Expand {
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long)]
        nmax: usize,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        /// CSV file with columns `x,f`, or an expression in `x`.
        #[arg(long)]
        input: String,
        #[arg(long)]
        output: PathBuf,
        /// Reconstruction points when the input is an expression.
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Per-degree CSV of λ_n, C_n, norm² and monic coefficients.
    Table {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        nmax: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassName {
    Gup,
    Ghp,
    Finite1,
    Finite2,
    Custom,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BasisName {
    Gup,
    Ghp,
    Finite1,
    Finite2,
    Custom,
    LegendreU,
    LegendrePm,
    LegendreV,
    LegendreG,
    LegendreQ,
}

#[derive(Args, Clone)]
struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    u: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    v: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    /// Half-width of the custom class's interval; unbounded by default.
    #[arg(long)]
    theta: Option<f64>,
}

#[derive(Args, Clone)]
struct ClassArgs {
    #[arg(long, value_enum)]
    class: ClassName,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args, Clone)]
struct BasisArgs {
    #[arg(long, value_enum)]
    basis: BasisName,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Rational exponent such as `2/3`; maps a subclass through `x ↦ x^{λ/2}`.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<Rational64>,
}

enum Failure {
    /// Flags or parameter constraints; exit 2.
    Usage { code: &'static str, detail: String },
    /// Exit 1.
    Compute(Error),
    Io(io::Error),
    /// The report was already written; exit 1 without an error document.
    Silent,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

fn usage(detail: impl Into<String>) -> Failure {
    Failure::Usage {
        code: "usage",
        detail: detail.into(),
    }
}

fn constraint(e: Error) -> Failure {
    Failure::Usage {
        code: e.code(),
        detail: e.to_string(),
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn need(value: Option<f64>, flag: &str, what: &str) -> CliResult<f64> {
    value.ok_or_else(|| usage(format!("{what} needs --{flag}")))
}

/// A family selected on the command line.
enum Family {
    Subclass(SubclassSpec),
    Custom { params: Params, theta: f64 },
}

impl ParamArgs {
    fn subclass(&self, name: ClassName) -> CliResult<SubclassSpec> {
        let label = match name {
            ClassName::Gup => "gup",
            ClassName::Ghp => "ghp",
            ClassName::Finite1 => "finite1",
            ClassName::Finite2 => "finite2",
            ClassName::Custom => unreachable!("custom is not a subclass"),
        };
        let u = need(self.u, "u", label)?;
        let spec = match name {
            ClassName::Gup => SubclassSpec::gup(u, need(self.v, "v", label)?),
            ClassName::Ghp => SubclassSpec::ghp(u),
            ClassName::Finite1 => SubclassSpec::finite_one(u, need(self.v, "v", label)?),
            ClassName::Finite2 => SubclassSpec::finite_two(u),
            ClassName::Custom => unreachable!(),
        };
        spec.map_err(constraint)
    }

    fn family(&self, name: ClassName) -> CliResult<Family> {
        if name != ClassName::Custom {
            return self.subclass(name).map(Family::Subclass);
        }
        let params = Params::new(
            need(self.p, "p", "custom")?,
            need(self.q, "q", "custom")?,
            need(self.r, "r", "custom")?,
            need(self.s, "s", "custom")?,
        )
        .map_err(constraint)?;
        let theta = self.theta.unwrap_or(f64::INFINITY);
        if !(theta > 0.0) {
            return Err(usage(format!("--theta must be positive, got {theta}")));
        }
        Ok(Family::Custom { params, theta })
    }
}

impl Family {
    fn params(&self) -> Params {
        match self {
            Family::Subclass(spec) => spec.params(),
            Family::Custom { params, .. } => params.clone(),
        }
    }

    fn theta(&self) -> f64 {
        match self {
            Family::Subclass(spec) => spec.support().theta,
            Family::Custom { theta, .. } => *theta,
        }
    }

    fn basis(&self) -> symorth::Result<Box<dyn Basis>> {
        Ok(match self {
            Family::Subclass(spec) => Box::new(SubclassBasis::new(*spec)?),
            Family::Custom { params, theta } => Box::new(GenericBasis::new(params.clone(), *theta)?),
        })
    }

    fn weight(&self, x: f64) -> f64 {
        match self {
            Family::Subclass(spec) => spec.weight_at(x).unwrap_or(f64::NAN),
            Family::Custom { params, theta } => {
                if x.abs() < *theta {
                    generic_weight(params, x)
                } else {
                    f64::NAN
                }
            }
        }
    }
}

impl BasisArgs {
    fn descriptor(&self) -> CliResult<BasisDescriptor> {
        let class = match self.basis {
            BasisName::Gup => Some(ClassName::Gup),
            BasisName::Ghp => Some(ClassName::Ghp),
            BasisName::Finite1 => Some(ClassName::Finite1),
            BasisName::Finite2 => Some(ClassName::Finite2),
            BasisName::Custom => Some(ClassName::Custom),
            _ => None,
        };
        if let Some(name) = class {
            let family = self.params.family(name)?;
            return match (family, self.lambda) {
                (Family::Subclass(spec), None) => Ok(BasisDescriptor::Subclass(spec)),
                (Family::Subclass(class), Some(lambda)) => Ok(BasisDescriptor::Lambda { class, lambda }),
                (Family::Custom { .. }, Some(_)) => Err(usage("--lambda applies to the four subclasses only")),
                (Family::Custom { params, theta }, None) => Ok(BasisDescriptor::Generic { params, theta }),
            };
        }
        if self.lambda.is_some() {
            return Err(usage("--lambda applies to the four subclasses only"));
        }
        let kind = match self.basis {
            BasisName::LegendreU => LegendreKind::U {
                alpha: need(self.alpha, "alpha", "legendre-u")?,
            },
            BasisName::LegendrePm => LegendreKind::Pm {
                m: self.m.ok_or_else(|| usage("legendre-pm needs --m"))?,
            },
            BasisName::LegendreV => LegendreKind::V {
                alpha: need(self.alpha, "alpha", "legendre-v")?,
            },
            BasisName::LegendreG => LegendreKind::G {
                a: need(self.a, "a", "legendre-g")?,
                b: need(self.b, "b", "legendre-g")?,
            },
            BasisName::LegendreQ => LegendreKind::Q {
                b: need(self.b, "b", "legendre-q")?,
            },
            _ => unreachable!("subclasses handled above"),
        };
        kind.validate().map_err(constraint)?;
        Ok(BasisDescriptor::Legendre(kind))
    }
}

fn fmt_f64(x: f64) -> String {
    ryu::Buffer::new().format(x).to_owned()
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn write_json<T: Serialize>(value: &T) -> CliResult<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value).map_err(io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// `count` points strictly inside `(−L, L)`, with `L` the half-width clipped
/// to 4 on unbounded supports.
fn interior_grid(theta: f64, count: usize) -> Vec<f64> {
    let half = theta.min(4.0);
    (0..count)
        .map(|k| -half + 2.0 * half * (k as f64 + 0.5) / count as f64)
        .collect()
}

#[derive(Serialize)]
struct CoeffTerm {
    power: usize,
    value: f64,
}

#[derive(Serialize)]
struct CoeffsDoc {
    n: usize,
    monic: bool,
    coeffs: Vec<CoeffTerm>,
}

#[derive(Serialize)]
struct EntryDoc {
    n: usize,
    m: usize,
    value: f64,
    err: f64,
    diverged: bool,
}

#[derive(Serialize)]
struct GramDoc {
    label: String,
    nmax: usize,
    tol: f64,
    pass: bool,
    failures: Vec<String>,
    entries: Vec<EntryDoc>,
}

impl From<&GramReport> for GramDoc {
    fn from(r: &GramReport) -> Self {
        GramDoc {
            label: r.label.clone(),
            nmax: r.nmax,
            tol: r.tol,
            pass: r.pass,
            failures: r.failures.clone(),
            entries: r
                .entries
                .iter()
                .map(|e| EntryDoc {
                    n: e.n,
                    m: e.m,
                    value: e.value,
                    err: e.err,
                    diverged: e.diverged(),
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct SeriesDoc {
    basis: String,
    nmax: usize,
    coefficients: Vec<f64>,
    norms: Vec<f64>,
    target_norm_sq: f64,
    residual_abs: f64,
    residual_rel: f64,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Eval { class, n, x } => {
            let family = class.params.family(class.class)?;
            let poly = monic_coeffs(&family.params(), n)?;
            println!("{}", fmt_f64(poly.eval(&x)));
        }
        Command::Coeffs { class, n } => {
            let family = class.params.family(class.class)?;
            let poly = monic_coeffs(&family.params(), n)?;
            write_json(&CoeffsDoc {
                n,
                monic: true,
                coeffs: poly
                    .terms()
                    .map(|(power, &value)| CoeffTerm { power, value })
                    .collect(),
            })?;
        }
        Command::Gram { class, nmax, tol } => {
            let family = class.params.family(class.class)?;
            if !(tol > 0.0) {
                return Err(usage(format!("--tol must be positive, got {tol}")));
            }
            let basis = family.basis()?;
            let report = gram_matrix(basis.as_ref(), nmax, tol);
            write_json(&GramDoc::from(&report))?;
            if !report.pass {
                return Err(Failure::Silent);
            }
        }
        Command::VerifyOde { class, n, points } => {
            let family = class.params.family(class.class)?;
            if points == 0 {
                return Err(usage("--points must be at least 1"));
            }
            let params = family.params();
            let mut w = csv_writer(io::stdout().lock());
            w.write_record(["x", "residual"])?;
            let mut worst: f64 = 0.0;
            for x in interior_grid(family.theta(), points) {
                let res = ode_residual(&params, n, &x)?;
                worst = worst.max(res.abs());
                w.write_record([fmt_f64(x), fmt_f64(res)])?;
            }
            w.flush()?;
            eprintln!("max_abs_residual={}", fmt_f64(worst));
        }
        Command::Weights { class, from, to, steps } => {
            let family = class.params.family(class.class)?;
            if steps == 0 || !from.is_finite() || !to.is_finite() {
                return Err(usage("--steps must be positive and --from/--to finite"));
            }
            let mut w = csv_writer(io::stdout().lock());
            w.write_record(["x", "w"])?;
            for k in 0..=steps {
                let x = from + (to - from) * k as f64 / steps as f64;
                w.write_record([fmt_f64(x), fmt_f64(family.weight(x))])?;
            }
            w.flush()?;
        }
        Command::Expand {
            basis,
            nmax,
            tol,
            input,
            output,
            points,
        } => {
            let descriptor = basis.descriptor()?;
            if points == 0 {
                return Err(usage("--points must be at least 1"));
            }
            let (series, rows) = if Path::new(&input).is_file() {
                let (xs, fs) = read_samples(Path::new(&input))?;
                let series = expand_sampled(xs.clone(), fs.clone(), &descriptor, nmax, tol)?;
                (series, xs.into_iter().zip(fs).collect::<Vec<_>>())
            } else {
                let node = evalexpr::build_operator_tree(&input)
                    .map_err(|e| usage(format!("--input is neither a file nor an expression: {e}")))?;
                let f = |x: f64| eval_expression(&node, x);
                f(0.5).map_err(usage)?;
                let g = |x: f64| f(x).unwrap_or(f64::NAN);
                let series = expand(&g, &descriptor, nmax, tol)?;
                let theta = descriptor.build()?.support().theta;
                let rows = interior_grid(theta, points)
                    .into_iter()
                    .map(|x| (x, g(x)))
                    .collect();
                (series, rows)
            };
            write_reconstruction(&series, &rows, &output)?;
            write_json(&series_doc(&series)?)?;
        }
        Command::Table { class, nmax } => {
            let family = class.params.family(class.class)?;
            let params = family.params();
            let basis = family.basis().ok();
            let mut w = csv_writer(io::stdout().lock());
            w.write_record(["n", "lambda_n", "c_n", "norm_sq", "coeffs"])?;
            for n in 0..=nmax {
                let lambda = eigenvalue(&params, n).value;
                let c = if n == 0 {
                    String::new()
                } else {
                    recurrence_c(&params, n).map(fmt_f64).unwrap_or_default()
                };
                let norm = basis
                    .as_ref()
                    .and_then(|b| b.closed_norm(n).ok())
                    .map(fmt_f64)
                    .unwrap_or_default();
                let coeffs = monic_coeffs(&params, n)
                    .map(|p| p.coeffs().iter().map(|&c| fmt_f64(c)).collect::<Vec<_>>().join(";"))
                    .unwrap_or_default();
                w.write_record([n.to_string(), fmt_f64(lambda), c, norm, coeffs])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn eval_expression(node: &evalexpr::Node, x: f64) -> Result<f64, String> {
    use evalexpr::{ContextWithMutableVariables, HashMapContext, Value};
    let mut ctx = HashMapContext::new();
    for (name, value) in [("x", x), ("pi", std::f64::consts::PI), ("e", std::f64::consts::E)] {
        ctx.set_value(name.into(), Value::Float(value))
            .map_err(|e| e.to_string())?;
    }
    node.eval_number_with_context(&ctx).map_err(|e| e.to_string())
}

fn read_samples(path: &Path) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut xs = Vec::new();
    let mut fs = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = |i: usize| -> CliResult<f64> {
            record
                .get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| usage(format!("{}: row {} needs numeric x,f", path.display(), line + 1)))
        };
        xs.push(field(0)?);
        fs.push(field(1)?);
    }
    Ok((xs, fs))
}

fn write_reconstruction(series: &ExpansionSeries, rows: &[(f64, f64)], path: &Path) -> CliResult<()> {
    let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let approx = reconstruct_many(series, &xs)?;
    let mut w = csv_writer(File::create(path)?);
    w.write_record(["x", "f", "fN", "abs_err"])?;
    for (&(x, f), fx) in rows.iter().zip(approx) {
        w.write_record([fmt_f64(x), fmt_f64(f), fmt_f64(fx), fmt_f64((f - fx).abs())])?;
    }
    w.flush()?;
    Ok(())
}

fn series_doc(series: &ExpansionSeries) -> CliResult<SeriesDoc> {
    Ok(SeriesDoc {
        basis: series.basis.build()?.label(),
        nmax: series.truncation(),
        coefficients: series.coefficients.clone(),
        norms: series.norms.clone(),
        target_norm_sq: series.target_norm_sq,
        residual_abs: series.residual_abs,
        residual_rel: series.residual_rel,
    })
}

#[derive(Serialize)]
struct ErrorDoc<'a> {
    error: &'a str,
    detail: &'a str,
}

fn error_doc(code: &str, detail: &str) -> String {
    serde_json::to_string(&ErrorDoc { error: code, detail }).expect("strings serialize")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let status = e.exit_code();
            let _ = e.print();
            return ExitCode::from(status as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage { code, detail }) => {
            eprintln!("{}", error_doc(code, &detail));
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("{}", error_doc(e.code(), &e.to_string()));
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            eprintln!("{}", error_doc("io", &e.to_string()));
            ExitCode::from(1)
        }
        Err(Failure::Silent) => ExitCode::from(1),
    }
}
