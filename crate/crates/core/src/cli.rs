//! Command-line front end. [`run`] returns the exit code and the text that
//! would go to stdout and stderr, so tests can drive it in-process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::cov::{self, FiberSpec};
use crate::error::{Error, Result};
use crate::poly::{IntPolynomial, Specialization, VarSpace};
use crate::realizable::{self, RationalArrangement};
use crate::signvec::{CovectorSet, FiberView, SignVector};
use crate::varchenko::{self, Mode, VarchenkoMatrix, VerifyOptions, DEFAULT_SYMBOLIC_LIMIT};
use crate::wiring::{self, WiringDiagram};

#[derive(Debug, Parser)]
#[command(name = "varchenko", version, about = "Varchenko determinants of oriented matroid fibers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write output to a file instead of stdout.
    #[arg(short = 'o', long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads for parallel evaluation (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Symbolic,
    Randomized,
}

#[derive(Debug, Args)]
pub struct Input {
    /// A .cov file, a wiring diagram or an arrangement (JSON).
    pub input: PathBuf,

    /// Free indices of the fiber, 1-based, e.g. "1,2,5" or "1-9".
    #[arg(long)]
    pub fiber: Option<String>,

    /// Anchor covector selecting the fiber.
    #[arg(long)]
    pub anchor: Option<String>,
}

#[derive(Debug, Args)]
pub struct Symbolic {
    /// Variable specialization: "all=a", "a1p=2,a1m=3", or a JSON map.
    #[arg(long)]
    pub specialize: Option<String>,

    /// Largest multivariate matrix computed symbolically.
    #[arg(long, default_value_t = DEFAULT_SYMBOLIC_LIMIT)]
    pub max_topes: usize,

    /// Compute symbolically regardless of size.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate the covector axioms and any declared fiber.
    Check(Input),
    /// List the topes of the fiber.
    Topes(Input),
    /// List non-tope faces with weights and multiplicities.
    Faces {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        specialize: Option<String>,
    },
    /// Exact determinant of the Varchenko matrix.
    Det {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        symbolic: Symbolic,
    },
    /// The product formula over non-tope faces.
    Formula {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        specialize: Option<String>,
    },
    /// Compare the determinant with the product formula.
    Verify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        symbolic: Symbolic,
        /// Default: symbolic up to --max-topes, randomized beyond.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long, default_value_t = varchenko::DEFAULT_EVALS)]
        evals: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Covector set of a rational arrangement, in .cov form.
    FromArrangement {
        input: PathBuf,
    },
    /// Face set of a wiring diagram, in .cov form.
    FromWiring {
        input: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Failure kinds: code 1 reports are still printed, code 2 is bad input.
enum Failure {
    Report(String),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let result = match cli.workers {
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(Failure::Input(Error::Input(e.to_string()))),
        },
        None => execute(&cli),
    };
    let (code, body, stderr) = match result {
        Ok(body) => (0, body, String::new()),
        Err(Failure::Report(body)) => (1, body, String::new()),
        Err(Failure::Input(e)) => return Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
    };
    match &cli.output {
        Some(path) => match std::fs::write(path, &body) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr },
            Err(e) => Outcome {
                code: 2,
                stdout: String::new(),
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
            },
        },
        None => Outcome { code, stdout: body, stderr },
    }
}

fn execute(cli: &Cli) -> std::result::Result<String, Failure> {
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Check(input) => check(input, json),
        Command::Topes(input) => {
            let fiber = load_fiber(input)?;
            let topes: Vec<String> = fiber.topes().iter().map(|t| t.to_string()).collect();
            Ok(if json {
                pretty(&json!({ "topes": topes }))
            } else {
                lines(&topes)
            })
        }
        Command::Faces { input, specialize } => {
            let fiber = load_fiber(input)?;
            let spec = specialization(specialize.as_deref())?;
            faces(&fiber, &spec, json)
        }
        Command::Det { input, symbolic } => {
            let fiber = load_fiber(input)?;
            let spec = specialization(symbolic.specialize.as_deref())?;
            let mut m = VarchenkoMatrix::build(&fiber)?;
            if !spec.is_identity() {
                m = m.specialize(&spec)?;
            }
            let det = m.guarded_determinant(symbolic.max_topes, symbolic.force)?;
            Ok(if json {
                pretty(&json!({ "topes": m.size(), "determinant": det.to_string() }))
            } else {
                format!("{det}\n")
            })
        }
        Command::Formula { input, specialize } => {
            let fiber = load_fiber(input)?;
            let spec = specialization(specialize.as_deref())?;
            let mut f = varchenko::product_formula(&fiber)?;
            if !spec.is_identity() {
                let (target, images) = spec.images(fiber.n())?;
                f = f.substitute(target, &images)?;
            }
            let f = f.collected();
            Ok(if json {
                pretty(&json!({ "formula": f.to_string() }))
            } else {
                format!("{f}\n")
            })
        }
        Command::Verify {
            input,
            symbolic,
            mode,
            evals,
            seed,
        } => {
            let fiber = load_fiber(input)?;
            let opts = VerifyOptions {
                mode: mode.map(|m| match m {
                    ModeArg::Symbolic => Mode::Symbolic,
                    ModeArg::Randomized => Mode::Randomized,
                }),
                seed: *seed,
                evals: *evals,
                specialization: specialization(symbolic.specialize.as_deref())?,
                symbolic_limit: symbolic.max_topes,
                force_symbolic: symbolic.force,
            };
            let report = varchenko::verify(&fiber, &opts)?;
            let body = if json {
                serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
            } else {
                verify_text(&report)
            };
            if report.agreement {
                Ok(body)
            } else {
                Err(Failure::Report(body))
            }
        }
        Command::FromArrangement { input } => {
            let arr = RationalArrangement::from_json(&read(input)?)?;
            if arr.is_affine() {
                Ok(cov::write_fiber(&realizable::arrangement_fiber(&arr)?))
            } else {
                Ok(cov::write(&realizable::enumerate_covectors(&arr)?, None))
            }
        }
        Command::FromWiring { input } => {
            let wd = WiringDiagram::from_json(&read(input)?)?;
            Ok(cov::write_fiber(&wd.faces()?))
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn lines(items: &[String]) -> String {
    items.iter().map(|s| format!("{s}\n")).collect()
}

fn specialization(text: Option<&str>) -> Result<Specialization> {
    text.map_or(Ok(Specialization::identity()), Specialization::parse)
}

/// A covector set plus the fiber declaration from the file, if any.
struct Loaded {
    set: CovectorSet,
    fiber: Option<FiberSpec>,
}

fn load(path: &Path) -> Result<Loaded> {
    let text = read(path)?;
    if !text.trim_start().starts_with('{') {
        let f = cov::parse(&text)?;
        return Ok(Loaded { set: f.set, fiber: f.fiber });
    }
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Input(e.to_string()))?;
    let view = if value.get("wires").is_some() {
        WiringDiagram::from_json(&text)?.faces()?
    } else {
        realizable::arrangement_fiber(&RationalArrangement::from_json(&text)?)?
    };
    let spec = FiberSpec {
        free: view.free_indices(),
        anchor: (!view.is_whole()).then(|| *view.anchor()),
    };
    // a central arrangement declares nothing, so fiber flags apply freely
    let declared = !(view.is_whole() && view.base().has_zero());
    Ok(Loaded {
        set: (**view.base()).clone(),
        fiber: declared.then_some(spec),
    })
}

/// Merges the file's fiber declaration with `--fiber`/`--anchor`. A flag that
/// contradicts the header is an error.
fn effective_fiber(loaded: &Loaded, input: &Input) -> Result<Option<FiberSpec>> {
    let n = loaded.set.n();
    let flag_free = input.fiber.as_deref().map(|s| cov::parse_indices(s, n)).transpose()?;
    let flag_anchor = input.anchor.as_deref().map(str::parse::<SignVector>).transpose()?;
    let Some(header) = &loaded.fiber else {
        return match (flag_free, flag_anchor) {
            (None, None) => Ok(None),
            (None, Some(_)) => Err(Error::Input("--anchor needs --fiber".into())),
            (Some(free), anchor) => Ok(Some(FiberSpec { free, anchor })),
        };
    };
    if let Some(free) = &flag_free {
        if *free != header.free {
            return Err(Error::Input(format!(
                "--fiber {} conflicts with the file's I={}",
                cov::format_indices(free),
                cov::format_indices(&header.free)
            )));
        }
    }
    let anchor = match (flag_anchor, header.anchor) {
        (Some(a), Some(h)) if a != h => {
            return Err(Error::Input(format!("--anchor {a} conflicts with the file's u={h}")));
        }
        (a, h) => a.or(h),
    };
    Ok(Some(FiberSpec {
        free: header.free.clone(),
        anchor,
    }))
}

/// The fiber a determinant command works on. Central sets must satisfy the
/// covector axioms first; sets without the zero vector stand as fibers.
fn load_fiber(input: &Input) -> std::result::Result<FiberView, Failure> {
    let loaded = load(&input.input)?;
    let spec = effective_fiber(&loaded, input)?;
    let set = if loaded.set.has_zero() {
        loaded
            .set
            .into_verified()
            .map_err(|report| Failure::Report(format!("{report}\n")))?
    } else {
        loaded.set
    };
    let base = Arc::new(set);
    Ok(match spec {
        Some(s) => s.view(base)?,
        None => FiberView::whole(base)?,
    })
}

fn check(input: &Input, json: bool) -> std::result::Result<String, Failure> {
    let loaded = load(&input.input)?;
    let spec = effective_fiber(&loaded, input)?;
    let mut ok = true;
    let mut text = String::new();
    let mut out = serde_json::Map::new();
    out.insert("n".into(), json!(loaded.set.n()));
    out.insert("covectors".into(), json!(loaded.set.len()));
    if loaded.set.has_zero() || spec.is_none() {
        let report = loaded.set.check_axioms();
        ok &= report.passed();
        writeln!(text, "{report}").unwrap();
        let axioms: serde_json::Map<String, serde_json::Value> = report
            .outcomes()
            .iter()
            .map(|(name, o)| (name.to_string(), json!(o.to_string())))
            .collect();
        out.insert("axioms".into(), json!(axioms));
        out.insert("axioms_pass".into(), json!(report.passed()));
    }
    if let Some(spec) = spec {
        let view = spec.view(Arc::new(loaded.set))?;
        let report = view.check();
        ok &= report.passed();
        writeln!(text, "{report}").unwrap();
        out.insert("fiber".into(), json!(format!("{report}")));
        out.insert("fiber_pass".into(), json!(report.passed()));
        out.insert("topes".into(), json!(view.topes().len()));
    }
    out.insert("pass".into(), json!(ok));
    let body = if json { pretty(&serde_json::Value::Object(out)) } else { text };
    if ok {
        Ok(body)
    } else {
        Err(Failure::Report(body))
    }
}

fn faces(fiber: &FiberView, spec: &Specialization, json: bool) -> std::result::Result<String, Failure> {
    let (target, images) = spec.images(fiber.n())?;
    let faces = varchenko::faces(fiber)?;
    let census = wiring::face_census(fiber)?;
    let entries = faces
        .iter()
        .map(|f| {
            let w = IntPolynomial::from_term(VarSpace::Hyperplanes(fiber.n()), f.weight.clone(), 1.into())
                .substitute(target, &images)?;
            Ok((f.covector.to_string(), w.to_string(), f.beta))
        })
        .collect::<Result<Vec<_>>>()?;
    if json {
        let groups: Vec<_> = census
            .groups
            .iter()
            .map(|((d, b), c)| json!({ "degree": d, "beta": b, "count": c }))
            .collect();
        let faces: Vec<_> = entries
            .iter()
            .map(|(c, w, b)| json!({ "covector": c, "weight": w, "beta": b }))
            .collect();
        return Ok(pretty(&json!({ "topes": census.topes, "faces": faces, "census": groups })));
    }
    let mut text = String::new();
    for (c, w, b) in &entries {
        writeln!(text, "{c}  weight {w}  beta {b}").unwrap();
    }
    writeln!(text, "{census}").unwrap();
    Ok(text)
}

fn verify_text(r: &varchenko::VerificationReport) -> String {
    let mut t = String::new();
    let mode = match r.mode {
        Mode::Symbolic => "symbolic",
        Mode::Randomized => "randomized",
    };
    writeln!(t, "mode: {mode}").unwrap();
    writeln!(t, "topes: {}", r.topes).unwrap();
    writeln!(t, "faces: {}", r.faces.len()).unwrap();
    writeln!(t, "formula: {}", r.formula).unwrap();
    if let Some(d) = &r.determinant {
        writeln!(t, "determinant: {d}").unwrap();
    }
    if let (Some(p), Some(b)) = (r.prime, r.degree_bound) {
        writeln!(t, "prime: {p}").unwrap();
        writeln!(t, "degree bound: {b}").unwrap();
    }
    for e in r.evals.iter().flatten() {
        writeln!(t, "eval {}: det {} formula {}", e.index, e.determinant, e.formula).unwrap();
    }
    writeln!(t, "agreement: {}", r.agreement).unwrap();
    t
}
