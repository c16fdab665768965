//! The `quiverdm` command line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or the input
//! lies outside the category a command needs, 2 for unreadable files,
//! malformed documents and bad arguments.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::functors::{compare_reps, functor_g, functor_q};
use crate::io::{IoError, RepDocument};
use crate::quiver::{dualize, generate_with, validate, Category, GenOptions, QuiverError, VertexId, DEFAULT_TOL, MAX_N};
use crate::report::ValidationReport;
use crate::solutions::{
    unit_row, verify_alg, verify_can, verify_main_theorem, verify_pde, verify_var, verify_var_invertible,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Largest vertex dimension `gen` will produce.
pub const MAX_GEN_DIM: usize = 1024;

#[derive(Parser, Debug)]
#[command(name = "quiverdm", version, about = "Hypercube quiver representations: validation, functors and solution checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the relations and category conditions of a representation.
    Validate {
        path: PathBuf,
        #[arg(long, default_value = "qui")]
        category: Category,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Apply Q, G or D and write the image.
    Apply {
        path: PathBuf,
        #[arg(long)]
        functor: FunctorName,
        /// Output file; the document goes to stdout and the report to
        /// stderr when omitted.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        /// Tolerance for the round trip back to the input.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Run a verification suite on a Sigma1 representation.
    Verify {
        path: PathBuf,
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Generate a random representation.
    Gen {
        #[arg(long)]
        n: usize,
        /// Factor dimension, or a comma-separated list with one entry per
        /// slot; vertex dimensions are their products.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        dim: Vec<usize>,
        #[arg(long, default_value = "sigma1")]
        category: Category,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sigma1 only: nilpotent `y∘u` on every edge.
        #[arg(long)]
        nilpotent: bool,
        /// Skip the random change of basis.
        #[arg(long)]
        no_conjugate: bool,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FunctorName {
    #[value(name = "Q", alias = "q")]
    Q,
    #[value(name = "G", alias = "g")]
    G,
    #[value(name = "D", alias = "d")]
    D,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Pde,
    Canvar,
    Main,
}

enum Failure {
    Input(String),
    Semantic(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Input(e.to_string())
    }
}

struct Streams<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Streams<'_> {
    /// Reports share stdout with nothing when the document went to a file.
    fn report_stream(&mut self, document_in_file: bool) -> &mut dyn Write {
        if document_in_file {
            &mut *self.out
        } else {
            &mut *self.err
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return if code == 0 { EXIT_PASS } else { EXIT_INPUT };
        }
    };
    let mut io = Streams { out, err };
    let result = match cli.command {
        Command::Validate { path, category, tol } => cmd_validate(&path, category, tol, &mut io),
        Command::Apply {
            path,
            functor,
            output,
            tol,
        } => cmd_apply(&path, functor, output.as_deref(), tol, &mut io),
        Command::Verify {
            path,
            suite,
            samples,
            seed,
            tol,
        } => cmd_verify(&path, suite, samples, seed, tol, &mut io),
        Command::Gen {
            n,
            dim,
            category,
            seed,
            nilpotent,
            no_conjugate,
            output,
        } => cmd_gen(n, &dim, category, seed, nilpotent, !no_conjugate, output.as_deref(), &mut io),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(io.err, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Semantic(msg)) => {
            let _ = writeln!(io.err, "error: {msg}");
            EXIT_FAIL
        }
    }
}

/// Human text, a blank line, then the report as pretty-printed JSON.
pub fn render_report(report: &ValidationReport) -> String {
    let json = serde_json::to_string_pretty(&report.to_json()).expect("report serializes");
    format!("{}\n{json}\n", report.to_text())
}

fn emit(w: &mut dyn Write, report: &ValidationReport) -> i32 {
    let _ = w.write_all(render_report(report).as_bytes());
    if report.passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn cmd_validate(path: &Path, category: Category, tol: f64, io: &mut Streams) -> Result<i32, Failure> {
    let doc = RepDocument::read(path)?;
    Ok(emit(io.out, &validate(&doc.rep, category, tol)))
}

fn cmd_apply(path: &Path, functor: FunctorName, output: Option<&Path>, tol: f64, io: &mut Streams) -> Result<i32, Failure> {
    let doc = RepDocument::read(path)?;
    let rep = &doc.rep;
    let (source, target) = match functor {
        FunctorName::Q => (Category::Sigma1, Category::C),
        FunctorName::G => (Category::C, Category::Sigma1),
        FunctorName::D => (Category::Qui, Category::Qui),
    };
    let pre = validate(rep, source, DEFAULT_TOL);
    if !pre.passed() {
        let mut report = ValidationReport::new(format!("apply {functor:?}: input is not in {source}"), tol);
        report.merge(pre, "input");
        return Ok(emit(io.report_stream(output.is_some()), &report));
    }
    let semantic = |e: crate::functors::FunctorError| Failure::Semantic(e.to_string());
    let (image, back) = match functor {
        FunctorName::Q => {
            let image = functor_q(rep).map_err(semantic)?;
            let back = functor_g(&image).map_err(semantic)?;
            (image, back)
        }
        FunctorName::G => {
            let image = functor_g(rep).map_err(semantic)?;
            let back = functor_q(&image).map_err(semantic)?;
            (image, back)
        }
        FunctorName::D => {
            let image = dualize(rep);
            let back = dualize(&image);
            (image, back)
        }
    };
    let mut report = ValidationReport::new(format!("apply {functor:?}"), tol);
    report.merge(validate(&image, target, DEFAULT_TOL), "image");
    compare_reps(&mut report, "roundtrip", &back, rep, tol);
    let out_doc = RepDocument {
        rep: image,
        metadata: doc.metadata.clone(),
    };
    match output {
        Some(p) => out_doc.write(p)?,
        None => {
            let _ = io.out.write_all(out_doc.to_json_string()?.as_bytes());
        }
    }
    Ok(emit(io.report_stream(output.is_some()), &report))
}

fn basis_checks(
    report: &mut ValidationReport,
    dim: usize,
    label: &str,
    mut f: impl FnMut(&crate::matrix::CMat) -> Result<ValidationReport, crate::solutions::SolutionError>,
) -> Result<(), Failure> {
    for k in 0..dim {
        let sub = f(&unit_row(dim, k)).map_err(|e| Failure::Semantic(format!("{label}: {e}")))?;
        report.merge(sub, &format!("alpha {k}:"));
    }
    Ok(())
}

fn cmd_verify(path: &Path, suite: Suite, samples: usize, seed: u64, tol: f64, io: &mut Streams) -> Result<i32, Failure> {
    let doc = RepDocument::read(path)?;
    let rep = &doc.rep;
    let title = format!("verify {}", suite_name(suite));
    let mut report = ValidationReport::new(title, tol).with_seed(seed);
    let pre = validate(rep, Category::Sigma1, DEFAULT_TOL);
    if !pre.passed() {
        report.merge(pre, "input");
        report.title.push_str(": input is not in sigma1");
        return Ok(emit(io.out, &report));
    }
    match suite {
        Suite::Pde => {
            for v in VertexId::all(rep.n()) {
                let d = rep.dim(v);
                basis_checks(&mut report, d, &format!("I={v}"), |a| verify_pde(rep, v, a, samples, seed, tol))?;
                basis_checks(&mut report, d, &format!("I={v}"), |a| verify_alg(rep, v, a, samples, seed, tol))?;
            }
        }
        Suite::Canvar => {
            for (e, _) in rep.edges() {
                let (v, i) = (e.from, e.dir);
                let label = format!("edge {e}");
                basis_checks(&mut report, rep.dim(v), &label, |a| verify_can(rep, v, i, a, samples, seed, tol))?;
                basis_checks(&mut report, rep.dim(e.to()), &label, |a| {
                    verify_var(rep, v, i, a, samples, seed, tol)
                })?;
                let a = rep
                    .calb(e.to(), v)
                    .expect("adjacent vertices")
                    .add_identity(-crate::matrix::ONE);
                let sub = verify_var_invertible(&a, samples, seed, tol)
                    .map_err(|err| Failure::Semantic(format!("{label}: {err}")))?;
                report.merge(sub, &label);
            }
        }
        Suite::Main => {
            let sub = verify_main_theorem(rep, samples, seed, tol).map_err(|e| Failure::Semantic(e.to_string()))?;
            report.merge(sub, "");
        }
    }
    Ok(emit(io.out, &report))
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Pde => "pde",
        Suite::Canvar => "canvar",
        Suite::Main => "main",
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    n: usize,
    dims: &[usize],
    category: Category,
    seed: u64,
    nilpotent: bool,
    conjugate: bool,
    output: Option<&Path>,
    io: &mut Streams,
) -> Result<i32, Failure> {
    if n == 0 || n > MAX_N {
        return Err(Failure::Input(format!("--n must lie in 1..={MAX_N}, got {n}")));
    }
    if !(dims.len() == 1 || dims.len() == n) {
        return Err(Failure::Input(format!("--dim takes 1 or {n} values, got {}", dims.len())));
    }
    if nilpotent && category != Category::Sigma1 {
        return Err(Failure::Input("--nilpotent requires --category sigma1".into()));
    }
    let per_slot: Vec<usize> = (0..n).map(|k| if dims.len() == 1 { dims[0] } else { dims[k] }).collect();
    let total = per_slot.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d).filter(|&t| t <= MAX_GEN_DIM));
    if total.is_none() {
        return Err(Failure::Input(format!("vertex dimension would exceed {MAX_GEN_DIM}")));
    }
    let mut opts = GenOptions::new(n, &per_slot, category, seed);
    opts.nilpotent = nilpotent;
    opts.conjugate = conjugate;
    let rep = generate_with(&opts).map_err(|e: QuiverError| Failure::Semantic(e.to_string()))?;
    let mut doc = RepDocument::new(rep);
    doc.metadata.insert("category".into(), Value::from(category.to_string()));
    doc.metadata.insert("conjugate".into(), Value::from(conjugate));
    doc.metadata.insert("dims".into(), Value::from(per_slot));
    doc.metadata.insert("nilpotent".into(), Value::from(nilpotent));
    doc.metadata.insert("seed".into(), Value::from(seed));
    let mut report = ValidationReport::new(format!("gen {category}"), DEFAULT_TOL).with_seed(seed);
    report.merge(validate(&doc.rep, category, DEFAULT_TOL), "");
    match output {
        Some(p) => doc.write(p)?,
        None => {
            let _ = io.out.write_all(doc.to_json_string()?.as_bytes());
        }
    }
    Ok(emit(io.report_stream(output.is_some()), &report))
}
