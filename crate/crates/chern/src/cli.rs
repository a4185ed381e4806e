//! The `chern` command-line tool.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chern_core::extremal;
use chern_core::functionals::{chern_ricci, chern_scalar, contract_base, holo_sectional, ricci_k, scalar_k};
use chern_core::linalg::{self, HermitianEigen};
use chern_core::tensor::check_hermitian;
use chern_core::{grassmann, rng, spherical, vanishing, CurvatureTensor, OptimizerOptions, PositivityKind, Sense, Subspace};

use crate::report::{self, AnalyzeReport, CertificateReport, ExtremalJson, KSummary, MomentReport, Summary, VanishingReport};
use crate::{format, model, Error};

#[derive(Debug, Parser)]
#[command(name = "chern", version, about = "Pointwise Chern curvature: functionals, positivity certificates, vanishing constants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sampled summaries of H, Ric, S, Ric_k and S_k.
    Analyze {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "1e5", value_parser = parse_count)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Certify a (k, l) positivity notion over one or more points.
    Certify {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_parser = parse_kind)]
        kind: PositivityKind,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[command(flatten)]
        opt: Optimizer,
        #[command(flatten)]
        out: Output,
    },
    /// Vanishing-theorem constants and the (p, q, m) region.
    Vanishing {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        k: usize,
        /// Auxiliary bundle F, as a model spec.
        #[arg(long, value_name = "SPEC")]
        aux_model: Option<String>,
        /// Auxiliary bundle F, as a tensor file.
        #[arg(long, value_name = "FILE")]
        aux_input: Option<PathBuf>,
        /// Auxiliary bundle F at each point, aligned with --points.
        #[arg(long, value_name = "FILES", value_delimiter = ',')]
        aux_points: Vec<PathBuf>,
        #[arg(long, default_value_t = 3)]
        max_p: usize,
        #[arg(long, default_value_t = 2)]
        max_m: usize,
        /// Also print the region as a text table on stderr.
        #[arg(long)]
        table: bool,
        #[command(flatten)]
        opt: Optimizer,
        #[command(flatten)]
        out: Output,
    },
    /// S_k-extremal subspace and critical-point checks.
    Extremal {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Mode::Min)]
        mode: Mode,
        /// Also check the lower bound derived from min Ric_k.
        #[arg(long)]
        chain: bool,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[command(flatten)]
        opt: Optimizer,
        #[command(flatten)]
        out: Output,
    },
    /// Monte Carlo check of the spherical moment identities.
    VerifyIdentities {
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        #[arg(long, default_value = "1e5", value_parser = parse_count)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4.0)]
        bands: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Write a model tensor in the tensor file format.
    Gen {
        #[arg(long, value_name = "SPEC")]
        model: String,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Min,
    Max,
}

impl From<Mode> for Sense {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Min => Sense::Min,
            Mode::Max => Sense::Max,
        }
    }
}

/// Where the curvature tensors come from. Exactly one must be given.
#[derive(Debug, Args)]
pub struct Source {
    /// Tensor file.
    #[arg(value_name = "FILE")]
    pub file: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    #[arg(long, value_name = "SPEC")]
    pub model: Option<String>,
    /// Tensor files, one per point; values are minimized over points.
    #[arg(long, value_name = "FILES", value_delimiter = ',')]
    pub points: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Optimizer {
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

impl Optimizer {
    fn options(&self) -> Result<OptimizerOptions, Error> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Usage(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.restarts == 0 {
            return Err(Error::Usage("--restarts must be at least 1".into()));
        }
        Ok(OptimizerOptions {
            restarts: self.restarts,
            tol: self.tol,
            seed: self.seed,
            ..OptimizerOptions::default()
        })
    }
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the result here instead of stdout.
    #[arg(short = 'o', long = "output", value_name = "FILE")]
    pub output: Option<PathBuf>,
}

/// Accepts plain integers and integral scientific notation such as `1e5`.
fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(v) = s.parse::<usize>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("not a count: `{s}`"))?;
    if f >= 0.0 && f.fract() == 0.0 && f <= usize::MAX as f64 {
        Ok(f as usize)
    } else {
        Err(format!("not a count: `{s}`"))
    }
}

fn parse_kind(s: &str) -> Result<PositivityKind, String> {
    s.parse().map_err(|e: chern_core::Error| e.to_string())
}

fn load_points(source: &Source) -> Result<Vec<CurvatureTensor>, Error> {
    let given = [source.file.is_some(), source.input.is_some(), source.model.is_some(), !source.points.is_empty()]
        .iter()
        .filter(|b| **b)
        .count();
    if given != 1 {
        return Err(Error::Usage(
            "give exactly one of FILE, --input, --model or --points".into(),
        ));
    }
    if let Some(spec) = &source.model {
        return Ok(vec![model::parse_model(spec)?]);
    }
    if let Some(path) = source.file.as_ref().or(source.input.as_ref()) {
        return Ok(vec![format::read_tensor(path)?]);
    }
    source.points.iter().map(|p| format::read_tensor(p)).collect()
}

fn single(points: Vec<CurvatureTensor>, what: &str) -> Result<CurvatureTensor, Error> {
    let mut it = points.into_iter();
    match (it.next(), it.next()) {
        (Some(t), None) => Ok(t),
        _ => Err(Error::Usage(format!("{what} works on a single point"))),
    }
}

fn load_aux(
    model_spec: &Option<String>,
    input: &Option<PathBuf>,
    points: &[PathBuf],
    count: usize,
) -> Result<Option<Vec<CurvatureTensor>>, Error> {
    let given = [model_spec.is_some(), input.is_some(), !points.is_empty()].iter().filter(|b| **b).count();
    if given > 1 {
        return Err(Error::Usage("give at most one of --aux-model, --aux-input, --aux-points".into()));
    }
    let single = if let Some(spec) = model_spec {
        Some(model::parse_model(spec)?)
    } else if let Some(path) = input {
        Some(format::read_tensor(path)?)
    } else {
        None
    };
    if let Some(t) = single {
        // One auxiliary tensor stands for every point.
        return Ok(Some(vec![t; count]));
    }
    if points.is_empty() {
        return Ok(None);
    }
    Ok(Some(points.iter().map(|p| format::read_tensor(p)).collect::<Result<_, _>>()?))
}

fn analyze(t: &CurvatureTensor, samples: usize, seed: u64) -> Result<AnalyzeReport, Error> {
    let n = t.n();
    let samples = samples.max(1);
    let mut r = rng::stream(seed, 0);
    let mut lo = Vec::with_capacity(samples);
    let mut hi = Vec::with_capacity(samples);
    let mut h = Vec::new();
    let mut ric = Vec::new();
    let tangent = t.is_tangent_shaped();
    for _ in 0..samples {
        let x = rng::unit_sphere_vector(&mut r, n);
        let eig = HermitianEigen::new(&linalg::hermitian_part(&contract_base(t, &linalg::outer(&x))));
        lo.push(eig.min());
        hi.push(eig.max());
        if tangent {
            h.push(holo_sectional(t, &x)?);
            ric.push(chern_ricci(t, &x)?);
        }
    }
    let mut k_curvatures = Vec::new();
    if tangent {
        for k in 1..=n {
            let mut r = rng::stream(seed, k as u64);
            let mut rk = Vec::with_capacity(samples);
            let mut sk = Vec::with_capacity(samples);
            for _ in 0..samples {
                let sigma = Subspace::random(n, k, &mut r);
                let x = sigma.random_unit_vector(&mut r);
                rk.push(ricci_k(t, &sigma, &x)?);
                sk.push(scalar_k(t, &sigma)?);
            }
            k_curvatures.push(KSummary {
                k,
                ricci_k: Summary::of(rk).expect("nonempty"),
                scalar_k: Summary::of(sk).expect("nonempty"),
            });
        }
    }
    Ok(AnalyzeReport {
        n,
        r: t.r(),
        ckl: t.ckl(),
        samples,
        seed,
        hermitian_violation: check_hermitian(t, 0.0).max_violation,
        direction_min_eigenvalue: Summary::of(lo).expect("nonempty"),
        direction_max_eigenvalue: Summary::of(hi).expect("nonempty"),
        holomorphic_sectional: Summary::of(h),
        chern_ricci: Summary::of(ric),
        chern_scalar: if tangent { Some(chern_scalar(t)?) } else { None },
        k_curvatures,
    })
}

/// Output of a successful run.
pub struct Outcome {
    pub text: String,
    /// Extra human-readable lines for stderr.
    pub notes: String,
}

pub fn execute(cli: &Cli) -> Result<Outcome, Error> {
    let mut notes = String::new();
    let text = match &cli.command {
        Command::Analyze { source, samples, seed, .. } => {
            let t = single(load_points(source)?, "analyze")?;
            report::to_json(&analyze(&t, *samples, *seed)?)
        }
        Command::Certify { source, kind, k, l, opt, .. } => {
            let points = load_points(source)?;
            let opts = opt.options()?;
            let cert = grassmann::certify(&points, *kind, *k, *l, &opts)?;
            report::to_json(&CertificateReport::new(&cert, opts.tol))
        }
        Command::Vanishing {
            source,
            k,
            aux_model,
            aux_input,
            aux_points,
            max_p,
            max_m,
            table,
            opt,
            ..
        } => {
            let points = load_points(source)?;
            let aux = load_aux(aux_model, aux_input, aux_points, points.len())?;
            let opts = opt.options()?;
            let consts = vanishing::compute_constants(&points, aux.as_deref(), *k, &opts)?;
            let rep = VanishingReport::new(&consts, opts.tol, *max_p, *max_m);
            if *table {
                notes = rep.region_table();
            }
            report::to_json(&rep)
        }
        Command::Extremal {
            source,
            k,
            mode,
            chain,
            trials,
            opt,
            ..
        } => {
            let t = single(load_points(source)?, "extremal")?;
            let opts = opt.options()?;
            let rep = if *chain {
                extremal::verify_uniform_from_rick(&t, *k, (*mode).into(), &opts, *trials)?
            } else {
                extremal::analyze_extremal(&t, *k, (*mode).into(), &opts, *trials)?
            };
            report::to_json(&ExtremalJson::from(&rep))
        }
        Command::VerifyIdentities {
            k_max,
            samples,
            seed,
            bands,
            ..
        } => {
            let checks = spherical::moment_suite(*k_max, *samples, *seed, *bands)?;
            report::to_json(&MomentReport::new(*k_max, *samples, *seed, *bands, &checks))
        }
        Command::Gen { model: spec, .. } => format::write_tensor(&model::parse_model(spec)?),
    };
    Ok(Outcome { text, notes })
}

fn output_path(cli: &Cli) -> Option<&Path> {
    let out = match &cli.command {
        Command::Analyze { out, .. }
        | Command::Certify { out, .. }
        | Command::Vanishing { out, .. }
        | Command::Extremal { out, .. }
        | Command::VerifyIdentities { out, .. }
        | Command::Gen { out, .. } => out,
    };
    out.output.as_deref()
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<(), Error> {
    if !outcome.notes.is_empty() {
        eprint!("{}", outcome.notes);
    }
    match output_path(cli) {
        Some(path) => std::fs::write(path, &outcome.text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(outcome.text.as_bytes())
            .map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli).and_then(|o| emit(&cli, &o)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
