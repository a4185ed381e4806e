//! Serializable reports. Complex numbers are `[re, im]` pairs and matrices
//! are lists of rows.

use chern_core::extremal::ExtremalReport;
use chern_core::linalg::CMatrix;
use chern_core::spherical::MomentCheck;
use chern_core::{Complex64, PositivityCertificate, Sense, VanishingConstants};
use serde::Serialize;

pub type ComplexPair = [f64; 2];

pub fn complex(z: Complex64) -> ComplexPair {
    [z.re, z.im]
}

pub fn matrix(m: &CMatrix) -> Vec<Vec<ComplexPair>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex(m[(i, j)])).collect())
        .collect()
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Debug, Serialize)]
pub struct PointReport {
    pub value: f64,
    pub converged: bool,
    pub restart_values: Vec<f64>,
    pub base_frame: Vec<Vec<ComplexPair>>,
    pub fiber_frame: Vec<Vec<ComplexPair>>,
}

#[derive(Debug, Serialize)]
pub struct CertificateReport {
    pub kind: String,
    pub k: usize,
    pub l: usize,
    pub value: f64,
    pub positive: bool,
    pub converged: bool,
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
    pub points: Vec<PointReport>,
}

impl CertificateReport {
    pub fn new(c: &PositivityCertificate, tol: f64) -> Self {
        Self {
            kind: c.kind.name().to_string(),
            k: c.k,
            l: c.l,
            value: c.value,
            positive: c.positive,
            converged: c.converged,
            restarts: c.restarts,
            seed: c.seed,
            tol,
            points: c
                .points
                .iter()
                .map(|w| PointReport {
                    value: w.value,
                    converged: w.converged,
                    restart_values: w.restart_values.clone(),
                    base_frame: matrix(w.base.frame()),
                    fiber_frame: matrix(w.fiber.frame()),
                })
                .collect(),
        }
    }
}

/// Smallest `q` in the vanishing region for given `p` and `m`.
#[derive(Debug, Serialize)]
pub struct RegionRow {
    pub p: usize,
    pub m: usize,
    pub q_min: usize,
}

#[derive(Debug, Serialize)]
pub struct VanishingReport {
    pub k: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub mu_max: Option<f64>,
    pub mu_min: Option<f64>,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    pub region: Vec<RegionRow>,
    pub certificate: CertificateReport,
}

impl VanishingReport {
    pub fn new(v: &VanishingConstants, tol: f64, max_p: usize, max_m: usize) -> Self {
        let mut region = Vec::new();
        for p in 0..=max_p {
            for m in 0..=max_m {
                let q_min = (0..)
                    .find(|&q| chern_core::vanishing::vanishing_region(v, p, q, m))
                    .expect("the region is unbounded in q");
                region.push(RegionRow { p, m, q_min });
            }
        }
        Self {
            k: v.k,
            c: v.c,
            lambda_max: v.lambda_max,
            lambda_min: v.lambda_min,
            mu_max: v.mu_max,
            mu_min: v.mu_min,
            c1: v.c1,
            c2: v.c2,
            region,
            certificate: CertificateReport::new(&v.certificate, tol),
        }
    }

    /// Plain-text region table, one row per `p`, one column per `m`.
    pub fn region_table(&self) -> String {
        let max_m = self.region.iter().map(|r| r.m).max().unwrap_or(0);
        let mut out = String::from("q_min(p, m)  ");
        for m in 0..=max_m {
            out.push_str(&format!("m={m:<5}"));
        }
        out.push('\n');
        for row in self.region.chunks(max_m + 1) {
            out.push_str(&format!("p={:<11}", row[0].p));
            for cell in row {
                out.push_str(&format!("{:<7}", cell.q_min));
            }
            out.push('\n');
        }
        out
    }
}

fn sense_name(s: Sense) -> &'static str {
    match s {
        Sense::Min => "min",
        Sense::Max => "max",
    }
}

#[derive(Debug, Serialize)]
pub struct ExtremalJson {
    pub k: usize,
    pub mode: &'static str,
    pub s_k_value: f64,
    pub converged: bool,
    pub gradient_norm: f64,
    pub nz1_residual: Option<f64>,
    pub nz2_margin: Option<f64>,
    #[serde(rename = "D")]
    pub d: Option<f64>,
    pub chain_margin: Option<f64>,
    pub chain_holds: Option<bool>,
    pub sigma_star: Vec<Vec<ComplexPair>>,
}

impl From<&ExtremalReport> for ExtremalJson {
    fn from(r: &ExtremalReport) -> Self {
        Self {
            k: r.k,
            mode: sense_name(r.mode),
            s_k_value: r.s_k_value,
            converged: r.converged,
            gradient_norm: r.gradient_norm,
            nz1_residual: r.nz1_residual,
            nz2_margin: r.nz2_margin,
            d: r.d,
            chain_margin: r.chain_margin,
            chain_holds: r.chain_holds(),
            sigma_star: matrix(r.sigma_star.frame()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MomentRow {
    pub k: usize,
    pub indices: Vec<usize>,
    pub exact: f64,
    pub estimate: ComplexPair,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct MomentReport {
    pub k_max: usize,
    pub samples: usize,
    pub seed: u64,
    pub bands: f64,
    pub all_passed: bool,
    pub checks: Vec<MomentRow>,
}

impl MomentReport {
    pub fn new(k_max: usize, samples: usize, seed: u64, bands: f64, checks: &[MomentCheck]) -> Self {
        Self {
            k_max,
            samples,
            seed,
            bands,
            all_passed: checks.iter().all(|c| c.passed),
            checks: checks
                .iter()
                .map(|c| MomentRow {
                    k: c.k,
                    indices: c.indices.clone(),
                    exact: c.exact,
                    estimate: complex(c.estimate.value),
                    stderr_re: c.estimate.stderr_re,
                    stderr_im: c.estimate.stderr_im,
                    passed: c.passed,
                })
                .collect(),
        }
    }
}

/// Range and mean of a sampled quantity.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Summary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let (mut min, mut max, mut sum, mut count) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
        for v in values {
            min = min.min(v);
            max = max.max(v);
            sum += v;
            count += 1;
        }
        (count > 0).then(|| Self {
            min,
            max,
            mean: sum / count as f64,
        })
    }
}

#[derive(Debug, Serialize)]
pub struct KSummary {
    pub k: usize,
    pub ricci_k: Summary,
    pub scalar_k: Summary,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub n: usize,
    pub r: usize,
    pub ckl: bool,
    pub samples: usize,
    pub seed: u64,
    pub hermitian_violation: f64,
    /// Extreme eigenvalues of direction matrices over sampled unit vectors.
    pub direction_min_eigenvalue: Summary,
    pub direction_max_eigenvalue: Summary,
    pub holomorphic_sectional: Option<Summary>,
    pub chern_ricci: Option<Summary>,
    pub chern_scalar: Option<f64>,
    pub k_curvatures: Vec<KSummary>,
}
