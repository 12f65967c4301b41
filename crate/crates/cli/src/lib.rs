//! Argument parsing, dispatch and report types for the `fspec` binary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use fractal_spectra::analysis::{
    classify_system, gram_matrix, measure_class_membership, sigma_profile, GramReport,
    MembershipEvidence, SigmaProfile, SystemReport,
};
use fractal_spectra::boundary::{boundary_evaluate, parseval_check, BoundaryValue, GammaPolynomial, ParsevalReport};
use fractal_spectra::complement::{
    decompose, dual_spectra_sets, enumerate_complementing_pairs, is_complementing,
    Decomposition, DualSets,
};
use fractal_spectra::cycles::{extreme_cycles, is_spectral_pair, ExtremeCycle, SpectralVerdict};
use fractal_spectra::hadamard::{HadamardTriple, HadamardVerdict, DEFAULT_TOL};
use fractal_spectra::ifs::AffineIfs;
use fractal_spectra::kernel::{
    default_degree, default_depth, factorization_residual, gamma_kernel_product,
    gamma_kernel_series, szego_classical, KernelQuery,
};
use fractal_spectra::numeric::BoundedComplex;
use fractal_spectra::spectrum::SpectrumSpec;
use fractal_spectra::Error;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fspec", version, about = "Spectra, Hadamard triples and Szegő kernels of affine fractal measures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// `json` or `csv` on stdout, or a file path whose extension picks the format.
    #[arg(long, global = true, default_value = "json")]
    pub out: String,

    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fourier transform of the invariant measure.
    Muhat(MuhatArgs),
    /// Hadamard verdict for (R, B, L).
    Hadamard(TripleArgs),
    /// Check a complementing pair, or list all pairs for R.
    Complementing(PairArgs),
    /// Dual digit sets (L, L') of a complementing pair.
    Dual(PairArgs),
    /// Extreme cycles of (R, B, L).
    Cycles(TripleArgs),
    /// Spectrality of Gamma(L) for mu_B.
    Spectral(TripleArgs),
    /// Enumerate the truncated spectrum Gamma_n(L).
    Spectrum(SpectrumArgs),
    /// sigma_Gamma lower estimates on a grid.
    Sigma(SigmaArgs),
    /// Gram matrix of the exponentials over Gamma_n.
    Gram(SystemArgs),
    /// Orthogonality, completeness evidence and Riesz bounds.
    Classify(SigmaArgs),
    /// Gamma-Szegő kernel by series and by product.
    Kernel(KernelArgs),
    /// Residual of G_L G_L' = k for a complementing pair.
    Factorize(FactorizeArgs),
    /// Reconstruct f(z) from boundary data by quadrature.
    Boundary(BoundaryArgs),
    /// Compare the H2 norm with the L2(mu) norm of the boundary trace.
    Parseval(ParsevalArgs),
    /// Certify every dual pair for a range of scales.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct IfsArgs {
    /// JSON file `{"R": ..., "B": [...]}`.
    #[arg(long)]
    pub ifs: Option<PathBuf>,
    #[arg(long = "R")]
    pub r: Option<i64>,
    #[arg(long = "B", value_delimiter = ',', allow_hyphen_values = true)]
    pub b: Option<Vec<i64>>,
}

#[derive(Debug, Args)]
pub struct MuhatArgs {
    #[command(flatten)]
    pub ifs: IfsArgs,
    /// Comma-separated frequencies.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Option<Vec<f64>>,
    /// `a:b:step`, endpoints included within half a step.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct TripleArgs {
    #[arg(long = "R")]
    pub r: i64,
    #[arg(long = "B", value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub b: Vec<i64>,
    #[arg(long = "L", value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub l: Vec<i64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long = "R")]
    pub r: i64,
    #[arg(long = "A", value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Option<Vec<i64>>,
    #[arg(long = "Ap", value_delimiter = ',', allow_hyphen_values = true)]
    pub a_prime: Option<Vec<i64>>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long = "R")]
    pub r: i64,
    #[arg(long = "L", value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub l: Vec<i64>,
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    #[command(flatten)]
    pub ifs: IfsArgs,
    #[arg(long = "L", value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub l: Vec<i64>,
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
}

#[derive(Debug, Args)]
pub struct SigmaArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Bessel constant for the membership evidence (classify only).
    #[arg(long = "bessel", default_value_t = 1.0)]
    pub bessel: f64,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long = "R")]
    pub r: i64,
    #[arg(long = "L", value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub l: Vec<i64>,
    /// Complex point, e.g. `0.5+0.2i`.
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub x: f64,
    /// Radius cap; defaults to `|z|`.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long)]
    pub depth: Option<u32>,
}

#[derive(Debug, Args)]
pub struct FactorizeArgs {
    #[arg(long = "R")]
    pub r: i64,
    #[arg(long = "A", value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub a: Vec<i64>,
    #[arg(long = "Ap", value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub a_prime: Vec<i64>,
    /// Single query point; otherwise `--samples` random points are drawn.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub x: f64,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.9)]
    pub radius: f64,
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long)]
    pub depth: Option<u32>,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Coefficients `gamma:c,...` with complex `c`.
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, default_value_t = 12)]
    pub level: u32,
}

#[derive(Debug, Args)]
pub struct ParsevalArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
    #[arg(long, default_value_t = 12)]
    pub level: u32,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 2)]
    pub from: i64,
    #[arg(long, default_value_t = 16)]
    pub to: i64,
    /// Random kernel queries per pair.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.9)]
    pub radius: f64,
}

/// A failure mapped to an exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ToleranceUnreachable { .. } | Error::UndecidableZero | Error::NotSpectral(_) => {
                EXIT_FALSE
            }
            _ => EXIT_INVALID,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Plain rows for CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// Shortest round-trip decimal form.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_list(v: &[i64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

impl Table {
    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// Serialized report plus the verdict used for the exit code.
pub struct Report {
    pub json: serde_json::Value,
    pub table: Option<Table>,
    pub ok: bool,
}

impl Report {
    fn new<T: Serialize>(value: &T, table: Option<Table>, ok: bool) -> CliResult<Self> {
        let json = serde_json::to_value(value).map_err(|e| Failure::invalid(e.to_string()))?;
        Ok(Self { json, table, ok })
    }

    /// Falls back to `field,value` rows for reports without a natural table.
    fn csv(&self) -> String {
        if let Some(t) = &self.table {
            return t.render();
        }
        let mut s = String::from("field,value\n");
        if let serde_json::Value::Object(map) = &self.json {
            for (k, v) in map {
                let cell = match v {
                    serde_json::Value::String(x) => x.clone(),
                    other => other.to_string().replace(',', " "),
                };
                let _ = writeln!(s, "{k},{cell}");
            }
        }
        s
    }

    pub fn render(&self, csv: bool) -> String {
        if csv {
            self.csv()
        } else {
            let mut s = serde_json::to_string_pretty(&self.json).expect("serializable");
            s.push('\n');
            s
        }
    }
}

/// Where and how to write the report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutTarget {
    Stdout { csv: bool },
    File { path: PathBuf, csv: bool },
}

pub fn parse_out(out: &str) -> CliResult<OutTarget> {
    match out {
        "json" => Ok(OutTarget::Stdout { csv: false }),
        "csv" => Ok(OutTarget::Stdout { csv: true }),
        path => {
            let ext = Path::new(path).extension().and_then(|e| e.to_str());
            match ext {
                Some("json") => Ok(OutTarget::File {
                    path: path.into(),
                    csv: false,
                }),
                Some("csv") => Ok(OutTarget::File {
                    path: path.into(),
                    csv: true,
                }),
                _ => Err(Failure::invalid(format!(
                    "--out must be json, csv, or a .json/.csv path, got {path:?}"
                ))),
            }
        }
    }
}

/// `a:b:step`, inclusive of `b` within half a step.
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Failure::invalid(format!("grid must be a:b:step, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let (a, b, step) = (nums[0], nums[1], nums[2]);
    if !(a.is_finite() && b.is_finite() && step.is_finite() && step > 0.0 && b >= a) {
        return Err(bad());
    }
    let count = ((b - a) / step + 0.5).floor() as u64 + 1;
    if count > 10_000_000 {
        return Err(Failure::invalid("grid has more than 10^7 points"));
    }
    Ok((0..count).map(|k| a + k as f64 * step).collect())
}

pub fn parse_complex(s: &str) -> CliResult<Complex64> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    Complex64::from_str(&cleaned).map_err(|_| Failure::invalid(format!("cannot parse complex number {s:?}")))
}

/// `gamma:c,gamma:c,...`.
pub fn parse_poly(s: &str) -> CliResult<GammaPolynomial> {
    let terms = s
        .split(',')
        .map(|item| {
            let (g, c) = item
                .split_once(':')
                .ok_or_else(|| Failure::invalid(format!("expected gamma:c, got {item:?}")))?;
            let g = g
                .trim()
                .parse::<i64>()
                .map_err(|_| Failure::invalid(format!("bad frequency {g:?}")))?;
            Ok((g, parse_complex(c)?))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(GammaPolynomial::new(terms)?)
}

fn load_ifs(args: &IfsArgs) -> CliResult<AffineIfs> {
    match (&args.ifs, args.r, &args.b) {
        (Some(path), None, None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
        }
        (Some(_), _, _) => Err(Failure::invalid("--ifs conflicts with --R/--B")),
        (None, Some(r), Some(b)) => Ok(AffineIfs::new(r, b.clone())?),
        (None, _, _) => Err(Failure::invalid("give --ifs or both --R and --B")),
    }
}

fn check_tol(tol: f64) -> CliResult<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Failure::invalid(format!("--tol must be positive, got {tol}")))
    }
}

fn check_radius(radius: f64) -> CliResult<()> {
    if (0.0..1.0).contains(&radius) {
        Ok(())
    } else {
        Err(Failure::invalid(format!("--radius must lie in [0, 1), got {radius}")))
    }
}

fn frequencies(t: &Option<Vec<f64>>, grid: &Option<String>) -> CliResult<Vec<f64>> {
    match (t, grid) {
        (Some(_), Some(_)) => Err(Failure::invalid("--t conflicts with --grid")),
        (Some(t), None) => Ok(t.clone()),
        (None, Some(g)) => parse_grid(g),
        (None, None) => Err(Failure::invalid("give --t or --grid")),
    }
}

fn system(args: &SystemArgs) -> CliResult<(AffineIfs, SpectrumSpec)> {
    let ifs = load_ifs(&args.ifs)?;
    let spec = SpectrumSpec::new(ifs.scale(), args.l.clone(), args.degree)?;
    Ok((ifs, spec))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuhatRow {
    pub t: f64,
    pub value: BoundedComplex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuhatReport {
    #[serde(rename = "R")]
    pub r: i64,
    #[serde(rename = "B")]
    pub b: Vec<i64>,
    pub tol: f64,
    pub values: Vec<MuhatRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplementingReport {
    #[serde(rename = "R")]
    pub r: i64,
    #[serde(rename = "A")]
    pub a: Vec<i64>,
    #[serde(rename = "Ap")]
    pub a_prime: Vec<i64>,
    pub complementing: bool,
    pub decomposition: Option<Decomposition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairList {
    #[serde(rename = "R")]
    pub r: i64,
    pub pairs: Vec<(Vec<i64>, Vec<i64>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyclesReport {
    #[serde(rename = "R")]
    pub r: i64,
    #[serde(rename = "B")]
    pub b: Vec<i64>,
    #[serde(rename = "L")]
    pub l: Vec<i64>,
    pub cycles: Vec<ExtremeCycle>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    #[serde(rename = "R")]
    pub r: i64,
    #[serde(rename = "B")]
    pub b: Vec<i64>,
    #[serde(rename = "L")]
    pub l: Vec<i64>,
    #[serde(flatten)]
    pub verdict: SpectralVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    #[serde(rename = "R")]
    pub r: i64,
    #[serde(rename = "L")]
    pub l: Vec<i64>,
    pub degree: u32,
    pub cardinality: u64,
    pub max_element: i64,
    pub first_omitted: Option<f64>,
    pub self_affine: bool,
    pub gamma: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    #[serde(flatten)]
    pub system: SystemReport,
    pub membership: MembershipEvidence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    #[serde(rename = "R")]
    pub r: i64,
    #[serde(rename = "L")]
    pub l: Vec<i64>,
    pub query: KernelQuery,
    pub degree: u32,
    pub depth: u32,
    pub series: BoundedComplex,
    pub product: BoundedComplex,
    pub classical: Complex64,
    /// `|series - product| <= series.bound + product.bound`.
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizeRow {
    pub re_z: f64,
    pub im_z: f64,
    pub x: f64,
    pub residual: f64,
    pub bound: f64,
    pub product_residual: f64,
    pub product_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizeReport {
    #[serde(rename = "R")]
    pub r: i64,
    #[serde(rename = "A")]
    pub a: Vec<i64>,
    #[serde(rename = "Ap")]
    pub a_prime: Vec<i64>,
    #[serde(rename = "L")]
    pub l: Vec<i64>,
    #[serde(rename = "Lp")]
    pub l_prime: Vec<i64>,
    pub degree: u32,
    pub depth: u32,
    pub rows: Vec<FactorizeRow>,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    #[serde(flatten)]
    pub value: BoundaryValue,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "R")]
    pub r: i64,
    #[serde(rename = "A")]
    pub a: Vec<i64>,
    #[serde(rename = "Ap")]
    pub a_prime: Vec<i64>,
    #[serde(rename = "L")]
    pub l: Vec<i64>,
    #[serde(rename = "Lp")]
    pub l_prime: Vec<i64>,
    pub certificate: bool,
    pub cycle_free: bool,
    pub max_residual: f64,
    pub max_bound: f64,
    pub kernel_certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub from: i64,
    pub to: i64,
    pub samples: usize,
    pub radius: f64,
    pub rows: Vec<SweepRow>,
    pub all_passed: bool,
}

fn disk_point(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
}

fn run_muhat(args: &MuhatArgs) -> CliResult<Report> {
    check_tol(args.tol)?;
    let ifs = load_ifs(&args.ifs)?;
    let ts = frequencies(&args.t, &args.grid)?;
    let values = ts
        .iter()
        .map(|&t| Ok(MuhatRow { t, value: ifs.mu_hat(t, args.tol)? }))
        .collect::<CliResult<Vec<_>>>()?;
    let table = Table {
        header: vec!["t", "re", "im", "bound"],
        rows: values
            .iter()
            .map(|v| {
                vec![
                    fmt_f64(v.t),
                    fmt_f64(v.value.value.re),
                    fmt_f64(v.value.value.im),
                    fmt_f64(v.value.bound),
                ]
            })
            .collect(),
    };
    let report = MuhatReport {
        r: ifs.scale(),
        b: ifs.digits().to_vec(),
        tol: args.tol,
        values,
    };
    Report::new(&report, Some(table), true)
}

fn run_hadamard(args: &TripleArgs) -> CliResult<Report> {
    check_tol(args.tol)?;
    let v: HadamardVerdict =
        HadamardTriple::new(args.r, args.b.clone(), args.l.clone())?.is_hadamard(args.tol)?;
    let ok = v.hadamard;
    Report::new(&v, None, ok)
}

fn run_complementing(args: &PairArgs) -> CliResult<Report> {
    match (&args.a, &args.a_prime) {
        (Some(a), Some(ap)) => {
            let complementing = is_complementing(a, ap, args.r);
            let decomposition = if complementing {
                Some(decompose(a, ap, args.r)?)
            } else {
                None
            };
            let report = ComplementingReport {
                r: args.r,
                a: a.clone(),
                a_prime: ap.clone(),
                complementing,
                decomposition,
            };
            Report::new(&report, None, complementing)
        }
        (None, None) => {
            if !(1..=64).contains(&args.r) {
                return Err(Failure::invalid("enumeration needs 1 <= R <= 64"));
            }
            let pairs = enumerate_complementing_pairs(args.r);
            let table = Table {
                header: vec!["A", "Ap"],
                rows: pairs.iter().map(|(a, b)| vec![fmt_list(a), fmt_list(b)]).collect(),
            };
            Report::new(&PairList { r: args.r, pairs }, Some(table), true)
        }
        _ => Err(Failure::invalid("give both --A and --Ap, or neither")),
    }
}

fn run_dual(args: &PairArgs) -> CliResult<Report> {
    let (Some(a), Some(ap)) = (&args.a, &args.a_prime) else {
        return Err(Failure::invalid("dual needs --A and --Ap"));
    };
    let d: DualSets = dual_spectra_sets(a, ap, args.r)?;
    let ok = d.certificate.all_passed();
    Report::new(&d, None, ok)
}

fn run_cycles(args: &TripleArgs) -> CliResult<Report> {
    let cycles = extreme_cycles(args.r, &args.b, &args.l)?;
    let table = Table {
        header: vec!["points", "digits", "trivial"],
        rows: cycles
            .iter()
            .map(|c| {
                vec![
                    c.points.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "),
                    fmt_list(&c.digits),
                    c.trivial.to_string(),
                ]
            })
            .collect(),
    };
    let report = CyclesReport {
        r: args.r,
        b: args.b.clone(),
        l: args.l.clone(),
        cycles,
    };
    Report::new(&report, Some(table), true)
}

fn run_spectral(args: &TripleArgs) -> CliResult<Report> {
    let verdict = is_spectral_pair(args.r, &args.b, &args.l)?;
    let ok = verdict.spectral;
    let report = SpectralReport {
        r: args.r,
        b: args.b.clone(),
        l: args.l.clone(),
        verdict,
    };
    Report::new(&report, None, ok)
}

fn run_spectrum(args: &SpectrumArgs) -> CliResult<Report> {
    let spec = SpectrumSpec::new(args.r, args.l.clone(), args.degree)?;
    let gamma = spec.gamma_set()?;
    let table = Table {
        header: vec!["gamma"],
        rows: gamma.iter().map(|g| vec![g.to_string()]).collect(),
    };
    let report = SpectrumReport {
        r: spec.scale(),
        l: spec.digits().to_vec(),
        degree: spec.degree(),
        cardinality: gamma.len() as u64,
        max_element: spec.max_element(),
        first_omitted: spec.first_omitted(),
        self_affine: spec.check_self_affine()?,
        gamma,
    };
    Report::new(&report, Some(table), true)
}

fn run_sigma(args: &SigmaArgs) -> CliResult<Report> {
    check_tol(args.tol)?;
    let (ifs, spec) = system(&args.system)?;
    let grid = frequencies(&args.t, &args.grid)?;
    let profile: SigmaProfile = sigma_profile(&ifs, &spec, &grid, args.tol)?;
    let table = Table {
        header: vec!["t", "sigma_lower", "err"],
        rows: profile
            .values
            .iter()
            .map(|v| vec![fmt_f64(v.t), fmt_f64(v.sigma_lower), fmt_f64(v.err)])
            .collect(),
    };
    Report::new(&profile, Some(table), true)
}

fn run_gram(args: &SystemArgs) -> CliResult<Report> {
    let (ifs, spec) = system(args)?;
    let g: GramReport = gram_matrix(&ifs, &spec)?;
    Report::new(&g, None, true)
}

fn run_classify(args: &SigmaArgs) -> CliResult<Report> {
    let (ifs, spec) = system(&args.system)?;
    let grid = frequencies(&args.t, &args.grid)?;
    if !(args.bessel >= 1.0 && args.bessel.is_finite()) {
        return Err(Failure::invalid("--bessel must be >= 1"));
    }
    let report = ClassifyReport {
        system: classify_system(&ifs, &spec, &grid)?,
        membership: measure_class_membership(&ifs, &spec, args.bessel, &grid)?,
    };
    let ok = report.system.orthogonal;
    Report::new(&report, None, ok)
}

fn run_kernel(args: &KernelArgs) -> CliResult<Report> {
    let z = parse_complex(&args.z)?;
    let cap = args.radius.unwrap_or(z.norm());
    check_radius(cap)?;
    let q = KernelQuery::new(z, args.x, cap)?;
    let degree = match args.degree {
        Some(d) => d,
        None => default_degree(args.r, &args.l, cap)?,
    };
    let depth = match args.depth {
        Some(d) => d,
        None => default_depth(args.r, &args.l, cap)?,
    };
    let spec = SpectrumSpec::new(args.r, args.l.clone(), degree)?;
    let series = gamma_kernel_series(&spec, &q)?;
    let product = gamma_kernel_product(args.r, &args.l, &q, depth)?;
    let agree = (series.value - product.value).norm() <= series.bound + product.bound;
    let report = KernelReport {
        r: args.r,
        l: spec.digits().to_vec(),
        query: q,
        degree,
        depth,
        series,
        product,
        classical: szego_classical(&q),
        agree,
    };
    Report::new(&report, None, agree)
}

fn factorize_rows(
    r: i64,
    a: &[i64],
    ap: &[i64],
    queries: &[KernelQuery],
    degree: u32,
    depth: u32,
) -> CliResult<Vec<FactorizeRow>> {
    queries
        .iter()
        .map(|q| {
            let f = factorization_residual(r, a, ap, q, degree, depth)?;
            Ok(FactorizeRow {
                re_z: q.z.re,
                im_z: q.z.im,
                x: q.x,
                residual: f.residual,
                bound: f.bound,
                product_residual: f.product_residual,
                product_bound: f.product_bound,
            })
        })
        .collect()
}

fn truncations(r: i64, l: &[i64], lp: &[i64], cap: f64) -> CliResult<(u32, u32)> {
    let degree = default_degree(r, l, cap)?.max(default_degree(r, lp, cap)?);
    let depth = default_depth(r, l, cap)?.max(default_depth(r, lp, cap)?);
    Ok((degree, depth))
}

fn run_factorize(args: &FactorizeArgs, seed: u64) -> CliResult<Report> {
    check_radius(args.radius)?;
    let dual = dual_spectra_sets(&args.a, &args.a_prime, args.r)?;
    let queries = match &args.z {
        Some(z) => vec![KernelQuery::new(parse_complex(z)?, args.x, args.radius)?],
        None => {
            if args.samples == 0 {
                return Err(Failure::invalid("--samples must be positive"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..args.samples)
                .map(|_| {
                    let z = disk_point(&mut rng, args.radius);
                    KernelQuery::new(z, rng.random::<f64>(), args.radius)
                })
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let (d0, p0) = truncations(args.r, &dual.l, &dual.l_prime, args.radius)?;
    let degree = args.degree.unwrap_or(d0);
    let depth = args.depth.unwrap_or(p0);
    let rows = factorize_rows(args.r, &args.a, &args.a_prime, &queries, degree, depth)?;
    let certified = rows
        .iter()
        .all(|r| r.residual <= r.bound && r.product_residual <= r.product_bound);
    let table = Table {
        header: vec!["re_z", "im_z", "x", "residual", "bound", "product_residual", "product_bound"],
        rows: rows
            .iter()
            .map(|r| {
                [r.re_z, r.im_z, r.x, r.residual, r.bound, r.product_residual, r.product_bound]
                    .iter()
                    .map(|v| fmt_f64(*v))
                    .collect()
            })
            .collect(),
    };
    let report = FactorizeReport {
        r: args.r,
        a: args.a.clone(),
        a_prime: args.a_prime.clone(),
        l: dual.l,
        l_prime: dual.l_prime,
        degree,
        depth,
        rows,
        certified,
    };
    Report::new(&report, Some(table), certified)
}

fn run_boundary(args: &BoundaryArgs) -> CliResult<Report> {
    if args.level == 0 {
        return Err(Failure::invalid("--level must be positive"));
    }
    let (ifs, spec) = system(&args.system)?;
    let f = parse_poly(&args.f)?;
    let z = parse_complex(&args.z)?;
    let value = boundary_evaluate(&ifs, &spec, &f, z, args.level)?;
    let consistent = value.consistent();
    Report::new(&BoundaryReport { value, consistent }, None, consistent)
}

fn run_parseval(args: &ParsevalArgs) -> CliResult<Report> {
    if args.level == 0 {
        return Err(Failure::invalid("--level must be positive"));
    }
    let (ifs, spec) = system(&args.system)?;
    let f = parse_poly(&args.f)?;
    let p: ParsevalReport = parseval_check(&ifs, &spec, &f, args.level)?;
    Report::new(&p, None, true)
}

fn run_sweep(args: &SweepArgs, seed: u64) -> CliResult<Report> {
    check_radius(args.radius)?;
    if args.from < 2 || args.to < args.from || args.to > 64 {
        return Err(Failure::invalid("sweep needs 2 <= from <= to <= 64"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for r in args.from..=args.to {
        for (a, ap) in enumerate_complementing_pairs(r) {
            if a == [0] || ap == [0] {
                continue;
            }
            let dual = dual_spectra_sets(&a, &ap, r)?;
            let cycle_free = extreme_cycles(r, &a, &dual.l)?.iter().all(|c| c.trivial);
            let queries = (0..args.samples)
                .map(|_| {
                    let z = disk_point(&mut rng, args.radius);
                    KernelQuery::new(z, rng.random::<f64>(), args.radius)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let (degree, depth) = truncations(r, &dual.l, &dual.l_prime, args.radius)?;
            let res = factorize_rows(r, &a, &ap, &queries, degree, depth)?;
            let max_residual = res.iter().map(|x| x.residual).fold(0.0, f64::max);
            let max_bound = res.iter().map(|x| x.bound).fold(0.0, f64::max);
            let kernel_certified = res
                .iter()
                .all(|x| x.residual <= x.bound && x.product_residual <= x.product_bound);
            rows.push(SweepRow {
                r,
                a,
                a_prime: ap,
                l: dual.l,
                l_prime: dual.l_prime,
                certificate: dual.certificate.all_passed(),
                cycle_free,
                max_residual,
                max_bound,
                kernel_certified,
            });
        }
    }
    let all_passed = rows
        .iter()
        .all(|r| r.certificate && r.cycle_free && r.kernel_certified);
    let table = Table {
        header: vec!["R", "A", "Ap", "L", "Lp", "certificate", "cycle_free", "max_residual", "max_bound", "kernel_certified"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.r.to_string(),
                    fmt_list(&r.a),
                    fmt_list(&r.a_prime),
                    fmt_list(&r.l),
                    fmt_list(&r.l_prime),
                    r.certificate.to_string(),
                    r.cycle_free.to_string(),
                    fmt_f64(r.max_residual),
                    fmt_f64(r.max_bound),
                    r.kernel_certified.to_string(),
                ]
            })
            .collect(),
    };
    let report = SweepReport {
        from: args.from,
        to: args.to,
        samples: args.samples,
        radius: args.radius,
        rows,
        all_passed,
    };
    Report::new(&report, Some(table), all_passed)
}

/// Runs one subcommand and returns its report.
pub fn dispatch(cli: &Cli) -> CliResult<Report> {
    match &cli.command {
        Command::Muhat(a) => run_muhat(a),
        Command::Hadamard(a) => run_hadamard(a),
        Command::Complementing(a) => run_complementing(a),
        Command::Dual(a) => run_dual(a),
        Command::Cycles(a) => run_cycles(a),
        Command::Spectral(a) => run_spectral(a),
        Command::Spectrum(a) => run_spectrum(a),
        Command::Sigma(a) => run_sigma(a),
        Command::Gram(a) => run_gram(a),
        Command::Classify(a) => run_classify(a),
        Command::Kernel(a) => run_kernel(a),
        Command::Factorize(a) => run_factorize(a, cli.seed),
        Command::Boundary(a) => run_boundary(a),
        Command::Parseval(a) => run_parseval(a),
        Command::Sweep(a) => run_sweep(a, cli.seed),
    }
}

/// Full run: validates `--out`, dispatches, writes the report, returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = parse_out(&cli.out).and_then(|target| {
        let report = dispatch(cli)?;
        match &target {
            OutTarget::Stdout { csv } => print!("{}", report.render(*csv)),
            OutTarget::File { path, csv } => std::fs::write(path, report.render(*csv))
                .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?,
        }
        Ok(report.ok)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FALSE,
        Err(f) => {
            eprintln!("fspec: {}", f.message);
            f.code
        }
    }
}

/// Applies `FS_THREADS` to the global thread pool.
pub fn configure_threads() -> CliResult<()> {
    match std::env::var("FS_THREADS") {
        Ok(v) => {
            let n: usize = v
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| Failure::invalid(format!("FS_THREADS must be a positive integer, got {v:?}")))?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Failure::invalid(e.to_string()))
        }
        Err(_) => Ok(()),
    }
}
