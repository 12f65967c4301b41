//! Analytic functions `f(z) = sum c_gamma z^gamma` with frequencies in `Gamma_n`,
//! their boundary traces `f~(x) = sum c_gamma e_gamma(x)` on the support of `mu`,
//! and reconstruction of `f` inside the disk from the trace.
//!
//! For a spectral pair `f(z) = int conj(G(z, x)) f~(x) dmu(x)`, and the map
//! `J e_n = sum_gamma mu_hat(n - gamma) z^gamma` is isometric on the span of `Gamma`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::DEFAULT_MU_TOL;
use crate::cycles::is_spectral_pair;
use crate::error::{check_tol, Error, Result};
use crate::ifs::AffineIfs;
use crate::kernel::{default_degree, gamma_kernel_series, series_tail, KernelQuery, SeriesTerms};
use crate::numeric::{cis_turns, BoundedComplex, EPS};
use crate::spectrum::SpectrumSpec;

/// Finite sum `sum_gamma c_gamma z^gamma` with distinct nonnegative frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(i64, Complex64)>", into = "Vec<(i64, Complex64)>")]
pub struct GammaPolynomial {
    terms: Vec<(i64, Complex64)>,
}

impl TryFrom<Vec<(i64, Complex64)>> for GammaPolynomial {
    type Error = Error;

    fn try_from(terms: Vec<(i64, Complex64)>) -> Result<Self> {
        GammaPolynomial::new(terms)
    }
}

impl From<GammaPolynomial> for Vec<(i64, Complex64)> {
    fn from(p: GammaPolynomial) -> Self {
        p.terms
    }
}

impl GammaPolynomial {
    pub fn new(mut terms: Vec<(i64, Complex64)>) -> Result<Self> {
        terms.sort_by_key(|t| t.0);
        if let Some(&(g, _)) = terms.iter().find(|t| t.0 < 0) {
            return Err(Error::NegativeDigit(g));
        }
        if let Some(w) = terms.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateDigit(w[0].0));
        }
        Ok(Self { terms })
    }

    /// `z^gamma`.
    pub fn monomial(gamma: i64) -> Result<Self> {
        Self::new(vec![(gamma, Complex64::new(1.0, 0.0))])
    }

    /// Ascending `(gamma, c_gamma)`.
    pub fn terms(&self) -> &[(i64, Complex64)] {
        &self.terms
    }

    pub fn h2_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.1.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `sum |c_gamma|`, a bound for `|f~|` and for `|f|` on the disk.
    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.1.norm()).sum()
    }

    /// Direct evaluation inside the disk.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(g, c)| c * z.powu(g as u32))
            .sum()
    }

    /// The boundary trace `f~(x)`.
    pub fn boundary_value(&self, x: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(g, c)| c * cis_turns(g as f64 * x))
            .sum()
    }

    /// Every frequency lies in `Gamma_n`.
    pub fn supported_in(&self, spec: &SpectrumSpec) -> Result<bool> {
        let gamma = spec.gamma_set()?;
        Ok(self.terms.iter().all(|t| gamma.binary_search(&t.0).is_ok()))
    }
}

fn check_support(f: &GammaPolynomial, spec: &SpectrumSpec) -> Result<()> {
    let gamma = spec.gamma_set()?;
    match f.terms.iter().find(|t| gamma.binary_search(&t.0).is_err()) {
        Some(&(g, _)) => Err(Error::OutsideSpectrum(g)),
        None => Ok(()),
    }
}

/// Coefficients `(gamma, mu_hat(n - gamma))` of `J e_n` over `Gamma_n`, ascending.
pub fn embed_j_coeffs(
    ifs: &AffineIfs,
    spec: &SpectrumSpec,
    n: i64,
    tol: f64,
) -> Result<Vec<(i64, BoundedComplex)>> {
    check_tol(tol)?;
    spec.gamma_set()?
        .into_iter()
        .map(|g| {
            let d = n
                .checked_sub(g)
                .ok_or(Error::Overflow("frequency difference"))?;
            Ok((g, ifs.mu_hat_int(d, tol)?))
        })
        .collect()
}

/// `int conj(G(z, x)) f~(x) dmu` next to the direct value `f(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryValue {
    pub value: Complex64,
    pub direct: Complex64,
    /// `|Q_m - Q_{m-1}|` for the integral.
    pub quadrature_change: f64,
    /// Kernel truncation times `sum |c_gamma|`, plus rounding.
    pub kernel_bound: f64,
    pub level: u32,
}

impl BoundaryValue {
    pub fn discrepancy(&self) -> f64 {
        (self.value - self.direct).norm()
    }

    /// The reconstruction is within `kernel_bound + quadrature_change`.
    pub fn consistent(&self) -> bool {
        self.discrepancy() <= self.kernel_bound + self.quadrature_change
    }
}

/// Reconstructs `f(z)` from its boundary trace by quadrature at word length `level`.
pub fn boundary_evaluate(
    ifs: &AffineIfs,
    spec: &SpectrumSpec,
    f: &GammaPolynomial,
    z: Complex64,
    level: u32,
) -> Result<BoundaryValue> {
    if level == 0 {
        return Err(Error::InvalidArgument("level must be at least 1".into()));
    }
    check_support(f, spec)?;
    let rad = z.norm();
    if rad.is_nan() || rad >= 1.0 {
        return Err(Error::InvalidArgument("|z| must be < 1".into()));
    }
    let degree = spec
        .degree()
        .max(default_degree(spec.scale(), spec.digits(), rad)?);
    let kspec = spec.with_degree(degree)?;
    let kernel = SeriesTerms::new(&kspec, z)?;
    let integrand = |x: f64| -> Complex64 {
        let g = if z == Complex64::new(0.0, 0.0) {
            Complex64::new(1.0, 0.0)
        } else {
            kernel.value(x)
        };
        g.conj() * f.boundary_value(x)
    };
    let fine = ifs.quadrature(level)?.integrate(integrand);
    let coarse = ifs.quadrature(level - 1)?.integrate(integrand);
    let g_bound = series_tail(&kspec, rad) + kernel.rounding();
    let l1 = f.l1_norm();
    let terms = f.terms.len() as f64;
    let kernel_bound = (g_bound + 8.0 * terms * EPS / (1.0 - rad)) * l1 + 4.0 * EPS * l1;
    Ok(BoundaryValue {
        value: fine,
        direct: f.evaluate(z),
        quadrature_change: (fine - coarse).norm(),
        kernel_bound,
        level,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParsevalReport {
    pub h2_norm: f64,
    pub l2mu_norm: f64,
    /// `l2mu_norm - h2_norm`.
    pub gap: f64,
    /// `l2mu_norm^2 - h2_norm^2`.
    pub squared_gap: f64,
    /// `|Q_m - Q_{m-1}|` for `int |f~|^2 dmu`.
    pub quadrature_change: f64,
    pub level: u32,
}

/// Compares `sum |c_gamma|^2` with `int |f~|^2 dmu` at word length `level`.
pub fn parseval_check(
    ifs: &AffineIfs,
    spec: &SpectrumSpec,
    f: &GammaPolynomial,
    level: u32,
) -> Result<ParsevalReport> {
    if level == 0 {
        return Err(Error::InvalidArgument("level must be at least 1".into()));
    }
    check_support(f, spec)?;
    let integrand = |x: f64| Complex64::new(f.boundary_value(x).norm_sqr(), 0.0);
    let fine = ifs.quadrature(level)?.integrate(integrand).re;
    let coarse = ifs.quadrature(level - 1)?.integrate(integrand).re;
    let h2 = f.h2_norm();
    let l2 = fine.max(0.0).sqrt();
    Ok(ParsevalReport {
        h2_norm: h2,
        l2mu_norm: l2,
        gap: l2 - h2,
        squared_gap: fine - h2 * h2,
        quadrature_change: (fine - coarse).abs(),
        level,
    })
}

/// `G_Gamma(z, x)` as the boundary kernel `J* k_z`; requires `(mu_B, Gamma(L))`
/// to be a spectral pair and then coincides with the series evaluation.
pub fn gamma_szego_boundary_kernel(
    ifs: &AffineIfs,
    spec: &SpectrumSpec,
    q: &KernelQuery,
) -> Result<BoundedComplex> {
    if ifs.scale() != spec.scale() {
        return Err(Error::NotSpectral("scales of the IFS and the spectrum differ".into()));
    }
    let verdict = is_spectral_pair(spec.scale(), ifs.digits(), spec.digits())
        .map_err(|e| Error::NotSpectral(e.to_string()))?;
    if !verdict.spectral {
        return Err(Error::NotSpectral(if verdict.hadamard {
            "nontrivial extreme cycle".into()
        } else {
            "not a Hadamard triple".into()
        }));
    }
    gamma_kernel_series(spec, q)
}

/// `J e_n` with the default transform tolerance.
pub fn embed_j(ifs: &AffineIfs, spec: &SpectrumSpec, n: i64) -> Result<Vec<(i64, BoundedComplex)>> {
    embed_j_coeffs(ifs, spec, n, DEFAULT_MU_TOL)
}
