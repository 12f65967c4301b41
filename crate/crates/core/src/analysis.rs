//! Diagnostics for exponential systems `{e_gamma : gamma in Gamma}` in `L^2(mu)`:
//! the function `sigma_Gamma(t) = sum_gamma |mu_hat(t - gamma)|^2`, Gram
//! matrices `(mu_hat(gamma' - gamma))`, their extreme eigenvalues, and evidence
//! for orthogonality, Bessel bounds and completeness on finite grids.
//!
//! Sums over an infinite `Gamma` are always reported as lower estimates over
//! `Gamma_n`; grid checks are necessary conditions only.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_tol, Error, Result};
use crate::ifs::AffineIfs;
use crate::numeric::{BoundedComplex, EPS};
use crate::spectrum::SpectrumSpec;

/// Tolerance for transform values inside Gram matrices and orthogonality tests.
pub const DEFAULT_MU_TOL: f64 = 1e-12;

/// Largest Gram matrix assembled.
pub const GRAM_BUDGET: usize = 4096;

/// Smallest eigenvalue still reported as a Riesz lower bound.
pub const RIESZ_FLOOR: f64 = 1e-10;

/// `sigma` level taken as completeness evidence.
pub const ONB_EVIDENCE_LEVEL: f64 = 0.99;

/// `sum_{gamma in Gamma_n} |mu_hat(t - gamma)|^2` with its numeric error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaValue {
    pub t: f64,
    /// Lower estimate of the full `sigma_Gamma(t)`, up to `err`.
    pub sigma_lower: f64,
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaProfile {
    pub t_grid: Vec<f64>,
    pub values: Vec<SigmaValue>,
    /// Truncation degree `n` of `Gamma_n`.
    pub truncation: u32,
}

/// `sigma` over an arbitrary finite frequency list, summed in the given order.
///
/// The running sum only ever adds nonnegative terms, so a list that extends
/// another as a prefix never yields a smaller value.
pub fn sigma_over(ifs: &AffineIfs, gamma: &[i64], t: f64, tol: f64) -> Result<SigmaValue> {
    check_tol(tol)?;
    let mut total = 0.0;
    let mut err = 0.0;
    for &g in gamma {
        let v = ifs.mu_hat_offset(t, g, tol)?;
        let a = v.value.norm();
        total += a * a;
        err += (2.0 * a + v.bound) * v.bound + 3.0 * EPS * a * a;
    }
    err += gamma.len() as f64 * EPS * total;
    Ok(SigmaValue {
        t,
        sigma_lower: total,
        err,
    })
}

pub fn sigma_gamma(ifs: &AffineIfs, spec: &SpectrumSpec, t: f64, tol: f64) -> Result<SigmaValue> {
    sigma_over(ifs, &spec.gamma_nested()?, t, tol)
}

pub fn sigma_profile(
    ifs: &AffineIfs,
    spec: &SpectrumSpec,
    t_grid: &[f64],
    tol: f64,
) -> Result<SigmaProfile> {
    let gamma = spec.gamma_nested()?;
    let values = t_grid
        .par_iter()
        .map(|&t| sigma_over(ifs, &gamma, t, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(SigmaProfile {
        t_grid: t_grid.to_vec(),
        values,
        truncation: spec.degree(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Orthonormal,
    Riesz { a0: f64, a1: f64 },
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub gamma: Vec<i64>,
    /// Row-major `mu_hat(gamma_j - gamma_i)`.
    pub matrix: Vec<Vec<Complex64>>,
    /// Largest certified error over the entries.
    pub entry_bound: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Eigenvalue perturbation allowance from the entry errors.
    pub eigen_error: f64,
    pub classification: Classification,
}

/// `mu_hat` at each distinct positive difference of `gamma`.
fn difference_table(
    ifs: &AffineIfs,
    gamma: &[i64],
    tol: f64,
) -> Result<BTreeMap<i64, BoundedComplex>> {
    let mut diffs: Vec<i64> = gamma
        .iter()
        .flat_map(|a| gamma.iter().map(move |b| a - b))
        .filter(|&d| d > 0)
        .collect();
    diffs.sort_unstable();
    diffs.dedup();
    let values = diffs
        .par_iter()
        .map(|&d| ifs.mu_hat_int(d, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(diffs.into_iter().zip(values).collect())
}

/// Gram matrix of `{e_gamma}` over a finite frequency list.
pub fn gram_matrix_over(ifs: &AffineIfs, gamma: &[i64], tol: f64) -> Result<GramReport> {
    check_tol(tol)?;
    let n = gamma.len();
    if n > GRAM_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "gram matrix",
            requested: n as u128,
            budget: GRAM_BUDGET as u128,
        });
    }
    let table = difference_table(ifs, gamma, tol)?;
    let entry = |i: usize, j: usize| -> BoundedComplex {
        let d = gamma[j] - gamma[i];
        match d.cmp(&0) {
            std::cmp::Ordering::Equal => BoundedComplex::exact(Complex64::new(1.0, 0.0)),
            std::cmp::Ordering::Greater => table[&d],
            std::cmp::Ordering::Less => table[&-d].conj(),
        }
    };
    let mut matrix = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut entry_bound: f64 = 0.0;
    let mut exact_identity = true;
    for (i, row) in matrix.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let e = entry(i, j);
            *cell = e.value;
            entry_bound = entry_bound.max(e.bound);
            if i != j && !(e.is_exact() && e.value == Complex64::new(0.0, 0.0)) {
                exact_identity = false;
            }
        }
    }
    let (lambda_min, lambda_max) = extreme_eigenvalues(&matrix);
    let eigen_error = n as f64 * entry_bound + 4.0 * n as f64 * EPS * lambda_max.abs().max(1.0);
    let classification = if exact_identity {
        Classification::Orthonormal
    } else if lambda_min > RIESZ_FLOOR.max(eigen_error) {
        Classification::Riesz {
            a0: lambda_min,
            a1: lambda_max,
        }
    } else {
        Classification::Degenerate
    };
    Ok(GramReport {
        gamma: gamma.to_vec(),
        matrix,
        entry_bound,
        lambda_min,
        lambda_max,
        eigen_error,
        classification,
    })
}

pub fn gram_matrix(ifs: &AffineIfs, spec: &SpectrumSpec) -> Result<GramReport> {
    gram_matrix_over(ifs, &spec.gamma_set()?, DEFAULT_MU_TOL)
}

/// Smallest and largest eigenvalue of a Hermitian matrix.
pub fn extreme_eigenvalues(matrix: &[Vec<Complex64>]) -> (f64, f64) {
    let n = matrix.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let m = DMatrix::from_fn(n, n, |i, j| matrix[i][j]);
    let eig = m.symmetric_eigenvalues();
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// `sum conj(c_i) c_j mu_hat(gamma_j - gamma_i)`.
pub fn quadratic_form(report: &GramReport, c: &[Complex64]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, row) in report.matrix.iter().enumerate() {
        for (j, m) in row.iter().enumerate() {
            acc += c[i].conj() * m * c[j];
        }
    }
    acc.re
}

/// Exact pairwise orthogonality of `{e_gamma}` with a witness pair on failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orthogonality {
    pub orthogonal: bool,
    /// `(gamma, gamma')` with `mu_hat(gamma - gamma') != 0`, certified.
    pub witness: Option<(i64, i64)>,
}

/// Decides `mu_hat(gamma - gamma') = 0` for all distinct pairs.
///
/// Zeros must be certified by the exact test; a nonzero difference is accepted
/// from the exact test or from a value whose modulus exceeds its bound.
pub fn exact_orthogonality(ifs: &AffineIfs, gamma: &[i64]) -> Result<Orthogonality> {
    let mut diffs: Vec<i64> = gamma
        .iter()
        .flat_map(|a| gamma.iter().map(move |b| a - b))
        .filter(|&d| d > 0)
        .collect();
    diffs.sort_unstable();
    diffs.dedup();
    for d in diffs {
        let nonzero = match ifs.mu_hat_exact_zero(Ratio::from_integer(d)) {
            Ok(zero) => !zero,
            Err(Error::UndecidableZero) | Err(Error::Overflow(_)) => {
                let v = ifs.mu_hat_int(d, DEFAULT_MU_TOL)?;
                if v.value.norm() > v.bound {
                    true
                } else {
                    return Err(Error::UndecidableZero);
                }
            }
            Err(e) => return Err(e),
        };
        if nonzero {
            let witness = gamma
                .iter()
                .find_map(|&a| gamma.contains(&(a - d)).then_some((a, a - d)));
            return Ok(Orthogonality {
                orthogonal: false,
                witness,
            });
        }
    }
    Ok(Orthogonality {
        orthogonal: true,
        witness: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemReport {
    pub orthogonal: bool,
    pub witness: Option<(i64, i64)>,
    /// `min` of the `sigma` lower estimates over the grid.
    pub onb_evidence: f64,
    /// `max` of the `sigma` lower estimates over the grid.
    pub bessel_ceiling: f64,
    /// Gram eigenvalue bounds `(A0, A1)`; absent when degenerate or over budget.
    pub riesz: Option<(f64, f64)>,
    pub truncation: u32,
}

fn grid_extremes(profile: &SigmaProfile) -> (f64, f64) {
    let lo = profile
        .values
        .iter()
        .map(|v| v.sigma_lower)
        .fold(f64::INFINITY, f64::min);
    let hi = profile
        .values
        .iter()
        .map(|v| v.sigma_lower)
        .fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

pub fn classify_over(
    ifs: &AffineIfs,
    gamma: &[i64],
    t_grid: &[f64],
    truncation: u32,
) -> Result<SystemReport> {
    if t_grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    let ortho = exact_orthogonality(ifs, gamma)?;
    let values = t_grid
        .par_iter()
        .map(|&t| sigma_over(ifs, gamma, t, DEFAULT_MU_TOL))
        .collect::<Result<Vec<_>>>()?;
    let profile = SigmaProfile {
        t_grid: t_grid.to_vec(),
        values,
        truncation,
    };
    let (onb_evidence, bessel_ceiling) = grid_extremes(&profile);
    let riesz = if ortho.orthogonal {
        Some((1.0, 1.0))
    } else if gamma.len() <= GRAM_BUDGET {
        match gram_matrix_over(ifs, gamma, DEFAULT_MU_TOL)?.classification {
            Classification::Riesz { a0, a1 } => Some((a0, a1)),
            Classification::Orthonormal => Some((1.0, 1.0)),
            Classification::Degenerate => None,
        }
    } else {
        None
    };
    Ok(SystemReport {
        orthogonal: ortho.orthogonal,
        witness: ortho.witness,
        onb_evidence,
        bessel_ceiling,
        riesz,
        truncation,
    })
}

pub fn classify_system(
    ifs: &AffineIfs,
    spec: &SpectrumSpec,
    t_grid: &[f64],
) -> Result<SystemReport> {
    classify_over(ifs, &spec.gamma_nested()?, t_grid, spec.degree())
}

/// Grid evidence for `mu` lying in `M^perp(Gamma)`, `M_A(Gamma)` and `M^OB(Gamma)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipEvidence {
    /// Exact pairwise orthogonality on `Gamma_n`.
    pub orthogonal: bool,
    pub witness: Option<(i64, i64)>,
    /// `A` used for the Bessel check.
    pub bessel_constant: f64,
    /// No grid point certifies `sigma > A`.
    pub bessel_consistent: bool,
    /// Grid minimum of the `sigma` lower estimates.
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// `sigma_min >= ONB_EVIDENCE_LEVEL` and orthogonal.
    pub onb_supported: bool,
    pub truncation: u32,
}

pub fn measure_class_membership(
    ifs: &AffineIfs,
    spec: &SpectrumSpec,
    a: f64,
    t_grid: &[f64],
) -> Result<MembershipEvidence> {
    if !(a >= 1.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!("Bessel constant must be >= 1, got {a}")));
    }
    if t_grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    let gamma = spec.gamma_nested()?;
    let ortho = exact_orthogonality(ifs, &gamma)?;
    let profile = sigma_profile(ifs, spec, t_grid, DEFAULT_MU_TOL)?;
    let (sigma_min, sigma_max) = grid_extremes(&profile);
    let bessel_consistent = profile.values.iter().all(|v| v.sigma_lower - v.err <= a);
    Ok(MembershipEvidence {
        orthogonal: ortho.orthogonal,
        witness: ortho.witness,
        bessel_constant: a,
        bessel_consistent,
        sigma_min,
        sigma_max,
        onb_supported: ortho.orthogonal && sigma_min >= ONB_EVIDENCE_LEVEL,
        truncation: spec.degree(),
    })
}
