//! The classical Szegő kernel `k(z, x) = 1 / (1 - conj(z) e^{2 pi i x})` and
//! its restriction `G_Gamma(z, x) = sum_{gamma in Gamma} conj(z)^gamma e_gamma(x)`
//! to a lacunary frequency set.
//!
//! `G` is evaluated either as a truncated series over `Gamma_n` or through the
//! factorization `G(z, x) = prod_{n >= 0} sum_{l in L} conj(z)^{R^n l} e_l(R^n x)`.
//! Both return a certified bound covering truncation and rounding.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complement::dual_spectra_sets;
use crate::error::{Error, Result};
use crate::numeric::{cis_turns, BoundedComplex, CompensatedSum, EPS};
use crate::spectrum::SpectrumSpec;

/// Truncation target used by [`default_degree`] and [`default_depth`].
pub const DEFAULT_KERNEL_TOL: f64 = 1e-10;

const MAX_DEPTH: u32 = 64;

/// A point `z` of the open disk, a boundary coordinate `x`, and a radius cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelQuery {
    pub z: Complex64,
    pub x: f64,
    pub radius_cap: f64,
}

impl KernelQuery {
    pub fn new(z: Complex64, x: f64, radius_cap: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&radius_cap) {
            return Err(Error::InvalidArgument(format!(
                "radius cap must lie in [0, 1), got {radius_cap}"
            )));
        }
        if !x.is_finite() || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::InvalidArgument("non-finite query".into()));
        }
        if z.norm() > radius_cap {
            return Err(Error::RadiusOutOfRange {
                modulus: z.norm(),
                cap: radius_cap,
            });
        }
        Ok(Self { z, x, radius_cap })
    }

    /// Polar data of the terms: `conj(z)^g e_g(x) = r^g e^{2 pi i g y}`, `y in [0, 1)`.
    pub(crate) fn polar(&self) -> (f64, f64) {
        let y = (self.x.rem_euclid(1.0) - self.z.arg() / TAU).rem_euclid(1.0);
        (self.z.norm(), y)
    }
}

/// `k(z, x) = 1 / (1 - conj(z) e^{2 pi i x})`.
pub fn szego_classical(q: &KernelQuery) -> Complex64 {
    Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - q.z.conj() * cis_turns(q.x))
}

/// Rounding allowance for a single term `r^g e^{2 pi i g y}` with reduced `y`.
fn term_rounding(g: f64, r_g: f64) -> f64 {
    r_g * EPS * (g * (2.0 + 8.0 * PI) + 8.0)
}

/// `sum_{m >= first} r^m`.
fn geometric_tail(r: f64, first: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    r.powf(first) / (1.0 - r) * (1.0 + 8.0 * EPS) + f64::MIN_POSITIVE
}

/// Precomputed terms `(gamma, |z|^gamma)` of the truncated series at fixed `z`.
pub(crate) struct SeriesTerms {
    arg_turns: f64,
    terms: Vec<(f64, f64)>,
    rounding: f64,
    abs_sum: f64,
}

impl SeriesTerms {
    pub(crate) fn new(spec: &SpectrumSpec, z: Complex64) -> Result<Self> {
        let r = z.norm();
        let mut rounding = 0.0;
        let mut abs_sum = 0.0;
        let terms = spec
            .gamma_nested()?
            .into_iter()
            .map(|g| {
                let g = g as f64;
                let r_g = r.powf(g);
                rounding += term_rounding(g, r_g);
                abs_sum += r_g;
                (g, r_g)
            })
            .collect();
        Ok(Self {
            arg_turns: z.arg() / TAU,
            terms,
            rounding,
            abs_sum,
        })
    }

    /// `sum r^g e^{2 pi i g y}` with `y = x - arg(z) / 2 pi` reduced mod 1.
    pub(crate) fn value(&self, x: f64) -> Complex64 {
        let y = (x.rem_euclid(1.0) - self.arg_turns).rem_euclid(1.0);
        let mut sum = CompensatedSum::default();
        for &(g, r_g) in &self.terms {
            sum.add(cis_turns(g * y) * r_g);
        }
        sum.total()
    }

    /// Rounding allowance of [`Self::value`], independent of `x`.
    pub(crate) fn rounding(&self) -> f64 {
        self.rounding + 3.0 * EPS * self.abs_sum
    }
}

/// Partial sum of `G` over `Gamma_n`; the tail majorant sums `|z|^m` over every
/// integer `m` from the smallest omitted frequency on.
pub fn gamma_kernel_series(spec: &SpectrumSpec, q: &KernelQuery) -> Result<BoundedComplex> {
    if q.z == Complex64::new(0.0, 0.0) {
        return Ok(BoundedComplex::exact(Complex64::new(1.0, 0.0)));
    }
    let terms = SeriesTerms::new(spec, q.z)?;
    let tail = spec
        .first_omitted()
        .map_or(0.0, |m| geometric_tail(q.z.norm(), m));
    Ok(BoundedComplex::new(
        terms.value(q.x),
        tail + terms.rounding(),
    ))
}

/// Series tail bound at modulus `r`.
pub(crate) fn series_tail(spec: &SpectrumSpec, r: f64) -> f64 {
    spec.first_omitted().map_or(0.0, |m| geometric_tail(r, m))
}

/// Finite product of the first `depth` factors of `G`, with the remainder
/// `G(z^{R^D}, R^D x) - 1` bounded by `rho^{l_min} / (1 - rho)`, `rho = |z|^{R^D}`.
pub fn gamma_kernel_product(
    r: i64,
    l: &[i64],
    q: &KernelQuery,
    depth: u32,
) -> Result<BoundedComplex> {
    let spec = SpectrumSpec::new(r, l.to_vec(), 0)?;
    if q.z == Complex64::new(0.0, 0.0) {
        return Ok(BoundedComplex::exact(Complex64::new(1.0, 0.0)));
    }
    if depth > MAX_DEPTH {
        return Err(Error::InvalidArgument(format!("depth {depth} exceeds {MAX_DEPTH}")));
    }
    let (rad, y) = q.polar();
    let mut prod = BoundedComplex::exact(Complex64::new(1.0, 0.0));
    let mut scale = 1.0f64;
    for _ in 0..depth {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        let mut rounding = 0.0;
        for &d in spec.digits() {
            let g = d as f64 * scale;
            let r_g = rad.powf(g);
            sum += cis_turns(g * y) * r_g;
            abs_sum += r_g;
            rounding += term_rounding(g, r_g);
        }
        let n = spec.digits().len() as f64;
        prod = prod * BoundedComplex::new(sum, rounding + n * EPS * abs_sum);
        scale *= r as f64;
    }
    let remainder = match spec.digits().iter().find(|&&d| d > 0) {
        None => 0.0,
        Some(&lmin) => {
            let rho = rad.powf(scale);
            geometric_tail(rho, lmin as f64)
        }
    };
    let bound = prod.bound * (1.0 + remainder) + prod.value.norm() * remainder;
    Ok(BoundedComplex::new(prod.value, bound * (1.0 + 4.0 * EPS)))
}

/// `<k_z, k_w>` in `L^2(mu)` for a spectral pair: `sum_{gamma} (z conj(w))^gamma`.
pub fn kernel_gram(spec: &SpectrumSpec, z: Complex64, w: Complex64) -> Result<BoundedComplex> {
    let zeta = z * w.conj();
    let r = zeta.norm();
    if r.is_nan() || r >= 1.0 {
        return Err(Error::InvalidArgument("kernel_gram needs |z|, |w| < 1".into()));
    }
    let q = KernelQuery::new(zeta.conj(), 0.0, r)?;
    let v = gamma_kernel_series(spec, &q)?;
    // the product z conj(w) carries its own rounding, amplified by gamma
    let input = 8.0 * EPS * r / ((1.0 - r) * (1.0 - r));
    Ok(BoundedComplex::new(v.value, v.bound + input))
}

/// Smallest degree with series tail `<= DEFAULT_KERNEL_TOL` at `|z| = radius_cap`.
pub fn default_degree(r: i64, l: &[i64], radius_cap: f64) -> Result<u32> {
    let mut n = 0;
    loop {
        let spec = SpectrumSpec::new(r, l.to_vec(), n)?;
        let tail = spec
            .first_omitted()
            .map_or(0.0, |m| geometric_tail(radius_cap, m));
        if tail <= DEFAULT_KERNEL_TOL {
            return Ok(n);
        }
        n += 1;
    }
}

/// Smallest depth with product remainder `<= DEFAULT_KERNEL_TOL` at `|z| = radius_cap`.
pub fn default_depth(r: i64, l: &[i64], radius_cap: f64) -> Result<u32> {
    let spec = SpectrumSpec::new(r, l.to_vec(), 0)?;
    let Some(&lmin) = spec.digits().iter().find(|&&d| d > 0) else {
        return Ok(0);
    };
    let mut scale = 1.0f64;
    for depth in 0..=MAX_DEPTH {
        // the factor |P_D| <= 1 / (1 - r) multiplies the remainder
        let rho = radius_cap.powf(scale);
        if geometric_tail(rho, lmin as f64) / (1.0 - radius_cap) <= DEFAULT_KERNEL_TOL {
            return Ok(depth);
        }
        scale *= r as f64;
    }
    Err(Error::InvalidArgument("radius cap too close to 1".into()))
}

/// `|G_{Gamma(L)} G_{Gamma(L')} - k|` against its certified bound, by both routes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationResidual {
    #[serde(rename = "L")]
    pub l: Vec<i64>,
    #[serde(rename = "Lp")]
    pub l_prime: Vec<i64>,
    /// Series route at the requested degree.
    pub residual: f64,
    pub bound: f64,
    /// Product route at the requested depth.
    pub product_residual: f64,
    pub product_bound: f64,
}

impl FactorizationResidual {
    /// Both residuals lie within their bounds.
    pub fn certified(&self) -> bool {
        self.residual <= self.bound && self.product_residual <= self.product_bound
    }
}

/// Builds `(L, L')` from the complementing pair and checks `G_L G_L' = k` at `q`.
pub fn factorization_residual(
    r: i64,
    a: &[i64],
    a_prime: &[i64],
    q: &KernelQuery,
    degree: u32,
    depth: u32,
) -> Result<FactorizationResidual> {
    let dual = dual_spectra_sets(a, a_prime, r)?;
    let k = szego_classical(q);
    let rad = q.z.norm();
    let k_err = 6.0 * EPS / ((1.0 - rad) * (1.0 - rad));
    let residual = |p: BoundedComplex| -> (f64, f64) {
        let res = (p.value - k).norm();
        (res, p.bound + k_err + 2.0 * EPS * (p.value.norm() + k.norm()))
    };
    let s = SpectrumSpec::new(r, dual.l.clone(), degree)?;
    let sp = SpectrumSpec::new(r, dual.l_prime.clone(), degree)?;
    let series = gamma_kernel_series(&s, q)? * gamma_kernel_series(&sp, q)?;
    let product = gamma_kernel_product(r, &dual.l, q, depth)?
        * gamma_kernel_product(r, &dual.l_prime, q, depth)?;
    let (res_s, bound_s) = residual(series);
    let (res_p, bound_p) = residual(product);
    Ok(FactorizationResidual {
        l: dual.l,
        l_prime: dual.l_prime,
        residual: res_s,
        bound: bound_s,
        product_residual: res_p,
        product_bound: bound_p,
    })
}
