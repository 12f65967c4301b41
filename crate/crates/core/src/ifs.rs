//! One-dimensional affine iterated function systems `x -> (x + b) / R` and
//! their invariant measures.
//!
//! The Fourier transform of the invariant measure is the infinite product
//! `mu_hat(t) = prod_{n >= 1} chi_B(t / R^n)` of the digit mask
//! `chi_B(x) = (1/N) sum_b e^{2 pi i b x}`. Every truncated evaluation returns a
//! [`BoundedComplex`] whose bound covers both the product tail and rounding.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_tol, Error, Result};
use crate::numeric::{checked_pow_i128, cis_turns, BoundedComplex, CompensatedSum, EPS};

/// Default cap on the number of quadrature nodes (`N^m`).
pub const DEFAULT_NODE_BUDGET: usize = 1 << 22;

/// Largest |t| accepted by the transform routines.
const MAX_ABS_T: f64 = 4.0e18;

/// Affine IFS with integer scale `R >= 2` and a finite set of distinct integer digits.
///
/// Serialized as `{"R": <int>, "B": [<int>, ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "IfsRepr", into = "IfsRepr")]
pub struct AffineIfs {
    scale: i64,
    digits: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct IfsRepr {
    #[serde(rename = "R")]
    scale: i64,
    #[serde(rename = "B")]
    digits: Vec<i64>,
}

impl TryFrom<IfsRepr> for AffineIfs {
    type Error = Error;

    fn try_from(r: IfsRepr) -> Result<Self> {
        AffineIfs::new(r.scale, r.digits)
    }
}

impl From<AffineIfs> for IfsRepr {
    fn from(ifs: AffineIfs) -> Self {
        IfsRepr {
            scale: ifs.scale,
            digits: ifs.digits,
        }
    }
}

/// Closed-form description of the zero set of `chi_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskZeros {
    /// A single digit: `|chi_B| = 1` everywhere.
    None,
    /// Two digits at distance `gap`: `chi_B(x) = 0` iff `gap * x` is in `1/2 + Z`.
    TwoPoint { gap: i64 },
    /// A run of `len` consecutive integers: zeros are `(1/len) Z \ Z`.
    Consecutive { len: i64 },
    /// No cheap closed form.
    Unstructured,
}

pub(crate) fn validate_digits(digits: &[i64]) -> Result<()> {
    if digits.is_empty() {
        return Err(Error::EmptyDigits);
    }
    let mut sorted = digits.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateDigit(w[0]));
    }
    Ok(())
}

impl AffineIfs {
    /// Builds `(R, B)`; digits keep the caller's order.
    pub fn new(scale: i64, digits: impl Into<Vec<i64>>) -> Result<Self> {
        let digits = digits.into();
        if scale < 2 {
            return Err(Error::InvalidScale(scale));
        }
        validate_digits(&digits)?;
        Ok(Self { scale, digits })
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn digits(&self) -> &[i64] {
        &self.digits
    }

    /// `N = #B`.
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// `#B > R`: allowed, but the maps then overlap and the measure is not of
    /// the spectral type studied here.
    pub fn has_excess_digits(&self) -> bool {
        self.digits.len() as i64 > self.scale
    }

    /// The attractor hull `[min(B)/(R-1), max(B)/(R-1)]`.
    pub fn support_interval(&self) -> (f64, f64) {
        let lo = *self.digits.iter().min().expect("nonempty");
        let hi = *self.digits.iter().max().expect("nonempty");
        let d = (self.scale - 1) as f64;
        (lo as f64 / d, hi as f64 / d)
    }

    /// Applies `tau_b(x) = (x + b) / R`.
    pub fn contraction(&self, b: i64, x: f64) -> f64 {
        (x + b as f64) / self.scale as f64
    }

    /// `chi_B(x) = (1/N) sum_{b in B} e^{2 pi i b x}`.
    pub fn mask_value(&self, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &b in &self.digits {
            acc += cis_turns(b as f64 * x);
        }
        acc / self.digits.len() as f64
    }

    pub fn mask_zeros(&self) -> MaskZeros {
        let n = self.digits.len();
        if n == 1 {
            return MaskZeros::None;
        }
        let lo = *self.digits.iter().min().expect("nonempty");
        let hi = *self.digits.iter().max().expect("nonempty");
        if n == 2 {
            return MaskZeros::TwoPoint { gap: hi - lo };
        }
        if (hi - lo) as usize == n - 1 {
            // distinct digits spanning exactly n values form a run
            return MaskZeros::Consecutive { len: n as i64 };
        }
        MaskZeros::Unstructured
    }

    /// Decides exactly whether some factor `chi_B(t / R^n)`, `n >= 1`, vanishes.
    ///
    /// A false answer means `mu_hat(t) != 0`: the product of nonvanishing
    /// factors with summable deviations from 1 cannot converge to 0.
    pub fn mu_hat_exact_zero(&self, t: Ratio<i64>) -> Result<bool> {
        let p = *t.numer() as i128;
        let q = *t.denom() as i128;
        if p == 0 {
            return Ok(false);
        }
        let r = self.scale as i128;
        match self.mask_zeros() {
            MaskZeros::None => Ok(false),
            MaskZeros::Unstructured => Err(Error::UndecidableZero),
            MaskZeros::TwoPoint { gap } => {
                // gap * p / (q R^n) in 1/2 + Z  <=>  2 gap p / (q R^n) is an odd integer
                let num = (2 * gap as i128)
                    .checked_mul(p)
                    .ok_or(Error::Overflow("exact zero test"))?;
                let mut den = q;
                loop {
                    den = den.checked_mul(r).ok_or(Error::Overflow("exact zero test"))?;
                    if den > num.abs() {
                        return Ok(false);
                    }
                    if num % den == 0 && (num / den) % 2 != 0 {
                        return Ok(true);
                    }
                }
            }
            MaskZeros::Consecutive { len } => {
                // len * x in Z and x not in Z, with x = p / (q R^n)
                let num = (len as i128)
                    .checked_mul(p)
                    .ok_or(Error::Overflow("exact zero test"))?;
                let mut den = q;
                loop {
                    den = den.checked_mul(r).ok_or(Error::Overflow("exact zero test"))?;
                    if den > num.abs() {
                        return Ok(false);
                    }
                    if num % den == 0 && p % den != 0 {
                        return Ok(true);
                    }
                }
            }
        }
    }

    /// The Fourier transform of the invariant measure at an integer frequency.
    ///
    /// Vanishing is decided exactly when the digit set is structured; the result
    /// is then exactly zero with bound 0.
    pub fn mu_hat_int(&self, t: i64, tol: f64) -> Result<BoundedComplex> {
        check_tol(tol)?;
        if t == 0 {
            return Ok(BoundedComplex::exact(Complex64::new(1.0, 0.0)));
        }
        match self.mu_hat_exact_zero(Ratio::from_integer(t)) {
            Ok(true) => return Ok(BoundedComplex::exact(Complex64::new(0.0, 0.0))),
            Ok(false) | Err(Error::UndecidableZero) | Err(Error::Overflow(_)) => {}
            Err(e) => return Err(e),
        }
        self.product(t as i128, 0.0, tol)
    }

    /// `mu_hat(t) = prod_{n >= 1} chi_B(t / R^n)` with a certified bound `<= tol`.
    pub fn mu_hat(&self, t: f64, tol: f64) -> Result<BoundedComplex> {
        check_tol(tol)?;
        if !t.is_finite() || t.abs() > MAX_ABS_T {
            return Err(Error::InvalidArgument(format!("frequency {t} out of range")));
        }
        if t.fract() == 0.0 {
            return self.mu_hat_int(t as i64, tol);
        }
        let k = t.trunc();
        self.product(k as i128, t - k, tol)
    }

    /// `mu_hat(t - n)` for an integer shift `n`, without rounding the difference.
    pub fn mu_hat_offset(&self, t: f64, n: i64, tol: f64) -> Result<BoundedComplex> {
        check_tol(tol)?;
        if !t.is_finite() || t.abs() > MAX_ABS_T {
            return Err(Error::InvalidArgument(format!("frequency {t} out of range")));
        }
        let k = t.trunc() as i128 - n as i128;
        let f = t - t.trunc();
        if f == 0.0 {
            let k = i64::try_from(k)
                .map_err(|_| Error::InvalidArgument("frequency out of range".into()))?;
            return self.mu_hat_int(k, tol);
        }
        if (k as f64).abs() > MAX_ABS_T {
            return Err(Error::InvalidArgument("frequency out of range".into()));
        }
        self.product(k, f, tol)
    }

    /// Truncated product at `t = k + f` (integer part `k`, fractional part `f`).
    ///
    /// Phases `b t / R^n` are reduced modulo 1 in integer arithmetic so that
    /// large frequencies do not lose accuracy.
    fn product(&self, k: i128, f: f64, tol: f64) -> Result<BoundedComplex> {
        let r = self.scale as f64;
        let n_digits = self.digits.len() as f64;
        let abs_t = (k as f64 + f).abs();
        let mean_abs = self.digits.iter().map(|b| b.abs() as f64).sum::<f64>() / n_digits;
        let max_abs = self.digits.iter().map(|b| b.abs()).max().unwrap_or(0) as f64;
        // |chi_B(x) - 1| <= 2 pi mean|b| |x|
        let slope = TAU * mean_abs;

        let tail = |depth: i32| -> f64 {
            let s = slope * abs_t * r.powi(-depth) / (r - 1.0);
            s.exp_m1() * (1.0 + 4.0 * EPS)
        };
        let mut depth = 0i32;
        while tail(depth) > tol / 2.0 {
            depth += 1;
            if depth > 4000 {
                return Err(Error::InvalidArgument("product depth diverged".into()));
            }
        }

        let mut value = Complex64::new(1.0, 0.0);
        let mut rounding = 0.0;
        for n in 1..=depth {
            let rn = checked_pow_i128(self.scale, n as u32);
            let rn_f = r.powi(n);
            let mut acc = Complex64::new(0.0, 0.0);
            for &b in &self.digits {
                let phase = match rn {
                    Some(rn) => {
                        let m = (b as i128 * k).rem_euclid(rn);
                        (m as f64 + b as f64 * f) / rn as f64
                    }
                    None => b as f64 * (k as f64 + f) / rn_f,
                };
                acc += cis_turns(phase);
            }
            value *= acc / n_digits;
            rounding += EPS * (n_digits + 10.0 + 20.0 * (1.0 + max_abs / rn_f));
        }
        let rounding = 2.0 * rounding;
        let bound = tail(depth) + rounding;
        if bound > tol {
            return Err(Error::ToleranceUnreachable {
                requested: tol,
                floor: rounding,
            });
        }
        Ok(BoundedComplex::new(value, bound))
    }

    pub fn quadrature(&self, level: u32) -> Result<QuadratureRule> {
        self.quadrature_with_budget(level, DEFAULT_NODE_BUDGET)
    }

    /// Level-`m` rule: the `N^m` points `sum_{k=1..m} R^{-k} b_{w_k}`, equally weighted.
    pub fn quadrature_with_budget(&self, level: u32, budget: usize) -> Result<QuadratureRule> {
        let count = (self.digits.len() as u128)
            .checked_pow(level)
            .unwrap_or(u128::MAX);
        if count > budget as u128 {
            return Err(Error::BudgetExceeded {
                what: "quadrature",
                requested: count,
                budget: budget as u128,
            });
        }
        let mut nodes = vec![0.0];
        for _ in 0..level {
            let mut next = Vec::with_capacity(nodes.len() * self.digits.len());
            for &b in &self.digits {
                next.extend(nodes.iter().map(|&x| self.contraction(b, x)));
            }
            nodes = next;
        }
        Ok(QuadratureRule {
            level,
            weight: 1.0 / count as f64,
            nodes,
        })
    }
}

/// Equal-weight discretization of the invariant measure at a fixed word length.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    level: u32,
    nodes: Vec<f64>,
    weight: f64,
}

const CHUNK: usize = 1 << 14;

impl QuadratureRule {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_w N^{-m} f(x_w)`. Chunked so the summation order never depends on
    /// thread scheduling.
    pub fn integrate<F>(&self, f: F) -> Complex64
    where
        F: Fn(f64) -> Complex64 + Sync,
    {
        let partials: Vec<Complex64> = self
            .nodes
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut s = CompensatedSum::default();
                for &x in chunk {
                    s.add(f(x));
                }
                s.total()
            })
            .collect();
        let mut s = CompensatedSum::default();
        for p in partials {
            s.add(p);
        }
        s.total() * self.weight
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn rejects_bad_construction() {
        assert_eq!(AffineIfs::new(1, vec![0]), Err(Error::InvalidScale(1)));
        assert_eq!(AffineIfs::new(4, vec![]), Err(Error::EmptyDigits));
        assert_eq!(AffineIfs::new(4, vec![0, 2, 0]), Err(Error::DuplicateDigit(0)));
        let wide = AffineIfs::new(2, vec![0, 1, 2]).unwrap();
        assert!(wide.has_excess_digits());
    }

    #[test]
    fn mask_examples() {
        let jp = AffineIfs::new(4, vec![0, 2]).unwrap();
        assert_eq!(jp.mask_value(0.0), Complex64::new(1.0, 0.0));
        assert_eq!(jp.mask_value(0.25), Complex64::new(0.0, 0.0));
        let sym = AffineIfs::new(4, vec![-1, 1]).unwrap();
        for t in [0.0, 0.1, 0.3, 1.7, -2.2] {
            let expect = Complex64::new((TAU * t).cos(), 0.0);
            assert!(close(sym.mask_value(t), expect, 1e-15));
        }
    }

    #[test]
    fn mu_hat_at_zero_is_exact() {
        let sym = AffineIfs::new(4, vec![-1, 1]).unwrap();
        let v = sym.mu_hat(0.0, 1e-12).unwrap();
        assert_eq!(v, BoundedComplex::exact(Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn mu_hat_vanishes_on_odd_integers() {
        let sym = AffineIfs::new(4, vec![-1, 1]).unwrap();
        let v = sym.mu_hat(3.0, 1e-12).unwrap();
        assert_eq!(v, BoundedComplex::exact(Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn mu_hat_matches_cosine_product() {
        // independent oracle: the closed-form cosine product, 80 factors
        let sym = AffineIfs::new(4, vec![-1, 1]).unwrap();
        for t in [2.0, 0.3, -5.5, 14.0, 100.25] {
            let oracle: f64 = (1..=80).map(|n| (TAU * t / 4f64.powi(n)).cos()).product();
            let v = sym.mu_hat(t, 1e-12).unwrap();
            assert!(v.bound <= 1e-12);
            assert!(
                (v.value.re - oracle).abs() <= v.bound + 1e-14 && v.value.im.abs() <= v.bound,
                "t={t}: {:?} vs {oracle}",
                v
            );
        }
        assert!(sym.mu_hat(2.0, 1e-12).unwrap().value.re < 0.0);
    }

    #[test]
    fn mu_hat_rejects_bad_tolerance() {
        let jp = AffineIfs::new(4, vec![0, 2]).unwrap();
        assert_eq!(jp.mu_hat(1.5, 0.0), Err(Error::InvalidTolerance(0.0)));
        assert_eq!(jp.mu_hat(1.5, -1.0), Err(Error::InvalidTolerance(-1.0)));
        assert!(matches!(
            jp.mu_hat(1.5, 1e-18),
            Err(Error::ToleranceUnreachable { .. })
        ));
    }

    #[test]
    fn exact_zero_examples() {
        let jp = AffineIfs::new(4, vec![0, 2]).unwrap();
        assert_eq!(jp.mu_hat_exact_zero(Ratio::from_integer(1)), Ok(true));
        assert_eq!(jp.mu_hat_exact_zero(Ratio::from_integer(0)), Ok(false));
        assert_eq!(jp.mu_hat_exact_zero(Ratio::from_integer(2)), Ok(false));
        let sym = AffineIfs::new(4, vec![-1, 1]).unwrap();
        assert_eq!(sym.mu_hat_exact_zero(Ratio::from_integer(5)), Ok(true));
        assert_eq!(sym.mu_hat_exact_zero(Ratio::new(1, 2)), Ok(false));
        let lebesgue = AffineIfs::new(3, vec![0, 1, 2]).unwrap();
        assert_eq!(lebesgue.mu_hat_exact_zero(Ratio::from_integer(7)), Ok(true));
        assert_eq!(lebesgue.mu_hat_exact_zero(Ratio::new(4, 3)), Ok(false));
        assert_eq!(lebesgue.mu_hat_exact_zero(Ratio::new(1, 2)), Ok(false));
        let odd = AffineIfs::new(5, vec![0, 1, 3]).unwrap();
        assert_eq!(odd.mu_hat_exact_zero(Ratio::from_integer(7)), Err(Error::UndecidableZero));
        let point = AffineIfs::new(3, vec![2]).unwrap();
        assert_eq!(point.mu_hat_exact_zero(Ratio::from_integer(7)), Ok(false));
    }

    #[test]
    fn point_mass_transform() {
        // B = {b}: mu is the point mass at b/(R-1)
        let point = AffineIfs::new(3, vec![2]).unwrap();
        for t in [0.7, 3.0, -1.25] {
            let v = point.mu_hat(t, 1e-12).unwrap();
            assert!((v.value - cis_turns(t)).norm() <= v.bound + 1e-15);
        }
    }

    #[test]
    fn quadrature_examples() {
        let jp = AffineIfs::new(4, vec![0, 2]).unwrap();
        let q0 = jp.quadrature(0).unwrap();
        assert_eq!(q0.nodes(), &[0.0]);
        assert_eq!(q0.weight(), 1.0);
        let q1 = jp.quadrature(1).unwrap();
        assert_eq!(q1.nodes(), &[0.0, 0.5]);
        assert_eq!(q1.weight(), 0.5);
        let bin = AffineIfs::new(2, vec![0, 1]).unwrap();
        let mut q2 = bin.quadrature(2).unwrap().nodes().to_vec();
        q2.sort_by(f64::total_cmp);
        assert_eq!(q2, vec![0.0, 0.25, 0.5, 0.75]);
    }

    #[test]
    fn quadrature_budget_is_enforced() {
        let bin = AffineIfs::new(2, vec![0, 1]).unwrap();
        assert!(matches!(
            bin.quadrature_with_budget(11, 1024),
            Err(Error::BudgetExceeded { requested: 2048, .. })
        ));
    }

    #[test]
    fn integrate_constants_and_exponentials() {
        let sym = AffineIfs::new(4, vec![-1, 1]).unwrap();
        let rule = sym.quadrature(6).unwrap();
        assert!(close(rule.integrate(|_| Complex64::new(1.0, 0.0)), Complex64::new(1.0, 0.0), 1e-15));
        assert!(close(rule.integrate(|x| cis_turns(0.0 * x)), Complex64::new(1.0, 0.0), 1e-15));
    }

    #[test]
    fn quadrature_converges_to_product() {
        let sym = AffineIfs::new(4, vec![-1, 1]).unwrap();
        let exact = sym.mu_hat(2.0, 1e-12).unwrap();
        let rule = sym.quadrature(12).unwrap();
        let q = rule.integrate(|x| cis_turns(2.0 * x));
        // Q_m(e_t) is the depth-m partial product; its tail is below 2 pi |t| 4^-m / 3
        let quad_err = (TAU * 2.0 * 4f64.powi(-12) / 3.0).exp_m1();
        assert!((q - exact.value).norm() <= exact.bound + quad_err + 1e-14);
    }
}
