//! Small numeric primitives shared by the evaluation modules.

use std::f64::consts::TAU;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub(crate) const EPS: f64 = f64::EPSILON;

/// A complex value together with a certified bound on its absolute error.
///
/// Exact results carry `bound == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundedComplex {
    pub value: Complex64,
    pub bound: f64,
}

impl BoundedComplex {
    pub fn new(value: Complex64, bound: f64) -> Self {
        debug_assert!(bound >= 0.0 && bound.is_finite());
        Self { value, bound }
    }

    pub fn exact(value: Complex64) -> Self {
        Self { value, bound: 0.0 }
    }

    pub fn is_exact(&self) -> bool {
        self.bound == 0.0
    }

    /// True when the enclosure `value ± bound` contains `other`.
    pub fn contains(&self, other: Complex64) -> bool {
        (self.value - other).norm() <= self.bound
    }

    pub fn conj(self) -> Self {
        Self::new(self.value.conj(), self.bound)
    }
}

impl Mul for BoundedComplex {
    type Output = BoundedComplex;

    fn mul(self, rhs: BoundedComplex) -> BoundedComplex {
        let value = self.value * rhs.value;
        let bound = self.value.norm() * rhs.bound
            + rhs.value.norm() * self.bound
            + self.bound * rhs.bound
            + 4.0 * EPS * value.norm();
        BoundedComplex::new(value, bound)
    }
}

/// `e^{2 pi i f}` with `f` measured in turns. Quarter turns are returned exactly.
pub fn cis_turns(f: f64) -> Complex64 {
    let r = f.rem_euclid(1.0);
    if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if r == 0.25 {
        Complex64::new(0.0, 1.0)
    } else if r == 0.5 {
        Complex64::new(-1.0, 0.0)
    } else if r == 0.75 {
        Complex64::new(0.0, -1.0)
    } else {
        let (s, c) = (TAU * r).sin_cos();
        Complex64::new(c, s)
    }
}

/// The boundary exponential `e_gamma(x) = e^{2 pi i gamma x}`.
pub fn exp_2pi_i(gamma: f64, x: f64) -> Complex64 {
    cis_turns(gamma * x)
}

/// Neumaier-compensated sum of complex terms.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: Complex64) {
        self.sum = Complex64::new(
            neumaier_step(self.sum.re, v.re, &mut self.comp.re),
            neumaier_step(self.sum.im, v.im, &mut self.comp.im),
        );
    }

    pub fn total(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier_step(sum: f64, v: f64, comp: &mut f64) -> f64 {
    let t = sum + v;
    if sum.abs() >= v.abs() {
        *comp += (sum - t) + v;
    } else {
        *comp += (v - t) + sum;
    }
    t
}

pub(crate) fn checked_pow_i128(base: i64, exp: u32) -> Option<i128> {
    (base as i128).checked_pow(exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_turns_are_exact() {
        assert_eq!(cis_turns(0.5), Complex64::new(-1.0, 0.0));
        assert_eq!(cis_turns(-0.25), Complex64::new(0.0, -1.0));
        assert_eq!(cis_turns(3.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let mut s = CompensatedSum::default();
        for v in [1e16, 1.0, -1e16, 1.0] {
            s.add(Complex64::new(v, 0.0));
        }
        assert_eq!(s.total().re, 2.0);
    }

    #[test]
    fn bounded_product_encloses_true_product() {
        let a = BoundedComplex::new(Complex64::new(0.5, 0.25), 1e-3);
        let b = BoundedComplex::new(Complex64::new(-0.3, 0.9), 2e-3);
        let p = a * b;
        let truth = Complex64::new(0.5 + 1e-3, 0.25) * Complex64::new(-0.3, 0.9 - 2e-3);
        assert!(p.contains(truth));
    }
}
