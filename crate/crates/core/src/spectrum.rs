//! Truncated lacunary spectra `Gamma_n(L) = { sum_{k=0}^{n} R^k l_k : l_k in L }`
//! and finite set algebra on them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hadamard::incongruent_mod_r;

/// Every element of a truncated spectrum stays below this.
pub const MAX_ELEMENT: i128 = 1 << 62;

/// Default cap on `#Gamma_n`.
pub const DEFAULT_SET_BUDGET: u128 = 1 << 24;

/// Generator `(R, L)` and truncation degree `n` of `Gamma_n(L)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct SpectrumSpec {
    scale: i64,
    digits: Vec<i64>,
    degree: u32,
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    #[serde(rename = "R")]
    scale: i64,
    #[serde(rename = "L")]
    digits: Vec<i64>,
    degree: u32,
}

impl TryFrom<SpecRepr> for SpectrumSpec {
    type Error = Error;

    fn try_from(s: SpecRepr) -> Result<Self> {
        SpectrumSpec::new(s.scale, s.digits, s.degree)
    }
}

impl From<SpectrumSpec> for SpecRepr {
    fn from(s: SpectrumSpec) -> Self {
        SpecRepr {
            scale: s.scale,
            digits: s.digits,
            degree: s.degree,
        }
    }
}

impl SpectrumSpec {
    pub fn new(scale: i64, digits: impl Into<Vec<i64>>, degree: u32) -> Result<Self> {
        let mut digits = digits.into();
        if scale < 2 {
            return Err(Error::InvalidScale(scale));
        }
        crate::ifs::validate_digits(&digits)?;
        if let Some(&neg) = digits.iter().find(|&&l| l < 0) {
            return Err(Error::NegativeDigit(neg));
        }
        if !incongruent_mod_r(&digits, scale) {
            let (a, b) = first_clash(&digits, scale);
            return Err(Error::ResidueClash(a, b, scale));
        }
        if !digits.contains(&0) {
            return Err(Error::MissingZero);
        }
        digits.sort_unstable();
        let spec = Self {
            scale,
            digits,
            degree,
        };
        if spec.max_element_wide().is_none_or(|m| m >= MAX_ELEMENT) {
            return Err(Error::Overflow("spectrum: max element exceeds 2^62"));
        }
        Ok(spec)
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// The digit set `L`, ascending.
    pub fn digits(&self) -> &[i64] {
        &self.digits
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn with_degree(&self, degree: u32) -> Result<Self> {
        Self::new(self.scale, self.digits.clone(), degree)
    }

    fn max_element_wide(&self) -> Option<i128> {
        let r = self.scale as i128;
        let top = r.checked_pow(self.degree + 1)?;
        Some(*self.digits.last()? as i128 * ((top - 1) / (r - 1)))
    }

    /// `max Gamma_n = max(L) (R^{n+1} - 1) / (R - 1)`.
    pub fn max_element(&self) -> i64 {
        self.max_element_wide().expect("checked at construction") as i64
    }

    /// `#Gamma_n = (#L)^{n+1}`.
    pub fn cardinality(&self) -> u128 {
        (self.digits.len() as u128)
            .checked_pow(self.degree + 1)
            .unwrap_or(u128::MAX)
    }

    /// Smallest element of `Gamma(L) \ Gamma_n`, i.e. `R^{n+1} min(L \ {0})`;
    /// `None` when `L = {0}` and the full spectrum is `{0}`.
    pub fn first_omitted(&self) -> Option<f64> {
        let lmin = *self.digits.iter().find(|&&l| l > 0)?;
        Some(lmin as f64 * (self.scale as f64).powi(self.degree as i32 + 1))
    }

    fn check_budget(&self) -> Result<()> {
        let n = self.cardinality();
        if n > DEFAULT_SET_BUDGET {
            return Err(Error::BudgetExceeded {
                what: "spectrum",
                requested: n,
                budget: DEFAULT_SET_BUDGET,
            });
        }
        Ok(())
    }

    /// Elements of `Gamma_n` listed so that `Gamma_{k-1}` is a prefix of `Gamma_k`.
    pub fn gamma_nested(&self) -> Result<Vec<i64>> {
        self.check_budget()?;
        let mut out = self.digits.clone();
        let mut power = 1i64;
        for _ in 1..=self.degree {
            power *= self.scale;
            let prev = out.len();
            for &l in self.digits.iter().filter(|&&l| l != 0) {
                for i in 0..prev {
                    out.push(out[i] + power * l);
                }
            }
        }
        Ok(out)
    }

    /// `Gamma_n`, ascending.
    pub fn gamma_set(&self) -> Result<Vec<i64>> {
        let mut g = self.gamma_nested()?;
        g.sort_unstable();
        debug_assert!(g.windows(2).all(|w| w[0] < w[1]), "residue condition violated");
        Ok(g)
    }

    /// Checks `Gamma_{n+1} = R Gamma_n + L` as finite sets and `0 in Gamma_n`.
    pub fn check_self_affine(&self) -> Result<bool> {
        let g = self.gamma_set()?;
        let next = self.with_degree(self.degree + 1)?.gamma_set()?;
        let scaled: Vec<i64> = g.iter().map(|x| x * self.scale).collect();
        let rebuilt = direct_sum(&scaled, &self.digits);
        Ok(g.binary_search(&0).is_ok() && rebuilt.unique && rebuilt.set == next)
    }
}

fn first_clash(digits: &[i64], r: i64) -> (i64, i64) {
    for (i, &a) in digits.iter().enumerate() {
        for &b in &digits[i + 1..] {
            if (a - b).rem_euclid(r) == 0 {
                return (a, b);
            }
        }
    }
    unreachable!("caller found a clash")
}

/// Sumset of two finite sets together with a uniqueness flag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectSum {
    pub set: Vec<i64>,
    /// Every element has exactly one representation `g1 + g2`.
    pub unique: bool,
}

pub fn direct_sum(g1: &[i64], g2: &[i64]) -> DirectSum {
    let a: BTreeSet<i64> = g1.iter().copied().collect();
    let b: BTreeSet<i64> = g2.iter().copied().collect();
    let set: BTreeSet<i64> = a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
    DirectSum {
        unique: set.len() == a.len() * b.len(),
        set: set.into_iter().collect(),
    }
}

/// `{g - g'} intersected with [-bound, bound]`, ascending.
pub fn difference_set(g: &[i64], bound: i64) -> Vec<i64> {
    let set: BTreeSet<i64> = g
        .iter()
        .flat_map(|x| g.iter().map(move |y| x - y))
        .filter(|d| d.abs() <= bound)
        .collect();
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_examples() {
        let s = SpectrumSpec::new(4, vec![0, 1], 1).unwrap();
        assert_eq!(s.gamma_set().unwrap(), vec![0, 1, 4, 5]);
        let s = SpectrumSpec::new(4, vec![0, 2], 1).unwrap();
        assert_eq!(s.gamma_set().unwrap(), vec![0, 2, 8, 10]);
        for n in 0..5 {
            assert_eq!(SpectrumSpec::new(7, vec![0], n).unwrap().gamma_set().unwrap(), vec![0]);
        }
    }

    #[test]
    fn construction_rejects() {
        assert_eq!(SpectrumSpec::new(4, vec![1, 2], 1), Err(Error::MissingZero));
        assert_eq!(SpectrumSpec::new(4, vec![0, 4], 1), Err(Error::ResidueClash(0, 4, 4)));
        assert_eq!(SpectrumSpec::new(4, vec![0, -1], 1), Err(Error::NegativeDigit(-1)));
        assert!(matches!(SpectrumSpec::new(4, vec![0, 1], 40), Err(Error::Overflow(_))));
        assert!(SpectrumSpec::new(4, vec![0, 1], 29).is_ok());
    }

    #[test]
    fn self_affine_examples() {
        assert_eq!(SpectrumSpec::new(4, vec![0, 1], 2).unwrap().check_self_affine(), Ok(true));
        assert_eq!(SpectrumSpec::new(4, vec![0, 2], 2).unwrap().check_self_affine(), Ok(true));
    }

    #[test]
    fn direct_sum_examples() {
        let a = SpectrumSpec::new(4, vec![0, 1], 1).unwrap().gamma_set().unwrap();
        let b = SpectrumSpec::new(4, vec![0, 2], 1).unwrap().gamma_set().unwrap();
        let s = direct_sum(&a, &b);
        assert!(s.unique);
        assert_eq!(s.set, (0..16).collect::<Vec<_>>());
        let s = direct_sum(&[0], &[3, 5]);
        assert_eq!((s.set, s.unique), (vec![3, 5], true));
        let s = direct_sum(&[0, 2], &[0, 2]);
        assert_eq!((s.set, s.unique), (vec![0, 2, 4], false));
    }

    #[test]
    fn difference_examples() {
        let ternary = SpectrumSpec::new(3, vec![0, 1], 2).unwrap().gamma_set().unwrap();
        assert_eq!(ternary, vec![0, 1, 3, 4, 9, 10, 12, 13]);
        assert_eq!(difference_set(&ternary, 13), (-13..=13).collect::<Vec<_>>());
        assert_eq!(difference_set(&[0], 10), vec![0]);
        assert_eq!(
            difference_set(&[0, 1, 4, 5], 5),
            vec![-5, -4, -3, -1, 0, 1, 3, 4, 5]
        );
    }

    #[test]
    fn nested_order_has_prefix_property() {
        let s = SpectrumSpec::new(5, vec![0, 2, 3], 3).unwrap();
        let big = s.gamma_nested().unwrap();
        for n in 0..3 {
            let small = s.with_degree(n).unwrap().gamma_nested().unwrap();
            assert_eq!(&big[..small.len()], &small[..]);
        }
        assert_eq!(big.len() as u128, s.cardinality());
    }

    #[test]
    fn first_omitted_is_the_minimum_of_the_rest() {
        let s = SpectrumSpec::new(3, vec![0, 1, 5], 2).unwrap();
        let g = s.gamma_set().unwrap();
        let bigger = s.with_degree(6).unwrap().gamma_set().unwrap();
        let rest_min = bigger.iter().filter(|x| g.binary_search(x).is_err()).min().unwrap();
        assert_eq!(s.first_omitted(), Some(*rest_min as f64));
        // max(Gamma_n) exceeds the first omitted element when max(L) >= R
        assert!(s.max_element() as f64 > s.first_omitted().unwrap());
    }
}
