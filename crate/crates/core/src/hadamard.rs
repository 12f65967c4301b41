//! Hadamard systems `(R, B, L)`: the matrix `(1/sqrt(N)) (e^{2 pi i b l / R})`
//! indexed by `b in B`, `l in L` is unitary.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::RootsOfUnity;
use crate::error::{check_tol, Error, Result};
use crate::ifs::validate_digits;
use crate::numeric::cis_turns;

/// Default tolerance for the floating-point verdict.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Scales above this use the floating-point path only.
const EXACT_MAX_SCALE: i64 = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HadamardTriple {
    #[serde(rename = "R")]
    scale: i64,
    #[serde(rename = "B")]
    b: Vec<i64>,
    #[serde(rename = "L")]
    l: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HadamardVerdict {
    pub hadamard: bool,
    /// The verdict was decided in exact cyclotomic arithmetic.
    pub exact: bool,
    /// `max |H* H - I|` in floating point; absent when the shapes differ.
    pub max_deviation: Option<f64>,
    pub reason: Option<String>,
}

impl HadamardTriple {
    pub fn new(scale: i64, b: impl Into<Vec<i64>>, l: impl Into<Vec<i64>>) -> Result<Self> {
        let (b, l) = (b.into(), l.into());
        if scale < 2 {
            return Err(Error::InvalidScale(scale));
        }
        validate_digits(&b)?;
        validate_digits(&l)?;
        Ok(Self { scale, b, l })
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn b(&self) -> &[i64] {
        &self.b
    }

    pub fn l(&self) -> &[i64] {
        &self.l
    }

    /// The triple with the roles of `B` and `L` exchanged.
    pub fn transposed(&self) -> Self {
        Self {
            scale: self.scale,
            b: self.l.clone(),
            l: self.b.clone(),
        }
    }

    /// The normalized matrix, rows indexed by `B`.
    pub fn matrix(&self) -> Vec<Vec<Complex64>> {
        let norm = 1.0 / (self.b.len() as f64).sqrt();
        self.b
            .iter()
            .map(|&b| {
                self.l
                    .iter()
                    .map(|&l| cis_turns(self.phase(b, l)) * norm)
                    .collect()
            })
            .collect()
    }

    /// `b l / R mod 1`, reduced in integers.
    fn phase(&self, b: i64, l: i64) -> f64 {
        let m = (b as i128 * l as i128).rem_euclid(self.scale as i128);
        m as f64 / self.scale as f64
    }

    fn mismatch(&self) -> Option<HadamardVerdict> {
        (self.b.len() != self.l.len()).then(|| HadamardVerdict {
            hadamard: false,
            exact: true,
            max_deviation: None,
            reason: Some("cardinality mismatch".into()),
        })
    }

    /// `max_{l, l'} |(H* H)_{l l'} - delta_{l l'}|`.
    pub fn max_deviation(&self) -> f64 {
        let n = self.b.len() as f64;
        let mut worst: f64 = 0.0;
        for (i, &l1) in self.l.iter().enumerate() {
            for &l2 in &self.l[i..] {
                let mut acc = Complex64::new(0.0, 0.0);
                for &b in &self.b {
                    acc += cis_turns(self.phase(b, l2 - l1));
                }
                let target = if l1 == l2 { 1.0 } else { 0.0 };
                worst = worst.max((acc / n - target).norm());
            }
        }
        worst
    }

    /// Floating-point verdict: unitary iff the deviation is at most `tol`.
    pub fn is_hadamard_numeric(&self, tol: f64) -> Result<HadamardVerdict> {
        check_tol(tol)?;
        if let Some(v) = self.mismatch() {
            return Ok(v);
        }
        let dev = self.max_deviation();
        Ok(HadamardVerdict {
            hadamard: dev <= tol,
            exact: false,
            max_deviation: Some(dev),
            reason: (dev > tol).then(|| format!("deviation {dev:e} exceeds {tol:e}")),
        })
    }

    /// Exact verdict by root-of-unity summation; `None` when out of range.
    pub fn is_hadamard_exact(&self) -> Option<HadamardVerdict> {
        if let Some(v) = self.mismatch() {
            return Some(v);
        }
        if self.scale > EXACT_MAX_SCALE {
            return None;
        }
        let roots = RootsOfUnity::new(self.scale as u32);
        let mut counts = vec![0i64; self.scale as usize];
        let mut reason = None;
        'outer: for (i, &l1) in self.l.iter().enumerate() {
            for &l2 in &self.l[i + 1..] {
                counts.iter_mut().for_each(|c| *c = 0);
                for &b in &self.b {
                    let k = (b as i128 * (l2 - l1) as i128).rem_euclid(self.scale as i128);
                    counts[k as usize] += 1;
                }
                if !roots.vanishes(&counts)? {
                    reason = Some(format!("columns {l1} and {l2} are not orthogonal"));
                    break 'outer;
                }
            }
        }
        Some(HadamardVerdict {
            hadamard: reason.is_none(),
            exact: true,
            max_deviation: Some(self.max_deviation()),
            reason,
        })
    }

    /// Exact verdict whenever possible, floating point with `tol` otherwise.
    pub fn is_hadamard(&self, tol: f64) -> Result<HadamardVerdict> {
        check_tol(tol)?;
        match self.is_hadamard_exact() {
            Some(v) => Ok(v),
            None => self.is_hadamard_numeric(tol),
        }
    }
}

/// True iff the residues of `l` modulo `r` are pairwise distinct.
pub fn incongruent_mod_r(l: &[i64], r: i64) -> bool {
    let mut residues: Vec<i64> = l.iter().map(|x| x.rem_euclid(r)).collect();
    residues.sort_unstable();
    residues.windows(2).all(|w| w[0] != w[1])
}
