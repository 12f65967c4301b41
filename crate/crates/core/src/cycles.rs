//! Extreme cycles of `(R, B, L)` and the no-nontrivial-cycle spectrality test.
//!
//! An extreme cycle is a finite orbit `x_0 -> x_1 -> ... -> x_0` of the maps
//! `x -> (x + l) / R`, `l in L`, on which `|chi_B| = 1`. With `0 in B` the
//! modulus condition means `b x in Z` for every digit, i.e. `x in (1/g) Z` with
//! `g = gcd(B)`, so the search runs over finitely many rationals `k/g` in the
//! attractor of the `L`-maps.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::complement::gcd_of_digits;
use crate::error::{Error, Result};
use crate::hadamard::{HadamardTriple, DEFAULT_TOL};
use crate::ifs::validate_digits;

const NODE_BUDGET: i64 = 1 << 22;
const CYCLE_BUDGET: usize = 1 << 16;

fn validate_l(l: &[i64]) -> Result<()> {
    validate_digits(l)?;
    match l.iter().find(|&&x| x < 0) {
        Some(&neg) => Err(Error::NegativeDigit(neg)),
        None => Ok(()),
    }
}

/// Smallest interval mapped into itself by every `x -> (x + l) / R`:
/// `[min(L)/(R-1), max(L)/(R-1)]`.
pub fn attractor_interval(r: i64, l: &[i64]) -> Result<(Ratio<i64>, Ratio<i64>)> {
    if r < 2 {
        return Err(Error::InvalidScale(r));
    }
    validate_l(l)?;
    let lo = *l.iter().min().expect("nonempty");
    let hi = *l.iter().max().expect("nonempty");
    Ok((Ratio::new(lo, r - 1), Ratio::new(hi, r - 1)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremeCycle {
    /// Cycle points in orbit order, starting from the smallest.
    pub points: Vec<Ratio<i64>>,
    /// `digits[i]` maps `points[i]` to `points[i + 1]` (cyclically).
    pub digits: Vec<i64>,
    /// The fixed point `{0}`.
    pub trivial: bool,
}

impl ExtremeCycle {
    /// Re-checks the transition relation and `b x in Z` for the translated digits.
    pub fn verify(&self, r: i64, b: &[i64]) -> bool {
        let shift = *b.iter().min().expect("nonempty");
        let p = self.points.len();
        let closes = (0..p).all(|i| {
            (self.points[i] + self.digits[i]) / r == self.points[(i + 1) % p]
        });
        let unimodular = self
            .points
            .iter()
            .all(|x| b.iter().all(|&d| (*x * (d - shift)).is_integer()));
        closes && unimodular && p == self.digits.len()
    }
}

/// All extreme cycles of `(R, B, L)`, the trivial one included when present.
pub fn extreme_cycles(r: i64, b: &[i64], l: &[i64]) -> Result<Vec<ExtremeCycle>> {
    validate_digits(b)?;
    if b.len() < 2 {
        return Err(Error::InvalidArgument("extreme cycles need #B >= 2".into()));
    }
    let (lo, hi) = attractor_interval(r, l)?;
    let shift = *b.iter().min().expect("nonempty");
    let translated: Vec<i64> = b.iter().map(|d| d - shift).collect();
    let g = gcd_of_digits(&translated)?;

    // candidates k/g with lo <= k/g <= hi
    let k_lo = (lo * g).ceil().to_integer();
    let k_hi = (hi * g).floor().to_integer();
    let count = k_hi - k_lo + 1;
    if count > NODE_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "extreme cycle candidates",
            requested: count as u128,
            budget: NODE_BUDGET as u128,
        });
    }
    let mut digits = l.to_vec();
    digits.sort_unstable();
    let adj: Vec<Vec<(i64, usize)>> = (k_lo..=k_hi)
        .map(|k| {
            digits
                .iter()
                .filter_map(|&d| {
                    let num = k + g * d;
                    (num % r == 0).then(|| (d, (num / r - k_lo) as usize))
                })
                .collect()
        })
        .collect();

    let mut cycles = Vec::new();
    let mut on_path = vec![false; adj.len()];
    for start in 0..adj.len() {
        let mut path = vec![start];
        let mut labels = Vec::new();
        on_path[start] = true;
        collect_cycles(start, start, &adj, &mut path, &mut labels, &mut on_path, &mut cycles)?;
        on_path[start] = false;
    }
    Ok(cycles
        .into_iter()
        .map(|(nodes, labels)| {
            let points: Vec<Ratio<i64>> = nodes
                .iter()
                .map(|&i| Ratio::new(k_lo + i as i64, g))
                .collect();
            let trivial = points.len() == 1 && points[0] == Ratio::from_integer(0);
            ExtremeCycle {
                points,
                digits: labels,
                trivial,
            }
        })
        .collect())
}

/// Simple cycles whose minimal node is `start`.
fn collect_cycles(
    start: usize,
    v: usize,
    adj: &[Vec<(i64, usize)>],
    path: &mut Vec<usize>,
    labels: &mut Vec<i64>,
    on_path: &mut [bool],
    out: &mut Vec<(Vec<usize>, Vec<i64>)>,
) -> Result<()> {
    for &(d, w) in &adj[v] {
        if w == start {
            let mut l = labels.clone();
            l.push(d);
            out.push((path.clone(), l));
            if out.len() > CYCLE_BUDGET {
                return Err(Error::BudgetExceeded {
                    what: "extreme cycles",
                    requested: out.len() as u128,
                    budget: CYCLE_BUDGET as u128,
                });
            }
        } else if w > start && !on_path[w] {
            on_path[w] = true;
            path.push(w);
            labels.push(d);
            collect_cycles(start, w, adj, path, labels, on_path, out)?;
            labels.pop();
            path.pop();
            on_path[w] = false;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralVerdict {
    pub hadamard: bool,
    pub nontrivial_cycles: Vec<ExtremeCycle>,
    /// Hadamard and free of nontrivial extreme cycles: `Gamma(L)` is a spectrum for `mu_B`.
    pub spectral: bool,
}

/// Decides whether `Gamma(L)` is a spectrum of `mu_B` by the extreme-cycle criterion.
pub fn is_spectral_pair(r: i64, b: &[i64], l: &[i64]) -> Result<SpectralVerdict> {
    if !l.contains(&0) {
        return Err(Error::MissingZero);
    }
    let hadamard = HadamardTriple::new(r, b.to_vec(), l.to_vec())?
        .is_hadamard(DEFAULT_TOL)?
        .hadamard;
    let nontrivial_cycles: Vec<ExtremeCycle> = extreme_cycles(r, b, l)?
        .into_iter()
        .filter(|c| !c.trivial)
        .collect();
    Ok(SpectralVerdict {
        hadamard,
        spectral: hadamard && nontrivial_cycles.is_empty(),
        nontrivial_cycles,
    })
}
