//! Complementing pairs `A (+) A' = {0, ..., R-1}` and the recursive
//! construction of dual digit sets `(L, L')`.
//!
//! Every complementing pair with `A, A' != {0}` splits as
//! `A = dC (+) {0, ..., d-1}`, `A' = dC'` (or with the roles exchanged) where
//! `d >= 2` divides `R` and `C (+) C' = {0, ..., R/d - 1}`. Recursing on
//! `(C, C', R/d)` yields sets `L, L'` with `(R, A, L)` and `(R, A', L')`
//! Hadamard and `L (+) L' = {0, ..., R-1}`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hadamard::HadamardTriple;

/// True iff every `k in {0, ..., R-1}` is uniquely `a + a'`.
pub fn is_complementing(a: &[i64], a_prime: &[i64], r: i64) -> bool {
    if r < 1 || a.len() * a_prime.len() != r as usize {
        return false;
    }
    let mut hit = vec![false; r as usize];
    for &x in a {
        for &y in a_prime {
            let s = x + y;
            if x < 0 || y < 0 || s >= r || hit[s as usize] {
                return false;
            }
            hit[s as usize] = true;
        }
    }
    true
}

/// Which alternative of the splitting lemma applies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum Decomposition {
    /// `A = {0}` or `A' = {0}`.
    Trivial,
    /// `1 in A`: `A = dC (+) {0..d-1}`, `A' = dC'`.
    OneInA { d: i64, c: Vec<i64>, c_prime: Vec<i64> },
    /// `1 in A'`: `A' = dC' (+) {0..d-1}`, `A = dC`.
    OneInAPrime { d: i64, c: Vec<i64>, c_prime: Vec<i64> },
}

impl Decomposition {
    /// The lemma's numbering: 1, 2 or 3.
    pub fn case_number(&self) -> u8 {
        match self {
            Decomposition::Trivial => 1,
            Decomposition::OneInA { .. } => 2,
            Decomposition::OneInAPrime { .. } => 3,
        }
    }
}

fn sorted(v: &[i64]) -> Vec<i64> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

fn is_zero_set(v: &[i64]) -> bool {
    v.iter().all(|&x| x == 0)
}

/// Splits the side containing 1 as `dC (+) {0..d-1}` and the other side as `dC'`.
///
/// `d` is the length of the maximal initial run `{0, 1, ..., d-1}` inside the
/// side holding 1; the split is then verified.
pub fn decompose(a: &[i64], a_prime: &[i64], r: i64) -> Result<Decomposition> {
    if !is_complementing(a, a_prime, r) {
        return Err(Error::NotComplementing(r));
    }
    if is_zero_set(a) || is_zero_set(a_prime) {
        return Ok(Decomposition::Trivial);
    }
    let one_in_a = a.contains(&1);
    let (run_side, other) = if one_in_a { (a, a_prime) } else { (a_prime, a) };
    let run_side = sorted(run_side);
    let d = (1..)
        .find(|k| run_side.binary_search(k).is_err())
        .expect("finite set");
    let fail = |what: &str| Error::Hypothesis(format!("split with d = {d} failed: {what}"));
    if r % d != 0 {
        return Err(fail("d does not divide R"));
    }
    let c: Vec<i64> = run_side.iter().filter(|x| *x % d == 0).map(|x| x / d).collect();
    let rebuilt = sorted(
        &c.iter()
            .flat_map(|&ci| (0..d).map(move |i| d * ci + i))
            .collect::<Vec<_>>(),
    );
    if rebuilt != run_side {
        return Err(fail("side holding 1 is not dC + {0..d-1}"));
    }
    if other.iter().any(|x| x % d != 0) {
        return Err(fail("other side is not a multiple of d"));
    }
    let c_prime = sorted(&other.iter().map(|x| x / d).collect::<Vec<_>>());
    if !is_complementing(&c, &c_prime, r / d) {
        return Err(fail("C and C' are not complementing"));
    }
    Ok(if one_in_a {
        Decomposition::OneInA { d, c, c_prime }
    } else {
        // the run lives in A', so A' = dC' + {0..d-1} and A = dC
        Decomposition::OneInAPrime {
            d,
            c: c_prime,
            c_prime: c,
        }
    })
}

/// Greatest common divisor of the nonzero elements.
pub fn gcd_of_digits(a: &[i64]) -> Result<i64> {
    a.iter()
        .filter(|&&x| x != 0)
        .fold(None, |acc: Option<i64>, &x| Some(acc.map_or(x.abs(), |g| g.gcd(&x))))
        .ok_or_else(|| Error::InvalidArgument("gcd needs a nonzero element".into()))
}

/// Results of the independent checks run on a dual pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualCertificate {
    /// `L (+) L' = {0, ..., R-1}`.
    pub direct_sum: bool,
    /// `(R, A, L)` is Hadamard (exact verdict).
    pub hadamard: bool,
    /// `(R, A', L')` is Hadamard (exact verdict).
    pub hadamard_prime: bool,
    /// `gcd(A) max(L) < R`.
    pub gcd_bound: bool,
    /// `gcd(A') max(L') < R`.
    pub gcd_bound_prime: bool,
    /// `gcd(A)` and `gcd(A')` divide `R`.
    pub gcd_divides: bool,
}

impl DualCertificate {
    pub fn all_passed(&self) -> bool {
        self.direct_sum
            && self.hadamard
            && self.hadamard_prime
            && self.gcd_bound
            && self.gcd_bound_prime
            && self.gcd_divides
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualSets {
    #[serde(rename = "R")]
    pub scale: i64,
    #[serde(rename = "L")]
    pub l: Vec<i64>,
    #[serde(rename = "Lp")]
    pub l_prime: Vec<i64>,
    pub gcd_a: i64,
    pub gcd_a_prime: i64,
    pub certificate: DualCertificate,
}

fn dual_rec(a: &[i64], a_prime: &[i64], r: i64) -> Result<(Vec<i64>, Vec<i64>)> {
    let full: Vec<i64> = (0..r).collect();
    match decompose(a, a_prime, r)? {
        Decomposition::Trivial if is_zero_set(a) => Ok((vec![0], full)),
        Decomposition::Trivial => Ok((full, vec![0])),
        Decomposition::OneInA { d, c, c_prime } => {
            let (m, m_prime) = dual_rec(&c, &c_prime, r / d)?;
            Ok((spread(&m, r / d, d), m_prime))
        }
        Decomposition::OneInAPrime { d, c, c_prime } => {
            let (m, m_prime) = dual_rec(&c, &c_prime, r / d)?;
            Ok((m, spread(&m_prime, r / d, d)))
        }
    }
}

/// `M (+) step {0, ..., count-1}`, sorted.
fn spread(m: &[i64], step: i64, count: i64) -> Vec<i64> {
    sorted(
        &m.iter()
            .flat_map(|&x| (0..count).map(move |j| x + step * j))
            .collect::<Vec<_>>(),
    )
}

/// Builds `(L, L')` for a complementing pair with `A, A' != {0}` and certifies it.
pub fn dual_spectra_sets(a: &[i64], a_prime: &[i64], r: i64) -> Result<DualSets> {
    if r < 2 {
        return Err(Error::InvalidScale(r));
    }
    if !is_complementing(a, a_prime, r) {
        return Err(Error::NotComplementing(r));
    }
    if is_zero_set(a) || is_zero_set(a_prime) {
        return Err(Error::Hypothesis("A and A' must both differ from {0}".into()));
    }
    let (l, l_prime) = dual_rec(a, a_prime, r)?;
    let gcd_a = gcd_of_digits(a)?;
    let gcd_a_prime = gcd_of_digits(a_prime)?;
    let exact = |b: &[i64], l: &[i64]| -> Result<bool> {
        let t = HadamardTriple::new(r, b.to_vec(), l.to_vec())?;
        Ok(t.is_hadamard_exact().map(|v| v.hadamard).unwrap_or(false))
    };
    let max = |v: &[i64]| *v.iter().max().expect("nonempty");
    let certificate = DualCertificate {
        direct_sum: is_complementing(&l, &l_prime, r),
        hadamard: exact(a, &l)?,
        hadamard_prime: exact(a_prime, &l_prime)?,
        gcd_bound: gcd_a * max(&l) < r,
        gcd_bound_prime: gcd_a_prime * max(&l_prime) < r,
        gcd_divides: r % gcd_a == 0 && r % gcd_a_prime == 0,
    };
    Ok(DualSets {
        scale: r,
        l,
        l_prime,
        gcd_a,
        gcd_a_prime,
        certificate,
    })
}

/// Every ordered complementing pair `(A, A')` of `{0, ..., R-1}`, trivial ones included.
///
/// Backtracking over `k = 0, 1, ...`: an element not yet covered by `A + A'`
/// must itself join `A` or `A'`, and a covered one can join neither.
pub fn enumerate_complementing_pairs(r: i64) -> Vec<(Vec<i64>, Vec<i64>)> {
    struct Search {
        r: usize,
        a: Vec<i64>,
        ap: Vec<i64>,
        covered: Vec<bool>,
        out: Vec<(Vec<i64>, Vec<i64>)>,
    }

    impl Search {
        fn place(&mut self, k: usize, into_a: bool) -> bool {
            let partners = if into_a { &self.ap } else { &self.a };
            let ok = partners
                .iter()
                .all(|&p| k + (p as usize) < self.r && !self.covered[k + p as usize]);
            if !ok {
                return false;
            }
            for &p in partners {
                self.covered[k + p as usize] = true;
            }
            if into_a {
                self.a.push(k as i64);
            } else {
                self.ap.push(k as i64);
            }
            true
        }

        fn unplace(&mut self, k: usize, from_a: bool) {
            if from_a {
                self.a.pop();
            } else {
                self.ap.pop();
            }
            let partners = if from_a { &self.ap } else { &self.a };
            for &p in partners {
                self.covered[k + p as usize] = false;
            }
        }

        fn run(&mut self, k: usize) {
            if k == self.r {
                self.out.push((self.a.clone(), self.ap.clone()));
                return;
            }
            if self.covered[k] {
                self.run(k + 1);
                return;
            }
            for into_a in [true, false] {
                if self.place(k, into_a) {
                    self.run(k + 1);
                    self.unplace(k, into_a);
                }
            }
        }
    }

    if r < 1 {
        return Vec::new();
    }
    let mut s = Search {
        r: r as usize,
        a: vec![0],
        ap: vec![0],
        covered: vec![false; r as usize],
        out: Vec::new(),
    };
    s.covered[0] = true;
    s.run(1);
    s.out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complementing_examples() {
        assert!(is_complementing(&[0, 2], &[0, 1], 4));
        assert!(is_complementing(&[0, 1, 2, 3, 4], &[0], 5));
        assert!(!is_complementing(&[0, 2], &[0, 2], 4));
        assert!(!is_complementing(&[0, 1], &[0, 1], 4));
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(
            decompose(&[0, 2], &[0, 1], 4),
            Ok(Decomposition::OneInAPrime {
                d: 2,
                c: vec![0, 1],
                c_prime: vec![0]
            })
        );
        assert_eq!(decompose(&[0, 1, 2, 3, 4, 5], &[0], 6), Ok(Decomposition::Trivial));
        assert_eq!(
            decompose(&[0, 1], &[0, 2], 4),
            Ok(Decomposition::OneInA {
                d: 2,
                c: vec![0],
                c_prime: vec![0, 1]
            })
        );
        assert_eq!(decompose(&[0, 2], &[0, 2], 4), Err(Error::NotComplementing(4)));
    }

    #[test]
    fn decompose_reassembles_the_side_holding_one() {
        for r in 2..=24 {
            for (a, ap) in enumerate_complementing_pairs(r) {
                match decompose(&a, &ap, r).unwrap() {
                    Decomposition::Trivial => assert!(a == [0] || ap == [0]),
                    Decomposition::OneInA { d, c, .. } => assert_eq!(sorted(&a), reassemble(&c, d)),
                    Decomposition::OneInAPrime { d, c_prime, .. } => {
                        assert_eq!(sorted(&ap), reassemble(&c_prime, d))
                    }
                }
            }
        }
    }

    fn reassemble(c: &[i64], d: i64) -> Vec<i64> {
        sorted(&c.iter().flat_map(|&x| (0..d).map(move |i| d * x + i)).collect::<Vec<_>>())
    }

    #[test]
    fn dual_examples() {
        let ds = dual_spectra_sets(&[0, 2], &[0, 1], 4).unwrap();
        assert_eq!((ds.l.clone(), ds.l_prime.clone()), (vec![0, 1], vec![0, 2]));
        assert!(ds.certificate.all_passed());
        let ds = dual_spectra_sets(&[0, 1], &[0, 2], 4).unwrap();
        assert_eq!((ds.l.clone(), ds.l_prime.clone()), (vec![0, 2], vec![0, 1]));
        assert!(ds.certificate.all_passed());
        assert!(matches!(
            dual_spectra_sets(&[0, 1], &[0], 2),
            Err(Error::Hypothesis(_))
        ));
        assert_eq!(dual_spectra_sets(&[0, 2], &[0, 2], 4), Err(Error::NotComplementing(4)));
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd_of_digits(&[0, 2]), Ok(2));
        assert_eq!(gcd_of_digits(&[0, 2, 3]), Ok(1));
        assert_eq!(gcd_of_digits(&[0, 4, 6]), Ok(2));
        assert!(gcd_of_digits(&[0]).is_err());
    }

    #[test]
    fn enumeration_matches_brute_force_for_small_r() {
        for r in 1..=12i64 {
            let mut brute = Vec::new();
            for amask in 0u32..(1 << r) {
                if amask & 1 == 0 {
                    continue;
                }
                let a: Vec<i64> = (0..r).filter(|i| amask >> i & 1 == 1).collect();
                for bmask in 0u32..(1 << r) {
                    if bmask & 1 == 0 {
                        continue;
                    }
                    let b: Vec<i64> = (0..r).filter(|i| bmask >> i & 1 == 1).collect();
                    if is_complementing(&a, &b, r) {
                        brute.push((a.clone(), b));
                    }
                }
            }
            let mut fast = enumerate_complementing_pairs(r);
            fast.iter_mut().for_each(|(a, b)| {
                a.sort_unstable();
                b.sort_unstable();
            });
            fast.sort();
            brute.sort();
            assert_eq!(fast, brute, "R = {r}");
        }
    }
}
