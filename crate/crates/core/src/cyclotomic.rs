//! Exact arithmetic in `Z[zeta_n]`, `zeta_n = e^{2 pi i / n}`.
//!
//! An integer combination `sum_k c_k zeta_n^k` vanishes iff the polynomial
//! `sum_k c_k x^k` is divisible by the cyclotomic polynomial `Phi_n`.

use std::collections::BTreeMap;

/// Coefficients (constant term first) of `Phi_n`.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i128> {
    let mut memo = BTreeMap::new();
    cyclotomic_memo(n, &mut memo)
}

fn cyclotomic_memo(n: u32, memo: &mut BTreeMap<u32, Vec<i128>>) -> Vec<i128> {
    assert!(n >= 1);
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    // x^n - 1
    let mut num = vec![0i128; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi_d = cyclotomic_memo(d, memo);
            num = exact_quotient(&num, &phi_d);
        }
    }
    memo.insert(n, num.clone());
    num
}

/// Quotient of `a` by the monic polynomial `m`, assuming exact divisibility.
fn exact_quotient(a: &[i128], m: &[i128]) -> Vec<i128> {
    let dm = m.len() - 1;
    let mut rem = a.to_vec();
    let mut q = vec![0i128; a.len() - dm];
    for i in (dm..a.len()).rev() {
        let c = rem[i];
        if c != 0 {
            q[i - dm] = c;
            for (j, &mj) in m.iter().enumerate() {
                rem[i - dm + j] -= c * mj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    q
}

/// Precomputed `Phi_n` for repeated vanishing tests.
#[derive(Debug, Clone)]
pub struct RootsOfUnity {
    order: u32,
    phi: Vec<i128>,
}

impl RootsOfUnity {
    pub fn new(order: u32) -> Self {
        Self {
            order,
            phi: cyclotomic_polynomial(order),
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Decides `sum_k counts[k] zeta^k == 0` exactly. Returns `None` on overflow.
    pub fn vanishes(&self, counts: &[i64]) -> Option<bool> {
        debug_assert_eq!(counts.len(), self.order as usize);
        let dm = self.phi.len() - 1;
        let mut rem: Vec<i128> = counts.iter().map(|&c| c as i128).collect();
        for i in (dm..rem.len()).rev() {
            let c = rem[i];
            if c != 0 {
                for (j, &pj) in self.phi.iter().enumerate() {
                    let t = c.checked_mul(pj)?;
                    rem[i - dm + j] = rem[i - dm + j].checked_sub(t)?;
                }
            }
        }
        Some(rem[..dm.min(rem.len())].iter().all(|&c| c == 0))
    }
}
