//! Precision-loss bounds for reduction of poles and the choice of working
//! precision.
//!
//! `f(m)` is the number of p-adic digits that reducing a form with pole order
//! `m` can cost. [`f0`] and [`factorial_bound`] are closed-form upper bounds;
//! [`refine_table`] sharpens them iteratively and [`choose_working_precision`]
//! turns the table into a truncation point for the Frobenius series.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Passes of the refinement loop before the current table is returned as is.
pub const REFINE_PASS_CAP: usize = 20;

/// Largest `e` with `p^e <= x` (0 for `x < p`).
pub fn ilog(x: u64, p: u64) -> u64 {
    let mut e = 0;
    let mut acc = p as u128;
    while acc <= x as u128 {
        acc *= p as u128;
        e += 1;
    }
    e
}

/// `sum_{i=1}^{n} floor(log_p max(1, m - i))`.
pub fn f0(m: u64, n: u64, p: u64) -> u64 {
    (1..=n).map(|i| ilog(m.saturating_sub(i).max(1), p)).sum()
}

/// `v_p(k!)` by Legendre's formula.
pub fn vp_factorial(k: u64, p: u64) -> u64 {
    let mut v = 0;
    let mut q = k;
    while q > 0 {
        q /= p;
        v += q;
    }
    v
}

/// `v_p((m-1)!)`.
pub fn factorial_bound(m: u64, p: u64) -> u64 {
    assert!(m >= 1);
    vp_factorial(m - 1, p)
}

/// `v_p(binom(-m, i)) = v_p(binom(m+i-1, i))`, the number of carries when
/// adding `i` and `m-1` in base `p`.
pub fn carries_g(m: u64, i: u64, p: u64) -> u64 {
    assert!(m >= 1);
    vp_factorial(m + i - 1, p) - vp_factorial(i, p) - vp_factorial(m - 1, p)
}

fn pow_le(x: u64, n: u64, p: u64, e: i64) -> bool {
    if e < 0 {
        return false;
    }
    BigUint::from(x).pow(n as u32) <= BigUint::from(p).pow(e as u32)
}

/// Upper bounds `A(j)` on `f(j)` for `j = 1..len`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LossTable {
    pub p: u64,
    pub n: u64,
    /// `entries[j - 1] = A(j)`.
    pub entries: Vec<u64>,
    /// True when the refinement loop hit [`REFINE_PASS_CAP`] before stabilising.
    pub capped: bool,
}

impl LossTable {
    /// The empty table: every lookup falls back to `f0`.
    pub fn empty(p: u64, n: u64) -> Self {
        LossTable {
            p,
            n,
            entries: Vec::new(),
            capped: false,
        }
    }

    /// `f0` tabulated for `j = 1..=len`.
    pub fn from_f0(p: u64, n: u64, len: u64) -> Self {
        LossTable {
            p,
            n,
            entries: (1..=len).map(|j| f0(j, n, p)).collect(),
            capped: false,
        }
    }

    pub fn len(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `A(j)`, falling back to `f0(j)` beyond the table.
    pub fn get(&self, j: u64) -> u64 {
        assert!(j >= 1);
        self.entries
            .get(j as usize - 1)
            .copied()
            .unwrap_or_else(|| f0(j, self.n, self.p))
    }

    pub fn stored(&self, j: u64) -> Option<u64> {
        self.entries.get((j as usize).checked_sub(1)?).copied()
    }
}

/// One run of the refinement algorithm, extending `a0` to cover at least `m`.
///
/// After [`REFINE_PASS_CAP`] passes without stabilising, the current table is
/// returned with `capped` set; every entry is still a valid bound.
pub fn refine_table(m: u64, a0: &LossTable) -> LossTable {
    let (p, n) = (a0.p, a0.n);
    let len = n.max(m);
    // a[0] is a placeholder so that a[j] = A(j).
    let mut a: Vec<u64> = std::iter::once(0)
        .chain((1..=len).map(|j| a0.stored(j).unwrap_or_else(|| f0(j, n, p))))
        .collect();
    let mut passes = 0;
    loop {
        let before = a.clone();
        let mut j = n + 1;
        while (j as usize) < a.len() {
            let j1 = p * j.div_ceil(p);
            let mut big_n = n - 1 + a[(j1 / p) as usize];
            let mut l = 1u64;
            loop {
                let x = j1 + l * p;
                if n * p < x && pow_le(x, n, p, (big_n + l) as i64) {
                    let v = big_n.min(f0(j1, n, p));
                    if a.len() <= j1 as usize {
                        a.resize(j1 as usize + 1, v);
                    }
                    for t in j..=j1 {
                        a[t as usize] = v;
                    }
                    j = j1 + 1;
                    break;
                }
                let gg = carries_g(j1, l, p);
                if (f0(x, n, p) as i64) - (l as i64) - (gg as i64) <= big_n as i64 {
                    l += 1;
                    continue;
                }
                while a.len() <= x as usize {
                    let k = a.len() as u64;
                    a.push(f0(k, n, p));
                }
                big_n = (a[x as usize] as i64 - l as i64 - gg as i64).max(big_n as i64) as u64;
                l += 1;
            }
        }
        if a == before {
            return LossTable {
                p,
                n,
                entries: a[1..].to_vec(),
                capped: a0.capped,
            };
        }
        passes += 1;
        if passes >= REFINE_PASS_CAP {
            return LossTable {
                p,
                n,
                entries: a[1..].to_vec(),
                capped: true,
            };
        }
    }
}

/// Like [`refine_table`] but fails instead of returning a capped table.
pub fn refine_table_strict(m: u64, a0: &LossTable) -> Result<LossTable> {
    let t = refine_table(m, &LossTable { capped: false, ..a0.clone() });
    if t.capped {
        Err(Error::RefinementUnstable(REFINE_PASS_CAP))
    } else {
        Ok(t)
    }
}

/// Working precision for a target final precision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionPlan {
    pub p: u64,
    pub n: u64,
    /// Target final precision.
    pub r: u64,
    /// Series truncation precision.
    pub s: u64,
    /// Largest series index kept: `s - n`.
    pub j_max: u64,
    pub table: LossTable,
}

impl PrecisionPlan {
    /// Largest pole order that occurs in a truncated Frobenius image.
    pub fn max_pole(&self) -> u64 {
        self.p * (self.n + self.j_max)
    }

    /// Digits carried through reduction: enough that the worst-case deferred
    /// division by `(max_pole - 1)!` still leaves `r` digits.
    pub fn arithmetic_precision(&self) -> u64 {
        self.s
            .max(self.r + factorial_bound(self.max_pole(), self.p))
    }

    /// Check that every dropped series term vanishes modulo `p^r`, up to the
    /// point where the closed-form tail bound takes over.
    pub fn verify_truncation(&self) -> bool {
        let (p, n, r) = (self.p, self.n, self.r as i64);
        let mut j = self.s as i64 - n as i64 + 1;
        loop {
            let e = n as i64 - 1 + j - r;
            if j > 0 && pow_le(p * (n + j as u64) - 1, n, p, e) {
                return true;
            }
            if j > 0 {
                for h in 1..=n {
                    let loss = self.table.get(p * (h + j as u64)) as i64;
                    if n as i64 - 1 + j - loss < r {
                        return false;
                    }
                }
            }
            j += 1;
        }
    }
}

/// Choose the series truncation `s` for final precision `r`.
pub fn choose_working_precision(r: u64, n: u64, p: u64) -> Result<PrecisionPlan> {
    plan_with(r, n, p, |m, a| Ok(refine_table(m, a)))
}

/// As [`choose_working_precision`] but fails if refinement does not stabilise.
pub fn choose_working_precision_strict(r: u64, n: u64, p: u64) -> Result<PrecisionPlan> {
    plan_with(r, n, p, refine_table_strict)
}

/// The same search using only `f0`, without refinement.
pub fn choose_working_precision_f0(r: u64, n: u64, p: u64) -> Result<PrecisionPlan> {
    plan_with(r, n, p, |m, a| Ok(LossTable::from_f0(a.p, a.n, m.max(a.len()))))
}

fn plan_with(
    r: u64,
    n: u64,
    p: u64,
    refine: impl Fn(u64, &LossTable) -> Result<LossTable>,
) -> Result<PrecisionPlan> {
    if r < 1 {
        return Err(Error::Input("target precision must be at least 1".into()));
    }
    if n < 1 {
        return Err(Error::Input("dimension must be at least 1".into()));
    }
    if !crate::residue::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut s = r;
    let mut table = LossTable::empty(p, n);
    loop {
        let mut j = s as i64 - n as i64 + 1;
        let bumped = loop {
            let e = n as i64 - 1 + j - r as i64;
            if j > 0 && pow_le(p * (n + j as u64) - 1, n, p, e) {
                break false;
            }
            if j <= 0 {
                break true;
            }
            let m = p * (n + j as u64);
            table = refine(m, &table)?;
            if table.get(m) as i64 > e {
                break true;
            }
            j += 1;
        };
        if !bumped {
            return Ok(PrecisionPlan {
                p,
                n,
                r,
                s,
                j_max: s - n.min(s),
                table,
            });
        }
        s += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn f0_examples() {
        assert_eq!(f0(1, 3, 3), 0);
        assert_eq!(f0(4, 3, 3), 1);
        // floor(log2 9) + floor(log2 8) + floor(log2 7) = 3 + 3 + 2
        assert_eq!(f0(10, 3, 2), 8);
    }

    #[test]
    fn factorial_examples() {
        assert_eq!(factorial_bound(1, 7), 0);
        assert_eq!(factorial_bound(10, 3), 4);
        assert_eq!(factorial_bound(5, 2), 3);
    }

    #[test]
    fn carries_examples() {
        for m in 1..20 {
            assert_eq!(carries_g(m, 0, 3), 0);
        }
        assert_eq!(carries_g(2, 2, 3), 1);
        for i in 0..40 {
            assert_eq!(carries_g(1, i, 5), 0);
        }
    }

    #[test]
    fn published_precision_pairs() {
        for (r, s) in [(2, 6), (3, 7), (4, 10), (5, 11), (6, 12)] {
            assert_eq!(choose_working_precision(r, 3, 3).unwrap().s, s, "p=3 r={r}");
        }
        assert_eq!(choose_working_precision(4, 3, 2).unwrap().s, 13);
        assert_eq!(choose_working_precision(3, 3, 2).unwrap().s, 12);
        for p in [7, 11, 13, 17, 19] {
            assert_eq!(choose_working_precision(2, 3, p).unwrap().s, 4, "p={p}");
        }
        assert_eq!(choose_working_precision_f0(3, 3, 3).unwrap().s, 12);
    }

    #[test]
    fn plans_satisfy_truncation_check() {
        for (p, r) in [(3, 2), (3, 3), (3, 6), (2, 3), (5, 2), (7, 2)] {
            let plan = choose_working_precision(r, 3, p).unwrap();
            assert!(plan.verify_truncation(), "p={p} r={r}");
            assert_eq!(plan.j_max, plan.s - 3);
        }
    }

    #[test]
    fn strict_variant_reports_instability() {
        assert!(choose_working_precision_strict(2, 3, 3).is_ok());
        assert_eq!(
            choose_working_precision_strict(4, 3, 2),
            Err(Error::RefinementUnstable(REFINE_PASS_CAP))
        );
    }

    #[test]
    fn refinement_is_idempotent_on_stable_tables() {
        let a = refine_table(60, &LossTable::empty(3, 3));
        assert!(!a.capped);
        assert_eq!(refine_table(60, &a), a);
    }

    #[test]
    fn arithmetic_precision_covers_factorial_loss() {
        let plan = choose_working_precision(2, 3, 3).unwrap();
        assert_eq!(plan.max_pole(), 18);
        assert_eq!(plan.arithmetic_precision(), 8);
    }

    proptest! {
        #[test]
        fn refined_table_bounds(p in prop::sample::select(vec![2u64, 3, 5, 7]), n in 2u64..=3, m in 4u64..80) {
            let a0 = LossTable::empty(p, n);
            let a = refine_table(m, &a0);
            prop_assert!(a.len() >= m);
            for j in 1..=a.len() {
                if j <= n {
                    prop_assert_eq!(a.get(j), f0(j, n, p));
                } else {
                    let up = p * j.div_ceil(p);
                    prop_assert!(a.get(j) <= f0(up, n, p));
                    if up <= a.len() {
                        prop_assert_eq!(a.get(j), a.get(up));
                    }
                }
            }
        }

        #[test]
        fn working_precision_is_monotone(p in prop::sample::select(vec![3u64, 5, 7, 11]), r in 1u64..6) {
            let a = choose_working_precision(r, 3, p).unwrap();
            let b = choose_working_precision(r + 1, 3, p).unwrap();
            prop_assert!(b.s >= a.s);
        }
    }
}
