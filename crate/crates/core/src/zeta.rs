//! Exhaustive point counting over `F_{p^i}` and trace-formula checks against
//! a computed Frobenius matrix.

use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frobenius::FrobMatrix;
use crate::geometry::HypersurfaceSpec;
use crate::residue::Modulus;
use crate::spectral::ModMatrix;

/// Default bound on `p^{i n}`, the number of candidate points enumerated.
pub const DEFAULT_COUNT_CAP: u64 = 1 << 32;

/// Elements are stored as discrete logarithms with respect to a fixed
/// generator; `ZERO` stands for the zero element.
pub const ZERO: u32 = u32::MAX;

/// `F_{p^i}` built from the lexicographically first monic irreducible
/// polynomial of degree `i` (coefficients compared from `t^{i-1}` down to `t^0`).
#[derive(Clone, Debug)]
pub struct FieldExt {
    pub p: u64,
    pub i: u32,
    /// Coefficients `c_0..c_{i-1}` of the defining polynomial (monic, degree `i`).
    pub defining: Vec<u64>,
    q: u64,
    /// `exp[k]` is the base-p integer encoding of `g^k`.
    exp: Vec<u32>,
    /// `log[x]` for the base-p encoding `x`.
    log: Vec<u32>,
    /// Zech logarithms: `g^zech[k] = 1 + g^k`.
    zech: Vec<u32>,
}

fn poly_mulmod(a: &[u64], b: &[u64], modpoly: &[u64], p: u64) -> Vec<u64> {
    let i = modpoly.len();
    let mut prod = vec![0u64; 2 * i];
    for (x, &ax) in a.iter().enumerate() {
        for (y, &by) in b.iter().enumerate() {
            prod[x + y] = (prod[x + y] + ax * by) % p;
        }
    }
    for k in (i..prod.len()).rev() {
        let c = prod[k];
        if c != 0 {
            prod[k] = 0;
            for (j, &m) in modpoly.iter().enumerate() {
                prod[k - i + j] = (prod[k - i + j] + (p - m) * c) % p;
            }
        }
    }
    prod.truncate(i);
    prod
}

/// Remainder of `a` modulo a monic `b`, coefficients ascending.
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        for (j, &bj) in b.iter().enumerate() {
            r[shift + j] = (r[shift + j] + (p - bj % p) * c) % p;
        }
        r.pop();
    }
    r
}

fn digits(mut k: u64, p: u64, len: usize) -> Vec<u64> {
    (0..len)
        .map(|_| {
            let d = k % p;
            k /= p;
            d
        })
        .collect()
}

fn encode(v: &[u64], p: u64) -> u64 {
    v.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Whether the monic polynomial `t^i + sum c_j t^j` has no monic factor of degree `<= i/2`.
pub fn is_irreducible(coeffs: &[u64], p: u64) -> bool {
    let i = coeffs.len();
    let mut f = coeffs.to_vec();
    f.push(1);
    for deg in 1..=i / 2 {
        for k in 0..p.pow(deg as u32) {
            let mut g = digits(k, p, deg);
            g.push(1);
            if poly_rem(&f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl FieldExt {
    pub fn new(p: u64, i: u32) -> Result<Self> {
        if !crate::residue::is_prime(p) || i == 0 {
            return Err(Error::Input(format!("no field of order {p}^{i}")));
        }
        let q = p
            .checked_pow(i)
            .filter(|&q| q <= 1 << 24)
            .ok_or(Error::ResourceLimit(format!("field of order {p}^{i} is too large")))?;
        let ideg = i as usize;
        let mut order: Vec<u64> = (0..q).collect();
        order.sort_by_key(|&k| {
            let d = digits(k, p, ideg);
            d.into_iter().rev().collect::<Vec<_>>()
        });
        let defining = order
            .into_iter()
            .map(|k| digits(k, p, ideg))
            .find(|c| is_irreducible(c, p))
            .ok_or_else(|| Error::Internal("no irreducible polynomial found".into()))?;

        let order_factors = prime_factors(q - 1);
        let pow = |base: &[u64], mut e: u64| {
            let mut acc = digits(1, p, ideg);
            let mut b = base.to_vec();
            while e > 0 {
                if e & 1 == 1 {
                    acc = poly_mulmod(&acc, &b, &defining, p);
                }
                b = poly_mulmod(&b, &b, &defining, p);
                e >>= 1;
            }
            acc
        };
        let one = digits(1, p, ideg);
        let generator = (1..q)
            .map(|k| digits(k, p, ideg))
            .find(|g| order_factors.iter().all(|&l| pow(g, (q - 1) / l) != one))
            .ok_or_else(|| Error::Internal("no primitive element".into()))?;

        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut log = vec![ZERO; q as usize];
        let mut cur = one.clone();
        for k in 0..q - 1 {
            let code = encode(&cur, p);
            exp.push(code as u32);
            log[code as usize] = k as u32;
            cur = poly_mulmod(&cur, &generator, &defining, p);
        }
        let zech = (0..q - 1)
            .map(|k| {
                let mut v = digits(exp[k as usize] as u64, p, ideg);
                v[0] = (v[0] + 1) % p;
                log[encode(&v, p) as usize]
            })
            .collect();
        Ok(FieldExt {
            p,
            i,
            defining,
            q,
            exp,
            log,
            zech,
        })
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    /// Logarithm of the element with base-p encoding `x`.
    pub fn log_of(&self, x: u64) -> u32 {
        self.log[x as usize]
    }

    /// Base-p encoding of the element with logarithm `l`.
    pub fn from_log(&self, l: u32) -> u64 {
        if l == ZERO {
            0
        } else {
            self.exp[l as usize] as u64
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == ZERO || b == ZERO {
            return ZERO;
        }
        let s = a as u64 + b as u64;
        let l = self.q - 1;
        (if s >= l { s - l } else { s }) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if a == ZERO {
            return b;
        }
        if b == ZERO {
            return a;
        }
        // a + b = a (1 + b/a)
        let l = (self.q - 1) as u32;
        let d = if b >= a { b - a } else { b + l - a };
        let z = self.zech[d as usize];
        if z == ZERO {
            ZERO
        } else {
            self.mul(a, z)
        }
    }

    /// Logarithm of the prime-field element `c`.
    pub fn embed(&self, c: u64) -> u32 {
        self.log[(c % self.p) as usize]
    }
}

/// A polynomial prepared for evaluation in the logarithmic representation.
struct LogPoly {
    exps: Vec<Vec<u64>>,
    coeffs: Vec<u32>,
}

impl LogPoly {
    fn new(spec: &HypersurfaceSpec, field: &FieldExt) -> Self {
        let mut exps = Vec::new();
        let mut coeffs = Vec::new();
        for (m, c) in spec.poly.terms() {
            exps.push(m.exps().iter().map(|&e| e as u64).collect());
            coeffs.push(field.embed(c.value()));
        }
        LogPoly { exps, coeffs }
    }

    #[inline]
    fn is_zero_at(&self, field: &FieldExt, x: &[u32]) -> bool {
        let l = field.q - 1;
        let mut acc = ZERO;
        'terms: for (e, &c) in self.exps.iter().zip(&self.coeffs) {
            let mut lg = c as u64;
            for (xi, &ei) in x.iter().zip(e) {
                if ei == 0 {
                    continue;
                }
                if *xi == ZERO {
                    continue 'terms;
                }
                lg += (*xi as u64 * ei) % l;
            }
            acc = field.add(acc, (lg % l) as u32);
        }
        acc == ZERO
    }
}

/// Number of `F_{p^i}`-points of the hypersurface in `P^n`.
pub fn count_points(spec: &HypersurfaceSpec, i: u32, cap: u64) -> Result<u64> {
    let nv = spec.nvars();
    let candidates = (spec.p as u128).checked_pow(i * spec.n as u32);
    match candidates {
        Some(c) if c <= cap as u128 => {}
        _ => {
            return Err(Error::CapExceeded {
                candidates: candidates.unwrap_or(u128::MAX),
                cap: cap as u128,
            })
        }
    }
    let field = FieldExt::new(spec.p, i)?;
    let poly = LogPoly::new(spec, &field);
    let q = field.order();
    let one = field.log_of(1);
    let mut total = 0u64;
    for lead in 0..nv {
        // Points whose first nonzero coordinate is x_lead = 1; stratified by x_{lead+1}.
        let free = nv - lead - 1;
        let count_stratum = |first: u64| -> u64 {
            let mut x = vec![ZERO; nv];
            x[lead] = one;
            if free == 0 {
                return poly.is_zero_at(&field, &x) as u64;
            }
            x[lead + 1] = field.log_of(first);
            let rest = free - 1;
            let mut digits = vec![0u64; rest];
            let mut count = 0u64;
            loop {
                for (k, &d) in digits.iter().enumerate() {
                    x[lead + 2 + k] = field.log_of(d);
                }
                if poly.is_zero_at(&field, &x) {
                    count += 1;
                }
                let mut k = 0;
                loop {
                    if k == rest {
                        return count;
                    }
                    digits[k] += 1;
                    if digits[k] < q {
                        break;
                    }
                    digits[k] = 0;
                    k += 1;
                }
            }
        };
        total += if free == 0 {
            count_stratum(0)
        } else {
            crate::par::sum_indices(q as usize, |f| count_stratum(f as u64) as u128) as u64
        };
    }
    Ok(total)
}

#[derive(Serialize, Deserialize)]
struct CountCache {
    hash: String,
    i: u32,
    count: u64,
}

/// [`count_points`] with results stored per `(content hash, i)` under `dir`.
pub fn count_points_cached(spec: &HypersurfaceSpec, i: u32, cap: u64, dir: Option<&Path>) -> Result<u64> {
    let hash = spec.content_hash();
    let path = dir.map(|d| d.join(format!("count-{hash}-{i}.json")));
    if let Some(path) = &path {
        if let Ok(text) = std::fs::read_to_string(path) {
            if let Ok(c) = serde_json::from_str::<CountCache>(&text) {
                if c.hash == hash && c.i == i {
                    return Ok(c.count);
                }
            }
        }
    }
    let count = count_points(spec, i, cap)?;
    if let (Some(path), Some(dir)) = (&path, dir) {
        std::fs::create_dir_all(dir)?;
        let tmp = path.with_extension("tmp");
        let body = serde_json::to_string(&CountCache { hash, i, count })
            .map_err(|e| Error::Internal(e.to_string()))?;
        std::fs::write(&tmp, body)?;
        std::fs::rename(&tmp, path)?;
    }
    Ok(count)
}

/// Point counts over `F_{p^i}` for `i = 1..`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCountSeries {
    pub p: u64,
    pub counts: Vec<u64>,
}

fn mobius(n: u64) -> i64 {
    let mut m = n;
    let mut result = 1;
    let mut q = 2;
    while q * q <= m {
        if m.is_multiple_of(q) {
            m /= q;
            if m.is_multiple_of(q) {
                return 0;
            }
            result = -result;
        }
        q += 1;
    }
    if m > 1 {
        result = -result;
    }
    result
}

impl PointCountSeries {
    pub fn compute(spec: &HypersurfaceSpec, i_max: u32, cap: u64, cache: Option<&Path>) -> Result<Self> {
        let counts = (1..=i_max)
            .map(|i| count_points_cached(spec, i, cap, cache))
            .collect::<Result<_>>()?;
        Ok(PointCountSeries { p: spec.p, counts })
    }

    /// Number of closed points of each degree, or `None` if some value is not
    /// a nonnegative integer.
    pub fn closed_points(&self) -> Option<Vec<u64>> {
        (1..=self.counts.len() as u64)
            .map(|d| {
                let sum: i128 = (1..=d)
                    .filter(|e| d % e == 0)
                    .map(|e| mobius(d / e) as i128 * self.counts[e as usize - 1] as i128)
                    .sum();
                (sum >= 0 && sum % d as i128 == 0).then_some((sum / d as i128) as u64)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceVerdict {
    pub i: u32,
    pub count: u64,
    /// Count predicted by the trace formula, as a residue modulo `p^r`.
    pub predicted: u64,
    pub modulus: u64,
    pub pass: bool,
}

fn mat_mul(a: &ModMatrix, b: &ModMatrix) -> ModMatrix {
    let md = a.modulus;
    let mut out = ModMatrix::zero(md, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            if x == 0 {
                continue;
            }
            for j in 0..b.cols {
                let v = md.mul_add(out.get(i, j), x, b.get(k, j));
                out.set(i, j, v);
            }
        }
    }
    out
}

/// `#Z(F_{p^i}) = sum_{k<n} p^{ik} + (-1)^{n-1} Tr(M^i)` checked modulo `p^r`.
pub fn trace_consistency(m: &FrobMatrix, n: usize, counts: &PointCountSeries) -> Vec<TraceVerdict> {
    let md: Modulus = m.modulus();
    let base = ModMatrix::from_frob(m);
    let mut power = ModMatrix::identity(md, m.dim);
    counts
        .counts
        .iter()
        .enumerate()
        .map(|(idx, &count)| {
            let i = idx as u32 + 1;
            power = mat_mul(&power, &base);
            let trace = (0..m.dim).fold(0, |acc, k| md.add(acc, power.get(k, k)));
            let ambient = (0..n as u32).fold(0, |acc, k| md.add(acc, md.pow(md.reduce(m.p), (i * k) as u64)));
            let signed = if n % 2 == 1 { trace } else { md.neg(trace) };
            let predicted = md.add(ambient, signed);
            TraceVerdict {
                i,
                count,
                predicted,
                modulus: md.value(),
                pass: md.reduce(count) == predicted,
            }
        })
        .collect()
}

/// Characteristic polynomial `det(T - M)` of Frobenius on a plane curve of
/// genus `g`, recovered exactly from the counts over `F_{p^i}` for `i = 1..g`.
/// Coefficients are ascending, `c_0..c_{2g}`.
pub fn curve_charpoly_from_counts(p: u64, genus: usize, counts: &[u64]) -> Result<Vec<BigInt>> {
    if counts.len() < genus {
        return Err(Error::Input(format!("need {genus} counts, got {}", counts.len())));
    }
    let pb = BigInt::from(p);
    let power_sums: Vec<BigInt> = (1..=genus)
        .map(|i| BigInt::one() + pb.pow(i as u32) - BigInt::from(counts[i - 1]))
        .collect();
    // Newton's identities: k e_k = sum_{j=1}^{k} (-1)^{j-1} e_{k-j} S_j.
    let mut e = vec![BigInt::one()];
    for k in 1..=genus {
        let mut acc = BigInt::zero();
        for j in 1..=k {
            let term = &e[k - j] * &power_sums[j - 1];
            if j % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let (q, r) = acc.div_rem(&BigInt::from(k));
        if !r.is_zero() {
            return Err(Error::Internal("counts are inconsistent with an integral zeta function".into()));
        }
        e.push(q);
    }
    for k in (0..genus).rev() {
        let v = &e[k] * pb.pow((genus - k) as u32);
        e.push(v);
    }
    // e now holds e_0..e_{2g}; the coefficient of T^{2g-k} is (-1)^k e_k.
    let deg = 2 * genus;
    let mut c = vec![BigInt::zero(); deg + 1];
    for (k, ek) in e.iter().enumerate() {
        c[deg - k] = if k % 2 == 0 { ek.clone() } else { -ek.clone() };
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{parse_and_lift, ProblemFile};

    fn spec(p: u64, n: usize, poly: &str) -> HypersurfaceSpec {
        parse_and_lift(&ProblemFile {
            p,
            n,
            polynomial: poly.into(),
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn field_construction() {
        let f = FieldExt::new(2, 3).unwrap();
        assert_eq!(f.defining, vec![1, 1, 0]);
        let f = FieldExt::new(3, 2).unwrap();
        assert_eq!(f.defining, vec![1, 0]);
        assert!(!is_irreducible(&[2, 0], 3));
        assert!(is_irreducible(&[1, 0], 3));
        for (p, i) in [(2, 1), (3, 1), (2, 4), (5, 2), (3, 3)] {
            let f = FieldExt::new(p, i).unwrap();
            let q = f.order();
            // Every nonzero element is a power of the generator and 1 + (-1) = 0.
            let mut seen = vec![false; q as usize];
            for l in 0..(q - 1) as u32 {
                seen[f.from_log(l) as usize] = true;
            }
            assert_eq!(seen.iter().filter(|&&s| s).count() as u64, q - 1);
            let minus_one = f.embed(p - 1);
            assert_eq!(f.add(f.embed(1), minus_one), ZERO);
            // Distributivity on a sample.
            for a in 0..q.min(20) {
                for b in 0..q.min(20) {
                    let (la, lb, lc) = (f.log_of(a), f.log_of(b), f.log_of((a + b) % q));
                    assert_eq!(f.mul(f.add(la, lb), lc), f.add(f.mul(la, lc), f.mul(lb, lc)));
                }
            }
        }
    }

    #[test]
    fn conic_and_line_counts() {
        let conic = spec(5, 2, "x0^2 + x1^2 + x2^2");
        for i in 1..4 {
            assert_eq!(count_points(&conic, i, DEFAULT_COUNT_CAP).unwrap(), 5u64.pow(i) + 1);
        }
        let fermat = spec(2, 2, "x0^3 + x1^3 + x2^3");
        assert_eq!(count_points(&fermat, 1, DEFAULT_COUNT_CAP).unwrap(), 3);
        assert_eq!(count_points(&fermat, 2, DEFAULT_COUNT_CAP).unwrap(), 9);
    }

    #[test]
    fn cap_is_enforced() {
        let s = spec(3, 3, "x0^4 + x1^4 + x2^4 + x3^4");
        assert!(matches!(count_points(&s, 3, 1000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn counts_are_invariant_under_permutation() {
        let a = spec(5, 2, "x0^3 + 2*x0*x1^2 + x1*x2^2 + 3*x2^3");
        let b = spec(5, 2, "x2^3 + 2*x2*x0^2 + x0*x1^2 + 3*x1^3");
        for i in 1..3 {
            assert_eq!(
                count_points(&a, i, DEFAULT_COUNT_CAP).unwrap(),
                count_points(&b, i, DEFAULT_COUNT_CAP).unwrap()
            );
        }
    }

    #[test]
    fn elliptic_curve_charpoly() {
        // y^2 z = x^3 + x z^2 + z^3 style cubic over F_5: #E = 5 + 1 - a.
        let e = spec(5, 2, "x0^3 + x0*x2^2 + x2^3 - x1^2*x2");
        let n1 = count_points(&e, 1, DEFAULT_COUNT_CAP).unwrap();
        let c = curve_charpoly_from_counts(5, 1, &[n1]).unwrap();
        let a = 6 - n1 as i64;
        assert_eq!(c, vec![BigInt::from(5), BigInt::from(-a), BigInt::one()]);
        let series = PointCountSeries::compute(&e, 3, DEFAULT_COUNT_CAP, None).unwrap();
        assert!(series.closed_points().is_some());
        // N_2 from the zeta function: 1 + 25 - (a^2 - 10).
        assert_eq!(series.counts[1] as i64, 26 - (a * a - 10));
    }

    #[test]
    fn count_cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let e = spec(5, 2, "x0^3 + x1^3 + x2^3 + x0*x1*x2");
        let a = count_points_cached(&e, 2, DEFAULT_COUNT_CAP, Some(dir.path())).unwrap();
        let b = count_points_cached(&e, 2, DEFAULT_COUNT_CAP, Some(dir.path())).unwrap();
        assert_eq!(a, b);
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn mobius_values() {
        let v: Vec<i64> = (1..=10).map(mobius).collect();
        assert_eq!(v, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    }
}
