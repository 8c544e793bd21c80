//! Dense graded representation: a homogeneous polynomial of degree `k` stored
//! as a coefficient vector indexed by the descending-grevlex position of each
//! monomial among all monomials of degree `k`.

use std::sync::OnceLock;

use crate::poly::{Coeff, Exps, HPoly, Monomial};
use crate::residue::{Modulus, PResidue};

/// Monomial indexing for a fixed number of variables.
///
/// Index 0 of degree `k` is `x0^k`; index order is descending grevlex.
#[derive(Debug)]
pub struct Graded {
    nvars: usize,
    /// `binom[a][b] = C(a, b)` for `b <= nvars`.
    binom: Vec<Vec<usize>>,
    tables: Vec<OnceLock<Vec<u16>>>,
}

const MAX_TABLE_DEGREE: usize = 512;

impl Graded {
    pub fn new(nvars: usize) -> Self {
        assert!(nvars >= 1);
        let rows = MAX_TABLE_DEGREE + nvars + 2;
        let mut binom = vec![vec![0usize; nvars + 2]; rows];
        for row in binom.iter_mut() {
            row[0] = 1;
        }
        for a in 1..rows {
            for b in 1..nvars + 2 {
                binom[a][b] = binom[a - 1][b - 1] + binom[a - 1][b];
            }
        }
        Graded {
            nvars,
            binom,
            tables: (0..=MAX_TABLE_DEGREE).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Number of monomials of degree `k` (zero for negative `k`).
    pub fn dim(&self, k: i64) -> usize {
        if k < 0 {
            0
        } else {
            self.binom[k as usize + self.nvars - 1][self.nvars - 1]
        }
    }

    /// Position of an exponent vector among monomials of its degree.
    #[inline]
    pub fn rank(&self, e: &[u16]) -> usize {
        let nv = self.nvars;
        if nv == 1 {
            return 0;
        }
        let l = nv - 1;
        let mut rest: usize = e.iter().map(|&x| x as usize).sum();
        let mut idx = 0usize;
        for pos in 0..l {
            let t = e[nv - 1 - pos] as usize;
            let q = l - 1 - pos;
            if t > 0 {
                idx += self.binom[rest + q + 1][q + 1] - self.binom[rest - t + q + 1][q + 1];
            }
            rest -= t;
        }
        idx
    }

    /// Flat exponent table for degree `k`: entry `i` occupies `[i*nvars, (i+1)*nvars)`.
    pub fn table(&self, k: usize) -> &[u16] {
        assert!(k <= MAX_TABLE_DEGREE, "degree {k} beyond supported range");
        self.tables[k].get_or_init(|| {
            let nv = self.nvars;
            let mut out = Vec::with_capacity(self.dim(k as i64) * nv);
            let mut cur = vec![0u16; nv];
            enumerate(k as u16, &mut cur, nv - 1, &mut out);
            out
        })
    }

    pub fn exps(&self, k: usize, idx: usize) -> &[u16] {
        let nv = self.nvars;
        &self.table(k)[idx * nv..(idx + 1) * nv]
    }

    pub fn monomial(&self, k: usize, idx: usize) -> Monomial {
        Monomial::new(self.exps(k, idx))
    }
}

/// Emits exponent vectors in ascending lex order on `(e_n, ..., e_1)`.
fn enumerate(left: u16, cur: &mut [u16], pos: usize, out: &mut Vec<u16>) {
    if pos == 0 {
        cur[0] = left;
        out.extend_from_slice(cur);
        return;
    }
    for v in 0..=left {
        cur[pos] = v;
        enumerate(left - v, cur, pos - 1, out);
    }
    cur[pos] = 0;
}

/// A homogeneous polynomial over `Z/p^m` stored densely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseForm {
    pub degree: i64,
    pub coeffs: Vec<u64>,
}

impl DenseForm {
    pub fn zero(g: &Graded, degree: i64) -> Self {
        DenseForm {
            degree,
            coeffs: vec![0; g.dim(degree)],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn from_hpoly(g: &Graded, f: &HPoly<PResidue>, md: Modulus) -> Self {
        let mut out = DenseForm::zero(g, f.degree() as i64);
        for (m, c) in f.terms() {
            out.coeffs[g.rank(m.exps())] = md.reduce(c.value());
        }
        out
    }

    pub fn from_i64_terms(g: &Graded, degree: i64, terms: &[(Monomial, i64)], md: Modulus) -> Self {
        let mut out = DenseForm::zero(g, degree);
        for (m, c) in terms {
            let i = g.rank(m.exps());
            out.coeffs[i] = md.add(out.coeffs[i], md.from_i64(*c));
        }
        out
    }

    pub fn to_hpoly(&self, g: &Graded, md: Modulus) -> HPoly<PResidue> {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (g.monomial(self.degree as usize, i), PResidue::new(c, md)));
        HPoly::from_terms(g.nvars(), self.degree.max(0) as u32, terms).expect("dense form is homogeneous")
    }

    /// Nonzero terms as `(index, coefficient)`.
    pub fn support(&self) -> Vec<(usize, u64)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
            .collect()
    }

    pub fn add_assign(&mut self, other: &DenseForm, md: Modulus) {
        debug_assert_eq!(self.degree, other.degree);
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = md.add(*a, b);
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &DenseForm, c: u64, md: Modulus) {
        debug_assert_eq!(self.degree, other.degree);
        if c == 0 {
            return;
        }
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if b != 0 {
                *a = md.mul_add(*a, b, c);
            }
        }
    }

    pub fn scale(&mut self, c: u64, md: Modulus) {
        for a in self.coeffs.iter_mut() {
            *a = md.mul(*a, c);
        }
    }

    /// `self += c * x^mono * other`.
    pub fn add_monomial_multiple(&mut self, g: &Graded, other: &DenseForm, mono: &[u16], c: u64, md: Modulus) {
        if c == 0 || other.coeffs.is_empty() {
            return;
        }
        let nv = g.nvars();
        let src = g.table(other.degree as usize);
        let mut buf: Exps = Exps::from_elem(0, nv);
        for (i, &b) in other.coeffs.iter().enumerate() {
            if b == 0 {
                continue;
            }
            let e = &src[i * nv..(i + 1) * nv];
            for v in 0..nv {
                buf[v] = e[v] + mono[v];
            }
            let j = g.rank(&buf);
            self.coeffs[j] = md.mul_add(self.coeffs[j], b, c);
        }
    }

    pub fn mul(&self, other: &DenseForm, g: &Graded, md: Modulus) -> DenseForm {
        let mut out = DenseForm::zero(g, self.degree + other.degree);
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return out;
        }
        let (small, large) = if self.support_len() <= other.support_len() {
            (self, other)
        } else {
            (other, self)
        };
        let st = g.table(small.degree as usize);
        let nv = g.nvars();
        for (i, &c) in small.coeffs.iter().enumerate() {
            if c != 0 {
                out.add_monomial_multiple(g, large, &st[i * nv..(i + 1) * nv], c, md);
            }
        }
        out
    }

    fn support_len(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    /// Partial derivative with respect to `x_i`.
    pub fn partial(&self, g: &Graded, i: usize, md: Modulus) -> DenseForm {
        let mut out = DenseForm::zero(g, self.degree - 1);
        if self.degree <= 0 {
            return out;
        }
        let nv = g.nvars();
        let src = g.table(self.degree as usize);
        let mut buf: Exps = Exps::from_elem(0, nv);
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let e = &src[k * nv..(k + 1) * nv];
            if e[i] == 0 {
                continue;
            }
            buf.copy_from_slice(e);
            buf[i] -= 1;
            let j = g.rank(&buf);
            out.coeffs[j] = md.add(out.coeffs[j], md.mul(c, e[i] as u64 % md.value()));
        }
        out
    }
}

/// Convert an integer polynomial with machine-sized coefficients into dense form.
pub fn dense_from_integer<C: Coeff>(g: &Graded, f: &HPoly<C>, md: Modulus) -> DenseForm {
    let mut out = DenseForm::zero(g, f.degree() as i64);
    for (m, c) in f.terms() {
        out.coeffs[g.rank(m.exps())] = md.from_bigint(&c.to_display());
    }
    out
}
