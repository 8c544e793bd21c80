//! Frobenius action on the cohomology basis and assembly of the matrix
//! `M = p^{-1} F` modulo `p^r`.

use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::dense::{dense_from_integer, DenseForm, Graded};
use crate::error::{Error, Result};
use crate::geometry::{BasisElement, HypersurfaceSpec};
use crate::poly::compute_delta;
use crate::precision::{vp_factorial, PrecisionPlan};
use crate::reduction::{PoleTerm, ReductionContext};
use crate::residue::Modulus;

/// One term `p^shift * numerator * Omega / P^pole` of a truncated Frobenius image.
#[derive(Clone, Debug)]
pub struct FrobTerm {
    pub j: u64,
    pub pole: u64,
    pub shift: u32,
    pub numerator: DenseForm,
}

/// `binom(-h, j)` as an exact integer.
pub fn binom_neg(h: u64, j: u64) -> BigInt {
    let mut b = BigInt::one();
    for i in 0..j {
        b = b * BigInt::from(h + i) / BigInt::from(i + 1);
    }
    if j % 2 == 1 {
        -b
    } else {
        b
    }
}

/// Powers `Delta^0 .. Delta^{j_max}` modulo the working modulus, shared by all columns.
#[derive(Debug)]
pub struct DeltaPowers {
    pub powers: Vec<DenseForm>,
}

impl DeltaPowers {
    pub fn new(spec: &HypersurfaceSpec, g: &Graded, md: Modulus, j_max: u64) -> Result<Self> {
        let delta = dense_from_integer(g, &compute_delta(&spec.lift, spec.p)?, md);
        let mut one = DenseForm::zero(g, 0);
        one.coeffs[0] = 1 % md.value();
        let mut powers = vec![one];
        for j in 1..=j_max as usize {
            let next = powers[j - 1].mul(&delta, g, md);
            powers.push(next);
        }
        Ok(DeltaPowers { powers })
    }
}

/// The term of index `j` in the image of the basis element `e`.
pub fn frobenius_term(
    e: &BasisElement,
    j: u64,
    p: u64,
    n: usize,
    g: &Graded,
    md: Modulus,
    deltas: &DeltaPowers,
) -> FrobTerm {
    let mono: Vec<u16> = e.monomial.iter().map(|&a| (a as u64 * p + p - 1) as u16).collect();
    let delta_j = &deltas.powers[j as usize];
    let mut numerator = DenseForm::zero(g, delta_j.degree + mono.iter().map(|&a| a as i64).sum::<i64>());
    numerator.add_monomial_multiple(g, delta_j, &mono, md.from_bigint(&binom_neg(e.h, j)), md);
    FrobTerm {
        j,
        pole: p * (e.h + j),
        shift: (n as u64 - 1 + j) as u32,
        numerator,
    }
}

/// All terms `j = 0..=j_max` of the image of `e`.
pub fn frobenius_image(
    e: &BasisElement,
    plan: &PrecisionPlan,
    n: usize,
    g: &Graded,
    md: Modulus,
    deltas: &DeltaPowers,
) -> Vec<FrobTerm> {
    (0..=plan.j_max)
        .map(|j| frobenius_term(e, j, plan.p, n, g, md, deltas))
        .collect()
}

/// Frobenius matrix modulo `p^r` on the primitive middle cohomology.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobMatrix {
    pub p: u64,
    pub r: u32,
    pub dim: usize,
    pub labels: Vec<String>,
    /// Row-major entries in `0..p^r`.
    pub entries: Vec<u64>,
    /// Smallest absolute precision over all computed coordinates.
    pub certified_precision: i64,
}

impl FrobMatrix {
    pub fn modulus(&self) -> Modulus {
        Modulus::new(self.p, self.r).expect("valid modulus")
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.dim.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn trace(&self) -> u64 {
        let md = self.modulus();
        (0..self.dim).fold(0, |acc, i| md.add(acc, self.get(i, i)))
    }

    /// Reduce to a lower precision.
    pub fn truncate(&self, r: u32) -> Result<FrobMatrix> {
        if r > self.r {
            return Err(Error::PrecisionExhausted(format!(
                "matrix known mod p^{} but p^{r} requested",
                self.r
            )));
        }
        let md = Modulus::new(self.p, r)?;
        Ok(FrobMatrix {
            r,
            entries: self.entries.iter().map(|&v| md.reduce(v)).collect(),
            ..self.clone()
        })
    }

    /// Rank of the matrix modulo `p`.
    pub fn rank_mod_p(&self) -> usize {
        let fp = Modulus::new(self.p, 1).expect("prime");
        let mut rows = self.rows();
        rows.iter_mut().for_each(|r| r.iter_mut().for_each(|v| *v = fp.reduce(*v)));
        let mut rank = 0;
        for col in 0..self.dim {
            let Some(piv) = (rank..self.dim).find(|&i| rows[i][col] != 0) else {
                continue;
            };
            rows.swap(rank, piv);
            let inv = fp.inv(rows[rank][col]).expect("unit");
            for i in 0..self.dim {
                if i != rank && rows[i][col] != 0 {
                    let f = fp.mul(rows[i][col], inv);
                    let pivot_row = rows[rank].clone();
                    for (x, &y) in rows[i].iter_mut().zip(&pivot_row) {
                        *x = fp.sub(*x, fp.mul(f, y));
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Plain-text form: header lines `p`, `r`, `D`, one `label` line per basis
    /// element, then one line of entries per row.
    pub fn to_text(&self) -> String {
        let mut out = String::from("hyperfrob-matrix 1\n");
        let _ = writeln!(out, "p {}", self.p);
        let _ = writeln!(out, "r {}", self.r);
        let _ = writeln!(out, "D {}", self.dim);
        for l in &self.labels {
            let _ = writeln!(out, "label {l}");
        }
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<FrobMatrix> {
        let bad = |what: &str| Error::Input(format!("matrix text: {what}"));
        let mut lines = text.lines();
        if lines.next() != Some("hyperfrob-matrix 1") {
            return Err(bad("missing header"));
        }
        let mut field = |key: &str| -> Result<u64> {
            lines
                .next()
                .and_then(|l| l.strip_prefix(key))
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| bad(key.trim()))
        };
        let p = field("p ")?;
        let r = field("r ")? as u32;
        let dim = field("D ")? as usize;
        let md = Modulus::new(p, r)?;
        let mut labels = Vec::with_capacity(dim);
        for _ in 0..dim {
            let l = lines.next().and_then(|l| l.strip_prefix("label ")).ok_or_else(|| bad("label"))?;
            labels.push(l.to_string());
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for _ in 0..dim {
            let row = lines.next().ok_or_else(|| bad("row"))?;
            let vals: Vec<u64> = row
                .split_whitespace()
                .map(|v| v.parse::<u64>().map_err(|_| bad("entry")))
                .collect::<Result<_>>()?;
            if vals.len() != dim || vals.iter().any(|&v| v >= md.value()) {
                return Err(bad("row shape"));
            }
            entries.extend(vals);
        }
        Ok(FrobMatrix {
            p,
            r,
            dim,
            labels,
            entries,
            certified_precision: r as i64,
        })
    }
}

/// `v_p((h-1)!)`: the matrix is expressed in the integral basis
/// `(h-1)! mu Omega / P^h`, which differs from the monomial basis only when
/// `p < h`.
pub fn basis_scale(h: u64, p: u64) -> u64 {
    vp_factorial(h.saturating_sub(1), p)
}

/// Digits lost to the basis rescaling in the worst row, `v_p((n-1)!)`.
pub fn lattice_shift(n: u64, p: u64) -> u64 {
    basis_scale(n, p)
}

/// Compute the matrix column by column: each column is the reduced image of
/// one basis element. Entries are kept to `plan.r - lattice_shift` digits.
pub fn assemble_matrix(
    spec: &HypersurfaceSpec,
    ctx: &ReductionContext,
    plan: &PrecisionPlan,
    deltas: &DeltaPowers,
) -> Result<FrobMatrix> {
    let g: Arc<Graded> = ctx.graded.clone();
    let md = ctx.modulus;
    let r = (plan.r - lattice_shift(spec.n as u64, spec.p)) as u32;
    let basis = &ctx.basis;
    let scales: Vec<i64> = basis.elements.iter().map(|e| basis_scale(e.h, spec.p) as i64).collect();
    let dim = basis.dim();
    let n = spec.n;
    let columns: Vec<Result<(Vec<u64>, i64)>> = crate::par::map_indices(dim, |k| {
        let e = &basis.elements[k];
        let top = plan.p * (e.h + plan.j_max);
        let reduced = ctx.reduce_stream(top, |m| {
            if m % plan.p != 0 || m / plan.p < e.h {
                return None;
            }
            let j = m / plan.p - e.h;
            let t = frobenius_term(e, j, plan.p, n, &g, md, deltas);
            Some(PoleTerm {
                pole: t.pole,
                numerator: t.numerator,
                shift: t.shift,
            })
        })?;
        let coords: Vec<_> = reduced
            .coordinates
            .iter()
            .zip(&scales)
            .map(|(c, &ci)| c.shifted(scales[k] - ci))
            .collect();
        let prec = coords.iter().map(|c| c.absolute_precision()).min().unwrap_or(i64::MAX);
        let col = coords
            .iter()
            .map(|c| c.to_residue(r).map(|v| v.value()))
            .collect::<Result<Vec<u64>>>()?;
        Ok((col, prec))
    });
    let mut entries = vec![0u64; dim * dim];
    let mut certified = i64::MAX;
    for (k, col) in columns.into_iter().enumerate() {
        let (col, prec) = col?;
        certified = certified.min(prec);
        for (i, v) in col.into_iter().enumerate() {
            entries[i * dim + k] = v;
        }
    }
    Ok(FrobMatrix {
        p: spec.p,
        r,
        dim,
        labels: basis
            .labels(&spec.names)
            .into_iter()
            .map(|(h, m)| format!("{h}:{m}"))
            .collect(),
        entries,
        certified_precision: if dim == 0 { r as i64 } else { certified },
    })
}

/// A warning if the rank modulo `p` exceeds the number of pole-order-one basis elements.
pub fn rank_diagnostic(m: &FrobMatrix, first_hodge: usize) -> Option<String> {
    let rank = m.rank_mod_p();
    (rank > first_hodge).then(|| {
        format!("rank of the matrix mod p is {rank}, more than the {first_hodge} unit elementary divisors expected")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_scaling() {
        assert_eq!((1..=4).map(|h| basis_scale(h, 2)).collect::<Vec<_>>(), [0, 0, 1, 1]);
        assert_eq!((1..=4).map(|h| basis_scale(h, 3)).collect::<Vec<_>>(), [0, 0, 0, 1]);
        assert_eq!(lattice_shift(3, 5), 0);
        assert_eq!(lattice_shift(3, 2), 1);
    }
    use crate::geometry::{build_basis, parse_and_lift, ProblemFile};
    use crate::groebner::StrongGB;
    use crate::precision::choose_working_precision;

    #[test]
    fn binomials() {
        assert_eq!(binom_neg(1, 3), BigInt::from(-1));
        assert_eq!(binom_neg(2, 2), BigInt::from(3));
        assert_eq!(binom_neg(3, 0), BigInt::from(1));
        assert_eq!(binom_neg(3, 2), BigInt::from(6));
    }

    #[test]
    fn term_shape() {
        let spec = parse_and_lift(&ProblemFile {
            p: 3,
            n: 3,
            polynomial: "x0^4 + x1^4 + x2^4 + x3^4".into(),
            ..Default::default()
        })
        .unwrap();
        let (basis, _) = build_basis(&spec).unwrap();
        let plan = choose_working_precision(2, 3, 3).unwrap();
        let g = Graded::new(4);
        let md = Modulus::new(3, plan.arithmetic_precision() as u32).unwrap();
        let deltas = DeltaPowers::new(&spec, &g, md, plan.j_max).unwrap();
        for e in &basis.elements {
            let terms = frobenius_image(e, &plan, 3, &g, md, &deltas);
            assert_eq!(terms.len(), 4);
            for t in &terms {
                assert_eq!(t.numerator.degree, (3 * (e.h + t.j) * 4) as i64 - 4);
                assert_eq!(t.shift as u64, 2 + t.j);
            }
            let t0 = &terms[0];
            let support = t0.numerator.support();
            assert_eq!(support.len(), 1);
            assert_eq!(support[0].1, 1);
            let mono: Vec<u16> = e.monomial.iter().map(|&a| a * 3 + 2).collect();
            assert_eq!(support[0].0, g.rank(&mono));
        }
    }

    #[test]
    fn text_round_trip() {
        let m = FrobMatrix {
            p: 5,
            r: 2,
            dim: 2,
            labels: vec!["1:x".into(), "2:y^2".into()],
            entries: vec![1, 24, 0, 7],
            certified_precision: 2,
        };
        let text = m.to_text();
        assert_eq!(FrobMatrix::from_text(&text).unwrap(), m);
        assert_eq!(m.trace(), 8);
        assert_eq!(m.rank_mod_p(), 2);
    }

    fn cubic_matrix(r: u64, extra: u64) -> FrobMatrix {
        let spec = parse_and_lift(&ProblemFile {
            p: 5,
            n: 2,
            polynomial: "x0^3 + x1^3 + x2^3 + x0*x1*x2".into(),
            ..Default::default()
        })
        .unwrap();
        let (basis, _) = build_basis(&spec).unwrap();
        let mut plan = choose_working_precision(r, 2, 5).unwrap();
        plan.s += extra;
        plan.j_max += extra;
        let g = Arc::new(Graded::new(3));
        let prec = plan.arithmetic_precision() as u32;
        let md = Modulus::new(5, prec).unwrap();
        let gb = StrongGB::compute(&spec, &g, prec).unwrap();
        let ctx = ReductionContext::new(&spec, &basis, g.clone(), &gb).unwrap();
        let deltas = DeltaPowers::new(&spec, &g, md, plan.j_max).unwrap();
        assemble_matrix(&spec, &ctx, &plan, &deltas).unwrap()
    }

    #[test]
    fn cross_precision_coherence_on_a_cubic_curve() {
        let a = cubic_matrix(2, 0);
        let b = cubic_matrix(3, 0);
        let c = cubic_matrix(2, 1);
        assert_eq!(a.entries, b.truncate(2).unwrap().entries);
        assert_eq!(a.entries, c.entries);
    }
}
