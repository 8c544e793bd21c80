//! Reduction of poles: rewriting `G Omega / P^m` as a combination of basis
//! forms, with all divisions by `m - 1` deferred into a p-adic ledger.
//!
//! Division by the Jacobian ideal is linear, so it is tabulated once per input:
//! every monomial of each low numerator degree gets its cofactors and normal
//! form, and every monomial of the cover degree `T` (where the ideal contains
//! all monomials) gets its cofactors. A monomial of higher degree is split as
//! `x^gamma * x^alpha` with `deg alpha = T` and reuses the entry for `alpha`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::dense::{DenseForm, Graded};
use crate::error::{Error, Result};
use crate::geometry::{CohomologyBasis, HypersurfaceSpec};
use crate::groebner::StrongGB;
use crate::residue::{vp_u64, Modulus, ScaledResidue};

/// Retries allowed when a numerator leaves a non-basis remainder.
const TORSION_RETRIES: u32 = 8;

/// Cofactors and normal form of one monomial, stored sparsely.
#[derive(Clone, Debug, Default)]
struct Entry {
    /// For each generator slot `0..=n` (partials) and `n+1` (P): flat exponents and coefficients.
    terms: Vec<(Vec<u16>, Vec<u64>)>,
    /// Normal form restricted to basis monomials: `(basis position, coefficient)`.
    basis_part: Vec<(usize, u64)>,
    /// Normal form on monomials outside the basis.
    other_part: Vec<(usize, u64)>,
}

/// Shared, read-only data for reducing forms to basis coordinates.
#[derive(Debug)]
pub struct ReductionContext {
    pub graded: Arc<Graded>,
    pub modulus: Modulus,
    pub n: usize,
    pub d: u32,
    pub basis: CohomologyBasis,
    cover_degree: i64,
    high: Vec<Entry>,
    low: BTreeMap<i64, Vec<Entry>>,
}

/// A form `numerator * Omega / (p^ledger * P^m)` with the numerator over `Z/p^S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionState {
    pub m: u64,
    pub numerator: DenseForm,
    pub ledger: u32,
}

/// One input to [`ReductionContext::reduce_stream`]: `p^shift * numerator * Omega / P^pole`.
#[derive(Clone, Debug)]
pub struct PoleTerm {
    pub pole: u64,
    pub numerator: DenseForm,
    pub shift: u32,
}

/// Basis coordinates of a reduced form.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedClass {
    pub coordinates: Vec<ScaledResidue>,
}

impl ReducedClass {
    /// The smallest absolute precision among the coordinates.
    pub fn certified_precision(&self) -> i64 {
        self.coordinates
            .iter()
            .map(|c| c.absolute_precision())
            .min()
            .unwrap_or(i64::MAX)
    }
}

fn sparse_terms(g: &Graded, f: &DenseForm) -> (Vec<u16>, Vec<u64>) {
    let mut exps = Vec::new();
    let mut coefs = Vec::new();
    if f.degree < 0 {
        return (exps, coefs);
    }
    for (i, &c) in f.coeffs.iter().enumerate() {
        if c != 0 {
            exps.extend_from_slice(g.exps(f.degree as usize, i));
            coefs.push(c);
        }
    }
    (exps, coefs)
}

impl ReductionContext {
    pub fn new(spec: &HypersurfaceSpec, basis: &CohomologyBasis, graded: Arc<Graded>, gb: &StrongGB) -> Result<Self> {
        let g = &*graded;
        let md = gb.modulus;
        let cover = gb
            .cover_degree
            .ok_or_else(|| Error::Internal("Gröbner basis does not cover any degree".into()))?;
        let monomial_form = |k: i64, idx: usize| {
            let mut f = DenseForm::zero(g, k);
            f.coeffs[idx] = 1 % md.value();
            f
        };
        let high: Vec<Entry> = crate::par::map_indices(g.dim(cover), |idx| {
            let div = gb.divide_with_cofactors(g, &monomial_form(cover, idx));
            let entry = Entry {
                terms: div.cofactors.iter().map(|c| sparse_terms(g, c)).collect(),
                ..Default::default()
            };
            (entry, div.remainder.is_zero())
        })
        .into_iter()
        .map(|(e, ok)| {
            if ok {
                Ok(e)
            } else {
                Err(Error::Internal(format!("monomial of degree {cover} not in the ideal")))
            }
        })
        .collect::<Result<_>>()?;

        let mut low = BTreeMap::new();
        for h in 1..=spec.n as u64 {
            let k = spec.numerator_degree(h);
            if k < 0 || k >= cover {
                if k >= cover && basis.elements.iter().any(|e| e.h == h) {
                    return Err(Error::Internal(format!("basis elements in covered degree {k}")));
                }
                continue;
            }
            let positions: BTreeMap<usize, usize> = basis
                .elements
                .iter()
                .enumerate()
                .filter(|(_, e)| e.h == h)
                .map(|(pos, e)| (g.rank(&e.monomial), pos))
                .collect();
            let entries = low_degree_entries(spec, g, md, k, &positions)?;
            low.insert(k, entries);
        }
        Ok(ReductionContext {
            graded,
            modulus: md,
            n: spec.n,
            d: spec.d,
            basis: basis.clone(),
            cover_degree: cover,
            high,
            low,
        })
    }

    pub fn numerator_degree(&self, m: u64) -> i64 {
        m as i64 * self.d as i64 - self.n as i64 - 1
    }

    pub fn cover_degree(&self) -> i64 {
        self.cover_degree
    }

    pub fn p(&self) -> u64 {
        self.modulus.p()
    }

    /// `(sum_i dA_i/dx_i, C, basis part of R, other part of R)` for `G = sum A_i dP/dx_i + C P + R`.
    fn divide_fused(&self, f: &DenseForm) -> (DenseForm, DenseForm, Vec<u64>, bool) {
        let g = &*self.graded;
        let md = self.modulus;
        let nv = self.n + 1;
        let k = f.degree;
        let out_deg = k - self.d as i64;
        let mut div_sum = DenseForm::zero(g, out_deg);
        let mut c_part = DenseForm::zero(g, out_deg);
        let mut basis_part = vec![0u64; self.basis.dim()];
        let mut other = false;
        if k < 0 {
            return (div_sum, c_part, basis_part, other);
        }
        let low = self.low.get(&k);
        let src = g.table(k as usize);
        let mut gamma = vec![0u16; nv];
        let mut alpha = vec![0u16; nv];
        let mut e = vec![0u16; nv];
        for (idx, &c) in f.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let beta = &src[idx * nv..(idx + 1) * nv];
            let entry = match low {
                Some(entries) => {
                    gamma.iter_mut().for_each(|x| *x = 0);
                    &entries[idx]
                }
                None => {
                    let mut left = self.cover_degree as u16;
                    for v in (0..nv).rev() {
                        let take = beta[v].min(left);
                        alpha[v] = take;
                        gamma[v] = beta[v] - take;
                        left -= take;
                    }
                    &self.high[g.rank(&alpha)]
                }
            };
            for (slot, (exps, coefs)) in entry.terms.iter().enumerate() {
                if slot < nv {
                    for (t, &a) in coefs.iter().enumerate() {
                        let delta = &exps[t * nv..(t + 1) * nv];
                        let ei = gamma[slot] + delta[slot];
                        if ei == 0 {
                            continue;
                        }
                        for v in 0..nv {
                            e[v] = gamma[v] + delta[v];
                        }
                        e[slot] -= 1;
                        let j = g.rank(&e);
                        let w = md.mul(md.mul(c, a), ei as u64);
                        div_sum.coeffs[j] = md.add(div_sum.coeffs[j], w);
                    }
                } else {
                    for (t, &a) in coefs.iter().enumerate() {
                        let delta = &exps[t * nv..(t + 1) * nv];
                        for v in 0..nv {
                            e[v] = gamma[v] + delta[v];
                        }
                        let j = g.rank(&e);
                        c_part.coeffs[j] = md.mul_add(c_part.coeffs[j], c, a);
                    }
                }
            }
            for &(pos, a) in &entry.basis_part {
                basis_part[pos] = md.mul_add(basis_part[pos], c, a);
            }
            if !entry.other_part.is_empty() {
                // Only a nonzero total counts; check after accumulation below.
                other = true;
            }
        }
        if other {
            other = self.other_remainder_nonzero(f);
        }
        (div_sum, c_part, basis_part, other)
    }

    fn other_remainder_nonzero(&self, f: &DenseForm) -> bool {
        let md = self.modulus;
        let Some(entries) = self.low.get(&f.degree) else {
            return false;
        };
        let mut acc: BTreeMap<usize, u64> = BTreeMap::new();
        for (idx, &c) in f.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &(i, a) in &entries[idx].other_part {
                let v = acc.entry(i).or_insert(0);
                *v = md.mul_add(*v, c, a);
            }
        }
        acc.values().any(|&v| v != 0)
    }

    /// One step of pole reduction from order `m` to `m - 1`, returning the
    /// captured basis coordinates (positions and values) for pole order `m`.
    pub fn reduce_pole_step(&self, state: ReductionState) -> Result<(ReductionState, Vec<(usize, ScaledResidue)>)> {
        let md = self.modulus;
        let p = md.p();
        let ReductionState {
            m,
            mut numerator,
            mut ledger,
        } = state;
        let mut retries = 0;
        let (div_sum, c_part, basis_part) = loop {
            let (div_sum, c_part, basis_part, other) = self.divide_fused(&numerator);
            if !other {
                break (div_sum, c_part, basis_part);
            }
            retries += 1;
            if retries > TORSION_RETRIES || ledger + 1 >= md.precision() {
                return Err(Error::PrecisionExhausted(format!(
                    "non-basis remainder persists at pole order {m}"
                )));
            }
            numerator.scale(p, md);
            ledger += 1;
        };
        let captured: Vec<(usize, ScaledResidue)> = basis_part
            .iter()
            .enumerate()
            .filter(|(pos, _)| self.basis.elements[*pos].h == m)
            .map(|(pos, &v)| (pos, ScaledResidue::from_residue_shifted(v, md, -(ledger as i64))))
            .collect();
        if m == 1 {
            return Ok((
                ReductionState {
                    m: 0,
                    numerator: DenseForm::zero(&self.graded, self.numerator_degree(0)),
                    ledger,
                },
                captured,
            ));
        }
        let v = vp_u64(m - 1, p);
        let unit = (m - 1) / p.pow(v);
        let inv = md.inv(unit % md.value()).expect("unit part");
        let mut next = div_sum;
        next.scale(inv, md);
        next.add_scaled(&c_part, md.p_pow(v), md);
        Ok((
            ReductionState {
                m: m - 1,
                numerator: next,
                ledger: ledger + v,
            },
            captured,
        ))
    }

    /// Reduce the sum of the terms produced by `term_at(m)` for `m = top..1`.
    /// Terms are requested in decreasing pole order, one at a time.
    pub fn reduce_stream(
        &self,
        top: u64,
        mut term_at: impl FnMut(u64) -> Option<PoleTerm>,
    ) -> Result<ReducedClass> {
        let md = self.modulus;
        let g = &*self.graded;
        let mut coords: Vec<Option<ScaledResidue>> = vec![None; self.basis.dim()];
        let mut state = ReductionState {
            m: top,
            numerator: DenseForm::zero(g, self.numerator_degree(top)),
            ledger: 0,
        };
        while state.m >= 1 {
            if let Some(term) = term_at(state.m) {
                if term.pole != state.m || term.numerator.degree != state.numerator.degree {
                    return Err(Error::Internal(format!(
                        "term at pole {} does not match state at pole {}",
                        term.pole, state.m
                    )));
                }
                let scale = md.p_pow(state.ledger + term.shift);
                state.numerator.add_scaled(&term.numerator, scale, md);
            }
            let (next, captured) = self.reduce_pole_step(state)?;
            for (pos, v) in captured {
                coords[pos] = Some(match coords[pos] {
                    Some(old) => old + v,
                    None => v,
                });
            }
            state = next;
        }
        let p = md.p();
        Ok(ReducedClass {
            coordinates: coords
                .into_iter()
                .map(|c| c.unwrap_or_else(|| ScaledResidue::zero(p, md.precision() as i64)))
                .collect(),
        })
    }

    /// Reduce an explicit list of terms.
    pub fn reduce_to_basis(&self, terms: Vec<PoleTerm>) -> Result<ReducedClass> {
        let mut by_pole: BTreeMap<u64, PoleTerm> = BTreeMap::new();
        let md = self.modulus;
        for t in terms {
            let scaled = {
                let mut f = t.numerator.clone();
                f.scale(md.p_pow(t.shift), md);
                f
            };
            match by_pole.get_mut(&t.pole) {
                Some(acc) => acc.numerator.add_assign(&scaled, md),
                None => {
                    by_pole.insert(
                        t.pole,
                        PoleTerm {
                            pole: t.pole,
                            numerator: scaled,
                            shift: 0,
                        },
                    );
                }
            }
        }
        let top = by_pole.keys().next_back().copied().unwrap_or(1);
        self.reduce_stream(top, |m| by_pole.remove(&m))
    }
}

/// Column of a low-degree solve: a generator multiple `x^gamma * g_slot` or a basis monomial.
enum Column {
    Multiple { slot: usize, gamma: Vec<u16> },
    Basis { pos: usize },
}

/// Entries for every monomial of degree `k` from one linear solve over `Z/p^S`:
/// the basis monomials together with generator multiples span the degree-`k`
/// forms, so a square subsystem invertible mod `p` expresses each monomial.
fn low_degree_entries(
    spec: &HypersurfaceSpec,
    g: &Graded,
    md: Modulus,
    k: i64,
    positions: &BTreeMap<usize, usize>,
) -> Result<Vec<Entry>> {
    let nv = spec.nvars();
    let dim = g.dim(k);
    let fp = Modulus::new(md.p(), 1)?;
    let mut generators: Vec<DenseForm> = (0..nv)
        .map(|i| crate::dense::dense_from_integer(g, &spec.lift.partial(i), md))
        .collect();
    generators.push(crate::dense::dense_from_integer(g, &spec.lift, md));

    let mut candidates: Vec<(Column, Vec<u64>)> = positions
        .iter()
        .map(|(&idx, &pos)| {
            let mut v = vec![0u64; dim];
            v[idx] = 1 % md.value();
            (Column::Basis { pos }, v)
        })
        .collect();
    for (slot, gen) in generators.iter().enumerate() {
        let gd = k - gen.degree;
        for gi in 0..g.dim(gd) {
            let gamma = g.exps(gd as usize, gi).to_vec();
            let mut f = DenseForm::zero(g, k);
            f.add_monomial_multiple(g, gen, &gamma, 1, md);
            candidates.push((Column::Multiple { slot, gamma }, f.coeffs));
        }
    }

    // Greedy column selection by elimination mod p.
    let mut echelon: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    for (ci, (_, col)) in candidates.iter().enumerate() {
        if chosen.len() == dim {
            break;
        }
        let mut v: Vec<u64> = col.iter().map(|&c| fp.reduce(c)).collect();
        for (piv, row) in &echelon {
            let c = v[*piv];
            if c != 0 {
                for (x, &y) in v.iter_mut().zip(row) {
                    *x = fp.sub(*x, fp.mul(c, y));
                }
            }
        }
        if let Some(piv) = v.iter().position(|&c| c != 0) {
            let inv = fp.inv(v[piv]).expect("unit");
            v.iter_mut().for_each(|x| *x = fp.mul(*x, inv));
            for (_, row) in echelon.iter_mut() {
                let c = row[piv];
                if c != 0 {
                    for (x, &y) in row.iter_mut().zip(&v) {
                        *x = fp.sub(*x, fp.mul(c, y));
                    }
                }
            }
            echelon.push((piv, v));
            chosen.push(ci);
        }
    }
    if chosen.len() != dim {
        return Err(Error::Unsupported(format!(
            "degree {k} is not spanned by the basis and the Jacobian ideal"
        )));
    }

    // Invert the chosen square system over Z/p^S: a[row][c] = coefficient of monomial row in column c.
    let mut a: Vec<Vec<u64>> = (0..dim)
        .map(|row| chosen.iter().map(|&ci| candidates[ci].1[row]).collect())
        .collect();
    let mut inv: Vec<Vec<u64>> = (0..dim)
        .map(|i| (0..dim).map(|j| (i == j) as u64 % md.value()).collect())
        .collect();
    for col in 0..dim {
        let piv = (col..dim)
            .find(|&r| md.val(a[r][col]) == Some(0))
            .ok_or_else(|| Error::Internal("square system not invertible".into()))?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let u = md.inv(a[col][col]).expect("unit pivot");
        for j in 0..dim {
            a[col][j] = md.mul(a[col][j], u);
            inv[col][j] = md.mul(inv[col][j], u);
        }
        for r in 0..dim {
            let c = a[r][col];
            if r != col && c != 0 {
                for j in 0..dim {
                    a[r][j] = md.sub(a[r][j], md.mul(c, a[col][j]));
                    inv[r][j] = md.sub(inv[r][j], md.mul(c, inv[col][j]));
                }
            }
        }
    }

    // Monomial `idx` equals sum_c inv[c][idx] * column_c.
    Ok((0..dim)
        .map(|idx| {
            let mut entry = Entry {
                terms: vec![(Vec::new(), Vec::new()); nv + 1],
                ..Default::default()
            };
            for (c, &ci) in chosen.iter().enumerate() {
                let coef = inv[c][idx];
                if coef == 0 {
                    continue;
                }
                match &candidates[ci].0 {
                    Column::Basis { pos } => entry.basis_part.push((*pos, coef)),
                    Column::Multiple { slot, gamma } => {
                        entry.terms[*slot].0.extend_from_slice(gamma);
                        entry.terms[*slot].1.push(coef);
                    }
                }
            }
            entry
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_basis, parse_and_lift, ProblemFile};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn context(p: u64, n: usize, poly: &str, precision: u32) -> ReductionContext {
        let spec = parse_and_lift(&ProblemFile {
            p,
            n,
            polynomial: poly.into(),
            ..Default::default()
        })
        .unwrap();
        let (basis, _) = build_basis(&spec).unwrap();
        let g = Arc::new(Graded::new(n + 1));
        let gb = StrongGB::compute(&spec, &g, precision).unwrap();
        ReductionContext::new(&spec, &basis, g, &gb).unwrap()
    }

    const CUBIC_SURFACE: &str = "x0^3 + x1^3 + x2^3 + x3^3 + x0*x1*x2 + 2*x1*x2*x3";

    #[test]
    fn basis_elements_are_idempotent() {
        let ctx = context(5, 3, CUBIC_SURFACE, 4);
        let g = ctx.graded.clone();
        for (pos, e) in ctx.basis.elements.iter().enumerate() {
            let k = ctx.numerator_degree(e.h);
            let mut f = DenseForm::zero(&g, k);
            f.coeffs[g.rank(&e.monomial)] = 1;
            let red = ctx
                .reduce_to_basis(vec![PoleTerm {
                    pole: e.h,
                    numerator: f,
                    shift: 0,
                }])
                .unwrap();
            for (i, c) in red.coordinates.iter().enumerate() {
                let v = c.to_residue(4).unwrap().value();
                assert_eq!(v, (i == pos) as u64);
            }
        }
    }

    #[test]
    fn exact_forms_reduce_to_zero() {
        let ctx = context(5, 3, CUBIC_SURFACE, 6);
        let g = ctx.graded.clone();
        let md = ctx.modulus;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let lift_partials: Vec<DenseForm> = {
            let spec = parse_and_lift(&ProblemFile {
                p: 5,
                n: 3,
                polynomial: CUBIC_SURFACE.into(),
                ..Default::default()
            })
            .unwrap();
            (0..4)
                .map(|i| crate::dense::dense_from_integer(&g, &spec.lift.partial(i), md))
                .collect()
        };
        for m in [2u64, 3, 4] {
            let deg_a = m as i64 * 3 - 3;
            let mut top = DenseForm::zero(&g, ctx.numerator_degree(m + 1));
            let mut low = DenseForm::zero(&g, ctx.numerator_degree(m));
            for (i, part) in lift_partials.iter().enumerate() {
                let mut a = DenseForm::zero(&g, deg_a);
                for c in a.coeffs.iter_mut() {
                    *c = rng.gen_range(0..md.value());
                }
                let prod = a.mul(part, &g, md);
                top.add_scaled(&prod, md.from_i64(-(m as i64)), md);
                low.add_assign(&a.partial(&g, i, md), md);
            }
            let red = ctx
                .reduce_to_basis(vec![
                    PoleTerm { pole: m + 1, numerator: top, shift: 0 },
                    PoleTerm { pole: m, numerator: low, shift: 0 },
                ])
                .unwrap();
            let prec = red.certified_precision();
            assert!(prec >= 2, "precision {prec}");
            for c in &red.coordinates {
                assert_eq!(c.to_residue(prec as u32).unwrap().value(), 0);
            }
        }
    }
}
