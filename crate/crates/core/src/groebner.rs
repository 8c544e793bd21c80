//! Strong Gröbner bases over `Z/p^S` for the ideal `(dP/dx_0, ..., dP/dx_n, P)`,
//! with transformation records back to those generators.
//!
//! All polynomials involved are homogeneous, so everything is kept in dense
//! graded form and pairs are processed degree by degree.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dense::{dense_from_integer, DenseForm, Graded};
use crate::error::{Error, Result};
use crate::geometry::{hex, HypersurfaceSpec};
use crate::residue::Modulus;

const CACHE_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct GbElement {
    pub poly: DenseForm,
    /// Index of the leading monomial within its degree.
    pub lead: usize,
    pub lead_exps: Vec<u16>,
    /// The leading coefficient is exactly `p^lead_val`.
    pub lead_val: u32,
    /// Cofactors with respect to `dP/dx_0, ..., dP/dx_n, P`.
    pub transform: Vec<DenseForm>,
}

impl GbElement {
    pub fn degree(&self) -> i64 {
        self.poly.degree
    }
}

/// A strong Gröbner basis of `(dP/dx_i, P)` over `Z/p^S` under grevlex.
#[derive(Clone, Debug)]
pub struct StrongGB {
    pub modulus: Modulus,
    pub nvars: usize,
    pub d: u32,
    pub generators: Vec<DenseForm>,
    pub elements: Vec<GbElement>,
    /// Smallest degree in which every monomial has a unit-led reducer.
    pub cover_degree: Option<i64>,
    pub key: String,
}

/// Result of dividing by the generators: `G = sum A_i dP/dx_i + C P + R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Division {
    /// `A_0..A_n` followed by `C`.
    pub cofactors: Vec<DenseForm>,
    pub remainder: DenseForm,
}

enum Item {
    Input(usize),
    Pair(usize, usize),
    Annihilator(usize),
}

pub fn cache_key(spec: &HypersurfaceSpec, precision: u32) -> String {
    let mut h = Sha256::new();
    h.update(format!("gb|{}|{}|{}", spec.content_hash(), spec.p, precision));
    hex(&h.finalize())
}

impl StrongGB {
    pub fn compute(spec: &HypersurfaceSpec, g: &Graded, precision: u32) -> Result<StrongGB> {
        let mut gb = StrongGB::start(spec, g, precision, true)?;
        gb.complete(g, spec.socle_degree() + 2 * spec.d as i64, true)?;
        Ok(gb)
    }

    /// A basis that is only complete through `max_degree`, optionally without
    /// `P` among the generators. Normal forms are valid up to that degree.
    pub fn compute_truncated(
        spec: &HypersurfaceSpec,
        g: &Graded,
        precision: u32,
        include_p: bool,
        max_degree: i64,
    ) -> Result<StrongGB> {
        let mut gb = StrongGB::start(spec, g, precision, include_p)?;
        gb.complete(g, max_degree, false)?;
        Ok(gb)
    }

    fn start(spec: &HypersurfaceSpec, g: &Graded, precision: u32, include_p: bool) -> Result<StrongGB> {
        let md = Modulus::new(spec.p, precision)?;
        let nv = spec.nvars();
        let mut generators: Vec<DenseForm> = (0..nv)
            .map(|i| dense_from_integer(g, &spec.lift.partial(i), md))
            .collect();
        if include_p {
            generators.push(dense_from_integer(g, &spec.lift, md));
        }
        Ok(StrongGB {
            modulus: md,
            nvars: nv,
            d: spec.d,
            generators,
            elements: Vec::new(),
            cover_degree: None,
            key: cache_key(spec, precision),
        })
    }

    fn unit_transform(&self, g: &Graded, slot: usize) -> Vec<DenseForm> {
        let deg = self.generators[slot].degree;
        (0..self.generators.len())
            .map(|t| {
                let mut f = DenseForm::zero(g, deg - self.generators[t].degree);
                if t == slot {
                    f.coeffs[0] = 1 % self.modulus.value();
                }
                f
            })
            .collect()
    }

    fn complete(&mut self, g: &Graded, max_degree: i64, require_cover: bool) -> Result<()> {
        let md = self.modulus;
        let mut queue: BTreeMap<i64, Vec<Item>> = BTreeMap::new();
        for (i, gen) in self.generators.iter().enumerate() {
            queue.entry(gen.degree).or_default().push(Item::Input(i));
        }
        while let Some((&deg, _)) = queue.iter().next() {
            if self.cover_degree.is_some_and(|c| deg > c) {
                break;
            }
            if deg > max_degree {
                if !require_cover {
                    break;
                }
                return Err(Error::Internal(format!(
                    "Gröbner completion passed degree {max_degree} without covering; is the input smooth?"
                )));
            }
            while let Some(items) = queue.remove(&deg) {
                for item in items {
                    let (mut f, mut t) = match item {
                        Item::Input(i) => (self.generators[i].clone(), self.unit_transform(g, i)),
                        Item::Pair(i, j) => self.s_poly(g, i, j),
                        Item::Annihilator(i) => {
                            let e = &self.elements[i];
                            let c = md.p_pow(md.precision() - e.lead_val);
                            let mut f = e.poly.clone();
                            f.scale(c, md);
                            let mut t = e.transform.clone();
                            t.iter_mut().for_each(|x| x.scale(c, md));
                            (f, t)
                        }
                    };
                    self.reduce_in_place(g, &mut f, Some(&mut t));
                    if f.is_zero() {
                        continue;
                    }
                    let idx = self.push_element(g, f, t);
                    let new = &self.elements[idx];
                    if new.lead_val > 0 {
                        queue.entry(new.degree()).or_default().push(Item::Annihilator(idx));
                    }
                    for j in 0..idx {
                        let old = &self.elements[j];
                        let coprime = new.lead_exps.iter().zip(&old.lead_exps).all(|(a, b)| *a == 0 || *b == 0);
                        if coprime && new.lead_val == 0 && old.lead_val == 0 {
                            continue;
                        }
                        let lcm_deg: i64 = new
                            .lead_exps
                            .iter()
                            .zip(&old.lead_exps)
                            .map(|(a, b)| *a.max(b) as i64)
                            .sum();
                        queue.entry(lcm_deg).or_default().push(Item::Pair(j, idx));
                    }
                }
            }
            if self.cover_degree.is_none() && self.covers(g, deg) {
                self.cover_degree = Some(deg);
            }
        }
        self.minimalize();
        Ok(())
    }

    fn covers(&self, g: &Graded, k: i64) -> bool {
        (0..g.dim(k)).all(|i| {
            let e = g.exps(k as usize, i);
            self.elements
                .iter()
                .any(|el| el.lead_val == 0 && el.degree() <= k && divides(&el.lead_exps, e))
        })
    }

    fn push_element(&mut self, g: &Graded, mut f: DenseForm, mut t: Vec<DenseForm>) -> usize {
        let md = self.modulus;
        let lead = f.coeffs.iter().position(|&c| c != 0).expect("nonzero");
        let c = f.coeffs[lead];
        let v = md.val(c).expect("nonzero");
        let unit = c / md.p().pow(v);
        let inv = md.inv(unit).expect("unit");
        f.scale(inv, md);
        t.iter_mut().for_each(|x| x.scale(inv, md));
        debug_assert_eq!(f.coeffs[lead], md.p().pow(v));
        let lead_exps = g.exps(f.degree as usize, lead).to_vec();
        self.elements.push(GbElement {
            poly: f,
            lead,
            lead_exps,
            lead_val: v,
            transform: t,
        });
        self.elements.len() - 1
    }

    fn s_poly(&self, g: &Graded, i: usize, j: usize) -> (DenseForm, Vec<DenseForm>) {
        let md = self.modulus;
        let (a, b) = (&self.elements[i], &self.elements[j]);
        let lcm: Vec<u16> = a.lead_exps.iter().zip(&b.lead_exps).map(|(x, y)| *x.max(y)).collect();
        let deg: i64 = lcm.iter().map(|&e| e as i64).sum();
        let top = a.lead_val.max(b.lead_val);
        let mut f = DenseForm::zero(g, deg);
        let mut t: Vec<DenseForm> = self
            .generators
            .iter()
            .map(|gen| DenseForm::zero(g, deg - gen.degree))
            .collect();
        for (el, sign) in [(a, 1u64), (b, md.neg(1))] {
            let mono: Vec<u16> = lcm.iter().zip(&el.lead_exps).map(|(x, y)| x - y).collect();
            let c = md.mul(md.p_pow(top - el.lead_val), sign);
            f.add_monomial_multiple(g, &el.poly, &mono, c, md);
            for (tt, src) in t.iter_mut().zip(&el.transform) {
                tt.add_monomial_multiple(g, src, &mono, c, md);
            }
        }
        (f, t)
    }

    fn minimalize(&mut self) {
        let n = self.elements.len();
        let mut keep = vec![true; n];
        for i in 0..n {
            for j in 0..n {
                if i == j || !keep[j] {
                    continue;
                }
                let (a, b) = (&self.elements[i], &self.elements[j]);
                let dominated = divides(&b.lead_exps, &a.lead_exps) && b.lead_val <= a.lead_val;
                let identical = b.lead_exps == a.lead_exps && b.lead_val == a.lead_val;
                if dominated && (!identical || j < i) {
                    keep[i] = false;
                    break;
                }
            }
        }
        let mut it = keep.iter();
        self.elements.retain(|_| *it.next().unwrap());
    }

    /// The element used to reduce monomial `e`: the divisor with the smallest
    /// leading valuation, first in list order on ties.
    fn reducer(&self, e: &[u16]) -> Option<&GbElement> {
        let deg: i64 = e.iter().map(|&x| x as i64).sum();
        let mut best: Option<&GbElement> = None;
        for el in &self.elements {
            if el.degree() > deg || !divides(&el.lead_exps, e) {
                continue;
            }
            if best.is_none_or(|b| el.lead_val < b.lead_val) {
                best = Some(el);
                if el.lead_val == 0 {
                    break;
                }
            }
        }
        best
    }

    /// Full reduction to the normal form. Each remaining coefficient is either
    /// on a monomial with no reducer, or below `p^a` for the best reducer.
    fn reduce_in_place(&self, g: &Graded, f: &mut DenseForm, mut track: Option<&mut Vec<DenseForm>>) {
        let md = self.modulus;
        let k = f.degree;
        if k < 0 {
            return;
        }
        let nv = self.nvars;
        let mut mono = vec![0u16; nv];
        for idx in 0..f.coeffs.len() {
            let c = f.coeffs[idx];
            if c == 0 {
                continue;
            }
            let e = g.exps(k as usize, idx);
            let Some(el) = self.reducer(e) else { continue };
            let q = c / md.p().pow(el.lead_val);
            if q == 0 {
                continue;
            }
            for v in 0..nv {
                mono[v] = e[v] - el.lead_exps[v];
            }
            let neg_q = md.neg(q);
            f.add_monomial_multiple(g, &el.poly, &mono, neg_q, md);
            if let Some(t) = track.as_deref_mut() {
                for (tt, src) in t.iter_mut().zip(&el.transform) {
                    tt.add_monomial_multiple(g, src, &mono, neg_q, md);
                }
            }
            debug_assert_eq!(f.coeffs[idx], c % md.p().pow(el.lead_val));
        }
    }

    pub fn normal_form(&self, g: &Graded, f: &DenseForm) -> DenseForm {
        let mut r = f.clone();
        self.reduce_in_place(g, &mut r, None);
        r
    }

    /// `G = sum A_i dP/dx_i + C P + R` with `R` the normal form of `G`.
    pub fn divide_with_cofactors(&self, g: &Graded, f: &DenseForm) -> Division {
        let mut r = f.clone();
        let mut t: Vec<DenseForm> = self
            .generators
            .iter()
            .map(|gen| DenseForm::zero(g, f.degree - gen.degree))
            .collect();
        self.reduce_in_place(g, &mut r, Some(&mut t));
        let md = self.modulus;
        for x in t.iter_mut() {
            for c in x.coeffs.iter_mut() {
                *c = md.neg(*c);
            }
        }
        Division {
            cofactors: t,
            remainder: r,
        }
    }

    /// `sum cofactors[i] * generators[i]`.
    pub fn combine(&self, g: &Graded, cofactors: &[DenseForm], degree: i64) -> DenseForm {
        let md = self.modulus;
        let mut out = DenseForm::zero(g, degree);
        for (c, gen) in cofactors.iter().zip(&self.generators) {
            if c.coeffs.is_empty() {
                continue;
            }
            out.add_assign(&c.mul(gen, g, md), md);
        }
        out
    }

    /// Every S-polynomial and annihilator multiple reduces to zero, and every
    /// transformation record is consistent.
    pub fn verify_closure(&self, g: &Graded) -> bool {
        let md = self.modulus;
        for (i, el) in self.elements.iter().enumerate() {
            if self.combine(g, &el.transform, el.degree()) != el.poly {
                return false;
            }
            if el.lead_val > 0 {
                let mut f = el.poly.clone();
                f.scale(md.p_pow(md.precision() - el.lead_val), md);
                if !self.normal_form(g, &f).is_zero() {
                    return false;
                }
            }
            for j in 0..i {
                let (f, _) = self.s_poly(g, j, i);
                if self.cover_degree.is_some_and(|c| f.degree > c) {
                    continue;
                }
                if !self.normal_form(g, &f).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = CacheFile {
            version: CACHE_VERSION,
            key: self.key.clone(),
            p: self.modulus.p(),
            precision: self.modulus.precision(),
            nvars: self.nvars,
            d: self.d,
            cover_degree: self.cover_degree,
            elements: self
                .elements
                .iter()
                .map(|e| CachedElement {
                    degree: e.degree(),
                    poly: e.poly.coeffs.clone(),
                    transform: e.transform.iter().map(|t| t.coeffs.clone()).collect(),
                })
                .collect(),
        };
        let text = serde_json::to_string(&file).map_err(|e| Error::Io(e.to_string()))?;
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, text)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Load a cached basis; `None` if the file is missing, stale or for other input.
    pub fn load(path: &Path, spec: &HypersurfaceSpec, g: &Graded, precision: u32) -> Option<StrongGB> {
        let text = std::fs::read_to_string(path).ok()?;
        let file: CacheFile = serde_json::from_str(&text).ok()?;
        let key = cache_key(spec, precision);
        if file.version != CACHE_VERSION || file.key != key || file.p != spec.p || file.precision != precision {
            return None;
        }
        let md = Modulus::new(spec.p, precision).ok()?;
        let nv = spec.nvars();
        let mut generators: Vec<DenseForm> = (0..nv)
            .map(|i| dense_from_integer(g, &spec.lift.partial(i), md))
            .collect();
        generators.push(dense_from_integer(g, &spec.lift, md));
        let mut elements = Vec::new();
        for e in file.elements {
            if e.poly.len() != g.dim(e.degree) || e.transform.len() != generators.len() {
                return None;
            }
            let poly = DenseForm {
                degree: e.degree,
                coeffs: e.poly,
            };
            let lead = poly.coeffs.iter().position(|&c| c != 0)?;
            let transform = e
                .transform
                .into_iter()
                .zip(&generators)
                .map(|(c, gen)| DenseForm {
                    degree: e.degree - gen.degree,
                    coeffs: c,
                })
                .collect();
            elements.push(GbElement {
                lead,
                lead_exps: g.exps(e.degree as usize, lead).to_vec(),
                lead_val: md.val(poly.coeffs[lead])?,
                poly,
                transform,
            });
        }
        Some(StrongGB {
            modulus: md,
            nvars: nv,
            d: spec.d,
            generators,
            elements,
            cover_degree: file.cover_degree,
            key,
        })
    }
}

pub(crate) fn divides(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    key: String,
    p: u64,
    precision: u32,
    nvars: usize,
    d: u32,
    cover_degree: Option<i64>,
    elements: Vec<CachedElement>,
}

#[derive(Serialize, Deserialize)]
struct CachedElement {
    degree: i64,
    poly: Vec<u64>,
    transform: Vec<Vec<u64>>,
}
