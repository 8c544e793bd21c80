//! Problem input, smoothness, and the monomial basis of primitive middle
//! cohomology.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dense::Graded;
use crate::error::{Error, Result};
use crate::poly::{default_names, HPoly, Monomial};
use crate::residue::{is_prime, Modulus, PResidue};

/// The on-disk problem description (TOML).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub p: u64,
    pub n: usize,
    pub polynomial: String,
    /// Variable names; defaults to `x0..xn`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<String>>,
    /// Explicit integer lift, used verbatim.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift: Option<String>,
    /// Target final precision `r`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u64>,
    /// Deliberately low working precision for heuristic prescreening.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prescreen: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl ProblemFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Input(format!("problem file: {e}")))
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        ProblemFile::from_toml(&text)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LiftSource {
    Canonical,
    Explicit,
}

/// A hypersurface over `F_p` together with an integral lift.
#[derive(Clone, Debug, PartialEq)]
pub struct HypersurfaceSpec {
    pub p: u64,
    pub n: usize,
    pub d: u32,
    pub names: Vec<String>,
    pub poly: HPoly<PResidue>,
    pub lift: HPoly<BigInt>,
    pub lift_source: LiftSource,
}

impl HypersurfaceSpec {
    pub fn nvars(&self) -> usize {
        self.n + 1
    }

    pub fn fp(&self) -> Modulus {
        Modulus::new(self.p, 1).expect("validated prime")
    }

    /// Degree `(n+1)(d-2)+1` above which the Jacobian quotient vanishes.
    pub fn socle_degree(&self) -> i64 {
        (self.n as i64 + 1) * (self.d as i64 - 2) + 1
    }

    /// Degree of numerators with pole order `h`.
    pub fn numerator_degree(&self, h: u64) -> i64 {
        h as i64 * self.d as i64 - self.n as i64 - 1
    }

    /// Closed-form dimension of primitive middle cohomology.
    pub fn expected_dimension(&self) -> i64 {
        let e = self.d as i64 - 1;
        let sign = if (self.n + 1).is_multiple_of(2) { 1 } else { -1 };
        (e.pow(self.n as u32 + 1) + sign * e) / self.d as i64
    }

    /// Content hash of `(p, n, lift)`, used as a cache key.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{}|{}|{}", self.p, self.n, self.lift));
        hex(&h.finalize())
    }

    pub fn lift_text(&self) -> String {
        self.lift.format_with(&self.names)
    }

    pub fn poly_text(&self) -> String {
        self.poly.format_with(&self.names)
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Parse the problem, validate it, and fix an integral lift.
pub fn parse_and_lift(problem: &ProblemFile) -> Result<HypersurfaceSpec> {
    let p = problem.p;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p > 1 << 20 {
        return Err(Error::Unsupported(format!("p = {p} is too large")));
    }
    let n = problem.n;
    if !(2..=6).contains(&n) {
        return Err(Error::Input(format!("ambient dimension n = {n} outside 2..=6")));
    }
    let names = match &problem.variables {
        Some(v) => {
            if v.len() != n + 1 {
                return Err(Error::Input(format!("{} variable names given for n = {n}", v.len())));
            }
            let mut seen = v.clone();
            seen.sort();
            seen.dedup();
            if seen.len() != v.len() {
                return Err(Error::Input("duplicate variable names".into()));
            }
            v.clone()
        }
        None => default_names(n + 1),
    };
    let fp = Modulus::new(p, 1)?;
    let raw = HPoly::parse(&problem.polynomial, &names)?;
    let poly = raw.reduce_mod(fp);
    if poly.is_zero() {
        return Err(Error::Input("polynomial vanishes modulo p".into()));
    }
    let d = raw.degree();
    if d < 2 {
        return Err(Error::Input(format!("degree {d} is too small")));
    }
    let (lift, lift_source) = match &problem.lift {
        Some(text) => {
            let l = HPoly::parse(text, &names)?;
            if l.degree() != d {
                return Err(Error::Input(format!("lift has degree {} but polynomial has degree {d}", l.degree())));
            }
            if l.reduce_mod(fp) != poly {
                return Err(Error::Input("lift does not reduce to the polynomial modulo p".into()));
            }
            (l, LiftSource::Explicit)
        }
        None => (
            poly.map_coeffs(|c| BigInt::from(c.value())),
            LiftSource::Canonical,
        ),
    };
    Ok(HypersurfaceSpec {
        p,
        n,
        d,
        names,
        poly,
        lift,
        lift_source,
    })
}

/// Convenience wrapper: parse TOML text straight to a spec.
pub fn spec_from_toml(text: &str) -> Result<HypersurfaceSpec> {
    parse_and_lift(&ProblemFile::from_toml(text)?)
}

/// Row echelon data of the span of `{m * dP/dx_i}` and `{m * P}` inside degree `k` over `F_p`.
pub struct JacobianSpan {
    pub degree: i64,
    /// `pivot[c]` is true when monomial index `c` is a leading monomial of the span.
    pub pivot: Vec<bool>,
}

impl JacobianSpan {
    pub fn rank(&self) -> usize {
        self.pivot.iter().filter(|&&b| b).count()
    }

    /// Indices of monomials outside the leading set, in descending grevlex order.
    pub fn standard(&self) -> Vec<usize> {
        (0..self.pivot.len()).filter(|&c| !self.pivot[c]).collect()
    }
}

pub fn jacobian_span(spec: &HypersurfaceSpec, g: &Graded, k: i64) -> JacobianSpan {
    let fp = spec.fp();
    let p = fp.value();
    let cols = g.dim(k);
    let mut gens: Vec<crate::dense::DenseForm> = (0..spec.nvars())
        .map(|i| crate::dense::DenseForm::from_hpoly(g, &spec.poly.partial(i), fp))
        .collect();
    gens.push(crate::dense::DenseForm::from_hpoly(g, &spec.poly, fp));

    // rows[c] holds the reduced row with leading column c.
    let mut rows: Vec<Option<Vec<u64>>> = vec![None; cols];
    for gen in &gens {
        let shift = k - gen.degree;
        if shift < 0 || gen.is_zero() {
            continue;
        }
        let nv = g.nvars();
        let table = g.table(shift as usize);
        for mi in 0..g.dim(shift) {
            let mono = &table[mi * nv..(mi + 1) * nv];
            let mut row = crate::dense::DenseForm::zero(g, k);
            row.add_monomial_multiple(g, gen, mono, 1, fp);
            let mut v = row.coeffs;
            let mut c = 0;
            loop {
                while c < cols && v[c] == 0 {
                    c += 1;
                }
                if c == cols {
                    break;
                }
                match &rows[c] {
                    Some(r) => {
                        let f = p - v[c];
                        for t in c..cols {
                            if r[t] != 0 {
                                v[t] = fp.mul_add(v[t], f, r[t]);
                            }
                        }
                    }
                    None => {
                        let inv = fp.inv(v[c]).expect("nonzero mod p");
                        for t in v.iter_mut().skip(c) {
                            *t = fp.mul(*t, inv);
                        }
                        rows[c] = Some(v);
                        break;
                    }
                }
            }
        }
    }
    JacobianSpan {
        degree: k,
        pivot: rows.iter().map(|r| r.is_some()).collect(),
    }
}

/// Accepts iff the hypersurface is smooth over the algebraic closure of `F_p`.
pub fn check_smooth(spec: &HypersurfaceSpec) -> Result<()> {
    let g = Graded::new(spec.nvars());
    // When p | d the partials are not a regular sequence and (P, dP) may
    // vanish only one degree later.
    let k = spec.socle_degree() + (spec.d as u64).is_multiple_of(spec.p) as i64;
    let span = jacobian_span(spec, &g, k);
    if span.rank() == g.dim(k) {
        Ok(())
    } else {
        Err(Error::Singular {
            witness_degree: k as usize,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    /// Pole order.
    pub h: u64,
    pub monomial: Vec<u16>,
}

/// The monomial basis `{mu * Omega / P^h}`, ordered by pole order and then by
/// descending grevlex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyBasis {
    pub n: usize,
    pub d: u32,
    pub elements: Vec<BasisElement>,
}

impl CohomologyBasis {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    /// Position of `(h, mu)` in the basis.
    pub fn position(&self, h: u64, mono: &[u16]) -> Option<usize> {
        self.elements
            .iter()
            .position(|e| e.h == h && e.monomial == mono)
    }

    pub fn labels(&self, names: &[String]) -> Vec<(u64, String)> {
        self.elements
            .iter()
            .map(|e| (e.h, Monomial::new(&e.monomial).format_with(names)))
            .collect()
    }
}

/// Basis counts per pole order `h = 1..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeProfile {
    pub counts: Vec<usize>,
}

impl HodgeProfile {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

pub fn build_basis(spec: &HypersurfaceSpec) -> Result<(CohomologyBasis, HodgeProfile)> {
    check_smooth(spec)?;
    let g = Graded::new(spec.nvars());
    let mut elements = Vec::new();
    let mut counts = Vec::new();
    for h in 1..=spec.n as u64 {
        let k = spec.numerator_degree(h);
        if k < 0 {
            counts.push(0);
            continue;
        }
        let span = jacobian_span(spec, &g, k);
        let std = span.standard();
        counts.push(std.len());
        for idx in std {
            elements.push(BasisElement {
                h,
                monomial: g.exps(k as usize, idx).to_vec(),
            });
        }
    }
    let expected = spec.expected_dimension();
    if elements.len() as i64 != expected {
        return Err(Error::Unsupported(format!(
            "Jacobian quotient has dimension {} but {} was expected; the integral lattice is not free here",
            elements.len(),
            expected
        )));
    }
    Ok((
        CohomologyBasis {
            n: spec.n,
            d: spec.d,
            elements,
        },
        HodgeProfile { counts },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn rejects_bad_input() {
        let mk = |p, poly: &str| {
            parse_and_lift(&ProblemFile {
                p,
                n: 2,
                polynomial: poly.into(),
                ..Default::default()
            })
        };
        assert_eq!(mk(5, "x0^3 + x1^2"), Err(Error::NotHomogeneous));
        assert_eq!(mk(4, "x0^3 + x1^3 + x2^3"), Err(Error::NotPrime(4)));
        assert!(mk(5, "x0^3 + x3^3").is_err());
    }

    #[test]
    fn lift_is_canonical_or_verbatim() {
        let s = spec(3, 2, "2*x0^3 - x1^3 + x2^3");
        assert_eq!(s.lift_text(), "2*x0^3 + 2*x1^3 + x2^3");
        let explicit = parse_and_lift(&ProblemFile {
            p: 3,
            n: 2,
            polynomial: "2*x0^3 - x1^3 + x2^3".into(),
            lift: Some("-x0^3 - x1^3 + 4*x2^3".into()),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(explicit.lift_source, LiftSource::Explicit);
        assert_eq!(explicit.lift_text(), "-x0^3 - x1^3 + 4*x2^3");
        let wrong = parse_and_lift(&ProblemFile {
            p: 3,
            n: 2,
            polynomial: "x0^3 + x1^3 + x2^3".into(),
            lift: Some("x0^3 + x1^3 + 2*x2^3".into()),
            ..Default::default()
        });
        assert!(wrong.is_err());
    }

    #[test]
    fn smoothness_examples() {
        let fermat = "x0^4 + x1^4 + x2^4 + x3^4";
        assert!(check_smooth(&spec(3, 3, fermat)).is_ok());
        assert_eq!(check_smooth(&spec(2, 3, fermat)), Err(Error::Singular { witness_degree: 10 }));
        assert!(check_smooth(&spec(5, 3, "x0^3 + x1^3 + x2^3 + x3^3")).is_ok());
        assert!(check_smooth(&spec(5, 2, "x0*x1*x2")).is_err());
    }

    #[test]
    fn fermat_basis_dimensions() {
        let (b, prof) = build_basis(&spec(5, 3, "x0^3 + x1^3 + x2^3 + x3^3")).unwrap();
        assert_eq!(b.dim(), 6);
        assert_eq!(prof.counts, vec![0, 6, 0]);
        let (b, prof) = build_basis(&spec(3, 3, "x0^4 + x1^4 + x2^4 + x3^4")).unwrap();
        assert_eq!(b.dim(), 21);
        assert_eq!(prof.counts, vec![1, 19, 1]);
        assert_eq!(b.elements[0].monomial, vec![0, 0, 0, 0]);
    }
}
