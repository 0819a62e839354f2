//! Independent checks of the state-sum machinery: the Alexander polynomial
//! from the reduced Burau representation, Reshetikhin–Turaev invariants of
//! finite modules through two R-matrix constructions, and the Yang–Baxter
//! relation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde_json::{json, Value};

use crate::braid::{BraidError, BraidWord};
use crate::qseries::{q1_limit, specialize, Coeff, FramingFactor, Mono, QExponent, RingElem};
use crate::rmatrix::{apply_R, BasisState};
use crate::trace::{twist_weight, TraceSeries};
use crate::verma::{universal_R, FiniteModuleSpec, PairVector, VermaError};

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Verma(#[from] VermaError),
    #[error("state space of {0} colorings exceeds the cap {1}")]
    CapExceeded(usize, usize),
    #[error("Burau determinant is not divisible by 1 + t + … + t^(s-1)")]
    BurauDivision,
    #[error("Alexander polynomial {0} is not palindromic")]
    NotPalindromic(String),
    #[error("leading coefficient {0} of the Alexander product is not a unit")]
    NonUnitLeading(String),
    #[error("R-matrix sends {from} out of the module to {to} with nonzero coefficient")]
    LeavesModule { from: String, to: String },
}

/// A Laurent polynomial in t, normalized so that Δ(t) = Δ(1/t) and Δ(1) = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlexanderPoly {
    pub coeffs: BTreeMap<i64, Coeff>,
}

impl AlexanderPoly {
    fn from_elem(e: &RingElem) -> Self {
        let coeffs = e
            .terms()
            .iter()
            .map(|(m, c)| (m.x.to_integer().expect("integer powers of t"), c.clone()))
            .collect();
        AlexanderPoly { coeffs }
    }

    pub fn at_one(&self) -> Coeff {
        self.coeffs.values().fold(Coeff::ZERO, |a, c| &a + c)
    }

    /// Δ evaluated on the monomial m: Σ c_k m^k.
    pub fn substitute(&self, m: Mono) -> RingElem {
        RingElem::from_terms(self.coeffs.iter().map(|(&k, c)| {
            (Mono::new(m.q.scale(k), m.x.scale(k), m.y.scale(k)), c.clone())
        }))
    }
}

impl fmt::Display for AlexanderPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = RingElem::from_terms(self.coeffs.iter().map(|(&k, c)| (Mono::q(QExponent::int(k)), c.clone())));
        write!(f, "{}", e.to_string().replace('q', "t"))
    }
}

fn t_pow(k: i64) -> RingElem {
    RingElem::x_pow(QExponent::int(k))
}

/// Reduced Burau matrix of σ_i on s strands, size (s-1)×(s-1).
fn burau_generator(s: usize, i: usize) -> Vec<Vec<RingElem>> {
    let n = s - 1;
    let mut m: Vec<Vec<RingElem>> =
        (0..n).map(|r| (0..n).map(|c| if r == c { RingElem::one() } else { RingElem::zero() }).collect()).collect();
    let k = i - 1;
    m[k][k] = -t_pow(1);
    if k > 0 {
        m[k - 1][k] = t_pow(1);
    }
    if k + 1 < n {
        m[k + 1][k] = RingElem::one();
    }
    m
}

fn mat_mul(a: &[Vec<RingElem>], b: &[Vec<RingElem>]) -> Vec<Vec<RingElem>> {
    let n = a.len();
    (0..n)
        .map(|r| (0..n).map(|c| RingElem::sum((0..n).map(|k| &a[r][k] * &b[k][c]).collect::<Vec<_>>().iter())).collect())
        .collect()
}

/// Fraction-free Gaussian elimination over Z[t, 1/t].
fn determinant(mut m: Vec<Vec<RingElem>>) -> RingElem {
    let n = m.len();
    if n == 0 {
        return RingElem::one();
    }
    let mut sign = false;
    let mut prev = RingElem::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return RingElem::zero();
            };
            m.swap(k, p);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact_x(&prev).expect("Bareiss steps divide exactly");
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// det(I − ψ(b)) / (1 + t + … + t^{s−1}), normalized symmetric with Δ(1) = 1.
pub fn alexander(b: &BraidWord) -> Result<AlexanderPoly, OracleError> {
    let s = b.strands();
    let n = s - 1;
    let mut acc: Vec<Vec<RingElem>> =
        (0..n).map(|r| (0..n).map(|c| if r == c { RingElem::one() } else { RingElem::zero() }).collect()).collect();
    for &g in b.word() {
        acc = mat_mul(&acc, &burau_generator(s, g));
    }
    let diff: Vec<Vec<RingElem>> = acc
        .iter()
        .enumerate()
        .map(|(r, row)| row.iter().enumerate().map(|(c, e)| if r == c { &RingElem::one() - e } else { -e }).collect())
        .collect();
    let det = determinant(diff);
    let denom = RingElem::sum((0..s as i64).map(t_pow).collect::<Vec<_>>().iter());
    let quot = det.div_exact_x(&denom).ok_or(OracleError::BurauDivision)?;
    let lo = quot.min_by_key(|m| m.x).ok_or(OracleError::BurauDivision)?;
    let hi = quot.max_by_key(|m| m.x).ok_or(OracleError::BurauDivision)?;
    let span = (lo + hi).units();
    if span % 2 != 0 {
        return Err(OracleError::NotPalindromic(quot.to_string()));
    }
    let mut centered = quot.scale_mono(Mono::new(QExponent::ZERO, QExponent::from_units(-span / 2), QExponent::ZERO));
    let mut poly = AlexanderPoly::from_elem(&centered);
    if poly.at_one().is_negative() {
        centered = -centered;
        poly = AlexanderPoly::from_elem(&centered);
    }
    let mirrored = centered.map_monos(|m| Mono::new(m.q, -m.x, m.y));
    if mirrored != centered {
        return Err(OracleError::NotPalindromic(poly.to_string()));
    }
    Ok(poly)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub location: String,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub check: String,
    pub passed: bool,
    pub mismatches: Vec<Mismatch>,
    pub unit_normalization: Option<String>,
}

impl OracleReport {
    fn new(check: &str, mismatches: Vec<Mismatch>, unit: Option<String>) -> Self {
        OracleReport { check: check.to_string(), passed: mismatches.is_empty(), mismatches, unit_normalization: unit }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check": self.check,
            "status": if self.passed { "pass" } else { "fail" },
            "mismatches": self.mismatches.iter().map(|m| json!({
                "location": m.location,
                "expected": m.expected,
                "got": m.got,
            })).collect::<Vec<_>>(),
            "unit_normalization": self.unit_normalization,
        })
    }
}

/// Leading (x, y) exponents and the dense coefficient table indexed by (i, j).
pub type ProductSeries = ((i64, i64), Vec<Vec<Coeff>>);

/// Coefficients of 1/(Δ(x)Δ(y)Δ(1/(xy))) as a series in x^{-1}, y^{-1}:
/// returns the leading exponents and the dense table up to (dx, dy).
pub fn alexander_product_series(delta: &AlexanderPoly, dx: u32, dy: u32) -> Result<ProductSeries, OracleError> {
    let one = QExponent::int(1);
    let p = &(&delta.substitute(Mono::new(QExponent::ZERO, one, QExponent::ZERO))
        * &delta.substitute(Mono::new(QExponent::ZERO, QExponent::ZERO, one)))
        * &delta.substitute(Mono::new(QExponent::ZERO, -one, -one));
    let tx = p.max_by_key(|m| m.x).expect("nonzero product").to_integer().expect("integer exponent");
    let ty = p.max_by_key(|m| m.y).expect("nonzero product").to_integer().expect("integer exponent");
    let (w, h) = (dx as usize + 1, dy as usize + 1);
    let mut q = vec![vec![Coeff::ZERO; h]; w];
    for (m, c) in p.terms() {
        let i = (tx - m.x.to_integer().expect("integer exponent")) as usize;
        let j = (ty - m.y.to_integer().expect("integer exponent")) as usize;
        if i < w && j < h {
            q[i][j] = c.clone();
        }
    }
    let c0 = q[0][0].clone();
    if !(c0.is_one() || (-&c0).is_one()) {
        return Err(OracleError::NonUnitLeading(c0.to_string()));
    }
    let mut r = vec![vec![Coeff::ZERO; h]; w];
    for i in 0..w {
        for j in 0..h {
            let mut acc = if (i, j) == (0, 0) { Coeff::ONE } else { Coeff::ZERO };
            for k in 0..=i {
                for l in 0..=j {
                    if (k, l) != (0, 0) && !q[k][l].is_zero() {
                        acc = &acc - &(&q[k][l] * &r[i - k][j - l]);
                    }
                }
            }
            // c0 = ±1 is its own inverse.
            r[i][j] = &acc * &c0;
        }
    }
    Ok(((-tx, -ty), r))
}

/// Compares the q = 1 limit of every stored coefficient with the Alexander product expansion.
pub fn alexander_check(s: &TraceSeries, b: &BraidWord) -> Result<OracleReport, OracleError> {
    let delta = alexander(b)?;
    let (dx, dy) = s.truncation;
    let (lead, table) = alexander_product_series(&delta, dx, dy)?;
    let mut mismatches = Vec::new();
    if lead != s.leading_offset {
        mismatches.push(Mismatch {
            location: "leading offset".into(),
            expected: format!("x^{} y^{}", lead.0, lead.1),
            got: format!("x^{} y^{}", s.leading_offset.0, s.leading_offset.1),
        });
    }
    for i in 0..=dx {
        for j in 0..=dy {
            let got = q1_limit(&s.coeff(i, j)).map_err(|e| OracleError::NotPalindromic(e.to_string()))?;
            let got = got.terms().first().map(|(_, c)| c.clone()).unwrap_or_default();
            let want = &table[i as usize][j as usize];
            if &got != want {
                mismatches.push(Mismatch { location: format!("({i},{j})"), expected: want.to_string(), got: got.to_string() });
            }
        }
    }
    Ok(OracleReport::new("alexander", mismatches, Some(format!("Delta(t) = {delta}"))))
}

/// How the braiding on the finite module is produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RRoute {
    /// Closed-form transitions specialized at x = q^n, y = q^m, framing reinstated.
    ClosedForm,
    /// Products of root exponentials acting on the module.
    Universal,
}

type Braiding = Vec<((BasisState, BasisState), RingElem)>;

/// Ř|a, b⟩ on the finite module as a list of (|b', a'⟩, coefficient).
pub fn module_braiding(spec: FiniteModuleSpec, route: RRoute, a: &BasisState, b: &BasisState) -> Result<Braiding, OracleError> {
    match route {
        RRoute::ClosedForm => {
            let framing = FramingFactor::new(1).specialize(spec.n, spec.m);
            let mut out = Vec::new();
            for t in apply_R(a, b).iter() {
                let c = &specialize(&t.coeff, spec.n, spec.m) * &framing;
                if c.is_zero() {
                    continue;
                }
                if !spec.contains(&t.output.0) || !spec.contains(&t.output.1) {
                    return Err(OracleError::LeavesModule {
                        from: format!("{a} ⊗ {b}"),
                        to: format!("{} ⊗ {}", t.output.0, t.output.1),
                    });
                }
                out.push((t.output, c));
            }
            Ok(out)
        }
        RRoute::Universal => {
            let v = universal_R(spec, &PairVector::basis((*a, *b)))?;
            let keys: Vec<_> = v.keys().copied().collect();
            let mut out = Vec::new();
            for k in keys {
                let c = v.coeff(&k).ok_or(VermaError::NotIntegral)?;
                if !c.is_zero() {
                    out.push((k, c));
                }
            }
            Ok(out)
        }
    }
}

struct BraidingTable {
    spec: FiniteModuleSpec,
    route: RRoute,
    memo: HashMap<(BasisState, BasisState), Braiding>,
}

impl BraidingTable {
    fn new(spec: FiniteModuleSpec, route: RRoute) -> Self {
        BraidingTable { spec, route, memo: HashMap::new() }
    }

    fn get(&mut self, a: &BasisState, b: &BasisState) -> Result<&Braiding, OracleError> {
        if !self.memo.contains_key(&(*a, *b)) {
            let v = module_braiding(self.spec, self.route, a, b)?;
            self.memo.insert((*a, *b), v);
        }
        Ok(&self.memo[&(*a, *b)])
    }
}

type TensorVector = HashMap<Vec<BasisState>, RingElem>;

fn apply_at(table: &mut BraidingTable, g: usize, v: &TensorVector) -> Result<TensorVector, OracleError> {
    let mut out: TensorVector = HashMap::new();
    for (k, c) in v {
        for ((bo, ao), r) in table.get(&k[g - 1], &k[g])? {
            let mut nk = k.clone();
            nk[g - 1] = *bo;
            nk[g] = *ao;
            let e = out.entry(nk).or_default();
            *e = &*e + &(c * r);
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

fn apply_word(table: &mut BraidingTable, word: &[usize], mut v: TensorVector) -> Result<TensorVector, OracleError> {
    for &g in word {
        v = apply_at(table, g, &v)?;
    }
    Ok(v)
}

pub const DEFAULT_STATE_CAP: usize = 200_000;

/// Reduced quantum trace of the closed braid on the finite module, open strand
/// on the highest weight vector.
pub fn rt_invariant_route(b: &BraidWord, spec: FiniteModuleSpec, route: RRoute, cap: usize) -> Result<RingElem, OracleError> {
    let basis = spec.basis();
    let closed = b.strands() - 1;
    let count = basis.len().checked_pow(closed as u32).unwrap_or(usize::MAX);
    if count > cap {
        return Err(OracleError::CapExceeded(count, cap));
    }
    let mut table = BraidingTable::new(spec, route);
    let mut total = RingElem::zero();
    for idx in 0..count {
        let mut rest = idx;
        let mut col = vec![BasisState::ZERO];
        for _ in 0..closed {
            col.push(basis[rest % basis.len()]);
            rest /= basis.len();
        }
        let mut v: TensorVector = HashMap::from([(col.clone(), RingElem::one())]);
        for &g in b.word() {
            v = apply_at(&mut table, g, &v)?;
        }
        if let Some(diag) = v.get(&col) {
            let w = col.iter().map(twist_weight).fold(RingElem::one(), |a, t| &a * &t);
            total = &total + &(diag * &w);
        }
    }
    Ok(total)
}

/// The closed-form route, which is the specialization of the trace pipeline.
pub fn rt_invariant(b: &BraidWord, n: i64, m: i64) -> Result<RingElem, OracleError> {
    rt_invariant_route(b, FiniteModuleSpec::new(n, m), RRoute::ClosedForm, DEFAULT_STATE_CAP)
}

/// `u` with a = u·b for a signed q-monomial u, fixed by the lowest terms.
fn unit_between(a: &RingElem, b: &RingElem) -> Option<(Mono, Coeff)> {
    let (ma, ca) = a.terms().first()?;
    let (mb, cb) = b.terms().first()?;
    let sign = if ca == cb {
        Coeff::ONE
    } else if *ca == -cb {
        -Coeff::ONE
    } else {
        return None;
    };
    Some((ma.mul(mb.inv()), sign))
}

/// Both routes on the same knot and module, equal up to a printed unit.
pub fn rt_two_route(b: &BraidWord, n: i64, m: i64) -> Result<OracleReport, OracleError> {
    let spec = FiniteModuleSpec::new(n, m);
    let closed = rt_invariant_route(b, spec, RRoute::ClosedForm, DEFAULT_STATE_CAP)?;
    let universal = rt_invariant_route(b, spec, RRoute::Universal, DEFAULT_STATE_CAP)?;
    let mut mismatches = Vec::new();
    let unit = match unit_between(&universal, &closed) {
        Some((mono, sign)) => {
            let scaled = closed.scale_mono(mono).scale_int(&sign);
            if scaled != universal {
                mismatches.push(Mismatch { location: format!("({n},{m})"), expected: universal.to_string(), got: scaled.to_string() });
            }
            Some(RingElem::monomial(mono, sign).to_string())
        }
        None => {
            if closed != universal {
                mismatches.push(Mismatch { location: format!("({n},{m})"), expected: universal.to_string(), got: closed.to_string() });
            }
            None
        }
    };
    Ok(OracleReport::new("rt", mismatches, unit))
}

/// Ř₁Ř₂Ř₁ = Ř₂Ř₁Ř₂ on every basis vector of the triple tensor power.
pub fn yang_baxter_report(n: i64, m: i64) -> Result<OracleReport, OracleError> {
    let spec = FiniteModuleSpec::new(n, m);
    let basis = spec.basis();
    let mut table = BraidingTable::new(spec, RRoute::ClosedForm);
    let mut mismatches = Vec::new();
    for a in &basis {
        for b in &basis {
            for c in &basis {
                let v: TensorVector = HashMap::from([(vec![*a, *b, *c], RingElem::one())]);
                let left = apply_word(&mut table, &[1, 2, 1], v.clone())?;
                let right = apply_word(&mut table, &[2, 1, 2], v)?;
                if left != right {
                    let diff: BTreeMap<String, String> = left
                        .keys()
                        .chain(right.keys())
                        .filter(|k| left.get(*k) != right.get(*k))
                        .map(|k| {
                            let show = |v: Option<&RingElem>| v.map(|e| e.to_string()).unwrap_or_else(|| "0".into());
                            (format!("{}⊗{}⊗{}", k[0], k[1], k[2]), format!("{} vs {}", show(left.get(k)), show(right.get(k))))
                        })
                        .collect();
                    mismatches.push(Mismatch {
                        location: format!("{a}⊗{b}⊗{c}"),
                        expected: "R1 R2 R1 = R2 R1 R2".into(),
                        got: format!("{diff:?}"),
                    });
                }
            }
        }
    }
    Ok(OracleReport::new("yang-baxter", mismatches, None))
}

pub fn yang_baxter(n: i64, m: i64) -> Result<bool, OracleError> {
    Ok(yang_baxter_report(n, m)?.passed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::parse_braid;

    fn poly(pairs: &[(i64, i64)]) -> AlexanderPoly {
        AlexanderPoly { coeffs: pairs.iter().map(|&(k, c)| (k, Coeff::from(c))).collect() }
    }

    #[test]
    fn alexander_torus_knots() {
        assert_eq!(alexander(&parse_braid("1", 2).unwrap()).unwrap(), poly(&[(0, 1)]));
        assert_eq!(alexander(&parse_braid("1 1 1", 2).unwrap()).unwrap(), poly(&[(-1, 1), (0, -1), (1, 1)]));
        assert_eq!(
            alexander(&parse_braid("1^5", 2).unwrap()).unwrap(),
            poly(&[(-2, 1), (-1, -1), (0, 1), (1, -1), (2, 1)])
        );
    }

    #[test]
    fn alexander_three_strands() {
        // σ1σ2 closes to the unknot; (σ1σ2)^4 is T(3,4) with Δ = t^3 - t^2 + 1 - t^-2 + t^-3.
        assert_eq!(alexander(&parse_braid("1 2", 3).unwrap()).unwrap(), poly(&[(0, 1)]));
        assert_eq!(
            alexander(&parse_braid("1 2 1 2 1 2 1 2", 3).unwrap()).unwrap(),
            poly(&[(-3, 1), (-2, -1), (0, 1), (2, -1), (3, 1)])
        );
        assert_eq!(alexander(&parse_braid("1 1 1 2", 3).unwrap()).unwrap(), poly(&[(-1, 1), (0, -1), (1, 1)]));
    }

    #[test]
    fn alexander_value_at_one() {
        for (w, s) in [("1 1 1", 2), ("1^7", 2), ("1 2 1 2", 3), ("1 2 3", 4)] {
            assert!(alexander(&parse_braid(w, s).unwrap()).unwrap().at_one().is_one(), "{w}");
        }
    }

    #[test]
    fn product_series_of_trivial_delta() {
        let (lead, t) = alexander_product_series(&poly(&[(0, 1)]), 2, 2).unwrap();
        assert_eq!(lead, (0, 0));
        assert!(t[0][0].is_one());
        assert!(t.iter().flatten().skip(1).all(|c| c.is_zero()));
    }

    #[test]
    fn trefoil_product_series_corner() {
        let d = alexander(&parse_braid("1 1 1", 2).unwrap()).unwrap();
        let (lead, t) = alexander_product_series(&d, 3, 3).unwrap();
        assert_eq!(lead, (-2, -2));
        assert_eq!(t[0][3], Coeff::from(-1));
        assert_eq!(t[0][1], Coeff::ONE);
    }

    #[test]
    fn unknot_rt_is_one() {
        let u = parse_braid("1", 2).unwrap();
        for (n, m) in [(1, 0), (0, 1), (1, 1)] {
            let closed = rt_invariant(&u, n, m).unwrap();
            let r = rt_two_route(&u, n, m).unwrap();
            assert!(r.passed, "{r:?}");
            // One crossing contributes its framing; nothing else survives.
            assert_eq!(closed.len(), 1, "{closed}");
        }
    }

    #[test]
    fn cap_is_enforced() {
        let b = parse_braid("1 2 1 2", 3).unwrap();
        assert!(matches!(
            rt_invariant_route(&b, FiniteModuleSpec::new(1, 1), RRoute::ClosedForm, 10),
            Err(OracleError::CapExceeded(81, 10))
        ));
    }
}
