//! Conversions between the raw reduced trace and the normalizations used to
//! compare with other computations: shifted, unreduced (negative and positive
//! expansions), Weyl-balanced, and the one-variable symmetric series.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::qseries::{Coeff, Mono, QExponent, RingElem};
use crate::trace::TraceSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConventionTag {
    Raw,
    Negative,
    Positive,
    Balanced,
    Symmetric,
}

impl FromStr for ConventionTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "raw" => Ok(ConventionTag::Raw),
            "negative" => Ok(ConventionTag::Negative),
            "positive" => Ok(ConventionTag::Positive),
            "balanced" => Ok(ConventionTag::Balanced),
            "symmetric" => Ok(ConventionTag::Symmetric),
            _ => Err(format!("unknown convention {s:?}")),
        }
    }
}

impl fmt::Display for ConventionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConventionTag::Raw => "raw",
            ConventionTag::Negative => "negative",
            ConventionTag::Positive => "positive",
            ConventionTag::Balanced => "balanced",
            ConventionTag::Symmetric => "symmetric",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ConventionError {
    #[error("window too shallow to certify q^{requested}: {}", describe_boundary(*boundary))]
    Incomplete { requested: i64, boundary: Option<i64> },
    #[error("the symmetric limit needs a trace computed at y = 1")]
    NotYSpecialized,
    #[error("constant term {0} is not a unit monomial")]
    NonUnitConstant(String),
    #[error("orbit sum at q^{q} x^{a} y^{b} is odd; the input is not symmetric in x and y")]
    OddCoefficient { q: i64, a: i64, b: i64 },
    #[error("series has non-integer q-exponent in {0}")]
    FractionalQ(String),
}

fn describe_boundary(b: Option<i64>) -> String {
    match b {
        Some(b) => format!("the outer layer already reaches q^{b}"),
        None => "the outer layer of the window is empty".to_string(),
    }
}

/// Direction of the substitution x ↦ q^{∓1} x, y ↦ q^{∓1} y.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Shift {
    /// x ↦ q^{-1} x, so x^{-1} ↦ q x^{-1}.
    #[default]
    Down,
    /// x ↦ q x.
    Up,
}

/// x ↦ q^{∓1}x and y ↦ q^{∓1}y on every coefficient.
pub fn shift_vars(s: &TraceSeries, dir: Shift) -> TraceSeries {
    let sign = match dir {
        Shift::Down => -1,
        Shift::Up => 1,
    };
    let (ex, ey) = s.leading_offset;
    let mut out = s.clone();
    out.coefficients = s
        .coefficients
        .iter()
        .map(|(&(i, j), c)| {
            let deg = (ex - i as i64) + (ey - j as i64);
            ((i, j), c.scale_mono(Mono::q(QExponent::int(sign * deg))))
        })
        .collect();
    out
}

/// -(x^{1/2}-x^{-1/2})(y^{1/2}-y^{-1/2})((xy)^{-1/2}-(xy)^{1/2}) expanded.
pub fn unreduce_factor() -> RingElem {
    let h = |x: i64, y: i64| RingElem::mono(Mono::new(QExponent::ZERO, QExponent::halves(x), QExponent::halves(y)));
    let fx = &h(1, 0) - &h(-1, 0);
    let fy = &h(0, 1) - &h(0, -1);
    let fz = &h(-1, -1) - &h(1, 1);
    -(&(&fx * &fy) * &fz)
}

/// Multiplies by the unreduced normalization; indices stay relative to the new leading monomial.
pub fn unreduce(s: &TraceSeries) -> TraceSeries {
    let (ex, ey) = s.leading_offset;
    let f = unreduce_factor();
    let mut acc: BTreeMap<(u32, u32), Vec<RingElem>> = BTreeMap::new();
    for (&(i, j), c) in &s.coefficients {
        for (m, k) in f.terms() {
            // The factor's exponents lie in {-1, 0, 1}; shift them to {2, 1, 0} below the new top.
            let di = (1 - m.x.to_integer().expect("integer x-exponent")) as u32;
            let dj = (1 - m.y.to_integer().expect("integer y-exponent")) as u32;
            let (ni, nj) = (i + di, j + dj);
            if ni <= s.truncation.0 && nj <= s.truncation.1 {
                acc.entry((ni, nj)).or_default().push(c.scale_int(k));
            }
        }
    }
    let mut out = s.clone();
    out.coefficients =
        acc.into_iter().map(|(k, v)| (k, RingElem::sum(v.iter()))).filter(|(_, c)| !c.is_zero()).collect();
    out.leading_offset = (ex + 1, ey + 1);
    out
}

/// The negative expansion F^{neg} = unreduce(shift(raw)).
pub fn negative(s: &TraceSeries, dir: Shift) -> TraceSeries {
    unreduce(&shift_vars(s, dir))
}

/// F^{pos}(x, y) = F^{neg}(1/x, 1/y), as a series in x and y.
pub fn positive(s: &TraceSeries, dir: Shift) -> RingElem {
    negative(s, dir).to_elem().map_monos(|m| Mono::new(m.q, -m.x, -m.y))
}

/// x^a y^b (xy)^{-c}: exponents on the coordinates (x, y, z = (xy)^{-1}).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeylMonomial {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl WeylMonomial {
    /// Uses xyz = 1 to move to c = 0.
    pub fn canonical(self) -> WeylMonomial {
        WeylMonomial { a: self.a - self.c, b: self.b - self.c, c: 0 }
    }

    /// Substitutes (x, y, z) ↦ (v[p[0]], v[p[1]], v[p[2]]).
    pub fn permute(self, p: [usize; 3]) -> WeylMonomial {
        let e = [self.a, self.b, self.c];
        let mut out = [0i64; 3];
        for (k, &target) in p.iter().enumerate() {
            out[target] += e[k];
        }
        WeylMonomial { a: out[0], b: out[1], c: out[2] }.canonical()
    }

    pub fn invert(self) -> WeylMonomial {
        WeylMonomial { a: -self.a, b: -self.b, c: -self.c }.canonical()
    }
}

pub const S3: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];

/// A finite sum Σ c · q^k · x^a y^b in canonical Weyl form.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WeylSeries {
    pub terms: BTreeMap<(i64, WeylMonomial), Coeff>,
    /// Every q-power ≤ this bound is complete.
    pub max_q: i64,
}

impl WeylSeries {
    fn add(&mut self, q: i64, m: WeylMonomial, c: Coeff) {
        let e = self.terms.entry((q, m)).or_default();
        *e = &*e + &c;
        if e.is_zero() {
            self.terms.remove(&(q, m));
        }
    }

    pub fn at_q(&self, q: i64) -> BTreeMap<WeylMonomial, Coeff> {
        self.terms.iter().filter(|((k, _), _)| *k == q).map(|((_, m), c)| (*m, c.clone())).collect()
    }

    pub fn permuted(&self, p: [usize; 3]) -> WeylSeries {
        let mut out = WeylSeries { max_q: self.max_q, ..Default::default() };
        for ((q, m), c) in &self.terms {
            out.add(*q, m.permute(p), c.clone());
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|((q, m), c)| json!({"q": q, "x": m.a, "y": m.b, "coeff": c.to_string()}))
            .collect();
        json!({"convention": "balanced", "max_q": self.max_q, "terms": terms})
    }

    pub fn to_elem(&self) -> RingElem {
        RingElem::from_terms(
            self.terms
                .iter()
                .map(|((q, m), c)| (Mono::new(QExponent::int(*q), QExponent::int(m.a), QExponent::int(m.b)), c.clone())),
        )
    }
}

impl fmt::Display for WeylSeries {
    /// One line per q-power: `q^k: c x^a y^b + ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut rows: BTreeMap<i64, Vec<String>> = BTreeMap::new();
        for ((q, m), c) in &self.terms {
            rows.entry(*q).or_default().push(format!("{c} x^{} y^{}", m.a, m.b));
        }
        let lines: Vec<String> = rows.into_iter().map(|(q, t)| format!("q^{q}: {}", t.join(" + "))).collect();
        write!(f, "{}", lines.join("\n"))
    }
}

fn q_degrees(c: &RingElem) -> Result<Vec<(i64, Coeff)>, ConventionError> {
    c.terms()
        .iter()
        .map(|(m, k)| m.q.to_integer().map(|q| (q, k.clone())).ok_or_else(|| ConventionError::FractionalQ(c.to_string())))
        .collect()
}

/// Lowest q-power among the coefficients on the outer edge of the window.
/// Terms beyond the window are assumed to start no lower than this.
pub fn boundary_q_degree(s: &TraceSeries) -> Option<i64> {
    let (dx, dy) = s.truncation;
    s.coefficients
        .iter()
        .filter(|((i, j), _)| *i == dx || *j == dy)
        .filter_map(|(_, c)| c.min_by_key(|m| m.q))
        .min()
        .map(|e| e.to_integer().unwrap_or(i64::MIN))
}

/// ½(−Σ_{s∈S3} F^{neg}∘π∘s + Σ_{s∈S3} F^{pos}∘π∘s) through q^{max_q}.
pub fn weyl_balanced(s_neg: &TraceSeries, max_q: i64) -> Result<WeylSeries, ConventionError> {
    let boundary = boundary_q_degree(s_neg);
    if boundary.is_none_or(|b| b <= max_q) {
        return Err(ConventionError::Incomplete { requested: max_q, boundary });
    }
    let (ex, ey) = s_neg.leading_offset;
    let mut twice = WeylSeries { max_q, ..Default::default() };
    for (&(i, j), c) in &s_neg.coefficients {
        let m = WeylMonomial { a: ex - i as i64, b: ey - j as i64, c: 0 };
        for (q, k) in q_degrees(c)? {
            if q > max_q {
                continue;
            }
            for p in S3 {
                twice.add(q, m.permute(p), -&k);
                twice.add(q, m.invert().permute(p), k.clone());
            }
        }
    }
    let mut out = WeylSeries { max_q, ..Default::default() };
    for ((q, m), c) in twice.terms {
        let (h, r) = c.div_rem(&Coeff::from(2));
        if !r.is_zero() {
            return Err(ConventionError::OddCoefficient { q, a: m.a, b: m.b });
        }
        out.add(q, m, h);
    }
    Ok(out)
}

/// The one-variable series Σ a_i(q) (qx)^i with a_0 = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricSeries {
    pub coefficients: Vec<RingElem>,
}

impl fmt::Display for SymmetricSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})(qx)"),
                _ => format!("({c})(qx)^{i}"),
            })
            .collect();
        write!(f, "{} + …", parts.join(" + "))
    }
}

impl SymmetricSeries {
    pub fn to_json(&self) -> Value {
        json!({
            "convention": "symmetric",
            "coefficients": self.coefficients.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Set y = 1, substitute x^{-1} ↦ q^3 x and normalize the constant term to 1.
pub fn symmetric_limit(s: &TraceSeries) -> Result<SymmetricSeries, ConventionError> {
    if !s.y_specialized {
        return Err(ConventionError::NotYSpecialized);
    }
    let c0 = s.coeff(0, 0);
    let Some((m0, k0)) = c0.as_monomial() else {
        return Err(ConventionError::NonUnitConstant(c0.to_string()));
    };
    if !(k0.is_one() || (-k0).is_one()) {
        return Err(ConventionError::NonUnitConstant(c0.to_string()));
    }
    let norm = RingElem::monomial(m0.inv(), k0.clone());
    let n = s.truncation.0;
    // x^{-i} ↦ q^{3i} x^i = q^{2i} (qx)^i.
    let coefficients =
        (0..=n).map(|i| (&s.coeff(i, 0) * &norm).scale_mono(Mono::q(QExponent::int(2 * i as i64)))).collect();
    Ok(SymmetricSeries { coefficients })
}
