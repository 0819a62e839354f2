use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;

use super::coeff::Coeff;

/// Exponents are stored in units of 1/12: this covers the quarter powers of
/// the R-matrix pipeline and the thirds that appear once the framing factor
/// is specialized.
pub const EXP_DEN: i64 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct QExponent(i64);

impl QExponent {
    pub const ZERO: QExponent = QExponent(0);

    /// Exact rational `num/den`; `None` when the value is not a multiple of 1/12.
    pub fn new(num: i64, den: i64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let g = num.gcd(&den);
        let (n, d) = (num / g, den / g);
        let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
        if EXP_DEN % d != 0 {
            return None;
        }
        Some(QExponent(n * (EXP_DEN / d)))
    }

    pub const fn int(n: i64) -> Self {
        QExponent(n * EXP_DEN)
    }

    pub const fn quarters(n: i64) -> Self {
        QExponent(n * (EXP_DEN / 4))
    }

    pub const fn halves(n: i64) -> Self {
        QExponent(n * (EXP_DEN / 2))
    }

    pub const fn from_units(u: i64) -> Self {
        QExponent(u)
    }

    pub const fn units(self) -> i64 {
        self.0
    }

    /// Reduced `(numerator, denominator)` with positive denominator.
    pub fn num_den(self) -> (i64, i64) {
        let g = self.0.gcd(&EXP_DEN).max(1);
        (self.0 / g, EXP_DEN / g)
    }

    pub fn is_integer(self) -> bool {
        self.0 % EXP_DEN == 0
    }

    pub fn to_integer(self) -> Option<i64> {
        self.is_integer().then_some(self.0 / EXP_DEN)
    }

    pub fn denominator_divides(self, d: i64) -> bool {
        d % self.num_den().1 == 0
    }

    pub fn scale(self, k: i64) -> Self {
        QExponent(self.0 * k)
    }
}

impl Add for QExponent {
    type Output = QExponent;
    fn add(self, o: QExponent) -> QExponent {
        QExponent(self.0 + o.0)
    }
}

impl Sub for QExponent {
    type Output = QExponent;
    fn sub(self, o: QExponent) -> QExponent {
        QExponent(self.0 - o.0)
    }
}

impl Neg for QExponent {
    type Output = QExponent;
    fn neg(self) -> QExponent {
        QExponent(-self.0)
    }
}

impl fmt::Display for QExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.num_den() {
            (n, 1) => write!(f, "{n}"),
            (n, d) => write!(f, "{n}/{d}"),
        }
    }
}

/// A monomial q^{e_q} x^{e_x} y^{e_y}; ordering is lexicographic on (e_q, e_x, e_y).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Mono {
    pub q: QExponent,
    pub x: QExponent,
    pub y: QExponent,
}

impl Mono {
    pub const ONE: Mono = Mono { q: QExponent::ZERO, x: QExponent::ZERO, y: QExponent::ZERO };

    pub const fn new(q: QExponent, x: QExponent, y: QExponent) -> Self {
        Mono { q, x, y }
    }

    pub const fn q(e: QExponent) -> Self {
        Mono { q: e, x: QExponent::ZERO, y: QExponent::ZERO }
    }

    /// Monomial from exponents given in quarter units.
    pub const fn quarters(q: i64, x: i64, y: i64) -> Self {
        Mono { q: QExponent::quarters(q), x: QExponent::quarters(x), y: QExponent::quarters(y) }
    }

    pub fn mul(self, o: Mono) -> Mono {
        Mono { q: self.q + o.q, x: self.x + o.x, y: self.y + o.y }
    }

    pub fn inv(self) -> Mono {
        Mono { q: -self.q, x: -self.x, y: -self.y }
    }
}

/// Sparse exact Laurent object in fractional powers of q, x, y with big-integer
/// coefficients. Terms are kept sorted by monomial with no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RingElem {
    terms: Vec<(Mono, Coeff)>,
}

impl RingElem {
    pub fn zero() -> Self {
        RingElem { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(Mono::ONE, Coeff::ONE)
    }

    pub fn from_int(c: i64) -> Self {
        Self::monomial(Mono::ONE, Coeff::from(c))
    }

    pub fn monomial(m: Mono, c: Coeff) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            RingElem { terms: vec![(m, c)] }
        }
    }

    pub fn mono(m: Mono) -> Self {
        Self::monomial(m, Coeff::ONE)
    }

    pub fn q_pow(e: QExponent) -> Self {
        Self::mono(Mono::q(e))
    }

    pub fn x_pow(e: QExponent) -> Self {
        Self::mono(Mono::new(QExponent::ZERO, e, QExponent::ZERO))
    }

    pub fn y_pow(e: QExponent) -> Self {
        Self::mono(Mono::new(QExponent::ZERO, QExponent::ZERO, e))
    }

    /// Builds a canonical element from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms<I: IntoIterator<Item = (Mono, Coeff)>>(it: I) -> Self {
        let mut v: Vec<(Mono, Coeff)> = it.into_iter().collect();
        v.sort_by_key(|t| t.0);
        Self::from_sorted(v)
    }

    fn from_sorted(v: Vec<(Mono, Coeff)>) -> Self {
        let mut out: Vec<(Mono, Coeff)> = Vec::with_capacity(v.len());
        for (m, c) in v {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        RingElem { terms: out }
    }

    pub fn terms(&self) -> &[(Mono, Coeff)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == Mono::ONE && self.terms[0].1.is_one()
    }

    /// The single term of a monomial element.
    pub fn as_monomial(&self) -> Option<(Mono, &Coeff)> {
        match self.terms.as_slice() {
            [(m, c)] => Some((*m, c)),
            _ => None,
        }
    }

    pub fn coeff(&self, m: &Mono) -> Coeff {
        self.terms
            .binary_search_by(|(k, _)| k.cmp(m))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| Coeff::ZERO)
    }

    pub fn scale_mono(&self, m: Mono) -> RingElem {
        // Shifting every monomial by a constant keeps the lexicographic order.
        RingElem { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    pub fn scale_int(&self, k: &Coeff) -> RingElem {
        if k.is_zero() {
            return Self::zero();
        }
        RingElem { terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect() }
    }

    /// Product keeping only terms with x-exponent >= `min_x` and y-exponent >= `min_y`.
    pub fn mul_truncated(&self, o: &RingElem, min_x: Option<QExponent>, min_y: Option<QExponent>) -> RingElem {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let keep = |m: &Mono| min_x.is_none_or(|b| m.x >= b) && min_y.is_none_or(|b| m.y >= b);
        if let Some((m, c)) = o.as_monomial() {
            return self.scale_mono(m).scale_int(c).filtered(keep);
        }
        if let Some((m, c)) = self.as_monomial() {
            return o.scale_mono(m).scale_int(c).filtered(keep);
        }
        let mut v = Vec::with_capacity(self.len() * o.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let m = ma.mul(*mb);
                if keep(&m) {
                    v.push((m, ca * cb));
                }
            }
        }
        Self::from_terms(v)
    }

    pub fn filtered(&self, keep: impl Fn(&Mono) -> bool) -> RingElem {
        RingElem { terms: self.terms.iter().filter(|(m, _)| keep(m)).cloned().collect() }
    }

    pub fn truncate(&self, min_x: Option<QExponent>, min_y: Option<QExponent>) -> RingElem {
        self.filtered(|m| min_x.is_none_or(|b| m.x >= b) && min_y.is_none_or(|b| m.y >= b))
    }

    pub fn pow(&self, n: u32) -> RingElem {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Applies `f` to every monomial; colliding images are summed.
    pub fn map_monos(&self, f: impl Fn(Mono) -> Mono) -> RingElem {
        Self::from_terms(self.terms.iter().map(|(m, c)| (f(*m), c.clone())))
    }

    pub fn max_by_key<K: Ord>(&self, f: impl Fn(&Mono) -> K) -> Option<K> {
        self.terms.iter().map(|(m, _)| f(m)).max()
    }

    pub fn min_by_key<K: Ord>(&self, f: impl Fn(&Mono) -> K) -> Option<K> {
        self.terms.iter().map(|(m, _)| f(m)).min()
    }

    pub fn is_q_only(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.x == QExponent::ZERO && m.y == QExponent::ZERO)
    }

    /// Exact division by an element that involves only q. Returns `None` when the
    /// quotient is not a Laurent object in the same ring.
    pub fn div_exact_q(&self, d: &RingElem) -> Option<RingElem> {
        if d.is_zero() || !d.is_q_only() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let dterms: Vec<(i64, Coeff)> = d.terms.iter().map(|(m, c)| (m.q.units(), c.clone())).collect();
        let (dlead, dlc) = dterms.last().cloned().expect("nonzero divisor");
        let mut slices: std::collections::BTreeMap<(QExponent, QExponent), Vec<(i64, Coeff)>> = Default::default();
        for (m, c) in &self.terms {
            slices.entry((m.x, m.y)).or_default().push((m.q.units(), c.clone()));
        }
        let dmin = dterms[0].0;
        let mut out = Vec::new();
        for ((ex, ey), terms) in slices {
            let mut rem: std::collections::BTreeMap<i64, Coeff> = terms.into_iter().collect();
            let lo = *rem.keys().next().expect("slices are nonempty");
            while let Some((&top, tc)) = rem.iter().next_back() {
                let (qc, r) = tc.div_rem(&dlc);
                if !r.is_zero() {
                    return None;
                }
                let shift = top - dlead;
                // The quotient must not reach below the dividend's lowest degree.
                if shift + dmin < lo {
                    return None;
                }
                for (e, c) in &dterms {
                    let k = e + shift;
                    let nv = rem.get(&k).cloned().unwrap_or_default() - c * &qc;
                    if nv.is_zero() {
                        rem.remove(&k);
                    } else {
                        rem.insert(k, nv);
                    }
                }
                out.push((Mono::new(QExponent::from_units(shift), ex, ey), qc));
            }
        }
        Some(Self::from_terms(out))
    }

    /// Exact division by a univariate element in x alone (used for Alexander polynomials).
    pub fn div_exact_x(&self, d: &RingElem) -> Option<RingElem> {
        let swap = |m: Mono| Mono::new(m.x, m.q, m.y);
        self.map_monos(swap).div_exact_q(&d.map_monos(swap)).map(|r| r.map_monos(swap))
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a RingElem>>(it: I) -> RingElem {
        let mut v = Vec::new();
        for e in it {
            v.extend(e.terms.iter().cloned());
        }
        Self::from_terms(v)
    }

    pub fn to_i64_coeffs(&self) -> Option<Vec<(Mono, i64)>> {
        self.terms.iter().map(|(m, c)| c.to_i64().map(|c| (*m, c))).collect()
    }
}

fn merge(a: &[(Mono, Coeff)], b: &[(Mono, Coeff)], negate_b: bool) -> RingElem {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ord = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match ord {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                let c = if negate_b { -&b[j].1 } else { b[j].1.clone() };
                out.push((b[j].0, c));
                j += 1;
            }
            Ordering::Equal => {
                let c = if negate_b { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                if !c.is_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    RingElem { terms: out }
}

impl Add for &RingElem {
    type Output = RingElem;
    fn add(self, o: &RingElem) -> RingElem {
        merge(&self.terms, &o.terms, false)
    }
}

impl Sub for &RingElem {
    type Output = RingElem;
    fn sub(self, o: &RingElem) -> RingElem {
        merge(&self.terms, &o.terms, true)
    }
}

impl Mul for &RingElem {
    type Output = RingElem;
    fn mul(self, o: &RingElem) -> RingElem {
        self.mul_truncated(o, None, None)
    }
}

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for RingElem {
            type Output = RingElem;
            fn $f(self, o: RingElem) -> RingElem {
                (&self).$f(&o)
            }
        }
        impl $tr<&RingElem> for RingElem {
            type Output = RingElem;
            fn $f(self, o: &RingElem) -> RingElem {
                (&self).$f(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        -&self
    }
}

impl std::ops::AddAssign<&RingElem> for RingElem {
    fn add_assign(&mut self, o: &RingElem) {
        *self = &*self + o;
    }
}

impl std::iter::Sum for RingElem {
    fn sum<I: Iterator<Item = RingElem>>(it: I) -> RingElem {
        let v: Vec<RingElem> = it.collect();
        RingElem::sum(v.iter())
    }
}

fn fmt_var(f: &mut fmt::Formatter<'_>, name: &str, e: QExponent) -> fmt::Result {
    match e.num_den() {
        (0, _) => Ok(()),
        (1, 1) => write!(f, "{name}"),
        (n, 1) => write!(f, "{name}^{n}"),
        (n, d) => write!(f, "{name}^({n}/{d})"),
    }
}

impl fmt::Display for RingElem {
    /// Human-readable form, e.g. `q^(1/2) + q^(-1/2)` or `-q^2*x^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let a = c.abs();
            let bare = *m == Mono::ONE;
            if !a.is_one() || bare {
                write!(f, "{a}")?;
                if !bare {
                    write!(f, "*")?;
                }
            }
            let mut first = true;
            for (name, e) in [("q", m.q), ("x", m.x), ("y", m.y)] {
                if e != QExponent::ZERO {
                    if !first {
                        write!(f, "*")?;
                    }
                    fmt_var(f, name, e)?;
                    first = false;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> RingElem {
        RingElem::q_pow(QExponent::int(n))
    }

    #[test]
    fn exponent_reduction_and_bounds() {
        assert_eq!(QExponent::new(2, 4), Some(QExponent::halves(1)));
        assert_eq!(QExponent::new(1, 3).unwrap().num_den(), (1, 3));
        assert_eq!(QExponent::new(-3, -6).unwrap().num_den(), (1, 2));
        assert!(QExponent::new(1, 5).is_none());
        assert!(QExponent::quarters(3).denominator_divides(4));
        assert!(!QExponent::new(1, 3).unwrap().denominator_divides(4));
    }

    #[test]
    fn cancellation_is_canonical() {
        let a = &q(1) + &q(2);
        let b = &a - &q(1);
        assert_eq!(b, q(2));
        assert!((&b - &b).is_zero());
        let c = RingElem::from_terms(vec![(Mono::ONE, Coeff::from(3)), (Mono::ONE, Coeff::from(-3))]);
        assert!(c.is_zero());
    }

    #[test]
    fn exact_division_by_q_polynomial() {
        let one_plus_q = &RingElem::one() + &q(1);
        let prod = &one_plus_q * &(&q(-2) - &RingElem::x_pow(QExponent::halves(-1)));
        assert_eq!(prod.div_exact_q(&one_plus_q).unwrap(), &q(-2) - &RingElem::x_pow(QExponent::halves(-1)));
        assert!(q(1).div_exact_q(&one_plus_q).is_none());
    }

    #[test]
    fn display_is_readable() {
        let e = &RingElem::q_pow(QExponent::halves(1)) + &RingElem::q_pow(QExponent::halves(-1));
        assert_eq!(e.to_string(), "q^(-1/2) + q^(1/2)");
        assert_eq!((-&q(2)).to_string(), "-q^2");
    }
}
