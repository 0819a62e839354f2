use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use super::Coeff;

use super::ring::{Mono, QExponent, RingElem};
use super::QSeriesError;

fn q(e: QExponent) -> RingElem {
    RingElem::q_pow(e)
}

/// Quantum integer [n] = (q^{n/2} - q^{-n/2})/(q^{1/2} - q^{-1/2}).
pub fn qint(n: i64) -> RingElem {
    let terms = (0..n.abs()).map(|i| (Mono::q(QExponent::halves(n.abs() - 1 - 2 * i)), Coeff::ONE));
    let pos = RingElem::from_terms(terms);
    if n < 0 {
        -pos
    } else {
        pos
    }
}

/// The pair representing [k]_{x,q} = num/den.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QintX {
    pub num: RingElem,
    pub den: RingElem,
}

/// s = q^{1/2} - q^{-1/2}, the denominator of every quantum integer.
pub fn s_factor() -> RingElem {
    &q(QExponent::halves(1)) - &q(QExponent::halves(-1))
}

pub fn qint_x(k: i64) -> QintX {
    QintX { num: s_qint_var(k, Var::X), den: s_factor() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

/// s·[k]_{v,q} = v^{1/2} q^{-k/2} - v^{-1/2} q^{k/2} for v = x or y.
pub fn s_qint_var(k: i64, v: Var) -> RingElem {
    let vm = |e: i64| match v {
        Var::X => Mono::new(QExponent::halves(-k * e), QExponent::halves(e), QExponent::ZERO),
        Var::Y => Mono::new(QExponent::halves(-k * e), QExponent::ZERO, QExponent::halves(e)),
    };
    &RingElem::mono(vm(1)) - &RingElem::mono(vm(-1))
}

/// (a; q)_n = prod_{i<n} (1 - a q^i) for a monomial `a`.
pub fn pochhammer(a: Mono, n: u32) -> RingElem {
    pochhammer_step(a, n, 1)
}

/// (a; q^{-1})_n = prod_{i<n} (1 - a q^{-i}).
pub fn pochhammer_qinv(a: Mono, n: u32) -> RingElem {
    pochhammer_step(a, n, -1)
}

fn pochhammer_step(a: Mono, n: u32, step: i64) -> RingElem {
    let mut acc = RingElem::one();
    for i in 0..n as i64 {
        let f = &RingElem::one() - &RingElem::mono(a.mul(Mono::q(QExponent::int(step * i))));
        acc = &acc * &f;
    }
    acc
}

type Cache = RwLock<HashMap<(u32, u32), RingElem>>;

fn binom_cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// Gaussian binomial (q)_n/((q)_k (q)_{n-k}) by the Pascal recurrence
/// [n,k] = [n-1,k-1] + q^k [n-1,k].
pub fn qbinom(n: i64, k: i64) -> Result<RingElem, QSeriesError> {
    if n < 0 || k < 0 || k > n {
        return Err(QSeriesError::Domain(format!("qbinom({n}, {k})")));
    }
    Ok(qbinom_nat(n as u32, k as u32))
}

fn qbinom_nat(n: u32, k: u32) -> RingElem {
    if k == 0 || k == n {
        return RingElem::one();
    }
    if let Some(v) = binom_cache().read().expect("binomial cache poisoned").get(&(n, k)) {
        return v.clone();
    }
    let v = &qbinom_nat(n - 1, k - 1) + &qbinom_nat(n - 1, k).scale_mono(Mono::q(QExponent::int(k as i64)));
    binom_cache().write().expect("binomial cache poisoned").insert((n, k), v.clone());
    v
}

/// Gaussian multinomial (q)_n/((q)_{k1}(q)_{k2}(q)_{k3}).
pub fn qmultinom(n: i64, k1: i64, k2: i64, k3: i64) -> Result<RingElem, QSeriesError> {
    if k1 < 0 || k2 < 0 || k3 < 0 || k1 + k2 + k3 != n {
        return Err(QSeriesError::Domain(format!("qmultinom({n}; {k1}, {k2}, {k3})")));
    }
    Ok(&qbinom(n, k1)? * &qbinom(n - k1, k2)?)
}

/// Balanced binomial [n]!/([k]![n-k]!) = q^{-k(n-k)/2} qbinom(n,k); zero when k > n.
pub fn sym_qbinom(n: i64, k: i64) -> RingElem {
    if k < 0 || n < 0 || k > n {
        return RingElem::zero();
    }
    qbinom_nat(n as u32, k as u32).scale_mono(Mono::q(QExponent::halves(-k * (n - k))))
}

/// Balanced multinomial [n]!/([k1]![k2]![k3]!).
pub fn sym_qmultinom(k1: i64, k2: i64, k3: i64) -> RingElem {
    let n = k1 + k2 + k3;
    &sym_qbinom(n, k1) * &sym_qbinom(n - k1, k2)
}

/// prod_{i<j} s·[m-i] = prod (q^{(m-i)/2} - q^{-(m-i)/2}), written through (q^m; q^{-1})_j.
pub fn falling_s(m: i64, j: i64) -> RingElem {
    debug_assert!(j >= 0);
    let shift = -(0..j).map(|i| m - i).sum::<i64>();
    let p = pochhammer_qinv(Mono::q(QExponent::int(m)), j as u32).scale_mono(Mono::q(QExponent::halves(shift)));
    if j % 2 == 1 {
        -p
    } else {
        p
    }
}

/// prod_{i<j} s·[b+i]_{v,q} = v^{j/2} q^{-sum(b+i)/2} (q^b v^{-1}; q)_j.
pub fn rising_var(b: i64, j: i64, v: Var) -> RingElem {
    debug_assert!(j >= 0);
    let shift = -(0..j).map(|i| b + i).sum::<i64>();
    let (a, pre) = match v {
        Var::X => (
            Mono::new(QExponent::int(b), QExponent::int(-1), QExponent::ZERO),
            Mono::new(QExponent::halves(shift), QExponent::halves(j), QExponent::ZERO),
        ),
        Var::Y => (
            Mono::new(QExponent::int(b), QExponent::ZERO, QExponent::int(-1)),
            Mono::new(QExponent::halves(shift), QExponent::ZERO, QExponent::halves(j)),
        ),
    };
    pochhammer(a, j as u32).scale_mono(pre)
}

/// Substitutes x = q^n, y = q^m.
pub fn specialize(e: &RingElem, n: i64, m: i64) -> RingElem {
    e.map_monos(|mo| Mono::q(mo.q + mo.x.scale(n) + mo.y.scale(m)))
}

/// Substitutes q = 1. Every q-exponent must be an integer.
pub fn q1_limit(e: &RingElem) -> Result<RingElem, QSeriesError> {
    if let Some((m, _)) = e.terms().iter().find(|(m, _)| !m.q.is_integer()) {
        return Err(QSeriesError::FractionalQ(m.q));
    }
    Ok(e.map_monos(|mo| Mono::new(QExponent::ZERO, mo.x, mo.y)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qi(n: i64) -> RingElem {
        q(QExponent::int(n))
    }

    fn poly(cs: &[i64]) -> RingElem {
        RingElem::from_terms(cs.iter().enumerate().map(|(i, &c)| (Mono::q(QExponent::int(i as i64)), Coeff::from(c))))
    }

    #[test]
    fn quantum_integers() {
        assert!(qint(0).is_zero());
        assert!(qint(1).is_one());
        assert_eq!(qint(2), &q(QExponent::halves(1)) + &q(QExponent::halves(-1)));
        assert_eq!(qint(-3), -qint(3));
        assert_eq!(&qint(3) * &s_factor(), &q(QExponent::halves(3)) - &q(QExponent::halves(-3)));
    }

    #[test]
    fn qint_x_specializes_to_shifted_integer() {
        let at = |k: i64, n: i64| specialize(&qint_x(k).num, n, 0).div_exact_q(&qint_x(k).den).unwrap();
        assert!(at(3, 3).is_zero());
        assert_eq!(at(0, 3), qint(3));
        assert!(at(1, 2).is_one());
    }

    #[test]
    fn pochhammer_examples() {
        assert!(pochhammer(Mono::q(QExponent::int(1)), 0).is_one());
        assert_eq!(pochhammer(Mono::q(QExponent::int(1)), 2), poly(&[1, -1, -1, 1]));
        let a = Mono::new(QExponent::int(2), QExponent::int(-1), QExponent::ZERO);
        assert_eq!(pochhammer(a, 1), &RingElem::one() - &RingElem::mono(a));
        assert!(pochhammer_qinv(Mono::ONE, 3).is_zero());
        assert_eq!(pochhammer_qinv(Mono::q(QExponent::int(1)), 1), poly(&[1, -1]));
        assert_eq!(pochhammer_qinv(Mono::q(QExponent::int(2)), 2), &poly(&[1, 0, -1]) * &poly(&[1, -1]));
    }

    #[test]
    fn binomials() {
        assert!(qbinom(5, 0).unwrap().is_one());
        assert_eq!(qbinom(2, 1).unwrap(), poly(&[1, 1]));
        assert_eq!(qbinom(4, 2).unwrap(), poly(&[1, 1, 2, 1, 1]));
        assert!(qbinom(2, 3).is_err());
        assert!(qbinom(-1, 0).is_err());
        assert!(qmultinom(4, 4, 0, 0).unwrap().is_one());
        assert_eq!(qmultinom(2, 1, 1, 0).unwrap(), poly(&[1, 1]));
        assert_eq!(qmultinom(3, 1, 1, 1).unwrap(), &poly(&[1, 1]) * &poly(&[1, 1, 1]));
        assert!(qmultinom(3, 1, 1, 0).is_err());
    }

    #[test]
    fn binomial_matches_factorial_quotient() {
        // qbinom(n,k) = q^{k(n-k)/2} [n]!/([k]![n-k]!)
        let fact = |n: i64| (1..=n).fold(RingElem::one(), |a, i| &a * &qint(i));
        for n in 0..8 {
            for k in 0..=n {
                let lhs = (&qbinom(n, k).unwrap() * &fact(k)) * &fact(n - k);
                let rhs = fact(n).scale_mono(Mono::q(QExponent::halves(k * (n - k))));
                assert_eq!(lhs, rhs, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn falling_and_rising_products() {
        let s = s_factor();
        let direct = (0..3).fold(RingElem::one(), |a, i| &(&a * &qint(5 - i)) * &s);
        assert_eq!(falling_s(5, 3), direct);
        assert!(falling_s(2, 3).is_zero());
        let direct = (0..3).fold(RingElem::one(), |a, i| &a * &s_qint_var(2 + i, Var::X));
        assert_eq!(rising_var(2, 3, Var::X), direct);
        let direct = (0..2).fold(RingElem::one(), |a, i| &a * &s_qint_var(1 + i, Var::Y));
        assert_eq!(rising_var(1, 2, Var::Y), direct);
    }

    #[test]
    fn specialization_and_classical_limit() {
        assert_eq!(specialize(&RingElem::x_pow(QExponent::halves(-1)), 2, 0), qi(-1));
        let b1 = 3;
        let f = pochhammer(Mono::new(QExponent::int(b1), QExponent::int(-1), QExponent::ZERO), 1);
        assert!(specialize(&f, b1, 0).is_zero());
        let lead = RingElem::mono(Mono::new(QExponent::ZERO, QExponent::int(-2), QExponent::int(-2)));
        assert_eq!(specialize(&lead, 1, 1), qi(-4));
        let e = &RingElem::one() + &RingElem::mono(Mono::new(QExponent::int(-1), QExponent::ZERO, QExponent::int(-1)));
        assert_eq!(q1_limit(&e).unwrap(), &RingElem::one() + &RingElem::y_pow(QExponent::int(-1)));
        assert!(q1_limit(&poly(&[1, -1])).unwrap().is_zero());
        assert_eq!(q1_limit(&poly(&[1, -1, -1])).unwrap(), RingElem::from_int(-1));
        assert!(q1_limit(&q(QExponent::halves(1))).is_err());
    }
}
