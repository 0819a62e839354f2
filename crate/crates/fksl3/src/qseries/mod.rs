//! Exact sparse Laurent arithmetic in fractional powers of q, x, y and the
//! q-combinatorics used by the R-matrix.

mod coeff;
mod combinat;
mod ring;

pub use combinat::{
    falling_s, pochhammer, pochhammer_qinv, q1_limit, qbinom, qint, qint_x, qmultinom, rising_var, s_factor,
    s_qint_var, specialize, sym_qbinom, sym_qmultinom, QintX, Var,
};
pub use coeff::Coeff;
pub use ring::{Mono, QExponent, RingElem, EXP_DEN};

use serde_json::{json, Value};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum QSeriesError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("fractional q-exponent {0} where an integer was required")]
    FractionalQ(QExponent),
    #[error("malformed serialized element: {0}")]
    Parse(String),
}

/// q^{(w/3)(log_q x log_q y + log_q^2 x + log_q^2 y)}, kept symbolic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct FramingFactor {
    pub crossing_count: i64,
}

impl FramingFactor {
    pub fn new(crossing_count: i64) -> Self {
        FramingFactor { crossing_count }
    }

    /// Value at x = q^n, y = q^m.
    pub fn specialize(&self, n: i64, m: i64) -> RingElem {
        let e = QExponent::new(self.crossing_count * (n * m + n * n + m * m), 3).expect("thirds are representable");
        RingElem::q_pow(e)
    }

    pub fn combine(&self, o: &FramingFactor) -> FramingFactor {
        FramingFactor::new(self.crossing_count + o.crossing_count)
    }
}

fn exp_json(e: QExponent) -> Value {
    let (n, d) = e.num_den();
    json!([n, d])
}

fn exp_from_json(v: &Value) -> Result<QExponent, QSeriesError> {
    let bad = || QSeriesError::Parse(v.to_string());
    let a = v.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
    let (n, d) = (a[0].as_i64().ok_or_else(bad)?, a[1].as_i64().ok_or_else(bad)?);
    QExponent::new(n, d).ok_or_else(bad)
}

impl RingElem {
    /// Canonical list of `{eq, ex, ey, coeff}` records.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms()
                .iter()
                .map(|(m, c)| json!({"eq": exp_json(m.q), "ex": exp_json(m.x), "ey": exp_json(m.y), "coeff": c.to_string()}))
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<RingElem, QSeriesError> {
        let bad = || QSeriesError::Parse(v.to_string());
        let mut terms = Vec::new();
        for t in v.as_array().ok_or_else(bad)? {
            let m = Mono::new(exp_from_json(&t["eq"])?, exp_from_json(&t["ex"])?, exp_from_json(&t["ey"])?);
            let c: Coeff = t["coeff"].as_str().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            terms.push((m, c));
        }
        Ok(RingElem::from_terms(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_elem() -> impl Strategy<Value = RingElem> {
        prop::collection::vec(((-8i64..8, -4i64..4, -4i64..4), -5i64..5), 0..6).prop_map(|v| {
            RingElem::from_terms(v.into_iter().map(|((a, b, c), k)| (Mono::quarters(a, b * 2, c * 2), Coeff::from(k))))
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_elem(), b in arb_elem(), c in arb_elem()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn specialize_is_multiplicative(a in arb_elem(), b in arb_elem(), n in 0i64..4, m in 0i64..4) {
            prop_assert_eq!(specialize(&(&a * &b), n, m), &specialize(&a, n, m) * &specialize(&b, n, m));
        }

        #[test]
        fn json_round_trip(a in arb_elem()) {
            prop_assert_eq!(RingElem::from_json(&a.to_json()).unwrap(), a);
        }
    }

    #[test]
    fn binomial_symmetry() {
        for n in 0..=12 {
            for k in 0..=n {
                assert_eq!(qbinom(n, k).unwrap(), qbinom(n, n - k).unwrap());
            }
        }
    }

    #[test]
    fn pochhammer_two_routes() {
        // (q;q)_n against the product of (1 - q^i) built term by term.
        for n in 0..=10u32 {
            let direct = (1..=n as i64).fold(RingElem::one(), |acc, i| {
                &acc * &(&RingElem::one() - &RingElem::q_pow(QExponent::int(i)))
            });
            assert_eq!(pochhammer(Mono::q(QExponent::int(1)), n), direct);
        }
    }

    #[test]
    fn qint_x_matches_shifted_qint() {
        for n in 0..=8 {
            for k in 0..=n {
                let v = specialize(&qint_x(k).num, n, 0).div_exact_q(&qint_x(k).den).unwrap();
                assert_eq!(v, qint(n - k));
            }
        }
    }

    #[test]
    fn framing_specialization() {
        let f = FramingFactor::new(1);
        assert_eq!(f.specialize(1, 0), RingElem::q_pow(QExponent::new(1, 3).unwrap()));
        assert_eq!(FramingFactor::new(3).specialize(1, 1), RingElem::q_pow(QExponent::int(3)));
    }

    #[test]
    fn json_is_canonical() {
        let e = &RingElem::q_pow(QExponent::quarters(1)) + &RingElem::from_int(-12);
        let v = e.to_json();
        assert_eq!(v[0]["eq"], json!([0, 1]));
        assert_eq!(v[0]["coeff"], json!("-12"));
        assert_eq!(v[1]["eq"], json!([1, 4]));
    }
}
