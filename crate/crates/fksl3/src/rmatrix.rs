//! The large-color R-matrix on V_x^1 ⊗ V_y^2 in closed form.
//!
//! A crossing sends |a, b⟩ to a sum of |b', a'⟩. Each summand is labelled by
//! eleven naturals r = (n_i, k_{e_i}, k_{f_i}); the e-labels describe how the
//! powers of e_α split among the single-output pieces of Δ(e_α) acting on a,
//! and the f-labels do the same for f_α acting on b. The summand factors as
//!
//!   root prefactor(n) · a-side(a, n, k_e) · b-side(b, n, k_f) · Cartan(a', b')
//!
//! where the Cartan factor omits the framing q^{(1/3)(log²x + log x log y + log²y)}.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use dashmap::DashMap;
use serde_json::{json, Value};

use crate::qseries::{falling_s, rising_var, sym_qbinom, sym_qmultinom, Mono, QExponent, RingElem, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BasisState(pub [i64; 4]);

impl BasisState {
    pub const ZERO: BasisState = BasisState([0; 4]);

    /// Checks a1 ≥ a2 ≥ 0 and a3 ≥ a4 ≥ 0.
    pub fn new(a: [i64; 4]) -> Option<Self> {
        let s = BasisState(a);
        s.is_valid().then_some(s)
    }

    pub fn is_valid(&self) -> bool {
        let [a1, a2, a3, a4] = self.0;
        a1 >= a2 && a2 >= 0 && a3 >= a4 && a4 >= 0
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&v| v >= 0)
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    /// a1 + a4, the labels that carry x-degree.
    pub fn x_weight(&self) -> i64 {
        self.0[0] + self.0[3]
    }

    /// a2 + a3, the labels that carry y-degree.
    pub fn y_weight(&self) -> i64 {
        self.0[1] + self.0[2]
    }

    fn add(&self, d: [i64; 4]) -> BasisState {
        BasisState(std::array::from_fn(|i| self.0[i] + d[i]))
    }

    fn sub(&self, d: [i64; 4]) -> BasisState {
        BasisState(std::array::from_fn(|i| self.0[i] - d[i]))
    }

    pub fn to_json(&self) -> Value {
        json!(self.0)
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "|{a},{b},{c},{d}⟩")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct InternalLabels {
    pub n1: i64,
    pub n2: i64,
    pub n3: i64,
    pub ke1: i64,
    pub ke2: i64,
    pub ke31: i64,
    pub ke32: i64,
    pub kf1: i64,
    pub kf2: i64,
    pub kf31: i64,
    pub kf32: i64,
}

impl InternalLabels {
    /// Membership in S(r).
    pub fn in_range(&self) -> bool {
        let r = self;
        let nat = [r.n1, r.n2, r.n3, r.ke1, r.ke2, r.ke31, r.ke32, r.kf1, r.kf2, r.kf31, r.kf32];
        nat.iter().all(|&v| v >= 0)
            && r.ke1 <= r.n1
            && r.kf1 <= r.n1
            && r.ke2 <= r.n2
            && r.kf2 <= r.n2
            && r.ke31 <= r.ke32
            && r.ke32 <= r.n3
            && r.kf32 <= r.kf31
            && r.kf31 <= r.n3
    }

    /// k_e' (overline then swap): the amounts removed from a.
    pub fn ke_out(&self) -> [i64; 4] {
        let r = self;
        [r.ke1 + r.ke31, r.ke2 + r.ke32, r.n2 - r.ke2 + r.n3 - r.ke32, r.n1 - r.ke1 + r.n3 - r.ke31]
    }

    /// k_f': the amounts added to b.
    pub fn kf_out(&self) -> [i64; 4] {
        let r = self;
        [r.kf1 + r.kf31, r.kf2 + r.kf32, r.n2 - r.kf2 + r.n3 - r.kf32, r.n1 - r.kf1 + r.n3 - r.kf31]
    }

    /// (a_out, b_out) = (a - k_e', b + k_f').
    pub fn outputs(&self, a: &BasisState, b: &BasisState) -> (BasisState, BasisState) {
        (a.sub(self.ke_out()), b.add(self.kf_out()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub input: (BasisState, BasisState),
    pub output: (BasisState, BasisState),
    pub coeff: RingElem,
}

impl Transition {
    pub fn a_out(&self) -> BasisState {
        self.output.1
    }

    pub fn b_out(&self) -> BasisState {
        self.output.0
    }

    /// Both conservation sums, which vanish for every emitted transition.
    pub fn conservation(&self) -> (i64, i64) {
        let (a, b) = self.input;
        let (bo, ao) = self.output;
        let d = |i: usize| (bo.0[i] - b.0[i]) - (a.0[i] - ao.0[i]);
        (d(0) + d(3), d(1) + d(2))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "input": [self.input.0.to_json(), self.input.1.to_json()],
            "output": [self.output.0.to_json(), self.output.1.to_json()],
            "coeff": self.coeff.to_json(),
        })
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RMatrixError {
    #[error("labels {0:?} are not consistent with the input states")]
    InconsistentLabels(InternalLabels),
}

/// Accumulates a monomial in quarter units alongside a polynomial factor.
struct Piece {
    q4: i64,
    x4: i64,
    y4: i64,
    neg: bool,
    poly: RingElem,
}

impl Piece {
    fn new() -> Self {
        Piece { q4: 0, x4: 0, y4: 0, neg: false, poly: RingElem::one() }
    }

    fn times(&mut self, p: RingElem) {
        self.poly = &self.poly * &p;
    }

    fn finish(self) -> RingElem {
        let p = self.poly.scale_mono(Mono::quarters(self.q4, self.x4, self.y4));
        if self.neg {
            -p
        } else {
            p
        }
    }
}

/// q^{n(n-1)/4 - n/2} for each root, in quarter units.
fn root_prefactor_q4(n: i64) -> i64 {
    n * (n - 1) - 2 * n
}

/// The a-side factor: e_α powers split into single-output pieces, applied in the
/// order α2 block, α3 block, α1 block. Returns the output a' with its factor, or
/// `None` when some divided power vanishes.
fn a_side(a: &BasisState, r: &InternalLabels) -> Option<(BasisState, RingElem)> {
    let (kb2, ka2) = (r.n2 - r.ke2, r.ke2);
    let (c1, c2, c3) = (r.ke31, r.ke32 - r.ke31, r.n3 - r.ke32);
    let (kb1, ka1) = (r.n1 - r.ke1, r.ke1);
    let [mut a1, mut a2, mut a3, mut a4] = a.0;
    // Each divided power vanishes once its count exceeds the bracket argument.
    let mut p = Piece::new();
    p.q4 -= 2 * (ka2 * kb2 + ka1 * kb1 + c1 * c2 + c1 * c3 + c2 * c3);

    if kb2 > a3 - a4 {
        return None;
    }
    // B2: a3 -> a3 - 1, y^{1/4} q^{(a4-2a3+2)/4} [a3-a4]
    let c = kb2;
    p.y4 += c;
    p.q4 += c * (a4 - 2 * a3 + 2) + c * (c - 1);
    p.times(sym_qbinom(a3 - a4, c));
    a3 -= c;

    if ka2 > a2 {
        return None;
    }
    // A2: a2 -> a2 - 1, y^{1/2} q^{(a1-2a2+2)/4 + (a4-2a3)/2} [a2]
    let c = ka2;
    p.y4 += 2 * c;
    p.q4 += c * (a1 - 2 * a2 + 2) + c * (c - 1) + 2 * c * (a4 - 2 * a3);
    p.times(sym_qbinom(a2, c));
    a2 -= c;

    if c3 > a4 {
        return None;
    }
    // C3: (a3, a4) -> (a3 - 1, a4 - 1), -y^{1/4} q^{(-3a3+a4+1)/4} [a4]
    let c = c3;
    p.y4 += c;
    p.q4 += c * (-3 * a3 + a4 + 1) + c * (c - 1);
    p.neg ^= c % 2 == 1;
    p.times(sym_qbinom(a4, c));
    a3 -= c;
    a4 -= c;

    if c2 > a2 || c2 > a4 {
        return None;
    }
    // C2: (a2, a4) -> (a2 - 1, a4 - 1), y^{1/2} s q^{(a1-2a2+2-3a3)/4} [a2][a4]
    let c = c2;
    p.y4 += 2 * c;
    p.q4 += c * (a1 - 2 * a2 + 2 - 3 * a3) + c * (c - 1);
    p.times(&sym_qbinom(a2, c) * &falling_s(a4, c));
    a2 -= c;
    a4 -= c;

    if c1 > a2 {
        return None;
    }
    // C1: (a1, a2) -> (a1 - 1, a2 - 1), x^{1/4} y^{1/2} q^{(a1-3a2+3)/4 - (a3+a4)/2} [a2]
    let c = c1;
    p.x4 += c;
    p.y4 += 2 * c;
    p.q4 += c * (a1 - 3 * a2 + 3) + c * (c - 1) - 2 * c * (a3 + a4);
    p.times(sym_qbinom(a2, c));
    a1 -= c;
    a2 -= c;

    if kb1 > a4 {
        return None;
    }
    // B1: a4 -> a4 - 1, q^{(a3-2a4+2)/4} [a4]
    let c = kb1;
    p.q4 += c * (a3 - 2 * a4 + 2) + c * (c - 1);
    p.times(sym_qbinom(a4, c));
    a4 -= c;

    if ka1 > a1 - a2 {
        return None;
    }
    // A1: a1 -> a1 - 1, x^{1/4} q^{(a2-2a1+2)/4 + (a3-2a4)/2} [a1-a2]
    let c = ka1;
    p.x4 += c;
    p.q4 += c * (a2 - 2 * a1 + 2) + c * (c - 1) + 2 * c * (a3 - 2 * a4);
    p.times(sym_qbinom(a1 - a2, c));
    a1 -= c;

    let out = BasisState([a1, a2, a3, a4]);
    let v = p.finish();
    (!v.is_zero()).then_some((out, v))
}

/// The b-side factor, including the s^n [n]! left over from the root
/// normalisation. Pieces act in the order α2 block, α3 block, α1 block.
fn b_side(b: &BasisState, r: &InternalLabels) -> Option<(BasisState, RingElem)> {
    let (kq2, kp2) = (r.n2 - r.kf2, r.kf2);
    let (d1, d2, d3) = (r.kf32, r.kf31 - r.kf32, r.n3 - r.kf31);
    let (kq1, kp1) = (r.n1 - r.kf1, r.kf1);
    let [mut b1, mut b2, mut b3, mut b4] = b.0;
    let mut p = Piece::new();
    p.q4 += 2 * (kp2 * kq2 + kp1 * kq1 + d1 * d2 + d1 * d3 + d2 * d3);

    // Q2: b3 -> b3 + 1, y^{-1/4} q^{-(b1-2b2)/2 + (2b3-b4+2)/4} [b3]_y
    let c = kq2;
    p.y4 -= c;
    p.q4 += -2 * c * (b1 - 2 * b2) + c * (2 * b3 - b4 + 2) + c * (c - 1);
    p.times(rising_var(b3, c, Var::Y));
    b3 += c;

    if kp2 > b1 - b2 {
        return None;
    }
    // P2: b2 -> b2 + 1, q^{(2b2-b1+2)/4} [b1-b2]
    let c = kp2;
    p.q4 += c * (2 * b2 - b1 + 2) + c * (c - 1);
    p.times(&sym_qbinom(b1 - b2, c) * &falling_s(r.n2, c));
    b2 += c;

    // D3: (b3, b4) -> +1, -x^{-1/2} y^{-1/4} q^{(b1+b2)/2 + (3b3-b4+3)/4} [b3]_y
    let c = d3;
    p.x4 -= 2 * c;
    p.y4 -= c;
    p.q4 += 2 * c * (b1 + b2) + c * (3 * b3 - b4 + 3) + c * (c - 1);
    p.neg ^= c % 2 == 1;
    p.times(rising_var(b3, c, Var::Y));
    b3 += c;
    b4 += c;

    // D2: (b1, b3) -> +1, -x^{-1/4} y^{-1/4} s q^{(3b2-b4+2b3+2)/4} [b1]_x [b3]_y
    let c = d2;
    p.x4 -= c;
    p.y4 -= c;
    p.q4 += c * (3 * b2 - b4 + 2 * b3 + 2) + c * (c - 1);
    p.neg ^= c % 2 == 1;
    p.times(&rising_var(b1, c, Var::X) * &rising_var(b3, c, Var::Y));
    b1 += c;
    b3 += c;

    // D1: (b1, b2) -> +1, x^{-1/4} q^{(3b2-b1+1)/4} [b1]_x
    let c = d1;
    p.x4 -= c;
    p.q4 += c * (3 * b2 - b1 + 1) + c * (c - 1);
    p.times(rising_var(b1, c, Var::X));
    b1 += c;
    b2 += c;
    p.times(sym_qmultinom(d1, d2, d3));

    // Q1: b4 -> b4 + 1, x^{-1/2} q^{(2b1-b2)/2 - (b3-2b4-2)/4} [b3-b4]
    let c = kq1;
    if c > b3 - b4 {
        return None;
    }
    p.x4 -= 2 * c;
    p.q4 += 2 * c * (2 * b1 - b2) - c * (b3 - 2 * b4 - 2) + c * (c - 1);
    p.times(&sym_qbinom(b3 - b4, c) * &falling_s(r.n1, c));
    b4 += c;

    // P1: b1 -> b1 + 1, x^{-1/4} q^{(2b1-b2+2)/4} [b1]_x
    let c = kp1;
    p.x4 -= c;
    p.q4 += c * (2 * b1 - b2 + 2) + c * (c - 1);
    p.times(rising_var(b1, c, Var::X));
    b1 += c;

    let out = BasisState([b1, b2, b3, b4]);
    let v = p.finish();
    (!v.is_zero()).then_some((out, v))
}

/// x^{-(a1'+a4'+b1'+b4')/2} y^{-(a2'+a3'+b2'+b3')/2} q^{a'·M·b'} on the output pair.
pub fn cartan_monomial(a_out: &BasisState, b_out: &BasisState) -> Mono {
    const M4: [[i64; 4]; 4] = [[4, -2, -2, 4], [-2, 4, 4, -2], [-2, 4, 4, -2], [4, -2, -2, 4]];
    let mut q4 = 0;
    for i in 0..4 {
        for j in 0..4 {
            q4 += a_out.0[i] * M4[i][j] * b_out.0[j];
        }
    }
    let x4 = -2 * (a_out.x_weight() + b_out.x_weight());
    let y4 = -2 * (a_out.y_weight() + b_out.y_weight());
    Mono::quarters(q4, x4, y4)
}

/// Every r in S(r) whose a-output is componentwise nonnegative; n3 outermost.
pub fn enumerate_labels(a: &BasisState, _b: &BasisState) -> impl Iterator<Item = InternalLabels> {
    let [a1, a2, a3, a4] = a.0;
    let mut out = Vec::new();
    for n3 in 0..=(a1 + a4).min(a2 + a3) {
        for n1 in 0..=(a1 + a4 - n3) {
            for n2 in 0..=(a2 + a3 - n3) {
                for_each_e_labels(a, n1, n2, n3, |ke1, ke2, ke31, ke32| {
                    for kf31 in 0..=n3 {
                        for kf32 in 0..=kf31 {
                            for kf1 in 0..=n1 {
                                for kf2 in 0..=n2 {
                                    let r = InternalLabels { n1, n2, n3, ke1, ke2, ke31, ke32, kf1, kf2, kf31, kf32 };
                                    out.push(r);
                                }
                            }
                        }
                    }
                });
            }
        }
    }
    out.into_iter()
}

fn for_each_e_labels(a: &BasisState, n1: i64, n2: i64, n3: i64, mut f: impl FnMut(i64, i64, i64, i64)) {
    let [a1, a2, a3, a4] = a.0;
    for ke32 in 0..=n3 {
        for ke31 in 0..=ke32 {
            for ke1 in 0..=n1.min(a1 - ke31) {
                if n1 - ke1 + n3 - ke31 > a4 {
                    continue;
                }
                for ke2 in 0..=n2.min(a2 - ke32) {
                    if n2 - ke2 + n3 - ke32 > a3 {
                        continue;
                    }
                    f(ke1, ke2, ke31, ke32);
                }
            }
        }
    }
}

fn for_each_f_labels(n1: i64, n2: i64, n3: i64, mut f: impl FnMut(i64, i64, i64, i64)) {
    for kf31 in 0..=n3 {
        for kf32 in 0..=kf31 {
            for kf1 in 0..=n1 {
                for kf2 in 0..=n2 {
                    f(kf1, kf2, kf31, kf32);
                }
            }
        }
    }
}

/// The full summand for one label set, framing excluded.
pub fn r_coefficient(a: &BasisState, b: &BasisState, r: &InternalLabels) -> Result<RingElem, RMatrixError> {
    let (ao, _) = r.outputs(a, b);
    if !r.in_range() || !ao.is_nonnegative() {
        return Err(RMatrixError::InconsistentLabels(*r));
    }
    let Some((ao, ea)) = a_side(a, r) else {
        return Ok(RingElem::zero());
    };
    let Some((bo, fb)) = b_side(b, r) else {
        return Ok(RingElem::zero());
    };
    debug_assert_eq!((ao, bo), r.outputs(a, b));
    let pre = Mono::quarters(root_prefactor_q4(r.n1) + root_prefactor_q4(r.n2) + root_prefactor_q4(r.n3), 0, 0);
    Ok((&ea * &fb).scale_mono(pre.mul(cartan_monomial(&ao, &bo))))
}

type FMap = Arc<BTreeMap<BasisState, RingElem>>;

/// Σ over f-labels of the b-side factor, grouped by b'. Shared by every a.
fn f_map(b: &BasisState, n1: i64, n2: i64, n3: i64) -> FMap {
    static CACHE: OnceLock<DashMap<(BasisState, i64, i64, i64), FMap>> = OnceLock::new();
    let cache = CACHE.get_or_init(DashMap::new);
    if let Some(v) = cache.get(&(*b, n1, n2, n3)) {
        return v.clone();
    }
    let base = InternalLabels { n1, n2, n3, ..Default::default() };
    let mut fs: BTreeMap<BasisState, RingElem> = BTreeMap::new();
    for_each_f_labels(n1, n2, n3, |kf1, kf2, kf31, kf32| {
        let r = InternalLabels { kf1, kf2, kf31, kf32, ..base };
        if let Some((bo, v)) = b_side(b, &r) {
            let e = fs.entry(bo).or_default();
            *e = &*e + &v;
        }
    });
    fs.retain(|_, v| !v.is_zero());
    cache.entry((*b, n1, n2, n3)).or_insert(Arc::new(fs)).clone()
}

/// Lower bounds on the x- and y-exponents worth keeping; `None` keeps everything.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Cutoff {
    pub min_x: Option<QExponent>,
    pub min_y: Option<QExponent>,
}

impl Cutoff {
    pub const NONE: Cutoff = Cutoff { min_x: None, min_y: None };

    fn rejects(&self, (x4, y4): (i64, i64)) -> bool {
        self.min_x.is_some_and(|m| QExponent::quarters(x4) < m) || self.min_y.is_some_and(|m| QExponent::quarters(y4) < m)
    }

    fn shifted(&self, m: Mono) -> Cutoff {
        Cutoff { min_x: self.min_x.map(|v| v - m.x), min_y: self.min_y.map(|v| v - m.y) }
    }
}

fn compute_transitions(a: &BasisState, b: &BasisState, cut: Cutoff) -> Vec<Transition> {
    compute_filtered(a, b, cut, |_| true, |_| true)
}

fn compute_filtered(
    a: &BasisState,
    b: &BasisState,
    cut: Cutoff,
    keep_a: impl Fn(&BasisState) -> bool,
    keep_b: impl Fn(&BasisState) -> bool,
) -> Vec<Transition> {
    let [a1, a2, a3, a4] = a.0;
    let mut acc: BTreeMap<(BasisState, BasisState), Vec<RingElem>> = BTreeMap::new();
    for n3 in 0..=(a1 + a4).min(a2 + a3) {
        for n1 in 0..=(a1 + a4 - n3) {
            for n2 in 0..=(a2 + a3 - n3) {
                let base = InternalLabels { n1, n2, n3, ..Default::default() };
                let mut es: BTreeMap<BasisState, RingElem> = BTreeMap::new();
                for_each_e_labels(a, n1, n2, n3, |ke1, ke2, ke31, ke32| {
                    let r = InternalLabels { ke1, ke2, ke31, ke32, ..base };
                    if let Some((ao, v)) = a_side(a, &r) {
                        let e = es.entry(ao).or_default();
                        *e = &*e + &v;
                    }
                });
                // b2' ≥ b2, so the window with b' = b is the loosest.
                es.retain(|ao, v| !v.is_zero() && keep_a(ao) && !cut.rejects(degree_window(a, b, ao, b)));
                if es.is_empty() {
                    continue;
                }
                let fs = f_map(b, n1, n2, n3);
                let pre = Mono::quarters(root_prefactor_q4(n1) + root_prefactor_q4(n2) + root_prefactor_q4(n3), 0, 0);
                for (ao, ev) in &es {
                    for (bo, fv) in fs.iter() {
                        if fv.is_zero() || !keep_b(bo) || cut.rejects(degree_window(a, b, ao, bo)) {
                            continue;
                        }
                        let m = pre.mul(cartan_monomial(ao, bo));
                        let sh = cut.shifted(m);
                        let c = ev.mul_truncated(fv, sh.min_x, sh.min_y).scale_mono(m);
                        acc.entry((*bo, *ao)).or_default().push(c);
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for ((bo, ao), parts) in acc {
        let coeff = RingElem::sum(parts.iter());
        if coeff.is_zero() {
            continue;
        }
        assert!(
            ao.is_valid() && bo.is_valid(),
            "nonzero R-matrix coefficient into invalid output {bo} ⊗ {ao} from {a} ⊗ {b}"
        );
        out.push(Transition { input: (*a, *b), output: (bo, ao), coeff });
    }
    out
}

/// Uncached apply_R restricted to outputs accepted by both predicates.
#[allow(non_snake_case)]
pub fn apply_R_filtered(
    a: &BasisState,
    b: &BasisState,
    cut: Cutoff,
    keep_a_out: impl Fn(&BasisState) -> bool,
    keep_b_out: impl Fn(&BasisState) -> bool,
) -> Vec<Transition> {
    compute_filtered(a, b, cut, keep_a_out, keep_b_out)
}

/// The single coefficient of |b_out, a_out⟩ in R|a, b⟩ with terms below the cutoff removed.
/// The outputs fix every label except n3 and the splits of the α3 counts.
pub fn r_element_truncated(a: &BasisState, b: &BasisState, a_out: &BasisState, b_out: &BasisState, cut: Cutoff) -> RingElem {
    if !a_out.is_valid() || !b_out.is_valid() || cut.rejects(degree_window(a, b, a_out, b_out)) {
        return RingElem::zero();
    }
    let ke: [i64; 4] = std::array::from_fn(|i| a.0[i] - a_out.0[i]);
    let kf: [i64; 4] = std::array::from_fn(|i| b_out.0[i] - b.0[i]);
    let (s1, s2) = (ke[0] + ke[3], ke[1] + ke[2]);
    if ke.iter().chain(&kf).any(|&k| k < 0) || kf[0] + kf[3] != s1 || kf[1] + kf[2] != s2 {
        return RingElem::zero();
    }
    let m_cartan = cartan_monomial(a_out, b_out);
    let mut parts = Vec::new();
    for n3 in 0..=s1.min(s2) {
        let (n1, n2) = (s1 - n3, s2 - n3);
        let base = InternalLabels { n1, n2, n3, ..Default::default() };
        let mut ev = RingElem::zero();
        for ke32 in 0..=n3 {
            for ke31 in 0..=ke32 {
                let (ke1, ke2) = (ke[0] - ke31, ke[1] - ke32);
                if !(0..=n1).contains(&ke1) || !(0..=n2).contains(&ke2) {
                    continue;
                }
                if let Some((ao, v)) = a_side(a, &InternalLabels { ke1, ke2, ke31, ke32, ..base }) {
                    debug_assert_eq!(ao, *a_out);
                    ev += &v;
                }
            }
        }
        if ev.is_zero() {
            continue;
        }
        let mut fv = RingElem::zero();
        for kf31 in 0..=n3 {
            for kf32 in 0..=kf31 {
                let (kf1, kf2) = (kf[0] - kf31, kf[1] - kf32);
                if !(0..=n1).contains(&kf1) || !(0..=n2).contains(&kf2) {
                    continue;
                }
                if let Some((bo, v)) = b_side(b, &InternalLabels { kf1, kf2, kf31, kf32, ..base }) {
                    debug_assert_eq!(bo, *b_out);
                    fv += &v;
                }
            }
        }
        let m = Mono::quarters(root_prefactor_q4(n1) + root_prefactor_q4(n2) + root_prefactor_q4(n3), 0, 0).mul(m_cartan);
        let sh = cut.shifted(m);
        parts.push(ev.mul_truncated(&fv, sh.min_x, sh.min_y).scale_mono(m));
    }
    RingElem::sum(parts.iter())
}

/// Idempotent concurrent memo of apply_R keyed by the input pair.
#[derive(Default)]
pub struct RCache {
    map: DashMap<(BasisState, BasisState, Cutoff), Arc<Vec<Transition>>>,
}

impl RCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, a: &BasisState, b: &BasisState, cut: Cutoff) -> Arc<Vec<Transition>> {
        if let Some(v) = self.map.get(&(*a, *b, cut)) {
            return v.clone();
        }
        let v = Arc::new(compute_transitions(a, b, cut));
        self.map.entry((*a, *b, cut)).or_insert(v).clone()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

fn global_cache() -> &'static RCache {
    static C: OnceLock<RCache> = OnceLock::new();
    C.get_or_init(RCache::new)
}

/// R|a, b⟩ as transitions |b', a'⟩ grouped by output, framing excluded.
#[allow(non_snake_case)]
pub fn apply_R(a: &BasisState, b: &BasisState) -> Arc<Vec<Transition>> {
    global_cache().get(a, b, Cutoff::NONE)
}

/// apply_R with every term below the cutoff removed. Exact for products with
/// factors whose exponents are ≤ 0, which holds for all R-matrix elements.
#[allow(non_snake_case)]
pub fn apply_R_truncated(a: &BasisState, b: &BasisState, cut: Cutoff) -> Arc<Vec<Transition>> {
    global_cache().get(a, b, cut)
}

/// R_{a,b}^{a',b'}: the coefficient of |b_out, a_out⟩ in R|a, b⟩.
pub fn r_element(a: &BasisState, b: &BasisState, a_out: &BasisState, b_out: &BasisState) -> RingElem {
    apply_R(a, b)
        .iter()
        .find(|t| t.a_out() == *a_out && t.b_out() == *b_out)
        .map(|t| t.coeff.clone())
        .unwrap_or_default()
}

/// Upper bounds (in quarter units) on the x- and y-exponents of R_{a,b}^{a',b'}.
pub fn degree_window(a: &BasisState, b: &BasisState, a_out: &BasisState, b_out: &BasisState) -> (i64, i64) {
    let x4 = -2 * (a_out.0[0] + a_out.0[3] + b.0[0] + b.0[3]);
    let y4 = -(3 * a_out.0[1] + 2 * a_out.0[2] + b.0[1] + 2 * b.0[2] + b_out.0[1] - a.0[1]);
    (x4, y4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::QExponent;

    fn st(v: [i64; 4]) -> BasisState {
        BasisState::new(v).unwrap()
    }

    #[test]
    fn vacuum_is_fixed() {
        let t = apply_R(&BasisState::ZERO, &BasisState::ZERO);
        assert_eq!(t.len(), 1);
        assert!(t[0].coeff.is_one());
        let labels: Vec<_> = enumerate_labels(&BasisState::ZERO, &BasisState::ZERO).collect();
        assert_eq!(labels, vec![InternalLabels::default()]);
        let r0 = r_coefficient(&BasisState::ZERO, &BasisState::ZERO, &InternalLabels::default()).unwrap();
        assert!(r0.is_one());
    }

    #[test]
    fn pure_transport_is_a_monomial() {
        for b in [[1, 0, 0, 0], [2, 1, 1, 0], [3, 1, 2, 2]] {
            let b = st(b);
            let t = apply_R(&BasisState::ZERO, &b);
            assert_eq!(t.len(), 1);
            assert_eq!(t[0].output, (b, BasisState::ZERO));
            let expect = RingElem::mono(Mono::new(
                QExponent::ZERO,
                QExponent::halves(-b.x_weight()),
                QExponent::halves(-b.y_weight()),
            ));
            assert_eq!(t[0].coeff, expect);
            assert_eq!(r_element(&BasisState::ZERO, &b, &BasisState::ZERO, &b), expect);
            let r0 = r_coefficient(&BasisState::ZERO, &b, &InternalLabels::default()).unwrap();
            assert_eq!(r0, expect);
        }
        assert!(r_element(&BasisState::ZERO, &BasisState::ZERO, &st([1, 0, 0, 0]), &BasisState::ZERO).is_zero());
    }

    #[test]
    fn small_enumeration_bounds() {
        let a = st([1, 0, 0, 0]);
        for r in enumerate_labels(&a, &BasisState::ZERO) {
            assert_eq!((r.n2, r.n3), (0, 0));
            assert!(r.n1 <= 1);
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let a = st([1, 1, 1, 1]);
        let b = st([1, 0, 1, 0]);
        let got: std::collections::HashSet<_> = enumerate_labels(&a, &b).collect();
        let mut expect = std::collections::HashSet::new();
        let rng = 0..=3i64;
        for n1 in rng.clone() {
            for n2 in rng.clone() {
                for n3 in rng.clone() {
                    for ke1 in rng.clone() {
                        for ke2 in rng.clone() {
                            for ke31 in rng.clone() {
                                for ke32 in rng.clone() {
                                    for kf1 in rng.clone() {
                                        for kf2 in rng.clone() {
                                            for kf31 in rng.clone() {
                                                for kf32 in rng.clone() {
                                                    let r = InternalLabels {
                                                        n1, n2, n3, ke1, ke2, ke31, ke32, kf1, kf2, kf31, kf32,
                                                    };
                                                    if r.in_range() && r.outputs(&a, &b).0.is_nonnegative() {
                                                        expect.insert(r);
                                                    }
                                                }
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(got, expect);
    }

    #[test]
    fn summed_labels_equal_factorised_transitions() {
        for (a, b) in [([1, 0, 0, 0], [0, 0, 0, 0]), ([2, 1, 1, 0], [1, 1, 1, 1]), ([1, 1, 2, 1], [2, 0, 1, 0])] {
            let (a, b) = (st(a), st(b));
            let mut by_out: BTreeMap<(BasisState, BasisState), RingElem> = BTreeMap::new();
            for r in enumerate_labels(&a, &b) {
                let (ao, bo) = r.outputs(&a, &b);
                let e = by_out.entry((bo, ao)).or_default();
                *e = &*e + &r_coefficient(&a, &b, &r).unwrap();
            }
            by_out.retain(|_, v| !v.is_zero());
            let got: BTreeMap<_, _> = apply_R(&a, &b).iter().map(|t| (t.output, t.coeff.clone())).collect();
            assert_eq!(got, by_out);
        }
    }

    #[test]
    fn inconsistent_labels_are_rejected() {
        let r = InternalLabels { n1: 1, ke1: 1, ..Default::default() };
        assert!(r_coefficient(&BasisState::ZERO, &BasisState::ZERO, &r).is_err());
        let r = InternalLabels { n1: 1, ke1: 2, ..Default::default() };
        assert!(r_coefficient(&st([2, 0, 0, 0]), &BasisState::ZERO, &r).is_err());
    }

    #[test]
    fn conservation_holds() {
        for t in apply_R(&st([2, 1, 2, 1]), &st([1, 1, 0, 0])).iter() {
            assert_eq!(t.conservation(), (0, 0));
        }
    }
}
