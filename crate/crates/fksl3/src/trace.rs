//! Reduced quantum trace of a positive braid on V_x^1 ⊗ V_y^2.
//!
//! Every R-matrix element has x- and y-exponents ≤ 0, so a path through the
//! braid can be truncated as soon as its degree leaves the window.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::braid::{BraidError, BraidWord};
use crate::qseries::{FramingFactor, Mono, QExponent, RingElem};
use crate::rmatrix::{apply_R_filtered, apply_R_truncated, r_element_truncated, BasisState, Cutoff};

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error("trace term {0} has a fractional exponent after removing the offset")]
    NonIntegral(String),
}

/// Basis states on the strand slots at the bottom of the braid; slot 1 is pinned to zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coloring {
    pub states: Vec<BasisState>,
}

impl Coloring {
    pub fn zero(strands: usize) -> Self {
        Coloring { states: vec![BasisState::ZERO; strands] }
    }

    /// Σ (i1 + i4) and Σ (i2 + i3) over the slots.
    pub fn budgets(&self) -> (i64, i64) {
        self.states.iter().fold((0, 0), |(x, y), s| (x + s.x_weight(), y + s.y_weight()))
    }
}

/// q^{-|i|} with |i| the plain label sum.
pub fn twist_weight(i: &BasisState) -> RingElem {
    RingElem::q_pow(QExponent::int(-i.total()))
}

/// Colorings with slot 1 at zero and x/y label budgets 2·dx, 2·dy. With
/// `y_closed` the slots are restricted to a3 = a4 = 0.
pub fn colorings(strands: usize, dx: u32, dy: u32, y_closed: bool) -> Vec<Coloring> {
    fn slot_states(bx: i64, by: i64, y_closed: bool) -> Vec<BasisState> {
        let mut v = Vec::new();
        for a1 in 0..=bx {
            for a4 in 0..=(bx - a1) {
                let a2_max = if y_closed { a1 } else { a1.min(by) };
                for a2 in 0..=a2_max {
                    let a3_max = if y_closed { 0 } else { by - a2 };
                    for a3 in a4..=a3_max {
                        v.push(BasisState([a1, a2, a3, a4]));
                    }
                }
            }
        }
        v
    }
    fn rec(slot: usize, strands: usize, bx: i64, by: i64, y_closed: bool, cur: &mut Vec<BasisState>, out: &mut Vec<Coloring>) {
        if slot == strands {
            out.push(Coloring { states: cur.clone() });
            return;
        }
        for st in slot_states(bx, by, y_closed) {
            cur.push(st);
            rec(slot + 1, strands, bx - st.x_weight(), by - st.y_weight(), y_closed, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![BasisState::ZERO];
    rec(1, strands, 2 * dx as i64, 2 * dy as i64, y_closed, &mut cur, &mut out);
    out
}

/// How a diagonal matrix element is truncated and whether y is set to 1.
#[derive(Clone, Copy, Debug)]
struct Window {
    min_x: Option<QExponent>,
    min_y: Option<QExponent>,
    y_one: bool,
}

fn y_to_one(e: &RingElem) -> RingElem {
    e.map_monos(|m| Mono::new(m.q, m.x, QExponent::ZERO))
}

/// Componentwise range a slot must stay in to still reach the target coloring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct SlotRange {
    lo: [i64; 4],
    hi: Option<[i64; 4]>,
}

impl SlotRange {
    const ANY: SlotRange = SlotRange { lo: [0; 4], hi: None };

    fn exact(s: &BasisState) -> Self {
        SlotRange { lo: s.0, hi: Some(s.0) }
    }

    fn contains(&self, s: &BasisState) -> bool {
        (0..4).all(|i| s.0[i] >= self.lo[i] && self.hi.is_none_or(|h| s.0[i] <= h[i]))
    }
}

/// ranges[t][k]: where slot k may sit before crossing t. R only removes labels
/// from its left input and only adds labels to its right input, so the
/// constraints move backward through each crossing.
fn reachable_ranges(word: &[usize], target: &[BasisState]) -> Vec<Vec<SlotRange>> {
    let mut ranges = vec![target.iter().map(SlotRange::exact).collect::<Vec<_>>(); word.len() + 1];
    for t in (0..word.len()).rev() {
        let g = word[t];
        let after = ranges[t + 1].clone();
        let before = &mut ranges[t];
        *before = after.clone();
        before[g - 1] = SlotRange { lo: after[g].lo, hi: None };
        before[g] = SlotRange { lo: [0; 4], hi: after[g - 1].hi };
    }
    ranges
}

fn propagate(b: &BraidWord, c: &Coloring, w: Window) -> RingElem {
    let word = b.word();
    let cut = Cutoff { min_x: w.min_x, min_y: w.min_y };
    let lift = |e: &RingElem| if w.y_one { y_to_one(e) } else { e.clone() };
    let ranges = reachable_ranges(word, &c.states);
    let mut layer: HashMap<Vec<BasisState>, RingElem> = HashMap::new();
    layer.insert(c.states.clone(), RingElem::one());
    for (t, &g) in word.iter().enumerate() {
        let (rb, ra) = (ranges[t + 1][g - 1], ranges[t + 1][g]);
        let mut next: HashMap<Vec<BasisState>, RingElem> = HashMap::new();
        let mut push = |col: &[BasisState], out: (BasisState, BasisState), v: RingElem| {
            if v.is_zero() {
                return;
            }
            let mut nc = col.to_vec();
            nc[g - 1] = out.0;
            nc[g] = out.1;
            let e = next.entry(nc).or_default();
            *e = &*e + &v;
        };
        for (col, coef) in layer {
            if !col.iter().zip(&ranges[t]).all(|(s, r)| r.contains(s)) {
                continue;
            }
            let (a, bb) = (col[g - 1], col[g]);
            if t + 1 == word.len() {
                let (bo, ao) = (c.states[g - 1], c.states[g]);
                let r = r_element_truncated(&a, &bb, &ao, &bo, cut);
                push(&col, (bo, ao), coef.mul_truncated(&lift(&r), w.min_x, w.min_y));
            } else if ra == SlotRange::ANY && rb == SlotRange::ANY {
                for tr in apply_R_truncated(&a, &bb, cut).iter() {
                    push(&col, tr.output, coef.mul_truncated(&lift(&tr.coeff), w.min_x, w.min_y));
                }
            } else {
                for tr in apply_R_filtered(&a, &bb, cut, |ao| ra.contains(ao), |bo| rb.contains(bo)) {
                    push(&col, tr.output, coef.mul_truncated(&lift(&tr.coeff), w.min_x, w.min_y));
                }
            }
        }
        next.retain(|_, v| !v.is_zero());
        layer = next;
    }
    layer.remove(&c.states).unwrap_or_default()
}

/// ⟨c|β|c⟩ as an exact element, without truncation.
pub fn tensor_element(b: &BraidWord, c: &Coloring) -> RingElem {
    propagate(b, c, Window { min_x: None, min_y: None, y_one: false })
}

/// Truncated reduced trace. Coefficient (i, j) multiplies x^{-i} y^{-j} times the offset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceSeries {
    pub braid: String,
    pub strands: usize,
    pub coefficients: BTreeMap<(u32, u32), RingElem>,
    /// Exponents (ex, ey) of the leading monomial x^{ex} y^{ey}.
    pub leading_offset: (i64, i64),
    pub framing: FramingFactor,
    pub truncation: (u32, u32),
    /// True when computed at y = 1; then only j = 0 occurs.
    pub y_specialized: bool,
}

impl TraceSeries {
    pub fn coeff(&self, i: u32, j: u32) -> RingElem {
        self.coefficients.get(&(i, j)).cloned().unwrap_or_default()
    }

    /// Σ coeff(i,j) x^{ex - i} y^{ey - j} as a single element.
    pub fn to_elem(&self) -> RingElem {
        let (ex, ey) = self.leading_offset;
        let parts: Vec<RingElem> = self
            .coefficients
            .iter()
            .map(|(&(i, j), c)| c.scale_mono(Mono::new(QExponent::ZERO, QExponent::int(ex - i as i64), QExponent::int(ey - j as i64))))
            .collect();
        RingElem::sum(parts.iter())
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> =
            self.coefficients.iter().map(|(&(i, j), c)| json!({"i": i, "j": j, "poly": c.to_json()})).collect();
        json!({
            "braid": self.braid,
            "strands": self.strands,
            "truncation": [self.truncation.0, self.truncation.1],
            "offset": {"ex": self.leading_offset.0, "ey": self.leading_offset.1},
            "framing_crossings": self.framing.crossing_count,
            "y_specialized": self.y_specialized,
            "coefficients": coeffs,
        })
    }

    /// Grouped layout: offset[ Σ_i (Σ_j c_ij / (qy)^j) / (qx)^i ].
    pub fn to_text(&self) -> String {
        let (ex, ey) = self.leading_offset;
        let mut s = format!("x^{{{ex}}}y^{{{ey}}}[\n");
        let mut rows: BTreeMap<u32, Vec<(u32, &RingElem)>> = BTreeMap::new();
        for (&(i, j), c) in &self.coefficients {
            rows.entry(i).or_default().push((j, c));
        }
        for (i, row) in rows {
            let inner: Vec<String> = row
                .iter()
                .map(|(j, c)| {
                    // Show c · q^{i+j} so the entries read as multiples of 1/(qx)^i (qy)^j.
                    let shifted = c.scale_mono(Mono::q(QExponent::int((i + j) as i64)));
                    if *j == 0 { format!("({shifted})") } else { format!("({shifted})/(qy)^{j}") }
                })
                .collect();
            let _ = writeln!(s, "  ({}){}", inner.join(" + "), if i == 0 { String::new() } else { format!("/(qx)^{i}") });
        }
        s.push(']');
        s
    }
}

fn collect(total: &RingElem, dx: u32, dy: u32) -> Result<BTreeMap<(u32, u32), RingElem>, TraceError> {
    let mut out: BTreeMap<(u32, u32), Vec<(Mono, crate::qseries::Coeff)>> = BTreeMap::new();
    for (m, c) in total.terms() {
        let (Some(ex), Some(ey), true) = (m.x.to_integer(), m.y.to_integer(), m.q.is_integer()) else {
            return Err(TraceError::NonIntegral(format!("{}", RingElem::monomial(*m, c.clone()))));
        };
        let (i, j) = (-ex, -ey);
        if i < 0 || j < 0 {
            return Err(TraceError::NonIntegral(format!("positive power in {}", RingElem::monomial(*m, c.clone()))));
        }
        if i as u32 <= dx && j as u32 <= dy {
            out.entry((i as u32, j as u32)).or_default().push((Mono::q(m.q), c.clone()));
        }
    }
    Ok(out.into_iter().map(|(k, v)| (k, RingElem::from_terms(v))).collect())
}

fn run(b: &BraidWord, dx: u32, dy: u32, y_one: bool) -> Result<TraceSeries, TraceError> {
    let w = Window {
        min_x: Some(QExponent::int(-(dx as i64))),
        min_y: if y_one { None } else { Some(QExponent::int(-(dy as i64))) },
        y_one,
    };
    let cols = colorings(b.strands(), dx, if y_one { 0 } else { dy }, y_one);
    let parts: Vec<RingElem> = cols
        .par_iter()
        .map(|c| {
            let weight: RingElem = c.states.iter().map(twist_weight).fold(RingElem::one(), |a, t| &a * &t);
            propagate(b, c, w).scale_mono(weight.as_monomial().expect("weight is a monomial").0)
        })
        .collect();
    let total = RingElem::sum(parts.iter());
    let dy = if y_one { 0 } else { dy };
    let coefficients = collect(&total, dx, dy)?;
    let shift = b.writhe() - b.strands() as i64 + 1;
    let lead = coefficients.keys().next().copied().unwrap_or((0, 0));
    Ok(TraceSeries {
        braid: b.to_string(),
        strands: b.strands(),
        coefficients,
        leading_offset: (-shift - lead.0 as i64, if y_one { 0 } else { -shift - lead.1 as i64 }),
        framing: FramingFactor::new(b.writhe()),
        truncation: (dx, dy),
        y_specialized: y_one,
    })
    .map(|s| rebase(s, lead))
}

/// Re-indexes so that the lowest stored (i, j) sits at (0, 0).
fn rebase(mut s: TraceSeries, lead: (u32, u32)) -> TraceSeries {
    if lead != (0, 0) {
        s.coefficients = s.coefficients.into_iter().map(|((i, j), c)| ((i - lead.0, j - lead.1), c)).collect();
    }
    s
}

/// Σ over colorings of q^{-Σ|i_k|} ⟨c|β|c⟩, complete for i ≤ dx, j ≤ dy.
pub fn reduced_trace(b: &BraidWord, dx: u32, dy: u32) -> Result<TraceSeries, TraceError> {
    run(b, dx, dy, false)
}

/// The same state sum with y = 1, where V_y^2 closes on the states a3 = a4 = 0.
pub fn reduced_trace_y1(b: &BraidWord, dx: u32) -> Result<TraceSeries, TraceError> {
    run(b, dx, 0, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::parse_braid;

    #[test]
    fn twist_examples() {
        assert!(twist_weight(&BasisState::ZERO).is_one());
        assert_eq!(twist_weight(&BasisState([1, 0, 0, 0])), RingElem::q_pow(QExponent::int(-1)));
        assert_eq!(twist_weight(&BasisState([1, 1, 1, 1])), RingElem::q_pow(QExponent::int(-4)));
    }

    #[test]
    fn zero_coloring_is_diagonal() {
        for (w, s) in [("1 1 1", 2), ("1 2", 3), ("1 2 1 2", 3)] {
            let b = parse_braid(w, s).unwrap();
            assert!(tensor_element(&b, &Coloring::zero(s)).is_one());
        }
    }

    #[test]
    fn trefoil_tensor_element_factorizes() {
        use crate::rmatrix::r_element;
        let t = parse_braid("1 1 1", 2).unwrap();
        let z = BasisState::ZERO;
        let b = BasisState([1, 0, 1, 0]);
        let c = Coloring { states: vec![z, b] };
        let direct = &(&r_element(&z, &b, &z, &b) * &r_element(&b, &z, &z, &b)) * &r_element(&b, &z, &b, &z);
        assert_eq!(tensor_element(&t, &c), direct);
    }

    #[test]
    fn coloring_budgets() {
        let cs = colorings(2, 1, 1, false);
        assert!(cs.iter().all(|c| c.states[0] == BasisState::ZERO));
        assert!(cs.iter().all(|c| {
            let (x, y) = c.budgets();
            x <= 2 && y <= 2
        }));
        assert!(cs.contains(&Coloring { states: vec![BasisState::ZERO, BasisState([1, 1, 1, 1])] }));
        assert!(colorings(2, 2, 0, true).iter().all(|c| c.states[1].0[2] == 0));
    }

    #[test]
    fn unknot_is_one() {
        let u = parse_braid("1", 2).unwrap();
        let s = reduced_trace(&u, 3, 3).unwrap();
        assert_eq!(s.coefficients.len(), 1);
        assert!(s.coeff(0, 0).is_one());
        assert_eq!(s.leading_offset, (0, 0));
    }

    #[test]
    fn trefoil_first_terms() {
        let t = parse_braid("1 1 1", 2).unwrap();
        let s = reduced_trace(&t, 1, 1).unwrap();
        assert_eq!(s.leading_offset, (-2, -2));
        assert!(s.coeff(0, 0).is_one());
        assert_eq!(s.coeff(0, 1), RingElem::q_pow(QExponent::int(-1)));
        assert_eq!(s.coeff(1, 1), RingElem::q_pow(QExponent::int(-2)).scale_int(&2.into()));
    }
}
