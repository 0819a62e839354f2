use fksl3::rmatrix::{apply_R, BasisState};
use fksl3::verma::{universal_R_reduced, PairVector};

fn states(max: i64) -> Vec<BasisState> {
    let mut v = Vec::new();
    for a1 in 0..=max {
        for a2 in 0..=a1 {
            for a3 in 0..=max {
                for a4 in 0..=a3 {
                    v.push(BasisState([a1, a2, a3, a4]));
                }
            }
        }
    }
    v
}

fn compare(a: BasisState, b: BasisState) {
    let oracle = universal_R_reduced(&PairVector::basis((a, b)));
    let closed = apply_R(&a, &b);
    let mut seen = 0;
    for t in closed.iter() {
        let o = oracle.coeff(&t.output).expect("oracle coefficient is Laurent");
        assert_eq!(t.coeff, o, "R|{a},{b}> at {:?}", t.output);
        seen += 1;
    }
    let nonzero = oracle.keys().filter(|k| oracle.coeff(k).map(|c| !c.is_zero()).unwrap_or(true)).count();
    assert_eq!(seen, nonzero, "R|{a},{b}>: support mismatch");
}

#[test]
fn closed_form_matches_universal_r_small() {
    let s = states(2);
    for &a in &s {
        for &b in &s {
            compare(a, b);
        }
    }
}
