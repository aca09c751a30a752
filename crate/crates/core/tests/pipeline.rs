use ainf::grp::{BasisOrder, GroupParams};
use ainf::koszul::MasseyEntry;
use ainf::pipeline::{format_vector, run_group, verify, GroupOptions};
use ainf::Error;

fn gp(p: u32, n: u32, q: u32) -> GroupParams {
    GroupParams::new(p, n, q, None).unwrap()
}

#[test]
fn verify_small_cases() {
    for (p, q) in [(3, 2), (5, 2), (7, 3)] {
        let r = verify(gp(p, 1, q), GroupOptions::default(), None).unwrap();
        for rec in &r.records {
            assert!(rec.pass, "({p},1,{q}) {}: expected {} got {}", rec.name, rec.expected, rec.got);
        }
        assert!(r.passed());
        assert!(r.records.len() > 10);
    }
}

#[test]
fn massey_of_t_is_minus_a_power_of_x() {
    let run = run_group(gp(5, 1, 2), GroupOptions::default()).unwrap();
    let sp = run.normalized().space();
    for k in 3..5 {
        let (r, v) = run.massey_t(k).unwrap();
        assert!(r.value.is_zero(), "{k}-fold power of t should vanish");
        assert!(v.is_zero());
    }
    let (_, v) = run.massey_t(5).unwrap();
    assert_eq!(format_vector(sp, &v), format!("4*x^{}", gp(5, 1, 2).h()));
}

#[test]
fn orders_agree_after_normalization() {
    let mut texts = Vec::new();
    for order in [BasisOrder::Natural, BasisOrder::Reversed, BasisOrder::Rotated] {
        let run = run_group(gp(3, 1, 2), GroupOptions { order, ..Default::default() }).unwrap();
        assert!(run.oracle.mismatches.is_empty());
        texts.push(run.normalized().canonical_text());
    }
    assert_eq!(texts[0], texts[1]);
    assert_eq!(texts[0], texts[2]);
}

#[test]
fn bad_parameters() {
    let e = run_group(gp(3, 1, 1), GroupOptions::default()).err().unwrap();
    assert!(matches!(e, Error::InvalidParameters(_)));
    let e = run_group(gp(3, 1, 2), GroupOptions { depth: Some(1), ..Default::default() }).err().unwrap();
    assert!(matches!(e, Error::InvalidParameters(_)));
    assert!(matches!(GroupParams::new(4, 1, 2, None), Err(Error::InvalidParameters(_))));
    assert!(matches!(GroupParams::new(5, 1, 3, None), Err(Error::InvalidParameters(_))));
}

#[test]
fn shallow_window_is_a_truncation() {
    let e = run_group(gp(5, 1, 2), GroupOptions { depth: Some(8), ..Default::default() }).err().unwrap();
    assert!(matches!(e, Error::TruncationExceeded(_)), "{e:?}");
}

#[test]
fn arity_below_pn_cannot_see_the_generator() {
    let e = run_group(gp(5, 1, 2), GroupOptions { arity: Some(4), ..Default::default() }).err().unwrap();
    assert!(matches!(e, Error::ArityExceeded { arity: 5, bound: 4 }), "{e:?}");
}

#[test]
fn loop_side_report() {
    let g = gp(5, 1, 2);
    let run = run_group(g, GroupOptions::default()).unwrap();
    let lr = run.loops(None).unwrap();
    let hp = lr.hypothesis;
    assert_eq!((hp.a, hp.b, hp.h, hp.l), (-1, -2, 5, 3));
    assert_eq!(hp.h * hp.a - hp.l * hp.b, 1);
    let rep = lr.report(g.h() as usize).unwrap();
    assert_eq!(rep.mismatches, 0);
    assert!(rep.checked > 0);
    // ⟨ξ⟩^h = -τ^N
    let last = &rep.massey.last().unwrap().1;
    match last {
        MasseyEntry::Value(v) => {
            assert_eq!(format_vector(lr.normalized().space(), v), format!("4*tau^{}", g.pn()))
        }
        MasseyEntry::Undefined(k) => panic!("undefined at {k}"),
    }
    let (got, want) = lr.double_dual().unwrap();
    assert_eq!(got, want);
}
