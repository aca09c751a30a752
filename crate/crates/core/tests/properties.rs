use std::collections::BTreeSet;

use ainf::ainf::{
    classify_admissible, epsilon_sign, normalize_generators, stasheff_defect, AInfinityAlgebra, HypothesisParams,
    MultiOp,
};
use ainf::dga::{contraction, Cobar, DgAlgebra};
use ainf::glin::{Bidegree, HVec};
use ainf::grp::{build_end_dga, build_resolution, expected_minimal_model, BasisOrder, GroupParams};
use ainf::transfer::compare_models;
use ainf::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

const GROUPS: [(u32, u32); 7] = [(3, 1), (3, 2), (5, 2), (5, 4), (7, 2), (7, 3), (7, 6)];

fn random_vec(rng: &mut ChaCha8Rng, a: &dyn DgAlgebra, deg: Bidegree) -> HVec {
    let sp = a.space();
    let p = sp.prime().p();
    let mut v = HVec::zero(sp, deg).unwrap();
    for c in v.coeffs.iter_mut() {
        *c = rng.gen_range(0..p);
    }
    v
}

fn oracle(p: u32, q: u32) -> (GroupParams, AInfinityAlgebra) {
    let g = GroupParams::new(p, 1, q, None).unwrap();
    let m = expected_minimal_model(g, (-g.cohomology_depth(), 0), g.pn() as usize + 1).unwrap();
    (g, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `d² = 0`, Leibniz on random (not just basis) elements, and the
    /// homotopy identity `v - fπv = dGv + Gdv`.
    #[test]
    fn end_dga_identities(g in 0usize..GROUPS.len(), len in 3usize..9, order in 0usize..3, seed in any::<u64>()) {
        let (p, q) = GROUPS[g];
        let gp = GroupParams::new(p, 1, q, None).unwrap();
        let order = [BasisOrder::Natural, BasisOrder::Reversed, BasisOrder::Rotated][order];
        let res = build_resolution(gp, len).unwrap();
        let a = build_end_dga(&res, order).unwrap();
        let c = contraction(&a).unwrap();
        let sp = a.space();
        let fp = sp.prime();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let degs: Vec<Bidegree> = sp.degrees().collect();
        for _ in 0..20 {
            let dx = degs[rng.gen_range(0..degs.len())];
            let dy = degs[rng.gen_range(0..degs.len())];
            let x = random_vec(&mut rng, &a, dx);
            let y = random_vec(&mut rng, &a, dy);
            let dd = Bidegree::new(-2, 0);
            if sp.in_window(dx + dd) {
                prop_assert!(a.diff(&a.diff(&x).unwrap()).unwrap().is_zero());
            }
            if sp.in_window(dx + dy + Bidegree::new(-1, 0)) {
                let lhs = a.diff(&a.mul(&x, &y).unwrap()).unwrap();
                let mut rhs = a.mul(&a.diff(&x).unwrap(), &y).unwrap();
                rhs.add_scaled(fp, &a.mul(&x, &a.diff(&y).unwrap()).unwrap(), fp.sign(dx.s as i64));
                prop_assert_eq!(lhs, rhs);
            }
            if dx.s > c.defined.0 && dx.s < c.defined.1 {
                let pi = c.project_vec(&x).unwrap();
                let mut lhs = x.clone();
                lhs.add_scaled(fp, &c.embed_vec(sp, &pi).unwrap(), fp.neg(1));
                let mut rhs = a.diff(&c.homotopy_vec(sp, &x).unwrap()).unwrap();
                rhs.add_scaled(fp, &c.homotopy_vec(sp, &a.diff(&x).unwrap()).unwrap(), 1);
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn epsilon_involution(s in 0u64..1_000_000) {
        prop_assert_eq!(epsilon_sign(s) * epsilon_sign(s + 2), -1);
        let e = if (s * s.saturating_sub(1) / 2) % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(epsilon_sign(s), e);
    }

    /// Any rescaling of the generators is undone by normalization, and keeps
    /// the Stasheff identities.
    #[test]
    fn normalization_undoes_rescaling(g in 1usize..GROUPS.len(), lt in 1u32..7, lx in 1u32..7) {
        let (p, q) = GROUPS[g];
        let (gp, m) = oracle(p, q);
        let fp = gp.prime();
        let (lt, lx) = (lt % p, lx % p);
        prop_assume!(lt != 0 && lx != 0);
        let mono = m.monomials().unwrap();
        let mut scale = vec![1u32; m.space().total_dim()];
        for (&(j, e), &id) in &mono.ids {
            scale[id] = fp.mul(fp.pow(lx, j as u64), if e { lt } else { 1 });
        }
        let twisted = m.rescale(&scale).unwrap();
        prop_assert!(stasheff_defect(&twisted, gp.pn() as usize + 1).unwrap().is_zero());
        let n = normalize_generators(&twisted, gp.hypothesis().unwrap()).unwrap();
        prop_assert_eq!(n.model.canonical_text(), m.canonical_text());
    }

    /// A single wrong coefficient is seen by the oracle comparison, and
    /// in m_2 also by associativity.
    #[test]
    fn mutations_are_detected(g in 0usize..3, pick in any::<u64>(), delta in 1u32..7) {
        let (p, q) = [(3, 2), (5, 2), (7, 3)][g];
        let (gp, m) = oracle(p, q);
        let fp = gp.prime();
        let delta = delta % p;
        prop_assume!(delta != 0);
        let entries: Vec<(usize, Vec<usize>, usize)> = m
            .ops()
            .flat_map(|op| op.table.iter().map(move |(w, v)| (op.arity, w.clone(), v.terms().next().unwrap().0)))
            .collect();
        let (arity, word, local) = entries[(pick % entries.len() as u64) as usize].clone();
        let mut ops: Vec<MultiOp> = m.ops().cloned().collect();
        let op = ops.iter_mut().find(|o| o.arity == arity).unwrap();
        let v = op.table.get_mut(&word).unwrap();
        v.coeffs[local] = fp.add(v.coeffs[local], delta);
        let bad = AInfinityAlgebra::new(m.space().clone(), m.unit(), ops, m.arity_bound(), None).unwrap();
        let (mism, _) = compare_models(&bad, &m).unwrap();
        prop_assert_eq!(mism.len(), 1);
        let unit_word = word.iter().any(|&b| Some(b) == m.unit());
        if arity == 2 && !unit_word {
            let mut seen = false;
            for n in 3..=gp.pn() as usize + 1 {
                seen |= !stasheff_defect(&bad, n).unwrap().is_zero();
            }
            // products into the top of the window have no partner to associate with
            let top = bad.out_degree(&word).s - m.space().window().0 < 5;
            prop_assert!(seen || top);
        }
    }

    #[test]
    fn classifier_matches_brute_force(l in 3i64..8, h in 1i64..15, k in 0i64..4, max_power in 0u32..3) {
        let a0 = (1..=l).find(|&a| (h * a - 1) % l == 0);
        prop_assume!(a0.is_some());
        let a = a0.unwrap() + k * l;
        let hp = HypothesisParams::new(a, (h * a - 1) / l, h, l).unwrap();
        let got: BTreeSet<_> = classify_admissible(hp, l as usize + 1, max_power).unwrap().into_iter().collect();
        prop_assert_eq!(got, common::brute_force(hp, l as usize + 1, max_power));
    }
}

#[test]
fn wrong_bigrading_is_rejected() {
    let (_, m) = oracle(5, 2);
    let sp = m.space();
    let t = sp.find_label("t").unwrap();
    let x = sp.find_label("x").unwrap();
    let mut op = MultiOp::new(3);
    // m_3(t,t,t) cannot land on x
    op.table.insert(vec![t, t, t], sp.basis_vector(x));
    let r = AInfinityAlgebra::new(sp.clone(), m.unit(), vec![op], 6, None);
    assert!(matches!(r, Err(Error::InvariantViolation(_))));
}

#[test]
fn cobar_sees_broken_associativity() {
    let g = GroupParams::new(3, 1, 2, None).unwrap();
    let m = expected_minimal_model(g, (-12, 0), 6).unwrap();
    let sp = m.space();
    let x = sp.find_label("x").unwrap();
    let x2 = sp.find_label("x^2").unwrap();
    let mut ops: Vec<MultiOp> = m.ops().cloned().collect();
    let m2 = ops.iter_mut().find(|o| o.arity == 2).unwrap();
    let v = m2.table.get_mut(&vec![x, x2]).unwrap();
    v.coeffs[0] = 2;
    let bad = AInfinityAlgebra::new(sp.clone(), m.unit(), ops, m.arity_bound(), None).unwrap();
    assert!(!stasheff_defect(&bad, 3).unwrap().is_zero());
    assert!(Cobar::new(&m, (-1, 11)).is_ok());
    assert!(matches!(Cobar::new(&bad, (-1, 11)), Err(Error::StasheffViolation(_))));
}

#[test]
fn cobar_of_the_closed_form_model_is_a_dga() {
    for (p, q) in [(3, 2), (5, 2), (7, 3)] {
        let g = GroupParams::new(p, 1, q, None).unwrap();
        let top = g.loop_top();
        let arity = ((top - 1) / (2 * q as i32 - 2)) as usize;
        let m = expected_minimal_model(g, (-top - 1, 0), arity).unwrap();
        let cobar = Cobar::new(&m, (-1, top)).unwrap();
        ainf::dga::check_dga(&cobar).unwrap();
        let c = contraction(&cobar).unwrap();
        ainf::dga::verify_contraction(&cobar, &c).unwrap();
        // τ and ξ sit where the loop model expects them
        assert_eq!(c.h.dim(g.tau_degree()).unwrap(), 1);
        assert_eq!(c.h.dim(g.xi_degree()).unwrap(), 1);
    }
}

#[test]
fn cobar_needs_enough_arity_and_window() {
    let g = GroupParams::new(5, 1, 2, None).unwrap();
    let top = g.loop_top();
    let small = expected_minimal_model(g, (-top - 1, 0), 5).unwrap();
    assert!(matches!(Cobar::new(&small, (-1, top)), Err(Error::ArityExceeded { .. })));
    let shallow = expected_minimal_model(g, (-top + 3, 0), 16).unwrap();
    assert!(matches!(Cobar::new(&shallow, (-1, top)), Err(Error::TruncationExceeded(_))));
}
