//! Independent oracles shared by the integration tests.

use std::collections::BTreeSet;

use ainf::ainf::{Admissible, HypothesisParams, Monomial};

/// Every `(i, inputs, output)` satisfying both degree equations, by
/// exhaustive search over exponents and outputs.
pub fn brute_force(hp: HypothesisParams, max_arity: usize, max_power: u32) -> BTreeSet<Admissible> {
    let mut out = BTreeSet::new();
    let choices: Vec<Monomial> =
        (0..=max_power).flat_map(|j| [Monomial::new(j, false), Monomial::new(j, true)]).collect();
    for i in 3..=max_arity {
        let mut idx = vec![0usize; i];
        loop {
            let inputs: Vec<Monomial> = idx.iter().map(|&k| choices[k]).collect();
            let hom: i64 = inputs.iter().map(|m| -2 * hp.a * m.x as i64 - (2 * hp.b + 1) * m.t as i64).sum::<i64>()
                + i as i64
                - 2;
            let int: i64 = inputs.iter().map(|m| hp.l * m.x as i64 + hp.h * m.t as i64).sum();
            let top = (i as u32) * max_power + (i as u32) * hp.h as u32 + 1;
            for j in 0..=top {
                for e in [false, true] {
                    let oh = -2 * hp.a * j as i64 - (2 * hp.b + 1) * e as i64;
                    let oi = hp.l * j as i64 + hp.h * e as i64;
                    if oh == hom && oi == int {
                        out.insert(Admissible { arity: i, inputs: inputs.clone(), output: Monomial::new(j, e) });
                    }
                }
            }
            let mut k = 0;
            while k < i {
                idx[k] += 1;
                if idx[k] < choices.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == i {
                break;
            }
        }
    }
    out
}

