//! The loop-space side. The cobar construction on a minimal model of
//! `C^*(BG)` computes `H_*(ΩBG^∧_p)`; transferring its DGA structure gives
//! the loop-space A∞ model, compared against `k[τ]⊗Λ(ξ)` with
//! `m_h(ξ,…,ξ) = ε(h)·τ^{p^n}`, or `k[τ,ξ]/(ξ²+τ³)` when `p^n = 3`.

use std::collections::BTreeMap;

use crate::ainf::{AInfinityAlgebra, HypothesisParams};
use crate::dga::{contraction, massey_power, Cobar, Contraction};
use crate::error::{Error, Result};
use crate::glin::{Bidegree, HVec};
use crate::grp::{expected_loop_model, expected_minimal_model, GroupParams};
use crate::transfer::{merkulov_transfer, verify_against_oracle, OracleReport, TransferredModel};

/// Arity needed on the loop side: `h + 1` for the Stasheff checks, enough to
/// cobar the loop model back over `[-W, 1]`, and 6 in the exceptional case.
pub fn default_loop_arity(gp: GroupParams) -> usize {
    let q = gp.q as i32;
    let back = ((gp.loop_top() - 1) / (2 * q - 1)) as usize;
    let mut a = (gp.h() as usize + 1).max(back);
    if gp.pn() == 3 {
        a = a.max(6);
    }
    a
}

/// Degree parameters read off the computed generators, in the pattern
/// `|τ| = (-2a', ℓ')`, `|ξ| = (-2b'-1, h')`.
pub fn extract_hypothesis(tau: Bidegree, xi: Bidegree, q: u32) -> Result<HypothesisParams> {
    let q = q as i32;
    if tau.s % 2 != 0 || (xi.s + 1) % 2 != 0 || tau.w % q != 0 || xi.w % q != 0 {
        return Err(Error::HypothesisViolated(format!("generator degrees {tau}, {xi} have the wrong parity")));
    }
    HypothesisParams::new(
        (-tau.s / 2) as i64,
        (-(xi.s + 1) / 2) as i64,
        (xi.w / q) as i64,
        (tau.w / q) as i64,
    )
}

pub struct LoopRun {
    pub params: GroupParams,
    pub cobar: Cobar,
    pub contraction: Contraction,
    pub transferred: TransferredModel,
    pub expected: AInfinityAlgebra,
    pub oracle: OracleReport,
    pub hypothesis: HypothesisParams,
}

/// Outcome of one Massey power on the loop side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MasseyEntry {
    /// Value in the normalized basis.
    Value(HVec),
    /// The canonical defining system stopped at this stage.
    Undefined(usize),
}

/// Summary of the loop-side computation, every number a residue mod `p`.
#[derive(Clone, Debug)]
pub struct LoopModelReport {
    pub window: (i32, i32),
    /// `(a, b, m_2(a,b))` on normalized basis labels, zero products omitted.
    pub ring: Vec<(String, String, Vec<(String, u32)>)>,
    /// `(arity, inputs, output, coefficient)` of the normalized model.
    pub higher: Vec<(usize, Vec<String>, String, u32)>,
    /// Raw coefficient of the normalized operation before rescaling.
    pub raw: u32,
    pub checked: usize,
    pub mismatches: usize,
    pub massey: Vec<(usize, MasseyEntry)>,
    pub hypothesis: HypothesisParams,
}

/// Cobar `m` (a normalized minimal model of `C^*(BG)`) over `[-1, top]`,
/// transfer to its cohomology on `[1, top - 1]`, and compare with the
/// closed-form loop model.
pub fn loop_minimal_model(gp: GroupParams, m: &AInfinityAlgebra, top: i32, arity_bound: usize) -> Result<LoopRun> {
    if gp.q < 2 {
        return Err(Error::InvalidParameters("loop models need q > 1".into()));
    }
    let cobar = Cobar::new(m, (-1, top))?;
    let c = contraction(&cobar)?;
    let transferred = merkulov_transfer(&cobar, &c, (1, top - 1), arity_bound, "cobar")?;
    let expected = expected_loop_model(gp, transferred.model.space().window(), arity_bound)?;
    let oracle = verify_against_oracle(&transferred, &expected, gp.loop_hypothesis()?)?;
    let mono = oracle.normalized.model.monomials().expect("normalized models are monomial");
    let hypothesis = extract_hypothesis(mono.even_deg, mono.odd_deg, gp.q)?;
    Ok(LoopRun { params: gp, cobar, contraction: c, transferred, expected, oracle, hypothesis })
}

impl LoopRun {
    pub fn normalized(&self) -> &AInfinityAlgebra {
        &self.oracle.normalized.model
    }

    /// `⟨ξ, …, ξ⟩` (`nfold` copies) in the cobar, reported in the normalized basis.
    pub fn massey_xi(&self, nfold: usize) -> Result<MasseyEntry> {
        let model = self.normalized();
        let sp = model.space();
        let xi = sp.basis_vector(sp.find_label("xi").ok_or_else(|| Error::ShapeMismatch("no class xi".into()))?);
        let cls = self.oracle.change.to_h(sp, &self.contraction.h, &xi)?;
        match massey_power(&self.cobar, &self.contraction, &cls, nfold) {
            Ok(r) => {
                if r.value.is_zero() && !sp.in_window(r.value.deg) {
                    return Ok(MasseyEntry::Value(HVec { deg: r.value.deg, coeffs: Vec::new() }));
                }
                Ok(MasseyEntry::Value(self.oracle.change.from_h(sp, &self.contraction.h, &r.value)?))
            }
            Err(Error::UndefinedMassey { stage }) => Ok(MasseyEntry::Undefined(stage)),
            Err(e) => Err(e),
        }
    }

    /// Poincaré series of the cobar on the loop model over `[1 - top, 0]`,
    /// next to that of `k[x]⊗Λ(t)` on the same window.
    pub fn double_dual(&self) -> Result<(BTreeMap<Bidegree, usize>, BTreeMap<Bidegree, usize>)> {
        let top = self.transferred.model.space().window().1 + 1;
        let back = Cobar::new(&self.transferred.model, (-top, 1))?;
        let c = contraction(&back)?;
        let mut got = c.h.poincare();
        got.retain(|d, n| d.s >= 1 - top && d.s <= 0 && *n > 0);
        let mut want = expected_minimal_model(self.params, (1 - top, 0), 2)?.space().poincare();
        want.retain(|_, n| *n > 0);
        Ok((got, want))
    }

    pub fn report(&self, massey_up_to: usize) -> Result<LoopModelReport> {
        let model = self.normalized();
        let sp = model.space();
        let mut ring = Vec::new();
        let mut higher = Vec::new();
        for op in model.ops() {
            for (word, out) in &op.table {
                let inputs: Vec<String> = word.iter().map(|&b| sp.label(b).to_string()).collect();
                let terms: Vec<(String, u32)> =
                    out.terms().map(|(i, c)| (sp.label(sp.id(out.deg, i)).to_string(), c)).collect();
                if op.arity == 2 {
                    if !terms.is_empty() {
                        ring.push((inputs[0].clone(), inputs[1].clone(), terms));
                    }
                } else {
                    for (label, c) in terms {
                        higher.push((op.arity, inputs.clone(), label, c));
                    }
                }
            }
        }
        ring.sort();
        higher.sort();
        let mut massey = Vec::new();
        for i in 2..=massey_up_to {
            massey.push((i, self.massey_xi(i)?));
        }
        Ok(LoopModelReport {
            window: sp.window(),
            ring,
            higher,
            raw: self.oracle.normalized.raw,
            checked: self.oracle.checked,
            mismatches: self.oracle.mismatches.len(),
            massey,
            hypothesis: self.hypothesis,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hypothesis_from_loop_degrees() {
        for (p, q) in [(3, 2), (5, 2), (7, 3), (7, 6), (5, 4)] {
            let gp = GroupParams::new(p, 1, q, None).unwrap();
            let hp = extract_hypothesis(gp.tau_degree(), gp.xi_degree(), q).unwrap();
            assert_eq!(hp, gp.loop_hypothesis().unwrap());
            assert_eq!(hp.h * hp.a - hp.l * hp.b, 1);
        }
    }

    #[test]
    fn wrong_parity_is_rejected() {
        let gp = GroupParams::new(5, 1, 2, None).unwrap();
        assert!(extract_hypothesis(gp.xi_degree(), gp.tau_degree(), 2).is_err());
    }

    #[test]
    fn loop_side_of_the_closed_form_model() {
        // the oracle model is already normalized, so cobar it directly
        let gp = GroupParams::new(5, 1, 2, None).unwrap();
        let top = gp.loop_top();
        let arity = ((top - 1) / (2 * gp.q as i32 - 2)) as usize;
        let m = expected_minimal_model(gp, (-top - 1, 0), arity).unwrap();
        let run = loop_minimal_model(gp, &m, top, default_loop_arity(gp)).unwrap();
        assert!(run.oracle.passed(), "{:?}", &run.oracle.mismatches[..1]);
        assert_ne!(run.oracle.normalized.raw, 0);
    }
}
