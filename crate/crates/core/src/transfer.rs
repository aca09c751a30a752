//! Homotopy transfer of a DGA structure to its cohomology by the Merkulov
//! recursion, and comparison of the result with closed-form models.
//!
//! With `Ĝλ_1 = -id` and `Ĝλ_k = G∘λ_k`,
//!
//! `λ_n = Σ_{s+t=n} (-1)^{s+1} μ∘(Ĝλ_s ⊗ Ĝλ_t)`,  `m_n = π∘λ_n∘f^{⊗n}`,
//!
//! so `λ_2 = μ`. The Koszul sign of `Ĝλ_s ⊗ Ĝλ_t` on `a_1⊗…⊗a_n` is
//! `(-1)^{(t+1)(|a_1|+…+|a_s|)}`.

use std::collections::{BTreeMap, HashMap};

use crate::ainf::{
    monomial_label, normalize_generators, words_with_target, AInfinityAlgebra, HypothesisParams, MonomialBasis,
    MultiOp, Normalized,
};
use crate::dga::{verify_contraction, Contraction, DgAlgebra};
use crate::error::{Error, Result};
use crate::glin::{BasisId, Bidegree, GradedSpace, HVec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub source: String,
    pub window: (i32, i32),
    pub arity_bound: usize,
}

/// A minimal model on `H`, with the raw structure constants of every
/// higher operation in the contraction's own basis.
#[derive(Clone, Debug)]
pub struct TransferredModel {
    pub model: AInfinityAlgebra,
    /// `(arity, input labels, output label, coefficient)` for each nonzero
    /// entry of arity ≥ 3.
    pub raw: Vec<(usize, Vec<String>, String, u32)>,
    pub provenance: Provenance,
}

/// Runs the recursion on one DGA and contraction, with a memo of `Ĝλ` over
/// contiguous subwords shared across all input words.
struct Merkulov<'a> {
    a: &'a dyn DgAlgebra,
    c: &'a Contraction,
    /// `f(b)` for each basis element of the model space.
    embedded: Vec<HVec>,
    degrees: Vec<Bidegree>,
    memo: HashMap<Vec<BasisId>, HVec>,
}

impl Merkulov<'_> {
    fn g_hat(&mut self, word: &[BasisId]) -> Result<HVec> {
        if word.len() == 1 {
            let fp = self.a.prime();
            return Ok(self.embedded[word[0]].scaled(fp, fp.neg(1)));
        }
        if let Some(v) = self.memo.get(word) {
            return Ok(v.clone());
        }
        let lam = self.lambda(word)?;
        let v = self.c.homotopy_vec(self.a.space(), &lam)?;
        self.memo.insert(word.to_vec(), v.clone());
        Ok(v)
    }

    fn lambda(&mut self, word: &[BasisId]) -> Result<HVec> {
        let fp = self.a.prime();
        let n = word.len();
        if n == 2 {
            return self.a.mul(&self.embedded[word[0]], &self.embedded[word[1]]);
        }
        let mut acc: Option<HVec> = None;
        let mut left_deg = 0i64;
        for s in 1..n {
            left_deg += self.degrees[word[s - 1]].s as i64;
            let t = n - s;
            let sign = fp.sign(s as i64 + 1 + (t as i64 + 1) * left_deg);
            let x = self.g_hat(&word[..s])?;
            let y = self.g_hat(&word[s..])?;
            let prod = self.a.mul(&x, &y)?;
            match acc.as_mut() {
                None => acc = Some(prod.scaled(fp, sign)),
                Some(v) => v.add_scaled(fp, &prod, sign),
            }
        }
        Ok(acc.expect("n ≥ 3"))
    }
}

/// Transfer on the window `h_window` of cohomology. Degree-0 cohomology is
/// represented by the unit class alone; the bidegree-`(0,0)` basis vector
/// is labelled `1` and embedded as the unit of `a`.
pub fn merkulov_transfer(
    a: &dyn DgAlgebra,
    c: &Contraction,
    h_window: (i32, i32),
    arity_bound: usize,
    source: &str,
) -> Result<TransferredModel> {
    if h_window.0 < c.defined.0 || h_window.1 > c.defined.1 {
        return Err(Error::TruncationExceeded(Bidegree::new(
            if h_window.0 < c.defined.0 { h_window.0 } else { h_window.1 },
            0,
        )));
    }
    verify_contraction(a, c)?;
    let fp = a.prime();
    let unit = a.unit();
    if c.project_vec(&unit)?.is_zero() {
        return Err(Error::InvariantViolation("the unit is a coboundary".into()));
    }
    let mut blocks: BTreeMap<Bidegree, Vec<String>> = BTreeMap::new();
    blocks.insert(Bidegree::ZERO, vec!["1".to_string()]);
    for deg in c.h.degrees() {
        if deg.s != 0 && deg.s >= h_window.0 && deg.s <= h_window.1 {
            blocks.insert(deg, c.h.labels(deg).to_vec());
        }
    }
    let window = (h_window.0.min(0), h_window.1.max(0));
    let space = GradedSpace::new(fp, window, blocks)?;
    let unit_id = space.id(Bidegree::ZERO, 0);
    let n = space.total_dim();
    let mut embedded = Vec::with_capacity(n);
    for b in 0..n {
        if b == unit_id {
            embedded.push(unit.clone());
        } else {
            let (deg, local) = space.locate(b);
            embedded.push(c.embed_basis(a.space(), c.h.id(deg, local))?);
        }
    }
    let degrees: Vec<Bidegree> = (0..n).map(|b| space.degree_of(b)).collect();
    let mut run = Merkulov { a, c, embedded, degrees, memo: HashMap::new() };
    let project = |v: &HVec| -> Result<HVec> {
        let h = c.project_vec(v)?;
        Ok(HVec { deg: h.deg, coeffs: h.coeffs })
    };
    let reduced: Vec<BasisId> = (0..n).filter(|&b| b != unit_id).collect();
    let targets: Vec<Bidegree> = space.degrees().filter(|d| d.s != 0).collect();

    let mut m2 = MultiOp::new(2);
    for b in 0..n {
        m2.table.insert(vec![unit_id, b], space.basis_vector(b));
        m2.table.insert(vec![b, unit_id], space.basis_vector(b));
    }
    for &x in &reduced {
        for &y in &reduced {
            let deg = run.degrees[x] + run.degrees[y];
            if !space.in_window(deg) {
                continue;
            }
            let v = project(&run.lambda(&[x, y])?)?;
            if space.dim(deg)? > 0 {
                m2.table.insert(vec![x, y], v);
            }
        }
    }
    let mut ops = vec![m2];
    let mut raw = Vec::new();
    for arity in 3..=arity_bound {
        let mut op = MultiOp::new(arity);
        for word in words_with_target(&space, &reduced, arity, &targets)? {
            let v = project(&run.lambda(&word)?)?;
            if !v.is_zero() {
                for (i, coef) in v.terms() {
                    raw.push((
                        arity,
                        word.iter().map(|&b| space.label(b).to_string()).collect(),
                        space.label(space.id(v.deg, i)).to_string(),
                        coef,
                    ));
                }
                op.table.insert(word, v);
            }
        }
        ops.push(op);
    }
    if arity_bound >= 3 {
        check_strict_unit(&mut run, &space, unit_id, &reduced)?;
    }
    let model = AInfinityAlgebra::new(space, Some(unit_id), ops, arity_bound, None)?;
    Ok(TransferredModel {
        model,
        raw,
        provenance: Provenance { source: source.to_string(), window, arity_bound },
    })
}

/// `m_3` vanishes on every in-window word with a unit entry.
fn check_strict_unit(run: &mut Merkulov<'_>, space: &GradedSpace, unit: BasisId, reduced: &[BasisId]) -> Result<()> {
    for &x in reduced {
        for &y in reduced {
            let base = run.degrees[x] + run.degrees[y] + Bidegree::new(1, 0);
            if !space.in_window(base) || !run.a.space().in_window(base) {
                continue;
            }
            for word in [[unit, x, y], [x, unit, y], [x, y, unit]] {
                let v = run.c.project_vec(&run.lambda(&word)?)?;
                if !v.is_zero() {
                    return Err(Error::InvariantViolation(format!(
                        "m_3 is not strictly unital on ({}, {}, {})",
                        space.label(word[0]),
                        space.label(word[1]),
                        space.label(word[2])
                    )));
                }
            }
        }
    }
    Ok(())
}

/// A model rewritten in the monomial basis `e^j o^ε` built from `m_2`.
#[derive(Clone, Debug)]
pub struct Monomialized {
    pub model: AInfinityAlgebra,
    /// Monomial basis vector `b'` equals `scale[b]·b` in the old basis.
    pub scale: Vec<u32>,
}

impl Monomialized {
    /// Coordinates of an old-basis vector in the monomial basis.
    pub fn convert(&self, v: &HVec) -> HVec {
        let fp = self.model.prime();
        let sp = self.model.space();
        let coeffs = v
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| fp.mul(c, fp.inv(self.scale[sp.id(v.deg, i)])))
            .collect();
        HVec { deg: v.deg, coeffs }
    }
}

/// Identify `H` with the monomials in `e` (bidegree `even_deg`) and `o`
/// (bidegree `odd_deg`): `e^j := m_2(e^{j-1}, e)`, `e^j o := m_2(e^j, o)`.
/// Every block must be one-dimensional and hit by exactly one monomial.
pub fn to_monomial_basis(
    alg: &AInfinityAlgebra,
    names: (&str, &str),
    even_deg: Bidegree,
    odd_deg: Bidegree,
) -> Result<Monomialized> {
    let fp = alg.prime();
    let sp = alg.space();
    let unit = alg.unit().ok_or_else(|| Error::ShapeMismatch("model has no unit".into()))?;
    for d in sp.degrees() {
        if sp.dim(d)? != 1 {
            return Err(Error::ShapeMismatch(format!("cohomology in {d} has dimension {}", sp.dim(d)?)));
        }
    }
    let single = |deg: Bidegree| -> Result<BasisId> {
        if sp.dim(deg)? != 1 {
            return Err(Error::ShapeMismatch(format!("no generator in {deg}")));
        }
        Ok(sp.id(deg, 0))
    };
    let e = single(even_deg)?;
    let o = single(odd_deg)?;
    let mut scale = vec![0u32; sp.total_dim()];
    let mut ids = BTreeMap::new();
    let mut labels: BTreeMap<Bidegree, Vec<String>> = BTreeMap::new();
    // (vector of e^j in the old basis)
    let mut power = sp.basis_vector(unit);
    for j in 0u32.. {
        for odd in [false, true] {
            let v = if odd {
                if !sp.in_window(power.deg + odd_deg) {
                    continue;
                }
                alg.eval(&[power.clone(), sp.basis_vector(o)])?
            } else {
                power.clone()
            };
            if !sp.in_window(v.deg) {
                continue;
            }
            let terms: Vec<(usize, u32)> = v.terms().collect();
            if sp.dim(v.deg)? == 0 || terms.len() != 1 {
                return Err(Error::ShapeMismatch(format!("{} vanishes", monomial_label(names.0, names.1, j, odd))));
            }
            let id = sp.id(v.deg, terms[0].0);
            if scale[id] != 0 {
                return Err(Error::ShapeMismatch(format!("two monomials in {}", v.deg)));
            }
            scale[id] = terms[0].1;
            ids.insert((j, odd), id);
            labels.insert(v.deg, vec![monomial_label(names.0, names.1, j, odd)]);
        }
        if !sp.in_window(power.deg + even_deg) {
            break;
        }
        power = alg.eval(&[power, sp.basis_vector(e)])?;
    }
    if let Some(b) = scale.iter().position(|&c| c == 0) {
        return Err(Error::ShapeMismatch(format!("class {} is not a monomial", sp.label(b))));
    }
    let rescaled = alg.rescale(&scale)?;
    let space = GradedSpace::new(fp, sp.window(), labels)?;
    let mono = MonomialBasis { even: names.0.into(), odd: names.1.into(), even_deg, odd_deg, ids };
    let ops: Vec<MultiOp> = rescaled.ops().cloned().collect();
    let model = AInfinityAlgebra::new(space, Some(unit), ops, alg.arity_bound(), Some(mono))?;
    Ok(Monomialized { model, scale })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub arity: usize,
    pub inputs: Vec<String>,
    pub expected: Vec<u32>,
    pub got: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct OracleReport {
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
    pub normalized: Normalized,
    pub change: BasisChange,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Passage between a contraction's `H` basis and a normalized model on it:
/// the normalized basis vector `b` is `scale[b]·h_labels[b]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisChange {
    pub h_labels: Vec<String>,
    pub scale: Vec<u32>,
}

impl BasisChange {
    pub fn new(got: &TransferredModel, mono: &Monomialized, n: &Normalized) -> Self {
        let fp = got.model.prime();
        let sp = got.model.space();
        let ids = &mono.model.monomials().expect("monomialized").ids;
        let mut scale = mono.scale.clone();
        for (&(j, e), &id) in ids {
            let lam = fp.mul(fp.pow(n.lambda_even, j as u64), if e { n.lambda_odd } else { 1 });
            scale[id] = fp.mul(scale[id], lam);
        }
        BasisChange { h_labels: (0..sp.total_dim()).map(|b| sp.label(b).to_string()).collect(), scale }
    }

    /// A normalized-model vector as a vector of `h`. The unit label `1` has
    /// no counterpart in `h` and is rejected.
    pub fn to_h(&self, model: &GradedSpace, h: &GradedSpace, v: &HVec) -> Result<HVec> {
        let fp = model.prime();
        let mut out = HVec::zero(h, v.deg)?;
        for (i, c) in v.terms() {
            let b = model.id(v.deg, i);
            let target = h
                .find_label(&self.h_labels[b])
                .ok_or_else(|| Error::ShapeMismatch(format!("{} is not a class of the contraction", self.h_labels[b])))?;
            out.add_scaled(fp, &h.basis_vector(target), fp.mul(c, self.scale[b]));
        }
        Ok(out)
    }

    pub fn from_h(&self, model: &GradedSpace, h: &GradedSpace, v: &HVec) -> Result<HVec> {
        let fp = model.prime();
        let mut out = HVec::zero(model, v.deg)?;
        for (i, c) in v.terms() {
            let label = h.label(h.id(v.deg, i));
            let b = self
                .h_labels
                .iter()
                .position(|l| l == label)
                .ok_or(Error::TruncationExceeded(v.deg))?;
            out.add_scaled(fp, &model.basis_vector(b), fp.mul(c, fp.inv(self.scale[b])));
        }
        Ok(out)
    }
}

/// Monomialize and normalize `got`, then compare every operation on every
/// in-window word with `expected`.
pub fn verify_against_oracle(
    got: &TransferredModel,
    expected: &AInfinityAlgebra,
    hp: HypothesisParams,
) -> Result<OracleReport> {
    let mono = expected.monomials().ok_or_else(|| Error::ShapeMismatch("oracle has no monomial basis".into()))?;
    let m = to_monomial_basis(&got.model, (&mono.even, &mono.odd), mono.even_deg, mono.odd_deg)?;
    let normalized = normalize_generators(&m.model, hp)?;
    let change = BasisChange::new(got, &m, &normalized);
    let (mismatches, checked) = compare_models(&normalized.model, expected)?;
    Ok(OracleReport { checked, mismatches, normalized, change })
}

/// Entry-by-entry comparison on matching labels, arities `2..=min(bounds)`.
pub fn compare_models(got: &AInfinityAlgebra, expected: &AInfinityAlgebra) -> Result<(Vec<Mismatch>, usize)> {
    let (gs, es) = (got.space(), expected.space());
    if gs.poincare() != es.poincare() || gs.window() != es.window() {
        return Err(Error::ShapeMismatch("Poincaré series differ".into()));
    }
    let to_exp: Vec<BasisId> = (0..gs.total_dim())
        .map(|b| es.find_label(gs.label(b)).ok_or_else(|| Error::ShapeMismatch(format!("label {}", gs.label(b)))))
        .collect::<Result<_>>()?;
    let mut mismatches = Vec::new();
    let mut checked = 0;
    let top = got.arity_bound().min(expected.arity_bound());
    let targets: Vec<Bidegree> = gs.degrees().filter(|d| d.s != 0).collect();
    for arity in 2..=top {
        let words: Vec<Vec<BasisId>> = if arity == 2 {
            (0..gs.total_dim())
                .flat_map(|x| (0..gs.total_dim()).map(move |y| vec![x, y]))
                .filter(|w| gs.in_window(got.out_degree(w)))
                .collect()
        } else {
            words_with_target(gs, &got.reduced_basis(), arity, &targets)?
        };
        for w in words {
            let a = got.eval_basis(&w)?;
            let ew: Vec<BasisId> = w.iter().map(|&b| to_exp[b]).collect();
            let b = expected.eval_basis(&ew)?;
            checked += 1;
            // both one-dimensional-per-block monomial spaces: coordinates line up
            if a.coeffs != b.coeffs {
                mismatches.push(Mismatch {
                    arity,
                    inputs: w.iter().map(|&x| gs.label(x).to_string()).collect(),
                    expected: b.coeffs,
                    got: a.coeffs,
                });
            }
        }
    }
    Ok((mismatches, checked))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainf::stasheff_defect;
    use crate::dga::{contraction, TableDga};
    use crate::glin::Fp;

    /// An honest truncated polynomial ring `k[y]/(y^4)`, `|y| = (-2, 1)`, zero differential.
    fn formal_ring() -> TableDga {
        let fp = Fp::new(5).unwrap();
        let mut blocks = BTreeMap::new();
        for j in 0..4 {
            blocks.insert(Bidegree::new(-2 * j, j), vec![format!("y^{j}")]);
        }
        let space = GradedSpace::new(fp, (-9, 1), blocks).unwrap();
        let id = |j: i32| space.id(Bidegree::new(-2 * j, j), 0);
        let mut mult = HashMap::new();
        for a in 1..4 {
            for b in 1..4 - a {
                mult.insert((id(a), id(b)), vec![(id(a + b), 1)]);
            }
        }
        let one = id(0);
        TableDga::new(space, one, mult, HashMap::new()).unwrap()
    }

    #[test]
    fn formal_dga_has_no_higher_operations() {
        let a = formal_ring();
        let c = contraction(&a).unwrap();
        let t = merkulov_transfer(&a, &c, (-8, 0), 5, "formal").unwrap();
        assert!(t.model.higher_arities().is_empty());
        assert!(t.raw.is_empty());
        for n in 3..=6 {
            assert!(stasheff_defect(&t.model, n).unwrap().is_zero());
        }
        let y = t.model.space().find_label("h_-2_1_0").unwrap();
        let y2 = t.model.eval_basis(&[y, y]).unwrap();
        assert_eq!(y2.coeffs, vec![1]);
    }

    #[test]
    fn window_outside_contraction_is_rejected() {
        let a = formal_ring();
        let c = contraction(&a).unwrap();
        assert!(matches!(
            merkulov_transfer(&a, &c, (-12, 0), 3, "formal"),
            Err(Error::TruncationExceeded(_))
        ));
    }
}
