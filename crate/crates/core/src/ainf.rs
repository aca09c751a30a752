//! A∞-algebras on finite windows of bigraded spaces: storage, Koszul signs,
//! the Stasheff checker, the bigrading classifier, and generator rescaling.
//!
//! Conventions. Operations `m_i` have bidegree `(i-2, 0)`. Tensor products
//! of maps act by `(f⊗g)(x⊗y) = (-1)^{|g||x|} f(x)⊗g(y)` with `|·|` the
//! homological degree, and the Stasheff identity at arity `n` reads
//! `Σ_{r+s+t=n} (-1)^{r+st} m_{r+1+t}(1^r ⊗ m_s ⊗ 1^t) = 0`.
//!
//! Models are strictly unital: when a unit is present, `m_i` for `i ≥ 3`
//! vanishes on any word containing it and is not stored there.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::glin::{BasisId, Bidegree, Fp, GradedSpace, HVec};

/// `+1` for `s ≡ 0, 1 (mod 4)`, `-1` otherwise.
pub fn epsilon_sign(s: u64) -> i32 {
    if s % 4 < 2 {
        1
    } else {
        -1
    }
}

/// `epsilon_sign` as a residue in `F_p`.
pub fn epsilon_residue(fp: Fp, s: u64) -> u32 {
    fp.reduce(epsilon_sign(s) as i64)
}

/// One tensor factor of a map `f_1 ⊗ … ⊗ f_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Id,
    Op(usize),
}

impl Slot {
    fn consumes(self) -> usize {
        match self {
            Slot::Id => 1,
            Slot::Op(k) => k,
        }
    }
}

/// A multilinear operation stored on basis words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MultiOp {
    pub arity: usize,
    pub table: BTreeMap<Vec<BasisId>, HVec>,
}

impl MultiOp {
    pub fn new(arity: usize) -> Self {
        MultiOp { arity, table: BTreeMap::new() }
    }

    pub fn shift(&self) -> Bidegree {
        Bidegree::new(self.arity as i32 - 2, 0)
    }
}

/// The monomial basis `e^j o^ε` of a ring generated by an even class `e`
/// and an odd class `o`, e.g. `k[x]⊗Λ(t)` or `k[τ,ξ]/(ξ²+τ³)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    pub even: String,
    pub odd: String,
    pub even_deg: Bidegree,
    pub odd_deg: Bidegree,
    pub ids: BTreeMap<(u32, bool), BasisId>,
}

impl MonomialBasis {
    pub fn id(&self, j: u32, odd: bool) -> Option<BasisId> {
        self.ids.get(&(j, odd)).copied()
    }

    pub fn monomial_of(&self, id: BasisId) -> Option<(u32, bool)> {
        self.ids.iter().find(|(_, &v)| v == id).map(|(&k, _)| k)
    }
}

pub fn monomial_label(even: &str, odd: &str, j: u32, e: bool) -> String {
    let mut parts = Vec::new();
    match j {
        0 => {}
        1 => parts.push(even.to_string()),
        _ => parts.push(format!("{even}^{j}")),
    }
    if e {
        parts.push(odd.to_string());
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

pub fn monomial_degree(even_deg: Bidegree, odd_deg: Bidegree, j: u32, e: bool) -> Bidegree {
    even_deg.scale(j as i32) + if e { odd_deg } else { Bidegree::ZERO }
}

/// The graded space spanned by all monomials whose homological degree lies
/// in `window`. Every monomial must sit in its own bidegree.
pub fn monomial_space(
    fp: Fp,
    window: (i32, i32),
    even: &str,
    odd: &str,
    even_deg: Bidegree,
    odd_deg: Bidegree,
) -> Result<(GradedSpace, MonomialBasis)> {
    if even_deg.s == 0 {
        return Err(Error::ShapeMismatch("even generator in degree 0".into()));
    }
    let mut blocks: BTreeMap<Bidegree, Vec<String>> = BTreeMap::new();
    let mut keys = Vec::new();
    for e in [false, true] {
        for j in 0u32.. {
            let d = monomial_degree(even_deg, odd_deg, j, e);
            let inside = d.s >= window.0 && d.s <= window.1;
            if !inside {
                // degrees move monotonically in j; stop once we leave on the far side
                let moving_out = (even_deg.s < 0 && d.s < window.0) || (even_deg.s > 0 && d.s > window.1);
                if moving_out {
                    break;
                }
                continue;
            }
            if blocks.contains_key(&d) {
                return Err(Error::ShapeMismatch(format!("two monomials in bidegree {d}")));
            }
            blocks.insert(d, vec![monomial_label(even, odd, j, e)]);
            keys.push(((j, e), d));
        }
    }
    let space = GradedSpace::new(fp, window, blocks)?;
    let ids = keys.into_iter().map(|(k, d)| (k, space.id(d, 0))).collect();
    Ok((
        space,
        MonomialBasis { even: even.into(), odd: odd.into(), even_deg, odd_deg, ids },
    ))
}

/// A minimal or DG-like A∞-algebra on a window of a bigraded space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInfinityAlgebra {
    space: GradedSpace,
    unit: Option<BasisId>,
    ops: BTreeMap<usize, MultiOp>,
    arity_bound: usize,
    monomials: Option<MonomialBasis>,
}

impl AInfinityAlgebra {
    /// Validates the bigrading of every entry and drops zero entries.
    pub fn new(
        space: GradedSpace,
        unit: Option<BasisId>,
        ops: Vec<MultiOp>,
        arity_bound: usize,
        monomials: Option<MonomialBasis>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for mut op in ops {
            if op.arity == 0 || op.arity > arity_bound {
                return Err(Error::ArityExceeded { arity: op.arity, bound: arity_bound });
            }
            op.table.retain(|_, v| !v.is_zero());
            for (word, out) in &op.table {
                if word.len() != op.arity {
                    return Err(Error::InvariantViolation(format!("word of length {} in m_{}", word.len(), op.arity)));
                }
                let expect = word.iter().fold(op.shift(), |acc, &b| acc + space.degree_of(b));
                if out.deg != expect {
                    return Err(Error::InvariantViolation(format!(
                        "m_{} entry lands in {} but bigrading demands {}",
                        op.arity, out.deg, expect
                    )));
                }
                if op.arity >= 3 && unit.is_some_and(|u| word.contains(&u)) {
                    return Err(Error::InvariantViolation(format!("m_{} stored on a word containing the unit", op.arity)));
                }
            }
            if map.insert(op.arity, op).is_some() {
                return Err(Error::InvariantViolation("duplicate arity".into()));
            }
        }
        Ok(AInfinityAlgebra { space, unit, ops: map, arity_bound, monomials })
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn prime(&self) -> Fp {
        self.space.prime()
    }

    pub fn unit(&self) -> Option<BasisId> {
        self.unit
    }

    pub fn arity_bound(&self) -> usize {
        self.arity_bound
    }

    pub fn monomials(&self) -> Option<&MonomialBasis> {
        self.monomials.as_ref()
    }

    pub fn op(&self, arity: usize) -> Option<&MultiOp> {
        self.ops.get(&arity)
    }

    pub fn ops(&self) -> impl Iterator<Item = &MultiOp> {
        self.ops.values()
    }

    pub fn is_minimal(&self) -> bool {
        self.ops.get(&1).is_none_or(|m| m.table.is_empty())
    }

    /// Arities above 2 carrying at least one nonzero entry.
    pub fn higher_arities(&self) -> Vec<usize> {
        self.ops.values().filter(|m| m.arity > 2 && !m.table.is_empty()).map(|m| m.arity).collect()
    }

    /// The augmentation basis: every basis element except the unit.
    pub fn reduced_basis(&self) -> Vec<BasisId> {
        (0..self.space.total_dim()).filter(|&b| Some(b) != self.unit).collect()
    }

    pub fn out_degree(&self, word: &[BasisId]) -> Bidegree {
        word.iter()
            .fold(Bidegree::new(word.len() as i32 - 2, 0), |acc, &b| acc + self.space.degree_of(b))
    }

    pub fn eval_basis(&self, word: &[BasisId]) -> Result<HVec> {
        let n = word.len();
        if n > self.arity_bound {
            return Err(Error::ArityExceeded { arity: n, bound: self.arity_bound });
        }
        let deg = self.out_degree(word);
        let zero = HVec::zero(&self.space, deg)?;
        if n >= 3 && self.unit.is_some_and(|u| word.contains(&u)) {
            return Ok(zero);
        }
        Ok(self.ops.get(&n).and_then(|op| op.table.get(word)).cloned().unwrap_or(zero))
    }

    /// Multilinear extension of `m_n` to homogeneous vectors.
    pub fn eval(&self, args: &[HVec]) -> Result<HVec> {
        let fp = self.prime();
        let deg = args.iter().fold(Bidegree::new(args.len() as i32 - 2, 0), |acc, v| acc + v.deg);
        let mut out = HVec::zero(&self.space, deg)?;
        let mut word = vec![0; args.len()];
        fn rec(
            alg: &AInfinityAlgebra,
            fp: Fp,
            args: &[HVec],
            k: usize,
            coef: u32,
            word: &mut Vec<BasisId>,
            out: &mut HVec,
        ) -> Result<()> {
            if k == args.len() {
                let v = alg.eval_basis(word)?;
                out.add_scaled(fp, &v, coef);
                return Ok(());
            }
            for (i, c) in args[k].terms() {
                word[k] = alg.space.id(args[k].deg, i);
                rec(alg, fp, args, k + 1, fp.mul(coef, c), word, out)?;
            }
            Ok(())
        }
        rec(self, fp, args, 0, 1, &mut word, &mut out)?;
        Ok(out)
    }

    /// Replace basis vector `b` by `scale[b]·b` and rewrite every operation.
    /// Deterministic listing of the space and every nonzero entry, in
    /// bidegree and label order.
    pub fn canonical_text(&self) -> String {
        let sp = &self.space;
        let mut out = format!("prime {}\nwindow {} {}\narity_bound {}\n", sp.prime().p(), sp.window().0, sp.window().1, self.arity_bound);
        for d in sp.degrees() {
            out.push_str(&format!("block {d} {}\n", sp.labels(d).join(" ")));
        }
        let key = |b: BasisId| (sp.degree_of(b), sp.label(b).to_string());
        for op in self.ops.values() {
            let mut rows: Vec<(Vec<(Bidegree, String)>, String)> = op
                .table
                .iter()
                .map(|(w, v)| {
                    let mut terms: Vec<(String, u32)> =
                        v.terms().map(|(i, c)| (sp.label(sp.id(v.deg, i)).to_string(), c)).collect();
                    terms.sort();
                    let rhs = terms.iter().map(|(l, c)| format!("{c}:{l}")).collect::<Vec<_>>().join(" ");
                    (w.iter().map(|&b| key(b)).collect(), rhs)
                })
                .collect();
            rows.sort();
            for (w, rhs) in rows {
                let lhs = w.iter().map(|(_, l)| l.as_str()).collect::<Vec<_>>().join(" ");
                out.push_str(&format!("m{} {lhs} -> {rhs}\n", op.arity));
            }
        }
        out
    }

    pub fn rescale(&self, scale: &[u32]) -> Result<AInfinityAlgebra> {
        let fp = self.prime();
        assert_eq!(scale.len(), self.space.total_dim());
        let ops = self
            .ops
            .values()
            .map(|op| {
                let table = op
                    .table
                    .iter()
                    .map(|(word, out)| {
                        let c = word.iter().fold(1, |acc, &b| fp.mul(acc, scale[b]));
                        let coeffs = out
                            .coeffs
                            .iter()
                            .enumerate()
                            .map(|(i, &v)| {
                                let id = self.space.id(out.deg, i);
                                fp.mul(fp.mul(v, c), fp.inv(scale[id]))
                            })
                            .collect();
                        (word.clone(), HVec { deg: out.deg, coeffs })
                    })
                    .collect();
                MultiOp { arity: op.arity, table }
            })
            .collect();
        AInfinityAlgebra::new(self.space.clone(), self.unit, ops, self.arity_bound, self.monomials.clone())
    }
}

/// A closed-form model on the monomials `e^j o^ε`: `m_2` is the
/// commutative product, optionally with `o·o = c·e^k` instead of `o² = 0`,
/// and optionally one higher operation
/// `m_i(e^{j_1}o, …, e^{j_i}o) = c·e^{k + j_1 + … + j_i}`.
#[derive(Clone, Debug)]
pub struct MonomialModel<'a> {
    pub prime: Fp,
    pub window: (i32, i32),
    pub even: &'a str,
    pub odd: &'a str,
    pub even_deg: Bidegree,
    pub odd_deg: Bidegree,
    pub odd_square: Option<(u32, u32)>,
    pub higher: Option<(usize, u32, u32)>,
    pub arity_bound: usize,
}

impl MonomialModel<'_> {
    pub fn build(&self) -> Result<AInfinityAlgebra> {
        let fp = self.prime;
        let (space, mono) = monomial_space(fp, self.window, self.even, self.odd, self.even_deg, self.odd_deg)?;
        let mut m2 = MultiOp::new(2);
        for (&(j1, e1), &b1) in &mono.ids {
            for (&(j2, e2), &b2) in &mono.ids {
                let (j, e, c) = match (e1 && e2, self.odd_square) {
                    (false, _) => (j1 + j2, e1 || e2, 1),
                    (true, None) => continue,
                    (true, Some((c, k))) => (j1 + j2 + k, false, c),
                };
                if let Some(id) = mono.id(j, e) {
                    m2.table.insert(vec![b1, b2], space.basis_vector(id).scaled(fp, c));
                } else if space.in_window(monomial_degree(self.even_deg, self.odd_deg, j, e)) {
                    return Err(Error::ShapeMismatch(format!("product {j},{e} missing from window")));
                }
            }
        }
        let mut ops = vec![m2];
        if let Some((arity, c, k)) = self.higher {
            let mut op = MultiOp::new(arity);
            let mut js = Vec::with_capacity(arity);
            compositions(arity, &mut js, &mut |js| {
                let total: u32 = js.iter().sum();
                let Some(out) = mono.id(k + total, false) else {
                    return false;
                };
                let word: Option<Vec<BasisId>> = js.iter().map(|&j| mono.id(j, true)).collect();
                if let Some(word) = word {
                    op.table.insert(word, space.basis_vector(out).scaled(fp, c));
                }
                true
            });
            ops.push(op);
        }
        let unit = mono.id(0, false);
        AInfinityAlgebra::new(space, unit, ops, self.arity_bound, Some(mono))
    }
}

/// Visit exponent tuples of length `n` in order of increasing total,
/// stopping at the first total on which `f` returns `false` throughout.
fn compositions(n: usize, js: &mut Vec<u32>, f: &mut dyn FnMut(&[u32]) -> bool) {
    fn rec(n: usize, left: u32, js: &mut Vec<u32>, f: &mut dyn FnMut(&[u32]) -> bool, any: &mut bool) {
        if js.len() + 1 == n {
            js.push(left);
            *any |= f(js);
            js.pop();
            return;
        }
        for j in 0..=left {
            js.push(j);
            rec(n, left - j, js, f, any);
            js.pop();
        }
    }
    for total in 0u32.. {
        let mut any = false;
        if n == 0 {
            return;
        }
        rec(n, total, js, f, &mut any);
        if !any {
            return;
        }
    }
}

/// Apply `slots[0] ⊗ … ⊗ slots[m-1]` to a basis word, expanding operation
/// outputs into basis words. Returns `(coefficient, word)` terms.
pub fn koszul_apply(alg: &AInfinityAlgebra, slots: &[Slot], word: &[BasisId]) -> Result<Vec<(u32, Vec<BasisId>)>> {
    let fp = alg.prime();
    let need: usize = slots.iter().map(|s| s.consumes()).sum();
    if need != word.len() {
        return Err(Error::ShapeMismatch(format!("slot pattern consumes {need} inputs, word has {}", word.len())));
    }
    let mut terms: Vec<(u32, Vec<BasisId>)> = vec![(1, Vec::new())];
    let mut pos = 0;
    let mut before = 0i64;
    for slot in slots {
        let k = slot.consumes();
        let inputs = &word[pos..pos + k];
        match *slot {
            Slot::Id => {
                for t in terms.iter_mut() {
                    t.1.push(inputs[0]);
                }
            }
            Slot::Op(arity) => {
                let sign = fp.sign((arity as i64 - 2) * before);
                let out = alg.eval_basis(inputs)?;
                let mut next = Vec::new();
                for (c0, w0) in &terms {
                    for (i, c) in out.terms() {
                        let mut w = w0.clone();
                        w.push(alg.space.id(out.deg, i));
                        next.push((fp.mul(fp.mul(*c0, c), sign), w));
                    }
                }
                terms = next;
            }
        }
        before += inputs.iter().map(|&b| alg.space.degree_of(b).s as i64).sum::<i64>();
        pos += k;
    }
    Ok(terms)
}

/// Outcome of a Stasheff check at one arity.
#[derive(Clone, Debug, Default)]
pub struct DefectReport {
    pub arity: usize,
    /// Words on which the identity was evaluated.
    pub checked: usize,
    /// Words whose target bidegree is zero, so every term vanishes.
    pub zero_by_degree: usize,
    /// Words with a nonzero left-hand side.
    pub nonzero: BTreeMap<Vec<BasisId>, HVec>,
}

impl DefectReport {
    pub fn is_zero(&self) -> bool {
        self.nonzero.is_empty()
    }
}

/// Enumerate reduced-basis words of length `n` all of whose contiguous
/// subwords (length ≥ 2) have their operation target inside the window.
pub fn in_window_words(alg: &AInfinityAlgebra, n: usize) -> Vec<Vec<BasisId>> {
    let basis = alg.reduced_basis();
    let space = alg.space();
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(n);
    fn rec(
        alg: &AInfinityAlgebra,
        space: &GradedSpace,
        basis: &[BasisId],
        n: usize,
        word: &mut Vec<BasisId>,
        out: &mut Vec<Vec<BasisId>>,
    ) {
        if word.len() == n {
            out.push(word.clone());
            return;
        }
        for &b in basis {
            word.push(b);
            let k = word.len();
            let ok = (0..k.saturating_sub(1)).all(|i| space.in_window(alg.out_degree(&word[i..])));
            if ok {
                rec(alg, space, basis, n, word, out);
            }
            word.pop();
        }
    }
    rec(alg, space, &basis, n, &mut word, &mut out);
    out
}

/// Words of length `n` over `basis` whose operation target
/// `Σ|b_i| + (n-2, 0)` is one of `targets`. Basis degrees must share the
/// sign of their homological part, so partial sums move monotonically.
pub fn words_with_target(
    space: &GradedSpace,
    basis: &[BasisId],
    n: usize,
    targets: &[Bidegree],
) -> Result<Vec<Vec<BasisId>>> {
    let degs: Vec<Bidegree> = basis.iter().map(|&b| space.degree_of(b)).collect();
    if degs.iter().any(|d| d.s == 0) || !(degs.iter().all(|d| d.s > 0) || degs.iter().all(|d| d.s < 0)) {
        return Err(Error::ShapeMismatch("reduced degrees must all lie on one side of 0".into()));
    }
    let mut distinct: Vec<Bidegree> = degs.clone();
    distinct.sort();
    distinct.dedup();
    let shift = Bidegree::new(n as i32 - 2, 0);
    let bound = targets.iter().map(|t| (t.s - shift.s).abs()).max().unwrap_or(0);
    // reach[m]: sums of m basis degrees that can still fit under some target
    let mut reach: Vec<std::collections::HashSet<Bidegree>> = vec![[Bidegree::ZERO].into_iter().collect()];
    for m in 1..=n {
        let mut next = std::collections::HashSet::new();
        for r in &reach[m - 1] {
            for &d in &distinct {
                let x = *r + d;
                if x.s.abs() <= bound {
                    next.insert(x);
                }
            }
        }
        reach.push(next);
    }
    // need[m]: prefix sums from which m more letters can reach a target
    let need: Vec<std::collections::HashSet<Bidegree>> = (0..=n)
        .map(|m| {
            targets
                .iter()
                .flat_map(|&t| reach[m].iter().map(move |&r| t - shift - r))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(n);
    #[allow(clippy::too_many_arguments)]
    fn rec(
        basis: &[BasisId],
        degs: &[Bidegree],
        need: &[std::collections::HashSet<Bidegree>],
        n: usize,
        sum: Bidegree,
        word: &mut Vec<BasisId>,
        out: &mut Vec<Vec<BasisId>>,
    ) {
        if word.len() == n {
            out.push(word.clone());
            return;
        }
        for (k, &b) in basis.iter().enumerate() {
            let s = sum + degs[k];
            if need[n - word.len() - 1].contains(&s) {
                word.push(b);
                rec(basis, degs, need, n, s, word, out);
                word.pop();
            }
        }
    }
    if need[n].contains(&Bidegree::ZERO) {
        rec(basis, &degs, &need, n, Bidegree::ZERO, &mut word, &mut out);
    }
    Ok(out)
}

/// Left-hand side of the Stasheff identity at arity `n` on every in-window
/// reduced word.
pub fn stasheff_defect(alg: &AInfinityAlgebra, n: usize) -> Result<DefectReport> {
    let fp = alg.prime();
    let minimal = alg.is_minimal();
    let max_needed = if minimal { n.saturating_sub(1) } else { n };
    if max_needed > alg.arity_bound() {
        return Err(Error::ArityExceeded { arity: max_needed, bound: alg.arity_bound() });
    }
    let mut report = DefectReport { arity: n, ..Default::default() };
    for word in in_window_words(alg, n) {
        let target = alg.out_degree(&word) + Bidegree::new(-1, 0);
        if !alg.space().in_window(target) {
            continue;
        }
        let dim = alg.space().dim(target)?;
        if dim == 0 {
            report.zero_by_degree += 1;
            continue;
        }
        let mut total = HVec::zero(alg.space(), target)?;
        for s in 1..=n {
            for r in 0..=n - s {
                let t = n - s - r;
                let outer = r + 1 + t;
                if minimal && (s == 1 || outer == 1) {
                    continue;
                }
                let mut slots = vec![Slot::Id; r];
                slots.push(Slot::Op(s));
                slots.extend(std::iter::repeat_n(Slot::Id, t));
                let sign = fp.sign((r + s * t) as i64);
                for (c, w) in koszul_apply(alg, &slots, &word)? {
                    let v = alg.eval_basis(&w)?;
                    total.add_scaled(fp, &v, fp.mul(c, sign));
                }
            }
        }
        report.checked += 1;
        if !total.is_zero() {
            report.nonzero.insert(word, total);
        }
    }
    Ok(report)
}

/// Degree parameters of a bigraded `k[x]⊗Λ(t)`: `|x| = (-2a, ℓ)`,
/// `|t| = (-2b-1, h)` in absolute internal units, with `ha - ℓb = 1`.
///
/// `a`, `b` may be negative, which is how the loop-space side fits the
/// same pattern in homological grading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HypothesisParams {
    pub a: i64,
    pub b: i64,
    pub h: i64,
    pub l: i64,
}

impl HypothesisParams {
    pub fn new(a: i64, b: i64, h: i64, l: i64) -> Result<Self> {
        if h < 1 || l < 1 {
            return Err(Error::HypothesisViolated(format!("h = {h}, l = {l} must be positive")));
        }
        if h * a - l * b != 1 {
            return Err(Error::HypothesisViolated(format!("h·a − ℓ·b = {} ≠ 1", h * a - l * b)));
        }
        Ok(HypothesisParams { a, b, h, l })
    }

    /// Cohomology of `Z/p^n ⋊ Z/q`: `a = q, b = q-1, h = p^n-(p^n-1)/q, ℓ = p^n`.
    pub fn for_group(pn: i64, q: i64) -> Result<Self> {
        HypothesisParams::new(q, q - 1, pn - (pn - 1) / q, pn)
    }

    /// Loop-space homology: `|τ| = (2q-2, h)` even, `|ξ| = (2q-1, p^n)` odd.
    pub fn for_loops(pn: i64, q: i64) -> Result<Self> {
        let h = pn - (pn - 1) / q;
        HypothesisParams::new(1 - q, -q, pn, h)
    }

    pub fn x_degree(&self) -> (i64, i64) {
        (-2 * self.a, self.l)
    }

    pub fn t_degree(&self) -> (i64, i64) {
        (-2 * self.b - 1, self.h)
    }
}

/// A monomial `x^j t^ε`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub x: u32,
    pub t: bool,
}

impl Monomial {
    pub fn new(x: u32, t: bool) -> Self {
        Monomial { x, t }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Admissible {
    pub arity: usize,
    pub inputs: Vec<Monomial>,
    pub output: Monomial,
}

/// Every `(i, input tuple)` with `2 < i ≤ max_arity` and exponents
/// `≤ max_power` whose bidegree admits a monomial target.
///
/// Eliminating the internal degree forces `β = ℓ(i-2)/(ℓ-2)` for
/// `β = Σε_r - ε`, and then `α = -βh/ℓ` for `α = Σj_r - j`.
pub fn classify_admissible(hp: HypothesisParams, max_arity: usize, max_power: u32) -> Result<Vec<Admissible>> {
    HypothesisParams::new(hp.a, hp.b, hp.h, hp.l)?;
    if hp.l <= 2 {
        return Err(Error::HypothesisViolated(format!("ℓ = {} ≤ 2", hp.l)));
    }
    let mut out = Vec::new();
    for i in 3..=max_arity {
        let num = hp.l * (i as i64 - 2);
        if num % (hp.l - 2) != 0 {
            continue;
        }
        let beta = num / (hp.l - 2);
        if beta > i as i64 {
            continue;
        }
        if (beta * hp.h) % hp.l != 0 {
            continue;
        }
        let alpha = -(beta * hp.h) / hp.l;
        for eps in [false, true] {
            let ones = beta + eps as i64;
            if ones < 0 || ones > i as i64 {
                continue;
            }
            // homological check, redundant given the elimination but cheap
            if 2 * alpha * hp.a + 2 * beta * hp.b + beta + 2 - i as i64 != 0 {
                continue;
            }
            for pattern in subsets(i, ones as usize) {
                for_each_exponents(i, max_power, &mut |js| {
                    let total: i64 = js.iter().map(|&j| j as i64).sum();
                    let j = total - alpha;
                    if j >= 0 {
                        let inputs = js.iter().zip(&pattern).map(|(&x, &t)| Monomial::new(x, t)).collect();
                        out.push(Admissible { arity: i, inputs, output: Monomial::new(j as u32, eps) });
                    }
                });
            }
        }
    }
    out.sort();
    Ok(out)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, k: usize, cur: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        let used = cur.iter().filter(|&&b| b).count();
        if cur.len() == n {
            if used == k {
                out.push(cur.clone());
            }
            return;
        }
        let left = n - cur.len();
        if used + left > k {
            cur.push(false);
            rec(n, k, cur, out);
            cur.pop();
        }
        if used < k {
            cur.push(true);
            rec(n, k, cur, out);
            cur.pop();
        }
    }
    rec(n, k, &mut cur, &mut out);
    out
}

fn for_each_exponents(n: usize, max: u32, f: &mut dyn FnMut(&[u32])) {
    let mut js = vec![0u32; n];
    loop {
        f(&js);
        let mut k = 0;
        loop {
            if k == n {
                return;
            }
            if js[k] < max {
                js[k] += 1;
                break;
            }
            js[k] = 0;
            k += 1;
        }
    }
}

/// Result of rescaling the generators of a `k[x]⊗Λ(t)` model.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub model: AInfinityAlgebra,
    /// Raw coefficient `c` of `m_ℓ(t,…,t) = c·x^h` before rescaling.
    pub raw: u32,
    pub lambda_odd: u32,
    pub lambda_even: u32,
    /// No operations above arity 2.
    pub formal: bool,
}

fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = extended_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Scalars `(λ_odd, λ_even)` with `λ_odd^ℓ · λ_even^{-h} = target`.
pub fn solve_rescaling(fp: Fp, l: i64, h: i64, target: u32) -> Option<(u32, u32)> {
    let (g, u, v) = extended_gcd(l, h);
    if g != 1 || target == 0 {
        return None;
    }
    // u·ℓ + v·h = 1, so κ^u, κ^{-v} works
    Some((fp.pow_signed(target, u), fp.pow_signed(target, -v)))
}

/// Check that `m_2` is the commutative monomial product of `k[e]⊗Λ(o)`,
/// except that `o·o = c·e^k` when `square = Some((c, k))`.
pub fn check_free_graded_ring(alg: &AInfinityAlgebra, square: Option<(u32, u32)>) -> Result<()> {
    let mono = alg.monomials().ok_or_else(|| Error::ShapeMismatch("model has no monomial basis".into()))?;
    let fp = alg.prime();
    for (&(j1, e1), &b1) in &mono.ids {
        for (&(j2, e2), &b2) in &mono.ids {
            let deg = alg.out_degree(&[b1, b2]);
            if !alg.space().in_window(deg) {
                continue;
            }
            let got = alg.eval_basis(&[b1, b2])?;
            let mut want = HVec::zero(alg.space(), deg)?;
            let term = match (e1 && e2, square) {
                (false, _) => Some((1, mono.id(j1 + j2, e1 || e2))),
                (true, Some((c, k))) => Some((c, mono.id(j1 + j2 + k, false))),
                (true, None) => None,
            };
            if let Some((c, Some(id))) = term {
                want.add_scaled(fp, &alg.space().basis_vector(id), c);
            }
            if got != want {
                return Err(Error::ShapeMismatch(format!(
                    "m_2({}, {}) is not the monomial product",
                    alg.space().label(b1),
                    alg.space().label(b2)
                )));
            }
        }
    }
    Ok(())
}

/// Rescale `t ↦ λ_t t`, `x ↦ λ_x x` so that `m_ℓ(t,…,t) = ε(ℓ)·x^h`.
///
/// For `ℓ = 2` the normalized operation is the product itself, `t² = ε(2)·x^h`,
/// and no higher operations may be present.
pub fn normalize_generators(alg: &AInfinityAlgebra, hp: HypothesisParams) -> Result<Normalized> {
    let fp = alg.prime();
    let mono = alg.monomials().ok_or_else(|| Error::ShapeMismatch("model has no monomial basis".into()))?;
    let l = hp.l as usize;
    let t = mono.id(0, true).ok_or_else(|| Error::ShapeMismatch("no odd generator in window".into()))?;
    let xh = mono.id(hp.h as u32, false).ok_or_else(|| Error::ShapeMismatch("x^h outside window".into()))?;
    let value = alg.eval_basis(&vec![t; l])?;
    let (deg, _) = alg.space().locate(xh);
    if value.deg != deg {
        return Err(Error::ShapeMismatch(format!("m_ℓ(t,…,t) lands in {} not at x^h", value.deg)));
    }
    let raw = value.coeffs[0];
    if l == 2 {
        check_free_graded_ring(alg, Some((raw, hp.h as u32)))?;
        if let Some(bad) = alg.higher_arities().first() {
            return Err(Error::ShapeMismatch(format!("unexpected nonzero m_{bad}")));
        }
    } else {
        check_free_graded_ring(alg, None)?;
        if let Some(bad) = alg.higher_arities().into_iter().find(|&i| i != l) {
            return Err(Error::ShapeMismatch(format!("unexpected nonzero m_{bad}")));
        }
    }
    if raw == 0 {
        if !alg.higher_arities().is_empty() {
            return Err(Error::ShapeMismatch("m_ℓ(t,…,t) = 0 but higher operations remain".into()));
        }
        return Ok(Normalized { model: alg.clone(), raw, lambda_odd: 1, lambda_even: 1, formal: true });
    }
    let target = fp.mul(epsilon_residue(fp, hp.l as u64), fp.inv(raw));
    let (lt, lx) = solve_rescaling(fp, hp.l, hp.h, target)
        .ok_or_else(|| Error::HypothesisViolated("ℓ and h are not coprime".into()))?;
    let mut scale = vec![1u32; alg.space().total_dim()];
    for (&(j, e), &id) in &mono.ids {
        scale[id] = fp.mul(fp.pow(lx, j as u64), if e { lt } else { 1 });
    }
    let model = alg.rescale(&scale)?;
    Ok(Normalized { model, raw, lambda_odd: lt, lambda_even: lx, formal: l == 2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u32) -> Fp {
        Fp::new(p).unwrap()
    }

    #[test]
    fn epsilon_values() {
        assert_eq!(epsilon_sign(3), -1);
        assert_eq!(epsilon_sign(4), 1);
        assert_eq!(epsilon_sign(5), 1);
        assert_eq!(epsilon_sign(9), 1);
        assert_eq!(epsilon_sign(7), -1);
        for s in 0..200 {
            assert_eq!(epsilon_sign(s) * epsilon_sign(s + 2), -1);
            // (-1)^{s(s-1)/2}
            let e = if (s * s.saturating_sub(1) / 2) % 2 == 0 { 1 } else { -1 };
            assert_eq!(epsilon_sign(s), e);
        }
    }

    /// k[y]/(y^N) with |y| = (-2, 1), only m_2: a formal associative algebra.
    fn truncated_poly(p: u32, top: u32) -> AInfinityAlgebra {
        let f = fp(p);
        let mut blocks = BTreeMap::new();
        for j in 0..=top {
            blocks.insert(Bidegree::new(-2 * j as i32, j as i32), vec![format!("y^{j}")]);
        }
        let space = GradedSpace::new(f, (-2 * top as i32, 0), blocks).unwrap();
        let mut m2 = MultiOp::new(2);
        for a in 0..=top {
            for b in 0..=top - a {
                let ia = space.id(Bidegree::new(-2 * a as i32, a as i32), 0);
                let ib = space.id(Bidegree::new(-2 * b as i32, b as i32), 0);
                let ic = space.id(Bidegree::new(-2 * (a + b) as i32, (a + b) as i32), 0);
                m2.table.insert(vec![ia, ib], space.basis_vector(ic));
            }
        }
        let unit = space.id(Bidegree::ZERO, 0);
        AInfinityAlgebra::new(space, Some(unit), vec![m2], 4, None).unwrap()
    }

    #[test]
    fn formal_polynomial_has_zero_defect() {
        let alg = truncated_poly(5, 6);
        for n in 1..=5 {
            let r = stasheff_defect(&alg, n).unwrap();
            assert!(r.is_zero(), "n = {n}");
        }
        assert!(stasheff_defect(&alg, 3).unwrap().checked > 0);
    }

    #[test]
    fn identity_slots_are_identity() {
        let alg = truncated_poly(3, 4);
        let word = vec![1, 2, 3];
        let terms = koszul_apply(&alg, &[Slot::Id, Slot::Id, Slot::Id], &word).unwrap();
        assert_eq!(terms, vec![(1, word)]);
        assert!(koszul_apply(&alg, &[Slot::Id], &[1, 2]).is_err());
    }

    #[test]
    fn classify_group_case_three() {
        let hp = HypothesisParams::new(2, 1, 2, 3).unwrap();
        let got = classify_admissible(hp, 6, 2).unwrap();
        assert!(!got.is_empty());
        for adm in &got {
            assert_eq!(adm.arity, 3);
            assert!(adm.inputs.iter().all(|m| m.t));
            let sum: u32 = adm.inputs.iter().map(|m| m.x).sum();
            assert_eq!(adm.output, Monomial::new(2 + sum, false));
        }
        assert_eq!(got.len(), 27);
    }

    #[test]
    fn classify_rejects_small_l() {
        let hp = HypothesisParams { a: 1, b: 1, h: 1, l: 1 };
        assert!(matches!(classify_admissible(hp, 4, 1), Err(Error::HypothesisViolated(_))));
        assert!(HypothesisParams::new(1, 1, 2, 3).is_err());
    }

    #[test]
    fn rescaling_solves_exhaustively_checked_case() {
        // p = 5, ℓ = 5, h = 3, c = 2: need λ_t^5 λ_x^{-3} = ε(5)/2
        let f = fp(5);
        let target = f.mul(1, f.inv(2));
        let (lt, lx) = solve_rescaling(f, 5, 3, target).unwrap();
        assert_eq!(f.mul(f.pow(lt, 5), f.pow_signed(lx, -3)), target);
        let brute = (1..5u32)
            .flat_map(|a| (1..5u32).map(move |b| (a, b)))
            .filter(|&(a, b)| f.mul(f.pow(a, 5), f.pow_signed(b, -3)) == target)
            .count();
        assert!(brute > 0);
    }

    #[test]
    fn monomial_labels() {
        assert_eq!(monomial_label("x", "t", 0, false), "1");
        assert_eq!(monomial_label("x", "t", 1, true), "x*t");
        assert_eq!(monomial_label("tau", "xi", 3, false), "tau^3");
    }

    #[test]
    fn bigrading_is_enforced() {
        let alg = truncated_poly(3, 3);
        let space = alg.space().clone();
        let mut m3 = MultiOp::new(3);
        m3.table.insert(vec![1, 1, 1], space.basis_vector(2));
        assert!(AInfinityAlgebra::new(space, None, vec![m3], 3, None).is_err());
    }
}
