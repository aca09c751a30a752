//! The groups `G = Z/p^n ⋊ Z/q`: parameters, the group algebra and its
//! radical generator `U`, the `Z/q`-equivariant periodic resolution of `k`
//! over `k[U]/(U^{p^n})`, the invariant endomorphism DGA, and closed-form
//! models of `H*(BG)` and of the loop-space homology.
//!
//! Internal degrees are in units of `1/q`, so `|U| = 1`.

use std::collections::{BTreeMap, HashMap};

use crate::ainf::{epsilon_residue, AInfinityAlgebra, HypothesisParams, MonomialModel};
use crate::dga::{check_dga, DgAlgebra, SparseVec};
use crate::error::{Error, Result};
use crate::glin::{is_prime, rank_of, BasisId, Bidegree, Fp, GradedSpace, HVec, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupParams {
    pub p: u32,
    pub n: u32,
    pub q: u32,
    pub gamma: u64,
}

/// Multiplicative order of `g` modulo `m`, if `g` is a unit.
pub fn multiplicative_order(g: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    let g = g % m;
    let mut x = g;
    for k in 1..=m {
        if x == 1 {
            return Some(k);
        }
        x = x * g % m;
    }
    None
}

/// Smallest `γ` in `[1, m)` of multiplicative order exactly `q` mod `m`.
pub fn default_gamma(m: u64, q: u64) -> Option<u64> {
    (1..m.max(2)).find(|&g| multiplicative_order(g, m) == Some(q))
}

impl GroupParams {
    /// `gamma = None` picks the smallest element of order `q` mod `p^n`.
    pub fn new(p: u32, n: u32, q: u32, gamma: Option<u64>) -> Result<Self> {
        if p == 2 || !is_prime(p as u64) {
            return Err(Error::InvalidParameters(format!("p = {p} must be an odd prime")));
        }
        if n == 0 {
            return Err(Error::InvalidParameters("n must be at least 1".into()));
        }
        if q == 0 || !(p - 1).is_multiple_of(q) {
            return Err(Error::InvalidParameters(format!("q = {q} must divide p - 1 = {}", p - 1)));
        }
        let pn = (p as u64)
            .checked_pow(n)
            .filter(|&v| v < 1 << 20)
            .ok_or_else(|| Error::InvalidParameters(format!("p^n = {p}^{n} is too large")))?;
        let gamma = match gamma {
            Some(g) => {
                let ord = multiplicative_order(g, pn);
                if ord != Some(q as u64) {
                    return Err(Error::InvalidGamma(format!(
                        "γ = {g} has order {} mod {pn}, expected {q}",
                        ord.map_or("∞".to_string(), |o| o.to_string())
                    )));
                }
                g % pn
            }
            None => default_gamma(pn, q as u64).expect("q | p-1 gives an element of order q"),
        };
        Ok(GroupParams { p, n, q, gamma })
    }

    pub fn prime(&self) -> Fp {
        Fp::new(self.p).expect("validated")
    }

    pub fn pn(&self) -> u32 {
        self.p.pow(self.n)
    }

    pub fn h(&self) -> u32 {
        let pn = self.pn();
        pn - (pn - 1) / self.q
    }

    pub fn l(&self) -> u32 {
        self.pn()
    }

    pub fn hypothesis(&self) -> Result<HypothesisParams> {
        HypothesisParams::for_group(self.pn() as i64, self.q as i64)
    }

    pub fn loop_hypothesis(&self) -> Result<HypothesisParams> {
        HypothesisParams::for_loops(self.pn() as i64, self.q as i64)
    }

    /// `|x| = (-2q, p^n)` in units of `1/q`.
    pub fn x_degree(&self) -> Bidegree {
        Bidegree::new(-2 * self.q as i32, (self.q * self.pn()) as i32)
    }

    /// `|t| = (-2q+1, h)` in units of `1/q`.
    pub fn t_degree(&self) -> Bidegree {
        Bidegree::new(1 - 2 * self.q as i32, (self.q * self.h()) as i32)
    }

    /// `|τ| = (2q-2, h)`.
    pub fn tau_degree(&self) -> Bidegree {
        Bidegree::new(2 * self.q as i32 - 2, (self.q * self.h()) as i32)
    }

    /// `|ξ| = (2q-1, p^n)`.
    pub fn xi_degree(&self) -> Bidegree {
        Bidegree::new(2 * self.q as i32 - 1, (self.q * self.pn()) as i32)
    }

    /// Depth `D` such that cohomology on `[-D, 0]` carries `m_{p^n}` and the
    /// Stasheff checks one arity above it.
    pub fn cohomology_depth(&self) -> i32 {
        let (q, h) = (self.q as i32, self.h() as i32);
        2 * q * h + 2 * q + 2
    }

    /// Top of the loop-side window `[-1, W]`: contains `τ^{p^n}`, one further
    /// period, and the arity-`(h+1)` inputs on `ξ`.
    pub fn loop_top(&self) -> i32 {
        let (q, pn) = (self.q as i32, self.pn() as i32);
        (2 * q - 2) * pn + 2 * q + 3
    }

    /// Resolution length whose End-DGA serves both the cohomology checks and
    /// the cobar input on `[-1, loop_top]`.
    pub fn resolution_length(&self) -> usize {
        (self.cohomology_depth() + 1).max(self.loop_top() + 3) as usize
    }
}

/// How `U` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UFormula {
    /// `U = Σ_{1 ≤ j < p^n, p ∤ j} g^j / j`.
    LogSum,
    /// `U = Σ_k γ^{-k} s^k (g - 1) s^{-k}`.
    EigenProjection,
}

/// `kG` in the group basis `g^i s^j`, index `i + p^n·j`, with
/// `s g s^{-1} = g^γ`, together with the radical generator `U`.
#[derive(Clone, Debug)]
pub struct GroupAlgebra {
    pub gp: GroupParams,
    pub dim: usize,
    /// The radical generator, as an element of `kP ⊆ kG`.
    pub u: Vec<u32>,
    pub formula: UFormula,
    /// Columns are `U^i s^j` expressed in the group basis.
    pub change_of_basis: Matrix,
}

impl GroupAlgebra {
    fn fp(&self) -> Fp {
        self.gp.prime()
    }

    pub fn basis_element(&self, i: u64, j: u64) -> Vec<u32> {
        let pn = self.gp.pn() as u64;
        let mut v = vec![0; self.dim];
        v[((i % pn) + pn * (j % self.gp.q as u64)) as usize] = 1;
        v
    }

    pub fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let fp = self.fp();
        let pn = self.gp.pn() as u64;
        let q = self.gp.q as u64;
        let mut gpow = vec![1u64; q as usize];
        for k in 1..q as usize {
            gpow[k] = gpow[k - 1] * self.gp.gamma % pn;
        }
        let mut out = vec![0; self.dim];
        for (x, &ca) in a.iter().enumerate().filter(|(_, &c)| c != 0) {
            let (i1, j1) = (x as u64 % pn, x as u64 / pn);
            for (y, &cb) in b.iter().enumerate().filter(|(_, &c)| c != 0) {
                let (i2, j2) = (y as u64 % pn, y as u64 / pn);
                // g^{i1} s^{j1} g^{i2} s^{j2} = g^{i1 + γ^{j1} i2} s^{j1+j2}
                let i = (i1 + gpow[j1 as usize] * i2) % pn;
                let j = (j1 + j2) % q;
                let k = (i + pn * j) as usize;
                out[k] = fp.add(out[k], fp.mul(ca, cb));
            }
        }
        out
    }

    fn pow(&self, a: &[u32], e: u32) -> Vec<u32> {
        let mut r = self.basis_element(0, 0);
        for _ in 0..e {
            r = self.mul(&r, a);
        }
        r
    }
}

/// Build `kG`, compute `U`, and check `U ∈ J∖J²`, `U^{p^n} = 0` with
/// `U^{p^n-1} ≠ 0`, and `sUs^{-1} = γU`; then check that the `U^i s^j` form
/// a basis.
pub fn build_group_algebra(gp: GroupParams) -> Result<GroupAlgebra> {
    let gp = GroupParams::new(gp.p, gp.n, gp.q, Some(gp.gamma))?;
    let fp = gp.prime();
    let pn = gp.pn() as u64;
    let q = gp.q as u64;
    let dim = (pn * q) as usize;
    let mut alg = GroupAlgebra {
        gp,
        dim,
        u: vec![0; dim],
        formula: UFormula::LogSum,
        change_of_basis: Matrix::zeros(dim, dim),
    };
    let log_sum = {
        let mut u = vec![0; dim];
        for j in 1..pn {
            if j % gp.p as u64 != 0 {
                u[j as usize] = fp.inv(fp.reduce(j as i64));
            }
        }
        u
    };
    // augmentation ideal of kP and its square
    let j_basis: Vec<Vec<u32>> = (1..pn)
        .map(|i| {
            let mut v = alg.basis_element(i, 0);
            v[0] = fp.sub(v[0], 1);
            v
        })
        .collect();
    let j2: Vec<Vec<u32>> = j_basis.iter().flat_map(|a| j_basis.iter().map(|b| alg.mul(a, b))).collect();
    let r2 = rank_of(fp, dim, &j2);
    let in_j_not_j2 = |u: &[u32]| {
        let aug: u32 = u.iter().fold(0, |acc, &c| fp.add(acc, c));
        let mut with_u = j2.clone();
        with_u.push(u.to_vec());
        aug == 0 && rank_of(fp, dim, &with_u) > r2
    };
    // The log-sum lies in J² once n ≥ 2 (it is p^{n-1}(p-1)(g-1) mod J²);
    // the γ-eigenprojection of g - 1 works for every n.
    let (u, formula) = if in_j_not_j2(&log_sum) {
        (log_sum, UFormula::LogSum)
    } else {
        let g1 = &j_basis[0];
        let mut u = vec![0; dim];
        for k in 0..q {
            let conj = alg.mul(&alg.mul(&alg.basis_element(0, k), g1), &alg.basis_element(0, q - k));
            let c = fp.inv(fp.pow(fp.reduce(gp.gamma as i64), k));
            for (a, b) in u.iter_mut().zip(&conj) {
                *a = fp.add(*a, fp.mul(c, *b));
            }
        }
        if !in_j_not_j2(&u) {
            return Err(Error::InvariantViolation("no radical generator found".into()));
        }
        (u, UFormula::EigenProjection)
    };
    if alg.pow(&u, gp.pn()).iter().any(|&c| c != 0) || alg.pow(&u, gp.pn() - 1).iter().all(|&c| c == 0) {
        return Err(Error::InvariantViolation("U does not have nilpotency order p^n".into()));
    }
    let s = alg.basis_element(0, 1);
    let s_inv = alg.basis_element(0, q - 1);
    let conj = alg.mul(&alg.mul(&s, &u), &s_inv);
    let gamma_u: Vec<u32> = u.iter().map(|&c| fp.mul(c, fp.reduce(gp.gamma as i64))).collect();
    if conj != gamma_u {
        return Err(Error::InvariantViolation("sUs^{-1} ≠ γU".into()));
    }
    let mut cols = Vec::with_capacity(dim);
    for j in 0..q {
        let sj = alg.basis_element(0, j);
        for i in 0..gp.pn() {
            cols.push(alg.mul(&alg.pow(&u, i), &sj));
        }
    }
    if rank_of(fp, dim, &cols) != dim {
        return Err(Error::InvariantViolation("U^i s^j do not span kG".into()));
    }
    alg.u = u;
    alg.formula = formula;
    alg.change_of_basis = Matrix::from_columns(dim, &cols);
    Ok(alg)
}

/// The periodic resolution `P_L → … → P_0 → k`, `P_i = k[U]/(U^{p^n})·e_i`,
/// with `d e_i = U^{δ_i} e_{i-1}`, `δ_i = 1` for odd `i` and `p^n - 1` for even `i`.
#[derive(Clone, Debug)]
pub struct EquivariantResolution {
    pub gp: GroupParams,
    pub length: usize,
    /// `δ_i` for `i ≥ 1`; `delta[0] = 0`.
    pub delta: Vec<u32>,
    /// Internal degree `w_i` of `e_i`.
    pub weights: Vec<i64>,
    /// `χ_i = γ^{c_i}`; stores `c_i mod q`.
    pub characters: Vec<u32>,
}

impl EquivariantResolution {
    /// Matrix of `d_i: P_i → P_{i-1}` in the bases `U^r e_i`, `U^r e_{i-1}`.
    pub fn differential_matrix(&self, i: usize) -> Matrix {
        let n = self.gp.pn() as usize;
        let mut m = Matrix::zeros(n, n);
        let d = self.delta[i] as usize;
        for r in 0..n {
            if r + d < n {
                m.set(r + d, r, 1);
            }
        }
        m
    }
}

pub fn build_resolution(gp: GroupParams, length: usize) -> Result<EquivariantResolution> {
    let gp = GroupParams::new(gp.p, gp.n, gp.q, Some(gp.gamma))?;
    let pn = gp.pn();
    let q = gp.q as i64;
    let mut delta = vec![0u32];
    let mut weights = vec![0i64];
    let mut characters = vec![0u32];
    for i in 1..=length {
        let d = if i % 2 == 1 { 1 } else { pn - 1 };
        delta.push(d);
        weights.push(weights[i - 1] + d as i64);
        characters.push(((characters[i - 1] as i64 + d as i64).rem_euclid(q)) as u32);
    }
    let res = EquivariantResolution { gp, length, delta, weights, characters };
    let fp = gp.prime();
    for i in 2..=length {
        if !res.differential_matrix(i - 1).mul(fp, &res.differential_matrix(i)).is_zero() {
            return Err(Error::InvariantViolation(format!("d∘d ≠ 0 at {i}")));
        }
    }
    let rank = |i: usize| rank_of(fp, pn as usize, &(0..pn as usize).map(|c| res.differential_matrix(i).column(c)).collect::<Vec<_>>());
    for i in 1..length {
        if rank(i) + rank(i + 1) != pn as usize {
            return Err(Error::InvariantViolation(format!("resolution not exact at {i}")));
        }
    }
    if rank(1) != pn as usize - 1 {
        return Err(Error::InvariantViolation("augmentation is not the cokernel of d_1".into()));
    }
    let q = gp.q as usize;
    if length >= 2 * q {
        let qw = gp.q as i64;
        if res.weights[2 * q] != qw * pn as i64 || res.weights[2 * q - 1] != qw * gp.h() as i64 {
            return Err(Error::InvariantViolation("internal degrees do not match |x| and |t|".into()));
        }
    }
    Ok(res)
}

/// Order of the basis inside each bidegree block of the End-DGA.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BasisOrder {
    #[default]
    Natural,
    Reversed,
    /// Cyclic shift by one.
    Rotated,
}

/// The `Z/q`-invariant, non-negative cochain-degree part of `End_{kP}(P)`
/// modulo the dg ideal of maps vanishing on `P_{≤L}`. Basis: `(i, d, r)` is
/// the map `e_{i+d} ↦ U^r e_i`, `i + d ≤ L`, in bidegree
/// `(-d, w_{i+d} - w_i - r)`.
///
/// Cohomology is `Ext_{kG}(k, k)` for `1 ≤ d < L`. In degree 0 there are no
/// boundaries, so `H^0` is all degree-0 cocycles; only the unit class is
/// ever used from it, and `k·1 ⊕ H^{≥1}` carries the A∞ structure of `BG`.
#[derive(Clone, Debug)]
pub struct EndDga {
    res: EquivariantResolution,
    space: GradedSpace,
    elems: Vec<(u32, i32, u32)>,
    lookup: HashMap<(u32, i32, u32), BasisId>,
}

impl EndDga {
    pub fn resolution(&self) -> &EquivariantResolution {
        &self.res
    }

    pub fn element(&self, id: BasisId) -> (u32, i32, u32) {
        self.elems[id]
    }

    pub fn id_of(&self, i: u32, d: i32, r: u32) -> Option<BasisId> {
        self.lookup.get(&(i, d, r)).copied()
    }

    /// Length `L` of the underlying resolution.
    pub fn length(&self) -> usize {
        self.res.length
    }

    /// Homological range `[1-L, -1]` on which the cohomology is `Ext`.
    pub fn trusted(&self) -> (i32, i32) {
        (1 - self.res.length as i32, -1)
    }

    fn weight(&self, i: u32, d: i32, r: u32) -> i64 {
        let w = &self.res.weights;
        w[(i as i64 + d as i64) as usize] - w[i as usize] - r as i64
    }

    /// Basis element for `(i, d, r)`, zero if it lies in the ideal, or an
    /// error if its degree leaves the window.
    fn resolve(&self, i: u32, d: i32, r: u32, c: u32) -> Result<SparseVec> {
        let deg_s = -d;
        if !self.space.in_window(Bidegree::new(deg_s, 0)) {
            return Err(Error::TruncationExceeded(Bidegree::new(deg_s, self.weight(i, d, r) as i32)));
        }
        if r >= self.res.gp.pn() || i as i64 + d as i64 > self.res.length as i64 {
            return Ok(Vec::new());
        }
        let id = self.lookup[&(i, d, r)];
        Ok(vec![(id, c)])
    }
}

pub fn build_end_dga(res: &EquivariantResolution, order: BasisOrder) -> Result<EndDga> {
    let gp = res.gp;
    let l = res.length as i64;
    let pn = gp.pn();
    let q = gp.q as i64;
    let window = (-(l as i32) - 1, 1);
    let mut blocks: BTreeMap<Bidegree, Vec<(u32, i32, u32)>> = BTreeMap::new();
    for d in 0..=l {
        for i in 0..=(l - d) {
            let src = i + d;
            for r in 0..pn {
                let w = res.weights[src as usize] - res.weights[i as usize] - r as i64;
                if w.rem_euclid(q) != 0 {
                    continue;
                }
                blocks.entry(Bidegree::new(-d as i32, w as i32)).or_default().push((i as u32, d as i32, r));
            }
        }
    }
    for v in blocks.values_mut() {
        match order {
            BasisOrder::Natural => {}
            BasisOrder::Reversed => v.reverse(),
            BasisOrder::Rotated => v.rotate_left(1),
        }
    }
    let labels = blocks
        .iter()
        .map(|(&deg, v)| (deg, v.iter().map(|&(i, d, r)| format!("e{}>U^{}e{}", i as i32 + d, r, i)).collect()))
        .collect();
    let space = GradedSpace::new(gp.prime(), window, labels)?;
    let elems: Vec<(u32, i32, u32)> = blocks.into_values().flatten().collect();
    let lookup = elems.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    let dga = EndDga { res: res.clone(), space, elems, lookup };
    check_dga(&dga)?;
    Ok(dga)
}

impl DgAlgebra for EndDga {
    fn space(&self) -> &GradedSpace {
        &self.space
    }

    fn unit(&self) -> HVec {
        let mut v = HVec::zero(&self.space, Bidegree::ZERO).expect("degree 0 is in the window");
        for i in 0..=self.res.length as u32 {
            let (_, local) = self.space.locate(self.lookup[&(i, 0, 0)]);
            v.coeffs[local] = 1;
        }
        v
    }

    fn mul_basis(&self, a: BasisId, b: BasisId) -> Result<SparseVec> {
        let (i1, d1, r1) = self.elems[a];
        let (i2, d2, r2) = self.elems[b];
        let deg = self.space.degree_of(a) + self.space.degree_of(b);
        if !self.space.in_window(deg) {
            return Err(Error::TruncationExceeded(deg));
        }
        if i2 as i64 != i1 as i64 + d1 as i64 {
            return Ok(Vec::new());
        }
        self.resolve(i1, d1 + d2, r1 + r2, 1)
    }

    fn diff_basis(&self, a: BasisId) -> Result<SparseVec> {
        let (i, d, r) = self.elems[a];
        let fp = self.space.prime();
        let mut out = Vec::new();
        if i >= 1 {
            out.extend(self.resolve(i - 1, d + 1, r + self.res.delta[i as usize], 1)?);
        }
        let src = i as i64 + d as i64 + 1;
        if src <= self.res.length as i64 {
            let c = fp.neg(fp.sign(d as i64));
            out.extend(self.resolve(i, d + 1, r + self.res.delta[src as usize], c)?);
        }
        if out.len() == 2 && out[0].0 == out[1].0 {
            let c = fp.add(out[0].1, out[1].1);
            out.truncate(1);
            out[0].1 = c;
        }
        out.retain(|&(_, c)| c != 0);
        Ok(out)
    }
}

/// `k[x]⊗Λ(t)`, `|x| = (-2q, p^n)`, `|t| = (-2q+1, h)`, with
/// `m_{p^n}(x^{j_1}t, …, x^{j_{p^n}}t) = ε(p^n)·x^{h+Σj}` and nothing else.
pub fn expected_minimal_model(gp: GroupParams, window: (i32, i32), arity_bound: usize) -> Result<AInfinityAlgebra> {
    if gp.q < 2 {
        return Err(Error::InvalidParameters("the closed-form model needs q > 1".into()));
    }
    let fp = gp.prime();
    let pn = gp.pn();
    MonomialModel {
        prime: fp,
        window,
        even: "x",
        odd: "t",
        even_deg: gp.x_degree(),
        odd_deg: gp.t_degree(),
        odd_square: None,
        higher: (pn as usize <= arity_bound).then(|| (pn as usize, epsilon_residue(fp, pn as u64), gp.h())),
        arity_bound,
    }
    .build()
}

/// Loop-space homology: for `p^n ≠ 3`, `k[τ]⊗Λ(ξ)` with
/// `m_h(τ^{j_1}ξ, …, τ^{j_h}ξ) = ε(h)·τ^{p^n+Σj}`; for `p^n = 3`, the ring
/// `k[τ,ξ]/(ξ²+τ³)` with no higher operations.
pub fn expected_loop_model(gp: GroupParams, window: (i32, i32), arity_bound: usize) -> Result<AInfinityAlgebra> {
    if gp.q < 2 {
        return Err(Error::InvalidParameters("the loop model needs q > 1".into()));
    }
    let fp = gp.prime();
    let (pn, h) = (gp.pn(), gp.h());
    let exceptional = pn == 3;
    MonomialModel {
        prime: fp,
        window,
        even: "tau",
        odd: "xi",
        even_deg: gp.tau_degree(),
        odd_deg: gp.xi_degree(),
        odd_square: exceptional.then(|| (fp.neg(1), 3)),
        higher: (!exceptional && h as usize <= arity_bound).then(|| (h as usize, epsilon_residue(fp, h as u64), pn)),
        arity_bound,
    }
    .build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainf::stasheff_defect;
    use crate::dga::{contraction, verify_contraction};

    fn gp(p: u32, n: u32, q: u32) -> GroupParams {
        GroupParams::new(p, n, q, None).unwrap()
    }

    #[test]
    fn gamma_validation() {
        assert!(GroupParams::new(5, 1, 2, Some(4)).is_ok());
        assert!(matches!(GroupParams::new(5, 1, 2, Some(1)), Err(Error::InvalidGamma(_))));
        assert!(matches!(GroupParams::new(5, 1, 3, None), Err(Error::InvalidParameters(_))));
        assert!(matches!(GroupParams::new(4, 1, 2, None), Err(Error::InvalidParameters(_))));
        assert_eq!(gp(3, 1, 2).gamma, 2);
        assert_eq!(gp(7, 1, 3).gamma, 2);
        assert_eq!(gp(3, 2, 2).gamma, 8);
    }

    #[test]
    fn derived_constants() {
        let g = gp(3, 2, 2);
        assert_eq!((g.pn(), g.h()), (9, 5));
        let g = gp(7, 1, 3);
        assert_eq!((g.pn(), g.h()), (7, 5));
        let hp = gp(5, 1, 4).hypothesis().unwrap();
        assert_eq!((hp.a, hp.b, hp.h, hp.l), (4, 3, 4, 5));
    }

    #[test]
    fn u_element_for_order_six() {
        let alg = build_group_algebra(gp(3, 1, 2)).unwrap();
        // U = g + 2g²
        assert_eq!(&alg.u[..3], &[0, 1, 2]);
        assert!(alg.u[3..].iter().all(|&c| c == 0));
        for (p, n, q) in [(5, 1, 2), (5, 1, 4), (7, 1, 3), (3, 2, 2)] {
            build_group_algebra(gp(p, n, q)).unwrap();
        }
    }

    #[test]
    fn resolution_weights_and_characters() {
        let g = gp(3, 1, 2);
        let res = build_resolution(g, 8).unwrap();
        assert_eq!(res.weights[4], 6);
        assert_eq!(res.weights[3], 4);
        assert_eq!(res.characters[3], 0);
        for i in 0..=4 {
            assert_eq!(res.weights[i + 4], res.weights[i] + 6);
            assert_eq!(res.characters[i + 4], res.characters[i]);
        }
    }

    fn poincare_signature(c: &crate::dga::Contraction, lo: i32) -> Vec<(Bidegree, usize)> {
        c.h.poincare().into_iter().filter(|(d, _)| d.s >= lo && d.s < 0).collect()
    }

    #[test]
    fn end_dga_cohomology_small_case() {
        let g = gp(3, 1, 2);
        let res = build_resolution(g, 15).unwrap();
        let a = build_end_dga(&res, BasisOrder::Natural).unwrap();
        let c = contraction(&a).unwrap();
        verify_contraction(&a, &c).unwrap();
        let got = poincare_signature(&c, -14);
        let x = g.x_degree();
        let t = g.t_degree();
        let mut want = Vec::new();
        for j in 0..4 {
            want.push(x.scale(j));
            want.push(x.scale(j) + t);
        }
        let mut want: Vec<(Bidegree, usize)> =
            want.into_iter().filter(|d| d.s >= -14 && d.s < 0).map(|d| (d, 1)).collect();
        want.sort();
        assert_eq!(got, want);
        let s: Vec<i32> = got.iter().map(|(d, _)| d.s).collect();
        assert_eq!(s, vec![-12, -11, -8, -7, -4, -3]);
        assert!(!c.project_vec(&a.unit()).unwrap().is_zero());
    }

    #[test]
    fn truncated_polynomial_cohomology() {
        let g = gp(3, 1, 1);
        let res = build_resolution(g, 8).unwrap();
        let a = build_end_dga(&res, BasisOrder::Natural).unwrap();
        let c = contraction(&a).unwrap();
        let got: Vec<Bidegree> = c.h.degrees().filter(|d| d.s >= -7 && d.s < 0).collect();
        let mut want = Vec::new();
        for j in 0..4 {
            want.push(Bidegree::new(-2 * j, 3 * j));
            want.push(Bidegree::new(-2 * j - 1, 3 * j + 1));
        }
        want.retain(|d| d.s >= -7 && d.s < 0);
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn oracle_models_are_ainfinity() {
        let g = gp(3, 1, 2);
        let m = expected_minimal_model(g, (-16, 0), 5).unwrap();
        for n in 3..=6 {
            assert!(stasheff_defect(&m, n).unwrap().is_zero(), "n = {n}");
        }
        let lp = expected_loop_model(g, (0, 14), 6).unwrap();
        assert!(lp.higher_arities().is_empty());
        for n in 3..=7 {
            assert!(stasheff_defect(&lp, n).unwrap().is_zero(), "n = {n}");
        }
        let g = gp(5, 1, 2);
        let lp = expected_loop_model(g, (0, 20), 5).unwrap();
        assert_eq!(lp.higher_arities(), vec![3]);
        for n in 3..=6 {
            assert!(stasheff_defect(&lp, n).unwrap().is_zero(), "n = {n}");
        }
    }

    #[test]
    fn oracle_values() {
        let g = gp(3, 1, 2);
        let m = expected_minimal_model(g, (-16, 0), 3).unwrap();
        let sp = m.space();
        let t = sp.find_label("t").unwrap();
        let xt = sp.find_label("x*t").unwrap();
        let v = m.eval_basis(&[t, xt, t]).unwrap();
        assert_eq!(sp.label(sp.id(v.deg, 0)), "x^3");
        assert_eq!(v.coeffs, vec![2]);
        let g = gp(7, 1, 3);
        let lp = expected_loop_model(g, (0, 40), 5).unwrap();
        let sp = lp.space();
        let xi = sp.find_label("xi").unwrap();
        let v = lp.eval_basis(&[xi; 5]).unwrap();
        assert_eq!(sp.label(sp.id(v.deg, 0)), "tau^7");
        assert_eq!(v.coeffs, vec![1]);
    }
}
