//! Differential graded algebras on finite windows, their contractions onto
//! cohomology, canonical Massey powers, and the cobar construction of a
//! minimal A∞-algebra.

use std::collections::{BTreeMap, HashMap};

use crate::ainf::AInfinityAlgebra;
use crate::error::{Error, Result};
use crate::glin::{
    choose_complement, greedy_extend, inverse, rank_nullspace, BasisId, Bidegree, Fp, GradedMap, GradedSpace,
    HVec, Matrix,
};

/// Sparse combination of basis elements, by global id.
pub type SparseVec = Vec<(BasisId, u32)>;

const D_SHIFT: Bidegree = Bidegree::new(-1, 0);

/// A DGA whose product and differential are given on basis elements.
///
/// The differential has bidegree `(-1, 0)` and satisfies
/// `d(ab) = d(a)b + (-1)^{|a|} a d(b)`.
pub trait DgAlgebra {
    fn space(&self) -> &GradedSpace;
    fn unit(&self) -> HVec;
    fn mul_basis(&self, a: BasisId, b: BasisId) -> Result<SparseVec>;
    fn diff_basis(&self, a: BasisId) -> Result<SparseVec>;

    fn prime(&self) -> Fp {
        self.space().prime()
    }

    fn mul(&self, x: &HVec, y: &HVec) -> Result<HVec> {
        let space = self.space();
        let fp = space.prime();
        let mut out = HVec::zero(space, x.deg + y.deg)?;
        for (i, a) in x.terms() {
            let ia = space.id(x.deg, i);
            for (j, b) in y.terms() {
                let jb = space.id(y.deg, j);
                let c = fp.mul(a, b);
                for (k, v) in self.mul_basis(ia, jb)? {
                    let (_, local) = space.locate(k);
                    out.coeffs[local] = fp.add(out.coeffs[local], fp.mul(c, v));
                }
            }
        }
        Ok(out)
    }

    fn diff(&self, x: &HVec) -> Result<HVec> {
        let space = self.space();
        let fp = space.prime();
        let mut out = HVec::zero(space, x.deg + D_SHIFT)?;
        for (i, a) in x.terms() {
            for (k, v) in self.diff_basis(space.id(x.deg, i))? {
                let (_, local) = space.locate(k);
                out.coeffs[local] = fp.add(out.coeffs[local], fp.mul(a, v));
            }
        }
        Ok(out)
    }

    /// Matrix of `d` from `deg` to `deg + (-1, 0)`.
    fn diff_matrix(&self, deg: Bidegree) -> Result<Matrix> {
        let space = self.space();
        let n = space.dim(deg)?;
        let m = space.dim(deg + D_SHIFT)?;
        let mut mat = Matrix::zeros(m, n);
        for j in 0..n {
            for (k, v) in self.diff_basis(space.id(deg, j))? {
                let (_, i) = space.locate(k);
                mat.set(i, j, self.prime().add(mat.get(i, j), v));
            }
        }
        Ok(mat)
    }
}

fn add_sparse(fp: Fp, acc: &mut BTreeMap<BasisId, u32>, v: &[(BasisId, u32)], c: u32) {
    for &(k, x) in v {
        let e = acc.entry(k).or_insert(0);
        *e = fp.add(*e, fp.mul(x, c));
    }
}

/// Sort and merge a list of terms, dropping zeros.
fn collect_terms(fp: Fp, v: &mut SparseVec) -> SparseVec {
    v.sort_unstable_by_key(|&(k, _)| k);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for &(k, c) in v.iter() {
        match out.last_mut() {
            Some((j, d)) if *j == k => *d = fp.add(*d, c),
            _ => out.push((k, c)),
        }
    }
    out.retain(|&(_, c)| c != 0);
    out
}

fn nonzero(acc: BTreeMap<BasisId, u32>) -> BTreeMap<BasisId, u32> {
    acc.into_iter().filter(|&(_, v)| v != 0).collect()
}

/// Verify `d∘d = 0`, the Leibniz rule on every basis pair whose product is
/// in the window, and that the unit is a two-sided identity.
pub fn check_dga(a: &dyn DgAlgebra) -> Result<()> {
    let space = a.space();
    let fp = a.prime();
    let n = space.total_dim();
    let in_win = |d: Bidegree| space.in_window(d);
    for x in 0..n {
        let dx = space.degree_of(x);
        if in_win(dx + D_SHIFT + D_SHIFT) {
            let mut acc = BTreeMap::new();
            for (y, c) in a.diff_basis(x)? {
                add_sparse(fp, &mut acc, &a.diff_basis(y)?, c);
            }
            if !nonzero(acc).is_empty() {
                return Err(Error::InvariantViolation(format!("d² ≠ 0 on {}", space.label(x))));
            }
        }
    }
    let u = a.unit();
    if u.deg != Bidegree::ZERO || !a.diff(&u)?.is_zero() {
        return Err(Error::InvariantViolation("unit is not a degree-zero cycle".into()));
    }
    for x in 0..n {
        let v = space.basis_vector(x);
        if a.mul(&u, &v)? != v || a.mul(&v, &u)? != v {
            return Err(Error::InvariantViolation(format!("unit fails on {}", space.label(x))));
        }
    }
    let diffs: Vec<SparseVec> = (0..n).map(|x| a.diff_basis(x)).collect::<Result<_>>()?;
    let degrees: Vec<Bidegree> = space.degrees().collect();
    let mut lhs: SparseVec = Vec::new();
    let mut rhs: SparseVec = Vec::new();
    for &p in &degrees {
        for &q in &degrees {
            let target = p + q + D_SHIFT;
            if !in_win(p + q) || !in_win(target) || !in_win(p + D_SHIFT) || !in_win(q + D_SHIFT) {
                continue;
            }
            let sign = fp.sign(p.s as i64);
            for i in 0..space.dim(p)? {
                let x = space.id(p, i);
                for j in 0..space.dim(q)? {
                    let y = space.id(q, j);
                    lhs.clear();
                    rhs.clear();
                    for (z, c) in a.mul_basis(x, y)? {
                        lhs.extend(diffs[z].iter().map(|&(w, v)| (w, fp.mul(v, c))));
                    }
                    for &(z, c) in &diffs[x] {
                        rhs.extend(a.mul_basis(z, y)?.into_iter().map(|(w, v)| (w, fp.mul(v, c))));
                    }
                    for &(z, c) in &diffs[y] {
                        let c = fp.mul(c, sign);
                        rhs.extend(a.mul_basis(x, z)?.into_iter().map(|(w, v)| (w, fp.mul(v, c))));
                    }
                    if lhs.is_empty() && rhs.is_empty() {
                        continue;
                    }
                    if collect_terms(fp, &mut lhs) != collect_terms(fp, &mut rhs) {
                        return Err(Error::InvariantViolation(format!(
                            "Leibniz fails on ({}, {})",
                            space.label(x),
                            space.label(y)
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// A DGA given by explicit structure constants; for small hand-built examples.
#[derive(Clone, Debug)]
pub struct TableDga {
    space: GradedSpace,
    unit: BasisId,
    mult: HashMap<(BasisId, BasisId), SparseVec>,
    diff: HashMap<BasisId, SparseVec>,
}

impl TableDga {
    /// Products not listed are zero, except those involving the unit.
    pub fn new(
        space: GradedSpace,
        unit: BasisId,
        mult: HashMap<(BasisId, BasisId), SparseVec>,
        diff: HashMap<BasisId, SparseVec>,
    ) -> Result<Self> {
        let dga = TableDga { space, unit, mult, diff };
        check_dga(&dga)?;
        Ok(dga)
    }
}

impl DgAlgebra for TableDga {
    fn space(&self) -> &GradedSpace {
        &self.space
    }
    fn unit(&self) -> HVec {
        self.space.basis_vector(self.unit)
    }
    fn mul_basis(&self, a: BasisId, b: BasisId) -> Result<SparseVec> {
        if a == self.unit {
            return Ok(vec![(b, 1)]);
        }
        if b == self.unit {
            return Ok(vec![(a, 1)]);
        }
        let deg = self.space.degree_of(a) + self.space.degree_of(b);
        if !self.space.in_window(deg) {
            return Err(Error::TruncationExceeded(deg));
        }
        Ok(self.mult.get(&(a, b)).cloned().unwrap_or_default())
    }
    fn diff_basis(&self, a: BasisId) -> Result<SparseVec> {
        Ok(self.diff.get(&a).cloned().unwrap_or_default())
    }
}

/// Strong deformation retract of a DGA onto its cohomology:
/// `π f = id`, `id - f π = dG + Gd`, `GG = 0`, `Gf = 0`, `πG = 0`.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub h: GradedSpace,
    pub embed: GradedMap,
    pub project: GradedMap,
    pub homotopy: GradedMap,
    /// Homological range on which `embed`, `project`, `homotopy` are defined.
    pub defined: (i32, i32),
}

impl Contraction {
    pub fn embed_vec(&self, a: &GradedSpace, v: &HVec) -> Result<HVec> {
        self.embed.apply(a.prime(), a, v, self.defined)
    }

    pub fn project_vec(&self, v: &HVec) -> Result<HVec> {
        self.project.apply(self.h.prime(), &self.h, v, self.defined)
    }

    pub fn homotopy_vec(&self, a: &GradedSpace, v: &HVec) -> Result<HVec> {
        self.homotopy.apply(a.prime(), a, v, self.defined)
    }

    /// Representative cocycle of an `H` basis element.
    pub fn embed_basis(&self, a: &GradedSpace, id: BasisId) -> Result<HVec> {
        self.embed_vec(a, &self.h.basis_vector(id))
    }
}

/// Build a contraction, block by block, with first-come pivoting:
/// cycles `Z` from the nullspace, a standard-vector complement `C` of `Z`,
/// boundaries `B = d(C)`, and cohomology representatives picked greedily
/// from the cycle basis.
pub fn contraction(a: &dyn DgAlgebra) -> Result<Contraction> {
    let space = a.space();
    let fp = a.prime();
    let (lo, hi) = space.window();
    let defined = (lo + 1, hi - 1);
    let mut cycles: BTreeMap<Bidegree, Vec<Vec<u32>>> = BTreeMap::new();
    let mut comps: BTreeMap<Bidegree, Vec<Vec<u32>>> = BTreeMap::new();
    let mut dcomps: BTreeMap<Bidegree, Vec<Vec<u32>>> = BTreeMap::new();
    for deg in space.degrees() {
        if deg.s < lo + 1 {
            continue;
        }
        let n = space.dim(deg)?;
        let d = a.diff_matrix(deg)?;
        let rr = rank_nullspace(fp, &d);
        let c = choose_complement(fp, &rr.nullspace, n);
        dcomps.insert(deg, c.iter().map(|v| d.mul_vec(fp, v)).collect());
        comps.insert(deg, c);
        cycles.insert(deg, rr.nullspace);
    }
    let mut h_blocks = BTreeMap::new();
    let mut embed = GradedMap::new(Bidegree::ZERO);
    let mut project = GradedMap::new(Bidegree::ZERO);
    let mut homotopy = GradedMap::new(Bidegree::new(1, 0));
    for deg in space.degrees() {
        if deg.s < defined.0 || deg.s > defined.1 {
            continue;
        }
        let n = space.dim(deg)?;
        let up = deg + Bidegree::new(1, 0);
        let b: Vec<Vec<u32>> = dcomps.get(&up).cloned().unwrap_or_default();
        let z = &cycles[&deg];
        let hidx = greedy_extend(fp, n, &b, z);
        let hreps: Vec<Vec<u32>> = hidx.iter().map(|&i| z[i].clone()).collect();
        if b.len() + hreps.len() != z.len() {
            return Err(Error::InvariantViolation(format!("boundaries not inside cycles at {deg}")));
        }
        let c = &comps[&deg];
        let mut cols = b.clone();
        cols.extend(hreps.iter().cloned());
        cols.extend(c.iter().cloned());
        let m = Matrix::from_columns(n, &cols);
        let minv = inverse(fp, &m).ok_or_else(|| Error::InvariantViolation(format!("splitting at {deg} is singular")))?;
        let (nb, nh) = (b.len(), hreps.len());
        if nh > 0 {
            h_blocks.insert(deg, (0..nh).map(|k| format!("h_{}_{}_{}", deg.s, deg.w, k)).collect::<Vec<_>>());
            embed.blocks.insert(deg, Matrix::from_columns(n, &hreps));
            let rows: Vec<Vec<u32>> = (nb..nb + nh).map(|r| minv.row(r).to_vec()).collect();
            project.blocks.insert(deg, Matrix::from_rows(n, &rows));
        }
        if nb > 0 {
            let cup = &comps[&up];
            let brows: Vec<Vec<u32>> = (0..nb).map(|r| minv.row(r).to_vec()).collect();
            let lift = Matrix::from_columns(space.dim(up)?, cup);
            homotopy.blocks.insert(deg, lift.mul(fp, &Matrix::from_rows(n, &brows)));
        }
    }
    let h = GradedSpace::new(fp, defined, h_blocks)?;
    Ok(Contraction { h, embed, project, homotopy, defined })
}

/// Check the five SDR identities as matrix equations on every block where
/// all the maps involved are defined.
pub fn verify_contraction(a: &dyn DgAlgebra, c: &Contraction) -> Result<()> {
    let space = a.space();
    let fp = a.prime();
    let zero = |r: usize, k: usize| Matrix::zeros(r, k);
    let block = |map: &GradedMap, deg: Bidegree, rows: usize, cols: usize| {
        map.blocks.get(&deg).cloned().unwrap_or_else(|| zero(rows, cols))
    };
    for deg in space.degrees().chain(c.h.degrees()) {
        if deg.s < c.defined.0 || deg.s > c.defined.1 {
            continue;
        }
        let n = space.dim(deg)?;
        let nh = c.h.dim(deg)?;
        let f = block(&c.embed, deg, n, nh);
        let p = block(&c.project, deg, nh, n);
        if p.mul(fp, &f) != Matrix::identity(nh) {
            return Err(Error::InvariantViolation(format!("π∘f ≠ id at {deg}")));
        }
        let up = deg + Bidegree::new(1, 0);
        let dn = deg + D_SHIFT;
        let g = block(&c.homotopy, deg, space.dim(up).unwrap_or(0), n);
        if !g.mul(fp, &f).is_zero() {
            return Err(Error::InvariantViolation(format!("G∘f ≠ 0 at {deg}")));
        }
        if space.in_window(up) && up.s <= c.defined.1 {
            let nu = space.dim(up)?;
            let gu = block(&c.homotopy, up, space.dim(up + Bidegree::new(1, 0)).unwrap_or(0), nu);
            if !gu.mul(fp, &g).is_zero() {
                return Err(Error::InvariantViolation(format!("G∘G ≠ 0 at {deg}")));
            }
            let pu = block(&c.project, up, c.h.dim(up)?, nu);
            if !pu.mul(fp, &g).is_zero() {
                return Err(Error::InvariantViolation(format!("π∘G ≠ 0 at {deg}")));
            }
        }
        if dn.s >= c.defined.0 && space.in_window(up) {
            let nd = space.dim(dn)?;
            let d_here = a.diff_matrix(deg)?;
            let d_up = a.diff_matrix(up)?;
            let g_dn = block(&c.homotopy, dn, n, nd);
            let lhs = Matrix::identity(n).sub(fp, &f.mul(fp, &p));
            let rhs = d_up.mul(fp, &g).add(fp, &g_dn.mul(fp, &d_here));
            if lhs != rhs {
                return Err(Error::InvariantViolation(format!("id − fπ ≠ dG + Gd at {deg}")));
            }
        }
    }
    Ok(())
}

/// Outcome of a canonical Massey power computation.
#[derive(Clone, Debug)]
pub struct MasseyResult {
    /// Class of the final cocycle, in the contraction's `H` basis.
    pub value: HVec,
    pub log: Vec<String>,
    /// Set when products of lower-stage classes could meet the target degree.
    pub indeterminacy: bool,
}

fn bar(fp: Fp, v: &HVec) -> HVec {
    v.scaled(fp, fp.sign(1 + v.deg.s as i64))
}

/// `⟨c, …, c⟩` (`nfold` copies) via the defining system
/// `a_{ij} = G(Σ_k ā_{ik} a_{kj})`, `a_{i,i+1} = f(c)`, with `ā = (-1)^{1+|a|} a`.
/// Entries depend only on `j - i`, so one vector per length is kept.
pub fn massey_power(a: &dyn DgAlgebra, c: &Contraction, cls: &HVec, nfold: usize) -> Result<MasseyResult> {
    let space = a.space();
    let fp = a.prime();
    if nfold < 2 {
        return Err(Error::InvalidParameters("Massey powers need at least two factors".into()));
    }
    let first = c.embed_vec(space, cls)?;
    let mut entries: Vec<HVec> = vec![first];
    let mut log = vec![format!("stage 1: representative in {}", cls.deg)];
    let mut value = None;
    for len in 2..=nfold {
        let mut z: Option<HVec> = None;
        for k in 1..len {
            let left = bar(fp, &entries[k - 1]);
            let prod = a.mul(&left, &entries[len - k - 1])?;
            match z.as_mut() {
                None => z = Some(prod),
                Some(acc) => acc.add_scaled(fp, &prod, 1),
            }
        }
        let z = z.expect("len ≥ 2");
        if !a.diff(&z)?.is_zero() {
            return Err(Error::InvariantViolation(format!("stage {len} sum is not a cocycle")));
        }
        let class = c.project_vec(&z)?;
        if len == nfold {
            log.push(format!("stage {len}: value {:?} in {}", class.coeffs, class.deg));
            value = Some(class);
            break;
        }
        if !class.is_zero() {
            log.push(format!("stage {len}: nonzero class {:?}", class.coeffs));
            return Err(Error::UndefinedMassey { stage: len });
        }
        log.push(format!("stage {len}: vanishes, bounded by G"));
        entries.push(c.homotopy_vec(space, &z)?);
    }
    let value = value.expect("loop reaches nfold");
    let indeterminacy = massey_indeterminacy(a, c, cls.deg, nfold)?;
    Ok(MasseyResult { value, log, indeterminacy })
}

/// Whether `H_{D(k)} · H_{D(n-k)}` meets the target for some `k`, where
/// `D(k) = k|c| + (k-1, 0)` is the degree of a length-`k` defining entry.
fn massey_indeterminacy(a: &dyn DgAlgebra, c: &Contraction, deg: Bidegree, n: usize) -> Result<bool> {
    let entry_deg = |k: usize| deg.scale(k as i32) + Bidegree::new(k as i32 - 1, 0);
    for k in 1..n {
        let (d1, d2) = (entry_deg(k), entry_deg(n - k));
        let (Ok(n1), Ok(n2)) = (c.h.dim(d1), c.h.dim(d2)) else { continue };
        for i in 0..n1 {
            for j in 0..n2 {
                let x = c.embed_basis(a.space(), c.h.id(d1, i))?;
                let y = c.embed_basis(a.space(), c.h.id(d2, j))?;
                for (u, v) in [(&x, &y), (&y, &x)] {
                    let prod = a.mul(u, v)?;
                    if c.h.in_window(prod.deg) && !c.project_vec(&prod)?.is_zero() {
                        return Ok(true);
                    }
                }
            }
        }
    }
    Ok(false)
}

/// The cobar construction of a strictly unital minimal A∞-algebra `M`:
/// the tensor algebra on generators `[α]`, one per reduced basis element
/// `α` of `M`, in bidegree `(-|α|_s - 1, |α|_w)`, with differential
///
/// `d[α] = Σ_N Σ_β (-1)^{Σ_i (N-i)(|β_i|+1)} ⟨α, m_N(β_1,…,β_N)⟩ [β_1]⋯[β_N]`
///
/// extended as a derivation. This is the transpose of the bar differential,
/// so `d² = 0` holds exactly when `M` satisfies the Stasheff identities.
#[derive(Clone, Debug)]
pub struct Cobar {
    space: GradedSpace,
    words: Vec<Vec<u16>>,
    lookup: HashMap<Vec<u16>, BasisId>,
    gen_degrees: Vec<Bidegree>,
    gen_labels: Vec<String>,
    gen_diff: Vec<Vec<(u32, Vec<u16>)>>,
    unit: BasisId,
}

impl Cobar {
    pub fn new(m: &AInfinityAlgebra, window: (i32, i32)) -> Result<Self> {
        if !m.is_minimal() {
            return Err(Error::NotMinimal("cobar input has nonzero m_1".into()));
        }
        let fp = m.prime();
        let msp = m.space();
        let shift = |d: Bidegree| Bidegree::new(-d.s - 1, d.w);
        // generators in range, and their sign
        let mut gens: Vec<BasisId> = Vec::new();
        let mut positive = None;
        for b in m.reduced_basis() {
            let g = shift(msp.degree_of(b));
            if g.s == 0 {
                return Err(Error::ShapeMismatch(format!("generator [{}] in degree 0", msp.label(b))));
            }
            let sign = g.s > 0;
            if *positive.get_or_insert(sign) != sign {
                return Err(Error::ShapeMismatch("cobar generators of both signs".into()));
            }
            if g.s >= window.0 && g.s <= window.1 {
                gens.push(b);
            }
        }
        let positive = positive.unwrap_or(true);
        // generators just outside the window would be missed silently if M's window were too small
        let needed_edge = if positive { -window.1 - 1 } else { -window.0 - 1 };
        let (mlo, mhi) = msp.window();
        if needed_edge < mlo || needed_edge > mhi {
            return Err(Error::TruncationExceeded(Bidegree::new(needed_edge, 0)));
        }
        let gen_degrees: Vec<Bidegree> = gens.iter().map(|&b| shift(msp.degree_of(b))).collect();
        let gen_labels: Vec<String> = gens.iter().map(|&b| format!("[{}]", msp.label(b))).collect();
        let min_abs = gen_degrees.iter().map(|d| d.s.abs()).min().unwrap_or(1);
        let reach = if positive { window.1 } else { -window.0 };
        let max_len = (reach - 1).max(0) / min_abs.max(1);
        if (max_len as usize) > m.arity_bound() {
            return Err(Error::ArityExceeded { arity: max_len as usize, bound: m.arity_bound() });
        }
        let gen_index: HashMap<BasisId, u16> = gens.iter().enumerate().map(|(i, &b)| (b, i as u16)).collect();

        let mut gen_diff: Vec<Vec<(u32, Vec<u16>)>> = vec![Vec::new(); gens.len()];
        for op in m.ops() {
            if op.arity < 2 {
                continue;
            }
            for (word, out) in &op.table {
                if m.unit().is_some_and(|u| word.contains(&u)) {
                    continue;
                }
                let Some(betas) = word.iter().map(|b| gen_index.get(b).copied()).collect::<Option<Vec<u16>>>() else {
                    continue;
                };
                let n = word.len() as i64;
                let e: i64 = word
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| (n - 1 - i as i64) * (msp.degree_of(b).s as i64 + 1))
                    .sum();
                let sign = fp.sign(e);
                for (i, c) in out.terms() {
                    let alpha = msp.id(out.deg, i);
                    if let Some(&g) = gen_index.get(&alpha) {
                        gen_diff[g as usize].push((fp.mul(c, sign), betas.clone()));
                    }
                }
            }
        }

        // enumerate words by degree
        let mut blocks: BTreeMap<Bidegree, Vec<Vec<u16>>> = BTreeMap::new();
        let mut stack: Vec<(Vec<u16>, Bidegree)> = vec![(Vec::new(), Bidegree::ZERO)];
        while let Some((w, d)) = stack.pop() {
            blocks.entry(d).or_default().push(w.clone());
            for (g, &gd) in gen_degrees.iter().enumerate() {
                let nd = d + gd;
                if nd.s >= window.0 && nd.s <= window.1 {
                    let mut nw = w.clone();
                    nw.push(g as u16);
                    stack.push((nw, nd));
                }
            }
        }
        let mut labelled = BTreeMap::new();
        let mut words = Vec::new();
        for (d, mut ws) in blocks {
            ws.sort();
            let labels = ws
                .iter()
                .map(|w| {
                    if w.is_empty() {
                        "1".to_string()
                    } else {
                        w.iter().map(|&g| gen_labels[g as usize].as_str()).collect::<Vec<_>>().join("")
                    }
                })
                .collect();
            labelled.insert(d, labels);
            words.extend(ws);
        }
        let space = GradedSpace::new(fp, window, labelled)?;
        let lookup: HashMap<Vec<u16>, BasisId> = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let unit = lookup[&Vec::new()];
        let cobar = Cobar { space, words, lookup, gen_degrees, gen_labels, gen_diff, unit };
        cobar.check_square_zero()?;
        Ok(cobar)
    }

    pub fn generators(&self) -> &[String] {
        &self.gen_labels
    }

    pub fn generator_degrees(&self) -> &[Bidegree] {
        &self.gen_degrees
    }

    /// Basis id of a word of generator indices.
    pub fn word_id(&self, word: &[u16]) -> Option<BasisId> {
        self.lookup.get(word).copied()
    }

    pub fn generator_id(&self, label: &str) -> Option<BasisId> {
        let g = self.gen_labels.iter().position(|l| l == label)?;
        self.word_id(&[g as u16])
    }

    /// `d² = 0` on generators certifies the Stasheff identities of the input.
    fn check_square_zero(&self) -> Result<()> {
        let fp = self.prime();
        for g in 0..self.gen_degrees.len() {
            let id = self.lookup[&vec![g as u16]];
            let d = self.space.degree_of(id);
            if !self.space.in_window(d + D_SHIFT + D_SHIFT) {
                continue;
            }
            let mut acc = BTreeMap::new();
            for (y, c) in self.diff_basis(id)? {
                add_sparse(fp, &mut acc, &self.diff_basis(y)?, c);
            }
            if let Some((&w, _)) = nonzero(acc).iter().next() {
                return Err(Error::StasheffViolation(format!(
                    "d² ≠ 0 on {} (term {}): the input violates a Stasheff identity",
                    self.gen_labels[g],
                    self.space.label(w)
                )));
            }
        }
        Ok(())
    }
}

impl DgAlgebra for Cobar {
    fn space(&self) -> &GradedSpace {
        &self.space
    }

    fn unit(&self) -> HVec {
        self.space.basis_vector(self.unit)
    }

    fn mul_basis(&self, a: BasisId, b: BasisId) -> Result<SparseVec> {
        let mut w = self.words[a].clone();
        w.extend_from_slice(&self.words[b]);
        match self.lookup.get(&w) {
            Some(&id) => Ok(vec![(id, 1)]),
            None => Err(Error::TruncationExceeded(self.space.degree_of(a) + self.space.degree_of(b))),
        }
    }

    fn diff_basis(&self, a: BasisId) -> Result<SparseVec> {
        let fp = self.prime();
        let word = &self.words[a];
        let mut acc: BTreeMap<BasisId, u32> = BTreeMap::new();
        let mut before = 0i64;
        for (pos, &g) in word.iter().enumerate() {
            let sign = fp.sign(before);
            for (c, repl) in &self.gen_diff[g as usize] {
                let mut w = word[..pos].to_vec();
                w.extend_from_slice(repl);
                w.extend_from_slice(&word[pos + 1..]);
                let id = *self
                    .lookup
                    .get(&w)
                    .ok_or_else(|| Error::TruncationExceeded(self.space.degree_of(a) + D_SHIFT))?;
                let e = acc.entry(id).or_insert(0);
                *e = fp.add(*e, fp.mul(*c, sign));
            }
            before += self.gen_degrees[g as usize].s as i64;
        }
        Ok(nonzero(acc).into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u32) -> Fp {
        Fp::new(p).unwrap()
    }

    /// `k·1 ⊕ (k·u → k·v)` with `d u = v`, `|u| = (-1,0)`, `|v| = (-2,0)`, all products zero.
    fn acyclic_pair() -> TableDga {
        let f = fp(5);
        let mut blocks = BTreeMap::new();
        blocks.insert(Bidegree::ZERO, vec!["1".to_string()]);
        blocks.insert(Bidegree::new(-1, 0), vec!["u".to_string()]);
        blocks.insert(Bidegree::new(-2, 0), vec!["v".to_string()]);
        let space = GradedSpace::new(f, (-3, 1), blocks).unwrap();
        let u = space.id(Bidegree::new(-1, 0), 0);
        let v = space.id(Bidegree::new(-2, 0), 0);
        let mut diff = HashMap::new();
        diff.insert(u, vec![(v, 1)]);
        let one = space.find_label("1").unwrap();
        TableDga::new(space, one, HashMap::new(), diff).unwrap()
    }

    #[test]
    fn two_term_complex_is_contractible() {
        let a = acyclic_pair();
        let c = contraction(&a).unwrap();
        verify_contraction(&a, &c).unwrap();
        assert_eq!(c.h.total_dim(), 1);
        let sp = a.space();
        let v = sp.basis_vector(sp.find_label("v").unwrap());
        let gv = c.homotopy_vec(sp, &v).unwrap();
        assert_eq!(gv, sp.basis_vector(sp.find_label("u").unwrap()));
    }

    #[test]
    fn zero_differential_gives_identity_contraction() {
        let f = fp(3);
        let mut blocks = BTreeMap::new();
        blocks.insert(Bidegree::ZERO, vec!["1".to_string()]);
        blocks.insert(Bidegree::new(-1, 1), vec!["a".to_string(), "b".to_string()]);
        let space = GradedSpace::new(f, (-3, 1), blocks).unwrap();
        let one = space.find_label("1").unwrap();
        let a = TableDga::new(space, one, HashMap::new(), HashMap::new()).unwrap();
        let c = contraction(&a).unwrap();
        verify_contraction(&a, &c).unwrap();
        assert_eq!(c.h.total_dim(), 3);
        assert!(c.homotopy.blocks.is_empty());
        assert_eq!(c.embed.blocks[&Bidegree::new(-1, 1)], Matrix::identity(2));
    }

    #[test]
    fn broken_leibniz_is_rejected() {
        let f = fp(5);
        let mut blocks = BTreeMap::new();
        blocks.insert(Bidegree::ZERO, vec!["1".to_string()]);
        blocks.insert(Bidegree::new(-1, 0), vec!["u".to_string()]);
        blocks.insert(Bidegree::new(-2, 0), vec!["v".to_string(), "uu".to_string()]);
        blocks.insert(Bidegree::new(-3, 0), vec!["w".to_string()]);
        let space = GradedSpace::new(f, (-4, 1), blocks).unwrap();
        let id = |s: i32, i: usize| space.id(Bidegree::new(s, 0), i);
        let (u, uu, w) = (id(-1, 0), id(-2, 1), id(-3, 0));
        let mut mult = HashMap::new();
        mult.insert((u, u), vec![(uu, 1)]);
        let mut diff = HashMap::new();
        // d(uu) should be 0 since du = 0; setting it to w breaks Leibniz
        diff.insert(uu, vec![(w, 1)]);
        assert!(matches!(
            TableDga::new(space.clone(), space.find_label("1").unwrap(), mult, diff),
            Err(Error::InvariantViolation(_))
        ));
    }

    #[test]
    fn massey_square_of_odd_class_is_its_square() {
        let f = fp(3);
        let mut blocks = BTreeMap::new();
        blocks.insert(Bidegree::ZERO, vec!["1".to_string()]);
        blocks.insert(Bidegree::new(-1, 1), vec!["t".to_string()]);
        let space = GradedSpace::new(f, (-3, 1), blocks).unwrap();
        let one = space.find_label("1").unwrap();
        let a = TableDga::new(space, one, HashMap::new(), HashMap::new()).unwrap();
        let c = contraction(&a).unwrap();
        let t = c.h.basis_vector(c.h.id(Bidegree::new(-1, 1), 0));
        let r = massey_power(&a, &c, &t, 2).unwrap();
        assert!(r.value.is_zero());
        assert_eq!(r.value.deg, Bidegree::new(-2, 2));
    }
}
