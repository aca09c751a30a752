//! Exact linear algebra over a prime field, and the bigraded vector spaces
//! every other module is built on.
//!
//! Internal degrees are stored as integers in units of `1/q`, so the
//! generator `U` of the radical has internal degree 1.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The prime field `F_p`. Elements are residues in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fp {
    p: u32,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Fp {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidParameters(format!("{p} is not prime")));
        }
        Ok(Fp { p })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    /// `a^e` for a possibly negative exponent, `a` nonzero.
    pub fn pow_signed(self, a: u32, e: i64) -> u32 {
        if e >= 0 {
            self.pow(a, e as u64)
        } else {
            self.inv(self.pow(a, e.unsigned_abs()))
        }
    }

    #[inline]
    pub fn reduce(self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    /// `(-1)^e` as a residue.
    #[inline]
    pub fn sign(self, e: i64) -> u32 {
        if e.rem_euclid(2) == 0 {
            1 % self.p
        } else {
            self.p - 1
        }
    }

    /// The symmetric lift of a residue, in `(-p/2, p/2]`.
    pub fn lift(self, a: u32) -> i64 {
        let a = a as i64;
        let p = self.p as i64;
        if a > p / 2 {
            a - p
        } else {
            a
        }
    }
}

/// `(homological degree, internal degree in units of 1/q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bidegree {
    pub s: i32,
    pub w: i32,
}

impl Bidegree {
    pub const ZERO: Bidegree = Bidegree { s: 0, w: 0 };

    pub const fn new(s: i32, w: i32) -> Self {
        Bidegree { s, w }
    }

    pub fn scale(self, k: i32) -> Self {
        Bidegree::new(self.s * k, self.w * k)
    }
}

impl Add for Bidegree {
    type Output = Bidegree;
    fn add(self, o: Bidegree) -> Bidegree {
        Bidegree::new(self.s + o.s, self.w + o.w)
    }
}

impl AddAssign for Bidegree {
    fn add_assign(&mut self, o: Bidegree) {
        self.s += o.s;
        self.w += o.w;
    }
}

impl Sub for Bidegree {
    type Output = Bidegree;
    fn sub(self, o: Bidegree) -> Bidegree {
        Bidegree::new(self.s - o.s, self.w - o.w)
    }
}

impl Neg for Bidegree {
    type Output = Bidegree;
    fn neg(self) -> Bidegree {
        Bidegree::new(-self.s, -self.w)
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.s, self.w)
    }
}

/// Dense row-major matrix of residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[Vec<u32>]) -> Self {
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    pub fn from_columns(rows: usize, cols: &[Vec<u32>]) -> Self {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn mul_vec(&self, fp: Fp, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = fp.p() as u64;
        (0..self.rows)
            .map(|i| {
                let acc = self
                    .row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p);
                acc as u32
            })
            .collect()
    }

    pub fn mul(&self, fp: Fp, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let v = fp.add(out.get(i, j), fp.mul(a, b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, fp: Fp, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| fp.sub(a, b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn add(&self, fp: Fp, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| fp.add(a, b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    /// Bring to reduced row echelon form in place; returns pivot columns.
    /// Pivot choice is the first nonzero entry in basis order.
    fn rref_in_place(&mut self, fp: Fp, ncols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, r * self.cols + j);
                }
            }
            let inv = fp.inv(self.get(r, c));
            for j in 0..self.cols {
                let v = fp.mul(self.get(r, j), inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c);
                if f == 0 {
                    continue;
                }
                for j in 0..self.cols {
                    let v = fp.sub(self.get(i, j), fp.mul(f, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }
}

/// Output of [`rank_nullspace`].
#[derive(Clone, Debug)]
pub struct RowReduction {
    pub rank: usize,
    pub pivots: Vec<usize>,
    /// The nonzero rows of the reduced row echelon form.
    pub rref: Matrix,
    pub nullspace: Vec<Vec<u32>>,
}

impl RowReduction {
    fn nullity(&self, cols: usize) -> usize {
        cols - self.rank
    }
}

pub fn rank_nullspace(fp: Fp, m: &Matrix) -> RowReduction {
    let mut a = m.clone();
    let pivots = a.rref_in_place(fp, m.cols());
    let rank = pivots.len();
    let mut nullspace = Vec::new();
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; m.cols()];
        for &c in &pivots {
            v[c] = true;
        }
        v
    };
    for free in (0..m.cols()).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u32; m.cols()];
        v[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = fp.neg(a.get(r, free));
        }
        nullspace.push(v);
    }
    let rref = Matrix::from_rows(m.cols(), &(0..rank).map(|r| a.row(r).to_vec()).collect::<Vec<_>>());
    let out = RowReduction { rank, pivots, rref, nullspace };
    debug_assert_eq!(out.nullity(m.cols()), out.nullspace.len());
    out
}

/// Solve `M x = b`; `None` certifies unsolvability.
pub fn solve(fp: Fp, m: &Matrix, b: &[u32]) -> Option<Vec<u32>> {
    assert_eq!(b.len(), m.rows());
    let mut aug = Matrix::zeros(m.rows(), m.cols() + 1);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            aug.set(i, j, m.get(i, j));
        }
        aug.set(i, m.cols(), b[i]);
    }
    let pivots = aug.rref_in_place(fp, m.cols() + 1);
    if pivots.last() == Some(&m.cols()) {
        return None;
    }
    let mut x = vec![0u32; m.cols()];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug.get(r, m.cols());
    }
    Some(x)
}

pub fn inverse(fp: Fp, m: &Matrix) -> Option<Matrix> {
    let n = m.rows();
    if n != m.cols() {
        return None;
    }
    let mut aug = Matrix::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, m.get(i, j));
        }
        aug.set(i, n + i, 1);
    }
    let pivots = aug.rref_in_place(fp, n);
    if pivots.len() != n {
        return None;
    }
    let mut inv = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv.set(i, j, aug.get(i, n + j));
        }
    }
    Some(inv)
}

/// Incrementally maintained echelon basis of a subspace of `F_p^dim`.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    fp: Fp,
    dim: usize,
    rows: Vec<(usize, Vec<u32>)>,
}

impl EchelonBasis {
    pub fn new(fp: Fp, dim: usize) -> Self {
        EchelonBasis { fp, dim, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &mut [u32]) {
        for (pc, row) in &self.rows {
            let f = v[*pc];
            if f != 0 {
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = self.fp.sub(*x, self.fp.mul(f, r));
                }
            }
        }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Adds `v` to the span; returns whether the rank went up.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut w = v.to_vec();
        self.reduce(&mut w);
        match w.iter().position(|&x| x != 0) {
            None => false,
            Some(pc) => {
                let inv = self.fp.inv(w[pc]);
                for x in w.iter_mut() {
                    *x = self.fp.mul(*x, inv);
                }
                self.rows.push((pc, w));
                true
            }
        }
    }
}

/// Greedily pick, in order, the candidates that are independent modulo
/// `span(base)` and of each other. Returns their indices.
pub fn greedy_extend(fp: Fp, dim: usize, base: &[Vec<u32>], candidates: &[Vec<u32>]) -> Vec<usize> {
    let mut ech = EchelonBasis::new(fp, dim);
    for b in base {
        ech.insert(b);
    }
    candidates
        .iter()
        .enumerate()
        .filter_map(|(i, c)| ech.insert(c).then_some(i))
        .collect()
}

/// A complement of `span(w)` in `F_p^dim` made of standard basis vectors,
/// chosen first-come in basis order.
pub fn choose_complement(fp: Fp, w: &[Vec<u32>], dim: usize) -> Vec<Vec<u32>> {
    let standard: Vec<Vec<u32>> = (0..dim)
        .map(|j| {
            let mut e = vec![0u32; dim];
            e[j] = 1;
            e
        })
        .collect();
    greedy_extend(fp, dim, w, &standard).into_iter().map(|j| standard[j].clone()).collect()
}

pub fn rank_of(fp: Fp, dim: usize, vectors: &[Vec<u32>]) -> usize {
    let mut ech = EchelonBasis::new(fp, dim);
    vectors.iter().filter(|v| ech.insert(v)).count()
}

/// A finite window of a bigraded vector space with labelled basis blocks.
///
/// Bidegrees whose homological degree lies outside `window` are unknown,
/// not zero; asking for them yields [`Error::TruncationExceeded`].
/// Bidegrees inside the window without a block are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    prime: Fp,
    window: (i32, i32),
    blocks: BTreeMap<Bidegree, Vec<String>>,
    offsets: BTreeMap<Bidegree, usize>,
    index: Vec<(Bidegree, usize)>,
}

pub type BasisId = usize;

impl GradedSpace {
    pub fn new(prime: Fp, window: (i32, i32), blocks: BTreeMap<Bidegree, Vec<String>>) -> Result<Self> {
        let mut offsets = BTreeMap::new();
        let mut index = Vec::new();
        let mut blocks = blocks;
        blocks.retain(|_, v| !v.is_empty());
        for (&deg, labels) in &blocks {
            if deg.s < window.0 || deg.s > window.1 {
                return Err(Error::InvariantViolation(format!("block {deg} lies outside window {window:?}")));
            }
            offsets.insert(deg, index.len());
            index.extend((0..labels.len()).map(|i| (deg, i)));
        }
        Ok(GradedSpace { prime, window, blocks, offsets, index })
    }

    pub fn prime(&self) -> Fp {
        self.prime
    }

    pub fn window(&self) -> (i32, i32) {
        self.window
    }

    pub fn in_window(&self, deg: Bidegree) -> bool {
        deg.s >= self.window.0 && deg.s <= self.window.1
    }

    pub fn dim(&self, deg: Bidegree) -> Result<usize> {
        if !self.in_window(deg) {
            return Err(Error::TruncationExceeded(deg));
        }
        Ok(self.blocks.get(&deg).map_or(0, Vec::len))
    }

    pub fn total_dim(&self) -> usize {
        self.index.len()
    }

    pub fn degrees(&self) -> impl Iterator<Item = Bidegree> + '_ {
        self.blocks.keys().copied()
    }

    pub fn labels(&self, deg: Bidegree) -> &[String] {
        self.blocks.get(&deg).map_or(&[], Vec::as_slice)
    }

    pub fn id(&self, deg: Bidegree, local: usize) -> BasisId {
        self.offsets[&deg] + local
    }

    pub fn locate(&self, id: BasisId) -> (Bidegree, usize) {
        self.index[id]
    }

    pub fn degree_of(&self, id: BasisId) -> Bidegree {
        self.index[id].0
    }

    pub fn label(&self, id: BasisId) -> &str {
        let (d, i) = self.index[id];
        &self.blocks[&d][i]
    }

    pub fn find_label(&self, label: &str) -> Option<BasisId> {
        (0..self.total_dim()).find(|&id| self.label(id) == label)
    }

    pub fn basis_vector(&self, id: BasisId) -> HVec {
        let (deg, i) = self.index[id];
        let mut v = HVec::zero(self, deg).expect("basis degree is in window");
        v.coeffs[i] = 1;
        v
    }

    /// Bigraded Poincaré data: bidegree → dimension.
    pub fn poincare(&self) -> BTreeMap<Bidegree, usize> {
        self.blocks.iter().map(|(&d, v)| (d, v.len())).collect()
    }
}

/// A homogeneous vector: a bidegree plus coordinates in that block.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HVec {
    pub deg: Bidegree,
    pub coeffs: Vec<u32>,
}

impl HVec {
    pub fn zero(space: &GradedSpace, deg: Bidegree) -> Result<Self> {
        Ok(HVec { deg, coeffs: vec![0; space.dim(deg)?] })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add_scaled(&mut self, fp: Fp, other: &HVec, c: u32) {
        debug_assert_eq!(self.deg, other.deg);
        if c == 0 {
            return;
        }
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = fp.add(*a, fp.mul(b, c));
        }
    }

    pub fn scaled(&self, fp: Fp, c: u32) -> HVec {
        HVec { deg: self.deg, coeffs: self.coeffs.iter().map(|&a| fp.mul(a, c)).collect() }
    }

    /// Nonzero entries as `(local index, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c))
    }
}

/// A bigraded linear map given by matrices per source bidegree.
/// Missing blocks are zero maps.
#[derive(Clone, Debug)]
pub struct GradedMap {
    pub shift: Bidegree,
    pub blocks: BTreeMap<Bidegree, Matrix>,
}

impl GradedMap {
    pub fn new(shift: Bidegree) -> Self {
        GradedMap { shift, blocks: BTreeMap::new() }
    }

    /// Applies the map; `source`/`target` supply block dimensions.
    /// Fails if `v` lies outside the region where the map is defined.
    pub fn apply(&self, fp: Fp, target: &GradedSpace, v: &HVec, defined: (i32, i32)) -> Result<HVec> {
        if v.deg.s < defined.0 || v.deg.s > defined.1 {
            return Err(Error::TruncationExceeded(v.deg));
        }
        let deg = v.deg + self.shift;
        match self.blocks.get(&v.deg) {
            Some(m) => Ok(HVec { deg, coeffs: m.mul_vec(fp, &v.coeffs) }),
            None => HVec::zero(target, deg),
        }
    }

    /// `self ∘ other`, blockwise.
    pub fn compose(&self, fp: Fp, other: &GradedMap, mid: &GradedSpace, target: &GradedSpace) -> Result<GradedMap> {
        let mut out = GradedMap::new(self.shift + other.shift);
        for (&d, m) in &other.blocks {
            let e = d + other.shift;
            if let Some(n) = self.blocks.get(&e) {
                debug_assert_eq!(n.cols(), mid.dim(e)?);
                let _ = target;
                out.blocks.insert(d, n.mul(fp, m));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fp(p: u32) -> Fp {
        Fp::new(p).unwrap()
    }

    /// Independent oracle: forward elimination only, no RREF bookkeeping.
    fn oracle_rank(p: u32, rows: &[Vec<u32>]) -> usize {
        let p = p as i64;
        let mut m: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
        let ncols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..ncols {
            let Some(pr) = (rank..m.len()).find(|&i| m[i][c] % p != 0) else { continue };
            m.swap(rank, pr);
            for i in rank + 1..m.len() {
                let (a, b) = (m[i][c], m[rank][c]);
                for j in 0..ncols {
                    m[i][j] = (m[i][j] * b - m[rank][j] * a).rem_euclid(p);
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn zero_and_identity() {
        let f = fp(5);
        let r = rank_nullspace(f, &Matrix::zeros(3, 3));
        assert_eq!((r.rank, r.nullspace.len()), (0, 3));
        let r = rank_nullspace(fp(3), &Matrix::identity(4));
        assert_eq!((r.rank, r.nullspace.len()), (4, 0));
        let r = rank_nullspace(f, &Matrix::zeros(0, 0));
        assert_eq!(r.rank, 0);
    }

    #[test]
    fn random_rank_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = fp(7);
        for _ in 0..200 {
            let rows: Vec<Vec<u32>> = (0..6)
                .map(|_| (0..6).map(|_| if rng.gen_bool(0.4) { 0 } else { rng.gen_range(0..7) }).collect())
                .collect();
            let m = Matrix::from_rows(6, &rows);
            let r = rank_nullspace(f, &m);
            assert_eq!(r.rank, oracle_rank(7, &rows));
            assert_eq!(r.rank, rank_nullspace(f, &m.transpose()).rank);
            for v in &r.nullspace {
                assert!(m.mul_vec(f, v).iter().all(|&x| x == 0));
            }
        }
    }

    #[test]
    fn solve_and_certify() {
        let f = fp(5);
        let m = Matrix::from_rows(2, &[vec![1, 2], vec![2, 4]]);
        assert!(solve(f, &m, &[1, 0]).is_none());
        let x = solve(f, &m, &[3, 1]).unwrap();
        assert_eq!(m.mul_vec(f, &x), vec![3, 1]);
        let a = Matrix::from_rows(2, &[vec![1, 2], vec![3, 4]]);
        let ai = inverse(f, &a).unwrap();
        assert_eq!(a.mul(f, &ai), Matrix::identity(2));
    }

    #[test]
    fn complements() {
        let f = fp(3);
        let full = vec![vec![1, 0], vec![0, 1]];
        assert!(choose_complement(f, &full, 2).is_empty());
        assert_eq!(choose_complement(f, &[], 2), full);
        let f5 = fp(5);
        let w = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let c = choose_complement(f5, &w, 3);
        assert_eq!(c.len(), 1);
        let mut all = w.clone();
        all.extend(c);
        assert_eq!(rank_nullspace(f5, &Matrix::from_rows(3, &all)).rank, 3);
    }

    #[test]
    fn field_arithmetic() {
        let f = fp(7);
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        assert_eq!(f.pow_signed(3, -1), f.inv(3));
        assert_eq!(f.lift(6), -1);
        assert!(Fp::new(4).is_err());
    }

    proptest::proptest! {
        #[test]
        fn complement_completes_and_is_deterministic(seed in 0u64..1000, n in 1usize..6, k in 0usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = fp(5);
            let w: Vec<Vec<u32>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..5)).collect()).collect();
            let c = choose_complement(f, &w, n);
            let rw = rank_of(f, n, &w);
            proptest::prop_assert_eq!(rw + c.len(), n);
            let mut all = w.clone();
            all.extend(c.iter().cloned());
            proptest::prop_assert_eq!(rank_of(f, n, &all), n);
            proptest::prop_assert_eq!(choose_complement(f, &w, n), c);
        }
    }
}
