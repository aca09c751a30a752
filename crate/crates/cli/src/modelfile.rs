//! On-disk models: a line-oriented text format, and the same structure as JSON.
//!
//! ```text
//! ainf-model
//! format_version 1
//! prime 3
//! group 3 1 2 2
//! window -14 0
//! arity_bound 6
//! unit 1
//! space 8
//!   -14 28 x^7
//!   ...
//! operation 3 4
//!   t t t -> 2:x^2
//!   ...
//! provenance
//!   command transfer
//!   param p 3
//!   content_hash 5f1c…
//! end
//! ```
//!
//! Internal degrees `w` are in units of `1/q`. Blocks are sorted by bidegree,
//! entries by the bidegrees and labels of their inputs, so emitting is
//! deterministic; the hash covers every line but its own.

use std::collections::{BTreeMap, HashMap};

use ainf::ainf::{AInfinityAlgebra, MultiOp};
use ainf::dga::DgAlgebra;
use ainf::glin::{Bidegree, Fp, GradedSpace, HVec};
use ainf::grp::GroupParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FileError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("content hash mismatch: file says {stored}, content is {actual}")]
    Hash { stored: String, actual: String },
    #[error("unsupported format_version {0}")]
    Version(u32),
    #[error("invalid model: {0}")]
    Model(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupHeader {
    pub p: u32,
    pub n: u32,
    pub q: u32,
    pub gamma: u64,
}

impl From<GroupParams> for GroupHeader {
    fn from(g: GroupParams) -> Self {
        GroupHeader { p: g.p, n: g.n, q: g.q, gamma: g.gamma }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub s: i32,
    pub w: i32,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub inputs: Vec<String>,
    /// `(label, coefficient)`, coefficients in `[1, p)`.
    pub output: Vec<(String, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    pub arity: usize,
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileProvenance {
    pub command: String,
    pub parameters: Vec<(String, String)>,
    pub content_hash: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub prime: u32,
    pub group: GroupHeader,
    pub window: (i32, i32),
    pub arity_bound: usize,
    pub unit: Option<String>,
    pub spaces: Vec<Block>,
    pub operations: Vec<Operation>,
    pub provenance: FileProvenance,
}

fn check_label(l: &str) -> Result<(), FileError> {
    if l.is_empty() || l.chars().any(char::is_whitespace) || l.contains(':') || l == "->" {
        return Err(FileError::Model(format!("label {l:?} cannot be written")));
    }
    Ok(())
}

impl ModelFile {
    fn from_parts(
        group: GroupHeader,
        space: &GradedSpace,
        arity_bound: usize,
        unit: Option<String>,
        ops: Vec<(usize, Vec<(Vec<String>, HVec)>)>,
        command: &str,
        parameters: Vec<(String, String)>,
    ) -> Result<Self, FileError> {
        let spaces: Vec<Block> = space
            .degrees()
            .map(|d| Block { s: d.s, w: d.w, labels: space.labels(d).to_vec() })
            .collect();
        for b in &spaces {
            for l in &b.labels {
                check_label(l)?;
            }
        }
        let operations = ops
            .into_iter()
            .map(|(arity, table)| {
                let entries = table
                    .into_iter()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(inputs, v)| Entry {
                        inputs,
                        output: v.terms().map(|(i, c)| (space.label(space.id(v.deg, i)).to_string(), c)).collect(),
                    })
                    .collect();
                Operation { arity, entries }
            })
            .collect();
        let mut file = ModelFile {
            format_version: FORMAT_VERSION,
            prime: space.prime().p(),
            group,
            window: space.window(),
            arity_bound,
            unit,
            spaces,
            operations,
            provenance: FileProvenance { command: command.into(), parameters, content_hash: String::new() },
        };
        file.canonicalize();
        file.seal();
        Ok(file)
    }

    /// Every operation of `alg`, on its own labels.
    pub fn from_algebra(
        alg: &AInfinityAlgebra,
        group: GroupHeader,
        command: &str,
        parameters: Vec<(String, String)>,
    ) -> Result<Self, FileError> {
        let sp = alg.space();
        let ops = alg
            .ops()
            .map(|op| {
                let table = op
                    .table
                    .iter()
                    .map(|(w, v)| (w.iter().map(|&b| sp.label(b).to_string()).collect(), v.clone()))
                    .collect();
                (op.arity, table)
            })
            .collect();
        let unit = alg.unit().map(|u| sp.label(u).to_string());
        ModelFile::from_parts(group, sp, alg.arity_bound(), unit, ops, command, parameters)
    }

    /// The differential as `m_1` and the product as `m_2` on basis pairs
    /// whose product lies in the window.
    pub fn from_dga(
        a: &dyn DgAlgebra,
        group: GroupHeader,
        command: &str,
        parameters: Vec<(String, String)>,
    ) -> Result<Self, FileError> {
        let sp = a.space();
        let err = |e: ainf::Error| FileError::Model(e.to_string());
        let to_vec = |deg: Bidegree, terms: Vec<(usize, u32)>| -> Result<HVec, FileError> {
            let mut v = HVec::zero(sp, deg).map_err(err)?;
            for (k, c) in terms {
                v.add_scaled(sp.prime(), &sp.basis_vector(k), c);
            }
            Ok(v)
        };
        let mut m1 = Vec::new();
        let mut m2 = Vec::new();
        for x in 0..sp.total_dim() {
            let dx = sp.degree_of(x);
            if sp.in_window(dx + Bidegree::new(-1, 0)) {
                let v = to_vec(dx + Bidegree::new(-1, 0), a.diff_basis(x).map_err(err)?)?;
                m1.push((vec![sp.label(x).to_string()], v));
            }
            for y in 0..sp.total_dim() {
                let deg = dx + sp.degree_of(y);
                if !sp.in_window(deg) {
                    continue;
                }
                let prod = a.mul_basis(x, y).map_err(err)?;
                if prod.is_empty() {
                    continue;
                }
                m2.push((vec![sp.label(x).to_string(), sp.label(y).to_string()], to_vec(deg, prod)?));
            }
        }
        ModelFile::from_parts(group, sp, 2, None, vec![(1, m1), (2, m2)], command, parameters)
    }

    fn degree_index(&self) -> HashMap<&str, Bidegree> {
        let mut m = HashMap::new();
        for b in &self.spaces {
            for l in &b.labels {
                m.insert(l.as_str(), Bidegree::new(b.s, b.w));
            }
        }
        m
    }

    /// Sort blocks, entries and output terms into the canonical order.
    pub fn canonicalize(&mut self) {
        self.spaces.sort_by_key(|b| (b.s, b.w));
        let index: HashMap<String, Bidegree> =
            self.degree_index().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        let key = |l: &String| (index.get(l).copied(), l.clone());
        self.operations.sort_by_key(|o| o.arity);
        for op in &mut self.operations {
            for e in &mut op.entries {
                e.output.sort_by_key(|(l, _)| key(l));
            }
            op.entries.sort_by_cached_key(|e| e.inputs.iter().map(key).collect::<Vec<_>>());
        }
    }

    fn body(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line("ainf-model".into());
        line(format!("format_version {}", self.format_version));
        line(format!("prime {}", self.prime));
        let g = self.group;
        line(format!("group {} {} {} {}", g.p, g.n, g.q, g.gamma));
        line(format!("window {} {}", self.window.0, self.window.1));
        line(format!("arity_bound {}", self.arity_bound));
        if let Some(u) = &self.unit {
            line(format!("unit {u}"));
        }
        line(format!("space {}", self.spaces.len()));
        for b in &self.spaces {
            line(format!("  {} {} {}", b.s, b.w, b.labels.join(" ")));
        }
        for op in &self.operations {
            line(format!("operation {} {}", op.arity, op.entries.len()));
            for e in &op.entries {
                let terms: Vec<String> = e.output.iter().map(|(l, c)| format!("{c}:{l}")).collect();
                line(format!("  {} -> {}", e.inputs.join(" "), terms.join(" ")));
            }
        }
        line("provenance".into());
        line(format!("  command {}", self.provenance.command));
        for (k, v) in &self.provenance.parameters {
            line(format!("  param {k} {v}"));
        }
        out
    }

    fn digest(&self) -> String {
        format!("{:x}", Sha256::digest(self.body().as_bytes()))
    }

    /// Recompute and store the content hash.
    pub fn seal(&mut self) {
        self.provenance.content_hash = self.digest();
    }

    pub fn verify_hash(&self) -> Result<(), FileError> {
        let actual = self.digest();
        if actual != self.provenance.content_hash {
            return Err(FileError::Hash { stored: self.provenance.content_hash.clone(), actual });
        }
        Ok(())
    }

    pub fn emit(&self) -> String {
        let mut s = self.body();
        s.push_str(&format!("  content_hash {}\nend\n", self.provenance.content_hash));
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model files serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, FileError> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| FileError::Syntax { line: e.line(), msg: e.to_string() })?;
        file.verify_hash()?;
        Ok(file)
    }

    /// Parse emitted text and check its content hash.
    pub fn parse(text: &str) -> Result<Self, FileError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();
        let syntax = |line: usize, msg: &str| FileError::Syntax { line, msg: msg.to_string() };
        let mut next = |want: &str| -> Result<(usize, Vec<String>), FileError> {
            let (n, l) = lines.next().ok_or_else(|| syntax(0, &format!("missing {want}")))?;
            let words: Vec<String> = l.split_whitespace().map(String::from).collect();
            if want != "*" && words.first().map(String::as_str) != Some(want) {
                return Err(syntax(n, &format!("expected {want}")));
            }
            Ok((n, words))
        };
        let num = |n: usize, w: &[String], i: usize| -> Result<i64, FileError> {
            w.get(i).and_then(|x| x.parse().ok()).ok_or_else(|| syntax(n, "expected an integer"))
        };
        let (n, w) = next("ainf-model")?;
        if w.len() != 1 {
            return Err(syntax(n, "bad header"));
        }
        let (n, w) = next("format_version")?;
        let version = num(n, &w, 1)? as u32;
        if version != FORMAT_VERSION {
            return Err(FileError::Version(version));
        }
        let (n, w) = next("prime")?;
        let prime = num(n, &w, 1)? as u32;
        let (n, w) = next("group")?;
        let group = GroupHeader {
            p: num(n, &w, 1)? as u32,
            n: num(n, &w, 2)? as u32,
            q: num(n, &w, 3)? as u32,
            gamma: w.get(4).and_then(|x| x.parse().ok()).ok_or_else(|| syntax(n, "expected an integer"))?,
        };
        let (n, w) = next("window")?;
        let window = (num(n, &w, 1)? as i32, num(n, &w, 2)? as i32);
        let (n, w) = next("arity_bound")?;
        let arity_bound = num(n, &w, 1)? as usize;
        let (mut n, mut w) = next("*")?;
        let mut unit = None;
        if w.first().map(String::as_str) == Some("unit") {
            unit = Some(w.get(1).ok_or_else(|| syntax(n, "unit needs a label"))?.clone());
            (n, w) = next("*")?;
        }
        if w.first().map(String::as_str) != Some("space") {
            return Err(syntax(n, "expected space"));
        }
        let nblocks = num(n, &w, 1)? as usize;
        let mut spaces = Vec::with_capacity(nblocks);
        for _ in 0..nblocks {
            let (n, w) = next("*")?;
            if w.len() < 3 {
                return Err(syntax(n, "block needs s, w and labels"));
            }
            spaces.push(Block { s: num(n, &w, 0)? as i32, w: num(n, &w, 1)? as i32, labels: w[2..].to_vec() });
        }
        let mut operations = Vec::new();
        let (mut n, mut w) = next("*")?;
        while w.first().map(String::as_str) == Some("operation") {
            let arity = num(n, &w, 1)? as usize;
            let count = num(n, &w, 2)? as usize;
            let mut entries = Vec::with_capacity(count);
            for _ in 0..count {
                let (n, w) = next("*")?;
                let arrow = w.iter().position(|x| x == "->").ok_or_else(|| syntax(n, "entry needs ->"))?;
                let output = w[arrow + 1..]
                    .iter()
                    .map(|t| {
                        let (c, l) = t.split_once(':').ok_or_else(|| syntax(n, "term needs c:label"))?;
                        Ok((l.to_string(), c.parse().map_err(|_| syntax(n, "bad coefficient"))?))
                    })
                    .collect::<Result<Vec<_>, FileError>>()?;
                entries.push(Entry { inputs: w[..arrow].to_vec(), output });
            }
            operations.push(Operation { arity, entries });
            (n, w) = next("*")?;
        }
        if w.first().map(String::as_str) != Some("provenance") {
            return Err(syntax(n, "expected provenance"));
        }
        let (n, w) = next("command")?;
        let command = w.get(1).ok_or_else(|| syntax(n, "command needs a name"))?.clone();
        let mut parameters = Vec::new();
        let content_hash = loop {
            let (n, w) = next("*")?;
            match w.first().map(String::as_str) {
                Some("param") if w.len() == 3 => parameters.push((w[1].clone(), w[2].clone())),
                Some("content_hash") if w.len() == 2 => break w[1].clone(),
                _ => return Err(syntax(n, "expected param or content_hash")),
            }
        };
        next("end")?;
        let file = ModelFile {
            format_version: version,
            prime,
            group,
            window,
            arity_bound,
            unit,
            spaces,
            operations,
            provenance: FileProvenance { command, parameters, content_hash },
        };
        file.verify_hash()?;
        Ok(file)
    }

    /// Rebuild the algebra. The monomial basis is not recorded, so the
    /// result carries none.
    pub fn to_algebra(&self) -> Result<AInfinityAlgebra, FileError> {
        let err = |e: ainf::Error| FileError::Model(e.to_string());
        let fp = Fp::new(self.prime).map_err(err)?;
        let blocks: BTreeMap<Bidegree, Vec<String>> =
            self.spaces.iter().map(|b| (Bidegree::new(b.s, b.w), b.labels.clone())).collect();
        let space = GradedSpace::new(fp, self.window, blocks).map_err(err)?;
        let find = |l: &str| space.find_label(l).ok_or_else(|| FileError::Model(format!("unknown label {l}")));
        let unit = self.unit.as_deref().map(find).transpose()?;
        let mut ops = Vec::new();
        for op in &self.operations {
            let mut m = MultiOp::new(op.arity);
            for e in &op.entries {
                let word = e.inputs.iter().map(|l| find(l)).collect::<Result<Vec<_>, _>>()?;
                let deg = word.iter().fold(m.shift(), |acc, &b| acc + space.degree_of(b));
                let mut v = HVec::zero(&space, deg).map_err(err)?;
                for (l, c) in &e.output {
                    let b = find(l)?;
                    if space.degree_of(b) != deg {
                        return Err(FileError::Model(format!("{l} is not in bidegree {deg}")));
                    }
                    v.add_scaled(fp, &space.basis_vector(b), *c);
                }
                m.table.insert(word, v);
            }
            ops.push(m);
        }
        AInfinityAlgebra::new(space, unit, ops, self.arity_bound, None).map_err(err)
    }
}
