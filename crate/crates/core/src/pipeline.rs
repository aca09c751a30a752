//! End-to-end runs: resolution → End-DGA → contraction → transfer →
//! normalization on the cohomology side, then the loop side, with every
//! check recorded.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ainf::{epsilon_residue, stasheff_defect, AInfinityAlgebra};
use crate::dga::{contraction, massey_power, Contraction, MasseyResult};
use crate::error::{Error, Result};
use crate::glin::{Bidegree, GradedSpace, HVec};
use crate::grp::{build_end_dga, build_resolution, expected_minimal_model, BasisOrder, EndDga, GroupParams};
use crate::koszul::{default_loop_arity, loop_minimal_model, LoopRun, MasseyEntry};
use crate::transfer::{merkulov_transfer, verify_against_oracle, OracleReport, TransferredModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupOptions {
    pub order: BasisOrder,
    /// Cohomology window `[-depth, 0]`; the resolution has length `depth + 1`.
    pub depth: Option<i32>,
    pub arity: Option<usize>,
}

impl Default for GroupOptions {
    fn default() -> Self {
        GroupOptions { order: BasisOrder::Natural, depth: None, arity: None }
    }
}

/// `p^n + 1` for the Stasheff checks, raised so the cobar over
/// `[-1, loop_top]` sees every operation it needs.
pub fn default_group_arity(gp: GroupParams) -> usize {
    let q = gp.q as i32;
    let cobar = ((gp.loop_top() - 1) / (2 * q - 2).max(1)) as usize;
    (gp.pn() as usize + 1).max(cobar)
}

pub struct GroupRun {
    pub params: GroupParams,
    pub end: EndDga,
    pub contraction: Contraction,
    pub transferred: TransferredModel,
    pub expected: AInfinityAlgebra,
    pub oracle: OracleReport,
}

pub fn run_group(gp: GroupParams, opts: GroupOptions) -> Result<GroupRun> {
    if gp.q < 2 {
        return Err(Error::InvalidParameters("q = 1 has no closed-form model with a degree-one generator".into()));
    }
    let length = match opts.depth {
        Some(d) if d < 2 => return Err(Error::InvalidParameters(format!("window depth {d} is too small"))),
        Some(d) => d as usize + 1,
        None => gp.resolution_length(),
    };
    let res = build_resolution(gp, length)?;
    let end = build_end_dga(&res, opts.order)?;
    let c = contraction(&end)?;
    let arity = opts.arity.unwrap_or_else(|| default_group_arity(gp));
    let xh = gp.x_degree().scale(gp.h() as i32);
    if xh.s < end.trusted().0 {
        return Err(Error::TruncationExceeded(xh));
    }
    let transferred = merkulov_transfer(&end, &c, end.trusted(), arity, "end-dga")?;
    let expected = expected_minimal_model(gp, transferred.model.space().window(), arity)?;
    let oracle = verify_against_oracle(&transferred, &expected, gp.hypothesis()?)?;
    Ok(GroupRun { params: gp, end, contraction: c, transferred, expected, oracle })
}

impl GroupRun {
    pub fn normalized(&self) -> &AInfinityAlgebra {
        &self.oracle.normalized.model
    }

    /// `⟨t, …, t⟩` in the End-DGA, with the value in the normalized basis.
    pub fn massey_t(&self, nfold: usize) -> Result<(MasseyResult, HVec)> {
        let sp = self.normalized().space();
        let t = sp.basis_vector(sp.find_label("t").ok_or_else(|| Error::ShapeMismatch("no class t".into()))?);
        let cls = self.oracle.change.to_h(sp, &self.contraction.h, &t)?;
        let r = massey_power(&self.end, &self.contraction, &cls, nfold)?;
        let value = if r.value.is_zero() && !sp.in_window(r.value.deg) {
            HVec { deg: r.value.deg, coeffs: Vec::new() }
        } else {
            self.oracle.change.from_h(sp, &self.contraction.h, &r.value)?
        };
        Ok((r, value))
    }

    pub fn loops(&self, arity: Option<usize>) -> Result<LoopRun> {
        let gp = self.params;
        loop_minimal_model(gp, self.normalized(), gp.loop_top(), arity.unwrap_or_else(|| default_loop_arity(gp)))
    }
}

/// `c·label` terms of a vector, `0` when empty.
pub fn format_vector(space: &GradedSpace, v: &HVec) -> String {
    let terms: Vec<String> = v
        .terms()
        .map(|(i, c)| {
            let label = space.label(space.id(v.deg, i));
            if c == 1 {
                label.to_string()
            } else {
                format!("{c}*{label}")
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// `deg:dim` pairs in bidegree order.
pub fn format_series(series: &BTreeMap<Bidegree, usize>) -> String {
    series.iter().map(|(d, n)| format!("{d}:{n}")).collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub expected: String,
    pub got: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub records: Vec<CheckRecord>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    fn push(&mut self, name: impl Into<String>, expected: impl Into<String>, got: impl Into<String>) {
        let (expected, got) = (expected.into(), got.into());
        let pass = expected == got;
        self.records.push(CheckRecord { name: name.into(), expected, got, pass });
    }

    fn fail(&mut self, name: impl Into<String>, expected: impl Into<String>, err: &Error) {
        self.records.push(CheckRecord { name: name.into(), expected: expected.into(), got: err.to_string(), pass: false });
    }
}

fn power(sym: &str, k: u32) -> String {
    if k == 1 {
        sym.to_string()
    } else {
        format!("{sym}^{k}")
    }
}

fn signed(c: u32, label: &str) -> String {
    if c == 1 {
        label.to_string()
    } else {
        format!("{c}*{label}")
    }
}

/// The full pipeline. Errors that stop a stage become failed records;
/// invalid parameters and truncation errors are returned as errors.
pub fn verify(gp: GroupParams, opts: GroupOptions, loop_arity: Option<usize>) -> Result<VerifyReport> {
    let mut rep = VerifyReport::default();
    let fp = gp.prime();
    let (pn, h) = (gp.pn(), gp.h());
    let run = run_group(gp, opts)?;
    let raw = run.oracle.normalized.raw;
    rep.push("raw m_ℓ(t,…,t) is nonzero", "true", (raw != 0).to_string());
    rep.push(
        "normalized model equals closed form",
        format!("0 mismatches of {}", run.oracle.checked),
        format!("{} mismatches of {}", run.oracle.mismatches.len(), run.oracle.checked),
    );
    let model = run.normalized();
    let sp = model.space();
    let t = sp.find_label("t").expect("normalized model has t");
    for i in 3..pn as usize {
        let v = model.eval_basis(&vec![t; i])?;
        rep.push(format!("m_{i}(t,…,t)"), "0", format_vector(sp, &v));
    }
    let v = model.eval_basis(&vec![t; pn as usize])?;
    rep.push(format!("m_{pn}(t,…,t)"), signed(epsilon_residue(fp, pn as u64), &power("x", h)), format_vector(sp, &v));
    for n in 3..=(pn as usize + 1).min(run.transferred.model.arity_bound() + 1) {
        let d = stasheff_defect(&run.transferred.model, n)?;
        rep.push(format!("Stasheff defect at arity {n}"), "0", d.nonzero.len().to_string());
    }
    for i in 3..=pn as usize {
        let want = if i < pn as usize { "0".to_string() } else { signed(fp.neg(1), &power("x", h)) };
        match run.massey_t(i) {
            Ok((_, value)) => rep.push(format!("Massey power <t>^{i}"), want, format_vector(sp, &value)),
            Err(e @ Error::UndefinedMassey { .. }) => rep.fail(format!("Massey power <t>^{i}"), want, &e),
            Err(e) => return Err(e),
        }
    }

    let lr = run.loops(loop_arity)?;
    let lm = lr.normalized();
    let lsp = lm.space();
    rep.push(
        "loop model equals closed form",
        format!("0 mismatches of {}", lr.oracle.checked),
        format!("{} mismatches of {}", lr.oracle.mismatches.len(), lr.oracle.checked),
    );
    let xi = lsp.find_label("xi").expect("normalized loop model has xi");
    let lh = lr.hypothesis;
    rep.push("loop degrees satisfy h'a' - l'b' = 1", "1", (lh.h * lh.a - lh.l * lh.b).to_string());
    let lv = lm.eval_basis(&vec![xi; h as usize])?;
    rep.push(
        format!("loop m_{h}(xi,…,xi)"),
        signed(epsilon_residue(fp, h as u64), &power("tau", pn)),
        format_vector(lsp, &lv),
    );
    for i in 2..=h as usize {
        let want = if i < h as usize { "0".to_string() } else { signed(fp.neg(1), &power("tau", pn)) };
        match lr.massey_xi(i)? {
            MasseyEntry::Value(v) => rep.push(format!("Massey power <xi>^{i}"), want, format_vector(lsp, &v)),
            MasseyEntry::Undefined(stage) => {
                rep.fail(format!("Massey power <xi>^{i}"), want, &Error::UndefinedMassey { stage })
            }
        }
    }
    let (got, want) = lr.double_dual()?;
    rep.push("double cobar Poincaré series", format_series(&want), format_series(&got));
    Ok(rep)
}
