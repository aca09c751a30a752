//! Subcommands and their reports.

use std::fs;
use std::path::PathBuf;

use ainf::ainf::{classify_admissible, epsilon_residue, stasheff_defect, AInfinityAlgebra, HypothesisParams, Monomial};
use ainf::grp::{build_end_dga, build_resolution, expected_loop_model, expected_minimal_model, BasisOrder, GroupParams};
use ainf::koszul::MasseyEntry;
use ainf::pipeline::{format_vector, run_group, verify, GroupOptions, GroupRun};
use ainf::transfer::compare_models;
use ainf::Error;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::cache::{Cache, Lookup};
use crate::modelfile::{FileError, ModelFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_PARAMS: i32 = 2;
pub const EXIT_TRUNCATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ainf", version, about = "Minimal A-infinity models for BG, G = Z/p^n ⋊ Z/q, over F_p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the End-DGA of the equivariant resolution and write it out.
    Model(Common),
    /// Transfer to cohomology and normalize.
    Transfer(Common),
    /// Stasheff defects of the transferred model.
    CheckStasheff(Common),
    /// Massey powers of t, and of xi on the loop side.
    Massey(Common),
    /// Admissible higher operations allowed by the bigrading.
    Classify(Common),
    /// Loop-space model from the cobar construction.
    Loops(Common),
    /// The whole pipeline with every check.
    Verify(Common),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Model(c)
            | Command::Transfer(c)
            | Command::CheckStasheff(c)
            | Command::Massey(c)
            | Command::Classify(c)
            | Command::Loops(c)
            | Command::Verify(c) => c,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// p n q, as an alternative to the flags.
    #[arg(value_name = "P N Q", num_args = 0..=3)]
    pub positional: Vec<u32>,
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub gamma: Option<u64>,
    /// Cohomology window depth D: degrees -D..0.
    #[arg(long)]
    pub window: Option<i32>,
    /// Arity bound of the transfer (for classify: the largest arity listed).
    #[arg(long)]
    pub arity: Option<usize>,
    /// Write the model file here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
    #[arg(long = "cache-dir")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug)]
pub enum Failure {
    Params(String),
    Truncation(String),
    Other(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Params(_) => EXIT_PARAMS,
            Failure::Truncation(_) => EXIT_TRUNCATION,
            Failure::Other(_) => EXIT_VERIFY,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Params(m) | Failure::Truncation(m) | Failure::Other(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameters(_) | Error::InvalidGamma(_) => Failure::Params(e.to_string()),
            Error::TruncationExceeded(_) | Error::ArityExceeded { .. } => Failure::Truncation(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        Failure::Other(e.to_string())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Key/value lines and tables; `pass` decides the exit code.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub fields: Vec<(String, String)>,
    pub tables: Vec<Table>,
    pub pass: bool,
}

impl Report {
    fn new(command: &str) -> Self {
        Report { command: command.into(), fields: Vec::new(), tables: Vec::new(), pass: true }
    }

    fn field(&mut self, k: &str, v: impl ToString) {
        self.fields.push((k.into(), v.to_string()));
    }

    fn table(&mut self, name: &str, columns: &[&str], rows: Vec<Vec<String>>) {
        self.tables.push(Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows });
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
            s.push('\n');
            return s;
        }
        let mut out = format!("command: {}\n", self.command);
        for (k, v) in &self.fields {
            out.push_str(&format!("{k}: {v}\n"));
        }
        for t in &self.tables {
            out.push_str(&format!("table {} ({} rows)\n", t.name, t.rows.len()));
            out.push_str(&format!("  {}\n", t.columns.join(" | ")));
            for r in &t.rows {
                out.push_str(&format!("  {}\n", r.join(" | ")));
            }
        }
        out.push_str(&format!("result: {}\n", if self.pass { "pass" } else { "FAIL" }));
        out
    }
}

impl Common {
    pub fn group(&self) -> Result<GroupParams, Failure> {
        let pick = |flag: Option<u32>, i: usize, name: &str| -> Result<u32, Failure> {
            match (flag, self.positional.get(i)) {
                (Some(a), Some(&b)) if a != b => Err(Failure::Params(format!("--{name} {a} conflicts with {b}"))),
                (Some(a), _) | (None, Some(&a)) => Ok(a),
                (None, None) => Err(Failure::Params(format!("missing --{name}"))),
            }
        };
        let p = pick(self.p, 0, "p")?;
        let n = pick(self.n, 1, "n")?;
        let q = pick(self.q, 2, "q")?;
        Ok(GroupParams::new(p, n, q, self.gamma)?)
    }

    fn options(&self) -> GroupOptions {
        GroupOptions { order: BasisOrder::Natural, depth: self.window, arity: self.arity }
    }

    /// Everything that determines the command's result.
    fn cache_params(&self, gp: GroupParams) -> Vec<(String, String)> {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "default".into());
        vec![
            ("p".into(), gp.p.to_string()),
            ("n".into(), gp.n.to_string()),
            ("q".into(), gp.q.to_string()),
            ("gamma".into(), gp.gamma.to_string()),
            ("window".into(), opt(self.window.map(|w| w.to_string()))),
            ("arity".into(), opt(self.arity.map(|a| a.to_string()))),
        ]
    }
}

fn group_fields(r: &mut Report, gp: GroupParams) {
    r.field("group", format!("p={} n={} q={} gamma={}", gp.p, gp.n, gp.q, gp.gamma));
    r.field("p^n", gp.pn());
    r.field("h", gp.h());
}

fn write_out(c: &Common, file: &ModelFile, r: &mut Report) -> Result<(), Failure> {
    r.field("content_hash", &file.provenance.content_hash);
    if let Some(path) = &c.out {
        let text = if c.json { file.to_json() } else { file.emit() };
        fs::write(path, text).map_err(|e| Failure::Other(format!("writing {}: {e}", path.display())))?;
        r.field("out", path.display());
    }
    Ok(())
}

fn lookup_name(l: Lookup) -> &'static str {
    match l {
        Lookup::Hit => "hit",
        Lookup::Miss => "miss",
        Lookup::Rebuilt => "rebuilt",
    }
}

/// Run one subcommand; the report goes to stdout, cache notes to stderr.
pub fn run(cli: Cli) -> Result<Report, Failure> {
    match cli.command {
        Command::Model(c) => cmd_model(&c),
        Command::Transfer(c) => cmd_transfer(&c),
        Command::CheckStasheff(c) => cmd_check_stasheff(&c),
        Command::Massey(c) => cmd_massey(&c),
        Command::Classify(c) => cmd_classify(&c),
        Command::Loops(c) => cmd_loops(&c),
        Command::Verify(c) => cmd_verify(&c),
    }
}

fn cached(
    c: &Common,
    command: &str,
    gp: GroupParams,
    build: impl FnOnce() -> Result<ModelFile, Failure>,
) -> Result<ModelFile, Failure> {
    let cache = Cache::locate(c.cache_dir.as_deref());
    let key = Cache::key(command, &c.cache_params(gp));
    let (file, how) = cache.get_or_build(&key, build)?;
    eprintln!("cache {}: {}", lookup_name(how), cache.dir().join(&key).display());
    Ok(file)
}

fn cmd_model(c: &Common) -> Result<Report, Failure> {
    let gp = c.group()?;
    let length = match c.window {
        Some(d) if d < 2 => return Err(Failure::Params(format!("window depth {d} is too small"))),
        Some(d) => d as usize + 1,
        None => gp.resolution_length(),
    };
    let file = cached(c, "model", gp, || {
        let res = build_resolution(gp, length)?;
        let end = build_end_dga(&res, BasisOrder::Natural)?;
        let mut params = c.cache_params(gp);
        params.push(("length".into(), length.to_string()));
        Ok(ModelFile::from_dga(&end, gp.into(), "model", params)?)
    })?;
    let mut r = Report::new("model");
    group_fields(&mut r, gp);
    r.field("resolution_length", length);
    r.field("window", format!("{} {}", file.window.0, file.window.1));
    r.field("dimension", file.spaces.iter().map(|b| b.labels.len()).sum::<usize>());
    for op in &file.operations {
        r.field(&format!("m_{} entries", op.arity), op.entries.len());
    }
    write_out(c, &file, &mut r)?;
    Ok(r)
}

fn transfer_file(c: &Common, gp: GroupParams) -> Result<ModelFile, Failure> {
    cached(c, "transfer", gp, || {
        let run = run_group(gp, c.options())?;
        let n = &run.oracle.normalized;
        let mut params = c.cache_params(gp);
        params.push(("raw_coefficient".into(), n.raw.to_string()));
        params.push(("lambda_t".into(), n.lambda_odd.to_string()));
        params.push(("lambda_x".into(), n.lambda_even.to_string()));
        Ok(ModelFile::from_algebra(run.normalized(), gp.into(), "transfer", params)?)
    })
}

fn param<'a>(file: &'a ModelFile, key: &str) -> &'a str {
    file.provenance.parameters.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str()).unwrap_or("?")
}

fn higher_rows(alg: &AInfinityAlgebra, limit: usize) -> Vec<Vec<String>> {
    let sp = alg.space();
    let mut rows = Vec::new();
    for op in alg.ops().filter(|o| o.arity >= 3) {
        for (word, out) in &op.table {
            if rows.len() == limit {
                return rows;
            }
            let inputs: Vec<&str> = word.iter().map(|&b| sp.label(b)).collect();
            rows.push(vec![op.arity.to_string(), inputs.join(","), format_vector(sp, out)]);
        }
    }
    rows
}

fn cmd_transfer(c: &Common) -> Result<Report, Failure> {
    let gp = c.group()?;
    let file = transfer_file(c, gp)?;
    let alg = file.to_algebra()?;
    let expected = expected_minimal_model(gp, alg.space().window(), alg.arity_bound())?;
    let (mismatches, checked) = compare_models(&alg, &expected)?;
    let mut r = Report::new("transfer");
    group_fields(&mut r, gp);
    r.field("window", format!("{} {}", file.window.0, file.window.1));
    r.field("arity_bound", alg.arity_bound());
    r.field("raw_coefficient", param(&file, "raw_coefficient"));
    let sp = alg.space();
    let t = sp.find_label("t").ok_or_else(|| Failure::Other("no class t".into()))?;
    let v = alg.eval_basis(&vec![t; gp.pn() as usize])?;
    r.field(&format!("m_{}(t,...,t)", gp.pn()), format_vector(sp, &v));
    r.field("oracle", format!("{} mismatches of {checked}", mismatches.len()));
    r.pass = mismatches.is_empty();
    r.table("higher operations", &["arity", "inputs", "value"], higher_rows(&alg, 64));
    write_out(c, &file, &mut r)?;
    Ok(r)
}

fn cmd_check_stasheff(c: &Common) -> Result<Report, Failure> {
    let gp = c.group()?;
    let file = transfer_file(c, gp)?;
    let alg = file.to_algebra()?;
    let mut r = Report::new("check-stasheff");
    group_fields(&mut r, gp);
    let mut rows = Vec::new();
    for n in 3..=alg.arity_bound() + 1 {
        let d = stasheff_defect(&alg, n)?;
        r.pass &= d.is_zero();
        rows.push(vec![n.to_string(), d.checked.to_string(), d.zero_by_degree.to_string(), d.nonzero.len().to_string()]);
    }
    r.table("defects", &["arity", "checked", "zero_by_degree", "nonzero"], rows);
    Ok(r)
}

fn residue_label(c: u32, label: String) -> String {
    if c == 1 {
        label
    } else {
        format!("{c}*{label}")
    }
}

fn power(sym: &str, k: u32) -> String {
    if k == 1 {
        sym.into()
    } else {
        format!("{sym}^{k}")
    }
}

fn cmd_massey(c: &Common) -> Result<Report, Failure> {
    let gp = c.group()?;
    let fp = gp.prime();
    let run: GroupRun = run_group(gp, c.options())?;
    let mut r = Report::new("massey");
    group_fields(&mut r, gp);
    let sp = run.normalized().space();
    let mut rows = Vec::new();
    for i in 2..=gp.pn() as usize {
        let want = if i < gp.pn() as usize { "0".into() } else { residue_label(fp.neg(1), power("x", gp.h())) };
        let (got, indet) = match run.massey_t(i) {
            Ok((m, v)) => (format_vector(sp, &v), m.indeterminacy.to_string()),
            Err(Error::UndefinedMassey { stage }) => (format!("undefined at stage {stage}"), "-".into()),
            Err(e) => return Err(e.into()),
        };
        r.pass &= got == want;
        rows.push(vec!["t".into(), i.to_string(), want, got, indet]);
    }
    let lr = run.loops(None)?;
    let lsp = lr.normalized().space();
    for i in 2..=gp.h() as usize {
        let want = if i < gp.h() as usize { "0".into() } else { residue_label(fp.neg(1), power("tau", gp.pn())) };
        let got = match lr.massey_xi(i)? {
            MasseyEntry::Value(v) => format_vector(lsp, &v),
            MasseyEntry::Undefined(stage) => format!("undefined at stage {stage}"),
        };
        r.pass &= got == want;
        rows.push(vec!["xi".into(), i.to_string(), want, got, "-".into()]);
    }
    r.table("massey powers", &["class", "n", "expected", "got", "indeterminacy"], rows);
    Ok(r)
}

fn monomial(m: &Monomial) -> String {
    match (m.x, m.t) {
        (0, false) => "1".into(),
        (0, true) => "t".into(),
        (j, false) => power("x", j),
        (j, true) => format!("{}*t", power("x", j)),
    }
}

fn cmd_classify(c: &Common) -> Result<Report, Failure> {
    let gp = c.group()?;
    let hp: HypothesisParams = gp.hypothesis()?;
    let max_arity = c.arity.unwrap_or(2 * gp.pn() as usize);
    let max_power = c.window.map(|w| w.max(0) as u32).unwrap_or(1);
    let found = classify_admissible(hp, max_arity, max_power)?;
    let mut r = Report::new("classify");
    group_fields(&mut r, gp);
    r.field("hypothesis", format!("a={} b={} h={} l={}", hp.a, hp.b, hp.h, hp.l));
    r.field("max_arity", max_arity);
    r.field("max_power", max_power);
    r.field("admissible", found.len());
    let only_l = found.iter().all(|a| a.arity == hp.l as usize && a.inputs.iter().all(|m| m.t) && !a.output.t);
    r.field("only arity l on all-t tuples", only_l);
    r.pass = only_l;
    let rows = found
        .iter()
        .map(|a| {
            vec![
                a.arity.to_string(),
                a.inputs.iter().map(monomial).collect::<Vec<_>>().join(","),
                monomial(&a.output),
            ]
        })
        .collect();
    r.table("admissible", &["arity", "inputs", "output"], rows);
    Ok(r)
}

fn cmd_loops(c: &Common) -> Result<Report, Failure> {
    let gp = c.group()?;
    let fp = gp.prime();
    let file = cached(c, "loops", gp, || {
        let run = run_group(gp, c.options())?;
        let lr = run.loops(None)?;
        let mut params = c.cache_params(gp);
        params.push(("raw_coefficient".into(), lr.oracle.normalized.raw.to_string()));
        let hp = lr.hypothesis;
        params.push(("hypothesis".into(), format!("{},{},{},{}", hp.a, hp.b, hp.h, hp.l)));
        Ok(ModelFile::from_algebra(lr.normalized(), gp.into(), "loops", params)?)
    })?;
    let alg = file.to_algebra()?;
    let expected = expected_loop_model(gp, alg.space().window(), alg.arity_bound())?;
    let (mismatches, checked) = compare_models(&alg, &expected)?;
    let mut r = Report::new("loops");
    group_fields(&mut r, gp);
    r.field("window", format!("{} {}", file.window.0, file.window.1));
    r.field("raw_coefficient", param(&file, "raw_coefficient"));
    r.field("hypothesis a,b,h,l", param(&file, "hypothesis"));
    let sp = alg.space();
    let xi = sp.find_label("xi").ok_or_else(|| Failure::Other("no class xi".into()))?;
    let (h, pn) = (gp.h(), gp.pn());
    let v = alg.eval_basis(&vec![xi; h as usize])?;
    let want = residue_label(epsilon_residue(fp, h as u64), power("tau", pn));
    r.field(&format!("m_{h}(xi,...,xi)"), format_vector(sp, &v));
    r.field("expected", want.clone());
    r.field("oracle", format!("{} mismatches of {checked}", mismatches.len()));
    r.pass = mismatches.is_empty() && format_vector(sp, &v) == want;
    let mut ring = Vec::new();
    if let Some(m2) = alg.op(2) {
        for (word, out) in &m2.table {
            if word.iter().any(|&b| Some(b) == alg.unit()) {
                continue;
            }
            ring.push(vec![sp.label(word[0]).into(), sp.label(word[1]).into(), format_vector(sp, out)]);
        }
    }
    r.table("products", &["a", "b", "a*b"], ring);
    r.table("higher operations", &["arity", "inputs", "value"], higher_rows(&alg, 64));
    write_out(c, &file, &mut r)?;
    Ok(r)
}

fn cmd_verify(c: &Common) -> Result<Report, Failure> {
    let gp = c.group()?;
    let rep = verify(gp, c.options(), None)?;
    let mut r = Report::new("verify");
    group_fields(&mut r, gp);
    r.pass = rep.passed();
    let rows = rep
        .records
        .iter()
        .map(|x| vec![x.name.clone(), x.expected.clone(), x.got.clone(), if x.pass { "pass" } else { "FAIL" }.into()])
        .collect();
    r.table("checks", &["check", "expected", "got", "verdict"], rows);
    Ok(r)
}
