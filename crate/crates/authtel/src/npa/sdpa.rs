//! Sparse SDPA (`.dat-s`) reader and writer.
//!
//! A problem `min ⟨C, X⟩ s.t. ⟨A_i, X⟩ = b_i, X ⪰ 0` is written as the SDPA dual
//! `max ⟨F0, Y⟩ s.t. ⟨F_i, Y⟩ = c_i, Y ⪰ 0` with `F0 = −C`, `F_i = A_i`, `c_i = b_i`, so the
//! optimum of the original problem is minus the SDPA dual objective.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::functional::Objective;
use super::moment::{build_moment_problem, MomentProblem};
use super::word::OperatorWord;
use super::{to_sdp_instance, NpaError, SCHEMA};
use crate::sdp::{SdpConstraint, SdpInstance, SparseSym};
use crate::{Inequality, Trust};

/// First line of every exported file.
pub const SIGN_CONVENTION: &str =
    "\"SDPA dual form: Y = X, F0 = -C, F_i = A_i, c_i = b_i; min <C,X> = -(SDPA dual objective)\"";

const METADATA_PREFIX: &str = "* npa/1 ";

/// Everything needed to rebuild a [`MomentProblem`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub schema: String,
    pub trust: Trust,
    pub objective: Objective,
    pub inequality: Inequality,
    pub violation: f64,
    pub words: Vec<OperatorWord>,
}

impl ProblemSpec {
    pub fn of(problem: &MomentProblem) -> Self {
        ProblemSpec {
            schema: SCHEMA.to_string(),
            trust: problem.trust,
            objective: problem.objective,
            inequality: problem.inequality,
            violation: problem.violation,
            words: problem.words.clone(),
        }
    }

    pub fn build(&self) -> Result<MomentProblem, NpaError> {
        build_moment_problem(self.trust, &self.words, self.objective, self.inequality, self.violation)
    }
}

/// Parsed contents of an SDPA file.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpaDocument {
    pub instance: SdpInstance,
    pub spec: Option<ProblemSpec>,
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Serializes an instance; `spec` is embedded as a comment line when given.
pub fn write_sdpa(instance: &SdpInstance, spec: Option<&ProblemSpec>) -> String {
    let mut out = String::new();
    out.push_str(SIGN_CONVENTION);
    out.push('\n');
    if let Some(spec) = spec {
        out.push_str(METADATA_PREFIX);
        out.push_str(&serde_json::to_string(spec).expect("spec serializes"));
        out.push('\n');
    }
    let m = instance.constraints.len();
    let _ = writeln!(out, "{m} = mDIM");
    out.push_str("1 = nBLOCK\n");
    let _ = writeln!(out, "{} = bLOCKsTRUCT", instance.dim);
    let rhs: Vec<String> = instance.constraints.iter().map(|c| num(c.rhs)).collect();
    out.push_str(&rhs.join(" "));
    out.push('\n');
    for &(i, j, v) in instance.objective.entries() {
        let _ = writeln!(out, "0 1 {} {} {}", i + 1, j + 1, num(-v));
    }
    for (k, c) in instance.constraints.iter().enumerate() {
        for &(i, j, v) in c.matrix.entries() {
            let _ = writeln!(out, "{} 1 {} {} {}", k + 1, i + 1, j + 1, num(v));
        }
    }
    out
}

fn bad(msg: impl Into<String>) -> NpaError {
    NpaError::Sdpa(msg.into())
}

fn first_number<T: std::str::FromStr>(line: Option<&str>, what: &str) -> Result<T, NpaError> {
    line.and_then(|l| l.split(|ch: char| ch.is_whitespace() || ",{}()=".contains(ch)).find(|t| !t.is_empty()))
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad(format!("missing {what}")))
}

/// Parses an SDPA sparse file with a single positive block.
pub fn read_sdpa(text: &str) -> Result<SdpaDocument, NpaError> {
    let mut lines = text.lines().peekable();
    let mut spec = None;
    while let Some(line) = lines.peek() {
        let t = line.trim_start();
        if t.starts_with('"') || t.starts_with('*') || t.is_empty() {
            if let Some(json) = t.strip_prefix(METADATA_PREFIX.trim_end()) {
                let s: ProblemSpec = serde_json::from_str(json.trim()).map_err(|e| bad(e.to_string()))?;
                spec = Some(s);
            }
            lines.next();
        } else {
            break;
        }
    }
    let m: usize = first_number(lines.next(), "mDIM")?;
    let nblocks: usize = first_number(lines.next(), "nBLOCK")?;
    if nblocks != 1 {
        return Err(bad(format!("{nblocks} blocks; only a single block is supported")));
    }
    let dim: i64 = first_number(lines.next(), "bLOCKsTRUCT")?;
    if dim <= 0 {
        return Err(bad("diagonal blocks are not supported"));
    }
    let dim = dim as usize;
    let rest: Vec<&str> = lines.collect();
    let mut tokens = rest
        .iter()
        .flat_map(|l| l.split(|ch: char| ch.is_whitespace() || ",{}()".contains(ch)))
        .filter(|t| !t.is_empty());
    let mut next_f64 = |what: &str| -> Result<Option<f64>, NpaError> {
        match tokens.next() {
            None => Ok(None),
            Some(t) => t.parse::<f64>().map(Some).map_err(|_| bad(format!("bad {what} `{t}`"))),
        }
    };
    let mut rhs = Vec::with_capacity(m);
    for _ in 0..m {
        rhs.push(next_f64("rhs")?.ok_or_else(|| bad("truncated rhs vector"))?);
    }
    let mut mats: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); m + 1];
    while let Some(k) = next_f64("matrix index")? {
        let mut field = |what: &str| next_f64(what)?.ok_or_else(|| bad("truncated entry"));
        let (blk, i, j, v) = (field("block")?, field("row")?, field("column")?, field("value")?);
        let (k, i, j) = (k as usize, i as usize, j as usize);
        if blk != 1.0 || k > m || i == 0 || j == 0 || i > dim || j > dim {
            return Err(bad(format!("entry out of range: {k} {blk} {i} {j}")));
        }
        mats[k].push((i - 1, j - 1, if k == 0 { -v } else { v }));
    }
    let mut mats = mats.into_iter();
    let objective = SparseSym::from_entries(mats.next().unwrap_or_default());
    let constraints = mats.zip(rhs).map(|(e, rhs)| SdpConstraint { matrix: SparseSym::from_entries(e), rhs }).collect();
    let instance = SdpInstance::new(dim, objective, constraints).map_err(|e| bad(e.to_string()))?;
    Ok(SdpaDocument { instance, spec })
}

/// Writes `problem` to `path`.
pub fn export_sdpa(problem: &MomentProblem, path: &Path) -> Result<(), NpaError> {
    let text = write_sdpa(&to_sdp_instance(problem), Some(&ProblemSpec::of(problem)));
    fs::write(path, text).map_err(|e| NpaError::Io(e.to_string()))
}

/// Reads a file written by [`export_sdpa`], rebuilding the moment problem and checking that
/// its numeric data matches the file exactly.
pub fn import_sdpa(path: &Path) -> Result<(MomentProblem, SdpInstance), NpaError> {
    let text = fs::read_to_string(path).map_err(|e| NpaError::Io(e.to_string()))?;
    let doc = read_sdpa(&text)?;
    let spec = doc.spec.ok_or_else(|| bad("no npa/1 metadata line"))?;
    if spec.schema != SCHEMA {
        return Err(bad(format!("unsupported schema `{}`", spec.schema)));
    }
    let problem = spec.build()?;
    if to_sdp_instance(&problem) != doc.instance {
        return Err(bad("numeric data does not match the embedded problem"));
    }
    Ok((problem, doc.instance))
}
