//! JSON solution files and their re-verification.

use std::collections::BTreeMap;
use std::path::Path;

use islands::algos::{partition_from_lines, CompatibleFamilies, Cover, SeparatingLine};
use islands::arrangement::empty_subdivision;
use islands::island::{Instance, Island};
use islands::oracles::{
    verify_compatible, verify_cover_sets, verify_partition_sets, verify_separating,
};
use serde::{Deserialize, Serialize};

use crate::format::{parse_scalar, serialize_scalar};
use crate::{io_err, CliError};

pub const SOLUTION_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionKind {
    Partition,
    Cover,
    Lines,
}

/// `a x + b y = c` with rational coefficients as `num/den` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineRecord {
    pub a: String,
    pub b: String,
    pub c: String,
}

impl LineRecord {
    pub fn from_line(l: &SeparatingLine) -> Self {
        LineRecord {
            a: serialize_scalar(l.a()),
            b: serialize_scalar(l.b()),
            c: serialize_scalar(l.c()),
        }
    }

    pub fn to_line(&self) -> Result<SeparatingLine, String> {
        let a = parse_scalar(&self.a)?;
        let b = parse_scalar(&self.b)?;
        let c = parse_scalar(&self.c)?;
        SeparatingLine::new(a, b, c).ok_or_else(|| "degenerate line 0x + 0y = c".to_string())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepLog {
    pub step: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub newly_covered: Option<usize>,
    /// |U_i| after the step.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub uncovered: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub faces: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub face_increase: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub face_bound: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub crossings: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub version: u32,
    pub algorithm: String,
    pub kind: SolutionKind,
    #[serde(default)]
    pub parameters: BTreeMap<String, String>,
    /// Member lists; for line solutions the induced groups.
    #[serde(default)]
    pub islands: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lines: Vec<LineRecord>,
    /// Source cover of a bold run, in insertion order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub families: Option<Vec<Vec<Vec<usize>>>>,
    #[serde(default)]
    pub steps: Vec<StepLog>,
    pub validity: BTreeMap<String, bool>,
    pub cardinalities: BTreeMap<String, usize>,
    #[serde(default)]
    pub ratios: BTreeMap<String, String>,
}

impl SolutionFile {
    pub fn new(algorithm: &str, kind: SolutionKind) -> Self {
        SolutionFile {
            version: SOLUTION_VERSION,
            algorithm: algorithm.to_string(),
            kind,
            parameters: BTreeMap::new(),
            islands: Vec::new(),
            lines: Vec::new(),
            cover: None,
            families: None,
            steps: Vec::new(),
            validity: BTreeMap::new(),
            cardinalities: BTreeMap::new(),
            ratios: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solution serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json()).map_err(io_err(path))
    }

    /// Recomputes every flag and the cardinalities, fills them in, and
    /// returns the violation messages.
    pub fn certify(&mut self, inst: &Instance) -> Vec<String> {
        let (validity, messages) = check(inst, self, self.kind);
        self.validity = validity;
        self.cardinalities
            .insert("islands".into(), self.islands.len());
        if self.kind == SolutionKind::Lines {
            self.cardinalities.insert("lines".into(), self.lines.len());
        }
        if let Some(c) = &self.cover {
            self.cardinalities.insert("cover".into(), c.len());
        }
        messages
    }
}

/// Outcome of re-running the verifiers on a solution file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub validity: BTreeMap<String, bool>,
    pub messages: Vec<String>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.messages.is_empty()
    }
}

/// Re-verifies `sol` read as `kind` and compares against its recorded
/// validity flags and cardinalities.
pub fn verify_solution(inst: &Instance, sol: &SolutionFile, kind: SolutionKind) -> Verification {
    let (validity, mut messages) = check(inst, sol, kind);
    if kind == sol.kind {
        for (flag, &stored) in &sol.validity {
            match validity.get(flag) {
                Some(&v) if v == stored => {}
                Some(&v) => messages.push(format!(
                    "stale flag {flag}: recorded {stored}, recomputed {v}"
                )),
                None => messages.push(format!("unknown flag {flag}")),
            }
        }
        for flag in validity.keys() {
            if !sol.validity.contains_key(flag) {
                messages.push(format!("missing flag {flag}"));
            }
        }
        let expect = [
            ("islands", Some(sol.islands.len())),
            (
                "lines",
                (sol.kind == SolutionKind::Lines).then_some(sol.lines.len()),
            ),
            ("cover", sol.cover.as_ref().map(Vec::len)),
        ];
        for (key, actual) in expect {
            if let (Some(&stored), Some(actual)) = (sol.cardinalities.get(key), actual) {
                if stored != actual {
                    messages.push(format!(
                        "stale cardinality {key}: recorded {stored}, found {actual}"
                    ));
                }
            }
        }
    }
    Verification { validity, messages }
}

fn check(
    inst: &Instance,
    sol: &SolutionFile,
    kind: SolutionKind,
) -> (BTreeMap<String, bool>, Vec<String>) {
    let mut validity = BTreeMap::new();
    let mut messages = Vec::new();
    let mut record = |flag: &str, outcome: Result<(), String>| {
        validity.insert(flag.to_string(), outcome.is_ok());
        if let Err(m) = outcome {
            messages.push(format!("{flag}: {m}"));
        }
    };
    match kind {
        SolutionKind::Partition => {
            record(
                "partition",
                first(verify_partition_sets(inst, &sol.islands)),
            );
            if let (Some(cover), Some(fams)) = (&sol.cover, &sol.families) {
                let cover_ok = first(verify_cover_sets(inst, cover));
                let built = cover_ok.clone().and_then(|_| build_cover(inst, cover));
                record("cover", cover_ok);
                match built {
                    Ok(c) => {
                        record("compatible", check_compatible(inst, &c, fams));
                        record("arrangement", check_arrangement(&c));
                    }
                    Err(m) => {
                        record("compatible", Err(m.clone()));
                        record("arrangement", Err(m));
                    }
                }
            }
        }
        SolutionKind::Cover => {
            record("cover", first(verify_cover_sets(inst, &sol.islands)));
        }
        SolutionKind::Lines => {
            let lines: Result<Vec<SeparatingLine>, String> =
                sol.lines.iter().map(LineRecord::to_line).collect();
            match lines {
                Ok(lines) => {
                    record("separating", first(verify_separating(inst, &lines)));
                    let induced = partition_from_lines(inst, &lines).map_err(|e| e.to_string());
                    let groups = induced.map(|p| {
                        p.parts
                            .iter()
                            .map(|i| i.members().to_vec())
                            .collect::<Vec<_>>()
                    });
                    record(
                        "partition",
                        groups.and_then(|g| {
                            if g == sol.islands {
                                first(verify_partition_sets(inst, &g))
                            } else {
                                Err("recorded groups differ from the groups the lines induce"
                                    .into())
                            }
                        }),
                    );
                }
                Err(m) => {
                    record("separating", Err(m.clone()));
                    record("partition", Err(m));
                }
            }
        }
    }
    (validity, messages)
}

fn first(r: islands::oracles::Report) -> Result<(), String> {
    match r.first() {
        None => Ok(()),
        Some(m) => Err(m.to_string()),
    }
}

fn build_cover(inst: &Instance, sets: &[Vec<usize>]) -> Result<Cover, String> {
    let islands = sets
        .iter()
        .map(|m| Island::from_members(m, inst).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Cover {
        per_step: Vec::new(),
        islands,
    })
}

fn check_compatible(
    inst: &Instance,
    cover: &Cover,
    fams: &[Vec<Vec<usize>>],
) -> Result<(), String> {
    let families = fams
        .iter()
        .map(|f| {
            f.iter()
                .map(|m| Island::from_members(m, inst).map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    first(verify_compatible(
        inst,
        cover,
        &CompatibleFamilies { families },
    ))
}

/// Rebuilds the bold subdivision from the cover and validates it.
fn check_arrangement(cover: &Cover) -> Result<(), String> {
    let mut sub = empty_subdivision();
    for island in &cover.islands {
        sub = sub.bold_augment(island, None).map_err(|e| e.to_string())?;
    }
    let report = sub.validate();
    match report.first() {
        None => Ok(()),
        Some(m) => Err(m.to_string()),
    }
}
