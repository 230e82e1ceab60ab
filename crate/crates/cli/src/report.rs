//! Per-instance tables over a directory of instance files.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use islands::algos::{disjoint_greedy, harmonic, line_greedy, partition_from_lines};
use islands::geom::Scalar;
use islands::island::Instance;
use islands::oracles::{
    exact_min_cover, exact_min_partition, max_pairwise_boundary_intersections, ORACLE_LIMIT,
};
use serde::Serialize;

use crate::commands::bold;
use crate::format::{looks_like_instance, parse_instance, show_ratio};
use crate::solution::{SolutionFile, SolutionKind};
use crate::{io_err, CliError};

/// Line-greedy is skipped above this size; its candidate set is cubic.
pub const LINE_GREEDY_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Ok,
    Fail,
    Unchecked,
}

impl Check {
    fn label(&self) -> &'static str {
        match self {
            Check::Ok => "ok",
            Check::Fail => "FAIL",
            Check::Unchecked => "unchecked",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub instance: String,
    pub n: usize,
    pub colors: usize,
    pub disjoint_greedy: Option<usize>,
    pub overlap_greedy: Option<usize>,
    pub bold: Option<usize>,
    pub line_greedy_lines: Option<usize>,
    pub line_greedy_parts: Option<usize>,
    pub opt_partition: Option<usize>,
    pub opt_cover: Option<usize>,
    /// Smallest witness partition found next to the instance.
    pub witness_partition: Option<usize>,
    /// "exact", "witness" or "none": what the ratios divide by.
    pub reference: String,
    pub ratio_bold: Option<String>,
    pub ratio_disjoint: Option<String>,
    pub ratio_overlap_cover: Option<String>,
    /// Pairwise boundary crossings of the cover against `2 Opt_P`.
    pub crossing_bound: Check,
    /// Face-increase bound and subdivision validation of the bold run.
    pub face_bound: Check,
    /// `|cover| <= H(n) Opt_C`.
    pub harmonic_bound: Check,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table {
    pub rows: Vec<Row>,
}

impl Table {
    pub fn failed(&self) -> bool {
        self.rows.iter().any(|r| {
            [&r.crossing_bound, &r.face_bound, &r.harmonic_bound].contains(&&Check::Fail)
                || !r.errors.is_empty()
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let header = [
            "instance",
            "n",
            "col",
            "disjoint",
            "overlap",
            "bold",
            "lines",
            "opt_p",
            "opt_c",
            "ref",
            "bold/ref",
            "disj/ref",
            "over/opt_c",
            "crossing",
            "faces",
            "harmonic",
        ];
        let show = |v: &Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
        let text = |v: &Option<String>| v.clone().unwrap_or_else(|| "-".into());
        let mut cells: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for r in &self.rows {
            let lines = match (r.line_greedy_lines, r.line_greedy_parts) {
                (Some(l), Some(p)) => format!("{l}/{p}"),
                _ => "-".into(),
            };
            let reference = match (r.reference.as_str(), r.witness_partition) {
                ("witness", Some(w)) => format!("witness<={w}"),
                (s, _) => s.to_string(),
            };
            cells.push(vec![
                r.instance.clone(),
                r.n.to_string(),
                r.colors.to_string(),
                show(&r.disjoint_greedy),
                show(&r.overlap_greedy),
                show(&r.bold),
                lines,
                show(&r.opt_partition),
                show(&r.opt_cover),
                reference,
                text(&r.ratio_bold),
                text(&r.ratio_disjoint),
                text(&r.ratio_overlap_cover),
                r.crossing_bound.label().into(),
                r.face_bound.label().into(),
                r.harmonic_bound.label().into(),
            ]);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| cells.iter().map(|row| row[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &cells {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        for r in &self.rows {
            for e in &r.errors {
                out.push_str(&format!("{}: {e}\n", r.instance));
            }
        }
        out
    }
}

fn ratio(a: usize, b: usize) -> String {
    show_ratio(&Scalar::new(a.into(), b.into()))
}

/// Smallest witness partition among `<stem>.*.json` files beside `path`.
fn witness_bound(path: &Path, siblings: &[PathBuf]) -> Option<usize> {
    let stem = path.file_stem()?.to_string_lossy().into_owned();
    siblings
        .iter()
        .filter(|p| {
            let name = p
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            name.starts_with(&format!("{stem}.")) && name.ends_with(".json")
        })
        .filter_map(|p| SolutionFile::read(p).ok())
        .filter(|s| s.algorithm == "witness" && s.kind == SolutionKind::Partition)
        .filter(|s| s.validity.get("partition") == Some(&true))
        .map(|s| s.islands.len())
        .min()
}

pub fn report_instance(name: &str, inst: &Instance, witness: Option<usize>) -> Row {
    let n = inst.len();
    let mut errors = Vec::new();
    let mut note = |what: &str, e: CliError| errors.push(format!("{what}: {e}"));
    let (opt_p, opt_c) = if n <= ORACLE_LIMIT {
        let p = exact_min_partition(inst).map(|r| r.0);
        let c = exact_min_cover(inst).map(|r| r.0);
        (
            p.map_err(|e| note("exact-partition", e.into())).ok(),
            c.map_err(|e| note("exact-cover", e.into())).ok(),
        )
    } else {
        (None, None)
    };
    let disjoint = disjoint_greedy(inst)
        .map(|p| p.len())
        .map_err(|e| note("disjoint-greedy", e.into()))
        .ok();
    let bold_run = bold(inst, opt_p);
    let (cover, bold_size, face_bound) = match bold_run {
        Ok((cover, p, _, sub)) => {
            let check = match opt_p {
                Some(_) if sub.validate().passed() => Check::Ok,
                Some(_) => Check::Fail,
                None => Check::Unchecked,
            };
            (Some(cover), Some(p.len()), check)
        }
        Err(e) => {
            let check = if e.exit_code() == 2 && opt_p.is_some() {
                Check::Fail
            } else {
                Check::Unchecked
            };
            note("bold", e);
            (None, None, check)
        }
    };
    let (lines, line_parts) = if n <= LINE_GREEDY_LIMIT {
        let lines = line_greedy(inst);
        match partition_from_lines(inst, &lines) {
            Ok(p) => (Some(lines.len()), Some(p.len())),
            Err(e) => {
                note("line-greedy", e.into());
                (Some(lines.len()), None)
            }
        }
    } else {
        (None, None)
    };
    let crossing_bound = match (&cover, opt_p) {
        (Some(c), Some(o)) => match max_pairwise_boundary_intersections(c) {
            Ok(m) if m <= 2 * o => Check::Ok,
            _ => Check::Fail,
        },
        _ => Check::Unchecked,
    };
    let harmonic_bound = match (&cover, opt_c) {
        (Some(c), Some(o)) => {
            let lhs = Scalar::from_integer(c.islands.len().into());
            if lhs <= harmonic(n) * Scalar::from_integer(o.into()) {
                Check::Ok
            } else {
                Check::Fail
            }
        }
        _ => Check::Unchecked,
    };
    let (reference, denom) = match (opt_p, witness) {
        (Some(o), _) => ("exact", Some(o)),
        (None, Some(w)) => ("witness", Some(w)),
        _ => ("none", None),
    };
    let over = cover.as_ref().map(|c| c.islands.len());
    Row {
        instance: name.to_string(),
        n,
        colors: inst.color_count(),
        disjoint_greedy: disjoint,
        overlap_greedy: over,
        bold: bold_size,
        line_greedy_lines: lines,
        line_greedy_parts: line_parts,
        opt_partition: opt_p,
        opt_cover: opt_c,
        witness_partition: witness,
        reference: reference.to_string(),
        ratio_bold: bold_size.zip(denom).map(|(a, b)| ratio(a, b)),
        ratio_disjoint: disjoint.zip(denom).map(|(a, b)| ratio(a, b)),
        ratio_overlap_cover: over.zip(opt_c).map(|(a, b)| ratio(a, b)),
        crossing_bound,
        face_bound,
        harmonic_bound,
        errors,
    }
}

/// Reports every instance file in `dir` (sorted by name), using all available
/// cores.
pub fn cmd_report(dir: &Path) -> Result<Table, CliError> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io_err(dir))?
        .map(|e| e.map(|e| e.path()).map_err(io_err(dir)))
        .collect::<Result<_, _>>()?;
    entries.sort();
    let mut jobs = Vec::new();
    for path in entries.iter().filter(|p| p.is_file()) {
        if path.extension().is_some_and(|e| e == "json") {
            continue;
        }
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        if looks_like_instance(&text) {
            let inst = parse_instance(&text, path)?;
            let name = path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            jobs.push((name, inst, witness_bound(path, &entries)));
        }
    }
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<Row>>> = Mutex::new(vec![None; jobs.len()]);
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(jobs.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some((name, inst, witness)) = jobs.get(k) else {
                    break;
                };
                let row = report_instance(name, inst, *witness);
                rows.lock().expect("no worker panicked")[k] = Some(row);
            });
        }
    });
    let rows = rows
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect();
    Ok(Table { rows })
}
