//! Subcommand bodies, kept free of argument parsing.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use islands::algos::{
    disjoint_greedy, extract_compatible_partition, line_greedy, overlap_greedy,
    partition_from_lines, CompatibleFamilies, Cover, Partition, SeparatingLine,
};
use islands::arrangement::{empty_subdivision, Subdivision};
use islands::generators::{
    checkerboard_cross, flat_tree, grid_with_rectangles, random_instance, FlatTreeParams,
    GeneratedInstance,
};
use islands::geom::Scalar;
use islands::island::{Instance, Island};
use islands::oracles::{exact_min_cover, exact_min_partition, CertificateKind, ORACLE_LIMIT};

use crate::format::{read_instance, show_ratio, write_instance};
use crate::render::render_svg;
use crate::solution::{
    verify_solution, LineRecord, SolutionFile, SolutionKind, StepLog, Verification,
};
use crate::{io_err, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    FlatTree,
    CheckerboardCross,
    GridRectangles,
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerateParams {
    pub k: Option<usize>,
    pub ell: Option<u32>,
    pub r_base: usize,
    pub n: Option<usize>,
    pub colors: usize,
    pub seed: u64,
    pub general_position: bool,
}

impl Default for GenerateParams {
    fn default() -> Self {
        GenerateParams {
            k: None,
            ell: None,
            r_base: 64,
            n: None,
            colors: 2,
            seed: 0,
            general_position: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    DisjointGreedy,
    OverlapGreedy,
    Bold,
    LineGreedy,
    ExactPartition,
    ExactCover,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::DisjointGreedy => "disjoint-greedy",
            Algorithm::OverlapGreedy => "overlap-greedy",
            Algorithm::Bold => "bold",
            Algorithm::LineGreedy => "line-greedy",
            Algorithm::ExactPartition => "exact-partition",
            Algorithm::ExactCover => "exact-cover",
        }
    }
}

/// `dir/stem.name.json` next to an instance at `dir/stem.ext`.
pub fn sidecar(instance: &Path, name: &str) -> PathBuf {
    let stem = instance
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    instance.with_file_name(format!("{stem}.{name}.json"))
}

fn need<T>(v: Option<T>, flag: &str, family: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("{family} needs --{flag}")))
}

pub fn generate(family: Family, p: &GenerateParams) -> Result<GeneratedInstance, CliError> {
    let g = match family {
        Family::FlatTree => flat_tree(&FlatTreeParams::scaled(
            need(p.ell, "ell", "flat-tree")?,
            p.r_base,
        ))?,
        Family::CheckerboardCross => checkerboard_cross(need(p.k, "k", "checkerboard-cross")?)?,
        Family::GridRectangles => grid_with_rectangles(need(p.k, "k", "grid-rectangles")?)?,
        Family::Random => random_instance(
            need(p.n, "n", "random")?,
            p.colors,
            p.seed,
            p.general_position,
        )?,
    };
    Ok(g)
}

/// Writes the instance and one solution file per witness; returns the paths
/// written.
pub fn cmd_generate(
    family: Family,
    p: &GenerateParams,
    out: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let g = generate(family, p)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    write_instance(out, &g.instance)?;
    let mut written = vec![out.to_path_buf()];
    for (name, cert) in &g.witnesses {
        let kind = match cert.kind {
            CertificateKind::WitnessPartition => SolutionKind::Partition,
            CertificateKind::WitnessCover => SolutionKind::Cover,
            CertificateKind::AlternatingConvex => continue,
        };
        let mut sol = SolutionFile::new("witness", kind);
        sol.parameters = g.metadata.clone();
        sol.parameters.insert("witness".into(), name.clone());
        sol.islands = cert.payload.clone();
        sol.certify(&g.instance);
        sol.cardinalities.insert("bound".into(), cert.bound);
        let path = sidecar(out, name);
        sol.write(&path)?;
        written.push(path);
    }
    Ok(written)
}

fn members(islands: &[Island]) -> Vec<Vec<usize>> {
    islands.iter().map(|i| i.members().to_vec()).collect()
}

fn steps_from_sizes(n: usize, sizes: impl IntoIterator<Item = usize>) -> Vec<StepLog> {
    let mut left = n;
    sizes
        .into_iter()
        .enumerate()
        .map(|(k, s)| {
            left -= s.min(left);
            StepLog {
                step: k + 1,
                newly_covered: Some(s),
                uncovered: Some(left),
                ..Default::default()
            }
        })
        .collect()
}

/// Per chosen line, the bichromatic pairs it separates first and those left.
fn line_steps(inst: &Instance, lines: &[SeparatingLine]) -> Vec<StepLog> {
    let n = inst.len();
    let mut open: BTreeSet<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| inst.color(i) != inst.color(j))
        .collect();
    lines
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let before = open.len();
            open.retain(|&(i, j)| l.side(inst.point(i)) == l.side(inst.point(j)));
            StepLog {
                step: k + 1,
                newly_covered: Some(before - open.len()),
                uncovered: Some(open.len()),
                ..Default::default()
            }
        })
        .collect()
}

/// Bold overlap-greedy that also hands back the source cover.
pub fn bold(
    inst: &Instance,
    opt_p: Option<usize>,
) -> Result<(Cover, Partition, CompatibleFamilies, Subdivision), CliError> {
    let cover = overlap_greedy(inst)?;
    let mut sub = empty_subdivision();
    for island in &cover.islands {
        sub = sub.bold_augment(island, opt_p)?;
    }
    let (p, fams) = extract_compatible_partition(&sub, &cover, inst)?;
    Ok((cover, p, fams, sub))
}

fn ratio(a: usize, b: usize) -> String {
    show_ratio(&Scalar::new(a.into(), b.into()))
}

/// Runs one algorithm and certifies the result.
pub fn run(algo: Algorithm, inst: &Instance, exact: bool) -> Result<SolutionFile, CliError> {
    let n = inst.len();
    let exact = exact && n <= ORACLE_LIMIT;
    let opt_p = if exact || algo == Algorithm::ExactPartition {
        Some(exact_min_partition(inst)?)
    } else {
        None
    };
    let opt_c = if exact || algo == Algorithm::ExactCover {
        Some(exact_min_cover(inst)?)
    } else {
        None
    };
    let mut sol;
    match algo {
        Algorithm::DisjointGreedy => {
            let p = disjoint_greedy(inst)?;
            sol = SolutionFile::new(algo.name(), SolutionKind::Partition);
            sol.islands = members(&p.parts);
            sol.steps = steps_from_sizes(n, p.parts.iter().map(Island::len));
        }
        Algorithm::OverlapGreedy => {
            let c = overlap_greedy(inst)?;
            sol = SolutionFile::new(algo.name(), SolutionKind::Cover);
            sol.islands = members(&c.islands);
            sol.steps = steps_from_sizes(n, c.per_step.iter().copied());
        }
        Algorithm::Bold => {
            let (cover, p, fams, sub) = bold(inst, opt_p.as_ref().map(|o| o.0))?;
            sol = SolutionFile::new(algo.name(), SolutionKind::Partition);
            sol.islands = members(&p.parts);
            sol.cover = Some(members(&cover.islands));
            sol.families = Some(fams.families.iter().map(|f| members(f)).collect());
            sol.steps = steps_from_sizes(n, cover.per_step.iter().copied());
            for (log, rec) in sol.steps.iter_mut().zip(sub.steps()) {
                log.faces = Some(rec.faces);
                log.face_increase = Some(rec.face_increase);
                log.face_bound = rec.bound;
                log.crossings = Some(rec.crossings);
            }
        }
        Algorithm::LineGreedy => {
            let lines = line_greedy(inst);
            let p = partition_from_lines(inst, &lines)?;
            sol = SolutionFile::new(algo.name(), SolutionKind::Lines);
            sol.islands = members(&p.parts);
            sol.lines = lines.iter().map(LineRecord::from_line).collect();
            sol.steps = line_steps(inst, &lines);
        }
        Algorithm::ExactPartition => {
            let (_, p) = opt_p.clone().expect("computed above");
            sol = SolutionFile::new(algo.name(), SolutionKind::Partition);
            sol.islands = members(&p.parts);
        }
        Algorithm::ExactCover => {
            let (_, c) = opt_c.clone().expect("computed above");
            sol = SolutionFile::new(algo.name(), SolutionKind::Cover);
            sol.islands = members(&c.islands);
        }
    }
    sol.parameters.insert("n".into(), n.to_string());
    sol.parameters
        .insert("colors".into(), inst.color_count().to_string());
    let messages = sol.certify(inst);
    let size = sol.islands.len();
    if let Some((o, _)) = &opt_p {
        sol.cardinalities.insert("opt_partition".into(), *o);
        if sol.kind != SolutionKind::Cover {
            sol.ratios
                .insert("islands/opt_partition".into(), ratio(size, *o));
        }
    }
    if let Some((o, _)) = &opt_c {
        sol.cardinalities.insert("opt_cover".into(), *o);
        if sol.kind == SolutionKind::Cover {
            sol.ratios
                .insert("islands/opt_cover".into(), ratio(size, *o));
        }
    }
    if let Some(m) = messages.first() {
        sol.parameters.insert("first_violation".into(), m.clone());
    }
    Ok(sol)
}

/// Runs, writes the solution (to `out` or stdout), and fails with a
/// validation error when any flag is false.
pub fn cmd_run(
    algo: Algorithm,
    instance: &Path,
    out: Option<&Path>,
    exact: bool,
) -> Result<SolutionFile, CliError> {
    let inst = read_instance(instance)?;
    let mut sol = run(algo, &inst, exact)?;
    let name = instance
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    sol.parameters.insert("instance".into(), name);
    match out {
        Some(p) => sol.write(p)?,
        None => print!("{}", sol.to_json()),
    }
    if let Some(m) = sol.parameters.get("first_violation") {
        return Err(CliError::Validation(m.clone()));
    }
    Ok(sol)
}

pub fn cmd_verify(
    instance: &Path,
    solution: &Path,
    as_kind: Option<SolutionKind>,
) -> Result<Verification, CliError> {
    let inst = read_instance(instance)?;
    let sol = SolutionFile::read(solution)?;
    let n = inst.len();
    if let Some(bad) = sol.islands.iter().flatten().find(|&&i| i >= n) {
        return Err(CliError::Validation(format!(
            "index {bad} not in the instance ({n} points)"
        )));
    }
    Ok(verify_solution(&inst, &sol, as_kind.unwrap_or(sol.kind)))
}

pub fn cmd_render(instance: &Path, solution: Option<&Path>, out: &Path) -> Result<(), CliError> {
    let inst = read_instance(instance)?;
    let (islands, lines) = match solution {
        None => (Vec::new(), Vec::new()),
        Some(p) => {
            let sol = SolutionFile::read(p)?;
            if let Some(bad) = sol.islands.iter().flatten().find(|&&i| i >= inst.len()) {
                return Err(CliError::Validation(format!(
                    "index {bad} not in the instance"
                )));
            }
            let lines = sol
                .lines
                .iter()
                .map(LineRecord::to_line)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|m| CliError::Parse {
                    path: p.to_path_buf(),
                    line: 0,
                    msg: m,
                })?;
            (sol.islands, lines)
        }
    };
    std::fs::write(out, render_svg(&inst, &islands, &lines)).map_err(io_err(out))
}
