//! Verifiers and exact brute-force solvers for small instances.
//!
//! Verifiers recompute hulls from member indices and never rely on the search
//! kernel or the arrangement.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use crate::algos::{CompatibleFamilies, Cover, Partition, SeparatingLine};
use crate::geom::{
    boundary_intersection_count, convex_hull, hulls_intersect, point_in_hull, Containment,
    ConvexPolygon, GeomError,
};
use crate::island::{enumerate_islands, Instance, Island, IslandError};

/// Largest instance the exact solvers accept.
pub const ORACLE_LIMIT: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Report {
    pub violations: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&str> {
        self.violations.first().map(String::as_str)
    }

    fn fail(&mut self, msg: String) {
        self.violations.push(msg);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CertificateKind {
    AlternatingConvex,
    WitnessPartition,
    WitnessCover,
}

/// A checkable claim about an instance. For alternating certificates the
/// payload is a single index list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub payload: Vec<Vec<usize>>,
    pub bound: usize,
}

/// Member lists checked as monochromatic islands; returns their hulls.
fn check_sets(
    inst: &Instance,
    sets: &[&[usize]],
    report: &mut Report,
) -> Vec<Option<ConvexPolygon>> {
    sets.iter()
        .enumerate()
        .map(|(k, m)| {
            if m.is_empty() {
                report.fail(format!("set {k} is empty"));
                return None;
            }
            if let Some(&bad) = m.iter().find(|&&i| i >= inst.len()) {
                report.fail(format!("set {k} has index {bad} out of range"));
                return None;
            }
            let c = inst.color(m[0]);
            if m.iter().any(|&i| inst.color(i) != c) {
                report.fail(format!("not monochromatic: set {k}"));
            }
            let pts: Vec<_> = m.iter().map(|&i| inst.point(i).clone()).collect();
            let hull = convex_hull(&pts).ok()?;
            let inside: BTreeSet<usize> = m.iter().copied().collect();
            if let Some(i) = (0..inst.len()).find(|i| {
                !inside.contains(i) && point_in_hull(inst.point(*i), &hull, Containment::Closed)
            }) {
                report.fail(format!(
                    "not an island: set {k} contains point {i} in its hull"
                ));
            }
            Some(hull)
        })
        .collect()
}

fn check_union(inst: &Instance, sets: &[&[usize]], exact: bool, report: &mut Report) {
    let mut count = vec![0usize; inst.len()];
    for m in sets {
        for &i in m.iter().filter(|&&i| i < inst.len()) {
            count[i] += 1;
        }
    }
    if let Some(i) = count.iter().position(|&c| c == 0) {
        report.fail(format!("not covering: point {i} is in no set"));
    }
    if exact {
        if let Some(i) = count.iter().position(|&c| c > 1) {
            report.fail(format!(
                "not a partition: point {i} is in {} sets",
                count[i]
            ));
        }
    }
}

fn check_disjoint(hulls: &[Option<ConvexPolygon>], report: &mut Report) {
    for a in 0..hulls.len() {
        for b in a + 1..hulls.len() {
            if let (Some(x), Some(y)) = (&hulls[a], &hulls[b]) {
                if hulls_intersect(x, y) {
                    report.fail(format!("hulls intersect: sets {a} and {b}"));
                    return;
                }
            }
        }
    }
}

pub fn verify_partition_sets(inst: &Instance, sets: &[Vec<usize>]) -> Report {
    let mut r = Report::default();
    let refs: Vec<&[usize]> = sets.iter().map(Vec::as_slice).collect();
    check_union(inst, &refs, true, &mut r);
    let hulls = check_sets(inst, &refs, &mut r);
    check_disjoint(&hulls, &mut r);
    r
}

pub fn verify_cover_sets(inst: &Instance, sets: &[Vec<usize>]) -> Report {
    let mut r = Report::default();
    let refs: Vec<&[usize]> = sets.iter().map(Vec::as_slice).collect();
    check_union(inst, &refs, false, &mut r);
    check_sets(inst, &refs, &mut r);
    r
}

fn member_lists(islands: &[Island]) -> Vec<Vec<usize>> {
    islands.iter().map(|i| i.members().to_vec()).collect()
}

/// Exact partition into monochromatic islands with pairwise disjoint closed
/// hulls.
pub fn verify_partition(inst: &Instance, parts: &Partition) -> Report {
    verify_partition_sets(inst, &member_lists(&parts.parts))
}

pub fn verify_cover(inst: &Instance, cover: &Cover) -> Report {
    verify_cover_sets(inst, &member_lists(&cover.islands))
}

/// The three clauses of compatibility: same union, each family inside its
/// source island, all produced hulls pairwise disjoint.
pub fn verify_compatible(inst: &Instance, cover: &Cover, fams: &CompatibleFamilies) -> Report {
    let mut r = Report::default();
    if cover.islands.len() != fams.families.len() {
        r.fail(format!(
            "length mismatch: {} islands, {} families",
            cover.islands.len(),
            fams.families.len()
        ));
        return r;
    }
    let src: BTreeSet<usize> = cover
        .islands
        .iter()
        .flat_map(|i| i.members().iter().copied())
        .collect();
    let out: BTreeSet<usize> = fams
        .families
        .iter()
        .flatten()
        .flat_map(|i| i.members().iter().copied())
        .collect();
    if src != out {
        r.fail("union: families do not cover the same points as the cover".to_string());
    }
    for (k, (island, fam)) in cover.islands.iter().zip(&fams.families).enumerate() {
        if let Some(i) = fam
            .iter()
            .flat_map(|f| f.members().iter())
            .find(|i| !island.contains(**i))
        {
            r.fail(format!(
                "containment: family {k} has point {i} outside its island"
            ));
        }
    }
    let all: Vec<Vec<usize>> = fams
        .families
        .iter()
        .flatten()
        .map(|i| i.members().to_vec())
        .collect();
    let refs: Vec<&[usize]> = all.iter().map(Vec::as_slice).collect();
    let hulls = check_sets(inst, &refs, &mut r);
    check_disjoint(&hulls, &mut r);
    r
}

/// Every cell of the line arrangement holds one color; no point on a line.
pub fn verify_separating(inst: &Instance, lines: &[SeparatingLine]) -> Report {
    let mut r = Report::default();
    let mut cells: BTreeMap<Vec<bool>, usize> = BTreeMap::new();
    for (i, p) in inst.points().iter().enumerate() {
        let mut key = Vec::with_capacity(lines.len());
        for (k, l) in lines.iter().enumerate() {
            match l.side(p) {
                Ordering::Equal => {
                    r.fail(format!("point {i} lies on line {k}"));
                    return r;
                }
                o => key.push(o == Ordering::Greater),
            }
        }
        match cells.get(&key) {
            Some(&j) if inst.color(j) != inst.color(i) => {
                r.fail(format!("face not monochromatic: points {j} and {i}"));
                return r;
            }
            Some(_) => {}
            None => {
                cells.insert(key, i);
            }
        }
    }
    r
}

/// `2k` points in strictly convex position whose colors alternate around the
/// hull certify that every partition has at least `k + 1` parts.
pub fn verify_alternating_certificate(inst: &Instance, indices: &[usize]) -> (bool, usize) {
    let bound = indices.len() / 2 + 1;
    let distinct: BTreeSet<usize> = indices.iter().copied().collect();
    if indices.len() < 4
        || indices.len() % 2 == 1
        || distinct.len() != indices.len()
        || indices.iter().any(|&i| i >= inst.len())
    {
        return (false, bound);
    }
    let pts: Vec<_> = indices.iter().map(|&i| inst.point(i).clone()).collect();
    let Ok(hull) = convex_hull(&pts) else {
        return (false, bound);
    };
    if hull.len() != pts.len() {
        return (false, bound);
    }
    let color_at = |p: &crate::geom::Point| {
        let k = pts.iter().position(|q| q == p).unwrap();
        inst.color(indices[k])
    };
    let v = hull.vertices();
    let ok = (0..v.len()).all(|i| color_at(&v[i]) != color_at(&v[(i + 1) % v.len()]));
    (ok, bound)
}

pub fn verify_certificate(inst: &Instance, cert: &Certificate) -> Report {
    let mut r = match cert.kind {
        CertificateKind::WitnessPartition => verify_partition_sets(inst, &cert.payload),
        CertificateKind::WitnessCover => verify_cover_sets(inst, &cert.payload),
        CertificateKind::AlternatingConvex => {
            let mut r = Report::default();
            let idx = cert.payload.first().cloned().unwrap_or_default();
            let (ok, bound) = verify_alternating_certificate(inst, &idx);
            if !ok {
                r.fail("alternating certificate invalid".to_string());
            } else if bound != cert.bound {
                r.fail(format!(
                    "alternating bound is {bound}, certificate claims {}",
                    cert.bound
                ));
            }
            return r;
        }
    };
    if cert.payload.len() != cert.bound {
        r.fail(format!(
            "certificate has {} sets but claims {}",
            cert.payload.len(),
            cert.bound
        ));
    }
    r
}

/// Largest number of boundary crossings over all pairs of cover islands.
pub fn max_pairwise_boundary_intersections(cover: &Cover) -> Result<usize, GeomError> {
    let mut best = 0;
    for (a, x) in cover.islands.iter().enumerate() {
        for y in &cover.islands[a + 1..] {
            best = best.max(boundary_intersection_count(x.hull(), y.hull())?);
        }
    }
    Ok(best)
}

fn guard(inst: &Instance) -> Result<(), IslandError> {
    if inst.len() > ORACLE_LIMIT {
        return Err(IslandError::OracleSizeLimit {
            n: inst.len(),
            limit: ORACLE_LIMIT,
        });
    }
    Ok(())
}

/// Islands containing each point, in enumeration order (largest first).
fn by_point(inst: &Instance, islands: &[Island]) -> Vec<Vec<usize>> {
    let mut at = vec![Vec::new(); inst.len()];
    for (k, isl) in islands.iter().enumerate() {
        for &i in isl.members() {
            at[i].push(k);
        }
    }
    at
}

struct PartitionSearch<'a> {
    islands: &'a [Island],
    at: Vec<Vec<usize>>,
    max_size: usize,
    best: Vec<usize>,
    chosen: Vec<usize>,
    assigned: Vec<bool>,
}

impl PartitionSearch<'_> {
    fn go(&mut self, left: usize) {
        let Some(p) = self.assigned.iter().position(|a| !a) else {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return;
        };
        if self.chosen.len() + left.div_ceil(self.max_size) >= self.best.len() {
            return;
        }
        for idx in 0..self.at[p].len() {
            let k = self.at[p][idx];
            let isl = &self.islands[k];
            if isl.members().iter().any(|&i| self.assigned[i])
                || self
                    .chosen
                    .iter()
                    .any(|&c| hulls_intersect(self.islands[c].hull(), isl.hull()))
            {
                continue;
            }
            for &i in isl.members() {
                self.assigned[i] = true;
            }
            self.chosen.push(k);
            self.go(left - isl.len());
            self.chosen.pop();
            for &i in isl.members() {
                self.assigned[i] = false;
            }
        }
    }
}

/// Minimum island partition by branch and bound on the lowest unassigned
/// point, seeded with a first-fit upper bound.
pub fn exact_min_partition(inst: &Instance) -> Result<(usize, Partition), IslandError> {
    guard(inst)?;
    let islands = enumerate_islands(inst, None)?;
    let at = by_point(inst, &islands);
    // first fit over the size-sorted list always completes via singletons
    let mut assigned = vec![false; inst.len()];
    let mut seed: Vec<usize> = Vec::new();
    for (k, isl) in islands.iter().enumerate() {
        if isl.members().iter().all(|&i| !assigned[i])
            && seed
                .iter()
                .all(|&c| !hulls_intersect(islands[c].hull(), isl.hull()))
        {
            for &i in isl.members() {
                assigned[i] = true;
            }
            seed.push(k);
        }
    }
    let mut s = PartitionSearch {
        islands: &islands,
        at,
        max_size: islands.iter().map(Island::len).max().unwrap_or(1),
        best: seed,
        chosen: Vec::new(),
        assigned: vec![false; inst.len()],
    };
    s.go(inst.len());
    let parts: Vec<Island> = s.best.iter().map(|&k| islands[k].clone()).collect();
    Ok((parts.len(), Partition { parts }))
}

struct CoverSearch<'a> {
    islands: &'a [Island],
    at: Vec<Vec<usize>>,
    max_size: usize,
    best: Vec<usize>,
    chosen: Vec<usize>,
    count: Vec<usize>,
}

impl CoverSearch<'_> {
    fn go(&mut self, left: usize) {
        let Some(p) = self.count.iter().position(|&c| c == 0) else {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return;
        };
        if self.chosen.len() + left.div_ceil(self.max_size) >= self.best.len() {
            return;
        }
        for idx in 0..self.at[p].len() {
            let k = self.at[p][idx];
            let members = self.islands[k].members();
            let fresh = members.iter().filter(|&&i| self.count[i] == 0).count();
            for &i in members {
                self.count[i] += 1;
            }
            self.chosen.push(k);
            self.go(left - fresh);
            self.chosen.pop();
            for &i in members {
                self.count[i] -= 1;
            }
        }
    }
}

/// Minimum island cover; only inclusion-maximal islands are branched on.
pub fn exact_min_cover(inst: &Instance) -> Result<(usize, Cover), IslandError> {
    guard(inst)?;
    let all = enumerate_islands(inst, None)?;
    let sets: Vec<BTreeSet<usize>> = all
        .iter()
        .map(|i| i.members().iter().copied().collect())
        .collect();
    let maximal: Vec<Island> = all
        .iter()
        .enumerate()
        .filter(|(k, _)| {
            !sets
                .iter()
                .enumerate()
                .any(|(j, s)| j != *k && s.len() > sets[*k].len() && sets[*k].is_subset(s))
        })
        .map(|(_, i)| i.clone())
        .collect();
    let at = by_point(inst, &maximal);
    let mut s = CoverSearch {
        islands: &maximal,
        at,
        max_size: maximal.iter().map(Island::len).max().unwrap_or(1),
        best: (0..inst.len() + 1).collect(),
        chosen: Vec::new(),
        count: vec![0; inst.len()],
    };
    s.go(inst.len());
    let islands: Vec<Island> = s.best.iter().map(|&k| maximal[k].clone()).collect();
    let per_step = islands.iter().map(Island::len).collect();
    Ok((islands.len(), Cover { islands, per_step }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    fn inst(items: &[(i64, i64, usize)]) -> Instance {
        Instance::from_colored(
            items
                .iter()
                .map(|&(x, y, c)| (Point::from_ints(x, y), c))
                .collect(),
        )
        .unwrap()
    }

    fn rbrb() -> Instance {
        inst(&[(0, 0, 0), (1, 0, 1), (1, 1, 0), (0, 1, 1)])
    }

    #[test]
    fn singletons_partition() {
        let s = rbrb();
        let sets: Vec<Vec<usize>> = (0..4).map(|i| vec![i]).collect();
        assert!(verify_partition_sets(&s, &sets).passed());
        assert!(verify_cover_sets(&s, &sets).passed());
    }

    #[test]
    fn rbrb_partition_with_diagonal() {
        let s = rbrb();
        assert!(verify_partition_sets(&s, &[vec![0, 2], vec![1], vec![3]]).passed());
        let r = verify_partition_sets(&s, &[vec![0, 2], vec![1, 3]]);
        assert!(r.first().unwrap().starts_with("hulls intersect"));
    }

    #[test]
    fn cover_failures() {
        let s = rbrb();
        let r = verify_cover_sets(&s, &[vec![0, 2], vec![1]]);
        assert!(r.first().unwrap().starts_with("not covering"));
        let r = verify_cover_sets(&s, &[vec![0, 1], vec![2], vec![3]]);
        assert!(r.first().unwrap().starts_with("not monochromatic"));
    }

    #[test]
    fn compatible_clauses() {
        let s = inst(&[(0, 0, 0), (1, 0, 0), (5, 5, 1)]);
        let a = Island::from_members(&[0, 1], &s).unwrap();
        let b = Island::from_members(&[2], &s).unwrap();
        let cover = Cover {
            islands: vec![a.clone(), b.clone()],
            per_step: vec![2, 1],
        };
        let ok = CompatibleFamilies {
            families: vec![vec![a.clone()], vec![b.clone()]],
        };
        assert!(verify_compatible(&s, &cover, &ok).passed());
        let bad = CompatibleFamilies {
            families: vec![vec![a], vec![b, Island::from_members(&[0], &s).unwrap()]],
        };
        let r = verify_compatible(&s, &cover, &bad);
        assert!(r.violations.iter().any(|v| v.starts_with("containment")));
    }

    #[test]
    fn alternating_certificates() {
        let s = rbrb();
        assert_eq!(verify_alternating_certificate(&s, &[0, 1, 2, 3]), (true, 3));
        let rrbb = inst(&[(0, 0, 0), (1, 0, 0), (1, 1, 1), (0, 1, 1)]);
        assert!(!verify_alternating_certificate(&rrbb, &[0, 1, 2, 3]).0);
        let hex = inst(&[
            (2, 0, 0),
            (4, 1, 1),
            (4, 3, 0),
            (2, 4, 1),
            (0, 3, 0),
            (0, 1, 1),
        ]);
        assert_eq!(
            verify_alternating_certificate(&hex, &[0, 1, 2, 3, 4, 5]),
            (true, 4)
        );
    }

    #[test]
    fn separating_lines() {
        use crate::geom::{int, ratio};
        let s = inst(&[(0, 0, 0), (1, 0, 1)]);
        assert!(!verify_separating(&s, &[]).passed());
        let l = SeparatingLine::new(int(1), int(0), ratio(1, 2)).unwrap();
        assert!(verify_separating(&s, &[l]).passed());
    }

    #[test]
    fn exact_solvers_small() {
        let s = rbrb();
        assert_eq!(exact_min_partition(&s).unwrap().0, 3);
        assert_eq!(exact_min_cover(&s).unwrap().0, 2);
        let one = inst(&[(0, 0, 0), (3, 1, 0), (1, 5, 0), (2, 2, 0)]);
        assert_eq!(exact_min_partition(&one).unwrap().0, 1);
    }

    #[test]
    fn size_guard() {
        let pts: Vec<(i64, i64, usize)> = (0..15).map(|i| (i, i * i, 0)).collect();
        assert!(matches!(
            exact_min_partition(&inst(&pts)),
            Err(IslandError::OracleSizeLimit { n: 15, limit: 14 })
        ));
    }

    #[test]
    fn plus_shape_crossings() {
        let s = inst(&[
            (0, 1, 0),
            (3, 1, 0),
            (3, 2, 0),
            (0, 2, 0),
            (1, 0, 1),
            (2, 0, 1),
            (2, 3, 1),
            (1, 3, 1),
        ]);
        let cover = Cover {
            islands: vec![
                Island::from_members(&[0, 1, 2, 3], &s).unwrap(),
                Island::from_members(&[4, 5, 6, 7], &s).unwrap(),
            ],
            per_step: vec![4, 4],
        };
        assert_eq!(max_pairwise_boundary_intersections(&cover).unwrap(), 4);
    }
}
