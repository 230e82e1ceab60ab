//! Greedy island partitions and covers, compatible-partition extraction and
//! partitions induced by separating lines.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arrangement::{empty_subdivision, ArrangementError, Subdivision};
use crate::geom::{on_segment, point_in_hull, Containment, Point, Scalar};
use crate::island::{Instance, Island, IslandError, IslandSearch, Score, WeightSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgoError {
    #[error(transparent)]
    Island(#[from] IslandError),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error("coverage hole at {0}")]
    CoverageHole(Point),
    #[error("non-generic line: point {0} lies on {1}")]
    NonGenericLine(usize, SeparatingLine),
    #[error("lines do not separate: group {0:?} is not a monochromatic island")]
    NotSeparating(Vec<usize>),
}

/// Islands in selection order with the number of newly covered points per step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    pub islands: Vec<Island>,
    pub per_step: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub parts: Vec<Island>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// One list of sub-islands per island of the source cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibleFamilies {
    pub families: Vec<Vec<Island>>,
}

/// The line `a x + b y = c` with integer, content-reduced coefficients and the
/// first nonzero of `(a, b)` positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeparatingLine {
    a: Scalar,
    b: Scalar,
    c: Scalar,
}

impl SeparatingLine {
    /// `None` when `a` and `b` are both zero.
    pub fn new(a: Scalar, b: Scalar, c: Scalar) -> Option<Self> {
        if a.is_zero() && b.is_zero() {
            return None;
        }
        let den = a.denom().lcm(b.denom()).lcm(c.denom());
        let ints: Vec<BigInt> = [&a, &b, &c]
            .iter()
            .map(|v| (*v * Scalar::from_integer(den.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
        let mut ints: Vec<BigInt> = ints.into_iter().map(|v| v / &g).collect();
        let lead = if ints[0].is_zero() {
            &ints[1]
        } else {
            &ints[0]
        };
        if lead.is_negative() {
            ints.iter_mut().for_each(|v| *v = -&*v);
        }
        let [a, b, c]: [BigInt; 3] = ints.try_into().ok()?;
        Some(SeparatingLine {
            a: Scalar::from_integer(a),
            b: Scalar::from_integer(b),
            c: Scalar::from_integer(c),
        })
    }

    /// Line through `p` with direction `d`.
    pub fn through(p: &Point, d: (&Scalar, &Scalar)) -> Option<Self> {
        let (a, b) = (-d.1.clone(), d.0.clone());
        let c = &a * &p.x + &b * &p.y;
        SeparatingLine::new(a, b, c)
    }

    pub fn a(&self) -> &Scalar {
        &self.a
    }

    pub fn b(&self) -> &Scalar {
        &self.b
    }

    pub fn c(&self) -> &Scalar {
        &self.c
    }

    /// Sign of `a x + b y - c`.
    pub fn side(&self, p: &Point) -> Ordering {
        (&self.a * &p.x + &self.b * &p.y).cmp(&self.c)
    }
}

impl fmt::Display for SeparatingLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x + {}y = {}", self.a, self.b, self.c)
    }
}

fn pick_better(best: &mut Option<(Score, Island)>, score: Score, island: Island) {
    let better = match best {
        None => true,
        Some((s, i)) => score > *s || (score == *s && island.members() < i.members()),
    };
    if better {
        *best = Some((score, island));
    }
}

/// Repeatedly takes the island covering most uncovered points whose hull is
/// disjoint from all hulls chosen so far.
pub fn disjoint_greedy(inst: &Instance) -> Result<Partition, AlgoError> {
    let search = IslandSearch::new(inst);
    let mut covered = vec![false; inst.len()];
    let mut parts: Vec<Island> = Vec::new();
    while covered.iter().any(|c| !c) {
        let mut best: Option<(Score, Island)> = None;
        for color in inst.used_colors() {
            if !(0..inst.len()).any(|i| !covered[i] && inst.color(i) == color) {
                continue;
            }
            let mut w = WeightSpec::uniform(inst, color);
            for (i, c) in covered.iter().enumerate() {
                w.primary[i] = i64::from(!c);
            }
            w.forbidden = parts.iter().map(|p| p.hull().clone()).collect();
            let (island, score) = search.best(&w)?;
            pick_better(&mut best, score, island);
        }
        let (_, island) = best.ok_or(IslandError::NoCandidate)?;
        for &i in island.members() {
            covered[i] = true;
        }
        parts.push(island);
    }
    Ok(Partition { parts })
}

/// Repeatedly takes the island covering most uncovered points, preferring
/// islands that cover the fewest already covered points.
pub fn overlap_greedy(inst: &Instance) -> Result<Cover, AlgoError> {
    let search = IslandSearch::new(inst);
    let mut covered = vec![false; inst.len()];
    let mut islands = Vec::new();
    let mut per_step = Vec::new();
    while covered.iter().any(|c| !c) {
        let mut best: Option<(Score, Island)> = None;
        for color in inst.used_colors() {
            if !(0..inst.len()).any(|i| !covered[i] && inst.color(i) == color) {
                continue;
            }
            let mut w = WeightSpec::uniform(inst, color);
            for (i, &c) in covered.iter().enumerate() {
                w.primary[i] = i64::from(!c);
                w.secondary[i] = i64::from(c);
            }
            let (island, score) = search.best(&w)?;
            pick_better(&mut best, score, island);
        }
        let (score, island) = best.ok_or(IslandError::NoCandidate)?;
        per_step.push(score.primary as usize);
        for &i in island.members() {
            covered[i] = true;
        }
        islands.push(island);
    }
    Ok(Cover { islands, per_step })
}

/// Overlap-greedy followed by bold augmentation of every island in selection
/// order and extraction of a compatible partition from the arrangement.
pub fn bold_overlap_greedy(
    inst: &Instance,
    opt_p: Option<usize>,
) -> Result<(Partition, CompatibleFamilies, Subdivision), AlgoError> {
    let cover = overlap_greedy(inst)?;
    let mut sub = empty_subdivision();
    for island in &cover.islands {
        sub = sub.bold_augment(island, opt_p)?;
    }
    let (partition, families) = extract_compatible_partition(&sub, &cover, inst)?;
    Ok((partition, families, sub))
}

/// Assigns every point to the piece of the latest cover island containing it:
/// the face of that island's hull for polygons, the uncut chain for segments.
pub fn extract_compatible_partition(
    sub: &Subdivision,
    cover: &Cover,
    inst: &Instance,
) -> Result<(Partition, CompatibleFamilies), AlgoError> {
    let records = sub.faces();
    let mut chains: BTreeMap<usize, Vec<Vec<(Point, Point)>>> = BTreeMap::new();
    for (j, island) in cover.islands.iter().enumerate() {
        if island.hull().is_segment() {
            chains.insert(
                j,
                sub.segment_pieces(j, |v| v.boundaries.iter().any(|&o| o > j)),
            );
        }
    }

    // (island, piece) -> members
    let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for i in 0..inst.len() {
        let x = inst.point(i);
        let hole = || AlgoError::CoverageHole(x.clone());
        let j = (0..cover.islands.len())
            .rev()
            .find(|&j| cover.islands[j].contains(i))
            .ok_or_else(hole)?;
        let hull = cover.islands[j].hull();
        let piece = if hull.is_proper() {
            records
                .iter()
                .find(|r| {
                    !r.degenerate
                        && r.owner == Some(j)
                        && point_in_hull(x, &r.closure, Containment::Closed)
                })
                .map(|r| r.id)
                .ok_or_else(hole)?
        } else if hull.is_segment() {
            chains[&j]
                .iter()
                .position(|c| c.iter().any(|(a, b)| on_segment(x, a, b)))
                .ok_or_else(hole)?
        } else {
            0
        };
        groups.entry((j, piece)).or_default().push(i);
    }

    let mut families: Vec<Vec<Island>> = vec![Vec::new(); cover.islands.len()];
    for ((j, _), members) in groups {
        families[j].push(Island::from_members(&members, inst)?);
    }
    let parts = families.iter().flatten().cloned().collect();
    Ok((Partition { parts }, CompatibleFamilies { families }))
}

/// Side vector of every point, `None` if a point lies on the line.
fn sides(inst: &Instance, line: &SeparatingLine) -> Option<Vec<bool>> {
    inst.points()
        .iter()
        .map(|p| match line.side(p) {
            Ordering::Equal => None,
            o => Some(o == Ordering::Greater),
        })
        .collect()
}

/// Lines close to the line through `p` and `q` realizing the bipartitions it
/// can induce: rotated about the midpoint in both senses and shifted to both
/// sides.
fn lines_near_pair(inst: &Instance, p: &Point, q: &Point) -> Vec<SeparatingLine> {
    let d = (&q.x - &p.x, &q.y - &p.y);
    let n = (-d.1.clone(), d.0.clone());
    // side of r relative to the directed line through o with direction dir
    let side = |o: &Point, dir: &(Scalar, Scalar), r: &Point| {
        (&dir.0 * (&r.y - &o.y) - &dir.1 * (&r.x - &o.x)).cmp(&Scalar::zero())
    };
    let base: Vec<Ordering> = inst.points().iter().map(|r| side(p, &d, r)).collect();
    let stable = |o: &Point, dir: &(Scalar, Scalar)| {
        inst.points().iter().zip(&base).all(|(r, &s)| {
            let t = side(o, dir, r);
            t != Ordering::Equal && (s == Ordering::Equal || t == s)
        })
    };
    let m = p.midpoint(q);
    let half = Scalar::new(1.into(), 2.into());
    let mut out = Vec::new();
    // an input point at the pivot lies on every rotated line
    let pivots: &[i64] = if inst.points().contains(&m) {
        &[]
    } else {
        &[1, -1]
    };
    for &sign in pivots {
        let mut t = Scalar::new(sign.into(), 2.into());
        loop {
            let dir = (&d.0 + &n.0 * &t, &d.1 + &n.1 * &t);
            if stable(&m, &dir) {
                out.push(SeparatingLine::through(&m, (&dir.0, &dir.1)).unwrap());
                break;
            }
            t *= &half;
        }
    }
    for sign in [1i64, -1] {
        let mut s = Scalar::new(sign.into(), 2.into());
        loop {
            let o = Point::new(&p.x + &n.0 * &s, &p.y + &n.1 * &s);
            if stable(&o, &d) {
                out.push(SeparatingLine::through(&o, (&d.0, &d.1)).unwrap());
                break;
            }
            s *= &half;
        }
    }
    out
}

/// One line per nontrivial bipartition achievable near a line through two
/// input points; no candidate passes through an input point.
pub fn candidate_lines(inst: &Instance) -> Vec<SeparatingLine> {
    let pts = inst.points();
    let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
    let mut out = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for line in lines_near_pair(inst, &pts[i], &pts[j]) {
                let Some(mut s) = sides(inst, &line) else {
                    continue;
                };
                if s[0] {
                    s.iter_mut().for_each(|v| *v = !*v);
                }
                if s.iter().all(|v| !v) {
                    continue;
                }
                if seen.insert(s) {
                    out.push(line);
                }
            }
        }
    }
    out
}

/// Greedy set cover of bichromatic pairs by candidate lines.
pub fn line_greedy(inst: &Instance) -> Vec<SeparatingLine> {
    let n = inst.len();
    let words = n.div_ceil(64);
    let cands = candidate_lines(inst);
    let masks: Vec<Vec<u64>> = cands
        .iter()
        .map(|l| {
            let mut m = vec![0u64; words];
            for (i, p) in inst.points().iter().enumerate() {
                if l.side(p) == Ordering::Greater {
                    m[i / 64] |= 1 << (i % 64);
                }
            }
            m
        })
        .collect();
    // open[i] has bit j set when (i, j), i < j, is an uncovered bichromatic pair
    let mut open: Vec<Vec<u64>> = vec![vec![0u64; words]; n];
    for (i, row) in open.iter_mut().enumerate() {
        for j in i + 1..n {
            if inst.color(i) != inst.color(j) {
                row[j / 64] |= 1 << (j % 64);
            }
        }
    }
    let gain = |mask: &Vec<u64>, open: &Vec<Vec<u64>>| -> u64 {
        let mut total = 0u64;
        for (i, row) in open.iter().enumerate() {
            let on = mask[i / 64] >> (i % 64) & 1 == 1;
            for (w, &r) in row.iter().enumerate() {
                let other = if on { !mask[w] } else { mask[w] };
                total += (r & other).count_ones() as u64;
            }
        }
        total
    };
    let mut chosen = Vec::new();
    loop {
        let mut best: Option<(u64, usize)> = None;
        for (k, m) in masks.iter().enumerate() {
            let g = gain(m, &open);
            if g > 0 && best.is_none_or(|(bg, _)| g > bg) {
                best = Some((g, k));
            }
        }
        let Some((_, k)) = best else { break };
        let mask = &masks[k];
        for (i, row) in open.iter_mut().enumerate() {
            let on = mask[i / 64] >> (i % 64) & 1 == 1;
            for (w, r) in row.iter_mut().enumerate() {
                let other = if on { !mask[w] } else { mask[w] };
                *r &= !other;
            }
        }
        chosen.push(cands[k].clone());
    }
    chosen
}

/// Groups points by their side vector; each group must be a monochromatic
/// island.
pub fn partition_from_lines(
    inst: &Instance,
    lines: &[SeparatingLine],
) -> Result<Partition, AlgoError> {
    let mut groups: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for (i, p) in inst.points().iter().enumerate() {
        let mut key = Vec::with_capacity(lines.len());
        for l in lines {
            match l.side(p) {
                Ordering::Equal => return Err(AlgoError::NonGenericLine(i, l.clone())),
                o => key.push(o == Ordering::Greater),
            }
        }
        groups.entry(key).or_default().push(i);
    }
    let mut members: Vec<Vec<usize>> = groups.into_values().collect();
    members.sort();
    let parts = members
        .into_iter()
        .map(|m| match Island::checked(&m, inst)? {
            Some(island) => Ok(island),
            None => Err(AlgoError::NotSeparating(m)),
        })
        .collect::<Result<Vec<_>, AlgoError>>()?;
    Ok(Partition { parts })
}

/// Harmonic number `H(n)` as an exact rational.
pub fn harmonic(n: usize) -> Scalar {
    (1..=n).fold(Scalar::zero(), |acc, k| {
        acc + Scalar::new(BigInt::one(), BigInt::from(k))
    })
}
