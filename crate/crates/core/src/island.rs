//! Colored instances, the island predicate, and weighted island search.

mod search;

use std::collections::HashSet;

use thiserror::Error;

use crate::geom::{convex_hull, point_in_hull, Containment, ConvexPolygon, Point};

pub use search::IslandSearch;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IslandError {
    #[error("instance has no points")]
    EmptyInstance,
    #[error("duplicate point at indices {0} and {1}")]
    DuplicatePoint(usize, usize),
    #[error("point {index} has color {color} but the instance declares {count} colors")]
    ColorOutOfRange {
        index: usize,
        color: usize,
        count: usize,
    },
    #[error("empty member set")]
    EmptyMembers,
    #[error("member index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("weight vectors do not match the instance size")]
    WeightLength,
    #[error("oracle size limit: {n} points exceeds {limit}")]
    OracleSizeLimit { n: usize, limit: usize },
    #[error("no candidate island")]
    NoCandidate,
}

/// A set of distinct colored points with stable indices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    points: Vec<Point>,
    colors: Vec<usize>,
    color_count: usize,
}

impl Instance {
    pub fn new(
        points: Vec<Point>,
        colors: Vec<usize>,
        color_count: usize,
    ) -> Result<Self, IslandError> {
        if points.is_empty() {
            return Err(IslandError::EmptyInstance);
        }
        assert_eq!(points.len(), colors.len(), "one color per point");
        for (index, &color) in colors.iter().enumerate() {
            if color >= color_count {
                return Err(IslandError::ColorOutOfRange {
                    index,
                    color,
                    count: color_count,
                });
            }
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].lex_cmp(&points[b]).then(a.cmp(&b)));
        for w in order.windows(2) {
            if points[w[0]] == points[w[1]] {
                return Err(IslandError::DuplicatePoint(w[0], w[1]));
            }
        }
        Ok(Instance {
            points,
            colors,
            color_count,
        })
    }

    /// Builds an instance from `(point, color)` pairs, taking the color count
    /// as one more than the largest color used.
    pub fn from_colored(items: Vec<(Point, usize)>) -> Result<Self, IslandError> {
        let count = items.iter().map(|(_, c)| c + 1).max().unwrap_or(1);
        let (points, colors) = items.into_iter().unzip();
        Instance::new(points, colors, count)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn color(&self, i: usize) -> usize {
        self.colors[i]
    }

    pub fn color_count(&self) -> usize {
        self.color_count
    }

    /// Colors that actually occur, ascending.
    pub fn used_colors(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.colors.clone();
        c.sort_unstable();
        c.dedup();
        c
    }

    pub fn hull_of(&self, members: &[usize]) -> Result<ConvexPolygon, IslandError> {
        let pts: Vec<Point> = members.iter().map(|&i| self.points[i].clone()).collect();
        convex_hull(&pts).map_err(|_| IslandError::EmptyMembers)
    }
}

/// A sorted set of point indices together with the hull of its points.
///
/// Constructing an `Island` does not check the island property; use
/// [`is_island`] or [`Island::checked`] for that.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Island {
    members: Vec<usize>,
    hull: ConvexPolygon,
}

impl Island {
    pub fn from_members(members: &[usize], inst: &Instance) -> Result<Self, IslandError> {
        let mut m = members.to_vec();
        m.sort_unstable();
        m.dedup();
        if m.is_empty() {
            return Err(IslandError::EmptyMembers);
        }
        if let Some(&bad) = m.iter().find(|&&i| i >= inst.len()) {
            return Err(IslandError::IndexOutOfRange(bad));
        }
        let hull = inst.hull_of(&m)?;
        Ok(Island { members: m, hull })
    }

    /// Like [`Island::from_members`] but returns `None` when the set is not a
    /// monochromatic island.
    pub fn checked(members: &[usize], inst: &Instance) -> Result<Option<Self>, IslandError> {
        let island = Island::from_members(members, inst)?;
        Ok(island.satisfies(inst).then_some(island))
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn hull(&self) -> &ConvexPolygon {
        &self.hull
    }

    pub fn color(&self, inst: &Instance) -> usize {
        inst.color(self.members[0])
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    fn satisfies(&self, inst: &Instance) -> bool {
        let c = inst.color(self.members[0]);
        if self.members.iter().any(|&i| inst.color(i) != c) {
            return false;
        }
        let set: HashSet<usize> = self.members.iter().copied().collect();
        (0..inst.len()).all(|i| {
            set.contains(&i) || !point_in_hull(inst.point(i), &self.hull, Containment::Closed)
        })
    }
}

/// True iff `members` is monochromatic and no other point lies in the closed
/// hull of the members.
pub fn is_island(members: &[usize], inst: &Instance) -> Result<bool, IslandError> {
    Ok(Island::from_members(members, inst)?.satisfies(inst))
}

pub const ENUMERATION_LIMIT: usize = 16;

/// Every island of the instance, largest first and lexicographically by
/// member list within a size.
pub fn enumerate_islands(
    inst: &Instance,
    max_size: Option<usize>,
) -> Result<Vec<Island>, IslandError> {
    let n = inst.len();
    if n > ENUMERATION_LIMIT {
        return Err(IslandError::OracleSizeLimit {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let cap = max_size.unwrap_or(n);
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << n) {
        if mask.count_ones() as usize > cap {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let c = inst.color(members[0]);
        if members.iter().any(|&i| inst.color(i) != c) {
            continue;
        }
        if let Some(island) = Island::checked(&members, inst)? {
            out.push(island);
        }
    }
    out.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then_with(|| a.members.cmp(&b.members))
    });
    Ok(out)
}

/// Per-point weights and constraints for [`max_weight_island`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSpec {
    pub primary: Vec<i64>,
    pub secondary: Vec<i64>,
    pub color: usize,
    pub forbidden: Vec<ConvexPolygon>,
}

impl WeightSpec {
    /// Unit primary weight everywhere, no secondary weight, no forbidden regions.
    pub fn uniform(inst: &Instance, color: usize) -> Self {
        WeightSpec {
            primary: vec![1; inst.len()],
            secondary: vec![0; inst.len()],
            color,
            forbidden: Vec::new(),
        }
    }
}

/// Objective of an island: larger primary wins, then smaller secondary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Score {
    pub primary: i64,
    pub secondary: i64,
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.primary
            .cmp(&other.primary)
            .then(other.secondary.cmp(&self.secondary))
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Score {
    pub fn of(members: &[usize], w: &WeightSpec) -> Score {
        Score {
            primary: members.iter().map(|&i| w.primary[i]).sum(),
            secondary: members.iter().map(|&i| w.secondary[i]).sum(),
        }
    }
}

/// Whether the island is feasible for `w`: right color and hull disjoint from
/// every forbidden region.
pub fn feasible_for(island: &Island, inst: &Instance, w: &WeightSpec) -> bool {
    island.color(inst) == w.color
        && w.forbidden
            .iter()
            .all(|f| !crate::geom::hulls_intersect(island.hull(), f))
}

/// The best island of color `w.color` whose hull avoids every forbidden
/// region, ties broken by the lexicographically smallest member list.
pub fn max_weight_island(inst: &Instance, w: &WeightSpec) -> Result<Island, IslandError> {
    IslandSearch::new(inst).best(w).map(|(island, _)| island)
}
