//! Island arrangements: a half-edge subdivision built from the boundaries of
//! inserted island hulls, where each newly inserted hull becomes a single face.
//!
//! Every insertion rebuilds the half-edge structure from the current edge set
//! (quadratic overlay), which keeps the structure simple and is fast enough for
//! the instance sizes where arrangements are checked.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::geom::{
    convex_hull, cross, int, on_segment, point_in_hull, segment_intersection, Containment,
    ConvexPolygon, Point, Scalar, Segment, SegmentIntersection,
};
use crate::island::Island;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrangementError {
    #[error("boundary triple point at {0}")]
    TriplePoint(Point),
    #[error("non-generic overlap between {0} and {1}")]
    NonGenericOverlap(Point, Point),
    #[error("face increase {increase} at step {step} exceeds bound {bound}")]
    BoundExceeded {
        step: usize,
        increase: i64,
        bound: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub point: Point,
    pub incident: Option<usize>,
    /// Islands whose hull boundary passes through this vertex.
    pub boundaries: BTreeSet<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfEdge {
    pub origin: usize,
    pub twin: usize,
    pub next: usize,
    pub prev: usize,
    pub face: usize,
    /// Island whose boundary this edge belongs to.
    pub owner: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    /// A half-edge of the outer boundary; `None` for the unbounded face.
    pub outer: Option<usize>,
    pub holes: Vec<usize>,
    /// Latest island whose hull contains the face; `None` for the unbounded
    /// face and for bounded regions outside every hull.
    pub owner: Option<usize>,
}

/// Counts after one insertion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    /// 1-based insertion index.
    pub step: usize,
    pub vertices: usize,
    pub edges: usize,
    /// Faces including the unbounded one.
    pub faces: usize,
    pub components: usize,
    /// Distinct points where the new boundary meets existing edges.
    pub crossings: usize,
    /// Face count of the overlay before the interior of the new hull is merged.
    pub faces_before_merge: usize,
    /// Change of `faces - components`.
    pub face_increase: i64,
    /// `2 * opt * (step - 1)` when a bound was supplied.
    pub bound: Option<i64>,
    /// Bounded faces whose closure equals the new hull.
    pub hull_faces: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceRecord {
    pub id: usize,
    pub closure: ConvexPolygon,
    pub owner: Option<usize>,
    /// Set for pieces of segment or point islands, which have no area.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub failures: Vec<String>,
    /// Bounded faces enclosed by boundaries but outside every island hull.
    /// They arise when boundaries of several islands close a region none of
    /// them covers. They may be non-convex and are reported, not failed.
    pub voids: Vec<usize>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first(&self) -> Option<&str> {
        self.failures.first().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subdivision {
    vertices: Vec<Vertex>,
    half_edges: Vec<HalfEdge>,
    faces: Vec<Face>,
    components: usize,
    islands: Vec<ConvexPolygon>,
    steps: Vec<StepRecord>,
}

impl Default for Subdivision {
    fn default() -> Self {
        empty_subdivision()
    }
}

pub fn empty_subdivision() -> Subdivision {
    Subdivision {
        vertices: Vec::new(),
        half_edges: Vec::new(),
        faces: vec![Face {
            outer: None,
            holes: Vec::new(),
            owner: None,
        }],
        components: 0,
        islands: Vec::new(),
        steps: Vec::new(),
    }
}

struct RawEdge {
    a: Point,
    b: Point,
    owner: usize,
}

fn split_segment(a: &Point, b: &Point, cuts: &[Point]) -> Vec<(Point, Point)> {
    let key = |p: &Point| -> Scalar {
        if a.x != b.x {
            (&p.x - &a.x) / (&b.x - &a.x)
        } else {
            (&p.y - &a.y) / (&b.y - &a.y)
        }
    };
    let mut pts: Vec<(Scalar, Point)> = cuts
        .iter()
        .filter(|p| *p != a && *p != b)
        .map(|p| (key(p), p.clone()))
        .collect();
    pts.sort_by(|x, y| x.0.cmp(&y.0));
    pts.dedup_by(|x, y| x.1 == y.1);
    let mut chain = vec![a.clone()];
    chain.extend(pts.into_iter().map(|(_, p)| p));
    chain.push(b.clone());
    chain
        .windows(2)
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect()
}

fn half_of(v: &(Scalar, Scalar)) -> u8 {
    if v.1.is_positive() || (v.1.is_zero() && v.0.is_positive()) {
        0
    } else {
        1
    }
}

fn angle_cmp(a: &(Scalar, Scalar), b: &(Scalar, Scalar)) -> Ordering {
    half_of(a)
        .cmp(&half_of(b))
        .then_with(|| (&a.1 * &b.0).cmp(&(&a.0 * &b.1)))
}

/// Twice the signed area of a closed point sequence.
fn signed_area2(pts: &[&Point]) -> Scalar {
    let n = pts.len();
    let mut s = Scalar::zero();
    for i in 0..n {
        let (p, q) = (pts[i], pts[(i + 1) % n]);
        s += &p.x * &q.y - &q.x * &p.y;
    }
    s
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let n = self.parent[c];
            self.parent[c] = r;
            c = n;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn count_components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut uf = UnionFind::new(n);
    for &(a, b) in edges {
        uf.union(a, b);
    }
    (0..n).filter(|&v| uf.find(v) == v).count()
}

/// Ray-casting parity test; `pts` is a closed cycle (may repeat vertices).
fn inside_cycle(pts: &[&Point], x: &Point) -> bool {
    let n = pts.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        if (a.y > x.y) != (b.y > x.y) {
            // x-coordinate of the edge at height x.y compared to x.x
            let t = (&x.y - &a.y) / (&b.y - &a.y);
            let xe = &a.x + (&b.x - &a.x) * t;
            if x.x < xe {
                inside = !inside;
            }
        }
    }
    inside
}

impl Subdivision {
    /// Builds the half-edge structure from atomic (pairwise non-crossing)
    /// edges, isolated vertices and per-point boundary sets.
    fn assemble(
        islands: Vec<ConvexPolygon>,
        edges: Vec<(Point, Point, usize)>,
        isolated: Vec<Point>,
        boundaries: &HashMap<Point, BTreeSet<usize>>,
        steps: Vec<StepRecord>,
    ) -> Subdivision {
        let mut pts: Vec<Point> = edges
            .iter()
            .flat_map(|(a, b, _)| [a.clone(), b.clone()])
            .chain(isolated.iter().cloned())
            .collect();
        pts.sort_by(|a, b| a.lex_cmp(b));
        pts.dedup();
        let id: HashMap<Point, usize> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();

        let mut und: Vec<(usize, usize, usize)> = edges
            .iter()
            .map(|(a, b, o)| {
                let (u, v) = (id[a], id[b]);
                (u.min(v), u.max(v), *o)
            })
            .collect();
        und.sort();
        und.dedup_by(|x, y| x.0 == y.0 && x.1 == y.1);

        let mut half_edges: Vec<HalfEdge> = Vec::with_capacity(und.len() * 2);
        for (k, &(u, v, o)) in und.iter().enumerate() {
            half_edges.push(HalfEdge {
                origin: u,
                twin: 2 * k + 1,
                next: usize::MAX,
                prev: usize::MAX,
                face: 0,
                owner: o,
            });
            half_edges.push(HalfEdge {
                origin: v,
                twin: 2 * k,
                next: usize::MAX,
                prev: usize::MAX,
                face: 0,
                owner: o,
            });
        }
        let dest = |h: usize, he: &Vec<HalfEdge>| he[he[h].twin].origin;

        let mut out: Vec<Vec<usize>> = vec![Vec::new(); pts.len()];
        for h in 0..half_edges.len() {
            out[half_edges[h].origin].push(h);
        }
        for (v, list) in out.iter_mut().enumerate() {
            let dirs: HashMap<usize, (Scalar, Scalar)> = list
                .iter()
                .map(|&h| {
                    let d = &pts[dest(h, &half_edges)];
                    (h, (&d.x - &pts[v].x, &d.y - &pts[v].y))
                })
                .collect();
            list.sort_by(|a, b| angle_cmp(&dirs[a], &dirs[b]));
        }
        let mut pos = vec![0usize; half_edges.len()];
        for list in &out {
            for (i, &h) in list.iter().enumerate() {
                pos[h] = i;
            }
        }
        for h in 0..half_edges.len() {
            let t = half_edges[h].twin;
            let v = half_edges[t].origin;
            let list = &out[v];
            let d = list.len();
            let nx = list[(pos[t] + d - 1) % d];
            half_edges[h].next = nx;
            half_edges[nx].prev = h;
        }

        let vertices: Vec<Vertex> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| Vertex {
                point: p.clone(),
                incident: out[i].first().copied(),
                boundaries: boundaries.get(p).cloned().unwrap_or_default(),
            })
            .collect();

        // Trace cycles.
        let mut cycle_of = vec![usize::MAX; half_edges.len()];
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        for h in 0..half_edges.len() {
            if cycle_of[h] != usize::MAX {
                continue;
            }
            let mut c = Vec::new();
            let mut x = h;
            loop {
                cycle_of[x] = cycles.len();
                c.push(x);
                x = half_edges[x].next;
                if x == h {
                    break;
                }
            }
            cycles.push(c);
        }
        let mut uf = UnionFind::new(pts.len());
        for &(u, v, _) in &und {
            uf.union(u, v);
        }
        let components = (0..pts.len()).filter(|&v| uf.find(v) == v).count();

        let cycle_pts = |c: &Vec<usize>| -> Vec<&Point> {
            c.iter().map(|&h| &pts[half_edges[h].origin]).collect()
        };
        let areas: Vec<Scalar> = cycles.iter().map(|c| signed_area2(&cycle_pts(c))).collect();

        let mut faces = vec![Face {
            outer: None,
            holes: Vec::new(),
            owner: None,
        }];
        let mut face_of_cycle = vec![0usize; cycles.len()];
        for (ci, c) in cycles.iter().enumerate() {
            if areas[ci].is_positive() {
                face_of_cycle[ci] = faces.len();
                faces.push(Face {
                    outer: Some(c[0]),
                    holes: Vec::new(),
                    owner: None,
                });
            }
        }
        for (ci, c) in cycles.iter().enumerate() {
            if areas[ci].is_positive() {
                continue;
            }
            let rep = &pts[half_edges[c[0]].origin];
            let comp = uf.find(half_edges[c[0]].origin);
            let mut best: Option<usize> = None;
            for (cj, d) in cycles.iter().enumerate() {
                if !areas[cj].is_positive() || uf.find(half_edges[d[0]].origin) == comp {
                    continue;
                }
                if inside_cycle(&cycle_pts(d), rep) && best.is_none_or(|b| areas[cj] < areas[b]) {
                    best = Some(cj);
                }
            }
            let f = best.map_or(0, |b| face_of_cycle[b]);
            face_of_cycle[ci] = f;
            faces[f].holes.push(c[0]);
        }
        for (ci, c) in cycles.iter().enumerate() {
            for &h in c {
                half_edges[h].face = face_of_cycle[ci];
            }
        }

        let mut sub = Subdivision {
            vertices,
            half_edges,
            faces,
            components,
            islands,
            steps,
        };
        for f in 1..sub.faces.len() {
            let owner = sub.face_sample_point(f).and_then(|pt| {
                (0..sub.islands.len())
                    .rev()
                    .find(|&j| point_in_hull(&pt, &sub.islands[j], Containment::Closed))
            });
            sub.faces[f].owner = owner;
        }
        sub
    }

    fn dest(&self, h: usize) -> usize {
        self.half_edges[self.half_edges[h].twin].origin
    }

    fn point(&self, v: usize) -> &Point {
        &self.vertices[v].point
    }

    fn cycle(&self, start: usize) -> Vec<usize> {
        let mut c = Vec::new();
        let mut x = start;
        loop {
            c.push(x);
            x = self.half_edges[x].next;
            if x == start || c.len() > self.half_edges.len() {
                break;
            }
        }
        c
    }

    /// The outer cycle of a face with antennas (edges whose twin is on the same
    /// cycle) cancelled.
    fn reduced_boundary(&self, f: usize) -> Vec<usize> {
        let Some(start) = self.faces[f].outer else {
            return Vec::new();
        };
        let mut stack: Vec<usize> = Vec::new();
        for h in self.cycle(start) {
            if stack.last() == Some(&self.half_edges[h].twin) {
                stack.pop();
            } else {
                stack.push(h);
            }
        }
        // Cancel across the wrap-around.
        while stack.len() >= 2 && self.half_edges[stack[0]].twin == *stack.last().unwrap() {
            stack.pop();
            stack.remove(0);
        }
        stack
    }

    /// A point strictly inside bounded face `f`.
    fn face_sample_point(&self, f: usize) -> Option<Point> {
        let start = self.faces[f].outer?;
        let cyc = self.cycle(start);
        let h = *cyc
            .iter()
            .find(|&&h| self.half_edges[self.half_edges[h].twin].face != f)
            .or_else(|| cyc.first())?;
        let a = self.point(self.half_edges[h].origin);
        let b = self.point(self.dest(h));
        let m = a.midpoint(b);
        let n = (-(&b.y - &a.y), &b.x - &a.x);
        // Smallest positive ray parameter hitting another edge.
        let mut tmin: Option<Scalar> = None;
        for g in (0..self.half_edges.len()).step_by(2) {
            if g == h || g == self.half_edges[h].twin {
                continue;
            }
            let p = self.point(self.half_edges[g].origin);
            let q = self.point(self.dest(g));
            let e = (&q.x - &p.x, &q.y - &p.y);
            let den = &n.0 * &e.1 - &n.1 * &e.0;
            if den.is_zero() {
                continue;
            }
            let w = (&p.x - &m.x, &p.y - &m.y);
            let t = (&w.0 * &e.1 - &w.1 * &e.0) / &den;
            let s = (&w.0 * &n.1 - &w.1 * &n.0) / &den;
            if t.is_positive()
                && !s.is_negative()
                && s <= int(1)
                && tmin.as_ref().is_none_or(|x| t < *x)
            {
                tmin = Some(t);
            }
        }
        let t = tmin.map(|t| t / int(2)).unwrap_or_else(|| int(1));
        Some(Point::new(&m.x + &n.0 * &t, &m.y + &n.1 * &t))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.half_edges.len() / 2
    }

    /// Number of faces including the unbounded one.
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn half_edges(&self) -> &[HalfEdge] {
        &self.half_edges
    }

    pub fn face_list(&self) -> &[Face] {
        &self.faces
    }

    pub fn islands(&self) -> &[ConvexPolygon] {
        &self.islands
    }

    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    /// Inserts `island` so that its hull becomes one face, splitting earlier
    /// features. With `opt_bound`, fails when the face increase exceeds
    /// `2 * opt_bound * (i - 1)` for insertion number `i`.
    pub fn bold_augment(
        &self,
        island: &Island,
        opt_bound: Option<usize>,
    ) -> Result<Subdivision, ArrangementError> {
        self.augment_hull(island.hull(), opt_bound)
    }

    pub fn augment_hull(
        &self,
        hull: &ConvexPolygon,
        opt_bound: Option<usize>,
    ) -> Result<Subdivision, ArrangementError> {
        let idx = self.islands.len();
        let existing: Vec<RawEdge> = (0..self.half_edges.len())
            .step_by(2)
            .map(|h| RawEdge {
                a: self.point(self.half_edges[h].origin).clone(),
                b: self.point(self.dest(h)).clone(),
                owner: self.half_edges[h].owner,
            })
            .collect();
        let isolated: Vec<Point> = self
            .vertices
            .iter()
            .filter(|v| v.incident.is_none())
            .map(|v| v.point.clone())
            .collect();
        let fresh: Vec<RawEdge> = match hull.len() {
            1 => Vec::new(),
            _ => hull
                .boundary_segments()
                .into_iter()
                .map(|s| RawEdge {
                    a: s.a,
                    b: s.b,
                    owner: idx,
                })
                .collect(),
        };

        let mut cuts_old: Vec<Vec<Point>> = vec![Vec::new(); existing.len()];
        let mut cuts_new: Vec<Vec<Point>> = vec![Vec::new(); fresh.len()];
        let mut crossings: BTreeSet<Point> = BTreeSet::new();
        for (i, s) in fresh.iter().enumerate() {
            let seg = Segment::new(s.a.clone(), s.b.clone());
            for (j, e) in existing.iter().enumerate() {
                match segment_intersection(&seg, &Segment::new(e.a.clone(), e.b.clone())) {
                    SegmentIntersection::None => {}
                    SegmentIntersection::Overlap => {
                        return Err(ArrangementError::NonGenericOverlap(
                            s.a.clone(),
                            s.b.clone(),
                        ))
                    }
                    SegmentIntersection::Point(x) => {
                        cuts_new[i].push(x.clone());
                        cuts_old[j].push(x.clone());
                        crossings.insert(x);
                    }
                }
            }
            for v in &isolated {
                if on_segment(v, &s.a, &s.b) {
                    cuts_new[i].push(v.clone());
                    crossings.insert(v.clone());
                }
            }
        }
        let mut new_isolated: Vec<Point> = isolated.clone();
        if hull.len() == 1 {
            let p = &hull.vertices()[0];
            let mut on_edge = false;
            for (j, e) in existing.iter().enumerate() {
                if on_segment(p, &e.a, &e.b) {
                    cuts_old[j].push(p.clone());
                    on_edge = true;
                }
            }
            if on_edge || isolated.contains(p) {
                crossings.insert(p.clone());
            }
            if !on_edge && !new_isolated.contains(p) {
                new_isolated.push(p.clone());
            }
        }

        let mut atoms: Vec<(Point, Point, usize)> = Vec::new();
        for (e, cuts) in existing.iter().zip(&cuts_old) {
            for (a, b) in split_segment(&e.a, &e.b, cuts) {
                atoms.push((a, b, e.owner));
            }
        }
        for (s, cuts) in fresh.iter().zip(&cuts_new) {
            for (a, b) in split_segment(&s.a, &s.b, cuts) {
                atoms.push((a, b, s.owner));
            }
        }
        // Isolated vertices now lying on an edge stop being isolated.
        new_isolated.retain(|p| !atoms.iter().any(|(a, b, _)| a == p || b == p));

        let mut bsets: HashMap<Point, BTreeSet<usize>> = HashMap::new();
        for v in &self.vertices {
            bsets.insert(v.point.clone(), v.boundaries.clone());
        }
        for (a, b, o) in &atoms {
            bsets.entry(a.clone()).or_default().insert(*o);
            bsets.entry(b.clone()).or_default().insert(*o);
        }
        if hull.len() == 1 {
            bsets
                .entry(hull.vertices()[0].clone())
                .or_default()
                .insert(idx);
        }
        let mut bad: Vec<&Point> = bsets
            .iter()
            .filter(|(_, s)| s.len() >= 3)
            .map(|(p, _)| p)
            .collect();
        bad.sort();
        if let Some(p) = bad.first() {
            return Err(ArrangementError::TriplePoint((*p).clone()));
        }

        // Counts of the raw overlay, before merging the new interior.
        let faces_before_merge = {
            let mut pts: Vec<&Point> = atoms
                .iter()
                .flat_map(|(a, b, _)| [a, b])
                .chain(new_isolated.iter())
                .collect();
            pts.sort();
            pts.dedup();
            let ix: HashMap<&Point, usize> = pts.iter().enumerate().map(|(i, p)| (*p, i)).collect();
            let es: Vec<(usize, usize)> = atoms.iter().map(|(a, b, _)| (ix[a], ix[b])).collect();
            let c = count_components(pts.len(), &es);
            (1 + c + es.len()) - pts.len()
        };

        if hull.is_proper() {
            atoms.retain(|(a, b, _)| !point_in_hull(&a.midpoint(b), hull, Containment::Open));
            new_isolated.retain(|p| !point_in_hull(p, hull, Containment::Open));
        }
        let keep: BTreeSet<Point> = atoms
            .iter()
            .flat_map(|(a, b, _)| [a.clone(), b.clone()])
            .chain(new_isolated.iter().cloned())
            .collect();
        bsets.retain(|p, _| keep.contains(p));

        let mut islands = self.islands.clone();
        islands.push(hull.clone());
        let mut sub =
            Subdivision::assemble(islands, atoms, new_isolated, &bsets, self.steps.clone());

        let step = idx + 1;
        let measure = |s: &Subdivision| s.faces.len() as i64 - s.components as i64;
        let face_increase = measure(&sub) - measure(self);
        let bound = opt_bound.map(|o| 2 * o as i64 * (step as i64 - 1));
        let hull_faces = if hull.is_proper() {
            sub.faces()
                .iter()
                .filter(|r| !r.degenerate && r.closure == *hull)
                .count()
        } else {
            0
        };
        sub.steps.push(StepRecord {
            step,
            vertices: sub.vertex_count(),
            edges: sub.edge_count(),
            faces: sub.face_count(),
            components: sub.components,
            crossings: crossings.len(),
            faces_before_merge,
            face_increase,
            bound,
            hull_faces,
        });
        if let Some(b) = bound {
            if face_increase > b {
                return Err(ArrangementError::BoundExceeded {
                    step,
                    increase: face_increase,
                    bound: b,
                });
            }
        }
        Ok(sub)
    }

    /// Bounded faces in id order, followed by degenerate pieces: uncut chains
    /// of segment islands, and isolated vertices.
    pub fn faces(&self) -> Vec<FaceRecord> {
        let mut out = Vec::new();
        for f in 1..self.faces.len() {
            let Some(start) = self.faces[f].outer else {
                continue;
            };
            let pts: Vec<Point> = self
                .cycle(start)
                .iter()
                .map(|&h| self.point(self.half_edges[h].origin).clone())
                .collect();
            out.push(FaceRecord {
                id: f,
                closure: convex_hull(&pts).expect("face has vertices"),
                owner: self.faces[f].owner,
                degenerate: false,
            });
        }
        let mut next_id = self.faces.len();
        for owner in 0..self.islands.len() {
            if !self.islands[owner].is_segment() {
                continue;
            }
            for piece in self.segment_pieces(owner, |v| v.boundaries.len() > 1) {
                let pts: Vec<Point> = piece
                    .iter()
                    .flat_map(|(a, b)| [a.clone(), b.clone()])
                    .collect();
                out.push(FaceRecord {
                    id: next_id,
                    closure: convex_hull(&pts).expect("piece has points"),
                    owner: Some(owner),
                    degenerate: true,
                });
                next_id += 1;
            }
        }
        for v in &self.vertices {
            if v.incident.is_none() {
                out.push(FaceRecord {
                    id: next_id,
                    closure: convex_hull(std::slice::from_ref(&v.point)).unwrap(),
                    owner: v.boundaries.iter().next_back().copied(),
                    degenerate: true,
                });
                next_id += 1;
            }
        }
        out
    }

    /// Surviving edges of island `owner` grouped into chains. Chains are cut at
    /// vertices where `split` holds.
    pub fn segment_pieces(
        &self,
        owner: usize,
        split: impl Fn(&Vertex) -> bool,
    ) -> Vec<Vec<(Point, Point)>> {
        let edges: Vec<usize> = (0..self.half_edges.len())
            .step_by(2)
            .filter(|&h| self.half_edges[h].owner == owner)
            .collect();
        let mut uf = UnionFind::new(edges.len());
        let mut at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (k, &h) in edges.iter().enumerate() {
            at.entry(self.half_edges[h].origin).or_default().push(k);
            at.entry(self.dest(h)).or_default().push(k);
        }
        for (&v, ks) in &at {
            if split(&self.vertices[v]) {
                continue;
            }
            for w in ks.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        let mut groups: BTreeMap<usize, Vec<(Point, Point)>> = BTreeMap::new();
        for (k, &h) in edges.iter().enumerate() {
            let r = uf.find(k);
            groups.entry(r).or_default().push((
                self.point(self.half_edges[h].origin).clone(),
                self.point(self.dest(h)).clone(),
            ));
        }
        groups.into_values().collect()
    }

    /// Checks structural integrity, the Euler identity, convexity of faces
    /// inside island hulls, containment of those faces in their hull, and
    /// coverage of every island hull.
    pub fn validate(&self) -> ValidationReport {
        let mut failures = Vec::new();
        let he = &self.half_edges;
        let n = he.len();
        for (h, e) in he.iter().enumerate() {
            if e.twin >= n || e.twin == h || he[e.twin].twin != h {
                failures.push(format!("twin involution broken at half-edge {h}"));
                break;
            }
        }
        for (h, e) in he.iter().enumerate() {
            if e.next >= n || e.prev >= n || he[e.next].prev != h || he[e.prev].next != h {
                failures.push(format!("next/prev not inverse at half-edge {h}"));
                break;
            }
        }
        if failures.is_empty() {
            for (h, e) in he.iter().enumerate() {
                if he[e.next].origin != he[e.twin].origin {
                    failures.push(format!("next of half-edge {h} does not start at its end"));
                    break;
                }
                if he[e.next].face != e.face {
                    failures.push(format!("face inconsistent along cycle at half-edge {h}"));
                    break;
                }
            }
        }
        if !failures.is_empty() {
            return ValidationReport {
                failures,
                voids: Vec::new(),
            };
        }
        for (f, face) in self.faces.iter().enumerate() {
            for &h in face.outer.iter().chain(face.holes.iter()) {
                if he[h].face != f {
                    failures.push(format!("face {f} lists half-edge {h} of another face"));
                }
            }
        }

        let es: Vec<(usize, usize)> = (0..n)
            .step_by(2)
            .map(|h| (he[h].origin, self.dest(h)))
            .collect();
        let c = count_components(self.vertices.len(), &es);
        if c != self.components {
            failures.push(format!(
                "component count {} differs from recount {c}",
                self.components
            ));
        }
        let v = self.vertices.len() as i64;
        let e = self.edge_count() as i64;
        let f = self.faces.len() as i64;
        if v - e + f != 1 + c as i64 {
            failures.push(format!("euler identity fails: V={v} E={e} F={f} C={c}"));
        }

        for fi in 1..self.faces.len() {
            if self.faces[fi].owner.is_none() {
                continue;
            }
            let b = self.reduced_boundary(fi);
            let m = b.len();
            for i in 0..m {
                let p = self.point(he[b[i]].origin);
                let q = self.point(he[b[(i + 1) % m]].origin);
                let r = self.point(he[b[(i + 2) % m]].origin);
                if cross(p, q, r).is_negative() {
                    failures.push(format!("non-convex face {fi} at {q}"));
                    break;
                }
            }
        }

        let records = self.faces();
        let mut voids = Vec::new();
        for r in &records {
            if let Some(o) = r.owner {
                if r.closure
                    .vertices()
                    .iter()
                    .any(|p| !point_in_hull(p, &self.islands[o], Containment::Closed))
                {
                    failures.push(format!("face {} escapes the hull of island {o}", r.id));
                }
            } else if !r.degenerate {
                voids.push(r.id);
            }
        }
        for (j, hull) in self.islands.iter().enumerate() {
            if !self.hull_covered(hull, &records) {
                failures.push(format!("hull of island {j} is not covered"));
            }
        }
        ValidationReport { failures, voids }
    }

    fn hull_covered(&self, hull: &ConvexPolygon, records: &[FaceRecord]) -> bool {
        let areas: Vec<&FaceRecord> = records
            .iter()
            .filter(|r| !r.degenerate && r.owner.is_some())
            .collect();
        let in_feature = |p: &Point| {
            areas
                .iter()
                .any(|r| point_in_hull(p, &r.closure, Containment::Closed))
                || (0..self.half_edges.len()).step_by(2).any(|h| {
                    on_segment(
                        p,
                        self.point(self.half_edges[h].origin),
                        self.point(self.dest(h)),
                    )
                })
                || self.vertices.iter().any(|v| v.point == *p)
        };
        if !hull.is_proper() {
            let segs = hull.boundary_segments();
            let s = &segs[0];
            let mut cuts: Vec<Point> = Vec::new();
            for h in (0..self.half_edges.len()).step_by(2) {
                let e = Segment::new(
                    self.point(self.half_edges[h].origin).clone(),
                    self.point(self.dest(h)).clone(),
                );
                match segment_intersection(s, &e) {
                    SegmentIntersection::Point(x) => cuts.push(x),
                    SegmentIntersection::Overlap => {
                        cuts.push(e.a.clone());
                        cuts.push(e.b.clone());
                    }
                    SegmentIntersection::None => {}
                }
            }
            for r in &areas {
                for t in r.closure.boundary_segments() {
                    if let SegmentIntersection::Point(x) = segment_intersection(s, &t) {
                        cuts.push(x);
                    }
                }
            }
            let cuts: Vec<Point> = cuts
                .into_iter()
                .filter(|c| on_segment(c, &s.a, &s.b))
                .collect();
            let pieces = split_segment(&s.a, &s.b, &cuts);
            return in_feature(&s.a)
                && in_feature(&s.b)
                && pieces.iter().all(|(a, b)| in_feature(&a.midpoint(b)));
        }
        let total = hull.double_area();
        let covered = areas
            .iter()
            .map(|r| clip(&r.closure, hull).double_area())
            .fold(Scalar::zero(), |a, b| a + b);
        covered == total
    }

    /// Deterministic text listing of vertices, half-edges and faces.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "V={} E={} F={} C={}",
            self.vertex_count(),
            self.edge_count(),
            self.face_count(),
            self.components
        );
        let _ = writeln!(s, "vertices");
        for (i, v) in self.vertices.iter().enumerate() {
            let b: Vec<String> = v.boundaries.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(
                s,
                "  v{i} {} inc={} boundaries=[{}]",
                v.point,
                v.incident.map_or("-".to_string(), |h| format!("h{h}")),
                b.join(",")
            );
        }
        let _ = writeln!(s, "half-edges");
        for (i, h) in self.half_edges.iter().enumerate() {
            let _ = writeln!(
                s,
                "  h{i} v{}->v{} twin=h{} next=h{} prev=h{} face=f{} owner={}",
                h.origin,
                self.dest(i),
                h.twin,
                h.next,
                h.prev,
                h.face,
                h.owner
            );
        }
        let _ = writeln!(s, "faces");
        for (i, f) in self.faces.iter().enumerate() {
            let holes: Vec<String> = f.holes.iter().map(|h| format!("h{h}")).collect();
            let _ = writeln!(
                s,
                "  f{i} outer={} holes=[{}] owner={}",
                f.outer.map_or("-".to_string(), |h| format!("h{h}")),
                holes.join(","),
                f.owner.map_or("-".to_string(), |o| o.to_string())
            );
        }
        s
    }
}

/// Intersection of two convex polygons (Sutherland-Hodgman, exact).
fn clip(subject: &ConvexPolygon, window: &ConvexPolygon) -> ConvexPolygon {
    let mut poly: Vec<Point> = subject.vertices().to_vec();
    let w = window.vertices();
    let m = w.len();
    for i in 0..m {
        if poly.is_empty() {
            break;
        }
        let (a, b) = (&w[i], &w[(i + 1) % m]);
        let input = std::mem::take(&mut poly);
        let k = input.len();
        for j in 0..k {
            let cur = &input[j];
            let prev = &input[(j + k - 1) % k];
            let cin = !cross(a, b, cur).is_negative();
            let pin = !cross(a, b, prev).is_negative();
            if cin {
                if !pin {
                    poly.push(line_cut(a, b, prev, cur));
                }
                poly.push(cur.clone());
            } else if pin {
                poly.push(line_cut(a, b, prev, cur));
            }
        }
    }
    if poly.is_empty() {
        return ConvexPolygon::default();
    }
    convex_hull(&poly).unwrap_or_default()
}

/// Point where segment `p q` meets the line through `a b`.
fn line_cut(a: &Point, b: &Point, p: &Point, q: &Point) -> Point {
    let dp = cross(a, b, p);
    let dq = cross(a, b, q);
    let t = &dp / (&dp - &dq);
    Point::new(&p.x + (&q.x - &p.x) * &t, &p.y + (&q.y - &p.y) * &t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn hull(pts: &[Point]) -> ConvexPolygon {
        convex_hull(pts).unwrap()
    }

    #[test]
    fn empty() {
        let s = empty_subdivision();
        assert_eq!(
            (
                s.vertex_count(),
                s.edge_count(),
                s.face_count(),
                s.component_count()
            ),
            (0, 0, 1, 0)
        );
        assert!(s.faces().is_empty());
        assert!(s.validate().passed());
    }

    #[test]
    fn single_triangle() {
        let s = empty_subdivision()
            .augment_hull(&hull(&[p(0, 0), p(4, 0), p(0, 4)]), None)
            .unwrap();
        assert_eq!(
            (
                s.vertex_count(),
                s.edge_count(),
                s.face_count(),
                s.component_count()
            ),
            (3, 3, 2, 1)
        );
        assert!(s.validate().passed(), "{:?}", s.validate());
        assert_eq!(s.steps()[0].hull_faces, 1);
        assert_eq!(s.steps()[0].face_increase, 0);
    }

    #[test]
    fn clipped_corner() {
        let t1 = hull(&[p(0, 0), p(6, 0), p(0, 6)]);
        let t2 = hull(&[p(4, -1), p(8, -1), p(4, 3)]);
        let s = empty_subdivision()
            .augment_hull(&t1, None)
            .unwrap()
            .augment_hull(&t2, None)
            .unwrap();
        let recs = s.faces();
        assert_eq!(recs.len(), 2);
        let owners: BTreeSet<Option<usize>> = recs.iter().map(|r| r.owner).collect();
        assert_eq!(owners, [Some(0), Some(1)].into_iter().collect());
        assert!(recs.iter().any(|r| r.closure == t2));
        assert_eq!(s.steps()[1].faces_before_merge, 4);
        assert_eq!(s.steps()[1].crossings, 2);
        assert!(s.validate().passed(), "{:?}", s.validate());
    }

    #[test]
    fn two_disjoint_triangles() {
        let s = empty_subdivision()
            .augment_hull(&hull(&[p(0, 0), p(1, 0), p(0, 1)]), None)
            .unwrap()
            .augment_hull(&hull(&[p(5, 5), p(6, 5), p(5, 6)]), Some(1))
            .unwrap();
        assert_eq!(s.faces().len(), 2);
        assert_eq!(s.component_count(), 2);
        assert_eq!(s.steps()[1].face_increase, 0);
        assert!(s.validate().passed());
    }

    #[test]
    fn crossing_segments() {
        let a = hull(&[p(0, 0), p(2, 2)]);
        let b = hull(&[p(0, 2), p(2, 0)]);
        let s = empty_subdivision()
            .augment_hull(&a, None)
            .unwrap()
            .augment_hull(&b, None)
            .unwrap();
        assert_eq!(
            (s.vertex_count(), s.edge_count(), s.component_count()),
            (5, 4, 1)
        );
        assert!(s.validate().passed(), "{:?}", s.validate());
        // The earlier segment is cut at the crossing, the later one is not.
        let later = |v: &Vertex| v.boundaries.iter().any(|&o| o > 0);
        assert_eq!(s.segment_pieces(0, later).len(), 2);
        let later1 = |v: &Vertex| v.boundaries.iter().any(|&o| o > 1);
        assert_eq!(s.segment_pieces(1, later1).len(), 1);
    }

    #[test]
    fn triple_point_rejected() {
        let s = empty_subdivision()
            .augment_hull(&hull(&[p(0, 0), p(2, 2)]), None)
            .unwrap()
            .augment_hull(&hull(&[p(0, 2), p(2, 0)]), None)
            .unwrap();
        let err = s
            .augment_hull(&hull(&[p(1, 0), p(1, 2)]), None)
            .unwrap_err();
        assert_eq!(err, ArrangementError::TriplePoint(p(1, 1)));
        assert!(err.to_string().starts_with("boundary triple point"));
    }

    #[test]
    fn overlap_rejected() {
        let s = empty_subdivision()
            .augment_hull(&hull(&[p(0, 0), p(2, 0), p(0, 2)]), None)
            .unwrap();
        let err = s
            .augment_hull(&hull(&[p(1, 0), p(3, 0), p(3, 2)]), None)
            .unwrap_err();
        assert!(matches!(err, ArrangementError::NonGenericOverlap(..)));
    }

    #[test]
    fn void_between_segments() {
        let s = empty_subdivision()
            .augment_hull(&hull(&[p(0, 0), p(6, 0), p(0, 6)]), None)
            .unwrap()
            .augment_hull(&hull(&[p(2, 2), p(6, 4)]), None)
            .unwrap()
            .augment_hull(&hull(&[p(4, 1), p(3, 6)]), None)
            .unwrap();
        let r = s.validate();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.voids.len(), 1);
    }

    #[test]
    fn corrupted_twin_detected() {
        let mut s = empty_subdivision()
            .augment_hull(&hull(&[p(0, 0), p(4, 0), p(0, 4)]), None)
            .unwrap();
        s.half_edges[0].twin = 2;
        let r = s.validate();
        assert!(!r.passed());
        assert!(r.first().unwrap().contains("twin involution"));
    }

    #[test]
    fn reflex_face_detected() {
        // An L-shaped face recorded against the hull of its vertices.
        let l = [p(0, 0), p(4, 0), p(4, 1), p(1, 1), p(1, 4), p(0, 4)];
        let edges: Vec<(Point, Point, usize)> = (0..6)
            .map(|i| (l[i].clone(), l[(i + 1) % 6].clone(), 0))
            .collect();
        let s = Subdivision::assemble(
            vec![hull(&l)],
            edges,
            Vec::new(),
            &HashMap::new(),
            Vec::new(),
        );
        let r = s.validate();
        assert!(
            r.failures.iter().any(|f| f.contains("non-convex face")),
            "{r:?}"
        );
    }

    #[test]
    fn dump_is_deterministic() {
        let build = || {
            empty_subdivision()
                .augment_hull(&hull(&[p(0, 0), p(6, 0), p(0, 6)]), None)
                .unwrap()
                .augment_hull(&hull(&[p(4, -1), p(8, -1), p(4, 3)]), None)
                .unwrap()
        };
        assert_eq!(build().dump(), build().dump());
        assert!(build().dump().starts_with("V=7 E=8 F=3 C=1"));
    }

    #[test]
    fn clip_squares() {
        let a = hull(&[p(0, 0), p(2, 0), p(2, 2), p(0, 2)]);
        let b = hull(&[p(1, 1), p(3, 1), p(3, 3), p(1, 3)]);
        assert_eq!(clip(&a, &b).double_area(), int(2));
    }
}
