//! Exact search for a maximum-weight island.
//!
//! Points are mapped to an integer frame (common denominator), using `i128`
//! when the scaled coordinates are small enough and `BigInt` otherwise. For
//! every root `p` (the lowest vertex of the polygon) a dynamic program over
//! the visible candidates above `p` builds convex fans `p, q_1, ..., q_m`
//! triangle by triangle. Triangle contents come from prefix tables, so each
//! transition is O(1) after an O(n^2 log n) preprocessing step.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Instance, Island, IslandError, Score, WeightSpec};
use crate::geom::Point;

/// How many optimal polygons are compared when breaking ties.
const TIE_CAP: usize = 4096;
const NONE: u32 = u32::MAX;

pub(crate) trait Coord: Clone + Ord + Debug {
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn is_pos(&self) -> bool;
    fn is_zero_c(&self) -> bool;
}

impl Coord for i128 {
    #[inline]
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    #[inline]
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    #[inline]
    fn is_pos(&self) -> bool {
        *self > 0
    }
    #[inline]
    fn is_zero_c(&self) -> bool {
        *self == 0
    }
}

impl Coord for BigInt {
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
}

type P<T> = (T, T);

/// Sign of the cross product `(a - o) x (b - o)`.
#[inline]
fn orient<T: Coord>(o: &P<T>, a: &P<T>, b: &P<T>) -> Ordering {
    let l = a.0.sub(&o.0).mul(&b.1.sub(&o.1));
    let r = a.1.sub(&o.1).mul(&b.0.sub(&o.0));
    l.cmp(&r)
}

#[inline]
fn half<T: Coord>(v: &P<T>) -> u8 {
    if v.1.is_pos() || (v.1.is_zero_c() && v.0.is_pos()) {
        0
    } else {
        1
    }
}

/// Compares directions by angle in `[0, 2pi)` measured from `+x`.
#[inline]
fn angle_cmp<T: Coord>(a: &P<T>, b: &P<T>) -> Ordering {
    half(a)
        .cmp(&half(b))
        .then_with(|| a.1.mul(&b.0).cmp(&a.0.mul(&b.1)))
}

#[inline]
fn diff<T: Coord>(a: &P<T>, b: &P<T>) -> P<T> {
    (a.0.sub(&b.0), a.1.sub(&b.1))
}

fn norm2<T: Coord>(v: &P<T>) -> (T, T) {
    (v.0.mul(&v.0), v.1.mul(&v.1))
}

fn dist_cmp<T: Coord>(a: &P<T>, b: &P<T>) -> Ordering {
    // Only called for vectors with the same direction.
    let (ax, ay) = norm2(a);
    let (bx, by) = norm2(b);
    ax.cmp(&bx).then(ay.cmp(&by))
}

fn on_closed_segment<T: Coord>(x: &P<T>, a: &P<T>, b: &P<T>) -> bool {
    orient(a, b, x) == Ordering::Equal
        && a.0.clone().min(b.0.clone()) <= x.0
        && x.0 <= a.0.clone().max(b.0.clone())
        && a.1.clone().min(b.1.clone()) <= x.1
        && x.1 <= a.1.clone().max(b.1.clone())
}

fn segments_meet<T: Coord>(a: &P<T>, b: &P<T>, c: &P<T>, d: &P<T>) -> bool {
    let d1 = orient(a, b, c);
    let d2 = orient(a, b, d);
    let d3 = orient(c, d, a);
    let d4 = orient(c, d, b);
    let proper = d1 != Ordering::Equal
        && d2 != Ordering::Equal
        && d3 != Ordering::Equal
        && d4 != Ordering::Equal;
    if proper {
        return d1 != d2 && d3 != d4;
    }
    on_closed_segment(c, a, b)
        || on_closed_segment(d, a, b)
        || on_closed_segment(a, c, d)
        || on_closed_segment(b, c, d)
}

/// Closed containment in a CCW polygon given by points (1 or 2 vertices allowed).
fn in_closed<T: Coord>(poly: &[&P<T>], x: &P<T>) -> bool {
    match poly.len() {
        0 => false,
        1 => poly[0] == x,
        2 => on_closed_segment(x, poly[0], poly[1]),
        n => (0..n).all(|i| orient(poly[i], poly[(i + 1) % n], x) != Ordering::Less),
    }
}

fn polygons_meet<T: Coord>(a: &[&P<T>], b: &[&P<T>]) -> bool {
    if a.iter().any(|v| in_closed(b, v)) || b.iter().any(|v| in_closed(a, v)) {
        return true;
    }
    let edges = |poly: &[&P<T>]| -> Vec<(usize, usize)> {
        match poly.len() {
            0 | 1 => Vec::new(),
            2 => vec![(0, 1)],
            n => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        }
    };
    let ea = edges(a);
    let eb = edges(b);
    ea.iter().any(|&(i, j)| {
        eb.iter()
            .any(|&(k, l)| segments_meet(a[i], a[j], b[k], b[l]))
    })
}

/// Angular structure of a fixed point set in an integer frame.
pub(crate) struct Kernel<T> {
    pts: Vec<P<T>>,
    n_inst: usize,
    lex_rank: Vec<u32>,
    /// For each instance point, every other kernel point sorted by angle
    /// (ties by distance).
    around: Vec<Vec<u32>>,
    /// Index into `around[u]` of the first direction strictly past straight down.
    down_start: Vec<u32>,
}

impl<T: Coord> Kernel<T> {
    fn build(pts: Vec<P<T>>, n_inst: usize) -> Self {
        let n = pts.len();
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by(|&a, &b| pts[a as usize].cmp(&pts[b as usize]));
        let mut lex_rank = vec![0u32; n];
        for (r, &i) in order.iter().enumerate() {
            lex_rank[i as usize] = r as u32;
        }
        let mut around = Vec::with_capacity(n_inst);
        let mut down_start = Vec::with_capacity(n_inst);
        for c in 0..n_inst {
            let pc = &pts[c];
            let mut list: Vec<u32> = (0..n as u32).filter(|&v| v as usize != c).collect();
            let dirs: Vec<P<T>> = (0..n).map(|v| diff(&pts[v], pc)).collect();
            list.sort_by(|&a, &b| {
                let (da, db) = (&dirs[a as usize], &dirs[b as usize]);
                angle_cmp(da, db).then_with(|| dist_cmp(da, db))
            });
            // Straight down is the direction (0, -1): half 1, and every vector
            // with angle <= 3pi/2 compares not greater.
            let down_ix = list.partition_point(|&v| {
                let d = &dirs[v as usize];
                half(d) == 0 || !(d.0.is_pos())
            });
            around.push(list);
            down_start.push(down_ix as u32);
        }
        Kernel {
            pts,
            n_inst,
            lex_rank,
            around,
            down_start,
        }
    }
}

enum AnyKernel {
    Small(Kernel<i128>),
    Big(Kernel<BigInt>),
}

/// Reusable search state for one instance.
///
/// Building the angular structure costs O(n^2 log n); afterwards every call to
/// [`IslandSearch::best`] reuses it as long as the forbidden regions only have
/// instance points as vertices.
pub struct IslandSearch<'a> {
    inst: &'a Instance,
    kernel: AnyKernel,
    index: HashMap<Point, usize>,
}

fn scale_points(points: &[Point]) -> (Vec<P<BigInt>>, bool) {
    let mut den = BigInt::one();
    for p in points {
        den = den.lcm(p.x.denom());
        den = den.lcm(p.y.denom());
    }
    let limit = BigInt::one() << 61usize;
    let mut small = true;
    let scaled: Vec<P<BigInt>> = points
        .iter()
        .map(|p| {
            let x = p.x.numer() * (&den / p.x.denom());
            let y = p.y.numer() * (&den / p.y.denom());
            if x.abs() >= limit || y.abs() >= limit {
                small = false;
            }
            (x, y)
        })
        .collect();
    (scaled, small)
}

impl<'a> IslandSearch<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        Self::with_extra(inst, &[])
    }

    fn with_extra(inst: &'a Instance, extra: &[Point]) -> Self {
        let mut all: Vec<Point> = inst.points().to_vec();
        all.extend(extra.iter().cloned());
        let index: HashMap<Point, usize> = all
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let (scaled, small) = scale_points(&all);
        let kernel = if small {
            let pts = scaled
                .into_iter()
                .map(|(x, y)| (x.to_i128().unwrap(), y.to_i128().unwrap()))
                .collect();
            AnyKernel::Small(Kernel::build(pts, inst.len()))
        } else {
            AnyKernel::Big(Kernel::build(scaled, inst.len()))
        };
        IslandSearch {
            inst,
            kernel,
            index,
        }
    }

    pub fn instance(&self) -> &Instance {
        self.inst
    }

    /// Best island for `w` and its score.
    pub fn best(&self, w: &WeightSpec) -> Result<(Island, Score), IslandError> {
        let n = self.inst.len();
        if w.primary.len() != n || w.secondary.len() != n {
            return Err(IslandError::WeightLength);
        }
        let mut ghosts: Vec<Point> = Vec::new();
        for f in &w.forbidden {
            for v in f.vertices() {
                if !self.index.contains_key(v) && !ghosts.contains(v) {
                    ghosts.push(v.clone());
                }
            }
        }
        if !ghosts.is_empty() {
            return IslandSearch::with_extra(self.inst, &ghosts).best(w);
        }
        let forbidden: Vec<Vec<u32>> = w
            .forbidden
            .iter()
            .map(|f| f.vertices().iter().map(|v| self.index[v] as u32).collect())
            .collect();
        let found = match &self.kernel {
            AnyKernel::Small(k) => solve(k, self.inst, w, &forbidden),
            AnyKernel::Big(k) => solve(k, self.inst, w, &forbidden),
        };
        let members = found.ok_or(IslandError::NoCandidate)?;
        let island = Island::from_members(&members, self.inst)?;
        let score = Score::of(&members, w);
        Ok((island, score))
    }
}

#[derive(Clone, Copy, Default, PartialEq, Eq, Debug)]
struct Acc {
    obs: i64,
    pri: i64,
    sec: i64,
}

impl Acc {
    #[inline]
    fn add(self, o: Acc) -> Acc {
        Acc {
            obs: self.obs + o.obs,
            pri: self.pri + o.pri,
            sec: self.sec + o.sec,
        }
    }
    #[inline]
    fn sub(self, o: Acc) -> Acc {
        Acc {
            obs: self.obs - o.obs,
            pri: self.pri - o.pri,
            sec: self.sec - o.sec,
        }
    }
    #[inline]
    fn key(self) -> Key {
        (self.pri, -self.sec)
    }
}

/// `(primary, -secondary)`: larger is better in lexicographic order.
type Key = (i64, i64);
const NEG: Key = (i64::MIN, i64::MIN);

#[inline]
fn kadd(a: Key, b: Key) -> Key {
    (a.0 + b.0, a.1 + b.1)
}

struct Fenwick {
    t: Vec<Acc>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick {
            t: vec![Acc::default(); n + 1],
        }
    }
    fn clear(&mut self) {
        self.t.iter_mut().for_each(|a| *a = Acc::default());
    }
    fn add(&mut self, i: usize, v: Acc) {
        let mut i = i + 1;
        while i < self.t.len() {
            self.t[i] = self.t[i].add(v);
            i += i & i.wrapping_neg();
        }
    }
    /// Sum over indices `< i`.
    fn prefix(&self, i: usize) -> Acc {
        let mut i = i;
        let mut s = Acc::default();
        while i > 0 {
            s = s.add(self.t[i]);
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// Tangent vertices of a forbidden region as seen from the current root: the
/// whole region is left of `p -> lo` and right of `p -> hi`.
struct Region {
    lo: usize,
    hi: usize,
}

struct Solver<'k, T> {
    k: &'k Kernel<T>,
    val: Vec<Acc>,
    apos: Vec<u32>,
    allowed: Vec<u32>,
    na: usize,
    /// `b[a*na + c]` for lex `a < c`: points lex-between, strictly right of a->c.
    b: Vec<Acc>,
    /// Points on the open segment, symmetric.
    s: Vec<Acc>,
    regions: Vec<Vec<u32>>,
}

fn solve<T: Coord>(
    k: &Kernel<T>,
    inst: &Instance,
    w: &WeightSpec,
    forbidden: &[Vec<u32>],
) -> Option<Vec<usize>> {
    let n = k.pts.len();
    let mut val = vec![
        Acc {
            obs: 1,
            pri: 0,
            sec: 0
        };
        n
    ];
    let mut apos = vec![NONE; n];
    let mut allowed = Vec::new();
    let region_pts: Vec<Vec<&P<T>>> = forbidden
        .iter()
        .map(|f| f.iter().map(|&v| &k.pts[v as usize]).collect())
        .collect();
    for i in 0..k.n_inst {
        if inst.color(i) != w.color {
            continue;
        }
        if region_pts.iter().any(|f| in_closed(f, &k.pts[i])) {
            continue;
        }
        apos[i] = allowed.len() as u32;
        allowed.push(i as u32);
        val[i] = Acc {
            obs: 0,
            pri: w.primary[i],
            sec: w.secondary[i],
        };
    }
    if allowed.is_empty() {
        return None;
    }
    let na = allowed.len();
    let mut solver = Solver {
        k,
        val,
        apos,
        allowed,
        na,
        b: vec![Acc::default(); na * na],
        s: vec![Acc::default(); na * na],
        regions: forbidden.to_vec(),
    };
    solver.fill_tables();
    solver.run()
}

impl<'k, T: Coord> Solver<'k, T> {
    fn fill_tables(&mut self) {
        let k = self.k;
        let mut bit = Fenwick::new(k.pts.len());
        let mut group: Vec<u32> = Vec::new();
        for ai in 0..self.na {
            let u = self.allowed[ai] as usize;
            bit.clear();
            let list = &k.around[u];
            let len = list.len();
            let start = k.down_start[u] as usize;
            let pu = &k.pts[u];
            let mut t = 0;
            while t < len {
                let v = list[(start + t) % len];
                if k.lex_rank[v as usize] < k.lex_rank[u] {
                    break;
                }
                let dv = diff(&k.pts[v as usize], pu);
                group.clear();
                group.push(v);
                t += 1;
                while t < len {
                    let x = list[(start + t) % len];
                    if k.lex_rank[x as usize] < k.lex_rank[u] {
                        break;
                    }
                    if angle_cmp(&diff(&k.pts[x as usize], pu), &dv) != Ordering::Equal {
                        break;
                    }
                    group.push(x);
                    t += 1;
                }
                let mut run = Acc::default();
                for &x in &group {
                    let x = x as usize;
                    let cx = self.apos[x];
                    if cx != NONE {
                        let cx = cx as usize;
                        self.b[ai * self.na + cx] = bit.prefix(k.lex_rank[x] as usize);
                        self.s[ai * self.na + cx] = run;
                        self.s[cx * self.na + ai] = run;
                    }
                    run = run.add(self.val[x]);
                }
                for &x in &group {
                    bit.add(k.lex_rank[x as usize] as usize, self.val[x as usize]);
                }
            }
        }
    }

    #[inline]
    fn seg(&self, a: u32, c: u32) -> Acc {
        self.s[self.apos[a as usize] as usize * self.na + self.apos[c as usize] as usize]
    }

    #[inline]
    fn below(&self, a: u32, c: u32) -> Acc {
        self.b[self.apos[a as usize] as usize * self.na + self.apos[c as usize] as usize]
    }

    /// Open interior of the triangle with allowed vertices `x, y, z`.
    fn interior(&self, x: u32, y: u32, z: u32) -> Acc {
        let k = self.k;
        let mut t = [x, y, z];
        t.sort_by_key(|&v| k.lex_rank[v as usize]);
        let [a, b, c] = t;
        let o = orient(&k.pts[a as usize], &k.pts[b as usize], &k.pts[c as usize]);
        match o {
            Ordering::Greater => self
                .below(a, c)
                .sub(self.below(a, b))
                .sub(self.below(b, c))
                .sub(self.seg(a, b))
                .sub(self.seg(b, c))
                .sub(self.val[b as usize]),
            Ordering::Less => self
                .below(a, b)
                .add(self.below(b, c))
                .sub(self.below(a, c))
                .sub(self.seg(a, c)),
            Ordering::Equal => Acc::default(),
        }
    }

    /// Tangent vertices of every forbidden region as seen from `p`.
    fn tangents(&self, p: u32) -> Vec<Region> {
        let k = self.k;
        let pp = &k.pts[p as usize];
        self.regions
            .iter()
            .map(|verts| {
                let mut lo = verts[0] as usize;
                let mut hi = verts[0] as usize;
                for &v in &verts[1..] {
                    let v = v as usize;
                    match orient(pp, &k.pts[lo], &k.pts[v]) {
                        Ordering::Less => lo = v,
                        Ordering::Equal => {
                            if dist_cmp(&diff(&k.pts[v], pp), &diff(&k.pts[lo], pp))
                                == Ordering::Less
                            {
                                lo = v
                            }
                        }
                        Ordering::Greater => {}
                    }
                    match orient(pp, &k.pts[hi], &k.pts[v]) {
                        Ordering::Greater => hi = v,
                        Ordering::Equal => {
                            if dist_cmp(&diff(&k.pts[v], pp), &diff(&k.pts[hi], pp))
                                == Ordering::Less
                            {
                                hi = v
                            }
                        }
                        Ordering::Less => {}
                    }
                }
                Region { lo, hi }
            })
            .collect()
    }

    /// Whether the closed segment from `p` to `q` meets a forbidden region.
    /// `p` and `q` are allowed, hence outside every region.
    fn spoke_blocked(&self, p: u32, q: u32, regions: &[Region]) -> bool {
        let k = self.k;
        let pp = &k.pts[p as usize];
        let pq = &k.pts[q as usize];
        regions.iter().any(|r| {
            let t1 = &k.pts[r.lo];
            let t2 = &k.pts[r.hi];
            if r.lo == r.hi {
                return on_closed_segment(t1, pp, pq);
            }
            orient(pp, t1, pq) != Ordering::Less
                && orient(pp, t2, pq) != Ordering::Greater
                && orient(t1, t2, pq) != Ordering::Greater
        })
    }

    fn candidates(&self, p: u32) -> Vec<u32> {
        let k = self.k;
        let regions = self.tangents(p);
        let pp = &k.pts[p as usize];
        let mut q = Vec::new();
        for &v in &k.around[p as usize] {
            if half(&diff(&k.pts[v as usize], pp)) != 0 {
                break;
            }
            if self.apos[v as usize] == NONE {
                continue;
            }
            if self.seg(p, v).obs != 0 {
                continue;
            }
            if !regions.is_empty() && self.spoke_blocked(p, v, &regions) {
                continue;
            }
            q.push(v);
        }
        q
    }

    fn run(&self) -> Option<Vec<usize>> {
        let k = self.k;
        let roots: Vec<(u32, Vec<u32>, i64)> = self
            .allowed
            .iter()
            .map(|&p| {
                let q = self.candidates(p);
                let bound = self.val[p as usize].pri
                    + q.iter()
                        .map(|&v| self.val[v as usize].pri.max(0))
                        .sum::<i64>();
                (p, q, bound)
            })
            .collect();
        let mut order: Vec<usize> = (0..roots.len()).collect();
        order.sort_by(|&a, &b| roots[b].2.cmp(&roots[a].2).then(a.cmp(&b)));

        let mut dp = Dp::new(k.pts.len());
        let mut best = NEG;
        let mut root_best: Vec<Key> = vec![NEG; roots.len()];
        for &ri in &order {
            let (p, q, bound) = &roots[ri];
            if best != NEG && *bound < best.0 {
                continue;
            }
            let v = dp.run(self, *p, q);
            root_best[ri] = v;
            if v > best {
                best = v;
            }
        }

        let mut chosen: Option<Vec<usize>> = None;
        let mut budget = TIE_CAP;
        for ri in 0..roots.len() {
            if root_best[ri] != best || budget == 0 {
                continue;
            }
            let (p, q, _) = &roots[ri];
            dp.run(self, *p, q);
            for poly in dp.optimal_polygons(self, *p, q, best, &mut budget) {
                let members = self.members_of(&poly);
                if chosen.as_ref().is_none_or(|c| members < *c) {
                    chosen = Some(members);
                }
            }
        }
        let chosen = chosen?;
        self.assert_feasible(&chosen);
        Some(chosen)
    }

    /// Allowed points in the closed polygon with CCW vertices `poly`.
    fn members_of(&self, poly: &[u32]) -> Vec<usize> {
        let k = self.k;
        let verts: Vec<&P<T>> = poly.iter().map(|&v| &k.pts[v as usize]).collect();
        let mut m: Vec<usize> = self
            .allowed
            .iter()
            .filter(|&&a| in_closed(&verts, &k.pts[a as usize]))
            .map(|&a| a as usize)
            .collect();
        m.sort_unstable();
        m
    }

    /// Whole-hull check of the final answer in the integer frame.
    fn assert_feasible(&self, members: &[usize]) {
        let k = self.k;
        let hull = int_hull(&k.pts, members);
        let hv: Vec<&P<T>> = hull.iter().map(|&v| &k.pts[v]).collect();
        for (i, pt) in k.pts.iter().enumerate() {
            if in_closed(&hv, pt) {
                assert!(
                    members.binary_search(&i).is_ok(),
                    "island search returned a hull containing point {i}"
                );
            }
        }
        for f in &self.regions {
            let fv: Vec<&P<T>> = f.iter().map(|&v| &k.pts[v as usize]).collect();
            assert!(
                !polygons_meet(&hv, &fv),
                "island search returned a hull meeting a forbidden region"
            );
        }
    }
}

/// Convex hull (CCW, no collinear vertices) of the indexed points.
fn int_hull<T: Coord>(pts: &[P<T>], members: &[usize]) -> Vec<usize> {
    let mut idx: Vec<usize> = members.to_vec();
    idx.sort_by(|&a, &b| pts[a].cmp(&pts[b]));
    if idx.len() <= 2 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && orient(
                &pts[lower[lower.len() - 2]],
                &pts[lower[lower.len() - 1]],
                &pts[i],
            ) != Ordering::Greater
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && orient(
                &pts[upper[upper.len() - 2]],
                &pts[upper[upper.len() - 1]],
                &pts[i],
            ) != Ordering::Greater
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.pop();
    }
    lower
}

/// Per-root dynamic program buffers.
struct Dp {
    rank: Vec<u32>,
    r: Vec<Key>,
    /// `g[j*m + i]` holds the best fan ending with edge `q_i -> q_j`.
    g: Vec<Key>,
    m: usize,
    jl: Vec<u32>,
    kl: Vec<u32>,
}

impl Dp {
    fn new(n: usize) -> Self {
        Dp {
            rank: vec![NONE; n],
            r: Vec::new(),
            g: Vec::new(),
            m: 0,
            jl: Vec::new(),
            kl: Vec::new(),
        }
    }

    fn tri_key<T: Coord>(s: &Solver<'_, T>, p: u32, a: u32, b: u32) -> Option<Key> {
        let e = s.seg(a, b);
        if e.obs != 0 {
            return None;
        }
        let t = s.interior(p, a, b);
        if t.obs != 0 {
            return None;
        }
        Some(t.add(e).key())
    }

    /// Fills the tables for root `p` and returns the best value rooted there.
    fn run<T: Coord>(&mut self, s: &Solver<'_, T>, p: u32, q: &[u32]) -> Key {
        let k = s.k;
        let m = q.len();
        self.m = m;
        for (i, &v) in q.iter().enumerate() {
            self.rank[v as usize] = i as u32;
        }
        self.r.clear();
        self.r
            .extend(q.iter().map(|&v| s.val[v as usize].add(s.seg(p, v)).key()));
        self.g.clear();
        self.g.resize(m * m, NEG);

        let vp = s.val[p as usize].key();
        let mut best = vp;
        for &rv in &self.r {
            best = best.max(kadd(vp, rv));
        }
        let pp = &k.pts[p as usize];
        for i in 0..m {
            let qi = q[i];
            let pi = &k.pts[qi as usize];
            let d = diff(pi, pp);
            let list = &k.around[qi as usize];
            let len = list.len();
            let start = list.partition_point(|&v| {
                angle_cmp(&diff(&k.pts[v as usize], pi), &d) == Ordering::Less
            });
            self.jl.clear();
            self.kl.clear();
            for t in 0..len {
                let v = list[(start + t) % len];
                let rk = self.rank[v as usize];
                if rk == NONE {
                    continue;
                }
                match (rk as usize).cmp(&i) {
                    Ordering::Greater => self.jl.push(rk),
                    Ordering::Less => self.kl.push(rk),
                    Ordering::Equal => {}
                }
            }
            let mut ptr = 0;
            let mut pm = NEG;
            let row = i * m;
            for ji in 0..self.jl.len() {
                let j = self.jl[ji] as usize;
                let qj = q[j];
                let pj = &k.pts[qj as usize];
                if orient(pp, pi, pj) != Ordering::Greater {
                    continue;
                }
                while ptr < self.kl.len() {
                    let kk = self.kl[ptr] as usize;
                    if orient(&k.pts[q[kk] as usize], pi, pj) != Ordering::Greater {
                        break;
                    }
                    let fv = self.g[row + kk];
                    if fv > pm {
                        pm = fv;
                    }
                    ptr += 1;
                }
                let Some(tk) = Self::tri_key(s, p, qi, qj) else {
                    continue;
                };
                let base = if pm > self.r[i] { pm } else { self.r[i] };
                let f = kadd(kadd(self.r[j], tk), base);
                self.g[j * m + i] = f;
                let total = kadd(vp, f);
                if total > best {
                    best = total;
                }
            }
        }
        for &v in q {
            self.rank[v as usize] = NONE;
        }
        best
    }

    /// Every polygon rooted at `p` reaching `target`, up to the budget.
    fn optimal_polygons<T: Coord>(
        &self,
        s: &Solver<'_, T>,
        p: u32,
        q: &[u32],
        target: Key,
        budget: &mut usize,
    ) -> Vec<Vec<u32>> {
        let m = self.m;
        let vp = s.val[p as usize].key();
        let mut out = Vec::new();
        if vp == target && *budget > 0 {
            out.push(vec![p]);
            *budget -= 1;
        }
        #[allow(clippy::needless_range_loop)]
        for i in 0..m {
            if *budget == 0 {
                return out;
            }
            if kadd(vp, self.r[i]) == target {
                out.push(vec![p, q[i]]);
                *budget -= 1;
            }
        }
        for i in 0..m {
            for j in 0..m {
                if *budget == 0 {
                    return out;
                }
                let f = self.g[j * m + i];
                if f == NEG || kadd(vp, f) != target {
                    continue;
                }
                let mut chain = vec![j, i];
                self.back(s, p, q, i, j, f, &mut chain, &mut out, budget);
            }
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn back<T: Coord>(
        &self,
        s: &Solver<'_, T>,
        p: u32,
        q: &[u32],
        i: usize,
        j: usize,
        f: Key,
        chain: &mut Vec<usize>,
        out: &mut Vec<Vec<u32>>,
        budget: &mut usize,
    ) {
        if *budget == 0 {
            return;
        }
        let m = self.m;
        let k = s.k;
        let tk = Self::tri_key(s, p, q[i], q[j]).expect("stored transition is valid");
        let need = (f.0 - self.r[j].0 - tk.0, f.1 - self.r[j].1 - tk.1);
        if self.r[i] == need {
            let mut poly = vec![p];
            poly.extend(chain.iter().rev().map(|&c| q[c]));
            out.push(poly);
            *budget -= 1;
        }
        let pi = &k.pts[q[i] as usize];
        let pj = &k.pts[q[j] as usize];
        for kk in 0..i {
            if *budget == 0 {
                return;
            }
            let fk = self.g[i * m + kk];
            if fk != need {
                continue;
            }
            if orient(&k.pts[q[kk] as usize], pi, pj) != Ordering::Greater {
                continue;
            }
            chain.push(kk);
            self.back(s, p, q, kk, i, fk, chain, out, budget);
            chain.pop();
        }
    }
}
