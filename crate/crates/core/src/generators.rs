//! Deterministic instance families with witness solutions.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geom::{int, ratio, scalar_to_f64, Orientation, Point, Scalar};
use crate::island::{Instance, IslandError};
use crate::oracles::{Certificate, CertificateKind};

pub const RED: usize = 0;
pub const BLUE: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Island(#[from] IslandError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedInstance {
    pub instance: Instance,
    pub witnesses: Vec<(String, Certificate)>,
    /// Named member sets that are expected to be islands.
    pub islands: Vec<(String, Vec<usize>)>,
    pub metadata: BTreeMap<String, String>,
}

impl GeneratedInstance {
    pub fn witness(&self, name: &str) -> Option<&Certificate> {
        self.witnesses
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c)
    }
}

fn pow2(e: i64) -> Scalar {
    if e >= 0 {
        Scalar::from_integer(BigInt::one() << e as usize)
    } else {
        Scalar::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatTreeParams {
    pub ell: u32,
    pub eps: Scalar,
    pub delta: Scalar,
    /// Red points in a leaf square; height `i` gets `r_base * 2^i`.
    pub r_base: usize,
    /// Blue coordinates are rounded to multiples of `2^-tangent_precision`.
    pub tangent_precision: u32,
}

impl FlatTreeParams {
    /// `eps = 2^(-ell-4)`, `delta = eps * 2^(-2 ell)`, 64 red points per leaf.
    pub fn preset(ell: u32) -> Self {
        Self::scaled(ell, 64)
    }

    pub fn scaled(ell: u32, r_base: usize) -> Self {
        let eps = pow2(-(ell as i64) - 4);
        let delta = &eps * pow2(-2 * ell as i64);
        FlatTreeParams {
            ell,
            eps,
            delta,
            r_base,
            tangent_precision: 40,
        }
    }

    fn check(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::InvalidParams(m.to_string()));
        if self.ell < 1 {
            return bad("ell must be at least 1");
        }
        if self.ell > 10 {
            return bad("ell above 10 is not supported");
        }
        if !self.eps.is_positive() || self.eps >= pow2(-(self.ell as i64) - 3) {
            return bad("eps must lie in (0, 2^(-ell-3))");
        }
        if !self.delta.is_positive() || self.delta >= self.eps {
            return bad("delta must lie in (0, eps)");
        }
        if self.r_base < 2 || self.r_base % 2 == 1 {
            return bad("r_base must be even and at least 2");
        }
        if !(8..=60).contains(&self.tangent_precision) {
            return bad("tangent precision must lie in 8..=60");
        }
        Ok(())
    }
}

/// Center of the top-tree square at height `i`, position `j`.
pub fn flat_tree_center(i: u32, j: u64) -> Point {
    let x = Scalar::from_integer(BigInt::from((1u64 << i) + j * (1u64 << (i + 1))));
    let y = Scalar::new(5.into(), 2.into()) - pow2(1 - i as i64);
    Point::new(x, y)
}

fn mirror(p: &Point) -> Point {
    Point::new(p.x.clone(), -p.y.clone())
}

/// `count` points in strictly convex position within distance `r / 2` of
/// `c`, on two parabolic arcs.
fn lens(c: &Point, r: &Scalar, count: usize) -> Vec<Point> {
    let h = count / 2;
    let bits = usize::BITS - (h - 1).leading_zeros();
    let den = pow2(bits as i64);
    let q = r / int(4);
    let mut out = Vec::with_capacity(2 * h);
    for k in 0..h {
        let u = Scalar::from_integer(BigInt::from(2 * k as i64 + 1 - h as i64)) / &den;
        let x = &c.x + &q * &u;
        let dy = &q * (Scalar::one() - &u * &u / int(2));
        out.push(Point::new(x.clone(), &c.y + &dy));
        out.push(Point::new(x, &c.y - &dy));
    }
    out
}

/// Points where the two outer common tangents of the radius-`rho` balls at
/// `c` and `nb` leave the closed square of width `eps` around `c`, pushed
/// outward to the grid `2^-prec` so that they avoid the open tangent band.
fn tangent_exits(c: &Point, nb: &Point, rho: &Scalar, eps: &Scalar, prec: u32) -> Vec<Point> {
    let d = (&nb.x - &c.x, &nb.y - &c.y);
    let (dx, dy) = (scalar_to_f64(&d.0), scalar_to_f64(&d.1));
    let len = (dx * dx + dy * dy).sqrt();
    let (nx, ny) = (-dy / len, dx / len);
    let (cx, cy) = c.to_f64();
    let (rf, hf) = (scalar_to_f64(rho), scalar_to_f64(eps) / 2.0);
    let half = eps / int(2);
    let d2 = &d.0 * &d.0 + &d.1 * &d.1;
    let unit = pow2(-(prec as i64));
    let mut out = Vec::new();
    for s in [1.0f64, -1.0] {
        let (qx, qy) = (cx + s * rf * nx, cy + s * rf * ny);
        // exit parameter through the vertical and horizontal sides
        let tx = if dx > 0.0 {
            (cx + hf - qx) / dx
        } else if dx < 0.0 {
            (cx - hf - qx) / dx
        } else {
            f64::INFINITY
        };
        let ty = if dy > 0.0 {
            (cy + hf - qy) / dy
        } else if dy < 0.0 {
            (cy - hf - qy) / dy
        } else {
            f64::INFINITY
        };
        let on_vertical = tx <= ty;
        let (free, step_sign) = if on_vertical {
            (qy + tx * dy, s * dx.signum())
        } else {
            (qx + ty * dx, -s * dy.signum())
        };
        let scaled = free * (prec as f64).exp2();
        let k = if step_sign > 0.0 {
            scaled.ceil()
        } else {
            scaled.floor()
        };
        let mut v = Scalar::from_integer(BigInt::from(k as i128)) * &unit;
        let step = if step_sign > 0.0 {
            unit.clone()
        } else {
            -unit.clone()
        };
        loop {
            let b = if on_vertical {
                let x = if dx > 0.0 { &c.x + &half } else { &c.x - &half };
                Point::new(x, v.clone())
            } else {
                let y = if dy > 0.0 { &c.y + &half } else { &c.y - &half };
                Point::new(v.clone(), y)
            };
            let cr = &d.0 * (&b.y - &c.y) - &d.1 * (&b.x - &c.x);
            let right_side = if s > 0.0 {
                cr.is_positive()
            } else {
                cr.is_negative()
            };
            if right_side && &cr * &cr >= rho * rho * &d2 {
                out.push(b);
                break;
            }
            v += &step;
        }
    }
    out
}

/// Two opposing binary trees of red clusters with blue blocker points; greedy
/// disjoint selection is drawn into the vertical islands `V[i,j]`.
pub fn flat_tree(p: &FlatTreeParams) -> Result<GeneratedInstance, GenError> {
    p.check()?;
    let ell = p.ell;
    let rho = &p.delta / int(2);
    let width = |i: u32| 1u64 << (ell - 1 - i);
    let mut items: Vec<(Point, usize)> = Vec::new();
    let mut clusters: BTreeMap<(u32, u64, bool), Vec<usize>> = BTreeMap::new();
    let mut blue_per_square = 0usize;
    let mut blue_top: Vec<Point> = Vec::new();
    for i in 0..ell {
        for j in 0..width(i) {
            let c = flat_tree_center(i, j);
            let count = p.r_base << i;
            for (top, pts) in [
                (true, lens(&c, &p.delta, count)),
                (false, lens(&mirror(&c), &p.delta, count)),
            ] {
                let ids = clusters.entry((i, j, top)).or_default();
                for q in pts {
                    ids.push(items.len());
                    items.push((q, RED));
                }
            }
            let mut nbs = vec![mirror(&c)];
            if j > 0 {
                nbs.push(flat_tree_center(i, j - 1));
            }
            if j + 1 < width(i) {
                nbs.push(flat_tree_center(i, j + 1));
            }
            if i > 0 {
                for jj in [2 * j, 2 * j + 1] {
                    let child = flat_tree_center(i - 1, jj);
                    nbs.push(mirror(&child));
                    nbs.push(child);
                }
            }
            let mut blues: BTreeSet<Point> = BTreeSet::new();
            for nb in &nbs {
                blues.extend(tangent_exits(&c, nb, &rho, &p.eps, p.tangent_precision));
            }
            blue_per_square = blue_per_square.max(blues.len());
            blue_top.extend(blues);
        }
    }
    blue_top.sort();
    blue_top.dedup();
    for b in &blue_top {
        items.push((b.clone(), BLUE));
        items.push((mirror(b), BLUE));
    }

    // Layers: red layer per height and tree; blue bands between them.
    let layer_y: Vec<Scalar> = (0..ell).map(|i| flat_tree_center(i, 0).y).collect();
    let margin = &p.delta / int(2);
    let mut bands: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (idx, (q, col)) in items.iter().enumerate() {
        if *col != BLUE {
            continue;
        }
        let y = q.y.abs();
        if layer_y.iter().any(|ly| (&y - ly).abs() < margin) {
            return Err(GenError::InvalidParams(format!(
                "blue point {q} too close to a red layer"
            )));
        }
        if y > layer_y[ell as usize - 1] {
            return Err(GenError::InvalidParams(format!(
                "blue point {q} above the top layer"
            )));
        }
        // band k sits between layers k-1 and k; band 0 straddles the x-axis
        let k = layer_y.iter().filter(|ly| **ly < y).count() as i64;
        let key = if k == 0 {
            0
        } else if q.y.is_positive() {
            k
        } else {
            -k
        };
        bands.entry(key).or_default().push(idx);
    }
    let mut layered: Vec<Vec<usize>> = Vec::new();
    for i in 0..ell {
        for top in [true, false] {
            let mut layer: Vec<usize> = (0..width(i))
                .flat_map(|j| clusters[&(i, j, top)].iter().copied())
                .collect();
            layer.sort_unstable();
            layered.push(layer);
        }
    }
    layered.extend(bands.into_values());

    let mut islands = Vec::new();
    for i in 0..ell {
        for j in 0..width(i) {
            let mut v: Vec<usize> = clusters[&(i, j, true)]
                .iter()
                .chain(&clusters[&(i, j, false)])
                .copied()
                .collect();
            v.sort_unstable();
            islands.push((format!("V[{i},{j}]"), v));
        }
    }

    let (pts, cols): (Vec<Point>, Vec<usize>) = items.into_iter().unzip();
    let instance = Instance::new(pts, cols, 2)?;
    let bound = layered.len();
    let mut metadata = BTreeMap::new();
    metadata.insert("family".into(), "flat-tree".into());
    metadata.insert("ell".into(), ell.to_string());
    metadata.insert("eps".into(), p.eps.to_string());
    metadata.insert("delta".into(), p.delta.to_string());
    metadata.insert("r_base".into(), p.r_base.to_string());
    metadata.insert("tangent_precision".into(), p.tangent_precision.to_string());
    metadata.insert("max_blue_per_square".into(), blue_per_square.to_string());
    Ok(GeneratedInstance {
        instance,
        witnesses: vec![(
            "layered".into(),
            Certificate {
                kind: CertificateKind::WitnessPartition,
                payload: layered,
                bound,
            },
        )],
        islands,
        metadata,
    })
}

/// `k` blue columns of `k + 1` points crossed by `k` red rows of `k + 1`
/// points; every column hull crosses every row hull once.
pub fn checkerboard_cross(k: usize) -> Result<GeneratedInstance, GenError> {
    if k < 1 {
        return Err(GenError::InvalidParams("k must be at least 1".into()));
    }
    let k_i = k as i64;
    let mut items = Vec::new();
    let mut columns = Vec::new();
    for a in 1..=k_i {
        let mut col = Vec::new();
        for b in 0..=k_i {
            col.push(items.len());
            items.push((Point::from_ints(a, b), BLUE));
        }
        columns.push(col);
    }
    let mut rows = vec![Vec::new(); k];
    let mut red_columns = vec![Vec::new(); k + 1];
    for d in 0..k_i {
        for c in 0..=k_i {
            let idx = items.len();
            rows[d as usize].push(idx);
            red_columns[c as usize].push(idx);
            items.push((Point::from_ratios((2 * c + 1, 2), (2 * d + 1, 2)), RED));
        }
    }
    let instance = Instance::from_colored(items)?;
    let cover: Vec<Vec<usize>> = columns.iter().chain(&rows).cloned().collect();
    let partition: Vec<Vec<usize>> = columns.iter().chain(&red_columns).cloned().collect();
    let mut metadata = BTreeMap::new();
    metadata.insert("family".into(), "checkerboard-cross".into());
    metadata.insert("k".into(), k.to_string());
    Ok(GeneratedInstance {
        instance,
        witnesses: vec![
            (
                "cover".into(),
                Certificate {
                    kind: CertificateKind::WitnessCover,
                    bound: cover.len(),
                    payload: cover,
                },
            ),
            (
                "partition".into(),
                Certificate {
                    kind: CertificateKind::WitnessPartition,
                    bound: partition.len(),
                    payload: partition,
                },
            ),
        ],
        islands: Vec::new(),
        metadata,
    })
}

/// Alternating `k x k` grid with thin guard rectangles beside every row and
/// column gap.
pub fn grid_with_rectangles(k: usize) -> Result<GeneratedInstance, GenError> {
    if k < 2 || !k.is_power_of_two() {
        return Err(GenError::InvalidParams(
            "k must be a power of two, at least 2".into(),
        ));
    }
    let k_i = k as i64;
    let mut items: Vec<(Point, usize)> = Vec::new();
    let mut diagonals = vec![Vec::new(); 2 * k - 1];
    for i in 0..k_i {
        for j in 0..k_i {
            diagonals[(i + j) as usize].push(items.len());
            items.push((Point::from_ints(i, j), ((i + j) % 2) as usize));
        }
    }
    let mut rects: Vec<Vec<usize>> = Vec::new();
    let mut rect =
        |items: &mut Vec<(Point, usize)>, x: (Scalar, Scalar), y: (Scalar, Scalar), col: usize| {
            let mut ids = Vec::new();
            for px in [&x.0, &x.1] {
                for py in [&y.0, &y.1] {
                    ids.push(items.len());
                    items.push((Point::new(px.clone(), py.clone()), col));
                }
            }
            rects.push(ids);
        };
    let eighth = ratio(1, 8);
    let quarter = ratio(1, 4);
    for gap in 0..k_i - 1 {
        let g = ratio(2 * gap + 1, 2);
        let above = (&g + &eighth, &g + &quarter);
        let below = (&g - &quarter, &g - &eighth);
        for side in [(int(-3), int(-1)), (int(k_i), int(k_i + 2))] {
            // row gap: rectangles left and right of the grid
            rect(&mut items, side.clone(), above.clone(), 0);
            rect(&mut items, side.clone(), below.clone(), 1);
            // column gap: rectangles below and above the grid
            rect(&mut items, above.clone(), side.clone(), 0);
            rect(&mut items, below.clone(), side, 1);
        }
    }
    let instance = Instance::from_colored(items)?;
    let partition: Vec<Vec<usize>> = diagonals.into_iter().chain(rects).collect();
    let mut metadata = BTreeMap::new();
    metadata.insert("family".into(), "grid-rectangles".into());
    metadata.insert("k".into(), k.to_string());
    Ok(GeneratedInstance {
        instance,
        witnesses: vec![(
            "partition".into(),
            Certificate {
                kind: CertificateKind::WitnessPartition,
                bound: partition.len(),
                payload: partition,
            },
        )],
        islands: Vec::new(),
        metadata,
    })
}

/// Integer points in `[0, 1000)^2` with uniform colors; with
/// `general_position` no three points are collinear.
pub fn random_instance(
    n: usize,
    colors: usize,
    seed: u64,
    general_position: bool,
) -> Result<GeneratedInstance, GenError> {
    if n < 1 || colors < 1 {
        return Err(GenError::InvalidParams(
            "n and colors must be at least 1".into(),
        ));
    }
    if n > 2000 {
        return Err(GenError::InvalidParams(
            "n above 2000 is not supported".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<Point> = Vec::with_capacity(n);
    while pts.len() < n {
        let p = Point::from_ints(rng.gen_range(0..1000), rng.gen_range(0..1000));
        if pts.contains(&p) {
            continue;
        }
        if general_position
            && pts.iter().enumerate().any(|(a, q)| {
                pts[a + 1..]
                    .iter()
                    .any(|r| crate::geom::orientation(q, r, &p) == Orientation::Collinear)
            })
        {
            continue;
        }
        pts.push(p);
    }
    let cols: Vec<usize> = (0..n).map(|_| rng.gen_range(0..colors)).collect();
    let instance = Instance::new(pts, cols, colors)?;
    let mut metadata = BTreeMap::new();
    metadata.insert("family".into(), "random".into());
    metadata.insert("n".into(), n.to_string());
    metadata.insert("colors".into(), colors.to_string());
    metadata.insert("seed".into(), seed.to_string());
    metadata.insert("general_position".into(), general_position.to_string());
    Ok(GeneratedInstance {
        instance,
        witnesses: Vec::new(),
        islands: Vec::new(),
        metadata,
    })
}

/// Largest denominator among instance coordinates, as a power of two when
/// possible; used by tests to confirm the native integer path applies.
pub fn max_denominator_bits(inst: &Instance) -> u64 {
    inst.points()
        .iter()
        .flat_map(|p| [p.x.denom().bits(), p.y.denom().bits()])
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::island::is_island;
    use crate::oracles::verify_certificate;

    #[test]
    fn centers() {
        assert_eq!(flat_tree_center(0, 0), Point::from_ratios((1, 1), (1, 2)));
        assert_eq!(flat_tree_center(0, 1), Point::from_ratios((3, 1), (1, 2)));
        assert_eq!(flat_tree_center(1, 0), Point::from_ratios((2, 1), (3, 2)));
    }

    #[test]
    fn lens_is_convex_and_small() {
        let c = Point::from_ints(1, 1);
        let r = ratio(1, 64);
        let pts = lens(&c, &r, 64);
        assert_eq!(pts.len(), 64);
        let hull = crate::geom::convex_hull(&pts).unwrap();
        assert_eq!(hull.len(), 64);
        let lim = &r * &r / int(4);
        assert!(pts
            .iter()
            .all(|p| (&p.x - &c.x) * (&p.x - &c.x) + (&p.y - &c.y) * (&p.y - &c.y) < lim));
    }

    #[test]
    fn flat_tree_one_level() {
        let g = flat_tree(&FlatTreeParams::preset(1)).unwrap();
        assert_eq!(g.islands.len(), 1);
        assert_eq!(g.islands[0].1.len(), 128);
        assert!(is_island(&g.islands[0].1, &g.instance).unwrap());
        assert!(verify_certificate(&g.instance, g.witness("layered").unwrap()).passed());
    }

    #[test]
    fn flat_tree_two_levels() {
        let g = flat_tree(&FlatTreeParams::preset(2)).unwrap();
        let reds = g.instance.colors().iter().filter(|&&c| c == RED).count();
        assert_eq!(reds, 2 * (64 + 64 + 128));
        assert_eq!(g.islands.len(), 3);
        for (name, v) in &g.islands {
            assert!(is_island(v, &g.instance).unwrap(), "{name}");
        }
        let w = g.witness("layered").unwrap();
        assert!(w.bound <= 8);
        assert!(verify_certificate(&g.instance, w).passed());
        assert!(g.metadata["max_blue_per_square"].parse::<usize>().unwrap() <= 14);
        assert!(max_denominator_bits(&g.instance) <= 41);
    }

    #[test]
    fn bad_params() {
        let mut p = FlatTreeParams::preset(2);
        p.delta = p.eps.clone();
        assert!(flat_tree(&p).is_err());
        assert!(checkerboard_cross(0).is_err());
        assert!(grid_with_rectangles(3).is_err());
    }

    #[test]
    fn checkerboard_sizes() {
        let g = checkerboard_cross(2).unwrap();
        assert_eq!(g.instance.len(), 12);
        assert_eq!(g.witness("cover").unwrap().bound, 4);
        let g3 = checkerboard_cross(3).unwrap();
        assert_eq!(g3.witness("partition").unwrap().bound, 7);
        for g in [g, g3] {
            for (_, w) in &g.witnesses {
                assert!(verify_certificate(&g.instance, w).passed());
            }
        }
    }

    #[test]
    fn grid_witness() {
        let g2 = grid_with_rectangles(2).unwrap();
        let grid: Vec<usize> = g2.instance.colors()[..4].to_vec();
        assert_eq!(grid, vec![0, 1, 1, 0]);
        let g = grid_with_rectangles(4).unwrap();
        let w = g.witness("partition").unwrap();
        assert_eq!(w.bound, 7 + 24);
        assert!(verify_certificate(&g.instance, w).passed());
    }

    #[test]
    fn random_is_deterministic() {
        let a = random_instance(4, 2, 1, true).unwrap();
        let b = random_instance(4, 2, 1, true).unwrap();
        assert_eq!(a.instance, b.instance);
        assert_eq!(random_instance(1, 1, 5, false).unwrap().instance.len(), 1);
    }
}
