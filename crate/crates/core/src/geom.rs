//! Exact rational geometry: orientation, convex hulls, containment and
//! intersection predicates.
//!
//! Every predicate is evaluated on arbitrary-precision rationals, so there are
//! no tolerances anywhere. Degenerate hulls (a single point or a segment) are
//! ordinary values of [`ConvexPolygon`].

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

/// Exact rational scalar. Always stored in canonical (gcd-reduced) form.
pub type Scalar = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("empty point set")]
    EmptyPointSet,
    #[error("non-generic boundary overlap")]
    NonGenericOverlap,
}

/// Builds an exact scalar `num/den`. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(v))
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

impl Point {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(int(x), int(y))
    }

    pub fn from_ratios(x: (i64, i64), y: (i64, i64)) -> Self {
        Point::new(ratio(x.0, x.1), ratio(y.0, y.1))
    }

    /// Lexicographic comparison by x, then y.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        self.x.cmp(&other.x).then_with(|| self.y.cmp(&other.y))
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        let two = int(2);
        Point::new((&self.x + &other.x) / &two, (&self.y + &other.y) / &two)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (scalar_to_f64(&self.x), scalar_to_f64(&self.y))
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Lossy conversion used only at output boundaries (rendering, reports).
pub fn scalar_to_f64(s: &Scalar) -> f64 {
    use num_traits::ToPrimitive;
    s.to_f64().unwrap_or_else(|| {
        // Extremely large numerators/denominators: scale down by bit length.
        let n = s.numer();
        let d = s.denom();
        let shift = n.bits().max(d.bits()).saturating_sub(1000) as usize;
        let n = (n >> shift).to_f64().unwrap_or(0.0);
        let d = (d >> shift).to_f64().unwrap_or(1.0);
        n / d
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    Collinear,
}

/// Twice the signed area of triangle `(o, a, b)`.
pub fn cross(o: &Point, a: &Point, b: &Point) -> Scalar {
    (&a.x - &o.x) * (&b.y - &o.y) - (&a.y - &o.y) * (&b.x - &o.x)
}

pub fn orientation(p: &Point, q: &Point, r: &Point) -> Orientation {
    let c = cross(p, q, r);
    if c.is_positive() {
        Orientation::CounterClockwise
    } else if c.is_negative() {
        Orientation::Clockwise
    } else {
        Orientation::Collinear
    }
}

/// Whether `p` lies on the closed segment `a b` (assumes nothing about `a != b`).
pub fn on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    if !cross(a, b, p).is_zero() {
        return false;
    }
    let (lo_x, hi_x) = if a.x <= b.x {
        (&a.x, &b.x)
    } else {
        (&b.x, &a.x)
    };
    let (lo_y, hi_y) = if a.y <= b.y {
        (&a.y, &b.y)
    } else {
        (&b.y, &a.y)
    };
    *lo_x <= p.x && p.x <= *hi_x && *lo_y <= p.y && p.y <= *hi_y
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    fn is_degenerate(&self) -> bool {
        self.a == self.b
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegmentIntersection {
    None,
    Point(Point),
    Overlap,
}

/// Intersection of two closed segments. Zero-length segments are accepted and
/// behave like points.
pub fn segment_intersection(s1: &Segment, s2: &Segment) -> SegmentIntersection {
    let (p, q) = (&s1.a, &s1.b);
    let (r, s) = (&s2.a, &s2.b);

    if s1.is_degenerate() && s2.is_degenerate() {
        return if p == r {
            SegmentIntersection::Point(p.clone())
        } else {
            SegmentIntersection::None
        };
    }
    if s1.is_degenerate() {
        return if on_segment(p, r, s) {
            SegmentIntersection::Point(p.clone())
        } else {
            SegmentIntersection::None
        };
    }
    if s2.is_degenerate() {
        return if on_segment(r, p, q) {
            SegmentIntersection::Point(r.clone())
        } else {
            SegmentIntersection::None
        };
    }

    let d1 = cross(p, q, r);
    let d2 = cross(p, q, s);
    let d3 = cross(r, s, p);
    let d4 = cross(r, s, q);

    if d1.is_zero() && d2.is_zero() {
        // Collinear: project on the dominant axis.
        let key = |pt: &Point| -> Scalar {
            if p.x != q.x {
                pt.x.clone()
            } else {
                pt.y.clone()
            }
        };
        let (a0, a1) = minmax(key(p), key(q));
        let (b0, b1) = minmax(key(r), key(s));
        let lo = if a0 > b0 { a0 } else { b0 };
        let hi = if a1 < b1 { a1 } else { b1 };
        return match lo.cmp(&hi) {
            Ordering::Greater => SegmentIntersection::None,
            Ordering::Less => SegmentIntersection::Overlap,
            Ordering::Equal => {
                // Touching at exactly one shared endpoint.
                let pt = [p, q, r, s]
                    .into_iter()
                    .find(|pt| key(pt) == lo)
                    .expect("touch point is an endpoint");
                SegmentIntersection::Point(pt.clone())
            }
        };
    }

    let sign = |v: &Scalar| {
        if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        }
    };
    let (o1, o2, o3, o4) = (sign(&d1), sign(&d2), sign(&d3), sign(&d4));
    if o1 * o2 > 0 || o3 * o4 > 0 {
        return SegmentIntersection::None;
    }
    // Proper or touching intersection at a single point.
    if o1 == 0 {
        return SegmentIntersection::Point(r.clone());
    }
    if o2 == 0 {
        return SegmentIntersection::Point(s.clone());
    }
    if o3 == 0 {
        return SegmentIntersection::Point(p.clone());
    }
    if o4 == 0 {
        return SegmentIntersection::Point(q.clone());
    }
    let t = &d3 / (&d3 - &d4);
    let x = &p.x + (&q.x - &p.x) * &t;
    let y = &p.y + (&q.y - &p.y) * &t;
    SegmentIntersection::Point(Point::new(x, y))
}

fn minmax(a: Scalar, b: Scalar) -> (Scalar, Scalar) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// A convex polygon with counterclockwise vertices starting at the
/// lexicographically smallest vertex. One vertex is a point, two vertices are a
/// segment; otherwise no three consecutive vertices are collinear.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn is_segment(&self) -> bool {
        self.vertices.len() == 2
    }

    /// True for hulls with nonzero area.
    pub fn is_proper(&self) -> bool {
        self.vertices.len() >= 3
    }

    /// Boundary pieces as closed segments. A point hull yields one zero-length
    /// segment, a segment hull yields itself.
    pub fn boundary_segments(&self) -> Vec<Segment> {
        let n = self.vertices.len();
        match n {
            0 => Vec::new(),
            1 => vec![Segment::new(
                self.vertices[0].clone(),
                self.vertices[0].clone(),
            )],
            2 => vec![Segment::new(
                self.vertices[0].clone(),
                self.vertices[1].clone(),
            )],
            _ => (0..n)
                .map(|i| Segment::new(self.vertices[i].clone(), self.vertices[(i + 1) % n].clone()))
                .collect(),
        }
    }

    pub fn contains(&self, p: &Point, mode: Containment) -> bool {
        point_in_hull(p, self, mode)
    }

    /// Twice the area (zero for degenerate hulls).
    pub fn double_area(&self) -> Scalar {
        let n = self.vertices.len();
        if n < 3 {
            return Scalar::zero();
        }
        let o = &self.vertices[0];
        (1..n - 1)
            .map(|i| cross(o, &self.vertices[i], &self.vertices[i + 1]))
            .fold(Scalar::zero(), |acc, v| acc + v)
    }

    /// A point in the relative interior (the vertex for points, the midpoint for
    /// segments, the centroid of the first three vertices otherwise).
    pub fn interior_point(&self) -> Point {
        match self.vertices.len() {
            1 => self.vertices[0].clone(),
            2 => self.vertices[0].midpoint(&self.vertices[1]),
            _ => {
                let three = int(3);
                let (a, b, c) = (&self.vertices[0], &self.vertices[1], &self.vertices[2]);
                Point::new((&a.x + &b.x + &c.x) / &three, (&a.y + &b.y + &c.y) / &three)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    /// Boundary included.
    Closed,
    /// Interior only.
    Open,
}

/// Monotone-chain convex hull.
pub fn convex_hull(points: &[Point]) -> Result<ConvexPolygon, GeomError> {
    if points.is_empty() {
        return Err(GeomError::EmptyPointSet);
    }
    let mut pts: Vec<&Point> = points.iter().collect();
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts.dedup();
    if pts.len() <= 2 {
        return Ok(ConvexPolygon {
            vertices: pts.into_iter().cloned().collect(),
        });
    }

    let mut lower: Vec<&Point> = Vec::with_capacity(pts.len());
    for p in &pts {
        while lower.len() >= 2
            && !cross(lower[lower.len() - 2], lower[lower.len() - 1], p).is_positive()
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<&Point> = Vec::with_capacity(pts.len());
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && !cross(upper[upper.len() - 2], upper[upper.len() - 1], p).is_positive()
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    // All collinear: the chains collapse to the two extremes.
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.pop();
    }
    Ok(ConvexPolygon {
        vertices: lower.into_iter().cloned().collect(),
    })
}

pub fn point_in_hull(p: &Point, h: &ConvexPolygon, mode: Containment) -> bool {
    let v = &h.vertices;
    match v.len() {
        0 => false,
        1 => mode == Containment::Closed && *p == v[0],
        2 => mode == Containment::Closed && on_segment(p, &v[0], &v[1]),
        n => {
            for i in 0..n {
                let c = cross(&v[i], &v[(i + 1) % n], p);
                if c.is_negative() {
                    return false;
                }
                if c.is_zero() && mode == Containment::Open {
                    return false;
                }
            }
            true
        }
    }
}

/// Whether the closed sets `a` and `b` share a point.
pub fn hulls_intersect(a: &ConvexPolygon, b: &ConvexPolygon) -> bool {
    if a.is_empty() || b.is_empty() {
        return false;
    }
    if a.vertices
        .iter()
        .any(|p| point_in_hull(p, b, Containment::Closed))
        || b.vertices
            .iter()
            .any(|p| point_in_hull(p, a, Containment::Closed))
    {
        return true;
    }
    let sa = a.boundary_segments();
    let sb = b.boundary_segments();
    sa.iter().any(|s| {
        sb.iter()
            .any(|t| segment_intersection(s, t) != SegmentIntersection::None)
    })
}

/// Number of points in the intersection of the two boundaries. The boundary of
/// a segment is the segment, the boundary of a point is the point.
pub fn boundary_intersection_count(
    a: &ConvexPolygon,
    b: &ConvexPolygon,
) -> Result<usize, GeomError> {
    let mut found: Vec<Point> = Vec::new();
    for s in a.boundary_segments() {
        for t in b.boundary_segments() {
            match segment_intersection(&s, &t) {
                SegmentIntersection::None => {}
                SegmentIntersection::Overlap => return Err(GeomError::NonGenericOverlap),
                SegmentIntersection::Point(p) => {
                    if !found.contains(&p) {
                        found.push(p);
                    }
                }
            }
        }
    }
    Ok(found.len())
}
