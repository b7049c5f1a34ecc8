//! Exact planar geometry on the bin grid.
//!
//! All coordinates are rationals. Grid cell corners are integers; only the
//! CoG extremes and the vertices produced by [`clip_rect`] carry a fractional
//! part. Every predicate is evaluated without rounding, so a stability verdict
//! can never flip on floating-point noise.
//!
//! A grid cell `(x, y)` stands for the unit square `[x, x+1] x [y, y+1]`.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_rational::Rational64;
use num_traits::{Signed, Zero};

/// Exact scalar used for every planar coordinate.
pub type Scalar = Rational64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point2 {
    pub x: Scalar,
    pub y: Scalar,
}

impl Point2 {
    pub const fn new(x: Scalar, y: Scalar) -> Self {
        Self { x, y }
    }

    /// A lattice point.
    pub fn int(x: i64, y: i64) -> Self {
        Self::new(Scalar::from_integer(x), Scalar::from_integer(y))
    }

    /// `(x_num / den, y_num / den)`.
    pub fn ratio(x_num: i64, y_num: i64, den: i64) -> Self {
        Self::new(Scalar::new(x_num, den), Scalar::new(y_num, den))
    }

    fn sub(self, o: Point2) -> (Scalar, Scalar) {
        (self.x - o.x, self.y - o.y)
    }
}

impl fmt::Debug for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Twice the signed area of the triangle `o, a, b`; positive when counter-clockwise.
pub fn cross(o: Point2, a: Point2, b: Point2) -> Scalar {
    let (ax, ay) = a.sub(o);
    let (bx, by) = b.sub(o);
    ax * by - ay * bx
}

/// Axis-aligned rectangle in grid cells: lower corner `(x, y)`, extents `w x d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rect2 {
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub d: i64,
}

impl Rect2 {
    pub const fn new(x: i64, y: i64, w: i64, d: i64) -> Self {
        Self { x, y, w, d }
    }

    pub fn x_max(&self) -> i64 {
        self.x + self.w
    }

    pub fn y_max(&self) -> i64 {
        self.y + self.d
    }

    pub fn area(&self) -> i64 {
        self.w * self.d
    }

    /// Counter-clockwise corners, starting at the lower-left one.
    pub fn corners(&self) -> [Point2; 4] {
        [
            Point2::int(self.x, self.y),
            Point2::int(self.x_max(), self.y),
            Point2::int(self.x_max(), self.y_max()),
            Point2::int(self.x, self.y_max()),
        ]
    }

    pub fn contains_point(&self, p: Point2) -> bool {
        p.x >= Scalar::from_integer(self.x)
            && p.x <= Scalar::from_integer(self.x_max())
            && p.y >= Scalar::from_integer(self.y)
            && p.y <= Scalar::from_integer(self.y_max())
    }

    /// Positive-area overlap with `other`.
    pub fn overlaps(&self, other: &Rect2) -> bool {
        self.x < other.x_max()
            && other.x < self.x_max()
            && self.y < other.y_max()
            && other.y < self.y_max()
    }

    pub fn intersection(&self, other: &Rect2) -> Option<Rect2> {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = self.x_max().min(other.x_max());
        let y1 = self.y_max().min(other.y_max());
        (x0 < x1 && y0 < y1).then(|| Rect2::new(x0, y0, x1 - x0, y1 - y0))
    }

    /// Cells covered by the rectangle, row by row.
    pub fn cells(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (self.y..self.y_max()).flat_map(move |y| (self.x..self.x_max()).map(move |x| (x, y)))
    }
}

/// Convex polygon with counter-clockwise vertices and no three collinear.
///
/// Empty, single-point and segment polygons are legal values. The vertex list
/// is canonical (it starts at the lexicographically smallest vertex), so two
/// polygons covering the same region compare equal.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ConvexPolygon2D {
    vertices: Vec<Point2>,
}

impl fmt::Debug for ConvexPolygon2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.vertices.iter()).finish()
    }
}

impl ConvexPolygon2D {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_rect(r: &Rect2) -> Self {
        Self {
            vertices: r.corners().to_vec(),
        }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Fewer than three vertices.
    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    /// Enclosed area (zero for degenerate polygons).
    pub fn area(&self) -> Scalar {
        let n = self.vertices.len();
        if n < 3 {
            return Scalar::zero();
        }
        let mut twice = Scalar::zero();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            twice += a.x * b.y - b.x * a.y;
        }
        twice / 2
    }

    pub fn contains_point(&self, p: Point2) -> bool {
        contains_point(self, p)
    }

    /// Whether the whole unit square of grid cell `(x, y)` lies in the polygon.
    pub fn contains_cell(&self, x: i64, y: i64) -> bool {
        if self.vertices.len() < 3 {
            return false;
        }
        if let Some(v) = self.lattice_vertices() {
            let n = v.len();
            return [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)].iter().all(|&(px, py)| {
                (0..n).all(|i| {
                    let (o, a) = (v[i], v[(i + 1) % n]);
                    (a.0 - o.0) * (py - o.1) - (a.1 - o.1) * (px - o.0) >= 0
                })
            });
        }
        Rect2::new(x, y, 1, 1)
            .corners()
            .iter()
            .all(|&c| contains_point(self, c))
    }

    fn lattice_vertices(&self) -> Option<Vec<(i64, i64)>> {
        self.vertices
            .iter()
            .map(|p| (p.x.is_integer() && p.y.is_integer()).then(|| (*p.x.numer(), *p.y.numer())))
            .collect()
    }

    /// Every vertex of `other` lies in `self` (hence, by convexity, all of `other`).
    pub fn contains_polygon(&self, other: &ConvexPolygon2D) -> bool {
        contains_region(self, other.vertices.iter().copied())
    }
}

/// Minimal convex polygon containing all `points`.
pub fn convex_hull<I: IntoIterator<Item = Point2>>(points: I) -> ConvexPolygon2D {
    let mut pts: Vec<Point2> = points.into_iter().collect();
    pts.sort_unstable();
    pts.dedup();
    ConvexPolygon2D {
        vertices: monotone_chain(&pts, |o, a, b| cross(o, a, b).is_positive()),
    }
}

/// [`convex_hull`] over lattice points, computed in machine integers.
pub fn lattice_hull(points: &mut Vec<(i64, i64)>) -> ConvexPolygon2D {
    points.sort_unstable();
    points.dedup();
    let turn = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0) > 0
    };
    let hull = monotone_chain(points, turn);
    ConvexPolygon2D {
        vertices: hull.into_iter().map(|(x, y)| Point2::int(x, y)).collect(),
    }
}

/// Andrew's monotone chain over sorted, deduplicated input. `left_turn` must be
/// strict so collinear points are dropped.
fn monotone_chain<P: Copy>(pts: &[P], left_turn: impl Fn(P, P, P) -> bool) -> Vec<P> {
    if pts.len() <= 2 {
        return pts.to_vec();
    }
    let mut hull: Vec<P> = Vec::with_capacity(pts.len() + 1);
    for &p in pts {
        while hull.len() >= 2 && !left_turn(hull[hull.len() - 2], hull[hull.len() - 1], p) {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && !left_turn(hull[hull.len() - 2], hull[hull.len() - 1], p) {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    // all input collinear: the chain collapses to the two endpoints
    if hull.len() == 2 && pts.len() > 2 {
        return alloc::vec![pts[0], pts[pts.len() - 1]];
    }
    hull
}

/// Sign of [`cross`]. Lattice `o` and `a` (every hull edge built from grid
/// corners) are handled in 128-bit integers; anything else goes through the
/// rational path.
fn cross_sign(o: Point2, a: Point2, b: Point2) -> Ordering {
    let int = |s: Scalar| s.is_integer().then(|| i128::from(*s.numer()));
    if let (Some(ox), Some(oy), Some(ax), Some(ay)) = (int(o.x), int(o.y), int(a.x), int(a.y)) {
        let (bxn, bxd) = (i128::from(*b.x.numer()), i128::from(*b.x.denom()));
        let (byn, byd) = (i128::from(*b.y.numer()), i128::from(*b.y.denom()));
        // cross scaled by the positive factor bxd * byd
        let v = (ax - ox) * (byn * bxd - oy * bxd * byd) - (ay - oy) * (bxn * byd - ox * bxd * byd);
        return v.cmp(&0);
    }
    let c = cross(o, a, b);
    if c.is_positive() {
        Ordering::Greater
    } else if c.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// Boundary-inclusive point containment.
pub fn contains_point(poly: &ConvexPolygon2D, p: Point2) -> bool {
    let v = &poly.vertices;
    match v.len() {
        0 => false,
        1 => v[0] == p,
        2 => on_segment(v[0], v[1], p),
        n => (0..n).all(|i| cross_sign(v[i], v[(i + 1) % n], p) != Ordering::Less),
    }
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    if !cross(a, b, p).is_zero() {
        return false;
    }
    let within = |lo: Scalar, hi: Scalar, t: Scalar| {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        lo <= t && t <= hi
    };
    within(a.x, b.x, p.x) && within(a.y, b.y, p.y)
}

/// True iff every point satisfies [`contains_point`]; vacuously true when empty.
pub fn contains_region<I: IntoIterator<Item = Point2>>(poly: &ConvexPolygon2D, pts: I) -> bool {
    pts.into_iter().all(|p| contains_point(poly, p))
}

#[derive(Clone, Copy)]
enum Side {
    Left(Scalar),
    Right(Scalar),
    Bottom(Scalar),
    Top(Scalar),
}

impl Side {
    fn inside(&self, p: Point2) -> bool {
        match *self {
            Side::Left(v) => p.x >= v,
            Side::Right(v) => p.x <= v,
            Side::Bottom(v) => p.y >= v,
            Side::Top(v) => p.y <= v,
        }
    }

    /// Intersection of segment `a-b` with this side's supporting line.
    fn cut(&self, a: Point2, b: Point2) -> Point2 {
        match *self {
            Side::Left(v) | Side::Right(v) => {
                let t = (v - a.x) / (b.x - a.x);
                Point2::new(v, a.y + t * (b.y - a.y))
            }
            Side::Bottom(v) | Side::Top(v) => {
                let t = (v - a.y) / (b.y - a.y);
                Point2::new(a.x + t * (b.x - a.x), v)
            }
        }
    }
}

/// Intersection of `poly` with the closed rectangle `r` (Sutherland-Hodgman).
pub fn clip_rect(poly: &ConvexPolygon2D, r: &Rect2) -> ConvexPolygon2D {
    let sides = [
        Side::Left(Scalar::from_integer(r.x)),
        Side::Right(Scalar::from_integer(r.x_max())),
        Side::Bottom(Scalar::from_integer(r.y)),
        Side::Top(Scalar::from_integer(r.y_max())),
    ];
    let mut pts = poly.vertices.clone();
    for side in sides {
        if pts.is_empty() {
            break;
        }
        if pts.len() == 1 {
            if !side.inside(pts[0]) {
                pts.clear();
            }
            continue;
        }
        let input = core::mem::take(&mut pts);
        let n = input.len();
        for i in 0..n {
            let cur = input[i];
            let prev = input[(i + n - 1) % n];
            match (side.inside(prev), side.inside(cur)) {
                (true, true) => pts.push(cur),
                (true, false) => pts.push(side.cut(prev, cur)),
                (false, true) => {
                    pts.push(side.cut(prev, cur));
                    pts.push(cur);
                }
                (false, false) => {}
            }
        }
    }
    convex_hull(pts)
}
