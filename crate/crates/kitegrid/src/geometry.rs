//! Exact planar geometry over Q(sqrt 3).
//!
//! Polygons are simple, counterclockwise, and every predicate (orientation,
//! point location, intersection) is decided by exact sign computations.

use crate::scalar::QS3;
use std::fmt;
use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: QS3,
    pub y: QS3,
}

impl Point {
    pub fn new(x: QS3, y: QS3) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(QS3::from_int(x), QS3::from_int(y))
    }

    pub fn origin() -> Self {
        Point::from_ints(0, 0)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.x, self.y)
    }
}

/// Orientation of the triangle `p q r`: 1 counterclockwise, -1 clockwise,
/// 0 collinear.
pub fn orient(p: &Point, q: &Point, r: &Point) -> i32 {
    let cross = (&q.x - &p.x) * (&r.y - &p.y) - (&q.y - &p.y) * (&r.x - &p.x);
    cross.sign()
}

/// Does `p` lie on the closed segment `a b`?
pub fn on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    if orient(a, b, p) != 0 {
        return false;
    }
    let in_range = |v: &QS3, e1: &QS3, e2: &QS3| {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        lo <= v && v <= hi
    };
    in_range(&p.x, &a.x, &b.x) && in_range(&p.y, &a.y, &b.y)
}

/// Do the closed segments `a b` and `c d` share any point?
pub fn segments_intersect(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 {
        return true;
    }
    on_segment(c, a, b) || on_segment(d, a, b) || on_segment(a, c, d) || on_segment(b, c, d)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolygonError {
    #[error("polygon needs at least 3 vertices")]
    TooFewVertices,
    #[error("repeated consecutive vertex at index {0}")]
    RepeatedVertex(usize),
    #[error("polygon edges cross (edges {0} and {1})")]
    NotSimple(usize, usize),
    #[error("polygon has zero area")]
    ZeroArea,
    #[error("polygon is clockwise")]
    Clockwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointLocation {
    Inside,
    Boundary,
    Outside,
}

/// Simple counterclockwise polygon.
#[derive(Clone, PartialEq, Eq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// Validates simplicity and counterclockwise orientation.
    pub fn new(vertices: Vec<Point>) -> Result<Self, PolygonError> {
        let n = vertices.len();
        if n < 3 {
            return Err(PolygonError::TooFewVertices);
        }
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(PolygonError::RepeatedVertex(i));
            }
        }
        let p = Polygon { vertices };
        p.check_simple()?;
        match p.signed_area2().sign() {
            0 => Err(PolygonError::ZeroArea),
            s if s < 0 => Err(PolygonError::Clockwise),
            _ => Ok(p),
        }
    }

    /// Like `new` but reverses clockwise input instead of rejecting it.
    pub fn new_ccw(mut vertices: Vec<Point>) -> Result<Self, PolygonError> {
        let p = Polygon {
            vertices: vertices.clone(),
        };
        if p.vertices.len() >= 3 && p.signed_area2().sign() < 0 {
            vertices.reverse();
        }
        Polygon::new(vertices)
    }

    fn check_simple(&self) -> Result<(), PolygonError> {
        let v = &self.vertices;
        let n = v.len();
        for i in 0..n {
            let (a1, a2) = (&v[i], &v[(i + 1) % n]);
            for j in (i + 1)..n {
                let (b1, b2) = (&v[j], &v[(j + 1) % n]);
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // consecutive edges share one endpoint; any further
                    // contact means a spike or fold. free_i / free_j are
                    // the endpoints away from the shared vertex.
                    let (free_i, free_j) = if j == i + 1 { (a1, b2) } else { (a2, b1) };
                    if on_segment(free_i, b1, b2) || on_segment(free_j, a1, a2) {
                        return Err(PolygonError::NotSimple(i, j));
                    }
                } else if segments_intersect(a1, a2, b1, b2) {
                    return Err(PolygonError::NotSimple(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Point, &Point)> {
        let n = self.vertices.len();
        (0..n).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
    }

    /// Twice the signed area (shoelace).
    pub fn signed_area2(&self) -> QS3 {
        let mut acc = QS3::zero();
        let n = self.vertices.len();
        for i in 0..n {
            let p = &self.vertices[i];
            let q = &self.vertices[(i + 1) % n];
            acc = acc + (&p.x * &q.y - &q.x * &p.y);
        }
        acc
    }

    pub fn area(&self) -> QS3 {
        self.signed_area2() / QS3::from_int(2)
    }

    /// Exact point location; points on edges or vertices always classify
    /// as `Boundary`.
    pub fn locate_point(&self, p: &Point) -> PointLocation {
        for (a, b) in self.edges() {
            if on_segment(p, a, b) {
                return PointLocation::Boundary;
            }
        }
        // crossing number with a ray in +x, half-open in y to step
        // cleanly past vertices
        let mut inside = false;
        for (a, b) in self.edges() {
            let ay = (&a.y - &p.y).sign() > 0;
            let by = (&b.y - &p.y).sign() > 0;
            if ay != by {
                let t_num = &p.y - &a.y;
                let t_den = &b.y - &a.y;
                let ix = &a.x + (&b.x - &a.x) * (t_num / t_den);
                if (&ix - &p.x).sign() > 0 {
                    inside = !inside;
                }
            }
        }
        if inside {
            PointLocation::Inside
        } else {
            PointLocation::Outside
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.locate_point(p) != PointLocation::Outside
    }

    /// Image under the homothety `p -> center + lambda (p - center)`.
    /// Requires `lambda > 0` so orientation and simplicity are preserved.
    pub fn scale_about(&self, center: &Point, lambda: &QS3) -> Polygon {
        debug_assert!(lambda.sign() > 0);
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                Point::new(
                    &center.x + lambda * (&v.x - &center.x),
                    &center.y + lambda * (&v.y - &center.y),
                )
            })
            .collect();
        Polygon { vertices }
    }

    /// Arithmetic centroid of the vertex set (a convenient interior point
    /// for convex cells; not the area centroid).
    pub fn vertex_mean(&self) -> Point {
        let n = QS3::from_int(self.vertices.len() as i64);
        let mut x = QS3::zero();
        let mut y = QS3::zero();
        for v in &self.vertices {
            x = x + &v.x;
            y = y + &v.y;
        }
        Point::new(x / &n, y / &n)
    }
}

impl fmt::Debug for Polygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.vertices.iter()).finish()
    }
}

/// Twice the signed shoelace area of a vertex ring. Tolerates repeated
/// consecutive vertices and rings with fewer than 3 points.
pub fn ring_area2(ring: &[Point]) -> QS3 {
    let mut acc = QS3::zero();
    let n = ring.len();
    for i in 0..n {
        let p = &ring[i];
        let q = &ring[(i + 1) % n];
        acc = acc + (&p.x * &q.y - &q.x * &p.y);
    }
    acc
}

// Sutherland-Hodgman step: keep the part of the ring on the closed left
// side of the directed line `a b`. Crossing points are exact; a vertex on
// the line counts as inside, so the division below never sees a zero
// denominator.
fn halfplane_clip(ring: &[Point], a: &Point, b: &Point) -> Vec<Point> {
    let d = |p: &Point| (&b.x - &a.x) * (&p.y - &a.y) - (&b.y - &a.y) * (&p.x - &a.x);
    let n = ring.len();
    let mut out = Vec::new();
    for i in 0..n {
        let p = &ring[i];
        let q = &ring[(i + 1) % n];
        let dp = d(p);
        let dq = d(q);
        let p_in = dp.sign() >= 0;
        let q_in = dq.sign() >= 0;
        if p_in {
            out.push(p.clone());
        }
        if p_in != q_in {
            let t = &dp / (&dp - &dq);
            out.push(Point::new(
                &p.x + (&q.x - &p.x) * &t,
                &p.y + (&q.y - &p.y) * &t,
            ));
        }
    }
    out
}

/// Twice the area of `subject` intersected with the convex polygon `clip`.
/// `subject` may be any simple polygon; a clockwise subject yields the
/// negated value, so hole loops subtract correctly.
pub fn clip_area2(subject: &Polygon, clip: &Polygon) -> QS3 {
    let mut ring: Vec<Point> = subject.vertices.clone();
    let cw = clip.signed_area2().sign() < 0;
    let vs = clip.vertices();
    let n = vs.len();
    for i in 0..n {
        let (a, b) = if cw {
            (&vs[(i + 1) % n], &vs[i])
        } else {
            (&vs[i], &vs[(i + 1) % n])
        };
        ring = halfplane_clip(&ring, a, b);
        if ring.len() < 3 {
            return QS3::zero();
        }
    }
    ring_area2(&ring)
}

/// Direct isometry data: `p -> M p + t` with `M` orthogonal over Q(sqrt 3).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Isometry {
    pub m00: QS3,
    pub m01: QS3,
    pub m10: QS3,
    pub m11: QS3,
    pub tx: QS3,
    pub ty: QS3,
}

impl Isometry {
    pub fn identity() -> Self {
        Isometry {
            m00: QS3::one(),
            m01: QS3::zero(),
            m10: QS3::zero(),
            m11: QS3::one(),
            tx: QS3::zero(),
            ty: QS3::zero(),
        }
    }

    pub fn translation(tx: QS3, ty: QS3) -> Self {
        Isometry {
            tx,
            ty,
            ..Isometry::identity()
        }
    }

    /// Rotation by `k * 60` degrees counterclockwise about the origin.
    pub fn rotation60(k: i32) -> Self {
        let k = k.rem_euclid(6);
        let half = QS3::from_ratio(1, 2);
        let hs3 = QS3::from_parts(0, 1, 1, 2);
        let (c, s) = match k {
            0 => (QS3::one(), QS3::zero()),
            1 => (half.clone(), hs3.clone()),
            2 => (-&half, hs3.clone()),
            3 => (-QS3::one(), QS3::zero()),
            4 => (-&half, -&hs3),
            _ => (half.clone(), -&hs3),
        };
        Isometry {
            m00: c.clone(),
            m01: -&s,
            m10: s,
            m11: c,
            tx: QS3::zero(),
            ty: QS3::zero(),
        }
    }

    /// Rotation by `k * 60` degrees about `center`.
    pub fn rotation60_about(k: i32, center: &Point) -> Self {
        let t_in = Isometry::translation(-&center.x, -&center.y);
        let r = Isometry::rotation60(k);
        let t_out = Isometry::translation(center.x.clone(), center.y.clone());
        t_out.compose(&r).compose(&t_in)
    }

    /// Reflection across the x axis.
    pub fn mirror_x() -> Self {
        Isometry {
            m11: -QS3::one(),
            ..Isometry::identity()
        }
    }

    pub fn det(&self) -> QS3 {
        &self.m00 * &self.m11 - &self.m01 * &self.m10
    }

    pub fn apply(&self, p: &Point) -> Point {
        Point::new(
            &self.m00 * &p.x + &self.m01 * &p.y + &self.tx,
            &self.m10 * &p.x + &self.m11 * &p.y + &self.ty,
        )
    }

    pub fn apply_polygon(&self, poly: &Polygon) -> Polygon {
        let pts: Vec<Point> = poly.vertices().iter().map(|p| self.apply(p)).collect();
        Polygon::new_ccw(pts).expect("isometries preserve simple polygons")
    }

    /// `self` after `other`: `(self.compose(other))(p) = self(other(p))`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            m00: &self.m00 * &other.m00 + &self.m01 * &other.m10,
            m01: &self.m00 * &other.m01 + &self.m01 * &other.m11,
            m10: &self.m10 * &other.m00 + &self.m11 * &other.m10,
            m11: &self.m10 * &other.m01 + &self.m11 * &other.m11,
            tx: &self.m00 * &other.tx + &self.m01 * &other.ty + &self.tx,
            ty: &self.m10 * &other.tx + &self.m11 * &other.ty + &self.ty,
        }
    }

    pub fn inverse(&self) -> Isometry {
        // orthogonal linear part: inverse is the transpose over det
        let d = self.det();
        let m00 = &self.m11 / &d;
        let m01 = -&self.m01 / &d;
        let m10 = -&self.m10 / &d;
        let m11 = &self.m00 / &d;
        let tx = -(&m00 * &self.tx + &m01 * &self.ty);
        let ty = -(&m10 * &self.tx + &m11 * &self.ty);
        Isometry {
            m00,
            m01,
            m10,
            m11,
            tx,
            ty,
        }
    }
}

impl fmt::Debug for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:?} {:?}; {:?} {:?}] + ({:?}, {:?})",
            self.m00, self.m01, self.m10, self.m11, self.tx, self.ty
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    #[test]
    fn clip_of_overlapping_squares_is_exact() {
        let a = Polygon::new(vec![pt(0, 0), pt(2, 0), pt(2, 2), pt(0, 2)]).unwrap();
        let b = Polygon::new(vec![pt(1, 1), pt(3, 1), pt(3, 3), pt(1, 3)]).unwrap();
        assert_eq!(clip_area2(&a, &b), QS3::from_int(2));
        assert_eq!(clip_area2(&b, &a), QS3::from_int(2));
        // disjoint and shared-edge cases give zero
        let c = Polygon::new(vec![pt(2, 0), pt(4, 0), pt(4, 2), pt(2, 2)]).unwrap();
        assert_eq!(clip_area2(&a, &c), QS3::zero());
        let d = Polygon::new(vec![pt(5, 5), pt(6, 5), pt(6, 6)]).unwrap();
        assert_eq!(clip_area2(&a, &d), QS3::zero());
    }

    #[test]
    fn clip_against_contained_and_containing() {
        let outer = Polygon::new(vec![pt(0, 0), pt(4, 0), pt(4, 4), pt(0, 4)]).unwrap();
        let inner = Polygon::new(vec![pt(1, 1), pt(2, 1), pt(2, 2), pt(1, 2)]).unwrap();
        assert_eq!(clip_area2(&inner, &outer), inner.signed_area2());
        assert_eq!(clip_area2(&outer, &inner), inner.signed_area2());
    }

    #[test]
    fn nonconvex_subject_clips_by_area() {
        // L-shape of area 3, clipped by a square catching a 2x2 corner
        // that the notch bites one unit out of
        let ell = Polygon::new(vec![
            pt(0, 0),
            pt(2, 0),
            pt(2, 1),
            pt(1, 1),
            pt(1, 2),
            pt(0, 2),
        ])
        .unwrap();
        let clip = Polygon::new(vec![pt(0, 0), pt(2, 0), pt(2, 2), pt(0, 2)]).unwrap();
        assert_eq!(clip_area2(&ell, &clip), QS3::from_int(6));
    }

    #[test]
    fn scale_about_scales_area_quadratically() {
        let tri = Polygon::new(vec![pt(0, 0), pt(2, 0), pt(0, 2)]).unwrap();
        let lam = QS3::from_ratio(5, 2);
        let scaled = tri.scale_about(&pt(1, 1), &lam);
        assert_eq!(scaled.signed_area2(), &(&lam * &lam) * &tri.signed_area2());
        // center stays put under the homothety
        let fixed = tri.scale_about(&pt(0, 0), &lam);
        assert_eq!(fixed.vertices()[0], pt(0, 0));
    }

    #[test]
    fn rotation60_moves_unit_points_exactly() {
        let r = Isometry::rotation60(1);
        let p = r.apply(&pt(2, 0));
        assert_eq!(p.x, QS3::one());
        assert_eq!(p.y, QS3::sqrt3());
        let r6 = Isometry::rotation60(6);
        assert_eq!(r6, Isometry::identity());
    }

    #[test]
    fn rotation_about_point_fixes_center() {
        let c = Point::new(QS3::from_int(2), QS3::zero());
        let r = Isometry::rotation60_about(2, &c);
        assert_eq!(r.apply(&c), c);
        // order 3
        let r3 = r.compose(&r).compose(&r);
        assert_eq!(r3, Isometry::identity());
    }

    #[test]
    fn compose_and_inverse_are_exact() {
        let a = Isometry::rotation60_about(1, &pt(1, 2));
        let b = Isometry::mirror_x();
        let c = a.compose(&b);
        let p = Point::new(QS3::from_ratio(7, 3), QS3::sqrt3());
        assert_eq!(c.apply(&p), a.apply(&b.apply(&p)));
        assert_eq!(c.compose(&c.inverse()), Isometry::identity());
        assert_eq!(c.inverse().compose(&c), Isometry::identity());
    }

    #[test]
    fn mirror_has_negative_det() {
        assert_eq!(Isometry::mirror_x().det(), -QS3::one());
        assert_eq!(Isometry::rotation60(2).det(), QS3::one());
    }

    #[test]
    fn polygon_validation_rejects_bad_input() {
        assert_eq!(
            Polygon::new(vec![pt(0, 0), pt(1, 0)]).unwrap_err(),
            PolygonError::TooFewVertices
        );
        assert_eq!(
            Polygon::new(vec![pt(0, 0), pt(0, 0), pt(1, 1)]).unwrap_err(),
            PolygonError::RepeatedVertex(0)
        );
        // bowtie
        assert!(matches!(
            Polygon::new(vec![pt(0, 0), pt(2, 2), pt(2, 0), pt(0, 2)]),
            Err(PolygonError::NotSimple(_, _))
        ));
        // clockwise triangle
        assert_eq!(
            Polygon::new(vec![pt(0, 0), pt(0, 2), pt(2, 0)]).unwrap_err(),
            PolygonError::Clockwise
        );
        assert!(Polygon::new_ccw(vec![pt(0, 0), pt(0, 2), pt(2, 0)]).is_ok());
    }

    #[test]
    fn shoelace_area_of_unit_square() {
        let sq = Polygon::new(vec![pt(0, 0), pt(3, 0), pt(3, 3), pt(0, 3)]).unwrap();
        assert_eq!(sq.area(), QS3::from_int(9));
    }

    #[test]
    fn point_location_classifies_boundary() {
        let tri = Polygon::new(vec![pt(0, 0), pt(4, 0), pt(0, 4)]).unwrap();
        assert_eq!(tri.locate_point(&pt(1, 1)), PointLocation::Inside);
        assert_eq!(tri.locate_point(&pt(2, 0)), PointLocation::Boundary);
        assert_eq!(tri.locate_point(&pt(0, 0)), PointLocation::Boundary);
        assert_eq!(tri.locate_point(&pt(2, 2)), PointLocation::Boundary);
        assert_eq!(tri.locate_point(&pt(3, 3)), PointLocation::Outside);
        assert_eq!(tri.locate_point(&pt(-1, 1)), PointLocation::Outside);
        // ray through a vertex must not double count
        let dia = Polygon::new(vec![pt(2, 0), pt(4, 2), pt(2, 4), pt(0, 2)]).unwrap();
        assert_eq!(dia.locate_point(&pt(1, 2)), PointLocation::Inside);
    }
}
