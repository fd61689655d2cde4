//! The kite grid and its half-kite refinement, indexed by group elements.
//!
//! The base kite has tail `(0,0)`, head `(2,0)` and wing tips
//! `(3/2, +-sqrt(3)/2)`. The base semikite is its lower half, the triangle
//! tail, lower tip, head: the one whose three sides lie on the mirror axes
//! of alpha, beta and gamma. Kites are in bijection with the orientation
//! preserving subgroup via `g -> g * base_kite`; semikites are in bijection
//! with the full group. `grp` and `geo` convert between grid-aligned
//! polygons and the cell sets that realize them, both directions exact.

use crate::geometry::{on_segment, orient, Point, PointLocation, Polygon};
use crate::group::{Symmetry, BETA};
use crate::scalar::QS3;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Kite,
    Semikite,
}

impl CellKind {
    pub fn area(&self) -> QS3 {
        match self {
            CellKind::Kite => QS3::sqrt3(),
            CellKind::Semikite => QS3::from_parts(0, 1, 1, 2),
        }
    }
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellKind::Kite => write!(f, "kite"),
            CellKind::Semikite => write!(f, "semikite"),
        }
    }
}

/// Vertices of the base cell, counterclockwise.
pub fn base_polygon(kind: CellKind) -> Polygon {
    let tail = Point::origin();
    let head = Point::from_ints(2, 0);
    let tip_up = Point::new(QS3::from_ratio(3, 2), QS3::from_parts(0, 1, 1, 2));
    let tip_down = Point::new(QS3::from_ratio(3, 2), QS3::from_parts(0, 1, -1, 2));
    match kind {
        CellKind::Kite => Polygon::new(vec![tail, tip_down, head, tip_up]).unwrap(),
        CellKind::Semikite => Polygon::new(vec![tail, tip_down, head]).unwrap(),
    }
}

/// One cell of the grid. For kites the symmetry is normalized into the
/// orientation preserving subgroup (the base kite is mirror symmetric, so
/// `g` and `g * beta` name the same kite).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub sym: Symmetry,
    pub kind: CellKind,
}

impl Cell {
    pub fn new(sym: Symmetry, kind: CellKind) -> Cell {
        let sym = match kind {
            CellKind::Kite if sym.flip => sym.mul(&BETA),
            _ => sym,
        };
        Cell { sym, kind }
    }

    pub fn polygon(&self) -> Polygon {
        let iso = self.sym.to_isometry();
        iso.apply_polygon(&base_polygon(self.kind))
    }

    /// A canonical interior point (the vertex mean, exact).
    pub fn sample_point(&self) -> Point {
        self.sym.to_isometry().apply(&base_polygon(self.kind).vertex_mean())
    }

    /// Left translate; the cell of `g * self`.
    pub fn translate(&self, g: &Symmetry) -> Cell {
        Cell::new(g.mul(&self.sym), self.kind)
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[{}]", self.kind, self.sym)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LocateError {
    #[error("point lies on a grid edge or vertex")]
    BoundaryPoint,
}

/// Floors of the lattice coordinates of `p`; the coarse grid address
/// used to seed candidate enumerations.
pub fn lattice_coords_floor(p: &Point) -> (i64, i64) {
    let (a, b) = lattice_coords(p);
    (a.floor_i64(), b.floor_i64())
}

/// Lattice coordinates of `p` as exact scalars: `p = a*t1 + b*t2`.
fn lattice_coords(p: &Point) -> (QS3, QS3) {
    // x = -3 b, y = -sqrt(3) (2 a + b)
    let b = -&p.x / QS3::from_int(3);
    let y_over_s3 = &p.y * QS3::sqrt3() / QS3::from_int(3);
    let a = (-y_over_s3 - &b) / QS3::from_int(2);
    (a, b)
}

/// The unique cell whose interior contains `p`.
pub fn locate(p: &Point, kind: CellKind) -> Result<Cell, LocateError> {
    let (a, b) = lattice_coords(p);
    let (na, nb) = (a.floor_i64(), b.floor_i64());
    let mut on_boundary = false;
    for tx in (na - 1)..=(na + 2) {
        for ty in (nb - 1)..=(nb + 2) {
            for rot in 0..6u8 {
                let flips: &[bool] = match kind {
                    CellKind::Kite => &[false],
                    CellKind::Semikite => &[false, true],
                };
                for &flip in flips {
                    let cell = Cell::new(Symmetry::new(tx, ty, rot, flip), kind);
                    match cell.polygon().locate_point(p) {
                        PointLocation::Inside => return Ok(cell),
                        PointLocation::Boundary => on_boundary = true,
                        PointLocation::Outside => {}
                    }
                }
            }
        }
    }
    debug_assert!(on_boundary, "candidate window must cover the point");
    Err(LocateError::BoundaryPoint)
}

/// A finite set of cells of one kind, ordered canonically.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridRegion {
    pub kind: CellKind,
    pub cells: BTreeSet<Symmetry>,
}

impl GridRegion {
    pub fn new(kind: CellKind) -> Self {
        GridRegion {
            kind,
            cells: BTreeSet::new(),
        }
    }

    pub fn from_cells(kind: CellKind, cells: impl IntoIterator<Item = Symmetry>) -> Self {
        let cells = cells
            .into_iter()
            .map(|s| Cell::new(s, kind).sym)
            .collect();
        GridRegion { kind, cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, s: &Symmetry) -> bool {
        self.cells.contains(&Cell::new(*s, self.kind).sym)
    }

    pub fn insert(&mut self, s: Symmetry) -> bool {
        self.cells.insert(Cell::new(s, self.kind).sym)
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.iter().map(|s| Cell { sym: *s, kind: self.kind })
    }

    /// Left translate of the whole region.
    pub fn translate(&self, g: &Symmetry) -> GridRegion {
        GridRegion::from_cells(self.kind, self.cells.iter().map(|s| g.mul(s)))
    }

    pub fn area(&self) -> QS3 {
        self.kind.area() * QS3::from_int(self.cells.len() as i64)
    }

    /// All cells whose sample point lies within euclidean distance
    /// `radius` of the origin.
    pub fn ball(kind: CellKind, radius: i64) -> GridRegion {
        let r2 = QS3::from_int(radius * radius);
        let n = radius / 3 + 2;
        let mut cells = BTreeSet::new();
        for tx in -n..=n {
            for ty in -n..=n {
                for rot in 0..6u8 {
                    let flips: &[bool] = match kind {
                        CellKind::Kite => &[false],
                        CellKind::Semikite => &[false, true],
                    };
                    for &flip in flips {
                        let cell = Cell::new(Symmetry::new(tx, ty, rot, flip), kind);
                        let p = cell.sample_point();
                        let d2 = &p.x * &p.x + &p.y * &p.y;
                        if (r2.clone() - d2).sign() >= 0 {
                            cells.insert(cell.sym);
                        }
                    }
                }
            }
        }
        GridRegion { kind, cells }
    }
}

impl fmt::Debug for GridRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GridRegion({:?}, {} cells)", self.kind, self.cells.len())
    }
}

fn bbox_f64(p: &Polygon) -> [f64; 4] {
    let mut bb = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
    for v in p.vertices() {
        let (x, y) = v.to_f64();
        bb[0] = bb[0].min(x);
        bb[1] = bb[1].min(y);
        bb[2] = bb[2].max(x);
        bb[3] = bb[3].max(y);
    }
    bb
}

/// Does the homothety image `center + lambda (supp(source) - center)` lie
/// inside the union of `target`'s cells? Exact: each scaled source cell is
/// clipped against the target cells and the areas must add back up. The
/// float bounding boxes only skip pairs that are safely apart.
pub fn region_covers_scaled(
    target: &GridRegion,
    source: &GridRegion,
    center: &Point,
    lambda: &QS3,
) -> bool {
    let tcells: Vec<(Polygon, [f64; 4])> = target
        .iter_cells()
        .map(|c| {
            let p = c.polygon();
            let bb = bbox_f64(&p);
            (p, bb)
        })
        .collect();
    const SLOP: f64 = 1e-6;
    for cell in source.iter_cells() {
        let scaled = cell.polygon().scale_about(center, lambda);
        let want = scaled.signed_area2();
        let sb = bbox_f64(&scaled);
        let mut got = QS3::zero();
        for (tp, tb) in &tcells {
            if sb[0] > tb[2] + SLOP || tb[0] > sb[2] + SLOP || sb[1] > tb[3] + SLOP
                || tb[1] > sb[3] + SLOP
            {
                continue;
            }
            got = got + crate::geometry::clip_area2(&scaled, tp);
        }
        if got != want {
            return false;
        }
    }
    true
}

#[derive(Debug, Error)]
pub enum GrpError {
    #[error("polygon is not an exact union of {kind:?} cells{}", witness_note(.witness))]
    NotPolyK {
        kind: CellKind,
        witness: Option<Symmetry>,
    },
}

fn witness_note(w: &Option<Symmetry>) -> String {
    match w {
        Some(s) => format!(" (first bad cell: {s})"),
        None => String::new(),
    }
}

/// Does the open cell meet the segment `a b`? Clips the segment against
/// the convex cell with exact half plane arithmetic.
fn segment_meets_open_convex(poly: &Polygon, a: &Point, b: &Point) -> bool {
    // parametrize p(t) = a + t (b - a), t in [0, 1]; shrink to the open
    // sub-interval strictly inside every edge half plane
    let mut lo = QS3::zero();
    let mut hi = QS3::one();
    for (e1, e2) in poly.edges() {
        // side > 0 means strictly left of the directed edge (inside)
        let side = |p: &Point| {
            (&e2.x - &e1.x) * (&p.y - &e1.y) - (&e2.y - &e1.y) * (&p.x - &e1.x)
        };
        let d0 = side(a);
        let d1 = side(b);
        let s0 = d0.sign();
        let s1 = d1.sign();
        if s0 <= 0 && s1 <= 0 {
            return false;
        }
        if s0 > 0 && s1 > 0 {
            continue;
        }
        // one endpoint strictly inside this half plane, the other not:
        // crossing parameter t* = d0 / (d0 - d1)
        let t = &d0 / (&d0 - &d1);
        if s0 <= 0 {
            if (&t - &lo).sign() > 0 {
                lo = t;
            }
        } else if (&hi - &t).sign() > 0 {
            hi = t;
        }
    }
    (&hi - &lo).sign() > 0
}

/// Exact discretization: the set of cells whose disjoint union is the
/// polygon. Fails unless the polygon is a grid-aligned union of cells of
/// this kind.
pub fn grp(poly: &Polygon, kind: CellKind) -> Result<GridRegion, GrpError> {
    // candidate translations from the exact bounding box
    let (mut min_a, mut max_a, mut min_b, mut max_b) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
    for v in poly.vertices() {
        let (a, b) = lattice_coords(v);
        let (fa, fb) = (a.floor_i64(), b.floor_i64());
        min_a = min_a.min(fa - 2);
        max_a = max_a.max(fa + 2);
        min_b = min_b.min(fb - 2);
        max_b = max_b.max(fb + 2);
    }
    let mut cells = BTreeSet::new();
    let mut witness = None;
    for tx in min_a..=max_a {
        for ty in min_b..=max_b {
            for rot in 0..6u8 {
                let flips: &[bool] = match kind {
                    CellKind::Kite => &[false],
                    CellKind::Semikite => &[false, true],
                };
                for &flip in flips {
                    let cell = Cell::new(Symmetry::new(tx, ty, rot, flip), kind);
                    if poly.locate_point(&cell.sample_point()) != PointLocation::Inside {
                        continue;
                    }
                    // the cell claims to belong; it must then lie fully
                    // inside, meaning no polygon edge passes through it
                    let cp = cell.polygon();
                    let crossed = poly
                        .edges()
                        .any(|(a, b)| segment_meets_open_convex(&cp, a, b));
                    if crossed {
                        if witness.is_none() {
                            witness = Some(cell.sym);
                        }
                    } else {
                        cells.insert(cell.sym);
                    }
                }
            }
        }
    }
    if witness.is_some() {
        return Err(GrpError::NotPolyK { kind, witness });
    }
    let region = GridRegion { kind, cells };
    if (region.area() - poly.area()).sign() != 0 {
        return Err(GrpError::NotPolyK {
            kind,
            witness: None,
        });
    }
    Ok(region)
}

/// Outer boundary loops of the region (counterclockwise; holes come out
/// clockwise). Inverse of `grp` up to the choice of starting vertex.
pub fn geo(region: &GridRegion) -> Vec<Polygon> {
    // collect directed edges of all cells and cancel interior pairs
    let mut edges: HashMap<(Point, Point), ()> = HashMap::new();
    for cell in region.iter_cells() {
        let poly = cell.polygon();
        let vs = poly.vertices();
        let n = vs.len();
        for i in 0..n {
            let a = vs[i].clone();
            let b = vs[(i + 1) % n].clone();
            if edges.remove(&(b.clone(), a.clone())).is_none() {
                edges.insert((a, b), ());
            }
        }
    }
    // index boundary edges by start point
    let mut by_start: HashMap<Point, Vec<Point>> = HashMap::new();
    for (a, b) in edges.keys() {
        by_start.entry(a.clone()).or_default().push(b.clone());
    }
    for outs in by_start.values_mut() {
        outs.sort_by(|p, q| p.x.cmp(&q.x).then_with(|| p.y.cmp(&q.y)));
    }
    let mut loops = Vec::new();
    let mut used: HashSet<(Point, Point)> = HashSet::new();
    let mut starts: Vec<Point> = by_start.keys().cloned().collect();
    starts.sort_by(|p, q| p.x.cmp(&q.x).then_with(|| p.y.cmp(&q.y)));
    for start in starts {
        for first in by_start[&start].clone() {
            if used.contains(&(start.clone(), first.clone())) {
                continue;
            }
            let mut path = vec![start.clone()];
            let mut prev = start.clone();
            let mut cur = first.clone();
            used.insert((prev.clone(), cur.clone()));
            while cur != start {
                path.push(cur.clone());
                let outs = &by_start[&cur];
                let next = if outs.len() == 1 {
                    outs[0].clone()
                } else {
                    pick_sharpest_left(&prev, &cur, outs, &used)
                };
                used.insert((cur.clone(), next.clone()));
                prev = cur;
                cur = next;
            }
            // merge collinear runs so unions have clean outlines
            let path = merge_collinear(path);
            loops.push(Polygon::new(path).expect("boundary walk yields a simple loop"));
        }
    }
    loops
}

/// At a pinch vertex, continue with the unused outgoing edge that turns
/// most sharply left relative to the incoming direction, which keeps each
/// loop simple.
fn pick_sharpest_left(
    prev: &Point,
    cur: &Point,
    outs: &[Point],
    used: &HashSet<(Point, Point)>,
) -> Point {
    let rev = Point::new(&prev.x - &cur.x, &prev.y - &cur.y);
    let mut best: Option<Point> = None;
    for cand in outs {
        if used.contains(&(cur.clone(), cand.clone())) {
            continue;
        }
        match &best {
            None => best = Some(cand.clone()),
            Some(b) => {
                let d = Point::new(&cand.x - &cur.x, &cand.y - &cur.y);
                let db = Point::new(&b.x - &cur.x, &b.y - &cur.y);
                if ccw_before(&rev, &d, &db) {
                    best = Some(cand.clone());
                }
            }
        }
    }
    best.expect("boundary edge multiset is balanced")
}

/// Is `d1` reached strictly before `d2` when sweeping counterclockwise
/// from `base`? All comparisons exact; directions coincident with `base`
/// sort first.
fn ccw_before(base: &Point, d1: &Point, d2: &Point) -> bool {
    let sector = |d: &Point| {
        let cross = (&base.x * &d.y - &base.y * &d.x).sign();
        let dot = (&base.x * &d.x + &base.y * &d.y).sign();
        match (cross, dot) {
            (0, 1) => 0u8,
            (1, _) => 1,
            (0, _) => 2,
            _ => 3,
        }
    };
    let (s1, s2) = (sector(d1), sector(d2));
    if s1 != s2 {
        return s1 < s2;
    }
    // same open half plane: the one hit first leaves the other to its left
    (&d1.x * &d2.y - &d1.y * &d2.x).sign() > 0
}

fn merge_collinear(path: Vec<Point>) -> Vec<Point> {
    let n = path.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let prev = &path[(i + n - 1) % n];
        let cur = &path[i];
        let next = &path[(i + 1) % n];
        if orient(prev, cur, next) != 0 || !on_segment(cur, prev, next) {
            out.push(cur.clone());
        }
    }
    out
}

/// Generators of the cell adjacency relation, derived from the geometry:
/// the elements `g` such that `g * base` shares an edge with the base cell.
pub fn adjacency_generators(kind: CellKind) -> Vec<Symmetry> {
    let base = base_polygon(kind);
    let mut gens = Vec::new();
    for (a, b) in base.edges() {
        let mid = Point::new((&a.x + &b.x) / QS3::from_int(2), (&a.y + &b.y) / QS3::from_int(2));
        // outward normal of a counterclockwise polygon edge
        let nx = &b.y - &a.y;
        let ny = &a.x - &b.x;
        let eps = QS3::from_ratio(1, 64);
        let probe = Point::new(&mid.x + &nx * &eps, &mid.y + &ny * &eps);
        let cell = locate(&probe, kind).expect("probe point is interior to a neighbour");
        gens.push(cell.sym);
    }
    gens.sort();
    gens.dedup();
    gens
}

/// `locate` is equivariant: `locate(g p) = g * locate(p)`; exposed for
/// property tests.
pub fn locate_equivariant_check(g: &Symmetry, p: &Point, kind: CellKind) -> bool {
    let moved = g.apply_point(p);
    match (locate(p, kind), locate(&moved, kind)) {
        (Ok(c1), Ok(c2)) => Cell::new(g.mul(&c1.sym), kind).sym == c2.sym,
        (Err(_), Err(_)) => true,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Isometry;
    use crate::group::{ALPHA, BETA, GAMMA, IDENTITY, R3, R6};

    #[test]
    fn base_cells_have_expected_areas() {
        assert_eq!(base_polygon(CellKind::Kite).area(), QS3::sqrt3());
        assert_eq!(
            base_polygon(CellKind::Semikite).area(),
            QS3::from_parts(0, 1, 1, 2)
        );
    }

    #[test]
    fn scaled_cover_detects_containment_and_overflow() {
        let one = GridRegion::from_cells(CellKind::Kite, [IDENTITY]);
        let ball = GridRegion::ball(CellKind::Kite, 12);
        let tail = Point::origin();
        assert!(region_covers_scaled(&one, &one, &tail, &QS3::one()));
        // doubling about the tail escapes the single cell but stays in
        // the ball
        let two = QS3::from_int(2);
        assert!(!region_covers_scaled(&one, &one, &tail, &two));
        assert!(region_covers_scaled(&ball, &one, &tail, &two));
        let lam = QS3::from_ratio(5, 2);
        assert!(region_covers_scaled(&ball, &one, &tail, &lam));
    }

    #[test]
    fn kite_cells_normalize_the_mirror() {
        let c1 = Cell::new(BETA, CellKind::Kite);
        assert_eq!(c1.sym, IDENTITY);
        let g = Symmetry::new(2, -1, 3, true);
        let c2 = Cell::new(g, CellKind::Kite);
        assert!(!c2.sym.flip);
        // same geometric kite
        assert_eq!(c2.polygon().area(), QS3::sqrt3());
    }

    #[test]
    fn locate_roundtrips_cell_sample_points() {
        for kind in [CellKind::Kite, CellKind::Semikite] {
            for sym in [
                IDENTITY,
                R6,
                R3,
                Symmetry::new(1, 2, 4, false),
                Symmetry::new(-2, 1, 3, true),
            ] {
                let cell = Cell::new(sym, kind);
                let found = locate(&cell.sample_point(), kind).unwrap();
                assert_eq!(found, cell);
            }
        }
    }

    #[test]
    fn locate_rejects_grid_vertices_and_edges() {
        assert_eq!(
            locate(&Point::origin(), CellKind::Kite),
            Err(LocateError::BoundaryPoint)
        );
        // midpoint of the tail-head axis lies on the kite diagonal only
        // for semikites
        let p = Point::from_ints(1, 0);
        assert!(locate(&p, CellKind::Kite).is_ok());
        assert_eq!(
            locate(&p, CellKind::Semikite),
            Err(LocateError::BoundaryPoint)
        );
    }

    #[test]
    fn locate_is_equivariant() {
        let p = Point::new(QS3::from_ratio(5, 4), QS3::from_ratio(1, 5));
        for g in [R6, R3, BETA, Symmetry::new(1, -2, 5, true)] {
            for kind in [CellKind::Kite, CellKind::Semikite] {
                assert!(locate_equivariant_check(&g, &p, kind));
            }
        }
    }

    #[test]
    fn grp_of_single_cells() {
        for kind in [CellKind::Kite, CellKind::Semikite] {
            let region = grp(&base_polygon(kind), kind).unwrap();
            assert_eq!(region.len(), 1);
            assert!(region.contains(&IDENTITY));
        }
    }

    #[test]
    fn grp_of_hexagon_is_six_kites() {
        // the six kites with tail at the origin tile a regular hexagon of
        // circumradius 2
        let region = GridRegion::from_cells(CellKind::Kite, (0..6).map(|k| R6.pow(k)));
        let loops = geo(&region);
        assert_eq!(loops.len(), 1);
        let hex = &loops[0];
        assert_eq!(hex.vertices().len(), 6);
        assert_eq!(hex.area(), QS3::from_parts(0, 1, 6, 1));
        let back = grp(hex, CellKind::Kite).unwrap();
        assert_eq!(back, region);
    }

    #[test]
    fn grp_rejects_misaligned_polygons() {
        // a kite shifted off grid
        let shift = Isometry::translation(QS3::from_ratio(1, 7), QS3::zero());
        let poly = shift.apply_polygon(&base_polygon(CellKind::Kite));
        assert!(grp(&poly, CellKind::Kite).is_err());
        // a triangle that is half a kite is not a kite union
        assert!(grp(&base_polygon(CellKind::Semikite), CellKind::Kite).is_err());
    }

    #[test]
    fn geo_then_grp_round_trips_a_ball() {
        let ball = GridRegion::ball(CellKind::Semikite, 4);
        assert!(ball.len() > 10);
        let loops = geo(&ball);
        assert_eq!(loops.len(), 1, "a small ball is simply connected");
        let back = grp(&loops[0], CellKind::Semikite).unwrap();
        assert_eq!(back, ball);
    }

    #[test]
    fn semikite_adjacency_generators_are_the_coxeter_mirrors() {
        let gens = adjacency_generators(CellKind::Semikite);
        let mut expect = vec![ALPHA, BETA, GAMMA];
        expect.sort();
        assert_eq!(gens, expect);
    }

    #[test]
    fn kite_adjacency_generators_are_rotations() {
        let gens = adjacency_generators(CellKind::Kite);
        let mut expect = vec![R6, R6.inverse(), R3, R3.inverse()];
        expect.sort();
        assert_eq!(gens, expect);
    }
}
