//! Translation between geometric tilings and group tilings: poly-cell
//! testing, cotiler transfer, exact cover verification on finite windows,
//! the orbit-map discretization, and cell decomposition of a tileset.

use crate::geometry::{Point, PointLocation, Polygon};
use crate::grid::{self, CellKind, GridRegion, GrpError, LocateError};
use crate::group::{Symmetry, BETA};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

/// A named tile: a finite cell set, optionally with the polygon it
/// discretizes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tile {
    pub cells: BTreeSet<Symmetry>,
    #[serde(skip)]
    pub polygon: Option<Polygon>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TileSet {
    pub kind: CellKind,
    pub tiles: BTreeMap<String, Tile>,
}

#[derive(Debug, Error)]
pub enum TileSetError {
    #[error("tile {0} is empty")]
    EmptyTile(String),
    #[error("tile {0}: {1}")]
    NotPolyK(String, GrpError),
    #[error("tile {0}: kite cells must be orientation preserving")]
    OutsideActingGroup(String),
}

impl TileSet {
    pub fn new(kind: CellKind) -> Self {
        TileSet {
            kind,
            tiles: BTreeMap::new(),
        }
    }

    pub fn add_tile(
        &mut self,
        name: &str,
        cells: impl IntoIterator<Item = Symmetry>,
    ) -> Result<(), TileSetError> {
        let cells: BTreeSet<Symmetry> = cells.into_iter().collect();
        if cells.is_empty() {
            return Err(TileSetError::EmptyTile(name.to_string()));
        }
        if self.kind == CellKind::Kite && cells.iter().any(|c| c.flip) {
            return Err(TileSetError::OutsideActingGroup(name.to_string()));
        }
        self.tiles.insert(
            name.to_string(),
            Tile {
                cells,
                polygon: None,
            },
        );
        Ok(())
    }

    /// Add a tile by discretizing its polygon.
    pub fn add_polygon_tile(&mut self, name: &str, poly: Polygon) -> Result<(), TileSetError> {
        let region = grid::grp(&poly, self.kind)
            .map_err(|e| TileSetError::NotPolyK(name.to_string(), e))?;
        self.add_tile(name, region.cells.iter().copied())?;
        self.tiles.get_mut(name).unwrap().polygon = Some(poly);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Tile> {
        self.tiles.get(name)
    }
}

/// Decomposition into cells iff the polygon is an exact union of cells of
/// this kind.
pub fn is_poly_k(poly: &Polygon, kind: CellKind) -> Result<GridRegion, GrpError> {
    grid::grp(poly, kind)
}

/// A set of placements (group element, tile name): a finite fragment of a
/// group cotiler.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Cotiler {
    pub placements: BTreeSet<(Symmetry, String)>,
}

impl Cotiler {
    pub fn new() -> Self {
        Cotiler::default()
    }

    pub fn insert(&mut self, g: Symmetry, tile: &str) -> bool {
        self.placements.insert((g, tile.to_string()))
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    /// Left translate every placement.
    pub fn translate(&self, h: &Symmetry) -> Cotiler {
        Cotiler {
            placements: self
                .placements
                .iter()
                .map(|(g, t)| (h.mul(g), t.clone()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverReport {
    pub window: BTreeSet<Symmetry>,
    pub covered_once: BTreeSet<Symmetry>,
    pub gaps: BTreeSet<Symmetry>,
    pub overlaps: BTreeSet<Symmetry>,
    pub verdict: bool,
}

#[derive(Debug, Error)]
pub enum CoverError {
    #[error("placement references unknown tile {0}")]
    UnknownTile(String),
    #[error("kite tilings act through orientation preserving elements; {0} is not one")]
    OutsideActingGroup(Symmetry),
}

/// Worker count for window partitioning, from the environment; results do
/// not depend on it.
pub fn worker_count() -> usize {
    std::env::var("GAT_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1 && n <= 64)
        .unwrap_or(1)
}

/// Check that the placements cover each window element exactly once.
/// Placements overhanging the window contribute only their in-window
/// cells.
pub fn verify_exact_cover(
    tiles: &TileSet,
    cotiler: &Cotiler,
    window: &BTreeSet<Symmetry>,
) -> Result<CoverReport, CoverError> {
    let kind = tiles.kind;
    if kind == CellKind::Kite {
        if let Some((g, _)) = cotiler.placements.iter().find(|(g, _)| g.flip) {
            return Err(CoverError::OutsideActingGroup(*g));
        }
        if let Some(g) = window.iter().find(|g| g.flip) {
            return Err(CoverError::OutsideActingGroup(*g));
        }
    }
    for (_, name) in &cotiler.placements {
        if !tiles.tiles.contains_key(name) {
            return Err(CoverError::UnknownTile(name.clone()));
        }
    }
    let placements: Vec<&(Symmetry, String)> = cotiler.placements.iter().collect();
    let workers = worker_count().min(placements.len().max(1));
    let counts: HashMap<Symmetry, u32> = if workers <= 1 {
        count_coverage(tiles, &placements, window)
    } else {
        let chunk = placements.len().div_ceil(workers);
        let mut merged: HashMap<Symmetry, u32> = HashMap::new();
        std::thread::scope(|scope| {
            let handles: Vec<_> = placements
                .chunks(chunk)
                .map(|part| scope.spawn(move || count_coverage(tiles, part, window)))
                .collect();
            for h in handles {
                for (k, v) in h.join().expect("worker panicked") {
                    *merged.entry(k).or_insert(0) += v;
                }
            }
        });
        merged
    };
    let mut covered_once = BTreeSet::new();
    let mut gaps = BTreeSet::new();
    let mut overlaps = BTreeSet::new();
    for g in window {
        match counts.get(g).copied().unwrap_or(0) {
            0 => gaps.insert(*g),
            1 => covered_once.insert(*g),
            _ => overlaps.insert(*g),
        };
    }
    let verdict = gaps.is_empty() && overlaps.is_empty();
    Ok(CoverReport {
        window: window.clone(),
        covered_once,
        gaps,
        overlaps,
        verdict,
    })
}

fn count_coverage(
    tiles: &TileSet,
    placements: &[&(Symmetry, String)],
    window: &BTreeSet<Symmetry>,
) -> HashMap<Symmetry, u32> {
    let mut counts = HashMap::new();
    for (g, name) in placements {
        for c in &tiles.tiles[name].cells {
            let h = g.mul(c);
            if window.contains(&h) {
                *counts.entry(h).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// A geometric patch: named polygons placed by group elements.
#[derive(Debug, Clone)]
pub struct GeometricPatch {
    pub kind: CellKind,
    pub polygons: BTreeMap<String, Polygon>,
    pub placements: BTreeSet<(Symmetry, String)>,
}

#[derive(Debug, Error)]
pub enum TransferError {
    #[error("tile {0}: {1}")]
    NotPolyK(String, GrpError),
    #[error("tile {0}: empty or missing polygon")]
    MissingPolygon(String),
    #[error("kite tilings act through orientation preserving elements; {0} is not one")]
    OutsideActingGroup(Symmetry),
}

/// The renaming half of the bijection: each geometric tile becomes its
/// cell set, placements unchanged.
pub fn transfer_cotiler(patch: &GeometricPatch) -> Result<(TileSet, Cotiler), TransferError> {
    let mut tiles = TileSet::new(patch.kind);
    for (name, poly) in &patch.polygons {
        tiles
            .add_polygon_tile(name, poly.clone())
            .map_err(|e| match e {
                TileSetError::NotPolyK(n, g) => TransferError::NotPolyK(n, g),
                _ => TransferError::MissingPolygon(name.clone()),
            })?;
    }
    let mut cotiler = Cotiler::new();
    for (g, name) in &patch.placements {
        if patch.kind == CellKind::Kite && g.flip {
            return Err(TransferError::OutsideActingGroup(*g));
        }
        if !patch.polygons.contains_key(name) {
            return Err(TransferError::MissingPolygon(name.clone()));
        }
        cotiler.insert(*g, name);
    }
    Ok((tiles, cotiler))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrbitError {
    #[error("basepoint or one of its translates lies on a boundary")]
    BoundaryBasepoint,
}

/// The orbit-map discretization: all `g` with `g * basepoint` inside the
/// polygon. Agrees with `grp` when the basepoint is interior to the base
/// cell and the polygon is grid aligned.
pub fn orbit_grp(
    poly: &Polygon,
    basepoint: &Point,
    kind: CellKind,
) -> Result<BTreeSet<Symmetry>, OrbitError> {
    if grid::locate(basepoint, kind) == Err(LocateError::BoundaryPoint) {
        return Err(OrbitError::BoundaryBasepoint);
    }
    let (ba, bb) = grid::lattice_coords_floor(basepoint);
    let margin = (7 * (ba.abs() + bb.abs() + 2)) / 6 + 3;
    let (mut min_a, mut max_a, mut min_b, mut max_b) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
    for v in poly.vertices() {
        let (fa, fb) = grid::lattice_coords_floor(v);
        min_a = min_a.min(fa - margin);
        max_a = max_a.max(fa + margin);
        min_b = min_b.min(fb - margin);
        max_b = max_b.max(fb + margin);
    }
    let mut out = BTreeSet::new();
    for tx in min_a..=max_a {
        for ty in min_b..=max_b {
            for rot in 0..6u8 {
                let flips: &[bool] = match kind {
                    CellKind::Kite => &[false],
                    CellKind::Semikite => &[false, true],
                };
                for &flip in flips {
                    let g = Symmetry::new(tx, ty, rot, flip);
                    match poly.locate_point(&g.apply_point(basepoint)) {
                        PointLocation::Inside => {
                            out.insert(g);
                        }
                        PointLocation::Boundary => return Err(OrbitError::BoundaryBasepoint),
                        PointLocation::Outside => {}
                    }
                }
            }
        }
    }
    Ok(out)
}

/// One cell of a decomposition: the semikites of the fundamental kite it
/// consists of, with the placements that were indistinguishable on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionCell {
    pub semikites: BTreeSet<Symmetry>,
    pub chi: BTreeSet<(Symmetry, String)>,
}

#[derive(Debug, Error)]
pub enum DecompError {
    #[error("tileset has no tiles")]
    Empty,
}

/// Split the fundamental kite into cells on which the covering pattern
/// chi is constant: chi(s) collects the placements (g, T) whose copy
/// g * T contains the semikite s. Tiles are taken at semikite
/// granularity; the acting group is the full symmetry group.
pub fn cell_decomposition(tiles: &TileSet) -> Result<Vec<DecompositionCell>, DecompError> {
    if tiles.tiles.is_empty() {
        return Err(DecompError::Empty);
    }
    let fundamental = [Symmetry::new(0, 0, 0, false), BETA];
    let mut by_chi: BTreeMap<Vec<(Symmetry, String)>, BTreeSet<Symmetry>> = BTreeMap::new();
    for s in fundamental {
        let mut chi = BTreeSet::new();
        for (name, tile) in &tiles.tiles {
            for c in semikite_cells(tiles.kind, tile) {
                // s is inside g * T exactly when g = s * c^-1 for a cell c
                chi.insert((s.mul(&c.inverse()), name.clone()));
            }
        }
        by_chi
            .entry(chi.into_iter().collect())
            .or_default()
            .insert(s);
    }
    Ok(by_chi
        .into_iter()
        .map(|(chi, semikites)| DecompositionCell {
            semikites,
            chi: chi.into_iter().collect(),
        })
        .collect())
}

/// The tile's cells at semikite granularity (kite cells split into their
/// two halves).
pub fn semikite_cells(kind: CellKind, tile: &Tile) -> Vec<Symmetry> {
    match kind {
        CellKind::Semikite => tile.cells.iter().copied().collect(),
        CellKind::Kite => tile
            .cells
            .iter()
            .flat_map(|k| [*k, k.mul(&BETA)])
            .collect(),
    }
}

/// Decompose one tile into copies of decomposition cells; checks the
/// poly-cell property of the output cells on this input.
pub fn decompose_tile_into_cells(
    tiles: &TileSet,
    name: &str,
    cells: &[DecompositionCell],
) -> Option<Vec<(Symmetry, usize)>> {
    let tile = tiles.get(name)?;
    let mut remaining: BTreeSet<Symmetry> = semikite_cells(tiles.kind, tile).into_iter().collect();
    let mut out = Vec::new();
    while let Some(first) = remaining.iter().next().copied() {
        // the copy g * cell that contains `first` must do so via some
        // semikite s of the cell: g = first * s^-1
        let mut placed = false;
        for (i, cell) in cells.iter().enumerate() {
            for s in &cell.semikites {
                let g = first.mul(&s.inverse());
                let copy: BTreeSet<Symmetry> =
                    cell.semikites.iter().map(|t| g.mul(t)).collect();
                if copy.is_subset(&remaining) {
                    for c in &copy {
                        remaining.remove(c);
                    }
                    out.push((g, i));
                    placed = true;
                    break;
                }
            }
            if placed {
                break;
            }
        }
        if !placed {
            return None;
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::base_polygon;
    use crate::group::{ALPHA, GAMMA, IDENTITY, R3, R6, T1, T2};
    use crate::hats::{gat_cells, hat_kite_cells, hat_polygon};

    fn gat_tiles() -> TileSet {
        let mut tiles = TileSet::new(CellKind::Semikite);
        tiles.add_polygon_tile("gat", hat_polygon()).unwrap();
        tiles
    }

    #[test]
    fn polygon_tile_discretizes_to_gat() {
        let tiles = gat_tiles();
        let cells: Vec<Symmetry> = tiles.get("gat").unwrap().cells.iter().copied().collect();
        assert_eq!(cells, gat_cells());
    }

    #[test]
    fn grid_cotiler_covers_every_window() {
        // the full group placed over the single-cell tile covers any ball
        let mut tiles = TileSet::new(CellKind::Semikite);
        tiles.add_tile("cell", [IDENTITY]).unwrap();
        let window = GridRegion::ball(CellKind::Semikite, 5).cells;
        let mut cotiler = Cotiler::new();
        for g in &window {
            cotiler.insert(*g, "cell");
        }
        let report = verify_exact_cover(&tiles, &cotiler, &window).unwrap();
        assert!(report.verdict);
        assert_eq!(report.covered_once.len(), window.len());
    }

    #[test]
    fn duplicate_gat_placement_overlaps_sixteen_cells() {
        let tiles = gat_tiles();
        let mut cotiler = Cotiler::new();
        cotiler.insert(IDENTITY, "gat");
        // a second copy shifted far away, plus a literal overlap via a
        // second tile name on the same cells
        let mut tiles2 = tiles.clone();
        tiles2.add_tile("gat2", gat_cells()).unwrap();
        cotiler.insert(IDENTITY, "gat2");
        let window = GridRegion::ball(CellKind::Semikite, 6).cells;
        let report = verify_exact_cover(&tiles2, &cotiler, &window).unwrap();
        assert!(!report.verdict);
        assert_eq!(report.overlaps.len(), 16);
    }

    #[test]
    fn verify_is_worker_count_independent() {
        let tiles = gat_tiles();
        let mut cotiler = Cotiler::new();
        cotiler.insert(IDENTITY, "gat");
        cotiler.insert(T1, "gat");
        let window = GridRegion::ball(CellKind::Semikite, 4).cells;
        let base = verify_exact_cover(&tiles, &cotiler, &window).unwrap();
        std::env::set_var("GAT_WORKERS", "4");
        let par = verify_exact_cover(&tiles, &cotiler, &window).unwrap();
        std::env::remove_var("GAT_WORKERS");
        assert_eq!(base.covered_once, par.covered_once);
        assert_eq!(base.gaps, par.gaps);
        assert_eq!(base.overlaps, par.overlaps);
    }

    #[test]
    fn transfer_is_syntactic_renaming() {
        let mut patch = GeometricPatch {
            kind: CellKind::Semikite,
            polygons: BTreeMap::new(),
            placements: BTreeSet::new(),
        };
        patch.polygons.insert("hat".into(), hat_polygon());
        patch.placements.insert((IDENTITY, "hat".into()));
        patch.placements.insert((R3, "hat".into()));
        patch.placements.insert((ALPHA, "hat".into()));
        let (tiles, cotiler) = transfer_cotiler(&patch).unwrap();
        assert_eq!(cotiler.len(), 3);
        assert_eq!(
            tiles.get("hat").unwrap().cells.iter().copied().collect::<Vec<_>>(),
            gat_cells()
        );
        let placements: Vec<Symmetry> =
            cotiler.placements.iter().map(|(g, _)| *g).collect();
        assert_eq!(placements, vec![IDENTITY, ALPHA, R3]);
    }

    #[test]
    fn orbit_grp_matches_grp_for_interior_basepoint() {
        // a point interior to the base semikite
        let b = base_polygon(CellKind::Semikite).vertex_mean();
        let orbit = orbit_grp(&hat_polygon(), &b, CellKind::Semikite).unwrap();
        assert_eq!(orbit.iter().copied().collect::<Vec<_>>(), gat_cells());
        let bk = base_polygon(CellKind::Kite).vertex_mean();
        let orbit_k = orbit_grp(&hat_polygon(), &bk, CellKind::Kite).unwrap();
        assert_eq!(orbit_k.iter().copied().collect::<Vec<_>>(), hat_kite_cells());
    }

    #[test]
    fn orbit_grp_on_hexagon_is_the_rotation_group() {
        let hexagon = grid::geo(&GridRegion::from_cells(
            CellKind::Kite,
            (0..6).map(|k| R6.pow(k)),
        ))
        .pop()
        .unwrap();
        let bk = base_polygon(CellKind::Kite).vertex_mean();
        let orbit = orbit_grp(&hexagon, &bk, CellKind::Kite).unwrap();
        let expect: BTreeSet<Symmetry> = (0..6).map(|k| R6.pow(k)).collect();
        assert_eq!(orbit, expect);
    }

    #[test]
    fn orbit_grp_rejects_boundary_basepoints() {
        assert_eq!(
            orbit_grp(&hat_polygon(), &Point::origin(), CellKind::Kite),
            Err(OrbitError::BoundaryBasepoint)
        );
    }

    #[test]
    fn decomposition_of_semikite_tileset_is_two_semikite_cells() {
        let mut tiles = TileSet::new(CellKind::Semikite);
        tiles.add_tile("semikite", [IDENTITY]).unwrap();
        let cells = cell_decomposition(&tiles).unwrap();
        assert_eq!(cells.len(), 2);
        for cell in &cells {
            assert_eq!(cell.semikites.len(), 1);
        }
    }

    #[test]
    fn decomposition_of_kite_tileset_is_one_kite_cell() {
        let mut tiles = TileSet::new(CellKind::Kite);
        tiles.add_tile("kite", [IDENTITY]).unwrap();
        let cells = cell_decomposition(&tiles).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].semikites.len(), 2);
    }

    #[test]
    fn decomposition_of_hat_tileset_is_one_kite_cell() {
        // the hat's semikite set is closed under the mirror on the right,
        // so both halves of the fundamental kite see the same pattern
        let tiles = gat_tiles();
        let cells = cell_decomposition(&tiles).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].semikites.len(), 2);
        assert_eq!(cells[0].chi.len(), 16);
    }

    #[test]
    fn every_tile_decomposes_into_decomposition_cells() {
        for tiles in [gat_tiles(), {
            let mut t = TileSet::new(CellKind::Kite);
            t.add_tile("kite", [IDENTITY]).unwrap();
            t.add_tile("hexagon", (0..6).map(|k| R6.pow(k))).unwrap();
            t
        }] {
            let cells = cell_decomposition(&tiles).unwrap();
            // cells partition the fundamental kite
            let total: usize = cells.iter().map(|c| c.semikites.len()).sum();
            assert_eq!(total, 2);
            for name in tiles.tiles.keys() {
                let decomp = decompose_tile_into_cells(&tiles, name, &cells)
                    .expect("tile is a union of cell copies");
                let count: usize = decomp
                    .iter()
                    .map(|(_, i)| cells[*i].semikites.len())
                    .sum();
                assert_eq!(count, semikite_cells(tiles.kind, tiles.get(name).unwrap()).len());
            }
        }
    }

    #[test]
    fn cotiler_translation_acts_on_the_left() {
        let mut c = Cotiler::new();
        c.insert(R6, "x");
        let moved = c.translate(&T2);
        assert!(moved.placements.contains(&(T2.mul(&R6), "x".into())));
    }
}
