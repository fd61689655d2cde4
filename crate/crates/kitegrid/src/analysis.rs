//! Finite-window analysis of group tilings: stabilizers, translation
//! periods, rotation-order screening, and a backtracking exact-cover
//! search for extending partial tilings.

use crate::discretize::{verify_exact_cover, Cotiler, TileSet};
use crate::geometry::{Point, Polygon};
use crate::grid;
use crate::group::{classify, plane_to_lattice, Symmetry, SymmetryClass};
use crate::scalar::QS3;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashSet};
use thiserror::Error;

/// A cotiler fragment together with a window it covers exactly.
#[derive(Debug, Clone)]
pub struct WindowPatch {
    pub tiles: TileSet,
    pub placements: Cotiler,
    pub window: BTreeSet<Symmetry>,
}

#[derive(Debug, Error)]
pub enum PatchError {
    #[error("window is empty")]
    EmptyWindow,
    #[error("placements do not cover the window exactly ({gaps} gaps, {overlaps} overlaps)")]
    NotExact { gaps: usize, overlaps: usize },
    #[error(transparent)]
    Cover(#[from] crate::discretize::CoverError),
}

impl WindowPatch {
    pub fn new(
        tiles: TileSet,
        placements: Cotiler,
        window: BTreeSet<Symmetry>,
    ) -> Result<Self, PatchError> {
        if window.is_empty() {
            return Err(PatchError::EmptyWindow);
        }
        let report = verify_exact_cover(&tiles, &placements, &window)?;
        if !report.verdict {
            return Err(PatchError::NotExact {
                gaps: report.gaps.len(),
                overlaps: report.overlaps.len(),
            });
        }
        Ok(WindowPatch {
            tiles,
            placements,
            window,
        })
    }

    /// Placements whose tiles lie entirely inside the window.
    pub fn interior_placements(&self) -> Vec<(Symmetry, String)> {
        self.placements
            .placements
            .iter()
            .filter(|(g, name)| {
                self.tiles.tiles[name]
                    .cells
                    .iter()
                    .all(|c| self.window.contains(&g.mul(c)))
            })
            .cloned()
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct StabilizerReport {
    pub elements: Vec<(Symmetry, SymmetryClass)>,
    pub is_subgroup: bool,
    pub conjugacy_note: String,
}

/// Does `h` map every window-interior placement onto another placement,
/// ignoring images that leave the window, and likewise for its inverse?
/// At least one image must stay inside, so an element that pushes the
/// whole patch out of the window is not vacuously a period.
fn is_window_period(patch: &WindowPatch, interior: &[(Symmetry, String)], h: &Symmetry) -> bool {
    let mut witnessed = false;
    for dir in [*h, h.inverse()] {
        for (g, name) in interior {
            let hg = dir.mul(g);
            let inside = patch.tiles.tiles[name]
                .cells
                .iter()
                .all(|c| patch.window.contains(&hg.mul(c)));
            if inside {
                if !patch.placements.placements.contains(&(hg, name.clone())) {
                    return false;
                }
                witnessed = true;
            }
        }
    }
    witnessed
}

/// Window stabilizer: the candidate elements that permute the
/// window-interior placements (boundary placements excluded
/// symmetrically). With `candidates = None` the candidate set is derived
/// from placement pairs of equal tiles.
pub fn patch_stabilizer(
    patch: &WindowPatch,
    candidates: Option<&BTreeSet<Symmetry>>,
) -> StabilizerReport {
    let interior = patch.interior_placements();
    let derived: BTreeSet<Symmetry> = match candidates {
        Some(c) => c.clone(),
        None => {
            // any window period maps an interior placement to a placement
            // of the same tile, so quotients of same-tile placement pairs
            // exhaust the candidates
            let mut set = BTreeSet::new();
            let mut seed_per_tile: BTreeMap<&String, &Symmetry> = BTreeMap::new();
            for (g, name) in &interior {
                seed_per_tile.entry(name).or_insert(g);
            }
            for (g2, name2) in &patch.placements.placements {
                if let Some(g1) = seed_per_tile.get(name2) {
                    set.insert(g2.mul(&g1.inverse()));
                }
            }
            set.insert(Symmetry::new(0, 0, 0, false));
            set
        }
    };
    let mut elements = Vec::new();
    for h in &derived {
        if h.is_identity() || is_window_period(patch, &interior, h) {
            elements.push((*h, classify(h)));
        }
    }
    let found: BTreeSet<Symmetry> = elements.iter().map(|(h, _)| *h).collect();
    let is_subgroup = found
        .iter()
        .all(|a| found.iter().all(|b| found.contains(&a.mul(&b.inverse()))));
    let conjugacy_note = conjugacy_note(&found);
    StabilizerReport {
        elements,
        is_subgroup,
        conjugacy_note,
    }
}

fn conjugacy_note(found: &BTreeSet<Symmetry>) -> String {
    if found.len() == 1 {
        return "trivial".to_string();
    }
    if found.len() == 3 {
        let rots: Vec<&Symmetry> = found.iter().filter(|h| !h.is_identity()).collect();
        let centers: Vec<Option<Point>> = rots
            .iter()
            .map(|h| match classify(h) {
                SymmetryClass::Rotation { order: 3, center } => Some(center),
                _ => None,
            })
            .collect();
        if let [Some(c1), Some(c2)] = centers.as_slice() {
            if c1 == c2 {
                // order-3 rotations about one center: conjugate of
                // {id, R3, R3^2} by the translation moving the head there
                let head = Point::from_ints(2, 0);
                let delta = Point::new(&c1.x - &head.x, &c1.y - &head.y);
                return match plane_to_lattice(&delta) {
                    Some((a, b)) => format!(
                        "conjugate of {{id, R3, R3^2}} by t({a},{b})"
                    ),
                    None => "order-3 rotation group about a non-head center".to_string(),
                };
            }
        }
    }
    "see elements".to_string()
}

/// All nonzero pure translations of norm at most `max_norm` that are
/// window periods.
pub fn find_translation_periods(patch: &WindowPatch, max_norm: i64) -> Vec<Symmetry> {
    let interior = patch.interior_placements();
    let mut out = Vec::new();
    let bound = max_norm * max_norm;
    // 12(a^2+ab+b^2) <= max_norm^2 constrains both coordinates
    let range = max_norm / 3 + 1;
    for a in -range..=range {
        for b in -range..=range {
            if a == 0 && b == 0 {
                continue;
            }
            let t = Symmetry::translation(a, b);
            if t.translation_norm2() > bound {
                continue;
            }
            if is_window_period(patch, &interior, &t) {
                out.push(t);
            }
        }
    }
    out.sort();
    out
}

/// Corner angles of a grid-aligned polygon in 30 degree units, derived
/// from exact edge direction sectors.
fn corner_angles_30(poly: &Polygon) -> Option<Vec<u8>> {
    let vs = poly.vertices();
    let n = vs.len();
    let mut angles = Vec::with_capacity(n);
    for i in 0..n {
        let prev = &vs[(i + n - 1) % n];
        let cur = &vs[i];
        let next = &vs[(i + 1) % n];
        let din = Point::new(&cur.x - &prev.x, &cur.y - &prev.y);
        let dout = Point::new(&next.x - &cur.x, &next.y - &cur.y);
        let s_in = direction_sector_30(&din)?;
        let s_out = direction_sector_30(&dout)?;
        // interior angle = angle from dout to reversed din, counterclockwise
        let rev_in = (s_in + 6) % 12;
        let ang = (rev_in + 12 - s_out) % 12;
        if ang == 0 {
            return None;
        }
        angles.push(ang as u8);
    }
    Some(angles)
}

/// Which multiple of 30 degrees does this direction point at?
fn direction_sector_30(d: &Point) -> Option<u32> {
    for k in 0..12u32 {
        // direction at k*30 degrees has an exact QS3 form
        let (c, s) = cos_sin_30(k);
        // parallel and same sign: cross = 0, dot > 0
        let cross = (&c * &d.y - &s * &d.x).sign();
        let dot = (&c * &d.x + &s * &d.y).sign();
        if cross == 0 && dot > 0 {
            return Some(k);
        }
    }
    None
}

fn cos_sin_30(k: u32) -> (QS3, QS3) {
    // cos/sin of k*30 degrees over Q(sqrt 3): (a + b sqrt3)/2 forms
    let half = |a: i64, b: i64| QS3::from_parts(a, 2, b, 2);
    match k % 12 {
        0 => (half(2, 0), half(0, 0)),
        1 => (half(0, 1), half(1, 0)),
        2 => (half(1, 0), half(0, 1)),
        3 => (half(0, 0), half(2, 0)),
        4 => (half(-1, 0), half(0, 1)),
        5 => (half(0, -1), half(1, 0)),
        6 => (half(-2, 0), half(0, 0)),
        7 => (half(0, -1), half(-1, 0)),
        8 => (half(-1, 0), half(0, -1)),
        9 => (half(0, 0), half(-2, 0)),
        10 => (half(1, 0), half(0, -1)),
        _ => (half(0, 1), half(-1, 0)),
    }
}

/// Can some sub-multiset of `angles` sum to `target`?
fn subset_sum(angles: &[u8], target: u32) -> bool {
    let target = target as usize;
    let mut reachable = vec![false; target + 1];
    reachable[0] = true;
    for &a in angles {
        let a = a as usize;
        if a > target {
            continue;
        }
        for s in (0..=target - a).rev() {
            if reachable[s] {
                reachable[s + a] = true;
            }
        }
    }
    reachable[target]
}

/// Screen which rotation orders a tiling by this tile could admit: order
/// k needs either corner angles filling 360/k degrees at a vertex-centered
/// rotation, or the polygon itself being k-fold symmetric.
pub fn rotation_feasibility(poly: &Polygon) -> BTreeSet<u32> {
    let mut feasible = BTreeSet::new();
    feasible.insert(1);
    let angles = corner_angles_30(poly);
    for k in [2u32, 3, 6] {
        let target = 12 / k;
        let by_corner = angles
            .as_ref()
            .map(|a| subset_sum(a, target))
            .unwrap_or(false);
        if by_corner || polygon_self_symmetric(poly, (6 / k) as i32) {
            feasible.insert(k);
        }
    }
    feasible
}

/// Is the polygon invariant under rotation by `k60` sixths of a turn
/// about its vertex mean?
fn polygon_self_symmetric(poly: &Polygon, k60: i32) -> bool {
    let center = poly.vertex_mean();
    let rot = crate::geometry::Isometry::rotation60_about(k60, &center);
    let rotated = rot.apply_polygon(poly);
    let mut a: Vec<&Point> = poly.vertices().iter().collect();
    let mut b: Vec<&Point> = rotated.vertices().iter().collect();
    let key = |p: &&Point| (p.x.clone(), p.y.clone());
    a.sort_by_key(key);
    b.sort_by_key(key);
    a == b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchStatus {
    Complete,
    Exhausted,
    Cutoff,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchResult {
    pub status: SearchStatus,
    pub completion: Option<Cotiler>,
    pub nodes: u64,
    pub max_depth: u32,
    /// Largest translation norm squared among cells the search ever
    /// covered; how far it reached.
    pub max_cell_norm2: i64,
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("partial placements overlap at {0}")]
    InvalidPartial(Symmetry),
    #[error("placement references unknown tile {0}")]
    UnknownTile(String),
}

/// How the next cell to cover is chosen. Lexicographic choice is the
/// reproducible default; the constrained strategy follows forced moves
/// first and prunes much harder on aperiodic tilesets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frontier {
    LexLeast,
    MostConstrained,
}

pub struct SearchConfig {
    pub budget: u64,
    pub frontier: Frontier,
}

/// Depth-first exact-cover search: extend `partial` with tile placements
/// until the window is covered. Placements are kept globally
/// interior-disjoint (also outside the window). Deterministic for fixed
/// inputs.
pub fn extend_search(
    tiles: &TileSet,
    window: &BTreeSet<Symmetry>,
    partial: &Cotiler,
    budget: u64,
) -> Result<SearchResult, SearchError> {
    extend_search_with(
        tiles,
        window,
        partial,
        &SearchConfig {
            budget,
            frontier: Frontier::LexLeast,
        },
    )
}

struct SearchState<'a> {
    tiles: Vec<(&'a String, Vec<Symmetry>)>,
    occupied: HashSet<Symmetry>,
    remaining: BTreeSet<Symmetry>,
    chosen: Vec<(Symmetry, String)>,
    nodes: u64,
    budget: u64,
    max_depth: u32,
    max_cell_norm2: i64,
    frontier: Frontier,
    neighbour_gens: Vec<Symmetry>,
}

enum Outcome {
    Complete,
    Exhausted,
    Cutoff,
}

pub fn extend_search_with(
    tiles: &TileSet,
    window: &BTreeSet<Symmetry>,
    partial: &Cotiler,
    config: &SearchConfig,
) -> Result<SearchResult, SearchError> {
    let tile_list: Vec<(&String, Vec<Symmetry>)> = tiles
        .tiles
        .iter()
        .map(|(name, t)| (name, t.cells.iter().copied().collect()))
        .collect();
    let mut occupied: HashSet<Symmetry> = HashSet::new();
    for (g, name) in &partial.placements {
        let tile = tiles
            .tiles
            .get(name)
            .ok_or_else(|| SearchError::UnknownTile(name.clone()))?;
        for c in &tile.cells {
            let h = g.mul(c);
            if !occupied.insert(h) {
                return Err(SearchError::InvalidPartial(h));
            }
        }
    }
    let remaining: BTreeSet<Symmetry> = window
        .iter()
        .filter(|g| !occupied.contains(g))
        .copied()
        .collect();
    let kind = tiles.kind;
    let mut state = SearchState {
        tiles: tile_list,
        occupied,
        remaining,
        chosen: Vec::new(),
        nodes: 0,
        budget: config.budget,
        max_depth: 0,
        max_cell_norm2: 0,
        frontier: config.frontier,
        neighbour_gens: grid::adjacency_generators(kind),
    };
    let outcome = dfs(&mut state);
    let status = match outcome {
        Outcome::Complete => SearchStatus::Complete,
        Outcome::Exhausted => SearchStatus::Exhausted,
        Outcome::Cutoff => SearchStatus::Cutoff,
    };
    let completion = if matches!(status, SearchStatus::Complete) {
        let mut full = partial.clone();
        for (g, name) in &state.chosen {
            full.insert(*g, name);
        }
        Some(full)
    } else {
        None
    };
    Ok(SearchResult {
        status,
        completion,
        nodes: state.nodes,
        max_depth: state.max_depth,
        max_cell_norm2: state.max_cell_norm2,
    })
}

/// Placements of any tile that cover `f` and fit the current occupancy.
fn legal_placements_at(state: &SearchState, f: &Symmetry) -> Vec<(Symmetry, usize)> {
    let mut out = Vec::new();
    for (ti, (_, cells)) in state.tiles.iter().enumerate() {
        for c in cells {
            let g = f.mul(&c.inverse());
            let fits = cells.iter().all(|c2| !state.occupied.contains(&g.mul(c2)));
            if fits {
                out.push((g, ti));
            }
        }
    }
    out
}

/// Count placements covering `f`, stopping at `cap`.
fn count_placements_at(state: &SearchState, f: &Symmetry, cap: usize) -> usize {
    let mut count = 0;
    for (_, cells) in &state.tiles {
        for c in cells {
            let g = f.mul(&c.inverse());
            if cells.iter().all(|c2| !state.occupied.contains(&g.mul(c2))) {
                count += 1;
                if count >= cap {
                    return count;
                }
            }
        }
    }
    count
}

enum CellChoice {
    Forced(Symmetry),
    Dead,
    Branch(Symmetry),
}

/// Pick the next cell: any dead or forced cell first, otherwise the most
/// constrained cell on the occupancy boundary. Any uncovered cell is a
/// sound branch point, so the boundary restriction is only a heuristic.
fn choose_cell(state: &SearchState) -> CellChoice {
    let first = *state.remaining.iter().next().expect("nonempty");
    if state.frontier == Frontier::LexLeast {
        return CellChoice::Branch(first);
    }
    let mut best: Option<(usize, Symmetry)> = None;
    for cell in &state.remaining {
        let boundary = state
            .neighbour_gens
            .iter()
            .any(|s| state.occupied.contains(&cell.mul(s)));
        if !boundary {
            continue;
        }
        match count_placements_at(state, cell, 2) {
            0 => return CellChoice::Dead,
            1 => return CellChoice::Forced(*cell),
            count => {
                if best.map_or(true, |(c, _)| count < c) {
                    best = Some((count, *cell));
                }
            }
        }
    }
    CellChoice::Branch(best.map(|(_, c)| c).unwrap_or(first))
}

/// Apply one placement; returns the data needed to undo it.
fn place(state: &mut SearchState, g: Symmetry, ti: usize) -> (Vec<Symmetry>, Vec<Symmetry>) {
    let cells: Vec<Symmetry> = state.tiles[ti].1.iter().map(|c| g.mul(c)).collect();
    let mut removed = Vec::new();
    for h in &cells {
        state.occupied.insert(*h);
        state.max_cell_norm2 = state.max_cell_norm2.max(h.translation_norm2());
        if state.remaining.remove(h) {
            removed.push(*h);
        }
    }
    let name = state.tiles[ti].0.clone();
    state.chosen.push((g, name));
    state.max_depth = state.max_depth.max(state.chosen.len() as u32);
    (cells, removed)
}

fn unplace(state: &mut SearchState, undo: (Vec<Symmetry>, Vec<Symmetry>)) {
    state.chosen.pop();
    for h in &undo.0 {
        state.occupied.remove(h);
    }
    for h in undo.1 {
        state.remaining.insert(h);
    }
}

fn dfs(state: &mut SearchState) -> Outcome {
    // forced-move propagation: placing unique covers early surfaces
    // contradictions long before blind branching would
    let mut trail = Vec::new();
    let branch_cell = loop {
        if state.remaining.is_empty() {
            return Outcome::Complete;
        }
        match choose_cell(state) {
            CellChoice::Dead => {
                for undo in trail.into_iter().rev() {
                    unplace(state, undo);
                }
                return Outcome::Exhausted;
            }
            CellChoice::Forced(f) => {
                let mut cands = legal_placements_at(state, &f);
                let (g, ti) = cands.pop().expect("forced cell has one placement");
                trail.push(place(state, g, ti));
            }
            CellChoice::Branch(f) => break f,
        }
    };
    let candidates = legal_placements_at(state, &branch_cell);
    for (g, ti) in candidates {
        if state.nodes >= state.budget {
            return Outcome::Cutoff;
        }
        state.nodes += 1;
        let undo = place(state, g, ti);
        match dfs(state) {
            Outcome::Complete => return Outcome::Complete,
            Outcome::Cutoff => return Outcome::Cutoff,
            Outcome::Exhausted => unplace(state, undo),
        }
    }
    for undo in trail.into_iter().rev() {
        unplace(state, undo);
    }
    Outcome::Exhausted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CellKind, GridRegion};
    use crate::group::{BETA, IDENTITY, R6, T1, T2};
    use crate::hats::{gat_cells, hat_polygon};

    fn grid_patch(radius: i64) -> WindowPatch {
        let mut tiles = TileSet::new(CellKind::Semikite);
        tiles.add_tile("cell", [IDENTITY]).unwrap();
        let window = GridRegion::ball(CellKind::Semikite, radius).cells;
        let mut placements = Cotiler::new();
        for g in &window {
            placements.insert(*g, "cell");
        }
        WindowPatch::new(tiles, placements, window).unwrap()
    }

    #[test]
    fn grid_patch_stabilizer_contains_the_point_group() {
        let patch = grid_patch(6);
        let report = patch_stabilizer(&patch, None);
        let found: BTreeSet<Symmetry> = report.elements.iter().map(|(h, _)| *h).collect();
        assert!(found.contains(&R6));
        assert!(found.contains(&BETA));
        assert!(found.contains(&T1));
        // the window chunk of the full grid's symmetry group is not
        // closed under products that overshoot the window
    }

    #[test]
    fn grid_patch_has_lattice_periods() {
        let patch = grid_patch(8);
        let periods = find_translation_periods(&patch, 8);
        assert!(periods.contains(&T1));
        assert!(periods.contains(&T2));
        assert!(!periods.is_empty());
    }

    #[test]
    fn single_tile_patch_has_trivial_stabilizer() {
        let mut tiles = TileSet::new(CellKind::Semikite);
        tiles.add_tile("gat", gat_cells()).unwrap();
        let mut placements = Cotiler::new();
        placements.insert(IDENTITY, "gat");
        let window: BTreeSet<Symmetry> = gat_cells().into_iter().collect();
        let patch = WindowPatch::new(tiles, placements, window).unwrap();
        let report = patch_stabilizer(&patch, None);
        assert_eq!(report.elements.len(), 1);
        assert!(report.elements[0].0.is_identity());
        assert_eq!(report.conjugacy_note, "trivial");
        assert!(find_translation_periods(&patch, 6).is_empty());
    }

    #[test]
    fn hat_rotation_screening_rules_out_order_six() {
        let feasible = rotation_feasibility(&hat_polygon());
        assert!(!feasible.contains(&6));
        assert!(feasible.contains(&3));
        assert!(feasible.contains(&2));
    }

    #[test]
    fn kite_and_hexagon_allow_order_six() {
        let kite = crate::grid::base_polygon(CellKind::Kite);
        assert!(rotation_feasibility(&kite).contains(&6));
        let hexagon = crate::grid::geo(&GridRegion::from_cells(
            CellKind::Kite,
            (0..6).map(|k| R6.pow(k)),
        ))
        .pop()
        .unwrap();
        assert!(rotation_feasibility(&hexagon).contains(&6));
    }

    #[test]
    fn search_completes_trivial_cover() {
        let mut tiles = TileSet::new(CellKind::Semikite);
        tiles.add_tile("kite-pair", [IDENTITY, BETA]).unwrap();
        let window = GridRegion::ball(CellKind::Semikite, 4).cells;
        let result = extend_search(&tiles, &window, &Cotiler::new(), 100_000).unwrap();
        assert_eq!(result.status, SearchStatus::Complete);
        let completion = result.completion.unwrap();
        let report = verify_exact_cover(&tiles, &completion, &window).unwrap();
        assert!(report.verdict);
    }

    #[test]
    fn search_rejects_overlapping_partial() {
        let mut tiles = TileSet::new(CellKind::Semikite);
        tiles.add_tile("gat", gat_cells()).unwrap();
        let mut partial = Cotiler::new();
        partial.insert(IDENTITY, "gat");
        let mut tiles2 = tiles.clone();
        tiles2.add_tile("gat2", gat_cells()).unwrap();
        partial.insert(IDENTITY, "gat2");
        let window = GridRegion::ball(CellKind::Semikite, 3).cells;
        assert!(matches!(
            extend_search(&tiles2, &window, &partial, 100).unwrap_err(),
            SearchError::InvalidPartial(_)
        ));
    }

    #[test]
    fn search_respects_budget() {
        let mut tiles = TileSet::new(CellKind::Semikite);
        tiles.add_tile("gat", gat_cells()).unwrap();
        let window = GridRegion::ball(CellKind::Semikite, 8).cells;
        let result = extend_search(&tiles, &window, &Cotiler::new(), 5).unwrap();
        assert!(matches!(
            result.status,
            SearchStatus::Cutoff | SearchStatus::Complete
        ));
        assert!(result.nodes <= 5);
    }

    #[test]
    fn gat_search_completes_a_small_ball() {
        let mut tiles = TileSet::new(CellKind::Semikite);
        tiles.add_tile("gat", gat_cells()).unwrap();
        let window = GridRegion::ball(CellKind::Semikite, 3).cells;
        let config = SearchConfig {
            budget: 2_000_000,
            frontier: Frontier::MostConstrained,
        };
        let result = extend_search_with(&tiles, &window, &Cotiler::new(), &config).unwrap();
        assert_eq!(result.status, SearchStatus::Complete);
        let completion = result.completion.unwrap();
        let report = verify_exact_cover(&tiles, &completion, &window).unwrap();
        assert!(report.verdict);
    }
}
