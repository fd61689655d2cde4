//! The hat polykite and its two discretizations: the 8 kite cells over the
//! orientation preserving subgroup and the 16 semikite cells over the full
//! group (the group monotile).

use crate::geometry::Polygon;
use crate::grid::{geo, CellKind, GridRegion};
use crate::group::{eval_word, Symmetry, BETA, R3, R6};

/// The 8 kite cells of the hat.
pub fn hat_kite_cells() -> Vec<Symmetry> {
    let r6i = R6.inverse();
    let mut cells = vec![
        Symmetry::translation(0, 0),
        R6,
        r6i,
        r6i.mul(&r6i),
        R3,
        R3.mul(&R3),
        R3.mul(&r6i),
        R3.mul(&R3).mul(&r6i),
    ];
    cells.sort();
    cells
}

/// The 16 semikite cells of the hat, as words in the reflection
/// generators.
pub const GAT_WORDS: [&str; 16] = [
    "", "a", "b", "g", "a.b", "b.a", "b.g", "g.b", "a.b.a", "b.a.b", "b.a.g", "b.g.b", "g.b.a",
    "a.b.a.b", "b.a.g.b", "g.b.a.b",
];

pub fn gat_cells() -> Vec<Symmetry> {
    let mut cells: Vec<Symmetry> = GAT_WORDS
        .iter()
        .map(|w| eval_word(w).expect("fixed word list"))
        .collect();
    cells.sort();
    cells
}

pub fn hat_region(kind: CellKind) -> GridRegion {
    match kind {
        CellKind::Kite => GridRegion::from_cells(kind, hat_kite_cells()),
        CellKind::Semikite => GridRegion::from_cells(kind, gat_cells()),
    }
}

/// The hat as a single polygon (13 vertices: 6 edges of length sqrt(3),
/// 6 of length 1 and 1 of length 2).
pub fn hat_polygon() -> Polygon {
    let mut loops = geo(&hat_region(CellKind::Kite));
    assert_eq!(loops.len(), 1, "the hat is simply connected");
    loops.pop().unwrap()
}

/// Kite cells of the mirrored hat, normalized back into the orientation
/// preserving index set (conjugation by the mirror).
pub fn mirrored_hat_kite_cells() -> Vec<Symmetry> {
    GridRegion::from_cells(
        CellKind::Kite,
        hat_kite_cells().iter().map(|c| BETA.mul(c)),
    )
    .cells
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::grp;
    use crate::scalar::QS3;

    #[test]
    fn gat_is_the_kite_set_with_both_halves() {
        let gat = gat_cells();
        assert_eq!(gat.len(), 16);
        let mut expect: Vec<Symmetry> = hat_kite_cells()
            .iter()
            .flat_map(|k| [*k, k.mul(&BETA)])
            .collect();
        expect.sort();
        assert_eq!(gat, expect);
    }

    #[test]
    fn hat_polygon_has_the_advertised_boundary() {
        let hat = hat_polygon();
        assert_eq!(hat.area(), QS3::from_parts(0, 1, 8, 1));
        let vs = hat.vertices();
        assert_eq!(vs.len(), 13);
        let mut by_len2 = std::collections::BTreeMap::new();
        for (a, b) in hat.edges() {
            let dx = &b.x - &a.x;
            let dy = &b.y - &a.y;
            let len2 = &dx * &dx + &dy * &dy;
            // lengths squared are small integers here
            let key = format!("{:?}", len2);
            *by_len2.entry(key).or_insert(0u32) += 1;
        }
        let census: Vec<(String, u32)> = by_len2.into_iter().collect();
        // 1 edge of length 2, 6 of length 1, 6 of length sqrt(3)
        assert_eq!(
            census,
            vec![
                ("1".to_string(), 6),
                ("3".to_string(), 6),
                ("4".to_string(), 1)
            ]
        );
    }

    #[test]
    fn grp_recovers_both_hat_discretizations() {
        let hat = hat_polygon();
        let kite_set = grp(&hat, CellKind::Kite).unwrap();
        assert_eq!(
            kite_set.cells.iter().copied().collect::<Vec<_>>(),
            hat_kite_cells()
        );
        let semikite_set = grp(&hat, CellKind::Semikite).unwrap();
        assert_eq!(
            semikite_set.cells.iter().copied().collect::<Vec<_>>(),
            gat_cells()
        );
    }

    #[test]
    fn mirrored_hat_is_distinct_as_a_kite_set() {
        let hat = hat_kite_cells();
        let mirrored = mirrored_hat_kite_cells();
        assert_eq!(mirrored.len(), 8);
        assert_ne!(hat, mirrored);
    }
}
