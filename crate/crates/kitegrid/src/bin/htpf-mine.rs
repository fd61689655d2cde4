//! Reconstruction tool for the HTPF substitution rule data: searches a
//! large hat patch, clusters it into metatiles, identifies supertiles,
//! and emits the rule file. The shipped rule data is regenerated (and
//! cross-checked) by this tool.

use kitegrid::analysis::{extend_search_with, Frontier, SearchConfig, SearchStatus};
use kitegrid::discretize::{Cotiler, TileSet};
use kitegrid::grid::{self, CellKind, GridRegion};
use kitegrid::group::{self, Symmetry};
use kitegrid::hats::{hat_kite_cells, mirrored_hat_kite_cells};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

fn arg_val(args: &[String], name: &str) -> Option<String> {
    args.iter()
        .position(|a| a == name)
        .and_then(|i| args.get(i + 1))
        .cloned()
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    match args.get(1).map(String::as_str) {
        Some("search") => search_cmd(&args),
        Some("cluster") => cluster_cmd(&args),
        Some("compose") => compose_cmd(&args),
        Some("leftover") => leftover_cmd(&args),
        Some("motifs") => motifs_cmd(&args),
        Some("partition") => partition_cmd(&args),
        Some("hierarchy") => hierarchy_cmd(&args),
        Some("fylfot") => fylfot_cmd(&args),
        Some("labels") => labels_cmd(&args),
        Some("forced") => forced_cmd(&args),
        Some("reseed") => reseed_cmd(&args),
        _ => {
            eprintln!(
                "usage: htpf-mine search|cluster|compose [--radius N] [--budget N] [--in F] [--out F]"
            );
            std::process::exit(2);
        }
    }
}

/// The fixed relative placement of the second hat in a 2-hat cluster.
const PAIR_REL: Symmetry = Symmetry::new(-1, 1, 5, false);

/// H-partner placements relative to the reflected hat.
const H_PARTNER_RELS: [Symmetry; 3] = [
    Symmetry::new(1, -1, 0, false),
    Symmetry::new(0, -1, 2, false),
    Symmetry::new(1, 0, 2, false),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum ClusterKind {
    H,
    T,
    D,
}

struct Cluster {
    frame: Symmetry,
    kind: ClusterKind,
    members: Vec<usize>,
    complete: bool,
}

struct MetaPatchRaw {
    clusters: Vec<Cluster>,
    cluster_of_hat: Vec<usize>,
}

/// Partition a hat patch into metatile clusters: each reflected hat plus
/// its three fixed partners is an H; remaining hats pair across PAIR_REL
/// into 2-hat clusters, the rest are single-hat T clusters. A cluster is
/// complete when all expected members are present and interior.
fn cluster_to_metatiles(patch: &Patch) -> MetaPatchRaw {
    let n = patch.hats.len();
    let place_of: HashMap<Symmetry, usize> = patch
        .hats
        .iter()
        .enumerate()
        .map(|(i, (g, _))| (*g, i))
        .collect();
    let mut cluster_of_hat = vec![usize::MAX; n];
    let mut clusters = Vec::new();
    // H clusters, anchored at reflected hats
    for (i, (g, refl)) in patch.hats.iter().enumerate() {
        if !refl {
            continue;
        }
        let cid = clusters.len();
        let mut members = vec![i];
        let mut complete = patch.interior[i];
        cluster_of_hat[i] = cid;
        for r in H_PARTNER_RELS {
            let partner_place = g.mul(&r);
            match place_of.get(&partner_place) {
                Some(&j) if !patch.hats[j].1 => {
                    assert_eq!(cluster_of_hat[j], usize::MAX, "H partner claimed twice");
                    cluster_of_hat[j] = cid;
                    members.push(j);
                }
                _ => complete = false,
            }
        }
        clusters.push(Cluster {
            frame: *g,
            kind: ClusterKind::H,
            members,
            complete,
        });
    }
    // 2-hat clusters across the fixed pair relation; a hat never has
    // mates in both directions, so pairing is unambiguous
    let remainder: HashSet<usize> = (0..n)
        .filter(|&i| !patch.hats[i].1 && cluster_of_hat[i] == usize::MAX)
        .collect();
    let mate = |g: &Symmetry, r: &Symmetry| {
        place_of
            .get(&g.mul(r))
            .copied()
            .filter(|j| remainder.contains(j))
    };
    for i in 0..n {
        if !remainder.contains(&i) || cluster_of_hat[i] != usize::MAX {
            continue;
        }
        let g = patch.hats[i].0;
        let fwd = mate(&g, &PAIR_REL);
        let bwd = mate(&g, &PAIR_REL.inverse());
        assert!(fwd.is_none() || bwd.is_none(), "pair chain at {}", g);
        if let Some(j) = fwd {
            assert_eq!(cluster_of_hat[j], usize::MAX, "mate already paired");
            let cid = clusters.len();
            cluster_of_hat[i] = cid;
            cluster_of_hat[j] = cid;
            clusters.push(Cluster {
                frame: g,
                kind: ClusterKind::D,
                members: vec![i, j],
                complete: patch.interior[i] && patch.interior[j],
            });
        }
    }
    // single-hat clusters
    for i in 0..n {
        if cluster_of_hat[i] != usize::MAX || patch.hats[i].1 {
            continue;
        }
        let cid = clusters.len();
        cluster_of_hat[i] = cid;
        clusters.push(Cluster {
            frame: patch.hats[i].0,
            kind: ClusterKind::T,
            members: vec![i],
            complete: patch.interior[i],
        });
    }
    MetaPatchRaw {
        clusters,
        cluster_of_hat,
    }
}

fn hat_tileset() -> TileSet {
    let mut tiles = TileSet::new(CellKind::Kite);
    tiles.add_tile("hat", hat_kite_cells()).unwrap();
    tiles.add_tile("mhat", mirrored_hat_kite_cells()).unwrap();
    tiles
}

fn search_cmd(args: &[String]) {
    let radius: i64 = arg_val(args, "--radius").and_then(|v| v.parse().ok()).unwrap_or(12);
    let budget: u64 = arg_val(args, "--budget")
        .and_then(|v| v.parse().ok())
        .unwrap_or(500_000_000);
    let tiles = hat_tileset();
    let partial: Cotiler = match arg_val(args, "--in") {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap(),
        None => Cotiler::new(),
    };
    let window: BTreeSet<Symmetry> = GridRegion::ball(CellKind::Kite, radius).cells;
    eprintln!(
        "window: {} kite cells (radius {radius}), partial {} placements",
        window.len(),
        partial.placements.len()
    );
    let start = std::time::Instant::now();
    let config = SearchConfig {
        budget,
        frontier: Frontier::MostConstrained,
    };
    let result = extend_search_with(&tiles, &window, &partial, &config).unwrap();
    eprintln!(
        "status {:?}, nodes {}, depth {}, elapsed {:.1?}",
        result.status,
        result.nodes,
        result.max_depth,
        start.elapsed()
    );
    if result.status != SearchStatus::Complete {
        std::process::exit(1);
    }
    let completion = result.completion.unwrap();
    let hats = completion.placements.iter().filter(|(_, n)| n == "hat").count();
    eprintln!(
        "hats: {} unreflected + {} reflected",
        hats,
        completion.placements.len() - hats
    );
    if let Some(path) = arg_val(args, "--out") {
        std::fs::write(&path, serde_json::to_string(&completion).unwrap()).unwrap();
        eprintln!("wrote {path}");
    }
}

struct Patch {
    /// (placement, reflected?) per hat
    hats: Vec<(Symmetry, bool)>,
    /// kite cell -> hat index
    cell_owner: HashMap<Symmetry, usize>,
    /// hats all of whose neighbouring cells are covered
    interior: Vec<bool>,
}

fn load_patch(path: &str) -> Patch {
    let cotiler: Cotiler = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let hat = hat_kite_cells();
    let mhat = mirrored_hat_kite_cells();
    let mut hats = Vec::new();
    let mut cell_owner = HashMap::new();
    for (g, name) in &cotiler.placements {
        let reflected = name == "mhat";
        let idx = hats.len();
        hats.push((*g, reflected));
        let cells = if reflected { &mhat } else { &hat };
        for c in cells {
            cell_owner.insert(g.mul(c), idx);
        }
    }
    let gens = grid::adjacency_generators(CellKind::Kite);
    let interior = hats
        .iter()
        .enumerate()
        .map(|(idx, _)| {
            hat_cells_of(&hats, idx)
                .iter()
                .all(|c| gens.iter().all(|s| cell_owner.contains_key(&c.mul(s))))
        })
        .collect();
    Patch {
        hats,
        cell_owner,
        interior,
    }
}

fn hat_cells_of(hats: &[(Symmetry, bool)], idx: usize) -> Vec<Symmetry> {
    let (g, reflected) = hats[idx];
    let base = if reflected {
        mirrored_hat_kite_cells()
    } else {
        hat_kite_cells()
    };
    base.iter().map(|c| g.mul(c)).collect()
}

/// Shared-edge counts between each hat and its neighbours.
fn neighbour_contacts(patch: &Patch) -> Vec<BTreeMap<usize, u32>> {
    let gens = grid::adjacency_generators(CellKind::Kite);
    let mut contacts: Vec<BTreeMap<usize, u32>> = vec![BTreeMap::new(); patch.hats.len()];
    for idx in 0..patch.hats.len() {
        for c in hat_cells_of(&patch.hats, idx) {
            for s in &gens {
                if let Some(&other) = patch.cell_owner.get(&c.mul(s)) {
                    if other != idx {
                        *contacts[idx].entry(other).or_insert(0) += 1;
                    }
                }
            }
        }
    }
    contacts
}

/// Relative placement of hat `b` in the frame of hat `a`.
fn rel(patch: &Patch, a: usize, b: usize) -> (Symmetry, bool) {
    let (ga, _) = patch.hats[a];
    let (gb, rb) = patch.hats[b];
    (ga.inverse().mul(&gb), rb)
}

fn cluster_cmd(args: &[String]) {
    let path = arg_val(args, "--in").expect("--in patch.json");
    let patch = load_patch(&path);
    let contacts = neighbour_contacts(&patch);
    let n_refl = patch.hats.iter().filter(|(_, r)| *r).count();
    let n_int_refl = patch
        .hats
        .iter()
        .enumerate()
        .filter(|(i, (_, r))| *r && patch.interior[*i])
        .count();
    eprintln!(
        "{} hats ({} reflected, {} interior reflected)",
        patch.hats.len(),
        n_refl,
        n_int_refl
    );

    // neighbourhood census around interior reflected hats: which relative
    // placements appear, and with how much shared boundary
    let mut census: BTreeMap<(String, bool, u32), u32> = BTreeMap::new();
    let mut per_hat_rels: Vec<BTreeSet<(Symmetry, bool, u32)>> = Vec::new();
    for (i, (_, refl)) in patch.hats.iter().enumerate() {
        if !refl || !patch.interior[i] {
            continue;
        }
        let mut rels = BTreeSet::new();
        for (&j, &cnt) in &contacts[i] {
            let (r, rb) = rel(&patch, i, j);
            rels.insert((r, rb, cnt));
            *census.entry((r.to_string(), rb, cnt)).or_insert(0) += 1;
        }
        per_hat_rels.push(rels);
    }
    eprintln!("-- neighbour census over {} interior reflected hats --", per_hat_rels.len());
    for ((r, rb, cnt), freq) in &census {
        eprintln!("  rel {} refl={} contact={}  x{}", r, rb, cnt, freq);
    }

    // relative placements common to every interior reflected hat
    if let Some(first) = per_hat_rels.first() {
        let mut common: BTreeSet<(Symmetry, bool, u32)> = first.clone();
        for rels in &per_hat_rels[1..] {
            common = common.intersection(rels).cloned().collect();
        }
        eprintln!("-- common to all --");
        for (r, rb, cnt) in &common {
            eprintln!("  rel {} refl={} contact={}", r, rb, cnt);
        }
    }

    // contact-count distribution among unreflected-unreflected neighbours
    let mut unrefl_census: BTreeMap<u32, u32> = BTreeMap::new();
    for (i, (_, refl)) in patch.hats.iter().enumerate() {
        if *refl || !patch.interior[i] {
            continue;
        }
        for (&j, &cnt) in &contacts[i] {
            if !patch.hats[j].1 {
                *unrefl_census.entry(cnt).or_insert(0) += 1;
            }
        }
    }
    eprintln!("-- unreflected/unreflected contact sizes --");
    for (cnt, freq) in &unrefl_census {
        eprintln!("  contact={cnt}  x{freq}");
    }

    // H clusters: each reflected hat plus its contact-4 neighbours
    let mut member_of_h: Vec<Option<usize>> = vec![None; patch.hats.len()];
    let mut h_count = 0;
    for (i, (_, refl)) in patch.hats.iter().enumerate() {
        if !refl {
            continue;
        }
        member_of_h[i] = Some(i);
        for (&j, &cnt) in &contacts[i] {
            if cnt == 4 {
                if let Some(prev) = member_of_h[j] {
                    eprintln!("CLASH: hat {j} in H of both {prev} and {i}");
                }
                member_of_h[j] = Some(i);
            }
        }
        h_count += 1;
    }
    let h_sizes: BTreeMap<usize, usize> = {
        let mut m = BTreeMap::new();
        for owner in member_of_h.iter().flatten() {
            *m.entry(*owner).or_insert(0) += 1;
        }
        m.values().fold(BTreeMap::new(), |mut acc, &v| {
            *acc.entry(v).or_insert(0) += 1;
            acc
        })
    };
    eprintln!("-- {} H clusters, size histogram {:?} --", h_count, h_sizes);

    // remainder: contact census and matching structure
    let remainder: Vec<usize> = (0..patch.hats.len())
        .filter(|&i| member_of_h[i].is_none())
        .collect();
    let rem_set: HashSet<usize> = remainder.iter().copied().collect();
    let mut deg3: BTreeMap<usize, u32> = BTreeMap::new();
    let mut pair_rels: BTreeMap<String, u32> = BTreeMap::new();
    for &i in &remainder {
        if !patch.interior[i] {
            continue;
        }
        let mates: Vec<usize> = contacts[i]
            .iter()
            .filter(|(j, &cnt)| rem_set.contains(j) && cnt >= 3)
            .map(|(&j, _)| j)
            .collect();
        *deg3.entry(mates.len()).or_insert(0) += 1;
        for j in mates {
            let (r, _) = rel(&patch, i, j);
            let rr = r.inverse();
            let canon = if r <= rr { r } else { rr };
            *pair_rels.entry(canon.to_string()).or_insert(0) += 1;
        }
    }
    eprintln!("-- remainder contact>=3 degree histogram {:?} --", deg3);
    eprintln!("-- remainder pair rel classes --");
    for (r, freq) in &pair_rels {
        eprintln!("  {}  x{}", r, freq);
    }
}

/// Adjacency between clusters via shared kite edges.
fn cluster_contacts(patch: &Patch, meta: &MetaPatchRaw) -> Vec<BTreeSet<usize>> {
    let gens = grid::adjacency_generators(CellKind::Kite);
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); meta.clusters.len()];
    for (cell, &hat) in &patch.cell_owner {
        let a = meta.cluster_of_hat[hat];
        for s in &gens {
            if let Some(&other_hat) = patch.cell_owner.get(&cell.mul(s)) {
                let b = meta.cluster_of_hat[other_hat];
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    }
    adj
}

fn compose_cmd(args: &[String]) {
    let ring_n: usize = arg_val(args, "--ring").map(|s| s.parse().unwrap()).unwrap_or(3);
    let margin: f64 = arg_val(args, "--margin").map(|s| s.parse().unwrap()).unwrap_or(14.0);
    let paths: Vec<String> = {
        let mut v = Vec::new();
        let mut it = args.iter().peekable();
        while let Some(a) = it.next() {
            if a == "--in" {
                v.push(it.next().expect("--in path").clone());
            }
        }
        v
    };
    assert!(!paths.is_empty(), "--in patch.json required");

    struct View {
        meta: MetaPatchRaw,
        frame_of: BTreeMap<Symmetry, usize>,
        anchors: Vec<usize>,
        deep_limit: f64,
    }
    let mut views = Vec::new();
    let mut candidates: BTreeSet<(Symmetry, ClusterKind)> = BTreeSet::new();
    for path in &paths {
        let patch = load_patch(path);
        let meta = cluster_to_metatiles(&patch);
        let mut counts: BTreeMap<(ClusterKind, bool), u32> = BTreeMap::new();
        for c in &meta.clusters {
            *counts.entry((c.kind, c.complete)).or_insert(0) += 1;
        }
        eprintln!("{}: clusters {:?}", path, counts);
        let adj = cluster_contacts(&patch, &meta);
        let window_r = patch
            .hats
            .iter()
            .map(|(g, _)| (g.translation_norm2() as f64).sqrt())
            .fold(0.0f64, f64::max);
        let deep_limit = window_r - margin;
        let mut anchors = Vec::new();
        for (ci, c) in meta.clusters.iter().enumerate() {
            if c.kind != ClusterKind::T || !c.complete {
                continue;
            }
            anchors.push(ci);
            let mut ring: BTreeSet<usize> = BTreeSet::new();
            ring.insert(ci);
            for _ in 0..ring_n {
                let current: Vec<usize> = ring.iter().copied().collect();
                for x in current {
                    ring.extend(adj[x].iter().copied());
                }
            }
            let inv = c.frame.inverse();
            for &x in &ring {
                candidates.insert((inv.mul(&meta.clusters[x].frame), meta.clusters[x].kind));
            }
        }
        let frame_of = meta
            .clusters
            .iter()
            .enumerate()
            .map(|(i, c)| (c.frame, i))
            .collect();
        views.push(View { meta, frame_of, anchors, deep_limit });
    }
    let n_anchors: usize = views.iter().map(|v| v.anchors.len()).sum();
    eprintln!("-- {} anchors, {} candidate rels --", n_anchors, candidates.len());

    // conditional presence: an anchor votes on a rel only when the
    // transported location sits deep inside its window; children score 1.0
    let mut stats: BTreeMap<(Symmetry, ClusterKind), (u32, u32, u32)> = BTreeMap::new();
    for v in &views {
        for &ai in &v.anchors {
            let anchor = v.meta.clusters[ai].frame;
            for (r, k) in &candidates {
                let loc = anchor.mul(r);
                if (loc.translation_norm2() as f64).sqrt() > v.deep_limit {
                    continue;
                }
                let e = stats.entry((*r, *k)).or_insert((0, 0, 0));
                e.0 += 1;
                match v.frame_of.get(&loc) {
                    Some(&ci) if v.meta.clusters[ci].kind == *k => e.1 += 1,
                    Some(_) => e.2 += 1,
                    None => {}
                }
            }
        }
    }
    let mut perfect: Vec<(Symmetry, ClusterKind)> = Vec::new();
    for ((r, k), (usable, present, kindflip)) in &stats {
        if *usable >= 3 && present == usable && *kindflip == 0 {
            perfect.push((*r, *k));
        }
    }
    eprintln!("-- rels with perfect conditional presence (>=3 usable) --");
    for (r, k) in &perfect {
        let (u, _, _) = stats[&(*r, *k)];
        eprintln!("  {:?} at {}  usable {}", k, r, u);
    }

    // peel context: children claim their cluster alone once every context
    // rel is gone, so repeatedly drop the rel with the worst collision
    // ratio until the remaining set is collision-free
    let mut active = perfect.clone();
    loop {
        let mut claims: BTreeMap<(usize, usize), Vec<Symmetry>> = BTreeMap::new();
        for (vi, v) in views.iter().enumerate() {
            for &ai in &v.anchors {
                let anchor = v.meta.clusters[ai].frame;
                for (r, k) in &active {
                    let loc = anchor.mul(r);
                    if let Some(&ci) = v.frame_of.get(&loc) {
                        if v.meta.clusters[ci].kind == *k {
                            claims.entry((vi, ci)).or_default().push(*r);
                        }
                    }
                }
            }
        }
        let mut solo: BTreeMap<Symmetry, u32> = BTreeMap::new();
        let mut coll: BTreeMap<Symmetry, u32> = BTreeMap::new();
        for (_, rs) in &claims {
            for r in rs {
                let m = if rs.len() >= 2 { &mut coll } else { &mut solo };
                *m.entry(*r).or_insert(0) += 1;
            }
        }
        let worst = active
            .iter()
            .filter_map(|(r, k)| {
                let c = coll.get(r).copied().unwrap_or(0);
                if c == 0 {
                    return None;
                }
                let s = solo.get(r).copied().unwrap_or(0);
                Some((s as f64 / (s + c) as f64, *r, *k))
            })
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        match worst {
            Some((ratio, r, k)) => {
                eprintln!("peel {:?} at {} (solo ratio {:.2})", k, r, ratio);
                active.retain(|(ar, ak)| !(*ar == r && *ak == k));
            }
            None => break,
        }
    }
    let mut kind_counts: BTreeMap<ClusterKind, u32> = BTreeMap::new();
    for (_, k) in &active {
        *kind_counts.entry(*k).or_insert(0) += 1;
    }
    eprintln!("-- collision-free child set: {} rels {:?} --", active.len(), kind_counts);
    for (r, k) in &active {
        eprintln!("  {:?} at {}", k, r);
    }
}

// candidate child set of the 4-hat supertile, relative to its single-hat
// child's frame; mined from the collision-free census, nearest 10 by
// translation norm with kind counts 3+1+6
const SUPER_H: [(i64, i64, u8, ClusterKind); 10] = [
    (-3, 1, 3, ClusterKind::D),
    (-2, 1, 5, ClusterKind::H),
    (-1, -2, 3, ClusterKind::D),
    (0, -2, 5, ClusterKind::H),
    (0, 0, 0, ClusterKind::T),
    (2, -4, 1, ClusterKind::D),
    (2, -1, 3, ClusterKind::H),
    (2, 1, 5, ClusterKind::D),
    (3, -2, 1, ClusterKind::D),
    (-3, -3, 2, ClusterKind::D),
];

fn leftover_cmd(args: &[String]) {
    let path = arg_val(args, "--in").expect("--in patch.json");
    let patch = load_patch(&path);
    let meta = cluster_to_metatiles(&patch);
    let frame_of: BTreeMap<Symmetry, usize> = meta
        .clusters
        .iter()
        .enumerate()
        .map(|(i, c)| (c.frame, i))
        .collect();
    // complete T anchors claim first and must never clash; boundary T's
    // (possibly fake, from broken clusters) only take what is free
    let mut owner: Vec<Option<usize>> = vec![None; meta.clusters.len()];
    let mut missing = 0u32;
    let mut clashes = 0u32;
    let mut t_anchors = 0u32;
    for pass in 0..2 {
        for (ci, c) in meta.clusters.iter().enumerate() {
            if c.kind != ClusterKind::T || c.complete != (pass == 0) {
                continue;
            }
            t_anchors += 1;
            for (tx, ty, rot, k) in SUPER_H {
                let loc = c.frame.mul(&Symmetry::new(tx, ty, rot, false));
                match frame_of.get(&loc) {
                    Some(&x) if meta.clusters[x].kind == k => {
                        if owner[x].is_none() {
                            owner[x] = Some(ci);
                        } else {
                            assert!(pass == 1, "complete anchors must not clash");
                            clashes += 1;
                        }
                    }
                    _ => missing += 1,
                }
            }
        }
    }
    eprintln!(
        "{} T anchors, {} child slots missing, {} boundary clashes",
        t_anchors, missing, clashes
    );
    let adj = cluster_contacts(&patch, &meta);
    let mut left_kinds: BTreeMap<(ClusterKind, bool), u32> = BTreeMap::new();
    let mut leftover: Vec<usize> = Vec::new();
    for (ci, c) in meta.clusters.iter().enumerate() {
        if owner[ci].is_none() {
            *left_kinds.entry((c.kind, c.complete)).or_insert(0) += 1;
            if c.complete && adj[ci].iter().all(|&x| meta.clusters[x].complete) {
                leftover.push(ci);
            }
        }
    }
    eprintln!("leftover kinds {:?} ({} deep)", left_kinds, leftover.len());

    // rel census between adjacent leftover clusters; rigid supertile
    // interiors show up as sharp repeated rel classes
    let leftset: BTreeSet<usize> = leftover.iter().copied().collect();
    let mut census: BTreeMap<(ClusterKind, ClusterKind, Symmetry), u32> = BTreeMap::new();
    for &a in &leftover {
        for &b in adj[a].iter() {
            if !leftset.contains(&b) {
                continue;
            }
            let ka = meta.clusters[a].kind;
            let kb = meta.clusters[b].kind;
            let rel = meta.clusters[a].frame.inverse().mul(&meta.clusters[b].frame);
            *census.entry((ka, kb, rel)).or_insert(0) += 1;
        }
    }
    let mut rows: Vec<(u32, ClusterKind, ClusterKind, Symmetry)> =
        census.into_iter().map(|((a, b, r), n)| (n, a, b, r)).collect();
    rows.sort_by(|x, y| y.0.cmp(&x.0));
    for (n, a, b, r) in rows.iter().take(30) {
        eprintln!("  {}x  {:?}->{:?} rel {}", n, a, b, r);
    }

    // walk each deep leftover cluster's incident edges restricted to the
    // high-frequency classes and print the local signature
    let internal: [(ClusterKind, ClusterKind, Symmetry, char); 7] = [
        (ClusterKind::H, ClusterKind::D, Symmetry::new(0, -2, 2, false), 'A'),
        (ClusterKind::H, ClusterKind::D, Symmetry::new(-1, 1, 4, false), 'B'),
        (ClusterKind::H, ClusterKind::D, Symmetry::new(-2, 0, 0, false), 'C'),
        (ClusterKind::D, ClusterKind::D, Symmetry::new(0, -2, 4, false), 'D'),
        (ClusterKind::D, ClusterKind::D, Symmetry::new(-2, 3, 3, false), 'E'),
        (ClusterKind::H, ClusterKind::D, Symmetry::new(3, -3, 5, false), 'F'),
        (ClusterKind::D, ClusterKind::D, Symmetry::new(-1, 2, 2, false), 'G'),
    ];
    let _ = &internal;
    // connected components of unclaimed clusters over full adjacency;
    // regions pinched between claimed supertile copies isolate single
    // copies of the 2-hat supertiles
    let claimed_or_missing: Vec<bool> = (0..meta.clusters.len())
        .map(|i| owner[i].is_some() || !meta.clusters[i].complete)
        .collect();
    let mut comp: Vec<Option<usize>> = vec![None; meta.clusters.len()];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for &seed in &leftover {
        if comp[seed].is_some() {
            continue;
        }
        let id = comps.len();
        let mut stack = vec![seed];
        let mut members = Vec::new();
        comp[seed] = Some(id);
        while let Some(ci) = stack.pop() {
            members.push(ci);
            for &x in adj[ci].iter() {
                if !claimed_or_missing[x] && comp[x].is_none() {
                    comp[x] = Some(id);
                    stack.push(x);
                }
            }
        }
        comps.push(members);
    }
    let mut shapes: BTreeMap<String, u32> = BTreeMap::new();
    for members in &comps {
        let base = members
            .iter()
            .filter(|&&x| meta.clusters[x].kind == ClusterKind::H)
            .map(|&x| meta.clusters[x].frame)
            .min();
        let desc = match base {
            Some(b) => {
                let inv = b.inverse();
                let rels: BTreeSet<String> = members
                    .iter()
                    .map(|&x| {
                        format!("{:?}@{}", meta.clusters[x].kind, inv.mul(&meta.clusters[x].frame))
                    })
                    .collect();
                rels.into_iter().collect::<Vec<_>>().join(" ")
            }
            None => format!("noH size {}", members.len()),
        };
        *shapes.entry(desc).or_insert(0) += 1;
    }
    eprintln!("-- {} components --", comps.len());
    for (desc, n) in &shapes {
        eprintln!("  {}x  {}", n, desc);
    }

    // the two H members of a 2-hat-supertile copy sit at a fixed rel;
    // census all leftover H pairs by rel to find the skeleton
    let h_left: Vec<usize> = leftover
        .iter()
        .copied()
        .filter(|&x| meta.clusters[x].kind == ClusterKind::H)
        .collect();
    let mut hh: BTreeMap<Symmetry, u32> = BTreeMap::new();
    for &a in &h_left {
        for &b in &h_left {
            if a == b {
                continue;
            }
            let rel = meta.clusters[a].frame.inverse().mul(&meta.clusters[b].frame);
            if rel.translation_norm2() <= 600 {
                *hh.entry(rel).or_insert(0) += 1;
            }
        }
    }
    let mut hh_rows: Vec<(u32, Symmetry)> = hh.into_iter().map(|(r, n)| (n, r)).collect();
    hh_rows.sort_by(|x, y| y.0.cmp(&x.0));
    eprintln!("-- leftover H-H rel census --");
    for (n, r) in hh_rows.iter().take(8) {
        eprintln!("  {}x  {}", n, r);
    }

    // anchor on H pairs at the winning rel and measure conditional D-slot
    // presence around the first H
    let skel = hh_rows[0].1;
    let mut pair_anchors: Vec<Symmetry> = Vec::new();
    let h_frames: BTreeSet<Symmetry> =
        h_left.iter().map(|&x| meta.clusters[x].frame).collect();
    for &a in &h_left {
        let f = meta.clusters[a].frame;
        if h_frames.contains(&f.mul(&skel)) {
            pair_anchors.push(f);
        }
    }
    eprintln!("-- {} H-pair anchors at skeleton rel {} --", pair_anchors.len(), skel);
    let window_r = patch
        .hats
        .iter()
        .map(|(g, _)| (g.translation_norm2() as f64).sqrt())
        .fold(0.0f64, f64::max);
    let deep_limit = window_r - 14.0;
    let mut slots: BTreeMap<Symmetry, (u32, u32)> = BTreeMap::new();
    let left_frames: BTreeMap<Symmetry, ClusterKind> = leftover
        .iter()
        .map(|&x| (meta.clusters[x].frame, meta.clusters[x].kind))
        .collect();
    let candidate_slots: BTreeSet<Symmetry> = pair_anchors
        .iter()
        .flat_map(|f| {
            let inv = f.inverse();
            left_frames
                .iter()
                .filter(|(_, &k)| k == ClusterKind::D)
                .map(move |(g, _)| inv.mul(g))
                .filter(|r| r.translation_norm2() <= 700)
                .collect::<Vec<_>>()
        })
        .collect();
    for f in &pair_anchors {
        for r in &candidate_slots {
            let loc = f.mul(r);
            if (loc.translation_norm2() as f64).sqrt() > deep_limit {
                continue;
            }
            let e = slots.entry(*r).or_insert((0, 0));
            e.0 += 1;
            if left_frames.get(&loc) == Some(&ClusterKind::D) {
                e.1 += 1;
            }
        }
    }
    eprintln!("-- D slots relative to H-pair anchor (usable/present) --");
    let mut slot_rows: Vec<(f64, u32, u32, Symmetry)> = slots
        .iter()
        .filter(|(_, (u, _))| *u >= 3)
        .map(|(r, (u, p))| (*p as f64 / *u as f64, *u, *p, *r))
        .collect();
    slot_rows.sort_by(|x, y| y.0.total_cmp(&x.0).then(y.1.cmp(&x.1)));
    for (ratio, u, p, r) in slot_rows.iter().take(14) {
        eprintln!("  {:.2} ({}/{})  D at {}", ratio, p, u, r);
    }
}

struct Leftovers {
    frames: BTreeMap<Symmetry, ClusterKind>,
    clusters: Vec<(Symmetry, ClusterKind)>,
    adj: Vec<Vec<usize>>,
    deep: Vec<bool>,
    // every single-hat marker that anchored a claimed supertile copy
    t_anchors: Vec<(Symmetry, bool)>,
    window_r: f64,
}

// claim the 4-hat supertile copies at every single-hat marker, return what
// is left with its adjacency graph
fn leftovers_of(path: &str, margin: f64, tenth: Option<(i64, i64, u8)>) -> Leftovers {
    let patch = load_patch(path);
    let meta = cluster_to_metatiles(&patch);
    let frame_of: BTreeMap<Symmetry, usize> = meta
        .clusters
        .iter()
        .enumerate()
        .map(|(i, c)| (c.frame, i))
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; meta.clusters.len()];
    let mut t_anchors: Vec<(Symmetry, bool)> = Vec::new();
    for pass in 0..2 {
        for (ci, c) in meta.clusters.iter().enumerate() {
            if c.kind != ClusterKind::T || c.complete != (pass == 0) {
                continue;
            }
            t_anchors.push((c.frame, c.complete));
            let mut slots: Vec<(i64, i64, u8, ClusterKind)> = SUPER_H[..9].to_vec();
            match tenth {
                Some((tx, ty, rot)) => slots.push((tx, ty, rot, ClusterKind::D)),
                None => slots.push(SUPER_H[9]),
            }
            for (tx, ty, rot, k) in slots {
                let loc = c.frame.mul(&Symmetry::new(tx, ty, rot, false));
                if let Some(&x) = frame_of.get(&loc) {
                    if meta.clusters[x].kind == k && owner[x].is_none() {
                        owner[x] = Some(ci);
                    }
                }
            }
        }
    }
    let full_adj = cluster_contacts(&patch, &meta);
    let window_r = patch
        .hats
        .iter()
        .map(|(g, _)| (g.translation_norm2() as f64).sqrt())
        .fold(0.0f64, f64::max);
    let mut keep: Vec<usize> = Vec::new();
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    for (ci, c) in meta.clusters.iter().enumerate() {
        if owner[ci].is_none() {
            index.insert(ci, keep.len());
            keep.push(ci);
        }
    }
    let clusters: Vec<(Symmetry, ClusterKind)> = keep
        .iter()
        .map(|&ci| (meta.clusters[ci].frame, meta.clusters[ci].kind))
        .collect();
    let adj: Vec<Vec<usize>> = keep
        .iter()
        .map(|&ci| {
            full_adj[ci]
                .iter()
                .filter_map(|x| index.get(x).copied())
                .collect()
        })
        .collect();
    let deep: Vec<bool> = keep
        .iter()
        .map(|&ci| {
            meta.clusters[ci].complete
                && (meta.clusters[ci].frame.translation_norm2() as f64).sqrt()
                    <= window_r - margin
        })
        .collect();
    Leftovers {
        frames: clusters.iter().copied().map(|(f, k)| (f, k)).collect(),
        clusters,
        adj,
        deep,
        t_anchors,
        window_r,
    }
}

fn motifs_cmd(args: &[String]) {
    let paths: Vec<String> = {
        let mut v = Vec::new();
        let mut it = args.iter();
        while let Some(a) = it.next() {
            if a == "--in" {
                v.push(it.next().expect("--in path").clone());
            }
        }
        v
    };
    let views: Vec<Leftovers> = paths.iter().map(|p| leftovers_of(p, 14.0, None)).collect();

    // enumerate connected leftover subsets around deep seeds with the
    // composition of a 2-hat supertile image, canonicalize, then rank each
    // candidate by how many copies repeat across all patches
    let mut candidates: BTreeMap<Vec<(Symmetry, ClusterKind)>, u32> = BTreeMap::new();
    for v in &views {
        for seed in 0..v.clusters.len() {
            if !v.deep[seed] || v.clusters[seed].1 != ClusterKind::D {
                continue;
            }
            let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
            let mut stack: Vec<Vec<usize>> = vec![vec![seed]];
            while let Some(sub) = stack.pop() {
                if sub.len() < 6 {
                    let mut ext: BTreeSet<usize> = BTreeSet::new();
                    for &m in &sub {
                        ext.extend(v.adj[m].iter().copied());
                    }
                    for e in ext {
                        if sub.contains(&e) {
                            continue;
                        }
                        let mut next = sub.clone();
                        next.push(e);
                        next.sort();
                        if seen.insert(next.clone()) {
                            stack.push(next);
                        }
                    }
                }
                let h = sub.iter().filter(|&&m| v.clusters[m].1 == ClusterKind::H).count();
                let d = sub.len() - h;
                if !(h == 2 && (d == 3 || d == 4)) {
                    continue;
                }
                let members: Vec<(Symmetry, ClusterKind)> =
                    sub.iter().map(|&m| v.clusters[m]).collect();
                candidates.insert(canon_pat(&members), 0);
            }
        }
    }
    eprintln!("{} candidate patterns", candidates.len());
    for (pat, count) in candidates.iter_mut() {
        for v in &views {
            for (f, _) in v.clusters.iter() {
                let hit = pat.iter().all(|(rel, k)| {
                    v.frames.get(&f.mul(rel)) == Some(k)
                });
                if hit {
                    *count += 1;
                }
            }
        }
    }
    let mut rows: Vec<(u32, &Vec<(Symmetry, ClusterKind)>)> =
        candidates.iter().map(|(p, &n)| (n, p)).collect();
    rows.sort_by(|a, b| b.0.cmp(&a.0));
    for (n, pat) in rows.iter().take(12) {
        let desc: Vec<String> = pat
            .iter()
            .map(|(r, k)| format!("{:?}@{}", k, r))
            .collect();
        eprintln!("  {}x [{}] {}", n, pat.len(), desc.join(" "));
    }
}

type Pat = Vec<(Symmetry, ClusterKind)>;

// canonical representative of a motif under left transport: rebase at every
// member and keep the lexicographically least sorted pattern, so any two
// copies of the same motif canonicalize identically
fn canon_pat(members: &[(Symmetry, ClusterKind)]) -> Pat {
    let mut best: Option<Pat> = None;
    for (b, _) in members {
        let inv = b.inverse();
        let mut pat: Pat = members.iter().map(|(g, k)| (inv.mul(g), *k)).collect();
        pat.sort();
        if best.as_ref().map_or(true, |x| pat < *x) {
            best = Some(pat);
        }
    }
    best.unwrap()
}

// exact cover of the deep leftover D clusters by disjoint translates of the
// two candidate patterns; propagation first, then branch on the tightest D
fn try_partition(v: &Leftovers, p5: &Pat, p6: &Pat) -> Option<Vec<(Symmetry, bool, Vec<usize>)>> {
    let index: BTreeMap<Symmetry, usize> = v
        .clusters
        .iter()
        .enumerate()
        .map(|(i, (f, _))| (*f, i))
        .collect();
    let mut copies: Vec<(Symmetry, Vec<usize>, bool)> = Vec::new();
    for (f, _) in v.clusters.iter() {
        for (pat, is6) in [(p5, false), (p6, true)] {
            let members: Option<Vec<usize>> = pat
                .iter()
                .map(|(rel, k)| {
                    let loc = f.mul(rel);
                    index.get(&loc).copied().filter(|&i| v.clusters[i].1 == *k)
                })
                .collect();
            if let Some(m) = members {
                copies.push((*f, m, is6));
            }
        }
    }
    let mut cand_of: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (ci, (_, members, _)) in copies.iter().enumerate() {
        for &m in members {
            cand_of.entry(m).or_default().push(ci);
        }
    }
    let need: Vec<usize> = (0..v.clusters.len())
        .filter(|&i| v.deep[i] && v.clusters[i].1 == ClusterKind::D)
        .collect();
    for &d in &need {
        cand_of.entry(d).or_default();
    }

    #[derive(Clone)]
    struct St {
        used: Vec<bool>,
        taken: Vec<Option<usize>>,
    }
    let mut st = St {
        used: vec![false; v.clusters.len()],
        taken: vec![None; copies.len()],
    };
    fn place(st: &mut St, copies: &[(Symmetry, Vec<usize>, bool)], ci: usize) -> bool {
        if copies[ci].1.iter().any(|&m| st.used[m]) {
            return false;
        }
        for &m in &copies[ci].1 {
            st.used[m] = true;
        }
        st.taken[ci] = Some(ci);
        true
    }
    fn solve(
        st: &mut St,
        copies: &[(Symmetry, Vec<usize>, bool)],
        cand_of: &BTreeMap<usize, Vec<usize>>,
        need: &[usize],
    ) -> bool {
        // tightest uncovered deep D
        let mut best: Option<(usize, Vec<usize>)> = None;
        for &d in need {
            if st.used[d] {
                continue;
            }
            let opts: Vec<usize> = cand_of[&d]
                .iter()
                .copied()
                .filter(|&ci| st.taken[ci].is_none() && !copies[ci].1.iter().any(|&m| st.used[m]))
                .collect();
            if opts.is_empty() {
                return false;
            }
            if best.as_ref().map_or(true, |(_, b)| opts.len() < b.len()) {
                let n = opts.len();
                best = Some((d, opts));
                if n == 1 {
                    break;
                }
            }
        }
        let (_, opts) = match best {
            None => return true,
            Some(x) => x,
        };
        for ci in opts {
            let snapshot = st.clone();
            if place(st, copies, ci) && solve(st, copies, cand_of, need) {
                return true;
            }
            *st = snapshot;
        }
        false
    }
    if solve(&mut st, &copies, &cand_of, &need) {
        Some(
            st.taken
                .iter()
                .filter_map(|t| t.map(|ci| (copies[ci].0, copies[ci].2, copies[ci].1.clone())))
                .collect(),
        )
    } else {
        None
    }
}

fn partition_cmd(args: &[String]) {
    let paths: Vec<String> = {
        let mut v = Vec::new();
        let mut it = args.iter();
        while let Some(a) = it.next() {
            if a == "--in" {
                v.push(it.next().expect("--in path").clone());
            }
        }
        v
    };
    let topk: usize = arg_val(args, "--top").map(|s| s.parse().unwrap()).unwrap_or(30);
    let margin: f64 = arg_val(args, "--margin").map(|s| s.parse().unwrap()).unwrap_or(24.0);
    let tenth: Option<(i64, i64, u8)> = arg_val(args, "--tenth").map(|s| {
        let v: Vec<i64> = s.split(',').map(|x| x.parse().unwrap()).collect();
        (v[0], v[1], v[2] as u8)
    });
    let views: Vec<Leftovers> = paths.iter().map(|p| leftovers_of(p, margin, tenth)).collect();
    let seed_views: Vec<Leftovers> = paths.iter().map(|p| leftovers_of(p, 14.0, tenth)).collect();

    let mut candidates: BTreeMap<Pat, u32> = BTreeMap::new();
    for v in &seed_views {
        for seed in 0..v.clusters.len() {
            if !v.deep[seed] || v.clusters[seed].1 != ClusterKind::D {
                continue;
            }
            let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
            let mut stack: Vec<Vec<usize>> = vec![vec![seed]];
            while let Some(sub) = stack.pop() {
                if sub.len() < 6 {
                    let mut ext: BTreeSet<usize> = BTreeSet::new();
                    for &m in &sub {
                        ext.extend(v.adj[m].iter().copied());
                    }
                    for e in ext {
                        if sub.contains(&e) {
                            continue;
                        }
                        let mut next = sub.clone();
                        next.push(e);
                        next.sort();
                        if seen.insert(next.clone()) {
                            stack.push(next);
                        }
                    }
                }
                let h = sub.iter().filter(|&&m| v.clusters[m].1 == ClusterKind::H).count();
                let d = sub.len() - h;
                if !(h == 2 && (d == 3 || d == 4)) {
                    continue;
                }
                let members: Vec<(Symmetry, ClusterKind)> =
                    sub.iter().map(|&m| v.clusters[m]).collect();
                candidates.insert(canon_pat(&members), 0);
            }
        }
    }
    for (pat, count) in candidates.iter_mut() {
        for v in &seed_views {
            for (f, _) in v.clusters.iter() {
                if pat.iter().all(|(rel, k)| v.frames.get(&f.mul(rel)) == Some(k)) {
                    *count += 1;
                }
            }
        }
    }
    let mut five: Vec<(u32, Pat)> = Vec::new();
    let mut six: Vec<(u32, Pat)> = Vec::new();
    for (p, &n) in &candidates {
        if p.len() == 5 {
            five.push((n, p.clone()));
        } else {
            six.push((n, p.clone()));
        }
    }
    five.sort_by(|a, b| b.0.cmp(&a.0));
    six.sort_by(|a, b| b.0.cmp(&a.0));
    five.truncate(topk);
    six.truncate(topk);
    eprintln!("trying {} x {} pattern pairs", five.len(), six.len());
    for (n5, p5) in &five {
        for (n6, p6) in &six {
            let mut ok = true;
            let mut tally = Vec::new();
            for v in &views {
                match try_partition(v, p5, p6) {
                    Some(chosen) => {
                        let n6 = chosen.iter().filter(|(_, is6, _)| *is6).count();
                        tally.push((chosen.len() - n6, n6));
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let d5: Vec<String> = p5.iter().map(|(r, k)| format!("{:?}@{}", k, r)).collect();
                let d6: Vec<String> = p6.iter().map(|(r, k)| format!("{:?}@{}", k, r)).collect();
                eprintln!(
                    "PARTITION {:?} freq {}x/{}x\n  P5: {}\n  P6: {}",
                    tally, n5, n6,
                    d5.join(" "),
                    d6.join(" ")
                );
            }
        }
    }
}

/// Surviving 5-member motif candidates and the settled 6-member motif,
/// relative to their canonical anchor member.
const P5A: [(i64, i64, u8, ClusterKind); 5] = [
    (-4, 3, 3, ClusterKind::H),
    (-3, 2, 1, ClusterKind::D),
    (-2, -1, 2, ClusterKind::D),
    (-2, 0, 4, ClusterKind::H),
    (0, 0, 0, ClusterKind::D),
];
const P5B: [(i64, i64, u8, ClusterKind); 5] = [
    (-7, 2, 3, ClusterKind::D),
    (-6, 2, 5, ClusterKind::H),
    (-4, 0, 1, ClusterKind::D),
    (-1, 0, 2, ClusterKind::H),
    (0, 0, 0, ClusterKind::D),
];
const P6M: [(i64, i64, u8, ClusterKind); 6] = [
    (-5, 1, 3, ClusterKind::H),
    (-5, 3, 5, ClusterKind::D),
    (-4, 0, 1, ClusterKind::D),
    (-3, 2, 4, ClusterKind::D),
    (-1, 0, 2, ClusterKind::H),
    (0, 0, 0, ClusterKind::D),
];

fn pat_of(slots: &[(i64, i64, u8, ClusterKind)]) -> Pat {
    slots
        .iter()
        .map(|&(tx, ty, rot, k)| (Symmetry::new(tx, ty, rot, false), k))
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Level1 {
    H1,
    T1,
    P1,
    F1,
}

// check that the tiling one level up is built from the same supertile rule:
// anchor at each isolated single-hat marker (a T one level up), look up every
// rule slot, and solve for the fixed per-kind frame correction that makes the
// level-up objects land exactly on the slot positions
fn hierarchy_cmd(args: &[String]) {
    let paths: Vec<String> = {
        let mut v = Vec::new();
        let mut it = args.iter();
        while let Some(a) = it.next() {
            if a == "--in" {
                v.push(it.next().expect("--in path").clone());
            }
        }
        v
    };
    let margin: f64 = arg_val(args, "--margin").map(|s| s.parse().unwrap()).unwrap_or(21.0);
    let tenth: Option<(i64, i64, u8)> = arg_val(args, "--tenth").map(|s| {
        let v: Vec<i64> = s.split(',').map(|x| x.parse().unwrap()).collect();
        (v[0], v[1], v[2] as u8)
    });
    let p5 = if arg_val(args, "--p5").as_deref() == Some("b") {
        pat_of(&P5B)
    } else {
        pat_of(&P5A)
    };
    let p6 = pat_of(&P6M);
    let slack: f64 = arg_val(args, "--slack").map(|s| s.parse().unwrap()).unwrap_or(16.0);

    let mut slot_obs: BTreeMap<usize, BTreeMap<Symmetry, (u32, BTreeMap<Level1, u32>)>> =
        BTreeMap::new();
    let mut usable: BTreeMap<usize, u32> = BTreeMap::new();
    for path in &paths {
        let v = leftovers_of(path, margin, tenth);
        let chosen = match try_partition(&v, &p5, &p6) {
            Some(c) => c,
            None => {
                eprintln!("{}: no partition with this pattern pair", path);
                continue;
            }
        };
        let mut in_copy = vec![false; v.clusters.len()];
        let mut objects: Vec<(Symmetry, Level1)> = Vec::new();
        for (anchor, is6, members) in &chosen {
            for &m in members {
                in_copy[m] = true;
            }
            objects.push((*anchor, if *is6 { Level1::F1 } else { Level1::P1 }));
        }
        for (f, _) in &v.t_anchors {
            objects.push((*f, Level1::H1));
        }
        let solos: Vec<Symmetry> = v
            .clusters
            .iter()
            .enumerate()
            .filter(|&(i, (_, k))| *k == ClusterKind::H && !in_copy[i])
            .map(|(_, (f, _))| *f)
            .collect();
        for f in &solos {
            objects.push((*f, Level1::T1));
        }
        eprintln!(
            "{}: {} copies, {} supertile anchors, {} isolated hats (markers one level up)",
            path,
            chosen.len(),
            v.t_anchors.len(),
            solos.len()
        );

        let mut slots: Vec<(i64, i64, u8, ClusterKind)> = SUPER_H[..9].to_vec();
        match tenth {
            Some((tx, ty, rot)) => slots.push((tx, ty, rot, ClusterKind::D)),
            None => slots.push(SUPER_H[9]),
        }
        for anchor in &solos {
            for (si, (tx, ty, rot, k)) in slots.iter().enumerate() {
                if *k == ClusterKind::T {
                    continue;
                }
                let base = anchor.mul(&Symmetry::new(*tx, *ty, *rot, false));
                if (base.translation_norm2() as f64).sqrt() > v.window_r - slack {
                    continue;
                }
                *usable.entry(si).or_default() += 1;
                let inv = base.inverse();
                for (g, k1) in &objects {
                    let class_ok = match k {
                        ClusterKind::H => *k1 == Level1::H1,
                        ClusterKind::D => *k1 == Level1::P1 || *k1 == Level1::F1,
                        ClusterKind::T => false,
                    };
                    if !class_ok {
                        continue;
                    }
                    let rho = inv.mul(g);
                    if rho.translation_norm2() > 700 {
                        continue;
                    }
                    let e = slot_obs
                        .entry(si)
                        .or_default()
                        .entry(rho)
                        .or_insert((0, BTreeMap::new()));
                    e.0 += 1;
                    *e.1.entry(*k1).or_default() += 1;
                }
            }
        }
    }
    let slots: Vec<(i64, i64, u8, ClusterKind)> = {
        let mut s: Vec<_> = SUPER_H[..9].to_vec();
        match tenth {
            Some((tx, ty, rot)) => s.push((tx, ty, rot, ClusterKind::D)),
            None => s.push(SUPER_H[9]),
        }
        s
    };
    for (si, (tx, ty, rot, k)) in slots.iter().enumerate() {
        if *k == ClusterKind::T {
            continue;
        }
        let u = usable.get(&si).copied().unwrap_or(0);
        eprintln!("slot {:?} t({},{}) r^{} usable {}:", k, tx, ty, rot, u);
        if let Some(m) = slot_obs.get(&si) {
            let mut rows: Vec<(u32, &Symmetry, &BTreeMap<Level1, u32>)> =
                m.iter().map(|(r, (n, ks))| (*n, r, ks)).collect();
            rows.sort_by(|a, b| b.0.cmp(&a.0));
            for (n, rho, kinds) in rows.iter().take(4) {
                eprintln!("    rho {}  {}/{}  {:?}", rho, n, u, kinds);
            }
        }
    }
}

// find pinwheel triples of 2-hat clusters related by an order-3 rotation;
// these are the fylfot configurations
fn fylfot_cmd(args: &[String]) {
    let path = arg_val(args, "--in").expect("--in patch.json");
    let patch = load_patch(&path);
    let meta = cluster_to_metatiles(&patch);
    let ds: Vec<Symmetry> = meta
        .clusters
        .iter()
        .filter(|c| c.kind == ClusterKind::D && c.complete)
        .map(|c| c.frame)
        .collect();
    let have: BTreeSet<Symmetry> = ds.iter().copied().collect();
    let mut seen: BTreeSet<Vec<Symmetry>> = BTreeSet::new();
    for a in &ds {
        for b in &ds {
            if a == b {
                continue;
            }
            let rho = b.mul(&a.inverse());
            if rho.rot != 2 && rho.rot != 4 || rho.flip {
                continue;
            }
            if rho.mul(&rho).mul(&rho) != group::IDENTITY {
                continue;
            }
            let c = rho.mul(b);
            if !have.contains(&c) {
                continue;
            }
            let mut trip = vec![*a, *b, c];
            trip.sort();
            if seen.insert(trip.clone()) {
                let r1 = a.inverse().mul(b);
                eprintln!("pinwheel: {} / {} / {}  internal rel {}", a, b, c, r1);
            }
        }
    }
    eprintln!("{} pinwheel triples", seen.len());
}

/// In-frame placement of the next pinwheel member: order 3, and the three
/// members of a fylfot are f, f·FYLFOT_STEP, f·FYLFOT_STEP².
const FYLFOT_STEP: Symmetry = Symmetry::new(0, -2, 4, false);

// label the 2-hat slots of every rule by which ones the fylfot pinwheels
// land in; pinwheel members are the 4-hat-free cluster shape that carries
// the flavour distinction
fn labels_cmd(args: &[String]) {
    let paths: Vec<String> = {
        let mut v = Vec::new();
        let mut it = args.iter();
        while let Some(a) = it.next() {
            if a == "--in" {
                v.push(it.next().expect("--in path").clone());
            }
        }
        v
    };
    let margin: f64 = arg_val(args, "--margin").map(|s| s.parse().unwrap()).unwrap_or(21.0);
    let tenth: Option<(i64, i64, u8)> = arg_val(args, "--tenth").map(|s| {
        let v: Vec<i64> = s.split(',').map(|x| x.parse().unwrap()).collect();
        (v[0], v[1], v[2] as u8)
    });
    let p5 = if arg_val(args, "--p5").as_deref() == Some("b") {
        pat_of(&P5B)
    } else {
        pat_of(&P5A)
    };
    let p6 = pat_of(&P6M);
    let slots_super: Vec<(i64, i64, u8, ClusterKind)> = {
        let mut s: Vec<_> = SUPER_H[..9].to_vec();
        match tenth {
            Some((tx, ty, rot)) => s.push((tx, ty, rot, ClusterKind::D)),
            None => s.push(SUPER_H[9]),
        }
        s
    };

    // votes[(rule, slot)] = (fylfot votes, total coverage sightings)
    let mut votes: BTreeMap<(&'static str, usize), u32> = BTreeMap::new();
    for path in &paths {
        let patch = load_patch(path);
        let meta = cluster_to_metatiles(&patch);
        let frame_of: BTreeMap<Symmetry, usize> = meta
            .clusters
            .iter()
            .enumerate()
            .map(|(i, c)| (c.frame, i))
            .collect();
        // owner of each cluster: (rule name, slot index)
        let mut owner: Vec<Option<(&'static str, usize)>> = vec![None; meta.clusters.len()];
        for pass in 0..2 {
            for c in meta.clusters.iter() {
                if c.kind != ClusterKind::T || c.complete != (pass == 0) {
                    continue;
                }
                for (si, (tx, ty, rot, k)) in slots_super.iter().enumerate() {
                    let loc = c.frame.mul(&Symmetry::new(*tx, *ty, *rot, false));
                    if let Some(&x) = frame_of.get(&loc) {
                        if meta.clusters[x].kind == *k && owner[x].is_none() {
                            owner[x] = Some(("superH", si));
                        }
                    }
                }
            }
        }
        let v = leftovers_of(path, margin, tenth);
        let chosen = match try_partition(&v, &p5, &p6) {
            Some(c) => c,
            None => {
                eprintln!("{}: no partition", path);
                continue;
            }
        };
        for (anchor, is6, _) in &chosen {
            let (name, pat): (&str, &Pat) = if *is6 { ("P6", &p6) } else { ("P5", &p5) };
            for (si, (rel, k)) in pat.iter().enumerate() {
                let loc = anchor.mul(rel);
                if let Some(&x) = frame_of.get(&loc) {
                    if meta.clusters[x].kind == *k && owner[x].is_none() {
                        owner[x] = Some((if *is6 { "P6" } else { "P5" }, si));
                    }
                }
            }
            let _ = name;
        }
        // fylfot members vote
        let have: BTreeMap<Symmetry, usize> = meta
            .clusters
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == ClusterKind::D && c.complete)
            .map(|(i, c)| (c.frame, i))
            .collect();
        let mut n_trip = 0;
        for (f, &i0) in &have {
            if (f.translation_norm2() as f64).sqrt() > v.window_r - margin {
                continue;
            }
            let b = f.mul(&FYLFOT_STEP);
            let c = b.mul(&FYLFOT_STEP);
            if let (Some(&i1), Some(&i2)) = (have.get(&b), have.get(&c)) {
                n_trip += 1;
                for i in [i0, i1, i2] {
                    if let Some(o) = owner[i] {
                        *votes.entry(o).or_default() += 1;
                    }
                }
                if args.iter().any(|a| a == "--dump") {
                    eprintln!(
                        "  triple at {}: {:?} {:?} {:?}",
                        f, owner[i0], owner[i1], owner[i2]
                    );
                }
            }
        }
        eprintln!("{}: {} fylfot triples (each counted once per cyclic base)", path, n_trip);
    }
    eprintln!("-- fylfot votes per (rule, slot) --");
    for ((rule, si), n) in &votes {
        eprintln!("  {} slot {}: {}", rule, si, n);
    }
}

// census of clusters always present at a fixed offset around every image of
// a rule: those are the forced-neighbour tiles (minus the children)
fn forced_cmd(args: &[String]) {
    let paths: Vec<String> = {
        let mut v = Vec::new();
        let mut it = args.iter();
        while let Some(a) = it.next() {
            if a == "--in" {
                v.push(it.next().expect("--in path").clone());
            }
        }
        v
    };
    let margin: f64 = arg_val(args, "--margin").map(|s| s.parse().unwrap()).unwrap_or(21.0);
    let cmargin: f64 = arg_val(args, "--cmargin").map(|s| s.parse().unwrap()).unwrap_or(10.0);
    let tenth: Option<(i64, i64, u8)> = arg_val(args, "--tenth").map(|s| {
        let v: Vec<i64> = s.split(',').map(|x| x.parse().unwrap()).collect();
        (v[0], v[1], v[2] as u8)
    });
    let p5 = if arg_val(args, "--p5").as_deref() == Some("b") {
        pat_of(&P5B)
    } else {
        pat_of(&P5A)
    };
    let p6 = pat_of(&P6M);

    // anchors per rule name, then a shared presence census
    let mut census: BTreeMap<&'static str, BTreeMap<(Symmetry, ClusterKind), (u32, u32)>> =
        BTreeMap::new();
    let mut anchors_per: BTreeMap<&'static str, u32> = BTreeMap::new();
    for path in &paths {
        let v = leftovers_of(path, margin, tenth);
        let chosen = match try_partition(&v, &p5, &p6) {
            Some(c) => c,
            None => {
                eprintln!("{}: no partition", path);
                continue;
            }
        };
        let patch = load_patch(path);
        let meta = cluster_to_metatiles(&patch);
        let frames: BTreeMap<Symmetry, (ClusterKind, bool)> = meta
            .clusters
            .iter()
            .map(|c| (c.frame, (c.kind, c.complete)))
            .collect();
        let mut in_copy = vec![false; v.clusters.len()];
        for (_, _, members) in &chosen {
            for &m in members {
                in_copy[m] = true;
            }
        }
        let mut anchor_sets: Vec<(&'static str, Vec<Symmetry>)> = vec![
            (
                "P5",
                chosen
                    .iter()
                    .filter(|(_, is6, _)| !is6)
                    .map(|(a, _, _)| *a)
                    .collect(),
            ),
            (
                "P6",
                chosen
                    .iter()
                    .filter(|(_, is6, _)| *is6)
                    .map(|(a, _, _)| *a)
                    .collect(),
            ),
            (
                "T",
                v.clusters
                    .iter()
                    .enumerate()
                    .filter(|&(i, (_, k))| *k == ClusterKind::H && !in_copy[i])
                    .map(|(_, (f, _))| *f)
                    .collect(),
            ),
        ];
        anchor_sets.push((
            "superH",
            v.t_anchors
                .iter()
                .filter(|(_, complete)| *complete)
                .map(|(f, _)| *f)
                .collect(),
        ));
        for (name, anchors) in anchor_sets {
            for a in anchors {
                if (a.translation_norm2() as f64).sqrt() > v.window_r - cmargin {
                    continue;
                }
                *anchors_per.entry(name).or_default() += 1;
                let inv = a.inverse();
                for (g, (k, complete)) in &frames {
                    if !complete {
                        continue;
                    }
                    let rel = inv.mul(g);
                    if rel.translation_norm2() > 900 {
                        continue;
                    }
                    let e = census
                        .entry(name)
                        .or_default()
                        .entry((rel, *k))
                        .or_insert((0, 0));
                    e.0 += 1;
                }
            }
        }
    }
    for (name, m) in &census {
        let n = anchors_per.get(name).copied().unwrap_or(0);
        eprintln!("-- {} ({} deep anchors) --", name, n);
        let mut rows: Vec<(&(Symmetry, ClusterKind), &(u32, u32))> = m.iter().collect();
        rows.sort_by_key(|((r, _), _)| r.translation_norm2());
        for ((rel, k), (present, _)) in rows {
            if n >= 3 && *present * 4 >= n * 3 {
                eprintln!("  {:>3}/{} {:?} at {}", present, n, k, rel);
            }
        }
    }
}

// cut a ball around a lattice point of an existing patch and re-center it,
// giving a seed whose grown window samples a different region of the tiling
fn reseed_cmd(args: &[String]) {
    let path = arg_val(args, "--in").expect("--in patch.json");
    let out = arg_val(args, "--out").expect("--out seed.json");
    let c: Vec<i64> = arg_val(args, "--center")
        .expect("--center tx,ty")
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    let radius: f64 = arg_val(args, "--radius").map(|s| s.parse().unwrap()).unwrap_or(8.0);
    let cotiler: Cotiler = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let shift = Symmetry::new(-c[0], -c[1], 0, false);
    let mut kept = Cotiler { placements: std::collections::BTreeSet::new() };
    for (g, name) in &cotiler.placements {
        let moved = shift.mul(g);
        if (moved.translation_norm2() as f64).sqrt() <= radius {
            kept.placements.insert((moved, name.clone()));
        }
    }
    eprintln!("seed: {} placements", kept.placements.len());
    std::fs::write(&out, serde_json::to_string(&kept).unwrap()).unwrap();
}
