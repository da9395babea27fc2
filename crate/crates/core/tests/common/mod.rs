//! Seeded corpora and brute-force oracles shared by the integration tests.
//!
//! The oracles work on integer lattices and plain tree walks; they never go
//! through cursors, supercursors or traversal tables.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use bitvec::vec::BitVec;
use htg_core::filters::{contour_values, ContourOptions};
use htg_core::io::generate_random;
use htg_core::{
    build_full_dual, depth_first, is_owner, HyperTreeGrid, MooreSupercursor, PolygonalOutput,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random grid of dimension `d` over unit root cells. The factor, extent,
/// split probability and (when `masked`) a sparse random mask all derive
/// from `seed`.
pub fn random_grid(d: usize, seed: u64, depth_max: u32, masked: bool) -> HyperTreeGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let f = if rng.gen_bool(0.5) { 2 } else { 3 };
    let max_extent = if d == 3 { 2 } else { 3 };
    let mut extent = [1usize; 3];
    for e in extent.iter_mut().take(d) {
        *e = rng.gen_range(1..=max_extent);
    }
    let depth = rng.gen_range(1..=depth_max);
    let p = rng.gen_range(0.25..0.55);
    let mut grid = generate_random(d, f, extent, depth, p, seed).expect("valid parameters");
    if masked {
        let n = grid.vertex_total() as usize;
        let mask: BitVec = (0..n).map(|_| rng.gen_bool(0.08)).collect();
        grid.set_mask(mask).expect("mask length");
    }
    grid
}

/// The corpus used by the dual and contour properties: `count2` grids in
/// 2D (depth at most 4) and `count3` in 3D (depth at most 3); every third
/// grid is masked.
pub fn corpus(count2: u64, count3: u64) -> Vec<HyperTreeGrid> {
    let two = (0..count2).map(|s| random_grid(2, 1000 + s, 4, s % 3 == 2));
    let three = (0..count3).map(|s| random_grid(3, 5000 + s, 3, s % 3 == 2));
    two.chain(three).collect()
}

/// Moore neighbor offsets, axis 0 varying fastest.
pub fn moore_offsets(d: usize) -> Vec<[i64; 3]> {
    (0..3usize.pow(d as u32))
        .map(|k| {
            let mut o = [0i64; 3];
            for (a, x) in o.iter_mut().enumerate().take(d) {
                *x = (k / 3usize.pow(a as u32) % 3) as i64 - 1;
            }
            o
        })
        .collect()
}

/// Von Neumann offsets: the Moore offsets at unit L1 distance or less.
pub fn von_neumann_offsets(d: usize) -> Vec<[i64; 3]> {
    moore_offsets(d)
        .into_iter()
        .filter(|o| o.iter().map(|x| x.abs()).sum::<i64>() <= 1)
        .collect()
}

/// Cell reached by descending from a root towards a lattice cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Located {
    pub gid: u64,
    pub depth: u32,
    pub masked: bool,
    /// Grid-wide lattice position at `depth`.
    pub lattice: [u64; 3],
}

fn masked(grid: &HyperTreeGrid, gid: u64) -> bool {
    grid.has_mask() && grid.mask_get(gid).unwrap()
}

/// Whether a vertex stops a descent: a leaf, a masked vertex or a strict
/// vertex whose children are all masked.
fn stops(grid: &HyperTreeGrid, slot: usize, v: u32) -> bool {
    let tree = grid.tree_at(slot).unwrap();
    let start = grid.start_of(slot);
    match tree.eldest_child(v) {
        None => true,
        Some(e) => {
            masked(grid, start + v as u64)
                || (0..tree.child_count() as u64).all(|i| masked(grid, start + e as u64 + i))
        }
    }
}

/// Descends from the root holding the grid-wide lattice cell `cell` at depth
/// `depth`, stopping at that depth or at the first vertex that stops a
/// descent. `None` outside the grid or on an absent tree.
pub fn locate(grid: &HyperTreeGrid, cell: [i64; 3], depth: u32) -> Option<Located> {
    let d = grid.dimension();
    let f = grid.factor() as u64;
    let scale = f.pow(depth);
    let mut coords = [0usize; 3];
    for a in 0..d {
        if cell[a] < 0 {
            return None;
        }
        let t = cell[a] as u64 / scale;
        if t >= grid.extent()[a] as u64 {
            return None;
        }
        coords[a] = t as usize;
    }
    let slot = grid.slot_of(coords).ok()?;
    let tree = grid.tree_at(slot)?;
    let start = grid.start_of(slot);
    let mut v = 0u32;
    let mut k = 0u32;
    loop {
        let gid = start + v as u64;
        let lattice = std::array::from_fn(|a| if a < d { cell[a] as u64 / f.pow(depth - k) } else { 0 });
        if masked(grid, gid) {
            return Some(Located { gid, depth: k, masked: true, lattice });
        }
        if k == depth || stops(grid, slot, v) {
            return Some(Located { gid, depth: k, masked: false, lattice });
        }
        let mut i = 0u64;
        for a in (0..d).rev() {
            i = i * f + (cell[a] as u64 / f.pow(depth - k - 1)) % f;
        }
        v = tree.eldest_child(v).unwrap() + i as u32;
        k += 1;
    }
}

/// Every cell where a descent stops, masked ones included.
pub fn stopping_cells(grid: &HyperTreeGrid) -> Vec<Located> {
    let d = grid.dimension();
    let f = grid.factor() as u64;
    let mut out = Vec::new();
    for (slot, tree) in grid.trees() {
        let coords = grid.coords_of(slot);
        let start = grid.start_of(slot);
        let root = std::array::from_fn(|a| coords[a] as u64);
        let mut stack = vec![(0u32, 0u32, root)];
        while let Some((v, k, lattice)) = stack.pop() {
            let gid = start + v as u64;
            let m = masked(grid, gid);
            if m || stops(grid, slot, v) {
                out.push(Located { gid, depth: k, masked: m, lattice });
                continue;
            }
            let e = tree.eldest_child(v).unwrap();
            for i in 0..tree.child_count() as u64 {
                let mut child = lattice;
                for (a, c) in child.iter_mut().enumerate().take(d) {
                    *c = *c * f + (i / f.pow(a as u32)) % f;
                }
                stack.push((e + i as u32, k + 1, child));
            }
        }
    }
    out
}

/// Integer box of a stopping cell on the lattice of depth `finest`, scaled
/// by 2 so that leaf centers are integers too.
pub fn scaled_box(grid: &HyperTreeGrid, c: &Located, finest: u32) -> ([i64; 3], [i64; 3]) {
    let f = grid.factor() as i64;
    let w = 2 * f.pow(finest - c.depth);
    let mut lo = [0i64; 3];
    let mut hi = [0i64; 3];
    for a in 0..grid.dimension() {
        lo[a] = c.lattice[a] as i64 * w;
        hi[a] = lo[a] + w;
    }
    (lo, hi)
}

/// Scaled grid extent on the lattice of depth `finest`.
pub fn scaled_extent(grid: &HyperTreeGrid, finest: u32) -> [i64; 3] {
    let f = grid.factor() as i64;
    std::array::from_fn(|a| {
        if a < grid.dimension() {
            2 * grid.extent()[a] as i64 * f.pow(finest)
        } else {
            0
        }
    })
}

/// Rounds a point of a unit grid onto the scaled lattice.
pub fn scaled_point(grid: &HyperTreeGrid, p: [f64; 3], finest: u32) -> [i64; 3] {
    let s = 2.0 * (grid.factor() as f64).powi(finest as i32);
    p.map(|x| (x * s).round() as i64)
}

/// Violations of the partition of interior leaf corners among owners: a
/// corner whose `2^d` surrounding cells are visible leaves must be claimed
/// exactly once, and no other corner may be claimed.
pub fn ownership_violations(grid: &HyperTreeGrid) -> Vec<String> {
    let d = grid.dimension();
    let f = grid.factor() as i64;
    let finest = grid.depth();
    let span = scaled_extent(grid, finest).map(|x| x / 2);
    let corner_point = |lattice: [i64; 3], depth: u32, bits: usize| -> [i64; 3] {
        std::array::from_fn(|a| {
            if a < d {
                (lattice[a] + ((bits >> a) & 1) as i64) * f.pow(finest - depth)
            } else {
                0
            }
        })
    };

    let mut expected: HashSet<[i64; 3]> = HashSet::new();
    for leaf in stopping_cells(grid).iter().filter(|c| !c.masked) {
        let lattice = leaf.lattice.map(|x| x as i64);
        for bits in 0..1usize << d {
            let p = corner_point(lattice, leaf.depth, bits);
            if (0..d).any(|a| p[a] == 0 || p[a] == span[a]) {
                continue;
            }
            let all_visible = (0..1usize << d).all(|q| {
                let cell = std::array::from_fn(|a| if a < d { p[a] - 1 + ((q >> a) & 1) as i64 } else { 0 });
                locate(grid, cell, finest).is_some_and(|c| !c.masked)
            });
            if all_visible {
                expected.insert(p);
            }
        }
    }

    let mut claims: HashMap<[i64; 3], usize> = HashMap::new();
    depth_first(grid, |s: &MooreSupercursor<'_>| {
        if s.is_leaf() {
            let c = s.center();
            let t = grid.coords_of(c.slot().unwrap());
            let lattice: [i64; 3] =
                std::array::from_fn(|a| t[a] as i64 * f.pow(c.depth()) + c.lattice()[a] as i64);
            for corner in 0..s.corner_count() {
                if is_owner(s, corner) {
                    *claims.entry(corner_point(lattice, c.depth(), corner)).or_default() += 1;
                }
            }
        }
        true
    })
    .unwrap();

    let mut out = Vec::new();
    for p in &expected {
        match claims.get(p) {
            Some(1) => {}
            n => out.push(format!("corner {p:?} claimed {n:?} times")),
        }
    }
    for p in claims.keys().filter(|p| !expected.contains(*p)) {
        out.push(format!("corner {p:?} claimed but not expected"));
    }
    out
}

/// Faces of a dual cell given in binary corner order, as corner lists in
/// cyclic order.
pub fn dual_faces(d: usize) -> Vec<Vec<usize>> {
    match d {
        1 => vec![vec![0], vec![1]],
        2 => vec![vec![0, 1], vec![1, 3], vec![3, 2], vec![2, 0]],
        _ => vec![
            vec![0, 2, 6, 4],
            vec![1, 3, 7, 5],
            vec![0, 1, 5, 4],
            vec![2, 3, 7, 6],
            vec![0, 1, 3, 2],
            vec![4, 5, 7, 6],
        ],
    }
}

/// Edges of a dual cell given in binary corner order.
pub fn dual_edges(d: usize) -> Vec<[usize; 2]> {
    let n = 1usize << d;
    let mut out = Vec::new();
    for i in 0..n {
        for a in 0..d {
            let j = i | (1 << a);
            if j != i {
                out.push([i, j]);
            }
        }
    }
    out
}

/// Conformity violations of the full dual: a face (with repeated points
/// merged, collapsed faces ignored) shared by more than two cells, a face
/// of a single cell whose source leaves do not all touch one side of the
/// grid (checked on unmasked grids only), or a dual point lying strictly
/// inside the edge of another cell.
pub fn dual_violations(grid: &HyperTreeGrid) -> Vec<String> {
    let d = grid.dimension();
    let finest = grid.depth();
    let dual = build_full_dual(grid, false, None).unwrap();
    let mut out = Vec::new();

    let mut faces: HashMap<Vec<u32>, usize> = HashMap::new();
    for i in 0..dual.cell_count() {
        let cell = dual.cell(i);
        for face in dual_faces(d) {
            let mut ids: Vec<u32> = face.iter().map(|&k| cell[k]).collect();
            ids.sort_unstable();
            ids.dedup();
            if ids.len() < d {
                continue;
            }
            *faces.entry(ids).or_default() += 1;
        }
    }
    let leaves: HashMap<u64, Located> = stopping_cells(grid).into_iter().map(|c| (c.gid, c)).collect();
    let span = scaled_extent(grid, finest);
    for (ids, n) in &faces {
        if *n > 2 {
            out.push(format!("dual face {ids:?} shared by {n} cells"));
        }
        if *n == 1 && !grid.has_mask() {
            let boxes: Vec<_> = ids
                .iter()
                .map(|&i| scaled_box(grid, &leaves[&dual.point_sources[i as usize]], finest))
                .collect();
            let on_side = (0..d).any(|a| {
                boxes.iter().all(|b| b.0[a] == 0) || boxes.iter().all(|b| b.1[a] == span[a])
            });
            if !on_side {
                out.push(format!("dual face {ids:?} is on the dual boundary away from the grid boundary"));
            }
        }
    }

    let points: Vec<[i64; 3]> = dual.points.iter().map(|&p| scaled_point(grid, p, finest)).collect();
    let lookup: HashSet<[i64; 3]> = points.iter().copied().collect();
    let mut seen = HashSet::new();
    for i in 0..dual.cell_count() {
        let cell = dual.cell(i);
        for [u, v] in dual_edges(d) {
            let (a, b) = (points[cell[u] as usize], points[cell[v] as usize]);
            if a == b || !seen.insert((a.min(b), a.max(b))) {
                continue;
            }
            let delta: [i64; 3] = std::array::from_fn(|k| b[k] - a[k]);
            let g = delta.iter().fold(0i64, |g, &x| gcd(g, x.abs()));
            for t in 1..g {
                let p = std::array::from_fn(|k| a[k] + delta[k] / g * t);
                if lookup.contains(&p) {
                    out.push(format!("dual point {p:?} inside edge {a:?}-{b:?}"));
                }
            }
        }
    }
    out
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Leaf-center values of a linear function, zero on coarse vertices.
pub fn linear_values(grid: &HyperTreeGrid, coeffs: [f64; 3]) -> Vec<f64> {
    let centers = htg_core::filters::cell_centers(grid, false).unwrap();
    let mut values = vec![0.0; grid.vertex_total() as usize];
    for (p, g) in centers.points.iter().zip(centers.point_scalars.unwrap()) {
        values[g as usize] = (0..3).map(|a| coeffs[a] * p[a]).sum();
    }
    values
}

/// Leaf-center values of a smooth nonlinear function with several level
/// sets across the grid.
pub fn wavy_values(grid: &HyperTreeGrid) -> Vec<f64> {
    let centers = htg_core::filters::cell_centers(grid, false).unwrap();
    let mut values = vec![0.0; grid.vertex_total() as usize];
    for (p, g) in centers.points.iter().zip(centers.point_scalars.unwrap()) {
        values[g as usize] = (1.7 * p[0]).sin() + (1.3 * p[1]).cos() + 0.6 * p[2];
    }
    values
}

/// Faces of the full dual that belong to a single cell, as sorted sets of
/// distinct source leaves.
pub fn dual_boundary_faces(grid: &HyperTreeGrid) -> HashSet<Vec<u64>> {
    let d = grid.dimension();
    let dual = build_full_dual(grid, false, None).unwrap();
    let mut faces: HashMap<Vec<u64>, usize> = HashMap::new();
    for i in 0..dual.cell_count() {
        let cell = dual.cell(i);
        for face in dual_faces(d) {
            let mut ids: Vec<u64> = face.iter().map(|&k| dual.point_sources[cell[k] as usize]).collect();
            ids.sort_unstable();
            ids.dedup();
            if ids.len() >= d {
                *faces.entry(ids).or_default() += 1;
            }
        }
    }
    faces.into_iter().filter(|(_, n)| *n == 1).map(|(f, _)| f).collect()
}

/// Continuity violations of a contour: no segment endpoint (2D) or polygon
/// edge (3D) may be used more than twice, and one used once must lie on a
/// face of the dual boundary, which is where the contoured region ends.
pub fn continuity_violations(grid: &HyperTreeGrid, poly: &PolygonalOutput) -> Vec<String> {
    let sources = poly.point_sources.as_ref().expect("contour output carries sources");
    let boundary = dual_boundary_faces(grid);
    let mut out = Vec::new();
    match grid.dimension() {
        2 => {
            let mut valence = vec![0usize; poly.points.len()];
            for [a, b] in &poly.lines {
                valence[*a as usize] += 1;
                valence[*b as usize] += 1;
            }
            for (i, &n) in valence.iter().enumerate() {
                if n > 2 || (n == 1 && !boundary.contains(sources[i].as_slice())) {
                    out.push(format!("endpoint {:?} has valence {n}", poly.points[i]));
                }
            }
        }
        3 => {
            let mut by_edge: HashMap<[u64; 2], Vec<usize>> = HashMap::new();
            let faces: Vec<&Vec<u64>> = boundary.iter().collect();
            for (k, f) in faces.iter().enumerate() {
                for i in 0..f.len() {
                    for j in i + 1..f.len() {
                        by_edge.entry([f[i], f[j]]).or_default().push(k);
                    }
                }
            }
            let mut edges: HashMap<(u32, u32), usize> = HashMap::new();
            for polygon in poly.polygons() {
                for k in 0..polygon.len() {
                    let (a, b) = (polygon[k], polygon[(k + 1) % polygon.len()]);
                    *edges.entry((a.min(b), a.max(b))).or_default() += 1;
                }
            }
            for ((a, b), n) in edges {
                let on_boundary = || {
                    let fa = by_edge.get(&sources[a as usize]);
                    let fb = by_edge.get(&sources[b as usize]);
                    matches!((fa, fb), (Some(x), Some(y)) if x.iter().any(|k| y.contains(k)))
                };
                if n > 2 || (n == 1 && !on_boundary()) {
                    let (p, q) = (poly.points[a as usize], poly.points[b as usize]);
                    out.push(format!("edge {p:?}-{q:?} has valence {n}"));
                }
            }
        }
        _ => {}
    }
    out
}

/// Contour of a linear field on the adjusted dual, at an iso-value drawn
/// from `seed` inside the field range.
pub fn linear_contour(grid: &HyperTreeGrid, seed: u64) -> PolygonalOutput {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = [rng.gen_range(0.3..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
    let values = linear_values(grid, coeffs);
    let (lo, hi) = grid.bounding_box();
    let mid: f64 = (0..3).map(|a| coeffs[a] * 0.5 * (lo[a] + hi[a])).sum();
    let iso = mid + rng.gen_range(-0.25..0.25);
    let options = ContourOptions {
        adjusted: true,
        ..Default::default()
    };
    contour_values(grid, &values, &[iso], &options).unwrap()
}
