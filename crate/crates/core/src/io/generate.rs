//! Synthetic grids. Random refinement draws from ChaCha8 seeded with
//! `seed_from_u64`, so a seed gives the same grid on every platform.

use std::collections::VecDeque;

use bitvec::vec::BitVec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::HyperTreeGrid;
use crate::tree::MAX_DEPTH;
use crate::{Error, Result};

/// Name of the field holding the depth of every vertex.
pub const DEPTH_FIELD: &str = "Depth";

fn check_depth(depth: u32) -> Result<()> {
    if depth > MAX_DEPTH {
        return Err(Error::DepthLimit(depth));
    }
    Ok(())
}

/// Breadth-first refinement of every tree in slot order: each vertex above
/// `depth_max` splits when a uniform draw falls below `probability`. Carries
/// a `Depth` field.
pub fn generate_random(
    dimension: usize,
    factor: usize,
    extent: [usize; 3],
    depth_max: u32,
    probability: f64,
    seed: u64,
) -> Result<HyperTreeGrid> {
    if !(0.0..=1.0).contains(&probability) {
        return Err(Error::InvalidParameter(format!(
            "split probability {probability} is not in [0, 1]"
        )));
    }
    check_depth(depth_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = HyperTreeGrid::unit(dimension, factor, extent)?;
    refine_breadth_first(&mut grid, depth_max, |_, _, _| rng.gen::<f64>() < probability)?;
    attach_depth(&mut grid)?;
    Ok(grid)
}

/// Every tree refined completely down to `depth`.
pub fn generate_uniform(dimension: usize, factor: usize, extent: [usize; 3], depth: u32) -> Result<HyperTreeGrid> {
    check_depth(depth)?;
    let mut grid = HyperTreeGrid::unit(dimension, factor, extent)?;
    refine_breadth_first(&mut grid, depth, |_, _, _| true)?;
    attach_depth(&mut grid)?;
    Ok(grid)
}

/// Spacing of the root cells of [`generate_octant`].
pub const OCTANT_ROOT_SIZE: f64 = 0.25;

/// Grid over the positive octant around the unit ball: root cells of size
/// [`OCTANT_ROOT_SIZE`] from the origin, every cell crossed by the unit
/// sphere refined down to `levels`, and every cell lying outside the ball
/// masked. Carries a `Depth` field.
pub fn generate_octant(resolution: [usize; 3], factor: usize, levels: u32) -> Result<HyperTreeGrid> {
    check_depth(levels)?;
    let coords = resolution.map(|n| (0..=n).map(|i| i as f64 * OCTANT_ROOT_SIZE).collect());
    let mut grid = HyperTreeGrid::new(3, factor, resolution, coords, 0)?;
    refine_breadth_first(&mut grid, levels, |_, lo, hi| {
        let (near, far) = sphere_distances(lo, hi);
        near < 1.0 && far > 1.0
    })?;
    grid.finalize();
    let mut mask = BitVec::repeat(false, grid.vertex_total() as usize);
    let mut any = false;
    for_each_cell(&grid, |g, lo, hi| {
        if sphere_distances(lo, hi).0 >= 1.0 {
            mask.set(g as usize, true);
            any = true;
        }
    });
    if any {
        grid.set_mask(mask)?;
    }
    attach_depth(&mut grid)?;
    Ok(grid)
}

/// Squared distances from the origin to the nearest and farthest points of
/// a box.
fn sphere_distances(lo: [f64; 3], hi: [f64; 3]) -> (f64, f64) {
    let mut near = 0.0;
    let mut far = 0.0;
    for a in 0..3 {
        let n = if lo[a] > 0.0 {
            lo[a]
        } else if hi[a] < 0.0 {
            -hi[a]
        } else {
            0.0
        };
        let f = lo[a].abs().max(hi[a].abs());
        near += n * n;
        far += f * f;
    }
    (near, far)
}

/// Box of the cell at integer position `lattice` and depth `depth` inside
/// the tree at `coords`.
fn cell_box(grid: &HyperTreeGrid, coords: [usize; 3], lattice: [u64; 3], depth: u32) -> ([f64; 3], [f64; 3]) {
    let den = (grid.factor() as u64).pow(depth);
    let mut lo = [0.0; 3];
    let mut hi = [0.0; 3];
    for a in 0..3 {
        let c = grid.coordinates(a);
        if a < grid.dimension() {
            let (x0, x1) = (c[coords[a]], c[coords[a] + 1]);
            let p = x0 + (x1 - x0) * (lattice[a] as f64 / den as f64);
            let q = x0 + (x1 - x0) * ((lattice[a] + 1) as f64 / den as f64);
            lo[a] = p.min(q);
            hi[a] = p.max(q);
        } else {
            lo[a] = c[0];
            hi[a] = c[0];
        }
    }
    (lo, hi)
}

/// Breadth-first refinement of every tree of a grid under construction.
/// `split` sees the depth and box of each candidate leaf above `depth_max`.
fn refine_breadth_first(
    grid: &mut HyperTreeGrid,
    depth_max: u32,
    mut split: impl FnMut(u32, [f64; 3], [f64; 3]) -> bool,
) -> Result<()> {
    let d = grid.dimension();
    let f = grid.factor() as u64;
    for slot in 0..grid.slot_count() {
        let coords = grid.coords_of(slot);
        let mut queue = VecDeque::from([(0u32, [0u64; 3], 0u32)]);
        while let Some((v, lattice, depth)) = queue.pop_front() {
            if depth >= depth_max {
                continue;
            }
            let (lo, hi) = cell_box(grid, coords, lattice, depth);
            if !split(depth, lo, hi) {
                continue;
            }
            let first = grid.subdivide(coords, v)?;
            for i in 0..grid.child_count() {
                let mut child = lattice;
                let mut rest = i as u64;
                for c in child.iter_mut().take(d) {
                    *c = *c * f + rest % f;
                    rest /= f;
                }
                queue.push_back((first + i as u32, child, depth + 1));
            }
        }
    }
    Ok(())
}

/// Calls `visit(global index, lo, hi)` for every vertex of a finalized grid.
fn for_each_cell(grid: &HyperTreeGrid, mut visit: impl FnMut(u64, [f64; 3], [f64; 3])) {
    let d = grid.dimension();
    let f = grid.factor() as u64;
    for (slot, tree) in grid.trees() {
        let coords = grid.coords_of(slot);
        let start = grid.start_of(slot);
        let mut stack = vec![(0u32, [0u64; 3], 0u32)];
        while let Some((v, lattice, depth)) = stack.pop() {
            let (lo, hi) = cell_box(grid, coords, lattice, depth);
            visit(start + v as u64, lo, hi);
            if let Some(first) = tree.eldest_child(v) {
                for i in 0..tree.child_count() {
                    let mut child = lattice;
                    let mut rest = i as u64;
                    for c in child.iter_mut().take(d) {
                        *c = *c * f + rest % f;
                        rest /= f;
                    }
                    stack.push((first + i as u32, child, depth + 1));
                }
            }
        }
    }
}

/// Finalizes `grid` if needed and attaches the `Depth` field.
fn attach_depth(grid: &mut HyperTreeGrid) -> Result<()> {
    grid.finalize();
    let mut depth = vec![0.0; grid.vertex_total() as usize];
    for (slot, tree) in grid.trees() {
        let start = grid.start_of(slot) as usize;
        for v in 0..tree.vertex_count() {
            if let Some(first) = tree.eldest_child(v) {
                let dv = depth[start + v as usize] + 1.0;
                for i in 0..tree.child_count() as u32 {
                    depth[start + (first + i) as usize] = dv;
                }
            }
        }
    }
    grid.add_field(DEPTH_FIELD, depth)
}
