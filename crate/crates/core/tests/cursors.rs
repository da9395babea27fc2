mod common;

use common::{corpus, locate, moore_offsets, random_grid, stopping_cells, von_neumann_offsets};
use htg_core::{
    depth_first, Cursor, GeometricCursor, GridCursor, HyperTreeGrid, MooreSupercursor, Neighborhood,
    Supercursor, VonNeumannSupercursor,
};

/// Compares every entry of every supercursor reached by a depth-first walk
/// with a descent from the roots towards the same-depth neighbor cell.
fn check_neighbors<N: Neighborhood>(grid: &HyperTreeGrid, offsets: &[[i64; 3]]) -> usize {
    let f = grid.factor() as i64;
    let mut checked = 0;
    depth_first(grid, |s: &Supercursor<'_, N>| {
        let c = s.center();
        let t = grid.coords_of(c.slot().unwrap());
        let depth = c.depth();
        for (k, o) in offsets.iter().enumerate() {
            let cell = std::array::from_fn(|a| {
                if a < grid.dimension() {
                    t[a] as i64 * f.pow(depth) + c.lattice()[a] as i64 + o[a]
                } else {
                    0
                }
            });
            let n = s.neighbor(k);
            match locate(grid, cell, depth) {
                None => assert!(!n.is_valid(), "entry {k} at {cell:?} should be invalid"),
                Some(e) => {
                    assert_eq!(s.neighbor_global_index(k), Some(e.gid), "entry {k} at {cell:?}");
                    assert_eq!(n.depth(), e.depth);
                    assert_eq!(n.is_masked(), e.masked);
                }
            }
            checked += 1;
        }
        true
    })
    .unwrap();
    checked
}

#[test]
fn moore_entries_match_root_descent() {
    for grid in corpus(30, 8) {
        let d = grid.dimension();
        assert!(check_neighbors::<htg_core::Moore>(&grid, &moore_offsets(d)) > 0);
    }
}

#[test]
fn von_neumann_entries_match_root_descent() {
    for grid in corpus(30, 8) {
        let d = grid.dimension();
        assert!(check_neighbors::<htg_core::VonNeumann>(&grid, &von_neumann_offsets(d)) > 0);
    }
}

#[test]
fn one_dimensional_neighbors() {
    for seed in 0..10 {
        let grid = random_grid(1, seed, 5, seed % 2 == 1);
        check_neighbors::<htg_core::Moore>(&grid, &moore_offsets(1));
    }
}

fn grid_leaves(grid: &HyperTreeGrid) -> Vec<u64> {
    let mut out = Vec::new();
    for (slot, _) in grid.trees() {
        let mut stack = vec![GridCursor::to_root(grid, grid.coords_of(slot)).unwrap()];
        while let Some(c) = stack.pop() {
            if c.is_leaf() {
                out.push(c.global_index().unwrap());
            } else {
                for i in (0..grid.child_count()).rev() {
                    stack.push(c.child(i).unwrap());
                }
            }
        }
    }
    out.sort_unstable();
    out
}

#[test]
fn cursor_leaves_are_the_stopping_cells() {
    for grid in corpus(20, 5) {
        let mut expected: Vec<u64> = stopping_cells(&grid).iter().map(|c| c.gid).collect();
        expected.sort_unstable();
        assert_eq!(grid_leaves(&grid), expected);
    }
}

#[test]
fn geometric_cursor_bounds() {
    let grid = random_grid(3, 9, 3, false);
    let f = grid.factor() as f64;
    for leaf in stopping_cells(&grid) {
        let t: [usize; 3] = std::array::from_fn(|a| (leaf.lattice[a] / (grid.factor() as u64).pow(leaf.depth)) as usize);
        let mut c = GeometricCursor::to_root(&grid, t).unwrap();
        let s = (grid.factor() as u64).pow(leaf.depth);
        for k in 0..leaf.depth {
            let step = (grid.factor() as u64).pow(leaf.depth - k - 1);
            let mut i = 0;
            for a in (0..3).rev() {
                i = i * grid.factor() + ((leaf.lattice[a] % s) / step % grid.factor() as u64) as usize;
            }
            c.to_child(i).unwrap();
        }
        assert_eq!(c.global_index(), Some(leaf.gid));
        let (lo, hi) = c.bounds().unwrap();
        let size = f.powi(-(leaf.depth as i32));
        for a in 0..3 {
            assert!((lo[a] - leaf.lattice[a] as f64 * size).abs() < 1e-12);
            assert!((hi[a] - lo[a] - size).abs() < 1e-12);
        }
    }
}

#[test]
fn supercursors_reject_unfinalized_grids() {
    let g = HyperTreeGrid::unit(2, 2, [1, 1, 1]).unwrap();
    assert!(MooreSupercursor::to_root(&g, [0, 0, 0]).is_err());
    assert!(VonNeumannSupercursor::to_root(&g, [0, 0, 0]).is_err());
}
