use std::collections::VecDeque;
use std::sync::Arc;

use super::{finish_copy, TreeCopy};
use crate::cursor::{Cursor, GeometricCursor};
use crate::grid::HyperTreeGrid;
use crate::tree::HyperTree;
use crate::{Error, Result};

/// Cross-section of `grid` by the plane `x_axis = w`, as a grid of one
/// dimension less over the remaining axes (in their original order). Cells
/// are half-open along the cut axis, so a plane lying on an interface selects
/// the cells above it. The output orientation records the cut axis and its
/// free coordinate holds `w`.
pub fn axis_cut(grid: &HyperTreeGrid, axis: usize, w: f64) -> Result<HyperTreeGrid> {
    let d = grid.dimension();
    if d < 2 {
        return Err(Error::InvalidParameter("axis cut needs a grid of dimension 2 or 3".into()));
    }
    if axis >= d {
        return Err(Error::InvalidParameter(format!("cut axis {axis} is not a grid axis")));
    }
    let c = grid.coordinates(axis);
    let layer = (0..grid.extent()[axis])
        .find(|&i| half_open_contains(c[i], c[i + 1], w))
        .ok_or_else(|| Error::InvalidParameter(format!("cut plane x{axis} = {w} misses the grid")))?;

    let kept: Vec<usize> = (0..d).filter(|&a| a != axis).collect();
    let mut extent = [1usize; 3];
    let mut coordinates: [Vec<f64>; 3] = Default::default();
    for (o, &a) in kept.iter().enumerate() {
        extent[o] = grid.extent()[a];
        coordinates[o] = grid.coordinates(a).to_vec();
    }
    coordinates[d - 1] = vec![w];
    let mut out = HyperTreeGrid::new(d - 1, grid.factor(), extent, coordinates, axis)?;

    let mut copy = TreeCopy {
        trees: vec![None; out.slot_count()],
        sources: vec![Vec::new(); out.slot_count()],
    };
    for slot in 0..out.slot_count() {
        let oc = out.coords_of(slot);
        let mut ic = [0usize; 3];
        for (o, &a) in kept.iter().enumerate() {
            ic[a] = oc[o];
        }
        ic[axis] = layer;
        if grid.tree(ic).is_err() {
            continue;
        }
        let mut tree = HyperTree::new(d - 1, grid.factor())?;
        let root = GeometricCursor::to_root(grid, ic)?;
        let mut sources = vec![root.global_index().expect("present tree")];
        let mut queue = VecDeque::from([(root, 0u32)]);
        while let Some((cursor, v)) = queue.pop_front() {
            if cursor.is_leaf() {
                continue;
            }
            let first = tree.subdivide(v)?;
            let mut next = first;
            for i in 0..grid.child_count() {
                let child = cursor.child(i)?;
                let e = child.embedding().expect("valid cursor");
                if half_open_contains(e.origin[axis], e.origin[axis] + e.size[axis], w) {
                    sources.push(child.global_index().expect("valid cursor"));
                    queue.push_back((child, next));
                    next += 1;
                }
            }
            debug_assert_eq!(next - first, tree.child_count() as u32);
        }
        copy.trees[slot] = Some(Arc::new(tree));
        copy.sources[slot] = sources;
    }
    for (slot, t) in copy.trees.iter().enumerate() {
        out.set_tree(slot, t.clone());
    }
    finish_copy(out, grid, &copy, |g| grid.is_masked_index(g))
}

fn half_open_contains(a: f64, b: f64, w: f64) -> bool {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    lo <= w && w < hi
}
