use std::collections::VecDeque;
use std::sync::Arc;

use super::{finish_copy, TreeCopy};
use crate::grid::HyperTreeGrid;
use crate::tree::HyperTree;
use crate::Result;

/// Copy of `grid` with every tree cut below `depth_max`. A node at the limit
/// becomes a leaf and keeps its own mask bit: an unmasked node always holds
/// some visible leaf (possibly itself, when all its children are masked), so
/// it stays visible.
pub fn depth_limiter(grid: &HyperTreeGrid, depth_max: u32) -> Result<HyperTreeGrid> {
    let mut copy = TreeCopy {
        trees: vec![None; grid.slot_count()],
        sources: vec![Vec::new(); grid.slot_count()],
    };
    for (slot, tree) in grid.trees() {
        let start = grid.start_of(slot);
        let mut out = HyperTree::new(grid.dimension(), grid.factor())?;
        let mut sources = vec![start];
        let mut queue = VecDeque::from([(0u32, 0u32, 0u32)]);
        while let Some((v, w, depth)) = queue.pop_front() {
            let Some(eldest) = tree.eldest_child(v) else {
                continue;
            };
            if depth == depth_max {
                continue;
            }
            let first = out.subdivide(w)?;
            for i in 0..tree.child_count() as u32 {
                sources.push(start + (eldest + i) as u64);
                queue.push_back((eldest + i, first + i, depth + 1));
            }
        }
        copy.trees[slot] = Some(Arc::new(out));
        copy.sources[slot] = sources;
    }
    let out = grid.with_trees(copy.trees.clone());
    finish_copy(out, grid, &copy, |g| grid.mask().is_some_and(|m| m[g as usize]))
}
