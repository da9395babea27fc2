use super::{mask_leaves, with_mask};
use crate::cursor::Cursor;
use crate::grid::HyperTreeGrid;
use crate::Result;

/// Masks every leaf whose `field` value lies outside `[lo, hi]`. Topology and
/// fields are shared with the input; the output always carries a mask.
pub fn threshold(grid: &HyperTreeGrid, field: &str, lo: f64, hi: f64) -> Result<HyperTreeGrid> {
    let values = grid.field(field)?;
    let mask = mask_leaves(grid, &mut |c| {
        let v = values[c.global_index().expect("valid cursor") as usize];
        lo <= v && v <= hi
    });
    with_mask(grid, mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generate_random;

    fn visible_leaf_depths(g: &HyperTreeGrid) -> Vec<u32> {
        let mut out = Vec::new();
        crate::cursor::walk_grid(g, |c| {
            if c.is_leaf() {
                out.push(c.depth());
            }
            true
        });
        out
    }

    #[test]
    fn full_range_masks_nothing() {
        let g = generate_random(2, 2, [3, 2, 1], 3, 0.5, 1).unwrap();
        let t = threshold(&g, "Depth", f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert!(t.mask().unwrap().not_any());
    }

    #[test]
    fn depth_range_masks_shallow_leaves() {
        let g = generate_random(2, 2, [3, 2, 1], 4, 0.5, 9).unwrap();
        let t = threshold(&g, "Depth", 1.0, 3.0).unwrap();
        let depths = visible_leaf_depths(&t);
        assert!(!depths.is_empty());
        assert!(depths.iter().all(|&d| (1..=3).contains(&d)));
        let expected = visible_leaf_depths(&g).into_iter().filter(|d| (1..=3).contains(d)).count();
        assert_eq!(depths.len(), expected);
    }

    #[test]
    fn empty_range_masks_everything() {
        let g = generate_random(3, 2, [2, 2, 2], 2, 0.5, 4).unwrap();
        let t = threshold(&g, "Depth", 1.0, 0.0).unwrap();
        assert!(visible_leaf_depths(&t).is_empty());
    }

    #[test]
    fn unknown_field() {
        let g = generate_random(1, 2, [2, 1, 1], 1, 0.5, 4).unwrap();
        assert!(threshold(&g, "nope", 0.0, 1.0).is_err());
    }
}
