use crate::cursor::walk_geometric;
use crate::cursor::Cursor;
use crate::grid::HyperTreeGrid;
use crate::polydata::PolygonalOutput;
use crate::Result;

/// Centers of the visible leaves, in traversal order, with one vertex cell
/// per point when `as_polydata` is set. The cell or point scalar is the
/// source leaf global index.
pub fn cell_centers(grid: &HyperTreeGrid, as_polydata: bool) -> Result<PolygonalOutput> {
    crate::cursor::check_traversable(grid)?;
    let mut out = PolygonalOutput::new();
    let mut sources = Vec::new();
    walk_geometric(grid, |c| {
        if c.is_leaf() {
            let id = out.add_point(c.center().expect("valid cursor"));
            sources.push(c.global_index().expect("valid cursor") as f64);
            if as_polydata {
                out.verts.push(id);
            }
        }
        true
    });
    if as_polydata {
        out.cell_scalars = Some(sources.clone());
    }
    out.point_scalars = Some(sources);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cube() {
        let mut g = HyperTreeGrid::unit(3, 2, [1, 1, 1]).unwrap();
        g.finalize();
        let out = cell_centers(&g, true).unwrap();
        assert_eq!(out.points, vec![[0.5, 0.5, 0.5]]);
        assert_eq!(out.verts, vec![0]);
        assert!(out.validate());
    }

    #[test]
    fn quadtree_depth_one() {
        let mut g = HyperTreeGrid::unit(2, 2, [1, 1, 1]).unwrap();
        g.subdivide([0, 0, 0], 0).unwrap();
        g.finalize();
        let out = cell_centers(&g, false).unwrap();
        let pts: Vec<_> = out.points.iter().map(|p| (p[0], p[1])).collect();
        assert_eq!(pts, vec![(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)]);
        assert!(out.verts.is_empty());
    }

    #[test]
    fn fully_masked() {
        let mut g = HyperTreeGrid::unit(2, 2, [2, 1, 1]).unwrap();
        g.finalize();
        g.mask_set(0, true).unwrap();
        g.mask_set(1, true).unwrap();
        assert!(cell_centers(&g, true).unwrap().is_empty());
    }
}
