use crate::grid::HyperTreeGrid;
use crate::{Error, Result};

/// Mirror image of `grid` through the plane `x_axis = omega`.
///
/// Only the coordinate list of `axis` is rewritten, as `2 omega - x`; it then
/// runs the other way, which flips the orientation of the tree order and of
/// the child order along that axis at no cost. Trees, mask and fields are
/// shared with the input, so the cost does not depend on refinement.
pub fn axis_reflection(grid: &HyperTreeGrid, axis: usize, omega: f64) -> Result<HyperTreeGrid> {
    if axis >= 3 {
        return Err(Error::InvalidParameter(format!("reflection axis {axis} is not 0, 1 or 2")));
    }
    if !omega.is_finite() {
        return Err(Error::InvalidParameter("reflection plane must be finite".into()));
    }
    let coords = grid.coordinates(axis).iter().map(|x| 2.0 * omega - x).collect();
    Ok(grid.with_axis_coordinates(axis, coords))
}
