use super::{mask_leaves, with_mask};
use crate::cursor::{Cursor, GridCursor};
use crate::grid::HyperTreeGrid;
use crate::indexing::corner_count;
use crate::{Error, Result};

/// Which side of a halfspace clip is kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `x_axis >= omega`.
    Above,
    /// `x_axis <= omega`.
    Below,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClipMode {
    /// Keeps leaves crossed by the plane `x_axis = omega` or lying on the
    /// kept side.
    Halfspace { axis: usize, omega: f64, side: Side },
    /// Keeps leaves overlapping the box with a nonempty interior.
    Box { origin: [f64; 3], size: [f64; 3] },
    /// Keeps leaves where
    /// `c0 + c1 x + c2 y + c3 z + c4 x² + c5 y² + c6 z² + c7 xy + c8 yz + c9 zx`
    /// is nonnegative at every corner.
    Quadric([f64; 10]),
}

impl ClipMode {
    fn validate(&self) -> Result<()> {
        match self {
            ClipMode::Halfspace { axis, omega, .. } => {
                if *axis >= 3 || !omega.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "halfspace clip needs an axis below 3 and a finite position, got {axis} and {omega}"
                    )));
                }
            }
            ClipMode::Box { origin, size } => {
                if origin.iter().chain(size).any(|x| !x.is_finite()) {
                    return Err(Error::InvalidParameter("clip box must be finite".into()));
                }
            }
            ClipMode::Quadric(c) => {
                if c.iter().any(|x| !x.is_finite()) || c.iter().all(|&x| x == 0.0) {
                    return Err(Error::InvalidParameter(
                        "quadric coefficients must be finite and not all zero".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn quadric(c: &[f64; 10], p: [f64; 3]) -> f64 {
    let [x, y, z] = p;
    c[0] + c[1] * x
        + c[2] * y
        + c[3] * z
        + c[4] * x * x
        + c[5] * y * y
        + c[6] * z * z
        + c[7] * x * y
        + c[8] * y * z
        + c[9] * z * x
}

/// Masks every leaf failing the clip condition. Topology and fields are
/// shared with the input; the output always carries a mask.
pub fn axis_clip(grid: &HyperTreeGrid, mode: ClipMode) -> Result<HyperTreeGrid> {
    mode.validate()?;
    let d = grid.dimension();
    let mask = mask_leaves(grid, &mut |c: &GridCursor<'_>| {
        let cell = c.state();
        match mode {
            ClipMode::Halfspace { axis, omega, side } => {
                let (lo, hi) = grid.cell_bounds(cell);
                match side {
                    Side::Above => hi[axis] >= omega,
                    Side::Below => lo[axis] <= omega,
                }
            }
            ClipMode::Box { origin, size } => {
                let (lo, hi) = grid.cell_bounds(cell);
                (0..d).all(|a| {
                    let (blo, bhi) = (origin[a].min(origin[a] + size[a]), origin[a].max(origin[a] + size[a]));
                    lo[a].max(blo) < hi[a].min(bhi)
                })
            }
            ClipMode::Quadric(coeffs) => {
                (0..corner_count(d)).all(|k| quadric(&coeffs, grid.cell_corner(cell, k)) >= 0.0)
            }
        }
    });
    with_mask(grid, mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(d: usize, f: usize, e: [usize; 3], depth: u32) -> HyperTreeGrid {
        let mut g = HyperTreeGrid::unit(d, f, e).unwrap();
        for (slot, _) in g.clone().trees() {
            let coords = g.coords_of(slot);
            let mut frontier = vec![0u32];
            for _ in 0..depth {
                let mut next = Vec::new();
                for v in frontier {
                    let first = g.subdivide(coords, v).unwrap();
                    next.extend(first..first + g.child_count() as u32);
                }
                frontier = next;
            }
        }
        g.finalize();
        g
    }

    fn visible_leaves(g: &HyperTreeGrid) -> usize {
        let mut n = 0;
        crate::cursor::walk_grid(g, |c| {
            n += c.is_leaf() as usize;
            true
        });
        n
    }

    #[test]
    fn halfspace_keeping_everything() {
        let g = unit(2, 2, [2, 2, 1], 2);
        let side = Side::Above;
        let c = axis_clip(&g, ClipMode::Halfspace { axis: 0, omega: -1.0, side }).unwrap();
        assert_eq!(visible_leaves(&c), visible_leaves(&g));
    }

    #[test]
    fn halfspace_keeps_crossed_leaves() {
        let g = unit(1, 2, [4, 1, 1], 0);
        let c = axis_clip(&g, ClipMode::Halfspace { axis: 0, omega: 2.5, side: Side::Below }).unwrap();
        assert_eq!(visible_leaves(&c), 3);
    }

    #[test]
    fn box_equal_to_bounds() {
        let g = unit(3, 2, [2, 1, 1], 2);
        let mode = ClipMode::Box { origin: [0.0; 3], size: [2.0, 1.0, 1.0] };
        assert_eq!(visible_leaves(&axis_clip(&g, mode).unwrap()), 64 * 2);
        let half = ClipMode::Box { origin: [0.0; 3], size: [1.0, 1.0, 1.0] };
        assert_eq!(visible_leaves(&axis_clip(&g, half).unwrap()), 64);
    }

    #[test]
    fn unit_ball_quadric() {
        let g = unit(2, 2, [2, 2, 1], 3);
        let ball = [1.0, 0.0, 0.0, 0.0, -1.0, -1.0, -1.0, 0.0, 0.0, 0.0];
        let c = axis_clip(&g, ClipMode::Quadric(ball)).unwrap();
        let mut n = 0;
        crate::cursor::walk_grid(&c, |cur| {
            if cur.is_leaf() {
                n += 1;
                for k in 0..4 {
                    let p = c.cell_corner(cur.state(), k);
                    assert!(p[0] * p[0] + p[1] * p[1] <= 1.0);
                }
            }
            true
        });
        assert!(n > 0);
    }

    #[test]
    fn zero_quadric_is_rejected() {
        let g = unit(1, 2, [1, 1, 1], 0);
        assert!(axis_clip(&g, ClipMode::Quadric([0.0; 10])).is_err());
    }
}
