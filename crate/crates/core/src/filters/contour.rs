//! Two-stage iso-contouring on the virtual dual.
//!
//! The pre-pass computes, for every vertex, the sign of each iso-value test
//! and whether the subtree below it is sign-uniform. The main pass walks the
//! grid with a Moore supercursor, skips every coarse cell whose whole
//! neighborhood is uniform and agrees in sign, and runs marching squares or
//! cubes on the dual cells owned by the leaves it reaches.

use std::collections::HashMap;

use bitvec::vec::BitVec;
use rayon::prelude::*;
use smallvec::SmallVec;

use super::marching::{march_square, marching_cubes_table, CUBE_EDGES, SQUARE_EDGES};
use crate::cursor::{check_traversable, Cursor, GridCursor};
use crate::dual::{adjust_dual_point, is_owner};
use crate::grid::HyperTreeGrid;
use crate::polydata::PolygonalOutput;
use crate::supercursor::{depth_first_tree, MooreSupercursor};
use crate::{Error, Result};

/// Per iso-value sign arrays and the truth array, over global indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SignArrays {
    iso_values: Vec<f64>,
    signs: Vec<BitVec>,
    truth: BitVec,
}

impl SignArrays {
    pub fn iso_values(&self) -> &[f64] {
        &self.iso_values
    }

    /// Whether the value at `index` exceeds iso-value `j`; for a coarse
    /// vertex, the common sign of its subtree when that subtree is uniform.
    pub fn sign(&self, j: usize, index: u64) -> bool {
        self.signs[j][index as usize]
    }

    /// Whether the subtree below `index` is not sign-uniform.
    pub fn truth(&self, index: u64) -> bool {
        self.truth[index as usize]
    }

    pub fn signs(&self, j: usize) -> &BitVec {
        &self.signs[j]
    }

    pub fn truth_array(&self) -> &BitVec {
        &self.truth
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContourOptions {
    /// Skip subtrees that cannot hold any part of the contour. Turning this
    /// off yields the same output, only slower.
    pub preselect: bool,
    /// Interpolate between adjusted dual points instead of leaf centers.
    pub adjusted: bool,
    /// Worker threads for the main pass; trees are processed independently
    /// and merged in slot order, so the output does not depend on it.
    pub threads: usize,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self {
            preselect: true,
            adjusted: false,
            threads: 1,
        }
    }
}

fn check_inputs(grid: &HyperTreeGrid, values: &[f64], iso_values: &[f64]) -> Result<()> {
    check_traversable(grid)?;
    if iso_values.is_empty() {
        return Err(Error::InvalidParameter("at least one iso-value is needed".into()));
    }
    if (values.len() as u64) < grid.vertex_total() {
        return Err(Error::FieldLength {
            name: "contour values".into(),
            len: values.len(),
            expected: grid.vertex_total(),
        });
    }
    Ok(())
}

pub fn contour_preprocess(grid: &HyperTreeGrid, field: &str, iso_values: &[f64]) -> Result<SignArrays> {
    contour_preprocess_values(grid, grid.field(field)?, iso_values)
}

/// Sign and truth arrays of `values` (indexed by global index).
pub fn contour_preprocess_values(grid: &HyperTreeGrid, values: &[f64], iso_values: &[f64]) -> Result<SignArrays> {
    check_inputs(grid, values, iso_values)?;
    let n = grid.vertex_total() as usize;
    let mut sa = SignArrays {
        iso_values: iso_values.to_vec(),
        signs: vec![BitVec::repeat(false, n); iso_values.len()],
        truth: BitVec::repeat(false, n),
    };
    for (slot, _) in grid.trees() {
        preprocess(&GridCursor::at_slot(grid, slot), values, &mut sa);
    }
    Ok(sa)
}

fn preprocess(c: &GridCursor<'_>, values: &[f64], sa: &mut SignArrays) {
    if c.is_masked() {
        return;
    }
    let g = c.global_index().expect("valid cursor") as usize;
    if c.is_leaf() {
        for (j, iso) in sa.iso_values.iter().enumerate() {
            let s = values[g] > *iso;
            sa.signs[j].set(g, s);
        }
        return;
    }
    let mut truth = false;
    let mut first: Option<usize> = None;
    for i in 0..c.grid().child_count() {
        let child = c.child(i).expect("non-leaf cursor");
        preprocess(&child, values, sa);
        if child.is_masked() {
            continue;
        }
        let h = child.global_index().expect("valid cursor") as usize;
        truth |= sa.truth[h];
        match first {
            None => first = Some(h),
            Some(f) => truth |= sa.signs.iter().any(|s| s[f] != s[h]),
        }
    }
    sa.truth.set(g, truth);
    if !truth {
        let f = first.expect("a non-leaf cell has a visible child");
        for s in sa.signs.iter_mut() {
            let v = s[f];
            s.set(g, v);
        }
    }
}

/// Contour of a grid field at the given iso-values.
pub fn contour(grid: &HyperTreeGrid, field: &str, iso_values: &[f64]) -> Result<PolygonalOutput> {
    contour_values(grid, grid.field(field)?, iso_values, &ContourOptions::default())
}

/// Same as [`contour`] but descending everywhere.
pub fn contour_naive(grid: &HyperTreeGrid, field: &str, iso_values: &[f64]) -> Result<PolygonalOutput> {
    let options = ContourOptions {
        preselect: false,
        ..Default::default()
    };
    contour_values(grid, grid.field(field)?, iso_values, &options)
}

/// Iso-value index and the two source leaves of an interpolated point,
/// lower global index first.
type CrossingKey = (u32, u64, u64);

#[derive(Default)]
struct TreeContour {
    points: Vec<(CrossingKey, [f64; 3])>,
    ids: HashMap<CrossingKey, u32>,
    cells: Vec<(u32, SmallVec<[u32; 3]>)>,
}

impl TreeContour {
    fn point(&mut self, key: CrossingKey, a: ([f64; 3], f64), b: ([f64; 3], f64), iso: f64) -> u32 {
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let t = (iso - a.1) / (b.1 - a.1);
        let p = std::array::from_fn(|k| a.0[k] + t * (b.0[k] - a.0[k]));
        let id = self.points.len() as u32;
        self.points.push((key, p));
        self.ids.insert(key, id);
        id
    }
}

/// Contour of `values` (indexed by global index) at the given iso-values.
pub fn contour_values(
    grid: &HyperTreeGrid,
    values: &[f64],
    iso_values: &[f64],
    options: &ContourOptions,
) -> Result<PolygonalOutput> {
    check_inputs(grid, values, iso_values)?;
    let signs = if options.preselect {
        Some(contour_preprocess_values(grid, values, iso_values)?)
    } else {
        None
    };
    let slots: Vec<usize> = grid.trees().map(|(s, _)| s).collect();
    let run = |slot: &usize| contour_tree(grid, *slot, values, iso_values, signs.as_ref(), options.adjusted);
    let pieces: Vec<TreeContour> = if options.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.threads)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| slots.par_iter().map(run).collect())
    } else {
        slots.iter().map(run).collect()
    };
    Ok(merge(grid.dimension(), iso_values, pieces))
}

fn merge(dimension: usize, iso_values: &[f64], pieces: Vec<TreeContour>) -> PolygonalOutput {
    let mut out = PolygonalOutput::new();
    let mut ids: HashMap<CrossingKey, u32> = HashMap::new();
    let mut point_iso = Vec::new();
    let mut sources = Vec::new();
    let mut cell_iso = Vec::new();
    for piece in pieces {
        let local: Vec<u32> = piece
            .points
            .iter()
            .map(|&(key, p)| {
                *ids.entry(key).or_insert_with(|| {
                    point_iso.push(iso_values[key.0 as usize]);
                    sources.push([key.1, key.2]);
                    out.add_point(p)
                })
            })
            .collect();
        for (j, cell) in piece.cells {
            let c: SmallVec<[u32; 3]> = cell.iter().map(|&i| local[i as usize]).collect();
            match dimension {
                1 => out.verts.push(c[0]),
                2 => out.lines.push([c[0], c[1]]),
                _ => out.add_polygon(&c),
            }
            cell_iso.push(iso_values[j as usize]);
        }
    }
    out.point_scalars = Some(point_iso);
    out.cell_scalars = Some(cell_iso);
    out.point_sources = Some(sources);
    out
}

fn contour_tree(
    grid: &HyperTreeGrid,
    slot: usize,
    values: &[f64],
    iso_values: &[f64],
    signs: Option<&SignArrays>,
    adjusted: bool,
) -> TreeContour {
    let mut acc = TreeContour::default();
    depth_first_tree(grid, slot, &mut |s: &MooreSupercursor<'_>| {
        if s.is_masked() {
            return false;
        }
        if s.is_leaf() {
            for corner in 0..s.corner_count() {
                if is_owner(s, corner) {
                    march(grid, s, corner, values, iso_values, adjusted, &mut acc);
                }
            }
            return false;
        }
        signs.is_none_or(|sa| may_cross(s, sa))
    });
    acc
}

/// Whether the neighborhood of a coarse cell holds a non-uniform subtree or
/// a sign change.
fn may_cross(s: &MooreSupercursor<'_>, sa: &SignArrays) -> bool {
    let i = s.global_index().expect("valid center");
    if sa.truth(i) {
        return true;
    }
    (0..s.cursor_count()).any(|k| {
        if k == s.center_index() || s.neighbor(k).is_masked() {
            return false;
        }
        let l = s.neighbor_global_index(k).expect("valid neighbor");
        sa.truth(l) || (0..sa.signs.len()).any(|j| sa.sign(j, i) != sa.sign(j, l))
    })
}

fn march(
    grid: &HyperTreeGrid,
    s: &MooreSupercursor<'_>,
    corner: usize,
    values: &[f64],
    iso_values: &[f64],
    adjusted: bool,
    acc: &mut TreeContour,
) {
    let n = s.corner_count();
    let mut gids = [0u64; 8];
    let mut pts = [[0.0; 3]; 8];
    let mut vals = [0.0; 8];
    for j in 0..n {
        let k = s.corner_neighbor(corner, j);
        gids[j] = s.neighbor_global_index(k).expect("owned corner");
        pts[j] = s.neighbor_center(k).expect("owned corner");
        if adjusted {
            pts[j] = adjust_dual_point(grid, pts[j], &s.embedding(k).expect("owned corner"));
        }
        vals[j] = values[gids[j] as usize];
    }
    let crossing = |acc: &mut TreeContour, j: usize, a: usize, b: usize| {
        let (a, b) = if gids[a] <= gids[b] { (a, b) } else { (b, a) };
        let key = (j as u32, gids[a], gids[b]);
        acc.point(key, (pts[a], vals[a]), (pts[b], vals[b]), iso_values[j])
    };
    for (j, &iso) in iso_values.iter().enumerate() {
        let config = vals[..n]
            .iter()
            .enumerate()
            .fold(0usize, |c, (k, &v)| c | ((v > iso) as usize) << k);
        if config == 0 || config == (1 << n) - 1 {
            continue;
        }
        match grid.dimension() {
            1 => {
                let id = crossing(acc, j, 0, 1);
                acc.cells.push((j as u32, SmallVec::from_slice(&[id])));
            }
            2 => {
                let inside = [0, 1, 2, 3].map(|k| config >> k & 1 == 1);
                let mean = vals[..4].iter().sum::<f64>() / 4.0;
                for [e0, e1] in march_square(inside, mean > iso) {
                    let (a0, b0) = SQUARE_EDGES[e0 as usize];
                    let (a1, b1) = SQUARE_EDGES[e1 as usize];
                    let p = crossing(acc, j, a0, b0);
                    let q = crossing(acc, j, a1, b1);
                    if p != q {
                        acc.cells.push((j as u32, SmallVec::from_slice(&[p, q])));
                    }
                }
            }
            _ => {
                for tri in &marching_cubes_table()[config].triangles {
                    let ids = tri.map(|e| {
                        let (a, b) = CUBE_EDGES[e as usize];
                        crossing(acc, j, a, b)
                    });
                    if ids[0] != ids[1] && ids[1] != ids[2] && ids[0] != ids[2] {
                        acc.cells.push((j as u32, SmallVec::from_slice(&ids)));
                    }
                }
            }
        }
    }
}
