//! WebAssembly bindings for the browser demo. Every drawing call returns a
//! flat `[x0, y0, x1, y1, ...]` list of segments in grid coordinates.

use htg_core::filters::{cell_centers, contour_values, geometry, ContourOptions};
use htg_core::io::generate_random;
use htg_core::{build_full_dual, HyperTreeGrid};
use wasm_bindgen::prelude::*;

/// Largest leaf count the demo accepts, to keep the page responsive.
const MAX_LEAVES: u64 = 400_000;

#[wasm_bindgen]
pub struct Demo {
    grid: HyperTreeGrid,
    values: Vec<f64>,
    range: (f64, f64),
}

#[wasm_bindgen]
impl Demo {
    /// Random 2D grid of `nx` by `ny` unit trees with the field
    /// `sin(1.7x) + cos(1.3y)` sampled at leaf centers.
    #[wasm_bindgen(constructor)]
    pub fn new(nx: usize, ny: usize, factor: usize, depth: u32, probability: f64, seed: u64) -> Result<Demo, JsError> {
        let grid = generate_random(2, factor, [nx, ny, 1], depth, probability, seed)?;
        if grid.leaf_total() > MAX_LEAVES {
            return Err(JsError::new(&format!(
                "{} leaves exceeds the demo limit of {MAX_LEAVES}",
                grid.leaf_total()
            )));
        }
        let centers = cell_centers(&grid, false)?;
        let mut values = vec![0.0; grid.vertex_total() as usize];
        let mut range = (f64::INFINITY, f64::NEG_INFINITY);
        for (p, g) in centers.points.iter().zip(centers.point_scalars.unwrap_or_default()) {
            let v = field(p[0], p[1]);
            values[g as usize] = v;
            range = (range.0.min(v), range.1.max(v));
        }
        Ok(Demo { grid, values, range })
    }

    /// `[xmin, ymin, xmax, ymax]`.
    pub fn bounds(&self) -> Vec<f64> {
        let (lo, hi) = self.grid.grid_bounds();
        vec![lo[0], lo[1], hi[0], hi[1]]
    }

    pub fn leaves(&self) -> f64 {
        self.grid.leaf_total() as f64
    }

    pub fn vertices(&self) -> f64 {
        self.grid.vertex_total() as f64
    }

    pub fn compact_bytes(&self) -> f64 {
        self.grid.memory_report().total_bytes as f64
    }

    pub fn field_min(&self) -> f64 {
        self.range.0
    }

    pub fn field_max(&self) -> f64 {
        self.range.1
    }

    /// Outlines of the leaf cells.
    pub fn leaf_edges(&self) -> Result<Vec<f64>, JsError> {
        let poly = geometry(&self.grid)?;
        let mut out = Vec::new();
        for w in poly.poly_offsets.windows(2) {
            let ring = &poly.polys[w[0] as usize..w[1] as usize];
            for (i, &a) in ring.iter().enumerate() {
                push_segment(&mut out, poly.points[a as usize], poly.points[ring[(i + 1) % ring.len()] as usize]);
            }
        }
        Ok(out)
    }

    /// Iso-line of the field at `iso`.
    pub fn contour(&self, iso: f64, adjusted: bool) -> Result<Vec<f64>, JsError> {
        let options = ContourOptions {
            adjusted,
            ..ContourOptions::default()
        };
        let poly = contour_values(&self.grid, &self.values, &[iso], &options)?;
        let mut out = Vec::with_capacity(4 * poly.lines.len());
        for [a, b] in poly.lines {
            push_segment(&mut out, poly.points[a as usize], poly.points[b as usize]);
        }
        Ok(out)
    }

    /// Edges of the dual mesh, whose vertices are the leaf centers (or the
    /// boundary-adjusted points).
    pub fn dual_edges(&self, adjusted: bool) -> Result<Vec<f64>, JsError> {
        let dual = build_full_dual(&self.grid, adjusted, Some(4 * MAX_LEAVES))?;
        let mut out = Vec::new();
        for i in 0..dual.cell_count() {
            let c = dual.cell(i);
            // Quad corners are in lattice order; walk them around the face.
            for (a, b) in [(0, 1), (1, 3), (3, 2), (2, 0)] {
                let (p, q) = (c[a] as usize, c[b] as usize);
                if p != q {
                    push_segment(&mut out, dual.points[p], dual.points[q]);
                }
            }
        }
        Ok(out)
    }
}

fn field(x: f64, y: f64) -> f64 {
    (1.7 * x).sin() + (1.3 * y).cos()
}

fn push_segment(out: &mut Vec<f64>, a: [f64; 3], b: [f64; 3]) {
    out.extend([a[0], a[1], b[0], b[1]]);
}
