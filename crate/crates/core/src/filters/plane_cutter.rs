use super::contour::{contour_values, ContourOptions};
use super::dot;
use crate::cursor::{check_traversable, walk_geometric, Cursor};
use crate::grid::HyperTreeGrid;
use crate::indexing::corner_count;
use crate::polydata::PolygonalOutput;
use crate::{Error, Result};

/// Plane through `origin` with normal `normal`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane {
    pub origin: [f64; 3],
    pub normal: [f64; 3],
}

impl Plane {
    pub fn new(origin: [f64; 3], normal: [f64; 3]) -> Result<Self> {
        let len = dot(normal, normal).sqrt();
        if !(len > 0.0 && len.is_finite()) || origin.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("cut plane needs a finite origin and a nonzero normal".into()));
        }
        Ok(Self {
            origin,
            normal: normal.map(|x| x / len),
        })
    }

    pub fn distance(&self, p: [f64; 3]) -> f64 {
        dot(self.normal, std::array::from_fn(|a| p[a] - self.origin[a]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutMode {
    /// Exact leaf cross-sections; neighboring polygons may form T-junctions.
    Primal,
    /// Contour of the signed distance on the dual; conforming.
    Dual,
}

/// Section of the visible leaves by a plane.
pub fn plane_cutter(grid: &HyperTreeGrid, plane: &Plane, mode: CutMode) -> Result<PolygonalOutput> {
    check_traversable(grid)?;
    match mode {
        CutMode::Primal => Ok(primal(grid, plane)),
        CutMode::Dual => {
            let mut distance = vec![0.0; grid.vertex_total() as usize];
            walk_geometric(grid, |c| {
                distance[c.global_index().expect("valid cursor") as usize] =
                    plane.distance(c.center().expect("valid cursor"));
                true
            });
            contour_values(grid, &distance, &[0.0], &ContourOptions::default())
        }
    }
}

/// Leaves with `min distance <= 0 < max distance` are cut; a plane lying on
/// an interface thus selects the cells on its positive side.
fn primal(grid: &HyperTreeGrid, plane: &Plane) -> PolygonalOutput {
    let d = grid.dimension();
    let corners = corner_count(d);
    let mut out = PolygonalOutput::new();
    walk_geometric(grid, |c| {
        let cell = c.state();
        let mut p = [[0.0; 3]; 8];
        let mut s = [0.0; 8];
        for k in 0..corners {
            p[k] = grid.cell_corner(cell, k);
            s[k] = plane.distance(p[k]);
        }
        let lo = s[..corners].iter().copied().fold(f64::INFINITY, f64::min);
        let hi = s[..corners].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !c.is_leaf() {
            return lo <= 0.0 && 0.0 <= hi;
        }
        if !(lo <= 0.0 && 0.0 < hi) {
            return false;
        }
        let mut section: Vec<[f64; 3]> = Vec::new();
        let mut push = |q: [f64; 3]| {
            if !section.contains(&q) {
                section.push(q);
            }
        };
        for k in 0..corners {
            if s[k] == 0.0 {
                push(p[k]);
            }
            for a in 0..d {
                let m = k | 1 << a;
                if m != k && (s[k] < 0.0) != (s[m] < 0.0) && s[k] != 0.0 && s[m] != 0.0 {
                    let t = s[k] / (s[k] - s[m]);
                    push(std::array::from_fn(|x| p[k][x] + t * (p[m][x] - p[k][x])));
                }
            }
        }
        match d {
            1 => {
                let id = out.add_point(section[0]);
                out.verts.push(id);
            }
            2 if section.len() >= 2 => {
                let a = out.add_point(section[0]);
                let b = out.add_point(section[1]);
                out.lines.push([a, b]);
            }
            3 if section.len() >= 3 => {
                sort_around(&mut section, plane.normal);
                let ids: Vec<u32> = section.iter().map(|&q| out.add_point(q)).collect();
                out.add_polygon(&ids);
            }
            _ => {}
        }
        false
    });
    out
}

/// Orders coplanar points counterclockwise around their centroid, seen from
/// the side `normal` points to.
fn sort_around(points: &mut [[f64; 3]], normal: [f64; 3]) {
    let n = points.len() as f64;
    let c: [f64; 3] = std::array::from_fn(|a| points.iter().map(|p| p[a]).sum::<f64>() / n);
    // any unit vector orthogonal to the normal, and its complement
    let pick = if normal[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let u = normalize(cross(normal, pick));
    let v = cross(normal, u);
    points.sort_by(|p, q| {
        let angle = |x: &[f64; 3]| {
            let r = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
            dot(r, v).atan2(dot(r, u))
        };
        angle(p).total_cmp(&angle(q))
    });
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let l = dot(a, a).sqrt();
    a.map(|x| x / l)
}
