//! Text exporters: Wavefront OBJ and CSV for polygonal output, legacy VTK
//! for explicit cell lists. Reals are printed in their shortest round-trip
//! form, so re-reading a file gives back the same values.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::dual::DualMesh;
use crate::filters::UnstructuredGrid;
use crate::polydata::PolygonalOutput;
use crate::{Error, Result};

pub fn write_obj<W: Write>(poly: &PolygonalOutput, w: &mut W) -> Result<()> {
    writeln!(
        w,
        "# {} points {} vertices {} lines {} polygons",
        poly.points.len(),
        poly.verts.len(),
        poly.lines.len(),
        poly.polygon_count()
    )?;
    for p in &poly.points {
        writeln!(w, "v {} {} {}", p[0], p[1], p[2])?;
    }
    for v in &poly.verts {
        writeln!(w, "p {}", v + 1)?;
    }
    for [a, b] in &poly.lines {
        writeln!(w, "l {} {}", a + 1, b + 1)?;
    }
    let mut line = String::new();
    for polygon in poly.polygons() {
        line.clear();
        line.push('f');
        for i in polygon {
            write!(line, " {}", i + 1).expect("writing to a string");
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn export_obj(poly: &PolygonalOutput, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_obj(poly, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Points as `x,y,z` rows, with a fourth `scalar` column when the output
/// carries point scalars.
pub fn write_csv_points<W: Write>(poly: &PolygonalOutput, w: &mut W) -> Result<()> {
    match &poly.point_scalars {
        Some(s) => {
            writeln!(w, "x,y,z,scalar")?;
            for (p, v) in poly.points.iter().zip(s) {
                writeln!(w, "{},{},{},{}", p[0], p[1], p[2], v)?;
            }
        }
        None => {
            writeln!(w, "x,y,z")?;
            for p in &poly.points {
                writeln!(w, "{},{},{}", p[0], p[1], p[2])?;
            }
        }
    }
    Ok(())
}

pub fn export_csv_points(poly: &PolygonalOutput, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_csv_points(poly, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Contents of an OBJ file as read back by [`parse_obj`] (indices 0-based).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObjMesh {
    pub points: Vec<[f64; 3]>,
    pub verts: Vec<u32>,
    pub lines: Vec<[u32; 2]>,
    pub faces: Vec<Vec<u32>>,
}

/// Minimal OBJ reader for the `v`, `p`, `l` and `f` records written by
/// [`write_obj`]; other records are ignored.
pub fn parse_obj(text: &str) -> Result<ObjMesh> {
    let mut mesh = ObjMesh::default();
    for (n, line) in text.lines().enumerate() {
        let bad = |what: &str| Error::Format(format!("OBJ line {}: {what}", n + 1));
        let mut it = line.split_whitespace();
        let Some(tag) = it.next() else { continue };
        let index = |s: &str| -> Result<u32> {
            let first = s.split('/').next().unwrap_or(s);
            let i: u32 = first.parse().map_err(|_| bad("bad index"))?;
            i.checked_sub(1).ok_or_else(|| bad("index 0"))
        };
        match tag {
            "v" => {
                let c: Vec<f64> = it.map(|s| s.parse().map_err(|_| bad("bad coordinate"))).collect::<Result<_>>()?;
                if c.len() < 3 {
                    return Err(bad("vertex needs three coordinates"));
                }
                mesh.points.push([c[0], c[1], c[2]]);
            }
            "p" => {
                for s in it {
                    mesh.verts.push(index(s)?);
                }
            }
            "l" => {
                let ids: Vec<u32> = it.map(index).collect::<Result<_>>()?;
                for w in ids.windows(2) {
                    mesh.lines.push([w[0], w[1]]);
                }
            }
            "f" => mesh.faces.push(it.map(index).collect::<Result<_>>()?),
            _ => {}
        }
    }
    let n = mesh.points.len() as u32;
    let all = mesh.verts.iter().chain(mesh.lines.iter().flatten()).chain(mesh.faces.iter().flatten());
    if all.copied().any(|i| i >= n) {
        return Err(Error::Format("OBJ index past the last vertex".into()));
    }
    Ok(mesh)
}

/// Legacy ASCII VTK unstructured grid. `cells` hold `2^d` point indices in
/// line / quad / hexahedron winding; `cell_data` are per-cell scalars.
fn write_vtk_cells<W: Write>(
    w: &mut W,
    title: &str,
    dimension: usize,
    points: &[[f64; 3]],
    cells: &[u32],
    cell_data: &[(String, Vec<f64>)],
) -> Result<()> {
    let n = 1usize << dimension;
    let count = cells.len() / n;
    writeln!(w, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", points.len())?;
    for p in points {
        writeln!(w, "{} {} {}", p[0], p[1], p[2])?;
    }
    writeln!(w, "CELLS {} {}", count, count * (n + 1))?;
    for c in cells.chunks(n) {
        write!(w, "{n}")?;
        for i in c {
            write!(w, " {i}")?;
        }
        writeln!(w)?;
    }
    let kind = match dimension {
        1 => 3,
        2 => 9,
        _ => 12,
    };
    writeln!(w, "CELL_TYPES {count}")?;
    for _ in 0..count {
        writeln!(w, "{kind}")?;
    }
    if !cell_data.is_empty() {
        writeln!(w, "CELL_DATA {count}")?;
        for (name, values) in cell_data {
            writeln!(w, "SCALARS {} double 1\nLOOKUP_TABLE default", name.replace(' ', "_"))?;
            for v in values {
                writeln!(w, "{v}")?;
            }
        }
    }
    Ok(())
}

pub fn write_vtk_unstructured<W: Write>(grid: &UnstructuredGrid, w: &mut W) -> Result<()> {
    write_vtk_cells(w, "leaf cells", grid.dimension, &grid.points, &grid.connectivity, &grid.fields)
}

/// Dual mesh as legacy VTK; cells are rewound from binary corner order.
pub fn write_vtk_dual<W: Write>(dual: &DualMesh, w: &mut W) -> Result<()> {
    let winding: &[usize] = match dual.dimension {
        1 => &[0, 1],
        2 => &[0, 1, 3, 2],
        _ => &[0, 1, 3, 2, 4, 5, 7, 6],
    };
    let cells: Vec<u32> = (0..dual.cell_count())
        .flat_map(|i| winding.iter().map(move |&k| dual.cell(i)[k]))
        .collect();
    write_vtk_cells(w, "dual mesh", dual.dimension, &dual.points, &cells, &[])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> PolygonalOutput {
        let mut p = PolygonalOutput::new();
        for q in [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]] {
            p.add_point(q);
        }
        p.add_polygon(&[0, 1, 2, 3]);
        p
    }

    fn obj(p: &PolygonalOutput) -> String {
        let mut buf = Vec::new();
        write_obj(p, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn one_quad() {
        let text = obj(&quad());
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 4);
        assert!(text.lines().any(|l| l == "f 1 2 3 4"));
    }

    #[test]
    fn empty_output_is_header_only() {
        let text = obj(&PolygonalOutput::new());
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with('#'));
    }

    #[test]
    fn round_trip_is_exact() {
        let mut p = quad();
        p.add_point([0.1 + 0.2, 1.0 / 3.0, -1e-300]);
        p.lines.push([4, 0]);
        p.verts.push(4);
        let m = parse_obj(&obj(&p)).unwrap();
        assert_eq!(m.points, p.points);
        assert_eq!(m.faces, vec![vec![0, 1, 2, 3]]);
        assert_eq!(m.lines, p.lines);
        assert_eq!(m.verts, p.verts);
    }

    #[test]
    fn csv_columns() {
        let mut p = quad();
        let mut buf = Vec::new();
        write_csv_points(&p, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("x,y,z\n0,0,0\n"));
        p.point_scalars = Some(vec![1.0, 2.0, 3.0, 4.5]);
        let mut buf = Vec::new();
        write_csv_points(&p, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().lines().nth(4) == Some("0,1,0,4.5"));
    }

    #[test]
    fn bad_obj() {
        assert!(parse_obj("v 0 0 0\nf 1 2 3\n").is_err());
        assert!(parse_obj("v 0 x 0\n").is_err());
    }
}
