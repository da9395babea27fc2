/// Points plus vertex, line and polygon cells.
///
/// Polygons are stored compressed: `polys` holds the point indices of every
/// polygon back to back and `poly_offsets[i]..poly_offsets[i + 1]` delimits
/// polygon `i`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolygonalOutput {
    pub points: Vec<[f64; 3]>,
    pub verts: Vec<u32>,
    pub lines: Vec<[u32; 2]>,
    pub polys: Vec<u32>,
    pub poly_offsets: Vec<u32>,
    /// One value per point when present.
    pub point_scalars: Option<Vec<f64>>,
    /// One value per cell, in the order verts, lines, polygons.
    pub cell_scalars: Option<Vec<f64>>,
    /// Global indices of the two leaves each point was interpolated
    /// between, lower first, for outputs built on the dual.
    pub point_sources: Option<Vec<[u64; 2]>>,
}

impl PolygonalOutput {
    pub fn new() -> Self {
        Self {
            poly_offsets: vec![0],
            ..Default::default()
        }
    }

    pub fn add_point(&mut self, p: [f64; 3]) -> u32 {
        self.points.push(p);
        (self.points.len() - 1) as u32
    }

    pub fn add_polygon(&mut self, ids: &[u32]) {
        if self.poly_offsets.is_empty() {
            self.poly_offsets.push(0);
        }
        self.polys.extend_from_slice(ids);
        self.poly_offsets.push(self.polys.len() as u32);
    }

    pub fn polygon_count(&self) -> usize {
        self.poly_offsets.len().saturating_sub(1)
    }

    pub fn polygon(&self, i: usize) -> &[u32] {
        &self.polys[self.poly_offsets[i] as usize..self.poly_offsets[i + 1] as usize]
    }

    pub fn polygons(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.polygon_count()).map(|i| self.polygon(i))
    }

    pub fn cell_count(&self) -> usize {
        self.verts.len() + self.lines.len() + self.polygon_count()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.cell_count() == 0
    }

    /// Checks that every cell refers to existing points.
    pub fn validate(&self) -> bool {
        let n = self.points.len() as u32;
        self.verts.iter().all(|&v| v < n)
            && self.lines.iter().flatten().all(|&v| v < n)
            && self.polys.iter().all(|&v| v < n)
            && self.point_scalars.as_ref().is_none_or(|s| s.len() == self.points.len())
            && self.cell_scalars.as_ref().is_none_or(|s| s.len() == self.cell_count())
            && self.point_sources.as_ref().is_none_or(|s| s.len() == self.points.len())
    }
}
