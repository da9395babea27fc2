//! Cartesian arrangement of hypertrees over rectilinear coordinates.

use std::sync::Arc;

use bitvec::vec::BitVec;
use indexmap::IndexMap;

use crate::indexing::{check_dimension, check_factor, child_count};
use crate::tree::HyperTree;
use crate::{Error, Result};

/// Origin and signed size of an axis-aligned box, plus the grid orientation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometricEmbedding {
    pub origin: [f64; 3],
    pub size: [f64; 3],
    pub orientation: usize,
}

impl GeometricEmbedding {
    /// Componentwise `(min, max)` of the box, whatever the sign of `size`.
    pub fn bounds(&self) -> ([f64; 3], [f64; 3]) {
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for a in 0..3 {
            let b = self.origin[a] + self.size[a];
            lo[a] = self.origin[a].min(b);
            hi[a] = self.origin[a].max(b);
        }
        (lo, hi)
    }

    pub fn center(&self) -> [f64; 3] {
        std::array::from_fn(|a| self.origin[a] + 0.5 * self.size[a])
    }
}

/// Byte counts under the canonical model: 4-byte indices, 8-byte reals and
/// one bit per vertex for the mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MemoryReport {
    pub topology_bytes: u64,
    pub coordinates_bytes: u64,
    pub mask_bytes: u64,
    pub attribute_bytes: u64,
    pub total_bytes: u64,
}

impl MemoryReport {
    fn new(topology: u64, coordinates: u64, mask: u64, attributes: u64) -> Self {
        Self {
            topology_bytes: topology,
            coordinates_bytes: coordinates,
            mask_bytes: mask,
            attribute_bytes: attributes,
            total_bytes: topology + coordinates + mask + attributes,
        }
    }

    /// Footprint of several grids that may share trees, coordinate axes,
    /// masks or fields; every shared allocation is counted once.
    pub fn resident(grids: &[&HyperTreeGrid]) -> Self {
        let mut seen = std::collections::HashSet::new();
        let (mut topo, mut coords, mut mask, mut attrs) = (0u64, 0u64, 0u64, 0u64);
        for g in grids {
            for t in g.trees.iter().flatten() {
                if seen.insert(Arc::as_ptr(t) as usize) {
                    topo += 4 * t.topology_entries() as u64;
                }
            }
            for c in &g.coordinates {
                if seen.insert(Arc::as_ptr(c) as usize) {
                    coords += 8 * c.len() as u64;
                }
            }
            if let Some(m) = &g.mask {
                if seen.insert(Arc::as_ptr(m) as usize) {
                    mask += (m.len() as u64).div_ceil(8);
                }
            }
            for f in g.fields.values() {
                if seen.insert(Arc::as_ptr(f) as *const u8 as usize) {
                    attrs += 8 * f.len() as u64;
                }
            }
        }
        Self::new(topo, coords, mask, attrs)
    }
}

/// A rectilinear, tree-based AMR grid.
///
/// The grid is built in two phases. Right after [`HyperTreeGrid::new`] every
/// tree is a single leaf and [`HyperTreeGrid::subdivide`] may refine them.
/// [`HyperTreeGrid::finalize`] then freezes the topology and the global index
/// starts; the mask and attribute fields, which are indexed by global index,
/// can only be attached afterwards.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperTreeGrid {
    dimension: usize,
    factor: usize,
    extent: [usize; 3],
    orientation: usize,
    coordinates: [Arc<Vec<f64>>; 3],
    trees: Vec<Option<Arc<HyperTree>>>,
    starts: Vec<u64>,
    vertex_total: u64,
    explicit_starts: bool,
    finalized: bool,
    mask: Option<Arc<BitVec>>,
    fields: IndexMap<String, Arc<Vec<f64>>>,
}

impl HyperTreeGrid {
    /// Creates a grid of one-leaf trees. `coordinates[k]` must hold `E_k + 1`
    /// strictly monotone values for every axis `k < d`; unused axes take at
    /// most one value (their fixed position, 0 when omitted).
    pub fn new(
        dimension: usize,
        factor: usize,
        extent: [usize; 3],
        coordinates: [Vec<f64>; 3],
        orientation: usize,
    ) -> Result<Self> {
        check_dimension(dimension)?;
        check_factor(factor)?;
        if (0..3).any(|k| if k < dimension { extent[k] == 0 } else { extent[k] != 1 }) {
            return Err(Error::InvalidExtent { dimension, extent });
        }
        if (dimension == 3 && orientation != 0) || orientation > 2 {
            return Err(Error::InvalidOrientation {
                dimension,
                orientation,
            });
        }
        let [c0, c1, c2] = coordinates;
        let mut coords = [c0, c1, c2];
        for (axis, c) in coords.iter_mut().enumerate() {
            if axis < dimension {
                check_axis(axis, c, extent[axis])?;
            } else {
                if c.len() > 2 {
                    return Err(Error::InvalidCoordinates {
                        axis,
                        reason: format!("unused axis takes at most one position, got {} values", c.len()),
                    });
                }
                let position = c.first().copied().unwrap_or(0.0);
                if !position.is_finite() {
                    return Err(Error::InvalidCoordinates {
                        axis,
                        reason: "non-finite position".into(),
                    });
                }
                *c = vec![position];
            }
        }
        let slots = extent.iter().product::<usize>();
        let single = Arc::new(HyperTree::new(dimension, factor)?);
        let mut grid = Self {
            dimension,
            factor,
            extent,
            orientation,
            coordinates: coords.map(Arc::new),
            trees: vec![Some(single); slots],
            starts: Vec::new(),
            vertex_total: 0,
            explicit_starts: false,
            finalized: false,
            mask: None,
            fields: IndexMap::new(),
        };
        grid.assign_cumulative_starts();
        Ok(grid)
    }

    /// Grid over prebuilt trees, one per slot (`None` for absent trees). The
    /// result is still in its construction phase.
    pub fn from_trees(
        dimension: usize,
        factor: usize,
        extent: [usize; 3],
        coordinates: [Vec<f64>; 3],
        orientation: usize,
        trees: Vec<Option<HyperTree>>,
    ) -> Result<Self> {
        let mut grid = Self::new(dimension, factor, extent, coordinates, orientation)?;
        if trees.len() != grid.trees.len() {
            return Err(Error::InvalidParameter(format!(
                "{} trees for {} slots",
                trees.len(),
                grid.trees.len()
            )));
        }
        for t in trees.iter().flatten() {
            if t.dimension() != dimension || t.factor() != factor {
                return Err(Error::InvalidParameter(format!(
                    "tree of dimension {} and factor {} in a grid of dimension {dimension} and factor {factor}",
                    t.dimension(),
                    t.factor()
                )));
            }
        }
        grid.trees = trees.into_iter().map(|t| t.map(Arc::new)).collect();
        grid.assign_cumulative_starts();
        Ok(grid)
    }

    /// Unfinalized grid over the same coordinates (shared) holding `trees`.
    pub(crate) fn with_trees(&self, trees: Vec<Option<Arc<HyperTree>>>) -> Self {
        debug_assert_eq!(trees.len(), self.trees.len());
        let mut g = Self {
            dimension: self.dimension,
            factor: self.factor,
            extent: self.extent,
            orientation: self.orientation,
            coordinates: self.coordinates.clone(),
            trees,
            starts: Vec::new(),
            vertex_total: 0,
            explicit_starts: false,
            finalized: false,
            mask: None,
            fields: IndexMap::new(),
        };
        g.assign_cumulative_starts();
        g
    }

    /// Uniform grid over `[0, E_k]` along every used axis.
    pub fn unit(dimension: usize, factor: usize, extent: [usize; 3]) -> Result<Self> {
        let coords = std::array::from_fn(|k| {
            if k < dimension {
                (0..=extent[k]).map(|x| x as f64).collect()
            } else {
                Vec::new()
            }
        });
        let orientation = if dimension == 2 { 2 } else { 0 };
        Self::new(dimension, factor, extent, coords, orientation)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn factor(&self) -> usize {
        self.factor
    }

    pub fn extent(&self) -> [usize; 3] {
        self.extent
    }

    pub fn orientation(&self) -> usize {
        self.orientation
    }

    /// `f^d`.
    pub fn child_count(&self) -> usize {
        child_count(self.dimension, self.factor)
    }

    pub fn coordinates(&self, axis: usize) -> &[f64] {
        &self.coordinates[axis]
    }

    pub fn is_finalized(&self) -> bool {
        self.finalized
    }

    pub fn has_explicit_starts(&self) -> bool {
        self.explicit_starts
    }

    /// Number of tree slots, `E_0 * E_1 * E_2`.
    pub fn slot_count(&self) -> usize {
        self.trees.len()
    }

    /// Number of trees actually present.
    pub fn tree_count(&self) -> usize {
        self.trees.iter().flatten().count()
    }

    pub fn slot_of(&self, coords: [usize; 3]) -> Result<usize> {
        if (0..3).any(|k| coords[k] >= self.extent[k]) {
            return Err(Error::TreeOutOfExtent {
                coords,
                extent: self.extent,
            });
        }
        Ok(coords[0] + self.extent[0] * (coords[1] + self.extent[1] * coords[2]))
    }

    pub fn coords_of(&self, slot: usize) -> [usize; 3] {
        let i = slot % self.extent[0];
        let rest = slot / self.extent[0];
        [i, rest % self.extent[1], rest / self.extent[1]]
    }

    pub fn tree(&self, coords: [usize; 3]) -> Result<&HyperTree> {
        let slot = self.slot_of(coords)?;
        self.trees[slot].as_deref().ok_or(Error::MissingTree(coords))
    }

    #[inline]
    pub fn tree_at(&self, slot: usize) -> Option<&HyperTree> {
        self.trees.get(slot).and_then(|t| t.as_deref())
    }

    /// Present trees in lexicographic slot order.
    pub fn trees(&self) -> impl Iterator<Item = (usize, &HyperTree)> + '_ {
        self.trees
            .iter()
            .enumerate()
            .filter_map(|(s, t)| t.as_deref().map(|t| (s, t)))
    }

    fn check_building(&self) -> Result<()> {
        if self.finalized {
            Err(Error::Finalized)
        } else {
            Ok(())
        }
    }

    /// Refines leaf `vertex` of the tree at `coords`; returns the local index
    /// of its eldest child.
    pub fn subdivide(&mut self, coords: [usize; 3], vertex: u32) -> Result<u32> {
        self.check_building()?;
        let slot = self.slot_of(coords)?;
        let tree = self.trees[slot].as_mut().ok_or(Error::MissingTree(coords))?;
        let eldest = Arc::make_mut(tree).subdivide(vertex)?;
        self.starts.clear();
        Ok(eldest)
    }

    /// Removes the tree at `coords`; absent trees behave as masked roots.
    pub fn remove_tree(&mut self, coords: [usize; 3]) -> Result<()> {
        self.check_building()?;
        let slot = self.slot_of(coords)?;
        self.trees[slot] = None;
        self.starts.clear();
        Ok(())
    }

    pub(crate) fn set_tree(&mut self, slot: usize, tree: Option<Arc<HyperTree>>) {
        debug_assert!(!self.finalized);
        self.trees[slot] = tree;
        self.starts.clear();
    }

    fn assign_cumulative_starts(&mut self) {
        let mut next = 0u64;
        self.starts = self
            .trees
            .iter()
            .map(|t| match t {
                Some(t) => {
                    let s = next;
                    next += t.vertex_count() as u64;
                    s
                }
                None => 0,
            })
            .collect();
        self.vertex_total = next;
        self.explicit_starts = false;
    }

    /// Freezes the topology with cumulative global index starts in
    /// lexicographic slot order.
    pub fn finalize(&mut self) -> &mut Self {
        if !self.finalized {
            self.assign_cumulative_starts();
            self.finalized = true;
        }
        self
    }

    /// Freezes the topology with caller-provided starts (one per slot, ignored
    /// for absent trees). The per-tree ranges must not overlap.
    pub fn finalize_with_starts(&mut self, starts: Vec<u64>) -> Result<&mut Self> {
        self.check_building()?;
        if starts.len() != self.trees.len() {
            return Err(Error::InvalidParameter(format!(
                "{} global index starts for {} tree slots",
                starts.len(),
                self.trees.len()
            )));
        }
        let mut ranges: Vec<(u64, u64, usize)> = self
            .trees()
            .map(|(s, t)| (starts[s], starts[s] + t.vertex_count() as u64, s))
            .collect();
        ranges.sort_unstable();
        for w in ranges.windows(2) {
            if w[1].0 < w[0].1 {
                return Err(Error::OverlappingStarts {
                    first: self.coords_of(w[0].2),
                    second: self.coords_of(w[1].2),
                });
            }
        }
        self.vertex_total = ranges.iter().map(|r| r.1).max().unwrap_or(0);
        self.starts = starts;
        self.explicit_starts = true;
        self.finalized = true;
        Ok(self)
    }

    fn check_starts(&self, what: &'static str) -> Result<()> {
        if self.starts.is_empty() && !self.trees.is_empty() {
            Err(Error::NotFinalized(what))
        } else {
            Ok(())
        }
    }

    /// Global index start `S` of the tree in `slot`.
    #[inline]
    pub fn start_of(&self, slot: usize) -> u64 {
        self.starts[slot]
    }

    /// `n_l + S_{i,j,k}`.
    pub fn global_index(&self, coords: [usize; 3], local: u32) -> Result<u64> {
        self.check_starts("computing global indices")?;
        let tree = self.tree(coords)?;
        if local >= tree.vertex_count() {
            return Err(Error::VertexOutOfRange {
                vertex: local as u64,
                count: tree.vertex_count() as u64,
            });
        }
        Ok(self.starts[self.slot_of(coords)?] + local as u64)
    }

    /// Size of the global index space (max index + 1).
    pub fn vertex_total(&self) -> u64 {
        if self.starts.is_empty() {
            self.trees().map(|(_, t)| t.vertex_count() as u64).sum()
        } else {
            self.vertex_total
        }
    }

    pub fn leaf_total(&self) -> u64 {
        self.trees().map(|(_, t)| t.leaf_count() as u64).sum()
    }

    pub fn strict_total(&self) -> u64 {
        self.trees().map(|(_, t)| t.strict_count() as u64).sum()
    }

    pub fn depth(&self) -> u32 {
        self.trees().map(|(_, t)| t.depth()).max().unwrap_or(0)
    }

    /// Box of the tree at `coords`.
    pub fn tree_embedding(&self, coords: [usize; 3]) -> Result<GeometricEmbedding> {
        self.slot_of(coords)?;
        let mut origin = [0.0; 3];
        let mut size = [0.0; 3];
        for a in 0..3 {
            let c = &self.coordinates[a];
            if a < self.dimension {
                origin[a] = c[coords[a]];
                size[a] = c[coords[a] + 1] - c[coords[a]];
            } else {
                origin[a] = c[0];
            }
        }
        Ok(GeometricEmbedding {
            origin,
            size,
            orientation: self.orientation,
        })
    }

    /// Outer box: first coordinates and signed extents per used axis.
    pub fn grid_bounds(&self) -> ([f64; 3], [f64; 3]) {
        let mut origin = [0.0; 3];
        let mut size = [0.0; 3];
        for a in 0..3 {
            let c = &self.coordinates[a];
            origin[a] = c[0];
            if a < self.dimension {
                size[a] = c[c.len() - 1] - c[0];
            }
        }
        (origin, size)
    }

    /// `(min, max)` of the outer box.
    pub fn bounding_box(&self) -> ([f64; 3], [f64; 3]) {
        let (origin, size) = self.grid_bounds();
        GeometricEmbedding {
            origin,
            size,
            orientation: self.orientation,
        }
        .bounds()
    }

    /// Coordinate along `axis` of the point at fraction `num / den` of the
    /// tree at position `tree_pos`. Fractions are reduced first so that one
    /// point always evaluates to the same float, whichever cell computes it.
    #[inline]
    pub(crate) fn lattice_coordinate(&self, axis: usize, tree_pos: usize, num: u64, den: u64) -> f64 {
        let c = &self.coordinates[axis];
        if axis >= self.dimension {
            return c[0];
        }
        let g = gcd(num, den);
        let (n, d) = (num / g, den / g);
        if n == 0 {
            c[tree_pos]
        } else if n == d {
            c[tree_pos + 1]
        } else {
            let lo = c[tree_pos];
            let hi = c[tree_pos + 1];
            lo + (hi - lo) * (n as f64 / d as f64)
        }
    }

    // Mask

    pub fn mask(&self) -> Option<&BitVec> {
        self.mask.as_deref()
    }

    pub fn has_mask(&self) -> bool {
        self.mask.is_some()
    }

    fn check_global(&self, index: u64) -> Result<()> {
        if !self.finalized {
            return Err(Error::NotFinalized("accessing the mask or fields"));
        }
        if index >= self.vertex_total {
            return Err(Error::GlobalIndexOutOfRange {
                index,
                count: self.vertex_total,
            });
        }
        Ok(())
    }

    /// Mask bit of one vertex; `false` when no mask is attached. This is the
    /// stored bit only; visibility also depends on the ancestors.
    pub fn mask_get(&self, index: u64) -> Result<bool> {
        self.check_global(index)?;
        Ok(self.is_masked_index(index))
    }

    pub fn mask_set(&mut self, index: u64, flag: bool) -> Result<()> {
        self.check_global(index)?;
        let total = self.vertex_total as usize;
        let mask = self.mask.get_or_insert_with(|| Arc::new(BitVec::repeat(false, total)));
        Arc::make_mut(mask).set(index as usize, flag);
        Ok(())
    }

    /// Replaces the whole mask.
    pub fn set_mask(&mut self, mask: BitVec) -> Result<()> {
        if !self.finalized {
            return Err(Error::NotFinalized("attaching a mask"));
        }
        if mask.len() as u64 != self.vertex_total {
            return Err(Error::FieldLength {
                name: "mask".into(),
                len: mask.len(),
                expected: self.vertex_total,
            });
        }
        self.mask = Some(Arc::new(mask));
        Ok(())
    }

    pub fn clear_mask(&mut self) {
        self.mask = None;
    }

    #[inline]
    pub(crate) fn is_masked_index(&self, index: u64) -> bool {
        self.mask.as_ref().is_some_and(|m| m[index as usize])
    }

    // Fields

    pub fn field(&self, name: &str) -> Result<&[f64]> {
        self.fields
            .get(name)
            .map(|f| f.as_slice())
            .ok_or_else(|| Error::UnknownField(name.to_string()))
    }

    pub fn field_names(&self) -> impl Iterator<Item = &str> + '_ {
        self.fields.keys().map(String::as_str)
    }

    pub fn field_count(&self) -> usize {
        self.fields.len()
    }

    /// Attaches (or replaces) a field indexed by global index.
    pub fn add_field(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if !self.finalized {
            return Err(Error::NotFinalized("attaching fields"));
        }
        if values.len() as u64 != self.vertex_total {
            return Err(Error::FieldLength {
                name,
                len: values.len(),
                expected: self.vertex_total,
            });
        }
        self.fields.insert(name, Arc::new(values));
        Ok(())
    }

    pub fn remove_field(&mut self, name: &str) -> Option<Vec<f64>> {
        self.fields
            .shift_remove(name)
            .map(|f| Arc::try_unwrap(f).unwrap_or_else(|f| (*f).clone()))
    }

    // Memory

    /// Footprint under the canonical byte model.
    pub fn memory_report(&self) -> MemoryReport {
        let topology = self
            .trees()
            .map(|(_, t)| 4 * t.topology_entries() as u64)
            .sum();
        let coordinates = self.coordinates.iter().map(|c| 8 * c.len() as u64).sum();
        let mask = if self.mask.is_some() {
            self.vertex_total().div_ceil(8)
        } else {
            0
        };
        let attributes = 8 * self.vertex_total() * self.fields.len() as u64;
        MemoryReport::new(topology, coordinates, mask, attributes)
    }

    /// Copy sharing trees, mask and fields, with one coordinate axis
    /// replaced.
    pub(crate) fn with_axis_coordinates(&self, axis: usize, coords: Vec<f64>) -> Self {
        let mut g = self.clone();
        g.coordinates[axis] = Arc::new(coords);
        g
    }
}

fn check_axis(axis: usize, c: &[f64], cells: usize) -> Result<()> {
    if c.len() != cells + 1 {
        return Err(Error::InvalidCoordinates {
            axis,
            reason: format!("expected {} values, got {}", cells + 1, c.len()),
        });
    }
    if c.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidCoordinates {
            axis,
            reason: "non-finite value".into(),
        });
    }
    let increasing = c.windows(2).all(|w| w[0] < w[1]);
    let decreasing = c.windows(2).all(|w| w[0] > w[1]);
    if !(increasing || decreasing) {
        return Err(Error::InvalidCoordinates {
            axis,
            reason: "values are not strictly monotone".into(),
        });
    }
    Ok(())
}

#[inline]
pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}
