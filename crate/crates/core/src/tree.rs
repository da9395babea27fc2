//! Compact refinement tree of one root cell.
//!
//! Only strict nodes carry data. Children of a strict node are created
//! together as a block of `f^d` consecutive vertex indices appended at the
//! end of the tree, so one index per strict node (its eldest child) is
//! enough to reach all of them. Blocks are numbered in creation order; block
//! `b` starts at vertex `1 + b * f^d`, and the parent of every block except
//! the first (whose parent is the root) is stored once per block.

use crate::indexing::{check_dimension, check_factor, child_count};
use crate::{Error, Result};

/// Sentinel stored in the eldest-child array for leaves.
pub const NO_CHILD: u32 = u32::MAX;

/// Deepest refinement level accepted by [`HyperTree::subdivide`]. Lattice
/// positions at this depth still fit in 32 bits for `f = 3`.
pub const MAX_DEPTH: u32 = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperTree {
    dimension: u8,
    factor: u8,
    children: u32,
    /// Indexed by vertex; only as long as the last strict vertex requires.
    eldest_child: Vec<u32>,
    /// Parent vertex of block `b + 1`.
    block_parent: Vec<u32>,
    vertex_count: u32,
    depth: u32,
}

impl HyperTree {
    /// A tree reduced to its root leaf.
    pub fn new(dimension: usize, factor: usize) -> Result<Self> {
        check_dimension(dimension)?;
        check_factor(factor)?;
        Ok(Self {
            dimension: dimension as u8,
            factor: factor as u8,
            children: child_count(dimension, factor) as u32,
            eldest_child: Vec::new(),
            block_parent: Vec::new(),
            vertex_count: 1,
            depth: 0,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension as usize
    }

    pub fn factor(&self) -> usize {
        self.factor as usize
    }

    /// `f^d`.
    pub fn child_count(&self) -> usize {
        self.children as usize
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    /// Number of strict (refined) vertices.
    pub fn strict_count(&self) -> u32 {
        (self.vertex_count - 1) / self.children
    }

    pub fn leaf_count(&self) -> u32 {
        self.vertex_count - self.strict_count()
    }

    /// Largest vertex depth; the root has depth 0.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    #[inline]
    pub fn is_leaf(&self, vertex: u32) -> bool {
        self.eldest_child(vertex).is_none()
    }

    #[inline]
    pub fn eldest_child(&self, vertex: u32) -> Option<u32> {
        match self.eldest_child.get(vertex as usize) {
            Some(&e) if e != NO_CHILD => Some(e),
            _ => None,
        }
    }

    /// Vertex of child `index` of `vertex`, if `vertex` is strict.
    #[inline]
    pub fn child(&self, vertex: u32, index: usize) -> Option<u32> {
        self.eldest_child(vertex).map(|e| e + index as u32)
    }

    pub fn parent(&self, vertex: u32) -> Option<u32> {
        if vertex == 0 || vertex >= self.vertex_count {
            return None;
        }
        let block = (vertex - 1) / self.children;
        Some(if block == 0 {
            0
        } else {
            self.block_parent[block as usize - 1]
        })
    }

    /// Child index of `vertex` within its sibling block (0 for the root).
    pub fn child_index_of(&self, vertex: u32) -> usize {
        if vertex == 0 {
            0
        } else {
            ((vertex - 1) % self.children) as usize
        }
    }

    pub fn vertex_depth(&self, vertex: u32) -> u32 {
        let mut depth = 0;
        let mut v = vertex;
        while let Some(p) = self.parent(v) {
            depth += 1;
            v = p;
        }
        depth
    }

    /// Refines leaf `vertex`, appending its `f^d` children; returns the index
    /// of the eldest child.
    pub fn subdivide(&mut self, vertex: u32) -> Result<u32> {
        if vertex >= self.vertex_count {
            return Err(Error::VertexOutOfRange {
                vertex: vertex as u64,
                count: self.vertex_count as u64,
            });
        }
        if !self.is_leaf(vertex) {
            return Err(Error::AlreadyRefined(vertex));
        }
        let depth = self.vertex_depth(vertex) + 1;
        if depth > MAX_DEPTH {
            return Err(Error::DepthLimit(depth));
        }
        let eldest = self.vertex_count;
        let total = eldest as u64 + self.children as u64;
        if total >= NO_CHILD as u64 {
            return Err(Error::VertexOutOfRange {
                vertex: total,
                count: NO_CHILD as u64,
            });
        }
        if self.eldest_child.len() <= vertex as usize {
            self.eldest_child.resize(vertex as usize + 1, NO_CHILD);
        }
        self.eldest_child[vertex as usize] = eldest;
        if eldest > 1 {
            self.block_parent.push(vertex);
        }
        self.vertex_count = total as u32;
        self.depth = self.depth.max(depth);
        Ok(eldest)
    }

    /// Stored index entries: the eldest-child array plus the block parents.
    pub fn topology_entries(&self) -> usize {
        self.eldest_child.len() + self.block_parent.len()
    }

    /// Whether blocks were created in increasing order of their parent
    /// vertex, i.e. vertex numbering is breadth-first.
    pub fn is_breadth_first(&self) -> bool {
        let mut last = None;
        for v in 0..self.eldest_child.len() as u32 {
            if let Some(e) = self.eldest_child(v) {
                if last.is_some_and(|l| e < l) {
                    return false;
                }
                last = Some(e);
            }
        }
        true
    }

    /// Refinement bits in vertex order (`true` = strict).
    pub fn refinement_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.vertex_count).map(|v| !self.is_leaf(v))
    }

    /// Rebuilds a tree from refinement bits in breadth-first vertex order.
    pub fn from_refinement_bits<I>(dimension: usize, factor: usize, bits: I) -> Result<Self>
    where
        I: IntoIterator<Item = bool>,
    {
        let mut tree = Self::new(dimension, factor)?;
        let mut seen = 0u64;
        for (v, strict) in bits.into_iter().enumerate() {
            if v as u64 >= tree.vertex_count as u64 {
                return Err(Error::Format(format!(
                    "refinement bit {v} refers past the {} vertices described so far",
                    tree.vertex_count
                )));
            }
            if strict {
                tree.subdivide(v as u32)?;
            }
            seen += 1;
        }
        if seen != tree.vertex_count as u64 {
            return Err(Error::Format(format!(
                "{seen} refinement bits for a tree of {} vertices",
                tree.vertex_count
            )));
        }
        Ok(tree)
    }
}
