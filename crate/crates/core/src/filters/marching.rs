//! Marching squares and marching cubes over cells whose corners are numbered
//! in binary order (`b0 + 2 b1 + 4 b2`). A corner is "inside" when its value
//! exceeds the iso-value.
//!
//! The cube table is generated rather than transcribed. On every face the
//! crossings are paired so that each run of inside corners is cut off; on
//! the ambiguous faces this separates the two inside corners. Two cells
//! sharing a face therefore always cut it the same way. The face segments,
//! oriented consistently, chain into closed loops that are fan-triangulated.

use std::sync::OnceLock;

use smallvec::SmallVec;

/// Square edges, in loop order around the square.
pub(crate) const SQUARE_EDGES: [(usize, usize); 4] = [(0, 1), (1, 3), (3, 2), (2, 0)];

/// Cube edges: four along each axis.
pub(crate) const CUBE_EDGES: [(usize, usize); 12] = [
    (0, 1),
    (2, 3),
    (4, 5),
    (6, 7),
    (0, 2),
    (1, 3),
    (4, 6),
    (5, 7),
    (0, 4),
    (1, 5),
    (2, 6),
    (3, 7),
];

/// Segments (as square edge pairs) for the inside flags of the four
/// corners; `center_inside` settles the two saddle configurations.
pub(crate) fn march_square(inside: [bool; 4], center_inside: bool) -> SmallVec<[[u8; 2]; 2]> {
    let cycle = [0, 1, 3, 2].map(|k| inside[k]);
    let saddle = cycle[0] == cycle[2] && cycle[1] == cycle[3] && cycle[0] != cycle[1];
    // cut off the runs of corners on the side opposite the center
    let cut = if saddle { !center_inside } else { true };
    let mut out = SmallVec::new();
    for [a, b] in arcs(&cycle, cut) {
        out.push([a as u8, b as u8]);
    }
    out
}

/// Runs of corners equal to `value` around a cycle, as `(exit, enter)` pairs
/// of cycle edge indices (edge `i` joins corners `i` and `i + 1`).
fn arcs(cycle: &[bool], value: bool) -> SmallVec<[[usize; 2]; 4]> {
    let n = cycle.len();
    let mut out = SmallVec::new();
    for i in 0..n {
        if cycle[i] == value && cycle[(i + 1) % n] != value {
            let mut j = i;
            while cycle[(j + n - 1) % n] == value {
                j = (j + n - 1) % n;
            }
            out.push([i, (j + n - 1) % n]);
        }
    }
    out
}

/// Triangles of one marching cubes configuration, as cube edge triples.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MarchingCubesCase {
    pub triangles: Vec<[u8; 3]>,
}

fn cube_edge(a: usize, b: usize) -> usize {
    let key = (a.min(b), a.max(b));
    CUBE_EDGES.iter().position(|&e| e == key).expect("cube edge")
}

fn generate_case(config: usize) -> MarchingCubesCase {
    let inside = |k: usize| config >> k & 1 == 1;
    // start edge -> end edge of every face segment
    let mut next = [usize::MAX; 12];
    for axis in 0..3 {
        for high in [false, true] {
            let u = (axis + 1) % 3;
            let v = (axis + 2) % 3;
            let base = (high as usize) << axis;
            let mut face = [base, base | 1 << u, base | 1 << u | 1 << v, base | 1 << v];
            if !high {
                face.reverse();
            }
            let flags = face.map(inside);
            for [exit, enter] in arcs(&flags, true) {
                let from = cube_edge(face[exit], face[(exit + 1) % 4]);
                let to = cube_edge(face[enter], face[(enter + 1) % 4]);
                debug_assert_eq!(next[from], usize::MAX);
                next[from] = to;
            }
        }
    }
    let mut triangles = Vec::new();
    let mut seen = [false; 12];
    for start in 0..12 {
        if next[start] == usize::MAX || seen[start] {
            continue;
        }
        let mut loop_edges = Vec::new();
        let mut e = start;
        while !seen[e] {
            seen[e] = true;
            loop_edges.push(e as u8);
            e = next[e];
        }
        debug_assert_eq!(e, start);
        for i in 1..loop_edges.len() - 1 {
            triangles.push([loop_edges[0], loop_edges[i], loop_edges[i + 1]]);
        }
    }
    MarchingCubesCase { triangles }
}

/// The 256 cube configurations, indexed by the inside flags of the corners
/// (bit `k` for corner `k`).
pub fn marching_cubes_table() -> &'static [MarchingCubesCase] {
    static TABLE: OnceLock<Vec<MarchingCubesCase>> = OnceLock::new();
    TABLE.get_or_init(|| (0..256).map(generate_case).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn square_cases() {
        assert!(march_square([false; 4], false).is_empty());
        assert!(march_square([true; 4], true).is_empty());
        // bottom row inside: one segment across the vertical edges
        let s = march_square([true, true, false, false], true);
        assert_eq!(s.len(), 1);
        let mut e = s[0];
        e.sort();
        assert_eq!(e, [1, 3]);
        // saddle, both resolutions
        assert_eq!(march_square([true, false, false, true], true).len(), 2);
        let a = march_square([true, false, false, true], true);
        let b = march_square([true, false, false, true], false);
        assert_ne!(a, b);
    }

    #[test]
    fn cube_table_shape() {
        let t = marching_cubes_table();
        assert_eq!(t.len(), 256);
        assert!(t[0].triangles.is_empty() && t[255].triangles.is_empty());
        assert_eq!(t[1].triangles.len(), 1);
        // one face inside: a quad split in two
        assert_eq!(t[0b0000_1111].triangles.len(), 2);
        let crossing = |c: usize, e: u8| {
            let (a, b) = CUBE_EDGES[e as usize];
            (c >> a & 1) != (c >> b & 1)
        };
        for (c, case) in t.iter().enumerate() {
            let crossings = (0..12).filter(|&e| crossing(c, e)).count();
            let mut used = [false; 12];
            for tri in &case.triangles {
                for &e in tri {
                    assert!(crossing(c, e), "config {c} uses a non-crossing edge");
                    used[e as usize] = true;
                }
            }
            assert_eq!(used.iter().filter(|&&u| u).count(), crossings);
        }
    }

    #[test]
    fn cube_surfaces_are_closed_inside_the_cube() {
        // every edge between two crossing points on different cube faces is
        // used once; edges across the cube interior twice
        for (c, case) in marching_cubes_table().iter().enumerate() {
            let mut count: HashMap<(u8, u8), usize> = HashMap::new();
            for tri in &case.triangles {
                for k in 0..3 {
                    let (a, b) = (tri[k], tri[(k + 1) % 3]);
                    *count.entry((a.min(b), a.max(b))).or_default() += 1;
                }
            }
            assert!(count.values().all(|&n| n == 1 || n == 2), "config {c}");
        }
    }

    #[test]
    fn complement_symmetry_of_triangle_counts() {
        let t = marching_cubes_table();
        for c in 0..256 {
            let ambiguous = (0..3).any(|axis| {
                [false, true].iter().any(|&high| {
                    let u = (axis + 1) % 3;
                    let v = (axis + 2) % 3;
                    let base = (high as usize) << axis;
                    let f = [base, base | 1 << u, base | 1 << u | 1 << v, base | 1 << v].map(|k| c >> k & 1);
                    f[0] == f[2] && f[1] == f[3] && f[0] != f[1]
                })
            });
            if !ambiguous {
                assert_eq!(t[c].triangles.len(), t[255 - c].triangles.len(), "config {c}");
            }
        }
    }
}
