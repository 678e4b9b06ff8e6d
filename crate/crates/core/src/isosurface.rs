//! Zero level-set extraction from a sampled scalar field.
//!
//! Each grid cube is split into six tetrahedra sharing its main diagonal
//! (a conforming Kuhn split), and each tetrahedron is polygonised on its own.
//! Vertices on shared grid edges are welded, and triangles are wound so their
//! normals point toward the positive side of the field.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::math::Vec3;
use crate::mesh::TriMesh;

/// Scalar samples on the nodes of a regular axis-aligned grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarGrid {
    pub origin: Vec3,
    pub spacing: Vec3,
    /// Node counts along x, y, z.
    pub dims: [usize; 3],
    /// Values in x-fastest order.
    pub values: Vec<f64>,
}

impl ScalarGrid {
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.dims[1] + j) * self.dims[0] + i
    }

    pub fn node(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.origin
            + Vec3::new(
                i as f64 * self.spacing.x,
                j as f64 * self.spacing.y,
                k as f64 * self.spacing.z,
            )
    }

    fn node_of(&self, idx: usize) -> Vec3 {
        let i = idx % self.dims[0];
        let j = (idx / self.dims[0]) % self.dims[1];
        let k = idx / (self.dims[0] * self.dims[1]);
        self.node(i, j, k)
    }

    pub fn has_sign_change(&self) -> bool {
        let neg = self.values.iter().any(|&v| v < 0.0);
        let pos = self.values.iter().any(|&v| v >= 0.0);
        neg && pos
    }
}

const CUBE_CORNERS: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [1, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [0, 1, 1],
    [1, 1, 1],
];

const KUHN_TETS: [[usize; 4]; 6] = [
    [0, 1, 3, 7],
    [0, 2, 3, 7],
    [0, 2, 6, 7],
    [0, 4, 6, 7],
    [0, 4, 5, 7],
    [0, 1, 5, 7],
];

struct Welder<'a> {
    grid: &'a ScalarGrid,
    vertices: Vec<Vec3>,
    by_edge: BTreeMap<(usize, usize), usize>,
}

impl Welder<'_> {
    fn vertex(&mut self, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        if let Some(&v) = self.by_edge.get(&key) {
            return v;
        }
        let (va, vb) = (self.grid.values[key.0], self.grid.values[key.1]);
        let (pa, pb) = (self.grid.node_of(key.0), self.grid.node_of(key.1));
        let t = if va == vb { 0.5 } else { va / (va - vb) };
        self.vertices.push(pa + (pb - pa) * t);
        let id = self.vertices.len() - 1;
        self.by_edge.insert(key, id);
        id
    }
}

/// Triangulated zero level set (negative = inside).
pub fn extract_zero_level_set(grid: &ScalarGrid) -> TriMesh {
    let [nx, ny, nz] = grid.dims;
    let mut welder = Welder {
        grid,
        vertices: Vec::new(),
        by_edge: BTreeMap::new(),
    };
    let mut triangles = Vec::new();
    if nx < 2 || ny < 2 || nz < 2 {
        return TriMesh::default();
    }
    for k in 0..nz - 1 {
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let corners = CUBE_CORNERS.map(|[di, dj, dk]| grid.index(i + di, j + dj, k + dk));
                let any_neg = corners.iter().any(|&c| grid.values[c] < 0.0);
                let any_pos = corners.iter().any(|&c| grid.values[c] >= 0.0);
                if !(any_neg && any_pos) {
                    continue;
                }
                for tet in KUHN_TETS {
                    polygonise_tet(&mut welder, &mut triangles, tet.map(|c| corners[c]));
                }
            }
        }
    }
    TriMesh::new(welder.vertices, triangles)
}

fn polygonise_tet(w: &mut Welder, out: &mut Vec<[usize; 3]>, nodes: [usize; 4]) {
    let (neg, pos): (Vec<usize>, Vec<usize>) =
        nodes.iter().partition(|&&n| w.grid.values[n] < 0.0);
    let polygon: Vec<usize> = match (neg.len(), pos.len()) {
        (1, 3) => pos.iter().map(|&p| w.vertex(neg[0], p)).collect(),
        (3, 1) => neg.iter().map(|&n| w.vertex(n, pos[0])).collect(),
        (2, 2) => alloc::vec![
            w.vertex(neg[0], pos[0]),
            w.vertex(neg[0], pos[1]),
            w.vertex(neg[1], pos[1]),
            w.vertex(neg[1], pos[0]),
        ],
        _ => return,
    };
    let centroid = |ids: &[usize]| {
        ids.iter().fold(Vec3::ZERO, |acc, &n| acc + w.grid.node_of(n)) / ids.len() as f64
    };
    let outward = centroid(&pos) - centroid(&neg);
    let mut push = |a: usize, b: usize, c: usize| {
        if a == b || b == c || a == c {
            return;
        }
        let (pa, pb, pc) = (w.vertices[a], w.vertices[b], w.vertices[c]);
        if (pb - pa).cross(pc - pa).dot(outward) >= 0.0 {
            out.push([a, b, c]);
        } else {
            out.push([a, c, b]);
        }
    };
    push(polygon[0], polygon[1], polygon[2]);
    if polygon.len() == 4 {
        push(polygon[0], polygon[2], polygon[3]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere_grid(n: usize) -> ScalarGrid {
        let spacing = 3.0 / (n - 1) as f64;
        let origin = Vec3::new(-1.5, -1.5, -1.5);
        let mut values = Vec::new();
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let p = origin + Vec3::new(i as f64, j as f64, k as f64) * spacing;
                    values.push(p.norm() - 1.0);
                }
            }
        }
        ScalarGrid {
            origin,
            spacing: Vec3::new(spacing, spacing, spacing),
            dims: [n; 3],
            values,
        }
    }

    #[test]
    fn sphere_level_set_is_closed_and_accurate() {
        let grid = sphere_grid(20);
        let mesh = extract_zero_level_set(&grid);
        assert!(!mesh.triangles.is_empty());
        for v in &mesh.vertices {
            assert!((v.norm() - 1.0).abs() < grid.spacing.x);
        }
        let closed = mesh.clone().into_closed().expect("closed surface");
        assert_eq!(closed, mesh, "normals already outward");
        let vol = mesh.signed_volume();
        let exact = 4.0 / 3.0 * core::f64::consts::PI;
        assert!((vol - exact).abs() / exact < 0.05, "volume {vol}");
    }

    #[test]
    fn constant_field_has_no_surface() {
        let mut grid = sphere_grid(5);
        grid.values.iter_mut().for_each(|v| *v = 1.0);
        assert!(!grid.has_sign_change());
        assert!(extract_zero_level_set(&grid).triangles.is_empty());
    }
}
