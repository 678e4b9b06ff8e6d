//! Triangle meshes: ray casting, closest points, mass properties, sampling and
//! a few watertight primitives.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;

use crate::math::Vec3;
use crate::rng;
use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
}

/// A ray hit: parameter along the ray, point and unit face normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayHit {
    pub t: f64,
    pub point: Vec3,
    pub normal: Vec3,
    pub triangle: usize,
}

impl TriMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Self {
        TriMesh {
            vertices,
            triangles,
        }
    }

    /// Validate a closed, consistently wound surface and orient it outward.
    pub fn into_closed(mut self) -> Result<Self> {
        if self.triangles.is_empty() {
            return Err(Error::Empty("mesh triangles"));
        }
        let nv = self.vertices.len();
        if self.triangles.iter().flatten().any(|&i| i >= nv) {
            return Err(Error::InvalidParameter("triangle references a missing vertex"));
        }
        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                *directed.entry((t[k], t[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        for (&(a, b), &count) in &directed {
            let reverse = directed.get(&(b, a)).copied().unwrap_or(0);
            if count + reverse != 2 {
                return Err(Error::NotWatertight(a.min(b), a.max(b), count + reverse));
            }
            if count != 1 {
                return Err(Error::InconsistentWinding(a, b));
            }
        }
        if self.signed_volume() < 0.0 {
            for t in self.triangles.iter_mut() {
                t.swap(1, 2);
            }
        }
        Ok(self)
    }

    pub fn triangle(&self, i: usize) -> [Vec3; 3] {
        let t = self.triangles[i];
        [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]]
    }

    /// Unit normal following the winding (outward for closed meshes).
    pub fn face_normal(&self, i: usize) -> Vec3 {
        let [a, b, c] = self.triangle(i);
        (b - a).cross(c - a).normalize()
    }

    pub fn face_area(&self, i: usize) -> f64 {
        let [a, b, c] = self.triangle(i);
        0.5 * (b - a).cross(c - a).norm()
    }

    pub fn signed_volume(&self) -> f64 {
        (0..self.triangles.len())
            .map(|i| {
                let [a, b, c] = self.triangle(i);
                a.dot(b.cross(c)) / 6.0
            })
            .sum()
    }

    /// Centroid of the enclosed solid at uniform density.
    pub fn volume_centroid(&self) -> Vec3 {
        let mut moment = Vec3::ZERO;
        let mut volume = 0.0;
        for i in 0..self.triangles.len() {
            let [a, b, c] = self.triangle(i);
            let v = a.dot(b.cross(c)) / 6.0;
            volume += v;
            moment += (a + b + c) * (v / 4.0);
        }
        if volume.abs() < 1e-300 {
            return self.bounds().map(|(lo, hi)| (lo + hi) * 0.5).unwrap_or(Vec3::ZERO);
        }
        moment / volume
    }

    pub fn bounds(&self) -> Option<(Vec3, Vec3)> {
        let first = *self.vertices.first()?;
        Some(self.vertices.iter().fold((first, first), |(lo, hi), &v| {
            (lo.min_by_component(v), hi.max_by_component(v))
        }))
    }

    /// Nearest hit with `t` in `(t_min, t_max]`.
    pub fn ray_cast(&self, origin: Vec3, dir: Vec3, t_min: f64, t_max: f64) -> Option<RayHit> {
        let mut best: Option<RayHit> = None;
        for i in 0..self.triangles.len() {
            let [a, b, c] = self.triangle(i);
            if let Some(t) = ray_triangle(origin, dir, a, b, c) {
                if t > t_min && t <= t_max && best.is_none_or(|h| t < h.t) {
                    best = Some(RayHit {
                        t,
                        point: origin + dir * t,
                        normal: self.face_normal(i),
                        triangle: i,
                    });
                }
            }
        }
        best
    }

    /// Parity test along a fixed skew direction.
    pub fn contains(&self, p: Vec3) -> bool {
        let dir = Vec3::new(0.577_215_664_9, 0.618_033_988_7, 0.529_177_210_9).normalize();
        let mut crossings = 0;
        for i in 0..self.triangles.len() {
            let [a, b, c] = self.triangle(i);
            if ray_triangle(p, dir, a, b, c).is_some_and(|t| t > 0.0) {
                crossings += 1;
            }
        }
        crossings % 2 == 1
    }

    /// Closest surface point and the normal of its triangle.
    pub fn closest_point(&self, p: Vec3) -> Option<(Vec3, Vec3)> {
        let mut best: Option<(f64, Vec3, usize)> = None;
        for i in 0..self.triangles.len() {
            let [a, b, c] = self.triangle(i);
            let q = closest_point_on_triangle(p, a, b, c);
            let d = (q - p).norm_squared();
            if best.is_none_or(|(bd, _, _)| d < bd) {
                best = Some((d, q, i));
            }
        }
        best.map(|(_, q, i)| (q, self.face_normal(i)))
    }

    /// Area-weighted uniform samples on the surface.
    pub fn sample_surface(&self, count: usize, seed: u64) -> Vec<Vec3> {
        let mut cumulative = Vec::with_capacity(self.triangles.len());
        let mut total = 0.0;
        for i in 0..self.triangles.len() {
            total += self.face_area(i);
            cumulative.push(total);
        }
        if total <= 0.0 {
            return Vec::new();
        }
        let mut r = rng::stream(seed, rng::purpose::SURFACE_SAMPLE, 0);
        (0..count)
            .map(|_| {
                let u = r.random::<f64>() * total;
                let i = cumulative.partition_point(|&c| c < u).min(self.triangles.len() - 1);
                let [a, b, c] = self.triangle(i);
                let (mut s, mut t) = (r.random::<f64>(), r.random::<f64>());
                if s + t > 1.0 {
                    s = 1.0 - s;
                    t = 1.0 - t;
                }
                a + (b - a) * s + (c - a) * t
            })
            .collect()
    }

    pub fn translate(&mut self, offset: Vec3) {
        for v in self.vertices.iter_mut() {
            *v += offset;
        }
    }

    /// Axis-aligned box centred at the origin.
    pub fn cuboid(size: Vec3) -> TriMesh {
        let h = size * 0.5;
        let vertices = (0..8)
            .map(|m| {
                Vec3::new(
                    if m & 1 == 1 { h.x } else { -h.x },
                    if m & 2 == 2 { h.y } else { -h.y },
                    if m & 4 == 4 { h.z } else { -h.z },
                )
            })
            .collect();
        let triangles = alloc::vec![
            [0, 2, 1], [1, 2, 3], // -z
            [4, 5, 6], [5, 7, 6], // +z
            [0, 1, 4], [1, 5, 4], // -y
            [2, 6, 3], [3, 6, 7], // +y
            [0, 4, 2], [2, 4, 6], // -x
            [1, 3, 5], [3, 7, 5], // +x
        ];
        TriMesh {
            vertices,
            triangles,
        }
    }

    /// Closed cylinder about the z axis, centred at the origin.
    pub fn cylinder(radius: f64, height: f64, segments: usize) -> TriMesh {
        let segments = segments.max(3);
        let h = height * 0.5;
        let mut vertices = Vec::with_capacity(2 * segments + 2);
        for k in 0..segments {
            let a = core::f64::consts::TAU * k as f64 / segments as f64;
            vertices.push(Vec3::new(radius * a.cos(), radius * a.sin(), -h));
            vertices.push(Vec3::new(radius * a.cos(), radius * a.sin(), h));
        }
        let bottom = vertices.len();
        vertices.push(Vec3::new(0.0, 0.0, -h));
        let top = vertices.len();
        vertices.push(Vec3::new(0.0, 0.0, h));
        let mut triangles = Vec::with_capacity(4 * segments);
        for k in 0..segments {
            let (b0, t0) = (2 * k, 2 * k + 1);
            let (b1, t1) = (2 * ((k + 1) % segments), 2 * ((k + 1) % segments) + 1);
            triangles.push([b0, b1, t1]);
            triangles.push([b0, t1, t0]);
            triangles.push([bottom, b1, b0]);
            triangles.push([top, t0, t1]);
        }
        TriMesh {
            vertices,
            triangles,
        }
    }

    /// Subdivided icosahedron with vertices on the sphere.
    pub fn icosphere(radius: f64, subdivisions: usize) -> TriMesh {
        let p = (1.0 + 5f64.sqrt()) / 2.0;
        let mut vertices: Vec<Vec3> = [
            (-1.0, p, 0.0), (1.0, p, 0.0), (-1.0, -p, 0.0), (1.0, -p, 0.0),
            (0.0, -1.0, p), (0.0, 1.0, p), (0.0, -1.0, -p), (0.0, 1.0, -p),
            (p, 0.0, -1.0), (p, 0.0, 1.0), (-p, 0.0, -1.0), (-p, 0.0, 1.0),
        ]
        .iter()
        .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
        .collect();
        let mut triangles: Vec<[usize; 3]> = alloc::vec![
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ];
        for _ in 0..subdivisions {
            let mut midpoints: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            let mut next = Vec::with_capacity(triangles.len() * 4);
            let mut mid = |a: usize, b: usize, verts: &mut Vec<Vec3>| {
                *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    verts.push(((verts[a] + verts[b]) * 0.5).normalize());
                    verts.len() - 1
                })
            };
            for [a, b, c] in triangles {
                let ab = mid(a, b, &mut vertices);
                let bc = mid(b, c, &mut vertices);
                let ca = mid(c, a, &mut vertices);
                next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            triangles = next;
        }
        for v in vertices.iter_mut() {
            *v = *v * radius;
        }
        TriMesh {
            vertices,
            triangles,
        }
    }

    /// L-shaped prism: an `a x b` footprint with a `c x c` notch removed at the
    /// `+x +y` corner, extruded along z by `height`, centred on its bounding box.
    pub fn l_prism(a: f64, b: f64, notch: f64, height: f64) -> TriMesh {
        let outline = [
            (0.0, 0.0),
            (a, 0.0),
            (a, b - notch),
            (a - notch, b - notch),
            (a - notch, b),
            (0.0, b),
        ];
        let n = outline.len();
        let mut vertices = Vec::with_capacity(2 * n);
        for &(x, y) in &outline {
            vertices.push(Vec3::new(x - a / 2.0, y - b / 2.0, -height / 2.0));
            vertices.push(Vec3::new(x - a / 2.0, y - b / 2.0, height / 2.0));
        }
        let mut triangles = Vec::new();
        for k in 0..n {
            let (b0, t0) = (2 * k, 2 * k + 1);
            let (b1, t1) = (2 * ((k + 1) % n), 2 * ((k + 1) % n) + 1);
            triangles.push([b0, b1, t1]);
            triangles.push([b0, t1, t0]);
        }
        // The outline is counter-clockwise; triangulate the caps as two convex pieces.
        for tri in [[0, 1, 2], [0, 2, 3], [0, 3, 5], [3, 4, 5]] {
            triangles.push([2 * tri[0], 2 * tri[2], 2 * tri[1]]);
            triangles.push([2 * tri[0] + 1, 2 * tri[1] + 1, 2 * tri[2] + 1]);
        }
        TriMesh {
            vertices,
            triangles,
        }
    }
}

/// Moller-Trumbore; returns the ray parameter of a hit, if any.
pub fn ray_triangle(origin: Vec3, dir: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Option<f64> {
    let e1 = b - a;
    let e2 = c - a;
    let p = dir.cross(e2);
    let det = e1.dot(p);
    if det.abs() < 1e-18 {
        return None;
    }
    let inv = 1.0 / det;
    let s = origin - a;
    let u = s.dot(p) * inv;
    if !(-1e-12..=1.0 + 1e-12).contains(&u) {
        return None;
    }
    let q = s.cross(e1);
    let v = dir.dot(q) * inv;
    if v < -1e-12 || u + v > 1.0 + 1e-12 {
        return None;
    }
    Some(e2.dot(q) * inv)
}

/// Closest point on triangle `abc` to `p` (Ericson's region test).
pub fn closest_point_on_triangle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitives_are_closed_and_outward() {
        let meshes = [
            TriMesh::cuboid(Vec3::new(1.0, 2.0, 3.0)),
            TriMesh::cylinder(0.5, 2.0, 24),
            TriMesh::icosphere(1.0, 2),
            TriMesh::l_prism(1.0, 1.0, 0.5, 1.0),
        ];
        for m in meshes {
            let v = m.signed_volume();
            let closed = m.clone().into_closed().unwrap();
            assert!(v > 0.0);
            assert_eq!(closed, m);
        }
        let cube = TriMesh::cuboid(Vec3::new(1.0, 2.0, 3.0));
        assert!((cube.signed_volume() - 6.0).abs() < 1e-12);
        let l = TriMesh::l_prism(1.0, 1.0, 0.5, 1.0);
        assert!((l.signed_volume() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn inverted_mesh_is_flipped_and_open_mesh_rejected() {
        let mut m = TriMesh::cuboid(Vec3::new(1.0, 1.0, 1.0));
        for t in m.triangles.iter_mut() {
            t.swap(0, 1);
        }
        assert!(m.signed_volume() < 0.0);
        let fixed = m.into_closed().unwrap();
        assert!((fixed.signed_volume() - 1.0).abs() < 1e-12);

        let mut open = TriMesh::cuboid(Vec3::new(1.0, 1.0, 1.0));
        open.triangles.pop();
        assert!(matches!(open.into_closed(), Err(Error::NotWatertight(..))));
    }

    #[test]
    fn ray_cast_and_containment() {
        let m = TriMesh::cuboid(Vec3::new(2.0, 2.0, 2.0));
        let hit = m.ray_cast(Vec3::new(5.0, 0.1, 0.2), -Vec3::X, 0.0, 100.0).unwrap();
        assert!((hit.t - 4.0).abs() < 1e-12);
        assert!((hit.normal - Vec3::X).norm() < 1e-12);
        assert!(m.ray_cast(Vec3::new(5.0, 3.0, 0.0), -Vec3::X, 0.0, 100.0).is_none());
        assert!(m.contains(Vec3::new(0.3, -0.2, 0.9)));
        assert!(!m.contains(Vec3::new(1.3, -0.2, 0.9)));
    }

    #[test]
    fn closest_point_and_centroid() {
        let mut m = TriMesh::cuboid(Vec3::new(2.0, 2.0, 2.0));
        let (q, n) = m.closest_point(Vec3::new(0.2, 0.1, 3.0)).unwrap();
        assert!((q - Vec3::new(0.2, 0.1, 1.0)).norm() < 1e-12);
        assert!((n - Vec3::Z).norm() < 1e-12);
        m.translate(Vec3::new(1.0, 2.0, 3.0));
        assert!((m.volume_centroid() - Vec3::new(1.0, 2.0, 3.0)).norm() < 1e-12);
    }

    #[test]
    fn samples_lie_on_surface() {
        let m = TriMesh::icosphere(1.0, 1);
        let pts = m.sample_surface(200, 4);
        assert_eq!(pts.len(), 200);
        for p in pts {
            let (q, _) = m.closest_point(p).unwrap();
            assert!((p - q).norm() < 1e-9);
        }
    }
}
