//! Convex hulls in arbitrary dimension by quickhull.
//!
//! Facets are simplicial. Points closer than a tolerance to a facet plane are
//! treated as lying on it. Inputs whose near-degeneracy breaks the
//! construction are retried with a small deterministic joggle.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::linalg::null_vector;
use crate::rng;

/// Relative distance below which a point counts as on a facet plane.
const PLANE_RTOL: f64 = 1e-11;
/// Relative tolerance of the final all-points-inside check.
const VERIFY_RTOL: f64 = 1e-8;
/// Joggle magnitudes tried after a failed exact attempt, relative to scale.
const JOGGLES: [f64; 6] = [1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7];

#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    /// Sorted point indices spanning the facet.
    pub vertices: Vec<usize>,
    /// Outward unit normal.
    pub normal: Vec<f64>,
    /// Points `x` on the facet satisfy `normal . x = offset`; the hull lies below.
    pub offset: f64,
}

impl Facet {
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }
}

#[derive(Clone, Debug)]
pub struct ConvexHull {
    pub dim: usize,
    pub facets: Vec<Facet>,
}

impl ConvexHull {
    /// Distance from `x` to the hull boundary if `x` is strictly interior.
    pub fn interior_depth(&self, x: &[f64]) -> Option<f64> {
        let depth = self
            .facets
            .iter()
            .map(|f| -f.signed_distance(x))
            .fold(f64::INFINITY, f64::min);
        (depth > 0.0).then_some(depth)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HullError {
    /// Fewer than `dim + 1` points, or all points in a lower-dimensional flat.
    NotFullDimensional,
    /// Construction failed numerically even after joggling.
    Numerical,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Hull of `points` (row-major, `dim` columns), joggling on numerical failure.
pub fn convex_hull(points: &[f64], dim: usize) -> Result<ConvexHull, HullError> {
    let scale = points.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1e-300);
    match quickhull(points, dim, scale) {
        Err(HullError::Numerical) => {}
        other => return other,
    }
    for (attempt, &magnitude) in JOGGLES.iter().enumerate() {
        let mut rng = rng::stream(0, rng::purpose::JOGGLE, attempt as u64);
        let joggled: Vec<f64> = points
            .iter()
            .map(|&v| v + (rng.random::<f64>() * 2.0 - 1.0) * magnitude * scale)
            .collect();
        match quickhull(&joggled, dim, scale) {
            Err(HullError::Numerical) => continue,
            other => return other,
        }
    }
    Err(HullError::Numerical)
}

struct Builder<'a> {
    points: &'a [f64],
    dim: usize,
    eps: f64,
    interior: Vec<f64>,
    facets: Vec<Facet>,
    alive: Vec<bool>,
    outside: Vec<Vec<usize>>,
}

impl<'a> Builder<'a> {
    fn point(&self, i: usize) -> &'a [f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    fn make_facet(&self, mut vertices: Vec<usize>) -> Option<Facet> {
        vertices.sort_unstable();
        let base = self.point(vertices[0]);
        let rows: Vec<Vec<f64>> = vertices[1..]
            .iter()
            .map(|&v| self.point(v).iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        let mut normal = null_vector(&rows, self.dim, 1e-10)?;
        let mut offset = dot(&normal, base);
        let d = dot(&normal, &self.interior) - offset;
        if d.abs() <= self.eps {
            return None;
        }
        if d > 0.0 {
            for v in normal.iter_mut() {
                *v = -*v;
            }
            offset = -offset;
        }
        Some(Facet {
            vertices,
            normal,
            offset,
        })
    }

    fn push_facet(&mut self, facet: Facet) -> usize {
        self.facets.push(facet);
        self.alive.push(true);
        self.outside.push(Vec::new());
        self.facets.len() - 1
    }

    /// Give `candidates` to the first facet in `targets` they lie outside of.
    fn assign(&mut self, candidates: &[usize], targets: &[usize]) {
        for &p in candidates {
            let x = self.point(p);
            if let Some(&f) = targets
                .iter()
                .find(|&&f| self.facets[f].signed_distance(x) > self.eps)
            {
                self.outside[f].push(p);
            }
        }
    }
}

/// Greedy maximal-volume initial simplex; `None` if not full dimensional.
fn initial_simplex(points: &[f64], dim: usize, n: usize, eps: f64) -> Option<Vec<usize>> {
    let pt = |i: usize| &points[i * dim..(i + 1) * dim];
    let first = (0..n).min_by(|&a, &b| pt(a)[0].total_cmp(&pt(b)[0]))?;
    let mut chosen = vec![first];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while chosen.len() <= dim {
        let origin = pt(first);
        let mut best: Option<(usize, f64, Vec<f64>)> = None;
        for i in 0..n {
            if chosen.contains(&i) {
                continue;
            }
            let mut r: Vec<f64> = pt(i).iter().zip(origin).map(|(a, b)| a - b).collect();
            for b in &basis {
                let c = dot(&r, b);
                for (rv, bv) in r.iter_mut().zip(b) {
                    *rv -= c * bv;
                }
            }
            let len = dot(&r, &r).sqrt();
            if best.as_ref().is_none_or(|(_, l, _)| len > *l) {
                best = Some((i, len, r));
            }
        }
        let (i, len, r) = best?;
        if len <= eps * 10.0 {
            return None;
        }
        basis.push(r.into_iter().map(|v| v / len).collect());
        chosen.push(i);
    }
    Some(chosen)
}

fn quickhull(points: &[f64], dim: usize, scale: f64) -> Result<ConvexHull, HullError> {
    assert!(dim >= 2 && points.len() % dim == 0, "bad point buffer");
    let n = points.len() / dim;
    if n < dim + 1 {
        return Err(HullError::NotFullDimensional);
    }
    let eps = PLANE_RTOL * scale * dim as f64;
    let simplex = initial_simplex(points, dim, n, eps).ok_or(HullError::NotFullDimensional)?;

    let mut interior = vec![0.0; dim];
    for &v in &simplex {
        for (c, x) in interior.iter_mut().zip(&points[v * dim..(v + 1) * dim]) {
            *c += x / (dim + 1) as f64;
        }
    }
    let mut b = Builder {
        points,
        dim,
        eps,
        interior,
        facets: Vec::new(),
        alive: Vec::new(),
        outside: Vec::new(),
    };
    let mut initial = Vec::with_capacity(dim + 1);
    for skip in 0..=dim {
        let verts: Vec<usize> = simplex
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != skip)
            .map(|(_, &v)| v)
            .collect();
        let facet = b.make_facet(verts).ok_or(HullError::Numerical)?;
        initial.push(b.push_facet(facet));
    }
    let rest: Vec<usize> = (0..n).filter(|i| !simplex.contains(i)).collect();
    b.assign(&rest, &initial);

    let mut cursor = 0;
    while cursor < b.facets.len() {
        if !b.alive[cursor] || b.outside[cursor].is_empty() {
            cursor += 1;
            continue;
        }
        let apex = {
            let f = &b.facets[cursor];
            *b.outside[cursor]
                .iter()
                .max_by(|&&p, &&q| {
                    f.signed_distance(b.point(p))
                        .total_cmp(&f.signed_distance(b.point(q)))
                        .then(q.cmp(&p))
                })
                .expect("non-empty outside set")
        };
        let x = b.point(apex);
        let visible: Vec<usize> = (0..b.facets.len())
            .filter(|&f| b.alive[f] && b.facets[f].signed_distance(x) > eps)
            .collect();

        let mut ridges: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for &f in &visible {
            let verts = &b.facets[f].vertices;
            for skip in 0..verts.len() {
                let ridge: Vec<usize> = verts
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &v)| v)
                    .collect();
                *ridges.entry(ridge).or_insert(0) += 1;
            }
        }
        let mut orphans = Vec::new();
        for &f in &visible {
            b.alive[f] = false;
            orphans.append(&mut b.outside[f]);
        }
        orphans.retain(|&p| p != apex);

        let mut created = Vec::new();
        for (ridge, count) in ridges {
            if count != 1 {
                continue;
            }
            let mut verts = ridge;
            verts.push(apex);
            let facet = b.make_facet(verts).ok_or(HullError::Numerical)?;
            created.push(b.push_facet(facet));
        }
        if created.is_empty() {
            return Err(HullError::Numerical);
        }
        b.assign(&orphans, &created);
        cursor = 0;
    }

    let facets: Vec<Facet> = b
        .facets
        .into_iter()
        .zip(b.alive)
        .filter_map(|(f, alive)| alive.then_some(f))
        .collect();
    verify(points, dim, &facets, VERIFY_RTOL * scale * dim as f64)?;
    Ok(ConvexHull { dim, facets })
}

/// The hull must be closed (each ridge on exactly two facets) and contain every input point.
fn verify(points: &[f64], dim: usize, facets: &[Facet], tol: f64) -> Result<(), HullError> {
    let mut ridges: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for f in facets {
        for skip in 0..f.vertices.len() {
            let ridge: Vec<usize> = f
                .vertices
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != skip)
                .map(|(_, &v)| v)
                .collect();
            *ridges.entry(ridge).or_insert(0) += 1;
        }
    }
    if ridges.values().any(|&c| c != 2) {
        return Err(HullError::Numerical);
    }
    for p in points.chunks_exact(dim) {
        if facets.iter().any(|f| f.signed_distance(p) > tol) {
            return Err(HullError::Numerical);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(dim: usize) -> Vec<f64> {
        let mut pts = Vec::new();
        for mask in 0..(1usize << dim) {
            for k in 0..dim {
                pts.push(if mask >> k & 1 == 1 { 1.0 } else { -1.0 });
            }
        }
        pts
    }

    #[test]
    fn square_and_cube_depths() {
        for dim in 2..=4 {
            let mut pts = cube(dim);
            pts.extend(core::iter::repeat_n(0.25, dim));
            let hull = convex_hull(&pts, dim).unwrap();
            let depth = hull.interior_depth(&vec![0.0; dim]).unwrap();
            assert!((depth - 1.0).abs() < 1e-6, "dim {dim}: depth {depth}");
            let mut off = vec![0.0; dim];
            off[0] = 0.5;
            let d = hull.interior_depth(&off).unwrap();
            assert!((d - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn simplex_depth_matches_inradius() {
        // Right-angle simplex x_i >= 0, sum x_i <= 1 in 3D; incenter at r(1,1,1)
        // with r = 1 / (3 + sqrt(3)).
        let pts = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let hull = convex_hull(&pts, 3).unwrap();
        assert_eq!(hull.facets.len(), 4);
        let r = 1.0 / (3.0 + 3f64.sqrt());
        let d = hull.interior_depth(&[r, r, r]).unwrap();
        assert!((d - r).abs() < 1e-12);
        assert!(hull.interior_depth(&[1.0, 1.0, 1.0]).is_none());
    }

    #[test]
    fn flat_input_is_not_full_dimensional() {
        let pts = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.5, 0.5, 0.0];
        assert_eq!(convex_hull(&pts, 3).unwrap_err(), HullError::NotFullDimensional);
        assert_eq!(convex_hull(&pts[..9], 3).unwrap_err(), HullError::NotFullDimensional);
    }

    #[test]
    fn coplanar_faces_survive() {
        // Cube with extra points in the middle of every face.
        let mut pts = cube(3);
        for axis in 0..3 {
            for s in [-1.0, 1.0] {
                let mut p = [0.0; 3];
                p[axis] = s;
                pts.extend_from_slice(&p);
                p[(axis + 1) % 3] = 0.5;
                pts.extend_from_slice(&p);
            }
        }
        let hull = convex_hull(&pts, 3).unwrap();
        let d = hull.interior_depth(&[0.0, 0.0, 0.0]).unwrap();
        assert!((d - 1.0).abs() < 1e-6);
    }
}
