//! Gaussian-process implicit surface.
//!
//! Points on the observed surface are labelled 0, points known to be outside
//! +1 and the interior anchor -1. A GP with the thin-plate kernel over these
//! labels gives a field whose zero level set is the surface estimate and whose
//! variance says how much that estimate can be trusted.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;


use crate::gp::{GpModel, KernelSpec, Prediction};
use crate::isosurface::{extract_zero_level_set, ScalarGrid};
use crate::math::{centroid, Vec3};
use crate::mesh::TriMesh;
use crate::{Error, Result};

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

/// Relative slack for membership tests on the domain boundary.
const DOMAIN_RTOL: f64 = 1e-9;

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Aabb { min, max }
    }

    pub fn from_points(points: &[Vec3]) -> Option<Self> {
        let first = *points.first()?;
        Some(points.iter().fold(Aabb::new(first, first), |b, &p| {
            Aabb::new(b.min.min_by_component(p), b.max.max_by_component(p))
        }))
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn diagonal(&self) -> f64 {
        self.extent().norm()
    }

    pub fn volume(&self) -> f64 {
        let e = self.extent();
        e.x.max(0.0) * e.y.max(0.0) * e.z.max(0.0)
    }

    pub fn contains(&self, p: Vec3) -> bool {
        let tol = DOMAIN_RTOL * self.diagonal().max(1e-300);
        (0..3).all(|k| p[k] >= self.min[k] - tol && p[k] <= self.max[k] + tol)
    }

    pub fn clamp(&self, p: Vec3) -> Vec3 {
        p.max_by_component(self.min).min_by_component(self.max)
    }

    /// Grow every side by `margin`.
    pub fn inflate(&self, margin: f64) -> Aabb {
        let m = Vec3::new(margin, margin, margin);
        Aabb::new(self.min - m, self.max + m)
    }

    pub fn corners(&self) -> [Vec3; 8] {
        core::array::from_fn(|c| {
            Vec3::new(
                if c & 1 == 1 { self.max.x } else { self.min.x },
                if c & 2 == 2 { self.max.y } else { self.min.y },
                if c & 4 == 4 { self.max.z } else { self.min.z },
            )
        })
    }

    pub fn face_centers(&self) -> [Vec3; 6] {
        let c = self.center();
        [
            Vec3::new(self.min.x, c.y, c.z),
            Vec3::new(self.max.x, c.y, c.z),
            Vec3::new(c.x, self.min.y, c.z),
            Vec3::new(c.x, self.max.y, c.z),
            Vec3::new(c.x, c.y, self.min.z),
            Vec3::new(c.x, c.y, self.max.z),
        ]
    }

    /// Nodes of an `n`-segment lattice lying on the box surface, plus the
    /// face centres when `n` is odd. `n = 1` gives the corners and face centres.
    pub fn surface_lattice(&self, n: usize) -> Vec<Vec3> {
        let n = n.max(1);
        let on = |v: usize| v == 0 || v == n;
        let mut out = Vec::new();
        for k in 0..=n {
            for j in 0..=n {
                for i in 0..=n {
                    if on(i) || on(j) || on(k) {
                        let u = Vec3::new(i as f64, j as f64, k as f64) / n as f64;
                        out.push(self.denormalize(u));
                    }
                }
            }
        }
        if n % 2 == 1 {
            out.extend(self.face_centers());
        }
        out
    }

    /// Map into `[0, 1]^3`.
    pub fn normalize(&self, p: Vec3) -> Vec3 {
        let e = self.extent();
        Vec3::new(
            (p.x - self.min.x) / e.x,
            (p.y - self.min.y) / e.y,
            (p.z - self.min.z) / e.z,
        )
    }

    pub fn denormalize(&self, u: Vec3) -> Vec3 {
        let e = self.extent();
        Vec3::new(
            self.min.x + u.x * e.x,
            self.min.y + u.y * e.y,
            self.min.z + u.z * e.z,
        )
    }
}

/// Fraction of the largest cloud extent added on every side of the domain.
pub const DOMAIN_MARGIN: f64 = 0.2;

/// Thin-plate `R` as a multiple of the domain diagonal. At 1 the kernel
/// matrix over points spread across the domain is indefinite in 3D and
/// posterior variances go negative; from about 1.25 on it stays positive.
pub const THIN_PLATE_RANGE: f64 = 1.5;

/// Default lattice segments per domain edge for the outside anchors.
pub const BOUNDARY_GRID: usize = 4;

/// Default depth added behind the cloud, as a fraction of its largest extent.
pub const DEPTH_EXTENSION: f64 = 0.5;

/// Shape domain for a single-view cloud: the cloud's bounding box, extended
/// away from the camera by `depth_extension` times the largest extent (the
/// occluded depth is unknown), then inflated by [`DOMAIN_MARGIN`] of that
/// extent on every side.
pub fn domain_for_view(cloud: &[Vec3], view_dir: Vec3, depth_extension: f64) -> Result<Aabb> {
    let bbox = Aabb::from_points(cloud).ok_or(Error::Empty("point cloud"))?;
    let e = bbox.extent();
    let largest = e.x.max(e.y).max(e.z);
    if !(largest > 0.0) {
        return Err(Error::DegenerateDomain);
    }
    if !(depth_extension >= 0.0) {
        return Err(Error::InvalidParameter("depth extension must be >= 0"));
    }
    let push = view_dir.normalize() * (largest * depth_extension);
    let grow = |lo: f64, hi: f64, p: f64| if p > 0.0 { (lo, hi + p) } else { (lo + p, hi) };
    let (x0, x1) = grow(bbox.min.x, bbox.max.x, push.x);
    let (y0, y1) = grow(bbox.min.y, bbox.max.y, push.y);
    let (z0, z1) = grow(bbox.min.z, bbox.max.z, push.z);
    Ok(Aabb::new(Vec3::new(x0, y0, z0), Vec3::new(x1, y1, z1)).inflate(DOMAIN_MARGIN * largest))
}

/// Average points into cubic voxels, growing the voxel until at most
/// `max_points` remain. Output order is deterministic.
pub fn voxel_downsample(cloud: &[Vec3], max_points: usize) -> Vec<Vec3> {
    if cloud.len() <= max_points || max_points == 0 {
        return cloud.to_vec();
    }
    let bbox = match Aabb::from_points(cloud) {
        Some(b) => b,
        None => return Vec::new(),
    };
    let mut voxel = bbox.diagonal().max(1e-12) / 256.0;
    loop {
        let mut cells: BTreeMap<(i64, i64, i64), (Vec3, usize)> = BTreeMap::new();
        for &p in cloud {
            let q = (p - bbox.min) / voxel;
            let key = (q.x.floor() as i64, q.y.floor() as i64, q.z.floor() as i64);
            let e = cells.entry(key).or_insert((Vec3::ZERO, 0));
            e.0 += p;
            e.1 += 1;
        }
        if cells.len() <= max_points {
            return cells.into_values().map(|(s, n)| s / n as f64).collect();
        }
        voxel *= 1.25;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PointSource {
    Vision,
    Tactile,
    Boundary,
    Centroid,
    /// Seen through by the camera, so outside the object.
    FreeSpace,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabeledPoint {
    pub position: Vec3,
    /// -1 inside, 0 on the surface, +1 outside.
    pub label: f64,
    pub source: PointSource,
    pub noise_var: f64,
}

/// Observation noise variance per point source.
///
/// The thin-plate kernel grows with the cube of length, so only the ratio of
/// these to `R^3` matters. The defaults suit metre-sized objects: 1e-4,
/// 1e-5 and 1e-6 at a tenth of the size give the same model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GpisNoise {
    pub vision: f64,
    pub tactile: f64,
    pub anchor: f64,
}

impl Default for GpisNoise {
    fn default() -> Self {
        GpisNoise {
            vision: 0.1,
            tactile: 0.01,
            anchor: 0.001,
        }
    }
}

impl GpisNoise {
    pub fn tactile_point(&self, position: Vec3) -> LabeledPoint {
        LabeledPoint {
            position,
            label: 0.0,
            source: PointSource::Tactile,
            noise_var: self.tactile,
        }
    }
}

/// Outside-labelled points `offset` in front of every `stride`-th cloud point,
/// along its ray back to `viewpoint`. The camera saw through them, so they
/// are empty space; without them the field just outside a densely sampled
/// surface hovers around 0 and the level set drifts outwards. The label is
/// `offset` itself, as a +1 this close to the surface makes the field steep
/// and bends the hidden side. Points that leave `domain` are dropped.
pub fn free_space_points(
    cloud: &[Vec3],
    viewpoint: Vec3,
    offset: f64,
    stride: usize,
    domain: &Aabb,
    noise: &GpisNoise,
) -> Vec<LabeledPoint> {
    if !(offset > 0.0) || stride == 0 {
        return Vec::new();
    }
    cloud
        .iter()
        .step_by(stride)
        .filter_map(|&p| {
            let ray = (viewpoint - p).try_normalize()?;
            let q = p + ray * offset;
            domain.contains(q).then_some(LabeledPoint {
                position: q,
                label: offset,
                source: PointSource::FreeSpace,
                noise_var: noise.anchor,
            })
        })
        .collect()
}

/// Centre-of-mass estimate with isotropic standard deviation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassEstimate {
    pub p_com: Vec3,
    pub sigma_com: f64,
}

/// Interior cells used for the centre-of-mass variance.
const COM_VARIANCE_SAMPLES: usize = 64;

#[derive(Clone, Debug)]
pub struct SurfaceEstimate {
    pub mesh: TriMesh,
    pub grid_resolution: usize,
    pub mean_field: ScalarGrid,
    pub variance_field: Option<ScalarGrid>,
}

#[derive(Clone, Debug)]
pub struct GpisModel {
    gp: GpModel,
    domain: Aabb,
    points: Vec<LabeledPoint>,
}

impl GpisModel {
    /// Build from a vision cloud: cloud points on the surface, the domain's
    /// [`surface_lattice`](Aabb::surface_lattice) of `boundary_grid` segments
    /// outside, and the cloud centroid inside.
    ///
    /// Corners and face centres alone (`boundary_grid = 1`) leave the field
    /// free to dip below zero along the domain edges once a dense cloud pins
    /// it to 0, which puts spurious surface sheets in empty space.
    pub fn init(cloud: &[Vec3], domain: Aabb, noise: &GpisNoise, boundary_grid: usize) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::Empty("point cloud"));
        }
        if cloud.len() < 10 {
            return Err(Error::TooFewPoints {
                needed: 10,
                found: cloud.len(),
            });
        }
        if !(domain.volume() > 0.0) {
            return Err(Error::DegenerateDomain);
        }
        if let Some(p) = cloud.iter().find(|p| !domain.contains(**p)) {
            return Err(out_of_domain(*p));
        }
        if boundary_grid == 0 {
            return Err(Error::InvalidParameter("boundary grid needs at least one segment"));
        }
        let lattice = domain.surface_lattice(boundary_grid);
        let mut points = Vec::with_capacity(cloud.len() + lattice.len() + 1);
        points.extend(cloud.iter().map(|&position| LabeledPoint {
            position,
            label: 0.0,
            source: PointSource::Vision,
            noise_var: noise.vision,
        }));
        let boundary = |position| LabeledPoint {
            position,
            label: 1.0,
            source: PointSource::Boundary,
            noise_var: noise.anchor,
        };
        points.extend(lattice.into_iter().map(boundary));
        points.push(LabeledPoint {
            position: centroid(cloud).expect("non-empty cloud"),
            label: -1.0,
            source: PointSource::Centroid,
            noise_var: noise.anchor,
        });
        let kernel = KernelSpec::thin_plate(THIN_PLATE_RANGE * domain.diagonal())?;
        let model = GpisModel {
            gp: GpModel::empty(kernel, 3),
            domain,
            points: Vec::new(),
        };
        model.add_observations(&points)
    }

    /// A new model additionally conditioned on `points`.
    pub fn add_observations(&self, points: &[LabeledPoint]) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !self.domain.contains(p.position)) {
            return Err(out_of_domain(p.position));
        }
        let inputs: Vec<[f64; 3]> = points.iter().map(|p| p.position.to_array()).collect();
        let labels: Vec<f64> = points.iter().map(|p| p.label).collect();
        let noise: Vec<f64> = points.iter().map(|p| p.noise_var).collect();
        let mut next = self.clone();
        next.gp.extend(&inputs, &labels, &noise)?;
        next.points.extend_from_slice(points);
        Ok(next)
    }

    pub fn domain(&self) -> &Aabb {
        &self.domain
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn gp(&self) -> &GpModel {
        &self.gp
    }

    /// Centroid of the labelled interior anchor.
    pub fn anchor_centroid(&self) -> Option<Vec3> {
        self.points
            .iter()
            .find(|p| p.source == PointSource::Centroid)
            .map(|p| p.position)
    }

    fn check(&self, x: Vec3) -> Result<()> {
        if self.domain.contains(x) {
            Ok(())
        } else {
            Err(out_of_domain(x))
        }
    }

    pub fn query(&self, x: Vec3) -> Result<Prediction> {
        self.check(x)?;
        self.gp.predict(&self.domain.clamp(x).to_array())
    }

    pub fn query_mean(&self, x: Vec3) -> Result<f64> {
        self.check(x)?;
        self.gp.predict_mean(&self.domain.clamp(x).to_array())
    }

    /// Mean field sampled on `(resolution + 1)^3` nodes spanning the domain.
    pub fn mean_grid(&self, resolution: usize) -> Result<ScalarGrid> {
        self.node_grid(resolution, |x| self.gp.predict_mean(&x.to_array()))
    }

    pub fn variance_grid(&self, resolution: usize) -> Result<ScalarGrid> {
        self.node_grid(resolution, |x| Ok(self.gp.predict(&x.to_array())?.variance))
    }

    fn node_grid<F: Fn(Vec3) -> Result<f64>>(&self, resolution: usize, f: F) -> Result<ScalarGrid> {
        if resolution == 0 {
            return Err(Error::InvalidParameter("grid resolution must be positive"));
        }
        let n = resolution + 1;
        let spacing = self.domain.extent() / resolution as f64;
        let mut grid = ScalarGrid {
            origin: self.domain.min,
            spacing,
            dims: [n; 3],
            values: Vec::with_capacity(n * n * n),
        };
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let x = self.domain.clamp(grid.node(i, j, k));
                    grid.values.push(f(x)?);
                }
            }
        }
        Ok(grid)
    }

    /// Centroid of the cells whose centre has a negative mean, with spread
    /// from the mean predictive variance over (an even subsample of) those
    /// cells, floored at one cell edge.
    pub fn estimate_com(&self, resolution: usize) -> Result<MassEstimate> {
        if resolution < 8 {
            return Err(Error::InvalidParameter("centre-of-mass grid needs resolution >= 8"));
        }
        let cell = self.domain.extent() / resolution as f64;
        let mut inside = Vec::new();
        for k in 0..resolution {
            for j in 0..resolution {
                for i in 0..resolution {
                    let x = self.domain.min
                        + Vec3::new(
                            (i as f64 + 0.5) * cell.x,
                            (j as f64 + 0.5) * cell.y,
                            (k as f64 + 0.5) * cell.z,
                        );
                    if self.gp.predict_mean(&x.to_array())? < 0.0 {
                        inside.push(x);
                    }
                }
            }
        }
        let p_com = centroid(&inside).ok_or(Error::DegenerateShape)?;
        let stride = inside.len().div_ceil(COM_VARIANCE_SAMPLES);
        let mut var_sum = 0.0;
        let mut count = 0usize;
        for x in inside.iter().step_by(stride) {
            var_sum += self.gp.predict(&x.to_array())?.variance;
            count += 1;
        }
        let floor = cell.x.max(cell.y).max(cell.z);
        Ok(MassEstimate {
            p_com,
            sigma_com: (var_sum / count as f64).sqrt().max(floor),
        })
    }

    pub fn extract_surface(&self, resolution: usize) -> Result<SurfaceEstimate> {
        if resolution < 16 {
            return Err(Error::InvalidParameter("surface grid needs resolution >= 16"));
        }
        let mean_field = self.mean_grid(resolution)?;
        if !mean_field.has_sign_change() {
            return Err(Error::EmptySurface);
        }
        let mesh = extract_zero_level_set(&mean_field);
        if mesh.triangles.is_empty() {
            return Err(Error::EmptySurface);
        }
        Ok(SurfaceEstimate {
            mesh,
            grid_resolution: resolution,
            mean_field,
            variance_field: None,
        })
    }

    /// As [`extract_surface`](Self::extract_surface), also sampling the variance on every node.
    pub fn extract_surface_with_variance(&self, resolution: usize) -> Result<SurfaceEstimate> {
        let mut s = self.extract_surface(resolution)?;
        s.variance_field = Some(self.variance_grid(resolution)?);
        Ok(s)
    }

    /// Mean predictive variance over the `(resolution + 1)^3` domain nodes.
    pub fn mean_variance(&self, resolution: usize) -> Result<f64> {
        if resolution < 16 {
            return Err(Error::InvalidParameter("variance grid needs resolution >= 16"));
        }
        let g = self.variance_grid(resolution)?;
        Ok(g.values.iter().sum::<f64>() / g.values.len() as f64)
    }
}

fn out_of_domain(p: Vec3) -> Error {
    Error::OutOfDomain {
        x: p.x,
        y: p.y,
        z: p.z,
    }
}

/// Symmetric Hausdorff distance between two point samples.
pub fn hausdorff(a: &[Vec3], b: &[Vec3]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("Hausdorff sample"));
    }
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

/// `max_a min_b |a - b|`, with the usual early break once a point is known
/// not to raise the running maximum.
fn directed_hausdorff(a: &[Vec3], b: &[Vec3]) -> f64 {
    let mut worst = 0.0f64;
    for &p in a {
        let mut nearest = f64::INFINITY;
        for &q in b {
            let d = (p - q).norm_squared();
            if d < nearest {
                nearest = d;
                if nearest <= worst {
                    break;
                }
            }
        }
        worst = worst.max(nearest);
    }
    worst.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fibonacci_sphere(n: usize, radius: f64) -> Vec<Vec3> {
        let golden = core::f64::consts::PI * (3.0 - 5f64.sqrt());
        (0..n)
            .map(|i| {
                let y = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                let r = (1.0 - y * y).sqrt();
                let t = golden * i as f64;
                Vec3::new(r * t.cos(), y, r * t.sin()) * radius
            })
            .collect()
    }

    fn unit_domain() -> Aabb {
        Aabb::new(Vec3::new(-1.5, -1.5, -1.5), Vec3::new(1.5, 1.5, 1.5))
    }

    #[test]
    fn init_bookkeeping_and_anchor_signs() {
        let cloud: Vec<Vec3> = fibonacci_sphere(200, 1.0).into_iter().filter(|p| p.x > 0.0).collect();
        let n = cloud.len();
        let domain = domain_for_view(&cloud, -Vec3::X, 1.0).unwrap();
        let m = GpisModel::init(&cloud, domain, &GpisNoise::default(), 1).unwrap();
        assert_eq!(m.points().len(), n + 14 + 1);
        let dense = GpisModel::init(&cloud, domain, &GpisNoise::default(), 4).unwrap();
        assert_eq!(dense.points().len(), n + (125 - 27) + 1);
        let c = centroid(&cloud).unwrap();
        assert!(m.query(c).unwrap().mean < 0.0);
        for corner in domain.corners() {
            assert!(m.query(corner).unwrap().mean > 0.0);
        }
        match m.gp().kernel() {
            KernelSpec::ThinPlate { max_distance } => {
                assert!((max_distance - THIN_PLATE_RANGE * domain.diagonal()).abs() < 1e-12)
            }
            _ => panic!("GPIS must use the thin-plate kernel"),
        }
    }

    #[test]
    fn free_space_points_face_the_camera() {
        let cloud: Vec<Vec3> = fibonacci_sphere(200, 1.0).into_iter().filter(|p| p.x > 0.3).collect();
        let eye = Vec3::new(4.0, 0.0, 0.0);
        let d = unit_domain();
        let pts = free_space_points(&cloud, eye, 0.2, 3, &d, &GpisNoise::default());
        assert_eq!(pts.len(), cloud.len().div_ceil(3));
        for (p, c) in pts.iter().zip(cloud.iter().step_by(3)) {
            assert!((p.position.distance(*c) - 0.2).abs() < 1e-12);
            assert!(p.position.norm() > 1.0 && p.label == 0.2);
            assert!(p.position.distance(eye) < c.distance(eye));
        }
        assert!(free_space_points(&cloud, eye, 0.0, 3, &d, &GpisNoise::default()).is_empty());
        assert!(free_space_points(&cloud, eye, 5.0, 1, &d, &GpisNoise::default()).is_empty());
    }

    #[test]
    fn surface_lattice_counts() {
        let d = unit_domain();
        let one = d.surface_lattice(1);
        assert_eq!(one.len(), 14);
        assert!(d.corners().iter().chain(&d.face_centers()).all(|c| one.contains(c)));
        for n in 2..6 {
            let l = d.surface_lattice(n);
            let expect = (n + 1).pow(3) - (n - 1).pow(3) + if n % 2 == 1 { 6 } else { 0 };
            assert_eq!(l.len(), expect);
            assert!(l.iter().all(|p| d.contains(*p)));
        }
    }

    #[test]
    fn init_errors() {
        let noise = GpisNoise::default();
        assert!(matches!(GpisModel::init(&[], unit_domain(), &noise, 1), Err(Error::Empty(_))));
        let cloud = fibonacci_sphere(20, 1.0);
        let flat = Aabb::new(Vec3::ZERO, Vec3::new(1.0, 1.0, 0.0));
        assert_eq!(GpisModel::init(&cloud, flat, &noise, 1).unwrap_err(), Error::DegenerateDomain);
        assert!(matches!(GpisModel::init(&cloud, unit_domain(), &noise, 0), Err(Error::InvalidParameter(_))));
        assert!(matches!(
            GpisModel::init(&cloud[..5], unit_domain(), &noise, 1),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn full_sphere_reconstruction() {
        let cloud = fibonacci_sphere(300, 1.0);
        let m = GpisModel::init(&cloud, unit_domain(), &GpisNoise::default(), BOUNDARY_GRID).unwrap();
        assert!(m.query(Vec3::new(0.1, -0.2, 0.1)).unwrap().mean < 0.0);
        let com = m.estimate_com(16).unwrap();
        let spacing = 3.0 / 16.0;
        assert!(com.p_com.norm() < spacing, "com {:?}", com.p_com);
        assert!(com.sigma_com >= spacing);
        let s = m.extract_surface(24).unwrap();
        let h = 3.0 / 24.0;
        for v in &s.mesh.vertices {
            assert!((v.norm() - 1.0).abs() < 2.0 * h, "vertex radius {}", v.norm());
        }
    }

    #[test]
    fn tactile_point_is_interpolated_and_reduces_variance() {
        let cloud: Vec<Vec3> = fibonacci_sphere(200, 1.0).into_iter().filter(|p| p.x > 0.2).collect();
        let m = GpisModel::init(&cloud, unit_domain(), &GpisNoise::default(), BOUNDARY_GRID).unwrap();
        let far = Vec3::new(-1.0, 0.0, 0.0);
        let before = m.query(far).unwrap();
        let m2 = m.add_observations(&[GpisNoise::default().tactile_point(far)]).unwrap();
        let after = m2.query(far).unwrap();
        assert!(after.variance < before.variance);
        assert!(after.mean.abs() < 0.05);
        let same = m.add_observations(&[]).unwrap();
        let q = Vec3::new(0.3, 0.3, -0.2);
        assert_eq!(same.query(q).unwrap(), m.query(q).unwrap());
        assert!(matches!(
            m.add_observations(&[GpisNoise::default().tactile_point(Vec3::new(9.0, 0.0, 0.0))]),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(m.query(Vec3::new(0.0, 0.0, 2.0)).is_err());
    }

    #[test]
    fn all_positive_field_has_no_surface() {
        // A cloud labelled 0 far from its own centroid anchor cannot make the
        // field negative anywhere once the centroid anchor is overwhelmed; use
        // a bare model with only boundary anchors instead.
        let d = unit_domain();
        let kernel = KernelSpec::thin_plate(d.diagonal()).unwrap();
        let anchors: Vec<[f64; 3]> = d.corners().iter().map(|c| c.to_array()).collect();
        let gp = GpModel::fit(&anchors, &[1.0; 8], &[1e-6; 8], kernel).unwrap();
        let m = GpisModel {
            gp,
            domain: d,
            points: Vec::new(),
        };
        assert_eq!(m.extract_surface(16).unwrap_err(), Error::EmptySurface);
        assert_eq!(m.estimate_com(8).unwrap_err(), Error::DegenerateShape);
    }

    #[test]
    fn hausdorff_basics() {
        let a = fibonacci_sphere(2000, 1.0);
        let b = fibonacci_sphere(2000, 1.1);
        assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        let h = hausdorff(&a, &b).unwrap();
        assert!((h - 0.1).abs() < 0.005, "h = {h}");
        assert_eq!(h, hausdorff(&b, &a).unwrap());
        assert!(hausdorff(&a, &[]).is_err());
    }

    #[test]
    fn downsample_respects_budget() {
        let cloud = fibonacci_sphere(5000, 1.0);
        let d = voxel_downsample(&cloud, 800);
        assert!(d.len() <= 800 && d.len() > 200);
        assert_eq!(d, voxel_downsample(&cloud, 800));
        assert_eq!(voxel_downsample(&cloud[..10], 800).len(), 10);
    }

    #[test]
    fn view_domain_covers_occluded_half() {
        let cloud: Vec<Vec3> = fibonacci_sphere(500, 1.0).into_iter().filter(|p| p.x > 0.0).collect();
        let d = domain_for_view(&cloud, -Vec3::X, 1.0).unwrap();
        for p in fibonacci_sphere(500, 1.0) {
            assert!(d.contains(p));
        }
    }
}
