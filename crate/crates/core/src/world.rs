//! Deterministic stand-in for the physical scene: a rigid object, a pinhole
//! depth camera, a three-finger hand that closes straight-line probes, and a
//! noise-free force-closure check on the true geometry.

use alloc::string::String;
use alloc::vec::Vec;

use crate::grasp::{contact_quality, Contact};
use crate::math::{centroid, Mat3, Vec3};
use crate::mesh::TriMesh;
use crate::rng::{self, gaussian, gaussian_vec3, perturb_direction};
use crate::{Error, Infeasibility, Result};

/// Ground-truth object.
#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    Sphere { center: Vec3, radius: f64 },
    Mesh(TriMesh),
}

/// Nearest ray intersection with the outward surface normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceHit {
    pub t: f64,
    pub point: Vec3,
    pub normal: Vec3,
}

impl Body {
    pub fn ray_cast(&self, origin: Vec3, dir: Vec3, t_min: f64, t_max: f64) -> Option<SurfaceHit> {
        match self {
            Body::Sphere { center, radius } => {
                let d = dir.normalize();
                let scale = dir.norm();
                let oc = origin - *center;
                let b = oc.dot(d);
                let disc = b * b - (oc.norm_squared() - radius * radius);
                if disc < 0.0 {
                    return None;
                }
                let root = disc.sqrt();
                [-b - root, -b + root]
                    .into_iter()
                    .map(|s| s / scale)
                    .find(|&t| t > t_min && t <= t_max)
                    .map(|t| {
                        let point = origin + dir * t;
                        SurfaceHit {
                            t,
                            point,
                            normal: (point - *center).normalize(),
                        }
                    })
            }
            Body::Mesh(mesh) => mesh.ray_cast(origin, dir, t_min, t_max).map(|h| SurfaceHit {
                t: h.t,
                point: h.point,
                normal: h.normal,
            }),
        }
    }

    pub fn contains(&self, p: Vec3) -> bool {
        match self {
            Body::Sphere { center, radius } => (p - *center).norm() < *radius,
            Body::Mesh(mesh) => mesh.contains(p),
        }
    }

    /// Closest surface point and the outward normal there.
    pub fn closest_point(&self, p: Vec3) -> (Vec3, Vec3) {
        match self {
            Body::Sphere { center, radius } => {
                let n = (p - *center).try_normalize().unwrap_or(Vec3::Z);
                (*center + n * *radius, n)
            }
            Body::Mesh(mesh) => mesh.closest_point(p).unwrap_or((p, Vec3::Z)),
        }
    }

    /// Centre of mass for uniform density.
    pub fn center_of_mass(&self) -> Vec3 {
        match self {
            Body::Sphere { center, .. } => *center,
            Body::Mesh(mesh) => mesh.volume_centroid(),
        }
    }

    pub fn bounds(&self) -> (Vec3, Vec3) {
        match self {
            Body::Sphere { center, radius } => {
                let r = Vec3::new(*radius, *radius, *radius);
                (*center - r, *center + r)
            }
            Body::Mesh(mesh) => mesh.bounds().unwrap_or((Vec3::ZERO, Vec3::ZERO)),
        }
    }

    /// Uniform samples on the surface.
    pub fn sample_surface(&self, count: usize, seed: u64) -> Vec<Vec3> {
        match self {
            Body::Sphere { center, radius } => {
                let mut r = rng::stream(seed, rng::purpose::SURFACE_SAMPLE, 0);
                (0..count)
                    .map(|_| *center + gaussian_vec3(&mut r, 1.0).normalize() * *radius)
                    .collect()
            }
            Body::Mesh(mesh) => mesh.sample_surface(count, seed),
        }
    }

    /// Triangulated surface; spheres are tessellated.
    pub fn to_mesh(&self) -> TriMesh {
        match self {
            Body::Sphere { center, radius } => {
                let mut m = TriMesh::icosphere(*radius, 3);
                m.translate(*center);
                m
            }
            Body::Mesh(mesh) => mesh.clone(),
        }
    }

    pub fn translate(&mut self, offset: Vec3) {
        match self {
            Body::Sphere { center, .. } => *center += offset,
            Body::Mesh(mesh) => mesh.translate(offset),
        }
    }
}

/// The object together with the hand and its tactile sensing noise.
#[derive(Clone, Debug, PartialEq)]
pub struct World {
    pub body: Body,
    pub hand: VirtualHand,
    pub sensing: SensingNoise,
}

/// Names accepted by [`builtin_object`].
pub const BUILTIN_OBJECTS: [&str; 5] = ["sphere", "box", "book", "cylinder", "lshape"];

/// Built-in test objects, all centred on the origin.
pub fn builtin_object(name: &str) -> Option<Body> {
    let body = match name {
        "sphere" => Body::Sphere {
            center: Vec3::ZERO,
            radius: 1.0,
        },
        "box" => Body::Mesh(TriMesh::cuboid(Vec3::new(1.2, 1.0, 1.6))),
        "book" => Body::Mesh(TriMesh::cuboid(Vec3::new(1.5, 0.4, 2.0))),
        "cylinder" => Body::Mesh(TriMesh::cylinder(0.5, 2.0, 48)),
        "lshape" => {
            let mut m = TriMesh::l_prism(1.6, 1.2, 0.8, 0.6);
            let c = m.volume_centroid();
            m.translate(-c);
            Body::Mesh(m)
        }
        _ => return None,
    };
    Some(body)
}

/// Pinhole depth camera looking from `position` at `target`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameraSpec {
    pub position: Vec3,
    pub target: Vec3,
    pub up: Vec3,
    /// Full field of view (rad).
    pub fov: f64,
    /// Rays per image axis.
    pub resolution: usize,
    pub depth_noise_sigma: f64,
}

impl Default for CameraSpec {
    fn default() -> Self {
        CameraSpec {
            position: Vec3::new(3.6, 1.2, 1.5),
            target: Vec3::ZERO,
            up: Vec3::Z,
            fov: 0.8,
            resolution: 64,
            depth_noise_sigma: 0.01,
        }
    }
}

impl CameraSpec {
    pub fn view_direction(&self) -> Vec3 {
        (self.target - self.position).normalize()
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 16 {
            return Err(Error::InvalidParameter("camera resolution must be >= 16"));
        }
        if !(self.fov > 0.0 && self.fov < core::f64::consts::PI) {
            return Err(Error::InvalidParameter("camera field of view must be in (0, pi)"));
        }
        if !(self.depth_noise_sigma >= 0.0) {
            return Err(Error::InvalidParameter("depth noise must be >= 0"));
        }
        if (self.target - self.position).try_normalize().is_none() {
            return Err(Error::InvalidParameter("camera target equals its position"));
        }
        Ok(())
    }
}

/// One ray per pixel; the nearest hit is pushed along the ray by Gaussian
/// depth noise. Pixel `p` draws from its own stream.
pub fn render_pointcloud(body: &Body, cam: &CameraSpec, seed: u64) -> Result<Vec<Vec3>> {
    cam.validate()?;
    if body.contains(cam.position) {
        return Err(Error::InvalidParameter("camera is inside the object"));
    }
    let frame = Mat3::look_along(cam.view_direction(), cam.up);
    let (right, down, forward) = (frame.column(0), frame.column(1), frame.column(2));
    let half = (cam.fov * 0.5).tan();
    let n = cam.resolution;
    let mut cloud = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let u = (2.0 * (i as f64 + 0.5) / n as f64 - 1.0) * half;
            let v = (2.0 * (j as f64 + 0.5) / n as f64 - 1.0) * half;
            let dir = (forward + right * u + down * v).normalize();
            if let Some(hit) = body.ray_cast(cam.position, dir, 0.0, f64::INFINITY) {
                let noise = if cam.depth_noise_sigma > 0.0 {
                    let mut r = rng::stream(seed, rng::purpose::CAMERA, (j * n + i) as u64);
                    gaussian(&mut r) * cam.depth_noise_sigma
                } else {
                    0.0
                };
                cloud.push(cam.position + dir * (hit.t + noise));
            }
        }
    }
    if cloud.is_empty() {
        return Err(Error::EmptyView);
    }
    Ok(cloud)
}

/// Simplified three-finger hand: fingertip probes with a reach limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VirtualHand {
    /// Largest wrist-to-fingertip distance.
    pub reach_radius: f64,
    /// Closing travel of each finger.
    pub finger_travel: f64,
    /// Offset of the second finger's plane origin along the wrist x axis.
    pub knuckle_offset: f64,
    pub tip_radius: f64,
    /// Wrist clearance behind the fingertip plane.
    pub standoff: f64,
}

impl Default for VirtualHand {
    fn default() -> Self {
        VirtualHand {
            reach_radius: 2.5,
            finger_travel: 4.0,
            knuckle_offset: 0.0,
            tip_radius: 0.1,
            standoff: 0.2,
        }
    }
}

impl VirtualHand {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.reach_radius, self.finger_travel, self.tip_radius, self.standoff];
        if positive.iter().any(|v| !(*v > 0.0)) || !self.knuckle_offset.is_finite() {
            return Err(Error::InvalidParameter("hand dimensions must be positive"));
        }
        Ok(())
    }
}

/// Commanded fingertip targets and wrist pose in world units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HandCommand {
    pub thumb: Vec3,
    pub finger1: Vec3,
    pub finger2_uv: [f64; 2],
    /// Yaw, pitch, roll (Z-Y-X).
    pub wrist_euler: [f64; 3],
    pub approach_offset: f64,
}

/// Feasible hand placement with per-finger closing lines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HandPlan {
    pub wrist_position: Vec3,
    pub wrist_rotation: Mat3,
    /// Thumb, first and second finger.
    pub targets: [Vec3; 3],
    pub starts: [Vec3; 3],
    pub directions: [Vec3; 3],
    pub travel: f64,
}

impl HandPlan {
    pub fn approach(&self) -> Vec3 {
        self.wrist_rotation.column(2)
    }
}

/// Finger-2 target in world coordinates.
pub fn finger2_target(cmd: &HandCommand, rotation: &Mat3, knuckle_offset: f64) -> Vec3 {
    let base = (cmd.thumb + cmd.finger1) * 0.5;
    base + rotation.mul_vec(Vec3::new(knuckle_offset + cmd.finger2_uv[0], cmd.finger2_uv[1], 0.0))
}

/// Inverse of [`finger2_target`] for an arbitrary point, given the commanded
/// thumb and first-finger targets.
pub fn finger2_uv_of(point: Vec3, cmd: &HandCommand, rotation: &Mat3, knuckle_offset: f64) -> [f64; 2] {
    let base = (cmd.thumb + cmd.finger1) * 0.5;
    let local = rotation.transpose().mul_vec(point - base);
    [local.x - knuckle_offset, local.y]
}

/// Place the wrist behind the thumb/finger-1 midpoint along its approach
/// axis and aim every finger at `gpis_com`. Each finger starts half its
/// travel outside its target, so a full closure overshoots the target by
/// the same amount.
pub fn solve_hand(cmd: &HandCommand, hand: &VirtualHand, gpis_com: Vec3) -> Result<HandPlan> {
    let [yaw, pitch, roll] = cmd.wrist_euler;
    let rotation = Mat3::from_euler_zyx(yaw, pitch, roll);
    let approach = rotation.column(2);
    let base = (cmd.thumb + cmd.finger1) * 0.5;
    let wrist = base - approach * (hand.standoff + cmd.approach_offset);
    let targets = [cmd.thumb, cmd.finger1, finger2_target(cmd, &rotation, hand.knuckle_offset)];
    for (finger, t) in targets.iter().enumerate() {
        if (*t - wrist).norm() > hand.reach_radius {
            return Err(Error::Infeasible(Infeasibility::Reach { finger }));
        }
    }
    for a in 0..3 {
        for b in a + 1..3 {
            if (targets[a] - targets[b]).norm() < 2.0 * hand.tip_radius {
                return Err(Error::Infeasible(Infeasibility::SelfCollision { a, b }));
            }
        }
    }
    let mut starts = [Vec3::ZERO; 3];
    let mut directions = [Vec3::ZERO; 3];
    for k in 0..3 {
        let outward = (targets[k] - gpis_com).try_normalize().unwrap_or(-approach);
        starts[k] = targets[k] + outward * (0.5 * hand.finger_travel);
        directions[k] = -outward;
    }
    Ok(HandPlan {
        wrist_position: wrist,
        wrist_rotation: rotation,
        targets,
        starts,
        directions,
        travel: hand.finger_travel,
    })
}

/// Tactile sensing noise on reported contacts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensingNoise {
    /// Per-axis position std (m).
    pub sigma_c: f64,
    /// Angular std of the normal (rad).
    pub sigma_n: f64,
}

impl Default for SensingNoise {
    fn default() -> Self {
        SensingNoise {
            sigma_c: 0.01,
            sigma_n: 0.05,
        }
    }
}

impl SensingNoise {
    pub const NONE: SensingNoise = SensingNoise {
        sigma_c: 0.0,
        sigma_n: 0.0,
    };
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensedContact {
    /// Reported position, on the surface.
    pub point: Vec3,
    /// Reported outward unit normal.
    pub normal: Vec3,
    pub true_point: Vec3,
    pub true_normal: Vec3,
}

impl SensedContact {
    /// As a contact for the wrench space (normal pointing into the object).
    pub fn to_contact(&self, mu: f64) -> Result<Contact> {
        Contact::new(self.point, -self.normal, mu)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FingerOutcome {
    /// Where the fingertip ended up.
    pub tip: Vec3,
    pub contact: Option<SensedContact>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContactResult {
    pub fingers: [FingerOutcome; 3],
}

impl ContactResult {
    pub fn all_in_contact(&self) -> bool {
        self.fingers.iter().all(|f| f.contact.is_some())
    }

    pub fn tips(&self) -> [Vec3; 3] {
        self.fingers.map(|f| f.tip)
    }

    /// `1` for contact, `0` for a miss, thumb first.
    pub fn flags(&self) -> String {
        self.fingers
            .iter()
            .map(|f| if f.contact.is_some() { '1' } else { '0' })
            .collect()
    }
}

/// Close each finger along its line until it touches the body. A finger
/// whose start is already inside backs out along the reversed line to the
/// surface. A miss leaves the tip at full travel.
pub fn close_fingers(body: &Body, plan: &HandPlan, noise: &SensingNoise, seed: u64) -> ContactResult {
    let fingers = core::array::from_fn(|k| {
        let start = plan.starts[k];
        let dir = plan.directions[k];
        let hit = if body.contains(start) {
            body.ray_cast(start, -dir, 0.0, f64::INFINITY)
        } else {
            body.ray_cast(start, dir, 0.0, plan.travel)
        };
        match hit {
            None => FingerOutcome {
                tip: start + dir * plan.travel,
                contact: None,
            },
            Some(h) => {
                let mut r = rng::stream(seed, rng::purpose::CONTACT, k as u64);
                let point = if noise.sigma_c > 0.0 {
                    body.closest_point(h.point + gaussian_vec3(&mut r, noise.sigma_c)).0
                } else {
                    h.point
                };
                let normal = perturb_direction(&mut r, h.normal, noise.sigma_n);
                FingerOutcome {
                    tip: point,
                    contact: Some(SensedContact {
                        point,
                        normal,
                        true_point: h.point,
                        true_normal: h.normal,
                    }),
                }
            }
        }
    });
    ContactResult { fingers }
}

/// Outcome of the noise-free stability check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleVerdict {
    pub force_closure: bool,
    pub epsilon: f64,
}

impl OracleVerdict {
    pub const FAILED: OracleVerdict = OracleVerdict {
        force_closure: false,
        epsilon: 0.0,
    };
}

/// Snap `points` to the true surface, use the true centre of mass and
/// friction `mu_true`, and test `epsilon > delta`.
pub fn oracle_grasp_check(
    body: &Body,
    points: &[Vec3],
    mu_true: f64,
    delta: f64,
    cone_edges: usize,
) -> Result<OracleVerdict> {
    if points.is_empty() {
        return Ok(OracleVerdict::FAILED);
    }
    let contacts = points
        .iter()
        .map(|&p| {
            let (q, n) = body.closest_point(p);
            Contact::new(q, -n, mu_true)
        })
        .collect::<Result<Vec<_>>>()?;
    let epsilon = contact_quality(&contacts, body.center_of_mass(), cone_edges)?;
    Ok(OracleVerdict {
        force_closure: epsilon > delta,
        epsilon,
    })
}

/// Re-execute a hand plan without sensing noise and check the result.
pub fn oracle_replay(
    body: &Body,
    plan: &HandPlan,
    mu_true: f64,
    delta: f64,
    cone_edges: usize,
) -> Result<OracleVerdict> {
    let result = close_fingers(body, plan, &SensingNoise::NONE, 0);
    if !result.all_in_contact() {
        return Ok(OracleVerdict::FAILED);
    }
    let points: Vec<Vec3> = result.fingers.iter().filter_map(|f| f.contact.map(|c| c.true_point)).collect();
    oracle_grasp_check(body, &points, mu_true, delta, cone_edges)
}

/// The vision cloud's centroid, used as the first centre-of-mass guess.
pub fn cloud_centroid(cloud: &[Vec3]) -> Result<Vec3> {
    centroid(cloud).ok_or(Error::Empty("point cloud"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_sphere() -> Body {
        builtin_object("sphere").unwrap()
    }

    fn tripod_command() -> HandCommand {
        let at = |deg: f64| {
            let a = deg.to_radians();
            Vec3::new(a.cos(), a.sin(), 0.0)
        };
        // Wrist looking down -z; finger 2 sits at 240 degrees, expressed in
        // the wrist plane relative to the thumb/finger-1 midpoint.
        let mut cmd = HandCommand {
            thumb: at(0.0),
            finger1: at(120.0),
            finger2_uv: [0.0, 0.0],
            wrist_euler: [0.0, core::f64::consts::PI, 0.0],
            approach_offset: 0.0,
        };
        let rot = Mat3::from_euler_zyx(0.0, core::f64::consts::PI, 0.0);
        cmd.finger2_uv = finger2_uv_of(at(240.0), &cmd, &rot, 0.0);
        cmd
    }

    #[test]
    fn sphere_ray_cast_matches_tessellation() {
        let s = unit_sphere();
        let m = Body::Mesh(s.to_mesh());
        let o = Vec3::new(3.0, 0.2, 0.1);
        let a = s.ray_cast(o, -Vec3::X, 0.0, 10.0).unwrap();
        let b = m.ray_cast(o, -Vec3::X, 0.0, 10.0).unwrap();
        assert!((a.point - b.point).norm() < 0.02);
        assert!((a.point.norm() - 1.0).abs() < 1e-12);
        assert!(s.ray_cast(o, Vec3::X, 0.0, 10.0).is_none());
    }

    #[test]
    fn camera_sees_near_hemisphere_only() {
        let s = unit_sphere();
        let cam = CameraSpec {
            position: Vec3::new(4.0, 0.0, 0.0),
            depth_noise_sigma: 0.0,
            ..CameraSpec::default()
        };
        let cloud = render_pointcloud(&s, &cam, 1).unwrap();
        assert!(cloud.len() <= cam.resolution * cam.resolution);
        let view = cam.view_direction();
        for p in &cloud {
            assert!(p.dot(view) < 1e-9);
            assert!((p.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn face_on_cube_depths_are_equal() {
        let cube = Body::Mesh(TriMesh::cuboid(Vec3::new(1.0, 1.0, 1.0)));
        let cam = CameraSpec {
            position: Vec3::new(0.0, 0.0, 5.0),
            up: Vec3::X,
            fov: 0.15,
            depth_noise_sigma: 0.0,
            ..CameraSpec::default()
        };
        let cloud = render_pointcloud(&cube, &cam, 0).unwrap();
        assert_eq!(cloud.len(), cam.resolution * cam.resolution);
        for p in cloud {
            assert!((p.z - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn camera_errors() {
        let s = unit_sphere();
        let inside = CameraSpec {
            position: Vec3::ZERO,
            target: Vec3::X,
            ..CameraSpec::default()
        };
        assert!(render_pointcloud(&s, &inside, 0).is_err());
        let away = CameraSpec {
            position: Vec3::new(4.0, 0.0, 0.0),
            target: Vec3::new(8.0, 0.0, 0.0),
            ..CameraSpec::default()
        };
        assert_eq!(render_pointcloud(&s, &away, 0).unwrap_err(), Error::EmptyView);
    }

    #[test]
    fn tripod_plan_aims_at_centre() {
        let plan = solve_hand(&tripod_command(), &VirtualHand::default(), Vec3::ZERO).unwrap();
        for k in 0..3 {
            let to_center = (-plan.starts[k]).normalize();
            assert!((plan.directions[k] - to_center).norm() < 1e-12);
            assert!((plan.targets[k].norm() - 1.0).abs() < 1e-12);
        }
        let result = close_fingers(&unit_sphere(), &plan, &SensingNoise::NONE, 0);
        assert!(result.all_in_contact());
        for f in result.fingers {
            let c = f.contact.unwrap();
            assert!((c.point.norm() - 1.0).abs() < 1e-6);
            assert!((c.normal - c.point).norm() < 1e-9);
        }
        let v = oracle_replay(&unit_sphere(), &plan, 0.5, 0.01, 8).unwrap();
        assert!(v.force_closure && v.epsilon > 0.01);
    }

    #[test]
    fn infeasible_plans_are_typed() {
        let hand = VirtualHand::default();
        let mut far = tripod_command();
        far.thumb = Vec3::new(10.0 * hand.reach_radius, 0.0, 0.0);
        assert!(matches!(
            solve_hand(&far, &hand, Vec3::ZERO),
            Err(Error::Infeasible(Infeasibility::Reach { .. }))
        ));
        let mut clash = tripod_command();
        clash.finger1 = clash.thumb;
        assert!(matches!(
            solve_hand(&clash, &hand, Vec3::ZERO),
            Err(Error::Infeasible(Infeasibility::SelfCollision { a: 0, b: 1 }))
        ));
    }

    #[test]
    fn missed_finger_travels_fully() {
        let mut body = unit_sphere();
        body.translate(Vec3::new(0.0, 0.0, 50.0));
        let plan = solve_hand(&tripod_command(), &VirtualHand::default(), Vec3::ZERO).unwrap();
        let result = close_fingers(&body, &plan, &SensingNoise::default(), 3);
        assert_eq!(result.flags(), "000");
        for k in 0..3 {
            let want = plan.starts[k] + plan.directions[k] * plan.travel;
            assert!((result.fingers[k].tip - want).norm() < 1e-12);
        }
    }

    #[test]
    fn noisy_contacts_stay_on_surface() {
        let plan = solve_hand(&tripod_command(), &VirtualHand::default(), Vec3::ZERO).unwrap();
        for body in [unit_sphere(), builtin_object("cylinder").unwrap()] {
            let result = close_fingers(&body, &plan, &SensingNoise::default(), 11);
            for f in result.fingers {
                let c = f.contact.expect("contact");
                let (q, _) = body.closest_point(c.point);
                assert!((q - c.point).norm() < 1e-6);
                assert!((c.normal.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn oracle_single_contact_fails() {
        let v = oracle_grasp_check(&unit_sphere(), &[Vec3::X], 0.5, 0.01, 8).unwrap();
        assert_eq!(v, OracleVerdict::FAILED);
    }

    #[test]
    fn builtins_are_closed_and_centred() {
        for name in BUILTIN_OBJECTS {
            let body = builtin_object(name).unwrap();
            if let Body::Mesh(m) = &body {
                let closed = m.clone().into_closed().unwrap();
                assert!(closed.signed_volume() > 0.0, "{name}");
            }
            assert!(body.center_of_mass().norm() < 1e-9, "{name}");
            assert!(body.contains(Vec3::new(0.01, 0.02, 0.03)), "{name}");
        }
        assert!(builtin_object("teapot").is_none());
    }
}
