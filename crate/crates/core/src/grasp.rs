//! Grasp wrench space, Ferrari-Canny quality and probabilistic force closure.

use alloc::vec::Vec;

use crate::gpis::MassEstimate;
use crate::hull::{convex_hull, HullError};
use crate::math::Vec3;
use crate::rng::{self, gaussian, gaussian_vec3, perturb_direction};
use crate::{Error, Result};

/// Wrench-space dimension.
pub const WRENCH_DIM: usize = 6;

/// A frictional point contact. `normal` points into the object.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contact {
    pub position: Vec3,
    pub normal: Vec3,
    pub mu: f64,
}

impl Contact {
    /// Normalizes `normal`; fails if it has no direction or `mu` is negative.
    pub fn new(position: Vec3, normal: Vec3, mu: f64) -> Result<Self> {
        let normal = normal.try_normalize().ok_or(Error::ZeroNormal)?;
        if !(mu >= 0.0) {
            return Err(Error::InvalidParameter("friction coefficient must be >= 0"));
        }
        if !position.is_finite() {
            return Err(Error::NonFinite("contact position"));
        }
        Ok(Contact {
            position,
            normal,
            mu,
        })
    }
}

/// Noise model for the Monte-Carlo force-closure estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UncertaintyModel {
    /// Angular variance of contact normals (rad^2).
    pub sigma_n2: f64,
    /// Isotropic variance of contact positions (m^2).
    pub sigma_c2: f64,
    /// Variance of the friction coefficient.
    pub sigma_mu2: f64,
    /// Mean friction coefficient.
    pub mu_hat: f64,
    /// Monte-Carlo samples per evaluation.
    pub samples: usize,
    /// Force-closure threshold on the quality.
    pub delta: f64,
    /// Friction-cone edges per contact.
    pub cone_edges: usize,
}

impl Default for UncertaintyModel {
    fn default() -> Self {
        UncertaintyModel {
            sigma_n2: core::f64::consts::PI / 8.0,
            sigma_c2: 0.0025,
            sigma_mu2: 0.1250,
            mu_hat: 1.0,
            samples: 10,
            delta: 0.01,
            cone_edges: 8,
        }
    }
}

impl UncertaintyModel {
    /// Zero-variance model with the same friction, threshold and cone size.
    pub fn deterministic(&self) -> Self {
        UncertaintyModel {
            sigma_n2: 0.0,
            sigma_c2: 0.0,
            sigma_mu2: 0.0,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let variances = [self.sigma_n2, self.sigma_c2, self.sigma_mu2];
        if variances.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidParameter("variances must be >= 0"));
        }
        if self.samples == 0 {
            return Err(Error::InvalidParameter("need at least one Monte-Carlo sample"));
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidParameter("force-closure threshold must be > 0"));
        }
        if self.cone_edges < 3 {
            return Err(Error::InvalidParameter("friction cone needs at least 3 edges"));
        }
        if !(self.mu_hat >= 0.0) {
            return Err(Error::InvalidParameter("mean friction must be >= 0"));
        }
        Ok(())
    }
}

/// `m` unit force directions on the boundary of the contact's friction cone.
pub fn cone_edges(contact: &Contact, m: usize) -> Result<Vec<Vec3>> {
    if m < 3 {
        return Err(Error::InvalidParameter("friction cone needs at least 3 edges"));
    }
    let n = contact.normal.try_normalize().ok_or(Error::ZeroNormal)?;
    let t1 = n.any_orthogonal();
    let t2 = n.cross(t1);
    let half_angle = contact.mu.atan();
    let (s, c) = (half_angle.sin(), half_angle.cos());
    Ok((0..m)
        .map(|k| {
            let phi = core::f64::consts::TAU * k as f64 / m as f64;
            (n * c + (t1 * phi.cos() + t2 * phi.sin()) * s).normalize()
        })
        .collect())
}

/// Discretized grasp wrench space.
#[derive(Clone, Debug, PartialEq)]
pub struct WrenchSet {
    /// Each wrench is `[force; torque_scale * (c - p_com) x force]`.
    pub wrenches: Vec<[f64; WRENCH_DIM]>,
    pub torque_scale: f64,
}

pub fn grasp_wrenches(contacts: &[Contact], p_com: Vec3, m: usize) -> Result<WrenchSet> {
    if contacts.is_empty() {
        return Err(Error::Empty("contact set"));
    }
    let max_arm = contacts
        .iter()
        .map(|c| (c.position - p_com).norm())
        .fold(0.0f64, f64::max);
    let torque_scale = if max_arm > 0.0 { 1.0 / max_arm } else { 1.0 };
    let mut wrenches = Vec::with_capacity(contacts.len() * m);
    for contact in contacts {
        let arm = (contact.position - p_com) * torque_scale;
        for f in cone_edges(contact, m)? {
            let t = arm.cross(f);
            wrenches.push([f.x, f.y, f.z, t.x, t.y, t.z]);
        }
    }
    Ok(WrenchSet {
        wrenches,
        torque_scale,
    })
}

/// Ferrari-Canny quality: radius of the largest origin-centred ball inside the
/// hull of the wrench set, or 0 if the origin is not strictly interior.
pub fn epsilon_quality(ws: &WrenchSet) -> Result<f64> {
    if ws.wrenches.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("wrench set"));
    }
    if ws.wrenches.len() <= WRENCH_DIM {
        return Ok(0.0);
    }
    let flat: Vec<f64> = ws.wrenches.iter().flatten().copied().collect();
    match convex_hull(&flat, WRENCH_DIM) {
        Ok(hull) => Ok(hull.interior_depth(&[0.0; WRENCH_DIM]).unwrap_or(0.0)),
        Err(HullError::NotFullDimensional) => Ok(0.0),
        // Joggling up to 1e-7 failed; such a set is degenerate at any useful precision.
        Err(HullError::Numerical) => Ok(0.0),
    }
}

/// Quality of a fixed contact set about a fixed centre of mass.
pub fn contact_quality(contacts: &[Contact], p_com: Vec3, m: usize) -> Result<f64> {
    epsilon_quality(&grasp_wrenches(contacts, p_com, m)?)
}

/// Monte-Carlo probability that the quality exceeds `unc.delta` when normals,
/// positions, friction and centre of mass are perturbed. Sample `s` draws from
/// its own stream keyed by `(seed, s)`.
pub fn pfc(contacts_hat: &[Contact], unc: &UncertaintyModel, com: &MassEstimate, seed: u64) -> Result<f64> {
    unc.validate()?;
    if contacts_hat.is_empty() {
        return Ok(0.0);
    }
    let sigma_n = unc.sigma_n2.sqrt();
    let sigma_c = unc.sigma_c2.sqrt();
    let sigma_mu = unc.sigma_mu2.sqrt();
    let mut hits = 0usize;
    let mut sampled = Vec::with_capacity(contacts_hat.len());
    for s in 0..unc.samples {
        let mut r = rng::stream(seed, rng::purpose::PFC_SAMPLE, s as u64);
        let mu = (unc.mu_hat + sigma_mu * gaussian(&mut r)).max(0.0);
        let p_com = com.p_com + gaussian_vec3(&mut r, com.sigma_com);
        sampled.clear();
        for c in contacts_hat {
            sampled.push(Contact {
                position: c.position + gaussian_vec3(&mut r, sigma_c),
                normal: perturb_direction(&mut r, c.normal, sigma_n),
                mu,
            });
        }
        if contact_quality(&sampled, p_com, unc.cone_edges)? > unc.delta {
            hits += 1;
        }
    }
    Ok(hits as f64 / unc.samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equatorial_tripod(mu: f64) -> Vec<Contact> {
        (0..3)
            .map(|k| {
                let a = core::f64::consts::TAU * k as f64 / 3.0;
                let p = Vec3::new(a.cos(), a.sin(), 0.0);
                Contact::new(p, -p, mu).unwrap()
            })
            .collect()
    }

    #[test]
    fn frictionless_cone_collapses() {
        let c = Contact::new(Vec3::ZERO, Vec3::Z, 0.0).unwrap();
        for e in cone_edges(&c, 5).unwrap() {
            assert!((e - Vec3::Z).norm() < 1e-12);
        }
    }

    #[test]
    fn unit_friction_cone_is_45_degrees() {
        let c = Contact::new(Vec3::ZERO, Vec3::Z, 1.0).unwrap();
        let edges = cone_edges(&c, 8).unwrap();
        let t1 = Vec3::Z.any_orthogonal();
        for (k, e) in edges.iter().enumerate() {
            assert!((e.norm() - 1.0).abs() < 1e-12);
            assert!((e.z - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
            let phi = core::f64::consts::TAU * k as f64 / 8.0;
            let planar = Vec3::new(e.x, e.y, 0.0).normalize();
            let t2 = Vec3::Z.cross(t1);
            let want = t1 * phi.cos() + t2 * phi.sin();
            assert!((planar - want).norm() < 1e-12);
        }
    }

    #[test]
    fn cone_errors() {
        assert_eq!(Contact::new(Vec3::ZERO, Vec3::ZERO, 0.5).unwrap_err(), Error::ZeroNormal);
        let c = Contact::new(Vec3::ZERO, Vec3::Z, 0.5).unwrap();
        assert!(cone_edges(&c, 2).is_err());
    }

    #[test]
    fn zero_lever_arm_has_no_torque() {
        let c = Contact::new(Vec3::new(0.1, 0.2, 0.3), Vec3::X, 0.7).unwrap();
        let ws = grasp_wrenches(&[c], c.position, 8).unwrap();
        assert_eq!(ws.wrenches.len(), 8);
        assert_eq!(ws.torque_scale, 1.0);
        for w in &ws.wrenches {
            assert_eq!(&w[3..], &[0.0, 0.0, 0.0]);
        }
        assert_eq!(epsilon_quality(&ws).unwrap(), 0.0);
    }

    #[test]
    fn antipodal_pair_has_zero_quality() {
        let a = Contact::new(Vec3::X, -Vec3::X, 0.5).unwrap();
        let b = Contact::new(-Vec3::X, Vec3::X, 0.5).unwrap();
        let ws = grasp_wrenches(&[a, b], Vec3::ZERO, 8).unwrap();
        assert_eq!(ws.wrenches.len(), 16);
        assert_eq!(epsilon_quality(&ws).unwrap(), 0.0);
    }

    #[test]
    fn tripod_is_force_closure() {
        let e = contact_quality(&equatorial_tripod(0.5), Vec3::ZERO, 8).unwrap();
        assert!(e > 0.01, "tripod quality {e}");
    }

    #[test]
    fn non_finite_wrench_is_an_error() {
        let mut ws = grasp_wrenches(&equatorial_tripod(0.5), Vec3::ZERO, 8).unwrap();
        ws.wrenches[3][4] = f64::NAN;
        assert!(epsilon_quality(&ws).is_err());
    }

    #[test]
    fn deterministic_pfc_limits() {
        let unc = UncertaintyModel {
            mu_hat: 0.5,
            ..UncertaintyModel::default()
        }
        .deterministic();
        let com = MassEstimate {
            p_com: Vec3::ZERO,
            sigma_com: 0.0,
        };
        assert_eq!(pfc(&equatorial_tripod(0.5), &unc, &com, 3).unwrap(), 1.0);
        assert_eq!(pfc(&equatorial_tripod(0.5)[..1], &unc, &com, 3).unwrap(), 0.0);
        assert_eq!(pfc(&[], &unc, &com, 3).unwrap(), 0.0);
    }

    #[test]
    fn pfc_is_seed_deterministic() {
        let unc = UncertaintyModel {
            samples: 50,
            ..UncertaintyModel::default()
        };
        let com = MassEstimate {
            p_com: Vec3::ZERO,
            sigma_com: 0.05,
        };
        let t = equatorial_tripod(0.8);
        let a = pfc(&t, &unc, &com, 11).unwrap();
        let b = pfc(&t, &unc, &com, 11).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
