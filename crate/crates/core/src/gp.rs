//! Exact Gaussian-process regression with a zero prior mean.
//!
//! The training covariance `K + diag(noise)` is kept as a Cholesky factor, so
//! a prediction costs one `O(n)` dot product for the mean and one `O(n^2)`
//! triangular solve for the variance. Appending a point extends the factor by
//! one bordered row, which is algebraically identical to refitting.

use alloc::vec::Vec;


use crate::linalg::Cholesky;
use crate::{Error, Result};

/// Covariance function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelSpec {
    /// `sigma^2 exp(-r^2 / 2 l^2)`.
    SquaredExponential { sigma: f64, length_scale: f64 },
    /// `2 r^3 - 3 R r^2 + R^3`, valid for `r <= R`.
    ThinPlate { max_distance: f64 },
}

/// Relative slack on the thin-plate range check, absorbing round-off on `r`.
const THIN_PLATE_RANGE_SLACK: f64 = 1e-9;

/// Negative variances above this (scaled by the prior variance) are errors.
const NEGATIVE_VARIANCE_TOL: f64 = 1e-12;

impl KernelSpec {
    pub fn squared_exponential(sigma: f64, length_scale: f64) -> Result<Self> {
        if !(sigma > 0.0) || !(length_scale > 0.0) {
            return Err(Error::InvalidParameter("SE kernel needs sigma > 0 and l > 0"));
        }
        Ok(KernelSpec::SquaredExponential {
            sigma,
            length_scale,
        })
    }

    pub fn thin_plate(max_distance: f64) -> Result<Self> {
        if !(max_distance > 0.0) {
            return Err(Error::InvalidParameter("thin-plate kernel needs R > 0"));
        }
        Ok(KernelSpec::ThinPlate { max_distance })
    }

    /// Prior variance `k(x, x)`.
    pub fn diagonal(&self) -> f64 {
        match *self {
            KernelSpec::SquaredExponential { sigma, .. } => sigma * sigma,
            KernelSpec::ThinPlate { max_distance } => max_distance.powi(3),
        }
    }

    /// Covariance as a function of the distance `r`.
    pub fn eval_distance(&self, r: f64) -> Result<f64> {
        match *self {
            KernelSpec::SquaredExponential {
                sigma,
                length_scale,
            } => Ok(sigma * sigma * (-(r * r) / (2.0 * length_scale * length_scale)).exp()),
            KernelSpec::ThinPlate { max_distance: big_r } => {
                if r > big_r * (1.0 + THIN_PLATE_RANGE_SLACK) {
                    return Err(Error::ThinPlateOutOfRange { r, max: big_r });
                }
                let r = r.min(big_r);
                Ok(2.0 * r * r * r - 3.0 * big_r * r * r + big_r * big_r * big_r)
            }
        }
    }

    /// Covariance between two points of equal dimension.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        self.eval_distance(squared_distance(x, y).sqrt())
    }
}

fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Predictive distribution at a single point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction {
    pub mean: f64,
    pub variance: f64,
}

impl Prediction {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// A fitted GP. Immutable once built; `append` returns a new model.
#[derive(Clone, Debug)]
pub struct GpModel {
    kernel: KernelSpec,
    dim: usize,
    inputs: Vec<f64>,
    targets: Vec<f64>,
    noise: Vec<f64>,
    factor: Cholesky,
    /// `(K + diag(noise))^{-1} Y`.
    weights: Vec<f64>,
}

impl GpModel {
    /// A model with no data; predictions return the prior.
    pub fn empty(kernel: KernelSpec, dim: usize) -> Self {
        GpModel {
            kernel,
            dim,
            inputs: Vec::new(),
            targets: Vec::new(),
            noise: Vec::new(),
            factor: Cholesky::empty(),
            weights: Vec::new(),
        }
    }

    /// Fit on `inputs[i] -> targets[i]` with per-observation noise variances.
    pub fn fit<P: AsRef<[f64]>>(
        inputs: &[P],
        targets: &[f64],
        noise: &[f64],
        kernel: KernelSpec,
    ) -> Result<Self> {
        let first = inputs.first().ok_or(Error::Empty("GP training set"))?;
        let mut model = GpModel::empty(kernel, first.as_ref().len());
        model.extend(inputs, targets, noise)?;
        Ok(model)
    }

    /// A copy of this model conditioned on one more observation.
    pub fn append(&self, x: &[f64], y: f64, noise: f64) -> Result<Self> {
        let mut next = self.clone();
        next.extend(&[x], &[y], &[noise])?;
        Ok(next)
    }

    /// Condition in place on further observations.
    pub fn extend<P: AsRef<[f64]>>(
        &mut self,
        inputs: &[P],
        targets: &[f64],
        noise: &[f64],
    ) -> Result<()> {
        if inputs.len() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                found: targets.len(),
            });
        }
        if inputs.len() != noise.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                found: noise.len(),
            });
        }
        if inputs.is_empty() {
            return Ok(());
        }
        let mut next = self.clone();
        next.extend_unchecked(inputs, targets, noise)?;
        *self = next;
        Ok(())
    }

    fn extend_unchecked<P: AsRef<[f64]>>(
        &mut self,
        inputs: &[P],
        targets: &[f64],
        noise: &[f64],
    ) -> Result<()> {
        let mut cross = Vec::with_capacity(self.len() + inputs.len());
        for ((x, &y), &nv) in inputs.iter().zip(targets).zip(noise) {
            let x = x.as_ref();
            self.check_dim(x)?;
            if !(nv >= 0.0) || !y.is_finite() || x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("GP observation"));
            }
            cross.clear();
            for i in 0..self.len() {
                cross.push(self.kernel.eval_distance(squared_distance(self.input(i), x).sqrt())?);
            }
            let diag = self.kernel.diagonal() + nv;
            self.factor
                .append(&cross, diag)
                .map_err(|e| Error::IndistinguishableInputs { index: e.0 })?;
            self.inputs.extend_from_slice(x);
            self.targets.push(y);
            self.noise.push(nv);
        }
        self.weights = self.factor.solve(&self.targets);
        Ok(())
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn noise(&self) -> &[f64] {
        &self.noise
    }

    fn cross_covariance(&self, x: &[f64]) -> Result<Vec<f64>> {
        (0..self.len())
            .map(|i| self.kernel.eval_distance(squared_distance(self.input(i), x).sqrt()))
            .collect()
    }

    /// Predictive mean only; `O(n)`.
    pub fn predict_mean(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let mut mean = 0.0;
        for i in 0..self.len() {
            let k = self.kernel.eval_distance(squared_distance(self.input(i), x).sqrt())?;
            mean += k * self.weights[i];
        }
        Ok(mean)
    }

    /// Predictive mean and variance.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        self.check_dim(x)?;
        let prior = self.kernel.diagonal();
        if self.is_empty() {
            return Ok(Prediction {
                mean: 0.0,
                variance: prior,
            });
        }
        let k_star = self.cross_covariance(x)?;
        let mean = k_star.iter().zip(&self.weights).map(|(k, w)| k * w).sum();
        let v = self.factor.solve_lower(&k_star);
        let variance = prior - v.iter().map(|a| a * a).sum::<f64>();
        Ok(Prediction {
            mean,
            variance: clamp_variance(variance, prior)?,
        })
    }
}

fn clamp_variance(variance: f64, prior: f64) -> Result<f64> {
    if variance >= 0.0 {
        Ok(variance)
    } else if -variance <= NEGATIVE_VARIANCE_TOL * prior.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::NegativeVariance(variance))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_closed_forms() {
        let se = KernelSpec::squared_exponential(0.001, 1.0).unwrap();
        assert!((se.eval(&[0.3, 0.1], &[0.3, 0.1]).unwrap() - 1e-6).abs() < 1e-18);
        let tp = KernelSpec::thin_plate(1.0).unwrap();
        assert_eq!(tp.eval(&[0.0], &[1.0]).unwrap(), 0.0);
        // 2(1/8) - 3(1/4) + 1
        assert!((tp.eval(&[0.0], &[0.5]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn kernel_errors() {
        let tp = KernelSpec::thin_plate(1.0).unwrap();
        assert!(matches!(
            tp.eval(&[0.0], &[1.5]),
            Err(Error::ThinPlateOutOfRange { .. })
        ));
        assert!(matches!(
            tp.eval(&[0.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(KernelSpec::squared_exponential(0.0, 1.0).is_err());
        assert!(KernelSpec::thin_plate(-1.0).is_err());
    }

    #[test]
    fn single_point_interpolates() {
        let se = KernelSpec::squared_exponential(1.0, 1.0).unwrap();
        let gp = GpModel::fit(&[[0.0]], &[2.0], &[1e-12], se).unwrap();
        let p = gp.predict(&[0.0]).unwrap();
        assert!((p.mean - 2.0).abs() < 1e-6);
        assert!(p.variance < 1e-6);
    }

    #[test]
    fn two_point_hand_oracle() {
        // Inverse of [[a, b], [b, a]] is [[a, -b], [-b, a]] / (a^2 - b^2).
        let se = KernelSpec::squared_exponential(1.0, 1.0).unwrap();
        let noise = 0.1;
        let gp = GpModel::fit(&[[0.0], [1.0]], &[1.0, -1.0], &[noise, noise], se).unwrap();
        let a = 1.0 + noise;
        let b = (-0.5f64).exp();
        let det = a * a - b * b;
        let x = 0.25f64;
        let k0 = (-x * x / 2.0).exp();
        let k1 = (-(1.0 - x) * (1.0 - x) / 2.0).exp();
        let w0 = (a * 1.0 - b * -1.0) / det;
        let w1 = (-b * 1.0 + a * -1.0) / det;
        let mean = k0 * w0 + k1 * w1;
        let quad = (k0 * (a * k0 - b * k1) + k1 * (-b * k0 + a * k1)) / det;
        let p = gp.predict(&[x]).unwrap();
        assert!((p.mean - mean).abs() < 1e-8);
        assert!((p.variance - (1.0 - quad)).abs() < 1e-8);
    }

    #[test]
    fn duplicate_without_noise_fails() {
        let se = KernelSpec::squared_exponential(1.0, 1.0).unwrap();
        let err = GpModel::fit(&[[0.5], [0.5]], &[1.0, 1.0], &[0.0, 0.0], se).unwrap_err();
        assert_eq!(err, Error::IndistinguishableInputs { index: 1 });
        let gp = GpModel::fit(&[[0.5]], &[1.0], &[0.0], se).unwrap();
        assert!(gp.append(&[0.5], 1.0, 0.0).is_err());
    }

    #[test]
    fn far_query_recovers_prior() {
        let se = KernelSpec::squared_exponential(0.001, 1.0).unwrap();
        let gp = GpModel::fit(&[[0.0, 0.0]], &[5.0], &[1e-8], se).unwrap();
        let p = gp.predict(&[100.0, 100.0]).unwrap();
        assert!(p.mean.abs() < 1e-12);
        assert!((p.variance - 1e-6).abs() < 1e-15);
    }

    #[test]
    fn append_to_empty_matches_fit() {
        let tp = KernelSpec::thin_plate(4.0).unwrap();
        let a = GpModel::empty(tp, 3).append(&[0.1, 0.2, 0.3], 0.7, 1e-4).unwrap();
        let b = GpModel::fit(&[[0.1, 0.2, 0.3]], &[0.7], &[1e-4], tp).unwrap();
        let q = [0.5, -0.2, 0.1];
        assert_eq!(a.predict(&q).unwrap(), b.predict(&q).unwrap());
    }

    #[test]
    fn empty_model_and_empty_fit() {
        let se = KernelSpec::squared_exponential(2.0, 1.0).unwrap();
        let gp = GpModel::empty(se, 2);
        assert_eq!(
            gp.predict(&[0.0, 0.0]).unwrap(),
            Prediction {
                mean: 0.0,
                variance: 4.0
            }
        );
        let none: [[f64; 2]; 0] = [];
        assert_eq!(
            GpModel::fit(&none, &[], &[], se).unwrap_err(),
            Error::Empty("GP training set")
        );
        assert!(gp.predict(&[0.0]).is_err());
    }
}
