//! Run configuration: sectioned `key = value` text (TOML subset).
//!
//! Every field has a default, so an empty file is a valid config. Unknown
//! keys are rejected so typos do not silently fall back to defaults.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use gpisgrasp_core::explorer::{
    AcquisitionConfig, ExplorationConfig, Incumbent, StopRule, SurrogateConfig, SurrogateInput,
};
use gpisgrasp_core::gpis::{GpisNoise, BOUNDARY_GRID, DEPTH_EXTENSION};
use gpisgrasp_core::grasp::UncertaintyModel;
use gpisgrasp_core::world::{CameraSpec, SensingNoise, VirtualHand};
use gpisgrasp_core::Vec3;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: line {line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub camera: CameraSection,
    pub hand: HandSection,
    pub sensing: SensingSection,
    pub uncertainty: UncertaintySection,
    pub gpis: GpisSection,
    pub exploration: ExplorationSection,
    pub surrogate: SurrogateSection,
    pub acquisition: AcquisitionSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Builtin object name or path to an OBJ mesh.
    pub object: String,
    /// Any integer in `0..=i64::MAX`; TOML has no wider integers.
    pub seed: u64,
    pub out: String,
    /// Record real per-iteration wall time. Off by default so logs are
    /// byte-identical across re-runs.
    pub wall_clock: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraSection {
    pub position: [f64; 3],
    pub target: [f64; 3],
    pub up: [f64; 3],
    pub fov: f64,
    pub resolution: usize,
    pub depth_noise_sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HandSection {
    pub reach_radius: f64,
    pub finger_travel: f64,
    pub knuckle_offset: f64,
    pub tip_radius: f64,
    pub standoff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensingSection {
    pub sigma_c: f64,
    pub sigma_n: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UncertaintySection {
    pub sigma_n2: f64,
    pub sigma_c2: f64,
    pub sigma_mu2: f64,
    pub mu_hat: f64,
    pub samples: usize,
    pub delta: f64,
    pub cone_edges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GpisSection {
    pub vision_noise: f64,
    pub tactile_noise: f64,
    pub anchor_noise: f64,
    /// The vision cloud is voxel-downsampled to at most this many points.
    pub max_cloud_points: usize,
    /// How far the domain reaches behind the visible surface, as a
    /// fraction of the cloud's largest extent.
    pub depth_extension: f64,
    /// Segments per domain edge of the outside-anchor lattice; 1 means
    /// corners and face centres only.
    pub boundary_grid: usize,
    /// Distance of the free-space points in front of the cloud, as a
    /// fraction of its largest extent; 0 disables them.
    pub free_space_offset: f64,
    /// One free-space point per this many cloud points.
    pub free_space_stride: usize,
    pub com_resolution: usize,
    pub surface_resolution: usize,
    pub variance_resolution: usize,
    /// Ground-truth and estimate surface samples for the Hausdorff metric.
    pub hausdorff_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplorationSection {
    pub lambda: f64,
    pub n_stop: usize,
    pub prior_min_grasps: usize,
    pub prior_pfc_min: f64,
    pub prior_cap: usize,
    pub stable_pfc_min: f64,
    pub sigma_th: f64,
    pub approach_offset_max: f64,
    pub metrics_every: usize,
    /// Stop early after this many grasps above `stop_pfc_min`; 0 never stops.
    pub stop_count: usize,
    pub stop_pfc_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurrogateSection {
    pub sigma: f64,
    pub length_scale: f64,
    pub noise_ratio: f64,
    /// `achieved_tips` or `commanded`.
    pub input: String,
    /// `best_observed` or `best_posterior_mean`.
    pub incumbent: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcquisitionSection {
    pub candidates: usize,
    pub refine_top: usize,
    pub refine_samples: usize,
    pub refine_sigma: f64,
}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            object: "sphere".into(),
            seed: 0,
            out: "run".into(),
            wall_clock: false,
        }
    }
}

impl Default for CameraSection {
    fn default() -> Self {
        let c = CameraSpec::default();
        CameraSection {
            position: c.position.to_array(),
            target: c.target.to_array(),
            up: c.up.to_array(),
            fov: c.fov,
            resolution: c.resolution,
            depth_noise_sigma: c.depth_noise_sigma,
        }
    }
}

impl Default for HandSection {
    fn default() -> Self {
        let h = VirtualHand::default();
        HandSection {
            reach_radius: h.reach_radius,
            finger_travel: h.finger_travel,
            knuckle_offset: h.knuckle_offset,
            tip_radius: h.tip_radius,
            standoff: h.standoff,
        }
    }
}

impl Default for SensingSection {
    fn default() -> Self {
        let s = SensingNoise::default();
        SensingSection {
            sigma_c: s.sigma_c,
            sigma_n: s.sigma_n,
        }
    }
}

impl Default for UncertaintySection {
    fn default() -> Self {
        let u = UncertaintyModel::default();
        UncertaintySection {
            sigma_n2: u.sigma_n2,
            sigma_c2: u.sigma_c2,
            sigma_mu2: u.sigma_mu2,
            mu_hat: u.mu_hat,
            samples: u.samples,
            delta: u.delta,
            cone_edges: u.cone_edges,
        }
    }
}

impl Default for GpisSection {
    fn default() -> Self {
        let n = GpisNoise::default();
        GpisSection {
            vision_noise: n.vision,
            tactile_noise: n.tactile,
            anchor_noise: n.anchor,
            max_cloud_points: 800,
            depth_extension: DEPTH_EXTENSION,
            boundary_grid: BOUNDARY_GRID,
            free_space_offset: 0.1,
            free_space_stride: 8,
            com_resolution: ExplorationConfig::default().com_resolution,
            surface_resolution: 32,
            variance_resolution: 16,
            hausdorff_samples: 1500,
        }
    }
}

impl Default for ExplorationSection {
    fn default() -> Self {
        let e = ExplorationConfig::default();
        let stop = e.stop.unwrap_or(StopRule { count: 0, pfc_min: 0.8 });
        ExplorationSection {
            lambda: e.lambda,
            n_stop: e.n_stop,
            prior_min_grasps: e.prior_min_grasps,
            prior_pfc_min: e.prior_pfc_min,
            prior_cap: e.prior_cap,
            stable_pfc_min: e.stable_pfc_min,
            sigma_th: e.sigma_th,
            approach_offset_max: e.approach_offset_max,
            metrics_every: e.metrics_every,
            stop_count: stop.count,
            stop_pfc_min: stop.pfc_min,
        }
    }
}

impl Default for SurrogateSection {
    fn default() -> Self {
        let s = SurrogateConfig::default();
        SurrogateSection {
            sigma: s.sigma,
            length_scale: s.length_scale,
            noise_ratio: s.noise_ratio,
            input: input_name(s.input).into(),
            incumbent: incumbent_name(s.incumbent).into(),
        }
    }
}

impl Default for AcquisitionSection {
    fn default() -> Self {
        let a = AcquisitionConfig::default();
        AcquisitionSection {
            candidates: a.candidates,
            refine_top: a.refine_top,
            refine_samples: a.refine_samples,
            refine_sigma: a.refine_sigma,
        }
    }
}

fn input_name(i: SurrogateInput) -> &'static str {
    match i {
        SurrogateInput::AchievedTips => "achieved_tips",
        SurrogateInput::Commanded => "commanded",
    }
}

fn incumbent_name(i: Incumbent) -> &'static str {
    match i {
        Incumbent::BestObserved => "best_observed",
        Incumbent::BestPosteriorMean => "best_posterior_mean",
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

impl RunConfig {
    /// Parse config text; `origin` names the source in error messages.
    pub fn parse(text: &str, origin: &str) -> Result<RunConfig, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.into(),
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(1),
            message: e.message().trim().to_string(),
        })?;
        cfg.validate().map_err(|message| ConfigError::Invalid {
            path: origin.into(),
            message,
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        RunConfig::parse(&text, &path.display().to_string())
    }

    /// Canonical text form; `parse(emit(c)) == c`. Panics on a seed above
    /// `i64::MAX`, which `validate` rejects.
    pub fn emit(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    /// Semantic checks beyond the type-level parse.
    pub fn validate(&self) -> Result<(), String> {
        let err = |e: gpisgrasp_core::Error| e.to_string();
        self.camera().validate().map_err(err)?;
        self.hand().validate().map_err(err)?;
        self.exploration().validate().map_err(err)?;
        if self.run.seed > i64::MAX as u64 {
            return Err(format!("run.seed must be <= {}", i64::MAX));
        }
        if self.run.object.trim().is_empty() {
            return Err("run.object must name a builtin object or an OBJ file".into());
        }
        if self.gpis.max_cloud_points < 10 {
            return Err("gpis.max_cloud_points must be >= 10".into());
        }
        if self.gpis.boundary_grid == 0 || self.gpis.boundary_grid > 64 {
            return Err("gpis.boundary_grid must be in 1..=64".into());
        }
        if !(self.gpis.free_space_offset >= 0.0) || self.gpis.free_space_stride == 0 {
            return Err("gpis.free_space_offset must be >= 0 and gpis.free_space_stride >= 1".into());
        }
        if !(self.gpis.depth_extension >= 0.0) {
            return Err("gpis.depth_extension must be >= 0".into());
        }
        if self.gpis.surface_resolution < 16 || self.gpis.variance_resolution < 16 {
            return Err("gpis surface and variance resolutions must be >= 16".into());
        }
        if self.gpis.com_resolution < 8 {
            return Err("gpis.com_resolution must be >= 8".into());
        }
        if self.gpis.hausdorff_samples == 0 {
            return Err("gpis.hausdorff_samples must be >= 1".into());
        }
        let noise = [self.gpis.vision_noise, self.gpis.tactile_noise, self.gpis.anchor_noise];
        if noise.iter().any(|v| !(*v > 0.0)) {
            return Err("gpis noise variances must be > 0".into());
        }
        if !(self.sensing.sigma_c >= 0.0 && self.sensing.sigma_n >= 0.0) {
            return Err("sensing noise must be >= 0".into());
        }
        self.surrogate_input()?;
        self.incumbent()?;
        Ok(())
    }

    fn surrogate_input(&self) -> Result<SurrogateInput, String> {
        match self.surrogate.input.as_str() {
            "achieved_tips" => Ok(SurrogateInput::AchievedTips),
            "commanded" => Ok(SurrogateInput::Commanded),
            other => Err(format!("surrogate.input must be achieved_tips or commanded, got {other:?}")),
        }
    }

    fn incumbent(&self) -> Result<Incumbent, String> {
        match self.surrogate.incumbent.as_str() {
            "best_observed" => Ok(Incumbent::BestObserved),
            "best_posterior_mean" => Ok(Incumbent::BestPosteriorMean),
            other => Err(format!(
                "surrogate.incumbent must be best_observed or best_posterior_mean, got {other:?}"
            )),
        }
    }

    pub fn camera(&self) -> CameraSpec {
        let c = &self.camera;
        CameraSpec {
            position: vec3(c.position),
            target: vec3(c.target),
            up: vec3(c.up),
            fov: c.fov,
            resolution: c.resolution,
            depth_noise_sigma: c.depth_noise_sigma,
        }
    }

    pub fn hand(&self) -> VirtualHand {
        let h = &self.hand;
        VirtualHand {
            reach_radius: h.reach_radius,
            finger_travel: h.finger_travel,
            knuckle_offset: h.knuckle_offset,
            tip_radius: h.tip_radius,
            standoff: h.standoff,
        }
    }

    pub fn sensing(&self) -> SensingNoise {
        SensingNoise {
            sigma_c: self.sensing.sigma_c,
            sigma_n: self.sensing.sigma_n,
        }
    }

    pub fn uncertainty(&self) -> UncertaintyModel {
        let u = &self.uncertainty;
        UncertaintyModel {
            sigma_n2: u.sigma_n2,
            sigma_c2: u.sigma_c2,
            sigma_mu2: u.sigma_mu2,
            mu_hat: u.mu_hat,
            samples: u.samples,
            delta: u.delta,
            cone_edges: u.cone_edges,
        }
    }

    pub fn gpis_noise(&self) -> GpisNoise {
        GpisNoise {
            vision: self.gpis.vision_noise,
            tactile: self.gpis.tactile_noise,
            anchor: self.gpis.anchor_noise,
        }
    }

    pub fn exploration(&self) -> ExplorationConfig {
        let e = &self.exploration;
        let s = &self.surrogate;
        let a = &self.acquisition;
        ExplorationConfig {
            lambda: e.lambda,
            n_stop: e.n_stop,
            unc: self.uncertainty(),
            prior_min_grasps: e.prior_min_grasps,
            prior_pfc_min: e.prior_pfc_min,
            prior_cap: e.prior_cap,
            stable_pfc_min: e.stable_pfc_min,
            sigma_th: e.sigma_th,
            approach_offset_max: e.approach_offset_max,
            com_resolution: self.gpis.com_resolution,
            gpis_noise: self.gpis_noise(),
            acquisition: AcquisitionConfig {
                candidates: a.candidates,
                refine_top: a.refine_top,
                refine_samples: a.refine_samples,
                refine_sigma: a.refine_sigma,
            },
            surrogate: SurrogateConfig {
                sigma: s.sigma,
                length_scale: s.length_scale,
                noise_ratio: s.noise_ratio,
                input: self.surrogate_input().unwrap_or(SurrogateInput::AchievedTips),
                incumbent: self.incumbent().unwrap_or(Incumbent::BestObserved),
            },
            stop: (e.stop_count > 0).then_some(StopRule {
                count: e.stop_count,
                pfc_min: e.stop_pfc_min,
            }),
            metrics_every: e.metrics_every,
            seed: self.run.seed,
        }
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.emit())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_is_default() {
        assert_eq!(RunConfig::parse("", "t").unwrap(), RunConfig::default());
    }

    #[test]
    fn defaults_carry_reference_variances() {
        let u = RunConfig::default().uncertainty();
        assert_eq!(u.sigma_n2, std::f64::consts::PI / 8.0);
        assert_eq!(u.sigma_c2, 0.0025);
        assert_eq!(u.sigma_mu2, 0.125);
        assert_eq!(u.samples, 10);
        assert_eq!(RunConfig::default().exploration.n_stop, 60);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "[run]\nseed = 3\n\n[hand]\nreach_radius = \"far\"\n";
        match RunConfig::parse(text, "cfg.toml") {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
        match RunConfig::parse("[run]\nsed = 3\n", "cfg.toml") {
            Err(ConfigError::Parse { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("sed"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn semantic_errors_are_rejected() {
        assert!(matches!(
            RunConfig::parse("[exploration]\nn_stop = 0\n", "c"),
            Err(ConfigError::Invalid { .. })
        ));
        assert!(matches!(
            RunConfig::parse("[surrogate]\ninput = \"both\"\n", "c"),
            Err(ConfigError::Invalid { .. })
        ));
        let mut c = RunConfig::default();
        c.run.seed = u64::MAX;
        assert!(c.validate().unwrap_err().contains("run.seed"));
    }
}
