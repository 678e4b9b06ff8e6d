//! Run orchestration: scene setup, exploration or baseline, artifacts.

use std::path::{Path, PathBuf};
use std::time::Instant;

use gpisgrasp_core::explorer::{
    baseline_explore, build_prior, explore, ExplorationResult, GroundTruthMonitor, ShapeMetrics, ShapeMonitor,
};
use gpisgrasp_core::gpis::{domain_for_view, free_space_points, voxel_downsample, Aabb, GpisModel};
use gpisgrasp_core::rng::derive_seed;
use gpisgrasp_core::world::{builtin_object, render_pointcloud, Body, World, BUILTIN_OBJECTS};
use gpisgrasp_core::Vec3;

use crate::artifacts::*;
use crate::config::{ConfigError, RunConfig};
use crate::io::{self, FormatError};

/// Seed purpose for ground-truth surface samples, kept apart from the run's
/// own streams.
const TRUTH_SAMPLES: u64 = 0x5452_5554;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("unknown object {0:?}: not a builtin ({builtins}) and no such file", builtins = BUILTIN_OBJECTS.join(", "))]
    UnknownObject(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{0}")]
    Core(#[from] gpisgrasp_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    /// Process exit code: 2 for configuration problems, 3 for run-time failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::UnknownObject(_) => 2,
            _ => 3,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Builtin object by name, otherwise an OBJ file path.
pub fn resolve_object(object: &str) -> Result<Body, RunError> {
    if let Some(b) = builtin_object(object) {
        return Ok(b);
    }
    let p = Path::new(object);
    if !p.is_file() {
        return Err(RunError::UnknownObject(object.into()));
    }
    Ok(Body::Mesh(io::load_mesh(p)?))
}

/// Everything a run starts from.
pub struct Scene {
    pub world: World,
    pub cloud: Vec<Vec3>,
    pub gpis: GpisModel,
}

/// Shape model domain around a cloud seen from `cfg`'s camera.
pub fn model_domain(cfg: &RunConfig, cloud: &[Vec3]) -> Result<Aabb, RunError> {
    Ok(domain_for_view(cloud, cfg.camera().view_direction(), cfg.gpis.depth_extension)?)
}

/// Initial shape model of `cloud`. With the camera position known, free-space
/// points in front of the cloud are added too.
pub fn fit_view(cfg: &RunConfig, cloud: &[Vec3], viewpoint: Option<Vec3>) -> Result<GpisModel, RunError> {
    let domain = model_domain(cfg, cloud)?;
    let noise = cfg.gpis_noise();
    let gpis = GpisModel::init(cloud, domain, &noise, cfg.gpis.boundary_grid)?;
    let Some(eye) = viewpoint else {
        return Ok(gpis);
    };
    let e = Aabb::from_points(cloud).map(|b| b.extent()).unwrap_or(Vec3::ZERO);
    let offset = cfg.gpis.free_space_offset * e.x.max(e.y).max(e.z);
    let free = free_space_points(cloud, eye, offset, cfg.gpis.free_space_stride, &domain, &noise);
    Ok(gpis.add_observations(&free)?)
}

/// Render the partial view, downsample it and fit the initial shape model.
pub fn prepare_scene(cfg: &RunConfig) -> Result<Scene, RunError> {
    let body = resolve_object(&cfg.run.object)?;
    let camera = cfg.camera();
    let raw = render_pointcloud(&body, &camera, cfg.run.seed)?;
    let cloud = voxel_downsample(&raw, cfg.gpis.max_cloud_points);
    let gpis = fit_view(cfg, &cloud, Some(camera.position))?;
    Ok(Scene {
        world: World {
            body,
            hand: cfg.hand(),
            sensing: cfg.sensing(),
        },
        cloud,
        gpis,
    })
}

/// Ground-truth monitor with an optional wall clock.
pub struct RunMonitor {
    pub inner: GroundTruthMonitor,
    pub started: Option<Instant>,
}

impl RunMonitor {
    pub fn new(cfg: &RunConfig, body: &Body) -> RunMonitor {
        let seed = derive_seed(cfg.run.seed, TRUTH_SAMPLES, 0);
        RunMonitor {
            inner: GroundTruthMonitor {
                truth: body.sample_surface(cfg.gpis.hausdorff_samples, seed),
                surface_resolution: cfg.gpis.surface_resolution,
                variance_resolution: cfg.gpis.variance_resolution,
                samples: cfg.gpis.hausdorff_samples,
                seed,
            },
            started: cfg.run.wall_clock.then(Instant::now),
        }
    }
}

impl ShapeMonitor for RunMonitor {
    fn measure(&self, gpis: &GpisModel) -> gpisgrasp_core::Result<ShapeMetrics> {
        self.inner.measure(gpis)
    }

    fn clock_ms(&self) -> Option<f64> {
        self.started.map(|t| t.elapsed().as_secs_f64() * 1e3)
    }
}

pub struct RunOutcome {
    pub dir: PathBuf,
    pub summary: RunSummary,
    pub result: ExplorationResult,
}

/// Execute one run and write its artifacts into `cfg.run.out`.
pub fn run(cfg: &RunConfig, mode: Mode) -> Result<RunOutcome, RunError> {
    cfg.validate().map_err(|message| ConfigError::Invalid {
        path: "config".into(),
        message,
    })?;
    let scene = prepare_scene(cfg)?;
    let monitor = RunMonitor::new(cfg, &scene.world.body);
    let ecfg = cfg.exploration();
    let (prior, result) = match mode {
        Mode::Explore => {
            let prior = build_prior(&scene.world, &scene.gpis, &ecfg)?;
            let result = explore(&scene.world, &scene.gpis, &prior, &ecfg, Some(&monitor))?;
            (prior, result)
        }
        Mode::Baseline => (Vec::new(), baseline_explore(&scene.world, &scene.gpis, &ecfg, Some(&monitor))?),
    };

    let dir = PathBuf::from(&cfg.run.out);
    std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let put = |name: &str, text: &str| io::write_text(&dir.join(name), text);
    put(CONFIG_FILE, &cfg.emit())?;
    put(ITERATIONS_FILE, &iterations_csv(&result))?;
    put(PRIOR_FILE, &prior_csv(&prior))?;
    put(METRICS_FILE, &metrics_csv(&result))?;
    put(GRASPS_FILE, &grasps_csv(&result.grasps))?;
    io::write_xyz(&dir.join(CLOUD_FILE), &scene.cloud)?;
    for (name, model) in [(INITIAL_SURFACE_FILE, &scene.gpis), (FINAL_SURFACE_FILE, &result.gpis)] {
        match model.extract_surface(cfg.gpis.surface_resolution) {
            Ok(s) => io::write_obj(&dir.join(name), &s.mesh)?,
            Err(gpisgrasp_core::Error::EmptySurface) => put(name, "")?,
            Err(e) => return Err(e.into()),
        }
    }
    let summary = RunSummary {
        mode,
        object: cfg.run.object.clone(),
        seed: cfg.run.seed,
        iterations: result.log.len(),
        prior_attempts: prior.len(),
        best_pfc: result.best_pfc_curve.last().copied().unwrap_or(0.0),
        stable_grasps: result.grasps.len(),
        com: result.com.p_com.to_array(),
        sigma_com: result.com.sigma_com,
    };
    put(SUMMARY_FILE, &summary.emit())?;
    Ok(RunOutcome { dir, summary, result })
}

/// Summary of a shape-only reconstruction.
pub struct Reconstruction {
    pub points: usize,
    pub domain: Aabb,
    pub com: [f64; 3],
    pub sigma_com: f64,
    pub mean_variance: f64,
    pub hausdorff: Option<f64>,
}

/// Fit the shape model to `cloud` (or to the configured object's rendered
/// view) and write the cloud, the zero level set and a summary. A cloud
/// file gets no free-space points, as its viewpoint is unknown.
pub fn reconstruct(cfg: &RunConfig, cloud_file: Option<&Path>) -> Result<Reconstruction, RunError> {
    let (cloud, gpis, truth) = match cloud_file {
        Some(p) => {
            let cloud = voxel_downsample(&io::load_xyz(p)?, cfg.gpis.max_cloud_points);
            let gpis = fit_view(cfg, &cloud, None)?;
            (cloud, gpis, None)
        }
        None => {
            let scene = prepare_scene(cfg)?;
            let monitor = RunMonitor::new(cfg, &scene.world.body);
            (scene.cloud, scene.gpis, Some(monitor))
        }
    };
    let domain = *gpis.domain();
    let dir = PathBuf::from(&cfg.run.out);
    std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    io::write_xyz(&dir.join(CLOUD_FILE), &cloud)?;
    let surface = gpis.extract_surface(cfg.gpis.surface_resolution)?;
    io::write_obj(&dir.join("surface.obj"), &surface.mesh)?;
    let com = gpis.estimate_com(cfg.gpis.com_resolution)?;
    let (mean_variance, hausdorff) = match &truth {
        Some(m) => {
            let s = m.measure(&gpis)?;
            (s.mean_variance, s.hausdorff)
        }
        None => (gpis.mean_variance(cfg.gpis.variance_resolution)?, None),
    };
    let rec = Reconstruction {
        points: gpis.points().len(),
        domain,
        com: com.p_com.to_array(),
        sigma_com: com.sigma_com,
        mean_variance,
        hausdorff,
    };
    let mut text = format!(
        "points = {}\ndomain_min = {:?}\ndomain_max = {:?}\ncom = {:?}\nsigma_com = {}\nmean_variance = {}\n",
        rec.points,
        domain.min.to_array(),
        domain.max.to_array(),
        rec.com,
        rec.sigma_com,
        rec.mean_variance
    );
    if let Some(h) = hausdorff {
        text.push_str(&format!("hausdorff = {h}\n"));
    }
    io::write_text(&dir.join("reconstruction.toml"), &text)?;
    Ok(rec)
}
