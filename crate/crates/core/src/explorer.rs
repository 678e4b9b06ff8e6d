//! Bayesian-optimisation grasp exploration and the heuristic baseline.
//!
//! A 12-dimensional query (thumb and first-finger targets, the second
//! finger's offset in the wrist plane, wrist Euler angles and an approach
//! offset) is executed by the virtual hand. The target value rewards the
//! probability of force closure and penalises fingertips that end up away
//! from the current implicit surface. A squared-exponential GP over the
//! normalised query space serves as the surrogate; candidates are ranked by
//! expected improvement.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::gp::{GpModel, KernelSpec, Prediction};
use crate::gpis::{Aabb, GpisModel, GpisNoise, LabeledPoint, MassEstimate, PointSource};
use crate::grasp::{pfc, UncertaintyModel};
use crate::math::{log_normal_cdf, normal_cdf, normal_pdf, Mat3, Vec3};
use crate::rng::{self, gaussian, purpose, SimRng};
use crate::world::{
    close_fingers, finger2_target, finger2_uv_of, solve_hand, FingerOutcome, HandCommand, HandPlan, World,
};
use crate::{Error, Infeasibility, Result};

pub const QUERY_DIM: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraspQuery {
    pub thumb: Vec3,
    pub finger1: Vec3,
    pub finger2_uv: [f64; 2],
    /// Yaw, pitch, roll (Z-Y-X).
    pub wrist_euler: [f64; 3],
    pub approach_offset: f64,
}

impl GraspQuery {
    pub fn to_array(&self) -> [f64; QUERY_DIM] {
        [
            self.thumb.x,
            self.thumb.y,
            self.thumb.z,
            self.finger1.x,
            self.finger1.y,
            self.finger1.z,
            self.finger2_uv[0],
            self.finger2_uv[1],
            self.wrist_euler[0],
            self.wrist_euler[1],
            self.wrist_euler[2],
            self.approach_offset,
        ]
    }

    pub fn from_array(a: &[f64; QUERY_DIM]) -> Self {
        GraspQuery {
            thumb: Vec3::new(a[0], a[1], a[2]),
            finger1: Vec3::new(a[3], a[4], a[5]),
            finger2_uv: [a[6], a[7]],
            wrist_euler: [a[8], a[9], a[10]],
            approach_offset: a[11],
        }
    }

    pub fn command(&self) -> HandCommand {
        HandCommand {
            thumb: self.thumb,
            finger1: self.finger1,
            finger2_uv: self.finger2_uv,
            wrist_euler: self.wrist_euler,
            approach_offset: self.approach_offset,
        }
    }

    pub fn wrist_rotation(&self) -> Mat3 {
        let [yaw, pitch, roll] = self.wrist_euler;
        Mat3::from_euler_zyx(yaw, pitch, roll)
    }
}

/// Box bounds of the query space; the surrogate sees it as the unit cube.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QueryDomain {
    pub shape: Aabb,
    /// Half-width of the square the second finger's plane offset lives in.
    pub uv_half: f64,
    pub offset_max: f64,
}

const HALF_PI: f64 = core::f64::consts::FRAC_PI_2;
const PI: f64 = core::f64::consts::PI;

impl QueryDomain {
    /// Fingertips inside the shape domain, the second finger anywhere within
    /// half the domain's largest extent of the thumb/finger-1 midpoint.
    pub fn new(shape: Aabb, offset_max: f64) -> Self {
        let e = shape.extent();
        QueryDomain {
            shape,
            uv_half: 0.5 * e.x.max(e.y).max(e.z),
            offset_max,
        }
    }

    pub fn lower(&self) -> [f64; QUERY_DIM] {
        let s = self.shape.min;
        [s.x, s.y, s.z, s.x, s.y, s.z, -self.uv_half, -self.uv_half, -PI, -HALF_PI, -PI, 0.0]
    }

    pub fn upper(&self) -> [f64; QUERY_DIM] {
        let s = self.shape.max;
        [s.x, s.y, s.z, s.x, s.y, s.z, self.uv_half, self.uv_half, PI, HALF_PI, PI, self.offset_max]
    }

    pub fn normalize(&self, q: &GraspQuery) -> [f64; QUERY_DIM] {
        let (lo, hi, x) = (self.lower(), self.upper(), q.to_array());
        core::array::from_fn(|k| (x[k] - lo[k]) / (hi[k] - lo[k]))
    }

    pub fn denormalize(&self, u: &[f64; QUERY_DIM]) -> GraspQuery {
        let (lo, hi) = (self.lower(), self.upper());
        GraspQuery::from_array(&core::array::from_fn(|k| lo[k] + u[k] * (hi[k] - lo[k])))
    }

    pub fn contains(&self, q: &GraspQuery) -> bool {
        let tol = 1e-9;
        self.normalize(q).iter().all(|&u| (-tol..=1.0 + tol).contains(&u))
    }
}

fn clamp_unit(u: &mut [f64; QUERY_DIM]) {
    for v in u.iter_mut() {
        *v = v.clamp(0.0, 1.0);
    }
}

/// Eq. target: `lambda * pfc - sum_i fbar(tip_i)^2`. Tips must lie in the
/// shape domain.
pub fn target_value(gpis: &GpisModel, tips: &[Vec3; 3], pfc: f64, lambda: f64) -> Result<f64> {
    Ok(lambda * pfc - surface_penalty(gpis, tips)?)
}

/// `sum_i fbar(tip_i)^2`.
pub fn surface_penalty(gpis: &GpisModel, tips: &[Vec3; 3]) -> Result<f64> {
    let mut sum = 0.0;
    for t in tips {
        let f = gpis.query_mean(*t)?;
        sum += f * f;
    }
    Ok(sum)
}

/// Standard-deviation form of expected improvement for maximisation.
pub fn expected_improvement(pred: &Prediction, y_best: f64) -> f64 {
    let gain = pred.mean - y_best;
    let s = pred.std_dev();
    if s < 1e-12 {
        return gain.max(0.0);
    }
    let z = gain / s;
    (gain * normal_cdf(z) + s * normal_pdf(z)).max(0.0)
}

/// `ln EI`, accurate where EI itself underflows. `-inf` when EI is exactly 0.
pub fn log_expected_improvement(pred: &Prediction, y_best: f64) -> f64 {
    let gain = pred.mean - y_best;
    let s = pred.std_dev();
    if s < 1e-12 {
        return if gain > 0.0 { gain.ln() } else { f64::NEG_INFINITY };
    }
    let z = gain / s;
    s.ln() + log_h(z)
}

/// `ln(z Phi(z) + phi(z))`.
fn log_h(z: f64) -> f64 {
    if z > -5.0 {
        return (z * normal_cdf(z) + normal_pdf(z)).ln();
    }
    // z Phi(z) + phi(z) = phi(z) (1 + z R(z)) with R(z) = Phi(z) / phi(z);
    // for very negative z use the asymptotic series of the bracket.
    let w = 1.0 / (z * z);
    let tail = w * (1.0 - 3.0 * w * (1.0 - 5.0 * w * (1.0 - 7.0 * w)));
    let log_phi = -0.5 * z * z - 0.5 * (2.0 * PI).ln();
    if z > -30.0 {
        let ratio = (log_normal_cdf(z) - log_phi).exp();
        let bracket = 1.0 + z * ratio;
        if bracket > 0.0 {
            return log_phi + bracket.ln();
        }
    }
    log_phi + tail.ln()
}

/// Acquisition optimiser settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcquisitionConfig {
    /// Uniform candidates per suggestion.
    pub candidates: usize,
    /// How many of the best candidates and observations get refined.
    pub refine_top: usize,
    pub refine_samples: usize,
    /// Per-axis std of refinement steps, in normalised units.
    pub refine_sigma: f64,
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        AcquisitionConfig {
            candidates: 2000,
            refine_top: 5,
            refine_samples: 10,
            refine_sigma: 0.05,
        }
    }
}

/// Which query the surrogate is trained on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurrogateInput {
    /// Commanded query with the fingertip targets replaced by the achieved tips.
    AchievedTips,
    Commanded,
}

/// What expected improvement is measured against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Incumbent {
    /// Largest observed target value.
    BestObserved,
    /// Largest posterior mean over the observed inputs; less swayed by one
    /// lucky noisy evaluation.
    BestPosteriorMean,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurrogateConfig {
    pub sigma: f64,
    pub length_scale: f64,
    /// Observation noise as a fraction of the kernel variance.
    pub noise_ratio: f64,
    pub input: SurrogateInput,
    pub incumbent: Incumbent,
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        SurrogateConfig {
            sigma: 0.001,
            length_scale: 0.3,
            noise_ratio: 0.1,
            input: SurrogateInput::AchievedTips,
            incumbent: Incumbent::BestPosteriorMean,
        }
    }
}

impl SurrogateConfig {
    pub fn kernel(&self) -> Result<KernelSpec> {
        KernelSpec::squared_exponential(self.sigma, self.length_scale)
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_ratio * self.sigma * self.sigma
    }

    /// The value EI measures improvement over.
    pub fn incumbent_value(&self, surrogate: &GpModel) -> Result<f64> {
        match self.incumbent {
            Incumbent::BestObserved => Ok(surrogate.targets().iter().copied().fold(f64::NEG_INFINITY, f64::max)),
            Incumbent::BestPosteriorMean => {
                let mut best = f64::NEG_INFINITY;
                for i in 0..surrogate.len() {
                    best = best.max(surrogate.predict_mean(surrogate.input(i))?);
                }
                Ok(best)
            }
        }
    }
}

/// Stop once `count` iterations have reached `pfc > pfc_min`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopRule {
    pub count: usize,
    pub pfc_min: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExplorationConfig {
    pub lambda: f64,
    pub n_stop: usize,
    pub unc: UncertaintyModel,
    pub prior_min_grasps: usize,
    pub prior_pfc_min: f64,
    pub prior_cap: usize,
    pub stable_pfc_min: f64,
    pub sigma_th: f64,
    pub approach_offset_max: f64,
    pub com_resolution: usize,
    pub gpis_noise: GpisNoise,
    pub acquisition: AcquisitionConfig,
    pub surrogate: SurrogateConfig,
    pub stop: Option<StopRule>,
    /// Shape metrics every this many iterations (and on the last); 0 disables.
    pub metrics_every: usize,
    pub seed: u64,
}

impl Default for ExplorationConfig {
    fn default() -> Self {
        ExplorationConfig {
            lambda: 1.0,
            n_stop: 60,
            unc: UncertaintyModel::default(),
            prior_min_grasps: 3,
            prior_pfc_min: 0.4,
            prior_cap: 200,
            stable_pfc_min: 0.5,
            sigma_th: 0.05,
            approach_offset_max: 1.0,
            com_resolution: 32,
            gpis_noise: GpisNoise::default(),
            acquisition: AcquisitionConfig::default(),
            surrogate: SurrogateConfig::default(),
            stop: None,
            metrics_every: 10,
            seed: 0,
        }
    }
}

impl ExplorationConfig {
    pub fn validate(&self) -> Result<()> {
        self.unc.validate()?;
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidParameter("lambda must be > 0"));
        }
        if self.n_stop == 0 {
            return Err(Error::InvalidParameter("n_stop must be >= 1"));
        }
        if !(self.stable_pfc_min > 0.0 && self.stable_pfc_min < 1.0) {
            return Err(Error::InvalidParameter("stable_pfc_min must be in (0, 1)"));
        }
        if !(self.sigma_th >= 0.0) || !(self.approach_offset_max > 0.0) {
            return Err(Error::InvalidParameter("sigma_th must be >= 0 and approach_offset_max > 0"));
        }
        if self.acquisition.candidates == 0 {
            return Err(Error::InvalidParameter("acquisition needs at least one candidate"));
        }
        if !(self.surrogate.noise_ratio > 0.0) {
            return Err(Error::InvalidParameter("surrogate noise ratio must be > 0"));
        }
        self.surrogate.kernel()?;
        Ok(())
    }

    pub fn query_domain(&self, gpis: &GpisModel) -> QueryDomain {
        QueryDomain::new(*gpis.domain(), self.approach_offset_max)
    }
}

/// One executed grasp attempt.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    /// 1-based exploration iteration; 0 for prior attempts.
    pub iteration: usize,
    pub query: GraspQuery,
    pub plan: Option<HandPlan>,
    pub infeasible: Option<Infeasibility>,
    pub fingers: [FingerOutcome; 3],
    /// Achieved fingertip positions x_Fi.
    pub tips: [Vec3; 3],
    pub pfc: f64,
    /// `sum_i fbar(clamp(tip_i))^2` against the model the attempt was scored on.
    pub penalty: f64,
    pub y: f64,
    pub surrogate_input: [f64; QUERY_DIM],
}

impl Observation {
    pub fn all_in_contact(&self) -> bool {
        self.fingers.iter().all(|f| f.contact.is_some())
    }

    pub fn contact_flags(&self) -> String {
        self.fingers
            .iter()
            .map(|f| if f.contact.is_some() { '1' } else { '0' })
            .collect()
    }

    /// Tactile points for the shape model, skipping any outside its domain.
    pub fn tactile_points(&self, domain: &Aabb, noise: &GpisNoise) -> Vec<LabeledPoint> {
        self.fingers
            .iter()
            .filter_map(|f| f.contact)
            .filter(|c| domain.contains(c.point))
            .map(|c| noise.tactile_point(c.point))
            .collect()
    }
}

/// A returned stable grasp: wrist pose and achieved finger placement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraspRecord {
    pub iteration: usize,
    pub wrist_position: Vec3,
    pub wrist_euler: [f64; 3],
    pub tips: [Vec3; 3],
    pub pfc: f64,
    pub plan: HandPlan,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapeMetrics {
    pub hausdorff: Option<f64>,
    pub mean_variance: f64,
}

/// Observes a run: measures the shape model, usually against ground truth,
/// and optionally supplies a clock for per-iteration wall time.
pub trait ShapeMonitor {
    fn measure(&self, gpis: &GpisModel) -> Result<ShapeMetrics>;

    /// Milliseconds since some fixed origin; `None` leaves wall times at 0.
    fn clock_ms(&self) -> Option<f64> {
        None
    }
}

#[derive(Clone, Debug)]
pub struct ExplorationResult {
    pub prior: Vec<Observation>,
    pub log: Vec<Observation>,
    /// Sorted by pfc, best first.
    pub grasps: Vec<GraspRecord>,
    pub initial_metrics: Option<ShapeMetrics>,
    /// Aligned with `log`.
    pub metrics: Vec<Option<ShapeMetrics>>,
    /// Running maximum of pfc over `log`.
    pub best_pfc_curve: Vec<f64>,
    /// Wall time of each iteration in ms, excluding shape metrics.
    pub wall_ms: Vec<f64>,
    pub gpis: GpisModel,
    pub com: MassEstimate,
}

impl ExplorationResult {
    /// First iteration at which `count` attempts have exceeded `pfc_min`.
    pub fn iterations_to(&self, count: usize, pfc_min: f64) -> Option<usize> {
        iterations_to(&self.log, count, pfc_min)
    }
}

pub fn iterations_to(log: &[Observation], count: usize, pfc_min: f64) -> Option<usize> {
    let mut seen = 0;
    for o in log {
        if o.pfc > pfc_min {
            seen += 1;
            if seen >= count {
                return Some(o.iteration);
            }
        }
    }
    None
}

/// Centre of mass from the model, or the vision centroid anchor with a
/// domain-sized spread when the model has no interior yet.
pub fn current_com(gpis: &GpisModel, resolution: usize) -> Result<MassEstimate> {
    match gpis.estimate_com(resolution) {
        Err(Error::DegenerateShape) => {
            let p_com = gpis.anchor_centroid().unwrap_or(gpis.domain().center());
            let e = gpis.domain().extent() / resolution as f64;
            Ok(MassEstimate {
                p_com,
                sigma_com: e.x.max(e.y).max(e.z),
            })
        }
        other => other,
    }
}

/// Run the hand on one query and score it. Shared by BO, baseline and prior.
pub fn execute_query(
    world: &World,
    gpis: &GpisModel,
    com: &MassEstimate,
    query: &GraspQuery,
    config: &ExplorationConfig,
    iteration: usize,
    seed: u64,
) -> Result<Observation> {
    let cmd = query.command();
    let (plan, infeasible, fingers) = match solve_hand(&cmd, &world.hand, com.p_com) {
        Ok(plan) => (Some(plan), None, close_fingers(&world.body, &plan, &world.sensing, seed).fingers),
        Err(Error::Infeasible(why)) => {
            let f2 = finger2_target(&cmd, &query.wrist_rotation(), world.hand.knuckle_offset);
            let tip = |tip| FingerOutcome { tip, contact: None };
            (None, Some(why), [tip(query.thumb), tip(query.finger1), tip(f2)])
        }
        Err(e) => return Err(e),
    };
    let tips = fingers.map(|f| f.tip);
    let pfc_value = if fingers.iter().all(|f| f.contact.is_some()) {
        let contacts = fingers
            .iter()
            .map(|f| f.contact.expect("checked").to_contact(config.unc.mu_hat))
            .collect::<Result<Vec<_>>>()?;
        pfc(&contacts, &config.unc, com, seed)?
    } else {
        0.0
    };
    let domain = gpis.domain();
    let clamped = tips.map(|t| domain.clamp(t));
    let penalty = surface_penalty(gpis, &clamped)?;
    let y = config.lambda * pfc_value - penalty;
    let qd = config.query_domain(gpis);
    let surrogate_input = match config.surrogate.input {
        SurrogateInput::Commanded => {
            let mut u = qd.normalize(query);
            clamp_unit(&mut u);
            u
        }
        SurrogateInput::AchievedTips => {
            let rotation = query.wrist_rotation();
            let mut achieved = *query;
            achieved.thumb = clamped[0];
            achieved.finger1 = clamped[1];
            achieved.finger2_uv = finger2_uv_of(tips[2], &cmd, &rotation, world.hand.knuckle_offset);
            let mut u = qd.normalize(&achieved);
            clamp_unit(&mut u);
            u
        }
    };
    Ok(Observation {
        iteration,
        query: *query,
        plan,
        infeasible,
        fingers,
        tips,
        pfc: pfc_value,
        penalty,
        y,
        surrogate_input,
    })
}

fn uniform_unit(r: &mut SimRng) -> [f64; QUERY_DIM] {
    core::array::from_fn(|_| r.random::<f64>())
}

/// `anchor` plus per-axis Gaussian noise truncated at three standard
/// deviations, clamped into `domain`.
fn gaussian_near(r: &mut SimRng, anchor: Vec3, sigma: f64, domain: &Aabb) -> Vec3 {
    let mut axis = || loop {
        let z = gaussian(r);
        if z.abs() <= 3.0 {
            return z * sigma;
        }
    };
    domain.clamp(anchor + Vec3::new(axis(), axis(), axis()))
}

fn vision_points(gpis: &GpisModel) -> Vec<Vec3> {
    gpis.points()
        .iter()
        .filter(|p| p.source == PointSource::Vision)
        .map(|p| p.position)
        .collect()
}

/// Baseline sampler: thumb near a random cloud point, everything else uniform.
pub fn baseline_query(r: &mut SimRng, domain: &QueryDomain, cloud: &[Vec3], sigma_th: f64) -> GraspQuery {
    let mut q = domain.denormalize(&uniform_unit(r));
    let anchor = cloud[r.random_range(0..cloud.len())];
    q.thumb = gaussian_near(r, anchor, sigma_th, &domain.shape);
    q
}

/// Sample baseline-style grasps around the vision cloud until `prior_min_grasps` of them
/// exceed `prior_pfc_min`. Returns every attempt.
pub fn build_prior(world: &World, gpis: &GpisModel, config: &ExplorationConfig) -> Result<Vec<Observation>> {
    config.validate()?;
    let cloud = vision_points(gpis);
    if cloud.is_empty() {
        return Err(Error::Empty("vision points"));
    }
    let com = current_com(gpis, config.com_resolution)?;
    let domain = config.query_domain(gpis);
    let mut out = Vec::new();
    let mut good = 0;
    for attempt in 0..config.prior_cap {
        let mut r = rng::stream(config.seed, purpose::PRIOR, attempt as u64);
        let q = baseline_query(&mut r, &domain, &cloud, config.sigma_th);
        let seed = rng::derive_seed(config.seed, purpose::PRIOR, attempt as u64);
        let obs = execute_query(world, gpis, &com, &q, config, 0, seed)?;
        if obs.pfc > config.prior_pfc_min {
            good += 1;
        }
        out.push(obs);
        if good >= config.prior_min_grasps {
            return Ok(out);
        }
    }
    Err(Error::PriorConstructionFailed {
        found: good,
        needed: config.prior_min_grasps,
        attempts: config.prior_cap,
    })
}

/// Maximise expected improvement over uniform candidates plus Gaussian
/// refinements around the best candidates and the best observed inputs.
pub fn suggest_next(
    surrogate: &GpModel,
    domain: &QueryDomain,
    y_best: f64,
    acq: &AcquisitionConfig,
    seed: u64,
) -> Result<GraspQuery> {
    Ok(domain.denormalize(&suggest_normalized(surrogate, y_best, acq, seed)?))
}

fn suggest_normalized(
    surrogate: &GpModel,
    y_best: f64,
    acq: &AcquisitionConfig,
    seed: u64,
) -> Result<[f64; QUERY_DIM]> {
    if surrogate.is_empty() {
        return Err(Error::Empty("surrogate"));
    }
    if surrogate.dim() != QUERY_DIM {
        return Err(Error::DimensionMismatch {
            expected: QUERY_DIM,
            found: surrogate.dim(),
        });
    }
    if acq.candidates == 0 {
        return Err(Error::InvalidParameter("acquisition needs at least one candidate"));
    }
    let score = |u: &[f64; QUERY_DIM]| -> Result<f64> {
        Ok(log_expected_improvement(&surrogate.predict(u)?, y_best))
    };
    let mut r = rng::stream(seed, purpose::ACQUISITION, 0);
    let mut scored: Vec<(f64, [f64; QUERY_DIM])> = Vec::with_capacity(acq.candidates);
    for _ in 0..acq.candidates {
        let u = uniform_unit(&mut r);
        scored.push((score(&u)?, u));
    }
    let by_score = |a: &(f64, [f64; QUERY_DIM]), b: &(f64, [f64; QUERY_DIM])| b.0.total_cmp(&a.0);
    scored.sort_by(by_score);
    let mut centres: Vec<[f64; QUERY_DIM]> = scored.iter().take(acq.refine_top).map(|c| c.1).collect();
    let mut observed: Vec<usize> = (0..surrogate.len()).collect();
    let targets = surrogate.targets();
    observed.sort_by(|&a, &b| targets[b].total_cmp(&targets[a]).then(a.cmp(&b)));
    for &i in observed.iter().take(acq.refine_top) {
        centres.push(core::array::from_fn(|k| surrogate.input(i)[k]));
    }
    for c in &centres {
        for _ in 0..acq.refine_samples {
            let mut u: [f64; QUERY_DIM] = core::array::from_fn(|k| c[k] + acq.refine_sigma * gaussian(&mut r));
            clamp_unit(&mut u);
            scored.push((score(&u)?, u));
        }
    }
    // Stable choice: highest score, earliest on ties.
    let mut best = 0;
    for i in 1..scored.len() {
        if scored[i].0 > scored[best].0 {
            best = i;
        }
    }
    Ok(scored[best].1)
}

fn grasp_record(o: &Observation) -> Option<GraspRecord> {
    let plan = o.plan?;
    Some(GraspRecord {
        iteration: o.iteration,
        wrist_position: plan.wrist_position,
        wrist_euler: o.query.wrist_euler,
        tips: o.tips,
        pfc: o.pfc,
        plan,
    })
}

struct Recorder<'a> {
    config: &'a ExplorationConfig,
    monitor: Option<&'a dyn ShapeMonitor>,
    log: Vec<Observation>,
    metrics: Vec<Option<ShapeMetrics>>,
    best_pfc_curve: Vec<f64>,
    wall_ms: Vec<f64>,
    tick: Option<f64>,
}

impl<'a> Recorder<'a> {
    fn new(config: &'a ExplorationConfig, monitor: Option<&'a dyn ShapeMonitor>) -> Self {
        Recorder {
            config,
            monitor,
            log: Vec::with_capacity(config.n_stop),
            metrics: Vec::with_capacity(config.n_stop),
            best_pfc_curve: Vec::with_capacity(config.n_stop),
            wall_ms: Vec::with_capacity(config.n_stop),
            tick: monitor.and_then(|m| m.clock_ms()),
        }
    }

    fn now(&self) -> Option<f64> {
        self.monitor.and_then(|m| m.clock_ms())
    }

    /// Restart the iteration timer.
    fn start(&mut self) {
        self.tick = self.now();
    }

    fn push(&mut self, obs: Observation, gpis: &GpisModel, last: bool) -> Result<bool> {
        let elapsed = match (self.tick, self.now()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        };
        self.wall_ms.push(elapsed);
        let best = self.best_pfc_curve.last().copied().unwrap_or(0.0).max(obs.pfc);
        self.best_pfc_curve.push(best);
        let i = obs.iteration;
        self.log.push(obs);
        let stop = self
            .config
            .stop
            .is_some_and(|s| iterations_to(&self.log, s.count, s.pfc_min).is_some());
        let due = self.config.metrics_every > 0 && (i % self.config.metrics_every == 0 || last || stop);
        let m = match self.monitor {
            Some(mon) if due => Some(mon.measure(gpis)?),
            _ => None,
        };
        self.metrics.push(m);
        Ok(stop)
    }

    fn finish(self, prior: Vec<Observation>, initial: Option<ShapeMetrics>, gpis: GpisModel, com: MassEstimate) -> ExplorationResult {
        let mut grasps: Vec<GraspRecord> = self
            .log
            .iter()
            .filter(|o| o.pfc > self.config.stable_pfc_min)
            .filter_map(grasp_record)
            .collect();
        grasps.sort_by(|a, b| b.pfc.total_cmp(&a.pfc).then(a.iteration.cmp(&b.iteration)));
        ExplorationResult {
            prior,
            log: self.log,
            grasps,
            initial_metrics: initial,
            metrics: self.metrics,
            best_pfc_curve: self.best_pfc_curve,
            wall_ms: self.wall_ms,
            gpis,
            com,
        }
    }
}

fn initial_metrics(config: &ExplorationConfig, monitor: Option<&dyn ShapeMonitor>, gpis: &GpisModel) -> Result<Option<ShapeMetrics>> {
    match monitor {
        Some(m) if config.metrics_every > 0 => Ok(Some(m.measure(gpis)?)),
        _ => Ok(None),
    }
}

/// The exploration loop. `prior` seeds the surrogate; the shape model and
/// centre of mass are updated with every contact.
pub fn explore(
    world: &World,
    gpis: &GpisModel,
    prior: &[Observation],
    config: &ExplorationConfig,
    monitor: Option<&dyn ShapeMonitor>,
) -> Result<ExplorationResult> {
    config.validate()?;
    let domain = config.query_domain(gpis);
    let noise = config.surrogate.noise_var();
    let mut surrogate = GpModel::empty(config.surrogate.kernel()?, QUERY_DIM);
    let inputs: Vec<[f64; QUERY_DIM]> = prior.iter().map(|o| o.surrogate_input).collect();
    let ys: Vec<f64> = prior.iter().map(|o| o.y).collect();
    surrogate.extend(&inputs, &ys, &alloc::vec![noise; ys.len()])?;
    let initial = initial_metrics(config, monitor, gpis)?;
    let mut gpis = gpis.clone();
    let mut com = current_com(&gpis, config.com_resolution)?;
    let mut rec = Recorder::new(config, monitor);
    for i in 1..=config.n_stop {
        rec.start();
        let query = if surrogate.is_empty() {
            let mut r = rng::stream(config.seed, purpose::ACQUISITION, i as u64);
            domain.denormalize(&uniform_unit(&mut r))
        } else {
            let y_best = config.surrogate.incumbent_value(&surrogate)?;
            let seed = rng::derive_seed(config.seed, purpose::ACQUISITION, i as u64);
            suggest_next(&surrogate, &domain, y_best, &config.acquisition, seed)?
        };
        let seed = rng::derive_seed(config.seed, purpose::EXPLORE, i as u64);
        let obs = execute_query(world, &gpis, &com, &query, config, i, seed)?;
        surrogate.extend(&[obs.surrogate_input], &[obs.y], &[noise])?;
        let points = obs.tactile_points(gpis.domain(), &config.gpis_noise);
        if !points.is_empty() {
            gpis = gpis.add_observations(&points)?;
            com = current_com(&gpis, config.com_resolution)?;
        }
        if rec.push(obs, &gpis, i == config.n_stop)? {
            break;
        }
    }
    Ok(rec.finish(prior.to_vec(), initial, gpis, com))
}

/// Heuristic baseline: thumb near a random cloud point, the other nine
/// coordinates uniform. No surrogate, and the shape model stays frozen.
pub fn baseline_explore(
    world: &World,
    gpis: &GpisModel,
    config: &ExplorationConfig,
    monitor: Option<&dyn ShapeMonitor>,
) -> Result<ExplorationResult> {
    config.validate()?;
    let cloud = vision_points(gpis);
    if cloud.is_empty() {
        return Err(Error::Empty("vision points"));
    }
    let domain = config.query_domain(gpis);
    let com = current_com(gpis, config.com_resolution)?;
    let initial = initial_metrics(config, monitor, gpis)?;
    let mut rec = Recorder::new(config, monitor);
    for i in 1..=config.n_stop {
        rec.start();
        let mut r = rng::stream(config.seed, purpose::BASELINE, i as u64);
        let query = baseline_query(&mut r, &domain, &cloud, config.sigma_th);
        let seed = rng::derive_seed(config.seed, purpose::EXPLORE, i as u64);
        let obs = execute_query(world, gpis, &com, &query, config, i, seed)?;
        if rec.push(obs, gpis, i == config.n_stop)? {
            break;
        }
    }
    Ok(rec.finish(Vec::new(), initial, gpis.clone(), com))
}

/// Hausdorff distance of the extracted zero level set to ground-truth
/// surface samples, plus the mean predictive variance.
pub struct GroundTruthMonitor {
    pub truth: Vec<Vec3>,
    pub surface_resolution: usize,
    pub variance_resolution: usize,
    pub samples: usize,
    pub seed: u64,
}

impl ShapeMonitor for GroundTruthMonitor {
    fn measure(&self, gpis: &GpisModel) -> Result<ShapeMetrics> {
        let mean_variance = gpis.mean_variance(self.variance_resolution)?;
        let hausdorff = match gpis.extract_surface(self.surface_resolution) {
            Ok(s) => {
                let est = s.mesh.sample_surface(self.samples, self.seed);
                Some(crate::gpis::hausdorff(&self.truth, &est)?)
            }
            Err(Error::EmptySurface) => None,
            Err(e) => return Err(e),
        };
        Ok(ShapeMetrics {
            hausdorff,
            mean_variance,
        })
    }
}

/// Boxed monitor helper for callers that pick one at run time.
pub fn boxed_monitor<M: ShapeMonitor + 'static>(m: M) -> Box<dyn ShapeMonitor> {
    Box::new(m)
}
