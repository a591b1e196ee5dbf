//! Config-driven pipeline: frame, taming checks, maximum-principle checks, orbit hunt and
//! window planning, with CSV/JSON outputs.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Bump, HamiltonianSystem, Integrator};
use crate::error::{Error, Result};
use crate::floercheck::{
    extremal_directions, is_slow, make_linear_floer_solution, reparametrize_to_slow, slow_inequality_audit,
    subharmonicity_check, CylinderGrid, HomotopyProfile,
};
use crate::orbits::{
    action_spectrum, confined, find_fixed_points, grid_seeds, hunt, island_seeds, write_orbits_csv, HuntOptions,
    OrbitOptions, PeriodicOrbit,
};
use crate::planning::{plan_window, WindowPlan};
use crate::quadform::{build_normal_form, check_smallness, rescale_to_small, slow_bound, Block, BlockSpec, NormalFrame, SmallnessReport};
use crate::taming::{build_profile, max_shift_epsilon, shift_bound_check, verify_profile, write_rows, CheckRow, ShiftOptions, Tamed};

/// The shipped 2D example: a saddle with an elliptic island.
pub const ISLAND_EXAMPLE: &str = include_str!("../../../configs/island.json");

fn default_kappa() -> f64 {
    1.0
}
fn default_epsilon() -> Vec<f64> {
    vec![1.0, 0.1]
}
fn default_seed_density() -> usize {
    15
}
fn default_step() -> f64 {
    0.01
}
fn default_grid() -> usize {
    64
}
fn default_samples() -> usize {
    10_000
}
fn default_floer_modes() -> i32 {
    2
}
fn default_candidates() -> usize {
    16
}
fn default_floor() -> u64 {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IslandSeeding {
    /// Seed radius as a fraction of the distance to the nearest other fixed point.
    pub fraction: f64,
    pub rays: usize,
    pub rings: usize,
}

impl Default for IslandSeeding {
    fn default() -> Self {
        Self {
            fraction: 0.6,
            rays: 12,
            rings: 14,
        }
    }
}

/// Bump centers are in the coordinates of the rescaled frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub blocks: Vec<Block>,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default)]
    pub bumps: Vec<Bump>,
    pub support_radius: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: Vec<f64>,
    #[serde(default)]
    pub periods: Vec<usize>,
    /// All primes in the closed range are added to `periods`.
    #[serde(default)]
    pub prime_range: Option<[u64; 2]>,
    /// Grid points per axis of the seed grid over the support ball.
    #[serde(default = "default_seed_density")]
    pub seed_density: usize,
    #[serde(default)]
    pub island: IslandSeeding,
    #[serde(default = "default_candidates")]
    pub candidates: usize,
    #[serde(default = "default_step")]
    pub step: f64,
    /// Nodes per side of the cylinder grid.
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_floer_modes")]
    pub floer_modes: i32,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub rng_seed: u64,
    /// `(k, l)` pairs for the iteration-shift check (expensive).
    #[serde(default)]
    pub shift_pairs: Vec<(usize, usize)>,
    /// Prime distance `m` of the window plan; chosen from the mean index when absent.
    #[serde(default)]
    pub window_m: Option<usize>,
    #[serde(default = "default_floor")]
    pub prime_floor: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn island_example() -> Self {
        Self::from_json(ISLAND_EXAMPLE).expect("shipped config parses")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::Config(format!("field `{field}`: {msg}")));
        if let Err(e) = BlockSpec::new(self.blocks.clone()) {
            return bad("blocks", e.to_string());
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return bad("kappa", format!("must be positive, got {}", self.kappa));
        }
        if !(self.support_radius > 0.0 && self.support_radius.is_finite()) {
            return bad("support_radius", format!("must be positive, got {}", self.support_radius));
        }
        if let Some(e) = self.epsilon.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
            return bad("epsilon", format!("values must lie in (0, 1], got {e}"));
        }
        if self.periods.contains(&0) {
            return bad("periods", "elements must be at least 1".into());
        }
        if let Some([lo, hi]) = self.prime_range {
            if lo > hi {
                return bad("prime_range", format!("empty range [{lo}, {hi}]"));
            }
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad("step", format!("must be positive, got {}", self.step));
        }
        if self.seed_density < 2 {
            return bad("seed_density", "must be at least 2".into());
        }
        if self.grid < 8 {
            return bad("grid", "must be at least 8".into());
        }
        if self.window_m == Some(0) {
            return bad("window_m", "must be at least 1".into());
        }
        for (i, b) in self.bumps.iter().enumerate() {
            if !(b.radius > 0.0) {
                return bad("bumps", format!("bump {i}: radius must be positive"));
            }
        }
        Ok(())
    }

    /// `periods` together with the primes of `prime_range`, sorted.
    pub fn resolved_periods(&self) -> Vec<usize> {
        let mut set: BTreeSet<usize> = self.periods.iter().copied().collect();
        if let Some([lo, hi]) = self.prime_range {
            for p in lo.max(2)..=hi {
                if (2..).take_while(|d| d * d <= p).all(|d| p % d != 0) {
                    set.insert(p as usize);
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn integrator(&self) -> Integrator {
        Integrator::new(self.step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Ok,
    /// Ran, but a verification did not pass.
    Failed,
    /// Aborted by a numerical or input error.
    Error,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub status: StageStatus,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameSummary {
    pub half_dim: usize,
    pub lambda: f64,
    pub lambda_max: f64,
    pub form_norm: f64,
    pub slow_bound: f64,
    pub scale: Vec<f64>,
    pub smallness: SmallnessReport,
}

impl FrameSummary {
    fn new(frame: &NormalFrame) -> Self {
        Self {
            half_dim: frame.half_dim(),
            lambda: frame.lambda,
            lambda_max: frame.lambda_max,
            form_norm: frame.form_norm,
            slow_bound: slow_bound(frame),
            scale: frame.scale.iter().copied().collect(),
            smallness: check_smallness(frame),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub epsilon: f64,
    pub c: f64,
    pub big_r: f64,
    pub c2: f64,
    pub c3: f64,
    pub pass: bool,
}

/// Per-orbit acceptance: closure residual, index gap (when nondegenerate) and support.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitCheck {
    pub period: usize,
    pub minimal_period: usize,
    pub action: f64,
    pub mean_index: f64,
    pub cz: Option<i64>,
    pub residual_ok: bool,
    pub gap_ok: bool,
    pub confined: bool,
    pub z0: Vec<f64>,
}

impl OrbitCheck {
    pub fn passes(&self) -> bool {
        self.residual_ok && self.gap_ok && self.confined
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodSummary {
    pub period: usize,
    pub candidates: usize,
    pub simple: usize,
    pub passing: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowReport {
    pub plan: WindowPlan,
    /// Mean index of the fixed point the windows refer to.
    pub delta_h: Option<f64>,
    /// `Some(true)` when `m > n/|Δ|` and the two index windows are disjoint.
    pub windows_disjoint: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub stages: Vec<StageRecord>,
    pub frame: Option<FrameSummary>,
    pub profiles: Vec<ProfileSummary>,
    pub fixed_points: Vec<OrbitCheck>,
    pub periods: Vec<PeriodSummary>,
    /// Prime minimal periods with at least one simple orbit passing every check.
    pub prime_periods_found: Vec<usize>,
    pub action_spectrum: Vec<(f64, usize)>,
    pub gap_radius: Option<f64>,
    pub window: Option<WindowReport>,
    pub seeds: usize,
    pub verified: bool,
    pub numerical_failure: bool,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub summary: Summary,
    pub orbits: Vec<PeriodicOrbit>,
    pub qtilde_rows: Vec<CheckRow>,
    pub maxp_rows: Vec<CheckRow>,
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn check_orbit(h: &HamiltonianSystem, o: &PeriodicOrbit, tol: f64) -> OrbitCheck {
    OrbitCheck {
        period: o.period,
        minimal_period: o.minimal_period,
        action: o.action,
        mean_index: o.index.mean,
        cz: o.index.cz,
        residual_ok: o.residual < tol,
        // degenerate orbits carry no gap claim
        gap_ok: o.degenerate || o.index.gap_ok,
        confined: confined(h, o),
        z0: o.z0.iter().copied().collect(),
    }
}

fn row(check: &str, epsilon: f64, value: f64, bound: f64, margin: f64, pass: bool, witness: String) -> CheckRow {
    CheckRow {
        check: check.into(),
        epsilon,
        value,
        bound,
        margin,
        pass,
        witness,
    }
}

struct Stages {
    records: Vec<StageRecord>,
}

impl Stages {
    fn record(&mut self, name: &str, started: Instant, status: StageStatus, detail: impl Into<String>) {
        self.records.push(StageRecord {
            name: name.into(),
            status,
            detail: detail.into(),
            seconds: started.elapsed().as_secs_f64(),
        });
    }

    fn skip(&mut self, name: &str, why: &str) {
        self.records.push(StageRecord {
            name: name.into(),
            status: StageStatus::Skipped,
            detail: why.into(),
            seconds: 0.0,
        });
    }
}

pub fn frame_stage(cfg: &ExperimentConfig) -> Result<(NormalFrame, NormalFrame)> {
    let raw = build_normal_form(&BlockSpec::new(cfg.blocks.clone())?)?;
    let scaled = rescale_to_small(&raw);
    Ok((raw, scaled))
}

pub fn system_stage(cfg: &ExperimentConfig, frame: &NormalFrame) -> Result<HamiltonianSystem> {
    HamiltonianSystem::new(frame.clone(), cfg.kappa, cfg.bumps.clone(), cfg.support_radius)
}

/// `Q̃` construction and verification for every configured `ε`.
pub fn qtilde_stage(cfg: &ExperimentConfig, h: &HamiltonianSystem) -> Result<(Vec<ProfileSummary>, Vec<CheckRow>)> {
    let mut summaries = Vec::new();
    let mut rows = Vec::new();
    for (i, &eps) in cfg.epsilon.iter().enumerate() {
        let p = build_profile(h, eps)?;
        let rep = verify_profile(&p, cfg.samples, cfg.rng_seed.wrapping_add(i as u64));
        summaries.push(ProfileSummary {
            epsilon: eps,
            c: p.c,
            big_r: p.big_r,
            c2: p.c2,
            c3: p.c3,
            pass: rep.pass(),
        });
        rows.extend(rep.rows);
    }
    Ok((summaries, rows))
}

/// Subharmonicity of linear Floer solutions, slow-homotopy audits and optional shift checks.
pub fn maxprinciple_stage(cfg: &ExperimentConfig, h: &HamiltonianSystem) -> Result<Vec<CheckRow>> {
    let frame = &h.frame;
    let grid = CylinderGrid::square(cfg.grid);
    let mut rows = Vec::new();
    for k in -cfg.floer_modes..=cfg.floer_modes {
        for j in 0..frame.dim() {
            let field = make_linear_floer_solution(frame, k, j, grid)?;
            let rep = subharmonicity_check(&field, frame)?;
            rows.push(row(
                &format!("subharmonic_k{k}_j{j}"),
                f64::NAN,
                rep.min_margin,
                -rep.tolerance,
                rep.min_margin + rep.tolerance,
                rep.pass(),
                format!("argmax ({}, {}) boundary {}", rep.argmax.0, rep.argmax.1, rep.argmax_on_boundary),
            ));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed ^ 0x5eed);
    let mut points: Vec<DVector<f64>> = extremal_directions(frame);
    points.extend((0..2000).map(|_| crate::taming::unit(&mut rng, frame.dim())));
    for &eps in &cfg.epsilon {
        let prof = HomotopyProfile::linear(cfg.kappa, eps * cfg.kappa, 0.0, 1.0, 201)?;
        let slow = reparametrize_to_slow(&prof, frame);
        let audit = slow_inequality_audit(frame, &slow, &points);
        rows.push(row(
            "slow_reparametrization",
            eps,
            slow.rate(),
            slow_bound(frame),
            slow_bound(frame) - slow.rate(),
            is_slow(&slow, frame),
            format!("stretch to length {}", slow.s[slow.s.len() - 1] - slow.s[0]),
        ));
        rows.push(row(
            "slow_pointwise_inequality",
            eps,
            audit.min_margin,
            0.0,
            audit.min_margin,
            audit.holds(),
            audit
                .witness
                .map(|(s, u)| format!("s = {s:.4} u = {u:?}"))
                .unwrap_or_default(),
        ));
    }
    if !cfg.shift_pairs.is_empty() {
        let smallest = cfg.epsilon.iter().copied().fold(1.0, f64::min);
        for &(k, l) in &cfg.shift_pairs {
            let eps = smallest.min(max_shift_epsilon(frame, cfg.kappa, k + l));
            let tamed = Tamed::new(h, eps)?;
            let rep = shift_bound_check(&tamed, k, l, &ShiftOptions::default())?;
            rows.push(row(
                &format!("shift_k{k}_l{l}"),
                eps,
                rep.raw,
                rep.bound,
                rep.bound - rep.raw,
                rep.pass(),
                format!("radius {:.4} spacing {:.4}", rep.radius, rep.grid_spacing),
            ));
        }
    }
    Ok(rows)
}

pub struct OrbitStage {
    pub fixed: Vec<PeriodicOrbit>,
    pub simple: Vec<PeriodicOrbit>,
    pub periods: Vec<PeriodSummary>,
    pub seeds: usize,
}

pub fn orbit_stage(cfg: &ExperimentConfig, h: &HamiltonianSystem) -> Result<OrbitStage> {
    let opts = HuntOptions {
        orbit: OrbitOptions {
            integrator: cfg.integrator(),
            escape_radius: 10.0 * cfg.support_radius,
            ..OrbitOptions::default()
        },
        candidates: cfg.candidates,
        ..HuntOptions::default()
    };
    let center = vec![0.0; h.frame.dim()];
    let grid = grid_seeds(&center, cfg.support_radius, cfg.seed_density);
    let fixed = find_fixed_points(h, &grid, &opts.orbit)?;
    let mut seeds = island_seeds(&fixed, cfg.island.fraction, cfg.island.rays, cfg.island.rings);
    seeds.extend(grid);
    let periods: Vec<usize> = cfg.resolved_periods().into_iter().filter(|&p| p > 1).collect();
    let hunts = hunt(h, &periods, &seeds, &opts)?;
    let mut simple = Vec::new();
    let mut summaries = Vec::new();
    for ph in hunts {
        let passing = ph
            .simple
            .iter()
            .filter(|o| check_orbit(h, o, opts.orbit.closure_tol).passes())
            .count();
        summaries.push(PeriodSummary {
            period: ph.period,
            candidates: ph.candidates,
            simple: ph.simple.len(),
            passing,
        });
        simple.extend(ph.simple);
    }
    Ok(OrbitStage {
        fixed,
        simple,
        periods: summaries,
        seeds: seeds.len(),
    })
}

/// Chooses `m > n/|Δ|` from the fixed point with the largest non-integer `|Δ|`.
pub fn window_stage(
    cfg: &ExperimentConfig,
    a: f64,
    c3: f64,
    fixed: &[PeriodicOrbit],
    n: usize,
) -> Result<WindowReport> {
    let delta_h = fixed
        .iter()
        .map(|o| o.index.mean)
        .filter(|d| d.is_finite() && d.abs() > 1e-9)
        .fold(None, |best: Option<f64>, d| match best {
            Some(b) if b.abs() >= d.abs() => Some(b),
            _ => Some(d),
        });
    let m = cfg
        .window_m
        .or_else(|| delta_h.map(|d| (n as f64 / d.abs()).floor() as usize + 1))
        .unwrap_or(1);
    let mut plan = plan_window(a, c3, m, cfg.prime_floor)?;
    let mut disjoint = None;
    if let Some(d) = delta_h {
        plan = plan.with_index_windows(d, n);
        if m as f64 > n as f64 / d.abs() {
            let (w0, w1) = plan.index_windows.expect("attached");
            disjoint = Some(w0.disjoint(&w1));
        }
    }
    Ok(WindowReport {
        plan,
        delta_h,
        windows_disjoint: disjoint,
    })
}

/// Runs every stage; failures are recorded and dependent stages skipped.
pub fn run(cfg: &ExperimentConfig) -> RunReport {
    let mut st = Stages { records: Vec::new() };
    let mut summary = Summary {
        config: cfg.clone(),
        stages: Vec::new(),
        frame: None,
        profiles: Vec::new(),
        fixed_points: Vec::new(),
        periods: Vec::new(),
        prime_periods_found: Vec::new(),
        action_spectrum: Vec::new(),
        gap_radius: None,
        window: None,
        seeds: 0,
        verified: false,
        numerical_failure: false,
    };
    let mut orbits = Vec::new();
    let mut qtilde_rows = Vec::new();
    let mut maxp_rows = Vec::new();

    let t = Instant::now();
    let frame = match frame_stage(cfg) {
        Ok((raw, scaled)) => {
            let rep = check_smallness(&scaled);
            let status = if rep.all() { StageStatus::Ok } else { StageStatus::Failed };
            st.record("normal_form", t, StageStatus::Ok, format!("n = {}", raw.half_dim()));
            st.record("rescale", t, status, format!("smallness margin {:.3e}", rep.margin()));
            summary.frame = Some(FrameSummary::new(&scaled));
            Some(scaled)
        }
        Err(e) => {
            st.record("normal_form", t, StageStatus::Error, e.to_string());
            st.skip("rescale", "no frame");
            None
        }
    };

    let t = Instant::now();
    let system = match frame.as_ref().map(|f| system_stage(cfg, f)) {
        Some(Ok(h)) => {
            st.record("system", t, StageStatus::Ok, format!("{} bumps", h.bumps.len()));
            Some(h)
        }
        Some(Err(e)) => {
            st.record("system", t, StageStatus::Error, e.to_string());
            None
        }
        None => {
            st.skip("system", "no frame");
            None
        }
    };

    let mut smallest_c3 = None;
    match &system {
        Some(h) => {
            let t = Instant::now();
            match qtilde_stage(cfg, h) {
                Ok((profiles, rows)) => {
                    let pass = profiles.iter().all(|p| p.pass);
                    smallest_c3 = profiles
                        .iter()
                        .min_by(|a, b| a.epsilon.total_cmp(&b.epsilon))
                        .map(|p| p.c3);
                    st.record(
                        "qtilde",
                        t,
                        if pass { StageStatus::Ok } else { StageStatus::Failed },
                        format!("{} rows", rows.len()),
                    );
                    summary.profiles = profiles;
                    qtilde_rows = rows;
                }
                Err(e) => st.record("qtilde", t, StageStatus::Error, e.to_string()),
            }
            let t = Instant::now();
            match maxprinciple_stage(cfg, h) {
                Ok(rows) => {
                    let pass = rows.iter().all(|r| r.pass);
                    st.record(
                        "maxprinciple",
                        t,
                        if pass { StageStatus::Ok } else { StageStatus::Failed },
                        format!("{} rows", rows.len()),
                    );
                    maxp_rows = rows;
                }
                Err(e) => st.record("maxprinciple", t, StageStatus::Error, e.to_string()),
            }
        }
        None => {
            st.skip("qtilde", "no system");
            st.skip("maxprinciple", "no system");
        }
    }

    let mut fixed = Vec::new();
    match &system {
        Some(h) => {
            let t = Instant::now();
            match orbit_stage(cfg, h) {
                Ok(o) => {
                    let tol = OrbitOptions::default().closure_tol;
                    summary.fixed_points = o.fixed.iter().map(|x| check_orbit(h, x, tol)).collect();
                    summary.periods = o.periods;
                    summary.seeds = o.seeds;
                    let mut primes: BTreeSet<usize> = BTreeSet::new();
                    for x in &o.simple {
                        if is_prime(x.minimal_period) && check_orbit(h, x, tol).passes() {
                            primes.insert(x.minimal_period);
                        }
                    }
                    summary.prime_periods_found = primes.into_iter().collect();
                    st.record(
                        "orbits",
                        t,
                        StageStatus::Ok,
                        format!(
                            "{} fixed points, {} simple orbits, prime periods {:?}",
                            o.fixed.len(),
                            o.simple.len(),
                            summary.prime_periods_found
                        ),
                    );
                    let t = Instant::now();
                    let all_ok = summary.fixed_points.iter().all(|c| c.passes())
                        && o.simple.iter().all(|x| check_orbit(h, x, tol).passes());
                    st.record(
                        "indices",
                        t,
                        if all_ok { StageStatus::Ok } else { StageStatus::Failed },
                        "residual, index gap and support checks".to_string(),
                    );
                    fixed = o.fixed.clone();
                    orbits = o.fixed;
                    orbits.extend(o.simple);
                }
                Err(e) => {
                    st.record("orbits", t, StageStatus::Error, e.to_string());
                    st.skip("indices", "no orbits");
                }
            }
        }
        None => {
            st.skip("orbits", "no system");
            st.skip("indices", "no system");
        }
    }

    let t = Instant::now();
    if !fixed.is_empty() {
        let spec = action_spectrum(&fixed, 1e-9);
        summary.action_spectrum = spec.values.clone();
        summary.gap_radius = spec.gap_radius.is_finite().then_some(spec.gap_radius);
    }
    match (summary.gap_radius, smallest_c3, &system) {
        (Some(a), Some(c3), Some(h)) => match window_stage(cfg, a, c3, &fixed, h.frame.half_dim()) {
            Ok(w) => {
                let ok = w.plan.holds() && w.windows_disjoint != Some(false);
                st.record(
                    "plan",
                    t,
                    if ok { StageStatus::Ok } else { StageStatus::Failed },
                    format!("p_i = {}, p_(i+m) = {}", w.plan.p_first(), w.plan.p_last()),
                );
                summary.window = Some(w);
            }
            Err(e) => st.record("plan", t, StageStatus::Error, e.to_string()),
        },
        (None, _, Some(_)) if !fixed.is_empty() => {
            st.skip("plan", "action spectrum has no nonzero value; every window is trivial")
        }
        _ => st.skip("plan", "needs fixed points and a taming profile"),
    }

    summary.numerical_failure = st.records.iter().any(|r| r.status == StageStatus::Error);
    summary.verified = !summary.numerical_failure && st.records.iter().all(|r| r.status != StageStatus::Failed);
    summary.stages = st.records;
    RunReport {
        summary,
        orbits,
        qtilde_rows,
        maxp_rows,
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let f = fs::File::create(path).map_err(io)?;
    serde_json::to_writer_pretty(f, value).map_err(|e| Error::Io(e.to_string()))
}

pub fn write_csv_file(path: &Path, f: impl FnOnce(fs::File) -> Result<()>) -> Result<()> {
    f(fs::File::create(path).map_err(io)?)
}

impl RunReport {
    /// Writes summary.json, orbits.csv, qtilde_report.csv, maxp_report.csv and windows.json.
    pub fn write_bundle(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(io)?;
        write_json(&self.summary, &dir.join("summary.json"))?;
        write_csv_file(&dir.join("orbits.csv"), |f| write_orbits_csv(&self.orbits, f))?;
        write_csv_file(&dir.join("qtilde_report.csv"), |f| write_rows(&self.qtilde_rows, f))?;
        write_csv_file(&dir.join("maxp_report.csv"), |f| write_rows(&self.maxp_rows, f))?;
        write_json(&self.summary.window, &dir.join("windows.json"))
    }
}
