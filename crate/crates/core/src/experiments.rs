//! Named experiment recipes: each registry entry binds initial data, the
//! solver or the exact free propagator, and the integral functionals into a
//! reproducible report with pass/fail verdicts and metric series.
//!
//! Tolerances are pinned here as constants; they were calibrated once against
//! the exact three-dimensional free propagator at the default resolution
//! envelope and are not configurable at run time.

use crate::config::RunConfig;
use crate::free_wave::{self, DalembertOracle, ModeState};
use crate::functionals::{
    self, DensityKind, LocalizedAccumulator, MorawetzLedger, Trapezoid, VirialLedger,
};
use crate::grid::{FieldState, RadialGrid};
use crate::initial_data::{self, DataMode, InitialData, ThresholdVerdict};
use crate::report::ExperimentReport;
use crate::solver::{self, Observer, SolverConfig, Trajectory};
use crate::weights::{self, CutoffFamily, RadialWeight};
use crate::{NlwError, Result};
use std::time::Instant;

/// All runnable experiment names, in registry order.
pub const REGISTRY: [&str; 11] = [
    "energy_conservation",
    "morawetz_identity",
    "localized_limits",
    "equipartition",
    "free_asymptotics",
    "flux_pairing_limits",
    "l2star_decay",
    "no_rate_scaling",
    "kenig_merle_dichotomy",
    "scattering_profile",
    "convergence_study",
];

// --- pinned verdict tolerances -------------------------------------------
/// max relative energy drift along a completed run
const DRIFT_TOL: f64 = 1e-4;
/// relative residual of the finite-horizon multiplier identities
const RESIDUAL_TOL: f64 = 1e-3;
/// minimum observed convergence order of the identity residual
const REFINEMENT_ORDER_MIN: f64 = 1.8;
/// boundary-sum limit, free data (exact propagator)
const BOUNDARY_FREE_TOL: f64 = 0.05;
/// boundary-sum limit, nonlinear small-data runs
const BOUNDARY_NONLINEAR_TOL: f64 = 0.08;
/// localized radial-gradient space-time energy vs the conserved energy
const RADIAL_LIMIT_TOL: f64 = 0.05;
/// decay ratio demanded of the vanishing localized quantities
const LOCALIZED_DECAY_RATIO: f64 = 0.25;
/// localized equipartition defect relative to the energy
const DEFECT_TOL: f64 = 0.05;
/// localized factor-2 identity tolerance
const FACTOR2_TOL: f64 = 0.08;
/// post-sharp-propagation exactness threshold (relative to the energy)
const HUYGENS_TOL: f64 = 1e-6;
/// interior-cone energy threshold (relative to the energy)
const CONE_TOL: f64 = 1e-10;
/// cap on `T^2 * outgoing component / energy` for compact free data
const OUTGOING_RATE_CAP: f64 = 20.0;
/// admissible log-log slope window for the outgoing-component norm
const OUTGOING_SLOPE_RANGE: (f64, f64) = (-1.3, -0.7);
/// relative wobble allowed in the (conserved) incoming component
const INCOMING_FLAT_TOL: f64 = 0.1;
/// admissible log-log slope window for the critical Lebesgue norm
const L6_SLOPE_RANGE: (f64, f64) = (-0.767, -0.567);
/// deviation of the scaling-invariance ratios from one
const SCALING_TOL: f64 = 0.01;
/// relative mismatch of the ground state's two stationary integrals
const POHOZAEV_TOL: f64 = 1e-2;
/// sup-norm bound certifying the subthreshold run as bounded
const SUP_BOUND: f64 = 2.0;
/// flux limit tolerance on exact free states
const FLUX_FREE_TOL: f64 = 0.05;
/// flux limit tolerance on nonlinear runs
const FLUX_NONLINEAR_TOL: f64 = 0.08;
/// bound on the late-time displacement-velocity pairing (relative)
const PAIRING_TOL: f64 = 0.02;
/// admissible fitted order window for the solver against the exact propagator
const SOLVER_ORDER_RANGE: (f64, f64) = (1.8, 2.2);
/// relative energy-norm gap to the extracted free profile at the horizon
const SCATTER_FINAL_TOL: f64 = 0.05;
/// decay demanded of the tangential mode energy in a fixed ball
const TANGENTIAL_DECAY_TOL: f64 = 0.05;
/// time step for quadrature along exact free trajectories
const ORACLE_DT: f64 = 0.1;

/// Run one named experiment. Unknown names produce the registry-listing
/// error; a blow-up inside any experiment other than the dichotomy yields a
/// failed verdict with the blow-up time attached to the report.
pub fn run(name: &str, cfg: &RunConfig) -> Result<ExperimentReport> {
    let mut cfg = cfg.clone();
    cfg.experiment = name.into();
    cfg.validate()?;
    let start = Instant::now();
    let mut report = match name {
        "energy_conservation" => energy_conservation(&cfg)?,
        "morawetz_identity" => morawetz_identity(&cfg)?,
        "localized_limits" => localized_limits(&cfg)?,
        "equipartition" => equipartition(&cfg)?,
        "free_asymptotics" => free_asymptotics(&cfg)?,
        "flux_pairing_limits" => flux_pairing_limits(&cfg)?,
        "l2star_decay" => l2star_decay(&cfg)?,
        "no_rate_scaling" => no_rate_scaling(&cfg)?,
        "kenig_merle_dichotomy" => kenig_merle_dichotomy(&cfg)?,
        "scattering_profile" => scattering_profile(&cfg)?,
        "convergence_study" => convergence_study(&cfg)?,
        other => {
            return Err(NlwError::UnknownExperiment {
                name: other.into(),
                valid: REGISTRY.join(", "),
            })
        }
    };
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

// --- shared plumbing ------------------------------------------------------

fn build_grid(cfg: &RunConfig) -> Result<RadialGrid> {
    RadialGrid::new(cfg.n_dim, cfg.dr, cfg.r_max)
}

fn data_mode(cfg: &RunConfig) -> DataMode {
    if cfg.data_mode == "velocity" {
        DataMode::Velocity
    } else {
        DataMode::Displacement
    }
}

fn make_data(grid: &RadialGrid, cfg: &RunConfig) -> Result<InitialData> {
    match cfg.data.as_str() {
        "compact" => {
            initial_data::compact_bump(grid, cfg.data_width, cfg.data_amplitude, data_mode(cfg))
        }
        "gaussian" => {
            initial_data::gaussian_bump(grid, cfg.data_amplitude, cfg.data_width, data_mode(cfg))
        }
        "ground_state" => Ok(initial_data::scaled_ground_state(grid, cfg.data_amplitude)),
        other => Err(NlwError::Config(format!(
            "unknown data generator {other:?}"
        ))),
    }
}

/// Compactly supported data regardless of the configured generator; the
/// exact free propagator needs a support radius to be applicable at all times.
fn compact_data(grid: &RadialGrid, cfg: &RunConfig) -> Result<InitialData> {
    initial_data::compact_bump(grid, cfg.data_width, cfg.data_amplitude, data_mode(cfg))
}

fn solver_cfg(cfg: &RunConfig, lambda: f64) -> SolverConfig {
    SolverConfig {
        lambda,
        cfl: cfg.cfl(),
    }
}

fn lambda_tag(lambda: f64) -> &'static str {
    if lambda == 0.0 {
        "free"
    } else if lambda > 0.0 {
        "defocusing"
    } else {
        "focusing"
    }
}

/// Record a failed completion verdict (with the blow-up time) if the
/// trajectory stopped early; returns whether the run completed.
fn completed(report: &mut ExperimentReport, label: &str, traj: &Trajectory) -> bool {
    if let Some(b) = &traj.blowup {
        report.blowup_time = Some(b.t);
        report.check_that(&format!("{label}_completed"), false, b.t);
        false
    } else {
        true
    }
}

/// Observer recording `f(state)` every `stride`-th observed state.
struct StrideSampler<F: FnMut(&RadialGrid, &FieldState) -> f64> {
    stride: u32,
    count: u32,
    f: F,
    out: Vec<(f64, f64)>,
}

impl<F: FnMut(&RadialGrid, &FieldState) -> f64> StrideSampler<F> {
    fn new(stride: u32, f: F) -> Self {
        StrideSampler {
            stride: stride.max(1),
            count: 0,
            f,
            out: Vec::new(),
        }
    }
}

impl<F: FnMut(&RadialGrid, &FieldState) -> f64> Observer for StrideSampler<F> {
    fn observe(&mut self, grid: &RadialGrid, state: &FieldState) {
        if self.count.is_multiple_of(self.stride) {
            let v = (self.f)(grid, state);
            self.out.push((state.t, v));
        }
        self.count += 1;
    }
}

/// Observer recording `f(state)` at the first observed state reaching each
/// target time (targets must be increasing).
struct TimedSampler<F: FnMut(&RadialGrid, &FieldState) -> f64> {
    targets: Vec<f64>,
    next: usize,
    f: F,
    out: Vec<(f64, f64)>,
}

impl<F: FnMut(&RadialGrid, &FieldState) -> f64> TimedSampler<F> {
    fn new(targets: Vec<f64>, f: F) -> Self {
        TimedSampler {
            targets,
            next: 0,
            f,
            out: Vec::new(),
        }
    }
}

impl<F: FnMut(&RadialGrid, &FieldState) -> f64> Observer for TimedSampler<F> {
    fn observe(&mut self, grid: &RadialGrid, state: &FieldState) {
        while self.next < self.targets.len() && state.t >= self.targets[self.next] - 1e-9 {
            let v = (self.f)(grid, state);
            self.out.push((self.targets[self.next], v));
            self.next += 1;
        }
    }
}

/// Observer cloning the state at the first observed time reaching each target.
struct StateCapture {
    targets: Vec<f64>,
    next: usize,
    states: Vec<FieldState>,
}

impl StateCapture {
    fn new(targets: Vec<f64>) -> Self {
        StateCapture {
            targets,
            next: 0,
            states: Vec::new(),
        }
    }
}

impl Observer for StateCapture {
    fn observe(&mut self, _grid: &RadialGrid, state: &FieldState) {
        while self.next < self.targets.len() && state.t >= self.targets[self.next] - 1e-9 {
            self.states.push(state.clone());
            self.next += 1;
        }
    }
}

/// Least-squares slope of `ln y` against `ln x`.
fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    num / den
}

/// True when the points approach `target` monotonically (in absolute gap).
fn monotone_approach(points: &[(f64, f64)], target: f64) -> bool {
    points
        .windows(2)
        .all(|w| (w[1].1 - target).abs() <= (w[0].1 - target).abs() + 1e-9)
}

/// Four increasing horizons spanning `(0, t_max]`.
fn horizon_schedule(t_max: f64) -> Vec<f64> {
    [0.2, 0.4, 0.6, 1.0].iter().map(|f| f * t_max).collect()
}

/// Outcome of one two-sided multiplier-identity run.
struct BalanceOutcome {
    lhs: f64,
    rhs: f64,
    /// normalization: conserved energy times the multiplier's slope at
    /// infinity (or the energy alone for decaying multipliers)
    scale: f64,
    /// boundary sums sampled at intermediate horizons
    trend: Vec<(f64, f64)>,
    blowup: Option<f64>,
}

impl BalanceOutcome {
    fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.scale
    }
}

/// Evolve two-sided and compare the accumulated interior space-time integral
/// of the gradient-multiplier identity with its two boundary terms.
fn morawetz_balance(
    grid: &RadialGrid,
    data: &InitialData,
    weight: &RadialWeight,
    lambda: f64,
    cfl: f64,
    t_final: f64,
    trend_times: &[f64],
) -> Result<BalanceOutcome> {
    let mut ledger_p = MorawetzLedger::new(grid, weight.clone(), lambda)?;
    let mut ledger_m = ledger_p.clone();
    // boundary integrands are odd in the velocity, and the backward half-run
    // presents velocity-negated states, so sampling with forward sign on both
    // halves yields the two true boundary terms
    let bl = ledger_p.clone();
    let mut sampler_p = TimedSampler::new(trend_times.to_vec(), move |g, s| bl.boundary(g, s, 1.0));
    let bl = ledger_p.clone();
    let mut sampler_m = TimedSampler::new(trend_times.to_vec(), move |g, s| bl.boundary(g, s, 1.0));
    let scfg = SolverConfig { lambda, cfl };
    let run = solver::evolve_two_sided(
        grid,
        data,
        &scfg,
        t_final,
        &mut [&mut ledger_p, &mut sampler_p],
        &mut [&mut ledger_m, &mut sampler_m],
    )?;
    let blowup = run
        .plus
        .blowup
        .as_ref()
        .or(run.minus.blowup.as_ref())
        .map(|b| b.t);
    let e0 = functionals::energy(grid, &data.state(), lambda).total;
    let d1_inf = weight.d1_at_infinity.abs().max(1.0);
    let trend = sampler_p
        .out
        .iter()
        .zip(sampler_m.out.iter())
        .map(|(a, b)| (a.0, a.1 + b.1))
        .collect();
    Ok(BalanceOutcome {
        lhs: ledger_p.lhs_accumulated() + ledger_m.lhs_accumulated(),
        rhs: ledger_p.boundary(grid, &run.plus.final_state, 1.0)
            + ledger_p.boundary(grid, &run.minus.final_state, -1.0),
        scale: (e0.abs() * d1_inf).max(1e-12),
        trend,
        blowup,
    })
}

// --- registry entries -----------------------------------------------------

fn energy_conservation(cfg: &RunConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("energy_conservation", cfg);
    report.claim(
        "the total energy (kinetic + gradient + potential) of the evolved field \
         is constant in time for the free, defocusing and focusing equations",
    );
    let grid = build_grid(cfg)?;
    for lambda in [0.0, 1.0, -1.0] {
        let tag = lambda_tag(lambda);
        let data = make_data(&grid, cfg)?;
        // reference energy is the first observed state (which carries the
        // integrator's half-kick stamp), so the comparison is conserved-form
        // against conserved-form
        let mut samples = StrideSampler::new(cfg.stride, move |g, s| {
            functionals::energy(g, s, lambda).total
        });
        let traj = solver::evolve(
            &grid,
            &data,
            &solver_cfg(cfg, lambda),
            cfg.t_max,
            &mut [&mut samples],
        )?;
        let e0 = samples.out.first().map_or(0.0, |p| p.1);
        let scale = e0.abs().max(1e-12);
        let final_drift =
            (functionals::energy(&grid, &traj.final_state, lambda).total - e0).abs() / scale;
        let series: Vec<(f64, f64)> = samples
            .out
            .iter()
            .map(|&(t, e)| (t, (e - e0).abs() / scale))
            .collect();
        let max_drift = series.iter().map(|p| p.1).fold(final_drift, f64::max);
        report.metric(&format!("drift_{tag}"), series);
        if completed(&mut report, tag, &traj) {
            report.check_below(&format!("drift_{tag}_max"), max_drift, DRIFT_TOL);
        }
    }
    Ok(report)
}

fn morawetz_identity(cfg: &RunConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("morawetz_identity", cfg);
    report.claim(
        "over any finite symmetric time window, the space-time integral of the \
         gradient-multiplier density equals the two boundary terms of the window",
    );
    report.claim(
        "as the window grows, the boundary sum approaches the multiplier's slope \
         at infinity times the conserved energy",
    );
    let grid = build_grid(cfg)?;
    let data = make_data(&grid, cfg)?;
    let horizons = horizon_schedule(cfg.t_max);
    let bracket = weights::weight_bracket(cfg.n_dim)?;
    let fam = CutoffFamily::new(cfg.weight_k)?;
    let cutoff = weights::rescale_morawetz(&fam, cfg.weight_radius, cfg.n_dim)?;

    for (wname, weight) in [("bracket", &bracket), ("cutoff", &cutoff)] {
        for lambda in [0.0, 1.0, -1.0] {
            let tag = format!("{wname}_{}", lambda_tag(lambda));
            let out = morawetz_balance(
                &grid,
                &data,
                weight,
                lambda,
                cfg.cfl(),
                cfg.t_max,
                &horizons,
            )?;
            if let Some(t) = out.blowup {
                report.blowup_time = Some(t);
                report.check_that(&format!("{tag}_completed"), false, t);
                continue;
            }
            report.check_below(&format!("residual_{tag}"), out.residual(), RESIDUAL_TOL);
            if wname == "bracket" {
                // boundary-sum trend toward slope(inf) * energy
                let e0 = functionals::energy(&grid, &data.state(), lambda).total;
                let target = weight.d1_at_infinity * e0;
                let ratios: Vec<(f64, f64)> =
                    out.trend.iter().map(|(t, v)| (*t, v / target)).collect();
                report.metric(
                    &format!("boundary_ratio_{}", lambda_tag(lambda)),
                    ratios.clone(),
                );
                if lambda != 0.0 {
                    if let Some(last) = ratios.last() {
                        report.check_below(
                            &format!("boundary_limit_{}", lambda_tag(lambda)),
                            (last.1 - 1.0).abs(),
                            BOUNDARY_NONLINEAR_TOL,
                        );
                    }
                    report.check_that(
                        &format!("boundary_monotone_{}", lambda_tag(lambda)),
                        monotone_approach(&ratios, 1.0),
                        ratios.last().map(|p| p.1).unwrap_or(f64::NAN),
                    );
                }
            }
        }
    }

    // free boundary-sum trend measured on the exact propagator (pure-mode
    // data are time symmetric, so both boundary terms coincide)
    if cfg.n_dim == 3 {
        let free_data = compact_data(&grid, cfg)?;
        let oracle = DalembertOracle::from_data(&grid, &free_data)?;
        let ledger = MorawetzLedger::new(&grid, bracket.clone(), 0.0)?;
        let e0 = functionals::energy(&grid, &free_data.state(), 0.0).total;
        let target = bracket.d1_at_infinity * e0;
        let mut ratios = Vec::new();
        for &t in &horizons {
            if t + cfg.data_width >= grid.r_max {
                break;
            }
            let state = oracle.state(&grid, t)?;
            ratios.push((t, 2.0 * ledger.boundary(&grid, &state, 1.0) / target));
        }
        report.metric("boundary_ratio_free_exact", ratios.clone());
        if let Some(last) = ratios.last() {
            report.check_below(
                "boundary_limit_free",
                (last.1 - 1.0).abs(),
                BOUNDARY_FREE_TOL,
            );
        }
        report.check_that(
            "boundary_monotone_free",
            monotone_approach(&ratios, 1.0),
            ratios.last().map(|p| p.1).unwrap_or(f64::NAN),
        );
    }

    // refinement study of the residual on a small dedicated domain
    let t_ref = cfg.t_max.min(5.0);
    let mut residuals = Vec::new();
    for dr in [2.0 * cfg.dr, cfg.dr] {
        let r_small = (cfg.data_width + t_ref + 2.0).max(20.0 * dr);
        let g = RadialGrid::new(cfg.n_dim, dr, r_small)?;
        let d = initial_data::compact_bump(&g, cfg.data_width, cfg.data_amplitude, data_mode(cfg))?;
        let out = morawetz_balance(&g, &d, &bracket, 1.0, cfg.cfl(), t_ref, &[])?;
        residuals.push((dr, out.residual()));
    }
    report.metric("residual_vs_dr", residuals.clone());
    let order = (residuals[0].1 / residuals[1].1).log2();
    report.check_above("refinement_order", order, REFINEMENT_ORDER_MIN);
    Ok(report)
}

fn localized_limits(cfg: &RunConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("localized_limits", cfg);
    report.claim(
        "the ball-localized space-time average of the squared radial derivative \
         of a free wave converges to the conserved energy as the ball grows",
    );
    report.claim(
        "the corresponding averages of the critical power and of the tangential \
         mode energy vanish in the same limit",
    );
    let grid = build_grid(cfg)?;
    let data = compact_data(&grid, cfg)?;
    let oracle = DalembertOracle::from_data(&grid, &data)?;
    let e0 = functionals::energy(&grid, &data.state(), 0.0).total;

    let mut radial_pts = Vec::new();
    let mut l2star_pts = Vec::new();
    for &radius in &cfg.schedule_radii {
        let t_final = radius + cfg.t_margin;
        let mut rad = LocalizedAccumulator::new(&grid, DensityKind::RadialGrad, radius, 0.0)?;
        let mut l2s = LocalizedAccumulator::new(&grid, DensityKind::L2Star, radius, 0.0)?;
        let steps = (t_final / ORACLE_DT).ceil() as usize;
        for j in 0..=steps {
            let t = t_final * j as f64 / steps as f64;
            let state = oracle.state(&grid, t)?;
            rad.observe(&grid, &state);
            l2s.observe(&grid, &state);
        }
        // pure-mode data are time symmetric: double the one-sided integral
        radial_pts.push((radius, 2.0 * rad.value()));
        l2star_pts.push((radius, 2.0 * l2s.value()));
    }
    report.metric("radial_grad_localized", radial_pts.clone());
    report.metric("l2star_localized", l2star_pts.clone());
    let last = radial_pts.last().expect("schedule is nonempty");
    report.check_below(
        "radial_limit_matches_energy",
        (last.1 - e0).abs() / e0.max(1e-12),
        RADIAL_LIMIT_TOL,
    );
    let (first_l, last_l) = (l2star_pts[0].1, l2star_pts.last().unwrap().1);
    report.check_below(
        "l2star_localized_vanishes",
        last_l / first_l.max(1e-300),
        LOCALIZED_DECAY_RATIO,
    );

    // tangential part probed on the first nonradial linear mode
    let mut mode = ModeState::bump(&grid, 1, cfg.data_width, cfg.data_amplitude)?;
    let scfg0 = solver_cfg(cfg, 0.0);
    let t_last = cfg.schedule_radii.last().unwrap() + cfg.t_margin;
    let mut traps: Vec<Trapezoid> = cfg
        .schedule_radii
        .iter()
        .map(|_| Trapezoid::default())
        .collect();
    for (trap, &radius) in traps.iter_mut().zip(&cfg.schedule_radii) {
        trap.feed(
            0.0,
            free_wave::tangential_ball_energy(&grid, &mode, Some(radius)),
        );
    }
    let chunks = (t_last / ORACLE_DT).ceil() as usize;
    for j in 1..=chunks {
        let t = t_last * j as f64 / chunks as f64;
        mode = free_wave::evolve_mode(&grid, &mode, &scfg0, t - mode.t)?;
        for (trap, &radius) in traps.iter_mut().zip(&cfg.schedule_radii) {
            trap.feed(
                t,
                free_wave::tangential_ball_energy(&grid, &mode, Some(radius)),
            );
        }
    }
    let tang_pts: Vec<(f64, f64)> = traps
        .iter()
        .zip(&cfg.schedule_radii)
        .map(|(trap, &radius)| (radius, 2.0 * trap.acc / radius))
        .collect();
    report.metric("tangential_localized", tang_pts.clone());
    report.check_below(
        "tangential_localized_vanishes",
        tang_pts.last().unwrap().1 / tang_pts[0].1.max(1e-300),
        LOCALIZED_DECAY_RATIO,
    );
    Ok(report)
}

fn equipartition(cfg: &RunConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("equipartition", cfg);
    report.claim(
        "over any finite symmetric time window, the space-time integral of the \
         displacement-multiplier density equals its two boundary terms",
    );
    report.claim(
        "the ball-localized space-time average of kinetic minus gradient energy \
         vanishes as the ball grows, while the full space-time energy density \
         (plus the weighted critical term) averages to twice the conserved energy",
    );
    let grid = build_grid(cfg)?;
    let data = make_data(&grid, cfg)?;
    let lambda = cfg.lambda;
    let e0 = functionals::energy(&grid, &data.state(), lambda).total;
    let scale = e0.abs().max(1e-12);
    let radius = *cfg.schedule_radii.last().unwrap();
    let t_final = radius + cfg.t_margin;
    let fam = CutoffFamily::new(cfg.weight_k)?;
    let ts = functionals::two_star(cfg.n_dim);

    // displacement-multiplier ledger plus per-radius localized accumulators,
    // all attached to one two-sided run (every integrand is even in the
    // velocity, so the backward half-run feeds them correctly)
    let mut vledger_p = VirialLedger::new(
        &grid,
        weights::rescale_virial(&fam, radius, cfg.n_dim)?,
        lambda,
    )?;
    let mut vledger_m = vledger_p.clone();
    let mut defects: Vec<LocalizedAccumulator> = Vec::new();
    let mut spaces: Vec<LocalizedAccumulator> = Vec::new();
    let mut crits: Vec<LocalizedAccumulator> = Vec::new();
    for &r in &cfg.schedule_radii {
        // the defect density is kinetic minus gradient only
        defects.push(LocalizedAccumulator::new(
            &grid,
            DensityKind::Lagrangian,
            r,
            0.0,
        )?);
        spaces.push(LocalizedAccumulator::new(
            &grid,
            DensityKind::SpacetimeFull,
            r,
            lambda,
        )?);
        crits.push(LocalizedAccumulator::new(
            &grid,
            DensityKind::L2Star,
            r,
            lambda,
        )?);
    }
    let mut defects_m = defects.clone();
    let mut spaces_m = spaces.clone();
    let mut crits_m = crits.clone();

    let mut obs_p: Vec<&mut dyn Observer> = vec![&mut vledger_p];
    for a in defects
        .iter_mut()
        .chain(spaces.iter_mut())
        .chain(crits.iter_mut())
    {
        obs_p.push(a);
    }
    let mut obs_m: Vec<&mut dyn Observer> = vec![&mut vledger_m];
    for a in defects_m
        .iter_mut()
        .chain(spaces_m.iter_mut())
        .chain(crits_m.iter_mut())
    {
        obs_m.push(a);
    }
    let run = solver::evolve_two_sided(
        &grid,
        &data,
        &solver_cfg(cfg, lambda),
        t_final,
        &mut obs_p,
        &mut obs_m,
    )?;
    if !completed(&mut report, "forward", &run.plus)
        || !completed(&mut report, "backward", &run.minus)
    {
        return Ok(report);
    }

    let lhs = vledger_p.lhs_accumulated() + vledger_m.lhs_accumulated();
    let rhs = vledger_p.boundary(&grid, &run.plus.final_state, 1.0)
        + vledger_p.boundary(&grid, &run.minus.final_state, -1.0);
    report.check_below("virial_residual", (lhs - rhs).abs() / scale, RESIDUAL_TOL);

    let mut defect_pts = Vec::new();
    let mut factor2_pts = Vec::new();
    for i in 0..cfg.schedule_radii.len() {
        let r = cfg.schedule_radii[i];
        let defect = defects[i].value() + defects_m[i].value();
        let factor2 = spaces[i].value()
            + spaces_m[i].value()
            + (2.0 * lambda / ts) * (crits[i].value() + crits_m[i].value());
        defect_pts.push((r, defect.abs() / scale));
        factor2_pts.push((r, factor2 / (2.0 * e0)));
    }
    report.metric("defect_localized", defect_pts.clone());
    report.metric("factor2_ratio", factor2_pts.clone());
    report.check_below("defect_vanishes", defect_pts.last().unwrap().1, DEFECT_TOL);
    report.check_below(
        "factor2_identity",
        (factor2_pts.last().unwrap().1 - 1.0).abs(),
        FACTOR2_TOL,
    );
    Ok(report)
}

fn free_asymptotics(cfg: &RunConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("free_asymptotics", cfg);
    report.claim(
        "after the sharp-propagation time, a compactly supported free wave has \
         exactly equal kinetic and gradient energies, an outgoing component \
         decaying at the inverse-square rate, and no energy in the interior cone",
    );
    report.claim("the conformal-energy inequality chain holds at every sampled time");
    let grid = build_grid(cfg)?;
    let rho = cfg.data_width;
    let data = compact_data(&grid, cfg)?;
    let oracle = DalembertOracle::from_data(&grid, &data)?;
    let e0 = functionals::energy(&grid, &data.state(), 0.0).total;

    let times: Vec<f64> = [3.0, 5.0, 10.0, 20.0, 40.0]
        .into_iter()
        .filter(|&t| t <= cfg.t_max && t > 2.0 * rho + 0.5 && t + rho < grid.r_max)
        .collect();
    if times.len() < 2 {
        return Err(NlwError::InvalidParameter(
            "free_asymptotics needs at least two admissible sample times; \
             raise t_max or r_max"
                .into(),
        ));
    }

    let mut defect_pts = Vec::new();
    let mut outgoing_pts = Vec::new();
    let mut incoming_pts = Vec::new();
    let mut cone_pts = Vec::new();
    let mut chain_ok = true;
    let mut chain_margin: f64 = 0.0;
    let mut conformal_pts = Vec::new();
    for &t in &times {
        let state = oracle.state(&grid, t)?;
        let defect = functionals::equipartition_defect(&grid, &state).abs() / e0;
        let (outgoing, incoming) = functionals::wave_split(&grid, &state);
        let cone = functionals::energy_in_ball(&grid, &state, 0.0, Some(t / 2.0)).total / e0;
        let conf = functionals::conformal(&grid, &state, &data);
        chain_ok &= conf.chain_holds(1e-9 * conf.rhs_cap.max(1.0));
        chain_margin = chain_margin.max(conf.q / conf.rhs_cap.max(1e-300));
        defect_pts.push((t, defect));
        outgoing_pts.push((t, outgoing / e0));
        incoming_pts.push((t, incoming / e0));
        cone_pts.push((t, cone));
        conformal_pts.push((t, conf.q / conf.rhs_cap.max(1e-300)));
    }
    report.metric("defect_relative", defect_pts.clone());
    report.metric("outgoing_relative", outgoing_pts.clone());
    report.metric("incoming_relative", incoming_pts.clone());
    report.metric("interior_cone_relative", cone_pts.clone());
    report.metric("conformal_ratio", conformal_pts);

    let max_defect = defect_pts.iter().map(|p| p.1).fold(0.0, f64::max);
    report.check_below("defect_exact", max_defect, HUYGENS_TOL);
    let max_outgoing = outgoing_pts.iter().map(|p| p.1).fold(0.0, f64::max);
    report.check_below("outgoing_below_huygens_floor", max_outgoing, HUYGENS_TOL);
    let max_rate = outgoing_pts
        .iter()
        .map(|(t, v)| v * t * t)
        .fold(0.0, f64::max);
    report.check_below("outgoing_inverse_square_rate", max_rate, OUTGOING_RATE_CAP);
    let norm_pts: Vec<(f64, f64)> = outgoing_pts.iter().map(|(t, v)| (*t, v.sqrt())).collect();
    let slope = loglog_slope(&norm_pts);
    report.check_that(
        "outgoing_norm_slope",
        slope >= OUTGOING_SLOPE_RANGE.0 && slope <= OUTGOING_SLOPE_RANGE.1,
        slope,
    );
    let incoming_flat =
        (incoming_pts.last().unwrap().1 / incoming_pts[0].1.max(1e-300) - 1.0).abs();
    report.check_below("incoming_component_flat", incoming_flat, INCOMING_FLAT_TOL);
    let max_cone = cone_pts.iter().map(|p| p.1).fold(0.0, f64::max);
    report.check_below("interior_cone_empty", max_cone, CONE_TOL);
    report.check_that("conformal_chain", chain_ok, chain_margin);

    // tangential energy leaves any fixed ball
    let mode = ModeState::bump(&grid, 1, rho, cfg.data_amplitude)?;
    let ball = 4.0 * rho;
    let initial_tangential = free_wave::tangential_ball_energy(&grid, &mode, Some(ball));
    let evolved = free_wave::evolve_mode(&grid, &mode, &solver_cfg(cfg, 0.0), cfg.t_max)?;
    let late_tangential = free_wave::tangential_ball_energy(&grid, &evolved, Some(ball));
    report.check_below(
        "tangential_leaves_ball",
        late_tangential / initial_tangential.max(1e-300),
        TANGENTIAL_DECAY_TOL,
    );
    Ok(report)
}

fn flux_pairing_limits(cfg: &RunConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("flux_pairing_limits", cfg);
    report.claim(
        "along forward evolutions the radial flux tends to minus half the \
         multiplier slope at infinity times the energy, and the \
         displacement-velocity pairing against a decaying weight tends to zero",
    );
    let grid = build_grid(cfg)?;
    let data = compact_data(&grid, cfg)?;
    let bracket = weights::weight_bracket(cfg.n_dim)?;
    let fam = CutoffFamily::new(cfg.weight_k)?;
    let decaying = weights::rescale_virial(&fam, cfg.weight_radius, cfg.n_dim)?;
    let horizons = horizon_schedule(cfg.t_max);

    // exact free states
    let oracle = DalembertOracle::from_data(&grid, &data)?;
    let e_free = functionals::energy(&grid, &data.state(), 0.0).total;
    let target_free = -0.5 * bracket.d1_at_infinity * e_free;
    let mut flux_free = Vec::new();
    let mut pairing_free = Vec::new();
    for &t in &horizons {
        if t + cfg.data_width >= grid.r_max {
            break;
        }
        let state = oracle.state(&grid, t)?;
        flux_free.push((t, functionals::flux(&grid, &state, &bracket) / target_free));
        pairing_free.push((
            t,
            functionals::pairing(&grid, &state, &decaying)?.abs() / e_free,
        ));
    }
    report.metric("flux_ratio_free", flux_free.clone());
    report.metric("pairing_free", pairing_free.clone());
    let last = flux_free.last().expect("at least one admissible horizon");
    report.check_below("flux_limit_free", (last.1 - 1.0).abs(), FLUX_FREE_TOL);
    report.check_that(
        "flux_monotone_free",
        monotone_approach(&flux_free, 1.0),
        last.1,
    );
    report.check_below(
        "pairing_vanishes_free",
        pairing_free.last().unwrap().1,
        PAIRING_TOL,
    );

    // nonlinear forward run
    let lambda = if cfg.lambda != 0.0 { cfg.lambda } else { 1.0 };
    let e_nl = functionals::energy(&grid, &data.state(), lambda).total;
    let target_nl = -0.5 * bracket.d1_at_infinity * e_nl;
    let wb = bracket.clone();
    let mut flux_s = TimedSampler::new(horizons.clone(), move |g, s| {
        functionals::flux(g, s, &wb) / target_nl
    });
    let wd = decaying.clone();
    let mut pair_s = TimedSampler::new(horizons.clone(), move |g, s| {
        functionals::pairing(g, s, &wd)
            .expect("audited decaying weight")
            .abs()
            / e_nl.abs().max(1e-12)
    });
    let traj = solver::evolve(
        &grid,
        &data,
        &solver_cfg(cfg, lambda),
        cfg.t_max,
        &mut [&mut flux_s, &mut pair_s],
    )?;
    report.metric("flux_ratio_nonlinear", flux_s.out.clone());
    report.metric("pairing_nonlinear", pair_s.out.clone());
    if completed(&mut report, "nonlinear", &traj) {
        let last = flux_s.out.last().expect("sampled horizons");
        report.check_below(
            "flux_limit_nonlinear",
            (last.1 - 1.0).abs(),
            FLUX_NONLINEAR_TOL,
        );
        report.check_below(
            "pairing_vanishes_nonlinear",
            pair_s.out.last().unwrap().1,
            PAIRING_TOL,
        );
    }
    Ok(report)
}

fn l2star_decay(cfg: &RunConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("l2star_decay", cfg);
    report.claim(
        "the critical Lebesgue norm of a compactly supported free wave decays \
         to zero, with log-log slope -2/3 in three dimensions",
    );
    let grid = build_grid(cfg)?;
    let data = compact_data(&grid, cfg)?;
    let oracle = DalembertOracle::from_data(&grid, &data)?;
    let t_hi = (grid.r_max - cfg.data_width - 1.0).min(80.0);
    let t_lo = 10.0_f64.min(t_hi / 2.0);
    let samples = 9;
    let mut pts = Vec::new();
    for j in 0..samples {
        let t = t_lo * (t_hi / t_lo).powf(j as f64 / (samples - 1) as f64);
        let state = oracle.state(&grid, t)?;
        pts.push((t, functionals::l2star_norm(&grid, &state)));
    }
    report.metric("l2star_norm", pts.clone());
    let slope = loglog_slope(&pts);
    report.check_that(
        "decay_slope",
        slope >= L6_SLOPE_RANGE.0 && slope <= L6_SLOPE_RANGE.1,
        slope,
    );
    report.check_that(
        "monotone_decay",
        pts.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12),
        pts.last().unwrap().1,
    );
    Ok(report)
}

fn no_rate_scaling(cfg: &RunConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("no_rate_scaling", cfg);
    report.claim(
        "the critical Lebesgue norm of the free evolution is invariant under \
         the mass-preserving rescaling of velocity data evaluated at the \
         rescaled time, so the decay admits no uniform rate",
    );
    if cfg.n_dim != 3 {
        return Err(NlwError::InvalidParameter(
            "the scaling experiment uses the three-dimensional exact propagator".into(),
        ));
    }
    let amp = cfg.data_amplitude;
    let width = cfg.data_width;
    let dr = cfg.dr;
    // norm of the free wave from velocity data eps^{3/2} h(eps r) at t = 1/eps
    let norm_at = |eps: f64| -> Result<f64> {
        let support = 7.0 * width / eps;
        let t = 1.0 / eps;
        let grid = RadialGrid::new(3, dr, support + t + 2.0)?;
        let g = move |r: f64| amp * eps.powf(1.5) * (-(eps * r / width).powi(2)).exp();
        let g_d1 = move |r: f64| g(r) * (-2.0 * eps * eps * r / (width * width));
        let oracle = DalembertOracle::from_profiles(
            |_| 0.0,
            |_| 0.0,
            |_| 0.0,
            g,
            g_d1,
            Some(support),
            support + t + 4.0,
        )?;
        Ok(functionals::l2star_norm(&grid, &oracle.state(&grid, t)?))
    };
    let baseline = norm_at(1.0)?;
    let mut pts = vec![(1.0, 1.0)];
    for eps in [0.5, 0.25] {
        let ratio = norm_at(eps)? / baseline;
        pts.push((eps, ratio));
        report.check_below(
            &format!("scaling_invariance_eps_{}", (1.0 / eps) as u32),
            (ratio - 1.0).abs(),
            SCALING_TOL,
        );
    }
    report.metric("norm_ratio", pts);
    Ok(report)
}

fn kenig_merle_dichotomy(cfg: &RunConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("kenig_merle_dichotomy", cfg);
    report.claim(
        "scaling the static focusing profile below the threshold yields a run \
         that stays bounded; scaling above it yields finite-time blow-up, and \
         the static threshold conditions predict each outcome",
    );
    // static checks need a long tail: the profile decays only like 1/r
    let static_grid = RadialGrid::new(cfg.n_dim, cfg.dr, cfg.r_max.max(400.0))?;
    let w = initial_data::ground_state(&static_grid);
    let wr = initial_data::ground_state_d1(&static_grid);
    let ts = functionals::two_star(cfg.n_dim);
    let gradsq = static_grid.integrate_ball(&wr.map(|v| v * v), None);
    let crit = static_grid.integrate_ball(&w.map(|v| crate::pow_abs(v, ts)), None);
    report.check_below(
        "stationary_integral_identity",
        (gradsq - crit).abs() / gradsq,
        POHOZAEV_TOL,
    );

    let grid = build_grid(cfg)?;
    for (alpha, expect_blowup) in [(0.9, false), (1.1, true)] {
        let tag = format!("alpha_{}", if alpha < 1.0 { "09" } else { "11" });
        let verdict = initial_data::threshold_check(
            &static_grid,
            &initial_data::scaled_ground_state(&static_grid, alpha),
        )
        .verdict;
        let predicted = if expect_blowup {
            verdict == ThresholdVerdict::SuperthresholdBlowup
        } else {
            verdict == ThresholdVerdict::SubthresholdGlobal
        };
        report.check_that(&format!("{tag}_threshold_prediction"), predicted, alpha);

        let data = initial_data::scaled_ground_state(&grid, alpha);
        let mut sup = StrideSampler::new(cfg.stride, |_, s: &FieldState| s.u.sup_norm());
        let traj = solver::evolve(
            &grid,
            &data,
            &solver_cfg(cfg, -1.0),
            cfg.t_max,
            &mut [&mut sup],
        )?;
        report.metric(&format!("sup_norm_{tag}"), sup.out.clone());
        if expect_blowup {
            let t = traj.blowup.as_ref().map(|b| b.t);
            report.blowup_time = t;
            report.check_that(
                &format!("{tag}_blows_up"),
                t.map(|t| t < cfg.t_max).unwrap_or(false),
                t.unwrap_or(f64::NAN),
            );
        } else {
            let max_sup = sup
                .out
                .iter()
                .map(|p| p.1)
                .fold(traj.final_state.u.sup_norm(), f64::max);
            report.check_that(
                &format!("{tag}_bounded"),
                traj.blowup.is_none() && max_sup <= SUP_BOUND,
                max_sup,
            );
        }
    }
    Ok(report)
}

fn scattering_profile(cfg: &RunConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("scattering_profile", cfg);
    report.claim(
        "a small defocusing solution approaches a free wave: the free profile \
         extracted by backward free evolution of the late state matches the \
         nonlinear solution increasingly well toward the horizon",
    );
    let grid = build_grid(cfg)?;
    let data = compact_data(&grid, cfg)?;
    let lambda = if cfg.lambda > 0.0 { cfg.lambda } else { 1.0 };
    let t_final = cfg.t_max;
    // the gap at t_final vanishes identically by time-reversibility of the
    // construction, so the checkpoints stop at 0.75 t_final
    let checkpoints = vec![0.25 * t_final, 0.5 * t_final, 0.75 * t_final];
    let e0 = functionals::energy(&grid, &data.state(), lambda).total;

    let mut capture = StateCapture::new(checkpoints.clone());
    let traj = solver::evolve(
        &grid,
        &data,
        &solver_cfg(cfg, lambda),
        t_final,
        &mut [&mut capture],
    )?;
    if !completed(&mut report, "nonlinear", &traj) {
        return Ok(report);
    }
    // free data at time zero: evolve the final state backward under the free
    // equation, i.e. evolve the velocity-negated state forward and flip back
    let backward_seed = InitialData {
        f: traj.final_state.u.clone(),
        g: traj.final_state.ut.map(|v| -v),
        support_radius: Some((cfg.data_width + t_final + 1.0).min(grid.r_max)),
    };
    let back = solver::evolve(
        &grid,
        &backward_seed,
        &solver_cfg(cfg, 0.0),
        t_final,
        &mut [],
    )?;
    if !completed(&mut report, "backward_free", &back) {
        return Ok(report);
    }
    let candidate = InitialData {
        f: back.final_state.u.clone(),
        g: back.final_state.ut.map(|v| -v),
        support_radius: Some((cfg.data_width + 2.0 * t_final + 1.0).min(grid.r_max)),
    };
    // compare against the discrete free flow of the candidate so that both
    // sides share the same numerical dispersion; what remains of the gap is
    // the genuine nonlinear-vs-free difference
    let mut free_capture = StateCapture::new(checkpoints.clone());
    let free_traj = solver::evolve(
        &grid,
        &candidate,
        &solver_cfg(cfg, 0.0),
        t_final,
        &mut [&mut free_capture],
    )?;
    if !completed(&mut report, "forward_free", &free_traj) {
        return Ok(report);
    }

    let mut gaps = Vec::new();
    for (state, free) in capture.states.iter().zip(&free_capture.states) {
        let dur = state
            .radial_derivative(&grid)
            .zip(&free.radial_derivative(&grid), |a, b| (a - b) * (a - b));
        let dut = state.ut.zip(&free.ut, |a, b| (a - b) * (a - b));
        let gap =
            (grid.integrate_ball(&dur, None) + grid.integrate_ball(&dut, None)).sqrt() / e0.sqrt();
        gaps.push((state.t, gap));
    }
    report.metric("energy_norm_gap", gaps.clone());
    report.check_that(
        "gap_decreases",
        gaps.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-9),
        gaps.last().map(|p| p.1).unwrap_or(f64::NAN),
    );
    report.check_below(
        "final_gap_small",
        gaps.last().map(|p| p.1).unwrap_or(f64::NAN),
        SCATTER_FINAL_TOL,
    );
    Ok(report)
}

fn convergence_study(cfg: &RunConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("convergence_study", cfg);
    report.claim(
        "the solver converges at second order to the exact free propagator, \
         and the multiplier-identity residual refines at least at order 1.8",
    );
    let t_final = cfg.t_max.min(5.0);
    // Velocity-mode data: the exact solution integrates the bump once, so it
    // is one derivative smoother than the displacement solution, whose
    // wavefront keeps the sup error pre-asymptotic at these spacings. The
    // bump width is floored at 2 so its flat edge is resolved on the coarse
    // grid.
    let rho = cfg.data_width.max(2.0);
    let drs = [0.04, 0.02, 0.01];
    let r_small = (rho + t_final + 2.0).max(4.0 * rho + 1.0);

    let mut errors = Vec::new();
    for dr in drs {
        let grid = RadialGrid::new(3, dr, r_small)?;
        let data = initial_data::compact_bump(&grid, rho, cfg.data_amplitude, DataMode::Velocity)?;
        let oracle = DalembertOracle::from_data(&grid, &data)?;
        let traj = solver::evolve(&grid, &data, &solver_cfg(cfg, 0.0), t_final, &mut [])?;
        let exact = oracle.state(&grid, t_final)?;
        let err = traj
            .final_state
            .u
            .zip(&exact.u, |a, b| (a - b).abs())
            .sup_norm();
        errors.push((dr, err));
    }
    report.metric("solver_error_vs_dr", errors.clone());
    let order = -loglog_slope(
        &errors
            .iter()
            .map(|&(d, e)| (1.0 / d, e))
            .collect::<Vec<_>>(),
    );
    report.check_that(
        "solver_order",
        order >= SOLVER_ORDER_RANGE.0 && order <= SOLVER_ORDER_RANGE.1,
        order,
    );

    let bracket = weights::weight_bracket(3)?;
    let mut residuals = Vec::new();
    for dr in [drs[0], drs[1]] {
        let grid = RadialGrid::new(3, dr, r_small)?;
        let data = initial_data::compact_bump(&grid, rho, cfg.data_amplitude, data_mode(cfg))?;
        let out = morawetz_balance(&grid, &data, &bracket, 1.0, cfg.cfl(), t_final, &[])?;
        residuals.push((dr, out.residual()));
    }
    report.metric("identity_residual_vs_dr", residuals.clone());
    let id_order = (residuals[0].1 / residuals[1].1).log2();
    report.check_above("identity_order", id_order, REFINEMENT_ORDER_MIN);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> RunConfig {
        let mut cfg = RunConfig::default();
        for set in [
            "dr = 0.02",
            "dt = 0.01",
            "r_max = 15",
            "t_max = 3",
            "schedule_radii = 2,4",
            "t_margin = 3",
            "stride = 20",
        ] {
            cfg.apply_set(set).unwrap();
        }
        cfg
    }

    #[test]
    fn unknown_name_lists_registry() {
        let err = run("warp_drive", &RunConfig::default()).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("warp_drive") && text.contains("energy_conservation"));
    }

    #[test]
    fn energy_conservation_small_envelope_passes() {
        let report = run("energy_conservation", &small_cfg()).unwrap();
        assert!(report.passed(), "verdicts: {:?}", report.verdicts);
        assert_eq!(report.metrics.len(), 3);
    }

    #[test]
    fn metric_series_are_deterministic() {
        let cfg = small_cfg();
        let a = run("energy_conservation", &cfg).unwrap();
        let b = run("energy_conservation", &cfg).unwrap();
        for (ma, mb) in a.metrics.iter().zip(&b.metrics) {
            assert_eq!(ma.label, mb.label);
            assert_eq!(
                ma.points, mb.points,
                "series {} must be bit-identical",
                ma.label
            );
        }
    }

    #[test]
    fn morawetz_identity_small_envelope() {
        // the residual tolerance is pinned at dr = 0.01; keep the domain small
        let mut cfg = small_cfg();
        cfg.dr = 0.01;
        cfg.dt = 0.005;
        let report = run("morawetz_identity", &cfg).unwrap();
        // the identity residuals must already hold on the coarse envelope
        for v in report
            .verdicts
            .iter()
            .filter(|v| v.label.starts_with("residual_"))
        {
            assert!(v.passed, "{}: measured {}", v.label, v.measured);
        }
    }
}
