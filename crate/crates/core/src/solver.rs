//! Time integration of the radial nonlinear wave equation
//! `u_tt = u_rr + (n-1)/r u_r - lambda u|u|^{2*-2}` by the velocity-Verlet
//! scheme, with homogeneous Dirichlet data at the outer boundary and the
//! symmetric origin rule `lap u(0) = 2n (u_1 - u_0)/dr^2`.

use crate::grid::{Field, FieldState, RadialGrid};
use crate::initial_data::InitialData;
use crate::{NlwError, Result};

/// Parameters of a single evolution run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Sign/strength of the power nonlinearity: `+1` defocusing, `-1`
    /// focusing, `0` free wave.
    pub lambda: f64,
    /// Courant ratio `dt/dr`; must stay below [`MAX_CFL`].
    pub cfl: f64,
}

/// Largest admissible Courant ratio for the interior stencil.
pub const MAX_CFL: f64 = 0.9;

/// Largest stable Courant ratio in dimension `n`: the origin rule
/// `lap u(0) = 2n (u_1 - u_0)/dr^2` is a discrete oscillator of frequency
/// `sqrt(2n)/dr`, which leapfrog only tolerates for `dt <= 2/omega`, i.e.
/// `cfl <= sqrt(2/n)` — tighter than the interior bound [`MAX_CFL`] for
/// `n >= 3`.
pub fn max_cfl(n_dim: u32) -> f64 {
    MAX_CFL.min((2.0 / n_dim as f64).sqrt())
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lambda: 0.0,
            cfl: 0.5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= MAX_CFL) {
            return Err(NlwError::InvalidParameter(format!(
                "courant ratio {} outside (0, {MAX_CFL}]",
                self.cfl
            )));
        }
        if !self.lambda.is_finite() {
            return Err(NlwError::InvalidParameter(
                "nonlinearity strength must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// Amplitude growth factor over the initial data that counts as blow-up.
const BLOWUP_FACTOR: f64 = 1e3;

/// Where and when a run was stopped by amplitude growth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupInfo {
    pub t: f64,
    pub sup: f64,
}

/// Outcome of an evolution run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub final_state: FieldState,
    pub steps: usize,
    pub dt: f64,
    pub blowup: Option<BlowupInfo>,
}

/// Per-step hook; called with the state after every accepted step, and once
/// with the initial state before the first step.
pub trait Observer {
    fn observe(&mut self, grid: &RadialGrid, state: &FieldState);
}

impl<F: FnMut(&RadialGrid, &FieldState)> Observer for F {
    fn observe(&mut self, grid: &RadialGrid, state: &FieldState) {
        self(grid, state)
    }
}

/// Discrete radial Laplacian plus nonlinearity: the acceleration field.
fn acceleration(grid: &RadialGrid, u: &Field, lambda: f64, out: &mut Vec<f64>) {
    let n = grid.len();
    let dr2 = grid.dr * grid.dr;
    let nf = grid.n_dim as f64;
    let two_star = 2.0 * nf / (nf - 2.0);
    out.resize(n, 0.0);
    // origin: by even symmetry lap u(0) = 2n (u_1 - u_0)/dr^2
    out[0] = 2.0 * nf * (u.0[1] - u.0[0]) / dr2;
    for i in 1..n - 1 {
        let lap = (u.0[i + 1] - 2.0 * u.0[i] + u.0[i - 1]) / dr2
            + (nf - 1.0) * (u.0[i + 1] - u.0[i - 1]) / (2.0 * grid.dr * grid.r(i));
        out[i] = lap;
    }
    out[n - 1] = 0.0; // Dirichlet node never moves
    if lambda != 0.0 {
        for i in 0..n - 1 {
            let v = u.0[i];
            out[i] -= lambda * v * crate::pow_abs(v, two_star - 2.0);
        }
    }
}

/// Evolve initial data to time `t_final > 0`, reporting every step to the
/// observers. Stops early (with `blowup` set) if the sup norm exceeds
/// `BLOWUP_FACTOR` times the initial amplitude or turns non-finite.
pub fn evolve(
    grid: &RadialGrid,
    data: &InitialData,
    config: &SolverConfig,
    t_final: f64,
    observers: &mut [&mut dyn Observer],
) -> Result<Trajectory> {
    config.validate()?;
    if config.cfl > max_cfl(grid.n_dim) {
        return Err(NlwError::InvalidParameter(format!(
            "courant ratio {} exceeds the origin-rule stability limit {} in dimension {}",
            config.cfl,
            max_cfl(grid.n_dim),
            grid.n_dim
        )));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(NlwError::InvalidParameter(format!(
            "final time must be positive and finite, got {t_final}"
        )));
    }
    if !data.f.all_finite() || !data.g.all_finite() {
        return Err(NlwError::InvalidParameter(
            "initial data contains non-finite values".into(),
        ));
    }
    let steps = (t_final / (config.cfl * grid.dr)).ceil().max(1.0) as usize;
    let dt = t_final / steps as f64;

    let mut u = data.f.clone();
    let mut ut = data.g.clone();
    *u.0.last_mut().unwrap() = 0.0;
    *ut.0.last_mut().unwrap() = 0.0;
    let amp0 = u.sup_norm().max(ut.sup_norm());
    let blowup_sup = BLOWUP_FACTOR * amp0.max(1e-8);

    let mut accel = Vec::new();
    acceleration(grid, &u, config.lambda, &mut accel);

    let mut state = FieldState::new(u, ut, 0.0);
    let stamp_kick = |state: &mut FieldState, accel: &[f64]| {
        state.kick = Some(Field(accel.iter().map(|&a| 0.5 * dt * a).collect()));
    };
    stamp_kick(&mut state, &accel);
    for obs in observers.iter_mut() {
        obs.observe(grid, &state);
    }

    let mut blowup = None;
    let mut done = 0;
    for step in 1..=steps {
        let t = step as f64 * dt;
        for i in 0..state.u.len() - 1 {
            state.ut.0[i] += 0.5 * dt * accel[i];
            state.u.0[i] += dt * state.ut.0[i];
        }
        acceleration(grid, &state.u, config.lambda, &mut accel);
        for i in 0..state.u.len() - 1 {
            state.ut.0[i] += 0.5 * dt * accel[i];
        }
        state.t = t;
        stamp_kick(&mut state, &accel);
        done = step;

        let sup = state.u.sup_norm();
        if !sup.is_finite() || sup > blowup_sup {
            blowup = Some(BlowupInfo { t, sup });
            break;
        }
        for obs in observers.iter_mut() {
            obs.observe(grid, &state);
        }
    }

    Ok(Trajectory {
        final_state: state,
        steps: done,
        dt,
        blowup,
    })
}

/// The forward and backward halves of a run on `[-T, T]`.
///
/// The backward solution is obtained by evolving `(f, -g)` forward and
/// flipping the velocity sign back, so `minus.final_state` is the true state
/// at time `-T` (its `t` field is `-T`). Observers attached to the minus run
/// see the auxiliary forward evolution: states at time `s in [0, T]` whose
/// `u` equals `u(-s)` and whose `ut` equals `-u_t(-s)`. Integrands even in
/// `u_t` therefore accumulate the correct `[-T, 0]` contribution unchanged.
#[derive(Debug, Clone)]
pub struct TwoSidedRun {
    pub plus: Trajectory,
    pub minus: Trajectory,
}

/// Evolve on both time directions to `+T` and `-T`.
pub fn evolve_two_sided(
    grid: &RadialGrid,
    data: &InitialData,
    config: &SolverConfig,
    t_final: f64,
    observers_plus: &mut [&mut dyn Observer],
    observers_minus: &mut [&mut dyn Observer],
) -> Result<TwoSidedRun> {
    let plus = evolve(grid, data, config, t_final, observers_plus)?;
    let mut minus = evolve(
        grid,
        &data.time_reversed(),
        config,
        t_final,
        observers_minus,
    )?;
    minus.final_state.ut = minus.final_state.ut.map(|v| -v);
    minus.final_state.t = -minus.final_state.t;
    Ok(TwoSidedRun { plus, minus })
}
