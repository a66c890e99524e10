//! Initial pairs `(f, g)`: Gaussian and compactly supported bumps, the ground
//! state `W`, plain and energy-invariant rescalings, and the ground-state
//! threshold evaluation for the focusing equation.

use crate::functionals;
use crate::grid::{Field, FieldState, RadialGrid};
use crate::{NlwError, Result};

/// Which component of the pair a generator fills.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataMode {
    /// `f` nonzero, `g = 0`.
    Displacement,
    /// `g` nonzero, `f = 0`.
    Velocity,
}

/// An initial pair `(f, g)` with its support radius, if compact.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub f: Field,
    pub g: Field,
    pub support_radius: Option<f64>,
}

impl InitialData {
    pub fn state(&self) -> FieldState {
        FieldState::new(self.f.clone(), self.g.clone(), 0.0)
    }

    /// Same data with the velocity negated; evolving it forward traces the
    /// original solution backward in time.
    pub fn time_reversed(&self) -> InitialData {
        InitialData {
            f: self.f.clone(),
            g: self.g.map(|v| -v),
            support_radius: self.support_radius,
        }
    }
}

/// `amplitude * exp(-(r/width)^2)` in the chosen slot.
pub fn gaussian_bump(
    grid: &RadialGrid,
    amplitude: f64,
    width: f64,
    mode: DataMode,
) -> Result<InitialData> {
    if !(width > 0.0) {
        return Err(NlwError::InvalidParameter(format!(
            "gaussian width must be positive, got {width}"
        )));
    }
    let profile = grid.sample(|r| amplitude * (-(r / width) * (r / width)).exp());
    let zero = grid.zeros();
    let (f, g) = match mode {
        DataMode::Displacement => (profile, zero),
        DataMode::Velocity => (zero, profile),
    };
    Ok(InitialData {
        f,
        g,
        support_radius: None,
    })
}

/// Smooth bump profile `amplitude * exp(1 - 1/(1 - (r/rho)^2))` on `r < rho`.
pub fn compact_bump(
    grid: &RadialGrid,
    rho: f64,
    amplitude: f64,
    mode: DataMode,
) -> Result<InitialData> {
    if !(rho > 0.0 && rho < grid.r_max / 4.0) {
        return Err(NlwError::InvalidParameter(format!(
            "bump radius {rho} out of range (0, {})",
            grid.r_max / 4.0
        )));
    }
    let profile = grid.sample(|r| amplitude * bump_profile(r / rho));
    let zero = grid.zeros();
    let (f, g) = match mode {
        DataMode::Displacement => (profile, zero),
        DataMode::Velocity => (zero, profile),
    };
    Ok(InitialData {
        f,
        g,
        support_radius: Some(rho),
    })
}

/// `exp(1 - 1/(1 - s^2))` for `|s| < 1`, zero outside; value 1 at the center.
pub fn bump_profile(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// Radial derivative of the bump profile with respect to `s`.
pub fn bump_profile_d1(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let w = 1.0 - s * s;
        bump_profile(s) * (-2.0 * s / (w * w))
    }
}

/// The ground state `W(r) = (1 + r^2/(n(n-2)))^{-(n-2)/2}`, the static
/// solution of `-lap W = W^{2*-1}`.
pub fn ground_state(grid: &RadialGrid) -> Field {
    let n = grid.n_dim as f64;
    let c = n * (n - 2.0);
    let p = -(n - 2.0) / 2.0;
    grid.sample(|r| (1.0 + r * r / c).powf(p))
}

/// Exact radial derivative of the ground state.
pub fn ground_state_d1(grid: &RadialGrid) -> Field {
    let n = grid.n_dim as f64;
    let c = n * (n - 2.0);
    let p = -(n - 2.0) / 2.0;
    grid.sample(|r| p * (1.0 + r * r / c).powf(p - 1.0) * 2.0 * r / c)
}

/// `(alpha W, 0)` data for the dichotomy sweep.
pub fn scaled_ground_state(grid: &RadialGrid, alpha: f64) -> InitialData {
    InitialData {
        f: ground_state(grid).map(|v| alpha * v),
        g: grid.zeros(),
        support_radius: None,
    }
}

/// Energy-invariant rescaling `f_eps(r) = eps^{n/2-1} f(eps r)` of the
/// displacement component, resampled on the grid.
pub fn rescale_h1(grid: &RadialGrid, f: &Field, eps: f64) -> Result<Field> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(NlwError::InvalidParameter(format!(
            "scaling eps must lie in (0, 1], got {eps}"
        )));
    }
    let scale = eps.powf(grid.n_dim as f64 / 2.0 - 1.0);
    let values: Vec<f64> = (0..grid.len())
        .map(|i| {
            // fractional node index of eps * r_i
            let x = eps * i as f64;
            let j = x.floor() as usize;
            if j + 1 >= f.len() {
                0.0
            } else {
                let frac = x - j as f64;
                scale * (f.0[j] * (1.0 - frac) + f.0[j + 1] * frac)
            }
        })
        .collect();
    Ok(Field(values))
}

/// Verdict of the ground-state threshold test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdVerdict {
    SubthresholdGlobal,
    SuperthresholdBlowup,
    Indeterminate,
}

/// Evaluation of the two threshold conditions against `(W, 0)`.
#[derive(Debug, Clone)]
pub struct ThresholdReport {
    /// `integral(|grad f|^2 + g^2 - ((n-2)/n)|f|^{2*}) dx`
    pub energy_lhs: f64,
    /// the same functional at `(W, 0)`
    pub energy_rhs: f64,
    pub grad_f: f64,
    pub grad_w: f64,
    pub condition_energy: bool,
    pub condition_gradient: bool,
    pub verdict: ThresholdVerdict,
    /// analytic estimate of the `|grad W|^2` mass lost to truncation at r_max
    pub truncation_tail: f64,
}

/// Evaluate the global-existence/blow-up threshold conditions for the
/// focusing equation around the ground state.
pub fn threshold_check(grid: &RadialGrid, data: &InitialData) -> ThresholdReport {
    let n = grid.n_dim as f64;
    let two_star = 2.0 * n / (n - 2.0);
    let static_energy = |f: &Field, fr: &Field, g: &Field| -> f64 {
        let density = Field(
            (0..grid.len())
                .map(|i| {
                    fr.0[i] * fr.0[i] + g.0[i] * g.0[i]
                        - (n - 2.0) / n * crate::pow_abs(f.0[i], two_star)
                })
                .collect(),
        );
        grid.integrate_ball(&density, None)
    };

    let w = ground_state(grid);
    let wr = ground_state_d1(grid);
    let fr = grid.radial_derivative(&data.f);

    let energy_lhs = static_energy(&data.f, &fr, &data.g);
    let energy_rhs = static_energy(&w, &wr, &grid.zeros());
    let grad_f = grid.integrate_ball(&fr.map(|v| v * v), None);
    let grad_w = grid.integrate_ball(&wr.map(|v| v * v), None);

    let condition_energy = energy_lhs < energy_rhs;
    let condition_gradient = grad_f < grad_w;
    let verdict = if condition_energy && condition_gradient {
        ThresholdVerdict::SubthresholdGlobal
    } else if condition_energy && grad_f > grad_w {
        ThresholdVerdict::SuperthresholdBlowup
    } else {
        ThresholdVerdict::Indeterminate
    };

    // |W'|^2 r^{n-1} ~ (n-2)^2 c^{n-2} r^{-(n-1)} with c = sqrt(n(n-2)),
    // so the tail integral beyond r_max is sigma (n-2) c^{2(n-2)} / r_max^{n-2}.
    let c2 = n * (n - 2.0);
    let truncation_tail =
        grid.sphere_area * (n - 2.0) * c2.powf(n - 2.0) / grid.r_max.powf(n - 2.0);

    ThresholdReport {
        energy_lhs,
        energy_rhs,
        grad_f,
        grad_w,
        condition_energy,
        condition_gradient,
        verdict,
        truncation_tail,
    }
}

/// Energy of a pair as the wave energy of its zero-time state.
pub fn data_energy(grid: &RadialGrid, data: &InitialData, lambda: f64) -> f64 {
    functionals::energy(grid, &data.state(), lambda).total
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> RadialGrid {
        RadialGrid::new(3, 0.01, 20.0).unwrap()
    }

    #[test]
    fn gaussian_velocity() {
        let g = grid();
        let d = gaussian_bump(&g, 1.0, 1.0, DataMode::Velocity).unwrap();
        assert_eq!(d.f.sup_norm(), 0.0);
        assert!((d.g.0[0] - 1.0).abs() < 1e-15);
        // energy = integral g^2 dx = pi^{3/2}/(2 sqrt 2)
        let e = data_energy(&g, &d, 0.0);
        let exact = PI.powf(1.5) / (2.0 * 2.0_f64.sqrt());
        assert!((e - exact).abs() < 1e-5 * exact, "{e} vs {exact}");
        let zero = gaussian_bump(&g, 0.0, 1.0, DataMode::Displacement).unwrap();
        assert_eq!(data_energy(&g, &zero, 1.0), 0.0);
        assert!(gaussian_bump(&g, 1.0, 0.0, DataMode::Velocity).is_err());
    }

    #[test]
    fn compact_bump_support() {
        let g = grid();
        let d = compact_bump(&g, 1.0, 1.0, DataMode::Displacement).unwrap();
        assert!((d.f.0[0] - 1.0).abs() < 1e-15);
        for i in g.snap(1.0)..g.len() {
            assert_eq!(d.f.0[i], 0.0);
        }
        assert!(data_energy(&g, &d, 0.0) > 0.0);
        assert!(compact_bump(&g, 10.0, 1.0, DataMode::Displacement).is_err());
    }

    #[test]
    fn ground_state_values() {
        let g = grid();
        let w = ground_state(&g);
        assert!((w.0[0] - 1.0).abs() < 1e-15);
        // n = 3: W(sqrt 3) = 1/sqrt 2
        let i = g.snap(3.0_f64.sqrt());
        assert!((w.0[i] - 1.0 / 2.0_f64.sqrt()).abs() < 1e-2);
    }

    #[test]
    fn ground_state_solves_elliptic_equation() {
        // max_r |lap W + W^5| small with the discrete radial laplacian
        let g = RadialGrid::new(3, 0.01, 20.0).unwrap();
        let w = ground_state(&g);
        let mut worst = 0.0f64;
        for i in 1..g.len() - 1 {
            let r = g.r(i);
            let lap = (w.0[i + 1] - 2.0 * w.0[i] + w.0[i - 1]) / (g.dr * g.dr)
                + (w.0[i + 1] - w.0[i - 1]) / (g.dr * r);
            worst = worst.max((lap + w.0[i].powi(5)).abs());
        }
        let lap0 = 6.0 * (w.0[1] - w.0[0]) / (g.dr * g.dr);
        worst = worst.max((lap0 + 1.0).abs());
        assert!(worst <= 1e-3, "elliptic residual {worst}");
    }

    #[test]
    fn h1_rescaling_preserves_gradient_norm() {
        let g = RadialGrid::new(3, 0.005, 40.0).unwrap();
        let f = g.sample(|r| (-r * r).exp());
        let fr = g.radial_derivative(&f);
        let norm = g.integrate_ball(&fr.map(|v| v * v), None);
        for eps in [0.5, 0.25] {
            let fe = rescale_h1(&g, &f, eps).unwrap();
            let fer = g.radial_derivative(&fe);
            let ne = g.integrate_ball(&fer.map(|v| v * v), None);
            assert!((ne - norm).abs() < 1e-3 * norm, "eps={eps}: {ne} vs {norm}");
        }
        assert!(rescale_h1(&g, &f, 0.0).is_err());
        assert!(rescale_h1(&g, &f, 1.5).is_err());
    }

    #[test]
    fn threshold_dichotomy_cases() {
        let g = RadialGrid::new(3, 0.01, 200.0).unwrap();
        let sub = threshold_check(&g, &scaled_ground_state(&g, 0.9));
        assert!(sub.condition_energy && sub.condition_gradient);
        assert_eq!(sub.verdict, ThresholdVerdict::SubthresholdGlobal);

        let sup = threshold_check(&g, &scaled_ground_state(&g, 1.1));
        assert!(sup.condition_energy && !sup.condition_gradient);
        assert_eq!(sup.verdict, ThresholdVerdict::SuperthresholdBlowup);

        let zero = InitialData {
            f: g.zeros(),
            g: g.zeros(),
            support_radius: Some(0.0),
        };
        let z = threshold_check(&g, &zero);
        assert_eq!(z.verdict, ThresholdVerdict::SubthresholdGlobal);
    }

    #[test]
    fn threshold_verdicts_stable_under_refinement() {
        for dr in [0.02, 0.01] {
            let g = RadialGrid::new(3, dr, 200.0).unwrap();
            let sub = threshold_check(&g, &scaled_ground_state(&g, 0.9));
            assert_eq!(sub.verdict, ThresholdVerdict::SubthresholdGlobal);
            let sup = threshold_check(&g, &scaled_ground_state(&g, 1.1));
            assert_eq!(sup.verdict, ThresholdVerdict::SuperthresholdBlowup);
        }
    }

    #[test]
    fn pohozaev_identity_on_grid() {
        // integral |grad W|^2 = integral W^{2*}; the truncated mismatch is the
        // O(1/r_max) gradient tail, under 1% once the domain reaches r ~ 400
        let g = RadialGrid::new(3, 0.01, 400.0).unwrap();
        let wr = ground_state_d1(&g);
        let w = ground_state(&g);
        let grad = g.integrate_ball(&wr.map(|v| v * v), None);
        let pot = g.integrate_ball(&w.map(|v| v.powi(6)), None);
        assert!(
            (grad - pot).abs() / grad <= 1e-2,
            "pohozaev mismatch {}",
            (grad - pot).abs() / grad
        );
    }
}
