//! Exact and semi-exact linear propagators: the d'Alembert solution for
//! radial free waves in three dimensions (the oracle every solver claim is
//! audited against), linear spherical-harmonic mode evolution for
//! tangential-gradient checks, and the `L^2`-invariant rescaling operator.

use crate::grid::{Field, FieldState, RadialGrid};
use crate::initial_data::InitialData;
use crate::solver::{SolverConfig, MAX_CFL};
use crate::{NlwError, Result};
use std::sync::Arc;

/// An odd function of one real variable given by its profile on `x >= 0`,
/// with two derivatives. `eval` is odd, `d1` even, `d2` odd.
struct OddFn {
    eval: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    d1: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    d2: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl OddFn {
    fn eval(&self, x: f64) -> f64 {
        x.signum() * (self.eval)(x.abs())
    }
    fn d1(&self, x: f64) -> f64 {
        (self.d1)(x.abs())
    }
    fn d2(&self, x: f64) -> f64 {
        x.signum() * (self.d2)(x.abs())
    }
}

/// Cumulative integral `x -> integral_0^x q(s) ds` of an even-extended
/// profile, tabulated by composite Simpson quadrature with sub-node
/// correction; evaluated as an even function of `x`.
struct Cumulative {
    prefix: Vec<f64>,
    step: f64,
}

impl Cumulative {
    fn build(q: impl Fn(f64) -> f64, extent: f64, step: f64) -> Self {
        let count = (extent / step).ceil() as usize;
        let mut prefix = Vec::with_capacity(count + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for i in 0..count {
            let a = i as f64 * step;
            let b = a + step;
            acc += step / 6.0 * (q(a) + 4.0 * q(0.5 * (a + b)) + q(b));
            prefix.push(acc);
        }
        Cumulative { prefix, step }
    }

    fn eval(&self, x: f64, q: impl Fn(f64) -> f64) -> f64 {
        let x = x.abs();
        let j = ((x / self.step) as usize).min(self.prefix.len() - 1);
        let a = j as f64 * self.step;
        if x <= a || j + 1 == self.prefix.len() {
            return self.prefix[j];
        }
        let d = x - a;
        self.prefix[j] + d / 6.0 * (q(a) + 4.0 * q(a + 0.5 * d) + q(x))
    }
}

/// Uniform samples of an odd profile `p(x) = x q(x)`, interpolated by local
/// Lagrange cubics (error `O(dr^4)`); negative indices resolved by oddness,
/// indices beyond the table by the compact-support rule.
struct OddTable {
    values: Arc<Vec<f64>>,
    dr: f64,
}

impl OddTable {
    fn get(&self, i: isize) -> f64 {
        if i < 0 {
            -self.get(-i)
        } else if i as usize >= self.values.len() {
            0.0
        } else {
            self.values[i as usize]
        }
    }

    /// Value, first and second derivative of the local cubic at `x >= 0`.
    fn cubic(&self, x: f64) -> (f64, f64, f64) {
        let j = (x / self.dr).floor() as isize;
        let s = x / self.dr - j as f64;
        let (a, b, c, d) = (
            self.get(j - 1),
            self.get(j),
            self.get(j + 1),
            self.get(j + 2),
        );
        let value = a * (-(s * s * s - 3.0 * s * s + 2.0 * s) / 6.0)
            + b * ((s * s * s - 2.0 * s * s - s + 2.0) / 2.0)
            + c * (-(s * s * s - s * s - 2.0 * s) / 2.0)
            + d * ((s * s * s - s) / 6.0);
        let d1 = (a * (-(3.0 * s * s - 6.0 * s + 2.0) / 6.0)
            + b * ((3.0 * s * s - 4.0 * s - 1.0) / 2.0)
            + c * (-(3.0 * s * s - 2.0 * s - 2.0) / 2.0)
            + d * ((3.0 * s * s - 1.0) / 6.0))
            / self.dr;
        let d2 = (a * (1.0 - s) + b * (3.0 * s - 2.0) + c * (1.0 - 3.0 * s) + d * s)
            / (self.dr * self.dr);
        (value, d1, d2)
    }
}

/// Exact solution operator for the radial free wave equation in `n = 3`,
/// through the substitution `v = r u` and the line d'Alembert formula
/// `v(t, r) = 1/2 [phi(r+t) + phi(r-t)] + 1/2 [G(r+t) - G(r-t)]` with `phi`
/// and `gamma` the odd extensions of `r f` and `r g`, `G` the primitive of
/// `gamma`.
pub struct DalembertOracle {
    phi: OddFn,
    gamma: OddFn,
    gamma_primitive: Cumulative,
    /// largest |x| at which the extensions are trusted
    extent: f64,
    /// radius beyond which the data vanish (or are negligible)
    support: Option<f64>,
}

impl DalembertOracle {
    /// Build the oracle from grid samples; cubic interpolation keeps it two
    /// orders more accurate than the second-order solver it audits.
    pub fn from_data(grid: &RadialGrid, data: &InitialData) -> Result<Self> {
        if grid.n_dim != 3 {
            return Err(NlwError::InvalidParameter(
                "the d'Alembert oracle is three-dimensional only".into(),
            ));
        }
        let rf: Arc<Vec<f64>> =
            Arc::new((0..grid.len()).map(|i| grid.r(i) * data.f.0[i]).collect());
        let rg: Arc<Vec<f64>> =
            Arc::new((0..grid.len()).map(|i| grid.r(i) * data.g.0[i]).collect());
        let dr = grid.dr;
        let phi_table = OddTable { values: rf, dr };
        let gamma_table = OddTable {
            values: rg.clone(),
            dr,
        };
        let gq = OddTable { values: rg, dr };
        let step = (dr / 2.0).min(1e-3);
        let gamma_primitive = Cumulative::build(|x| gq.cubic(x).0, grid.r_max, step);
        let phi = OddFn {
            eval: {
                let t = OddTable {
                    values: phi_table.values.clone(),
                    dr,
                };
                Box::new(move |x| t.cubic(x).0)
            },
            d1: {
                let t = OddTable {
                    values: phi_table.values.clone(),
                    dr,
                };
                Box::new(move |x| t.cubic(x).1)
            },
            d2: {
                let t = OddTable {
                    values: phi_table.values,
                    dr,
                };
                Box::new(move |x| t.cubic(x).2)
            },
        };
        let gamma = OddFn {
            eval: {
                let t = OddTable {
                    values: gamma_table.values.clone(),
                    dr,
                };
                Box::new(move |x| t.cubic(x).0)
            },
            d1: {
                let t = OddTable {
                    values: gamma_table.values,
                    dr,
                };
                Box::new(move |x| t.cubic(x).1)
            },
            d2: Box::new(|_| 0.0),
        };
        Ok(DalembertOracle {
            phi,
            gamma,
            gamma_primitive,
            extent: grid.r_max,
            support: data.support_radius,
        })
    }

    /// Build the oracle from analytic radial profiles `f` (with two
    /// derivatives) and `g` (with one). `support` marks the radius beyond
    /// which both profiles are (numerically) zero.
    #[allow(clippy::too_many_arguments)]
    pub fn from_profiles(
        f: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static,
        f_d1: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static,
        f_d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static,
        g_d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: Option<f64>,
        extent: f64,
    ) -> Result<Self> {
        if !(extent > 0.0) {
            return Err(NlwError::InvalidParameter(format!(
                "oracle extent must be positive, got {extent}"
            )));
        }
        // phi(x) = x f(x): phi' = f + x f', phi'' = 2 f' + x f''
        let phi = OddFn {
            eval: {
                let f = f.clone();
                Box::new(move |x| x * f(x))
            },
            d1: {
                let (f, fp) = (f.clone(), f_d1.clone());
                Box::new(move |x| f(x) + x * fp(x))
            },
            d2: {
                let fp = f_d1.clone();
                Box::new(move |x| 2.0 * fp(x) + x * f_d2(x))
            },
        };
        let gamma = OddFn {
            eval: {
                let g = g.clone();
                Box::new(move |x| x * g(x))
            },
            d1: {
                let g = g.clone();
                Box::new(move |x| g(x) + x * g_d1(x))
            },
            d2: Box::new(|_| 0.0),
        };
        let gq = g.clone();
        let gamma_primitive = Cumulative::build(move |x| x * gq(x), extent, 1e-3);
        Ok(DalembertOracle {
            phi,
            gamma,
            gamma_primitive,
            extent,
            support,
        })
    }

    fn reachable(&self, x: f64) -> bool {
        x.abs() <= self.extent || self.support.is_some()
    }

    fn primitive(&self, x: f64) -> f64 {
        let gamma = &self.gamma;
        self.gamma_primitive.eval(x, |s| gamma.eval(s))
    }

    /// Exact state at time `t >= 0` on the grid, with the analytic radial
    /// derivative stored in `ur`.
    pub fn state(&self, grid: &RadialGrid, t: f64) -> Result<FieldState> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(NlwError::InvalidParameter(format!(
                "oracle time must be nonnegative, got {t}"
            )));
        }
        if !self.reachable(grid.r_max + t) {
            return Err(NlwError::InvalidParameter(format!(
                "time {t} reaches past the sampled extent {} of non-compact data",
                self.extent
            )));
        }
        let mut u = grid.zeros();
        let mut ut = grid.zeros();
        let mut ur = grid.zeros();
        // origin values by the r -> 0 limits of v/r and its derivatives
        u.0[0] = self.phi.d1(t) + self.gamma.eval(t);
        ut.0[0] = self.phi.d2(t) + self.gamma.d1(t);
        ur.0[0] = 0.0;
        for i in 1..grid.len() {
            let r = grid.r(i);
            let (p, m) = (r + t, r - t);
            let v = 0.5 * (self.phi.eval(p) + self.phi.eval(m))
                + 0.5 * (self.primitive(p) - self.primitive(m));
            let v_r = 0.5 * (self.phi.d1(p) + self.phi.d1(m))
                + 0.5 * (self.gamma.eval(p) - self.gamma.eval(m));
            let v_t = 0.5 * (self.phi.d1(p) - self.phi.d1(m))
                + 0.5 * (self.gamma.eval(p) + self.gamma.eval(m));
            u.0[i] = v / r;
            ut.0[i] = v_t / r;
            ur.0[i] = (v_r - v / r) / r;
        }
        let mut state = FieldState::new(u, ut, t);
        state.ur = Some(ur);
        Ok(state)
    }
}

/// One spherical-harmonic mode `u = a(t, r) Y_l` of the free wave equation,
/// with `Y_l` normalized in `L^2` of the sphere.
#[derive(Debug, Clone)]
pub struct ModeState {
    pub ell: u32,
    pub a: Field,
    pub at: Field,
    pub t: f64,
}

impl ModeState {
    /// Bump-profile mode data `a = amplitude (r/rho)^l exp-bump(r/rho)`,
    /// vanishing at the origin as regularity demands.
    pub fn bump(grid: &RadialGrid, ell: u32, rho: f64, amplitude: f64) -> Result<ModeState> {
        if ell == 0 {
            return Err(NlwError::InvalidParameter(
                "mode index must be >= 1 (the radial mode is the main solver)".into(),
            ));
        }
        if !(rho > 0.0 && rho < grid.r_max / 4.0) {
            return Err(NlwError::InvalidParameter(format!(
                "mode bump radius {rho} out of range (0, {})",
                grid.r_max / 4.0
            )));
        }
        let a = grid.sample(|r| {
            amplitude * (r / rho).powi(ell as i32) * crate::initial_data::bump_profile(r / rho)
        });
        Ok(ModeState {
            ell,
            a,
            at: grid.zeros(),
            t: 0.0,
        })
    }
}

/// Evolve a mode by leapfrog on `a_tt = a_rr + (n-1)/r a_r - l(l+1) a/r^2`
/// with Dirichlet conditions at both ends.
pub fn evolve_mode(
    grid: &RadialGrid,
    mode: &ModeState,
    config: &SolverConfig,
    t_final: f64,
) -> Result<ModeState> {
    if config.lambda != 0.0 {
        return Err(NlwError::InvalidParameter(
            "modes decouple only for the linear equation (lambda = 0)".into(),
        ));
    }
    if !(config.cfl > 0.0 && config.cfl <= MAX_CFL) {
        return Err(NlwError::InvalidParameter(format!(
            "courant ratio {} outside (0, {MAX_CFL}]",
            config.cfl
        )));
    }
    if !(t_final >= 0.0) {
        return Err(NlwError::InvalidParameter(format!(
            "final time must be nonnegative, got {t_final}"
        )));
    }
    let steps = (t_final / (config.cfl * grid.dr)).ceil().max(1.0) as usize;
    let dt = t_final / steps as f64;
    let nf = grid.n_dim as f64;
    let ll = (mode.ell * (mode.ell + 1)) as f64;
    let n = grid.len();
    let dr = grid.dr;

    let accel = |a: &[f64], out: &mut [f64]| {
        out[0] = 0.0;
        for i in 1..n - 1 {
            let r = i as f64 * dr;
            out[i] = (a[i + 1] - 2.0 * a[i] + a[i - 1]) / (dr * dr)
                + (nf - 1.0) * (a[i + 1] - a[i - 1]) / (2.0 * dr * r)
                - ll * a[i] / (r * r);
        }
        out[n - 1] = 0.0;
    };

    let mut a = mode.a.clone();
    let mut at = mode.at.clone();
    a.0[0] = 0.0;
    at.0[0] = 0.0;
    *a.0.last_mut().unwrap() = 0.0;
    *at.0.last_mut().unwrap() = 0.0;
    let mut acc = vec![0.0; n];
    accel(&a.0, &mut acc);
    for _ in 0..steps {
        for i in 1..n - 1 {
            at.0[i] += 0.5 * dt * acc[i];
            a.0[i] += dt * at.0[i];
        }
        accel(&a.0, &mut acc);
        for i in 1..n - 1 {
            at.0[i] += 0.5 * dt * acc[i];
        }
    }
    Ok(ModeState {
        ell: mode.ell,
        a,
        at,
        t: mode.t + t_final,
    })
}

/// Radial-measure integral `integral_0^R q(r) r^{n-1} dr` without the sphere
/// factor (mode quantities carry a normalized harmonic).
fn mode_integral(grid: &RadialGrid, q: impl Fn(usize, f64) -> f64, radius: Option<f64>) -> f64 {
    let i_max = match radius {
        None => grid.node_count,
        Some(r) => grid.snap(r),
    };
    let mut acc = 0.0;
    for i in 1..=i_max {
        let w = if i == i_max { 0.5 } else { 1.0 };
        let r = grid.r(i);
        acc += w * q(i, r) * r.powi(grid.n_dim as i32 - 1);
    }
    acc * grid.dr
}

/// Tangential part of the mode energy in the ball of radius `R`:
/// `l(l+1) integral_0^R a^2 r^{n-3} dr`.
pub fn tangential_ball_energy(grid: &RadialGrid, mode: &ModeState, radius: Option<f64>) -> f64 {
    let ll = (mode.ell * (mode.ell + 1)) as f64;
    ll * mode_integral(grid, |i, r| mode.a.0[i] * mode.a.0[i] / (r * r), radius)
}

/// Total mode energy: kinetic + radial-gradient + tangential parts.
pub fn mode_energy(grid: &RadialGrid, mode: &ModeState) -> f64 {
    let ar = grid.radial_derivative(&mode.a);
    let ll = (mode.ell * (mode.ell + 1)) as f64;
    mode_integral(
        grid,
        |i, r| {
            mode.at.0[i] * mode.at.0[i]
                + ar.0[i] * ar.0[i]
                + ll * mode.a.0[i] * mode.a.0[i] / (r * r)
        },
        None,
    )
}

/// `L^2`-invariant rescaling `h_eps(r) = eps^{n/2} h(eps r)`, resampled on the
/// grid by linear interpolation.
pub fn rescale_data(grid: &RadialGrid, h: &Field, eps: f64) -> Result<Field> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(NlwError::InvalidParameter(format!(
            "scaling eps must lie in (0, 1], got {eps}"
        )));
    }
    let scale = eps.powf(grid.n_dim as f64 / 2.0);
    let values: Vec<f64> = (0..grid.len())
        .map(|i| {
            let x = eps * i as f64;
            let j = x.floor() as usize;
            if j + 1 >= h.len() {
                0.0
            } else {
                let frac = x - j as f64;
                scale * (h.0[j] * (1.0 - frac) + h.0[j + 1] * frac)
            }
        })
        .collect();
    Ok(Field(values))
}
