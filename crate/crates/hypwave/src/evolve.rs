//! Right-hand sides for the four evolution equations, an explicit RK4
//! method-of-lines stepper, boundary handling, and the simulation driver.
//!
//! All equations are advanced as the first-order system `(f, f_t)` on the
//! shared uniform grid. Odd fields are pinned to zero at the origin; even
//! fields use the parity ghost-node stencil, under which the singular
//! `c coth r \partial_r` terms reduce to their regular limits. The outer
//! boundary is Dirichlet (the field is held at its initial boundary sample),
//! and callers are expected to keep `r_max` large enough that reflections
//! never reach the reported region; `evolve` checks this and records the
//! result.

use crate::error::{invalid, Error, Result};
use crate::grid::{Parity, RadialGrid};
use crate::model::{
    nonlinearity_euc, nonlinearity_euc_origin, nonlinearity_f, nonlinearity_n4d,
    nonlinearity_n4d_origin, p_lambda, potential_u, FieldState, Formulation, TargetGeometry,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equation {
    /// Full wave map: `psi_tt - psi_rr - coth r psi_r + g g'(psi)/sinh^2 r = 0`.
    Wm2d,
    /// Residual about `P_lambda`: `phi_tt - phi_rr - coth r phi_r = F(r, phi)`.
    Perturbed2d,
    /// 4d variable: `u_tt - u_rr - 3 coth r u_r - 2u + U_lambda u = N(r, u)`.
    Nonlinear4d,
    /// `(d_t^2 - Lap_{H4} - 2 + U_lambda) u = 0`.
    Linear4d,
    /// Same with `U_lambda = 0` (free shifted wave).
    Linear4dFree,
    /// Flat-space limit: `v_tt - v_rr - (3/r) v_r = N_euc(r, v)`.
    Euclidean4d,
}

impl Equation {
    pub fn formulation(self) -> Formulation {
        match self {
            Equation::Wm2d => Formulation::Psi2d,
            Equation::Perturbed2d => Formulation::Phi2d,
            Equation::Nonlinear4d | Equation::Linear4d | Equation::Linear4dFree => Formulation::U4d,
            Equation::Euclidean4d => Formulation::VEuclidean4d,
        }
    }
}

/// One equation on one grid, with per-node coefficient tables precomputed.
#[derive(Debug, Clone)]
pub struct EvolutionProblem {
    pub equation: Equation,
    pub geom: TargetGeometry,
    pub lambda: f64,
    pub grid: RadialGrid,
    /// `coth r` (hyperbolic) or `1/r` (Euclidean) at interior nodes; index 0 unused.
    coth: Vec<f64>,
    /// `1/sinh^2 r` (or `1/r^2`); index 0 unused.
    inv_s2: Vec<f64>,
    /// `U_lambda(r_i)`.
    pot: Vec<f64>,
}

impl EvolutionProblem {
    pub fn new(equation: Equation, geom: TargetGeometry, lambda: f64, grid: RadialGrid) -> Result<Self> {
        crate::model::check_lambda(lambda)?;
        let euclidean = equation == Equation::Euclidean4d;
        let mut coth = vec![0.0; grid.len()];
        let mut inv_s2 = vec![0.0; grid.len()];
        let mut pot = vec![0.0; grid.len()];
        for (i, &r) in grid.nodes().iter().enumerate() {
            if i > 0 {
                let s = if euclidean { r } else { r.sinh() };
                coth[i] = if euclidean { 1.0 / r } else { r.cosh() / s };
                inv_s2[i] = 1.0 / (s * s);
            }
            pot[i] = match equation {
                Equation::Nonlinear4d | Equation::Linear4d => potential_u(lambda, r)?,
                _ => 0.0,
            };
        }
        Ok(EvolutionProblem { equation, geom, lambda, grid, coth, inv_s2, pot })
    }

    fn check_state(&self, state: &FieldState) -> Result<()> {
        if state.formulation != self.equation.formulation() {
            return Err(invalid(format!(
                "state formulation {:?} does not match equation {:?}",
                state.formulation, self.equation
            )));
        }
        if state.grid.len() != self.grid.len() {
            return Err(invalid("state grid does not match problem grid"));
        }
        Ok(())
    }

    /// Second time derivative solved from the equation.
    ///
    /// Origin: odd fields are pinned (`rhs = 0`); even fields use the ghost
    /// stencil, under which `f_rr + c coth r f_r -> (1 + c) f_rr(0)`. The
    /// outer node is held Dirichlet (`rhs = 0`).
    pub fn rhs(&self, state: &FieldState) -> Result<Vec<f64>> {
        self.check_state(state)?;
        if state.f.iter().chain(state.ft.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NumericFailure { time: state.t });
        }
        self.rhs_unchecked(&state.f)
    }

    fn rhs_unchecked(&self, f: &[f64]) -> Result<Vec<f64>> {
        let n = self.grid.n();
        let dr = self.grid.dr();
        let dr2 = dr * dr;
        let nodes = self.grid.nodes();
        let mut out = vec![0.0; n + 1];

        let even = self.equation.formulation().parity() == Parity::Even;
        if even {
            // f_rr(0) from the even ghost f(-dr) = f(dr); the radial operator
            // u_rr + 3 coth r u_r limits to 4 u_rr at the origin.
            let frr0 = 2.0 * (f[1] - f[0]) / dr2;
            out[0] = match self.equation {
                Equation::Nonlinear4d => {
                    4.0 * frr0 + 2.0 * f[0] - self.pot[0] * f[0]
                        + nonlinearity_n4d_origin(self.lambda, f[0])
                }
                Equation::Linear4d | Equation::Linear4dFree => {
                    4.0 * frr0 + 2.0 * f[0] - self.pot[0] * f[0]
                }
                Equation::Euclidean4d => 4.0 * frr0 + nonlinearity_euc_origin(f[0]),
                _ => unreachable!(),
            };
        }

        for i in 1..n {
            let r = nodes[i];
            let frr = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / dr2;
            let fr = (f[i + 1] - f[i - 1]) / (2.0 * dr);
            out[i] = match self.equation {
                Equation::Wm2d => {
                    frr + self.coth[i] * fr - self.geom.gg_prime(f[i]) * self.inv_s2[i]
                }
                Equation::Perturbed2d => {
                    frr + self.coth[i] * fr + nonlinearity_f(self.lambda, r, f[i])?
                }
                Equation::Nonlinear4d => {
                    frr + 3.0 * self.coth[i] * fr + 2.0 * f[i] - self.pot[i] * f[i]
                        + nonlinearity_n4d(self.lambda, r, f[i])?
                }
                Equation::Linear4d | Equation::Linear4dFree => {
                    frr + 3.0 * self.coth[i] * fr + 2.0 * f[i] - self.pot[i] * f[i]
                }
                Equation::Euclidean4d => {
                    frr + 3.0 * self.coth[i] * fr + nonlinearity_euc(r, f[i])?
                }
            };
        }
        // out[n] stays 0: Dirichlet at r_max.
        Ok(out)
    }
}

/// One classical RK4 step of the system `(f, f_t)`.
///
/// Boundary conditions are re-imposed after each stage; the origin node of
/// odd fields and the outer node of every field never move.
pub fn step_rk4(problem: &EvolutionProblem, state: &FieldState, dt: f64) -> Result<FieldState> {
    if !(dt > 0.0) {
        return Err(invalid(format!("dt must be positive, got {dt}")));
    }
    problem.check_state(state)?;
    let next = step_rk4_raw(problem, state, dt)?;
    if next.f.iter().chain(next.ft.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NumericFailure { time: state.t });
    }
    Ok(next)
}

fn step_rk4_raw(problem: &EvolutionProblem, state: &FieldState, dt: f64) -> Result<FieldState> {
    let n = problem.grid.n();
    let odd = problem.equation.formulation().parity() == Parity::Odd;

    let pin = |f: &mut Vec<f64>, ft: &mut Vec<f64>, f0: &FieldState| {
        if odd {
            f[0] = f0.f[0];
            ft[0] = 0.0;
        }
        f[n] = f0.f[n];
        ft[n] = 0.0;
    };

    let stage = |f: &[f64]| problem.rhs_unchecked(f);

    // k1
    let a1 = stage(&state.f)?;
    // k2
    let mut f2: Vec<f64> = state.f.iter().zip(&state.ft).map(|(f, ft)| f + 0.5 * dt * ft).collect();
    let mut ft2: Vec<f64> = state.ft.iter().zip(&a1).map(|(ft, a)| ft + 0.5 * dt * a).collect();
    pin(&mut f2, &mut ft2, state);
    let a2 = stage(&f2)?;
    // k3
    let mut f3: Vec<f64> = state.f.iter().zip(&ft2).map(|(f, v)| f + 0.5 * dt * v).collect();
    let mut ft3: Vec<f64> = state.ft.iter().zip(&a2).map(|(ft, a)| ft + 0.5 * dt * a).collect();
    pin(&mut f3, &mut ft3, state);
    let a3 = stage(&f3)?;
    // k4
    let mut f4: Vec<f64> = state.f.iter().zip(&ft3).map(|(f, v)| f + dt * v).collect();
    let mut ft4: Vec<f64> = state.ft.iter().zip(&a3).map(|(ft, a)| ft + dt * a).collect();
    pin(&mut f4, &mut ft4, state);
    let a4 = stage(&f4)?;

    let mut f = Vec::with_capacity(n + 1);
    let mut ft = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let v1 = state.ft[i];
        let v2 = ft2[i];
        let v3 = ft3[i];
        let v4 = ft4[i];
        f.push(state.f[i] + dt / 6.0 * (v1 + 2.0 * v2 + 2.0 * v3 + v4));
        ft.push(state.ft[i] + dt / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]));
    }
    let mut next = FieldState {
        formulation: state.formulation,
        lambda: state.lambda,
        t: state.t + dt,
        f,
        ft,
        grid: state.grid.clone(),
    };
    pin(&mut next.f, &mut next.ft, state);
    Ok(next)
}

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    /// `dt = cfl * dr`; must lie in `(0, 1]`.
    pub cfl: f64,
    pub t_end: f64,
    /// Observers fire every `output_stride` steps (and on the initial state).
    pub output_stride: usize,
    /// Skip the `r_max >= support + t_end + 2` check.
    pub waive_causality: bool,
}

impl StepControl {
    pub fn new(t_end: f64) -> Self {
        StepControl { cfl: 0.5, t_end, output_stride: 1, waive_causality: false }
    }
}

#[derive(Debug, Clone)]
pub struct EvolveOutcome {
    pub state: FieldState,
    pub steps: usize,
    /// False when the causality precondition did not hold (warning, not error).
    pub causality_ok: bool,
}

/// Largest radius where the data deviates from the static background.
///
/// For `psi2d` the background is `P_lambda`; for the residual formulations it
/// is zero.
pub fn data_support(state: &FieldState) -> f64 {
    let tol = 1e-12;
    let mut support = 0.0;
    for (i, &r) in state.grid.nodes().iter().enumerate() {
        let background = if state.formulation == Formulation::Psi2d {
            p_lambda(state.lambda, r).unwrap_or(0.0)
        } else {
            0.0
        };
        if (state.f[i] - background).abs() > tol || state.ft[i].abs() > tol {
            support = r;
        }
    }
    support
}

/// Advance to `t_end`, invoking each observer every `output_stride` steps.
///
/// A NaN/Inf or a grid-scale gradient (`|f_{i+1} - f_i| > 1`) stops the run
/// with [`Error::NumericFailure`] carrying the last healthy time.
pub fn evolve(
    problem: &EvolutionProblem,
    state: &FieldState,
    control: &StepControl,
    observers: &mut [&mut dyn FnMut(&FieldState)],
) -> Result<EvolveOutcome> {
    problem.check_state(state)?;
    if !(control.cfl > 0.0 && control.cfl <= 1.0) {
        return Err(invalid(format!("cfl must lie in (0, 1], got {}", control.cfl)));
    }
    if control.t_end < 0.0 {
        return Err(invalid("t_end must be nonnegative"));
    }

    let causality_ok = control.waive_causality
        || problem.grid.r_max() >= data_support(state) + control.t_end + 2.0;

    if control.t_end == 0.0 {
        return Ok(EvolveOutcome { state: state.clone(), steps: 0, causality_ok });
    }

    let dt_max = control.cfl * problem.grid.dr();
    let steps = (control.t_end / dt_max).ceil() as usize;
    let dt = control.t_end / steps as f64;

    let mut current = state.clone();
    for obs in observers.iter_mut() {
        obs(&current);
    }
    for k in 1..=steps {
        let next = step_rk4(problem, &current, dt)?;
        // grid-scale gradient => under-resolved concentration; treat as blow-up
        if next.f.windows(2).any(|w| (w[1] - w[0]).abs() > 1.0) {
            return Err(Error::NumericFailure { time: current.t });
        }
        current = next;
        if k % control.output_stride == 0 || k == steps {
            for obs in observers.iter_mut() {
                obs(&current);
            }
        }
    }
    Ok(EvolveOutcome { state: current, steps, causality_ok })
}

/// Cubic (4-point Lagrange) interpolation of grid samples, with the origin
/// stencil closed by the declared parity.
pub fn interpolate_cubic(grid: &RadialGrid, samples: &[f64], parity: Parity, x: f64) -> f64 {
    let dr = grid.dr();
    let n = grid.n() as isize;
    let i = ((x / dr).floor() as isize).clamp(0, n - 1);
    // stencil nodes i-1 .. i+2, shifted away from the right edge
    let base = (i - 1).min(n - 3);
    let fetch = |j: isize| -> (f64, f64) {
        if j < 0 {
            let sign = if parity == Parity::Even { 1.0 } else { -1.0 };
            (j as f64 * dr, sign * samples[(-j) as usize])
        } else {
            (j as f64 * dr, samples[j as usize])
        }
    };
    let pts: Vec<(f64, f64)> = (base..base + 4).map(fetch).collect();
    let mut acc = 0.0;
    for (k, &(xk, yk)) in pts.iter().enumerate() {
        let mut w = yk;
        for (m, &(xm, _)) in pts.iter().enumerate() {
            if m != k {
                w *= (x - xm) / (xk - xm);
            }
        }
        acc += w;
    }
    acc
}

/// Pull a concentrated hyperbolic 4d state back to the Euclidean frame:
/// `v(rho) = u(rho/scale)/scale`, `v_t(rho) = u_t(rho/scale)/scale^2`,
/// resampled onto `target` by cubic interpolation. Time dilation is the
/// caller's responsibility.
pub fn rescale_to_euclidean(
    state: &FieldState,
    scale: f64,
    target: &RadialGrid,
) -> Result<FieldState> {
    if state.formulation != Formulation::U4d {
        return Err(invalid("rescale_to_euclidean expects a u4d state"));
    }
    if scale < 1.0 {
        return Err(invalid(format!("scale must be >= 1, got {scale}")));
    }
    let sample = |src: &[f64], power: f64| -> Vec<f64> {
        target
            .nodes()
            .iter()
            .map(|&rho| {
                let r = rho / scale;
                if r > state.grid.r_max() {
                    0.0
                } else {
                    interpolate_cubic(&state.grid, src, Parity::Even, r) / scale.powf(power)
                }
            })
            .collect()
    };
    FieldState::new(
        Formulation::VEuclidean4d,
        0.0,
        state.t * scale,
        sample(&state.f, 1.0),
        sample(&state.ft, 2.0),
        target.clone(),
    )
}
