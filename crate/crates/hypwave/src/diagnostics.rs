//! Measured quantities: local/cone/annular energies, self-similar-region
//! energies, concentration scales, bubble extraction for the sphere target,
//! time-averaged kinetic energy, and the scattering indicators (interior
//! residual, S-norm and space-time accumulators).
//!
//! All functions are pure over read-only snapshots. Local energies are built
//! on the shared cumulative quadrature, so annular values are exactly
//! additive across shared endpoints.

use crate::error::{invalid, Error, Result};
use crate::evolve::interpolate_cubic;
use crate::grid::{cumulative_integral, integrate, make_grid, Parity, WeightKind};
use crate::model::{
    energy_density, lift_2d_to_4d, p_lambda, total_energy, FieldState, Formulation,
    TargetGeometry,
};

/// Snapshot energy bookkeeping: total, kinetic part, and a set of annular
/// local energies `(a, b, value)`.
#[derive(Debug, Clone)]
pub struct EnergyReport {
    pub t: f64,
    pub total: f64,
    pub kinetic: f64,
    pub local: Vec<(f64, f64, f64)>,
}

/// Backward-light-cone diagnostics near a (putative) blow-up time.
#[derive(Debug, Clone)]
pub struct ConeDiagnostics {
    pub t: f64,
    /// Energy inside the cone radius `t_to_blowup`.
    pub cone_energy: f64,
    /// `(mu, energy of the self-similar annulus [mu*t, t])` pairs.
    pub self_similar_energy: Vec<(f64, f64)>,
    pub kinetic_time_avg: f64,
}

/// Scattering proxies: the free-radiation component cannot be extracted
/// numerically, so decay of the interior residual together with saturation of
/// the accumulators stands in for scattering to the harmonic map.
#[derive(Debug, Clone, Copy)]
pub struct ScatteringIndicators {
    pub t: f64,
    /// Energy-norm distance to the static harmonic map on `r <= t/2`.
    pub interior_residual: f64,
    /// Accumulated cube of the `L^6` norm of the 4d variable.
    pub s_norm_accumulated: f64,
    /// Accumulated `int u^4 sinh^3 r dr`.
    pub morawetz_accumulated: f64,
}

fn check_psi2d(state: &FieldState) -> Result<()> {
    if state.formulation != Formulation::Psi2d {
        return Err(invalid(format!(
            "expected a psi2d state, got {:?}",
            state.formulation
        )));
    }
    Ok(())
}

/// Local energy over `[a, b]` with endpoints snapped to the nearest nodes.
///
/// Built from the cumulative quadrature of the energy density, so values over
/// adjacent intervals add exactly.
pub fn local_energy(
    state: &FieldState,
    geom: TargetGeometry,
    a: f64,
    b: f64,
) -> Result<f64> {
    check_psi2d(state)?;
    if !(a >= 0.0) || a >= b {
        return Err(invalid(format!("need 0 <= a < b, got a = {a}, b = {b}")));
    }
    if b > state.grid.r_max() + 0.5 * state.grid.dr() {
        return Err(invalid(format!(
            "b = {b} exceeds the grid extent r_max = {}",
            state.grid.r_max()
        )));
    }
    let density = energy_density(state, geom)?;
    let cum = cumulative_integral(&state.grid, &density, WeightKind::H2)?;
    let ia = state.grid.nearest_node(a);
    let ib = state.grid.nearest_node(b);
    Ok(cum[ib] - cum[ia])
}

/// Energy of the self-similar annulus `[mu * t_to_blowup, t_to_blowup]`
/// (clamped to the grid extent).
pub fn self_similar_energy(
    state: &FieldState,
    geom: TargetGeometry,
    t_to_blowup: f64,
    mu: f64,
) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(invalid(format!("mu must lie in (0, 1), got {mu}")));
    }
    if !(t_to_blowup > 0.0) {
        return Err(invalid(format!("t_to_blowup must be positive, got {t_to_blowup}")));
    }
    let b = t_to_blowup.min(state.grid.r_max());
    let a = mu * b;
    if state.grid.nearest_node(a) == state.grid.nearest_node(b) {
        return Ok(0.0); // annulus thinner than the mesh
    }
    local_energy(state, geom, a, b)
}

/// Smallest radius `b` containing `fraction` of the cone energy
/// `E_0^{t_to_blowup}`.
pub fn concentration_scale(
    state: &FieldState,
    geom: TargetGeometry,
    t_to_blowup: f64,
    fraction: f64,
) -> Result<f64> {
    check_psi2d(state)?;
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(invalid(format!("fraction must lie in (0, 1), got {fraction}")));
    }
    if !(t_to_blowup > 0.0) {
        return Err(invalid(format!("t_to_blowup must be positive, got {t_to_blowup}")));
    }
    let density = energy_density(state, geom)?;
    let cum = cumulative_integral(&state.grid, &density, WeightKind::H2)?;
    let ib = state.grid.nearest_node(t_to_blowup.min(state.grid.r_max()));
    let cone = cum[ib];
    if cone <= 0.0 {
        return Err(Error::UndefinedScale);
    }
    let target = fraction * cone;
    // cum is nondecreasing: bisect for the first node with cum >= target
    let (mut lo, mut hi) = (0usize, ib);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if cum[mid] >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(state.grid.nodes()[lo])
}

/// Relative weighted-`L^2` distance on `r in [0, 10]` between the rescaled
/// map `psi(scale * r)` and the Euclidean bubble `2 arctan r`.
///
/// Values near zero indicate concentration onto the bubble; `psi = 0` gives
/// exactly 1 (the normalization is the bubble's own norm). Refuses
/// hyperbolic-target states, for which no such bubble exists.
pub fn bubble_compare(state: &FieldState, geom: TargetGeometry, scale: f64) -> Result<f64> {
    check_psi2d(state)?;
    if geom != TargetGeometry::Sphere {
        return Err(invalid("bubble comparison requires the sphere target"));
    }
    if !(scale > 0.0) {
        return Err(invalid(format!("scale must be positive, got {scale}")));
    }
    let probe = make_grid(10.0, 4000)?;
    let r_max = state.grid.r_max();
    let mut diff2 = Vec::with_capacity(probe.len());
    let mut ref2 = Vec::with_capacity(probe.len());
    for &rho in probe.nodes() {
        let r = (scale * rho).min(r_max);
        let psi = interpolate_cubic(&state.grid, &state.f, Parity::Odd, r);
        let q = 2.0 * rho.atan();
        diff2.push((psi - q) * (psi - q));
        ref2.push(q * q);
    }
    let num = integrate(&probe, &diff2, WeightKind::Euc2)?;
    let den = integrate(&probe, &ref2, WeightKind::Euc2)?;
    Ok((num / den).sqrt())
}

/// Trapezoid-in-time average of the backward-cone kinetic energy
/// `(1/2) int_0^{radius} psi_t^2 sinh r dr`, where the cone radius shrinks
/// linearly from `t_to_blowup` at the first snapshot.
pub fn kinetic_time_average(history: &[FieldState], t_to_blowup: f64) -> Result<f64> {
    if history.is_empty() {
        return Err(invalid("kinetic_time_average requires at least one snapshot"));
    }
    if !(t_to_blowup > 0.0) {
        return Err(invalid(format!("t_to_blowup must be positive, got {t_to_blowup}")));
    }
    let t0 = history[0].t;
    let cone_kinetic = |s: &FieldState| -> Result<f64> {
        check_psi2d(s)?;
        let radius = (t_to_blowup - (s.t - t0)).max(0.0).min(s.grid.r_max());
        if radius == 0.0 {
            return Ok(0.0);
        }
        let density: Vec<f64> = s.ft.iter().map(|&v| 0.5 * v * v).collect();
        let cum = cumulative_integral(&s.grid, &density, WeightKind::H2)?;
        Ok(cum[s.grid.nearest_node(radius)])
    };
    if history.len() == 1 {
        return cone_kinetic(&history[0]);
    }
    let mut acc = 0.0;
    let mut span = 0.0;
    let mut prev = cone_kinetic(&history[0])?;
    for w in history.windows(2) {
        let dt = w[1].t - w[0].t;
        if dt < 0.0 {
            return Err(invalid("history must be time-ordered"));
        }
        let next = cone_kinetic(&w[1])?;
        acc += 0.5 * (prev + next) * dt;
        span += dt;
        prev = next;
    }
    if span == 0.0 {
        return Ok(prev);
    }
    Ok(acc / span)
}

/// Per-node density of the energy norm of `psi - (P_lambda, 0)`.
fn residual_h0_density(state: &FieldState, lambda: f64) -> Result<Vec<f64>> {
    let nodes = state.grid.nodes();
    let phi: Vec<f64> = nodes
        .iter()
        .zip(&state.f)
        .map(|(&r, &psi)| Ok(psi - p_lambda(lambda, r)?))
        .collect::<Result<_>>()?;
    let dphi = crate::grid::d_dr(&state.grid, &phi, Parity::Odd)?;
    Ok(nodes
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let mid = if r == 0.0 {
                dphi[0] * dphi[0]
            } else {
                let q = phi[i] / r.sinh();
                q * q
            };
            dphi[i] * dphi[i] + mid + state.ft[i] * state.ft[i]
        })
        .collect())
}

/// Scattering indicators at the state's time.
///
/// The accumulators are advanced from `prev` by a left-endpoint rule over the
/// elapsed interval (both rates are nonnegative, so the accumulated values are
/// nondecreasing); pass `None` to start them at zero.
pub fn scattering_indicators(
    state: &FieldState,
    lambda: f64,
    prev: Option<&ScatteringIndicators>,
) -> Result<ScatteringIndicators> {
    check_psi2d(state)?;
    if state.t < 0.0 {
        return Err(invalid("scattering indicators are defined for t >= 0"));
    }
    if (state.lambda - lambda).abs() > 1e-6 {
        return Err(Error::ClassMismatch { expected: lambda, got: state.lambda });
    }

    let density = residual_h0_density(state, lambda)?;
    let cum = cumulative_integral(&state.grid, &density, WeightKind::H2)?;
    let edge = state.grid.nearest_node((0.5 * state.t).min(state.grid.r_max()));
    let interior_residual = cum[edge].max(0.0).sqrt();

    // residual in the 4d frame for the nonlinear rates
    let phi = FieldState::new(
        Formulation::Phi2d,
        lambda,
        state.t,
        state
            .grid
            .nodes()
            .iter()
            .zip(&state.f)
            .map(|(&r, &psi)| Ok(psi - p_lambda(lambda, r)?))
            .collect::<Result<_>>()?,
        state.ft.clone(),
        state.grid.clone(),
    )?;
    let u = lift_2d_to_4d(&phi)?;
    let u6: Vec<f64> = u.f.iter().map(|&v| v.powi(6)).collect();
    let u4: Vec<f64> = u.f.iter().map(|&v| v.powi(4)).collect();
    let s_rate = integrate(&u.grid, &u6, WeightKind::H4)?.max(0.0).sqrt();
    let m_rate = integrate(&u.grid, &u4, WeightKind::H4)?.max(0.0);

    let (mut s_acc, mut m_acc) = (0.0, 0.0);
    if let Some(p) = prev {
        let dt = state.t - p.t;
        if dt < 0.0 {
            return Err(invalid("previous indicators are from a later time"));
        }
        s_acc = p.s_norm_accumulated + dt * s_rate;
        m_acc = p.morawetz_accumulated + dt * m_rate;
    }
    Ok(ScatteringIndicators {
        t: state.t,
        interior_residual,
        s_norm_accumulated: s_acc,
        morawetz_accumulated: m_acc,
    })
}

/// Energy report with annular local energies between consecutive `edges`.
pub fn energy_report(
    state: &FieldState,
    geom: TargetGeometry,
    edges: &[f64],
) -> Result<EnergyReport> {
    check_psi2d(state)?;
    let total = total_energy(state, geom)?;
    let kin: Vec<f64> = state.ft.iter().map(|&v| 0.5 * v * v).collect();
    let kinetic = integrate(&state.grid, &kin, WeightKind::H2)?;
    let mut local = Vec::new();
    for w in edges.windows(2) {
        local.push((w[0], w[1], local_energy(state, geom, w[0], w[1])?));
    }
    Ok(EnergyReport { t: state.t, total, kinetic, local })
}

/// Cone diagnostics from a time-ordered history approaching blow-up;
/// energies are measured on the final snapshot.
pub fn cone_diagnostics(
    history: &[FieldState],
    geom: TargetGeometry,
    t_to_blowup: f64,
    mus: &[f64],
) -> Result<ConeDiagnostics> {
    let last = history
        .last()
        .ok_or_else(|| invalid("cone_diagnostics requires at least one snapshot"))?;
    let remaining = (t_to_blowup - (last.t - history[0].t)).max(1e-12);
    let radius = remaining.min(last.grid.r_max());
    let cone_energy = local_energy(last, geom, 0.0, radius.max(last.grid.dr() * 1.5))?;
    let mut ss = Vec::new();
    for &mu in mus {
        ss.push((mu, self_similar_energy(last, geom, remaining, mu)?));
    }
    let kinetic_time_avg = kinetic_time_average(history, t_to_blowup)?;
    Ok(ConeDiagnostics { t: last.t, cone_energy, self_similar_energy: ss, kinetic_time_avg })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn static_psi(lambda: f64, r_max: f64, n: usize) -> FieldState {
        let grid = make_grid(r_max, n).unwrap();
        let f: Vec<f64> = grid.nodes().iter().map(|&r| p_lambda(lambda, r).unwrap()).collect();
        let ft = vec![0.0; grid.len()];
        FieldState::new(Formulation::Psi2d, lambda, 0.0, f, ft, grid).unwrap()
    }

    fn bump_psi(lambda: f64, amp: f64, r0: f64, sigma: f64, r_max: f64, n: usize) -> FieldState {
        let grid = make_grid(r_max, n).unwrap();
        let f: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&r| {
                let b = amp * (r / sigma).powi(2) * (-((r - r0) / sigma).powi(2)).exp();
                p_lambda(lambda, r).unwrap() + b
            })
            .collect();
        let ft = vec![0.0; grid.len()];
        FieldState::new(Formulation::Psi2d, lambda, 0.0, f, ft, grid).unwrap()
    }

    #[test]
    fn local_energy_full_range_matches_total() {
        let s = bump_psi(0.3, 0.5, 2.0, 0.7, 20.0, 2000);
        let total = total_energy(&s, TargetGeometry::Hyperbolic).unwrap();
        let local = local_energy(&s, TargetGeometry::Hyperbolic, 0.0, 20.0).unwrap();
        assert!((total - local).abs() < 1e-12, "{total} vs {local}");
    }

    #[test]
    fn local_energy_zero_state() {
        let grid = make_grid(10.0, 500).unwrap();
        let z = FieldState::zero(Formulation::Psi2d, 0.0, grid);
        assert_eq!(local_energy(&z, TargetGeometry::Hyperbolic, 1.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn local_energy_monotone_in_b() {
        let s = static_psi(0.5, 20.0, 2000);
        let e1 = local_energy(&s, TargetGeometry::Hyperbolic, 0.0, 1.0).unwrap();
        let e2 = local_energy(&s, TargetGeometry::Hyperbolic, 0.0, 2.0).unwrap();
        assert!(e1 >= 0.0);
        assert!(e2 >= e1);
    }

    #[test]
    fn local_energy_exact_additivity() {
        let s = bump_psi(0.3, 0.5, 2.0, 0.7, 20.0, 2000);
        let g = TargetGeometry::Hyperbolic;
        let lhs = local_energy(&s, g, 0.5, 3.0).unwrap() + local_energy(&s, g, 3.0, 7.5).unwrap();
        let rhs = local_energy(&s, g, 0.5, 7.5).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn local_energy_argument_validation() {
        let s = static_psi(0.5, 10.0, 500);
        assert!(local_energy(&s, TargetGeometry::Hyperbolic, 2.0, 1.0).is_err());
        assert!(local_energy(&s, TargetGeometry::Hyperbolic, 1.0, 1.0).is_err());
        assert!(local_energy(&s, TargetGeometry::Hyperbolic, 0.0, 30.0).is_err());
    }

    #[test]
    fn self_similar_thin_annulus_vanishes() {
        let s = bump_psi(0.3, 0.5, 2.0, 0.7, 20.0, 2000);
        let v = self_similar_energy(&s, TargetGeometry::Hyperbolic, 5.0, 0.999).unwrap();
        assert!(v.abs() < 1e-3, "thin annulus should carry almost nothing: {v}");
        assert!(self_similar_energy(&s, TargetGeometry::Hyperbolic, 5.0, 1.2).is_err());
        assert!(self_similar_energy(&s, TargetGeometry::Hyperbolic, 5.0, 0.0).is_err());
        // nonnegativity on a generic state
        let v = self_similar_energy(&s, TargetGeometry::Hyperbolic, 5.0, 0.5).unwrap();
        assert!(v >= 0.0);
    }

    #[test]
    fn concentration_scale_uniform_profile() {
        // psi = c * r on [0, 1] then frozen; on a Euclidean-like small grid the
        // half-energy radius of the (known) cumulative integral is recovered.
        let grid = make_grid(4.0, 4000).unwrap();
        let f: Vec<f64> = grid.nodes().iter().map(|&r| 0.1 * r.min(1.0)).collect();
        let s = FieldState::new(
            Formulation::Psi2d,
            0.0,
            0.0,
            f,
            vec![0.0; grid.len()],
            grid,
        )
        .unwrap();
        let g = TargetGeometry::Hyperbolic;
        let b = concentration_scale(&s, g, 1.0, 0.5).unwrap();
        // oracle: first node where the cumulative energy crosses half the cone energy
        let density = energy_density(&s, g).unwrap();
        let cum = cumulative_integral(&s.grid, &density, WeightKind::H2).unwrap();
        let cone = cum[s.grid.nearest_node(1.0)];
        let expect = s.grid.nodes()[cum.iter().position(|&v| v >= 0.5 * cone).unwrap()];
        assert_eq!(b, expect);

        // fraction -> 1 pushes b to the cone radius
        let b99 = concentration_scale(&s, g, 1.0, 0.999).unwrap();
        assert!(b99 > 0.9 * b && b99 <= 1.0 + 1e-12, "b99 = {b99}");
    }

    #[test]
    fn concentration_scale_bump_and_errors() {
        let s = bump_psi(0.0, 0.5, 1.0, 0.2, 20.0, 2000);
        let g = TargetGeometry::Hyperbolic;
        let b = concentration_scale(&s, g, 10.0, 0.9).unwrap();
        assert!(b > 0.5 && b < 2.0, "bump at r0=1, width 0.2: b = {b}");

        let z = FieldState::zero(Formulation::Psi2d, 0.0, make_grid(10.0, 500).unwrap());
        assert!(matches!(
            concentration_scale(&z, g, 5.0, 0.5),
            Err(Error::UndefinedScale)
        ));
        assert!(concentration_scale(&s, g, 5.0, 1.5).is_err());
    }

    #[test]
    fn bubble_compare_exact_profile() {
        let mu = 0.5;
        let grid = make_grid(8.0, 8000).unwrap();
        let f: Vec<f64> = grid.nodes().iter().map(|&r| 2.0 * (r / mu).atan()).collect();
        let s = FieldState::new(
            Formulation::Psi2d,
            0.0,
            0.0,
            f,
            vec![0.0; grid.len()],
            grid,
        )
        .unwrap();
        let d = bubble_compare(&s, TargetGeometry::Sphere, mu).unwrap();
        assert!(d < 1e-6, "exact profile should match: {d}");
    }

    #[test]
    fn bubble_compare_zero_state_and_target_guard() {
        let z = FieldState::zero(Formulation::Psi2d, 0.0, make_grid(12.0, 600).unwrap());
        let d = bubble_compare(&z, TargetGeometry::Sphere, 1.0).unwrap();
        assert!((d - 1.0).abs() < 1e-12, "zero state is at relative distance 1: {d}");
        assert!(bubble_compare(&z, TargetGeometry::Hyperbolic, 1.0).is_err());
    }

    #[test]
    fn kinetic_time_average_basics() {
        let s = static_psi(0.3, 15.0, 1000);
        assert_eq!(kinetic_time_average(&[s.clone()], 5.0).unwrap(), 0.0);
        assert!(kinetic_time_average(&[], 5.0).is_err());

        // single kinetic snapshot: the average is that snapshot's cone value
        let grid = make_grid(15.0, 1000).unwrap();
        let ft: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&r| (-(r - 1.0) * (r - 1.0) / 0.1).exp())
            .collect();
        let k = FieldState::new(Formulation::Psi2d, 0.0, 0.0, vec![0.0; grid.len()], ft, grid)
            .unwrap();
        let avg = kinetic_time_average(&[k.clone()], 4.0).unwrap();
        let direct = {
            let d: Vec<f64> = k.ft.iter().map(|&v| 0.5 * v * v).collect();
            let cum = cumulative_integral(&k.grid, &d, WeightKind::H2).unwrap();
            cum[k.grid.nearest_node(4.0)]
        };
        assert!((avg - direct).abs() < 1e-14);
    }

    #[test]
    fn scattering_indicators_static_and_accumulation() {
        let s = static_psi(0.4, 15.0, 1500);
        let ind = scattering_indicators(&s, 0.4, None).unwrap();
        assert!(ind.interior_residual < 1e-10, "{}", ind.interior_residual);
        assert_eq!(ind.s_norm_accumulated, 0.0);

        assert!(matches!(
            scattering_indicators(&s, 0.2, None),
            Err(Error::ClassMismatch { .. })
        ));

        // accumulators are nondecreasing under chained calls
        let mut b = bump_psi(0.4, 0.3, 2.0, 0.5, 15.0, 1500);
        b.t = 1.0;
        let i1 = scattering_indicators(&b, 0.4, Some(&ind)).unwrap();
        let mut b2 = b.clone();
        b2.t = 2.0;
        let i2 = scattering_indicators(&b2, 0.4, Some(&i1)).unwrap();
        assert!(i1.s_norm_accumulated >= ind.s_norm_accumulated);
        assert!(i2.s_norm_accumulated >= i1.s_norm_accumulated);
        assert!(i2.morawetz_accumulated >= i1.morawetz_accumulated);
        assert!(i2.morawetz_accumulated > 0.0);
    }

    #[test]
    fn energy_report_consistency() {
        let s = bump_psi(0.3, 0.5, 2.0, 0.7, 20.0, 2000);
        let rep = energy_report(&s, TargetGeometry::Hyperbolic, &[0.0, 5.0, 20.0]).unwrap();
        let sum: f64 = rep.local.iter().map(|&(_, _, v)| v).sum();
        assert!((sum - rep.total).abs() < 1e-12);
        assert!(rep.kinetic >= 0.0 && rep.kinetic <= rep.total + 1e-12);
    }

    #[test]
    fn cone_diagnostics_shape() {
        let s = bump_psi(0.0, 0.4, 1.0, 0.3, 15.0, 1500);
        let d = cone_diagnostics(
            &[s],
            TargetGeometry::Hyperbolic,
            3.0,
            &[0.25, 0.5, 0.75],
        )
        .unwrap();
        assert_eq!(d.self_similar_energy.len(), 3);
        for &(_, v) in &d.self_similar_energy {
            assert!(v >= 0.0 && v <= d.cone_energy + 1e-12);
        }
    }
}
