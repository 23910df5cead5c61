//! Numerical verification of the multiplier (virial) identity along the
//! perturbative flow: the time derivative of
//! `< phi_t | a_r phi_r + phi/2 >` equals
//! `- int a_rr phi_r^2 sinh r dr - I[phi]/4`,
//! and the discrete residual converges at second order.
//!
//! Run with `cargo run --example virial_identity`.

use hypwave::evolve::{Equation, EvolutionProblem};
use hypwave::grid::make_grid;
use hypwave::model::{FieldState, Formulation, TargetGeometry};
use hypwave::morawetz::virial_identity_residual;

fn bump_state(lambda: f64, n: usize, r_max: f64) -> hypwave::Result<FieldState> {
    let grid = make_grid(r_max, n)?;
    let (amp, r0, sigma) = (0.03, 2.0, 0.7);
    let f: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&r| amp * (r / sigma).powi(2) * (-((r - r0) / sigma).powi(2)).exp())
        .collect();
    FieldState::new(Formulation::Phi2d, lambda, 0.0, f, vec![0.0; grid.len()], grid)
}

fn main() -> hypwave::Result<()> {
    let lambda = 0.3;
    let r_max = 15.0;
    println!("{:>8} {:>10} {:>14} {:>8}", "n", "dr", "residual", "ratio");
    let mut prev: Option<f64> = None;
    for &n in &[1500usize, 3000, 6000, 12000] {
        let state = bump_state(lambda, n, r_max)?;
        let problem = EvolutionProblem::new(
            Equation::Perturbed2d,
            TargetGeometry::Hyperbolic,
            lambda,
            state.grid.clone(),
        )?;
        let dt = 0.5 * state.grid.dr();
        let res = virial_identity_residual(&problem, &state, dt)?;
        let ratio = prev.map(|p| p / res).unwrap_or(f64::NAN);
        println!("{n:>8} {:>10.2e} {res:>14.6e} {ratio:>8.2}", state.grid.dr());
        if let Some(p) = prev {
            assert!(p / res > 3.0, "residual should shrink ~4x per refinement");
        }
        prev = Some(res);
    }
    println!("\nsecond-order consistency of the identity confirmed");
    Ok(())
}
