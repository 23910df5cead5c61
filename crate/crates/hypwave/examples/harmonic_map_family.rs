//! The static harmonic-map family and its closed-form invariants.
//!
//! Prints, for a range of the parameter `lambda`:
//! - the profile values `P_lambda(r) = 2 artanh(lambda tanh(r/2))`,
//! - the conserved energy against the closed form `2 lambda^2 / (1 - lambda^2)`,
//! - the linearization potential at the origin, `U_lambda(0) = 2 lambda^2`.
//!
//! Run with `cargo run --example harmonic_map_family`.

use hypwave::grid::make_grid;
use hypwave::model::{
    harmonic_map_energy, p_lambda, potential_u, total_energy, FieldState, Formulation,
    TargetGeometry,
};

fn main() -> hypwave::Result<()> {
    let grid = make_grid(40.0, 40_000)?;

    println!("{:>6} {:>14} {:>14} {:>14} {:>12} {:>12}", "lambda", "quad energy", "closed form",
        "rel err", "P(1)", "U(0)");
    for &lambda in &[0.1, 0.3, 0.5, 0.7, 0.9] {
        let psi: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&r| p_lambda(lambda, r))
            .collect::<hypwave::Result<_>>()?;
        let state = FieldState::new(
            Formulation::Psi2d,
            lambda,
            0.0,
            psi,
            vec![0.0; grid.len()],
            grid.clone(),
        )?;
        let quad = total_energy(&state, TargetGeometry::Hyperbolic)?;
        let exact = harmonic_map_energy(lambda)?;
        let rel = (quad - exact).abs() / exact;
        println!(
            "{lambda:>6.2} {quad:>14.8} {exact:>14.8} {rel:>12.3e} {:>12.6} {:>12.6}",
            p_lambda(lambda, 1.0)?,
            potential_u(lambda, 0.0)?
        );
        assert!(rel < 1e-6, "quadrature should reproduce the closed form");
        assert!(
            (potential_u(lambda, 0.0)? - 2.0 * lambda * lambda).abs() < 1e-14,
            "U_lambda(0) = 2 lambda^2"
        );
    }

    // The family is monotone in lambda and asymptotes to 2 artanh(lambda).
    let lambda = 0.6;
    let limit = 2.0 * (0.6f64).atanh();
    let tail = p_lambda(lambda, 35.0)?;
    println!("\nP_0.6(35) = {tail:.12}  (asymptote 2 artanh 0.6 = {limit:.12})");
    assert!((tail - limit).abs() < 1e-12);
    Ok(())
}
