//! Target-geometry contrast: the same large ingoing pulse blows up in
//! finite time for the sphere target (energy concentrates and a bubble —
//! the Euclidean harmonic map `2 arctan r` — emerges at a shrinking scale),
//! while on the hyperbolic target it disperses and the run completes.
//!
//! Run with `cargo run --example bubbling_contrast`.

use hypwave::diagnostics::{bubble_compare, concentration_scale, self_similar_energy};
use hypwave::error::Error;
use hypwave::evolve::{evolve, Equation, EvolutionProblem, StepControl};
use hypwave::grid::make_grid;
use hypwave::model::{FieldState, Formulation, TargetGeometry};

fn pulse(grid: &hypwave::grid::RadialGrid) -> (Vec<f64>, Vec<f64>) {
    let (amp, r0, sigma) = (0.5, 2.0, 0.8);
    let f: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&r| amp * (r / sigma).powi(2) * (-((r - r0) / sigma).powi(2)).exp())
        .collect();
    // ingoing: psi_t = +psi_r
    let ft: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&r| {
            let g = (-((r - r0) / sigma).powi(2)).exp();
            amp * g / (sigma * sigma) * (2.0 * r - (r / sigma).powi(2) * 2.0 * (r - r0))
        })
        .collect();
    (f, ft)
}

fn run(target: TargetGeometry) -> hypwave::Result<(Result<(), f64>, Vec<FieldState>)> {
    let grid = make_grid(8.0, 4000)?;
    let (f, ft) = pulse(&grid);
    let state = FieldState::new(Formulation::Psi2d, 0.0, 0.0, f, ft, grid.clone())?;
    let problem = EvolutionProblem::new(Equation::Wm2d, target, 0.0, grid)?;
    let control = StepControl { cfl: 0.5, t_end: 4.0, output_stride: 5, waive_causality: true };
    let mut ring: Vec<FieldState> = Vec::new();
    let outcome = {
        let mut observer = |s: &FieldState| {
            if ring.len() == 40 {
                ring.remove(0);
            }
            ring.push(s.clone());
        };
        evolve(&problem, &state, &control, &mut [&mut observer])
    };
    match outcome {
        Ok(_) => Ok((Ok(()), ring)),
        Err(Error::NumericFailure { time }) => Ok((Err(time), ring)),
        Err(e) => Err(e),
    }
}

fn main() -> hypwave::Result<()> {
    // Sphere target: blow-up with Struwe-type bubbling.
    let (outcome, ring) = run(TargetGeometry::Sphere)?;
    let t_star = outcome.expect_err("the sphere run must blow up");
    println!("sphere target: blow-up at t* = {t_star:.4}");
    println!(
        "{:>8} {:>14} {:>12} {:>16}",
        "t", "ss energy(1/2)", "scale", "bubble distance"
    );
    let tail = &ring[ring.len() - 5..];
    let mut last_distance = f64::NAN;
    for s in tail {
        let remaining = (t_star - s.t).max(1.5 * s.grid.dr());
        let ss = self_similar_energy(s, TargetGeometry::Sphere, remaining, 0.5)?;
        let scale = concentration_scale(s, TargetGeometry::Sphere, remaining, 0.5)?;
        let d = bubble_compare(s, TargetGeometry::Sphere, scale)?;
        println!("{:>8.4} {ss:>14.6e} {scale:>12.4e} {d:>16.4}", s.t);
        last_distance = d;
    }
    assert!(
        last_distance < 0.2,
        "rescaled profile should approach the bubble 2 arctan r"
    );

    // Hyperbolic target, identical data: globally regular.
    let (outcome, ring) = run(TargetGeometry::Hyperbolic)?;
    assert!(outcome.is_ok(), "the hyperbolic run must complete");
    println!(
        "\nhyperbolic target: completed to t = {:.2} without concentration",
        ring.last().unwrap().t
    );
    Ok(())
}
