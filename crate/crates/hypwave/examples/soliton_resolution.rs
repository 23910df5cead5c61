//! Soliton resolution in action: a large perturbation of the static map
//! radiates away and the solution settles back onto the harmonic-map family.
//!
//! The run tracks three indicators along the flow:
//! - `interior_residual`: energy of `psi - P_lambda` inside the shrunken
//!   cone `r <= t/2` — should decay as radiation exits;
//! - `s_norm_accumulated`: a spacetime Strichartz-type norm of the lifted
//!   4d field — should level off (finite), the quantitative signature of
//!   scattering of the perturbation;
//! - `morawetz_accumulated`: the spacetime quartic Morawetz integral —
//!   nondecreasing and bounded by a multiple of the conserved energy.
//!
//! Run with `cargo run --example soliton_resolution` (about a minute).

use hypwave::cli::{build_initial_state, DataFamily, RunConfig, Travel};
use hypwave::diagnostics::{scattering_indicators, ScatteringIndicators};
use hypwave::evolve::{evolve, Equation, EvolutionProblem, StepControl};
use hypwave::model::{harmonic_map_energy, total_energy, TargetGeometry};

fn main() -> hypwave::Result<()> {
    let lambda = 0.3;
    let mut cfg = RunConfig::default();
    cfg.equation = Equation::Wm2d;
    cfg.lambda = lambda;
    cfg.r_max = 26.0;
    cfg.n = 6500; // dr = 4e-3
    cfg.t_end = 20.0;
    cfg.family = DataFamily::Bump;
    // an ingoing pulse: it collapses onto the origin around t = 4, fills the
    // interior cone at t = 5, and has fully re-radiated long before t = 20
    cfg.amplitude = 0.008;
    cfg.r0 = 4.0;
    cfg.sigma = 0.8;
    cfg.travel = Travel::In;

    let state = build_initial_state(&cfg)?;
    let energy = total_energy(&state, TargetGeometry::Hyperbolic)?;
    let ground = harmonic_map_energy(lambda)?;
    println!("total energy {energy:.4} = {:.2} x energy of the static map", energy / ground);

    let problem =
        EvolutionProblem::new(cfg.equation, cfg.target, lambda, state.grid.clone())?;
    let control = StepControl {
        cfl: 0.5,
        t_end: cfg.t_end,
        output_stride: 250,
        waive_causality: true,
    };

    let mut prev: Option<ScatteringIndicators> = None;
    let mut at_t5 = f64::NAN;
    let mut rows: Vec<ScatteringIndicators> = Vec::new();
    {
        let mut observer = |s: &hypwave::model::FieldState| {
            let ind = scattering_indicators(s, lambda, prev.as_ref()).expect("indicators");
            if (s.t - 5.0).abs() < 0.3 && at_t5.is_nan() {
                at_t5 = ind.interior_residual;
            }
            rows.push(ind);
            prev = Some(ind);
        };
        evolve(&problem, &state, &control, &mut [&mut observer])?;
    }

    println!("\n{:>7} {:>16} {:>16} {:>16}", "t", "interior resid", "S-norm acc", "Morawetz acc");
    for ind in rows.iter().step_by(4) {
        println!(
            "{:>7.2} {:>16.6e} {:>16.6e} {:>16.6e}",
            ind.t, ind.interior_residual, ind.s_norm_accumulated, ind.morawetz_accumulated
        );
    }

    let last = rows.last().unwrap();
    println!(
        "\ninterior residual: {:.3e} at t = 5  ->  {:.3e} at t = {:.0}  (x{:.3})",
        at_t5,
        last.interior_residual,
        last.t,
        last.interior_residual / at_t5
    );
    println!(
        "morawetz_accumulated / energy = {:.4} (bounded, consistent with <= C energy)",
        last.morawetz_accumulated / energy
    );
    assert!(last.interior_residual < 0.2 * at_t5, "residual must decay by 5x");
    assert!(
        rows.windows(2).all(|w| w[1].morawetz_accumulated >= w[0].morawetz_accumulated),
        "Morawetz accumulation is nondecreasing"
    );
    Ok(())
}
