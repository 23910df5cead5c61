//! Self-convergence of the method-of-lines discretization (second-order
//! spatial stencils + RK4): the same run at dr, dr/2, dr/4 shows the
//! solution error and the energy drift both shrinking at second order.
//!
//! Run with `cargo run --example convergence_order`.

use hypwave::cli::{cmd_convergence, DataFamily, RunConfig, Travel};
use hypwave::evolve::Equation;

fn main() -> hypwave::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.equation = Equation::Wm2d;
    cfg.lambda = 0.3;
    cfg.r_max = 10.0;
    cfg.n = 250;
    cfg.t_end = 1.5;
    cfg.family = DataFamily::Bump;
    cfg.amplitude = 0.02;
    cfg.r0 = 2.0;
    cfg.sigma = 0.6;
    cfg.travel = Travel::None;

    let code = cmd_convergence(&cfg, 3)?;
    assert_eq!(code, 0, "observed order must reach 1.9");
    Ok(())
}
