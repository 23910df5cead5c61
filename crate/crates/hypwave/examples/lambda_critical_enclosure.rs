//! Certified enclosure of the critical endpoint of the Morawetz multiplier
//! argument.
//!
//! The key pointwise inequality holds for the static family up to a critical
//! parameter value `Lambda = 0.57716...`, which is the unique zero of
//! `min_s Q(s, lambda)` where `Q` is the quartic positivity polynomial in the
//! disk variable `s = tanh(r/2)`. This example computes a rigorous-style
//! bisection enclosure at several tolerances and shows the bracket shrinking
//! onto the same digits.
//!
//! Run with `cargo run --example lambda_critical_enclosure`.

use std::time::Instant;

use hypwave::morawetz::{compute_lambda, q_factored, q_polynomial};

fn main() -> hypwave::Result<()> {
    println!("{:>8} {:>16} {:>16} {:>10} {:>8}", "tol", "lo", "hi", "width", "secs");
    for &tol in &[1e-4, 1e-6, 1e-8, 1e-10] {
        let t0 = Instant::now();
        let (lo, hi) = compute_lambda(tol)?;
        let dt = t0.elapsed().as_secs_f64();
        println!("{tol:>8.0e} {lo:>16.12} {hi:>16.12} {:>10.2e} {dt:>8.2}", hi - lo);
        assert!(hi - lo <= tol);
        assert!(lo >= 0.5 && hi < 0.75);
        // every enclosure must be consistent with the printed digits 0.57716
        assert!(lo < 0.57717 && hi >= 0.57716);
    }

    // On either side of the enclosure the polynomial minimum changes sign.
    let (lo, hi) = compute_lambda(1e-8)?;
    let min_q = |lambda: f64| {
        (0..=5000)
            .map(|i| {
                let s = i as f64 / 5000.0;
                q_polynomial(s, lambda)
            })
            .fold(f64::INFINITY, f64::min)
    };
    println!("\nmin_s Q(s, lo - 1e-4) = {:+.3e}", min_q(lo - 1e-4));
    println!("min_s Q(s, hi + 1e-4) = {:+.3e}", min_q(hi + 1e-4));
    assert!(min_q(lo - 1e-4) > 0.0);
    assert!(min_q(hi + 1e-4) < 0.0);

    // The explicit witness above the endpoint: Q(1/2, 3/4) = -17/128.
    let w = q_polynomial(0.5, 0.75);
    println!("Q(1/2, 3/4) = {w} = -17/128 (err {:.1e})", (w + 17.0 / 128.0).abs());
    assert!((w + 17.0 / 128.0).abs() < 1e-15);
    assert!((q_factored(0.5, 0.75) + 17.0 / 128.0).abs() < 1e-15);
    Ok(())
}
