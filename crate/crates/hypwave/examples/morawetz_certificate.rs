//! Full Morawetz certificate: multiplier bounds, the pointwise inequality
//! suite below the critical endpoint, the coercivity constants `c_lambda`,
//! and a demonstrated failure of the key inequality above the endpoint.
//!
//! Run with `cargo run --example morawetz_certificate`.

use hypwave::grid::make_grid;
use hypwave::morawetz::{
    build_certificate, multiplier_bounds_check, pointwise_inequalities_check, Verdict,
};

fn main() -> hypwave::Result<()> {
    // The multiplier a(r) with a_r = tanh(r/2) satisfies the structural
    // bounds 0 <= a_r <= 1, 1/2 <= a_r coth r <= 1 used throughout.
    let grid = make_grid(40.0, 4000)?;
    let bounds = multiplier_bounds_check(&grid);
    println!("multiplier bounds: {}", if bounds.pass { "PASS" } else { "FAIL" });
    for (name, margin, at) in &bounds.margins {
        println!("  {name:<22} min margin {margin:+.3e} at r = {at:.3}");
    }
    assert!(bounds.pass);

    // Certificate: endpoint enclosure + c_lambda table + inequality scans
    // for a ladder of parameters below the endpoint.
    let cert = build_certificate(1e-6, &[0.0, 0.2, 0.4, 0.5, 0.577], 400)?;
    println!("\n{}", cert.report());
    for rec in &cert.inequality_scan {
        assert_ne!(
            rec.verdict,
            Verdict::Fail,
            "inequality {} must not fail below the endpoint ({})",
            rec.name,
            rec.domain
        );
    }

    // Above the endpoint the key inequality fails with an explicit witness.
    for &lambda in &[0.6, 0.75] {
        let records = pointwise_inequalities_check(lambda, (-5.0, 5.0), (1e-3, 20.0), 400)?;
        let key = records.iter().find(|r| r.name == "key").unwrap();
        println!(
            "lambda = {lambda}: key inequality margin {:+.6e} at r = {:.4} -> {}",
            key.min_margin,
            key.argmin.0,
            match key.verdict {
                Verdict::Fail => "FAIL (expected above the endpoint)",
                _ => "unexpected",
            }
        );
        assert_eq!(key.verdict, Verdict::Fail);
    }
    Ok(())
}
