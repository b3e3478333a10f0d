//! Empirical check of the half-normal mean, the one-sided Chebyshev bounds, and the growth of
//! the largest of n Gaussian draws.

use hypersparse::experiments::monte_carlo_lemmas;

fn main() -> hypersparse::Result<()> {
    let rep = monte_carlo_lemmas(1.0, 1_000_000, 1)?;
    println!("mean |x| = {:.5}, expected {:.5}", rep.mean_abs, rep.expected_mean_abs);
    for c in &rep.cantelli {
        println!(
            "{:?} t={} n={:>2}: frequency {:.4} vs bound {:.4}  {}{}",
            c.event,
            c.t,
            c.n,
            c.frequency,
            c.bound,
            if c.holds { "holds" } else { "VIOLATED" },
            if c.gated { "" } else { " (reference only)" }
        );
    }
    for g in &rep.growth {
        println!("n = {:>5}: median max |x| = {:.3}", g.n, g.median_max_abs);
    }
    Ok(())
}
