//! A reduced simulation sweep: irrelevant edges 1, 5, 10 with 3 repeats of 5-fold CV.
//! `cargo run --release --example simulation_study -- noisy` sweeps noisy nodes instead.

use hypersparse::experiments::{run_study, SimStudy};

fn main() -> hypersparse::Result<()> {
    let noisy = std::env::args().nth(1).as_deref() == Some("noisy");
    let mut study = if noisy { SimStudy::mixed_sweep() } else { SimStudy::irrelevant_sweep() };
    study.values = vec![1, 5, 10];
    study.cv.repeats = 3;
    study.cv.folds = 5;

    let out = run_study(&study)?;
    println!("{:>8} {:>8} {:>8} {:>8} {:>8}", if noisy { "noisy" } else { "irrel" }, "dense", "edge", "node", "joint");
    for s in &out.settings {
        let cells: Vec<String> = s.models.iter().map(|m| format!("{:>8.4}", m.best_rmse)).collect();
        println!("{:>8} {}", s.setting, cells.join(" "));
    }
    Ok(())
}
