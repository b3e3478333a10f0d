//! The three block proximal operators used inside ADMM.

use hypersparse::prox::{project_l1_ball, prox_l1, prox_linf, prox_sql1};

fn main() {
    let v = [3.0, -1.0, 0.5, -2.5];
    for tau in [0.1, 1.0, 10.0] {
        println!("tau = {tau}");
        println!("  l1     {:?}", round(&prox_l1(&v, tau)));
        println!("  linf   {:?}", round(&prox_linf(&v, tau)));
        println!("  sq-l1  {:?}", round(&prox_sql1(&v, tau)));
        // prox of the max-norm plus projection onto the l1 ball gives back v.
        let back: Vec<f64> = prox_linf(&v, tau).iter().zip(project_l1_ball(&v, tau)).map(|(a, b)| a + b).collect();
        println!("  moreau {:?}", round(&back));
    }
}

fn round(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1e4).round() / 1e4).collect()
}
