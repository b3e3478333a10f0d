//! Proximal operators for the per-edge penalties.
//!
//! All operators take the step already folded into `tau`, i.e. they return
//! `argmin_u tau·g(u) + ½‖u − v‖²`.

/// Euclidean projection onto `{u : ‖u‖₁ ≤ radius}` by sorting magnitudes and locating the
/// soft-threshold level.
pub fn project_l1_ball(v: &[f64], radius: f64) -> Vec<f64> {
    debug_assert!(radius >= 0.0);
    let l1: f64 = v.iter().map(|x| x.abs()).sum();
    if l1 <= radius {
        return v.to_vec();
    }
    if radius == 0.0 {
        return vec![0.0; v.len()];
    }
    let theta = l1_threshold(v, radius);
    soft_threshold(v, theta)
}

/// Threshold `θ` with `Σ max(|v_i| − θ, 0) = radius`, assuming `‖v‖₁ > radius > 0`.
fn l1_threshold(v: &[f64], radius: f64) -> f64 {
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &m) in mags.iter().enumerate() {
        cumsum += m;
        let candidate = (cumsum - radius) / (k + 1) as f64;
        if m > candidate {
            theta = candidate;
        } else {
            break;
        }
    }
    theta.max(0.0)
}

fn soft_threshold(v: &[f64], tau: f64) -> Vec<f64> {
    v.iter().map(|&x| x.signum() * (x.abs() - tau).max(0.0)).collect()
}

/// Prox of `tau‖u‖₁` (soft thresholding).
pub fn prox_l1(v: &[f64], tau: f64) -> Vec<f64> {
    debug_assert!(tau >= 0.0);
    soft_threshold(v, tau)
}

/// Prox of `tau‖u‖_∞`, via the Moreau decomposition `v − P_{‖·‖₁ ≤ tau}(v)`.
pub fn prox_linf(v: &[f64], tau: f64) -> Vec<f64> {
    debug_assert!(tau >= 0.0);
    let p = project_l1_ball(v, tau);
    v.iter().zip(&p).map(|(a, b)| a - b).collect()
}

/// Prox of `tau‖u‖₁²`.
///
/// The minimizer is a soft threshold at `θ = 2·tau·‖u‖₁`. With the `k` largest magnitudes
/// active, `‖u‖₁ = S_k / (1 + 2·tau·k)`; the active count is the largest `k` whose smallest
/// member survives the threshold.
pub fn prox_sql1(v: &[f64], tau: f64) -> Vec<f64> {
    debug_assert!(tau >= 0.0);
    if tau == 0.0 {
        return v.to_vec();
    }
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &m) in mags.iter().enumerate() {
        if m == 0.0 {
            break;
        }
        cumsum += m;
        let kk = (k + 1) as f64;
        let candidate = 2.0 * tau * cumsum / (1.0 + 2.0 * tau * kk);
        if m > candidate {
            theta = candidate;
        } else {
            break;
        }
    }
    soft_threshold(v, theta)
}
