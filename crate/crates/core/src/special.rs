//! Gamma function at integers and half-integers, and the volumes built on it.

use std::f64::consts::PI;

/// `ln Γ(m / 2)` for a positive integer `m`, by exact recurrence from
/// `Γ(1) = 1` and `Γ(1/2) = √π`.
pub fn ln_gamma_half(m: u32) -> f64 {
    assert!(m > 0, "Γ has a pole at 0");
    let mut acc = if m % 2 == 0 { 0.0 } else { 0.5 * PI.ln() };
    let mut x = if m % 2 == 0 { 1.0 } else { 0.5 };
    let target = m as f64 / 2.0;
    while x < target {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

/// `ln σ_n`, the volume of the unit ball in `R^n`.
pub fn ln_unit_ball_volume(n: u32) -> f64 {
    0.5 * n as f64 * PI.ln() - ln_gamma_half(n + 2)
}

/// `ln ω_n`, the n-volume of the unit sphere `S^n ⊂ R^(n+1)`.
pub fn ln_unit_sphere_area(n: u32) -> f64 {
    std::f64::consts::LN_2 + 0.5 * (n as f64 + 1.0) * PI.ln() - ln_gamma_half(n + 1)
}

pub fn unit_sphere_area(n: u32) -> f64 {
    ln_unit_sphere_area(n).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert!((ln_gamma_half(2) - 0.0).abs() < 1e-15);
        assert!((ln_gamma_half(10) - 24f64.ln()).abs() < 1e-14);
        assert!((ln_gamma_half(1) - PI.sqrt().ln()).abs() < 1e-15);
        assert!((ln_gamma_half(5) - (0.75 * PI.sqrt()).ln()).abs() < 1e-14);
    }

    #[test]
    fn ball_and_sphere_volumes() {
        assert!((ln_unit_ball_volume(2).exp() - PI).abs() < 1e-14);
        assert!((ln_unit_ball_volume(3).exp() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_sphere_area(1) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(2) - 4.0 * PI).abs() < 1e-13);
        assert!((unit_sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
        // ω_n = (n+1) σ_(n+1)
        for n in 1..12 {
            let lhs = unit_sphere_area(n);
            let rhs = (n as f64 + 1.0) * ln_unit_ball_volume(n + 1).exp();
            assert!((lhs - rhs).abs() < 1e-12 * rhs);
        }
    }
}
