//! Hermite polynomials, physicists' convention.

/// Hₙ(x) via the stable three-term recurrence
/// H₀ = 1, H₁ = 2x, Hₙ₊₁ = 2x·Hₙ − 2n·Hₙ₋₁.
///
/// Overflow for extreme n·x² shows up as a non-finite result; no error is
/// raised here.
pub fn hermite(n: u32, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0 * x,
        _ => {
            let mut prev = 1.0;
            let mut cur = 2.0 * x;
            for k in 1..n {
                let next = 2.0 * x * cur - 2.0 * (k as f64) * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        assert_eq!(hermite(0, 3.7), 1.0);
        assert_eq!(hermite(1, 2.0), 4.0);
        // H3(x) = 8x^3 - 12x, via the recurrence oracle at x = 1
        assert_eq!(hermite(3, 1.0), -4.0);
        assert_eq!(hermite(2, 0.0), -2.0);
        assert_eq!(hermite(3, 0.0), 0.0);
    }

    #[test]
    fn recurrence_identity_holds_to_1e12_relative() {
        // H_{n+1}(x) - 2x H_n(x) + 2n H_{n-1}(x) = 0 for n <= 30, |x| <= 10.
        for n in 1..=30u32 {
            for i in 0..=40 {
                let x = -10.0 + 0.5 * i as f64;
                let lhs = hermite(n + 1, x) - 2.0 * x * hermite(n, x)
                    + 2.0 * n as f64 * hermite(n - 1, x);
                let scale = hermite(n + 1, x)
                    .abs()
                    .max(2.0 * x.abs() * hermite(n, x).abs())
                    .max(1.0);
                assert!(
                    lhs.abs() <= 1e-12 * scale,
                    "recurrence residual {} at n={n}, x={x}",
                    lhs / scale
                );
            }
        }
    }
}
