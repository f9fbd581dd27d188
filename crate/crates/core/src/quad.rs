//! Composite Simpson quadrature.

/// Composite Simpson rule on `[a, b]` with `intervals` subintervals (rounded up to even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals.max(2) + intervals % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Simpson weights for `n` intervals (n even) on a grid of spacing `h`.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(
        n >= 2 && n.is_multiple_of(2),
        "Simpson needs an even number of intervals"
    );
    (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_cubic_exactly() {
        let v = simpson(|x| x * x * x - x, 0.0, 2.0, 2);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn odd_interval_count_is_rounded_up() {
        let v = simpson(f64::sin, 0.0, std::f64::consts::PI, 999);
        assert!((v - 2.0).abs() < 1e-11);
    }

    #[test]
    fn weights_sum_to_length() {
        let w = simpson_weights(10, 0.1);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
