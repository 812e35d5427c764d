//! Scalar diagnostics extracted from time series.

use rustfft::{num_complex::Complex, FftPlanner};

/// Zero-padding factor for the periodogram.
const PADDING: usize = 64;

/// Angular frequency of the strongest non-constant Fourier component of a
/// uniformly sampled series. The mean is removed, the series zero-padded and
/// the peak refined by a parabola through the three bins around it.
/// Returns `None` for series shorter than 4 samples or with no variation.
pub fn dominant_frequency(values: &[f64], dt: f64) -> Option<f64> {
    let n = values.len();
    if n < 4 || dt.is_nan() || dt <= 0.0 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let len = (n * PADDING).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = values
        .iter()
        .map(|&v| Complex::new(v - mean, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(len)
        .collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let power: Vec<f64> = buf[..len / 2].iter().map(|c| c.norm_sqr()).collect();

    // Skip the main lobe of the DC term.
    let start = (len / n).max(1);
    let (peak, &best) = power
        .iter()
        .enumerate()
        .skip(start)
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    if best <= 0.0 {
        return None;
    }
    let mut bin = peak as f64;
    if peak + 1 < power.len() {
        let (a, b, c) = (power[peak - 1].sqrt(), best.sqrt(), power[peak + 1].sqrt());
        let denom = a - 2.0 * b + c;
        if denom != 0.0 {
            bin += 0.5 * (a - c) / denom;
        }
    }
    Some(2.0 * std::f64::consts::PI * bin / (len as f64 * dt))
}

/// Least-squares line `y = slope * x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Half the peak-to-peak excursion.
pub fn half_range(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if lo.is_finite() && hi.is_finite() {
        0.5 * (hi - lo)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_pure_tone() {
        let dt = 0.1;
        for omega in [0.1, 0.2, 0.77, 3.0] {
            let values: Vec<f64> = (0..2000)
                .map(|k| 2.0 + (omega * k as f64 * dt + 0.3).sin())
                .collect();
            let w = dominant_frequency(&values, dt).unwrap();
            assert!((w - omega).abs() / omega < 5e-3, "{w} vs {omega}");
        }
    }

    #[test]
    fn picks_the_stronger_tone() {
        let dt = 0.05;
        let values: Vec<f64> = (0..4000)
            .map(|k| {
                let t = k as f64 * dt;
                0.3 * (0.5 * t).cos() + (1.3 * t).cos()
            })
            .collect();
        let w = dominant_frequency(&values, dt).unwrap();
        assert!((w - 1.3).abs() < 0.01);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(dominant_frequency(&[1.0, 2.0], 0.1), None);
        assert_eq!(dominant_frequency(&[1.0; 50], 0.1), None);
        assert_eq!(linear_fit(&[1.0], &[2.0]), None);
        assert_eq!(half_range(&[]), 0.0);
    }

    #[test]
    fn fits_a_line() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        let (s, i) = linear_fit(&x, &y).unwrap();
        assert!((s - 3.0).abs() < 1e-12 && (i + 1.0).abs() < 1e-12);
        assert_eq!(half_range(&[-1.0, 4.0, 2.0]), 2.5);
    }
}
