use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use super::Grid;

/// In-place unnormalized multi-dimensional DFT of one component block laid
/// out on `grid`.
pub(crate) fn transform(grid: &Grid, data: &mut [Complex64], direction: FftDirection) {
    let mut planner = FftPlanner::new();
    for axis in 0..grid.dim() {
        let n = grid.sizes()[axis];
        let stride = grid.stride(axis);
        let fft = planner.plan_fft(n, direction);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for base in 0..data.len() {
            if grid.index_along(base, axis) != 0 {
                continue;
            }
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = data[base + j * stride];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (j, value) in line.iter().enumerate() {
                data[base + j * stride] = *value;
            }
        }
    }
}

/// Evaluates the trigonometric interpolant of the periodic samples `line`
/// (period `period`) at each of `points`.
pub(crate) fn interpolate_line(line: &[Complex64], period: f64, points: &[f64]) -> Vec<Complex64> {
    let n = line.len();
    let mut coeffs = line.to_vec();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut coeffs);
    let scale = 1.0 / n as f64;
    let w = 2.0 * std::f64::consts::PI / period;
    points
        .iter()
        .map(|&x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, c) in coeffs.iter().enumerate() {
                let term = if j == n / 2 {
                    // split Nyquist mode symmetrically so real data stays real
                    *c * (w * (n / 2) as f64 * x).cos()
                } else {
                    let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                    *c * Complex64::from_polar(1.0, w * m * x)
                };
                acc += term;
            }
            acc * scale
        })
        .collect()
}
