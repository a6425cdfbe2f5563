//! Natural cubic spline on a strictly increasing, possibly non-uniform grid,
//! with first-derivative evaluation.

use crate::error::{Result, UlrmError};

#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    y2: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() || x.len() < 3 {
            return Err(UlrmError::Resolution(
                "spline needs at least 3 matching samples".into(),
            ));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(UlrmError::Resolution(
                "spline abscissae must be strictly increasing".into(),
            ));
        }
        let n = x.len();
        // Tridiagonal solve for the natural spline second derivatives.
        let mut y2 = vec![0.0_f64; n];
        let mut u = vec![0.0_f64; n];
        for i in 1..n - 1 {
            let sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
            let p = sig * y2[i - 1] + 2.0;
            y2[i] = (sig - 1.0) / p;
            let a = (y[i + 1] - y[i]) / (x[i + 1] - x[i])
                - (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
            u[i] = (6.0 * a / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
        }
        for i in (0..n - 1).rev() {
            y2[i] = y2[i] * y2[i + 1] + u[i];
        }
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            y2,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.x.last().unwrap()
    }

    fn segment(&self, xv: f64) -> Result<usize> {
        if xv < self.x_min() || xv > self.x_max() {
            return Err(UlrmError::OutOfRange(format!(
                "x = {xv} outside spline domain [{}, {}]",
                self.x_min(),
                self.x_max()
            )));
        }
        let idx = match self
            .x
            .binary_search_by(|v| v.partial_cmp(&xv).unwrap())
        {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        };
        Ok(idx)
    }

    pub fn eval(&self, xv: f64) -> Result<f64> {
        let i = self.segment(xv)?;
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - xv) / h;
        let b = (xv - self.x[i]) / h;
        Ok(a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.y2[i] + (b * b * b - b) * self.y2[i + 1]) * h * h / 6.0)
    }

    pub fn deriv(&self, xv: f64) -> Result<f64> {
        let i = self.segment(xv)?;
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - xv) / h;
        let b = (xv - self.x[i]) / h;
        Ok((self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.y2[i + 1] - (3.0 * a * a - 1.0) * self.y2[i]) * h
                / 6.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample_spline() -> CubicSpline {
        let x: Vec<f64> = (0..200).map(|i| 0.05 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&v| (1.7 * v).sin() * (-0.2 * v).exp()).collect();
        CubicSpline::new(&x, &y).unwrap()
    }

    #[test]
    fn exact_at_knots() {
        let s = sample_spline();
        assert_eq!(s.eval(0.05 * 37.0).unwrap(), (1.7 * 0.05 * 37.0_f64).sin() * (-0.2 * 0.05 * 37.0_f64).exp());
    }

    #[test]
    fn derivative_matches_central_difference() {
        let s = sample_spline();
        let eps = 1e-5;
        for &xv in &[0.31, 2.77, 5.5, 9.0] {
            let fd = (s.eval(xv + eps).unwrap() - s.eval(xv - eps).unwrap()) / (2.0 * eps);
            let d = s.deriv(xv).unwrap();
            assert_relative_eq!(d, fd, max_relative = 1e-6, epsilon = 1e-9);
        }
    }

    #[test]
    fn out_of_bounds_rejected() {
        let s = sample_spline();
        assert!(s.eval(-0.1).is_err());
        assert!(s.eval(1e3).is_err());
    }
}
