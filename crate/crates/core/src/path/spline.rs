//! Natural cubic spline through planar samples, parameterized by cumulative chord length.

use crate::error::{Error, Result};
use crate::geom::Vec2;

#[derive(Debug, Clone)]
pub struct Spline2 {
    knots: Vec<f64>,
    points: Vec<Vec2>,
    // second derivatives at the knots
    moments: Vec<Vec2>,
}

impl Spline2 {
    pub fn through(points: &[Vec2]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPath("polyline needs at least two samples".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidPath("non-finite polyline sample".into()));
        }
        let mut knots = Vec::with_capacity(points.len());
        knots.push(0.0);
        for w in points.windows(2) {
            let d = w[0].distance(w[1]);
            if d <= 1e-9 {
                return Err(Error::InvalidPath("repeated polyline sample".into()));
            }
            knots.push(knots.last().unwrap() + d);
        }
        let moments = natural_moments(&knots, points);
        Ok(Self {
            knots,
            points: points.to_vec(),
            moments,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (0.0, *self.knots.last().unwrap())
    }

    /// Position, first and second derivative at parameter `u`.
    pub fn eval(&self, u: f64) -> (Vec2, Vec2, Vec2) {
        let n = self.knots.len();
        let i = match self.knots.partition_point(|&k| k <= u) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let (u0, u1) = (self.knots[i], self.knots[i + 1]);
        let h = u1 - u0;
        let a = (u1 - u) / h;
        let b = (u - u0) / h;
        let (p0, p1) = (self.points[i], self.points[i + 1]);
        let (m0, m1) = (self.moments[i], self.moments[i + 1]);
        let pos = p0 * a + p1 * b + (m0 * (a * a * a - a) + m1 * (b * b * b - b)) * (h * h / 6.0);
        let d1 = (p1 - p0) * (1.0 / h) + (m1 * (3.0 * b * b - 1.0) - m0 * (3.0 * a * a - 1.0)) * (h / 6.0);
        let d2 = m0 * a + m1 * b;
        (pos, d1, d2)
    }
}

fn natural_moments(knots: &[f64], points: &[Vec2]) -> Vec<Vec2> {
    let n = knots.len();
    let mut moments = vec![Vec2::ZERO; n];
    if n < 3 {
        return moments;
    }
    // Thomas algorithm on the interior knots
    let m = n - 2;
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut rhs = vec![Vec2::ZERO; m];
    for k in 0..m {
        let i = k + 1;
        let h0 = knots[i] - knots[i - 1];
        let h1 = knots[i + 1] - knots[i];
        diag[k] = (h0 + h1) / 3.0;
        upper[k] = h1 / 6.0;
        rhs[k] = (points[i + 1] - points[i]) * (1.0 / h1) - (points[i] - points[i - 1]) * (1.0 / h0);
    }
    for k in 1..m {
        let lower = (knots[k + 1] - knots[k]) / 6.0;
        let w = lower / diag[k - 1];
        diag[k] -= w * upper[k - 1];
        let prev = rhs[k - 1];
        rhs[k] = rhs[k] - prev * w;
    }
    moments[m] = rhs[m - 1] * (1.0 / diag[m - 1]);
    for k in (0..m - 1).rev() {
        moments[k + 1] = (rhs[k] - moments[k + 2] * upper[k]) * (1.0 / diag[k]);
    }
    moments
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_samples() {
        let pts: Vec<Vec2> = (0..8)
            .map(|i| {
                let x = i as f64 * 2.0;
                Vec2::new(x, (0.3 * x).sin() * 3.0)
            })
            .collect();
        let sp = Spline2::through(&pts).unwrap();
        for (k, p) in sp.knots.iter().zip(&pts) {
            let (q, _, _) = sp.eval(*k);
            assert!(q.distance(*p) < 1e-12);
        }
    }

    #[test]
    fn natural_end_conditions() {
        let pts = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(3.0, 1.0),
        ];
        let sp = Spline2::through(&pts).unwrap();
        let (lo, hi) = sp.domain();
        assert!(sp.eval(lo).2.norm() < 1e-12);
        assert!(sp.eval(hi).2.norm() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let pts: Vec<Vec2> = (0..6).map(|i| Vec2::from_angle(i as f64 * 0.4) * 10.0).collect();
        let sp = Spline2::through(&pts).unwrap();
        let h = 1e-5;
        for u in [0.7, 2.3, 5.1, 9.9] {
            let (p0, d0, _) = sp.eval(u - h);
            let (p1, d1, _) = sp.eval(u + h);
            let (_, dm, d2m) = sp.eval(u);
            let fd = (p1 - p0) * (1.0 / (2.0 * h));
            assert!((fd - dm).norm() < 1e-6);
            let fd2 = (d1 - d0) * (1.0 / (2.0 * h));
            assert!((fd2 - d2m).norm() < 1e-5);
        }
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(Spline2::through(&[Vec2::ZERO]).is_err());
        assert!(Spline2::through(&[Vec2::ZERO, Vec2::ZERO]).is_err());
    }
}
