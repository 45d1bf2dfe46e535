//! Reference paths: arc-length evaluation, closest-point projection,
//! forward look-ahead intersection and curvature.
//!
//! Every path is backed by an analytic curve (or a cubic spline through
//! user samples) plus a dense arc-length table. Queries map an arc length
//! `s` back to the curve parameter with a table lookup followed by Newton
//! steps on Gauss–Legendre arc-length integrals, so positions, tangents and
//! curvatures come from the analytic derivatives rather than the samples.

mod curve;
mod spline;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;
use curve::{arc_length, arc_length_adaptive, Curve};
pub use spline::Spline2;

/// Default arc-length spacing of the lookup table, meters.
pub const TABLE_SPACING: f64 = 0.05;
/// Bounds applied to the unsigned radius of curvature, meters.
pub const MIN_RADIUS: f64 = 1e-3;
pub const MAX_RADIUS: f64 = 1e6;
/// How far a hinted projection may fall behind its hint, meters.
pub const BACKTRACK_ALLOWANCE: f64 = 1.0;
const ROOT_TOL: f64 = 1e-10;
const HERMITE_TOL: f64 = 1e-9;

/// Traversal sense of a circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Anticlockwise,
    Clockwise,
}

impl Sense {
    /// +1 for anticlockwise, −1 for clockwise.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Sense::Anticlockwise => 1.0,
            Sense::Clockwise => -1.0,
        }
    }

    pub fn of(sign: f64) -> Self {
        if sign >= 0.0 {
            Sense::Anticlockwise
        } else {
            Sense::Clockwise
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub s: f64,
    pub position: Vec2,
    /// Unit tangent in the direction of increasing `s`.
    pub tangent: Vec2,
    /// Signed curvature, positive when the path turns left.
    pub curvature: f64,
}

impl PathPoint {
    pub fn normal(&self) -> Vec2 {
        self.tangent.perp()
    }
}

/// Outcome of a look-ahead query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LookaheadStatus {
    /// A path point at exactly the requested distance was found.
    Found,
    /// The path stays farther than the look-ahead distance; the projection was returned.
    Fallback,
    /// The remaining path lies inside the look-ahead circle; the endpoint was returned.
    EndOfPath,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lookahead {
    pub point: PathPoint,
    pub status: LookaheadStatus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub point: PathPoint,
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct ReferencePath {
    curve: Curve,
    u: Vec<f64>,
    s: Vec<f64>,
    pos: Vec<Vec2>,
    // |dc/du| at the table nodes
    speed: Vec<f64>,
    // the Hermite guess alone inverts arc length to table accuracy
    hermite_exact: bool,
}

impl ReferencePath {
    fn build(curve: Curve, u_lo: f64, u_hi: f64) -> Result<Self> {
        if !(u_lo.is_finite() && u_hi.is_finite()) || u_lo >= u_hi {
            return Err(Error::InvalidPath(format!("empty parameter domain [{u_lo}, {u_hi}]")));
        }
        let mut u = vec![u_lo];
        let mut s = vec![0.0];
        let mut pos = vec![curve.eval(u_lo).0];
        let mut cur = u_lo;
        while cur < u_hi {
            let step = TABLE_SPACING / curve.speed(cur);
            let mut next = cur + step;
            // avoid a sliver segment at the end
            if next > u_hi - 0.25 * step {
                next = u_hi;
            }
            let ds = arc_length_adaptive(&curve, cur, next, 1e-13);
            s.push(s.last().unwrap() + ds);
            u.push(next);
            pos.push(curve.eval(next).0);
            cur = next;
        }
        let speed = u.iter().map(|&v| curve.speed(v)).collect();
        let mut path = Self {
            curve,
            u,
            s,
            pos,
            speed,
            hermite_exact: false,
        };
        path.hermite_exact = path.curve.has_unit_speed() || path.max_hermite_residual() < HERMITE_TOL;
        Ok(path)
    }

    // worst arc-length residual of the Hermite inverse at segment midpoints
    fn max_hermite_residual(&self) -> f64 {
        (0..self.s.len() - 1)
            .map(|i| {
                let mid = 0.5 * (self.s[i] + self.s[i + 1]);
                let u = self.hermite_param(i, mid);
                (self.s[i] + arc_length(&self.curve, self.u[i], u) - mid).abs()
            })
            .fold(0.0, f64::max)
    }

    // cubic Hermite guess for u(s) on segment i from du/ds = 1/speed at the nodes
    #[inline]
    fn hermite_param(&self, i: usize, s: f64) -> f64 {
        let (u0, u1) = (self.u[i], self.u[i + 1]);
        let h = self.s[i + 1] - self.s[i];
        let t = (s - self.s[i]) / h;
        let (m0, m1) = (h / self.speed[i], h / self.speed[i + 1]);
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * u0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * u1 + (t3 - t2) * m1
    }

    /// `y = 10 sin(0.078 x) + 20 cos(0.082 x)` over `x ∈ [x_lo, x_hi]`.
    pub fn sinusoid(x_lo: f64, x_hi: f64) -> Result<Self> {
        Self::sinusoid_with(10.0, 0.078, 20.0, 0.082, x_lo, x_hi)
    }

    /// `y = a_sin sin(w_sin x) + a_cos cos(w_cos x)` over `x ∈ [x_lo, x_hi]`.
    pub fn sinusoid_with(a_sin: f64, w_sin: f64, a_cos: f64, w_cos: f64, x_lo: f64, x_hi: f64) -> Result<Self> {
        Self::build(
            Curve::Sinusoid {
                a_sin,
                w_sin,
                a_cos,
                w_cos,
            },
            x_lo,
            x_hi,
        )
    }

    /// One full revolution starting at angle 0 from `center`.
    pub fn circle(center: Vec2, radius: f64, sense: Sense) -> Result<Self> {
        Self::circle_arc(center, radius, 0.0, std::f64::consts::TAU, sense)
    }

    /// Arc of `sweep` radians (may exceed 2π) starting at `start_angle`.
    pub fn circle_arc(center: Vec2, radius: f64, start_angle: f64, sweep: f64, sense: Sense) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidPath(format!("circle radius {radius}")));
        }
        if !(sweep > 0.0) {
            return Err(Error::InvalidPath(format!("arc sweep {sweep}")));
        }
        Self::build(
            Curve::Arc {
                center,
                radius,
                start_angle,
                sense: sense.sign(),
            },
            0.0,
            radius * sweep,
        )
    }

    /// Straight segment of `length` meters from `origin` along `direction`.
    pub fn line(origin: Vec2, direction: Vec2, length: f64) -> Result<Self> {
        let direction = direction
            .normalized()
            .map_err(|_| Error::InvalidPath("zero line direction".into()))?;
        Self::build(Curve::Line { origin, direction }, 0.0, length)
    }

    /// C² natural cubic spline through the samples, in order.
    pub fn polyline(points: &[Vec2]) -> Result<Self> {
        let sp = Spline2::through(points)?;
        let (lo, hi) = sp.domain();
        Self::build(Curve::Spline(sp), lo, hi)
    }

    /// Total arc length.
    #[inline]
    pub fn length(&self) -> f64 {
        *self.s.last().unwrap()
    }

    pub fn start(&self) -> PathPoint {
        self.point_at(0.0)
    }

    pub fn end(&self) -> PathPoint {
        self.point_at(self.length())
    }

    /// Table samples `(s, position)`, useful for plotting.
    pub fn samples(&self) -> impl Iterator<Item = (f64, Vec2)> + '_ {
        self.s.iter().copied().zip(self.pos.iter().copied())
    }

    // index of the table segment containing s
    #[inline]
    fn segment(&self, s: f64) -> usize {
        let n = self.s.len();
        self.s.partition_point(|&v| v <= s).clamp(1, n - 1) - 1
    }

    fn param_at(&self, s: f64) -> f64 {
        let i = self.segment(s);
        let (u0, s0, u1) = (self.u[i], self.s[i], self.u[i + 1]);
        if s == s0 {
            return u0;
        }
        if self.curve.has_unit_speed() {
            return u0 + (s - s0);
        }
        let mut u = self.hermite_param(i, s);
        if self.hermite_exact {
            return u;
        }
        for _ in 0..4 {
            let f = s0 + arc_length(&self.curve, u0, u) - s;
            if f.abs() < 1e-12 {
                break;
            }
            u = (u - f / self.curve.speed(u)).clamp(u0, u1);
        }
        u
    }

    /// Path point at arc length `s`, clamped to `[0, length]`.
    pub fn point_at(&self, s: f64) -> PathPoint {
        let s = s.clamp(0.0, self.length());
        let u = self.param_at(s);
        let (position, d1, d2) = self.curve.eval(u);
        let speed = d1.norm();
        PathPoint {
            s,
            position,
            tangent: d1 * (1.0 / speed),
            curvature: d1.cross(d2) / (speed * speed * speed),
        }
    }

    /// Closest path point to `p`.
    ///
    /// Without a hint the whole path is searched. With a hint the search
    /// descends from the hint to the nearest local minimum of distance and
    /// never returns `s < hint − 1 m`.
    pub fn project(&self, p: Vec2, hint: Option<f64>) -> Projection {
        let n = self.s.len();
        let d2 = |i: usize| (self.pos[i] - p).norm_squared();
        let (mut i, floor) = match hint {
            None => {
                let i = (0..n).min_by(|&a, &b| d2(a).total_cmp(&d2(b))).unwrap_or(0);
                (i, 0.0)
            }
            Some(h) => {
                let h = h.clamp(0.0, self.length());
                let floor = (h - BACKTRACK_ALLOWANCE).max(0.0);
                (self.segment(h), floor)
            }
        };
        if hint.is_some() {
            while i + 1 < n && d2(i + 1) < d2(i) {
                i += 1;
            }
            while i > 0 && self.s[i - 1] >= floor && d2(i - 1) < d2(i) {
                i -= 1;
            }
        }
        let lo = self.s[i.saturating_sub(1)].max(floor);
        let hi = self.s[(i + 1).min(n - 1)];
        let s = self.refine_projection(p, lo, hi);
        let point = self.point_at(s);
        Projection {
            point,
            distance: point.position.distance(p),
        }
    }

    // local minimizer of |pos(s) - p| on [lo, hi]
    fn refine_projection(&self, p: Vec2, lo: f64, hi: f64) -> f64 {
        let g = |s: f64| {
            let pp = self.point_at(s);
            let r = pp.position - p;
            let val = r.dot(pp.tangent);
            let der = 1.0 + pp.curvature * r.dot(pp.normal());
            (val, der)
        };
        let (glo, _) = g(lo);
        let (ghi, _) = g(hi);
        if glo >= 0.0 && ghi <= 0.0 {
            // both ends are local minima
            let dlo = self.point_at(lo).position.distance(p);
            let dhi = self.point_at(hi).position.distance(p);
            return if dhi < dlo { hi } else { lo };
        }
        if glo >= 0.0 {
            return lo;
        }
        if ghi <= 0.0 {
            return hi;
        }
        safe_newton(g, lo, hi, glo, ghi, ROOT_TOL)
    }

    /// First path point beyond `s_min` at Euclidean distance `l1` from `p`.
    pub fn lookahead_point(&self, p: Vec2, s_min: f64, l1: f64) -> Lookahead {
        let s_min = s_min.clamp(0.0, self.length());
        let f = |s: f64| {
            let pp = self.point_at(s);
            let r = pp.position - p;
            let dist = r.norm();
            let der = if dist > 0.0 { r.dot(pp.tangent) / dist } else { 1.0 };
            (dist - l1, der)
        };
        let f0 = self.point_at(s_min).position.distance(p) - l1;
        let inside = f0 <= 0.0;
        let n = self.s.len();
        let mut prev = s_min;
        let mut prev_f = f0;
        let mut j = self.s.partition_point(|&v| v <= s_min);
        while j < n {
            let fj = self.pos[j].distance(p) - l1;
            if (fj > 0.0) == inside {
                let s = safe_newton(f, prev, self.s[j], prev_f, fj, 1e-12);
                return Lookahead {
                    point: self.point_at(s),
                    status: LookaheadStatus::Found,
                };
            }
            prev = self.s[j];
            prev_f = fj;
            // distance to p changes no faster than arc length, so no sign
            // change can occur within |fj| of this sample
            let reach = self.s[j] + fj.abs();
            j = (self.s.partition_point(|&v| v <= reach) - 1).max(j + 1);
        }
        if inside {
            Lookahead {
                point: self.end(),
                status: LookaheadStatus::EndOfPath,
            }
        } else {
            Lookahead {
                point: self.project(p, Some(s_min)).point,
                status: LookaheadStatus::Fallback,
            }
        }
    }

    /// Unsigned radius of curvature, clamped to `[MIN_RADIUS, MAX_RADIUS]`.
    pub fn curvature_radius(pp: &PathPoint) -> f64 {
        curvature_radius(pp.curvature)
    }
}

#[inline]
pub fn curvature_radius(curvature: f64) -> f64 {
    let k = curvature.abs();
    if k * MAX_RADIUS <= 1.0 {
        MAX_RADIUS
    } else {
        (1.0 / k).max(MIN_RADIUS)
    }
}

/// Root of `f` on `[lo, hi]` given `f(lo)` and a sign change across the
/// bracket; Newton steps that leave the bracket fall back to bisection.
fn safe_newton(f: impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64, f_lo: f64, f_hi: f64, tol: f64) -> f64 {
    let lo_negative = f_lo < 0.0;
    // secant start, kept away from the bracket ends
    let w = hi - lo;
    let mut x = (lo - f_lo * w / (f_hi - f_lo)).clamp(lo + 0.01 * w, hi - 0.01 * w);
    if !x.is_finite() {
        x = 0.5 * (lo + hi);
    }
    for _ in 0..100 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == lo_negative {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() < tol || hi - lo < tol {
            return next;
        }
        x = next;
    }
    x
}
