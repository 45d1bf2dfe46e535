use super::spline::Spline2;
use crate::geom::Vec2;

/// Analytic geometry behind a [`super::ReferencePath`], evaluated at its own parameter `u`.
#[derive(Debug, Clone)]
pub(crate) enum Curve {
    /// Graph `y = a_sin·sin(w_sin·x) + a_cos·cos(w_cos·x)`, parameter `u = x`.
    Sinusoid {
        a_sin: f64,
        w_sin: f64,
        a_cos: f64,
        w_cos: f64,
    },
    /// Circular arc, parameter `u` is arc length.
    Arc {
        center: Vec2,
        radius: f64,
        start_angle: f64,
        // +1 anticlockwise, −1 clockwise
        sense: f64,
    },
    /// Straight segment, parameter `u` is arc length.
    Line {
        origin: Vec2,
        direction: Vec2,
    },
    Spline(Spline2),
}

impl Curve {
    /// Position, first and second derivative with respect to `u`.
    #[inline]
    pub fn eval(&self, u: f64) -> (Vec2, Vec2, Vec2) {
        match self {
            Curve::Sinusoid {
                a_sin,
                w_sin,
                a_cos,
                w_cos,
            } => {
                let (ss, cs) = (w_sin * u).sin_cos();
                let (sc, cc) = (w_cos * u).sin_cos();
                let y = a_sin * ss + a_cos * cc;
                let dy = a_sin * w_sin * cs - a_cos * w_cos * sc;
                let ddy = -a_sin * w_sin * w_sin * ss - a_cos * w_cos * w_cos * cc;
                (Vec2::new(u, y), Vec2::new(1.0, dy), Vec2::new(0.0, ddy))
            }
            Curve::Arc {
                center,
                radius,
                start_angle,
                sense,
            } => {
                let theta = start_angle + sense * u / radius;
                let radial = Vec2::from_angle(theta);
                let tangent = radial.perp() * *sense;
                (*center + radial * *radius, tangent, -radial * (1.0 / radius))
            }
            Curve::Line { origin, direction } => (*origin + *direction * u, *direction, Vec2::ZERO),
            Curve::Spline(sp) => sp.eval(u),
        }
    }

    /// `|dc/du|`.
    #[inline]
    pub fn speed(&self, u: f64) -> f64 {
        match self {
            Curve::Sinusoid {
                a_sin,
                w_sin,
                a_cos,
                w_cos,
            } => {
                let dy = a_sin * w_sin * (w_sin * u).cos() - a_cos * w_cos * (w_cos * u).sin();
                (1.0 + dy * dy).sqrt()
            }
            Curve::Arc { .. } | Curve::Line { .. } => 1.0,
            Curve::Spline(sp) => sp.eval(u).1.norm(),
        }
    }

    pub fn has_unit_speed(&self) -> bool {
        matches!(self, Curve::Arc { .. } | Curve::Line { .. })
    }
}

const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Arc length of `curve` between parameters `a` and `b` (5-point Gauss–Legendre).
#[inline]
pub(crate) fn arc_length(curve: &Curve, a: f64, b: f64) -> f64 {
    if curve.has_unit_speed() {
        return b - a;
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL_NODES
        .iter()
        .zip(GL_WEIGHTS)
        .map(|(x, w)| w * curve.speed(mid + half * x))
        .sum::<f64>()
        * half
}

/// Arc length over `[a, b]` by adaptive Simpson, used to cross-check the table.
pub(crate) fn arc_length_adaptive(curve: &Curve, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }
    let f = |u: f64| curve.speed(u);
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(&f, a, fa, b, fb);
    recurse(&f, a, fa, b, fb, m, fm, whole, tol, 40)
}
