use crate::error::{Error, Result};

/// A nonnegative rate `γ(t)`; the matching jump amplitude is `√γ(t)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    Constant(f64),
    /// `c0 + amp · sin(ω t)` with `|amp| ≤ c0`.
    Sinusoid { c0: f64, amp: f64, omega: f64 },
    /// Linear interpolation between `(t, γ)` knots with strictly increasing
    /// `t`; constant beyond either end.
    PiecewiseLinear(Vec<(f64, f64)>),
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        match self {
            Profile::Constant(c) => {
                if !(*c >= 0.0 && c.is_finite()) {
                    return bad(format!("constant rate {c} must be finite and nonnegative"));
                }
            }
            Profile::Sinusoid { c0, amp, omega } => {
                if !(c0.is_finite() && amp.is_finite() && omega.is_finite()) {
                    return bad("sinusoid parameters must be finite".into());
                }
                if amp.abs() > *c0 {
                    return bad(format!("sinusoid amplitude {amp} exceeds offset {c0}; rate would go negative"));
                }
            }
            Profile::PiecewiseLinear(knots) => {
                if knots.is_empty() {
                    return bad("piecewise-linear profile needs at least one knot".into());
                }
                if knots.iter().any(|(t, v)| !(t.is_finite() && *v >= 0.0 && v.is_finite())) {
                    return bad("knots need finite times and finite nonnegative rates".into());
                }
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return bad("knot times must increase strictly".into());
                }
            }
        }
        Ok(())
    }

    pub fn rate(&self, t: f64) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Sinusoid { c0, amp, omega } => (c0 + amp * (omega * t).sin()).max(0.0),
            Profile::PiecewiseLinear(knots) => {
                let first = knots[0];
                let last = knots[knots.len() - 1];
                if t <= first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    return last.1;
                }
                let i = knots.partition_point(|(tk, _)| *tk <= t);
                let (t0, v0) = knots[i - 1];
                let (t1, v1) = knots[i];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Profile::Constant(_) => true,
            Profile::Sinusoid { amp, omega, .. } => *amp == 0.0 || *omega == 0.0,
            Profile::PiecewiseLinear(k) => k.windows(2).all(|w| w[0].1 == w[1].1),
        }
    }

    /// `∫_a^b γ(t) dt`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            Profile::Constant(c) => c * (b - a),
            Profile::Sinusoid { c0, amp, omega } => {
                if *omega == 0.0 {
                    c0 * (b - a)
                } else {
                    c0 * (b - a) - amp / omega * ((omega * b).cos() - (omega * a).cos())
                }
            }
            Profile::PiecewiseLinear(knots) => {
                // Trapezoids are exact on every linear piece.
                let mut pts = vec![a];
                pts.extend(knots.iter().map(|(t, _)| *t).filter(|t| *t > a && *t < b));
                pts.push(b);
                pts.windows(2).map(|w| 0.5 * (w[1] - w[0]) * (self.rate(w[0]) + self.rate(w[1]))).sum()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_interpolates_and_clamps() {
        let p = Profile::PiecewiseLinear(vec![(0.0, 1.0), (1.0, 3.0), (2.0, 0.0)]);
        p.validate().unwrap();
        assert_eq!(p.rate(-1.0), 1.0);
        assert_eq!(p.rate(0.5), 2.0);
        assert_eq!(p.rate(1.5), 1.5);
        assert_eq!(p.rate(9.0), 0.0);
        assert!((p.integral(0.0, 2.0) - 3.5).abs() < 1e-15);
    }

    #[test]
    fn sinusoid_integral_matches_quadrature() {
        let p = Profile::Sinusoid { c0: 1.0, amp: 0.5, omega: 3.0 };
        let n = 20_000;
        let h = 1.3 / n as f64;
        let simpson: f64 = (0..n)
            .map(|i| {
                let a = i as f64 * h;
                h / 6.0 * (p.rate(a) + 4.0 * p.rate(a + h / 2.0) + p.rate(a + h))
            })
            .sum();
        assert!((p.integral(0.0, 1.3) - simpson).abs() < 1e-12);
    }

    #[test]
    fn negative_rates_rejected() {
        assert!(Profile::Sinusoid { c0: 0.2, amp: 0.3, omega: 1.0 }.validate().is_err());
        assert!(Profile::Constant(-1.0).validate().is_err());
        assert!(Profile::PiecewiseLinear(vec![(1.0, 0.0), (1.0, 1.0)]).validate().is_err());
    }
}
