//! The smootherstep polynomial `S(u) = 6u⁵ − 15u⁴ + 10u³`, clamped to `[0, 1]`.

pub fn step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        u * u * u * (u * (6.0 * u - 15.0) + 10.0)
    }
}

/// `S′(u)`; peaks at `15/8` for `u = 1/2`.
pub fn step_derivative(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        30.0 * u * u * (u - 1.0) * (u - 1.0)
    }
}

/// `∫_0^u S`, continued linearly past `u = 1`.
pub fn step_integral(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        u - 0.5
    } else {
        u * u * u * u * (u * (u - 3.0) + 2.5)
    }
}

/// Monotone cutoff rising from 0 at `start` to 1 at `end`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Cutoff {
    pub start: f64,
    pub end: f64,
}

impl Cutoff {
    pub fn value(&self, x: f64) -> f64 {
        step((x - self.start) / (self.end - self.start))
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let w = self.end - self.start;
        step_derivative((x - self.start) / w) / w
    }
}
