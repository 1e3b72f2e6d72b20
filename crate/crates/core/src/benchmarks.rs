//! Manufactured solutions with analytic gradients and loads.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::ParallelogramMesh;

/// Exact solution of `-Δu = f` with `u = 0` on the boundary.
pub trait Manufactured: Sync {
    fn u(&self, x: f64, y: f64) -> f64;
    fn grad(&self, x: f64, y: f64) -> [f64; 2];
    fn f(&self, x: f64, y: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchmarkId {
    SmoothSine,
    BubbleExact,
    CornerCutoff,
}

impl BenchmarkId {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::SmoothSine => "smooth-sine",
            Self::BubbleExact => "bubble-exact",
            Self::CornerCutoff => "corner-cutoff",
        }
    }

    /// The benchmark posed on the given mesh. The bubble adapts to the mesh's
    /// bounding box; the others have fixed domains.
    pub fn build(self, mesh: &ParallelogramMesh) -> Box<dyn Manufactured> {
        match self {
            Self::SmoothSine => Box::new(SmoothSine),
            Self::BubbleExact => {
                let b = mesh.bounding_box();
                Box::new(Bubble {
                    x0: b[0],
                    x1: b[1],
                    y0: b[2],
                    y1: b[3],
                })
            }
            Self::CornerCutoff => Box::new(CornerCutoff::default()),
        }
    }
}

impl fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BenchmarkId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "smooth-sine" => Ok(Self::SmoothSine),
            "bubble-exact" => Ok(Self::BubbleExact),
            "corner-cutoff" => Ok(Self::CornerCutoff),
            other => Err(Error::Config(format!("unknown benchmark '{other}'"))),
        }
    }
}

/// `u = sin(πx) sin(πy)` on the unit square.
#[derive(Debug, Clone, Copy, Default)]
pub struct SmoothSine;

impl Manufactured for SmoothSine {
    fn u(&self, x: f64, y: f64) -> f64 {
        (PI * x).sin() * (PI * y).sin()
    }

    fn grad(&self, x: f64, y: f64) -> [f64; 2] {
        [
            PI * (PI * x).cos() * (PI * y).sin(),
            PI * (PI * x).sin() * (PI * y).cos(),
        ]
    }

    fn f(&self, x: f64, y: f64) -> f64 {
        2.0 * PI * PI * self.u(x, y)
    }
}

/// `u = (x-x0)(x1-x)(y-y0)(y1-y)`, a biquadratic vanishing on the rectangle.
#[derive(Debug, Clone, Copy)]
pub struct Bubble {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Manufactured for Bubble {
    fn u(&self, x: f64, y: f64) -> f64 {
        (x - self.x0) * (self.x1 - x) * (y - self.y0) * (self.y1 - y)
    }

    fn grad(&self, x: f64, y: f64) -> [f64; 2] {
        let gx = (self.x0 + self.x1 - 2.0 * x) * (y - self.y0) * (self.y1 - y);
        let gy = (x - self.x0) * (self.x1 - x) * (self.y0 + self.y1 - 2.0 * y);
        [gx, gy]
    }

    fn f(&self, x: f64, y: f64) -> f64 {
        2.0 * (y - self.y0) * (self.y1 - y) + 2.0 * (x - self.x0) * (self.x1 - x)
    }
}

/// `u = χ(r) r^{2/3} sin(2θ/3)` on the L-shaped domain
/// `(-1,1)² \ [0,1)×(-1,0]`, with the reentrant corner at the origin and a
/// smooth radial cutoff `χ` equal to 1 for `r ≤ r0` and 0 for `r ≥ r1`.
#[derive(Debug, Clone, Copy)]
pub struct CornerCutoff {
    pub r0: f64,
    pub r1: f64,
}

impl Default for CornerCutoff {
    fn default() -> Self {
        Self { r0: 0.1, r1: 0.9 }
    }
}

fn h(t: f64) -> [f64; 3] {
    // exp(-1/t) and its first two derivatives
    if t <= 0.0 {
        return [0.0; 3];
    }
    let v = (-1.0 / t).exp();
    let t2 = t * t;
    [v, v / t2, v * (1.0 / (t2 * t2) - 2.0 / (t2 * t))]
}

impl CornerCutoff {
    /// `χ(r)`, `χ'(r)`, `χ''(r)`.
    pub fn cutoff(&self, r: f64) -> [f64; 3] {
        let len = self.r1 - self.r0;
        let t = (r - self.r0) / len;
        if t <= 0.0 {
            return [1.0, 0.0, 0.0];
        }
        if t >= 1.0 {
            return [0.0; 3];
        }
        let [a, a1, a2] = h(1.0 - t);
        let (a1, a2) = (-a1, a2);
        let [b, b1, b2] = h(t);
        let s = a + b;
        let s1 = a1 + b1;
        let num = a1 * b - a * b1;
        let chi = a / s;
        let d1 = num / (s * s);
        let d2 = (a2 * b - a * b2) / (s * s) - 2.0 * num * s1 / (s * s * s);
        [chi, d1 / len, d2 / (len * len)]
    }

    fn polar(x: f64, y: f64) -> (f64, f64) {
        let mut theta = y.atan2(x);
        if theta < 0.0 {
            theta += 2.0 * PI;
        }
        (x.hypot(y), theta)
    }
}

impl Manufactured for CornerCutoff {
    fn u(&self, x: f64, y: f64) -> f64 {
        let (r, th) = Self::polar(x, y);
        if r == 0.0 {
            return 0.0;
        }
        self.cutoff(r)[0] * r.powf(2.0 / 3.0) * (2.0 * th / 3.0).sin()
    }

    fn grad(&self, x: f64, y: f64) -> [f64; 2] {
        let (r, th) = Self::polar(x, y);
        if r == 0.0 {
            return [0.0; 2];
        }
        let [chi, chi1, _] = self.cutoff(r);
        let s = r.powf(2.0 / 3.0) * (2.0 * th / 3.0).sin();
        let dr = chi1 * s + chi * (2.0 / 3.0) * r.powf(-1.0 / 3.0) * (2.0 * th / 3.0).sin();
        let dth = chi * (2.0 / 3.0) * r.powf(-1.0 / 3.0) * (2.0 * th / 3.0).cos();
        let (c, sn) = (th.cos(), th.sin());
        [dr * c - dth * sn, dr * sn + dth * c]
    }

    fn f(&self, x: f64, y: f64) -> f64 {
        let (r, th) = Self::polar(x, y);
        if r <= self.r0 {
            return 0.0;
        }
        let [_, chi1, chi2] = self.cutoff(r);
        let sin = (2.0 * th / 3.0).sin();
        let s = r.powf(2.0 / 3.0) * sin;
        -(s * (chi2 + chi1 / r) + (4.0 / 3.0) * chi1 * r.powf(-1.0 / 3.0) * sin)
    }
}
