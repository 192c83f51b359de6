//! Unit-quaternion rotations of ℝ³.
//!
//! A rotation by angle `θ` about the unit axis `u` is stored as
//! `(cos θ/2, sin θ/2 · u)`. Since `q` and `-q` describe the same rotation,
//! every constructor canonicalises to a nonnegative scalar part (and, when the
//! scalar part is exactly zero, a positive first nonzero vector component).

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Result, SymError};

pub type Vec3 = [f64; 3];

const UNIT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Builds a rotation from quaternion components, rejecting non-unit input.
    pub fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (w * w + x * x + y * y + z * z).sqrt();
        if (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(SymError::NonUnitQuaternion { norm });
        }
        Ok(Self::canonical(w, x, y, z))
    }

    /// Normalises arbitrary nonzero components. Used by samplers and after
    /// products, where drift is at the rounding level.
    pub(crate) fn normalized(w: f64, x: f64, y: f64, z: f64) -> Self {
        let norm = (w * w + x * x + y * y + z * z).sqrt();
        Self::canonical(w / norm, x / norm, y / norm, z / norm)
    }

    fn canonical(w: f64, x: f64, y: f64, z: f64) -> Self {
        let flip = if w != 0.0 {
            w < 0.0
        } else if x != 0.0 {
            x < 0.0
        } else if y != 0.0 {
            y < 0.0
        } else {
            z < 0.0
        };
        if flip {
            Rotation {
                w: -w,
                x: -x,
                y: -y,
                z: -z,
            }
        } else {
            Rotation { w, x, y, z }
        }
    }

    /// Rotation by `angle` radians about `axis` (normalised internally).
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Self {
        let n = norm(axis);
        if n == 0.0 {
            return Self::IDENTITY;
        }
        let (s, c) = (angle / 2.0).sin_cos();
        Self::normalized(c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n)
    }

    /// The minimal-angle rotation carrying direction `from` onto direction `to`.
    ///
    /// Both vectors must be nonzero. Antiparallel input picks a half turn about
    /// an axis orthogonal to `from`.
    pub fn between(from: Vec3, to: Vec3) -> Self {
        let a = scale(from, 1.0 / norm(from));
        let b = scale(to, 1.0 / norm(to));
        let axis = cross(a, b);
        let sin = norm(axis);
        let cos = dot(a, b);
        if sin < 1e-15 {
            if cos > 0.0 {
                return Self::IDENTITY;
            }
            return Self::from_axis_angle(any_orthogonal(a), PI);
        }
        Self::from_axis_angle(axis, sin.atan2(cos))
    }

    pub fn quaternion(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn scalar(&self) -> f64 {
        self.w
    }

    pub fn vector(&self) -> Vec3 {
        [self.x, self.y, self.z]
    }

    /// Quaternion product; `a.compose(&b)` applies `b` first.
    pub fn compose(&self, other: &Rotation) -> Rotation {
        let (a, b) = (self, other);
        Self::normalized(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }

    pub fn inverse(&self) -> Rotation {
        Self::canonical(self.w, -self.x, -self.y, -self.z)
    }

    pub fn rotate(&self, v: Vec3) -> Vec3 {
        // v' = v + 2w (q × v) + 2 q × (q × v)
        let q = [self.x, self.y, self.z];
        let t = scale(cross(q, v), 2.0);
        let u = cross(q, t);
        [
            v[0] + self.w * t[0] + u[0],
            v[1] + self.w * t[1] + u[1],
            v[2] + self.w * t[2] + u[2],
        ]
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> f64 {
        2.0 * norm(self.vector()).atan2(self.w.abs())
    }

    /// Bi-invariant distance: the angle of `self⁻¹ · other`.
    pub fn distance(&self, other: &Rotation) -> f64 {
        // scalar part of conj(a)·b is ⟨a, b⟩; the vector part is computed directly
        let (a, b) = (self, other);
        let s = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
        let v = [
            a.w * b.x - a.x * b.w - a.y * b.z + a.z * b.y,
            a.w * b.y + a.x * b.z - a.y * b.w - a.z * b.x,
            a.w * b.z - a.x * b.y + a.y * b.x - a.z * b.w,
        ];
        2.0 * norm(v).atan2(s.abs())
    }
}

impl Default for Rotation {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rot(w={:.6}, x={:.6}, y={:.6}, z={:.6})",
            self.w, self.x, self.y, self.z
        )
    }
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn normalize(a: Vec3) -> Vec3 {
    scale(a, 1.0 / norm(a))
}

/// A unit vector orthogonal to the nonzero `a`.
pub fn any_orthogonal(a: Vec3) -> Vec3 {
    let pick = if a[0].abs() <= a[1].abs() && a[0].abs() <= a[2].abs() {
        [1.0, 0.0, 0.0]
    } else if a[1].abs() <= a[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    normalize(cross(a, pick))
}
