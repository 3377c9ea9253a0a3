//! Points in complexified 3-space.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A point (or velocity) in complexified 3-space: each Cartesian coordinate
/// is a complex number. Real-space points simply have zero imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex3 {
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
}

impl Complex3 {
    pub const fn new(x: Complex64, y: Complex64, z: Complex64) -> Self {
        Complex3 { x, y, z }
    }

    /// A purely real point.
    pub fn real(x: f64, y: f64, z: f64) -> Self {
        Complex3 {
            x: Complex64::new(x, 0.0),
            y: Complex64::new(y, 0.0),
            z: Complex64::new(z, 0.0),
        }
    }

    pub fn zero() -> Self {
        Complex3::real(0.0, 0.0, 0.0)
    }

    /// True when all imaginary parts are exactly zero.
    pub fn is_real(&self) -> bool {
        self.x.im == 0.0 && self.y.im == 0.0 && self.z.im == 0.0
    }

    /// The real projection (imaginary parts dropped).
    pub fn real_part(&self) -> Complex3 {
        Complex3::real(self.x.re, self.y.re, self.z.re)
    }

    /// The mirror image through the z = 0 plane (z ↦ −z, both parts).
    pub fn mirror_z(&self) -> Complex3 {
        Complex3 {
            x: self.x,
            y: self.y,
            z: -self.z,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.re.is_finite()
            && self.x.im.is_finite()
            && self.y.re.is_finite()
            && self.y.im.is_finite()
            && self.z.re.is_finite()
            && self.z.im.is_finite()
    }

    /// Largest absolute value among all six real components.
    pub fn max_abs_component(&self) -> f64 {
        let vals = [
            self.x.re, self.x.im, self.y.re, self.y.im, self.z.re, self.z.im,
        ];
        vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Componentwise distance in the max norm over all six real components.
    pub fn max_abs_diff(&self, other: &Complex3) -> f64 {
        (*self - *other).max_abs_component()
    }
}

impl Add for Complex3 {
    type Output = Complex3;
    fn add(self, rhs: Complex3) -> Complex3 {
        Complex3 {
            x: self.x + rhs.x,
            y: self.y + rhs.y,
            z: self.z + rhs.z,
        }
    }
}

impl Sub for Complex3 {
    type Output = Complex3;
    fn sub(self, rhs: Complex3) -> Complex3 {
        Complex3 {
            x: self.x - rhs.x,
            y: self.y - rhs.y,
            z: self.z - rhs.z,
        }
    }
}

impl Neg for Complex3 {
    type Output = Complex3;
    fn neg(self) -> Complex3 {
        Complex3 {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

/// Scaling by a real factor (used by the RK4 update).
impl Mul<f64> for Complex3 {
    type Output = Complex3;
    fn mul(self, s: f64) -> Complex3 {
        Complex3 {
            x: self.x * s,
            y: self.y * s,
            z: self.z * s,
        }
    }
}

impl Div<f64> for Complex3 {
    type Output = Complex3;
    fn div(self, s: f64) -> Complex3 {
        Complex3 {
            x: self.x / s,
            y: self.y / s,
            z: self.z / s,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_points_have_zero_imaginary_parts() {
        let p = Complex3::real(1.0, 2.0, -3.0);
        assert!(p.is_real());
        assert_eq!(p.real_part(), p);
    }

    #[test]
    fn mirror_flips_both_parts_of_z() {
        let p = Complex3::new(
            Complex64::new(1.0, 0.5),
            Complex64::new(0.0, 0.0),
            Complex64::new(2.0, -4.0),
        );
        let m = p.mirror_z();
        assert_eq!(m.z, Complex64::new(-2.0, 4.0));
        assert_eq!(m.x, p.x);
        assert_eq!(m.mirror_z(), p);
    }

    #[test]
    fn max_abs_component_scans_all_six() {
        let p = Complex3::new(
            Complex64::new(1.0, -9.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(3.0, 4.0),
        );
        assert_eq!(p.max_abs_component(), 9.0);
    }
}
