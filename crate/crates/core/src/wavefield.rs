//! Wave models and their trajectory velocity fields.
//!
//! Both models describe a screen-and-two-holes geometry with the holes on the
//! z axis at ±Z₀ and propagation toward +x:
//!
//! * [`PacketModel`] — superposition of two Gaussian wave packets with a
//!   common plane-wave carrier along x. Time dependent (the packets spread).
//! * [`DisphericalModel`] — stationary superposition of two outgoing
//!   spherical waves `e^{ikr}/r`, one per hole.
//!
//! All evaluations accept complexified coordinates ([`Complex3`]). The MdBB
//! velocity field is `-i (ħ/m) ∇ψ/ψ`; the dBB field is its real part at real
//! points. Velocities are computed from closed-form log-derivatives rather
//! than naive `∇ψ/ψ` division so that they stay accurate where |ψ| under- or
//! overflows.

use num_complex::Complex64;

use crate::errors::FieldError;
use crate::point::Complex3;

/// |ψ| threshold below which a point counts as a wave-function node and the
/// velocity field is treated as singular.
pub const NODE_EPSILON: f64 = 1e-12;

/// ln(NODE_EPSILON); node checks on the dispherical wave are done in log
/// space because |ψ| there spans hundreds of orders of magnitude.
const LN_NODE_EPSILON: f64 = -27.631021115928547;

/// tanh(w) is ±1 to double precision once |Re w| exceeds this (the correction
/// is e^{-2·20} ≈ 4e-18, below one ulp of 1).
const TANH_SATURATION: f64 = 20.0;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Principal complex square root with the branch cut approached from above:
/// an imaginary part of -0.0 is treated as +0.0, so arguments exactly on the
/// negative real axis map to +i√|w|. Points of that kind occur by
/// construction (trajectory starts on a circle in the imaginary xz-plane).
pub fn sqrt_cut_above(w: Complex64) -> Complex64 {
    let w = if w.im == 0.0 {
        Complex64::new(w.re, 0.0)
    } else {
        w
    };
    w.sqrt()
}

/// Complex tanh with saturation for large |Re| where libm's cosh/sinh would
/// overflow even though the value is ±1 to machine precision.
fn tanh_robust(w: Complex64) -> Complex64 {
    if w.re.abs() > TANH_SATURATION {
        Complex64::new(w.re.signum(), 0.0)
    } else {
        w.tanh()
    }
}

/// Two Gaussian packets drifting toward +x with a common carrier wave.
///
/// ψ(p, t) = (2πσ_t²)^{-1/4} · [g_A + g_B] · e^{i(k_x x − E_x t/ħ)} with
/// g_{A,B} = exp[(−(z ∓ Z₀)² − y²) / (4σ₀σ_t)], σ_t = σ₀(1 + i(ħ/m)t/(2σ₀²))
/// and E_x/ħ = (ħ/m)k_x²/2. Hole amplitudes are equal (C_A = C_B = 1).
#[derive(Debug, Clone, Copy)]
pub struct PacketModel {
    /// Initial packet width σ₀.
    pub sigma0: f64,
    /// Carrier wave number k_x.
    pub kx: f64,
    /// Half hole separation Z₀ (holes at z = ±Z₀).
    pub z0: f64,
    /// ħ/m.
    pub hbar_over_m: f64,
}

impl Default for PacketModel {
    fn default() -> Self {
        PacketModel {
            sigma0: 1.0,
            kx: 1.0,
            z0: 10.0,
            hbar_over_m: 1.0,
        }
    }
}

impl PacketModel {
    /// Complex packet width σ_t = σ₀·(1 + i·(ħ/m)·t/(2σ₀²)).
    pub fn sigma_t(&self, t: f64) -> Complex64 {
        let tau = self.hbar_over_m * t / (2.0 * self.sigma0 * self.sigma0);
        self.sigma0 * Complex64::new(1.0, tau)
    }

    /// ψ at a complexified point. Fails only on numeric overflow.
    pub fn psi(&self, p: Complex3, t: f64) -> Result<Complex64, FieldError> {
        let st = self.sigma_t(t);
        let four_ss = 4.0 * self.sigma0 * st;
        let prefactor = (2.0 * std::f64::consts::PI * st * st).powf(-0.25);
        let dza = p.z - self.z0;
        let dzb = p.z + self.z0;
        let ga = ((-dza * dza - p.y * p.y) / four_ss).exp();
        let gb = ((-dzb * dzb - p.y * p.y) / four_ss).exp();
        let ex_t = 0.5 * self.hbar_over_m * self.kx * self.kx * t;
        let carrier = (I * (self.kx * p.x - ex_t)).exp();
        let psi = prefactor * (ga + gb) * carrier;
        if psi.re.is_finite() && psi.im.is_finite() {
            Ok(psi)
        } else {
            Err(FieldError::Overflow)
        }
    }

    /// Analytic gradient (∂ψ/∂x, ∂ψ/∂y, ∂ψ/∂z).
    ///
    /// The z-derivative is evaluated in the primitive two-Gaussian form
    /// rather than via tanh, so it stays finite at nodes of ψ.
    pub fn grad_psi(&self, p: Complex3, t: f64) -> Result<Complex3, FieldError> {
        let st = self.sigma_t(t);
        let two_ss = 2.0 * self.sigma0 * st;
        let four_ss = 4.0 * self.sigma0 * st;
        let prefactor = (2.0 * std::f64::consts::PI * st * st).powf(-0.25);
        let dza = p.z - self.z0;
        let dzb = p.z + self.z0;
        let ga = ((-dza * dza - p.y * p.y) / four_ss).exp();
        let gb = ((-dzb * dzb - p.y * p.y) / four_ss).exp();
        let ex_t = 0.5 * self.hbar_over_m * self.kx * self.kx * t;
        let carrier = (I * (self.kx * p.x - ex_t)).exp();
        let common = prefactor * carrier;
        let psi = common * (ga + gb);
        let gx = I * self.kx * psi;
        let gy = -(p.y / two_ss) * psi;
        let gz = -common * (dza * ga + dzb * gb) / two_ss;
        let g = Complex3::new(gx, gy, gz);
        if g.is_finite() {
            Ok(g)
        } else {
            Err(FieldError::Overflow)
        }
    }

    /// ∇ψ/ψ in closed form; the shared Gaussian factors cancel analytically,
    /// leaving (i k_x, −y/(2σ₀σ_t), −[z − Z₀·tanh(zZ₀/(2σ₀σ_t))]/(2σ₀σ_t)).
    fn grad_over_psi(&self, p: Complex3, t: f64) -> Complex3 {
        let st = self.sigma_t(t);
        let two_ss = 2.0 * self.sigma0 * st;
        let th = tanh_robust(p.z * self.z0 / two_ss);
        Complex3::new(
            Complex64::new(0.0, self.kx),
            -(p.y / two_ss),
            -((p.z - self.z0 * th) / two_ss),
        )
    }

    /// MdBB velocity `-i (ħ/m) ∇ψ/ψ`. The x component is exactly ħk_x/m with
    /// zero imaginary part, so x_i is a constant of the motion.
    pub fn mdbb_velocity(&self, p: Complex3, t: f64) -> Result<Complex3, FieldError> {
        let psi = self.psi(p, t)?;
        if psi.norm() < NODE_EPSILON {
            return Err(FieldError::NodePoint);
        }
        let g = self.grad_over_psi(p, t);
        let mih = Complex64::new(0.0, -self.hbar_over_m);
        let v = Complex3::new(
            Complex64::new(self.hbar_over_m * self.kx, 0.0),
            mih * g.y,
            mih * g.z,
        );
        if v.is_finite() {
            Ok(v)
        } else {
            Err(FieldError::Overflow)
        }
    }
}

/// Stationary two-source ("dispherical") wave ψ = e^{ikr₁}/r₁ + e^{ikr₂}/r₂
/// with r₁,₂ = √(x² + y² + (z ∓ Z₀)²) continued to complex coordinates via
/// the principal square root (see [`sqrt_cut_above`]).
#[derive(Debug, Clone, Copy)]
pub struct DisphericalModel {
    /// Wave number k.
    pub k: f64,
    /// Half hole separation Z₀ (sources at z = ±Z₀).
    pub z0: f64,
    /// Points with |r₁| or |r₂| at or below this radius count as singular.
    pub singular_radius: f64,
    /// ħ/m.
    pub hbar_over_m: f64,
}

impl Default for DisphericalModel {
    fn default() -> Self {
        DisphericalModel {
            k: 1.0,
            z0: 10.0,
            singular_radius: 1e-6,
            hbar_over_m: 1.0,
        }
    }
}

impl DisphericalModel {
    /// Complex radii (r₁, r₂) from the two sources.
    pub fn radii(&self, p: Complex3) -> (Complex64, Complex64) {
        let dz1 = p.z - self.z0;
        let dz2 = p.z + self.z0;
        let w1 = p.x * p.x + p.y * p.y + dz1 * dz1;
        let w2 = p.x * p.x + p.y * p.y + dz2 * dz2;
        (sqrt_cut_above(w1), sqrt_cut_above(w2))
    }

    fn check_radii(&self, r1: Complex64, r2: Complex64) -> Result<(), FieldError> {
        if r1.norm() <= self.singular_radius || r2.norm() <= self.singular_radius {
            Err(FieldError::SingularPoint)
        } else {
            Ok(())
        }
    }

    /// ψ at a complexified point.
    pub fn psi(&self, p: Complex3) -> Result<Complex64, FieldError> {
        let (r1, r2) = self.radii(p);
        self.check_radii(r1, r2)?;
        let psi = (I * self.k * r1).exp() / r1 + (I * self.k * r2).exp() / r2;
        if psi.re.is_finite() && psi.im.is_finite() {
            Ok(psi)
        } else {
            Err(FieldError::Overflow)
        }
    }

    /// Analytic gradient. Each coordinate derivative of e^{ikr}/r carries the
    /// factor (ikr − 1)e^{ikr}/r³ times that coordinate's offset:
    /// ∂ψ/∂x = x·[(ikr₁−1)e^{ikr₁}/r₁³ + (ikr₂−1)e^{ikr₂}/r₂³], same for y,
    /// and ∂ψ/∂z weights the terms with (z − Z₀) and (z + Z₀).
    pub fn grad_psi(&self, p: Complex3) -> Result<Complex3, FieldError> {
        let (r1, r2) = self.radii(p);
        self.check_radii(r1, r2)?;
        let t1 = (I * self.k * r1 - 1.0) * (I * self.k * r1).exp() / (r1 * r1 * r1);
        let t2 = (I * self.k * r2 - 1.0) * (I * self.k * r2).exp() / (r2 * r2 * r2);
        let g = Complex3::new(
            p.x * (t1 + t2),
            p.y * (t1 + t2),
            (p.z - self.z0) * t1 + (p.z + self.z0) * t2,
        );
        if g.is_finite() {
            Ok(g)
        } else {
            Err(FieldError::Overflow)
        }
    }

    /// Logarithmic derivative `∇ψ/ψ`, evaluated in factored form.
    ///
    /// The dominant term (larger `|e^{ikr}|`, i.e. smaller Im r) is factored
    /// out of both ψ and ∇ψ: the remaining relative weight E has |E| ≤ 1, so
    /// the ratio stays well-scaled even where ψ itself would under- or
    /// overflow. The tie-break on equal Im keeps the choice symmetric under
    /// the mirror z ↦ −z (which swaps r₁ and r₂).
    fn log_derivative(&self, p: Complex3) -> Result<Complex3, FieldError> {
        let (r1, r2) = self.radii(p);
        self.check_radii(r1, r2)?;

        let first = if r1.im < r2.im {
            true
        } else if r2.im < r1.im {
            false
        } else {
            p.z.re >= 0.0
        };
        let (rd, ro, cd, co) = if first {
            (r1, r2, p.z - self.z0, p.z + self.z0)
        } else {
            (r2, r1, p.z + self.z0, p.z - self.z0)
        };

        let e = (I * self.k * (ro - rd)).exp();
        let a = 1.0 / rd + e / ro;
        // log|ψ| = ln|a| − k·Im(r_dominant); compare in log space.
        let log_abs_psi = a.norm().ln() - self.k * rd.im;
        if !(log_abs_psi >= LN_NODE_EPSILON) {
            return Err(FieldError::NodePoint);
        }
        let fd = (I * self.k * rd - 1.0) / (rd * rd * rd);
        let fo = e * ((I * self.k * ro - 1.0) / (ro * ro * ro));
        let s = fd + fo;
        Ok(Complex3::new(p.x * s / a, p.y * s / a, (cd * fd + co * fo) / a))
    }

    /// MdBB velocity `-i (ħ/m) ∇ψ/ψ`.
    pub fn mdbb_velocity(&self, p: Complex3) -> Result<Complex3, FieldError> {
        let g = self.log_derivative(p)?;
        let mih = Complex64::new(0.0, -self.hbar_over_m);
        let v = Complex3::new(mih * g.x, mih * g.y, mih * g.z);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(FieldError::Overflow)
        }
    }

    /// Equation of motion integrated for complex trajectories of this wave:
    /// the flow `ż = -(ħ/m) ∇ψ/ψ`, i.e. the `-i` rotation of
    /// [`mdbb_velocity`](Self::mdbb_velocity).
    ///
    /// For this stationary two-source wave the two fields differ in
    /// character: under the rotated flow, starts on the imaginary circle
    /// around a hole are transported across the barrier region toward the
    /// screen, producing helical paths whose real projections fan over the
    /// interference fringes and cross one another. The unrotated field
    /// instead drives those same starts into unbounded transverse drift, so
    /// the complex scheme integrates this flow. Real-plane guidance is
    /// unaffected ([`dbb_velocity`](WaveModel::dbb_velocity) restricts the
    /// unrotated field).
    pub fn complex_scheme_velocity(&self, p: Complex3) -> Result<Complex3, FieldError> {
        let g = self.log_derivative(p)?;
        let mh = Complex64::new(-self.hbar_over_m, 0.0);
        let v = Complex3::new(mh * g.x, mh * g.y, mh * g.z);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(FieldError::Overflow)
        }
    }
}

/// Either wave model, with a common evaluation interface.
#[derive(Debug, Clone, Copy)]
pub enum WaveModel {
    Packet(PacketModel),
    Dispherical(DisphericalModel),
}

impl WaveModel {
    pub fn hbar_over_m(&self) -> f64 {
        match self {
            WaveModel::Packet(m) => m.hbar_over_m,
            WaveModel::Dispherical(m) => m.hbar_over_m,
        }
    }

    /// Half hole separation Z₀.
    pub fn z0(&self) -> f64 {
        match self {
            WaveModel::Packet(m) => m.z0,
            WaveModel::Dispherical(m) => m.z0,
        }
    }

    pub fn is_time_dependent(&self) -> bool {
        matches!(self, WaveModel::Packet(_))
    }

    /// The natural evaluation time for a screen-plane density: the packet's
    /// ballistic arrival time `x / v_x` at the plane, or 0 for the
    /// stationary model (whose density is time independent).
    pub fn reference_time(&self, screen_x: f64) -> f64 {
        match self {
            WaveModel::Packet(m) => screen_x / (m.hbar_over_m * m.kx),
            WaveModel::Dispherical(_) => 0.0,
        }
    }

    pub fn psi(&self, p: Complex3, t: f64) -> Result<Complex64, FieldError> {
        match self {
            WaveModel::Packet(m) => m.psi(p, t),
            WaveModel::Dispherical(m) => m.psi(p),
        }
    }

    pub fn grad_psi(&self, p: Complex3, t: f64) -> Result<Complex3, FieldError> {
        match self {
            WaveModel::Packet(m) => m.grad_psi(p, t),
            WaveModel::Dispherical(m) => m.grad_psi(p),
        }
    }

    /// Full complex MdBB velocity `-i (ħ/m) ∇ψ/ψ` at a complexified point.
    pub fn mdbb_velocity(&self, p: Complex3, t: f64) -> Result<Complex3, FieldError> {
        match self {
            WaveModel::Packet(m) => m.mdbb_velocity(p, t),
            WaveModel::Dispherical(m) => m.mdbb_velocity(p),
        }
    }

    /// dBB velocity at a real point: the real part of the MdBB velocity.
    /// The point must be effectively real (zero imaginary parts).
    pub fn dbb_velocity(&self, p: Complex3, t: f64) -> Result<[f64; 3], FieldError> {
        debug_assert!(p.is_real(), "dbb_velocity requires a real point");
        let v = self.mdbb_velocity(p, t)?;
        Ok([v.x.re, v.y.re, v.z.re])
    }
}
