//! Closed-form amplitudes for one uniform slab in vacuum.
//!
//! Units: lengths in nm, wave numbers in 1/nm, potentials and fields in 1/nm²
//! with the `2m/ħ²` and `2μm/ħ²` factors already applied. The stationary
//! equation inside a slab is `ψ'' + (k² − u − σ·B)ψ = 0`, and an absorbing
//! potential is written `u = u′ − i·u″` with `u″ ≥ 0`.

use num_complex::Complex64;
use thiserror::Error;

use crate::spin::{split_scalar_function, FieldVector, ScalarSplit, SpinMatrix};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this value of `|k′|·d` the barrier amplitudes switch to the
/// trigonometric form, which has no `0/0` at `k′ = 0`.
const SMALL_PHASE: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayerError {
    #[error("layer thickness must be positive and finite, got {0}")]
    Thickness(f64),
    #[error("potential {0} has gain (Im u > 0); only absorbing or lossless media are allowed")]
    Gain(Complex64),
    #[error("non-finite layer parameter")]
    NonFinite,
}

/// Uniform magnetic slab.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    thickness: f64,
    potential: Complex64,
    field: FieldVector,
}

impl Layer {
    pub fn new(thickness: f64, potential: Complex64, field: FieldVector) -> Result<Self, LayerError> {
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(LayerError::Thickness(thickness));
        }
        if !potential.is_finite() || !field.is_finite() {
            return Err(LayerError::NonFinite);
        }
        if potential.im > 0.0 {
            return Err(LayerError::Gain(potential));
        }
        Ok(Self { thickness, potential, field })
    }

    /// Layer from `u′`, `u″` (absorption, ≥ 0) and field.
    pub fn from_parts(thickness: f64, u_re: f64, u_abs: f64, field: FieldVector) -> Result<Self, LayerError> {
        Self::new(thickness, Complex64::new(u_re, -u_abs), field)
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn potential(&self) -> Complex64 {
        self.potential
    }

    pub fn field(&self) -> FieldVector {
        self.field
    }

    pub fn is_lossless(&self) -> bool {
        self.potential.im == 0.0
    }

    pub fn with_field(&self, field: FieldVector) -> Self {
        Self { field, ..*self }
    }

    /// Same layer with potential and field multiplied by `eps`.
    pub fn scaled_contrast(&self, eps: f64) -> Self {
        Self {
            potential: self.potential * eps,
            field: self.field.scale(eps),
            ..*self
        }
    }
}

/// Reflection and transmission amplitudes of a spinless barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarAmplitudes {
    pub r: Complex64,
    pub t: Complex64,
}

impl ScalarAmplitudes {
    pub fn flux(&self) -> f64 {
        self.r.norm_sqr() + self.t.norm_sqr()
    }
}

/// Reflection and transmission matrices of a magnetic slab.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinAmplitudes {
    pub r: SpinMatrix,
    pub t: SpinMatrix,
}

/// `√(k² − u − s)`.
///
/// Principal root with the cut approached from above, so `Im k′ ≥ 0` for every
/// lossless or absorbing potential and `k′(u*) = k′(u)*` off the real axis.
pub fn k_prime(k: f64, u: Complex64, s: Complex64) -> Complex64 {
    upper_sqrt(Complex64::new(k * k, 0.0) - u - s)
}

/// Principal square root with `-0.0` imaginary parts treated as `+0.0`,
/// so negative reals map to `+i·√|z|`.
pub(crate) fn upper_sqrt(mut z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        z.im = 0.0;
    }
    z.sqrt()
}

/// Vacuum-to-medium interface amplitude `(k − k′)/(k + k′)`.
pub fn interface_r(k: f64, u: Complex64, s: Complex64) -> Complex64 {
    interface_r_from(k, k_prime(k, u, s))
}

fn interface_r_from(k: f64, kp: Complex64) -> Complex64 {
    let den = k + kp;
    debug_assert!(den != Complex64::new(0.0, 0.0), "k + k' vanished");
    (k - kp) / den
}

/// `sin(z)/z`, accurate near zero.
fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        ONE - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// Amplitudes of a rectangular barrier of height `u` and width `d`.
///
/// `R` multiplies `e^{−ikx}` on the left and `T` multiplies `e^{ik(x−d)}` on the right.
pub fn barrier_rt(k: f64, u: Complex64, d: f64) -> ScalarAmplitudes {
    debug_assert!(k > 0.0 && d > 0.0);
    let kp = k_prime(k, u, Complex64::new(0.0, 0.0));
    barrier_rt_from(k, kp, d)
}

pub(crate) fn barrier_rt_from(k: f64, kp: Complex64, d: f64) -> ScalarAmplitudes {
    if (kp * d).norm() < SMALL_PHASE {
        // 2kk′/(2kk′cos k′d − i(k²+k′²) sin k′d), divided through by k′
        let c = (kp * d).cos();
        let sd = sinc(kp * d) * d;
        let den = 2.0 * k * c - I * (k * k + kp * kp) * sd;
        return ScalarAmplitudes {
            r: I * (kp * kp - k * k) * sd / den,
            t: Complex64::new(2.0 * k, 0.0) / den,
        };
    }
    let r = interface_r_from(k, kp);
    let e1 = (I * kp * d).exp();
    let e2 = e1 * e1;
    let one_minus_r2 = 4.0 * k * kp / ((k + kp) * (k + kp));
    let den = ONE - r * r * e2;
    ScalarAmplitudes {
        r: r * (ONE - e2) / den,
        t: e1 * one_minus_r2 / den,
    }
}

/// Interior wave of a left-incident solution, normalised to unit incident amplitude.
pub(crate) fn barrier_interior(x: f64, k: f64, kp: Complex64, d: f64) -> Complex64 {
    if (kp * d).norm() < SMALL_PHASE {
        // propagate ψ(d) = T, ψ′(d) = ikT back into the slab
        let t = barrier_rt_from(k, kp, d).t;
        let y = x - d;
        return t * ((kp * y).cos() + I * k * sinc(kp * y) * y);
    }
    let r = interface_r_from(k, kp);
    let e1 = (I * kp * d).exp();
    let norm = (ONE + r) * e1 / (ONE - r * r * e1 * e1);
    norm * ((I * kp * (x - d)).exp() - r * (-I * kp * (x - d)).exp())
}

/// Full-axis stationary wave for a left-incident unit wave on a rectangular barrier.
pub fn barrier_wavefunction(x: f64, k: f64, u: Complex64, d: f64) -> Complex64 {
    let kp = k_prime(k, u, Complex64::new(0.0, 0.0));
    let amps = barrier_rt_from(k, kp, d);
    if x < 0.0 {
        (I * k * x).exp() + amps.r * (-I * k * x).exp()
    } else if x > d {
        amps.t * (I * k * (x - d)).exp()
    } else {
        barrier_interior(x, k, kp, d)
    }
}

fn split_amplitudes(k: f64, layer: &Layer) -> (ScalarSplit, ScalarSplit) {
    let mut r_vals = [Complex64::new(0.0, 0.0); 2];
    let mut idx = 0;
    let t = split_scalar_function(
        |s| {
            let kp = k_prime(k, layer.potential, Complex64::new(s, 0.0));
            let a = barrier_rt_from(k, kp, layer.thickness);
            r_vals[idx] = a.r;
            idx += 1;
            a.t
        },
        &layer.field,
    );
    let r = match t.direction {
        Some(_) => ScalarSplit {
            f_plus: (r_vals[0] + r_vals[1]) * 0.5,
            f_minus: (r_vals[0] - r_vals[1]) * 0.5,
            direction: t.direction,
        },
        None => ScalarSplit { f_plus: r_vals[0], f_minus: Complex64::new(0.0, 0.0), direction: None },
    };
    (r, t)
}

/// Transmission matrix `T(σ·B)` of a single slab.
pub fn layer_t(k: f64, layer: &Layer) -> SpinMatrix {
    layer_t_split(k, layer).to_matrix()
}

/// Reflection matrix `R(σ·B)` of a single slab.
pub fn layer_r(k: f64, layer: &Layer) -> SpinMatrix {
    layer_r_split(k, layer).to_matrix()
}

/// `T⁺`, `T⁻` of the even/odd split of the slab transmission.
pub fn layer_t_split(k: f64, layer: &Layer) -> ScalarSplit {
    split_amplitudes(k, layer).1
}

pub fn layer_r_split(k: f64, layer: &Layer) -> ScalarSplit {
    split_amplitudes(k, layer).0
}

/// Both amplitudes in one pass over the two field eigenvalues.
pub fn layer_amplitudes(k: f64, layer: &Layer) -> SpinAmplitudes {
    let (r, t) = split_amplitudes(k, layer);
    SpinAmplitudes { r: r.to_matrix(), t: t.to_matrix() }
}
