//! Time-reversal checks for a complex rectangular barrier.
//!
//! For `ψ(x)` solving the barrier problem with potential `u`, the conjugate
//! `ψ*(x)` must coincide with the solution for potential `u*` driven by two
//! incident waves: `R*(k,u)·e^{ikx}` from the left and `T*(k,u)·e^{−ik(x−d)}`
//! from the right. The residuals below measure how well that holds, region by
//! region.

use num_complex::Complex64;

use crate::layer::{barrier_interior, barrier_rt, barrier_wavefunction, interface_r, k_prime, ScalarAmplitudes};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Number of Chebyshev points used for interior matching.
pub const INTERIOR_POINTS: usize = 64;

/// Superposition of the left- and right-incident solutions for the conjugate potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugatedPair {
    pub k: f64,
    pub u: Complex64,
    pub d: f64,
    /// Amplitudes at `u`.
    pub direct: ScalarAmplitudes,
    /// Amplitudes at `u*`.
    pub conjugate: ScalarAmplitudes,
}

impl ConjugatedPair {
    pub fn new(k: f64, u: Complex64, d: f64) -> Self {
        Self {
            k,
            u,
            d,
            direct: barrier_rt(k, u, d),
            conjugate: barrier_rt(k, u.conj(), d),
        }
    }

    fn kp_conj(&self) -> Complex64 {
        k_prime(self.k, self.u.conj(), ZERO)
    }

    /// Solution for potential `u*` and incident wave `R*(k,u)·e^{ikx}`.
    pub fn phi_left(&self, x: f64) -> Complex64 {
        let (k, d) = (self.k, self.d);
        let amp = self.direct.r.conj();
        let c = &self.conjugate;
        if x < 0.0 {
            amp * ((I * k * x).exp() + c.r * (-I * k * x).exp())
        } else if x > d {
            amp * c.t * (I * k * (x - d)).exp()
        } else {
            amp * barrier_interior(x, k, self.kp_conj(), d)
        }
    }

    /// Solution for potential `u*` and incident wave `T*(k,u)·e^{−ik(x−d)}`.
    pub fn phi_right(&self, x: f64) -> Complex64 {
        let (k, d) = (self.k, self.d);
        let amp = self.direct.t.conj();
        let c = &self.conjugate;
        if x < 0.0 {
            amp * c.t * (-I * k * x).exp()
        } else if x > d {
            amp * ((-I * k * (x - d)).exp() + c.r * (I * k * (x - d)).exp())
        } else {
            // mirror image x → d − x of the left-incident interior wave
            amp * barrier_interior(d - x, k, self.kp_conj(), d)
        }
    }

    /// `ψ*(x)` for the original potential.
    pub fn target(&self, x: f64) -> Complex64 {
        barrier_wavefunction(x, self.k, self.u, self.d).conj()
    }

    pub fn residual(&self, x: f64) -> Complex64 {
        self.phi_left(x) + self.phi_right(x) - self.target(x)
    }
}

/// `R*(k,u)R(k,u*) + T*(k,u)T(k,u*) − 1`.
pub fn identity_18_residual(k: f64, u: Complex64, d: f64) -> Complex64 {
    let p = ConjugatedPair::new(k, u, d);
    p.direct.r.conj() * p.conjugate.r + p.direct.t.conj() * p.conjugate.t - 1.0
}

/// Amplitude of the wave leaving to the right, `R*(k,u)T(k,u*) + T*(k,u)R(k,u*)`,
/// which must vanish.
pub fn identity_19_residual(k: f64, u: Complex64, d: f64) -> Complex64 {
    let p = ConjugatedPair::new(k, u, d);
    p.direct.r.conj() * p.conjugate.t + p.direct.t.conj() * p.conjugate.r
}

/// `Re(R*(k,u)·T(k,u*))`: zero for lossless barriers, generally not with absorption.
pub fn quadrature_gap(k: f64, u: Complex64, d: f64) -> f64 {
    let p = ConjugatedPair::new(k, u, d);
    (p.direct.r.conj() * p.conjugate.t).re
}

/// Interior mismatch between the conjugate-potential superposition and `ψ*` at `0 < x < d`.
pub fn interior_match_residual(x: f64, k: f64, u: Complex64, d: f64) -> Complex64 {
    debug_assert!(x > 0.0 && x < d);
    ConjugatedPair::new(k, u, d).residual(x)
}

/// Chebyshev–Gauss points mapped into `(0, d)`.
pub fn chebyshev_points(d: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let theta = std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
            0.5 * d * (1.0 - theta.cos())
        })
        .collect()
}

/// Largest interior residual over [`INTERIOR_POINTS`] Chebyshev points.
pub fn max_interior_residual(k: f64, u: Complex64, d: f64) -> f64 {
    let pair = ConjugatedPair::new(k, u, d);
    chebyshev_points(d, INTERIOR_POINTS)
        .into_iter()
        .map(|x| pair.residual(x).norm())
        .fold(0.0, f64::max)
}

/// Result of comparing amplitudes at `u*` with conjugated amplitudes at `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugateRelations {
    /// `|k′(u*) − k′(u)*|`
    pub k_prime_gap: f64,
    /// `|r(u*) − r(u)*|`
    pub interface_gap: f64,
    /// `|R(k,u*) − R(k,u)*|`
    pub reflection_gap: f64,
    /// `|T(k,u*) − T(k,u)*|`
    pub transmission_gap: f64,
}

impl ConjugateRelations {
    pub fn local_relations_hold(&self, tol: f64) -> bool {
        self.k_prime_gap <= tol && self.interface_gap <= tol
    }
}

/// The barrier thickness enters only the `R`/`T` gaps.
pub fn conjugate_relations_check(k: f64, u: Complex64, d: f64) -> ConjugateRelations {
    let pair = ConjugatedPair::new(k, u, d);
    ConjugateRelations {
        k_prime_gap: (k_prime(k, u.conj(), ZERO) - k_prime(k, u, ZERO).conj()).norm(),
        interface_gap: (interface_r(k, u.conj(), ZERO) - interface_r(k, u, ZERO).conj()).norm(),
        reflection_gap: (pair.conjugate.r - pair.direct.r.conj()).norm(),
        transmission_gap: (pair.conjugate.t - pair.direct.t.conj()).norm(),
    }
}
