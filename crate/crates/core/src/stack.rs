//! Multilayer composition.
//!
//! Two families of results live here:
//!
//! * the single-pass compositions `T₂T₁` and `R₁ + T₁R₂T₁`, which drop the
//!   multiple reflections between the two films, together with their
//!   algebraic split into identity, `σ·b₁`, `σ·b₂` and `iσ·[b₁×b₂]` parts;
//! * the exact solution of an arbitrary stack including all multiple
//!   reflections, either by 4×4 transfer matrices acting on `(ψ, ψ′)` or by
//!   star-product recombination of per-layer scattering matrices when the
//!   transfer matrices would overflow.
//!
//! Incidence is from the left (z < 0); the first layer in a [`MirrorStack`]
//! is the one the neutron enters first. Vacuum surrounds the stack.

use num_complex::Complex64;
use thiserror::Error;

use crate::layer::{k_prime, layer_amplitudes, layer_r, layer_t, layer_t_split, Layer};
use crate::spin::{sigma_dot, split_scalar_function, FieldVector, Spin, SpinMatrix};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Total evanescent attenuation `Σ|Im k′|·l` above which the transfer-matrix
/// product is abandoned for star-product recombination.
///
/// The transfer route loses roughly `e^{growth}` in relative accuracy of `R`, so
/// the switch happens well before anything overflows.
pub const TRANSFER_GROWTH_LIMIT: f64 = 8.0;

/// Boundary systems whose row-equilibrated condition estimate exceeds this are rejected.
pub const MAX_BOUNDARY_CONDITION: f64 = 1e13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StackError {
    #[error("mirror stack has no layers")]
    EmptyStack,
    #[error("boundary system is singular at k = {k} (condition estimate {condition:e})")]
    SingularBoundarySystem { k: f64, condition: f64 },
    #[error("layer {index} has an out-of-plane field component bz = {bz}")]
    FieldOutOfPlane { index: usize, bz: f64 },
    #[error("layer {index} has zero field; its direction is undefined")]
    ZeroField { index: usize },
}

/// Ordered layers between two vacuum half-spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorStack {
    layers: Vec<Layer>,
}

impl MirrorStack {
    pub fn new(layers: Vec<Layer>) -> Result<Self, StackError> {
        if layers.is_empty() {
            return Err(StackError::EmptyStack);
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(Layer::thickness).sum()
    }

    pub fn is_lossless(&self) -> bool {
        self.layers.iter().all(Layer::is_lossless)
    }

    /// The same stack seen by a neutron arriving from the right.
    pub fn reversed(&self) -> Self {
        let mut layers = self.layers.clone();
        layers.reverse();
        Self { layers }
    }
}

/// Reflection and transmission matrices of a stack at wave number `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringSolution {
    pub r: SpinMatrix,
    pub t: SpinMatrix,
    pub k: f64,
}

impl ScatteringSolution {
    /// Total outgoing probability for incident spin `inc`.
    pub fn outgoing_flux(&self, inc: Spin) -> f64 {
        Spin::BOTH
            .iter()
            .map(|&o| self.r.get(o, inc).norm_sqr() + self.t.get(o, inc).norm_sqr())
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.r.is_finite() && self.t.is_finite()
    }

    pub fn reflection_probabilities(&self) -> SpinProbabilities {
        spin_probabilities(&self.r)
    }

    pub fn transmission_probabilities(&self) -> SpinProbabilities {
        spin_probabilities(&self.t)
    }
}

/// `P(out, in) = |⟨out|M|in⟩|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinProbabilities {
    pub p: [[f64; 2]; 2],
}

impl SpinProbabilities {
    pub fn get(&self, out: Spin, inc: Spin) -> f64 {
        self.p[out.index()][inc.index()]
    }

    pub fn pp(&self) -> f64 {
        self.p[0][0]
    }
    /// out +, in −
    pub fn pm(&self) -> f64 {
        self.p[0][1]
    }
    /// out −, in +
    pub fn mp(&self) -> f64 {
        self.p[1][0]
    }
    pub fn mm(&self) -> f64 {
        self.p[1][1]
    }

    /// Column sum: total probability out of incident spin `inc`.
    pub fn from_incident(&self, inc: Spin) -> f64 {
        self.p[0][inc.index()] + self.p[1][inc.index()]
    }
}

pub fn spin_probabilities(m: &SpinMatrix) -> SpinProbabilities {
    let mut p = [[0.0; 2]; 2];
    for out in Spin::BOTH {
        for inc in Spin::BOTH {
            p[out.index()][inc.index()] = m.get(out, inc).norm_sqr();
        }
    }
    SpinProbabilities { p }
}

/// `T₂(σ·B₂)·T₁(σ·B₁)`, neglecting reflections between the films.
pub fn two_layer_t_approx(k: f64, first: &Layer, second: &Layer) -> SpinMatrix {
    layer_t(k, second) * layer_t(k, first)
}

/// `R₁ + T₁R₂T₁`, neglecting reflections between the films.
pub fn two_layer_r_approx(k: f64, first: &Layer, second: &Layer) -> SpinMatrix {
    let t1 = layer_t(k, first);
    layer_r(k, first) + t1 * layer_r(k, second) * t1
}

/// Single-pass two-layer solution.
pub fn two_layer_approx(k: f64, first: &Layer, second: &Layer) -> ScatteringSolution {
    ScatteringSolution {
        r: two_layer_r_approx(k, first, second),
        t: two_layer_t_approx(k, first, second),
        k,
    }
}

/// Expansion of `T₂T₁` for in-plane fields:
/// `scalar·I + c_b1·σ·b₁ + c_b2·σ·b₂ + c_cross·i·σ·[b₁×b₂]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositionSplit {
    /// `T₁⁺T₂⁺ + T₁⁻T₂⁻ cos φ`
    pub scalar: Complex64,
    /// `T₁⁻T₂⁺`
    pub c_b1: Complex64,
    /// `T₂⁻T₁⁺`
    pub c_b2: Complex64,
    /// Coefficient of `i·σ·[b₁×b₂]`. With `T₂` acting after `T₁` this is `−T₁⁻T₂⁻`.
    pub c_cross: Complex64,
    pub b1: FieldVector,
    pub b2: FieldVector,
}

impl CompositionSplit {
    /// Angle from `b₁` to `b₂`, counterclockwise about +z.
    pub fn phi(&self) -> f64 {
        let cross = self.b1.cross(&self.b2).bz;
        cross.atan2(self.b1.dot(&self.b2))
    }

    pub fn to_matrix(&self) -> SpinMatrix {
        let cross = sigma_dot(&self.b1.cross(&self.b2));
        SpinMatrix::scalar(self.scalar)
            + sigma_dot(&self.b1).scale(self.c_b1)
            + sigma_dot(&self.b2).scale(self.c_b2)
            + cross.scale(I * self.c_cross)
    }

    /// Diagonal coefficient of `σ_z`, divided by `i`: the cross term with `sin φ` absorbed.
    /// Diagonal elements are `scalar ± i·effective_cross()`.
    pub fn effective_cross(&self) -> Complex64 {
        self.c_cross * self.b1.cross(&self.b2).bz
    }

    /// `|A|² + |E|² ± 2 Im(A E*)` for incident spin `±`, with `A = scalar`, `E = effective_cross()`.
    pub fn non_flip_probability(&self, spin: Spin) -> f64 {
        let a = self.scalar;
        let e = self.effective_cross();
        a.norm_sqr() + e.norm_sqr() + spin.sign() * 2.0 * (a * e.conj()).im
    }

    /// `T(++) − T(−−) = 4 Im(A E*)`.
    pub fn t_odd_asymmetry(&self) -> f64 {
        4.0 * (self.scalar * self.effective_cross().conj()).im
    }
}

fn in_plane_direction(layer: &Layer, index: usize) -> Result<FieldVector, StackError> {
    let b = layer.field();
    if b.bz != 0.0 {
        return Err(StackError::FieldOutOfPlane { index, bz: b.bz });
    }
    b.direction().ok_or(StackError::ZeroField { index })
}

/// Split of `T₂T₁` for two in-plane magnetised films.
pub fn composition_split(k: f64, first: &Layer, second: &Layer) -> Result<CompositionSplit, StackError> {
    let b1 = in_plane_direction(first, 0)?;
    let b2 = in_plane_direction(second, 1)?;
    let s1 = layer_t_split(k, first);
    let s2 = layer_t_split(k, second);
    let (p1, m1, p2, m2) = (s1.f_plus, s1.f_minus, s2.f_plus, s2.f_minus);
    Ok(CompositionSplit {
        scalar: p1 * p2 + m1 * m2 * b1.dot(&b2),
        c_b1: m1 * p2,
        c_b2: m2 * p1,
        c_cross: -(m1 * m2),
        b1,
        b2,
    })
}

/// 4×4 transfer matrix on `(ψ, ψ′)` written as 2×2 spin blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub a: SpinMatrix,
    pub b: SpinMatrix,
    pub c: SpinMatrix,
    pub d: SpinMatrix,
}

impl TransferMatrix {
    pub const IDENTITY: TransferMatrix = TransferMatrix {
        a: SpinMatrix::IDENTITY,
        b: SpinMatrix::ZERO,
        c: SpinMatrix::ZERO,
        d: SpinMatrix::IDENTITY,
    };

    /// `self` applied after `first`.
    pub fn after(&self, first: &TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            a: self.a * first.a + self.b * first.c,
            b: self.a * first.b + self.b * first.d,
            c: self.c * first.a + self.d * first.c,
            d: self.c * first.b + self.d * first.d,
        }
    }
}

fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// Exact propagator across a uniform layer: `[[cos Kl, K⁻¹ sin Kl], [−K sin Kl, cos Kl]]`
/// with `K² = k² − u − σ·B`. A negative `length` propagates backwards.
pub fn layer_transfer_matrix(k: f64, layer: &Layer, length: f64) -> TransferMatrix {
    let l = length;
    let u = layer.potential();
    let field = layer.field();
    let kp = |s: f64| k_prime(k, u, Complex64::new(s, 0.0));
    let cos = split_scalar_function(|s| (kp(s) * l).cos(), &field).to_matrix();
    let sin_over = split_scalar_function(|s| sinc(kp(s) * l) * l, &field).to_matrix();
    let k_sin = split_scalar_function(|s| -kp(s) * (kp(s) * l).sin(), &field).to_matrix();
    TransferMatrix { a: cos, b: sin_over, c: k_sin, d: cos }
}

/// Evanescent growth `Σ max|Im k′|·l` of a stack at `k`.
pub fn evanescent_growth(k: f64, stack: &MirrorStack) -> f64 {
    stack
        .layers()
        .iter()
        .map(|layer| {
            let b = layer.field().magnitude();
            let g = [b, -b]
                .iter()
                .map(|&s| k_prime(k, layer.potential(), Complex64::new(s, 0.0)).im.abs())
                .fold(0.0, f64::max);
            g * layer.thickness()
        })
        .sum()
}

/// Vacuum-referenced scattering matrix of a slab or a group of slabs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringBlock {
    /// Reflection for incidence from the left.
    pub r_left: SpinMatrix,
    /// Left to right transmission.
    pub t_forward: SpinMatrix,
    /// Reflection for incidence from the right.
    pub r_right: SpinMatrix,
    /// Right to left transmission.
    pub t_backward: SpinMatrix,
}

impl ScatteringBlock {
    pub fn of_layer(k: f64, layer: &Layer) -> Self {
        let a = layer_amplitudes(k, layer);
        Self { r_left: a.r, t_forward: a.t, r_right: a.r, t_backward: a.t }
    }

    /// Redheffer star product: `self` on the left, `next` on the right.
    pub fn star(&self, next: &ScatteringBlock, k: f64) -> Result<ScatteringBlock, StackError> {
        let eye = SpinMatrix::IDENTITY;
        let fwd_loop = eye - self.r_right * next.r_left;
        let bwd_loop = eye - next.r_left * self.r_right;
        let fwd = invert_checked(&fwd_loop, k)?;
        let bwd = invert_checked(&bwd_loop, k)?;
        Ok(ScatteringBlock {
            r_left: self.r_left + self.t_backward * next.r_left * fwd * self.t_forward,
            t_forward: next.t_forward * fwd * self.t_forward,
            r_right: next.r_right + next.t_forward * self.r_right * bwd * next.t_backward,
            t_backward: self.t_backward * bwd * next.t_backward,
        })
    }
}

/// `‖row₁‖·‖row₂‖ / |det|`: insensitive to the row scaling that evanescent growth produces.
fn equilibrated_condition(m: &SpinMatrix) -> f64 {
    let row = |i: usize| (m.m[i][0].norm_sqr() + m.m[i][1].norm_sqr()).sqrt();
    let det = m.det().norm();
    if det > 0.0 {
        row(0) * row(1) / det
    } else {
        f64::INFINITY
    }
}

fn invert_checked(m: &SpinMatrix, k: f64) -> Result<SpinMatrix, StackError> {
    let condition = equilibrated_condition(m);
    if condition.is_nan() || condition > MAX_BOUNDARY_CONDITION {
        return Err(StackError::SingularBoundarySystem { k, condition });
    }
    m.inverse().ok_or(StackError::SingularBoundarySystem { k, condition })
}

/// Exact solution by the transfer-matrix product and vacuum boundary matching.
pub fn solve_transfer(k: f64, stack: &MirrorStack) -> Result<ScatteringSolution, StackError> {
    let backward = stack.layers().iter().rev().fold(TransferMatrix::IDENTITY, |acc, layer| {
        layer_transfer_matrix(k, layer, -layer.thickness()).after(&acc)
    });
    backward_to_scattering(k, &backward)
}

/// `(R, T)` from the propagator `N` taking `(ψ, ψ′)` at the exit face back to the entry face.
///
/// With `ψ(d) = T`, `ψ′(d) = ikT` and `ψ(0) = I + R`, `ψ′(0) = ik(I − R)`:
/// `T = 2ik·[ik(A + ikB) + C + ikD]⁻¹` and `R = (A + ikB)T − I`.
/// `T` comes out as the inverse of a growing quantity, so opaque layers keep relative accuracy.
pub fn backward_to_scattering(k: f64, n: &TransferMatrix) -> Result<ScatteringSolution, StackError> {
    let ik = Complex64::new(0.0, k);
    let left_value = n.a + n.b.scale(ik);
    let system = left_value.scale(ik) + n.c + n.d.scale(ik);
    let t = invert_checked(&system, k)?.scale(2.0 * ik);
    let r = left_value * t - SpinMatrix::IDENTITY;
    Ok(ScatteringSolution { r, t, k })
}

/// Exact solution by star-product recombination of per-layer scattering blocks.
pub fn solve_star(k: f64, stack: &MirrorStack) -> Result<ScatteringSolution, StackError> {
    let mut layers = stack.layers().iter();
    let first = layers.next().ok_or(StackError::EmptyStack)?;
    let total = layers.try_fold(ScatteringBlock::of_layer(k, first), |acc, layer| {
        acc.star(&ScatteringBlock::of_layer(k, layer), k)
    })?;
    Ok(ScatteringSolution { r: total.r_left, t: total.t_forward, k })
}

/// Exact `(R, T)` of a stack, all multiple reflections included.
pub fn exact_stack_solve(k: f64, stack: &MirrorStack) -> Result<ScatteringSolution, StackError> {
    if evanescent_growth(k, stack) > TRANSFER_GROWTH_LIMIT {
        solve_star(k, stack)
    } else {
        solve_transfer(k, stack)
    }
}
