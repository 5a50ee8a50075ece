//! Mirror with helicoidal in-plane magnetisation.
//!
//! The field inside the slab is `B(z) = B·(cos θ, sin θ, 0)` with `θ = qz + θ₀`.
//! Two independent solvers are provided:
//!
//! * [`helix_solve_analytic`] removes the rotation with `ψ = U(z)χ`,
//!   `U = exp(−iθσ_z/2)`. In that frame the field is fixed along x and `χ`
//!   obeys the constant-coefficient system
//!   `χ″ − iqσ_zχ′ + (k² − u − q²/4 − Bσ_x)χ = 0`, whose plane-wave modes
//!   `e^{iλz}` satisfy `λ² = k² − u + q²/4 ± √(q²(k² − u) + B²)`.
//! * [`helix_solve_sliced`] freezes the field at the midpoint of `n` equal
//!   slices and hands the resulting stack to [`exact_stack_solve`].

use nalgebra::{Matrix4, SMatrix};
use num_complex::Complex64;
use thiserror::Error;

use crate::layer::{upper_sqrt, Layer, LayerError};
use crate::spin::{FieldVector, Spin, SpinMatrix};
use crate::stack::{exact_stack_solve, MirrorStack, ScatteringSolution, StackError};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative eigenvalue separation below which mode matching is refused.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Slice count used when the analytic solver falls back.
pub const FALLBACK_SLICES: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HelixError {
    #[error("invalid helix: {0}")]
    Invalid(String),
    #[error("interior modes are degenerate at k = {k} (relative separation {separation:e})")]
    DegenerateModes { k: f64, separation: f64 },
    #[error("mode-matching system is singular at k = {k}")]
    SingularBoundarySystem { k: f64 },
    #[error(transparent)]
    Stack(#[from] StackError),
}

impl From<LayerError> for HelixError {
    fn from(e: LayerError) -> Self {
        HelixError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelixMirror {
    field: f64,
    pitch: f64,
    thickness: f64,
    potential: Complex64,
    phase0: f64,
}

impl HelixMirror {
    /// `field` ≥ 0 (1/nm²), `pitch` q (1/nm, sign = handedness), `thickness` (nm),
    /// `potential` with `Im ≤ 0`, `phase0` field angle at the entry face.
    pub fn new(field: f64, pitch: f64, thickness: f64, potential: Complex64, phase0: f64) -> Result<Self, HelixError> {
        if !(field >= 0.0 && field.is_finite()) {
            return Err(HelixError::Invalid(format!("field magnitude {field} must be ≥ 0")));
        }
        if !pitch.is_finite() || !phase0.is_finite() {
            return Err(HelixError::Invalid("non-finite pitch or phase".into()));
        }
        // reuse the slab checks on thickness and potential
        Layer::new(thickness, potential, FieldVector::ZERO)?;
        Ok(Self { field, pitch, thickness, potential, phase0 })
    }

    pub fn field(&self) -> f64 {
        self.field
    }
    pub fn pitch(&self) -> f64 {
        self.pitch
    }
    pub fn thickness(&self) -> f64 {
        self.thickness
    }
    pub fn potential(&self) -> Complex64 {
        self.potential
    }
    pub fn phase0(&self) -> f64 {
        self.phase0
    }

    pub fn is_lossless(&self) -> bool {
        self.potential.im == 0.0
    }

    pub fn with_pitch(&self, pitch: f64) -> Self {
        Self { pitch, ..*self }
    }

    pub fn with_phase0(&self, phase0: f64) -> Self {
        Self { phase0, ..*self }
    }

    pub fn field_angle(&self, z: f64) -> f64 {
        self.pitch * z + self.phase0
    }

    pub fn field_at(&self, z: f64) -> FieldVector {
        FieldVector::in_plane(self.field, self.field_angle(z))
    }

    /// The mirror as seen from the right: `z → d − z` reverses the rotation.
    pub fn reversed(&self) -> Self {
        Self {
            pitch: -self.pitch,
            phase0: self.field_angle(self.thickness),
            ..*self
        }
    }

    /// Piecewise-constant approximation with the field frozen at slice midpoints.
    pub fn sliced(&self, n_slices: usize) -> Result<MirrorStack, HelixError> {
        if n_slices == 0 {
            return Err(HelixError::Invalid("need at least one slice".into()));
        }
        let h = self.thickness / n_slices as f64;
        let layers = (0..n_slices)
            .map(|i| Layer::new(h, self.potential, self.field_at((i as f64 + 0.5) * h)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MirrorStack::new(layers)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HelixMethod {
    Analytic,
    Sliced(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelixSolution {
    pub r: SpinMatrix,
    pub t: SpinMatrix,
    pub k: f64,
    pub method: HelixMethod,
}

impl HelixSolution {
    pub fn scattering(&self) -> ScatteringSolution {
        ScatteringSolution { r: self.r, t: self.t, k: self.k }
    }

    /// Relative distance `‖(R,T) − (R′,T′)‖ / ‖(R′,T′)‖` in the Frobenius norm.
    pub fn relative_distance(&self, reference: &HelixSolution) -> f64 {
        let num = ((self.r - reference.r).norm().powi(2) + (self.t - reference.t).norm().powi(2)).sqrt();
        let den = (reference.r.norm().powi(2) + reference.t.norm().powi(2)).sqrt();
        num / den
    }
}

pub fn helix_solve_sliced(k: f64, mirror: &HelixMirror, n_slices: usize) -> Result<HelixSolution, HelixError> {
    let stack = mirror.sliced(n_slices)?;
    let sol = exact_stack_solve(k, &stack)?;
    Ok(HelixSolution { r: sol.r, t: sol.t, k, method: HelixMethod::Sliced(n_slices) })
}

/// One interior plane-wave mode of the rotating-frame system.
#[derive(Debug, Clone, Copy)]
struct Mode {
    lambda: Complex64,
    /// Spinor amplitude in the rotating frame.
    spinor: [Complex64; 2],
    /// Point where the mode has unit modulus; keeps growing exponentials bounded.
    anchor: f64,
}

fn interior_modes(k: f64, mirror: &HelixMirror) -> Result<[Mode; 4], HelixError> {
    let q = mirror.pitch;
    let b = mirror.field;
    let w = Complex64::new(k * k, 0.0) - mirror.potential;
    let quarter = q * q / 4.0;
    let disc = (w * q * q + b * b).sqrt();
    let centre = w + quarter;
    let squares = [centre + disc, centre - disc];

    let mut lambdas = [Complex64::new(0.0, 0.0); 4];
    for (i, s) in squares.iter().enumerate() {
        // Im λ ≥ 0 root of λ² = s, same branch rule as k′
        let lam = upper_sqrt(*s);
        lambdas[2 * i] = lam;
        lambdas[2 * i + 1] = -lam;
    }

    let scale = (w.norm() + q * q + b).sqrt().max(k);
    let mut separation = f64::INFINITY;
    for i in 0..4 {
        for j in (i + 1)..4 {
            separation = separation.min((lambdas[i] - lambdas[j]).norm() / scale);
        }
    }
    if separation < DEGENERACY_TOLERANCE {
        return Err(HelixError::DegenerateModes { k, separation });
    }

    let q_shift = w - quarter;
    let d = mirror.thickness;
    let modes = lambdas.map(|lam| {
        let lam2 = lam * lam;
        let from_top = [Complex64::new(b, 0.0), q_shift + q * lam - lam2];
        let from_bottom = [q_shift - q * lam - lam2, Complex64::new(b, 0.0)];
        let n_top = from_top[0].norm_sqr() + from_top[1].norm_sqr();
        let n_bottom = from_bottom[0].norm_sqr() + from_bottom[1].norm_sqr();
        let (v, n) = if n_top >= n_bottom { (from_top, n_top) } else { (from_bottom, n_bottom) };
        let inv = 1.0 / n.sqrt();
        Mode {
            lambda: lam,
            spinor: [v[0] * inv, v[1] * inv],
            anchor: if lam.im >= 0.0 { 0.0 } else { d },
        }
    });
    Ok(modes)
}

/// `U(z) = diag(e^{−iθ/2}, e^{iθ/2})`.
fn frame_rotation(mirror: &HelixMirror, z: f64) -> [Complex64; 2] {
    let half = 0.5 * mirror.field_angle(z);
    [Complex64::from_polar(1.0, -half), Complex64::from_polar(1.0, half)]
}

/// Exact `(R, T)` by mode matching in the co-rotating frame.
pub fn helix_solve_analytic(k: f64, mirror: &HelixMirror) -> Result<HelixSolution, HelixError> {
    let modes = interior_modes(k, mirror)?;
    let q = mirror.pitch;
    let d = mirror.thickness;
    let ik = Complex64::new(0.0, k);

    // χ′ − i(q/2)σ_z χ for a mode, per unit amplitude
    let slope = |m: &Mode, comp: usize| {
        let sz = if comp == 0 { 1.0 } else { -1.0 };
        I * (m.lambda - 0.5 * q * sz) * m.spinor[comp]
    };
    let phase = |m: &Mode, z: f64| (I * m.lambda * (z - m.anchor)).exp();

    // rows 0,1: left face, (ik + ∂)ψ = 2ik·e ; rows 2,3: right face, (ik − ∂)ψ = 0
    let mut system = Matrix4::<Complex64>::zeros();
    for (j, m) in modes.iter().enumerate() {
        let (e0, ed) = (phase(m, 0.0), phase(m, d));
        for comp in 0..2 {
            system[(comp, j)] = (ik * m.spinor[comp] + slope(m, comp)) * e0;
            system[(2 + comp, j)] = (ik * m.spinor[comp] - slope(m, comp)) * ed;
        }
    }

    let u0 = frame_rotation(mirror, 0.0);
    let ud = frame_rotation(mirror, d);
    let mut rhs = SMatrix::<Complex64, 4, 2>::zeros();
    for inc in Spin::BOTH {
        let col = inc.index();
        // U(0)† e
        rhs[(col, col)] = 2.0 * ik * u0[col].conj();
    }

    let lu = system.lu();
    let amps = lu.solve(&rhs).ok_or(HelixError::SingularBoundarySystem { k })?;
    if amps.iter().any(|z| !z.is_finite()) {
        return Err(HelixError::SingularBoundarySystem { k });
    }

    let mut r = SpinMatrix::ZERO;
    let mut t = SpinMatrix::ZERO;
    for inc in Spin::BOTH {
        let col = inc.index();
        for comp in 0..2 {
            let mut at0 = Complex64::new(0.0, 0.0);
            let mut atd = Complex64::new(0.0, 0.0);
            for (j, m) in modes.iter().enumerate() {
                at0 += amps[(j, col)] * m.spinor[comp] * phase(m, 0.0);
                atd += amps[(j, col)] * m.spinor[comp] * phase(m, d);
            }
            let incident = if comp == col { 1.0 } else { 0.0 };
            r.m[comp][col] = u0[comp] * at0 - incident;
            t.m[comp][col] = ud[comp] * atd;
        }
    }
    Ok(HelixSolution { r, t, k, method: HelixMethod::Analytic })
}

/// Analytic solution, or the sliced one with [`FALLBACK_SLICES`] when the modes are degenerate.
pub fn helix_solve(k: f64, mirror: &HelixMirror) -> Result<HelixSolution, HelixError> {
    match helix_solve_analytic(k, mirror) {
        Err(HelixError::DegenerateModes { .. }) | Err(HelixError::SingularBoundarySystem { .. }) => {
            helix_solve_sliced(k, mirror, FALLBACK_SLICES)
        }
        other => other,
    }
}

/// Lowest wave number above which neither spin state is totally reflected by
/// the unrotated field: `k² = u′ + B`.
pub fn total_reflection_edge(mirror: &HelixMirror) -> f64 {
    (mirror.potential.re + mirror.field).max(0.0).sqrt()
}

/// Best spin-flip reflection for incident `|−⟩` found on a k-grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipPeak {
    pub k: f64,
    /// `R(+−)`: incident −, reflected +.
    pub flip_from_down: f64,
    /// `R(−+)` at the same k.
    pub flip_from_up: f64,
}

/// Scans `ks` for the largest `R(+−)` above the total-reflection edge.
pub fn find_flip_peak(mirror: &HelixMirror, ks: &[f64]) -> Result<Option<FlipPeak>, HelixError> {
    let edge = total_reflection_edge(mirror);
    let mut best: Option<FlipPeak> = None;
    for &k in ks.iter().filter(|&&k| k > edge) {
        let p = helix_solve(k, mirror)?.scattering().reflection_probabilities();
        let cand = FlipPeak { k, flip_from_down: p.pm(), flip_from_up: p.mp() };
        if best.is_none_or(|b| cand.flip_from_down > b.flip_from_down) {
            best = Some(cand);
        }
    }
    Ok(best)
}
