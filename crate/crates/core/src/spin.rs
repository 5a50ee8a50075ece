//! Two-component spinor algebra in the σ_z eigenbasis.
//!
//! Everything in the crate that acts on a neutron spin is a [`SpinMatrix`]:
//! reflection and transmission amplitudes, Pauli matrices and scalar functions
//! of the operator `σ·B`. Row index is the outgoing spin, column index the
//! incoming one, so `m.get(Spin::Down, Spin::Up)` is the amplitude `⟨−|M|+⟩`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Tolerance on `|b| = 1` for vectors that must be unit directions.
pub const UNIT_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinError {
    #[error("direction vector has norm {norm}, expected a unit vector")]
    ZeroDirection { norm: f64 },
}

/// Eigenstates of σ_z: `σ_z|±⟩ = ±|±⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    #[inline]
    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    /// Eigenvalue of σ_z.
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Spin::Up => 'p',
            Spin::Down => 'm',
        }
    }
}

/// Real 3-vector. Used both for fields (pre-scaled to 1/nm²) and for unit directions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldVector {
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
}

impl FieldVector {
    pub const ZERO: FieldVector = FieldVector { bx: 0.0, by: 0.0, bz: 0.0 };

    pub const fn new(bx: f64, by: f64, bz: f64) -> Self {
        Self { bx, by, bz }
    }

    /// In-plane vector of the given magnitude at angle `phi` from +x, counterclockwise about +z.
    pub fn in_plane(magnitude: f64, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self::new(magnitude * c, magnitude * s, 0.0)
    }

    pub fn magnitude(&self) -> f64 {
        self.bx.hypot(self.by).hypot(self.bz)
    }

    /// `B/|B|`, or `None` for the zero vector.
    pub fn direction(&self) -> Option<FieldVector> {
        let m = self.magnitude();
        if m > 0.0 && m.is_finite() {
            Some(self.scale(1.0 / m))
        } else {
            None
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.bx * s, self.by * s, self.bz * s)
    }

    pub fn dot(&self, other: &FieldVector) -> f64 {
        self.bx * other.bx + self.by * other.by + self.bz * other.bz
    }

    pub fn cross(&self, other: &FieldVector) -> FieldVector {
        FieldVector::new(
            self.by * other.bz - self.bz * other.by,
            self.bz * other.bx - self.bx * other.bz,
            self.bx * other.by - self.by * other.bx,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.bx.is_finite() && self.by.is_finite() && self.bz.is_finite()
    }

    fn require_unit(&self) -> Result<(), SpinError> {
        let norm = self.magnitude();
        if (norm - 1.0).abs() > UNIT_TOLERANCE || !norm.is_finite() {
            return Err(SpinError::ZeroDirection { norm });
        }
        Ok(())
    }
}

/// 2×2 complex matrix on spinors, row-major, σ_z eigenbasis.
#[derive(Clone, Copy, PartialEq)]
pub struct SpinMatrix {
    pub m: [[Complex64; 2]; 2],
}

impl fmt::Debug for SpinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]
        )
    }
}

impl SpinMatrix {
    pub const ZERO: SpinMatrix = SpinMatrix { m: [[ZERO, ZERO], [ZERO, ZERO]] };
    pub const IDENTITY: SpinMatrix = SpinMatrix { m: [[ONE, ZERO], [ZERO, ONE]] };

    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Self::new(a, ZERO, ZERO, d)
    }

    pub fn scalar(s: Complex64) -> Self {
        Self::diag(s, s)
    }

    pub fn sigma_x() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn sigma_y() -> Self {
        Self::new(ZERO, -I, I, ZERO)
    }

    pub fn sigma_z() -> Self {
        Self::new(ONE, ZERO, ZERO, -ONE)
    }

    /// Amplitude `⟨out|M|in⟩`.
    #[inline]
    pub fn get(&self, out: Spin, inc: Spin) -> Complex64 {
        self.m[out.index()][inc.index()]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn adjoint(&self) -> Self {
        Self::new(
            self.m[0][0].conj(),
            self.m[1][0].conj(),
            self.m[0][1].conj(),
            self.m[1][1].conj(),
        )
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::new(f(self.m[0][0]), f(self.m[0][1]), f(self.m[1][0]), f(self.m[1][1]))
    }

    /// Inverse, or `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == ZERO || !det.is_finite() {
            return None;
        }
        let inv = det.inv();
        Some(Self::new(
            self.m[1][1] * inv,
            -self.m[0][1] * inv,
            -self.m[1][0] * inv,
            self.m[0][0] * inv,
        ))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.m.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &SpinMatrix) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        worst
    }

    /// Frobenius condition number `‖A‖·‖A⁻¹‖`; infinite for singular matrices.
    pub fn condition(&self) -> f64 {
        match self.inverse() {
            Some(inv) => self.norm() * inv.norm(),
            None => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| z.is_finite())
    }

    /// Conjugation `σ_x M σ_x`: swaps both spin labels.
    pub fn spin_swapped(&self) -> Self {
        Self::new(self.m[1][1], self.m[1][0], self.m[0][1], self.m[0][0])
    }
}

impl Add for SpinMatrix {
    type Output = SpinMatrix;
    fn add(self, rhs: SpinMatrix) -> SpinMatrix {
        let mut out = self;
        out += rhs;
        out
    }
}

impl AddAssign for SpinMatrix {
    fn add_assign(&mut self, rhs: SpinMatrix) {
        for i in 0..2 {
            for j in 0..2 {
                self.m[i][j] += rhs.m[i][j];
            }
        }
    }
}

impl Sub for SpinMatrix {
    type Output = SpinMatrix;
    fn sub(self, rhs: SpinMatrix) -> SpinMatrix {
        self + (-rhs)
    }
}

impl Neg for SpinMatrix {
    type Output = SpinMatrix;
    fn neg(self) -> SpinMatrix {
        self.map(|z| -z)
    }
}

impl Mul for SpinMatrix {
    type Output = SpinMatrix;
    fn mul(self, rhs: SpinMatrix) -> SpinMatrix {
        let a = &self.m;
        let b = &rhs.m;
        SpinMatrix::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<Complex64> for SpinMatrix {
    type Output = SpinMatrix;
    fn mul(self, rhs: Complex64) -> SpinMatrix {
        self.scale(rhs)
    }
}

impl Mul<SpinMatrix> for Complex64 {
    type Output = SpinMatrix;
    fn mul(self, rhs: SpinMatrix) -> SpinMatrix {
        rhs.scale(self)
    }
}

impl Mul<f64> for SpinMatrix {
    type Output = SpinMatrix;
    fn mul(self, rhs: f64) -> SpinMatrix {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

/// Spinor (column vector) in the σ_z basis.
pub type Spinor = [Complex64; 2];

impl Mul<Spinor> for SpinMatrix {
    type Output = Spinor;
    fn mul(self, v: Spinor) -> Spinor {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }
}

/// `σ·v` for any real vector, no normalisation check.
pub(crate) fn sigma_dot(v: &FieldVector) -> SpinMatrix {
    SpinMatrix::new(
        Complex64::new(v.bz, 0.0),
        Complex64::new(v.bx, -v.by),
        Complex64::new(v.bx, v.by),
        Complex64::new(-v.bz, 0.0),
    )
}

/// `σ·b` for a unit vector `b`.
pub fn pauli_dot(b: &FieldVector) -> Result<SpinMatrix, SpinError> {
    b.require_unit()?;
    Ok(sigma_dot(b))
}

/// `σ·[b1×b2]` for unit vectors `b1`, `b2`.
pub fn cross_term(b1: &FieldVector, b2: &FieldVector) -> Result<SpinMatrix, SpinError> {
    b1.require_unit()?;
    b2.require_unit()?;
    Ok(sigma_dot(&b1.cross(b2)))
}

/// Even/odd decomposition `f(σ·B) = f⁺·I + f⁻·(σ·b)`,
/// with `f^(±) = (f(B) ± f(−B))/2` evaluated on the eigenvalues `±|B|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarSplit {
    pub f_plus: Complex64,
    pub f_minus: Complex64,
    /// Unit direction of `B`; `None` when `B = 0` (then `f_minus = 0`).
    pub direction: Option<FieldVector>,
}

impl ScalarSplit {
    pub fn to_matrix(&self) -> SpinMatrix {
        let mut out = SpinMatrix::scalar(self.f_plus);
        if let Some(b) = self.direction {
            out += sigma_dot(&b).scale(self.f_minus);
        }
        out
    }

    /// Value of `f` on the eigenvalue `+|B|` (or at 0 for a zero field).
    pub fn at_plus(&self) -> Complex64 {
        self.f_plus + self.f_minus
    }

    pub fn at_minus(&self) -> Complex64 {
        self.f_plus - self.f_minus
    }
}

/// Fallible form of [`split_scalar_function`]; the first error from `f` is returned.
pub fn try_split_scalar_function<E>(
    mut f: impl FnMut(f64) -> Result<Complex64, E>,
    field: &FieldVector,
) -> Result<ScalarSplit, E> {
    match field.direction() {
        None => Ok(ScalarSplit { f_plus: f(0.0)?, f_minus: ZERO, direction: None }),
        Some(b) => {
            let mag = field.magnitude();
            let up = f(mag)?;
            let down = f(-mag)?;
            Ok(ScalarSplit {
                f_plus: (up + down) * 0.5,
                f_minus: (up - down) * 0.5,
                direction: Some(b),
            })
        }
    }
}

pub fn split_scalar_function(
    mut f: impl FnMut(f64) -> Complex64,
    field: &FieldVector,
) -> ScalarSplit {
    match try_split_scalar_function(|x| Ok::<_, std::convert::Infallible>(f(x)), field) {
        Ok(split) => split,
        Err(never) => match never {},
    }
}

/// `f(σ·B)` for a scalar function `f` of the eigenvalue.
pub fn scalar_function_of(f: impl FnMut(f64) -> Complex64, field: &FieldVector) -> SpinMatrix {
    split_scalar_function(f, field).to_matrix()
}

pub fn try_scalar_function_of<E>(
    f: impl FnMut(f64) -> Result<Complex64, E>,
    field: &FieldVector,
) -> Result<SpinMatrix, E> {
    Ok(try_split_scalar_function(f, field)?.to_matrix())
}
