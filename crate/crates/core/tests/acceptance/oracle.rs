//! Reference amplitudes for a uniform complex barrier by direct integration of
//! `ψ'' = (u − k²)ψ`, independent of the closed-form solver.
//!
//! The transmitted wave `e^{ik(x−d)}` fixes `ψ(d) = 1`, `ψ'(d) = ik`; classical
//! RK4 carries the pair back to `x = 0`, where it is split into incident and
//! reflected waves. Integrating against the direction of growth keeps the
//! evanescent case well conditioned.

use polref::Complex64;

pub struct Amplitudes {
    pub r: Complex64,
    pub t: Complex64,
}

pub fn barrier_by_rk4(k: f64, u: Complex64, d: f64, steps: usize) -> Amplitudes {
    let i = Complex64::new(0.0, 1.0);
    let kappa2 = u - k * k;
    let rhs = |y: [Complex64; 2]| [y[1], kappa2 * y[0]];

    let h = -d / steps as f64;
    let mut y = [Complex64::new(1.0, 0.0), i * k];
    for _ in 0..steps {
        let k1 = rhs(y);
        let k2 = rhs([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs([y[0] + h * k3[0], y[1] + h * k3[1]]);
        for j in 0..2 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }

    // ψ(0) = a + b, ψ'(0) = ik(a − b)
    let derivative = y[1] / (i * k);
    let a = 0.5 * (y[0] + derivative);
    let b = 0.5 * (y[0] - derivative);
    Amplitudes { r: b / a, t: 1.0 / a }
}
