//! Fixtures shared by the criterion benchmarks in `benches/`.

use std::f64::consts::FRAC_PI_2;

use polref::{Complex64, FieldVector, HelixMirror, Layer, MirrorChannelTable, MirrorStack};

pub fn k_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

pub fn film(phi: f64) -> Layer {
    Layer::new(25.0, Complex64::new(0.01, 0.0), FieldVector::in_plane(0.006, phi)).unwrap()
}

pub fn crossed_films() -> (Layer, Layer) {
    (film(0.0), film(FRAC_PI_2))
}

/// `n` films with the field turning by 0.3 rad from one to the next, light absorption.
pub fn twisted_stack(n: usize) -> MirrorStack {
    let layers = (0..n)
        .map(|i| Layer::new(10.0, Complex64::new(0.01, -1e-5), FieldVector::in_plane(0.006, 0.3 * i as f64)).unwrap())
        .collect();
    MirrorStack::new(layers).unwrap()
}

pub fn helix() -> HelixMirror {
    HelixMirror::new(0.006, 0.4, 400.0, Complex64::new(0.01, 0.0), 0.0).unwrap()
}

/// Channel table of a helix near its spin-flip peak.
pub fn helix_table() -> MirrorChannelTable {
    let (m, k) = (helix(), 0.2132);
    let left = polref::helix_solve(k, &m).unwrap().scattering();
    let right = polref::helix_solve(k, &m.reversed()).unwrap().scattering();
    MirrorChannelTable::from_solutions(&left, &right).unwrap()
}
