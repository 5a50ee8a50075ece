//! Scan configuration: one JSON document per run.
//!
//! Units follow the core crate: nm, 1/nm, 1/nm², radians.

use std::path::{Path, PathBuf};

use polref::{Complex64, FieldVector, HelixMirror, Layer, MirrorStack};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    TwoLayer,
    Stack,
    Helix,
    Trcheck,
    Vessel,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LayerSpec {
    pub thickness: f64,
    pub u_re: f64,
    /// Absorption `u″ ≥ 0`; the potential is `u_re − i·u_abs`.
    #[serde(default)]
    pub u_abs: f64,
    #[serde(default)]
    pub bx: f64,
    #[serde(default)]
    pub by: f64,
    #[serde(default)]
    pub bz: f64,
}

impl LayerSpec {
    pub fn field(&self) -> FieldVector {
        FieldVector::new(self.bx, self.by, self.bz)
    }

    pub fn to_layer(&self) -> Result<Layer, CliError> {
        Layer::from_parts(self.thickness, self.u_re, self.u_abs, self.field()).map_err(|e| invalid(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HelixSpec {
    /// Field magnitude.
    pub b: f64,
    /// Pitch wave vector; its sign is the handedness.
    pub q: f64,
    pub d: f64,
    pub u_re: f64,
    #[serde(default)]
    pub u_abs: f64,
    #[serde(default)]
    pub phase0: f64,
    /// Solve by slicing instead of the rotating-frame modes.
    #[serde(default)]
    pub n_slices: Option<usize>,
}

impl HelixSpec {
    pub fn to_mirror(&self) -> Result<HelixMirror, CliError> {
        HelixMirror::new(self.b, self.q, self.d, Complex64::new(self.u_re, -self.u_abs), self.phase0)
            .map_err(|e| invalid(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableSource {
    /// Helix from the `helix` section, at `k` or at the flip peak on the k-grid.
    Helix,
    /// The two layers with the second one turned by the first `phi`.
    TwoLayer,
    SpinBlind,
}

fn default_particles() -> usize {
    10_000
}
fn default_steps() -> usize {
    1000
}
fn default_transmission() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct VesselSpec {
    pub table: TableSource,
    #[serde(default)]
    pub k: Option<f64>,
    #[serde(default = "default_particles")]
    pub n_particles: usize,
    #[serde(default = "default_steps")]
    pub n_steps: usize,
    /// Transmission of the spin-blind mirror.
    #[serde(default = "default_transmission")]
    pub transmission: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TrcheckSpec {
    /// Extra barriers drawn from the seed, on top of the listed layers.
    #[serde(default)]
    pub random_cases: usize,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub mode: Mode,
    pub k_min: f64,
    pub k_max: f64,
    pub k_points: usize,
    #[serde(default)]
    pub layers: Vec<LayerSpec>,
    #[serde(default)]
    pub helix: Option<HelixSpec>,
    /// Angles of the second film's field relative to the first (two-layer mode).
    #[serde(default)]
    pub phi: Vec<f64>,
    /// Two-layer mode: use the first-order composition `T₂T₁`, `R₁ + T₁R₂T₁` instead of the exact solver.
    #[serde(default)]
    pub approximate: bool,
    #[serde(default)]
    pub vessel: Option<VesselSpec>,
    #[serde(default)]
    pub trcheck: TrcheckSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

impl ScanConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig { path: path.into(), source })?;
        Self::from_json(&text)
    }

    pub fn k_grid(&self) -> Vec<f64> {
        let n = self.k_points;
        (0..n).map(|i| self.k_min + (self.k_max - self.k_min) * i as f64 / (n - 1) as f64).collect()
    }

    pub fn stack(&self) -> Result<MirrorStack, CliError> {
        let layers = self.layers.iter().map(LayerSpec::to_layer).collect::<Result<Vec<_>, _>>()?;
        MirrorStack::new(layers).map_err(|e| invalid(e.to_string()))
    }

    /// Two-layer mirror with the second field turned to angle `phi` from the first.
    pub fn two_layer_pair(&self, phi: f64) -> Result<MirrorStack, CliError> {
        let first = self.layers[0].to_layer()?;
        let second = self.layers[1].to_layer()?;
        let base = self.layers[0].by.atan2(self.layers[0].bx);
        let turned = FieldVector::in_plane(second.field().magnitude(), base + phi);
        MirrorStack::new(vec![first, second.with_field(turned)]).map_err(|e| invalid(e.to_string()))
    }

    fn helix_spec(&self) -> Result<&HelixSpec, CliError> {
        self.helix.as_ref().ok_or_else(|| invalid("mode needs a `helix` section"))
    }

    pub fn helix_mirror(&self) -> Result<HelixMirror, CliError> {
        self.helix_spec()?.to_mirror()
    }

    fn require_layers(&self) -> Result<(), CliError> {
        if self.layers.is_empty() {
            return Err(invalid("layer list is empty"));
        }
        for (i, l) in self.layers.iter().enumerate() {
            l.to_layer().map_err(|e| invalid(format!("layer {i}: {e}")))?;
        }
        Ok(())
    }

    fn require_two_layers(&self) -> Result<(), CliError> {
        self.require_layers()?;
        if self.layers.len() != 2 {
            return Err(invalid(format!("two-layer mode needs exactly 2 layers, got {}", self.layers.len())));
        }
        if self.layers.iter().any(|l| l.bz != 0.0) {
            return Err(invalid("two-layer fields must lie in the film plane (bz = 0)"));
        }
        if self.phi.is_empty() {
            return Err(invalid("two-layer mode needs at least one angle in `phi`"));
        }
        if let Some(p) = self.phi.iter().find(|p| !p.is_finite()) {
            return Err(invalid(format!("phi = {p} is not finite")));
        }
        Ok(())
    }

    /// Checks everything the chosen mode will touch, before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.k_min > 0.0 && self.k_min.is_finite()) {
            return Err(invalid(format!("k_min must be positive, got {}", self.k_min)));
        }
        if !(self.k_max >= self.k_min && self.k_max.is_finite()) {
            return Err(invalid(format!("k_max must be finite and ≥ k_min, got {}", self.k_max)));
        }
        if self.k_points < 2 {
            return Err(invalid(format!("k_points must be at least 2, got {}", self.k_points)));
        }
        match self.mode {
            Mode::TwoLayer => self.require_two_layers()?,
            Mode::Stack => self.require_layers()?,
            Mode::Helix => {
                self.helix_mirror()?;
                if self.helix_spec()?.n_slices == Some(0) {
                    return Err(invalid("n_slices must be at least 1"));
                }
            }
            Mode::Trcheck => {
                if self.trcheck.random_cases == 0 {
                    self.require_layers()?;
                } else {
                    for (i, l) in self.layers.iter().enumerate() {
                        l.to_layer().map_err(|e| invalid(format!("layer {i}: {e}")))?;
                    }
                }
            }
            Mode::Vessel => {
                let v = self.vessel.as_ref().ok_or_else(|| invalid("vessel mode needs a `vessel` section"))?;
                if v.n_particles < 1000 || v.n_steps < 100 {
                    return Err(invalid("vessel needs n_particles ≥ 1000 and n_steps ≥ 100"));
                }
                if let Some(k) = v.k {
                    if !(k > 0.0 && k.is_finite()) {
                        return Err(invalid(format!("vessel k must be positive, got {k}")));
                    }
                }
                match v.table {
                    TableSource::Helix => {
                        self.helix_mirror()?;
                    }
                    TableSource::TwoLayer => self.require_two_layers()?,
                    TableSource::SpinBlind => {
                        if !(0.0..=1.0).contains(&v.transmission) {
                            return Err(invalid(format!("transmission must lie in [0, 1], got {}", v.transmission)));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_layer() -> ScanConfig {
        ScanConfig::from_json(
            r#"{"mode": "two-layer", "k_min": 0.05, "k_max": 0.3, "k_points": 8,
                "layers": [{"thickness": 25, "u_re": 0.01, "bx": 0.006},
                           {"thickness": 25, "u_re": 0.01, "bx": 0.006}],
                "phi": [1.5707963267948966]}"#,
        )
        .unwrap()
    }

    #[test]
    fn parses_and_defaults() {
        let cfg = two_layer();
        assert_eq!(cfg.mode, Mode::TwoLayer);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.output, PathBuf::from("out"));
        assert_eq!(cfg.layers[0].u_abs, 0.0);
        cfg.validate().unwrap();
        let ks = cfg.k_grid();
        assert_eq!(ks.len(), 8);
        assert_eq!((ks[0], ks[7]), (0.05, 0.3));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(matches!(
            ScanConfig::from_json(r#"{"mode": "stack", "k_min": 1, "k_max": 2, "k_points": 2, "colour": 3}"#),
            Err(CliError::Parse(_))
        ));
    }

    #[test]
    fn validation_errors() {
        let mut cfg = two_layer();
        cfg.layers.clear();
        assert!(matches!(cfg.validate(), Err(CliError::Validation(_))));

        let mut cfg = two_layer();
        cfg.k_min = 0.0;
        assert!(cfg.validate().is_err());

        let mut cfg = two_layer();
        cfg.k_points = 1;
        assert!(cfg.validate().is_err());

        let mut cfg = two_layer();
        cfg.layers[1].bz = 0.001;
        assert!(cfg.validate().is_err());

        let mut cfg = two_layer();
        cfg.layers[0].u_abs = -1.0;
        assert!(cfg.validate().is_err());

        let mut cfg = two_layer();
        cfg.mode = Mode::Helix;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn second_field_turned_from_first() {
        let mut cfg = two_layer();
        cfg.layers[0].bx = 0.0;
        cfg.layers[0].by = 0.006;
        let pair = cfg.two_layer_pair(std::f64::consts::FRAC_PI_2).unwrap();
        let b2 = pair.layers()[1].field();
        assert!((b2.bx + 0.006).abs() < 1e-15 && b2.by.abs() < 1e-15);
    }
}
