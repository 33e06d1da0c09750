//! Named detector configurations.

use std::f64::consts::PI;

use crate::bloch::PureQubit;

/// `√3/2|H⟩ + ½|V⟩, |H⟩, √3/2|H⟩ − ½|V⟩`: overlaps `(3/4, 3/4, 1/4)`, the
/// optimal three-state configuration.
pub fn optimal_triple_detectors() -> [PureQubit; 3] {
    [
        PureQubit::linear_polarization(PI / 6.0),
        PureQubit::linear_polarization(0.0),
        PureQubit::linear_polarization(-PI / 6.0),
    ]
}

/// Linear polarisations at 0°, 22.5°, 45° and 67.5°.
pub fn four_path_polarization_detectors() -> [PureQubit; 4] {
    [0.0f64, 22.5, 45.0, 67.5].map(|deg| PureQubit::linear_polarization(deg.to_radians()))
}

/// Three identical detectors: the deterministic vertex `r = (1, 1, 1)`.
pub fn classical_vertex_111() -> [PureQubit; 3] {
    [PureQubit::zero(); 3]
}

/// `n` coplanar states spaced `π/n` apart on the xz great circle.
pub fn uniform_cycle(n: usize) -> Vec<PureQubit> {
    (0..n).map(|k| PureQubit::from_polar(k as f64 * PI / n as f64, 0.0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    OptimalTriple,
    FourPathPolarization,
    ClassicalVertex111,
    IdenticalFour,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::OptimalTriple,
        Preset::FourPathPolarization,
        Preset::ClassicalVertex111,
        Preset::IdenticalFour,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::OptimalTriple => "theorem1",
            Preset::FourPathPolarization => "four-path-polarization",
            Preset::ClassicalVertex111 => "classical-vertex-111",
            Preset::IdenticalFour => "identical-4",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn detectors(self) -> Vec<PureQubit> {
        match self {
            Preset::OptimalTriple => optimal_triple_detectors().to_vec(),
            Preset::FourPathPolarization => four_path_polarization_detectors().to_vec(),
            Preset::ClassicalVertex111 => classical_vertex_111().to_vec(),
            Preset::IdenticalFour => vec![PureQubit::zero(); 4],
        }
    }
}
