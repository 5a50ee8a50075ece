//! Spin-resolved reflection and transmission of neutrons by magnetic mirrors.
//!
//! The crate covers uniform magnetic slabs, stacks of noncollinear films and
//! mirrors with helicoidal magnetisation, all at normal incidence with vacuum on
//! both sides. On top of the scattering solvers it provides numerical checks of
//! time-reversal identities for absorbing barriers and a kinetic Monte Carlo of
//! a neutron gas split by a spin-active mirror.
//!
//! Conventions: lengths in nm, wave numbers in 1/nm, potentials and fields in
//! 1/nm² (already multiplied by `2m/ħ²` resp. `2μm/ħ²`), absorbing potentials
//! written `u′ − i·u″`. Spin labels refer to σ_z eigenstates and probabilities
//! are indexed `(out, in)`, so `R(−+)` is reflection of an incident `|+⟩` into `|−⟩`.

pub mod helix;
pub mod layer;
pub mod spin;
pub mod stack;
pub mod treversal;
pub mod vessel;

pub use num_complex::Complex64;

pub use helix::{helix_solve, helix_solve_analytic, helix_solve_sliced, HelixError, HelixMethod, HelixMirror, HelixSolution};
pub use layer::{barrier_rt, barrier_wavefunction, interface_r, k_prime, layer_r, layer_t, Layer, LayerError, ScalarAmplitudes};
pub use spin::{cross_term, pauli_dot, scalar_function_of, FieldVector, ScalarSplit, Spin, SpinError, SpinMatrix};
pub use stack::{
    composition_split, exact_stack_solve, spin_probabilities, two_layer_r_approx, two_layer_t_approx, CompositionSplit,
    MirrorStack, ScatteringSolution, SpinProbabilities, StackError,
};
pub use vessel::{run_vessel, ChannelProbabilities, MirrorChannelTable, Side, VesselError, VesselReport};
