//! Extended reals, Φ-functions, local infima/suprema over balls, the
//! modular and the Luxemburg norm.

pub mod ext_real;
pub mod family;
pub mod modular;
pub mod probe;
pub mod sampler;
pub mod spatial;
pub mod strong;
pub mod table;
pub mod vector;

pub use ext_real::{ExtReal, REL_FLOOR};
pub use family::{quasinorm, Dilated, Family, Phi, PhiDef, PhiFunction};
pub use modular::{luxemburg_norm, modular, FieldSample, VectorField};
pub use probe::{geometric_levels, sphere_directions, ProbeSpec};
pub use sampler::{SamplePattern, SamplerSpec};
pub use spatial::{
    phi_minus, phi_plus, Ball, BallSample, Density, Domain, LocalInf, LocalSup, ScalarField, SpatialFamily,
    SpatialPhiFunction,
};
pub use strong::{check_strong_phi, Axiom, AxiomResult, AxiomWitness, StrongPhiReport};
pub use table::Table;
pub use vector::{dist, norm, Vector};
