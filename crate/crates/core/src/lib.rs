//! Linear group-equivariant non-expansive operators (GENEOs) between
//! function spaces on finite sets.
//!
//! A permutation group `G` acts on `X`, a group `K` acts on `Y`, and a
//! homomorphism `T: G → K` links them. Linear operators `ℝ^X → ℝ^Y` that
//! commute with the actions are exactly the maps `φ ↦ Σ_h φ∘h μ(h)` for
//! measures `μ` on `X^Y` invariant under `h ↦ g∘h∘T(g⁻¹)`; the operator is
//! non-expansive iff some such `μ` has total variation at most one.
//!
//! - [`group`]: permutations, groups by closure, homomorphisms.
//! - [`action`]: functions `Y → X`, the twisted action, orbits, signed measures.
//! - [`stochastic`]: dense matrices and decomposition of row-stochastic
//!   matrices into rectangular permutation matrices.
//! - [`repr`]: equivariant matrix to invariant measure and back.
//! - [`polytope`]: orbit basis and the weighted-ℓ1 description of GENEOs.
//! - [`torus`]: line-average operators on `ℤ_p × ℤ_p` and image utilities.
//! - [`idx`]: MNIST IDX files.

pub mod action;
pub mod error;
pub mod group;
pub mod idx;
pub mod polytope;
pub mod repr;
pub mod stochastic;
pub mod torus;

pub use action::{Mapping, Orbit, SignedMeasure, TwistedAction};
pub use error::{GeneoError, Result};
pub use group::{FiniteSet, Homomorphism, Permutation, PermutationGroup};
pub use polytope::{CoeffVector, OrbitBasis};
pub use repr::{GeneoReport, GeoProblem, MeasureTriple};
pub use stochastic::{ConvexCombo, Matrix, RectPerm};
pub use torus::{PrimeTorus, TorusGeneo, TorusImage, UnitVector};
