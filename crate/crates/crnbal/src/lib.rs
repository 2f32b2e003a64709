//! Balance analysis for mass-action chemical reaction networks.
//!
//! A reaction network is viewed as a weighted directed multigraph on its
//! complexes. From that graph the crate builds the composition matrix `Z`,
//! the incidence matrix `D`, the rate matrix `K`, the stoichiometric matrix
//! `S = Z D` and the Laplacian `L = -D K`, and then decides three
//! progressively stronger balance properties with machine-checkable
//! certificates:
//!
//! * **complex balancing** — some positive equilibrium balances inflow and
//!   outflow at every complex (decided through the Kirchhoff vector of
//!   spanning-tree weights),
//! * **formal balancing** — the weak Wegscheider conditions hold on every
//!   cycle of the reversible skeleton,
//! * **detailed balancing** — the generalized Wegscheider conditions hold on
//!   the kernel of the reversible stoichiometric matrix.
//!
//! All verdicts are exact decision procedures over arbitrary-precision
//! rationals; floating point only enters for equilibrium certificates and
//! for the ODE simulation layer in [`dynamics`], which cross-validates the
//! verdicts against trajectories and the Gibbs function.
//!
//! The `.crn` text format is handled by [`parser`]; [`report`] aggregates
//! everything into a serializable analysis report used by the `crnbal`
//! command-line tool.

pub mod balance;
pub mod dynamics;
pub mod graphkit;
pub mod kirchhoff;
pub mod linalg;
pub mod model;
pub mod parser;
pub mod rational;
pub mod report;

pub use balance::{
    BalanceError, BalanceKind, BalanceVerdict, BalanceViolation, ConductanceDecomposition,
    EquilibriumCertificate, KernelContext,
};
pub use dynamics::{DynamicsError, SimOptions, State, Trajectory};
pub use graphkit::{ComponentPartition, SpanningTree};
pub use kirchhoff::KirchhoffVector;
pub use linalg::RationalMatrix;
pub use model::{
    ArithmeticMode, ComplexVector, MatrixBundle, NetworkBuilder, NotReversible, Reaction,
    ReactionNetwork, ReversibleStructure, Species, StructuralError,
};
pub use parser::{parse_network, serialize_network, NetworkDocument, ParseError};
pub use rational::Rational;
pub use report::AnalysisReport;
