//! Exact computations with finite-dimensional Leibniz algebras: structure
//! constants over the rationals, derivations, named families of filiform
//! nilradicals, solvable extensions and a registry of executable checks.

pub mod algebra;
pub mod arith;
pub mod derivations;
pub mod extensions;
pub mod families;
pub mod io;
pub mod symbolic;
pub mod verify;

pub use algebra::{Algebra, AlgebraError, FamilyMeta, NilradicalVerdict, Subspace};
pub use arith::matrix::{LinearSolution, Matrix};
pub use arith::poly::{MultiPoly, Var};
pub use arith::rational::{binomial, format_rational, parse_rational, Rational};
pub use derivations::DerivationSpace;
pub use extensions::{ConstraintSystem, ExtensionProblem, SolveOutcome};
pub use families::{FamilyId, FamilySpec, LieVariant};
pub use io::FileError;
pub use verify::{Report, Verdict};
