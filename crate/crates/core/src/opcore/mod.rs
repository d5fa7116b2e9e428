//! Operator algebra in the computational basis.
//!
//! Every operator used by the correction schemes is stored as
//! `amplitude * X(mask) * P(domain)`: a bit-flip string composed with a
//! diagonal indicator. Dense matrices exist only to check that form.

pub mod bits;
pub mod dense;
pub mod indicator;
pub mod jump;
pub mod kl;
pub mod stabilizer;

pub use bits::{BitString, XString, MAX_QUBITS};
pub use dense::{to_dense, DenseOperator, DensityMatrix, StateVector, C64, DENSE_TOL};
pub use indicator::{syndrome_of, IndicatorSet, QubitRole, MAX_EXPLICIT_QUBITS};
pub use jump::StructuredJump;
pub use kl::{kl_check, kl_intersubspace_check, KlReport};
pub use stabilizer::{gf2_rank, projector_from_stabilizers, repetition_checks};
