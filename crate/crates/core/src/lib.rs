//! Symbolic engine for Lefschetz-fibration slope constructions.
//!
//! Words of Dehn twists are evaluated in the integer symplectic group, their
//! signatures computed exactly through Meyer's cocycle, and the results checked
//! against closed-form invariant arithmetic.

pub mod constructions;
pub mod decimal;
pub mod ledger;
pub mod signature;
pub mod surface;
pub mod symplectic;
pub mod word;

pub use constructions::{
    approximate_slope, build_counterexample, build_high_slope_word, high_slope_sequence, ApproxError,
    Approximation, ConstructionError, ConstructionRecord, ProvenanceStep, SequenceOutcome,
};
pub use ledger::{FibrationInvariants, LedgerError};
pub use signature::{
    form_signature, meyer_cocycle, relator_signature_delta, signature_of_word, RationalForm, SignatureError,
    SignatureReport,
};
pub use surface::{
    intersection_number, standard_chain_classes, validate_catalog, CatalogError, Curve, CurveCatalog,
    FamilyKey, HomologyClass, SurfaceContext, SurfaceError, ValidationReport,
};
pub use symplectic::{
    evaluate, is_homologically_trivial, symplectic_transporter, transvection, SymplecticMatrix,
    TransportError,
};
pub use word::{
    build_relator, fiber_sum, global_conjugate, hurwitz_move, parse_word, serialize_word, substitute,
    Relator, RelatorKind, TwistLetter, TwistWord, WordError,
};

/// Default word-length budget for iterated constructions.
pub const DEFAULT_BUDGET: usize = 100_000;
