//! Exact symbolic computation for verifying polyhedral branching formulas
//! for Kirillov-Reshetikhin modules.
//!
//! The library builds finite root systems and Weyl groups, computes
//! characters and Q-system solutions in exact group-ring arithmetic, and
//! compares residue data of polyhedral generating functions against
//! Mukhin-Young branching series.  Every check runs over the integers (or
//! small cyclotomic extensions); floating point is never used.

pub mod charformula;
pub mod groupring;
pub mod polyform;
pub mod qsystem;
pub mod rootsys;
pub mod verifier;
pub mod weylgrp;

pub use charformula::{CharCache, CharCombo};
pub use groupring::{AltForm, GeoFraction, GroupRingElem, RandomPoint};
pub use polyform::{
    check_e_vanishing, coeff_d_chunks, coeff_d_scaled, mul_weyl_denominator,
    partial_fractions_row, polyhedral_spec, MultFormula, PartialFractionRow, PolyFactor,
    PolyhedralSpec, VanishingCertificate, VanishingRoute,
};
pub use qsystem::{
    lambda_table, residue_from_numerator, residue_from_series, LambdaTable, PoleSpec, QEngine,
    QSeries, RecurrenceReport, ResidueCoeff,
};
pub use rootsys::{CartanType, Family, RootSystem, Weight};
pub use verifier::{
    run_pipeline, CheckOutcome, CheckStatus, Mode, VerifierConfig, VerifierReport,
};
pub use weylgrp::{CosetTable, WeylElement};

/// Top-level error type aggregating each stage's failures.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Root(#[from] rootsys::RootError),
    #[error(transparent)]
    Weyl(#[from] weylgrp::WeylError),
    #[error(transparent)]
    Ring(#[from] groupring::RingError),
    #[error(transparent)]
    Char(#[from] charformula::CharError),
    #[error(transparent)]
    QSystem(#[from] qsystem::QError),
    #[error(transparent)]
    Poly(#[from] polyform::PolyError),
    #[error(transparent)]
    Verify(#[from] verifier::VerifyError),
}

pub type Result<T> = std::result::Result<T, Error>;
