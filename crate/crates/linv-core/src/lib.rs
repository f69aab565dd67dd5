//! L-invariants of p-adically uniformized modular forms, computed two ways.
//!
//! The crate works at "desk scale": exact p-adic arithmetic at a capped
//! absolute precision, harmonic cocycles on the Bruhat-Tits tree of
//! PGL(2, F) for F an unramified extension of Q_p, Schottky groups given by
//! certified ping-pong data, Coleman integration of the boundary
//! distribution, and rank-2 monodromy modules.  The Teitelbaum invariant
//! comes from the ratio of the Coleman class to the Schneider class; the
//! Fontaine-Mazur invariant is read off the assembled filtered (phi_q, N)
//! module.  Agreement of the two is the quantity of interest.
//!
//! Everything here is `no_std` + `alloc`; IO, fixtures and the CLI live in
//! the companion crate.

#![no_std]

extern crate alloc;

pub mod btree;
pub mod coeff;
pub mod cohom;
pub mod integrate;
pub mod linalg;
pub mod linv;
pub mod padic;
pub mod schottky;

use alloc::string::String;

/// Errors surfaced by core operations.  Each carries the module and a short
/// description so the CLI can print a remediation hint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Division by zero or inversion of a non-unit where a unit is required.
    DivisionByZero,
    /// Two elements from incompatible contexts were combined.
    ContextMismatch,
    /// An operation ran out of p-adic precision (pivot below threshold,
    /// series tail above budget, ...).  Remedy: raise N.
    PrecisionLoss(String),
    /// Structural failure: invalid input data (bad matrix, bad fixture,
    /// non-hyperbolic generator, broken involution ...).
    Invalid(String),
    /// Iteration/size budget exceeded (bad certification or runaway input).
    BudgetExceeded(String),
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::ContextMismatch => write!(f, "p-adic context mismatch"),
            Error::PrecisionLoss(m) => write!(f, "precision insufficient: {m}"),
            Error::Invalid(m) => write!(f, "invalid input: {m}"),
            Error::BudgetExceeded(m) => write!(f, "budget exceeded: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
