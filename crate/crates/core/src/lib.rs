//! Dynamical Casimir photon creation in Josephson transmission-line metamaterials.
//!
//! A one-dimensional lattice of `N` unit cells (inductors, capacitors and
//! Josephson junctions) is described by one of four circuit families. The
//! crate provides:
//!
//! * [`lattice`]: dispersion relations, eigenenergies and reference parameters;
//! * [`quantization`]: mode functions, canonical momenta, ladder-operator
//!   extraction and checks of the canonical commutators;
//! * [`dynamics`]: the parametrically driven mode oscillator, solved both by
//!   multiple-scale analysis and by adaptive integration;
//! * [`observables`]: created particle numbers, mode energies and spectra;
//! * [`config`], [`output`], [`verify`] and [`cli`]: the `tline-dce` tool.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod constants;
pub mod dynamics;
pub mod lattice;
pub mod observables;
pub mod output;
pub mod quantization;
pub mod units;
pub mod verify;

pub use constants::{PhysicalConstants, HBAR, PHI0};
pub use dynamics::{
    BogoliubovResult, DriveSpec, DynamicsError, InitialCondition, IntegratorOptions, Method,
    ModeTrajectory, Ramp,
};
pub use lattice::{CircuitFamily, CircuitSpec, DriveClass, LatticeError};
pub use quantization::{Mode, ModeSet, QuantizationError};
