//! Line-of-sight multi-user MIMO simulation for large antenna arrays.
//!
//! Build an array with [`geometry`], drop terminals with [`scenarios`], form
//! the spherical-wave channel with [`propagation`] and measure it with
//! [`analysis`]. [`experiments`] wraps these into seeded, reproducible sweeps
//! driven by a [`RunConfig`].
//!
//! ```
//! use mimo_lab::{build_channel_matrix, geometry, ChannelModel, TerminalLayout, Point};
//!
//! let model = ChannelModel::from_frequency(60e9).unwrap();
//! let array = geometry::linear_equispaced(16, 0.5, model.wavelength()).unwrap();
//! let users = TerminalLayout::new(vec![Point::new(-3.0, 20.0), Point::new(4.0, 30.0)]).unwrap();
//! let h = build_channel_matrix(&array, &users, &model).unwrap().normalize_columns().unwrap();
//! let rate = mimo_lab::analysis::zf_sum_rate(&h, 10.0).unwrap();
//! assert!(rate > 0.0);
//! ```

// NaN must fail every range check, so negated comparisons are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
pub mod analysis;
pub mod config;
pub mod experiments;
pub mod fmt;
pub mod geometry;
pub mod montecarlo;
pub mod propagation;
pub mod scenarios;
pub mod synthesis;

pub use analysis::{EnsembleStats, Histogram, SingularSpectrum};
pub use config::{FamilyKind, GeometrySpec, RunConfig, ScenarioConfig};
pub use error::{Error, Result};
pub use experiments::{Experiment, Metadata, SweepResult};
pub use geometry::{ArrayGeometry, GeometryKind, GeometrySummary, Point};
pub use propagation::{build_channel_matrix, ChannelMatrix, ChannelModel, C64};
pub use scenarios::{RadiusLaw, ScenarioSpec, SeedSpec, TerminalLayout};
pub use synthesis::Objective;
