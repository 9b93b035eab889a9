//! Fixtures shared by the benchmarks.

use mimo_lab::geometry::{linear_equispaced, tchebyshev_sparse, DEFAULT_FREQUENCY_HZ};
use mimo_lab::scenarios::sample_scenario;
use mimo_lab::{ArrayGeometry, ChannelMatrix, ChannelModel, ScenarioSpec, SeedSpec, TerminalLayout};

pub const N: usize = 200;

pub fn model() -> ChannelModel {
    ChannelModel::from_frequency(DEFAULT_FREQUENCY_HZ).expect("default frequency is valid")
}

pub fn equispaced(spacing: f64) -> ArrayGeometry {
    linear_equispaced(N, spacing, model().wavelength()).expect("valid spacing")
}

pub fn sparse() -> ArrayGeometry {
    tchebyshev_sparse(N, 2.0, &[-0.03], model().wavelength()).expect("admissible coefficient")
}

pub fn users(k: usize) -> TerminalLayout {
    sample_scenario(&ScenarioSpec::default().with_users(k), SeedSpec::new(1, 0))
        .expect("default scenario is valid")
}

pub fn channel(k: usize) -> ChannelMatrix {
    mimo_lab::build_channel_matrix(&equispaced(0.5), &users(k), &model())
        .and_then(ChannelMatrix::normalize_columns)
        .expect("channel builds")
}
