//! Shared fixtures for the benchmarks.

use bures_core::ParameterPoint;

/// A generic interior point, clear of degenerate spectra and of the chart
/// singularities.
pub fn fixture_point() -> ParameterPoint {
    ParameterPoint::from_array([0.3, 1.0, 0.7, 0.8, 0.6, 0.9, 0.5, 0.3])
}
