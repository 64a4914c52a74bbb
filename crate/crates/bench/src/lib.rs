//! Shared inputs for the criterion benchmarks.

use psmdi::{Geometry, ProtocolConfig, SourceParams};

/// Baseline and one-photon configurations at `l_ab` km, extreme asymmetric.
pub fn reference_pair(l_ab: f64) -> (ProtocolConfig, ProtocolConfig) {
    let base = Geometry::ExtremeAsymmetric.place(&ProtocolConfig::default(), l_ab);
    let mut one = base;
    one.source = SourceParams::with_optimal_tps(base.source.v, 1).expect("V = 15 has an interior optimum");
    (base, one)
}
