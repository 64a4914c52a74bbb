//! Frozen values from an independent 30-digit evaluation of the same
//! formulas (mpmath), checked against the f64 pipeline.

#![allow(clippy::excessive_precision)]

use approx::assert_relative_eq;
use psmdi::gaussian::{conditional_eigenvalue, entropy_g, symplectic_pair};
use psmdi::keyrate::{conditioned_covariance, holevo_bound, mutual_information};
use psmdi::{secret_key_rate, BipartiteCovariance, Geometry, ProtocolConfig, SourceParams};

#[test]
fn holevo_reference_covariance() {
    let cov = BipartiteCovariance::new(15.0, 3.764, 6.550).unwrap();
    let (l1, l2) = symplectic_pair(&cov).unwrap();
    assert_relative_eq!(l1, 12.335_099_373_985_768, max_relative = 1e-12);
    assert_relative_eq!(l2, 1.099_099_373_985_768_3, max_relative = 1e-12);
    assert_relative_eq!(conditional_eigenvalue(&cov).unwrap(), 5.994_437_447_523_09, max_relative = 1e-12);
    let chi = holevo_bound(&cov).unwrap();
    assert!(chi > 0.0 && chi < 2.0);
    assert_relative_eq!(chi, 1.334_262_294_723_576_2, max_relative = 1e-11);
    assert_relative_eq!(mutual_information(&cov), 1.193_791_971_817_315_8, max_relative = 1e-12);
    assert_relative_eq!(entropy_g(0.5).unwrap(), 1.377_443_751_081_734_3, max_relative = 1e-14);
}

fn asym(v: f64, k: u32, l: f64) -> ProtocolConfig {
    let mut cfg = Geometry::ExtremeAsymmetric.place(&ProtocolConfig::default(), l).with_variance(v);
    cfg.source = SourceParams::with_optimal_tps(v, k).unwrap();
    cfg
}

#[test]
fn pipeline_at_33_km() {
    let cov = conditioned_covariance(&asym(15.0, 0, 33.0)).unwrap();
    assert_eq!(cov.a, 15.0);
    assert_relative_eq!(cov.b, 3.762_467_152_554_029_5, max_relative = 1e-12);
    assert_relative_eq!(cov.c, 6.548_291_978_020_774_7, max_relative = 1e-12);
    let r = secret_key_rate(&asym(15.0, 0, 33.0)).unwrap();
    assert_relative_eq!(r.i_ab, 1.193_420_937_372_750_4, max_relative = 1e-11);
    assert_relative_eq!(r.chi_be, 1.333_606_854_063_456_6, max_relative = 1e-11);
    assert_relative_eq!(r.k_raw, -0.187_922_754_185_616_27, max_relative = 1e-10);

    let r = secret_key_rate(&asym(15.0, 1, 33.0)).unwrap();
    assert_relative_eq!(r.p, 0.25, max_relative = 1e-14);
    assert_relative_eq!(r.cov.a, 15.0, max_relative = 1e-13);
    assert_relative_eq!(r.cov.b, 3.379_608_868_362_857_8, max_relative = 1e-12);
    assert_relative_eq!(r.cov.c, 6.062_540_332_430_992, max_relative = 1e-12);
    assert_relative_eq!(r.k_raw, -0.050_120_457_348_346_666, max_relative = 1e-10);
}

#[test]
fn pipeline_positive_points() {
    let r = secret_key_rate(&asym(15.0, 1, 5.0)).unwrap();
    assert_relative_eq!(r.k_raw, 0.028_726_942_720_453_855, max_relative = 1e-10);

    let cfg = Geometry::Symmetric.place(&ProtocolConfig::default().with_variance(100.0), 6.0);
    let r = secret_key_rate(&cfg).unwrap();
    assert_relative_eq!(r.cov.b, 98.421_442_565_422_424, max_relative = 1e-12);
    assert_relative_eq!(r.cov.c, 99.0, max_relative = 1e-13);
    assert_relative_eq!(r.i_ab, 5.383_409_472_713_511_4, max_relative = 1e-11);
    assert_relative_eq!(r.k_raw, -0.262_649_972_707_701_07, max_relative = 1e-9);
}
