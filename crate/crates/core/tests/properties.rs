use proptest::prelude::*;

use psmdi::channel::LinkParams;
use psmdi::fock::{build_projected_state, oracle_moments};
use psmdi::gaussian::{conditional_eigenvalue, entropy_g, symplectic_pair};
use psmdi::source::subtracted_covariance;
use psmdi::{plob_bound, secret_key_rate, BipartiteCovariance, ProtocolConfig, SourceParams};

/// Physical covariances: an EPR state of variance `v` through a channel of
/// transmittance `t` with added noise `chi ≥ (1 − t)/t`.
fn physical_cov() -> impl Strategy<Value = BipartiteCovariance> {
    (1.0f64..500.0, 0.001f64..1.0, 0.0f64..5.0).prop_map(|(v, t, extra)| {
        let chi = (1.0 - t) / t + extra;
        BipartiteCovariance::new_unchecked(v, t * (v + chi), t.sqrt() * (v * v - 1.0).sqrt())
    })
}

/// `γ_A − σᵀ(γ_B + I)⁻¹σ` with explicit 2×2 matrices.
fn conditional_by_matrices(cov: &BipartiteCovariance) -> f64 {
    type M = [[f64; 2]; 2];
    let mul = |x: M, y: M| -> M {
        let mut r = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        r
    };
    let gamma_a = [[cov.a, 0.0], [0.0, cov.a]];
    let sigma = [[cov.c, 0.0], [0.0, -cov.c]];
    let h = [[cov.b + 1.0, 0.0], [0.0, cov.b + 1.0]];
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let h_inv = [[h[1][1] / det, -h[0][1] / det], [-h[1][0] / det, h[0][0] / det]];
    let sigma_t = [[sigma[0][0], sigma[1][0]], [sigma[0][1], sigma[1][1]]];
    let corr = mul(mul(sigma_t, h_inv), sigma);
    let cond = [
        [gamma_a[0][0] - corr[0][0], gamma_a[0][1] - corr[0][1]],
        [gamma_a[1][0] - corr[1][0], gamma_a[1][1] - corr[1][1]],
    ];
    // Single-mode symplectic eigenvalue.
    (cond[0][0] * cond[1][1] - cond[0][1] * cond[1][0]).sqrt()
}

proptest! {
    #[test]
    fn symplectic_identities(cov in physical_cov()) {
        let (l1, l2) = symplectic_pair(&cov).unwrap();
        prop_assert!(l1 >= l2 && l2 >= 1.0);
        let a_sum = cov.seralian();
        let b_prod = cov.det_sqrt();
        prop_assert!(((l1 * l1 + l2 * l2) - a_sum).abs() <= 1e-9 * a_sum.abs().max(1.0));
        prop_assert!((l1 * l2 - b_prod).abs() <= 1e-9 * b_prod.abs().max(1.0));
    }

    #[test]
    fn conditional_matches_matrix_oracle(cov in physical_cov()) {
        let l3 = conditional_eigenvalue(&cov).unwrap();
        let oracle = conditional_by_matrices(&cov).max(1.0);
        prop_assert!((l3 - oracle).abs() <= 1e-9 * oracle);
    }

    #[test]
    fn uncorrelated_conditional_is_identity(a in 1.0f64..1e4, b in 1.0f64..1e4) {
        let cov = BipartiteCovariance::new_unchecked(a, b, 0.0);
        prop_assert_eq!(conditional_eigenvalue(&cov).unwrap(), a);
    }

    #[test]
    fn subtracted_states_are_physical(v in 1.0f64..1e3, k in 0u32..6, t in 0.01f64..0.999) {
        let s = subtracted_covariance(&SourceParams::new(v, k, t).unwrap()).unwrap();
        prop_assert!(s.p > 0.0 && s.p <= 1.0);
        prop_assert!(s.x >= 1.0 && s.y >= 1.0 && s.z >= 0.0);
        prop_assert!(BipartiteCovariance::new(s.x, s.y, s.z).is_ok());
    }

    #[test]
    fn oracle_first_moments_vanish(v in 1.5f64..30.0, k in 0usize..3, t in 0.2f64..0.95) {
        // oracle_moments rejects any nonzero first moment or broken σ_z structure.
        let state = build_projected_state(v, t, k, 1e-13).unwrap();
        prop_assert!(oracle_moments(&state).is_ok());
    }

    #[test]
    fn key_below_plob(
        v in 1.5f64..200.0,
        k in 0u32..3,
        l_ac in 0.0f64..80.0,
        l_bc in 0.0f64..10.0,
        eta in 0.8f64..1.0,
        eps in 0.0f64..0.05,
    ) {
        let mut cfg = ProtocolConfig {
            link: LinkParams { l_ac, l_bc: l_bc.min(l_ac), eta, eps_a: eps, eps_b: eps, ..LinkParams::default() },
            ..ProtocolConfig::default()
        }.with_variance(v);
        if let Ok(src) = SourceParams::with_optimal_tps(v, k) {
            cfg.source = src;
            let r = secret_key_rate(&cfg).unwrap();
            prop_assert!(r.k <= plob_bound(cfg.l_ab(), cfg.link.loss_coeff));
            prop_assert!(r.lambda2 >= 1.0 && r.lambda3 >= 1.0);
        }
    }
}

#[test]
fn entropy_monotone_and_concave() {
    let xs: Vec<f64> = (0..=10_000).map(|i| i as f64 * 0.1).collect();
    let g: Vec<f64> = xs.iter().map(|&x| entropy_g(x).unwrap()).collect();
    for w in g.windows(2) {
        assert!(w[1] > w[0]);
    }
    for w in g.windows(3) {
        assert!(w[0] + w[2] - 2.0 * w[1] <= 1e-12);
    }
}

#[test]
fn key_nonincreasing_in_distance() {
    for k in 0..=2u32 {
        let cfg = ProtocolConfig { source: SourceParams::with_optimal_tps(15.0, k).unwrap(), ..ProtocolConfig::default() };
        let mut prev = f64::INFINITY;
        for i in 0..400 {
            let r = secret_key_rate(&cfg.with_distances(i as f64 * 0.05, 0.0)).unwrap();
            if r.k_raw <= 0.0 {
                break;
            }
            assert!(r.k_raw <= prev, "k = {k}, L = {}", i as f64 * 0.05);
            prev = r.k_raw;
        }
    }
}
