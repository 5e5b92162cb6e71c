//! Monte Carlo estimates and closed forms checked against independent
//! deterministic quadrature.

mod common;

use std::f64::consts::{E, LN_2, PI};

use common::{integrate, integrate_square, mean_se, two_vertex_volume};
use geoentropy::geometry::{diagonal_direction, fisher_metric_gaussian, ParameterPoint};
use geoentropy::graph::{AdjacencyMatrix, Graph, WeightModel};
use geoentropy::rng::StreamKey;
use geoentropy::volume::{
    baseline_log_volume, estimate_log_volume, mc_log_volume, normalized_entropy_sample, upsilon_log_volume,
    EstimatorOptions, Integrand, ParameterBox,
};

fn pair(w: f64) -> AdjacencyMatrix {
    AdjacencyMatrix::from_row_major(2, vec![0.0, w, w, 0.0]).unwrap()
}

#[test]
fn quadrature_self_check() {
    assert!((integrate(|x| x.exp(), 0.0, 1.0, 1e-13, 0.0) - (E - 1.0)).abs() < 1e-13);
    assert!((integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-10, 0.0) - 2.0 / 3.0).abs() < 1e-9);
    let q = integrate_square(|x, y| 1.0 / (x * y), 1.0, E, 1e-12);
    assert!((q - 1.0).abs() < 1e-11);
}

#[test]
fn two_vertex_oracle_matches_brute_force_on_regular_box() {
    // On [0.5, 2]^2 with w = 0.2 the integrand is smooth.
    let f = |a: f64, d: f64| 0.5 * (a * d + 0.04).sqrt() * (a * d - 0.04).powf(-1.5);
    let brute = integrate_square(f, 0.5, 2.0, 1e-11);
    let split = two_vertex_volume(0.2, 0.5, 2.0, 1e-12);
    assert!((brute - split).abs() < 1e-9 * brute, "{brute} vs {split}");
}

#[test]
fn fisher_metric_matches_score_quadrature() {
    // g(theta) = E[(d/dtheta ln p)^2] for p = N(0, theta).
    for theta in [1.0, 0.3, 2.5] {
        let score_sq = |x: f64| {
            let p = (-x * x / (2.0 * theta)).exp() / (2.0 * PI * theta).sqrt();
            let s = -0.5 / theta + x * x / (2.0 * theta * theta);
            p * s * s
        };
        let w = 40.0 * theta.sqrt();
        let q = integrate(score_sq, -w, w, 1e-13, 0.0);
        let g = fisher_metric_gaussian(&ParameterPoint::new(vec![theta]).unwrap(), &[diagonal_direction(1, 0)]).unwrap();
        assert!((g[0] - q).abs() < 1e-6, "theta {theta}: {} vs {q}", g[0]);
    }
}

#[test]
fn mc_matches_quadrature_on_regular_box() {
    let (lo, hi) = (0.5, 10.0);
    let q = two_vertex_volume(0.2, lo, hi, 1e-12);
    let b = ParameterBox::new(lo, hi, 2).unwrap();
    let est = mc_log_volume(&pair(0.2), &b, 1_000_000, 308.0, StreamKey::root(1)).unwrap();
    assert_eq!(est.retained(), est.n_samples);
    let diff = est.log_integral - q.ln();
    assert!(diff.abs() <= 3.0 * est.log_mean_stderr, "diff {diff}, stderr {}", est.log_mean_stderr);
}

#[test]
fn entropy_of_single_edge_matches_quadrature_on_regular_box() {
    let (lo, hi) = (0.5, 10.0);
    let b = ParameterBox::new(lo, hi, 2).unwrap();
    let expected = (two_vertex_volume(0.2, lo, hi, 1e-12).ln() - baseline_log_volume(&b)) / 2.0;
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let s = normalized_entropy_sample(
        &g,
        &WeightModel::constant(0.2).unwrap(),
        &b,
        &EstimatorOptions::with_samples(400_000),
        StreamKey::root(2),
    )
    .unwrap();
    assert!((s.s_tilde - expected).abs() <= 3.0 * s.stderr, "{} vs {expected} (se {})", s.s_tilde, s.stderr);
}

#[test]
fn scalar_bare_volume_is_analytic() {
    let b = ParameterBox::new(1.0, E, 1).unwrap();
    assert_eq!(baseline_log_volume(&b), -0.5 * LN_2);
    let est = mc_log_volume(&AdjacencyMatrix::zeros(1), &b, 200_000, 308.0, StreamKey::root(3)).unwrap();
    assert!((est.log_integral + 0.5 * LN_2).abs() <= 3.0 * est.log_mean_stderr);
}

#[test]
fn upsilon_scalar_matches_quadrature() {
    let b = ParameterBox::new(1.0, E, 1).unwrap();
    let q = integrate(|t: f64| (-t).exp() * t.ln_1p() / (2f64.sqrt() * t), 1.0, E, 1e-13, 0.0);
    let est = upsilon_log_volume(&AdjacencyMatrix::zeros(1), &b, 200_000, StreamKey::root(4)).unwrap();
    assert!((est.log_integral - q.ln()).abs() <= 3.0 * est.log_mean_stderr);
}

#[test]
fn upsilon_regularizes_the_bare_plane() {
    // Without Upsilon the bare volume diverges logarithmically at both ends;
    // with it the box-truncated value settles as the box grows.
    let f = |x: f64, y: f64| (-(x + y)).exp() * (x * x * y * y).ln_1p() / (2.0 * x * y);
    let boxes = [(1e-2, 10.0), (1e-3, 20.0), (1e-4, 40.0)];
    let q: Vec<f64> = boxes.iter().map(|&(lo, hi)| integrate_square(f, lo, hi, 1e-10)).collect();
    assert!(((q[2] - q[1]) / q[2]).abs() < 0.01, "{q:?}");
    assert!(((q[1] - q[0]) / q[1]).abs() < 0.01, "{q:?}");

    let b = ParameterBox::new(1e-3, 20.0, 2).unwrap();
    let est = upsilon_log_volume(&AdjacencyMatrix::zeros(2), &b, 1_000_000, StreamKey::root(5)).unwrap();
    assert!((est.log_integral - q[1].ln()).abs() <= 3.0 * est.log_mean_stderr);
}

#[test]
fn stderr_shrinks_by_root_two_when_samples_double() {
    let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
    let it = Integrand::from_graph(&g, &WeightModel::constant(0.2).unwrap()).unwrap();
    let b = ParameterBox::new(0.5, 5.0, 3).unwrap();
    let mut ratios = Vec::new();
    for rep in 0..20 {
        let key = StreamKey::root(6).child(rep);
        let small = estimate_log_volume(&it, &b, &EstimatorOptions::with_samples(20_000), key).unwrap();
        let large = estimate_log_volume(&it, &b, &EstimatorOptions::with_samples(40_000), key.child(1)).unwrap();
        ratios.push(small.log_mean_stderr / large.log_mean_stderr);
    }
    let (m, se) = mean_se(&ratios);
    assert!((m - 2f64.sqrt()).abs() < 0.05f64.max(3.0 * se), "mean ratio {m} (se {se})");
}

#[test]
fn huge_integrands_do_not_overflow() {
    // sqrt det g ~ 1e320 at every point of this box, beyond the f64 range;
    // det psi ~ 1e-320 is still above the (lowered) degeneracy threshold.
    let b = ParameterBox::new(1e-80, 2e-80, 4).unwrap();
    let opts = EstimatorOptions { log10_cap: f64::INFINITY, degeneracy_tol: 1e-323, ..EstimatorOptions::with_samples(50_000) };
    let est = estimate_log_volume(&Integrand::bare(4), &b, &opts, StreamKey::root(7)).unwrap();
    assert_eq!(est.retained(), est.n_samples);
    assert!(est.log_integral.is_finite());
    assert!((est.log_integral - baseline_log_volume(&b)).abs() <= 3.0 * est.log_mean_stderr);
}
