mod common;

use common::{noise_corpus, planted_corpus, random_weights};
use pitchcov::eval::{
    ablation, cross_matrix, pearson, rmse, student_t_two_sided_p, ExperimentConfig, PreparedCorpus,
};
use pitchcov::model::{fit_ols, predict};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random_range(f64::EPSILON..1.0);
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// Planted corpus with Gaussian noise of standard deviation `sigma` on the targets.
fn noisy_planted(id: &str, seed: u64, sigma: f64) -> PreparedCorpus<f64> {
    let mut c = planted_corpus(id, seed, &random_weights(1), 0.0, 12, 40);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfeed);
    for u in &mut c.utterances {
        for y in &mut u.targets {
            *y += sigma * gaussian(&mut rng);
        }
    }
    c
}

#[test]
fn null_p_values_are_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let reps = 2000;
    let mut ps: Vec<f64> = (0..reps)
        .map(|_| {
            let x: Vec<f64> = (0..30).map(|_| gaussian(&mut rng)).collect();
            let y: Vec<f64> = (0..30).map(|_| gaussian(&mut rng)).collect();
            pearson(&x, &y).unwrap().p_value
        })
        .collect();
    ps.sort_by(f64::total_cmp);
    let ks = ps
        .iter()
        .enumerate()
        .map(|(i, &p)| (p - i as f64 / reps as f64).abs().max(((i + 1) as f64 / reps as f64 - p).abs()))
        .fold(0.0, f64::max);
    // 1% critical value of the one-sample KS statistic
    assert!(ks < 1.63 / (reps as f64).sqrt(), "KS {ks}");
}

#[test]
fn t_test_p_values_match_statrs() {
    for dof in [1.0, 2.0, 5.0, 28.0, 100.0, 5000.0] {
        let dist = StudentsT::new(0.0, 1.0, dof).unwrap();
        for t in [0.0, 0.1, 0.5, 1.0, 2.0, 3.5, 8.0] {
            let want = 2.0 * (1.0 - dist.cdf(t));
            let got = student_t_two_sided_p(t, dof);
            assert!((got - want).abs() <= 1e-9 * want.max(1e-6), "t={t} dof={dof}: {got} vs {want}");
        }
    }
}

#[test]
fn cross_matrix_is_near_symmetric_for_exchangeable_corpora() {
    let conds: Vec<_> = (0..3).map(|i| noisy_planted(&format!("c{i}"), 40 + i, 2.0)).collect();
    let cfg = ExperimentConfig {
        seed: 9,
        ..ExperimentConfig::default()
    };
    let m = cross_matrix(&conds, &cfg).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!((m.mean_r[i][j] - m.mean_r[j][i]).abs() < 0.05, "{:?}", m.mean_r);
        }
    }
}

#[test]
fn planted_ablation_has_no_error_at_any_size() {
    let c = planted_corpus("p", 8, &random_weights(8), 1.0, 20, 50);
    let cfg = ExperimentConfig {
        seed: 2,
        ..ExperimentConfig::default()
    };
    for pt in ablation(&c, &[0.1, 0.5, 1.0], &cfg).unwrap() {
        assert!(pt.rmse < 1e-8, "fraction {}: {}", pt.fraction, pt.rmse);
        assert!(pt.r > 0.999_999);
    }
}

#[test]
fn noise_corpora_are_mostly_not_significant() {
    let conds: Vec<_> = (0..3).map(|i| noise_corpus(&format!("n{i}"), 60 + i, 10, 40)).collect();
    let m = cross_matrix(&conds, &ExperimentConfig::default()).unwrap();
    let sig = m.significant.iter().flatten().filter(|&&s| s).count();
    assert!(sig <= 1, "{sig} of 9 significant");
}

proptest! {
    #[test]
    fn rmse_obeys_triangle_inequality(
        v in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0, -50.0f64..50.0), 1..60),
    ) {
        let (a, (b, c)): (Vec<f64>, (Vec<f64>, Vec<f64>)) = v.into_iter().map(|(a, b, c)| (a, (b, c))).unzip();
        let ab = rmse(&a, &b).unwrap();
        let bc = rmse(&b, &c).unwrap();
        let ac = rmse(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-9);
        prop_assert_eq!(rmse(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn pearson_ignores_affine_maps(
        v in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 5..60),
        scale in 0.1f64..10.0,
        offset in -100.0f64..100.0,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
        let base = pearson(&x, &y).unwrap();
        let up: Vec<f64> = x.iter().map(|v| scale * v + offset).collect();
        let down: Vec<f64> = x.iter().map(|v| -scale * v + offset).collect();
        let pu = pearson(&up, &y).unwrap();
        let pd = pearson(&down, &y).unwrap();
        prop_assert!((pu.r - base.r).abs() <= 1e-9);
        prop_assert!((pd.r + base.r).abs() <= 1e-9);
        prop_assert!((pu.p_value - pd.p_value).abs() <= 1e-9);
    }

    #[test]
    fn in_sample_fit_correlates_non_negatively(seed in any::<u64>()) {
        let c = noise_corpus("n", seed, 2, 30);
        let data = c.pooled().unwrap();
        let m = fit_ols(&data).unwrap();
        let pred = predict(&m, &data.features).unwrap();
        prop_assert!(pearson(&data.targets, &pred).unwrap().r >= -1e-12);
    }
}
