mod common;

use common::{planted_corpus, random_weights};
use pitchcov::model::{fit_ols, lstsq, predict, Dataset, Matrix};
use proptest::prelude::*;

fn problem() -> impl Strategy<Value = (usize, usize, Vec<f64>, Vec<f64>)> {
    (1usize..8, 30usize..120).prop_flat_map(|(d, n)| {
        (
            Just(d),
            Just(n),
            prop::collection::vec(-3.0f64..3.0, n * d),
            prop::collection::vec(-10.0f64..10.0, n),
        )
    })
}

fn dataset(n: usize, d: usize, x: &[f64], y: &[f64]) -> Dataset<f64> {
    Dataset::new(Matrix::from_vec(n, d, x.to_vec()).unwrap(), y.to_vec()).unwrap()
}

fn residuals(data: &Dataset<f64>, pred: &[f64]) -> Vec<f64> {
    data.targets.iter().zip(pred).map(|(y, p)| y - p).collect()
}

#[test]
fn planted_weights_are_recovered() {
    let w = random_weights(3);
    let c = planted_corpus("p", 3, &w, 2.5, 1, 1000);
    let m = fit_ols(&c.utterances[0]).unwrap();
    assert_eq!(m.rank, 41);
    assert!((m.intercept - 2.5).abs() <= 1e-8);
    for (a, b) in m.weights.iter().zip(&w) {
        assert!((a - b).abs() <= 1e-8);
    }
}

#[test]
fn hand_worked_system() {
    // columns: x, 1; points (0,1), (1,3), (2,5) lie on y = 2x + 1
    let rows: [&[f64]; 3] = [&[0.0, 1.0], &[1.0, 1.0], &[2.0, 1.0]];
    let s = lstsq(&rows, &[1.0, 3.0, 5.0]);
    assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 1.0).abs() < 1e-12);
    assert!(s.residual_ss < 1e-20);
    assert_eq!(s.rank, 2);
}

#[test]
fn duplicated_column_is_rank_deficient_but_fits() {
    let n = 50;
    let x: Vec<f64> = (0..n).flat_map(|i| [i as f64, i as f64]).collect();
    let y: Vec<f64> = (0..n).map(|i| 3.0 * i as f64 + 1.0).collect();
    let data = dataset(n, 2, &x, &y);
    let m = fit_ols(&data).unwrap();
    assert!(m.rank < 3);
    let pred = predict(&m, &data.features).unwrap();
    assert!(residuals(&data, &pred).iter().all(|r| r.abs() < 1e-8));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residual_is_orthogonal_to_design((d, n, x, y) in problem()) {
        let data = dataset(n, d, &x, &y);
        let m = fit_ols(&data).unwrap();
        let r = residuals(&data, &predict(&m, &data.features).unwrap());
        let scale = |v: &[f64], j: usize| -> f64 {
            (0..n).map(|i| if j == d { v[i] } else { x[i * d + j] * v[i] }).sum::<f64>().abs()
        };
        let denom = (0..=d).map(|j| scale(&y, j)).fold(1e-12, f64::max);
        for j in 0..=d {
            prop_assert!(scale(&r, j) <= 1e-6 * denom);
        }
    }

    #[test]
    fn fit_never_loses_to_the_mean((d, n, x, y) in problem()) {
        let data = dataset(n, d, &x, &y);
        let m = fit_ols(&data).unwrap();
        let sse: f64 = residuals(&data, &predict(&m, &data.features).unwrap()).iter().map(|r| r * r).sum();
        let mean = y.iter().sum::<f64>() / n as f64;
        let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
        prop_assert!(sse <= sst * (1.0 + 1e-10) + 1e-12);
    }

    #[test]
    fn prediction_is_affine(
        (d, n, x, y) in problem(),
        a in -2.0f64..2.0,
    ) {
        let data = dataset(n, d, &x, &y);
        let m = fit_ols(&data).unwrap();
        let (u, v) = (data.features.row(0), data.features.row(1));
        let mix: Vec<f64> = u.iter().zip(v).map(|(p, q)| a * p + (1.0 - a) * q).collect();
        let want = a * m.predict_row(u) + (1.0 - a) * m.predict_row(v);
        prop_assert!((m.predict_row(&mix) - want).abs() <= 1e-9 * (1.0 + want.abs()));
    }

    #[test]
    fn row_order_does_not_matter((d, n, x, y) in problem(), shift in 1usize..29) {
        let a = fit_ols(&dataset(n, d, &x, &y)).unwrap();
        let order: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let xp: Vec<f64> = order.iter().flat_map(|&i| x[i * d..(i + 1) * d].to_vec()).collect();
        let yp: Vec<f64> = order.iter().map(|&i| y[i]).collect();
        let b = fit_ols(&dataset(n, d, &xp, &yp)).unwrap();
        prop_assert!((a.intercept - b.intercept).abs() <= 1e-8 * (1.0 + a.intercept.abs()));
        for (p, q) in a.weights.iter().zip(&b.weights) {
            prop_assert!((p - q).abs() <= 1e-8 * (1.0 + p.abs()));
        }
    }
}
