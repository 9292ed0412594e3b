//! Library results against independent references: cell enumeration,
//! statrs' incomplete beta, Riemann sums and Monte Carlo.

mod common;

use bitexpand_core::distributions::PiecewiseConstant;
use bitexpand_core::{
    bit_marginal, estimate_streaming, exact, joint_probability, DistributionModel,
};
use common::{enumerate_cells, random_step, rng, step_cell_masses, step_model};
use rand::Rng;
use statrs::distribution::{Beta as RefBeta, Continuous, ContinuousCDF};

#[test]
fn step_models_match_cell_enumeration() {
    let mut r = rng(7);
    for trial in 0..40 {
        let p = random_step(&mut r, 1 + trial % 9);
        let n = 1 + (trial % 10) as u32;
        let cells = step_cell_masses(p.breakpoints(), p.densities(), n);
        let (marg, joint) = enumerate_cells(&cells, n);
        let stats = exact::statistics(&step_model(p), n).unwrap();
        let w = n as usize;
        for i in 0..w {
            assert!((stats.marginal(i as u32 + 1) - marg[i]).abs() <= 1e-12);
            for j in 0..w {
                if i != j {
                    let got = stats.joint(i as u32 + 1, j as u32 + 1);
                    assert!(
                        (got - joint[i * w + j]).abs() <= 1e-12,
                        "trial {trial} ({i},{j})"
                    );
                }
            }
        }
    }
}

#[test]
fn beta_cells_match_reference_cdf() {
    for (a, b) in [(0.1, 0.1), (0.3, 2.5), (2.0, 2.0), (5.0, 0.7), (20.0, 20.0)] {
        let reference = RefBeta::new(a, b).unwrap();
        let n = 8;
        let k = 1usize << n;
        let cells: Vec<f64> = (0..k)
            .map(|c| reference.cdf((c + 1) as f64 / k as f64) - reference.cdf(c as f64 / k as f64))
            .collect();
        let (marg, joint) = enumerate_cells(&cells, n);
        let model = DistributionModel::beta(a, b).unwrap();
        for i in 1..=n {
            let got = bit_marginal(&model, i).unwrap();
            assert!(
                (got - marg[i as usize - 1]).abs() <= 1e-9,
                "Beta({a},{b}) bit {i}"
            );
        }
        for (i, j) in [(1u32, 2u32), (1, 8), (3, 5)] {
            let got = joint_probability(&model, i, j, 1, 1).unwrap();
            let want = joint[(i as usize - 1) * n as usize + j as usize - 1];
            assert!((got - want).abs() <= 1e-9, "Beta({a},{b}) pair ({i},{j})");
        }
    }
}

#[test]
fn beta_cdf_and_pdf_match_reference() {
    for (a, b) in [
        (0.1, 0.1),
        (0.25, 3.0),
        (0.75, 0.75),
        (1.0, 4.0),
        (3.5, 1.0),
        (2.0, 2.0),
        (20.0, 20.0),
    ] {
        let reference = RefBeta::new(a, b).unwrap();
        let model = DistributionModel::beta(a, b).unwrap();
        for k in 0..=400 {
            let x = k as f64 / 400.0;
            let got = model.cdf(x).unwrap();
            assert!(
                (got - reference.cdf(x)).abs() <= 1e-10,
                "Beta({a},{b}) cdf at {x}"
            );
            if x > 0.0 && x < 1.0 {
                let want = reference.pdf(x);
                let got = model.pdf(x).unwrap();
                assert!(
                    (got - want).abs() <= 1e-10 * want.max(1.0),
                    "Beta({a},{b}) pdf at {x}"
                );
            }
        }
    }
}

/// Midpoint rule over an `m x m` grid of the unit square's relevant strip:
/// `Pr[B_1 = 1, B_2 = 1]` for Beta(2,2) is the mass of `[3/4, 1]`.
#[test]
fn beta_two_two_joint_against_riemann_sum() {
    let m = 200_000;
    let h = 0.25 / m as f64;
    let riemann: f64 = (0..m)
        .map(|k| {
            let x = 0.75 + (k as f64 + 0.5) * h;
            6.0 * x * (1.0 - x) * h
        })
        .sum();
    let model = DistributionModel::beta(2.0, 2.0).unwrap();
    let got = joint_probability(&model, 1, 2, 1, 1).unwrap();
    assert!((riemann - 0.15625).abs() < 1e-9);
    assert!((got - riemann).abs() < 1e-9);
}

#[test]
fn smooth_densities_integrate_to_one() {
    let models = [
        DistributionModel::beta(2.0, 5.0).unwrap(),
        DistributionModel::beta(20.0, 20.0).unwrap(),
        DistributionModel::trapezoidal(0.2, 0.45).unwrap(),
        DistributionModel::symmetric_trapezoid(0.0).unwrap(),
        DistributionModel::PiecewiseConstant(PiecewiseConstant::half_and_three_halves()),
    ];
    let m = 1_000_000;
    for model in &models {
        let h = 1.0 / m as f64;
        let total: f64 = (0..m)
            .map(|k| model.pdf((k as f64 + 0.5) * h).unwrap() * h)
            .sum();
        assert!((total - 1.0).abs() <= 1e-8, "{model}: {total}");
    }
}

#[test]
fn custom_density_matches_closed_form_beta() {
    let custom = DistributionModel::custom(|x| 30.0 * x * x * (1.0 - x).powi(2), vec![]).unwrap();
    let beta = DistributionModel::beta(3.0, 3.0).unwrap();
    let a = exact::statistics(&custom, 5).unwrap();
    let b = exact::statistics(&beta, 5).unwrap();
    for (i, j) in a.pairs() {
        assert!((a.joint(i, j) - b.joint(i, j)).abs() <= 1e-9);
    }
    for k in 1..100 {
        let u = k as f64 / 100.0;
        assert!((custom.inverse_cdf(u).unwrap() - beta.inverse_cdf(u).unwrap()).abs() <= 1e-8);
    }
}

fn sampled_models() -> Vec<DistributionModel> {
    vec![
        DistributionModel::Uniform,
        DistributionModel::beta(0.25, 0.25).unwrap(),
        DistributionModel::beta(2.0, 5.0).unwrap(),
        DistributionModel::trapezoidal(0.1, 0.3).unwrap(),
        DistributionModel::PiecewiseConstant(PiecewiseConstant::half_and_three_halves()),
    ]
}

#[test]
fn sampled_statistics_agree_with_exact_ones() {
    for (k, model) in sampled_models().iter().enumerate() {
        let n = 4;
        let theory = exact::statistics(model, n).unwrap();
        let emp = estimate_streaming(model, n, 100_000, 1000 + k as u64).unwrap();
        for i in 1..=n {
            assert!(
                (theory.marginal(i) - emp.marginal(i)).abs() <= 0.006,
                "{model} bit {i}"
            );
        }
        for (i, j) in theory.pairs() {
            if let (Some(t), Some(e)) = (theory.correlation(i, j), emp.correlation(i, j)) {
                assert!((t - e).abs() <= 0.015, "{model} ({i},{j}): {t} vs {e}");
            }
        }
    }
}

#[test]
fn sampling_error_shrinks_with_count() {
    let models = [
        DistributionModel::beta(0.5, 0.5).unwrap(),
        DistributionModel::beta(4.0, 4.0).unwrap(),
        DistributionModel::trapezoidal(0.3, 0.6).unwrap(),
    ];
    let mut shrank = 0;
    for (k, model) in models.iter().enumerate() {
        let theory = exact::statistics(model, 3).unwrap();
        let err = |count: u64| {
            let emp = estimate_streaming(model, 3, count, 31 + k as u64).unwrap();
            theory
                .pairs()
                .map(|(i, j)| {
                    (theory.correlation(i, j).unwrap() - emp.correlation(i, j).unwrap()).abs()
                })
                .fold(0.0, f64::max)
        };
        let (e3, e5) = (err(1_000), err(100_000));
        if e5 <= e3 {
            shrank += 1;
        }
    }
    assert!(
        shrank >= 2,
        "error fell with sample size for only {shrank} of 3 models"
    );
}

#[test]
fn symmetric_models_give_fair_sampled_bits() {
    let count = 100_000u64;
    let sigma = (0.25 / count as f64).sqrt();
    for model in [
        DistributionModel::beta(0.1, 0.1).unwrap(),
        DistributionModel::beta(7.0, 7.0).unwrap(),
        DistributionModel::symmetric_trapezoid(0.2).unwrap(),
    ] {
        let emp = estimate_streaming(&model, 6, count, 99).unwrap();
        for i in 1..=6 {
            assert!(
                (emp.marginal(i) - 0.5).abs() <= 4.0 * sigma,
                "{model} bit {i}"
            );
        }
    }
}

#[test]
fn uniform_sampled_bits_are_uncorrelated() {
    let emp = estimate_streaming(&DistributionModel::Uniform, 3, 100_000, 5).unwrap();
    for (i, j) in emp.pairs() {
        assert!(emp.correlation(i, j).unwrap().abs() <= 0.0095);
    }
}

#[test]
fn step_counterexample_first_bit_is_sampled_near_three_quarters() {
    let model = DistributionModel::PiecewiseConstant(PiecewiseConstant::half_and_three_halves());
    let emp = estimate_streaming(&model, 3, 100_000, 17).unwrap();
    assert!((emp.marginal(1) - 0.75).abs() <= 0.0041);
}

#[test]
fn random_step_models_have_a_biased_bit() {
    let mut r = rng(11);
    for _ in 0..30 {
        let segments = 2 + r.random_range(0..6);
        let p = random_step(&mut r, segments);
        let model = step_model(p);
        if model.is_symmetric(1e-9) {
            continue;
        }
        let worst = (1..=10)
            .map(|i| (bit_marginal(&model, i).unwrap() - 0.5).abs())
            .fold(0.0, f64::max);
        assert!(worst > 1e-6, "{model}");
    }
}
