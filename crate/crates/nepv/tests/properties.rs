//! Property tests for the structural guarantees: scaling invariance,
//! class relations between backward errors, exactness of the attaining
//! constructions, and input validation.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use nepv::backward_error::{
    attaining_backward_perturbation, backward_error, backward_error_symmetric, perturbed_residual,
    rayleigh_quotient,
};
use nepv::conditioning::PerturbationDirection;
use nepv::experiments::random_problem;
use nepv::io::{problem_from_json, problem_to_json};
use nepv::{Coefficient, Error, MatrixNorm, SpmfProblem, WeightPolicy};

/// A reproducible problem drawn from its seed, sized for fast cases.
fn problem_strategy() -> impl Strategy<Value = SpmfProblem> {
    (2usize..7, 1usize..4, any::<u64>())
        .prop_map(|(n, m, seed)| random_problem(n, m, seed).expect("valid sizes"))
}

/// A vector matching the problem, bounded entries, bounded away from zero.
fn vector_for(n: usize) -> impl Strategy<Value = DVector<f64>> {
    proptest::collection::vec(-3.0f64..3.0, n)
        .prop_map(DVector::from_vec)
        .prop_filter("nonzero", |v| v.norm() > 1e-3)
}

fn pair_strategy() -> impl Strategy<Value = (SpmfProblem, DVector<f64>, f64)> {
    problem_strategy().prop_flat_map(|p| {
        let n = p.dim();
        (Just(p), vector_for(n), -10.0f64..10.0)
    })
}

proptest! {
    /// The matrix function ignores the scale of its argument, so every
    /// derived quantity may assume a normalized vector.
    #[test]
    fn matrix_is_scale_free((problem, v, _) in pair_strategy(),
                            scale in prop_oneof![-8.0f64..-0.125, 0.125f64..8.0]) {
        let a = problem.matrix(&v).unwrap();
        let b = problem.matrix(&(&v * scale)).unwrap();
        let denom = a.norm().max(1e-30);
        prop_assert!((a - b).norm() / denom <= 1e-12);
    }

    /// Jacobian and matrix act identically on the vector itself; this is
    /// the identity that lets one matrix carry the eigenpair and the
    /// conditioning at once.
    #[test]
    fn jacobian_fixes_the_vector((problem, v, _) in pair_strategy()) {
        let av = problem.matrix(&v).unwrap() * &v;
        let jv = problem.jacobian(&v).unwrap() * &v;
        prop_assert!((av - &jv).norm() <= 1e-12 * jv.norm().max(1.0));
    }

    /// Backward errors do not see the scale of the approximate eigenvector.
    #[test]
    fn backward_error_is_scale_free((problem, v, lambda) in pair_strategy(),
                                    scale in prop_oneof![-8.0f64..-0.125, 0.125f64..8.0]) {
        let eta = backward_error(&problem, lambda, &v).unwrap();
        let eta_scaled = backward_error(&problem, lambda, &(&v * scale)).unwrap();
        prop_assert!((eta - eta_scaled).abs() <= 1e-12 * eta.max(1e-30));
    }

    /// Symmetry costs nothing in the spectral norm and at most sqrt(2) in
    /// the Frobenius norm.
    #[test]
    fn backward_error_class_relations((problem, v, lambda) in pair_strategy()) {
        let eta = backward_error(&problem, lambda, &v).unwrap();
        let (eta_2, eta_f) = backward_error_symmetric(&problem, lambda, &v).unwrap();
        prop_assert_eq!(eta, eta_2);
        prop_assert!(eta_f >= eta * (1.0 - 1e-13));
        prop_assert!(eta_f <= eta * 2f64.sqrt() * (1.0 + 1e-13));
    }

    /// The Rayleigh quotient leaves a residual orthogonal to the vector and
    /// beats any other eigenvalue estimate.
    #[test]
    fn rayleigh_quotient_is_optimal((problem, v, lambda) in pair_strategy()) {
        let best = rayleigh_quotient(&problem, &v).unwrap();
        let r = problem.matrix(&v).unwrap() * &v - best * &v;
        prop_assert!(r.dot(&v).abs() <= 1e-10 * v.norm_squared().max(1.0));
        let eta_best = backward_error(&problem, best, &v).unwrap();
        let eta_other = backward_error(&problem, lambda, &v).unwrap();
        prop_assert!(eta_best <= eta_other * (1.0 + 1e-12) + 1e-300);
    }

    /// For every class, the constructed smallest perturbation really makes
    /// the approximate pair exact and sits on its claimed budget.
    #[test]
    fn attaining_perturbation_restores_exactness((problem, v, lambda) in pair_strategy(),
                                                 class in 0usize..3) {
        let (symmetric, norm) = match class {
            0 => (false, MatrixNorm::Spectral),
            1 => (true, MatrixNorm::Spectral),
            _ => (true, MatrixNorm::Frobenius),
        };
        let attained = attaining_backward_perturbation(&problem, lambda, &v, symmetric, norm).unwrap();
        let r = problem.matrix(&v).unwrap() * &v - lambda * &v;
        let repaired = perturbed_residual(&problem, lambda, &v, attained.epsilon, &attained.direction).unwrap();
        prop_assert!(repaired.norm() <= 1e-10 * r.norm().max(1e-30));
    }

    /// Problems written to JSON come back with the same size, weights, and
    /// coefficient values.
    #[test]
    fn json_round_trip((problem, v, _) in pair_strategy()) {
        let text = problem_to_json(&problem).unwrap();
        let back = problem_from_json(&text).unwrap();
        prop_assert_eq!(problem.dim(), back.dim());
        prop_assert_eq!(problem.term_count(), back.term_count());
        for (a, b) in problem.weights().iter().zip(back.weights()) {
            prop_assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
        }
        let fa = problem.coefficient_values(&v).unwrap();
        let fb = back.coefficient_values(&v).unwrap();
        for (a, b) in fa.iter().zip(&fb) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    /// A slightly asymmetric matrix is silently symmetrized; a clearly
    /// asymmetric one is rejected.
    #[test]
    fn symmetrize_or_reject(n in 2usize..6, seed in any::<u64>(), eps in 0.01f64..0.5) {
        let base = random_problem(n, 1, seed).unwrap().terms()[0].matrix().clone();
        let scale = base.norm().max(1.0);

        let mut slight = base.clone();
        slight[(0, 1)] += 1e-14 * scale;
        let accepted = SpmfProblem::new(
            vec![(slight, Coefficient::Constant(1.0))],
            WeightPolicy::Unit,
        ).unwrap();
        let a = accepted.terms()[0].matrix();
        prop_assert!((a - a.transpose()).norm() == 0.0);

        let mut bad = base;
        bad[(0, 1)] += eps * scale;
        let rejected = SpmfProblem::new(
            vec![(bad, Coefficient::Constant(1.0))],
            WeightPolicy::Unit,
        );
        let is_rejected = matches!(rejected, Err(Error::NotSymmetric { .. }));
        prop_assert!(is_rejected);
    }

    /// Direction matrices over their per-term budget are rejected, at or
    /// under it accepted.
    #[test]
    fn direction_budget_is_enforced(n in 2usize..5, excess in 1.001f64..3.0) {
        let weights = vec![1.0, 0.5];
        let within = vec![
            DMatrix::identity(n, n) * (1.0 / (n as f64).sqrt() * 0.9),
            DMatrix::identity(n, n) * 0.1,
        ];
        prop_assert!(PerturbationDirection::new(within, false, MatrixNorm::Frobenius, &weights).is_ok());

        let over = vec![
            DMatrix::identity(n, n),
            DMatrix::identity(n, n) * (0.5 * excess),
        ];
        let result = PerturbationDirection::new(over, false, MatrixNorm::Spectral, &weights);
        let is_rejected = matches!(result, Err(Error::DirectionExceedsBudget { .. }));
        prop_assert!(is_rejected);
    }
}
