use fracsplit::functions::{Denominator, Subdifferentiable, SubdifferentiableFunction};
use fracsplit::problems::{QuadraticLinear, SumLinearRatios};
use fracsplit::program::{ratio_value, sum_ratio_value};
use fracsplit::{Matrix, Vector};
use proptest::prelude::*;

fn pos_vec(dim: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(0.01..20.0f64, dim).prop_map(Vector::from_vec)
}

fn quadratic() -> SubdifferentiableFunction {
    let q = Matrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, -1.0, 0.0, -1.0, 2.0]);
    SubdifferentiableFunction::quadratic(q, Vector::from_vec(vec![1.0, -2.0, 0.5]), 3.0).unwrap()
}

fn cobb_douglas() -> Denominator {
    Denominator::cobb_douglas(2.5, Vector::from_vec(vec![0.2, 0.3, 0.5])).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn subgradient_inequality(x in pos_vec(3), y in pos_vec(3)) {
        let fs = [
            quadratic(),
            SubdifferentiableFunction::affine(Vector::from_vec(vec![1.0, -1.0, 2.0]), 0.3),
            cobb_douglas().negated().clone(),
        ];
        for f in &fs {
            let fy = f.value(&y).unwrap();
            let lin = f.value(&x).unwrap() + f.subgradient(&x).unwrap().dot(&(&y - &x));
            prop_assert!(fy - lin >= -1e-9 * (1.0 + fy.abs()));
        }
    }

    #[test]
    fn strong_convexity_witness(x in pos_vec(3), y in pos_vec(3)) {
        // Smallest eigenvalue of the Q above, computed by nalgebra.
        let f = quadratic();
        let q = Matrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, -1.0, 0.0, -1.0, 2.0]);
        let sigma = q.symmetric_eigenvalues().min();
        let gap = (f.subgradient(&x).unwrap() - f.subgradient(&y).unwrap()).dot(&(&x - &y));
        prop_assert!(gap >= sigma * (&x - &y).norm_squared() * (1.0 - 1e-12));
    }

    #[test]
    fn concave_denominator_is_superlinear(x in pos_vec(3), y in pos_vec(3)) {
        let g = cobb_douglas();
        // g(y) ≤ g(x) − ⟨h′(x), y − x⟩ for concave g.
        let bound = g.value(&x).unwrap() - g.neg_subgradient(&x).unwrap().dot(&(&y - &x));
        prop_assert!(g.value(&y).unwrap() <= bound + 1e-9 * (1.0 + bound.abs()));
    }
}

#[test]
fn finite_differences_match() {
    let g = cobb_douglas();
    let fs = [quadratic(), g.negated().clone()];
    for f in &fs {
        for x in [[0.5, 1.0, 2.0], [3.0, 0.7, 1.1], [9.0, 4.0, 0.2]] {
            let x = Vector::from_row_slice(&x);
            let grad = f.subgradient(&x).unwrap();
            for i in 0..3 {
                let h = 1e-6 * (1.0 + x[i].abs());
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fd = (f.value(&xp).unwrap() - f.value(&xm).unwrap()) / (2.0 * h);
                assert!((fd - grad[i]).abs() <= 1e-5 * (1.0 + grad[i].abs()));
            }
        }
    }
}

#[test]
fn quadratic_linear_initial_ratio_matches_dense_evaluation() {
    let inst = QuadraticLinear::generate(30, 6, 17).unwrap();
    let p = inst.program().unwrap();
    let x = inst.default_start();
    // Independent evaluation: explicit loops over P and s.
    let k = inst.k;
    let mut quad = 0.0;
    for i in 0..k {
        for j in 0..k {
            let mut q_ij: f64 = (0..k).map(|l| inst.p[(l, i)] * inst.p[(l, j)]).sum();
            if i == j {
                q_ij += k as f64;
            }
            quad += x[i] * q_ij * x[j];
        }
    }
    let lin: f64 = (0..k).map(|j| inst.s[j] * x[j]).sum();
    let want = 0.5 * quad / lin;
    let got = ratio_value(&p, &x).unwrap();
    assert!((got - want).abs() <= 1e-12 * want.abs());
}

#[test]
fn sum_of_ratios_matches_term_by_term_evaluation() {
    let inst = SumLinearRatios::generate(6, 4, 3, 5).unwrap();
    let p = inst.program().unwrap();
    let x = Vector::from_fn(6, |i, _| 1.0 + 7.0 * i as f64);
    let mut want = 0.0;
    for i in (0..inst.m).rev() {
        let num: f64 = (0..6).rev().map(|j| inst.c[(i, j)] * x[j]).sum::<f64>() + inst.r[i];
        let den: f64 = (0..6).rev().map(|j| inst.d[(i, j)] * x[j]).sum::<f64>() + inst.s[i];
        want += num / den;
    }
    let got = sum_ratio_value(&p, &x).unwrap();
    assert!((got - want).abs() <= 1e-12 * want.abs());
}
