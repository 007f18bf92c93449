use fracsplit::operators::{project_affine, project_box, project_halfspace, OperatorKind};
use fracsplit::{Error, FixedPointOperator, Matrix, Vector};
use proptest::prelude::*;

fn vec_strategy(dim: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-10.0..10.0f64, dim).prop_map(Vector::from_vec)
}

fn projections(dim: usize) -> Vec<FixedPointOperator> {
    let normal = Vector::from_fn(dim, |i, _| 1.0 + i as f64);
    let rows = dim.saturating_sub(1).max(1);
    let a = Matrix::from_fn(
        rows,
        dim,
        |i, j| if i == j { 1.0 } else { 0.25 * (i + j) as f64 },
    );
    vec![
        FixedPointOperator::halfspace(normal.clone(), 1.0).unwrap(),
        FixedPointOperator::hyperplane(normal, -2.0).unwrap(),
        FixedPointOperator::affine(a, Vector::from_element(rows, 0.5)).unwrap(),
        FixedPointOperator::uniform_box(dim, -1.0, 2.0).unwrap(),
        FixedPointOperator::ball(Vector::from_element(dim, 0.5), 1.5).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn projections_are_firmly_nonexpansive(x in vec_strategy(4), y in vec_strategy(4)) {
        for op in projections(4) {
            let (tx, ty) = (op.apply(&x), op.apply(&y));
            let lhs = (&tx - &ty).norm_squared();
            let rhs = (&tx - &ty).dot(&(&x - &y));
            prop_assert!(lhs <= rhs + 1e-10 * (1.0 + (&x - &y).norm_squared()));
        }
    }

    #[test]
    fn projections_are_idempotent_cutters(x in vec_strategy(3), y in vec_strategy(3)) {
        for op in projections(3) {
            let tx = op.apply(&x);
            prop_assert!(op.residual(&tx) <= 1e-10 * (1.0 + tx.norm()));
            let z = op.apply(&y);
            prop_assert!((&z - &tx).dot(&(&x - &tx)) <= 1e-10 * (1.0 + (&x - &z).norm_squared()));
            let sqne = (&x - &z).norm_squared() - (&tx - &x).norm_squared() - (&tx - &z).norm_squared();
            prop_assert!(sqne >= -1e-10 * (1.0 + (&x - &z).norm_squared()));
        }
    }

    #[test]
    fn composites_are_quasi_nonexpansive(x in vec_strategy(2)) {
        // Both sets contain z = (0, 0).
        let z = Vector::zeros(2);
        let parts = vec![
            FixedPointOperator::halfspace(Vector::from_vec(vec![1.0, 2.0]), 1.0).unwrap(),
            FixedPointOperator::halfspace(Vector::from_vec(vec![-3.0, 1.0]), 0.5).unwrap(),
            FixedPointOperator::uniform_box(2, -1.0, 1.0).unwrap(),
        ];
        for op in [
            FixedPointOperator::compose(parts.clone()).unwrap(),
            FixedPointOperator::uniform_average(parts.clone()).unwrap(),
        ] {
            let tx = op.apply(&x);
            let rho = op.sqne_modulus();
            prop_assert!(rho > 0.0);
            prop_assert!((&tx - &z).norm() <= (&x - &z).norm() + 1e-10);
            prop_assert!(
                (&tx - &z).norm_squared()
                    <= (&x - &z).norm_squared() - rho * (&tx - &x).norm_squared() + 1e-10
            );
        }
    }

    #[test]
    fn box_result_is_inside(x in vec_strategy(5)) {
        let lo = Vector::from_element(5, -1.0);
        let hi = Vector::from_element(5, 3.0);
        let p = project_box(&lo, &hi, &x).unwrap();
        prop_assert!(p.iter().all(|&v| (-1.0..=3.0).contains(&v)));
    }

    #[test]
    fn halfspace_result_is_feasible(x in vec_strategy(3)) {
        let a = Vector::from_vec(vec![3.0, -1.0, 2.0]);
        let p = project_halfspace(&a, 0.5, &x).unwrap();
        prop_assert!(a.dot(&p) <= 0.5 + 1e-12 * (1.0 + x.norm()));
    }
}

#[test]
fn affine_projection_matches_closed_form() {
    // Projection of (3, −1) onto x₁ + 2x₂ = 2: (3, −1) − (1, 2)(1 − 2)/5.
    let a = Matrix::from_row_slice(1, 2, &[1.0, 2.0]);
    let p = project_affine(
        &a,
        &Vector::from_element(1, 2.0),
        &Vector::from_vec(vec![3.0, -1.0]),
    )
    .unwrap();
    assert!((p - Vector::from_vec(vec![3.2, -0.6])).norm() < 1e-14);
}

#[test]
fn affine_projection_is_nearest_point_on_grid() {
    // Dense scan along the line x₁ + x₂ = 2 at spacing 1e-3.
    let a = Matrix::from_row_slice(1, 2, &[1.0, 1.0]);
    let x = Vector::from_vec(vec![0.3, 4.1]);
    let p = project_affine(&a, &Vector::from_element(1, 2.0), &x).unwrap();
    let best = (0..=8000)
        .map(|i| -4.0 + i as f64 * 1e-3)
        .map(|t| Vector::from_vec(vec![t, 2.0 - t]))
        .min_by(|u, v| (u - &x).norm().total_cmp(&(v - &x).norm()))
        .unwrap();
    assert!((p - best).norm() <= 1e-3);
}

#[test]
fn composite_moduli() {
    let h = FixedPointOperator::halfspace(Vector::from_vec(vec![1.0, 0.0]), 0.0).unwrap();
    let b = FixedPointOperator::uniform_box(2, 0.0, 1.0).unwrap();
    let c = FixedPointOperator::compose(vec![h.clone(), b.clone(), h.clone()]).unwrap();
    assert!((c.sqne_modulus() - 1.0 / 3.0).abs() < 1e-15);
    let avg = FixedPointOperator::average(vec![h, c.clone()], vec![0.25, 0.75]).unwrap();
    assert!((avg.sqne_modulus() - 1.0 / 3.0).abs() < 1e-15);
    assert!(matches!(avg.kind(), OperatorKind::ConvexCombination { .. }));
}

#[test]
fn construction_errors() {
    assert!(matches!(
        FixedPointOperator::halfspace(Vector::zeros(2), 1.0),
        Err(Error::InvalidOperator(_))
    ));
    let dependent = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]);
    assert!(matches!(
        FixedPointOperator::affine(dependent, Vector::zeros(2)),
        Err(Error::RankDeficient { .. })
    ));
    let mixed = vec![
        FixedPointOperator::identity(2),
        FixedPointOperator::identity(3),
    ];
    assert!(FixedPointOperator::compose(mixed.clone()).is_err());
    assert!(FixedPointOperator::uniform_average(mixed).is_err());
    let ids = vec![
        FixedPointOperator::identity(1),
        FixedPointOperator::identity(1),
    ];
    assert!(FixedPointOperator::average(ids, vec![0.5, 0.6]).is_err());
}
