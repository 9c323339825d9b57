use eqop::group::{
    disentangled_operator, induced_rep_operator, shift_operator_complex, shift_operator_perm, GroupSpec,
    LatentOperator,
};
use eqop::imaging::{translate_periodic, ImageGrid};
use num_complex::Complex64;
use proptest::prelude::*;

fn apply(op: &LatentOperator, z: &[Complex64]) -> Vec<Complex64> {
    op.apply(z).unwrap()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn vector(dim: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

type Builder = fn(usize, usize, usize) -> eqop::Result<LatentOperator>;

proptest! {
    #[test]
    fn shift_forms_compose_additively(k in 2usize..9, a in 0usize..9, b in 0usize..9, mult in 1usize..4, seed in vector(32)) {
        let (a, b, dim) = (a % k, b % k, k * mult);
        let z = &seed[..dim];
        let builders: [Builder; 3] = [shift_operator_perm, shift_operator_complex, disentangled_operator];
        for build in builders {
            let lhs = apply(&build(k, dim, a).unwrap(), &apply(&build(k, dim, b).unwrap(), z));
            let rhs = apply(&build(k, dim, (a + b) % k).unwrap(), z);
            prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
        }
    }

    #[test]
    fn adjoint_inverts_shift(k in 2usize..9, s in 0usize..9, seed in vector(24)) {
        let dim = k * (24 / k);
        let op = shift_operator_complex(k, dim, s % k).unwrap();
        let back = op.apply_adjoint(&apply(&op, &seed[..dim])).unwrap();
        prop_assert!(max_diff(&back, &seed[..dim]) < 1e-12);
    }

    #[test]
    fn induced_rep_is_a_homomorphism(g in 0usize..36, h in 0usize..36, seed in vector(36)) {
        let spec = GroupSpec::translations_rotations(3, 4).unwrap();
        let (g, h) = (spec.element_at(g), spec.element_at(h));
        let gh = spec.compose(&g, &h).unwrap();
        let op = |e| induced_rep_operator(&spec, e, 36).unwrap();
        let lhs = apply(&op(&g), &apply(&op(&h), &seed));
        let rhs = apply(&op(&gh), &seed);
        prop_assert!(max_diff(&lhs, &rhs) < 1e-9);
    }

    #[test]
    fn periodic_translations_compose(
        pixels in prop::collection::vec(0.0..1.0f64, 42),
        dx1 in -10i64..10, dy1 in -10i64..10, dx2 in -10i64..10, dy2 in -10i64..10,
    ) {
        let x = ImageGrid::new(6, 7, pixels).unwrap();
        let two_step = translate_periodic(&translate_periodic(&x, dx1, dy1), dx2, dy2);
        let one_step = translate_periodic(&x, dx1 + dx2, dy1 + dy2);
        prop_assert_eq!(two_step, one_step);
    }
}
