use bangl::fock::{
    counit_eps, delta_apply, delta_inclusion, fock_comult_full, fock_dim, fock_mult, DeltaKind, GradedTensor,
    WedgeBasisIndex, DEFAULT_FULLDUAL_CAP,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CAP: usize = DEFAULT_FULLDUAL_CAP;

fn every_basis(n: usize) -> Vec<GradedTensor> {
    (0u32..1 << n)
        .map(|mask| {
            let labels = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            GradedTensor::basis(n, n, &WedgeBasisIndex::new(labels).unwrap())
        })
        .collect()
}

fn det(m: &[Vec<f64>]) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    // Laplace expansion along the first row
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<f64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][j] * det(&minor)
        })
        .sum()
}

fn close(a: &GradedTensor, b: &GradedTensor, tol: f64) -> bool {
    a.max_abs_diff(b).unwrap() <= tol
}

fn dense_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Coassociativity sides as flat 3-tensors.
fn coassoc_sides(v: &GradedTensor) -> (Vec<f64>, Vec<f64>) {
    let d = fock_comult_full(v, CAP).unwrap();
    let width = v.total_dim();
    let mut left = vec![0.0; width.pow(3)];
    let mut right = vec![0.0; width.pow(3)];
    for (l, r) in &d.terms {
        let dl = fock_comult_full(l, CAP).unwrap().to_dense();
        let dr = fock_comult_full(r, CAP).unwrap().to_dense();
        let (lf, rf) = (l.flat(), r.flat());
        for ab in 0..width * width {
            for c in 0..width {
                left[ab * width + c] += dl[ab] * rf[c];
            }
        }
        for a in 0..width {
            for bc in 0..width * width {
                right[a * width * width + bc] += lf[a] * dr[bc];
            }
        }
    }
    (left, right)
}

fn kinds() -> Vec<DeltaKind> {
    vec![
        DeltaKind::KExtension(1.0),
        DeltaKind::KExtension(-0.7),
        DeltaKind::BasisCopyRaw,
        DeltaKind::BasisCopyA,
        DeltaKind::BasisCopyB,
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative_with_unit(n in 1usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [a, b, c] = [0; 3].map(|_| GradedTensor::random(n, n, &mut rng));
        let ab_c = fock_mult(&fock_mult(&a, &b).unwrap(), &c).unwrap();
        let a_bc = fock_mult(&a, &fock_mult(&b, &c).unwrap()).unwrap();
        prop_assert!(close(&ab_c, &a_bc, 1e-9));
        let one = GradedTensor::unit(n, n);
        prop_assert!(close(&fock_mult(&one, &a).unwrap(), &a, 1e-12));
        prop_assert!(close(&fock_mult(&a, &one).unwrap(), &a, 1e-12));
    }

    #[test]
    fn layer1_squares_vanish(n in 1usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = GradedTensor::random(n, 1, &mut rng).with_max_layer(1);
        let v = GradedTensor::embed_layer1(v.layer(1));
        let sq = fock_mult(&v, &v).unwrap();
        prop_assert!(sq.flat().iter().all(|x| x.abs() <= 1e-12));
    }

    #[test]
    fn wedges_of_vectors_are_minors(n in 1usize..=4, k in 1usize..=4, seed in any::<u64>()) {
        let k = k.min(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vs: Vec<Vec<f64>> = (0..k)
            .map(|_| GradedTensor::random(n, 1, &mut rng).layer(1).to_vec())
            .collect();
        let mut acc = GradedTensor::unit(n, n);
        for v in &vs {
            acc = fock_mult(&acc, &GradedTensor::embed_layer1_in(v, n)).unwrap();
        }
        for (layer, rank) in (0..=n).flat_map(|l| (0..acc.layer(l).len()).map(move |r| (l, r))) {
            let idx = WedgeBasisIndex::unrank(layer, rank);
            let expected = if layer == k {
                let m: Vec<Vec<f64>> = vs
                    .iter()
                    .map(|v| idx.labels().iter().map(|&i| v[i]).collect())
                    .collect();
                det(&m)
            } else {
                0.0
            };
            prop_assert!((acc.get(&idx) - expected).abs() <= 1e-9);
        }
    }

    #[test]
    fn copying_maps_are_linear(
        n in 1usize..=4,
        seed in any::<u64>(),
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = GradedTensor::embed_layer1(GradedTensor::random(n, 1, &mut rng).layer(1));
        let v = GradedTensor::embed_layer1(GradedTensor::random(n, 1, &mut rng).layer(1));
        let mix = u.scale(alpha).axpy(beta, &v).unwrap();
        for kind in kinds() {
            let lhs = delta_apply(kind, &mix, CAP).unwrap().to_dense();
            let du = delta_apply(kind, &u, CAP).unwrap().to_dense();
            let dv = delta_apply(kind, &v, CAP).unwrap().to_dense();
            let rhs: Vec<f64> = du.iter().zip(&dv).map(|(x, y)| alpha * x + beta * y).collect();
            prop_assert!(dense_close(&lhs, &rhs, 1e-9), "{kind}");
        }
        let full = |t: &GradedTensor| delta_apply(DeltaKind::FullDual, t, CAP).unwrap().to_dense();
        let (fu, fv) = (GradedTensor::random(n, n, &mut rng), GradedTensor::random(n, n, &mut rng));
        let fmix = fu.scale(alpha).axpy(beta, &fv).unwrap();
        let rhs: Vec<f64> = full(&fu).iter().zip(full(&fv)).map(|(x, y)| alpha * x + beta * y).collect();
        prop_assert!(dense_close(&full(&fmix), &rhs, 1e-9));
    }

    #[test]
    fn counit_retracts_inclusion(n in 1usize..=5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = GradedTensor::random(n, n, &mut rng);
        prop_assert!(close(&delta_inclusion(&v).counit(), &v, 1e-12));
        let w = v.layer(1).to_vec();
        prop_assert_eq!(counit_eps(&GradedTensor::embed_layer1(&w)), w);
    }
}

#[test]
fn comultiplication_is_adjoint_to_product() {
    for n in 0..=3 {
        let basis = every_basis(n);
        for v in &basis {
            let d = fock_comult_full(v, CAP).unwrap();
            for x in &basis {
                for y in &basis {
                    let lhs = d.pairing(x, y).unwrap();
                    let rhs = v.inner(&fock_mult(x, y).unwrap()).unwrap();
                    assert!((lhs - rhs).abs() <= 1e-12, "n={n}");
                }
            }
        }
    }
}

#[test]
fn comultiplication_is_coassociative() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 0..=2 {
        for v in every_basis(n)
            .into_iter()
            .chain((0..5).map(|_| GradedTensor::random(n, n, &mut rng)))
        {
            let (l, r) = coassoc_sides(&v);
            assert!(dense_close(&l, &r, 1e-9), "n={n}");
        }
    }
}

#[test]
fn gathered_copies_marginalize_to_raw_copy() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=4 {
        let v = GradedTensor::embed_layer1(GradedTensor::random(n, 1, &mut rng).layer(1));
        let block = |k| delta_apply(k, &v, CAP).unwrap().block(1, 1);
        let (raw, a, b) = (
            block(DeltaKind::BasisCopyRaw),
            block(DeltaKind::BasisCopyA),
            block(DeltaKind::BasisCopyB),
        );
        // sum out the right factor of a, the left factor of b
        let row_sums = |m: &[f64]| {
            (0..n)
                .map(|i| m[i * n..(i + 1) * n].iter().sum())
                .collect::<Vec<f64>>()
        };
        let col_sums = |m: &[f64]| {
            (0..n)
                .map(|j| (0..n).map(|i| m[i * n + j]).sum())
                .collect::<Vec<f64>>()
        };
        let scaled: Vec<f64> = row_sums(&raw).iter().map(|x| x * n as f64).collect();
        assert!(dense_close(&row_sums(&a), &scaled, 1e-12));
        let scaled: Vec<f64> = col_sums(&raw).iter().map(|x| x * n as f64).collect();
        assert!(dense_close(&col_sums(&b), &scaled, 1e-12));
    }
}

#[test]
fn full_dimension_is_a_power_of_two() {
    for n in 0..=12 {
        assert_eq!(fock_dim(n, n), 1u128 << n);
    }
}
