use bangl::fock::{DeltaKind, DEFAULT_FULLDUAL_CAP};
use bangl::logic::parse_sequent;
use bangl::prover::{prove, worked, SearchConfig};
use bangl::semantics::{compile, evaluate, interpret_formula, SpaceAssignment, Term};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const CAP: usize = DEFAULT_FULLDUAL_CAP;

fn gauss(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Random layer-1 inputs for a compiled term's wires, lifted to full form.
fn lifted_inputs(t: &Term, rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let raw: Vec<Vec<f64>> = t.inputs().iter().map(|s| gauss(rng, s.raw_dim())).collect();
    let full = t.inputs().iter().zip(&raw).map(|(s, r)| s.lift(r)).collect();
    (raw, full)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn all_kinds() -> [DeltaKind; 5] {
    [
        DeltaKind::KExtension(1.0),
        DeltaKind::KExtension(2.5),
        DeltaKind::BasisCopyRaw,
        DeltaKind::BasisCopyA,
        DeltaKind::BasisCopyB,
    ]
}

/// Direct index arithmetic for "John sleeps. He snores" at dims (2, 2),
/// inputs in layer-1 form: John j[a], sleeps A[n][s], He H[a][n], snores B[n][s].
#[allow(clippy::needless_range_loop)]
fn anaphora_oracle(kind: DeltaKind, raw: &[Vec<f64>]) -> Vec<f64> {
    let (j, a, h, b) = (&raw[0], &raw[1], &raw[2], &raw[3]);
    let sleeps = |x: &[f64]| -> Vec<f64> {
        (0..2)
            .map(|s| (0..2).map(|n| x[n] * a[n * 2 + s]).sum())
            .collect()
    };
    let he = |x: &[f64]| -> Vec<f64> {
        (0..2)
            .map(|n| (0..2).map(|i| x[i] * h[i * 2 + n]).sum())
            .collect()
    };
    let snores = |x: &[f64]| -> Vec<f64> {
        (0..2)
            .map(|s| (0..2).map(|n| x[n] * b[n * 2 + s]).sum())
            .collect()
    };
    let outer = |u: Vec<f64>, v: Vec<f64>| -> Vec<f64> {
        u.iter().flat_map(|x| v.iter().map(move |y| x * y)).collect()
    };
    let add = |u: Vec<f64>, v: Vec<f64>| -> Vec<f64> { u.iter().zip(&v).map(|(x, y)| x + y).collect() };
    match kind {
        DeltaKind::KExtension(k) => {
            let kv = vec![k; 2];
            add(
                outer(sleeps(j), snores(&he(&kv))),
                outer(sleeps(&kv), snores(&he(j))),
            )
        }
        DeltaKind::BasisCopyA => outer(sleeps(j), snores(&he(&[1.0, 1.0]))),
        DeltaKind::BasisCopyB => outer(sleeps(&[1.0, 1.0]), snores(&he(j))),
        DeltaKind::BasisCopyRaw => {
            // sum over basis indices with Kronecker deltas n*_i'(n_i), n*_i''(n_i), n*_i''''(n_i''')
            let mut out = vec![0.0; 4];
            for i in 0..2 {
                for i1 in 0..2 {
                    for s1 in 0..2 {
                        for i2 in 0..2 {
                            for i3 in 0..2 {
                                for i4 in 0..2 {
                                    for s2 in 0..2 {
                                        let delta = (i1 == i && i2 == i && i4 == i3) as u8 as f64;
                                        out[s1 * 2 + s2] +=
                                            delta * j[i] * a[i1 * 2 + s1] * h[i2 * 2 + i3] * b[i4 * 2 + s2];
                                    }
                                }
                            }
                        }
                    }
                }
            }
            out
        }
        DeltaKind::FullDual => unreachable!(),
    }
}

/// "John plays guitar. Mary does too" at dims (2, 2): John j, plays P[a][(n,s)],
/// guitar u, Mary m, does-too T[(n',s')][n][s], all in layer-1 form.
fn ellipsis_oracle(kind: DeltaKind, raw: &[Vec<f64>]) -> Vec<f64> {
    let (j, p, u, m, t) = (&raw[0], &raw[1], &raw[2], &raw[3], &raw[4]);
    let pg: Vec<f64> = (0..4)
        .map(|f| (0..2).map(|a| u[a] * p[a * 4 + f]).sum())
        .collect();
    // a VP vector x[(n,s)] applied to a subject
    let vp_on = |x: &[f64], subj: &[f64]| -> Vec<f64> {
        (0..2)
            .map(|s| (0..2).map(|n| subj[n] * x[n * 2 + s]).sum())
            .collect()
    };
    let does_too = |x: &[f64]| -> Vec<f64> {
        (0..4)
            .map(|ns| {
                let (n, s) = (ns / 2, ns % 2);
                (0..4).map(|f| x[f] * t[f * 4 + n * 2 + s]).sum()
            })
            .collect()
    };
    let outer = |a: Vec<f64>, b: Vec<f64>| -> Vec<f64> {
        a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
    };
    let add = |a: Vec<f64>, b: Vec<f64>| -> Vec<f64> { a.iter().zip(&b).map(|(x, y)| x + y).collect() };
    let g = |first: &[f64], second: &[f64]| outer(vp_on(first, j), vp_on(&does_too(second), m));
    match kind {
        DeltaKind::KExtension(k) => add(g(&pg, &[k; 4]), g(&[k; 4], &pg)),
        DeltaKind::BasisCopyA => g(&pg, &[1.0; 4]),
        DeltaKind::BasisCopyB => g(&[1.0; 4], &pg),
        DeltaKind::BasisCopyRaw => (0..4).fold(vec![0.0; 4], |acc, f| {
            let mut e = [0.0; 4];
            e[f] = 1.0;
            let term: Vec<f64> = g(&e, &e).into_iter().map(|x| x * pg[f]).collect();
            add(acc, term)
        }),
        DeltaKind::FullDual => unreachable!(),
    }
}

#[test]
fn anaphora_matches_closed_forms() {
    let sa = SpaceAssignment::new(2, 2);
    let t = compile(&worked::anaphora(), &sa).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for kind in all_kinds() {
        for _ in 0..100 {
            let (raw, full) = lifted_inputs(&t, &mut rng);
            let got = evaluate(&t, &full, kind, CAP).unwrap();
            let want = anaphora_oracle(kind, &raw);
            assert!(max_diff(&got, &want) <= 1e-9, "{kind}: {got:?} vs {want:?}");
        }
    }
}

#[test]
fn ellipsis_matches_closed_forms() {
    let sa = SpaceAssignment::new(2, 2);
    let t = compile(&worked::ellipsis(), &sa).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for kind in all_kinds() {
        for _ in 0..100 {
            let (raw, full) = lifted_inputs(&t, &mut rng);
            let got = evaluate(&t, &full, kind, CAP).unwrap();
            let want = ellipsis_oracle(kind, &raw);
            assert!(max_diff(&got, &want) <= 1e-9, "{kind}: {got:?} vs {want:?}");
        }
    }
}

#[test]
fn full_dual_on_layer_one_words() {
    // D(v) = 1 (x) v + v (x) 1 for v in layer 1, and the counit and He kill
    // the layer-0 copy, so the anaphora map vanishes.
    let sa = SpaceAssignment::new(2, 2).full();
    let t = compile(&worked::anaphora(), &sa).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (_, full) = lifted_inputs(&t, &mut rng);
    let out = evaluate(&t, &full, DeltaKind::FullDual, CAP).unwrap();
    assert!(out.iter().all(|x| x.abs() < 1e-12));
    let truncated = compile(&worked::anaphora(), &SpaceAssignment::new(2, 2)).unwrap();
    let (_, full) = lifted_inputs(&truncated, &mut rng);
    assert!(evaluate(&truncated, &full, DeltaKind::FullDual, CAP).is_err());
}

#[test]
fn every_found_derivation_has_matching_shapes() {
    let sa = SpaceAssignment::new(2, 3);
    let cfg = SearchConfig {
        max_solutions: 8,
        contraction_budget: 4,
        ..SearchConfig::default()
    };
    for text in [worked::ANAPHORA, worked::ELLIPSIS, worked::COREFERENCE] {
        let s = parse_sequent(text).unwrap();
        for d in prove(&s, &cfg).unwrap() {
            let t = compile(&d, &sa).unwrap();
            let ins: Vec<_> = s
                .antecedent
                .iter()
                .map(|f| interpret_formula(f, &sa).unwrap())
                .collect();
            assert_eq!(t.inputs(), ins);
            assert_eq!(t.outputs(), vec![interpret_formula(&s.goal, &sa).unwrap()]);
            assert_eq!(t.stats().deltas, d.contractions());
        }
    }
}

#[test]
fn output_shape_does_not_depend_on_kind() {
    let sa = SpaceAssignment::new(2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in [worked::strict_reading(), worked::sloppy_reading()] {
        let t = compile(&d, &sa).unwrap();
        let (_, full) = lifted_inputs(&t, &mut rng);
        for kind in all_kinds() {
            assert_eq!(evaluate(&t, &full, kind, CAP).unwrap().len(), 4);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn evaluation_is_multilinear(
        which in 0usize..4,
        slot in 0usize..6,
        kind in prop::sample::select(all_kinds().to_vec()),
        seed in any::<u64>(),
        alpha in -2.0f64..2.0,
        beta in -2.0f64..2.0,
    ) {
        let d = [worked::anaphora(), worked::ellipsis(), worked::strict_reading(), worked::sloppy_reading()][which].clone();
        let t = compile(&d, &SpaceAssignment::new(2, 2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, base) = lifted_inputs(&t, &mut rng);
        let slot = slot % base.len();
        let (_, other) = lifted_inputs(&t, &mut rng);
        let with = |x: Vec<f64>| {
            let mut ins = base.clone();
            ins[slot] = x;
            evaluate(&t, &ins, kind, CAP).unwrap()
        };
        let mixed: Vec<f64> = base[slot].iter().zip(&other[slot]).map(|(u, v)| alpha * u + beta * v).collect();
        let lhs = with(mixed);
        let (fu, fv) = (with(base[slot].clone()), with(other[slot].clone()));
        let rhs: Vec<f64> = fu.iter().zip(&fv).map(|(u, v)| alpha * u + beta * v).collect();
        prop_assert!(max_diff(&lhs, &rhs) <= 1e-9 * (1.0 + rhs.iter().map(|x| x.abs()).fold(0.0, f64::max)));
    }
}
