//! Property tests for the structural invariants of the core constructions.

use dualpoly::amplify::build_compression;
use dualpoly::bounds::{sqrt, Bracket};
use dualpoly::circuits::{CircuitDesc, GateKind, Wire};
use dualpoly::corrector::{build_zeta_u, build_zeta_uv, l1_bound};
use dualpoly::domain::weight;
use dualpoly::fourier::fourier;
use dualpoly::lp::oracles::{eval_poly, threshold_degree};
use dualpoly::matrix::{check_pattern_norm, signrank_le_1, PatternMatrix};
use dualpoly::rational::{q, qr};
use dualpoly::smooth::{brute_force_heavy_set, heavy_set_conditions, select_heavy_set};
use dualpoly::table::{tensor, FnTable};
use dualpoly::{orth, Domain, Q};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn cube_table(n: usize) -> impl Strategy<Value = FnTable> {
    prop::collection::vec(-3i64..=3, 1 << n)
        .prop_map(move |v| FnTable::from_values(Domain::Hypercube(n), &v.iter().map(|&x| q(x)).collect::<Vec<_>>()).unwrap())
}

fn boolean_table(n: usize) -> impl Strategy<Value = FnTable> {
    prop::collection::vec(any::<bool>(), 1 << n).prop_map(move |v| {
        let mut it = v.into_iter();
        FnTable::boolean(Domain::Hypercube(n), |_| it.next().unwrap())
    })
}

/// A small random circuit over `n` inputs: each gate draws its inputs from
/// literals and earlier gates.
fn circuit(n: usize) -> impl Strategy<Value = CircuitDesc> {
    let gate = (any::<bool>(), prop::collection::vec((0usize..64, any::<bool>(), any::<bool>()), 1..4));
    prop::collection::vec(gate, 1..5).prop_map(move |gates| {
        let mut c = CircuitDesc::constant(n, false);
        c.gates.clear();
        for (i, (is_and, ins)) in gates.into_iter().enumerate() {
            let wires = ins
                .into_iter()
                .map(|(k, pos, use_gate)| {
                    if use_gate && i > 0 {
                        Wire::Gate(k % i)
                    } else {
                        Wire::Lit { var: k % n, positive: pos }
                    }
                })
                .collect();
            let kind = if is_and { GateKind::And } else { GateKind::Or };
            c.gates.push(dualpoly::circuits::Gate { kind, inputs: wires });
        }
        c.output = Wire::Gate(c.gates.len() - 1);
        c
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn orth_is_additive_under_tensor(f in cube_table(2), g in cube_table(1)) {
        prop_assume!(!f.is_zero() && !g.is_zero());
        let a = orth(&f, 4).lower_bound();
        let b = orth(&g, 4).lower_bound();
        let t = orth(&tensor(&f, &g), 8).lower_bound();
        prop_assert_eq!(t, a + b);
    }

    #[test]
    fn fourier_roundtrip_and_orth(f in cube_table(3)) {
        let spec = fourier(&f).unwrap();
        prop_assert_eq!(spec.inverse().dense(), f.dense());
        if !f.is_zero() {
            prop_assert_eq!(spec.orth(), Some(orth(&f, 4).lower_bound()));
        }
    }

    #[test]
    fn push_forward_corrector_certifies(u in prop::collection::vec(0i64..=3, 1..=3), d in 0u32..3) {
        let total = weight(&u) as u64;
        prop_assume!(u64::from(d) < total);
        let (z, cert) = build_zeta_u(&u, d).unwrap();
        prop_assert_eq!(z.get(&u), q(1));
        prop_assert!(cert.l1 <= l1_bound(total, d));
        for (p, _) in z.iter() {
            prop_assert!(*p == u || weight(p) <= i64::from(d));
        }
    }

    #[test]
    fn reflected_corrector_certifies(
        pairs in prop::collection::vec((0i64..=3, 0i64..=3), 1..=3),
        d in 0u32..2,
    ) {
        let u: Vec<i64> = pairs.iter().map(|p| p.0).collect();
        let v: Vec<i64> = pairs.iter().map(|p| p.1).collect();
        let dist: i64 = u.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        prop_assume!(i64::from(d) < dist);
        let (z, _) = build_zeta_uv(&u, &v, d).unwrap();
        prop_assert_eq!(z.get(&u), q(1));
        prop_assert!(orth(&z, d + 2).at_least(d + 1));
    }

    #[test]
    fn heavy_set_conditions_hold(v in prop::collection::vec(0i64..=6, 1..=8), t in 1i64..=6) {
        let v: Vec<Q> = v.into_iter().map(q).collect();
        let theta = q(t);
        let total: Q = v.iter().sum();
        prop_assume!(total >= theta);
        let hs = select_heavy_set(&v, &theta).unwrap();
        prop_assert!(heavy_set_conditions(&v, &theta, &hs.set).holds() == hs.holds());
        if hs.holds() {
            prop_assert!(brute_force_heavy_set(&v, &theta).is_some());
        }
    }

    #[test]
    fn normalization_preserves_function(c in circuit(3)) {
        let base = c.truth_table().unwrap();
        prop_assert_eq!(c.normalize().truth_table().unwrap(), base.clone());
        let neg = c.negate().truth_table().unwrap();
        for x in Domain::Hypercube(3).points() {
            prop_assert_eq!(neg.get(&x).is_zero(), !base.get(&x).is_zero());
        }
    }

    #[test]
    fn dual_is_complemented_input_and_output(c in circuit(3)) {
        let base = c.truth_table().unwrap();
        let dual = c.dual().truth_table().unwrap();
        for x in Domain::Hypercube(3).points() {
            let flipped: Vec<i64> = x.iter().map(|b| 1 - b).collect();
            prop_assert_eq!(dual.get(&x).is_zero(), !base.get(&flipped).is_zero());
        }
    }

    #[test]
    fn threshold_degree_representation_and_de_morgan(f in boolean_table(3)) {
        let ans = threshold_degree(&f).unwrap();
        prop_assert!(ans.value <= 3);
        for x in Domain::Hypercube(3).points() {
            let sign = if f.get(&x).is_zero() { q(1) } else { q(-1) };
            prop_assert!((sign * eval_poly(&ans.primal, &x)).is_positive());
        }
        let dual = FnTable::boolean(Domain::Hypercube(3), |x| {
            let y: Vec<i64> = x.iter().map(|b| 1 - b).collect();
            f.get(&y).is_zero()
        });
        prop_assert_eq!(threshold_degree(&dual).unwrap().value, ans.value);
    }

    #[test]
    fn pattern_norm_formula_is_certified(vals in prop::collection::vec(-2i64..=2, 4)) {
        let phi = FnTable::from_values(Domain::Hypercube(2), &vals.iter().map(|&x| q(x)).collect::<Vec<_>>()).unwrap();
        prop_assume!(!phi.is_zero());
        let chk = check_pattern_norm(&PatternMatrix::new(2, 2, phi).unwrap(), 30).unwrap();
        prop_assert!(chk.inside && chk.exact_eigenvalue);
    }

    #[test]
    fn outer_products_have_sign_rank_one(
        u in prop::collection::vec(any::<bool>(), 1..5),
        v in prop::collection::vec(any::<bool>(), 1..5),
    ) {
        let s = |b: bool| if b { q(1) } else { q(-1) };
        let m: Vec<Vec<Q>> = u.iter().map(|&a| v.iter().map(|&b| s(a) * s(b)).collect()).collect();
        prop_assert!(signrank_le_1(&m));
    }

    #[test]
    fn sqrt_brackets_enclose(num in 1i64..10_000, den in 1i64..100) {
        let x = qr(num, den);
        let b: Bracket = sqrt(&x);
        prop_assert!(&b.lo * &b.lo <= x && x <= &b.hi * &b.hi);
    }
}

#[test]
fn compression_fibres_partition_the_inputs() {
    for (n, theta) in [(1usize, 1usize), (1, 3), (2, 2), (3, 1)] {
        let g = build_compression(n, theta).unwrap();
        let total: num_bigint::BigInt = g.codomain().points().iter().map(|v| g.fibre_size(v)).sum();
        assert_eq!(total, num_bigint::BigInt::from(1) << g.input_bits());
    }
}
