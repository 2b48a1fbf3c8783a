mod common;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use k0_core::algebra::{decompose_local, iso_local, verify_local_iso, LocalIsoOptions};
use k0_core::genus::{genus_equal, glue_morphism, iso_global, Verdict};
use k0_core::instance::{Instance, K0Context, VerifyOptions};
use k0_core::lattice::{lattice_index, lattice_intersect, lattice_sum, localize, BaseRing};
use k0_core::linalg::{FpMatrix, IntMatrix, RatMatrix};

#[test]
fn normal_forms_exhaustive_2x2() {
    let (n, bad) = exhaustive_2x2();
    assert_eq!(n, 2401);
    assert_eq!(bad, 0);
}

#[test]
fn normal_forms_random_3x3_4x4() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    assert_eq!(random_normal_forms(&mut rng), 0);
}

#[test]
fn primary_decomposition_and_gluing_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let bad = random_lg_pairs(&mut rng, 200);
    assert!(bad.is_empty(), "{bad:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_forms_rectangular(rows in 1usize..4, cols in 1usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&mut rng, rows, cols, 6);
        prop_assert_eq!(check_normal_forms(&m), Ok(()));
    }

    #[test]
    fn join_meet_and_localization(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, n) = random_pair(&mut rng);
        let (k, _) = random_pair(&mut rng);
        if k.ambient_dim() == n.ambient_dim() {
            let s = lattice_sum(&m, &k).unwrap();
            let i = lattice_intersect(&m, &k).unwrap();
            prop_assert!(s.contains_lattice(&m) && s.contains_lattice(&k));
            prop_assert!(m.contains_lattice(&i) && k.contains_lattice(&i));
            // [M+K : M] = [K : M∩K]
            prop_assert_eq!(lattice_index(&s, &m).unwrap(), lattice_index(&k, &i).unwrap());
            let (lm, lk) = (localize(&m, p).unwrap(), localize(&k, p).unwrap());
            prop_assert_eq!(localize(&s, p).unwrap(), lattice_sum(&lm, &lk).unwrap());
            prop_assert_eq!(localize(&i, p).unwrap(), lattice_intersect(&lm, &lk).unwrap());
        }
        // Index is multiplicative along M ⊆ M + pN ⊆ N.
        let mid = lattice_sum(&m, &n.scaled(&BigRational::from_integer(BigInt::from(p)))).unwrap();
        prop_assert_eq!(lattice_index(&n, &m).unwrap(), lattice_index(&n, &mid).unwrap() * lattice_index(&mid, &m).unwrap());
        prop_assert_eq!(check_lg_pair(&m, &n), Ok(()));
    }
}

fn load(name: &str) -> Instance {
    Instance::load(&instance_path(name)).unwrap()
}

#[test]
fn genus_is_an_equivalence_relation() {
    let inst = load("quad_m5");
    let names = ["Lambda", "P", "Q", "TwoLambda"];
    let opts = LocalIsoOptions::default();
    let mut rel = BTreeMap::new();
    for a in names {
        for b in names {
            let v = genus_equal(inst.module(a).unwrap(), inst.module(b).unwrap(), &opts).unwrap().verdict;
            assert_ne!(v, Verdict::Inconclusive);
            rel.insert((a, b), v == Verdict::True);
        }
    }
    for a in names {
        assert!(rel[&(a, a)]);
        for b in names {
            assert_eq!(rel[&(a, b)], rel[&(b, a)]);
            for c in names {
                if rel[&(a, b)] && rel[&(b, c)] {
                    assert!(rel[&(a, c)]);
                }
            }
        }
    }
    // P and Q are non-principal of norm 2 and 3; both lie in the genus of Λ.
    assert!(rel[&("P", "Q")] && rel[&("P", "Lambda")]);
}

#[test]
fn decomposition_invariants_on_the_triad() {
    let inst = load("triad_z7");
    for name in ["S", "Lambda", "N12", "N13", "N23", "LambdaStar", "M", "M+S"] {
        let m = inst.module(name).unwrap();
        let d = decompose_local(m, 8, 0).unwrap();
        assert_eq!(d.certificate.total_rank(), m.rank(), "{name}");
        assert!(d.certificate.stable);
        assert_eq!(d.summands.iter().map(|s| s.rank()).sum::<usize>(), m.rank());
        assert_ne!(FpMatrix::from_int(&d.witness, 7).det(), 0, "{name}: witness must be invertible mod 7");
        // Same seed, same certificate; another seed, same multiset.
        assert_eq!(decompose_local(m, 8, 0).unwrap().certificate, d.certificate);
        let other = decompose_local(m, 8, 99).unwrap();
        assert_eq!(other.certificate.summands, d.certificate.summands);
        // A module is isomorphic to the sum of its completed summands.
        let w = iso_local(m, m, 7, &LocalIsoOptions::default()).unwrap();
        if let k0_core::algebra::IsoVerdict::Iso(w) = w {
            assert!(verify_local_iso(m, m, 7, &w).unwrap());
        } else {
            panic!("{name} is not isomorphic to itself");
        }
    }
}

/// Whenever `S' ⊕ B ≅ S'' ⊕ B` is found for a tested `B`, also `S' ⊕ S ≅ S'' ⊕ S`;
/// and `A ⊕ B ≅ A' ⊕ B` with `B ∈ add A` gives `A ⊕ A ≅ A' ⊕ A`.
#[test]
fn cancellation_properties_on_quadratic_members() {
    let inst = load("quad_m5");
    let opts = LocalIsoOptions::default();
    let s = inst.module("Lambda").unwrap();
    let names = ["Lambda", "P", "Q"];
    let sum = |a: &str, b: &str| {
        k0_core::algebra::LatticeModule::direct_sum("x", &[inst.module(a).unwrap().clone(), inst.module(b).unwrap().clone()])
            .unwrap()
    };
    let mut witnessed = 0;
    for a in names {
        for a2 in names {
            for b in names {
                if iso_global(&sum(a, b), &sum(a2, b), &opts).unwrap().is_iso() {
                    witnessed += 1;
                    let sa = k0_core::algebra::LatticeModule::direct_sum("x", &[inst.module(a).unwrap().clone(), s.clone()]).unwrap();
                    let sa2 = k0_core::algebra::LatticeModule::direct_sum("x", &[inst.module(a2).unwrap().clone(), s.clone()]).unwrap();
                    assert!(iso_global(&sa, &sa2, &opts).unwrap().is_iso(), "{a} {a2} via {b}");
                    assert!(iso_global(&sum(a, a), &sum(a2, a), &opts).unwrap().is_iso(), "{a} {a2} add");
                }
            }
        }
    }
    assert!(witnessed > 0);
}

#[test]
fn glued_morphisms_are_unique() {
    let (m, n) = (z_module("M", k0_core::lattice::Lattice::standard(BaseRing::GlobalZ, 1)), z_module("N", k0_core::lattice::Lattice::standard(BaseRing::GlobalZ, 1)));
    let six = RatMatrix::from_i64(&[&[6]]);
    let overrides = BTreeMap::from([(2u64, six.clone())]);
    let a = glue_morphism(&m, &n, &six, &overrides).unwrap();
    let b = glue_morphism(&m, &n, &six, &overrides).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, IntMatrix::from_i64(&[&[6]]));
    let seven = RatMatrix::from_i64(&[&[7]]);
    assert!(glue_morphism(&m, &n, &six, &BTreeMap::from([(2u64, seven)])).is_err());
}

#[test]
fn genus_map_is_additive() {
    let inst = load("hereditary_tiled");
    let K0Context::Global(g) = K0Context::build(&inst, &VerifyOptions::default()).unwrap() else { panic!() };
    let names = ["L1", "L2", "Lambda"];
    for a in names {
        for b in names {
            let s = k0_core::algebra::LatticeModule::direct_sum("s", &[inst.module(a).unwrap().clone(), inst.module(b).unwrap().clone()])
                .unwrap();
            let (da, db, ds) = (g.genus_descriptor(inst.module(a).unwrap()).unwrap(), g.genus_descriptor(inst.module(b).unwrap()).unwrap(), g.genus_descriptor(&s).unwrap());
            let rational: Vec<u64> = da.rational.iter().zip(&db.rational).map(|(x, y)| x + y).collect();
            assert_eq!(ds.rational, rational);
            let mut local = da.overrides.clone();
            for (p, m) in &db.overrides {
                for (l, k) in m {
                    *local.entry(*p).or_default().entry(l.clone()).or_default() += k;
                }
            }
            local.values_mut().for_each(|m| m.retain(|_, k| !k.is_zero()));
            local.retain(|_, m| !m.is_empty());
            assert_eq!(ds.overrides, local, "{a} + {b}");
        }
    }
}

#[test]
fn coordinates_are_additive_on_every_instance() {
    for name in SHIPPED {
        check_instance_coords(name).unwrap();
    }
}

#[test]
fn class_number_oracles_agree() {
    assert_eq!(reduced_forms(-20).len(), 2);
    assert_eq!(class_number_minus_20(), 2);
    assert_eq!(reduced_forms(-4).len(), 1);
    assert_eq!(reduced_forms(-23).len(), 3);
}
