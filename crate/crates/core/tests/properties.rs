use ffstark_core::ffield::{make_extension, Field, DlogTable, FiniteMulGroup};
use ffstark_core::grpring::{rational_idempotents, ZGPoly, ZG};
use ffstark_core::laws;
use ffstark_core::places::ramanujan_sum;
use ffstark_core::zlinalg::IntMatrix;
use ffstark_core::{BigInt, BigRational};
use proptest::prelude::*;

fn zg(nu: usize, c: &[i64]) -> ZG {
    ZG::from_i64(&c[..nu])
}

fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
    let mut rows: Vec<Vec<BigInt>> = IntMatrix::identity(n).row_vecs();
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            rows.swap(i, (i + 1) % n);
        } else {
            let add: Vec<BigInt> = rows[j].iter().map(|x| x * c).collect();
            for (a, b) in rows[i].iter_mut().zip(add) {
                *a += b;
            }
        }
    }
    IntMatrix::from_rows(n, rows)
}

fn matrix(rows: usize, cols: usize, v: &[i64]) -> IntMatrix {
    IntMatrix::from_rows(cols, (0..rows).map(|i| v[i * cols..(i + 1) * cols].iter().map(|&x| BigInt::from(x)).collect()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cyclic_fitting_is_annihilator(nu in 1usize..=6, n in 1i64..24, gens in prop::collection::vec(prop::collection::vec(-4i64..5, 6), 0..3)) {
        let gens: Vec<ZG> = gens.iter().map(|c| zg(nu, c)).collect();
        prop_assert!(laws::fitting_equals_annihilator_cyclic(nu, n, &gens));
    }

    #[test]
    fn fitting_extension_and_submodule(nu in 1usize..=6, n1 in 1i64..10, n2 in 1i64..10,
            f in prop::collection::vec(-3i64..4, 6), g in prop::collection::vec(-3i64..4, 6), h in prop::collection::vec(-3i64..4, 6)) {
        let (ext, sub) = laws::fitting_extension_laws(nu, n1, &zg(nu, &f), &zg(nu, &g), &zg(nu, &h), n2);
        prop_assert!(ext);
        prop_assert!(sub);
    }

    #[test]
    fn fitting_index_over_integers(n in 1usize..=3, extra in 0usize..=2, v in prop::collection::vec(-6i64..7, 15)) {
        let m = n + extra;
        let rels: Vec<Vec<i64>> = (0..m).map(|i| v[i * n..(i + 1) * n].to_vec()).collect();
        prop_assert!(laws::fitting_index_is_order(&rels));
    }

    #[test]
    fn reduced_presentation_has_same_fitting_ideal(nu in 1usize..=4, n in 1usize..=2, extra in 0usize..=2,
            v in prop::collection::vec(-3i64..4, 64), diag in prop::collection::vec(1i64..6, 2)) {
        // the scalar relations keep the module finite
        let mut rels: Vec<Vec<ZG>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { ZG::scalar(nu, BigInt::from(diag[i])) } else { ZG::zero(nu) }).collect())
            .collect();
        rels.extend((0..extra).map(|k| (0..n).map(|j| zg(nu, &v[(k * n + j) * 6..(k * n + j) * 6 + 6])).collect()));
        prop_assert!(laws::reduction_preserves_fitting(nu, n, rels));
    }

    #[test]
    fn division_is_exact(nu in 1usize..=6, gd in 0usize..4, hd in 0usize..4, v in prop::collection::vec(-5i64..6, 48)) {
        let mut gc = vec![ZG::one(nu)];
        gc.extend((1..=gd).map(|j| zg(nu, &v[6 * j..6 * j + 6])));
        let hc = (0..=hd).map(|j| zg(nu, &v[24 + 6 * j..24 + 6 * j + 6])).collect();
        prop_assert!(laws::division_recovers_quotient(&ZGPoly::new(nu, gc), &ZGPoly::new(nu, hc)));
    }

    #[test]
    fn hnf_reconstruction_and_canonicity(r in 1usize..5, c in 1usize..5, v in prop::collection::vec(-9i64..10, 16),
            ops in prop::collection::vec((0usize..5, 0usize..5, -3i64..4), 0..8)) {
        let m = matrix(r, c, &v);
        prop_assert!(laws::hnf_reconstructs(&m, &unimodular(r, &ops)));
    }

    #[test]
    fn snf_reconstruction_and_invariance(r in 1usize..5, c in 1usize..5, v in prop::collection::vec(-9i64..10, 16),
            ops in prop::collection::vec((0usize..5, 0usize..5, -3i64..4), 0..8)) {
        let m = matrix(r, c, &v);
        prop_assert!(laws::snf_reconstructs(&m, &unimodular(r, &ops)));
    }

    #[test]
    fn galois_action_is_equivariant(case in 0usize..3, k in 0i64..4, v in prop::collection::vec(0u64..64, 1..7), lead in 1u64..64) {
        let (p, nu) = [(2, 2), (2, 3), (3, 2)][case];
        let ext = make_extension(&Field::prime(p).unwrap(), nu).unwrap();
        let size = ext.field.size();
        let mut f: Vec<u64> = v.iter().map(|x| x % size).collect();
        f.push(1 + lead % (size - 1));
        prop_assert!(laws::galois_equivariance(&ext, &f, k));
        prop_assert!(laws::factorization_multiplies_back(&ext, &f));
    }

    #[test]
    fn discrete_log_inverts_power(case in 0usize..3, x in 1u64..1_000_000) {
        let field = [Field::least(2, 6).unwrap(), Field::least(3, 4).unwrap(), Field::least(5, 3).unwrap()][case].clone();
        let x = 1 + x % (field.size() - 1);
        let g = field.generator();
        let table = DlogTable::new(&*field, g, 1 << 20).unwrap();
        let e = table.dlog(&*field, x).unwrap();
        prop_assert_eq!(field.pow(g, e), x);
        prop_assert_eq!(FiniteMulGroup::order_of(&*field, g), field.size() - 1);
    }
}

#[test]
fn idempotents_match_ramanujan_sums() {
    for nu in 1..=12usize {
        let idem = rational_idempotents(nu);
        for (d, e) in &idem {
            for k in 0..nu {
                let expected = BigRational::new(BigInt::from(ramanujan_sum(*d, k)), BigInt::from(nu));
                assert_eq!(e.coeffs()[k], expected, "nu={nu} d={d} k={k}");
            }
        }
        let total = idem.values().fold(ffstark_core::grpring::QG::zero(nu), |a, e| &a + e);
        assert_eq!(total, ffstark_core::grpring::QG::one(nu));
    }
}
