use num_bigint::BigInt;

use super::*;

fn bi(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[test]
fn hnf_examples() {
    let id = IntMatrix::identity(2);
    let h = hnf(&id);
    assert_eq!(h.h, id);
    assert_eq!(h.u, id);

    let m = IntMatrix::from_i64(&[&[2, 1], &[0, 3]]);
    let h = hnf(&m);
    assert_eq!(h.h, IntMatrix::from_i64(&[&[1, 0], &[3, 6]]));
    assert_eq!(m.mul(&h.u).unwrap(), h.h);
    assert!(is_unimodular(&h.u));

    let z = IntMatrix::zeros(2, 2);
    let h = hnf(&z);
    assert_eq!(h.h, z);
    assert_eq!(h.u, IntMatrix::identity(2));
}

#[test]
fn snf_examples() {
    let s = snf(&IntMatrix::diag(&bi(&[2, 3])));
    assert_eq!(s.d, IntMatrix::diag(&bi(&[1, 6])));
    assert_eq!(snf(&IntMatrix::identity(3)).d, IntMatrix::identity(3));
    assert_eq!(snf(&IntMatrix::zeros(1, 1)).d, IntMatrix::zeros(1, 1));
}

#[test]
fn solve_examples() {
    let a = IntMatrix::from_i64(&[&[2]]);
    let s = solve_integer(&a, &bi(&[4])).unwrap().unwrap();
    assert_eq!(s.x, bi(&[2]));
    assert_eq!(s.kernel.cols(), 0);
    assert!(solve_integer(&a, &bi(&[3])).unwrap().is_none());

    let a = IntMatrix::from_i64(&[&[1, 1]]);
    let s = solve_integer(&a, &bi(&[0])).unwrap().unwrap();
    assert_eq!(s.x, bi(&[0, 0]));
    let k = s.kernel_vectors();
    assert_eq!(k.len(), 1);
    assert!(k[0] == bi(&[1, -1]) || k[0] == bi(&[-1, 1]));

    assert!(solve_integer(&a, &bi(&[1, 2])).is_err());
}

#[test]
fn kernel_and_saturation() {
    let a = IntMatrix::from_i64(&[&[2, 4, 6], &[1, 2, 3]]);
    let k = integer_kernel(&a);
    assert_eq!(k.cols(), 2);
    assert!(a.mul(&k).unwrap().is_zero());
    let s = saturate(&IntMatrix::from_i64(&[&[2], &[4]]));
    assert_eq!(s, IntMatrix::from_i64(&[&[1], &[2]]));
}

#[test]
fn modp_inverse_round_trip() {
    let m = IntMatrix::from_i64(&[&[1, 7], &[3, 2]]);
    let mp = ModPMatrix::from_int(&m, 5, 4);
    let inv = mp.inverse().unwrap();
    assert_eq!(mp.mul(&inv), ModPMatrix::identity(5, 4, 2));
    let sing = ModPMatrix::from_int(&IntMatrix::from_i64(&[&[5, 0], &[0, 1]]), 5, 3);
    assert!(sing.inverse().is_err());
}

#[test]
fn fp_kernel_rank_det() {
    let m = FpMatrix::from_int(&IntMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]), 7);
    assert_eq!(m.rank(), 2);
    assert_eq!(m.det(), 0);
    let k = m.kernel();
    assert_eq!(k.cols(), 1);
    assert!(m.mul(&k).is_zero());
    let n = FpMatrix::from_int(&IntMatrix::from_i64(&[&[2, 1], &[1, 1]]), 7);
    assert_eq!(n.mul(&n.inverse().unwrap()), FpMatrix::identity(7, 2));
    let s = Subspace::span(7, 3, &[vec![1, 0, 1], vec![2, 0, 2], vec![0, 1, 0]]);
    assert_eq!(s.dim(), 2);
    assert_eq!(s.chosen(), &[0, 2]);
    assert_eq!(s.coords(&[3, 4, 3]), Some(vec![3, 4]));
    assert!(!s.contains(&[1, 0, 0]));
}
