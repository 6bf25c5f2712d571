use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;
use smale_ktheory::corpus::{
    generate_corpus, random_int_matrices, shipped_corpus, sweep, CORPUS_MAX_DIM, CORPUS_SEED,
    CORPUS_SIZE,
};
use smale_ktheory::*;

/// Determinant by cofactor expansion; only used on tiny minors.
fn det(m: &[Vec<i64>]) -> BigInt {
    match m.len() {
        0 => BigInt::one(),
        1 => BigInt::from(m[0][0]),
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                BigInt::from(s * m[0][j]) * det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors from determinantal divisors: d_k = gcd of all k×k minors.
fn divisor_oracle(m: &[Vec<i64>]) -> Vec<BigInt> {
    let (r, c) = (m.len(), m[0].len());
    let mut prev = BigInt::one();
    let mut out = Vec::new();
    for k in 1..=r.min(c) {
        let mut g = BigInt::zero();
        for rs in subsets(r, k) {
            for cs in subsets(c, k) {
                let minor: Vec<Vec<i64>> =
                    rs.iter().map(|&i| cs.iter().map(|&j| m[i][j]).collect()).collect();
                g = g.gcd(&det(&minor));
            }
        }
        if g.is_zero() {
            break;
        }
        out.push(&g / &prev);
        prev = g;
    }
    out
}

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-9i64..=9, c), r)
    })
}

proptest! {
    #[test]
    fn snf_matches_determinantal_divisors(rows in small_matrix()) {
        let m = IntMatrix::from_rows(&rows).unwrap();
        let s = smith_normal_form(&m);
        prop_assert!(s.verify());
        prop_assert_eq!(s.diagonal(), divisor_oracle(&rows));
    }

    #[test]
    fn uct_is_an_involution(r0 in 0usize..4, r1 in 0usize..4,
                            t0 in prop::collection::vec(0u64..12, 0..4),
                            t1 in prop::collection::vec(0u64..12, 0..4)) {
        let g0 = AbelianGroup::from_factors(r0, &t0);
        let g1 = AbelianGroup::from_factors(r1, &t1);
        let (h0, h1) = uct_dual(&g0, &g1);
        prop_assert_eq!(uct_dual(&h0, &h1), (g0, g1));
    }

    #[test]
    fn canonical_form_is_order_independent(t in prop::collection::vec(1u64..40, 0..5)) {
        let mut rev = t.clone();
        rev.reverse();
        let g = AbelianGroup::from_factors(0, &t);
        prop_assert_eq!(&g, &AbelianGroup::from_factors(0, &rev));
        let order: u64 = t.iter().product();
        prop_assert_eq!(g.torsion_order(), BigInt::from(order));
        let f = g.invariant_factors();
        prop_assert!(f.windows(2).all(|w| (&w[1] % &w[0]).is_zero()));
    }
}

#[test]
fn snf_self_check_and_transpose_invariance() {
    for m in random_int_matrices(7, 500, 8, 9) {
        let s = smith_normal_form(&m);
        let st = smith_normal_form(&m.transpose());
        assert!(s.verify(), "U M V != D for {m}");
        assert!(st.verify());
        assert_eq!(s.diagonal(), st.diagonal(), "transpose changed the form of {m}");
    }
}

#[test]
fn shipped_corpus_is_reproducible() {
    let shipped = shipped_corpus().unwrap();
    assert_eq!(shipped, generate_corpus(CORPUS_SEED, CORPUS_SIZE, CORPUS_MAX_DIM));
    assert_eq!(shipped.matrices.len(), 100);
    assert!(shipped.matrices.iter().all(|m| m.size() <= 6));
}

#[test]
fn corpus_duality_and_rank_bookkeeping() {
    let corpus = shipped_corpus().unwrap();
    for v in sweep(&corpus.matrices) {
        assert!(v.pass, "duality failed for {:?}: {:?}", v.matrix, v.failures().collect::<Vec<_>>());
        let pv = pv_ranks(&v.matrix);
        assert!(pv.unstable.balanced() && pv.stable.balanced());
        assert_eq!(pv.unstable.k0, v.k_theory.k0_unstable.free_rank());
        assert_eq!(pv.stable.k0, v.k_theory.k0_stable.free_rank());
        assert_eq!(pv.unstable.k1, v.k_theory.k1_unstable.free_rank());
    }
}
