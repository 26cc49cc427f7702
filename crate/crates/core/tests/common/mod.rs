#![allow(dead_code)]

use cupfox::foxres::Resolved;
use cupfox::groupring::RingElt;
use cupfox::modules::IntMatrix;
use cupfox::presentation::{builtin_family, Family, GroupElement, Letter, Word};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::Rng;

pub fn resolved(f: Family) -> Resolved {
    Resolved::from_family(&builtin_family(f).unwrap()).unwrap()
}

pub fn random_word(rng: &mut impl Rng, rank: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::from_letters(
        (0..len)
            .map(|_| Letter::new(rng.gen_range(0..rank), rng.gen_bool(0.5)))
            .collect(),
    )
}

pub fn random_element(rng: &mut impl Rng, res: &Resolved, max_len: usize) -> GroupElement {
    let w = random_word(rng, res.rank(), max_len);
    res.rewriting().normal_form(&w).unwrap()
}

pub fn random_ring_elt(rng: &mut impl Rng, res: &Resolved, terms: usize, max_len: usize) -> RingElt {
    let mut out = RingElt::zero();
    for _ in 0..rng.gen_range(0..=terms) {
        out.add_term(random_element(rng, res, max_len), BigInt::from(rng.gen_range(-3i64..=3)));
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n)
        .flat_map(|last| {
            subsets(last, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

/// gcd of all `k × k` minors.
pub fn minors_gcd(m: &IntMatrix, k: usize) -> BigInt {
    let mut g = BigInt::zero();
    for rs in subsets(m.rows(), k) {
        for cs in subsets(m.cols(), k) {
            let sub = IntMatrix::from_rows(
                rs.iter().map(|&i| cs.iter().map(|&j| m.get(i, j).clone()).collect()).collect(),
                k,
            );
            g = g.gcd(&sub.determinant());
        }
    }
    g
}
