//! Independent oracles for the resolution, the closed-form diagonals and the
//! mod-2 data.

mod common;

use std::collections::BTreeMap;

use cupfox::diagonal::{builtin_candidate, verify_j2, PBasis, QBasis, TensorElt};
use cupfox::foxres::{fox_derivative, Resolved};
use cupfox::groupring::RingElt;
use cupfox::modules::{beta2, smith_normal_form, IntMatrix};
use cupfox::presentation::{Family, Word};
use common::{minors_gcd, resolved};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

type FreeElt = BTreeMap<Vec<(usize, bool)>, i64>;


fn reduce(mut w: Vec<(usize, bool)>) -> Vec<(usize, bool)> {
    let mut out: Vec<(usize, bool)> = Vec::new();
    for l in w.drain(..) {
        if out.last() == Some(&(l.0, !l.1)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn add_into(acc: &mut FreeElt, g: Vec<(usize, bool)>, c: i64) {
    let e = acc.entry(reduce(g)).or_insert(0);
    *e += c;
    if *e == 0 {
        acc.retain(|_, v| *v != 0);
    }
}

/// `∂(uv) = ∂u + u ∂v`, splitting in half.
fn fox_by_halves(w: &[(usize, bool)], x: usize) -> FreeElt {
    let mut out = FreeElt::new();
    match w.len() {
        0 => {}
        1 => {
            let (g, inv) = w[0];
            if g == x {
                if inv {
                    add_into(&mut out, vec![(g, true)], -1);
                } else {
                    add_into(&mut out, vec![], 1);
                }
            }
        }
        n => {
            let (u, v) = w.split_at(n / 2);
            out = fox_by_halves(u, x);
            for (g, c) in fox_by_halves(v, x) {
                let mut word = u.to_vec();
                word.extend(g);
                add_into(&mut out, word, c);
            }
        }
    }
    out
}

fn letters(w: &Word) -> Vec<(usize, bool)> {
    w.letters().iter().map(|l| (l.generator(), l.is_inverse())).collect()
}

fn as_free(x: &RingElt) -> FreeElt {
    x.terms()
        .map(|(g, c)| (letters(g.word()), i64::try_from(c.clone()).unwrap()))
        .collect()
}

#[test]
fn fox_derivatives_match_the_product_rule_oracle() {
    let rank = 3;
    let mut words = vec![Word::identity()];
    // a fixed spread of words, including cancelling and repeated letters
    for seed in 0u64..200 {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let len = (seed % 13) as usize;
        let mut ls = Vec::new();
        for _ in 0..len {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let k = (s >> 33) % (2 * rank as u64);
            ls.push(cupfox::presentation::Letter::new((k / 2) as usize, k % 2 == 1));
        }
        words.push(Word::from_letters(ls));
    }
    for w in &words {
        for x in 0..rank {
            let ours = as_free(&fox_derivative(w, x, rank).unwrap());
            assert_eq!(ours, fox_by_halves(&letters(w), x), "{w:?} / {x}");
        }
    }
}

#[test]
fn resolution_entries_match_the_oracle() {
    for f in [
        Family::FreeByZ(2),
        Family::TorusKnot(2, 3),
        Family::Surface(2),
        Family::Bs(2),
        Family::Bs(-3),
    ] {
        let res = resolved(f);
        let fox = res.resolution();
        for (r, rel) in res.presentation().relators().iter().enumerate() {
            for x in 0..res.rank() {
                assert_eq!(as_free(fox.free_fox_entry(r, x)), fox_by_halves(&letters(rel), x), "{f}");
            }
        }
    }
}

#[test]
fn bs2_boundary_by_hand() {
    // ∂p2 = (t - 1 - a) p1_a + (1 - a^2) p1_t
    let res = resolved(Family::Bs(2));
    let rs = res.rewriting();
    let p = res.presentation();
    let elt = |terms: &[(&str, i64)]| {
        let mut out = RingElt::zero();
        for (w, c) in terms {
            out.add_term(rs.normal_form(&p.parse_word(w).unwrap()).unwrap(), BigInt::from(*c));
        }
        out
    };
    assert_eq!(res.resolution().fox_entry(0, 0), &elt(&[("t", 1), ("1", -1), ("a", -1)]));
    assert_eq!(res.resolution().fox_entry(0, 1), &elt(&[("1", 1), ("a^2", -1)]));
}

/// Closed forms written out term by term: `1 ⊗ 1* - Σ g_x (p1_x ⊗ q1_x) - Σ u_r (p2_r ⊗ q0_r)`.
fn closed_form(res: &Resolved, gens: &[(&str, &str)], units: &[&str]) -> TensorElt {
    let rs = res.rewriting();
    let p = res.presentation();
    let el = |s: &str| rs.normal_form(&p.parse_word(s).unwrap()).unwrap();
    let mut t = TensorElt::basis(PBasis::P0, QBasis::Top);
    for (x, g) in gens {
        let i = p.generator_index(x).unwrap();
        t.add_term(PBasis::P1(i), QBasis::Q1(i), el(g), el(g), BigInt::from(-1));
    }
    for (r, u) in units.iter().enumerate() {
        t.add_term(PBasis::P2(r), QBasis::Q0(r), el(u), el(u), BigInt::from(-1));
    }
    t
}

#[test]
fn worked_examples_match_and_verify() {
    let cases: Vec<(Family, Vec<(&str, &str)>, Vec<&str>)> = vec![
        (Family::FreeByZ(1), vec![("t", "t^-1"), ("x", "x^-1")], vec!["x^-1 t^-1"]),
        (
            Family::FreeByZ(2),
            vec![("t", "t^-1"), ("x1", "x1^-1"), ("x2", "x2^-1")],
            vec!["x1^-1 t^-1", "x2^-1 t^-1"],
        ),
        (Family::TorusKnot(2, 3), vec![("a", "a^-1"), ("b", "b^-1")], vec!["a^-2"]),
        (Family::TorusKnot(3, 4), vec![("a", "a^-1"), ("b", "b^-1")], vec!["a^-3"]),
        (
            Family::Surface(2),
            vec![("a", "a^-1"), ("b", "b^-1"), ("c", "c^-1"), ("d", "d^-1")],
            vec!["b a b^-1 a^-1"],
        ),
        (Family::Bs(2), vec![("a", "a^-1"), ("t", "t^-1")], vec!["a^-1 t^-1"]),
        (Family::Bs(3), vec![("a", "a^-1"), ("t", "t^-1")], vec!["a^-1 t^-1"]),
    ];
    for (f, gens, units) in cases {
        let res = resolved(f);
        let hand = closed_form(&res, &gens, &units);
        assert_eq!(builtin_candidate(&res).unwrap(), hand, "{f}");
        let rep = verify_j2(&res, &hand).unwrap();
        assert!(rep.pass, "{f}: {} defect terms", rep.defect.len());
    }
}

/// Relator exponent sums give the augmented Fox matrix; its rank mod 2 is the
/// number of odd invariant factors.
fn beta2_by_exponent_sums(res: &Resolved) -> usize {
    let rank = res.rank();
    let rows: Vec<Vec<i64>> = res.presentation().relators().iter().map(|r| r.exponent_sums(rank)).collect();
    let m = IntMatrix::from_i64(&rows);
    let odd = smith_normal_form(&m)
        .divisors()
        .iter()
        .filter(|d| d.is_odd())
        .count();
    res.relator_count() - odd
}

#[test]
fn beta2_matches_the_mod_two_oracle() {
    for f in [
        Family::Bs(1),
        Family::Bs(2),
        Family::Bs(3),
        Family::Bs(4),
        Family::Bs(5),
        Family::Bs(6),
        Family::Bs(-3),
        Family::TorusKnot(2, 3),
        Family::TorusKnot(3, 4),
        Family::Surface(2),
        Family::FreeByZ(2),
    ] {
        let res = resolved(f);
        assert_eq!(beta2(&res).unwrap(), beta2_by_exponent_sums(&res), "{f}");
    }
}

#[test]
fn smith_divisors_match_determinantal_divisors() {
    let samples = [
        vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]],
        vec![vec![1, 2], vec![3, 4], vec![5, 6]],
        vec![vec![0, 0], vec![0, 0]],
        vec![vec![6, 0, 0, 0], vec![0, 10, 0, 0], vec![0, 0, 15, 0]],
    ];
    for rows in samples {
        let m = IntMatrix::from_i64(&rows);
        let d = smith_normal_form(&m).divisors();
        let mut prod = BigInt::one();
        for k in 1..=m.rows().min(m.cols()) {
            let g = minors_gcd(&m, k);
            if k <= d.len() {
                prod *= &d[k - 1];
                assert_eq!(prod, g, "{rows:?} k={k}");
            } else {
                assert!(g.is_zero(), "{rows:?} k={k}");
            }
        }
    }
}
