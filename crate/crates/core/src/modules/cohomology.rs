use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::snf::{smith_normal_form_diagonal, IntMatrix};
use crate::error::{Error, Result};
use crate::foxres::Resolved;
use crate::groupring::{bigint_json, OrientationChar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficients {
    Integers,
    /// `Z/k`, `k >= 2`.
    Cyclic(u64),
}

impl Coefficients {
    fn describe(&self) -> String {
        match self {
            Coefficients::Integers => "Z".into(),
            Coefficients::Cyclic(k) => format!("Z/{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyResult {
    pub degree: usize,
    pub coefficients: String,
    /// Cyclic factors; `0` stands for `Z`.
    pub factors: Vec<BigInt>,
    pub rank: usize,
    /// Dimension over `F_2` when the coefficients are `Z/2`.
    pub beta: Option<usize>,
}

impl CohomologyResult {
    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree,
            "coefficients": self.coefficients,
            "factors": self.factors.iter().map(bigint_json).collect::<Vec<_>>(),
            "rank": self.rank,
            "beta": self.beta,
        })
    }
}

/// Integer cochain matrices `δ0: C^0 → C^1`, `δ1: C^1 → C^2` for `Z` twisted by `twist`.
fn cochain_matrices(res: &Resolved, twist: &OrientationChar) -> (IntMatrix, IntMatrix) {
    let rank = res.rank();
    let nrel = res.relator_count();
    let mut d0 = IntMatrix::zeros(rank, 1);
    for x in 0..rank {
        d0.set(x, 0, BigInt::from(twist.value(x) as i64 - 1));
    }
    let mut d1 = IntMatrix::zeros(nrel, rank);
    for r in 0..nrel {
        for x in 0..rank {
            d1.set(r, x, res.resolution().fox_entry(r, x).augment(twist));
        }
    }
    (d0, d1)
}

fn nonzero(d: Vec<BigInt>) -> Vec<BigInt> {
    d.into_iter().filter(|x| !x.is_zero()).collect()
}

/// `H^degree(π; coeffs)` where `π` acts on the coefficients through `twist`
/// (trivially when `None`).
pub fn cohomology_finite_coeffs(
    res: &Resolved,
    degree: usize,
    coeffs: Coefficients,
    twist: Option<&OrientationChar>,
) -> Result<CohomologyResult> {
    if degree > 2 {
        return Err(Error::InvalidParams(format!("degree {degree} not in 0..=2")));
    }
    if let Coefficients::Cyclic(k) = coeffs {
        if k < 2 {
            return Err(Error::InvalidParams("cyclic coefficients need k >= 2".into()));
        }
    }
    let trivial = OrientationChar::trivial(res.rank());
    let twist = twist.unwrap_or(&trivial);
    if twist.rank() != res.rank() {
        return Err(Error::InvalidParams("twist has the wrong number of entries".into()));
    }
    for r in res.presentation().relators() {
        if twist.of_word(r) != 1 {
            return Err(Error::Unsupported(
                "coefficient action does not factor through the group".into(),
            ));
        }
    }
    let (d0, d1) = cochain_matrices(res, twist);
    let dims = [1, res.rank(), res.relator_count()];
    // divisors[i]: nonzero Smith divisors of δ_i (δ_2 = 0)
    let divisors = [
        nonzero(smith_normal_form_diagonal(&d0)),
        nonzero(smith_normal_form_diagonal(&d1)),
        Vec::new(),
    ];
    let rank_of = |i: usize| divisors[i].len();
    let free_rank = dims[degree] - rank_of(degree) - if degree > 0 { rank_of(degree - 1) } else { 0 };
    let torsion_here: Vec<BigInt> = if degree > 0 {
        divisors[degree - 1].iter().filter(|d| !d.is_one()).cloned().collect()
    } else {
        Vec::new()
    };
    let torsion_next: Vec<BigInt> = divisors[degree].iter().filter(|d| !d.is_one()).cloned().collect();

    let mut factors = Vec::new();
    match coeffs {
        Coefficients::Integers => {
            factors.extend(torsion_here);
            factors.extend(std::iter::repeat_n(BigInt::zero(), free_rank));
        }
        Coefficients::Cyclic(k) => {
            let k = BigInt::from(k);
            factors.extend(std::iter::repeat_n(k.clone(), free_rank));
            for d in torsion_here.iter().chain(&torsion_next) {
                let g = d.gcd(&k);
                if !g.is_one() {
                    factors.push(g);
                }
            }
        }
    }
    let rank = factors.iter().filter(|d| d.is_zero()).count();
    let beta = matches!(coeffs, Coefficients::Cyclic(2)).then_some(factors.len());
    Ok(CohomologyResult {
        degree,
        coefficients: coeffs.describe(),
        factors,
        rank,
        beta,
    })
}

/// `dim H^2(π; F_2)` with trivial action.
pub fn beta2(res: &Resolved) -> Result<usize> {
    Ok(cohomology_finite_coeffs(res, 2, Coefficients::Cyclic(2), None)?
        .beta
        .expect("mod-2 coefficients"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{builtin_family, Family};

    fn resolved(f: Family) -> Resolved {
        Resolved::from_family(&builtin_family(f).unwrap()).unwrap()
    }

    #[test]
    fn free_group_first_cohomology() {
        let res = resolved(Family::Free(2));
        let h = cohomology_finite_coeffs(&res, 1, Coefficients::Cyclic(2), None).unwrap();
        assert_eq!(h.beta, Some(2));
        let h0 = cohomology_finite_coeffs(&res, 0, Coefficients::Integers, None).unwrap();
        assert_eq!(h0.factors, vec![BigInt::zero()]);
    }

    #[test]
    fn surface_top_cohomology_is_z() {
        let res = resolved(Family::Surface(2));
        let h = cohomology_finite_coeffs(&res, 2, Coefficients::Integers, None).unwrap();
        assert_eq!(h.factors, vec![BigInt::zero()]);
        let h1 = cohomology_finite_coeffs(&res, 1, Coefficients::Integers, None).unwrap();
        assert_eq!(h1.rank, 4);
    }

    #[test]
    fn beta_two_of_bs_groups() {
        assert_eq!(beta2(&resolved(Family::Bs(2))).unwrap(), 0);
        assert_eq!(beta2(&resolved(Family::Bs(3))).unwrap(), 1);
        let h = cohomology_finite_coeffs(&resolved(Family::Bs(4)), 2, Coefficients::Integers, None).unwrap();
        assert_eq!(h.factors, vec![BigInt::from(3)]);
    }

    #[test]
    fn twisted_coefficients() {
        let res = resolved(Family::Bs(2));
        let w = OrientationChar::new(vec![1, -1]);
        // H^0 with a nontrivial action vanishes
        let h0 = cohomology_finite_coeffs(&res, 0, Coefficients::Integers, Some(&w)).unwrap();
        assert!(h0.factors.is_empty());
        let bad = OrientationChar::new(vec![-1, 1]);
        assert!(matches!(
            cohomology_finite_coeffs(&res, 1, Coefficients::Integers, Some(&bad)),
            Err(Error::Unsupported(_))
        ));
    }
}
