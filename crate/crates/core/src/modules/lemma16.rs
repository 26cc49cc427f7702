use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

use super::cohomology::beta2;
use super::snf::IntMatrix;
use super::{torsion_free_check, AbPresentation};
use crate::error::{Error, Result};
use crate::foxres::Resolved;
use crate::groupring::bigint_json;
use crate::presentation::{builtin_family, Family};

fn label(k: u64, m: u64, level: u32) -> String {
    if m == 1 {
        return "a_0".into();
    }
    let mut num = k;
    let mut e = level;
    while e > 0 && num.is_multiple_of(m) {
        num /= m;
        e -= 1;
    }
    if e == 0 {
        format!("a_{num}")
    } else {
        format!("a_{num}/{}", m.pow(e))
    }
}

/// Finite stage of the coinvariant presentation for `Z[1/m] ⋊ Z`: generators
/// `a_x` for `x = k / m^level`, `0 <= k < m^(level+1)`; relations
/// `a_z - a_{m-z}` and `a_z - Σ_{i,j} a_{k(i,j) + z/m}` whenever `z/m` is a
/// generator, with `k(i,j) = j - i` for `j >= i` and `j + m - i` otherwise.
pub fn lemma16_truncation(m: i64, level: u32) -> Result<AbPresentation> {
    if m < 1 {
        return Err(Error::InvalidParams("m must be at least 1".into()));
    }
    if level == 0 {
        return Err(Error::TruncationTooSmall(
            "level 0 has no generators".into(),
        ));
    }
    let m = m as u64;
    let scale = m
        .checked_pow(level)
        .and_then(|s| s.checked_mul(m))
        .filter(|&n| n <= 1 << 16)
        .ok_or_else(|| Error::InvalidParams("truncation too large".into()))?;
    // scale = m^(level+1) generators, indexed by the numerator k over m^level
    let n = scale as usize;
    let inner = scale / m;
    let labels: Vec<String> = (0..scale).map(|k| label(k, m, level)).collect();
    let mut rel = IntMatrix::zeros(0, n);
    let mut push = |row: Vec<BigInt>| {
        if row.iter().any(|x| !x.is_zero()) {
            rel.push_row(row);
        }
    };
    for k in 0..scale {
        // a_z - a_{m - z}, indices modulo m
        let mut row = vec![BigInt::zero(); n];
        let mirror = (scale - k) % scale;
        row[k as usize] += 1;
        row[mirror as usize] -= 1;
        push(row);
    }
    for k in (0..scale).step_by(m as usize) {
        // z = k / m^level, z/m = (k/m) / m^level
        let zm = k / m;
        let mut row = vec![BigInt::zero(); n];
        row[k as usize] += 1;
        for i in 0..m {
            for j in 0..m {
                let shift = if j >= i { j - i } else { j + m - i };
                let idx = (shift * inner + zm) % scale;
                row[idx as usize] -= 1;
            }
        }
        push(row);
    }
    AbPresentation::new(labels, rel)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GammaStatus {
    /// Established for every truncation level.
    TorsionFreeKnown,
    /// `β = 0` and the truncated presentation is torsion-free.
    TorsionFreeAtTruncation,
    /// `β > 0`: the exact sequence does not decide the question.
    Inconclusive,
    /// The truncated presentation has torsion.
    TorsionAtTruncation,
}

#[derive(Clone, Debug)]
pub struct GammaReport {
    pub m: i64,
    pub level: u32,
    pub beta: usize,
    pub truncation_torsion_free: bool,
    pub invariant_factors: Vec<BigInt>,
    pub status: GammaStatus,
}

impl GammaReport {
    pub fn verdict(&self) -> &'static str {
        match self.status {
            GammaStatus::TorsionFreeKnown => "torsion-free",
            GammaStatus::TorsionFreeAtTruncation => "torsion-free (proved at truncation)",
            GammaStatus::Inconclusive => "inconclusive",
            GammaStatus::TorsionAtTruncation => "torsion at truncation",
        }
    }

    pub fn note(&self) -> Option<&'static str> {
        match self.status {
            GammaStatus::Inconclusive => Some(
                "H^2(pi;F_2) is nonzero, so the symmetric coinvariants only map onto a \
                 subgroup of the Whitehead quadratic coinvariants; whether those are \
                 torsion-free for odd m remains open",
            ),
            GammaStatus::TorsionAtTruncation => Some(
                "torsion in a truncation whose omitted relations could only add freeness",
            ),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "level": self.level,
            "beta": self.beta,
            "truncation_torsion_free": self.truncation_torsion_free,
            "invariant_factors": self.invariant_factors.iter().map(bigint_json).collect::<Vec<_>>(),
            "verdict": self.verdict(),
            "note": self.note(),
        })
    }
}

/// Torsion-freeness of the quadratic coinvariants of the dualizing module for
/// `Z[1/m] ⋊ Z`, from `β_2(π; F_2)` and the truncated symmetric presentation.
pub fn gamma_w_coinvariants_check(m: i64, level: u32) -> Result<GammaReport> {
    if m < 1 {
        return Err(Error::InvalidParams("m must be at least 1".into()));
    }
    let res = Resolved::from_family(&builtin_family(Family::Bs(m))?)?;
    let beta = beta2(&res)?;
    let (ok, factors) = torsion_free_check(&lemma16_truncation(m, level)?);
    let status = if m == 1 {
        GammaStatus::TorsionFreeKnown
    } else if beta > 0 {
        GammaStatus::Inconclusive
    } else if ok {
        GammaStatus::TorsionFreeAtTruncation
    } else {
        GammaStatus::TorsionAtTruncation
    };
    Ok(GammaReport {
        m,
        level,
        beta,
        truncation_torsion_free: ok,
        invariant_factors: factors,
        status,
    })
}
