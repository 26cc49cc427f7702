//! Integer linear algebra, cohomology with constant coefficients, normal forms
//! in the dualizing module, and the truncated coinvariant presentation for
//! `Z[1/m] ⋊ Z`.

mod cohomology;
mod lemma16;
pub(crate) mod reducer;
mod snf;
mod solver;

pub use cohomology::{beta2, cohomology_finite_coeffs, Coefficients, CohomologyResult};
pub use lemma16::{gamma_w_coinvariants_check, lemma16_truncation, GammaReport, GammaStatus};
pub use reducer::{dual_module_reducer, DualClass, DualKey, ModuleReducer, ReducerKind};
pub use snf::{invariant_factors, smith_normal_form, smith_normal_form_diagonal, IntMatrix, SmithForm};
pub use solver::{apply_columns, ColumnEchelon, SparseVec};
pub(crate) use solver::axpy;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::groupring::{bigint_from_json, bigint_json};

/// A finitely generated abelian group `Z^gens / rowspace(relations)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbPresentation {
    labels: Vec<String>,
    relations: IntMatrix,
}

impl AbPresentation {
    pub fn new(labels: Vec<String>, relations: IntMatrix) -> Result<Self> {
        if relations.cols() != labels.len() {
            return Err(Error::Malformed(format!(
                "{} relation columns for {} generators",
                relations.cols(),
                labels.len()
            )));
        }
        Ok(AbPresentation { labels, relations })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn generator_count(&self) -> usize {
        self.labels.len()
    }

    pub fn invariant_factors(&self) -> Vec<BigInt> {
        invariant_factors(&self.relations)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.relations.rows())
            .map(|i| Value::Array(self.relations.row(i).iter().map(bigint_json).collect()))
            .collect();
        json!({"labels": self.labels, "relations": rows})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let labels: Vec<String> = v
            .get("labels")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Malformed("missing `labels`".into()))?
            .iter()
            .map(|l| {
                l.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::Malformed("label is not a string".into()))
            })
            .collect::<Result<_>>()?;
        let mut m = IntMatrix::zeros(0, labels.len());
        for row in v
            .get("relations")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Malformed("missing `relations`".into()))?
        {
            let row: Vec<BigInt> = row
                .as_array()
                .ok_or_else(|| Error::Malformed("relation is not a list".into()))?
                .iter()
                .map(bigint_from_json)
                .collect::<Result<_>>()?;
            if row.len() != labels.len() {
                return Err(Error::Malformed("relation has the wrong length".into()));
            }
            m.push_row(row);
        }
        AbPresentation::new(labels, m)
    }
}

/// Torsion-freeness verdict with the invariant factors.
pub fn torsion_free_check(p: &AbPresentation) -> (bool, Vec<BigInt>) {
    let f = p.invariant_factors();
    let ok = f.iter().all(|d| d.is_zero() || d.is_one());
    (ok, f)
}

/// Invariant factors as CSV with columns `index,factor`.
pub fn factors_csv(factors: &[BigInt]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Malformed(e.to_string());
    w.write_record(["index", "factor"]).map_err(io)?;
    for (i, f) in factors.iter().enumerate() {
        w.write_record([i.to_string(), f.to_string()]).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Malformed(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Malformed(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torsion_check_on_small_presentations() {
        let p = AbPresentation::new(vec!["x".into()], IntMatrix::from_i64(&[vec![2]])).unwrap();
        assert_eq!(torsion_free_check(&p), (false, vec![BigInt::from(2)]));
        let p = AbPresentation::new(
            vec!["x".into(), "y".into(), "z".into()],
            IntMatrix::zeros(0, 3),
        )
        .unwrap();
        let (ok, f) = torsion_free_check(&p);
        assert!(ok);
        assert_eq!(f.iter().filter(|d| d.is_zero()).count(), 3);
    }

    #[test]
    fn json_and_csv() {
        let p = AbPresentation::new(
            vec!["x".into(), "y".into()],
            IntMatrix::from_i64(&[vec![1, -3], vec![0, 4]]),
        )
        .unwrap();
        assert_eq!(AbPresentation::from_json(&p.to_json()).unwrap(), p);
        let csv = factors_csv(&p.invariant_factors()).unwrap();
        assert_eq!(csv, "index,factor\n0,1\n1,4\n");
    }
}
