use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::presentation::Word;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaReport {
    /// Matrix of `α^*` on `H^1(F(s); F_2)` in the dual basis.
    pub matrix: Vec<Vec<u8>>,
    pub dimension: usize,
    /// Indices `i` whose dual basis vectors `x_i^*` span a complement of
    /// the image of `α^* - 1`.
    pub coset_basis: Vec<usize>,
}

impl DeltaReport {
    pub fn to_json(&self, names: &[String]) -> Value {
        json!({
            "matrix": self.matrix,
            "dimension": self.dimension,
            "coset_basis": self.coset_basis.iter().map(|&i| format!("{}*", names[i])).collect::<Vec<_>>(),
        })
    }
}

/// `dim H^1(F(s); F_2) / (α - 1)` for the endomorphism sending generator `i`
/// to `images[i]`.
pub fn delta_invariant(rank: usize, images: &[Word]) -> Result<DeltaReport> {
    if images.len() != rank {
        return Err(Error::InvalidParams(format!(
            "{} images for a free group of rank {rank}",
            images.len()
        )));
    }
    if let Some(g) = images.iter().filter_map(Word::max_generator).max().filter(|&g| g >= rank) {
        return Err(Error::InvalidParams(format!("image uses generator {g} outside rank {rank}")));
    }
    // α on H_1 has column i = exponent sums of images[i]; on H^1 it is the transpose
    let sums: Vec<Vec<i64>> = images.iter().map(|w| w.exponent_sums(rank)).collect();
    let matrix: Vec<Vec<u8>> = (0..rank)
        .map(|i| (0..rank).map(|j| sums[i][j].rem_euclid(2) as u8).collect())
        .collect();
    // columns of α^* - 1
    let mut cols: Vec<Vec<u8>> = (0..rank)
        .map(|j| (0..rank).map(|i| matrix[j][i] ^ u8::from(i == j)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for r in 0..rank {
        let Some(k) = (row..cols.len()).find(|&k| cols[k][r] == 1) else {
            continue;
        };
        cols.swap(row, k);
        let pivot = cols[row].clone();
        for (k, c) in cols.iter_mut().enumerate() {
            if k != row && c[r] == 1 {
                for (a, b) in c.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        pivots.push(r);
        row += 1;
    }
    let coset_basis: Vec<usize> = (0..rank).filter(|i| !pivots.contains(i)).collect();
    Ok(DeltaReport {
        matrix,
        dimension: coset_basis.len(),
        coset_basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(g: usize) -> Word {
        Word::letter(g, 1)
    }

    #[test]
    fn identity_keeps_everything() {
        let r = delta_invariant(3, &[gen(0), gen(1), gen(2)]).unwrap();
        assert_eq!(r.dimension, 3);
        assert_eq!(r.coset_basis, vec![0, 1, 2]);
    }

    #[test]
    fn swap_and_shear() {
        assert_eq!(delta_invariant(2, &[gen(1), gen(0)]).unwrap().dimension, 1);
        let shear = delta_invariant(2, &[gen(0).concat(&gen(1)), gen(1)]).unwrap();
        assert_eq!(shear.dimension, 1);
        assert_eq!(shear.matrix, vec![vec![1, 1], vec![0, 1]]);
    }

    #[test]
    fn squares_vanish_mod_two() {
        let sq = gen(0).concat(&gen(0));
        assert_eq!(delta_invariant(1, &[sq]).unwrap().dimension, 0);
        assert!(delta_invariant(1, &[gen(1)]).is_err());
    }
}
