use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

/// Dense integer matrix, row major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigInt>>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.iter().map(|r| {
            r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        })).finish()
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![vec![BigInt::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = BigInt::one();
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        IntMatrix {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            cols,
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i][j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i]
    }

    pub fn push_row(&mut self, row: Vec<BigInt>) {
        assert_eq!(row.len(), self.cols);
        self.data.push(row);
        self.rows += 1;
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j][i] = self.data[i][j].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i][j] += &self.data[i][k] * &other.data[k][j];
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.data[i][j].is_zero()))
    }

    /// Determinant by fraction-free elimination; square matrices only.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        if n == 0 {
            return BigInt::one();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn rank(&self) -> usize {
        smith_normal_form_diagonal(self).iter().filter(|d| !d.is_zero()).count()
    }
}

/// `U·M·V = D` with `D` diagonal, `d_i | d_{i+1}`, `U`, `V` unimodular.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Nonzero diagonal entries, in order.
    pub fn divisors(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d.data[i][i].clone())
            .filter(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.divisors().len()
    }
}

struct Work<'a> {
    a: Vec<Vec<BigInt>>,
    u: Option<&'a mut Vec<Vec<BigInt>>>,
    v: Option<&'a mut Vec<Vec<BigInt>>>,
}

const PAR_THRESHOLD: usize = 64;

impl Work<'_> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if let Some(u) = self.u.as_deref_mut() {
            u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in self.a.iter_mut() {
            r.swap(i, j);
        }
        if let Some(v) = self.v.as_deref_mut() {
            for r in v.iter_mut() {
                r.swap(i, j);
            }
        }
    }

    /// row_i -= q * row_t for each (i, q).
    fn sub_rows(&mut self, t: usize, qs: &[(usize, BigInt)]) {
        fn apply(m: &mut [Vec<BigInt>], t: usize, qs: &[(usize, BigInt)]) {
            let pivot = m[t].clone();
            let mut targets: Vec<(&mut Vec<BigInt>, &BigInt)> = Vec::with_capacity(qs.len());
            let mut qi = qs.iter().peekable();
            for (i, row) in m.iter_mut().enumerate() {
                if let Some((_, q)) = qi.next_if(|(k, _)| *k == i) {
                    targets.push((row, q));
                }
            }
            let work = |(row, q): (&mut Vec<BigInt>, &BigInt)| {
                for (x, p) in row.iter_mut().zip(&pivot) {
                    if !p.is_zero() {
                        *x -= q * p;
                    }
                }
            };
            if targets.len() * pivot.len() > PAR_THRESHOLD * PAR_THRESHOLD {
                targets.into_par_iter().for_each(work);
            } else {
                targets.into_iter().for_each(work);
            }
        }
        apply(&mut self.a, t, qs);
        if let Some(u) = self.u.as_deref_mut() {
            apply(u, t, qs);
        }
    }

    /// col_j -= q * col_t for each (j, q).
    fn sub_cols(&mut self, t: usize, qs: &[(usize, BigInt)]) {
        fn apply(m: &mut [Vec<BigInt>], t: usize, qs: &[(usize, BigInt)]) {
            let work = |row: &mut Vec<BigInt>| {
                if row[t].is_zero() {
                    return;
                }
                let p = row[t].clone();
                for (j, q) in qs {
                    row[*j] -= q * &p;
                }
            };
            if m.len() * qs.len() > PAR_THRESHOLD * PAR_THRESHOLD {
                m.par_iter_mut().for_each(work);
            } else {
                m.iter_mut().for_each(work);
            }
        }
        apply(&mut self.a, t, qs);
        if let Some(v) = self.v.as_deref_mut() {
            apply(v, t, qs);
        }
    }

    fn add_row(&mut self, src: usize, dst: usize) {
        let r = self.a[src].clone();
        for (x, y) in self.a[dst].iter_mut().zip(r) {
            *x += y;
        }
        if let Some(u) = self.u.as_deref_mut() {
            let r = u[src].clone();
            for (x, y) in u[dst].iter_mut().zip(r) {
                *x += y;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        if let Some(u) = self.u.as_deref_mut() {
            for x in u[i].iter_mut() {
                *x = -&*x;
            }
        }
    }

    fn run(&mut self, rows: usize, cols: usize) {
        let n = rows.min(cols);
        let mut t = 0;
        while t < n {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = &self.a[i][j];
                    if !x.is_zero()
                        && best.is_none_or(|(bi, bj)| x.abs() < self.a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let p = self.a[t][t].clone();
                let mut qs = Vec::new();
                for i in (t + 1)..rows {
                    if !self.a[i][t].is_zero() {
                        qs.push((i, self.a[i][t].div_floor(&p)));
                    }
                }
                self.sub_rows(t, &qs);
                let mut qs = Vec::new();
                for j in (t + 1)..cols {
                    if !self.a[t][j].is_zero() {
                        qs.push((j, self.a[t][j].div_floor(&p)));
                    }
                }
                self.sub_cols(t, &qs);
                // a remainder smaller than the pivot becomes the new pivot
                let mut smaller = None;
                for i in (t + 1)..rows {
                    if !self.a[i][t].is_zero() {
                        smaller = Some((i, t));
                        break;
                    }
                }
                if smaller.is_none() {
                    for j in (t + 1)..cols {
                        if !self.a[t][j].is_zero() {
                            smaller = Some((t, j));
                            break;
                        }
                    }
                }
                if let Some((i, j)) = smaller {
                    let mut bi = i;
                    let mut bj = j;
                    for ii in (t + 1)..rows {
                        if !self.a[ii][t].is_zero() && self.a[ii][t].abs() < self.a[bi][bj].abs() {
                            bi = ii;
                            bj = t;
                        }
                    }
                    for jj in (t + 1)..cols {
                        if !self.a[t][jj].is_zero() && self.a[t][jj].abs() < self.a[bi][bj].abs() {
                            bi = t;
                            bj = jj;
                        }
                    }
                    self.swap_rows(t, bi);
                    self.swap_cols(t, bj);
                    continue;
                }
                // divisibility condition on the trailing block
                let p = self.a[t][t].clone();
                let bad = ((t + 1)..rows).find(|&i| {
                    ((t + 1)..cols).any(|j| !self.a[i][j].is_multiple_of(&p))
                });
                match bad {
                    Some(i) => self.add_row(i, t),
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let mut u = IntMatrix::identity(m.rows).data;
    let mut v = IntMatrix::identity(m.cols).data;
    let mut w = Work {
        a: m.data.clone(),
        u: Some(&mut u),
        v: Some(&mut v),
    };
    w.run(m.rows, m.cols);
    let d = IntMatrix {
        rows: m.rows,
        cols: m.cols,
        data: w.a,
    };
    SmithForm {
        d,
        u: IntMatrix {
            rows: m.rows,
            cols: m.rows,
            data: u,
        },
        v: IntMatrix {
            rows: m.cols,
            cols: m.cols,
            data: v,
        },
    }
}

/// Diagonal of the Smith form without tracking transforms.
pub fn smith_normal_form_diagonal(m: &IntMatrix) -> Vec<BigInt> {
    let mut w = Work {
        a: m.data.clone(),
        u: None,
        v: None,
    };
    w.run(m.rows, m.cols);
    (0..m.rows.min(m.cols)).map(|i| w.a[i][i].clone()).collect()
}

/// Invariant factors of `Z^cols / rowspace(m)`: nonzero divisors followed by one
/// zero per free generator.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let mut d: Vec<BigInt> = smith_normal_form_diagonal(m)
        .into_iter()
        .filter(|x| !x.is_zero())
        .collect();
    let rank = d.len();
    d.extend(std::iter::repeat_n(BigInt::zero(), m.cols - rank));
    d
}
