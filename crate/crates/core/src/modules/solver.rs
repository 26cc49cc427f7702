use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Sparse integer vector keyed by coordinate.
pub type SparseVec = BTreeMap<usize, BigInt>;

pub(crate) fn axpy(y: &mut SparseVec, a: &BigInt, x: &SparseVec) {
    if a.is_zero() {
        return;
    }
    for (k, v) in x {
        let e = y.entry(*k).or_default();
        *e += a * v;
        if e.is_zero() {
            y.remove(k);
        }
    }
}

#[derive(Clone, Debug)]
struct Column {
    entries: SparseVec,
    /// Combination of the input columns this column equals.
    transform: SparseVec,
}

impl Column {
    fn lead(&self) -> Option<usize> {
        self.entries.keys().next().copied()
    }
}

/// Column echelon form of an integer matrix given by sparse columns, built with
/// unimodular column operations. Solves `A x = b` over `Z`.
#[derive(Clone, Debug)]
pub struct ColumnEchelon {
    ncols: usize,
    /// Sorted by leading row.
    pivots: Vec<Column>,
    kernel: Vec<SparseVec>,
}

impl ColumnEchelon {
    pub fn new(columns: Vec<SparseVec>) -> Self {
        let ncols = columns.len();
        let mut by_lead: BTreeMap<usize, Vec<Column>> = BTreeMap::new();
        let mut kernel = Vec::new();
        for (j, entries) in columns.into_iter().enumerate() {
            let col = Column {
                entries,
                transform: SparseVec::from([(j, BigInt::from(1))]),
            };
            match col.lead() {
                Some(r) => by_lead.entry(r).or_default().push(col),
                None => kernel.push(col.transform),
            }
        }
        let mut pivots = Vec::new();
        while let Some((row, mut group)) = by_lead.pop_first() {
            // Euclid on the entries at `row` until a single column is left
            while group.len() > 1 {
                let (pi, _) = group
                    .iter()
                    .enumerate()
                    .min_by(|a, b| {
                        a.1.entries[&row]
                            .abs()
                            .cmp(&b.1.entries[&row].abs())
                            .then(a.0.cmp(&b.0))
                    })
                    .expect("nonempty group");
                let pivot = group.swap_remove(pi);
                let p = pivot.entries[&row].clone();
                let mut keep = vec![pivot];
                for mut c in group.drain(..) {
                    let q = c.entries[&row].div_floor(&p);
                    let nq = -q;
                    axpy(&mut c.entries, &nq, &keep[0].entries);
                    axpy(&mut c.transform, &nq, &keep[0].transform);
                    match c.lead() {
                        Some(r) if r == row => keep.push(c),
                        Some(r) => by_lead.entry(r).or_default().push(c),
                        None => kernel.push(c.transform),
                    }
                }
                group = keep;
            }
            pivots.extend(group);
        }
        ColumnEchelon {
            ncols,
            pivots,
            kernel,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// A basis of the integer kernel.
    pub fn kernel(&self) -> &[SparseVec] {
        &self.kernel
    }

    /// Some `x` with `A x = b`, if one exists over `Z`.
    pub fn solve(&self, b: &SparseVec) -> Option<SparseVec> {
        let mut residual = b.clone();
        let mut x = SparseVec::new();
        for p in &self.pivots {
            let row = p.lead().expect("pivot columns are nonzero");
            match residual.keys().next() {
                None => break,
                Some(&first) if first < row => return None,
                _ => {}
            }
            let Some(v) = residual.get(&row).cloned() else {
                continue;
            };
            let pv = &p.entries[&row];
            if !v.is_multiple_of(pv) {
                return None;
            }
            let q = v / pv;
            axpy(&mut residual, &-&q, &p.entries);
            axpy(&mut x, &q, &p.transform);
        }
        residual.is_empty().then_some(x)
    }

    pub fn contains(&self, b: &SparseVec) -> bool {
        self.solve(b).is_some()
    }
}

/// `A x` for sparse columns.
pub fn apply_columns(columns: &[SparseVec], x: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (j, c) in x {
        axpy(&mut out, c, &columns[*j]);
    }
    out
}
