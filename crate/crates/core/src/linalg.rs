//! Sparse exact Gaussian elimination.

use std::collections::{BTreeMap, HashMap};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveError {
    /// Row `row` reduces to `0 = c` with `c ≠ 0`.
    Inconsistent { row: usize },
    /// The listed columns are not determined by the equations.
    Singular { free: Vec<usize> },
}

/// Equations `Σ a_{ic} x_c = b_i` over an exact field, stored row by row.
#[derive(Clone, Debug, Default)]
pub struct SparseSystem<T> {
    n_cols: usize,
    rows: Vec<(BTreeMap<usize, T>, T)>,
}

impl<T: Scalar> SparseSystem<T> {
    pub fn new(n_cols: usize) -> Self {
        SparseSystem {
            n_cols,
            rows: Vec::new(),
        }
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds a row; repeated columns are summed and zero entries dropped.
    pub fn push_row(&mut self, entries: impl IntoIterator<Item = (usize, T)>, rhs: T) {
        let mut row: BTreeMap<usize, T> = BTreeMap::new();
        for (c, a) in entries {
            assert!(c < self.n_cols, "column {c} out of range");
            let slot = row.entry(c).or_insert_with(T::zero);
            *slot += &a;
        }
        row.retain(|_, a| !a.is_zero());
        self.rows.push((row, rhs));
    }

    pub fn rows(&self) -> impl Iterator<Item = (&BTreeMap<usize, T>, &T)> {
        self.rows.iter().map(|(r, b)| (r, b))
    }

    /// The coefficient of column `c` in row `i`.
    pub fn entry(&self, i: usize, c: usize) -> T {
        self.rows[i].0.get(&c).cloned().unwrap_or_else(T::zero)
    }

    /// The unique solution, if there is one.
    pub fn solve(&self) -> Result<Vec<T>, SolveError> {
        let (pivots, order) = self.eliminate()?;
        if pivots.len() < self.n_cols {
            let free = (0..self.n_cols).filter(|c| !pivots.contains_key(c)).collect();
            return Err(SolveError::Singular { free });
        }
        let mut x: Vec<Option<T>> = vec![None; self.n_cols];
        for &c in order.iter().rev() {
            let (row, rhs) = &pivots[&c];
            let mut v = rhs.clone();
            for (k, a) in row {
                if *k != c {
                    let mut t = a.clone();
                    t *= x[*k].as_ref().expect("later pivots are solved first");
                    v -= &t;
                }
            }
            x[c] = Some(v);
        }
        Ok(x.into_iter().map(Option::unwrap).collect())
    }

    /// Row reduction. Each pivot row is normalized and only contains its own
    /// pivot column plus columns whose pivots were created later.
    #[allow(clippy::type_complexity)]
    fn eliminate(
        &self,
    ) -> Result<(HashMap<usize, (BTreeMap<usize, T>, T)>, Vec<usize>), SolveError> {
        let mut pivots: HashMap<usize, (BTreeMap<usize, T>, T)> = HashMap::new();
        let mut rank_of: HashMap<usize, usize> = HashMap::new();
        let mut order = Vec::new();
        for (i, (row, rhs)) in self.rows.iter().enumerate() {
            let mut row = row.clone();
            let mut rhs = rhs.clone();
            loop {
                let next = row
                    .keys()
                    .filter_map(|c| rank_of.get(c).map(|&r| (r, *c)))
                    .min();
                let Some((_, c)) = next else { break };
                let factor = row.remove(&c).unwrap();
                let (prow, prhs) = &pivots[&c];
                for (k, a) in prow {
                    if *k == c {
                        continue;
                    }
                    let mut t = a.clone();
                    t *= &factor;
                    let slot = row.entry(*k).or_insert_with(T::zero);
                    *slot -= &t;
                    if slot.is_zero() {
                        row.remove(k);
                    }
                }
                let mut t = prhs.clone();
                t *= &factor;
                rhs -= &t;
            }
            match row.keys().next().copied() {
                None if rhs.is_zero() => {}
                None => return Err(SolveError::Inconsistent { row: i }),
                Some(c) => {
                    let lead = row[&c].clone();
                    for a in row.values_mut() {
                        *a /= &lead;
                    }
                    rhs /= &lead;
                    rank_of.insert(c, order.len());
                    order.push(c);
                    pivots.insert(c, (row, rhs));
                }
            }
        }
        Ok((pivots, order))
    }
}
