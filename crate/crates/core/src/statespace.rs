//! Fermat models and their extended and narrow state spaces.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::frac;
use crate::Rat;

/// The combinatorial shadow of a Fermat polynomial `W`: its degree `d` and
/// weights `w_j`, with charges `q_j = w_j / d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FermatModel {
    d: u32,
    weights: Vec<u32>,
    name: Option<String>,
}

impl FermatModel {
    /// Checks `w_j | d` for every `j` and `gcd(w_1, …, w_N, d) = 1`.
    pub fn new(d: u32, weights: Vec<u32>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidModel("d must be positive".into()));
        }
        if weights.is_empty() {
            return Err(Error::InvalidModel("at least one weight is required".into()));
        }
        if let Some(&w) = weights.iter().find(|&&w| w == 0) {
            return Err(Error::InvalidModel(format!("weight {w} is not positive")));
        }
        if let Some(&w) = weights.iter().find(|&&w| !d.is_multiple_of(w)) {
            return Err(Error::NotFermat { d, weight: w });
        }
        let g = weights.iter().fold(d, |g, &w| g.gcd(&w));
        if g != 1 {
            return Err(Error::InvalidModel(format!(
                "gcd(w_1, …, w_N, d) = {g}, expected 1"
            )));
        }
        Ok(FermatModel {
            d,
            weights,
            name: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// `x_1^5 + … + x_5^5`.
    pub fn quintic() -> Self {
        FermatModel::new(5, vec![1; 5]).unwrap().with_name("quintic")
    }

    /// `x_1^3 + x_2^3 + x_3^3`.
    pub fn cubic() -> Self {
        FermatModel::new(3, vec![1; 3]).unwrap().with_name("cubic")
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn n_vars(&self) -> usize {
        self.weights.len()
    }

    pub fn charge(&self, j: usize) -> Rat {
        Rat::new(self.weights[j].into(), self.d.into())
    }

    pub fn charges(&self) -> Vec<Rat> {
        (0..self.n_vars()).map(|j| self.charge(j)).collect()
    }

    /// `q = Σ q_j`; the Calabi–Yau case is `q = 1`.
    pub fn total_charge(&self) -> Rat {
        self.charges().into_iter().fold(Rat::zero(), |a, b| a + b)
    }

    pub fn is_narrow(&self, k: usize) -> bool {
        k < self.d as usize
            && self
                .charges()
                .iter()
                .all(|qj| !frac(&(qj * Rat::from_integer((k as i64 + 1).into()))).is_zero())
    }

    pub fn narrow_set(&self) -> NarrowSector {
        NarrowSector {
            indices: (0..self.d as usize).filter(|&k| self.is_narrow(k)).collect(),
        }
    }

    fn require_narrow(&self, k: usize) -> Result<()> {
        if k >= self.d as usize {
            return Err(Error::IndexOutOfRange { index: k, d: self.d });
        }
        if !self.is_narrow(k) {
            return Err(Error::NotNarrow { index: k });
        }
        Ok(())
    }

    /// `(φ_i, φ_j) = δ_{i+j, d−2}` on narrow indices.
    pub fn pairing(&self, i: usize, j: usize) -> Result<Rat> {
        self.require_narrow(i)?;
        self.require_narrow(j)?;
        Ok(if i + j + 2 == self.d as usize {
            Rat::one()
        } else {
            Rat::zero()
        })
    }

    /// Index of the dual basis vector: `φ^k = φ_{d−2−k}`.
    pub fn dual_index(&self, k: usize) -> Result<usize> {
        self.require_narrow(k)?;
        // k ≤ d−2 for every narrow k, since k = d−1 gives ⟨q_j d⟩ = 0.
        Ok(self.d as usize - 2 - k)
    }

    /// `φ_i · φ_j = φ_{i+j mod d}`.
    pub fn mult_index(&self, i: usize, j: usize) -> usize {
        (i + j) % self.d as usize
    }

    /// `l = s · (d/w_j) + r` with `0 ≤ r < d/w_j`.
    pub fn split_l(&self, l: usize, j: usize) -> Result<(usize, usize)> {
        if l >= self.d as usize {
            return Err(Error::IndexOutOfRange { index: l, d: self.d });
        }
        let w = *self
            .weights
            .get(j)
            .ok_or_else(|| Error::InvalidModel(format!("no coordinate {j}")))?;
        let block = (self.d / w) as usize;
        Ok((l / block, l % block))
    }

    /// `Σ_k v_k · w_{d−2−k}`; both supports must be narrow.
    pub fn pair_vectors<S>(&self, v: &StateVector<S>, w: &StateVector<S>) -> Result<S>
    where
        S: Clone + Zero + for<'a> Mul<&'a S, Output = S> + Add<Output = S>,
    {
        for k in v.keys().chain(w.keys()) {
            self.require_narrow(k)?;
        }
        let mut acc = S::zero();
        for (k, a) in v.iter() {
            if let Some(b) = w.get(self.d as usize - 2 - k) {
                acc = acc + a.clone() * b;
            }
        }
        Ok(acc)
    }
}

/// The narrow indices `{k : ⟨q_j(k+1)⟩ ≠ 0 for all j}`, in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NarrowSector {
    pub indices: Vec<usize>,
}

impl NarrowSector {
    pub fn contains(&self, k: usize) -> bool {
        self.indices.binary_search(&k).is_ok()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }
}

/// A vector `Σ_k c_k φ_k` in the extended state space. Zero coefficients are
/// not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<S> {
    coeffs: BTreeMap<usize, S>,
}

impl<S: Clone + Zero> StateVector<S> {
    pub fn new() -> Self {
        StateVector {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn basis(k: usize, c: S) -> Self {
        let mut v = Self::new();
        v.set(k, c);
        v
    }

    pub fn set(&mut self, k: usize, c: S) {
        if c.is_zero() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, c);
        }
    }

    pub fn get(&self, k: usize) -> Option<&S> {
        self.coeffs.get(&k)
    }

    pub fn keys(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &S)> {
        self.coeffs.iter().map(|(&k, c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<S: Clone + Zero> Default for StateVector<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Clone + Zero> FromIterator<(usize, S)> for StateVector<S> {
    fn from_iter<I: IntoIterator<Item = (usize, S)>>(iter: I) -> Self {
        let mut v = Self::new();
        for (k, c) in iter {
            let c = match v.coeffs.remove(&k) {
                Some(prev) => prev + c,
                None => c,
            };
            v.set(k, c);
        }
        v
    }
}
