//! Energy-gap metric, Vietoris-Rips feasibility on voxel indices, choice of
//! the working tolerance `eps_star` and mid-range summaries.

use crate::error::{Error, Result};
use crate::field::VoxelField;
use crate::poly::PiecewisePolynomial;
use crate::rational::{midpoint, Q};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

/// Energies `f(X_i)` of every voxel in flat order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnergyCache {
    values: Vec<Q>,
}

impl EnergyCache {
    /// Wraps precomputed energies.
    pub fn from_values(values: Vec<Q>) -> Self {
        EnergyCache { values }
    }

    /// Evaluates `f` on every voxel vector. Evaluation fans out over worker
    /// threads; the result does not depend on their number.
    pub fn build(field: &VoxelField, f: &PiecewisePolynomial) -> Result<Self> {
        if f.dim() != field.d() {
            return Err(Error::DimensionMismatch(format!(
                "function takes {} variables but vectors have {} entries",
                f.dim(),
                field.d()
            )));
        }
        let values = (0..field.n()).into_par_iter().map(|i| f.eval(field.vector(i))).collect::<Result<Vec<_>>>()?;
        Ok(EnergyCache { values })
    }

    /// Energies in flat order.
    pub fn values(&self) -> &[Q] {
        &self.values
    }

    /// Number of voxels.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when there are no voxels.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Energy gap `|f(X_i) - f(X_j)|` between two voxels (0-based indices).
    pub fn d_f(&self, i: usize, j: usize) -> Result<Q> {
        let n = self.values.len();
        let get = |t: usize| {
            self.values.get(t).ok_or_else(|| Error::IndexOutOfRange(format!("voxel {t} not in 0..{n}")))
        };
        Ok((get(i)? - get(j)?).abs())
    }

    /// Largest gap strictly below `bound` over pairs of distinct voxels,
    /// with one pair attaining it; `None` when no pair qualifies.
    pub fn big_pairwise_below(&self, bound: &Q) -> Option<(Q, (usize, usize))> {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&a, &b| self.values[a].cmp(&self.values[b]).then(a.cmp(&b)));
        let mut best: Option<(Q, (usize, usize))> = None;
        let mut hi = 0;
        for lo in 0..order.len() {
            hi = hi.max(lo);
            while hi + 1 < order.len() && &(&self.values[order[hi + 1]] - &self.values[order[lo]]) < bound {
                hi += 1;
            }
            if hi > lo {
                let gap = &self.values[order[hi]] - &self.values[order[lo]];
                if best.as_ref().is_none_or(|(b, _)| gap > *b) {
                    let (a, b) = (order[lo].min(order[hi]), order[lo].max(order[hi]));
                    best = Some((gap, (a, b)));
                }
            }
        }
        best
    }

    /// Working tolerance for error bound `eps`: half the largest gap below
    /// `2 eps`, or `eps / 2` when no positive gap lies below `2 eps`.
    pub fn select_epsilon_star(&self, eps: &Q) -> Result<EpsilonStar> {
        if !(eps > &Q::zero() && eps < &Q::one()) {
            return Err(Error::InvalidArgument(format!("eps = {eps} must lie in (0, 1)")));
        }
        let bound = eps * Q::from_integer(2.into());
        match self.big_pairwise_below(&bound) {
            Some((gap, pair)) if gap > Q::zero() => Ok(EpsilonStar { value: gap / Q::from_integer(2.into()), source_pair: Some(pair) }),
            _ => Ok(EpsilonStar { value: eps / Q::from_integer(2.into()), source_pair: None }),
        }
    }

    fn span<'a>(&'a self, members: &[usize]) -> Result<(&'a Q, &'a Q)> {
        let first = members.first().ok_or_else(|| Error::InvalidArgument("empty cluster".into()))?;
        let n = self.values.len();
        let get = |t: usize| {
            self.values.get(t).ok_or_else(|| Error::IndexOutOfRange(format!("voxel {t} not in 0..{n}")))
        };
        let mut lo = get(*first)?;
        let mut hi = lo;
        for &m in members {
            let v = get(m)?;
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        Ok((lo, hi))
    }

    /// True when the energy diameter of `members` is at most `threshold`.
    pub fn cluster_feasible(&self, members: &[usize], threshold: &Q) -> Result<bool> {
        let (lo, hi) = self.span(members)?;
        Ok(&(hi - lo) <= threshold)
    }

    /// Mid-range `(max + min) / 2` of the energies of `members`, which must
    /// have diameter at most `2 eps_star`.
    pub fn mid_range(&self, members: &[usize], eps_star: &Q) -> Result<Q> {
        let (lo, hi) = self.span(members)?;
        if hi - lo > eps_star * Q::from_integer(2.into()) {
            return Err(Error::InvariantViolation(format!("cluster diameter {} exceeds 2 eps_star", hi - lo)));
        }
        Ok(midpoint(lo, hi))
    }
}

/// The working tolerance and the voxel pair whose gap defines it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonStar {
    pub value: Q,
    pub source_pair: Option<(usize, usize)>,
}
