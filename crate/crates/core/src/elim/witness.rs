//! Rank witnesses read off an elimination result.

use crate::algebra::{RatMatrix, SparsePoly};
use crate::{Error, Result};

use super::ElimResult;

/// A rank compared against the target `2ⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Witness {
    pub rank: usize,
    pub target: usize,
}

impl Witness {
    pub fn passed(&self) -> bool {
        self.rank == self.target
    }
}

fn rank_of(polys: &[SparsePoly]) -> usize {
    if polys.iter().all(SparsePoly::is_zero) {
        return 0;
    }
    RatMatrix::from_polys(polys).rank()
}

/// Rank of the `Δ_κ` over the monomial basis of the parameter ring.
pub fn witness_delta_rank(res: &ElimResult, n: usize) -> Witness {
    Witness { rank: rank_of(&res.delta), target: 1 << n }
}

/// Rank of `L₁…L_{2ⁿ}`; independence means the rank is `2ⁿ`.
pub fn witness_l_independence(res: &ElimResult, n: usize) -> Result<Witness> {
    if res.lvec.is_empty() {
        return Err(Error::UnsupportedFamily("no deformation parameter, L is undefined".into()));
    }
    Ok(Witness { rank: rank_of(&res.lvec), target: 1 << n })
}
