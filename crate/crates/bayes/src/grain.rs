use ebw_core::{History, Scalar, Universe};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct GrainReport {
    pub holds: bool,
    /// First (history, action) in length-then-lexicographic order with ρ(h a) = 0.
    pub witness: Option<(History, usize)>,
}

/// Whether ρ(h a) > 0 for every history shorter than `depth` and every action.
pub fn grain_of_uncertainty<P: Scalar>(rho: &dyn Universe<P>, depth: usize) -> Result<GrainReport> {
    let sig = rho.signature();
    if depth == 0 {
        return Ok(GrainReport { holds: true, witness: None });
    }
    for h in History::all_up_to(depth - 1, sig.n_actions(), sig.n_percepts()) {
        for a in 0..sig.n_actions() {
            if !rho.mass_action(&h, a)?.is_positive() {
                return Ok(GrainReport {
                    holds: false,
                    witness: Some((h, a)),
                });
            }
        }
    }
    Ok(GrainReport { holds: true, witness: None })
}
