//! Concrete hypergroups: Conj(G), Chebyshev, the SU(2) dual, user polynomial rules,
//! SU(n) dominant-weight data and restricted products of these.

mod conj;
mod group;
mod polynomial;
mod sun;

pub(crate) use conj::group_convolve;
pub use conj::{
    as_conj, conj_hypergroup, conj_hypergroup_seeded, conj_quotient, psi_isomorphism_check, ConjClassData,
    ConjHypergroup, PsiReport, DEFAULT_SPOT_SEED,
};
pub use group::{Gf2n, GroupTable, MAX_GROUP_ORDER};
pub use polynomial::{chebyshev, chebyshev_rule, polynomial_hypergroup, su2_dual, su2_rule, PolynomialHypergroup};
pub use sun::{count_with_top, su_n_dominant, DominantWeight};

use crate::error::{HyplabError, Result};
use crate::hypergroups::{restricted_product, Hypergroup, SlotFamily, Slots};

/// Number of SL(2, 2^n) slots materialized by default.
pub const DEFAULT_SL2_SLOTS: u32 = 3;

/// Built-in groups: `s<n>`, `z<n>`, `sl2_<q>` for q = 2, 4, 8, …
pub fn named_group(name: &str) -> Result<GroupTable> {
    let bad = || HyplabError::InvalidParam(format!("unknown group {name:?}"));
    let g = if let Some(q) = name.strip_prefix("sl2_") {
        let q: u32 = q.parse().map_err(|_| bad())?;
        if !q.is_power_of_two() || q < 2 {
            return Err(bad());
        }
        GroupTable::sl2_even(q.trailing_zeros())?
    } else if let Some(n) = name.strip_prefix('s') {
        let n: usize = n.parse().map_err(|_| bad())?;
        let g = GroupTable::symmetric(n)?;
        if n == 3 {
            g.with_class_names(vec!["e".into(), "T".into(), "R".into()])
        } else {
            g
        }
    } else if let Some(n) = name.strip_prefix('z') {
        GroupTable::cyclic(n.parse().map_err(|_| bad())?)?
    } else {
        return Err(bad());
    };
    Ok(g)
}

/// ⊕ of `copies` copies of Conj(G), or countably many when `copies` is `None`.
pub fn conj_power(g: &GroupTable, copies: Option<usize>) -> Result<Hypergroup> {
    let c = conj_hypergroup(g)?;
    Ok(match copies {
        Some(k) => restricted_product(format!("rdp{k}:{}", c.carrier()), Slots::Finite(vec![c; k])),
        None => restricted_product(format!("rdp:{}", c.carrier()), Slots::Repeated(c)),
    })
}

/// ⊕_{n≥1} Conj(SL(2, 2^n)) with the first `slots` components materialized.
pub fn sl2_even_product(slots: u32) -> Result<Hypergroup> {
    if slots == 0 {
        return Err(HyplabError::InvalidParam("need at least one slot".into()));
    }
    let comps = (1..=slots)
        .map(|n| conj_hypergroup(&GroupTable::sl2_even(n)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(crate::hypergroups::restricted_product_family(
        format!("rdp:sl2_even[{slots}]"),
        Slots::Finite(comps),
        SlotFamily::Sl2Even,
    ))
}
