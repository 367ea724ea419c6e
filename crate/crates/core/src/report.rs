//! Structural analysis of a loop table, serializable as JSON.

use serde::Serialize;

use crate::perm::{
    inn_is_abelian, inn_is_elementary_abelian_2, inner_mapping_group, multiplication_group,
};
use crate::table::LoopTable;

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub order: usize,
    pub is_associative: bool,
    pub is_commutative: bool,
    pub power_associative: bool,
    pub mu_count: u64,
    pub nucleus_left_size: usize,
    pub nucleus_middle_size: usize,
    pub nucleus_right_size: usize,
    pub nucleus_size: usize,
    pub center_size: usize,
    pub associator_subloop_size: usize,
    pub nilpotency_class: Option<u32>,
    pub inn_abelian: bool,
    pub inn_elementary_abelian_2: bool,
    /// decimal strings (the orders exceed u64 for large degrees)
    pub mlt_order: Option<String>,
    pub inn_order: Option<String>,
}

impl AnalysisReport {
    /// Full structural analysis. Multiplication-group orders are computed
    /// only when `with_mlt` is set (the stabilizer chain dominates runtime).
    pub fn analyze(q: &LoopTable, with_mlt: bool) -> AnalysisReport {
        let nuclei = q.nuclei();
        let center = q.center();
        let assoc = q.associator_subloop();
        let (mlt_order, inn_order) = if with_mlt {
            let mlt = multiplication_group(q);
            let inn = inner_mapping_group(q);
            (Some(mlt.order().to_string()), Some(inn.order().to_string()))
        } else {
            (None, None)
        };
        AnalysisReport {
            order: q.order(),
            is_associative: q.is_associative(),
            is_commutative: q.is_commutative(),
            power_associative: q.is_power_associative(),
            mu_count: q.mu_count(),
            nucleus_left_size: nuclei.left.iter().count(),
            nucleus_middle_size: nuclei.middle.iter().count(),
            nucleus_right_size: nuclei.right.iter().count(),
            nucleus_size: nuclei.full.iter().count(),
            center_size: center.iter().count(),
            associator_subloop_size: assoc.iter().count(),
            nilpotency_class: q.nilpotency_class(),
            inn_abelian: inn_is_abelian(q),
            inn_elementary_abelian_2: inn_is_elementary_abelian_2(q),
            mlt_order,
            inn_order,
        }
    }
}
