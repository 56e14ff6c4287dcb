//! LS-rM*: recursive M*. Conflicts merge agents into groups; each
//! multi-agent group is planned by a recursive sub-search on the
//! restricted instance, and agents replay that plan in the global search
//! until further conflicts force a larger group.

use crate::instance::Instance;
use crate::scalar::TimeScalar;
use crate::search::engine::{Engine, SearchReport, VariantKind};
use crate::search::SearchParams;

/// LS-rM* search over the given instance.
pub fn search_lsrm<T: TimeScalar>(inst: &Instance<T>, params: &SearchParams) -> SearchReport<T> {
    Engine::new(inst, params, VariantKind::Rmstar, "lsrm").run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{four_cycle, line_opposing, line_single};
    use crate::scalar::whole_units;
    use crate::search::{search, Outcome};

    #[test]
    fn lsrm_matches_lsa_on_fixtures() {
        for (d1, d2) in [(1, 1), (1, 2), (2, 3)] {
            let inst = four_cycle::<i64>(d1, d2);
            let params = SearchParams::default();
            let a = search(&inst, &params).solution.unwrap().cost;
            let r = search_lsrm(&inst, &params).solution.unwrap().cost;
            assert_eq!(a, r, "four_cycle({d1},{d2})");
        }
    }

    #[test]
    fn lsrm_single_agent() {
        let inst = line_single::<i64>(2);
        let sol = search_lsrm(&inst, &SearchParams::default()).solution.unwrap();
        assert_eq!(sol.cost, whole_units::<i64>(4));
    }

    #[test]
    fn lsrm_detects_unsolvable() {
        let inst = line_opposing::<i64>(1);
        let report = search_lsrm(&inst, &SearchParams::default());
        assert_eq!(report.stats.outcome, Outcome::Failure);
    }
}
