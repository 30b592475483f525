//! Exhaustive reference solvers.

use crate::colorful::subset_count;
use crate::dp::next_combination;
use crate::error::{Error, Result};
use crate::fair::{enumerate_family, solve_plp, Distribution};
use crate::model::{CenterSet, FairInstance, Instance};

pub const DEFAULT_CAP: u128 = 10_000_000;

/// Smallest candidate radius with a feasible set of at most `k` centers,
/// and the first such set (by size, then lexicographically).
pub fn brute_force_colorful(inst: &Instance, cap: u128) -> Result<Option<CenterSet>> {
    let count = subset_count(inst.n(), inst.k());
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    for r in inst.candidate_radii() {
        for size in 0..=inst.k().min(inst.n()) {
            let mut combo: Vec<usize> = (0..size).collect();
            loop {
                if inst.check_feasible(&combo, &r).feasible {
                    return Ok(Some(CenterSet::new(combo, r)));
                }
                if !next_combination(&mut combo, inst.n()) {
                    break;
                }
            }
        }
    }
    Ok(None)
}

/// Smallest candidate radius whose full lottery program is feasible.
pub fn brute_force_fair(finst: &FairInstance, cap: u128) -> Result<Option<Distribution>> {
    for r in finst.base().candidate_radii() {
        let family = enumerate_family(finst.base(), &r, cap)?;
        if let Some(d) = solve_plp(finst, &r, &family)? {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::fixture_appendix_b;
    use crate::model::ColorClass;
    use crate::rational::{int, ratio, Rational};

    #[test]
    fn fixture_optimum_is_one() {
        let fx = fixture_appendix_b(100).unwrap();
        assert_eq!(brute_force_colorful(&fx.instance, DEFAULT_CAP).unwrap().unwrap().radius, int(1));
    }

    #[test]
    fn zero_demand_needs_nothing() {
        let inst = Instance::on_line(&[int(0), int(4)], 1, vec![ColorClass::new(vec![0, 1], 0)]).unwrap();
        let c = brute_force_colorful(&inst, DEFAULT_CAP).unwrap().unwrap();
        assert_eq!(c, CenterSet::new(vec![], int(0)));
    }

    #[test]
    fn fair_examples() {
        let coords: Vec<Rational> = vec![int(0), int(2)];
        let base = Instance::on_line(&coords, 1, vec![ColorClass::new(vec![0, 1], 0)]).unwrap();
        let f = FairInstance::new(base.clone(), vec![ratio(3, 4), ratio(3, 4)]).unwrap();
        assert_eq!(brute_force_fair(&f, DEFAULT_CAP).unwrap().unwrap().radius, int(2));
        let f = FairInstance::new(base, vec![int(0), int(0)]).unwrap();
        assert_eq!(brute_force_fair(&f, DEFAULT_CAP).unwrap().unwrap().radius, int(0));
        let single = Instance::on_line(&[int(5)], 1, vec![ColorClass::new(vec![0], 1)]).unwrap();
        let f = FairInstance::new(single, vec![int(1)]).unwrap();
        assert_eq!(brute_force_fair(&f, DEFAULT_CAP).unwrap().unwrap().radius, int(0));
    }

    #[test]
    fn cap_is_reported() {
        let fx = fixture_appendix_b(100).unwrap();
        assert!(matches!(brute_force_colorful(&fx.instance, 10), Err(Error::CapExceeded { .. })));
    }
}
