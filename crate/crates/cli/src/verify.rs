//! Independent re-validation of solution files using only the instance's
//! distances, colors and requirements.

use colorful_kcenter::fair::Lottery;
use colorful_kcenter::io::{LoadedInstance, SolutionFile};
use colorful_kcenter::model::Instance;
use colorful_kcenter::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Violations(Vec<String>),
}

fn check_centers(inst: &Instance, centers: &[usize], radius: &Rational, label: &str, out: &mut Vec<String>) {
    if let Some(c) = centers.iter().find(|&&c| c >= inst.n()) {
        out.push(format!("{label}: center {c} is not a point"));
        return;
    }
    let mut sorted = centers.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != centers.len() {
        out.push(format!("{label}: repeated center"));
    }
    if sorted.len() > inst.k() {
        out.push(format!("{label}: {} centers exceed k = {}", sorted.len(), inst.k()));
    }
    let coverage = inst.check_feasible(&sorted, radius);
    for (l, color) in inst.colors().iter().enumerate() {
        if coverage.counts[l] < color.demand() {
            out.push(format!(
                "{label}: color {l} has {} points within {} but demands {}",
                coverage.counts[l],
                rational::format(radius),
                color.demand()
            ));
        }
    }
}

fn check_distribution(loaded: &LoadedInstance, radius: &Rational, support: &[Lottery], out: &mut Vec<String>) {
    let inst = loaded.base();
    if support.is_empty() {
        out.push("distribution is empty".into());
        return;
    }
    if let Some(l) = support.iter().find(|l| l.probability < rational::zero()) {
        out.push(format!("negative probability {} on {:?}", rational::format(&l.probability), l.centers));
    }
    let total = rational::sum(support.iter().map(|l| &l.probability));
    if total != rational::one() {
        out.push(format!("probabilities do not sum to 1 (sum is {})", rational::format(&total)));
    }
    let mut reach = vec![rational::zero(); inst.n()];
    for (i, l) in support.iter().enumerate() {
        let before = out.len();
        check_centers(inst, &l.centers, radius, &format!("support set {i}"), out);
        if out.len() > before {
            continue;
        }
        for (u, hit) in inst.covered(&l.centers, radius).into_iter().enumerate() {
            if hit {
                reach[u] += &l.probability;
            }
        }
    }
    match loaded {
        LoadedInstance::Fair(f) => {
            for (u, need) in f.p().iter().enumerate() {
                if reach[u] < *need {
                    out.push(format!(
                        "point {u} is covered with probability {} below its requirement {}",
                        rational::format(&reach[u]),
                        rational::format(need)
                    ));
                }
            }
        }
        LoadedInstance::Colorful(_) => out.push("distribution given for an instance without \"p\"".into()),
    }
}

/// Checks every property the solution file claims.
pub fn verify(loaded: &LoadedInstance, sol: &SolutionFile) -> Verdict {
    let inst = loaded.base();
    let mut out = Vec::new();
    match (&sol.centers, &sol.distribution) {
        (Some(centers), None) => {
            check_centers(inst, centers, &sol.radius, "solution", &mut out);
            if let Some(claimed) = &sol.coverage {
                let actual = inst.check_feasible(centers, &sol.radius);
                for entry in claimed {
                    let real = actual.counts.get(entry.color).copied();
                    let demand = inst.colors().get(entry.color).map(|c| c.demand());
                    if real != Some(entry.covered) || demand != Some(entry.demand) {
                        out.push(format!("coverage entry for color {} does not match the instance", entry.color));
                    }
                }
            }
        }
        (None, Some(support)) => check_distribution(loaded, &sol.radius, support, &mut out),
        (Some(_), Some(_)) => out.push("solution lists both centers and a distribution".into()),
        (None, None) => out.push("solution lists neither centers nor a distribution".into()),
    }
    if let (Some(samples), Some(support)) = (&sol.samples, &sol.distribution) {
        for s in samples {
            if !support.iter().any(|l| &l.centers == s) {
                out.push(format!("sample {s:?} is not in the support"));
            }
        }
    }
    if out.is_empty() {
        Verdict::Ok
    } else {
        Verdict::Violations(out)
    }
}
