//! JSON encodings of instances and solutions.
//!
//! Rationals are always `"p/q"` strings on output; integers are accepted on
//! input. Output is pretty-printed with a trailing newline and contains no
//! timing data, so equal inputs give byte-identical files.

use serde::{Deserialize, Serialize};

use crate::colorful::ColorfulSolution;
use crate::error::{Error, Result};
use crate::fair::{FairSolution, Lottery};
use crate::model::{CenterSet, ColorClass, FairInstance, Instance};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorEntry {
    pub members: Vec<usize>,
    pub demand: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    #[serde(with = "rational::serde_matrix")]
    pub dist: Vec<Vec<Rational>>,
    pub k: usize,
    pub colors: Vec<ColorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_vec")]
    pub p: Option<Vec<Rational>>,
}

mod opt_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => rational::serde_vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Rational>>, D::Error> {
        rational::serde_vec::deserialize(d).map(Some)
    }
}

/// A loaded instance, fair when the file carries `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadedInstance {
    Colorful(Instance),
    Fair(FairInstance),
}

impl LoadedInstance {
    pub fn base(&self) -> &Instance {
        match self {
            LoadedInstance::Colorful(i) => i,
            LoadedInstance::Fair(f) => f.base(),
        }
    }
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance, p: Option<&[Rational]>) -> Self {
        InstanceFile {
            n: inst.n(),
            dist: inst.distances().to_vec(),
            k: inst.k(),
            colors: inst
                .colors()
                .iter()
                .map(|c| ColorEntry { members: c.members().to_vec(), demand: c.demand() })
                .collect(),
            p: p.map(<[Rational]>::to_vec),
        }
    }

    pub fn into_instance(self) -> Result<LoadedInstance> {
        if self.n != self.dist.len() {
            return Err(Error::InvalidInstance(format!(
                "n = {} but the distance matrix has {} rows",
                self.n,
                self.dist.len()
            )));
        }
        let colors = self.colors.into_iter().map(|c| ColorClass::new(c.members, c.demand)).collect();
        let inst = Instance::new(self.dist, self.k, colors)?;
        Ok(match self.p {
            Some(p) => LoadedInstance::Fair(FairInstance::new(inst, p)?),
            None => LoadedInstance::Colorful(inst),
        })
    }
}

pub fn parse_instance(text: &str) -> Result<LoadedInstance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    file.into_instance()
}

fn to_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn instance_to_json(inst: &Instance) -> Result<String> {
    to_pretty(&InstanceFile::from_instance(inst, None))
}

pub fn fair_instance_to_json(finst: &FairInstance) -> Result<String> {
    to_pretty(&InstanceFile::from_instance(finst.base(), Some(finst.p())))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageEntry {
    pub color: usize,
    pub covered: usize,
    pub demand: usize,
}

/// The common solution format; colorful solutions fill `centers` and
/// `coverage`, fair ones `distribution`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    #[serde(with = "rational::serde_str")]
    pub radius: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guess: Option<GuessRadius>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage: Option<Vec<CoverageEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Vec<Lottery>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GuessRadius(#[serde(with = "rational::serde_str")] pub Rational);

impl<'de> Deserialize<'de> for Lottery {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            centers: Vec<usize>,
            #[serde(with = "rational::serde_str")]
            prob: Rational,
        }
        let raw = Raw::deserialize(d)?;
        Ok(Lottery { centers: raw.centers, probability: raw.prob })
    }
}

pub fn coverage_entries(inst: &Instance, set: &CenterSet) -> Vec<CoverageEntry> {
    let cov = inst.check_feasible(&set.centers, &set.radius);
    inst.colors()
        .iter()
        .enumerate()
        .map(|(l, c)| CoverageEntry { color: l, covered: cov.counts[l], demand: c.demand() })
        .collect()
}

impl SolutionFile {
    pub fn from_centers(inst: &Instance, set: &CenterSet) -> Self {
        SolutionFile {
            radius: set.radius.clone(),
            guess: None,
            centers: Some(set.centers.clone()),
            coverage: Some(coverage_entries(inst, set)),
            distribution: None,
            samples: None,
            trace: None,
        }
    }

    pub fn from_colorful(inst: &Instance, sol: &ColorfulSolution) -> Result<Self> {
        let mut file = Self::from_centers(inst, &sol.solution);
        file.guess = Some(GuessRadius(sol.guess.clone()));
        file.trace = Some(serde_json::to_value(&sol.trace)?);
        Ok(file)
    }

    pub fn from_fair(sol: &FairSolution, samples: Option<Vec<Vec<usize>>>) -> Result<Self> {
        Ok(SolutionFile {
            radius: sol.distribution.radius.clone(),
            guess: Some(GuessRadius(sol.guess.clone())),
            centers: None,
            coverage: None,
            distribution: Some(sol.distribution.support.clone()),
            samples,
            trace: Some(serde_json::to_value(&sol.trace)?),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        to_pretty(self)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{fixture_appendix_b, gen_random_fair, MetricKind, RandomSpec};
    use crate::rational::{int, ratio};

    #[test]
    fn instance_round_trip_is_byte_stable() {
        let inst = fixture_appendix_b(100).unwrap().instance;
        let text = instance_to_json(&inst).unwrap();
        let back = parse_instance(&text).unwrap();
        assert_eq!(back, LoadedInstance::Colorful(inst));
        assert_eq!(instance_to_json(back.base()).unwrap(), text);
    }

    #[test]
    fn fair_round_trip() {
        let f = gen_random_fair(4, &RandomSpec::new(5, 2, 2, MetricKind::Line)).unwrap();
        let text = fair_instance_to_json(&f).unwrap();
        assert_eq!(parse_instance(&text).unwrap(), LoadedInstance::Fair(f));
    }

    #[test]
    fn integers_are_accepted() {
        let text = r#"{"n": 2, "dist": [[0, 3], ["3/1", 0]], "k": 1, "colors": [{"members": [0, 1], "demand": 1}], "p": ["1/2", 0]}"#;
        let LoadedInstance::Fair(f) = parse_instance(text).unwrap() else { panic!() };
        assert_eq!(f.base().dist(0, 1), &int(3));
        assert_eq!(f.p(), &[ratio(1, 2), int(0)]);
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(parse_instance(r#"{"n": 3, "dist": [["0"]], "k": 1, "colors": [{"members": [], "demand": 0}]}"#).is_err());
        assert!(parse_instance(r#"{"n": 1, "dist": [["x"]], "k": 1, "colors": []}"#).is_err());
        assert!(parse_instance(r#"{"n": 1, "dist": [[0]], "k": 1, "colors": [{"members": [0], "demand": 2}]}"#).is_err());
    }

    #[test]
    fn solution_round_trip() {
        let inst = fixture_appendix_b(100).unwrap().instance;
        let file = SolutionFile::from_centers(&inst, &CenterSet::new(vec![6, 0], int(1)));
        let text = file.to_json().unwrap();
        assert!(text.contains("\"radius\": \"1/1\""));
        assert_eq!(SolutionFile::parse(&text).unwrap(), file);
    }
}
