//! Seeded synthetic citation corpora with planted clusters, bridge journals
//! and high-volume generalists.
//!
//! Every ordered (citing, cited) pair draws one uniform variate; when the pair
//! is linked a second draw gives `count = 1 + Poisson(λ)`. Pairs are visited
//! citing-major, cited-minor in journal order, so a seed fixes the corpus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Poisson};
use serde::{Deserialize, Serialize};

use interdisc_core::{CitationMatrix, JournalRegistry};

use crate::error::{CliError, CliResult};

pub const PRNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9)";
pub const GENERATOR_VERSION: &str = "interdisc-synth/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BridgeSpec {
    #[serde(default)]
    pub name: Option<String>,
    /// Share of the bridge's links per cluster; sums to 1.
    pub allocation: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralistSpec {
    #[serde(default)]
    pub name: Option<String>,
    /// Link probability with every other journal, both directions.
    pub rate: f64,
    /// Multiplier on both citing volume and attractiveness.
    pub volume: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub cluster_sizes: Vec<usize>,
    pub within_rate: f64,
    pub leakage_rate: f64,
    #[serde(default = "default_self_rate")]
    pub self_rate: f64,
    #[serde(default)]
    pub bridges: Vec<BridgeSpec>,
    #[serde(default)]
    pub generalists: Vec<GeneralistSpec>,
    /// Mean of the Poisson excess on a linked pair before volume scaling.
    #[serde(default = "default_base_volume")]
    pub base_volume: f64,
    /// Log-normal sigma of per-journal citing volume and attractiveness.
    #[serde(default = "default_volume_spread")]
    pub volume_spread: f64,
    /// Poisson mean of a cluster journal's self-citation cell relative to its
    /// citing volume. Bridges and generalists self-cite like any other pair.
    #[serde(default = "default_self_volume")]
    pub self_volume: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_self_rate() -> f64 {
    0.5
}
fn default_base_volume() -> f64 {
    1.0
}
fn default_volume_spread() -> f64 {
    0.8
}
fn default_self_volume() -> f64 {
    1.0
}

impl SyntheticSpec {
    /// The planted corpus used for recovery checks: three clusters of 30, two
    /// even bridges and one generalist.
    pub fn planted(seed: u64) -> Self {
        Self {
            cluster_sizes: vec![30, 30, 30],
            within_rate: 0.45,
            leakage_rate: 0.02,
            self_rate: 0.5,
            bridges: vec![
                BridgeSpec {
                    name: None,
                    allocation: vec![1.0 / 3.0; 3],
                },
                BridgeSpec {
                    name: None,
                    allocation: vec![1.0 / 3.0; 3],
                },
            ],
            generalists: vec![GeneralistSpec {
                name: None,
                rate: 0.4,
                volume: 5.0,
            }],
            base_volume: 1.0,
            volume_spread: 0.8,
            self_volume: 20.0,
            seed,
        }
    }

    pub fn journal_count(&self) -> usize {
        self.cluster_sizes.iter().sum::<usize>() + self.bridges.len() + self.generalists.len()
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Data(format!("invalid synthetic spec: {m}")));
        if self.cluster_sizes.is_empty() {
            return bad("no clusters".into());
        }
        if let Some(c) = self.cluster_sizes.iter().position(|&s| s == 0) {
            return bad(format!("cluster {c} is empty"));
        }
        for (label, r) in [
            ("within_rate", self.within_rate),
            ("leakage_rate", self.leakage_rate),
            ("self_rate", self.self_rate),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return bad(format!("{label} {r} outside [0, 1]"));
            }
        }
        if !(self.base_volume >= 0.0 && self.base_volume.is_finite()) {
            return bad("base_volume must be finite and nonnegative".into());
        }
        if !(self.volume_spread >= 0.0 && self.volume_spread.is_finite()) {
            return bad("volume_spread must be finite and nonnegative".into());
        }
        if !(self.self_volume >= 0.0 && self.self_volume.is_finite()) {
            return bad("self_volume must be finite and nonnegative".into());
        }
        let k = self.cluster_sizes.len();
        for (b, br) in self.bridges.iter().enumerate() {
            if br.allocation.len() != k {
                return bad(format!(
                    "bridge {b} has {} weights for {k} clusters",
                    br.allocation.len()
                ));
            }
            if br.allocation.iter().any(|w| w.is_nan() || *w < 0.0) {
                return bad(format!("bridge {b} has a negative weight"));
            }
            let s: f64 = br.allocation.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return bad(format!("bridge {b} weights sum to {s}"));
            }
        }
        for (g, gen) in self.generalists.iter().enumerate() {
            if !(0.0..=1.0).contains(&gen.rate) {
                return bad(format!("generalist {g} rate {} outside [0, 1]", gen.rate));
            }
            if !(gen.volume > 0.0 && gen.volume.is_finite()) {
                return bad(format!("generalist {g} volume must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Cluster(usize),
    Bridge,
    Generalist,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedJournal {
    pub name: String,
    pub role: Role,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthTruth {
    pub generator: String,
    pub prng: String,
    pub seed: u64,
    pub spec: SyntheticSpec,
    pub journals: Vec<PlantedJournal>,
    pub bridges: Vec<String>,
    pub generalists: Vec<String>,
    pub nnz: usize,
    pub total_citations: u128,
}

#[derive(Clone, Debug)]
pub struct SyntheticCorpus {
    pub registry: JournalRegistry,
    pub matrix: CitationMatrix,
    pub truth: SynthTruth,
}

pub fn generate(spec: &SyntheticSpec) -> CliResult<SyntheticCorpus> {
    spec.validate()?;
    let k = spec.cluster_sizes.len();
    let mut roles = Vec::with_capacity(spec.journal_count());
    let mut names = Vec::with_capacity(spec.journal_count());
    for (c, &size) in spec.cluster_sizes.iter().enumerate() {
        for j in 0..size {
            roles.push(Role::Cluster(c));
            names.push(format!("C{}J{}", c + 1, j + 1));
        }
    }
    for (b, br) in spec.bridges.iter().enumerate() {
        roles.push(Role::Bridge);
        names.push(br.name.clone().unwrap_or_else(|| format!("BRIDGE{}", b + 1)));
    }
    for (g, gen) in spec.generalists.iter().enumerate() {
        roles.push(Role::Generalist);
        names.push(gen.name.clone().unwrap_or_else(|| format!("GEN{}", g + 1)));
    }
    let registry = JournalRegistry::from_names(names.iter().map(String::as_str))?;
    let n = roles.len();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let spread = LogNormal::new(0.0, spec.volume_spread).map_err(|e| CliError::Data(e.to_string()))?;
    let mut volume: Vec<f64> = (0..n).map(|_| spread.sample(&mut rng)).collect();
    let mut attract: Vec<f64> = (0..n).map(|_| spread.sample(&mut rng)).collect();

    let bridge_index = |id: usize| id - spec.cluster_sizes.iter().sum::<usize>();
    let generalist_index = |id: usize| bridge_index(id) - spec.bridges.len();
    for id in 0..n {
        if roles[id] == Role::Generalist {
            let g = &spec.generalists[generalist_index(id)];
            volume[id] *= g.volume;
            attract[id] *= g.volume;
        }
    }

    let rate = |a: usize, b: usize| -> f64 {
        if a == b {
            return spec.self_rate;
        }
        match (roles[a], roles[b]) {
            (Role::Generalist, _) => spec.generalists[generalist_index(a)].rate,
            (_, Role::Generalist) => spec.generalists[generalist_index(b)].rate,
            (Role::Bridge, Role::Cluster(c)) => {
                (spec.within_rate * k as f64 * spec.bridges[bridge_index(a)].allocation[c]).min(1.0)
            }
            (Role::Cluster(c), Role::Bridge) => {
                (spec.within_rate * k as f64 * spec.bridges[bridge_index(b)].allocation[c]).min(1.0)
            }
            (Role::Bridge, Role::Bridge) => spec.leakage_rate,
            (Role::Cluster(x), Role::Cluster(y)) => {
                if x == y {
                    spec.within_rate
                } else {
                    spec.leakage_rate
                }
            }
        }
    };

    let mut triplets = Vec::new();
    for (citing, &vol) in volume.iter().enumerate() {
        for (cited, &att) in attract.iter().enumerate() {
            let u: f64 = rng.random();
            if u >= rate(citing, cited) {
                continue;
            }
            let lambda = if citing == cited && matches!(roles[citing], Role::Cluster(_)) {
                spec.base_volume * spec.self_volume * vol
            } else {
                spec.base_volume * vol * att
            };
            let extra = if lambda > 0.0 {
                Poisson::new(lambda)
                    .map_err(|e| CliError::Data(e.to_string()))?
                    .sample(&mut rng) as u64
            } else {
                0
            };
            triplets.push((cited, citing, 1 + extra));
        }
    }
    let matrix = CitationMatrix::from_triplets(n, triplets, 1)?;

    let pick = |role: Role| -> Vec<String> {
        roles
            .iter()
            .zip(&names)
            .filter(|(r, _)| **r == role)
            .map(|(_, name)| name.clone())
            .collect()
    };
    let truth = SynthTruth {
        generator: GENERATOR_VERSION.into(),
        prng: PRNG_NAME.into(),
        seed: spec.seed,
        spec: spec.clone(),
        bridges: pick(Role::Bridge),
        generalists: pick(Role::Generalist),
        journals: roles
            .iter()
            .zip(&names)
            .map(|(&role, name)| PlantedJournal {
                name: name.clone(),
                role,
            })
            .collect(),
        nnz: matrix.nnz(),
        total_citations: matrix.total(),
    };
    Ok(SyntheticCorpus {
        registry,
        matrix,
        truth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            cluster_sizes: vec![5, 4],
            within_rate: 0.7,
            leakage_rate: 0.0,
            self_rate: 0.5,
            bridges: vec![BridgeSpec {
                name: None,
                allocation: vec![0.5, 0.5],
            }],
            generalists: vec![],
            base_volume: 1.0,
            volume_spread: 0.5,
            self_volume: 1.0,
            seed,
        }
    }

    #[test]
    fn zero_leakage_is_block_diagonal_outside_bridges() {
        let c = generate(&small(3)).unwrap();
        let cluster = |id: usize| match c.truth.journals[id].role {
            Role::Cluster(k) => Some(k),
            _ => None,
        };
        for (i, j, _) in c.matrix.triplets() {
            if let (Some(a), Some(b)) = (cluster(i), cluster(j)) {
                assert_eq!(a, b, "cell ({i}, {j}) crosses clusters");
            }
        }
    }

    #[test]
    fn seed_determines_corpus() {
        let a = generate(&small(11)).unwrap();
        let b = generate(&small(11)).unwrap();
        let c = generate(&small(12)).unwrap();
        assert_eq!(a.matrix, b.matrix);
        assert_ne!(a.matrix, c.matrix);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut s = small(0);
        s.cluster_sizes[1] = 0;
        assert!(generate(&s).is_err());
        let mut s = small(0);
        s.bridges[0].allocation = vec![0.7, 0.7];
        assert!(generate(&s).is_err());
        let mut s = small(0);
        s.within_rate = 1.5;
        assert!(generate(&s).is_err());
    }

    #[test]
    fn planted_names_and_roles() {
        let c = generate(&SyntheticSpec::planted(1)).unwrap();
        assert_eq!(c.registry.len(), 93);
        assert_eq!(c.truth.bridges, vec!["BRIDGE1", "BRIDGE2"]);
        assert_eq!(c.truth.generalists, vec!["GEN1"]);
        assert_eq!(c.registry.name(0), "C1J1");
    }
}
