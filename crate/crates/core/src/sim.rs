//! Time-stepped simulation of an elastic cluster.
//!
//! `A` is generated and placed once; each step draws a fresh `B`, applies the
//! step's availability realization and straggler set, runs a full round and
//! checks the decoded product against [`reference_matmul`].

use std::collections::BTreeSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::{
    cyclic_assignment, enumerate_realizations, AvailabilityRealization, ComputationAssignment,
    SystemParams, DEFAULT_ENUMERATION_CAP,
};
use crate::elasticity::{materialize_union, union_placement};
use crate::error::{Error, Result};
use crate::ffield::PrimeField;
use crate::lagrange::{generate_points, EvaluationPoints, PointRule, WeightCache};
use crate::matrix::{matrices_equal, reference_matmul, FieldMatrix};
use crate::schemes::{run_round, storage_plan, Dims, MachineLedger, Placement, SchemeId};

pub const LEDGER_CSV_HEADER: &str =
    "step,machine,download_symbols,upload_symbols,compute_mults,success";

// Stream ids keep each random source independent of the others.
const STREAM_A: u64 = 0;
const STREAM_B: u64 = 1;
const STREAM_STRAGGLERS: u64 = 2;
const STREAM_AVAILABILITY: u64 = 3;

fn stream_rng(seed: u64, purpose: u64, step: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((purpose << 32) | step as u64);
    rng
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementMode {
    /// Place storage for the current realization, re-placing when it changes.
    #[default]
    PerRealization,
    /// Place the union over every admissible realization once.
    Union,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StragglerPolicy {
    #[default]
    None,
    /// The listed machines straggle whenever they are available.
    FixedSet { machines: Vec<usize> },
    /// `k` available machines chosen uniformly each step.
    SeededRandom { k: usize },
    /// `S` machines drawn from a single group each step.
    AdversarialPerGroup,
}

/// How availability evolves when no explicit schedule is given.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AvailabilityPolicy {
    /// All machines every step.
    #[default]
    Full,
    /// Step `t` uses the `t`-th admissible realization, wrapping around.
    CycleAll,
    /// A uniformly drawn admissible realization each step.
    SeededRandom,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduledStep {
    pub available: Vec<usize>,
    #[serde(default)]
    pub stragglers: Vec<usize>,
}

fn default_modulus() -> u64 {
    PrimeField::P65537.modulus()
}

fn default_steps() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n: usize,
    pub l: usize,
    pub s: usize,
    pub u: usize,
    pub scheme: SchemeId,
    #[serde(default = "default_modulus")]
    pub p: u64,
    pub q: usize,
    pub v: usize,
    pub r: usize,
    pub seed: u64,
    #[serde(default)]
    pub placement: PlacementMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<ScheduledStep>>,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub straggler_policy: StragglerPolicy,
    #[serde(default)]
    pub availability: AvailabilityPolicy,
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ConfigError(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn params(&self) -> Result<SystemParams> {
        SystemParams::new(self.n, self.l, self.s, self.u)
    }

    pub fn dims(&self) -> Dims {
        Dims {
            q: self.q,
            v: self.v,
            r: self.r,
        }
    }

    /// Checks everything that can be checked before the first step.
    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| match e {
            Error::ConfigError(_) => e,
            other => Error::ConfigError(other.to_string()),
        };
        let params = self.params().map_err(cfg)?;
        let field = PrimeField::new(self.p).map_err(cfg)?;
        generate_points(field, self.n, self.l, PointRule::Consecutive).map_err(cfg)?;

        let mut sizes = BTreeSet::new();
        match &self.schedule {
            Some(schedule) => {
                if schedule.is_empty() {
                    return Err(Error::ConfigError("schedule has no steps".into()));
                }
                for (t, step) in schedule.iter().enumerate() {
                    let realization = AvailabilityRealization::new(step.available.clone(), self.n)
                        .and_then(|r| r.check(&params).map(|_| r))
                        .map_err(|e| Error::ConfigError(format!("step {}: {e}", t + 1)))?;
                    let unique: BTreeSet<_> = step.stragglers.iter().collect();
                    if unique.len() != step.stragglers.len() {
                        return Err(Error::ConfigError(format!(
                            "step {}: repeated straggler",
                            t + 1
                        )));
                    }
                    if let Some(x) = step.stragglers.iter().find(|x| !realization.contains(**x)) {
                        return Err(Error::ConfigError(format!(
                            "step {}: straggler {x} is not available",
                            t + 1
                        )));
                    }
                    sizes.insert(realization.len());
                }
            }
            None => {
                if self.steps == 0 {
                    return Err(Error::ConfigError("steps must be positive".into()));
                }
                match self.availability {
                    AvailabilityPolicy::Full => {
                        sizes.insert(self.n);
                    }
                    _ => {
                        enumerate_realizations(&params, DEFAULT_ENUMERATION_CAP).map_err(cfg)?;
                        sizes.extend(params.realization_sizes());
                    }
                }
            }
        }
        if self.placement == PlacementMode::Union {
            sizes.extend(params.realization_sizes());
        }
        for m in sizes {
            self.scheme
                .check_dims(self.dims(), self.l, m)
                .map_err(cfg)?;
        }
        match &self.straggler_policy {
            StragglerPolicy::FixedSet { machines } => {
                if let Some(x) = machines.iter().find(|&&x| x == 0 || x > self.n) {
                    return Err(Error::ConfigError(format!(
                        "straggler {x} is not a machine label"
                    )));
                }
            }
            StragglerPolicy::SeededRandom { k } if *k > params.min_available() => {
                return Err(Error::ConfigError(format!(
                    "cannot draw {k} stragglers from {} available machines",
                    params.min_available()
                )));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Deterministic per-step straggler sets.
#[derive(Clone, Debug)]
pub struct StragglerGenerator {
    policy: StragglerPolicy,
    s: usize,
    seed: u64,
}

pub fn make_straggler_policy(policy: StragglerPolicy, s: usize, seed: u64) -> StragglerGenerator {
    StragglerGenerator { policy, s, seed }
}

impl StragglerGenerator {
    /// Straggler set for `step`; depends only on the seed, the step and its
    /// realization.
    pub fn for_step(
        &self,
        step: usize,
        realization: &AvailabilityRealization,
        assignment: &ComputationAssignment,
    ) -> BTreeSet<usize> {
        let mut rng = stream_rng(self.seed, STREAM_STRAGGLERS, step);
        match &self.policy {
            StragglerPolicy::None => BTreeSet::new(),
            StragglerPolicy::FixedSet { machines } => machines
                .iter()
                .copied()
                .filter(|&x| realization.contains(x))
                .collect(),
            StragglerPolicy::SeededRandom { k } => {
                let members = realization.members();
                index::sample(&mut rng, members.len(), (*k).min(members.len()))
                    .into_iter()
                    .map(|i| members[i])
                    .collect()
            }
            StragglerPolicy::AdversarialPerGroup => {
                let g = rng.gen_range(1..=assignment.len());
                let group = assignment.group(g);
                index::sample(&mut rng, group.len(), self.s.min(group.len()))
                    .into_iter()
                    .map(|i| group[i])
                    .collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    pub step: usize,
    pub available: Vec<usize>,
    pub stragglers: Vec<usize>,
    /// Storage was placed again before this step.
    pub replaced: bool,
    /// Every group had at least `L` results.
    pub success: bool,
    pub matches_oracle: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub groups: usize,
    pub groups_decoded: usize,
    /// Largest number of stragglers inside one group.
    pub max_group_stragglers: usize,
    pub stragglers_tolerated: usize,
    pub decode_mults: u64,
    pub machines: Vec<MachineLedger>,
}

impl StepReport {
    pub fn passed(&self) -> bool {
        self.success && self.matches_oracle
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerTotals {
    pub download_symbols: u64,
    pub upload_symbols: u64,
    pub compute_mults: u64,
    pub decode_mults: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub steps: Vec<StepReport>,
    pub successful_steps: usize,
    pub replacements: usize,
    pub totals: LedgerTotals,
}

impl SimReport {
    pub fn all_passed(&self) -> bool {
        self.steps.iter().all(StepReport::passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per machine per step.
    pub fn ledger_csv(&self) -> String {
        let mut out = String::from(LEDGER_CSV_HEADER);
        out.push('\n');
        for step in &self.steps {
            for m in &step.machines {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    step.step,
                    m.machine,
                    m.download_symbols,
                    m.upload_symbols,
                    m.compute_mults,
                    step.success
                ));
            }
        }
        out
    }
}

/// Resolves the availability and straggler sets for every step.
fn resolve_schedule(
    config: &SimConfig,
    params: &SystemParams,
) -> Result<Vec<(AvailabilityRealization, Option<BTreeSet<usize>>)>> {
    if let Some(schedule) = &config.schedule {
        return schedule
            .iter()
            .map(|s| {
                let r = AvailabilityRealization::new(s.available.clone(), config.n)?;
                Ok((r, Some(s.stragglers.iter().copied().collect())))
            })
            .collect();
    }
    let admissible = match config.availability {
        AvailabilityPolicy::Full => vec![AvailabilityRealization::full(config.n)],
        _ => enumerate_realizations(params, DEFAULT_ENUMERATION_CAP)?,
    };
    Ok((1..=config.steps)
        .map(|t| {
            let i = match config.availability {
                AvailabilityPolicy::SeededRandom => {
                    stream_rng(config.seed, STREAM_AVAILABILITY, t).gen_range(0..admissible.len())
                }
                _ => (t - 1) % admissible.len(),
            };
            (admissible[i].clone(), None)
        })
        .collect())
}

/// Data matrix shared by every step of a run.
pub fn data_matrix(config: &SimConfig) -> Result<FieldMatrix> {
    let field = PrimeField::new(config.p)?;
    Ok(FieldMatrix::random(
        field,
        config.q,
        config.v,
        &mut stream_rng(config.seed, STREAM_A, 0),
    ))
}

/// Input matrix for step `t` (1-based).
pub fn input_matrix(config: &SimConfig, t: usize) -> Result<FieldMatrix> {
    let field = PrimeField::new(config.p)?;
    Ok(FieldMatrix::random(
        field,
        config.v,
        config.r,
        &mut stream_rng(config.seed, STREAM_B, t),
    ))
}

fn place(
    config: &SimConfig,
    params: &SystemParams,
    realization: &AvailabilityRealization,
    points: &EvaluationPoints,
    a: &FieldMatrix,
) -> Result<Placement> {
    match config.placement {
        PlacementMode::PerRealization => {
            storage_plan(config.scheme, params, realization, points, a, config.r)
        }
        PlacementMode::Union => materialize_union(
            &union_placement(config.scheme, params)?,
            points,
            a,
            config.r,
        ),
    }
}

pub fn run_simulation(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let params = config.params()?;
    let field = PrimeField::new(config.p)?;
    let points = generate_points(field, config.n, config.l, PointRule::Consecutive)?;
    let a = data_matrix(config)?;
    let schedule = resolve_schedule(config, &params)?;
    let stragglers_gen =
        make_straggler_policy(config.straggler_policy.clone(), config.s, config.seed);
    let cache = WeightCache::new();

    let mut placement: Option<(Placement, Option<AvailabilityRealization>)> = None;
    let mut steps = Vec::with_capacity(schedule.len());
    for (i, (realization, fixed)) in schedule.into_iter().enumerate() {
        let t = i + 1;
        let key = match config.placement {
            PlacementMode::Union => None,
            PlacementMode::PerRealization => Some(realization.clone()),
        };
        let replaced = match &placement {
            Some((_, current)) => *current != key,
            None => false,
        };
        if placement.is_none() || replaced {
            placement = Some((place(config, &params, &realization, &points, &a)?, key));
        }
        let (current, _) = placement.as_ref().expect("placed above");

        let assignment = cyclic_assignment(&realization, params.l, params.s)?;
        let stragglers =
            fixed.unwrap_or_else(|| stragglers_gen.for_step(t, &realization, &assignment));
        let b = input_matrix(config, t)?;
        let outcome = run_round(
            current,
            &params,
            &realization,
            &points,
            &b,
            &stragglers,
            Some(&cache),
        )?;

        let per_group: Vec<usize> = assignment
            .groups()
            .iter()
            .map(|w| w.iter().filter(|n| stragglers.contains(n)).count())
            .collect();
        let groups_decoded = assignment
            .groups()
            .iter()
            .zip(&per_group)
            .filter(|(w, lost)| w.len() - **lost >= params.l)
            .count();
        let (success, matches_oracle, error, decode_mults) = match &outcome.decoded {
            Ok(out) => {
                let expected = reference_matmul(&a, &b)?;
                (
                    true,
                    matrices_equal(&out.product, &expected),
                    None,
                    out.mults,
                )
            }
            Err(e) => (false, false, Some(e.to_string()), 0),
        };
        steps.push(StepReport {
            step: t,
            available: realization.members().to_vec(),
            stragglers: stragglers.iter().copied().collect(),
            replaced,
            success,
            matches_oracle,
            error,
            groups: assignment.len(),
            groups_decoded,
            max_group_stragglers: per_group.iter().copied().max().unwrap_or(0),
            stragglers_tolerated: if success { stragglers.len() } else { 0 },
            decode_mults,
            machines: outcome.ledger,
        });
    }

    let mut totals = LedgerTotals::default();
    for step in &steps {
        totals.decode_mults += step.decode_mults;
        for m in &step.machines {
            totals.download_symbols += m.download_symbols;
            totals.upload_symbols += m.upload_symbols;
            totals.compute_mults += m.compute_mults;
        }
    }
    Ok(SimReport {
        config: config.clone(),
        successful_steps: steps.iter().filter(|s| s.success).count(),
        replacements: steps.iter().filter(|s| s.replaced).count(),
        steps,
        totals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example(scheme: SchemeId) -> SimConfig {
        SimConfig {
            n: 6,
            l: 2,
            s: 1,
            u: 0,
            scheme,
            p: 65537,
            q: 12,
            v: 12,
            r: 12,
            seed: 7,
            placement: PlacementMode::PerRealization,
            schedule: None,
            steps: 5,
            straggler_policy: StragglerPolicy::SeededRandom { k: 1 },
            availability: AvailabilityPolicy::Full,
        }
    }

    #[test]
    fn one_straggler_per_step_succeeds() {
        for scheme in SchemeId::ALL {
            let report = run_simulation(&example(scheme)).unwrap();
            assert_eq!(report.steps.len(), 5);
            assert!(report.all_passed(), "{scheme}");
            assert!(report
                .steps
                .iter()
                .all(|s| s.stragglers.len() == 1 && s.stragglers_tolerated == 1));
            assert_eq!(report.replacements, 0);
        }
    }

    #[test]
    fn overloaded_group_fails_only_that_step() {
        let mut cfg = example(SchemeId::Scheme1);
        let full: Vec<usize> = (1..=6).collect();
        cfg.schedule = Some(
            (1..=5)
                .map(|t| ScheduledStep {
                    available: full.clone(),
                    stragglers: if t == 3 { vec![1, 2] } else { vec![t] },
                })
                .collect(),
        );
        let report = run_simulation(&cfg).unwrap();
        for step in &report.steps {
            assert_eq!(step.passed(), step.step != 3);
        }
        let failed = &report.steps[2];
        assert_eq!(
            failed.error.as_deref(),
            Some(
                Error::DecodeThresholdNotMet { group: 1 }
                    .to_string()
                    .as_str()
            )
        );
        assert_eq!(failed.max_group_stragglers, 2);
        assert_eq!(failed.groups_decoded, 4);
        assert_eq!(report.successful_steps, 4);
    }

    #[test]
    fn union_mode_cycles_without_replacement() {
        for scheme in SchemeId::ALL {
            let mut cfg = example(scheme);
            cfg.u = 1;
            cfg.q = 60;
            cfg.v = 60;
            cfg.r = 60;
            cfg.steps = 7;
            cfg.placement = PlacementMode::Union;
            cfg.availability = AvailabilityPolicy::CycleAll;
            cfg.straggler_policy = StragglerPolicy::AdversarialPerGroup;
            let report = run_simulation(&cfg).unwrap();
            assert!(report.all_passed(), "{scheme}");
            assert_eq!(report.replacements, 0);
            let sizes: BTreeSet<usize> = report.steps.iter().map(|s| s.available.len()).collect();
            assert_eq!(sizes, BTreeSet::from([5, 6]));
        }
    }

    #[test]
    fn per_realization_mode_replaces_on_change() {
        let mut cfg = example(SchemeId::Scheme2);
        cfg.u = 1;
        cfg.q = 60;
        cfg.v = 60;
        cfg.r = 60;
        cfg.steps = 7;
        cfg.availability = AvailabilityPolicy::CycleAll;
        let report = run_simulation(&cfg).unwrap();
        assert!(report.all_passed());
        assert_eq!(report.replacements, 6);
    }

    #[test]
    fn preempted_machines_do_nothing() {
        let mut cfg = example(SchemeId::Scheme3);
        cfg.u = 1;
        cfg.q = 60;
        cfg.v = 60;
        cfg.r = 60;
        cfg.schedule = Some(vec![ScheduledStep {
            available: vec![1, 2, 4, 5, 6],
            stragglers: vec![],
        }]);
        let report = run_simulation(&cfg).unwrap();
        assert!(report.all_passed());
        let ledger = &report.steps[0].machines;
        assert_eq!(ledger.len(), 5);
        assert!(ledger.iter().all(|m| m.machine != 3));
    }

    #[test]
    fn adversarial_policy_hits_one_group() {
        let gen = make_straggler_policy(StragglerPolicy::AdversarialPerGroup, 1, 3);
        let realization = AvailabilityRealization::full(6);
        let assignment = cyclic_assignment(&realization, 2, 1).unwrap();
        for t in 1..=20 {
            let set = gen.for_step(t, &realization, &assignment);
            assert_eq!(set.len(), 1);
        }
        let gen = make_straggler_policy(StragglerPolicy::AdversarialPerGroup, 2, 3);
        let assignment = cyclic_assignment(&realization, 2, 2).unwrap();
        for t in 1..=20 {
            let set = gen.for_step(t, &realization, &assignment);
            assert!(assignment
                .groups()
                .iter()
                .any(|w| set.iter().all(|x| w.contains(x))));
        }
    }

    #[test]
    fn straggler_policies_are_deterministic() {
        let realization = AvailabilityRealization::full(6);
        let assignment = cyclic_assignment(&realization, 2, 1).unwrap();
        let none = make_straggler_policy(StragglerPolicy::None, 1, 9);
        assert!(none.for_step(1, &realization, &assignment).is_empty());
        let a = make_straggler_policy(StragglerPolicy::SeededRandom { k: 1 }, 1, 9);
        let b = make_straggler_policy(StragglerPolicy::SeededRandom { k: 1 }, 1, 9);
        let seq = |g: &StragglerGenerator| -> Vec<_> {
            (1..=10)
                .map(|t| g.for_step(t, &realization, &assignment))
                .collect()
        };
        assert_eq!(seq(&a), seq(&b));
        let fixed = make_straggler_policy(
            StragglerPolicy::FixedSet {
                machines: vec![2, 9],
            },
            1,
            0,
        );
        let partial = AvailabilityRealization::new(vec![1, 3, 4, 5, 6], 6).unwrap();
        assert!(fixed
            .for_step(1, &partial, &cyclic_assignment(&partial, 2, 1).unwrap())
            .is_empty());
    }

    #[test]
    fn reports_are_bytewise_stable() {
        let cfg = example(SchemeId::Scheme3);
        assert_eq!(
            run_simulation(&cfg).unwrap().to_json(),
            run_simulation(&cfg).unwrap().to_json()
        );
        let mut other = cfg.clone();
        other.seed += 1;
        assert_ne!(
            run_simulation(&cfg).unwrap().to_json(),
            run_simulation(&other).unwrap().to_json()
        );
    }

    #[test]
    fn config_json_round_trip() {
        let text = r#"{"n":6,"l":2,"s":1,"u":0,"scheme":"1","p":65537,"q":12,"v":12,"r":12,"seed":1,
            "placement":"per-realization","schedule":[{"available":[1,2,3,4,5,6],"stragglers":[4]}]}"#;
        let cfg = SimConfig::from_json(text).unwrap();
        assert_eq!(cfg.scheme, SchemeId::Scheme1);
        assert_eq!(SimConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        let policy: SimConfig = SimConfig::from_json(
            r#"{"n":6,"l":2,"s":1,"u":0,"scheme":"2","q":12,"v":12,"r":12,"seed":1,"steps":3,
                "straggler_policy":{"kind":"seeded-random","k":1},"availability":"cycle-all"}"#,
        )
        .unwrap();
        assert_eq!(policy.p, 65537);
        assert_eq!(
            policy.straggler_policy,
            StragglerPolicy::SeededRandom { k: 1 }
        );
    }

    #[test]
    fn invalid_configs_rejected_before_running() {
        let bad = |f: &dyn Fn(&mut SimConfig)| {
            let mut cfg = example(SchemeId::Scheme1);
            f(&mut cfg);
            matches!(run_simulation(&cfg), Err(Error::ConfigError(_)))
        };
        assert!(bad(&|c| c.p = 65536));
        assert!(bad(&|c| c.p = 7));
        assert!(bad(&|c| c.q = 13));
        assert!(bad(&|c| c.steps = 0));
        assert!(bad(&|c| c.u = 4));
        assert!(bad(&|c| c.schedule = Some(vec![])));
        assert!(bad(&|c| c.schedule = Some(vec![ScheduledStep {
            available: vec![1, 2],
            stragglers: vec![]
        }])));
        assert!(bad(&|c| {
            c.u = 1;
            c.schedule = Some(vec![ScheduledStep {
                available: vec![1, 2, 3, 4, 5],
                stragglers: vec![6],
            }])
        }));
        // r = 12 does not split into 5 strips, which union mode needs.
        assert!(bad(&|c| {
            c.u = 1;
            c.placement = PlacementMode::Union
        }));
        assert!(SimConfig::from_json(r#"{"n":6,"bogus":1}"#).is_err());
    }

    #[test]
    fn ledger_csv_layout() {
        let report = run_simulation(&example(SchemeId::Scheme1)).unwrap();
        let csv = report.ledger_csv();
        assert_eq!(csv.lines().next(), Some(LEDGER_CSV_HEADER));
        assert_eq!(csv.lines().count(), 1 + 5 * 6);
        assert!(csv.lines().nth(1).unwrap().starts_with("1,1,72,"));
    }
}
