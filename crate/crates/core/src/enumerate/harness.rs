//! Exhaustive small-instance harness: generates instances, runs the checks
//! unit by unit on a worker pool, checkpoints each finished unit and merges
//! the partial summaries into a report.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::canon::canonical_rooted;
use super::generate::{gen_disk_triangulations, gen_plane_triangulations, rooted_instances, EnumError, MAX_DISK_N};
use crate::engine::{
    four_colour, replay, thomassen_five, verify_colouring, ColouringViolation, EngineOptions, FailureWitness,
    Theorem2Engine,
};
use crate::graph::{EmbeddedGraph, NearTriangulation, Triangulation, Vertex};
use crate::lists::{check_admissible, AssignmentSpace, Color, ColorList, Colouring, ListAssignment};
use crate::oracle::{condition_dense, is_four_colourable, ConditionReport, DenseSolver};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    EngineVsOracle,
    NeighbourhoodCondition,
    FourColourability,
    ThomassenControl,
    WheelExclusion,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::EngineVsOracle,
        Check::NeighbourhoodCondition,
        Check::FourColourability,
        Check::ThomassenControl,
        Check::WheelExclusion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::EngineVsOracle => "engine_vs_oracle",
            Check::NeighbourhoodCondition => "neighbourhood_condition",
            Check::FourColourability => "four_colourability",
            Check::ThomassenControl => "thomassen_control",
            Check::WheelExclusion => "wheel_exclusion",
        }
    }

    pub fn parse(s: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// Whether assignments keep the list `L0 \ {alpha}` away from `v3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionMode {
    Enforced,
    Relaxed,
    Both,
}

impl ExclusionMode {
    fn flags(self) -> &'static [bool] {
        match self {
            ExclusionMode::Enforced => &[true],
            ExclusionMode::Relaxed => &[false],
            ExclusionMode::Both => &[true, false],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignmentMode {
    Exhaustive,
    /// `count` draws per rooted instance above `exhaustive_max_n`.
    Sample {
        count: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarnessConfig {
    /// Largest disk order for the list-colouring checks.
    pub max_n: usize,
    /// Outer cycle lengths, inclusive.
    pub k_range: (usize, usize),
    pub assignment_mode: AssignmentMode,
    /// In sample mode, instances up to this order are still run exhaustively.
    pub exhaustive_max_n: usize,
    pub seed: u64,
    pub checks: BTreeSet<Check>,
    pub exclusion: ExclusionMode,
    /// Largest disk order for the neighbourhood audit.
    pub condition_max_n: usize,
    /// Largest triangulation order for the four-colourability check.
    pub four_colour_max_n: usize,
    pub thomassen_samples: usize,
    pub thomassen_universe: u8,
    /// Rim lengths of the wheels run without the exclusion.
    pub wheel_ks: Vec<usize>,
    pub max_witnesses: usize,
    /// Worker threads; not part of the configuration hash.
    #[serde(skip, default = "default_jobs")]
    pub jobs: usize,
}

fn default_jobs() -> usize {
    1
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            max_n: 6,
            k_range: (3, MAX_DISK_N),
            assignment_mode: AssignmentMode::Exhaustive,
            exhaustive_max_n: 7,
            seed: 0,
            checks: Check::ALL.into_iter().collect(),
            exclusion: ExclusionMode::Enforced,
            condition_max_n: 6,
            four_colour_max_n: 8,
            thomassen_samples: 1,
            thomassen_universe: 5,
            wheel_ks: vec![4, 6],
            max_witnesses: 10,
            jobs: 1,
        }
    }
}

impl HarnessConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.max_n < 3 {
            return bad(format!("max_n must be at least 3, got {}", self.max_n));
        }
        if self.k_range.0 < 3 || self.k_range.0 > self.k_range.1 {
            return bad(format!("bad k range {:?}", self.k_range));
        }
        if let AssignmentMode::Sample { count: 0 } = self.assignment_mode {
            return bad("sample count must be at least 1".into());
        }
        if !(5..=8).contains(&self.thomassen_universe) {
            return bad(format!("thomassen universe must be 5..=8, got {}", self.thomassen_universe));
        }
        if let Some(k) = self.wheel_ks.iter().find(|&&k| !(3..=MAX_DISK_N - 1).contains(&k)) {
            return bad(format!("wheel rim {k} out of range"));
        }
        if self.jobs == 0 {
            return bad("jobs must be at least 1".into());
        }
        Ok(())
    }

    /// SHA-256 of the configuration JSON.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(serde_json::to_vec(self).expect("config serializes")))
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Enumerate(#[from] EnumError),
    #[error("checkpoint: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub units: u64,
    pub instances: u64,
    pub passes: u64,
    pub failures: u64,
}

impl Totals {
    fn add(&mut self, o: &Totals) {
        self.units += o.units;
        self.instances += o.instances;
        self.passes += o.passes;
        self.failures += o.failures;
    }

    fn record(&mut self, ok: bool) {
        self.instances += 1;
        if ok {
            self.passes += 1;
        } else {
            self.failures += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WitnessKey {
    pub n: usize,
    pub k: usize,
    /// Rooted (or triangulation) code, hex.
    pub code: String,
    /// Dense list bitmasks in vertex order, hex; prefixed by `v:` for audits.
    pub assignment: String,
    pub exclusion: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HarnessWitness {
    /// The recursion stopped on an instance the oracle can colour.
    EngineFailure {
        key: WitnessKey,
        instance: NearTriangulation,
        lists: ListAssignment,
        failure: FailureWitness,
    },
    /// The recursion returned a colouring that does not verify.
    UnsoundColouring {
        key: WitnessKey,
        instance: NearTriangulation,
        lists: ListAssignment,
        colouring: Colouring,
        violation: ColouringViolation,
    },
    /// Fewer than three candidate lists at `r` work.
    ConditionFailure {
        key: WitnessKey,
        instance: NearTriangulation,
        base: ListAssignment,
        report: ConditionReport,
    },
    /// No colouring exists at all.
    Uncolourable {
        key: WitnessKey,
        instance: NearTriangulation,
        lists: ListAssignment,
    },
    ThomassenFailure {
        key: WitnessKey,
        instance: NearTriangulation,
        lists: ListAssignment,
        error: String,
    },
    NotFourColourable {
        key: WitnessKey,
        graph: EmbeddedGraph,
    },
}

impl HarnessWitness {
    pub fn key(&self) -> &WitnessKey {
        match self {
            HarnessWitness::EngineFailure { key, .. }
            | HarnessWitness::UnsoundColouring { key, .. }
            | HarnessWitness::ConditionFailure { key, .. }
            | HarnessWitness::Uncolourable { key, .. }
            | HarnessWitness::ThomassenFailure { key, .. }
            | HarnessWitness::NotFourColourable { key, .. } => key,
        }
    }

    pub fn label(&self) -> String {
        match self {
            HarnessWitness::EngineFailure { failure, .. } => format!("engine_failure:{}", failure.reason.label()),
            HarnessWitness::UnsoundColouring { .. } => "unsound_colouring".into(),
            HarnessWitness::ConditionFailure { .. } => "condition_failure".into(),
            HarnessWitness::Uncolourable { .. } => "uncolourable".into(),
            HarnessWitness::ThomassenFailure { .. } => "thomassen_failure".into(),
            HarnessWitness::NotFourColourable { .. } => "not_four_colourable".into(),
        }
    }

    fn order(&self) -> (WitnessKey, String) {
        (self.key().clone(), self.label())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionSummary {
    /// `(instance, pair, base assignment)` triples checked.
    pub evaluations: u64,
    pub satisfied: u64,
    /// Evaluations by number of good lists (index = count).
    pub good_histogram: Vec<u64>,
    /// `(instance, pair)` combinations.
    pub pairs: u64,
    /// Pairs satisfied under every base assignment.
    pub pairs_always_satisfied: u64,
    /// `(instance, pair, alpha, beta)` groups.
    pub groups: u64,
    /// Groups where the same three or more lists work for every assignment.
    pub groups_uniform: u64,
    /// Pairs whose every group is uniform.
    pub pairs_uniform: u64,
}

impl ConditionSummary {
    fn add(&mut self, o: &ConditionSummary) {
        self.evaluations += o.evaluations;
        self.satisfied += o.satisfied;
        if self.good_histogram.len() < o.good_histogram.len() {
            self.good_histogram.resize(o.good_histogram.len(), 0);
        }
        for (a, b) in self.good_histogram.iter_mut().zip(&o.good_histogram) {
            *a += b;
        }
        self.pairs += o.pairs;
        self.pairs_always_satisfied += o.pairs_always_satisfied;
        self.groups += o.groups;
        self.groups_uniform += o.groups_uniform;
        self.pairs_uniform += o.pairs_uniform;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WheelSummary {
    pub k: usize,
    pub n: usize,
    pub exclusion_applied: bool,
    pub assignments: u64,
    /// Assignments giving `v3` the list `L0 \ {alpha}`.
    pub excluded_type: u64,
    pub uncolourable_excluded_type: u64,
    pub uncolourable_other: u64,
    pub engine_failures_excluded_type: u64,
    pub engine_failures_other: u64,
    pub condition_evaluations: u64,
    pub condition_failures: u64,
    /// Some assignment the exclusion removes is uncolourable.
    pub exclusion_load_bearing: bool,
}

/// Partial result for one unit, or any merge of units.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub totals: Totals,
    pub by_n: BTreeMap<usize, Totals>,
    pub counters: BTreeMap<String, u64>,
    pub witnesses: Vec<HarnessWitness>,
    pub minimal_by_kind: BTreeMap<String, HarnessWitness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<ConditionSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub wheels: Vec<WheelSummary>,
}

impl Summary {
    fn record(&mut self, n: usize, ok: bool) {
        self.totals.record(ok);
        self.by_n.entry(n).or_default().record(ok);
    }

    fn bump(&mut self, name: &str, by: u64) {
        *self.counters.entry(name.to_string()).or_default() += by;
    }

    fn witness(&mut self, w: HarnessWitness, max: usize) {
        let label = w.label();
        match self.minimal_by_kind.get(&label) {
            Some(cur) if cur.order() <= w.order() => {}
            _ => {
                self.minimal_by_kind.insert(label, w.clone());
            }
        }
        self.witnesses.push(w);
        self.trim(max);
    }

    fn trim(&mut self, max: usize) {
        self.witnesses.sort_by_key(|a| a.order());
        self.witnesses.dedup();
        self.witnesses.truncate(max);
    }

    /// Order-insensitive merge.
    pub fn merge(&mut self, o: Summary, max_witnesses: usize) {
        self.totals.add(&o.totals);
        for (n, t) in &o.by_n {
            self.by_n.entry(*n).or_default().add(t);
        }
        for (name, c) in &o.counters {
            *self.counters.entry(name.clone()).or_default() += c;
        }
        for (label, w) in o.minimal_by_kind {
            match self.minimal_by_kind.get(&label) {
                Some(cur) if cur.order() <= w.order() => {}
                _ => {
                    self.minimal_by_kind.insert(label, w);
                }
            }
        }
        self.witnesses.extend(o.witnesses);
        self.trim(max_witnesses);
        if let Some(c) = o.condition {
            self.condition.get_or_insert_with(Default::default).add(&c);
        }
        self.wheels.extend(o.wheels);
        self.wheels.sort_by_key(|w| (w.k, !w.exclusion_applied));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "CONFIRMED_AT_SCALE")]
    ConfirmedAtScale,
    #[serde(rename = "COUNTEREXAMPLE_FOUND")]
    CounterexampleFound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub summary: Summary,
    /// Derived ratios (for the neighbourhood audit).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fractions: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnessReport {
    pub tool_version: String,
    pub config_hash: String,
    pub config: HarnessConfig,
    pub checks: BTreeMap<Check, CheckReport>,
}

impl HarnessReport {
    pub fn any_counterexample(&self) -> bool {
        self.checks.values().any(|c| c.verdict == Verdict::CounterexampleFound)
    }
}

/// Where to checkpoint finished units and whether to reuse an existing file.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub checkpoint: Option<PathBuf>,
    pub resume: bool,
}

#[derive(Clone, Debug)]
enum UnitKind {
    Rooted { nt: NearTriangulation, exclusion: bool },
    Triangulation(Triangulation),
    Wheel { nt: NearTriangulation, exclusion: bool },
}

#[derive(Clone, Debug)]
struct Unit {
    id: String,
    check: Check,
    code: String,
    kind: UnitKind,
}

#[derive(Serialize, Deserialize)]
struct CheckpointLine {
    config_hash: String,
    unit: String,
    check: Check,
    summary: Summary,
}

/// Wheel with rim `1..=k` and hub `k + 1`, rooted at `1 -> 2`.
pub fn wheel(k: usize) -> NearTriangulation {
    let hub = k as u32 + 1;
    let mut faces: Vec<Vec<Vertex>> = vec![(1..=k as u32).map(Vertex).collect()];
    for i in 1..=k as u32 {
        faces.push(vec![Vertex(i % k as u32 + 1), Vertex(i), Vertex(hub)]);
    }
    NearTriangulation::validate(EmbeddedGraph::from_faces(&faces, 0).expect("wheel faces")).expect("wheel")
}

fn units(cfg: &HarnessConfig) -> Result<Vec<Unit>, HarnessError> {
    let mut out = Vec::new();
    let disk_checks = [Check::EngineVsOracle, Check::NeighbourhoodCondition, Check::ThomassenControl];
    let disk_max = disk_checks
        .iter()
        .filter(|c| cfg.checks.contains(c))
        .map(|c| if *c == Check::NeighbourhoodCondition { cfg.condition_max_n } else { cfg.max_n })
        .max();
    if let Some(max_n) = disk_max {
        let classes = gen_disk_triangulations(max_n, cfg.k_range.0..=cfg.k_range.1)?;
        for class in &classes {
            let (n, k) = (class.disk.n(), class.disk.k());
            for r in rooted_instances(&class.disk) {
                let code = hex::encode(&r.code);
                let mut push = |check: Check, exclusion: bool| {
                    out.push(Unit {
                        id: format!("{}/{n}/{k}/{code}/{}", check.name(), if exclusion { "x" } else { "o" }),
                        check,
                        code: code.clone(),
                        kind: UnitKind::Rooted { nt: r.nt.clone(), exclusion },
                    })
                };
                if cfg.checks.contains(&Check::EngineVsOracle) && n <= cfg.max_n {
                    for &e in cfg.exclusion.flags() {
                        push(Check::EngineVsOracle, e);
                    }
                }
                if cfg.checks.contains(&Check::NeighbourhoodCondition) && n <= cfg.condition_max_n && k >= 4 {
                    for &e in cfg.exclusion.flags() {
                        push(Check::NeighbourhoodCondition, e);
                    }
                }
                if cfg.checks.contains(&Check::ThomassenControl) && n <= cfg.max_n {
                    push(Check::ThomassenControl, true);
                }
            }
        }
    }
    if cfg.checks.contains(&Check::FourColourability) {
        for t in gen_plane_triangulations(cfg.four_colour_max_n)? {
            let code = hex::encode(super::canon::triangulation_code(t.graph()));
            out.push(Unit {
                id: format!("{}/{}/{code}", Check::FourColourability.name(), t.n()),
                check: Check::FourColourability,
                code,
                kind: UnitKind::Triangulation(t),
            });
        }
    }
    if cfg.checks.contains(&Check::WheelExclusion) {
        for &k in &cfg.wheel_ks {
            let nt = canonical_rooted(&wheel(k));
            let code = hex::encode(super::canon::rooted_code(&nt));
            for exclusion in [false, true] {
                out.push(Unit {
                    id: format!(
                        "{}/{}/{k}/{code}/{}",
                        Check::WheelExclusion.name(),
                        k + 1,
                        if exclusion { "x" } else { "o" }
                    ),
                    check: Check::WheelExclusion,
                    code: code.clone(),
                    kind: UnitKind::Wheel { nt: nt.clone(), exclusion },
                });
            }
        }
    }
    Ok(out)
}

fn unit_seed(seed: u64, id: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(id.as_bytes());
    u64::from_le_bytes(h.finalize()[..8].try_into().expect("8 bytes"))
}

fn lists_hex(lists: &[ColorList]) -> String {
    hex::encode(lists.iter().map(|l| l.bits()).collect::<Vec<u8>>())
}

fn run_unit(cfg: &HarnessConfig, unit: &Unit) -> Summary {
    let mut s = Summary { totals: Totals { units: 1, ..Totals::default() }, ..Summary::default() };
    match (&unit.kind, unit.check) {
        (UnitKind::Rooted { nt, exclusion }, Check::EngineVsOracle) => {
            engine_vs_oracle(cfg, unit, nt, *exclusion, &mut s)
        }
        (UnitKind::Rooted { nt, exclusion }, Check::NeighbourhoodCondition) => {
            s.condition = Some(neighbourhood(cfg, unit, nt, *exclusion, &mut s))
        }
        (UnitKind::Rooted { nt, .. }, Check::ThomassenControl) => thomassen_control(cfg, unit, nt, &mut s),
        (UnitKind::Triangulation(t), _) => four_colourability(cfg, unit, t, &mut s),
        (UnitKind::Wheel { nt, exclusion }, _) => wheel_exclusion(cfg, unit, nt, *exclusion, &mut s),
        (UnitKind::Rooted { .. }, _) => unreachable!("rooted units only carry disk checks"),
    }
    s
}

fn key(unit: &Unit, nt: &NearTriangulation, assignment: String, exclusion: bool) -> WitnessKey {
    WitnessKey { n: nt.n(), k: nt.k(), code: unit.code.clone(), assignment, exclusion }
}

fn outer_vectors(cfg: &HarnessConfig, unit: &Unit, space: &AssignmentSpace, n: usize) -> Vec<Vec<ColorList>> {
    match cfg.assignment_mode {
        AssignmentMode::Sample { count } if n > cfg.exhaustive_max_n => {
            space.sample(unit_seed(cfg.seed, &unit.id), count)
        }
        _ => space.exhaustive().collect(),
    }
}

fn proper_dense(solver: &DenseSolver, g: &EmbeddedGraph, lists: &[ColorList], colours: &[u8]) -> bool {
    let ids = solver.ids();
    colours.iter().zip(lists).all(|(&c, l)| c != 0 && l.contains(Color(c)))
        && ids
            .iter()
            .enumerate()
            .all(|(i, &v)| g.rotation(v).iter().all(|w| colours[solver.index(*w).expect("vertex")] != colours[i]))
}

fn engine_vs_oracle(cfg: &HarnessConfig, unit: &Unit, nt: &NearTriangulation, exclusion: bool, s: &mut Summary) {
    let engine = Theorem2Engine::new(nt);
    let solver = DenseSolver::new(nt.graph());
    let space = AssignmentSpace::new(nt, exclusion);
    for outer in outer_vectors(cfg, unit, &space, nt.n()) {
        let a = space.assemble(&outer);
        if check_admissible(nt, &a).is_err() {
            s.bump("admissibility_rejections", 1);
            s.record(nt.n(), false);
            continue;
        }
        let lists = engine.dense_from_outer(&outer);
        let satisfiable = solver.satisfiable(&lists);
        if !satisfiable {
            s.bump("oracle_unsatisfiable", 1);
        }
        match engine.run_dense(lists.clone(), exclusion, None) {
            Ok(colours) => {
                s.bump("engine_coloured", 1);
                if proper_dense(&solver, nt.graph(), &lists, &colours) {
                    s.record(nt.n(), true);
                } else {
                    let c = engine.colouring_from_dense(&colours);
                    let violation = verify_colouring(nt, &a, &c).expect_err("dense check failed");
                    s.bump("soundness_violations", 1);
                    s.record(nt.n(), false);
                    let key = key(unit, nt, lists_hex(&lists), exclusion);
                    s.witness(
                        HarnessWitness::UnsoundColouring {
                            key,
                            instance: nt.clone(),
                            lists: a,
                            colouring: c,
                            violation,
                        },
                        cfg.max_witnesses,
                    );
                }
            }
            Err(failure) => {
                s.bump("engine_failed", 1);
                s.bump(&format!("witness:{}", failure.reason.label()), 1);
                s.record(nt.n(), !satisfiable);
                if satisfiable {
                    let key = key(unit, nt, lists_hex(&lists), exclusion);
                    s.witness(
                        HarnessWitness::EngineFailure { key, instance: nt.clone(), lists: a, failure: *failure },
                        cfg.max_witnesses,
                    );
                } else {
                    s.bump("engine_failed_on_unsatisfiable", 1);
                }
            }
        }
    }
}

/// Calls `f` on every outer list vector whose entry `i` ranges over
/// `options(i, alpha)`.
fn each_vector(k: usize, options: &dyn Fn(usize, Color) -> Vec<ColorList>, f: &mut dyn FnMut(&[ColorList])) {
    fn go(
        i: usize,
        k: usize,
        alpha: Color,
        buf: &mut Vec<ColorList>,
        options: &dyn Fn(usize, Color) -> Vec<ColorList>,
        f: &mut dyn FnMut(&[ColorList]),
    ) {
        if i == k {
            f(buf);
            return;
        }
        for l in options(i, alpha) {
            buf.push(l);
            go(i + 1, k, if i == 0 { l.min().expect("1-list") } else { alpha }, buf, options, f);
            buf.pop();
        }
    }
    go(0, k, Color(1), &mut Vec::with_capacity(k), options, f);
}

fn neighbourhood(
    cfg: &HarnessConfig,
    unit: &Unit,
    nt: &NearTriangulation,
    exclusion: bool,
    s: &mut Summary,
) -> ConditionSummary {
    let solver = DenseSolver::new(nt.graph());
    let space = AssignmentSpace::new(nt, exclusion);
    let k = nt.k();
    let outer_idx: Vec<usize> = nt.outer().vertices().iter().map(|v| solver.index(*v).expect("outer")).collect();
    let mut out = ConditionSummary { good_histogram: vec![0; 5], ..ConditionSummary::default() };
    let mut base_lists = vec![ColorList::L0; solver.ids().len()];
    for vp in 2..k - 1 {
        let rp = vp + 1;
        let (vi, ri) = (outer_idx[vp], outer_idx[rp]);
        let (v, r) = (nt.outer().vertices()[vp], nt.outer().vertices()[rp]);
        let options = |i: usize, alpha: Color| -> Vec<ColorList> {
            if i == rp {
                vec![ColorList::L0]
            } else if i == vp {
                space.options(i, alpha).into_iter().filter(|l| l.len() == 3).collect()
            } else {
                space.options(i, alpha)
            }
        };
        let mut groups: BTreeMap<(u8, u8), ColorList> = BTreeMap::new();
        let mut always = true;
        let mut min_fail: Option<(Vec<ColorList>, ColorList)> = None;
        each_vector(k, &options, &mut |outer| {
            for (&i, &l) in outer_idx.iter().zip(outer) {
                base_lists[i] = l;
            }
            let good = condition_dense(&solver, &mut base_lists, vi, ri, None);
            out.evaluations += 1;
            out.good_histogram[good.len()] += 1;
            let ok = good.len() >= 3;
            s.record(nt.n(), ok);
            if ok {
                out.satisfied += 1;
            } else {
                always = false;
                if min_fail.as_ref().is_none_or(|(m, _)| outer < m.as_slice()) {
                    min_fail = Some((outer.to_vec(), good));
                }
            }
            let g = groups.entry((outer[0].bits(), outer[1].bits())).or_insert(ColorList::L0);
            *g = g.intersection(good);
        });
        out.pairs += 1;
        out.pairs_always_satisfied += always as u64;
        out.groups += groups.len() as u64;
        let uniform = groups.values().filter(|g| g.len() >= 3).count();
        out.groups_uniform += uniform as u64;
        out.pairs_uniform += (uniform == groups.len()) as u64;
        if let Some((outer, good)) = min_fail {
            let mut base = space.assemble(&outer);
            base.set(r, ColorList::L0);
            for (&i, &l) in outer_idx.iter().zip(&outer) {
                base_lists[i] = l;
            }
            let candidates: Vec<ColorList> = ColorList::L0.iter().map(|x| ColorList::L0.without(x)).collect();
            let good_lists = candidates
                .iter()
                .copied()
                .filter(|l| good.contains(l.missing_from_l0().expect("3-list")))
                .collect::<Vec<_>>();
            let report =
                ConditionReport { v, r, satisfied: good_lists.len() >= 3, candidate_lists: candidates, good_lists };
            let key = key(unit, nt, format!("{v}:{}", lists_hex(&base_lists)), exclusion);
            s.witness(HarnessWitness::ConditionFailure { key, instance: nt.clone(), base, report }, cfg.max_witnesses);
        }
    }
    out
}

fn thomassen_control(cfg: &HarnessConfig, unit: &Unit, nt: &NearTriangulation, s: &mut Summary) {
    let mut rng = ChaCha8Rng::seed_from_u64(unit_seed(cfg.seed, &unit.id));
    let u = cfg.thomassen_universe;
    let full = ColorList::full(u);
    let subsets = |size: usize| ColorList::sublists(u, size).collect::<Vec<_>>();
    let (threes, fives) = (subsets(3), subsets(5));
    for _ in 0..cfg.thomassen_samples {
        let mut lists = BTreeMap::new();
        let a = Color(rng.gen_range(1..=u));
        let b = loop {
            let b = Color(rng.gen_range(1..=u));
            if b != a {
                break b;
            }
        };
        for (i, &v) in nt.outer().vertices().iter().enumerate() {
            let l = match i {
                0 => ColorList::singleton(a),
                1 => ColorList::singleton(b),
                _ => threes[rng.gen_range(0..threes.len())],
            };
            lists.insert(v, l);
        }
        for v in nt.interior() {
            lists.insert(v, if u == 5 { full } else { fives[rng.gen_range(0..fives.len())] });
        }
        let a = ListAssignment::new(lists).without_exclusion();
        let outcome = thomassen_five(nt, &a)
            .map_err(|e| e.to_string())
            .and_then(|c| verify_colouring(nt, &a, &c).map_err(|e| e.to_string()));
        s.record(nt.n(), outcome.is_ok());
        if let Err(error) = outcome {
            let key = key(unit, nt, hex::encode(a.code()), false);
            s.witness(
                HarnessWitness::ThomassenFailure { key, instance: nt.clone(), lists: a, error },
                cfg.max_witnesses,
            );
        }
    }
}

fn four_colourability(cfg: &HarnessConfig, unit: &Unit, t: &Triangulation, s: &mut Summary) {
    let ok = is_four_colourable(t);
    s.record(t.n(), ok);
    match four_colour(t.graph(), EngineOptions::default()) {
        Ok(c) if crate::engine::verify_proper(t.graph(), &c).is_ok() => s.bump("engine_coloured", 1),
        Ok(_) => s.bump("engine_improper", 1),
        Err(_) => s.bump("engine_failed", 1),
    }
    if !ok {
        let key = WitnessKey { n: t.n(), k: 3, code: unit.code.clone(), assignment: String::new(), exclusion: false };
        s.witness(HarnessWitness::NotFourColourable { key, graph: t.graph().clone() }, cfg.max_witnesses);
    }
}

fn wheel_exclusion(cfg: &HarnessConfig, unit: &Unit, nt: &NearTriangulation, exclusion: bool, s: &mut Summary) {
    let engine = Theorem2Engine::new(nt);
    let solver = DenseSolver::new(nt.graph());
    let space = AssignmentSpace::new(nt, false);
    let outer_idx = engine.outer_indices().to_vec();
    let mut w = WheelSummary { k: nt.k(), n: nt.n(), exclusion_applied: exclusion, ..WheelSummary::default() };
    let mut min_uncolourable: Option<Vec<ColorList>> = None;
    for outer in space.exhaustive() {
        let alpha = outer[0].min().expect("1-list");
        let excluded_type = nt.k() > 3 && !outer[2].contains(alpha);
        if exclusion && excluded_type {
            continue;
        }
        let lists = engine.dense_from_outer(&outer);
        let satisfiable = solver.satisfiable(&lists);
        let engine_ok = match engine.run_dense(lists.clone(), exclusion, None) {
            Ok(c) => proper_dense(&solver, nt.graph(), &lists, &c),
            Err(_) => false,
        };
        w.assignments += 1;
        if excluded_type {
            w.excluded_type += 1;
            w.uncolourable_excluded_type += !satisfiable as u64;
            w.engine_failures_excluded_type += !engine_ok as u64;
        } else {
            w.uncolourable_other += !satisfiable as u64;
            w.engine_failures_other += !engine_ok as u64;
        }
        // only assignments the exclusion allows count against the claim
        s.record(nt.n(), excluded_type || satisfiable);
        if !satisfiable && min_uncolourable.as_ref().is_none_or(|m| &outer < m) {
            min_uncolourable = Some(outer.clone());
        }
        let mut base = lists.clone();
        for vp in 2..nt.k() - 1 {
            if outer[vp].len() != 3 {
                continue;
            }
            let good = condition_dense(&solver, &mut base, outer_idx[vp], outer_idx[vp + 1], None);
            w.condition_evaluations += 1;
            w.condition_failures += (good.len() < 3) as u64;
        }
    }
    w.exclusion_load_bearing = w.uncolourable_excluded_type > 0;
    s.bump("uncolourable", w.uncolourable_excluded_type + w.uncolourable_other);
    s.bump("engine_failures", w.engine_failures_excluded_type + w.engine_failures_other);
    s.bump("condition_failures", w.condition_failures);
    if let Some(outer) = min_uncolourable {
        let a = space.assemble(&outer);
        let key = key(unit, nt, lists_hex(&engine.dense_from_outer(&outer)), exclusion);
        s.witness(HarnessWitness::Uncolourable { key, instance: nt.clone(), lists: a }, cfg.max_witnesses);
    }
    s.wheels.push(w);
}

fn read_checkpoint(path: &PathBuf, hash: &str) -> Result<BTreeMap<String, (Check, Summary)>, HarnessError> {
    let mut done = BTreeMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(done),
        Err(e) => return Err(e.into()),
    };
    for line in BufReader::new(file).lines() {
        let line = line?;
        // a line cut off by an interrupted run is simply redone
        let Ok(entry) = serde_json::from_str::<CheckpointLine>(&line) else { continue };
        if entry.config_hash != hash {
            return Err(HarnessError::Checkpoint {
                path: path.clone(),
                reason: format!("written for configuration {}, not {hash}", entry.config_hash),
            });
        }
        done.insert(entry.unit, (entry.check, entry.summary));
    }
    Ok(done)
}

/// Runs every configured check.
pub fn run_harness(cfg: &HarnessConfig) -> Result<HarnessReport, HarnessError> {
    run_harness_with(cfg, &RunOptions::default())
}

/// As [`run_harness`], checkpointing finished units to `opts.checkpoint` and,
/// with `opts.resume`, skipping units already recorded there.
pub fn run_harness_with(cfg: &HarnessConfig, opts: &RunOptions) -> Result<HarnessReport, HarnessError> {
    cfg.validate()?;
    let hash = cfg.hash();
    let all = units(cfg)?;
    let mut done = match (&opts.checkpoint, opts.resume) {
        (Some(p), true) => read_checkpoint(p, &hash)?,
        _ => BTreeMap::new(),
    };
    let ids: HashSet<&str> = all.iter().map(|u| u.id.as_str()).collect();
    done.retain(|id, _| ids.contains(id.as_str()));
    let todo: Vec<&Unit> = all.iter().filter(|u| !done.contains_key(&u.id)).collect();
    let writer = match &opts.checkpoint {
        Some(p) => {
            let mut f = OpenOptions::new().create(true).append(true).open(p)?;
            if !opts.resume {
                f.set_len(0)?;
            } else if !fs::read(p)?.last().is_none_or(|&b| b == b'\n') {
                // start a fresh line after a record cut off mid-write
                writeln!(f)?;
            }
            Some(Mutex::new(f))
        }
        None => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let fresh: Vec<Result<(String, Check, Summary), HarnessError>> = pool.install(|| {
        todo.par_iter()
            .map(|unit| {
                let summary = run_unit(cfg, unit);
                if let Some(w) = &writer {
                    let line = serde_json::to_string(&CheckpointLine {
                        config_hash: hash.clone(),
                        unit: unit.id.clone(),
                        check: unit.check,
                        summary: summary.clone(),
                    })
                    .expect("summary serializes");
                    let mut f = w.lock().expect("checkpoint lock");
                    writeln!(f, "{line}")?;
                    f.flush()?;
                }
                Ok((unit.id.clone(), unit.check, summary))
            })
            .collect()
    });
    for r in fresh {
        let (id, check, summary) = r?;
        done.insert(id, (check, summary));
    }
    let mut merged: BTreeMap<Check, Summary> = cfg.checks.iter().map(|&c| (c, Summary::default())).collect();
    for (_, (check, summary)) in done {
        merged.entry(check).or_default().merge(summary, cfg.max_witnesses);
    }
    let checks = merged
        .into_iter()
        .map(|(check, summary)| {
            let verdict =
                if summary.totals.failures == 0 { Verdict::ConfirmedAtScale } else { Verdict::CounterexampleFound };
            let fractions = summary.condition.as_ref().map(condition_fractions).unwrap_or_default();
            (check, CheckReport { verdict, summary, fractions })
        })
        .collect();
    Ok(HarnessReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: hash,
        config: cfg.clone(),
        checks,
    })
}

fn condition_fractions(c: &ConditionSummary) -> BTreeMap<String, f64> {
    let ratio = |a: u64, b: u64| if b == 0 { 1.0 } else { a as f64 / b as f64 };
    BTreeMap::from([
        ("per_assignment".to_string(), ratio(c.satisfied, c.evaluations)),
        ("pairs_always".to_string(), ratio(c.pairs_always_satisfied, c.pairs)),
        ("uniform_groups".to_string(), ratio(c.groups_uniform, c.groups)),
        ("pairs_uniform".to_string(), ratio(c.pairs_uniform, c.pairs)),
    ])
}

/// Re-derives a recorded witness from its instance and lists. Engine
/// failures must reproduce the same witness, and replaying its stack must
/// rebuild the failing node exactly.
pub fn verify_witness(w: &HarnessWitness) -> Result<(), String> {
    match w {
        HarnessWitness::EngineFailure { key, instance, lists, failure } => {
            let mut lists = lists.clone();
            lists.v3_exclusion = key.exclusion;
            let engine = Theorem2Engine::new(instance);
            let dense = engine.dense_lists(&lists).map_err(|e| e.to_string())?;
            let again = engine.run_dense(dense, key.exclusion, None).err().ok_or("engine now succeeds")?;
            if *again != *failure {
                return Err("engine produced a different witness".into());
            }
            let back = replay(instance, &lists, &failure.stack).map_err(|e| e.to_string())?;
            if back != failure.instance {
                return Err("replay reached a different node".into());
            }
            if crate::oracle::first_colouring(instance.graph(), &lists).is_none() {
                return Err("instance is not colourable".into());
            }
            Ok(())
        }
        HarnessWitness::UnsoundColouring { instance, lists, colouring, violation, .. } => {
            match verify_colouring(instance, lists, colouring) {
                Err(v) if v == *violation => Ok(()),
                _ => Err("violation not reproduced".into()),
            }
        }
        HarnessWitness::ConditionFailure { instance, base, report, .. } => {
            let again = crate::oracle::check_neighbourhood_condition(instance, base, report.v, report.r, None)
                .map_err(|e| e.to_string())?;
            if again == *report {
                Ok(())
            } else {
                Err("condition report differs".into())
            }
        }
        HarnessWitness::Uncolourable { instance, lists, .. } => {
            match crate::oracle::first_colouring(instance.graph(), lists) {
                None => Ok(()),
                Some(_) => Err("instance is colourable".into()),
            }
        }
        HarnessWitness::ThomassenFailure { instance, lists, .. } => {
            match thomassen_five(instance, lists).map(|c| verify_colouring(instance, lists, &c)) {
                Ok(Ok(())) => Err("baseline now succeeds".into()),
                _ => Ok(()),
            }
        }
        HarnessWitness::NotFourColourable { graph, .. } => {
            let t = Triangulation::new(graph.clone()).map_err(|e| e.to_string())?;
            if is_four_colourable(&t) {
                Err("triangulation is four-colourable".into())
            } else {
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(checks: &[Check]) -> HarnessConfig {
        HarnessConfig {
            max_n: 5,
            condition_max_n: 5,
            four_colour_max_n: 7,
            checks: checks.iter().copied().collect(),
            wheel_ks: vec![4],
            ..HarnessConfig::default()
        }
    }

    #[test]
    fn config_hash_ignores_jobs() {
        let a = small(&[Check::EngineVsOracle]);
        let b = HarnessConfig { jobs: 3, ..a.clone() };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), HarnessConfig { seed: 1, ..a.clone() }.hash());
    }

    #[test]
    fn four_colourability_small() {
        let r = run_harness(&small(&[Check::FourColourability])).unwrap();
        let c = &r.checks[&Check::FourColourability];
        assert_eq!(c.summary.totals.instances, 1 + 1 + 2 + 5);
        assert_eq!(c.verdict, Verdict::ConfirmedAtScale);
    }

    #[test]
    fn totals_consistent_and_witnesses_replay() {
        let r = run_harness(&small(&Check::ALL)).unwrap();
        for c in r.checks.values() {
            let t = c.summary.totals;
            assert_eq!(t.passes + t.failures, t.instances);
            for w in c.summary.witnesses.iter().chain(c.summary.minimal_by_kind.values()) {
                assert_eq!(verify_witness(w), Ok(()), "{}", w.label());
            }
        }
    }

    #[test]
    fn merge_is_order_insensitive() {
        let cfg = small(&[Check::EngineVsOracle]);
        let us = units(&cfg).unwrap();
        let parts: Vec<Summary> = us.iter().map(|u| run_unit(&cfg, u)).collect();
        let mut fwd = Summary::default();
        for p in parts.iter().cloned() {
            fwd.merge(p, 3);
        }
        let mut back = Summary::default();
        for p in parts.into_iter().rev() {
            back.merge(p, 3);
        }
        assert_eq!(fwd, back);
    }

    #[test]
    fn bad_configs() {
        assert!(run_harness(&HarnessConfig { max_n: 2, ..HarnessConfig::default() }).is_err());
        assert!(run_harness(&HarnessConfig { k_range: (5, 4), ..HarnessConfig::default() }).is_err());
        let sample0 =
            HarnessConfig { assignment_mode: AssignmentMode::Sample { count: 0 }, ..HarnessConfig::default() };
        assert!(run_harness(&sample0).is_err());
    }
}
