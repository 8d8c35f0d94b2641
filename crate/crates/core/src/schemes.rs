//! The three storage/download/compute/decode schemes for a fixed realization.
//!
//! `A` is split row-wise into `L` blocks `A_1..A_L`. Every machine's coded
//! content is (part of) `Ã_n = X(α_n)`, a `(q/L) × v` matrix:
//!
//! | scheme | stores                            | downloads                | computes          |
//! |--------|-----------------------------------|--------------------------|-------------------|
//! | 1      | all of `Ã_n`                      | column blocks `B_g`      | `Ã_n · B_g`       |
//! | 2      | row slices `Ã_{n,g}` of `Ã_n`     | all of `B`               | `Ã_{n,g} · B`     |
//! | 3      | column slices `Ã_{n,g}` of `Ã_n`  | row blocks `B_g`         | `Ã_{n,g} · B_g`   |
//!
//! In each case `g` ranges over the groups containing machine `n`, so every
//! machine handles `L + S` tasks and every group can lose `S` results.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::{
    cyclic_assignment, AvailabilityRealization, ComputationAssignment, SystemParams,
};
use crate::error::{Error, Result};
use crate::ffield::FieldElement;
use crate::lagrange::{encode_block, weights_raw, EvaluationPoints, WeightCache};
use crate::matrix::{assemble, linear_combination, partition, Axis, BlockLayout, FieldMatrix};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemeId {
    #[serde(rename = "1")]
    Scheme1,
    #[serde(rename = "2")]
    Scheme2,
    #[serde(rename = "3")]
    Scheme3,
}

impl SchemeId {
    pub const ALL: [SchemeId; 3] = [SchemeId::Scheme1, SchemeId::Scheme2, SchemeId::Scheme3];

    /// Axis of `Ã_n` along which the scheme stores slices; `None` when the
    /// whole coded matrix is stored.
    pub fn storage_axis(self) -> Option<Axis> {
        match self {
            SchemeId::Scheme1 => None,
            SchemeId::Scheme2 => Some(Axis::Rows),
            SchemeId::Scheme3 => Some(Axis::Cols),
        }
    }

    /// Axis along which `B` is cut into `m` blocks; `None` when `B` is sent whole.
    pub fn download_axis(self) -> Option<Axis> {
        match self {
            SchemeId::Scheme1 => Some(Axis::Cols),
            SchemeId::Scheme2 => None,
            SchemeId::Scheme3 => Some(Axis::Rows),
        }
    }

    /// Checks that `dims` split evenly for threshold `l` and realization size `m`.
    pub fn check_dims(self, dims: Dims, l: usize, m: usize) -> Result<()> {
        let split = |dimension: usize, parts: usize| {
            BlockLayout::new(Axis::Rows, dimension, parts).map(|_| ())
        };
        split(dims.q, l)?;
        match self {
            SchemeId::Scheme1 => split(dims.r, m),
            SchemeId::Scheme2 => split(dims.q / l, m),
            SchemeId::Scheme3 => split(dims.v, m),
        }
    }

    /// Shape of one uploaded result.
    pub fn result_shape(self, dims: Dims, l: usize, m: usize) -> (usize, usize) {
        match self {
            SchemeId::Scheme1 => (dims.q / l, dims.r / m),
            SchemeId::Scheme2 => (dims.q / (l * m), dims.r),
            SchemeId::Scheme3 => (dims.q / l, dims.r),
        }
    }

    /// Range of `Ã_n` (rows for Scheme 2, columns for Scheme 3) holding group
    /// `g`'s slice at realization size `m`. Scheme 1 needs all rows.
    pub fn slice_range(self, dims: Dims, l: usize, m: usize, g: usize) -> (Axis, Range<usize>) {
        match self {
            SchemeId::Scheme1 => (Axis::Rows, 0..dims.q / l),
            SchemeId::Scheme2 => {
                let h = dims.q / (l * m);
                (Axis::Rows, (g - 1) * h..g * h)
            }
            SchemeId::Scheme3 => {
                let w = dims.v / m;
                (Axis::Cols, (g - 1) * w..g * w)
            }
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            SchemeId::Scheme1 => 1,
            SchemeId::Scheme2 => 2,
            SchemeId::Scheme3 => 3,
        };
        write!(f, "scheme{n}")
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().trim_start_matches("scheme") {
            "1" => Ok(SchemeId::Scheme1),
            "2" => Ok(SchemeId::Scheme2),
            "3" => Ok(SchemeId::Scheme3),
            _ => Err(Error::UnknownScheme(s.to_string())),
        }
    }
}

/// `A` is `q × v`, every `B` is `v × r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub q: usize,
    pub v: usize,
    pub r: usize,
}

/// One stored piece of a machine's coded matrix `Ã_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredUnit {
    /// Group served by this unit; `None` for whole-matrix or union storage.
    pub group: Option<usize>,
    pub axis: Axis,
    /// Rows (or columns) of `Ã_n` covered.
    pub range: Range<usize>,
    /// Realization size the unit was cut for; `None` for union storage.
    pub granularity: Option<usize>,
}

impl StoredUnit {
    pub fn symbols(&self, dims: Dims, l: usize) -> usize {
        match self.axis {
            Axis::Rows => self.range.len() * dims.v,
            Axis::Cols => self.range.len() * (dims.q / l),
        }
    }
}

/// Per-machine storage layout as intervals of `Ã_n`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoragePlan {
    pub units: BTreeMap<usize, Vec<StoredUnit>>,
}

impl StoragePlan {
    pub fn symbols(&self, machine: usize, dims: Dims, l: usize) -> usize {
        self.units
            .get(&machine)
            .map_or(0, |units| units.iter().map(|u| u.symbols(dims, l)).sum())
    }

    /// Stored volume of `machine` divided by the size of `A`.
    pub fn normalized_size(&self, machine: usize, dims: Dims, l: usize) -> Rational {
        Rational::new(
            self.symbols(machine, dims, l) as i128,
            (dims.q * dims.v) as i128,
        )
    }
}

/// A materialized piece of `Ã_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodedSegment {
    pub axis: Axis,
    pub range: Range<usize>,
    pub payload: FieldMatrix,
}

/// Everything machine `n` holds after storage placement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineStore {
    pub machine: usize,
    pub point: FieldElement,
    pub segments: Vec<CodedSegment>,
}

impl MachineStore {
    /// Extracts `range` of `Ã_n` along `axis` if one stored segment covers it.
    pub fn fetch(&self, axis: Axis, range: Range<usize>) -> Option<FieldMatrix> {
        self.segments
            .iter()
            .find(|s| s.axis == axis && s.range.start <= range.start && range.end <= s.range.end)
            .and_then(|s| {
                let offset = s.range.start;
                s.payload
                    .slice(axis, range.start - offset..range.end - offset)
                    .ok()
            })
    }

    pub fn symbols(&self) -> usize {
        self.segments.iter().map(|s| s.payload.len()).sum()
    }
}

/// Result of the storage placement phase.
#[derive(Clone, Debug)]
pub struct Placement {
    pub scheme: SchemeId,
    pub dims: Dims,
    pub threshold: usize,
    pub plan: StoragePlan,
    pub stores: BTreeMap<usize, MachineStore>,
    /// Multiplications the master spent encoding each machine's content.
    pub encode_mults: BTreeMap<usize, u64>,
}

/// Row blocks `A_1..A_L`.
fn data_blocks(a: &FieldMatrix, l: usize) -> Result<Vec<FieldMatrix>> {
    partition(a, Axis::Rows, l)
}

/// Encodes `range` (along `axis`) of every `A_l` at `alpha`: a slice of `Ã_n`.
pub(crate) fn encode_slice(
    blocks: &[FieldMatrix],
    points: &EvaluationPoints,
    alpha: FieldElement,
    axis: Axis,
    range: Range<usize>,
) -> Result<(FieldMatrix, u64)> {
    let parts = blocks
        .iter()
        .map(|b| b.slice(axis, range.clone()))
        .collect::<Result<Vec<_>>>()?;
    let mults = (parts.len() * parts[0].len()) as u64;
    Ok((encode_block(&parts, points.betas(), alpha)?, mults))
}

pub(crate) fn placement_from_ranges(
    scheme: SchemeId,
    dims: Dims,
    points: &EvaluationPoints,
    a: &FieldMatrix,
    units: BTreeMap<usize, Vec<StoredUnit>>,
) -> Result<Placement> {
    let l = points.threshold();
    let blocks = data_blocks(a, l)?;
    let mut stores = BTreeMap::new();
    let mut encode_mults = BTreeMap::new();
    for (&machine, machine_units) in &units {
        let alpha = points.alpha(machine);
        let mut segments = Vec::with_capacity(machine_units.len());
        let mut mults = 0;
        for unit in machine_units {
            let (payload, cost) =
                encode_slice(&blocks, points, alpha, unit.axis, unit.range.clone())?;
            mults += cost;
            segments.push(CodedSegment {
                axis: unit.axis,
                range: unit.range.clone(),
                payload,
            });
        }
        stores.insert(
            machine,
            MachineStore {
                machine,
                point: alpha,
                segments,
            },
        );
        encode_mults.insert(machine, mults);
    }
    Ok(Placement {
        scheme,
        dims,
        threshold: l,
        plan: StoragePlan { units },
        stores,
        encode_mults,
    })
}

fn dims_of(a: &FieldMatrix, r: usize) -> Dims {
    Dims {
        q: a.rows(),
        v: a.cols(),
        r,
    }
}

/// Storage placement for one realization.
///
/// `r` is the column count of the inputs that will be multiplied later; it
/// only matters for the Scheme 1 divisibility check.
pub fn storage_plan(
    scheme: SchemeId,
    params: &SystemParams,
    realization: &AvailabilityRealization,
    points: &EvaluationPoints,
    a: &FieldMatrix,
    r: usize,
) -> Result<Placement> {
    let l = params.l;
    if points.threshold() != l || points.machines() != params.n {
        return Err(Error::InvalidParams(format!(
            "evaluation points are for N = {}, L = {} but the system has N = {}, L = {l}",
            points.machines(),
            points.threshold(),
            params.n
        )));
    }
    let m = realization.len();
    let dims = dims_of(a, r);
    scheme.check_dims(dims, l, m)?;
    let assignment = cyclic_assignment(realization, l, params.s)?;
    let mut units = BTreeMap::new();
    for &machine in realization.members() {
        let machine_units = match scheme {
            SchemeId::Scheme1 => vec![StoredUnit {
                group: None,
                axis: Axis::Rows,
                range: 0..dims.q / l,
                granularity: Some(m),
            }],
            _ => assignment
                .groups_of(machine)
                .into_iter()
                .map(|g| {
                    let (axis, range) = scheme.slice_range(dims, l, m, g);
                    StoredUnit {
                        group: Some(g),
                        axis,
                        range,
                        granularity: Some(m),
                    }
                })
                .collect(),
        };
        units.insert(machine, machine_units);
    }
    placement_from_ranges(scheme, dims, points, a, units)
}

/// What a machine fetches from the master for one round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Download {
    /// Block indices `g` of `B` (column blocks for Scheme 1, row blocks for Scheme 3).
    Blocks(Vec<usize>),
    Entire,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DownloadPlan {
    pub per_machine: BTreeMap<usize, Download>,
}

/// Blocks of `B` a machine received, keyed by group (`None` for all of `B`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DownloadedInputs {
    pub machine: usize,
    pub blocks: Vec<(Option<usize>, FieldMatrix)>,
}

impl DownloadedInputs {
    pub fn symbols(&self) -> usize {
        self.blocks.iter().map(|(_, b)| b.len()).sum()
    }

    fn block(&self, group: Option<usize>) -> Option<&FieldMatrix> {
        self.blocks
            .iter()
            .find(|(g, _)| *g == group)
            .map(|(_, b)| b)
    }
}

pub fn download_plan(
    scheme: SchemeId,
    realization: &AvailabilityRealization,
    assignment: &ComputationAssignment,
    b: &FieldMatrix,
) -> Result<(DownloadPlan, BTreeMap<usize, DownloadedInputs>)> {
    let m = assignment.len();
    let blocks = match scheme.download_axis() {
        Some(axis) => Some(partition(b, axis, m)?),
        None => None,
    };
    let mut plan = DownloadPlan::default();
    let mut inputs = BTreeMap::new();
    for &machine in realization.members() {
        let (entry, received) = match &blocks {
            Some(blocks) => {
                let groups = assignment.groups_of(machine);
                let received = groups
                    .iter()
                    .map(|&g| (Some(g), blocks[g - 1].clone()))
                    .collect();
                (Download::Blocks(groups), received)
            }
            None => (Download::Entire, vec![(None, b.clone())]),
        };
        plan.per_machine.insert(machine, entry);
        inputs.insert(
            machine,
            DownloadedInputs {
                machine,
                blocks: received,
            },
        );
    }
    Ok((plan, inputs))
}

/// One uploaded evaluation `F_g(α_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResultPoint {
    pub group: usize,
    pub machine: usize,
    pub point: FieldElement,
    pub payload: FieldMatrix,
    /// Arrival tick at the master; ties are broken by machine label.
    pub arrival: u64,
}

#[derive(Clone, Debug)]
pub struct WorkerOutput {
    pub results: Vec<ResultPoint>,
    pub mults: u64,
}

impl WorkerOutput {
    pub fn upload_symbols(&self) -> usize {
        self.results.iter().map(|r| r.payload.len()).sum()
    }
}

/// Runs machine `machine`'s tasks: one product per group it belongs to.
pub fn worker_compute(
    scheme: SchemeId,
    machine: usize,
    store: &MachineStore,
    inputs: &DownloadedInputs,
    assignment: &ComputationAssignment,
    dims: Dims,
    threshold: usize,
) -> Result<WorkerOutput> {
    let m = assignment.len();
    let missing = |detail: String| Error::IncompleteInputs { machine, detail };
    let mut results = Vec::new();
    let mut mults = 0u64;
    for g in assignment.groups_of(machine) {
        let (axis, range) = scheme.slice_range(dims, threshold, m, g);
        let coded = store.fetch(axis, range.clone()).ok_or_else(|| {
            missing(format!(
                "no stored coded slice {axis:?} {range:?} for group {g}"
            ))
        })?;
        let key = match scheme {
            SchemeId::Scheme2 => None,
            _ => Some(g),
        };
        let input = inputs
            .block(key)
            .ok_or_else(|| missing(format!("input block for group {g} was not downloaded")))?;
        let payload = coded.matmul(input)?;
        mults += (coded.rows() * coded.cols() * input.cols()) as u64;
        results.push(ResultPoint {
            group: g,
            machine,
            point: store.point,
            payload,
            arrival: 0,
        });
    }
    Ok(WorkerOutput { results, mults })
}

#[derive(Clone, Debug)]
pub struct DecodeOutput {
    pub product: FieldMatrix,
    /// Multiplications spent on interpolation.
    pub mults: u64,
    /// Machines whose results were used, per group.
    pub decode_sets: Vec<Vec<usize>>,
}

/// Picks the first `L` arrivals from `W_g` for every group.
fn select_decode_sets<'a>(
    results: &'a [ResultPoint],
    assignment: &ComputationAssignment,
    threshold: usize,
) -> Result<Vec<Vec<&'a ResultPoint>>> {
    let mut by_group: Vec<Vec<&ResultPoint>> = vec![Vec::new(); assignment.len()];
    for r in results {
        if r.group == 0
            || r.group > assignment.len()
            || !assignment.group(r.group).contains(&r.machine)
        {
            return Err(Error::DimError(format!(
                "result from machine {} for group {} does not match the assignment",
                r.machine, r.group
            )));
        }
        by_group[r.group - 1].push(r);
    }
    by_group
        .into_iter()
        .enumerate()
        .map(|(i, mut rs)| {
            rs.sort_by_key(|r| (r.arrival, r.machine));
            let mut seen = BTreeSet::new();
            rs.retain(|r| seen.insert(r.machine));
            if rs.len() < threshold {
                return Err(Error::DecodeThresholdNotMet { group: i + 1 });
            }
            rs.truncate(threshold);
            Ok(rs)
        })
        .collect()
}

/// Recovers `A·B` from the uploaded results.
///
/// For each group the first `L` arrivals are interpolated at every `β_l`.
/// Scheme 1 yields the `(l, g)` tiles of the product, Scheme 2 its row bands,
/// and Scheme 3 the partial products `A_{l,g} B_g`, which are summed over `g`.
pub fn master_decode(
    scheme: SchemeId,
    results: &[ResultPoint],
    assignment: &ComputationAssignment,
    points: &EvaluationPoints,
    dims: Dims,
    cache: Option<&WeightCache>,
) -> Result<DecodeOutput> {
    let l = points.threshold();
    let m = assignment.len();
    let field = points.field();
    let expected = scheme.result_shape(dims, l, m);
    for r in results {
        if r.payload.shape() != expected {
            return Err(Error::DimError(format!(
                "result from machine {} for group {} is {:?}, expected {expected:?}",
                r.machine,
                r.group,
                r.payload.shape()
            )));
        }
    }
    let chosen = select_decode_sets(results, assignment, l)?;

    // decoded[g][l] = F_g(β_l)
    let decoded: Vec<Vec<FieldMatrix>> = chosen
        .par_iter()
        .map(|set| {
            let nodes: Vec<u64> = set.iter().map(|r| r.point.value()).collect();
            let values: Vec<&FieldMatrix> = set.iter().map(|r| &r.payload).collect();
            points
                .betas()
                .iter()
                .map(|beta| {
                    let weights = match cache {
                        Some(c) => c.weights(field, &nodes, beta.value())?,
                        None => std::sync::Arc::new(weights_raw(field, &nodes, beta.value())?),
                    };
                    linear_combination(&values, &weights)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mults = (m * l * l * expected.0 * expected.1) as u64;

    let product = match scheme {
        SchemeId::Scheme1 => {
            let bands = (0..l)
                .map(|li| {
                    let tiles: Vec<FieldMatrix> =
                        decoded.iter().map(|per_g| per_g[li].clone()).collect();
                    assemble(&tiles, Axis::Cols)
                })
                .collect::<Result<Vec<_>>>()?;
            assemble(&bands, Axis::Rows)?
        }
        SchemeId::Scheme2 => {
            let bands: Vec<FieldMatrix> = (0..l)
                .flat_map(|li| decoded.iter().map(move |per_g| per_g[li].clone()))
                .collect();
            assemble(&bands, Axis::Rows)?
        }
        SchemeId::Scheme3 => {
            let bands = (0..l)
                .map(|li| {
                    let mut sum = FieldMatrix::zeros(field, expected.0, expected.1);
                    for per_g in &decoded {
                        sum.add_assign(&per_g[li])?;
                    }
                    Ok(sum)
                })
                .collect::<Result<Vec<_>>>()?;
            assemble(&bands, Axis::Rows)?
        }
    };
    let decode_sets = chosen
        .iter()
        .map(|set| set.iter().map(|r| r.machine).collect())
        .collect();
    Ok(DecodeOutput {
        product,
        mults,
        decode_sets,
    })
}

/// Per-machine symbol and multiplication counts for one round.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineLedger {
    pub machine: usize,
    pub storage_symbols: u64,
    pub encode_mults: u64,
    pub download_symbols: u64,
    pub compute_mults: u64,
    pub upload_symbols: u64,
}

/// Everything observable about one round.
#[derive(Clone, Debug)]
pub struct RoundOutcome {
    pub assignment: ComputationAssignment,
    pub downloads: DownloadPlan,
    pub ledger: Vec<MachineLedger>,
    /// Decoded product, or the decode error.
    pub decoded: Result<DecodeOutput>,
}

/// Runs download, computation and decoding for one realization.
///
/// Machines in `stragglers` download and start their tasks but their results
/// never reach the master, so they report no computation or upload.
#[allow(clippy::too_many_arguments)]
pub fn run_round(
    placement: &Placement,
    params: &SystemParams,
    realization: &AvailabilityRealization,
    points: &EvaluationPoints,
    b: &FieldMatrix,
    stragglers: &BTreeSet<usize>,
    cache: Option<&WeightCache>,
) -> Result<RoundOutcome> {
    let scheme = placement.scheme;
    let dims = Dims {
        r: b.cols(),
        ..placement.dims
    };
    if b.rows() != dims.v {
        return Err(Error::DimError(format!(
            "input has {} rows but the data matrix has {} columns",
            b.rows(),
            dims.v
        )));
    }
    scheme.check_dims(dims, params.l, realization.len())?;
    let assignment = cyclic_assignment(realization, params.l, params.s)?;
    let (downloads, inputs) = download_plan(scheme, realization, &assignment, b)?;

    let outputs = realization
        .members()
        .par_iter()
        .filter(|n| !stragglers.contains(n))
        .map(|&n| {
            let store = placement
                .stores
                .get(&n)
                .ok_or_else(|| Error::IncompleteInputs {
                    machine: n,
                    detail: "machine holds no coded data".into(),
                })?;
            worker_compute(scheme, n, store, &inputs[&n], &assignment, dims, params.l)
                .map(|o| (n, o))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;

    let ledger = realization
        .members()
        .iter()
        .map(|&n| {
            let out = outputs.get(&n);
            MachineLedger {
                machine: n,
                storage_symbols: placement.stores.get(&n).map_or(0, |s| s.symbols() as u64),
                encode_mults: placement.encode_mults.get(&n).copied().unwrap_or(0),
                download_symbols: inputs[&n].symbols() as u64,
                compute_mults: out.map_or(0, |o| o.mults),
                upload_symbols: out.map_or(0, |o| o.upload_symbols() as u64),
            }
        })
        .collect();

    let results: Vec<ResultPoint> = outputs.into_values().flat_map(|o| o.results).collect();
    let decoded = master_decode(scheme, &results, &assignment, points, dims, cache);
    Ok(RoundOutcome {
        assignment,
        downloads,
        ledger,
        decoded,
    })
}
