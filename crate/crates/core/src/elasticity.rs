//! Storage that serves every availability realization without re-placement.
//!
//! Under Schemes 2 and 3 the slice a machine stores for group `g` at
//! realization size `m` is the `g`-th of `m` equal bands of its coded matrix
//! `Ã_n` (rows for Scheme 2, columns for Scheme 3). Normalizing the band axis
//! to `[0, 1)`, that slice is `[(g-1)/m, g/m)`, so slices cut for different
//! sizes can be merged as plain intervals. A machine's union placement is the
//! union of these intervals over all realizations it can appear in.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::assignment::{cyclic_assignment, mod1, AvailabilityRealization, SystemParams};
use crate::error::{Error, Result};
use crate::lagrange::EvaluationPoints;
use crate::matrix::{Axis, FieldMatrix};
use crate::schemes::{placement_from_ranges, Dims, Placement, SchemeId, StoredUnit};
use crate::Rational;

/// Half-open interval `[start, end)` with exact endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub start: Rational,
    pub end: Rational,
}

impl Interval {
    pub fn new(start: Rational, end: Rational) -> Self {
        Interval { start, end }
    }

    pub fn len(&self) -> Rational {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

/// Sorted, pairwise disjoint, non-adjacent, nonempty intervals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntervalUnion {
    intervals: Vec<Interval>,
}

impl IntervalUnion {
    pub fn new() -> Self {
        Self::default()
    }

    /// `[0, 1)`.
    pub fn unit() -> Self {
        IntervalUnion {
            intervals: vec![Interval::new(Rational::zero(), Rational::one())],
        }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn insert(&mut self, interval: Interval) {
        if interval.is_empty() {
            return;
        }
        let mut merged = interval;
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut placed = false;
        for &cur in &self.intervals {
            if cur.end < merged.start {
                out.push(cur);
            } else if merged.end < cur.start {
                if !placed {
                    out.push(merged);
                    placed = true;
                }
                out.push(cur);
            } else {
                // Overlapping or touching: absorb.
                merged.start = merged.start.min(cur.start);
                merged.end = merged.end.max(cur.end);
            }
        }
        if !placed {
            out.push(merged);
        }
        self.intervals = out;
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut out = self.clone();
        for &i in &other.intervals {
            out.insert(i);
        }
        out
    }

    /// Total length.
    pub fn measure(&self) -> Rational {
        self.intervals.iter().map(Interval::len).sum()
    }

    /// Whether a single member interval covers `interval`.
    pub fn covers(&self, interval: &Interval) -> bool {
        interval.is_empty()
            || self
                .intervals
                .iter()
                .any(|i| i.start <= interval.start && interval.end <= i.end)
    }

    pub fn covers_all(&self, other: &IntervalUnion) -> bool {
        other.intervals.iter().all(|i| self.covers(i))
    }
}

impl FromIterator<Interval> for IntervalUnion {
    fn from_iter<T: IntoIterator<Item = Interval>>(iter: T) -> Self {
        let mut out = IntervalUnion::new();
        for i in iter {
            out.insert(i);
        }
        out
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.intervals.iter().map(Interval::to_string).collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}

/// Normalized band `[(g-1)/m, g/m)`.
pub fn group_interval(g: usize, m: usize) -> Interval {
    Interval::new(
        Rational::new((g - 1) as i128, m as i128),
        Rational::new(g as i128, m as i128),
    )
}

/// Every `(m, ρ)` such that machine `n` has rank `ρ` in some realization of size `m`.
pub fn machine_windows(params: &SystemParams, n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for m in params.realization_sizes().rev() {
        // Rank ρ needs ρ - 1 available machines below n and m - ρ above it.
        let lo = 1.max((m + n).saturating_sub(params.n));
        let hi = m.min(n);
        out.extend((lo..=hi).map(|rho| (m, rho)));
    }
    out
}

/// Per-machine union of normalized slices of `Ã_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionStoragePlan {
    pub scheme: SchemeId,
    pub params: SystemParams,
    pub per_machine: BTreeMap<usize, IntervalUnion>,
}

impl UnionStoragePlan {
    pub fn machine(&self, n: usize) -> &IntervalUnion {
        &self.per_machine[&n]
    }
}

pub fn union_placement(scheme: SchemeId, params: &SystemParams) -> Result<UnionStoragePlan> {
    params.validate()?;
    let size = params.group_size();
    let per_machine = (1..=params.n)
        .map(|n| {
            let set = match scheme {
                SchemeId::Scheme1 => IntervalUnion::unit(),
                _ => machine_windows(params, n)
                    .into_iter()
                    .flat_map(|(m, rho)| {
                        (0..size).map(move |j| group_interval(mod1(rho + m - j, m), m))
                    })
                    .collect(),
            };
            (n, set)
        })
        .collect();
    Ok(UnionStoragePlan {
        scheme,
        params: *params,
        per_machine,
    })
}

/// Normalized slices each available machine needs for one realization.
pub fn required_intervals(
    scheme: SchemeId,
    realization: &AvailabilityRealization,
    l: usize,
    s: usize,
) -> Result<BTreeMap<usize, IntervalUnion>> {
    let assignment = cyclic_assignment(realization, l, s)?;
    let m = realization.len();
    Ok(realization
        .members()
        .iter()
        .map(|&n| {
            let set = match scheme {
                SchemeId::Scheme1 => IntervalUnion::unit(),
                _ => assignment
                    .groups_of(n)
                    .into_iter()
                    .map(|g| group_interval(g, m))
                    .collect(),
            };
            (n, set)
        })
        .collect())
}

/// Storage normalized by the size of `A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StorageFraction {
    pub per_machine: BTreeMap<usize, Rational>,
    pub system: Rational,
}

/// `Ã_n` is `1/L` of `A`, so a machine holding measure `μ` of it stores `μ / L`.
pub fn storage_fraction(plan: &UnionStoragePlan) -> StorageFraction {
    let l = Rational::from_integer(plan.params.l as i128);
    let per_machine: BTreeMap<usize, Rational> = plan
        .per_machine
        .iter()
        .map(|(&n, set)| (n, set.measure() / l))
        .collect();
    let system = per_machine.values().copied().sum();
    StorageFraction {
        per_machine,
        system,
    }
}

fn to_index(x: Rational, extent: usize) -> Result<usize> {
    let scaled = x * Rational::from_integer(extent as i128);
    if scaled.is_integer() {
        Ok(scaled.to_integer() as usize)
    } else {
        Err(Error::PartitionError {
            dimension: extent,
            parts: *x.denom() as usize,
        })
    }
}

/// Encodes the union plan into concrete per-machine stores.
///
/// Requires the stored axis of `Ã_n` to split evenly for every realization
/// size, i.e. `q/L` (Scheme 2) or `v` (Scheme 3) divisible by each `m`, and
/// `r` divisible by each `m` for Scheme 1.
pub fn materialize_union(
    plan: &UnionStoragePlan,
    points: &EvaluationPoints,
    a: &FieldMatrix,
    r: usize,
) -> Result<Placement> {
    let params = plan.params;
    let dims = Dims {
        q: a.rows(),
        v: a.cols(),
        r,
    };
    for m in params.realization_sizes() {
        plan.scheme.check_dims(dims, params.l, m)?;
    }
    let (axis, extent) = match plan.scheme.storage_axis() {
        Some(Axis::Cols) => (Axis::Cols, dims.v),
        _ => (Axis::Rows, dims.q / params.l),
    };
    let mut units = BTreeMap::new();
    for (&n, set) in &plan.per_machine {
        let machine_units = set
            .intervals()
            .iter()
            .map(|i| {
                Ok(StoredUnit {
                    group: None,
                    axis,
                    range: to_index(i.start, extent)?..to_index(i.end, extent)?,
                    granularity: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        units.insert(n, machine_units);
    }
    placement_from_ranges(plan.scheme, dims, points, a, units)
}
