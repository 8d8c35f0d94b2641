//! Availability realizations and the cyclic computation assignment.
//!
//! Machines are labelled `1..=N`. For an available set of size `m`, ranks are
//! taken in ascending label order (`i_1 < i_2 < ... < i_m`), and group
//! `W_g` holds the `L + S` consecutive ranks starting at `g`, wrapping with
//! the 1-based modulo [`mod1`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling for [`enumerate_realizations`].
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// `N` machines, recovery threshold `L`, straggler tolerance `S` and
/// preemption tolerance `U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemParams {
    pub n: usize,
    pub l: usize,
    pub s: usize,
    pub u: usize,
}

impl SystemParams {
    pub fn new(n: usize, l: usize, s: usize, u: usize) -> Result<Self> {
        let params = SystemParams { n, l, s, u };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l == 0 {
            return Err(Error::InvalidParams(
                "recovery threshold L must be at least 1".into(),
            ));
        }
        if self.n < self.l + self.s {
            return Err(Error::InvalidParams(format!(
                "N = {} is smaller than L + S = {}",
                self.n,
                self.l + self.s
            )));
        }
        if self.u > self.n - (self.l + self.s) {
            return Err(Error::InvalidParams(format!(
                "U = {} exceeds N - (L + S) = {}",
                self.u,
                self.n - (self.l + self.s)
            )));
        }
        Ok(())
    }

    /// Number of machines each group needs.
    pub fn group_size(&self) -> usize {
        self.l + self.s
    }

    /// Smallest realization size allowed.
    pub fn min_available(&self) -> usize {
        (self.n - self.u).max(self.l + self.s)
    }

    /// All realization sizes `m` that can occur, ascending.
    pub fn realization_sizes(&self) -> std::ops::RangeInclusive<usize> {
        self.min_available()..=self.n
    }
}

/// The set of machines available during one time step.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AvailabilityRealization {
    members: Vec<usize>,
}

impl AvailabilityRealization {
    /// Builds a realization from machine labels in any order; labels must be
    /// distinct and lie in `1..=machines`.
    pub fn new(mut members: Vec<usize>, machines: usize) -> Result<Self> {
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidParams(format!(
                "machine {} listed twice",
                w[0]
            )));
        }
        if let Some(&bad) = members.iter().find(|&&n| n == 0 || n > machines) {
            return Err(Error::InvalidParams(format!(
                "machine {bad} outside 1..={machines}"
            )));
        }
        Ok(AvailabilityRealization { members })
    }

    /// Every machine `1..=n` available.
    pub fn full(n: usize) -> Self {
        AvailabilityRealization {
            members: (1..=n).collect(),
        }
    }

    /// Checks the size bounds `max(N - U, L + S) <= m <= N`.
    pub fn check(&self, params: &SystemParams) -> Result<()> {
        let m = self.len();
        if m < params.l + params.s {
            return Err(Error::InsufficientMachines {
                available: m,
                required: params.l + params.s,
            });
        }
        if m < params.n - params.u || m > params.n {
            return Err(Error::InvalidParams(format!(
                "{m} available machines outside [{}, {}]",
                params.n - params.u,
                params.n
            )));
        }
        if self.members.last().is_some_and(|&last| last > params.n) {
            return Err(Error::InvalidParams(format!(
                "machine label above N = {}",
                params.n
            )));
        }
        Ok(())
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, machine: usize) -> bool {
        self.members.binary_search(&machine).is_ok()
    }

    /// `i_rank`, the machine holding the 1-based `rank`.
    pub fn machine_at(&self, rank: usize) -> usize {
        self.members[rank - 1]
    }

    /// 1-based rank of `machine`, if available.
    pub fn rank_of(&self, machine: usize) -> Option<usize> {
        self.members.binary_search(&machine).ok().map(|i| i + 1)
    }
}

/// Groups `W_1..W_m`, each a list of `L + S` machine labels in rank order
/// starting from rank `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComputationAssignment {
    groups: Vec<Vec<usize>>,
}

impl ComputationAssignment {
    /// `W_g` for the 1-based group index `g`.
    pub fn group(&self, g: usize) -> &[usize] {
        &self.groups[g - 1]
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Number of groups, equal to the realization size.
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Groups containing `machine`, ascending.
    pub fn groups_of(&self, machine: usize) -> Vec<usize> {
        self.groups
            .iter()
            .enumerate()
            .filter(|(_, w)| w.contains(&machine))
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// 1-based modulo: `a - m·⌊(a-1)/m⌋`, landing in `1..=m`.
pub fn mod1(a: usize, m: usize) -> usize {
    assert!(a >= 1 && m >= 1, "mod1 needs positive operands");
    a - m * ((a - 1) / m)
}

pub fn cyclic_assignment(
    realization: &AvailabilityRealization,
    l: usize,
    s: usize,
) -> Result<ComputationAssignment> {
    let m = realization.len();
    let size = l + s;
    if m < size || l == 0 {
        return Err(Error::InsufficientMachines {
            available: m,
            required: size.max(1),
        });
    }
    let groups = (1..=m)
        .map(|g| {
            (0..size)
                .map(|j| realization.machine_at(mod1(g + j, m)))
                .collect()
        })
        .collect();
    Ok(ComputationAssignment { groups })
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of realizations in the availability set, without listing them.
pub fn realization_count(params: &SystemParams) -> u128 {
    params
        .realization_sizes()
        .map(|k| binomial(params.n, k))
        .sum()
}

/// Lists every admissible realization: larger sets first, lexicographic
/// within a size.
pub fn enumerate_realizations(
    params: &SystemParams,
    cap: u128,
) -> Result<Vec<AvailabilityRealization>> {
    params.validate()?;
    let count = realization_count(params);
    if count > cap {
        return Err(Error::EnumerationTooLarge { count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    for k in params.realization_sizes().rev() {
        let mut combo: Vec<usize> = (1..=k).collect();
        loop {
            out.push(AvailabilityRealization {
                members: combo.clone(),
            });
            // Advance to the next k-combination of 1..=n in lexicographic order.
            let Some(i) = (0..k).rev().find(|&i| combo[i] < params.n - (k - 1 - i)) else {
                break;
            };
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    Ok(out)
}
