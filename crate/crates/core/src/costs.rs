//! Closed-form cost accounting.
//!
//! Every metric is a symbol count for one machine in one round (storage is
//! normalized by the size of `A`, decoding is counted at the master). `m` is
//! the realization size. The proposed schemes are measured against four
//! earlier designs whose published cost rows are reproduced here only as
//! formulas.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::assignment::SystemParams;
use crate::elasticity::{storage_fraction, union_placement};
use crate::error::{Error, Result};
use crate::schemes::SchemeId;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CostRowId {
    Scheme(SchemeId),
    /// MDS-coded storage with uncoded download (matrix-vector design applied
    /// to matrix products).
    MdsStorage,
    /// Uncoded storage of all of `A` with Lagrange-coded download.
    UncodedStorageCodedDownload,
    /// Hierarchical uncoded storage with Lagrange-coded download.
    HierarchicalUncodedStorage,
    /// Coded storage and coded download; tolerates no stragglers.
    CodedStorageCodedDownload,
}

impl CostRowId {
    pub const ALL: [CostRowId; 7] = [
        CostRowId::Scheme(SchemeId::Scheme1),
        CostRowId::Scheme(SchemeId::Scheme2),
        CostRowId::Scheme(SchemeId::Scheme3),
        CostRowId::MdsStorage,
        CostRowId::UncodedStorageCodedDownload,
        CostRowId::HierarchicalUncodedStorage,
        CostRowId::CodedStorageCodedDownload,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CostRowId::Scheme(SchemeId::Scheme1) => "scheme1",
            CostRowId::Scheme(SchemeId::Scheme2) => "scheme2",
            CostRowId::Scheme(SchemeId::Scheme3) => "scheme3",
            CostRowId::MdsStorage => "mds-storage",
            CostRowId::UncodedStorageCodedDownload => "uncoded-storage-coded-download",
            CostRowId::HierarchicalUncodedStorage => "hierarchical-uncoded-storage",
            CostRowId::CodedStorageCodedDownload => "coded-storage-coded-download",
        }
    }

    /// Whether the design survives stragglers.
    pub fn straggler_tolerant(self) -> bool {
        self != CostRowId::CodedStorageCodedDownload
    }
}

impl fmt::Display for CostRowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CostRowId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CostRowId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .or_else(|| s.parse::<SchemeId>().ok().map(CostRowId::Scheme))
            .ok_or_else(|| Error::UnknownScheme(s.to_string()))
    }
}

/// Inputs to the cost formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostParams {
    /// Number of available machines.
    pub m: usize,
    pub l: usize,
    pub s: usize,
    pub q: usize,
    pub v: usize,
    pub r: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub id: CostRowId,
    pub storage: Rational,
    pub encoding: Rational,
    pub download: Rational,
    pub computing: Rational,
    pub upload: Rational,
    pub decoding: Rational,
    /// Set when `decoding` is only an order of magnitude (`O(1)`).
    pub decoding_order_only: bool,
}

impl CostReport {
    /// Metric values in column order.
    pub fn values(&self) -> [Rational; 6] {
        [
            self.storage,
            self.encoding,
            self.download,
            self.computing,
            self.upload,
            self.decoding,
        ]
    }
}

pub const COST_CSV_HEADER: &str = "id,storage,encoding,download,computing,upload,decoding";
pub const FIG2_CSV_HEADER: &str = "U,blue,black,green,red";

pub fn cost_row(id: CostRowId, p: &CostParams) -> Result<CostReport> {
    if p.l == 0 || p.m == 0 {
        return Err(Error::InvalidParams(
            "L and the machine count must be positive".into(),
        ));
    }
    if id.straggler_tolerant() && p.m < p.l + p.s {
        return Err(Error::InsufficientMachines {
            available: p.m,
            required: p.l + p.s,
        });
    }
    let int = |x: usize| Rational::from_integer(x as i128);
    let (m, l, ls) = (int(p.m), int(p.l), int(p.l + p.s));
    let (q, v, r) = (int(p.q), int(p.v), int(p.r));
    let one = Rational::from_integer(1);

    let per_group_compute = q * v * r * ls / (l * m);
    let per_group_upload = q * r * ls / (l * m);
    let [storage, encoding, download, computing, upload, decoding] = match id {
        CostRowId::Scheme(SchemeId::Scheme1) => [
            one / l,
            q * v,
            v * r * ls / m,
            per_group_compute,
            per_group_upload,
            q * r * l,
        ],
        CostRowId::Scheme(SchemeId::Scheme2) => [
            ls / (l * m),
            q * v * ls / m,
            v * r,
            per_group_compute,
            per_group_upload,
            q * r * l,
        ],
        CostRowId::Scheme(SchemeId::Scheme3) => [
            ls / (l * m),
            q * v * ls / m,
            v * r * ls / m,
            per_group_compute,
            q * r * ls / l,
            q * r * l * m,
        ],
        CostRowId::MdsStorage => [
            one / l,
            q * v,
            v * r,
            per_group_compute,
            per_group_upload,
            q * r * l,
        ],
        CostRowId::UncodedStorageCodedDownload => [
            one,
            v * r * ls / m,
            v * r * ls / (l * m),
            per_group_compute,
            per_group_upload,
            q * r * l,
        ],
        CostRowId::HierarchicalUncodedStorage => [
            ls / m,
            v * r,
            v * r / l,
            per_group_compute,
            per_group_upload,
            q * r * l,
        ],
        CostRowId::CodedStorageCodedDownload => [
            one / l,
            q * v + v * r * l / m,
            v * r / m,
            q * v * r / m,
            q * r * l,
            one,
        ],
    };
    Ok(CostReport {
        id,
        storage,
        encoding,
        download,
        computing,
        upload,
        decoding,
        decoding_order_only: id == CostRowId::CodedStorageCodedDownload,
    })
}

/// All seven rows, proposed schemes first.
pub fn cost_table(p: &CostParams) -> Result<Vec<CostReport>> {
    CostRowId::ALL.iter().map(|&id| cost_row(id, p)).collect()
}

/// Renders a rational as `num/den`, including integers (`216/1`).
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::ConfigError(format!("`{s}` is not a rational of the form num/den"));
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: i128 = n.trim().parse().map_err(|_| bad())?;
    let d: i128 = d.trim().parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

pub fn cost_table_csv(rows: &[CostReport]) -> String {
    let mut out = String::from(COST_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.values().iter().map(format_rational).collect();
        out.push_str(&format!("{},{}\n", row.id, cells.join(",")));
    }
    out
}

/// One point of the system-storage comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fig2Row {
    pub u: usize,
    /// Every machine stores a whole coded matrix: `N / L`.
    pub blue: Rational,
    /// Lower bound for uncoded storage where each row lives on `1 + U` machines.
    pub black: Rational,
    /// Every machine stores all of `A`: `N`.
    pub green: Rational,
    /// Union placement of Schemes 2 and 3.
    pub red: Rational,
}

/// System storage against `U = 0..=u_max`.
pub fn fig2_curves(n: usize, l: usize, s: usize, u_max: usize) -> Result<Vec<Fig2Row>> {
    (0..=u_max)
        .map(|u| {
            let params = SystemParams::new(n, l, s, u)?;
            let red = storage_fraction(&union_placement(SchemeId::Scheme2, &params)?).system;
            Ok(Fig2Row {
                u,
                blue: Rational::new(n as i128, l as i128),
                black: Rational::from_integer(1 + u as i128),
                green: Rational::from_integer(n as i128),
                red,
            })
        })
        .collect()
}

pub fn fig2_csv(rows: &[Fig2Row]) -> String {
    let mut out = String::from(FIG2_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.u,
            format_rational(&row.blue),
            format_rational(&row.black),
            format_rational(&row.green),
            format_rational(&row.red)
        ));
    }
    out
}
