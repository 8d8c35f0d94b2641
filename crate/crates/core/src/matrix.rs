//! Dense row-major matrices over a prime field.
//!
//! Besides the arithmetic the coding schemes need, this module provides
//! [`partition`]/[`assemble`] for equal block splits and the textbook
//! [`reference_matmul`] that every decoded product is checked against.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{FieldElement, PrimeField};

/// Direction of a block split. `Rows` cuts a matrix into horizontal bands
/// (blocks are stacked top to bottom), `Cols` into vertical strips.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Rows,
    Cols,
}

/// Shape of an equal split along one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockLayout {
    pub axis: Axis,
    pub parts: usize,
    pub part_extent: usize,
}

impl BlockLayout {
    pub fn new(axis: Axis, dimension: usize, parts: usize) -> Result<Self> {
        if parts == 0 || !dimension.is_multiple_of(parts) {
            return Err(Error::PartitionError { dimension, parts });
        }
        Ok(BlockLayout {
            axis,
            parts,
            part_extent: dimension / parts,
        })
    }

    /// Index range of the `index`-th block (0-based) along the split axis.
    pub fn range(&self, index: usize) -> Range<usize> {
        index * self.part_extent..(index + 1) * self.part_extent
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
    field: PrimeField,
}

impl FieldMatrix {
    /// Builds a matrix from row-major entries, reducing them into the field.
    pub fn new(field: PrimeField, rows: usize, cols: usize, mut data: Vec<u64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimError(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let p = field.modulus();
        for x in &mut data {
            *x %= p;
        }
        Ok(FieldMatrix {
            rows,
            cols,
            data,
            field,
        })
    }

    /// Convenience constructor from signed row literals; panics on ragged rows.
    pub fn from_rows<R: AsRef<[i64]>>(field: PrimeField, rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend(row.iter().map(|&x| field.elem_i64(x).value()));
        }
        FieldMatrix {
            rows: rows.len(),
            cols,
            data,
            field,
        }
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FieldMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
            field,
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn random<R: Rng + ?Sized>(
        field: PrimeField,
        rows: usize,
        cols: usize,
        rng: &mut R,
    ) -> Self {
        let p = field.modulus();
        let data = (0..rows * cols).map(|_| rng.gen_range(0..p)).collect();
        FieldMatrix {
            rows,
            cols,
            data,
            field,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Number of stored symbols.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> FieldElement {
        self.field.elem(self.data[row * self.cols + col])
    }

    pub fn set(&mut self, row: usize, col: usize, value: FieldElement) -> Result<()> {
        if value.field() != self.field {
            return Err(Error::FieldMismatch {
                left: self.field.modulus(),
                right: value.field().modulus(),
            });
        }
        self.data[row * self.cols + col] = value.value();
        Ok(())
    }

    fn extent(&self, axis: Axis) -> usize {
        match axis {
            Axis::Rows => self.rows,
            Axis::Cols => self.cols,
        }
    }

    /// Copies out the rows (or columns) in `range`.
    pub fn slice(&self, axis: Axis, range: Range<usize>) -> Result<FieldMatrix> {
        if range.start > range.end || range.end > self.extent(axis) {
            return Err(Error::DimError(format!(
                "{axis:?} range {range:?} outside a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let data = match axis {
            Axis::Rows => self.data[range.start * self.cols..range.end * self.cols].to_vec(),
            Axis::Cols => {
                let width = range.len();
                let mut out = Vec::with_capacity(self.rows * width);
                for r in 0..self.rows {
                    let base = r * self.cols;
                    out.extend_from_slice(&self.data[base + range.start..base + range.end]);
                }
                out
            }
        };
        let (rows, cols) = match axis {
            Axis::Rows => (range.len(), self.cols),
            Axis::Cols => (self.rows, range.len()),
        };
        Ok(FieldMatrix {
            rows,
            cols,
            data,
            field: self.field,
        })
    }

    fn check_same(&self, other: &FieldMatrix, what: &str) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.modulus(),
                right: other.field.modulus(),
            });
        }
        if self.shape() != other.shape() {
            return Err(Error::DimError(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add_assign(&mut self, other: &FieldMatrix) -> Result<()> {
        self.check_same(other, "addition")?;
        let f = self.field;
        for (x, &y) in self.data.iter_mut().zip(&other.data) {
            *x = f.add(*x, y);
        }
        Ok(())
    }

    /// `self += coeff * other`.
    pub fn add_scaled(&mut self, other: &FieldMatrix, coeff: u64) -> Result<()> {
        self.check_same(other, "scaled addition")?;
        let f = self.field;
        for (x, &y) in self.data.iter_mut().zip(&other.data) {
            *x = f.add(*x, f.mul(coeff, y));
        }
        Ok(())
    }

    /// Matrix product with delayed modular reduction. Bit-identical to
    /// [`reference_matmul`], which tests rely on.
    pub fn matmul(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        check_product(self, other)?;
        let f = self.field;
        let p = f.modulus() as u128;
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![0u64; n * m];
        let mut acc = vec![0u128; m];
        for i in 0..n {
            acc.iter_mut().for_each(|a| *a = 0);
            for t in 0..k {
                let a = self.data[i * k + t] as u128;
                if a == 0 {
                    continue;
                }
                let row = &other.data[t * m..(t + 1) * m];
                for (slot, &b) in acc.iter_mut().zip(row) {
                    // a * b < p^2 and the accumulator stays below p before the add,
                    // so the sum fits in u128 for any 64-bit modulus.
                    *slot = (*slot + a * b as u128) % p;
                }
            }
            for (dst, &a) in out[i * m..(i + 1) * m].iter_mut().zip(&acc) {
                *dst = a as u64;
            }
        }
        Ok(FieldMatrix {
            rows: n,
            cols: m,
            data: out,
            field: f,
        })
    }
}

fn check_product(a: &FieldMatrix, b: &FieldMatrix) -> Result<()> {
    if a.field != b.field {
        return Err(Error::FieldMismatch {
            left: a.field.modulus(),
            right: b.field.modulus(),
        });
    }
    if a.cols != b.rows {
        return Err(Error::DimError(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(())
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FieldMatrix<{}>[{}x{}]",
            self.field, self.rows, self.cols
        )?;
        if self.len() <= 64 {
            let rows: Vec<&[u64]> = self.data.chunks(self.cols.max(1)).collect();
            write!(f, " {rows:?}")?;
        }
        Ok(())
    }
}

/// Splits `m` into `k` equal blocks along `axis`, in index order.
pub fn partition(m: &FieldMatrix, axis: Axis, k: usize) -> Result<Vec<FieldMatrix>> {
    let layout = BlockLayout::new(axis, m.extent(axis), k)?;
    (0..k).map(|i| m.slice(axis, layout.range(i))).collect()
}

/// Concatenates blocks along `axis`; the inverse of [`partition`].
pub fn assemble(blocks: &[FieldMatrix], axis: Axis) -> Result<FieldMatrix> {
    let first = blocks.first().ok_or_else(|| Error::AssemblyError {
        axis,
        detail: "no blocks".into(),
    })?;
    let field = first.field;
    for (i, b) in blocks.iter().enumerate() {
        let conforms = match axis {
            Axis::Rows => b.cols == first.cols,
            Axis::Cols => b.rows == first.rows,
        };
        if b.field != field || !conforms {
            return Err(Error::AssemblyError {
                axis,
                detail: format!(
                    "block {i} is {}x{} over {}, first block is {}x{} over {}",
                    b.rows, b.cols, b.field, first.rows, first.cols, field
                ),
            });
        }
    }
    match axis {
        Axis::Rows => {
            let rows = blocks.iter().map(|b| b.rows).sum();
            let mut data = Vec::with_capacity(rows * first.cols);
            for b in blocks {
                data.extend_from_slice(&b.data);
            }
            Ok(FieldMatrix {
                rows,
                cols: first.cols,
                data,
                field,
            })
        }
        Axis::Cols => {
            let cols = blocks.iter().map(|b| b.cols).sum();
            let mut data = Vec::with_capacity(first.rows * cols);
            for r in 0..first.rows {
                for b in blocks {
                    data.extend_from_slice(&b.data[r * b.cols..(r + 1) * b.cols]);
                }
            }
            Ok(FieldMatrix {
                rows: first.rows,
                cols,
                data,
                field,
            })
        }
    }
}

/// Textbook triple-loop product, reducing after every multiply-add.
///
/// This is the ground truth for all decoding checks; keep it obviously correct.
pub fn reference_matmul(a: &FieldMatrix, b: &FieldMatrix) -> Result<FieldMatrix> {
    check_product(a, b)?;
    let f = a.field;
    let mut out = FieldMatrix::zeros(f, a.rows, b.cols);
    for i in 0..a.rows {
        for j in 0..b.cols {
            let mut sum = 0u64;
            for t in 0..a.cols {
                let term = f.mul(a.data[i * a.cols + t], b.data[t * b.cols + j]);
                sum = f.add(sum, term);
            }
            out.data[i * b.cols + j] = sum;
        }
    }
    Ok(out)
}

/// `Σ_j coeffs[j] · mats[j]` over conformal matrices.
pub fn linear_combination(mats: &[&FieldMatrix], coeffs: &[u64]) -> Result<FieldMatrix> {
    if mats.len() != coeffs.len() {
        return Err(Error::DimError(format!(
            "{} matrices but {} coefficients",
            mats.len(),
            coeffs.len()
        )));
    }
    let first = mats
        .first()
        .ok_or_else(|| Error::DimError("empty linear combination".into()))?;
    let mut out = FieldMatrix::zeros(first.field, first.rows, first.cols);
    for (m, &c) in mats.iter().zip(coeffs) {
        out.add_scaled(m, c)?;
    }
    Ok(out)
}

pub fn matrices_equal(a: &FieldMatrix, b: &FieldMatrix) -> bool {
    a == b
}

/// Serializes to the plain-text fixture format: a `rows cols p` header line
/// followed by one whitespace-separated line per row.
impl fmt::Display for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.rows, self.cols, self.field.modulus())?;
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let line: Vec<String> = row.iter().map(u64::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for FieldMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = s.split_whitespace();
        let mut header = |name: &str| -> Result<u64> {
            tokens
                .next()
                .ok_or_else(|| Error::ConfigError(format!("fixture is missing `{name}`")))?
                .parse::<u64>()
                .map_err(|e| Error::ConfigError(format!("bad `{name}` in fixture: {e}")))
        };
        let rows = header("rows")? as usize;
        let cols = header("cols")? as usize;
        let field = PrimeField::new(header("p")?)?;
        let data = tokens
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|e| Error::ConfigError(format!("bad entry `{t}` in fixture: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        FieldMatrix::new(field, rows, cols, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    fn rand_matrix(field: PrimeField, rows: usize, cols: usize, seed: u64) -> FieldMatrix {
        FieldMatrix::random(field, rows, cols, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    #[test]
    fn row_partition_of_4x2() {
        let m = FieldMatrix::from_rows(f7(), &[[1, 2], [3, 4], [5, 6], [0, 1]]);
        let parts = partition(&m, Axis::Rows, 2).unwrap();
        assert_eq!(parts[0], FieldMatrix::from_rows(f7(), &[[1, 2], [3, 4]]));
        assert_eq!(parts[1], FieldMatrix::from_rows(f7(), &[[5, 6], [0, 1]]));
        assert_eq!(assemble(&parts, Axis::Rows).unwrap(), m);
    }

    #[test]
    fn trivial_partition_and_assembly() {
        let m = rand_matrix(f7(), 3, 5, 1);
        assert_eq!(partition(&m, Axis::Cols, 1).unwrap(), vec![m.clone()]);
        assert_eq!(assemble(std::slice::from_ref(&m), Axis::Rows).unwrap(), m);
    }

    #[test]
    fn column_round_trip() {
        let m = rand_matrix(f7(), 6, 6, 2);
        let parts = partition(&m, Axis::Cols, 3).unwrap();
        assert!(parts.iter().all(|b| b.shape() == (6, 2)));
        assert_eq!(assemble(&parts, Axis::Cols).unwrap(), m);

        let big = rand_matrix(PrimeField::P65537, 12, 12, 3);
        for axis in [Axis::Rows, Axis::Cols] {
            let parts = partition(&big, axis, 4).unwrap();
            assert_eq!(assemble(&parts, axis).unwrap(), big);
        }
    }

    #[test]
    fn partition_errors() {
        let m = FieldMatrix::zeros(f7(), 5, 4);
        assert_eq!(
            partition(&m, Axis::Rows, 2),
            Err(Error::PartitionError {
                dimension: 5,
                parts: 2
            })
        );
        assert!(partition(&m, Axis::Cols, 0).is_err());
    }

    #[test]
    fn assembly_errors() {
        let a = FieldMatrix::zeros(f7(), 2, 2);
        let b = FieldMatrix::zeros(f7(), 2, 3);
        assert!(matches!(
            assemble(&[a.clone(), b.clone()], Axis::Rows),
            Err(Error::AssemblyError { .. })
        ));
        assert_eq!(assemble(&[a, b], Axis::Cols).unwrap().shape(), (2, 5));
        assert!(assemble(&[], Axis::Cols).is_err());
    }

    #[test]
    fn two_blocks_stack_to_4x2() {
        let top = FieldMatrix::from_rows(f7(), &[[1, 2], [3, 4]]);
        let bottom = FieldMatrix::from_rows(f7(), &[[5, 6], [0, 1]]);
        let m = assemble(&[top, bottom], Axis::Rows).unwrap();
        assert_eq!(m.shape(), (4, 2));
        assert_eq!(m.get(2, 1).value(), 6);
    }

    #[test]
    fn reference_product_small() {
        let a = FieldMatrix::from_rows(f7(), &[[1, 2], [3, 4]]);
        let b = FieldMatrix::from_rows(f7(), &[[5], [6]]);
        // 1*5 + 2*6 = 17 = 3 (mod 7), 3*5 + 4*6 = 39 = 4 (mod 7)
        let want = FieldMatrix::from_rows(f7(), &[[17 % 7], [39 % 7]]);
        assert_eq!(reference_matmul(&a, &b).unwrap(), want);
        assert_eq!(want, FieldMatrix::from_rows(f7(), &[[3], [4]]));
    }

    #[test]
    fn reference_product_identity_and_zero() {
        let f = PrimeField::P65537;
        let b = rand_matrix(f, 3, 4, 5);
        assert_eq!(
            reference_matmul(&FieldMatrix::identity(f, 3), &b).unwrap(),
            b
        );
        let z = reference_matmul(&FieldMatrix::zeros(f, 2, 3), &b).unwrap();
        assert_eq!(z, FieldMatrix::zeros(f, 2, 4));
        assert!(matches!(reference_matmul(&b, &b), Err(Error::DimError(_))));
        let other = FieldMatrix::zeros(f7(), 4, 1);
        assert!(matches!(
            reference_matmul(&b, &other),
            Err(Error::FieldMismatch { .. })
        ));
    }

    #[test]
    fn equality() {
        let m = rand_matrix(f7(), 3, 3, 9);
        assert!(matrices_equal(&m, &m.clone()));
        assert!(!matrices_equal(&m, &FieldMatrix::zeros(f7(), 3, 4)));
        let mut bumped = m.clone();
        let e = bumped.get(1, 1);
        bumped.set(1, 1, f7().elem(e.value() + 1)).unwrap();
        assert!(!matrices_equal(&m, &bumped));
        let other_field = FieldMatrix::zeros(PrimeField::P65537, 3, 3);
        assert!(!matrices_equal(
            &FieldMatrix::zeros(f7(), 3, 3),
            &other_field
        ));
    }

    #[test]
    fn fixture_format() {
        let text = "2 3 7\n1 2 3\n4 5 13\n";
        let m: FieldMatrix = text.parse().unwrap();
        assert_eq!(m, FieldMatrix::from_rows(f7(), &[[1, 2, 3], [4, 5, 6]]));
        assert_eq!(m.to_string(), "2 3 7\n1 2 3\n4 5 6\n");
        assert!("2 2 7\n1 2 3".parse::<FieldMatrix>().is_err());
        assert!("2 2 8\n1 2 3 4".parse::<FieldMatrix>().is_err());
    }

    #[test]
    fn linear_combinations() {
        let a = FieldMatrix::from_rows(f7(), &[[1, 2]]);
        let b = FieldMatrix::from_rows(f7(), &[[3, 4]]);
        let c = linear_combination(&[&a, &b], &[2, 3]).unwrap();
        assert_eq!(c, FieldMatrix::from_rows(f7(), &[[11, 16]]));
        assert!(linear_combination(&[&a], &[1, 2]).is_err());
    }

    proptest! {
        #[test]
        fn partition_assemble_inverse(
            k in 1usize..5, per in 1usize..4, other in 1usize..6,
            rows_axis in any::<bool>(), seed in any::<u64>()
        ) {
            let axis = if rows_axis { Axis::Rows } else { Axis::Cols };
            let (r, c) = if rows_axis { (k * per, other) } else { (other, k * per) };
            let m = rand_matrix(PrimeField::P65537, r, c, seed);
            let parts = partition(&m, axis, k).unwrap();
            prop_assert_eq!(parts.len(), k);
            let back = assemble(&parts, axis).unwrap();
            prop_assert_eq!(partition(&back, axis, k).unwrap(), parts);
            prop_assert_eq!(back, m);
        }

        #[test]
        fn fast_product_matches_reference(n in 1usize..6, k in 1usize..6, m in 1usize..6, seed in any::<u64>()) {
            let f = PrimeField::MERSENNE31;
            let a = rand_matrix(f, n, k, seed);
            let b = rand_matrix(f, k, m, seed.wrapping_add(1));
            prop_assert_eq!(a.matmul(&b).unwrap(), reference_matmul(&a, &b).unwrap());
        }

        #[test]
        fn product_is_associative_and_distributive(seed in any::<u64>()) {
            let f = PrimeField::P65537;
            let a = rand_matrix(f, 3, 4, seed);
            let b = rand_matrix(f, 4, 2, seed ^ 1);
            let c = rand_matrix(f, 2, 5, seed ^ 2);
            let ab_c = reference_matmul(&reference_matmul(&a, &b).unwrap(), &c).unwrap();
            let a_bc = reference_matmul(&a, &reference_matmul(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);

            let b2 = rand_matrix(f, 4, 2, seed ^ 3);
            let mut sum = b.clone();
            sum.add_assign(&b2).unwrap();
            let mut rhs = reference_matmul(&a, &b).unwrap();
            rhs.add_assign(&reference_matmul(&a, &b2).unwrap()).unwrap();
            prop_assert_eq!(reference_matmul(&a, &sum).unwrap(), rhs);
        }
    }
}
