//! Lagrange encoding of matrix blocks and interpolation-based decoding.
//!
//! Data blocks `A_1..A_L` are attached to the points `β_1..β_L`; machine `n`
//! stores the encoding polynomial evaluated at its own point `α_n`. Since the
//! polynomial has degree `L - 1`, any `L` evaluations recover every `A_l`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ffield::{FieldElement, PrimeField};
use crate::matrix::{linear_combination, FieldMatrix};

/// How evaluation points are drawn from the field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PointRule {
    /// `β_l = l - 1` and `α_n = L - 1 + n`.
    #[default]
    Consecutive,
    /// `L + N` distinct residues sampled uniformly with a seeded generator.
    Sampled { seed: u64 },
}

/// The `β` points carrying the data blocks and the per-machine `α` points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluationPoints {
    field: PrimeField,
    betas: Vec<FieldElement>,
    alphas: Vec<FieldElement>,
}

impl EvaluationPoints {
    /// Validates distinctness within and disjointness between the two sets.
    pub fn new(betas: Vec<FieldElement>, alphas: Vec<FieldElement>) -> Result<Self> {
        let field = betas
            .first()
            .or(alphas.first())
            .map(FieldElement::field)
            .ok_or_else(|| Error::InvalidParams("no evaluation points".into()))?;
        let mut seen = std::collections::HashSet::new();
        for e in betas.iter().chain(&alphas) {
            if e.field() != field {
                return Err(Error::FieldMismatch {
                    left: field.modulus(),
                    right: e.field().modulus(),
                });
            }
            if !seen.insert(e.value()) {
                return Err(Error::DuplicateNodes);
            }
        }
        Ok(EvaluationPoints {
            field,
            betas,
            alphas,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn betas(&self) -> &[FieldElement] {
        &self.betas
    }

    pub fn alphas(&self) -> &[FieldElement] {
        &self.alphas
    }

    /// `α_n` for the 1-based machine index `n`.
    pub fn alpha(&self, machine: usize) -> FieldElement {
        self.alphas[machine - 1]
    }

    /// `β_l` for the 1-based block index `l`.
    pub fn beta(&self, l: usize) -> FieldElement {
        self.betas[l - 1]
    }

    /// Recovery threshold `L`.
    pub fn threshold(&self) -> usize {
        self.betas.len()
    }

    pub fn machines(&self) -> usize {
        self.alphas.len()
    }
}

pub fn generate_points(
    field: PrimeField,
    machines: usize,
    threshold: usize,
    rule: PointRule,
) -> Result<EvaluationPoints> {
    let needed = (machines + threshold) as u64;
    if field.modulus() < needed {
        return Err(Error::FieldTooSmall {
            p: field.modulus(),
            needed,
        });
    }
    let values: Vec<u64> = match rule {
        PointRule::Consecutive => (0..needed).collect(),
        PointRule::Sampled { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let space = usize::try_from(field.modulus()).unwrap_or(usize::MAX);
            index::sample(&mut rng, space, needed as usize)
                .into_iter()
                .map(|v| v as u64)
                .collect()
        }
    };
    let (betas, alphas) = values.split_at(threshold);
    EvaluationPoints::new(
        betas.iter().map(|&v| field.elem(v)).collect(),
        alphas.iter().map(|&v| field.elem(v)).collect(),
    )
}

/// Lagrange basis weights on raw residues:
/// `w_j = Π_{j' ≠ j} (z - x_{j'}) / (x_j - x_{j'})`.
pub fn weights_raw(field: PrimeField, nodes: &[u64], z: u64) -> Result<Vec<u64>> {
    let k = nodes.len();
    let mut numerators = vec![1u64; k];
    let mut denominators = vec![1u64; k];
    for j in 0..k {
        for jj in 0..k {
            if j != jj {
                numerators[j] = field.mul(numerators[j], field.sub(z, nodes[jj]));
                denominators[j] = field.mul(denominators[j], field.sub(nodes[j], nodes[jj]));
            }
        }
    }
    let inv = field
        .batch_inv_raw(&denominators)
        .map_err(|_| Error::DuplicateNodes)?;
    Ok(numerators
        .iter()
        .zip(&inv)
        .map(|(&n, &d)| field.mul(n, d))
        .collect())
}

pub fn lagrange_weights(nodes: &[FieldElement], z: FieldElement) -> Result<Vec<FieldElement>> {
    let field = z.field();
    let raw = raw_values(field, nodes)?;
    Ok(weights_raw(field, &raw, z.value())?
        .into_iter()
        .map(|w| field.elem(w))
        .collect())
}

fn raw_values(field: PrimeField, points: &[FieldElement]) -> Result<Vec<u64>> {
    points
        .iter()
        .map(|e| {
            if e.field() == field {
                Ok(e.value())
            } else {
                Err(Error::FieldMismatch {
                    left: field.modulus(),
                    right: e.field().modulus(),
                })
            }
        })
        .collect()
}

/// Evaluates the encoding polynomial with `X(β_l) = parts[l]` at `alpha`.
pub fn encode_block(
    parts: &[FieldMatrix],
    betas: &[FieldElement],
    alpha: FieldElement,
) -> Result<FieldMatrix> {
    if parts.len() != betas.len() {
        return Err(Error::DimError(format!(
            "{} blocks but {} interpolation points",
            parts.len(),
            betas.len()
        )));
    }
    let weights = lagrange_weights(betas, alpha)?;
    let coeffs: Vec<u64> = weights.iter().map(FieldElement::value).collect();
    let refs: Vec<&FieldMatrix> = parts.iter().collect();
    linear_combination(&refs, &coeffs)
}

/// Interpolates the polynomial through `(nodes[j], values[j])` and evaluates it at `target`.
pub fn interpolate_at(
    nodes: &[FieldElement],
    values: &[FieldMatrix],
    target: FieldElement,
) -> Result<FieldMatrix> {
    if nodes.len() != values.len() {
        return Err(Error::DimError(format!(
            "{} nodes but {} values",
            nodes.len(),
            values.len()
        )));
    }
    let weights = lagrange_weights(nodes, target)?;
    let coeffs: Vec<u64> = weights.iter().map(FieldElement::value).collect();
    let refs: Vec<&FieldMatrix> = values.iter().collect();
    linear_combination(&refs, &coeffs)
}

type WeightKey = (Vec<u64>, u64);

/// Memoizes basis weights per `(nodes, target)` pair. Shared readers are fine;
/// a cached entry is exactly what [`weights_raw`] would return.
#[derive(Debug, Default)]
pub struct WeightCache {
    entries: RwLock<HashMap<WeightKey, Arc<Vec<u64>>>>,
}

impl WeightCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn weights(&self, field: PrimeField, nodes: &[u64], target: u64) -> Result<Arc<Vec<u64>>> {
        let key = (nodes.to_vec(), target);
        if let Some(w) = self
            .entries
            .read()
            .expect("weight cache poisoned")
            .get(&key)
        {
            return Ok(Arc::clone(w));
        }
        let w = Arc::new(weights_raw(field, nodes, target)?);
        self.entries
            .write()
            .expect("weight cache poisoned")
            .entry(key)
            .or_insert_with(|| Arc::clone(&w));
        Ok(w)
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("weight cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
