//! The d^2 - 1 traceless Hermitian orthonormal operator basis and its
//! partition into the (n, b) grid that drives the measurement construction.
//!
//! Concrete basis: generalized Gell-Mann operators. Symmetric pairs
//! (|j><k| + |k><j|)/sqrt2, antisymmetric pairs -i(|j><k| - |k><j|)/sqrt2 for
//! j < k, and d - 1 diagonal operators (sum_{m<=l}|m><m| - l|l+1><l+1|)
//! / sqrt(l(l+1)).

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{hs_inner, CMat, HermitianOperator, MatrixData, ToleranceConfig};

/// Partition scheme that reproduces the printed d=3 element grouping; an
/// alias of `default` restricted to d = 3.
pub const SCHEME_PAPER_D3: &str = "paper-d3";
/// General-d partition scheme, calibrated so group b carries the symmetric
/// partners of column b followed by its antisymmetric partners, with the
/// diagonal operators forming the final group.
pub const SCHEME_DEFAULT: &str = "default";

/// The partitioned generator table: `table[b][n]` holds F_{n,b} with b in
/// 0..=d (d+1 groups of d-1 operators).
#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    d: usize,
    scheme: String,
    table: Vec<Vec<HermitianOperator>>,
}

impl GeneratorBasis {
    /// Builds and partitions the basis in one step.
    pub fn new(d: usize, scheme: &str) -> Result<Self> {
        partition_generators(gellmann_generators(d)?, d, scheme)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn scheme(&self) -> &str {
        &self.scheme
    }

    /// Number of groups, always d + 1.
    pub fn groups(&self) -> usize {
        self.table.len()
    }

    /// Generators of group `b` (0-based).
    pub fn group(&self, b: usize) -> &[HermitianOperator] {
        &self.table[b]
    }

    /// F_{n,b} with 0-based indices.
    pub fn get(&self, b: usize, n: usize) -> &HermitianOperator {
        &self.table[b][n]
    }

    pub(crate) fn from_parts(d: usize, scheme: String, table: Vec<Vec<HermitianOperator>>) -> Self {
        Self { d, scheme, table }
    }

    pub fn to_data(&self) -> GeneratorBasisData {
        let cells = self
            .table
            .iter()
            .enumerate()
            .flat_map(|(b, group)| {
                group.iter().enumerate().map(move |(n, f)| GeneratorCell {
                    b: b + 1,
                    n: n + 1,
                    matrix: MatrixData::from_cmat(f.matrix()),
                })
            })
            .collect();
        GeneratorBasisData {
            d: self.d,
            scheme: self.scheme.clone(),
            cells,
        }
    }

    /// Rebuilds from wire data and re-verifies the axioms.
    pub fn from_data(data: &GeneratorBasisData, cfg: &ToleranceConfig) -> Result<Self> {
        let d = data.d;
        if d < 2 {
            return Err(Error::InvalidDimension {
                d,
                reason: "generator basis needs d >= 2",
            });
        }
        let mut table = vec![Vec::new(); d + 1];
        let mut seen = vec![vec![false; d - 1]; d + 1];
        for cell in &data.cells {
            if cell.b == 0 || cell.b > d + 1 || cell.n == 0 || cell.n > d - 1 {
                return Err(Error::MalformedData(format!(
                    "generator cell (b={}, n={}) outside the (d+1)x(d-1) grid",
                    cell.b, cell.n
                )));
            }
            if seen[cell.b - 1][cell.n - 1] {
                return Err(Error::MalformedData(format!(
                    "duplicate generator cell (b={}, n={})",
                    cell.b, cell.n
                )));
            }
            seen[cell.b - 1][cell.n - 1] = true;
        }
        if data.cells.len() != (d + 1) * (d - 1) {
            return Err(Error::MalformedData(format!(
                "expected {} generator cells, got {}",
                (d + 1) * (d - 1),
                data.cells.len()
            )));
        }
        let mut sorted: Vec<&GeneratorCell> = data.cells.iter().collect();
        sorted.sort_by_key(|cell| (cell.b, cell.n));
        for cell in sorted {
            let m = cell.matrix.to_cmat()?;
            let (op, _) = crate::numerics::validate_hermitian(
                &m,
                cfg,
                crate::numerics::ValidationPolicy::Strict,
            )?;
            table[cell.b - 1].push(op);
        }
        let basis = Self {
            d,
            scheme: data.scheme.clone(),
            table,
        };
        let report = verify_generator_axioms(&basis, cfg);
        if !report.pass {
            return Err(Error::BadGenerators(report.describe()));
        }
        Ok(basis)
    }
}

/// Wire format: `{"d", "scheme", "cells": [{"b", "n", "matrix"}]}` with
/// 1-based b and n.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorBasisData {
    pub d: usize,
    pub scheme: String,
    pub cells: Vec<GeneratorCell>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorCell {
    pub b: usize,
    pub n: usize,
    pub matrix: MatrixData,
}

/// Flat index of the symmetric pair generator for 0-based j < k.
fn sym_index(d: usize, j: usize, k: usize) -> usize {
    debug_assert!(j < k && k < d);
    j * d - j * (j + 1) / 2 + (k - j - 1)
}

/// Flat index of the antisymmetric pair generator for 0-based j < k.
fn antisym_index(d: usize, j: usize, k: usize) -> usize {
    d * (d - 1) / 2 + sym_index(d, j, k)
}

/// Flat index of the l-th diagonal generator, l in 1..=d-1.
fn diag_index(d: usize, l: usize) -> usize {
    debug_assert!(l >= 1 && l < d);
    d * (d - 1) + (l - 1)
}

/// The generalized Gell-Mann family in canonical order: all symmetric pairs
/// (lexicographic), all antisymmetric pairs, then the diagonal ladder.
pub fn gellmann_generators(d: usize) -> Result<Vec<HermitianOperator>> {
    if d < 2 {
        return Err(Error::InvalidDimension {
            d,
            reason: "generators need d >= 2",
        });
    }
    let inv_sqrt2 = 1.0 / 2f64.sqrt();
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = CMat::zeros(d, d);
            m[(j, k)] = Complex::new(inv_sqrt2, 0.0);
            m[(k, j)] = Complex::new(inv_sqrt2, 0.0);
            out.push(HermitianOperator::symmetrized(m));
        }
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = CMat::zeros(d, d);
            m[(j, k)] = Complex::new(0.0, -inv_sqrt2);
            m[(k, j)] = Complex::new(0.0, inv_sqrt2);
            out.push(HermitianOperator::symmetrized(m));
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut m = CMat::zeros(d, d);
        for i in 0..l {
            m[(i, i)] = Complex::new(norm, 0.0);
        }
        m[(l, l)] = Complex::new(-(l as f64) * norm, 0.0);
        out.push(HermitianOperator::symmetrized(m));
    }
    Ok(out)
}

/// Partitions a canonical generator list into the (n, b) grid.
///
/// The input must be in [`gellmann_generators`] order. Scheme `default`
/// assigns group b (1-based) the symmetric generators sym(j, b) for j < b
/// followed by the antisymmetric generators antisym(b, l) for l > b, and the
/// final group the diagonal ladder; `paper-d3` is the d = 3 alias.
pub fn partition_generators(
    gens: Vec<HermitianOperator>,
    d: usize,
    scheme: &str,
) -> Result<GeneratorBasis> {
    if d < 2 {
        return Err(Error::InvalidDimension {
            d,
            reason: "partition needs d >= 2",
        });
    }
    match scheme {
        SCHEME_DEFAULT => {}
        SCHEME_PAPER_D3 if d == 3 => {}
        _ => {
            return Err(Error::UnknownScheme {
                scheme: scheme.to_string(),
                d,
            })
        }
    }
    if gens.len() != d * d - 1 {
        return Err(Error::BadGenerators(format!(
            "expected {} generators, got {}",
            d * d - 1,
            gens.len()
        )));
    }
    for g in &gens {
        if g.dim() != d {
            return Err(Error::DimensionMismatch {
                context: "partition_generators",
                left: g.dim(),
                right: d,
            });
        }
    }
    let cfg = ToleranceConfig::default();
    for (i, a) in gens.iter().enumerate() {
        for (j, b) in gens.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            let v = hs_inner(a, b)?;
            if (v - target).abs() > cfg.ortho_tol {
                return Err(Error::BadGenerators(format!(
                    "input not orthonormal: <F_{i}, F_{j}> = {v}"
                )));
            }
        }
    }

    // 1-based b: group b = sym(j, b) for j < b, then antisym(b, l) for l > b;
    // group d+1 = diagonal ladder. All indices into the canonical order.
    let mut table = Vec::with_capacity(d + 1);
    for b in 1..=d {
        let mut group = Vec::with_capacity(d - 1);
        for j in 1..b {
            group.push(gens[sym_index(d, j - 1, b - 1)].clone());
        }
        for l in (b + 1)..=d {
            group.push(gens[antisym_index(d, b - 1, l - 1)].clone());
        }
        table.push(group);
    }
    table.push((1..d).map(|l| gens[diag_index(d, l)].clone()).collect());

    Ok(GeneratorBasis::from_parts(d, scheme.to_string(), table))
}

/// Worst-case deviations of a generator table from the axioms.
#[derive(Debug, Clone, Serialize)]
pub struct GeneratorReport {
    pub max_orthonormality_dev: f64,
    pub max_trace: f64,
    pub max_hermiticity_dev: f64,
    pub pass: bool,
}

impl GeneratorReport {
    pub fn describe(&self) -> String {
        format!(
            "orthonormality dev {:.3e}, |trace| {:.3e}, hermiticity dev {:.3e}",
            self.max_orthonormality_dev, self.max_trace, self.max_hermiticity_dev
        )
    }
}

/// Checks orthonormality, tracelessness, and Hermiticity of every generator.
pub fn verify_generator_axioms(basis: &GeneratorBasis, cfg: &ToleranceConfig) -> GeneratorReport {
    let flat: Vec<&HermitianOperator> = basis.table.iter().flatten().collect();
    let mut ortho = 0.0_f64;
    for (i, a) in flat.iter().enumerate() {
        for (j, b) in flat.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            // Pairings of validated Hermitian operators cannot fail.
            let v = hs_inner(a, b).unwrap_or(f64::INFINITY);
            ortho = ortho.max((v - target).abs());
        }
    }
    let max_trace = flat.iter().map(|f| f.trace().abs()).fold(0.0_f64, f64::max);
    let max_herm = flat
        .iter()
        .map(|f| {
            (f.matrix() - f.matrix().adjoint())
                .iter()
                .map(|z| z.norm())
                .fold(0.0_f64, f64::max)
        })
        .fold(0.0_f64, f64::max);
    GeneratorReport {
        max_orthonormality_dev: ortho,
        max_trace,
        max_hermiticity_dev: max_herm,
        pass: ortho <= cfg.ortho_tol && max_trace <= cfg.herm_tol && max_herm <= cfg.herm_tol,
    }
}
