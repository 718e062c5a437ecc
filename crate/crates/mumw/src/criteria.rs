//! Entanglement-detection criteria built on a measurement family, and the
//! closed forms they take on canonical state families.
//!
//! Three criteria are exposed:
//!   witness: Tr(W rho) < 0 flags entanglement;
//!   separability index J: for a complete family, separable states obey
//!     J <= 1 + kappa, so J above the threshold flags entanglement;
//!   coincidence sum: product states obey a kappa-dependent bound, so values
//!     above it flag correlations beyond any product state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurements::Mum;
use crate::numerics::{
    hs_inner, kron, validate_hermitian, CMat, ToleranceConfig, ValidationPolicy,
};
use crate::states::DensityMatrix;
use crate::witness::{evaluate_witness, Witness};

/// Margin around a threshold below which a value is treated as inconclusive
/// rather than a detection.
pub const DETECTION_MARGIN: f64 = 1e-9;

/// Whether the first factor of each correlation term is conjugated (the
/// convention matching the witness synthesis) or plain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JConvention {
    #[default]
    Conjugated,
    Plain,
}

/// True when `value` sits below `threshold` by more than the margin.
pub fn detects_below(value: f64, threshold: f64) -> bool {
    value < threshold - DETECTION_MARGIN
}

/// True when `value` sits above `threshold` by more than the margin.
pub fn detects_above(value: f64, threshold: f64) -> bool {
    value > threshold + DETECTION_MARGIN
}

/// Correlation index J(rho) = sum_b sum_n Tr[(A_n^(b) (x) P_n^(b)) rho] for a
/// complete family (L = d + 1).
pub fn j_index(mum: &Mum, rho: &DensityMatrix, convention: JConvention) -> Result<f64> {
    if !mum.is_complete() {
        return Err(Error::BadMeasurement(format!(
            "separability index needs a complete family (L = d + 1), got L = {}",
            mum.num_povms()
        )));
    }
    let d = mum.d();
    if rho.dim() != d * d {
        return Err(Error::DimensionMismatch {
            context: "index vs state",
            left: d * d,
            right: rho.dim(),
        });
    }
    let mut correlator = CMat::zeros(d * d, d * d);
    for b in 0..mum.num_povms() {
        for n in 0..d {
            let p = mum.element(b, n).matrix();
            let a = match convention {
                JConvention::Conjugated => p.conjugate(),
                JConvention::Plain => p.clone(),
            };
            correlator += kron(&a, p);
        }
    }
    let (op, _) = validate_hermitian(
        &correlator,
        &ToleranceConfig::default(),
        ValidationPolicy::Strict,
    )?;
    hs_inner(&op, rho.operator())
}

/// Separable-state bound for the index: J <= 1 + kappa.
pub fn j_threshold(kappa: f64) -> f64 {
    1.0 + kappa
}

/// Coincidence sum C(rho) = sum_b sum_n Tr[(P_n^(b) (x) P_n^(b)) rho].
pub fn coincidence_sum(mum: &Mum, rho: &DensityMatrix) -> Result<f64> {
    let d = mum.d();
    if rho.dim() != d * d {
        return Err(Error::DimensionMismatch {
            context: "coincidence vs state",
            left: d * d,
            right: rho.dim(),
        });
    }
    let mut correlator = CMat::zeros(d * d, d * d);
    for b in 0..mum.num_povms() {
        for n in 0..d {
            let p = mum.element(b, n).matrix();
            correlator += kron(p, p);
        }
    }
    let (op, _) = validate_hermitian(
        &correlator,
        &ToleranceConfig::default(),
        ValidationPolicy::Strict,
    )?;
    hs_inner(&op, rho.operator())
}

/// Product-state bound for the coincidence sum of an L-POVM family:
/// (L - 1)/d + (1 - kappa + kappa (d - 1))/(d - 1).
pub fn coincidence_bound(d: usize, l: usize, kappa: f64) -> f64 {
    let df = d as f64;
    (l as f64 - 1.0) / df + (1.0 - kappa + kappa * (df - 1.0)) / (df - 1.0)
}

/// Closed form for the unrotated witness on the isotropic family
/// alpha |phi+><phi+| + (1 - alpha) I/d^2:
///   (d kappa + L - 1)/d - alpha L kappa - (1 - alpha) L/d.
pub fn isotropic_witness_value(d: usize, l: usize, kappa: f64, alpha: f64) -> f64 {
    let df = d as f64;
    let lf = l as f64;
    (df * kappa + lf - 1.0) / df - alpha * lf * kappa - (1.0 - alpha) * lf / df
}

/// Noise level where the unrotated witness changes sign on the isotropic
/// family: alpha* = 1/L, independent of kappa (1/(d + 1) for complete
/// families).
pub fn isotropic_crossing(l: usize) -> f64 {
    1.0 / l as f64
}

/// Closed form for the unrotated witness on |phi+><phi+|:
/// (L - 1)(1 - d kappa)/d.
pub fn max_entangled_witness_value(d: usize, l: usize, kappa: f64) -> f64 {
    (l as f64 - 1.0) * (1.0 - d as f64 * kappa) / d as f64
}

/// One criterion evaluation on one state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionReport {
    pub criterion: String,
    pub value: f64,
    pub threshold: f64,
    pub detected: bool,
    /// Provenance of the measurement family or witness used.
    pub mum_id: String,
    pub angles: Option<Vec<f64>>,
}

impl DetectionReport {
    /// Witness criterion: detection when Tr(W rho) < 0.
    pub fn from_witness(w: &Witness, rho: &DensityMatrix) -> Result<Self> {
        let value = evaluate_witness(w, rho)?;
        Ok(Self {
            criterion: "witness".into(),
            value,
            threshold: 0.0,
            detected: detects_below(value, 0.0),
            mum_id: w.source().to_string(),
            angles: w.angles().map(|a| a.to_vec()),
        })
    }

    /// Index criterion: detection when J > 1 + kappa.
    pub fn from_j_index(mum: &Mum, rho: &DensityMatrix, convention: JConvention) -> Result<Self> {
        let value = j_index(mum, rho, convention)?;
        let threshold = j_threshold(mum.kappa());
        Ok(Self {
            criterion: "j-index".into(),
            value,
            threshold,
            detected: detects_above(value, threshold),
            mum_id: mum.source().to_string(),
            angles: None,
        })
    }

    /// Coincidence criterion: detection when the sum beats the product bound.
    pub fn from_coincidence(mum: &Mum, rho: &DensityMatrix) -> Result<Self> {
        let value = coincidence_sum(mum, rho)?;
        let threshold = coincidence_bound(mum.d(), mum.num_povms(), mum.kappa());
        Ok(Self {
            criterion: "coincidence".into(),
            value,
            threshold,
            detected: detects_above(value, threshold),
            mum_id: mum.source().to_string(),
            angles: None,
        })
    }
}
