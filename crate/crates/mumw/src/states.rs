//! Density matrices: canonical families, bundled transcriptions, and seeded
//! random states.
//!
//! Loaded data is validated but never silently renormalized: transcribed
//! matrices keep their printed trace (0.998 and 1.008 for the bundled
//! two-party states), and callers opt into [`DensityMatrix::normalized`]
//! explicitly. Everything downstream records which version it consumed.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::{
    identity, min_eigenvalue, partial_trace_first, partial_trace_second, validate_hermitian, CMat,
    CVec, HermitianOperator, MatrixData, ToleranceConfig, ValidationPolicy,
};

const RHO_3X3_JSON: &str = include_str!("../fixtures/rho_3x3.json");
const RHO_6X6_JSON: &str = include_str!("../fixtures/rho_6x6.json");

/// Trace window for transcribed states (print rounding moves the trace).
pub const FIXTURE_TRACE_TOL: f64 = 1e-2;
/// Eigenvalue floor for transcribed states.
pub const FIXTURE_PSD_TOL: f64 = 5e-3;

/// A validated quantum state.
///
/// `trace()` reports the raw trace of the data as given; strict-policy states
/// have trace 1 up to numerical noise, fixture-policy states keep whatever
/// the transcription sums to.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    operator: HermitianOperator,
    policy: ValidationPolicy,
    raw_trace: f64,
    herm_dev: f64,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace, and positivity under the given policy.
    ///
    /// Strict: trace within `herm_tol` of 1, smallest eigenvalue at least
    /// `-psd_tol`. Fixture: trace within [`FIXTURE_TRACE_TOL`], smallest
    /// eigenvalue at least -[`FIXTURE_PSD_TOL`]. The stored operator is the
    /// Hermitian part of the input.
    pub fn new(m: CMat, cfg: &ToleranceConfig, policy: ValidationPolicy) -> Result<Self> {
        let (operator, herm_dev) = validate_hermitian(&m, cfg, policy)?;
        let raw_trace = operator.trace();
        let (trace_tol, psd_floor) = match policy {
            ValidationPolicy::Strict => (cfg.herm_tol, cfg.psd_tol),
            ValidationPolicy::Fixture => (FIXTURE_TRACE_TOL, FIXTURE_PSD_TOL),
        };
        if (raw_trace - 1.0).abs() > trace_tol {
            return Err(Error::BadState(format!(
                "trace {raw_trace} outside 1 +/- {trace_tol}"
            )));
        }
        let min_eig = min_eigenvalue(&operator)?;
        if min_eig < -psd_floor {
            return Err(Error::BadState(format!(
                "smallest eigenvalue {min_eig:.3e} below -{psd_floor:.1e}"
            )));
        }
        Ok(Self {
            operator,
            policy,
            raw_trace,
            herm_dev,
        })
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn matrix(&self) -> &CMat {
        self.operator.matrix()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }

    pub fn policy(&self) -> ValidationPolicy {
        self.policy
    }

    /// The trace of the data as given (not forced to 1).
    pub fn trace(&self) -> f64 {
        self.raw_trace
    }

    /// Hermiticity deviation of the original data.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.herm_dev
    }

    /// Explicit unit-trace copy; the only place trace is ever rescaled.
    pub fn normalized(&self) -> Result<Self> {
        if self.raw_trace <= 0.0 {
            return Err(Error::BadState(format!(
                "cannot normalize trace {}",
                self.raw_trace
            )));
        }
        let m = self.matrix().scale(1.0 / self.raw_trace);
        Ok(Self {
            operator: HermitianOperator::symmetrized(m),
            policy: self.policy,
            raw_trace: 1.0,
            herm_dev: self.herm_dev,
        })
    }

    pub fn to_data(&self) -> MatrixData {
        MatrixData::from_cmat(self.matrix())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_data())?)
    }

    /// Parses a bare matrix object `{"dim", "re", "im"}`.
    pub fn from_json_str(s: &str, cfg: &ToleranceConfig, policy: ValidationPolicy) -> Result<Self> {
        let data: MatrixData = serde_json::from_str(s)?;
        Self::new(data.to_cmat()?, cfg, policy)
    }
}

/// |phi+><phi+| on d (x) d, phi+ = (1/sqrt d) sum_i |ii>.
pub fn max_entangled(d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension {
            d,
            reason: "bipartite states need d >= 2",
        });
    }
    let dd = d * d;
    let mut m = CMat::zeros(dd, dd);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + i, j * d + j)] = Complex::new(1.0 / d as f64, 0.0);
        }
    }
    DensityMatrix::new(m, &ToleranceConfig::default(), ValidationPolicy::Strict)
}

/// Isotropic family alpha |phi+><phi+| + (1 - alpha) I/d^2.
///
/// alpha must lie in [-1/(d^2 - 1), 1], the positivity range.
pub fn isotropic_state(d: usize, alpha: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension {
            d,
            reason: "bipartite states need d >= 2",
        });
    }
    let dd = (d * d) as f64;
    let lo = -1.0 / (dd - 1.0);
    if !(lo..=1.0).contains(&alpha) {
        return Err(Error::OutOfRange(format!(
            "alpha {alpha} outside [{lo:.6}, 1] for d = {d}"
        )));
    }
    let phi = max_entangled(d)?;
    let m = phi.matrix().scale(alpha) + identity(d * d).scale((1.0 - alpha) / dd);
    DensityMatrix::new(m, &ToleranceConfig::default(), ValidationPolicy::Strict)
}

/// The bundled 3 (x) 3 transcription (raw trace 0.998, kept as printed).
pub fn rho_fixture_3x3() -> Result<DensityMatrix> {
    DensityMatrix::from_json_str(
        RHO_3X3_JSON,
        &ToleranceConfig::default(),
        ValidationPolicy::Fixture,
    )
}

/// The bundled 6 (x) 6 transcription (raw trace 1.008, kept as printed).
pub fn rho_fixture_6x6() -> Result<DensityMatrix> {
    DensityMatrix::from_json_str(
        RHO_6X6_JSON,
        &ToleranceConfig::default(),
        ValidationPolicy::Fixture,
    )
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex<f64> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im) / 2f64.sqrt()
}

/// Trace-normalized G G^dag for a Ginibre matrix G with i.i.d. standard
/// complex normal entries.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<DensityMatrix> {
    if d == 0 {
        return Err(Error::InvalidDimension {
            d,
            reason: "states need d >= 1",
        });
    }
    let g = CMat::from_fn(d, d, |_, _| complex_normal(rng));
    let gg = &g * g.adjoint();
    let trace = gg.trace().re;
    DensityMatrix::new(
        gg.scale(1.0 / trace),
        &ToleranceConfig::default(),
        ValidationPolicy::Strict,
    )
}

/// A Haar-like unit vector with Gaussian components.
pub fn random_state_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<CVec> {
    if d == 0 {
        return Err(Error::InvalidDimension {
            d,
            reason: "states need d >= 1",
        });
    }
    loop {
        let v = CVec::from_fn(d, |_, _| complex_normal(rng));
        let norm = v.norm();
        if norm > 1e-12 {
            return Ok(v / Complex::new(norm, 0.0));
        }
    }
}

/// |a> (x) |b> for independent random unit vectors on the two factors.
pub fn random_product_state<R: Rng + ?Sized>(da: usize, db: usize, rng: &mut R) -> Result<CVec> {
    let a = random_state_vector(da, rng)?;
    let b = random_state_vector(db, rng)?;
    let mut out = CVec::zeros(da * db);
    for i in 0..da {
        for j in 0..db {
            out[i * db + j] = a[i] * b[j];
        }
    }
    Ok(out)
}

/// Reduced state on the first factor.
pub fn reduced_first(rho: &DensityMatrix, da: usize, db: usize) -> Result<CMat> {
    partial_trace_second(rho.matrix(), da, db)
}

/// Reduced state on the second factor.
pub fn reduced_second(rho: &DensityMatrix, da: usize, db: usize) -> Result<CMat> {
    partial_trace_first(rho.matrix(), da, db)
}
