//! Mutually unbiased measurement (MUM) construction and verification, MUB
//! sets, conversion of MUBs to projective MUMs, and the bundled transcriptions
//! of printed d=3 and d=6 measurement families.
//!
//! A MUM with efficiency parameter kappa satisfies, for POVM elements
//! P_n^(b) of unit trace:
//!   Tr(P_i^(a) P_j^(b)) = 1/d               across different POVMs,
//!   Tr(P_i^(a) P_j^(a)) = delta_ij kappa + (1 - delta_ij)(1 - kappa)/(d - 1).
//!
//! The construction takes an orthonormal traceless basis F_{n,b} and sets
//!   F^(b) = sum_n F_{n,b},
//!   F_n^(b) = F^(b) - (d + sqrt d) F_{n,b}   for n < d,
//!   F_d^(b) = (1 + sqrt d) F^(b),
//!   P_n^(b) = I/d + t F_n^(b),
//! where t > 0 is bounded by element positivity.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{GeneratorBasis, SCHEME_DEFAULT, SCHEME_PAPER_D3};
use crate::numerics::{
    hs_inner, identity, min_eigenvalue, validate_hermitian, CMat, CVec, HermitianOperator,
    MatrixData, ToleranceConfig, ValidationPolicy, VectorData,
};

const MUM_D3_JSON: &str = include_str!("../fixtures/mum_d3.json");
const MUM_D6_JSON: &str = include_str!("../fixtures/mum_d6.json");
const MUB_D6_JSON: &str = include_str!("../fixtures/mub_d6.json");

/// A family of L POVMs with d elements each, pairwise unbiased, with uniform
/// element purity kappa.
#[derive(Debug, Clone)]
pub struct Mum {
    d: usize,
    l: usize,
    t: Option<f64>,
    kappa: f64,
    policy: ValidationPolicy,
    source: String,
    elements: Vec<Vec<HermitianOperator>>,
}

impl Mum {
    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of POVMs in the family (L in the axioms; may be < d + 1).
    pub fn num_povms(&self) -> usize {
        self.l
    }

    /// Construction parameter, absent for transcribed or projective families.
    pub fn t(&self) -> Option<f64> {
        self.t
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn policy(&self) -> ValidationPolicy {
        self.policy
    }

    /// Human-readable construction record, carried into witness provenance.
    pub fn source(&self) -> &str {
        &self.source
    }

    /// POVM `b` (0-based).
    pub fn povm(&self, b: usize) -> &[HermitianOperator] {
        &self.elements[b]
    }

    /// Element P_n^(b) with 0-based b and n.
    pub fn element(&self, b: usize, n: usize) -> &HermitianOperator {
        &self.elements[b][n]
    }

    /// True when the family is complete (L = d + 1).
    pub fn is_complete(&self) -> bool {
        self.l == self.d + 1
    }

    pub fn to_data(&self) -> MumData {
        let elements = self
            .elements
            .iter()
            .enumerate()
            .flat_map(|(b, povm)| {
                povm.iter().enumerate().map(move |(n, p)| MumElement {
                    b: b + 1,
                    n: n + 1,
                    matrix: MatrixData::from_cmat(p.matrix()),
                })
            })
            .collect();
        MumData {
            d: self.d,
            l: self.l,
            t: self.t,
            kappa: self.kappa,
            elements,
        }
    }

    /// Rebuilds from wire data, revalidating Hermiticity, the stored kappa,
    /// and the measurement axioms under the given policy.
    pub fn from_data(
        data: &MumData,
        cfg: &ToleranceConfig,
        policy: ValidationPolicy,
    ) -> Result<Self> {
        let (d, l) = (data.d, data.l);
        if d < 2 {
            return Err(Error::InvalidDimension {
                d,
                reason: "measurements need d >= 2",
            });
        }
        if l == 0 || l > d + 1 {
            return Err(Error::MalformedData(format!(
                "POVM count {l} outside 1..={}",
                d + 1
            )));
        }
        if data.elements.len() != l * d {
            return Err(Error::MalformedData(format!(
                "expected {} elements, got {}",
                l * d,
                data.elements.len()
            )));
        }
        let mut table: Vec<Vec<Option<HermitianOperator>>> = vec![vec![None; d]; l];
        for el in &data.elements {
            if el.b == 0 || el.b > l || el.n == 0 || el.n > d {
                return Err(Error::MalformedData(format!(
                    "element index (b={}, n={}) outside the {l}x{d} grid",
                    el.b, el.n
                )));
            }
            if table[el.b - 1][el.n - 1].is_some() {
                return Err(Error::MalformedData(format!(
                    "duplicate element (b={}, n={})",
                    el.b, el.n
                )));
            }
            let m = el.matrix.to_cmat()?;
            if m.nrows() != d {
                return Err(Error::DimensionMismatch {
                    context: "mum element",
                    left: m.nrows(),
                    right: d,
                });
            }
            let (op, _) = validate_hermitian(&m, cfg, policy)?;
            table[el.b - 1][el.n - 1] = Some(op);
        }
        let elements: Vec<Vec<HermitianOperator>> = table
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|op| op.expect("grid fully populated"))
                    .collect()
            })
            .collect();

        let spread_tol = purity_spread_tol(cfg, policy);
        let (kappa, _) = mean_purity(&elements, spread_tol)?;
        let kappa_consistency = match policy {
            ValidationPolicy::Strict => 1e-9,
            ValidationPolicy::Fixture => 5e-3,
        };
        if (kappa - data.kappa).abs() > kappa_consistency {
            return Err(Error::MalformedData(format!(
                "stored kappa {} disagrees with recomputed {kappa}",
                data.kappa
            )));
        }
        let mum = Self {
            d,
            l,
            t: data.t,
            kappa: data.kappa,
            policy,
            source: format!("loaded d={d} L={l} kappa={:.6}", data.kappa),
            elements,
        };
        let report = verify_mum_axioms(&mum, cfg);
        if !report.pass {
            return Err(Error::BadMeasurement(report.describe()));
        }
        Ok(mum)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_data())?)
    }

    pub fn from_json_str(s: &str, cfg: &ToleranceConfig, policy: ValidationPolicy) -> Result<Self> {
        let data: MumData = serde_json::from_str(s)?;
        Self::from_data(&data, cfg, policy)
    }
}

/// Wire format: `{"d", "L", "t", "kappa", "elements": [{"b","n","matrix"}]}`
/// with 1-based b and n and `t: null` for non-constructed families.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MumData {
    pub d: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub t: Option<f64>,
    pub kappa: f64,
    pub elements: Vec<MumElement>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MumElement {
    pub b: usize,
    pub n: usize,
    pub matrix: MatrixData,
}

fn purity_spread_tol(cfg: &ToleranceConfig, policy: ValidationPolicy) -> f64 {
    match policy {
        ValidationPolicy::Strict => cfg.ortho_tol * 100.0,
        ValidationPolicy::Fixture => cfg.fixture_tol,
    }
}

/// Mean element purity and the spread across elements; errors when the spread
/// exceeds the tolerance (elements of a valid family share one purity).
fn mean_purity(elements: &[Vec<HermitianOperator>], spread_tol: f64) -> Result<(f64, f64)> {
    let mut purities = Vec::new();
    for povm in elements {
        for p in povm {
            purities.push(hs_inner(p, p)?);
        }
    }
    let mean = purities.iter().sum::<f64>() / purities.len() as f64;
    let spread = purities.iter().fold(0.0_f64, |acc, &p| acc.max(p))
        - purities.iter().fold(f64::INFINITY, |acc, &p| acc.min(p));
    if spread > spread_tol {
        return Err(Error::PuritySpread {
            spread,
            tolerance: spread_tol,
        });
    }
    Ok((mean, spread))
}

/// The efficiency parameter kappa, recomputed as the mean element purity.
///
/// Errors when element purities are not uniform within the policy tolerance
/// or the mean leaves [1/d, 1].
pub fn kappa_of(mum: &Mum) -> Result<f64> {
    let cfg = ToleranceConfig::default();
    let spread_tol = purity_spread_tol(&cfg, mum.policy);
    let (kappa, _) = mean_purity(&mum.elements, spread_tol)?;
    let lower = 1.0 / mum.d as f64 - 1e-12;
    let upper = 1.0 + spread_tol;
    if !(lower..=upper).contains(&kappa) {
        return Err(Error::OutOfRange(format!(
            "kappa {kappa} outside [1/d, 1] for d = {}",
            mum.d
        )));
    }
    Ok(kappa)
}

/// Largest feasible construction parameter: the positivity boundary
/// t* = min over operators F with a negative eigenvalue of 1/(d |lambda_min|).
pub fn max_feasible_t(basis: &GeneratorBasis) -> Result<f64> {
    let d = basis.d();
    let mut best = f64::INFINITY;
    for b in 0..basis.groups() {
        for f in family_operators(basis, b) {
            let lam = min_eigenvalue(&f)?;
            if lam < 0.0 {
                best = best.min(1.0 / (d as f64 * lam.abs()));
            }
        }
    }
    if !best.is_finite() {
        return Err(Error::BadGenerators(
            "no operator in the family has a negative eigenvalue".into(),
        ));
    }
    Ok(best)
}

/// The d operators F_n^(b) for group b of the basis.
fn family_operators(basis: &GeneratorBasis, b: usize) -> Vec<HermitianOperator> {
    let d = basis.d();
    let sqrt_d = (d as f64).sqrt();
    let mut fb = CMat::zeros(d, d);
    for f in basis.group(b) {
        fb += f.matrix();
    }
    let mut out = Vec::with_capacity(d);
    for f in basis.group(b) {
        out.push(HermitianOperator::symmetrized(
            &fb - f.matrix().scale(d as f64 + sqrt_d),
        ));
    }
    out.push(HermitianOperator::symmetrized(fb.scale(1.0 + sqrt_d)));
    out
}

/// Builds the d + 1 POVMs at construction parameter t.
pub fn build_mums(basis: &GeneratorBasis, t: f64, cfg: &ToleranceConfig) -> Result<Mum> {
    let d = basis.d();
    if t.is_nan() || t <= 0.0 {
        return Err(Error::OutOfRange(format!(
            "construction parameter t must be positive, got {t}"
        )));
    }
    let eye_over_d = identity(d).scale(1.0 / d as f64);
    let mut elements = Vec::with_capacity(d + 1);
    for b in 0..basis.groups() {
        let povm: Vec<HermitianOperator> = family_operators(basis, b)
            .into_iter()
            .map(|f| HermitianOperator::symmetrized(&eye_over_d + f.matrix().scale(t)))
            .collect();
        for p in &povm {
            if min_eigenvalue(p)? < -cfg.psd_tol {
                return Err(Error::InfeasibleT {
                    t,
                    max: max_feasible_t(basis)?,
                });
            }
        }
        elements.push(povm);
    }
    let (kappa, _) = mean_purity(&elements, purity_spread_tol(cfg, ValidationPolicy::Strict))?;
    let mum = Mum {
        d,
        l: d + 1,
        t: Some(t),
        kappa,
        policy: ValidationPolicy::Strict,
        source: format!("constructed d={d} scheme={} t={t:.9}", basis.scheme()),
        elements,
    };
    let report = verify_mum_axioms(&mum, cfg);
    if !report.pass {
        return Err(Error::BadMeasurement(report.describe()));
    }
    Ok(mum)
}

/// Worst-case deviations of a family from the measurement axioms.
#[derive(Debug, Clone, Serialize)]
pub struct MumReport {
    /// Smallest element eigenvalue across the family.
    pub psd_min: f64,
    /// Max entrywise deviation of sum_n P_n^(b) from the identity.
    pub completeness_dev: f64,
    /// Max |Tr P - 1| across elements.
    pub trace_dev: f64,
    /// Max |Tr(P_i^(a) P_j^(b)) - 1/d| across different POVMs.
    pub cross_dev: f64,
    /// Max deviation from the same-POVM kappa pattern.
    pub same_basis_dev: f64,
    /// Mean element purity used for the same-POVM pattern.
    pub kappa: f64,
    pub pass: bool,
}

impl MumReport {
    pub fn describe(&self) -> String {
        format!(
            "psd_min {:.3e}, completeness {:.3e}, trace {:.3e}, cross {:.3e}, same-basis {:.3e}",
            self.psd_min,
            self.completeness_dev,
            self.trace_dev,
            self.cross_dev,
            self.same_basis_dev
        )
    }
}

/// Checks PSD, completeness, unit trace, and the two pairing axioms.
///
/// Thresholds follow the family's validation policy: strict tolerances for
/// computed families, `fixture_tol` across the board for transcriptions.
pub fn verify_mum_axioms(mum: &Mum, cfg: &ToleranceConfig) -> MumReport {
    let d = mum.d;
    let df = d as f64;
    let mut psd_min = f64::INFINITY;
    let mut trace_dev = 0.0_f64;
    let mut completeness_dev = 0.0_f64;
    for povm in &mum.elements {
        let mut sum = CMat::zeros(d, d);
        for p in povm {
            psd_min = psd_min.min(min_eigenvalue(p).unwrap_or(f64::NEG_INFINITY));
            trace_dev = trace_dev.max((p.trace() - 1.0).abs());
            sum += p.matrix();
        }
        let dev = (&sum - identity(d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max);
        completeness_dev = completeness_dev.max(dev);
    }

    let purities: Vec<f64> = mum
        .elements
        .iter()
        .flat_map(|povm| povm.iter().map(|p| hs_inner(p, p).unwrap_or(f64::NAN)))
        .collect();
    let kappa = purities.iter().sum::<f64>() / purities.len() as f64;

    let mut cross_dev = 0.0_f64;
    let mut same_dev = 0.0_f64;
    let off_target = (1.0 - kappa) / (df - 1.0);
    for a in 0..mum.l {
        for b in 0..mum.l {
            for i in 0..d {
                for j in 0..d {
                    let v =
                        hs_inner(&mum.elements[a][i], &mum.elements[b][j]).unwrap_or(f64::INFINITY);
                    if a == b {
                        let target = if i == j { kappa } else { off_target };
                        same_dev = same_dev.max((v - target).abs());
                    } else {
                        cross_dev = cross_dev.max((v - 1.0 / df).abs());
                    }
                }
            }
        }
    }

    let (psd_floor, herm_bound, pair_bound) = match mum.policy {
        ValidationPolicy::Strict => (cfg.psd_tol, cfg.herm_tol, cfg.ortho_tol * 10.0),
        // Each transcribed entry is off by at most fixture_tol/2 (half the
        // print quantum); traces and completeness sum d of them.
        ValidationPolicy::Fixture => (
            cfg.fixture_tol,
            d as f64 * cfg.fixture_tol / 2.0,
            cfg.fixture_tol,
        ),
    };
    MumReport {
        psd_min,
        completeness_dev,
        trace_dev,
        cross_dev,
        same_basis_dev: same_dev,
        kappa,
        pass: psd_min >= -psd_floor
            && completeness_dev <= herm_bound
            && trace_dev <= herm_bound
            && cross_dev <= pair_bound
            && same_dev <= pair_bound,
    }
}

/// A set of mutually unbiased orthonormal bases: |<i|j>| = 1/sqrt(d) for
/// vectors from different bases.
#[derive(Debug, Clone)]
pub struct MubSet {
    d: usize,
    policy: ValidationPolicy,
    bases: Vec<Vec<CVec>>,
}

impl MubSet {
    /// Validates orthonormality within each basis and unbiasedness across
    /// bases, with bounds chosen by policy.
    pub fn new(
        d: usize,
        bases: Vec<Vec<CVec>>,
        cfg: &ToleranceConfig,
        policy: ValidationPolicy,
    ) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension {
                d,
                reason: "bases need d >= 2",
            });
        }
        if bases.is_empty() {
            return Err(Error::MalformedData("no bases given".into()));
        }
        for basis in &bases {
            if basis.len() != d || basis.iter().any(|v| v.len() != d) {
                return Err(Error::MalformedData(format!(
                    "every basis must hold {d} vectors of dimension {d}"
                )));
            }
        }
        let (gram_bound, cross_bound) = match policy {
            ValidationPolicy::Strict => (cfg.ortho_tol, cfg.ortho_tol * 10.0),
            ValidationPolicy::Fixture => (cfg.fixture_tol, cfg.fixture_tol),
        };
        let target = 1.0 / (d as f64).sqrt();
        for (bi, basis) in bases.iter().enumerate() {
            for (i, v) in basis.iter().enumerate() {
                for (j, w) in basis.iter().enumerate() {
                    let overlap = v.dotc(w);
                    let want = if i == j { 1.0 } else { 0.0 };
                    let dev = (overlap - Complex::new(want, 0.0)).norm();
                    if dev > gram_bound {
                        return Err(Error::BadMeasurement(format!(
                            "basis {bi} is not orthonormal: Gram deviation {dev:.3e} at ({i},{j})"
                        )));
                    }
                }
            }
        }
        for a in 0..bases.len() {
            for b in (a + 1)..bases.len() {
                for v in &bases[a] {
                    for w in &bases[b] {
                        let dev = (v.dotc(w).norm() - target).abs();
                        if dev > cross_bound {
                            return Err(Error::BadMeasurement(format!(
                                "bases {a} and {b} are not unbiased: overlap deviation {dev:.3e}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self { d, policy, bases })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn num_bases(&self) -> usize {
        self.bases.len()
    }

    pub fn basis(&self, b: usize) -> &[CVec] {
        &self.bases[b]
    }

    pub fn policy(&self) -> ValidationPolicy {
        self.policy
    }

    pub fn to_data(&self) -> MubSetData {
        MubSetData {
            d: self.d,
            bases: self
                .bases
                .iter()
                .map(|basis| basis.iter().map(VectorData::from_cvec).collect())
                .collect(),
        }
    }

    pub fn from_data(
        data: &MubSetData,
        cfg: &ToleranceConfig,
        policy: ValidationPolicy,
    ) -> Result<Self> {
        let bases = data
            .bases
            .iter()
            .map(|basis| {
                basis
                    .iter()
                    .map(|v| v.to_cvec())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(data.d, bases, cfg, policy)
    }
}

/// Wire format: `{"d", "bases": [[{"re": [...], "im": [...]}, ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MubSetData {
    pub d: usize,
    pub bases: Vec<Vec<VectorData>>,
}

/// The computational basis together with the discrete-Fourier basis; these
/// two are unbiased in every dimension.
pub fn fourier_mub_pair(d: usize) -> Result<MubSet> {
    if d < 2 {
        return Err(Error::InvalidDimension {
            d,
            reason: "bases need d >= 2",
        });
    }
    let mut computational = Vec::with_capacity(d);
    for k in 0..d {
        let mut v = CVec::zeros(d);
        v[k] = Complex::new(1.0, 0.0);
        computational.push(v);
    }
    let norm = 1.0 / (d as f64).sqrt();
    let mut fourier = Vec::with_capacity(d);
    for k in 0..d {
        let v = CVec::from_fn(d, |j, _| {
            let phase = 2.0 * std::f64::consts::PI * (j * k) as f64 / d as f64;
            Complex::from_polar(norm, phase)
        });
        fourier.push(v);
    }
    MubSet::new(
        d,
        vec![computational, fourier],
        &ToleranceConfig::default(),
        ValidationPolicy::Strict,
    )
}

/// The bundled three-basis d=6 transcription (columns of the printed arrays).
pub fn mub_fixture_d6() -> Result<MubSet> {
    let data: MubSetData = serde_json::from_str(MUB_D6_JSON)?;
    MubSet::from_data(
        &data,
        &ToleranceConfig::default(),
        ValidationPolicy::Fixture,
    )
}

/// Converts a MUB set to the projective MUM it defines: P_n^(b) = |b,n><b,n|.
///
/// kappa is the axiom value 1 for rank-one projective families. Transcribed
/// vectors are used as given (never renormalized), matching the raw-data
/// policy used for all bundled transcriptions.
pub fn mub_to_mum(mubs: &MubSet) -> Result<Mum> {
    let d = mubs.d();
    let elements: Vec<Vec<HermitianOperator>> = (0..mubs.num_bases())
        .map(|b| {
            mubs.basis(b)
                .iter()
                .map(|v| {
                    let proj = CMat::from_fn(d, d, |i, j| v[i] * v[j].conj());
                    HermitianOperator::symmetrized(proj)
                })
                .collect()
        })
        .collect();
    let mum = Mum {
        d,
        l: mubs.num_bases(),
        t: None,
        kappa: 1.0,
        policy: mubs.policy(),
        source: format!("projective d={d} from {} unbiased bases", mubs.num_bases()),
        elements,
    };
    let report = verify_mum_axioms(&mum, &ToleranceConfig::default());
    if !report.pass {
        return Err(Error::BadMeasurement(report.describe()));
    }
    Ok(mum)
}

/// The bundled d=3 four-POVM transcription (three-decimal print precision).
pub fn mum_fixture_d3() -> Result<Mum> {
    let mut mum = Mum::from_json_str(
        MUM_D3_JSON,
        &ToleranceConfig::default(),
        ValidationPolicy::Fixture,
    )?;
    mum.source = "mum-d3 transcription".into();
    Ok(mum)
}

/// The bundled d=6 seven-POVM transcription (three-decimal print precision).
pub fn mum_fixture_d6() -> Result<Mum> {
    let mut mum = Mum::from_json_str(
        MUM_D6_JSON,
        &ToleranceConfig::default(),
        ValidationPolicy::Fixture,
    )?;
    mum.source = "mum-d6 transcription".into();
    Ok(mum)
}

/// The full-precision d=3 ensemble that the bundled transcription rounds to
/// three decimals: t solved from the family's uniform purity 0.358.
pub fn mum_exact_d3() -> Result<Mum> {
    let basis = GeneratorBasis::new(3, SCHEME_PAPER_D3)?;
    // kappa(t) = 1/d + t^2 (1 + sqrt d)^2 (d - 1) at d = 3, kappa = 0.358.
    let t = ((0.358 - 1.0 / 3.0) / (2.0 * (1.0 + 3f64.sqrt()).powi(2))).sqrt();
    let mut mum = build_mums(&basis, t, &ToleranceConfig::default())?;
    mum.source = format!("mum-d3-exact (t={t:.9} from kappa=0.358)");
    Ok(mum)
}

/// The full-precision d=6 ensemble behind the bundled transcription: t solved
/// from the leading off-diagonal magnitude 0.102 = t (5 + sqrt 6)/sqrt 2.
pub fn mum_exact_d6() -> Result<Mum> {
    let basis = GeneratorBasis::new(6, SCHEME_DEFAULT)?;
    let t = 0.102 * 2f64.sqrt() / (5.0 + 6f64.sqrt());
    let mut mum = build_mums(&basis, t, &ToleranceConfig::default())?;
    mum.source = format!("mum-d6-exact (t={t:.9} from leading entry 0.102)");
    Ok(mum)
}
