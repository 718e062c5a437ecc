//! Orthogonal matrices that mix the elements of a POVM.
//!
//! Witness synthesis contracts each POVM with a rotation O^(b) acting on
//! element indices. For the mixture to remain a measurement, O must be a
//! proper rotation that fixes the uniform vector (all row and column sums 1):
//! completeness of the POVM is the statement that the element sum is the
//! identity, and a ones-fixing O preserves that sum.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real square matrices acting on POVM element indices.
pub type RMat = DMatrix<f64>;

/// Default tolerance for rotation validation.
pub const ROTATION_TOL: f64 = 1e-9;

/// Rotation of R^3 about `axis` by `theta` (right-handed).
pub fn rodrigues(axis: [f64; 3], theta: f64) -> Result<RMat> {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if norm < 1e-14 {
        return Err(Error::BadRotation("axis must be nonzero".into()));
    }
    let n = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
    let (s, c) = theta.sin_cos();
    let k = RMat::from_row_slice(
        3,
        3,
        &[0.0, -n[2], n[1], n[2], 0.0, -n[0], -n[1], n[0], 0.0],
    );
    let nnt = RMat::from_fn(3, 3, |i, j| n[i] * n[j]);
    Ok(RMat::identity(3, 3) * c + nnt * (1.0 - c) + k * s)
}

/// The circulant form of the ones-axis rotation in three dimensions, with
/// first row (c1, c2, c3) for
///   c1 = (1 + 2 cos t)/3,
///   c2 = (1 - cos t)/3 + sin t / sqrt 3,
///   c3 = (1 - cos t)/3 - sin t / sqrt 3.
///
/// This display convention is the transpose of [`rodrigues`] about
/// (1,1,1)/sqrt(3): `axis_circulant_d3(t) == rodrigues([1,1,1], -t)`.
pub fn axis_circulant_d3(theta: f64) -> RMat {
    let (s, c) = theta.sin_cos();
    let c1 = (1.0 + 2.0 * c) / 3.0;
    let c2 = (1.0 - c) / 3.0 + s / 3f64.sqrt();
    let c3 = (1.0 - c) / 3.0 - s / 3f64.sqrt();
    RMat::from_row_slice(3, 3, &[c1, c2, c3, c3, c1, c2, c2, c3, c1])
}

/// Rotation by `theta` in the plane of the i-th and j-th members of the
/// orthonormal difference frame (1-based, i < j <= d - 1).
///
/// The frame is the Gram-Schmidt orthonormalization of
/// e_1 - e_2, e_2 - e_3, ..., e_{d-1} - e_d, all orthogonal to the uniform
/// vector, so every plane rotation fixes it. For d = 3 and plane (1, 2) this
/// reproduces [`rodrigues`] about (1,1,1)/sqrt(3) exactly.
pub fn planar_axis_rotation(d: usize, i: usize, j: usize, theta: f64) -> Result<RMat> {
    if d < 3 {
        return Err(Error::InvalidDimension {
            d,
            reason: "planar rotations need d >= 3",
        });
    }
    if i == 0 || j == 0 || i >= j || j > d - 1 {
        return Err(Error::BadRotation(format!(
            "plane indices must satisfy 1 <= i < j <= {}, got ({i}, {j})",
            d - 1
        )));
    }
    let frame = difference_frame(d);
    let (u, v) = (&frame[i - 1], &frame[j - 1]);
    let (s, c) = theta.sin_cos();
    let mut o = RMat::identity(d, d);
    o += (u * u.transpose() + v * v.transpose()) * (c - 1.0);
    o += (v * u.transpose() - u * v.transpose()) * s;
    Ok(o)
}

/// Orthonormalized e_k - e_{k+1} differences, spanning the complement of the
/// uniform vector.
fn difference_frame(d: usize) -> Vec<DVector<f64>> {
    let mut frame: Vec<DVector<f64>> = Vec::with_capacity(d - 1);
    for k in 0..d - 1 {
        let mut v = DVector::zeros(d);
        v[k] = 1.0;
        v[k + 1] = -1.0;
        for u in &frame {
            let proj = u.dot(&v);
            v -= u * proj;
        }
        let norm = v.norm();
        frame.push(v / norm);
    }
    frame
}

/// Checks that `o` is a proper rotation fixing the uniform vector: orthogonal,
/// determinant +1, and all row and column sums 1, each within `tol`.
pub fn verify_rotation(o: &RMat, tol: f64) -> Result<()> {
    if o.nrows() != o.ncols() || o.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: o.nrows(),
            cols: o.ncols(),
        });
    }
    let d = o.nrows();
    let gram_dev = (o.transpose() * o - RMat::identity(d, d))
        .iter()
        .fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if gram_dev > tol {
        return Err(Error::BadRotation(format!(
            "not orthogonal: Gram deviation {gram_dev:.3e}"
        )));
    }
    let det = o.determinant();
    if (det - 1.0).abs() > tol {
        return Err(Error::BadRotation(format!(
            "determinant {det:.6} is not +1"
        )));
    }
    for k in 0..d {
        let row: f64 = o.row(k).iter().sum();
        let col: f64 = o.column(k).iter().sum();
        if (row - 1.0).abs() > tol || (col - 1.0).abs() > tol {
            return Err(Error::BadRotation(format!(
                "does not fix the uniform vector: row/col sum ({row:.6}, {col:.6}) at index {k}"
            )));
        }
    }
    Ok(())
}

/// One validated rotation per POVM of a measurement family.
#[derive(Debug, Clone)]
pub struct RotationSet {
    d: usize,
    angles: Option<Vec<f64>>,
    rotations: Vec<RMat>,
}

impl RotationSet {
    /// Validates every matrix with [`verify_rotation`].
    pub fn new(d: usize, rotations: Vec<RMat>) -> Result<Self> {
        if rotations.is_empty() {
            return Err(Error::BadRotation("empty rotation set".into()));
        }
        for o in &rotations {
            if o.nrows() != d {
                return Err(Error::DimensionMismatch {
                    context: "rotation set",
                    left: o.nrows(),
                    right: d,
                });
            }
            verify_rotation(o, ROTATION_TOL)?;
        }
        Ok(Self {
            d,
            angles: None,
            rotations,
        })
    }

    /// L copies of the identity (the unrotated witness).
    pub fn identity(d: usize, l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::BadRotation("empty rotation set".into()));
        }
        Ok(Self {
            d,
            angles: Some(vec![0.0; l]),
            rotations: vec![RMat::identity(d, d); l],
        })
    }

    /// One ones-axis rotation per POVM: the b-th matrix rotates by
    /// `angles[b]` about (1,1,1)/sqrt(3) via [`rodrigues`].
    pub fn from_axis_angles_d3(angles: &[f64]) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::BadRotation("empty rotation set".into()));
        }
        let axis = [1.0, 1.0, 1.0];
        let rotations = angles
            .iter()
            .map(|&th| rodrigues(axis, th))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            d: 3,
            angles: Some(angles.to_vec()),
            rotations,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.rotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }

    pub fn rotation(&self, b: usize) -> &RMat {
        &self.rotations[b]
    }

    /// The generating angles when the set was built from them.
    pub fn angles(&self) -> Option<&[f64]> {
        self.angles.as_deref()
    }

    pub fn to_data(&self) -> RotationSetData {
        RotationSetData {
            d: self.d,
            angles: self.angles.clone(),
            rotations: self
                .rotations
                .iter()
                .map(|o| {
                    (0..o.nrows())
                        .map(|r| o.row(r).iter().copied().collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_data(data: &RotationSetData) -> Result<Self> {
        let mut rotations = Vec::with_capacity(data.rotations.len());
        for rows in &data.rotations {
            if rows.len() != data.d || rows.iter().any(|r| r.len() != data.d) {
                return Err(Error::MalformedData(format!(
                    "rotation rows must form a {0}x{0} matrix",
                    data.d
                )));
            }
            let flat: Vec<f64> = rows.iter().flatten().copied().collect();
            rotations.push(RMat::from_row_slice(data.d, data.d, &flat));
        }
        let mut set = Self::new(data.d, rotations)?;
        set.angles = data.angles.clone();
        Ok(set)
    }
}

/// Wire format: `{"d", "angles", "rotations": [[[row], ...], ...]}` with
/// row-major real entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RotationSetData {
    pub d: usize,
    pub angles: Option<Vec<f64>>,
    pub rotations: Vec<Vec<Vec<f64>>>,
}
