use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{hermitian_eigenvalues, C64, DENSITY_TOL};
use crate::{Error, Result};

/// Hermitian, unit-trace, positive semidefinite operator of dimension `2^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    data: Vec<C64>,
}

/// Result of comparing a state against `I/dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mixedness {
    pub is_maximally_mixed: bool,
    /// `max |ρ_ij − δ_ij/dim|`.
    pub deviation: f64,
}

impl DensityMatrix {
    /// Wrap row-major entries. Only the shape is checked here; see [`validate`](Self::validate).
    pub fn from_entries(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::InvalidDensityMatrix(format!("dimension {dim} is not a power of two")));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(dim * dim, data.len()));
        }
        Ok(Self { dim, data })
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0 / dim as f64, 0.0);
        }
        Self::from_entries(dim, data)
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let dim = psi.len();
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                data[i * dim + j] = psi[i] * psi[j].conj();
            }
        }
        Self::from_entries(dim, data)
    }

    /// `Σ w_i ρ_i`; weights are used as given.
    pub fn mixture<'a, I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, &'a DensityMatrix)>,
    {
        let mut acc: Option<DensityMatrix> = None;
        for (w, rho) in terms {
            match acc.as_mut() {
                None => {
                    let data = rho.data.iter().map(|v| v * w).collect();
                    acc = Some(Self::from_entries(rho.dim, data)?);
                }
                Some(a) => {
                    if a.dim != rho.dim {
                        return Err(Error::DimensionMismatch(a.dim, rho.dim));
                    }
                    a.data.iter_mut().zip(&rho.data).for_each(|(x, y)| *x += y * w);
                }
            }
        }
        acc.ok_or_else(|| Error::InvalidDensityMatrix("empty mixture".into()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ_ij ρ_ij ρ_ji = Σ |ρ_ij|² for Hermitian ρ.
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(self.dim, &self.data)
    }

    /// Check the Hermitian, unit-trace and positivity invariants.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let herm = self.hermiticity_deviation();
        if herm > tol {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate(DENSITY_TOL).is_ok()
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn mixedness(&self, tol: f64) -> Mixedness {
        let inv = 1.0 / self.dim as f64;
        let mut deviation = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let target = if i == j { inv } else { 0.0 };
                deviation = deviation.max((self.get(i, j) - C64::new(target, 0.0)).norm());
            }
        }
        Mixedness {
            is_maximally_mixed: deviation <= tol,
            deviation,
        }
    }

    /// Row-major, real/imaginary interleaved, little-endian `f64`.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.data.len() * 16);
        for v in &self.data {
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        }
        out
    }

    pub fn from_le_bytes(dim: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != dim * dim * 16 {
            return Err(Error::DimensionMismatch(dim * dim * 16, bytes.len()));
        }
        let data = bytes
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                C64::new(re, im)
            })
            .collect();
        Self::from_entries(dim, data)
    }

    pub fn to_base64(&self) -> String {
        B64.encode(self.to_le_bytes())
    }

    pub fn from_base64(dim: usize, encoded: &str) -> Result<Self> {
        let bytes = B64
            .decode(encoded)
            .map_err(|e| Error::Parse(format!("base64 density matrix: {e}")))?;
        Self::from_le_bytes(dim, &bytes)
    }
}

/// `D(a, b) = ½ Σ |λ_i(a − b)|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    let diff: Vec<C64> = a.data.iter().zip(&b.data).map(|(x, y)| x - y).collect();
    let eig = hermitian_eigenvalues(a.dim, &diff);
    Ok(0.5 * eig.iter().map(|l| l.abs()).sum::<f64>())
}

#[derive(Serialize, Deserialize)]
struct Encoded {
    dim: usize,
    data: String,
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Encoded {
            dim: self.dim,
            data: self.to_base64(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let e = Encoded::deserialize(d)?;
        DensityMatrix::from_base64(e.dim, &e.data).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(dim: usize, k: usize) -> DensityMatrix {
        let mut psi = vec![C64::new(0.0, 0.0); dim];
        psi[k] = C64::new(1.0, 0.0);
        DensityMatrix::pure(&psi).unwrap()
    }

    #[test]
    fn trace_distance_examples() {
        let zero = basis(2, 0);
        let one = basis(2, 1);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert_eq!(trace_distance(&zero, &zero).unwrap(), 0.0);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
        assert!((trace_distance(&mixed, &zero).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(
            trace_distance(&zero, &basis(4, 0)),
            Err(Error::DimensionMismatch(2, 4))
        ));
    }

    #[test]
    fn mixedness_examples() {
        let m = DensityMatrix::maximally_mixed(4).unwrap().mixedness(1e-10);
        assert!(m.is_maximally_mixed);
        assert_eq!(m.deviation, 0.0);
        let m = basis(2, 0).mixedness(1e-10);
        assert!(!m.is_maximally_mixed);
        assert_eq!(m.deviation, 0.5);
    }

    #[test]
    fn validation() {
        assert!(basis(4, 2).is_valid());
        let bad = DensityMatrix::from_entries(
            2,
            vec![
                C64::new(1.5, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(-0.5, 0.0),
            ],
        )
        .unwrap();
        assert!(bad.validate(1e-10).unwrap_err().to_string().contains("negative"));
        assert!(DensityMatrix::from_entries(3, vec![C64::new(0.0, 0.0); 9]).is_err());
    }

    #[test]
    fn base64_payload_layout() {
        let rho = DensityMatrix::from_entries(
            2,
            vec![
                C64::new(0.5, 0.0),
                C64::new(0.25, -0.125),
                C64::new(0.25, 0.125),
                C64::new(0.5, 0.0),
            ],
        )
        .unwrap();
        let bytes = rho.to_le_bytes();
        assert_eq!(bytes.len(), 64);
        assert_eq!(&bytes[16..24], &0.25f64.to_le_bytes());
        assert_eq!(&bytes[24..32], &(-0.125f64).to_le_bytes());
        let json = serde_json::to_string(&rho).unwrap();
        let back: DensityMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rho);
    }
}
