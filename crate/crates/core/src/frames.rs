//! Finite frames in `C^d`.
//!
//! Every finite sequence is a Bessel sequence, and sums over the index set are
//! finite, so "frame" reduces to "spans `C^d`". Zero vectors are permitted
//! anywhere in a sequence.

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    column_space_leq, hermitian_eig, inverse, rank, CMatrix, CVector, C64, DEFAULT_RANK_TOL,
};
use crate::random::SeededRng;

/// `λ_min(S) > FRAME_TOL · λ_max(S)` decides whether a sequence spans.
pub const FRAME_TOL: f64 = 1e-10;

/// Default threshold for [`FrameSeq::is_dual_pair`].
pub const DEFAULT_DUAL_TOL: f64 = 1e-9;

/// An ordered sequence of `N ≥ 1` vectors of `C^d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameSeq {
    dim: usize,
    vectors: Vec<CVector>,
}

#[derive(Deserialize)]
struct RawFrame {
    dim: usize,
    vectors: Vec<CVector>,
}

impl<'de> Deserialize<'de> for FrameSeq {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawFrame::deserialize(deserializer)?;
        FrameSeq::new(raw.dim, raw.vectors).map_err(de::Error::custom)
    }
}

/// Optimal frame bounds `A ≤ B`; `A` is clamped to zero for non-spanning sequences.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    pub fn is_frame(&self) -> bool {
        self.lower > 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    SpanningFrame,
    RieszBasis,
    NonSpanning,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameClass {
    pub kind: FrameKind,
    /// Linearly independent vectors.
    pub minimal: bool,
}

impl FrameClass {
    pub fn is_spanning(&self) -> bool {
        self.kind != FrameKind::NonSpanning
    }
}

impl FrameSeq {
    pub fn new(dim: usize, vectors: Vec<CVector>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("frame dimension must be at least 1".into()));
        }
        if vectors.is_empty() {
            return Err(Error::Domain("frame must contain at least one vector".into()));
        }
        if let Some(bad) = vectors.iter().find(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        Ok(FrameSeq { dim, vectors })
    }

    /// The sequence of columns of a `d × N` matrix.
    pub fn from_columns(m: &CMatrix) -> Self {
        FrameSeq { dim: m.rows(), vectors: m.columns() }
    }

    pub fn from_vectors(vectors: Vec<CVector>) -> Result<Self> {
        let dim = vectors.first().map_or(0, CVector::dim);
        Self::new(dim, vectors)
    }

    /// Builds `e_{i_1}, e_{i_2}, …` scaled by the given real weights.
    pub fn weighted_basis(dim: usize, entries: &[(usize, f64)]) -> Result<Self> {
        let vectors = entries
            .iter()
            .map(|&(k, w)| {
                if k >= dim {
                    Err(Error::Domain(format!("basis index {k} out of range for dimension {dim}")))
                } else {
                    Ok(CVector::unit(dim, k).scale(C64::new(w, 0.0)))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, vectors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn get(&self, n: usize) -> &CVector {
        &self.vectors[n]
    }

    /// `(s_n · φ_n)`
    pub fn reweighted(&self, weights: &[C64]) -> Result<FrameSeq> {
        if weights.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: weights.len() });
        }
        Ok(FrameSeq {
            dim: self.dim,
            vectors: self.vectors.iter().zip(weights).map(|(v, &w)| v.scale(w)).collect(),
        })
    }

    /// `(A φ_n)` for a `d × d` matrix `A`.
    pub fn mapped(&self, a: &CMatrix) -> Result<FrameSeq> {
        if a.cols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: a.cols() });
        }
        Ok(FrameSeq { dim: a.rows(), vectors: self.vectors.iter().map(|v| a.mul_vec(v)).collect() })
    }

    /// `T_Φ`: the `d × N` matrix with columns `φ_n`.
    pub fn synthesis_matrix(&self) -> CMatrix {
        CMatrix::from_columns(&self.vectors).expect("validated frame")
    }

    /// `U_Φ`: the `N × d` matrix with rows `φ_n*`.
    pub fn analysis_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.len(), self.dim, |n, i| self.vectors[n][i].conj())
    }

    /// `U_Φ h = (⟨h, φ_n⟩)_n`
    pub fn analysis(&self, h: &CVector) -> Result<CVector> {
        if h.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: h.dim() });
        }
        Ok(CVector::from_raw(self.vectors.iter().map(|phi| h.inner(phi)).collect()))
    }

    /// `T_Φ c = Σ c_n φ_n`
    pub fn synthesis(&self, coeffs: &CVector) -> Result<CVector> {
        if coeffs.dim() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: coeffs.dim() });
        }
        let mut out = CVector::zeros(self.dim);
        for (c, phi) in coeffs.iter().zip(&self.vectors) {
            out.axpy(*c, phi);
        }
        Ok(out)
    }

    /// `S_Φ = Σ φ_n φ_n*`
    pub fn frame_operator(&self) -> CMatrix {
        let mut s = CMatrix::zeros(self.dim, self.dim);
        for phi in &self.vectors {
            for i in 0..self.dim {
                let pi = phi[i];
                if pi == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..self.dim {
                    s[(i, j)] += pi * phi[j].conj();
                }
            }
        }
        s
    }

    pub fn frame_bounds(&self) -> FrameBounds {
        let eig = hermitian_eig(&self.frame_operator()).expect("frame operator is Hermitian");
        let upper = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
        let lower = eig.eigenvalues[0];
        let lower = if upper > 0.0 && lower > FRAME_TOL * upper { lower } else { 0.0 };
        FrameBounds { lower, upper }
    }

    pub fn is_frame(&self) -> bool {
        self.frame_bounds().is_frame()
    }

    pub(crate) fn require_frame(&self) -> Result<()> {
        let b = self.frame_bounds();
        if b.is_frame() {
            Ok(())
        } else {
            Err(Error::NotAFrame { lower: b.lower, upper: b.upper })
        }
    }

    /// `(S_Φ⁻¹ φ_n)`
    pub fn canonical_dual(&self) -> Result<FrameSeq> {
        self.require_frame()?;
        let s_inv = inverse(&self.frame_operator())?;
        self.mapped(&s_inv)
    }

    /// `‖T_{Φd} U_Φ − I‖_F ≤ tol`
    pub fn dual_residual(&self, other: &FrameSeq) -> Result<f64> {
        if other.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: other.len() });
        }
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok((&other.synthesis_matrix() * &self.analysis_matrix()).distance_to_identity())
    }

    pub fn is_dual_pair(&self, other: &FrameSeq, tol: f64) -> Result<bool> {
        Ok(self.dual_residual(other)? <= tol)
    }

    /// A seeded dual of `Φ`: the columns of
    /// `L = S⁻¹T + W(I − U S⁻¹ T)` for a Gaussian `d × N` matrix `W`.
    /// Differs from the canonical dual whenever `N > d`.
    pub fn random_dual(&self, seed: u64) -> Result<FrameSeq> {
        self.require_frame()?;
        let t = self.synthesis_matrix();
        let u = self.analysis_matrix();
        let s_inv_t = &inverse(&self.frame_operator())? * &t;
        let projector = &u * &s_inv_t;
        let complement = &CMatrix::identity(self.len()) - &projector;
        let w = SeededRng::new(seed).gaussian_matrix(self.dim, self.len());
        let l = &s_inv_t + &(&w * &complement);
        Ok(FrameSeq::from_columns(&l))
    }

    pub fn classify(&self) -> FrameClass {
        let spanning = self.is_frame();
        let minimal = rank(&self.synthesis_matrix(), DEFAULT_RANK_TOL).expect("positive tol") == self.len();
        let kind = match (spanning, self.len() == self.dim) {
            (false, _) => FrameKind::NonSpanning,
            (true, true) => FrameKind::RieszBasis,
            (true, false) => FrameKind::SpanningFrame,
        };
        FrameClass { kind, minimal }
    }

    fn check_same_shape(&self, other: &FrameSeq) -> Result<()> {
        if other.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: other.len() });
        }
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    /// `R(U_Φ) = R(U_Ψ)`, i.e. `Ψ = GΦ` for an invertible `G`.
    pub fn are_equivalent(&self, other: &FrameSeq, tol: f64) -> Result<bool> {
        self.check_same_shape(other)?;
        self.require_frame()?;
        other.require_frame()?;
        let a = self.analysis_matrix();
        let b = other.analysis_matrix();
        Ok(column_space_leq(&a, &b, tol)? && column_space_leq(&b, &a, tol)?)
    }

    /// `self` (playing Ψ) is partial equivalent to `phi`: `R(U_Φ) ⊆ R(U_Ψ)`.
    pub fn is_partial_equivalent(&self, phi: &FrameSeq, tol: f64) -> Result<bool> {
        self.check_same_shape(phi)?;
        column_space_leq(&phi.analysis_matrix(), &self.analysis_matrix(), tol)
    }

    /// Largest `‖φ_n − ψ_n‖` over the sequence, `None` for mismatched shapes.
    pub fn max_distance(&self, other: &FrameSeq) -> Option<f64> {
        if self.check_same_shape(other).is_err() {
            return None;
        }
        Some(self.vectors.iter().zip(&other.vectors).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max))
    }
}

/// `Σ ⟨h, φd_n⟩ φ_n` for a candidate dual pair, used by reconstruction checks.
pub fn reconstruct(phi: &FrameSeq, dual: &FrameSeq, h: &CVector) -> Result<CVector> {
    phi.synthesis(&dual.analysis(h)?)
}
