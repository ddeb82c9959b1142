//! Frame multipliers `M_{m,Φ,Ψ} h = Σ m_n ⟨h, ψ_n⟩ φ_n` and the ways their
//! inverses can again be written as multipliers.

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::frames::FrameSeq;
use crate::linalg::{column_space_leq, inverse, svd, CMatrix, CVector, C64, ONE, ZERO};

/// `inf|m_n| > SEMI_NORMALIZED_TOL · sup|m_n|` marks a symbol as semi-normalized.
pub const SEMI_NORMALIZED_TOL: f64 = 1e-12;

/// Default residual threshold for inverse checks.
pub const DEFAULT_INVERSE_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Symbols
// ---------------------------------------------------------------------------

/// The scalar weights `m = (m_n)` of a multiplier.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSeq {
    values: Vec<C64>,
    inf_abs: f64,
    sup_abs: f64,
}

impl SymbolSeq {
    pub fn new(values: Vec<C64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("symbol must have at least one entry".into()));
        }
        if let Some(i) = values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let inf_abs = values.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        let sup_abs = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Ok(SymbolSeq { values, inf_abs, sup_abs })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn constant(c: C64, n: usize) -> Result<Self> {
        Self::new(vec![c; n])
    }

    /// The symbol `(1, 1, …, 1)`.
    pub fn ones(n: usize) -> Self {
        SymbolSeq { values: vec![ONE; n], inf_abs: 1.0, sup_abs: 1.0 }
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn inf_abs(&self) -> f64 {
        self.inf_abs
    }

    pub fn sup_abs(&self) -> f64 {
        self.sup_abs
    }

    pub fn is_semi_normalized(&self) -> bool {
        self.sup_abs > 0.0 && self.inf_abs > SEMI_NORMALIZED_TOL * self.sup_abs
    }

    fn require_semi_normalized(&self) -> Result<()> {
        if self.is_semi_normalized() {
            Ok(())
        } else {
            let ratio = if self.sup_abs > 0.0 { self.inf_abs / self.sup_abs } else { 0.0 };
            Err(Error::NotSemiNormalized { ratio })
        }
    }

    /// `m̄`
    pub fn conj(&self) -> SymbolSeq {
        SymbolSeq { values: self.values.iter().map(|z| z.conj()).collect(), ..*self }
    }

    /// `1/m`, defined for semi-normalized symbols.
    pub fn reciprocal(&self) -> Result<SymbolSeq> {
        self.require_semi_normalized()?;
        SymbolSeq::new(self.values.iter().map(|z| z.inv()).collect())
    }

    /// The common value if every entry is identical.
    pub fn constant_value(&self) -> Option<C64> {
        let first = self.values[0];
        self.values.iter().all(|&z| z == first).then_some(first)
    }
}

impl Serialize for SymbolSeq {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.values.iter().map(|z| [z.re, z.im]))
    }
}

impl<'de> Deserialize<'de> for SymbolSeq {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(deserializer)?;
        SymbolSeq::new(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect()).map_err(de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Multipliers
// ---------------------------------------------------------------------------

/// `M_{m,Φ,Ψ}`: analysis with `Ψ`, weighting by `m`, synthesis with `Φ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Multiplier {
    symbol: SymbolSeq,
    phi: FrameSeq,
    psi: FrameSeq,
}

#[derive(Deserialize)]
struct RawMultiplier {
    symbol: SymbolSeq,
    phi: FrameSeq,
    psi: FrameSeq,
}

impl<'de> Deserialize<'de> for Multiplier {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawMultiplier::deserialize(deserializer)?;
        Multiplier::new(raw.symbol, raw.phi, raw.psi).map_err(de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseClass {
    TwoSided,
    LeftOnly,
    RightOnly,
    NotInvertible,
}

/// How `R(U_Φ)` and `R(U_Ψ)` compare.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeRelation {
    Equal,
    /// `R(U_Φ) ⊊ R(U_Ψ)`
    PhiInPsi,
    /// `R(U_Ψ) ⊊ R(U_Φ)`
    PsiInPhi,
    Incomparable,
}

/// Outcome of an inversion attempt.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InverseReport {
    pub classification: InverseClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range_relation: Option<RangeRelation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse_multiplier: Option<Multiplier>,
    /// `‖C·M − I‖_F` for the candidate `C` examined.
    pub left_residual: f64,
    /// `‖M·C − I‖_F`
    pub right_residual: f64,
    /// `max(left_residual, right_residual)`
    pub residual: f64,
}

/// Which hypothesis made a symbol factorization possible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorCase {
    /// `Φ` is minimal (linearly independent).
    MinimalPhi,
    /// `Φ = Ψ`
    SameSequence,
    /// `inf_n |m_n|·‖φ_n‖·‖ψ_n‖ > 0`
    BoundedBelow,
}

/// `m_n = c_n · conj(d_n)` with `(c_n φ_n)` and `(d_n ψ_n)` frames.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolFactorization {
    pub case: FactorCase,
    pub c: SymbolSeq,
    pub d: SymbolSeq,
    /// `M_{(1),(c_n φ_n),(d_n ψ_n)}`
    pub reweighted: Multiplier,
}

impl Multiplier {
    pub fn new(symbol: SymbolSeq, phi: FrameSeq, psi: FrameSeq) -> Result<Self> {
        if phi.len() != symbol.len() {
            return Err(Error::DimensionMismatch { expected: symbol.len(), found: phi.len() });
        }
        if psi.len() != symbol.len() {
            return Err(Error::DimensionMismatch { expected: symbol.len(), found: psi.len() });
        }
        if phi.dim() != psi.dim() {
            return Err(Error::DimensionMismatch { expected: phi.dim(), found: psi.dim() });
        }
        Ok(Multiplier { symbol, phi, psi })
    }

    /// `M_{(1),Φ,Ψ}`
    pub fn unweighted(phi: FrameSeq, psi: FrameSeq) -> Result<Self> {
        Self::new(SymbolSeq::ones(phi.len()), phi, psi)
    }

    pub fn symbol(&self) -> &SymbolSeq {
        &self.symbol
    }

    pub fn phi(&self) -> &FrameSeq {
        &self.phi
    }

    pub fn psi(&self) -> &FrameSeq {
        &self.psi
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    pub fn len(&self) -> usize {
        self.symbol.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbol.is_empty()
    }

    pub fn apply(&self, h: &CVector) -> Result<CVector> {
        let mut coeffs = self.psi.analysis(h)?;
        for (n, m) in self.symbol.values().iter().enumerate() {
            coeffs[n] *= m;
        }
        self.phi.synthesis(&coeffs)
    }

    /// `T_Φ · diag(m) · U_Ψ = Σ m_n φ_n ψ_n*`
    pub fn to_matrix(&self) -> CMatrix {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for ((m, phi), psi) in self.symbol.values().iter().zip(self.phi.vectors()).zip(self.psi.vectors()) {
            for i in 0..d {
                let a = m * phi[i];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += a * psi[j].conj();
                }
            }
        }
        out
    }

    /// `M_{m̄,Ψ,Φ}`, whose matrix is the adjoint of this one.
    pub fn adjoint(&self) -> Multiplier {
        Multiplier { symbol: self.symbol.conj(), phi: self.psi.clone(), psi: self.phi.clone() }
    }

    /// `σ_min / σ_max` of the operator matrix.
    pub fn inverse_condition(&self) -> f64 {
        svd(&self.to_matrix()).inverse_condition()
    }

    pub fn is_invertible(&self, tol: f64) -> bool {
        self.inverse_condition() > tol
    }

    fn require_invertible(&self, tol: f64) -> Result<CMatrix> {
        let ratio = self.inverse_condition();
        if ratio <= tol {
            return Err(Error::NotInvertible { ratio });
        }
        inverse(&self.to_matrix())
    }

    /// `(‖M⁻¹M − I‖_F, ‖MM⁻¹ − I‖_F)` for a proposed inverse.
    pub fn verify_inverse(&self, candidate: &Multiplier) -> Result<(f64, f64)> {
        if candidate.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: candidate.dim() });
        }
        let m = self.to_matrix();
        let c = candidate.to_matrix();
        Ok(((&c * &m).distance_to_identity(), (&m * &c).distance_to_identity()))
    }

    /// Inverse of a Riesz multiplier: `M_{1/m, Ψ̃, Φ̃}`.
    pub fn riesz_inverse(&self) -> Result<Multiplier> {
        use crate::frames::FrameKind::RieszBasis;
        if self.phi.classify().kind != RieszBasis || self.psi.classify().kind != RieszBasis {
            return Err(Error::NotRiesz);
        }
        let inv_symbol = self.symbol.reciprocal()?;
        Multiplier::new(inv_symbol, self.psi.canonical_dual()?, self.phi.canonical_dual()?)
    }

    /// The duals `Ψ† = (M⁻¹(m_n φ_n))` of `Ψ` and `Φ† = ((M⁻¹)*(m̄_n ψ_n))` of `Φ`.
    pub fn dagger_duals(&self, rank_tol: f64) -> Result<(FrameSeq, FrameSeq)> {
        self.symbol.require_semi_normalized()?;
        self.phi.require_frame()?;
        self.psi.require_frame()?;
        let m_inv = self.require_invertible(rank_tol)?;
        let psi_dagger = self.phi.reweighted(self.symbol.values())?.mapped(&m_inv)?;
        let phi_dagger = self.psi.reweighted(self.symbol.conj().values())?.mapped(&m_inv.adjoint())?;
        Ok((psi_dagger, phi_dagger))
    }

    /// Both inverse representations `M_{1/m, Ψ†, Φd}` and `M_{1/m, Ψd, Φ†}`
    /// for caller-chosen duals `Φd` of `Φ` and `Ψd` of `Ψ`.
    pub fn inverse_as_multiplier(
        &self,
        phi_dual: &FrameSeq,
        psi_dual: &FrameSeq,
        rank_tol: f64,
        dual_tol: f64,
    ) -> Result<(Multiplier, Multiplier)> {
        let phi_res = self.phi.dual_residual(phi_dual)?;
        if phi_res > dual_tol {
            return Err(Error::NotADual { residual: phi_res });
        }
        let psi_res = self.psi.dual_residual(psi_dual)?;
        if psi_res > dual_tol {
            return Err(Error::NotADual { residual: psi_res });
        }
        let (psi_dagger, phi_dagger) = self.dagger_duals(rank_tol)?;
        let inv_symbol = self.symbol.reciprocal()?;
        Ok((
            Multiplier::new(inv_symbol.clone(), psi_dagger, phi_dual.clone())?,
            Multiplier::new(inv_symbol, psi_dual.clone(), phi_dagger)?,
        ))
    }

    /// Splits `m_n = c_n · conj(d_n)` so that the multiplier becomes
    /// `M_{(1),(c_n φ_n),(d_n ψ_n)}` with both reweighted sequences frames.
    pub fn factor_symbol(&self) -> Result<SymbolFactorization> {
        let case = if self.phi == self.psi {
            FactorCase::SameSequence
        } else if self.phi.classify().minimal {
            FactorCase::MinimalPhi
        } else if self.bounded_below() {
            FactorCase::BoundedBelow
        } else {
            return Err(Error::NoFactorizationStrategy);
        };

        let m = self.symbol.values();
        let (c, d) = match case {
            FactorCase::SameSequence => polar_split(m),
            FactorCase::MinimalPhi | FactorCase::BoundedBelow => {
                if self.phi.reweighted(m)?.is_frame() {
                    (m.to_vec(), vec![ONE; m.len()])
                } else {
                    polar_split(m)
                }
            }
        };

        let phi_w = self.phi.reweighted(&c)?;
        let psi_w = self.psi.reweighted(&d)?;
        phi_w.require_frame()?;
        psi_w.require_frame()?;
        Ok(SymbolFactorization {
            case,
            c: SymbolSeq::new(c)?,
            d: SymbolSeq::new(d)?,
            reweighted: Multiplier::unweighted(phi_w, psi_w)?,
        })
    }

    fn bounded_below(&self) -> bool {
        let weights: Vec<f64> = self
            .symbol
            .values()
            .iter()
            .zip(self.phi.vectors())
            .zip(self.psi.vectors())
            .map(|((m, phi), psi)| m.norm() * phi.norm() * psi.norm())
            .collect();
        let max = weights.iter().copied().fold(0.0, f64::max);
        let min = weights.iter().copied().fold(f64::INFINITY, f64::min);
        max > 0.0 && min > SEMI_NORMALIZED_TOL * max
    }

    /// Range analysis for a constant symbol `(c)`.
    ///
    /// The candidate is `C = M_{(1/c), Ψ̃, Φ̃}`. `R(U_Φ) ⊆ R(U_Ψ)` makes `C` a
    /// right inverse and `R(U_Ψ) ⊆ R(U_Φ)` a left inverse; equality makes it
    /// the inverse, and strict inclusion in either direction rules out
    /// invertibility. Incomparable ranges decide nothing, so the operator
    /// matrix is tested directly and no inverse formula is emitted.
    pub fn constant_symbol_inverse(&self, rank_tol: f64, inverse_tol: f64) -> Result<InverseReport> {
        let c = self.symbol.constant_value().ok_or(Error::NonConstantSymbol)?;
        if c == ZERO {
            return Err(Error::ZeroSymbol);
        }
        let candidate = Multiplier::new(
            SymbolSeq::constant(c.inv(), self.len())?,
            self.psi.canonical_dual()?,
            self.phi.canonical_dual()?,
        )?;
        let (left, right) = self.verify_inverse(&candidate)?;

        let u_phi = self.phi.analysis_matrix();
        let u_psi = self.psi.analysis_matrix();
        let phi_in_psi = column_space_leq(&u_phi, &u_psi, rank_tol)?;
        let psi_in_phi = column_space_leq(&u_psi, &u_phi, rank_tol)?;
        let relation = match (phi_in_psi, psi_in_phi) {
            (true, true) => RangeRelation::Equal,
            (true, false) => RangeRelation::PhiInPsi,
            (false, true) => RangeRelation::PsiInPhi,
            (false, false) => RangeRelation::Incomparable,
        };

        let report = |classification, inverse_multiplier| InverseReport {
            classification,
            range_relation: Some(relation),
            inverse_multiplier,
            left_residual: left,
            right_residual: right,
            residual: left.max(right),
        };

        Ok(match relation {
            RangeRelation::Equal if left.max(right) <= inverse_tol => {
                report(InverseClass::TwoSided, Some(candidate))
            }
            RangeRelation::PhiInPsi if right <= inverse_tol && left > inverse_tol => {
                report(InverseClass::RightOnly, None)
            }
            RangeRelation::PsiInPhi if left <= inverse_tol && right > inverse_tol => {
                report(InverseClass::LeftOnly, None)
            }
            RangeRelation::PhiInPsi | RangeRelation::PsiInPhi => report(InverseClass::NotInvertible, None),
            RangeRelation::Equal | RangeRelation::Incomparable => {
                if self.is_invertible(rank_tol) {
                    report(InverseClass::TwoSided, None)
                } else {
                    report(InverseClass::NotInvertible, None)
                }
            }
        })
    }
}

/// `c_n = m_n / |m_n|^{1/2}`, `d_n = |m_n|^{1/2}` (zero where `m_n = 0`).
fn polar_split(m: &[C64]) -> (Vec<C64>, Vec<C64>) {
    m.iter()
        .map(|&z| {
            let root = z.norm().sqrt();
            if root == 0.0 {
                (ZERO, ZERO)
            } else {
                (z / root, C64::new(root, 0.0))
            }
        })
        .unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::frames::DEFAULT_DUAL_TOL;
    use crate::linalg::{standard_basis, DEFAULT_RANK_TOL};
    use crate::random::SeededRng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn basis(d: usize) -> FrameSeq {
        FrameSeq::new(d, standard_basis(d).unwrap()).unwrap()
    }

    /// m = (1,3), Φ = (2e1, e2), Ψ = (e1, e2)
    fn diag_example() -> Multiplier {
        Multiplier::new(
            SymbolSeq::from_real(&[1.0, 3.0]).unwrap(),
            FrameSeq::weighted_basis(2, &[(0, 2.0), (1, 1.0)]).unwrap(),
            basis(2),
        )
        .unwrap()
    }

    fn random_multiplier(rng: &mut SeededRng, d: usize, n: usize) -> Multiplier {
        loop {
            let m = Multiplier::new(
                SymbolSeq::new(rng.semi_normalized_values(n, 0.5, 2.0)).unwrap(),
                FrameSeq::from_columns(&rng.conditioned_matrix(d, n, 30.0)),
                FrameSeq::from_columns(&rng.conditioned_matrix(d, n, 30.0)),
            )
            .unwrap();
            if m.inverse_condition() > 1e-3 {
                return m;
            }
        }
    }

    #[test]
    fn symbol_metadata() {
        let s = SymbolSeq::new(vec![c(3.0, 4.0), c(0.0, -1.0)]).unwrap();
        assert_eq!(s.inf_abs(), 1.0);
        assert_eq!(s.sup_abs(), 5.0);
        assert!(s.is_semi_normalized());
        assert_eq!(s.conj().values(), &[c(3.0, -4.0), c(0.0, 1.0)]);
        assert_eq!(s.reciprocal().unwrap().values()[1], c(0.0, 1.0));

        let z = SymbolSeq::from_real(&[1.0, 0.0]).unwrap();
        assert!(!z.is_semi_normalized());
        assert!(matches!(z.reciprocal(), Err(Error::NotSemiNormalized { .. })));
        assert!(SymbolSeq::new(vec![]).is_err());
        assert_eq!(SymbolSeq::constant(c(2.0, 1.0), 3).unwrap().constant_value(), Some(c(2.0, 1.0)));
        assert_eq!(s.constant_value(), None);
    }

    #[test]
    fn construction_checks_lengths() {
        assert!(Multiplier::new(SymbolSeq::ones(3), basis(2), basis(2)).is_err());
        assert!(Multiplier::new(SymbolSeq::ones(2), basis(2), fixtures::doubled_basis(1)).is_err());
    }

    #[test]
    fn apply_examples() {
        let mut rng = SeededRng::new(1);
        let h = rng.gaussian_vector(3);
        let id = Multiplier::unweighted(basis(3), basis(3)).unwrap();
        assert!(id.apply(&h).unwrap().max_abs_diff(&h) < 1e-15);

        let (phi, psi) = fixtures::split_weight_pair(2).unwrap();
        let m = Multiplier::unweighted(phi, psi).unwrap();
        let h = rng.gaussian_vector(2);
        assert!(m.apply(&h).unwrap().max_abs_diff(&h) < 1e-15);

        let (phi, psi) = fixtures::tripled_sign_pair(2).unwrap();
        let m = Multiplier::unweighted(phi, psi).unwrap();
        assert!(m.apply(&h).unwrap().max_abs_diff(&h) < 1e-15);
        assert!(m.apply(&CVector::zeros(3)).is_err());
    }

    #[test]
    fn to_matrix_examples() {
        // oracle: Σ m_n φ_n ψ_n* by hand = diag(1·2, 3·1)
        let want = CMatrix::diag(&[c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(diag_example().to_matrix(), want);

        let dual = fixtures::doubled_basis(2).canonical_dual().unwrap();
        let m = Multiplier::unweighted(dual.clone(), dual).unwrap();
        assert!(m.to_matrix().distance(&CMatrix::identity(2).scale(c(0.5, 0.0))) < 1e-15);

        let (phi, psi) = fixtures::tripled_sign_pair(2).unwrap();
        let m = Multiplier::unweighted(psi.canonical_dual().unwrap(), phi.canonical_dual().unwrap()).unwrap();
        assert!(m.to_matrix().distance(&CMatrix::identity(2).scale(c(1.0 / 9.0, 0.0))) < 1e-15);
    }

    #[test]
    fn riesz_inverse_examples() {
        let inv = diag_example().riesz_inverse().unwrap();
        // oracle: inverse of diag(2,3)
        let want = CMatrix::diag(&[c(0.5, 0.0), c(1.0 / 3.0, 0.0)]);
        assert!(inv.to_matrix().distance(&want) < 1e-15);
        assert_eq!(inv.symbol().values(), &[c(1.0, 0.0), c(1.0 / 3.0, 0.0)]);

        let id = Multiplier::unweighted(basis(3), basis(3)).unwrap();
        assert_eq!(id.riesz_inverse().unwrap(), id);

        let mut rng = SeededRng::new(31);
        for _ in 0..5 {
            let m = Multiplier::new(
                SymbolSeq::new(rng.semi_normalized_values(8, 0.5, 2.0)).unwrap(),
                FrameSeq::from_columns(&rng.conditioned_matrix(8, 8, 30.0)),
                FrameSeq::from_columns(&rng.conditioned_matrix(8, 8, 30.0)),
            )
            .unwrap();
            let inv = m.riesz_inverse().unwrap();
            let dense = inverse(&m.to_matrix()).unwrap();
            assert!(inv.to_matrix().distance(&dense) <= 1e-9 * dense.frobenius_norm());
            assert!((&inv.to_matrix() * &m.to_matrix()).distance_to_identity() <= 1e-9);
        }
    }

    #[test]
    fn riesz_inverse_errors() {
        let dup = fixtures::doubled_basis(2);
        let m = Multiplier::unweighted(dup.clone(), dup).unwrap();
        assert_eq!(m.riesz_inverse(), Err(Error::NotRiesz));
        let m = Multiplier::new(SymbolSeq::from_real(&[1.0, 0.0]).unwrap(), basis(2), basis(2)).unwrap();
        assert!(matches!(m.riesz_inverse(), Err(Error::NotSemiNormalized { .. })));
    }

    #[test]
    fn dagger_duals_examples() {
        let b = basis(3);
        let id = Multiplier::unweighted(b.clone(), b.clone()).unwrap();
        let (psi_d, phi_d) = id.dagger_duals(DEFAULT_RANK_TOL).unwrap();
        assert!(psi_d.max_distance(&b).unwrap() < 1e-15);
        assert!(phi_d.max_distance(&b).unwrap() < 1e-15);

        // M = I so Ψ† = Φ
        let (phi, psi) = fixtures::split_weight_pair(3).unwrap();
        let m = Multiplier::unweighted(phi.clone(), psi.clone()).unwrap();
        let (psi_dagger, phi_dagger) = m.dagger_duals(DEFAULT_RANK_TOL).unwrap();
        assert!(psi_dagger.max_distance(&phi).unwrap() < 1e-14);
        assert!(psi.is_dual_pair(&psi_dagger, DEFAULT_DUAL_TOL).unwrap());
        assert!(phi.is_dual_pair(&phi_dagger, DEFAULT_DUAL_TOL).unwrap());

        let mut rng = SeededRng::new(41);
        for _ in 0..5 {
            let m = random_multiplier(&mut rng, 4, 9);
            let (psi_dagger, phi_dagger) = m.dagger_duals(DEFAULT_RANK_TOL).unwrap();
            assert!(m.psi().is_dual_pair(&psi_dagger, DEFAULT_DUAL_TOL).unwrap());
            assert!(m.phi().is_dual_pair(&phi_dagger, DEFAULT_DUAL_TOL).unwrap());
        }
    }

    #[test]
    fn dagger_duals_errors() {
        let (phi, psi) = fixtures::sign_cancel_pair();
        let m = Multiplier::unweighted(phi, psi).unwrap();
        assert!(matches!(m.dagger_duals(DEFAULT_RANK_TOL), Err(Error::NotInvertible { .. })));
        let m = Multiplier::new(SymbolSeq::from_real(&[1.0, 0.0]).unwrap(), basis(2), basis(2)).unwrap();
        assert!(matches!(m.dagger_duals(DEFAULT_RANK_TOL), Err(Error::NotSemiNormalized { .. })));
    }

    #[test]
    fn inverse_as_multiplier_examples() {
        let phi = fixtures::doubled_basis(3);
        let m = Multiplier::unweighted(phi.clone(), phi.clone()).unwrap();
        let dual = phi.canonical_dual().unwrap();
        let (a, b) = m.inverse_as_multiplier(&dual, &dual, DEFAULT_RANK_TOL, DEFAULT_DUAL_TOL).unwrap();
        for inv in [&a, &b] {
            let (l, r) = m.verify_inverse(inv).unwrap();
            assert!(l.max(r) <= 1e-12);
        }

        let mut rng = SeededRng::new(51);
        for k in 0..5 {
            let m = random_multiplier(&mut rng, 4, 10);
            let phi_d = m.phi().random_dual(k).unwrap();
            let psi_d = m.psi().random_dual(k + 100).unwrap();
            let (a, b) = m.inverse_as_multiplier(&phi_d, &psi_d, DEFAULT_RANK_TOL, DEFAULT_DUAL_TOL).unwrap();
            let dense = inverse(&m.to_matrix()).unwrap();
            for inv in [&a, &b] {
                let (l, r) = m.verify_inverse(inv).unwrap();
                assert!(l.max(r) <= 1e-9);
                assert!(inv.to_matrix().distance(&dense) <= 1e-9 * dense.frobenius_norm());
            }
        }

        // Riesz case: duals are unique, so both representations match the Riesz inverse
        let m = random_multiplier(&mut rng, 5, 5);
        let riesz = m.riesz_inverse().unwrap().to_matrix();
        let (a, b) = m
            .inverse_as_multiplier(&m.phi().random_dual(3).unwrap(), &m.psi().random_dual(4).unwrap(), DEFAULT_RANK_TOL, DEFAULT_DUAL_TOL)
            .unwrap();
        assert!(a.to_matrix().distance(&riesz) <= 1e-9 * riesz.frobenius_norm());
        assert!(b.to_matrix().distance(&riesz) <= 1e-9 * riesz.frobenius_norm());
    }

    #[test]
    fn inverse_as_multiplier_rejects_non_duals() {
        let phi = fixtures::doubled_basis(2);
        let m = Multiplier::unweighted(phi.clone(), phi.clone()).unwrap();
        assert!(matches!(
            m.inverse_as_multiplier(&phi, &phi.canonical_dual().unwrap(), DEFAULT_RANK_TOL, DEFAULT_DUAL_TOL),
            Err(Error::NotADual { .. })
        ));
    }

    #[test]
    fn factor_symbol_minimal_example() {
        // M_{(n), (e_n/n), (e_n)} on C^4
        let phi = FrameSeq::weighted_basis(4, &[(0, 1.0), (1, 0.5), (2, 1.0 / 3.0), (3, 0.25)]).unwrap();
        let m = Multiplier::new(SymbolSeq::from_real(&[1.0, 2.0, 3.0, 4.0]).unwrap(), phi, basis(4)).unwrap();
        let f = m.factor_symbol().unwrap();
        assert_eq!(f.case, FactorCase::MinimalPhi);
        assert_eq!(f.c.values(), m.symbol().values());
        assert!(f.d.values().iter().all(|&z| z == ONE));
        assert!(f.reweighted.phi().max_distance(&basis(4)).unwrap() < 1e-15);
        assert_eq!(f.reweighted.psi(), &basis(4));
    }

    #[test]
    fn factor_symbol_same_sequence_uses_square_roots() {
        let mut rng = SeededRng::new(61);
        let phi = FrameSeq::from_columns(&rng.conditioned_matrix(3, 6, 30.0));
        let vals: Vec<f64> = (0..6).map(|_| rng.uniform(0.5, 3.0)).collect();
        let m = Multiplier::new(SymbolSeq::from_real(&vals).unwrap(), phi.clone(), phi).unwrap();
        let f = m.factor_symbol().unwrap();
        assert_eq!(f.case, FactorCase::SameSequence);
        for ((cn, dn), mn) in f.c.values().iter().zip(f.d.values()).zip(&vals) {
            assert!((cn - C64::new(mn.sqrt(), 0.0)).norm() <= 1e-15 * mn.sqrt());
            assert!((dn - C64::new(mn.sqrt(), 0.0)).norm() <= 1e-15 * mn.sqrt());
        }
    }

    #[test]
    fn factor_symbol_bounded_below_case() {
        let mut rng = SeededRng::new(71);
        let m = random_multiplier(&mut rng, 3, 7);
        let f = m.factor_symbol().unwrap();
        assert_eq!(f.case, FactorCase::BoundedBelow);
        assert_eq!(f.c.values(), m.symbol().values());
        // oracle: frame bounds of (m_n φ_n)
        assert!(m.phi().reweighted(m.symbol().values()).unwrap().frame_bounds().lower > 0.0);
        assert!(f.reweighted.to_matrix().distance(&m.to_matrix()) <= 1e-12);
    }

    #[test]
    fn factor_symbol_reports_missing_strategy() {
        // redundant Φ ≠ Ψ with a zero symbol entry
        let phi = fixtures::doubled_basis(2);
        let psi = FrameSeq::weighted_basis(2, &[(0, 1.0), (0, 2.0), (1, 1.0), (1, 2.0)]).unwrap();
        let m = Multiplier::new(SymbolSeq::from_real(&[1.0, 0.0, 1.0, 1.0]).unwrap(), phi, psi).unwrap();
        assert_eq!(m.factor_symbol(), Err(Error::NoFactorizationStrategy));
    }

    #[test]
    fn constant_symbol_equivalent_frames() {
        let mut rng = SeededRng::new(81);
        let phi = FrameSeq::from_columns(&rng.conditioned_matrix(3, 7, 30.0));
        let psi = phi.mapped(&rng.conditioned_matrix(3, 3, 20.0)).unwrap();
        let m = Multiplier::new(SymbolSeq::constant(c(0.5, -1.5), 7).unwrap(), phi, psi).unwrap();
        let r = m.constant_symbol_inverse(DEFAULT_RANK_TOL, DEFAULT_INVERSE_TOL).unwrap();
        assert_eq!(r.classification, InverseClass::TwoSided);
        assert_eq!(r.range_relation, Some(RangeRelation::Equal));
        assert!(r.residual <= 1e-9);
        let inv = r.inverse_multiplier.unwrap();
        let (l, rr) = m.verify_inverse(&inv).unwrap();
        assert!(l <= 1e-9 && rr <= 1e-9);
    }

    #[test]
    fn constant_symbol_incomparable_ranges_invertible() {
        let (phi, psi) = fixtures::split_weight_pair(3).unwrap();
        let m = Multiplier::unweighted(phi, psi).unwrap();
        let r = m.constant_symbol_inverse(DEFAULT_RANK_TOL, DEFAULT_INVERSE_TOL).unwrap();
        assert_eq!(r.range_relation, Some(RangeRelation::Incomparable));
        assert_eq!(r.classification, InverseClass::TwoSided);
        assert!(r.inverse_multiplier.is_none());
    }

    #[test]
    fn constant_symbol_incomparable_ranges_singular() {
        let (phi, psi) = fixtures::sign_cancel_pair();
        let m = Multiplier::unweighted(phi, psi).unwrap();
        let r = m.constant_symbol_inverse(DEFAULT_RANK_TOL, DEFAULT_INVERSE_TOL).unwrap();
        assert_eq!(r.range_relation, Some(RangeRelation::Incomparable));
        assert_eq!(r.classification, InverseClass::NotInvertible);
        assert!(r.residual > 0.1);
    }

    #[test]
    fn constant_symbol_padded_pair_is_incomparable() {
        // Φ = (e1, e2, e1+e2), Ψ = (e1, e2, 0): both span C², so neither range
        // can strictly contain the other; M = I here.
        let e1 = CVector::unit(2, 0);
        let e2 = CVector::unit(2, 1);
        let phi = FrameSeq::new(2, vec![e1.clone(), e2.clone(), &e1 + &e2]).unwrap();
        let psi = FrameSeq::new(2, vec![e1, e2, CVector::zeros(2)]).unwrap();
        let m = Multiplier::unweighted(phi, psi).unwrap();
        assert!(m.to_matrix().distance_to_identity() < 1e-15);
        let r = m.constant_symbol_inverse(DEFAULT_RANK_TOL, DEFAULT_INVERSE_TOL).unwrap();
        assert_eq!(r.range_relation, Some(RangeRelation::Incomparable));
        assert_eq!(r.classification, InverseClass::TwoSided);
    }

    #[test]
    fn constant_symbol_errors() {
        let m = diag_example();
        assert_eq!(m.constant_symbol_inverse(1e-10, 1e-9), Err(Error::NonConstantSymbol));
        let m = Multiplier::new(SymbolSeq::constant(ZERO, 2).unwrap(), basis(2), basis(2)).unwrap();
        assert_eq!(m.constant_symbol_inverse(1e-10, 1e-9), Err(Error::ZeroSymbol));
    }

    #[test]
    fn multiplier_json_schema() {
        let m = diag_example();
        let json = serde_json::to_value(&m).unwrap();
        assert_eq!(json["symbol"], serde_json::json!([[1.0, 0.0], [3.0, 0.0]]));
        assert_eq!(json["phi"]["dim"], 2);
        let back: Multiplier = serde_json::from_value(json).unwrap();
        assert_eq!(back, m);

        let bad = serde_json::json!({"symbol": [[1.0, 0.0]], "phi": {"dim": 1, "vectors": [[[1.0, 0.0]]]}, "psi": {"dim": 1, "vectors": [[[1.0, 0.0]], [[1.0, 0.0]]]}});
        assert!(serde_json::from_value::<Multiplier>(bad).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn apply_is_linear_and_matches_matrix(seed in 0u64..100_000, d in 1usize..6, n in 1usize..10) {
                let mut rng = SeededRng::new(seed);
                let m = Multiplier::new(
                    SymbolSeq::new((0..n).map(|_| rng.gaussian()).collect()).unwrap(),
                    FrameSeq::from_columns(&rng.gaussian_matrix(d, n)),
                    FrameSeq::from_columns(&rng.gaussian_matrix(d, n)),
                ).unwrap();
                let (h, g) = (rng.gaussian_vector(d), rng.gaussian_vector(d));
                let (alpha, beta) = (rng.gaussian(), rng.gaussian());
                let mut comb = h.scale(alpha);
                comb.axpy(beta, &g);
                let mut want = m.apply(&h).unwrap().scale(alpha);
                want.axpy(beta, &m.apply(&g).unwrap());
                let scale = 1.0 + want.norm();
                prop_assert!(m.apply(&comb).unwrap().max_abs_diff(&want) <= 1e-12 * scale);
                prop_assert!(m.apply(&h).unwrap().max_abs_diff(&m.to_matrix().mul_vec(&h)) <= 1e-12 * (1.0 + h.norm()) * m.to_matrix().frobenius_norm().max(1.0));
                prop_assert!(m.to_matrix().adjoint().distance(&m.adjoint().to_matrix()) <= 1e-12);
            }

            #[test]
            fn both_representations_invert(seed in 0u64..100_000, d in 1usize..8, extra in 0usize..12) {
                let mut rng = SeededRng::new(seed);
                let m = random_multiplier(&mut rng, d, d + extra);
                let duals = [
                    (m.phi().canonical_dual().unwrap(), m.psi().canonical_dual().unwrap()),
                    (m.phi().random_dual(seed).unwrap(), m.psi().random_dual(seed + 1).unwrap()),
                ];
                for (phi_d, psi_d) in &duals {
                    let (a, b) = m.inverse_as_multiplier(phi_d, psi_d, DEFAULT_RANK_TOL, DEFAULT_DUAL_TOL).unwrap();
                    for inv in [&a, &b] {
                        let (l, r) = m.verify_inverse(inv).unwrap();
                        prop_assert!(l <= 1e-9 && r <= 1e-9);
                    }
                }
            }

            #[test]
            fn inclusion_gives_one_sided_candidate(seed in 0u64..100_000, d in 1usize..5, extra in 0usize..5) {
                // For frames of C^d the analysis ranges both have dimension d, so
                // inclusion is equality and the candidate inverts on both sides.
                let mut rng = SeededRng::new(seed);
                let phi = FrameSeq::from_columns(&rng.conditioned_matrix(d, d + extra, 30.0));
                let psi = phi.mapped(&rng.conditioned_matrix(d, d, 20.0)).unwrap();
                let m = Multiplier::unweighted(phi, psi).unwrap();
                let r = m.constant_symbol_inverse(DEFAULT_RANK_TOL, DEFAULT_INVERSE_TOL).unwrap();
                prop_assert_eq!(r.range_relation, Some(RangeRelation::Equal));
                prop_assert!(r.right_residual <= 1e-9 && r.left_residual <= 1e-9);
            }

            #[test]
            fn factorization_reproduces_symbol(seed in 0u64..100_000, d in 1usize..5, extra in 0usize..5) {
                let mut rng = SeededRng::new(seed);
                let n = d + extra;
                let phi = FrameSeq::from_columns(&rng.conditioned_matrix(d, n, 30.0));
                let m = Multiplier::new(SymbolSeq::new(rng.semi_normalized_values(n, 0.5, 2.0)).unwrap(), phi.clone(), phi).unwrap();
                let f = m.factor_symbol().unwrap();
                for ((mn, cn), dn) in m.symbol().values().iter().zip(f.c.values()).zip(f.d.values()) {
                    prop_assert!((mn - cn * dn.conj()).norm() <= 4.0 * f64::EPSILON * mn.norm());
                }
                prop_assert!(f.reweighted.to_matrix().distance(&m.to_matrix()) <= 1e-12);
            }
        }
    }
}
