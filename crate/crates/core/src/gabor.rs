//! Discrete Gabor systems on `C^L` (signals indexed by `Z_L`).
//!
//! `T_τ f[x] = f[x − τ]`, `E_ω f[x] = e^{2πiωx/L} f[x]` and
//! `π(ω, τ) = E_ω T_τ`. A separable lattice with time step `a` and frequency
//! step `b` holds the points `(ω, τ) ∈ bZ_L × aZ_L`, enumerated with `τ` in
//! the outer loop so that sequence index `n` of every Gabor system is
//! reproducible.

use std::f64::consts::TAU;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::FrameSeq;
use crate::linalg::{solve, svd, CMatrix, CVector, C64};
use crate::multiplier::Multiplier;

/// A lattice point `λ = (ω, τ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TfPoint {
    pub freq: usize,
    pub time: usize,
}

impl TfPoint {
    pub fn new(freq: usize, time: usize) -> Self {
        TfPoint { freq, time }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Lattice {
    #[serde(rename = "L")]
    len: usize,
    a: usize,
    b: usize,
}

impl Lattice {
    pub fn new(len: usize, a: usize, b: usize) -> Result<Self> {
        if len == 0 || a == 0 || b == 0 {
            return Err(Error::InvalidLattice(format!("L={len}, a={a}, b={b} must be positive")));
        }
        if !len.is_multiple_of(a) || !len.is_multiple_of(b) {
            return Err(Error::InvalidLattice(format!("steps a={a}, b={b} must divide L={len}")));
        }
        Ok(Lattice { len, a, b })
    }

    pub fn signal_len(&self) -> usize {
        self.len
    }

    pub fn time_step(&self) -> usize {
        self.a
    }

    pub fn freq_step(&self) -> usize {
        self.b
    }

    /// `P = (L/a)·(L/b)`
    pub fn point_count(&self) -> usize {
        (self.len / self.a) * (self.len / self.b)
    }

    /// Lattice points, time-major.
    pub fn points(&self) -> Vec<TfPoint> {
        (0..self.len)
            .step_by(self.a)
            .flat_map(|time| (0..self.len).step_by(self.b).map(move |freq| TfPoint { freq, time }))
            .collect()
    }

    /// `λ + μ` reduced mod `L`.
    pub fn add(&self, x: TfPoint, y: TfPoint) -> TfPoint {
        TfPoint { freq: (x.freq + y.freq) % self.len, time: (x.time + y.time) % self.len }
    }
}

/// Window plus lattice generating `(π(λ)g)_{λ∈Λ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaborSystem {
    window: CVector,
    lattice: Lattice,
}

#[derive(Serialize, Deserialize)]
struct RawGabor {
    #[serde(rename = "L")]
    len: usize,
    a: usize,
    b: usize,
    window: CVector,
}

impl Serialize for GaborSystem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawGabor { len: self.lattice.len, a: self.lattice.a, b: self.lattice.b, window: self.window.clone() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GaborSystem {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawGabor::deserialize(deserializer)?;
        let lattice = Lattice::new(raw.len, raw.a, raw.b).map_err(de::Error::custom)?;
        GaborSystem::new(raw.window, lattice).map_err(de::Error::custom)
    }
}

pub fn translate(f: &CVector, tau: isize) -> CVector {
    let len = f.dim() as isize;
    CVector::from_raw((0..len).map(|x| f[(x - tau).rem_euclid(len) as usize]).collect())
}

pub fn modulate(f: &CVector, omega: isize) -> CVector {
    let len = f.dim() as isize;
    CVector::from_raw((0..len).map(|x| f[x as usize] * character(omega * x, len)).collect())
}

/// `e^{2πik/L}` with `k` reduced mod `L` before the angle is formed.
fn character(k: isize, len: isize) -> C64 {
    let k = k.rem_euclid(len);
    C64::from_polar(1.0, TAU * k as f64 / len as f64)
}

/// `π(λ) f = E_ω T_τ f`
pub fn tf_shift(point: TfPoint, f: &CVector) -> CVector {
    modulate(&translate(f, point.time as isize), point.freq as isize)
}

/// The `L × L` matrix of `π(λ)`.
pub fn tf_shift_matrix(point: TfPoint, len: usize) -> CMatrix {
    let cols: Vec<CVector> = (0..len).map(|k| tf_shift(point, &CVector::unit(len, k))).collect();
    CMatrix::from_columns(&cols).expect("len >= 1")
}

/// The unimodular `c` in `π(λ)π(μ) = c · π(λ + μ)`, namely `e^{−2πi ω_μ τ_λ / L}`.
pub fn composition_phase(lambda: TfPoint, mu: TfPoint, len: usize) -> C64 {
    character(-((mu.freq * lambda.time) as isize), len as isize)
}

impl GaborSystem {
    pub fn new(window: CVector, lattice: Lattice) -> Result<Self> {
        if window.dim() != lattice.len {
            return Err(Error::DimensionMismatch { expected: lattice.len, found: window.dim() });
        }
        Ok(GaborSystem { window, lattice })
    }

    pub fn window(&self) -> &CVector {
        &self.window
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn signal_len(&self) -> usize {
        self.lattice.len
    }

    /// `(π(λ)g)_λ` in lattice order.
    pub fn frame(&self) -> FrameSeq {
        shifted_copies(&self.window, &self.lattice)
    }

    /// `g̃ = S⁻¹ g`; the canonical dual frame is the Gabor system of `g̃`.
    pub fn canonical_dual_window(&self) -> Result<CVector> {
        let frame = self.frame();
        frame.require_frame()?;
        solve(&frame.frame_operator(), &self.window)
    }

    pub fn with_window(&self, window: CVector) -> Result<GaborSystem> {
        GaborSystem::new(window, self.lattice)
    }
}

fn shifted_copies(window: &CVector, lattice: &Lattice) -> FrameSeq {
    let vectors = lattice.points().into_iter().map(|p| tf_shift(p, window)).collect();
    FrameSeq::new(lattice.len, vectors).expect("lattice has at least one point")
}

fn check_operator(v: &CMatrix, len: usize) -> Result<()> {
    if !v.is_square() {
        return Err(Error::NonSquare { rows: v.rows(), cols: v.cols() });
    }
    if v.rows() != len {
        return Err(Error::DimensionMismatch { expected: len, found: v.rows() });
    }
    Ok(())
}

/// `max_λ ‖Vπ(λ)g − π(λ)Vg‖ / (‖V‖_F ‖g‖)`
pub fn window_commutation_residual(v: &CMatrix, system: &GaborSystem) -> Result<f64> {
    check_operator(v, system.signal_len())?;
    let scale = v.frobenius_norm() * system.window.norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let vg = v.mul_vec(&system.window);
    let worst = system
        .lattice
        .points()
        .into_iter()
        .map(|p| (&v.mul_vec(&tf_shift(p, &system.window)) - &tf_shift(p, &vg)).norm())
        .fold(0.0, f64::max);
    Ok(worst / scale)
}

pub fn commutes_on_window(v: &CMatrix, system: &GaborSystem, tol: f64) -> Result<bool> {
    Ok(window_commutation_residual(v, system)? <= tol)
}

/// `max_{λ,k} ‖Vπ(λ)e_k − π(λ)Ve_k‖ / ‖V‖_F` over the standard basis.
pub fn full_commutation_residual(v: &CMatrix, lattice: &Lattice) -> Result<f64> {
    check_operator(v, lattice.len)?;
    let scale = v.frobenius_norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    for p in lattice.points() {
        let shift = tf_shift_matrix(p, lattice.len);
        let comm = &(v * &shift) - &(&shift * v);
        for k in 0..lattice.len {
            worst = worst.max(comm.column(k).norm());
        }
    }
    Ok(worst / scale)
}

pub fn commutes_all(v: &CMatrix, lattice: &Lattice, tol: f64) -> Result<bool> {
    Ok(full_commutation_residual(v, lattice)? <= tol)
}

/// `M_{(1),(π(λ)v),(π(λ)u)}` over a common lattice.
pub fn unit_gabor_multiplier(synthesis_window: &CVector, analysis_window: &CVector, lattice: &Lattice) -> Result<Multiplier> {
    for w in [synthesis_window, analysis_window] {
        if w.dim() != lattice.len {
            return Err(Error::DimensionMismatch { expected: lattice.len, found: w.dim() });
        }
    }
    Multiplier::unweighted(shifted_copies(synthesis_window, lattice), shifted_copies(analysis_window, lattice))
}

/// `Vf = Σ ⟨f, g̃_λ⟩ π(λ)Vg`, without checking commutation.
fn window_expansion(v: &CMatrix, system: &GaborSystem) -> Result<Multiplier> {
    let dual = system.canonical_dual_window()?;
    let vg = v.mul_vec(&system.window);
    unit_gabor_multiplier(&vg, &dual, &system.lattice)
}

/// `M_{(1),(g_λ),(h̃_λ)}` with `h_λ = π(λ)Vg`, without checking commutation.
fn inverse_expansion(v: &CMatrix, system: &GaborSystem) -> Result<Multiplier> {
    let h = shifted_copies(&v.mul_vec(&system.window), &system.lattice);
    Multiplier::unweighted(system.frame(), h.canonical_dual()?)
}

/// Writes an operator that commutes with `π(λ)g` for all `λ` as the Gabor
/// multiplier `M_{(1),(π(λ)Vg),(g̃_λ)}`.
pub fn as_gabor_multiplier(v: &CMatrix, system: &GaborSystem, tol: f64) -> Result<Multiplier> {
    system.frame().require_frame()?;
    let residual = window_commutation_residual(v, system)?;
    if residual > tol {
        return Err(Error::DoesNotCommute { residual });
    }
    window_expansion(v, system)
}

/// `V⁻¹ = M_{(1),(g_λ),(h̃_λ)}` with `h_λ = π(λ)Vg`.
pub fn inverse_gabor_multiplier(v: &CMatrix, system: &GaborSystem, rank_tol: f64, tol: f64) -> Result<Multiplier> {
    check_operator(v, system.signal_len())?;
    let ratio = svd(v).inverse_condition();
    if ratio <= rank_tol {
        return Err(Error::NotInvertible { ratio });
    }
    system.frame().require_frame()?;
    let residual = window_commutation_residual(v, system)?;
    if residual > tol {
        return Err(Error::DoesNotCommute { residual });
    }
    inverse_expansion(v, system)
}

/// One condition of the commutation/representation equivalence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub holds: bool,
    /// `None` when the construction could not be carried out.
    pub residual: Option<f64>,
}

impl ConditionCheck {
    fn from_residual(residual: Result<f64>, tol: f64) -> Self {
        match residual {
            Ok(r) => ConditionCheck { holds: r <= tol, residual: Some(r) },
            Err(_) => ConditionCheck { holds: false, residual: None },
        }
    }
}

/// Evaluates, for invertible `V`:
/// 1. `Vπ(λ)g = π(λ)Vg` for all `λ`;
/// 2. `V` commutes with every `π(λ)`;
/// 3. `V` equals the unit-symbol Gabor multiplier built from `Vg` and `g̃`;
/// 4. `V⁻¹` equals the unit-symbol Gabor multiplier built from `g` and `h̃`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub window_commutation: ConditionCheck,
    pub full_commutation: ConditionCheck,
    /// `‖M − V‖_F / ‖V‖_F`
    pub representation: ConditionCheck,
    /// `‖M·V − I‖_F`
    pub inverse_representation: ConditionCheck,
    /// All four conditions agree.
    pub consistent: bool,
}

pub fn check_equivalences(v: &CMatrix, system: &GaborSystem, tol: f64) -> Result<EquivalenceReport> {
    check_operator(v, system.signal_len())?;
    let window_commutation = ConditionCheck::from_residual(window_commutation_residual(v, system), tol);
    let full_commutation = ConditionCheck::from_residual(full_commutation_residual(v, &system.lattice), tol);
    let representation = ConditionCheck::from_residual(
        window_expansion(v, system).map(|m| m.to_matrix().distance(v) / v.frobenius_norm().max(f64::MIN_POSITIVE)),
        tol,
    );
    let inverse_representation = ConditionCheck::from_residual(
        inverse_expansion(v, system).map(|m| (&m.to_matrix() * v).distance_to_identity()),
        tol,
    );
    let flags = [
        window_commutation.holds,
        full_commutation.holds,
        representation.holds,
        inverse_representation.holds,
    ];
    Ok(EquivalenceReport {
        window_commutation,
        full_commutation,
        representation,
        inverse_representation,
        consistent: flags.iter().all(|&f| f == flags[0]),
    })
}
