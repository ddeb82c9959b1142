//! Subcommand implementations over parsed inputs. File handling and output
//! rendering live in `main.rs`.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use framemult::frames::FrameKind;
use framemult::gabor::{self, EquivalenceReport};
use framemult::linalg::{pinv, CMatrix, CVector};
use framemult::multiplier::{InverseClass, InverseReport, Multiplier};
use framemult::{FrameBounds, FrameClass, FrameSeq, GaborSystem};

use crate::config::RunConfig;
use crate::error::CliError;

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsOutput {
    pub bounds: FrameBounds,
    pub class: FrameClass,
}

pub fn bounds(frame: &FrameSeq) -> BoundsOutput {
    BoundsOutput { bounds: frame.frame_bounds(), class: frame.classify() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DualKind {
    Canonical,
    Random,
}

pub fn dual(frame: &FrameSeq, kind: DualKind, seed: u64) -> Result<FrameSeq, CliError> {
    Ok(match kind {
        DualKind::Canonical => frame.canonical_dual()?,
        DualKind::Random => frame.random_dual(seed)?,
    })
}

pub fn apply(m: &Multiplier, h: &CVector) -> Result<CVector, CliError> {
    Ok(m.apply(h)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Auto,
    Riesz,
    Dagger,
    ConstantSymbol,
    /// Dense singular value test only; used by `auto` when nothing else applies.
    #[value(skip)]
    DenseTest,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvertOutput {
    pub strategy: Strategy,
    #[serde(flatten)]
    pub report: InverseReport,
}

impl InvertOutput {
    pub fn is_invertible(&self) -> bool {
        self.report.classification == InverseClass::TwoSided
    }
}

fn two_sided(m: &Multiplier, inverse: Multiplier, extra_residual: f64) -> Result<InverseReport, CliError> {
    let (left, right) = m.verify_inverse(&inverse)?;
    Ok(InverseReport {
        classification: InverseClass::TwoSided,
        range_relation: None,
        inverse_multiplier: Some(inverse),
        left_residual: left,
        right_residual: right,
        residual: left.max(right).max(extra_residual),
    })
}

fn invert_riesz(m: &Multiplier) -> Result<InverseReport, CliError> {
    two_sided(m, m.riesz_inverse()?, 0.0)
}

fn invert_dagger(m: &Multiplier, dual_kind: DualKind, cfg: &RunConfig) -> Result<InverseReport, CliError> {
    let phi_d = dual(m.phi(), dual_kind, cfg.seed)?;
    let psi_d = dual(m.psi(), dual_kind, cfg.seed.wrapping_add(1))?;
    let (first, second) = m.inverse_as_multiplier(&phi_d, &psi_d, cfg.rank_tol, cfg.dual_tol)?;
    let (l2, r2) = m.verify_inverse(&second)?;
    two_sided(m, first, l2.max(r2))
}

fn dense_test(m: &Multiplier, cfg: &RunConfig) -> Result<InverseReport, CliError> {
    let a = m.to_matrix();
    let p = pinv(&a, cfg.rank_tol)?;
    let left = (&p * &a).distance_to_identity();
    let right = (&a * &p).distance_to_identity();
    let classification = if m.is_invertible(cfg.rank_tol) { InverseClass::TwoSided } else { InverseClass::NotInvertible };
    Ok(InverseReport {
        classification,
        range_relation: None,
        inverse_multiplier: None,
        left_residual: left,
        right_residual: right,
        residual: left.max(right),
    })
}

/// Inverts a multiplier with the requested strategy.
///
/// `auto` tries the Riesz formula, then constant-symbol range analysis, then
/// the dagger-dual construction, and finally reports the dense test.
pub fn invert(m: &Multiplier, strategy: Strategy, dual_kind: DualKind, cfg: &RunConfig) -> Result<InvertOutput, CliError> {
    let done = |strategy, report| Ok(InvertOutput { strategy, report });
    match strategy {
        Strategy::Riesz => done(Strategy::Riesz, invert_riesz(m)?),
        Strategy::Dagger => done(Strategy::Dagger, invert_dagger(m, dual_kind, cfg)?),
        Strategy::ConstantSymbol => {
            done(Strategy::ConstantSymbol, m.constant_symbol_inverse(cfg.rank_tol, cfg.inverse_tol)?)
        }
        Strategy::DenseTest => done(Strategy::DenseTest, dense_test(m, cfg)?),
        Strategy::Auto => {
            let riesz = m.phi().classify().kind == FrameKind::RieszBasis
                && m.psi().classify().kind == FrameKind::RieszBasis
                && m.symbol().is_semi_normalized();
            if riesz {
                return done(Strategy::Riesz, invert_riesz(m)?);
            }
            let constant = m.symbol().constant_value().is_some_and(|c| c.norm() > 0.0);
            if constant && m.phi().is_frame() && m.psi().is_frame() {
                let report = m.constant_symbol_inverse(cfg.rank_tol, cfg.inverse_tol)?;
                let conclusive = report.inverse_multiplier.is_some() || report.classification != InverseClass::TwoSided;
                if conclusive {
                    return done(Strategy::ConstantSymbol, report);
                }
            }
            let dagger_applies = m.symbol().is_semi_normalized()
                && m.phi().is_frame()
                && m.psi().is_frame()
                && m.is_invertible(cfg.rank_tol);
            if dagger_applies {
                return done(Strategy::Dagger, invert_dagger(m, dual_kind, cfg)?);
            }
            done(Strategy::DenseTest, dense_test(m, cfg)?)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::Subcommand)]
pub enum GaborAction {
    /// Print the Gabor frame and its bounds
    Frame,
    /// Print the canonical dual window
    DualWindow,
    /// Commutation residuals of an operator with the lattice shifts
    Commute,
    /// Write a commuting operator as a unit-symbol Gabor multiplier
    Represent,
    /// Write the inverse of a commuting operator as a unit-symbol Gabor multiplier
    Invert,
    /// Evaluate all four commutation/representation conditions
    Equivalences,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaborFrameOutput {
    pub frame: FrameSeq,
    pub bounds: FrameBounds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommuteOutput {
    pub window_residual: f64,
    pub full_residual: f64,
    pub commutes_on_window: bool,
    pub commutes_all: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaborMultiplierOutput {
    pub multiplier: Multiplier,
    /// `‖M − V‖_F` for `represent`, `‖M·V − I‖_F` for `invert`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GaborOutput {
    Frame(GaborFrameOutput),
    DualWindow { window: CVector },
    Commute(CommuteOutput),
    Multiplier(GaborMultiplierOutput),
    Equivalences(EquivalenceReport),
}

pub fn gabor(
    action: GaborAction,
    system: &GaborSystem,
    operator: Option<&CMatrix>,
    cfg: &RunConfig,
) -> Result<GaborOutput, CliError> {
    let need_op = || operator.ok_or_else(|| CliError::Input("this action needs --operator".into()));
    Ok(match action {
        GaborAction::Frame => {
            let frame = system.frame();
            let bounds = frame.frame_bounds();
            GaborOutput::Frame(GaborFrameOutput { frame, bounds })
        }
        GaborAction::DualWindow => GaborOutput::DualWindow { window: system.canonical_dual_window()? },
        GaborAction::Commute => {
            let v = need_op()?;
            let window_residual = gabor::window_commutation_residual(v, system)?;
            let full_residual = gabor::full_commutation_residual(v, system.lattice())?;
            GaborOutput::Commute(CommuteOutput {
                window_residual,
                full_residual,
                commutes_on_window: window_residual <= cfg.inverse_tol,
                commutes_all: full_residual <= cfg.inverse_tol,
            })
        }
        GaborAction::Represent => {
            let v = need_op()?;
            let multiplier = gabor::as_gabor_multiplier(v, system, cfg.inverse_tol)?;
            let residual = multiplier.to_matrix().distance(v);
            GaborOutput::Multiplier(GaborMultiplierOutput { multiplier, residual })
        }
        GaborAction::Invert => {
            let v = need_op()?;
            let multiplier = gabor::inverse_gabor_multiplier(v, system, cfg.rank_tol, cfg.inverse_tol)?;
            let residual = (&multiplier.to_matrix() * v).distance_to_identity();
            GaborOutput::Multiplier(GaborMultiplierOutput { multiplier, residual })
        }
        GaborAction::Equivalences => {
            GaborOutput::Equivalences(gabor::check_equivalences(need_op()?, system, cfg.inverse_tol)?)
        }
    })
}
