//! The verification suite: worked examples and acceptance criteria, each a
//! named check with a pinned tolerance.

use serde::{Deserialize, Serialize};

use framemult::fixtures;
use framemult::gabor::{self, TfPoint};
use framemult::linalg::{hermitian_eig, pinv, rank, svd, CMatrix, CVector, C64};
use framemult::multiplier::{FactorCase, InverseClass, RangeRelation};
use framemult::{FrameSeq, GaborSystem, Lattice, Multiplier, Result, SeededRng, SymbolSeq};

use crate::commands::{self, DualKind, Strategy};
use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub description: String,
    /// The statement being checked.
    pub reference: String,
    pub status: Status,
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: RunConfig,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "seed={} rank_tol={:e} dual_tol={:e} inverse_tol={:e}\n",
            self.config.seed, self.config.rank_tol, self.config.dual_tol, self.config.inverse_tol
        );
        for c in &self.checks {
            out.push_str(&c.line());
            out.push('\n');
        }
        let failed = self.failures().count();
        out.push_str(&format!("{} checks, {} failed\n", self.checks.len(), failed));
        out
    }
}

impl Check {
    pub fn line(&self) -> String {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        };
        let residual = self.residual.map_or_else(|| "-".to_string(), |r| format!("{r:.3e}"));
        let mut s = format!("{status} {:<14} residual={residual:<10} {}", self.id, self.description);
        if let Some(d) = &self.detail {
            s.push_str(&format!(" [{d}]"));
        }
        s
    }
}

struct Outcome {
    pass: bool,
    residual: Option<f64>,
    detail: Option<String>,
}

impl Outcome {
    fn within(residual: f64, tol: f64) -> Self {
        Outcome { pass: residual <= tol, residual: Some(residual), detail: None }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    fn and(mut self, cond: bool, reason: &str) -> Self {
        if !cond {
            self.pass = false;
            self.detail = Some(match self.detail {
                Some(d) => format!("{d}; {reason}"),
                None => reason.to_string(),
            });
        }
        self
    }
}

type CheckFn = fn(&RunConfig, &mut SeededRng) -> Result<Outcome>;

struct CheckDef {
    id: &'static str,
    description: &'static str,
    reference: &'static str,
    run: CheckFn,
}

const EXACT_TOL: f64 = 1e-12;
const INVERSE_TOL: f64 = 1e-9;
const GAP_MIN: f64 = 0.8;
const FRAME_OP_COMMUTE_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-14;
const SWEEP: usize = 100;

const CHECKS: &[CheckDef] = &[
    CheckDef {
        id: "E1",
        description: "(e1,e1,e1,e2,e2,e2) has frame operator 3I",
        reference: "frame operator of the tripled basis",
        run: ex_tripled_frame_operator,
    },
    CheckDef {
        id: "E2",
        description: "canonical dual of (e1,e1,e2,e2) is the halved sequence",
        reference: "canonical dual of the doubled basis",
        run: ex_doubled_dual,
    },
    CheckDef {
        id: "E3",
        description: "M_{(1),Phi,Phi/2} with Phi=(e1,e1,e2,e2) is the identity",
        reference: "identity multiplier from a doubled basis and its half",
        run: ex_halved_identity,
    },
    CheckDef {
        id: "E4",
        description: "M_{(1),Phi,Psi} for the tripled sign pair in C^2 is the identity",
        reference: "tripled basis with one sign flip",
        run: ex_tripled_identity,
    },
    CheckDef {
        id: "E5",
        description: "M_{(1),dual Phi,dual Phi} = I/2 for the doubled basis in C^2",
        reference: "inverse of the doubled-basis multiplier via canonical duals",
        run: ex_doubled_dual_multiplier,
    },
    CheckDef {
        id: "E6",
        description: "M_{(1),dual Psi,dual Phi} = I/9 for the tripled sign pair in C^2",
        reference: "dual formula fails for non-equivalent frames",
        run: ex_tripled_dual_multiplier,
    },
    CheckDef {
        id: "E7",
        description: "both dual-frame inverse representations for the doubled basis compose to I",
        reference: "inverse of a frame multiplier through dagger duals",
        run: ex_doubled_dagger,
    },
    CheckDef {
        id: "E8",
        description: "M_{(n),(e_n/n),(e_n)} factors as c=(n), d=(1) into M_{(1),(e_n),(e_n)}",
        reference: "symbol factorization for a minimal sequence",
        run: ex_minimal_factorization,
    },
    CheckDef {
        id: "E9",
        description: "split-weight pair: incomparable ranges, invertible, no inverse formula",
        reference: "constant-symbol range analysis, incomparable case",
        run: ex_split_weight_fallback,
    },
    CheckDef {
        id: "E10",
        description: "invert --strategy auto on the doubled basis",
        reference: "CLI inversion of the doubled-basis multiplier",
        run: ex_cli_doubled_invert,
    },
    CheckDef {
        id: "E11",
        description: "invert --strategy auto on diag(2,3) Riesz multiplier gives diag(1/2,1/3)",
        reference: "CLI Riesz inversion",
        run: ex_cli_riesz_invert,
    },
    CheckDef {
        id: "E12",
        description: "sign-cancel pair: frames with singular unit multiplier",
        reference: "a multiplier of two frames that is not invertible",
        run: ex_sign_cancel_singular,
    },
    CheckDef {
        id: "C1",
        description: "doubled basis, d=4: dual multiplier is I/2 and inverts M",
        reference: "inverse of M_{(1),Phi,Phi} is M_{(1),dual Phi,dual Phi} = I/2",
        run: c1_doubled_basis,
    },
    CheckDef {
        id: "C2",
        description: "tripled sign pair, d=4: M = I, dual multiplier I/9, gap > 0.8",
        reference: "dual formula is not the inverse for non-equivalent frames",
        run: c2_tripled_pair,
    },
    CheckDef {
        id: "C3",
        description: "split-weight pair, d=6: M = I with non-equivalent frames",
        reference: "identity multiplier from incomparable frames",
        run: c3_split_weight,
    },
    CheckDef {
        id: "C4",
        description: "50 Riesz multipliers, d=8: Riesz inverse formula",
        reference: "M^{-1} = M_{1/m, dual Psi, dual Phi} for Riesz bases",
        run: c4_riesz,
    },
    CheckDef {
        id: "C5",
        description: "50 frame multipliers, d=8, N=20: both dagger representations",
        reference: "M^{-1} = M_{1/m,Psi dagger,Phi d} = M_{1/m,Psi d,Phi dagger}",
        run: c5_dagger,
    },
    CheckDef {
        id: "C6",
        description: "25 equivalent pairs Psi = G Phi: constant-symbol inverse is two-sided",
        reference: "M_{(c),Phi,Psi}^{-1} = M_{(1/c),dual Psi,dual Phi} for equivalent frames",
        run: c6_equivalent,
    },
    CheckDef {
        id: "C7",
        description: "strict range inclusion gives one-sided inverse and singular M",
        reference: "range-inclusion cases of the constant-symbol theorem",
        run: c7_strict_inclusion,
    },
    CheckDef {
        id: "C8",
        description: "symbol factorization in all three hypothesis cases",
        reference: "m_n = c_n conj(d_n) with reweighted frames",
        run: c8_factorization,
    },
    CheckDef {
        id: "C9",
        description: "Gabor commutation equivalences on (12,3,4) and (8,2,2)",
        reference: "commutation with time-frequency shifts vs unit-symbol Gabor multipliers",
        run: c9_gabor_equivalence,
    },
    CheckDef {
        id: "C10",
        description: "inverse Gabor multiplier with a different base window",
        reference: "inverse of a commuting operator as a Gabor multiplier of any window",
        run: c10_gabor_other_window,
    },
    CheckDef {
        id: "C11.duality",
        description: "canonical and random duals, dual of dual (100 frames)",
        reference: "dual frame identities",
        run: c11_duality,
    },
    CheckDef {
        id: "C11.penrose",
        description: "Penrose identities of pinv (100 matrices)",
        reference: "Moore-Penrose conditions",
        run: c11_penrose,
    },
    CheckDef {
        id: "C11.eig",
        description: "Hermitian eigendecomposition reconstructs and is unitary (100 matrices)",
        reference: "spectral theorem",
        run: c11_eig,
    },
    CheckDef {
        id: "C11.adjoint",
        description: "multiplier adjoint and linearity (100 multipliers)",
        reference: "M_{m,Phi,Psi}* = M_{conj m,Psi,Phi}",
        run: c11_adjoint,
    },
    CheckDef {
        id: "C11.tf-unitary",
        description: "time-frequency shifts are unitary (100 shifts)",
        reference: "unitarity of modulation and translation",
        run: c11_tf_unitary,
    },
    CheckDef {
        id: "C11.phase-law",
        description: "composition phase law of time-frequency shifts (100 pairs)",
        reference: "pi(l) pi(m) = exp(-2 pi i w_m t_l / L) pi(l+m)",
        run: c11_phase_law,
    },
];

/// Identifiers of every check, in report order.
pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|s| s.id).collect()
}

fn run_check(index: usize, def: &CheckDef, cfg: &RunConfig) -> Check {
    let mut rng = SeededRng::derived(cfg.seed, index as u64);
    let outcome = (def.run)(cfg, &mut rng).unwrap_or_else(|e| Outcome {
        pass: false,
        residual: None,
        detail: Some(format!("error: {e}")),
    });
    Check {
        id: def.id.to_string(),
        description: def.description.to_string(),
        reference: def.reference.to_string(),
        status: if outcome.pass { Status::Pass } else { Status::Fail },
        residual: outcome.residual,
        detail: outcome.detail,
    }
}

/// Runs the checks whose id equals `prefix` or starts with `prefix.`.
pub fn run_matching(prefix: &str, cfg: &RunConfig) -> Vec<Check> {
    CHECKS
        .iter()
        .enumerate()
        .filter(|(_, s)| s.id == prefix || s.id.strip_prefix(prefix).is_some_and(|rest| rest.starts_with('.')))
        .map(|(i, s)| run_check(i, s, cfg))
        .collect()
}

pub fn run_all(cfg: &RunConfig) -> VerificationReport {
    let checks = CHECKS.iter().enumerate().map(|(i, s)| run_check(i, s, cfg)).collect();
    VerificationReport { config: cfg.clone(), checks }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn scaled_identity(d: usize, s: f64) -> CMatrix {
    CMatrix::identity(d).scale(c(s))
}

fn random_frame(rng: &mut SeededRng, d: usize, n: usize) -> FrameSeq {
    FrameSeq::from_columns(&rng.gaussian_matrix(d, n))
}

fn random_symbol(rng: &mut SeededRng, n: usize) -> Result<SymbolSeq> {
    SymbolSeq::new(rng.semi_normalized_values(n, 0.5, 2.0))
}

fn ex_tripled_frame_operator(_: &RunConfig, _: &mut SeededRng) -> Result<Outcome> {
    let phi = FrameSeq::weighted_basis(2, &[(0, 1.0), (0, 1.0), (0, 1.0), (1, 1.0), (1, 1.0), (1, 1.0)])?;
    Ok(Outcome::within(phi.frame_operator().distance(&scaled_identity(2, 3.0)), EXACT_TOL))
}

fn ex_doubled_dual(_: &RunConfig, _: &mut SeededRng) -> Result<Outcome> {
    let phi = fixtures::doubled_basis(2);
    let want = FrameSeq::weighted_basis(2, &[(0, 0.5), (0, 0.5), (1, 0.5), (1, 0.5)])?;
    let dist = phi.canonical_dual()?.max_distance(&want).unwrap_or(f64::INFINITY);
    Ok(Outcome::within(dist, EXACT_TOL))
}

fn ex_halved_identity(_: &RunConfig, _: &mut SeededRng) -> Result<Outcome> {
    let phi = fixtures::doubled_basis(2);
    let psi = FrameSeq::weighted_basis(2, &[(0, 0.5), (0, 0.5), (1, 0.5), (1, 0.5)])?;
    let m = Multiplier::unweighted(phi, psi)?;
    Ok(Outcome::within(m.to_matrix().distance_to_identity(), EXACT_TOL))
}

fn ex_tripled_identity(_: &RunConfig, _: &mut SeededRng) -> Result<Outcome> {
    let (phi, psi) = fixtures::tripled_sign_pair(2)?;
    Ok(Outcome::within(Multiplier::unweighted(phi, psi)?.to_matrix().distance_to_identity(), EXACT_TOL))
}

fn ex_doubled_dual_multiplier(_: &RunConfig, _: &mut SeededRng) -> Result<Outcome> {
    let dual = fixtures::doubled_basis(2).canonical_dual()?;
    let m = Multiplier::unweighted(dual.clone(), dual)?;
    Ok(Outcome::within(m.to_matrix().distance(&scaled_identity(2, 0.5)), EXACT_TOL))
}

fn ex_tripled_dual_multiplier(_: &RunConfig, _: &mut SeededRng) -> Result<Outcome> {
    let (phi, psi) = fixtures::tripled_sign_pair(2)?;
    let m = Multiplier::unweighted(psi.canonical_dual()?, phi.canonical_dual()?)?;
    Ok(Outcome::within(m.to_matrix().distance(&scaled_identity(2, 1.0 / 9.0)), EXACT_TOL))
}

fn ex_doubled_dagger(cfg: &RunConfig, _: &mut SeededRng) -> Result<Outcome> {
    let phi = fixtures::doubled_basis(2);
    let m = Multiplier::unweighted(phi.clone(), phi.clone())?;
    let dual = phi.canonical_dual()?;
    let (first, second) = m.inverse_as_multiplier(&dual, &dual, cfg.rank_tol, cfg.dual_tol)?;
    let (l1, r1) = m.verify_inverse(&first)?;
    let (l2, r2) = m.verify_inverse(&second)?;
    Ok(Outcome::within(l1.max(r1).max(l2).max(r2), INVERSE_TOL))
}

fn ex_minimal_factorization(_: &RunConfig, _: &mut SeededRng) -> Result<Outcome> {
    let phi = FrameSeq::weighted_basis(4, &[(0, 1.0), (1, 0.5), (2, 1.0 / 3.0), (3, 0.25)])?;
    let psi = FrameSeq::weighted_basis(4, &[(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0)])?;
    let m = Multiplier::new(SymbolSeq::from_real(&[1.0, 2.0, 3.0, 4.0])?, phi, psi.clone())?;
    let f = m.factor_symbol()?;
    let want = Multiplier::unweighted(psi.clone(), psi)?;
    let residual = f.reweighted.to_matrix().distance(&want.to_matrix());
    Ok(Outcome::within(residual, EXACT_TOL)
        .and(f.case == FactorCase::MinimalPhi, "case is not MinimalPhi")
        .and(f.c == *m.symbol() && f.d == SymbolSeq::ones(4), "split is not c=m, d=1"))
}

fn ex_split_weight_fallback(cfg: &RunConfig, _: &mut SeededRng) -> Result<Outcome> {
    let (phi, psi) = fixtures::split_weight_pair(6)?;
    let report = Multiplier::unweighted(phi, psi)?.constant_symbol_inverse(cfg.rank_tol, cfg.inverse_tol)?;
    Ok(Outcome { pass: true, residual: None, detail: None }
        .and(report.range_relation == Some(RangeRelation::Incomparable), "ranges not incomparable")
        .and(report.classification == InverseClass::TwoSided, "not classified TwoSided")
        .and(report.inverse_multiplier.is_none(), "inverse formula emitted"))
}

fn ex_cli_doubled_invert(cfg: &RunConfig, _: &mut SeededRng) -> Result<Outcome> {
    let phi = fixtures::doubled_basis(2);
    let m = Multiplier::unweighted(phi.clone(), phi)?;
    let out = commands::invert(&m, Strategy::Auto, DualKind::Canonical, cfg).map_err(cli_to_core)?;
    Ok(Outcome::within(out.report.residual, INVERSE_TOL)
        .and(matches!(out.strategy, Strategy::Dagger | Strategy::ConstantSymbol), "unexpected strategy")
        .and(out.report.inverse_multiplier.is_some(), "no inverse multiplier"))
}

fn ex_cli_riesz_invert(cfg: &RunConfig, _: &mut SeededRng) -> Result<Outcome> {
    let m = Multiplier::new(
        SymbolSeq::from_real(&[1.0, 3.0])?,
        FrameSeq::weighted_basis(2, &[(0, 2.0), (1, 1.0)])?,
        FrameSeq::weighted_basis(2, &[(0, 1.0), (1, 1.0)])?,
    )?;
    let out = commands::invert(&m, Strategy::Auto, DualKind::Canonical, cfg).map_err(cli_to_core)?;
    let inv = out.report.inverse_multiplier.as_ref().map(|i| i.to_matrix());
    let want = CMatrix::diag(&[c(0.5), c(1.0 / 3.0)]);
    let residual = inv.map_or(f64::INFINITY, |i| i.distance(&want));
    Ok(Outcome::within(residual, EXACT_TOL).and(out.strategy == Strategy::Riesz, "strategy is not riesz"))
}

fn ex_sign_cancel_singular(cfg: &RunConfig, _: &mut SeededRng) -> Result<Outcome> {
    let (phi, psi) = fixtures::sign_cancel_pair();
    let frames = phi.is_frame() && psi.is_frame();
    let m = Multiplier::unweighted(phi, psi)?;
    let det = {
        let a = m.to_matrix();
        a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]
    };
    let out = commands::invert(&m, Strategy::Auto, DualKind::Canonical, cfg).map_err(cli_to_core)?;
    Ok(Outcome { pass: true, residual: Some(det.norm()), detail: None }
        .and(frames, "fixture sequences are not frames")
        .and(det.norm() == 0.0, "determinant is not zero")
        .and(out.report.classification == InverseClass::NotInvertible, "not classified NotInvertible"))
}

fn cli_to_core(e: crate::error::CliError) -> framemult::Error {
    match e {
        crate::error::CliError::Math(e) => e,
        other => framemult::Error::Domain(other.to_string()),
    }
}

fn c1_doubled_basis(_: &RunConfig, _: &mut SeededRng) -> Result<Outcome> {
    let phi = fixtures::doubled_basis(4);
    let dual = phi.canonical_dual()?;
    let inv = Multiplier::unweighted(dual.clone(), dual)?.to_matrix();
    let m = Multiplier::unweighted(phi.clone(), phi)?.to_matrix();
    let r = inv.distance(&scaled_identity(4, 0.5)).max((&inv * &m).distance_to_identity());
    Ok(Outcome::within(r, EXACT_TOL))
}

fn c2_tripled_pair(_: &RunConfig, _: &mut SeededRng) -> Result<Outcome> {
    let (phi, psi) = fixtures::tripled_sign_pair(4)?;
    let m = Multiplier::unweighted(phi.clone(), psi.clone())?.to_matrix();
    let wrong = Multiplier::unweighted(psi.canonical_dual()?, phi.canonical_dual()?)?.to_matrix();
    let r = wrong.distance(&scaled_identity(4, 1.0 / 9.0)).max(m.distance_to_identity());
    let gap = (&scaled_identity(4, 1.0 / 9.0) * &CMatrix::identity(4)).distance_to_identity();
    Ok(Outcome::within(r, EXACT_TOL).with_detail(format!("gap={gap:.4}")).and(gap > GAP_MIN, "gap too small"))
}

fn c3_split_weight(cfg: &RunConfig, _: &mut SeededRng) -> Result<Outcome> {
    let (phi, psi) = fixtures::split_weight_pair(6)?;
    let r = Multiplier::unweighted(phi.clone(), psi.clone())?.to_matrix().distance_to_identity();
    let equivalent = phi.are_equivalent(&psi, cfg.rank_tol)?;
    let (u_phi, u_psi) = (phi.analysis_matrix(), psi.analysis_matrix());
    let joint = rank(&u_phi.hstack(&u_psi)?, cfg.rank_tol)?;
    let (r_phi, r_psi) = (rank(&u_phi, cfg.rank_tol)?, rank(&u_psi, cfg.rank_tol)?);
    Ok(Outcome::within(r, EXACT_TOL)
        .with_detail(format!("ranks: phi={r_phi} psi={r_psi} joint={joint}"))
        .and(!equivalent, "frames reported equivalent")
        .and(joint > r_phi && joint > r_psi, "rank oracle finds comparable ranges"))
}

fn c4_riesz(_: &RunConfig, rng: &mut SeededRng) -> Result<Outcome> {
    let d = 8;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let phi = FrameSeq::from_columns(&rng.conditioned_matrix(d, d, 1e3));
        let psi = FrameSeq::from_columns(&rng.conditioned_matrix(d, d, 1e3));
        let m = Multiplier::new(random_symbol(rng, d)?, phi, psi)?;
        let inv = m.riesz_inverse()?;
        worst = worst.max((&inv.to_matrix() * &m.to_matrix()).distance_to_identity());
    }
    Ok(Outcome::within(worst, INVERSE_TOL))
}

fn c5_dagger(cfg: &RunConfig, rng: &mut SeededRng) -> Result<Outcome> {
    let (d, n) = (8, 20);
    let mut worst = 0.0f64;
    let mut worst_dual = 0.0f64;
    let mut instances = 0;
    while instances < 50 {
        let m = Multiplier::new(random_symbol(rng, n)?, random_frame(rng, d, n), random_frame(rng, d, n))?;
        if m.inverse_condition() < 1e-4 {
            continue;
        }
        instances += 1;
        let (psi_dagger, phi_dagger) = m.dagger_duals(cfg.rank_tol)?;
        worst_dual = worst_dual.max(m.psi().dual_residual(&psi_dagger)?).max(m.phi().dual_residual(&phi_dagger)?);
        let seed = rng.next_u64();
        for kind in [DualKind::Canonical, DualKind::Random] {
            let phi_d = commands::dual(m.phi(), kind, seed).map_err(cli_to_core)?;
            let psi_d = commands::dual(m.psi(), kind, seed.wrapping_add(1)).map_err(cli_to_core)?;
            let (first, second) = m.inverse_as_multiplier(&phi_d, &psi_d, cfg.rank_tol, cfg.dual_tol)?;
            let (l1, r1) = m.verify_inverse(&first)?;
            let (l2, r2) = m.verify_inverse(&second)?;
            worst = worst.max(l1).max(r1).max(l2).max(r2);
        }
    }
    Ok(Outcome::within(worst, INVERSE_TOL)
        .with_detail(format!("max dagger dual residual {worst_dual:.3e}"))
        .and(worst_dual <= cfg.dual_tol, "dagger sequences are not duals"))
}

fn c6_equivalent(cfg: &RunConfig, rng: &mut SeededRng) -> Result<Outcome> {
    let (d, n) = (6, 10);
    let mut worst = 0.0f64;
    let mut all_two_sided = true;
    for _ in 0..25 {
        let phi = random_frame(rng, d, n);
        let g = rng.conditioned_matrix(d, d, 1e2);
        let psi = phi.mapped(&g)?;
        let constant = rng.phase() * rng.uniform(0.5, 2.0);
        let m = Multiplier::new(SymbolSeq::constant(constant, n)?, phi, psi)?;
        let report = m.constant_symbol_inverse(cfg.rank_tol, cfg.inverse_tol)?;
        all_two_sided &= report.classification == InverseClass::TwoSided && report.inverse_multiplier.is_some();
        worst = worst.max(report.residual);
    }
    Ok(Outcome::within(worst, INVERSE_TOL).and(all_two_sided, "an instance was not TwoSided with an inverse"))
}

/// Rank of a small integer matrix by fraction-free elimination.
fn integer_rank(rows: usize, cols: usize, entries: &[i64]) -> usize {
    let mut a = entries.to_vec();
    let mut rank = 0;
    let mut prev = 1i64;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| a[r * cols + col] != 0) else { continue };
        for j in 0..cols {
            a.swap(rank * cols + j, p * cols + j);
        }
        let pivot = a[rank * cols + col];
        for r in rank + 1..rows {
            let f = a[r * cols + col];
            for j in 0..cols {
                a[r * cols + j] = (pivot * a[r * cols + j] - f * a[rank * cols + j]) / prev;
            }
        }
        prev = pivot;
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn joint_rows(a: &[i64], b: &[i64], d: usize, n: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(2 * n * d);
    for r in 0..n {
        out.extend_from_slice(&a[r * d..(r + 1) * d]);
        out.extend_from_slice(&b[r * d..(r + 1) * d]);
    }
    out
}

struct InclusionSearch {
    pairs: usize,
    strict: Vec<(usize, usize, Vec<i64>, Vec<i64>)>,
}

impl InclusionSearch {
    /// `a` and `b` hold `n` real vectors of `Z^d` back to back, which are
    /// also the rows of their analysis matrices.
    fn visit(&mut self, d: usize, n: usize, a: &[i64], b: &[i64]) {
        let ra = integer_rank(n, d, a);
        let rb = integer_rank(n, d, b);
        if ra != d || rb != d {
            return;
        }
        self.pairs += 1;
        let joint = integer_rank(n, 2 * d, &joint_rows(a, b, d, n));
        let a_in_b = joint == rb;
        let b_in_a = joint == ra;
        if a_in_b != b_in_a {
            self.strict.push((d, n, a.to_vec(), b.to_vec()));
        }
    }
}

fn ternary(index: usize, len: usize) -> Vec<i64> {
    let mut v = Vec::with_capacity(len);
    let mut x = index;
    for _ in 0..len {
        v.push((x % 3) as i64 - 1);
        x /= 3;
    }
    v
}

fn c7_strict_inclusion(cfg: &RunConfig, rng: &mut SeededRng) -> Result<Outcome> {
    let mut search = InclusionSearch { pairs: 0, strict: Vec::new() };
    for d in 1..=2 {
        for n in d..=3 {
            let count = 3usize.pow((d * n) as u32);
            for i in 0..count {
                let a = ternary(i, d * n);
                for j in 0..count {
                    search.visit(d, n, &a, &ternary(j, d * n));
                }
            }
        }
    }
    let d = 3;
    for n in d..=5 {
        for _ in 0..4000 {
            let a: Vec<i64> = (0..d * n).map(|_| rng.index(3) as i64 - 1).collect();
            let b: Vec<i64> = (0..d * n).map(|_| rng.index(3) as i64 - 1).collect();
            search.visit(d, n, &a, &b);
        }
    }

    let summary = format!("{} strict-inclusion instances among {} frame pairs", search.strict.len(), search.pairs);
    if search.strict.is_empty() {
        return Ok(Outcome { pass: false, residual: None, detail: Some(summary) });
    }
    let mut pass = true;
    let mut worst = 0.0f64;
    for (d, n, a, b) in &search.strict {
        let to_seq = |s: &[i64]| {
            let cols: Vec<CVector> = (0..*n)
                .map(|k| CVector::new(s[k * d..(k + 1) * d].iter().map(|&x| c(x as f64)).collect()))
                .collect::<Result<_>>()?;
            FrameSeq::new(*d, cols)
        };
        let m = Multiplier::unweighted(to_seq(a)?, to_seq(b)?)?;
        let report = m.constant_symbol_inverse(cfg.rank_tol, cfg.inverse_tol)?;
        let (pred, other) = match report.range_relation {
            Some(RangeRelation::PhiInPsi) => (report.right_residual, report.left_residual),
            Some(RangeRelation::PsiInPhi) => (report.left_residual, report.right_residual),
            _ => (f64::INFINITY, 0.0),
        };
        let s = svd(&m.to_matrix());
        pass &= pred <= INVERSE_TOL && other >= 0.1 && s.sigma_min() <= 1e-8 * s.sigma_max();
        worst = worst.max(pred);
    }
    Ok(Outcome { pass, residual: Some(worst), detail: Some(summary) })
}

fn c8_factorization(cfg: &RunConfig, rng: &mut SeededRng) -> Result<Outcome> {
    let d = 5;
    let shared = random_frame(rng, d, 9);
    let instances = [
        (
            FactorCase::MinimalPhi,
            FrameSeq::from_columns(&rng.conditioned_matrix(d, d, 1e2)),
            FrameSeq::from_columns(&rng.conditioned_matrix(d, d, 1e2)),
        ),
        (FactorCase::SameSequence, shared.clone(), shared),
        (FactorCase::BoundedBelow, random_frame(rng, d, 9), random_frame(rng, d, 9)),
    ];
    let mut worst_exact = 0.0f64;
    let mut worst_inverse = 0.0f64;
    let mut outcome = Outcome { pass: true, residual: None, detail: None };
    for (expected, phi, psi) in instances {
        let m = Multiplier::new(random_symbol(rng, phi.len())?, phi, psi)?;
        let f = m.factor_symbol()?;
        let rw = &f.reweighted;
        worst_exact = worst_exact.max(rw.to_matrix().distance(&m.to_matrix()));
        let (phi_d, psi_d) = (rw.phi().canonical_dual()?, rw.psi().canonical_dual()?);
        let (first, second) = rw.inverse_as_multiplier(&phi_d, &psi_d, cfg.rank_tol, cfg.dual_tol)?;
        let (l1, r1) = m.verify_inverse(&first)?;
        let (l2, r2) = m.verify_inverse(&second)?;
        worst_inverse = worst_inverse.max(l1).max(r1).max(l2).max(r2);
        outcome = outcome
            .and(f.case == expected, &format!("expected {expected:?}, got {:?}", f.case))
            .and(rw.phi().frame_bounds().lower > 0.0 && rw.psi().frame_bounds().lower > 0.0, "reweighted not a frame");
    }
    outcome.residual = Some(worst_exact);
    Ok(outcome
        .and(worst_exact <= EXACT_TOL, "reweighted multiplier differs")
        .and(worst_inverse <= INVERSE_TOL, &format!("inverse residual {worst_inverse:.3e}")))
}

const GABOR_LATTICES: [(usize, usize, usize); 2] = [(12, 3, 4), (8, 2, 2)];

/// `V = M_{(1),(π(λ)h),(π(λ)g̃)}` for a seeded window `h`.
fn commuting_operator(system: &GaborSystem, rng: &mut SeededRng) -> Result<CMatrix> {
    let h = rng.gaussian_vector(system.signal_len());
    let dual = system.canonical_dual_window()?;
    Ok(gabor::unit_gabor_multiplier(&h, &dual, system.lattice())?.to_matrix())
}

fn c9_gabor_equivalence(cfg: &RunConfig, rng: &mut SeededRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut worst_frame_op = 0.0f64;
    let mut consistent = true;
    for (l, a, b) in GABOR_LATTICES {
        let system = GaborSystem::new(rng.gaussian_vector(l), Lattice::new(l, a, b)?)?;
        let v = commuting_operator(&system, rng)?;
        let eq = gabor::check_equivalences(&v, &system, cfg.inverse_tol)?;
        consistent &= eq.consistent && eq.window_commutation.holds;
        for r in [&eq.window_commutation, &eq.full_commutation, &eq.inverse_representation] {
            worst = worst.max(r.residual.unwrap_or(f64::INFINITY));
        }
        let inv = gabor::inverse_gabor_multiplier(&v, &system, cfg.rank_tol, cfg.inverse_tol)?;
        worst = worst.max((&inv.to_matrix() * &v).distance_to_identity());
        let s = system.frame().frame_operator();
        worst_frame_op = worst_frame_op.max(gabor::full_commutation_residual(&s, system.lattice())?);
    }
    Ok(Outcome::within(worst, INVERSE_TOL)
        .with_detail(format!("frame operator commutation {worst_frame_op:.3e}"))
        .and(worst_frame_op <= FRAME_OP_COMMUTE_TOL, "frame operator does not commute")
        .and(consistent, "equivalence conditions disagree"))
}

fn c10_gabor_other_window(cfg: &RunConfig, rng: &mut SeededRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for (l, a, b) in GABOR_LATTICES {
        let system = GaborSystem::new(rng.gaussian_vector(l), Lattice::new(l, a, b)?)?;
        let other = system.with_window(rng.gaussian_vector(l))?;
        let operators = [system.frame().frame_operator(), commuting_operator(&system, rng)?];
        for v in &operators {
            let inv = gabor::inverse_gabor_multiplier(v, &other, cfg.rank_tol, cfg.inverse_tol)?;
            worst = worst.max((&inv.to_matrix() * v).distance_to_identity());
        }
    }
    Ok(Outcome::within(worst, INVERSE_TOL))
}

fn c11_duality(cfg: &RunConfig, rng: &mut SeededRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..SWEEP {
        let d = 2 + rng.index(5);
        let n = d + rng.index(d + 3);
        let phi = random_frame(rng, d, n);
        let canonical = phi.canonical_dual()?;
        let random = phi.random_dual(rng.next_u64())?;
        let back = canonical.canonical_dual()?.max_distance(&phi).unwrap_or(f64::INFINITY);
        worst = worst.max(phi.dual_residual(&canonical)?).max(phi.dual_residual(&random)?).max(back);
        if n == d {
            worst = worst.max(random.max_distance(&canonical).unwrap_or(f64::INFINITY));
        }
    }
    Ok(Outcome::within(worst, cfg.dual_tol))
}

fn c11_penrose(_: &RunConfig, rng: &mut SeededRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..SWEEP {
        let (rows, cols) = (1 + rng.index(10), 1 + rng.index(10));
        let k = 1 + rng.index(rows.min(cols));
        let a = &rng.gaussian_matrix(rows, k) * &rng.gaussian_matrix(k, cols);
        let p = pinv(&a, 1e-10)?;
        let (ap, pa) = (&a * &p, &p * &a);
        let scale = a.frobenius_norm() * p.frobenius_norm();
        worst = worst
            .max((&ap * &a).distance(&a) / a.frobenius_norm())
            .max((&pa * &p).distance(&p) / p.frobenius_norm())
            .max(ap.hermitian_defect() / scale)
            .max(pa.hermitian_defect() / scale);
    }
    Ok(Outcome::within(worst, INVERSE_TOL))
}

fn c11_eig(_: &RunConfig, rng: &mut SeededRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..SWEEP {
        let n = 1 + rng.index(10);
        let g = rng.gaussian_matrix(n, n);
        let h = &g + &g.adjoint();
        let e = hermitian_eig(&h)?;
        let sorted = e.eigenvalues.windows(2).all(|w| w[0] <= w[1]);
        let unitary = (&e.eigenvectors.adjoint() * &e.eigenvectors).distance_to_identity();
        let recon = e.reconstruct().distance(&h) / h.frobenius_norm();
        worst = worst.max(unitary).max(recon).max(if sorted { 0.0 } else { f64::INFINITY });
    }
    Ok(Outcome::within(worst, 1e-10))
}

fn c11_adjoint(_: &RunConfig, rng: &mut SeededRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..SWEEP {
        let d = 1 + rng.index(6);
        let n = d + rng.index(6);
        let m = Multiplier::new(random_symbol(rng, n)?, random_frame(rng, d, n), random_frame(rng, d, n))?;
        let (h, g) = (rng.gaussian_vector(d), rng.gaussian_vector(d));
        let lhs = m.apply(&h)?.inner(&g);
        let rhs = h.inner(&m.adjoint().apply(&g)?);
        let alpha = rng.gaussian();
        let combo = &h.scale(alpha) + &g;
        let lin = m.apply(&combo)?.max_abs_diff(&(&m.apply(&h)?.scale(alpha) + &m.apply(&g)?));
        let adj_matrix = m.adjoint().to_matrix().distance(&m.to_matrix().adjoint());
        let scale = m.to_matrix().frobenius_norm() * h.norm().max(1.0) * g.norm().max(1.0);
        worst = worst.max((lhs - rhs).norm() / scale).max(lin / scale).max(adj_matrix / scale);
    }
    Ok(Outcome::within(worst, EXACT_TOL))
}

fn c11_tf_unitary(_: &RunConfig, rng: &mut SeededRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..SWEEP {
        let l = [4, 6, 8, 12, 16][rng.index(5)];
        let p = gabor::tf_shift_matrix(TfPoint::new(rng.index(l), rng.index(l)), l);
        worst = worst.max((&p.adjoint() * &p).distance_to_identity());
    }
    Ok(Outcome::within(worst, UNITARY_TOL))
}

fn c11_phase_law(_: &RunConfig, rng: &mut SeededRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..SWEEP {
        let l = [4, 6, 8, 12, 16][rng.index(5)];
        let lambda = TfPoint::new(rng.index(l), rng.index(l));
        let mu = TfPoint::new(rng.index(l), rng.index(l));
        let sum = TfPoint::new((lambda.freq + mu.freq) % l, (lambda.time + mu.time) % l);
        let f = rng.gaussian_vector(l);
        let lhs = gabor::tf_shift(lambda, &gabor::tf_shift(mu, &f));
        let rhs = gabor::tf_shift(sum, &f).scale(gabor::composition_phase(lambda, mu, l));
        worst = worst.max(lhs.max_abs_diff(&rhs) / f.norm());
    }
    Ok(Outcome::within(worst, EXACT_TOL))
}
