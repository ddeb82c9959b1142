//! Small frames built from repeated, rescaled or sign-flipped basis vectors.
//! They have closed-form frame operators and multipliers and serve as
//! reference instances for the verification suite and the CLI.

use crate::error::Result;
use crate::frames::FrameSeq;

/// `(e_1, e_1, e_2, e_2, …, e_d, e_d)`, a tight frame with `S = 2I`.
pub fn doubled_basis(d: usize) -> FrameSeq {
    let entries: Vec<(usize, f64)> = (0..d).flat_map(|k| [(k, 1.0), (k, 1.0)]).collect();
    FrameSeq::weighted_basis(d, &entries).expect("indices in range")
}

/// `Φ = (e_k, e_k, e_k)_k` and `Ψ = (e_k, e_k, −e_k)_k`.
///
/// `M_{(1),Φ,Ψ}` is the identity, yet `M_{(1),Ψ̃,Φ̃} = I/9`.
pub fn tripled_sign_pair(d: usize) -> Result<(FrameSeq, FrameSeq)> {
    let phi: Vec<(usize, f64)> = (0..d).flat_map(|k| [(k, 1.0), (k, 1.0), (k, 1.0)]).collect();
    let psi: Vec<(usize, f64)> = (0..d).flat_map(|k| [(k, 1.0), (k, 1.0), (k, -1.0)]).collect();
    Ok((FrameSeq::weighted_basis(d, &phi)?, FrameSeq::weighted_basis(d, &psi)?))
}

/// `Φ = (e_k, e_k)_k` and `Ψ` with the pair weights `(1/2, 1/2)` for `k = 1`
/// and `(1/k, (k−1)/k)` afterwards (one-based).
///
/// The weights of each pair sum to one, so `M_{(1),Φ,Ψ} = I`, while for
/// `d ≥ 3` the analysis ranges of `Φ` and `Ψ` are incomparable.
pub fn split_weight_pair(d: usize) -> Result<(FrameSeq, FrameSeq)> {
    let phi = doubled_basis(d);
    let psi: Vec<(usize, f64)> = (0..d)
        .flat_map(|k| {
            let kk = (k + 1) as f64;
            let (a, b) = if k == 0 { (0.5, 0.5) } else { (1.0 / kk, (kk - 1.0) / kk) };
            [(k, a), (k, b)]
        })
        .collect();
    Ok((phi, FrameSeq::weighted_basis(d, &psi)?))
}

/// `Φ = (e_1, e_2, e_2)` and `Ψ = (e_1, e_2, −e_2)` in `C²`: both frames,
/// incomparable analysis ranges, and `M_{(1),Φ,Ψ} = diag(1, 0)` is singular.
pub fn sign_cancel_pair() -> (FrameSeq, FrameSeq) {
    (
        FrameSeq::weighted_basis(2, &[(0, 1.0), (1, 1.0), (1, 1.0)]).expect("indices in range"),
        FrameSeq::weighted_basis(2, &[(0, 1.0), (1, 1.0), (1, -1.0)]).expect("indices in range"),
    )
}
