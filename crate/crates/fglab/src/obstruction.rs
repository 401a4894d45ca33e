//! The conformal obstruction tensor.
//!
//! In dimension four the obstruction is the Bach tensor, computed here by
//! two independent routes that must agree: a double divergence of the Weyl
//! tensor and a single divergence of the Cotton tensor.  In higher even
//! dimensions the module exposes the leading part of the obstruction, a
//! power of the Laplacian acting on the Schouten tensor corrected by a
//! gradient term, normalized so that the dimension-four case reduces to
//! the Bach tensor's leading part.

use crate::error::WorkbenchError;
use crate::expr::ScalarExpr;
use crate::tensor::conformal::hessian;
use crate::tensor::{Geometry, Scalar, Tensor};

fn require_dim_four(n: usize) -> Result<(), WorkbenchError> {
    if n != 4 {
        return Err(WorkbenchError::Precondition(format!(
            "the Bach tensor routes are pinned to dimension 4, got {n}"
        )));
    }
    Ok(())
}

/// Bach tensor in dimension four.
///
/// Uses the Weyl route; [`bach_via_cotton`] is the independent cross-check.
pub fn bach<S: Scalar>(geom: &Geometry<S>) -> Result<Tensor<S>, WorkbenchError> {
    bach_via_weyl(geom)
}

/// B_ac = grad^b grad^d W_abcd + (1/2) Ric^bd W_abcd.
pub fn bach_via_weyl<S: Scalar>(geom: &Geometry<S>) -> Result<Tensor<S>, WorkbenchError> {
    require_dim_four(geom.dim())?;
    let w = geom.weyl()?;

    // double divergence, innermost slot first
    let dw = geom.covariant_derivative(&w)?; // [e, a, b, c, d]
    let v = geom.trace(&dw, 0, 4)?; // [a, b, c]
    let dv = geom.covariant_derivative(&v)?; // [f, a, b, c]
    let div2 = geom.trace(&dv, 0, 2)?; // [a, c]

    let ric = geom.ricci()?;
    let ric_up = geom.raise(&geom.raise(&ric, 0)?, 1)?;
    let coupling = w.contract(&ric_up, 1, 0)?.self_contract(2, 3)?;

    div2.add(&coupling.scale_frac(1, 2))
}

/// B_ac = grad^k C_cak + P^bd W_abcd, with C_ijk the Cotton tensor.
pub fn bach_via_cotton<S: Scalar>(geom: &Geometry<S>) -> Result<Tensor<S>, WorkbenchError> {
    require_dim_four(geom.dim())?;
    let p = geom.schouten()?;
    let c = geom.cotton_from(&p)?;

    let dc = geom.covariant_derivative(&c)?; // [e, i, j, k]
    let div = geom.trace(&dc, 0, 3)?; // [i, j] = [c, a]
    let div = div.swap_slots(0, 1);

    let w = geom.weyl()?;
    let p_up = geom.raise(&geom.raise(&p, 0)?, 1)?;
    let coupling = w.contract(&p_up, 1, 0)?.self_contract(2, 3)?;

    div.add(&coupling)
}

/// Leading part of the obstruction tensor in even dimension n >= 4:
///
/// ```text
/// (1 / ((-2)^(n/2-2) (n/2-2)!)) *
///     (Lap^(n/2-1) P_ab - (1/(2(n-1))) Lap^(n/2-2) grad^2_ab S)
/// ```
///
/// built from rough Laplacians of the Schouten tensor and the Hessian of
/// the scalar curvature.  For n = 4 the prefactor is 1 and the expression
/// is Lap P - grad^2 S / 6.
pub fn obstruction_leading<S: Scalar>(geom: &Geometry<S>) -> Result<Tensor<S>, WorkbenchError> {
    let n = geom.dim();
    if n < 4 || n % 2 != 0 {
        return Err(WorkbenchError::Precondition(format!(
            "the leading obstruction needs even dimension at least 4, got {n}"
        )));
    }
    let k = n / 2 - 2;

    let p = geom.schouten()?;
    let lead = geom.laplacian_power(&p, n / 2 - 1)?;

    let s = geom.scalar_curvature()?;
    let hs = hessian(geom, &s)?;
    let grad_term = geom
        .laplacian_power(&hs, k)?
        .scale_frac(1, 2 * (n as i64 - 1));

    let mut denom: i64 = 1;
    for i in 1..=(k as i64) {
        denom *= -2 * i;
    }
    Ok(lead.sub(&grad_term)?.scale_frac(1, denom))
}

/// Obstruction tensor of an even-dimensional boundary metric via the
/// expansion recursion: the trace-free part of the forcing at the step
/// where the linear factor degenerates.  The recursion runs in bulk
/// dimension n+1 and stops where the coefficient g⁽ⁿ⁾ would be solved
/// for; the trace part of that coefficient stays determined, the
/// trace-free part is obstructed by exactly this tensor.
pub fn fg_obstruction(
    h: &Geometry<ScalarExpr>,
    n: usize,
) -> Result<Tensor<ScalarExpr>, WorkbenchError> {
    if n < 4 || n % 2 != 0 {
        return Err(WorkbenchError::Precondition(format!(
            "the obstruction tensor needs even boundary dimension at least 4, got {n}"
        )));
    }
    if h.dim() != n {
        return Err(WorkbenchError::Precondition(format!(
            "boundary metric has dimension {}, expected {n}",
            h.dim()
        )));
    }
    let forcing = crate::fg::degenerate_step_forcing(h, n + 1)?;
    h.trace_free_part(&forcing)
}
