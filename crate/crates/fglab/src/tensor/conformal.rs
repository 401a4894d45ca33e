//! Conformal rescaling and the exact transformation identities.
//!
//! Each identity is exposed as a residual evaluator: it computes both
//! sides from scratch (curvature of the rescaled metric on one side,
//! derivatives of the factor on the other) and returns the difference,
//! cleared of negative powers of the factor.  A correct implementation
//! returns zero identically for every metric and every factor, which makes
//! the evaluators useful both as checks of the identities on specific
//! compactifications and as property tests of the curvature code itself.

use super::dense::{Tensor, Variance};
use super::field::Scalar;
use super::geometry::Geometry;
use crate::error::WorkbenchError;

/// Multiplies every component by factor^power (power may be negative).
pub fn conformal_rescale<S: Scalar>(
    metric: &Tensor<S>,
    factor: &S,
    power: i32,
) -> Result<Tensor<S>, WorkbenchError> {
    let base = if power < 0 { factor.inv()? } else { factor.clone() };
    let mut f = base.one_like();
    for _ in 0..power.unsigned_abs() {
        f = f.mul(&base)?;
    }
    metric.scale(&f)
}

/// Hessian of a scalar: (nabla^2 f)_{ab}, symmetric.
pub fn hessian<S: Scalar>(geom: &Geometry<S>, f: &S) -> Result<Tensor<S>, WorkbenchError> {
    let df = geom.covariant_derivative(&Tensor::rank0(geom.dim(), f.clone()))?;
    geom.covariant_derivative(&df)
}

/// |df|^2 = g^{ab} f_{,a} f_{,b}.
pub fn grad_norm_squared<S: Scalar>(geom: &Geometry<S>, f: &S) -> Result<S, WorkbenchError> {
    let df = geom.partial(&Tensor::rank0(geom.dim(), f.clone()))?;
    let up = geom.raise(&df, 0)?;
    Ok(up.contract(&df, 0, 0)?.get(&[]).clone())
}

/// Residual of the Ricci transformation law for ghat = phi^2 g:
///
/// ```text
/// Ric(ghat) = Ric(g) + phi^{-1} ((2-n) nabla^2 phi - (Lap phi) g)
///           + phi^{-2} ((3-n) |dphi|^2 g + 2(n-2) dphi x dphi)
/// ```
///
/// cleared of inverse factors: the returned tensor is
/// phi^2 (Ric(ghat) - Ric(g)) - phi ((2-n) nabla^2 phi - (Lap phi) g)
/// - (3-n)|dphi|^2 g - 2(n-2) dphi x dphi, identically zero.
/// All derivatives and norms on the right are taken in g.
pub fn conformal_ricci_residual<S: Scalar>(
    geom: &Geometry<S>,
    phi: &S,
) -> Result<Tensor<S>, WorkbenchError> {
    let n = geom.dim() as i64;
    let ghat = conformal_rescale(geom.metric(), phi, 2)?;
    let geom_hat = Geometry::new(geom.chart().clone(), ghat)?;
    let ric_hat = geom_hat.ricci()?;
    let ric = geom.ricci()?;

    let hess = hessian(geom, phi)?;
    let lap = geom.trace(&hess, 0, 1)?.get(&[]).clone();
    let grad2 = grad_norm_squared(geom, phi)?;
    let dphi = geom.partial(&Tensor::rank0(geom.dim(), phi.clone()))?;
    let dphi_sq = Tensor::from_fn(geom.dim(), &[Variance::Down, Variance::Down], |idx| {
        dphi.get(&[idx[0]]).mul(dphi.get(&[idx[1]])).map_err(Into::into)
    })?;

    let phi2 = phi.mul(phi)?;
    let mut res = ric_hat.sub(&ric)?.scale(&phi2)?;
    let first = hess
        .scale_frac(2 - n, 1)
        .sub(&geom.metric().scale(&lap)?)?
        .scale(phi)?;
    res = res.sub(&first)?;
    res = res.sub(&geom.metric().scale(&grad2)?.scale_frac(3 - n, 1))?;
    res = res.sub(&dphi_sq.scale_frac(2 * (n - 2), 1))?;
    Ok(res)
}

/// Residual of the scalar curvature law in first-power form, for
/// gbar = phi^2 g:
///
/// ```text
/// Lap phi = (1/(2(n-1))) (phi S(g) - phi^3 S(gbar) + (n-1)(4-n) phi^{-1} |dphi|^2)
/// ```
///
/// cleared of the inverse factor: returns
/// 2(n-1) phi Lap phi - phi^2 S(g) + phi^4 S(gbar) - (n-1)(4-n) |dphi|^2.
pub fn conformal_laplacian_residual<S: Scalar>(
    geom: &Geometry<S>,
    phi: &S,
) -> Result<S, WorkbenchError> {
    let n = geom.dim() as i64;
    let gbar = conformal_rescale(geom.metric(), phi, 2)?;
    let geom_bar = Geometry::new(geom.chart().clone(), gbar)?;
    let s = geom.scalar_curvature()?;
    let s_bar = geom_bar.scalar_curvature()?;
    let hess = hessian(geom, phi)?;
    let lap = geom.trace(&hess, 0, 1)?.get(&[]).clone();
    let grad2 = grad_norm_squared(geom, phi)?;

    let phi2 = phi.mul(phi)?;
    let phi4 = phi2.mul(&phi2)?;
    let mut res = phi.mul(&lap)?.mul_int(2 * (n - 1));
    res = res.sub(&phi2.mul(&s)?)?;
    res = res.add(&phi4.mul(&s_bar)?)?;
    res = res.sub(&grad2.mul_int((n - 1) * (4 - n)))?;
    Ok(res)
}

/// Residual of the scalar curvature law in Yamabe form.  Only in
/// dimensions 3, 4, 6 is the exponent 4/(n-2) an integer, so only there
/// does ghat = v^{4/(n-2)} g stay inside exact rational arithmetic:
///
/// ```text
/// S(ghat) v^{(n+2)/(n-2)} = -(4(n-1)/(n-2)) Lap v + S(g) v
/// ```
pub fn yamabe_scalar_residual<S: Scalar>(
    geom: &Geometry<S>,
    v: &S,
) -> Result<S, WorkbenchError> {
    let n = geom.dim() as i64;
    let k = match n {
        3 => 4,
        4 => 2,
        6 => 1,
        _ => {
            return Err(WorkbenchError::Unsupported(format!(
                "the Yamabe exponent 4/(n-2) is not an integer in dimension {n}"
            )))
        }
    };
    let ghat = conformal_rescale(geom.metric(), v, k)?;
    let geom_hat = Geometry::new(geom.chart().clone(), ghat)?;
    let s_hat = geom_hat.scalar_curvature()?;
    let s = geom.scalar_curvature()?;
    let hess = hessian(geom, v)?;
    let lap = geom.trace(&hess, 0, 1)?.get(&[]).clone();

    // (n+2)/(n-2) = 5, 3, 2 for n = 3, 4, 6
    let e = ((n + 2) / (n - 2)) as u32;
    let mut vp = v.one_like();
    for _ in 0..e {
        vp = vp.mul(v)?;
    }
    let lhs = s_hat.mul(&vp)?;
    let rhs = lap.mul_frac(-4 * (n - 1), n - 2).add(&s.mul(v)?)?;
    lhs.sub(&rhs).map_err(Into::into)
}

/// Residual of the conformal change of the Christoffel symbols for
/// ghat = phi^2 g, cleared of the inverse factor:
///
/// ```text
/// phi (Gammahat^a_{bc} - Gamma^a_{bc})
///   - (delta^a_b phi_{,c} + delta^a_c phi_{,b} - g^{am} phi_{,m} g_{bc}) = 0
/// ```
pub fn conformal_christoffel_residual<S: Scalar>(
    geom: &Geometry<S>,
    phi: &S,
) -> Result<Tensor<S>, WorkbenchError> {
    let n = geom.dim();
    let ghat = conformal_rescale(geom.metric(), phi, 2)?;
    let geom_hat = Geometry::new(geom.chart().clone(), ghat)?;
    let dphi = geom.partial(&Tensor::rank0(n, phi.clone()))?;
    let dphi_up = geom.raise(&dphi, 0)?;
    let diff = geom_hat.christoffel().sub(geom.christoffel())?.scale(phi)?;
    let variance = [Variance::Up, Variance::Down, Variance::Down];
    let correction = Tensor::from_fn(n, &variance, |idx| {
        let (a, b, c) = (idx[0], idx[1], idx[2]);
        let mut acc = phi.zero_like();
        if a == b {
            acc = acc.add(dphi.get(&[c]))?;
        }
        if a == c {
            acc = acc.add(dphi.get(&[b]))?;
        }
        let t = dphi_up.get(&[a]).mul(geom.metric().get(&[b, c]))?;
        acc.sub(&t).map_err(Into::into)
    })?;
    diff.sub(&correction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_scalar, ScalarExpr, VarTable};
    use crate::tensor::geometry::Chart;

    fn flat(n: usize) -> Geometry<ScalarExpr> {
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let vars = VarTable::new(&refs);
        let chart = Chart::of_all(&vars);
        let one = ScalarExpr::one(&vars);
        let mut g = Tensor::zeros(n, &[Variance::Down, Variance::Down], &one);
        for i in 0..n {
            g.set(&[i, i], one.clone());
        }
        Geometry::new(chart, g).unwrap()
    }

    fn curved3() -> Geometry<ScalarExpr> {
        let vars = VarTable::new(&["x0", "x1", "x2"]);
        let chart = Chart::of_all(&vars);
        let e = |s: &str| parse_scalar(&vars, s).unwrap();
        let comps = vec![
            e("1 + x1^2"), e("x0/2"), e("0"),
            e("x0/2"), e("1"), e("x2/3"),
            e("0"), e("x2/3"), e("1 + x0^2"),
        ];
        let g = Tensor::from_components(3, &[Variance::Down, Variance::Down], comps).unwrap();
        Geometry::new(chart, g).unwrap()
    }

    #[test]
    fn flat_to_hyperbolic_ricci_law() {
        let geom = flat(4);
        let vars = geom.chart().vars().clone();
        let phi = parse_scalar(&vars, "1/x0").unwrap();
        let res = conformal_ricci_residual(&geom, &phi).unwrap();
        assert!(res.is_zero());

        // and the rescaled metric really is Einstein with Ric = -3 ghat
        let ghat = conformal_rescale(geom.metric(), &phi, 2).unwrap();
        let hyp = Geometry::new(geom.chart().clone(), ghat).unwrap();
        let ric = hyp.ricci().unwrap();
        assert_eq!(ric, hyp.metric().scale_frac(-3, 1));
    }

    #[test]
    fn ricci_law_on_a_curved_base() {
        let geom = curved3();
        let vars = geom.chart().vars().clone();
        let phi = parse_scalar(&vars, "1 + x0^2 + x1").unwrap();
        assert!(conformal_ricci_residual(&geom, &phi).unwrap().is_zero());
    }

    #[test]
    fn laplacian_law() {
        let geom = curved3();
        let vars = geom.chart().vars().clone();
        for phi_text in ["1 + x2", "2 + x0*x1"] {
            let phi = parse_scalar(&vars, phi_text).unwrap();
            assert!(conformal_laplacian_residual(&geom, &phi).unwrap().is_zero());
        }
    }

    #[test]
    fn yamabe_form_in_supported_dimensions() {
        for n in [3usize, 4] {
            let geom = flat(n);
            let vars = geom.chart().vars().clone();
            let v = parse_scalar(&vars, "1 + x0 + x1^2").unwrap();
            assert!(yamabe_scalar_residual(&geom, &v).unwrap().is_zero(), "n = {n}");
        }
        let geom = flat(5);
        let vars = geom.chart().vars().clone();
        let v = parse_scalar(&vars, "1 + x0").unwrap();
        assert!(matches!(
            yamabe_scalar_residual(&geom, &v),
            Err(WorkbenchError::Unsupported(_))
        ));
    }

    #[test]
    fn christoffel_law() {
        let geom = curved3();
        let vars = geom.chart().vars().clone();
        let phi = parse_scalar(&vars, "1 + x1^2").unwrap();
        assert!(conformal_christoffel_residual(&geom, &phi).unwrap().is_zero());
    }
}
