//! Harmonic-gauge decomposition of the Ricci tensor.
//!
//! In any chart,
//!
//! ```text
//! Ric_{ab} = -(1/2) g^{mn} g_{ab,mn} + (1/2)(Gam_{a,b} + Gam_{b,a}) + Q_{ab}
//! ```
//!
//! where `Gam_k = g^{mn}(g_{km,n} - (1/2) g_{mn,k})` is the lowered
//! Christoffel trace and Q collects terms with no second derivative of the
//! metric.  In harmonic coordinates Gam vanishes and Ricci becomes the
//! coordinate wave operator acting on the metric components plus
//! first-order terms; the boundary-value analysis runs on exactly this
//! split, so Q is written out term by term rather than defined as a
//! difference.  The decomposition test closes the loop by summing the
//! three pieces against the curvature route.

use super::dense::{Tensor, Variance};
use super::field::Scalar;
use super::geometry::Geometry;
use crate::error::WorkbenchError;

/// The lowered Christoffel trace Gam_k = g^{mn}(g_{km,n} - (1/2) g_{mn,k}).
pub fn gauge_one_form<S: Scalar>(geom: &Geometry<S>) -> Result<Tensor<S>, WorkbenchError> {
    let n = geom.dim();
    let dg = geom.partial(geom.metric())?;
    let ginv = geom.inverse_metric();
    Tensor::from_fn(n, &[Variance::Down], |idx| {
        let k = idx[0];
        let mut acc = geom.metric().proto().zero_like();
        for m in 0..n {
            for nu in 0..n {
                let w = ginv.get(&[m, nu]);
                if w.is_zero() {
                    continue;
                }
                let t = dg.get(&[nu, k, m]).sub(&dg.get(&[k, m, nu]).mul_frac(1, 2))?;
                acc = acc.add(&w.mul(&t)?)?;
            }
        }
        Ok(acc)
    })
}

/// The same one-form through the Christoffel symbols:
/// Gam_k = g_{kl} g^{mn} Gamma^l_{mn}.  Kept as an independent route so the
/// direct formula above has an oracle.
pub fn gauge_one_form_from_christoffel<S: Scalar>(
    geom: &Geometry<S>,
) -> Result<Tensor<S>, WorkbenchError> {
    let traced = geom.trace(geom.christoffel(), 1, 2)?; // Gamma^l = g^{mn} Gamma^l_{mn}
    geom.lower(&traced, 0)
}

/// The three pieces of the harmonic-gauge split.  They satisfy
/// `ricci = principal + gauge + remainder` exactly, where
/// `principal = -(1/2) g^{mn} g_{ab,mn}` and
/// `gauge = (1/2)(Gam_{a,b} + Gam_{b,a})` (comma derivatives).
pub struct HarmonicSplit<S: Scalar> {
    pub principal: Tensor<S>,
    pub gauge: Tensor<S>,
    pub remainder: Tensor<S>,
}

/// Computes the split with the remainder written out explicitly:
///
/// ```text
/// Q_{ab} = (1/2) (d_m g^{mn}) (g_{na,b} + g_{nb,a} - g_{ab,n})
///        - (1/2) (d_b g^{mn}) g_{mn,a}
///        + Gamma^m_{ml} Gamma^l_{ba} - Gamma^m_{bl} Gamma^l_{am}
///        - (1/2) [ (d_b g^{mn}) (g_{am,n} - (1/2) g_{mn,a}) + (a <-> b) ]
/// ```
pub fn ricci_harmonic_split<S: Scalar>(
    geom: &Geometry<S>,
) -> Result<HarmonicSplit<S>, WorkbenchError> {
    let n = geom.dim();
    let dg = geom.partial(geom.metric())?; // dg[c, a, b] = g_{ab,c}
    let dginv = geom.partial(geom.inverse_metric())?; // dginv[c, m, n] = d_c g^{mn}
    let gamma = geom.christoffel();

    let principal = geom
        .principal_laplacian_power(geom.metric(), 1)?
        .scale_frac(-1, 2);

    let gam = gauge_one_form(geom)?;
    let dgam = geom.partial(&gam)?; // dgam[c, k] = d_c Gam_k
    let gauge = Tensor::from_fn(n, &[Variance::Down, Variance::Down], |idx| {
        let (a, b) = (idx[0], idx[1]);
        Ok(dgam.get(&[a, b]).add(dgam.get(&[b, a]))?.mul_frac(1, 2))
    })?;

    let remainder = Tensor::from_fn(n, &[Variance::Down, Variance::Down], |idx| {
        let (a, b) = (idx[0], idx[1]);
        let mut acc = geom.metric().proto().zero_like();
        for m in 0..n {
            for nu in 0..n {
                // (1/2)(d_m g^{mn})(g_{na,b} + g_{nb,a} - g_{ab,n})
                let dn = dginv.get(&[m, m, nu]);
                if !dn.is_zero() {
                    let sum = dg
                        .get(&[b, nu, a])
                        .add(dg.get(&[a, nu, b]))?
                        .sub(dg.get(&[nu, a, b]))?;
                    acc = acc.add(&dn.mul(&sum)?.mul_frac(1, 2))?;
                }
                // -(1/2)(d_b g^{mn}) g_{mn,a}
                let db = dginv.get(&[b, m, nu]);
                if !db.is_zero() {
                    acc = acc.sub(&db.mul(dg.get(&[a, m, nu]))?.mul_frac(1, 2))?;
                    // -(1/2)(d_b g^{mn})(g_{am,n} - (1/2) g_{mn,a})
                    let t = dg
                        .get(&[nu, a, m])
                        .sub(&dg.get(&[a, m, nu]).mul_frac(1, 2))?;
                    acc = acc.sub(&db.mul(&t)?.mul_frac(1, 2))?;
                }
                // symmetrized partner: -(1/2)(d_a g^{mn})(g_{bm,n} - (1/2) g_{mn,b})
                let da = dginv.get(&[a, m, nu]);
                if !da.is_zero() {
                    let t = dg
                        .get(&[nu, b, m])
                        .sub(&dg.get(&[b, m, nu]).mul_frac(1, 2))?;
                    acc = acc.sub(&da.mul(&t)?.mul_frac(1, 2))?;
                }
            }
        }
        for m in 0..n {
            for l in 0..n {
                let t1 = gamma.get(&[m, m, l]);
                let u1 = gamma.get(&[l, b, a]);
                if !t1.is_zero() && !u1.is_zero() {
                    acc = acc.add(&t1.mul(u1)?)?;
                }
                let t2 = gamma.get(&[m, b, l]);
                let u2 = gamma.get(&[l, a, m]);
                if !t2.is_zero() && !u2.is_zero() {
                    acc = acc.sub(&t2.mul(u2)?)?;
                }
            }
        }
        Ok(acc)
    })?;

    Ok(HarmonicSplit { principal, gauge, remainder })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_scalar, ScalarExpr, VarTable};
    use crate::tensor::geometry::Chart;

    fn dense_metric() -> Geometry<ScalarExpr> {
        let vars = VarTable::new(&["x0", "x1", "x2"]);
        let chart = Chart::of_all(&vars);
        let e = |s: &str| parse_scalar(&vars, s).unwrap();
        let comps = vec![
            e("1 + x0^2"), e("x1/2"), e("x0*x2/4"),
            e("x1/2"), e("2 + x1^2"), e("x0/3"),
            e("x0*x2/4"), e("x0/3"), e("1 + x2^2"),
        ];
        let g = Tensor::from_components(3, &[Variance::Down, Variance::Down], comps).unwrap();
        Geometry::new(chart, g).unwrap()
    }

    fn hyperbolic4() -> Geometry<ScalarExpr> {
        let vars = VarTable::new(&["x0", "x1", "x2", "x3"]);
        let chart = Chart::of_all(&vars);
        let w = ScalarExpr::var(&vars, 0).pow(-2).unwrap();
        let mut g = Tensor::zeros(4, &[Variance::Down, Variance::Down], &w);
        for i in 0..4 {
            g.set(&[i, i], w.clone());
        }
        Geometry::new(chart, g).unwrap()
    }

    #[test]
    fn gauge_routes_agree() {
        for geom in [dense_metric(), hyperbolic4()] {
            let direct = gauge_one_form(&geom).unwrap();
            let via = gauge_one_form_from_christoffel(&geom).unwrap();
            assert_eq!(direct, via);
        }
    }

    #[test]
    fn split_sums_to_ricci() {
        for geom in [dense_metric(), hyperbolic4()] {
            let split = ricci_harmonic_split(&geom).unwrap();
            let sum = split
                .principal
                .add(&split.gauge)
                .unwrap()
                .add(&split.remainder)
                .unwrap();
            assert_eq!(sum, geom.ricci().unwrap());
        }
    }

    #[test]
    fn remainder_has_no_second_derivatives() {
        // scaling the first-derivative content: under g -> g(const coords)
        // any metric with constant components has Q = 0 and gauge = 0
        let vars = VarTable::new(&["x0", "x1"]);
        let chart = Chart::of_all(&vars);
        let e = |s: &str| parse_scalar(&vars, s).unwrap();
        let comps = vec![e("2"), e("1/2"), e("1/2"), e("3")];
        let g = Tensor::from_components(2, &[Variance::Down, Variance::Down], comps).unwrap();
        let geom = Geometry::new(chart, g).unwrap();
        let split = ricci_harmonic_split(&geom).unwrap();
        assert!(split.principal.is_zero());
        assert!(split.gauge.is_zero());
        assert!(split.remainder.is_zero());
    }
}
