//! Level sets of the first chart coordinate: unit normal and second
//! fundamental form.
//!
//! Both objects involve a single square root, (g^{00})^{1/2}, which exact
//! rational arithmetic cannot carry.  [`HalfWeighted`] stores the rational
//! tensor part together with an integer count of half-powers of g^{00};
//! identities involving normals are checked after multiplying out to an
//! even weight.

use super::dense::{Tensor, Variance};
use super::field::Scalar;
use super::geometry::Geometry;
use crate::error::WorkbenchError;

/// A tensor times (g^{00})^{weight/2}.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfWeighted<S: Scalar> {
    tensor: Tensor<S>,
    weight: i64,
}

impl<S: Scalar> HalfWeighted<S> {
    pub fn new(tensor: Tensor<S>, weight: i64) -> Self {
        HalfWeighted { tensor, weight }
    }

    pub fn tensor(&self) -> &Tensor<S> {
        &self.tensor
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn add(&self, other: &Self) -> Result<Self, WorkbenchError> {
        if self.weight != other.weight {
            return Err(WorkbenchError::WeightMismatch {
                left: self.weight,
                right: other.weight,
            });
        }
        Ok(HalfWeighted {
            tensor: self.tensor.add(&other.tensor)?,
            weight: self.weight,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, WorkbenchError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        HalfWeighted { tensor: self.tensor.neg(), weight: self.weight }
    }

    pub fn scale(&self, s: &S) -> Result<Self, WorkbenchError> {
        Ok(HalfWeighted { tensor: self.tensor.scale(s)?, weight: self.weight })
    }

    /// Contraction of two half-weighted tensors; weights add.
    pub fn contract(
        &self,
        other: &Self,
        self_slot: usize,
        other_slot: usize,
    ) -> Result<Self, WorkbenchError> {
        Ok(HalfWeighted {
            tensor: self.tensor.contract(&other.tensor, self_slot, other_slot)?,
            weight: self.weight + other.weight,
        })
    }

    /// Clears an even weight into the tensor part by multiplying with
    /// (g^{00})^{weight/2}; odd weights stay irrational and are refused.
    pub fn into_tensor(&self, geom: &Geometry<S>) -> Result<Tensor<S>, WorkbenchError> {
        if self.weight % 2 != 0 {
            return Err(WorkbenchError::WeightMismatch {
                left: self.weight,
                right: 0,
            });
        }
        let g00 = geom.inverse_metric().get(&[0, 0]).clone();
        let half = self.weight / 2;
        let base = if half < 0 { g00.inv()? } else { g00 };
        let mut f = base.one_like();
        for _ in 0..half.unsigned_abs() {
            f = f.mul(&base)?;
        }
        self.tensor.scale(&f)
    }
}

/// Unit normal to the level sets of the first coordinate:
/// N^a = g^{a0} (g^{00})^{-1/2}, normalized so that g(N, N) = 1.
/// Requires g^{00} not identically zero.
pub fn unit_normal<S: Scalar>(geom: &Geometry<S>) -> Result<HalfWeighted<S>, WorkbenchError> {
    let n = geom.dim();
    let g00 = geom.inverse_metric().get(&[0, 0]);
    if g00.is_zero() {
        return Err(WorkbenchError::Precondition(
            "the first coordinate has a null gradient: g^{00} = 0".to_string(),
        ));
    }
    let t = Tensor::from_fn(n, &[Variance::Up], |idx| {
        Ok(geom.inverse_metric().get(&[idx[0], 0]).clone())
    })?;
    Ok(HalfWeighted::new(t, -1))
}

/// Second fundamental form of the level sets in the normalization
/// A_{ab} = (g^{00})^{-1/2} Gamma^0_{ab}.  Only the slots tangent to the
/// level set carry the geometric meaning; the full matrix is returned.
pub fn second_fundamental_form<S: Scalar>(
    geom: &Geometry<S>,
) -> Result<HalfWeighted<S>, WorkbenchError> {
    let n = geom.dim();
    let g00 = geom.inverse_metric().get(&[0, 0]);
    if g00.is_zero() {
        return Err(WorkbenchError::Precondition(
            "the first coordinate has a null gradient: g^{00} = 0".to_string(),
        ));
    }
    let t = Tensor::from_fn(n, &[Variance::Down, Variance::Down], |idx| {
        Ok(geom.christoffel().get(&[0, idx[0], idx[1]]).clone())
    })?;
    Ok(HalfWeighted::new(t, -1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_scalar, ScalarExpr, VarTable};
    use crate::tensor::geometry::Chart;

    fn hyperbolic3() -> Geometry<ScalarExpr> {
        let vars = VarTable::new(&["x0", "x1", "x2"]);
        let chart = Chart::of_all(&vars);
        let w = ScalarExpr::var(&vars, 0).pow(-2).unwrap();
        let mut g = Tensor::zeros(3, &[Variance::Down, Variance::Down], &w);
        for i in 0..3 {
            g.set(&[i, i], w.clone());
        }
        Geometry::new(chart, g).unwrap()
    }

    fn skew3() -> Geometry<ScalarExpr> {
        let vars = VarTable::new(&["x0", "x1", "x2"]);
        let chart = Chart::of_all(&vars);
        let e = |s: &str| parse_scalar(&vars, s).unwrap();
        let comps = vec![
            e("2 + x1^2"), e("x0/3"), e("1/2"),
            e("x0/3"), e("1 + x0^2"), e("0"),
            e("1/2"), e("0"), e("1 + x2^2"),
        ];
        let g = Tensor::from_components(3, &[Variance::Down, Variance::Down], comps).unwrap();
        Geometry::new(chart, g).unwrap()
    }

    #[test]
    fn normal_has_unit_length() {
        for geom in [hyperbolic3(), skew3()] {
            let nvec = unit_normal(&geom).unwrap();
            let lowered = geom.lower(nvec.tensor(), 0).unwrap();
            let sq = HalfWeighted::new(lowered, nvec.weight())
                .contract(&nvec, 0, 0)
                .unwrap();
            assert_eq!(sq.weight(), -2);
            let val = sq.into_tensor(&geom).unwrap();
            assert!(val.get(&[]).is_one(), "g(N,N) = {}", val.get(&[]));
        }
    }

    #[test]
    fn horospheres_are_umbilic() {
        // in dx^2/x0^2 the level sets of x0 satisfy A_ij = g_ij on
        // tangential slots; compare after squaring to clear the half power
        let geom = hyperbolic3();
        let a = second_fundamental_form(&geom).unwrap();
        let g = geom.metric();
        for i in 1..3 {
            for j in 1..3 {
                for k in 1..3 {
                    for l in 1..3 {
                        let prod = a.tensor().get(&[i, j]).mul(a.tensor().get(&[k, l])).unwrap();
                        let sq = HalfWeighted::new(Tensor::rank0(3, prod), -2)
                            .into_tensor(&geom)
                            .unwrap();
                        let want = g.get(&[i, j]).mul(g.get(&[k, l])).unwrap();
                        assert_eq!(sq.get(&[]), &want);
                    }
                }
            }
        }
    }

    #[test]
    fn odd_weight_cannot_be_cleared() {
        let geom = skew3();
        let nvec = unit_normal(&geom).unwrap();
        assert!(matches!(
            nvec.into_tensor(&geom),
            Err(WorkbenchError::WeightMismatch { .. })
        ));
    }
}
