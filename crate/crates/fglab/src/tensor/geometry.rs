//! Metric geometry on a chart: inverse metric, Christoffel symbols, the
//! curvature tensors, and covariant calculus.
//!
//! Conventions, fixed once and checked by the normalization tests at the
//! bottom of this file:
//!
//! ```text
//! Gamma^e_{ab} = (1/2) g^{em} (g_{bm,a} + g_{am,b} - g_{ab,m})
//! R^e_{mab}    = Gamma^e_{bm,a} - Gamma^e_{am,b}
//!                + Gamma^e_{al} Gamma^l_{bm} - Gamma^e_{bl} Gamma^l_{am}
//! Ric_{mb}     = R^a_{mab}
//! S            = g^{mb} Ric_{mb}
//! ```
//!
//! With these signs the hyperbolic metric dx^2 / x0^2 has Ric = -(n-1) g
//! and the unit sphere has scalar curvature m(m-1).  The covariant
//! derivative prepends its slot: (nabla T)_{c,rest} = nabla_c T_rest.

use std::sync::Arc;

use super::dense::{indices, Tensor, Variance};
use super::field::Scalar;
use crate::error::WorkbenchError;
use crate::expr::poly::VarTable;

/// A chart: which variables of the shared table act as coordinates.
/// Remaining variables are free parameters that differentiation treats as
/// constants of the chart.
#[derive(Clone, Debug)]
pub struct Chart {
    vars: Arc<VarTable>,
    coords: Vec<usize>,
}

impl Chart {
    pub fn new(vars: &Arc<VarTable>, coord_names: &[&str]) -> Result<Self, WorkbenchError> {
        let mut coords = Vec::with_capacity(coord_names.len());
        for name in coord_names {
            match vars.index_of(name) {
                Some(i) => {
                    if coords.contains(&i) {
                        return Err(WorkbenchError::Precondition(format!(
                            "coordinate {name} repeats"
                        )));
                    }
                    coords.push(i);
                }
                None => {
                    return Err(WorkbenchError::Precondition(format!(
                        "no chart variable named {name}"
                    )))
                }
            }
        }
        if coords.is_empty() {
            return Err(WorkbenchError::Precondition("a chart needs coordinates".to_string()));
        }
        Ok(Chart { vars: vars.clone(), coords })
    }

    /// Every variable of the table is a coordinate, in table order.
    pub fn of_all(vars: &Arc<VarTable>) -> Self {
        Chart {
            vars: vars.clone(),
            coords: (0..vars.len()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coord_var(&self, a: usize) -> usize {
        self.coords[a]
    }

    pub fn coord_name(&self, a: usize) -> &str {
        self.vars.name(self.coords[a])
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }
}

/// Determinant by cofactor expansion along the first row.
pub fn det_matrix<S: Scalar>(m: &[Vec<S>]) -> Result<S, WorkbenchError> {
    let n = m.len();
    if n == 0 {
        return Err(WorkbenchError::Shape("empty matrix".to_string()));
    }
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let mut acc = m[0][0].zero_like();
    for (j, pivot) in m[0].iter().enumerate() {
        if pivot.is_zero() {
            continue;
        }
        let minor: Vec<Vec<S>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = pivot.mul(&det_matrix(&minor)?)?;
        acc = if j % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
    }
    Ok(acc)
}

fn adjugate_matrix<S: Scalar>(m: &[Vec<S>]) -> Result<Vec<Vec<S>>, WorkbenchError> {
    let n = m.len();
    if n == 1 {
        return Ok(vec![vec![m[0][0].one_like()]]);
    }
    let mut adj = vec![vec![m[0][0].zero_like(); n]; n];
    for i in 0..n {
        for j in 0..n {
            // adj[i][j] = (-1)^{i+j} det(minor with row j, column i removed)
            let minor: Vec<Vec<S>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != i)
                        .map(|c| m[r][c].clone())
                        .collect()
                })
                .collect();
            let d = det_matrix(&minor)?;
            adj[i][j] = if (i + j) % 2 == 0 { d } else { d.neg() };
        }
    }
    Ok(adj)
}

/// A metric on a chart together with everything derived algebraically from
/// it: determinant, inverse, Christoffel symbols.
#[derive(Clone, Debug)]
pub struct Geometry<S: Scalar> {
    chart: Chart,
    metric: Tensor<S>,
    inverse: Tensor<S>,
    det: S,
    christoffel: Tensor<S>,
}

impl<S: Scalar> Geometry<S> {
    pub fn new(chart: Chart, metric: Tensor<S>) -> Result<Self, WorkbenchError> {
        let n = chart.dim();
        if metric.dim() != n || metric.variance() != [Variance::Down, Variance::Down] {
            return Err(WorkbenchError::Shape(format!(
                "a metric is a rank-2 covariant tensor in dimension {n}"
            )));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if metric.get(&[i, j]) != metric.get(&[j, i]) {
                    return Err(WorkbenchError::NotSymmetric(format!(
                        "metric components ({i},{j}) and ({j},{i}) differ"
                    )));
                }
            }
        }
        let rows: Vec<Vec<S>> = (0..n)
            .map(|i| (0..n).map(|j| metric.get(&[i, j]).clone()).collect())
            .collect();
        let det = det_matrix(&rows)?;
        if det.is_zero() {
            return Err(WorkbenchError::DegenerateMetric);
        }
        let det_inv = det.inv().map_err(|_| WorkbenchError::DegenerateMetric)?;
        let adj = adjugate_matrix(&rows)?;
        let mut inverse = Tensor::zeros(n, &[Variance::Up, Variance::Up], metric.proto());
        for i in 0..n {
            for j in 0..n {
                inverse.set(&[i, j], adj[i][j].mul(&det_inv)?);
            }
        }

        let mut geom = Geometry {
            chart,
            metric,
            inverse,
            det,
            christoffel: Tensor::zeros(n, &[Variance::Up, Variance::Down, Variance::Down], &det_inv),
        };
        geom.christoffel = geom.compute_christoffel()?;
        Ok(geom)
    }

    fn compute_christoffel(&self) -> Result<Tensor<S>, WorkbenchError> {
        let n = self.dim();
        let dg = self.partial(&self.metric)?; // dg[m, a, b] = g_{ab,m}
        let mut gamma = Tensor::zeros(
            n,
            &[Variance::Up, Variance::Down, Variance::Down],
            self.metric.proto(),
        );
        for a in 0..n {
            for b in a..n {
                for e in 0..n {
                    let mut acc = self.metric.proto().zero_like();
                    for m in 0..n {
                        let gem = self.inverse.get(&[e, m]);
                        if gem.is_zero() {
                            continue;
                        }
                        let sum = dg
                            .get(&[a, b, m])
                            .add(dg.get(&[b, a, m]))?
                            .sub(dg.get(&[m, a, b]))?;
                        acc = acc.add(&gem.mul(&sum)?)?;
                    }
                    let val = acc.mul_frac(1, 2);
                    gamma.set(&[e, a, b], val.clone());
                    gamma.set(&[e, b, a], val);
                }
            }
        }
        Ok(gamma)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn metric(&self) -> &Tensor<S> {
        &self.metric
    }

    pub fn inverse_metric(&self) -> &Tensor<S> {
        &self.inverse
    }

    pub fn det(&self) -> &S {
        &self.det
    }

    pub fn christoffel(&self) -> &Tensor<S> {
        &self.christoffel
    }

    /// Coordinate derivative, prepending a covariant slot:
    /// (dT)_{c,rest} = T_{rest,c} (comma derivative).
    pub fn partial(&self, t: &Tensor<S>) -> Result<Tensor<S>, WorkbenchError> {
        let n = self.dim();
        if t.dim() != n {
            return Err(WorkbenchError::Shape("tensor lives on a different chart".to_string()));
        }
        let mut variance = vec![Variance::Down];
        variance.extend_from_slice(t.variance());
        Tensor::from_fn(n, &variance, |idx| {
            Ok(t.get(&idx[1..]).diff(self.chart.coord_var(idx[0]))?)
        })
    }

    /// Levi-Civita covariant derivative, prepending a covariant slot.
    pub fn covariant_derivative(&self, t: &Tensor<S>) -> Result<Tensor<S>, WorkbenchError> {
        let n = self.dim();
        let mut out = self.partial(&t.clone())?;
        let rank = t.rank();
        for idx in indices(n, rank + 1) {
            let c = idx[0];
            let mut val = out.get(&idx).clone();
            for (k, &var) in t.variance().iter().enumerate() {
                let ik = idx[k + 1];
                let mut corr = t.proto().zero_like();
                for m in 0..n {
                    let mut inner = idx[1..].to_vec();
                    inner[k] = m;
                    let tv = t.get(&inner);
                    if tv.is_zero() {
                        continue;
                    }
                    let gamma = match var {
                        Variance::Down => self.christoffel.get(&[m, c, ik]),
                        Variance::Up => self.christoffel.get(&[ik, c, m]),
                    };
                    if gamma.is_zero() {
                        continue;
                    }
                    corr = corr.add(&gamma.mul(tv)?)?;
                }
                val = match var {
                    Variance::Down => val.sub(&corr)?,
                    Variance::Up => val.add(&corr)?,
                };
            }
            out.set(&idx, val);
        }
        Ok(out)
    }

    /// Raises a covariant slot in place with the inverse metric.
    pub fn raise(&self, t: &Tensor<S>, slot: usize) -> Result<Tensor<S>, WorkbenchError> {
        self.flip_slot(t, slot, Variance::Down)
    }

    /// Lowers a contravariant slot in place with the metric.
    pub fn lower(&self, t: &Tensor<S>, slot: usize) -> Result<Tensor<S>, WorkbenchError> {
        self.flip_slot(t, slot, Variance::Up)
    }

    fn flip_slot(
        &self,
        t: &Tensor<S>,
        slot: usize,
        expect: Variance,
    ) -> Result<Tensor<S>, WorkbenchError> {
        let n = self.dim();
        if slot >= t.rank() || t.variance()[slot] != expect {
            return Err(WorkbenchError::Shape(format!(
                "slot {slot} is not available with variance {expect:?}"
            )));
        }
        let mover = match expect {
            Variance::Down => &self.inverse,
            Variance::Up => &self.metric,
        };
        let mut variance = t.variance().to_vec();
        variance[slot] = variance[slot].flip();
        Tensor::from_fn(n, &variance, |idx| {
            let mut acc = t.proto().zero_like();
            for m in 0..n {
                let w = mover.get(&[idx[slot], m]);
                if w.is_zero() {
                    continue;
                }
                let mut inner = idx.to_vec();
                inner[slot] = m;
                let tv = t.get(&inner);
                if tv.is_zero() {
                    continue;
                }
                acc = acc.add(&w.mul(tv)?)?;
            }
            Ok(acc)
        })
    }

    /// Metric trace over two slots.  Equal variances contract through the
    /// metric or its inverse; opposite variances contract directly.
    pub fn trace(&self, t: &Tensor<S>, a: usize, b: usize) -> Result<Tensor<S>, WorkbenchError> {
        if t.variance()[a] == t.variance()[b] {
            let flipped = self.flip_slot(t, a, t.variance()[a])?;
            flipped.self_contract(a, b)
        } else {
            t.self_contract(a, b)
        }
    }

    /// Riemann tensor R^e_{mab} with slots (e, m, a, b).
    pub fn riemann(&self) -> Result<Tensor<S>, WorkbenchError> {
        let n = self.dim();
        let dgamma = self.partial(&self.christoffel)?; // dgamma[a, e, b, m]
        let gamma = &self.christoffel;
        let variance = [Variance::Up, Variance::Down, Variance::Down, Variance::Down];
        Tensor::from_fn(n, &variance, |idx| {
            let (e, m, a, b) = (idx[0], idx[1], idx[2], idx[3]);
            let mut val = dgamma.get(&[a, e, b, m]).sub(dgamma.get(&[b, e, a, m]))?;
            for l in 0..n {
                let t1 = gamma.get(&[e, a, l]);
                let u1 = gamma.get(&[l, b, m]);
                if !t1.is_zero() && !u1.is_zero() {
                    val = val.add(&t1.mul(u1)?)?;
                }
                let t2 = gamma.get(&[e, b, l]);
                let u2 = gamma.get(&[l, a, m]);
                if !t2.is_zero() && !u2.is_zero() {
                    val = val.sub(&t2.mul(u2)?)?;
                }
            }
            Ok(val)
        })
    }

    /// Fully covariant Riemann tensor R_{emab} = g_{ek} R^k_{mab}.
    pub fn riemann_lowered(&self) -> Result<Tensor<S>, WorkbenchError> {
        self.lower(&self.riemann()?, 0)
    }

    /// Ricci tensor Ric_{mb} = R^a_{mab}.
    pub fn ricci(&self) -> Result<Tensor<S>, WorkbenchError> {
        self.ricci_from(&self.riemann()?)
    }

    /// Ricci from an already computed Riemann tensor.
    pub fn ricci_from(&self, riemann: &Tensor<S>) -> Result<Tensor<S>, WorkbenchError> {
        riemann.self_contract(0, 2)
    }

    pub fn scalar_curvature(&self) -> Result<S, WorkbenchError> {
        self.scalar_from(&self.ricci()?)
    }

    pub fn scalar_from(&self, ricci: &Tensor<S>) -> Result<S, WorkbenchError> {
        Ok(self.trace(ricci, 0, 1)?.get(&[]).clone())
    }

    /// Rough Laplacian: metric trace of the two derivative slots of the
    /// second covariant derivative.
    pub fn laplacian(&self, t: &Tensor<S>) -> Result<Tensor<S>, WorkbenchError> {
        let dd = self.covariant_derivative(&self.covariant_derivative(t)?)?;
        self.trace(&dd, 0, 1)
    }

    /// l-fold rough Laplacian.
    pub fn laplacian_power(&self, t: &Tensor<S>, l: usize) -> Result<Tensor<S>, WorkbenchError> {
        let mut out = t.clone();
        for _ in 0..l {
            out = self.laplacian(&out)?;
        }
        Ok(out)
    }

    /// Principal power of the coordinate Laplacian, acting componentwise:
    /// all 2l coordinate derivatives are taken first and the l inverse
    /// metrics multiply from outside.  Since partial derivatives commute
    /// the pairing of slots does not matter.  For l = 1 this is the wave
    /// operator g^{ab} d_a d_b applied to each component.
    pub fn principal_laplacian_power(
        &self,
        t: &Tensor<S>,
        l: usize,
    ) -> Result<Tensor<S>, WorkbenchError> {
        let n = self.dim();
        let mut out = Tensor::zeros(n, t.variance(), t.proto());
        for idx in indices(n, t.rank()) {
            let mut d = Tensor::rank0(n, t.get(&idx).clone());
            for _ in 0..(2 * l) {
                d = self.partial(&d)?;
            }
            for _ in 0..l {
                d = self.trace(&d, 0, 1)?;
            }
            out.set(&idx, d.get(&[]).clone());
        }
        Ok(out)
    }

    /// Schouten tensor P = (Ric - S g / (2(n-1))) / (n-2); needs n >= 3.
    pub fn schouten(&self) -> Result<Tensor<S>, WorkbenchError> {
        let n = self.dim();
        if n < 3 {
            return Err(WorkbenchError::Precondition(
                "the Schouten tensor needs dimension at least 3".to_string(),
            ));
        }
        let ric = self.ricci()?;
        self.schouten_from(&ric)
    }

    pub fn schouten_from(&self, ricci: &Tensor<S>) -> Result<Tensor<S>, WorkbenchError> {
        let n = self.dim() as i64;
        if n < 3 {
            return Err(WorkbenchError::Precondition(
                "the Schouten tensor needs dimension at least 3".to_string(),
            ));
        }
        let s = self.scalar_from(ricci)?;
        let sg = self.metric.scale(&s)?.scale_frac(1, 2 * (n - 1));
        Ok(ricci.sub(&sg)?.scale_frac(1, n - 2))
    }

    /// Weyl tensor, fully covariant:
    /// W_{abcd} = R_{abcd} - g_{ac} P_{bd} - g_{bd} P_{ac}
    ///                     + g_{ad} P_{bc} + g_{bc} P_{ad}.
    pub fn weyl(&self) -> Result<Tensor<S>, WorkbenchError> {
        let rl = self.riemann_lowered()?;
        let p = self.schouten()?;
        self.weyl_from(&rl, &p)
    }

    pub fn weyl_from(
        &self,
        riemann_lowered: &Tensor<S>,
        schouten: &Tensor<S>,
    ) -> Result<Tensor<S>, WorkbenchError> {
        let n = self.dim();
        let g = &self.metric;
        let variance = [Variance::Down; 4];
        Tensor::from_fn(n, &variance, |idx| {
            let (a, b, c, d) = (idx[0], idx[1], idx[2], idx[3]);
            let mut val = riemann_lowered.get(idx).clone();
            val = val.sub(&g.get(&[a, c]).mul(schouten.get(&[b, d]))?)?;
            val = val.sub(&g.get(&[b, d]).mul(schouten.get(&[a, c]))?)?;
            val = val.add(&g.get(&[a, d]).mul(schouten.get(&[b, c]))?)?;
            val = val.add(&g.get(&[b, c]).mul(schouten.get(&[a, d]))?)?;
            Ok(val)
        })
    }

    /// Cotton tensor C_{ijk} = nabla_k P_{ij} - nabla_j P_{ik}.
    pub fn cotton(&self) -> Result<Tensor<S>, WorkbenchError> {
        let p = self.schouten()?;
        self.cotton_from(&p)
    }

    pub fn cotton_from(&self, schouten: &Tensor<S>) -> Result<Tensor<S>, WorkbenchError> {
        let dp = self.covariant_derivative(schouten)?; // dp[k, i, j]
        let n = self.dim();
        Tensor::from_fn(n, &[Variance::Down; 3], |idx| {
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            Ok(dp.get(&[k, i, j]).sub(dp.get(&[j, i, k]))?)
        })
    }

    /// Removes the metric trace of a symmetric 2-tensor:
    /// tf(t) = t - (tr_g t / n) g.
    pub fn trace_free_part(&self, t: &Tensor<S>) -> Result<Tensor<S>, WorkbenchError> {
        let n = self.dim() as i64;
        let tr = self.trace(t, 0, 1)?.get(&[]).clone();
        t.sub(&self.metric.scale(&tr)?.scale_frac(1, n))
    }

    /// Divergence on the given slot: (div T)_rest = g^{cs} nabla_c T_{..s..}.
    pub fn divergence(&self, t: &Tensor<S>, slot: usize) -> Result<Tensor<S>, WorkbenchError> {
        let cov = self.covariant_derivative(t)?;
        self.trace(&cov, 0, slot + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_scalar, ScalarExpr, VarTable};

    fn hyperbolic(n: usize) -> Geometry<ScalarExpr> {
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let vars = VarTable::new(&refs);
        let chart = Chart::of_all(&vars);
        let x0 = ScalarExpr::var(&vars, 0);
        let w = x0.pow(-2).unwrap();
        let mut g = Tensor::zeros(n, &[Variance::Down, Variance::Down], &w);
        for i in 0..n {
            g.set(&[i, i], w.clone());
        }
        Geometry::new(chart, g).unwrap()
    }

    /// Unit round sphere of dimension m in the rational stereographic
    /// chart: g = 4 delta / (1 + |y|^2)^2.
    fn sphere(m: usize) -> Geometry<ScalarExpr> {
        let names: Vec<String> = (0..m).map(|i| format!("y{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let vars = VarTable::new(&refs);
        let chart = Chart::of_all(&vars);
        let mut r2 = ScalarExpr::one(&vars);
        for i in 0..m {
            r2 = r2.add(&ScalarExpr::var(&vars, i).pow(2).unwrap()).unwrap();
        }
        let w = r2.pow(-2).unwrap().mul_rational(&num::rational::BigRational::from_integer(4.into()));
        let mut g = Tensor::zeros(m, &[Variance::Down, Variance::Down], &w);
        for i in 0..m {
            g.set(&[i, i], w.clone());
        }
        Geometry::new(chart, g).unwrap()
    }

    /// A dense non-diagonal polynomial metric on a 3-chart, small enough
    /// that rank-4 covariant calculus stays quick.
    fn bumpy3() -> Geometry<ScalarExpr> {
        let vars = VarTable::new(&["x0", "x1", "x2"]);
        let chart = Chart::of_all(&vars);
        let e = |s: &str| parse_scalar(&vars, s).unwrap();
        let comps = vec![
            e("1 + x1"), e("x2/2"), e("0"),
            e("x2/2"), e("2 + x0"), e("x0/3"),
            e("0"), e("x0/3"), e("3 + x1"),
        ];
        let g = Tensor::from_components(3, &[Variance::Down, Variance::Down], comps).unwrap();
        Geometry::new(chart, g).unwrap()
    }

    #[test]
    fn hyperbolic_space_is_einstein() {
        let geom = hyperbolic(4);
        let ric = geom.ricci().unwrap();
        let want = geom.metric().scale_frac(-3, 1);
        assert_eq!(ric, want);
        let s = geom.scalar_curvature().unwrap();
        assert_eq!(s.to_string(), "-12");
    }

    #[test]
    fn hyperbolic_christoffel_components() {
        let geom = hyperbolic(3);
        let gamma = geom.christoffel();
        let vars = geom.chart().vars().clone();
        let minus_inv = parse_scalar(&vars, "-1/x0").unwrap();
        let inv = parse_scalar(&vars, "1/x0").unwrap();
        assert_eq!(gamma.get(&[0, 0, 0]), &minus_inv);
        assert_eq!(gamma.get(&[0, 1, 1]), &inv);
        assert_eq!(gamma.get(&[0, 2, 2]), &inv);
        assert_eq!(gamma.get(&[1, 0, 1]), &minus_inv);
        assert_eq!(gamma.get(&[2, 0, 2]), &minus_inv);
        assert!(gamma.get(&[1, 1, 1]).is_zero());
        assert!(gamma.get(&[0, 1, 2]).is_zero());
    }

    #[test]
    fn sphere_curvature_normalizations() {
        let geom = sphere(3);
        let s = geom.scalar_curvature().unwrap();
        assert_eq!(s.to_string(), "6");
        let ric = geom.ricci().unwrap();
        assert_eq!(ric, geom.metric().scale_frac(2, 1));

        // constant curvature: R_{abcd} = g_{ac} g_{bd} - g_{ad} g_{bc}
        let rl = geom.riemann_lowered().unwrap();
        let g = geom.metric();
        for idx in indices(3, 4) {
            let (a, b, c, d) = (idx[0], idx[1], idx[2], idx[3]);
            let want = g
                .get(&[a, c])
                .mul(g.get(&[b, d]))
                .unwrap()
                .sub(&g.get(&[a, d]).mul(g.get(&[b, c])).unwrap())
                .unwrap();
            assert_eq!(rl.get(&idx), &want, "component {idx:?}");
        }
    }

    #[test]
    fn metric_is_parallel() {
        let geom = bumpy3();
        let dg = geom.covariant_derivative(geom.metric()).unwrap();
        assert!(dg.is_zero());
        let dginv = geom.covariant_derivative(geom.inverse_metric()).unwrap();
        assert!(dginv.is_zero());
    }

    #[test]
    fn contracted_bianchi_identity() {
        let geom = bumpy3();
        let ric = geom.ricci().unwrap();
        let div = geom.divergence(&ric, 0).unwrap();
        let s = geom.scalar_from(&ric).unwrap();
        for b in 0..3 {
            let ds = s.diff(geom.chart().coord_var(b)).unwrap().mul_frac(1, 2);
            assert_eq!(div.get(&[b]), &ds, "slot {b}");
        }
    }

    #[test]
    fn weyl_is_totally_trace_free() {
        let geom = bumpy3();
        let w = geom.weyl().unwrap();
        assert!(geom.trace(&w, 0, 2).unwrap().is_zero());
        assert!(geom.trace(&w, 1, 3).unwrap().is_zero());
        assert!(geom.trace(&w, 0, 1).unwrap().is_zero());
    }

    #[test]
    fn cotton_antisymmetry_and_trace() {
        let geom = bumpy3();
        let c = geom.cotton().unwrap();
        assert!(c.add(&c.swap_slots(1, 2)).unwrap().is_zero());
        assert!(geom.trace(&c, 0, 1).unwrap().is_zero());
    }

    #[test]
    fn principal_power_matches_iterated_trace_on_scalars() {
        let geom = bumpy3();
        let vars = geom.chart().vars().clone();
        let f = parse_scalar(&vars, "x0^3*x1 + x2^2*x0 - x1^4").unwrap();
        let t = Tensor::rank0(3, f);
        // l = 1 agrees with the rough Laplacian up to first-order terms
        // only at critical points, but the pairing independence of the
        // principal power is unconditional: trace slots (0,1)(2,3) versus
        // (0,2)(1,3) of the fourth derivative array.
        let mut d = t.clone();
        for _ in 0..4 {
            d = geom.partial(&d).unwrap();
        }
        let a = geom
            .trace(&geom.trace(&d, 0, 1).unwrap(), 0, 1)
            .unwrap();
        let d2 = d.swap_slots(1, 2);
        let b = geom
            .trace(&geom.trace(&d2, 0, 1).unwrap(), 0, 1)
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(geom.principal_laplacian_power(&t, 2).unwrap(), a);
    }

    #[test]
    fn schouten_trace_normalization() {
        // tr_g P = S / (2(n-1))
        let geom = bumpy3();
        let p = geom.schouten().unwrap();
        let tr = geom.trace(&p, 0, 1).unwrap().get(&[]).clone();
        let s = geom.scalar_curvature().unwrap();
        assert_eq!(tr, s.mul_frac(1, 4));
    }

    #[test]
    fn degenerate_metric_is_rejected() {
        let vars = VarTable::new(&["x0", "x1"]);
        let chart = Chart::of_all(&vars);
        let x0 = ScalarExpr::var(&vars, 0);
        let comps = vec![x0.clone(), x0.clone(), x0.clone(), x0.clone()];
        let g = Tensor::from_components(2, &[Variance::Down, Variance::Down], comps).unwrap();
        match Geometry::new(chart, g) {
            Err(WorkbenchError::DegenerateMetric) => {}
            other => panic!("expected a degenerate metric error, got {other:?}"),
        }
    }

    #[test]
    fn asymmetric_metric_is_rejected() {
        let vars = VarTable::new(&["x0", "x1"]);
        let chart = Chart::of_all(&vars);
        let e = |s: &str| parse_scalar(&vars, s).unwrap();
        let comps = vec![e("1"), e("x0"), e("x1"), e("1")];
        let g = Tensor::from_components(2, &[Variance::Down, Variance::Down], comps).unwrap();
        assert!(matches!(
            Geometry::new(chart, g),
            Err(WorkbenchError::NotSymmetric(_))
        ));
    }
}
