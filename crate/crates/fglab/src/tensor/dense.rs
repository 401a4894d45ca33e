//! Dense tensors with per-slot variance.

use std::fmt;

use super::field::Scalar;
use crate::error::WorkbenchError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Up,
    Down,
}

impl Variance {
    pub fn flip(self) -> Self {
        match self {
            Variance::Up => Variance::Down,
            Variance::Down => Variance::Up,
        }
    }
}

/// A dense tensor of rank `variance.len()` on a chart of dimension `dim`.
/// Components are stored row-major; the slot list records which indices are
/// contravariant.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<S> {
    dim: usize,
    variance: Vec<Variance>,
    comps: Vec<S>,
}

/// Iterates over all multi-indices of the given rank in row-major order.
pub fn indices(dim: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = dim.checked_pow(rank as u32).expect("index space overflow");
    (0..total).map(move |mut flat| {
        let mut idx = vec![0usize; rank];
        for slot in (0..rank).rev() {
            idx[slot] = flat % dim;
            flat /= dim;
        }
        idx
    })
}

impl<S: Scalar> Tensor<S> {
    pub fn zeros(dim: usize, variance: &[Variance], proto: &S) -> Self {
        let total = dim.pow(variance.len() as u32);
        Tensor {
            dim,
            variance: variance.to_vec(),
            comps: vec![proto.zero_like(); total],
        }
    }

    pub fn from_components(
        dim: usize,
        variance: &[Variance],
        comps: Vec<S>,
    ) -> Result<Self, WorkbenchError> {
        let want = dim.pow(variance.len() as u32);
        if comps.len() != want {
            return Err(WorkbenchError::Shape(format!(
                "expected {want} components for rank {} in dimension {dim}, got {}",
                variance.len(),
                comps.len()
            )));
        }
        Ok(Tensor { dim, variance: variance.to_vec(), comps })
    }

    pub fn from_fn<F>(
        dim: usize,
        variance: &[Variance],
        mut f: F,
    ) -> Result<Self, WorkbenchError>
    where
        F: FnMut(&[usize]) -> Result<S, WorkbenchError>,
    {
        let mut comps = Vec::with_capacity(dim.pow(variance.len() as u32));
        for idx in indices(dim, variance.len()) {
            comps.push(f(&idx)?);
        }
        Ok(Tensor { dim, variance: variance.to_vec(), comps })
    }

    /// Rank-zero tensor on a chart of the given dimension.
    pub fn rank0(dim: usize, value: S) -> Self {
        Tensor { dim, variance: Vec::new(), comps: vec![value] }
    }

    /// Componentwise conversion into another scalar type.
    pub fn convert<T, F>(&self, mut f: F) -> Result<Tensor<T>, WorkbenchError>
    where
        T: Scalar,
        F: FnMut(&S) -> Result<T, WorkbenchError>,
    {
        let comps = self.comps.iter().map(|c| f(c)).collect::<Result<Vec<_>, _>>()?;
        Ok(Tensor { dim: self.dim, variance: self.variance.clone(), comps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn proto(&self) -> &S {
        &self.comps[0]
    }

    fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        let mut f = 0;
        for &i in idx {
            debug_assert!(i < self.dim);
            f = f * self.dim + i;
        }
        f
    }

    pub fn get(&self, idx: &[usize]) -> &S {
        &self.comps[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: S) {
        let f = self.flat(idx);
        self.comps[f] = value;
    }

    pub fn components(&self) -> &[S] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn same_shape(&self, other: &Self) -> Result<(), WorkbenchError> {
        if self.dim != other.dim || self.variance != other.variance {
            return Err(WorkbenchError::Shape(format!(
                "operands differ: dim {} variance {:?} vs dim {} variance {:?}",
                self.dim, self.variance, other.dim, other.variance
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, WorkbenchError> {
        self.same_shape(other)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Tensor { dim: self.dim, variance: self.variance.clone(), comps })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, WorkbenchError> {
        self.same_shape(other)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Tensor { dim: self.dim, variance: self.variance.clone(), comps })
    }

    pub fn neg(&self) -> Self {
        Tensor {
            dim: self.dim,
            variance: self.variance.clone(),
            comps: self.comps.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Result<Self, WorkbenchError> {
        let comps = self
            .comps
            .iter()
            .map(|c| c.mul(s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Tensor { dim: self.dim, variance: self.variance.clone(), comps })
    }

    pub fn scale_rational(&self, k: &num::rational::BigRational) -> Self {
        Tensor {
            dim: self.dim,
            variance: self.variance.clone(),
            comps: self.comps.iter().map(|c| c.mul_rational(k)).collect(),
        }
    }

    pub fn scale_frac(&self, p: i64, q: i64) -> Self {
        self.scale_rational(&num::rational::BigRational::new(p.into(), q.into()))
    }

    pub fn map<F>(&self, mut f: F) -> Result<Self, WorkbenchError>
    where
        F: FnMut(&S) -> Result<S, WorkbenchError>,
    {
        let comps = self.comps.iter().map(|c| f(c)).collect::<Result<Vec<_>, _>>()?;
        Ok(Tensor { dim: self.dim, variance: self.variance.clone(), comps })
    }

    /// Swaps two slots (components and variance flags).
    pub fn swap_slots(&self, a: usize, b: usize) -> Self {
        if a == b {
            return self.clone();
        }
        let mut variance = self.variance.clone();
        variance.swap(a, b);
        let mut out = Tensor {
            dim: self.dim,
            variance,
            comps: vec![self.comps[0].zero_like(); self.comps.len()],
        };
        for idx in indices(self.dim, self.rank()) {
            let mut src = idx.clone();
            src.swap(a, b);
            out.set(&idx, self.get(&src).clone());
        }
        out
    }

    /// Contracts slot `a` against slot `b` of the same tensor.  The slots
    /// must carry opposite variance; the result drops both.
    pub fn self_contract(&self, a: usize, b: usize) -> Result<Self, WorkbenchError> {
        if a == b || a >= self.rank() || b >= self.rank() {
            return Err(WorkbenchError::Shape(format!(
                "cannot contract slots {a} and {b} of a rank {} tensor",
                self.rank()
            )));
        }
        if self.variance[a] == self.variance[b] {
            return Err(WorkbenchError::Shape(
                "contraction needs one upper and one lower slot".to_string(),
            ));
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let mut variance = self.variance.clone();
        variance.remove(hi);
        variance.remove(lo);
        let mut out = Tensor {
            dim: self.dim,
            variance,
            comps: vec![self.comps[0].zero_like(); self.dim.pow((self.rank() - 2) as u32)],
        };
        for idx in indices(self.dim, self.rank() - 2) {
            let mut acc = self.comps[0].zero_like();
            for m in 0..self.dim {
                let mut full = idx.clone();
                full.insert(lo, m);
                full.insert(hi, m);
                acc = acc.add(self.get(&full))?;
            }
            out.set(&idx, acc);
        }
        Ok(out)
    }

    /// Tensor product followed by contraction of `self_slot` (of `self`)
    /// against `other_slot` (of `other`), which must carry opposite
    /// variance.  Result slots: the remaining slots of `self`, then the
    /// remaining slots of `other`.
    pub fn contract(
        &self,
        other: &Self,
        self_slot: usize,
        other_slot: usize,
    ) -> Result<Self, WorkbenchError> {
        if self.dim != other.dim {
            return Err(WorkbenchError::Shape("dimension mismatch".to_string()));
        }
        if self_slot >= self.rank() || other_slot >= other.rank() {
            return Err(WorkbenchError::Shape("contraction slot out of range".to_string()));
        }
        if self.variance[self_slot] == other.variance[other_slot] {
            return Err(WorkbenchError::Shape(
                "contraction needs one upper and one lower slot".to_string(),
            ));
        }
        let mut variance: Vec<Variance> = Vec::new();
        for (k, &v) in self.variance.iter().enumerate() {
            if k != self_slot {
                variance.push(v);
            }
        }
        for (k, &v) in other.variance.iter().enumerate() {
            if k != other_slot {
                variance.push(v);
            }
        }
        let left_rank = self.rank() - 1;
        let out_rank = variance.len();
        let mut out = Tensor {
            dim: self.dim,
            variance,
            comps: vec![self.comps[0].zero_like(); self.dim.pow(out_rank as u32)],
        };
        for idx in indices(self.dim, out_rank) {
            let mut acc = self.comps[0].zero_like();
            for m in 0..self.dim {
                let mut left = idx[..left_rank].to_vec();
                left.insert(self_slot, m);
                let mut right = idx[left_rank..].to_vec();
                right.insert(other_slot, m);
                let term = self.get(&left).mul(other.get(&right))?;
                acc = acc.add(&term)?;
            }
            out.set(&idx, acc);
        }
        Ok(out)
    }

    /// T + T^swap over the two slots, without the half.
    pub fn sym_pair_sum(&self, a: usize, b: usize) -> Result<Self, WorkbenchError> {
        self.add(&self.swap_slots(a, b))
    }
}

impl<S: Scalar> fmt::Display for Tensor<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rank() == 0 {
            return write!(f, "{}", self.comps[0]);
        }
        let mut any = false;
        for idx in indices(self.dim, self.rank()) {
            let c = self.get(&idx);
            if c.is_zero() {
                continue;
            }
            let marks: Vec<String> = idx
                .iter()
                .zip(&self.variance)
                .map(|(i, v)| match v {
                    Variance::Up => format!("^{i}"),
                    Variance::Down => format!("_{i}"),
                })
                .collect();
            writeln!(f, "[{}] = {}", marks.join(""), c)?;
            any = true;
        }
        if !any {
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{ScalarExpr, VarTable};

    #[test]
    fn contraction_traces_identity() {
        let v = VarTable::new(&["x0", "x1", "x2"]);
        let one = ScalarExpr::one(&v);
        let mut id = Tensor::zeros(3, &[Variance::Up, Variance::Down], &one);
        for i in 0..3 {
            id.set(&[i, i], one.clone());
        }
        let tr = id.self_contract(0, 1).unwrap();
        assert_eq!(tr.rank(), 0);
        assert_eq!(tr.get(&[]).to_string(), "3");
    }

    #[test]
    fn contract_is_matrix_product() {
        let v = VarTable::new(&["x0"]);
        let c = |k: i64| ScalarExpr::from_int(&v, k);
        let a = Tensor::from_components(
            2,
            &[Variance::Down, Variance::Up],
            vec![c(1), c(2), c(3), c(4)],
        )
        .unwrap();
        let b = Tensor::from_components(
            2,
            &[Variance::Down, Variance::Down],
            vec![c(5), c(6), c(7), c(8)],
        )
        .unwrap();
        // (a b)_{i j} = a_i^m b_{m j}
        let ab = a.contract(&b, 1, 0).unwrap();
        assert_eq!(ab.get(&[0, 0]).to_string(), "19");
        assert_eq!(ab.get(&[0, 1]).to_string(), "22");
        assert_eq!(ab.get(&[1, 0]).to_string(), "43");
        assert_eq!(ab.get(&[1, 1]).to_string(), "50");
    }

    #[test]
    fn swap_slots_transposes() {
        let v = VarTable::new(&["x0"]);
        let c = |k: i64| ScalarExpr::from_int(&v, k);
        let a = Tensor::from_components(
            2,
            &[Variance::Down, Variance::Down],
            vec![c(1), c(2), c(3), c(4)],
        )
        .unwrap();
        let t = a.swap_slots(0, 1);
        assert_eq!(t.get(&[0, 1]).to_string(), "3");
        assert_eq!(t.get(&[1, 0]).to_string(), "2");
    }
}
