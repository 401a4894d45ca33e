//! The hyperbolic half-space metric g = (dx0² + ... + dx_{n-1}²)/x0² is
//! the model conformally compact Einstein metric: Ric(g) = -(n-1) g with
//! scalar curvature -n(n-1).  Both identities are verified exactly here,
//! in dimensions four and six.

use fglab::expr::parse_scalar;
use fglab::{Chart, Geometry, Scalar, ScalarExpr, Tensor, VarTable, Variance, WorkbenchError};

fn hyperbolic(n: usize) -> Result<Geometry<ScalarExpr>, WorkbenchError> {
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let vars = VarTable::new(&refs);
    let zero = ScalarExpr::zero(&vars);
    let mut g = Tensor::zeros(n, &[Variance::Down, Variance::Down], &zero);
    for a in 0..n {
        g.set(&[a, a], parse_scalar(&vars, "1/x0^2")?);
    }
    Geometry::new(Chart::of_all(&vars), g)
}

fn main() -> Result<(), WorkbenchError> {
    for n in [4usize, 6] {
        let geom = hyperbolic(n)?;
        let k = n as i64;
        let einstein = geom.ricci()?.add(&geom.metric().scale_frac(k - 1, 1))?;
        let scalar = geom.scalar_curvature()?;
        let expected = ScalarExpr::one(geom.chart().vars()).mul_int(-k * (k - 1));

        println!("dimension {n}");
        println!("  Ric + (n-1) g = 0 holds: {}", einstein.is_zero());
        println!("  scalar curvature: {scalar} (expected {expected})");
        assert!(einstein.is_zero());
        assert!(scalar == expected);
    }
    println!("the half-space model is Einstein with the standard normalization");
    Ok(())
}
