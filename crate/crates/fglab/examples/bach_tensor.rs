//! The Bach tensor through its two textbook formulas: divergence of the
//! Cotton tensor plus a Weyl-Schouten coupling, and the double divergence
//! of the Weyl tensor form.  The routes are computed independently and
//! agree on an anisotropic metric; on a conformal rescaling of the
//! hyperbolic metric the tensor vanishes, since hyperbolic space is
//! Einstein and the Bach tensor is a conformal invariant in dimension
//! four.

use fglab::expr::parse_scalar;
use fglab::obstruction::{bach, bach_via_cotton, bach_via_weyl};
use fglab::{Chart, Geometry, ScalarExpr, Tensor, VarTable, Variance, WorkbenchError};

fn diagonal(entries: &[&str]) -> Result<Geometry<ScalarExpr>, WorkbenchError> {
    let n = entries.len();
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let vars = VarTable::new(&refs);
    let zero = ScalarExpr::zero(&vars);
    let mut g = Tensor::zeros(n, &[Variance::Down, Variance::Down], &zero);
    for (a, e) in entries.iter().enumerate() {
        g.set(&[a, a], parse_scalar(&vars, e)?);
    }
    Geometry::new(Chart::of_all(&vars), g)
}

fn main() -> Result<(), WorkbenchError> {
    // Anisotropic polynomial metric with a nonzero Bach tensor.
    let geom = diagonal(&["1", "x0^2", "x0^4", "x0^6"])?;
    let via_weyl = bach_via_weyl(&geom)?;
    let via_cotton = bach_via_cotton(&geom)?;
    println!("anisotropic metric diag(1, x0^2, x0^4, x0^6)");
    println!("  routes agree:       {}", via_weyl.sub(&via_cotton)?.is_zero());
    println!("  tensor is nonzero:  {}", !via_weyl.is_zero());
    assert!(via_weyl.sub(&via_cotton)?.is_zero());
    assert!(!via_weyl.is_zero());

    // Conformal rescalings of an Einstein metric stay conformally
    // Einstein, so the Bach tensor must vanish for every factor.
    for factor in ["x0", "1 + x1^2", "2 + x2^2"] {
        let hyp = diagonal(&["1/x0^2", "1/x0^2", "1/x0^2", "1/x0^2"])?;
        let phi = parse_scalar(hyp.chart().vars(), factor)?;
        let rescaled = hyp.metric().scale(&phi.mul(&phi)?)?;
        let conf = Geometry::new(hyp.chart().clone(), rescaled)?;
        let b = bach(&conf)?;
        println!("conformal factor {factor}: Bach = 0 holds: {}", b.is_zero());
        assert!(b.is_zero());
    }
    println!("both routes agree and conformally Einstein metrics are Bach-flat");
    Ok(())
}
