//! Geodesic-form expansion over the round sphere.  The hyperbolic ball
//! compactifies to (1 - ρ²/4)² h over the round conformal infinity h, so
//! the recursion must reproduce that series exactly: g⁽¹⁾ = 0 and
//! g⁽²⁾ = -h/2 in every dimension, plus g⁽³⁾ = 0 and g⁽⁴⁾ = h/16 once
//! the bulk dimension allows order four.

use fglab::expr::parse_scalar;
use fglab::fg::fg_expand;
use fglab::{Chart, Geometry, ScalarExpr, Tensor, VarTable, Variance, WorkbenchError};

/// Stereographic round metric 4 δ_ij / (1 + |x|²)² on m coordinates.
fn round_sphere(m: usize) -> Result<Geometry<ScalarExpr>, WorkbenchError> {
    let names: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let vars = VarTable::new(&refs);
    let sum: Vec<String> = (1..=m).map(|i| format!("x{i}^2")).collect();
    let w = parse_scalar(&vars, &format!("4/(1 + {})^2", sum.join(" + ")))?;
    let zero = ScalarExpr::zero(&vars);
    let mut h = Tensor::zeros(m, &[Variance::Down, Variance::Down], &zero);
    for a in 0..m {
        h.set(&[a, a], w.clone());
    }
    Geometry::new(Chart::of_all(&vars), h)
}

fn main() -> Result<(), WorkbenchError> {
    for (n, order) in [(4usize, 2usize), (6, 4)] {
        let h = round_sphere(n - 1)?;
        let expansion = fg_expand(&h, n, order)?;
        println!("bulk dimension {n}, expansion through order {order}");

        let g2 = expansion.coefficient(2);
        let model2 = h.metric().scale_frac(-1, 2);
        println!("  g(1) = 0:    {}", expansion.coefficient(1).is_zero());
        println!("  g(2) = -h/2: {}", g2.sub(&model2)?.is_zero());
        assert!(expansion.coefficient(1).is_zero());
        assert!(g2.sub(&model2)?.is_zero());

        if order >= 4 {
            let g4 = expansion.coefficient(4);
            let model4 = h.metric().scale_frac(1, 16);
            println!("  g(3) = 0:    {}", expansion.coefficient(3).is_zero());
            println!("  g(4) = h/16: {}", g4.sub(&model4)?.is_zero());
            assert!(expansion.coefficient(3).is_zero());
            assert!(g4.sub(&model4)?.is_zero());
        }
    }
    println!("the recursion reproduces the exact hyperbolic-ball series");
    Ok(())
}
