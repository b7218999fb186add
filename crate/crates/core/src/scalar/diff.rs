use std::sync::Arc;

use super::poly::from_poly;
use super::ScalarExpr;

impl ScalarExpr {
    /// Exact partial derivative with respect to the symbol `x`, simplified.
    pub fn diff(&self, x: &str) -> ScalarExpr {
        from_poly(Arc::new(self.poly().diff(x)))
    }

    /// Repeated partial derivative.
    pub fn diff_n(&self, x: &str, n: usize) -> ScalarExpr {
        let mut e = self.simplify();
        for _ in 0..n {
            e = e.diff(x);
        }
        e
    }
}
