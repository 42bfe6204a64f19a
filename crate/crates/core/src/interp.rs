//! Lagrange interpolation and derivative functionals on small node sets.

use crate::poly::RealPoly;
use crate::scalar::Scalar;

/// Lagrange basis `ℓ_n` for the given distinct nodes.
pub fn lagrange_basis<T: Scalar>(nodes: &[T]) -> Vec<RealPoly<T>> {
    (0..nodes.len())
        .map(|n| {
            let mut num = RealPoly::one();
            let mut den = T::one();
            for (j, xj) in nodes.iter().enumerate() {
                if j != n {
                    num = &num * &RealPoly::linear(-xj.clone(), T::one());
                    den = den * (nodes[n].clone() - xj.clone());
                }
            }
            num.scale(&(T::one() / den))
        })
        .collect()
}

/// `ℓ_n^{(order)}` as polynomials in the evaluation point.
pub fn derivative_weight_polys<T: Scalar>(nodes: &[T], order: usize) -> Vec<RealPoly<T>> {
    lagrange_basis(nodes)
        .into_iter()
        .map(|l| l.nth_derivative(order))
        .collect()
}

/// Weights `w` with `Σ w_n f(nodes[n]) = f^{(order)}(point)` for every
/// polynomial `f` of degree below `nodes.len()`.
pub fn derivative_weights<T: Scalar>(nodes: &[T], point: &T, order: usize) -> Vec<T> {
    derivative_weight_polys(nodes, order)
        .iter()
        .map(|p| p.eval(point))
        .collect()
}

/// The unique polynomial of degree below `nodes.len()` through the samples.
pub fn interpolate<T: Scalar>(nodes: &[T], values: &[T]) -> RealPoly<T> {
    assert_eq!(nodes.len(), values.len());
    lagrange_basis(nodes)
        .iter()
        .zip(values)
        .fold(RealPoly::zero(), |acc, (l, v)| &acc + &l.scale(v))
}

/// Integer nodes `0, 1, …, count-1` as scalars.
pub fn integer_nodes<T: Scalar>(count: usize) -> Vec<T> {
    (0..count).map(|i| T::int(i as i64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    #[test]
    fn recovers_cubic_and_its_derivatives() {
        let f = RealPoly::<BigRational>::new(vec![
            BigRational::int(2),
            BigRational::ratio(-1, 3),
            BigRational::int(0),
            BigRational::int(5),
        ]);
        let nodes = integer_nodes::<BigRational>(4);
        let vals: Vec<_> = nodes.iter().map(|x| f.eval(x)).collect();
        assert_eq!(interpolate(&nodes, &vals), f);
        let point = BigRational::ratio(7, 2);
        for order in 0..4 {
            let w = derivative_weights(&nodes, &point, order);
            let got = w
                .iter()
                .zip(&vals)
                .fold(BigRational::int(0), |a, (w, v)| a + w.clone() * v.clone());
            assert_eq!(got, f.nth_derivative(order).eval(&point));
        }
    }
}
