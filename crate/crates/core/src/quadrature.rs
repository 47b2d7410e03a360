//! Quadrature rules on simplices in barycentric form.
//!
//! Weights are normalised to sum to one; multiply by the simplex measure.

/// Quadrature rule on a `d`-simplex: barycentric points (length `d + 1`) and weights.
#[derive(Debug, Clone)]
pub struct SimplexRule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// 4-point rule on the tetrahedron, exact for polynomials of degree 2.
pub fn tet_order2() -> ([[f64; 4]; 4], [f64; 4]) {
    let a = 0.585_410_196_624_968_5;
    let b = 0.138_196_601_125_010_5;
    (
        [[a, b, b, b], [b, a, b, b], [b, b, a, b], [b, b, b, a]],
        [0.25; 4],
    )
}

/// 3-point rule on the triangle, exact for polynomials of degree 2.
pub fn tri_order2() -> ([[f64; 3]; 3], [f64; 3]) {
    let a = 2.0 / 3.0;
    let b = 1.0 / 6.0;
    ([[a, b, b], [b, a, b], [b, b, a]], [1.0 / 3.0; 3])
}

/// Grundmann–Möller rule on the `dim`-simplex, exact for degree `2s + 1`.
pub fn grundmann_moller(dim: usize, s: usize) -> SimplexRule {
    let n = dim as i64;
    let d = 2 * s as i64 + 1;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for i in 0..=s as i64 {
        let denom = (d + n - 2 * i) as f64;
        // (-1)^i 2^{-2s} (d+n-2i)^d / (i! (d+n-i)!)
        let mut w = if i % 2 == 0 { 1.0 } else { -1.0 };
        w *= 2f64.powi(-2 * s as i32);
        w *= denom.powi(d as i32);
        w /= factorial(i) * factorial(d + n - i);
        // scale by n! so weights sum to one on the unit simplex
        w *= factorial(n);
        for beta in compositions(s as i64 - i, dim + 1) {
            let p: Vec<f64> = beta.iter().map(|&b| (2 * b + 1) as f64 / denom).collect();
            points.push(p);
            weights.push(w);
        }
    }
    SimplexRule { points, weights }
}

fn factorial(k: i64) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// All vectors of `parts` non-negative integers summing to `total`.
fn compositions(total: i64, parts: usize) -> Vec<Vec<i64>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// ∫ over the unit d-simplex of ∏ λ_i^{a_i} divided by its volume: d! ∏a_i! / (d + Σa)!
    fn exact_moment(a: &[i64]) -> f64 {
        let d = a.len() as i64 - 1;
        let num: f64 = a.iter().map(|&k| factorial(k)).product::<f64>() * factorial(d);
        num / factorial(d + a.iter().sum::<i64>())
    }

    fn check_rule(points: &[Vec<f64>], weights: &[f64], degree: i64) {
        let parts = points[0].len();
        for deg in 0..=degree {
            for a in compositions(deg, parts) {
                let q: f64 = points
                    .iter()
                    .zip(weights)
                    .map(|(p, w)| w * p.iter().zip(&a).map(|(x, &k)| x.powi(k as i32)).product::<f64>())
                    .sum();
                assert!((q - exact_moment(&a)).abs() < 1e-13, "{a:?}: {q} vs {}", exact_moment(&a));
            }
        }
    }

    #[test]
    fn fixed_rules_are_exact_to_degree_two() {
        let (p, w) = tet_order2();
        let pts: Vec<Vec<f64>> = p.iter().map(|x| x.to_vec()).collect();
        check_rule(&pts, &w, 2);
        let (p, w) = tri_order2();
        let pts: Vec<Vec<f64>> = p.iter().map(|x| x.to_vec()).collect();
        check_rule(&pts, &w, 2);
    }

    #[test]
    fn grundmann_moller_exactness() {
        for dim in 2..=3 {
            for s in 0..=3 {
                let r = grundmann_moller(dim, s);
                check_rule(&r.points, &r.weights, 2 * s as i64 + 1);
            }
        }
    }
}
