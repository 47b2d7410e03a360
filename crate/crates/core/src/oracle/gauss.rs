use crate::linalg::Vec3;

/// Gauss–Legendre nodes and weights mapped to `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "at least one node");
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let dp = legendre(n, x).1;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (x + 1.0), 0.5 * w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Collapsed rule on the reference tetrahedron `ξ ≥ 0, Σξ ≤ 1`; weights sum to 1/6.
pub fn tet_rule(n: usize) -> Vec<(Vec3, f64)> {
    let g = gauss_legendre(n);
    let mut out = Vec::with_capacity(n * n * n);
    for &(u, wu) in &g {
        for &(v, wv) in &g {
            for &(w, ww) in &g {
                let p = Vec3::new(u, v * (1.0 - u), w * (1.0 - u) * (1.0 - v));
                out.push((p, wu * wv * ww * (1.0 - u).powi(2) * (1.0 - v)));
            }
        }
    }
    out
}

/// Collapsed rule on the reference triangle `s, t ≥ 0, s + t ≤ 1`; weights sum to 1/2.
pub fn triangle_rule(n: usize) -> Vec<((f64, f64), f64)> {
    let g = gauss_legendre(n);
    let mut out = Vec::with_capacity(n * n);
    for &(u, wu) in &g {
        for &(v, wv) in &g {
            out.push(((u, v * (1.0 - u)), wu * wv * (1.0 - u)));
        }
    }
    out
}
