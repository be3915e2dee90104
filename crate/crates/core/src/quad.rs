//! Adaptive Gauss-Legendre quadrature on log-spaced radial panels.

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration from the Chebyshev initial guess.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence P_0..P_n and derivative at x
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (nodes, weights)
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, nodes: &[f64], weights: &[f64]) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    nodes
        .iter()
        .zip(weights)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Integral of f over [r_min, r_max]: log-spaced panels (4 per decade),
/// each refined by bisection until the two-half estimate agrees with the
/// whole-panel estimate to rel_tol of the running total.
pub fn integrate_radial<F: Fn(f64) -> f64>(f: &F, r_min: f64, r_max: f64, rel_tol: f64) -> f64 {
    assert!(r_min > 0.0 && r_max > r_min);
    let (nodes, weights) = gauss_legendre(15);
    let decades = (r_max / r_min).log10();
    let n_panels = ((decades * 4.0).ceil() as usize).max(1);
    let mut edges = Vec::with_capacity(n_panels + 1);
    for i in 0..=n_panels {
        edges.push(r_min * (r_max / r_min).powf(i as f64 / n_panels as f64));
    }
    // first pass for the tolerance scale
    let coarse: f64 = edges
        .windows(2)
        .map(|e| panel(f, e[0], e[1], &nodes, &weights))
        .sum::<f64>()
        .abs();
    let tol = rel_tol * coarse.max(f64::MIN_POSITIVE);
    let mut total = 0.0;
    let mut stack: Vec<(f64, f64, f64, usize)> = edges
        .windows(2)
        .map(|e| (e[0], e[1], panel(f, e[0], e[1], &nodes, &weights), 0usize))
        .collect();
    while let Some((a, b, whole, depth)) = stack.pop() {
        let mid = 0.5 * (a + b);
        let left = panel(f, a, mid, &nodes, &weights);
        let right = panel(f, mid, b, &nodes, &weights);
        if (left + right - whole).abs() <= tol / (1 << depth.min(30)) as f64 || depth >= 40 {
            total += left + right;
        } else {
            stack.push((a, mid, left, depth + 1));
            stack.push((mid, b, right, depth + 1));
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn nodes_are_symmetric_and_weights_sum_to_two() {
        let (nodes, weights) = gauss_legendre(15);
        assert_relative_eq!(weights.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
        for i in 0..15 {
            assert_relative_eq!(nodes[i], -nodes[14 - i], epsilon = 1e-14);
        }
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // 15-point rule is exact through degree 29
        let (nodes, weights) = gauss_legendre(15);
        let val = panel(&|x: f64| x.powi(20), 0.0, 1.0, &nodes, &weights);
        assert_relative_eq!(val, 1.0 / 21.0, max_relative = 1e-13);
    }

    #[test]
    fn radial_gaussian_moment() {
        // integral of r e^{-r^2} over (0, inf) = 1/2
        let val = integrate_radial(&|r: f64| r * (-r * r).exp(), 1e-10, 20.0, 1e-10);
        assert_relative_eq!(val, 0.5, max_relative = 1e-9);
    }

    #[test]
    fn handles_wide_dynamic_range() {
        // integral of r^{-1/2} over [1e-8, 1] = 2 (1 - 1e-4)
        let val = integrate_radial(&|r: f64| r.powf(-0.5), 1e-8, 1.0, 1e-10);
        assert_relative_eq!(val, 2.0 * (1.0 - 1e-4), max_relative = 1e-9);
    }
}
