//! Derivative-free scalar and low-dimensional optimizers.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Location and value of a maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section maximization on `[a, b]` until the bracket is shorter than
/// `tol`. The endpoints are not evaluated.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Maximum {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // 200 iterations shrink any double-precision bracket below resolution.
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        Maximum { x: x1, value: f1 }
    } else {
        Maximum { x: x2, value: f2 }
    }
}

/// Scans `grid` (sorted ascending), then refines the best cell's neighbourhood
/// by golden section. Grid points themselves, including the endpoints, are
/// candidates for the returned maximum.
pub fn scan_then_golden<F: FnMut(f64) -> f64>(mut f: F, grid: &[f64], tol: f64) -> Maximum {
    assert!(!grid.is_empty(), "scan grid must not be empty");
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let (best, _) = values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_nan())
        .fold((0usize, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let mut result = Maximum { x: grid[best], value: values[best] };
    if grid.len() < 2 {
        return result;
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    if hi > lo {
        let refined = golden_section_max(&mut f, lo, hi, tol);
        if refined.value > result.value {
            result = refined;
        }
    }
    result
}

/// `n` points evenly spaced over `[a, b]`, both ends included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `n` points log-spaced over `[a, b]`, both ends included; `a, b > 0`.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

/// Bisection for a sign change of `f` on `[a, b]`. Returns `None` when the
/// endpoint values share a sign.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Option<f64> {
    let (mut lo, mut hi) = (a, b);
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return None;
    }
    while (hi - lo).abs() > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Nelder–Mead maximization in two dimensions. Infeasible points should map to
/// `-inf`. Stops when the simplex diameter and value spread are below `tol`.
pub fn nelder_mead_max<F: FnMut([f64; 2]) -> f64>(
    mut f: F,
    start: [f64; 2],
    step: f64,
    tol: f64,
    max_iter: usize,
) -> ([f64; 2], f64) {
    let mut pts = [start, [start[0] + step, start[1]], [start[0], start[1] + step]];
    let mut vals = pts.map(|p| -f(p));
    let neg = |v: f64| if v.is_nan() { f64::INFINITY } else { v };
    for v in vals.iter_mut() {
        *v = neg(*v);
    }
    for _ in 0..max_iter {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let (best, mid, worst) = (idx[0], idx[1], idx[2]);
        let diam = pts
            .iter()
            .map(|p| ((p[0] - pts[best][0]).powi(2) + (p[1] - pts[best][1]).powi(2)).sqrt())
            .fold(0.0, f64::max);
        if diam < tol && (vals[worst] - vals[best]).abs() <= tol * (1.0 + vals[best].abs()) {
            break;
        }
        let centroid = [(pts[best][0] + pts[mid][0]) / 2.0, (pts[best][1] + pts[mid][1]) / 2.0];
        let along =
            |c: f64| [centroid[0] + c * (pts[worst][0] - centroid[0]), centroid[1] + c * (pts[worst][1] - centroid[1])];
        let xr = along(-1.0);
        let fr = neg(-f(xr));
        if fr < vals[best] {
            let xe = along(-2.0);
            let fe = neg(-f(xe));
            if fe < fr {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
        } else if fr < vals[mid] {
            pts[worst] = xr;
            vals[worst] = fr;
        } else {
            let xc = if fr < vals[worst] { along(-0.5) } else { along(0.5) };
            let fc = neg(-f(xc));
            if fc < vals[worst].min(fr) {
                pts[worst] = xc;
                vals[worst] = fc;
            } else {
                for &i in &[mid, worst] {
                    pts[i] = [
                        pts[best][0] + 0.5 * (pts[i][0] - pts[best][0]),
                        pts[best][1] + 0.5 * (pts[i][1] - pts[best][1]),
                    ];
                    vals[i] = neg(-f(pts[i]));
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    (pts[best], -vals[best])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let m = golden_section_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, 0.0, 1.0, 1e-10);
        assert!((m.x - 0.3).abs() < 1e-7);
        assert!((m.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn scan_keeps_endpoint_maximum() {
        let grid = linspace(0.0, 1.0, 11);
        let m = scan_then_golden(|x| x, &grid, 1e-10);
        assert_eq!(m.x, 1.0);
    }

    #[test]
    fn bisect_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-11);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-6).is_none());
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let (x, v) = nelder_mead_max(
            |p| -((1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2)),
            [-1.0, 1.0],
            0.2,
            1e-12,
            20_000,
        );
        assert!((x[0] - 1.0).abs() < 1e-5 && (x[1] - 1.0).abs() < 1e-5, "{x:?}");
        assert!(v > -1e-10);
    }

    #[test]
    fn spacing_helpers() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        let l = logspace(1e-3, 1.0, 4);
        assert!((l[1] - 1e-2).abs() < 1e-15 && (l[3] - 1.0).abs() < 1e-15);
    }
}
