//! Scalar root isolation: uniform-grid bracketing followed by bisection.

/// Bisection on a sign-changing bracket. Returns `None` if `f(lo)` and
/// `f(hi)` have the same strict sign.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64>
where
    F: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= tol || mid == lo || mid == hi {
            return Some(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Sign-change brackets of `f` on `n` uniform cells of `[lo, hi]`.
/// Cells where either end is non-finite are skipped.
pub fn bracket_sign_changes<F>(f: F, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let h = (hi - lo) / n as f64;
    let mut out = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=n {
        let x1 = if i == n { hi } else { lo + h * i as f64 };
        let f1 = f(x1);
        if f0.is_finite() && f1.is_finite() && (f0 == 0.0 || f0.signum() != f1.signum()) {
            out.push((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

/// All sign-change roots of `f` on `[lo, hi]` from an `n`-cell grid.
pub fn grid_roots<F>(f: F, lo: f64, hi: f64, n: usize, tol: f64) -> Vec<f64>
where
    F: Fn(f64) -> f64,
{
    let mut roots: Vec<f64> = bracket_sign_changes(&f, lo, hi, n)
        .into_iter()
        .filter_map(|(a, b)| bisect(&f, a, b, tol))
        .collect();
    roots.dedup_by(|a, b| (*a - *b).abs() <= 2.0 * tol);
    roots
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
pub fn golden_min<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while (hi - lo).abs() > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}
