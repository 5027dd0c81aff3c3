//! Adaptive Gauss–Kronrod quadrature (15-point rule with embedded 7-point
//! Gauss estimate) for smooth and mildly oscillatory real integrands.

use super::QcoreError;

// Nodes and weights of the (G7, K15) pair on [-1, 1].
const XGK: [f64; 15] = [
    -0.991455371120813,
    -0.949107912342759,
    -0.864864423359769,
    -0.741531185599394,
    -0.586087235467691,
    -0.405845151377397,
    -0.207784955007898,
    0.0,
    0.207784955007898,
    0.405845151377397,
    0.586087235467691,
    0.741531185599394,
    0.864864423359769,
    0.949107912342759,
    0.991455371120813,
];
const WGK: [f64; 15] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
    0.204432940075298,
    0.190350578064785,
    0.169004726639267,
    0.140653259715525,
    0.104790010322250,
    0.063092092629979,
    0.022935322010529,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut resk = 0.0;
    let mut resg = 0.0;
    let mut fv = [0.0f64; 15];
    for (i, &x) in XGK.iter().enumerate() {
        fv[i] = f(c + h * x);
        resk += WGK[i] * fv[i];
    }
    for (j, &w) in WG.iter().enumerate() {
        // Gauss nodes sit at the odd Kronrod indices 1, 3, 5, 7 (center), ...
        if j < 3 {
            resg += w * (fv[2 * j + 1] + fv[13 - 2 * j]);
        } else {
            resg += w * fv[7];
        }
    }
    (resk * h, (resk - resg).abs() * h)
}

/// Adaptively integrate `f` over `[a, b]` to the requested relative tolerance
/// (with a small absolute floor).
pub fn adaptive(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    rtol: f64,
    atol: f64,
) -> Result<f64, QcoreError> {
    if a == b {
        return Ok(0.0);
    }
    // (neg_error, a, b, value, error) on a max-heap by error
    let (v0, e0) = gk15(&mut f, a, b);
    let mut segments = vec![(a, b, v0, e0)];
    let max_segments = 4000;
    loop {
        let total: f64 = segments.iter().map(|s| s.2).sum();
        let err: f64 = segments.iter().map(|s| s.3).sum();
        if err <= atol + rtol * total.abs() {
            return Ok(total);
        }
        if segments.len() >= max_segments {
            return Err(QcoreError::QuadratureFailure(format!(
                "error {err:.3e} above tolerance after {} segments on [{a}, {b}]",
                segments.len()
            )));
        }
        // split the worst segment
        let (wi, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (sa, sb, _, _) = segments.swap_remove(wi);
        let mid = 0.5 * (sa + sb);
        if mid == sa || mid == sb {
            return Err(QcoreError::QuadratureFailure(
                "interval collapsed below machine resolution".into(),
            ));
        }
        let (v1, e1) = gk15(&mut f, sa, mid);
        let (v2, e2) = gk15(&mut f, mid, sb);
        segments.push((sa, mid, v1, e1));
        segments.push((mid, sb, v2, e2));
    }
}

/// Cumulative integral of `f` on a fixed grid: returns `F[i] = int_{x0}^{x[i]} f`,
/// one value per grid node, using per-interval GK15 panels.
pub fn cumulative_on_grid(mut f: impl FnMut(f64) -> f64, grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in grid.windows(2) {
        let (v, _) = gk15(&mut f, w[0], w[1]);
        acc += v;
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomial_exactly() {
        let v = adaptive(|x| 3.0 * x * x, 0.0, 2.0, 1e-12, 1e-300).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn integrates_oscillatory() {
        let v = adaptive(|x| (10.0 * x).sin(), 0.0, std::f64::consts::PI, 1e-11, 1e-14).unwrap();
        let want = (1.0 - (10.0 * std::f64::consts::PI).cos()) / 10.0;
        assert!((v - want).abs() < 1e-10);
    }

    #[test]
    fn cumulative_matches_antiderivative() {
        let grid: Vec<f64> = (0..=50).map(|i| i as f64 * 0.1).collect();
        let cum = cumulative_on_grid(|x| x.cos(), &grid);
        for (i, t) in grid.iter().enumerate() {
            assert!((cum[i] - t.sin()).abs() < 1e-12);
        }
    }
}
