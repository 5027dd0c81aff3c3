//! Adaptive embedded Runge–Kutta (Dormand–Prince 5(4)) integration of complex
//! first-order systems, sampled at caller-requested times.

use super::{C64, QcoreError};

/// Integration controls.
#[derive(Debug, Clone, Copy)]
pub struct OdeCtrl {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for OdeCtrl {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12 }
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// 5th-order weights equal the last row of A; 4th-order weights:
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `dy/dt = rhs(t, y)` from `t_samples[0]` (state `y0`), returning
/// the solution at every requested sample time.
///
/// Per-step error is kept below `atol + rtol * |y|` component-wise; sample
/// times are hit exactly.
pub fn integrate_ode<F>(
    mut rhs: F,
    y0: &[C64],
    t_samples: &[f64],
    ctrl: &OdeCtrl,
) -> Result<Vec<Vec<C64>>, QcoreError>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    assert!(t_samples.len() >= 2, "need at least start and end times");
    for w in t_samples.windows(2) {
        assert!(w[1] > w[0], "sample times must be strictly increasing");
    }
    let n = y0.len();
    let span = t_samples[t_samples.len() - 1] - t_samples[0];
    let mut y = y0.to_vec();
    let mut t = t_samples[0];
    let mut out = Vec::with_capacity(t_samples.len());
    out.push(y.clone());

    let mut k = vec![vec![C64::new(0.0, 0.0); n]; 7];
    let mut ytmp = vec![C64::new(0.0, 0.0); n];
    rhs(t, &y, &mut k[0]);
    let mut h = (span / 100.0).min(0.1);

    for &t_target in &t_samples[1..] {
        while t < t_target {
            let mut step = h.min(t_target - t);
            loop {
                if step < 1e-15 * span {
                    return Err(QcoreError::StepSizeUnderflow { h: step, span });
                }
                // stages 2..7
                for s in 0..6 {
                    for i in 0..n {
                        let mut acc = C64::new(0.0, 0.0);
                        for (j, kj) in k.iter().enumerate().take(s + 1) {
                            let a = A[s][j];
                            if a != 0.0 {
                                acc += kj[i] * a;
                            }
                        }
                        ytmp[i] = y[i] + acc * step;
                    }
                    let (head, tail) = k.split_at_mut(s + 1);
                    let _ = head;
                    rhs(t + C[s] * step, &ytmp, &mut tail[0]);
                }
                // 5th-order solution (FSAL: y5 uses row A[5] == b5, equals stage 7 input)
                let mut err = 0.0f64;
                for i in 0..n {
                    let mut y5 = C64::new(0.0, 0.0);
                    for (j, kj) in k.iter().enumerate().take(6) {
                        let a = A[5][j];
                        if a != 0.0 {
                            y5 += kj[i] * a;
                        }
                    }
                    let y5 = y[i] + y5 * step;
                    let mut y4 = C64::new(0.0, 0.0);
                    for (j, kj) in k.iter().enumerate().take(7) {
                        let b = B4[j];
                        if b != 0.0 {
                            y4 += kj[i] * b;
                        }
                    }
                    let y4 = y[i] + y4 * step;
                    let sc = ctrl.atol + ctrl.rtol * y[i].norm().max(y5.norm());
                    err = err.max((y5 - y4).norm() / sc);
                    ytmp[i] = y5;
                }
                if err <= 1.0 {
                    t += step;
                    y.copy_from_slice(&ytmp);
                    k[0] = k[6].clone(); // FSAL
                    let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    h = (step * grow).min(span);
                    break;
                }
                step *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}
