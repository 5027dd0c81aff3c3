//! Complex exponential integral, in the scaled form `e^z E1(z)` that stays
//! finite for large |z| anywhere off the negative real axis.

use crate::qcore::C64;

const EULER_GAMMA: f64 = 0.577215664901532860606512090082;

/// `e^z E1(z)`: power series for |z| <= 4, modified-Lentz continued fraction
/// otherwise. Accurate to ~1e-13 relative away from the negative real axis.
pub fn exp_e1(z: C64) -> C64 {
    if z.norm() <= 4.0 {
        // E1(z) = -gamma - ln z + sum_{k>=1} (-1)^{k+1} z^k / (k k!)
        let mut sum = -C64::new(EULER_GAMMA, 0.0) - z.ln();
        let mut term = C64::new(1.0, 0.0);
        for k in 1..=70 {
            term *= -z / k as f64;
            let add = term / k as f64;
            sum -= add;
            if add.norm() < 1e-18 * sum.norm().max(1e-30) {
                break;
            }
        }
        z.exp() * sum
    } else {
        // e^z E1(z) = 1/(z + 1 - 1/(z + 3 - 4/(z + 5 - 9/(... ))))
        let tiny = C64::new(1e-300, 0.0);
        let mut b = z + 1.0;
        let mut c = C64::new(1e300, 0.0);
        let mut d = b.inv();
        let mut h = d;
        for i in 1..400 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = b + a * d;
            if d.norm() < 1e-300 {
                d = tiny;
            }
            c = b + a / c;
            if c.norm() < 1e-300 {
                c = tiny;
            }
            d = d.inv();
            let delta = c * d;
            h *= delta;
            if (delta - 1.0).norm() < 1e-16 {
                break;
            }
        }
        h
    }
}

/// `E1(z)` itself (overflows for strongly negative real parts; prefer
/// [`exp_e1`] in kernels).
pub fn e1(z: C64) -> C64 {
    (-z).exp() * exp_e1(z)
}
