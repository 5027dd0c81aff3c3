//! Two identical qubits in the electromagnetic vacuum, in free space or
//! facing an infinite perfectly conducting plane at y = 0: environment
//! coefficients, analytic dissipative dynamics, concurrence, and the
//! open-system geometric phase with its weak-coupling expansion.
//!
//! Geometry: the qubits sit at distance `L` from each other along z and (when
//! the mirror is present) both at distance `d` from the plane, so y is the
//! normal direction and x, z are tangential. Dimensionless lengths:
//! `L~ = L w`, `d~ = 2 d w`, `s~ = w sqrt((2d)^2 + L^2)`.
//!
//! The dissipative and Hamiltonian coefficient matrices are assembled from
//! the on-shell vacuum correlator: per polarization component n, the
//! same-qubit mirror term and the cross-qubit terms carry the transverse /
//! longitudinal angular functions of the relevant separation, and the image
//! contribution enters with the reflection sign of the component (tangential
//! components flip). Basis order for 4x4 states:
//! `{|1> = |++>, |2> = |+->, |3> = |-+>, |4> = |-->}`.

use crate::phasefun::{wrap_phase, PhaseError, ORTHOGONALITY_TOL};
use crate::qcore::{eig_hermitian, quad, C64, CMat, CVec, DensityMatrix, QcoreError};
use std::f64::consts::{PI, TAU};

#[derive(Debug, thiserror::Error)]
pub enum BipartiteError {
    #[error("polarization vector is not unit within 1e-9: |r| = {0}")]
    InvalidPolarization(f64),
    #[error("decay functions require x > 0, got {0}")]
    DomainError(f64),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error(transparent)]
    Core(#[from] QcoreError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

/// Boundary condition of the vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    FreeSpace,
    /// Perfect conductor at y = 0; `d_tilde = 2 d w`.
    Mirror { d_tilde: f64 },
}

/// Environment and geometry of the qubit pair.
#[derive(Debug, Clone, Copy)]
pub struct BipartiteEnvSpec {
    /// Vacuum rate scale in units of the qubit frequency.
    pub gamma0: f64,
    /// Qubit separation `L w`.
    pub l_tilde: f64,
    pub boundary: Boundary,
    /// Dipole orientations (unit 3-vectors).
    pub pol1: [f64; 3],
    pub pol2: [f64; 3],
    /// Same-qubit level shift induced by the mirror, `sum_n r_n^2 h2_ll(n)`;
    /// its closed form is not modeled here and defaults to 0.
    pub mirror_level_shift: f64,
}

impl BipartiteEnvSpec {
    pub fn new(
        gamma0: f64,
        l_tilde: f64,
        boundary: Boundary,
        pol1: [f64; 3],
        pol2: [f64; 3],
    ) -> Result<Self, BipartiteError> {
        for r in [&pol1, &pol2] {
            let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
            if (n - 1.0).abs() > 1e-9 {
                return Err(BipartiteError::InvalidPolarization(n));
            }
        }
        Ok(Self { gamma0, l_tilde, boundary, pol1, pol2, mirror_level_shift: 0.0 })
    }

    /// `s~ = sqrt(d~^2 + L~^2)` when the mirror is present.
    pub fn s_tilde(&self) -> Option<f64> {
        match self.boundary {
            Boundary::FreeSpace => None,
            Boundary::Mirror { d_tilde } => Some(d_tilde.hypot(self.l_tilde)),
        }
    }

    /// Markov validity flags `L~ >= 1` and `d~ >= 1` (advisory only).
    pub fn markov_validity(&self) -> bool {
        let d_ok = match self.boundary {
            Boundary::FreeSpace => true,
            Boundary::Mirror { d_tilde } => d_tilde >= 1.0,
        };
        self.l_tilde >= 1.0 && d_ok
    }
}

/// Oscillating decay-function family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayKind {
    A,
    B,
    C,
    D,
}

/// Evaluate the decay functions
/// `A_n(x) = [x cos(x - n pi/2) + (x^2 - 1) sin(x - n pi/2)]/x^3`,
/// `B_n(x) = [x cos(x + n pi/2) - sin(x + n pi/2)]/x^3`,
/// `C_n(x) = [-(2L~^2 + d~^2) x cos(x - n pi/2) + (2L~^2 + d~^2(x^2-1)) sin(x - n pi/2)]/x^5`,
/// `D_n(x) = [-(2d~^2 - L~^2) x cos(x + n pi/2) + (2d~^2 + L~^2(x^2-1)) sin(x + n pi/2)]/x^5`.
pub fn decay_functions(
    kind: DecayKind,
    order: u8,
    x: f64,
    l_tilde: f64,
    d_tilde: f64,
) -> Result<f64, BipartiteError> {
    if x <= 0.0 {
        return Err(BipartiteError::DomainError(x));
    }
    let n = order as f64;
    let half = 0.5 * n * PI;
    let v = match kind {
        DecayKind::A => {
            let (s, c) = (x - half).sin_cos();
            (x * c + (x * x - 1.0) * s) / x.powi(3)
        }
        DecayKind::B => {
            let (s, c) = (x + half).sin_cos();
            (x * c - s) / x.powi(3)
        }
        DecayKind::C => {
            let (s, c) = (x - half).sin_cos();
            let l2 = l_tilde * l_tilde;
            let d2 = d_tilde * d_tilde;
            (-(2.0 * l2 + d2) * x * c + (2.0 * l2 + d2 * (x * x - 1.0)) * s) / x.powi(5)
        }
        DecayKind::D => {
            let (s, c) = (x + half).sin_cos();
            let l2 = l_tilde * l_tilde;
            let d2 = d_tilde * d_tilde;
            (-(2.0 * d2 - l2) * x * c + (2.0 * d2 + l2 * (x * x - 1.0)) * s) / x.powi(5)
        }
    };
    Ok(v)
}

// Transverse / mixed angular correlator functions. `a_fn(order, x)` is the
// fully transverse one; `long_fn` the fully longitudinal (-2 B_n); the general
// component with squared direction cosine `u` interpolates between them:
// (1 - u) sin/x + (1 - 3u)(cos/x^2 - sin/x^3) with the A-phase convention.
fn angular(order: u8, u_sq: f64, x: f64) -> f64 {
    let half = 0.5 * order as f64 * PI;
    let (s, c) = (x - half).sin_cos();
    (1.0 - u_sq) * s / x + (1.0 - 3.0 * u_sq) * (c / (x * x) - s / x.powi(3))
}

/// Dissipative (`a`) and Hamiltonian (`c`) coefficient matrices, in units of
/// the rates themselves (gamma0 folded in).
#[derive(Debug, Clone, Copy)]
pub struct BipartiteCoeffs {
    pub a: [[f64; 2]; 2],
    pub c: [[f64; 2]; 2],
}

/// Assemble the environment coefficients.
///
/// Per component n: the free-space same-qubit term is 1/3; the free-space
/// cross term is half the angular function of the separation L z-hat; mirror
/// terms subtract the image contribution (reflection sign -1 for the
/// tangential x, z components, +1 for the normal y component) evaluated at
/// the image separations 2d y-hat (same qubit) and (0, 2d, L) (cross). The
/// same-qubit free-space level shift is dropped.
pub fn compute_coeffs(env: &BipartiteEnvSpec) -> Result<BipartiteCoeffs, BipartiteError> {
    for r in [&env.pol1, &env.pol2] {
        let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if (n - 1.0).abs() > 1e-9 {
            return Err(BipartiteError::InvalidPolarization(n));
        }
    }
    let lt = env.l_tilde;
    let refl = [-1.0, 1.0, -1.0]; // image reflection sign per component (mirror normal y)
    let mut a = [[0.0f64; 2]; 2];
    let mut c = [[0.0f64; 2]; 2];
    let pols = [env.pol1, env.pol2];

    for (ord, out) in [(0u8, &mut a), (1u8, &mut c)] {
        for l in 0..2 {
            for m in 0..2 {
                let mut acc = 0.0;
                for n_idx in 0..3 {
                    let w = pols[l][n_idx] * pols[m][n_idx];
                    if w == 0.0 {
                        continue;
                    }
                    let f1 = if l == m {
                        if ord == 0 {
                            1.0 / 3.0
                        } else {
                            0.0 // free-space same-qubit level shift dropped
                        }
                    } else {
                        // separation L z-hat: u^2 = delta_{nz}
                        let u = if n_idx == 2 { 1.0 } else { 0.0 };
                        0.5 * angular(ord, u, lt)
                    };
                    let f2 = match env.boundary {
                        Boundary::FreeSpace => 0.0,
                        Boundary::Mirror { d_tilde } => {
                            if l == m {
                                if ord == 1 {
                                    // same-qubit mirror level shift: pluggable
                                    0.0
                                } else {
                                    // image separation 2d y-hat: u^2 = delta_{ny}
                                    let u = if n_idx == 1 { 1.0 } else { 0.0 };
                                    -refl[n_idx] * 0.5 * angular(ord, u, d_tilde)
                                }
                            } else {
                                // image separation (0, 2d, L)
                                let st = d_tilde.hypot(lt);
                                let u = match n_idx {
                                    1 => (d_tilde / st).powi(2),
                                    2 => (lt / st).powi(2),
                                    _ => 0.0,
                                };
                                -refl[n_idx] * 0.5 * angular(ord, u, st)
                            }
                        }
                    };
                    acc += w * (f1 - f2);
                }
                out[l][m] = env.gamma0 * acc;
            }
        }
    }
    // the pluggable same-qubit mirror shift enters c_ll with the mirror sign
    if matches!(env.boundary, Boundary::Mirror { .. }) {
        for l in 0..2 {
            c[l][l] -= env.gamma0 * env.mirror_level_shift;
        }
    }
    Ok(BipartiteCoeffs { a, c })
}

/// Analytic matrix elements of the evolved state from
/// `cos(t/2)|++> + sin(t/2)|-->`.
#[derive(Debug, Clone, Copy)]
pub struct BipartiteElements {
    pub rho11: f64,
    pub rho22: f64,
    pub rho44: f64,
    pub rho41: C64,
    pub rho23: f64,
}

/// Closed-form elements at time t (reference frequency w = 1).
pub fn elements_at(coeffs: &BipartiteCoeffs, theta0: f64, t: f64) -> BipartiteElements {
    let a11 = coeffs.a[0][0];
    let a12 = coeffs.a[0][1];
    let c11 = coeffs.c[0][0];
    let w = 1.0;
    let ch2 = (theta0 / 2.0).cos().powi(2);
    let rho11 = ch2 * (-4.0 * a11 * t).exp();
    let (ap, am) = (a11 + a12, a11 - a12);
    let rho22 = if a12.abs() <= 1e-12 * a11.abs().max(1e-300) {
        ch2 * ((-2.0 * a11 * t).exp() - (-4.0 * a11 * t).exp())
    } else {
        ch2 * (am / (2.0 * ap) * (1.0 - (-2.0 * ap * t).exp()) * (-2.0 * am * t).exp()
            + ap / (2.0 * am) * (1.0 - (-2.0 * am * t).exp()) * (-2.0 * ap * t).exp())
    };
    let rho23 = if a12.abs() <= 1e-12 * a11.abs().max(1e-300) {
        0.0
    } else {
        ch2 * (-am / (2.0 * ap) * (1.0 - (-2.0 * ap * t).exp()) * (-2.0 * am * t).exp()
            + ap / (2.0 * am) * (1.0 - (-2.0 * am * t).exp()) * (-2.0 * ap * t).exp())
    };
    let rho41 = C64::from_polar(
        0.5 * theta0.sin() * (-2.0 * a11 * t).exp(),
        2.0 * (c11 + w) * t,
    );
    let rho44 = 1.0 - rho11 - 2.0 * rho22;
    BipartiteElements { rho11, rho22, rho44, rho41, rho23 }
}

/// Assemble the full 4x4 density matrix from the analytic elements.
pub fn evolve_bipartite(
    env: &BipartiteEnvSpec,
    theta0: f64,
    t_samples: &[f64],
) -> Result<Vec<DensityMatrix>, BipartiteError> {
    let coeffs = compute_coeffs(env)?;
    Ok(t_samples
        .iter()
        .map(|&t| {
            let e = elements_at(&coeffs, theta0, t);
            let mut m = CMat::zeros(4);
            m[(0, 0)] = C64::new(e.rho11, 0.0);
            m[(1, 1)] = C64::new(e.rho22, 0.0);
            m[(2, 2)] = C64::new(e.rho22, 0.0);
            m[(3, 3)] = C64::new(e.rho44, 0.0);
            m[(3, 0)] = e.rho41;
            m[(0, 3)] = e.rho41.conj();
            m[(1, 2)] = C64::new(e.rho23, 0.0);
            m[(2, 1)] = C64::new(e.rho23, 0.0);
            DensityMatrix::new_unchecked(m)
        })
        .collect())
}

/// Wootters concurrence of a two-qubit state.
///
/// The X-state fast path uses the closed-form eigenvalues
/// `{(sqrt(r11 r44) +- |r41|)^2, (sqrt(r22 r33) +- |r23|)^2}`; the general
/// path computes the singular values of `sqrt(rho) (sy x sy) sqrt(rho)^T`.
pub fn concurrence(rho: &DensityMatrix, x_state: bool) -> Result<f64, BipartiteError> {
    if rho.dim() != 4 {
        return Err(BipartiteError::InvalidState("need a two-qubit state".into()));
    }
    let m = rho.mat();
    if x_state {
        let r11 = m[(0, 0)].re;
        let r22 = m[(1, 1)].re;
        let r33 = m[(2, 2)].re;
        let r44 = m[(3, 3)].re;
        let r41 = m[(3, 0)].norm();
        let r23 = m[(1, 2)].norm();
        let s14 = (r11 * r44).max(0.0).sqrt();
        let s23 = (r22 * r33).max(0.0).sqrt();
        let mut roots = [s14 + r41, (s14 - r41).abs(), s23 + r23, (s23 - r23).abs()];
        roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
        return Ok((roots[0] - roots[1] - roots[2] - roots[3]).max(0.0));
    }
    // general path
    let (vals, vecs) = rho.eig()?;
    let mut sqrt_rho = CMat::zeros(4);
    for (k, v) in vecs.iter().enumerate() {
        sqrt_rho = sqrt_rho.add(&CMat::outer(v, v).scaled(C64::new(vals[k].max(0.0).sqrt(), 0.0)));
    }
    let sy = crate::qcore::pauli::sigma_y();
    let syy = sy.kron(&sy);
    // B = sqrt(rho) syy sqrt(rho)^T; singular values of B are sqrt(lambda_i)
    let mut sqrt_rho_t = CMat::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            sqrt_rho_t[(i, j)] = sqrt_rho[(j, i)];
        }
    }
    let b = sqrt_rho.matmul(&syy).matmul(&sqrt_rho_t);
    let btb = b.adjoint().matmul(&b);
    let (sv2, _) = eig_hermitian(&btb.hermitized())?;
    let roots: Vec<f64> = sv2.iter().map(|&x| x.max(0.0).sqrt()).collect();
    Ok((roots[0] - roots[1] - roots[2] - roots[3]).max(0.0))
}

/// Times in `(0, t_max]` where the concurrence crosses zero (sudden death and
/// birth), located by bisection on the analytic elements to 1e-10 in `t w`.
pub fn concurrence_crossings(
    env: &BipartiteEnvSpec,
    theta0: f64,
    t_max: f64,
) -> Result<Vec<f64>, BipartiteError> {
    let coeffs = compute_coeffs(env)?;
    // signed concurrence precursor: largest root minus the others
    let f = |t: f64| -> f64 {
        let e = elements_at(&coeffs, theta0, t);
        let s14 = (e.rho11 * e.rho44).max(0.0).sqrt();
        let r41 = e.rho41.norm();
        let r23 = e.rho23.abs();
        let mut roots = [s14 + r41, (s14 - r41).abs(), e.rho22 + r23, (e.rho22 - r23).abs()];
        roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
        roots[0] - roots[1] - roots[2] - roots[3]
    };
    let n = 4000;
    let mut crossings = Vec::new();
    let mut prev_t = 0.0;
    let mut prev = f(0.0);
    for i in 1..=n {
        let t = t_max * i as f64 / n as f64;
        let cur = f(t);
        if prev != 0.0 && cur != 0.0 && prev.signum() != cur.signum() {
            let (mut lo, mut hi) = (prev_t, t);
            let mut flo = prev;
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            crossings.push(0.5 * (lo + hi));
        }
        prev_t = t;
        prev = cur;
    }
    Ok(crossings)
}

/// Open-system phase of the `|++>/|-->` eigenbranch.
#[derive(Debug, Clone, Copy)]
pub struct OpenGpBipartite {
    /// Unwrapped branch phase over `[0, t_end]`.
    pub phi_g: f64,
    /// Unitary reference `-2 pi (1 - cos theta) t / T_s`.
    pub phi_u: f64,
    /// Circular difference `wrap(phi_g - phi_u)`.
    pub delta_phi: f64,
}

/// Geometric phase of the density-matrix eigenbranch continuous from the
/// initial state:
/// `arg<psi+(0)|psi+(t)> - int 2 (w + c11) |rho41|^2 / ((rho44 - eps)^2 + |rho41|^2) dt`,
/// with the endpoint arg unwrapped adaptively along t.
pub fn open_gp_bipartite(
    env: &BipartiteEnvSpec,
    theta0: f64,
    t_end: f64,
) -> Result<OpenGpBipartite, BipartiteError> {
    let series = open_gp_bipartite_series(env, theta0, t_end, 1)?;
    Ok(series.last().unwrap().1)
}

/// History of the open-system phase at `n_out` evenly spaced output times.
pub fn open_gp_bipartite_series(
    env: &BipartiteEnvSpec,
    theta0: f64,
    t_end: f64,
    n_out: usize,
) -> Result<Vec<(f64, OpenGpBipartite)>, BipartiteError> {
    let coeffs = compute_coeffs(env)?;
    let w = 1.0;
    let c11 = coeffs.c[0][0];
    let eps_plus = |e: &BipartiteElements| -> f64 {
        0.5 * (e.rho11 + e.rho44 + ((e.rho11 - e.rho44).powi(2) + 4.0 * e.rho41.norm_sqr()).sqrt())
    };
    let integrand = |t: f64| -> f64 {
        let e = elements_at(&coeffs, theta0, t);
        let ep = eps_plus(&e);
        let q = e.rho41.norm_sqr();
        2.0 * (w + c11) * q / ((e.rho44 - ep).powi(2) + q)
    };
    // eigenvector on the {|++>, |-->} plane: (-(rho44 - eps), rho41)
    let branch_vec = |t: f64| -> CVec {
        let e = elements_at(&coeffs, theta0, t);
        let ep = eps_plus(&e);
        CVec::new(vec![C64::new(-(e.rho44 - ep), 0.0), e.rho41]).normalized()
    };
    let v0 = branch_vec(0.0);
    let overlap = |t: f64| -> C64 { v0.dot(&branch_vec(t)) };

    // march to each output time, accumulating the adaptive unwrap of
    // arg<psi+(0)|psi+(t)> and the dynamical integral segment by segment
    let t_s = TAU / w;
    let mut out = Vec::with_capacity(n_out);
    let mut un = 0.0;
    let mut dy = 0.0;
    let mut t_prev = 0.0;
    let mut cur = overlap(0.0);
    for j in 1..=n_out {
        let t_j = t_end * j as f64 / n_out as f64;
        dy += quad::adaptive(integrand, t_prev, t_j, 1e-10, 1e-13).map_err(BipartiteError::Core)?;
        let mut t = t_prev;
        let base_step = t_end / 4096.0;
        while t < t_j - 1e-15 * t_end {
            let mut h = base_step.min(t_j - t);
            loop {
                let nxt = overlap(t + h);
                if nxt.norm() <= ORTHOGONALITY_TOL {
                    return Err(BipartiteError::Phase(PhaseError::OrthogonalEndpoints {
                        overlap: nxt.norm(),
                    }));
                }
                let d = (nxt / cur).arg();
                if d.abs() < 0.5 || h < 1e-13 * t_end {
                    un += d;
                    t += h;
                    cur = nxt;
                    break;
                }
                h *= 0.5;
            }
        }
        let phi_g = un - dy;
        let phi_u = -TAU * (1.0 - theta0.cos()) * t_j / t_s;
        out.push((t_j, OpenGpBipartite { phi_g, phi_u, delta_phi: wrap_phase(phi_g - phi_u) }));
        t_prev = t_j;
    }
    Ok(out)
}

/// First- and second-order weak-coupling corrections to the one-period phase:
/// `c1 = -4 pi^2 sin^2 t a11 / w`,
/// `c2 = -(16 pi^3 / 3) sin^2 t ((a11^2 + a12^2)(1 + cos t) + 2 a11^2 cos t)/w^2`.
pub fn gp_expansion_bipartite(env: &BipartiteEnvSpec, theta0: f64) -> Result<(f64, f64), BipartiteError> {
    let coeffs = compute_coeffs(env)?;
    let (a11, a12) = (coeffs.a[0][0], coeffs.a[0][1]);
    let w = 1.0;
    let s2 = theta0.sin().powi(2);
    let c1 = -4.0 * PI * PI * s2 * a11 / w;
    let c2 = -(16.0 * PI.powi(3) / 3.0)
        * s2
        * ((a11 * a11 + a12 * a12) * (1.0 + theta0.cos()) + 2.0 * a11 * a11 * theta0.cos())
        / (w * w);
    Ok((c1, c2))
}
