//! Dissipative Jaynes–Cummings model on the truncated basis
//! `{|0> = |-,0c>, |1> = |+,0c>, |2> = |-,1c>}`: dressed states, unitary
//! phases, phenomenological Lindblad dynamics (photon loss and incoherent
//! pump), and the open-system geometric phase of the eigenbranch continued
//! from `|+,0c>`.

use crate::phasefun::{wrap_phase, PhaseError};
use crate::qcore::{integrate_ode, C64, CMat, CVec, DensityMatrix, OdeCtrl, QcoreError};
use std::f64::consts::{PI, TAU};

#[derive(Debug, thiserror::Error)]
pub enum JcError {
    #[error("initial state breaks the block structure: |rho_0i(0)| = {0:.3e}")]
    BlockViolation(f64),
    #[error(transparent)]
    Core(#[from] QcoreError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

/// Atom–mode coupling `g` (the reference rate), detuning, photon-loss rate
/// and incoherent pump rate (all in units of `g`), and photon sector `n`.
#[derive(Debug, Clone, Copy)]
pub struct JCParams {
    pub g: f64,
    pub delta: f64,
    pub gamma: f64,
    pub pump: f64,
    pub n: u32,
}

impl JCParams {
    pub fn new(delta: f64, gamma: f64, pump: f64) -> Self {
        Self { g: 1.0, delta, gamma, pump, n: 0 }
    }

    /// Rabi frequency of the doublet, `sqrt(4 g^2 (n+1) + Delta^2)`.
    pub fn omega_n(&self) -> f64 {
        (4.0 * self.g * self.g * (self.n as f64 + 1.0) + self.delta * self.delta).sqrt()
    }

    /// Mixing angle of the dressed doublet, `cos = Delta / Omega_n`.
    pub fn theta_n(&self) -> f64 {
        (self.delta / self.omega_n()).acos()
    }

    /// Rabi period `2 pi / Omega_n`.
    pub fn period(&self) -> f64 {
        TAU / self.omega_n()
    }

    /// Strong coupling when `gamma / g < 1`.
    pub fn strong_coupling(&self) -> bool {
        self.gamma / self.g < 1.0
    }
}

/// Dressed doublet eigenstates on the basis `{|+,n>, |-,n+1>}` with energies
/// `+-Omega_n/2`.
pub fn dressed_states(p: &JCParams) -> (CVec, CVec, f64, f64) {
    let half = p.theta_n() / 2.0;
    let plus = CVec::from_reals(&[half.cos(), half.sin()]);
    let minus = CVec::from_reals(&[half.sin(), -half.cos()]);
    let e = 0.5 * p.omega_n();
    (plus, minus, e, -e)
}

/// Doublet Hamiltonian `[[Delta/2, g sqrt(n+1)], [g sqrt(n+1), -Delta/2]]`.
pub fn doublet_hamiltonian(p: &JCParams) -> CMat {
    let gq = p.g * (p.n as f64 + 1.0).sqrt();
    CMat::from_rows(&[
        vec![C64::new(0.5 * p.delta, 0.0), C64::new(gq, 0.0)],
        vec![C64::new(gq, 0.0), C64::new(-0.5 * p.delta, 0.0)],
    ])
}

/// Adiabatic cyclic phase `pi (1 -+ cos theta_n)` of the dressed branch under
/// a slow phase drive (this model's own sign convention; the kinematic
/// functionals of this crate use the opposite overall sign).
pub fn adiabatic_gp_jc(p: &JCParams, upper: bool) -> f64 {
    let c = p.theta_n().cos();
    if upper {
        PI * (1.0 - c)
    } else {
        PI * (1.0 + c)
    }
}

/// Unitary evolution of `|+, n>` on the truncated 3-level basis:
/// `(cos^2(t_n/2) e^{-i E t} + sin^2(t_n/2) e^{+i E t}) |1> - i sin t_n sin(E t) |2>`.
pub fn unitary_state_jc(p: &JCParams, t: f64) -> CVec {
    let half = p.theta_n() / 2.0;
    let e = 0.5 * p.omega_n();
    let c1 = C64::from_polar(half.cos().powi(2), -e * t) + C64::from_polar(half.sin().powi(2), e * t);
    let c2 = -C64::i() * p.theta_n().sin() * (e * t).sin();
    CVec::new(vec![C64::new(0.0, 0.0), c1, c2])
}

/// Kinematic geometric phase of the unitary path from `|+, n>`:
/// `-pi (1 - cos theta_n) (t/T) + arg{1 + e^{2 pi i t/T} (Omega_n - Delta)/(Omega_n + Delta)}`.
///
/// For `Delta > 0` the arg term is continuous; at resonance it jumps by pi
/// whenever the path passes the orthogonal state (t = T/2 mod T).
pub fn unitary_gp_jc(p: &JCParams, t: f64) -> f64 {
    let t_ratio = t / p.period();
    let r = (p.omega_n() - p.delta) / (p.omega_n() + p.delta);
    let z = C64::new(1.0, 0.0) + C64::from_polar(r, TAU * t_ratio);
    -PI * (1.0 - p.theta_n().cos()) * t_ratio + z.arg()
}

fn pack(rho00: C64, rho11: C64, rho22: C64, rho12: C64) -> [C64; 4] {
    [rho00, rho11, rho22, rho12]
}

/// Right-hand side of the dissipative three-level system
/// (populations and the coherence of the `{|1>, |2>}` block).
fn lindblad_rhs(p: &JCParams, y: &[C64], dy: &mut [C64]) {
    let (r00, r11, r22, r12) = (y[0], y[1], y[2], y[3]);
    let r21 = r12.conj();
    let i = C64::i();
    let g = C64::new(p.g, 0.0);
    dy[0] = -p.pump * r00 + p.gamma * r22;
    dy[1] = -i * g * (r21 - r12) + p.pump * r00;
    dy[2] = -i * g * (r12 - r21) - p.gamma * r22;
    dy[3] = -i * g * (r22 - r11) - i * p.delta * r12 - 0.5 * p.gamma * r12;
}

/// Integrate the dissipative dynamics from a block-structured initial state
/// (`rho_{0i}(0) = 0` for i = 1, 2), sampling at the requested times.
pub fn lindblad_evolve_jc(
    p: &JCParams,
    rho0: &DensityMatrix,
    t_samples: &[f64],
) -> Result<Vec<DensityMatrix>, JcError> {
    assert_eq!(rho0.dim(), 3);
    let m0 = rho0.mat();
    let off = m0[(0, 1)].norm().max(m0[(0, 2)].norm());
    if off > 1e-12 {
        return Err(JcError::BlockViolation(off));
    }
    let y0 = pack(m0[(0, 0)], m0[(1, 1)], m0[(2, 2)], m0[(1, 2)]);
    let sol = integrate_ode(|_, y, dy| lindblad_rhs(p, y, dy), &y0, t_samples, &OdeCtrl::default())
        .map_err(JcError::Core)?;
    Ok(sol
        .into_iter()
        .map(|y| {
            let mut m = CMat::zeros(3);
            m[(0, 0)] = C64::new(y[0].re, 0.0);
            m[(1, 1)] = C64::new(y[1].re, 0.0);
            m[(2, 2)] = C64::new(y[2].re, 0.0);
            m[(1, 2)] = y[3];
            m[(2, 1)] = y[3].conj();
            DensityMatrix::new_unchecked(m)
        })
        .collect())
}

/// Density-matrix eigenbranch continued from `|+,0c>`: the eigenvalue branch
/// continuous from 1 at t = 0 and its (normalized) eigenvector on the
/// `{|1>, |2>}` block.
fn plus_branch(rho: &DensityMatrix) -> (f64, CVec) {
    let m = rho.mat();
    let r11 = m[(1, 1)].re;
    let r22 = m[(2, 2)].re;
    let r21 = m[(2, 1)];
    let q = r21.norm_sqr();
    let eps = 0.5 * (r11 + r22 + ((r11 - r22).powi(2) + 4.0 * q).sqrt());
    let v = CVec::new(vec![C64::new(0.0, 0.0), C64::new(-(r22 - eps), 0.0), r21]);
    (eps, v.normalized())
}

/// Open-system geometric phase of the `|+,0c>` eigenbranch up to `t_end`,
/// together with the closed-form unitary phase at the same `(Delta, g, t)`
/// and their circular difference.
#[derive(Debug, Clone, Copy)]
pub struct OpenGpJc {
    /// Unwrapped branch phase accumulated over `[0, t_end]`.
    pub phi_g: f64,
    /// Unitary phase from `unitary_gp_jc` (same principal-branch arg term,
    /// unwrapped in the linear term).
    pub phi_u: f64,
    /// Circular difference `wrap(phi_g - phi_u)`.
    pub delta_phi: f64,
}

/// Compute the open-system phase by the gauge-invariant discrete functional
/// over the tracked eigenbranch, with the endpoint overlap unwrapped
/// continuously in time.
pub fn open_gp_jc(p: &JCParams, t_end: f64, samples_per_period: usize) -> Result<OpenGpJc, JcError> {
    let series = open_gp_jc_series(p, t_end, samples_per_period)?;
    Ok(*series.last().unwrap())
}

/// Per-sample history of the open-system phase and its unitary reference.
pub fn open_gp_jc_series(
    p: &JCParams,
    t_end: f64,
    samples_per_period: usize,
) -> Result<Vec<OpenGpJc>, JcError> {
    let n = (((t_end / p.period()) * samples_per_period as f64).ceil() as usize).max(8);
    let ts: Vec<f64> = (0..=n).map(|i| t_end * i as f64 / n as f64).collect();
    let psi0 = CVec::basis(3, 1);
    let rho0 = DensityMatrix::pure(&psi0);
    let rhos = lindblad_evolve_jc(p, &rho0, &ts)?;

    let branch: Vec<CVec> = rhos.iter().map(|r| plus_branch(r).1).collect();
    let mut out = Vec::with_capacity(n + 1);
    out.push(OpenGpJc { phi_g: 0.0, phi_u: 0.0, delta_phi: 0.0 });
    let mut endpoint = 0.0; // unwrapped arg <psi+(0)|psi+(t)>
    let mut prev_arg = 0.0;
    let mut dyn_sum = 0.0;
    for k in 1..branch.len() {
        let ov0 = branch[0].dot(&branch[k]);
        if ov0.norm() <= crate::phasefun::ORTHOGONALITY_TOL {
            return Err(JcError::Phase(PhaseError::OrthogonalEndpoints { overlap: ov0.norm() }));
        }
        let a = ov0.arg();
        endpoint += wrap_phase(a - prev_arg);
        prev_arg = a;
        let ov = branch[k - 1].dot(&branch[k]);
        if ov.norm() <= crate::phasefun::ORTHOGONALITY_TOL {
            return Err(JcError::Phase(PhaseError::OrthogonalStates {
                link: k - 1,
                overlap: ov.norm(),
            }));
        }
        dyn_sum += ov.arg();
        let phi_g = endpoint - dyn_sum;
        let phi_u = unitary_gp_jc(p, ts[k]);
        out.push(OpenGpJc { phi_g, phi_u, delta_phi: wrap_phase(phi_g - phi_u) });
    }
    Ok(out)
}

/// The sampled density-matrix elements over `[0, t_end]` from `|+,0c>`.
pub fn evolve_from_plus(
    p: &JCParams,
    t_end: f64,
    n_samples: usize,
) -> Result<(Vec<f64>, Vec<DensityMatrix>), JcError> {
    let ts: Vec<f64> = (0..=n_samples).map(|i| t_end * i as f64 / n_samples as f64).collect();
    let rho0 = DensityMatrix::pure(&CVec::basis(3, 1));
    let rhos = lindblad_evolve_jc(p, &rho0, &ts)?;
    Ok((ts, rhos))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasefun::circ_dist;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn dressed_states_resonant_are_bell_like() {
        let p = JCParams::new(0.0, 0.0, 0.0);
        let (plus, minus, ep, _) = dressed_states(&p);
        let s = 1.0 / 2f64.sqrt();
        assert!((plus[0].re - s).abs() < 1e-15 && (plus[1].re - s).abs() < 1e-15);
        assert!((minus[0].re - s).abs() < 1e-15 && (minus[1].re + s).abs() < 1e-15);
        assert!((ep - 1.0).abs() < 1e-15); // g sqrt(n+1) with g = 1, n = 0
    }

    #[test]
    fn dressed_states_large_detuning_limit() {
        let p = JCParams::new(100.0, 0.0, 0.0);
        let (plus, _, _, _) = dressed_states(&p);
        assert!(plus[0].re > 0.999);
    }

    #[test]
    fn dressed_states_eigen_residual_and_orthogonality() {
        for delta in [0.0, 0.3, 2.0, -1.5] {
            let p = JCParams::new(delta, 0.0, 0.0);
            let (plus, minus, ep, em) = dressed_states(&p);
            let h = doublet_hamiltonian(&p);
            assert!(h.mul_vec(&plus).sub(&plus.scaled(c(ep, 0.0))).norm() < 1e-12);
            assert!(h.mul_vec(&minus).sub(&minus.scaled(c(em, 0.0))).norm() < 1e-12);
            assert!(plus.dot(&minus).norm() < 1e-15);
        }
    }

    #[test]
    fn adiabatic_phase_values() {
        let p = JCParams::new(0.0, 0.0, 0.0);
        assert!((adiabatic_gp_jc(&p, true) - PI).abs() < 1e-15);
        // cos theta_n = 1/2 at Delta = 2 g / sqrt(3)
        let p = JCParams::new(2.0 / 3f64.sqrt(), 0.0, 0.0);
        assert!((adiabatic_gp_jc(&p, true) - PI / 2.0).abs() < 1e-12);
        // vacuum correction: n = 0 vs n = 1 differ at fixed detuning
        let p0 = JCParams { n: 0, ..JCParams::new(1.0, 0.0, 0.0) };
        let p1 = JCParams { n: 1, ..JCParams::new(1.0, 0.0, 0.0) };
        assert!((adiabatic_gp_jc(&p0, true) - adiabatic_gp_jc(&p1, true)).abs() > 1e-2);
    }

    #[test]
    fn unitary_state_initial_and_norm() {
        let p = JCParams::new(0.7, 0.0, 0.0);
        let v0 = unitary_state_jc(&p, 0.0);
        assert!((v0[1].re - 1.0).abs() < 1e-15 && v0[2].norm() < 1e-15);
        for t in [0.3, 1.9, 7.7] {
            assert!((unitary_state_jc(&p, t).norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn resonant_rabi_flop() {
        // |<2|psi(t)>|^2 = sin^2(Omega_n t / 2) at resonance: the population
        // fully crosses to |-,1c> at T/2 and returns to |+,0c> at T.
        let p = JCParams::new(0.0, 0.0, 0.0);
        let v_half = unitary_state_jc(&p, p.period() / 2.0);
        assert!((v_half[2].norm_sqr() - 1.0).abs() < 1e-12, "full transfer at T/2");
        let v_full = unitary_state_jc(&p, p.period());
        assert!((v_full[1].norm() - 1.0).abs() < 1e-12, "return at T up to phase");
    }

    #[test]
    fn unitary_gp_full_period_values() {
        for delta in [0.0, 0.1, 2.0, 10.0] {
            let p = JCParams::new(delta, 0.0, 0.0);
            let gp = unitary_gp_jc(&p, p.period());
            let want = -PI * (1.0 - p.theta_n().cos());
            assert!(circ_dist(gp, want) < 1e-12, "delta {delta}: {gp} vs {want}");
        }
        // theta_n -> 0 limit
        let p = JCParams::new(1e4, 0.0, 0.0);
        assert!(unitary_gp_jc(&p, p.period()).abs() < 1e-4);
    }

    #[test]
    fn unitary_gp_matches_kinematic_functional() {
        use crate::phasefun::{kinematic_gp, StatePath};
        for (delta, frac) in [(0.4, 1.0), (1.5, 0.7), (0.0, 0.95)] {
            let p = JCParams::new(delta, 0.0, 0.0);
            let t_end = frac * p.period();
            let n = 60000;
            let times: Vec<f64> = (0..=n).map(|i| t_end * i as f64 / n as f64).collect();
            let states: Vec<CVec> = times.iter().map(|&t| unitary_state_jc(&p, t)).collect();
            let numeric = kinematic_gp(&StatePath::new(times, states)).unwrap();
            let closed = unitary_gp_jc(&p, t_end);
            assert!(
                circ_dist(numeric, closed) < 2e-6,
                "delta {delta} frac {frac}: numeric {numeric} closed {closed}"
            );
        }
    }

    #[test]
    fn lindblad_rejects_block_violation() {
        let mut m = CMat::zeros(3);
        m[(0, 0)] = c(0.5, 0.0);
        m[(1, 1)] = c(0.5, 0.0);
        m[(0, 1)] = c(0.3, 0.0);
        m[(1, 0)] = c(0.3, 0.0);
        let rho = DensityMatrix::new_unchecked(m);
        let p = JCParams::new(0.0, 0.1, 0.005);
        assert!(matches!(
            lindblad_evolve_jc(&p, &rho, &[0.0, 1.0]),
            Err(JcError::BlockViolation(_))
        ));
    }

    #[test]
    fn closed_system_limit_matches_unitary_state() {
        let p = JCParams::new(0.8, 0.0, 0.0);
        let rho0 = DensityMatrix::pure(&CVec::basis(3, 1));
        let ts: Vec<f64> = (0..=40).map(|i| i as f64 * p.period() / 40.0).collect();
        let sol = lindblad_evolve_jc(&p, &rho0, &ts).unwrap();
        for (k, t) in ts.iter().enumerate() {
            let psi = unitary_state_jc(&p, *t);
            let proj = DensityMatrix::pure(&psi);
            assert!(
                sol[k].mat().max_abs_diff(proj.mat()) < 1e-7,
                "t = {t}: {:.2e}",
                sol[k].mat().max_abs_diff(proj.mat())
            );
        }
    }

    #[test]
    fn no_pump_decays_to_ground() {
        let p = JCParams::new(0.5, 0.4, 0.0);
        let rho0 = DensityMatrix::pure(&CVec::basis(3, 1));
        let t_long = 60.0 * p.period();
        let sol = lindblad_evolve_jc(&p, &rho0, &[0.0, t_long]).unwrap();
        assert!(sol[1].mat()[(0, 0)].re > 1.0 - 1e-4);
    }

    #[test]
    fn weak_coupling_coherence_dies_fast() {
        let p = JCParams::new(2.0, 2.0, 0.005);
        let rho0 = DensityMatrix::pure(&CVec::basis(3, 1));
        let ts = [0.0, 5.0 * p.period()];
        let sol = lindblad_evolve_jc(&p, &rho0, &ts).unwrap();
        assert!(sol[1].mat()[(1, 2)].norm() < 5e-2);
    }

    #[test]
    fn trace_and_positivity_over_fifty_periods() {
        for (gamma, pump) in [(0.1, 0.005), (0.25, 0.005), (0.01, 0.002)] {
            let p = JCParams::new(0.3, gamma, pump);
            let ts: Vec<f64> = (0..=50).map(|i| i as f64 * p.period()).collect();
            let rho0 = DensityMatrix::pure(&CVec::basis(3, 1));
            let sol = lindblad_evolve_jc(&p, &rho0, &ts).unwrap();
            for rho in &sol {
                let tr = rho.mat().trace();
                assert!((tr.re - 1.0).abs() < 1e-8 && tr.im.abs() < 1e-12);
                assert!(rho.mat().hermiticity_defect() < 1e-9);
                let (vals, _) = rho.eig().unwrap();
                assert!(vals[vals.len() - 1] >= -1e-8);
            }
        }
    }

    #[test]
    fn open_gp_reduces_to_unitary_without_environment() {
        let p = JCParams::new(0.6, 0.0, 0.0);
        let out = open_gp_jc(&p, 0.8 * p.period(), 4096).unwrap();
        assert!(out.delta_phi.abs() < 1e-6, "delta_phi {}", out.delta_phi);
    }

    #[test]
    fn open_gp_resonant_robustness() {
        let p = JCParams::new(0.0, 0.1, 0.005);
        let out = open_gp_jc(&p, 3.0 * p.period(), 4096).unwrap();
        assert!(out.delta_phi.abs() < 1e-3 * PI, "delta_phi {}", out.delta_phi);
    }

    #[test]
    fn branch_tracking_matches_dense_rediagonalization() {
        use crate::qcore::track_branches;
        let p = JCParams::new(0.1, 0.1, 0.005);
        let t_end = p.period();
        let n = 400;
        let ts: Vec<f64> = (0..=n).map(|i| t_end * i as f64 / n as f64).collect();
        let rho0 = DensityMatrix::pure(&CVec::basis(3, 1));
        let sol = lindblad_evolve_jc(&p, &rho0, &ts).unwrap();
        let snaps: Vec<(f64, CMat)> = ts
            .iter()
            .zip(&sol)
            .map(|(&t, r)| (t, r.mat().hermitized()))
            .collect();
        let tracked = track_branches(&snaps).unwrap();
        let k = tracked.branch_closest_to(&CVec::basis(3, 1));
        for (i, rho) in sol.iter().enumerate() {
            let (_, v) = plus_branch(rho);
            let ov = tracked.eigenvectors[i][k].dot(&v).norm();
            assert!(ov > 1.0 - 1e-9, "sample {i}: overlap {ov}");
        }
    }
}
