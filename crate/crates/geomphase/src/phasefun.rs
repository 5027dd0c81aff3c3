//! Gauge-invariant phase functionals and circular statistics.
//!
//! All continuum integrals are realized as the gauge-invariant discrete
//! overlap sum `sum_k arg<psi(t_k)|psi(t_{k+1})>` rather than finite-difference
//! derivatives; every functional here is invariant under independent phase
//! rescaling of each input state. Phases are reported in (-pi, pi]; callers
//! needing values outside the principal branch (topological scans) unwrap by
//! continuity on their own parameter grids.

use crate::qcore::{eig_hermitian, C64, CVec, DensityMatrix, QcoreError};

/// Overlap magnitude below which a relative phase is considered undefined.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum PhaseError {
    #[error("states at link {link} are orthogonal (relative overlap {overlap:.3e})")]
    OrthogonalStates { link: usize, overlap: f64 },
    #[error("path endpoints are orthogonal (relative overlap {overlap:.3e})")]
    OrthogonalEndpoints { overlap: f64 },
    #[error("path too coarse: consecutive overlap {overlap:.4} <= 0.9 at link {link}")]
    CoarsePath { link: usize, overlap: f64 },
    #[error("degenerate spectrum along the path: gap {gap:.3e} <= 1e-9 at sample {index}")]
    DegenerateSpectrum { index: usize, gap: f64 },
    #[error("pure-state variant requested but rho(0) has rank > 1 (largest eigenvalue {w0:.6})")]
    RankMismatch { w0: f64 },
    #[error("empty phase ensemble")]
    EmptyEnsemble,
    #[error(transparent)]
    Core(#[from] QcoreError),
}

/// Wrap a phase to the principal branch (-pi, pi].
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = x.rem_euclid(std::f64::consts::TAU);
    if y > std::f64::consts::PI {
        y -= std::f64::consts::TAU;
    }
    y
}

/// Circular distance |wrap(a - b)|.
pub fn circ_dist(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

/// A time-ordered sequence of states; norms may drift but never vanish.
#[derive(Debug, Clone)]
pub struct StatePath {
    pub times: Vec<f64>,
    pub states: Vec<CVec>,
}

impl StatePath {
    pub fn new(times: Vec<f64>, states: Vec<CVec>) -> Self {
        assert_eq!(times.len(), states.len());
        assert!(times.len() >= 2, "a path needs at least two states");
        for w in times.windows(2) {
            assert!(w[1] > w[0], "path times must be strictly increasing");
        }
        for (i, s) in states.iter().enumerate() {
            assert!(s.norm() > 1e-12, "state {i} has norm below 1e-12");
        }
        Self { times, states }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn first(&self) -> &CVec {
        &self.states[0]
    }

    pub fn last(&self) -> &CVec {
        &self.states[self.states.len() - 1]
    }
}

/// Pancharatnam phase between two non-orthogonal states: arg<a|b>.
pub fn pancharatnam_pair(a: &CVec, b: &CVec) -> Result<f64, PhaseError> {
    let ov = a.dot(b);
    let rel = ov.norm() / (a.norm() * b.norm());
    if rel <= ORTHOGONALITY_TOL {
        return Err(PhaseError::OrthogonalStates { link: 0, overlap: rel });
    }
    Ok(ov.arg())
}

fn consecutive_args(states: &[CVec]) -> Result<f64, PhaseError> {
    let mut acc = 0.0;
    for (i, w) in states.windows(2).enumerate() {
        let ov = w[0].dot(&w[1]);
        let rel = ov.norm() / (w[0].norm() * w[1].norm());
        if rel <= ORTHOGONALITY_TOL {
            return Err(PhaseError::OrthogonalStates { link: i, overlap: rel });
        }
        acc += ov.arg();
    }
    Ok(acc)
}

/// Pancharatnam chain phase of a discrete state sequence:
/// `arg<psi_1|psi_N> - sum_k arg<psi_k|psi_{k+1}>`, reduced to (-pi, pi].
///
/// Invariant under independent phase rescaling of every state.
pub fn discrete_chain_phase(states: &[CVec]) -> Result<f64, PhaseError> {
    assert!(states.len() >= 2, "need at least two states");
    let first = &states[0];
    let last = &states[states.len() - 1];
    let end = first.dot(last);
    let rel = end.norm() / (first.norm() * last.norm());
    if rel <= ORTHOGONALITY_TOL {
        return Err(PhaseError::OrthogonalEndpoints { overlap: rel });
    }
    let dyn_sum = consecutive_args(states)?;
    Ok(wrap_phase(end.arg() - dyn_sum))
}

/// Kinematic geometric phase of a finely sampled normalized path:
/// total phase minus the dynamical overlap sum.
///
/// Requires every consecutive overlap above 0.9 (else `CoarsePath`) and
/// non-orthogonal endpoints.
pub fn kinematic_gp(path: &StatePath) -> Result<f64, PhaseError> {
    for (i, w) in path.states.windows(2).enumerate() {
        let rel = w[0].dot(&w[1]).norm() / (w[0].norm() * w[1].norm());
        if rel <= 0.9 {
            return Err(PhaseError::CoarsePath { link: i, overlap: rel });
        }
    }
    discrete_chain_phase(&path.states)
}

/// No-jump phase of a possibly unnormalized smooth path:
/// `arg<psi(0)|psi(T)> - Im int <psi|dpsi>/<psi|psi>`.
///
/// Identical to the chain functional (the overlap args divide out the norms);
/// equals `kinematic_gp` when norms are constant.
pub fn nojump_gp(path: &StatePath) -> Result<f64, PhaseError> {
    discrete_chain_phase(&path.states)
}

/// A piecewise-smooth monitored evolution: smooth segments separated by
/// jumps. Segment `i` ends with the pre-jump state; segment `i+1` starts with
/// the post-jump state (proportional to the jump operator applied to it).
#[derive(Debug, Clone)]
pub struct PiecewisePath {
    pub segments: Vec<StatePath>,
}

/// Geometric phase of a quantum trajectory: total endpoint phase minus the
/// smooth dynamical terms minus the per-jump Pancharatnam terms
/// `arg<psi(t_i)|K|psi(t_i)> = arg<pre|post>`.
pub fn trajectory_gp(path: &PiecewisePath) -> Result<f64, PhaseError> {
    assert!(!path.segments.is_empty());
    let first = path.segments[0].first();
    let last = path.segments[path.segments.len() - 1].last();
    let end = first.dot(last);
    let rel = end.norm() / (first.norm() * last.norm());
    if rel <= ORTHOGONALITY_TOL {
        return Err(PhaseError::OrthogonalEndpoints { overlap: rel });
    }
    let mut dyn_sum = 0.0;
    for seg in &path.segments {
        dyn_sum += consecutive_args(&seg.states)?;
    }
    let mut jump_sum = 0.0;
    for (i, w) in path.segments.windows(2).enumerate() {
        let pre = w[0].last();
        let post = w[1].first();
        let ov = pre.dot(post);
        let rel = ov.norm() / (pre.norm() * post.norm());
        if rel <= ORTHOGONALITY_TOL {
            return Err(PhaseError::OrthogonalStates { link: i, overlap: rel });
        }
        jump_sum += ov.arg();
    }
    Ok(wrap_phase(end.arg() - dyn_sum - jump_sum))
}

/// Mixed-state geometric phase of a density-matrix path, built from
/// parallel-transported eigenbranches:
/// `arg sum_k sqrt(w_k(0) w_k(T)) <v_k(0)|v_k(T)> e^{-i sum arg<v_k|v_k'>}`.
///
/// Only branches with nonzero initial weight contribute; they are continued
/// by max-overlap assignment. Active-branch eigenvalue gaps below 1e-9 are
/// refused as `DegenerateSpectrum`.
pub fn tong_gp(rho_path: &[(f64, DensityMatrix)]) -> Result<f64, PhaseError> {
    tong_gp_impl(rho_path, None)
}

/// Pure-initial-state variant: requires rank-1 rho(0) (largest eigenvalue
/// above `1 - 1e-9`) and reduces to the kinematic phase of the eigenbranch
/// continued from the initial state.
pub fn tong_gp_pure(rho_path: &[(f64, DensityMatrix)]) -> Result<f64, PhaseError> {
    let (vals, _) = rho_path[0].1.eig()?;
    if vals[0] < 1.0 - 1e-9 {
        return Err(PhaseError::RankMismatch { w0: vals[0] });
    }
    tong_gp_impl(rho_path, Some(1))
}

const WEIGHT_TOL: f64 = 1e-12;

fn tong_gp_impl(
    rho_path: &[(f64, DensityMatrix)],
    max_branches: Option<usize>,
) -> Result<f64, PhaseError> {
    assert!(rho_path.len() >= 2, "need at least two samples");
    let (vals0, vecs0) = rho_path[0].1.eig()?;
    let mut active: Vec<usize> = (0..vals0.len()).filter(|&k| vals0[k] > WEIGHT_TOL).collect();
    if let Some(mb) = max_branches {
        active.truncate(mb);
    }
    let n_active = active.len();
    let w0: Vec<f64> = active.iter().map(|&k| vals0[k]).collect();
    let v0: Vec<CVec> = active.iter().map(|&k| vecs0[k].clone()).collect();

    let mut prev = v0.clone();
    let mut dyn_sums = vec![0.0f64; n_active];
    let mut cur_vals = w0.clone();
    let mut cur_vecs = v0.clone();

    for (idx, (_, rho)) in rho_path.iter().enumerate().skip(1) {
        let (vals, vecs) = eig_hermitian(&rho.mat().hermitized())?;
        let mut used = vec![false; vals.len()];
        for (a, pv) in prev.iter().enumerate() {
            let mut best = usize::MAX;
            let mut best_ov = -1.0;
            let mut second = -1.0;
            for (j, w) in vecs.iter().enumerate() {
                if used[j] {
                    continue;
                }
                let ov = pv.dot(w).norm();
                if ov > best_ov {
                    second = best_ov;
                    best_ov = ov;
                    best = j;
                } else if ov > second {
                    second = ov;
                }
            }
            if second >= 0.0 && best_ov - second < 1e-6 {
                return Err(PhaseError::Core(QcoreError::AmbiguousBranch {
                    step: idx - 1,
                    margin: best_ov - second,
                }));
            }
            used[best] = true;
            let ov = pv.dot(&vecs[best]);
            if ov.norm() <= ORTHOGONALITY_TOL {
                return Err(PhaseError::OrthogonalStates { link: idx - 1, overlap: ov.norm() });
            }
            dyn_sums[a] += ov.arg();
            cur_vals[a] = vals[best];
            cur_vecs[a] = vecs[best].clone();
        }
        // non-degeneracy among the tracked branches
        for a in 0..n_active {
            for b in (a + 1)..n_active {
                let gap = (cur_vals[a] - cur_vals[b]).abs();
                if gap <= 1e-9 {
                    return Err(PhaseError::DegenerateSpectrum { index: idx, gap });
                }
            }
        }
        prev = cur_vecs.clone();
    }

    let mut z = C64::new(0.0, 0.0);
    for a in 0..n_active {
        let wt = (w0[a] * cur_vals[a].max(0.0)).sqrt();
        let end = v0[a].dot(&cur_vecs[a]);
        z += end * C64::from_polar(wt, -dyn_sums[a]);
    }
    if z.norm() <= ORTHOGONALITY_TOL {
        return Err(PhaseError::OrthogonalEndpoints { overlap: z.norm() });
    }
    Ok(z.arg())
}

/// Weighted histogram over a phase branch of width 2 pi or less, with
/// circular-statistics accessors.
#[derive(Debug, Clone)]
pub struct PhaseDistribution {
    lo: f64,
    hi: f64,
    weights: Vec<f64>,
    sample_count: usize,
    resultant: C64,
}

impl PhaseDistribution {
    pub fn n_bins(&self) -> usize {
        self.weights.len()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Normalized bin weights (sum 1).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        let w = (self.hi - self.lo) / self.weights.len() as f64;
        self.lo + (i as f64 + 0.5) * w
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        (0..self.weights.len()).map(|i| self.bin_center(i)).collect()
    }

    /// Circular mean over bin centers: arg(sum_j w_j e^{i phi_j}).
    pub fn circular_mean(&self) -> f64 {
        let z: C64 = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, &w)| C64::from_polar(w, self.bin_center(i)))
            .sum();
        z.arg()
    }

    /// Circular mean of the raw samples: arg(sum e^{i phi}).
    pub fn sample_circular_mean(&self) -> f64 {
        self.resultant.arg()
    }

    /// Resultant length |sum e^{i phi}| / N of the raw samples.
    pub fn resultant_length(&self) -> f64 {
        if self.sample_count == 0 {
            0.0
        } else {
            self.resultant.norm() / self.sample_count as f64
        }
    }

    /// Merge two compatible histograms (associative; for parallel reduction).
    pub fn merge(&self, other: &PhaseDistribution) -> PhaseDistribution {
        assert_eq!(self.weights.len(), other.weights.len());
        assert_eq!((self.lo, self.hi), (other.lo, other.hi));
        let n1 = self.sample_count as f64;
        let n2 = other.sample_count as f64;
        let total = n1 + n2;
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a * n1 + b * n2) / total)
            .collect();
        PhaseDistribution {
            lo: self.lo,
            hi: self.hi,
            weights,
            sample_count: self.sample_count + other.sample_count,
            resultant: self.resultant + other.resultant,
        }
    }
}

/// Histogram phases (wrapped to [-pi, pi)) into `n_bins` uniform bins.
pub fn make_distribution(phases: &[f64], n_bins: usize) -> Result<PhaseDistribution, PhaseError> {
    make_distribution_range(phases, n_bins, -std::f64::consts::PI, std::f64::consts::PI)
}

/// Histogram over an arbitrary branch `[lo, hi)`; values are folded by 2 pi
/// into the branch and edge-clamped.
pub fn make_distribution_range(
    phases: &[f64],
    n_bins: usize,
    lo: f64,
    hi: f64,
) -> Result<PhaseDistribution, PhaseError> {
    assert!(n_bins >= 2, "need at least two bins");
    assert!(hi > lo && hi - lo <= std::f64::consts::TAU + 1e-12);
    if phases.is_empty() {
        return Err(PhaseError::EmptyEnsemble);
    }
    let mut weights = vec![0.0f64; n_bins];
    let mut resultant = C64::new(0.0, 0.0);
    let width = (hi - lo) / n_bins as f64;
    for &p in phases {
        let folded = lo + (p - lo).rem_euclid(std::f64::consts::TAU);
        let idx = (((folded - lo) / width) as usize).min(n_bins - 1);
        weights[idx] += 1.0;
        resultant += C64::from_polar(1.0, p);
    }
    let n = phases.len() as f64;
    for w in &mut weights {
        *w /= n;
    }
    Ok(PhaseDistribution { lo, hi, weights, sample_count: phases.len(), resultant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::CMat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn bloch(theta: f64, phi: f64) -> CVec {
        CVec::new(vec![
            c((theta / 2.0).cos(), 0.0),
            C64::from_polar((theta / 2.0).sin(), phi),
        ])
    }

    #[test]
    fn pair_phase_examples() {
        let a = bloch(0.8, 0.3);
        assert!(pancharatnam_pair(&a, &a).unwrap().abs() < 1e-14);
        let b = a.scaled(C64::from_polar(1.0, PI / 3.0));
        assert!((pancharatnam_pair(&a, &b).unwrap() - PI / 3.0).abs() < 1e-14);
        let up = CVec::basis(2, 0);
        let dn = CVec::basis(2, 1);
        assert!(matches!(
            pancharatnam_pair(&up, &dn),
            Err(PhaseError::OrthogonalStates { .. })
        ));
    }

    #[test]
    fn chain_phase_two_states_is_zero() {
        let a = bloch(0.4, 0.1);
        let b = bloch(0.9, 2.0);
        assert!(discrete_chain_phase(&[a, b]).unwrap().abs() < 1e-14);
    }

    #[test]
    fn chain_phase_octant_triangle() {
        // Bloch vertices z, x, y enclose one octant (solid angle pi/2);
        // chain phase = -(solid angle)/2 = -pi/4.
        let z = bloch(0.0, 0.0);
        let x = bloch(FRAC_PI_2, 0.0);
        let y = bloch(FRAC_PI_2, FRAC_PI_2);
        let phi = discrete_chain_phase(&[z.clone(), x, y, z]).unwrap();
        assert!((phi + PI / 4.0).abs() < 1e-12, "phi = {phi}");
    }

    #[test]
    fn chain_phase_constant_states() {
        let a = bloch(1.1, 0.7);
        let states = vec![a.clone(), a.clone(), a.clone(), a];
        assert!(discrete_chain_phase(&states).unwrap().abs() < 1e-14);
    }

    #[test]
    fn kinematic_gp_static_spin_half_period() {
        // equatorial superposition under H = w/2 sz over one period: -pi
        let n = 20000;
        let t_end = TAU;
        let times: Vec<f64> = (0..=n).map(|i| t_end * i as f64 / n as f64).collect();
        let states: Vec<CVec> = times
            .iter()
            .map(|&t| {
                CVec::new(vec![
                    C64::from_polar((PI / 4.0).cos(), -t / 2.0),
                    C64::from_polar((PI / 4.0).sin(), t / 2.0),
                ])
            })
            .collect();
        let gp = kinematic_gp(&StatePath::new(times, states)).unwrap();
        assert!(circ_dist(gp, -PI) < 1e-6, "gp = {gp}");
    }

    #[test]
    fn kinematic_gp_pure_gauge_path_is_zero() {
        let base = bloch(0.7, 0.2);
        let times: Vec<f64> = (0..=100).map(|i| i as f64).collect();
        let states: Vec<CVec> = times
            .iter()
            .map(|&t| base.scaled(C64::from_polar(1.0, 0.03 * t)))
            .collect();
        let gp = kinematic_gp(&StatePath::new(times, states)).unwrap();
        assert!(gp.abs() < 1e-12);
    }

    #[test]
    fn kinematic_gp_flags_coarse_path() {
        let times = vec![0.0, 1.0, 2.0];
        let states = vec![bloch(0.0, 0.0), bloch(2.8, 0.0), bloch(0.1, 0.0)];
        assert!(matches!(
            kinematic_gp(&StatePath::new(times, states)),
            Err(PhaseError::CoarsePath { .. })
        ));
    }

    #[test]
    fn gauge_invariance_of_functionals() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 60;
        let _times: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let states: Vec<CVec> = (0..n)
            .map(|i| bloch(0.5 + 0.3 * (i as f64 * 0.05).sin(), 0.4 * i as f64 * 0.05))
            .collect();
        let base = discrete_chain_phase(&states).unwrap();
        for _ in 0..1000 {
            let gauged: Vec<CVec> = states
                .iter()
                .map(|s| s.scaled(C64::from_polar(1.0, rng.gen::<f64>() * TAU)))
                .collect();
            let g = discrete_chain_phase(&gauged).unwrap();
            assert!(circ_dist(g, base) < 1e-9);
        }
    }

    #[test]
    fn trajectory_gp_zero_jumps_equals_nojump() {
        let times: Vec<f64> = (0..=200).map(|i| i as f64 * 0.01).collect();
        let states: Vec<CVec> = times
            .iter()
            .map(|&t| bloch(0.6 + 0.1 * t, 0.8 * t).scaled(c((-0.05 * t).exp(), 0.0)))
            .collect();
        let path = StatePath::new(times, states);
        let a = nojump_gp(&path).unwrap();
        let b = trajectory_gp(&PiecewisePath { segments: vec![path] }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trajectory_gp_projector_jump_contributes_zero() {
        // jump applying K proportional to the projector onto the current
        // state: post = pre (up to positive factor): jump term 0.
        let times1: Vec<f64> = (0..=50).map(|i| i as f64 * 0.01).collect();
        let seg1: Vec<CVec> = times1.iter().map(|&t| bloch(0.5, 0.9 * t)).collect();
        let pre = seg1.last().unwrap().clone();
        let times2: Vec<f64> = (0..=50).map(|i| 0.5 + 1e-6 + i as f64 * 0.01).collect();
        let seg2: Vec<CVec> = times2
            .iter()
            .map(|&t| bloch(0.5, 0.9 * (t - 1e-6)).scaled(c(0.3, 0.0)))
            .collect();
        let split = trajectory_gp(&PiecewisePath {
            segments: vec![
                StatePath::new(times1.clone(), seg1.clone()),
                StatePath::new(times2.clone(), seg2.clone()),
            ],
        })
        .unwrap();
        // same chain without the artificial break
        let mut all_t = times1;
        all_t.extend_from_slice(&times2);
        let mut all_s = seg1;
        all_s.extend(seg2);
        let joined = discrete_chain_phase(&all_s).unwrap();
        let _ = pre;
        assert!(circ_dist(split, joined) < 1e-10);
        drop(all_t);
    }

    #[test]
    fn tong_reduces_to_kinematic_on_unitary_path() {
        // pure state precessing about z: rho(t) = |psi(t)><psi(t)|
        let n = 4000;
        let times: Vec<f64> = (0..=n).map(|i| TAU * i as f64 / n as f64).collect();
        let states: Vec<CVec> = times
            .iter()
            .map(|&t| {
                CVec::new(vec![
                    C64::from_polar((0.6f64).cos(), -t / 2.0),
                    C64::from_polar((0.6f64).sin(), t / 2.0),
                ])
            })
            .collect();
        let rho_path: Vec<(f64, DensityMatrix)> = times
            .iter()
            .zip(&states)
            .map(|(&t, s)| (t, DensityMatrix::pure(s)))
            .collect();
        let kin = kinematic_gp(&StatePath::new(times, states)).unwrap();
        let tong = tong_gp_pure(&rho_path).unwrap();
        assert!(circ_dist(kin, tong) < 1e-7, "kin {kin} tong {tong}");
    }

    #[test]
    fn tong_rejects_mixed_initial_state_in_pure_variant() {
        let m = CMat::from_rows(&[
            vec![c(0.6, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.4, 0.0)],
        ]);
        let rho = DensityMatrix::new(m).unwrap();
        let path = vec![(0.0, rho.clone()), (1.0, rho)];
        assert!(matches!(
            tong_gp_pure(&path),
            Err(PhaseError::RankMismatch { .. })
        ));
    }

    #[test]
    fn distribution_single_value() {
        let d = make_distribution(&[0.3; 50], 64).unwrap();
        assert_eq!(d.sample_count(), 50);
        let occupied: Vec<usize> = d
            .weights()
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(occupied.len(), 1);
        assert!((d.sample_circular_mean() - 0.3).abs() < 1e-12);
        assert!((d.circular_mean() - 0.3).abs() < TAU / 64.0);
    }

    #[test]
    fn distribution_uniform_grid_has_zero_resultant() {
        let n = 4096;
        let phases: Vec<f64> = (0..n).map(|i| -PI + TAU * i as f64 / n as f64).collect();
        let d = make_distribution(&phases, 64).unwrap();
        assert!(d.resultant_length() < 1e-10);
    }

    #[test]
    fn distribution_empty_errors() {
        assert!(matches!(
            make_distribution(&[], 8),
            Err(PhaseError::EmptyEnsemble)
        ));
    }

    #[test]
    fn merge_is_consistent() {
        let d1 = make_distribution(&[0.1, 0.2, 0.3], 16).unwrap();
        let d2 = make_distribution(&[-0.5, 1.0], 16).unwrap();
        let all = make_distribution(&[0.1, 0.2, 0.3, -0.5, 1.0], 16).unwrap();
        let merged = d1.merge(&d2);
        for i in 0..16 {
            assert!((merged.weights()[i] - all.weights()[i]).abs() < 1e-12);
        }
        assert!((merged.sample_circular_mean() - all.sample_circular_mean()).abs() < 1e-12);
    }
}
