//! Monitored dynamics of the driven spin: adiabatic jump operators, quantum
//! jump Monte Carlo stepper, analytic no-jump dynamics, phase and echo-fringe
//! distributions, and the topological invariant of the no-jump trajectory.
//!
//! Channels: relaxation and spontaneous excitation between the instantaneous
//! eigenstates, carrying the lab-frame sigma_x matrix elements (whose squared
//! magnitude is `f(t) = cos^2 t + sin^2 t sin^2(W t)`, the factor that also
//! drives the non-Hermitian no-jump Hamiltonian); dephasing along the
//! instantaneous eigenbasis with the secular (rotating-wave) constant element
//! `sin(t)/2`; and an optional fixed-axis channel `sqrt(g_z) sigma_z`.
//! Trajectories are reproducible: stream `(master seed, trajectory index)` on
//! a counter-based generator.

use crate::phasefun::{
    self, make_distribution, wrap_phase, PhaseDistribution, PhaseError, PiecewisePath, StatePath,
};
use crate::qcore::{C64, CMat, CVec, QcoreError};
use crate::spin_rotating::{instantaneous_eigenstates, kinematic_gp_closed, RotatingFieldParams};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Debug, thiserror::Error)]
pub enum TrajError {
    #[error("step too large: total jump probability {0:.3e} > 1e-2")]
    StepTooLarge(f64),
    #[error("too many discarded trajectories: {discarded} of {total}")]
    TooManyDiscards { discarded: usize, total: usize },
    #[error("no-jump endpoint overlap vanished near a phase singularity ({0:.3e})")]
    SingularPath(f64),
    #[error("singularity search did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Core(#[from] QcoreError),
}

/// Jump channel rates in units of the field amplitude.
#[derive(Debug, Clone, Copy)]
pub struct JumpChannelSet {
    pub gamma_minus: f64,
    pub gamma_plus: f64,
    pub gamma_d: f64,
    pub gamma_z: f64,
}

impl JumpChannelSet {
    /// Default channel mix for a dissipation scale `Gamma`:
    /// `g- = Gamma, g+ = 0, g_d = 0.32 Gamma`, plus the fixed-axis rate.
    pub fn from_dissipation_scale(gamma: f64, gamma_z: f64) -> Self {
        Self { gamma_minus: gamma, gamma_plus: 0.0, gamma_d: 0.32 * gamma, gamma_z }
    }

    pub fn total_scale(&self) -> f64 {
        self.gamma_minus
            .max(self.gamma_plus)
            .max(self.gamma_d)
            .max(self.gamma_z)
    }
}

/// Jump channel labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Minus,
    Plus,
    Dephase,
    AxisZ,
}

impl Channel {
    pub fn index(&self) -> usize {
        match self {
            Channel::Minus => 0,
            Channel::Plus => 1,
            Channel::Dephase => 2,
            Channel::AxisZ => 3,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Channel::Minus => "minus",
            Channel::Plus => "plus",
            Channel::Dephase => "dephase",
            Channel::AxisZ => "axis_z",
        }
    }
}

/// Lab-frame sigma_x matrix element `<psi_-|sx|psi_+>` at time t.
fn element_minus_plus(p: &RotatingFieldParams, t: f64) -> C64 {
    let half = p.theta / 2.0;
    let phi = p.azimuth(t);
    C64::from_polar(half.sin().powi(2), phi) - C64::from_polar(half.cos().powi(2), -phi)
}

/// The four jump operators as matrices at time t (zero-rate channels produce
/// zero matrices).
pub fn build_jump_operators(
    p: &RotatingFieldParams,
    ch: &JumpChannelSet,
    t: f64,
) -> Vec<CMat> {
    let (up, dn, _, _) = instantaneous_eigenstates(p, t);
    let m_mp = element_minus_plus(p, t);
    let l_minus = CMat::outer(&dn, &up).scaled(m_mp * ch.gamma_minus.sqrt());
    let l_plus = CMat::outer(&up, &dn).scaled(m_mp.conj() * ch.gamma_plus.sqrt());
    let dephase_element = 0.5 * p.theta.sin();
    let l_d = CMat::outer(&up, &up)
        .sub(&CMat::outer(&dn, &dn))
        .scaled(C64::new(ch.gamma_d.sqrt() * dephase_element, 0.0));
    let l_z = crate::qcore::pauli::sigma_z().scaled(C64::new(ch.gamma_z.sqrt(), 0.0));
    vec![l_minus, l_plus, l_d, l_z]
}

// Fast two-component state used by the stepper.
#[derive(Clone, Copy)]
struct Spinor {
    a: C64, // amplitude on |1>
    b: C64, // amplitude on |0>
}

impl Spinor {
    fn to_cvec(self) -> CVec {
        CVec::new(vec![self.a, self.b])
    }

    fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    fn normalized(self) -> Spinor {
        let n = self.norm();
        Spinor { a: self.a / n, b: self.b / n }
    }

    fn dot(&self, other: &Spinor) -> C64 {
        self.a.conj() * other.a + self.b.conj() * other.b
    }
}

// Per-run constants of the stepper.
struct StepContext {
    ch_half: f64,
    sh_half: f64,
    cos_theta: f64,
    h_ct: f64, // (w/2) cos theta
    h_st: f64, // (w/2) sin theta
    gm_dt: f64,
    gp_dt: f64,
    p_deph_dt: f64, // g_d sin^2(theta)/4 dt
    p_z_dt: f64,
    rot: C64, // e^{i Omega dt}: per-step azimuth increment
    dt: f64,
}

impl StepContext {
    fn new(p: &RotatingFieldParams, ch: &JumpChannelSet, dt: f64) -> Self {
        let s2 = p.theta.sin().powi(2);
        Self {
            ch_half: (p.theta / 2.0).cos(),
            sh_half: (p.theta / 2.0).sin(),
            cos_theta: p.theta.cos(),
            h_ct: 0.5 * p.omega * p.theta.cos(),
            h_st: 0.5 * p.omega * p.theta.sin(),
            gm_dt: ch.gamma_minus * dt,
            gp_dt: ch.gamma_plus * dt,
            p_deph_dt: ch.gamma_d * s2 / 4.0 * dt,
            p_z_dt: ch.gamma_z * dt,
            rot: C64::from_polar(1.0, p.omega_signed() * dt),
            dt,
        }
    }
}

/// One Monte Carlo step on the raw (possibly unnormalized) state, with the
/// field phase factor `e^{i phi(t)}` supplied by the caller.
///
/// With probability `p_alpha` the jump operator is applied (the result is
/// normalized); otherwise the no-jump Kraus drift
/// `K_o = 1 - i dt (H - i/2 sum L^dag L)` acts. The state-independent part of
/// `sum L^dag L` (dephasing and fixed-axis channels) is proportional to the
/// identity: it factors out of the exact drift as a global decay and cancels
/// in the renormalization, so it is omitted from the drift; this keeps the
/// conditional state exactly independent of those rates, as the continuous
/// map is. The probabilities use the normalized state via the tracked squared
/// norm `n2`.
#[inline(always)]
fn step_raw(
    psi: &mut Spinor,
    n2: &mut f64,
    e_phi: C64,
    ctx: &StepContext,
    r: f64,
) -> Result<Option<Channel>, TrajError> {
    let (a, b) = (psi.a, psi.b);
    let q = e_phi.conj() * b;
    let cp = ctx.ch_half * a + ctx.sh_half * q;
    let cm = ctx.sh_half * a - ctx.ch_half * q;
    // |<m|sx|p>|^2 = cos^2 t cos^2 phi + sin^2 phi
    let (cos_phi, sin_phi) = (e_phi.re, e_phi.im);
    let f_t = ctx.cos_theta * ctx.cos_theta * cos_phi * cos_phi + sin_phi * sin_phi;

    let inv_n2 = 1.0 / *n2;
    let p_minus = ctx.gm_dt * f_t * cp.norm_sqr() * inv_n2;
    let p_plus = ctx.gp_dt * f_t * cm.norm_sqr() * inv_n2;
    let p_total = p_minus + p_plus + ctx.p_deph_dt + ctx.p_z_dt;
    if p_total > 1e-2 {
        return Err(TrajError::StepTooLarge(p_total));
    }

    if r < p_total {
        // a jump happened: resolve the channel, renormalize exactly
        let up = Spinor { a: C64::new(ctx.ch_half, 0.0), b: ctx.sh_half * e_phi };
        let dn = Spinor { a: C64::new(ctx.sh_half, 0.0), b: -ctx.ch_half * e_phi };
        let channel;
        if r < p_minus {
            // m_mp = sh^2 e - ch^2 e*
            let m_mp = C64::new(-ctx.cos_theta * cos_phi, sin_phi);
            let amp = m_mp * cp;
            let phase = amp / amp.norm();
            psi.a = phase * dn.a;
            psi.b = phase * dn.b;
            channel = Channel::Minus;
        } else if r < p_minus + p_plus {
            let m_pm = C64::new(-ctx.cos_theta * cos_phi, -sin_phi);
            let amp = m_pm * cm;
            let phase = amp / amp.norm();
            psi.a = phase * up.a;
            psi.b = phase * up.b;
            channel = Channel::Plus;
        } else if r < p_minus + p_plus + ctx.p_deph_dt {
            let s = 1.0 / n2.sqrt();
            psi.a = (cp * up.a - cm * dn.a) * s;
            psi.b = (cp * up.b - cm * dn.b) * s;
            channel = Channel::Dephase;
        } else {
            let s = 1.0 / n2.sqrt();
            psi.a = a * s;
            psi.b = -b * s;
            channel = Channel::AxisZ;
        }
        *n2 = 1.0;
        return Ok(Some(channel));
    }

    // no-jump drift
    let h_ab = ctx.h_st * e_phi.conj();
    let ha = ctx.h_ct * a + h_ab * b;
    let hb = h_ab.conj() * a - ctx.h_ct * b;
    let gmf = ctx.gm_dt * f_t * 0.5;
    let gpf = ctx.gp_dt * f_t * 0.5;
    // rank part of (dt/2) sum L^dag L acting on psi
    let la = gmf * cp * ctx.ch_half + gpf * cm * ctx.sh_half;
    let lb = (gmf * cp * ctx.sh_half - gpf * cm * ctx.ch_half) * e_phi;
    psi.a = a - C64::i() * ctx.dt * ha - la;
    psi.b = b - C64::i() * ctx.dt * hb - lb;
    *n2 = psi.norm_sqr();
    Ok(None)
}

/// Public single-step interface over plain state vectors.
pub fn mc_step(
    state: &CVec,
    t: f64,
    dt: f64,
    p: &RotatingFieldParams,
    ch: &JumpChannelSet,
    rng: &mut impl RngCore,
) -> Result<(CVec, Option<Channel>), TrajError> {
    let mut psi = Spinor { a: state[0], b: state[1] };
    let mut n2 = psi.norm_sqr();
    let ctx = StepContext::new(p, ch, dt);
    let e_phi = C64::from_polar(1.0, p.azimuth(t));
    let r: f64 = rng.gen();
    let ev = step_raw(&mut psi, &mut n2, e_phi, &ctx, r)?;
    if ev.is_none() {
        psi = psi.normalized();
    }
    Ok((psi.to_cvec(), ev))
}

/// Total jump probability per step (for bookkeeping tests): `sum p_alpha` and
/// the no-jump weight `<psi| K_o^dag K_o |psi>`.
pub fn step_probabilities(
    state: &CVec,
    t: f64,
    dt: f64,
    p: &RotatingFieldParams,
    ch: &JumpChannelSet,
) -> (f64, f64) {
    let ops = build_jump_operators(p, ch, t);
    let mut p_sum = 0.0;
    for op in &ops {
        let v = op.mul_vec(state);
        p_sum += v.norm_sqr() * dt;
    }
    // K_o psi = psi - i dt H psi - dt/2 sum L^dag L psi
    let h = p.hamiltonian(t);
    let mut ko = state.add(&h.mul_vec(state).scaled(C64::new(0.0, -dt)));
    for op in &ops {
        let v = op.adjoint().mul_vec(&op.mul_vec(state));
        ko = ko.sub(&v.scaled(C64::new(0.5 * dt, 0.0)));
    }
    (p_sum, ko.norm_sqr())
}

// Observer of the stepped evolution: receives cadence samples, jumps with
// pre/post states, and the endpoints. States passed raw (unnormalized).
trait StepSink {
    fn start(&mut self, t: f64, psi: Spinor);
    fn sample(&mut self, t: f64, psi: Spinor);
    fn jump(&mut self, t: f64, t_next: f64, channel: Channel, pre: Spinor, post: Spinor);
    fn finish(&mut self, t: f64, psi: Spinor);
}

// Builds the full TrajectoryRecord.
struct RecordSink {
    jumps: Vec<(f64, Channel)>,
    jump_pre_states: Vec<CVec>,
    segments: Vec<StatePath>,
    seg_times: Vec<f64>,
    seg_states: Vec<CVec>,
}

impl RecordSink {
    fn new() -> Self {
        Self {
            jumps: Vec::new(),
            jump_pre_states: Vec::new(),
            segments: Vec::new(),
            seg_times: Vec::new(),
            seg_states: Vec::new(),
        }
    }
}

impl StepSink for RecordSink {
    fn start(&mut self, t: f64, psi: Spinor) {
        self.seg_times.push(t);
        self.seg_states.push(psi.normalized().to_cvec());
    }

    fn sample(&mut self, t: f64, psi: Spinor) {
        self.seg_times.push(t);
        self.seg_states.push(psi.normalized().to_cvec());
    }

    fn jump(&mut self, t: f64, t_next: f64, channel: Channel, pre: Spinor, post: Spinor) {
        let pre_n = pre.normalized().to_cvec();
        if *self.seg_times.last().unwrap() < t {
            self.seg_times.push(t);
            self.seg_states.push(pre_n.clone());
        }
        self.jumps.push((t, channel));
        self.jump_pre_states.push(pre_n);
        self.segments.push(StatePath::new(
            std::mem::take(&mut self.seg_times),
            std::mem::take(&mut self.seg_states),
        ));
        self.seg_times.push(t_next);
        self.seg_states.push(post.normalized().to_cvec());
    }

    fn finish(&mut self, t: f64, psi: Spinor) {
        if *self.seg_times.last().unwrap() < t {
            self.seg_times.push(t);
            self.seg_states.push(psi.normalized().to_cvec());
        }
        self.segments.push(StatePath::new(
            std::mem::take(&mut self.seg_times),
            std::mem::take(&mut self.seg_states),
        ));
    }
}

// O(1)-memory accumulator of the trajectory phase functional: identical
// chain structure to the record + trajectory_gp route.
struct PhaseSink {
    psi0: Spinor,
    last: Spinor,
    dyn_sum: f64,
    jump_sum: f64,
    endpoint: C64,
    degenerate_link: bool,
}

impl PhaseSink {
    fn new() -> Self {
        let z = Spinor { a: C64::new(0.0, 0.0), b: C64::new(0.0, 0.0) };
        Self { psi0: z, last: z, dyn_sum: 0.0, jump_sum: 0.0, endpoint: C64::new(0.0, 0.0), degenerate_link: false }
    }

    fn push_link(&mut self, next: &Spinor) {
        let ov = self.last.dot(next);
        if ov.norm_sqr() <= 1e-24 * self.last.norm_sqr() * next.norm_sqr() {
            self.degenerate_link = true;
        } else {
            self.dyn_sum += ov.arg();
        }
    }

    fn phase(&self) -> Result<f64, PhaseError> {
        if self.degenerate_link {
            return Err(PhaseError::OrthogonalStates { link: 0, overlap: 0.0 });
        }
        let rel = self.endpoint.norm_sqr()
            / (self.psi0.norm_sqr() * self.last.norm_sqr()).max(1e-300);
        if rel <= 1e-24 {
            return Err(PhaseError::OrthogonalEndpoints { overlap: rel.sqrt() });
        }
        Ok(crate::phasefun::wrap_phase(
            self.endpoint.arg() - self.dyn_sum - self.jump_sum,
        ))
    }
}

impl StepSink for PhaseSink {
    fn start(&mut self, _t: f64, psi: Spinor) {
        self.psi0 = psi;
        self.last = psi;
    }

    fn sample(&mut self, _t: f64, psi: Spinor) {
        self.push_link(&psi);
        self.last = psi;
    }

    fn jump(&mut self, _t: f64, _t_next: f64, _channel: Channel, pre: Spinor, post: Spinor) {
        self.push_link(&pre);
        let ov = pre.dot(&post);
        if ov.norm_sqr() <= 1e-24 * pre.norm_sqr() * post.norm_sqr() {
            self.degenerate_link = true;
        } else {
            self.jump_sum += ov.arg();
        }
        self.last = post;
    }

    fn finish(&mut self, _t: f64, psi: Spinor) {
        self.push_link(&psi);
        self.last = psi;
        self.endpoint = self.psi0.dot(&psi);
    }
}

// Keeps only the final state (echo protocols).
struct NullSink {
    last: Spinor,
}

impl StepSink for NullSink {
    fn start(&mut self, _t: f64, psi: Spinor) {
        self.last = psi;
    }
    fn sample(&mut self, _t: f64, _psi: Spinor) {}
    fn jump(&mut self, _t: f64, _t_next: f64, _c: Channel, _pre: Spinor, post: Spinor) {
        self.last = post;
    }
    fn finish(&mut self, _t: f64, psi: Spinor) {
        self.last = psi;
    }
}

/// Core monitored-evolution loop over `[t0, t0 + t_span]`. The field phase
/// factor advances by one complex multiplication per step and is
/// re-normalized every 4096 steps.
#[allow(clippy::too_many_arguments)]
fn run_core<S: StepSink>(
    p: &RotatingFieldParams,
    ch: &JumpChannelSet,
    psi0: &CVec,
    t0: f64,
    t_span: f64,
    opts: &McOptions,
    rng: &mut ChaCha8Rng,
    sink: &mut S,
) -> Result<Vec<(f64, Channel)>, TrajError> {
    let n_steps = (t_span / opts.dt).ceil() as usize;
    let dt = t_span / n_steps as f64;
    let ctx = StepContext::new(p, ch, dt);
    let mut psi = Spinor { a: psi0[0], b: psi0[1] };
    let mut n2 = psi.norm_sqr();
    let mut e_phi = C64::from_polar(1.0, p.azimuth(t0));
    let mut jumps = Vec::new();

    sink.start(t0, psi);
    for k in 0..n_steps {
        let pre = psi;
        let r: f64 = rng.gen();
        let ev = step_raw(&mut psi, &mut n2, e_phi, &ctx, r)?;
        let t = t0 + k as f64 * dt;
        let t_next = t0 + (k + 1) as f64 * dt;
        match ev {
            Some(channel) => {
                jumps.push((t, channel));
                sink.jump(t, t_next, channel, pre, psi);
            }
            None => {
                if (k + 1) % opts.sample_every == 0 && k + 1 < n_steps {
                    sink.sample(t_next, psi);
                }
            }
        }
        e_phi *= ctx.rot;
        if k % 4096 == 4095 {
            e_phi /= e_phi.norm();
        }
    }
    sink.finish(t0 + t_span, psi);
    Ok(jumps)
}
/// Stepper controls.
#[derive(Debug, Clone, Copy)]
pub struct McOptions {
    pub dt: f64,
    /// Record one state sample every `sample_every` steps.
    pub sample_every: usize,
}

impl McOptions {
    /// Default step `min(T/20000, 0.01/max rate)` and a sampling cadence of
    /// about 0.1 rad of drive phase.
    pub fn default_for(p: &RotatingFieldParams, ch: &JumpChannelSet) -> Self {
        let t_period = p.period();
        let max_rate = p
            .omega
            .abs()
            .max(p.omega_rot.abs())
            .max(ch.total_scale());
        let dt = (t_period / 20000.0).min(0.01 / max_rate);
        let sample_every = ((0.1 / (p.omega * dt)).floor() as usize).max(1);
        Self { dt, sample_every }
    }
}

/// One realized monitored evolution.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub master_seed: u64,
    pub stream: u64,
    pub dt: f64,
    /// Ordered jump events (time, channel).
    pub jumps: Vec<(f64, Channel)>,
    /// Pre-jump states, one per jump.
    pub jump_pre_states: Vec<CVec>,
    /// Piecewise-smooth sampled states: one segment per smooth interval,
    /// beginning with the (post-jump) entry state and ending with the
    /// pre-jump state.
    pub segments: Vec<StatePath>,
}

impl TrajectoryRecord {
    pub fn n_jumps(&self) -> usize {
        self.jumps.len()
    }

    pub fn piecewise_path(&self) -> PiecewisePath {
        PiecewisePath { segments: self.segments.clone() }
    }

    /// Geometric phase of the trajectory (total endpoint phase minus smooth
    /// dynamical terms minus per-jump terms).
    pub fn geometric_phase(&self) -> Result<f64, PhaseError> {
        phasefun::trajectory_gp(&self.piecewise_path())
    }

    /// Final state of the record.
    pub fn final_state(&self) -> &CVec {
        self.segments.last().unwrap().last()
    }
}

fn rng_for(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Run a single trajectory from `psi_+(0)` over the given span, deterministic
/// for a fixed `(master_seed, stream)`.
pub fn run_trajectory(
    p: &RotatingFieldParams,
    ch: &JumpChannelSet,
    t_span: f64,
    opts: &McOptions,
    master_seed: u64,
    stream: u64,
) -> Result<TrajectoryRecord, TrajError> {
    let (plus0, _, _, _) = instantaneous_eigenstates(p, 0.0);
    let mut rng = rng_for(master_seed, stream);
    let mut sink = RecordSink::new();
    let jumps = run_core(p, ch, &plus0, 0.0, t_span, opts, &mut rng, &mut sink)?;
    Ok(TrajectoryRecord {
        master_seed,
        stream,
        dt: opts.dt,
        jumps,
        jump_pre_states: std::mem::take(&mut sink.jump_pre_states),
        segments: std::mem::take(&mut sink.segments),
    })
}

/// Run one trajectory and return only its geometric phase and jump count
/// (identical chain arithmetic to `run_trajectory` + `geometric_phase`, with
/// constant memory).
pub fn run_trajectory_phase(
    p: &RotatingFieldParams,
    ch: &JumpChannelSet,
    t_span: f64,
    opts: &McOptions,
    master_seed: u64,
    stream: u64,
) -> Result<(f64, usize), TrajError> {
    let (plus0, _, _, _) = instantaneous_eigenstates(p, 0.0);
    let mut rng = rng_for(master_seed, stream);
    let mut sink = PhaseSink::new();
    let jumps = run_core(p, ch, &plus0, 0.0, t_span, opts, &mut rng, &mut sink)?;
    Ok((sink.phase()?, jumps.len()))
}

/// Deterministic no-jump propagation (the smooth Kraus drift only), sampled
/// every `sample_every` steps.
pub fn propagate_nojump(
    p: &RotatingFieldParams,
    ch: &JumpChannelSet,
    psi0: &CVec,
    t_span: f64,
    opts: &McOptions,
) -> Result<StatePath, TrajError> {
    propagate_nojump_from(p, ch, psi0, 0.0, t_span, opts)
}

/// No-jump propagation starting at an arbitrary clock time (the field azimuth
/// follows the parameters' own phase convention).
pub fn propagate_nojump_from(
    p: &RotatingFieldParams,
    ch: &JumpChannelSet,
    psi0: &CVec,
    t0: f64,
    t_span: f64,
    opts: &McOptions,
) -> Result<StatePath, TrajError> {
    let n_steps = (t_span / opts.dt).ceil() as usize;
    let dt = t_span / n_steps as f64;
    let ctx = StepContext::new(p, ch, dt);
    let mut psi = Spinor { a: psi0[0], b: psi0[1] };
    let mut n2 = psi.norm_sqr();
    let mut e_phi = C64::from_polar(1.0, p.azimuth(t0));
    let mut times = vec![t0];
    let mut states = vec![psi.normalized().to_cvec()];
    for k in 0..n_steps {
        // r = 2 never selects a jump
        step_raw(&mut psi, &mut n2, e_phi, &ctx, 2.0)?;
        if (k + 1) % opts.sample_every == 0 || k + 1 == n_steps {
            times.push(t0 + (k + 1) as f64 * dt);
            states.push(psi.normalized().to_cvec());
        }
        e_phi *= ctx.rot;
        if k % 4096 == 4095 {
            e_phi /= e_phi.norm();
        }
    }
    Ok(StatePath::new(times, states))
}

/// Complex drift parameters of the mean-field no-jump solution:
/// `nu = w - W cos t - i (g_-/2)(1 - sin^2 t / 2)` and
/// `eps = sqrt(nu^2 + W^2 sin^2 t)`.
pub fn nojump_nu_eps(p: &RotatingFieldParams, ch: &JumpChannelSet) -> (C64, C64) {
    let om = p.omega_signed();
    let s2 = p.theta.sin().powi(2);
    let fbar = 1.0 - 0.5 * s2;
    let nu = C64::new(p.omega - om * p.theta.cos(), -0.5 * ch.gamma_minus * fbar);
    let eps = (nu * nu + C64::new((om * p.theta.sin()).powi(2), 0.0)).sqrt();
    (nu, eps)
}

/// Closed-form no-jump state at time t under the mean-field replacement
/// `f(t) ~ 1 - sin^2(t)/2`: returns the normalized state and the
/// pre-normalization norm of the drift solution.
pub fn nojump_state_analytic(
    p: &RotatingFieldParams,
    ch: &JumpChannelSet,
    t: f64,
) -> (CVec, f64) {
    let (nu, eps) = nojump_nu_eps(p, ch);
    let om = p.omega_signed();
    let half = eps * (0.5 * t);
    let (cos_h, sin_h) = (half.cos(), half.sin());
    let cp = cos_h - C64::i() * (nu / eps) * sin_h;
    let cm = C64::i() * (om * p.theta.sin() / eps) * sin_h;
    let (up, dn, _, _) = instantaneous_eigenstates(p, t);
    let global = C64::from_polar(1.0, -0.5 * om * t);
    let raw = up.scaled(global * cp).add(&dn.scaled(global * cm));
    let norm = raw.norm();
    (raw.scaled(C64::new(1.0 / norm, 0.0)), norm)
}

/// Analytic no-jump path sampled on `n + 1` points (unnormalized amplitudes
/// carry the decaying norm).
pub fn nojump_path_analytic(
    p: &RotatingFieldParams,
    ch: &JumpChannelSet,
    t_end: f64,
    n: usize,
) -> StatePath {
    let times: Vec<f64> = (0..=n).map(|i| t_end * i as f64 / n as f64).collect();
    let states = times
        .iter()
        .map(|&t| {
            let (psi, norm) = nojump_state_analytic(p, ch, t);
            psi.scaled(C64::new(norm.max(1e-280), 0.0))
        })
        .collect();
    StatePath::new(times, states)
}

/// No-jump geometric phase over one period from the analytic mean-field
/// state, principal branch.
pub fn nojump_phi0(p: &RotatingFieldParams, ch: &JumpChannelSet) -> Result<f64, TrajError> {
    let t_period = p.period();
    let n = ((p.omega * t_period / 0.25).ceil() as usize).max(2000);
    let path = nojump_path_analytic(p, ch, t_period, n);
    Ok(phasefun::nojump_gp(&path)?)
}

/// References attached to a phase ensemble.
#[derive(Debug, Clone, Copy)]
pub struct PhaseReferences {
    /// Adiabatic value `-pi (1 - cos theta)`, wrapped.
    pub phi_adiabatic: f64,
    /// No-jump phase, wrapped.
    pub phi_nojump: f64,
    /// Unitary kinematic phase of the same drive, wrapped.
    pub phi_unitary: f64,
    /// First circular moment of the sampled distribution.
    pub phi_mean: f64,
}

/// Ensemble of trajectory phases.
#[derive(Debug, Clone)]
pub struct PhaseEnsemble {
    pub distribution: PhaseDistribution,
    pub references: PhaseReferences,
    pub mean_jumps: f64,
    pub std_jumps: f64,
    pub discarded: usize,
    pub n_requested: usize,
}

/// Sample `n_traj` monitored trajectories over one drive period and histogram
/// their geometric phases. Per-trajectory failures (orthogonal overlaps) are
/// discarded and counted; more than 1% discards is an error.
pub fn phase_ensemble(
    p: &RotatingFieldParams,
    ch: &JumpChannelSet,
    n_traj: usize,
    n_bins: usize,
    master_seed: u64,
    opts: &McOptions,
) -> Result<PhaseEnsemble, TrajError> {
    assert!(n_traj >= 100, "ensembles need at least 100 trajectories");
    let t_period = p.period();
    let results: Vec<Result<(f64, usize), ()>> = (0..n_traj)
        .into_par_iter()
        .map(|i| run_trajectory_phase(p, ch, t_period, opts, master_seed, i as u64).map_err(|_| ()))
        .collect();

    let mut phases = Vec::with_capacity(n_traj);
    let mut jumps = Vec::with_capacity(n_traj);
    let mut discarded = 0;
    for r in results {
        match r {
            Ok((phi, nj)) => {
                phases.push(phi);
                jumps.push(nj as f64);
            }
            Err(()) => discarded += 1,
        }
    }
    if discarded * 100 >= n_traj {
        return Err(TrajError::TooManyDiscards { discarded, total: n_traj });
    }
    let distribution = make_distribution(&phases, n_bins)?;
    let mean_jumps = jumps.iter().sum::<f64>() / jumps.len() as f64;
    let var = jumps.iter().map(|x| (x - mean_jumps).powi(2)).sum::<f64>() / jumps.len() as f64;
    let references = PhaseReferences {
        phi_adiabatic: wrap_phase(-PI * (1.0 - p.theta.cos())),
        phi_nojump: wrap_phase(nojump_phi0(p, ch)?),
        phi_unitary: wrap_phase(kinematic_gp_closed(p)?),
        phi_mean: distribution.sample_circular_mean(),
    };
    Ok(PhaseEnsemble {
        distribution,
        references,
        mean_jumps,
        std_jumps: (var / jumps.len() as f64).sqrt(),
        discarded,
        n_requested: n_traj,
    })
}

/// Echo branch `(pi, 3 pi/2]`: persistence `P = cos^2(2 phi~)` inverted as
/// `phi~ = pi + acos(-sqrt(P))/2`, which lands in `[1.25 pi, 1.5 pi]`.
pub fn echo_parameter(persistence: f64) -> f64 {
    let p = persistence.clamp(0.0, 1.0);
    PI + 0.5 * (-p.sqrt()).acos()
}

/// Echo-fringe ensemble summary.
#[derive(Debug, Clone)]
pub struct EchoEnsemble {
    pub distribution: PhaseDistribution,
    pub mean_jumps: f64,
    /// Echo parameter of the jump-free protocol.
    pub nojump_phi_tilde: f64,
    pub discarded: usize,
    pub n_requested: usize,
}

/// Run one full echo protocol under monitoring and return the persistence
/// probability and jump count.
fn echo_realization(
    p: &RotatingFieldParams,
    ch: &JumpChannelSet,
    opts: &McOptions,
    master_seed: u64,
    stream: u64,
) -> Result<(f64, usize), TrajError> {
    let mut rng = rng_for(master_seed, stream);
    echo_with_steps(p, ch, opts, &mut rng)
}

fn echo_with_steps(
    p: &RotatingFieldParams,
    ch: &JumpChannelSet,
    opts: &McOptions,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, usize), TrajError> {
    let t_period = p.period();
    let (up0, dn0, _, _) = instantaneous_eigenstates(p, 0.0);
    let psi0 = up0.add(&dn0).scaled(C64::new(1.0 / 2f64.sqrt(), 0.0));
    let zero = Spinor { a: C64::new(0.0, 0.0), b: C64::new(0.0, 0.0) };
    let mut sink = NullSink { last: zero };
    let jumps1 = run_core(p, ch, &psi0, 0.0, t_period, opts, rng, &mut sink)?;
    let mid = sink.last.normalized().to_cvec();
    // instantaneous eigenstate swap at t = T
    let (up_t, dn_t, _, _) = instantaneous_eigenstates(p, t_period);
    let cp = up_t.dot(&mid);
    let cm = dn_t.dot(&mid);
    let swapped = dn_t.scaled(cp).add(&up_t.scaled(cm));
    // reversed second cycle with continuous field azimuth, monitored
    let rev = p.reversed_at(t_period);
    let mut sink2 = NullSink { last: zero };
    let jumps2 = run_core(&rev, ch, &swapped, t_period, t_period, opts, rng, &mut sink2)?;
    let persistence = psi0.dot(&sink2.last.normalized().to_cvec()).norm_sqr();
    Ok((persistence, jumps1.len() + jumps2.len()))
}

/// Echo protocol without jumps (smooth drift only), for the no-jump fringe
/// reference.
pub fn echo_nojump_persistence(
    p: &RotatingFieldParams,
    ch: &JumpChannelSet,
    opts: &McOptions,
) -> Result<f64, TrajError> {
    let t_period = p.period();
    let (up0, dn0, _, _) = instantaneous_eigenstates(p, 0.0);
    let psi0 = up0.add(&dn0).scaled(C64::new(1.0 / 2f64.sqrt(), 0.0));
    let path1 = propagate_nojump(p, ch, &psi0, t_period, opts)?;
    let mid = path1.last();
    let (up_t, dn_t, _, _) = instantaneous_eigenstates(p, t_period);
    let swapped = dn_t.scaled(up_t.dot(mid)).add(&up_t.scaled(dn_t.dot(mid)));
    let rev = p.reversed_at(t_period);
    let path2 = propagate_nojump_from(&rev, ch, &swapped, t_period, t_period, opts)?;
    Ok(psi0.dot(path2.last()).norm_sqr())
}

/// Sample `n_traj` echo protocols and histogram the fringe parameter on the
/// branch `(pi, 3 pi/2]`.
pub fn echo_ensemble(
    p: &RotatingFieldParams,
    ch: &JumpChannelSet,
    n_traj: usize,
    n_bins: usize,
    master_seed: u64,
    opts: &McOptions,
) -> Result<EchoEnsemble, TrajError> {
    assert!(n_traj >= 100, "ensembles need at least 100 trajectories");
    let results: Vec<Result<(f64, usize), ()>> = (0..n_traj)
        .into_par_iter()
        .map(|i| echo_realization(p, ch, opts, master_seed, i as u64).map_err(|_| ()))
        .collect();
    let mut phis = Vec::with_capacity(n_traj);
    let mut jumps = Vec::with_capacity(n_traj);
    let mut discarded = 0;
    for r in results {
        match r {
            Ok((persistence, nj)) => {
                phis.push(echo_parameter(persistence));
                jumps.push(nj as f64);
            }
            Err(()) => discarded += 1,
        }
    }
    if discarded * 100 >= n_traj {
        return Err(TrajError::TooManyDiscards { discarded, total: n_traj });
    }
    let distribution =
        phasefun::make_distribution_range(&phis, n_bins, PI, 1.5 * PI)?;
    let mean_jumps = jumps.iter().sum::<f64>() / jumps.len() as f64;
    let nojump_p = echo_nojump_persistence(p, ch, opts)?;
    Ok(EchoEnsemble {
        distribution,
        mean_jumps,
        nojump_phi_tilde: echo_parameter(nojump_p),
        discarded,
        n_requested: n_traj,
    })
}

/// Unwrapped no-jump phase curve over the polar angle and its integer
/// invariant `n = round(phi_0(pi) / 2 pi)`.
#[derive(Debug, Clone)]
pub struct TopoScan {
    pub curve: Vec<(f64, f64)>,
    pub invariant: i64,
}

/// Scan `phi_0(theta)` from 0 to pi with continuity fixing `phi_0(0) = 0`,
/// refining adaptively until consecutive unwrapped steps are below pi/2.
pub fn topo_scan(
    omega_rot: f64,
    gamma: f64,
    n_theta: usize,
    gamma_z: f64,
) -> Result<TopoScan, TrajError> {
    let ch = JumpChannelSet::from_dissipation_scale(gamma, gamma_z);
    let phi_at = |theta: f64| -> Result<f64, TrajError> {
        if theta == 0.0 {
            return Ok(0.0);
        }
        let p = RotatingFieldParams::new(1.0, omega_rot, theta);
        let t_period = p.period();
        let n = ((t_period / 0.25).ceil() as usize).max(2000);
        let path = nojump_path_analytic(&p, &ch, t_period, n);
        let first = path.first();
        let last = path.last();
        let rel = first.dot(last).norm() / (first.norm() * last.norm());
        if rel < 1e-10 {
            return Err(TrajError::SingularPath(rel));
        }
        Ok(phasefun::nojump_gp(&path)?)
    };

    let mut thetas: Vec<f64> = (0..=n_theta).map(|i| PI * i as f64 / n_theta as f64).collect();
    let mut values: Vec<f64> = Vec::with_capacity(thetas.len());
    for &th in &thetas {
        values.push(phi_at(th)?);
    }
    // adaptive refinement: unwrapped steps must stay below pi/2
    let mut guard = 0;
    loop {
        let mut inserted = false;
        let mut i = 0;
        while i + 1 < thetas.len() {
            let jump = wrap_phase(values[i + 1] - values[i]).abs();
            if jump >= PI / 2.0 && thetas[i + 1] - thetas[i] > 1e-9 {
                let mid = 0.5 * (thetas[i] + thetas[i + 1]);
                let v = phi_at(mid)?;
                thetas.insert(i + 1, mid);
                values.insert(i + 1, v);
                inserted = true;
            } else {
                i += 1;
            }
        }
        guard += 1;
        if !inserted || guard > 40 {
            break;
        }
    }
    // continuity-fixed unwrapped curve
    let mut curve = Vec::with_capacity(thetas.len());
    let mut acc = 0.0;
    let mut prev = 0.0;
    for (i, &th) in thetas.iter().enumerate() {
        if i > 0 {
            acc += wrap_phase(values[i] - prev);
        }
        prev = values[i];
        curve.push((th, acc));
    }
    let invariant = (curve.last().unwrap().1 / (2.0 * PI)).round() as i64;
    Ok(TopoScan { curve, invariant })
}

/// The no-jump endpoint-orthogonality condition whose roots are the phase
/// singularities: `(nu + eps) - (nu - eps) e^{2 pi i eps / W}`.
pub fn singularity_condition(theta: f64, omega_rot: f64, gamma: f64) -> C64 {
    let p = RotatingFieldParams::new(1.0, omega_rot, theta);
    let ch = JumpChannelSet::from_dissipation_scale(gamma, 0.0);
    let (nu, eps) = nojump_nu_eps(&p, &ch);
    let phase = (C64::i() * eps * (2.0 * PI / omega_rot)).exp();
    (nu + eps) - (nu - eps) * phase
}

/// Locate a singular point of the no-jump phase in the given rectangle by
/// damped Newton iteration on the complex condition; residual below 1e-10.
pub fn find_singularity(
    theta: f64,
    omega_bounds: (f64, f64),
    gamma_bounds: (f64, f64),
) -> Result<(f64, f64), TrajError> {
    let mut om = 0.5 * (omega_bounds.0 + omega_bounds.1);
    let mut ga = 0.5 * (gamma_bounds.0 + gamma_bounds.1);
    let mut g = singularity_condition(theta, om, ga);
    for _it in 0..200 {
        if g.norm() < 1e-10 {
            return Ok((om, ga));
        }
        let h_om = 1e-8 * om;
        let h_ga = 1e-8 * ga.max(1e-6);
        let d_om = (singularity_condition(theta, om + h_om, ga) - g) / h_om;
        let d_ga = (singularity_condition(theta, om, ga + h_ga) - g) / h_ga;
        // solve the 2x2 real system J dx = g
        let (a, b) = (d_om.re, d_ga.re);
        let (c, d) = (d_om.im, d_ga.im);
        let det = a * d - b * c;
        if det.abs() < 1e-300 {
            break;
        }
        let dx = (d * g.re - b * g.im) / det;
        let dy = (-c * g.re + a * g.im) / det;
        let mut lambda = 1.0;
        loop {
            let (no, ng) = (om - lambda * dx, ga - lambda * dy);
            let trial = singularity_condition(theta, no, ng);
            if trial.norm() < g.norm() || lambda < 1e-6 {
                om = no;
                ga = ng;
                g = trial;
                break;
            }
            lambda *= 0.5;
        }
    }
    if g.norm() < 1e-10 {
        Ok((om, ga))
    } else {
        Err(TrajError::NoConvergence(200))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasefun::circ_dist;
    use crate::qcore::{integrate_ode, OdeCtrl};

    fn params(theta: f64, omega_rot: f64) -> RotatingFieldParams {
        RotatingFieldParams::new(1.0, omega_rot, theta)
    }

    #[test]
    fn jump_operator_elements_at_t0() {
        let p = params(PI / 2.0, 5e-3);
        let ch = JumpChannelSet::from_dissipation_scale(1e-3, 0.0);
        let ops = build_jump_operators(&p, &ch, 0.0);
        // |<m|sx|p>| = |cos theta| = 0 at theta = pi/2, t = 0
        assert!(ops[0].max_abs() < 1e-15, "L- vanishes");
        assert!(ops[1].max_abs() < 1e-15, "L+ vanishes");
        // dephasing magnitude prop to sqrt(g_d) sin theta
        let expect = ch.gamma_d.sqrt() * (PI / 2.0f64).sin() / 2.0;
        assert!((ops[2].max_abs() - expect).abs() < 1e-12);
        // zero rates -> zero operators
        let ch0 = JumpChannelSet { gamma_minus: 0.0, gamma_plus: 0.0, gamma_d: 0.0, gamma_z: 0.0 };
        for op in build_jump_operators(&p, &ch0, 0.3) {
            assert!(op.max_abs() == 0.0);
        }
    }

    #[test]
    fn jump_element_matches_nonhermitian_factor() {
        // |<m|sx|p>|^2 = f(t) = cos^2 + sin^2 sin^2(W t)
        let p = params(0.34 * PI, 5e-3);
        for t in [0.0, 37.0, 211.0] {
            let f = element_minus_plus(&p, t).norm_sqr();
            let want =
                p.theta.cos().powi(2) + p.theta.sin().powi(2) * (p.omega_rot * t).sin().powi(2);
            assert!((f - want).abs() < 1e-12);
        }
    }

    #[test]
    fn probability_bookkeeping_each_step() {
        let p = params(0.34 * PI, 5e-3);
        let ch = JumpChannelSet::from_dissipation_scale(1e-3, 1e-4);
        let opts = McOptions::default_for(&p, &ch);
        let mut rng = rng_for(7, 0);
        let (mut psi, _, _, _) = {
            let (plus0, _, _, _) = instantaneous_eigenstates(&p, 0.0);
            (plus0, 0, 0, 0)
        };
        for k in 0..2000 {
            let t = k as f64 * opts.dt;
            let (p_sum, p_o) = step_probabilities(&psi, t, opts.dt, &p, &ch);
            assert!((p_sum + p_o - 1.0).abs() < 1e-4, "step {k}: {}", p_sum + p_o);
            let (next, _) = mc_step(&psi, t, opts.dt, &p, &ch, &mut rng).unwrap();
            psi = next;
        }
    }

    #[test]
    fn step_too_large_detected() {
        let p = params(0.3 * PI, 5e-3);
        let ch = JumpChannelSet::from_dissipation_scale(10.0, 0.0);
        let (plus0, _, _, _) = instantaneous_eigenstates(&p, 0.0);
        let mut rng = rng_for(1, 0);
        assert!(matches!(
            mc_step(&plus0, 1.0, 0.1, &p, &ch, &mut rng),
            Err(TrajError::StepTooLarge(_))
        ));
    }

    #[test]
    fn post_jump_state_is_lower_eigenstate() {
        // force the relaxation branch by drawing r below p_minus
        let p = params(0.34 * PI, 5e-3);
        let ch = JumpChannelSet::from_dissipation_scale(1e-3, 0.0);
        let t = 37.0;
        let (up_t, dn_t, _, _) = instantaneous_eigenstates(&p, t);
        let mut psi = Spinor { a: up_t[0], b: up_t[1] };
        let mut n2 = 1.0;
        let ctx = StepContext::new(&p, &ch, 0.01);
        let e_phi = C64::from_polar(1.0, p.azimuth(t));
        let ev = step_raw(&mut psi, &mut n2, e_phi, &ctx, 0.0).unwrap();
        assert_eq!(ev, Some(Channel::Minus));
        let post = psi.to_cvec();
        assert!(dn_t.dot(&post).norm() > 1.0 - 1e-12, "post-jump state is psi_-(t)");
        assert!((post.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empirical_jump_frequency_matches_binomial() {
        let p = params(0.34 * PI, 5e-3);
        let ch = JumpChannelSet::from_dissipation_scale(1e-3, 2e-4);
        let dt = 0.01;
        let (plus0, _, _, _) = instantaneous_eigenstates(&p, 0.0);
        let t_fixed = 13.0;
        let ops = build_jump_operators(&p, &ch, t_fixed);
        let prob: Vec<f64> = ops.iter().map(|op| op.mul_vec(&plus0).norm_sqr() * dt).collect();
        let n = 100_000;
        let mut counts = [0usize; 4];
        let mut rng = rng_for(123, 0);
        for _ in 0..n {
            let (_, ev) = mc_step(&plus0, t_fixed, dt, &p, &ch, &mut rng).unwrap();
            if let Some(c) = ev {
                counts[c.index()] += 1;
            }
        }
        for (i, &p_i) in prob.iter().enumerate() {
            let mean = n as f64 * p_i;
            let sigma = (n as f64 * p_i * (1.0 - p_i)).sqrt();
            assert!(
                (counts[i] as f64 - mean).abs() <= 3.0 * sigma + 1.0,
                "channel {i}: {} vs {mean} +- {sigma}",
                counts[i]
            );
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let p = params(0.34 * PI, 5e-3);
        let ch = JumpChannelSet::from_dissipation_scale(2e-3, 1e-4);
        let opts = McOptions { dt: 0.01, sample_every: 50 };
        let a = run_trajectory(&p, &ch, p.period(), &opts, 42, 7).unwrap();
        let b = run_trajectory(&p, &ch, p.period(), &opts, 42, 7).unwrap();
        assert_eq!(a.jumps.len(), b.jumps.len());
        for (x, y) in a.jumps.iter().zip(&b.jumps) {
            assert!(x.0 == y.0 && x.1 == y.1, "bitwise equal jump lists");
        }
        let c = run_trajectory(&p, &ch, p.period(), &opts, 42, 8).unwrap();
        let _ = c;
    }

    #[test]
    fn no_jumps_without_dissipation() {
        let p = params(0.4 * PI, 1e-2);
        let ch = JumpChannelSet::from_dissipation_scale(0.0, 0.0);
        let opts = McOptions::default_for(&p, &ch);
        for stream in 0..5 {
            let rec = run_trajectory(&p, &ch, p.period(), &opts, 5, stream).unwrap();
            assert_eq!(rec.n_jumps(), 0);
        }
    }

    #[test]
    fn unitary_limit_matches_exact_propagator() {
        let p = params(0.6 * PI, 1e-2);
        let ch = JumpChannelSet::from_dissipation_scale(0.0, 0.0);
        let opts = McOptions { dt: 0.002, sample_every: 1000 };
        let rec = run_trajectory(&p, &ch, p.period(), &opts, 5, 0).unwrap();
        let (plus0, _, _, _) = instantaneous_eigenstates(&p, 0.0);
        let fin = rec.final_state();
        let exact = crate::spin_rotating::propagate_exact(&p, &plus0, 0.0, p.period());
        let ov = fin.dot(&exact).norm();
        assert!(ov > 1.0 - 1e-5, "overlap {ov}");
    }

    #[test]
    fn trajectory_phase_equals_chain_phase_at_full_sampling() {
        // with sample_every = 1 the piecewise functional is the chain phase
        // of the complete fine-grained state sequence, jump or no jump
        let p = params(0.34 * PI, 2e-2);
        let ch = JumpChannelSet::from_dissipation_scale(5e-2, 0.0);
        let opts = McOptions { dt: 0.005, sample_every: 1 };
        let mut with_jump = None;
        for stream in 0..40 {
            let rec = run_trajectory(&p, &ch, p.period(), &opts, 11, stream).unwrap();
            if rec.n_jumps() == 1 {
                with_jump = Some(rec);
                break;
            }
        }
        let rec = with_jump.expect("found a single-jump realization");
        let phi = rec.geometric_phase().unwrap();
        // chain over all states in order
        let mut all_states = Vec::new();
        for seg in &rec.segments {
            all_states.extend(seg.states.iter().cloned());
        }
        let chain = phasefun::discrete_chain_phase(&all_states).unwrap();
        assert!(circ_dist(phi, chain) < 1e-6, "phi {phi} chain {chain}");
    }

    #[test]
    fn nojump_analytic_reduces_to_unitary_at_zero_dissipation() {
        let p = params(0.34 * PI, 5e-3);
        let ch = JumpChannelSet::from_dissipation_scale(0.0, 0.0);
        let (plus0, _, _, _) = instantaneous_eigenstates(&p, 0.0);
        for t in [100.0, 700.0] {
            let (psi, _) = nojump_state_analytic(&p, &ch, t);
            let exact = crate::spin_rotating::propagate_exact(&p, &plus0, 0.0, t);
            assert!(psi.dot(&exact).norm() > 1.0 - 1e-9);
        }
    }

    #[test]
    fn nojump_analytic_matches_ode_with_full_f() {
        // integrate i psi' = H_o(t) psi with the exact f(t)
        let p = params(0.34 * PI, 5e-3);
        let ch = JumpChannelSet::from_dissipation_scale(1e-3, 0.0);
        let (plus0, _, _, _) = instantaneous_eigenstates(&p, 0.0);
        let t_end = p.period();
        let sol = integrate_ode(
            |t, y, dy| {
                let h = p.hamiltonian(t);
                let f = p.theta.cos().powi(2)
                    + p.theta.sin().powi(2) * (p.omega_rot * t).sin().powi(2);
                let fac = C64::new(1.0, -0.5 * ch.gamma_minus * f / p.omega);
                let v = h.mul_vec(&CVec::new(y.to_vec()));
                dy[0] = -C64::i() * fac * v[0];
                dy[1] = -C64::i() * fac * v[1];
            },
            plus0.as_slice(),
            &[0.0, 0.5 * t_end, t_end],
            &OdeCtrl::default(),
        )
        .unwrap();
        for (k, &t) in [0.5 * t_end, t_end].iter().enumerate() {
            let numeric = CVec::new(sol[k + 1].clone()).normalized();
            let (analytic, _) = nojump_state_analytic(&p, &ch, t);
            let ov = numeric.dot(&analytic).norm();
            assert!(ov > 1.0 - 1e-3, "t {t}: overlap {ov}");
        }
    }

    #[test]
    fn nojump_norm_monotone_from_excited_branch() {
        let p = params(0.34 * PI, 5e-3);
        let ch = JumpChannelSet::from_dissipation_scale(1e-3, 0.0);
        let mut prev = 1.0;
        for i in 1..=60 {
            let t = p.period() * i as f64 / 60.0;
            let (_, norm) = nojump_state_analytic(&p, &ch, t);
            assert!(norm <= prev + 1e-12, "t {t}: {norm} > {prev}");
            prev = norm;
        }
    }

    #[test]
    fn nojump_independent_of_axis_channel() {
        let p = params(0.34 * PI, 5e-3);
        let opts = McOptions { dt: 0.01, sample_every: 100 };
        let (plus0, _, _, _) = instantaneous_eigenstates(&p, 0.0);
        let ch0 = JumpChannelSet::from_dissipation_scale(1e-3, 0.0);
        let ch1 = JumpChannelSet::from_dissipation_scale(1e-3, 1e-4);
        let a = propagate_nojump(&p, &ch0, &plus0, p.period(), &opts).unwrap();
        let b = propagate_nojump(&p, &ch1, &plus0, p.period(), &opts).unwrap();
        for (x, y) in a.states.iter().zip(&b.states) {
            let ov = x.normalized().dot(&y.normalized()).norm();
            assert!(ov > 1.0 - 1e-12);
        }
    }

    #[test]
    fn trajectory_gp_of_nojump_record_matches_analytic() {
        let p = params(0.34 * PI, 5e-3);
        let ch = JumpChannelSet::from_dissipation_scale(1e-3, 0.0);
        let opts = McOptions { dt: 0.005, sample_every: 10 };
        let (plus0, _, _, _) = instantaneous_eigenstates(&p, 0.0);
        let path = propagate_nojump(&p, &ch, &plus0, p.period(), &opts).unwrap();
        let numeric = phasefun::nojump_gp(&path).unwrap();
        let analytic = nojump_phi0(&p, &ch).unwrap();
        assert!(
            circ_dist(numeric, analytic) < 2e-3,
            "numeric {numeric} analytic {analytic}"
        );
    }

    #[test]
    fn echo_parameter_branch_values() {
        assert!((echo_parameter(0.5) - 11.0 * PI / 8.0).abs() < 1e-14);
        // adiabatic limit at theta = 0.34 pi: phi~ = 2 pi - pi (1 - cos t)
        let theta = 0.34 * PI;
        let phi_a = PI * (1.0 - theta.cos());
        let p_ad = (2.0 * phi_a).cos().powi(2);
        let want = 2.0 * PI - phi_a;
        assert!((echo_parameter(p_ad) - want).abs() < 1e-12);
    }

    #[test]
    fn singularity_condition_unitary_slice_has_no_root() {
        // Gamma = 0: |G| stays bounded away from zero over the scan window
        let theta = 0.34 * PI;
        let mut min_norm = f64::INFINITY;
        for i in 0..200 {
            let om = 4.5e-3 + 1e-5 * i as f64;
            min_norm = min_norm.min(singularity_condition(theta, om, 0.0).norm());
        }
        assert!(min_norm > 1e-3, "min |G| = {min_norm}");
    }

    #[test]
    fn find_singularity_near_published_point() {
        let (om, ga) = find_singularity(0.34 * PI, (4.7e-3, 4.9e-3), (0.028, 0.033)).unwrap();
        assert!((om - 4.8082e-3).abs() / 4.8082e-3 < 1e-4, "Omega {om}");
        assert!((ga - 0.0306).abs() < 5e-5, "Gamma {ga}");
        // the root is an endpoint-orthogonality point of the analytic no-jump state
        let p = params(0.34 * PI, om);
        let ch = JumpChannelSet::from_dissipation_scale(ga, 0.0);
        let (psi_t, _) = nojump_state_analytic(&p, &ch, p.period());
        let (plus0, _, _, _) = instantaneous_eigenstates(&p, 0.0);
        assert!(plus0.dot(&psi_t).norm() < 1e-6);
    }

    #[test]
    fn topo_invariant_adiabatic_region() {
        let scan = topo_scan(1e-4, 0.0, 40, 0.0).unwrap();
        assert_eq!(scan.invariant, -1, "curve end {}", scan.curve.last().unwrap().1);
    }
}
