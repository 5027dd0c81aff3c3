use geomphase::spin_rotating::RotatingFieldParams;
use geomphase::trajectories::*;
use std::time::Instant;

fn main() {
    let theta = 0.34 * std::f64::consts::PI;
    for (om, ntraj) in [(5e-3, 3000usize), (5e-4, 600)] {
        let p = RotatingFieldParams::new(1.0, om, theta);
        let ch = JumpChannelSet::from_dissipation_scale(1e-3, 0.0);
        let opts = McOptions::default_for(&p, &ch);
        let t0 = Instant::now();
        let ens = phase_ensemble(&p, &ch, ntraj, 64, 12345, &opts).unwrap();
        println!(
            "Omega/w = {om}: NJ = {:.3} +- {:.3}  (dt = {:.4}, {} traj, {:.1}s)  refs: a={:.4} nj={:.4} u={:.4} mean={:.4}",
            ens.mean_jumps, ens.std_jumps, opts.dt, ntraj, t0.elapsed().as_secs_f64(),
            ens.references.phi_adiabatic, ens.references.phi_nojump,
            ens.references.phi_unitary, ens.references.phi_mean
        );
    }
}
