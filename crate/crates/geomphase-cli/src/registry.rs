//! Static registry of the named experiments.

pub struct ExperimentInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub required: &'static str,
    pub example: &'static str,
}

pub const EXPERIMENTS: &[ExperimentInfo] = &[
    ExperimentInfo {
        name: "spin-berry",
        description: "closed-form adiabatic phase of the driven spin vs polar angle",
        required: "thetas [, branch]",
        example: "experiment = \"spin-berry\"\n[params]\nthetas = [1.5707963267948966]\n",
    },
    ExperimentInfo {
        name: "spin-echo",
        description: "two-cycle echo persistence: closed form and exact-propagator protocol",
        required: "thetas, omega_rot",
        example: "experiment = \"spin-echo\"\n[params]\nthetas = [0.8, 1.2]\nomega_rot = 1e-3\n",
    },
    ExperimentInfo {
        name: "jc-unitary",
        description: "atom-mode kinematic phase over time for each detuning",
        required: "deltas, n_periods, samples_per_period",
        example: "experiment = \"jc-unitary\"\n[params]\ndeltas = [0.0, 2.0]\nn_periods = 1.0\nsamples_per_period = 64\n",
    },
    ExperimentInfo {
        name: "jc-open",
        description: "dissipative atom-mode dynamics and open-system phase history",
        required: "delta, gamma, pump, n_periods, samples_per_period",
        example: "experiment = \"jc-open\"\n[params]\ndelta = 0.1\ngamma = 0.1\npump = 0.005\nn_periods = 3.0\nsamples_per_period = 256\n",
    },
    ExperimentInfo {
        name: "jc-delta-scan",
        description: "phase correction vs detuning at fixed elapsed pseudo-periods",
        required: "deltas, gamma, pump, n_periods",
        example: "experiment = \"jc-delta-scan\"\n[params]\ndeltas = [0.1, 0.2, 0.5]\ngamma = 0.1\npump = 0.005\nn_periods = 3.0\n",
    },
    ExperimentInfo {
        name: "bipartite-dynamics",
        description: "two-qubit populations and coherences in the vacuum, with or without a mirror",
        required: "gamma0, l_tilde, theta, t_max, n_samples [, d_over_l, polarization]",
        example: "experiment = \"bipartite-dynamics\"\n[params]\ngamma0 = 5e-3\nl_tilde = 1.0\ntheta = 1.5707963267948966\nt_max = 900.0\nn_samples = 200\npolarization = \"y\"\nd_over_l = 1.0\n",
    },
    ExperimentInfo {
        name: "bipartite-concurrence",
        description: "two-qubit entanglement over time with zero-crossing report",
        required: "gamma0, l_tilde, theta, t_max, n_samples [, d_over_l, polarization]",
        example: "experiment = \"bipartite-concurrence\"\n[params]\ngamma0 = 1e-2\nl_tilde = 1.0\ntheta = 0.0\nt_max = 3000.0\nn_samples = 300\n",
    },
    ExperimentInfo {
        name: "bipartite-gp",
        description: "two-qubit open-system phase history and weak-coupling expansion",
        required: "gamma0, l_tilde, theta, n_periods, n_samples [, d_over_l, polarization]",
        example: "experiment = \"bipartite-gp\"\n[params]\ngamma0 = 1e-3\nl_tilde = 1.0\ntheta = 1.5707963267948966\nn_periods = 1.0\nn_samples = 32\n",
    },
    ExperimentInfo {
        name: "sliding-dynamics",
        description: "sliding-atom populations, coherence and purity over time",
        required: "omega0_tilde|material+atom, gamma_tilde, v, mu2_over_d3, vartheta0, t_max, n_samples [, n_hat]",
        example: "experiment = \"sliding-dynamics\"\n[params]\nomega0_tilde = 0.2\ngamma_tilde = 1.0\nv = 0.003\nmu2_over_d3 = 0.005\nvartheta0 = 1.5707963267948966\nt_max = 1000.0\nn_samples = 250\n",
    },
    ExperimentInfo {
        name: "sliding-taud",
        description: "decoherence timescale vs velocity: numeric, Markov form, static ratio",
        required: "omega0_tilde|material+atom, gamma_tilde, v_values, mu2_over_d3 [, n_hat]",
        example: "experiment = \"sliding-taud\"\n[params]\nmaterial = \"nsi\"\natom = \"rb\"\nv_values = [0.0, 0.01]\nmu2_over_d3 = 0.005\n",
    },
    ExperimentInfo {
        name: "sliding-gp",
        description: "velocity-induced phase correction against the static correction",
        required: "omega0_tilde, gamma_tilde, v_values, mu2_over_d3, vartheta0, t_max [, n_hat]",
        example: "experiment = \"sliding-gp\"\n[params]\nomega0_tilde = 0.2\ngamma_tilde = 1.0\nv_values = [0.0, 0.02]\nmu2_over_d3 = 0.005\nvartheta0 = 1.5707963267948966\nt_max = 1570.8\n",
    },
    ExperimentInfo {
        name: "friction-force",
        description: "vacuum-friction force integral at the requested parameter points",
        required: "lambda2_g2, force_points",
        example: "experiment = \"friction-force\"\n[params]\nlambda2_g2 = 1.0\n[[params.force_points]]\nomega = 1.0\nomega_mat = 1.0\nd = 1.0\nv = 0.1\n",
    },
    ExperimentInfo {
        name: "traj-phase-dist",
        description: "geometric-phase histogram over monitored trajectories of the driven spin",
        required: "theta, omega_rot, gamma, gamma_z, n_traj, n_bins",
        example: "experiment = \"traj-phase-dist\"\nseed = 1\n[params]\ntheta = 1.0681415022205296\nomega_rot = 5e-3\ngamma = 1e-3\ngamma_z = 0.0\nn_traj = 1000\nn_bins = 64\n",
    },
    ExperimentInfo {
        name: "traj-echo-dist",
        description: "echo-fringe parameter histogram over monitored echo protocols",
        required: "theta, omega_rot, gamma, gamma_z, n_traj, n_bins",
        example: "experiment = \"traj-echo-dist\"\nseed = 1\n[params]\ntheta = 1.0681415022205296\nomega_rot = 5e-3\ngamma = 1e-3\ngamma_z = 0.0\nn_traj = 1000\nn_bins = 64\n",
    },
    ExperimentInfo {
        name: "topo-scan",
        description: "unwrapped no-jump phase curve over the polar angle and its integer invariant",
        required: "omega_rot, gamma, gamma_z, n_theta",
        example: "experiment = \"topo-scan\"\n[params]\nomega_rot = 1e-4\ngamma = 0.0\ngamma_z = 0.0\nn_theta = 60\n",
    },
    ExperimentInfo {
        name: "singularity-find",
        description: "locate a singular point of the no-jump phase in a parameter rectangle",
        required: "theta, omega_bounds, gamma_bounds",
        example: "experiment = \"singularity-find\"\n[params]\ntheta = 1.0681415022205296\nomega_bounds = [4.7e-3, 4.9e-3]\ngamma_bounds = [0.028, 0.033]\n",
    },
];

pub fn find(name: &str) -> Option<&'static ExperimentInfo> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}
