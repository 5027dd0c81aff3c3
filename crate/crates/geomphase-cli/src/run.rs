//! Experiment implementations: deterministic batch jobs emitting CSV/JSON.

use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{fmt, OutputDir};
use geomphase::bipartite_vacuum as bp;
use geomphase::dielectric_motion as dm;
use geomphase::jc_model as jc;
use geomphase::spin_rotating as spin;
use geomphase::trajectories as traj;
use serde_json::json;
use std::f64::consts::PI;

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Runtime(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

fn rt(e: impl std::fmt::Display) -> RunError {
    RunError::Runtime(e.to_string())
}

fn bipartite_env(cfg: &ExperimentConfig) -> Result<bp::BipartiteEnvSpec, RunError> {
    let gamma0 = cfg.req_f64("gamma0")?;
    let l_tilde = cfg.req_f64("l_tilde")?;
    let boundary = match cfg.params.d_over_l {
        None => bp::Boundary::FreeSpace,
        Some(r) => bp::Boundary::Mirror { d_tilde: 2.0 * r * l_tilde },
    };
    let pol = match cfg.params.polarization.as_deref().unwrap_or("x") {
        "x" => [1.0, 0.0, 0.0],
        "y" => [0.0, 1.0, 0.0],
        "z" => [0.0, 0.0, 1.0],
        other => {
            return Err(RunError::Config(ConfigError::Invalid(format!(
                "params.polarization must be x, y or z (got {other})"
            ))))
        }
    };
    bp::BipartiteEnvSpec::new(gamma0, l_tilde, boundary, pol, pol).map_err(rt)
}

fn sliding_spec(cfg: &ExperimentConfig, v: f64) -> Result<dm::SlidingAtomSpec, RunError> {
    let (omega0_tilde, gamma_tilde) = match (&cfg.params.material, &cfg.params.atom) {
        (Some(mat), Some(atom)) => {
            let table = dm::MaterialTable::embedded().map_err(rt)?;
            let mk = match mat.as_str() {
                "au" => dm::MaterialKind::Au,
                "nsi" => dm::MaterialKind::NSi,
                other => {
                    return Err(RunError::Config(ConfigError::Invalid(format!(
                        "params.material must be au or nsi (got {other})"
                    ))))
                }
            };
            let ak = match atom.as_str() {
                "rb" => dm::AtomKind::Rb,
                "nv_low" => dm::AtomKind::NvLow,
                "nv_high" => dm::AtomKind::NvHigh,
                other => {
                    return Err(RunError::Config(ConfigError::Invalid(format!(
                        "params.atom must be rb, nv_low or nv_high (got {other})"
                    ))))
                }
            };
            (
                table.omega0_tilde(ak, mk).map_err(rt)?,
                table.material(mk).map_err(rt)?.gamma_tilde,
            )
        }
        _ => (cfg.req_f64("omega0_tilde")?, cfg.req_f64("gamma_tilde")?),
    };
    Ok(dm::SlidingAtomSpec {
        omega0_tilde,
        gamma_tilde,
        v,
        mu2_over_d3: cfg.req_f64("mu2_over_d3")?,
        n_hat: cfg.params.n_hat.unwrap_or([1.0, 0.0, 0.0]),
        vartheta0: cfg.params.vartheta0.unwrap_or(PI / 2.0),
    })
}

pub fn run(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<(), RunError> {
    match cfg.experiment.as_str() {
        "spin-berry" => {
            let branch = match cfg.params.branch.as_deref().unwrap_or("plus") {
                "plus" => spin::Branch::Plus,
                "minus" => spin::Branch::Minus,
                other => {
                    return Err(RunError::Config(ConfigError::Invalid(format!(
                        "params.branch must be plus or minus (got {other})"
                    ))))
                }
            };
            let rows: Vec<Vec<String>> = cfg
                .thetas()?
                .iter()
                .map(|&th| vec![fmt(th), fmt(spin::berry_phase(th, branch))])
                .collect();
            out.write_csv("spin_berry.csv", &["theta", "phi"], &rows).map_err(rt)?;
        }
        "spin-echo" => {
            let om = cfg.req_f64("omega_rot")?;
            let rows: Vec<Vec<String>> = cfg
                .thetas()?
                .iter()
                .map(|&th| {
                    let p = spin::RotatingFieldParams::new(1.0, om, th);
                    vec![
                        fmt(th),
                        fmt(spin::echo_persistence_unitary(&p, true)),
                        fmt(spin::echo_persistence_unitary(&p, false)),
                    ]
                })
                .collect();
            out.write_csv(
                "spin_echo.csv",
                &["theta", "persistence_adiabatic", "persistence_simulated"],
                &rows,
            )
            .map_err(rt)?;
        }
        "jc-unitary" => {
            let n_periods = cfg.req_f64("n_periods")?;
            let spp = cfg.params.samples_per_period.unwrap_or(64);
            let mut rows = Vec::new();
            for &delta in &cfg.deltas()? {
                let p = jc::JCParams::new(delta, 0.0, 0.0);
                let n = ((n_periods * spp as f64).ceil() as usize).max(2);
                for i in 1..=n {
                    let t = n_periods * p.period() * i as f64 / n as f64;
                    rows.push(vec![fmt(delta), fmt(t), fmt(jc::unitary_gp_jc(&p, t))]);
                }
            }
            out.write_csv("jc_unitary.csv", &["delta", "t", "phi_u"], &rows).map_err(rt)?;
        }
        "jc-open" => {
            let p = jc::JCParams::new(
                cfg.req_f64("delta")?,
                cfg.req_f64("gamma")?,
                cfg.req_f64("pump")?,
            );
            let n_periods = cfg.req_f64("n_periods")?;
            let spp = cfg.params.samples_per_period.unwrap_or(256);
            let t_end = n_periods * p.period();
            let (ts, rhos) = jc::evolve_from_plus(&p, t_end, (n_periods * spp as f64) as usize)
                .map_err(rt)?;
            let series = jc::open_gp_jc_series(&p, t_end, spp).map_err(rt)?;
            let rows: Vec<Vec<String>> = ts
                .iter()
                .zip(&rhos)
                .map(|(&t, rho)| {
                    let m = rho.mat();
                    vec![
                        fmt(t),
                        fmt(m[(0, 0)].re),
                        fmt(m[(1, 1)].re),
                        fmt(m[(2, 2)].re),
                        fmt(m[(1, 2)].norm()),
                    ]
                })
                .collect();
            out.write_csv(
                "jc_open_elements.csv",
                &["t", "rho00", "rho11", "rho22", "abs_rho12"],
                &rows,
            )
            .map_err(rt)?;
            let n = series.len() - 1;
            let rows: Vec<Vec<String>> = series
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let t = t_end * i as f64 / n as f64;
                    vec![fmt(t), fmt(s.phi_g), fmt(s.phi_u), fmt(s.delta_phi)]
                })
                .collect();
            out.write_csv("jc_open_phase.csv", &["t", "phi_g", "phi_u", "delta_phi"], &rows)
                .map_err(rt)?;
        }
        "jc-delta-scan" => {
            let gamma = cfg.req_f64("gamma")?;
            let pump = cfg.req_f64("pump")?;
            let n_periods = cfg.req_f64("n_periods")?;
            let rows: Vec<Vec<String>> = cfg
                .deltas()?
                .iter()
                .map(|&delta| {
                    let p = jc::JCParams::new(delta, gamma, pump);
                    let o = jc::open_gp_jc(&p, n_periods * p.period(), 2048).map_err(rt)?;
                    Ok(vec![fmt(delta), fmt(o.delta_phi), fmt(o.phi_g), fmt(o.phi_u)])
                })
                .collect::<Result<_, RunError>>()?;
            out.write_csv(
                "jc_delta_scan.csv",
                &["delta", "delta_phi", "phi_g", "phi_u"],
                &rows,
            )
            .map_err(rt)?;
        }
        "bipartite-dynamics" => {
            let env = bipartite_env(cfg)?;
            let theta = cfg.req_f64("theta")?;
            let t_max = cfg.req_f64("t_max")?;
            let n = cfg.params.n_samples.unwrap_or(200);
            let ts: Vec<f64> = (0..=n).map(|i| t_max * i as f64 / n as f64).collect();
            let sol = bp::evolve_bipartite(&env, theta, &ts).map_err(rt)?;
            let rows: Vec<Vec<String>> = ts
                .iter()
                .zip(&sol)
                .map(|(&t, rho)| {
                    let m = rho.mat();
                    vec![
                        fmt(t),
                        fmt(m[(0, 0)].re),
                        fmt(m[(1, 1)].re),
                        fmt(m[(3, 3)].re),
                        fmt(m[(3, 0)].norm()),
                        fmt(m[(1, 2)].re),
                    ]
                })
                .collect();
            out.write_csv(
                "bipartite_dynamics.csv",
                &["t", "rho11", "rho22", "rho44", "abs_rho41", "rho23"],
                &rows,
            )
            .map_err(rt)?;
        }
        "bipartite-concurrence" => {
            let env = bipartite_env(cfg)?;
            let theta = cfg.req_f64("theta")?;
            let t_max = cfg.req_f64("t_max")?;
            let n = cfg.params.n_samples.unwrap_or(200);
            let ts: Vec<f64> = (0..=n).map(|i| t_max * i as f64 / n as f64).collect();
            let sol = bp::evolve_bipartite(&env, theta, &ts).map_err(rt)?;
            let rows: Vec<Vec<String>> = ts
                .iter()
                .zip(&sol)
                .map(|(&t, rho)| {
                    Ok(vec![fmt(t), fmt(bp::concurrence(rho, true).map_err(rt)?)])
                })
                .collect::<Result<_, RunError>>()?;
            out.write_csv("bipartite_concurrence.csv", &["t", "concurrence"], &rows)
                .map_err(rt)?;
            let crossings = bp::concurrence_crossings(&env, theta, t_max).map_err(rt)?;
            out.write_json(
                "concurrence_crossings.json",
                &json!({ "crossing_times": crossings }),
            )
            .map_err(rt)?;
        }
        "bipartite-gp" => {
            let env = bipartite_env(cfg)?;
            let theta = cfg.req_f64("theta")?;
            let n_periods = cfg.req_f64("n_periods")?;
            let n = cfg.params.n_samples.unwrap_or(64);
            let t_end = n_periods * 2.0 * PI;
            let series = bp::open_gp_bipartite_series(&env, theta, t_end, n).map_err(rt)?;
            let rows: Vec<Vec<String>> = series
                .iter()
                .map(|(t, o)| vec![fmt(*t), fmt(o.phi_g), fmt(o.phi_u), fmt(o.delta_phi)])
                .collect();
            out.write_csv("bipartite_gp.csv", &["t", "phi_g", "phi_u", "delta_phi"], &rows)
                .map_err(rt)?;
            let (c1, c2) = bp::gp_expansion_bipartite(&env, theta).map_err(rt)?;
            out.write_json(
                "gp_expansion.json",
                &json!({ "order1": c1, "order2": c2 }),
            )
            .map_err(rt)?;
        }
        "sliding-dynamics" => {
            let spec = sliding_spec(cfg, cfg.req_f64("v")?)?;
            let t_max = cfg.req_f64("t_max")?;
            let n = cfg.params.n_samples.unwrap_or(200);
            let ts: Vec<f64> = (0..=n).map(|i| t_max * i as f64 / n as f64).collect();
            let sol = dm::evolve_sliding(&spec, &ts).map_err(rt)?;
            let rows: Vec<Vec<String>> = ts
                .iter()
                .zip(&sol)
                .map(|(&t, rho)| {
                    let m = rho.mat();
                    vec![
                        fmt(t),
                        fmt(m[(0, 0)].re),
                        fmt(m[(1, 1)].re),
                        fmt(m[(0, 1)].norm()),
                        fmt(rho.purity()),
                    ]
                })
                .collect();
            out.write_csv(
                "sliding_dynamics.csv",
                &["t", "rho11", "rho22", "abs_rho12", "purity"],
                &rows,
            )
            .map_err(rt)?;
        }
        "sliding-taud" => {
            let rows: Vec<Vec<String>> = cfg
                .v_values()?
                .iter()
                .map(|&v| {
                    let spec = sliding_spec(cfg, v)?;
                    let out = dm::decoherence_time(&spec).map_err(rt)?;
                    Ok(vec![
                        fmt(v),
                        fmt(out.tau_numeric),
                        fmt(out.tau_markov),
                        fmt(out.ratio_v_to_static),
                    ])
                })
                .collect::<Result<_, RunError>>()?;
            out.write_csv(
                "sliding_taud.csv",
                &["v", "tau_numeric", "tau_markov", "ratio_v_to_static"],
                &rows,
            )
            .map_err(rt)?;
        }
        "sliding-gp" => {
            let t_end = cfg.req_f64("t_max")?;
            let rows: Vec<Vec<String>> = cfg
                .v_values()?
                .iter()
                .map(|&v| {
                    let spec = sliding_spec(cfg, v)?;
                    let o = dm::open_gp_sliding(&spec, t_end).map_err(rt)?;
                    let ratio = if o.delta_phi_v0 != 0.0 { o.delta_phi / o.delta_phi_v0 } else { f64::NAN };
                    Ok(vec![
                        fmt(v),
                        fmt(o.phi_g),
                        fmt(o.delta_phi),
                        fmt(o.delta_phi_v0),
                        fmt(ratio),
                    ])
                })
                .collect::<Result<_, RunError>>()?;
            out.write_csv(
                "sliding_gp.csv",
                &["v", "phi_g", "delta_phi", "delta_phi_v0", "ratio"],
                &rows,
            )
            .map_err(rt)?;
        }
        "friction-force" => {
            let lg = cfg.req_f64("lambda2_g2")?;
            let rows: Vec<Vec<String>> = cfg
                .force_points()?
                .iter()
                .map(|pt| {
                    let f = dm::friction_force(lg, pt.omega, pt.omega_mat, pt.d, pt.v).map_err(rt)?;
                    Ok(vec![fmt(pt.omega), fmt(pt.omega_mat), fmt(pt.d), fmt(pt.v), fmt(f)])
                })
                .collect::<Result<_, RunError>>()?;
            out.write_csv(
                "friction_force.csv",
                &["omega", "omega_mat", "d", "v", "force"],
                &rows,
            )
            .map_err(rt)?;
        }
        "traj-phase-dist" => {
            let p = spin::RotatingFieldParams::new(1.0, cfg.req_f64("omega_rot")?, cfg.req_f64("theta")?);
            let ch = traj::JumpChannelSet::from_dissipation_scale(
                cfg.req_f64("gamma")?,
                cfg.req_f64("gamma_z")?,
            );
            let opts = traj::McOptions::default_for(&p, &ch);
            let ens = traj::phase_ensemble(
                &p,
                &ch,
                cfg.n_traj()?,
                cfg.params.n_bins.unwrap_or(64),
                cfg.seed,
                &opts,
            )
            .map_err(rt)?;
            let rows: Vec<Vec<String>> = ens
                .distribution
                .bin_centers()
                .iter()
                .zip(ens.distribution.weights())
                .map(|(&c, &w)| vec![fmt(c), fmt(w)])
                .collect();
            out.write_csv("phase_distribution.csv", &["bin_center", "probability"], &rows)
                .map_err(rt)?;
            out.write_json(
                "phase_summary.json",
                &json!({
                    "mean_jumps": ens.mean_jumps,
                    "std_jumps": ens.std_jumps,
                    "discarded": ens.discarded,
                    "n_requested": ens.n_requested,
                    "phi_adiabatic": ens.references.phi_adiabatic,
                    "phi_nojump": ens.references.phi_nojump,
                    "phi_unitary": ens.references.phi_unitary,
                    "phi_mean": ens.references.phi_mean,
                }),
            )
            .map_err(rt)?;
        }
        "traj-echo-dist" => {
            let p = spin::RotatingFieldParams::new(1.0, cfg.req_f64("omega_rot")?, cfg.req_f64("theta")?);
            let ch = traj::JumpChannelSet::from_dissipation_scale(
                cfg.req_f64("gamma")?,
                cfg.req_f64("gamma_z")?,
            );
            let opts = traj::McOptions::default_for(&p, &ch);
            let ens = traj::echo_ensemble(
                &p,
                &ch,
                cfg.n_traj()?,
                cfg.params.n_bins.unwrap_or(64),
                cfg.seed,
                &opts,
            )
            .map_err(rt)?;
            let rows: Vec<Vec<String>> = ens
                .distribution
                .bin_centers()
                .iter()
                .zip(ens.distribution.weights())
                .map(|(&c, &w)| vec![fmt(c), fmt(w)])
                .collect();
            out.write_csv("echo_distribution.csv", &["bin_center", "probability"], &rows)
                .map_err(rt)?;
            out.write_json(
                "echo_summary.json",
                &json!({
                    "mean_jumps": ens.mean_jumps,
                    "nojump_phi_tilde": ens.nojump_phi_tilde,
                    "discarded": ens.discarded,
                    "n_requested": ens.n_requested,
                }),
            )
            .map_err(rt)?;
        }
        "topo-scan" => {
            let scan = traj::topo_scan(
                cfg.req_f64("omega_rot")?,
                cfg.req_f64("gamma")?,
                cfg.params.n_theta.unwrap_or(60),
                cfg.req_f64("gamma_z")?,
            )
            .map_err(rt)?;
            let rows: Vec<Vec<String>> = scan
                .curve
                .iter()
                .map(|&(th, phi)| vec![fmt(th), fmt(phi)])
                .collect();
            out.write_csv("topo_scan.csv", &["theta", "phi0_unwrapped"], &rows).map_err(rt)?;
            out.write_json("topo_summary.json", &json!({ "invariant": scan.invariant }))
                .map_err(rt)?;
        }
        "singularity-find" => {
            let ob = cfg
                .params
                .omega_bounds
                .ok_or_else(|| ConfigError::Invalid("params.omega_bounds is required".into()))?;
            let gb = cfg
                .params
                .gamma_bounds
                .ok_or_else(|| ConfigError::Invalid("params.gamma_bounds is required".into()))?;
            let theta = cfg.req_f64("theta")?;
            let (om, ga) =
                traj::find_singularity(theta, (ob[0], ob[1]), (gb[0], gb[1])).map_err(rt)?;
            let residual = traj::singularity_condition(theta, om, ga).norm();
            let rows = vec![vec![fmt(om), fmt(ga), fmt(residual)]];
            out.write_csv(
                "singularity.csv",
                &["omega_rot", "gamma", "residual"],
                &rows,
            )
            .map_err(rt)?;
        }
        other => {
            return Err(RunError::Config(ConfigError::Invalid(format!(
                "unknown experiment \"{other}\"; see `geomphase list`"
            ))))
        }
    }
    out.write_manifest(cfg).map_err(rt)?;
    Ok(())
}
