use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use teleport_core::channels::{build_noise_model, load_calibration, NoiseModel};
use teleport_core::circuit::{marginal_counts, parse_circuit, Counts};
use teleport_core::experiment::{
    compare_schemes, device_circuit, run_on_device, tomography_fidelities, DeviceRun, RECEIVERS,
};
use teleport_core::protocols::{
    cluster_channel_teleport, compress_ghz_class, multi_output_teleport, teleport_two_qubit_general, BranchRecord,
    ResourceReport, TeleportBranch,
};
use teleport_core::qstate::{DensityMatrix, StateVector};
use teleport_core::tomography::{
    exact_expectations, fidelity_stats, matrix_parts, pure_fidelity, reconstruct, tomography, PauliSetting,
    CLASSICAL_LIMIT,
};
use teleport_core::transpile::{casablanca_topology, load_edge_list, route, CouplingGraph};

use crate::config::{ExperimentConfig, Noise, Scheme};
use crate::docs::*;

/// Flags shared by the experiment commands; each overrides the config file.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct ExperimentArgs {
    /// TOML experiment configuration.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Shots per circuit (default 8192).
    #[arg(long, value_name = "N")]
    pub shots: Option<u64>,
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Calibration CSV enabling the device noise model.
    #[arg(long, value_name = "PATH")]
    pub calibration: Option<PathBuf>,
    /// Tomography repetitions.
    #[arg(long, value_name = "N", default_value_t = 1)]
    pub reps: usize,
    /// Write the JSON document here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also write the receivers' histogram as CSV.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

impl ExperimentArgs {
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => {
                let mut cfg = ExperimentConfig::load(p)?;
                // Relative calibration paths in a config are relative to the config file.
                if let Noise::Calibration(c) = &cfg.noise {
                    if c.is_relative() {
                        let base = p.parent().unwrap_or(Path::new("."));
                        cfg.noise = Noise::Calibration(base.join(c));
                    }
                }
                cfg
            }
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.shots {
            cfg.shots = s;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(c) = &self.calibration {
            cfg.noise = Noise::Calibration(c.clone());
        }
        if self.reps == 0 {
            bail!("--reps must be at least 1");
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn calibration_label(cfg: &ExperimentConfig) -> Option<String> {
    match &cfg.noise {
        Noise::None => None,
        Noise::Calibration(p) => Some(p.display().to_string()),
    }
}

/// Physical-qubit noise model for the configured noise source.
fn device_model(cfg: &ExperimentConfig, graph: &CouplingGraph) -> Result<NoiseModel> {
    match &cfg.noise {
        Noise::None => Ok(NoiseModel::ideal(graph.num_physical())),
        Noise::Calibration(p) => {
            let records = load_calibration(p).with_context(|| format!("loading calibration {}", p.display()))?;
            Ok(build_noise_model(&records, &cfg.durations)?)
        }
    }
}

/// Protocol branches, resources, the receivers' two-qubit device target and
/// the full target state the ideal branches are compared with.
struct Plan {
    branches: Vec<TeleportBranch>,
    resources: ResourceReport,
    device_target: Option<StateVector>,
    ideal_target: StateVector,
}

fn plan(cfg: &ExperimentConfig) -> Result<Plan> {
    match cfg.scheme {
        Scheme::TwoBell | Scheme::Cluster5 => {
            let (a, b) = (cfg.chi_a()?, cfg.chi_b()?);
            let ideal_target = a.to_state_vector().tensor(&b.to_state_vector());
            if cfg.scheme == Scheme::Cluster5 {
                let (branches, resources) = cluster_channel_teleport(&a, &b)?;
                // Eight qubits do not fit a seven-qubit device.
                return Ok(Plan { branches, resources, device_target: None, ideal_target });
            }
            let (branches, resources) = multi_output_teleport(&a, &b)?;
            let heads = compress_ghz_class(&a).0.tensor(&compress_ghz_class(&b).0);
            Ok(Plan { branches, resources, device_target: Some(heads), ideal_target })
        }
        Scheme::GeneralTwoQubit => {
            let s = cfg.two_qubit_state()?;
            let (branches, resources) = teleport_two_qubit_general(&s)?;
            let target = s.to_state_vector();
            Ok(Plan { branches, resources, device_target: Some(target.clone()), ideal_target: target })
        }
    }
}

fn repetitions(
    rho: &DensityMatrix,
    noise: Option<&NoiseModel>,
    target: &StateVector,
    cfg: &ExperimentConfig,
    reps: usize,
) -> Result<Repetitions> {
    let fidelities_percent: Vec<f64> =
        tomography_fidelities(rho, noise, target, cfg.shots, cfg.seed, reps)?.into_iter().map(|f| 100.0 * f).collect();
    let stats = if reps >= 2 { Some(fidelity_stats(&fidelities_percent)?) } else { None };
    Ok(Repetitions { reps, shots_per_setting: cfg.shots, fidelities_percent, stats })
}

fn amplitudes(s: &StateVector) -> Vec<[f64; 2]> {
    s.amplitudes().iter().map(|a| [a.re, a.im]).collect()
}

fn run_device(cfg: &ExperimentConfig, target: &StateVector, readout: bool) -> Result<DeviceRun> {
    let graph = casablanca_topology();
    let model = device_model(cfg, &graph)?;
    let circuit = device_circuit(target, readout)?;
    Ok(run_on_device(&circuit, &graph, &model, cfg.shots, cfg.seed)?)
}

pub fn cmd_run(args: &ExperimentArgs) -> Result<RunDocument> {
    let cfg = args.resolve()?;
    let p = plan(&cfg)?;
    let mut worst: f64 = 1.0;
    for b in &p.branches {
        worst = worst.min(b.output.overlap(&p.ideal_target)?);
    }
    let device = match &p.device_target {
        None => {
            if cfg.noise != Noise::None {
                bail!("the cluster5 scheme needs 8 qubits and cannot run on the 7-qubit device model");
            }
            None
        }
        Some(target) => {
            let dev = run_device(&cfg, target, true)?;
            let rho = dev.reduced(&RECEIVERS)?;
            let readout: Counts = marginal_counts(&dev.run.counts, &[4, 5]);
            let mut probabilities = BTreeMap::new();
            for (k, v) in &dev.run.probabilities {
                *probabilities.entry(k.select(&[4, 5]).to_string()).or_insert(0.0) += v;
            }
            let noise = dev.model_for(&RECEIVERS)?;
            Some(DeviceSection {
                target_amplitudes: amplitudes(target),
                layout: dev.routing.layout.mapping().to_vec(),
                cost: dev.routing.cost,
                histogram: readout.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
                probabilities,
                fidelity: pure_fidelity(target, &rho)?,
                classical_limit: CLASSICAL_LIMIT,
                repetitions: repetitions(&rho, Some(&noise), target, &cfg, args.reps)?,
            })
        }
    };
    if let (Some(path), Some(d)) = (&args.csv, &device) {
        write_histogram_csv(path, &d.histogram, cfg.shots)?;
    }
    Ok(RunDocument {
        schema_version: SCHEMA_VERSION,
        command: "run",
        scheme: cfg.scheme,
        m: cfg.m,
        shots: cfg.shots,
        seed: cfg.seed,
        calibration: calibration_label(&cfg),
        resources: p.resources,
        ideal: IdealSection { fidelity: worst, branches: p.branches.iter().map(BranchRecord::from).collect() },
        device,
    })
}

fn write_histogram_csv(path: &Path, histogram: &BTreeMap<String, u64>, shots: u64) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(["outcome", "count", "frequency"])?;
    for (k, v) in histogram {
        w.write_record([k.clone(), v.to_string(), (*v as f64 / shots as f64).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_tomography(args: &ExperimentArgs, exact: bool) -> Result<TomographyDocument> {
    let cfg = args.resolve()?;
    let p = plan(&cfg)?;
    let Some(target) = p.device_target else {
        bail!("tomography needs a two-qubit receiver state; the cluster5 scheme has none on the device");
    };
    let dev = run_device(&cfg, &target, false)?;
    let rho = dev.reduced(&RECEIVERS)?;
    let noise = dev.model_for(&RECEIVERS)?;
    let (reconstructed, reps) = if exact {
        (reconstruct(&exact_expectations(&rho))?, None)
    } else {
        let r = tomography(&rho, Some(&noise), cfg.shots, cfg.seed)?;
        let reps = if args.reps >= 2 { Some(repetitions(&rho, Some(&noise), &target, &cfg, args.reps)?) } else { None };
        (r, reps)
    };
    let f = pure_fidelity(&target, &reconstructed)?;
    let (rho_real, rho_imag) = matrix_parts(&reconstructed);
    Ok(TomographyDocument {
        schema_version: SCHEMA_VERSION,
        command: "tomography",
        scheme: cfg.scheme,
        mode: if exact { "exact" } else { "sampled" },
        shots_per_setting: cfg.shots,
        seed: cfg.seed,
        calibration: calibration_label(&cfg),
        settings: PauliSetting::all(2).iter().map(ToString::to_string).collect(),
        rho_real,
        rho_imag,
        fidelity: f,
        fidelity_percent: 100.0 * f,
        classical_limit: CLASSICAL_LIMIT,
        repetitions: reps,
    })
}

/// Numbers separated by whitespace or commas; `#` starts a comment.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        for tok in body.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            out.push(tok.parse().with_context(|| format!("line {}: not a number: {tok:?}", i + 1))?);
        }
    }
    Ok(out)
}

pub fn cmd_stats(values: &Path) -> Result<StatsDocument> {
    let text = std::fs::read_to_string(values).with_context(|| format!("reading {}", values.display()))?;
    let v = parse_values(&text)?;
    let stats = fidelity_stats(&v)?;
    Ok(StatsDocument { schema_version: SCHEMA_VERSION, command: "stats", count: v.len(), stats })
}

pub fn cmd_route(circuit: &Path, graph: Option<&Path>) -> Result<RouteDocument> {
    let text = std::fs::read_to_string(circuit).with_context(|| format!("reading {}", circuit.display()))?;
    let c = parse_circuit(&text).with_context(|| format!("parsing {}", circuit.display()))?;
    let g = match graph {
        Some(p) => load_edge_list(p).with_context(|| format!("loading graph {}", p.display()))?,
        None => casablanca_topology(),
    };
    let r = route(&c, &g)?;
    Ok(RouteDocument {
        schema_version: SCHEMA_VERSION,
        command: "route",
        logical_qubits: c.num_qubits(),
        physical_qubits: g.num_physical(),
        edges: g.edges().map(|(u, v)| [u, v]).collect(),
        original_two_qubit_gates: c.two_qubit_gate_count(),
        layout: r.layout.mapping().to_vec(),
        final_layout: r.final_layout.mapping().to_vec(),
        cost: r.cost,
        routed_circuit: r.routed.to_text(),
    })
}

pub fn cmd_compare(args: &ExperimentArgs) -> Result<CompareDocument> {
    let mut cfg = args.resolve()?;
    if cfg.m != 1 {
        bail!("the cluster5 baseline is defined for m = 1 only");
    }
    cfg.scheme = Scheme::TwoBell;
    let comparison = compare_schemes(&cfg.chi_a()?, &cfg.chi_b()?)?;
    Ok(CompareDocument { schema_version: SCHEMA_VERSION, command: "compare", comparison })
}
