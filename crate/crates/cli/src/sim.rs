//! The `simulate` command: runs the type-I-error table (and optionally the
//! power sweeps) and writes them as CSV plus a JSON report.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use gsig::mc::{power_curve, run_table, PowerAxis, PowerPoint, Scenario, SimulationConfig};

use crate::error::{CliError, Result};
use crate::fmt_sig;
use crate::report::SimulationDoc;

pub struct SimulateOutputs {
    pub out_dir: PathBuf,
    pub power_n: usize,
    pub power_mu: f64,
    pub with_power: bool,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut file = fs::File::create(path)
        .map_err(|e| CliError::Resource(format!("cannot create {}: {e}", path.display())))?;
    file.write_all(contents.as_bytes())
        .map_err(|e| CliError::Resource(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn power_csv(points: &[PowerPoint], grid_header: &str, grid_of: impl Fn(&PowerPoint) -> String) -> String {
    let mut csv = format!("{grid_header},robust,classical,approx\n");
    for p in points {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            grid_of(p),
            p.cell.rate_robust(),
            p.cell.rate_classical(),
            p.approx
        ));
    }
    csv
}

pub fn run(cfg: &SimulationConfig, outputs: &SimulateOutputs) -> Result<()> {
    fs::create_dir_all(&outputs.out_dir).map_err(|e| {
        CliError::Resource(format!(
            "cannot create output directory {}: {e}",
            outputs.out_dir.display()
        ))
    })?;

    let report = run_table(cfg)?;

    let mut type1 = String::from("n,robust_rate,classical_rate,robust_se,classical_se\n");
    for cell in &report.cells {
        type1.push_str(&format!(
            "{},{},{},{},{}\n",
            cell.n,
            cell.rate_robust(),
            cell.rate_classical(),
            cell.se_robust(),
            cell.se_classical()
        ));
    }
    let type1_path = outputs.out_dir.join("type1.csv");
    write_file(&type1_path, &type1)?;

    let json_path = outputs.out_dir.join("report.json");
    let doc = SimulationDoc::new(cfg, &report);
    write_file(&json_path, &format!("{}\n", serde_json::to_string_pretty(&doc)?))?;

    // Human-readable echo, rates with 4 decimals.
    let band = cfg.band();
    let scenario = match cfg.scenario() {
        Scenario::Sim1 => "sim1",
        Scenario::Sim2 => "sim2",
        Scenario::Custom(_) => "custom",
    };
    println!(
        "scenario {scenario}: alpha = {}, band = ({}, {}), mu0 = {}, reps = {}, seed = {}",
        report.alpha,
        band.sigma_lower(),
        band.sigma_upper(),
        cfg.mu0(),
        cfg.reps(),
        cfg.seed()
    );
    println!(
        "robust threshold = {}, adversary c = {}",
        fmt_sig(report.threshold_robust, 12),
        fmt_sig(report.adversary_c, 12)
    );
    println!("{:>8}  {:>8}  {:>9}", "n", "robust", "classical");
    for cell in &report.cells {
        println!(
            "{:>8}  {:>8.4}  {:>9.4}",
            cell.n,
            cell.rate_robust(),
            cell.rate_classical()
        );
    }
    let mut written = vec![type1_path, json_path];

    if outputs.with_power {
        let by_mu = power_curve(cfg, PowerAxis::VaryMu { n: outputs.power_n })?;
        let mu_path = outputs.out_dir.join("power_mu.csv");
        write_file(&mu_path, &power_csv(&by_mu, "mu", |p| p.cell.mu.to_string()))?;
        let by_n = power_curve(cfg, PowerAxis::VaryN { mu: outputs.power_mu })?;
        let n_path = outputs.out_dir.join("power_n.csv");
        write_file(&n_path, &power_csv(&by_n, "n", |p| p.cell.n.to_string()))?;
        written.push(mu_path);
        written.push(n_path);
    }

    let names: Vec<String> = written
        .iter()
        .map(|p| p.display().to_string())
        .collect();
    println!("wrote {}", names.join(", "));
    Ok(())
}
