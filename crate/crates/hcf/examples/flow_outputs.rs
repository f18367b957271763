//! Driving a run programmatically: the same engine behind `hcf flow`,
//! producing trajectory.csv, run.json, and a gnuplot script.

use hcf::run::{execute_run, RunConfig, RunRecord};

fn main() {
    let dir = std::env::temp_dir().join("hcf_flow_outputs_example");

    let mut cfg = RunConfig::new("borel:2");
    cfg.h0 = "random_pd(12,0.5)".into();
    cfg.t_end = Some(2.0);
    cfg.sample_interval = Some(0.05);
    cfg.seed = 12;

    let (record, code) = execute_run(&cfg, &dir).unwrap();
    assert_eq!(code, 0);
    println!("termination: {:?}", record.termination);
    println!("samples: {}, final sup norm: {:.6e}", record.samples, record.final_sup_norm);
    if let Some(growth) = &record.growth {
        println!("regime: {:?} (R^2 = {:.4})", growth.regime, growth.fit_quality);
    }
    if let Some(e) = &record.einstein_final {
        println!("einstein residual at t_end: {:.3e}", e.residual);
    }

    // Everything needed to reproduce or re-analyze the run is in run.json.
    let text = std::fs::read_to_string(dir.join("run.json")).unwrap();
    let back: RunRecord = serde_json::from_str(&text).unwrap();
    println!("record round-trips: {} samples, algebra {}", back.samples, back.config.algebra);

    let csv = std::fs::read_to_string(dir.join(record.trajectory_csv)).unwrap();
    let header = csv.lines().next().unwrap();
    println!("csv columns: {header}");
    println!("csv rows: {}", csv.lines().count() - 1);
    println!("outputs in {}", dir.display());
}
