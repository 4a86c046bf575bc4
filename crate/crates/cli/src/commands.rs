use serde_json::{json, Value};
use specfid::output::format_f64;
use specfid::verify::{run, search_dpi_violation, t_sweep_extended, DpiWitness};
use specfid::{
    from_bloch, matsumoto_fidelity, replay_paper_counterexample, sandwiched_renyi, second_fvg_failure,
    spectral_fidelity, t_sweep, uhlmann_fidelity, BlochVector, DensityMatrix, MatrixJson, SuiteConfig,
};

use crate::config::{Command, RunConfig, StateSource};
use crate::error::{CliError, CliResult};

/// What a command produced: a JSON result, the same data as CSV rows, and
/// whether anything contradicted its expected outcome.
pub struct Outcome {
    pub result: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub unexpected: bool,
}

fn num(x: f64) -> String {
    format_f64(x)
}

fn opt(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

pub fn load_state(src: &StateSource) -> CliResult<DensityMatrix> {
    match src {
        StateSource::Bloch(r) => Ok(from_bloch(&BlochVector::new(*r)?)?),
        StateSource::Path(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let json: MatrixJson =
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            DensityMatrix::from_json(&json).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
    }
}

fn states(cfg: &RunConfig) -> CliResult<(DensityMatrix, DensityMatrix)> {
    let get = |s: &Option<StateSource>| load_state(s.as_ref().expect("validated"));
    let (rho, sigma) = (get(&cfg.rho)?, get(&cfg.sigma)?);
    if rho.dim() != sigma.dim() {
        return Err(CliError::Config(format!("rho is {0}x{0} but sigma is {1}x{1}", rho.dim(), sigma.dim())));
    }
    Ok((rho, sigma))
}

pub fn execute(cfg: &RunConfig) -> CliResult<Outcome> {
    match cfg.command {
        Command::Fidelity => fidelity(cfg),
        Command::Sweep => sweep(cfg),
        Command::Verify => verify(cfg),
        Command::DpiSearch => dpi_search(cfg),
        Command::DpiReplay => dpi_replay(),
        Command::Fvg => fvg(cfg),
    }
}

fn fidelity(cfg: &RunConfig) -> CliResult<Outcome> {
    let (rho, sigma) = states(cfg)?;
    let t = cfg.fidelity_t();
    let spec = spectral_fidelity(&rho, &sigma, t)?;
    let mut result = json!({ "t": t, "spectral": spec });
    let mut rows = vec![vec!["spectral".into(), num(t), String::new(), num(spec.value)]];
    if cfg.all {
        let uhl = uhlmann_fidelity(&rho, &sigma)?.value;
        let mats = matsumoto_fidelity(&rho, &sigma)?.value;
        result["uhlmann"] = json!(uhl);
        result["matsumoto"] = json!(mats);
        rows.push(vec!["uhlmann".into(), String::new(), String::new(), num(uhl)]);
        rows.push(vec!["matsumoto".into(), String::new(), String::new(), num(mats)]);
        let mut renyi = Vec::new();
        for &alpha in &cfg.alpha {
            match sandwiched_renyi(&rho, &sigma, alpha) {
                Ok(d) => {
                    renyi.push(json!({ "alpha": alpha, "value": d }));
                    rows.push(vec!["sandwiched_renyi".into(), String::new(), num(alpha), num(d)]);
                }
                Err(e) => {
                    renyi.push(json!({ "alpha": alpha, "value": null, "error": e.to_string() }));
                    rows.push(vec!["sandwiched_renyi".into(), String::new(), num(alpha), String::new()]);
                }
            }
        }
        result["sandwiched_renyi"] = json!(renyi);
    }
    Ok(Outcome { result, header: vec!["quantity", "t", "alpha", "value"], rows, unexpected: false })
}

fn sweep(cfg: &RunConfig) -> CliResult<Outcome> {
    let (rho, sigma) = states(cfg)?;
    let grid = cfg.sweep_grid()?;
    let curve = if cfg.extended { t_sweep_extended(&rho, &sigma, &grid)? } else { t_sweep(&rho, &sigma, &grid)? };
    let rows = curve
        .iter()
        .map(|r| vec![num(r.t), num(r.value), num(r.log_value), opt(r.second_diff), opt(r.log_second_diff)])
        .collect();
    Ok(Outcome {
        result: json!(curve),
        header: vec!["t", "value", "log_value", "second_diff", "log_second_diff"],
        rows,
        unexpected: false,
    })
}

fn verify(cfg: &RunConfig) -> CliResult<Outcome> {
    let ids: Vec<String> = if cfg.all {
        specfid::verify::registry().iter().map(|p| p.id.to_string()).collect()
    } else {
        cfg.properties.clone()
    };
    let mut reports = Vec::with_capacity(ids.len());
    for id in &ids {
        let mut suite = SuiteConfig::new(id, &cfg.dims, cfg.samples, cfg.seed).with_tolerances(cfg.tolerances.clone());
        suite.t = cfg.t;
        reports.push(run(&suite)?);
    }
    let rows = reports
        .iter()
        .map(|r| {
            let dims = r.dims.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
            vec![
                r.property_id.clone(),
                serde_json::to_value(r.verdict).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                num(r.max_violation),
                num(r.tolerance),
                r.seed.to_string(),
                r.samples.to_string(),
                dims,
                opt(r.t),
            ]
        })
        .collect();
    let unexpected = reports.iter().any(|r| r.is_unexpected());
    Ok(Outcome {
        result: json!(reports),
        header: vec!["property", "verdict", "max_violation", "tolerance", "seed", "samples", "dims", "t"],
        rows,
        unexpected,
    })
}

fn witness_row(dim: Option<usize>, t: f64, w: Option<&DpiWitness>) -> Vec<String> {
    let mut row = vec![dim.map(|d| d.to_string()).unwrap_or_default(), num(t), w.is_some().to_string()];
    match w {
        Some(w) => row.extend([
            w.trial.map(|i| i.to_string()).unwrap_or_default(),
            num(w.f_before),
            num(w.f_after),
            num(w.gap()),
            opt(w.min_coherence),
        ]),
        None => row.extend(std::iter::repeat_n(String::new(), 5)),
    }
    row
}

const WITNESS_HEADER: [&str; 8] = ["dim", "t", "found", "trial", "f_before", "f_after", "gap", "min_coherence"];

fn dpi_search(cfg: &RunConfig) -> CliResult<Outcome> {
    let t = cfg.t.expect("validated");
    let mut results = Vec::new();
    let mut rows = Vec::new();
    let mut unexpected = false;
    for &dim in &cfg.dims {
        let found = search_dpi_violation(t, dim, cfg.trials, cfg.seed, cfg.family.into())?;
        // the midpoint is the Uhlmann fidelity, which is monotone
        unexpected |= t == 0.5 && found.is_some();
        rows.push(witness_row(Some(dim), t, found.as_ref()));
        results.push(json!({
            "dim": dim,
            "t": t,
            "trials": cfg.trials,
            "family": cfg.family,
            "witness": found.as_ref().map(DpiWitness::to_json),
        }));
    }
    Ok(Outcome { result: json!(results), header: WITNESS_HEADER.to_vec(), rows, unexpected })
}

fn dpi_replay() -> CliResult<Outcome> {
    let w = replay_paper_counterexample()?;
    Ok(Outcome {
        result: w.to_json(),
        header: WITNESS_HEADER.to_vec(),
        rows: vec![witness_row(None, w.t, Some(&w))],
        unexpected: false,
    })
}

fn fvg(cfg: &RunConfig) -> CliResult<Outcome> {
    let header = vec!["t", "c", "half_trace_dist", "rhs", "margin", "violated"];
    if let (Some(t), Some(c)) = (cfg.t, cfg.c) {
        let r = second_fvg_failure(t, c)?;
        let mut result = json!(r);
        result["margin"] = json!(r.margin());
        let rows =
            vec![vec![num(t), num(c), num(r.half_trace_dist), num(r.rhs), num(r.margin()), r.violated.to_string()]];
        return Ok(Outcome { result, header, rows, unexpected: false });
    }
    let ts = cfg.t_grid.expect("validated").points()?;
    let cs = cfg.c_grid.expect("validated").points()?;
    let mut cells = Vec::with_capacity(ts.len() * cs.len());
    let mut rows = Vec::with_capacity(ts.len() * cs.len());
    for &t in &ts {
        for &c in &cs {
            let r = second_fvg_failure(t, c)?;
            rows.push(vec![
                num(t),
                num(c),
                num(r.half_trace_dist),
                num(r.rhs),
                num(r.margin()),
                r.violated.to_string(),
            ]);
            let mut cell = json!(r);
            cell["margin"] = json!(r.margin());
            cells.push(cell);
        }
    }
    Ok(Outcome { result: json!(cells), header, rows, unexpected: false })
}
