use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use rebit::contextuality::{
    classify_stabilizer_diagonal, classify_table, witness_value, witness_value_wigner, Certificate,
    Classification, SweepFamily, WitnessSpec, CONTEXTUAL_TOL,
};
use rebit::css::{hudson_verify, StabilizerGroup};
use rebit::dense::ComplexState;
use rebit::gf2::{GF2Subspace, GF2Vector, PhasePoint};
use rebit::injection::{oracle_distribution, run_encoded, sample_encoded, validate_circuit, LogicalCircuit};
use rebit::pauli::PauliOp;
use rebit::sim::{born_distribution, tv_distance, Sampler, SimCircuit};

use crate::input::{check_exists, Loaded, StateArgs};
use crate::{Format, Status};

/// Routes data to stdout or a file in the requested format.
pub struct Output {
    format: Format,
    path: Option<PathBuf>,
}

impl Output {
    pub fn new(format: Format, path: Option<PathBuf>) -> Self {
        Self { format, path }
    }

    fn check_target(&self) -> Result<()> {
        if let Some(dir) = self.path.as_deref().and_then(Path::parent) {
            if !dir.as_os_str().is_empty() && !dir.is_dir() {
                bail!("output directory {} does not exist", dir.display());
            }
        }
        Ok(())
    }

    fn write(&self, text: &str) -> Result<()> {
        match &self.path {
            Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    /// Writes `csv` or the pretty JSON `value`.
    fn emit(&self, value: &Value, csv: impl FnOnce() -> String) -> Result<()> {
        match self.format {
            Format::Json => self.write(&format!("{}\n", serde_json::to_string_pretty(value)?)),
            Format::Csv => self.write(&csv()),
        }
    }
}

/// `key,value` rows for the scalar fields of a JSON object.
fn flat_csv(value: &Value) -> String {
    let mut s = String::from("key,value\n");
    if let Value::Object(map) = value {
        for (k, v) in map {
            match v {
                Value::Object(_) | Value::Array(_) => {}
                Value::String(t) => s.push_str(&format!("{k},{t}\n")),
                other => s.push_str(&format!("{k},{other}\n")),
            }
        }
    }
    s
}

fn labels(n: usize, subspace: &GF2Subspace) -> Vec<String> {
    subspace
        .basis()
        .iter()
        .map(|&b| PauliOp::plus(PhasePoint::from_index(n, b)).to_string())
        .collect()
}

fn classification_json(n: usize, c: &Classification) -> Value {
    let certificate = match &c.certificate {
        Certificate::NonnegativeTable(_) => json!({ "kind": "nonnegative_table" }),
        Certificate::Violation {
            subspace,
            offset,
            sum,
        } => json!({
            "kind": "violation",
            "subspace": labels(n, subspace),
            "offset": { "u_Z": offset.z_part().to_string(), "u_X": offset.x_part().to_string() },
            "coset_sum": sum,
        }),
        Certificate::Inconclusive { min_coset_sum } => json!({
            "kind": "inconclusive",
            "min_coset_sum": min_coset_sum,
        }),
    };
    json!({
        "verdict": c.verdict.to_string(),
        "min_value": c.min_value,
        "certificate": certificate,
    })
}

pub fn wigner(out: &Output, state: &StateArgs) -> Result<Status> {
    state.validate_paths()?;
    out.check_target()?;
    let w = state.load()?.table()?;
    let neg = w.negativity();
    let entries: Vec<Value> = PhasePoint::all(w.n())
        .map(|u| {
            json!({
                "u_Z": u.z_part().to_string(),
                "u_X": u.x_part().to_string(),
                "value": w.get(&u),
                "negative": w.get(&u) < -rebit::wigner::NONNEG_TOL,
            })
        })
        .collect();
    let value = json!({
        "n": w.n(),
        "entries": entries,
        "min_value": neg.min_value,
        "negativity_mass": neg.neg_mass.abs(),
        "nonnegative": neg.is_nonnegative,
    });
    out.emit(&value, || w.to_csv_flagged())?;
    eprintln!(
        "{} rebits, min W = {:.6}, negativity mass = {:.6}",
        w.n(),
        neg.min_value,
        neg.neg_mass.abs()
    );
    Ok(Status::Ok)
}

pub fn classify(out: &Output, state: &StateArgs, diagonal_in: Option<&str>) -> Result<Status> {
    state.validate_paths()?;
    out.check_target()?;
    let loaded = state.load()?;
    let w = loaded.table()?;
    let c = match diagonal_in {
        Some(gens) => {
            let text = gens
                .split(',')
                .map(|g| format!("{}\n", g.trim()))
                .collect::<String>();
            let group = StabilizerGroup::from_text(&text).context("parsing --diagonal-in")?;
            classify_stabilizer_diagonal(loaded.matrix(), &group)?
        }
        None => classify_table(&w)?,
    };
    if !c.recheck(&w) {
        return Ok(Status::VerificationFailed("certificate does not re-check".into()));
    }
    let value = classification_json(w.n(), &c);
    out.emit(&value, || {
        let detail = match &c.certificate {
            Certificate::Violation { subspace, sum, .. } => {
                format!("{} {}", labels(w.n(), subspace).join(" "), sum)
            }
            Certificate::Inconclusive { min_coset_sum } => min_coset_sum.to_string(),
            Certificate::NonnegativeTable(_) => String::new(),
        };
        format!(
            "verdict,min_value,certificate\n{},{},{}\n",
            c.verdict, c.min_value, detail
        )
    })?;
    eprintln!("{}", c.verdict);
    Ok(Status::Ok)
}

pub fn sweep(
    out: &Output,
    family: &str,
    resolution: usize,
    min: f64,
    max: f64,
    check: bool,
) -> Result<Status> {
    out.check_target()?;
    let family: SweepFamily = family.parse()?;
    let s = rebit::contextuality::sweep(family, resolution, min, max)?;
    let report = s.check();
    let value = json!({
        "family": family.to_string(),
        "resolution": resolution,
        "range": [min, max],
        "check": report,
        "points": s.points,
    });
    out.emit(&value, || s.to_csv())?;
    eprintln!(
        "{family}: {} points, {} compared with the closed-form region, {} boundary-cell mismatches, {} elsewhere",
        s.points.len(),
        report.compared,
        report.mismatches - report.off_boundary,
        report.off_boundary
    );
    if check && !report.passed() {
        return Ok(Status::VerificationFailed(format!(
            "{} grid points disagree with the closed-form region away from its boundary",
            report.off_boundary
        )));
    }
    Ok(Status::Ok)
}

pub fn simulate(
    out: &Output,
    path: &Path,
    samples: u64,
    seed: u64,
    compare: bool,
    tolerance: f64,
) -> Result<Status> {
    check_exists(path)?;
    out.check_target()?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let circuit =
        SimCircuit::parse(&text, path.parent()).with_context(|| format!("parsing {}", path.display()))?;
    let hist = Sampler::new(&circuit)?.run(samples, seed);
    let mut value = json!({
        "samples": hist.samples,
        "seed": seed,
        "counts": hist.counts,
        "frequencies": hist.frequencies(),
    });
    let mut status = Status::Ok;
    if compare {
        let born = born_distribution(&circuit)?;
        let tv = tv_distance(&hist.frequencies(), &born);
        value["born"] = json!(born);
        value["tv_distance"] = json!(tv);
        value["tolerance"] = json!(tolerance);
        eprintln!("TV distance to dense Born distribution: {tv:.6} (tolerance {tolerance})");
        if tv >= tolerance {
            status = Status::VerificationFailed(format!("TV distance {tv} >= {tolerance}"));
        }
    }
    out.emit(&value, || hist.to_csv())?;
    Ok(status)
}

pub fn hudson(out: &Output, n: usize, samples: usize, seed: u64) -> Result<Status> {
    out.check_target()?;
    let report = hudson_verify(n, samples, seed)?;
    let value = serde_json::to_value(&report)?;
    out.emit(&value, || flat_csv(&value))?;
    if report.passed() {
        eprintln!(
            "n={n}: all CSS nonnegative; all non-CSS real stabilizer states negative ({} states, {} CSS)",
            report.stabilizer_states, report.css_states
        );
        Ok(Status::Ok)
    } else {
        Ok(Status::VerificationFailed(format!(
            "{} states contradict the CSS/nonnegativity correspondence",
            report.violations.len()
        )))
    }
}

pub fn witness(out: &Output, state: &StateArgs, basis: &str, x: &str) -> Result<Status> {
    state.validate_paths()?;
    out.check_target()?;
    let spec = WitnessSpec::parse(basis).context("parsing --basis")?;
    let x: GF2Vector = x.parse().context("parsing --x")?;
    let Loaded::Density(rho) = state.load()? else {
        bail!("the witness needs a density matrix input");
    };
    let w = rebit::wigner::wigner_of_density(&rho)?;
    let dense = witness_value(&rho, &spec, &x)?;
    let phase_space = witness_value_wigner(&w, &spec, &x)?;
    let agree = (dense - phase_space).abs() < 1e-9;
    let value = json!({
        "basis": spec.basis().iter().map(|a| PauliOp::plus(*a).to_string()).collect::<Vec<_>>(),
        "conjugates": spec.conjugates().iter().map(|b| format!("{}|{}", b.z_part(), b.x_part())).collect::<Vec<_>>(),
        "x": x.to_string(),
        "value": dense,
        "value_wigner": phase_space,
        "routes_agree": agree,
        "violated": dense < -CONTEXTUAL_TOL,
    });
    out.emit(&value, || flat_csv(&value))?;
    eprintln!("witness value {dense:.12} (Wigner route {phase_space:.12})");
    if !agree {
        return Ok(Status::VerificationFailed(format!(
            "dense value {dense} and Wigner value {phase_space} differ"
        )));
    }
    Ok(Status::Ok)
}

pub fn inject(
    out: &Output,
    path: &Path,
    seed: u64,
    validate: bool,
    shots: usize,
    log: Option<&Path>,
) -> Result<Status> {
    check_exists(path)?;
    out.check_target()?;
    if let Some(dir) = log.and_then(Path::parent) {
        if !dir.as_os_str().is_empty() && !dir.is_dir() {
            bail!("log directory {} does not exist", dir.display());
        }
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let circuit = LogicalCircuit::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
    let input = ComplexState::zero(circuit.n())?;
    let run = run_encoded(&circuit, &input, seed)?;
    if let Some(p) = log {
        fs::write(p, serde_json::to_string_pretty(&run.log)?)
            .with_context(|| format!("writing {}", p.display()))?;
    }
    let mut failures = Vec::new();
    if !run.audit.passed() {
        failures.push(format!("whitelist audit: {:?}", run.audit.violations));
    }
    let oracle = oracle_distribution(&circuit, &input)?;
    let mut value = json!({
        "qubits": circuit.n(),
        "seed": seed,
        "outcomes": run.outcomes,
        "decoded": run.decoded,
        "primitive_operations": run.log.len(),
        "audit": run.audit,
        "oracle_distribution": oracle,
    });
    if validate {
        let report = validate_circuit(&circuit, &input)?;
        if !report.passed(1e-9) {
            failures.push(format!(
                "branch validation: infidelity {:.3e}, probability error {:.3e}",
                report.max_infidelity, report.max_probability_error
            ));
        }
        eprintln!(
            "{} branches, max infidelity {:.3e}, whitelist violations {}",
            report.branches, report.max_infidelity, report.whitelist_violations
        );
        value["validation"] = serde_json::to_value(&report)?;
    }
    if shots > 0 {
        let counts = sample_encoded(&circuit, &input, shots, seed)?;
        let freqs: rebit::sim::Distribution = counts
            .iter()
            .map(|(k, &c)| (k.clone(), c as f64 / shots as f64))
            .collect();
        let tv = tv_distance(&freqs, &oracle);
        eprintln!("{shots} encoded runs, TV distance to oracle {tv:.6}");
        value["sampled_counts"] = json!(counts);
        value["tv_distance"] = json!(tv);
    }
    out.emit(&value, || flat_csv(&value))?;
    if failures.is_empty() {
        Ok(Status::Ok)
    } else {
        Ok(Status::VerificationFailed(failures.join("; ")))
    }
}
