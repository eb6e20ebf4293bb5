use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use rebit::css::StabilizerGroup;
use rebit::dense::DenseDensity;
use rebit::states::{named_state, one_rebit_operator, two_rebit_operator};
use rebit::wigner::{wigner_of_density, wigner_of_operator, WignerTable};

/// Exactly one state source.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct StateArgs {
    /// Named state: zeroN, oneN, plusN, minusN, ghzN, bell, g2, b, k2, k3.
    #[arg(long)]
    pub state: Option<String>,
    /// File with one signed Pauli generator per line (e.g. `+XZ`).
    #[arg(long, value_name = "FILE")]
    pub stabilizer: Option<PathBuf>,
    /// Maximally mixed state on N rebits (`N` or `n=N`).
    #[arg(long, value_name = "N")]
    pub mixed: Option<String>,
    /// JSON density matrix `{"n": .., "matrix": [[..], ..]}`.
    #[arg(long, value_name = "FILE")]
    pub density: Option<PathBuf>,
    /// One-rebit operator (I + xX + zZ)/2, possibly unphysical.
    #[arg(long, value_name = "X,Z", allow_hyphen_values = true)]
    pub one_rebit: Option<String>,
    /// Two-rebit operator (I + a XZ)(I + b ZX)/4, possibly unphysical.
    #[arg(long, value_name = "A,B", allow_hyphen_values = true)]
    pub two_rebit: Option<String>,
}

/// A loaded input: a density matrix, or a unit-trace symmetric operator
/// that need not be positive.
pub enum Loaded {
    Density(DenseDensity),
    Operator(nalgebra::DMatrix<f64>),
}

fn pair(text: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else {
        bail!("expected two comma-separated numbers, got {text:?}");
    };
    Ok((
        a.parse().context("first parameter")?,
        b.parse().context("second parameter")?,
    ))
}

pub fn check_exists(path: &Path) -> Result<()> {
    if !path.is_file() {
        bail!("input file {} does not exist", path.display());
    }
    Ok(())
}

impl StateArgs {
    pub fn validate_paths(&self) -> Result<()> {
        for p in [&self.stabilizer, &self.density].into_iter().flatten() {
            check_exists(p)?;
        }
        Ok(())
    }

    pub fn load(&self) -> Result<Loaded> {
        if let Some(name) = &self.state {
            return Ok(Loaded::Density(named_state(name)?.density()?));
        }
        if let Some(path) = &self.stabilizer {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let group =
                StabilizerGroup::from_text(&text).with_context(|| format!("parsing {}", path.display()))?;
            if !group.is_full() {
                bail!("{} does not fix a unique state", path.display());
            }
            return Ok(Loaded::Density(group.state()?.density()?));
        }
        if let Some(spec) = &self.mixed {
            let n: usize = spec
                .trim_start_matches("n=")
                .parse()
                .with_context(|| format!("invalid rebit count {spec:?}"))?;
            return Ok(Loaded::Density(DenseDensity::maximally_mixed(n)?));
        }
        if let Some(path) = &self.density {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let rho: DenseDensity =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            return Ok(Loaded::Density(rho));
        }
        if let Some(p) = &self.one_rebit {
            let (x, z) = pair(p)?;
            return Ok(Loaded::Operator(one_rebit_operator(x, z)));
        }
        if let Some(p) = &self.two_rebit {
            let (a, b) = pair(p)?;
            return Ok(Loaded::Operator(two_rebit_operator(a, b)));
        }
        unreachable!("clap enforces one state source")
    }
}

impl Loaded {
    pub fn table(&self) -> Result<WignerTable> {
        Ok(match self {
            Loaded::Density(rho) => wigner_of_density(rho)?,
            Loaded::Operator(m) => wigner_of_operator(m)?,
        })
    }

    pub fn matrix(&self) -> &nalgebra::DMatrix<f64> {
        match self {
            Loaded::Density(rho) => rho.matrix(),
            Loaded::Operator(m) => m,
        }
    }
}
