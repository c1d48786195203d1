//! Run configuration assembled from flags, the problem file and defaults.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::ValueEnum;
use deltamass::catalog::builtin;
use deltamass::{load_spec, ProblemSpec, SweepConfig, C64};
use serde::Serialize;
use thiserror::Error;

use crate::Format;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Core(#[from] deltamass::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for unusable input, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Core(
                deltamass::Error::Parse { .. }
                | deltamass::Error::Config(_)
                | deltamass::Error::Domain(_),
            ) => 2,
            CliError::Core(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Perturbed,
    Limit,
    Convergence,
    Resolvent,
}

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub spec_source: String,
    pub spec_name: String,
    pub spec: ProblemSpec,
    pub sweep: SweepConfig,
    pub out: PathBuf,
    /// Closed under dependencies.
    pub tasks: BTreeSet<Task>,
    pub seed: u64,
    pub format: Format,
}

/// Parse `RE,IM`.
pub fn parse_zeta(s: &str) -> Result<C64, CliError> {
    let bad = || CliError::Usage(format!("--zeta expects RE,IM, got `{s}`"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    Ok(C64::new(re, im))
}

/// Add the tasks each requested task depends on.
pub fn close_tasks(tasks: &[Task]) -> BTreeSet<Task> {
    let mut set: BTreeSet<Task> = tasks.iter().copied().collect();
    if set.contains(&Task::Convergence) {
        set.insert(Task::Perturbed);
        set.insert(Task::Limit);
    }
    set
}

impl RunManifest {
    #[allow(clippy::too_many_arguments)]
    pub fn build(
        spec: &str,
        out: PathBuf,
        tasks: &[Task],
        eps: Option<Vec<f64>>,
        n: Option<usize>,
        zeta: Option<&str>,
        nodes: Option<usize>,
        truncation: Option<f64>,
        seed: u64,
        format: Format,
    ) -> Result<Self, CliError> {
        let mut sweep = SweepConfig::default();
        let (spec_name, problem) = if let Some(name) = spec.strip_prefix("builtin:") {
            let p = builtin(name, seed)
                .ok_or_else(|| CliError::Usage(format!("no bundled spec named `{name}`")))?;
            (name.to_string(), p)
        } else {
            let file = load_spec(std::path::Path::new(spec))?;
            file.sweep.apply(&mut sweep);
            let name = file.name.clone().unwrap_or_else(|| {
                std::path::Path::new(spec)
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "spec".into())
            });
            (name, file.spec)
        };
        if let Some(e) = eps {
            sweep.eps_grid = e;
        }
        if let Some(n) = n {
            sweep.n_track = n;
        }
        if let Some(z) = zeta {
            sweep.zeta_probe = parse_zeta(z)?;
        }
        if let Some(k) = nodes {
            sweep.resolvent_nodes = k;
        }
        if let Some(t) = truncation {
            sweep.truncation = t;
        }
        let tasks = close_tasks(tasks);
        if tasks.is_empty() {
            return Err(CliError::Usage("no tasks requested".into()));
        }
        sweep.resolvent = tasks.contains(&Task::Resolvent);
        sweep.validate(&problem)?;
        Ok(RunManifest {
            spec_source: spec.to_string(),
            spec_name,
            spec: problem,
            sweep,
            out,
            tasks,
            seed,
            format,
        })
    }
}
