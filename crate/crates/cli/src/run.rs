//! Task orchestration and report writing.

use std::collections::BTreeMap;

use deltamass::convergence::{resolvent_csv, resolvent_gap, ConvergenceReport, ResolventGap};
use deltamass::curve::fmt_num;
use deltamass::limitop::{limit_spectrum, limit_spectrum_csv, root_vector, VectorTag, JORDAN_TOL};
use deltamass::perturbed::{perturbed_eigenvalues, COUPLING_TOL};
use deltamass::slsolve::eig_tol;
use deltamass::{run_sweep, PerturbedEigenpair};
use rayon::prelude::*;
use serde::Serialize;

use crate::manifest::{CliError, RunManifest, Task};
use crate::plot::{Plot, Series};
use crate::Format;

/// Samples per piece in eigenfunction tables.
pub const EFUN_SAMPLES: usize = 201;

/// Slack on the fitted `C sqrt(eps)` resolvent bound.
pub const RESOLVENT_SLACK: f64 = 1.25;

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub name: &'static str,
    /// Hard criteria decide the exit status.
    pub hard: bool,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub spec: String,
    pub source: String,
    pub seed: u64,
    pub tasks: Vec<Task>,
    pub eps_grid: Vec<f64>,
    pub n_track: usize,
    pub truncation: f64,
    pub zeta: [f64; 2],
    pub resolvent_nodes: usize,
    pub files: Vec<String>,
    pub criteria: Vec<Criterion>,
    pub all_hard_pass: bool,
}

impl Summary {
    pub fn headline(&self) -> String {
        let failed: Vec<&str> = self
            .criteria
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name)
            .collect();
        format!(
            "{}: {} of {} criteria pass{}",
            self.spec,
            self.criteria.len() - failed.len(),
            self.criteria.len(),
            if failed.is_empty() {
                String::new()
            } else {
                format!("; failing: {}", failed.join(", "))
            }
        )
    }
}

struct Outputs {
    files: BTreeMap<String, String>,
    criteria: Vec<Criterion>,
    svg: bool,
}

impl Outputs {
    fn add(&mut self, name: &str, body: String) {
        self.files.insert(name.to_string(), body);
    }

    fn plot(&mut self, name: &str, p: Plot) {
        if self.svg {
            if let Some(s) = p.render() {
                self.add(name, s);
            }
        }
    }

    fn check(&mut self, name: &'static str, hard: bool, pass: bool, detail: String) {
        self.criteria.push(Criterion {
            name,
            hard,
            pass,
            detail,
        });
    }
}

fn perturbed_outputs(m: &RunManifest, o: &mut Outputs) -> Result<(), CliError> {
    let per: Vec<Vec<PerturbedEigenpair>> = m
        .sweep
        .eps_grid
        .par_iter()
        .map(|&e| perturbed_eigenvalues(&m.spec, e, m.sweep.n_track))
        .collect::<deltamass::Result<_>>()?;
    let mut spec_csv = String::from("eps,index,lambda_eps\n");
    let mut efun = String::from("eps,index,piece,x,re,im,re_deriv,im_deriv\n");
    let mut worst: f64 = 0.0;
    let mut simple = true;
    for list in &per {
        for p in list {
            spec_csv += &format!("{},{},{}\n", fmt_num(p.eps), p.index, fmt_num(p.lambda_eps));
            for (tag, g) in [
                ("outer_left", &p.pieces[0]),
                ("inner", &p.pieces[1]),
                ("outer_right", &p.pieces[2]),
            ] {
                g.sample(EFUN_SAMPLES).write_csv_rows(
                    &mut efun,
                    Some(&format!("{},{},{tag}", fmt_num(p.eps), p.index)),
                );
            }
            worst = p.coupling_residuals().into_iter().fold(worst, f64::max);
        }
        simple &= list
            .windows(2)
            .all(|w| w[1].lambda_eps - w[0].lambda_eps > 10.0 * eig_tol(w[1].lambda_eps));
    }
    o.add("perturbed_spectrum.csv", spec_csv);
    o.add("perturbed_eigenfunctions.csv", efun);
    o.check(
        "coupling_residuals",
        true,
        worst <= COUPLING_TOL,
        format!("max relative coupling defect {worst:.2e} (limit {COUPLING_TOL:e})"),
    );
    o.check(
        "perturbed_simple",
        true,
        simple,
        "consecutive eigenvalues separated by more than 10 eig_tol".into(),
    );
    Ok(())
}

fn limit_outputs(m: &RunManifest, o: &mut Outputs) -> Result<(), CliError> {
    let list = limit_spectrum(&m.spec, m.sweep.n_track)?;
    o.add("limit_spectrum.csv", limit_spectrum_csv(&list));
    let mut basis = String::from("lambda,vector,tag,piece,x,re,im,re_deriv,im_deriv\n");
    let mut worst: f64 = 0.0;
    for d in &list {
        for (j, v) in d.basis.iter().enumerate() {
            let tag = match v.tag {
                VectorTag::Eigenvector => "eigenvector",
                VectorTag::RootVector => "root_vector",
            };
            for (piece, g) in v.v.sample(EFUN_SAMPLES) {
                g.write_csv_rows(
                    &mut basis,
                    Some(&format!("{},{j},{tag},{piece}", fmt_num(d.lambda))),
                );
            }
        }
        if d.kind.has_root_vector() {
            worst = worst.max(root_vector(&m.spec, d)?.jordan_residual);
        }
    }
    o.add("limit_basis.csv", basis);
    o.check(
        "jordan_residuals",
        true,
        worst <= JORDAN_TOL,
        format!("max Jordan-chain residual {worst:.2e} (limit {JORDAN_TOL:e})"),
    );
    Ok(())
}

fn gap_plot(title: &str, y_label: &str, series: Vec<Series>) -> Plot {
    Plot {
        title: title.into(),
        x_label: "eps".into(),
        y_label: y_label.into(),
        series,
        log_y: true,
        sqrt_guide: true,
        hlines: vec![],
    }
}

fn convergence_outputs(r: &ConvergenceReport, o: &mut Outputs) {
    o.add("pairs.csv", r.pairs_csv());
    o.add("rates.csv", r.rates_csv());
    o.add("clusters.csv", r.clusters_csv());
    o.add("hausdorff.csv", r.hausdorff_csv());
    o.add("eigenfunction_gaps.csv", r.efun_csv());
    o.add("subspace_gaps.csv", r.subspace_csv());
    let mut an = String::from("eps,n\n");
    for (e, list) in &r.anomalies {
        for n in list {
            an += &format!("{},{}\n", fmt_num(*e), n + 1);
        }
    }
    o.add("anomalies.csv", an);

    let n_max = r.rates.len();
    let series = (1..=n_max)
        .map(|n| Series {
            label: format!("n = {n}"),
            points: r
                .pairs
                .iter()
                .filter(|p| p.n == n)
                .map(|p| (p.eps, p.gap))
                .collect(),
        })
        .collect();
    o.plot(
        "eigenvalue_gaps.svg",
        gap_plot("|lambda_n^eps - lambda_n|", "gap", series),
    );
    let h = Series {
        label: format!("Lambda = {}", r.truncation),
        points: r.hausdorff.iter().map(|h| (h.eps, h.distance)).collect(),
    };
    o.plot(
        "hausdorff.svg",
        gap_plot("truncated Hausdorff distance", "distance", vec![h]),
    );
    let mut ns: Vec<usize> = r.efun_gaps.iter().map(|g| g.n).collect();
    ns.dedup();
    let series = ns
        .iter()
        .map(|&n| Series {
            label: format!("n = {n}"),
            points: r
                .efun_gaps
                .iter()
                .filter(|g| g.n == n)
                .map(|g| (g.eps, g.gap))
                .collect(),
        })
        .collect();
    o.plot(
        "eigenfunction_gaps.svg",
        gap_plot("eigenfunction gap in L2(a, b)", "gap", series),
    );
    let mut ls: Vec<f64> = r.subspace_gaps.iter().map(|g| g.lambda).collect();
    ls.dedup();
    let series = ls
        .iter()
        .map(|&l| Series {
            label: format!("lambda = {l:.4}"),
            points: r
                .subspace_gaps
                .iter()
                .filter(|g| g.lambda == l)
                .map(|g| (g.eps, g.gap))
                .collect(),
        })
        .collect();
    o.plot(
        "subspace_gaps.svg",
        gap_plot("root-subspace gap", "gap", series),
    );

    for (k, c) in r.clusters.iter().filter(|c| c.multiplicity > 1).enumerate() {
        let members: Vec<usize> = (0..r.limit.len())
            .filter(|&i| r.limit[i] == c.lambda)
            .collect();
        let series = members
            .iter()
            .map(|&i| Series {
                label: format!("n = {}", i + 1),
                points: r
                    .pairs
                    .iter()
                    .filter(|p| p.n == i + 1)
                    .map(|p| (p.eps, p.lambda_eps))
                    .collect(),
            })
            .collect();
        o.plot(
            &format!("cluster_{}.svg", k + 1),
            Plot {
                title: format!(
                    "cluster at lambda = {:.6} (m = {})",
                    c.lambda, c.multiplicity
                ),
                x_label: "eps".into(),
                y_label: "lambda_n^eps".into(),
                series,
                log_y: false,
                sqrt_guide: false,
                hlines: vec![c.lambda - c.radius, c.lambda, c.lambda + c.radius],
            },
        );
    }

    if let (Some(first), Some(last)) = (r.hausdorff.first(), r.hausdorff.last()) {
        let pass = r.hausdorff.len() < 2 || last.distance < first.distance;
        o.check(
            "hausdorff_decrease",
            true,
            pass,
            format!(
                "{:.4e} at eps {} -> {:.4e} at eps {}",
                first.distance, first.eps, last.distance, last.eps
            ),
        );
    }
    let bad: Vec<String> = r
        .clusters
        .iter()
        .filter(|c| c.counts.iter().rev().take(2).any(|&k| k != c.multiplicity))
        .map(|c| format!("{:.4}: {:?}", c.lambda, c.counts))
        .collect();
    o.check(
        "cluster_counts",
        false,
        bad.is_empty(),
        if bad.is_empty() {
            "counts equal multiplicities at the two smallest eps".into()
        } else {
            bad.join("; ")
        },
    );
    let grow: Vec<usize> = (1..=n_max)
        .filter(|&n| {
            let g: Vec<f64> = r.pairs.iter().filter(|p| p.n == n).map(|p| p.gap).collect();
            match (g.first(), g.last()) {
                (Some(a), Some(b)) => b - a > 10.0 * eig_tol(r.limit[n - 1]),
                _ => false,
            }
        })
        .collect();
    o.check(
        "eigenvalue_gaps_decrease",
        false,
        grow.is_empty(),
        format!("indices whose gap grew across the sweep: {grow:?}"),
    );
    let grow: Vec<usize> = ns
        .iter()
        .copied()
        .filter(|&n| {
            let g: Vec<f64> = r
                .efun_gaps
                .iter()
                .filter(|x| x.n == n)
                .map(|x| x.gap)
                .collect();
            g.last() > g.first()
        })
        .collect();
    o.check(
        "eigenfunction_gaps_decrease",
        false,
        grow.is_empty(),
        format!("indices whose gap grew across the sweep: {grow:?}"),
    );
}

fn resolvent_outputs(rows: &[ResolventGap], o: &mut Outputs) {
    o.add("resolvent.csv", resolvent_csv(rows));
    let s = Series {
        label: "doubled grid".into(),
        points: rows.iter().map(|g| (g.eps, g.gap)).collect(),
    };
    let c = Series {
        label: "base grid".into(),
        points: rows.iter().map(|g| (g.eps, g.gap_coarse)).collect(),
    };
    o.plot(
        "resolvent_gap.svg",
        gap_plot("resolvent difference norm", "gap", vec![s, c]),
    );
    let resolved = rows.iter().all(|g| g.resolved);
    o.check(
        "resolvent_resolved",
        true,
        resolved,
        "resolution doubling changes each gap by at most 1%".into(),
    );
    if let Some(first) = rows.first() {
        let c = first.gap / first.eps.sqrt();
        let ok = rows
            .iter()
            .all(|g| g.gap <= RESOLVENT_SLACK * c * g.eps.sqrt());
        o.check(
            "resolvent_sqrt_bound",
            true,
            ok,
            format!(
                "gap <= {RESOLVENT_SLACK} C sqrt(eps) with C = {c:.4e} fitted at eps = {}",
                first.eps
            ),
        );
    }
}

/// Numeric CSV fields that fail to be finite.
fn nonfinite_fields(files: &BTreeMap<String, String>) -> Vec<String> {
    let mut bad = Vec::new();
    for (name, body) in files.iter().filter(|(n, _)| n.ends_with(".csv")) {
        for (i, line) in body.lines().enumerate().skip(1) {
            if line
                .split(',')
                .any(|f| f.parse::<f64>().is_ok_and(|x| !x.is_finite()))
            {
                bad.push(format!("{name}:{}", i + 1));
            }
        }
    }
    bad
}

pub fn run(m: &RunManifest) -> Result<Summary, CliError> {
    let mut o = Outputs {
        files: BTreeMap::new(),
        criteria: Vec::new(),
        svg: m.format == Format::CsvSvg,
    };
    if m.tasks.contains(&Task::Perturbed) {
        perturbed_outputs(m, &mut o)?;
    }
    if m.tasks.contains(&Task::Limit) {
        limit_outputs(m, &mut o)?;
    }
    let mut resolvent_rows = None;
    if m.tasks.contains(&Task::Convergence) {
        let r = run_sweep(&m.spec, &m.sweep)?;
        convergence_outputs(&r, &mut o);
        resolvent_rows = Some(r.resolvent_gaps);
    }
    if m.tasks.contains(&Task::Resolvent) {
        let rows = match resolvent_rows {
            Some(r) => r,
            None => m
                .sweep
                .eps_grid
                .iter()
                .map(|&e| resolvent_gap(&m.spec, e, m.sweep.zeta_probe, m.sweep.resolvent_nodes))
                .collect::<deltamass::Result<Vec<_>>>()?,
        };
        resolvent_outputs(&rows, &mut o);
    }
    let bad = nonfinite_fields(&o.files);
    o.check(
        "finite_output",
        true,
        bad.is_empty(),
        if bad.is_empty() {
            "every CSV number is finite".into()
        } else {
            bad.join(", ")
        },
    );

    std::fs::create_dir_all(&m.out).map_err(|source| CliError::Io {
        path: m.out.clone(),
        source,
    })?;
    for (name, body) in &o.files {
        let path = m.out.join(name);
        std::fs::write(&path, body).map_err(|source| CliError::Io { path, source })?;
    }
    let all_hard_pass = o.criteria.iter().all(|c| c.pass || !c.hard);
    let mut files: Vec<String> = o.files.keys().cloned().collect();
    files.push("summary.json".into());
    let summary = Summary {
        spec: m.spec_name.clone(),
        source: m.spec_source.clone(),
        seed: m.seed,
        tasks: m.tasks.iter().copied().collect(),
        eps_grid: m.sweep.eps_grid.clone(),
        n_track: m.sweep.n_track,
        truncation: m.sweep.truncation,
        zeta: [m.sweep.zeta_probe.re, m.sweep.zeta_probe.im],
        resolvent_nodes: m.sweep.resolvent_nodes,
        files,
        criteria: o.criteria,
        all_hard_pass,
    };
    let path = m.out.join("summary.json");
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    std::fs::write(&path, text).map_err(|source| CliError::Io { path, source })?;
    Ok(summary)
}
