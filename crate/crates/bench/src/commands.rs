//! The benchmark commands. Each returns its rows so callers can inspect
//! them, and [`write_csv`]/[`write_json`] persist them.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use wigtomo::reconstruct::{
    fit_power_law, w2_fidelity, ElementEstimate, PowerLaw, ReconstructionReport,
};
use wigtomo::sampling::rng::{derive_seed, substream, CHUNK};
use wigtomo::sampling::{SamplingPlan, W2Options};
use wigtomo::{
    element_operators, enumerate_basis, ideal_w_state, metrics, w2_sample, ElementOperator,
    Strategy,
};

use crate::config::RunConfig;
use crate::error::Result;
use crate::harness::{
    demesst_estimates, demesst_states, fidelity_at, mean_stderr, median, oli_report, oli_signals,
    parse_strategy, OliDesign, Scenario,
};

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn strategies(names: &[String]) -> Result<Vec<Strategy>> {
    names.iter().map(|s| parse_strategy(s)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub modes: usize,
    pub strategy: Strategy,
    /// Smallest budget found whose median fidelity reaches the target.
    pub shots_to_target: Option<usize>,
    pub median_fidelity: f64,
    /// The budget cap was reached without crossing the target.
    pub flagged: bool,
}

/// Shots needed for the median fidelity over `seeds` runs to reach the
/// target, per mode count and strategy, by doubling then log-bisection.
pub fn scaling(config: &RunConfig) -> Result<Vec<ScalingRow>> {
    let sc = &config.scaling;
    let mut rows = Vec::new();
    for &modes in &sc.modes {
        for strategy in strategies(&sc.strategies)? {
            let seeds: Vec<u64> = (0..sc.seeds as u64)
                .map(|i| derive_seed(config.seed, &[0x5C, modes as u64, i]))
                .collect();
            let runs = seeds
                .iter()
                .map(|&s| {
                    let scn = Scenario::new(config, modes, s)?;
                    let design = match strategy {
                        Strategy::Oli => Some(OliDesign::new(&scn, config, s)?),
                        _ => None,
                    };
                    Ok((scn, design, s))
                })
                .collect::<Result<Vec<_>>>()?;
            let spp = runs[0].0.shots_per_point();
            let eval = |x: usize| -> Result<f64> {
                let f = runs
                    .iter()
                    .map(|(scn, d, s)| {
                        Ok(fidelity_at(scn, strategy, d.as_ref(), *s, x)?.unwrap_or(0.0))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Ok(median(&f))
            };
            let points = match &runs[0].1 {
                Some(d) => d.size(),
                None => runs[0].0.basis.dimension().pow(2),
            };
            let mut lo = points * spp;
            let f_lo = eval(lo)?;
            let row = if f_lo >= sc.target_fidelity {
                ScalingRow {
                    modes,
                    strategy,
                    shots_to_target: Some(lo),
                    median_fidelity: f_lo,
                    flagged: false,
                }
            } else {
                let mut hi = 2 * lo;
                let mut f_hi = eval(hi)?;
                while f_hi < sc.target_fidelity && hi < sc.budget_cap {
                    lo = hi;
                    hi = (2 * hi).min(sc.budget_cap);
                    f_hi = eval(hi)?;
                }
                if f_hi < sc.target_fidelity {
                    ScalingRow {
                        modes,
                        strategy,
                        shots_to_target: None,
                        median_fidelity: f_hi,
                        flagged: true,
                    }
                } else {
                    while hi as f64 / lo as f64 > sc.resolution {
                        let mid =
                            ((lo as f64 * hi as f64).sqrt() / spp as f64).round() as usize * spp;
                        if mid <= lo || mid >= hi {
                            break;
                        }
                        let f = eval(mid)?;
                        if f >= sc.target_fidelity {
                            hi = mid;
                            f_hi = f;
                        } else {
                            lo = mid;
                        }
                    }
                    ScalingRow {
                        modes,
                        strategy,
                        shots_to_target: Some(hi),
                        median_fidelity: f_hi,
                        flagged: false,
                    }
                }
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub strategy: Strategy,
    pub modes: usize,
    pub shots: usize,
    /// Physical-state fidelity to the ideal target, mean over groups.
    pub fidelity: f64,
    pub fidelity_stderr: f64,
    /// Frobenius distance to the pooled full-budget reconstruction.
    pub distance: f64,
    pub distance_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceFit {
    pub strategy: Strategy,
    pub modes: usize,
    pub a: f64,
    pub b: f64,
    pub ln_a_stderr: f64,
    pub b_stderr: f64,
    /// Coefficient of `a x^{-1/2}`, the geometric mean of `d √x`.
    pub a_half: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Convergence {
    pub rows: Vec<ConvergenceRow>,
    pub fits: Vec<ConvergenceFit>,
}

/// Reconstruction quality against shots. Each of the independent groups
/// is reconstructed at every checkpoint; distances are taken to the
/// reconstruction from all groups pooled at the last checkpoint and fitted
/// to `a x^b`. Distances compare the unconstrained estimates (assembled
/// elements, least squares) so they measure estimator spread rather than
/// the shrinkage of the physical projection; fidelities use the physical
/// variants.
pub fn convergence(config: &RunConfig) -> Result<Convergence> {
    let cv = &config.convergence;
    let modes = config.target.modes;
    let scn = Scenario::new(config, modes, config.seed)?;
    let spp = scn.shots_per_point();
    let groups = cv.groups as u64;
    let mut out = Convergence {
        rows: Vec::new(),
        fits: Vec::new(),
    };
    for strategy in strategies(&cv.strategies)? {
        // Per group and checkpoint: (raw state, physical state).
        let mut states = Vec::new();
        let mut pooled: Option<Vec<f64>> = None;
        let design = match strategy {
            Strategy::Oli => Some(OliDesign::new(&scn, config, config.seed)?),
            _ => None,
        };
        for g in 0..groups {
            let series = match &design {
                None => demesst_estimates(
                    &scn,
                    &element_operators(&scn.basis),
                    config.seed,
                    g,
                    &cv.checkpoints,
                )?,
                Some(d) => oli_signals(&scn, d, config.seed, g, &cv.checkpoints)?,
            };
            let mut per = Vec::new();
            for (values, &x) in series.iter().zip(&cv.checkpoints) {
                let values = values.as_ref().ok_or_else(|| {
                    crate::error::BenchError::Config(format!(
                        "checkpoint {x} is too small for {strategy}"
                    ))
                })?;
                per.push(reconstruct_pair(&scn, design.as_ref(), values, x)?);
            }
            let last = series.last().cloned().flatten().expect("checked above");
            match &mut pooled {
                None => pooled = Some(last),
                Some(p) => p.iter_mut().zip(&last).for_each(|(a, b)| *a += b),
            }
            states.push(per);
        }
        let mut pooled = pooled.expect("at least one group");
        pooled.iter_mut().for_each(|v| *v /= groups as f64);
        let total = cv.checkpoints.last().copied().unwrap_or(0) * groups as usize;
        let reference = reconstruct_pair(&scn, design.as_ref(), &pooled, total)?.0;
        let mut series = Vec::new();
        for (c, &x) in cv.checkpoints.iter().enumerate() {
            let mut fid = Vec::new();
            let mut dist = Vec::new();
            let ideal = design.as_ref().map_or(&scn.ideal, |d| &d.ideal);
            for per in &states {
                fid.push(per[c].1.overlap(ideal)?);
                dist.push(per[c].0.frobenius_distance(&reference)?);
            }
            let (fidelity, fidelity_stderr) = mean_stderr(&fid);
            let (distance, distance_stderr) = mean_stderr(&dist);
            let shots = x / spp * spp;
            series.push((shots as f64, distance));
            out.rows.push(ConvergenceRow {
                strategy,
                modes,
                shots,
                fidelity,
                fidelity_stderr,
                distance,
                distance_stderr,
            });
        }
        if series.len() >= 4 {
            let PowerLaw {
                a,
                b,
                ln_a_stderr,
                b_stderr,
            } = fit_power_law(&series)?;
            let a_half = (series.iter().map(|(x, d)| (d * x.sqrt()).ln()).sum::<f64>()
                / series.len() as f64)
                .exp();
            out.fits.push(ConvergenceFit {
                strategy,
                modes,
                a,
                b,
                ln_a_stderr,
                b_stderr,
                a_half,
            });
        }
    }
    Ok(out)
}

fn reconstruct_pair(
    scn: &Scenario,
    design: Option<&OliDesign>,
    values: &[f64],
    shots: usize,
) -> Result<(wigtomo::DensityMatrix, wigtomo::DensityMatrix)> {
    match design {
        None => demesst_states(&scn.basis, values),
        Some(d) => {
            let r = oli_report(d, values, shots)?;
            Ok((r.raw, r.physical))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    /// `full` or the reconstructed modes joined by `+`.
    pub variant: String,
    pub shots: usize,
    pub trace: f64,
    pub stderr: f64,
}

/// Raw DEMESST trace against shots for the full space and, when
/// configured, the single-subspace reconstruction on the selected modes
/// with every other mode in vacuum.
pub fn trace_check(config: &RunConfig) -> Result<Vec<TraceRow>> {
    let modes = config.target.modes;
    let scn = Scenario::new(config, modes, config.seed)?;
    let spp = scn.shots_per_point();
    let mut variants: Vec<(String, Vec<ElementOperator>)> =
        vec![("full".into(), element_operators(&scn.basis))];
    let sub = &config.trace_check.subspace;
    if !sub.is_empty() && sub.len() < modes {
        let basis = enumerate_basis(sub.len(), config.target.cutoff)?;
        let ops = element_operators(&basis)
            .iter()
            .map(|o| o.embed(sub, modes))
            .collect::<wigtomo::Result<Vec<_>>>()?;
        let name = sub
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join("+");
        variants.push((name, ops));
    }
    let checkpoints = &config.convergence.checkpoints;
    let mut rows = Vec::new();
    for (v, (name, ops)) in variants.iter().enumerate() {
        let diag: Vec<usize> = (0..ops.len())
            .filter(|&k| ops[k].row() == ops[k].col())
            .collect();
        let mut traces = vec![Vec::new(); checkpoints.len()];
        for g in 0..config.convergence.groups as u64 {
            let seed = derive_seed(config.seed, &[0x7C, v as u64]);
            let series = demesst_estimates(&scn, ops, seed, g, checkpoints)?;
            for (c, values) in series.iter().enumerate() {
                let values = values.as_ref().ok_or_else(|| {
                    crate::error::BenchError::Config(format!(
                        "checkpoint {} is too small",
                        checkpoints[c]
                    ))
                })?;
                traces[c].push(diag.iter().map(|&k| values[k]).sum::<f64>());
            }
        }
        for (c, t) in traces.iter().enumerate() {
            let (trace, stderr) = mean_stderr(t);
            rows.push(TraceRow {
                variant: name.clone(),
                shots: checkpoints[c] / spp * spp,
                trace,
                stderr,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct W2Row {
    pub samples: usize,
    pub shots: usize,
    pub fidelity: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct W2Summary {
    /// `Tr[ρ σ]` of the prepared state with the sampling target.
    pub overlap: f64,
    pub fidelity: f64,
    pub stderr: f64,
    /// Fit of the standard error to `a x^b` over the checkpoints.
    pub error_a: Option<f64>,
    pub error_b: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct W2Run {
    pub rows: Vec<W2Row>,
    pub summary: W2Summary,
}

/// Direct fidelity estimation of the prepared state against the W target
/// with `w2.target_phases`, using one accepted-sample stream whose
/// prefixes give the checkpoints.
pub fn w2(config: &RunConfig) -> Result<W2Run> {
    let modes = config.target.modes;
    let scn = Scenario::new(config, modes, config.seed)?;
    let phases = config
        .w2
        .target_phases
        .clone()
        .unwrap_or_else(|| config.phases());
    let target = ideal_w_state(modes, &phases)?;
    let options = W2Options {
        radius: config.w2.radius,
        cutoff: None,
        relative_cutoff: config.w2.relative_cutoff,
    };
    let count = *config.w2.checkpoints.last().expect("validated");
    let points = w2_sample(
        &target,
        &scn.protocol.angles,
        count,
        &options,
        derive_seed(config.seed, &[0x32]),
    )?;
    let signals: Vec<f64> = points
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(c, chunk)| -> Result<Vec<f64>> {
            let mut rng = substream(config.seed, &[0x33, c as u64]);
            chunk
                .iter()
                .map(|p| Ok(scn.backend.measure_signal(p, &scn.protocol, &mut rng)?))
                .collect()
        })
        .collect::<Result<Vec<_>>>()?
        .concat();
    let spp = scn.shots_per_point();
    let mut rows = Vec::new();
    for &n in &config.w2.checkpoints {
        let est = w2_fidelity(&points[..n], &signals[..n], 0.0)?;
        rows.push(W2Row {
            samples: n,
            shots: n * spp,
            fidelity: est.value,
            stderr: est.stderr,
        });
    }
    let prepared = scn.backend.state().restrict_to(target.basis().clone())?;
    let overlap = prepared.overlap(&target)?;
    let fit = if rows.len() >= 4 {
        Some(fit_power_law(
            &rows
                .iter()
                .map(|r| (r.shots as f64, r.stderr))
                .collect::<Vec<_>>(),
        )?)
    } else {
        None
    };
    let last = rows.last().expect("validated");
    let summary = W2Summary {
        overlap,
        fidelity: last.fidelity,
        stderr: last.stderr,
        error_a: fit.map(|f| f.a),
        error_b: fit.map(|f| f.b),
    };
    Ok(W2Run { rows, summary })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructSummary {
    pub strategy: Strategy,
    pub shots: usize,
    pub fidelity: f64,
    pub frobenius_to_ideal: f64,
    pub raw_trace: f64,
}

/// One reconstruction at `reconstruct.shots`.
pub fn reconstruct(config: &RunConfig) -> Result<(ReconstructSummary, ReconstructionReport)> {
    let strategy = parse_strategy(&config.reconstruct.strategy)?;
    let modes = config.target.modes;
    let scn = Scenario::new(config, modes, config.seed)?;
    let shots = config.reconstruct.shots;
    let too_small = || {
        crate::error::BenchError::Config(format!(
            "{shots} shots cannot cover the {strategy} design"
        ))
    };
    let report = match strategy {
        Strategy::Oli => {
            let design = OliDesign::new(&scn, config, config.seed)?;
            let y = oli_signals(&scn, &design, config.seed, 0, &[shots])?
                .pop()
                .flatten()
                .ok_or_else(too_small)?;
            oli_report(&design, &y, shots)?
        }
        Strategy::Demesst => {
            let ops = element_operators(&scn.basis);
            let values = demesst_estimates(&scn, &ops, config.seed, 0, &[shots])?
                .pop()
                .flatten()
                .ok_or_else(too_small)?;
            let (raw, physical) = demesst_states(&scn.basis, &values)?;
            let per_op: Vec<usize> =
                crate::harness::split(shots / scn.shots_per_point(), ops.len()).collect();
            let estimates = ops
                .iter()
                .zip(&values)
                .zip(&per_op)
                .map(|((o, &value), &n)| ElementEstimate {
                    label: o.label(),
                    value,
                    stderr: None,
                    batches: n,
                    shots: n * scn.shots_per_point(),
                })
                .collect();
            ReconstructionReport {
                strategy,
                raw,
                physical,
                estimates,
                total_shots: shots / scn.shots_per_point() * scn.shots_per_point(),
                iterations: None,
                objective: Vec::new(),
                power_law: None,
            }
        }
        Strategy::W2 => {
            return Err(crate::error::BenchError::Config(
                "use the w2 command for W2".into(),
            ))
        }
    };
    let ideal = match strategy {
        Strategy::Oli => scn.ideal.restrict_to(report.physical.basis().clone())?,
        _ => scn.ideal.clone(),
    };
    let m = metrics(&report.physical, &ideal)?;
    let summary = ReconstructSummary {
        strategy,
        shots: report.total_shots,
        fidelity: m.fidelity,
        frobenius_to_ideal: m.frobenius,
        raw_trace: report.raw_trace(),
    };
    Ok((summary, report))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizedSet {
    pub modes: usize,
    pub set_size: usize,
    pub condition: f64,
    pub greedy_condition: f64,
    pub plan: SamplingPlan,
}

/// The OLI displacement set for the configured target.
pub fn optimize_set(config: &RunConfig) -> Result<OptimizedSet> {
    let modes = config.target.modes;
    let scn = Scenario::new(config, modes, config.seed)?;
    let design = OliDesign::new(&scn, config, config.seed)?;
    Ok(OptimizedSet {
        modes,
        set_size: design.size(),
        condition: design.set.condition,
        greedy_condition: design.set.greedy_condition,
        plan: SamplingPlan {
            strategy: Strategy::Oli,
            seed: config.seed,
            shots_per_point: scn.shots_per_point(),
            operators: Vec::new(),
            points: design.set.points.clone(),
        },
    })
}
