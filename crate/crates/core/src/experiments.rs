//! Random regular ensembles and overcount statistics.

use std::time::Instant;

use log::warn;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::decompose::{decompose, DecomposeOptions, Verdict};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Rejection rounds per sampling attempt before the pairing is redrawn.
const SWAP_ROUNDS: usize = 1000;
/// Full redraws before giving up.
const MAX_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnsembleParams {
    pub n: usize,
    pub dv: usize,
    pub dc: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for EnsembleParams {
    fn default() -> Self {
        Self {
            n: 300,
            dv: 3,
            dc: 6,
            trials: 50,
            seed: 42,
        }
    }
}

impl EnsembleParams {
    pub fn check(&self) -> Result<usize> {
        if self.dv == 0 || self.dc == 0 || self.n == 0 {
            return Err(Error::InvalidEnsemble("n, dv and dc must be positive".into()));
        }
        if self.dv > 3 {
            return Err(Error::InvalidEnsemble(format!("dv = {} exceeds 3", self.dv)));
        }
        if (self.n * self.dv) % self.dc != 0 {
            return Err(Error::InvalidEnsemble(format!(
                "n*dv = {} is not divisible by dc = {}",
                self.n * self.dv,
                self.dc
            )));
        }
        let m = self.n * self.dv / self.dc;
        if self.dc > self.n || self.dv > m {
            return Err(Error::InvalidEnsemble("degrees too large for a simple graph".into()));
        }
        Ok(m)
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Configuration-model sample for `(seed, trial)` with exact `(dv, dc)` regularity.
///
/// Duplicate edges are removed by swapping one endpoint with a random other
/// edge, accepting the swap only if it creates no new duplicate.
pub fn sample_regular(params: &EnsembleParams, trial: usize) -> Result<BitMatrix> {
    let m = params.check()?;
    let mut rng = trial_rng(params.seed, trial);
    let var_sockets: Vec<usize> = (0..params.n).flat_map(|v| std::iter::repeat(v).take(params.dv)).collect();
    for attempt in 0..MAX_ATTEMPTS {
        let mut checks: Vec<usize> = (0..m).flat_map(|c| std::iter::repeat(c).take(params.dc)).collect();
        checks.shuffle(&mut rng);
        if let Some(h) = resolve_duplicates(&var_sockets, &mut checks, m, params.n, &mut rng) {
            return Ok(h);
        }
        warn!("trial {trial}: pairing attempt {attempt} did not become simple; redrawing");
    }
    Err(Error::SamplerExhausted(trial))
}

fn resolve_duplicates(
    vars: &[usize],
    checks: &mut [usize],
    m: usize,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Option<BitMatrix> {
    let e = vars.len();
    let mut count = vec![0u8; m * n];
    for k in 0..e {
        count[checks[k] * n + vars[k]] += 1;
    }
    for _ in 0..SWAP_ROUNDS {
        let dup: Vec<usize> = (0..e).filter(|&k| count[checks[k] * n + vars[k]] > 1).collect();
        if dup.is_empty() {
            let mut h = BitMatrix::zeros(m, n);
            for k in 0..e {
                h.set(checks[k], vars[k], true);
            }
            return Some(h);
        }
        for k in dup {
            if count[checks[k] * n + vars[k]] <= 1 {
                continue;
            }
            let o = rng.gen_range(0..e);
            let (ck, co) = (checks[k], checks[o]);
            if ck == co || count[co * n + vars[k]] > 0 || count[ck * n + vars[o]] > 0 {
                continue;
            }
            count[ck * n + vars[k]] -= 1;
            count[co * n + vars[o]] -= 1;
            checks.swap(k, o);
            count[co * n + vars[k]] += 1;
            count[ck * n + vars[o]] += 1;
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub dim_ker_m: usize,
    pub first_rows: usize,
    pub first_cols: usize,
    pub first_dim_ker: usize,
    pub first_is_pess: bool,
    pub sum_k: usize,
    pub components: usize,
    pub overcount: bool,
    /// Wall time in seconds; omitted from deterministic output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub params: EnsembleParams,
    pub completed: usize,
    pub failed: usize,
    pub overcount: usize,
    pub overcount_fraction: f64,
    pub undercount: usize,
    /// `(first-component dim Ker − dim Ker(M), count)`, ascending.
    pub first_excess_histogram: Vec<(i64, usize)>,
    pub mean_first_excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleResult {
    pub summary: EnsembleSummary,
    pub trials: Vec<TrialOutcome>,
    /// `(trial, message)` for trials that did not complete.
    pub failures: Vec<(usize, String)>,
}

/// Decomposes one matrix with the in-order policy.
pub fn run_trial(trial: usize, h: &BitMatrix, timed: bool) -> Result<TrialOutcome> {
    let start = Instant::now();
    let r = decompose(h, DecomposeOptions::default())?;
    let first = r.first_output.clone().expect("nonempty matrix has a first finder output");
    Ok(TrialOutcome {
        trial,
        dim_ker_m: r.kernel_dim,
        first_rows: first.rows,
        first_cols: first.cols,
        first_dim_ker: first.dim_ker,
        first_is_pess: first.pess,
        sum_k: r.sum_k,
        components: r.components.len(),
        overcount: r.verdict == Verdict::Overcount,
        elapsed_s: timed.then(|| start.elapsed().as_secs_f64()),
    })
}

/// Runs all trials in parallel; results are in trial order.
pub fn run_ensemble(params: &EnsembleParams, timed: bool) -> Result<EnsembleResult> {
    params.check()?;
    let results: Vec<Result<TrialOutcome>> = (0..params.trials)
        .into_par_iter()
        .map(|t| run_trial(t, &sample_regular(params, t)?, timed))
        .collect();
    let mut trials = Vec::new();
    let mut failures = Vec::new();
    for (t, r) in results.into_iter().enumerate() {
        match r {
            Ok(o) => trials.push(o),
            Err(e) => {
                warn!("trial {t} failed: {e}");
                failures.push((t, e.to_string()));
            }
        }
    }
    Ok(EnsembleResult {
        summary: summarize(params, &trials, failures.len()),
        trials,
        failures,
    })
}

pub fn summarize(params: &EnsembleParams, trials: &[TrialOutcome], failed: usize) -> EnsembleSummary {
    let overcount = trials.iter().filter(|t| t.overcount).count();
    let undercount = trials.iter().filter(|t| t.sum_k < t.dim_ker_m).count();
    let excess: Vec<i64> = trials
        .iter()
        .map(|t| t.first_dim_ker as i64 - t.dim_ker_m as i64)
        .collect();
    let mut hist = std::collections::BTreeMap::new();
    for &x in &excess {
        *hist.entry(x).or_insert(0usize) += 1;
    }
    let completed = trials.len();
    EnsembleSummary {
        params: *params,
        completed,
        failed,
        overcount,
        overcount_fraction: if completed == 0 { 0.0 } else { overcount as f64 / completed as f64 },
        undercount,
        first_excess_histogram: hist.into_iter().collect(),
        mean_first_excess: if completed == 0 {
            0.0
        } else {
            excess.iter().sum::<i64>() as f64 / completed as f64
        },
    }
}

pub const CSV_HEADER: &str =
    "trial,dim_ker_m,first_rows,first_cols,first_dim_ker,first_is_pess,sum_k,components,overcount,elapsed_s";

/// One line per trial; `elapsed_s` is empty when not timed.
pub fn to_csv(trials: &[TrialOutcome]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for t in trials {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            t.trial,
            t.dim_ker_m,
            t.first_rows,
            t.first_cols,
            t.first_dim_ker,
            t.first_is_pess,
            t.sum_k,
            t.components,
            t.overcount,
            t.elapsed_s.map(|s| format!("{s:.6}")).unwrap_or_default()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexample::build_mn;

    fn params(n: usize, trials: usize) -> EnsembleParams {
        EnsembleParams {
            n,
            trials,
            ..EnsembleParams::default()
        }
    }

    fn is_regular(h: &BitMatrix, dv: usize, dc: usize) -> bool {
        h.col_weights().iter().all(|&w| w == dv) && h.row_weights().iter().all(|&w| w == dc)
    }

    #[test]
    fn smallest_regular_sample() {
        let h = sample_regular(&params(6, 1), 0).unwrap();
        assert_eq!((h.rows(), h.cols()), (3, 6));
        assert!(is_regular(&h, 3, 6));
    }

    #[test]
    fn n300_is_regular_and_reproducible() {
        let p = params(300, 1);
        let h = sample_regular(&p, 3).unwrap();
        assert_eq!((h.rows(), h.cols()), (150, 300));
        assert!(is_regular(&h, 3, 6));
        assert_eq!(h, sample_regular(&p, 3).unwrap());
        assert_ne!(h, sample_regular(&p, 4).unwrap());
    }

    #[test]
    fn divisibility_error() {
        assert!(matches!(sample_regular(&params(5, 1), 0), Err(Error::InvalidEnsemble(_))));
        let p = EnsembleParams {
            dv: 4,
            dc: 8,
            ..params(8, 1)
        };
        assert!(p.check().is_err());
    }

    #[test]
    fn smoke_and_counterexample_trial() {
        let r = run_ensemble(&params(6, 1), false).unwrap();
        assert_eq!(r.trials.len() + r.failures.len(), 1);
        let o = run_trial(0, &build_mn(1).unwrap(), false).unwrap();
        assert!(o.overcount);
        assert_eq!(o.dim_ker_m, 9);
    }

    #[test]
    fn ensemble_is_deterministic() {
        let p = params(60, 6);
        let a = run_ensemble(&p, false).unwrap();
        let b = run_ensemble(&p, false).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.trials.iter().all(|t| t.sum_k >= t.dim_ker_m));
        assert_eq!(to_csv(&a.trials).lines().count(), a.trials.len() + 1);
    }
}
