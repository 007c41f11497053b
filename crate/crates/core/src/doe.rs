//! Taguchi L9 tuning of (N_p, I, L) with smaller-the-better S/N ratios.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::ObjectiveConfig;
use crate::qabc::{run_qabc, QabcParams};
use crate::rng::derive_seed;
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Factor {
    #[serde(rename = "N_p")]
    NPop,
    #[serde(rename = "I")]
    Iterations,
    #[serde(rename = "L")]
    ScoutLimit,
}

impl Factor {
    pub const ALL: [Factor; 3] = [Factor::NPop, Factor::Iterations, Factor::ScoutLimit];

    pub fn name(self) -> &'static str {
        match self {
            Factor::NPop => "N_p",
            Factor::Iterations => "I",
            Factor::ScoutLimit => "L",
        }
    }
}

/// Three-column L9 array with the factor level values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct L9Design {
    /// Level indices (1-based) per row for (N_p, I, L).
    pub rows: [[u8; 3]; 9],
    pub n_pop_levels: [usize; 3],
    pub iter_levels: [usize; 3],
    pub limit_levels: [u32; 3],
}

impl Default for L9Design {
    fn default() -> Self {
        L9Design {
            rows: [[1, 1, 1], [1, 2, 2], [1, 3, 3], [2, 1, 2], [2, 2, 3], [2, 3, 1], [3, 1, 3], [3, 2, 1], [3, 3, 2]],
            n_pop_levels: [20, 30, 40],
            iter_levels: [20, 30, 40],
            limit_levels: [5, 10, 15],
        }
    }
}

impl L9Design {
    /// Every ordered level pair appears exactly once in every column pair.
    pub fn is_orthogonal(&self) -> bool {
        let mut ok = true;
        for a in 0..3 {
            for b in (a + 1)..3 {
                let mut seen = [[0u8; 3]; 3];
                for row in &self.rows {
                    let (x, y) = (row[a], row[b]);
                    if !(1..=3).contains(&x) || !(1..=3).contains(&y) {
                        return false;
                    }
                    seen[x as usize - 1][y as usize - 1] += 1;
                }
                ok &= seen.iter().flatten().all(|c| *c == 1);
            }
        }
        ok
    }

    /// `(N_p, I, L)` of a row.
    pub fn settings(&self, row: usize) -> (usize, usize, u32) {
        let [p, i, l] = self.rows[row];
        (self.n_pop_levels[p as usize - 1], self.iter_levels[i as usize - 1], self.limit_levels[l as usize - 1])
    }

    pub fn level_value(&self, factor: Factor, level: usize) -> f64 {
        match factor {
            Factor::NPop => self.n_pop_levels[level] as f64,
            Factor::Iterations => self.iter_levels[level] as f64,
            Factor::ScoutLimit => self.limit_levels[level] as f64,
        }
    }
}

/// `-10 log10(mean(y²))` for positive finite outcomes.
pub fn snr_smaller_better(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::param("values", "at least one value is required"));
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::param("values", alloc::format!("values must be finite and > 0, got {v}")));
    }
    let msq = values.iter().map(|y| y * y).sum::<f64>() / values.len() as f64;
    Ok(-10.0 * libm::log10(msq))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowResult {
    pub row: usize,
    pub n_pop: usize,
    pub n_iter: usize,
    pub scout_limit: u32,
    /// Best fitness of each replicate run.
    pub fitness: Vec<f64>,
    pub mean: f64,
    pub snr_db: f64,
    /// Some replicate ended with no reachable plan; mean is +inf and S/N -inf.
    pub infeasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelEffect {
    pub factor: Factor,
    /// 1-based level index.
    pub level: usize,
    pub value: f64,
    pub avg_fitness: f64,
    pub snr_db: f64,
    pub is_best: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaguchiReport {
    pub rows: Vec<RowResult>,
    /// Three entries per factor, factors in (N_p, I, L) order.
    pub levels: Vec<LevelEffect>,
}

impl TaguchiReport {
    pub fn best_level(&self, factor: Factor) -> &LevelEffect {
        self.levels.iter().find(|l| l.factor == factor && l.is_best).expect("one best level per factor")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorEffect {
    pub factor: Factor,
    /// max - min of the level S/N ratios.
    pub delta_db: f64,
    pub rank: usize,
}

/// Range of level S/N per factor, largest first; ties keep (N_p, I, L) order.
pub fn main_effects(report: &TaguchiReport) -> Vec<FactorEffect> {
    let mut effects: Vec<FactorEffect> = Factor::ALL
        .iter()
        .map(|&factor| {
            let snr = report.levels.iter().filter(|l| l.factor == factor).map(|l| l.snr_db);
            let (lo, hi) = snr.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s), hi.max(s)));
            let delta_db = if hi == lo { 0.0 } else { hi - lo };
            FactorEffect { factor, delta_db, rank: 0 }
        })
        .collect();
    effects.sort_by(|a, b| b.delta_db.partial_cmp(&a.delta_db).unwrap_or(core::cmp::Ordering::Equal));
    for (i, e) in effects.iter_mut().enumerate() {
        e.rank = i + 1;
    }
    effects
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaguchiConfig {
    pub replicates: usize,
    pub base_seed: u64,
    /// Non-factor optimizer settings (phi, weights, parallel) taken from here.
    pub base: QabcParams,
    /// Run rows and replicates on the rayon pool.
    #[serde(default)]
    pub parallel: bool,
}

impl TaguchiConfig {
    pub fn new(replicates: usize, base_seed: u64) -> Self {
        TaguchiConfig { replicates, base_seed, base: QabcParams::default(), parallel: false }
    }
}

/// Seed for replicate `rep` of `row`.
pub fn replicate_seed(base_seed: u64, row: usize, rep: usize) -> u64 {
    derive_seed(base_seed, &[row as u64, rep as u64])
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

/// Runs the design with an arbitrary per-run outcome function
/// `run(params, seed) -> best fitness`.
pub fn run_design<F>(design: &L9Design, config: &TaguchiConfig, run: F) -> Result<TaguchiReport>
where
    F: Fn(&QabcParams) -> Result<f64> + Sync + Send,
{
    if config.replicates == 0 {
        return Err(Error::param("replicates", "must be >= 1"));
    }
    if !design.is_orthogonal() {
        return Err(Error::param("design", "rows are not pairwise balanced"));
    }

    let jobs: Vec<QabcParams> = (0..9)
        .flat_map(|row| {
            let (n_pop, n_iter, scout_limit) = design.settings(row);
            (0..config.replicates).map(move |rep| QabcParams {
                n_pop,
                n_iter,
                scout_limit,
                seed: replicate_seed(config.base_seed, row, rep),
                ..config.base.clone()
            })
        })
        .collect();

    #[cfg(feature = "parallel")]
    let outcomes: Vec<Result<f64>> = if config.parallel {
        use rayon::prelude::*;
        jobs.par_iter().map(&run).collect()
    } else {
        jobs.iter().map(&run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<Result<f64>> = jobs.iter().map(&run).collect();

    let outcomes = outcomes.into_iter().collect::<Result<Vec<f64>>>()?;

    let rows: Vec<RowResult> = outcomes
        .chunks(config.replicates)
        .enumerate()
        .map(|(row, fitness)| {
            let (n_pop, n_iter, scout_limit) = design.settings(row);
            let infeasible = fitness.iter().any(|f| !f.is_finite());
            let (mean_f, snr_db) = if infeasible {
                (f64::INFINITY, f64::NEG_INFINITY)
            } else {
                (mean(fitness.iter().copied()), snr_smaller_better(fitness)?)
            };
            Ok(RowResult {
                row: row + 1,
                n_pop,
                n_iter,
                scout_limit,
                fitness: fitness.to_vec(),
                mean: mean_f,
                snr_db,
                infeasible,
            })
        })
        .collect::<Result<_>>()?;

    let mut levels = Vec::with_capacity(9);
    for (col, &factor) in Factor::ALL.iter().enumerate() {
        let start = levels.len();
        for level in 1..=3u8 {
            let members = || rows.iter().zip(&design.rows).filter(|(_, d)| d[col] == level).map(|(r, _)| r);
            debug_assert_eq!(members().count(), 3);
            levels.push(LevelEffect {
                factor,
                level: level as usize,
                value: design.level_value(factor, level as usize - 1),
                avg_fitness: mean(members().map(|r| r.mean)),
                snr_db: mean(members().map(|r| r.snr_db)),
                is_best: false,
            });
        }
        // first maximum wins ties
        let best = (start..start + 3).fold(start, |b, i| if levels[i].snr_db > levels[b].snr_db { i } else { b });
        levels[best].is_best = true;
    }

    Ok(TaguchiReport { rows, levels })
}

/// Runs the L9 design with the colony optimizer on `scenario`.
pub fn run_taguchi(scenario: &Scenario, objective: &ObjectiveConfig, config: &TaguchiConfig) -> Result<TaguchiReport> {
    run_design(&L9Design::default(), config, |params| run_qabc(scenario, objective, params).map(|r| r.best_fitness_s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{generate_scenario, GenerationParams};
    #[test]
    fn snr_examples() {
        assert_eq!(snr_smaller_better(&[1.0]).unwrap(), 0.0);
        assert!((snr_smaller_better(&[0.5]).unwrap() - 6.0206).abs() < 1e-4);
        assert!((snr_smaller_better(&[1.0, 2.0]).unwrap() + 3.9794).abs() < 1e-4);
    }

    #[test]
    fn snr_rejects_bad_input() {
        assert!(snr_smaller_better(&[]).is_err());
        assert!(snr_smaller_better(&[1.0, 0.0]).is_err());
        assert!(snr_smaller_better(&[-1.0]).is_err());
        assert!(snr_smaller_better(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn standard_l9_is_orthogonal() {
        assert!(L9Design::default().is_orthogonal());
        let mut broken = L9Design::default();
        broken.rows[8] = [3, 3, 3];
        assert!(!broken.is_orthogonal());
    }

    #[test]
    fn constant_outcome_gives_flat_report() {
        let r = run_design(&L9Design::default(), &TaguchiConfig::new(3, 1), |_| Ok(1.0)).unwrap();
        assert!(r.rows.iter().all(|row| row.snr_db == 0.0 && row.mean == 1.0));
        assert!(r.levels.iter().all(|l| l.snr_db == 0.0));
        let effects = main_effects(&r);
        assert!(effects.iter().all(|e| e.delta_db == 0.0));
        assert_eq!(effects.iter().map(|e| e.factor).collect::<Vec<_>>(), Factor::ALL.to_vec());
        // ties resolve to the first level
        for f in Factor::ALL {
            assert_eq!(r.best_level(f).level, 1);
        }
    }

    #[test]
    fn dominant_factor_ranks_first() {
        // outcome driven only by the scout limit
        let r = run_design(&L9Design::default(), &TaguchiConfig::new(1, 1), |p| Ok(p.scout_limit as f64)).unwrap();
        let effects = main_effects(&r);
        assert_eq!(effects[0].factor, Factor::ScoutLimit);
        assert_eq!(r.best_level(Factor::ScoutLimit).value, 5.0);
        assert_eq!(effects[1].delta_db, 0.0);
    }

    #[test]
    fn level_aggregates_average_three_rows() {
        let r =
            run_design(&L9Design::default(), &TaguchiConfig::new(2, 4), |p| Ok((p.seed % 97) as f64 + 1.0)).unwrap();
        let d = L9Design::default();
        for (col, f) in Factor::ALL.iter().enumerate() {
            for lvl in 1..=3u8 {
                let rows: Vec<_> = r.rows.iter().zip(&d.rows).filter(|(_, x)| x[col] == lvl).collect();
                assert_eq!(rows.len(), 3);
                let want = rows.iter().map(|(row, _)| row.snr_db).sum::<f64>() / 3.0;
                let got = r.levels.iter().find(|l| l.factor == *f && l.level == lvl as usize).unwrap();
                assert!((got.snr_db - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn infeasible_rows_are_flagged() {
        let r = run_design(&L9Design::default(), &TaguchiConfig::new(2, 1), |p| {
            Ok(if p.n_pop == 20 { f64::INFINITY } else { 1.0 })
        })
        .unwrap();
        assert!(r.rows[..3].iter().all(|row| row.infeasible && row.snr_db == f64::NEG_INFINITY));
        assert!(r.rows[3..].iter().all(|row| !row.infeasible));
        assert_eq!(r.rows.len(), 9);
    }

    #[test]
    fn zero_replicates_rejected() {
        assert!(run_design(&L9Design::default(), &TaguchiConfig::new(0, 1), |_| Ok(1.0)).is_err());
    }

    #[test]
    fn taguchi_on_small_scenario_is_deterministic() {
        let s = generate_scenario(&GenerationParams::with_counts(3, 2, 2), 3).unwrap();
        let cfg = TaguchiConfig::new(1, 11);
        let a = run_taguchi(&s, &ObjectiveConfig::default(), &cfg).unwrap();
        let b = run_taguchi(&s, &ObjectiveConfig::default(), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.levels.len(), 9);
        assert!(Factor::ALL.iter().all(|f| a.best_level(*f).is_best));
        for row in &a.rows {
            // one replicate: S/N = -20 log10(y)
            assert!((row.snr_db + 20.0 * row.fitness[0].log10()).abs() < 1e-9);
        }
    }
}
