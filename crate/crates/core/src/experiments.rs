//! Proof-of-principle circuits and the depth-scaling benchmark.
//!
//! Experiment A prepares `|1...10>` and applies `C^n X`; experiment B prepares
//! `|1...11>`, applies `U^dagger` to the target and then `C^n U`. Both should
//! end in the all-ones string with certainty.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{lower_controlled, schedule_asap, Circuit, Gate};
use crate::error::{Error, Result};
use crate::ldd::{build_cnu, depth_formula, gate_count_formula, McGateSpec};
use crate::sim::{run_noisy, NoiseSpec, Statevector};
use crate::su2::Unitary2;

/// Default shot counts for experiments A and B.
pub const SHOTS_A: u64 = 50_000;
pub const SHOTS_B: u64 = 32_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Experiment {
    /// `|<1..11| C^n X |1..10>|^2`
    A,
    /// `|<1..11| C^n U (I^n (x) U^dagger) |1..11>|^2`
    B(Unitary2),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::A => "a",
            Experiment::B(_) => "b",
        }
    }

    pub fn default_shots(&self) -> u64 {
        match self {
            Experiment::A => SHOTS_A,
            Experiment::B(_) => SHOTS_B,
        }
    }

    /// Preparation plus `C^n U`, before lowering.
    pub fn circuit(&self, n: usize) -> Result<Circuit> {
        if n < 1 {
            return Err(Error::TooSmall {
                what: "experiment control count",
                min: 1,
                got: n,
            });
        }
        let (u, prep_wires, target_prep) = match *self {
            Experiment::A => (Unitary2::x(), n, None),
            Experiment::B(u) => (u, n + 1, Some(u.adjoint())),
        };
        let mut c = Circuit::new(n + 1, format!("experiment-{}-n{n}", self.name()));
        for w in 0..prep_wires {
            c.push(Gate::single(w, Unitary2::x()))?;
        }
        if let Some(m) = target_prep {
            c.push(Gate::single(n, m))?;
        }
        c.append(&build_cnu(&McGateSpec::new(n, u)))?;
        Ok(c)
    }
}

/// Experiment A circuit, lowered to `{CX, 1q}`.
pub fn build_experiment_a(n: usize) -> Result<Circuit> {
    Ok(lower_controlled(&Experiment::A.circuit(n)?))
}

/// Experiment B circuit, lowered to `{CX, 1q}`.
pub fn build_experiment_b(n: usize, u: &Unitary2) -> Result<Circuit> {
    Ok(lower_controlled(&Experiment::B(*u).circuit(n)?))
}

/// One `(n, noise_p)` measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub experiment: &'static str,
    pub n: usize,
    pub noise_p: f64,
    pub shots: u64,
    pub seed: u64,
    pub p_ones: f64,
    pub depth_controlled: usize,
    pub depth_lowered: usize,
    pub cx_count: usize,
}

impl ExperimentResult {
    /// Binomial standard deviation of `p_ones` under probability `p`.
    pub fn sigma(p: f64, shots: u64) -> f64 {
        (p * (1.0 - p) / shots as f64).sqrt()
    }
}

/// Runs `exp` with `shots` noisy trajectories from `|0...0>`.
pub fn run_experiment(
    exp: &Experiment,
    n: usize,
    noise: &NoiseSpec,
    shots: u64,
) -> Result<ExperimentResult> {
    let circuit = exp.circuit(n)?;
    let report = schedule_asap(&circuit);
    let lowered = lower_controlled(&circuit);
    let hist = run_noisy(&lowered, &Statevector::zero(n + 1), noise, shots)?;
    let all_ones = (1usize << (n + 1)) - 1;
    Ok(ExperimentResult {
        experiment: exp.name(),
        n,
        noise_p: noise.p,
        shots,
        seed: noise.seed,
        p_ones: hist.frequency(all_ones),
        depth_controlled: report.depth_controlled,
        depth_lowered: report.depth_lowered,
        cx_count: report.count_cx,
    })
}

/// One row of the depth-scaling table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub trials: usize,
    /// Mean over trials.
    pub depth_controlled: f64,
    pub depth_lowered: f64,
    pub cx_count: f64,
    pub count_controlled: usize,
    pub count_formula: usize,
    pub depth_formula: usize,
    /// `max - min` of the controlled depth across trials.
    pub depth_spread: usize,
}

/// Depth and size of the decomposition for `n_min..=n_max` controls, each
/// averaged over `trials` Haar-random targets drawn from `seed`.
pub fn depth_scaling_table(
    n_min: usize,
    n_max: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<ScalingRow>> {
    if n_min < 3 {
        return Err(Error::TooSmall {
            what: "depth table n_min",
            min: 3,
            got: n_min,
        });
    }
    if n_max < n_min {
        return Err(Error::TooSmall {
            what: "depth table n_max",
            min: n_min,
            got: n_max,
        });
    }
    if trials == 0 {
        return Err(Error::TooSmall {
            what: "depth table trials",
            min: 1,
            got: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (n_min..=n_max)
        .map(|n| {
            let reports: Vec<_> = (0..trials)
                .map(|_| {
                    let c = build_cnu(&McGateSpec::new(n, Unitary2::haar_su2(&mut rng)));
                    (c.count_controlled(), schedule_asap(&c))
                })
                .collect();
            let mean = |f: &dyn Fn(&crate::circuit::DepthReport) -> usize| {
                reports.iter().map(|(_, r)| f(r) as f64).sum::<f64>() / trials as f64
            };
            let depths = reports.iter().map(|(_, r)| r.depth_controlled);
            let spread = depths.clone().max().unwrap_or(0) - depths.min().unwrap_or(0);
            Ok(ScalingRow {
                n,
                trials,
                depth_controlled: mean(&|r| r.depth_controlled),
                depth_lowered: mean(&|r| r.depth_lowered),
                cx_count: mean(&|r| r.count_cx),
                count_controlled: reports[0].0,
                count_formula: gate_count_formula(n),
                depth_formula: depth_formula(n)?,
                depth_spread: spread,
            })
        })
        .collect()
}
