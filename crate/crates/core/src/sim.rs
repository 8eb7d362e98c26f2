//! Statevector simulation, dense unitary extraction, the brute-force `C^n U`
//! oracle, and Monte Carlo depolarizing trajectories.
//!
//! Bit order: wire 0 is the most significant bit of a basis index, so the ket
//! `|a_1 a_2 ... a_m>` reads left to right as the binary index.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::ldd::McGateSpec;
use crate::su2::Unitary2;

/// Widest circuit [`circuit_unitary`] will expand.
pub const DENSE_WIDTH_LIMIT: usize = 12;
const NORM_TOL: f64 = 1e-10;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[inline]
fn wire_mask(width: usize, wire: usize) -> usize {
    1 << (width - 1 - wire)
}

/// Mixes the amplitude pairs `(i, i | target)` by `m` for every `i` whose
/// target bit is clear and whose `control` bits are all set.
fn mix_pairs(amps: &mut [Complex64], target: usize, control: usize, m: &Unitary2) {
    let len = amps.len();
    let mut block = 0;
    while block < len {
        for i in block..block + target {
            if i & control == control {
                let j = i | target;
                let (a, b) = m.apply(amps[i], amps[j]);
                amps[i] = a;
                amps[j] = b;
            }
        }
        block += 2 * target;
    }
}

fn apply_to_amplitudes(amps: &mut [Complex64], width: usize, g: &Gate) {
    let t = wire_mask(width, g.target());
    let c = g.control().map_or(0, |w| wire_mask(width, w));
    mix_pairs(amps, t, c, g.matrix());
}

/// Amplitudes of an `m`-wire register.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    width: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>`.
    pub fn zero(width: usize) -> Self {
        Self::basis(width, 0)
    }

    pub fn basis(width: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << width];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { width, amps }
    }

    pub fn from_amplitudes(width: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << width {
            return Err(Error::WidthMismatch {
                expected: 1 << width,
                got: amps.len(),
            });
        }
        let s = Self { width, amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(s)
    }

    /// Gaussian amplitudes, normalized.
    pub fn random<R: Rng + ?Sized>(width: usize, rng: &mut R) -> Self {
        let mut amps: Vec<Complex64> = (0..1usize << width)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|z| *z /= norm);
        Self { width, amps }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Applies `g` in place. Wires must lie inside the register.
    pub fn apply_gate(&mut self, g: &Gate) {
        apply_to_amplitudes(&mut self.amps, self.width, g);
    }

    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<()> {
        if c.width() != self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                got: c.width(),
            });
        }
        for g in c.gates() {
            self.apply_gate(g);
        }
        Ok(())
    }
}

/// Functional form of [`Statevector::apply_gate`].
pub fn apply_gate(state: &Statevector, g: &Gate) -> Statevector {
    let mut out = state.clone();
    out.apply_gate(g);
    out
}

/// Runs `c` on a copy of `state`.
pub fn run(c: &Circuit, state: &Statevector) -> Result<Statevector> {
    let mut out = state.clone();
    out.apply_circuit(c)?;
    Ok(out)
}

/// Dense `2^m x 2^m` matrix stored column by column.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseUnitary {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseUnitary {
    pub fn identity(width: usize) -> Self {
        let dim = 1 << width;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[col * self.dim + row]
    }

    pub fn column(&self, col: usize) -> &[Complex64] {
        &self.data[col * self.dim..(col + 1) * self.dim]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks(self.dim)
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut data = vec![ZERO; d * d];
        for c in 0..d {
            for r in 0..d {
                data[r * d + c] = self.data[c * d + r].conj();
            }
        }
        Self { dim: d, data }
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        let d = self.dim;
        let mut data = vec![ZERO; d * d];
        for c in 0..d {
            for k in 0..d {
                let b = rhs.data[c * d + k];
                if b == ZERO {
                    continue;
                }
                for r in 0..d {
                    data[c * d + r] += self.data[k * d + r] * b;
                }
            }
        }
        Self { dim: d, data }
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Unitary of `c`, built column by column from basis states.
pub fn circuit_unitary(c: &Circuit) -> Result<DenseUnitary> {
    let width = c.width();
    if width > DENSE_WIDTH_LIMIT {
        return Err(Error::WidthLimit {
            width,
            limit: DENSE_WIDTH_LIMIT,
        });
    }
    let mut u = DenseUnitary::identity(width);
    let dim = u.dim;
    u.data.par_chunks_mut(dim).for_each(|col| {
        for g in c.gates() {
            apply_to_amplitudes(col, width, g);
        }
    });
    Ok(u)
}

/// Direct semantics of `C^n U`: mixes the target pair wherever every control bit is set.
pub fn oracle_cnu(spec: &McGateSpec, state: &Statevector) -> Result<Statevector> {
    let width = spec.width();
    if state.width() != width {
        return Err(Error::WidthMismatch {
            expected: width,
            got: state.width(),
        });
    }
    let controls = ((1usize << width) - 1) & !1;
    let mut out = state.clone();
    mix_pairs(&mut out.amps, 1, controls, &spec.u);
    Ok(out)
}

/// Dense matrix of `C^n U` from [`oracle_cnu`] on basis columns.
pub fn oracle_unitary(spec: &McGateSpec) -> Result<DenseUnitary> {
    let width = spec.width();
    if width > DENSE_WIDTH_LIMIT {
        return Err(Error::WidthLimit {
            width,
            limit: DENSE_WIDTH_LIMIT,
        });
    }
    let dim = 1usize << width;
    let mut data = Vec::with_capacity(dim * dim);
    for col in 0..dim {
        data.extend(oracle_cnu(spec, &Statevector::basis(width, col))?.amps);
    }
    Ok(DenseUnitary { dim, data })
}

/// Per-touch depolarizing probability and RNG seed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseSpec {
    pub p: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Probability(p));
        }
        Ok(Self { p, seed })
    }

    pub fn noiseless(seed: u64) -> Self {
        Self { p: 0.0, seed }
    }
}

/// Measurement counts keyed by basis index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Histogram {
    width: usize,
    shots: u64,
    counts: BTreeMap<usize, u64>,
}

#[derive(Serialize)]
struct HistogramJson {
    shots: u64,
    seed: u64,
    p: f64,
    counts: BTreeMap<String, u64>,
}

impl Histogram {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            shots: 0,
            counts: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, index: usize) {
        *self.counts.entry(index).or_default() += 1;
        self.shots += 1;
    }

    pub fn merge(mut self, other: Histogram) -> Self {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_default() += v;
        }
        self.shots += other.shots;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    pub fn frequency(&self, index: usize) -> f64 {
        if self.shots == 0 {
            0.0
        } else {
            self.count(index) as f64 / self.shots as f64
        }
    }

    /// Nonzero counts in ascending basis order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    /// Basis index as a bit string, wire 0 first.
    pub fn bitstring(&self, index: usize) -> String {
        format!("{index:0w$b}", w = self.width)
    }

    /// `bitstring,count` lines with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitstring,count\n");
        for (k, v) in self.iter() {
            out.push_str(&format!("{},{v}\n", self.bitstring(k)));
        }
        out
    }

    pub fn to_json(&self, noise: &NoiseSpec) -> Result<String> {
        let counts = self.iter().map(|(k, v)| (self.bitstring(k), v)).collect();
        Ok(serde_json::to_string_pretty(&HistogramJson {
            shots: self.shots,
            seed: noise.seed,
            p: noise.p,
            counts,
        })?)
    }
}

/// One Pauli insertion: after gate `after`, Pauli `pauli` (1 = X, 2 = Y, 3 = Z) on `wire`.
#[derive(Clone, Copy, Debug)]
struct PauliEvent {
    after: usize,
    wire: usize,
    pauli: u8,
}

fn pauli_matrix(p: u8) -> Unitary2 {
    match p {
        1 => Unitary2::x(),
        2 => Unitary2::y(),
        _ => Unitary2::z(),
    }
}

fn sample_index<R: Rng>(cumulative: &[f64], rng: &mut R) -> usize {
    let total = *cumulative.last().unwrap_or(&1.0);
    let r = rng.gen::<f64>() * total;
    cumulative
        .partition_point(|&c| c <= r)
        .min(cumulative.len() - 1)
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    probs
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

/// Deterministic RNG for one trajectory, independent of scheduling.
fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// Monte Carlo depolarizing trajectories.
///
/// After every gate, each wire it touches independently draws, with
/// probability `p`, a Pauli uniformly from `{I, X, Y, Z}`. Each shot ends with
/// a computational-basis measurement. Shot `s` uses its own ChaCha stream
/// `s` under `noise.seed`, so counts do not depend on the worker count.
pub fn run_noisy(
    c: &Circuit,
    input: &Statevector,
    noise: &NoiseSpec,
    shots: u64,
) -> Result<Histogram> {
    if !c.is_lowered() {
        return Err(Error::LoweringRequired);
    }
    if c.width() != input.width() {
        return Err(Error::WidthMismatch {
            expected: input.width(),
            got: c.width(),
        });
    }
    NoiseSpec::new(noise.p, noise.seed)?;

    let ideal = run(c, input)?;
    let ideal_cdf = cumulative(&ideal.probabilities());
    let width = c.width();

    let trajectory = |shot: u64| -> usize {
        let mut rng = shot_rng(noise.seed, shot);
        let mut events = Vec::new();
        if noise.p > 0.0 {
            for (after, g) in c.gates().iter().enumerate() {
                for wire in g.wires() {
                    if rng.gen::<f64>() < noise.p {
                        let pauli = rng.gen_range(0u8..4);
                        if pauli != 0 {
                            events.push(PauliEvent { after, wire, pauli });
                        }
                    }
                }
            }
        }
        if events.is_empty() {
            return sample_index(&ideal_cdf, &mut rng);
        }
        let mut state = input.clone();
        let mut next = events.iter().peekable();
        for (i, g) in c.gates().iter().enumerate() {
            state.apply_gate(g);
            while let Some(e) = next.next_if(|e| e.after == i) {
                state.apply_gate(&Gate::single(e.wire, pauli_matrix(e.pauli)));
            }
        }
        sample_index(&cumulative(&state.probabilities()), &mut rng)
    };

    Ok((0..shots)
        .into_par_iter()
        .fold(
            || Histogram::new(width),
            |mut h, shot| {
                h.record(trajectory(shot));
                h
            },
        )
        .reduce(|| Histogram::new(width), Histogram::merge))
}
