//! Linear-depth decomposition of an n-controlled single-qubit unitary.
//!
//! Wire convention: controls `a_1..a_n` sit on wires `0..n`, the target
//! `a_{n+1}` on wire `n`. A block `P_j(V)` is a ladder of controlled roots of
//! `V` from each of `a_2..a_j` onto `a_{j+1}`; `Q_n` is the cascade of
//! multi-controlled `Rx(pi)` gates, always emitted in its expanded form.

use std::f64::consts::PI;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::su2::{eigendecompose, EigenForm2, Unitary2};

/// A request for `C^n U`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McGateSpec {
    pub n: usize,
    pub u: Unitary2,
}

impl McGateSpec {
    pub fn new(n: usize, u: Unitary2) -> Self {
        Self { n, u }
    }

    pub fn width(&self) -> usize {
        self.n + 1
    }

    pub fn target(&self) -> usize {
        self.n
    }
}

/// Branch used when taking roots of the target unitary.
///
/// Only [`RootBranch::Principal`] yields a correct decomposition. The other
/// variant exists so verification tooling can prove it detects a broken root.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RootBranch {
    #[default]
    Principal,
    /// Square roots take the other branch on the first eigenphase; every other
    /// degree stays principal. Breaks `root(2k)^2 = root(k)`.
    FaultySquareRoot,
}

/// Lazily filled table of roots of degree `2^e`.
struct RootTable {
    eig: EigenForm2,
    base: Unitary2,
    branch: RootBranch,
    cache: Vec<Option<Unitary2>>,
}

impl RootTable {
    fn new(base: Unitary2, branch: RootBranch) -> Self {
        Self {
            eig: eigendecompose(&base),
            base,
            branch,
            cache: Vec::new(),
        }
    }

    /// Root of degree `2^exp`.
    fn get(&mut self, exp: usize) -> Unitary2 {
        if exp >= self.cache.len() {
            self.cache.resize(exp + 1, None);
        }
        *self.cache[exp].get_or_insert_with(|| {
            if exp == 0 {
                return self.base;
            }
            let exp32 = u32::try_from(exp).unwrap_or(u32::MAX);
            match self.branch {
                RootBranch::FaultySquareRoot if exp == 1 => {
                    let mut shifted = self.eig;
                    shifted.phases[0] += 2.0 * PI;
                    shifted.root_pow2(1)
                }
                _ => self.eig.root_pow2(exp32),
            }
        })
    }
}

fn rx_pi() -> Unitary2 {
    Unitary2::rx(PI).expect("finite angle")
}

/// Appends `P_j(V)`: for `k = 2..=j`, `V^{1/2^{j-k+1}}` controlled by `a_k` onto `a_{j+1}`.
///
/// The factors commute, so their order only affects scheduling. Blocks that
/// follow each other with shrinking `j` interleave when each one runs its
/// controls from `a_j` down to `a_2`; blocks with growing `j` want the
/// reverse, which is what [`emit_p_inverse`] produces.
fn emit_p(out: &mut Vec<Gate>, j: usize, roots: &mut RootTable, order: ControlOrder) {
    let mut push = |k: usize| out.push(Gate::controlled(k - 1, j, roots.get(j - k + 1)));
    match order {
        ControlOrder::Ascending => (2..=j).for_each(&mut push),
        ControlOrder::Descending => (2..=j).rev().for_each(&mut push),
    }
}

/// Appends `P_j(V)^dagger` as the inverse of the descending form: controls `a_2` up to `a_j`.
fn emit_p_inverse(out: &mut Vec<Gate>, j: usize, roots: &mut RootTable) {
    for k in 2..=j {
        out.push(Gate::controlled(k - 1, j, roots.get(j - k + 1).adjoint()));
    }
}

#[derive(Clone, Copy)]
enum ControlOrder {
    Ascending,
    Descending,
}

/// Appends the expanded `Q_n` (earliest gate first):
/// `P_{n-1}, a_1 Rx(pi/2^{n-2}) a_n, ..., P_2, a_1 Rx(pi/2) a_3, Q_2, P_2^dag, ..., P_{n-1}^dag`.
fn emit_q(out: &mut Vec<Gate>, n: usize, rx_roots: &mut RootTable) {
    for j in (2..n).rev() {
        emit_p(out, j, rx_roots, ControlOrder::Descending);
        out.push(Gate::controlled(0, j, rx_roots.get(j - 1)));
    }
    out.push(Gate::controlled(0, 1, rx_roots.get(0)));
    for j in 2..n {
        emit_p_inverse(out, j, rx_roots);
    }
}

fn circuit_from(width: usize, label: String, gates: Vec<Gate>) -> Circuit {
    let mut c = Circuit::new(width, label);
    for g in gates {
        c.push_unchecked(g);
    }
    c
}

/// `P_j(base)` on `j + 1` wires.
pub fn build_p(j: usize, base: &Unitary2) -> Result<Circuit> {
    if j < 2 {
        return Err(Error::TooSmall {
            what: "P block index",
            min: 2,
            got: j,
        });
    }
    let mut gates = Vec::with_capacity(j - 1);
    emit_p(
        &mut gates,
        j,
        &mut RootTable::new(*base, RootBranch::Principal),
        ControlOrder::Ascending,
    );
    Ok(circuit_from(j + 1, format!("P_{j}"), gates))
}

/// Expanded `Q_n` on `n` wires; exactly `(n-1)^2` gates.
pub fn build_q(n: usize) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::TooSmall {
            what: "Q cascade size",
            min: 2,
            got: n,
        });
    }
    let mut gates = Vec::with_capacity((n - 1) * (n - 1));
    emit_q(
        &mut gates,
        n,
        &mut RootTable::new(rx_pi(), RootBranch::Principal),
    );
    Ok(circuit_from(n, format!("Q_{n}"), gates))
}

/// `P_2(Rx(pi)) P_3(Rx(pi)) ... P_n(Rx(pi))` on `n + 1` wires, `P_2` first.
pub fn build_p_ladder(n: usize) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::TooSmall {
            what: "P ladder size",
            min: 2,
            got: n,
        });
    }
    let mut roots = RootTable::new(rx_pi(), RootBranch::Principal);
    let mut gates = Vec::new();
    for k in 2..=n {
        emit_p(&mut gates, k, &mut roots, ControlOrder::Ascending);
    }
    Ok(circuit_from(n + 1, format!("P_2..P_{n}"), gates))
}

/// Full decomposition of `C^n U`.
pub fn build_cnu(spec: &McGateSpec) -> Circuit {
    build_cnu_with_branch(spec, RootBranch::Principal)
}

/// [`build_cnu`] with an explicit root branch for the target unitary.
pub fn build_cnu_with_branch(spec: &McGateSpec, branch: RootBranch) -> Circuit {
    let n = spec.n;
    let label = format!("C^{n}U");
    match n {
        0 => return circuit_from(1, label, vec![Gate::single(0, spec.u)]),
        1 => return circuit_from(2, label, vec![Gate::controlled(0, 1, spec.u)]),
        _ => {}
    }

    let mut u_roots = RootTable::new(spec.u, branch);
    let mut rx_roots = RootTable::new(rx_pi(), RootBranch::Principal);
    let mut gates = Vec::with_capacity(gate_count_formula(n));

    emit_p(&mut gates, n, &mut u_roots, ControlOrder::Descending);
    gates.push(Gate::controlled(0, n, u_roots.get(n - 1)));
    let q_start = gates.len();
    emit_q(&mut gates, n, &mut rx_roots);
    let q_end = gates.len();
    emit_p_inverse(&mut gates, n, &mut u_roots);
    for i in (q_start..q_end).rev() {
        let g = gates[i].adjoint();
        gates.push(g);
    }
    circuit_from(n + 1, label, gates)
}

/// `2(n-1)^2 + 2(n-1) + 1` controlled gates for `n >= 2`; 1 gate below that.
pub fn gate_count_formula(n: usize) -> usize {
    if n < 2 {
        return 1;
    }
    let m = n - 1;
    2 * m * m + 2 * m + 1
}

/// Reference depth `8n - 12` for `n >= 3`.
pub fn depth_formula(n: usize) -> Result<usize> {
    if n < 3 {
        return Err(Error::TooSmall {
            what: "depth formula",
            min: 3,
            got: n,
        });
    }
    Ok(8 * n - 12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{asap_layers, invert};
    use crate::su2::distance;

    fn rx(t: f64) -> Unitary2 {
        Unitary2::rx(t).unwrap()
    }

    fn same(a: &Unitary2, b: &Unitary2) -> bool {
        distance(a, b, false) < 1e-14
    }

    fn expect_controlled(g: &Gate, control: usize, target: usize, m: &Unitary2) {
        match g {
            Gate::Controlled {
                control: c,
                target: t,
                matrix,
            } => {
                assert_eq!((*c, *t), (control, target));
                assert!(same(matrix, m), "{matrix:?} vs {m:?}");
            }
            other => panic!("expected controlled gate, got {other:?}"),
        }
    }

    #[test]
    fn p2_of_rx_pi() {
        let c = build_p(2, &rx(PI)).unwrap();
        assert_eq!(c.width(), 3);
        assert_eq!(c.len(), 1);
        expect_controlled(&c.gates()[0], 1, 2, &rx(PI / 2.0));
    }

    #[test]
    fn p3_exponents() {
        let u = Unitary2::h();
        let c = build_p(3, &u).unwrap();
        assert_eq!(c.len(), 2);
        expect_controlled(&c.gates()[0], 1, 3, &u.root(4).unwrap());
        expect_controlled(&c.gates()[1], 2, 3, &u.root(2).unwrap());
    }

    #[test]
    fn p_of_identity() {
        for j in 2..7 {
            let c = build_p(j, &Unitary2::identity()).unwrap();
            assert_eq!(c.len(), j - 1);
            assert!(c
                .gates()
                .iter()
                .all(|g| same(g.matrix(), &Unitary2::identity())));
        }
    }

    #[test]
    fn small_arguments_rejected() {
        assert!(build_p(1, &Unitary2::x()).is_err());
        assert!(build_q(1).is_err());
        assert!(depth_formula(2).is_err());
    }

    #[test]
    fn q2_is_single_crx_pi() {
        let c = build_q(2).unwrap();
        assert_eq!(c.len(), 1);
        expect_controlled(&c.gates()[0], 0, 1, &rx(PI));
    }

    #[test]
    fn q_gate_count() {
        for n in 2..30 {
            assert_eq!(build_q(n).unwrap().len(), (n - 1) * (n - 1));
        }
        // Enumerated by hand for n = 3: P_2, a1 Rx(pi/2) a3, Q_2, P_2^dag.
        let q3 = build_q(3).unwrap();
        expect_controlled(&q3.gates()[0], 1, 2, &rx(PI / 2.0));
        expect_controlled(&q3.gates()[1], 0, 2, &rx(PI / 2.0));
        expect_controlled(&q3.gates()[2], 0, 1, &rx(PI));
        expect_controlled(&q3.gates()[3], 1, 2, &rx(-PI / 2.0));
    }

    #[test]
    fn cnu_degenerate_sizes() {
        let u = Unitary2::h();
        let c0 = build_cnu(&McGateSpec::new(0, u));
        assert_eq!(c0.gates(), &[Gate::single(0, u)]);
        let c1 = build_cnu(&McGateSpec::new(1, u));
        assert_eq!(c1.gates(), &[Gate::controlled(0, 1, u)]);
    }

    #[test]
    fn cnu_n2_gate_list() {
        let u = Unitary2::h();
        let s = u.root(2).unwrap();
        let c = build_cnu(&McGateSpec::new(2, u));
        assert_eq!(c.len(), 5);
        expect_controlled(&c.gates()[0], 1, 2, &s);
        expect_controlled(&c.gates()[1], 0, 2, &s);
        expect_controlled(&c.gates()[2], 0, 1, &rx(PI));
        expect_controlled(&c.gates()[3], 1, 2, &s.adjoint());
        expect_controlled(&c.gates()[4], 0, 1, &rx(-PI));
    }

    #[test]
    fn cnu_structure_matches_blocks() {
        let u = Unitary2::y();
        for n in 2..9 {
            let c = build_cnu(&McGateSpec::new(n, u));
            let p = build_p(n, &u).unwrap();
            let q = build_q(n).unwrap();
            // Forward P blocks run their controls high to low inside the decomposition.
            let p_desc: Vec<Gate> = p.gates().iter().rev().copied().collect();
            let p_desc = Circuit::with_gates(n + 1, "", p_desc).unwrap();
            let mut expected: Vec<Gate> = p_desc.gates().to_vec();
            expected.push(Gate::controlled(0, n, u.root(1 << (n - 1)).unwrap()));
            expected.extend_from_slice(q.gates());
            expected.extend_from_slice(invert(&p_desc).gates());
            expected.extend_from_slice(invert(&q).gates());
            assert_eq!(c.len(), expected.len());
            for (a, b) in c.gates().iter().zip(&expected) {
                assert_eq!((a.control(), a.target()), (b.control(), b.target()));
                assert!(distance(a.matrix(), b.matrix(), false) < 1e-12);
            }
        }
    }

    #[test]
    fn cnu_gate_counts() {
        assert_eq!(build_cnu(&McGateSpec::new(3, Unitary2::x())).len(), 13);
        for n in 2..=40 {
            let c = build_cnu(&McGateSpec::new(n, Unitary2::h()));
            assert_eq!(c.len(), gate_count_formula(n));
            assert_eq!(c.count_controlled(), c.len());
        }
    }

    #[test]
    fn depth_formula_values() {
        assert_eq!(depth_formula(3).unwrap(), 12);
        assert_eq!(depth_formula(5).unwrap(), 28);
        assert_eq!(depth_formula(10).unwrap(), 68);
    }

    #[test]
    fn cnu_depth_within_formula() {
        for n in 3..=16 {
            let (_, depth) = asap_layers(&build_cnu(&McGateSpec::new(n, Unitary2::h())));
            assert!(depth <= depth_formula(n).unwrap(), "n = {n}: {depth}");
        }
    }

    #[test]
    fn p_ladder_n3_has_depth_3() {
        let (_, depth) = asap_layers(&build_p_ladder(3).unwrap());
        assert_eq!(depth, 3);
    }

    #[test]
    fn faulty_branch_changes_only_square_roots() {
        let u = Unitary2::x();
        let good = build_cnu(&McGateSpec::new(3, u));
        let bad = build_cnu_with_branch(&McGateSpec::new(3, u), RootBranch::FaultySquareRoot);
        let differs = good
            .gates()
            .iter()
            .zip(bad.gates())
            .filter(|(a, b)| distance(a.matrix(), b.matrix(), false) > 1e-6)
            .count();
        // P_3 and P_3^dag each hold one square root of U.
        assert_eq!(differs, 2);
    }
}
