//! Circuit representation, ASAP layering, inversion, lowering to `{CX, 1q}`
//! and serialization (JSON and OpenQASM 2.0).

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::su2::{distance, zyz_decompose, Unitary2};

/// Distance below which a controlled matrix counts as an X (the gate is a CX).
const CX_TOL: f64 = 1e-12;

/// One circuit element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    /// A one-qubit unitary on `target`.
    Single { target: usize, matrix: Unitary2 },
    /// `matrix` on `target`, applied when `control` is `|1>`.
    Controlled {
        control: usize,
        target: usize,
        matrix: Unitary2,
    },
}

impl Gate {
    pub fn single(target: usize, matrix: Unitary2) -> Self {
        Gate::Single { target, matrix }
    }

    pub fn controlled(control: usize, target: usize, matrix: Unitary2) -> Self {
        Gate::Controlled {
            control,
            target,
            matrix,
        }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::controlled(control, target, Unitary2::x())
    }

    pub fn target(&self) -> usize {
        match *self {
            Gate::Single { target, .. } | Gate::Controlled { target, .. } => target,
        }
    }

    pub fn control(&self) -> Option<usize> {
        match *self {
            Gate::Single { .. } => None,
            Gate::Controlled { control, .. } => Some(control),
        }
    }

    pub fn matrix(&self) -> &Unitary2 {
        match self {
            Gate::Single { matrix, .. } | Gate::Controlled { matrix, .. } => matrix,
        }
    }

    pub fn is_controlled(&self) -> bool {
        matches!(self, Gate::Controlled { .. })
    }

    /// A controlled gate whose matrix is X.
    pub fn is_cx(&self) -> bool {
        matches!(self, Gate::Controlled { matrix, .. } if distance(matrix, &Unitary2::x(), false) <= CX_TOL)
    }

    /// Wires touched by this gate, control first.
    pub fn wires(&self) -> impl Iterator<Item = usize> {
        self.control()
            .into_iter()
            .chain(std::iter::once(self.target()))
    }

    pub fn adjoint(&self) -> Self {
        match *self {
            Gate::Single { target, matrix } => Gate::Single {
                target,
                matrix: matrix.adjoint(),
            },
            Gate::Controlled {
                control,
                target,
                matrix,
            } => Gate::Controlled {
                control,
                target,
                matrix: matrix.adjoint(),
            },
        }
    }

    fn validate(&self, width: usize) -> Result<()> {
        for wire in self.wires() {
            if wire >= width {
                return Err(Error::WireOutOfRange { wire, width });
            }
        }
        if self.control() == Some(self.target()) {
            return Err(Error::ControlIsTarget(self.target()));
        }
        Ok(())
    }
}

/// Ordered gate list over a fixed number of wires. Earlier gates act first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    width: usize,
    label: String,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize, label: impl Into<String>) -> Self {
        Self {
            width,
            label: label.into(),
            gates: Vec::new(),
        }
    }

    pub fn with_gates(width: usize, label: impl Into<String>, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.validate(width)?;
        }
        Ok(Self {
            width,
            label: label.into(),
            gates,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends all gates of `other`, which must not be wider than `self`.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.width > self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                got: other.width,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// Wires were validated at insertion, so construction helpers in this crate
    /// may push without re-checking.
    pub(crate) fn push_unchecked(&mut self, gate: Gate) {
        debug_assert!(gate.validate(self.width).is_ok());
        self.gates.push(gate);
    }

    pub fn count_controlled(&self) -> usize {
        self.gates.iter().filter(|g| g.is_controlled()).count()
    }

    /// True when every controlled gate is a CX.
    pub fn is_lowered(&self) -> bool {
        self.gates.iter().all(|g| !g.is_controlled() || g.is_cx())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Layer assignment and size totals for a circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DepthReport {
    /// 1-based layer of each gate, in program order.
    pub layers: Vec<usize>,
    /// Layer count with controlled one-qubit gates as single layers.
    pub depth_controlled: usize,
    /// Layer count after [`lower_controlled`].
    pub depth_lowered: usize,
    /// Controlled gates in the circuit as given.
    pub count_controlled: usize,
    /// CX gates after lowering.
    pub count_cx: usize,
    /// One-qubit gates after lowering.
    pub count_1q: usize,
}

/// Greedy ASAP layering: each gate lands one layer after the latest earlier
/// gate sharing a wire. Returns per-gate layers and the depth.
pub fn asap_layers(c: &Circuit) -> (Vec<usize>, usize) {
    let mut frontier = vec![0usize; c.width()];
    let mut depth = 0;
    let layers = c
        .gates()
        .iter()
        .map(|g| {
            let layer = 1 + g.wires().map(|w| frontier[w]).max().unwrap_or(0);
            for w in g.wires() {
                frontier[w] = layer;
            }
            depth = depth.max(layer);
            layer
        })
        .collect();
    (layers, depth)
}

pub fn schedule_asap(c: &Circuit) -> DepthReport {
    let (layers, depth_controlled) = asap_layers(c);
    let lowered = lower_controlled(c);
    let (_, depth_lowered) = asap_layers(&lowered);
    let count_cx = lowered.count_controlled();
    DepthReport {
        layers,
        depth_controlled,
        depth_lowered,
        count_controlled: c.count_controlled(),
        count_cx,
        count_1q: lowered.len() - count_cx,
    }
}

/// Reverses gate order and takes each adjoint.
pub fn invert(c: &Circuit) -> Circuit {
    Circuit {
        width: c.width,
        label: c.label.clone(),
        gates: c.gates.iter().rev().map(Gate::adjoint).collect(),
    }
}

/// The exact two-CX expansion of a controlled `U`.
///
/// With `U = e^{ia} Rz(phi) Ry(theta) Rz(lambda)` and
/// `A = Rz(phi) Ry(theta/2)`, `B = Ry(-theta/2) Rz(-(phi+lambda)/2)`,
/// `C = Rz((lambda-phi)/2)`, we have `ABC = I` and `A X B X C = e^{-ia} U`.
/// The phase `e^{ia}` becomes `diag(1, e^{ia})` on the control.
pub fn lower_controlled_gate(control: usize, target: usize, u: &Unitary2) -> Vec<Gate> {
    if distance(u, &Unitary2::x(), false) <= CX_TOL {
        return vec![Gate::cx(control, target)];
    }
    let z = zyz_decompose(u);
    let rz = |t: f64| Unitary2::rz(t).expect("finite angle");
    let ry = |t: f64| Unitary2::ry(t).expect("finite angle");
    let a = rz(z.phi).compose(&ry(z.theta / 2.0));
    let b = ry(-z.theta / 2.0).compose(&rz(-(z.phi + z.lambda) / 2.0));
    let c = rz((z.lambda - z.phi) / 2.0);
    vec![
        Gate::single(target, c),
        Gate::cx(control, target),
        Gate::single(target, b),
        Gate::cx(control, target),
        Gate::single(target, a),
        Gate::single(
            control,
            Unitary2::phase(z.global_phase).expect("finite angle"),
        ),
    ]
}

/// Rewrites every controlled gate into `{CX, 1q}`; one-qubit gates pass through.
pub fn lower_controlled(c: &Circuit) -> Circuit {
    let mut out = Circuit::new(c.width, c.label.clone());
    for g in c.gates() {
        match *g {
            Gate::Single { .. } => out.gates.push(*g),
            Gate::Controlled {
                control,
                target,
                matrix,
            } => out
                .gates
                .extend(lower_controlled_gate(control, target, &matrix)),
        }
    }
    out
}

fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// OpenQASM 2.0 text for a lowered circuit, using `u3` and `cx` only.
///
/// `u3(t, p, l)` equals `e^{-i(p+l)/2} Rz(p) Ry(t) Rz(l)`; the accumulated
/// difference to the exact circuit is written as a `// global_phase:` line
/// whenever it is nonzero.
pub fn to_qasm(c: &Circuit) -> Result<String> {
    if !c.is_lowered() {
        return Err(Error::LoweringRequired);
    }
    let mut body = String::new();
    let mut global_phase = 0.0;
    for g in c.gates() {
        match *g {
            Gate::Controlled {
                control, target, ..
            } => {
                writeln!(body, "cx q[{control}],q[{target}];").unwrap();
            }
            Gate::Single { target, matrix } => {
                let z = zyz_decompose(&matrix);
                global_phase += z.global_phase - (z.phi + z.lambda) / 2.0;
                writeln!(body, "u3({},{},{}) q[{target}];", z.theta, z.phi, z.lambda).unwrap();
            }
        }
    }
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let global_phase = wrap_angle(global_phase);
    if global_phase != 0.0 {
        writeln!(out, "// global_phase: {global_phase}").unwrap();
    }
    writeln!(out, "qreg q[{}];", c.width()).unwrap();
    out.push_str(&body);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum GateKind {
    OneQubit,
    Controlled,
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    kind: GateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    control: Option<usize>,
    target: usize,
    matrix: [[f64; 2]; 4],
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    width: usize,
    label: String,
    gates: Vec<GateJson>,
}

impl Serialize for Circuit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let gates = self
            .gates
            .iter()
            .map(|g| GateJson {
                kind: if g.is_controlled() {
                    GateKind::Controlled
                } else {
                    GateKind::OneQubit
                },
                control: g.control(),
                target: g.target(),
                matrix: g.matrix().to_pairs(),
            })
            .collect();
        CircuitJson {
            width: self.width,
            label: self.label.clone(),
            gates,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = CircuitJson::deserialize(d)?;
        let gates = raw
            .gates
            .into_iter()
            .map(|g| {
                let matrix = Unitary2::from_pairs(g.matrix).map_err(D::Error::custom)?;
                match (g.kind, g.control) {
                    (GateKind::OneQubit, None) => Ok(Gate::single(g.target, matrix)),
                    (GateKind::Controlled, Some(control)) => {
                        Ok(Gate::controlled(control, g.target, matrix))
                    }
                    (GateKind::OneQubit, Some(_)) => {
                        Err(D::Error::custom("one_qubit gate must not have a control"))
                    }
                    (GateKind::Controlled, None) => {
                        Err(D::Error::custom("controlled gate requires a control"))
                    }
                }
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Circuit::with_gates(raw.width, raw.label, gates).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rx(t: f64) -> Unitary2 {
        Unitary2::rx(t).unwrap()
    }

    #[test]
    fn gate_validation() {
        let mut c = Circuit::new(2, "t");
        assert!(matches!(
            c.push(Gate::cx(0, 2)),
            Err(Error::WireOutOfRange { wire: 2, width: 2 })
        ));
        assert!(matches!(
            c.push(Gate::cx(1, 1)),
            Err(Error::ControlIsTarget(1))
        ));
        assert!(c.push(Gate::cx(1, 0)).is_ok());
    }

    #[test]
    fn empty_circuit_has_depth_zero() {
        let r = schedule_asap(&Circuit::new(3, ""));
        assert_eq!(r.depth_controlled, 0);
        assert_eq!(r.depth_lowered, 0);
        assert!(r.layers.is_empty());
    }

    #[test]
    fn disjoint_pairs_share_a_layer() {
        let c = Circuit::with_gates(5, "", vec![Gate::cx(1, 2), Gate::cx(3, 4)]).unwrap();
        let r = schedule_asap(&c);
        assert_eq!(r.layers, vec![1, 1]);
        assert_eq!(r.depth_controlled, 1);
    }

    #[test]
    fn program_order_on_shared_wire() {
        let c = Circuit::with_gates(
            3,
            "",
            vec![
                Gate::cx(0, 1),
                Gate::single(2, Unitary2::h()),
                Gate::cx(1, 2),
                Gate::single(0, Unitary2::h()),
            ],
        )
        .unwrap();
        assert_eq!(asap_layers(&c), (vec![1, 1, 2, 2], 2));
    }

    #[test]
    fn invert_single_rx() {
        let c = Circuit::with_gates(1, "", vec![Gate::single(0, rx(PI))]).unwrap();
        let inv = invert(&c);
        assert_eq!(inv.gates(), &[Gate::single(0, rx(-PI))]);
        assert_eq!(invert(&inv), c);
    }

    #[test]
    fn cx_passes_through_lowering() {
        let c = Circuit::with_gates(2, "", vec![Gate::cx(0, 1)]).unwrap();
        assert_eq!(lower_controlled(&c), c);
    }

    #[test]
    fn controlled_rx_lowers_to_two_cx() {
        let c = Circuit::with_gates(2, "", vec![Gate::controlled(0, 1, rx(PI / 2.0))]).unwrap();
        let low = lower_controlled(&c);
        assert!(low.is_lowered());
        assert_eq!(low.count_controlled(), 2);
        assert!(low.len() - 2 <= 4);
    }

    #[test]
    fn qasm_requires_lowering() {
        let c = Circuit::with_gates(2, "", vec![Gate::controlled(0, 1, Unitary2::h())]).unwrap();
        assert!(matches!(to_qasm(&c), Err(Error::LoweringRequired)));
    }

    #[test]
    fn qasm_empty_circuit() {
        let q = to_qasm(&Circuit::new(2, "")).unwrap();
        assert_eq!(q, "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\n");
    }

    #[test]
    fn qasm_single_cx() {
        let c = Circuit::with_gates(2, "", vec![Gate::cx(0, 1)]).unwrap();
        let q = to_qasm(&c).unwrap();
        assert_eq!(
            q,
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncx q[0],q[1];\n"
        );
    }

    #[test]
    fn qasm_records_phase_of_x() {
        // u3(pi,-pi,0) = -X
        let c = Circuit::with_gates(1, "", vec![Gate::single(0, Unitary2::x())]).unwrap();
        let q = to_qasm(&c).unwrap();
        assert!(
            q.contains("u3(3.141592653589793,-3.141592653589793,0) q[0];"),
            "{q}"
        );
        assert!(q.contains("// global_phase: 3.141592653589793"), "{q}");
        // Rx(pi) = -iX = i u3(pi,-pi,0)
        let c = Circuit::with_gates(1, "", vec![Gate::single(0, rx(PI))]).unwrap();
        let q = to_qasm(&c).unwrap();
        assert!(q.contains("// global_phase: 1.5707963267948966"), "{q}");
    }

    #[test]
    fn json_layout() {
        let c = Circuit::with_gates(
            2,
            "demo",
            vec![Gate::single(1, Unitary2::x()), Gate::cx(0, 1)],
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&c.to_json().unwrap()).unwrap();
        assert_eq!(v["width"], 2);
        assert_eq!(v["label"], "demo");
        assert_eq!(v["gates"][0]["kind"], "one_qubit");
        assert!(v["gates"][0].get("control").is_none());
        assert_eq!(v["gates"][1]["kind"], "controlled");
        assert_eq!(v["gates"][1]["control"], 0);
        assert_eq!(v["gates"][1]["matrix"][1], serde_json::json!([1.0, 0.0]));
        assert_eq!(Circuit::from_json(&c.to_json().unwrap()).unwrap(), c);
    }

    #[test]
    fn json_rejects_bad_wires() {
        let text = r#"{"width":2,"label":"","gates":[{"kind":"controlled","control":1,"target":1,
            "matrix":[[0,0],[1,0],[1,0],[0,0]]}]}"#;
        assert!(Circuit::from_json(text).is_err());
        let text = r#"{"width":2,"label":"","gates":[{"kind":"controlled","target":1,
            "matrix":[[0,0],[1,0],[1,0],[0,0]]}]}"#;
        assert!(Circuit::from_json(text).is_err());
    }
}
