//! Ancilla-free, linear-depth synthesis of multi-controlled single-qubit
//! unitaries, with a statevector simulator and brute-force oracle to check
//! every emitted circuit.
//!
//! ```
//! use mcu_forge_core::{build_cnu, circuit_unitary, oracle_unitary, McGateSpec, Unitary2};
//!
//! let spec = McGateSpec::new(3, Unitary2::x());
//! let circuit = build_cnu(&spec);
//! let err = circuit_unitary(&circuit)
//!     .unwrap()
//!     .max_abs_diff(&oracle_unitary(&spec).unwrap());
//! assert!(err < 1e-9);
//! ```

pub mod circuit;
pub mod error;
pub mod experiments;
pub mod ldd;
pub mod sim;
pub mod su2;

pub use circuit::{
    asap_layers, invert, lower_controlled, schedule_asap, to_qasm, Circuit, DepthReport, Gate,
};
pub use error::{Error, Result};
pub use experiments::{
    build_experiment_a, build_experiment_b, depth_scaling_table, run_experiment, Experiment,
    ExperimentResult, ScalingRow,
};
pub use ldd::{
    build_cnu, build_cnu_with_branch, build_p, build_p_ladder, build_q, depth_formula,
    gate_count_formula, McGateSpec, RootBranch,
};
pub use sim::{
    circuit_unitary, oracle_cnu, oracle_unitary, run, run_noisy, DenseUnitary, Histogram,
    NoiseSpec, Statevector,
};
pub use su2::{
    distance, eigendecompose, principal_root, zyz_decompose, EigenForm2, Unitary2, ZyzAngles,
};
