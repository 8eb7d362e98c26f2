//! 2x2 unitary algebra.
//!
//! Everything the synthesis needs from single-qubit operators lives here:
//! construction of the standard rotations, products and adjoints, closed-form
//! eigendecomposition, principal k-th roots, and ZYZ Euler angles.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unitarity tolerance checked at construction.
pub const UNITARY_TOL: f64 = 1e-12;
/// Tolerance for reconstructing a matrix from a derived form.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
/// Tolerance for end-to-end circuit comparisons.
pub const END_TO_END_TOL: f64 = 1e-9;

/// Off-diagonal magnitude below which a matrix is treated as diagonal.
const DIAGONAL_EPS: f64 = 1e-14;
/// Eigenphases this close to -pi are snapped onto +pi.
const BRANCH_CUT_EPS: f64 = 1e-12;
/// Threshold below which a ZYZ half-angle sine or cosine is treated as zero.
const GIMBAL_EPS: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 2x2 complex unitary matrix, row-major `[a, b, c, d]` for `[[a, b], [c, d]]`.
#[derive(Clone, Copy, PartialEq)]
pub struct Unitary2([Complex64; 4]);

impl Unitary2 {
    /// Builds a unitary from row-major entries, rejecting anything that is not
    /// unitary within [`UNITARY_TOL`].
    pub fn new(entries: [Complex64; 4]) -> Result<Self> {
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("matrix entries"));
        }
        let u = Self(entries);
        let deviation = u.unitarity_deviation();
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        let det_dev = (u.det().norm() - 1.0).abs();
        if det_dev > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation: det_dev });
        }
        Ok(u)
    }

    /// Skips validation. Callers guarantee the entries come from products of
    /// unitaries or from an explicit unitary parametrization.
    pub(crate) const fn from_entries_unchecked(entries: [Complex64; 4]) -> Self {
        Self(entries)
    }

    pub const fn identity() -> Self {
        Self([ONE, ZERO, ZERO, ONE])
    }

    pub const fn x() -> Self {
        Self([ZERO, ONE, ONE, ZERO])
    }

    pub const fn y() -> Self {
        Self([ZERO, Complex64::new(0.0, -1.0), I, ZERO])
    }

    pub const fn z() -> Self {
        Self([ONE, ZERO, ZERO, Complex64::new(-1.0, 0.0)])
    }

    pub fn h() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self([s, s, s, -s])
    }

    /// `Rx(theta) = [[cos(theta/2), -i sin(theta/2)], [-i sin(theta/2), cos(theta/2)]]`.
    pub fn rx(theta: f64) -> Result<Self> {
        check_angle(theta)?;
        let (s, c) = (theta / 2.0).sin_cos();
        let c = Complex64::new(c, 0.0);
        let off = Complex64::new(0.0, -s);
        Ok(Self([c, off, off, c]))
    }

    pub fn ry(theta: f64) -> Result<Self> {
        check_angle(theta)?;
        let (s, c) = (theta / 2.0).sin_cos();
        Ok(Self([
            Complex64::new(c, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(c, 0.0),
        ]))
    }

    pub fn rz(theta: f64) -> Result<Self> {
        check_angle(theta)?;
        Ok(Self([
            Complex64::from_polar(1.0, -theta / 2.0),
            ZERO,
            ZERO,
            Complex64::from_polar(1.0, theta / 2.0),
        ]))
    }

    /// `diag(1, e^{i alpha})`.
    pub fn phase(alpha: f64) -> Result<Self> {
        check_angle(alpha)?;
        Ok(Self([ONE, ZERO, ZERO, Complex64::from_polar(1.0, alpha)]))
    }

    /// Haar-random element of SU(2), drawn through ZYZ angles with
    /// `cos(theta)` uniform on `[-1, 1]`.
    pub fn haar_su2<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let phi = rng.gen_range(0.0..2.0 * PI);
        let lambda = rng.gen_range(0.0..2.0 * PI);
        let theta = (1.0 - 2.0 * rng.gen::<f64>()).clamp(-1.0, 1.0).acos();
        ZyzAngles {
            global_phase: 0.0,
            theta,
            phi,
            lambda,
        }
        .to_unitary()
    }

    pub fn entries(&self) -> &[Complex64; 4] {
        &self.0
    }

    pub fn det(&self) -> Complex64 {
        let [a, b, c, d] = self.0;
        a * d - b * c
    }

    /// Matrix product `self * rhs`; as operators, `rhs` acts first.
    pub fn compose(&self, rhs: &Self) -> Self {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = rhs.0;
        Self([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    pub fn adjoint(&self) -> Self {
        let [a, b, c, d] = self.0;
        Self([a.conj(), c.conj(), b.conj(), d.conj()])
    }

    /// `self^k` by repeated squaring.
    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = Self::identity();
        let mut base = *self;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            k >>= 1;
        }
        acc
    }

    /// Applies the matrix to the column vector `(v0, v1)`.
    #[inline]
    pub fn apply(&self, v0: Complex64, v1: Complex64) -> (Complex64, Complex64) {
        let [a, b, c, d] = self.0;
        (a * v0 + b * v1, c * v0 + d * v1)
    }

    /// Largest entry of `|U^dagger U - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.adjoint().compose(self);
        distance(&p, &Self::identity(), false)
    }

    /// Principal k-th root; see [`principal_root`].
    pub fn root(&self, k: u64) -> Result<Self> {
        principal_root(self, k)
    }

    /// Entries as `[re, im]` pairs, row-major.
    pub fn to_pairs(&self) -> [[f64; 2]; 4] {
        self.0.map(|z| [z.re, z.im])
    }

    pub fn from_pairs(pairs: [[f64; 2]; 4]) -> Result<Self> {
        Self::new(pairs.map(|[re, im]| Complex64::new(re, im)))
    }
}

impl Default for Unitary2 {
    fn default() -> Self {
        Self::identity()
    }
}

impl fmt::Debug for Unitary2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "Unitary2[[{a}, {b}], [{c}, {d}]]")
    }
}

fn check_angle(theta: f64) -> Result<()> {
    if theta.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("angle"))
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    matrix: [[f64; 2]; 4],
}

impl Serialize for Unitary2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            matrix: self.to_pairs(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Unitary2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = MatrixJson::deserialize(d)?;
        Self::from_pairs(m.matrix).map_err(serde::de::Error::custom)
    }
}

/// Spectral form of a 2x2 unitary: `basis * diag(e^{i phases}) * basis^dagger`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenForm2 {
    /// Eigenphases in `(-pi, pi]`.
    pub phases: [f64; 2],
    /// `basis[i]` is the unit eigenvector for `phases[i]`.
    pub basis: [[Complex64; 2]; 2],
}

impl EigenForm2 {
    /// Rebuilds `basis * diag(e^{i phases[j] * scale}) * basis^dagger`.
    pub fn reconstruct_scaled(&self, scale: f64) -> Unitary2 {
        let eig = self.phases.map(|p| Complex64::from_polar(1.0, p * scale));
        let mut m = [ZERO; 4];
        for r in 0..2 {
            for c in 0..2 {
                m[2 * r + c] = (0..2)
                    .map(|i| self.basis[i][r] * eig[i] * self.basis[i][c].conj())
                    .sum();
            }
        }
        Unitary2::from_entries_unchecked(m)
    }

    pub fn reconstruct(&self) -> Unitary2 {
        self.reconstruct_scaled(1.0)
    }

    /// Root with eigenphases `phases / k`.
    pub fn root(&self, k: u64) -> Result<Unitary2> {
        if k == 0 {
            return Err(Error::ZeroRootDegree);
        }
        if k == 1 {
            return Ok(self.reconstruct());
        }
        Ok(self.reconstruct_scaled(1.0 / k as f64))
    }

    /// Root of degree `2^exp`; usable far beyond `u64` degrees.
    pub fn root_pow2(&self, exp: u32) -> Unitary2 {
        if exp == 0 {
            return self.reconstruct();
        }
        let scale = 0.5f64.powi(exp.min(i32::MAX as u32) as i32);
        self.reconstruct_scaled(scale)
    }
}

fn wrap_eigenphase(phi: f64) -> f64 {
    if phi <= -PI + BRANCH_CUT_EPS {
        PI
    } else {
        phi
    }
}

/// Closed-form eigendecomposition of a 2x2 unitary.
///
/// Diagonal inputs (including every scalar multiple of the identity) return
/// the standard basis.
pub fn eigendecompose(u: &Unitary2) -> EigenForm2 {
    let [a, b, c, d] = u.0;
    if b.norm() <= DIAGONAL_EPS && c.norm() <= DIAGONAL_EPS {
        return EigenForm2 {
            phases: [wrap_eigenphase(a.arg()), wrap_eigenphase(d.arg())],
            basis: [[ONE, ZERO], [ZERO, ONE]],
        };
    }

    let half_trace = (a + d) * 0.5;
    let disc = (half_trace * half_trace - u.det()).sqrt();
    let lambda = half_trace + disc;

    // Two algebraically equivalent eigenvector candidates; take the better conditioned.
    let from_row = [b, lambda - a];
    let from_col = [lambda - d, c];
    let norm_sq = |v: &[Complex64; 2]| v[0].norm_sqr() + v[1].norm_sqr();
    let v = if norm_sq(&from_row) >= norm_sq(&from_col) {
        from_row
    } else {
        from_col
    };
    let n = norm_sq(&v).sqrt();
    let v0 = [v[0] / n, v[1] / n];
    // A normal 2x2 matrix has orthogonal eigenspaces.
    let v1 = [-v0[1].conj(), v0[0].conj()];

    let rayleigh = |v: &[Complex64; 2]| {
        let (w0, w1) = u.apply(v[0], v[1]);
        v[0].conj() * w0 + v[1].conj() * w1
    };
    EigenForm2 {
        phases: [
            wrap_eigenphase(rayleigh(&v0).arg()),
            wrap_eigenphase(rayleigh(&v1).arg()),
        ],
        basis: [v0, v1],
    }
}

/// Principal k-th root: shares the eigenbasis of `u`, eigenphases divided by `k`.
pub fn principal_root(u: &Unitary2, k: u64) -> Result<Unitary2> {
    if k == 0 {
        return Err(Error::ZeroRootDegree);
    }
    if k == 1 {
        return Ok(*u);
    }
    eigendecompose(u).root(k)
}

/// Matrix product `a * b`.
pub fn compose(a: &Unitary2, b: &Unitary2) -> Unitary2 {
    a.compose(b)
}

pub fn adjoint(a: &Unitary2) -> Unitary2 {
    a.adjoint()
}

/// `e^{i global_phase} Rz(phi) Ry(theta) Rz(lambda)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZyzAngles {
    pub global_phase: f64,
    pub theta: f64,
    pub phi: f64,
    pub lambda: f64,
}

impl ZyzAngles {
    pub fn to_unitary(&self) -> Unitary2 {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let sum = (self.phi + self.lambda) / 2.0;
        let diff = (self.phi - self.lambda) / 2.0;
        let g = Complex64::from_polar(1.0, self.global_phase);
        Unitary2::from_entries_unchecked([
            g * Complex64::from_polar(c, -sum),
            g * Complex64::from_polar(-s, -diff),
            g * Complex64::from_polar(s, diff),
            g * Complex64::from_polar(c, sum),
        ])
    }
}

/// ZYZ Euler decomposition with `theta` in `[0, pi]`. Degenerate cases fix `lambda = 0`.
pub fn zyz_decompose(u: &Unitary2) -> ZyzAngles {
    let global_phase = u.det().arg() / 2.0;
    let unphase = Complex64::from_polar(1.0, -global_phase);
    let [v00, _, v10, v11] = u.0.map(|z| z * unphase);

    let theta = 2.0 * v10.norm().atan2(v00.norm());
    let (phi, lambda) = if v10.norm() < GIMBAL_EPS {
        (2.0 * v11.arg(), 0.0)
    } else if v00.norm() < GIMBAL_EPS {
        (2.0 * v10.arg(), 0.0)
    } else {
        let sum = 2.0 * v11.arg();
        let diff = 2.0 * v10.arg();
        ((sum + diff) / 2.0, (sum - diff) / 2.0)
    };
    ZyzAngles {
        global_phase,
        theta,
        phi,
        lambda,
    }
}

/// Maximum absolute entry difference. With `up_to_global_phase`, `b` is first
/// rotated by the unit phase that aligns it with `a` on `a`'s largest entry.
pub fn distance(a: &Unitary2, b: &Unitary2, up_to_global_phase: bool) -> f64 {
    let align = if up_to_global_phase {
        let idx = (0..4)
            .max_by(|&i, &j| a.0[i].norm().total_cmp(&a.0[j].norm()))
            .unwrap_or(0);
        let rel = a.0[idx] * b.0[idx].conj();
        if rel.norm() > 0.0 {
            rel / rel.norm()
        } else {
            ONE
        }
    } else {
        ONE
    };
    a.0.iter()
        .zip(b.0.iter())
        .map(|(x, y)| (x - y * align).norm())
        .fold(0.0, f64::max)
}
