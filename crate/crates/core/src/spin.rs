//! Spin-j operator matrices, rotation matrices, Haar sampling over rotation
//! angles, and the angular-momentum decomposition combinatorics.
//!
//! Basis convention used everywhere: the (2j+1) vectors |j; m> are ordered by
//! ascending m, so index(m) = (2m + 2j)/2. This keeps stripe extraction
//! index-stable across the crate.

use num_complex::Complex64;
use rand::Rng;

use crate::eigen::dense_hermitian_eigen;
use crate::half::{is_valid_projection, HalfInteger};
use crate::matrix::ComplexMatrix;
use crate::{Error, Result};

/// The spin-j basis |j; m>, m ascending from -j to j.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpinBasis {
    two_j: u32,
}

impl SpinBasis {
    pub fn new(two_j: u32) -> Self {
        Self { two_j }
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn j(&self) -> HalfInteger {
        HalfInteger::from_twice(self.two_j as i32)
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    pub fn index_of(&self, m: HalfInteger) -> Result<usize> {
        if !is_valid_projection(self.j(), m) {
            return Err(Error::InvalidProjection {
                twice_j: self.two_j as i32,
                twice_m: m.twice(),
            });
        }
        Ok(((m.twice() + self.two_j as i32) / 2) as usize)
    }

    pub fn m_at(&self, index: usize) -> HalfInteger {
        debug_assert!(index < self.dim());
        HalfInteger::from_twice(2 * index as i32 - self.two_j as i32)
    }

    pub fn projections(&self) -> impl Iterator<Item = HalfInteger> + '_ {
        (0..self.dim()).map(|i| self.m_at(i))
    }

    /// Index of the highest-weight state |j; j>.
    pub fn highest_index(&self) -> usize {
        self.dim() - 1
    }
}

/// Euler angles (phi, theta, zeta) of a rotation.
///
/// Intended ranges are phi, zeta in [0, 2pi) and theta in [0, pi]; the Haar
/// density over them is sin(theta) / (8 pi^2). zeta only contributes a phase
/// on the highest-weight state, but it is kept so the rotation algebra stays
/// in its standard form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerAngles {
    pub phi: f64,
    pub theta: f64,
    pub zeta: f64,
}

impl EulerAngles {
    pub const IDENTITY: Self = Self {
        phi: 0.0,
        theta: 0.0,
        zeta: 0.0,
    };

    pub fn new(phi: f64, theta: f64, zeta: f64) -> Self {
        Self { phi, theta, zeta }
    }

    /// Unit vector (sin t cos p, sin t sin p, cos t) the rotation sends the
    /// +z axis to.
    pub fn direction(&self) -> [f64; 3] {
        [
            self.theta.sin() * self.phi.cos(),
            self.theta.sin() * self.phi.sin(),
            self.theta.cos(),
        ]
    }
}

/// Draws Euler angles from the Haar measure: phi and zeta uniform on
/// [0, 2pi), cos(theta) uniform on [-1, 1].
///
/// Draw order is fixed (phi, cos theta, zeta) so a seeded stream is
/// reproducible.
pub fn haar_sample<R: Rng>(rng: &mut R) -> EulerAngles {
    let tau = std::f64::consts::TAU;
    let phi = tau * rng.gen::<f64>();
    let cos_theta: f64 = 2.0 * rng.gen::<f64>() - 1.0;
    let zeta = tau * rng.gen::<f64>();
    EulerAngles {
        phi,
        theta: cos_theta.clamp(-1.0, 1.0).acos(),
        zeta,
    }
}

/// The five standard spin-j operator matrices in the ascending-m basis.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub basis: SpinBasis,
    pub jx: ComplexMatrix,
    pub jy: ComplexMatrix,
    pub jz: ComplexMatrix,
    pub jplus: ComplexMatrix,
    pub jminus: ComplexMatrix,
}

/// Builds Jz (diagonal m), the ladder pair with
/// <j; m+1 | J+ | j; m> = sqrt((j-m)(j+m+1)), and Jx, Jy derived from them.
pub fn spin_operators(two_j: u32) -> SpinOperators {
    let basis = SpinBasis::new(two_j);
    let n = basis.dim();
    let mut jz = ComplexMatrix::zeros(n, n);
    let mut jplus = ComplexMatrix::zeros(n, n);
    let mut jminus = ComplexMatrix::zeros(n, n);
    let j = basis.j().value();
    for i in 0..n {
        let m = basis.m_at(i).value();
        jz[(i, i)] = Complex64::new(m, 0.0);
        if i + 1 < n {
            let amp = ((j - m) * (j + m + 1.0)).sqrt();
            jplus[(i + 1, i)] = Complex64::new(amp, 0.0);
            jminus[(i, i + 1)] = Complex64::new(amp, 0.0);
        }
    }
    let jx = jplus.add(&jminus).scaled_re(0.5);
    let jy = jplus.sub(&jminus).scaled(Complex64::new(0.0, -0.5));
    SpinOperators {
        basis,
        jx,
        jy,
        jz,
        jplus,
        jminus,
    }
}

/// Generator of spin-j rotation matrices for a fixed j.
///
/// U(phi, theta, zeta) = exp(-i phi Jz) exp(-i theta Jy) exp(-i zeta Jz).
/// The middle factor is evaluated through the eigendecomposition of Jy,
/// prepared once here, so repeated rotations (Monte-Carlo sampling) stay
/// cheap and no factorial-sum cancellation ever enters.
#[derive(Clone, Debug)]
pub struct SpinRotation {
    basis: SpinBasis,
    jy_values: Vec<f64>,
    jy_vectors: ComplexMatrix,
}

impl SpinRotation {
    pub fn new(two_j: u32) -> Result<Self> {
        let ops = spin_operators(two_j);
        let (jy_values, jy_vectors) = dense_hermitian_eigen(&ops.jy)?;
        Ok(Self {
            basis: ops.basis,
            jy_values,
            jy_vectors,
        })
    }

    pub fn basis(&self) -> SpinBasis {
        self.basis
    }

    /// exp(-i theta Jy).
    pub fn small_d(&self, theta: f64) -> ComplexMatrix {
        let n = self.basis.dim();
        // V * diag(exp(-i theta m)) * V†
        let mut scaled = ComplexMatrix::zeros(n, n);
        for c in 0..n {
            let phase = Complex64::from_polar(1.0, -theta * self.jy_values[c]);
            for r in 0..n {
                scaled[(r, c)] = self.jy_vectors[(r, c)] * phase;
            }
        }
        scaled.mul(&self.jy_vectors.adjoint())
    }

    /// The full rotation matrix U(omega).
    pub fn matrix(&self, omega: &EulerAngles) -> ComplexMatrix {
        let mut u = self.small_d(omega.theta);
        let n = self.basis.dim();
        for r in 0..n {
            let phase_r = Complex64::from_polar(1.0, -omega.phi * self.basis.m_at(r).value());
            for c in 0..n {
                let phase_c = Complex64::from_polar(1.0, -omega.zeta * self.basis.m_at(c).value());
                u[(r, c)] *= phase_r * phase_c;
            }
        }
        u
    }

    /// U(omega) |j; j>, computed with two matrix-vector products.
    pub fn highest_weight_state(&self, omega: &EulerAngles) -> Vec<Complex64> {
        let n = self.basis.dim();
        let top = self.basis.highest_index();
        // t = exp(-i theta L) V† e_top
        let mut t: Vec<Complex64> = (0..n)
            .map(|i| {
                self.jy_vectors[(top, i)].conj()
                    * Complex64::from_polar(1.0, -omega.theta * self.jy_values[i])
            })
            .collect();
        // psi = V t, then the row phases and the global zeta phase
        let j = self.basis.j().value();
        let zeta_phase = Complex64::from_polar(1.0, -omega.zeta * j);
        for v in &mut t {
            *v *= zeta_phase;
        }
        let mut psi = self.jy_vectors.matvec(&t);
        for (r, v) in psi.iter_mut().enumerate() {
            *v *= Complex64::from_polar(1.0, -omega.phi * self.basis.m_at(r).value());
        }
        psi
    }
}

/// One-shot rotation matrix; prefer [`SpinRotation`] when sampling many
/// angles at the same j.
pub fn wigner_rotation(two_j: u32, omega: &EulerAngles) -> Result<ComplexMatrix> {
    Ok(SpinRotation::new(two_j)?.matrix(omega))
}

/// Exact binomial coefficient, or an overflow error.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (n - k + i) stays integral after dividing by i
        acc = acc
            .checked_mul((n - k + i) as u128)
            .ok_or(Error::Overflow)?
            / i as u128;
    }
    Ok(acc)
}

/// Doubled total-spin values j' appearing in the decomposition of N qubits,
/// descending from j = N/2 to j - floor(j).
pub fn subspace_spins(n_qubits: u32) -> impl Iterator<Item = u32> {
    (0..=n_qubits / 2).map(move |step| n_qubits - 2 * step)
}

/// Number of spin-j' blocks in the decomposition of N qubits:
/// mu = C(N, N/2 + j') - C(N, N/2 + j' + 1), evaluated exactly.
pub fn multiplicity(n_qubits: u32, two_jprime: u32) -> Result<u128> {
    if two_jprime > n_qubits || !(n_qubits - two_jprime).is_multiple_of(2) {
        return Err(Error::InvalidSubspace {
            n_qubits,
            two_jprime,
        });
    }
    let n = n_qubits as u64;
    let upper = (n + two_jprime as u64) / 2;
    let a = binomial(n, upper)?;
    let b = binomial(n, upper + 1)?;
    Ok(a - b)
}
