//! Brute-force verification of the optimized curves against the raw
//! fidelity definitions.
//!
//! Everything here distrusts the reduction on purpose: fidelities are
//! re-estimated by importance-sampled Monte-Carlo integration over Haar
//! random input states and operation outcomes, the weighted projector
//! integrals are checked entrywise, the complete operation built from a
//! single element is tested for trace preservation, and the promotion from
//! lower-spin subspaces is verified inequality by inequality.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::half::HalfInteger;
use crate::matrix::ComplexMatrix;
use crate::spin::{haar_sample, spin_operators, EulerAngles, SpinBasis, SpinRotation};
use crate::stripe::StripeVector;
use crate::{Error, Result};

/// A single operation element acting inside the fully symmetric subspace.
#[derive(Clone, Debug)]
pub struct OperationElement {
    basis: SpinBasis,
    matrix: ComplexMatrix,
    trace_norm: f64,
}

impl OperationElement {
    pub fn new(two_j: u32, matrix: ComplexMatrix) -> Result<Self> {
        let basis = SpinBasis::new(two_j);
        if matrix.rows() != basis.dim() || matrix.cols() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: matrix.rows().max(matrix.cols()),
            });
        }
        matrix.ensure_finite()?;
        let trace_norm = matrix.adjoint().mul(&matrix).trace().re;
        Ok(Self {
            basis,
            matrix,
            trace_norm,
        })
    }

    /// Places a normalized stripe on its diagonal: entry a_m lands at
    /// (row m-k, column m).
    pub fn from_stripe(a: &StripeVector) -> Result<Self> {
        if !a.is_normalized() {
            return Err(Error::NotNormalized {
                norm_sq: a.norm_sq(),
            });
        }
        let index = a.index();
        let basis = SpinBasis::new(index.two_j());
        let mut matrix = ComplexMatrix::zeros(basis.dim(), basis.dim());
        for (offset, &value) in a.values().iter().enumerate() {
            let m = index.m_at(offset);
            let row = basis.index_of(m - HalfInteger::from_int(index.k()))?;
            let col = basis.index_of(m)?;
            matrix[(row, col)] = Complex64::new(value, 0.0);
        }
        Self::new(index.two_j(), matrix)
    }

    /// The identity element 1/sqrt(2j+1), the do-nothing operation.
    pub fn identity(two_j: u32) -> Self {
        let dim = two_j as usize + 1;
        let matrix = ComplexMatrix::identity(dim).scaled_re(1.0 / (dim as f64).sqrt());
        Self::new(two_j, matrix).expect("identity element is well formed")
    }

    /// The projector |j; j><j; j| onto the highest-weight state.
    pub fn highest_projector(two_j: u32) -> Self {
        let basis = SpinBasis::new(two_j);
        let mut matrix = ComplexMatrix::zeros(basis.dim(), basis.dim());
        let top = basis.highest_index();
        matrix[(top, top)] = Complex64::new(1.0, 0.0);
        Self::new(two_j, matrix).expect("projector element is well formed")
    }

    pub fn basis(&self) -> SpinBasis {
        self.basis
    }

    pub fn two_j(&self) -> u32 {
        self.basis.two_j()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Tr(A†A), recorded at construction.
    pub fn trace_norm(&self) -> f64 {
        self.trace_norm
    }

    fn ensure_unit_trace_norm(&self) -> Result<()> {
        if (self.trace_norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized {
                norm_sq: self.trace_norm,
            });
        }
        Ok(())
    }

    /// U A U† for a rotation given by Euler angles.
    pub fn rotated(&self, rotation: &SpinRotation, omega: &EulerAngles) -> Self {
        let u = rotation.matrix(omega);
        let matrix = u.mul(&self.matrix).mul(&u.adjoint());
        Self::new(self.two_j(), matrix).expect("rotation preserves shape")
    }
}

/// The trace vector (Tr(A†A Jx), Tr(A†A Jy), Tr(A†A Jz)) whose direction is
/// the optimal guess for the input state.
#[derive(Clone, Copy, Debug)]
pub struct GuessVector {
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
}

impl GuessVector {
    pub fn norm(&self) -> f64 {
        (self.ax * self.ax + self.ay * self.ay + self.az * self.az).sqrt()
    }

    /// Unit guess direction, or None when the vector vanishes and the guess
    /// must be made at random.
    pub fn direction(&self) -> Option<[f64; 3]> {
        let n = self.norm();
        if n <= 1e-12 {
            None
        } else {
            Some([self.ax / n, self.ay / n, self.az / n])
        }
    }

    pub fn is_random_guess(&self) -> bool {
        self.direction().is_none()
    }
}

fn guess_from_gram(gram: &ComplexMatrix, ops: &crate::spin::SpinOperators) -> GuessVector {
    GuessVector {
        ax: gram.trace_product_re(&ops.jx),
        ay: gram.trace_product_re(&ops.jy),
        az: gram.trace_product_re(&ops.jz),
    }
}

/// Optimal estimation rule for an operation element: guess along the trace
/// vector of A†A against the angular momentum components.
pub fn optimal_guess(op: &OperationElement) -> GuessVector {
    let ops = spin_operators(op.two_j());
    let gram = op.matrix.adjoint().mul(&op.matrix);
    guess_from_gram(&gram, &ops)
}

/// (f, g) for a rectangular element B mapping the spin-j subspace into a
/// spin-j' subspace, evaluated directly from the trace expressions.
///
/// g uses the frame-aligned form Tr(B†B Jz)/Tr(B†B); it equals the
/// guess-optimized value only once the guess vector points along +z.
pub fn mixed_fg(b: &ComplexMatrix, two_j_out: u32, two_j_in: u32) -> Result<(f64, f64)> {
    let out_basis = SpinBasis::new(two_j_out);
    let in_basis = SpinBasis::new(two_j_in);
    if b.rows() != out_basis.dim() || b.cols() != in_basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: out_basis.dim(),
            found: b.rows(),
        });
    }
    b.ensure_finite()?;
    let gram = b.adjoint().mul(b);
    let trace_norm = gram.trace().re;
    if trace_norm <= 1e-300 {
        return Err(Error::ZeroOperator);
    }
    let ops_out = spin_operators(two_j_out);
    let ops_in = spin_operators(two_j_in);
    let b_dag = b.adjoint();
    let mut f = 0.0;
    for (j_out, j_in) in [
        (&ops_out.jx, &ops_in.jx),
        (&ops_out.jy, &ops_in.jy),
        (&ops_out.jz, &ops_in.jz),
    ] {
        let inner = b.mul(j_in).mul(&b_dag);
        f += j_out.trace_product_re(&inner);
    }
    let g = gram.trace_product_re(&ops_in.jz);
    Ok((f / trace_norm, g / trace_norm))
}

/// (f, g) of a square operation element from the trace expressions.
///
/// This is the analytic cross-check for the stripe quadratic forms: both
/// quantities come out of matrix products with the spin operators, sharing
/// no code with the direct stripe summation.
pub fn analytic_fg(op: &OperationElement) -> Result<(f64, f64)> {
    mixed_fg(&op.matrix, op.two_j(), op.two_j())
}

/// The guess-optimized estimation value |A_r| / Tr(A†A) (the square-root
/// form, valid in any frame).
pub fn guess_norm_g(op: &OperationElement) -> Result<f64> {
    if op.trace_norm <= 1e-300 {
        return Err(Error::ZeroOperator);
    }
    Ok(optimal_guess(op).norm() / op.trace_norm)
}

/// Rotates the element so its guess vector points along +z (no-op for a
/// vanishing guess vector). After alignment the frame-aligned g of
/// [`analytic_fg`] coincides with [`guess_norm_g`].
pub fn align_to_guess(op: &OperationElement) -> Result<OperationElement> {
    match optimal_guess(op).direction() {
        None => Ok(op.clone()),
        Some([nx, ny, nz]) => {
            let theta = nz.clamp(-1.0, 1.0).acos();
            let phi = ny.atan2(nx).rem_euclid(std::f64::consts::TAU);
            let rotation = SpinRotation::new(op.two_j())?;
            let u = rotation.matrix(&EulerAngles::new(phi, theta, 0.0));
            let aligned = u.adjoint().mul(&op.matrix).mul(&u);
            OperationElement::new(op.two_j(), aligned)
        }
    }
}

/// A Monte-Carlo mean with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Default)]
struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            return f64::INFINITY;
        }
        (self.m2 / (self.n as f64 - 1.0)).sqrt() / (self.n as f64).sqrt()
    }

    fn estimate(&self, seed: u64) -> MonteCarloEstimate {
        MonteCarloEstimate {
            mean: self.mean,
            std_error: self.std_error(),
            samples: self.n,
            seed,
        }
    }
}

/// Options for [`estimate_fidelities`].
#[derive(Clone, Copy, Debug)]
pub struct EstimateOptions {
    pub samples: usize,
    pub seed: u64,
    /// Shift added to every sampled zeta angle; the fidelities must not
    /// depend on it, which is itself a tested property.
    pub zeta_offset: f64,
}

impl EstimateOptions {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            zeta_offset: 0.0,
        }
    }
}

/// Monte-Carlo estimates of the operation and estimation fidelities.
#[derive(Clone, Copy, Debug)]
pub struct FidelityEstimates {
    pub operation: MonteCarloEstimate,
    pub estimation: MonteCarloEstimate,
}

fn random_direction<R: Rng>(rng: &mut R) -> [f64; 3] {
    let z: f64 = 2.0 * rng.gen::<f64>() - 1.0;
    let phi = std::f64::consts::TAU * rng.gen::<f64>();
    let s = (1.0 - z * z).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

/// Estimates (F, G) for the complete operation generated by a normalized
/// element A, with outcome elements sqrt(2j+1) U(Xi) A U†(Xi).
///
/// Input states and outcomes are drawn jointly: the input direction Omega
/// and the outcome label Xi are Haar-uniform proposals, weighted by the
/// outcome probability p = |A_Xi U(Omega)|j;j>|^2 (the weights integrate to
/// one by completeness). Per sample, F accumulates the weighted overlap of
/// the normalized post-operation state with the input via
/// 1/2 + <J along Omega>/N, and G the weighted overlap of the optimal guess
/// for the sampled outcome with the input direction. A vanishing guess
/// vector falls back to an explicit uniformly random guess.
pub fn estimate_fidelities(
    op: &OperationElement,
    options: &EstimateOptions,
) -> Result<FidelityEstimates> {
    if options.samples < 1000 {
        return Err(Error::TooFewSamples {
            samples: options.samples,
            min: 1000,
        });
    }
    op.ensure_unit_trace_norm()?;
    let two_j = op.two_j();
    let n_f = two_j as f64; // ensemble size N = 2j
    let dim = op.basis.dim() as f64;
    let ops = spin_operators(two_j);
    let rotation = SpinRotation::new(two_j)?;
    let gram = op.matrix.adjoint().mul(&op.matrix);

    let mut rng = StdRng::seed_from_u64(options.seed);
    let mut acc_f = Welford::default();
    let mut acc_g = Welford::default();
    let tau = std::f64::consts::TAU;
    for _ in 0..options.samples {
        let mut omega = haar_sample(&mut rng);
        let mut xi = haar_sample(&mut rng);
        omega.zeta = (omega.zeta + options.zeta_offset).rem_euclid(tau);
        xi.zeta = (xi.zeta + options.zeta_offset).rem_euclid(tau);

        let psi = rotation.highest_weight_state(&omega);
        let u = rotation.matrix(&xi);
        let u_dag = u.adjoint();

        // phi = A_Xi |psi>, unnormalized
        let mut phi = u.matvec(&op.matrix.matvec(&u_dag.matvec(&psi)));
        let scale = dim.sqrt();
        for z in &mut phi {
            *z *= scale;
        }
        let weight: f64 = phi.iter().map(|z| z.norm_sqr()).sum();

        let n_hat = omega.direction();
        let jn = ops
            .jx
            .scaled_re(n_hat[0])
            .add(&ops.jy.scaled_re(n_hat[1]))
            .add(&ops.jz.scaled_re(n_hat[2]));
        let along: Complex64 = phi
            .iter()
            .zip(jn.matvec(&phi))
            .map(|(a, b)| a.conj() * b)
            .sum();
        // weight * (1/2 + <Jn>/N) with <Jn> taken on the normalized state
        acc_f.push(0.5 * weight + along.re / n_f);

        let gram_xi = u.mul(&gram).mul(&u_dag);
        let guess = guess_from_gram(&gram_xi, &ops);
        let dir = guess
            .direction()
            .unwrap_or_else(|| random_direction(&mut rng));
        let overlap = 0.5 * (1.0 + dir[0] * n_hat[0] + dir[1] * n_hat[1] + dir[2] * n_hat[2]);
        acc_g.push(weight * overlap);
    }
    Ok(FidelityEstimates {
        operation: acc_f.estimate(options.seed),
        estimation: acc_g.estimate(options.seed),
    })
}

/// Entrywise deviation of a Monte-Carlo matrix mean from its target.
#[derive(Clone, Copy, Debug)]
pub struct EntrywiseDeviation {
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    /// max |mean - expected| over entries.
    pub max_abs_deviation: f64,
    /// max deviation measured in standard errors (over both complex parts).
    pub max_sigma_ratio: f64,
    pub passes_3sigma: bool,
}

struct MatrixAccumulator {
    dim: usize,
    re: Vec<Welford>,
    im: Vec<Welford>,
}

impl MatrixAccumulator {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            re: vec![Welford::default(); dim * dim],
            im: vec![Welford::default(); dim * dim],
        }
    }

    fn push(&mut self, sample: &ComplexMatrix) {
        for r in 0..self.dim {
            for c in 0..self.dim {
                let z = sample[(r, c)];
                self.re[r * self.dim + c].push(z.re);
                self.im[r * self.dim + c].push(z.im);
            }
        }
    }

    fn compare(&self, expected: &ComplexMatrix, seed: u64) -> EntrywiseDeviation {
        let mut max_abs: f64 = 0.0;
        let mut max_sigma: f64 = 0.0;
        let mut samples = 0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let idx = r * self.dim + c;
                samples = self.re[idx].n;
                let target = expected[(r, c)];
                let dev =
                    Complex64::new(self.re[idx].mean - target.re, self.im[idx].mean - target.im);
                max_abs = max_abs.max(dev.norm());
                for (part_dev, acc) in [(dev.re, &self.re[idx]), (dev.im, &self.im[idx])] {
                    let se = acc.std_error();
                    // Deviations at rounding level pass outright: entries
                    // with a deterministic integrand have no meaningful
                    // standard error to measure against.
                    let ratio = if part_dev.abs() <= 1e-12 {
                        0.0
                    } else if se == 0.0 || !se.is_finite() {
                        f64::INFINITY
                    } else {
                        part_dev.abs() / se
                    };
                    max_sigma = max_sigma.max(ratio);
                }
            }
        }
        EntrywiseDeviation {
            dim: self.dim,
            samples,
            seed,
            max_abs_deviation: max_abs,
            max_sigma_ratio: max_sigma,
            passes_3sigma: max_sigma <= 3.0,
        }
    }
}

/// Monte-Carlo check of one weighted projector integral.
#[derive(Clone, Copy, Debug)]
pub struct KTauReport {
    pub n_qubits: u32,
    pub tau: i32,
    pub deviation: EntrywiseDeviation,
}

/// Integrates k_tau(Omega) |Omega><Omega| over the Haar measure on the
/// symmetric subspace and compares entrywise against the closed form
/// J-/( (j+1)(2j+1) ) for tau = +1, J+ for tau = -1, and Jz for tau = 0,
/// with k_{-1} = e^{i phi} sin(theta), k_0 = cos(theta),
/// k_{+1} = e^{-i phi} sin(theta).
pub fn k_tau_check(n_qubits: u32, tau: i32, samples: usize, seed: u64) -> Result<KTauReport> {
    assert!((-1..=1).contains(&tau), "tau must be -1, 0, or 1");
    if n_qubits > 8 {
        return Err(Error::EnsembleTooLarge { n_qubits, max: 8 });
    }
    let rotation = SpinRotation::new(n_qubits)?;
    let basis = rotation.basis();
    let dim = basis.dim();
    let ops = spin_operators(n_qubits);
    let j = basis.j().value();
    let norm = 1.0 / ((j + 1.0) * (2.0 * j + 1.0));
    let expected = match tau {
        1 => ops.jminus.scaled_re(norm),
        -1 => ops.jplus.scaled_re(norm),
        _ => ops.jz.scaled_re(norm),
    };

    let mut rng = StdRng::seed_from_u64(seed);
    let mut acc = MatrixAccumulator::new(dim);
    let mut sample = ComplexMatrix::zeros(dim, dim);
    for _ in 0..samples {
        let omega = haar_sample(&mut rng);
        let psi = rotation.highest_weight_state(&omega);
        let k_value = match tau {
            0 => Complex64::new(omega.theta.cos(), 0.0),
            t => Complex64::from_polar(omega.theta.sin(), -(t as f64) * omega.phi),
        };
        for r in 0..dim {
            for c in 0..dim {
                sample[(r, c)] = k_value * psi[r] * psi[c].conj();
            }
        }
        acc.push(&sample);
    }
    Ok(KTauReport {
        n_qubits,
        tau,
        deviation: acc.compare(&expected, seed),
    })
}

/// Monte-Carlo check that the outcome-indexed operation built from one
/// element resolves the identity.
#[derive(Clone, Copy, Debug)]
pub struct CompletenessReport {
    pub n_qubits: u32,
    pub deviation: EntrywiseDeviation,
}

/// Integrates A_Xi† A_Xi = (2j+1) U(Xi) A†A U†(Xi) over Haar-distributed
/// outcome labels and compares against the identity on the symmetric
/// subspace. Requires Tr(A†A) = 1.
pub fn completeness_check(
    op: &OperationElement,
    samples: usize,
    seed: u64,
) -> Result<CompletenessReport> {
    op.ensure_unit_trace_norm()?;
    let rotation = SpinRotation::new(op.two_j())?;
    let dim = op.basis.dim();
    let gram = op.matrix.adjoint().mul(&op.matrix);
    let expected = ComplexMatrix::identity(dim);

    let mut rng = StdRng::seed_from_u64(seed);
    let mut acc = MatrixAccumulator::new(dim);
    for _ in 0..samples {
        let xi = haar_sample(&mut rng);
        let u = rotation.matrix(&xi);
        let sample = u.mul(&gram).mul(&u.adjoint()).scaled_re(dim as f64);
        acc.push(&sample);
    }
    Ok(CompletenessReport {
        n_qubits: op.two_j(),
        deviation: acc.compare(&expected, seed),
    })
}

/// Lifts an element mapping the spin-j subspace into a lower spin-j'
/// subspace to an element acting inside spin j, preserving g and the trace
/// norm while never decreasing f.
///
/// Entries must be real and nonnegative (the canonical phase convention)
/// and g of the source must be nonnegative; either violation is rejected.
/// The source rows are shifted up by j - j': row n of the result equals
/// source row n - j + j' for n >= j - 2j', zero otherwise.
pub fn promote(source: &ComplexMatrix, two_j: u32, two_jprime: u32) -> Result<OperationElement> {
    if two_jprime > two_j || !(two_j - two_jprime).is_multiple_of(2) {
        return Err(Error::InvalidSubspace {
            n_qubits: two_j,
            two_jprime,
        });
    }
    let out_basis = SpinBasis::new(two_jprime);
    let in_basis = SpinBasis::new(two_j);
    if source.rows() != out_basis.dim() || source.cols() != in_basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: out_basis.dim(),
            found: source.rows(),
        });
    }
    for r in 0..source.rows() {
        for c in 0..source.cols() {
            let z = source[(r, c)];
            if z.im != 0.0 || z.re < 0.0 {
                return Err(Error::NegativeEntries);
            }
        }
    }
    let (_, g) = mixed_fg(source, two_jprime, two_j)?;
    if g < 0.0 {
        return Err(Error::NegativeEstimation { g });
    }
    let dim = in_basis.dim();
    let mut lifted = ComplexMatrix::zeros(dim, dim);
    // row shift j - j' in doubled units
    let threshold = two_j as i32 - 2 * two_jprime as i32;
    for row in 0..dim {
        let n = in_basis.m_at(row);
        if n.twice() < threshold {
            continue;
        }
        let m_prime = HalfInteger::from_twice(n.twice() - two_j as i32 + two_jprime as i32);
        let src_row = out_basis.index_of(m_prime)?;
        for col in 0..dim {
            lifted[(row, col)] = source[(src_row, col)];
        }
    }
    OperationElement::new(two_j, lifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::sweep_point;
    use crate::stripe::{quadratic_forms, relevant_k_range, StripeIndex};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn stripe_operators_have_unit_trace_norm() {
        let mut rng = StdRng::seed_from_u64(1);
        for n in [1u32, 3, 8] {
            for &k in &relevant_k_range(n) {
                let idx = StripeIndex::new(n, k).unwrap();
                let a = StripeVector::random_unit(idx, &mut rng);
                let op = OperationElement::from_stripe(&a).unwrap();
                assert!((op.trace_norm() - 1.0).abs() < 1e-12);
            }
        }
        let idx = StripeIndex::new(2, 0).unwrap();
        let unnormalized = StripeVector::new(idx, vec![1.0, 1.0, 0.0]).unwrap();
        assert!(OperationElement::from_stripe(&unnormalized).is_err());
    }

    #[test]
    fn highest_basis_stripe_is_the_projector() {
        let idx = StripeIndex::new(4, 0).unwrap();
        let a = StripeVector::basis_vector(idx, idx.len() - 1);
        let op = OperationElement::from_stripe(&a).unwrap();
        let projector = OperationElement::highest_projector(4);
        assert!(op.matrix().sub(projector.matrix()).max_abs() < 1e-15);

        let uniform = OperationElement::from_stripe(&StripeVector::uniform(idx)).unwrap();
        let expected = ComplexMatrix::identity(5).scaled_re(1.0 / 5f64.sqrt());
        assert!(uniform.matrix().sub(&expected).max_abs() < 1e-15);
    }

    #[test]
    fn analytic_fg_on_reference_elements() {
        for n in [1u32, 2, 5] {
            let j = n as f64 / 2.0;
            let (f, g) = analytic_fg(&OperationElement::identity(n)).unwrap();
            assert!((f - j * (j + 1.0)).abs() < 1e-11, "N={n}");
            assert!(g.abs() < 1e-12);

            let (f, g) = analytic_fg(&OperationElement::highest_projector(n)).unwrap();
            assert!((f - j * j).abs() < 1e-11);
            assert!((g - j).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_route_matches_stripe_quadratic_forms() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..200 {
            let n = rng.gen_range(1..=12u32);
            let ks = relevant_k_range(n);
            let k = ks[rng.gen_range(0..ks.len())];
            let idx = StripeIndex::new(n, k).unwrap();
            let a = StripeVector::random_signed_unit(idx, &mut rng)
                .normalized()
                .unwrap();
            let q = quadratic_forms(&a);
            let op = OperationElement::from_stripe(&a).unwrap();
            let (f, g) = analytic_fg(&op).unwrap();
            assert!((f - q.f).abs() < 1e-11, "n={n} k={k}");
            assert!((g - q.g).abs() < 1e-11, "n={n} k={k}");
        }
    }

    #[test]
    fn guess_for_reference_elements() {
        let guess = optimal_guess(&OperationElement::highest_projector(6));
        assert!(guess.ax.abs() < 1e-13 && guess.ay.abs() < 1e-13);
        assert!((guess.az - 3.0).abs() < 1e-12);
        assert_eq!(guess.direction().unwrap(), [0.0, 0.0, 1.0]);

        let flat = optimal_guess(&OperationElement::identity(6));
        assert!(flat.is_random_guess());
    }

    #[test]
    fn guess_vector_rotates_covariantly() {
        let mut rng = StdRng::seed_from_u64(3007);
        let rotation = SpinRotation::new(4).unwrap();
        for _ in 0..20 {
            let idx = StripeIndex::new(4, 1).unwrap();
            let a = StripeVector::random_unit(idx, &mut rng);
            let op = OperationElement::from_stripe(&a).unwrap();
            let base = optimal_guess(&op);
            let omega = haar_sample(&mut rng);
            let rotated_guess = optimal_guess(&op.rotated(&rotation, &omega));

            // R(omega) = Rz(phi) Ry(theta) Rz(zeta) acting on the vector
            let apply = |v: [f64; 3]| {
                let rz = |v: [f64; 3], a: f64| {
                    [
                        a.cos() * v[0] - a.sin() * v[1],
                        a.sin() * v[0] + a.cos() * v[1],
                        v[2],
                    ]
                };
                let ry = |v: [f64; 3], a: f64| {
                    [
                        a.cos() * v[0] + a.sin() * v[2],
                        v[1],
                        -a.sin() * v[0] + a.cos() * v[2],
                    ]
                };
                rz(ry(rz(v, omega.zeta), omega.theta), omega.phi)
            };
            let expected = apply([base.ax, base.ay, base.az]);
            assert!((rotated_guess.ax - expected[0]).abs() < 1e-10);
            assert!((rotated_guess.ay - expected[1]).abs() < 1e-10);
            assert!((rotated_guess.az - expected[2]).abs() < 1e-10);
        }
    }

    #[test]
    fn alignment_reconciles_the_two_estimation_forms() {
        let mut rng = StdRng::seed_from_u64(555);
        let rotation = SpinRotation::new(5).unwrap();
        for _ in 0..10 {
            let idx = StripeIndex::new(5, 1).unwrap();
            let a = StripeVector::random_unit(idx, &mut rng);
            // rotate away from the aligned frame
            let op = OperationElement::from_stripe(&a)
                .unwrap()
                .rotated(&rotation, &haar_sample(&mut rng));

            let sqrt_form = guess_norm_g(&op).unwrap();
            let aligned = align_to_guess(&op).unwrap();
            let (f_aligned, g_aligned) = analytic_fg(&aligned).unwrap();
            let (f_raw, _) = analytic_fg(&op).unwrap();
            assert!((g_aligned - sqrt_form).abs() < 1e-10);
            // f is rotation invariant, alignment included
            assert!((f_aligned - f_raw).abs() < 1e-10);
        }
    }

    #[test]
    fn f_is_rotation_invariant() {
        let mut rng = StdRng::seed_from_u64(808);
        let rotation = SpinRotation::new(6).unwrap();
        let idx = StripeIndex::new(6, 2).unwrap();
        for _ in 0..10 {
            let a = StripeVector::random_unit(idx, &mut rng);
            let op = OperationElement::from_stripe(&a).unwrap();
            let (f0, _) = analytic_fg(&op).unwrap();
            let (f1, _) = analytic_fg(&op.rotated(&rotation, &haar_sample(&mut rng))).unwrap();
            assert!((f0 - f1).abs() < 1e-10);
        }
    }

    #[test]
    fn estimates_recover_the_identity_endpoint() {
        let op = OperationElement::identity(2);
        let est = estimate_fidelities(&op, &EstimateOptions::new(20_000, 42)).unwrap();
        assert!((est.operation.mean - 1.0).abs() <= 3.0 * est.operation.std_error + 1e-12);
        assert!((est.estimation.mean - 0.5).abs() <= 3.0 * est.estimation.std_error);
        assert!(est.estimation.std_error > 0.0);
    }

    #[test]
    fn estimates_recover_the_projector_endpoint() {
        let op = OperationElement::highest_projector(2);
        let est = estimate_fidelities(&op, &EstimateOptions::new(30_000, 43)).unwrap();
        assert!((est.operation.mean - 0.75).abs() <= 3.0 * est.operation.std_error);
        assert!((est.estimation.mean - 0.75).abs() <= 3.0 * est.estimation.std_error);
    }

    #[test]
    fn estimates_match_an_interior_sweep_point() {
        let (point, a) = sweep_point(2, 0, 0.5).unwrap();
        let op = OperationElement::from_stripe(&a).unwrap();
        let est = estimate_fidelities(&op, &EstimateOptions::new(40_000, 44)).unwrap();
        assert!(
            (est.operation.mean - point.op_fidelity).abs() <= 3.0 * est.operation.std_error,
            "F: {} vs {}",
            est.operation.mean,
            point.op_fidelity
        );
        assert!(
            (est.estimation.mean - point.est_fidelity).abs() <= 3.0 * est.estimation.std_error,
            "G: {} vs {}",
            est.estimation.mean,
            point.est_fidelity
        );
    }

    #[test]
    fn estimates_are_invariant_under_zeta_offsets() {
        let (_, a) = sweep_point(2, 0, 0.3).unwrap();
        let op = OperationElement::from_stripe(&a).unwrap();
        let base = estimate_fidelities(&op, &EstimateOptions::new(20_000, 7)).unwrap();
        let mut options = EstimateOptions::new(20_000, 7);
        options.zeta_offset = 1.234;
        let shifted = estimate_fidelities(&op, &options).unwrap();
        assert!((base.operation.mean - shifted.operation.mean).abs() <= base.operation.std_error);
        assert!(
            (base.estimation.mean - shifted.estimation.mean).abs() <= base.estimation.std_error
        );
    }

    #[test]
    fn estimate_rejects_bad_inputs() {
        let op = OperationElement::identity(2);
        assert!(matches!(
            estimate_fidelities(&op, &EstimateOptions::new(10, 1)),
            Err(Error::TooFewSamples { .. })
        ));
        let unnormalized = OperationElement::new(2, ComplexMatrix::identity(3)).unwrap();
        assert!(matches!(
            estimate_fidelities(&unnormalized, &EstimateOptions::new(2000, 1)),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn weighted_projector_integrals_small_cases() {
        // N = 1, tau = 0: diag(-1/2, 1/2) / 3
        let report = k_tau_check(1, 0, 30_000, 11).unwrap();
        assert!(report.deviation.passes_3sigma, "{report:?}");

        // N = 2, tau = +1: J- / 6
        let report = k_tau_check(2, 1, 30_000, 12).unwrap();
        assert!(report.deviation.passes_3sigma, "{report:?}");

        let report = k_tau_check(2, -1, 30_000, 13).unwrap();
        assert!(report.deviation.passes_3sigma, "{report:?}");

        assert!(k_tau_check(9, 0, 1000, 1).is_err());
    }

    #[test]
    fn completeness_is_exact_for_the_identity_element() {
        let op = OperationElement::identity(3);
        let report = completeness_check(&op, 500, 2).unwrap();
        assert!(report.deviation.max_abs_deviation < 1e-12);
        assert!(report.deviation.passes_3sigma);
    }

    #[test]
    fn completeness_holds_for_random_stripe_elements() {
        let mut rng = StdRng::seed_from_u64(77);
        let idx = StripeIndex::new(3, 1).unwrap();
        let a = StripeVector::random_unit(idx, &mut rng);
        let op = OperationElement::from_stripe(&a).unwrap();
        let report = completeness_check(&op, 30_000, 15).unwrap();
        assert!(report.deviation.passes_3sigma, "{report:?}");
    }

    #[test]
    fn completeness_deviation_shrinks_with_sample_count() {
        let mut rng = StdRng::seed_from_u64(88);
        let idx = StripeIndex::new(2, 0).unwrap();
        let a = StripeVector::random_unit(idx, &mut rng);
        let op = OperationElement::from_stripe(&a).unwrap();
        let small = completeness_check(&op, 10_000, 6).unwrap();
        let large = completeness_check(&op, 40_000, 6).unwrap();
        let ratio = small.deviation.max_abs_deviation / large.deviation.max_abs_deviation;
        assert!(
            (1.5..=2.7).contains(&ratio),
            "expected roughly sqrt(4) shrink, got {ratio}"
        );
    }

    fn random_nonneg_rect(rng: &mut StdRng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| c(rng.gen::<f64>(), 0.0))
    }

    #[test]
    fn promotion_at_equal_spin_is_the_identity_map() {
        let mut rng = StdRng::seed_from_u64(9);
        let src = random_nonneg_rect(&mut rng, 4, 4);
        // make sure g >= 0: tilt towards the top state
        let mut src = src;
        src[(3, 3)] += c(3.0, 0.0);
        let promoted = promote(&src, 3, 3).unwrap();
        assert!(promoted.matrix().sub(&src).max_abs() < 1e-15);
    }

    #[test]
    fn promotion_preserves_g_and_trace_and_improves_f() {
        let mut rng = StdRng::seed_from_u64(10);
        let mut checked = 0;
        while checked < 40 {
            let two_j = rng.gen_range(2..=8u32);
            let step = rng.gen_range(1..=two_j / 2);
            let two_jp = two_j - 2 * step;
            let src = random_nonneg_rect(&mut rng, two_jp as usize + 1, two_j as usize + 1);
            let Ok((f_src, g_src)) = mixed_fg(&src, two_jp, two_j) else {
                continue;
            };
            if g_src < 0.0 {
                assert!(matches!(
                    promote(&src, two_j, two_jp),
                    Err(Error::NegativeEstimation { .. })
                ));
                continue;
            }
            let promoted = promote(&src, two_j, two_jp).unwrap();
            let (f_new, g_new) = analytic_fg(&promoted).unwrap();
            let trace_src = src.adjoint().mul(&src).trace().re;
            assert!((g_new - g_src).abs() < 1e-10);
            assert!((promoted.trace_norm() - trace_src).abs() < 1e-10);
            let gain = (two_j - two_jp) as f64 / 2.0 * g_src;
            assert!(
                f_new >= f_src + gain - 1e-10,
                "f {f_new} vs {} (gain {gain})",
                f_src
            );
            checked += 1;
        }
    }

    #[test]
    fn promotion_rejects_bad_sources() {
        let mut bad = ComplexMatrix::zeros(2, 4);
        bad[(0, 0)] = c(-1.0, 0.0);
        assert!(matches!(promote(&bad, 3, 1), Err(Error::NegativeEntries)));
        let mut complex_entry = ComplexMatrix::zeros(2, 4);
        complex_entry[(0, 0)] = c(1.0, 0.5);
        assert!(promote(&complex_entry, 3, 1).is_err());
        let ok = ComplexMatrix::zeros(2, 4);
        assert!(promote(&ok, 4, 1).is_err(), "parity mismatch");
    }
}
