//! Stripe vectors and their quadratic forms.
//!
//! An operation element acting inside the fully symmetric spin-j subspace
//! decomposes into diagonal stripes: the k-th stripe collects the matrix
//! elements `<j; m-k | A | j; m>`. On a single normalized stripe the three
//! quantities that drive the trade-off (f, g, h) are quadratic forms, and
//! maximizing f + lambda*g reduces to the extremal eigenvector of a real
//! symmetric tridiagonal pencil built here.

use rand::Rng;

use crate::half::HalfInteger;
use crate::{Error, Result};

/// Identifies one stripe: the subspace size and the shift k.
///
/// The stripe with shift k covers m = l..u with l = -j + max(0, k) and
/// u = j + min(k, 0); its length is 2j + 1 - |k|.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StripeIndex {
    two_j: u32,
    k: i32,
}

impl StripeIndex {
    pub fn new(two_j: u32, k: i32) -> Result<Self> {
        if k.unsigned_abs() > two_j {
            return Err(Error::InvalidShift { two_j, k });
        }
        Ok(Self { two_j, k })
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn k(&self) -> i32 {
        self.k
    }

    pub fn j(&self) -> HalfInteger {
        HalfInteger::from_twice(self.two_j as i32)
    }

    /// Lowest column label m of the stripe.
    pub fn lower(&self) -> HalfInteger {
        HalfInteger::from_twice(-(self.two_j as i32) + 2 * self.k.max(0))
    }

    /// Highest column label m of the stripe.
    pub fn upper(&self) -> HalfInteger {
        HalfInteger::from_twice(self.two_j as i32 + 2 * self.k.min(0))
    }

    pub fn len(&self) -> usize {
        (self.two_j + 1 - self.k.unsigned_abs()) as usize
    }

    pub fn is_empty(&self) -> bool {
        false // length is always >= 1 for |k| <= 2j
    }

    pub fn m_at(&self, offset: usize) -> HalfInteger {
        debug_assert!(offset < self.len());
        self.lower().plus_int(offset as i32)
    }

    pub fn offset_of(&self, m: HalfInteger) -> Result<usize> {
        let d = (m - self.lower()).twice();
        if d < 0 || d % 2 != 0 || (d / 2) as usize >= self.len() {
            return Err(Error::OutsideStripe {
                two_j: self.two_j,
                k: self.k,
                twice_m: m.twice(),
            });
        }
        Ok((d / 2) as usize)
    }

    /// The same stripe geometry with the shift negated.
    pub fn opposite(&self) -> StripeIndex {
        StripeIndex {
            two_j: self.two_j,
            k: -self.k,
        }
    }
}

/// Coupling coefficient between neighbouring stripe entries:
/// sqrt((j-m)(j+m+1)(j+k-m)(j-k+m+1)).
///
/// Valid for l <= m <= u-1; all four factors are then nonnegative integers
/// (or integers plus exact quarters), evaluated exactly before the square
/// root.
pub fn gamma(two_j: u32, k: i32, m: HalfInteger) -> Result<f64> {
    let index = StripeIndex::new(two_j, k)?;
    if m < index.lower() || m >= index.upper() {
        return Err(Error::OutsideStripe {
            two_j,
            k,
            twice_m: m.twice(),
        });
    }
    // In doubled units every factor is even, so these are exact integers.
    let tj = two_j as i64;
    let tm = m.twice() as i64;
    let k = k as i64;
    let p1 = (tj - tm) / 2;
    let p2 = (tj + tm) / 2 + 1;
    let p3 = p1 + k;
    let p4 = p2 - k;
    debug_assert!(p1 >= 0 && p2 >= 0 && p3 >= 0 && p4 >= 0);
    Ok(((p1 * p2 * p3 * p4) as f64).sqrt())
}

/// One diagonal stripe of an operation element, stored as real values.
#[derive(Clone, Debug)]
pub struct StripeVector {
    index: StripeIndex,
    values: Vec<f64>,
}

impl StripeVector {
    pub fn new(index: StripeIndex, values: Vec<f64>) -> Result<Self> {
        if values.len() != index.len() {
            return Err(Error::DimensionMismatch {
                expected: index.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { index, values })
    }

    pub fn index(&self) -> StripeIndex {
        self.index
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// All entries nonnegative (the canonical phase convention).
    pub fn is_canonical(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sq() - 1.0).abs() <= 1e-12
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sq().sqrt();
        if n == 0.0 {
            return Err(Error::ZeroOperator);
        }
        for v in &mut self.values {
            *v /= n;
        }
        Ok(self)
    }

    /// The stripe with shift -k carrying the same entries in the same order.
    pub fn with_opposite_shift(&self) -> StripeVector {
        StripeVector {
            index: self.index.opposite(),
            values: self.values.clone(),
        }
    }

    /// Unit vector concentrated on a single stripe position.
    pub fn basis_vector(index: StripeIndex, offset: usize) -> Self {
        let mut values = vec![0.0; index.len()];
        values[offset] = 1.0;
        Self { index, values }
    }

    /// The uniform unit vector 1/sqrt(len) * (1, ..., 1).
    pub fn uniform(index: StripeIndex) -> Self {
        let v = 1.0 / (index.len() as f64).sqrt();
        Self {
            index,
            values: vec![v; index.len()],
        }
    }

    /// Random unit stripe with nonnegative entries.
    pub fn random_unit<R: Rng>(index: StripeIndex, rng: &mut R) -> Self {
        loop {
            let values: Vec<f64> = (0..index.len()).map(|_| rng.gen::<f64>()).collect();
            let n: f64 = values.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 1e-6 {
                return Self {
                    index,
                    values: values.into_iter().map(|v| v / n).collect(),
                };
            }
        }
    }

    /// Random unit stripe with signed entries (non-canonical).
    pub fn random_signed_unit<R: Rng>(index: StripeIndex, rng: &mut R) -> Self {
        loop {
            let values: Vec<f64> = (0..index.len())
                .map(|_| 2.0 * rng.gen::<f64>() - 1.0)
                .collect();
            let n: f64 = values.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 1e-6 {
                return Self {
                    index,
                    values: values.into_iter().map(|v| v / n).collect(),
                };
            }
        }
    }
}

/// Real symmetric tridiagonal matrix, stored as diagonal plus off-diagonal.
///
/// The quadratic form is a^T M a = sum diag_i a_i^2 + 2 sum offdiag_i a_i a_{i+1}.
#[derive(Clone, Debug)]
pub struct SymmetricTridiagonal {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymmetricTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch {
                expected: diag.len().max(1).saturating_sub(1),
                found: offdiag.len(),
            });
        }
        if diag.iter().chain(offdiag.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn quadratic_form(&self, a: &[f64]) -> f64 {
        assert_eq!(a.len(), self.dim());
        let diagonal: f64 = self.diag.iter().zip(a).map(|(d, v)| d * v * v).sum();
        let coupling: f64 = self
            .offdiag
            .iter()
            .zip(a.windows(2))
            .map(|(o, w)| 2.0 * o * w[0] * w[1])
            .sum();
        diagonal + coupling
    }

    pub fn matvec(&self, a: &[f64]) -> Vec<f64> {
        assert_eq!(a.len(), self.dim());
        let n = self.dim();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * a[i];
            if i > 0 {
                acc += self.offdiag[i - 1] * a[i - 1];
            }
            if i + 1 < n {
                acc += self.offdiag[i] * a[i + 1];
            }
            out[i] = acc;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.diag
            .iter()
            .chain(self.offdiag.iter())
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }

    /// (1-x) * self + x * rhs.
    pub fn blend(&self, rhs: &Self, x: f64) -> Result<Self> {
        if rhs.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rhs.dim(),
            });
        }
        let diag = self
            .diag
            .iter()
            .zip(&rhs.diag)
            .map(|(a, b)| (1.0 - x) * a + x * b)
            .collect();
        let offdiag = self
            .offdiag
            .iter()
            .zip(&rhs.offdiag)
            .map(|(a, b)| (1.0 - x) * a + x * b)
            .collect();
        SymmetricTridiagonal::new(diag, offdiag)
    }

    /// self + t * rhs (the Lagrange pencil form).
    pub fn add_scaled(&self, rhs: &Self, t: f64) -> Result<Self> {
        if rhs.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rhs.dim(),
            });
        }
        let diag = self
            .diag
            .iter()
            .zip(&rhs.diag)
            .map(|(a, b)| a + t * b)
            .collect();
        let offdiag = self
            .offdiag
            .iter()
            .zip(&rhs.offdiag)
            .map(|(a, b)| a + t * b)
            .collect();
        SymmetricTridiagonal::new(diag, offdiag)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        for (i, d) in self.diag.iter().enumerate() {
            m[i][i] = *d;
        }
        for (i, o) in self.offdiag.iter().enumerate() {
            m[i][i + 1] = *o;
            m[i + 1][i] = *o;
        }
        m
    }
}

/// The tridiagonal pair whose quadratic forms reproduce f and g on stripe k.
#[derive(Clone, Debug)]
pub struct StripeMatrices {
    /// Diagonal m(m-k), off-diagonal gamma/2.
    pub f: SymmetricTridiagonal,
    /// Diagonal m, no off-diagonal.
    pub g: SymmetricTridiagonal,
}

/// Builds the matrix pair for shift k >= 0.
///
/// Every off-diagonal entry of the f matrix is gamma/2 so that the quadratic
/// form contract a^T F a = f(a) holds entrywise against [`quadratic_forms`].
pub fn build_matrices(two_j: u32, k: i32) -> Result<StripeMatrices> {
    if k < 0 {
        return Err(Error::InvalidShift { two_j, k });
    }
    let index = StripeIndex::new(two_j, k)?;
    let n = index.len();
    let mut f_diag = Vec::with_capacity(n);
    let mut g_diag = Vec::with_capacity(n);
    let mut f_off = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        let m = index.m_at(i);
        // m(m-k) in exact quarters.
        let tm = m.twice() as i64;
        f_diag.push((tm * (tm - 2 * k as i64)) as f64 / 4.0);
        g_diag.push(m.value());
        if i + 1 < n {
            f_off.push(gamma(two_j, k, m)? / 2.0);
        }
    }
    Ok(StripeMatrices {
        f: SymmetricTridiagonal::new(f_diag, f_off)?,
        g: SymmetricTridiagonal::new(g_diag, vec![0.0; n - 1])?,
    })
}

/// The three stripe quadratic forms evaluated by direct summation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticForms {
    pub f: f64,
    pub g: f64,
    pub h: f64,
}

/// Direct-summation evaluation of (f, g, h), independent of
/// [`build_matrices`]; the two routes cross-check each other.
pub fn quadratic_forms(a: &StripeVector) -> QuadraticForms {
    let index = a.index();
    let k = index.k() as i64;
    let vals = a.values();
    let mut f = 0.0;
    let mut g = 0.0;
    let mut h = 0.0;
    for (i, &v) in vals.iter().enumerate() {
        let m = index.m_at(i);
        let tm = m.twice() as i64;
        f += (tm * (tm - 2 * k)) as f64 / 4.0 * v * v;
        g += m.value() * v * v;
        h += v * v;
    }
    for i in 0..vals.len().saturating_sub(1) {
        let m = index.m_at(i);
        let coupling = gamma(index.two_j(), index.k(), m)
            .expect("stripe positions below the upper edge admit a coupling");
        f += coupling * vals[i] * vals[i + 1];
    }
    QuadraticForms { f, g, h }
}

/// Shifts worth sweeping for an ensemble of `n_qubits`: 0 <= k < sqrt(N),
/// i.e. the ceil(sqrt(N)) values {0, ..., ceil(sqrt(N)) - 1}.
///
/// Negative shifts are dominated (their curves shift towards lower g) and
/// k >= sqrt(N) curves stay below the minimum of the k = 0 curve.
pub fn relevant_k_range(n_qubits: u32) -> Vec<i32> {
    let isqrt = n_qubits.isqrt();
    let ceil_sqrt = if isqrt * isqrt == n_qubits {
        isqrt
    } else {
        isqrt + 1
    };
    (0..ceil_sqrt.max(1))
        .map(|k| k as i32)
        .filter(|&k| (k as u32) <= n_qubits)
        .collect()
}

/// Evaluates (f, g) for the opposite-shift stripe carrying the same entries.
///
/// For k < 0 this certifies the shift identity: f is unchanged and g moves
/// up by -k, which is why negative shifts never appear in the sweep.
pub fn negative_k_shift(a: &StripeVector) -> Result<(f64, f64)> {
    if a.index().k() >= 0 {
        return Err(Error::InvalidShift {
            two_j: a.index().two_j(),
            k: a.index().k(),
        });
    }
    let forms = quadratic_forms(&a.with_opposite_shift());
    Ok((forms.f, forms.g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn half(twice: i32) -> HalfInteger {
        HalfInteger::from_twice(twice)
    }

    #[test]
    fn stripe_geometry() {
        // two_j = 4 (j = 2), k = 1: m runs -1..2, length 4.
        let idx = StripeIndex::new(4, 1).unwrap();
        assert_eq!(idx.lower(), half(-2));
        assert_eq!(idx.upper(), half(4));
        assert_eq!(idx.len(), 4);
        assert_eq!(idx.m_at(0), half(-2));
        assert_eq!(idx.offset_of(half(2)).unwrap(), 2);
        assert!(idx.offset_of(half(-4)).is_err());
        assert!(idx.offset_of(half(1)).is_err()); // not a projection on this stripe

        // k = -1 mirrors the range.
        let neg = StripeIndex::new(4, -1).unwrap();
        assert_eq!(neg.lower(), half(-4));
        assert_eq!(neg.upper(), half(2));
        assert_eq!(neg.len(), idx.len());

        assert!(StripeIndex::new(2, 3).is_err());
    }

    #[test]
    fn gamma_small_cases() {
        // j = 1/2, k = 0, m = -1/2: all four factors are 1.
        assert_eq!(gamma(1, 0, half(-1)).unwrap(), 1.0);
        // j = 1, k = 1, m = 0: factors 1*2*2*1.
        assert_eq!(gamma(2, 1, half(0)).unwrap(), 2.0);
        // out of the stripe range
        assert!(gamma(1, 0, half(1)).is_err());
    }

    #[test]
    fn gamma_is_symmetric_under_index_reflection() {
        // gamma_m = gamma_{k-1-m}: the four factors swap pairwise.
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let two_j = rng.gen_range(1..=20u32);
            let k = rng.gen_range(0..=two_j.min(6)) as i32;
            let idx = StripeIndex::new(two_j, k).unwrap();
            if idx.len() < 2 {
                continue;
            }
            let off = rng.gen_range(0..idx.len() - 1);
            let m = idx.m_at(off);
            let reflected = HalfInteger::from_int(k - 1) - m;
            if reflected < idx.lower() || reflected >= idx.upper() {
                continue;
            }
            let a = gamma(two_j, k, m).unwrap();
            let b = gamma(two_j, k, reflected).unwrap();
            assert!((a - b).abs() < 1e-12, "two_j={two_j} k={k} m={m}");
        }
    }

    #[test]
    fn matrices_for_single_qubit() {
        // j = 1/2, k = 0: F = [[1/4, 1/2], [1/2, 1/4]], G = diag(-1/2, 1/2).
        let m = build_matrices(1, 0).unwrap();
        assert_eq!(m.f.diag(), &[0.25, 0.25]);
        assert_eq!(m.f.offdiag(), &[0.5]);
        assert_eq!(m.g.diag(), &[-0.5, 0.5]);
        assert_eq!(m.g.offdiag(), &[0.0]);
    }

    #[test]
    fn matrices_for_maximal_shift() {
        // j = 1, k = 2: single stripe element at m = 1, m(m-2) = -1.
        let m = build_matrices(2, 2).unwrap();
        assert_eq!(m.f.dim(), 1);
        assert_eq!(m.f.diag(), &[-1.0]);
        assert_eq!(m.g.diag(), &[1.0]);
        assert!(build_matrices(2, 3).is_err());
        assert!(build_matrices(2, -1).is_err());
    }

    #[test]
    fn quadratic_forms_extreme_vectors() {
        for two_j in [1u32, 2, 5, 9] {
            let j = two_j as f64 / 2.0;
            let idx = StripeIndex::new(two_j, 0).unwrap();
            // concentrated at m = j: f = j^2, g = j, h = 1
            let top = StripeVector::basis_vector(idx, idx.len() - 1);
            let q = quadratic_forms(&top);
            assert!((q.f - j * j).abs() < 1e-12);
            assert!((q.g - j).abs() < 1e-12);
            assert!((q.h - 1.0).abs() < 1e-12);
            // uniform: f = j(j+1) (the bound is attained at k = 0)
            let q = quadratic_forms(&StripeVector::uniform(idx));
            assert!((q.f - j * (j + 1.0)).abs() < 1e-11);
        }
    }

    #[test]
    fn quadratic_forms_two_entry_family() {
        // a = (sin chi, 0, ..., 0, cos chi) gives g = j cos(2 chi).
        for two_j in [2u32, 7] {
            let idx = StripeIndex::new(two_j, 0).unwrap();
            let j = two_j as f64 / 2.0;
            for chi in [0.0, 0.3, std::f64::consts::FRAC_PI_4] {
                let mut values = vec![0.0; idx.len()];
                values[0] = chi.sin();
                *values.last_mut().unwrap() = chi.cos();
                let a = StripeVector::new(idx, values).unwrap();
                let q = quadratic_forms(&a);
                assert!((q.g - j * (2.0 * chi).cos()).abs() < 1e-12);
                assert!(q.f >= j * j - 1e-12);
            }
        }
    }

    #[test]
    fn matrix_route_matches_direct_summation() {
        let mut rng = StdRng::seed_from_u64(2024);
        for _ in 0..500 {
            let n = rng.gen_range(1..=20u32);
            let ks = relevant_k_range(n);
            let k = ks[rng.gen_range(0..ks.len())];
            let idx = StripeIndex::new(n, k).unwrap();
            let a = StripeVector::random_unit(idx, &mut rng);
            let q = quadratic_forms(&a);
            let m = build_matrices(n, k).unwrap();
            assert!((m.f.quadratic_form(a.values()) - q.f).abs() < 1e-11);
            assert!((m.g.quadratic_form(a.values()) - q.g).abs() < 1e-11);
            assert!((q.h - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn f_respects_upper_bound_and_g_range() {
        let mut rng = StdRng::seed_from_u64(99);
        for n in 1..=20u32 {
            let j = n as f64 / 2.0;
            for &k in &relevant_k_range(n) {
                let idx = StripeIndex::new(n, k).unwrap();
                for _ in 0..50 {
                    let a = StripeVector::random_signed_unit(idx, &mut rng);
                    let q = quadratic_forms(&a);
                    let bound = j * (j + 1.0) - (k * k) as f64 / 2.0;
                    assert!(q.f <= bound + 1e-11, "n={n} k={k} f={} bound={bound}", q.f);
                    assert!(q.g >= -j - 1e-12 && q.g <= idx.upper().value() + 1e-12);
                }
            }
        }
    }

    #[test]
    fn relevant_range_examples() {
        assert_eq!(relevant_k_range(1), vec![0]);
        assert_eq!(relevant_k_range(10), vec![0, 1, 2, 3]);
        assert_eq!(relevant_k_range(100), (0..10).collect::<Vec<_>>());
        for n in 1..=200u32 {
            let len = relevant_k_range(n).len() as u32;
            let isqrt = n.isqrt();
            let expect = if isqrt * isqrt == n { isqrt } else { isqrt + 1 };
            assert_eq!(len, expect, "ceil(sqrt({n}))");
        }
    }

    #[test]
    fn opposite_shift_identities() {
        // j = 1, k = -1, a = (1, 0): f unchanged, g shifted by -k.
        let idx = StripeIndex::new(2, -1).unwrap();
        let a = StripeVector::new(idx, vec![1.0, 0.0]).unwrap();
        let q = quadratic_forms(&a);
        let (f_pos, g_pos) = negative_k_shift(&a).unwrap();
        assert!((f_pos - q.f).abs() < 1e-12);
        assert!((g_pos - (q.g + 1.0)).abs() < 1e-12);

        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(1..=16u32);
            let k = -(rng.gen_range(1..=n.min(5)) as i32);
            let idx = StripeIndex::new(n, k).unwrap();
            assert_eq!(idx.len(), idx.opposite().len());
            let a = StripeVector::random_signed_unit(idx, &mut rng);
            let q = quadratic_forms(&a);
            let (f_pos, g_pos) = negative_k_shift(&a).unwrap();
            assert!((f_pos - q.f).abs() < 1e-12);
            assert!((g_pos - (q.g - k as f64)).abs() < 1e-12);
        }

        let nonneg = StripeVector::uniform(StripeIndex::new(2, 0).unwrap());
        assert!(negative_k_shift(&nonneg).is_err());
    }

    #[test]
    fn normalization_and_canonical_flags() {
        let idx = StripeIndex::new(3, 0).unwrap();
        let a = StripeVector::new(idx, vec![2.0, 0.0, -1.0, 0.0]).unwrap();
        assert!(!a.is_canonical());
        assert!(!a.is_normalized());
        let a = a.normalized().unwrap();
        assert!(a.is_normalized());
        assert!(StripeVector::new(idx, vec![1.0]).is_err());
        assert!(StripeVector::new(idx, vec![f64::NAN; 4]).is_err());
    }
}
