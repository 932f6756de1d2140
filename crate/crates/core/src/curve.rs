//! Trade-off curves and their envelope.
//!
//! For each admissible shift k the boundary of the reachable (f, g) region is
//! traced by the top eigenvector of the pencil (1-x) F + x G with the sweep
//! variable x in [0, 1] standing in for the multiplier lambda = x / (1-x).
//! Mapped through the affine fidelity relations this yields the (F, G)
//! trade-off curve; the envelope over all relevant k bounds the region
//! allowed by quantum mechanics.

use crate::eigen::max_eigenpair;
use crate::stripe::{build_matrices, relevant_k_range, StripeIndex, StripeVector};
use crate::{Error, Result};

/// One sample of a trade-off curve.
#[derive(Clone, Copy, Debug)]
pub struct TradeoffPoint {
    pub k: i32,
    /// Sweep variable in [0, 1].
    pub x: f64,
    /// Lagrange multiplier x / (1-x); infinite at x = 1.
    pub lambda: f64,
    pub f: f64,
    pub g: f64,
    /// Operation fidelity F = 1/2 + f / (2 j (j+1)).
    pub op_fidelity: f64,
    /// Estimation fidelity G = 1/2 + g / (2 (j+1)).
    pub est_fidelity: f64,
    pub top_eigenvalue: f64,
    pub degenerate: bool,
}

/// Maps (f, g) to the fidelity pair (F, G) for an ensemble of N qubits.
pub fn fidelities(n_qubits: u32, f: f64, g: f64) -> (f64, f64) {
    let j = n_qubits as f64 / 2.0;
    let big_f = 0.5 + f / (2.0 * j * (j + 1.0));
    let big_g = 0.5 + g / (2.0 * (j + 1.0));
    (big_f, big_g)
}

/// Uniform sweep grid on [0, 1] with exact endpoints.
pub fn uniform_x_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2);
    (0..points)
        .map(|i| i as f64 / (points - 1) as f64)
        .collect()
}

/// The default 401-point grid resolves the curvature even at N = 100.
pub fn default_x_grid() -> Vec<f64> {
    uniform_x_grid(401)
}

/// Solves one sweep point, returning both the curve sample and the
/// optimizing stripe vector.
///
/// x = 1 is the diagonal limit and is handled exactly: the optimizer is the
/// basis vector at the top of the stripe, giving g = j and f = j(j-k).
pub fn sweep_point(n_qubits: u32, k: i32, x: f64) -> Result<(TradeoffPoint, StripeVector)> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::GridNotSorted);
    }
    let index = StripeIndex::new(n_qubits, k)?;
    let matrices = build_matrices(n_qubits, k)?;
    let (a, top_eigenvalue, degenerate) = if x == 1.0 {
        let a = StripeVector::basis_vector(index, index.len() - 1);
        (a, index.upper().value(), false)
    } else {
        let blend = matrices.f.blend(&matrices.g, x)?;
        let pair = max_eigenpair(&blend)?;
        let a = StripeVector::new(index, pair.vector)?;
        (a, pair.value, pair.degenerate)
    };
    let f = matrices.f.quadratic_form(a.values());
    let g = matrices.g.quadratic_form(a.values());
    let (op_fidelity, est_fidelity) = fidelities(n_qubits, f, g);
    let lambda = if x == 1.0 {
        f64::INFINITY
    } else {
        x / (1.0 - x)
    };
    Ok((
        TradeoffPoint {
            k,
            x,
            lambda,
            f,
            g,
            op_fidelity,
            est_fidelity,
            top_eigenvalue,
            degenerate,
        },
        a,
    ))
}

/// A full trade-off curve for one shift, ordered by ascending x.
#[derive(Clone, Debug)]
pub struct CurveResult {
    pub n_qubits: u32,
    pub k: i32,
    pub points: Vec<TradeoffPoint>,
}

fn validate_x_grid(x_grid: &[f64]) -> Result<()> {
    if x_grid.len() < 2 {
        return Err(Error::BadGrid);
    }
    if x_grid.windows(2).any(|w| w[0] >= w[1]) || x_grid.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::GridNotSorted);
    }
    if x_grid[0] != 0.0 || *x_grid.last().unwrap() != 1.0 {
        return Err(Error::GridMissingEndpoints);
    }
    Ok(())
}

/// Sweeps the curve for shift k over the given x grid.
///
/// The grid must be sorted, lie inside [0, 1], and contain both endpoints.
/// A decrease of g along the sweep beyond 1e-9 means the eigensolver broke
/// the Lagrange monotonicity and is reported as a hard error.
pub fn sweep(n_qubits: u32, k: i32, x_grid: &[f64]) -> Result<CurveResult> {
    validate_x_grid(x_grid)?;
    let mut points = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let (p, _) = sweep_point(n_qubits, k, x)?;
        points.push(p);
    }
    for w in points.windows(2) {
        let drop = w[0].g - w[1].g;
        if drop > 1e-9 {
            return Err(Error::NonMonotoneSweep { x: w[1].x, drop });
        }
    }
    Ok(CurveResult {
        n_qubits,
        k,
        points,
    })
}

/// Piecewise-linear interpolation of the curve in the (g, f) plane.
///
/// Grid entries outside the curve's swept g range yield -inf: a curve only
/// bounds the region it actually reaches.
pub fn interpolate_on_g(curve: &CurveResult, g_grid: &[f64]) -> Vec<f64> {
    // Collapse the sweep into strictly increasing (g, f) knots, keeping the
    // larger f wherever consecutive samples share the same g.
    let mut knots: Vec<(f64, f64)> = Vec::with_capacity(curve.points.len());
    for p in &curve.points {
        match knots.last_mut() {
            Some((g_prev, f_prev)) if p.g <= *g_prev => {
                *f_prev = f_prev.max(p.f);
            }
            _ => knots.push((p.g, p.f)),
        }
    }
    // Edge tolerance scales with j: the x = 0 estimation value only vanishes
    // to eigensolver accuracy, which grows with the matrix scale.
    let edge = 1e-9 * (curve.n_qubits as f64 / 2.0).max(1.0);
    g_grid
        .iter()
        .map(|&g| {
            if knots.is_empty() || g < knots[0].0 - edge || g > knots.last().unwrap().0 + edge {
                return f64::NEG_INFINITY;
            }
            let pos = knots.partition_point(|&(kg, _)| kg < g);
            if pos == 0 {
                knots[0].1
            } else if pos == knots.len() {
                knots[knots.len() - 1].1
            } else {
                let (g0, f0) = knots[pos - 1];
                let (g1, f1) = knots[pos];
                if g1 == g0 {
                    f0.max(f1)
                } else {
                    f0 + (f1 - f0) * (g - g0) / (g1 - g0)
                }
            }
        })
        .collect()
}

/// The pointwise-best f over all relevant shifts, with the attaining shift.
#[derive(Clone, Debug)]
pub struct Envelope {
    pub n_qubits: u32,
    pub g_grid: Vec<f64>,
    pub best_f: Vec<f64>,
    pub argmax_k: Vec<i32>,
}

/// Assembles the envelope on `g_grid` using the default x grid per shift.
pub fn envelope(n_qubits: u32, g_grid: &[f64]) -> Result<Envelope> {
    envelope_with_x_grid(n_qubits, g_grid, &default_x_grid())
}

pub fn envelope_with_x_grid(n_qubits: u32, g_grid: &[f64], x_grid: &[f64]) -> Result<Envelope> {
    let j = n_qubits as f64 / 2.0;
    if g_grid.is_empty()
        || g_grid.windows(2).any(|w| w[0] > w[1])
        || g_grid.iter().any(|g| !(-1e-12..=j + 1e-12).contains(g))
    {
        return Err(Error::BadGrid);
    }
    let mut best_f = vec![f64::NEG_INFINITY; g_grid.len()];
    let mut argmax_k = vec![i32::MIN; g_grid.len()];
    for k in relevant_k_range(n_qubits) {
        let curve = sweep(n_qubits, k, x_grid)?;
        let interp = interpolate_on_g(&curve, g_grid);
        for (i, f) in interp.into_iter().enumerate() {
            if f > best_f[i] {
                best_f[i] = f;
                argmax_k[i] = k;
            }
        }
    }
    if argmax_k.contains(&i32::MIN) {
        return Err(Error::BadGrid);
    }
    Ok(Envelope {
        n_qubits,
        g_grid: g_grid.to_vec(),
        best_f,
        argmax_k,
    })
}

/// Uniform grid of g values on [0, j].
pub fn uniform_g_grid(n_qubits: u32, points: usize) -> Vec<f64> {
    assert!(points >= 2);
    let j = n_qubits as f64 / 2.0;
    (0..points)
        .map(|i| j * i as f64 / (points - 1) as f64)
        .collect()
}

/// Observed g at the unconstrained maximum of f (the x = 0 end), compared
/// against the conjectured value k/2. Reported, not asserted.
#[derive(Clone, Copy, Debug)]
pub struct GExtremeReport {
    pub n_qubits: u32,
    pub k: i32,
    pub g_at_max_f: f64,
    pub conjectured: f64,
    pub deviation: f64,
}

pub fn g_at_max_f_report(n_qubits: u32, k: i32) -> Result<GExtremeReport> {
    let (point, _) = sweep_point(n_qubits, k, 0.0)?;
    let conjectured = k as f64 / 2.0;
    Ok(GExtremeReport {
        n_qubits,
        k,
        g_at_max_f: point.g,
        conjectured,
        deviation: (point.g - conjectured).abs(),
    })
}
