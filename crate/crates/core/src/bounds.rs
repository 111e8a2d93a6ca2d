//! Lower bounds on deviation sums for collections of qubit observables.
//!
//! The centerpiece is an exact identity: for N observables,
//!
//!   sum_i dA_i = 1/(2(N-1)) * sum_{i != j} sqrt( 2*sqrt(M*F_ij + |G_ij|^2)
//!                + |a_i|^2 + |a_j|^2 - zeta_ij )
//!
//! which turns into a state-computable lower bound when the |G|^2 term is
//! dropped. The rest of the module is the comparison zoo: the product bound
//! built from commutator and anticommutator expectations, the Maccone-Pati
//! pure-state bound, and three variance-sum bounds for triples and larger
//! collections.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::moments::{self, clamp_noise};
use crate::pauli::{inner_product, pure_state_vector, BlochState, PauliObservable};

/// Bracket under the square root for one ordered pair. With the covariance
/// term included the bracket equals (dA + dB)^2 exactly; without it the
/// bracket is still nonnegative because zeta <= |a|^2 + |b|^2 on the ball.
fn pair_bracket(
    a: &PauliObservable,
    b: &PauliObservable,
    state: &BlochState,
    with_covariance: bool,
) -> f64 {
    let mut radicand = moments::mixedness(state) * moments::commutator_measure(a, b);
    if with_covariance {
        radicand += moments::covariance(a, b, state).norm_sqr();
    }
    let bracket = 2.0 * radicand.sqrt() + moments::cms_variance(a) + moments::cms_variance(b)
        - moments::zeta(a, b, state);
    clamp_noise(bracket)
}

fn deviation_sum_rhs(
    obs: &[PauliObservable],
    state: &BlochState,
    with_covariance: bool,
) -> Result<f64> {
    let n = obs.len();
    if n < 2 {
        return Err(Error::TooFewObservables { n, min: 2 });
    }
    // Literal sum over ordered pairs; the summand is symmetric but the
    // defining expression runs over i != j, so this does too.
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += pair_bracket(&obs[i], &obs[j], state, with_covariance).sqrt();
            }
        }
    }
    Ok(sum / (2.0 * (n as f64 - 1.0)))
}

/// Right side of the deviation-sum identity. Equals sum_i dA_i exactly.
pub fn equality_rhs(obs: &[PauliObservable], state: &BlochState) -> Result<f64> {
    deviation_sum_rhs(obs, state, true)
}

/// The state-computable lower bound: the identity with |G|^2 dropped.
/// Dominated by the deviation sum for every state.
pub fn inequality_rhs(obs: &[PauliObservable], state: &BlochState) -> Result<f64> {
    deviation_sum_rhs(obs, state, false)
}

/// The expectation-independent floor of the pair bracket,
/// |a|^2 + |b|^2 - zeta(A,B). Strictly positive for non-commuting pairs,
/// which is what keeps the bound from collapsing to zero on hard states.
pub fn pair_bracket_positivity(
    a: &PauliObservable,
    b: &PauliObservable,
    state: &BlochState,
) -> f64 {
    clamp_noise(
        moments::cms_variance(a) + moments::cms_variance(b) - moments::zeta(a, b, state),
    )
}

/// Product bound on (dA)^2 (dB)^2 from first moments:
/// |<[A,B]>/2i|^2 + |<{A~,B~}>/2|^2.
///
/// Evaluated with dense traces on purpose; the closed-form covariance gives
/// the same number and the test suite pins the two together.
pub fn sur_bound(a: &PauliObservable, b: &PauliObservable, state: &BlochState) -> f64 {
    let rho = state.to_density();
    let (da, db) = (a.to_dense(), b.to_dense());
    let comm = da * db - db * da;
    let comm_expect = (rho * comm).trace();

    let id = crate::pauli::DenseMatrix2::identity();
    let mean_a = (rho * da).trace().re;
    let mean_b = (rho * db).trace().re;
    let dev_a = da - id.scale(Complex64::new(mean_a, 0.0));
    let dev_b = db - id.scale(Complex64::new(mean_b, 0.0));
    let anti = (rho * (dev_a * dev_b + dev_b * dev_a)).trace().re / 2.0;

    comm_expect.norm_sqr() / 4.0 + anti * anti
}

/// Maccone-Pati bound on (dA)^2 + (dB)^2 for pure states: the better of the
/// two sign choices of +-i<[A,B]> + |<psi|A +- iB|psi_perp>|^2.
pub fn maccone_pati_bound(
    a: &PauliObservable,
    b: &PauliObservable,
    state: &BlochState,
) -> Result<f64> {
    let psi = pure_state_vector(state)?;
    let psi_perp = pure_state_vector(&state.orthogonal_pure()?)?;
    let rho = state.to_density();
    let (da, db) = (a.to_dense(), b.to_dense());
    let comm_expect = (rho * (da * db - db * da)).trace();

    let mut best = f64::NEG_INFINITY;
    for sign in [1.0, -1.0] {
        let shifted = da + db.scale(Complex64::new(0.0, sign));
        let amp = inner_product(psi, shifted.apply(psi_perp));
        // +-i<[A,B]> is real since <[A,B]> is purely imaginary.
        let term = -sign * comm_expect.im + amp.norm_sqr();
        best = best.max(term);
    }
    Ok(best)
}

/// Variance-sum bound for a triple from the summed observable and the
/// cyclically summed commutator expectation.
pub fn triple_bound_sum(
    a1: &PauliObservable,
    a2: &PauliObservable,
    a3: &PauliObservable,
    state: &BlochState,
) -> f64 {
    let total = *a1 + *a2 + *a3;
    // <[A,B]> = 2i Im G(A,B).
    let cyclic = moments::covariance(a1, a2, state).im
        + moments::covariance(a2, a3, state).im
        + moments::covariance(a3, a1, state).im;
    moments::variance(&total, state) / 3.0
        + 3.0_f64.sqrt() / 3.0 * 2.0 * cyclic.abs()
}

/// Variance-sum bound for a triple from the three commutator expectations
/// taken separately.
pub fn triple_bound_commutators(
    a1: &PauliObservable,
    a2: &PauliObservable,
    a3: &PauliObservable,
    state: &BlochState,
) -> f64 {
    let sum_abs = moments::covariance(a1, a2, state).im.abs()
        + moments::covariance(a2, a3, state).im.abs()
        + moments::covariance(a3, a1, state).im.abs();
    3.0_f64.sqrt() / 3.0 * 2.0 * sum_abs
}

/// Variance-sum bound for N >= 3 observables built from pairwise sums:
/// [sum_{i<j} d(A_i+A_j)^2 - [sum_{i<j} d(A_i+A_j)]^2 / (N-1)^2] / (N-2).
pub fn n_observable_bound(obs: &[PauliObservable], state: &BlochState) -> Result<f64> {
    let n = obs.len();
    if n < 3 {
        return Err(Error::TooFewObservables { n, min: 3 });
    }
    let mut var_sum = 0.0;
    let mut std_sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = moments::variance(&(obs[i] + obs[j]), state);
            var_sum += v;
            std_sum += v.sqrt();
        }
    }
    let nm1 = n as f64 - 1.0;
    let nm2 = n as f64 - 2.0;
    Ok((var_sum - std_sum * std_sum / (nm1 * nm1)) / nm2)
}

/// Closed-form curves for the one-parameter pure family
/// p(theta) = (sin 2theta, 0, -cos 2theta) with the pair (sigma_x, sigma_y):
/// returns (deviation-sum bound, product bound) = (sqrt(1 + cos^2 2theta),
/// cos^2 2theta). The product bound dies at theta = pi/4, 3pi/4 while the
/// deviation-sum bound never drops below 1.
pub fn closed_form_curves(theta: f64) -> (f64, f64) {
    let c = (2.0 * theta).cos();
    ((1.0 + c * c).sqrt(), c * c)
}

/// One state, one observable list, every applicable quantity. `None` marks a
/// bound that does not apply at this N or purity.
#[derive(Clone, Debug)]
pub struct BoundComparison {
    pub observable_count: usize,
    pub lhs_sum_stddev: f64,
    pub lhs_sum_variance: f64,
    /// (dA)^2 (dB)^2, the quantity the product bound constrains. Pairs only.
    pub lhs_variance_product: Option<f64>,
    pub equality_rhs: f64,
    pub inequality_rhs: f64,
    pub sur: Option<f64>,
    pub maccone_pati: Option<f64>,
    pub triple_sum: Option<f64>,
    pub triple_commutators: Option<f64>,
    pub n_observable: Option<f64>,
}

impl BoundComparison {
    pub fn evaluate(obs: &[PauliObservable], state: &BlochState) -> Result<Self> {
        let n = obs.len();
        if n < 2 {
            return Err(Error::TooFewObservables { n, min: 2 });
        }
        let variances: Vec<f64> = obs.iter().map(|a| moments::variance(a, state)).collect();
        let lhs_sum_stddev = variances.iter().map(|v| v.sqrt()).sum();
        let lhs_sum_variance = variances.iter().sum();
        let pair = n == 2;
        Ok(BoundComparison {
            observable_count: n,
            lhs_sum_stddev,
            lhs_sum_variance,
            lhs_variance_product: pair.then(|| variances[0] * variances[1]),
            equality_rhs: equality_rhs(obs, state)?,
            inequality_rhs: inequality_rhs(obs, state)?,
            sur: pair.then(|| sur_bound(&obs[0], &obs[1], state)),
            maccone_pati: if pair && state.is_pure() {
                Some(maccone_pati_bound(&obs[0], &obs[1], state)?)
            } else {
                None
            },
            triple_sum: (n == 3).then(|| triple_bound_sum(&obs[0], &obs[1], &obs[2], state)),
            triple_commutators: (n == 3)
                .then(|| triple_bound_commutators(&obs[0], &obs[1], &obs[2], state)),
            n_observable: if n >= 3 {
                Some(n_observable_bound(obs, state)?)
            } else {
                None
            },
        })
    }
}
