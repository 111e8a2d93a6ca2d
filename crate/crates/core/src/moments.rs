//! First and second moments of qubit observables, in closed form and via
//! dense traces.
//!
//! For A = a.sigma + a4*I on rho = (I + p.sigma)/2:
//!   <A>        = a4 + p.a
//!   (dA)^2     = |a|^2 - (p.a)^2
//!   G(A,B)     = [a.b - (p.a)(p.b)] + i p.(a x b)   (deviation covariance)
//!   F(A,B)     = 2 |a x b|^2                        (commutator strength)
//!   M          = (1 - |p|^2)/2                      (mixedness)
//! All of these have trace-based twins in `dense_moments`; the two paths are
//! required to agree and the test suite holds them to it.

use num_complex::Complex64;

use crate::pauli::{cross, BlochState, DenseMatrix2, PauliObservable};

/// Widest negative excursion attributable to rounding; anything below is a
/// real sign error and is left alone so it surfaces as NaN downstream.
pub(crate) const NOISE_FLOOR: f64 = 1e-12;

/// Clamp a quantity that is nonnegative in exact arithmetic.
pub(crate) fn clamp_noise(x: f64) -> f64 {
    if (-NOISE_FLOOR..0.0).contains(&x) {
        0.0
    } else {
        x
    }
}

fn dot3(x: [f64; 3], y: [f64; 3]) -> f64 {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

/// <A> on the state.
pub fn expectation(obs: &PauliObservable, state: &BlochState) -> f64 {
    obs.scalar() + state.project(obs.vector())
}

/// Variance (dA)^2 = |a|^2 - (p.a)^2.
pub fn variance(obs: &PauliObservable, state: &BlochState) -> f64 {
    let proj = state.project(obs.vector());
    clamp_noise(obs.vector_norm_sq() - proj * proj)
}

pub fn stddev(obs: &PauliObservable, state: &BlochState) -> f64 {
    variance(obs, state).sqrt()
}

/// Deviation covariance G(A,B) = <(A - <A>)(B - <B>)>.
pub fn covariance(a: &PauliObservable, b: &PauliObservable, state: &BlochState) -> Complex64 {
    let (va, vb) = (a.vector(), b.vector());
    let re = dot3(va, vb) - state.project(va) * state.project(vb);
    let im = state.project(cross(va, vb));
    Complex64::new(re, im)
}

/// Commutator strength F(A,B) = 2 |a x b|^2; state-independent.
pub fn commutator_measure(a: &PauliObservable, b: &PauliObservable) -> f64 {
    let c = cross(a.vector(), b.vector());
    2.0 * dot3(c, c)
}

/// Mixedness M = (1 - |p|^2)/2, in [0, 1/2]. Snapped to zero inside the
/// noise floor on both sides: a unit Bloch vector assembled from trig lands
/// at |p|^2 = 1 +- few ulp, and sqrt(M * F) would amplify that residue far
/// above it.
pub fn mixedness(state: &BlochState) -> f64 {
    let m = (1.0 - state.norm_sq()) / 2.0;
    if m.abs() <= NOISE_FLOOR {
        0.0
    } else {
        m
    }
}

/// Variance of the observable on the completely mixed state: |a|^2.
pub fn cms_variance(obs: &PauliObservable) -> f64 {
    obs.vector_norm_sq()
}

/// zeta(A,B) = (p.a)^2 + (p.b)^2, the pair's expectation weight.
pub fn zeta(a: &PauliObservable, b: &PauliObservable, state: &BlochState) -> f64 {
    let pa = state.project(a.vector());
    let pb = state.project(b.vector());
    pa * pa + pb * pb
}

/// Moments of one observable on a fixed state.
#[derive(Clone, Copy, Debug)]
pub struct ObservableMoments {
    pub mean: f64,
    pub variance: f64,
    pub stddev: f64,
    pub cms_variance: f64,
}

/// Every moment the bound machinery consumes, for a list of observables on
/// one state. Pair matrices are indexed [i][j].
#[derive(Clone, Debug)]
pub struct MomentSet {
    pub per_observable: Vec<ObservableMoments>,
    pub covariance: Vec<Vec<Complex64>>,
    pub commutator_measure: Vec<Vec<f64>>,
    pub zeta: Vec<Vec<f64>>,
    pub mixedness: f64,
}

impl MomentSet {
    /// Largest discrepancy between two moment sets, each entry compared as
    /// |x - y| / max(1, |x|, |y|).
    pub fn max_discrepancy(&self, other: &MomentSet) -> f64 {
        fn rel(x: f64, y: f64) -> f64 {
            (x - y).abs() / 1.0_f64.max(x.abs()).max(y.abs())
        }
        let mut worst: f64 = rel(self.mixedness, other.mixedness);
        let n = self.per_observable.len();
        for i in 0..n {
            let (a, b) = (&self.per_observable[i], &other.per_observable[i]);
            worst = worst
                .max(rel(a.mean, b.mean))
                .max(rel(a.variance, b.variance))
                .max(rel(a.stddev, b.stddev))
                .max(rel(a.cms_variance, b.cms_variance));
            for j in 0..n {
                if i == j {
                    continue;
                }
                worst = worst
                    .max(rel(self.covariance[i][j].re, other.covariance[i][j].re))
                    .max(rel(self.covariance[i][j].im, other.covariance[i][j].im))
                    .max(rel(self.commutator_measure[i][j], other.commutator_measure[i][j]))
                    .max(rel(self.zeta[i][j], other.zeta[i][j]));
            }
        }
        worst
    }
}

/// All moments via the Bloch closed forms.
pub fn closed_form_moments(obs: &[PauliObservable], state: &BlochState) -> MomentSet {
    let n = obs.len();
    let per_observable = obs
        .iter()
        .map(|a| {
            let v = variance(a, state);
            ObservableMoments {
                mean: expectation(a, state),
                variance: v,
                stddev: v.sqrt(),
                cms_variance: cms_variance(a),
            }
        })
        .collect();
    let mut cov = vec![vec![Complex64::default(); n]; n];
    let mut f = vec![vec![0.0; n]; n];
    let mut z = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            cov[i][j] = covariance(&obs[i], &obs[j], state);
            f[i][j] = commutator_measure(&obs[i], &obs[j]);
            z[i][j] = zeta(&obs[i], &obs[j], state);
        }
    }
    MomentSet {
        per_observable,
        covariance: cov,
        commutator_measure: f,
        zeta: z,
        mixedness: mixedness(state),
    }
}

/// All moments via dense 2x2 traces only. This path never touches the Bloch
/// formulas; it exists to referee them.
pub fn dense_moments(obs: &[PauliObservable], state: &BlochState) -> MomentSet {
    let rho = state.to_density();
    let n = obs.len();
    let dense: Vec<DenseMatrix2> = obs.iter().map(|a| a.to_dense()).collect();
    let cms = DenseMatrix2::identity().scale(Complex64::new(0.5, 0.0));

    let mean_of = |m: &DenseMatrix2, r: &DenseMatrix2| (*r * *m).trace().re;

    let per_observable = dense
        .iter()
        .map(|d| {
            let mean = mean_of(d, &rho);
            let mean_sq = mean_of(&(*d * *d), &rho);
            let variance = clamp_noise(mean_sq - mean * mean);
            let cms_mean = mean_of(d, &cms);
            let cms_mean_sq = mean_of(&(*d * *d), &cms);
            ObservableMoments {
                mean,
                variance,
                stddev: variance.sqrt(),
                cms_variance: clamp_noise(cms_mean_sq - cms_mean * cms_mean),
            }
        })
        .collect::<Vec<_>>();

    let mut cov = vec![vec![Complex64::default(); n]; n];
    let mut f = vec![vec![0.0; n]; n];
    let mut z = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            // G = tr(rho A B) - <A><B>.
            let prod = (rho * (dense[i] * dense[j])).trace();
            cov[i][j] = prod
                - Complex64::new(per_observable[i].mean * per_observable[j].mean, 0.0);
            // [A,B] = 2i (a x b).sigma, so tr([A,B][A,B]^dag) = 8 |a x b|^2
            // and F = 2 |a x b|^2 is a quarter of the Hilbert-Schmidt square.
            let comm = dense[i] * dense[j] - dense[j] * dense[i];
            f[i][j] = (comm * comm.adjoint()).trace().re / 4.0;
            let da = per_observable[i].mean - mean_of(&dense[i], &cms);
            let db = per_observable[j].mean - mean_of(&dense[j], &cms);
            z[i][j] = da * da + db * db;
        }
    }
    let purity = (rho * rho).trace().re;
    MomentSet {
        per_observable,
        covariance: cov,
        commutator_measure: f,
        zeta: z,
        mixedness: clamp_noise(1.0 - purity),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{random_ball_state, random_observable, random_pure_state};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SX: PauliObservable = PauliObservable::SIGMA_X;
    const SY: PauliObservable = PauliObservable::SIGMA_Y;

    fn state(p1: f64, p2: f64, p3: f64) -> BlochState {
        BlochState::new(p1, p2, p3).unwrap()
    }

    #[test]
    fn moments_on_a_partly_polarized_state() {
        let s = state(0.6, 0.0, 0.0);
        assert_eq!(expectation(&SX, &s), 0.6);
        assert!((variance(&SX, &s) - 0.64).abs() < 1e-15);
        assert_eq!(variance(&SY, &s), 1.0);
        assert_eq!(cms_variance(&SX), 1.0);
        assert!((mixedness(&s) - 0.32).abs() < 1e-15);
        assert!((zeta(&SX, &SY, &s) - 0.36).abs() < 1e-15);
    }

    #[test]
    fn covariance_of_x_y_on_z_eigenstate() {
        // On |0> (p = z) the x/y deviations are maximally twisted: G = i.
        let g = covariance(&SX, &SY, &state(0.0, 0.0, 1.0));
        assert_eq!(g, Complex64::new(0.0, 1.0));
        // Commuting same-axis pair on the mixed state: plain second moment.
        let g2 = covariance(&SX, &SX, &state(0.0, 0.0, 0.0));
        assert_eq!(g2, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn commutator_measure_examples() {
        assert_eq!(commutator_measure(&SX, &SY), 2.0);
        // [A, A] = 0, and scaling is quartic across the pair.
        assert_eq!(commutator_measure(&SX, &SX), 0.0);
        let a = PauliObservable::new(3.0, 0.0, 0.0, 1.0).unwrap();
        let b = PauliObservable::new(0.0, 2.0, 0.0, -5.0).unwrap();
        assert_eq!(commutator_measure(&a, &b), 72.0);
    }

    #[test]
    fn identity_shift_leaves_second_moments_alone() {
        let s = state(0.3, -0.2, 0.5);
        let a = PauliObservable::new(1.2, -0.4, 0.7, 0.0).unwrap();
        let shifted = a + PauliObservable::new(0.0, 0.0, 0.0, 3.5).unwrap();
        assert_eq!(variance(&a, &s), variance(&shifted, &s));
        assert_eq!(
            covariance(&a, &SY, &s),
            covariance(&shifted, &SY, &s)
        );
        assert!((expectation(&shifted, &s) - expectation(&a, &s) - 3.5).abs() < 1e-15);
    }

    #[test]
    fn closed_form_and_dense_agree_on_random_configs() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for trial in 0..2000 {
            let s = if trial % 2 == 0 {
                random_pure_state(&mut rng)
            } else {
                random_ball_state(&mut rng)
            };
            let obs: Vec<_> = (0..3)
                .map(|_| random_observable(&mut rng, -2.0, 2.0).unwrap())
                .collect();
            let d = closed_form_moments(&obs, &s).max_discrepancy(&dense_moments(&obs, &s));
            assert!(d <= 1e-12, "discrepancy {d} at trial {trial}");
        }
    }

    // The product identity behind the whole bound family:
    // (dA)^2 (dB)^2 = M*F + |G|^2 for every state and pair.
    proptest! {
        #[test]
        fn variance_product_identity(
            ax in -2.0..2.0f64, ay in -2.0..2.0f64, az in -2.0..2.0f64, a4 in -2.0..2.0f64,
            bx in -2.0..2.0f64, by in -2.0..2.0f64, bz in -2.0..2.0f64, b4 in -2.0..2.0f64,
            px in -0.57..0.57f64, py in -0.57..0.57f64, pz in -0.57..0.57f64,
        ) {
            let s = BlochState::new(px, py, pz).unwrap();
            let a = PauliObservable::new(ax, ay, az, a4).unwrap();
            let b = PauliObservable::new(bx, by, bz, b4).unwrap();
            let lhs = variance(&a, &s) * variance(&b, &s);
            let rhs = mixedness(&s) * commutator_measure(&a, &b)
                + covariance(&a, &b, &s).norm_sqr();
            let scale = 1.0_f64.max(lhs.abs()).max(rhs.abs());
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn mixedness_range_and_purity_ends() {
        assert_eq!(mixedness(&BlochState::MAXIMALLY_MIXED), 0.5);
        assert_eq!(mixedness(&state(0.0, 0.0, 1.0)), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10_000 {
            let m = mixedness(&random_ball_state(&mut rng));
            assert!((0.0..=0.5).contains(&m));
        }
    }

    #[test]
    fn variances_never_go_negative() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10_000 {
            let s = random_pure_state(&mut rng);
            let a = random_observable(&mut rng, -2.0, 2.0).unwrap();
            assert!(variance(&a, &s) >= 0.0);
            assert!(stddev(&a, &s).is_finite());
        }
    }
}
