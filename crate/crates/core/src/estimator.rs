//! Mixedness estimation from finite measurement statistics.
//!
//! The deviation-sum identity can be read backwards: measure a
//! non-commuting pair well enough and the state's mixedness
//! M = (1 - |p|^2)/2 falls out of
//!
//!   M = [ ((dA + dB)^2 - |a|^2 - |b|^2 + zeta)^2 - 4 |G|^2 ] / (4 F)
//!
//! where everything on the right is built from four measured settings:
//! A, B, A+B (for Re G through second moments) and (a x b).sigma
//! (for Im G through the commutator). F and the coefficient norms come from
//! the observable quadruples, never from the state, so the estimate is a
//! pure function of counts.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::moments;
use crate::pauli::{cross, BlochState, PauliObservable};

/// Pairs with F at or below this cannot be inverted: the denominator in the
/// mixedness formula vanishes.
pub const MIN_COMMUTATOR_MEASURE: f64 = 1e-9;

/// Coefficient slack when checking that imported counts belong to one plan.
const PLAN_COEFF_TOL: f64 = 1e-9;

/// The four measurement settings that feed one mixedness estimate.
/// F(A,B) > 0 guarantees every setting has a nonzero Pauli part, so each one
/// is a genuine two-outcome measurement.
#[derive(Clone, Copy, Debug)]
pub struct MeasurementPlan {
    pub setting_a: PauliObservable,
    pub setting_b: PauliObservable,
    pub setting_sum: PauliObservable,
    pub setting_cross: PauliObservable,
}

impl MeasurementPlan {
    pub fn new(a: &PauliObservable, b: &PauliObservable) -> Result<Self> {
        let f = moments::commutator_measure(a, b);
        if f <= MIN_COMMUTATOR_MEASURE {
            return Err(Error::CommutingPair {
                f,
                min: MIN_COMMUTATOR_MEASURE,
            });
        }
        let c = cross(a.vector(), b.vector());
        Ok(MeasurementPlan {
            setting_a: *a,
            setting_b: *b,
            setting_sum: *a + *b,
            setting_cross: PauliObservable::new(c[0], c[1], c[2], 0.0)?,
        })
    }

    pub fn settings(&self) -> [PauliObservable; 4] {
        [self.setting_a, self.setting_b, self.setting_sum, self.setting_cross]
    }
}

/// Outcome tally for one projective measurement of one observable:
/// `count_plus` hits on the upper eigenvalue, `count_minus` on the lower.
#[derive(Clone, Copy, Debug)]
pub struct ShotRecord {
    observable: PauliObservable,
    count_plus: u64,
    count_minus: u64,
}

impl ShotRecord {
    pub fn new(observable: PauliObservable, count_plus: u64, count_minus: u64) -> Result<Self> {
        if count_plus + count_minus == 0 {
            return Err(Error::BadShotRecord {
                reason: "a record needs at least one shot".into(),
            });
        }
        Ok(ShotRecord {
            observable,
            count_plus,
            count_minus,
        })
    }

    pub fn observable(&self) -> &PauliObservable {
        &self.observable
    }

    pub fn count_plus(&self) -> u64 {
        self.count_plus
    }

    pub fn count_minus(&self) -> u64 {
        self.count_minus
    }

    pub fn shots(&self) -> u64 {
        self.count_plus + self.count_minus
    }
}

/// Empirical (mean, variance) of the two-point outcome distribution.
/// The variance is computed as p(1-p)(lambda_+ - lambda_-)^2, which cannot
/// go negative no matter how lopsided the counts are.
pub fn variance_from_counts(record: &ShotRecord) -> (f64, f64) {
    let es = record.observable.eigensystem();
    let shots = record.shots() as f64;
    let p = record.count_plus as f64 / shots;
    let mean = es.lambda_minus + p * (es.lambda_plus - es.lambda_minus);
    let gap = es.lambda_plus - es.lambda_minus;
    (mean, p * (1.0 - p) * gap * gap)
}

fn second_moment(record: &ShotRecord) -> f64 {
    let (mean, var) = variance_from_counts(record);
    var + mean * mean
}

/// Simulate `shots` projective measurements of `obs` on `state`.
/// The upper-eigenvalue probability is (1 + p.a/|a|)/2; the per-shot draws
/// are aggregated through a binomial, which is distributionally identical
/// and O(1) regardless of the shot count.
pub fn born_sample<R: Rng + ?Sized>(
    obs: &PauliObservable,
    state: &BlochState,
    shots: u64,
    rng: &mut R,
) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::BadShotRecord {
            reason: "shots must be positive".into(),
        });
    }
    let es = obs.eigensystem();
    let axis = es.axis.ok_or(Error::DegenerateObservable)?;
    let p_plus = ((1.0 + state.project(axis)) / 2.0).clamp(0.0, 1.0);
    let count_plus = sample_binomial(shots, p_plus, rng);
    ShotRecord::new(*obs, count_plus, shots - count_plus)
}

fn sample_binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    if p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    // p is strictly inside (0, 1) here, so construction cannot fail.
    Binomial::new(n, p).unwrap().sample(rng)
}

/// Counts for all four settings of one plan, in plan order.
#[derive(Clone, Copy, Debug)]
pub struct MeasurementCounts {
    pub a: ShotRecord,
    pub b: ShotRecord,
    pub sum: ShotRecord,
    pub cross: ShotRecord,
}

impl MeasurementCounts {
    /// Accepts four records as (A, B, A+B, cross) after checking that the
    /// third and fourth really are the sum and cross product of the first
    /// two, and that the pair is invertible at all.
    pub fn from_records(records: [ShotRecord; 4]) -> Result<Self> {
        let [a, b, sum, cross_rec] = records;
        let plan = MeasurementPlan::new(a.observable(), b.observable())?;
        let close = |x: &PauliObservable, y: &PauliObservable| {
            x.coefficients()
                .iter()
                .zip(y.coefficients())
                .all(|(u, v)| (u - v).abs() <= PLAN_COEFF_TOL)
        };
        if !close(sum.observable(), &plan.setting_sum) {
            return Err(Error::PlanMismatch {
                reason: "third record is not the sum observable A + B".into(),
            });
        }
        if !close(cross_rec.observable(), &plan.setting_cross) {
            return Err(Error::PlanMismatch {
                reason: "fourth record is not the cross observable (a x b).sigma".into(),
            });
        }
        Ok(MeasurementCounts {
            a,
            b,
            sum,
            cross: cross_rec,
        })
    }

    pub fn records(&self) -> [ShotRecord; 4] {
        [self.a, self.b, self.sum, self.cross]
    }

    fn min_shots(&self) -> u64 {
        self.records().iter().map(|r| r.shots()).min().unwrap()
    }
}

/// Measure all four plan settings on a state.
pub fn collect_counts<R: Rng + ?Sized>(
    plan: &MeasurementPlan,
    state: &BlochState,
    shots_per_setting: u64,
    rng: &mut R,
) -> Result<MeasurementCounts> {
    Ok(MeasurementCounts {
        a: born_sample(&plan.setting_a, state, shots_per_setting, rng)?,
        b: born_sample(&plan.setting_b, state, shots_per_setting, rng)?,
        sum: born_sample(&plan.setting_sum, state, shots_per_setting, rng)?,
        cross: born_sample(&plan.setting_cross, state, shots_per_setting, rng)?,
    })
}

/// The inversion applied to raw counts. Returns (raw value, clamped value,
/// clamp flag); the raw value can leave [0, 1/2] through sampling noise.
fn plug_in_mixedness(counts: &MeasurementCounts) -> (f64, f64, bool) {
    let a_obs = counts.a.observable();
    let b_obs = counts.b.observable();
    let (mean_a, var_a) = variance_from_counts(&counts.a);
    let (mean_b, var_b) = variance_from_counts(&counts.b);
    let (mean_cross, _) = variance_from_counts(&counts.cross);

    // Re G from the sum setting: <S^2> - <A^2> - <B^2> = <AB + BA>.
    let re_g = (second_moment(&counts.sum) - second_moment(&counts.a) - second_moment(&counts.b))
        / 2.0
        - mean_a * mean_b;
    // Im G = <(a x b).sigma>.
    let im_g = mean_cross;

    let dev_a = mean_a - a_obs.scalar();
    let dev_b = mean_b - b_obs.scalar();
    let zeta_hat = dev_a * dev_a + dev_b * dev_b;

    let spread = var_a.sqrt() + var_b.sqrt();
    let inner = spread * spread - moments::cms_variance(a_obs) - moments::cms_variance(b_obs)
        + zeta_hat;
    let f = moments::commutator_measure(a_obs, b_obs);
    let raw = (inner * inner - 4.0 * (re_g * re_g + im_g * im_g)) / (4.0 * f);
    let clamped = raw.clamp(0.0, 0.5);
    (raw, clamped, raw != clamped)
}

/// Mixedness from exact moments, through the same inversion the estimator
/// uses. Round-trips to (1 - |p|^2)/2 up to rounding.
pub fn exact_mixedness(
    a: &PauliObservable,
    b: &PauliObservable,
    state: &BlochState,
) -> Result<f64> {
    let f = moments::commutator_measure(a, b);
    if f <= MIN_COMMUTATOR_MEASURE {
        return Err(Error::CommutingPair {
            f,
            min: MIN_COMMUTATOR_MEASURE,
        });
    }
    let spread = moments::stddev(a, state) + moments::stddev(b, state);
    let inner = spread * spread - moments::cms_variance(a) - moments::cms_variance(b)
        + moments::zeta(a, b, state);
    let g_sq = moments::covariance(a, b, state).norm_sqr();
    Ok(moments::clamp_noise((inner * inner - 4.0 * g_sq) / (4.0 * f)))
}

/// Point estimate, bootstrap interval, and provenance of one estimation run.
#[derive(Clone, Copy, Debug)]
pub struct EstimateReport {
    pub m_hat: f64,
    pub interval_low: f64,
    pub interval_high: f64,
    /// True when the raw plug-in value left [0, 1/2] and was pulled back.
    pub clamped: bool,
    /// Smallest per-setting shot count that fed the estimate.
    pub shots_per_setting: u64,
    pub resamples: u32,
    /// Known only when the counts came from an in-process simulation.
    pub true_m: Option<f64>,
}

fn resample_record<R: Rng + ?Sized>(record: &ShotRecord, rng: &mut R) -> ShotRecord {
    let shots = record.shots();
    let p = record.count_plus as f64 / shots as f64;
    let k = sample_binomial(shots, p, rng);
    ShotRecord {
        observable: record.observable,
        count_plus: k,
        count_minus: shots - k,
    }
}

/// Percentile bootstrap: resample each setting's counts, re-run the plug-in,
/// take the 2.5th and 97.5th percentiles of the clamped values.
fn bootstrap_interval<R: Rng + ?Sized>(
    counts: &MeasurementCounts,
    resamples: u32,
    rng: &mut R,
) -> (f64, f64) {
    let mut values = Vec::with_capacity(resamples as usize);
    for _ in 0..resamples {
        let replicate = MeasurementCounts {
            a: resample_record(&counts.a, rng),
            b: resample_record(&counts.b, rng),
            sum: resample_record(&counts.sum, rng),
            cross: resample_record(&counts.cross, rng),
        };
        values.push(plug_in_mixedness(&replicate).1);
    }
    values.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let pick = |q: f64| values[((values.len() - 1) as f64 * q).round() as usize];
    (pick(0.025), pick(0.975))
}

/// Estimate mixedness from counts alone. The state never enters; only the
/// tallies and the observable coefficients do.
pub fn estimate_from_counts<R: Rng + ?Sized>(
    counts: &MeasurementCounts,
    resamples: u32,
    rng: &mut R,
) -> Result<EstimateReport> {
    if resamples == 0 {
        return Err(Error::InvalidParameter {
            name: "resamples",
            value: 0.0,
        });
    }
    let (_, m_hat, clamped) = plug_in_mixedness(counts);
    let (lo, hi) = bootstrap_interval(counts, resamples, rng);
    Ok(EstimateReport {
        m_hat,
        // The interval always contains the point estimate.
        interval_low: lo.min(m_hat),
        interval_high: hi.max(m_hat),
        clamped,
        shots_per_setting: counts.min_shots(),
        resamples,
        true_m: None,
    })
}

/// Simulate the four settings on a known state and estimate its mixedness.
pub fn estimate_mixedness<R: Rng + ?Sized>(
    a: &PauliObservable,
    b: &PauliObservable,
    state: &BlochState,
    shots_per_setting: u64,
    resamples: u32,
    rng: &mut R,
) -> Result<EstimateReport> {
    let plan = MeasurementPlan::new(a, b)?;
    let counts = collect_counts(&plan, state, shots_per_setting, rng)?;
    let mut report = estimate_from_counts(&counts, resamples, rng)?;
    report.true_m = Some(moments::mixedness(state));
    Ok(report)
}
