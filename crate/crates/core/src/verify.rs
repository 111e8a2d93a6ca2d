//! Randomized self-checks of the bound family.
//!
//! One pass draws a configuration (2 to 5 observables, a state of varying
//! purity), evaluates every property below, and folds the violations into
//! per-property worst cases. A breach carries its configuration out so the
//! exact case can be replayed later.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::Result;
use crate::moments;
use crate::pauli::{
    random_ball_state, random_fixed_purity_state, random_observable, random_pure_state,
    BlochState, PauliObservable,
};
use crate::sweeps::pure_family_state;

/// Relative residual allowed on the deviation-sum identity.
pub const EQUALITY_TOL: f64 = 1e-10;
/// Allowed disagreement between closed-form and dense-trace moments.
pub const ORACLE_TOL: f64 = 1e-12;
/// Allowed overshoot of the dropped-covariance bound past the deviation sum.
pub const DOMINANCE_TOL: f64 = 1e-12;
/// Slack granted to the comparison bounds before a violation is declared.
pub const COMPETITOR_SLACK: f64 = 1e-10;
/// Pairs with F above this take part in the positivity check.
pub const TRIVIALITY_F_MIN: f64 = 1e-6;
/// A competing product bound under this value has effectively collapsed.
pub const SUR_FLOOR: f64 = 1e-6;

/// One drawn configuration, shaped for lossless JSON round-trips.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseConfig {
    pub state: [f64; 3],
    pub observables: Vec<[f64; 4]>,
}

impl CaseConfig {
    fn capture(state: &BlochState, obs: &[PauliObservable]) -> Self {
        CaseConfig {
            state: state.components(),
            observables: obs.iter().map(|a| a.coefficients()).collect(),
        }
    }

    pub fn unpack(&self) -> Result<(BlochState, Vec<PauliObservable>)> {
        let state = BlochState::new(self.state[0], self.state[1], self.state[2])?;
        let obs = self
            .observables
            .iter()
            .map(|a| PauliObservable::new(a[0], a[1], a[2], a[3]))
            .collect::<Result<Vec<_>>>()?;
        Ok((state, obs))
    }
}

/// Violation measures for one configuration. Every field is "how far past
/// the property's line this case went"; zero or negative means clean.
#[derive(Clone, Copy, Debug)]
pub struct CaseResiduals {
    pub equality: f64,
    pub oracle: f64,
    pub dominance: f64,
    pub competitors: f64,
    pub triviality: f64,
}

impl CaseResiduals {
    pub fn named(&self) -> [(&'static str, f64); 5] {
        [
            ("equality", self.equality),
            ("oracle", self.oracle),
            ("dominance", self.dominance),
            ("competitors", self.competitors),
            ("triviality", self.triviality),
        ]
    }
}

/// Worst case seen for one property across a run.
#[derive(Clone, Debug)]
pub struct PropertyStat {
    pub name: &'static str,
    pub tolerance: f64,
    pub worst: f64,
    pub worst_case: Option<CaseConfig>,
    pub checks: u64,
}

impl PropertyStat {
    fn new(name: &'static str, tolerance: f64) -> Self {
        PropertyStat {
            name,
            tolerance,
            worst: f64::NEG_INFINITY,
            worst_case: None,
            checks: 0,
        }
    }

    fn absorb(&mut self, violation: f64, case: &CaseConfig) {
        self.checks += 1;
        if violation > self.worst || self.worst_case.is_none() {
            self.worst = violation;
            self.worst_case = Some(case.clone());
        }
    }

    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub trials: u64,
    pub seed: u64,
    pub properties: Vec<PropertyStat>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed())
    }

    pub fn first_failure(&self) -> Option<&PropertyStat> {
        self.properties.iter().find(|p| !p.passed())
    }

    pub fn property(&self, name: &str) -> Option<&PropertyStat> {
        self.properties.iter().find(|p| p.name == name)
    }
}

fn rel(x: f64, scale: f64) -> f64 {
    x / 1.0_f64.max(scale.abs())
}

/// Violation measures for one explicit configuration.
pub fn evaluate_case(case: &CaseConfig) -> Result<CaseResiduals> {
    let (state, obs) = case.unpack()?;
    let n = obs.len();

    let closed = moments::closed_form_moments(&obs, &state);
    let dense = moments::dense_moments(&obs, &state);
    let oracle = closed.max_discrepancy(&dense);

    let lhs_std: f64 = closed.per_observable.iter().map(|m| m.stddev).sum();
    let lhs_var: f64 = closed.per_observable.iter().map(|m| m.variance).sum();
    let equality = rel((lhs_std - bounds::equality_rhs(&obs, &state)?).abs(), lhs_std);
    let dominance = rel(bounds::inequality_rhs(&obs, &state)? - lhs_std, lhs_std);

    // Comparison bounds, each against the quantity it actually constrains.
    let mut competitors = f64::NEG_INFINITY;
    let pure = state.is_pure();
    for i in 0..n {
        for j in (i + 1)..n {
            let product = closed.per_observable[i].variance * closed.per_observable[j].variance;
            let sur = bounds::sur_bound(&obs[i], &obs[j], &state);
            competitors = competitors.max(rel(sur - product, product));
            if pure {
                let pair_var =
                    closed.per_observable[i].variance + closed.per_observable[j].variance;
                let mp = bounds::maccone_pati_bound(&obs[i], &obs[j], &state)?;
                competitors = competitors.max(rel(mp - pair_var, pair_var));
            }
        }
    }
    if n == 3 {
        let eq3 = bounds::triple_bound_sum(&obs[0], &obs[1], &obs[2], &state);
        let eq4 = bounds::triple_bound_commutators(&obs[0], &obs[1], &obs[2], &state);
        competitors = competitors.max(rel(eq3 - lhs_var, lhs_var));
        competitors = competitors.max(rel(eq4 - lhs_var, lhs_var));
    }
    if n >= 3 {
        let eq5 = bounds::n_observable_bound(&obs, &state)?;
        competitors = competitors.max(rel(eq5 - lhs_var, lhs_var));
    }

    // Positivity of the dropped-covariance bound on non-commuting pairs:
    // a bound of exactly zero is as much a failure as a negative one.
    let mut triviality = f64::NEG_INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            if moments::commutator_measure(&obs[i], &obs[j]) <= TRIVIALITY_F_MIN {
                continue;
            }
            let bound = bounds::inequality_rhs(&[obs[i], obs[j]], &state)?;
            let violation = if bound > 0.0 { 0.0 } else { bound.abs().max(f64::MIN_POSITIVE) };
            triviality = triviality.max(violation);
        }
    }

    Ok(CaseResiduals {
        equality,
        oracle,
        dominance,
        competitors,
        triviality,
    })
}

fn draw_state<R: Rng + ?Sized>(rng: &mut R) -> BlochState {
    match rng.random_range(0..3) {
        0 => random_pure_state(rng),
        1 => random_ball_state(rng),
        _ => {
            let gamma = rng.random::<f64>();
            random_fixed_purity_state(rng, gamma).unwrap()
        }
    }
}

fn draw_case<R: Rng + ?Sized>(rng: &mut R) -> CaseConfig {
    let n = rng.random_range(2..=5);
    let state = draw_state(rng);
    let obs: Vec<PauliObservable> = (0..n)
        .map(|_| random_observable(rng, -2.0, 2.0).unwrap())
        .collect();
    CaseConfig::capture(&state, &obs)
}

/// Run `trials` random configurations and report the worst violation of
/// each property.
pub fn run(trials: u64, seed: u64) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = vec![
        PropertyStat::new("equality", EQUALITY_TOL),
        PropertyStat::new("oracle", ORACLE_TOL),
        PropertyStat::new("dominance", DOMINANCE_TOL),
        PropertyStat::new("competitors", COMPETITOR_SLACK),
        PropertyStat::new("triviality", 0.0),
    ];
    for _ in 0..trials {
        let case = draw_case(&mut rng);
        // Drawn cases are physical by construction.
        let residuals = evaluate_case(&case).unwrap();
        for (stat, (_, violation)) in stats.iter_mut().zip(residuals.named()) {
            // NEG_INFINITY marks "nothing applicable in this case".
            if violation > f64::NEG_INFINITY {
                stat.absorb(violation, &case);
            }
        }
    }
    VerifyReport {
        trials,
        seed,
        properties: stats,
    }
}

/// Outcome of the positivity scan over non-commuting pairs.
#[derive(Clone, Copy, Debug)]
pub struct TrivialityScan {
    pub qualifying_pairs: u64,
    /// Smallest dropped-covariance bound seen across qualifying pairs.
    pub min_bound: f64,
    pub pure_cases: u64,
    /// Pure cases where the competing product bound fell below `SUR_FLOOR`
    /// while the deviation-sum bound stayed positive.
    pub collapsed_sur_cases: u64,
}

/// Scan `pairs` non-commuting pairs for bound positivity, mixing generic
/// draws with the one-parameter pure family where the product bound is known
/// to collapse. The family's two exact collapse angles are always included.
pub fn triviality_scan(pairs: u64, seed: u64) -> TrivialityScan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scan = TrivialityScan {
        qualifying_pairs: 0,
        min_bound: f64::INFINITY,
        pure_cases: 0,
        collapsed_sur_cases: 0,
    };

    fn absorb(scan: &mut TrivialityScan, a: &PauliObservable, b: &PauliObservable, state: &BlochState) {
        if moments::commutator_measure(a, b) <= TRIVIALITY_F_MIN {
            return;
        }
        let bound = bounds::inequality_rhs(&[*a, *b], state).unwrap();
        scan.qualifying_pairs += 1;
        scan.min_bound = scan.min_bound.min(bound);
        if state.is_pure() {
            scan.pure_cases += 1;
            if bounds::sur_bound(a, b, state) < SUR_FLOOR {
                scan.collapsed_sur_cases += 1;
            }
        }
    }

    let (sx, sy) = (PauliObservable::SIGMA_X, PauliObservable::SIGMA_Y);
    for theta in [std::f64::consts::FRAC_PI_4, 3.0 * std::f64::consts::FRAC_PI_4] {
        absorb(&mut scan, &sx, &sy, &pure_family_state(theta).unwrap());
    }
    while scan.qualifying_pairs < pairs {
        if scan.qualifying_pairs % 10 == 9 {
            // One draw in ten walks the pure family.
            let theta = rng.random_range(0.0..std::f64::consts::PI);
            absorb(&mut scan, &sx, &sy, &pure_family_state(theta).unwrap());
        } else {
            let a = random_observable(&mut rng, -2.0, 2.0).unwrap();
            let b = random_observable(&mut rng, -2.0, 2.0).unwrap();
            let state = draw_state(&mut rng);
            absorb(&mut scan, &a, &b, &state);
        }
    }
    scan
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_run_passes_every_property() {
        let report = run(3000, 0);
        for p in &report.properties {
            assert!(p.passed(), "{} worst {} > {}", p.name, p.worst, p.tolerance);
            assert!(p.checks > 0);
            assert!(p.worst_case.is_some());
        }
        assert!(report.passed());
        assert!(report.first_failure().is_none());
        assert!(report.property("equality").is_some());
        assert!(report.property("nope").is_none());
    }

    #[test]
    fn runs_are_reproducible_per_seed() {
        let a = run(500, 9);
        let b = run(500, 9);
        for (x, y) in a.properties.iter().zip(&b.properties) {
            assert_eq!(x.worst, y.worst);
        }
    }

    #[test]
    fn replayed_case_reproduces_residuals() {
        let report = run(200, 3);
        let case = report.properties[0].worst_case.clone().unwrap();
        let first = evaluate_case(&case).unwrap();
        let second = evaluate_case(&case).unwrap();
        assert_eq!(first.equality, second.equality);
        assert_eq!(first.oracle, second.oracle);
        assert_eq!(first.competitors, second.competitors);
        // And the recorded worst is exactly what replay computes.
        assert_eq!(first.equality, report.properties[0].worst);
    }

    #[test]
    fn case_json_round_trip_is_lossless() {
        let case = CaseConfig {
            state: [0.1, -0.2, 0.3000000000000004],
            observables: vec![[1.0, 0.5, -0.25, 2.0], [0.0, 1.0, 0.0, -1.7]],
        };
        let text = serde_json::to_string(&case).unwrap();
        let back: CaseConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(case.state, back.state);
        assert_eq!(case.observables, back.observables);
    }

    #[test]
    fn unphysical_replay_case_is_rejected() {
        let case = CaseConfig {
            state: [1.0, 1.0, 0.0],
            observables: vec![[1.0, 0.0, 0.0, 0.0]; 2],
        };
        assert!(evaluate_case(&case).is_err());
    }

    #[test]
    fn positivity_scan_sees_collapsed_competitors() {
        let scan = triviality_scan(5000, 7);
        assert_eq!(scan.qualifying_pairs, 5000);
        assert!(scan.min_bound > 0.0);
        assert!(scan.collapsed_sur_cases >= 1, "{scan:?}");
        assert!(scan.pure_cases > 0);
    }
}
