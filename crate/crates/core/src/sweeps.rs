//! Parameter sweeps that turn the bound family into plottable grids.
//!
//! Three canonical grids, all over the Pauli axes:
//!   fig1: (theta, phi) in [0, pi]^2 at fixed Bloch radius, triple (x, y, z)
//!   fig2: mixedness M in [0, 1/2] at a fixed direction, triple (x, y, z)
//!   fig3: the pure family p = (sin 2theta, 0, -cos 2theta), pair (x, y),
//!         carrying the closed-form curves next to the general evaluation
//! Grids are pure functions of their parameters; byte-stable output falls
//! out of that plus the fixed iteration order (row-major, axes as listed).

use crate::bounds;
use crate::error::{Error, Result};
use crate::moments;
use crate::pauli::{BlochState, PauliObservable};

/// Denominators at or below this are reported as undefined rather than as a
/// huge ratio.
pub const RATIO_FLOOR: f64 = 1e-12;

const TRIPLE: [PauliObservable; 3] = [
    PauliObservable::SIGMA_X,
    PauliObservable::SIGMA_Y,
    PauliObservable::SIGMA_Z,
];

const PAIR: [PauliObservable; 2] = [PauliObservable::SIGMA_X, PauliObservable::SIGMA_Y];

/// How tightly each bound hugs its left side, as LHS/bound. `None` when the
/// bound does not apply at this observable count or its value is too close
/// to zero to divide by.
#[derive(Clone, Copy, Debug, Default)]
pub struct TightnessRatios {
    /// Deviation sum over the deviation-sum bound.
    pub t1: Option<f64>,
    /// Variance sum over the summed-observable triple bound.
    pub t2: Option<f64>,
    /// Variance sum over the separate-commutators triple bound.
    pub t3: Option<f64>,
    /// Variance sum over the pairwise-sums bound.
    pub t4: Option<f64>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > RATIO_FLOOR).then(|| num / den)
}

/// All applicable tightness ratios for one configuration.
pub fn tightness(obs: &[PauliObservable], state: &BlochState) -> TightnessRatios {
    let mut t = TightnessRatios::default();
    let n = obs.len();
    if n < 2 {
        return t;
    }
    let sum_std: f64 = obs.iter().map(|a| moments::stddev(a, state)).sum();
    let sum_var: f64 = obs.iter().map(|a| moments::variance(a, state)).sum();
    // n >= 2 was just checked, so the bound calls cannot fail.
    t.t1 = ratio(sum_std, bounds::inequality_rhs(obs, state).unwrap());
    if n == 3 {
        t.t2 = ratio(sum_var, bounds::triple_bound_sum(&obs[0], &obs[1], &obs[2], state));
        t.t3 = ratio(
            sum_var,
            bounds::triple_bound_commutators(&obs[0], &obs[1], &obs[2], state),
        );
    }
    if n >= 3 {
        t.t4 = ratio(sum_var, bounds::n_observable_bound(obs, state).unwrap());
    }
    t
}

/// One evaluated grid node. `l_new`/`l_sur` hold the closed-form pure-family
/// curves and only appear on fig3 grids; `rhs_sur` is the general-path
/// product bound kept alongside them for cross-checking.
#[derive(Clone, Copy, Debug)]
pub struct SweepPoint {
    pub gamma: f64,
    pub theta: f64,
    pub phi: f64,
    pub mixedness: f64,
    pub lhs_sum_std: f64,
    pub lhs_sum_var: f64,
    pub rhs_eq14: f64,
    pub rhs_eq3: Option<f64>,
    pub rhs_eq4: Option<f64>,
    pub rhs_eq5: Option<f64>,
    pub rhs_sur: Option<f64>,
    pub ratios: TightnessRatios,
    pub l_new: Option<f64>,
    pub l_sur: Option<f64>,
}

/// One grid axis: `steps` evenly spaced values from `min` to `max`,
/// endpoints included.
#[derive(Clone, Debug)]
pub struct SweepAxis {
    pub name: &'static str,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl SweepAxis {
    fn value(&self, k: usize) -> f64 {
        // Hit the far endpoint exactly; grid consumers anchor tests there.
        if k == self.steps - 1 {
            self.max
        } else {
            self.min + (self.max - self.min) * k as f64 / (self.steps - 1) as f64
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    Fig1,
    Fig2,
    Fig3,
}

impl SweepKind {
    pub fn name(&self) -> &'static str {
        match self {
            SweepKind::Fig1 => "fig1",
            SweepKind::Fig2 => "fig2",
            SweepKind::Fig3 => "fig3",
        }
    }
}

/// A fully evaluated sweep: axes plus one point per grid node, row-major in
/// the axis order.
#[derive(Clone, Debug)]
pub struct SweepGrid {
    pub kind: SweepKind,
    pub axes: Vec<SweepAxis>,
    pub points: Vec<SweepPoint>,
}

/// Bloch vector of radius `gamma` in direction (theta, phi).
pub fn spherical_state(gamma: f64, theta: f64, phi: f64) -> Result<BlochState> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            value: gamma,
        });
    }
    if !theta.is_finite() || !phi.is_finite() {
        return Err(Error::NonFinite {
            context: "sweep angles",
        });
    }
    BlochState::new(
        gamma * theta.sin() * phi.cos(),
        gamma * theta.sin() * phi.sin(),
        gamma * theta.cos(),
    )
}

/// The fig3 pure family: p(theta) = (sin 2theta, 0, -cos 2theta).
pub fn pure_family_state(theta: f64) -> Result<BlochState> {
    if !theta.is_finite() {
        return Err(Error::NonFinite {
            context: "family angle",
        });
    }
    BlochState::new((2.0 * theta).sin(), 0.0, -(2.0 * theta).cos())
}

fn check_steps(steps: usize) -> Result<()> {
    if steps < 2 {
        return Err(Error::TooFewSteps { steps, min: 2 });
    }
    Ok(())
}

fn triple_point(gamma: f64, theta: f64, phi: f64, state: &BlochState) -> SweepPoint {
    let lhs_sum_std: f64 = TRIPLE.iter().map(|a| moments::stddev(a, state)).sum();
    let lhs_sum_var: f64 = TRIPLE.iter().map(|a| moments::variance(a, state)).sum();
    SweepPoint {
        gamma,
        theta,
        phi,
        mixedness: moments::mixedness(state),
        lhs_sum_std,
        lhs_sum_var,
        rhs_eq14: bounds::inequality_rhs(&TRIPLE, state).unwrap(),
        rhs_eq3: Some(bounds::triple_bound_sum(&TRIPLE[0], &TRIPLE[1], &TRIPLE[2], state)),
        rhs_eq4: Some(bounds::triple_bound_commutators(
            &TRIPLE[0], &TRIPLE[1], &TRIPLE[2], state,
        )),
        rhs_eq5: Some(bounds::n_observable_bound(&TRIPLE, state).unwrap()),
        rhs_sur: None,
        ratios: tightness(&TRIPLE, state),
        l_new: None,
        l_sur: None,
    }
}

/// Fixed-radius sweep of the (x, y, z) triple over direction angles.
pub fn sweep_fig1(gamma: f64, theta_steps: usize, phi_steps: usize) -> Result<SweepGrid> {
    check_steps(theta_steps)?;
    check_steps(phi_steps)?;
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            value: gamma,
        });
    }
    let theta_axis = SweepAxis {
        name: "theta",
        min: 0.0,
        max: std::f64::consts::PI,
        steps: theta_steps,
    };
    let phi_axis = SweepAxis {
        name: "phi",
        min: 0.0,
        max: std::f64::consts::PI,
        steps: phi_steps,
    };
    let mut points = Vec::with_capacity(theta_steps * phi_steps);
    for it in 0..theta_steps {
        let theta = theta_axis.value(it);
        for ip in 0..phi_steps {
            let phi = phi_axis.value(ip);
            let state = spherical_state(gamma, theta, phi)?;
            points.push(triple_point(gamma, theta, phi, &state));
        }
    }
    Ok(SweepGrid {
        kind: SweepKind::Fig1,
        axes: vec![theta_axis, phi_axis],
        points,
    })
}

/// Mixedness sweep of the (x, y, z) triple at a fixed Bloch direction.
pub fn sweep_fig2(theta: f64, phi: f64, steps: usize) -> Result<SweepGrid> {
    check_steps(steps)?;
    if !theta.is_finite() || !phi.is_finite() {
        return Err(Error::NonFinite {
            context: "sweep angles",
        });
    }
    let m_axis = SweepAxis {
        name: "M",
        min: 0.0,
        max: 0.5,
        steps,
    };
    let mut points = Vec::with_capacity(steps);
    for k in 0..steps {
        let m = m_axis.value(k);
        let gamma = (1.0 - 2.0 * m).max(0.0).sqrt();
        let state = spherical_state(gamma, theta, phi)?;
        points.push(triple_point(gamma, theta, phi, &state));
    }
    Ok(SweepGrid {
        kind: SweepKind::Fig2,
        axes: vec![m_axis],
        points,
    })
}

/// Pure-family sweep of the (x, y) pair, with closed-form curves alongside
/// the generally evaluated bounds.
pub fn sweep_fig3(steps: usize) -> Result<SweepGrid> {
    check_steps(steps)?;
    let theta_axis = SweepAxis {
        name: "theta",
        min: 0.0,
        max: std::f64::consts::PI,
        steps,
    };
    let mut points = Vec::with_capacity(steps);
    for k in 0..steps {
        let theta = theta_axis.value(k);
        let state = pure_family_state(theta)?;
        let lhs_sum_std: f64 = PAIR.iter().map(|a| moments::stddev(a, &state)).sum();
        let lhs_sum_var: f64 = PAIR.iter().map(|a| moments::variance(a, &state)).sum();
        let (l_new, l_sur) = bounds::closed_form_curves(theta);
        points.push(SweepPoint {
            gamma: 1.0,
            theta,
            phi: 0.0,
            mixedness: moments::mixedness(&state),
            lhs_sum_std,
            lhs_sum_var,
            rhs_eq14: bounds::inequality_rhs(&PAIR, &state).unwrap(),
            rhs_eq3: None,
            rhs_eq4: None,
            rhs_eq5: None,
            rhs_sur: Some(bounds::sur_bound(&PAIR[0], &PAIR[1], &state)),
            ratios: tightness(&PAIR, &state),
            l_new: Some(l_new),
            l_sur: Some(l_sur),
        });
    }
    Ok(SweepGrid {
        kind: SweepKind::Fig3,
        axes: vec![theta_axis],
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn tightness_frozen_values_on_polarized_state() {
        let s = BlochState::new(0.0, 0.0, 0.8f64.sqrt()).unwrap();
        let t = tightness(&TRIPLE, &s);
        assert!((t.t1.unwrap() - 1.064994780108696).abs() < 1e-9);
        assert!((t.t2.unwrap() - 1.245662199154446).abs() < 1e-9);
        assert!((t.t3.unwrap() - 2.130140840414_08).abs() < 1e-9);
        assert!((t.t4.unwrap() - 1.911702524470863).abs() < 1e-9);
    }

    #[test]
    fn tightness_reports_undefined_denominators_as_none() {
        // On the completely mixed state every commutator expectation dies,
        // so the separate-commutators ratio has nothing to divide by.
        let t = tightness(&TRIPLE, &BlochState::MAXIMALLY_MIXED);
        assert!(t.t3.is_none());
        assert!(t.t1.is_some() && t.t2.is_some() && t.t4.is_some());

        // A pair never has triple ratios.
        let t = tightness(&PAIR, &BlochState::MAXIMALLY_MIXED);
        assert!(t.t1.is_some());
        assert!(t.t2.is_none() && t.t3.is_none() && t.t4.is_none());

        // Fewer than two observables: nothing applies.
        let t = tightness(&TRIPLE[..1], &BlochState::MAXIMALLY_MIXED);
        assert!(t.t1.is_none() && t.t4.is_none());
    }

    #[test]
    fn spherical_state_places_the_vector() {
        let s = spherical_state(0.8f64.sqrt(), FRAC_PI_2, 0.0).unwrap();
        let [p1, p2, p3] = s.components();
        assert!((p1 - 0.8f64.sqrt()).abs() < 1e-15);
        assert!(p2.abs() < 1e-16);
        assert!(p3.abs() < 1e-16);
        assert!(spherical_state(1.2, 0.0, 0.0).is_err());
        assert!(spherical_state(-0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn fig1_grid_shape_and_constant_mixedness() {
        let grid = sweep_fig1(0.8f64.sqrt(), 9, 7).unwrap();
        assert_eq!(grid.points.len(), 63);
        assert_eq!(grid.axes[0].steps, 9);
        assert_eq!(grid.axes[1].steps, 7);
        // Row-major: the second point moves phi, not theta.
        assert_eq!(grid.points[0].theta, 0.0);
        assert_eq!(grid.points[0].phi, 0.0);
        assert_eq!(grid.points[1].theta, 0.0);
        assert!(grid.points[1].phi > 0.0);
        let last = grid.points.last().unwrap();
        assert_eq!(last.theta, PI);
        assert_eq!(last.phi, PI);
        for p in &grid.points {
            assert!((p.mixedness - 0.1).abs() < 1e-12);
            assert!(p.ratios.t1.unwrap() >= 1.0 - 1e-10);
        }
        assert!(sweep_fig1(0.5, 1, 8).is_err());
        assert!(sweep_fig1(2.0, 8, 8).is_err());
    }

    #[test]
    fn fig2_grid_covers_the_mixedness_range() {
        let grid = sweep_fig2(3.0 * FRAC_PI_4, FRAC_PI_4, 11).unwrap();
        assert_eq!(grid.points.len(), 11);
        assert_eq!(grid.points[0].mixedness, 0.0);
        let last = grid.points.last().unwrap();
        assert_eq!(last.mixedness, 0.5);
        assert_eq!(last.gamma, 0.0);
        // At full mixedness the bound is exact.
        assert!((last.ratios.t1.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fig3_general_path_matches_closed_forms() {
        let grid = sweep_fig3(65).unwrap();
        for p in &grid.points {
            let scale = 1.0_f64.max(p.rhs_eq14);
            assert!((p.l_new.unwrap() - p.rhs_eq14).abs() <= 1e-12 * scale);
            assert!((p.l_sur.unwrap() - p.rhs_sur.unwrap()).abs() <= 1e-12);
            // Pure family: deviations are bounded below by 1 here.
            assert!(p.lhs_sum_std >= p.rhs_eq14 - 1e-12);
        }
        // Grid node 16 of 65 sits exactly at theta = pi/4.
        let anchor = &grid.points[16];
        assert_eq!(anchor.theta, FRAC_PI_4);
        assert!(anchor.l_sur.unwrap() < 1e-12);
        assert!((anchor.l_new.unwrap() - 1.0).abs() < 1e-12);
    }
}
