//! Qubit states and observables in Bloch form.
//!
//! A state is a Bloch vector p with |p| <= 1 (rho = (I + p.sigma)/2), an
//! observable is a real quadruple a = (a1, a2, a3, a4) standing for
//! a.sigma + a4*I. Convention: |0> is the +1 eigenvector of sigma_z.
//!
//! The dense 2x2 complex form is kept around deliberately: every closed-form
//! quantity in this crate has a trace-based counterpart used as a cross-check.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, UnitSphere};

use crate::error::{Error, Result};

/// Slack allowed on |p|^2 <= 1 before a vector is rejected as unphysical.
pub const PHYSICALITY_TOL: f64 = 1e-12;

/// How close |p|^2 must be to 1 for a state to count as pure.
pub const PURITY_TOL: f64 = 1e-9;

fn dot(x: [f64; 3], y: [f64; 3]) -> f64 {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

pub(crate) fn cross(x: [f64; 3], y: [f64; 3]) -> [f64; 3] {
    [
        x[1] * y[2] - x[2] * y[1],
        x[2] * y[0] - x[0] * y[2],
        x[0] * y[1] - x[1] * y[0],
    ]
}

/// A qubit density matrix in Bloch form. Construction enforces physicality,
/// so a `BlochState` value is always a valid state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochState {
    p: [f64; 3],
}

impl BlochState {
    /// The completely mixed state, p = 0.
    pub const MAXIMALLY_MIXED: BlochState = BlochState { p: [0.0; 3] };

    pub fn new(p1: f64, p2: f64, p3: f64) -> Result<Self> {
        let p = [p1, p2, p3];
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                context: "Bloch vector",
            });
        }
        let norm_sq = dot(p, p);
        if norm_sq > 1.0 + PHYSICALITY_TOL {
            return Err(Error::UnphysicalState { norm_sq });
        }
        Ok(BlochState { p })
    }

    pub fn components(&self) -> [f64; 3] {
        self.p
    }

    pub fn norm_sq(&self) -> f64 {
        dot(self.p, self.p)
    }

    pub fn is_pure(&self) -> bool {
        (self.norm_sq() - 1.0).abs() <= PURITY_TOL
    }

    /// Dot the Bloch vector against an arbitrary real 3-vector.
    pub fn project(&self, axis: [f64; 3]) -> f64 {
        dot(self.p, axis)
    }

    /// rho = (I + p.sigma)/2 as a dense matrix.
    pub fn to_density(&self) -> DenseMatrix2 {
        let [p1, p2, p3] = self.p;
        DenseMatrix2::new([
            [
                Complex64::new((1.0 + p3) / 2.0, 0.0),
                Complex64::new(p1 / 2.0, -p2 / 2.0),
            ],
            [
                Complex64::new(p1 / 2.0, p2 / 2.0),
                Complex64::new((1.0 - p3) / 2.0, 0.0),
            ],
        ])
    }

    /// The unique pure state orthogonal to this one: the antipode -p.
    /// Only defined for pure states.
    pub fn orthogonal_pure(&self) -> Result<BlochState> {
        if !self.is_pure() {
            return Err(Error::NotPure {
                norm_sq: self.norm_sq(),
            });
        }
        Ok(BlochState {
            p: [-self.p[0], -self.p[1], -self.p[2]],
        })
    }
}

impl std::str::FromStr for BlochState {
    type Err = Error;

    /// Parses "p1,p2,p3".
    fn from_str(s: &str) -> Result<Self> {
        let parts = split_numbers(s, "state", 3)?;
        BlochState::new(parts[0], parts[1], parts[2])
    }
}

/// A Hermitian qubit observable a1*sx + a2*sy + a3*sz + a4*I.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliObservable {
    a: [f64; 4],
}

impl PauliObservable {
    pub const SIGMA_X: PauliObservable = PauliObservable {
        a: [1.0, 0.0, 0.0, 0.0],
    };
    pub const SIGMA_Y: PauliObservable = PauliObservable {
        a: [0.0, 1.0, 0.0, 0.0],
    };
    pub const SIGMA_Z: PauliObservable = PauliObservable {
        a: [0.0, 0.0, 1.0, 0.0],
    };
    pub const IDENTITY: PauliObservable = PauliObservable {
        a: [0.0, 0.0, 0.0, 1.0],
    };

    pub fn new(a1: f64, a2: f64, a3: f64, a4: f64) -> Result<Self> {
        let a = [a1, a2, a3, a4];
        if a.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                context: "observable coefficients",
            });
        }
        Ok(PauliObservable { a })
    }

    /// The Pauli part (a1, a2, a3).
    pub fn vector(&self) -> [f64; 3] {
        [self.a[0], self.a[1], self.a[2]]
    }

    /// The identity coefficient a4.
    pub fn scalar(&self) -> f64 {
        self.a[3]
    }

    pub fn coefficients(&self) -> [f64; 4] {
        self.a
    }

    pub fn vector_norm_sq(&self) -> f64 {
        dot(self.vector(), self.vector())
    }

    pub fn to_dense(&self) -> DenseMatrix2 {
        let [a1, a2, a3, a4] = self.a;
        DenseMatrix2::new([
            [
                Complex64::new(a4 + a3, 0.0),
                Complex64::new(a1, -a2),
            ],
            [Complex64::new(a1, a2), Complex64::new(a4 - a3, 0.0)],
        ])
    }

    /// Eigenvalues a4 +- |a| and the +1 axis a/|a|. The axis is `None`
    /// exactly when the Pauli part vanishes (degenerate spectrum).
    pub fn eigensystem(&self) -> EigenSystem {
        let r = self.vector_norm_sq().sqrt();
        let axis = if r == 0.0 {
            None
        } else {
            let v = self.vector();
            Some([v[0] / r, v[1] / r, v[2] / r])
        };
        EigenSystem {
            lambda_plus: self.a[3] + r,
            lambda_minus: self.a[3] - r,
            axis,
        }
    }
}

impl std::ops::Add for PauliObservable {
    type Output = PauliObservable;

    fn add(self, rhs: PauliObservable) -> PauliObservable {
        PauliObservable {
            a: [
                self.a[0] + rhs.a[0],
                self.a[1] + rhs.a[1],
                self.a[2] + rhs.a[2],
                self.a[3] + rhs.a[3],
            ],
        }
    }
}

impl std::str::FromStr for PauliObservable {
    type Err = Error;

    /// Parses "a1,a2,a3,a4" or one of the aliases sx, sy, sz, id.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sx" => return Ok(PauliObservable::SIGMA_X),
            "sy" => return Ok(PauliObservable::SIGMA_Y),
            "sz" => return Ok(PauliObservable::SIGMA_Z),
            "id" => return Ok(PauliObservable::IDENTITY),
            _ => {}
        }
        let parts = split_numbers(s, "observable", 4)?;
        PauliObservable::new(parts[0], parts[1], parts[2], parts[3])
    }
}

/// Spectrum of a qubit observable. `axis` is the Bloch direction of the
/// +|a| eigenprojector; absent for multiples of the identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSystem {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub axis: Option<[f64; 3]>,
}

impl EigenSystem {
    pub fn is_degenerate(&self) -> bool {
        self.axis.is_none()
    }
}

fn split_numbers(s: &str, what: &'static str, expect: usize) -> Result<Vec<f64>> {
    let tokens: Vec<&str> = s.split(',').collect();
    if tokens.len() != expect {
        return Err(Error::Parse {
            what,
            input: s.to_string(),
            reason: format!("expected {} comma-separated numbers, got {}", expect, tokens.len()),
        });
    }
    let mut out = Vec::with_capacity(expect);
    for (idx, tok) in tokens.iter().enumerate() {
        let v: f64 = tok.trim().parse().map_err(|_| Error::Parse {
            what,
            input: s.to_string(),
            reason: format!("token '{}' at position {} is not a number", tok.trim(), idx + 1),
        })?;
        out.push(v);
    }
    Ok(out)
}

/// Dense 2x2 complex matrix. Small enough to live on the stack; used for the
/// trace-based oracle paths and the pure-state bound evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DenseMatrix2 {
    m: [[Complex64; 2]; 2],
}

impl DenseMatrix2 {
    pub fn new(m: [[Complex64; 2]; 2]) -> Self {
        DenseMatrix2 { m }
    }

    pub fn identity() -> Self {
        DenseMatrix2::new([
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ])
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = *self;
        for row in &mut out.m {
            for e in row.iter_mut() {
                *e *= c;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        DenseMatrix2::new([
            [self.m[0][0].conj(), self.m[1][0].conj()],
            [self.m[0][1].conj(), self.m[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.m[0][0].im).abs() <= tol
            && (self.m[1][1].im).abs() <= tol
            && (self.m[0][1] - self.m[1][0].conj()).norm() <= tol
    }

    /// Eigenvalues of a Hermitian matrix via trace and determinant,
    /// descending order.
    pub fn hermitian_eigenvalues(&self) -> (f64, f64) {
        let t = self.trace().re;
        let det = (self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]).re;
        let disc = (t * t - 4.0 * det).max(0.0).sqrt();
        ((t + disc) / 2.0, (t - disc) / 2.0)
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }
}

impl std::ops::Add for DenseMatrix2 {
    type Output = DenseMatrix2;

    fn add(self, rhs: DenseMatrix2) -> DenseMatrix2 {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] += rhs.m[r][c];
            }
        }
        out
    }
}

impl std::ops::Sub for DenseMatrix2 {
    type Output = DenseMatrix2;

    fn sub(self, rhs: DenseMatrix2) -> DenseMatrix2 {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] -= rhs.m[r][c];
            }
        }
        out
    }
}

impl std::ops::Mul for DenseMatrix2 {
    type Output = DenseMatrix2;

    fn mul(self, rhs: DenseMatrix2) -> DenseMatrix2 {
        let a = &self.m;
        let b = &rhs.m;
        DenseMatrix2::new([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

/// Amplitudes of a pure state as a normalized 2-vector, global phase fixed by
/// taking the better-conditioned column of rho.
pub fn pure_state_vector(state: &BlochState) -> Result<[Complex64; 2]> {
    if !state.is_pure() {
        return Err(Error::NotPure {
            norm_sq: state.norm_sq(),
        });
    }
    let [p1, p2, p3] = state.components();
    // Columns of rho are multiples of the state vector; pick the one whose
    // diagonal entry is larger so normalization never divides by ~0.
    let (v0, v1) = if p3 >= 0.0 {
        (Complex64::new(1.0 + p3, 0.0), Complex64::new(p1, p2))
    } else {
        (Complex64::new(p1, -p2), Complex64::new(1.0 - p3, 0.0))
    };
    let norm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
    Ok([v0 / norm, v1 / norm])
}

pub fn inner_product(x: [Complex64; 2], y: [Complex64; 2]) -> Complex64 {
    x[0].conj() * y[0] + x[1].conj() * y[1]
}

/// Uniform pure state: a uniformly random direction on the unit sphere.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R) -> BlochState {
    let p: [f64; 3] = UnitSphere.sample(rng);
    BlochState { p }
}

/// State uniform in the solid Bloch ball: uniform direction, radius u^(1/3).
pub fn random_ball_state<R: Rng + ?Sized>(rng: &mut R) -> BlochState {
    let dir: [f64; 3] = UnitSphere.sample(rng);
    let r = rng.random::<f64>().cbrt();
    BlochState {
        p: [r * dir[0], r * dir[1], r * dir[2]],
    }
}

/// Random state of fixed Bloch radius gamma (fixed mixedness (1 - gamma^2)/2).
pub fn random_fixed_purity_state<R: Rng + ?Sized>(rng: &mut R, gamma: f64) -> Result<BlochState> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            value: gamma,
        });
    }
    let dir: [f64; 3] = UnitSphere.sample(rng);
    Ok(BlochState {
        p: [gamma * dir[0], gamma * dir[1], gamma * dir[2]],
    })
}

/// Observable with all four coefficients drawn uniformly from [lo, hi].
pub fn random_observable<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> Result<PauliObservable> {
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::InvalidParameter {
            name: "coefficient range",
            value: hi - lo,
        });
    }
    Ok(PauliObservable {
        a: [
            rng.random_range(lo..=hi),
            rng.random_range(lo..=hi),
            rng.random_range(lo..=hi),
            rng.random_range(lo..=hi),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn state_construction_enforces_ball() {
        assert!(BlochState::new(0.6, 0.0, 0.0).is_ok());
        assert!(BlochState::new(0.0, 0.0, 1.0).is_ok());
        // |p|^2 = 1.28: outside the ball even with slack.
        let err = BlochState::new(0.8, 0.8, 0.0).unwrap_err();
        assert!(matches!(err, Error::UnphysicalState { .. }));
        assert!(BlochState::new(f64::NAN, 0.0, 0.0).is_err());
        // Right at the tolerance boundary is still accepted.
        let eps = (1.0 + 0.9e-12_f64).sqrt();
        assert!(BlochState::new(eps, 0.0, 0.0).is_ok());
    }

    #[test]
    fn density_of_plus_x_state() {
        let rho = BlochState::new(1.0, 0.0, 0.0).unwrap().to_density();
        for (r, col) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert_eq!(rho.entry(r, col), c(0.5, 0.0));
        }
        assert!(rho.is_hermitian(0.0));
        assert_eq!(rho.trace(), c(1.0, 0.0));
    }

    #[test]
    fn density_eigenvalues_stay_in_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let rho = random_ball_state(&mut rng).to_density();
            let (hi, lo) = rho.hermitian_eigenvalues();
            assert!(rho.is_hermitian(1e-15));
            assert!((rho.trace().re - 1.0).abs() < 1e-15);
            assert!(lo >= -1e-12 && hi <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn observable_dense_form() {
        // sy + 2I
        let m = PauliObservable::new(0.0, 1.0, 0.0, 2.0).unwrap().to_dense();
        assert_eq!(m.entry(0, 0), c(2.0, 0.0));
        assert_eq!(m.entry(0, 1), c(0.0, -1.0));
        assert_eq!(m.entry(1, 0), c(0.0, 1.0));
        assert_eq!(m.entry(1, 1), c(2.0, 0.0));
        assert!(m.is_hermitian(0.0));
    }

    #[test]
    fn eigensystem_of_shifted_sigma_x() {
        let es = PauliObservable::new(3.0, 0.0, 0.0, 5.0).unwrap().eigensystem();
        assert_eq!(es.lambda_plus, 8.0);
        assert_eq!(es.lambda_minus, 2.0);
        assert_eq!(es.axis, Some([1.0, 0.0, 0.0]));
        assert!(!es.is_degenerate());

        let id = PauliObservable::new(0.0, 0.0, 0.0, 4.0).unwrap().eigensystem();
        assert!(id.is_degenerate());
        assert_eq!(id.lambda_plus, 4.0);
        assert_eq!(id.lambda_minus, 4.0);
    }

    #[test]
    fn eigensystem_matches_dense_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let a = random_observable(&mut rng, -2.0, 2.0).unwrap();
            let es = a.eigensystem();
            let (hi, lo) = a.to_dense().hermitian_eigenvalues();
            assert!((es.lambda_plus - hi).abs() <= 1e-12 * (1.0 + hi.abs()));
            assert!((es.lambda_minus - lo).abs() <= 1e-12 * (1.0 + lo.abs()));
        }
    }

    #[test]
    fn orthogonal_pure_is_antipodal() {
        let s = BlochState::new(0.0, 0.0, 1.0).unwrap();
        let o = s.orthogonal_pure().unwrap();
        assert_eq!(o.components(), [0.0, 0.0, -1.0]);
        // <psi|psi_perp> = 0 in the dense picture.
        let v = pure_state_vector(&s).unwrap();
        let w = pure_state_vector(&o).unwrap();
        assert!(inner_product(v, w).norm() < 1e-15);

        let mixed = BlochState::new(0.3, 0.0, 0.0).unwrap();
        assert!(matches!(mixed.orthogonal_pure(), Err(Error::NotPure { .. })));
    }

    #[test]
    fn pure_state_vector_reconstructs_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let s = random_pure_state(&mut rng);
            let v = pure_state_vector(&s).unwrap();
            let rho = s.to_density();
            // |psi><psi| entrywise.
            for r in 0..2 {
                for col in 0..2 {
                    let outer = v[r] * v[col].conj();
                    assert!((outer - rho.entry(r, col)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn sampled_states_land_where_advertised() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10_000 {
            let pure = random_pure_state(&mut rng);
            assert!((pure.norm_sq() - 1.0).abs() < 1e-12);
            let ball = random_ball_state(&mut rng);
            assert!(ball.norm_sq() <= 1.0 + 1e-12);
            let fixed = random_fixed_purity_state(&mut rng, 0.6).unwrap();
            assert!((fixed.norm_sq() - 0.36).abs() < 1e-12);
        }
        assert!(random_fixed_purity_state(&mut rng, 1.5).is_err());
        assert!(random_fixed_purity_state(&mut rng, -0.1).is_err());
    }

    #[test]
    fn sampling_is_deterministic_for_a_seed() {
        let mut a = ChaCha8Rng::seed_from_u64(42);
        let mut b = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            assert_eq!(
                random_ball_state(&mut a).components(),
                random_ball_state(&mut b).components()
            );
            assert_eq!(
                random_observable(&mut a, -2.0, 2.0).unwrap().coefficients(),
                random_observable(&mut b, -2.0, 2.0).unwrap().coefficients()
            );
        }
    }

    #[test]
    fn observable_coefficients_respect_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let a = random_observable(&mut rng, -2.0, 2.0).unwrap();
            assert!(a.coefficients().iter().all(|&x| (-2.0..=2.0).contains(&x)));
        }
        assert!(random_observable(&mut rng, 1.0, -1.0).is_err());
    }

    #[test]
    fn parse_observable_aliases_and_quadruples() {
        assert_eq!("sx".parse::<PauliObservable>().unwrap(), PauliObservable::SIGMA_X);
        assert_eq!("sy".parse::<PauliObservable>().unwrap(), PauliObservable::SIGMA_Y);
        assert_eq!("sz".parse::<PauliObservable>().unwrap(), PauliObservable::SIGMA_Z);
        assert_eq!("id".parse::<PauliObservable>().unwrap(), PauliObservable::IDENTITY);
        let a: PauliObservable = "1,0.5,-2,0.25".parse().unwrap();
        assert_eq!(a.coefficients(), [1.0, 0.5, -2.0, 0.25]);

        let err = "1,x,3,4".parse::<PauliObservable>().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("'x'") && msg.contains("position 2"), "{msg}");

        assert!("1,2,3".parse::<PauliObservable>().is_err());
    }

    #[test]
    fn parse_state_triples() {
        let s: BlochState = "0.6, 0, 0".parse().unwrap();
        assert_eq!(s.components(), [0.6, 0.0, 0.0]);
        assert!("2,0,0".parse::<BlochState>().is_err()); // unphysical
        let err = "0.1,0.2".parse::<BlochState>().unwrap_err();
        assert!(err.to_string().contains("expected 3"));
    }

    #[test]
    fn dense_algebra_basics() {
        let x = PauliObservable::SIGMA_X.to_dense();
        let y = PauliObservable::SIGMA_Y.to_dense();
        let z = PauliObservable::SIGMA_Z.to_dense();
        // sx*sy = i*sz and the anticommutator vanishes.
        assert_eq!(x * y, z.scale(c(0.0, 1.0)));
        assert_eq!((x * y + y * x).trace(), c(0.0, 0.0));
        assert_eq!((x * y + y * x).entry(0, 0), c(0.0, 0.0));
        // sx^2 = I.
        assert_eq!(x * x, DenseMatrix2::identity());
        assert_eq!(x.adjoint(), x);
        assert_eq!((x - x).trace(), c(0.0, 0.0));
        let v = x.apply([c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(v, [c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn observable_addition_is_componentwise() {
        let s = PauliObservable::SIGMA_X + PauliObservable::new(0.0, 1.0, 0.0, 2.0).unwrap();
        assert_eq!(s.coefficients(), [1.0, 1.0, 0.0, 2.0]);
    }
}
