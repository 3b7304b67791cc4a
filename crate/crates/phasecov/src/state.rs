//! Exact 2×2 complex-Hermitian state algebra.
//!
//! A qubit density matrix is stored as the excited population `p1` (the
//! bottom-right diagonal entry) together with the coherence `α` (the
//! bottom-left entry):
//!
//! ```text
//! ρ = [ 1 - p1   α*  ]
//!     [   α      p1  ]
//! ```
//!
//! The trace is 1 by construction; positivity requires
//! `p1 (1 - p1) - |α|² ≥ 0`.

use num_complex::Complex64;

use crate::{Error, Result};

/// Positivity defects up to this size are accepted unchanged.
pub const POSITIVITY_TOL: f64 = 1e-12;
/// Positivity defects up to this size are repaired by clamping the coherence;
/// larger defects are rejected. Quadrature round-off in long sweeps must not
/// abort a run.
pub const POSITIVITY_CLAMP: f64 = 1e-9;

/// Single-qubit density matrix in the phase-covariant layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    p1: f64,
    alpha: Complex64,
}

impl QubitState {
    /// Builds a state from the excited population and the coherence,
    /// validating trace bounds and positivity.
    pub fn new(p1: f64, alpha: Complex64) -> Result<Self> {
        if !p1.is_finite() || !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::NotPositive { defect: f64::NAN });
        }
        if !(-POSITIVITY_CLAMP..=1.0 + POSITIVITY_CLAMP).contains(&p1) {
            return Err(Error::NotPositive {
                defect: p1.max(1.0 - p1) - 1.0,
            });
        }
        let p1 = p1.clamp(0.0, 1.0);
        let defect = alpha.norm_sqr() - p1 * (1.0 - p1);
        if defect <= POSITIVITY_TOL {
            return Ok(Self { p1, alpha });
        }
        if defect <= POSITIVITY_CLAMP {
            // Shrink the coherence radially onto the positivity boundary.
            let scale = (p1 * (1.0 - p1)).sqrt() / alpha.norm();
            return Ok(Self {
                p1,
                alpha: alpha * scale,
            });
        }
        Err(Error::NotPositive { defect })
    }

    /// Pure state `cos(θ/2)|0⟩ + sin(θ/2)|1⟩`.
    pub fn from_theta(theta: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        Self {
            p1: s * s,
            alpha: Complex64::new(s * c, 0.0),
        }
    }

    /// Pure state `√r|0⟩ + √(1-r)|1⟩`, i.e. `from_theta(2·arccos √r)`.
    pub fn from_r(r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidParams(format!(
                "excitation split r = {r} outside [0, 1]"
            )));
        }
        Ok(Self::from_theta(2.0 * r.sqrt().acos()))
    }

    /// State with Bloch vector `v`, i.e. `ρ = (1 + v·σ)/2`, so
    /// `p1 = (1 - rz)/2` and `α = (rx + i ry)/2`.
    pub fn from_bloch(v: BlochVector) -> Result<Self> {
        let norm = v.norm();
        if norm > 1.0 + 1e-9 {
            return Err(Error::BlochNormTooLarge { norm });
        }
        // Radial round-off just outside the ball is projected back onto it.
        let scale = if norm > 1.0 { 1.0 / norm } else { 1.0 };
        Self::new(
            0.5 * (1.0 - scale * v.rz),
            Complex64::new(0.5 * scale * v.rx, 0.5 * scale * v.ry),
        )
    }

    /// Excited population (bottom-right entry of ρ).
    pub fn p1(&self) -> f64 {
        self.p1
    }

    /// Ground population (top-left entry of ρ).
    pub fn p0(&self) -> f64 {
        1.0 - self.p1
    }

    /// Coherence α (bottom-left entry of ρ).
    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    /// Bloch vector of the state.
    pub fn bloch(&self) -> BlochVector {
        BlochVector {
            rx: 2.0 * self.alpha.re,
            ry: 2.0 * self.alpha.im,
            rz: 1.0 - 2.0 * self.p1,
        }
    }

    /// Purity `tr ρ²`.
    pub fn purity(&self) -> f64 {
        let p0 = 1.0 - self.p1;
        p0 * p0 + self.p1 * self.p1 + 2.0 * self.alpha.norm_sqr()
    }

    /// Whether the state is pure to within `tol` in purity.
    pub fn is_pure(&self, tol: f64) -> bool {
        (1.0 - self.purity()).abs() <= tol
    }

    /// Dense 2×2 matrix form of the state.
    pub fn matrix(&self) -> HermitianMatrix2 {
        HermitianMatrix2::from_parts(1.0 - self.p1, self.p1, self.alpha)
    }

    /// l₁ coherence, the sum of the moduli of the off-diagonal entries:
    /// `C = 2|α|`.
    pub fn coherence_l1(&self) -> f64 {
        2.0 * self.alpha.norm()
    }

    /// Mixedness as normalized linear entropy, `M = 2(1 - tr ρ²)`.
    pub fn mixedness(&self) -> f64 {
        2.0 * (1.0 - self.purity())
    }

    /// Coherence–mixedness trade-off `C² + M`, which collapses to
    /// `4 p1 (1 - p1)` for this state layout and is bounded by 1.
    pub fn tradeoff_mcl(&self) -> f64 {
        let c = self.coherence_l1();
        let value = c * c + self.mixedness();
        debug_assert!((value - 4.0 * self.p1 * (1.0 - self.p1)).abs() <= 1e-12);
        value
    }

    /// Conjugation by `exp(-i σ_z φ)`, a rotation about the z axis of the
    /// Bloch ball: populations are untouched, `α ↦ α e^{2iφ}`.
    pub fn rotate_z(&self, phi: f64) -> Self {
        Self {
            p1: self.p1,
            alpha: self.alpha * Complex64::from_polar(1.0, 2.0 * phi),
        }
    }
}

/// Bloch vector with `rx² + ry² + rz² ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl BlochVector {
    pub fn new(rx: f64, ry: f64, rz: f64) -> Result<Self> {
        let v = Self { rx, ry, rz };
        let norm = v.norm();
        if norm > 1.0 + 1e-9 {
            return Err(Error::BlochNormTooLarge { norm });
        }
        Ok(v)
    }

    pub fn norm(&self) -> f64 {
        (self.rx * self.rx + self.ry * self.ry + self.rz * self.rz).sqrt()
    }
}

/// Dense 2×2 complex Hermitian matrix. Used for density matrices and for
/// generator outputs `L(ρ)`, both of which are Hermitian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianMatrix2 {
    m00: Complex64,
    m01: Complex64,
    m10: Complex64,
    m11: Complex64,
}

impl HermitianMatrix2 {
    /// Validates Hermiticity of the four entries to 1e-12.
    pub fn new(m00: Complex64, m01: Complex64, m10: Complex64, m11: Complex64) -> Result<Self> {
        let deviation = m00
            .im
            .abs()
            .max(m11.im.abs())
            .max((m01 - m10.conj()).norm());
        if deviation > 1e-12 {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { m00, m01, m10, m11 })
    }

    /// Builds a Hermitian matrix from its real diagonal and the lower
    /// off-diagonal entry; Hermiticity holds by construction.
    pub fn from_parts(d0: f64, d1: f64, lower: Complex64) -> Self {
        Self {
            m00: Complex64::new(d0, 0.0),
            m01: lower.conj(),
            m10: lower,
            m11: Complex64::new(d1, 0.0),
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        match (row, col) {
            (0, 0) => self.m00,
            (0, 1) => self.m01,
            (1, 0) => self.m10,
            (1, 1) => self.m11,
            _ => panic!("index out of range for a 2x2 matrix"),
        }
    }

    pub fn trace(&self) -> f64 {
        self.m00.re + self.m11.re
    }

    /// Eigenvalues in closed form from trace and determinant; never by an
    /// iterative solver.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.m00.re + self.m11.re);
        let half_gap = 0.5 * (self.m00.re - self.m11.re);
        let radius = (half_gap * half_gap + self.m10.norm_sqr()).sqrt();
        (mean - radius, mean + radius)
    }

    /// Operator, Hilbert–Schmidt (Frobenius) and trace norms.
    ///
    /// The operator and trace norms come from the closed-form eigenvalues
    /// (singular values of a Hermitian matrix are |eigenvalues|); the
    /// Hilbert–Schmidt norm is computed entrywise, which keeps the two routes
    /// independent. The ordering `op ≤ hs ≤ tr` always holds.
    pub fn norms(&self) -> MatrixNorms {
        let (lo, hi) = self.eigenvalues();
        let hs = (self.m00.norm_sqr()
            + self.m01.norm_sqr()
            + self.m10.norm_sqr()
            + self.m11.norm_sqr())
        .sqrt();
        MatrixNorms {
            op: lo.abs().max(hi.abs()),
            hs,
            tr: lo.abs() + hi.abs(),
        }
    }
}

/// The three matrix norms of a Hermitian 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixNorms {
    /// Largest singular value.
    pub op: f64,
    /// Frobenius norm.
    pub hs: f64,
    /// Sum of singular values.
    pub tr: f64,
}

/// Super-fidelity `F(ρ₁, ρ₂) = tr ρ₁ρ₂ + √((1 - tr ρ₁²)(1 - tr ρ₂²))`,
/// an upper bound on the Uhlmann fidelity computable without matrix roots.
pub fn super_fidelity(a: &QubitState, b: &QubitState) -> f64 {
    let cross = (1.0 - a.p1()) * (1.0 - b.p1())
        + a.p1() * b.p1()
        + 2.0 * (a.alpha().conj() * b.alpha()).re;
    let slack = ((1.0 - a.purity()).max(0.0) * (1.0 - b.purity()).max(0.0)).sqrt();
    (cross + slack).clamp(0.0, 1.0)
}

/// Overlap `⟨ψ₀|ρ|ψ₀⟩` of a pure reference state with an arbitrary state.
pub(crate) fn overlap(psi0: &QubitState, rho: &QubitState) -> f64 {
    let p = psi0.p1();
    (1.0 - p) * (1.0 - rho.p1())
        + p * rho.p1()
        + 2.0 * (psi0.alpha().conj() * rho.alpha()).re
}

/// Bures angle `B = arccos √⟨ψ₀|ρ_t|ψ₀⟩` between a pure reference state and
/// an evolved state. Fails unless `psi0` is pure to 1e-9 in purity.
pub fn bures_angle_pure(psi0: &QubitState, rho_t: &QubitState) -> Result<f64> {
    if !psi0.is_pure(1e-9) {
        return Err(Error::NotPure {
            purity: psi0.purity(),
        });
    }
    Ok(overlap(psi0, rho_t).clamp(0.0, 1.0).sqrt().acos())
}

/// Bures angle between two (possibly mixed) states via the super-fidelity,
/// `B = arccos F(ρ₁, ρ₂)`.
pub fn bures_angle_mixed(a: &QubitState, b: &QubitState) -> f64 {
    super_fidelity(a, b).acos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

    fn maximally_mixed() -> QubitState {
        QubitState::new(0.5, Complex64::new(0.0, 0.0)).unwrap()
    }

    #[test]
    fn theta_states() {
        let ground = QubitState::from_theta(0.0);
        assert_eq!(ground.p1(), 0.0);
        assert_eq!(ground.alpha(), Complex64::new(0.0, 0.0));

        let plus = QubitState::from_theta(FRAC_PI_2);
        assert!((plus.p1() - 0.5).abs() < 1e-15);
        assert!((plus.alpha().re - 0.5).abs() < 1e-15);

        let third = QubitState::from_theta(FRAC_PI_3);
        assert!((third.p1() - 0.25).abs() < 1e-15);
        assert!((third.alpha().re - 3f64.sqrt() / 4.0).abs() < 1e-15);
        assert!(third.is_pure(1e-12));
    }

    #[test]
    fn excitation_split_matches_theta() {
        // r = 0 is |1⟩, r = 1 is |0⟩.
        assert!((QubitState::from_r(0.0).unwrap().p1() - 1.0).abs() < 1e-12);
        assert!(QubitState::from_r(1.0).unwrap().p1().abs() < 1e-12);
        let s = QubitState::from_r(0.3).unwrap();
        assert!((s.p1() - 0.7).abs() < 1e-12);
        assert!(QubitState::from_r(1.2).is_err());
    }

    #[test]
    fn bloch_construction() {
        let north = QubitState::from_bloch(BlochVector::new(0.0, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!(north.p1(), 0.0);

        let mixed = QubitState::from_bloch(BlochVector::new(0.2, 0.2, 0.2).unwrap()).unwrap();
        assert!((mixed.purity() - 0.56).abs() < 1e-15);
        assert!((mixed.mixedness() - 0.88).abs() < 1e-15);

        let x_axis = QubitState::from_bloch(BlochVector::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        assert!((x_axis.p1() - 0.5).abs() < 1e-15);
        assert!((x_axis.alpha().re - 0.5).abs() < 1e-15);

        assert!(BlochVector::new(0.8, 0.8, 0.8).is_err());
    }

    #[test]
    fn positivity_clamp_and_reject() {
        // Defect within 1e-12: accepted unchanged.
        let s = QubitState::new(0.5, Complex64::new(0.5 + 4e-13, 0.0)).unwrap();
        assert!((s.alpha().re - (0.5 + 4e-13)).abs() < 1e-15);
        // Defect within 1e-9: clamped onto the boundary.
        let s = QubitState::new(0.5, Complex64::new(0.5 + 4e-10, 0.0)).unwrap();
        assert!((s.alpha().norm_sqr() - 0.25).abs() <= 1e-15);
        // Larger defects are rejected.
        assert!(QubitState::new(0.5, Complex64::new(0.51, 0.0)).is_err());
        assert!(QubitState::new(1.5, Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn norm_examples() {
        let id = HermitianMatrix2::from_parts(1.0, 1.0, Complex64::new(0.0, 0.0));
        let n = id.norms();
        assert!((n.op - 1.0).abs() < 1e-15);
        assert!((n.hs - 2f64.sqrt()).abs() < 1e-15);
        assert!((n.tr - 2.0).abs() < 1e-15);

        let d = HermitianMatrix2::from_parts(3.0, -4.0, Complex64::new(0.0, 0.0));
        let n = d.norms();
        assert_eq!((n.op, n.hs, n.tr), (4.0, 5.0, 7.0));
    }

    #[test]
    fn super_fidelity_examples() {
        let s = QubitState::from_theta(1.234);
        assert!((super_fidelity(&s, &s) - 1.0).abs() < 1e-12);

        let zero = QubitState::from_theta(0.0);
        let one = QubitState::from_theta(PI);
        assert!(super_fidelity(&zero, &one).abs() < 1e-12);

        let mm = maximally_mixed();
        assert!((super_fidelity(&mm, &mm) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bures_angle_pure_examples() {
        let psi = QubitState::from_theta(0.7);
        assert!(bures_angle_pure(&psi, &psi).unwrap().abs() < 1e-7);

        let zero = QubitState::from_theta(0.0);
        let one = QubitState::from_theta(PI);
        assert!((bures_angle_pure(&zero, &one).unwrap() - FRAC_PI_2).abs() < 1e-12);

        let x_axis = QubitState::from_theta(FRAC_PI_2);
        let mm = maximally_mixed();
        assert!((bures_angle_pure(&x_axis, &mm).unwrap() - FRAC_PI_4).abs() < 1e-12);

        assert!(matches!(
            bures_angle_pure(&mm, &zero),
            Err(Error::NotPure { .. })
        ));
    }

    #[test]
    fn bures_angle_mixed_examples() {
        let a = QubitState::from_bloch(BlochVector::new(0.2, 0.2, 0.2).unwrap()).unwrap();
        assert!(bures_angle_mixed(&a, &a).abs() < 1e-7);

        let zero = QubitState::from_theta(0.0);
        let one = QubitState::from_theta(PI);
        assert!((bures_angle_mixed(&zero, &one) - FRAC_PI_2).abs() < 1e-12);

        // Independent evaluation of arccos(tr ρ₁ρ₂ + √((1-trρ₁²)(1-trρ₂²))).
        let b = QubitState::from_bloch(BlochVector::new(0.1, 0.1, 0.1).unwrap()).unwrap();
        let tr_ab = 0.5 * (1.0 + 0.2 * 0.1 * 3.0);
        let expected =
            (tr_ab + ((1.0 - 0.56f64) * (1.0 - 0.515f64)).sqrt()).acos();
        assert!((bures_angle_mixed(&a, &b) - expected).abs() < 1e-12);
    }

    #[test]
    fn coherence_mixedness_tradeoff_examples() {
        let plus = QubitState::from_theta(FRAC_PI_2);
        assert!((plus.coherence_l1() - 1.0).abs() < 1e-15);
        assert_eq!(QubitState::from_theta(0.0).coherence_l1(), 0.0);

        let phased = QubitState::new(0.5, Complex64::from_polar(0.3, PI / 7.0)).unwrap();
        assert!((phased.coherence_l1() - 0.6).abs() < 1e-15);

        assert!(QubitState::from_theta(1.1).mixedness().abs() < 1e-12);
        assert!((maximally_mixed().mixedness() - 1.0).abs() < 1e-15);

        assert!((plus.tradeoff_mcl() - 1.0).abs() < 1e-15);
        assert_eq!(QubitState::from_theta(0.0).tradeoff_mcl(), 0.0);
        let quarter = QubitState::from_theta(FRAC_PI_3);
        assert!((quarter.tradeoff_mcl() - 0.75).abs() < 1e-12);
    }

    fn arb_state() -> impl Strategy<Value = QubitState> {
        // (p1, coherence fraction of the allowed radius, phase)
        (0.0..=1.0f64, 0.0..=1.0f64, 0.0..PI * 2.0).prop_map(|(p1, frac, phase)| {
            let radius = (p1 * (1.0 - p1)).sqrt() * frac;
            QubitState::new(p1, Complex64::from_polar(radius, phase)).unwrap()
        })
    }

    fn arb_hermitian() -> impl Strategy<Value = HermitianMatrix2> {
        (
            -5.0..5.0f64,
            -5.0..5.0f64,
            -5.0..5.0f64,
            -5.0..5.0f64,
        )
            .prop_map(|(d0, d1, re, im)| {
                HermitianMatrix2::from_parts(d0, d1, Complex64::new(re, im))
            })
    }

    proptest! {
        #[test]
        fn norm_ordering_holds(m in arb_hermitian()) {
            let n = m.norms();
            prop_assert!(n.op <= n.hs + 1e-12);
            prop_assert!(n.hs <= n.tr + 1e-12);
        }

        #[test]
        fn hs_norm_matches_eigenvalue_route(m in arb_hermitian()) {
            let (lo, hi) = m.eigenvalues();
            let n = m.norms();
            prop_assert!((n.hs - (lo * lo + hi * hi).sqrt()).abs() < 1e-10);
        }

        #[test]
        fn tradeoff_identity(s in arb_state()) {
            let value = s.tradeoff_mcl();
            prop_assert!((value - 4.0 * s.p1() * (1.0 - s.p1())).abs() <= 1e-12);
            prop_assert!(value <= 1.0 + 1e-12);
        }

        #[test]
        fn super_fidelity_symmetric(a in arb_state(), b in arb_state()) {
            prop_assert!((super_fidelity(&a, &b) - super_fidelity(&b, &a)).abs() < 1e-14);
        }

        #[test]
        fn bures_self_distance_zero(s in arb_state()) {
            prop_assert!(bures_angle_mixed(&s, &s) < 1e-6);
        }

        #[test]
        fn bloch_round_trip(s in arb_state()) {
            let back = QubitState::from_bloch(s.bloch()).unwrap();
            prop_assert!((back.p1() - s.p1()).abs() < 1e-12);
            prop_assert!((back.alpha() - s.alpha()).norm() < 1e-12);
        }
    }
}
