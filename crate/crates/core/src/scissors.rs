//! Proton and neutron fluids sharing a deformed mean field, their isovector
//! counter-rotation, and the scissors excitation operator
//! `B† = ½[a_p L₁ᵖ − a_n L₁ⁿ − iΩ/(ω₂ − ω₃) (a_p C₁ᵖ − a_n C₁ⁿ)]`.
//!
//! The amplitudes `a_p`, `a_n` are fixed by `⟨[B, B†]⟩ = 1` and by decoupling
//! from the total rotation `L₁ᵖ + L₁ⁿ`. The two-rotor model
//! `H = Σ I_q²/(2𝓘_q) + (C/2)(Φ_p − Φ_n)²` serves as the harmonic reference.

use nalgebra::{Complex, Matrix4, Matrix6, Vector4};

use crate::algebra::{
    adjoint_form, covariance_commutator, exp_generator, expectation, standard_generators, Generators,
    QuadraticForm, SlaterConfiguration, Species, SymplecticMap,
};
use crate::cranking::OscillatorFrequencies;
use crate::error::{Error, Result};
use crate::manifold::{
    fill_orbitals, prolate_seed, selfconsistent_frequencies, CrankedState, CrankingProblem, HamiltonianSpec,
    SolverOptions,
};

/// Finite-difference step for the restoring constant.
pub const RESTORING_STEP: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct Fluid {
    pub problem: CrankingProblem,
    pub ground: CrankedState,
}

impl Fluid {
    pub fn config(&self) -> &SlaterConfiguration {
        self.problem.config()
    }
}

#[derive(Debug, Clone)]
pub struct TwoFluidSystem {
    pub spec: HamiltonianSpec,
    pub freqs: OscillatorFrequencies,
    pub proton: Fluid,
    pub neutron: Fluid,
    /// Common orientation `e^{-iφL₁}` applied to both fluids.
    pub orientation: f64,
    pub restoring_step: f64,
    gens: Generators,
}

/// Fills `Z` protons and `N` neutrons, finds the shared frequencies from the
/// combined occupation and solves the static problem for each fluid.
pub fn build_two_fluid(spec: &HamiltonianSpec, z: usize, n: usize, degeneracy: u32) -> Result<TwoFluidSystem> {
    build_two_fluid_with(spec, z, n, degeneracy, SolverOptions::default())
}

pub fn build_two_fluid_with(
    spec: &HamiltonianSpec,
    z: usize,
    n: usize,
    degeneracy: u32,
    options: SolverOptions,
) -> Result<TwoFluidSystem> {
    let seed = if spec.selfconsistent {
        prolate_seed(spec.base_frequency)
    } else {
        OscillatorFrequencies::spherical(spec.base_frequency)?
    };
    let configs = [
        fill_orbitals(z, degeneracy, &seed, Species::Proton)?,
        fill_orbitals(n, degeneracy, &seed, Species::Neutron)?,
    ];
    let (freqs, configs) = if spec.selfconsistent {
        let sol = selfconsistent_frequencies(spec, &configs)?;
        (sol.freqs, sol.configs)
    } else {
        (seed, configs.to_vec())
    };
    TwoFluidSystem::with_options(spec, freqs, configs[0].clone(), configs[1].clone(), options)
}

impl TwoFluidSystem {
    pub fn new(
        spec: &HamiltonianSpec,
        freqs: OscillatorFrequencies,
        proton: SlaterConfiguration,
        neutron: SlaterConfiguration,
    ) -> Result<Self> {
        Self::with_options(spec, freqs, proton, neutron, SolverOptions::default())
    }

    pub fn with_options(
        spec: &HamiltonianSpec,
        freqs: OscillatorFrequencies,
        proton: SlaterConfiguration,
        neutron: SlaterConfiguration,
        options: SolverOptions,
    ) -> Result<Self> {
        let fluid = |config: SlaterConfiguration| -> Result<Fluid> {
            let problem = CrankingProblem::with_options(config, freqs, options)?;
            let ground = problem.solve(0.0)?;
            Ok(Fluid { problem, ground })
        };
        Ok(Self {
            spec: *spec,
            freqs,
            proton: fluid(proton)?,
            neutron: fluid(neutron)?,
            orientation: 0.0,
            restoring_step: RESTORING_STEP,
            gens: standard_generators(freqs.basis()),
        })
    }

    pub fn generators(&self) -> &Generators {
        &self.gens
    }

    /// Both fluids rotated together by `phi` about axis 1.
    pub fn rotated(&self, phi: f64) -> Self {
        Self {
            orientation: self.orientation + phi,
            ..self.clone()
        }
    }

    /// Proton and neutron exchanged.
    pub fn mirrored(&self) -> Self {
        Self {
            proton: self.neutron.clone(),
            neutron: self.proton.clone(),
            ..self.clone()
        }
    }

    fn global_rotation(&self) -> Result<SymplecticMap> {
        exp_generator(&self.gens.l[0], self.orientation)
    }

    /// Lab-frame map of a fluid's static state, including the common orientation.
    pub fn state_map(&self, fluid: &Fluid) -> Result<SymplecticMap> {
        Ok(self.global_rotation()?.compose(&fluid.ground.map))
    }

    /// The angle operator of the deformed body, carried along by the common orientation.
    pub fn angle_operator(&self) -> Result<QuadraticForm> {
        adjoint_form(&self.gens.c1, &self.global_rotation()?)
    }

    fn is_degenerate(&self) -> bool {
        let w = self.freqs.w();
        (w[1] - w[2]).abs() <= 1e-12 * w[1]
    }

    /// `⟨Q_μ⟩` in a fluid's static state, and its change when the fluid is
    /// rotated by `angle` about axis 1. The change is evaluated from the
    /// form difference `RᵀQR − Q` so that small angles keep full precision.
    fn quadrupole_shift(&self, fluid: &Fluid, angle: f64) -> Result<([f64; 5], [f64; 5])> {
        let map = self.state_map(fluid)?;
        let step = rotation_minus_identity(&self.gens.l[0], angle);
        let rotation = step + Matrix6::identity();
        let mut base = [0.0; 5];
        let mut shift = [0.0; 5];
        for (k, q) in self.gens.q.iter().enumerate() {
            base[k] = expectation(q, &map, fluid.config())?;
            let m = q.quad();
            let diff = step.transpose() * m * rotation + m * step;
            let form = QuadraticForm::quadratic(q.basis(), diff);
            shift[k] = expectation(&form, &map, fluid.config())?;
        }
        Ok((base, shift))
    }

    /// Isovector cross energy `−κ₁ Σ_μ ⟨Q_μ⟩_p ⟨Q_μ⟩_n` with the fluids
    /// counter-rotated by `±φ/2`.
    pub fn isovector_energy(&self, phi: f64) -> Result<f64> {
        let (qp, dp) = self.quadrupole_shift(&self.proton, 0.5 * phi)?;
        let (qn, dn) = self.quadrupole_shift(&self.neutron, -0.5 * phi)?;
        let overlap: f64 = (0..5).map(|k| (qp[k] + dp[k]) * (qn[k] + dn[k])).sum();
        Ok(-self.spec.qq_isovector * overlap)
    }

    /// `E(φ) − E(0)`.
    pub fn isovector_energy_shift(&self, phi: f64) -> Result<f64> {
        let (qp, dp) = self.quadrupole_shift(&self.proton, 0.5 * phi)?;
        let (qn, dn) = self.quadrupole_shift(&self.neutron, -0.5 * phi)?;
        let change: f64 = (0..5).map(|k| dp[k] * qn[k] + qp[k] * dn[k] + dp[k] * dn[k]).sum();
        Ok(-self.spec.qq_isovector * change)
    }

    /// `C = d²E/dφ²` at `φ = 0`: central second differences with one
    /// Richardson level.
    pub fn restoring_constant(&self) -> Result<f64> {
        self.restoring_constant_with_step(self.restoring_step)
    }

    pub fn restoring_constant_with_step(&self, h: f64) -> Result<f64> {
        if self.is_degenerate() {
            return Err(Error::DegenerateDeformation);
        }
        let second = |h: f64| -> Result<f64> {
            Ok((self.isovector_energy_shift(h)? + self.isovector_energy_shift(-h)?) / (h * h))
        };
        let coarse = second(h)?;
        let fine = second(0.5 * h)?;
        Ok((4.0 * fine - coarse) / 3.0)
    }

    /// `K_q = −i⟨[C₁, L₁]⟩ = 2⟨N₂ − N₃⟩` in the given fluid.
    pub fn angle_pairing(&self, fluid: &Fluid) -> Result<f64> {
        let c = self.angle_operator()?;
        covariance_commutator(&c, &self.gens.l[0], &self.state_map(fluid)?, fluid.config())
    }
}

/// `e^{αK} − I` for the flow `K = J·M` of an angular momentum, using
/// `K³ = −K`: `sin α K + 2 sin²(α/2) K²`.
fn rotation_minus_identity(l: &QuadraticForm, alpha: f64) -> Matrix6<f64> {
    let k = crate::algebra::symplectic_unit() * l.quad();
    let half = (0.5 * alpha).sin();
    k * alpha.sin() + k * k * (2.0 * half * half)
}

/// Operator `R + iX` acting on one fluid, with Hermitian `R` and `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexForm {
    pub hermitian: QuadraticForm,
    pub anti_hermitian: QuadraticForm,
}

impl ComplexForm {
    pub fn adjoint(&self) -> Self {
        Self {
            hermitian: self.hermitian.clone(),
            anti_hermitian: self.anti_hermitian.scaled(-1.0),
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            hermitian: self.hermitian.scaled(a),
            anti_hermitian: self.anti_hermitian.scaled(a),
        }
    }

    pub fn real(form: QuadraticForm) -> Self {
        let zero = QuadraticForm::zero(form.basis());
        Self {
            hermitian: form,
            anti_hermitian: zero,
        }
    }
}

/// `⟨[A, B]⟩` for complex combinations of Hermitian forms.
pub fn complex_commutator(
    a: &ComplexForm,
    b: &ComplexForm,
    map: &SymplecticMap,
    config: &SlaterConfiguration,
) -> Result<Complex<f64>> {
    let cc = |p: &QuadraticForm, q: &QuadraticForm| covariance_commutator(p, q, map, config);
    let re = -cc(&a.hermitian, &b.anti_hermitian)? - cc(&a.anti_hermitian, &b.hermitian)?;
    let im = cc(&a.hermitian, &b.hermitian)? - cc(&a.anti_hermitian, &b.anti_hermitian)?;
    Ok(Complex::new(re, im))
}

/// `B†` split by fluid.
#[derive(Debug, Clone, PartialEq)]
pub struct BDagger {
    pub proton: ComplexForm,
    pub neutron: ComplexForm,
}

impl BDagger {
    pub fn adjoint(&self) -> Self {
        Self {
            proton: self.proton.adjoint(),
            neutron: self.neutron.adjoint(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScissorsResult {
    pub omega: f64,
    pub inertia_p: f64,
    pub inertia_n: f64,
    pub restoring_c: f64,
    /// `C < 0`: no restoring force; `omega` is then 0 and `B†` is not built.
    pub stable: bool,
    pub a_p: f64,
    pub a_n: f64,
    /// `K_p`, `K_n`.
    pub angle_pairing: [f64; 2],
    pub bdagger: Option<BDagger>,
    /// `|⟨[B, B†]⟩ − 1|`.
    pub norm_residual: f64,
    /// `|⟨[B†, L₁ᵖ + L₁ⁿ]⟩|`.
    pub decouple_residual: f64,
    /// `⟨[B, [H_model, B†]]⟩ / Ω`.
    pub harmonic_ratio: f64,
}

impl ScissorsResult {
    pub fn reduced_inertia(&self) -> f64 {
        self.inertia_p * self.inertia_n / (self.inertia_p + self.inertia_n)
    }
}

/// Inertias, restoring constant and `Ω = √(C/𝓘_red)`. A negative `C` is
/// returned as an unstable result rather than an error.
pub fn scissors_frequency(sys: &TwoFluidSystem) -> Result<ScissorsResult> {
    if sys.is_degenerate() {
        return Err(Error::DegenerateDeformation);
    }
    let inertia_p = sys.proton.problem.moment_of_inertia()?;
    let inertia_n = sys.neutron.problem.moment_of_inertia()?;
    let restoring_c = sys.restoring_constant()?;
    let reduced = inertia_p * inertia_n / (inertia_p + inertia_n);
    let stable = restoring_c > 0.0;
    Ok(ScissorsResult {
        omega: if stable { (restoring_c / reduced).sqrt() } else { 0.0 },
        inertia_p,
        inertia_n,
        restoring_c,
        stable,
        a_p: 0.0,
        a_n: 0.0,
        angle_pairing: [0.0; 2],
        bdagger: None,
        norm_residual: f64::NAN,
        decouple_residual: f64::NAN,
        harmonic_ratio: f64::NAN,
    })
}

/// Completes `partial` with the amplitudes, `B†` and its residuals.
pub fn build_bdagger(sys: &TwoFluidSystem, partial: &ScissorsResult) -> Result<ScissorsResult> {
    if sys.is_degenerate() {
        return Err(Error::DegenerateDeformation);
    }
    if !partial.stable {
        return Err(Error::WrongSignCoupling(partial.restoring_c));
    }
    let w = sys.freqs.w();
    let prefactor = partial.omega / (w[1] - w[2]);
    let k_p = sys.angle_pairing(&sys.proton)?;
    let k_n = sys.angle_pairing(&sys.neutron)?;
    // ⟨[B, B†]⟩ = −½κ(a_p²K_p + a_n²K_n), decoupling a_p K_p = a_n K_n.
    let a_p_sq = -2.0 * k_n / (prefactor * k_p * (k_p + k_n));
    if !(a_p_sq > 0.0 && a_p_sq.is_finite()) {
        return Err(Error::DegenerateDeformation);
    }
    let a_p = a_p_sq.sqrt();
    let a_n = a_p * k_p / k_n;

    let l1 = &sys.gens.l[0];
    let angle = sys.angle_operator()?;
    let bdagger = BDagger {
        proton: ComplexForm {
            hermitian: l1.scaled(0.5 * a_p),
            anti_hermitian: angle.scaled(-0.5 * prefactor * a_p),
        },
        neutron: ComplexForm {
            hermitian: l1.scaled(-0.5 * a_n),
            anti_hermitian: angle.scaled(0.5 * prefactor * a_n),
        },
    };
    let norm = boson_commutator(sys, &bdagger)?;
    let decouple = total_rotation_overlap(sys, &bdagger)?;
    let model = TwoRotorModel::new(partial.inertia_p, partial.inertia_n, partial.restoring_c);
    let amplitudes = model.amplitudes(&bdagger, sys, [k_p, k_n])?;
    let harmonic = model.double_commutator(&amplitudes);
    Ok(ScissorsResult {
        a_p,
        a_n,
        angle_pairing: [k_p, k_n],
        bdagger: Some(bdagger),
        norm_residual: (norm - 1.0).norm(),
        decouple_residual: decouple.norm(),
        harmonic_ratio: harmonic.re / partial.omega,
        ..partial.clone()
    })
}

/// `⟨[B, B†]⟩` summed over both fluids.
pub fn boson_commutator(sys: &TwoFluidSystem, bdagger: &BDagger) -> Result<Complex<f64>> {
    let b = bdagger.adjoint();
    let p = complex_commutator(&b.proton, &bdagger.proton, &sys.state_map(&sys.proton)?, sys.proton.config())?;
    let n = complex_commutator(&b.neutron, &bdagger.neutron, &sys.state_map(&sys.neutron)?, sys.neutron.config())?;
    Ok(p + n)
}

/// `⟨[B†, L₁ᵖ + L₁ⁿ]⟩`.
pub fn total_rotation_overlap(sys: &TwoFluidSystem, bdagger: &BDagger) -> Result<Complex<f64>> {
    let l = ComplexForm::real(sys.gens.l[0].clone());
    let p = complex_commutator(&bdagger.proton, &l, &sys.state_map(&sys.proton)?, sys.proton.config())?;
    let n = complex_commutator(&bdagger.neutron, &l, &sys.state_map(&sys.neutron)?, sys.neutron.config())?;
    Ok(p + n)
}

/// Two coupled rotors in `z = (Φ_p, Φ_n, I_p, I_n)` with `[Φ_q, I_q] = i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoRotorModel {
    pub inertia_p: f64,
    pub inertia_n: f64,
    pub restoring: f64,
}

impl TwoRotorModel {
    pub fn new(inertia_p: f64, inertia_n: f64, restoring: f64) -> Self {
        Self {
            inertia_p,
            inertia_n,
            restoring,
        }
    }

    /// Hessian of `H` in `z`.
    pub fn hessian(&self) -> Matrix4<f64> {
        let c = self.restoring;
        Matrix4::new(
            c, -c, 0.0, 0.0,
            -c, c, 0.0, 0.0,
            0.0, 0.0, 1.0 / self.inertia_p, 0.0,
            0.0, 0.0, 0.0, 1.0 / self.inertia_n,
        )
    }

    pub fn symplectic_unit() -> Matrix4<f64> {
        Matrix4::new(
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
            -1.0, 0.0, 0.0, 0.0,
            0.0, -1.0, 0.0, 0.0,
        )
    }

    /// Squared nonzero normal-mode frequency, `C(1/𝓘_p + 1/𝓘_n)`.
    pub fn frequency_squared(&self) -> f64 {
        self.restoring * (1.0 / self.inertia_p + 1.0 / self.inertia_n)
    }

    /// Coefficients `b` with `B† ↦ bᵀz`, using `L₁ ↦ I_q` and
    /// `C₁ ↦ K_q Φ_q` (which preserves `[C₁, L₁] = iK_q`).
    pub fn amplitudes(&self, bdagger: &BDagger, sys: &TwoFluidSystem, pairing: [f64; 2]) -> Result<Vector4<Complex<f64>>> {
        let l1 = &sys.gens.l[0];
        let angle = sys.angle_operator()?;
        let coefficient = |form: &QuadraticForm, of: &QuadraticForm| -> f64 {
            // Forms here are multiples of L₁ or the angle operator.
            let scale = of.quad().norm_squared();
            form.quad().dot(of.quad()) / scale
        };
        let part = |c: &ComplexForm, k: f64| -> (Complex<f64>, Complex<f64>) {
            let phi = Complex::new(coefficient(&c.hermitian, &angle) * k, coefficient(&c.anti_hermitian, &angle) * k);
            let spin = Complex::new(coefficient(&c.hermitian, l1), coefficient(&c.anti_hermitian, l1));
            (phi, spin)
        };
        let (phi_p, i_p) = part(&bdagger.proton, pairing[0]);
        let (phi_n, i_n) = part(&bdagger.neutron, pairing[1]);
        Ok(Vector4::new(phi_p, phi_n, i_p, i_n))
    }

    /// `⟨[B, B†]⟩ = i b̄ᵀJb`.
    pub fn commutator(&self, b: &Vector4<Complex<f64>>) -> Complex<f64> {
        let j = Self::symplectic_unit().map(|v| Complex::new(v, 0.0));
        Complex::<f64>::i() * (b.conjugate().transpose() * j * b)[(0, 0)]
    }

    /// `⟨[B, [H, B†]]⟩ = −b̄ᵀ J M J b`.
    pub fn double_commutator(&self, b: &Vector4<Complex<f64>>) -> Complex<f64> {
        let j = Self::symplectic_unit().map(|v| Complex::new(v, 0.0));
        let m = self.hessian().map(|v| Complex::new(v, 0.0));
        -(b.conjugate().transpose() * j * m * j * b)[(0, 0)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kappa: f64) -> HamiltonianSpec {
        HamiltonianSpec {
            qq_isovector: kappa,
            ..HamiltonianSpec::new(1.0).unwrap()
        }
    }

    #[test]
    fn spherical_system_is_refused() {
        let s = spec(0.1);
        let sys = build_two_fluid(&s, 8, 8, 2).unwrap();
        assert!(matches!(scissors_frequency(&sys), Err(Error::DegenerateDeformation)));
    }

    #[test]
    fn no_coupling_no_restoring_force() {
        let sys = build_two_fluid(&spec(0.0), 4, 4, 2).unwrap();
        assert_eq!(sys.restoring_constant().unwrap(), 0.0);
        let r = scissors_frequency(&sys).unwrap();
        assert!(!r.stable);
        assert!(matches!(build_bdagger(&sys, &r), Err(Error::WrongSignCoupling(_))));
    }

    #[test]
    fn identical_fluids_are_symmetric() {
        let sys = build_two_fluid(&spec(0.05), 4, 4, 2).unwrap();
        let partial = scissors_frequency(&sys).unwrap();
        assert!(partial.stable);
        assert_eq!(partial.inertia_p, partial.inertia_n);
        assert!((partial.reduced_inertia() - 0.5 * partial.inertia_p).abs() < 1e-14);
        let r = build_bdagger(&sys, &partial).unwrap();
        assert!((r.a_p - r.a_n).abs() < 1e-12 * r.a_p);
        assert!(r.norm_residual < 1e-8 && r.decouple_residual < 1e-8);
        let expected = partial.restoring_c / partial.reduced_inertia();
        assert!((r.omega * r.omega / expected - 1.0).abs() < 1e-10);
    }

    #[test]
    fn closed_rotation_matches_exponential() {
        let g = standard_generators(crate::algebra::ModeBasis::new(1.3).unwrap());
        for alpha in [1e-4, 0.3, 2.0] {
            let exact = exp_generator(&g.l[0], alpha).unwrap();
            let step = rotation_minus_identity(&g.l[0], alpha) + Matrix6::identity();
            assert!((step - exact.matrix()).amax() < 1e-14);
        }
    }

    #[test]
    fn model_commutators() {
        let m = TwoRotorModel::new(2.0, 3.0, 0.7);
        let b = Vector4::new(
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
        );
        assert_eq!(m.commutator(&b), Complex::new(0.0, 0.0));
        let phi = Vector4::new(Complex::new(1.0, 0.0), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
        // B† = Φ + iI: [B, B†] = i[Φ, I] − i[I, Φ] = −2.
        let mixed = phi + b * Complex::i();
        assert!((m.commutator(&mixed) - Complex::new(-2.0, 0.0)).norm() < 1e-15);
    }
}
