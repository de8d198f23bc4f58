//! The symplectic form `ω(X, Y) = 2 Im⟨X|Y⟩` on generator flows, and the
//! checks built on it: orbit isotropy, the canonical pair `(φ, I)`, and the
//! angle-operator shift of `⟨L₁⟩`.
//!
//! Tangents are always `(point, generator)` pairs and the form is evaluated as
//! `−i⟨[Ĝ_X, Ĝ_Y]⟩`. Ray corrections `G − ⟨G⟩` do not change the value.

use nalgebra::DMatrix;

use crate::algebra::{
    adjoint_form, covariance_commutator, exp_generator, expectation, standard_generators, Generators,
    QuadraticForm, SlaterConfiguration, SymplecticMap,
};
use crate::error::{Error, Result};
use crate::manifold::{manifold_point, CrankedState, CrankingProblem, ManifoldPoint};

/// Smallest singular value below which a pairing matrix counts as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

/// The flow `−iĜ|Z⟩` at a manifold point; `generator` is in the lab frame.
#[derive(Debug, Clone)]
pub struct TangentVector {
    pub base: ManifoldPoint,
    pub generator: QuadraticForm,
}

impl TangentVector {
    pub fn new(base: ManifoldPoint, generator: QuadraticForm) -> Self {
        Self { base, generator }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            base: self.base.clone(),
            generator: self.generator.scaled(a),
        }
    }
}

fn same_base(a: &ManifoldPoint, b: &ManifoldPoint) -> bool {
    a.config() == b.config() && (a.total_map.matrix() - b.total_map.matrix()).amax() <= 1e-12
}

pub fn symplectic_form(x: &TangentVector, y: &TangentVector) -> Result<f64> {
    if !same_base(&x.base, &y.base) {
        return Err(Error::BaseMismatch);
    }
    symplectic_form_at(&x.generator, &y.generator, &x.base.total_map, x.base.config())
}

/// `ω(X_{G₁}, X_{G₂})` at the state `U|config⟩`.
pub fn symplectic_form_at(
    g1: &QuadraticForm,
    g2: &QuadraticForm,
    map: &SymplecticMap,
    config: &SlaterConfiguration,
) -> Result<f64> {
    covariance_commutator(g1, g2, map, config)
}

/// Coordinates of a point on the trial manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Coordinates {
    phi: f64,
    lambda: f64,
    theta: [f64; 3],
}

impl Coordinates {
    fn of(p: &ManifoldPoint) -> Self {
        Self {
            // Unwrapped angle; the stored one is reduced mod 2π.
            phi: p.phi,
            lambda: p.state.trial.lambda,
            theta: p.state.trial.theta,
        }
    }

    fn as_array(&self) -> [f64; 5] {
        [self.phi, self.lambda, self.theta[0], self.theta[1], self.theta[2]]
    }
}

/// Lab-frame generator of `d/dt` along a smooth family of manifold points,
/// from the product rule on `e^{-iφL₁} e^{-iλc₁} e^{-iΣθ_k s_k}`:
/// `φ'L₁ + λ' R c₁ R† + Σ θ_k' (RA) s_k (RA)†` with `R`, `A` the rotation and
/// angle factors. Parameter derivatives are central differences with step `h`.
pub fn path_tangent<F>(curve: F, t: f64, h: f64) -> Result<TangentVector>
where
    F: Fn(f64) -> Result<ManifoldPoint>,
{
    let base = curve(t)?;
    let before = curve(t - h)?;
    let after = curve(t + h)?;
    let (c0, cm, cp) = (
        Coordinates::of(&base).as_array(),
        Coordinates::of(&before).as_array(),
        Coordinates::of(&after).as_array(),
    );
    let mut rate = [0.0; 5];
    for i in 0..5 {
        let unwrap = |d: f64| {
            if i == 0 {
                // φ lives on a circle.
                (d + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI
            } else {
                d
            }
        };
        let forward = unwrap(cp[i] - c0[i]) / h;
        let backward = unwrap(c0[i] - cm[i]) / h;
        let central = 0.5 * (forward + backward);
        if (forward - backward).abs() > 1e-2 * (1.0 + central.abs()) {
            return Err(Error::NonSmooth((forward - backward).abs()));
        }
        rate[i] = central;
    }
    let gens = standard_generators(base.state.freqs.basis());
    let generator = tangent_generator(&gens, &Coordinates::of(&base), &rate)?;
    Ok(TangentVector { base, generator })
}

fn tangent_generator(gens: &Generators, at: &Coordinates, rate: &[f64; 5]) -> Result<QuadraticForm> {
    let rotation = exp_generator(&gens.l[0], at.phi)?;
    let angle = exp_generator(&gens.c1, at.lambda)?;
    let outer = rotation.compose(&angle);
    let mut g = gens.l[0].scaled(rate[0]);
    g = g.add_scaled(rate[1], &adjoint_form(&gens.c1, &rotation)?)?;
    for k in 0..3 {
        g = g.add_scaled(rate[2 + k], &adjoint_form(&gens.s[k], &outer)?)?;
    }
    Ok(g)
}

/// Tangent of `I ↦ e^{-iφL₁}|Z⟩_{ω_I}` at fixed `φ`.
pub fn yrast_tangent(problem: &CrankingProblem, i: f64, phi: f64, h: f64) -> Result<TangentVector> {
    let gens = problem.generators().clone();
    path_tangent(
        |ii| {
            let state = problem.invert(ii)?;
            manifold_point(&gens, &state, phi)
        },
        i,
        h,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropyReport {
    /// `max_k |⟨L_k⟩|`.
    pub max_angular_momentum: f64,
    /// `max_{i<j} |ω(X_{L_i}, X_{L_j})|`.
    pub max_pairing: f64,
    /// `max |ω(X_{L_i}, X_{L_j}) − ε_{ijk}⟨L_k⟩|`.
    pub identity_residual: f64,
    /// `ω(X_{L₂}, X_{L₃})`.
    pub pairing_23: f64,
}

pub fn isotropy_check(state: &CrankedState) -> Result<IsotropyReport> {
    isotropy_at(&state.map, &state.config, &standard_generators(state.freqs.basis()))
}

pub fn isotropy_at(map: &SymplecticMap, config: &SlaterConfiguration, gens: &Generators) -> Result<IsotropyReport> {
    let mut l = [0.0; 3];
    for (v, g) in l.iter_mut().zip(&gens.l) {
        *v = expectation(g, map, config)?;
    }
    let mut max_pairing: f64 = 0.0;
    let mut residual: f64 = 0.0;
    let mut pairing_23 = 0.0;
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        let w = symplectic_form_at(&gens.l[i], &gens.l[j], map, config)?;
        if (i, j) == (1, 2) {
            pairing_23 = w;
        }
        max_pairing = max_pairing.max(w.abs());
        residual = residual.max((w - l[k]).abs());
    }
    Ok(IsotropyReport {
        max_angular_momentum: l.iter().fold(0.0, |m, v| m.max(v.abs())),
        max_pairing,
        identity_residual: residual,
        pairing_23,
    })
}

/// `ω(X_φ, X_I)` on the yrast family at angular momentum `i` and angle `phi`.
pub fn canonical_pair_check(problem: &CrankingProblem, i: f64, phi: f64, h: f64) -> Result<f64> {
    let tangent = yrast_tangent(problem, i, phi, h)?;
    let rotation = TangentVector::new(tangent.base.clone(), problem.generators().l[0].clone());
    symplectic_form(&rotation, &tangent)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    pub orbit_dim: usize,
    pub isotropy_residual: f64,
    /// Row `r` holds `ω(X_{L₁}, X_{probe_r})`.
    pub pairing_matrix: DMatrix<f64>,
    pub smallest_singular_value: f64,
    pub nondegenerate: bool,
}

/// Pairs the rotation orbit `T_qQ = span{X_{L₁}}` against the probe directions.
pub fn decomposition_check(state: &CrankedState, probes: &[QuadraticForm]) -> Result<DecompositionReport> {
    let gens = standard_generators(state.freqs.basis());
    let orbit = &gens.l[0];
    let isotropy_residual = symplectic_form_at(orbit, orbit, &state.map, &state.config)?.abs();
    let mut pairing = DMatrix::zeros(probes.len(), 1);
    for (r, p) in probes.iter().enumerate() {
        pairing[(r, 0)] = symplectic_form_at(orbit, p, &state.map, &state.config)?;
    }
    let smallest = if probes.is_empty() {
        0.0
    } else {
        pairing
            .clone()
            .singular_values()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    };
    Ok(DecompositionReport {
        orbit_dim: 1,
        isotropy_residual,
        pairing_matrix: pairing,
        smallest_singular_value: smallest,
        nondegenerate: smallest > DEGENERACY_THRESHOLD,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleShift {
    /// `i⟨[c₁, L₁]⟩ = −2⟨N₂ − N₃⟩`.
    pub analytic: f64,
    /// Richardson-refined central difference of `⟨L₁⟩` along `e^{-iλc₁}`.
    pub numeric: f64,
    /// The same difference without refinement.
    pub numeric_raw: f64,
}

pub fn angle_shift_check(state: &CrankedState, h: f64) -> Result<AngleShift> {
    let gens = standard_generators(state.freqs.basis());
    let number_difference = gens.n[1].add_scaled(-1.0, &gens.n[2])?;
    let analytic = -2.0 * expectation(&number_difference, &state.map, &state.config)?;
    let l1 = |lambda: f64| -> Result<f64> {
        let map = exp_generator(&gens.c1, lambda)?.compose(&state.map);
        expectation(&gens.l[0], &map, &state.config)
    };
    let slope = |h: f64| -> Result<f64> { Ok((l1(h)? - l1(-h)?) / (2.0 * h)) };
    let coarse = slope(2.0 * h)?;
    let fine = slope(h)?;
    Ok(AngleShift {
        analytic,
        numeric: (4.0 * fine - coarse) / 3.0,
        numeric_raw: fine,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Species;
    use crate::cranking::OscillatorFrequencies;
    use crate::manifold::fill_orbitals;

    fn problem() -> CrankingProblem {
        let f = OscillatorFrequencies::new(1.3, 1.2, 0.7).unwrap();
        let c = fill_orbitals(4, 2, &f, Species::SingleFluid).unwrap();
        CrankingProblem::new(c, f).unwrap()
    }

    #[test]
    fn form_is_antisymmetric_and_linear() {
        let p = problem();
        let s = p.solve(0.2).unwrap();
        let g = p.generators();
        let base = manifold_point(g, &s, 0.3).unwrap();
        let x = TangentVector::new(base.clone(), g.c1.clone());
        let y = TangentVector::new(base, g.s[1].clone());
        assert_eq!(symplectic_form(&x, &x).unwrap(), 0.0);
        let xy = symplectic_form(&x, &y).unwrap();
        assert!((xy + symplectic_form(&y, &x).unwrap()).abs() < 1e-12);
        assert!((symplectic_form(&x.scaled(2.5), &y).unwrap() - 2.5 * xy).abs() < 1e-12);
    }

    #[test]
    fn base_points_must_agree() {
        let p = problem();
        let s = p.solve(0.1).unwrap();
        let g = p.generators();
        let x = TangentVector::new(manifold_point(g, &s, 0.0).unwrap(), g.l[1].clone());
        let y = TangentVector::new(manifold_point(g, &s, 0.5).unwrap(), g.l[2].clone());
        assert_eq!(symplectic_form(&x, &y), Err(Error::BaseMismatch));
    }

    #[test]
    fn single_factor_paths() {
        let p = problem();
        let s = p.solve(0.15).unwrap();
        let g = p.generators().clone();
        let rot = path_tangent(|t| manifold_point(&g, &s, t), 0.4, 1e-5).unwrap();
        assert!(rot.generator.max_abs_diff(&g.l[0]) < 1e-9);

        let s0 = p.solve(0.0).unwrap();
        let squeeze = path_tangent(
            |t| {
                let mut st = s0.clone();
                st.trial.theta[1] = t;
                manifold_point(&g, &st, 0.0)
            },
            0.2,
            1e-5,
        )
        .unwrap();
        assert!(squeeze.generator.max_abs_diff(&g.s[1]) < 1e-9);
    }

    #[test]
    fn jumps_are_reported() {
        let p = problem();
        let s = p.solve(0.0).unwrap();
        let g = p.generators().clone();
        let jumpy = path_tangent(
            |t| {
                let mut st = s.clone();
                st.trial.lambda = if t > 0.0 { 0.3 } else { 0.0 };
                manifold_point(&g, &st, 0.0)
            },
            0.0,
            1e-5,
        );
        assert!(matches!(jumpy, Err(Error::NonSmooth(_))));
    }

    #[test]
    fn ground_state_orbit_is_isotropic() {
        let p = problem();
        let r = isotropy_check(&p.solve(0.0).unwrap()).unwrap();
        assert!(r.max_angular_momentum < 1e-12 && r.max_pairing < 1e-12);
        let cranked = p.solve(0.3).unwrap();
        let r = isotropy_check(&cranked).unwrap();
        assert!((r.pairing_23 - cranked.angular_momentum).abs() < 1e-12);
        assert!(r.identity_residual < 1e-12);
    }

    #[test]
    fn rotation_alone_is_degenerate() {
        let p = problem();
        let s = p.solve(0.0).unwrap();
        let r = decomposition_check(&s, &[p.generators().l[0].clone()]).unwrap();
        assert!(!r.nondegenerate);
        assert_eq!(r.pairing_matrix.shape(), (1, 1));
        assert_eq!(r.isotropy_residual, 0.0);
    }
}
