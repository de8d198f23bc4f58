//! Constrained cranking, the momentum map `J = ⟨L₁⟩`, its inversion, the yrast
//! transversal and the canonical collective manifold `e^{-iφL₁}|Z⟩_{ω_I}`.
//!
//! The trial manifold is the orbit of a fixed oscillator Slater determinant
//! under `e^{-iφL₁} e^{-iλc₁} e^{-iΣθ_k s_k}`. Cranking minimizes
//! `⟨H − ωL₁⟩` over `(λ, θ₂, θ₃)` with `θ₁` pinned to the mode-1 retuning.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use crate::algebra::{
    covariance_commutator, exp_generator, expectation, adjoint_form, standard_generators, Generators,
    QuadraticForm, SlaterConfiguration, Species, SymplecticMap,
};
use crate::cranking::{
    critical_frequency, cranked_hamiltonian, factorized_map, oscillator_hamiltonian, paper_params,
    CrankedParams, OscillatorFrequencies,
};
use crate::error::{Error, Result};
use crate::optimize::{bracketed_secant, nelder_mead, NelderMeadOptions};

/// Spherical oscillator plus quadrupole-quadrupole interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianSpec {
    pub base_frequency: f64,
    /// Isoscalar QQ strength; negative is attractive.
    pub qq_isoscalar: f64,
    /// Isovector QQ strength; positive gives a restoring scissors force.
    pub qq_isovector: f64,
    pub selfconsistent: bool,
}

impl HamiltonianSpec {
    pub fn new(base_frequency: f64) -> Result<Self> {
        if !(base_frequency.is_finite() && base_frequency > 0.0) {
            return Err(Error::InvalidInput(format!(
                "base frequency must be positive, got {base_frequency}"
            )));
        }
        Ok(Self {
            base_frequency,
            qq_isoscalar: 0.0,
            qq_isovector: 0.0,
            selfconsistent: true,
        })
    }

    /// `⟨H_sph⟩ + (κ₀/2) Σ_μ ⟨Q_μ⟩²` for the state `U|config⟩`. Rotationally
    /// invariant by construction.
    pub fn scalar_energy(&self, gens: &Generators, map: &SymplecticMap, config: &SlaterConfiguration) -> Result<f64> {
        let spherical = OscillatorFrequencies::spherical(self.base_frequency)?;
        let one_body = expectation(&oscillator_hamiltonian(&spherical, gens.basis), map, config)?;
        let mut qq = 0.0;
        for q in &gens.q {
            let v = expectation(q, map, config)?;
            qq += v * v;
        }
        Ok(one_body + 0.5 * self.qq_isoscalar * qq)
    }
}

fn orbital_energy(w: &[f64; 3], n: &[u32; 3]) -> f64 {
    (0..3).map(|k| w[k] * (f64::from(n[k]) + 0.5)).sum()
}

/// Occupies the lowest orbitals `Σ_k w_k(n_k + ½)`, ties ordered
/// lexicographically. A partially filled degenerate Fermi level is an error.
pub fn fill_orbitals(
    particle_count: usize,
    degeneracy: u32,
    freqs: &OscillatorFrequencies,
    species: Species,
) -> Result<SlaterConfiguration> {
    if degeneracy == 0 || particle_count == 0 || !particle_count.is_multiple_of(degeneracy as usize) {
        return Err(Error::InvalidInput(format!(
            "{particle_count} particles cannot fill orbitals of degeneracy {degeneracy}"
        )));
    }
    let needed = particle_count / degeneracy as usize;
    let w = freqs.w();
    let zero_point = orbital_energy(&w, &[0, 0, 0]);
    let w_max = w.iter().copied().fold(0.0, f64::max);
    let mut excitation = w_max;
    let mut pool = loop {
        let mut pool = Vec::new();
        let max_n = |k: usize| (excitation / w[k]).floor() as u32;
        for n1 in 0..=max_n(0) {
            for n2 in 0..=max_n(1) {
                for n3 in 0..=max_n(2) {
                    let n = [n1, n2, n3];
                    if orbital_energy(&w, &n) - zero_point <= excitation * (1.0 + 1e-12) {
                        pool.push(n);
                    }
                }
            }
        }
        if pool.len() > needed {
            break pool;
        }
        excitation += w_max;
    };
    pool.sort_by(|a, b| {
        orbital_energy(&w, a)
            .total_cmp(&orbital_energy(&w, b))
            .then_with(|| a.cmp(b))
    });
    let fermi = orbital_energy(&w, &pool[needed - 1]);
    let next = orbital_energy(&w, &pool[needed]);
    let tol = 1e-10 * fermi;
    if (next - fermi).abs() <= tol {
        let level = |n: &[u32; 3]| (orbital_energy(&w, n) - fermi).abs() <= tol;
        return Err(Error::OpenShell {
            energy: fermi,
            filled: pool[..needed].iter().filter(|n| level(n)).count(),
            available: pool.iter().filter(|n| level(n)).count(),
        });
    }
    pool.truncate(needed);
    SlaterConfiguration::new(pool, degeneracy, species)
}

/// Minimizes `Σ_k w_k Σ_k` subject to `w₁w₂w₃ = base³` by Newton steps in
/// `(ln w₁, ln w₂)`.
pub fn volume_conserving_minimum(base: f64, totals: [f64; 3]) -> Result<OscillatorFrequencies> {
    if totals.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidInput(format!("totals must be positive, got {totals:?}")));
    }
    let volume = base.powi(3);
    let freqs_of = |u: [f64; 2]| {
        let (w1, w2) = (u[0].exp(), u[1].exp());
        [w1, w2, volume / (w1 * w2)]
    };
    let mut u = [base.ln(), base.ln()];
    for _ in 0..200 {
        let w = freqs_of(u);
        let e = [w[0] * totals[0], w[1] * totals[1], w[2] * totals[2]];
        let grad = [e[0] - e[2], e[1] - e[2]];
        let (h11, h12, h22) = (e[0] + e[2], e[2], e[1] + e[2]);
        let det = h11 * h22 - h12 * h12;
        let step = [
            (h22 * grad[0] - h12 * grad[1]) / det,
            (h11 * grad[1] - h12 * grad[0]) / det,
        ];
        // The objective is convex in log-frequencies; cap steps for the first iterations.
        let scale = 1.0f64.min(1.0 / step[0].abs().max(step[1].abs()).max(1e-300));
        u = [u[0] - scale * step[0], u[1] - scale * step[1]];
        if step[0].abs().max(step[1].abs()) < 1e-15 {
            let w = freqs_of(u);
            return OscillatorFrequencies::from_array(w);
        }
    }
    Err(Error::NoConvergence {
        what: "volume-conserving frequency minimization",
        iterations: 200,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfConsistentSolution {
    pub freqs: OscillatorFrequencies,
    pub configs: Vec<SlaterConfiguration>,
    pub iterations: usize,
}

fn same_occupation(a: &SlaterConfiguration, b: &SlaterConfiguration) -> bool {
    let mut x = a.orbitals().to_vec();
    let mut y = b.orbitals().to_vec();
    x.sort_unstable();
    y.sort_unstable();
    x == y && a.degeneracy() == b.degeneracy()
}

/// Deformed frequencies for one or more fluids sharing a mean field: the
/// volume-conserving minimum for the combined totals, re-filling every fluid
/// at the new frequencies until the occupations stop changing.
pub fn selfconsistent_frequencies(
    spec: &HamiltonianSpec,
    configs: &[SlaterConfiguration],
) -> Result<SelfConsistentSolution> {
    const MAX_ITER: usize = 100;
    if configs.is_empty() {
        return Err(Error::InvalidInput("no configurations given".into()));
    }
    let mut current = configs.to_vec();
    for iteration in 1..=MAX_ITER {
        let mut totals = [0.0; 3];
        for c in &current {
            let t = c.totals();
            for k in 0..3 {
                totals[k] += t[k];
            }
        }
        let freqs = volume_conserving_minimum(spec.base_frequency, totals)?;
        let refilled = current
            .iter()
            .map(|c| fill_orbitals(c.particle_count(), c.degeneracy(), &freqs, c.species()))
            .collect::<Result<Vec<_>>>()?;
        if refilled.iter().zip(&current).all(|(a, b)| same_occupation(a, b)) {
            return Ok(SelfConsistentSolution {
                freqs,
                configs: current,
                iterations: iteration,
            });
        }
        current = refilled;
    }
    Err(Error::NoConvergence {
        what: "self-consistent frequencies",
        iterations: MAX_ITER,
    })
}

/// Default seed for self-consistent runs: a slight prolate stretch along axis 3,
/// which breaks the spherical degeneracy in a fixed direction.
pub fn prolate_seed(base: f64) -> OscillatorFrequencies {
    let stretch: f64 = 0.98;
    let side = base * stretch.powf(-0.5);
    OscillatorFrequencies::new(side, side, base * stretch).expect("positive seed")
}

/// Coordinates `(λ, θ₁, θ₂, θ₃)` on the trial manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialPoint {
    pub lambda: f64,
    pub theta: [f64; 3],
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub polish: NelderMeadOptions,
    /// Base step for derivatives in ω (moment of inertia).
    pub omega_step: f64,
    /// Points of the forward ω sweep used to bracket the momentum-map inversion.
    pub sweep_points: usize,
    /// Searches stop at `(1 − margin)·ω_crit`.
    pub critical_margin: f64,
    /// Convergence of the inversion, relative to `max(1, I)`.
    pub inversion_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            polish: NelderMeadOptions {
                initial_step: 1e-4,
                param_tol: 1e-10,
                value_tol: 1e-12,
                max_evals: 4000,
            },
            omega_step: 1e-4,
            sweep_points: 32,
            critical_margin: 1e-3,
            inversion_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrankedState {
    pub omega: f64,
    pub trial: TrialPoint,
    /// Closed-form parameters used as the minimization candidate.
    pub closed_form: CrankedParams,
    pub map: SymplecticMap,
    pub config: SlaterConfiguration,
    pub freqs: OscillatorFrequencies,
    /// `⟨H⟩`.
    pub energy: f64,
    /// `⟨H − ωL₁⟩`.
    pub routhian: f64,
    /// `J = ⟨L₁⟩`.
    pub angular_momentum: f64,
    /// Routhian lowering achieved by the polish over the closed-form candidate (≥ 0).
    pub polish_gain: f64,
}

/// A Slater configuration in a fixed deformed oscillator, cranked about axis 1.
#[derive(Debug)]
pub struct CrankingProblem {
    config: SlaterConfiguration,
    freqs: OscillatorFrequencies,
    gens: Generators,
    hamiltonian: QuadraticForm,
    options: SolverOptions,
    sweep: OnceLock<Result<Vec<(f64, f64)>>>,
}

impl Clone for CrankingProblem {
    fn clone(&self) -> Self {
        Self::with_options(self.config.clone(), self.freqs, self.options).expect("validated on construction")
    }
}

impl CrankingProblem {
    pub fn new(config: SlaterConfiguration, freqs: OscillatorFrequencies) -> Result<Self> {
        Self::with_options(config, freqs, SolverOptions::default())
    }

    pub fn with_options(config: SlaterConfiguration, freqs: OscillatorFrequencies, options: SolverOptions) -> Result<Self> {
        let w = freqs.w();
        if w[1] < w[2] {
            return Err(Error::InvalidInput(format!(
                "axes are labelled with w2 >= w3, got w2 = {} < w3 = {}",
                w[1], w[2]
            )));
        }
        let gens = standard_generators(freqs.basis());
        let hamiltonian = oscillator_hamiltonian(&freqs, gens.basis);
        Ok(Self {
            config,
            freqs,
            gens,
            hamiltonian,
            options,
            sweep: OnceLock::new(),
        })
    }

    pub fn config(&self) -> &SlaterConfiguration {
        &self.config
    }

    pub fn freqs(&self) -> &OscillatorFrequencies {
        &self.freqs
    }

    pub fn generators(&self) -> &Generators {
        &self.gens
    }

    pub fn hamiltonian(&self) -> &QuadraticForm {
        &self.hamiltonian
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    pub fn critical_frequency(&self) -> f64 {
        critical_frequency(&self.freqs)
    }

    /// Largest cranking frequency used by sweeps and inversions.
    pub fn search_limit(&self) -> f64 {
        (1.0 - self.options.critical_margin) * self.critical_frequency()
    }

    pub fn map_at(&self, trial: &TrialPoint) -> Result<SymplecticMap> {
        factorized_map(&self.gens, trial.lambda, trial.theta)
    }

    fn routhian_form(&self, omega: f64) -> QuadraticForm {
        cranked_hamiltonian(&self.freqs, omega, self.gens.basis)
    }

    pub fn routhian_at(&self, omega: f64, trial: &TrialPoint) -> Result<f64> {
        expectation(&self.routhian_form(omega), &self.map_at(trial)?, &self.config)
    }

    fn check_stable(&self, omega: f64) -> Result<CrankedParams> {
        let params = paper_params(&self.freqs, omega);
        if omega.abs() >= self.critical_frequency() || !params.stable {
            return Err(Error::UnstableRegime {
                omega,
                critical: self.critical_frequency(),
            });
        }
        Ok(params)
    }

    pub fn solve(&self, omega: f64) -> Result<CrankedState> {
        self.solve_from(omega, None)
    }

    /// Minimizes the Routhian at `omega`. The closed-form parameters are the
    /// primary candidate; `warm` (if given and lower) seeds the polish instead.
    pub fn solve_from(&self, omega: f64, warm: Option<&TrialPoint>) -> Result<CrankedState> {
        let params = self.check_stable(omega)?;
        let theta = params.stable_theta()?;
        let candidate = TrialPoint {
            lambda: params.lambda,
            theta,
        };
        let candidate_value = self.routhian_at(omega, &candidate)?;
        let mut start = candidate;
        if let Some(w) = warm {
            let warm = TrialPoint {
                theta: [theta[0], w.theta[1], w.theta[2]],
                ..*w
            };
            if self.routhian_at(omega, &warm)? < candidate_value {
                start = warm;
            }
        }
        let theta1 = theta[0];
        let objective = |x: &[f64]| {
            self.routhian_at(
                omega,
                &TrialPoint {
                    lambda: x[0],
                    theta: [theta1, x[1], x[2]],
                },
            )
        };
        let polished = nelder_mead(objective, &[start.lambda, start.theta[1], start.theta[2]], &self.options.polish)?;
        let threshold = self.options.polish.value_tol * candidate_value.abs().max(1.0);
        let trial = if polished.value < candidate_value - threshold {
            TrialPoint {
                lambda: polished.x[0],
                theta: [theta1, polished.x[1], polished.x[2]],
            }
        } else {
            candidate
        };
        self.state_at(omega, trial, params, candidate_value)
    }

    fn state_at(&self, omega: f64, trial: TrialPoint, params: CrankedParams, candidate_value: f64) -> Result<CrankedState> {
        let map = self.map_at(&trial)?;
        let energy = expectation(&self.hamiltonian, &map, &self.config)?;
        let angular_momentum = expectation(&self.gens.l[0], &map, &self.config)?;
        let routhian = energy - omega * angular_momentum;
        Ok(CrankedState {
            omega,
            trial,
            closed_form: params,
            map,
            config: self.config.clone(),
            freqs: self.freqs,
            energy,
            routhian,
            angular_momentum,
            polish_gain: (candidate_value - routhian).max(0.0),
        })
    }

    /// Derivatives of the Routhian along `c₁, s₂, s₃` taken in the state's own
    /// frame, `d/dt ⟨e^{itG}H'e^{-itG}⟩ = −(−i⟨[G, H']⟩)`.
    pub fn stationarity(&self, state: &CrankedState) -> Result<[f64; 3]> {
        let h = self.routhian_form(state.omega);
        let mut out = [0.0; 3];
        for (slot, g) in out.iter_mut().zip([&self.gens.c1, &self.gens.s[1], &self.gens.s[2]]) {
            let body = adjoint_form(g, &state.map)?;
            *slot = -covariance_commutator(&body, &h, &state.map, &state.config)?;
        }
        Ok(out)
    }

    fn forward_sweep(&self) -> Result<&Vec<(f64, f64)>> {
        self.sweep
            .get_or_init(|| {
                let n = self.options.sweep_points.max(2);
                let top = self.search_limit();
                (0..n)
                    .map(|i| {
                        let omega = top * i as f64 / (n - 1) as f64;
                        self.solve(omega).map(|s| (omega, s.angular_momentum))
                    })
                    .collect()
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Supremum of `J` over the searched stable interval.
    pub fn max_angular_momentum(&self) -> Result<f64> {
        Ok(self.forward_sweep()?.last().map(|p| p.1).unwrap_or(0.0))
    }

    /// Finds `ω_I` with `J(ω_I) = I`. Negative `I` maps to negative `ω` by
    /// the odd symmetry of `J`.
    pub fn invert(&self, target: f64) -> Result<CrankedState> {
        self.invert_from(target, None)
    }

    pub fn invert_from(&self, target: f64, warm: Option<&TrialPoint>) -> Result<CrankedState> {
        if target == 0.0 {
            return self.solve(0.0);
        }
        let sign = target.signum();
        let magnitude = target.abs();
        let sweep = self.forward_sweep()?;
        let max = sweep.last().map(|p| p.1).unwrap_or(0.0);
        if !(magnitude <= max) {
            return Err(Error::OutOfRange { requested: target, max });
        }
        let upper = sweep
            .iter()
            .position(|&(_, j)| j >= magnitude)
            .ok_or(Error::OutOfRange { requested: target, max })?;
        if upper == 0 {
            return self.solve(0.0);
        }
        let (a, ja) = sweep[upper - 1];
        let (b, jb) = sweep[upper];
        let tol = self.options.inversion_tol * magnitude.max(1.0);
        let (omega, _) = bracketed_secant(
            |w| Ok(self.solve_from(w, warm)?.angular_momentum - magnitude),
            a,
            b,
            ja - magnitude,
            jb - magnitude,
            tol,
            200,
        )?;
        let state = self.solve_from(sign * omega, warm)?;
        if (state.angular_momentum - target).abs() > 1e-10 * magnitude.max(1.0) {
            return Err(Error::NoConvergence {
                what: "momentum-map inversion",
                iterations: 200,
            });
        }
        Ok(state)
    }

    /// Minimum-energy states at `I = linspace(0, I_max, steps)`, each warm
    /// started from its predecessor.
    pub fn yrast(&self, i_max: f64, steps: usize) -> Result<Vec<CrankedState>> {
        if steps < 2 {
            return Err(Error::InvalidInput("yrast curve needs at least 2 points".into()));
        }
        let mut out: Vec<CrankedState> = Vec::with_capacity(steps);
        for i in 0..steps {
            let target = i_max * i as f64 / (steps - 1) as f64;
            let warm = out.last().map(|s| s.trial);
            out.push(self.invert_from(target, warm.as_ref())?);
        }
        Ok(out)
    }

    /// `dJ/dω` at `ω = 0`: central differences with one Richardson level.
    pub fn moment_of_inertia(&self) -> Result<f64> {
        self.moment_of_inertia_with_step(self.options.omega_step)
    }

    pub fn moment_of_inertia_with_step(&self, h: f64) -> Result<f64> {
        let slope = |h: f64| -> Result<f64> {
            Ok((self.solve(h)?.angular_momentum - self.solve(-h)?.angular_momentum) / (2.0 * h))
        };
        let coarse = slope(h)?;
        let fine = slope(0.5 * h)?;
        Ok((4.0 * fine - coarse) / 3.0)
    }

    /// Rigid-body value `⟨Σ (x₂² + x₃²)⟩` in the given state.
    pub fn rigid_inertia(&self, state: &CrankedState) -> Result<f64> {
        Ok(expectation(&self.gens.x_sq[1], &state.map, &state.config)?
            + expectation(&self.gens.x_sq[2], &state.map, &state.config)?)
    }
}

/// `J(|Z⟩) = ⟨Z|L₁|Z⟩`.
pub fn momentum_map(gens: &Generators, map: &SymplecticMap, config: &SlaterConfiguration) -> Result<f64> {
    expectation(&gens.l[0], map, config)
}

/// Point `e^{-iφL₁}|Z⟩_{ω_I}` of the collective manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldPoint {
    /// Angle in `[0, 2π)`.
    pub phi: f64,
    pub angular_momentum: f64,
    pub state: CrankedState,
    pub total_map: SymplecticMap,
}

pub fn manifold_point(gens: &Generators, state: &CrankedState, phi: f64) -> Result<ManifoldPoint> {
    let rotation = exp_generator(&gens.l[0], phi)?;
    Ok(ManifoldPoint {
        phi: phi.rem_euclid(TAU),
        angular_momentum: state.angular_momentum,
        state: state.clone(),
        total_map: rotation.compose(&state.map),
    })
}

impl ManifoldPoint {
    pub fn config(&self) -> &SlaterConfiguration {
        &self.state.config
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn freqs(w: [f64; 3]) -> OscillatorFrequencies {
        OscillatorFrequencies::from_array(w).unwrap()
    }

    #[test]
    fn filling_examples() {
        let any = freqs([1.3, 1.0, 0.7]);
        let c = fill_orbitals(2, 2, &any, Species::SingleFluid).unwrap();
        assert_eq!(c.orbitals(), &[[0, 0, 0]]);
        let sph = freqs([1.0; 3]);
        let c = fill_orbitals(8, 2, &sph, Species::SingleFluid).unwrap();
        assert_eq!(c.orbitals(), &[[0, 0, 0], [0, 0, 1], [0, 1, 0], [1, 0, 0]]);
        match fill_orbitals(4, 2, &sph, Species::SingleFluid) {
            Err(Error::OpenShell { filled, available, .. }) => {
                assert_eq!((filled, available), (1, 3));
            }
            other => panic!("expected open shell, got {other:?}"),
        }
        assert!(matches!(
            fill_orbitals(3, 2, &sph, Species::SingleFluid),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn filling_is_lowest_energy_first() {
        let f = freqs([1.2, 1.2, 0.5]);
        let c = fill_orbitals(6, 2, &f, Species::Proton).unwrap();
        assert_eq!(c.orbitals(), &[[0, 0, 0], [0, 0, 1], [0, 0, 2]]);
    }

    #[test]
    fn spherical_shell_stays_spherical() {
        let spec = HamiltonianSpec::new(1.0).unwrap();
        let c = fill_orbitals(8, 2, &freqs([1.0; 3]), Species::SingleFluid).unwrap();
        let sol = selfconsistent_frequencies(&spec, &[c]).unwrap();
        for w in sol.freqs.w() {
            assert!((w - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn prolate_shell_matches_closed_form() {
        let spec = HamiltonianSpec::new(1.1).unwrap();
        let c = SlaterConfiguration::new(vec![[0, 0, 0], [0, 0, 1]], 2, Species::SingleFluid).unwrap();
        let sol = selfconsistent_frequencies(&spec, &[c.clone()]).unwrap();
        let t = c.totals();
        let mu = 1.1 * (t[0] * t[1] * t[2]).cbrt();
        let w = sol.freqs.w();
        for k in 0..3 {
            assert!((w[k] - mu / t[k]).abs() < 1e-12);
            assert!((w[k] * t[k] / mu - 1.0).abs() < 1e-8);
        }
        assert!(w[2] < w[1] && (w[0] - w[1]).abs() < 1e-14);
        assert!((sol.freqs.volume() / 1.1f64.powi(3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn static_solution_is_time_even() {
        let f = freqs([1.26, 1.26, 0.63]);
        let c = fill_orbitals(4, 2, &f, Species::SingleFluid).unwrap();
        let problem = CrankingProblem::new(c, f).unwrap();
        let s = problem.solve(0.0).unwrap();
        assert_eq!(s.trial.lambda, 0.0);
        assert_eq!(s.angular_momentum, 0.0);
        let p = paper_params(&f, 0.0);
        assert_eq!(s.trial.theta, p.stable_theta().unwrap());
    }

    #[test]
    fn cranking_above_critical_is_rejected() {
        let f = freqs([1.2, 1.2, 0.6]);
        let c = fill_orbitals(4, 2, &f, Species::SingleFluid).unwrap();
        let problem = CrankingProblem::new(c, f).unwrap();
        assert!(matches!(problem.solve(0.6), Err(Error::UnstableRegime { .. })));
        assert!(matches!(problem.invert(1e9), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn axis_labelling_is_enforced() {
        let f = freqs([1.0, 0.8, 1.2]);
        let c = fill_orbitals(2, 2, &f, Species::SingleFluid).unwrap();
        assert!(CrankingProblem::new(c, f).is_err());
    }

    #[test]
    fn rotation_preserves_angular_momentum() {
        let f = freqs([1.2, 1.2, 0.7]);
        let c = fill_orbitals(4, 2, &f, Species::SingleFluid).unwrap();
        let problem = CrankingProblem::new(c, f).unwrap();
        let s = problem.solve(0.2).unwrap();
        assert!(s.angular_momentum > 0.0);
        for phi in [0.0, 0.4, 2.0, TAU] {
            let p = manifold_point(problem.generators(), &s, phi).unwrap();
            let j = momentum_map(problem.generators(), &p.total_map, p.config()).unwrap();
            assert!((j - s.angular_momentum).abs() < 1e-12);
        }
        let full = manifold_point(problem.generators(), &s, TAU).unwrap();
        assert!((full.total_map.matrix() - s.map.matrix()).amax() < 1e-12);
        assert_eq!(full.phi, 0.0);
        let zero = manifold_point(problem.generators(), &s, 0.0).unwrap();
        assert_eq!(zero.total_map, s.map);
    }
}
