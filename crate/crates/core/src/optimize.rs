//! Small derivative-free minimizer and a bracketed scalar root finder.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub initial_step: f64,
    pub param_tol: f64,
    pub value_tol: f64,
    pub max_evals: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 1e-3,
            param_tol: 1e-10,
            value_tol: 1e-12,
            max_evals: 4000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

/// Nelder–Mead with the standard coefficients (1, 2, ½, ½). Objective errors
/// are treated as +∞ so the simplex retreats from invalid regions.
pub fn nelder_mead<F>(mut f: F, start: &[f64], opts: &NelderMeadOptions) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = start.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        f(x).ok().filter(|v| v.is_finite()).unwrap_or(f64::INFINITY)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(start, &mut evals);
    if !v0.is_finite() {
        return Err(Error::InvalidInput("minimizer started at an invalid point".into()));
    }
    simplex.push((start.to_vec(), v0));
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] += opts.initial_step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let size = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if size <= opts.param_tol && (worst - best).abs() <= opts.value_tol * best.abs().max(1.0) {
            break;
        }
        if evals >= opts.max_evals {
            return Err(Error::NoConvergence {
                what: "Nelder-Mead",
                iterations: evals,
            });
        }
        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|(x, _)| x[i]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(1.0);
        let vr = eval(&xr, &mut evals);
        if vr < simplex[0].1 {
            let xe = along(2.0);
            let ve = eval(&xe, &mut evals);
            simplex[n] = if ve < vr { (xe, ve) } else { (xr, vr) };
        } else if vr < simplex[n - 1].1 {
            simplex[n] = (xr, vr);
        } else {
            let (xc, vc) = if vr < simplex[n].1 {
                let xc = along(0.5);
                let vc = eval(&xc, &mut evals);
                (xc, vc)
            } else {
                let xc = along(-0.5);
                let vc = eval(&xc, &mut evals);
                (xc, vc)
            };
            if vc < simplex[n].1.min(vr) {
                simplex[n] = (xc, vc);
            } else {
                let x0 = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    let xs: Vec<f64> = x0.iter().zip(&item.0).map(|(a, b)| a + 0.5 * (b - a)).collect();
                    let vs = eval(&xs, &mut evals);
                    *item = (xs, vs);
                }
            }
        }
    }
    let (x, value) = simplex.swap_remove(0);
    Ok(Minimum { x, value, evals })
}

/// Root of `f` inside `[a, b]` (values `fa`, `fb` of opposite sign) by secant
/// steps with the Illinois modification, falling back to bisection whenever a
/// step leaves the bracket or fails to shrink it.
pub fn bracketed_secant<F>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    abs_tol: f64,
    max_iter: usize,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if fa == 0.0 {
        return Ok((a, fa));
    }
    if fb == 0.0 {
        return Ok((b, fb));
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidInput("root is not bracketed".into()));
    }
    let mut side = 0i8;
    for _ in 0..max_iter {
        let width = (b - a).abs();
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !(x > a.min(b) && x < a.max(b)) {
            x = 0.5 * (a + b);
        }
        let fx = f(x)?;
        if fx.abs() <= abs_tol || width <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            return Ok((x, fx));
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() > 0.75 * width {
            // Stalled secant: bisect once.
            let m = 0.5 * (a + b);
            let fm = f(m)?;
            if fm.abs() <= abs_tol {
                return Ok((m, fm));
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
            side = 0;
        }
    }
    Err(Error::NoConvergence {
        what: "bracketed secant",
        iterations: max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_shifted_quadratic() {
        let m = nelder_mead(
            |x| Ok((x[0] - 0.3).powi(2) + 2.0 * (x[1] + 0.1).powi(2) + 0.5 * (x[0] - 0.3) * (x[1] + 0.1)),
            &[0.0, 0.0],
            &NelderMeadOptions {
                initial_step: 0.1,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((m.x[0] - 0.3).abs() < 1e-8);
        assert!((m.x[1] + 0.1).abs() < 1e-8);
    }

    #[test]
    fn secant_finds_cubic_root() {
        let f = |x: f64| Ok(x * x * x - 2.0);
        let (x, _) = bracketed_secant(f, 0.0, 3.0, -2.0, 25.0, 1e-14, 200).unwrap();
        assert!((x - 2f64.cbrt()).abs() < 1e-13);
    }

    #[test]
    fn unbracketed_root_is_rejected() {
        assert!(bracketed_secant(|x| Ok(x), 1.0, 2.0, 1.0, 2.0, 1e-12, 10).is_err());
    }
}
