//! Preconditioned nonlinear conjugate gradients over the orbital variables,
//! with the mixing vector set to the exact lowest eigenvector at every
//! evaluated point. The energy seen by the line search is therefore the
//! fixed-orbital CI minimum, and by the envelope theorem its orbital gradient
//! is the partial gradient at that mixing.
//!
//! Orbital variables live on unit spheres of `L²(r² dr)` with `R₁ ⟂ R₀`.
//! Search directions are tangent: each variable moves orthogonally to itself
//! (and `R₀`, `R₁` orthogonally to each other), and the `R₀`/`R₁` rotation is
//! carried as a separate angle. Points are pulled back onto the constraints
//! after every step.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::layout::Layout;
use super::precond::Preconditioner;
use super::{SolveOptions, TraceRow};
use crate::energy::energy_gradient;
use crate::error::{Error, Result};
use crate::grid::{inner_values, RadialGrid};
use crate::slater_condon::HamiltonianParams;

/// Rounding level of an energy evaluation, in units of its last place.
const ENERGY_ULPS: f64 = 16.0;

#[derive(Debug, Clone)]
pub(crate) struct Point {
    pub vars: Vec<Vec<f64>>,
    pub energy: f64,
    pub mixing: Vec<f64>,
}

pub(crate) struct Outcome {
    pub point: Point,
    pub trace: Vec<TraceRow>,
    pub converged: bool,
    pub residual: f64,
}

pub(crate) struct Problem<'a> {
    pub layout: &'a Layout,
    pub params: HamiltonianParams,
    pub grid: &'a Arc<RadialGrid>,
    pub precond: &'a Preconditioner,
    /// `K + M`, the metric in which convergence is measured.
    pub metric: &'a Preconditioner,
}

fn normalize(v: &mut [f64], grid: &RadialGrid) -> Result<()> {
    let n = inner_values(v, v, grid).sqrt();
    if !(n > 1e-10) || !n.is_finite() {
        return Err(Error::Degenerate("orbital with vanishing norm".into()));
    }
    v.iter_mut().for_each(|x| *x /= n);
    Ok(())
}

/// Normalizes every variable and makes `R₁ ⟂ R₀`.
pub(crate) fn project_variables(vars: &mut [Vec<f64>], grid: &RadialGrid) -> Result<()> {
    normalize(&mut vars[0], grid)?;
    if vars.len() > 1 {
        let s = inner_values(&vars[1], &vars[0], grid);
        let (head, tail) = vars.split_at_mut(1);
        tail[0].iter_mut().zip(&head[0]).for_each(|(a, b)| *a -= s * b);
    }
    for v in vars.iter_mut().skip(1) {
        normalize(v, grid)?;
    }
    Ok(())
}

/// Gradient with the Lagrange-multiplier part of every constraint removed:
/// unit norms and `⟨R₀,R₁⟩ = 0` (variables 0 and 1).
pub(crate) fn project_gradient(vars: &[Vec<f64>], grads: &[Vec<f64>], grid: &RadialGrid) -> Vec<Vec<f64>> {
    let ip = |a: &[f64], b: &[f64]| inner_values(a, b, grid);
    let mu = if vars.len() > 1 {
        0.5 * (ip(&grads[0], &vars[1]) + ip(&grads[1], &vars[0]))
    } else {
        0.0
    };
    vars.iter()
        .zip(grads)
        .enumerate()
        .map(|(k, (v, g))| {
            let lambda = ip(g, v);
            let partner = match k {
                0 if vars.len() > 1 => Some(&vars[1]),
                1 => Some(&vars[0]),
                _ => None,
            };
            (0..v.len())
                .map(|i| g[i] - lambda * v[i] - partner.map_or(0.0, |p| mu * p[i]))
                .collect()
        })
        .collect()
}

/// `L²(r² dr)` norm of [`project_gradient`].
pub fn projected_residual(vars: &[Vec<f64>], grads: &[Vec<f64>], grid: &RadialGrid) -> f64 {
    project_gradient(vars, grads, grid)
        .iter()
        .map(|r| inner_values(r, r, grid))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone)]
struct Direction {
    orb: Vec<Vec<f64>>,
    theta: f64,
}

impl<'a> Problem<'a> {
    pub fn point(&self, vars: Vec<Vec<f64>>) -> Point {
        let orbitals = self.layout.orbitals_of(&vars);
        let (energy, mixing) = self.layout.optimal_mixing(&orbitals, self.params, self.grid);
        Point { vars, energy, mixing }
    }

    /// `L²(r² dr)` gradient with respect to each variable.
    pub fn gradients(&self, p: &Point) -> Result<Vec<Vec<f64>>> {
        let state = self.layout.state(&p.vars, p.mixing.clone(), self.grid, self.params)?;
        let g = energy_gradient(&state);
        Ok(self
            .layout
            .groups
            .iter()
            .map(|group| {
                let mut sum = g.orbitals[group[0]].clone();
                for &slot in &group[1..] {
                    sum.iter_mut().zip(&g.orbitals[slot]).for_each(|(a, b)| *a += b);
                }
                sum
            })
            .collect())
    }

    /// How many electrons, weighted by the mixing, each variable carries.
    fn occupations(&self, mixing: &[f64]) -> Vec<f64> {
        use crate::angular::JjConfig;
        (0..self.layout.n_vars())
            .map(|k| {
                let group = &self.layout.groups[k];
                let n: f64 = JjConfig::ALL
                    .iter()
                    .zip(mixing)
                    .map(|(cfg, x)| {
                        let s = cfg.default_slots();
                        let count = [s.core as usize, s.core as usize, s.low as usize, s.high as usize]
                            .iter()
                            .filter(|slot| group.contains(slot))
                            .count();
                        x * x * count as f64
                    })
                    .sum();
                n.max(1e-4)
            })
            .collect()
    }

    fn constraints<'v>(vars: &'v [Vec<f64>], k: usize) -> Vec<&'v [f64]> {
        match k {
            0 => vec![&vars[0], &vars[1]],
            1 => vec![&vars[1], &vars[0]],
            _ => vec![&vars[k]],
        }
    }

    /// Preconditioned steepest-descent direction, tangent to the constraints.
    fn precondition(&self, p: &Point, grads: &[Vec<f64>]) -> Direction {
        let occ = self.occupations(&p.mixing);
        self.descent(self.precond, p, grads, &occ).0
    }

    /// `−P⁻¹` applied to the gradient with the multipliers chosen so the
    /// result is tangent, each variable scaled by `1/occ`. Also returns the
    /// squared dual norm `Σ (g − Mcλ)ᵀ P⁻¹ (g − Mcλ)` plus the rotation part.
    fn descent(&self, precond: &Preconditioner, p: &Point, grads: &[Vec<f64>], occ: &[f64]) -> (Direction, f64) {
        let m = precond.mass();
        let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
        let mut orb = Vec::with_capacity(grads.len());
        let mut dual = 0.0;
        for (k, g) in grads.iter().enumerate() {
            let ell = self.layout.ell(k);
            let ge: Vec<f64> = g.iter().zip(m).map(|(a, b)| a * b).collect();
            let cs = Self::constraints(&p.vars, k);
            let mcs: Vec<Vec<f64>> = cs.iter().map(|c| c.iter().zip(m).map(|(a, b)| a * b).collect()).collect();
            let a = precond.solve(ell, &ge);
            let bs: Vec<Vec<f64>> = mcs.iter().map(|mc| precond.solve(ell, mc)).collect();
            let nc = cs.len();
            let gram = DMatrix::from_fn(nc, nc, |i, j| dot(&mcs[i], &bs[j]));
            let rhs = DVector::from_fn(nc, |i, _| dot(&mcs[i], &a));
            let lambda = gram.lu().solve(&rhs).unwrap_or_else(|| DVector::zeros(nc));
            let z: Vec<f64> = (0..a.len())
                .map(|i| -(a[i] - (0..nc).map(|j| lambda[j] * bs[j][i]).sum::<f64>()))
                .collect();
            let r: Vec<f64> = (0..ge.len())
                .map(|i| ge[i] - (0..nc).map(|j| lambda[j] * mcs[j][i]).sum::<f64>())
                .collect();
            dual -= dot(&r, &z);
            orb.push(z.into_iter().map(|x| x / occ[k]).collect());
        }
        let (gamma, curvature) = self.rotation(precond, p, grads, occ);
        dual += gamma * gamma / curvature;
        (
            Direction {
                orb,
                theta: -gamma / curvature,
            },
            dual,
        )
    }

    /// `dE/dθ` for `R₀ → cos θ R₀ + sin θ R₁`, `R₁ → cos θ R₁ − sin θ R₀`,
    /// and a curvature scale for it.
    fn rotation(&self, precond: &Preconditioner, p: &Point, grads: &[Vec<f64>], occ: &[f64]) -> (f64, f64) {
        let g = &**self.grid;
        let gamma = inner_values(&grads[0], &p.vars[1], g) - inner_values(&grads[1], &p.vars[0], g);
        let curvature =
            occ[0] * precond.energy_norm(0, &p.vars[1]) + occ[1] * precond.energy_norm(0, &p.vars[0]);
        (gamma, curvature)
    }

    /// Dual norm of the projected gradient under the unit-shift metric.
    pub fn dual_residual(&self, p: &Point, grads: &[Vec<f64>]) -> f64 {
        let unit = vec![1.0; grads.len()];
        self.descent(self.metric, p, grads, &unit).1.max(0.0).sqrt()
    }

    fn slope(&self, grads: &[Vec<f64>], gamma: f64, d: &Direction) -> f64 {
        let g = &**self.grid;
        grads.iter().zip(&d.orb).map(|(gr, dk)| inner_values(gr, dk, g)).sum::<f64>() + gamma * d.theta
    }

    /// Removes the components of an old direction that left the tangent space.
    fn transport(&self, vars: &[Vec<f64>], d: &mut Direction) {
        let g = &**self.grid;
        for (k, dk) in d.orb.iter_mut().enumerate() {
            for c in Self::constraints(vars, k) {
                let s = inner_values(dk, c, g);
                dk.iter_mut().zip(c).for_each(|(a, b)| *a -= s * b);
            }
        }
    }

    fn retract(&self, vars: &[Vec<f64>], d: &Direction, t: f64) -> Result<Vec<Vec<f64>>> {
        let (s, c) = (t * d.theta).sin_cos();
        let mut out = vars.to_vec();
        for i in 0..vars[0].len() {
            out[0][i] = c * vars[0][i] + s * vars[1][i];
            out[1][i] = c * vars[1][i] - s * vars[0][i];
        }
        for (v, dk) in out.iter_mut().zip(&d.orb) {
            v.iter_mut().zip(dk).for_each(|(a, b)| *a += t * b);
        }
        project_variables(&mut out, self.grid)?;
        Ok(out)
    }

    /// Sufficient-decrease backtracking with quadratic interpolation, and
    /// one extrapolated trial when the accepted step looks short. Trials whose
    /// predicted decrease is below the energy's rounding level are left to
    /// [`Self::secant_search`].
    fn line_search(&self, p: &Point, d: &Direction, slope: f64, t0: f64, opts: &SolveOptions) -> Result<Option<(Point, f64)>> {
        let noise = ENERGY_ULPS * f64::EPSILON * p.energy.abs().max(1.0);
        let mut t = t0;
        for _ in 0..opts.max_backtracks {
            if -slope * t < noise {
                break;
            }
            let trial = self.point(self.retract(&p.vars, d, t)?);
            let curvature = trial.energy - p.energy - slope * t;
            if trial.energy.is_finite() && trial.energy <= p.energy + opts.armijo * t * slope {
                if curvature > 0.0 {
                    let t_model = -slope * t * t / (2.0 * curvature);
                    if t_model > 1.5 * t {
                        let t2 = t_model.min(4.0 * t);
                        let further = self.point(self.retract(&p.vars, d, t2)?);
                        if further.energy < trial.energy {
                            return Ok(Some((further, t2)));
                        }
                    }
                }
                return Ok(Some((trial, t)));
            }
            let t_model = if curvature > 0.0 && trial.energy.is_finite() {
                -slope * t * t / (2.0 * curvature)
            } else {
                0.5 * t
            };
            t = t_model.clamp(0.1 * t, 0.5 * t);
        }
        self.secant_search(p, d, slope, t0)
    }

    /// Directional derivative at `trial`, along `d` carried to that point.
    fn slope_at(&self, trial: &Point, d: &Direction) -> Result<f64> {
        let grads = self.gradients(trial)?;
        let occ = self.occupations(&trial.mixing);
        let (gamma, _) = self.rotation(self.precond, trial, &grads, &occ);
        let mut moved = d.clone();
        self.transport(&trial.vars, &mut moved);
        let tangent = project_gradient(&trial.vars, &grads, self.grid);
        Ok(self.slope(&tangent, gamma, &moved))
    }

    /// Near a minimum the energy decrease drops below rounding and the
    /// sufficient-decrease test cannot resolve it. The zero of the
    /// directional derivative is located by secant steps instead, and a step
    /// is taken only if it does not raise the energy.
    fn secant_search(&self, p: &Point, d: &Direction, slope: f64, t0: f64) -> Result<Option<(Point, f64)>> {
        let (mut ta, mut sa) = (0.0, slope);
        let mut tb = t0;
        let mut trial = self.point(self.retract(&p.vars, d, tb)?);
        let mut sb = self.slope_at(&trial, d)?;
        for _ in 0..10 {
            if sb.abs() <= 0.1 * slope.abs() {
                break;
            }
            let t = if sb > sa { tb - sb * (tb - ta) / (sb - sa) } else { 2.0 * tb };
            let t = if t > 0.0 && t.is_finite() { t.min(4.0 * tb.max(ta)) } else { 0.5 * tb };
            (ta, sa) = (tb, sb);
            tb = t;
            trial = self.point(self.retract(&p.vars, d, tb)?);
            sb = self.slope_at(&trial, d)?;
        }
        if !(sb.abs() < 0.5 * slope.abs()) {
            return Ok(None);
        }
        // rounding decides the last ulps of the energy; nearby steps differ
        for scale in [1.0, 0.95, 1.05, 0.9] {
            let candidate = if scale == 1.0 {
                trial.clone()
            } else {
                self.point(self.retract(&p.vars, d, scale * tb)?)
            };
            if candidate.energy <= p.energy {
                return Ok(Some((candidate, scale * tb)));
            }
        }
        Ok(None)
    }

    pub fn minimize(&self, vars: Vec<Vec<f64>>, opts: &SolveOptions) -> Result<Outcome> {
        let mut vars = vars;
        project_variables(&mut vars, self.grid)?;
        let mut p = self.point(vars);
        let mut trace = Vec::new();
        let mut previous: Option<(Direction, Vec<Vec<f64>>, f64, f64)> = None;
        let mut step = opts.initial_step;
        let mut converged = false;
        let mut residual;
        let mut iter = 0;
        loop {
            let grads = self.gradients(&p)?;
            let tangent = project_gradient(&p.vars, &grads, self.grid);
            residual = self.dual_residual(&p, &grads);
            trace.push(TraceRow {
                iteration: iter,
                energy: p.energy,
                residual,
            });
            if residual < opts.gradient_tol {
                converged = true;
                break;
            }
            if iter >= opts.max_iter {
                break;
            }
            let occ = self.occupations(&p.mixing);
            let (gamma, _) = self.rotation(self.precond, &p, &grads, &occ);
            let z = self.precondition(&p, &grads);
            // ⟨z, −g⟩ in the dual pairing
            let zr = -self.slope(&tangent, gamma, &z);
            let mut d = z.clone();
            if let Some((mut old_d, old_tangent, old_gamma, old_zr)) = previous.take() {
                let cross = -self.slope(&old_tangent, old_gamma, &z);
                let beta = ((zr - cross) / old_zr).max(0.0);
                self.transport(&p.vars, &mut old_d);
                for (dk, ok) in d.orb.iter_mut().zip(&old_d.orb) {
                    dk.iter_mut().zip(ok).for_each(|(a, b)| *a += beta * b);
                }
                d.theta += beta * old_d.theta;
            }
            let mut slope = self.slope(&tangent, gamma, &d);
            if !(slope < 0.0) {
                d = z.clone();
                slope = -zr;
            }
            match self.line_search(&p, &d, slope, step, opts)? {
                Some((next, t)) => {
                    step = (2.0 * t).min(opts.max_step);
                    previous = Some((d, tangent, gamma, zr));
                    p = next;
                }
                None => {
                    if previous.is_none() {
                        // no decrease even along the preconditioned gradient
                        converged = 0.5 * residual * residual < opts.energy_tol;
                        break;
                    }
                    step = opts.initial_step;
                }
            }
            iter += 1;
        }
        Ok(Outcome {
            point: p,
            trace,
            converged,
            residual,
        })
    }
}
