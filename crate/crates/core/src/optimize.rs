//! Limited-memory BFGS with a strong-Wolfe line search.
//!
//! Unbounded: the solver's parameters are rotation angles, which are
//! periodic, so box constraints add nothing.

use std::collections::VecDeque;

use crate::error::Result;
use crate::state::dot;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsOptions {
    /// Stop once `|f_k - f_{k+1}| < f_tol` and `max|g| < g_tol` both hold.
    pub f_tol: f64,
    pub g_tol: f64,
    /// Number of correction pairs kept.
    pub memory: usize,
    /// Hard cap on objective+gradient evaluations.
    pub max_evals: usize,
    pub max_iterations: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            f_tol: 1e-8,
            g_tol: 1e-8,
            memory: 10,
            max_evals: 10_000,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_inf: f64,
    pub evals: usize,
    pub iterations: usize,
    pub converged: bool,
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;
const MAX_BRACKET: usize = 25;
const MAX_ZOOM: usize = 30;

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct Probe {
    alpha: f64,
    f: f64,
    slope: f64,
    g: Vec<f64>,
}

/// Minimizes `fg`, which returns the objective and writes the gradient.
pub fn minimize<F>(mut fg: F, x0: &[f64], opts: &LbfgsOptions) -> Result<Minimum>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<f64>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut f = fg(&x, &mut g)?;
    let mut evals = 1usize;
    let mut iterations = 0usize;
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);

    if inf_norm(&g) < opts.g_tol {
        return Ok(Minimum {
            grad_inf: inf_norm(&g),
            x,
            f,
            evals,
            iterations,
            converged: true,
        });
    }

    let mut converged = false;
    while iterations < opts.max_iterations && evals < opts.max_evals {
        let mut d = direction(&g, &history);
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            history.clear();
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }
        let alpha0 = if history.is_empty() {
            (1.0 / inf_norm(&d)).min(1.0)
        } else {
            1.0
        };

        let budget = opts.max_evals - evals;
        let mut phi = |alpha: f64| -> Result<Probe> {
            let xa: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + alpha * di).collect();
            let mut ga = vec![0.0; n];
            let fa = fg(&xa, &mut ga)?;
            Ok(Probe {
                alpha,
                f: fa,
                slope: dot(&ga, &d),
                g: ga,
            })
        };
        let (found, used) = line_search(&mut phi, f, slope, alpha0, budget)?;
        evals += used;

        let Some(p) = found else {
            if history.is_empty() {
                break;
            }
            // Stale curvature pairs; retry along steepest descent.
            history.clear();
            continue;
        };

        let s: Vec<f64> = d.iter().map(|v| v * p.alpha).collect();
        let y: Vec<f64> = p.g.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-16 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back((s.clone(), y, 1.0 / sy));
        }
        for (xi, si) in x.iter_mut().zip(&s) {
            *xi += si;
        }
        let delta_f = (f - p.f).abs();
        f = p.f;
        g = p.g;
        iterations += 1;
        if delta_f < opts.f_tol && inf_norm(&g) < opts.g_tol {
            converged = true;
            break;
        }
    }
    Ok(Minimum {
        grad_inf: inf_norm(&g),
        x,
        f,
        evals,
        iterations,
        converged,
    })
}

/// Two-loop recursion for `-H g`.
fn direction(g: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut a = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let ai = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= ai * yi;
        }
        a.push(ai);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), ai) in history.iter().zip(a.iter().rev()) {
        let bi = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (ai - bi) * si;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Strong-Wolfe search. Returns the accepted probe (if any) and the number
/// of evaluations spent.
fn line_search<P>(
    phi: &mut P,
    f0: f64,
    slope0: f64,
    alpha0: f64,
    budget: usize,
) -> Result<(Option<Probe>, usize)>
where
    P: FnMut(f64) -> Result<Probe>,
{
    // Rounding slack on the sufficient-decrease test so steps taken right at
    // the noise floor of f are judged by the curvature condition.
    let slack = 8.0 * f64::EPSILON * f0.abs().max(1e-300);
    let armijo = |p: &Probe| p.f <= f0 + C1 * p.alpha * slope0 + slack;
    let curvature = |p: &Probe| p.slope.abs() <= -C2 * slope0;

    let mut used = 0usize;
    let mut prev = Probe {
        alpha: 0.0,
        f: f0,
        slope: slope0,
        g: Vec::new(),
    };
    let mut alpha = alpha0;
    let mut best: Option<Probe> = None;

    let keep_best = |p: &Probe, best: &mut Option<Probe>| {
        if p.f < f0 && best.as_ref().is_none_or(|b| p.f < b.f) {
            *best = Some(Probe {
                alpha: p.alpha,
                f: p.f,
                slope: p.slope,
                g: p.g.clone(),
            });
        }
    };

    for i in 0..MAX_BRACKET {
        if used >= budget {
            return Ok((best, used));
        }
        let cur = phi(alpha)?;
        used += 1;
        if !cur.f.is_finite() {
            alpha *= 0.1;
            continue;
        }
        keep_best(&cur, &mut best);
        if !armijo(&cur) || (i > 0 && cur.f >= prev.f) {
            return zoom(phi, prev, cur, f0, slope0, budget - used, best)
                .map(|(p, u)| (p, used + u));
        }
        if curvature(&cur) {
            return Ok((Some(cur), used));
        }
        if cur.slope >= 0.0 {
            return zoom(phi, cur, prev, f0, slope0, budget - used, best)
                .map(|(p, u)| (p, used + u));
        }
        prev = cur;
        alpha *= 2.0;
    }
    Ok((best, used))
}

fn zoom<P>(
    phi: &mut P,
    mut lo: Probe,
    mut hi: Probe,
    f0: f64,
    slope0: f64,
    budget: usize,
    mut best: Option<Probe>,
) -> Result<(Option<Probe>, usize)>
where
    P: FnMut(f64) -> Result<Probe>,
{
    let slack = 8.0 * f64::EPSILON * f0.abs().max(1e-300);
    let mut used = 0usize;
    for _ in 0..MAX_ZOOM {
        if used >= budget || (hi.alpha - lo.alpha).abs() < 1e-14 * lo.alpha.abs().max(1e-10) {
            break;
        }
        let alpha = interpolate(&lo, &hi);
        let cur = phi(alpha)?;
        used += 1;
        if cur.f.is_finite() && cur.f < f0 && best.as_ref().is_none_or(|b| cur.f < b.f) {
            best = Some(Probe {
                alpha: cur.alpha,
                f: cur.f,
                slope: cur.slope,
                g: cur.g.clone(),
            });
        }
        if !cur.f.is_finite() || cur.f > f0 + C1 * cur.alpha * slope0 + slack || cur.f >= lo.f {
            hi = cur;
        } else {
            if cur.slope.abs() <= -C2 * slope0 {
                return Ok((Some(cur), used));
            }
            if cur.slope * (hi.alpha - lo.alpha) >= 0.0 {
                hi = lo;
            }
            lo = cur;
        }
    }
    Ok((best, used))
}

/// Safeguarded cubic interpolation between two probes.
fn interpolate(a: &Probe, b: &Probe) -> f64 {
    let (lo, hi) = if a.alpha < b.alpha { (a, b) } else { (b, a) };
    let width = hi.alpha - lo.alpha;
    let mid = 0.5 * (lo.alpha + hi.alpha);
    let d1 = lo.slope + hi.slope - 3.0 * (lo.f - hi.f) / (lo.alpha - hi.alpha);
    let disc = d1 * d1 - lo.slope * hi.slope;
    if !disc.is_finite() || disc < 0.0 {
        return mid;
    }
    let d2 = disc.sqrt();
    let t = hi.alpha - width * (hi.slope + d2 - d1) / (hi.slope - lo.slope + 2.0 * d2);
    let margin = 0.1 * width;
    if t.is_finite() && t > lo.alpha + margin && t < hi.alpha - margin {
        t
    } else {
        mid
    }
}
