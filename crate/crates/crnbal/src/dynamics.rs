//! Mass-action ODE simulation and equilibrium computations.
//!
//! The dynamics are `xdot = Z D v(x)` with `v_j(x) = k_j prod_i x_i^Z_{i,s_j}`
//! over the substrate column of each reaction. Integration uses an adaptive
//! embedded Dormand-Prince 5(4) pair in linear coordinates with a strict
//! positivity guard (no projection: a step that cannot stay positive shrinks,
//! and persistent shrinkage near the boundary aborts with diagnostics).
//! A log-coordinate fallback is available for stiff problems.
//!
//! The Gibbs function `G(x) = x^T Ln(x / x_ref) + (x_ref - x)^T 1` acts as a
//! Lyapunov function for complex-balanced networks and is used to
//! cross-validate the exact balance verdicts against trajectories.

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::balance::is_complex_balanced;
use crate::linalg::{column_space_integer_basis, nullspace_integer_basis, RationalMatrix};
use crate::model::{build_matrices, MatrixBundle, ReactionNetwork};
use crate::rational::to_f64;

/// One time point of a trajectory; concentrations are strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub x: Vec<f64>,
}

/// Integration counters and quality measures for one run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub min_step: f64,
    /// Max relative drift of the conservation laws (left kernel of S).
    pub max_conservation_drift: f64,
}

/// Time-ordered positive states plus per-run statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub stats: StepStats,
    /// Minimum over time of the smallest concentration (persistence monitor).
    pub boundary_proximity: f64,
}

impl Trajectory {
    pub fn initial(&self) -> &State {
        self.states.first().expect("trajectory has at least the initial state")
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("trajectory has at least the initial state")
    }

    /// CSV export with header `t,x_1,...,x_m,G`. `G` is evaluated against
    /// `gibbs_ref` when given, `nan` otherwise. 17 significant digits.
    pub fn to_csv(&self, gibbs_ref: Option<&[f64]>) -> String {
        let m = self.initial().x.len();
        let mut out = String::from("t");
        for i in 1..=m {
            out.push_str(&format!(",x_{i}"));
        }
        out.push_str(",G\n");
        for state in &self.states {
            out.push_str(&format!("{:.16e}", state.t));
            for x in &state.x {
                out.push_str(&format!(",{x:.16e}"));
            }
            let g = match gibbs_ref {
                Some(x_ref) => gibbs(&state.x, x_ref).unwrap_or(f64::NAN),
                None => f64::NAN,
            };
            out.push_str(&format!(",{g:.16e}\n"));
        }
        out
    }
}

/// Integration controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Integrate `u = Ln x` instead of `x` (opt-in stiffness fallback).
    pub log_coordinates: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { rtol: 1e-8, atol: 1e-12, max_steps: 2_000_000, log_coordinates: false }
    }
}

#[derive(Debug, Clone, Error)]
pub enum DynamicsError {
    #[error("concentration at index {index} is not strictly positive")]
    NonPositiveConcentration { index: usize },
    #[error("integration horizon must be positive")]
    NonPositiveHorizon,
    #[error(
        "step size underflow near the positive boundary at t = {t} \
         (boundary proximity {proximity:e}); partial trajectory retained"
    )]
    BoundaryApproach { t: f64, proximity: f64, trajectory: Box<Trajectory> },
    #[error("step limit exceeded after {steps} accepted steps")]
    StepLimit { steps: usize },
    #[error("network is not complex-balanced; no compatible equilibrium is defined")]
    NotComplexBalanced,
    #[error(
        "equilibrium iteration did not converge (gradient norm {gradient_norm:e} \
         after {iterations} iterations)"
    )]
    NonConvergence { iterations: usize, gradient_norm: f64, last: Vec<f64> },
}

fn check_positive(x: &[f64]) -> Result<(), DynamicsError> {
    match x.iter().position(|&v| !(v > 0.0)) {
        Some(index) => Err(DynamicsError::NonPositiveConcentration { index }),
        None => Ok(()),
    }
}

/// Mass-action reaction rates `v_j = k_j prod_i x_i^{Z_{i,s_j}}`.
pub fn rate_vector(net: &ReactionNetwork, x: &[f64]) -> Result<Vec<f64>, DynamicsError> {
    check_positive(x)?;
    assert_eq!(x.len(), net.num_species(), "state dimension mismatch");
    Ok(net
        .reactions()
        .iter()
        .map(|rx| {
            let coeffs = net.complexes()[rx.substrate].coefficients();
            let monomial: f64 = coeffs
                .iter()
                .zip(x)
                .map(|(&e, &xi)| xi.powi(e.to_i32().expect("small exponent")))
                .product();
            to_f64(&rx.rate_constant) * monomial
        })
        .collect())
}

struct MassActionSystem {
    s: Vec<Vec<f64>>,
    k: Vec<f64>,
    substrate_exponents: Vec<Vec<i32>>,
}

impl MassActionSystem {
    fn new(net: &ReactionNetwork, bundle: &MatrixBundle) -> Self {
        MassActionSystem {
            s: bundle.s.to_f64_rows(),
            k: net.reactions().iter().map(|rx| to_f64(&rx.rate_constant)).collect(),
            substrate_exponents: net
                .reactions()
                .iter()
                .map(|rx| {
                    net.complexes()[rx.substrate]
                        .coefficients()
                        .iter()
                        .map(|&e| e.to_i32().expect("small exponent"))
                        .collect()
                })
                .collect(),
        }
    }

    fn derivative(&self, x: &[f64], out: &mut [f64]) {
        let rates: Vec<f64> = self
            .k
            .iter()
            .zip(&self.substrate_exponents)
            .map(|(&k, exps)| {
                k * exps.iter().zip(x).map(|(&e, &xi)| xi.powi(e)).product::<f64>()
            })
            .collect();
        for (i, row) in self.s.iter().enumerate() {
            out[i] = row.iter().zip(&rates).map(|(&s, &v)| s * v).sum();
        }
    }
}

// Dormand-Prince 5(4) tableau.
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates the mass-action ODE from `x0` to `t_end`.
///
/// States are recorded at every accepted step. Positivity is enforced by
/// step rejection only; when the step size underflows near the boundary the
/// run aborts with the partial trajectory and its boundary proximity.
pub fn simulate(
    net: &ReactionNetwork,
    x0: &[f64],
    t_end: f64,
    options: &SimOptions,
) -> Result<Trajectory, DynamicsError> {
    check_positive(x0)?;
    if !(t_end > 0.0) {
        return Err(DynamicsError::NonPositiveHorizon);
    }
    let bundle = build_matrices(net);
    let system = MassActionSystem::new(net, &bundle);
    let m = x0.len();

    // Conservation laws: integer basis of the left kernel of S.
    let conservation: Vec<Vec<f64>> = nullspace_integer_basis(&bundle.s.transpose())
        .into_iter()
        .map(|w| w.iter().map(|c| c.to_f64().expect("small integer")).collect())
        .collect();
    let invariants0: Vec<f64> = conservation
        .iter()
        .map(|w| w.iter().zip(x0).map(|(a, b)| a * b).sum())
        .collect();

    // RHS in the integration coordinates.
    let log_coords = options.log_coordinates;
    let to_state = |y: &[f64]| -> Vec<f64> {
        if log_coords {
            y.iter().map(|u| u.exp()).collect()
        } else {
            y.to_vec()
        }
    };
    let rhs = |y: &[f64], out: &mut [f64]| -> bool {
        let x = to_state(y);
        if !log_coords && x.iter().any(|&v| !(v > 0.0)) {
            return false;
        }
        if x.iter().any(|&v| !v.is_finite()) {
            return false;
        }
        system.derivative(&x, out);
        if log_coords {
            for (o, xi) in out.iter_mut().zip(&x) {
                *o /= xi;
            }
        }
        out.iter().all(|v| v.is_finite())
    };

    let mut y: Vec<f64> = if log_coords {
        x0.iter().map(|&v| v.ln()).collect()
    } else {
        x0.to_vec()
    };
    let mut t = 0.0f64;
    let mut stats = StepStats { min_step: f64::INFINITY, ..Default::default() };
    let mut boundary_proximity = x0.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut states = vec![State { t, x: x0.to_vec() }];

    let mut k = vec![vec![0.0; m]; 7];
    if !rhs(&y, &mut k[0]) {
        return Err(DynamicsError::NonPositiveConcentration { index: 0 });
    }
    // Initial step from the derivative scale.
    let scale0 = y.iter().map(|v| options.atol + options.rtol * v.abs()).sum::<f64>() / m as f64;
    let d1 = k[0].iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    let mut h = if d1 > 0.0 { (0.01 * scale0.max(1e-6) / d1).min(t_end / 10.0) } else { t_end / 100.0 };
    h = h.max(1e-10 * t_end);
    let h_min = 1e-14 * t_end.max(1.0);

    let mut fsal_valid = true;
    while t < t_end {
        if stats.accepted + stats.rejected > options.max_steps {
            return Err(DynamicsError::StepLimit { steps: stats.accepted });
        }
        h = h.min(t_end - t);

        if !fsal_valid && !rhs(&y, &mut k[0]) {
            return Err(boundary_abort(t, boundary_proximity, states, stats));
        }
        fsal_valid = true;

        let mut failed_stage = false;
        let mut y_stage = vec![0.0; m];
        for stage in 1..7 {
            for (i, ys) in y_stage.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(stage) {
                    acc += DP_A[stage - 1][j] * kj[i];
                }
                *ys = y[i] + h * acc;
            }
            let (head, tail) = k.split_at_mut(stage);
            let _ = head;
            if !rhs(&y_stage, &mut tail[0]) {
                failed_stage = true;
                break;
            }
        }

        // Fifth-order solution is the last stage state (FSAL pair).
        let y_new = y_stage;
        let positive_ok = log_coords || y_new.iter().all(|&v| v > 0.0);

        let error = if failed_stage || !positive_ok {
            f64::INFINITY
        } else {
            let mut sum_sq = 0.0;
            for i in 0..m {
                let err_i: f64 = (0..7).map(|s| DP_ERR[s] * k[s][i]).sum::<f64>() * h;
                let sc = options.atol + options.rtol * y[i].abs().max(y_new[i].abs());
                sum_sq += (err_i / sc) * (err_i / sc);
            }
            (sum_sq / m as f64).sqrt()
        };

        if error <= 1.0 {
            t += h;
            y = y_new;
            k.swap(0, 6); // FSAL: last stage derivative becomes the first
            let x = to_state(&y);
            boundary_proximity =
                boundary_proximity.min(x.iter().cloned().fold(f64::INFINITY, f64::min));
            for (w, inv0) in conservation.iter().zip(&invariants0) {
                let value: f64 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
                let drift = (value - inv0).abs() / (1.0 + inv0.abs());
                stats.max_conservation_drift = stats.max_conservation_drift.max(drift);
            }
            states.push(State { t, x });
            stats.accepted += 1;
            stats.min_step = stats.min_step.min(h);
            let factor = if error == 0.0 { 5.0 } else { (0.9 * error.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        } else {
            stats.rejected += 1;
            fsal_valid = false;
            h *= if error.is_finite() { (0.9 * error.powf(-0.2)).clamp(0.1, 0.9) } else { 0.5 };
            if h < h_min {
                return Err(boundary_abort(t, boundary_proximity, states, stats));
            }
        }
    }

    Ok(Trajectory { states, stats, boundary_proximity })
}

fn boundary_abort(
    t: f64,
    proximity: f64,
    states: Vec<State>,
    stats: StepStats,
) -> DynamicsError {
    DynamicsError::BoundaryApproach {
        t,
        proximity,
        trajectory: Box::new(Trajectory { states, stats, boundary_proximity: proximity }),
    }
}

/// Outcome of comparing a trajectory's end state against an expected
/// equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvergenceAssessment {
    Converged { deviation: f64 },
    NotConverged { deviation: f64 },
    /// The run came too close to the positive boundary for the convergence
    /// guarantee to apply (persistence is unproven in general), so no
    /// verdict is made either way.
    Inconclusive { boundary_proximity: f64 },
}

/// Classifies a trajectory against `x_eq` in the max norm. Runs whose
/// boundary proximity drops below `1e-6 * min(x0)` are inconclusive rather
/// than failures.
pub fn assess_convergence(
    trajectory: &Trajectory,
    x_eq: &[f64],
    tol: f64,
) -> ConvergenceAssessment {
    let min_x0 = trajectory.initial().x.iter().cloned().fold(f64::INFINITY, f64::min);
    if trajectory.boundary_proximity < 1e-6 * min_x0 {
        return ConvergenceAssessment::Inconclusive {
            boundary_proximity: trajectory.boundary_proximity,
        };
    }
    let deviation = trajectory
        .last()
        .x
        .iter()
        .zip(x_eq)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    if deviation <= tol {
        ConvergenceAssessment::Converged { deviation }
    } else {
        ConvergenceAssessment::NotConverged { deviation }
    }
}

/// Gibbs function `G(x) = x^T Ln(x / x_ref) + (x_ref - x)^T 1`: strictly
/// convex with minimum 0 at `x = x_ref`.
pub fn gibbs(x: &[f64], x_ref: &[f64]) -> Result<f64, DynamicsError> {
    check_positive(x)?;
    check_positive(x_ref)?;
    Ok(x.iter()
        .zip(x_ref)
        .map(|(&xi, &ri)| xi * (xi / ri).ln() + (ri - xi))
        .sum())
}

/// The quadratic-like form `gamma^T B Exp(gamma)` for a balanced Laplacian
/// `B = L diag(rho)`: non-negative, and zero exactly on `ker D^T`
/// (per-component constant vectors).
pub fn proposition1_form(balanced: &RationalMatrix, gamma: &[f64]) -> f64 {
    assert_eq!(balanced.rows(), gamma.len(), "dimension mismatch");
    let b = balanced.to_f64_rows();
    let exp_gamma: Vec<f64> = gamma.iter().map(|g| g.exp()).collect();
    gamma
        .iter()
        .enumerate()
        .map(|(i, &gi)| {
            gi * b[i].iter().zip(&exp_gamma).map(|(&bij, &ej)| bij * ej).sum::<f64>()
        })
        .sum()
}

/// The unique equilibrium in the stoichiometric compatibility class of `x0`
/// of a complex-balanced network, found by damped Newton on the reduced
/// coordinates of the class (minimizing the Gibbs function over
/// `{x0 + im S} ∩ R^m_+`).
pub fn find_compatible_equilibrium(
    net: &ReactionNetwork,
    x0: &[f64],
) -> Result<Vec<f64>, DynamicsError> {
    check_positive(x0)?;
    let verdict = is_complex_balanced(net);
    let Some(cert) = verdict.holds.then_some(verdict.certificate).flatten() else {
        return Err(DynamicsError::NotComplexBalanced);
    };
    let x_star = &cert.x_star;
    let bundle = build_matrices(net);
    let basis = column_space_integer_basis(&bundle.s);
    if basis.is_empty() {
        return Ok(x0.to_vec()); // S = 0: every positive state is stationary
    }
    let m = x0.len();
    let d = basis.len();
    let u_cols: Vec<Vec<f64>> = basis
        .iter()
        .map(|col| col.iter().map(|c| c.to_f64().expect("small integer")).collect())
        .collect();

    let state_at = |u: &nalgebra::DVector<f64>| -> Vec<f64> {
        (0..m)
            .map(|i| x0[i] + (0..d).map(|j| u_cols[j][i] * u[j]).sum::<f64>())
            .collect()
    };
    let grad_at = |x: &[f64]| -> nalgebra::DVector<f64> {
        nalgebra::DVector::from_fn(d, |j, _| {
            (0..m).map(|i| u_cols[j][i] * (x[i] / x_star[i]).ln()).sum()
        })
    };

    let scale = 1.0
        + x0.iter()
            .zip(x_star)
            .map(|(&a, &b)| (a / b).ln().abs())
            .fold(0.0f64, f64::max);
    let tol = 1e-13 * scale;
    let mut u = nalgebra::DVector::zeros(d);
    let mut x = state_at(&u);
    let mut g_val = gibbs(&x, x_star).expect("positive state");

    for iteration in 0..200 {
        let grad = grad_at(&x);
        let grad_norm = grad.amax();
        if grad_norm <= tol {
            return Ok(x);
        }
        let mut hess = nalgebra::DMatrix::zeros(d, d);
        for a in 0..d {
            for b in a..d {
                let value: f64 = (0..m).map(|i| u_cols[a][i] * u_cols[b][i] / x[i]).sum();
                hess[(a, b)] = value;
                hess[(b, a)] = value;
            }
        }
        let delta = hess
            .clone()
            .cholesky()
            .map(|ch| ch.solve(&(-&grad)))
            .unwrap_or_else(|| {
                hess.lu().solve(&(-&grad)).unwrap_or_else(|| -grad.clone())
            });

        // Backtrack into the positive orthant, then until G decreases.
        let mut alpha = 1.0f64;
        let mut accepted = false;
        for _ in 0..60 {
            let u_try = &u + alpha * &delta;
            let x_try = state_at(&u_try);
            if x_try.iter().all(|&v| v > 0.0) {
                let g_try = gibbs(&x_try, x_star).expect("positive state");
                if g_try <= g_val + 1e-14 * (1.0 + g_val.abs()) {
                    u = u_try;
                    x = x_try;
                    g_val = g_try;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err(DynamicsError::NonConvergence {
                iterations: iteration,
                gradient_norm: grad_norm,
                last: x,
            });
        }
    }
    let grad_norm = grad_at(&x).amax();
    if grad_norm <= tol * 10.0 {
        return Ok(x);
    }
    Err(DynamicsError::NonConvergence { iterations: 200, gradient_norm: grad_norm, last: x })
}
