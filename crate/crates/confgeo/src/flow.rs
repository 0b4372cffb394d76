//! Fixed-step RK4 integration of Hamiltonian flows under the deformed
//! bracket and of the geodesic equation with the rescaled symbols
//! `Gamma~ = Gamma / (alpha + 1)`, plus first-integral drift monitoring.
//!
//! Integration halts (with the partial trajectory preserved) the moment a
//! proposed state leaves the open domain box: the |x|-singularities at
//! zero and the horizon must not be crossed silently.

use thiserror::Error;

use crate::domain::DomainBox;
use crate::expr::{EvalError, Expr};
use crate::fields::VectorField;
use crate::metric::{christoffel, inverse_metric, MetricSpec, DIM};

#[derive(Debug, Clone, Error)]
pub enum FlowError {
    #[error("state left the domain at step {step} (t = {t})")]
    DomainExit { step: usize, t: f64 },
    #[error("non-finite state at step {step}")]
    NonFinite { step: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A time-stamped trajectory with per-step monitor values.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    pub states: Vec<Vec<f64>>,
    pub monitor_names: Vec<String>,
    /// `monitors[m][step]`
    pub monitors: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time(&self, step: usize) -> f64 {
        self.t0 + self.dt * step as f64
    }

    /// CSV with header `t,q1..q4,p1..p4,<monitor names>`, one row per
    /// stored state, shortest round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,q1,q2,q3,q4,p1,p2,p3,p4");
        for name in &self.monitor_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (step, state) in self.states.iter().enumerate() {
            out.push_str(&format!("{:?}", self.time(step)));
            for v in state {
                out.push_str(&format!(",{v:?}"));
            }
            for m in &self.monitors {
                out.push_str(&format!(",{:?}", m[step]));
            }
            out.push('\n');
        }
        out
    }
}

/// Drift summary of one monitored quantity.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MonitorDrift {
    pub name: String,
    pub initial: f64,
    pub max_drift: f64,
    pub relative_drift: f64,
    /// first step whose relative drift exceeded the given tolerance
    pub first_failure_step: Option<usize>,
}

/// Per-monitor conservation report:
/// `drift = max_t |m(t) - m(0)|`, relative to `max(1, |m(0)|)`.
pub fn conservation_report(traj: &Trajectory, tol: f64) -> Vec<MonitorDrift> {
    assert!(!traj.is_empty(), "conservation report needs a non-empty trajectory");
    traj.monitor_names
        .iter()
        .zip(&traj.monitors)
        .map(|(name, series)| {
            let initial = series[0];
            let scale = initial.abs().max(1.0);
            let mut max_drift = 0.0f64;
            let mut first_failure_step = None;
            for (step, v) in series.iter().enumerate() {
                let d = (v - initial).abs();
                max_drift = max_drift.max(d);
                if first_failure_step.is_none() && d / scale > tol {
                    first_failure_step = Some(step);
                }
            }
            MonitorDrift {
                name: name.clone(),
                initial,
                max_drift,
                relative_drift: max_drift / scale,
                first_failure_step,
            }
        })
        .collect()
}

struct Rhs<'a> {
    field: &'a VectorField,
    alpha: f64,
}

impl Rhs<'_> {
    fn eval(&self, state: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        for (i, e) in self.field.components.iter().enumerate() {
            out[i] = if e.is_zero() { 0.0 } else { e.eval(state, self.alpha)? };
        }
        Ok(())
    }
}

fn rk4_run(
    rhs: &Rhs,
    x0: &[f64],
    t0: f64,
    dt: f64,
    steps: usize,
    domain: &DomainBox,
    monitors: &[(String, Expr)],
    alpha: f64,
) -> Result<Trajectory, (Trajectory, FlowError)> {
    let dim = x0.len();
    let mut traj = Trajectory {
        t0,
        dt,
        states: Vec::with_capacity(steps + 1),
        monitor_names: monitors.iter().map(|(n, _)| n.clone()).collect(),
        monitors: vec![Vec::with_capacity(steps + 1); monitors.len()],
    };
    let record =
        |traj: &mut Trajectory, state: &[f64]| -> Result<(), EvalError> {
            traj.states.push(state.to_vec());
            for (m, (_, e)) in monitors.iter().enumerate() {
                traj.monitors[m].push(e.eval(state, alpha)?);
            }
            Ok(())
        };

    let mut state = x0.to_vec();
    if !domain.contains(&state) {
        return Err((traj, FlowError::DomainExit { step: 0, t: t0 }));
    }
    if let Err(e) = record(&mut traj, &state) {
        return Err((traj, e.into()));
    }

    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];

    for step in 1..=steps {
        let stage = |k: &mut Vec<f64>, base: &[f64], rhs: &Rhs| rhs.eval(base, k);
        if let Err(e) = (|| -> Result<(), EvalError> {
            stage(&mut k1, &state, rhs)?;
            for i in 0..dim {
                tmp[i] = state[i] + 0.5 * dt * k1[i];
            }
            stage(&mut k2, &tmp, rhs)?;
            for i in 0..dim {
                tmp[i] = state[i] + 0.5 * dt * k2[i];
            }
            stage(&mut k3, &tmp, rhs)?;
            for i in 0..dim {
                tmp[i] = state[i] + dt * k3[i];
            }
            stage(&mut k4, &tmp, rhs)?;
            Ok(())
        })() {
            return Err((traj, e.into()));
        }
        for i in 0..dim {
            state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if state.iter().any(|v| !v.is_finite()) {
            return Err((traj, FlowError::NonFinite { step }));
        }
        if !domain.contains(&state) {
            return Err((traj, FlowError::DomainExit { step, t: t0 + dt * step as f64 }));
        }
        if let Err(e) = record(&mut traj, &state) {
            return Err((traj, e.into()));
        }
    }
    Ok(traj)
}

/// Integrate `x' = X_H(x)` with classic fourth-order Runge-Kutta,
/// recording the monitors at every stored step. On domain exit the partial
/// trajectory accompanies the error.
#[allow(clippy::too_many_arguments)]
pub fn integrate_hamiltonian(
    field: &VectorField,
    x0: &[f64],
    dt: f64,
    steps: usize,
    domain: &DomainBox,
    monitors: &[(String, Expr)],
    alpha: f64,
) -> Result<Trajectory, (Trajectory, FlowError)> {
    assert!(dt > 0.0, "dt must be positive");
    let rhs = Rhs { field, alpha };
    rk4_run(&rhs, x0, 0.0, dt, steps, domain, monitors, alpha)
}

/// First-order geodesic system on the tangent bundle:
/// `q'^m = v^m, v'^m = -(1/(alpha+1)) Gamma^m_{nl} v^n v^l`.
/// State layout: (q^1..q^4, v^1..v^4); the domain box constrains q only.
pub fn geodesic_field(g: &MetricSpec) -> VectorField {
    let inv = inverse_metric(g);
    let gamma = christoffel(g, &inv);
    let mut f = VectorField::zero(2 * DIM);
    let damp = Expr::div(
        Expr::int(-1),
        Expr::add(Expr::alpha(), Expr::one()),
    );
    for m in 0..DIM {
        f.components[m] = Expr::coord(DIM + m);
        let mut acc = Expr::zero();
        for n in 0..DIM {
            for l in 0..DIM {
                let gm = &gamma[(m * DIM + n) * DIM + l];
                if gm.is_zero() {
                    continue;
                }
                acc = Expr::add(
                    acc,
                    Expr::mul(
                        gm.clone(),
                        Expr::mul(Expr::coord(DIM + n), Expr::coord(DIM + l)),
                    ),
                );
            }
        }
        f.components[DIM + m] = Expr::mul(damp.clone(), acc);
    }
    f
}

/// Integrate the geodesic system; `x0` is (q, v). Velocities are bounded
/// only by finiteness, so the domain box pairs the metric's q-box with a
/// wide velocity range.
pub fn integrate_geodesic(
    g: &MetricSpec,
    x0: &[f64],
    dt: f64,
    steps: usize,
    alpha: f64,
) -> Result<Trajectory, (Trajectory, FlowError)> {
    assert!(dt > 0.0, "dt must be positive");
    let field = geodesic_field(g);
    let mut iv = g.domain.intervals().to_vec();
    iv.extend(vec![(-1e9, 1e9); DIM]);
    let domain = DomainBox::new(iv);
    let rhs = Rhs { field: &field, alpha };
    rk4_run(&rhs, x0, 0.0, dt, steps, &domain, &[], alpha)
}

/// Observed convergence order from drifts at `dt` and `dt/2`:
/// `log2(drift(dt) / drift(dt/2))`; RK4 gives roughly 4.
pub fn convergence_order(drift_coarse: f64, drift_fine: f64) -> f64 {
    (drift_coarse / drift_fine).log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::minkowski;
    use crate::poisson::{h_alpha, hamiltonian_vector_field};

    fn wide_phase_box() -> DomainBox {
        let mut iv = vec![(1e-3, 1e3); 4];
        iv.extend(vec![(1e-3, 1e3); 4]);
        DomainBox::new(iv)
    }

    fn minkowski_x0() -> Vec<f64> {
        vec![8.0, 6.0, 5.0, 7.0, 0.21, 0.3, 0.25, 0.27]
    }

    #[test]
    fn classical_free_particle_moves_in_straight_lines() {
        // alpha = 1: q' = +-p, p' = 0; momenta exactly constant
        let x = hamiltonian_vector_field(&h_alpha());
        let monitors = vec![("H".to_string(), h_alpha())];
        let traj = integrate_hamiltonian(
            &x,
            &minkowski_x0(),
            1e-3,
            2000,
            &wide_phase_box(),
            &monitors,
            1.0,
        )
        .unwrap();
        let first = &traj.states[0];
        let last = traj.states.last().unwrap();
        for mu in 4..8 {
            assert!(
                (last[mu] - first[mu]).abs() < 1e-13,
                "p{} drifted by {}",
                mu - 3,
                (last[mu] - first[mu]).abs()
            );
        }
        // q^1 decreases at rate p_1, q^k increase at rate p_k
        let t = traj.time(traj.len() - 1);
        assert!((last[0] - (first[0] - first[4] * t)).abs() < 1e-10);
        assert!((last[1] - (first[1] + first[5] * t)).abs() < 1e-10);
        let rep = conservation_report(&traj, 1e-12);
        assert!(rep[0].relative_drift < 1e-13);
    }

    #[test]
    fn deformed_flow_conserves_energy() {
        let x = hamiltonian_vector_field(&h_alpha());
        let monitors = vec![("H".to_string(), h_alpha())];
        let traj = integrate_hamiltonian(
            &x,
            &minkowski_x0(),
            1e-3,
            10_000,
            &wide_phase_box(),
            &monitors,
            0.7,
        )
        .unwrap();
        let rep = conservation_report(&traj, 1e-8);
        assert!(
            rep[0].relative_drift < 1e-8,
            "H drift {} over 10^4 steps",
            rep[0].relative_drift
        );
    }

    #[test]
    fn order_four_convergence() {
        // halving dt cuts the H drift by about 2^4; a close-in deformed
        // Schwarzschild orbit gives drift well above rounding at all three
        // step sizes
        use crate::poisson::h_schwarzschild;
        let h = h_schwarzschild(1.0);
        let x = hamiltonian_vector_field(&h);
        let monitors = vec![("H".to_string(), h.clone())];
        let drift_at = |dt: f64, steps: usize| {
            let traj = integrate_hamiltonian(
                &x,
                &[8.0, 2.6, 1.0, 1.0, 0.3, 1.4, 1.2, 1.2],
                dt,
                steps,
                &wide_phase_box(),
                &monitors,
                0.7,
            )
            .unwrap();
            conservation_report(&traj, 1.0)[0].max_drift
        };
        let d1 = drift_at(2e-3, 1000);
        let d2 = drift_at(1e-3, 2000);
        let d3 = drift_at(5e-4, 4000);
        let o12 = convergence_order(d1, d2);
        let o23 = convergence_order(d2, d3);
        assert!(
            (3.7..=4.3).contains(&o12),
            "order from 2e-3 -> 1e-3: {o12} (drifts {d1} {d2})"
        );
        assert!(
            (3.7..=4.3).contains(&o23),
            "order from 1e-3 -> 5e-4: {o23} (drifts {d2} {d3})"
        );
    }

    #[test]
    fn geodesic_matches_hamiltonian_flow_on_minkowski() {
        // p_mu = eps_{mu eps} v^eps with eps = sgn(-,+,+,+): p1 = -v1.
        // The positive orthant then needs v1 < 0.
        let alpha = 0.7;
        let g = minkowski();
        let p0 = [0.4f64, 0.5, 0.45, 0.55];
        let x0_geo = [2.0, 2.0, 2.0, 2.0, -p0[0], p0[1], p0[2], p0[3]];
        let x0_ham = [2.0, 2.0, 2.0, 2.0, p0[0], p0[1], p0[2], p0[3]];
        let steps = 1000;
        let dt = 1e-3;
        let geo = integrate_geodesic(&mk_wide(&g), &x0_geo, dt, steps, alpha).unwrap();
        let x = hamiltonian_vector_field(&h_alpha());
        let ham = integrate_hamiltonian(&x, &x0_ham, dt, steps, &wide_phase_box(), &[], alpha)
            .unwrap();
        let mut worst = 0.0f64;
        for (sg, sh) in geo.states.iter().zip(&ham.states) {
            for mu in 0..4 {
                worst = worst.max((sg[mu] - sh[mu]).abs());
                let p_from_v = if mu == 0 { -sg[4 + mu] } else { sg[4 + mu] };
                worst = worst.max((p_from_v - sh[4 + mu]).abs());
            }
        }
        assert!(worst < 1e-6, "cross-consistency residual {worst}");
    }

    fn mk_wide(g: &MetricSpec) -> MetricSpec {
        let mut g2 = g.clone();
        g2.domain = DomainBox::new(vec![(1e-3, 1e3); 4]);
        g2
    }

    #[test]
    fn domain_exit_halts_with_partial_trajectory() {
        let x = hamiltonian_vector_field(&h_alpha());
        // tight box around the start: the flow exits quickly
        let mut iv = vec![(7.9, 8.05); 1];
        iv.extend(vec![(1e-3, 1e3); 3]);
        iv.extend(vec![(1e-3, 1e3); 4]);
        let tight = DomainBox::new(iv);
        let err = integrate_hamiltonian(&x, &minkowski_x0(), 1e-2, 10_000, &tight, &[], 0.7);
        match err {
            Err((partial, FlowError::DomainExit { step, .. })) => {
                assert!(step > 0);
                assert_eq!(partial.len(), step);
            }
            other => panic!("expected domain exit, got {other:?}"),
        }
    }

    #[test]
    fn conservation_report_flags_non_invariants() {
        let x = hamiltonian_vector_field(&h_alpha());
        let monitors = vec![
            ("const".to_string(), Expr::rat(5, 4)),
            ("q1".to_string(), Expr::coord(0)),
        ];
        let traj = integrate_hamiltonian(
            &x,
            &minkowski_x0(),
            1e-3,
            500,
            &wide_phase_box(),
            &monitors,
            0.7,
        )
        .unwrap();
        let rep = conservation_report(&traj, 1e-6);
        assert_eq!(rep[0].max_drift, 0.0);
        assert!(rep[0].first_failure_step.is_none());
        assert!(rep[1].relative_drift > 1e-3, "q1 should drift visibly");
        assert!(rep[1].first_failure_step.is_some());
    }

    #[test]
    fn csv_header_and_shape() {
        let x = hamiltonian_vector_field(&h_alpha());
        let monitors = vec![("H".to_string(), h_alpha())];
        let traj = integrate_hamiltonian(
            &x,
            &minkowski_x0(),
            1e-3,
            10,
            &wide_phase_box(),
            &monitors,
            0.7,
        )
        .unwrap();
        let csv = traj.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,q1,q2,q3,q4,p1,p2,p3,p4,H");
        assert_eq!(csv.lines().count(), 12);
        // values round-trip through parse
        let row: Vec<f64> = csv
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        assert_eq!(row.len(), 10);
        assert_eq!(row[1..9].to_vec(), traj.states[0]);
    }
}
