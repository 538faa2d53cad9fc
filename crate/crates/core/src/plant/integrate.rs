use nalgebra::{DMatrix, DVector};

use super::{Dynamics, PlantError, PlantSpec};

/// Flow `ξ_xu(tau)` of the plant from `x` under the constant input `u`.
///
/// Linear specs use the matrix exponential of `[[A, B], [0, 0]]`; other
/// specs use fixed-step RK4 with `spec.rk4_steps` steps.
pub fn integrate(spec: &PlantSpec, x: &[f64], u: &[f64], tau: f64) -> Result<Vec<f64>, PlantError> {
    let (n, m) = (spec.state_dim(), spec.input_dim());
    if x.len() != n || u.len() != m {
        return Err(PlantError::Dimension(format!(
            "state of length {} and input of length {}, expected {n} and {m}",
            x.len(),
            u.len()
        )));
    }
    if tau == 0.0 {
        return Ok(x.to_vec());
    }
    let out = match &spec.dynamics {
        Dynamics::Linear { a, b } => {
            let flow = lti_flow(a, b, tau);
            apply_flow(&flow, n, x, u)
        }
        Dynamics::Nonlinear(rhs) => rk4(|x, dx| (rhs.f)(x, u, dx), x, tau, spec.rk4_steps)?,
    };
    check_finite(&out)?;
    Ok(out)
}

/// Exponential of the augmented matrix `tau · [[A, B], [0, 0]]`.
pub(crate) fn lti_flow(a: &DMatrix<f64>, b: &DMatrix<f64>, tau: f64) -> DMatrix<f64> {
    let (n, m) = (a.nrows(), b.ncols());
    let mut aug = DMatrix::zeros(n + m, n + m);
    aug.view_mut((0, 0), (n, n)).copy_from(a);
    aug.view_mut((0, n), (n, m)).copy_from(b);
    (aug * tau).exp()
}

pub(crate) fn apply_flow(flow: &DMatrix<f64>, n: usize, x: &[f64], u: &[f64]) -> Vec<f64> {
    let z = DVector::from_iterator(x.len() + u.len(), x.iter().chain(u).copied());
    let next = flow * z;
    next.rows(0, n).iter().copied().collect()
}

fn rk4(f: impl Fn(&[f64], &mut [f64]), x: &[f64], tau: f64, steps: usize) -> Result<Vec<f64>, PlantError> {
    let n = x.len();
    let steps = steps.max(1);
    let h = tau / steps as f64;
    let mut state = x.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    for _ in 0..steps {
        f(&state, &mut k1);
        for i in 0..n {
            tmp[i] = state[i] + 0.5 * h * k1[i];
        }
        f(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = state[i] + 0.5 * h * k2[i];
        }
        f(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = state[i] + h * k3[i];
        }
        f(&tmp, &mut k4);
        for i in 0..n {
            state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        check_finite(&state)?;
    }
    Ok(state)
}

fn check_finite(v: &[f64]) -> Result<(), PlantError> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(PlantError::Divergence(format!("{v:?}")))
    }
}
