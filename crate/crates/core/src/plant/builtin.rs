use std::fmt;
use std::sync::Arc;

/// Right-hand side `f(x, u)` written into the output slice.
pub type RhsFn = dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync;

/// A named nonlinear vector field with its expected dimensions.
#[derive(Clone)]
pub struct Rhs {
    pub name: String,
    /// `None` accepts any dimension.
    pub state_dim: Option<usize>,
    pub input_dim: Option<usize>,
    pub f: Arc<RhsFn>,
}

impl Rhs {
    pub fn new(
        name: impl Into<String>,
        state_dim: Option<usize>,
        input_dim: Option<usize>,
        f: impl Fn(&[f64], &[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        Rhs {
            name: name.into(),
            state_dim,
            input_dim,
            f: Arc::new(f),
        }
    }
}

impl fmt::Debug for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rhs").field("name", &self.name).finish_non_exhaustive()
    }
}

/// Names accepted by [`builtin_rhs`].
pub const BUILTIN_NAMES: [&str; 3] = ["decay", "pendulum", "van_der_pol"];

/// Looks up a builtin vector field:
///
/// * `decay`: `x' = -x`, any dimension, input ignored
/// * `pendulum`: `x1' = x2`, `x2' = -sin x1 - 0.5 x2 + u`
/// * `van_der_pol`: `x1' = x2`, `x2' = (1 - x1^2) x2 - x1 + u`
pub fn builtin_rhs(name: &str) -> Option<Rhs> {
    let rhs = match name {
        "decay" => Rhs::new(name, None, None, |x, _u, dx| {
            for (d, v) in dx.iter_mut().zip(x) {
                *d = -v;
            }
        }),
        "pendulum" => Rhs::new(name, Some(2), Some(1), |x, u, dx| {
            dx[0] = x[1];
            dx[1] = -x[0].sin() - 0.5 * x[1] + u[0];
        }),
        "van_der_pol" => Rhs::new(name, Some(2), Some(1), |x, u, dx| {
            dx[0] = x[1];
            dx[1] = (1.0 - x[0] * x[0]) * x[1] - x[0] + u[0];
        }),
        _ => return None,
    };
    Some(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_name_resolves() {
        for name in BUILTIN_NAMES {
            assert_eq!(builtin_rhs(name).unwrap().name, name);
        }
        assert!(builtin_rhs("lorenz").is_none());
    }

    #[test]
    fn pendulum_at_rest() {
        let r = builtin_rhs("pendulum").unwrap();
        let mut dx = [1.0, 1.0];
        (r.f)(&[0.0, 0.0], &[0.0], &mut dx);
        assert_eq!(dx, [0.0, 0.0]);
    }
}
