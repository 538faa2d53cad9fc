//! Output labels, output metrics and the extended-real distance they produce.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use super::FtsError;

/// An output value of a state.
///
/// Vectors are compared with the infinity norm, atoms with the discrete
/// metric. `Dummy` is the placeholder symbol that fills measurement buffers
/// before real samples arrive; it is infinitely far from every other label.
#[derive(Clone, Debug, PartialEq)]
pub enum OutputLabel {
    Atom(String),
    Vector(Vec<f64>),
    Dummy,
    Pair(Box<OutputLabel>, Box<OutputLabel>),
}

impl OutputLabel {
    pub fn atom(name: impl Into<String>) -> Self {
        OutputLabel::Atom(name.into())
    }

    pub fn pair(first: OutputLabel, second: OutputLabel) -> Self {
        OutputLabel::Pair(Box::new(first), Box::new(second))
    }

    pub fn is_dummy(&self) -> bool {
        matches!(self, OutputLabel::Dummy)
    }

    /// Components of a pair label.
    pub fn as_pair(&self) -> Option<(&OutputLabel, &OutputLabel)> {
        match self {
            OutputLabel::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

impl fmt::Display for OutputLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputLabel::Atom(a) => write!(f, "{a}"),
            OutputLabel::Vector(v) => {
                write!(f, "[")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
            OutputLabel::Dummy => write!(f, "q"),
            OutputLabel::Pair(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

/// Metric carried by a system's output set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    /// 0 on equal atoms, +inf otherwise.
    Discrete,
    /// Infinity norm on real vectors.
    InfinityNorm,
    /// Max of the componentwise distances of two output pairs. Components are
    /// atoms (discrete) or vectors (infinity norm).
    PairwiseMax,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Discrete => "discrete",
            Metric::InfinityNorm => "infinity-norm",
            Metric::PairwiseMax => "pairwise-max",
        }
    }

    /// Checks that `label` has the shape this metric measures.
    pub fn accepts(&self, label: &OutputLabel) -> bool {
        match (self, label) {
            (_, OutputLabel::Dummy) => true,
            (Metric::Discrete, OutputLabel::Atom(_)) => true,
            (Metric::InfinityNorm, OutputLabel::Vector(_)) => true,
            (Metric::PairwiseMax, OutputLabel::Pair(a, b)) => {
                base_label(a) && base_label(b)
            }
            _ => false,
        }
    }
}

fn base_label(label: &OutputLabel) -> bool {
    !matches!(label, OutputLabel::Pair(..))
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = FtsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "discrete" => Ok(Metric::Discrete),
            "infinity-norm" => Ok(Metric::InfinityNorm),
            "pairwise-max" => Ok(Metric::PairwiseMax),
            other => Err(FtsError::UnknownMetric(other.to_string())),
        }
    }
}

/// Nonnegative extended real. Addition saturates at `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Distance {
    Finite(f64),
    Infinite,
}

impl Distance {
    pub const ZERO: Distance = Distance::Finite(0.0);

    pub fn is_finite(&self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    /// `self <= epsilon`.
    pub fn within(&self, epsilon: f64) -> bool {
        match self {
            Distance::Finite(d) => *d <= epsilon,
            Distance::Infinite => false,
        }
    }

    pub fn max(self, other: Distance) -> Distance {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Distance::Finite(d) => *d,
            Distance::Infinite => f64::INFINITY,
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Distance::Finite(a), Distance::Finite(b)) => a.partial_cmp(b),
            (Distance::Finite(_), Distance::Infinite) => Some(Ordering::Less),
            (Distance::Infinite, Distance::Finite(_)) => Some(Ordering::Greater),
            (Distance::Infinite, Distance::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl Add for Distance {
    type Output = Distance;

    fn add(self, rhs: Distance) -> Distance {
        match (self, rhs) {
            (Distance::Finite(a), Distance::Finite(b)) => {
                let s = a + b;
                if s.is_finite() {
                    Distance::Finite(s)
                } else {
                    Distance::Infinite
                }
            }
            _ => Distance::Infinite,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => write!(f, "+inf"),
        }
    }
}

/// Distance between two output labels under `metric`.
pub fn output_distance(
    metric: Metric,
    y1: &OutputLabel,
    y2: &OutputLabel,
) -> Result<Distance, FtsError> {
    if !metric.accepts(y1) || !metric.accepts(y2) {
        return Err(incompatible(metric, y1, y2));
    }
    match metric {
        Metric::PairwiseMax => match (y1, y2) {
            (OutputLabel::Pair(a1, b1), OutputLabel::Pair(a2, b2)) => {
                let first = base_distance(a1, a2).ok_or_else(|| incompatible(metric, y1, y2))?;
                let second = base_distance(b1, b2).ok_or_else(|| incompatible(metric, y1, y2))?;
                Ok(first.max(second))
            }
            (OutputLabel::Dummy, OutputLabel::Dummy) => Ok(Distance::ZERO),
            _ => Ok(Distance::Infinite),
        },
        _ => base_distance(y1, y2).ok_or_else(|| incompatible(metric, y1, y2)),
    }
}

fn base_distance(y1: &OutputLabel, y2: &OutputLabel) -> Option<Distance> {
    match (y1, y2) {
        (OutputLabel::Dummy, OutputLabel::Dummy) => Some(Distance::ZERO),
        (OutputLabel::Dummy, _) | (_, OutputLabel::Dummy) => Some(Distance::Infinite),
        (OutputLabel::Atom(a), OutputLabel::Atom(b)) => Some(if a == b {
            Distance::ZERO
        } else {
            Distance::Infinite
        }),
        (OutputLabel::Vector(a), OutputLabel::Vector(b)) if a.len() == b.len() => {
            let d = a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0_f64, f64::max);
            Some(Distance::Finite(d))
        }
        _ => None,
    }
}

fn incompatible(metric: Metric, y1: &OutputLabel, y2: &OutputLabel) -> FtsError {
    FtsError::IncompatibleLabels {
        metric,
        left: y1.to_string(),
        right: y2.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> OutputLabel {
        OutputLabel::atom("Z")
    }

    fn w() -> OutputLabel {
        OutputLabel::atom("W")
    }

    #[test]
    fn dummy_distances() {
        let d = output_distance(Metric::Discrete, &OutputLabel::Dummy, &OutputLabel::Dummy).unwrap();
        assert_eq!(d, Distance::ZERO);
        let d = output_distance(Metric::Discrete, &z(), &OutputLabel::Dummy).unwrap();
        assert_eq!(d, Distance::Infinite);
        let d = output_distance(
            Metric::InfinityNorm,
            &OutputLabel::Vector(vec![0.0, 1.0]),
            &OutputLabel::Dummy,
        )
        .unwrap();
        assert_eq!(d, Distance::Infinite);
    }

    #[test]
    fn pairwise_identical_is_zero() {
        let p = OutputLabel::pair(z(), w());
        assert_eq!(output_distance(Metric::PairwiseMax, &p, &p).unwrap(), Distance::ZERO);
        let with_q = OutputLabel::pair(z(), OutputLabel::Dummy);
        assert_eq!(
            output_distance(Metric::PairwiseMax, &with_q, &with_q).unwrap(),
            Distance::ZERO
        );
        let other = OutputLabel::pair(z(), z());
        assert_eq!(
            output_distance(Metric::PairwiseMax, &with_q, &other).unwrap(),
            Distance::Infinite
        );
    }

    #[test]
    fn pairwise_takes_the_max() {
        let a = OutputLabel::pair(OutputLabel::Vector(vec![0.0]), OutputLabel::Vector(vec![1.0]));
        let b = OutputLabel::pair(OutputLabel::Vector(vec![0.25]), OutputLabel::Vector(vec![0.5]));
        assert_eq!(output_distance(Metric::PairwiseMax, &a, &b).unwrap(), Distance::Finite(0.5));
    }

    #[test]
    fn infinity_norm() {
        let a = OutputLabel::Vector(vec![1.0, -2.0]);
        let b = OutputLabel::Vector(vec![0.5, 1.0]);
        assert_eq!(output_distance(Metric::InfinityNorm, &a, &b).unwrap(), Distance::Finite(3.0));
    }

    #[test]
    fn incompatible_labels_are_rejected() {
        assert!(output_distance(Metric::Discrete, &z(), &OutputLabel::Vector(vec![1.0])).is_err());
        assert!(output_distance(Metric::PairwiseMax, &z(), &z()).is_err());
        assert!(output_distance(
            Metric::InfinityNorm,
            &OutputLabel::Vector(vec![1.0]),
            &OutputLabel::Vector(vec![1.0, 2.0])
        )
        .is_err());
        let nested = OutputLabel::pair(OutputLabel::pair(z(), z()), z());
        assert!(output_distance(Metric::PairwiseMax, &nested, &nested).is_err());
    }

    #[test]
    fn saturating_addition() {
        assert_eq!(Distance::Finite(1.0) + Distance::Infinite, Distance::Infinite);
        assert_eq!(Distance::Finite(f64::MAX) + Distance::Finite(f64::MAX), Distance::Infinite);
        assert_eq!(Distance::Finite(1.0) + Distance::Finite(2.0), Distance::Finite(3.0));
    }

    #[test]
    fn within_epsilon() {
        assert!(Distance::ZERO.within(0.0));
        assert!(!Distance::Infinite.within(f64::MAX));
        assert!(Distance::Finite(0.5).within(0.5));
    }
}
