//! Domain types shared by every module: node placements on a line,
//! transmit-decision functions, contention-slot outcomes, and hop results.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("power-law exponent must be finite and >= 0, got {0}")]
    InvalidExponent(f64),
    #[error("linear divisor must be finite and > 0, got {0}")]
    InvalidDivisor(f64),
    #[error("line length must be finite and > 0, got {0}")]
    InvalidLineLength(f64),
    #[error("position {position} is outside [0, {line_length}]")]
    PositionOutOfRange { position: f64, line_length: f64 },
    #[error("node count must be >= 1")]
    EmptyScenario,
}

/// An ordered list of node positions on a line of length `line_length`.
///
/// Positions are kept in raw units; normalization to [0, 1] is done by the
/// consumer (analytics and the simulators divide by the line length, the
/// relay simulator divides by the radio range).
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    positions: Vec<f64>,
    line_length: f64,
}

impl Placement {
    /// A placement on a line of the given length. Every position must lie
    /// in `[0, line_length]`. The list may be empty.
    pub fn new(positions: Vec<f64>, line_length: f64) -> Result<Self, ModelError> {
        if !(line_length.is_finite() && line_length > 0.0) {
            return Err(ModelError::InvalidLineLength(line_length));
        }
        for &p in &positions {
            if !(p.is_finite() && (0.0..=line_length).contains(&p)) {
                return Err(ModelError::PositionOutOfRange {
                    position: p,
                    line_length,
                });
            }
        }
        Ok(Self {
            positions,
            line_length,
        })
    }

    /// A placement on the unit line.
    pub fn unit(positions: Vec<f64>) -> Result<Self, ModelError> {
        Self::new(positions, 1.0)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn line_length(&self) -> f64 {
        self.line_length
    }

    /// Positions divided by the line length, each in [0, 1].
    pub fn normalized(&self) -> Vec<f64> {
        self.positions
            .iter()
            .map(|p| p / self.line_length)
            .collect()
    }
}

/// The three fixed node arrangements used for exact, reproducible analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// x_i = i/(n+1), an even spread over the unit line.
    Uniform,
    /// n-1 nodes near the sender at 1/(n+1), a single node far out at n/(n+1).
    Unfavourable,
    /// One node near the sender at 1/(n+1), n-1 nodes far out at n/(n+1).
    Favourable,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Scenario::Uniform => "uniform",
            Scenario::Unfavourable => "unfavourable",
            Scenario::Favourable => "favourable",
        };
        f.write_str(name)
    }
}

/// The fixed positions for a scenario with `n >= 1` nodes, emitted in index
/// order i = 1..=n on the unit line.
pub fn scenario_positions(kind: Scenario, n: usize) -> Result<Placement, ModelError> {
    if n == 0 {
        return Err(ModelError::EmptyScenario);
    }
    let denom = (n + 1) as f64;
    let near = 1.0 / denom;
    let far = n as f64 / denom;
    let positions = match kind {
        Scenario::Uniform => (1..=n).map(|i| i as f64 / denom).collect(),
        Scenario::Unfavourable => {
            let mut v = vec![near; n - 1];
            v.push(far);
            v
        }
        Scenario::Favourable => {
            let mut v = vec![near];
            v.extend(std::iter::repeat_n(far, n - 1));
            v
        }
    };
    Placement::unit(positions)
}

type CustomFn = Arc<dyn Fn(u32, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Constant(f64),
    PowerLaw {
        exponent: f64,
    },
    LinearScaled {
        divisor: f64,
    },
    Hybrid {
        first: Box<DecisionFunction>,
        later: Box<DecisionFunction>,
    },
    Custom {
        label: String,
        f: CustomFn,
    },
}

/// A round-indexed transmit-decision function: the probability that a
/// station at estimated (normalized) distance `x` transmits in round `m`.
///
/// Evaluation clamps `x` into [0, 1] first — distance estimates can come in
/// slightly out of range under transmit-power variation — and clamps the
/// result into [0, 1], so `eval` is total.
#[derive(Clone)]
pub struct DecisionFunction {
    kind: Kind,
}

impl DecisionFunction {
    /// Every station transmits with the same probability `p`, regardless of
    /// distance. `constant(1/n)` is the classic uniform leader election.
    pub fn constant(p: f64) -> Result<Self, ModelError> {
        if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
            return Err(ModelError::InvalidProbability(p));
        }
        Ok(Self {
            kind: Kind::Constant(p),
        })
    }

    /// g(x) = x^exponent, preferring distant stations. An exponent of 0 is
    /// the constant 1: permitted, but degenerate (guaranteed collision for
    /// two or more stations).
    pub fn power_law(exponent: f64) -> Result<Self, ModelError> {
        if !(exponent.is_finite() && exponent >= 0.0) {
            return Err(ModelError::InvalidExponent(exponent));
        }
        Ok(Self {
            kind: Kind::PowerLaw { exponent },
        })
    }

    /// g(x) = x / divisor.
    pub fn linear_scaled(divisor: f64) -> Result<Self, ModelError> {
        if !(divisor.is_finite() && divisor > 0.0) {
            return Err(ModelError::InvalidDivisor(divisor));
        }
        Ok(Self {
            kind: Kind::LinearScaled { divisor },
        })
    }

    /// `first` decides round 0; `later` decides every round after that,
    /// with the round index shifted down by one so its own schedule starts
    /// at its round 0.
    pub fn hybrid(first: DecisionFunction, later: DecisionFunction) -> Self {
        Self {
            kind: Kind::Hybrid {
                first: Box::new(first),
                later: Box::new(later),
            },
        }
    }

    /// An arbitrary round-indexed decision function. The label is used for
    /// display only. Out-of-range results are clamped into [0, 1].
    pub fn custom<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(u32, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: Kind::Custom {
                label: label.into(),
                f: Arc::new(f),
            },
        }
    }

    /// g^m(x): clamps `x` into [0, 1], evaluates, clamps the result into
    /// [0, 1]. Deterministic, and independent of `round` for non-hybrid,
    /// non-custom kinds.
    pub fn eval(&self, round: u32, x: f64) -> f64 {
        let x = clamp_unit(x);
        let raw = match &self.kind {
            Kind::Constant(p) => *p,
            Kind::PowerLaw { exponent } => x.powf(*exponent),
            Kind::LinearScaled { divisor } => x / divisor,
            Kind::Hybrid { first, later } => {
                if round == 0 {
                    first.eval(0, x)
                } else {
                    later.eval(round - 1, x)
                }
            }
            Kind::Custom { f, .. } => f(round, x),
        };
        clamp_unit(raw)
    }

    /// Whether the function is round-independent by construction. Custom
    /// functions are conservatively reported as round-dependent.
    pub fn is_round_independent(&self) -> bool {
        match &self.kind {
            Kind::Constant(_) | Kind::PowerLaw { .. } | Kind::LinearScaled { .. } => true,
            Kind::Hybrid { .. } | Kind::Custom { .. } => false,
        }
    }

    /// The (first, later) pair when this is a hybrid.
    pub fn as_hybrid(&self) -> Option<(&DecisionFunction, &DecisionFunction)> {
        match &self.kind {
            Kind::Hybrid { first, later } => Some((first, later)),
            _ => None,
        }
    }

    /// The probability when this is a constant.
    pub fn as_constant(&self) -> Option<f64> {
        match &self.kind {
            Kind::Constant(p) => Some(*p),
            _ => None,
        }
    }
}

fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

impl fmt::Display for DecisionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Constant(p) => write!(f, "constant:{p}"),
            Kind::PowerLaw { exponent } => write!(f, "power:{exponent}"),
            Kind::LinearScaled { divisor } => write!(f, "linear:{divisor}"),
            Kind::Hybrid { first, later } => write!(f, "hybrid({first};{later})"),
            Kind::Custom { label, .. } => write!(f, "custom:{label}"),
        }
    }
}

impl fmt::Debug for DecisionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DecisionFunction({self})")
    }
}

/// Result of one contention slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotOutcome {
    /// Nobody transmitted.
    Silence,
    /// Two or more stations transmitted; the count is carried.
    Collision(usize),
    /// Exactly one station transmitted; its index into the placement.
    Winner(usize),
}

impl SlotOutcome {
    pub fn winner(&self) -> Option<usize> {
        match self {
            SlotOutcome::Winner(i) => Some(*i),
            _ => None,
        }
    }

    pub fn is_winner(&self) -> bool {
        matches!(self, SlotOutcome::Winner(_))
    }
}

/// Outcome of a full hop attempt: the final slot outcome, the distance
/// covered (the winner's position, or 0 when there is no winner), the
/// number of contention rounds used, and whether a multi-pass run was cut
/// off at its round cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopResult {
    pub outcome: SlotOutcome,
    pub progress: f64,
    pub rounds_used: u32,
    pub truncated: bool,
}
