//! Time kernels and the per-cluster mass state they evolve.
//!
//! A [`TimeKernel`] fixes how a unit of table occupancy deposited at time
//! `s` contributes to the pseudo-count at a later time `t`, as a function of
//! the elapsed time `t - s`. A [`ClusterMassState`] accumulates deposits and
//! answers "what is the occupancy at time `t`?". For the step, exponential and
//! cosine kernels the state is finite dimensional and advances in O(1); the
//! hyperbolic kernel keeps its deposit history and sums it on demand.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Dynamics applied to past table occupancy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TimeKernel {
    /// Occupancy never changes: recovers the ordinary CRP.
    Step,
    /// `exp(-delta / tau)` decay: recovers the time-sensitive CRP.
    Exponential { tau: f64 },
    /// `cos(omega * delta)`: undamped second-order oscillator.
    Cosine { omega: f64 },
    /// `1 / (1 + delta / scale)`.
    Hyperbolic { scale: f64 },
}

impl TimeKernel {
    pub fn exponential(tau: f64) -> Result<Self> {
        positive("tau", tau)?;
        Ok(TimeKernel::Exponential { tau })
    }

    pub fn cosine(omega: f64) -> Result<Self> {
        positive("omega", omega)?;
        Ok(TimeKernel::Cosine { omega })
    }

    pub fn hyperbolic(scale: f64) -> Result<Self> {
        positive("scale", scale)?;
        Ok(TimeKernel::Hyperbolic { scale })
    }

    /// Checks the kernel parameters; useful after deserialization.
    pub fn validate(&self) -> Result<()> {
        match *self {
            TimeKernel::Step => Ok(()),
            TimeKernel::Exponential { tau } => positive("tau", tau),
            TimeKernel::Cosine { omega } => positive("omega", omega),
            TimeKernel::Hyperbolic { scale } => positive("scale", scale),
        }
    }

    /// Short lowercase name used in result files and figure labels.
    pub fn name(&self) -> &'static str {
        match self {
            TimeKernel::Step => "step",
            TimeKernel::Exponential { .. } => "exponential",
            TimeKernel::Cosine { .. } => "cosine",
            TimeKernel::Hyperbolic { .. } => "hyperbolic",
        }
    }

    /// Weight of a deposit made `delta` time units ago.
    pub fn evaluate(&self, delta: f64) -> Result<f64> {
        if delta < 0.0 || delta.is_nan() {
            return Err(Error::NegativeDelta(delta));
        }
        Ok(self.weight(delta))
    }

    fn weight(&self, delta: f64) -> f64 {
        match *self {
            TimeKernel::Step => 1.0,
            TimeKernel::Exponential { tau } => (-delta / tau).exp(),
            TimeKernel::Cosine { omega } => (omega * delta).cos(),
            TimeKernel::Hyperbolic { scale } => 1.0 / (1.0 + delta / scale),
        }
    }
}

impl fmt::Display for TimeKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TimeKernel::Step => write!(f, "step"),
            TimeKernel::Exponential { tau } => write!(f, "exponential(tau={tau})"),
            TimeKernel::Cosine { omega } => write!(f, "cosine(omega={omega})"),
            TimeKernel::Hyperbolic { scale } => write!(f, "hyperbolic(scale={scale})"),
        }
    }
}

/// Free-function form of [`TimeKernel::evaluate`].
pub fn evaluate_kernel(kernel: &TimeKernel, delta: f64) -> Result<f64> {
    kernel.evaluate(delta)
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum MassRepr {
    Scalar(f64),
    /// `in_phase = sum m cos(w (t - s))`, `quadrature = sum m sin(w (t - s))`.
    Oscillator {
        in_phase: f64,
        quadrature: f64,
    },
    /// Deposits `(time, mass)` with strictly increasing times.
    Events(Vec<(f64, f64)>),
}

/// Pseudo table occupancy of one cluster under a fixed kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterMassState {
    kernel: TimeKernel,
    repr: MassRepr,
    last_update_time: f64,
}

impl ClusterMassState {
    /// A state with no deposits. Its clock starts at negative infinity so the
    /// first deposit may happen at any time.
    pub fn empty(kernel: TimeKernel) -> Self {
        let repr = match kernel {
            TimeKernel::Step | TimeKernel::Exponential { .. } => MassRepr::Scalar(0.0),
            TimeKernel::Cosine { .. } => MassRepr::Oscillator {
                in_phase: 0.0,
                quadrature: 0.0,
            },
            TimeKernel::Hyperbolic { .. } => MassRepr::Events(Vec::new()),
        };
        ClusterMassState {
            kernel,
            repr,
            last_update_time: f64::NEG_INFINITY,
        }
    }

    pub fn kernel(&self) -> &TimeKernel {
        &self.kernel
    }

    pub fn last_update_time(&self) -> f64 {
        self.last_update_time
    }

    /// Number of stored deposit events (hyperbolic only, zero otherwise).
    pub fn num_events(&self) -> usize {
        match &self.repr {
            MassRepr::Events(ev) => ev.len(),
            _ => 0,
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t < self.last_update_time || t.is_nan() {
            Err(Error::TimeRegression {
                current: self.last_update_time,
                requested: t,
            })
        } else {
            Ok(())
        }
    }

    /// Advances the state to `t_to`.
    pub fn evolve(&mut self, t_to: f64) -> Result<()> {
        self.check_time(t_to)?;
        if self.last_update_time == f64::NEG_INFINITY {
            // nothing has been deposited yet
            self.last_update_time = t_to;
            return Ok(());
        }
        let delta = t_to - self.last_update_time;
        match (&mut self.repr, self.kernel) {
            (MassRepr::Scalar(_), TimeKernel::Step) => {}
            (MassRepr::Scalar(m), TimeKernel::Exponential { tau }) => {
                *m *= (-delta / tau).exp();
            }
            (
                MassRepr::Oscillator {
                    in_phase,
                    quadrature,
                },
                TimeKernel::Cosine { omega },
            ) => {
                let (s, c) = (omega * delta).sin_cos();
                let (a, b) = (*in_phase, *quadrature);
                *in_phase = a * c - b * s;
                *quadrature = a * s + b * c;
            }
            // hyperbolic evaluation is deferred to `mass_at`
            (MassRepr::Events(_), TimeKernel::Hyperbolic { .. }) => {}
            _ => unreachable!("mass representation always matches its kernel"),
        }
        self.last_update_time = t_to;
        Ok(())
    }

    /// Copy of the state advanced to `t_to`.
    pub fn evolved(&self, t_to: f64) -> Result<Self> {
        let mut next = self.clone();
        next.evolve(t_to)?;
        Ok(next)
    }

    /// Evolves to `t`, then deposits `mass` at `t`.
    pub fn add_mass(&mut self, mass: f64, t: f64) -> Result<()> {
        self.evolve(t)?;
        match &mut self.repr {
            MassRepr::Scalar(m) => *m += mass,
            MassRepr::Oscillator { in_phase, .. } => *in_phase += mass,
            MassRepr::Events(events) => match events.last_mut() {
                Some((time, m)) if *time == t => *m += mass,
                _ => events.push((t, mass)),
            },
        }
        Ok(())
    }

    /// Occupancy at time `t >= last_update_time`; the state is not modified.
    pub fn mass_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        if self.last_update_time == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let delta = t - self.last_update_time;
        let value = match (&self.repr, self.kernel) {
            (MassRepr::Scalar(m), TimeKernel::Step) => *m,
            (MassRepr::Scalar(m), TimeKernel::Exponential { tau }) => m * (-delta / tau).exp(),
            (
                MassRepr::Oscillator {
                    in_phase,
                    quadrature,
                },
                TimeKernel::Cosine { omega },
            ) => {
                let (s, c) = (omega * delta).sin_cos();
                in_phase * c - quadrature * s
            }
            (MassRepr::Events(events), TimeKernel::Hyperbolic { scale }) => events
                .iter()
                .map(|&(s, m)| m / (1.0 + (t - s) / scale))
                .sum(),
            _ => unreachable!("mass representation always matches its kernel"),
        };
        Ok(value)
    }

    /// Sum of two states under the same kernel, both first advanced to the
    /// later of their clocks.
    pub fn combine(&self, other: &Self) -> Result<Self> {
        if self.kernel != other.kernel {
            return Err(Error::InvalidParameter(
                "cannot combine mass states under different kernels".into(),
            ));
        }
        let t = self.last_update_time.max(other.last_update_time);
        let a = self.evolved(t)?;
        let b = other.evolved(t)?;
        let repr = match (a.repr, b.repr) {
            (MassRepr::Scalar(x), MassRepr::Scalar(y)) => MassRepr::Scalar(x + y),
            (
                MassRepr::Oscillator {
                    in_phase: a1,
                    quadrature: b1,
                },
                MassRepr::Oscillator {
                    in_phase: a2,
                    quadrature: b2,
                },
            ) => MassRepr::Oscillator {
                in_phase: a1 + a2,
                quadrature: b1 + b2,
            },
            (MassRepr::Events(x), MassRepr::Events(y)) => {
                let mut merged: Vec<(f64, f64)> = Vec::with_capacity(x.len() + y.len());
                let mut all: Vec<(f64, f64)> = x.into_iter().chain(y).collect();
                all.sort_by(|p, q| p.0.total_cmp(&q.0));
                for (s, m) in all {
                    match merged.last_mut() {
                        Some((time, acc)) if *time == s => *acc += m,
                        _ => merged.push((s, m)),
                    }
                }
                MassRepr::Events(merged)
            }
            _ => unreachable!("same kernel implies same representation"),
        };
        Ok(ClusterMassState {
            kernel: self.kernel,
            repr,
            last_update_time: t,
        })
    }

    /// Internal components of a finite-dimensional state, for linearity
    /// checks. Hyperbolic states return the event masses.
    pub fn components(&self) -> Vec<f64> {
        match &self.repr {
            MassRepr::Scalar(m) => vec![*m],
            MassRepr::Oscillator {
                in_phase,
                quadrature,
            } => vec![*in_phase, *quadrature],
            MassRepr::Events(ev) => ev.iter().map(|e| e.1).collect(),
        }
    }
}
