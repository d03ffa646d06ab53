//! Built-in initial data and time grids for each model manifold.

use std::f64::consts::PI;

use crate::error::Result;

use super::trig::TrigPoly;
use super::{
    drift_entropy_trace, entropy_trace, project_initial, EntropyTrace, ManifoldSpec, SpectralField,
};

#[derive(Debug, Clone, PartialEq)]
pub enum TraceSchedule {
    /// Exact evolution at the listed times.
    Exact(Vec<f64>),
    /// Time stepping with step `dt`, recording every `record_every` steps.
    Stepped {
        dt: f64,
        record_every: usize,
        count: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    pub field: SpectralField,
    pub schedule: TraceSchedule,
}

impl Fixture {
    pub fn trace(&self) -> Result<EntropyTrace> {
        match &self.schedule {
            TraceSchedule::Exact(times) => entropy_trace(&self.field, times),
            TraceSchedule::Stepped {
                dt,
                record_every,
                count,
            } => drift_entropy_trace(&self.field, *dt, *record_every, *count),
        }
    }

    pub fn with_times(mut self, times: Vec<f64>) -> Self {
        if let TraceSchedule::Exact(_) = self.schedule {
            self.schedule = TraceSchedule::Exact(times);
        }
        self
    }
}

/// `count` log-spaced points from `start` to `stop`, inclusive.
pub fn log_grid(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    let ratio = (stop / start).ln();
    (0..count)
        .map(|i| {
            if i + 1 == count {
                stop
            } else {
                start * (ratio * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// `1 + cos(2 pi x) / 2` on the unit circle.
pub fn circle() -> Result<Fixture> {
    let m = ManifoldSpec::circle(1.0)?;
    Ok(Fixture {
        name: "circle",
        field: project_initial(&m, &|x| 1.0 + 0.5 * (2.0 * PI * x[0]).cos(), 8)?,
        schedule: TraceSchedule::Exact(log_grid(0.01, 2.0, 40)),
    })
}

/// `1 + 0.3 cos(2 pi x) + 0.2 sin(2 pi (x + y))` on the unit torus.
pub fn torus() -> Result<Fixture> {
    let m = ManifoldSpec::torus2(1.0, 1.0)?;
    let f = |p: &[f64]| {
        1.0 + 0.3 * (2.0 * PI * p[0]).cos() + 0.2 * (2.0 * PI * (p[0] + p[1])).sin()
    };
    Ok(Fixture {
        name: "torus",
        field: project_initial(&m, &f, 8)?,
        schedule: TraceSchedule::Exact(log_grid(0.01, 2.0, 40)),
    })
}

/// `(1 + cos(theta) / 2) / (4 pi)` on the unit sphere.
pub fn sphere() -> Result<Fixture> {
    let m = ManifoldSpec::sphere2(1.0)?;
    let f = |th: &[f64]| (1.0 + 0.5 * th[0].cos()) / (4.0 * PI);
    Ok(Fixture {
        name: "sphere",
        field: project_initial(&m, &f, 8)?,
        schedule: TraceSchedule::Exact(log_grid(0.01, 10.0, 40)),
    })
}

/// Unit torus with `V = 0.1 sin(2 pi x)` and a density proportional to
/// `1 + 0.3 cos(2 pi x) + 0.2 cos(2 pi y)`, normalized in `mu`; stepped to `t = 2`.
pub fn torus_drift() -> Result<Fixture> {
    let v = TrigPoly::constant(1.0, 1.0, 0.0).with_term(1, 0, 0.0, 0.1);
    let m = ManifoldSpec::torus2_drift(1.0, 1.0, v)?;
    let f = |p: &[f64]| 1.0 + 0.3 * (2.0 * PI * p[0]).cos() + 0.2 * (2.0 * PI * p[1]).cos();
    let raw = project_initial(&m, &f, 12)?;
    let field = raw.scaled(1.0 / raw.mass());
    Ok(Fixture {
        name: "torus-drift",
        field,
        schedule: TraceSchedule::Stepped {
            dt: 1e-3,
            record_every: 50,
            count: 40,
        },
    })
}

/// The constant probability density on the given fixture's manifold.
pub fn constant(manifold: &ManifoldSpec) -> Result<SpectralField> {
    let value = 1.0 / manifold.volume;
    let field = project_initial(manifold, &|_| value, 4)?;
    if manifold.is_drifted() {
        let mass = field.mass();
        return Ok(field.scaled(1.0 / mass));
    }
    Ok(field)
}

pub fn by_name(name: &str) -> Option<Result<Fixture>> {
    match name {
        "circle" => Some(circle()),
        "torus" => Some(torus()),
        "sphere" => Some(sphere()),
        "torus-drift" => Some(torus_drift()),
        _ => None,
    }
}

pub fn all() -> Result<Vec<Fixture>> {
    Ok(vec![circle()?, torus()?, sphere()?, torus_drift()?])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = log_grid(0.1, 100.0, 40);
        assert_eq!(g.len(), 40);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[39], 100.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn fixtures_are_probability_densities() {
        for f in all().unwrap() {
            assert!((f.field.mass() - 1.0).abs() < 1e-13, "{}", f.name);
        }
    }

    #[test]
    fn constant_data_have_zero_rates() {
        for f in all().unwrap() {
            let c = constant(&f.field.manifold).unwrap();
            let fixture = Fixture {
                name: "constant",
                field: c,
                schedule: match f.schedule {
                    TraceSchedule::Exact(_) => TraceSchedule::Exact(vec![0.1, 1.0]),
                    TraceSchedule::Stepped { dt, .. } => TraceSchedule::Stepped {
                        dt,
                        record_every: 4,
                        count: 2,
                    },
                },
            };
            let tr = fixture.trace().unwrap();
            for r in tr.rate_direct.iter().chain(&tr.rate_fd) {
                assert!(r.abs() < 1e-12, "{}: {r}", f.name);
            }
        }
    }
}
