//! Duration schedules, phase timelines, and prefix-sum comparison.
//!
//! A schedule maps phase indices `n >= 1` to nonnegative integer durations.
//! Zero durations are allowed and make consecutive phase boundaries
//! coincide. Symbolic schedules cover the family
//! `d(n) = round(base^n / (n^a (ln n)^b))` whose series behaviour the
//! classifier can decide analytically; `d(1)` is stored explicitly because
//! `ln 1 = 0`.

use crate::error::{Error, Result};
use crate::numeric::{parse_rational, round_half_even, Rational64};

#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicScheduleFamily {
    base: Rational64,
    base_f: f64,
    poly_power: f64,
    log_power: f64,
    d1: u64,
}

impl SymbolicScheduleFamily {
    pub fn new(base: Rational64, poly_power: f64, log_power: f64, d1: u64) -> Result<Self> {
        if base <= Rational64::new(0, 1) {
            return Err(Error::InvalidParameter(format!("symbolic base must be positive, got {base}")));
        }
        if !poly_power.is_finite() || !log_power.is_finite() {
            return Err(Error::InvalidParameter("symbolic exponents must be finite".into()));
        }
        let base_f = *base.numer() as f64 / *base.denom() as f64;
        Ok(SymbolicScheduleFamily { base, base_f, poly_power, log_power, d1 })
    }

    pub fn base(&self) -> Rational64 {
        self.base
    }
    pub fn base_f64(&self) -> f64 {
        self.base_f
    }
    pub fn poly_power(&self) -> f64 {
        self.poly_power
    }
    pub fn log_power(&self) -> f64 {
        self.log_power
    }
    pub fn d1(&self) -> u64 {
        self.d1
    }

    pub fn eval(&self, n: u32) -> u64 {
        if n == 1 {
            return self.d1;
        }
        let nf = n as f64;
        let denom = nf.powf(self.poly_power) * nf.ln().powf(self.log_power);
        round_half_even(self.base_f.powi(n as i32) / denom)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleKind {
    Explicit(Vec<u64>),
    Symbolic(SymbolicScheduleFamily),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DurationSchedule {
    kind: ScheduleKind,
    name: String,
}

impl DurationSchedule {
    pub fn explicit(values: Vec<u64>) -> Self {
        let name = format!(
            "explicit:{}",
            values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        );
        DurationSchedule { kind: ScheduleKind::Explicit(values), name }
    }

    pub fn symbolic(family: SymbolicScheduleFamily) -> Self {
        let name = format!(
            "symbolic:base={},a={},b={},d1={}",
            family.base, family.poly_power, family.log_power, family.d1
        );
        DurationSchedule { kind: ScheduleKind::Symbolic(family), name }
    }

    /// Parse `explicit:3,5,0,2` or `symbolic:base=2,a=1,b=1,d1=4`.
    /// `d1` defaults to `round(base)` when omitted.
    pub fn parse(desc: &str) -> Result<Self> {
        let bad = || Error::InvalidDescriptor(desc.to_string());
        let (head, rest) = desc.split_once(':').ok_or_else(bad)?;
        match head.trim() {
            "explicit" => {
                let values = rest
                    .split(',')
                    .map(|v| v.trim().parse::<u64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                if values.is_empty() {
                    return Err(bad());
                }
                Ok(DurationSchedule::explicit(values))
            }
            "symbolic" => {
                let mut base = None;
                let mut a = 0.0f64;
                let mut b = 0.0f64;
                let mut d1 = None;
                for kv in rest.split(',') {
                    let (key, value) = kv.split_once('=').ok_or_else(bad)?;
                    match key.trim() {
                        "base" => base = Some(parse_rational(value).ok_or_else(bad)?),
                        "a" => a = value.trim().parse().map_err(|_| bad())?,
                        "b" => b = value.trim().parse().map_err(|_| bad())?,
                        "d1" => d1 = Some(value.trim().parse().map_err(|_| bad())?),
                        _ => return Err(bad()),
                    }
                }
                let base = base.ok_or_else(bad)?;
                let base_f = *base.numer() as f64 / *base.denom() as f64;
                let d1 = d1.unwrap_or_else(|| round_half_even(base_f));
                Ok(DurationSchedule::symbolic(SymbolicScheduleFamily::new(base, a, b, d1)?))
            }
            _ => Err(bad()),
        }
    }

    pub fn descriptor(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    pub fn as_symbolic(&self) -> Option<&SymbolicScheduleFamily> {
        match &self.kind {
            ScheduleKind::Symbolic(f) => Some(f),
            ScheduleKind::Explicit(_) => None,
        }
    }

    /// Number of phases an explicit list defines; `None` for symbolic
    /// schedules, which are defined for every phase.
    pub fn explicit_len(&self) -> Option<u32> {
        match &self.kind {
            ScheduleKind::Explicit(v) => Some(v.len() as u32),
            ScheduleKind::Symbolic(_) => None,
        }
    }

    /// The duration of phase `n` (1-based). Evaluating an explicit list
    /// beyond its length is an error.
    pub fn eval(&self, n: u32) -> Result<u64> {
        if n == 0 {
            return Err(Error::InvalidParameter("phase index must be >= 1".into()));
        }
        match &self.kind {
            ScheduleKind::Explicit(values) => values
                .get((n - 1) as usize)
                .copied()
                .ok_or(Error::ScheduleIndexOutOfRange { n, len: values.len() }),
            ScheduleKind::Symbolic(f) => Ok(f.eval(n)),
        }
    }
}

/// Cumulative phase boundaries `T_n`, materialized up to a requested number
/// of phases. Immutable once computed; grow by computing a fresh timeline.
#[derive(Clone, Debug)]
pub struct PhaseTimeline {
    /// `cumulative[i]` holds `T_{i+1}`; `T_0 = 0` is implicit.
    cumulative: Vec<u64>,
}

impl PhaseTimeline {
    pub fn compute(schedule: &DurationSchedule, phases: u32) -> Result<Self> {
        let mut cumulative = Vec::with_capacity(phases as usize);
        let mut total = 0u64;
        for n in 1..=phases {
            total = total.saturating_add(schedule.eval(n)?);
            cumulative.push(total);
        }
        Ok(PhaseTimeline { cumulative })
    }

    pub fn num_phases(&self) -> u32 {
        self.cumulative.len() as u32
    }

    /// `T_n`, with `T_0 = 0`.
    pub fn t_end(&self, n: u32) -> u64 {
        if n == 0 {
            0
        } else {
            self.cumulative[(n - 1) as usize]
        }
    }

    pub fn duration(&self, n: u32) -> u64 {
        self.t_end(n) - self.t_end(n - 1)
    }

    /// Last computed boundary.
    pub fn horizon(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0)
    }

    /// The phase governing the transition out of time `t`: the smallest `n`
    /// with `t < T_n`. Zero-length phases are skipped. Errors past the
    /// computed horizon.
    pub fn phase_of(&self, t: u64) -> Result<u32> {
        let k = self.cumulative.partition_point(|&boundary| boundary <= t);
        if k == self.cumulative.len() {
            return Err(Error::BeyondTimeline { t, horizon: self.horizon() });
        }
        Ok(k as u32 + 1)
    }
}

/// True iff `sum_{i<=n} f(i) <= sum_{i<=n} g(i)` for every `n <= horizon`,
/// i.e. `f` grows the graph at least as fast as `g` at every prefix.
pub fn prefix_dominates(f: &DurationSchedule, g: &DurationSchedule, horizon: u32) -> Result<bool> {
    let mut sf = 0u64;
    let mut sg = 0u64;
    for n in 1..=horizon {
        sf = sf.saturating_add(f.eval(n)?);
        sg = sg.saturating_add(g.eval(n)?);
        if sf > sg {
            return Ok(false);
        }
    }
    Ok(true)
}
