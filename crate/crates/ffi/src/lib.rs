//! C ABI over the core toolkit: opaque handles, integer status codes, and a
//! per-thread last-error message. The header `include/rwogg.h` is generated
//! at build time.
//!
//! Conventions: constructors return a status and write the handle through an
//! out-pointer; every handle has a matching `_free`; strings returned
//! through out-pointers are NUL-terminated, owned by the caller, and
//! released with `rwogg_string_free`. Passing NULL where a handle is
//! expected yields `RWOGG_STATUS_NULL_POINTER`, never a crash.

use rwogg_core::analysis::{classify, measure_even_mixing, p_origin_closed};
use rwogg_core::coupling::{verify_lhagg_exact, CouplingMode as CoreCouplingMode};
use rwogg_core::engine::{run_exact, run_monte_carlo, EvolutionMode, ReturnSeries};
use rwogg_core::families::TransitionFamily;
use rwogg_core::schedule::DurationSchedule;
use rwogg_core::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RwoggStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidDescriptor = 3,
    InvalidArgument = 4,
    ResourceCap = 5,
    RuntimeError = 6,
    /// Verification ran and failed (dominance violated).
    VerificationFailed = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> RwoggStatus {
    match err {
        Error::InvalidDescriptor(_) => RwoggStatus::InvalidDescriptor,
        Error::InvalidParameter(_)
        | Error::ScheduleIndexOutOfRange { .. }
        | Error::UnsupportedGamma { .. }
        | Error::PrefixConditionViolated { .. } => RwoggStatus::InvalidArgument,
        Error::StateCapExceeded { .. } => RwoggStatus::ResourceCap,
        _ => RwoggStatus::RuntimeError,
    }
}

fn fail(err: Error) -> RwoggStatus {
    let status = status_of(&err);
    set_error(&err.to_string());
    status
}

/// Message for the most recent error on this thread; valid until the next
/// failing call from the same thread.
#[no_mangle]
pub extern "C" fn rwogg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Opaque graph-family handle.
pub struct RwoggFamily(TransitionFamily);
/// Opaque duration-schedule handle.
pub struct RwoggSchedule(DurationSchedule);
/// Opaque return-series handle.
pub struct RwoggSeries(ReturnSeries<f64>);

unsafe fn read_utf8<'a>(ptr: *const c_char) -> Result<&'a str, RwoggStatus> {
    if ptr.is_null() {
        set_error("null string pointer");
        return Err(RwoggStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        RwoggStatus::InvalidUtf8
    })
}

macro_rules! deref_or_null {
    ($ptr:expr) => {
        match unsafe { $ptr.as_ref() } {
            Some(v) => v,
            None => {
                set_error("null handle");
                return RwoggStatus::NullPointer;
            }
        }
    };
}

/// Parses a family descriptor such as `karytree:k=2,lambda=1`,
/// `box:d=4`, `hypercube`, or `star:M=linear,gamma=0,start=leaf`.
///
/// # Safety
/// `descriptor` must point to a NUL-terminated string and `out` to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn rwogg_family_parse(
    descriptor: *const c_char,
    out: *mut *mut RwoggFamily,
) -> RwoggStatus {
    if out.is_null() {
        set_error("null out pointer");
        return RwoggStatus::NullPointer;
    }
    let text = match read_utf8(descriptor) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match TransitionFamily::parse(text) {
        Ok(family) => {
            *out = Box::into_raw(Box::new(RwoggFamily(family)));
            RwoggStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Overrides the family's state-count cap.
///
/// # Safety
/// `family` must be a live handle from `rwogg_family_parse`.
#[no_mangle]
pub unsafe extern "C" fn rwogg_family_set_cap(family: *mut RwoggFamily, cap: u64) -> RwoggStatus {
    match family.as_mut() {
        Some(f) => {
            f.0 = f.0.clone().with_cap(cap);
            RwoggStatus::Ok
        }
        None => {
            set_error("null handle");
            RwoggStatus::NullPointer
        }
    }
}

/// # Safety
/// `family` must be a handle from `rwogg_family_parse`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rwogg_family_free(family: *mut RwoggFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// Parses a schedule descriptor such as `explicit:3,5,0,2` or
/// `symbolic:base=2,a=1,b=1,d1=4`.
///
/// # Safety
/// `descriptor` must point to a NUL-terminated string and `out` to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn rwogg_schedule_parse(
    descriptor: *const c_char,
    out: *mut *mut RwoggSchedule,
) -> RwoggStatus {
    if out.is_null() {
        set_error("null out pointer");
        return RwoggStatus::NullPointer;
    }
    let text = match read_utf8(descriptor) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match DurationSchedule::parse(text) {
        Ok(schedule) => {
            *out = Box::into_raw(Box::new(RwoggSchedule(schedule)));
            RwoggStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `schedule` must be a handle from `rwogg_schedule_parse`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rwogg_schedule_free(schedule: *mut RwoggSchedule) {
    if !schedule.is_null() {
        drop(Box::from_raw(schedule));
    }
}

/// Exact return-probability series for `t = 0..=horizon`; `lumped` selects
/// the exact projected chain where one exists.
///
/// # Safety
/// `family` and `schedule` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rwogg_run_exact(
    family: *const RwoggFamily,
    schedule: *const RwoggSchedule,
    horizon: u64,
    lumped: bool,
    out: *mut *mut RwoggSeries,
) -> RwoggStatus {
    let family = deref_or_null!(family);
    let schedule = deref_or_null!(schedule);
    if out.is_null() {
        set_error("null out pointer");
        return RwoggStatus::NullPointer;
    }
    let mode = if lumped { EvolutionMode::Lumped } else { EvolutionMode::Full };
    match run_exact::<f64>(&family.0, &schedule.0, horizon, mode) {
        Ok(series) => {
            *out = Box::into_raw(Box::new(RwoggSeries(series)));
            RwoggStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Empirical return frequencies from `walkers` independent trajectories;
/// deterministic for a fixed seed.
///
/// # Safety
/// `family` and `schedule` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rwogg_run_monte_carlo(
    family: *const RwoggFamily,
    schedule: *const RwoggSchedule,
    horizon: u64,
    walkers: u64,
    seed: u64,
    lumped: bool,
    out: *mut *mut RwoggSeries,
) -> RwoggStatus {
    let family = deref_or_null!(family);
    let schedule = deref_or_null!(schedule);
    if out.is_null() {
        set_error("null out pointer");
        return RwoggStatus::NullPointer;
    }
    let mode = if lumped { EvolutionMode::Lumped } else { EvolutionMode::Full };
    match run_monte_carlo(&family.0, &schedule.0, horizon, walkers, seed, mode) {
        Ok(series) => {
            *out = Box::into_raw(Box::new(RwoggSeries(series)));
            RwoggStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Number of recorded time points (horizon + 1).
///
/// # Safety
/// `series` must be a live handle (NULL yields 0).
#[no_mangle]
pub unsafe extern "C" fn rwogg_series_len(series: *const RwoggSeries) -> u64 {
    series.as_ref().map_or(0, |s| s.0.r.len() as u64)
}

/// `R(t)`; NaN when out of range.
///
/// # Safety
/// `series` must be a live handle (NULL yields NaN).
#[no_mangle]
pub unsafe extern "C" fn rwogg_series_return_prob(series: *const RwoggSeries, t: u64) -> f64 {
    series
        .as_ref()
        .and_then(|s| s.0.r.get(t as usize).copied())
        .unwrap_or(f64::NAN)
}

/// Partial sum `S(t) = sum_{i=1..t} R(i)`; NaN when out of range.
///
/// # Safety
/// `series` must be a live handle (NULL yields NaN).
#[no_mangle]
pub unsafe extern "C" fn rwogg_series_partial_sum(series: *const RwoggSeries, t: u64) -> f64 {
    series
        .as_ref()
        .and_then(|s| s.0.s.get(t as usize).copied())
        .unwrap_or(f64::NAN)
}

/// The phase governing the transition out of `t`; 0 when out of range.
///
/// # Safety
/// `series` must be a live handle (NULL yields 0).
#[no_mangle]
pub unsafe extern "C" fn rwogg_series_phase(series: *const RwoggSeries, t: u64) -> u32 {
    series
        .as_ref()
        .and_then(|s| s.0.phase.get(t as usize).copied())
        .unwrap_or(0)
}

/// The series as CSV (`t,R,S,phase`), newly allocated; free with
/// `rwogg_string_free`.
///
/// # Safety
/// `series` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rwogg_series_to_csv(
    series: *const RwoggSeries,
    out: *mut *mut c_char,
) -> RwoggStatus {
    let series = deref_or_null!(series);
    if out.is_null() {
        set_error("null out pointer");
        return RwoggStatus::NullPointer;
    }
    match CString::new(series.0.to_csv()) {
        Ok(csv) => {
            *out = csv.into_raw();
            RwoggStatus::Ok
        }
        Err(_) => {
            set_error("series CSV contained an interior NUL");
            RwoggStatus::RuntimeError
        }
    }
}

/// # Safety
/// `series` must be a handle from a run call, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rwogg_series_free(series: *mut RwoggSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Recurrence verdict encoded for C callers.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RwoggVerdict {
    Recurrent = 0,
    Transient = 1,
    Undecided = 2,
}

/// Classifies the pair and writes the verdict; the full JSON report
/// (verdict, criterion, series term, notes) is available through
/// `rwogg_classify_json`.
///
/// # Safety
/// `family` and `schedule` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rwogg_classify(
    family: *const RwoggFamily,
    schedule: *const RwoggSchedule,
    out: *mut RwoggVerdict,
) -> RwoggStatus {
    let family = deref_or_null!(family);
    let schedule = deref_or_null!(schedule);
    if out.is_null() {
        set_error("null out pointer");
        return RwoggStatus::NullPointer;
    }
    let verdict = classify(&family.0, &schedule.0);
    *out = match verdict.verdict {
        rwogg_core::analysis::Verdict::Recurrent => RwoggVerdict::Recurrent,
        rwogg_core::analysis::Verdict::Transient => RwoggVerdict::Transient,
        rwogg_core::analysis::Verdict::Undecided => RwoggVerdict::Undecided,
    };
    RwoggStatus::Ok
}

/// Full classification report as a JSON string; free with
/// `rwogg_string_free`.
///
/// # Safety
/// `family` and `schedule` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rwogg_classify_json(
    family: *const RwoggFamily,
    schedule: *const RwoggSchedule,
    out: *mut *mut c_char,
) -> RwoggStatus {
    let family = deref_or_null!(family);
    let schedule = deref_or_null!(schedule);
    if out.is_null() {
        set_error("null out pointer");
        return RwoggStatus::NullPointer;
    }
    let verdict = classify(&family.0, &schedule.0);
    let json = serde_json::to_string_pretty(&verdict).unwrap_or_default();
    match CString::new(json) {
        Ok(s) => {
            *out = s.into_raw();
            RwoggStatus::Ok
        }
        Err(_) => {
            set_error("verdict JSON contained an interior NUL");
            RwoggStatus::RuntimeError
        }
    }
}

/// Closed-form stationary origin mass `p(n)`, where the family has one.
///
/// # Safety
/// `family` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rwogg_stationary_origin_mass(
    family: *const RwoggFamily,
    level: u32,
    out: *mut f64,
) -> RwoggStatus {
    let family = deref_or_null!(family);
    if out.is_null() {
        set_error("null out pointer");
        return RwoggStatus::NullPointer;
    }
    match p_origin_closed(&family.0, level) {
        Ok(p) => {
            *out = p;
            RwoggStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Measured even mixing time of the level-`n` chain at `epsilon`.
///
/// # Safety
/// `family` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rwogg_even_mixing_time(
    family: *const RwoggFamily,
    level: u32,
    epsilon: f64,
    out: *mut u64,
) -> RwoggStatus {
    let family = deref_or_null!(family);
    if out.is_null() {
        set_error("null out pointer");
        return RwoggStatus::NullPointer;
    }
    let result = family
        .0
        .build::<f64>(level)
        .and_then(|(idx, p)| measure_even_mixing(&p, idx.parities(), epsilon, 10_000_000));
    match result {
        Ok(measured) => {
            *out = measured;
            RwoggStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Exact dominance verification: `fast` must grow at least as fast as
/// `slow` prefix-wise; writes `max_t (R_fast - R_slow)` and returns
/// `VerificationFailed` when it exceeds the tolerance.
///
/// # Safety
/// All handles must be live; `out_max_violation` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rwogg_verify_lhagg_exact(
    family: *const RwoggFamily,
    fast: *const RwoggSchedule,
    slow: *const RwoggSchedule,
    horizon: u64,
    tolerance: f64,
    out_max_violation: *mut f64,
) -> RwoggStatus {
    let family = deref_or_null!(family);
    let fast = deref_or_null!(fast);
    let slow = deref_or_null!(slow);
    if out_max_violation.is_null() {
        set_error("null out pointer");
        return RwoggStatus::NullPointer;
    }
    match verify_lhagg_exact(&family.0, &fast.0, &slow.0, horizon, tolerance) {
        Ok(report) => {
            *out_max_violation = report.max_violation;
            if report.pass {
                RwoggStatus::Ok
            } else {
                set_error("return-series dominance violated beyond tolerance");
                RwoggStatus::VerificationFailed
            }
        }
        Err(e) => fail(e),
    }
}

/// Trajectory-coupling verification; writes the pathwise violation count
/// (zero for a correct coupling). `broken` runs the negative control.
///
/// # Safety
/// All handles must be live; `out_violations` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rwogg_verify_coupling_sim(
    family: *const RwoggFamily,
    fast: *const RwoggSchedule,
    slow: *const RwoggSchedule,
    horizon: u64,
    trials: u64,
    seed: u64,
    broken: bool,
    out_violations: *mut u64,
) -> RwoggStatus {
    let family = deref_or_null!(family);
    let fast = deref_or_null!(fast);
    let slow = deref_or_null!(slow);
    if out_violations.is_null() {
        set_error("null out pointer");
        return RwoggStatus::NullPointer;
    }
    let mode = if broken { CoreCouplingMode::Broken } else { CoreCouplingMode::Monotone };
    match rwogg_core::coupling::verify_coupling_sim(
        &family.0, &fast.0, &slow.0, horizon, trials, seed, mode,
    ) {
        Ok((report, _)) => {
            *out_violations = report.violations;
            if report.pass {
                RwoggStatus::Ok
            } else {
                set_error("pathwise dominance violated");
                RwoggStatus::VerificationFailed
            }
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `s` must be a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rwogg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    unsafe fn parse_family(desc: &str) -> *mut RwoggFamily {
        let mut out = ptr::null_mut();
        assert_eq!(rwogg_family_parse(cstr(desc).as_ptr(), &mut out), RwoggStatus::Ok);
        out
    }

    unsafe fn parse_schedule(desc: &str) -> *mut RwoggSchedule {
        let mut out = ptr::null_mut();
        assert_eq!(rwogg_schedule_parse(cstr(desc).as_ptr(), &mut out), RwoggStatus::Ok);
        out
    }

    #[test]
    fn lifecycle_and_simulation_through_the_abi() {
        unsafe {
            let family = parse_family("star:M=linear,gamma=0");
            let schedule = parse_schedule("explicit:1,1,1");
            let mut series = ptr::null_mut();
            assert_eq!(
                rwogg_run_exact(family, schedule, 6, false, &mut series),
                RwoggStatus::Ok
            );
            assert_eq!(rwogg_series_len(series), 7);
            for t in 0..=6u64 {
                let expected = if t % 2 == 0 { 1.0 } else { 0.0 };
                assert_eq!(rwogg_series_return_prob(series, t), expected);
            }
            assert_eq!(rwogg_series_phase(series, 0), 1);
            let mut csv = ptr::null_mut();
            assert_eq!(rwogg_series_to_csv(series, &mut csv), RwoggStatus::Ok);
            let text = CStr::from_ptr(csv).to_str().unwrap();
            assert!(text.starts_with("t,R,S,phase\n"));
            rwogg_string_free(csv);
            rwogg_series_free(series);
            rwogg_schedule_free(schedule);
            rwogg_family_free(family);
        }
    }

    #[test]
    fn classification_and_error_reporting() {
        unsafe {
            let family = parse_family("karytree:k=2,lambda=1");
            let schedule = parse_schedule("symbolic:base=2,a=1,b=2,d1=2");
            let mut verdict = RwoggVerdict::Undecided;
            assert_eq!(rwogg_classify(family, schedule, &mut verdict), RwoggStatus::Ok);
            assert_eq!(verdict, RwoggVerdict::Transient);
            let mut json = ptr::null_mut();
            assert_eq!(rwogg_classify_json(family, schedule, &mut json), RwoggStatus::Ok);
            let text = CStr::from_ptr(json).to_str().unwrap();
            assert!(text.contains("\"Transient\""));
            rwogg_string_free(json);
            rwogg_schedule_free(schedule);
            rwogg_family_free(family);

            let mut out = ptr::null_mut();
            let status = rwogg_family_parse(cstr("torus:d=2").as_ptr(), &mut out);
            assert_eq!(status, RwoggStatus::InvalidDescriptor);
            let message = CStr::from_ptr(rwogg_last_error_message()).to_str().unwrap();
            assert!(message.contains("torus"));
        }
    }

    #[test]
    fn null_handles_are_rejected_not_dereferenced() {
        unsafe {
            let mut verdict = RwoggVerdict::Undecided;
            assert_eq!(
                rwogg_classify(ptr::null(), ptr::null(), &mut verdict),
                RwoggStatus::NullPointer
            );
            assert_eq!(rwogg_series_len(ptr::null()), 0);
            assert!(rwogg_series_return_prob(ptr::null(), 0).is_nan());
            rwogg_series_free(ptr::null_mut());
            rwogg_string_free(ptr::null_mut());
        }
    }

    #[test]
    fn stationary_mixing_and_dominance_surface() {
        unsafe {
            let family = parse_family("hypercube");
            let mut p = 0.0f64;
            assert_eq!(rwogg_stationary_origin_mass(family, 5, &mut p), RwoggStatus::Ok);
            assert_eq!(p, 0.0625);
            let mut mixing = 0u64;
            assert_eq!(rwogg_even_mixing_time(family, 4, 0.01, &mut mixing), RwoggStatus::Ok);
            assert!(mixing >= 2 && mixing.is_multiple_of(2));

            let fast = parse_schedule("explicit:1,1,1,1,1,1,1,1");
            let slow = parse_schedule("explicit:2,2,2,2");
            let mut violation = f64::NAN;
            assert_eq!(
                rwogg_verify_lhagg_exact(family, fast, slow, 8, 1e-12, &mut violation),
                RwoggStatus::Ok
            );
            assert!(violation <= 1e-12);
            let mut count = u64::MAX;
            assert_eq!(
                rwogg_verify_coupling_sim(family, fast, slow, 8, 200, 1, false, &mut count),
                RwoggStatus::Ok
            );
            assert_eq!(count, 0);
            assert_eq!(
                rwogg_verify_coupling_sim(family, fast, slow, 8, 200, 1, true, &mut count),
                RwoggStatus::VerificationFailed
            );
            assert!(count > 0);
            rwogg_schedule_free(fast);
            rwogg_schedule_free(slow);
            rwogg_family_free(family);
        }
    }
}
