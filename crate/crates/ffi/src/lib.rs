//! C interface to `wpsk`.
//!
//! Every function returns a [`WpskStatus`]; on failure the message is available
//! from [`wpsk_last_error`] on the same thread. Handles are freed with the
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wpsk::approximators::LinearApproximation;
use wpsk::bounds::min_error_bounds;
use wpsk::kernels::Kernel;
use wpsk::precision::{ln_to_log10, MIN_DIGITS};
use wpsk::sequences::Family;
use wpsk::worstcase::{lower_bound_witness, worst_case, WorstCaseConfig};
use wpsk::{Error, Norm, Precision};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpskStatus {
    Ok = 0,
    Config = 1,
    Domain = 2,
    NotApplicable = 3,
    Truncation = 4,
    PrecisionInsufficient = 5,
    Numerical = 6,
    Io = 7,
    NullPointer = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpskFamily {
    Gaussian = 0,
    Exponential = 1,
    Hermite = 2,
    Bessel = 3,
    Power = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpskNorm {
    Sup = 0,
    L2 = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpskApproximationKind {
    Polynomial = 0,
    WeightedPolynomial = 1,
    KernelInterpolant = 2,
}

/// Opaque kernel handle.
pub struct WpskKernel {
    kernel: Kernel,
}

/// Opaque handle to a linear approximation together with its kernel.
pub struct WpskApproximation {
    approx: LinearApproximation,
    kernel: Kernel,
    precision: Precision,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> WpskStatus {
    match err {
        Error::Config(_) => WpskStatus::Config,
        Error::Domain(_) => WpskStatus::Domain,
        Error::NotApplicable(_) => WpskStatus::NotApplicable,
        Error::Truncation { .. } => WpskStatus::Truncation,
        Error::PrecisionInsufficient { .. } => WpskStatus::PrecisionInsufficient,
        Error::Numerical(_) => WpskStatus::Numerical,
        Error::Io(_) => WpskStatus::Io,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> WpskStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WpskStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            let s = status_of(&e);
            set_error(e.to_string());
            s
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            WpskStatus::NullPointer
        }
        Err(_) => {
            set_error("panic inside wpsk".into());
            WpskStatus::Panic
        }
    }
}

fn precision(digits: u32) -> Result<Precision, Failure> {
    if digits < MIN_DIGITS {
        return Err(Error::Config(format!("precision must be at least {MIN_DIGITS} digits")).into());
    }
    Ok(Precision::new(digits))
}

fn norm(n: WpskNorm) -> Norm {
    match n {
        WpskNorm::Sup => Norm::Sup,
        WpskNorm::L2 => Norm::L2,
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn nodes_from(ptr: *const f64, len: usize, prec: Precision) -> Result<Vec<wpsk::Float>, Failure> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if ptr.is_null() {
        return Err(Failure::Null("nodes"));
    }
    Ok(std::slice::from_raw_parts(ptr, len).iter().map(|&x| prec.float(x)).collect())
}

/// Message of the last failed call on this thread, or NULL. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn wpsk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wpsk_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => c"",
    };
    V.as_ptr()
}

/// Creates a kernel. Parameters not used by the family are ignored.
///
/// # Safety
/// `out_kernel` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wpsk_kernel_new(
    family: WpskFamily,
    epsilon: f64,
    tau: f64,
    beta: f64,
    out_kernel: *mut *mut WpskKernel,
) -> WpskStatus {
    guard(|| {
        let slot = out(out_kernel, "out_kernel")?;
        let fam = match family {
            WpskFamily::Gaussian => Family::Gaussian { epsilon },
            WpskFamily::Exponential => Family::Exponential { epsilon },
            WpskFamily::Hermite => Family::Hermite { epsilon, tau },
            WpskFamily::Bessel => Family::Bessel { epsilon },
            WpskFamily::Power => Family::Power { beta },
        };
        let kernel = Kernel::from_family(fam)?;
        *slot = Box::into_raw(Box::new(WpskKernel { kernel }));
        Ok(())
    })
}

/// # Safety
/// `kernel` must come from [`wpsk_kernel_new`] and not be freed already. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn wpsk_kernel_free(kernel: *mut WpskKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

/// `K(x, y)` for `x, y` in [-1, 1].
///
/// # Safety
/// `kernel` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn wpsk_kernel_eval(
    kernel: *const WpskKernel,
    x: f64,
    y: f64,
    digits: u32,
    out_value: *mut f64,
) -> WpskStatus {
    guard(|| {
        let k = deref(kernel, "kernel")?;
        let slot = out(out_value, "out_value")?;
        let prec = precision(digits)?;
        *slot = k.kernel.eval_best(&prec.float(x), &prec.float(y), prec)?.to_f64();
        Ok(())
    })
}

/// Builds an approximation at `len` nodes in [-1, 1].
///
/// # Safety
/// `kernel` must be a live handle, `nodes` must point to `len` doubles, `out_approx` writable.
#[no_mangle]
pub unsafe extern "C" fn wpsk_approximation_new(
    kernel: *const WpskKernel,
    kind: WpskApproximationKind,
    nodes: *const f64,
    len: usize,
    digits: u32,
    out_approx: *mut *mut WpskApproximation,
) -> WpskStatus {
    guard(|| {
        let k = deref(kernel, "kernel")?;
        let slot = out(out_approx, "out_approx")?;
        let prec = precision(digits)?;
        let xs = nodes_from(nodes, len, prec)?;
        let approx = match kind {
            WpskApproximationKind::Polynomial => LinearApproximation::polynomial(xs, prec)?,
            WpskApproximationKind::WeightedPolynomial => LinearApproximation::weighted_polynomial(&k.kernel, xs, prec)?,
            WpskApproximationKind::KernelInterpolant => LinearApproximation::kernel_interpolant(&k.kernel, xs, prec)?,
        };
        *slot = Box::into_raw(Box::new(WpskApproximation {
            approx,
            kernel: k.kernel.clone(),
            precision: prec,
        }));
        Ok(())
    })
}

/// Weighted Taylor approximation of order `n` about `a`, `|a| < 1`.
///
/// # Safety
/// `kernel` must be a live handle and `out_approx` writable.
#[no_mangle]
pub unsafe extern "C" fn wpsk_approximation_weighted_taylor(
    kernel: *const WpskKernel,
    a: f64,
    n: usize,
    digits: u32,
    out_approx: *mut *mut WpskApproximation,
) -> WpskStatus {
    guard(|| {
        let k = deref(kernel, "kernel")?;
        let slot = out(out_approx, "out_approx")?;
        let prec = precision(digits)?;
        let approx = LinearApproximation::weighted_taylor(&k.kernel, a, n, prec)?;
        *slot = Box::into_raw(Box::new(WpskApproximation {
            approx,
            kernel: k.kernel.clone(),
            precision: prec,
        }));
        Ok(())
    })
}

/// # Safety
/// `approx` must come from one of the constructors and not be freed already. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn wpsk_approximation_free(approx: *mut WpskApproximation) {
    if !approx.is_null() {
        drop(Box::from_raw(approx));
    }
}

/// `log10 e_p(A)` with its certified relative error.
///
/// # Safety
/// `approx` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn wpsk_worst_case(
    approx: *const WpskApproximation,
    norm_kind: WpskNorm,
    out_log10: *mut f64,
    out_rel_error: *mut f64,
) -> WpskStatus {
    guard(|| {
        let a = deref(approx, "approx")?;
        let value = out(out_log10, "out_log10")?;
        let err = out(out_rel_error, "out_rel_error")?;
        let cfg = WorstCaseConfig {
            norm: norm(norm_kind),
            precision: a.precision,
            ..WorstCaseConfig::default()
        };
        let e = worst_case(&a.approx, &a.kernel, &cfg)?;
        *value = e.log10_value;
        *err = e.certified_rel_error;
        Ok(())
    })
}

/// `log10` of the lower bound from the weighted node polynomial.
///
/// # Safety
/// `kernel` must be a live handle, `nodes` must point to `len` doubles, `out_log10` writable.
#[no_mangle]
pub unsafe extern "C" fn wpsk_lower_bound_witness(
    kernel: *const WpskKernel,
    nodes: *const f64,
    len: usize,
    norm_kind: WpskNorm,
    digits: u32,
    out_log10: *mut f64,
) -> WpskStatus {
    guard(|| {
        let k = deref(kernel, "kernel")?;
        let slot = out(out_log10, "out_log10")?;
        let prec = precision(digits)?;
        let xs = nodes_from(nodes, len, prec)?;
        let w = lower_bound_witness(&k.kernel, &xs, norm(norm_kind), prec)?;
        *slot = ln_to_log10(&w.ln());
        Ok(())
    })
}

/// `log10` lower and upper bounds on the `n`th minimal error; `out_applicable` tells whether `n ≥ m_L`.
///
/// # Safety
/// `kernel` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn wpsk_min_error_bounds(
    kernel: *const WpskKernel,
    norm_kind: WpskNorm,
    n: usize,
    digits: u32,
    out_lower: *mut f64,
    out_upper: *mut f64,
    out_applicable: *mut bool,
) -> WpskStatus {
    guard(|| {
        let k = deref(kernel, "kernel")?;
        let lo = out(out_lower, "out_lower")?;
        let up = out(out_upper, "out_upper")?;
        let app = out(out_applicable, "out_applicable")?;
        let prec = precision(digits)?;
        let b = min_error_bounds(k.kernel.alpha(), k.kernel.weight(), norm(norm_kind), n, prec)?;
        *lo = b.log10_lower();
        *up = b.log10_upper();
        *app = b.applicable;
        Ok(())
    })
}
