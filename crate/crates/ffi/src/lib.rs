//! C ABI over `jnr-core`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns
//! a [`JnrStatus`]; on failure the message is kept per thread and can be read
//! with [`jnr_last_error_message`]. Panics are caught and reported as
//! [`JnrStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use jnr_core::boundary::{
    boundary_general, sample_directions, support_function, Direction, ObservableSet, Strategy,
    DEFAULT_MAX_DEPTH,
};
use jnr_core::classify::{classify_k2_qutrit, classify_k3_qutrit, Classification, JnrClass};
use jnr_core::hermitian::{c, CMatrix, HermitianOperator};
use jnr_core::uncertainty::maccone_pati_bounds;
use jnr_core::JnrError;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JnrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonHermitian = 3,
    DimensionMismatch = 4,
    Parse = 5,
    Numerical = 6,
    Io = 7,
    Panic = 8,
}

/// Direction sampling scheme.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JnrStrategy {
    Grid2d = 0,
    Fibonacci3d = 1,
    SeededUniform = 2,
}

impl From<JnrStrategy> for Strategy {
    fn from(s: JnrStrategy) -> Self {
        match s {
            JnrStrategy::Grid2d => Strategy::Grid2d,
            JnrStrategy::Fibonacci3d => Strategy::Fibonacci3d,
            JnrStrategy::SeededUniform => Strategy::SeededUniform,
        }
    }
}

/// Family of a qutrit classification.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JnrFamily {
    K2 = 0,
    K3 = 1,
    PolytopeDegenerate = 2,
}

/// Qutrit classification summary.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JnrClassification {
    pub family: JnrFamily,
    /// Class index 0..=3 for `K2`, -1 otherwise.
    pub k2_class: i32,
    /// Number of ellipses.
    pub e: usize,
    /// Number of segments.
    pub s: usize,
    pub infinite_segments: bool,
    pub flat_parts: usize,
}

/// Two-sided bound on the minimal sum of variances.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JnrBracket {
    pub lower: f64,
    pub upper: f64,
    pub num_directions: usize,
}

/// Opaque Hermitian operator.
pub struct JnrOperator(HermitianOperator);

/// Opaque ordered list of operators sharing one dimension.
pub struct JnrObservableSet(ObservableSet);

/// Opaque list of boundary points, stored row-major.
pub struct JnrPointCloud {
    k: usize,
    points: Vec<f64>,
    directions: Vec<f64>,
    supports: Vec<f64>,
    multiplicities: Vec<usize>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(JnrStatus, String);

impl From<JnrError> for Failure {
    fn from(e: JnrError) -> Self {
        let status = match &e {
            JnrError::NonHermitianInput { .. } => JnrStatus::NonHermitian,
            JnrError::DimensionMismatch { .. }
            | JnrError::WrongDimension { .. }
            | JnrError::StrategyDimensionMismatch { .. } => JnrStatus::DimensionMismatch,
            JnrError::Parse { .. } => JnrStatus::Parse,
            JnrError::NoConvergence { .. }
            | JnrError::UnboundedIntersection { .. }
            | JnrError::InteriorPointInvalid { .. }
            | JnrError::NonOrthonormalBasis { .. } => JnrStatus::Numerical,
            JnrError::Io(_) => JnrStatus::Io,
            _ => JnrStatus::InvalidArgument,
        };
        Failure(status, format!("{}: {e}", e.kind()))
    }
}

fn null(what: &str) -> Failure {
    Failure(JnrStatus::NullPointer, format!("null pointer: {what}"))
}

fn set_last_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> JnrStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => JnrStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {message}"));
            JnrStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Copy of the last error message on this thread, or NULL when the last call
/// succeeded. Release it with [`jnr_string_free`].
#[no_mangle]
pub extern "C" fn jnr_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null_mut(), |s| s.clone().into_raw())
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jnr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a `dim x dim` operator from row-major real and imaginary parts.
/// `im` may be NULL for a real symmetric matrix.
///
/// # Safety
/// `re` (and `im` when non-NULL) must point to `dim * dim` doubles; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn jnr_operator_new(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out_op: *mut *mut JnrOperator,
) -> JnrStatus {
    guard(|| {
        let out_op = out(out_op, "out_op")?;
        if dim == 0 {
            return Err(Failure(JnrStatus::InvalidArgument, "dimension must be positive".into()));
        }
        let len = dim.checked_mul(dim).ok_or_else(|| {
            Failure(JnrStatus::InvalidArgument, format!("dimension {dim} overflows"))
        })?;
        let re = slice(re, len, "re")?;
        let im = if im.is_null() { None } else { Some(slice(im, len, "im")?) };
        let m = CMatrix::from_fn(dim, dim, |i, j| {
            c(re[i * dim + j], im.map_or(0.0, |v| v[i * dim + j]))
        });
        *out_op = boxed(JnrOperator(HermitianOperator::new(m)?));
        Ok(())
    })
}

/// Parses an operator from its JSON form `{"d": .., "re": [[..]], "im": [[..]]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out_op` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jnr_operator_from_json(
    json: *const c_char,
    out_op: *mut *mut JnrOperator,
) -> JnrStatus {
    guard(|| {
        let out_op = out(out_op, "out_op")?;
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(JnrStatus::Parse, format!("operator JSON is not UTF-8: {e}")))?;
        *out_op = boxed(JnrOperator(HermitianOperator::from_json_str(text)?));
        Ok(())
    })
}

/// Serializes an operator to JSON. Release the string with [`jnr_string_free`].
///
/// # Safety
/// `op` must be a live operator handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jnr_operator_to_json(
    op: *const JnrOperator,
    out_json: *mut *mut c_char,
) -> JnrStatus {
    guard(|| {
        let op = deref(op, "op")?;
        let out_json = out(out_json, "out_json")?;
        let text = CString::new(op.0.to_json_string()).expect("JSON has no interior nul");
        *out_json = text.into_raw();
        Ok(())
    })
}

/// Dimension of the operator, or 0 for NULL.
///
/// # Safety
/// `op` must be NULL or a live operator handle.
#[no_mangle]
pub unsafe extern "C" fn jnr_operator_dim(op: *const JnrOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.dim())
}

/// # Safety
/// `op` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jnr_operator_free(op: *mut JnrOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Builds an observable set from `k` operators; the operators are copied.
///
/// # Safety
/// `ops` must point to `k` live operator handles; `out_set` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jnr_set_new(
    ops: *const *const JnrOperator,
    k: usize,
    out_set: *mut *mut JnrObservableSet,
) -> JnrStatus {
    guard(|| {
        let out_set = out(out_set, "out_set")?;
        if k == 0 {
            return Err(Failure(JnrStatus::InvalidArgument, "need at least one operator".into()));
        }
        if ops.is_null() {
            return Err(null("ops"));
        }
        let handles = std::slice::from_raw_parts(ops, k);
        let mut list = Vec::with_capacity(k);
        for (i, &h) in handles.iter().enumerate() {
            list.push(deref(h, &format!("ops[{i}]"))?.0.clone());
        }
        *out_set = boxed(JnrObservableSet(ObservableSet::new(list)?));
        Ok(())
    })
}

/// Number of operators, or 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live set handle.
#[no_mangle]
pub unsafe extern "C" fn jnr_set_k(set: *const JnrObservableSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.k())
}

/// Hilbert-space dimension, or 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live set handle.
#[no_mangle]
pub unsafe extern "C" fn jnr_set_dim(set: *const JnrObservableSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.dim())
}

/// # Safety
/// `set` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jnr_set_free(set: *mut JnrObservableSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// `lambda_max(n . F)` and the multiplicity of the top level.
///
/// # Safety
/// `n` must point to `k` doubles; outputs must be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn jnr_support_function(
    set: *const JnrObservableSet,
    n: *const f64,
    k: usize,
    gap_tol: f64,
    out_value: *mut f64,
    out_multiplicity: *mut usize,
) -> JnrStatus {
    guard(|| {
        let set = deref(set, "set")?;
        let out_value = out(out_value, "out_value")?;
        let dir = Direction::new(slice(n, k, "n")?.to_vec())?;
        let (value, proj) = support_function(&set.0, &dir, gap_tol)?;
        *out_value = value;
        if let Some(m) = out_multiplicity.as_mut() {
            *m = proj.multiplicity;
        }
        Ok(())
    })
}

/// Boundary points for `num_directions` sampled directions. Degenerate
/// directions may contribute several points.
///
/// # Safety
/// `set` must be a live set handle; `out_cloud` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jnr_boundary_points(
    set: *const JnrObservableSet,
    num_directions: usize,
    strategy: JnrStrategy,
    seed: u64,
    gap_tol: f64,
    out_cloud: *mut *mut JnrPointCloud,
) -> JnrStatus {
    guard(|| {
        let set = deref(set, "set")?;
        let out_cloud = out(out_cloud, "out_cloud")?;
        let k = set.0.k();
        let dirs = sample_directions(k, num_directions, strategy.into(), seed)?;
        let res = boundary_general(&set.0, &dirs, gap_tol, DEFAULT_MAX_DEPTH)?;
        let mut cloud = JnrPointCloud {
            k,
            points: Vec::with_capacity(k * res.points.len()),
            directions: Vec::with_capacity(k * res.points.len()),
            supports: Vec::with_capacity(res.points.len()),
            multiplicities: Vec::with_capacity(res.points.len()),
        };
        for p in &res.points {
            cloud.points.extend_from_slice(&p.point);
            cloud.directions.extend_from_slice(p.direction.as_slice());
            cloud.supports.push(p.support_value);
            cloud.multiplicities.push(p.multiplicity);
        }
        *out_cloud = boxed(cloud);
        Ok(())
    })
}

/// Number of points, or 0 for NULL.
///
/// # Safety
/// `cloud` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jnr_points_len(cloud: *const JnrPointCloud) -> usize {
    cloud.as_ref().map_or(0, |c| c.supports.len())
}

/// Coordinates per point, or 0 for NULL.
///
/// # Safety
/// `cloud` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jnr_points_k(cloud: *const JnrPointCloud) -> usize {
    cloud.as_ref().map_or(0, |c| c.k)
}

/// Row-major `len x k` point coordinates, valid until the cloud is freed.
///
/// # Safety
/// `cloud` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jnr_points_coords(cloud: *const JnrPointCloud) -> *const f64 {
    cloud.as_ref().map_or(ptr::null(), |c| c.points.as_ptr())
}

/// Row-major `len x k` supporting directions, valid until the cloud is freed.
///
/// # Safety
/// `cloud` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jnr_points_directions(cloud: *const JnrPointCloud) -> *const f64 {
    cloud.as_ref().map_or(ptr::null(), |c| c.directions.as_ptr())
}

/// Support value per point, valid until the cloud is freed.
///
/// # Safety
/// `cloud` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jnr_points_supports(cloud: *const JnrPointCloud) -> *const f64 {
    cloud.as_ref().map_or(ptr::null(), |c| c.supports.as_ptr())
}

/// Top-level multiplicity per point, valid until the cloud is freed.
///
/// # Safety
/// `cloud` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jnr_points_multiplicities(cloud: *const JnrPointCloud) -> *const usize {
    cloud.as_ref().map_or(ptr::null(), |c| c.multiplicities.as_ptr())
}

/// # Safety
/// `cloud` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jnr_points_free(cloud: *mut JnrPointCloud) {
    if !cloud.is_null() {
        drop(Box::from_raw(cloud));
    }
}

fn summarize(c: &Classification) -> JnrClassification {
    let (family, k2_class, infinite_segments) = match c.class {
        JnrClass::K2 { label } => (JnrFamily::K2, label.index() as i32, false),
        JnrClass::K3 {
            infinite_segments, ..
        } => (JnrFamily::K3, -1, infinite_segments),
        JnrClass::PolytopeDegenerate => (JnrFamily::PolytopeDegenerate, -1, false),
    };
    JnrClassification {
        family,
        k2_class,
        e: c.e,
        s: c.s,
        infinite_segments,
        flat_parts: c.flat_parts.len(),
    }
}

/// Flat-part class of two 3x3 operators.
///
/// # Safety
/// Handles must be live; `out_class` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jnr_classify_k2(
    x: *const JnrOperator,
    y: *const JnrOperator,
    out_class: *mut JnrClassification,
) -> JnrStatus {
    guard(|| {
        let (x, y) = (deref(x, "x")?, deref(y, "y")?);
        let out_class = out(out_class, "out_class")?;
        *out_class = summarize(&classify_k2_qutrit(&x.0, &y.0)?);
        Ok(())
    })
}

/// Ellipse and segment counts of three 3x3 operators.
///
/// # Safety
/// Handles must be live; `out_class` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jnr_classify_k3(
    f1: *const JnrOperator,
    f2: *const JnrOperator,
    f3: *const JnrOperator,
    out_class: *mut JnrClassification,
) -> JnrStatus {
    guard(|| {
        let (a, b, c3) = (deref(f1, "f1")?, deref(f2, "f2")?, deref(f3, "f3")?);
        let out_class = out(out_class, "out_class")?;
        *out_class = summarize(&classify_k3_qutrit(&a.0, &b.0, &c3.0)?);
        Ok(())
    })
}

/// Bracket on `min (Var X + Var Y)` over pure states.
///
/// # Safety
/// Handles must be live; `out_bracket` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jnr_variance_sum_bounds(
    x: *const JnrOperator,
    y: *const JnrOperator,
    num_directions: usize,
    gap_tol: f64,
    seed: u64,
    out_bracket: *mut JnrBracket,
) -> JnrStatus {
    guard(|| {
        let (x, y) = (deref(x, "x")?, deref(y, "y")?);
        let out_bracket = out(out_bracket, "out_bracket")?;
        let b = maccone_pati_bounds(&x.0, &y.0, num_directions, gap_tol, seed)?;
        *out_bracket = JnrBracket {
            lower: b.lower,
            upper: b.upper,
            num_directions: b.num_directions,
        };
        Ok(())
    })
}
