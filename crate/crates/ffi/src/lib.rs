//! C ABI over the `pfem` library.
//!
//! Every function returns a [`PfemStatus`]; on failure a message is kept per
//! thread and can be read with [`pfem_last_error`]. Meshes and results are
//! opaque handles that must be released with their `_free` functions.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use pfem::benchmarks::BenchmarkId;
use pfem::driver::{run, RunConfig};
use pfem::estimator::{
    compute_indicators, effectivity, error_surrogate, EstimatorParams, EstimatorReport,
};
use pfem::fem::{assemble, solve, FemSpace};
use pfem::jacobi::{cached_rule, eval_jacobi, gamma_p, JacobiParams, WeightExponent};
use pfem::mesh::{DegreeMap, ParallelogramMesh};
use pfem::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfemStatus {
    Ok = 0,
    InvalidArgument = 1,
    Validation = 2,
    Solver = 3,
    Stagnation = 4,
    Io = 5,
    Panic = 6,
}

/// A validated parallelogram mesh.
pub struct PfemMesh {
    inner: Arc<ParallelogramMesh>,
}

/// Solution summary and indicators from [`pfem_solve_benchmark`].
pub struct PfemResult {
    summary: PfemSummary,
    report: EstimatorReport,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfemSummary {
    pub dofs: usize,
    pub eta: f64,
    pub osc: f64,
    pub energy_err: f64,
    pub tilde_err: f64,
    /// `eta / tilde_err`, or NaN when the error vanishes.
    pub effectivity: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into().into_bytes());
}

fn status_of(e: &Error) -> PfemStatus {
    match e {
        Error::Parameter(_)
        | Error::Integrability(_)
        | Error::Precondition(_)
        | Error::Inconsistent(_) => PfemStatus::InvalidArgument,
        Error::Geometry { .. }
        | Error::Conformity(_)
        | Error::Orientation(_)
        | Error::Config(_)
        | Error::Parse(_) => PfemStatus::Validation,
        Error::Solver(_) | Error::NotPositiveDefinite { .. } => PfemStatus::Solver,
        Error::Io(_) => PfemStatus::Io,
    }
}

/// Runs `f`, recording errors and turning panics into [`PfemStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), (PfemStatus, String)>) -> PfemStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PfemStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            PfemStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (PfemStatus, String) {
    (status_of(&e), e.to_string())
}

fn bad(msg: &str) -> (PfemStatus, String) {
    (PfemStatus::InvalidArgument, msg.to_string())
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (PfemStatus, String)> {
    if s.is_null() {
        return Err(bad(&format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| bad(&format!("{what} is not valid UTF-8")))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pfem_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Parses and validates a mesh given as JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pfem_mesh_from_json(
    json: *const c_char,
    out: *mut *mut PfemMesh,
) -> PfemStatus {
    guard(|| {
        if out.is_null() {
            return Err(bad("out is null"));
        }
        let text = read_str(json, "json")?;
        let mesh = ParallelogramMesh::from_json(text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(PfemMesh {
            inner: Arc::new(mesh),
        }));
        Ok(())
    })
}

/// # Safety
/// `mesh` must be null or a handle from [`pfem_mesh_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pfem_mesh_free(mesh: *mut PfemMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// # Safety
/// `mesh` must be a live handle; the output pointers must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn pfem_mesh_counts(
    mesh: *const PfemMesh,
    vertices: *mut usize,
    elements: *mut usize,
    edges: *mut usize,
) -> PfemStatus {
    guard(|| {
        let m = mesh.as_ref().ok_or_else(|| bad("mesh is null"))?;
        for (p, v) in [
            (vertices, m.inner.num_vertices()),
            (elements, m.inner.num_elements()),
            (edges, m.inner.num_edges()),
        ] {
            if !p.is_null() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// `P_n^{(alpha, beta)}(x)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pfem_jacobi_eval(
    n: usize,
    alpha: f64,
    beta: f64,
    x: f64,
    out: *mut f64,
) -> PfemStatus {
    guard(|| {
        if out.is_null() {
            return Err(bad("out is null"));
        }
        let params = JacobiParams::new(alpha, beta).map_err(lib_err)?;
        *out = eval_jacobi(n, params, x).map_err(lib_err)?;
        Ok(())
    })
}

/// Squared norm of the symmetric Jacobi polynomial of degree `p`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pfem_gamma_p(beta: f64, p: usize, out: *mut f64) -> PfemStatus {
    guard(|| {
        if out.is_null() {
            return Err(bad("out is null"));
        }
        *out = gamma_p(WeightExponent::new(beta).map_err(lib_err)?, p);
        Ok(())
    })
}

/// `n`-point Gauss-Jacobi rule for the weight `(1-x)^alpha (1+x)^beta`.
///
/// # Safety
/// `nodes` and `weights` must each point to `n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pfem_gauss_jacobi(
    n: usize,
    alpha: f64,
    beta: f64,
    nodes: *mut f64,
    weights: *mut f64,
) -> PfemStatus {
    guard(|| {
        if nodes.is_null() || weights.is_null() {
            return Err(bad("output arrays are null"));
        }
        let rule =
            cached_rule(n, JacobiParams::new(alpha, beta).map_err(lib_err)?).map_err(lib_err)?;
        ptr::copy_nonoverlapping(rule.nodes().as_ptr(), nodes, n);
        ptr::copy_nonoverlapping(rule.weights().as_ptr(), weights, n);
        Ok(())
    })
}

/// Solves a named benchmark at uniform degree `p` and evaluates the
/// estimator with `delta`.
///
/// # Safety
/// `mesh` must be a live handle, `benchmark` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pfem_solve_benchmark(
    mesh: *const PfemMesh,
    benchmark: *const c_char,
    p: usize,
    delta: f64,
    out: *mut *mut PfemResult,
) -> PfemStatus {
    guard(|| {
        if out.is_null() {
            return Err(bad("out is null"));
        }
        let m = mesh.as_ref().ok_or_else(|| bad("mesh is null"))?;
        let id: BenchmarkId = read_str(benchmark, "benchmark")?.parse().map_err(lib_err)?;
        let params = EstimatorParams::with_delta(delta).map_err(lib_err)?;
        let bench = id.build(&m.inner);
        let space = FemSpace::new(
            m.inner.clone(),
            DegreeMap::uniform(m.inner.num_elements(), p),
        )
        .map_err(lib_err)?;
        let f = |x: f64, y: f64| bench.f(x, y);
        let sol = solve(&assemble(&space, &f, pfem::fem::DEFAULT_BOOST).map_err(lib_err)?)
            .map_err(lib_err)?;
        let report = compute_indicators(&sol, &f, &params).map_err(lib_err)?;
        let err = error_surrogate(
            &sol,
            &|x, y| bench.u(x, y),
            &|x, y| bench.grad(x, y),
            &params,
        )
        .map_err(lib_err)?;
        let summary = PfemSummary {
            dofs: sol.num_free(),
            eta: report.eta,
            osc: report.osc,
            energy_err: err.energy,
            tilde_err: err.tilde,
            effectivity: effectivity(report.eta, err.tilde)
                .value()
                .unwrap_or(f64::NAN),
        };
        *out = Box::into_raw(Box::new(PfemResult { summary, report }));
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pfem_result_free(result: *mut PfemResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `result` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pfem_result_summary(
    result: *const PfemResult,
    out: *mut PfemSummary,
) -> PfemStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| bad("result is null"))?;
        if out.is_null() {
            return Err(bad("out is null"));
        }
        *out = r.summary;
        Ok(())
    })
}

/// Copies per-element indicators into arrays of length `len`, which must
/// equal the number of elements. Null arrays are skipped.
///
/// # Safety
/// `result` must be a live handle; each non-null array must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pfem_result_element_indicators(
    result: *const PfemResult,
    eta_b: *mut f64,
    eta_e: *mut f64,
    osc: *mut f64,
    len: usize,
) -> PfemStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| bad("result is null"))?;
        if len != r.report.elements.len() {
            return Err(bad(&format!(
                "expected {} elements, got {len}",
                r.report.elements.len()
            )));
        }
        for (i, e) in r.report.elements.iter().enumerate() {
            if !eta_b.is_null() {
                *eta_b.add(i) = e.eta_b;
            }
            if !eta_e.is_null() {
                *eta_e.add(i) = e.eta_e;
            }
            if !osc.is_null() {
                *osc.add(i) = e.osc;
            }
        }
        Ok(())
    })
}

/// Runs a config file as the command-line tool would. A stagnating adaptive
/// run returns [`PfemStatus::Stagnation`].
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pfem_run_config(path: *const c_char) -> PfemStatus {
    let mut stagnated = false;
    let status = guard(|| {
        let path = read_str(path, "path")?;
        let cfg = RunConfig::from_path(path).map_err(lib_err)?;
        stagnated = run(&cfg).map_err(lib_err)? == 4;
        Ok(())
    });
    if status == PfemStatus::Ok && stagnated {
        set_error("adaptive loop stagnated");
        return PfemStatus::Stagnation;
    }
    status
}

/// Numeric value of a status, for bindings without enum support.
#[no_mangle]
pub extern "C" fn pfem_status_code(status: PfemStatus) -> c_int {
    status as c_int
}
