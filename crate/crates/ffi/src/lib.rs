//! C ABI over the iqgan simulator.
//!
//! Every entry point returns an [`IqganStatus`]; results go through out
//! pointers. On failure the thread-local message from
//! [`iqgan_last_error_message`] describes the cause. Handles are opaque and
//! must be released with their matching `_free` function. Panics never cross
//! the boundary; they surface as [`IqganStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use iqgan::autodiff::{gan_loss, LossContext};
use iqgan::circuits::{
    build_encoder, build_generator, hardware_cost, swap_test_p0, Ansatz, EncoderParams,
    GeneratorParams, Scheme,
};
use iqgan::data::PcaModel;
use iqgan::qsim::{fidelity, qubit_zero_probability, Gate, GateKind, StateVector};
use iqgan::{Error, ErrorCategory};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IqganStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad argument or configuration value.
    InvalidArgument = 2,
    /// Unreadable or malformed file.
    DataError = 3,
    NumericError = 4,
    /// An output buffer has the wrong length.
    BufferSize = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IqganGateKind {
    H = 0,
    Rx = 1,
    Ry = 2,
    Rz = 3,
    Cnot = 4,
    Iswap = 5,
    Crx = 6,
    /// Angles (phi, theta, omega).
    Crot = 7,
    /// Targets (control, a, b).
    Cswap = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IqganAnsatz {
    Cnot = 0,
    Iswap = 1,
    Crx = 2,
    Crot = 3,
    NoEntangler = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IqganScheme {
    Qugan21 = 0,
    EqGan = 1,
    Iqgan = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IqganCostReport {
    pub qubits: usize,
    pub one_qubit_gates: usize,
    pub two_qubit_gates: usize,
    pub parameters: usize,
}

/// Opaque statevector handle.
pub struct IqganState(StateVector);

/// Opaque PCA model handle.
pub struct IqganPca(PcaModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

/// Failure carrying the status to return; the message is already recorded.
struct Fail(IqganStatus);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        set_error(e.to_string());
        Fail(match e.category() {
            ErrorCategory::Config => IqganStatus::InvalidArgument,
            ErrorCategory::Data => IqganStatus::DataError,
            ErrorCategory::Numeric => IqganStatus::NumericError,
        })
    }
}

fn fail(status: IqganStatus, msg: impl Into<String>) -> Fail {
    set_error(msg);
    Fail(status)
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> IqganStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => IqganStatus::Ok,
        Ok(Err(Fail(status))) => status,
        Err(_) => {
            set_error("internal panic");
            IqganStatus::Panic
        }
    }
}

fn non_null<T>(ptr: *const T, name: &str) -> Result<(), Fail> {
    if ptr.is_null() {
        Err(fail(IqganStatus::NullPointer, format!("`{name}` is null")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `ptr` must be null only when `len` is 0, otherwise point to `len` readable values.
unsafe fn slice<'a, T>(ptr: *const T, len: usize, name: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(ptr, name)?;
    Ok(std::slice::from_raw_parts(ptr, len))
}

/// # Safety
/// `ptr` must point to `len` writable values when `len > 0`.
unsafe fn slice_mut<'a, T>(ptr: *mut T, len: usize, name: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    non_null(ptr, name)?;
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

/// # Safety
/// `ptr` must be null or a live handle created by this library.
unsafe fn handle<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, Fail> {
    non_null(ptr, name)?;
    Ok(&*ptr)
}

/// # Safety
/// `out` must be null or valid for a write of `T`.
unsafe fn put<T>(out: *mut T, value: T, name: &str) -> Result<(), Fail> {
    non_null(out, name)?;
    out.write(value);
    Ok(())
}

fn ansatz(a: IqganAnsatz) -> Ansatz {
    match a {
        IqganAnsatz::Cnot => Ansatz::Cnot,
        IqganAnsatz::Iswap => Ansatz::Iswap,
        IqganAnsatz::Crx => Ansatz::Crx,
        IqganAnsatz::Crot => Ansatz::Crot,
        IqganAnsatz::NoEntangler => Ansatz::NoEntangler,
    }
}

fn gate_kind(k: IqganGateKind) -> GateKind {
    match k {
        IqganGateKind::H => GateKind::H,
        IqganGateKind::Rx => GateKind::Rx,
        IqganGateKind::Ry => GateKind::Ry,
        IqganGateKind::Rz => GateKind::Rz,
        IqganGateKind::Cnot => GateKind::Cnot,
        IqganGateKind::Iswap => GateKind::Iswap,
        IqganGateKind::Crx => GateKind::Crx,
        IqganGateKind::Crot => GateKind::Crot,
        IqganGateKind::Cswap => GateKind::Cswap,
    }
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn iqgan_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Static, NUL-terminated library version.
#[no_mangle]
pub extern "C" fn iqgan_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Allocates |0…0⟩ on `num_qubits` qubits.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn iqgan_state_new(
    num_qubits: usize,
    out: *mut *mut IqganState,
) -> IqganStatus {
    guard(|| {
        non_null(out, "out")?;
        let state = StateVector::zero(num_qubits)?;
        put(out, Box::into_raw(Box::new(IqganState(state))), "out")
    })
}

/// # Safety
/// `state` must be null or a handle from [`iqgan_state_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn iqgan_state_free(state: *mut IqganState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn iqgan_state_num_qubits(
    state: *const IqganState,
    out: *mut usize,
) -> IqganStatus {
    guard(|| put(out, handle(state, "state")?.0.num_qubits(), "out"))
}

/// Applies one gate in place.
///
/// # Safety
/// `state` must be a live handle; `targets` must hold `num_targets` values
/// and `params` `num_params` values.
#[no_mangle]
pub unsafe extern "C" fn iqgan_state_apply_gate(
    state: *mut IqganState,
    kind: IqganGateKind,
    targets: *const usize,
    num_targets: usize,
    params: *const f64,
    num_params: usize,
) -> IqganStatus {
    guard(|| {
        non_null(state, "state")?;
        let targets = slice(targets, num_targets, "targets")?;
        let params = slice(params, num_params, "params")?;
        let gate = Gate::new(gate_kind(kind), params.to_vec(), targets.to_vec())?;
        (*state).0.apply(&gate)?;
        Ok(())
    })
}

/// Copies the amplitudes into `re` and `im`, each of length `len = 2^n`.
///
/// # Safety
/// `state` must be a live handle; `re` and `im` must hold `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn iqgan_state_amplitudes(
    state: *const IqganState,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> IqganStatus {
    guard(|| {
        let amps = handle(state, "state")?.0.amplitudes();
        if len != amps.len() {
            return Err(fail(
                IqganStatus::BufferSize,
                format!("buffers hold {len} values, state has {}", amps.len()),
            ));
        }
        let re = slice_mut(re, len, "re")?;
        let im = slice_mut(im, len, "im")?;
        for (i, a) in amps.iter().enumerate() {
            re[i] = a.re;
            im[i] = a.im;
        }
        Ok(())
    })
}

/// Probability of reading 0 on `qubit`.
///
/// # Safety
/// `state` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn iqgan_state_zero_probability(
    state: *const IqganState,
    qubit: usize,
    out: *mut f64,
) -> IqganStatus {
    guard(|| {
        put(
            out,
            qubit_zero_probability(&handle(state, "state")?.0, qubit)?,
            "out",
        )
    })
}

/// `|⟨a|b⟩|²`.
///
/// # Safety
/// `a` and `b` must be live handles; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn iqgan_fidelity(
    a: *const IqganState,
    b: *const IqganState,
    out: *mut f64,
) -> IqganStatus {
    guard(|| {
        put(
            out,
            fidelity(&handle(a, "a")?.0, &handle(b, "b")?.0)?,
            "out",
        )
    })
}

/// Closed-form resource counts of a GAN scheme.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn iqgan_hardware_cost(
    scheme: IqganScheme,
    n: usize,
    b: usize,
    out: *mut IqganCostReport,
) -> IqganStatus {
    guard(|| {
        let scheme = match scheme {
            IqganScheme::Qugan21 => Scheme::Qugan21,
            IqganScheme::EqGan => Scheme::EqGan,
            IqganScheme::Iqgan => Scheme::Iqgan,
        };
        let r = hardware_cost(scheme, n, b)?;
        let report = IqganCostReport {
            qubits: r.qubits,
            one_qubit_gates: r.one_qubit_gates,
            two_qubit_gates: r.two_qubit_gates,
            parameters: r.parameters,
        };
        put(out, report, "out")
    })
}

/// Ancilla zero-probability of the SWAP test between the trainable encoding
/// of `x` (scales `theta_s`) and the generator output.
///
/// # Safety
/// `x` and `theta_s` must hold `n` values, `theta_g` `theta_g_len` values;
/// `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn iqgan_swap_test_p0(
    x: *const f64,
    theta_s: *const f64,
    n: usize,
    kind: IqganAnsatz,
    blocks: usize,
    theta_g: *const f64,
    theta_g_len: usize,
    out: *mut f64,
) -> IqganStatus {
    guard(|| {
        let encoder = EncoderParams::trainable(slice(theta_s, n, "theta_s")?.to_vec())?;
        let generator = GeneratorParams::new(
            ansatz(kind),
            n,
            blocks,
            slice(theta_g, theta_g_len, "theta_g")?.to_vec(),
        )?;
        let enc = build_encoder(slice(x, n, "x")?, &encoder)?;
        put(
            out,
            swap_test_p0(&enc, &build_generator(&generator)?, n)?,
            "out",
        )
    })
}

/// Exact fidelity loss over a row-major `batch_len × n` batch.
///
/// # Safety
/// `batch` must hold `batch_len·n` values, `theta_s` `n` values, `theta_g`
/// `theta_g_len` values; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn iqgan_gan_loss(
    batch: *const f64,
    batch_len: usize,
    n: usize,
    theta_s: *const f64,
    kind: IqganAnsatz,
    blocks: usize,
    theta_g: *const f64,
    theta_g_len: usize,
    out: *mut f64,
) -> IqganStatus {
    guard(|| {
        let total = batch_len
            .checked_mul(n)
            .ok_or_else(|| fail(IqganStatus::InvalidArgument, "batch size overflows"))?;
        let rows: Vec<Vec<f64>> = if n == 0 {
            Vec::new()
        } else {
            slice(batch, total, "batch")?
                .chunks(n)
                .map(<[f64]>::to_vec)
                .collect()
        };
        let encoder = EncoderParams::trainable(slice(theta_s, n, "theta_s")?.to_vec())?;
        let generator = GeneratorParams::new(
            ansatz(kind),
            n,
            blocks,
            slice(theta_g, theta_g_len, "theta_g")?.to_vec(),
        )?;
        put(
            out,
            gan_loss(&LossContext::new(&rows, encoder, generator))?,
            "out",
        )
    })
}

/// Loads a PCA model written by the `iqgan` tool.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn iqgan_pca_load(
    path: *const c_char,
    out: *mut *mut IqganPca,
) -> IqganStatus {
    guard(|| {
        non_null(path, "path")?;
        non_null(out, "out")?;
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| fail(IqganStatus::InvalidArgument, "path is not UTF-8"))?;
        let model = PcaModel::load(path)?;
        put(out, Box::into_raw(Box::new(IqganPca(model))), "out")
    })
}

/// # Safety
/// `pca` must be null or a handle from [`iqgan_pca_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn iqgan_pca_free(pca: *mut IqganPca) {
    if !pca.is_null() {
        drop(Box::from_raw(pca));
    }
}

/// Input dimension and number of components.
///
/// # Safety
/// `pca` must be a live handle; `dim` and `k` valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn iqgan_pca_dims(
    pca: *const IqganPca,
    dim: *mut usize,
    k: *mut usize,
) -> IqganStatus {
    guard(|| {
        let m = &handle(pca, "pca")?.0;
        put(dim, m.dim(), "dim")?;
        put(k, m.k(), "k")
    })
}

/// Projects `x` (length `dim`) to `out` (length `k`), clamped to [−1, 1].
///
/// # Safety
/// `pca` must be a live handle; buffers must hold the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn iqgan_pca_project(
    pca: *const IqganPca,
    x: *const f64,
    x_len: usize,
    out: *mut f64,
    out_len: usize,
) -> IqganStatus {
    guard(|| {
        let m = &handle(pca, "pca")?.0;
        let v = m.project(slice(x, x_len, "x")?)?;
        copy_out(&v, out, out_len)
    })
}

/// Maps `k` coordinates back to a `dim`-pixel image (unclamped).
///
/// # Safety
/// `pca` must be a live handle; buffers must hold the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn iqgan_pca_reconstruct(
    pca: *const IqganPca,
    v: *const f64,
    v_len: usize,
    out: *mut f64,
    out_len: usize,
) -> IqganStatus {
    guard(|| {
        let m = &handle(pca, "pca")?.0;
        let img = m.reconstruct(slice(v, v_len, "v")?)?;
        copy_out(&img, out, out_len)
    })
}

/// # Safety
/// `out` must hold `out_len` writable values.
unsafe fn copy_out(values: &[f64], out: *mut f64, out_len: usize) -> Result<(), Fail> {
    if out_len != values.len() {
        return Err(fail(
            IqganStatus::BufferSize,
            format!("output holds {out_len} values, need {}", values.len()),
        ));
    }
    slice_mut(out, out_len, "out")?.copy_from_slice(values);
    Ok(())
}
