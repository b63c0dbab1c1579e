//! C ABI over `tbaudit`.
//!
//! Objects are opaque heap handles created by `tb_*_new`/`tb_*_from_*`
//! constructors and released with the matching `tb_*_free`. Every fallible
//! call returns a [`TbStatus`]; on failure a message is available from
//! [`tb_last_error`] on the same thread until the next failing call.
//! Strings returned through `char **` are owned by the caller and must be
//! released with [`tb_string_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tbaudit::cipher::{audit, AuditOptions, RoundKeyTuple, Status, TbCipher as Cipher, UniformityRoute};
use tbaudit::gf2::BrickLayout;
use tbaudit::mixing::{JRange, LayerFamily, MixingLayer};
use tbaudit::report::ReportDocument;
use tbaudit::sbox::SBox;
use tbaudit::specfile::{self, SpecErrorKind};
use tbaudit::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Malformed or inconsistent cipher/layer description.
    SpecError = 3,
    Singular = 4,
    NotBijective = 5,
    /// A search or enumeration was refused as too large.
    CapExceeded = 6,
    Panic = 7,
}

/// Outcome of an audit.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TbVerdict {
    Secure = 0,
    Vulnerable = 1,
    Inconclusive = 2,
}

/// Single-brick measurements.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TbSBoxMetrics {
    pub m: u32,
    /// Differential uniformity δ.
    pub delta: u32,
    /// `ceil(log2 δ)`.
    pub r: u32,
    pub min_derivative_image: u32,
    pub nonlinearity: u32,
    pub has_linear_component: bool,
    pub anti_invariance_order: u32,
    /// False when `anti_invariance_order` is only a lower bound.
    pub anti_invariance_exact: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TbAuditOptions {
    /// Accept bricks through the derivative-image condition as well.
    pub condition1prime: bool,
    /// Let the full layer product break a wall.
    pub relaxed_j: bool,
    /// Run the exhaustive chain search up to this dimension; 0 disables it.
    pub exhaustive_cap: u32,
}

pub struct TbSBox {
    inner: SBox,
}

pub struct TbLayer {
    inner: MixingLayer,
}

pub struct TbCipher {
    inner: Cipher,
}

struct Failure(TbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Singular { .. } => TbStatus::Singular,
            Error::NotBijective(_) => TbStatus::NotBijective,
            Error::CapExceeded { .. } => TbStatus::CapExceeded,
            _ => TbStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<specfile::SpecError> for Failure {
    fn from(e: specfile::SpecError) -> Self {
        let status = match e.kind {
            SpecErrorKind::Singular => TbStatus::Singular,
            _ => TbStatus::SpecError,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(TbStatus::InvalidArgument, msg.into())
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TbStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TbStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(TbStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(TbStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(TbStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure(TbStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

fn c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| invalid("output contains a NUL byte"))
}

/// Message of the last failing call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn tb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------------------
// S-boxes

/// Brick from a lookup table of `len = 2^m` entries.
///
/// # Safety
/// `table` must point to `len` readable entries; the out-pointer must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_sbox_new(table: *const u16, len: usize, out_box: *mut *mut TbSBox) -> TbStatus {
    guard(|| {
        let slot = out(out_box, "out")?;
        let t = slice(table, len, "table")?;
        *slot = boxed(TbSBox { inner: SBox::new(t.to_vec())? });
        Ok(())
    })
}

/// Builtin brick: `"inverse_gf2m"` (2 <= m <= 8), `"present"` (m = 4) or
/// `"identity"`.
///
/// # Safety
/// `name` must be a NUL-terminated string; the out-pointer must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_sbox_builtin(name: *const c_char, m: u32, out_box: *mut *mut TbSBox) -> TbStatus {
    guard(|| {
        let slot = out(out_box, "out")?;
        let m = m as usize;
        let inner = match text(name, "name")? {
            "inverse_gf2m" => SBox::inverse_gf2m(m)?,
            "present" if m == 4 => SBox::present(),
            "present" => return Err(invalid("present is a 4-bit brick")),
            "identity" => SBox::identity(m)?,
            other => return Err(invalid(format!("unknown brick {other:?}"))),
        };
        *slot = boxed(TbSBox { inner });
        Ok(())
    })
}

/// # Safety
/// `s` must come from a `tb_sbox_*` constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn tb_sbox_free(s: *mut TbSBox) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle; `metrics` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_sbox_analyze(s: *const TbSBox, metrics: *mut TbSBoxMetrics) -> TbStatus {
    guard(|| {
        let f = &deref(s, "sbox")?.inner;
        let slot = out(metrics, "metrics")?;
        let rep = f.report()?;
        *slot = TbSBoxMetrics {
            m: rep.m as u32,
            delta: rep.delta,
            r: rep.uniformity_exponent() as u32,
            min_derivative_image: rep.min_derivative_image as u32,
            nonlinearity: rep.nonlinearity,
            has_linear_component: rep.has_linear_component,
            anti_invariance_order: rep.anti_invariance_order as u32,
            anti_invariance_exact: rep.anti_invariance_exact,
        };
        Ok(())
    })
}

/// Full analysis as a JSON report document.
///
/// # Safety
/// `s` must be a live handle; `json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_sbox_report_json(s: *const TbSBox, json: *mut *mut c_char) -> TbStatus {
    guard(|| {
        let f = &deref(s, "sbox")?.inner;
        let slot = out(json, "json")?;
        let doc = ReportDocument::for_sbox(f, f.report()?, None, UniformityRoute::Delta);
        *slot = c_string(doc.to_json())?;
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Mixing layers

/// Builtin layer: `"rotation"`, `"identity"`, `"aes_sr_mc"` (m = 8, b = 16)
/// or `"butterfly"` (b = 2).
///
/// # Safety
/// `name` must be a NUL-terminated string; the out-pointer must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_layer_builtin(
    name: *const c_char,
    m: u32,
    b: u32,
    out_layer: *mut *mut TbLayer,
) -> TbStatus {
    guard(|| {
        let slot = out(out_layer, "out")?;
        let layout = BrickLayout::new(m as usize, b as usize)?;
        let inner = match text(name, "name")? {
            "rotation" => MixingLayer::rotation(layout),
            "identity" => MixingLayer::identity(layout),
            "aes_sr_mc" if (m, b) == (8, 16) => MixingLayer::aes_sr_mc(),
            "butterfly" if b == 2 => MixingLayer::two_brick_butterfly(m as usize)?,
            other => return Err(invalid(format!("no builtin layer {other:?} for m={m}, b={b}"))),
        };
        *slot = boxed(TbLayer { inner });
        Ok(())
    })
}

/// Layer from a JSON layer file (`{"layout": .., "layer": ..}`).
///
/// # Safety
/// `json` must be a NUL-terminated string; the out-pointer must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_layer_from_json(json: *const c_char, out_layer: *mut *mut TbLayer) -> TbStatus {
    guard(|| {
        let slot = out(out_layer, "out")?;
        let inner = specfile::parse_layer_file(text(json, "json")?)?;
        *slot = boxed(TbLayer { inner });
        Ok(())
    })
}

/// # Safety
/// `l` must come from a `tb_layer_*` constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn tb_layer_free(l: *mut TbLayer) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// No proper wall is mapped onto itself.
///
/// # Safety
/// `l` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_layer_is_proper(l: *const TbLayer, result: *mut bool) -> TbStatus {
    guard(|| {
        let layer = &deref(l, "layer")?.inner;
        *out(result, "result")? = layer.is_proper().holds;
        Ok(())
    })
}

/// No proper wall is mapped onto any wall.
///
/// # Safety
/// `l` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_layer_is_strongly_proper(l: *const TbLayer, result: *mut bool) -> TbStatus {
    guard(|| {
        let layer = &deref(l, "layer")?.inner;
        *out(result, "result")? = layer.is_strongly_proper().holds;
        Ok(())
    })
}

/// Strong properness of `copies` repetitions of the layer.
///
/// # Safety
/// `l` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_layer_family_strongly_proper(
    l: *const TbLayer,
    copies: u32,
    relaxed_j: bool,
    result: *mut bool,
) -> TbStatus {
    guard(|| {
        let layer = &deref(l, "layer")?.inner;
        let slot = out(result, "result")?;
        let family = LayerFamily::repeated(layer.clone(), copies as usize)?;
        let range = if relaxed_j { JRange::Relaxed } else { JRange::Strict };
        *slot = family.is_strongly_proper(range).holds;
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Ciphers

/// Cipher from a JSON cipher description.
///
/// # Safety
/// `json` must be a NUL-terminated string; the out-pointer must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_cipher_from_json(json: *const c_char, out_cipher: *mut *mut TbCipher) -> TbStatus {
    guard(|| {
        let slot = out(out_cipher, "out")?;
        let spec = specfile::parse_cipher_spec(text(json, "json")?)?;
        *slot = boxed(TbCipher { inner: spec.cipher });
        Ok(())
    })
}

/// `rounds` rounds of GF(2^m) inversion bricks and brick rotation.
///
/// # Safety
/// the out-pointer must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_cipher_rotation(m: u32, b: u32, rounds: u32, out_cipher: *mut *mut TbCipher) -> TbStatus {
    guard(|| {
        let slot = out(out_cipher, "out")?;
        let inner = Cipher::rotation(m as usize, b as usize, rounds as usize)?;
        *slot = boxed(TbCipher { inner });
        Ok(())
    })
}

/// # Safety
/// `c` must come from a `tb_cipher_*` constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn tb_cipher_free(c: *mut TbCipher) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Block size in bits, or 0 for a null handle.
///
/// # Safety
/// `c` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tb_cipher_block_bits(c: *const TbCipher) -> usize {
    c.as_ref().map_or(0, |c| c.inner.d())
}

/// Number of rounds, or 0 for a null handle.
///
/// # Safety
/// `c` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tb_cipher_rounds(c: *const TbCipher) -> usize {
    c.as_ref().map_or(0, |c| c.inner.rounds().len())
}

/// Bytes per block: `ceil(block_bits / 8)`, little-endian bit order.
fn block_bytes(d: usize) -> usize {
    d.div_ceil(8)
}

fn word_from(bytes: &[u8], d: usize) -> Result<u128, Failure> {
    let w = bytes
        .iter()
        .enumerate()
        .fold(0u128, |acc, (i, &b)| acc | (b as u128) << (8 * i));
    if d < 128 && w >> d != 0 {
        return Err(invalid(format!("value has bits beyond the {d}-bit block")));
    }
    Ok(w)
}

/// Encrypt one block. Blocks are `ceil(d / 8)` bytes, least significant
/// byte first; `keys` holds one such block per round.
///
/// # Safety
/// `keys` must hold `rounds * block_len` bytes, `input` and `output`
/// `block_len` bytes each.
#[no_mangle]
pub unsafe extern "C" fn tb_cipher_encrypt(
    c: *const TbCipher,
    keys: *const u8,
    keys_len: usize,
    input: *const u8,
    output: *mut u8,
    block_len: usize,
) -> TbStatus {
    guard(|| {
        let cipher = &deref(c, "cipher")?.inner;
        let d = cipher.d();
        let n = block_bytes(d);
        if block_len != n {
            return Err(invalid(format!("block_len is {block_len}, expected {n}")));
        }
        let rounds = cipher.rounds().len();
        if keys_len != rounds * n {
            return Err(invalid(format!("keys_len is {keys_len}, expected {}", rounds * n)));
        }
        if output.is_null() {
            return Err(Failure(TbStatus::NullPointer, "output is null".into()));
        }
        let ks = slice(keys, keys_len, "keys")?
            .chunks(n)
            .map(|k| word_from(k, d))
            .collect::<Result<Vec<_>, _>>()?;
        let x = word_from(slice(input, n, "input")?, d)?;
        let y = cipher.encrypt_word(RoundKeyTuple::from_words(ks).words(), x);
        let dst = std::slice::from_raw_parts_mut(output, n);
        for (i, b) in dst.iter_mut().enumerate() {
            *b = (y >> (8 * i)) as u8;
        }
        Ok(())
    })
}

/// Run the audit. `options` may be null for the defaults. On success
/// `verdict` holds the status and, if `json` is non-null, `*json` the
/// report document.
///
/// # Safety
/// Pointers must be live or null as documented.
#[no_mangle]
pub unsafe extern "C" fn tb_cipher_audit(
    c: *const TbCipher,
    options: *const TbAuditOptions,
    verdict: *mut TbVerdict,
    json: *mut *mut c_char,
) -> TbStatus {
    guard(|| {
        let cipher = &deref(c, "cipher")?.inner;
        let slot = out(verdict, "verdict")?;
        let o = options.as_ref().copied().unwrap_or_default();
        let opts = AuditOptions {
            route: if o.condition1prime {
                UniformityRoute::Condition1Prime
            } else {
                UniformityRoute::Delta
            },
            j_range: if o.relaxed_j { JRange::Relaxed } else { JRange::Strict },
            exhaustive_cap: (o.exhaustive_cap > 0).then_some(o.exhaustive_cap as usize),
            ..AuditOptions::default()
        };
        let v = audit(cipher, &opts)?;
        *slot = match v.status {
            Status::Secure => TbVerdict::Secure,
            Status::Vulnerable => TbVerdict::Vulnerable,
            Status::Inconclusive => TbVerdict::Inconclusive,
        };
        if let Some(dst) = json.as_mut() {
            *dst = ptr::null_mut();
            *dst = c_string(ReportDocument::for_audit(cipher, v, &opts).to_json())?;
        }
        Ok(())
    })
}
