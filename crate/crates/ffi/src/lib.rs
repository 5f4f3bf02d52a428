//! C ABI over the ktaa library.
//!
//! All state lives behind an opaque `KtaaSystem` handle that holds the public
//! parameters, the GM, every AP and every user in one process. Functions
//! return a `KtaaStatus`; on failure `ktaa_last_error` describes it.
//! Strings going in are NUL-terminated UTF-8; strings coming out are owned by
//! the caller and released with `ktaa_string_free`.
//!
//! The bundled proof backend is not zero-knowledge.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ktaa::estimator::CostReport;
use ktaa::ktaa_protocol::{
    authenticate, grant, join, over_authenticate, public_tracing, ApState, AuthOutcome, GroupManager, PublicParams,
    Traced, UserState,
};
use ktaa::rng::{derive, Rng};
use ktaa::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KtaaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    NotFound = 4,
    /// A proof or credential was rejected.
    Rejected = 5,
    LimitReached = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KtaaAuthOutcome {
    Accepted = 0,
    InvalidProof = 1,
    DuplicateTag = 2,
}

/// Headline numbers of the cost estimate.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KtaaEstimate {
    pub witness_n: f64,
    pub m_size_l: f64,
    pub pi1_bytes: f64,
    pub comparison_l: f64,
    pub pi2_bytes: f64,
    pub ratio: f64,
}

/// Opaque system handle.
pub struct KtaaSystem {
    pp: PublicParams,
    gm: GroupManager,
    aps: BTreeMap<String, ApState>,
    users: BTreeMap<String, UserState>,
    rng: Rng,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(KtaaStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::ProofRejected | Error::DuplicateKey | Error::InvalidWitness => KtaaStatus::Rejected,
            Error::LimitReached => KtaaStatus::LimitReached,
            Error::UnknownUser(_) | Error::NoCredential(_) | Error::NoAccess(_) | Error::NotMember(_) => {
                KtaaStatus::NotFound
            }
            _ => KtaaStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> KtaaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            KtaaStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside ktaa");
            KtaaStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(KtaaStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(KtaaStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn system<'a>(sys: *mut KtaaSystem) -> Result<&'a mut KtaaSystem, Fail> {
    sys.as_mut().ok_or_else(|| Fail(KtaaStatus::NullPointer, "system handle is null".into()))
}

fn missing(kind: &str, id: &str) -> Fail {
    Fail(KtaaStatus::NotFound, format!("unknown {kind} `{id}`"))
}

/// Message of the last failure on this thread, or an empty string. The
/// pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ktaa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Create a system for a toy preset (`toy-27`, `toy-125`).
///
/// # Safety
/// `preset` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ktaa_system_new(preset: *const c_char, seed: u64, out: *mut *mut KtaaSystem) -> KtaaStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail(KtaaStatus::NullPointer, "out is null".into()));
        }
        *out = ptr::null_mut();
        let pp = PublicParams::preset(text(preset, "preset")?, seed)?;
        let mut rng = derive(seed, "ffi");
        let gm = GroupManager::setup(&pp, &mut rng);
        let sys = KtaaSystem { pp, gm, aps: BTreeMap::new(), users: BTreeMap::new(), rng };
        *out = Box::into_raw(Box::new(sys));
        Ok(())
    })
}

/// # Safety
/// `sys` must come from `ktaa_system_new` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ktaa_system_free(sys: *mut KtaaSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Register an access provider allowing `k` authentications per user.
///
/// # Safety
/// `sys` must be a live handle and `ap` a valid C string.
#[no_mangle]
pub unsafe extern "C" fn ktaa_ap_setup(sys: *mut KtaaSystem, ap: *const c_char, k: usize) -> KtaaStatus {
    guard(|| {
        let s = system(sys)?;
        let id = text(ap, "ap")?;
        if s.aps.contains_key(id) {
            return Err(Fail(KtaaStatus::InvalidArgument, format!("ap `{id}` already exists")));
        }
        let st = ApState::setup(&s.pp, id, k, &mut s.rng)?;
        s.aps.insert(id.to_string(), st);
        Ok(())
    })
}

/// Create a user and run Join; writes the membership tag to `tau_out` when non-null.
///
/// # Safety
/// `sys` must be a live handle, `user` a valid C string, `tau_out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ktaa_join(sys: *mut KtaaSystem, user: *const c_char, tau_out: *mut u64) -> KtaaStatus {
    guard(|| {
        let s = system(sys)?;
        let id = text(user, "user")?;
        if s.users.contains_key(id) {
            return Err(Fail(KtaaStatus::InvalidArgument, format!("user `{id}` already exists")));
        }
        let mut u = UserState::setup(&s.pp, id, &mut s.rng)?;
        join(&s.pp, &mut s.gm, &mut u, &mut s.rng)?;
        if !tau_out.is_null() {
            *tau_out = u.tau()?;
        }
        s.users.insert(id.to_string(), u);
        Ok(())
    })
}

unsafe fn pair<'a>(
    s: &'a mut KtaaSystem,
    user: *const c_char,
    ap: *const c_char,
) -> Result<(&'a mut UserState, &'a mut ApState), Fail> {
    let uid = text(user, "user")?;
    let aid = text(ap, "ap")?;
    let u = s.users.get_mut(uid).ok_or_else(|| missing("user", uid))?;
    let a = s.aps.get_mut(aid).ok_or_else(|| missing("ap", aid))?;
    Ok((u, a))
}

/// # Safety
/// `sys` must be a live handle; `user` and `ap` valid C strings.
#[no_mangle]
pub unsafe extern "C" fn ktaa_grant(sys: *mut KtaaSystem, user: *const c_char, ap: *const c_char) -> KtaaStatus {
    guard(|| {
        let (u, a) = pair(system(sys)?, user, ap)?;
        grant(a, u)?;
        Ok(())
    })
}

/// # Safety
/// `sys` must be a live handle; `user` and `ap` valid C strings.
#[no_mangle]
pub unsafe extern "C" fn ktaa_revoke(sys: *mut KtaaSystem, user: *const c_char, ap: *const c_char) -> KtaaStatus {
    guard(|| {
        let (u, a) = pair(system(sys)?, user, ap)?;
        a.revoke(u.tau()?)?;
        Ok(())
    })
}

/// One authentication. With `over` the user replays its last tag base past
/// the limit, which the AP logs and tracing then catches.
///
/// # Safety
/// `sys` must be a live handle; `user` and `ap` valid C strings; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ktaa_authenticate(
    sys: *mut KtaaSystem,
    user: *const c_char,
    ap: *const c_char,
    over: bool,
    out: *mut KtaaAuthOutcome,
) -> KtaaStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail(KtaaStatus::NullPointer, "out is null".into()));
        }
        let s = system(sys)?;
        let (pp, gm_pk, rng) = (&s.pp, &s.gm.pk, &mut s.rng);
        let uid = text(user, "user")?;
        let aid = text(ap, "ap")?;
        let u = s.users.get_mut(uid).ok_or_else(|| missing("user", uid))?;
        let a = s.aps.get_mut(aid).ok_or_else(|| missing("ap", aid))?;
        let r = if over { over_authenticate(pp, gm_pk, a, u, rng)? } else { authenticate(pp, gm_pk, a, u, rng)? };
        *out = match r {
            AuthOutcome::Accepted => KtaaAuthOutcome::Accepted,
            AuthOutcome::InvalidProof => KtaaAuthOutcome::InvalidProof,
            AuthOutcome::DuplicateTag => KtaaAuthOutcome::DuplicateTag,
        };
        Ok(())
    })
}

/// Public tracing over an AP's log. Writes a newly allocated, comma-separated
/// list of traced identities (`gm` for an off-list key); empty when nobody
/// is traced.
///
/// # Safety
/// `sys` must be a live handle; `ap` a valid C string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ktaa_trace(sys: *mut KtaaSystem, ap: *const c_char, out: *mut *mut c_char) -> KtaaStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail(KtaaStatus::NullPointer, "out is null".into()));
        }
        *out = ptr::null_mut();
        let s = system(sys)?;
        let aid = text(ap, "ap")?;
        let a = s.aps.get(aid).ok_or_else(|| missing("ap", aid))?;
        let names: Vec<String> = public_tracing(s.pp.params.p(), &s.gm.list, &a.log)
            .into_iter()
            .map(|t| match t {
                Traced::User(id) => id,
                Traced::Gm => "gm".into(),
            })
            .collect();
        let c = CString::new(names.join(",")).map_err(|_| Fail(KtaaStatus::InvalidArgument, "NUL in id".into()))?;
        *out = c.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ktaa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Cost estimate at security level 80 or 128.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ktaa_estimate(level: u32, out: *mut KtaaEstimate) -> KtaaStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail(KtaaStatus::NullPointer, "out is null".into()));
        }
        let r = CostReport::for_level(level)?;
        *out = KtaaEstimate {
            witness_n: r.aggregate.n,
            m_size_l: r.aggregate.l,
            pi1_bytes: r.pi1_bytes(),
            comparison_l: r.comparison_l,
            pi2_bytes: r.pi2_bytes(),
            ratio: r.ratio,
        };
        Ok(())
    })
}
