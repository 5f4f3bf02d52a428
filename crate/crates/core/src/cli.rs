//! The `ktaa` command line: store-backed protocol steps, a scripted demo
//! built from the same steps, and the cost estimate table.
//!
//! Store layout under `--store`:
//!
//! ```text
//! store.bin            preset name, seed, step counter
//! gm.bin               GM keys and free tags
//! list.bin list.txt    LIST
//! users/<id>.bin       user state
//! ap/<id>/state.bin    AP keys, accumulator, challenge pool
//! ap/<id>/arc.bin      ARC        (+ arc.txt)
//! ap/<id>/log.bin      LOG        (+ log.txt)
//! .lock                held while a command runs
//! ```
//!
//! Exit codes: 0 success, 2 verification failure, 3 usage error, 4 store
//! corruption or I/O failure.

use std::ffi::OsString;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::Error;
use crate::estimator::CostReport;
use crate::ktaa_protocol::{
    public_tracing, ApState, ArcEntry, AuthOutcome, AuthRecord, GroupManager, ListEntry, PublicParams, Traced, UserState,
};
use crate::lattice_core::{Decode, Encode, Reader, Writer};
use crate::rng::derive;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_STORE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "ktaa", version, about = "Dynamic k-times anonymous authentication over lattices")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Parameter preset; read back from the store after keygen.
    #[arg(long, global = true, default_value = "toy-27")]
    pub profile: String,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true, default_value = "ktaa-store")]
    pub store: PathBuf,
    /// One JSON object per output line.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Create the store and the GM, or with --ap add an access provider.
    Keygen {
        #[arg(long)]
        ap: Option<String>,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Set up a user and run Join with the GM.
    Join {
        #[arg(long)]
        user: String,
    },
    Grant {
        #[arg(long)]
        user: String,
        #[arg(long)]
        ap: String,
    },
    Revoke {
        #[arg(long)]
        user: String,
        #[arg(long)]
        ap: String,
    },
    /// One authentication; --over reuses the last tag base past the limit.
    Auth {
        #[arg(long)]
        user: String,
        #[arg(long)]
        ap: String,
        #[arg(long)]
        over: bool,
    },
    /// Public tracing over an AP's log.
    Trace {
        #[arg(long)]
        ap: String,
    },
    /// Re-verify every record of an AP's log.
    Replay {
        #[arg(long)]
        ap: String,
    },
    /// Print a text dump of LIST, or of an AP's log or ARC.
    Show {
        #[arg(value_enum)]
        what: ShowWhat,
        #[arg(long)]
        ap: Option<String>,
    },
    /// Run keygen, join, grant, k authentications each, an over-authentication and trace.
    Demo {
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Skip the over-authentication; the trace must then be empty.
        #[arg(long)]
        clean: bool,
    },
    /// Proof-size estimates at a security level.
    Estimate {
        #[arg(long, default_value_t = 80, value_parser = parse_level)]
        level: u32,
        #[arg(long)]
        csv: bool,
    },
}

fn parse_level(s: &str) -> Result<u32, String> {
    match s {
        "80" => Ok(80),
        "128" => Ok(128),
        _ => Err("level must be 80 or 128".into()),
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShowWhat {
    List,
    Log,
    Arc,
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub msg: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, msg: msg.into() }
    }
    fn verify(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_VERIFY, msg: msg.into() }
    }
    fn store(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_STORE, msg: msg.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Decode(_) | Error::Io(_) => EXIT_STORE,
            Error::ProofRejected | Error::LimitReached | Error::DuplicateKey | Error::InvalidWitness => EXIT_VERIFY,
            _ => EXIT_USAGE,
        };
        CliError { code, msg: e.to_string() }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::store(format!("{}: {e}", path.display()))
}

/// One line of command output.
#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    pub text: String,
    pub json: Value,
}

impl Line {
    fn new(text: String, json: Value) -> Self {
        Line { text, json }
    }

    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            self.json.to_string()
        } else {
            self.text.clone()
        }
    }
}

fn check_name(kind: &str, id: &str) -> Result<(), CliError> {
    if id.is_empty() || id.len() > 64 || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
        return Err(CliError::usage(format!("{kind} id `{id}` must be 1-64 characters of [A-Za-z0-9_-]")));
    }
    Ok(())
}

/// Advisory lock held for the lifetime of the value.
struct Lock(PathBuf);

impl Lock {
    fn take(dir: &Path) -> Result<Lock, CliError> {
        let path = dir.join(".lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(Lock(path))
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(CliError::usage(format!("store {} is locked by another command", dir.display())))
            }
            Err(e) => Err(io_err(&path, e)),
        }
    }
}

impl Drop for Lock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

/// An open store. Mutations are written back by [`Store::save_*`].
pub struct Store {
    dir: PathBuf,
    pub pp: PublicParams,
    pub step: u64,
    _lock: Lock,
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| io_err(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

fn decode_file<T: Decode>(path: &Path) -> Result<T, CliError> {
    T::from_bytes(&read(path)?).map_err(|e| CliError::store(format!("{}: {e}", path.display())))
}

fn encode_seq<T: Encode>(v: &[T]) -> Vec<u8> {
    let mut w = Writer::new();
    w.seq(v);
    w.into_bytes()
}

fn decode_seq<T: Decode>(path: &Path) -> Result<Vec<T>, CliError> {
    let bytes = read(path)?;
    let mut r = Reader::new(&bytes);
    let v = r.seq().and_then(|v| r.finish().map(|_| v));
    v.map_err(|e| CliError::store(format!("{}: {e}", path.display())))
}

impl Store {
    /// Create a fresh store; the directory must not hold one already.
    pub fn create(dir: &Path, profile: &str, seed: u64) -> Result<Store, CliError> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let lock = Lock::take(dir)?;
        if dir.join("store.bin").exists() {
            return Err(CliError::usage(format!("{} already holds a store", dir.display())));
        }
        let pp = PublicParams::preset(profile, seed)?;
        let store = Store { dir: dir.to_path_buf(), pp, step: 0, _lock: lock };
        store.save_meta()?;
        Ok(store)
    }

    pub fn open(dir: &Path) -> Result<Store, CliError> {
        if !dir.join("store.bin").exists() {
            return Err(CliError::usage(format!("no store at {}; run keygen first", dir.display())));
        }
        let lock = Lock::take(dir)?;
        let bytes = read(&dir.join("store.bin"))?;
        let mut r = Reader::new(&bytes);
        let parsed = (|| {
            let pp: PublicParams = r.get()?;
            let step = r.u64()?;
            r.finish()?;
            Ok::<_, Error>((pp, step))
        })();
        let (pp, step) = parsed.map_err(|e| CliError::store(format!("store.bin: {e}")))?;
        Ok(Store { dir: dir.to_path_buf(), pp, step, _lock: lock })
    }

    fn save_meta(&self) -> Result<(), CliError> {
        let mut w = Writer::new();
        w.put(&self.pp);
        w.u64(self.step);
        write(&self.dir.join("store.bin"), &w.into_bytes())
    }

    /// Randomness for the next mutating step.
    fn next_rng(&mut self) -> Result<crate::rng::Rng, CliError> {
        self.step += 1;
        self.save_meta()?;
        Ok(derive(self.pp.seed, &format!("cli-step-{}", self.step)))
    }

    pub fn load_gm(&self) -> Result<GroupManager, CliError> {
        let mut gm: GroupManager = decode_file(&self.dir.join("gm.bin"))?;
        gm.list = decode_seq(&self.dir.join("list.bin"))?;
        Ok(gm)
    }

    pub fn save_gm(&self, gm: &GroupManager) -> Result<(), CliError> {
        let mut bare = gm.clone();
        let list = std::mem::take(&mut bare.list);
        write(&self.dir.join("gm.bin"), &bare.to_bytes())?;
        write(&self.dir.join("list.bin"), &encode_seq::<ListEntry>(&list))?;
        write(&self.dir.join("list.txt"), gm.dump_list().as_bytes())
    }

    fn ap_dir(&self, id: &str) -> PathBuf {
        self.dir.join("ap").join(id)
    }

    pub fn load_ap(&self, id: &str) -> Result<ApState, CliError> {
        check_name("ap", id)?;
        let dir = self.ap_dir(id);
        if !dir.join("state.bin").exists() {
            return Err(CliError::usage(format!("unknown ap `{id}`")));
        }
        let mut ap = ApState::from_bytes(&self.pp, &read(&dir.join("state.bin"))?)
            .map_err(|e| CliError::store(format!("ap/{id}/state.bin: {e}")))?;
        ap.arc = decode_seq::<ArcEntry>(&dir.join("arc.bin"))?;
        ap.log = decode_seq::<AuthRecord>(&dir.join("log.bin"))?;
        Ok(ap)
    }

    pub fn save_ap(&self, ap: &ApState) -> Result<(), CliError> {
        let dir = self.ap_dir(&ap.id);
        let mut w = Writer::new();
        let mut bare = ap.clone();
        bare.arc.clear();
        bare.log.clear();
        bare.encode_with(&mut w);
        write(&dir.join("state.bin"), &w.into_bytes())?;
        write(&dir.join("arc.bin"), &encode_seq(&ap.arc))?;
        write(&dir.join("log.bin"), &encode_seq(&ap.log))?;
        write(&dir.join("arc.txt"), ap.dump_arc().as_bytes())?;
        write(&dir.join("log.txt"), ap.dump_log().as_bytes())
    }

    fn user_path(&self, id: &str) -> PathBuf {
        self.dir.join("users").join(format!("{id}.bin"))
    }

    pub fn load_user(&self, id: &str) -> Result<UserState, CliError> {
        check_name("user", id)?;
        let path = self.user_path(id);
        if !path.exists() {
            return Err(CliError::usage(format!("unknown user `{id}`")));
        }
        decode_file(&path)
    }

    pub fn save_user(&self, u: &UserState) -> Result<(), CliError> {
        write(&self.user_path(&u.id), &u.to_bytes())
    }
}

fn traced_names(set: &std::collections::BTreeSet<Traced>) -> Vec<String> {
    set.iter()
        .map(|t| match t {
            Traced::User(id) => id.clone(),
            Traced::Gm => "gm".to_string(),
        })
        .collect()
}

/// Store-backed protocol steps. Each returns the line it prints.
pub mod steps {
    use super::*;

    pub fn keygen(dir: &Path, profile: &str, seed: u64) -> Result<Line, CliError> {
        let mut st = Store::create(dir, profile, seed)?;
        let mut rng = st.next_rng()?;
        let gm = GroupManager::setup(&st.pp, &mut rng);
        st.save_gm(&gm)?;
        Ok(Line::new(
            format!("keygen: preset {} seed {} tags {}", profile, seed, gm.tags_left()),
            json!({"command": "keygen", "preset": profile, "seed": seed, "tags": gm.tags_left()}),
        ))
    }

    pub fn keygen_ap(dir: &Path, id: &str, k: usize) -> Result<Line, CliError> {
        check_name("ap", id)?;
        let mut st = Store::open(dir)?;
        if st.ap_dir(id).join("state.bin").exists() {
            return Err(CliError::usage(format!("ap `{id}` already exists")));
        }
        let mut rng = st.next_rng()?;
        let ap = ApState::setup(&st.pp, id, k, &mut rng)?;
        st.save_ap(&ap)?;
        Ok(Line::new(format!("keygen ap {id}: k {k}"), json!({"command": "keygen", "ap": id, "k": k})))
    }

    pub fn join(dir: &Path, user: &str) -> Result<Line, CliError> {
        check_name("user", user)?;
        let mut st = Store::open(dir)?;
        if st.user_path(user).exists() {
            return Err(CliError::usage(format!("user `{user}` already exists")));
        }
        let mut gm = st.load_gm()?;
        let mut rng = st.next_rng()?;
        let mut u = UserState::setup(&st.pp, user, &mut rng)?;
        crate::ktaa_protocol::join(&st.pp, &mut gm, &mut u, &mut rng)?;
        st.save_gm(&gm)?;
        st.save_user(&u)?;
        let tau = u.tau()?;
        Ok(Line::new(format!("join {user}: tau {tau}"), json!({"command": "join", "user": user, "tau": tau})))
    }

    pub fn grant(dir: &Path, user: &str, ap_id: &str) -> Result<Line, CliError> {
        let mut st = Store::open(dir)?;
        let mut ap = st.load_ap(ap_id)?;
        let mut u = st.load_user(user)?;
        st.next_rng()?;
        crate::ktaa_protocol::grant(&mut ap, &mut u)?;
        st.save_ap(&ap)?;
        st.save_user(&u)?;
        let epoch = ap.arc.len();
        Ok(Line::new(
            format!("grant {user}@{ap_id}: epoch {epoch}"),
            json!({"command": "grant", "user": user, "ap": ap_id, "epoch": epoch}),
        ))
    }

    pub fn revoke(dir: &Path, user: &str, ap_id: &str) -> Result<Line, CliError> {
        let mut st = Store::open(dir)?;
        let mut ap = st.load_ap(ap_id)?;
        let u = st.load_user(user)?;
        st.next_rng()?;
        ap.revoke(u.tau()?)?;
        st.save_ap(&ap)?;
        let epoch = ap.arc.len();
        Ok(Line::new(
            format!("revoke {user}@{ap_id}: epoch {epoch}"),
            json!({"command": "revoke", "user": user, "ap": ap_id, "epoch": epoch}),
        ))
    }

    /// Returns the line and whether the AP accepted.
    pub fn auth(dir: &Path, user: &str, ap_id: &str, over: bool) -> Result<(Line, bool), CliError> {
        let mut st = Store::open(dir)?;
        let gm = st.load_gm()?;
        let mut ap = st.load_ap(ap_id)?;
        let mut u = st.load_user(user)?;
        let mut rng = st.next_rng()?;
        let outcome = if over {
            crate::ktaa_protocol::over_authenticate(&st.pp, &gm.pk, &mut ap, &mut u, &mut rng)
        } else {
            crate::ktaa_protocol::authenticate(&st.pp, &gm.pk, &mut ap, &mut u, &mut rng)
        };
        let outcome = match outcome {
            Err(Error::LimitReached) => {
                return Ok((
                    Line::new(
                        format!("auth {user}@{ap_id}: refused, limit {} reached", ap.k),
                        json!({"command": "auth", "user": user, "ap": ap_id, "result": "limit-reached"}),
                    ),
                    false,
                ))
            }
            r => r?,
        };
        st.save_ap(&ap)?;
        st.save_user(&u)?;
        let word = match outcome {
            AuthOutcome::Accepted => "accepted",
            AuthOutcome::InvalidProof => "invalid-proof",
            AuthOutcome::DuplicateTag => "duplicate-tag",
        };
        let visits = u.visits(ap_id);
        Ok((
            Line::new(
                format!("auth {user}@{ap_id}: {word} (visits {visits}/{})", ap.k),
                json!({"command": "auth", "user": user, "ap": ap_id, "result": word, "visits": visits, "k": ap.k}),
            ),
            outcome == AuthOutcome::Accepted,
        ))
    }

    pub fn trace(dir: &Path, ap_id: &str) -> Result<(Line, Vec<String>), CliError> {
        let st = Store::open(dir)?;
        let gm = st.load_gm()?;
        let ap = st.load_ap(ap_id)?;
        let names = traced_names(&public_tracing(st.pp.params.p(), &gm.list, &ap.log));
        let shown = if names.is_empty() { "none".to_string() } else { names.join(",") };
        Ok((
            Line::new(format!("trace {ap_id}: {shown}"), json!({"command": "trace", "ap": ap_id, "traced": names})),
            names,
        ))
    }

    /// Returns the line and whether every stored flag was reproduced.
    pub fn replay(dir: &Path, ap_id: &str) -> Result<(Line, bool), CliError> {
        let st = Store::open(dir)?;
        let gm = st.load_gm()?;
        let ap = st.load_ap(ap_id)?;
        let got = ap.replay(&st.pp, &gm.pk);
        let agree = got.iter().zip(&ap.log).filter(|(g, r)| g.0 == r.valid && g.1 == r.accepted).count();
        let ok = agree == ap.log.len();
        Ok((
            Line::new(
                format!("replay {ap_id}: {agree}/{} records reproduced", ap.log.len()),
                json!({"command": "replay", "ap": ap_id, "records": ap.log.len(), "reproduced": agree}),
            ),
            ok,
        ))
    }

    pub fn show(dir: &Path, what: ShowWhat, ap_id: Option<&str>) -> Result<Vec<Line>, CliError> {
        let st = Store::open(dir)?;
        let text = match (what, ap_id) {
            (ShowWhat::List, _) => st.load_gm()?.dump_list(),
            (ShowWhat::Log, Some(id)) => st.load_ap(id)?.dump_log(),
            (ShowWhat::Arc, Some(id)) => st.load_ap(id)?.dump_arc(),
            (_, None) => return Err(CliError::usage("--ap is required for log and arc")),
        };
        Ok(text.lines().map(|l| Line::new(l.to_string(), json!({"record": l}))).collect())
    }
}

/// The scripted demo. Its transcript is exactly the concatenation of the
/// single-step commands it stands for.
pub fn demo(dir: &Path, profile: &str, seed: u64, k: usize, clean: bool) -> Result<(Vec<Line>, bool), CliError> {
    let mut out = vec![steps::keygen(dir, profile, seed)?, steps::keygen_ap(dir, "shop", k)?];
    for u in ["alice", "bob"] {
        out.push(steps::join(dir, u)?);
    }
    for u in ["alice", "bob"] {
        out.push(steps::grant(dir, u, "shop")?);
    }
    for _ in 0..k {
        for u in ["alice", "bob"] {
            let (line, ok) = steps::auth(dir, u, "shop", false)?;
            out.push(line);
            if !ok {
                return Err(CliError::verify("honest authentication was not accepted"));
            }
        }
    }
    if !clean {
        out.push(steps::auth(dir, "bob", "shop", true)?.0);
    }
    let (line, traced) = steps::trace(dir, "shop")?;
    out.push(line);
    let expected: Vec<String> = if clean { vec![] } else { vec!["bob".into()] };
    let ok = traced == expected;
    let want = if clean { "none".to_string() } else { "bob".to_string() };
    out.push(Line::new(
        format!("demo: {} (expected {want})", if ok { "ok" } else { "MISMATCH" }),
        json!({"command": "demo", "ok": ok, "expected": expected, "traced": traced}),
    ));
    Ok((out, ok))
}

fn estimate(level: u32, csv: bool) -> Result<Vec<Line>, CliError> {
    let r = CostReport::for_level(level)?;
    if csv {
        let text = r.to_csv()?;
        return Ok(vec![Line::new(text.trim_end().to_string(), Value::Null)]);
    }
    let json = serde_json::to_value(&r).map_err(|e| CliError::store(e.to_string()))?;
    Ok(vec![Line::new(r.to_text().trim_end().to_string(), json)])
}

/// Execute a parsed command; returns printed lines and the exit code.
pub fn execute(cli: &Cli) -> Result<(Vec<Line>, i32), CliError> {
    let g = &cli.global;
    let dir = g.store.as_path();
    let verdict = |ok: bool| if ok { EXIT_OK } else { EXIT_VERIFY };
    match &cli.cmd {
        Command::Keygen { ap: None, .. } => Ok((vec![steps::keygen(dir, &g.profile, g.seed)?], EXIT_OK)),
        Command::Keygen { ap: Some(id), k } => Ok((vec![steps::keygen_ap(dir, id, *k)?], EXIT_OK)),
        Command::Join { user } => Ok((vec![steps::join(dir, user)?], EXIT_OK)),
        Command::Grant { user, ap } => Ok((vec![steps::grant(dir, user, ap)?], EXIT_OK)),
        Command::Revoke { user, ap } => Ok((vec![steps::revoke(dir, user, ap)?], EXIT_OK)),
        Command::Auth { user, ap, over } => {
            let (line, ok) = steps::auth(dir, user, ap, *over)?;
            Ok((vec![line], verdict(ok)))
        }
        Command::Trace { ap } => Ok((vec![steps::trace(dir, ap)?.0], EXIT_OK)),
        Command::Replay { ap } => {
            let (line, ok) = steps::replay(dir, ap)?;
            Ok((vec![line], verdict(ok)))
        }
        Command::Show { what, ap } => Ok((steps::show(dir, *what, ap.as_deref())?, EXIT_OK)),
        Command::Demo { k, clean } => {
            let (lines, ok) = demo(dir, &g.profile, g.seed, *k, *clean)?;
            Ok((lines, verdict(ok)))
        }
        Command::Estimate { level, csv } => Ok((estimate(*level, *csv)?, EXIT_OK)),
    }
}

/// Parse, run and print. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok((lines, code)) => {
            for l in lines {
                let _ = writeln!(out, "{}", l.render(cli.global.json));
            }
            code
        }
        Err(e) => {
            if cli.global.json {
                let _ = writeln!(err, "{}", json!({"error": e.msg, "code": e.code}));
            } else {
                let _ = writeln!(err, "error: {}", e.msg);
            }
            e.code
        }
    }
}

/// Read-only commands must leave these bytes untouched.
pub fn store_fingerprint(dir: &Path) -> std::io::Result<Vec<(PathBuf, Vec<u8>)>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d)? {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().is_some_and(|n| n != ".lock") {
                let mut bytes = Vec::new();
                std::io::Read::read_to_end(&mut File::open(&path)?, &mut bytes)?;
                out.push((path, bytes));
            }
        }
    }
    out.sort();
    Ok(out)
}
