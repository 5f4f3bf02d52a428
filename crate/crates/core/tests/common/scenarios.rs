//! Seeded end-to-end runs shared by the protocol tests and the acceptance
//! report. Each returns what happened; callers decide what to assert.

use std::collections::{BTreeMap, BTreeSet};

use ktaa::ktaa_protocol::{
    authenticate, grant, join, over_authenticate, public_tracing, ApState, AuthOutcome, GroupManager, PublicParams, Traced,
    UserState,
};
use ktaa::rng::derive;
use ktaa::zk_relations::{compile_auth, AuthPublic};
use ktaa::Error;
use rand::Rng;

pub struct Setup {
    pub pp: PublicParams,
    pub gm: GroupManager,
    pub ap: ApState,
    pub users: Vec<UserState>,
    pub rng: ktaa::rng::Rng,
}

/// Public parameters, a GM, one AP with visit limit `k` and `count` joined users.
pub fn setup(preset: &str, seed: u64, k: usize, count: usize) -> Setup {
    let pp = PublicParams::preset(preset, seed).unwrap();
    let mut rng = derive(seed, "scenario");
    let mut gm = GroupManager::setup(&pp, &mut rng);
    let ap = ApState::setup(&pp, "ap", k, &mut rng).unwrap();
    let users = (0..count)
        .map(|i| {
            let mut u = UserState::setup(&pp, &format!("user{i}"), &mut rng).unwrap();
            join(&pp, &mut gm, &mut u, &mut rng).unwrap();
            u
        })
        .collect();
    Setup { pp, gm, ap, users, rng }
}

/// setup → join → grant → authenticate k times for every user. Returns the
/// number of authentications and how many were accepted.
pub fn correctness(preset: &str, seed: u64) -> (usize, usize) {
    let k = 1 + seed as usize % 3;
    let mut s = setup(preset, seed, k, 2);
    let mut accepted = 0;
    for u in &mut s.users {
        grant(&mut s.ap, u).unwrap();
    }
    for _ in 0..k {
        for u in &mut s.users {
            let out = authenticate(&s.pp, &s.gm.pk, &mut s.ap, u, &mut s.rng);
            accepted += matches!(out, Ok(AuthOutcome::Accepted)) as usize;
        }
    }
    (k * s.users.len(), accepted)
}

pub struct TraceRun {
    pub clean: BTreeSet<Traced>,
    pub traced: BTreeSet<Traced>,
    pub cheater: String,
    pub last_outcome: AuthOutcome,
}

/// Three users exhaust their visits; one of them then authenticates once more.
pub fn tracing(preset: &str, seed: u64) -> TraceRun {
    let k = 1 + seed as usize % 2;
    let mut s = setup(preset, seed, k, 3);
    for u in &mut s.users {
        grant(&mut s.ap, u).unwrap();
    }
    for _ in 0..k {
        for u in &mut s.users {
            assert_eq!(authenticate(&s.pp, &s.gm.pk, &mut s.ap, u, &mut s.rng).unwrap(), AuthOutcome::Accepted);
        }
    }
    let p = s.pp.params.p();
    let clean = public_tracing(p, &s.gm.list, &s.ap.log);
    let who = s.rng.gen_range(0..s.users.len());
    let cheater = &mut s.users[who];
    let last_outcome = over_authenticate(&s.pp, &s.gm.pk, &mut s.ap, cheater, &mut s.rng).unwrap();
    TraceRun { clean, traced: public_tracing(p, &s.gm.list, &s.ap.log), cheater: cheater.id.clone(), last_outcome }
}

/// Clause that rejects a forged proof from a revoked user, if any does.
fn failing_clause(s: &mut Setup, who: usize) -> Option<String> {
    let ch = s.ap.challenge(s.pp.params.p(), &mut s.rng);
    let user = &mut s.users[who];
    let req = user.authenticate_at(&s.pp, &s.gm.pk, &s.ap.public(), &ch, 1, true).unwrap();
    let public = AuthPublic {
        params: &s.pp.params,
        a_prf: &s.pp.a_prf,
        f: &s.pp.f,
        e1: &s.pp.e1,
        merkle: &s.pp.merkle,
        root: s.ap.tree.root(),
        depth: s.ap.tree.depth(),
        dacc: &s.ap.keys.pk,
        u_acc: &s.ap.acc.u,
        gm: &s.gm.pk,
        t: &req.t,
        t_check: &req.t_check,
        c: ch.c,
    };
    let conj = compile_auth(&public).unwrap();
    let violation = conj.inst.first_violation(&req.proof.witness).unwrap()?;
    let clause = conj.clause_of(&violation).to_string();
    // the AP must reject the same request
    let outcome = s.ap.verify_request(&s.pp, &s.gm.pk, &ch, &req).unwrap();
    (outcome == AuthOutcome::InvalidProof).then_some(clause)
}

/// `events` random grant/revoke steps. After each one every member
/// authenticates, and every revoked user is refused by its own prover and
/// rejected by the dacc clause when it forges. Returns a description of the
/// first deviation.
pub fn revocation(preset: &str, seed: u64, events: usize) -> Result<(), String> {
    let mut s = setup(preset, seed, events + 2, 4);
    let mut member = vec![false; s.users.len()];
    let mut revoked = BTreeMap::new();
    for step in 0..events {
        let grantable: Vec<usize> = (0..member.len()).filter(|&i| !member[i]).collect();
        let revocable: Vec<usize> = (0..member.len()).filter(|&i| member[i]).collect();
        let do_grant = revocable.is_empty() || (!grantable.is_empty() && s.rng.gen_bool(0.5));
        if do_grant {
            let i = grantable[s.rng.gen_range(0..grantable.len())];
            grant(&mut s.ap, &mut s.users[i]).unwrap();
            member[i] = true;
            revoked.remove(&i);
        } else {
            let i = revocable[s.rng.gen_range(0..revocable.len())];
            s.ap.revoke(s.users[i].tau().unwrap()).unwrap();
            member[i] = false;
            revoked.insert(i, ());
        }
        for i in 0..member.len() {
            if member[i] {
                let out = authenticate(&s.pp, &s.gm.pk, &mut s.ap, &mut s.users[i], &mut s.rng);
                if !matches!(out, Ok(AuthOutcome::Accepted)) {
                    return Err(format!("step {step}: member {i} got {out:?}"));
                }
            } else if revoked.contains_key(&i) {
                let out = authenticate(&s.pp, &s.gm.pk, &mut s.ap, &mut s.users[i], &mut s.rng);
                if !matches!(out, Err(Error::InvalidWitness)) {
                    return Err(format!("step {step}: revoked {i} got {out:?}"));
                }
                match failing_clause(&mut s, i) {
                    Some(c) if c == "dacc" => {}
                    other => return Err(format!("step {step}: revoked {i} forged proof failed at {other:?}")),
                }
            }
        }
    }
    Ok(())
}

/// A credential the GM signs without recording it; its over-use traces to the GM.
pub fn off_list(preset: &str, seed: u64) -> BTreeSet<Traced> {
    let mut s = setup(preset, seed, 1, 1);
    let mut rogue = UserState::setup(&s.pp, "rogue", &mut s.rng).unwrap();
    let cred = s.gm.issue_off_list(&s.pp, &rogue.y, &mut s.rng).unwrap();
    rogue.accept_credential(&s.pp, &s.gm.pk, cred).unwrap();
    grant(&mut s.ap, &mut rogue).unwrap();
    assert_eq!(authenticate(&s.pp, &s.gm.pk, &mut s.ap, &mut rogue, &mut s.rng).unwrap(), AuthOutcome::Accepted);
    over_authenticate(&s.pp, &s.gm.pk, &mut s.ap, &mut rogue, &mut s.rng).unwrap();
    public_tracing(s.pp.params.p(), &s.gm.list, &s.ap.log)
}
