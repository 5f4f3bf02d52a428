mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::scenarios::{correctness, off_list, revocation, setup, tracing};
use ktaa::ktaa_protocol::{authenticate, grant, public_tracing, ApState, AuthOutcome, GroupManager, Traced, UserState};
use ktaa::lattice_core::{Decode, Encode};
use ktaa::Error;

#[test]
fn honest_runs_always_accept() {
    let start = Instant::now();
    for preset in ["toy-27", "toy-125"] {
        for seed in 0..100 {
            let (total, accepted) = correctness(preset, seed);
            assert_eq!(accepted, total, "{preset} seed {seed}");
        }
    }
    println!("200 honest runs in {:.1?}", start.elapsed());
}

#[test]
fn over_use_traces_exactly_the_cheater() {
    for preset in ["toy-27", "toy-125"] {
        for seed in 0..50 {
            let run = tracing(preset, seed);
            assert!(run.clean.is_empty(), "{preset} seed {seed}: clean log traced {:?}", run.clean);
            assert_eq!(run.last_outcome, AuthOutcome::DuplicateTag);
            assert_eq!(run.traced, BTreeSet::from([Traced::User(run.cheater.clone())]), "{preset} seed {seed}");
        }
    }
}

#[test]
fn revocation_holds_over_mixed_events() {
    for preset in ["toy-27", "toy-125"] {
        for seed in 0..5 {
            revocation(preset, seed, 10).unwrap_or_else(|e| panic!("{preset} seed {seed}: {e}"));
        }
    }
}

#[test]
fn off_list_key_traces_to_the_manager() {
    assert_eq!(off_list("toy-27", 3), BTreeSet::from([Traced::Gm]));
}

#[test]
fn limits_and_access_errors() {
    let mut s = setup("toy-27", 9, 1, 2);
    let (pp, gm) = (s.pp.clone(), s.gm.pk.clone());
    assert!(matches!(authenticate(&pp, &gm, &mut s.ap, &mut s.users[0], &mut s.rng), Err(Error::NoAccess(_))));
    grant(&mut s.ap, &mut s.users[0]).unwrap();
    assert!(matches!(grant(&mut s.ap, &mut s.users[0]), Err(Error::AlreadyMember(_))));
    assert_eq!(authenticate(&pp, &gm, &mut s.ap, &mut s.users[0], &mut s.rng).unwrap(), AuthOutcome::Accepted);
    assert!(matches!(authenticate(&pp, &gm, &mut s.ap, &mut s.users[0], &mut s.rng), Err(Error::LimitReached)));
    let mut stranger = UserState::setup(&pp, "stranger", &mut s.rng).unwrap();
    assert!(matches!(grant(&mut s.ap, &mut stranger), Err(Error::NoCredential(_))));
    assert!(ApState::setup(&pp, "zero", 0, &mut s.rng).is_err());
}

#[test]
fn join_rejects_duplicates_and_bad_proofs() {
    let mut s = setup("toy-27", 4, 1, 1);
    let req = s.users[0].join_request(&s.pp).unwrap();
    assert!(matches!(s.gm.issue(&s.pp, &req, &mut s.rng), Err(Error::DuplicateKey)));
    let other = UserState::setup(&s.pp, "other", &mut s.rng).unwrap();
    let mut forged = other.join_request(&s.pp).unwrap();
    forged.id = "mallory".into();
    assert!(matches!(s.gm.issue(&s.pp, &forged, &mut s.rng), Err(Error::ProofRejected)));
}

#[test]
fn tag_space_is_finite() {
    let mut s = setup("toy-27", 5, 1, 0);
    let tags = s.pp.params.usable_tags().len();
    assert_eq!(tags, 5);
    for i in 0..tags {
        let mut u = UserState::setup(&s.pp, &format!("u{i}"), &mut s.rng).unwrap();
        ktaa::ktaa_protocol::join(&s.pp, &mut s.gm, &mut u, &mut s.rng).unwrap();
    }
    let mut late = UserState::setup(&s.pp, "late", &mut s.rng).unwrap();
    assert!(matches!(ktaa::ktaa_protocol::join(&s.pp, &mut s.gm, &mut late, &mut s.rng), Err(Error::TagSpaceExhausted)));
    let taus: BTreeSet<u64> = s.gm.list.iter().map(|e| e.tau).collect();
    assert_eq!(taus.len(), tags);
}

#[test]
fn replay_and_state_round_trip() {
    let mut s = setup("toy-27", 6, 2, 2);
    let (pp, gm) = (s.pp.clone(), s.gm.pk.clone());
    for u in &mut s.users {
        grant(&mut s.ap, u).unwrap();
    }
    for _ in 0..2 {
        for u in &mut s.users {
            authenticate(&pp, &gm, &mut s.ap, u, &mut s.rng).unwrap();
        }
    }
    s.ap.revoke(s.users[1].tau().unwrap()).unwrap();
    ktaa::ktaa_protocol::over_authenticate(&pp, &gm, &mut s.ap, &mut s.users[0], &mut s.rng).unwrap();
    let replay = s.ap.replay(&pp, &gm);
    let logged: Vec<(bool, bool)> = s.ap.log.iter().map(|r| (r.valid, r.accepted)).collect();
    assert_eq!(replay, logged);

    let ap2 = ApState::from_bytes(&pp, &s.ap.to_bytes()).unwrap();
    assert_eq!(ap2.replay(&pp, &gm), replay);
    assert_eq!(ap2.tree.root(), s.ap.tree.root());
    assert_eq!(ap2.acc, s.ap.acc);
    let gm2 = GroupManager::from_bytes(&s.gm.to_bytes()).unwrap();
    assert_eq!(gm2, s.gm);
    assert_eq!(public_tracing(pp.params.p(), &gm2.list, &ap2.log), public_tracing(pp.params.p(), &s.gm.list, &s.ap.log));
    for u in &s.users {
        assert_eq!(&UserState::from_bytes(&u.to_bytes()).unwrap(), u);
    }
    let mut tampered = s.ap.log[0].clone();
    tampered.t_check[0] = (tampered.t_check[0] + 1) % pp.params.p();
    assert!(!s.ap.check_record(&pp, &gm, &tampered));
    let bytes = s.ap.to_bytes();
    assert!(ApState::from_bytes(&pp, &bytes[..bytes.len() - 1]).is_err());
}
