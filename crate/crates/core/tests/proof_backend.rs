mod common;

use common::world;
use ktaa::lattice_core::{Decode, Encode, ParamSet};
use ktaa::proof_backend::{proof_size_bits, prove, prove_unchecked, verify, Proof, ZkCostParams, NON_ZK_WARNING};
use ktaa::rng::derive;
use ktaa::zk_relations::{compile_auth, witness_auth};
use rand::Rng;

#[test]
fn byte_mutations_never_verify() {
    let w = world(ParamSet::toy_27(), 1);
    let conj = compile_auth(&w.public()).unwrap();
    let x = witness_auth(&w.public(), &conj, &w.secret()).unwrap();
    let msg = b"challenge";
    let proof = prove(&conj.inst, &x, msg).unwrap();
    assert!(verify(&conj.inst, &proof, msg));
    assert_eq!(proof.warning, NON_ZK_WARNING);
    let bytes = proof.to_bytes();
    assert_eq!(Proof::from_bytes(&bytes).unwrap(), proof);
    let mut rng = derive(2, "mutate");
    let mut decoded = 0;
    for _ in 0..1000 {
        let mut bad = bytes.clone();
        let i = rng.gen_range(0..bad.len());
        bad[i] ^= rng.gen_range(1..=255u8);
        if let Ok(p) = Proof::from_bytes(&bad) {
            decoded += 1;
            assert!(!verify(&conj.inst, &p, msg), "byte {i}");
        }
    }
    assert!(decoded > 900, "most mutations land in decodable fields ({decoded})");
}

#[test]
fn proof_is_bound_to_message_and_statement() {
    let w = world(ParamSet::toy_27(), 3);
    let conj = compile_auth(&w.public()).unwrap();
    let x = witness_auth(&w.public(), &conj, &w.secret()).unwrap();
    let proof = prove(&conj.inst, &x, b"m1").unwrap();
    assert!(!verify(&conj.inst, &proof, b"m2"));
    let other = world(ParamSet::toy_27(), 4);
    let conj2 = compile_auth(&other.public()).unwrap();
    assert!(!verify(&conj2.inst, &proof, b"m1"));
}

#[test]
fn bad_witness_cannot_be_proven() {
    let w = world(ParamSet::toy_27(), 5);
    let conj = compile_auth(&w.public()).unwrap();
    let mut x = witness_auth(&w.public(), &conj, &w.secret()).unwrap();
    x[0] = (x[0] + 1) % conj.inst.modulus;
    assert!(prove(&conj.inst, &x, b"m").is_err());
    assert!(!verify(&conj.inst, &prove_unchecked(&conj.inst, &x, b"m"), b"m"));
}

#[test]
fn size_formula_is_monotone() {
    for cost in [ZkCostParams::level_80(), ZkCostParams::level_128()] {
        let base = proof_size_bits(1000.0, 1000.0, &cost, 100.0);
        assert!(proof_size_bits(1001.0, 1000.0, &cost, 100.0) > base);
        assert!(proof_size_bits(1000.0, 1001.0, &cost, 100.0) > base);
        assert!(proof_size_bits(1000.0, 1000.0, &cost, 101.0) > base);
    }
    assert!(
        proof_size_bits(1e6, 1e6, &ZkCostParams::level_128(), 100.0) > proof_size_bits(1e6, 1e6, &ZkCostParams::level_80(), 100.0)
    );
}
