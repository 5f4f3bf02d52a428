//! Exact arithmetic over the moduli tower q0^e1 | q0^e2 | q0^e3, with the
//! decompositions, gadgets, norms and Gaussian sampling the rest of the
//! crate builds on.

pub mod arith;
pub mod codec;
pub mod decomp;
pub mod gauss;
pub mod params;

pub use arith::{center, inv_mod, ZqMatrix, ZqVector};
pub use codec::{Decode, Encode, Reader, Writer};
pub use decomp::{
    bin, bin_recompose, bin_width, bit_len, block_gadget, ceil_log2, lnsw_decompose, lnsw_gadget, m2v, norm_inf,
    norm_inf_int, norm_l2, norm_l2_int, powers_of_two, round_to, round_vec, v2m, vdec, vdec_gadget,
    vdec_recompose,
};
pub use gauss::GaussianSampler;
pub use params::ParamSet;
