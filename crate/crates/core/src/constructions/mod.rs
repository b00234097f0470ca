//! Builders for threshold padlock systems.

mod basic;
mod formula;
mod recursive;
mod triads;

pub use basic::{
    build_2_of_n, build_benaloh, build_direct, build_double_daisy, build_single, build_weighted,
    build_weighted_with_owners,
};
pub use formula::{compile_cnf, compile_dnf, Formula, NormalForm};
pub use recursive::{build_recursive, compose};
pub use triads::{
    bose_triples, build_3_of_n, build_3_of_n_skolem, eleven_key_triads, fixture_13_participants,
    fixture_eleven_keys, nine_point_triads, six_key_triples_indexed, skolem_triples,
    system_from_triads,
};
