//! Weight-shifting gadgets, rooted extension counting and pattern families.

pub mod bowtie;
pub mod extension;
pub mod families;
pub mod naive;
pub mod pattern;
pub mod pinwheel;

pub use bowtie::{bowtie_balance, bowtie_count, bowtie_counts, enumerate_bowties, BowtieEmbedding};
pub use extension::rooted_extension_count;
pub use families::{build_family, index_p, index_q, index_t, index_v, Family};
pub use naive::naive_adjust;
pub use pattern::{Mark, RootedPattern, VertexClass};
pub use pinwheel::{
    apply_f, enumerate_pinwheels, pinwheel_count, pinwheel_counts, PinwheelEmbedding,
    PinwheelOperator,
};

use crate::graph::BitIter;

/// Work items are grouped into chunks whose size depends only on the item
/// count, so merged results do not depend on the number of threads.
pub(crate) fn chunk_len(items: usize) -> usize {
    items.div_ceil(32).max(1)
}

#[inline]
pub(crate) fn and_popcount(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

#[inline]
pub(crate) fn contains(set: &[u64], v: u32) -> bool {
    (set[v as usize / 64] >> (v % 64)) & 1 == 1
}

#[inline]
pub(crate) fn clear(set: &mut [u64], v: u32) {
    set[v as usize / 64] &= !(1u64 << (v % 64));
}

#[inline]
pub(crate) fn insert(set: &mut [u64], v: u32) {
    set[v as usize / 64] |= 1u64 << (v % 64);
}

pub(crate) fn members(set: &[u64]) -> impl Iterator<Item = u32> + '_ {
    set.iter()
        .enumerate()
        .flat_map(|(i, &w)| BitIter::new(w, i as u32 * 64))
}
