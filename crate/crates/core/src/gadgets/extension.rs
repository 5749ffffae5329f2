//! Rooted extension counting `X(H, G, S, φ)`.

use super::pattern::RootedPattern;
use crate::error::{FtdError, Result};
use crate::graph::Graph;

/// Number of injections `ψ: V(H) → V(G)` extending `φ` that map every edge of
/// `H` with an endpoint outside `S` onto an edge of `G`. `phi[i]` is the
/// image of `pattern.roots()[i]`.
pub fn rooted_extension_count(pattern: &RootedPattern, g: &Graph, phi: &[u32]) -> Result<u64> {
    let h = &pattern.graph;
    let roots = pattern.roots();
    if phi.len() != roots.len() {
        return Err(FtdError::InvalidInput(format!(
            "placement has {} vertices, pattern has {} roots",
            phi.len(),
            roots.len()
        )));
    }
    let mut sorted = phi.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != phi.len() {
        return Err(FtdError::InvalidInput(
            "root placement is not injective".into(),
        ));
    }
    if let Some(&x) = phi.iter().find(|&&x| x as usize >= g.n()) {
        return Err(FtdError::InvalidInput(format!(
            "host vertex {x} out of range"
        )));
    }

    let mut image: Vec<Option<u32>> = vec![None; h.n()];
    for (&r, &x) in roots.iter().zip(phi) {
        image[r as usize] = Some(x);
    }
    // Place free vertices greedily by number of already placed neighbours.
    let mut free = pattern.free_vertices();
    let mut order = Vec::with_capacity(free.len());
    let mut placed: Vec<bool> = (0..h.n() as u32).map(|v| pattern.is_root(v)).collect();
    while !free.is_empty() {
        let (i, _) = free
            .iter()
            .enumerate()
            .max_by_key(|(_, &v)| {
                let back = h
                    .neighbors(v)
                    .iter()
                    .filter(|&&w| placed[w as usize])
                    .count();
                (back, std::cmp::Reverse(v))
            })
            .expect("nonempty");
        let v = free.remove(i);
        placed[v as usize] = true;
        order.push(v);
    }
    let pos: Vec<usize> = {
        let mut pos = vec![usize::MAX; h.n()];
        for (i, &v) in order.iter().enumerate() {
            pos[v as usize] = i;
        }
        pos
    };
    // For each position, the pattern vertices whose images constrain it.
    let back: Vec<Vec<u32>> = order
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            h.neighbors(v)
                .iter()
                .copied()
                .filter(|&w| pattern.is_root(w) || pos[w as usize] < i)
                .collect()
        })
        .collect();

    let words = g.words();
    let mut used = vec![0u64; words];
    for &x in phi {
        used[x as usize / 64] |= 1 << (x % 64);
    }
    let full: Vec<u64> = (0..words)
        .map(|i| {
            let lo = i * 64;
            let hi = (lo + 64).min(g.n());
            if hi <= lo {
                0
            } else if hi - lo == 64 {
                u64::MAX
            } else {
                (1u64 << (hi - lo)) - 1
            }
        })
        .collect();

    fn rec(
        depth: usize,
        g: &Graph,
        order: &[u32],
        back: &[Vec<u32>],
        full: &[u64],
        image: &mut [Option<u32>],
        used: &mut [u64],
    ) -> u64 {
        if depth == order.len() {
            return 1;
        }
        let mut cand = full.to_vec();
        for &w in &back[depth] {
            let x = image[w as usize].expect("constraint placed");
            for (a, b) in cand.iter_mut().zip(g.row(x)) {
                *a &= b;
            }
        }
        for (a, u) in cand.iter_mut().zip(used.iter()) {
            *a &= !u;
        }
        if depth + 1 == order.len() {
            return cand.iter().map(|w| w.count_ones() as u64).sum();
        }
        let mut total = 0;
        for (i, &word) in cand.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let x = i as u32 * 64 + w.trailing_zeros();
                w &= w - 1;
                image[order[depth] as usize] = Some(x);
                used[i] |= 1 << (x % 64);
                total += rec(depth + 1, g, order, back, full, image, used);
                used[i] &= !(1 << (x % 64));
            }
        }
        image[order[depth] as usize] = None;
        total
    }

    Ok(rec(0, g, &order, &back, &full, &mut image, &mut used))
}
