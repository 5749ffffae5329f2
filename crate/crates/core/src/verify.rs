//! Exhaustive rooted density and degeneracy checks for small patterns.
//!
//! All arithmetic here is exact.

use std::fmt;
use std::io::Write;
use std::path::Path;

use num_rational::Rational64;
use rayon::prelude::*;

use crate::error::{FtdError, Result};
use crate::gadgets::families::{build_family, index_p, index_q, Family};
use crate::gadgets::pattern::{RootedPattern, VertexClass};

/// Largest free-vertex count accepted by [`max_root_density`].
pub const MAX_FREE: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Density {
    /// `max_W (e(H[S ∪ W]) − e(H[S])) / |W|`.
    pub ratio: Rational64,
    /// A maximiser, sorted; smallest size first, then lexicographically least.
    pub witness: Vec<u32>,
}

/// Exhaustive search over nonempty `W ⊆ V(H) ∖ S`. A pattern without free
/// vertices has ratio 0 and an empty witness.
pub fn max_root_density(p: &RootedPattern) -> Result<Density> {
    let free = p.free_vertices();
    let f = free.len();
    if f > MAX_FREE {
        return Err(FtdError::SizeLimit {
            free: f,
            limit: MAX_FREE,
        });
    }
    if f == 0 {
        return Ok(Density {
            ratio: Rational64::from_integer(0),
            witness: Vec::new(),
        });
    }
    let h = &p.graph;
    let mut slot = vec![usize::MAX; p.n()];
    for (i, &v) in free.iter().enumerate() {
        slot[v as usize] = i;
    }
    // Root neighbours and free-neighbour mask of each free vertex.
    let to_roots: Vec<u32> = free
        .iter()
        .map(|&v| h.neighbors(v).iter().filter(|&&w| p.is_root(w)).count() as u32)
        .collect();
    let nbr_mask: Vec<u32> = free
        .iter()
        .map(|&v| {
            h.neighbors(v)
                .iter()
                .filter(|&&w| slot[w as usize] != usize::MAX)
                .fold(0u32, |m, &w| m | 1 << slot[w as usize])
        })
        .collect();
    // gain[mask] = e(H[S ∪ W]) − e(H[S]) for W = mask, built from mask minus
    // its lowest element.
    let total = 1usize << f;
    let mut gain = vec![0u16; total];
    let mut best_num = 0i64;
    let mut best_den = 1i64;
    let mut best_mask = 0u32;
    for mask in 1..total {
        let v = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let g = gain[rest] as u32 + to_roots[v] + (nbr_mask[v] & rest as u32).count_ones();
        gain[mask] = g as u16;
        let (num, den) = (g as i64, (mask as u32).count_ones() as i64);
        let better = if best_mask == 0 {
            true
        } else {
            let lhs = num * best_den;
            let rhs = best_num * den;
            lhs > rhs
                || (lhs == rhs
                    && (den < best_den
                        || (den == best_den && {
                            let low = (mask as u32 ^ best_mask).trailing_zeros();
                            (mask as u32 >> low) & 1 == 1
                        })))
        };
        if better {
            best_num = num;
            best_den = den;
            best_mask = mask as u32;
        }
    }
    let witness = (0..f)
        .filter(|i| best_mask >> i & 1 == 1)
        .map(|i| free[i])
        .collect();
    Ok(Density {
        ratio: Rational64::new(best_num, best_den),
        witness,
    })
}

/// `max_root_density(p) ≤ alpha`.
pub fn check_alpha(p: &RootedPattern, alpha: Rational64) -> Result<bool> {
    Ok(max_root_density(p)?.ratio <= alpha)
}

/// An ordering `v_1, …, v_N` of the free vertices in which each `v_i` has at
/// most `k` neighbours in `S ∪ {v_1, …, v_{i−1}}`, if one exists.
///
/// Peels from the back: a vertex of minimum degree in the remaining graph
/// (ties to the larger id) goes last. If every remaining free vertex has
/// degree above `k`, no ordering exists, since the last vertex of any
/// ordering sees all its remaining neighbours.
pub fn is_k_degenerate(p: &RootedPattern, k: usize) -> Option<Vec<u32>> {
    let h = &p.graph;
    let mut alive = vec![true; p.n()];
    let mut remaining = p.free_vertices();
    let mut peeled = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let deg = |v: u32| {
            h.neighbors(v)
                .iter()
                .filter(|&&w| alive[w as usize])
                .count()
        };
        let (i, &v) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| (deg(v), std::cmp::Reverse(v)))
            .expect("nonempty");
        if deg(v) > k {
            return None;
        }
        alive[v as usize] = false;
        remaining.remove(i);
        peeled.push(v);
    }
    peeled.reverse();
    Some(peeled)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Check {
    /// Maximum root density at most `alpha`.
    Alpha(Rational64),
    /// Maximum root density exactly `ratio`, attained first at the named set.
    MaxAt(Rational64, Vec<String>),
    /// Rooted `k`-degeneracy.
    Degenerate(usize),
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Alpha(a) => write!(f, "alpha<={a}"),
            Check::MaxAt(a, _) => write!(f, "max=={a}"),
            Check::Degenerate(k) => write!(f, "{k}-degenerate"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteRow {
    pub case: String,
    pub family: String,
    pub roots: String,
    pub check: Check,
    pub verdict: Verdict,
    /// Maximiser and its ratio for density checks, ordering for degeneracy.
    pub witness: String,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.rows.iter().filter(|r| r.verdict == v).count()
    }

    pub fn row(&self, case: &str) -> Option<&SuiteRow> {
        self.rows.iter().find(|r| r.case == case)
    }

    /// Fixed-width table.
    pub fn write_table<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "{:<14} {:<10} {:<22} {:<14} {:<8} witness",
            "case", "family", "roots", "check", "verdict"
        )?;
        for r in &self.rows {
            writeln!(
                out,
                "{:<14} {:<10} {:<22} {:<14} {:<8} {}",
                r.case,
                r.family,
                r.roots,
                r.check.to_string(),
                r.verdict.to_string(),
                r.witness
            )?;
        }
        writeln!(
            out,
            "{} pass, {} fail, {} skipped",
            self.count(Verdict::Pass),
            self.count(Verdict::Fail),
            self.count(Verdict::Skipped)
        )?;
        Ok(())
    }

    /// CSV: `case,family,roots,check,verdict,witness`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["case", "family", "roots", "check", "verdict", "witness"])?;
        for r in &self.rows {
            w.write_record([
                r.case.as_str(),
                r.family.as_str(),
                r.roots.as_str(),
                &r.check.to_string(),
                &r.verdict.to_string(),
                r.witness.as_str(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs one check on a rooted pattern.
pub fn run_case(case: impl Into<String>, p: &RootedPattern, check: Check) -> Result<SuiteRow> {
    let (verdict, witness) = match &check {
        Check::Alpha(a) => {
            let d = max_root_density(p)?;
            let ok = d.ratio <= *a;
            (ok, format!("{} at {}", d.ratio, p.describe(&d.witness)))
        }
        Check::MaxAt(a, names) => {
            let d = max_root_density(p)?;
            let want = {
                let mut ids = p.ids(&names.iter().map(|s| s.as_str()).collect::<Vec<_>>())?;
                ids.sort_unstable();
                ids
            };
            (
                d.ratio == *a && d.witness == want,
                format!("{} at {}", d.ratio, p.describe(&d.witness)),
            )
        }
        Check::Degenerate(k) => match is_k_degenerate(p, *k) {
            Some(order) => (true, p.describe(&order).replace(['{', '}'], "")),
            None => (false, "none".into()),
        },
    };
    Ok(SuiteRow {
        case: case.into(),
        family: p.name.clone(),
        roots: p.describe(p.roots()),
        check,
        verdict: if verdict {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        witness,
    })
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// Root set `{d, a7, b_{j−1}, b_j}` on `W(i)`.
pub fn p_case(i: usize, j: usize) -> Result<RootedPattern> {
    build_family(Family::W(i))?.with_named_roots(&[
        "d",
        "a7",
        &format!("b{}", (j + 7) % 8),
        &format!("b{j}"),
    ])
}

/// Root set `{d, a7, t_{m−1}, t_m}` on `W(i, j)`.
pub fn q_case(i: usize, j: usize, m: usize) -> Result<RootedPattern> {
    build_family(Family::Wij(i, j))?.with_named_roots(&[
        "d",
        "a7",
        &format!("t{}", m - 1),
        &format!("t{m}"),
    ])
}

/// Every built-in case, in report order.
pub fn builtin_cases() -> Result<Vec<(String, RootedPattern, Check)>> {
    let alpha = Check::Alpha(r(11, 4));
    let mut cases = Vec::new();
    let bowtie = build_family(Family::Bowtie)?;
    cases.push(("bowtie-uv".into(), bowtie.clone(), Check::Alpha(r(2, 1))));
    for (tag, t) in [
        ("uA", ["u", "a1", "a2"]),
        ("cA", ["c", "a1", "a2"]),
        ("cB", ["c", "b1", "b2"]),
        ("vB", ["v", "b1", "b2"]),
    ] {
        cases.push((
            format!("bowtie-{tag}"),
            bowtie.with_named_roots(&t)?,
            Check::Degenerate(2),
        ));
    }
    let w8 = build_family(Family::Wheel(4))?;
    cases.push(("w8-base".into(), w8.clone(), alpha.clone()));
    cases.push((
        "w8-tri".into(),
        w8.with_named_roots(&["c", "w0", "w1"])?,
        alpha.clone(),
    ));
    for t in 1..=5 {
        let mut q: Vec<String> = vec!["w7".into(), "c".into()];
        q.extend((0..t).map(|i| format!("w{i}")));
        let q: Vec<&str> = q.iter().map(|s| s.as_str()).collect();
        cases.push((format!("w8-Q{t}"), w8.with_named_roots(&q)?, alpha.clone()));
    }
    for t in 1..=6 {
        cases.push((
            format!("seg-Q{t}"),
            build_family(Family::WheelSegment(t))?,
            Check::Degenerate(2),
        ));
    }
    cases.push((
        "W2-remark".into(),
        p_case(2, 7)?,
        Check::MaxAt(
            r(11, 4),
            vec!["ca".into(), "a0".into(), "a1".into(), "cb".into()],
        ),
    ));
    for (i, j) in index_p() {
        cases.push((format!("P({i},{j})"), p_case(i, j)?, alpha.clone()));
    }
    for (i, j, m) in index_q() {
        cases.push((format!("Q({i},{j},{m})"), q_case(i, j, m)?, alpha.clone()));
    }
    Ok(cases)
}

fn h_rows(dir: Option<&Path>) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    for i in 1..=6 {
        let case1 = format!("H{i}-degenerate");
        let case2 = format!("H{i}-density");
        let path = dir.map(|d| d.join(format!("H{i}.pattern")));
        let Some(path) = path.filter(|p| p.exists()) else {
            if dir.is_some() {
                log::warn!("H{i}.pattern not found; skipping its checks");
            }
            for (case, check) in [
                (case1, Check::Degenerate(2)),
                (case2, Check::Alpha(r(11, 4))),
            ] {
                rows.push(SuiteRow {
                    case,
                    family: format!("H{i}"),
                    roots: "-".into(),
                    check,
                    verdict: Verdict::Skipped,
                    witness: "no pattern file".into(),
                });
            }
            continue;
        };
        let file = std::fs::File::open(&path)?;
        let h = RootedPattern::read_from(std::io::BufReader::new(file))
            .map_err(|e| e.with_path(&path))?;
        let vr = h.class(VertexClass::R);
        let vg = h.class(VertexClass::G);
        let vo = h.class(VertexClass::O);
        let mut keep: Vec<u32> = vr.iter().chain(&vg).copied().collect();
        keep.sort_unstable();
        let sub = h.induced(&keep)?.with_roots(&[])?;
        let sub_roots: Vec<u32> = keep
            .iter()
            .enumerate()
            .filter(|(_, v)| vr.contains(v))
            .map(|(i, _)| i as u32)
            .collect();
        let sub = sub.with_roots(&sub_roots)?;
        rows.push(run_case(case1, &sub, Check::Degenerate(2))?);
        let roots: Vec<u32> = vr.iter().chain(&vg).chain(&vo).copied().collect();
        rows.push(run_case(
            case2,
            &h.with_roots(&roots)?,
            Check::Alpha(r(11, 4)),
        )?);
    }
    Ok(rows)
}

/// Runs the built-in suite, plus the `H1 … H6` typicality conditions when
/// `H<i>.pattern` files exist in `h_dir` (rows are `skipped` otherwise).
pub fn verify_paper_suite(h_dir: Option<&Path>) -> Result<SuiteReport> {
    let cases = builtin_cases()?;
    let mut rows: Vec<SuiteRow> = cases
        .into_par_iter()
        .map(|(case, p, check)| run_case(case, &p, check))
        .collect::<Result<_>>()?;
    rows.extend(h_rows(h_dir)?);
    Ok(SuiteReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn triangle_density() {
        let p = RootedPattern::new("K3", Graph::complete(3), &[]).unwrap();
        let d = max_root_density(&p).unwrap();
        assert_eq!(d.ratio, r(1, 1));
        assert_eq!(d.witness, vec![0, 1, 2]);
    }

    #[test]
    fn wheel_base_density() {
        let w8 = build_family(Family::Wheel(4)).unwrap();
        let d = max_root_density(&w8).unwrap();
        assert_eq!(d.ratio, r(15, 7));
        assert_eq!(d.witness, w8.free_vertices());
        assert!(check_alpha(&w8, r(15, 7)).unwrap());
        assert!(!check_alpha(&w8, r(15, 7) - r(1, 100)).unwrap());
    }

    #[test]
    fn remark_witness() {
        let p = p_case(2, 7).unwrap();
        assert_eq!(p.describe(p.roots()), "{a2,a7,b6,d}");
        let d = max_root_density(&p).unwrap();
        assert_eq!(d.ratio, r(11, 4));
        assert_eq!(p.describe(&d.witness), "{a0,a1,ca,cb}");
    }

    #[test]
    fn degeneracy_examples() {
        for t in 1..=6 {
            let s = build_family(Family::WheelSegment(t)).unwrap();
            let order = is_k_degenerate(&s, 2).unwrap();
            let mut want = vec!["c".to_string()];
            want.extend((1..t).map(|i| format!("w{i}")));
            let got: Vec<&str> = order.iter().map(|&v| s.label(v)).collect();
            assert_eq!(got, want);
        }
        let k3 = RootedPattern::new("K3", Graph::complete(3), &[0]).unwrap();
        assert!(is_k_degenerate(&k3, 2).is_some());
        let k5 = RootedPattern::new("K5", Graph::complete(5), &[]).unwrap();
        assert!(is_k_degenerate(&k5, 3).is_none());
        assert!(is_k_degenerate(&k5, 4).is_some());
    }

    #[test]
    fn builtin_suite_passes() {
        let rep = verify_paper_suite(None).unwrap();
        let fails: Vec<_> = rep
            .rows
            .iter()
            .filter(|r| r.verdict == Verdict::Fail)
            .collect();
        assert!(fails.is_empty(), "{fails:#?}");
        assert_eq!(rep.count(Verdict::Skipped), 12);
        assert_eq!(
            rep.rows.iter().filter(|r| r.case.starts_with("P(")).count(),
            37
        );
        assert_eq!(
            rep.rows.iter().filter(|r| r.case.starts_with("Q(")).count(),
            12
        );
    }

    #[test]
    fn size_limit() {
        let p = RootedPattern::new("E", Graph::empty(25), &[]).unwrap();
        assert!(matches!(
            max_root_density(&p),
            Err(FtdError::SizeLimit {
                free: 25,
                limit: 24
            })
        ));
    }
}
