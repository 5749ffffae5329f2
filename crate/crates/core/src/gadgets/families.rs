//! Built-in pattern families: wheels, wheel segments, bowties and the
//! two- and three-wheel concatenations `W(i)` and `W(i, j)`.

use std::fmt;
use std::str::FromStr;

use super::pattern::RootedPattern;
use crate::error::{FtdError, Result};
use crate::graph::{ordered, Edge, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `W_{2k}` rooted at the base edge `{w_0, w_{2k−1}}`.
    Wheel(usize),
    /// `W_8[Q_t]` rooted at `{w_0, w_7}`, `t ∈ [6]`.
    WheelSegment(usize),
    /// Two `W_8` copies sharing a perimeter edge, plus `d`; `i ∈ [7]`.
    W(usize),
    /// `W(i)` with a third wheel glued on `b_{j−1} b_j`; `(i, j) ∈ 𝒯`.
    Wij(usize, usize),
    /// Rooted at `{u, v}`.
    Bowtie,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Wheel(k) => write!(f, "wheel({k})"),
            Family::WheelSegment(t) => write!(f, "segment({t})"),
            Family::W(i) => write!(f, "W({i})"),
            Family::Wij(i, j) => write!(f, "W({i},{j})"),
            Family::Bowtie => write!(f, "bowtie"),
        }
    }
}

impl FromStr for Family {
    type Err = FtdError;

    /// Accepts `wheel(k)`, `segment(t)`, `W(i)`, `W(i,j)` and `bowtie`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || FtdError::InvalidInput(format!("unknown family `{s}`"));
        if s == "bowtie" {
            return Ok(Family::Bowtie);
        }
        let (head, rest) = s.split_once('(').ok_or_else(bad)?;
        let args: Vec<usize> = rest
            .strip_suffix(')')
            .ok_or_else(bad)?
            .split(',')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match (head, &args[..]) {
            ("wheel", &[k]) => Ok(Family::Wheel(k)),
            ("segment", &[t]) => Ok(Family::WheelSegment(t)),
            ("W", &[i]) => Ok(Family::W(i)),
            ("W", &[i, j]) => Ok(Family::Wij(i, j)),
            _ => Err(bad()),
        }
    }
}

/// `𝒯 = {(1,2), (1,7)}`.
pub fn index_t() -> Vec<(usize, usize)> {
    vec![(1, 2), (1, 7)]
}

/// `𝒱 = {(1,1), (2,1), (6,7)}`.
pub fn index_v() -> Vec<(usize, usize)> {
    vec![(1, 1), (2, 1), (6, 7)]
}

/// `([6] × [7]) ∖ (𝒯 ∪ 𝒱)` in lexicographic order.
pub fn index_p() -> Vec<(usize, usize)> {
    let skip: Vec<(usize, usize)> = index_t().into_iter().chain(index_v()).collect();
    (1..=6)
        .flat_map(|i| (1..=7).map(move |j| (i, j)))
        .filter(|p| !skip.contains(p))
        .collect()
}

/// `{(1,2,m) : 2 ≤ m ≤ 7} ∪ {(1,7,m) : m ∈ [6]}`.
pub fn index_q() -> Vec<(usize, usize, usize)> {
    (2..=7)
        .map(|m| (1, 2, m))
        .chain((1..=6).map(|m| (1, 7, m)))
        .collect()
}

/// Incremental builder that keeps names and identified aliases.
struct Builder {
    labels: Vec<String>,
    aliases: Vec<(String, u32)>,
    edges: Vec<Edge>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            labels: Vec::new(),
            aliases: Vec::new(),
            edges: Vec::new(),
        }
    }

    fn vertex(&mut self, name: String) -> u32 {
        self.labels.push(name);
        self.labels.len() as u32 - 1
    }

    fn id(&self, name: &str) -> u32 {
        self.labels
            .iter()
            .position(|l| l == name)
            .map(|v| v as u32)
            .or_else(|| self.aliases.iter().find(|a| a.0 == name).map(|a| a.1))
            .unwrap_or_else(|| panic!("no vertex {name}"))
    }

    fn edge(&mut self, a: u32, b: u32) {
        let e = ordered(a, b);
        if !self.edges.contains(&e) {
            self.edges.push(e);
        }
    }

    /// Adds a `W_{len}` with perimeter `{prefix}0 …` and hub `hub`. Perimeter
    /// positions listed in `glue` reuse existing vertices.
    fn wheel(&mut self, prefix: &str, hub: &str, len: usize, glue: &[(usize, u32)]) {
        let mut rim = Vec::with_capacity(len);
        for i in 0..len {
            let name = format!("{prefix}{i}");
            match glue.iter().find(|g| g.0 == i) {
                Some(&(_, v)) => {
                    self.aliases.push((name, v));
                    rim.push(v);
                }
                None => rim.push(self.vertex(name)),
            }
        }
        let c = self.vertex(hub.to_string());
        for i in 0..len {
            self.edge(c, rim[i]);
            self.edge(rim[i], rim[(i + 1) % len]);
        }
    }

    fn finish(self, name: String, roots: &[&str]) -> Result<RootedPattern> {
        let root_ids: Vec<u32> = roots.iter().map(|r| self.id(r)).collect();
        let graph = Graph::from_edges(self.labels.len(), self.edges)?;
        let mut p = RootedPattern::new(name, graph, &root_ids)?.with_labels(self.labels);
        for (a, v) in self.aliases {
            p = p.with_alias(a, v);
        }
        Ok(p)
    }
}

fn w_i(b: &mut Builder, i: usize) {
    b.wheel("a", "ca", 8, &[]);
    let (ai, aim1) = (b.id(&format!("a{i}")), b.id(&format!("a{}", i - 1)));
    b.wheel("b", "cb", 8, &[(7, ai), (0, aim1)]);
    let d = b.vertex("d".into());
    let (a0, a7) = (b.id("a0"), b.id("a7"));
    b.edge(d, a0);
    b.edge(d, a7);
}

/// Builds a family member with its default root set.
///
/// Vertex names: wheels use `w0 …` and `c`; `W(i)` uses `a0 … a7`, `ca`,
/// `b0 … b7`, `cb`, `d` (identified vertices answer to both names); `W(i,j)`
/// adds `t0 … t7` and `ct` for the third wheel; the bowtie uses
/// `u v a1 a2 b1 b2 c`.
pub fn build_family(f: Family) -> Result<RootedPattern> {
    let range = |ok: bool| {
        if ok {
            Ok(())
        } else {
            Err(FtdError::InvalidInput(format!(
                "{f}: parameter out of range"
            )))
        }
    };
    let name = f.to_string();
    match f {
        Family::Wheel(k) => {
            range(k >= 2)?;
            let mut b = Builder::new();
            b.wheel("w", "c", 2 * k, &[]);
            let last = format!("w{}", 2 * k - 1);
            b.finish(name, &["w0", &last])
        }
        Family::WheelSegment(t) => {
            range((1..=6).contains(&t))?;
            let w8 = build_family(Family::Wheel(4))?;
            let mut keep: Vec<String> = vec!["w7".into(), "c".into()];
            keep.extend((0..t).map(|i| format!("w{i}")));
            let keep: Vec<&str> = keep.iter().map(|s| s.as_str()).collect();
            let mut p = w8.induced(&w8.ids(&keep)?)?;
            p.name = name;
            Ok(p)
        }
        Family::W(i) => {
            range((1..=7).contains(&i))?;
            let mut b = Builder::new();
            w_i(&mut b, i);
            b.finish(name, &["d", "a7"])
        }
        Family::Wij(i, j) => {
            range(index_t().contains(&(i, j)))?;
            let mut b = Builder::new();
            w_i(&mut b, i);
            let (bj, bjm1) = (b.id(&format!("b{j}")), b.id(&format!("b{}", j - 1)));
            b.wheel("t", "ct", 8, &[(7, bj), (0, bjm1)]);
            b.finish(name, &["d", "a7"])
        }
        Family::Bowtie => {
            let mut b = Builder::new();
            for v in ["u", "v", "a1", "a2", "b1", "b2", "c"] {
                b.vertex(v.into());
            }
            for (x, y) in [
                ("u", "a1"),
                ("u", "a2"),
                ("a1", "a2"),
                ("a1", "c"),
                ("a2", "c"),
                ("v", "b1"),
                ("v", "b2"),
                ("b1", "b2"),
                ("b1", "c"),
                ("b2", "c"),
            ] {
                let (x, y) = (b.id(x), b.id(y));
                b.edge(x, y);
            }
            b.finish(name, &["u", "v"])
        }
    }
}
