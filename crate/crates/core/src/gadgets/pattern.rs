//! Small pattern graphs with a root set.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{FtdError, Result};
use crate::graph::{Edge, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexClass {
    R,
    G,
    O,
    P,
    B,
}

impl VertexClass {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "R" => VertexClass::R,
            "G" => VertexClass::G,
            "O" => VertexClass::O,
            "P" => VertexClass::P,
            "B" => VertexClass::B,
            _ => return None,
        })
    }
}

impl fmt::Display for VertexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VertexClass::R => "R",
            VertexClass::G => "G",
            VertexClass::O => "O",
            VertexClass::P => "P",
            VertexClass::B => "B",
        };
        f.write_str(s)
    }
}

/// Distinguished vertices `ς` and `β` of a marked edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    Sigma,
    Beta,
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mark::Sigma => "sigma",
            Mark::Beta => "beta",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedPattern {
    pub name: String,
    pub graph: Graph,
    /// Sorted, duplicate-free.
    roots: Vec<u32>,
    labels: Vec<String>,
    /// Extra names for vertices that were identified while building.
    aliases: Vec<(String, u32)>,
    classes: Vec<(VertexClass, Vec<u32>)>,
    marks: Vec<(Mark, u32)>,
}

fn check_vertices(n: usize, vs: &[u32]) -> Result<Vec<u32>> {
    let mut out = vs.to_vec();
    out.sort_unstable();
    out.dedup();
    if out.len() != vs.len() {
        return Err(FtdError::InvalidInput("repeated vertex in set".into()));
    }
    if let Some(&v) = out.iter().find(|&&v| v as usize >= n) {
        return Err(FtdError::InvalidInput(format!(
            "vertex {v} out of range (n = {n})"
        )));
    }
    Ok(out)
}

impl RootedPattern {
    pub fn new(name: impl Into<String>, graph: Graph, roots: &[u32]) -> Result<Self> {
        let roots = check_vertices(graph.n(), roots)?;
        let labels = (0..graph.n()).map(|v| v.to_string()).collect();
        Ok(RootedPattern {
            name: name.into(),
            graph,
            roots,
            labels,
            aliases: Vec::new(),
            classes: Vec::new(),
            marks: Vec::new(),
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.graph.n());
        self.labels = labels;
        self
    }

    pub fn with_alias(mut self, name: impl Into<String>, v: u32) -> Self {
        self.aliases.push((name.into(), v));
        self
    }

    /// Same graph and names, different roots.
    pub fn with_roots(&self, roots: &[u32]) -> Result<Self> {
        let mut p = self.clone();
        p.roots = check_vertices(self.graph.n(), roots)?;
        Ok(p)
    }

    /// Same graph and names, roots looked up by name.
    pub fn with_named_roots(&self, names: &[&str]) -> Result<Self> {
        let ids = self.ids(names)?;
        self.with_roots(&ids)
    }

    pub fn with_classes(mut self, classes: Vec<(VertexClass, Vec<u32>)>) -> Result<Self> {
        let mut seen = vec![false; self.graph.n()];
        for (_, vs) in &classes {
            for &v in &check_vertices(self.graph.n(), vs)? {
                if std::mem::replace(&mut seen[v as usize], true) {
                    return Err(FtdError::InvalidInput(format!("vertex {v} in two classes")));
                }
            }
        }
        if !classes.is_empty() && seen.iter().any(|s| !s) {
            return Err(FtdError::InvalidInput(
                "classes must partition the vertex set".into(),
            ));
        }
        self.classes = classes;
        Ok(self)
    }

    pub fn with_marks(mut self, marks: Vec<(Mark, u32)>) -> Result<Self> {
        check_vertices(
            self.graph.n(),
            &marks.iter().map(|m| m.1).collect::<Vec<_>>(),
        )?;
        self.marks = marks;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn roots(&self) -> &[u32] {
        &self.roots
    }

    pub fn is_root(&self, v: u32) -> bool {
        self.roots.binary_search(&v).is_ok()
    }

    /// Non-root vertices in increasing order.
    pub fn free_vertices(&self) -> Vec<u32> {
        (0..self.n() as u32).filter(|&v| !self.is_root(v)).collect()
    }

    pub fn label(&self, v: u32) -> &str {
        &self.labels[v as usize]
    }

    pub fn vertex(&self, name: &str) -> Option<u32> {
        self.labels
            .iter()
            .position(|l| l == name)
            .map(|v| v as u32)
            .or_else(|| self.aliases.iter().find(|a| a.0 == name).map(|a| a.1))
    }

    pub fn ids(&self, names: &[&str]) -> Result<Vec<u32>> {
        names
            .iter()
            .map(|s| {
                self.vertex(s).ok_or_else(|| {
                    FtdError::InvalidInput(format!("{}: no vertex named `{s}`", self.name))
                })
            })
            .collect()
    }

    /// `{a, b, …}` using vertex labels.
    pub fn describe(&self, set: &[u32]) -> String {
        let names: Vec<&str> = set.iter().map(|&v| self.label(v)).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn classes(&self) -> &[(VertexClass, Vec<u32>)] {
        &self.classes
    }

    pub fn class(&self, c: VertexClass) -> Vec<u32> {
        self.classes
            .iter()
            .filter(|(k, _)| *k == c)
            .flat_map(|(_, vs)| vs.iter().copied())
            .collect()
    }

    pub fn marks(&self) -> &[(Mark, u32)] {
        &self.marks
    }

    /// Sub-pattern induced on `keep`, relabelled in increasing order of the
    /// old ids; roots are intersected with `keep`, classes and marks dropped.
    pub fn induced(&self, keep: &[u32]) -> Result<Self> {
        let keep = check_vertices(self.n(), keep)?;
        let pos = |v: u32| keep.binary_search(&v).ok().map(|i| i as u32);
        let edges: Vec<Edge> = self
            .graph
            .edges()
            .iter()
            .filter_map(|&(a, b)| Some((pos(a)?, pos(b)?)))
            .collect();
        let graph = Graph::from_edges(keep.len(), edges)?;
        let roots: Vec<u32> = self.roots.iter().filter_map(|&r| pos(r)).collect();
        let labels = keep
            .iter()
            .map(|&v| self.labels[v as usize].clone())
            .collect();
        let aliases = self
            .aliases
            .iter()
            .filter_map(|(s, v)| Some((s.clone(), pos(*v)?)))
            .collect();
        Ok(RootedPattern {
            name: self.name.clone(),
            graph,
            roots,
            labels,
            aliases,
            classes: Vec::new(),
            marks: Vec::new(),
        })
    }

    /// Adds edges, keeping names, roots, classes and marks.
    pub fn with_extra_edges(&self, extra: &[Edge]) -> Result<Self> {
        let mut edges = self.graph.edges().to_vec();
        edges.extend_from_slice(extra);
        let mut p = self.clone();
        p.graph = Graph::from_edges(self.n(), edges)?;
        Ok(p)
    }

    /// Text format: `name`, `n m`, edge lines, `S: ids`, then optional
    /// `class <R|G|O|P|B>: ids` and `mark <sigma|beta>: id` lines.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let join = |vs: &[u32]| {
            vs.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "{}", self.name)?;
        writeln!(out, "{} {}", self.n(), self.graph.m())?;
        for &(u, v) in self.graph.edges() {
            writeln!(out, "{u} {v}")?;
        }
        writeln!(out, "S: {}", join(&self.roots))?;
        for (c, vs) in &self.classes {
            writeln!(out, "class {c}: {}", join(vs))?;
        }
        for (m, v) in &self.marks {
            writeln!(out, "mark {m}: {v}")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if !t.is_empty() && !t.starts_with('#') {
                lines.push((i + 1, t.to_string()));
            }
        }
        let mut it = lines.into_iter();
        let (_, name) = it
            .next()
            .ok_or_else(|| FtdError::parse(0, "empty pattern file"))?;
        let (ln, header) = it
            .next()
            .ok_or_else(|| FtdError::parse(0, "missing `n m` header"))?;
        let hdr: Vec<usize> = header
            .split_whitespace()
            .map(|s| {
                s.parse()
                    .map_err(|_| FtdError::parse(ln, "bad `n m` header"))
            })
            .collect::<Result<_>>()?;
        let [n, m] = hdr[..] else {
            return Err(FtdError::parse(ln, "expected `n m`"));
        };
        let ids = |ln: usize, s: &str| -> Result<Vec<u32>> {
            s.split_whitespace()
                .map(|x| {
                    x.parse::<u32>()
                        .map_err(|_| FtdError::parse(ln, format!("bad vertex `{x}`")))
                })
                .collect()
        };
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (ln, l) = it
                .next()
                .ok_or_else(|| FtdError::parse(0, "fewer edge lines than declared"))?;
            let e = ids(ln, &l)?;
            let [a, b] = e[..] else {
                return Err(FtdError::parse(ln, "expected `u v`"));
            };
            edges.push((a, b));
        }
        let graph = Graph::from_edges(n, edges).map_err(|e| FtdError::parse(ln, e.to_string()))?;
        let mut roots = None;
        let mut classes = Vec::new();
        let mut marks = Vec::new();
        for (ln, l) in it {
            let (key, rest) = l
                .split_once(':')
                .ok_or_else(|| FtdError::parse(ln, "expected `key: ids`"))?;
            let key: Vec<&str> = key.split_whitespace().collect();
            let vs = ids(ln, rest)?;
            match key[..] {
                ["S"] => roots = Some(vs),
                ["class", c] => {
                    let c = VertexClass::parse(c)
                        .ok_or_else(|| FtdError::parse(ln, format!("unknown class `{c}`")))?;
                    classes.push((c, vs));
                }
                ["mark", which] => {
                    let mk = match which {
                        "sigma" => Mark::Sigma,
                        "beta" => Mark::Beta,
                        _ => return Err(FtdError::parse(ln, format!("unknown mark `{which}`"))),
                    };
                    let [v] = vs[..] else {
                        return Err(FtdError::parse(ln, "a mark names one vertex"));
                    };
                    marks.push((mk, v));
                }
                _ => return Err(FtdError::parse(ln, format!("unknown line `{l}`"))),
            }
        }
        let roots = roots.ok_or_else(|| FtdError::parse(0, "missing `S:` line"))?;
        let p = RootedPattern::new(name, graph, &roots)
            .map_err(|e| FtdError::parse(0, e.to_string()))?;
        p.with_classes(classes)
            .and_then(|p| p.with_marks(marks))
            .map_err(|e| FtdError::parse(0, e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RootedPattern {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        RootedPattern::new("paw", g, &[0])
            .unwrap()
            .with_classes(vec![
                (VertexClass::R, vec![0]),
                (VertexClass::G, vec![1, 2, 3]),
            ])
            .unwrap()
            .with_marks(vec![(Mark::Sigma, 2), (Mark::Beta, 3)])
            .unwrap()
    }

    #[test]
    fn roundtrip() {
        let p = sample();
        let mut buf = Vec::new();
        p.write_to(&mut buf).unwrap();
        let q = RootedPattern::read_from(&buf[..]).unwrap();
        assert_eq!(q.graph, p.graph);
        assert_eq!(q.roots(), p.roots());
        assert_eq!(q.classes(), p.classes());
        assert_eq!(q.marks(), p.marks());
        assert_eq!(q.class(VertexClass::G), vec![1, 2, 3]);
    }

    #[test]
    fn rejects_bad_files() {
        for text in [
            "",
            "x\n3 1\n0 1\n",
            "x\n3 1\n0 5\nS: 0\n",
            "x\n3 0\nS: 0\nclass Q: 1\n",
            "x\n3 0\nS: 0\nclass R: 0 1\n",
            "x\n3 0\nS: 0 0\n",
        ] {
            assert!(
                RootedPattern::read_from(text.as_bytes()).is_err(),
                "{text:?}"
            );
        }
    }

    #[test]
    fn induced_keeps_labels_and_roots() {
        let p = sample().with_labels(vec!["a".into(), "b".into(), "c".into(), "d".into()]);
        let q = p.induced(&[0, 2, 3]).unwrap();
        assert_eq!(q.graph.m(), 2);
        assert_eq!(q.roots(), &[0]);
        assert_eq!(q.vertex("d"), Some(2));
        assert_eq!(q.describe(&[1, 2]), "{c,d}");
    }
}
