//! Simple undirected graphs: parsing, generation and complement.
//!
//! Vertices are dense integers `0..n`. Edges are stored once as `(u, v)` with
//! `u < v`, sorted lexicographically, so two graphs with the same edge set
//! compare equal regardless of how they were built.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph, normalizing each pair to `u < v` and removing duplicates.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph(
                "graph needs at least one vertex".into(),
            ));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) has an endpoint >= n = {n}"
                )));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self {
            n,
            edges: set.into_iter().collect(),
        })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, std::iter::empty())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn complement(&self) -> Graph {
        let mut edges = Vec::with_capacity(self.n * (self.n - 1) / 2 - self.m());
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    edges.push((u, v));
                }
            }
        }
        Graph { n: self.n, edges }
    }

    /// Returns a copy with one extra edge.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Graph> {
        Graph::new(self.n, self.edges.iter().copied().chain([(u, v)]))
    }

    /// Canonical edge-list text: an `n` header followed by one sorted edge per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={})", self.n, self.m())
    }
}

fn parse_vertex(token: &str, line: usize) -> Result<usize> {
    token.parse::<usize>().map_err(|_| Error::Parse {
        line,
        message: format!("expected a non-negative integer, found `{token}`"),
    })
}

/// Parses the plain edge-list format.
///
/// Each line is `u v`; `#` starts a comment line and blank lines are skipped.
/// An optional `n <count>` line fixes the vertex count, otherwise it is one more
/// than the largest label seen.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared_n = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens[0] == "n" {
            if tokens.len() != 2 {
                return Err(Error::Parse {
                    line,
                    message: "header must be `n <count>`".into(),
                });
            }
            if declared_n.is_some() || !edges.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: "`n` header must come first and only once".into(),
                });
            }
            let n = parse_vertex(tokens[1], line)?;
            if n == 0 {
                return Err(Error::Parse {
                    line,
                    message: "vertex count must be positive".into(),
                });
            }
            declared_n = Some(n);
            continue;
        }
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected `u v`, found {} tokens", tokens.len()),
            });
        }
        let u = parse_vertex(tokens[0], line)?;
        let v = parse_vertex(tokens[1], line)?;
        if u == v {
            return Err(Error::Parse {
                line,
                message: format!("self-loop at vertex {u}"),
            });
        }
        if let Some(n) = declared_n {
            if u.max(v) >= n {
                return Err(Error::Parse {
                    line,
                    message: format!("vertex {} >= declared n = {n}", u.max(v)),
                });
            }
        }
        edges.push((u, v));
    }
    let n = match declared_n {
        Some(n) => n,
        None => edges
            .iter()
            .map(|&(u, v)| u.max(v) + 1)
            .max()
            .ok_or(Error::Parse {
                line: 0,
                message: "no edges and no `n` header".into(),
            })?,
    };
    Graph::new(n, edges)
}

/// Parses DIMACS edge format (`p edge n m`, `e u v` with 1-based labels, `c` comments).
pub fn parse_dimacs(text: &str) -> Result<Graph> {
    let mut n = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        match tokens.first().copied() {
            None | Some("c") => {}
            Some("p") => {
                if tokens.len() < 3 || (tokens[1] != "edge" && tokens[1] != "col") {
                    return Err(Error::Parse {
                        line,
                        message: "expected `p edge <n> <m>`".into(),
                    });
                }
                let count = parse_vertex(tokens[2], line)?;
                if count == 0 {
                    return Err(Error::Parse {
                        line,
                        message: "vertex count must be positive".into(),
                    });
                }
                n = Some(count);
            }
            Some("e") => {
                let n = n.ok_or(Error::Parse {
                    line,
                    message: "edge line before `p edge` header".into(),
                })?;
                if tokens.len() != 3 {
                    return Err(Error::Parse {
                        line,
                        message: "expected `e u v`".into(),
                    });
                }
                let u = parse_vertex(tokens[1], line)?;
                let v = parse_vertex(tokens[2], line)?;
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(Error::Parse {
                        line,
                        message: format!("vertex out of range 1..={n}"),
                    });
                }
                if u == v {
                    return Err(Error::Parse {
                        line,
                        message: format!("self-loop at vertex {u}"),
                    });
                }
                edges.push((u - 1, v - 1));
            }
            Some(other) => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown line type `{other}`"),
                })
            }
        }
    }
    let n = n.ok_or(Error::Parse {
        line: 0,
        message: "missing `p edge` header".into(),
    })?;
    Graph::new(n, edges)
}

/// Parses either format, choosing DIMACS when a `p ` line is present.
pub fn parse_graph(text: &str) -> Result<Graph> {
    if text.lines().any(|l| l.trim_start().starts_with("p ")) {
        parse_dimacs(text)
    } else {
        parse_edge_list(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Complete,
    Cycle,
    Path,
    CompleteBipartite,
    Petersen,
    ErdosRenyi,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Complete => "complete",
            Family::Cycle => "cycle",
            Family::Path => "path",
            Family::CompleteBipartite => "complete_bipartite",
            Family::Petersen => "petersen",
            Family::ErdosRenyi => "erdos_renyi",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "complete" => Family::Complete,
            "cycle" => Family::Cycle,
            "path" => Family::Path,
            "complete_bipartite" => Family::CompleteBipartite,
            "petersen" => Family::Petersen,
            "erdos_renyi" => Family::ErdosRenyi,
            other => return Err(Error::UnknownFamily(other.to_string())),
        })
    }
}

/// Generates a member of a named family.
///
/// | family               | params                     |
/// |----------------------|----------------------------|
/// | `complete`           | `[n]`, n >= 1              |
/// | `cycle`              | `[n]`, n >= 3              |
/// | `path`               | `[n]`, n >= 1              |
/// | `complete_bipartite` | `[a, b]`, a, b >= 1        |
/// | `petersen`           | `[]`                       |
/// | `erdos_renyi`        | `[n, p_per_mille]`         |
///
/// Only `erdos_renyi` reads `seed`: each pair `u < v` in lexicographic order is
/// kept with probability `p / 1000`, drawn from a ChaCha8 stream seeded by `seed`.
pub fn named_graph(family: Family, params: &[usize], seed: u64) -> Result<Graph> {
    let bad = |message: &str| Error::InvalidParams {
        family: family.name().to_string(),
        message: message.to_string(),
    };
    let arity = match family {
        Family::Petersen => 0,
        Family::CompleteBipartite | Family::ErdosRenyi => 2,
        _ => 1,
    };
    if params.len() != arity {
        return Err(bad(&format!(
            "expected {arity} parameter(s), got {}",
            params.len()
        )));
    }
    match family {
        Family::Complete => {
            let n = params[0];
            if n == 0 {
                return Err(bad("n must be >= 1"));
            }
            Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
        }
        Family::Cycle => {
            let n = params[0];
            if n < 3 {
                return Err(bad("cycle needs n >= 3"));
            }
            Graph::new(n, (0..n).map(|u| (u, (u + 1) % n)))
        }
        Family::Path => {
            let n = params[0];
            if n == 0 {
                return Err(bad("n must be >= 1"));
            }
            Graph::new(n, (1..n).map(|u| (u - 1, u)))
        }
        Family::CompleteBipartite => {
            let (a, b) = (params[0], params[1]);
            if a == 0 || b == 0 {
                return Err(bad("both sides must be non-empty"));
            }
            Graph::new(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))))
        }
        Family::Petersen => {
            // Kneser graph K(5, 2): 2-subsets of {0..5}, adjacent when disjoint.
            let subsets: Vec<(usize, usize)> = (0..5)
                .flat_map(|i| (i + 1..5).map(move |j| (i, j)))
                .collect();
            let mut edges = Vec::new();
            for (x, &(a, b)) in subsets.iter().enumerate() {
                for (y, &(c, d)) in subsets.iter().enumerate().skip(x + 1) {
                    if a != c && a != d && b != c && b != d {
                        edges.push((x, y));
                    }
                }
            }
            Graph::new(10, edges)
        }
        Family::ErdosRenyi => {
            let (n, per_mille) = (params[0], params[1]);
            if n == 0 {
                return Err(bad("n must be >= 1"));
            }
            if per_mille > 1000 {
                return Err(bad("edge probability is given in per-mille, 0..=1000"));
            }
            let coin =
                Bernoulli::from_ratio(per_mille as u32, 1000).map_err(|e| bad(&e.to_string()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if coin.sample(&mut rng) {
                        edges.push((u, v));
                    }
                }
            }
            Graph::new(n, edges)
        }
    }
}

/// Parses a family spec such as `cycle:5`, `complete_bipartite:2:3` or `petersen`.
pub fn parse_family_spec(spec: &str) -> Result<(Family, Vec<usize>)> {
    let mut parts = spec.split(':');
    let family: Family = parts.next().unwrap_or_default().parse()?;
    let params = parts
        .map(|p| {
            p.parse::<usize>().map_err(|_| Error::InvalidParams {
                family: family.name().to_string(),
                message: format!("`{p}` is not a non-negative integer"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((family, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_edge_list() {
        let g = parse_edge_list("0 1\n1 2").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn header_keeps_isolated_vertices() {
        let g = parse_edge_list("n 4\n0 1").unwrap();
        assert_eq!((g.n(), g.m()), (4, 1));
        assert_eq!(g.degrees()[3], 0);
    }

    #[test]
    fn comments_and_duplicates() {
        let g = parse_edge_list("# triangle\n0 1\n1 0\n\n1 2\n2 0\n").unwrap();
        assert_eq!(g.m(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        let err = parse_edge_list("0 0").unwrap_err();
        assert!(err.to_string().contains("self-loop"), "{err}");
        assert!(matches!(err, Error::Parse { line: 1, .. }));

        let err = parse_edge_list("n 3\n0 1\n1 3").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");

        let err = parse_edge_list("0 x").unwrap_err();
        assert!(err.to_string().contains("`x`"));

        assert!(parse_edge_list("0 -1").is_err());
        assert!(parse_edge_list("0 1 2").is_err());
        assert!(parse_edge_list("# nothing").is_err());
    }

    #[test]
    fn dimacs_is_one_based() {
        let text = "c comment\np edge 4 2\ne 1 2\ne 3 4\n";
        let g = parse_dimacs(text).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edges(), &[(0, 1), (2, 3)]);
        assert_eq!(parse_graph(text).unwrap(), g);
        assert!(parse_dimacs("p edge 2 1\ne 0 1\n").is_err());
        assert!(parse_dimacs("e 1 2\n").is_err());
        assert!(parse_dimacs("p edge 2 1\ne 2 2\n").is_err());
    }

    #[test]
    fn complement_of_complete_is_empty() {
        let k4 = named_graph(Family::Complete, &[4], 0).unwrap();
        let c = k4.complement();
        assert_eq!((c.n(), c.m()), (4, 0));
    }

    #[test]
    fn complement_of_c5_is_a_five_cycle() {
        let c = named_graph(Family::Cycle, &[5], 0).unwrap().complement();
        assert_eq!(c.m(), 5);
        assert!(c.degrees().iter().all(|&d| d == 2));
        // 2-regular on 5 vertices is a single cycle iff walking from 0 visits everything.
        let (mut prev, mut cur, mut seen) = (usize::MAX, 0, 1);
        loop {
            let next = (0..5).find(|&w| w != prev && c.has_edge(cur, w)).unwrap();
            if next == 0 {
                break;
            }
            prev = cur;
            cur = next;
            seen += 1;
        }
        assert_eq!(seen, 5);
    }

    #[test]
    fn families() {
        let k3 = named_graph(Family::Complete, &[3], 0).unwrap();
        assert_eq!(k3.m(), 3);
        let p = named_graph(Family::Petersen, &[], 0).unwrap();
        assert_eq!((p.n(), p.m()), (10, 15));
        assert!(p.degrees().iter().all(|&d| d == 3));
        // girth 5: no triangles and no 4-cycles
        for u in 0..10 {
            for v in 0..10 {
                if u != v && !p.has_edge(u, v) {
                    let common = (0..10)
                        .filter(|&w| p.has_edge(u, w) && p.has_edge(v, w))
                        .count();
                    assert_eq!(common, 1);
                } else if p.has_edge(u, v) {
                    assert!((0..10).all(|w| !(p.has_edge(u, w) && p.has_edge(v, w))));
                }
            }
        }
        let kab = named_graph(Family::CompleteBipartite, &[2, 3], 0).unwrap();
        assert_eq!((kab.n(), kab.m()), (5, 6));
        let path = named_graph(Family::Path, &[4], 0).unwrap();
        assert_eq!(path.m(), 3);
        assert!(named_graph(Family::Cycle, &[2], 0).is_err());
        assert!(named_graph(Family::Cycle, &[], 0).is_err());
        assert!(named_graph(Family::ErdosRenyi, &[5, 1001], 0).is_err());
    }

    #[test]
    fn erdos_renyi_is_seeded() {
        let a = named_graph(Family::ErdosRenyi, &[12, 400], 9).unwrap();
        let b = named_graph(Family::ErdosRenyi, &[12, 400], 9).unwrap();
        let c = named_graph(Family::ErdosRenyi, &[12, 400], 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(
            named_graph(Family::ErdosRenyi, &[6, 1000], 1).unwrap().m(),
            15
        );
        assert_eq!(named_graph(Family::ErdosRenyi, &[6, 0], 1).unwrap().m(), 0);
    }

    #[test]
    fn family_specs() {
        assert_eq!(
            parse_family_spec("complete_bipartite:2:3").unwrap(),
            (Family::CompleteBipartite, vec![2, 3])
        );
        assert_eq!(
            parse_family_spec("petersen").unwrap(),
            (Family::Petersen, vec![])
        );
        assert!(matches!(
            parse_family_spec("wheel:5"),
            Err(Error::UnknownFamily(_))
        ));
        assert!(parse_family_spec("cycle:x").is_err());
    }
}
