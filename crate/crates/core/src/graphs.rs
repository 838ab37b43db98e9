//! Deterministic labelled graphs presenting binary constrained systems.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest label a graph may carry; labels are packed into a `u64`.
pub const MAX_LABEL_BITS: usize = 63;

/// Upper limit on generated state or edge counts for the builtin families.
pub const MAX_GENERATED: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    /// Label bits, first symbol in the most significant of the `s` low bits.
    pub label: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabelledGraph {
    s: usize,
    states: Vec<String>,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
}

impl LabelledGraph {
    /// Builds a graph, rejecting bad label lengths, dangling references and
    /// nondeterminism.
    pub fn new(s: usize, states: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        if s == 0 || s > MAX_LABEL_BITS {
            return Err(Error::Malformed(format!(
                "label length s must be in 1..={MAX_LABEL_BITS}, got {s}"
            )));
        }
        if states.is_empty() {
            return Err(Error::Malformed("graph has no states".into()));
        }
        let mut seen = HashMap::new();
        for (i, name) in states.iter().enumerate() {
            if seen.insert(name.as_str(), i).is_some() {
                return Err(Error::Malformed(format!("duplicate state {name:?}")));
            }
        }
        let mut out = vec![Vec::new(); states.len()];
        let mut used: HashMap<(usize, u64), usize> = HashMap::new();
        for (k, e) in edges.iter().enumerate() {
            if e.from >= states.len() || e.to >= states.len() {
                return Err(Error::Malformed(format!("edge {k} references a missing state")));
            }
            if s < 64 && e.label >> s != 0 {
                return Err(Error::Malformed(format!("edge {k} label does not fit in {s} bits")));
            }
            if used.insert((e.from, e.label), k).is_some() {
                return Err(Error::Nondeterministic {
                    state: states[e.from].clone(),
                    label: format_label(e.label, s),
                });
            }
            out[e.from].push(k);
        }
        if edges.is_empty() {
            return Err(Error::Malformed("graph has no edges".into()));
        }
        Ok(LabelledGraph {
            s,
            states,
            edges,
            out,
        })
    }

    /// Builds a graph from state names and `(from, to, label)` string triples.
    pub fn from_named(s: usize, states: &[&str], edges: &[(&str, &str, &str)]) -> Result<Self> {
        let file = GraphFile {
            s,
            states: states.iter().map(|x| x.to_string()).collect(),
            edges: edges
                .iter()
                .map(|(f, t, l)| FileEdge {
                    from: f.to_string(),
                    to: t.to_string(),
                    label: l.to_string(),
                })
                .collect(),
        };
        file.into_graph()
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Indices into `edges()` of the edges leaving `state`.
    pub fn out_edges(&self, state: usize) -> impl Iterator<Item = &Edge> {
        self.out[state].iter().map(move |&k| &self.edges[k])
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn is_single_state(&self) -> bool {
        self.states.len() == 1
    }

    pub fn label_string(&self, label: u64) -> String {
        format_label(label, self.s)
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            s: self.s,
            states: self.states.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| FileEdge {
                    from: self.states[e.from].clone(),
                    to: self.states[e.to].clone(),
                    label: self.label_string(e.label),
                })
                .collect(),
        }
    }
}

pub fn format_label(label: u64, s: usize) -> String {
    (0..s)
        .rev()
        .map(|i| if label >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn parse_label(text: &str, s: usize) -> Result<u64> {
    if text.len() != s {
        return Err(Error::LabelLength {
            label: text.to_string(),
            expected: s,
            found: text.len(),
        });
    }
    let mut v = 0u64;
    for c in text.chars() {
        v = (v << 1)
            | match c {
                '0' => 0,
                '1' => 1,
                _ => {
                    return Err(Error::Malformed(format!(
                        "label {text:?} contains a non-binary symbol"
                    )))
                }
            };
    }
    Ok(v)
}

/// On-disk graph description.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub s: usize,
    pub states: Vec<String>,
    pub edges: Vec<FileEdge>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileEdge {
    pub from: String,
    pub to: String,
    pub label: String,
}

impl GraphFile {
    pub fn into_graph(self) -> Result<LabelledGraph> {
        if self.s == 0 || self.s > MAX_LABEL_BITS {
            return Err(Error::Malformed(format!(
                "label length s must be in 1..={MAX_LABEL_BITS}, got {}",
                self.s
            )));
        }
        let index: HashMap<&str, usize> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::Malformed(format!("edge references unknown state {name:?}")))
        };
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            edges.push(Edge {
                from: lookup(&e.from)?,
                to: lookup(&e.to)?,
                label: parse_label(&e.label, self.s)?,
            });
        }
        LabelledGraph::new(self.s, self.states, edges)
    }
}

/// Parses the JSON graph format.
pub fn parse_graph(text: &str) -> Result<LabelledGraph> {
    let file: GraphFile =
        serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    file.into_graph()
}

pub fn load_graph(path: &std::path::Path) -> Result<LabelledGraph> {
    let text = std::fs::read_to_string(path)?;
    parse_graph(&text)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    Unreachable { state: String },
    DeadEnd { state: String },
    Reducible { components: usize },
    Imprimitive { period: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Unreachable { state } => {
                write!(f, "state {state:?} is unreachable from the first state")
            }
            Diagnostic::DeadEnd { state } => write!(f, "state {state:?} has no outgoing edge"),
            Diagnostic::Reducible { components } => write!(
                f,
                "graph is reducible ({components} strongly connected components)"
            ),
            Diagnostic::Imprimitive { period } => {
                write!(f, "graph is irreducible but imprimitive with period {period}")
            }
        }
    }
}

/// Structural report for a graph that already passed the hard checks.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Validation {
    pub warnings: Vec<Diagnostic>,
    pub irreducible: bool,
    /// Period of the graph when irreducible.
    pub period: Option<usize>,
}

impl Validation {
    pub fn is_primitive(&self) -> bool {
        self.irreducible && self.period == Some(1)
    }
}

pub fn validate(g: &LabelledGraph) -> Validation {
    let n = g.num_states();
    let mut warnings = Vec::new();

    let reach = bfs_levels(g, 0);
    for (i, lvl) in reach.iter().enumerate() {
        if lvl.is_none() {
            warnings.push(Diagnostic::Unreachable {
                state: g.states[i].clone(),
            });
        }
    }
    for i in 0..n {
        if g.out[i].is_empty() {
            warnings.push(Diagnostic::DeadEnd {
                state: g.states[i].clone(),
            });
        }
    }

    let comps = scc_count(g);
    let irreducible = comps == 1;
    let mut period = None;
    if irreducible {
        let mut p = 0usize;
        for e in &g.edges {
            let (a, b) = (reach[e.from].unwrap(), reach[e.to].unwrap());
            p = gcd(p, (a + 1).abs_diff(b));
        }
        period = Some(p.max(1));
        if p > 1 {
            warnings.push(Diagnostic::Imprimitive { period: p });
        }
    } else {
        warnings.push(Diagnostic::Reducible { components: comps });
    }
    Validation {
        warnings,
        irreducible,
        period,
    }
}

fn bfs_levels(g: &LabelledGraph, start: usize) -> Vec<Option<usize>> {
    let mut level = vec![None; g.num_states()];
    level[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let lu = level[u].unwrap();
        for e in g.out_edges(u) {
            if level[e.to].is_none() {
                level[e.to] = Some(lu + 1);
                queue.push_back(e.to);
            }
        }
    }
    level
}

// Iterative Tarjan.
fn scc_count(g: &LabelledGraph) -> usize {
    let n = g.num_states();
    let adj: Vec<Vec<usize>> = (0..n).map(|u| g.out_edges(u).map(|e| e.to).collect()).collect();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next = 0;
    let mut count = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (u, ref mut pos)) = call.last_mut() {
            if *pos < adj[u].len() {
                let v = adj[u][*pos];
                *pos += 1;
                if index[v] == usize::MAX {
                    index[v] = next;
                    low[v] = next;
                    next += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    call.push((v, 0));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[u]);
                }
                if low[u] == index[u] {
                    count += 1;
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        if w == u {
                            break;
                        }
                    }
                }
            }
        }
    }
    count
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

fn window_name(u: u64, l: usize) -> String {
    let bits = format_label(u, l);
    match bits.find('1') {
        Some(first) => "x".repeat(first) + &bits[first..],
        None => "x".repeat(l),
    }
}

/// Sliding-window constraint: every window of `l` consecutive bits has weight
/// at least `w`. States track the positions of the `w` most recent ones.
pub fn build_swcc(l: usize, w: usize) -> Result<LabelledGraph> {
    if l == 0 || w > l || l > MAX_LABEL_BITS {
        return Err(Error::InvalidParameters(format!(
            "SWCC needs 1 <= L <= {MAX_LABEL_BITS} and 0 <= w <= L, got L={l}, w={w}"
        )));
    }
    if binomial(l, w) as usize > MAX_GENERATED {
        return Err(Error::InvalidParameters(format!(
            "SWCC({l},{w}) has too many states"
        )));
    }
    let mask = if l == 64 { u64::MAX } else { (1u64 << l) - 1 };
    let oldest = 1u64 << (l - 1);
    let step = |u: u64, b: u64| -> Option<u64> {
        let shifted = (u << 1) & mask;
        if b == 0 {
            (u & oldest == 0).then_some(shifted)
        } else {
            let mut v = shifted | 1;
            if u & oldest == 0 {
                v &= !(1u64 << (63 - v.leading_zeros()));
            }
            Some(v)
        }
    };

    let start = if w == 0 { 0 } else { (1u64 << w) - 1 };
    let mut index: HashMap<u64, usize> = HashMap::from([(start, 0)]);
    let mut order = vec![start];
    let mut edges = Vec::new();
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        for b in [0u64, 1] {
            if let Some(v) = step(u, b) {
                let next = index.len();
                let to = *index.entry(v).or_insert_with(|| {
                    order.push(v);
                    next
                });
                edges.push(Edge {
                    from: head,
                    to,
                    label: b,
                });
            }
        }
        head += 1;
    }
    let states = order.iter().map(|&u| window_name(u, l)).collect();
    LabelledGraph::new(1, states, edges)
}

/// Run-length-limited constraint: runs of zeros between ones have length in `d..=k`.
/// State `i` counts the zeros since the last one.
pub fn build_rll(d: usize, k: usize) -> Result<LabelledGraph> {
    if d > k {
        return Err(Error::InvalidParameters(format!(
            "RLL needs 0 <= d <= k, got d={d}, k={k}"
        )));
    }
    if k >= MAX_GENERATED {
        return Err(Error::InvalidParameters(format!("RLL k={k} is too large")));
    }
    let states = (0..=k).map(|i| i.to_string()).collect();
    let mut edges = Vec::new();
    for i in 0..=k {
        if i < k {
            edges.push(Edge {
                from: i,
                to: i + 1,
                label: 0,
            });
        }
        if i >= d {
            edges.push(Edge {
                from: i,
                to: 0,
                label: 1,
            });
        }
    }
    LabelledGraph::new(1, states, edges)
}

fn check_secc(l: usize, w: usize, limit: usize) -> Result<()> {
    if l == 0 || w > l || l > limit {
        return Err(Error::InvalidParameters(format!(
            "SECC needs 1 <= L <= {limit} and 0 <= w <= L, got L={l}, w={w}"
        )));
    }
    Ok(())
}

/// Subblock energy constraint as a single-state graph: one self-loop per
/// `l`-bit word of weight at least `w`.
pub fn build_secc(l: usize, w: usize) -> Result<LabelledGraph> {
    check_secc(l, w, 20)?;
    let edges = (0..1u64 << l)
        .filter(|v| v.count_ones() as usize >= w)
        .map(|v| Edge {
            from: 0,
            to: 0,
            label: v,
        })
        .collect();
    LabelledGraph::new(l, vec!["s".into()], edges)
}

/// The same constraint with one-bit labels. State `j:c` is at position `j`
/// inside the block having seen `c` ones (capped at `w`).
pub fn build_secc_multistate(l: usize, w: usize) -> Result<LabelledGraph> {
    check_secc(l, w, MAX_LABEL_BITS)?;
    let next = |(j, c): (usize, usize), b: usize| -> Option<(usize, usize)> {
        let c2 = (c + b).min(w);
        if j + 1 == l {
            (c2 == w).then_some((0, 0))
        } else {
            // prune prefixes that can no longer reach weight w
            (c2 + (l - j - 1) >= w).then_some((j + 1, c2))
        }
    };
    let mut index = HashMap::from([((0usize, 0usize), 0usize)]);
    let mut order = vec![(0usize, 0usize)];
    let mut edges = Vec::new();
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        for b in [0usize, 1] {
            if let Some(v) = next(u, b) {
                let fresh = index.len();
                let to = *index.entry(v).or_insert_with(|| {
                    order.push(v);
                    fresh
                });
                edges.push(Edge {
                    from: head,
                    to,
                    label: b as u64,
                });
            }
        }
        head += 1;
    }
    let states = order.iter().map(|(j, c)| format!("{j}:{c}")).collect();
    LabelledGraph::new(1, states, edges)
}
