//! Words in the fundamental group of a graph of groups and the word
//! problem.
//!
//! The group is generated by all vertex groups together with one symbol
//! per half-edge, subject to: the reverse half-edge is the inverse; for
//! every edge `e` and edge-group element `s`, traversing `e`, applying the
//! far-side embedding of `s`, and coming back equals the near-side
//! embedding of `s`; and every tree half-edge equals the identity.
//!
//! A raw word is an arbitrary letter sequence. To decide anything we first
//! route it into a path based at the tree root (inserting tree-geodesic
//! edge letters, which are trivial), then run pinch reduction until no
//! subword `e . g . reverse(e)` with `g` in the far-side image remains,
//! and finally rewrite every element preceding an edge letter into its
//! canonical representative modulo the image of that edge's embedding,
//! pushing the quotient through the edge. The result is a canonical normal
//! form; two words are equal in the group exactly when their normal forms
//! coincide. (Tree letters are kept as genuine path letters rather than
//! deleted: routing every comparison through the same root-based
//! geodesics is what makes cross-vertex identifications come out equal.)

use std::fmt;
use std::sync::Arc;

use crate::abelian::{AbElement, CosetReducer, ImageSolver};
use crate::error::{Error, Result};
use crate::gog::{GraphOfGroups, InducedMap, SpanningTree};
use crate::intmat::Int;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Letter {
    /// An element of the group at the given vertex.
    Vertex(usize, AbElement),
    /// A half-edge symbol.
    Edge(usize),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GroupWord {
    pub letters: Vec<Letter>,
}

impl GroupWord {
    pub fn empty() -> Self {
        GroupWord { letters: Vec::new() }
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        GroupWord { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// Canonical form of a group element as a based path
/// `r_0 e_1 r_1 e_2 ... e_k g`: coset representatives `r_i` before each
/// edge letter, a full group element `g` at the end vertex, no pinches.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NormalForm {
    base: usize,
    end: usize,
    head: Vec<(AbElement, usize)>,
    tail: AbElement,
}

impl NormalForm {
    pub fn base(&self) -> usize {
        self.base
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn head(&self) -> &[(AbElement, usize)] {
        &self.head
    }

    pub fn tail(&self) -> &AbElement {
        &self.tail
    }

    pub fn edge_count(&self) -> usize {
        self.head.len()
    }

    /// For a based loop: true exactly when the element is the identity.
    pub fn is_identity(&self) -> bool {
        self.head.is_empty() && self.tail.is_zero()
    }

    /// The coset of the group at `end()` this form represents: normal
    /// forms of words `w` and `w'` have equal keys exactly when
    /// `w` and `w'` differ by a right factor from that group.
    pub fn coset_key(&self) -> (usize, Vec<(AbElement, usize)>) {
        (self.end, self.head.clone())
    }

    /// Reconstitute as a word (zero vertex elements omitted). Each head
    /// element sits at the origin vertex of the edge it precedes.
    pub fn to_word(&self, g: &GraphOfGroups) -> GroupWord {
        let mut letters = Vec::new();
        for (r, e) in &self.head {
            if !r.is_zero() {
                letters.push(Letter::Vertex(g.edge(*e).from, r.clone()));
            }
            letters.push(Letter::Edge(*e));
        }
        if !self.tail.is_zero() {
            letters.push(Letter::Vertex(self.end, self.tail.clone()));
        }
        GroupWord { letters }
    }
}

/// The fundamental group of a validated graph of groups with respect to
/// its deterministic maximal tree, with cached per-edge solvers.
pub struct Pi1 {
    graph: Arc<GraphOfGroups>,
    tree: SpanningTree,
    solvers: Vec<ImageSolver>,
    reducers: Vec<CosetReducer>,
}

impl Pi1 {
    pub fn new(graph: GraphOfGroups) -> Result<Self> {
        let report = graph.validate();
        if !report.is_valid() {
            return Err(Error::InvalidGraph(report.failures.join("; ")));
        }
        let tree = graph.maximal_tree();
        let mut solvers = Vec::with_capacity(graph.edge_count());
        let mut reducers = Vec::with_capacity(graph.edge_count());
        for e in 0..graph.edge_count() {
            solvers.push(graph.edge(e).map.solver());
            reducers.push(graph.edge(e).map.coset_reducer()?);
        }
        Ok(Pi1 { graph: Arc::new(graph), tree, solvers, reducers })
    }

    pub fn graph(&self) -> &GraphOfGroups {
        &self.graph
    }

    pub fn graph_arc(&self) -> Arc<GraphOfGroups> {
        self.graph.clone()
    }

    pub fn tree(&self) -> &SpanningTree {
        &self.tree
    }

    pub fn root(&self) -> usize {
        self.tree.root
    }

    /// Solver for membership in the image of a half-edge's embedding.
    pub fn solver(&self, e: usize) -> &ImageSolver {
        &self.solvers[e]
    }

    /// Canonical-representative reducer modulo a half-edge's image.
    pub fn reducer(&self, e: usize) -> &CosetReducer {
        &self.reducers[e]
    }

    pub fn check_word(&self, w: &GroupWord) -> Result<()> {
        for letter in &w.letters {
            match letter {
                Letter::Vertex(v, x) => {
                    if *v >= self.graph.vertex_count() {
                        return Err(Error::UnknownId(format!("vertex index {v} out of range")));
                    }
                    if x.group().as_ref() != self.graph.vertex(*v).group.as_ref() {
                        return Err(Error::GroupMismatch(format!(
                            "letter at vertex {} carries an element of {}, expected {}",
                            self.graph.vertex(*v).id,
                            x.group(),
                            self.graph.vertex(*v).group
                        )));
                    }
                }
                Letter::Edge(e) => {
                    if *e >= self.graph.edge_count() {
                        return Err(Error::UnknownId(format!("edge index {e} out of range")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Rewrite `w` as a connected path from `base` to `end`, inserting
    /// tree-geodesic edge letters (trivial in the group) wherever
    /// consecutive letters do not meet.
    fn to_based_path(&self, w: &GroupWord, base: usize, end: usize) -> Vec<Letter> {
        let mut out = Vec::new();
        let mut cur = base;
        let walk_to = |out: &mut Vec<Letter>, cur: &mut usize, v: usize| {
            for e in self.tree.geodesic(&self.graph, *cur, v) {
                out.push(Letter::Edge(e));
            }
            *cur = v;
        };
        for letter in &w.letters {
            match letter {
                Letter::Vertex(v, x) => {
                    walk_to(&mut out, &mut cur, *v);
                    out.push(Letter::Vertex(*v, x.clone()));
                }
                Letter::Edge(e) => {
                    walk_to(&mut out, &mut cur, self.graph.edge(*e).from);
                    out.push(Letter::Edge(*e));
                    cur = self.graph.edge(*e).to;
                }
            }
        }
        walk_to(&mut out, &mut cur, end);
        out
    }

    /// The same element written as a loop at `base`.
    pub fn to_loop_form(&self, w: &GroupWord, base: usize) -> Result<GroupWord> {
        self.check_word(w)?;
        Ok(GroupWord { letters: self.to_based_path(w, base, base) })
    }

    /// Pinch reduction followed by canonical coset rewriting, on a word
    /// routed from the root to `end`.
    fn normalize(&self, w: &GroupWord, end: usize) -> Result<NormalForm> {
        self.check_word(w)?;
        let base = self.root();
        let path = self.to_based_path(w, base, end);
        // Alternating form: elements gs[0..=k] at the path's vertices,
        // edges es[0..k] between them.
        let mut gs: Vec<AbElement> = vec![AbElement::zero(&self.graph.vertex(base).group)];
        let mut vs: Vec<usize> = vec![base];
        let mut es: Vec<usize> = Vec::new();
        for letter in path {
            match letter {
                Letter::Vertex(_, x) => {
                    let g = gs.last_mut().expect("nonempty");
                    *g = g.add(&x)?;
                }
                Letter::Edge(e) => {
                    es.push(e);
                    let to = self.graph.edge(e).to;
                    gs.push(AbElement::zero(&self.graph.vertex(to).group));
                    vs.push(to);
                }
            }
        }
        // Pinch pass: a segment e . g . reverse(e) with g in the image of
        // the far-side embedding collapses to the near-side image of its
        // preimage. Each hit removes two edge letters; stepping back one
        // position after a hit catches pinches it uncovers.
        let mut i = 0;
        while i + 1 < es.len() {
            if es[i + 1] == self.graph.reverse(es[i]) {
                if let Some(s) = self.solvers[es[i + 1]].preimage(&gs[i + 1])? {
                    let a = self.graph.edge(es[i]).map.apply(&s)?;
                    let merged = gs[i].add(&a)?.add(&gs[i + 2])?;
                    gs[i] = merged;
                    gs.drain(i + 1..i + 3);
                    vs.drain(i + 1..i + 3);
                    es.drain(i..i + 2);
                    i = i.saturating_sub(1);
                    continue;
                }
            }
            i += 1;
        }
        // Coset pass, left to right: split each element before an edge
        // letter into canonical representative plus image part, and carry
        // the image part through the edge to the far side.
        for i in 0..es.len() {
            let r = self.reducers[es[i]].reduce(&gs[i])?;
            let diff = gs[i].sub(&r)?;
            let s = self.solvers[es[i]]
                .preimage(&diff)?
                .expect("split difference lies in the image by construction");
            let carried = self.graph.edge(self.graph.reverse(es[i])).map.apply(&s)?;
            gs[i] = r;
            gs[i + 1] = gs[i + 1].add(&carried)?;
        }
        let tail = gs.pop().expect("nonempty");
        let head = gs.into_iter().zip(es).collect();
        Ok(NormalForm { base, end, head, tail })
    }

    /// Normal form of `w` as a loop at the root.
    pub fn reduce(&self, w: &GroupWord) -> Result<NormalForm> {
        self.normalize(w, self.root())
    }

    /// Normal form of `w` routed to `v`; its `coset_key` identifies the
    /// coset `w . (group at v)`.
    pub fn coset_normal_form(&self, w: &GroupWord, v: usize) -> Result<NormalForm> {
        self.normalize(w, v)
    }

    pub fn is_trivial(&self, w: &GroupWord) -> Result<bool> {
        Ok(self.reduce(w)?.is_identity())
    }

    pub fn equal(&self, w1: &GroupWord, w2: &GroupWord) -> Result<bool> {
        Ok(self.reduce(w1)? == self.reduce(w2)?)
    }

    /// Concatenation (the group operation on words).
    pub fn multiply(&self, w1: &GroupWord, w2: &GroupWord) -> Result<GroupWord> {
        self.check_word(w1)?;
        self.check_word(w2)?;
        let mut letters = w1.letters.clone();
        letters.extend(w2.letters.iter().cloned());
        Ok(GroupWord { letters })
    }

    /// Reversed sequence with negated elements and reversed edges.
    pub fn invert(&self, w: &GroupWord) -> Result<GroupWord> {
        self.check_word(w)?;
        let letters = w
            .letters
            .iter()
            .rev()
            .map(|l| match l {
                Letter::Vertex(v, x) => Letter::Vertex(*v, x.neg()),
                Letter::Edge(e) => Letter::Edge(self.graph.reverse(*e)),
            })
            .collect();
        Ok(GroupWord { letters })
    }

    /// Parse the word grammar: whitespace-separated tokens, `id[a,b,...]`
    /// for a vertex element, `id` / `~id` for edge letters.
    pub fn parse_word(&self, text: &str) -> Result<GroupWord> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            if let Some(open) = token.find('[') {
                let id = &token[..open];
                let rest = &token[open + 1..];
                let inner = rest.strip_suffix(']').ok_or_else(|| {
                    Error::Parse(format!("token {token:?}: missing closing bracket"))
                })?;
                let v = self
                    .graph
                    .vertex_by_id(id)
                    .map_err(|_| Error::Parse(format!("token {token:?}: unknown vertex {id:?}")))?;
                let mut coords = Vec::new();
                if !inner.is_empty() {
                    for part in inner.split(',') {
                        let c: Int = part.trim().parse().map_err(|_| {
                            Error::Parse(format!("token {token:?}: bad integer {part:?}"))
                        })?;
                        coords.push(c);
                    }
                }
                let el = AbElement::new(&self.graph.vertex(v).group, coords)
                    .map_err(|e| Error::Parse(format!("token {token:?}: {e}")))?;
                letters.push(Letter::Vertex(v, el));
            } else {
                let e = self.graph.edge_by_id(token).map_err(|_| {
                    Error::Parse(format!("token {token:?}: not an edge id or vertex element"))
                })?;
                letters.push(Letter::Edge(e));
            }
        }
        Ok(GroupWord { letters })
    }

    /// Inverse of `parse_word`; empty words print as `1`.
    pub fn format_word(&self, w: &GroupWord) -> String {
        if w.letters.is_empty() {
            return "1".to_string();
        }
        let parts: Vec<String> = w
            .letters
            .iter()
            .map(|l| match l {
                Letter::Vertex(v, x) => {
                    let coords: Vec<String> =
                        x.coords().iter().map(|c| c.to_string()).collect();
                    format!("{}[{}]", self.graph.vertex(*v).id, coords.join(","))
                }
                Letter::Edge(e) => self.graph.edge(*e).id.clone(),
            })
            .collect();
        parts.join(" ")
    }

    pub fn format_normal_form(&self, nf: &NormalForm) -> String {
        self.format_word(&nf.to_word(&self.graph))
    }

    /// Transport a word along a checked inclusion into a larger structure.
    pub fn map_word(map: &InducedMap, w: &GroupWord) -> Result<GroupWord> {
        let mut letters = Vec::with_capacity(w.letters.len());
        for l in &w.letters {
            letters.push(match l {
                Letter::Vertex(v, x) => {
                    let (sv, hom) = &map.vertex[*v];
                    Letter::Vertex(*sv, hom.apply(x)?)
                }
                Letter::Edge(e) => Letter::Edge(map.edge[*e]),
            });
        }
        Ok(GroupWord { letters })
    }
}

impl fmt::Debug for Pi1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Pi1({} vertices, {} geometric edges, root {})",
            self.graph.vertex_count(),
            self.graph.edge_count() / 2,
            self.graph.vertex(self.root()).id
        )
    }
}
