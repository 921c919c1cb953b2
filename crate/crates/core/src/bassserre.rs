//! Bounded exploration of the tree the fundamental group acts on.
//!
//! Vertices of the tree are cosets `g . G_v` over all group elements `g`
//! and graph vertices `v`; the neighbors of a coset are obtained by
//! multiplying a canonical representative of the image of an outgoing
//! edge's embedding, then crossing that edge. Vertex stabilizers are
//! conjugates of vertex groups; composing with the rationalization map
//! kills exactly their torsion, which is what makes the stabilizers of
//! the induced action effectively finite.
//!
//! The quotient of the tree by the kernel of the free-part projection is
//! the universal cover of the underlying graph; `cover_ball` builds it
//! directly as the tree of reduced edge paths.

use std::collections::{HashMap, VecDeque};

use crate::abelian::torsion_elements;
use crate::error::{Error, Result};
use crate::gog::GraphOfGroups;
use crate::intmat::Int;
use crate::rationalize::RationalizationContext;
use crate::words::{GroupWord, Letter, NormalForm, Pi1};

#[derive(Clone, Debug)]
pub struct BallVertex {
    /// Representative word: the coset is `word . G_{graph_vertex}`.
    pub word: GroupWord,
    /// Canonical form of the representative (used for identity).
    pub normal_form: NormalForm,
    pub graph_vertex: usize,
    pub depth: usize,
    /// Coset enumeration toward this vertex's children was cut off.
    pub truncated: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct BallEdge {
    pub from: usize,
    pub to: usize,
    /// Half-edge of the graph crossed from `from` to `to`.
    pub edge: usize,
}

#[derive(Debug)]
pub struct TreeBall {
    pub base_vertex: usize,
    pub radius: usize,
    pub coset_bound: Int,
    pub vertices: Vec<BallVertex>,
    pub edges: Vec<BallEdge>,
    /// Some coset enumeration anywhere in the ball was truncated.
    pub truncated: bool,
}

/// Breadth-first ball of the coset tree around `1 . G_base`.
///
/// Neighbor cosets of `w . G_v` are `w r e . G_{to(e)}` for each half-edge
/// `e` leaving `v` and each canonical representative `r` modulo the image
/// of `e`'s embedding. Infinite-index images are enumerated with free
/// coordinates clamped to `[-coset_bound, coset_bound]` and flagged.
/// Duplicate detection goes through canonical normal forms; a duplicate
/// that is not the parent would be a cycle and aborts the construction.
pub fn tree_ball(
    pi1: &Pi1,
    base: usize,
    radius: usize,
    coset_bound: &Int,
) -> Result<TreeBall> {
    if base >= pi1.graph().vertex_count() {
        return Err(Error::UnknownId(format!("vertex index {base} out of range")));
    }
    if *coset_bound < Int::from(1) {
        return Err(Error::Dimension("coset bound must be at least 1".into()));
    }
    let g = pi1.graph();
    let mut vertices: Vec<BallVertex> = Vec::new();
    let mut edges: Vec<BallEdge> = Vec::new();
    let mut seen: HashMap<(usize, Vec<(crate::abelian::AbElement, usize)>), usize> =
        HashMap::new();
    let mut truncated_any = false;

    let base_word = GroupWord::empty();
    let base_nf = pi1.coset_normal_form(&base_word, base)?;
    seen.insert(base_nf.coset_key(), 0);
    vertices.push(BallVertex {
        word: base_word,
        normal_form: base_nf,
        graph_vertex: base,
        depth: 0,
        truncated: false,
    });

    let mut queue = VecDeque::from([0usize]);
    while let Some(idx) = queue.pop_front() {
        if vertices[idx].depth == radius {
            continue;
        }
        let v = vertices[idx].graph_vertex;
        let parent_word = vertices[idx].word.clone();
        let depth = vertices[idx].depth;
        for e in g.edges_from(v) {
            let (reps, cut) = pi1.reducer(e).representatives(coset_bound);
            if cut {
                vertices[idx].truncated = true;
                truncated_any = true;
            }
            for r in reps {
                let mut letters = parent_word.letters.clone();
                if !r.is_zero() {
                    letters.push(Letter::Vertex(v, r.clone()));
                }
                letters.push(Letter::Edge(e));
                let word = GroupWord::from_letters(letters);
                let to = g.edge(e).to;
                let nf = pi1.coset_normal_form(&word, to)?;
                let key = nf.coset_key();
                if let Some(&known) = seen.get(&key) {
                    // The only legitimate revisit is the step back to the
                    // parent (representative 0 across the reverse edge).
                    let parent_of_idx = edges.iter().find(|be| be.to == idx).map(|be| be.from);
                    if parent_of_idx != Some(known) {
                        return Err(Error::Internal(format!(
                            "coset tree has a cycle: vertex {known} reached again \
                             from {idx} via edge {}",
                            g.edge(e).id
                        )));
                    }
                    continue;
                }
                let new_idx = vertices.len();
                seen.insert(key, new_idx);
                vertices.push(BallVertex {
                    word,
                    normal_form: nf,
                    graph_vertex: to,
                    depth: depth + 1,
                    truncated: false,
                });
                edges.push(BallEdge { from: idx, to: new_idx, edge: e });
                queue.push_back(new_idx);
            }
        }
    }
    Ok(TreeBall {
        base_vertex: base,
        radius,
        coset_bound: coset_bound.clone(),
        vertices,
        edges,
        truncated: truncated_any,
    })
}

impl TreeBall {
    /// Degree of a ball vertex inside the ball.
    pub fn degree(&self, i: usize) -> usize {
        self.edges.iter().filter(|e| e.from == i || e.to == i).count()
    }

    /// Connected with one fewer edge than vertices: a tree.
    pub fn is_tree(&self) -> bool {
        if self.edges.len() + 1 != self.vertices.len() {
            return false;
        }
        let mut reach = vec![false; self.vertices.len()];
        reach[0] = true;
        let mut changed = true;
        while changed {
            changed = false;
            for e in &self.edges {
                for (a, b) in [(e.from, e.to), (e.to, e.from)] {
                    if reach[a] && !reach[b] {
                        reach[b] = true;
                        changed = true;
                    }
                }
            }
        }
        reach.into_iter().all(|r| r)
    }
}

/// The stabilizer of ball vertex `i` is the conjugate of the vertex group
/// at `p(i)` by the representative word.
pub fn stabilizer_class(ball: &TreeBall, i: usize) -> (&GroupWord, usize) {
    (&ball.vertices[i].word, ball.vertices[i].graph_vertex)
}

#[derive(Clone, Debug)]
pub struct ScanReport {
    pub lines: Vec<String>,
    pub failures: Vec<String>,
}

impl ScanReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For each explored coset: conjugate the stabilizer's elements by the
/// representative and push them through the rationalization map. All
/// torsion elements must die; the free generators must survive with
/// linearly independent images. Together these certify that the part of
/// each stabilizer killed by the map is exactly its torsion subgroup.
pub fn finite_stabilizer_scan(
    pi1: &Pi1,
    ctx: &RationalizationContext,
    ball: &TreeBall,
) -> Result<ScanReport> {
    let g = pi1.graph();
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for (i, bv) in ball.vertices.iter().enumerate() {
        let group = &g.vertex(bv.graph_vertex).group;
        let conj = |x: crate::abelian::AbElement| -> Result<_> {
            let letter = GroupWord::from_letters(vec![Letter::Vertex(bv.graph_vertex, x)]);
            let gx = pi1.multiply(&bv.word, &letter)?;
            let gxg = pi1.multiply(&gx, &pi1.invert(&bv.word)?)?;
            ctx.phi(&gxg)
        };
        let torsion = torsion_elements(group);
        let torsion_total = torsion.len();
        let mut torsion_killed = 0usize;
        for t in torsion {
            let img = conj(t)?;
            if img == ctx.identity() {
                torsion_killed += 1;
            }
        }
        let mut images: Vec<Vec<crate::ratmat::Rat>> = Vec::new();
        for k in 0..group.rank() {
            let x = crate::abelian::AbElement::generator(group, k)?;
            let img = conj(x)?;
            if !img.word.is_identity() {
                failures.push(format!(
                    "coset {i}: conjugated vertex element has a free part"
                ));
            }
            images.push(img.vec);
        }
        let surviving_rank = if images.is_empty() {
            0
        } else {
            crate::ratmat::RatMat::from_rows(images).rank()
        };
        let ok = torsion_killed == torsion_total && surviving_rank == group.rank();
        lines.push(format!(
            "coset {i} over {}: torsion killed {torsion_killed}/{torsion_total}, \
             surviving rank {surviving_rank}/{}: {}",
            g.vertex(bv.graph_vertex).id,
            group.rank(),
            if ok { "OK" } else { "FAIL" }
        ));
        if !ok {
            failures.push(format!("coset {i}"));
        }
    }
    Ok(ScanReport { lines, failures })
}

/// Verify on the ball that stabilizers land in the kernel of the
/// free-part projection, and that representatives with nontrivial free
/// part genuinely move the base coset (sampled freeness of the induced
/// action on the quotient).
pub fn kernel_action_check(
    pi1: &Pi1,
    ctx: &RationalizationContext,
    ball: &TreeBall,
) -> Result<ScanReport> {
    let g = pi1.graph();
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    let base_key = pi1
        .coset_normal_form(&GroupWord::empty(), ball.base_vertex)?
        .coset_key();
    let mut movers = 0usize;
    for (i, bv) in ball.vertices.iter().enumerate() {
        let group = &g.vertex(bv.graph_vertex).group;
        // Stabilizer generators: conjugated vertex-group generators.
        for k in 0..group.gen_count() {
            let x = crate::abelian::AbElement::generator(group, k)?;
            let letter = GroupWord::from_letters(vec![Letter::Vertex(bv.graph_vertex, x)]);
            let gx = pi1.multiply(&bv.word, &letter)?;
            let gxg = pi1.multiply(&gx, &pi1.invert(&bv.word)?)?;
            let img = ctx.phi(&gxg)?;
            if !ctx.project_to_free(&img).is_identity() {
                failures.push(format!("coset {i}: stabilizer generator {k} escapes the kernel"));
            }
        }
        // Freeness evidence: a representative with nontrivial free image
        // must move the base coset.
        let img = ctx.phi(&bv.word)?;
        if !ctx.project_to_free(&img).is_identity() {
            movers += 1;
            let moved = pi1.coset_normal_form(&bv.word, ball.base_vertex)?.coset_key();
            if moved == base_key {
                failures.push(format!(
                    "coset {i}: free image {} fixes the base coset",
                    ctx.format_free(&img.word)
                ));
            }
        }
    }
    lines.push(format!(
        "stabilizer generators of {} cosets lie in the kernel",
        ball.vertices.len()
    ));
    lines.push(format!("{movers} representatives with free part move the base coset"));
    if !failures.is_empty() {
        lines.push("FAIL".into());
    }
    Ok(ScanReport { lines, failures })
}

#[derive(Clone, Debug)]
pub struct CoverVertex {
    /// Reduced edge path from the base (no immediate backtracking).
    pub path: Vec<usize>,
    /// Graph vertex the path ends at.
    pub end: usize,
    pub depth: usize,
}

#[derive(Debug)]
pub struct CoverBall {
    pub base: usize,
    pub radius: usize,
    pub vertices: Vec<CoverVertex>,
    pub edges: Vec<BallEdge>,
}

/// Ball of the universal cover of the underlying graph: vertices are the
/// reduced edge-paths from `base` of length at most `radius`.
pub fn cover_ball(g: &GraphOfGroups, base: usize, radius: usize) -> Result<CoverBall> {
    if base >= g.vertex_count() {
        return Err(Error::UnknownId(format!("vertex index {base} out of range")));
    }
    let mut vertices = vec![CoverVertex { path: Vec::new(), end: base, depth: 0 }];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(idx) = queue.pop_front() {
        if vertices[idx].depth == radius {
            continue;
        }
        let end = vertices[idx].end;
        let depth = vertices[idx].depth;
        let back = vertices[idx].path.last().map(|&e| g.reverse(e));
        let path = vertices[idx].path.clone();
        for e in g.edges_from(end) {
            if Some(e) == back {
                continue;
            }
            let mut p = path.clone();
            p.push(e);
            let new_idx = vertices.len();
            vertices.push(CoverVertex { path: p, end: g.edge(e).to, depth: depth + 1 });
            edges.push(BallEdge { from: idx, to: new_idx, edge: e });
            queue.push_back(new_idx);
        }
    }
    Ok(CoverBall { base, radius, vertices, edges })
}

impl CoverBall {
    /// Certify acyclicity: connected by construction, so it suffices that
    /// the edge count is one less than the vertex count (checked against
    /// an explicit union-find over the recorded edges).
    pub fn is_acyclic(&self) -> bool {
        if self.edges.len() + 1 != self.vertices.len() {
            return false;
        }
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    }

    pub fn degree(&self, i: usize) -> usize {
        self.edges.iter().filter(|e| e.from == i || e.to == i).count()
    }
}

/// DOT rendering of a coset-tree ball; labels are representative words,
/// truncated vertices dashed.
pub fn tree_ball_dot(pi1: &Pi1, ball: &TreeBall) -> String {
    let mut out = String::new();
    out.push_str("graph coset_tree_ball {\n");
    out.push_str(&format!(
        "  // base {}, radius {}, {} vertices, {} edges, truncated: {}\n",
        pi1.graph().vertex(ball.base_vertex).id,
        ball.radius,
        ball.vertices.len(),
        ball.edges.len(),
        if ball.truncated { "yes" } else { "no" }
    ));
    for (i, v) in ball.vertices.iter().enumerate() {
        let style = if v.truncated { ", style=dashed" } else { "" };
        out.push_str(&format!(
            "  n{i} [label=\"{} . G_{}\"{}];\n",
            pi1.format_word(&v.word),
            pi1.graph().vertex(v.graph_vertex).id,
            style
        ));
    }
    for e in &ball.edges {
        out.push_str(&format!(
            "  n{} -- n{} [label=\"{}\"];\n",
            e.from,
            e.to,
            pi1.graph().edge(e.edge).id
        ));
    }
    out.push_str("}\n");
    out
}

/// DOT rendering of a universal-cover ball; labels are reduced paths.
pub fn cover_ball_dot(g: &GraphOfGroups, ball: &CoverBall) -> String {
    let mut out = String::new();
    out.push_str("graph cover_ball {\n");
    out.push_str(&format!(
        "  // base {}, radius {}, {} vertices, acyclic: {}\n",
        g.vertex(ball.base).id,
        ball.radius,
        ball.vertices.len(),
        if ball.is_acyclic() { "yes" } else { "no" }
    ));
    for (i, v) in ball.vertices.iter().enumerate() {
        let label = if v.path.is_empty() {
            "1".to_string()
        } else {
            v.path.iter().map(|&e| g.edge(e).id.clone()).collect::<Vec<_>>().join(" ")
        };
        out.push_str(&format!("  n{i} [label=\"{label}\"];\n"));
    }
    for e in &ball.edges {
        out.push_str(&format!(
            "  n{} -- n{} [label=\"{}\"];\n",
            e.from,
            e.to,
            g.edge(e.edge).id
        ));
    }
    out.push_str("}\n");
    out
}
