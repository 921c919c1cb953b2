//! Graphs of finitely generated abelian groups: a finite connected graph
//! carrying a group per vertex and per (geometric) edge, with an injective
//! homomorphism from each edge group into the group at either endpoint.
//!
//! Edges are stored as oriented half-edges. The input file lists each
//! geometric edge once (`from`, `to`, `alpha_from`, `alpha_to`) and the
//! loader synthesizes the reverse half-edge `~id`. The half-edge `e`
//! carries the map `G_e -> G_{from(e)}`, i.e. into its initial vertex.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Deserialize;

use crate::abelian::{AbHom, FgAbGroup};
use crate::error::{Error, Result};
use crate::intmat::{Int, IntMat};

#[derive(Clone, Debug)]
pub struct VertexData {
    pub id: String,
    pub group: Arc<FgAbGroup>,
}

#[derive(Clone, Debug)]
pub struct HalfEdgeData {
    pub id: String,
    /// Initial vertex index.
    pub from: usize,
    /// Terminal vertex index.
    pub to: usize,
    /// Index of the reversed half-edge.
    pub reverse: usize,
    pub group: Arc<FgAbGroup>,
    /// Embedding of the edge group into the group at `from`.
    pub map: AbHom,
    /// True for the orientation as written in the input file.
    pub positive: bool,
}

/// One geometric edge as described by an input file.
#[derive(Clone, Debug)]
pub struct EdgeSpec {
    pub id: String,
    pub from: String,
    pub to: String,
    pub group: FgAbGroup,
    pub alpha_from: IntMat,
    pub alpha_to: IntMat,
}

#[derive(Clone, Debug)]
pub struct GraphOfGroups {
    vertices: Vec<VertexData>,
    edges: Vec<HalfEdgeData>,
    vertex_index: BTreeMap<String, usize>,
    edge_index: BTreeMap<String, usize>,
}

fn check_id(id: &str, kind: &str) -> Result<()> {
    if id.is_empty() {
        return Err(Error::InvalidGraph(format!("{kind} id is empty")));
    }
    if !id.is_ascii() {
        return Err(Error::InvalidGraph(format!("{kind} id {id:?} is not ASCII")));
    }
    for bad in ['~', '[', ']', ','] {
        if id.contains(bad) {
            return Err(Error::InvalidGraph(format!(
                "{kind} id {id:?} contains reserved character {bad:?}"
            )));
        }
    }
    if id.chars().any(|c| c.is_ascii_whitespace()) {
        return Err(Error::InvalidGraph(format!("{kind} id {id:?} contains whitespace")));
    }
    Ok(())
}

impl GraphOfGroups {
    /// Assemble a graph from per-vertex groups and geometric edge
    /// descriptions. Structural problems (bad ids, unknown endpoints,
    /// matrices of the wrong shape, maps that are not homomorphisms) are
    /// errors here; injectivity and connectivity are left to `validate`.
    pub fn new(vertices: Vec<(String, FgAbGroup)>, specs: Vec<EdgeSpec>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let mut vs: Vec<VertexData> = Vec::new();
        for (id, group) in vertices {
            check_id(&id, "vertex")?;
            vs.push(VertexData { id, group: Arc::new(group) });
        }
        vs.sort_by(|a, b| a.id.cmp(&b.id));
        let mut vertex_index = BTreeMap::new();
        for (i, v) in vs.iter().enumerate() {
            if vertex_index.insert(v.id.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex id {:?}", v.id)));
            }
        }

        let mut halves: Vec<HalfEdgeData> = Vec::new();
        for spec in specs {
            check_id(&spec.id, "edge")?;
            if vertex_index.contains_key(&spec.id) {
                return Err(Error::InvalidGraph(format!(
                    "edge id {:?} collides with a vertex id",
                    spec.id
                )));
            }
            let from = *vertex_index.get(&spec.from).ok_or_else(|| {
                Error::UnknownId(format!("edge {:?}: unknown vertex {:?}", spec.id, spec.from))
            })?;
            let to = *vertex_index.get(&spec.to).ok_or_else(|| {
                Error::UnknownId(format!("edge {:?}: unknown vertex {:?}", spec.id, spec.to))
            })?;
            let group = Arc::new(spec.group);
            let map_from = AbHom::new(&group, &vs[from].group, spec.alpha_from).map_err(|e| {
                Error::InvalidGraph(format!("edge {:?}, map into {:?}: {e}", spec.id, spec.from))
            })?;
            let map_to = AbHom::new(&group, &vs[to].group, spec.alpha_to).map_err(|e| {
                Error::InvalidGraph(format!("edge {:?}, map into {:?}: {e}", spec.id, spec.to))
            })?;
            halves.push(HalfEdgeData {
                id: spec.id.clone(),
                from,
                to,
                reverse: usize::MAX,
                group: group.clone(),
                map: map_from,
                positive: true,
            });
            halves.push(HalfEdgeData {
                id: format!("~{}", spec.id),
                from: to,
                to: from,
                reverse: usize::MAX,
                group,
                map: map_to,
                positive: false,
            });
        }
        // `~` sorts above every plain ASCII id character, so positive
        // half-edges come first, each block in id order.
        halves.sort_by(|a, b| a.id.cmp(&b.id));
        let mut edge_index = BTreeMap::new();
        for (i, e) in halves.iter().enumerate() {
            if edge_index.insert(e.id.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate edge id {:?}", e.id)));
            }
        }
        for i in 0..halves.len() {
            let rev_id = match halves[i].id.strip_prefix('~') {
                Some(base) => base.to_string(),
                None => format!("~{}", halves[i].id),
            };
            halves[i].reverse = edge_index[&rev_id];
        }
        Ok(GraphOfGroups { vertices: vs, edges: halves, vertex_index, edge_index })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Number of half-edges (twice the geometric edge count).
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[VertexData] {
        &self.vertices
    }

    pub fn edges(&self) -> &[HalfEdgeData] {
        &self.edges
    }

    pub fn vertex(&self, i: usize) -> &VertexData {
        &self.vertices[i]
    }

    pub fn edge(&self, i: usize) -> &HalfEdgeData {
        &self.edges[i]
    }

    pub fn vertex_by_id(&self, id: &str) -> Result<usize> {
        self.vertex_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownId(format!("unknown vertex {id:?}")))
    }

    pub fn edge_by_id(&self, id: &str) -> Result<usize> {
        self.edge_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownId(format!("unknown edge {id:?}")))
    }

    pub fn reverse(&self, e: usize) -> usize {
        self.edges[e].reverse
    }

    /// Indices of the positive half-edges, in id order.
    pub fn positive_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edges[i].positive).collect()
    }

    /// Half-edges leaving `v`, in id order (a loop contributes both
    /// directions).
    pub fn edges_from(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edges[i].from == v).collect()
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = vec![0usize];
        seen[0] = true;
        while let Some(v) = queue.pop() {
            for e in self.edges_from(v) {
                let w = self.edges[e].to;
                if !seen[w] {
                    seen[w] = true;
                    queue.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Check the semantic invariants (injective edge maps, connectivity)
    /// and return a line-per-check report.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        report.lines.push(format!(
            "vertices: {}, geometric edges: {}",
            self.vertices.len(),
            self.edges.len() / 2
        ));
        for &e in &self.positive_edges() {
            let edge = &self.edges[e];
            let rev = &self.edges[edge.reverse];
            let from_ok = edge.map.is_injective();
            let to_ok = rev.map.is_injective();
            report.check(
                format!(
                    "edge {}: maps injective into {} and {}",
                    edge.id, self.vertices[edge.from].id, self.vertices[edge.to].id
                ),
                from_ok && to_ok,
            );
        }
        report.check("graph connected".into(), self.is_connected());
        report
    }

    /// True when `validate` finds nothing to complain about.
    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    /// Deterministic maximal tree: breadth-first from the smallest vertex
    /// id, scanning half-edges in id order, tree edges oriented away from
    /// the root.
    pub fn maximal_tree(&self) -> SpanningTree {
        let root = 0;
        let n = self.vertices.len();
        let mut parent_edge: Vec<Option<usize>> = vec![None; n];
        let mut depth = vec![0usize; n];
        let mut seen = vec![false; n];
        let mut is_tree = vec![false; self.edges.len()];
        let mut oriented = Vec::new();
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for e in self.edges_from(v) {
                let w = self.edges[e].to;
                if !seen[w] {
                    seen[w] = true;
                    is_tree[e] = true;
                    is_tree[self.edges[e].reverse] = true;
                    oriented.push(e);
                    parent_edge[w] = Some(e);
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        let non_tree: Vec<usize> =
            self.positive_edges().into_iter().filter(|&e| !is_tree[e]).collect();
        SpanningTree { root, oriented, parent_edge, depth, is_tree, non_tree }
    }

    /// Restriction to a subset of vertices and positive edges (given by
    /// id). Both endpoints of every kept edge must be kept.
    pub fn subgraph(&self, vertex_ids: &[&str], edge_ids: &[&str]) -> Result<GraphOfGroups> {
        let mut verts = Vec::new();
        for id in vertex_ids {
            let v = self.vertex_by_id(id)?;
            verts.push((self.vertices[v].id.clone(), (*self.vertices[v].group).clone()));
        }
        let mut specs = Vec::new();
        for id in edge_ids {
            let e = self.edge_by_id(id)?;
            let edge = &self.edges[e];
            if !edge.positive {
                return Err(Error::InvalidGraph(format!(
                    "subgraph edges must be given by positive id, got {id:?}"
                )));
            }
            let rev = &self.edges[edge.reverse];
            specs.push(EdgeSpec {
                id: edge.id.clone(),
                from: self.vertices[edge.from].id.clone(),
                to: self.vertices[edge.to].id.clone(),
                group: (*edge.group).clone(),
                alpha_from: edge.map.matrix().clone(),
                alpha_to: rev.map.matrix().clone(),
            });
        }
        GraphOfGroups::new(verts, specs)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g = Self::from_json_unchecked(text)?;
        let report = g.validate();
        if !report.is_valid() {
            return Err(Error::InvalidGraph(report.failures.join("; ")));
        }
        Ok(g)
    }

    /// Structural parse only: shape, ids and well-defined homomorphisms
    /// are still enforced, but injectivity and connectivity are left for
    /// `validate` to report on.
    pub fn from_json_unchecked(text: &str) -> Result<Self> {
        let file: GogFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("input file: {e}")))?;
        file.into_graph()
    }
}

#[derive(Default, Clone, Debug)]
pub struct ValidationReport {
    pub lines: Vec<String>,
    pub failures: Vec<String>,
}

impl ValidationReport {
    fn check(&mut self, what: String, ok: bool) {
        if ok {
            self.lines.push(format!("{what}: OK"));
        } else {
            self.lines.push(format!("{what}: FAIL"));
            self.failures.push(what);
        }
    }

    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        write!(f, "{}", if self.is_valid() { "valid" } else { "invalid" })
    }
}

/// A maximal tree with a fixed root, tree edges oriented away from it.
#[derive(Clone, Debug)]
pub struct SpanningTree {
    pub root: usize,
    /// One half-edge per tree pair, pointing away from the root, in
    /// discovery order.
    pub oriented: Vec<usize>,
    /// For each non-root vertex, the tree half-edge arriving from its
    /// parent (also oriented away from the root).
    pub parent_edge: Vec<Option<usize>>,
    pub depth: Vec<usize>,
    /// Per half-edge: whether its pair belongs to the tree.
    pub is_tree: Vec<bool>,
    /// Positive half-edge per non-tree pair, in id order.
    pub non_tree: Vec<usize>,
}

impl SpanningTree {
    pub fn tree_pair_count(&self) -> usize {
        self.oriented.len()
    }

    /// Unique path of half-edges from `a` to `b` inside the tree.
    pub fn geodesic(&self, g: &GraphOfGroups, a: usize, b: usize) -> Vec<usize> {
        // Walk both endpoints up to their common ancestor.
        let mut up_a = Vec::new();
        let mut up_b = Vec::new();
        let (mut x, mut y) = (a, b);
        while self.depth[x] > self.depth[y] {
            let e = self.parent_edge[x].expect("non-root vertex has a parent");
            up_a.push(g.reverse(e));
            x = g.edge(e).from;
        }
        while self.depth[y] > self.depth[x] {
            let e = self.parent_edge[y].expect("non-root vertex has a parent");
            up_b.push(e);
            y = g.edge(e).from;
        }
        while x != y {
            let ea = self.parent_edge[x].expect("non-root vertex has a parent");
            let eb = self.parent_edge[y].expect("non-root vertex has a parent");
            up_a.push(g.reverse(ea));
            up_b.push(eb);
            x = g.edge(ea).from;
            y = g.edge(eb).from;
        }
        up_b.reverse();
        up_a.extend(up_b);
        up_a
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupFile {
    rank: usize,
    #[serde(default)]
    torsion: Vec<i64>,
}

impl GroupFile {
    fn into_group(self, what: &str) -> Result<FgAbGroup> {
        FgAbGroup::new(self.rank, self.torsion.into_iter().map(Int::from).collect()).map_err(
            |e| {
                Error::Parse(format!(
                    "{what}: torsion must be in invariant-factor form (each >= 2, each dividing the next): {e}"
                ))
            },
        )
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexFile {
    id: String,
    group: GroupFile,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeFile {
    id: String,
    from: String,
    to: String,
    group: GroupFile,
    alpha_from: Vec<Vec<i64>>,
    alpha_to: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GogFile {
    vertices: Vec<VertexFile>,
    edges: Vec<EdgeFile>,
}

fn matrix_from_rows(rows: Vec<Vec<i64>>, nrows: usize, ncols: usize, what: &str) -> Result<IntMat> {
    if rows.len() != nrows {
        return Err(Error::Parse(format!("{what}: expected {nrows} rows, got {}", rows.len())));
    }
    let mut m = IntMat::zeros(nrows, ncols);
    for (i, row) in rows.into_iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::Parse(format!(
                "{what}: row {i} has {} entries, expected {ncols}",
                row.len()
            )));
        }
        for (j, v) in row.into_iter().enumerate() {
            m.set(i, j, Int::from(v));
        }
    }
    Ok(m)
}

impl GogFile {
    fn into_graph(self) -> Result<GraphOfGroups> {
        let mut groups: BTreeMap<String, FgAbGroup> = BTreeMap::new();
        let mut vertices = Vec::new();
        for v in self.vertices {
            let group = v.group.into_group(&format!("vertex {:?}", v.id))?;
            groups.insert(v.id.clone(), group.clone());
            vertices.push((v.id, group));
        }
        let mut specs = Vec::new();
        for e in self.edges {
            let group = e.group.into_group(&format!("edge {:?}", e.id))?;
            let cols = group.gen_count();
            let from_rows = groups
                .get(&e.from)
                .ok_or_else(|| Error::UnknownId(format!("edge {:?}: unknown vertex {:?}", e.id, e.from)))?
                .gen_count();
            let to_rows = groups
                .get(&e.to)
                .ok_or_else(|| Error::UnknownId(format!("edge {:?}: unknown vertex {:?}", e.id, e.to)))?
                .gen_count();
            let alpha_from = matrix_from_rows(
                e.alpha_from,
                from_rows,
                cols,
                &format!("edge {:?} alpha_from", e.id),
            )?;
            let alpha_to =
                matrix_from_rows(e.alpha_to, to_rows, cols, &format!("edge {:?} alpha_to", e.id))?;
            specs.push(EdgeSpec { id: e.id, from: e.from, to: e.to, group, alpha_from, alpha_to });
        }
        GraphOfGroups::new(vertices, specs)
    }
}

/// Data exhibiting one graph of groups as a subgraph of subgroups of
/// another: a vertex correspondence with injective group maps and an edge
/// correspondence with commuting squares.
#[derive(Clone, Debug)]
pub struct InclusionWitness {
    /// sub vertex id -> (sup vertex id, hom from the sub vertex group into
    /// the sup vertex group).
    pub vertex_maps: BTreeMap<String, (String, AbHom)>,
    /// sub positive edge id -> (sup half-edge id matching the sub edge's
    /// positive orientation, hom between the edge groups).
    pub edge_maps: BTreeMap<String, (String, AbHom)>,
}

/// A checked witness, resolved to indices; maps letters of the
/// sub-structure to letters of the super-structure.
#[derive(Clone, Debug)]
pub struct InducedMap {
    /// Per sub vertex index: (sup vertex index, group hom).
    pub vertex: Vec<(usize, AbHom)>,
    /// Per sub half-edge index: sup half-edge index.
    pub edge: Vec<usize>,
}

/// Verify a subgraph-of-subgroups witness: all group maps injective, edge
/// endpoints compatible, and both edge squares commute
/// (`alpha_sup . edge_hom = vertex_hom . alpha_sub`).
pub fn induced_inclusion(
    sub: &GraphOfGroups,
    sup: &GraphOfGroups,
    witness: &InclusionWitness,
) -> Result<InducedMap> {
    let mut vertex = Vec::with_capacity(sub.vertex_count());
    let mut used = vec![false; sup.vertex_count()];
    for v in sub.vertices() {
        let (sup_id, hom) = witness
            .vertex_maps
            .get(&v.id)
            .ok_or_else(|| Error::Witness(format!("no image for vertex {:?}", v.id)))?;
        let sv = sup.vertex_by_id(sup_id)?;
        if std::mem::replace(&mut used[sv], true) {
            return Err(Error::Witness(format!(
                "two vertices map to {sup_id:?}; the image must be a subgraph"
            )));
        }
        if hom.domain().as_ref() != v.group.as_ref()
            || hom.codomain().as_ref() != sup.vertex(sv).group.as_ref()
        {
            return Err(Error::Witness(format!("vertex {:?}: hom endpoints mismatch", v.id)));
        }
        if !hom.is_injective() {
            return Err(Error::Witness(format!("vertex {:?}: group map not injective", v.id)));
        }
        vertex.push((sv, hom.clone()));
    }
    let mut edge = vec![usize::MAX; sub.edge_count()];
    for &e in &sub.positive_edges() {
        let sub_edge = sub.edge(e);
        let (sup_id, hom) = witness
            .edge_maps
            .get(&sub_edge.id)
            .ok_or_else(|| Error::Witness(format!("no image for edge {:?}", sub_edge.id)))?;
        let se = sup.edge_by_id(sup_id)?;
        if !hom.is_injective() {
            return Err(Error::Witness(format!("edge {:?}: group map not injective", sub_edge.id)));
        }
        // Both orientations must line up and commute with the alphas.
        for (sub_half, sup_half) in [(e, se), (sub_edge.reverse, sup.reverse(se))] {
            let sh = sub.edge(sub_half);
            let ph = sup.edge(sup_half);
            if vertex[sh.from].0 != ph.from {
                return Err(Error::Witness(format!(
                    "edge {:?}: endpoint {:?} does not map to {:?}",
                    sub_edge.id,
                    sub.vertex(sh.from).id,
                    sup.vertex(ph.from).id
                )));
            }
            let lhs = ph.map.compose(hom)?;
            let rhs = vertex[sh.from].1.compose(&sh.map)?;
            if lhs != rhs {
                return Err(Error::Witness(format!(
                    "edge {:?}: square does not commute on the {:?} side",
                    sub_edge.id, sub.vertex(sh.from).id
                )));
            }
            edge[sub_half] = sup_half;
        }
    }
    Ok(InducedMap { vertex, edge })
}

/// The identity witness of a graph into itself.
pub fn identity_witness(g: &GraphOfGroups) -> InclusionWitness {
    let mut vertex_maps = BTreeMap::new();
    for v in g.vertices() {
        vertex_maps.insert(v.id.clone(), (v.id.clone(), AbHom::identity(&v.group)));
    }
    let mut edge_maps = BTreeMap::new();
    for &e in &g.positive_edges() {
        let edge = g.edge(e);
        edge_maps.insert(edge.id.clone(), (edge.id.clone(), AbHom::identity(&edge.group)));
    }
    InclusionWitness { vertex_maps, edge_maps }
}

/// Witness for a subgraph with the same groups on retained vertices/edges.
pub fn subgraph_witness(sub: &GraphOfGroups, sup: &GraphOfGroups) -> InclusionWitness {
    let mut vertex_maps = BTreeMap::new();
    for v in sub.vertices() {
        vertex_maps.insert(v.id.clone(), (v.id.clone(), AbHom::identity(&v.group)));
    }
    let mut edge_maps = BTreeMap::new();
    for &e in &sub.positive_edges() {
        let edge = sub.edge(e);
        edge_maps.insert(edge.id.clone(), (edge.id.clone(), AbHom::identity(&edge.group)));
    }
    let _ = sup;
    InclusionWitness { vertex_maps, edge_maps }
}
