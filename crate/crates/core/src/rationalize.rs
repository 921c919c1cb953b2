//! Rationalization of a graph of abelian groups: tensor every vertex group
//! with the rationals and stack the resulting vector spaces into
//! `Q = sum of G_v (x) QQ` (blocks in vertex-id order). The subspace `R`
//! identifies, across every tree edge, the two images of the edge group;
//! in the quotient `Q/R` every rationalized vertex group embeds. Each
//! non-tree edge `e_i` induces an isomorphism between two subspaces of
//! `Q/R`, extended here to an invertible matrix `rho(e_i)`; together they
//! give a representation of the free group on the non-tree edges and a
//! homomorphism `phi` from the fundamental group into the semidirect
//! product `(Q/R) x| F_n`, whose kernel on each vertex group is exactly
//! the torsion subgroup.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::abelian::AbElement;
use crate::error::{Error, Result};
use crate::gog::{GraphOfGroups, SpanningTree};
use crate::ratmat::{format_mat, Rat, RatMat};
use crate::words::{GroupWord, Letter, Pi1};

/// A freely reduced word in the free group on the non-tree edges.
/// Letters are `+(i+1)` / `-(i+1)` for generator `i` and its inverse.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct FreeWord {
    letters: Vec<i64>,
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord::default()
    }

    pub fn generator(i: usize, inverse: bool) -> Self {
        let g = (i + 1) as i64;
        FreeWord { letters: vec![if inverse { -g } else { g }] }
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Signed 1-based generator indices, freely reduced.
    pub fn letters(&self) -> &[i64] {
        &self.letters
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            if letters.last() == Some(&-l) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        FreeWord { letters }
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord { letters: self.letters.iter().rev().map(|l| -l).collect() }
    }
}

/// An element of `(Q/R) x| F_n`: a rational vector in quotient coordinates
/// and a free-group word, multiplying by
/// `(q1, w1)(q2, w2) = (q1 + rho(w1) q2, w1 w2)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SemidirectElement {
    pub vec: Vec<Rat>,
    pub word: FreeWord,
}

/// Per-vertex embedding report: the block of each vertex must stay full
/// rank after stacking the relations `R`.
#[derive(Clone, Debug)]
pub struct EmbeddingReport {
    pub lines: Vec<String>,
    pub failures: Vec<String>,
}

impl EmbeddingReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

pub struct RationalizationContext {
    graph: Arc<GraphOfGroups>,
    tree: SpanningTree,
    dim_q: usize,
    offsets: Vec<usize>,
    /// Row-reduced basis of R (rows) and its pivot columns.
    r_basis: RatMat,
    r_pivots: Vec<usize>,
    /// Standard basis vectors of Q spanning the chosen complement of R.
    qr_indices: Vec<usize>,
    /// Projection Q -> Q/R in the chosen coordinates (dim_qr x dim_q).
    projection: RatMat,
    /// projection restricted to each vertex block (dim_qr x rank(G_v)).
    vertex_proj: Vec<RatMat>,
    /// Positive non-tree half-edges, one per free generator.
    non_tree: Vec<usize>,
    rho: Vec<RatMat>,
    rho_inv: Vec<RatMat>,
}

impl RationalizationContext {
    pub fn new(pi1: &Pi1) -> Result<Self> {
        let graph = pi1.graph_arc();
        let tree = pi1.tree().clone();
        let mut offsets = Vec::with_capacity(graph.vertex_count());
        let mut dim_q = 0;
        for v in graph.vertices() {
            offsets.push(dim_q);
            dim_q += v.group.rank();
        }
        // R is spanned by, per tree edge pointing away from the root and
        // per free generator b of its edge group: the far-side image of b
        // minus the near-side image, each sitting in its vertex block.
        let mut r_rows: Vec<Vec<Rat>> = Vec::new();
        let mut expected_dim_r = 0;
        for &e in &tree.oriented {
            let edge = graph.edge(e);
            let rev = graph.edge(edge.reverse);
            let near = RatMat::from_int(&edge.map.free_block());
            let far = RatMat::from_int(&rev.map.free_block());
            let k = edge.group.rank();
            expected_dim_r += k;
            for b in 0..k {
                let mut row = vec![Rat::zero(); dim_q];
                for i in 0..far.rows() {
                    row[offsets[rev.from] + i] = far.get(i, b).clone();
                }
                for i in 0..near.rows() {
                    let cur = row[offsets[edge.from] + i].clone();
                    row[offsets[edge.from] + i] = cur - near.get(i, b);
                }
                r_rows.push(row);
            }
        }
        let raw = if r_rows.is_empty() {
            RatMat::zeros(0, dim_q)
        } else {
            RatMat::from_rows(r_rows)
        };
        let (rref, pivots) = raw.rref();
        let dim_r = pivots.len();
        if dim_r != expected_dim_r {
            return Err(Error::Internal(format!(
                "relation subspace has dimension {dim_r}, expected {expected_dim_r}: \
                 the identification vectors are dependent, which contradicts the \
                 vertex-embedding property"
            )));
        }
        let r_basis = if dim_r == 0 {
            RatMat::zeros(0, dim_q)
        } else {
            RatMat::from_rows((0..dim_r).map(|i| rref.row(i).to_vec()).collect::<Vec<_>>())
        };
        let qr_indices: Vec<usize> =
            (0..dim_q).filter(|c| !pivots.contains(c)).collect();
        let m = qr_indices.len();
        // Projection: a pivot coordinate p belonging to reduced row i is
        // congruent mod R to minus that row's complement coordinates.
        let mut projection = RatMat::zeros(m, dim_q);
        for (j, &c) in qr_indices.iter().enumerate() {
            projection.set(j, c, Rat::one());
            for (i, &p) in pivots.iter().enumerate() {
                let v = -r_basis.get(i, c).clone();
                projection.set(j, p, v);
            }
        }
        let vertex_proj: Vec<RatMat> = (0..graph.vertex_count())
            .map(|v| {
                let rank = graph.vertex(v).group.rank();
                let cols: Vec<usize> = (offsets[v]..offsets[v] + rank).collect();
                projection.select_cols(&cols)
            })
            .collect();
        let non_tree = tree.non_tree.clone();
        let mut ctx = RationalizationContext {
            graph,
            tree,
            dim_q,
            offsets,
            r_basis,
            r_pivots: pivots,
            qr_indices,
            projection,
            vertex_proj,
            non_tree,
            rho: Vec::new(),
            rho_inv: Vec::new(),
        };
        let report = ctx.check_embedding();
        if !report.is_ok() {
            return Err(Error::Internal(format!(
                "vertex blocks fail to embed into Q/R: {}",
                report.failures.join("; ")
            )));
        }
        ctx.build_rho()?;
        Ok(ctx)
    }

    pub fn graph(&self) -> &GraphOfGroups {
        &self.graph
    }

    pub fn tree(&self) -> &SpanningTree {
        &self.tree
    }

    pub fn dim_q(&self) -> usize {
        self.dim_q
    }

    pub fn dim_r(&self) -> usize {
        self.r_pivots.len()
    }

    pub fn dim_qr(&self) -> usize {
        self.qr_indices.len()
    }

    pub fn r_basis(&self) -> &RatMat {
        &self.r_basis
    }

    /// Standard-basis columns of Q chosen to span the complement of R.
    pub fn qr_indices(&self) -> &[usize] {
        &self.qr_indices
    }

    pub fn projection(&self) -> &RatMat {
        &self.projection
    }

    pub fn block_offset(&self, v: usize) -> usize {
        self.offsets[v]
    }

    /// Positive non-tree half-edges, in id order; generator `i` of the
    /// free group is `non_tree_edges()[i]`.
    pub fn non_tree_edges(&self) -> &[usize] {
        &self.non_tree
    }

    pub fn free_rank(&self) -> usize {
        self.non_tree.len()
    }

    pub fn rho(&self, i: usize) -> &RatMat {
        &self.rho[i]
    }

    pub fn rho_inverse(&self, i: usize) -> &RatMat {
        &self.rho_inv[i]
    }

    /// Image of a vertex element in Q/R coordinates (torsion dies).
    pub fn project_vertex(&self, v: usize, x: &AbElement) -> Vec<Rat> {
        let coords: Vec<Rat> =
            x.free_coords().iter().map(|c| Rat::from_integer(c.clone())).collect();
        self.vertex_proj[v].mul_vec(&coords)
    }

    /// The free-block matrix of a half-edge's embedding, placed into its
    /// origin block of Q (dim_q x rank(G_e)).
    fn edge_matrix_embedded(&self, e: usize) -> RatMat {
        let edge = self.graph.edge(e);
        let block = RatMat::from_int(&edge.map.free_block());
        let mut m = RatMat::zeros(self.dim_q, edge.group.rank());
        for i in 0..block.rows() {
            for j in 0..block.cols() {
                m.set(self.offsets[edge.from] + i, j, block.get(i, j).clone());
            }
        }
        m
    }

    /// Rank check, per vertex: the block basis together with R must have
    /// full combined rank, i.e. the block meets R only in zero.
    pub fn check_embedding(&self) -> EmbeddingReport {
        let mut lines = Vec::new();
        let mut failures = Vec::new();
        for (v, vertex) in self.graph.vertices().iter().enumerate() {
            let rank = vertex.group.rank();
            let mut rows: Vec<Vec<Rat>> = Vec::new();
            for i in 0..rank {
                let mut row = vec![Rat::zero(); self.dim_q];
                row[self.offsets[v] + i] = Rat::one();
                rows.push(row);
            }
            for i in 0..self.r_basis.rows() {
                rows.push(self.r_basis.row(i).to_vec());
            }
            let got = if rows.is_empty() { 0 } else { RatMat::from_rows(rows).rank() };
            let want = rank + self.dim_r();
            let ok = got == want;
            lines.push(format!(
                "vertex {}: rank(block + R) = {got}, expected {want}: {}",
                vertex.id,
                if ok { "OK" } else { "FAIL" }
            ));
            if !ok {
                failures.push(format!("vertex {}", vertex.id));
            }
        }
        EmbeddingReport { lines, failures }
    }

    /// Independent consistency check for a combination claim
    /// `q (at vertex v) = sum over oriented tree edges of
    /// (far image - near image) of the given coefficients`, by the
    /// leaf-pruning argument: restrict to the subforest of edges with a
    /// nonzero coefficient, repeatedly look at a leaf other than `v`,
    /// where the equation forces that leaf's single incident coefficient
    /// image to vanish; injectivity then forces the coefficient itself to
    /// be zero, contradicting its membership in the subforest.
    pub fn leaf_pruning_oracle(
        &self,
        v: usize,
        q: &[Rat],
        coeffs: &BTreeMap<usize, Vec<Rat>>,
    ) -> Result<bool> {
        if q.len() != self.graph.vertex(v).group.rank() {
            return Err(Error::Dimension(format!(
                "target vector has {} coordinates, block has {}",
                q.len(),
                self.graph.vertex(v).group.rank()
            )));
        }
        let mut active: Vec<usize> = Vec::new();
        for (&e, c) in coeffs {
            if !self.tree.oriented.contains(&e) {
                return Err(Error::UnknownId(format!(
                    "coefficient for {:?} which is not an oriented tree edge",
                    self.graph.edge(e).id
                )));
            }
            if c.len() != self.graph.edge(e).group.rank() {
                return Err(Error::Dimension(format!(
                    "coefficient for {:?} has wrong length",
                    self.graph.edge(e).id
                )));
            }
            if c.iter().any(|x| !x.is_zero()) {
                active.push(e);
            }
        }
        while !active.is_empty() {
            // Degree of each vertex in the active subforest.
            let mut degree = vec![0usize; self.graph.vertex_count()];
            for &e in &active {
                degree[self.graph.edge(e).from] += 1;
                degree[self.graph.edge(e).to] += 1;
            }
            let leaf = (0..self.graph.vertex_count())
                .filter(|&w| degree[w] == 1 && w != v)
                .min()
                .expect("a forest with an edge has a leaf besides v");
            let pos = active
                .iter()
                .position(|&e| {
                    self.graph.edge(e).from == leaf || self.graph.edge(e).to == leaf
                })
                .expect("leaf has one incident active edge");
            let e = active[pos];
            let edge = self.graph.edge(e);
            // The equation, projected to the leaf block, reads
            // 0 = (+-) image of the coefficient under the leaf-side map.
            let side = if edge.to == leaf { edge.reverse } else { e };
            let image = self
                .edge_matrix_embedded(side)
                .mul_vec(coeffs.get(&e).expect("active edge has coefficients"));
            let off = self.offsets[leaf];
            let rank = self.graph.vertex(leaf).group.rank();
            if image[off..off + rank].iter().any(|x| !x.is_zero()) {
                return Ok(false);
            }
            // Only reachable with a zero coefficient image; injectivity
            // makes the coefficient zero, so pruning the edge is sound.
            active.remove(pos);
        }
        Ok(q.iter().all(|x| x.is_zero()))
    }

    /// The same claim settled by plain evaluation of both sides.
    pub fn direct_combination_check(
        &self,
        v: usize,
        q: &[Rat],
        coeffs: &BTreeMap<usize, Vec<Rat>>,
    ) -> Result<bool> {
        let mut lhs = vec![Rat::zero(); self.dim_q];
        for (i, x) in q.iter().enumerate() {
            lhs[self.offsets[v] + i] = x.clone();
        }
        let mut rhs = vec![Rat::zero(); self.dim_q];
        for (&e, c) in coeffs {
            let edge = self.graph.edge(e);
            let far = self.edge_matrix_embedded(edge.reverse).mul_vec(c);
            let near = self.edge_matrix_embedded(e).mul_vec(c);
            for i in 0..self.dim_q {
                let v = rhs[i].clone() + &far[i] - &near[i];
                rhs[i] = v;
            }
        }
        Ok(lhs == rhs)
    }

    /// Extend the columns of `cols` to a basis of Q/R by greedily
    /// appending standard basis vectors in index order; returns the
    /// appended indices.
    fn greedy_extension(&self, cols: &RatMat) -> Vec<usize> {
        let m = self.dim_qr();
        let mut acc = cols.clone();
        let mut appended = Vec::new();
        for j in 0..m {
            if acc.cols() == m {
                break;
            }
            let mut unit = RatMat::zeros(m, 1);
            unit.set(j, 0, Rat::one());
            let candidate = acc.hstack(&unit);
            if candidate.rank() > acc.rank() {
                acc = candidate;
                appended.push(j);
            }
        }
        appended
    }

    fn build_rho(&mut self) -> Result<()> {
        for idx in 0..self.non_tree.len() {
            let e = self.non_tree[idx];
            let rev = self.graph.reverse(e);
            // rho must turn the far-side image of the edge group into the
            // near-side image: rho . (pi M_far) = pi M_near.
            let a = self.projection.mul(&self.edge_matrix_embedded(rev));
            let b = self.projection.mul(&self.edge_matrix_embedded(e));
            let k = self.graph.edge(e).group.rank();
            if a.rank() != k || b.rank() != k {
                return Err(Error::Internal(format!(
                    "edge {:?}: projected edge-group images lost rank",
                    self.graph.edge(e).id
                )));
            }
            let ext_a = self.greedy_extension(&a);
            let ext_b = self.greedy_extension(&b);
            let m = self.dim_qr();
            let mut full_a = a.clone();
            let mut full_b = b.clone();
            for &j in &ext_a {
                let mut unit = RatMat::zeros(m, 1);
                unit.set(j, 0, Rat::one());
                full_a = full_a.hstack(&unit);
            }
            for &j in &ext_b {
                let mut unit = RatMat::zeros(m, 1);
                unit.set(j, 0, Rat::one());
                full_b = full_b.hstack(&unit);
            }
            let inv_a = full_a.inverse().ok_or_else(|| {
                Error::Internal(format!(
                    "edge {:?}: extended basis is singular",
                    self.graph.edge(e).id
                ))
            })?;
            let rho = full_b.mul(&inv_a);
            let rho_inv = rho.inverse().ok_or_else(|| {
                Error::Internal(format!(
                    "edge {:?}: rho is singular",
                    self.graph.edge(e).id
                ))
            })?;
            self.rho.push(rho);
            self.rho_inv.push(rho_inv);
        }
        Ok(())
    }

    /// The representation matrix of a free word (left-to-right product).
    pub fn rho_of_word(&self, w: &FreeWord) -> RatMat {
        let mut m = RatMat::identity(self.dim_qr());
        for &l in w.letters() {
            let i = (l.unsigned_abs() as usize) - 1;
            let factor = if l > 0 { &self.rho[i] } else { &self.rho_inv[i] };
            m = m.mul(factor);
        }
        m
    }

    pub fn identity(&self) -> SemidirectElement {
        SemidirectElement { vec: vec![Rat::zero(); self.dim_qr()], word: FreeWord::identity() }
    }

    pub fn mul(&self, a: &SemidirectElement, b: &SemidirectElement) -> SemidirectElement {
        let twisted = self.rho_of_word(&a.word).mul_vec(&b.vec);
        let vec = a.vec.iter().zip(&twisted).map(|(x, y)| x.clone() + y).collect();
        SemidirectElement { vec, word: a.word.mul(&b.word) }
    }

    pub fn inverse(&self, a: &SemidirectElement) -> SemidirectElement {
        let inv_word = a.word.inverse();
        let vec = self.rho_of_word(&inv_word).mul_vec(&a.vec).into_iter().map(|x| -x).collect();
        SemidirectElement { vec, word: inv_word }
    }

    /// The homomorphism into `(Q/R) x| F_n`: vertex elements map to their
    /// projected free part (pure translation), tree edges to the identity,
    /// non-tree edges to their free generator.
    pub fn phi(&self, w: &GroupWord) -> Result<SemidirectElement> {
        let mut acc = self.identity();
        for letter in &w.letters {
            let img = match letter {
                Letter::Vertex(v, x) => {
                    if *v >= self.graph.vertex_count() {
                        return Err(Error::UnknownId(format!("vertex index {v} out of range")));
                    }
                    if x.group().as_ref() != self.graph.vertex(*v).group.as_ref() {
                        return Err(Error::GroupMismatch(format!(
                            "element of {} at vertex {}",
                            x.group(),
                            self.graph.vertex(*v).id
                        )));
                    }
                    SemidirectElement {
                        vec: self.project_vertex(*v, x),
                        word: FreeWord::identity(),
                    }
                }
                Letter::Edge(e) => {
                    if *e >= self.graph.edge_count() {
                        return Err(Error::UnknownId(format!("edge index {e} out of range")));
                    }
                    if self.tree.is_tree[*e] {
                        self.identity()
                    } else {
                        let edge = self.graph.edge(*e);
                        let (pos, inverse) =
                            if edge.positive { (*e, false) } else { (edge.reverse, true) };
                        let i = self
                            .non_tree
                            .iter()
                            .position(|&f| f == pos)
                            .expect("non-tree positive edge is a generator");
                        SemidirectElement {
                            vec: vec![Rat::zero(); self.dim_qr()],
                            word: FreeWord::generator(i, inverse),
                        }
                    }
                }
            };
            acc = self.mul(&acc, &img);
        }
        Ok(acc)
    }

    /// The composition with projection to the free factor.
    pub fn project_to_free(&self, a: &SemidirectElement) -> FreeWord {
        a.word.clone()
    }

    pub fn format_free(&self, w: &FreeWord) -> String {
        if w.is_identity() {
            return "1".to_string();
        }
        let parts: Vec<String> = w
            .letters()
            .iter()
            .map(|&l| {
                let i = (l.unsigned_abs() as usize) - 1;
                let e = self.non_tree[i];
                if l > 0 {
                    self.graph.edge(e).id.clone()
                } else {
                    self.graph.edge(self.graph.reverse(e)).id.clone()
                }
            })
            .collect();
        parts.join(" ")
    }

    pub fn format_element(&self, a: &SemidirectElement) -> String {
        let coords: Vec<String> = a.vec.iter().map(|c| c.to_string()).collect();
        format!("(({}), {})", coords.join(", "), self.format_free(&a.word))
    }

    pub fn format_rho(&self, i: usize) -> String {
        format_mat(&self.rho[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmat::rat;

    const BS23: &str = r#"{
        "vertices": [{"id": "v", "group": {"rank": 1, "torsion": []}}],
        "edges": [{"id": "e", "from": "v", "to": "v",
                   "group": {"rank": 1, "torsion": []},
                   "alpha_from": [[3]], "alpha_to": [[2]]}]
    }"#;

    const BS11: &str = r#"{
        "vertices": [{"id": "v", "group": {"rank": 1}}],
        "edges": [{"id": "e", "from": "v", "to": "v",
                   "group": {"rank": 1},
                   "alpha_from": [[1]], "alpha_to": [[1]]}]
    }"#;

    const GBS2: &str = r#"{
        "vertices": [
            {"id": "v", "group": {"rank": 1}},
            {"id": "w", "group": {"rank": 1}}
        ],
        "edges": [{"id": "t", "from": "v", "to": "w",
                   "group": {"rank": 1},
                   "alpha_from": [[2]], "alpha_to": [[3]]}]
    }"#;

    const STAR: &str = r#"{
        "vertices": [
            {"id": "c", "group": {"rank": 1}},
            {"id": "l1", "group": {"rank": 1}},
            {"id": "l2", "group": {"rank": 1}},
            {"id": "l3", "group": {"rank": 1}}
        ],
        "edges": [
            {"id": "a", "from": "l1", "to": "c", "group": {"rank": 1},
             "alpha_from": [[1]], "alpha_to": [[1]]},
            {"id": "b", "from": "l2", "to": "c", "group": {"rank": 1},
             "alpha_from": [[1]], "alpha_to": [[1]]},
            {"id": "d", "from": "l3", "to": "c", "group": {"rank": 1},
             "alpha_from": [[1]], "alpha_to": [[1]]}
        ]
    }"#;

    fn ctx(text: &str) -> (Pi1, RationalizationContext) {
        let p = Pi1::new(GraphOfGroups::from_json(text).unwrap()).unwrap();
        let c = RationalizationContext::new(&p).unwrap();
        (p, c)
    }

    #[test]
    fn loop_graph_dimensions_and_rho() {
        let (_, c) = ctx(BS23);
        assert_eq!((c.dim_q(), c.dim_r(), c.dim_qr()), (1, 0, 1));
        assert_eq!(c.free_rank(), 1);
        assert_eq!(c.rho(0).get(0, 0), &rat(3, 2));
        assert_eq!(c.rho_inverse(0).get(0, 0), &rat(2, 3));
    }

    #[test]
    fn identity_loop_has_identity_rho() {
        let (_, c) = ctx(BS11);
        assert_eq!(c.rho(0).get(0, 0), &rat(1, 1));
    }

    #[test]
    fn amalgam_relation_subspace() {
        let (_, c) = ctx(GBS2);
        assert_eq!((c.dim_q(), c.dim_r(), c.dim_qr()), (2, 1, 1));
        // R = span{(-2, 3)}: reduced to leading coefficient 1
        assert_eq!(c.r_basis().get(0, 0), &rat(1, 1));
        assert_eq!(c.r_basis().get(0, 1), &rat(-3, 2));
        assert!(c.check_embedding().is_ok());
        // the complement is the w block; x projects to 3/2, y to 1
        assert_eq!(c.qr_indices(), &[1]);
        let gv = &c.graph().vertex(0).group;
        let x = AbElement::from_i64(gv, &[1]).unwrap();
        assert_eq!(c.project_vertex(0, &x), vec![rat(3, 2)]);
    }

    #[test]
    fn star_dimensions() {
        let (_, c) = ctx(STAR);
        assert_eq!((c.dim_q(), c.dim_r(), c.dim_qr()), (4, 3, 1));
        assert!(c.check_embedding().is_ok());
    }

    #[test]
    fn phi_realizes_defining_relation() {
        let (p, c) = ctx(BS23);
        let lhs = c.phi(&p.parse_word("e v[2] ~e").unwrap()).unwrap();
        let rhs = c.phi(&p.parse_word("v[3]").unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.vec, vec![rat(3, 1)]);
        assert!(lhs.word.is_identity());
    }

    #[test]
    fn phi_of_empty_is_identity() {
        let (_, c) = ctx(BS23);
        let id = c.phi(&GroupWord::empty()).unwrap();
        assert_eq!(id, c.identity());
    }

    #[test]
    fn phi_on_torsion_letter_is_identity() {
        let torsion = r#"{
            "vertices": [{"id": "v", "group": {"rank": 1, "torsion": [2]}}],
            "edges": [{"id": "e", "from": "v", "to": "v",
                       "group": {"rank": 1},
                       "alpha_from": [[1], [0]], "alpha_to": [[1], [0]]}]
        }"#;
        let (p, c) = ctx(torsion);
        let w = p.parse_word("v[0,1]").unwrap();
        assert_eq!(c.phi(&w).unwrap(), c.identity());
        // the free generator still has nonzero image
        let x = c.phi(&p.parse_word("v[1,0]").unwrap()).unwrap();
        assert!(x.vec.iter().any(|c| !c.is_zero()));
    }

    #[test]
    fn phi_is_a_homomorphism_on_samples() {
        let (p, c) = ctx(GBS2);
        let words = ["v[2] t w[4]", "~t v[-1] t", "w[3] ~t", "t"];
        for a in &words {
            for b in &words {
                let wa = p.parse_word(a).unwrap();
                let wb = p.parse_word(b).unwrap();
                let prod = p.multiply(&wa, &wb).unwrap();
                let lhs = c.phi(&prod).unwrap();
                let rhs = c.mul(&c.phi(&wa).unwrap(), &c.phi(&wb).unwrap());
                assert_eq!(lhs, rhs, "words {a:?} * {b:?}");
            }
        }
    }

    #[test]
    fn phi_invariant_under_reduction() {
        let (p, c) = ctx(BS23);
        for text in ["e v[2] ~e v[-3]", "v[4] e v[1] ~e", "e e v[6] ~e ~e"] {
            let w = p.parse_word(text).unwrap();
            let nf = p.reduce(&w).unwrap();
            assert_eq!(
                c.phi(&w).unwrap(),
                c.phi(&nf.to_word(p.graph())).unwrap(),
                "word {text:?}"
            );
        }
    }

    #[test]
    fn semidirect_mul_and_inverse() {
        let (p, c) = ctx(BS23);
        let a = c.phi(&p.parse_word("v[1] e").unwrap()).unwrap();
        let b = c.phi(&p.parse_word("~e v[2]").unwrap()).unwrap();
        let prod = c.mul(&a, &b);
        assert!(prod.word.is_identity());
        let inv = c.inverse(&a);
        assert_eq!(c.mul(&a, &inv), c.identity());
        assert_eq!(c.mul(&inv, &a), c.identity());
    }

    #[test]
    fn rho_intertwines_edge_images() {
        // exact identity rho . (pi M_far) = pi M_near for each generator
        for text in [BS23, BS11, GBS2] {
            let (_, c) = ctx(text);
            for (i, &e) in c.non_tree_edges().iter().enumerate() {
                let rev = c.graph().reverse(e);
                let far = c.projection.mul(&c.edge_matrix_embedded(rev));
                let near = c.projection.mul(&c.edge_matrix_embedded(e));
                assert_eq!(c.rho(i).mul(&far), near);
            }
        }
    }

    #[test]
    fn free_words_reduce() {
        let a = FreeWord::generator(0, false);
        let b = FreeWord::generator(0, true);
        assert!(a.mul(&b).is_identity());
        let c = a.mul(&FreeWord::generator(1, false));
        assert_eq!(c.inverse().mul(&c), FreeWord::identity());
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn leaf_pruning_matches_direct_check() {
        let (_, c) = ctx(GBS2);
        let v = 0;
        let t = c.tree().oriented[0];
        // zero everything: consistent
        let zero: BTreeMap<usize, Vec<Rat>> = [(t, vec![rat(0, 1)])].into();
        assert!(c.leaf_pruning_oracle(v, &[rat(0, 1)], &zero).unwrap());
        assert!(c.direct_combination_check(v, &[rat(0, 1)], &zero).unwrap());
        // nonzero target with zero coefficients: inconsistent
        assert!(!c.leaf_pruning_oracle(v, &[rat(1, 1)], &zero).unwrap());
        assert!(!c.direct_combination_check(v, &[rat(1, 1)], &zero).unwrap());
        // any nonzero coefficient: inconsistent (leaf projection forces it)
        let nz: BTreeMap<usize, Vec<Rat>> = [(t, vec![rat(5, 3)])].into();
        assert!(!c.leaf_pruning_oracle(v, &[rat(1, 1)], &nz).unwrap());
        assert!(!c.direct_combination_check(v, &[rat(1, 1)], &nz).unwrap());
        assert!(!c.leaf_pruning_oracle(v, &[rat(0, 1)], &nz).unwrap());
        assert!(!c.direct_combination_check(v, &[rat(0, 1)], &nz).unwrap());
    }

    #[test]
    fn leaf_pruning_on_star() {
        let (_, c) = ctx(STAR);
        let v = c.graph().vertex_by_id("l1").unwrap();
        let mut coeffs: BTreeMap<usize, Vec<Rat>> = BTreeMap::new();
        for &e in &c.tree().oriented {
            coeffs.insert(e, vec![rat(2, 7)]);
        }
        assert!(!c.leaf_pruning_oracle(v, &[rat(1, 1)], &coeffs).unwrap());
        assert!(!c.direct_combination_check(v, &[rat(1, 1)], &coeffs).unwrap());
        coeffs.values_mut().for_each(|c| c[0] = rat(0, 1));
        assert!(c.leaf_pruning_oracle(v, &[rat(0, 1)], &coeffs).unwrap());
        assert!(c.direct_combination_check(v, &[rat(0, 1)], &coeffs).unwrap());
    }

    #[test]
    fn formatting() {
        let (p, c) = ctx(BS23);
        let a = c.phi(&p.parse_word("v[1] e").unwrap()).unwrap();
        assert_eq!(c.format_element(&a), "((1), e)");
        let b = c.phi(&p.parse_word("~e").unwrap()).unwrap();
        assert_eq!(c.format_element(&b), "((0), ~e)");
        assert_eq!(c.format_element(&c.identity()), "((0), 1)");
    }
}
