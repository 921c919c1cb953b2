//! Exhaustion chains: the group as a union of simpler pieces.
//!
//! Two ways of writing the fundamental group as a directed union, both
//! materialized only at finitely many stages:
//!
//! * subgraph exhaustion keeps every vertex and the spanning tree and
//!   adds the remaining edges back one at a time;
//! * subgroup exhaustion keeps the whole graph but shrinks each vertex
//!   group to a subgroup that still contains the images of all incident
//!   edge embeddings, then grows back to the full group.
//!
//! `verify_chain` samples random words and checks that the inclusion
//! maps between stages compose functorially and that late-stage words
//! are reachable from the earliest stage that supports their letters.

use crate::abelian::{AbElement, AbHom};
use crate::error::{Error, Result};
use crate::gog::{
    induced_inclusion, subgraph_witness, GraphOfGroups, InclusionWitness, InducedMap,
};
use crate::intmat::IntMat;
use crate::random::{random_word, rng};
use crate::words::{GroupWord, Letter, Pi1};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainStrategy {
    /// Increasing subgraphs: spanning tree first, then one extra edge
    /// per stage.
    Subgraph,
    /// Fixed graph, increasing vertex subgroups: incident edge images
    /// first, then one extra generator, then everything.
    Subgroup,
}

pub struct ExhaustionChain {
    pub strategy: ChainStrategy,
    pub stages: Vec<GraphOfGroups>,
    /// Witness for each consecutive inclusion.
    pub witnesses: Vec<InclusionWitness>,
    /// The corresponding verified induced maps.
    pub maps: Vec<InducedMap>,
}

impl ExhaustionChain {
    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Composite of the consecutive maps from stage `i` to stage `j`.
    pub fn composite(&self, i: usize, j: usize) -> Result<InducedMap> {
        if i > j || j >= self.stages.len() {
            return Err(Error::Dimension(format!("no stages {i} -> {j}")));
        }
        let mut map = identity_map(&self.stages[i]);
        for step in i..j {
            map = compose_maps(&map, &self.maps[step])?;
        }
        Ok(map)
    }
}

fn identity_map(g: &GraphOfGroups) -> InducedMap {
    InducedMap {
        vertex: (0..g.vertex_count())
            .map(|v| (v, AbHom::identity(&g.vertex(v).group)))
            .collect(),
        edge: (0..g.edge_count()).collect(),
    }
}

fn compose_maps(first: &InducedMap, then: &InducedMap) -> Result<InducedMap> {
    let mut vertex = Vec::with_capacity(first.vertex.len());
    for (sv, h) in &first.vertex {
        let (ssv, h2) = &then.vertex[*sv];
        vertex.push((*ssv, h2.compose(h)?));
    }
    let edge = first.edge.iter().map(|&se| then.edge[se]).collect();
    Ok(InducedMap { vertex, edge })
}

/// Positive-edge id of the geometric edge containing half-edge `e`.
fn positive_id(g: &GraphOfGroups, e: usize) -> String {
    if g.edge(e).positive {
        g.edge(e).id.clone()
    } else {
        g.edge(g.reverse(e)).id.clone()
    }
}

pub fn build_chain(g: &GraphOfGroups, strategy: ChainStrategy) -> Result<ExhaustionChain> {
    match strategy {
        ChainStrategy::Subgraph => build_subgraph_chain(g),
        ChainStrategy::Subgroup => build_subgroup_chain(g),
    }
}

fn build_subgraph_chain(g: &GraphOfGroups) -> Result<ExhaustionChain> {
    let tree = g.maximal_tree();
    let vertex_ids: Vec<String> = (0..g.vertex_count())
        .map(|v| g.vertex(v).id.clone())
        .collect();
    let mut edge_ids: Vec<String> =
        tree.oriented.iter().map(|&e| positive_id(g, e)).collect();
    edge_ids.sort();

    let mut stages = Vec::new();
    let vrefs: Vec<&str> = vertex_ids.iter().map(|s| s.as_str()).collect();
    for i in 0..=tree.non_tree.len() {
        let mut ids = edge_ids.clone();
        ids.extend(tree.non_tree[..i].iter().map(|&e| positive_id(g, e)));
        let erefs: Vec<&str> = ids.iter().map(|s| s.as_str()).collect();
        stages.push(g.subgraph(&vrefs, &erefs)?);
    }

    let mut witnesses = Vec::new();
    let mut maps = Vec::new();
    for w in stages.windows(2) {
        let witness = subgraph_witness(&w[0], &w[1]);
        maps.push(induced_inclusion(&w[0], &w[1], &witness)?);
        witnesses.push(witness);
    }
    Ok(ExhaustionChain { strategy: ChainStrategy::Subgraph, stages, witnesses, maps })
}

/// Express `inner` (a subgroup embedding into some ambient group) as a
/// map into the domain of `outer` (a larger subgroup of the same
/// ambient group). Fails if some generator image is missing, which the
/// chain constructor treats as a request to enlarge.
fn factor_through(inner: &AbHom, outer: &AbHom) -> Result<AbHom> {
    let solver = outer.solver();
    let dom = inner.domain();
    let mut matrix = IntMat::zeros(outer.domain().gen_count(), dom.gen_count());
    for j in 0..dom.gen_count() {
        let target = inner.apply(&AbElement::generator(dom, j)?)?;
        let pre = solver.preimage(&target)?.ok_or_else(|| {
            Error::Witness(format!("generator {j} image lies outside the subgroup"))
        })?;
        for (i, c) in pre.coords().iter().enumerate() {
            matrix.set(i, j, c.clone());
        }
    }
    AbHom::new(dom, outer.domain(), matrix)
}

/// Subgroup of the vertex group at `v` generated by `extra` together
/// with the images of all incident edge embeddings, enlarged until every
/// incident image actually factors through it.
fn edge_generated_subgroup(
    g: &GraphOfGroups,
    v: usize,
    extra: &[AbElement],
) -> Result<AbHom> {
    let group = &g.vertex(v).group;
    let mut gens: Vec<AbElement> = extra.to_vec();
    for e in g.edges_from(v) {
        let map = &g.edge(e).map;
        for j in 0..map.domain().gen_count() {
            gens.push(map.apply(&AbElement::generator(map.domain(), j)?)?);
        }
    }
    loop {
        let (_, emb) = crate::abelian::subgroup_from_generators(group, &gens)?;
        let solver = emb.solver();
        let mut missing = None;
        'scan: for e in g.edges_from(v) {
            let map = &g.edge(e).map;
            for j in 0..map.domain().gen_count() {
                let img = map.apply(&AbElement::generator(map.domain(), j)?)?;
                if solver.preimage(&img)?.is_none() {
                    missing = Some(img);
                    break 'scan;
                }
            }
        }
        match missing {
            Some(img) => gens.push(img),
            None => return Ok(emb),
        }
    }
}

/// Rebuild the graph with each vertex group replaced by the domain of
/// its embedding, factoring every edge map through.
fn stage_graph(g: &GraphOfGroups, embeddings: &[AbHom]) -> Result<GraphOfGroups> {
    let vertices: Vec<(String, crate::abelian::FgAbGroup)> = (0..g.vertex_count())
        .map(|v| (g.vertex(v).id.clone(), (**embeddings[v].domain()).clone()))
        .collect();
    let mut specs = Vec::new();
    for &e in &g.positive_edges() {
        let data = g.edge(e);
        let rev = g.edge(g.reverse(e));
        specs.push(crate::gog::EdgeSpec {
            id: data.id.clone(),
            from: g.vertex(data.from).id.clone(),
            to: g.vertex(data.to).id.clone(),
            group: (*data.group).clone(),
            alpha_from: factor_through(&data.map, &embeddings[data.from])?
                .matrix()
                .clone(),
            alpha_to: factor_through(&rev.map, &embeddings[data.to])?.matrix().clone(),
        });
    }
    GraphOfGroups::new(vertices, specs)
}

fn subgroup_witness_between(
    sub: &GraphOfGroups,
    inner: &[AbHom],
    outer: &[AbHom],
) -> Result<InclusionWitness> {
    let mut witness = crate::gog::identity_witness(sub);
    for (v, (inner_emb, outer_emb)) in inner.iter().zip(outer).enumerate() {
        let id = sub.vertex(v).id.clone();
        witness.vertex_maps.insert(id.clone(), (id, factor_through(inner_emb, outer_emb)?));
    }
    Ok(witness)
}

fn build_subgroup_chain(g: &GraphOfGroups) -> Result<ExhaustionChain> {
    // stage 1: incident edge images only
    let mut small = Vec::new();
    for v in 0..g.vertex_count() {
        small.push(edge_generated_subgroup(g, v, &[])?);
    }
    // stage 2: one more generator per vertex (the first standard one)
    let mut middle = Vec::new();
    for v in 0..g.vertex_count() {
        let group = &g.vertex(v).group;
        let extra = if group.gen_count() > 0 {
            vec![AbElement::generator(group, 0)?]
        } else {
            vec![]
        };
        middle.push(edge_generated_subgroup(g, v, &extra)?);
    }
    // stage 3: everything
    let full: Vec<AbHom> =
        (0..g.vertex_count()).map(|v| AbHom::identity(&g.vertex(v).group)).collect();

    let stages = vec![stage_graph(g, &small)?, stage_graph(g, &middle)?, g.clone()];
    let embeddings = [small, middle, full];
    let mut witnesses = Vec::new();
    let mut maps = Vec::new();
    for i in 0..2 {
        let witness =
            subgroup_witness_between(&stages[i], &embeddings[i], &embeddings[i + 1])?;
        maps.push(induced_inclusion(&stages[i], &stages[i + 1], &witness)?);
        witnesses.push(witness);
    }
    Ok(ExhaustionChain { strategy: ChainStrategy::Subgroup, stages, witnesses, maps })
}

#[derive(Clone, Debug)]
pub struct ChainReport {
    pub lines: Vec<String>,
    pub failures: Vec<String>,
}

impl ChainReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Direct (not composed) induced map from stage `i` to stage `j`.
fn direct_map(chain: &ExhaustionChain, i: usize, j: usize) -> Result<InducedMap> {
    match chain.strategy {
        ChainStrategy::Subgraph => {
            let witness = subgraph_witness(&chain.stages[i], &chain.stages[j]);
            induced_inclusion(&chain.stages[i], &chain.stages[j], &witness)
        }
        ChainStrategy::Subgroup => {
            // recover each stage's embedding into the full group by
            // composing the stored witnesses, then factor directly
            let full = chain.stages.len() - 1;
            let emb = |s: usize| -> Result<Vec<AbHom>> {
                (0..chain.stages[s].vertex_count())
                    .map(|v| {
                        let mut h = AbHom::identity(&chain.stages[s].vertex(v).group);
                        for step in s..full {
                            h = chain.maps[step].vertex[v].1.compose(&h)?;
                        }
                        Ok(h)
                    })
                    .collect()
            };
            let witness = subgroup_witness_between(&chain.stages[i], &emb(i)?, &emb(j)?)?;
            induced_inclusion(&chain.stages[i], &chain.stages[j], &witness)
        }
    }
}

/// Attempt to rewrite a word of stage `j` in the letters of stage `i`;
/// `None` when some letter does not exist there yet.
fn lift_word(
    chain: &ExhaustionChain,
    i: usize,
    j: usize,
    w: &GroupWord,
) -> Result<Option<GroupWord>> {
    let map = direct_map(chain, i, j)?;
    let (sub, sup) = (&chain.stages[i], &chain.stages[j]);
    let mut letters = Vec::with_capacity(w.letters.len());
    for l in &w.letters {
        match l {
            Letter::Edge(e) => {
                let id = &sup.edge(*e).id;
                match sub.edge_by_id(id) {
                    Ok(se) if map.edge[se] == *e => letters.push(Letter::Edge(se)),
                    _ => return Ok(None),
                }
            }
            Letter::Vertex(v, x) => {
                let id = &sup.vertex(*v).id;
                let sv = match sub.vertex_by_id(id) {
                    Ok(sv) => sv,
                    Err(_) => return Ok(None),
                };
                let (_, hom) = &map.vertex[sv];
                match hom.solver().preimage(x)? {
                    Some(pre) => letters.push(Letter::Vertex(sv, pre)),
                    None => return Ok(None),
                }
            }
        }
    }
    Ok(Some(GroupWord::from_letters(letters)))
}

/// Sample-based validation of a chain: tree compatibility, functoriality
/// of the inclusions (composite equals direct on random words, compared
/// as normal forms at the latest stage), and reachability of late-stage
/// words from the earliest stage whose letters support them.
pub fn verify_chain(chain: &ExhaustionChain, samples: usize, seed: u64) -> Result<ChainReport> {
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    let n = chain.stages.len();
    let pi1s: Vec<Pi1> =
        chain.stages.iter().map(|s| Pi1::new(s.clone())).collect::<Result<_>>()?;

    // spanning trees must be nested (as geometric edge id sets)
    let tree_ids: Vec<std::collections::BTreeSet<String>> = chain
        .stages
        .iter()
        .map(|s| {
            s.maximal_tree().oriented.iter().map(|&e| positive_id(s, e)).collect()
        })
        .collect();
    let nested = tree_ids.windows(2).all(|w| w[0].is_subset(&w[1]));
    lines.push(format!("tree compatibility: {}", if nested { "OK" } else { "FAIL" }));
    if !nested {
        failures.push("spanning trees are not nested".into());
    }

    let mut r = rng(seed);
    if n >= 2 {
        let mut agreed = 0usize;
        let mut total = 0usize;
        for s in 0..samples {
            // spread the samples over all i < j <= k triples (j = i+1)
            let i = s % (n - 1);
            let k = n - 1;
            let w = random_word(&chain.stages[i], &mut r, 4);
            let via = Pi1::map_word(&chain.composite(i, k)?, &w)?;
            let direct = Pi1::map_word(&direct_map(chain, i, k)?, &w)?;
            let nf1 = pi1s[k].reduce(&via)?;
            let nf2 = pi1s[k].reduce(&direct)?;
            total += 1;
            if nf1 == nf2 {
                agreed += 1;
            } else {
                failures.push(format!(
                    "sample {s}: composite and direct maps disagree from stage {i}"
                ));
            }
        }
        lines.push(format!("functoriality: {agreed}/{total} samples agree"));
    } else {
        lines.push("functoriality: single stage, nothing to compare".into());
    }

    // coverage: words of the last stage lift to the first stage that
    // supports their letters and map back to themselves
    let mut lifted = 0usize;
    let mut cover_total = 0usize;
    for s in 0..samples {
        let w = random_word(&chain.stages[n - 1], &mut r, 4);
        let mut placed = false;
        for i in 0..n {
            if let Some(lift) = lift_word(chain, i, n - 1, &w)? {
                let back = Pi1::map_word(&direct_map(chain, i, n - 1)?, &lift)?;
                let nf_back = pi1s[n - 1].reduce(&back)?;
                let nf_w = pi1s[n - 1].reduce(&w)?;
                if nf_back == nf_w {
                    lifted += 1;
                } else {
                    failures.push(format!("sample {s}: lift to stage {i} does not map back"));
                }
                placed = true;
                break;
            }
        }
        if !placed {
            // the identity lift at the last stage always applies
            failures.push(format!("sample {s}: word failed to lift even to its own stage"));
        }
        cover_total += 1;
    }
    lines.push(format!("coverage: {lifted}/{cover_total} sampled words reached from below"));

    if !failures.is_empty() {
        lines.push("FAIL".into());
    }
    Ok(ChainReport { lines, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BS23: &str = r#"{
        "vertices": [{"id": "v", "group": {"rank": 1, "torsion": []}}],
        "edges": [{"id": "e", "from": "v", "to": "v",
                   "group": {"rank": 1, "torsion": []},
                   "alpha_from": [[3]], "alpha_to": [[2]]}]
    }"#;

    const WEDGE2: &str = r#"{
        "vertices": [{"id": "v", "group": {"rank": 1}}],
        "edges": [
            {"id": "a", "from": "v", "to": "v", "group": {"rank": 1},
             "alpha_from": [[1]], "alpha_to": [[1]]},
            {"id": "b", "from": "v", "to": "v", "group": {"rank": 1},
             "alpha_from": [[1]], "alpha_to": [[1]]}
        ]
    }"#;

    const STAR: &str = r#"{
        "vertices": [
            {"id": "c", "group": {"rank": 2}},
            {"id": "x", "group": {"rank": 1}},
            {"id": "y", "group": {"rank": 1}}
        ],
        "edges": [
            {"id": "cx", "from": "c", "to": "x", "group": {"rank": 1},
             "alpha_from": [[2], [0]], "alpha_to": [[1]]},
            {"id": "cy", "from": "c", "to": "y", "group": {"rank": 1},
             "alpha_from": [[0], [3]], "alpha_to": [[2]]}
        ]
    }"#;

    fn graph(text: &str) -> GraphOfGroups {
        GraphOfGroups::from_json(text).unwrap()
    }

    #[test]
    fn loop_graph_gives_two_subgraph_stages() {
        let chain = build_chain(&graph(BS23), ChainStrategy::Subgraph).unwrap();
        assert_eq!(chain.len(), 2);
        assert_eq!(chain.stages[0].edge_count(), 0);
        assert_eq!(chain.stages[1].edge_count(), 2);
        let report = verify_chain(&chain, 50, 1).unwrap();
        assert!(report.is_ok(), "{:?}", report.failures);
    }

    #[test]
    fn tree_graph_collapses_to_one_stage() {
        let chain = build_chain(&graph(STAR), ChainStrategy::Subgraph).unwrap();
        assert_eq!(chain.len(), 1);
        let report = verify_chain(&chain, 10, 2).unwrap();
        assert!(report.is_ok(), "{:?}", report.failures);
    }

    #[test]
    fn two_loops_give_three_stages() {
        let chain = build_chain(&graph(WEDGE2), ChainStrategy::Subgraph).unwrap();
        assert_eq!(chain.len(), 3);
        for (i, s) in chain.stages.iter().enumerate() {
            assert_eq!(s.edge_count(), 2 * i);
        }
        let report = verify_chain(&chain, 100, 3).unwrap();
        assert!(report.is_ok(), "{:?}", report.failures);
        assert!(report.lines.iter().any(|l| l.contains("100/100")));
    }

    #[test]
    fn subgroup_chain_contains_edge_images() {
        let g = graph(STAR);
        let chain = build_chain(&g, ChainStrategy::Subgroup).unwrap();
        assert_eq!(chain.len(), 3);
        // stage-1 group at the center is generated by (2,0) and (0,3)
        let c = chain.stages[0].vertex_by_id("c").unwrap();
        let small = &chain.stages[0].vertex(c).group;
        assert_eq!(small.rank(), 2);
        // its embedding recovers both edge images
        let report = verify_chain(&chain, 100, 4).unwrap();
        assert!(report.is_ok(), "{:?}", report.failures);
    }

    #[test]
    fn subgroup_chain_on_loop_keeps_index() {
        let g = graph(BS23);
        let chain = build_chain(&g, ChainStrategy::Subgroup).unwrap();
        // stage 1 is generated by 3 and 2, i.e. everything
        assert_eq!(chain.stages[0].vertex(0).group.rank(), 1);
        let report = verify_chain(&chain, 30, 5).unwrap();
        assert!(report.is_ok(), "{:?}", report.failures);
    }

    #[test]
    fn composite_equals_direct_exactly_on_a_triangle() {
        let text = r#"{
            "vertices": [
                {"id": "a", "group": {"rank": 1}},
                {"id": "b", "group": {"rank": 1}},
                {"id": "c", "group": {"rank": 1}}
            ],
            "edges": [
                {"id": "ab", "from": "a", "to": "b", "group": {"rank": 1},
                 "alpha_from": [[1]], "alpha_to": [[1]]},
                {"id": "ac", "from": "a", "to": "c", "group": {"rank": 1},
                 "alpha_from": [[1]], "alpha_to": [[1]]},
                {"id": "bc", "from": "b", "to": "c", "group": {"rank": 1},
                 "alpha_from": [[1]], "alpha_to": [[1]]}
            ]
        }"#;
        let chain = build_chain(&graph(text), ChainStrategy::Subgraph).unwrap();
        assert_eq!(chain.len(), 2); // tree + one extra edge
        let report = verify_chain(&chain, 100, 6).unwrap();
        assert!(report.is_ok(), "{:?}", report.failures);
    }

    #[test]
    fn stage_words_map_injectively_on_samples() {
        // distinct normal forms at a stage stay distinct at the top
        let g = graph(WEDGE2);
        let chain = build_chain(&g, ChainStrategy::Subgraph).unwrap();
        let pi_top = Pi1::new(chain.stages[2].clone()).unwrap();
        let pi_mid = Pi1::new(chain.stages[1].clone()).unwrap();
        let mut r = rng(8);
        let map = chain.composite(1, 2).unwrap();
        let mut pairs = 0;
        while pairs < 25 {
            let w1 = random_word(&chain.stages[1], &mut r, 4);
            let w2 = random_word(&chain.stages[1], &mut r, 4);
            if pi_mid.equal(&w1, &w2).unwrap() {
                continue;
            }
            let m1 = Pi1::map_word(&map, &w1).unwrap();
            let m2 = Pi1::map_word(&map, &w2).unwrap();
            assert!(!pi_top.equal(&m1, &m2).unwrap());
            pairs += 1;
        }
    }

    #[test]
    fn subgroup_stage_must_contain_forced_image() {
        // vertex Z^2 with edge image 2Z x 0: the small stage contains it
        let text = r#"{
            "vertices": [
                {"id": "a", "group": {"rank": 2}},
                {"id": "b", "group": {"rank": 1}}
            ],
            "edges": [{"id": "e", "from": "a", "to": "b", "group": {"rank": 1},
                       "alpha_from": [[2], [0]], "alpha_to": [[1]]}]
        }"#;
        let g = graph(text);
        let chain = build_chain(&g, ChainStrategy::Subgroup).unwrap();
        let a = chain.stages[0].vertex_by_id("a").unwrap();
        let emb = edge_generated_subgroup(&g, g.vertex_by_id("a").unwrap(), &[]).unwrap();
        let target = AbElement::from_i64(&g.vertex(g.vertex_by_id("a").unwrap()).group, &[2, 0])
            .unwrap();
        assert!(emb.solver().preimage(&target).unwrap().is_some());
        let odd = AbElement::from_i64(&g.vertex(g.vertex_by_id("a").unwrap()).group, &[1, 0])
            .unwrap();
        assert!(emb.solver().preimage(&odd).unwrap().is_none());
        assert_eq!(chain.stages[0].vertex(a).group.rank(), 1);
    }

    #[test]
    fn verify_detects_tampered_maps() {
        let g = graph(BS23);
        let mut chain = build_chain(&g, ChainStrategy::Subgraph).unwrap();
        // break the vertex hom: x -> 2x is injective but not the inclusion
        let group = &chain.stages[0].vertex(0).group;
        let doubling = AbHom::from_i64(group, group, &[&[2]]).unwrap();
        chain.maps[0].vertex[0].1 = doubling;
        let report = verify_chain(&chain, 40, 9).unwrap();
        assert!(!report.is_ok());
    }

    #[test]
    fn relators_stay_trivial_along_chain() {
        let g = graph(WEDGE2);
        let chain = build_chain(&g, ChainStrategy::Subgraph).unwrap();
        let pi_mid = Pi1::new(chain.stages[1].clone()).unwrap();
        let pi_top = Pi1::new(chain.stages[2].clone()).unwrap();
        let map = chain.composite(1, 2).unwrap();
        let mut r = rng(10);
        for _ in 0..20 {
            let w = crate::random::random_relator(&pi_mid, &mut r);
            let img = Pi1::map_word(&map, &w).unwrap();
            assert!(pi_top.is_trivial(&img).unwrap());
        }
    }

}
