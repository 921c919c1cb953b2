//! Seeded generators for groups, graphs, words and matrices.
//!
//! Everything here is driven by an explicit ChaCha8 stream so that test
//! failures and verification reports are reproducible from a single
//! seed.

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::abelian::{AbElement, FgAbGroup};
use crate::gog::{EdgeSpec, GraphOfGroups};
use crate::intmat::{Int, IntMat};
use crate::ratmat::{Rat, RatMat};
use crate::words::{GroupWord, Letter, Pi1};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rank at most 3, at most two torsion factors, each at most 6, in
/// invariant-factor form.
pub fn random_group(rng: &mut ChaCha8Rng) -> FgAbGroup {
    let rank = rng.gen_range(0..=3);
    let mut torsion: Vec<Int> = Vec::new();
    for _ in 0..rng.gen_range(0..=2usize) {
        torsion.push(Int::from(rng.gen_range(2..=6i64)));
    }
    torsion.sort();
    // massage into a divisibility chain: d1 | d2
    if torsion.len() == 2 && (&torsion[1] % &torsion[0]) != Int::zero() {
        torsion[1] = &torsion[1] * &torsion[0];
    }
    if rank == 0 && torsion.is_empty() {
        return FgAbGroup::new(1, vec![]).unwrap();
    }
    FgAbGroup::new(rank, torsion).unwrap()
}

pub fn random_element(
    group: &std::sync::Arc<FgAbGroup>,
    rng: &mut ChaCha8Rng,
    bound: i64,
) -> AbElement {
    let coords: Vec<i64> =
        (0..group.gen_count()).map(|_| rng.gen_range(-bound..=bound)).collect();
    AbElement::from_i64(group, &coords).unwrap()
}

/// Random full-column-rank matrix mapping a free group of rank `k` into
/// the free part of `cod` (torsion rows zero, hence injective).
fn random_embedding_matrix(rng: &mut ChaCha8Rng, k: usize, cod: &FgAbGroup) -> IntMat {
    let rows = cod.gen_count();
    'outer: for _ in 0..32 {
        let mut m = IntMat::zeros(rows, k);
        for i in 0..cod.rank() {
            for j in 0..k {
                m.set(i, j, Int::from(rng.gen_range(-2..=2i64)));
            }
        }
        if RatMat::from_int(&m).rank() == k {
            for j in 0..k {
                if (0..cod.rank()).all(|i| m.get(i, j).is_zero()) {
                    continue 'outer;
                }
            }
            return m;
        }
    }
    // fall back to the coordinate embedding (possible since k <= rank)
    let mut m = IntMat::zeros(rows, k);
    for j in 0..k {
        m.set(j, j, Int::from(1));
    }
    m
}

/// Connected graph on at most `max_vertices` vertices: a random tree
/// plus at most two extra edges, with free abelian edge groups embedded
/// into the free parts of the vertex groups.
pub fn random_valid_graph(rng: &mut ChaCha8Rng, max_vertices: usize) -> GraphOfGroups {
    let n = rng.gen_range(1..=max_vertices.max(1));
    let mut vertices = Vec::new();
    let mut groups = Vec::new();
    for i in 0..n {
        // keep at least rank 1 so edge groups have somewhere to go
        let mut g = random_group(rng);
        if g.rank() == 0 {
            g = FgAbGroup::new(1, g.torsion().to_vec()).unwrap();
        }
        groups.push(g.clone());
        vertices.push((format!("v{i}"), g));
    }
    let mut specs = Vec::new();
    let add_edge = |rng: &mut ChaCha8Rng, specs: &mut Vec<EdgeSpec>, a: usize, b: usize| {
        let k = 1 + rng.gen_range(0..groups[a].rank().min(groups[b].rank()));
        let idx = specs.len();
        specs.push(EdgeSpec {
            id: format!("e{idx}"),
            from: format!("v{a}"),
            to: format!("v{b}"),
            group: FgAbGroup::new(k, vec![]).unwrap(),
            alpha_from: random_embedding_matrix(rng, k, &groups[a]),
            alpha_to: random_embedding_matrix(rng, k, &groups[b]),
        });
    };
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        add_edge(rng, &mut specs, parent, i);
    }
    for _ in 0..rng.gen_range(0..=2usize) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        add_edge(rng, &mut specs, a, b);
    }
    GraphOfGroups::new(vertices, specs).expect("generated graph is structurally valid")
}

/// Arbitrary letter sequence; reduction does not require words to be
/// edge-continuous, so unconstrained sampling is fine.
pub fn random_word(g: &GraphOfGroups, rng: &mut ChaCha8Rng, len: usize) -> GroupWord {
    let mut letters = Vec::with_capacity(len);
    for _ in 0..len {
        if g.edge_count() == 0 || rng.gen_bool(0.5) {
            let v = rng.gen_range(0..g.vertex_count());
            letters.push(Letter::Vertex(
                v,
                random_element(&g.vertex(v).group, rng, 3),
            ));
        } else {
            letters.push(Letter::Edge(rng.gen_range(0..g.edge_count())));
        }
    }
    GroupWord::from_letters(letters)
}

/// A word that is trivial by construction: an instance of one of the
/// defining relation families (edge cancellation, the edge relation
/// conjugating one embedding image to the other, or a collapsed tree
/// edge), optionally conjugated by a random prefix.
pub fn random_relator(pi1: &Pi1, rng: &mut ChaCha8Rng) -> GroupWord {
    let g = pi1.graph();
    if g.edge_count() == 0 {
        let v = rng.gen_range(0..g.vertex_count());
        let x = random_element(&g.vertex(v).group, rng, 3);
        return GroupWord::from_letters(vec![
            Letter::Vertex(v, x.clone()),
            Letter::Vertex(v, x.neg()),
        ]);
    }
    let e = rng.gen_range(0..g.edge_count());
    let rev = g.reverse(e);
    let core = match rng.gen_range(0..3u8) {
        0 => GroupWord::from_letters(vec![Letter::Edge(e), Letter::Edge(rev)]),
        1 => {
            let s = random_element(&g.edge(e).group, rng, 3);
            let near = g.edge(e).map.apply(&s).unwrap();
            let far = g.edge(rev).map.apply(&s).unwrap();
            GroupWord::from_letters(vec![
                Letter::Edge(e),
                Letter::Vertex(g.edge(e).to, far),
                Letter::Edge(rev),
                Letter::Vertex(g.edge(e).from, near.neg()),
            ])
        }
        _ => {
            let tree = pi1.tree();
            if tree.oriented.is_empty() {
                GroupWord::from_letters(vec![Letter::Edge(e), Letter::Edge(rev)])
            } else {
                let t = tree.oriented[rng.gen_range(0..tree.oriented.len())];
                GroupWord::from_letters(vec![Letter::Edge(t)])
            }
        }
    };
    if rng.gen_bool(0.5) {
        let len = rng.gen_range(1..=3);
        let prefix = random_word(g, rng, len);
        let mut letters = prefix.letters.clone();
        letters.extend(core.letters);
        letters.extend(invert_letters(g, &prefix));
        GroupWord::from_letters(letters)
    } else {
        core
    }
}

fn invert_letters(g: &GraphOfGroups, w: &GroupWord) -> Vec<Letter> {
    w.letters
        .iter()
        .rev()
        .map(|l| match l {
            Letter::Vertex(v, x) => Letter::Vertex(*v, x.neg()),
            Letter::Edge(e) => Letter::Edge(g.reverse(*e)),
        })
        .collect()
}

/// Symmetric positive definite rational matrix: MᵀM plus a positive
/// diagonal.
pub fn random_pd_matrix(rng: &mut ChaCha8Rng, n: usize) -> RatMat {
    let mut m = RatMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, Rat::new(Int::from(rng.gen_range(-3..=3i64)), Int::from(1)));
        }
    }
    let mut out = m.transpose().mul(&m);
    for i in 0..n {
        let bump = Rat::new(Int::from(rng.gen_range(1..=4i64)), Int::from(1));
        let v = out.get(i, i) + bump;
        out.set(i, i, v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_are_well_formed() {
        let mut r = rng(7);
        for _ in 0..50 {
            let g = random_group(&mut r);
            // invariant chain d1 | d2
            let t = g.torsion();
            if t.len() == 2 {
                assert!((&t[1] % &t[0]).is_zero());
            }
        }
    }

    #[test]
    fn graphs_validate() {
        let mut r = rng(11);
        for _ in 0..25 {
            let g = random_valid_graph(&mut r, 5);
            let report = g.validate();
            assert!(report.is_valid(), "{report}");
        }
    }

    #[test]
    fn relators_reduce_to_identity() {
        let mut r = rng(13);
        for _ in 0..10 {
            let g = random_valid_graph(&mut r, 4);
            let pi1 = Pi1::new(g).unwrap();
            for _ in 0..10 {
                let w = random_relator(&pi1, &mut r);
                assert!(pi1.is_trivial(&w).unwrap(), "{}", pi1.format_word(&w));
            }
        }
    }

    #[test]
    fn pd_matrices_are_positive_definite() {
        let mut r = rng(17);
        for n in 1..=4 {
            for _ in 0..5 {
                let m = random_pd_matrix(&mut r, n);
                assert_eq!(m, m.transpose());
                assert!(m.is_positive_definite());
            }
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let g1 = random_valid_graph(&mut rng(99), 5);
        let g2 = random_valid_graph(&mut rng(99), 5);
        assert_eq!(format!("{g1:?}"), format!("{g2:?}"));
    }
}
