//! Finitely generated abelian groups in invariant-factor form, their
//! homomorphisms, and the lattice computations (kernels, preimages,
//! canonical coset representatives) the word problem reduces to.
//!
//! A group is `Z^rank + Z/d_1 + ... + Z/d_t` with `d_i >= 2` and
//! `d_i | d_{i+1}`. Elements are coordinate vectors of length
//! `rank + t`, torsion coordinates always reduced into `[0, d_i)`.
//! Homomorphisms are integer matrices whose columns are the images of the
//! domain generators; well-definedness is checked at construction.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::intmat::{col_hnf, kernel_basis, smith_normal_form, solve, ColHnf, Int, IntMat, Smith};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FgAbGroup {
    rank: usize,
    torsion: Vec<Int>,
}

impl FgAbGroup {
    /// Requires the torsion list to already be an invariant-factor chain.
    pub fn new(rank: usize, torsion: Vec<Int>) -> Result<Self> {
        for (i, d) in torsion.iter().enumerate() {
            if *d < Int::from(2) {
                return Err(Error::GroupMismatch(format!(
                    "torsion factor {d} is not >= 2"
                )));
            }
            if i > 0 && !d.mod_floor(&torsion[i - 1]).is_zero() {
                return Err(Error::GroupMismatch(format!(
                    "torsion factors violate divisibility: {} does not divide {}",
                    torsion[i - 1],
                    d
                )));
            }
        }
        Ok(FgAbGroup { rank, torsion })
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup { rank, torsion: Vec::new() }
    }

    pub fn trivial() -> Self {
        FgAbGroup::free(0)
    }

    /// Normalize an arbitrary torsion list (any integers; zeros add free
    /// rank, units vanish) into invariant-factor form via Smith reduction
    /// of the diagonal relation matrix.
    pub fn normalized(rank: usize, torsion: Vec<Int>) -> Self {
        let n = torsion.len();
        let mut diag = IntMat::zeros(n, n);
        for (i, d) in torsion.into_iter().enumerate() {
            diag.set(i, i, d);
        }
        let s = smith_normal_form(&diag);
        FgAbGroup { rank: rank + n - s.rank, torsion: s.torsion_factors() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[Int] {
        &self.torsion
    }

    pub fn gen_count(&self) -> usize {
        self.rank + self.torsion.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.gen_count() == 0
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> Int {
        self.torsion.iter().product()
    }

    /// Relation matrix: one column `d_i * e_{rank+i}` per torsion factor.
    pub fn relation_matrix(&self) -> IntMat {
        let mut m = IntMat::zeros(self.gen_count(), self.torsion.len());
        for (i, d) in self.torsion.iter().enumerate() {
            m.set(self.rank + i, i, d.clone());
        }
        m
    }

    fn canonicalize(&self, coords: &mut [Int]) {
        for (i, d) in self.torsion.iter().enumerate() {
            let c = coords[self.rank + i].mod_floor(d);
            coords[self.rank + i] = c;
        }
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AbElement {
    group: Arc<FgAbGroup>,
    coords: Vec<Int>,
}

fn same_group(a: &Arc<FgAbGroup>, b: &Arc<FgAbGroup>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl AbElement {
    pub fn new(group: &Arc<FgAbGroup>, mut coords: Vec<Int>) -> Result<Self> {
        if coords.len() != group.gen_count() {
            return Err(Error::Dimension(format!(
                "element has {} coordinates, group {} needs {}",
                coords.len(),
                group,
                group.gen_count()
            )));
        }
        group.canonicalize(&mut coords);
        Ok(AbElement { group: group.clone(), coords })
    }

    pub fn from_i64(group: &Arc<FgAbGroup>, coords: &[i64]) -> Result<Self> {
        AbElement::new(group, coords.iter().map(|&c| Int::from(c)).collect())
    }

    pub fn zero(group: &Arc<FgAbGroup>) -> Self {
        AbElement { group: group.clone(), coords: vec![Int::zero(); group.gen_count()] }
    }

    pub fn generator(group: &Arc<FgAbGroup>, i: usize) -> Result<Self> {
        let mut coords = vec![Int::zero(); group.gen_count()];
        if i >= coords.len() {
            return Err(Error::Dimension(format!("no generator {i} in {group}")));
        }
        coords[i] = Int::one();
        AbElement::new(group, coords)
    }

    pub fn group(&self) -> &Arc<FgAbGroup> {
        &self.group
    }

    pub fn coords(&self) -> &[Int] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// True when the element lies in the torsion subgroup.
    pub fn is_torsion(&self) -> bool {
        self.coords[..self.group.rank].iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &AbElement) -> Result<AbElement> {
        if !same_group(&self.group, &other.group) {
            return Err(Error::GroupMismatch(format!(
                "cannot add elements of {} and {}",
                self.group, other.group
            )));
        }
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        AbElement::new(&self.group, coords)
    }

    pub fn neg(&self) -> AbElement {
        let coords = self.coords.iter().map(|c| -c).collect();
        AbElement::new(&self.group, coords).expect("negation stays in group")
    }

    pub fn sub(&self, other: &AbElement) -> Result<AbElement> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Int) -> AbElement {
        let coords = self.coords.iter().map(|x| c * x).collect();
        AbElement::new(&self.group, coords).expect("scaling stays in group")
    }

    /// Coordinates of the free part, torsion forgotten.
    pub fn free_coords(&self) -> &[Int] {
        &self.coords[..self.group.rank]
    }
}

impl fmt::Display for AbElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Homomorphism between two groups, stored as the integer matrix whose
/// j-th column is the image of the j-th domain generator. Torsion rows are
/// kept reduced modulo their factor so equal homs compare equal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbHom {
    domain: Arc<FgAbGroup>,
    codomain: Arc<FgAbGroup>,
    matrix: IntMat,
}

impl AbHom {
    pub fn new(domain: &Arc<FgAbGroup>, codomain: &Arc<FgAbGroup>, matrix: IntMat) -> Result<Self> {
        if matrix.rows() != codomain.gen_count() || matrix.cols() != domain.gen_count() {
            return Err(Error::Dimension(format!(
                "hom matrix is {}x{}, expected {}x{} for {} -> {}",
                matrix.rows(),
                matrix.cols(),
                codomain.gen_count(),
                domain.gen_count(),
                domain,
                codomain
            )));
        }
        // A torsion generator of order d must map to an element killed by d.
        for j in 0..domain.gen_count() {
            if j < domain.rank {
                continue;
            }
            let d = &domain.torsion[j - domain.rank];
            for i in 0..codomain.gen_count() {
                let v = d * matrix.get(i, j);
                let ok = if i < codomain.rank {
                    v.is_zero()
                } else {
                    v.mod_floor(&codomain.torsion[i - codomain.rank]).is_zero()
                };
                if !ok {
                    return Err(Error::IllFormedHom(format!(
                        "generator {j} of order {d} maps to an element not killed by {d}"
                    )));
                }
            }
        }
        let mut matrix = matrix;
        for i in codomain.rank..codomain.gen_count() {
            let d = codomain.torsion[i - codomain.rank].clone();
            for j in 0..matrix.cols() {
                let v = matrix.get(i, j).mod_floor(&d);
                matrix.set(i, j, v);
            }
        }
        Ok(AbHom { domain: domain.clone(), codomain: codomain.clone(), matrix })
    }

    pub fn from_i64(
        domain: &Arc<FgAbGroup>,
        codomain: &Arc<FgAbGroup>,
        rows: &[&[i64]],
    ) -> Result<Self> {
        let m = if rows.is_empty() {
            IntMat::zeros(0, domain.gen_count())
        } else {
            IntMat::from_rows(
                rows.iter().map(|r| r.iter().map(|&v| Int::from(v)).collect()).collect(),
            )?
        };
        AbHom::new(domain, codomain, m)
    }

    pub fn identity(group: &Arc<FgAbGroup>) -> Self {
        AbHom::new(group, group, IntMat::identity(group.gen_count()))
            .expect("identity is well-defined")
    }

    pub fn zero(domain: &Arc<FgAbGroup>, codomain: &Arc<FgAbGroup>) -> Self {
        AbHom::new(domain, codomain, IntMat::zeros(codomain.gen_count(), domain.gen_count()))
            .expect("zero map is well-defined")
    }

    pub fn domain(&self) -> &Arc<FgAbGroup> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<FgAbGroup> {
        &self.codomain
    }

    pub fn matrix(&self) -> &IntMat {
        &self.matrix
    }

    /// The induced map on free parts: top-left `rank(cod) x rank(dom)` block.
    /// (Torsion generators have zero free image, so nothing is lost.)
    pub fn free_block(&self) -> IntMat {
        self.matrix.submatrix(self.codomain.rank, self.domain.rank)
    }

    pub fn apply(&self, el: &AbElement) -> Result<AbElement> {
        if !same_group(&el.group, &self.domain) {
            return Err(Error::GroupMismatch(format!(
                "element of {} fed to hom with domain {}",
                el.group, self.domain
            )));
        }
        AbElement::new(&self.codomain, self.matrix.mul_vec(&el.coords))
    }

    /// `self . inner` (apply `inner` first).
    pub fn compose(&self, inner: &AbHom) -> Result<AbHom> {
        if !same_group(&inner.codomain, &self.domain) {
            return Err(Error::GroupMismatch(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.domain, self.codomain, inner.domain, inner.codomain
            )));
        }
        AbHom::new(&inner.domain, &self.codomain, self.matrix.mul(&inner.matrix))
    }

    /// Map matrix and codomain relations stacked side by side; its column
    /// lattice is the preimage of 0 in coordinates, i.e. everything that
    /// vanishes in the codomain.
    fn stacked(&self) -> IntMat {
        self.matrix.hstack(&self.codomain.relation_matrix())
    }

    /// Kernel as an abstract group: solve `h(x) = 0` as a lattice through
    /// the relations of both sides, then read off invariant factors.
    pub fn kernel(&self) -> FgAbGroup {
        let n = self.domain.gen_count();
        let w = kernel_basis(&self.stacked());
        let x = w.submatrix(n, w.cols());
        let k = x.cols();
        let w2 = kernel_basis(&x.hstack(&self.domain.relation_matrix()));
        let c = w2.submatrix(k, w2.cols());
        let s = smith_normal_form(&c);
        FgAbGroup { rank: k - s.rank, torsion: s.torsion_factors() }
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_trivial()
    }

    /// Cokernel (codomain modulo image) as an abstract group.
    pub fn cokernel(&self) -> FgAbGroup {
        let m = self.codomain.gen_count();
        let s = smith_normal_form(&self.stacked());
        FgAbGroup { rank: m - s.rank, torsion: s.torsion_factors() }
    }

    pub fn solver(&self) -> ImageSolver {
        ImageSolver {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            smith: smith_normal_form(&self.stacked()),
            dom_gens: self.domain.gen_count(),
        }
    }

    /// Some preimage of `target` under this hom, if `target` is in the image.
    pub fn preimage(&self, target: &AbElement) -> Result<Option<AbElement>> {
        self.solver().preimage(target)
    }

    pub fn coset_reducer(&self) -> Result<CosetReducer> {
        if !self.is_injective() {
            return Err(Error::NotInjective(format!(
                "coset representatives need an injective edge map, kernel is {}",
                self.kernel()
            )));
        }
        Ok(CosetReducer { codomain: self.codomain.clone(), hnf: col_hnf(&self.stacked()) })
    }

    /// Canonical representative of `a + image(self)`; requires injectivity.
    pub fn coset_rep(&self, a: &AbElement) -> Result<AbElement> {
        self.coset_reducer()?.reduce(a)
    }
}

/// Reusable solver for `h(x) = target`, factored once.
#[derive(Clone, Debug)]
pub struct ImageSolver {
    domain: Arc<FgAbGroup>,
    codomain: Arc<FgAbGroup>,
    smith: Smith,
    dom_gens: usize,
}

impl ImageSolver {
    pub fn preimage(&self, target: &AbElement) -> Result<Option<AbElement>> {
        if !same_group(&target.group, &self.codomain) {
            return Err(Error::GroupMismatch(format!(
                "membership target in {}, expected {}",
                target.group, self.codomain
            )));
        }
        Ok(solve(&self.smith, &target.coords).map(|z| {
            AbElement::new(&self.domain, z[..self.dom_gens].to_vec())
                .expect("solution has domain length")
        }))
    }

    pub fn contains(&self, target: &AbElement) -> Result<bool> {
        Ok(self.preimage(target)?.is_some())
    }
}

/// Canonical coset reduction modulo the image lattice of an injective hom
/// (image columns plus codomain relations, in column Hermite form).
#[derive(Clone, Debug)]
pub struct CosetReducer {
    codomain: Arc<FgAbGroup>,
    hnf: ColHnf,
}

impl CosetReducer {
    pub fn reduce(&self, a: &AbElement) -> Result<AbElement> {
        if !same_group(&a.group, &self.codomain) {
            return Err(Error::GroupMismatch(format!(
                "coset reduction of element in {}, expected {}",
                a.group, self.codomain
            )));
        }
        AbElement::new(&self.codomain, self.hnf.reduce_vec(&a.coords))
    }

    /// Pivot (row, value) pairs: representative coordinates range over
    /// `[0, value)` at these rows.
    pub fn pivot_ranges(&self) -> Vec<(usize, Int)> {
        self.hnf
            .pivots
            .iter()
            .map(|&(r, c)| (r, self.hnf.h.get(r, c).clone()))
            .collect()
    }

    /// Rows with no pivot; nonempty exactly when the image has infinite index.
    pub fn free_rows(&self) -> Vec<usize> {
        self.hnf.free_rows(self.codomain.gen_count())
    }

    pub fn finite_index(&self) -> bool {
        self.free_rows().is_empty()
    }

    /// Index of the image when finite.
    pub fn index(&self) -> Option<Int> {
        if !self.finite_index() {
            return None;
        }
        Some(self.pivot_ranges().into_iter().map(|(_, p)| p).product())
    }

    /// Enumerate canonical representatives. When the index is infinite,
    /// pivot coordinates still range over their full (finite) intervals and
    /// free coordinates are clamped to `[-bound, bound]`; the flag reports
    /// whether clamping happened.
    pub fn representatives(&self, bound: &Int) -> (Vec<AbElement>, bool) {
        let n = self.codomain.gen_count();
        let pivots = self.pivot_ranges();
        let free = self.free_rows();
        let truncated = !free.is_empty();
        // Mixed-radix enumeration, pivot rows then free rows, row-major order.
        let mut axes: Vec<(usize, Vec<Int>)> = Vec::new();
        for (r, p) in &pivots {
            let mut vals = Vec::new();
            let mut v = Int::zero();
            while &v < p {
                vals.push(v.clone());
                v += 1;
            }
            axes.push((*r, vals));
        }
        for r in &free {
            let mut vals = Vec::new();
            let mut v = -bound.clone();
            while &v <= bound {
                vals.push(v.clone());
                v += 1;
            }
            axes.push((*r, vals));
        }
        axes.sort_by_key(|(r, _)| *r);
        let mut out = Vec::new();
        let mut idx = vec![0usize; axes.len()];
        'outer: loop {
            let mut coords = vec![Int::zero(); n];
            for (a, &i) in axes.iter().zip(&idx) {
                coords[a.0] = a.1[i].clone();
            }
            out.push(AbElement::new(&self.codomain, coords).expect("representative in range"));
            for k in (0..axes.len()).rev() {
                idx[k] += 1;
                if idx[k] < axes[k].1.len() {
                    continue 'outer;
                }
                idx[k] = 0;
            }
            break;
        }
        (out, truncated)
    }
}

/// All elements of the torsion subgroup, in mixed-radix order.
pub fn torsion_elements(group: &Arc<FgAbGroup>) -> Vec<AbElement> {
    let n = group.gen_count();
    let rank = group.rank();
    let mut out = Vec::new();
    let mut coords = vec![Int::zero(); n];
    'outer: loop {
        out.push(AbElement::new(group, coords.clone()).expect("torsion coords in range"));
        for k in (0..group.torsion.len()).rev() {
            coords[rank + k] += 1;
            if coords[rank + k] < group.torsion[k] {
                continue 'outer;
            }
            coords[rank + k] = Int::zero();
        }
        break;
    }
    out
}

/// The subgroup of `cod` generated by `gens`, returned as an abstract group
/// together with its (injective) inclusion.
pub fn subgroup_from_generators(
    cod: &Arc<FgAbGroup>,
    gens: &[AbElement],
) -> Result<(Arc<FgAbGroup>, AbHom)> {
    let m = cod.gen_count();
    let g = gens.len();
    let mut s_mat = IntMat::zeros(m, g);
    for (j, el) in gens.iter().enumerate() {
        if !same_group(el.group(), cod) {
            return Err(Error::GroupMismatch(format!(
                "generator {j} lies in {}, expected {}",
                el.group(),
                cod
            )));
        }
        for i in 0..m {
            s_mat.set(i, j, el.coords[i].clone());
        }
    }
    // Relations among the generators: coefficient vectors whose combination
    // dies in the codomain.
    let w = kernel_basis(&s_mat.hstack(&cod.relation_matrix()));
    let c = w.submatrix(g, w.cols());
    let s = smith_normal_form(&c);
    let su = s_mat.mul(&s.u_inv);
    let mut order: Vec<usize> = (s.rank..g).collect();
    let mut torsion = Vec::new();
    for i in 0..s.rank {
        if !s.diag(i).is_one() {
            order.push(i);
            torsion.push(s.diag(i).clone());
        }
    }
    // `order` lists free generators first, then torsion in ascending
    // divisibility; but torsion was appended after, so re-split:
    let free_count = g - s.rank;
    let (free_idx, tors_idx) = order.split_at(free_count);
    let h = Arc::new(FgAbGroup { rank: free_count, torsion });
    let cols: Vec<usize> = free_idx.iter().chain(tors_idx.iter()).copied().collect();
    let emb = AbHom::new(&h, cod, su.select_cols(&cols))?;
    debug_assert!(emb.is_injective());
    Ok((h, emb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intmat::int;

    fn grp(rank: usize, torsion: &[i64]) -> Arc<FgAbGroup> {
        Arc::new(FgAbGroup::new(rank, torsion.iter().map(|&d| Int::from(d)).collect()).unwrap())
    }

    #[test]
    fn invariant_factor_chain_enforced() {
        assert!(FgAbGroup::new(0, vec![int(2), int(3)]).is_err());
        assert!(FgAbGroup::new(0, vec![int(1)]).is_err());
        assert!(FgAbGroup::new(1, vec![int(2), int(4)]).is_ok());
    }

    #[test]
    fn normalization_via_smith() {
        let g = FgAbGroup::normalized(0, vec![int(2), int(3)]);
        assert_eq!(g.rank(), 0);
        assert_eq!(g.torsion(), &[int(6)]);
        let g = FgAbGroup::normalized(1, vec![int(0), int(4), int(1)]);
        assert_eq!(g.rank(), 2);
        assert_eq!(g.torsion(), &[int(4)]);
    }

    #[test]
    fn addition_reduces_torsion_coordinates() {
        let g = grp(1, &[4]);
        let a = AbElement::from_i64(&g, &[1, 3]).unwrap();
        let b = AbElement::from_i64(&g, &[0, 2]).unwrap();
        assert_eq!(a.add(&b).unwrap(), AbElement::from_i64(&g, &[1, 1]).unwrap());
        assert_eq!(a.neg(), AbElement::from_i64(&g, &[-1, 1]).unwrap());
        assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn group_mismatch_is_refused() {
        let a = AbElement::from_i64(&grp(1, &[]), &[1]).unwrap();
        let b = AbElement::from_i64(&grp(0, &[2]), &[1]).unwrap();
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn hom_must_kill_torsion() {
        // Z/2 -> Z, 1 -> 1 is not a homomorphism.
        assert!(AbHom::from_i64(&grp(0, &[2]), &grp(1, &[]), &[&[1]]).is_err());
        // Z/2 -> Z/4, 1 -> 2 is fine.
        assert!(AbHom::from_i64(&grp(0, &[2]), &grp(0, &[4]), &[&[2]]).is_ok());
    }

    #[test]
    fn hom_matrix_is_canonicalized() {
        let h = AbHom::from_i64(&grp(1, &[]), &grp(0, &[4]), &[&[7]]).unwrap();
        assert_eq!(h.matrix().get(0, 0), &int(3));
    }

    #[test]
    fn apply_and_compose() {
        let z = grp(1, &[]);
        let z2 = grp(2, &[]);
        let h = AbHom::from_i64(&z, &z2, &[&[2], &[3]]).unwrap();
        let x = AbElement::from_i64(&z, &[2]).unwrap();
        assert_eq!(h.apply(&x).unwrap(), AbElement::from_i64(&z2, &[4, 6]).unwrap());
        let p = AbHom::from_i64(&z2, &z, &[&[1, 0]]).unwrap();
        let c = p.compose(&h).unwrap();
        assert_eq!(c.apply(&x).unwrap(), AbElement::from_i64(&z, &[4]).unwrap());
    }

    #[test]
    fn kernels_match_known_groups() {
        // Z/4 -> Z/2, 1 -> 1: kernel Z/2.
        let h = AbHom::from_i64(&grp(0, &[4]), &grp(0, &[2]), &[&[1]]).unwrap();
        let k = h.kernel();
        assert_eq!((k.rank(), k.torsion()), (0, &[int(2)][..]));
        // Z^2 -> Z, (x, y) -> x + y: kernel Z.
        let h = AbHom::from_i64(&grp(2, &[]), &grp(1, &[]), &[&[1, 1]]).unwrap();
        let k = h.kernel();
        assert_eq!((k.rank(), k.torsion().len()), (1, 0));
        // multiplication by 2 on Z is injective.
        let h = AbHom::from_i64(&grp(1, &[]), &grp(1, &[]), &[&[2]]).unwrap();
        assert!(h.kernel().is_trivial());
        assert!(h.is_injective());
    }

    #[test]
    fn injectivity_with_torsion() {
        let h = AbHom::from_i64(&grp(0, &[4]), &grp(0, &[8]), &[&[2]]).unwrap();
        assert!(h.is_injective());
        let h = AbHom::from_i64(&grp(0, &[4]), &grp(0, &[4]), &[&[2]]).unwrap();
        assert!(!h.is_injective());
    }

    #[test]
    fn cokernel_counts_index() {
        let h = AbHom::from_i64(&grp(1, &[]), &grp(1, &[]), &[&[3]]).unwrap();
        let c = h.cokernel();
        assert_eq!((c.rank(), c.torsion()), (0, &[int(3)][..]));
    }

    #[test]
    fn preimage_solves_or_refuses() {
        let z = grp(1, &[]);
        let z2 = grp(2, &[]);
        let h = AbHom::from_i64(&z, &z2, &[&[2], &[3]]).unwrap();
        let hit = h.preimage(&AbElement::from_i64(&z2, &[4, 6]).unwrap()).unwrap().unwrap();
        assert_eq!(h.apply(&hit).unwrap(), AbElement::from_i64(&z2, &[4, 6]).unwrap());
        assert!(h.preimage(&AbElement::from_i64(&z2, &[1, 1]).unwrap()).unwrap().is_none());
        // torsion target: Z -> Z/6, 1 -> 2.
        let z6 = grp(0, &[6]);
        let h = AbHom::from_i64(&z, &z6, &[&[2]]).unwrap();
        let four = AbElement::from_i64(&z6, &[4]).unwrap();
        let s = h.preimage(&four).unwrap().unwrap();
        assert_eq!(h.apply(&s).unwrap(), four);
        assert!(h.preimage(&AbElement::from_i64(&z6, &[3]).unwrap()).unwrap().is_none());
    }

    #[test]
    fn coset_reps_are_canonical() {
        let z = grp(1, &[]);
        let z2 = grp(2, &[]);
        // image = Z x 0, reps normalize the first coordinate away.
        let h = AbHom::from_i64(&z, &z2, &[&[1], &[0]]).unwrap();
        let a = AbElement::from_i64(&z2, &[5, 2]).unwrap();
        assert_eq!(h.coset_rep(&a).unwrap(), AbElement::from_i64(&z2, &[0, 2]).unwrap());
        // image = 3Z, reps in [0, 3).
        let h = AbHom::from_i64(&z, &z, &[&[3]]).unwrap();
        let a = AbElement::from_i64(&z, &[-2]).unwrap();
        assert_eq!(h.coset_rep(&a).unwrap(), AbElement::from_i64(&z, &[1]).unwrap());
    }

    #[test]
    fn coset_rep_constant_on_cosets() {
        let z = grp(1, &[]);
        let z2 = grp(2, &[]);
        let h = AbHom::from_i64(&z, &z2, &[&[2], &[3]]).unwrap();
        let a = AbElement::from_i64(&z2, &[1, -4]).unwrap();
        let s = AbElement::from_i64(&z, &[7]).unwrap();
        let shifted = a.add(&h.apply(&s).unwrap()).unwrap();
        assert_eq!(h.coset_rep(&a).unwrap(), h.coset_rep(&shifted).unwrap());
    }

    #[test]
    fn coset_rep_requires_injectivity() {
        let h = AbHom::from_i64(&grp(0, &[4]), &grp(0, &[4]), &[&[2]]).unwrap();
        let a = AbElement::from_i64(&grp(0, &[4]), &[1]).unwrap();
        assert!(matches!(h.coset_rep(&a), Err(Error::NotInjective(_))));
    }

    #[test]
    fn representative_enumeration_finite_and_truncated() {
        let z = grp(1, &[]);
        // 3Z <= Z: three representatives, no truncation.
        let h = AbHom::from_i64(&z, &z, &[&[3]]).unwrap();
        let (reps, truncated) = h.coset_reducer().unwrap().representatives(&int(2));
        assert_eq!(reps.len(), 3);
        assert!(!truncated);
        // Z x 0 <= Z^2: infinite index, clamped at +-2.
        let z2 = grp(2, &[]);
        let h = AbHom::from_i64(&z, &z2, &[&[1], &[0]]).unwrap();
        let (reps, truncated) = h.coset_reducer().unwrap().representatives(&int(2));
        assert_eq!(reps.len(), 5);
        assert!(truncated);
    }

    #[test]
    fn torsion_enumeration() {
        let g = grp(1, &[2, 4]);
        let els = torsion_elements(&g);
        assert_eq!(els.len(), 8);
        assert!(els.iter().all(|e| e.is_torsion()));
        assert_eq!(g.torsion_order(), int(8));
    }

    #[test]
    fn subgroup_of_free_group() {
        let z2 = grp(2, &[]);
        let gens = vec![
            AbElement::from_i64(&z2, &[2, 0]).unwrap(),
            AbElement::from_i64(&z2, &[0, 3]).unwrap(),
        ];
        let (h, emb) = subgroup_from_generators(&z2, &gens).unwrap();
        assert_eq!((h.rank(), h.torsion().len()), (2, 0));
        assert!(emb.is_injective());
    }

    #[test]
    fn subgroup_with_torsion() {
        let z4 = grp(0, &[4]);
        let gens = vec![AbElement::from_i64(&z4, &[2]).unwrap()];
        let (h, emb) = subgroup_from_generators(&z4, &gens).unwrap();
        assert_eq!((h.rank(), h.torsion()), (0, &[int(2)][..]));
        // the image of the order-2 generator is 2 mod 4
        let g0 = AbElement::generator(&h, 0).unwrap();
        assert_eq!(emb.apply(&g0).unwrap(), AbElement::from_i64(&z4, &[2]).unwrap());
    }

    #[test]
    fn subgroup_of_mixed_group() {
        let g = grp(1, &[6]);
        let gens = vec![
            AbElement::from_i64(&g, &[2, 0]).unwrap(),
            AbElement::from_i64(&g, &[0, 3]).unwrap(),
        ];
        let (h, emb) = subgroup_from_generators(&g, &gens).unwrap();
        assert_eq!((h.rank(), h.torsion()), (1, &[int(2)][..]));
        assert!(emb.is_injective());
    }
}
