//! The induced morphism of an n-valued map: a tuple `(phi_1..phi_n; sigma)`
//! into the wreath-type covering group `Delta^n x| Sigma_n`, with the
//! sigma-orbit / stabilizer analysis, splitting subgroup, branch linear
//! parts and twisted-conjugacy (Reidemeister) class machinery.
//!
//! Branch indices are 0-based internally; the wire format and display are
//! 1-based. Arity is capped at n <= 12 since the permutation image group is
//! materialized by closure.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::crystal::{FlatGroup, Gen, GroupElement, GroupOps, SingleMorphism};
use crate::error::{Error, Result};
use crate::lattice::{kernel_lattice, solve_integer};
use crate::lattice::{lattice_index, lattice_sum, quotient_transversal, Count, Lattice};
use crate::matrix::{ivec_add, ivec_neg, ivec_zero, IVec, Mat, QMat, QVec};
use crate::rational::{rat_of, Int};

pub const MAX_ARITY: usize = 12;

/// A permutation of `{0..n-1}`, stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidInput(format!(
                    "invalid permutation image array {images:?}"
                )));
            }
            seen[i] = true;
        }
        Ok(Perm(images))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `(self . other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.n(), other.n());
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.n()];
        for (i, &img) in self.0.iter().enumerate() {
            inv[img] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &img)| i == img)
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }
}

/// An element `(alpha_1, ..., alpha_n; pi)` of `Delta^n x| Sigma_n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SemidirectElement {
    pub tuple: Vec<GroupElement>,
    pub perm: Perm,
}

/// The covering group `Delta^n x| Sigma_n` for a fixed target `Delta`.
pub struct SemidirectGroup<'a> {
    pub target: &'a FlatGroup,
    pub n: usize,
}

impl<'a> SemidirectGroup<'a> {
    pub fn new(target: &'a FlatGroup, n: usize) -> SemidirectGroup<'a> {
        SemidirectGroup { target, n }
    }

    pub fn multiply_checked(
        &self,
        a: &SemidirectElement,
        b: &SemidirectElement,
    ) -> Result<SemidirectElement> {
        if a.tuple.len() != self.n || b.tuple.len() != self.n || a.perm.n() != b.perm.n() {
            return Err(Error::ArityMismatch);
        }
        for e in a.tuple.iter().chain(&b.tuple) {
            self.target.check_element(e)?;
        }
        let sigma_inv = a.perm.inverse();
        let tuple = (0..self.n)
            .map(|i| {
                self.target
                    .compose(&a.tuple[i], &b.tuple[sigma_inv.apply(i)])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SemidirectElement {
            tuple,
            perm: a.perm.compose(&b.perm),
        })
    }
}

impl GroupOps for SemidirectGroup<'_> {
    type Elem = SemidirectElement;

    fn identity_elem(&self) -> SemidirectElement {
        SemidirectElement {
            tuple: vec![self.target.identity(); self.n],
            perm: Perm::identity(self.n),
        }
    }

    fn multiply(&self, a: &SemidirectElement, b: &SemidirectElement) -> SemidirectElement {
        self.multiply_checked(a, b).expect("compatible elements")
    }

    fn inverse(&self, a: &SemidirectElement) -> SemidirectElement {
        let perm = a.perm.inverse();
        let tuple = (0..self.n)
            .map(|j| {
                self.target
                    .invert(&a.tuple[a.perm.apply(j)])
                    .expect("element of target group")
            })
            .collect();
        SemidirectElement { tuple, perm }
    }
}

/// The morphism `phi = (phi_1..phi_n; sigma): Pi_1 -> Pi_2^n x| Sigma_n`
/// induced by a lift of an n-valued map, given on the canonical generators.
#[derive(Clone, PartialEq, Debug)]
pub struct NvMorphism {
    pub n: usize,
    pub source: FlatGroup,
    pub target: FlatGroup,
    pub lattice_images: Vec<SemidirectElement>,
    pub holonomy_images: Vec<SemidirectElement>,
}

impl NvMorphism {
    pub fn new(
        n: usize,
        source: FlatGroup,
        target: FlatGroup,
        lattice_images: Vec<SemidirectElement>,
        holonomy_images: Vec<SemidirectElement>,
    ) -> Result<NvMorphism> {
        if n == 0 || n > MAX_ARITY {
            return Err(Error::InvalidInput(format!(
                "arity {n} outside supported range 1..={MAX_ARITY}"
            )));
        }
        if lattice_images.len() != source.dim()
            || holonomy_images.len() != source.holonomy_order() - 1
        {
            return Err(Error::InvalidInput(
                "generator image count does not match the source group".to_string(),
            ));
        }
        for img in lattice_images.iter().chain(&holonomy_images) {
            if img.tuple.len() != n || img.perm.n() != n {
                return Err(Error::ArityMismatch);
            }
            for e in &img.tuple {
                target.check_element(e)?;
            }
        }
        Ok(NvMorphism {
            n,
            source,
            target,
            lattice_images,
            holonomy_images,
        })
    }

    /// Embeds a single-valued morphism as the n = 1 case.
    pub fn from_single(m: &SingleMorphism) -> NvMorphism {
        let wrap = |e: &GroupElement| SemidirectElement {
            tuple: vec![e.clone()],
            perm: Perm::identity(1),
        };
        NvMorphism {
            n: 1,
            source: m.source.clone(),
            target: m.target.clone(),
            lattice_images: m.lattice_images.iter().map(wrap).collect(),
            holonomy_images: m.holonomy_images.iter().map(wrap).collect(),
        }
    }

    pub fn semidirect(&self) -> SemidirectGroup<'_> {
        SemidirectGroup::new(&self.target, self.n)
    }

    fn image_of(&self, gen: Gen) -> SemidirectElement {
        match gen {
            Gen::Lat(a) => self.lattice_images[a].clone(),
            Gen::Hol(j) => self.holonomy_images[j - 1].clone(),
        }
    }

    /// True iff every relator of the source maps to the identity of
    /// `Delta^n x| Sigma_n`.
    pub fn verify(&self) -> bool {
        let ops = self.semidirect();
        let image = |g: Gen| self.image_of(g);
        self.source
            .relators()
            .iter()
            .all(|w| ops.eval_word(w, &image) == ops.identity_elem())
    }

    /// Image of a pure lattice translation. Assumes a verified morphism, so
    /// the generator images commute and the order of factors is immaterial.
    pub fn apply_translation(&self, v: &[Int]) -> SemidirectElement {
        assert_eq!(v.len(), self.source.dim());
        let ops = self.semidirect();
        let mut acc = ops.identity_elem();
        for (a, e) in v.iter().enumerate() {
            let exp = i64::try_from(e).expect("translation exponent fits i64");
            let p = ops.power(&self.lattice_images[a], exp);
            acc = ops.multiply(&acc, &p);
        }
        acc
    }

    /// Image of an arbitrary source element.
    pub fn apply(&self, e: &GroupElement) -> Result<SemidirectElement> {
        self.source.check_element(e)?;
        let t_img = self.apply_translation(&e.trans);
        if e.hol == 0 {
            return Ok(t_img);
        }
        Ok(self
            .semidirect()
            .multiply(&t_img, &self.holonomy_images[e.hol - 1]))
    }

    /// Permutation part of the image of a lattice translation.
    pub fn sigma_translation(&self, v: &[Int]) -> Perm {
        let mut acc = Perm::identity(self.n);
        for (a, e) in v.iter().enumerate() {
            let exp = i64::try_from(e).expect("translation exponent fits i64");
            let base = if exp < 0 {
                self.lattice_images[a].perm.inverse()
            } else {
                self.lattice_images[a].perm.clone()
            };
            for _ in 0..exp.unsigned_abs() {
                acc = acc.compose(&base);
            }
        }
        acc
    }

    pub fn sigma(&self, e: &GroupElement) -> Perm {
        let lat = self.sigma_translation(&e.trans);
        if e.hol == 0 {
            lat
        } else {
            lat.compose(&self.holonomy_images[e.hol - 1].perm)
        }
    }

    /// The branch component `phi_i(gamma)`; a homomorphism on the
    /// stabilizer `S_i`.
    pub fn branch(&self, e: &GroupElement, i: usize) -> Result<GroupElement> {
        Ok(self.apply(e)?.tuple[i].clone())
    }
}

/// Stabilizer data for one branch index.
#[derive(Clone, Debug)]
pub struct BranchStabilizer {
    /// Smallest index in the sigma-orbit of this branch.
    pub orbit_rep: usize,
    /// `[Pi : S_i]`, the orbit size.
    pub orbit_size: usize,
    /// `[S_i : S]`.
    pub stab_order: usize,
    /// `L_i = S_i` intersected with the translation lattice.
    pub lattice: Lattice,
    /// Stabilizing holonomy cosets of `S_i`: `(j, t)` with
    /// `translation(t) . h_j` in `S_i`, for j >= 1.
    pub hol_cosets: Vec<(usize, IVec)>,
}

/// The sigma-orbit / stabilizer analysis of an n-valued morphism.
#[derive(Clone, Debug)]
pub struct SigmaAnalysis {
    /// `[Pi : S]`, the order of the image permutation group.
    pub image_order: usize,
    /// Splitting lattice `L_S = S` intersected with the translation lattice.
    pub splitting_lattice: Lattice,
    /// Holonomy cosets meeting `S`: `(j, t)` with `translation(t) . h_j` in
    /// `S`, for j >= 1.
    pub s_hol_cosets: Vec<(usize, IVec)>,
    /// Sigma-orbits, each sorted, ordered by smallest element.
    pub orbits: Vec<Vec<usize>>,
    pub branches: Vec<BranchStabilizer>,
}

impl SigmaAnalysis {
    /// `[S : S cap Gamma]`: the number of holonomy cosets meeting `S`.
    pub fn splitting_holonomy_order(&self) -> usize {
        1 + self.s_hol_cosets.len()
    }

    pub fn orbit_of(&self, i: usize) -> &Vec<usize> {
        self.orbits
            .iter()
            .find(|orbit| orbit.contains(&i))
            .expect("branch index in some orbit")
    }
}

/// Closure of the subgroup generated by `gens`, with a representative
/// exponent vector per element and the Schreier kernel generators of the
/// evaluation map Z^d -> group. Requires pairwise commuting generators.
fn abelian_closure(n: usize, gens: &[Perm]) -> (HashMap<Perm, IVec>, Vec<IVec>) {
    let d = gens.len();
    let mut reps: HashMap<Perm, IVec> = HashMap::new();
    let mut kernel = Vec::new();
    let id = Perm::identity(n);
    reps.insert(id.clone(), ivec_zero(d));
    let mut queue = vec![id];
    while let Some(p) = queue.pop() {
        let v = reps[&p].clone();
        for (a, g) in gens.iter().enumerate() {
            let q = p.compose(g);
            let mut w = v.clone();
            w[a] += 1;
            match reps.get(&q) {
                None => {
                    reps.insert(q.clone(), w);
                    queue.push(q);
                }
                Some(r) => {
                    let rel: IVec = w.iter().zip(r).map(|(x, y)| x - y).collect();
                    kernel.push(rel);
                }
            }
        }
    }
    (reps, kernel)
}

/// Orbit of `start` under commuting permutations, with representative
/// exponent vectors and Schreier generators of the point stabilizer in Z^d.
fn abelian_orbit_stabilizer(start: usize, gens: &[Perm]) -> (HashMap<usize, IVec>, Vec<IVec>) {
    let d = gens.len();
    let mut reps: HashMap<usize, IVec> = HashMap::new();
    let mut stab = Vec::new();
    reps.insert(start, ivec_zero(d));
    let mut queue = vec![start];
    while let Some(p) = queue.pop() {
        let v = reps[&p].clone();
        for (a, g) in gens.iter().enumerate() {
            let q = g.apply(p);
            let mut w = v.clone();
            w[a] += 1;
            match reps.get(&q) {
                None => {
                    reps.insert(q, w);
                    queue.push(q);
                }
                Some(r) => {
                    let rel: IVec = w.iter().zip(r).map(|(x, y)| x - y).collect();
                    stab.push(rel);
                }
            }
        }
    }
    (reps, stab)
}

/// Order of the full permutation image group, by closure.
fn image_group_order(n: usize, gens: &[Perm]) -> usize {
    let mut seen = std::collections::HashSet::new();
    let id = Perm::identity(n);
    seen.insert(id.clone());
    let mut queue = vec![id];
    while let Some(p) = queue.pop() {
        for g in gens {
            let q = p.compose(g);
            if seen.insert(q.clone()) {
                queue.push(q);
            }
        }
    }
    seen.len()
}

/// Computes `S = ker sigma`, the sigma-orbits and all stabilizer data.
/// Expects a verified morphism.
pub fn sigma_analysis(phi: &NvMorphism) -> SigmaAnalysis {
    let d = phi.source.dim();
    let n = phi.n;
    let lat_gens: Vec<Perm> = phi.lattice_images.iter().map(|e| e.perm.clone()).collect();
    let hol_gens: Vec<Perm> = phi.holonomy_images.iter().map(|e| e.perm.clone()).collect();
    let all_gens: Vec<Perm> = lat_gens.iter().chain(&hol_gens).cloned().collect();

    let image_order = image_group_order(n, &all_gens);

    let (lat_elems, kernel_gens) = abelian_closure(n, &lat_gens);
    let splitting_lattice = Lattice::from_vectors(d, &kernel_gens);

    let mut s_hol_cosets = Vec::new();
    for (j, h) in hol_gens.iter().enumerate() {
        if let Some(v) = lat_elems.get(&h.inverse()) {
            s_hol_cosets.push((j + 1, v.clone()));
        }
    }

    // orbits under the full image group: connected components of all
    // generator graphs
    let mut parent = (0..n).collect::<Vec<usize>>();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for g in &all_gens {
        for i in 0..n {
            let (a, b) = (find(&mut parent, i), find(&mut parent, g.apply(i)));
            if a != b {
                let (lo, hi) = (a.min(b), a.max(b));
                parent[hi] = lo;
            }
        }
    }
    let mut orbit_map: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        orbit_map.entry(root).or_default().push(i);
    }
    let mut orbits: Vec<Vec<usize>> = orbit_map.into_values().collect();
    for orbit in &mut orbits {
        orbit.sort_unstable();
    }
    orbits.sort();

    let mut branches = Vec::with_capacity(n);
    for i in 0..n {
        let orbit = orbits.iter().find(|o| o.contains(&i)).unwrap();
        let orbit_size = orbit.len();
        let stab_order = image_order / orbit_size;
        let (orbit_reps, stab_gens) = abelian_orbit_stabilizer(i, &lat_gens);
        let lattice = Lattice::from_vectors(d, &stab_gens);
        let mut hol_cosets = Vec::new();
        for (j, h) in hol_gens.iter().enumerate() {
            let p = h.apply(i);
            if let Some(r) = orbit_reps.get(&p) {
                hol_cosets.push((j + 1, ivec_neg(r)));
            }
        }
        branches.push(BranchStabilizer {
            orbit_rep: orbit[0],
            orbit_size,
            stab_order,
            lattice,
            hol_cosets,
        });
    }

    SigmaAnalysis {
        image_order,
        splitting_lattice,
        s_hol_cosets,
        orbits,
        branches,
    }
}

/// The linear part `M_i` of the branch morphism `phi_i`, computed through
/// the refinement `m * L_i` with `m` the target holonomy order.
pub fn branch_lie_matrix(phi: &NvMorphism, sa: &SigmaAnalysis, i: usize) -> Result<QMat> {
    branch_lie_matrix_with_scale(phi, sa, i, &Int::from(phi.target.holonomy_order()))
}

/// Same, over the refinement `s * L_i` for any admissible multiple `s`.
pub fn branch_lie_matrix_with_scale(
    phi: &NvMorphism,
    sa: &SigmaAnalysis,
    i: usize,
    s: &Int,
) -> Result<QMat> {
    let d = phi.source.dim();
    let li = &sa.branches[i].lattice;
    assert!(li.is_full_rank(), "stabilizer lattice has finite index");
    let mut cols: Vec<QVec> = Vec::with_capacity(d);
    for b in 0..d {
        let u: IVec = li.basis().col(b).iter().map(|x| x * s).collect();
        let img = phi.apply_translation(&u).tuple[i].clone();
        if img.hol != 0 {
            return Err(Error::ImageNotTranslation);
        }
        cols.push(img.trans.iter().map(rat_of).collect());
    }
    let w = Mat::from_columns(d, cols);
    let scaled_basis = li.basis().scale(s).to_rat();
    Ok(w.mul(&scaled_basis.inverse().expect("full-rank basis")))
}

/// Twisted-conjugacy classes of `Delta = Z^d` for the branch morphism
/// `phi_i` against `psi`, with `gamma` ranging over the subgroup described
/// by `(lattice, hol_cosets)`. Returns the class count, the sorted
/// canonical transversal when finite, and the image subgroup
/// `(psi - phi_i)(subgroup)`.
pub fn reidemeister_classes_torus_over(
    phi: &NvMorphism,
    psi: &SingleMorphism,
    i: usize,
    lattice: &Lattice,
    hol_cosets: &[(usize, IVec)],
) -> Result<(Count, Vec<IVec>, Lattice)> {
    if !phi.target.is_torus() {
        return Err(Error::TargetHasHolonomy);
    }
    let d = phi.target.dim();
    let mut gens: Vec<IVec> = Vec::new();
    for b in 0..lattice.rank() {
        let u = lattice.basis().col(b);
        let psi_u = psi.apply_translation(&u);
        let phi_u = phi.apply_translation(&u).tuple[i].clone();
        gens.push(ivec_add(&psi_u.trans, &ivec_neg(&phi_u.trans)));
    }
    for (j, t) in hol_cosets {
        let gamma = GroupElement {
            hol: *j,
            trans: t.clone(),
        };
        let psi_g = psi.apply(&gamma)?;
        let phi_g = phi.apply(&gamma)?.tuple[i].clone();
        gens.push(ivec_add(&psi_g.trans, &ivec_neg(&phi_g.trans)));
    }
    let image = Lattice::from_vectors(d, &gens);
    let ambient = Lattice::standard(d);
    let count = lattice_index(&ambient, &image).expect("image of Z^d is a sublattice");
    let transversal = match &count {
        Count::Finite(_) => quotient_transversal(&ambient, &image)?,
        Count::Infinite => Vec::new(),
    };
    Ok((count, transversal, image))
}

/// Classes of `R[phi_i, psi]` (downstairs, over the stabilizer `S_i`) for a
/// torus target.
pub fn reidemeister_classes_torus(
    phi: &NvMorphism,
    psi: &SingleMorphism,
    sa: &SigmaAnalysis,
    i: usize,
) -> Result<(Count, Vec<IVec>, Lattice)> {
    let b = &sa.branches[i];
    reidemeister_classes_torus_over(phi, psi, i, &b.lattice, &b.hol_cosets)
}

/// Transports a class representative: for `i = sigma_gamma(j)`, the pair
/// `(alpha, i)` is equivalent to `(alpha^gamma, j)` with
/// `alpha^gamma = psi(gamma)^{-1} alpha phi_i(gamma)`.
pub fn transport_class(
    phi: &NvMorphism,
    psi: &SingleMorphism,
    alpha: &GroupElement,
    gamma: &GroupElement,
    i: usize,
) -> Result<(GroupElement, usize)> {
    let sigma = phi.sigma(gamma);
    let j = sigma.inverse().apply(i);
    let psi_g = psi.apply(gamma)?;
    let phi_ig = phi.apply(gamma)?.tuple[i].clone();
    let t = &phi.target;
    let transported = t.compose(&t.compose(&t.invert(&psi_g)?, alpha)?, &phi_ig)?;
    Ok((transported, j))
}

/// Data of the coincidence subgroup `coin(tau_alpha phi_i, psi)` inside
/// `S_i` at the linearized level, and the induced fiber size of Reidemeister
/// classes over the splitting cover.
#[derive(Clone, Debug)]
pub struct CoinFiber {
    /// Kernel of `psi_* - A_alpha M_i` on `L_i`.
    pub kernel: Lattice,
    /// Whether the kernel lies inside the splitting lattice `L_S`.
    pub kernel_in_splitting: bool,
    /// `|u_i(coin)|`: the number of splitting-cover cosets met.
    pub u_image_size: Int,
    /// `[S_i : S] / |u_i(coin)|`, when it divides.
    pub fiber_size: Option<Int>,
    /// True when the coin subgroup maps into `S` entirely.
    pub trivial: bool,
}

/// Computes the coin kernel, its image size in `S_i / S`, and the fiber
/// size of the class-projection map over the splitting cover. For holonomy
/// sources the non-lattice stabilizer cosets are swept exactly.
pub fn coin_and_fiber(
    phi: &NvMorphism,
    psi: &SingleMorphism,
    sa: &SigmaAnalysis,
    i: usize,
    alpha: &GroupElement,
) -> Result<CoinFiber> {
    phi.target.check_element(alpha)?;
    let branch = &sa.branches[i];
    let li = &branch.lattice;
    let a_alpha = phi.target.rotation(alpha.hol);
    let m_i = branch_lie_matrix(phi, sa, i)?;
    let psi_star = psi.lie_matrix()?;
    let diff = psi_star.sub(&a_alpha.mul(&m_i));
    let kernel = kernel_lattice(&diff, li);

    let l_s = &sa.splitting_lattice;
    let lattice_image = match lattice_index(&lattice_sum(&kernel, l_s), l_s) {
        Ok(Count::Finite(v)) => v,
        _ => unreachable!("L_S has finite index"),
    };
    let kernel_in_splitting = l_s.contains_lattice(&kernel);

    let mut u_image_size = lattice_image.clone();
    if !branch.hol_cosets.is_empty() {
        u_image_size = sweep_u_image(phi, psi, sa, i, alpha, &kernel)?;
    }

    let stab = Int::from(branch.stab_order);
    let fiber_size = if (&stab % &u_image_size).is_zero() {
        Some(&stab / &u_image_size)
    } else {
        None
    };
    let trivial = u_image_size.is_one();
    Ok(CoinFiber {
        kernel,
        kernel_in_splitting,
        u_image_size,
        fiber_size,
        trivial,
    })
}

/// Exact sweep of `sigma(coin(tau_alpha phi_i, psi))` for sources with
/// holonomy: every coset of the refinement `m L_i` in every stabilizing
/// holonomy coset of `S_i` is solved as an affine lattice system.
fn sweep_u_image(
    phi: &NvMorphism,
    psi: &SingleMorphism,
    sa: &SigmaAnalysis,
    i: usize,
    alpha: &GroupElement,
    kernel: &Lattice,
) -> Result<Int> {
    let branch = &sa.branches[i];
    let li = &branch.lattice;
    let target = &phi.target;
    let m = Int::from(target.holonomy_order());
    let refined = li.scaled(&m);
    let a_alpha = target.rotation(alpha.hol);
    let m_i = branch_lie_matrix(phi, sa, i)?;
    let psi_star = psi.lie_matrix()?;
    // on the refined lattice both morphisms are linear: the condition on
    // translation(w) gamma_0 reduces to (A_alpha M_i - psi_*) w = e
    let t_mat = a_alpha.mul(&m_i).sub(&psi_star);
    let refined_basis = refined.basis().to_rat();
    let system = t_mat.mul(&refined_basis);
    let (sys_int, q) = system.clear_denominators();

    let alpha_inv = target.invert(alpha)?;
    let tau = |x: &GroupElement| -> Result<GroupElement> {
        target.compose(&target.compose(alpha, x)?, &alpha_inv)
    };

    let mut perms: std::collections::HashSet<Perm> = std::collections::HashSet::new();
    // lattice contribution: the subgroup sigma(kernel)
    {
        let gens: Vec<Perm> = (0..kernel.rank())
            .map(|b| phi.sigma_translation(&kernel.basis().col(b)))
            .collect();
        let id = Perm::identity(phi.n);
        perms.insert(id.clone());
        let mut queue = vec![id];
        while let Some(p) = queue.pop() {
            for g in &gens {
                let next = p.compose(g);
                if perms.insert(next.clone()) {
                    queue.push(next);
                }
            }
        }
    }

    let pieces = quotient_transversal(li, &refined)?;
    for (j, t) in &branch.hol_cosets {
        for r in &pieces {
            let gamma0 = GroupElement {
                hol: *j,
                trans: ivec_add(t, r),
            };
            let p0 = tau(&phi.apply(&gamma0)?.tuple[i])?;
            let q0 = psi.apply(&gamma0)?;
            let e = target.compose(&q0, &target.invert(&p0)?)?;
            if e.hol != 0 {
                continue;
            }
            let rhs: IVec = e.trans.iter().map(|x| x * &q).collect();
            if let Some(y) = solve_integer(&sys_int, &rhs) {
                let w = refined.basis().mul_vec(&y);
                let sol = GroupElement {
                    hol: gamma0.hol,
                    trans: ivec_add(&gamma0.trans, &w),
                };
                // all solutions in this piece share their sigma-image;
                // record the single new permutation
                perms.insert(phi.sigma(&sol));
            }
        }
    }
    Ok(Int::from(perms.len()))
}

#[cfg(test)]
pub mod tests {
    use super::*;
    use crate::crystal::tests::half_turn_group;
    use crate::matrix::{ivec, IMat};
    use crate::rational::{int, rat, rat_int};

    /// The 3-valued self-map of the 2-torus with lift factors
    /// `(t1/2, -t2), (t1/2 + 1/2, -t2), (-t1, -t2 + 1/2)`.
    pub fn three_valued_fixture() -> NvMorphism {
        let torus = FlatGroup::torus(2);
        let e1 = SemidirectElement {
            tuple: vec![
                GroupElement::translation(ivec(&[0, 0])),
                GroupElement::translation(ivec(&[1, 0])),
                GroupElement::translation(ivec(&[-1, 0])),
            ],
            perm: Perm::from_images(vec![1, 0, 2]).unwrap(),
        };
        let e2 = SemidirectElement {
            tuple: vec![
                GroupElement::translation(ivec(&[0, -1])),
                GroupElement::translation(ivec(&[0, -1])),
                GroupElement::translation(ivec(&[0, -1])),
            ],
            perm: Perm::identity(3),
        };
        NvMorphism::new(3, torus.clone(), torus, vec![e1, e2], vec![]).unwrap()
    }

    #[test]
    fn semidirect_law_on_fixture_generator() {
        let phi = three_valued_fixture();
        let ops = phi.semidirect();
        let x = &phi.lattice_images[0];
        let sq = ops.multiply(x, x);
        assert_eq!(
            sq.tuple,
            vec![
                GroupElement::translation(ivec(&[1, 0])),
                GroupElement::translation(ivec(&[1, 0])),
                GroupElement::translation(ivec(&[-2, 0])),
            ]
        );
        assert!(sq.perm.is_identity());

        // identity tuple acts as the identity
        let id = ops.identity_elem();
        assert_eq!(ops.multiply(&id, x), *x);
        // permutation parts compose
        let y = &phi.lattice_images[1];
        let xy = ops.multiply(x, y);
        assert_eq!(xy.perm, x.perm.compose(&y.perm));
        // inverses
        let inv = ops.inverse(x);
        assert_eq!(ops.multiply(x, &inv), id);
    }

    #[test]
    fn fixture_verifies_and_corruption_fails() {
        let phi = three_valued_fixture();
        assert!(phi.verify());

        // making the second image non-constant on the sigma-orbit {0, 1}
        // breaks the commutator relator
        let mut broken = phi.clone();
        broken.lattice_images[1].tuple[1] = GroupElement::translation(ivec(&[5, -1]));
        assert!(!broken.verify());

        // a pure swap inside the first image stays a morphism here: the
        // commutator only needs the other tuple constant on sigma-orbits
        let mut swapped = phi.clone();
        swapped.lattice_images[0].tuple.swap(1, 2);
        assert!(swapped.verify());
    }

    #[test]
    fn one_valued_embedding_verifies() {
        let g = half_turn_group();
        let m = SingleMorphism::identity(&g);
        let phi = NvMorphism::from_single(&m);
        assert!(phi.verify());
    }

    #[test]
    fn sigma_analysis_fixture() {
        let phi = three_valued_fixture();
        let sa = sigma_analysis(&phi);
        assert_eq!(sa.image_order, 2);
        let two_z_x_z = Lattice::from_vectors(2, &[ivec(&[2, 0]), ivec(&[0, 1])]);
        assert_eq!(sa.splitting_lattice, two_z_x_z);
        assert_eq!(sa.orbits, vec![vec![0, 1], vec![2]]);
        assert_eq!(sa.branches[0].lattice, two_z_x_z);
        assert_eq!(sa.branches[1].lattice, two_z_x_z);
        assert_eq!(sa.branches[2].lattice, Lattice::standard(2));
        assert_eq!(sa.branches[0].orbit_size, 2);
        assert_eq!(sa.branches[2].orbit_size, 1);
        assert_eq!(sa.branches[0].stab_order, 1);
        assert_eq!(sa.branches[2].stab_order, 2);
    }

    #[test]
    fn sigma_analysis_split_map() {
        // n = 2 with trivial permutation parts: S = Pi, one orbit per index
        let torus = FlatGroup::torus(1);
        let img = SemidirectElement {
            tuple: vec![
                GroupElement::translation(ivec(&[2])),
                GroupElement::translation(ivec(&[3])),
            ],
            perm: Perm::identity(2),
        };
        let phi = NvMorphism::new(2, torus.clone(), torus, vec![img], vec![]).unwrap();
        assert!(phi.verify());
        let sa = sigma_analysis(&phi);
        assert_eq!(sa.image_order, 1);
        assert_eq!(sa.splitting_lattice, Lattice::standard(1));
        assert_eq!(sa.orbits.len(), 2);
    }

    #[test]
    fn sigma_analysis_three_cycle_on_circle() {
        let torus = FlatGroup::torus(1);
        let img = SemidirectElement {
            tuple: vec![
                GroupElement::translation(ivec(&[0])),
                GroupElement::translation(ivec(&[0])),
                GroupElement::translation(ivec(&[1])),
            ],
            perm: Perm::from_images(vec![1, 2, 0]).unwrap(),
        };
        let phi = NvMorphism::new(3, torus.clone(), torus, vec![img], vec![]).unwrap();
        assert!(phi.verify());
        let sa = sigma_analysis(&phi);
        assert_eq!(sa.image_order, 3);
        assert_eq!(sa.orbits, vec![vec![0, 1, 2]]);
        assert_eq!(
            sa.branches[0].lattice,
            Lattice::from_vectors(1, &[ivec(&[3])])
        );
    }

    #[test]
    fn branch_lie_matrices_fixture() {
        let phi = three_valued_fixture();
        let sa = sigma_analysis(&phi);
        let m0 = branch_lie_matrix(&phi, &sa, 0).unwrap();
        let expected0 = QMat::from_rows(vec![
            vec![rat(1, 2), rat_int(0)],
            vec![rat_int(0), rat_int(-1)],
        ]);
        assert_eq!(m0, expected0);
        assert_eq!(branch_lie_matrix(&phi, &sa, 1).unwrap(), expected0);
        let m2 = branch_lie_matrix(&phi, &sa, 2).unwrap();
        let expected2 = QMat::from_rows(vec![
            vec![rat_int(-1), rat_int(0)],
            vec![rat_int(0), rat_int(-1)],
        ]);
        assert_eq!(m2, expected2);
        // refinement invariance
        assert_eq!(
            branch_lie_matrix_with_scale(&phi, &sa, 0, &int(2)).unwrap(),
            expected0
        );
        assert_eq!(
            branch_lie_matrix_with_scale(&phi, &sa, 2, &int(3)).unwrap(),
            expected2
        );
    }

    #[test]
    fn reidemeister_root_classes_fixture() {
        let phi = three_valued_fixture();
        let sa = sigma_analysis(&phi);
        let torus = FlatGroup::torus(2);
        let psi = SingleMorphism::trivial(&torus, &torus);
        // downstairs: one class for the third branch
        let (count, reps, _) = reidemeister_classes_torus(&phi, &psi, &sa, 2).unwrap();
        assert_eq!(count, Count::finite(1));
        assert_eq!(reps, vec![ivec(&[0, 0])]);
        // upstairs over S: two classes
        let (count_up, reps_up, _) = reidemeister_classes_torus_over(
            &phi,
            &psi,
            2,
            &sa.splitting_lattice,
            &sa.s_hol_cosets,
        )
        .unwrap();
        assert_eq!(count_up, Count::finite(2));
        assert_eq!(reps_up, vec![ivec(&[0, 0]), ivec(&[1, 0])]);
    }

    #[test]
    fn single_valued_reduction_classes() {
        // n = 1, psi_* = I, phi_* = 2I: classes = Z^2/(-I)Z^2, a single class
        let f = IMat::from_rows(vec![ivec(&[2, 0]), ivec(&[0, 2])]);
        let phi = NvMorphism::from_single(&SingleMorphism::torus_by_matrix(&f));
        let psi = SingleMorphism::identity(&FlatGroup::torus(2));
        let sa = sigma_analysis(&phi);
        let (count, _, _) = reidemeister_classes_torus(&phi, &psi, &sa, 0).unwrap();
        assert_eq!(count, Count::finite(1));
    }

    #[test]
    fn transport_on_fixture() {
        let phi = three_valued_fixture();
        let torus = FlatGroup::torus(2);
        let psi = SingleMorphism::trivial(&torus, &torus);
        let alpha = GroupElement::translation(ivec(&[0, 0]));
        let gamma = GroupElement::translation(ivec(&[1, 0]));
        // sigma_e1 = (0 1): transport branch 0 to branch 1
        let (a, j) = transport_class(&phi, &psi, &alpha, &gamma, 0).unwrap();
        assert_eq!(j, 1);
        assert_eq!(a, GroupElement::translation(ivec(&[0, 0])));
        // gamma in S transports identically
        let s_elem = GroupElement::translation(ivec(&[2, 0]));
        let (_, j2) = transport_class(&phi, &psi, &alpha, &s_elem, 0).unwrap();
        assert_eq!(j2, 0);
        // double transport by gamma then gamma^{-1} returns
        let gamma_inv = torus.invert(&gamma).unwrap();
        let (a3, j3) = transport_class(&phi, &psi, &a, &gamma_inv, j).unwrap();
        assert_eq!(j3, 0);
        assert_eq!(a3, alpha);
    }

    #[test]
    fn orbit_counts_equal_and_transport_bijects() {
        // 4-valued circle map with sigma a 4-cycle, against the identity:
        // every branch of the orbit has the same class count, and transport
        // maps one transversal bijectively onto the next
        let torus = FlatGroup::torus(1);
        let img = SemidirectElement {
            tuple: vec![
                GroupElement::translation(ivec(&[0])),
                GroupElement::translation(ivec(&[0])),
                GroupElement::translation(ivec(&[0])),
                GroupElement::translation(ivec(&[1])),
            ],
            perm: Perm::from_images(vec![1, 2, 3, 0]).unwrap(),
        };
        let phi = NvMorphism::new(4, torus.clone(), torus.clone(), vec![img], vec![]).unwrap();
        assert!(phi.verify());
        let psi = SingleMorphism::identity(&torus);
        let sa = sigma_analysis(&phi);
        let gamma = GroupElement::translation(ivec(&[1]));
        let counts: Vec<Count> = (0..4)
            .map(|i| reidemeister_classes_torus(&phi, &psi, &sa, i).unwrap().0)
            .collect();
        assert!(counts.iter().all(|c| *c == counts[0]));
        for i in 0..4 {
            // sigma_gamma = 4-cycle sends j to j+1, so i = sigma(j) for j = i-1
            let (_, reps_i, _) = reidemeister_classes_torus(&phi, &psi, &sa, i).unwrap();
            let j = phi.sigma(&gamma).inverse().apply(i);
            let (_, reps_j, lat_j) = reidemeister_classes_torus(&phi, &psi, &sa, j).unwrap();
            let mut transported: Vec<IVec> = reps_i
                .iter()
                .map(|rep| {
                    let alpha = GroupElement::translation(rep.clone());
                    let (moved, jj) = transport_class(&phi, &psi, &alpha, &gamma, i).unwrap();
                    assert_eq!(jj, j);
                    lat_j.canonical_rep(&moved.trans)
                })
                .collect();
            transported.sort();
            assert_eq!(transported, reps_j, "transport bijects the transversals");
        }
    }

    #[test]
    fn fiber_sizes_sum_to_cover_class_count() {
        // Lemma on class fibers, summed: over each downstairs transversal,
        // the fiber sizes add up to the number of upstairs classes
        let phi = three_valued_fixture();
        let sa = sigma_analysis(&phi);
        let torus = FlatGroup::torus(2);
        for psi in [
            SingleMorphism::trivial(&torus, &torus),
            SingleMorphism::identity(&torus),
        ] {
            for orbit in &sa.orbits {
                let i = orbit[0];
                let (_, reps, _) = reidemeister_classes_torus(&phi, &psi, &sa, i).unwrap();
                let (up_count, _, _) = reidemeister_classes_torus_over(
                    &phi,
                    &psi,
                    i,
                    &sa.splitting_lattice,
                    &sa.s_hol_cosets,
                )
                .unwrap();
                let mut fiber_sum = Int::zero();
                for rep in &reps {
                    let alpha = GroupElement::translation(rep.clone());
                    let cf = coin_and_fiber(&phi, &psi, &sa, i, &alpha).unwrap();
                    fiber_sum += cf.fiber_size.expect("finite fiber");
                }
                assert_eq!(Count::Finite(fiber_sum), up_count);
            }
        }
    }

    #[test]
    fn coin_and_fiber_fixture() {
        let phi = three_valued_fixture();
        let sa = sigma_analysis(&phi);
        let torus = FlatGroup::torus(2);
        let psi = SingleMorphism::trivial(&torus, &torus);
        let alpha = torus.identity();
        // third branch, root case: kernel trivial, fiber 2
        let cf = coin_and_fiber(&phi, &psi, &sa, 2, &alpha).unwrap();
        assert_eq!(cf.kernel.rank(), 0);
        assert!(cf.kernel_in_splitting);
        assert_eq!(cf.u_image_size, int(1));
        assert_eq!(cf.fiber_size, Some(int(2)));
        assert!(cf.trivial);
        // first branch: stabilizer equals S, fiber 1
        let cf0 = coin_and_fiber(&phi, &psi, &sa, 0, &alpha).unwrap();
        assert_eq!(cf0.fiber_size, Some(int(1)));
    }

    #[test]
    fn coin_nondegenerate_general() {
        // psi_* - M_i nonsingular: kernel 0, u-image 1, fiber [S_i:S]
        let phi = three_valued_fixture();
        let sa = sigma_analysis(&phi);
        let psi = SingleMorphism::identity(&FlatGroup::torus(2));
        let alpha = phi.target.identity();
        for i in 0..3 {
            let cf = coin_and_fiber(&phi, &psi, &sa, i, &alpha).unwrap();
            assert_eq!(cf.kernel.rank(), 0);
            assert_eq!(cf.u_image_size, int(1));
            assert_eq!(cf.fiber_size, Some(int(sa.branches[i].stab_order as i64)));
        }
    }

    #[test]
    fn degenerate_kernel_not_in_splitting() {
        // third branch linear part diag(0,-1): kernel of -M_3 on Z^2 is
        // Z x 0, which is not inside L_S = 2Z x Z
        let torus = FlatGroup::torus(2);
        let e1 = SemidirectElement {
            tuple: vec![
                GroupElement::translation(ivec(&[0, 0])),
                GroupElement::translation(ivec(&[1, 0])),
                GroupElement::translation(ivec(&[0, 0])),
            ],
            perm: Perm::from_images(vec![1, 0, 2]).unwrap(),
        };
        let e2 = SemidirectElement {
            tuple: vec![
                GroupElement::translation(ivec(&[0, -1])),
                GroupElement::translation(ivec(&[0, -1])),
                GroupElement::translation(ivec(&[0, -1])),
            ],
            perm: Perm::identity(3),
        };
        let phi = NvMorphism::new(3, torus.clone(), torus.clone(), vec![e1, e2], vec![]).unwrap();
        assert!(phi.verify());
        let sa = sigma_analysis(&phi);
        let psi = SingleMorphism::trivial(&torus, &torus);
        let cf = coin_and_fiber(&phi, &psi, &sa, 2, &torus.identity()).unwrap();
        assert_eq!(cf.kernel, Lattice::from_vectors(2, &[ivec(&[1, 0])]));
        assert!(!cf.kernel_in_splitting);
        assert_eq!(cf.u_image_size, int(2));
        assert!(!cf.trivial);
    }
}
