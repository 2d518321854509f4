//! Sublattices of Z^d in canonical Hermite basis form, and the coset /
//! kernel / affine-solvability machinery built on them.
//!
//! A `Lattice` stores a `d x r` basis in canonical column Hermite normal
//! form, so two values are equal exactly when they describe the same
//! subgroup of Z^d.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{ivec_is_zero, IMat, IVec, Mat, QMat, QVec};
use crate::rational::{div_floor, Int, Rat};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Lattice {
    dim: usize,
    basis: IMat,
}

/// Cardinality of a quotient: a natural number or infinity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Count {
    Finite(Int),
    Infinite,
}

impl Count {
    pub fn finite(v: i64) -> Count {
        Count::Finite(Int::from(v))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Count::Finite(_))
    }

    pub fn as_int(&self) -> Option<&Int> {
        match self {
            Count::Finite(v) => Some(v),
            Count::Infinite => None,
        }
    }
}

impl std::fmt::Display for Count {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Count::Finite(v) => write!(f, "{v}"),
            Count::Infinite => write!(f, "inf"),
        }
    }
}

impl Lattice {
    /// The full lattice Z^d.
    pub fn standard(dim: usize) -> Lattice {
        Lattice {
            dim,
            basis: IMat::identity(dim),
        }
    }

    /// The rank-zero lattice {0} in Z^d.
    pub fn zero(dim: usize) -> Lattice {
        Lattice {
            dim,
            basis: IMat::zero(dim, 0),
        }
    }

    /// Lattice spanned by the columns of `gens`, canonicalized.
    pub fn from_generators(gens: &IMat) -> Lattice {
        let dim = gens.rows();
        let (h, _) = gens.hermite_normal_form();
        let nonzero: Vec<usize> = (0..h.cols())
            .filter(|&j| (0..dim).any(|i| !h[(i, j)].is_zero()))
            .collect();
        let basis = Mat::from_fn(dim, nonzero.len(), |i, k| h[(i, nonzero[k])].clone());
        Lattice { dim, basis }
    }

    pub fn from_vectors(dim: usize, vecs: &[IVec]) -> Lattice {
        for v in vecs {
            assert_eq!(v.len(), dim, "generator dimension");
        }
        Lattice::from_generators(&IMat::from_columns(dim, vecs.to_vec()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &IMat {
        &self.basis
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    /// `k * L`.
    pub fn scaled(&self, k: &Int) -> Lattice {
        assert!(!k.is_zero());
        Lattice::from_generators(&self.basis.scale(k))
    }

    /// Pivot row of each basis column. Rows are strictly increasing.
    fn pivot_rows(&self) -> Vec<usize> {
        (0..self.basis.cols())
            .map(|j| {
                (0..self.dim)
                    .find(|&i| !self.basis[(i, j)].is_zero())
                    .expect("zero basis column")
            })
            .collect()
    }

    /// Coordinates of `v` in the basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[Int]) -> Option<IVec> {
        assert_eq!(v.len(), self.dim, "vector dimension");
        let pivots = self.pivot_rows();
        let mut rest = v.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for (j, &r) in pivots.iter().enumerate() {
            let p = &self.basis[(r, j)];
            let (q, rem) = num_integer::Integer::div_rem(&rest[r], p);
            if !rem.is_zero() {
                return None;
            }
            for i in 0..self.dim {
                let t = &rest[i] - &(&q * &self.basis[(i, j)]);
                rest[i] = t;
            }
            coords.push(q);
        }
        if ivec_is_zero(&rest) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, sub: &Lattice) -> bool {
        sub.dim == self.dim && (0..sub.rank()).all(|j| self.contains(&sub.basis.col(j)))
    }

    /// Canonical coset representative of `v` modulo this lattice: reduce at
    /// each pivot row into `[0, pivot)`. Idempotent, constant on cosets.
    pub fn canonical_rep(&self, v: &[Int]) -> IVec {
        assert_eq!(v.len(), self.dim, "vector dimension");
        let pivots = self.pivot_rows();
        let mut rest = v.to_vec();
        for (j, &r) in pivots.iter().enumerate() {
            let p = &self.basis[(r, j)];
            let q = div_floor(&rest[r], p);
            if q.is_zero() {
                continue;
            }
            for i in 0..self.dim {
                let t = &rest[i] - &(&q * &self.basis[(i, j)]);
                rest[i] = t;
            }
        }
        rest
    }
}

/// `|ambient / sub|`; errors when `sub` is not contained in `ambient`.
pub fn lattice_index(ambient: &Lattice, sub: &Lattice) -> Result<Count> {
    if ambient.dim != sub.dim {
        return Err(Error::DimensionMismatch(format!(
            "ambient dim {} vs sub dim {}",
            ambient.dim, sub.dim
        )));
    }
    let mut coord_cols = Vec::with_capacity(sub.rank());
    for j in 0..sub.rank() {
        let col = sub.basis.col(j);
        let coords = ambient
            .coordinates(&col)
            .ok_or_else(|| Error::NotASublattice(format!("basis column {j} not in ambient")))?;
        coord_cols.push(coords);
    }
    if sub.rank() < ambient.rank() {
        return Ok(Count::Infinite);
    }
    let x = IMat::from_columns(ambient.rank(), coord_cols);
    Ok(Count::Finite(x.det().abs()))
}

pub fn lattice_sum(l1: &Lattice, l2: &Lattice) -> Lattice {
    assert_eq!(l1.dim, l2.dim, "ambient dimension");
    Lattice::from_generators(&l1.basis.hcat(&l2.basis))
}

pub fn lattice_intersect(l1: &Lattice, l2: &Lattice) -> Lattice {
    assert_eq!(l1.dim, l2.dim, "ambient dimension");
    if l1.rank() == 0 || l2.rank() == 0 {
        return Lattice::zero(l1.dim);
    }
    // kernel of [B1 | B2]: pairs (x, y) with B1 x = -B2 y, so B1 x runs over the intersection
    let stacked = l1.basis.hcat(&l2.basis);
    let kernel = stacked.integer_kernel();
    let top = Mat::from_fn(l1.rank(), kernel.cols(), |i, j| kernel[(i, j)].clone());
    Lattice::from_generators(&l1.basis.mul(&top))
}

/// Transversal of `ambient / sub`, canonical representatives in sorted order.
pub fn quotient_transversal(ambient: &Lattice, sub: &Lattice) -> Result<Vec<IVec>> {
    let index = lattice_index(ambient, sub)?;
    let Count::Finite(_) = index else {
        return Err(Error::InfiniteIndex);
    };
    let r = ambient.rank();
    // coordinates of sub inside ambient, brought to column HNF: lower
    // triangular with positive diagonal, so mixed-radix enumeration below
    // the diagonal walks each coset exactly once
    let mut coord_cols = Vec::with_capacity(r);
    for j in 0..sub.rank() {
        coord_cols.push(ambient.coordinates(&sub.basis.col(j)).unwrap());
    }
    let x = IMat::from_columns(r, coord_cols);
    let (h, _) = x.hermite_normal_form();
    let radices: Vec<Int> = (0..r).map(|i| h[(i, i)].clone()).collect();
    let mut reps = Vec::new();
    let mut digits = vec![Int::zero(); r];
    loop {
        let ambient_vec = ambient.basis.mul_vec(&digits);
        reps.push(sub.canonical_rep(&ambient_vec));
        // increment mixed-radix counter
        let mut pos = r;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < radices[pos] {
                break;
            }
            digits[pos] = Int::zero();
            if pos == 0 {
                pos = usize::MAX;
                break;
            }
        }
        if pos == usize::MAX || r == 0 {
            break;
        }
    }
    reps.sort();
    reps.dedup();
    Ok(reps)
}

/// `{v in L : M v = 0}` for a rational matrix `M`, in canonical form.
pub fn kernel_lattice(m: &QMat, l: &Lattice) -> Lattice {
    assert_eq!(m.cols(), l.dim, "map domain dimension");
    if l.rank() == 0 {
        return Lattice::zero(l.dim);
    }
    let composed = m.mul(&l.basis.to_rat());
    let (cleared, _) = composed.clear_denominators();
    let kernel = cleared.integer_kernel();
    Lattice::from_generators(&l.basis.mul(&kernel))
}

/// A lattice with rational scale: the set `(1/denom) * lat`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatLattice {
    denom: Int,
    lat: Lattice,
}

impl RatLattice {
    pub fn new(denom: Int, lat: Lattice) -> RatLattice {
        assert!(denom.is_positive());
        // reduce common content so equal sets get equal representations
        let mut g = denom.clone();
        let basis = lat.basis();
        for j in 0..basis.cols() {
            for i in 0..basis.rows() {
                g = num_integer::gcd(g, basis[(i, j)].clone());
            }
        }
        if g.is_one() || g.is_zero() {
            return RatLattice { denom, lat };
        }
        let reduced = Mat::from_fn(basis.rows(), basis.cols(), |i, j| &basis[(i, j)] / &g);
        RatLattice {
            denom: denom / g,
            lat: Lattice::from_generators(&reduced),
        }
    }

    pub fn from_integer(lat: Lattice) -> RatLattice {
        RatLattice {
            denom: Int::one(),
            lat,
        }
    }

    pub fn denom(&self) -> &Int {
        &self.denom
    }

    pub fn numerator_lattice(&self) -> &Lattice {
        &self.lat
    }

    pub fn dim(&self) -> usize {
        self.lat.dim()
    }

    pub fn rank(&self) -> usize {
        self.lat.rank()
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        assert_eq!(v.len(), self.lat.dim());
        let scaled: QVec = v.iter().map(|x| x * crate::rational::rat_of(&self.denom)).collect();
        match crate::matrix::qvec_to_int(&scaled) {
            Some(iv) => self.lat.contains(&iv),
            None => false,
        }
    }

    /// Rational basis columns of the scaled lattice.
    pub fn basis_columns(&self) -> Vec<QVec> {
        let d = crate::rational::rat_of(&self.denom);
        (0..self.lat.rank())
            .map(|j| {
                self.lat
                    .basis()
                    .col(j)
                    .iter()
                    .map(|x| crate::rational::rat_of(x) / d.clone())
                    .collect()
            })
            .collect()
    }
}

/// Decides whether `{x in Q^n : M x + c in Z^m}` is nonempty; returns a
/// witness when it is.
pub fn affine_meets_witness(m: &QMat, c: &[Rat]) -> Option<QVec> {
    assert_eq!(m.rows(), c.len(), "offset dimension");
    // column space of M is cut out by its rational left kernel P;
    // solvability means P z = P c for some integer z
    let (cleared_t, _) = m.transpose().clear_denominators();
    let left_kernel = cleared_t.integer_kernel(); // columns: basis of left kernel
    let p = left_kernel.transpose(); // s x m integer
    let s = p.rows();
    if s == 0 {
        // M surjective over Q: solve M x = -c directly
        return solve_rational(m, &crate::matrix::qvec_neg(c));
    }
    let pc: QVec = p.to_rat().mul_vec(c);
    let mut q = Int::one();
    for x in &pc {
        q = num_integer::lcm(q, x.denom().clone());
    }
    let b = p.scale(&q); // s x m integer
    let u: IVec = pc
        .iter()
        .map(|x| x.numer() * (&q / x.denom()))
        .collect();
    let z = solve_integer(&b, &u)?;
    // M x = z - c has a rational solution by construction
    let rhs: QVec = z
        .iter()
        .zip(c)
        .map(|(zi, ci)| crate::rational::rat_of(zi) - ci)
        .collect();
    solve_rational(m, &rhs)
}

pub fn affine_image_meets_lattice(m: &QMat, c: &[Rat]) -> bool {
    affine_meets_witness(m, c).is_some()
}

/// Full solution set of `M x + c in Z^d` for nonsingular `M`, as the coset
/// `x0 + (1/q) L`.
pub fn affine_solution_coset(m: &QMat, c: &[Rat]) -> Result<(QVec, RatLattice)> {
    assert_eq!(m.rows(), m.cols(), "square system expected");
    assert_eq!(m.rows(), c.len(), "offset dimension");
    let inv = m.inverse()?;
    let x0: QVec = inv.mul_vec(&crate::matrix::qvec_neg(c));
    let (num, q) = inv.clear_denominators();
    let lat = Lattice::from_generators(&num);
    Ok((x0, RatLattice::new(q, lat)))
}

/// One integer solution of `B z = u`, via Smith normal form.
pub fn solve_integer(b: &IMat, u: &[Int]) -> Option<IVec> {
    assert_eq!(b.rows(), u.len());
    let (d, umat, v) = b.smith_normal_form();
    let w = umat.mul_vec(u);
    let n = b.cols();
    let mut y = vec![Int::zero(); n];
    for i in 0..b.rows() {
        let di = if i < n { d[(i, i)].clone() } else { Int::zero() };
        if di.is_zero() {
            if !w[i].is_zero() {
                return None;
            }
        } else {
            let (q, rem) = num_integer::Integer::div_rem(&w[i], &di);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    Some(v.mul_vec(&y))
}

/// One rational solution of `M x = b`, if consistent; free variables are 0.
pub fn solve_rational(m: &QMat, b: &[Rat]) -> Option<QVec> {
    assert_eq!(m.rows(), b.len());
    let rows = m.rows();
    let cols = m.cols();
    let mut a = Mat::from_fn(rows, cols + 1, |i, j| {
        if j < cols {
            m[(i, j)].clone()
        } else {
            b[i].clone()
        }
    });
    let mut pivot_cols = Vec::new();
    let mut rank = 0usize;
    for j in 0..cols {
        let Some(p) = (rank..rows).find(|&i| !a[(i, j)].is_zero()) else {
            continue;
        };
        a.swap_rows(p, rank);
        let pv = a[(rank, j)].clone();
        for jj in 0..=cols {
            a[(rank, jj)] = &a[(rank, jj)] / &pv;
        }
        for i in 0..rows {
            if i == rank || a[(i, j)].is_zero() {
                continue;
            }
            let f = a[(i, j)].clone();
            for jj in 0..=cols {
                let t = &a[(i, jj)] - &(&f * &a[(rank, jj)]);
                a[(i, jj)] = t;
            }
        }
        pivot_cols.push(j);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    for i in rank..rows {
        if !a[(i, cols)].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); cols];
    for (i, &j) in pivot_cols.iter().enumerate() {
        x[j] = a[(i, cols)].clone();
    }
    Some(x)
}

/// `lattice_index` specialised to two full lattices of Z^d given as the
/// standard lattice and a sublattice; panics if not a sublattice.
pub fn index_in_standard(sub: &Lattice) -> Count {
    lattice_index(&Lattice::standard(sub.dim()), sub).expect("sublattice of Z^d")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ivec, ivec_sub, qvec_sub};
    use crate::rational::{int, rat, rat_int};

    fn lat(dim: usize, cols: &[&[i64]]) -> Lattice {
        Lattice::from_vectors(dim, &cols.iter().map(|c| ivec(c)).collect::<Vec<_>>())
    }

    #[test]
    fn index_examples() {
        let ambient = Lattice::standard(2);
        let sub = lat(2, &[&[2, 0], &[0, 1]]);
        assert_eq!(lattice_index(&ambient, &sub).unwrap(), Count::finite(2));
        assert_eq!(
            lattice_index(&ambient, &ambient).unwrap(),
            Count::finite(1)
        );
        let line = lat(2, &[&[2, 0]]);
        assert_eq!(lattice_index(&ambient, &line).unwrap(), Count::Infinite);
        // containment failure
        let not_sub = lat(2, &[&[1, 0], &[0, 1]]);
        assert!(matches!(
            lattice_index(&sub, &not_sub),
            Err(Error::NotASublattice(_))
        ));
    }

    #[test]
    fn index_by_brute_force_coset_enumeration() {
        // span{(1,0),(1,2)} in Z^2: enumerate the subgroup inside (Z/4)^2
        let sub = lat(2, &[&[1, 0], &[1, 2]]);
        let mut seen = std::collections::HashSet::new();
        for a in 0..4i64 {
            for b in 0..4i64 {
                let x = (a + b).rem_euclid(4);
                let y = (2 * b).rem_euclid(4);
                seen.insert((x, y));
            }
        }
        // the span contains 4Z^2, so |(Z/4)^2| / |image| is the true index
        assert_eq!(16 / seen.len(), 2);
        assert_eq!(
            lattice_index(&Lattice::standard(2), &sub).unwrap(),
            Count::finite(2)
        );
    }

    #[test]
    fn sum_and_intersection() {
        let a = lat(2, &[&[2, 0], &[0, 1]]);
        let b = lat(2, &[&[1, 0], &[0, 2]]);
        assert_eq!(lattice_sum(&a, &b), Lattice::standard(2));
        assert_eq!(lattice_intersect(&a, &b), lat(2, &[&[2, 0], &[0, 2]]));
        assert_eq!(lattice_sum(&a, &a), a);
        assert_eq!(lattice_intersect(&a, &a), a);
    }

    #[test]
    fn second_isomorphism_indices() {
        let a = lat(2, &[&[2, 0], &[0, 1]]);
        let b = lat(2, &[&[3, 0], &[0, 2]]);
        let meet = lattice_intersect(&a, &b);
        let join = lattice_sum(&a, &b);
        let lhs = lattice_index(&a, &meet).unwrap();
        let rhs = lattice_index(&join, &b).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn transversal_examples() {
        let ambient = Lattice::standard(2);
        let sub = lat(2, &[&[2, 0], &[0, 1]]);
        let reps = quotient_transversal(&ambient, &sub).unwrap();
        assert_eq!(reps, vec![ivec(&[0, 0]), ivec(&[1, 0])]);

        let trivial = quotient_transversal(&ambient, &ambient).unwrap();
        assert_eq!(trivial, vec![ivec(&[0, 0])]);

        let line = lat(2, &[&[2, 0]]);
        assert!(matches!(
            quotient_transversal(&ambient, &line),
            Err(Error::InfiniteIndex)
        ));
    }

    #[test]
    fn canonical_rep_properties() {
        let sub = lat(2, &[&[2, 0], &[0, 1]]);
        let rep = sub.canonical_rep(&ivec(&[5, 7]));
        assert_eq!(rep, ivec(&[1, 0]));
        // idempotent
        assert_eq!(sub.canonical_rep(&rep), rep);
        // constant on the coset
        for k in [-5i64, -2, 1, 3, 9, 12, 20, -8, 7, 4] {
            let shifted = ivec(&[5 + 2 * k, 7 + k * 3 - k * 3]);
            assert_eq!(sub.canonical_rep(&shifted), rep);
        }
        // differs exactly by lattice membership
        let u = ivec(&[5, 7]);
        let v = ivec(&[3, 7]);
        assert_eq!(sub.canonical_rep(&u), sub.canonical_rep(&v));
        assert!(sub.contains(&ivec_sub(&u, &v)));
    }

    #[test]
    fn kernel_lattice_examples() {
        let l = lat(2, &[&[2, 0], &[0, 1]]);
        let m = QMat::from_rows(vec![
            vec![rat(1, 2), rat_int(0)],
            vec![rat_int(0), rat_int(0)],
        ]);
        // {v in 2Z x Z : v1/2 = 0} = 0 x Z
        assert_eq!(kernel_lattice(&m, &l), lat(2, &[&[0, 1]]));

        let nonsing = QMat::from_rows(vec![
            vec![rat_int(1), rat_int(1)],
            vec![rat_int(0), rat_int(1)],
        ]);
        assert_eq!(kernel_lattice(&nonsing, &l).rank(), 0);

        let zero = QMat::zero(2, 2);
        assert_eq!(kernel_lattice(&zero, &l), l);
    }

    #[test]
    fn affine_meets_examples() {
        let m = QMat::from_rows(vec![vec![rat(1, 2)]]);
        assert!(affine_image_meets_lattice(&m, &[rat_int(0)]));

        let zero = QMat::from_rows(vec![vec![rat_int(0)]]);
        assert!(!affine_image_meets_lattice(&zero, &[rat(1, 2)]));
        assert!(affine_image_meets_lattice(&zero, &[rat_int(3)]));
    }

    #[test]
    fn affine_solution_coset_example() {
        // branch difference from a three-valued torus map: diag(1/2, -1)
        let m = QMat::from_rows(vec![
            vec![rat(1, 2), rat_int(0)],
            vec![rat_int(0), rat_int(-1)],
        ]);
        let (x0, lam) = affine_solution_coset(&m, &[rat_int(0), rat_int(0)]).unwrap();
        assert_eq!(x0, vec![rat_int(0), rat_int(0)]);
        assert_eq!(
            lam,
            RatLattice::from_integer(lat(2, &[&[2, 0], &[0, 1]]))
        );

        let sing = QMat::zero(2, 2);
        assert!(matches!(
            affine_solution_coset(&sing, &[rat_int(0), rat_int(0)]),
            Err(Error::SingularMatrix)
        ));
    }

    #[test]
    fn affine_solution_coset_brute_force_oracle() {
        // every solution on a coarse rational grid lies in the returned coset
        let m = QMat::from_rows(vec![
            vec![rat(1, 2), rat(1, 3)],
            vec![rat_int(0), rat(3, 4)],
        ]);
        let c = vec![rat(1, 6), rat(-1, 2)];
        let (x0, lam) = affine_solution_coset(&m, &c).unwrap();
        // x0 itself solves
        let image = qvec_sub(&m.mul_vec(&x0), &crate::matrix::qvec_neg(&c));
        assert!(crate::matrix::qvec_is_integral(&image));
        for num1 in 0..36i64 {
            for num2 in 0..36i64 {
                let x = vec![rat(num1, 12), rat(num2, 12)];
                let y: Vec<Rat> = m.mul_vec(&x).iter().zip(&c).map(|(a, b)| a + b).collect();
                if crate::matrix::qvec_is_integral(&y) {
                    let diff = qvec_sub(&x, &x0);
                    assert!(lam.contains(&diff), "grid solution outside coset");
                }
            }
        }
    }

    #[test]
    fn index_multiplicativity() {
        let l = Lattice::standard(2);
        let l1 = lat(2, &[&[2, 0], &[1, 1]]);
        let l2 = lat(2, &[&[4, 0], &[2, 2]]);
        let i_l_l1 = lattice_index(&l, &l1).unwrap();
        let i_l1_l2 = lattice_index(&l1, &l2).unwrap();
        let i_l_l2 = lattice_index(&l, &l2).unwrap();
        match (i_l_l1, i_l1_l2, i_l_l2) {
            (Count::Finite(a), Count::Finite(b), Count::Finite(c)) => assert_eq!(a * b, c),
            _ => panic!("expected finite indices"),
        }
    }

    #[test]
    fn scaled_lattice_index() {
        let l = lat(2, &[&[2, 0], &[1, 3]]);
        let doubled = l.scaled(&int(2));
        assert_eq!(lattice_index(&l, &doubled).unwrap(), Count::finite(4));
    }

    #[test]
    fn solve_integer_consistency() {
        let b = IMat::from_rows(vec![ivec(&[2, 4]), ivec(&[0, 3])]);
        let u = ivec(&[6, 3]);
        let z = solve_integer(&b, &u).unwrap();
        assert_eq!(b.mul_vec(&z), u);
        // 2x + 4y = 1 has no integer solution
        assert!(solve_integer(&IMat::from_rows(vec![ivec(&[2, 4])]), &ivec(&[1])).is_none());
    }
}
