//! Exact rational cones and polyhedra.
//!
//! Both descriptions are kept side by side. Conversion goes through the
//! double description method on the homogenization
//! `{(x, t) : <n, x> >= c t, t >= 0}`, with an algebraic adjacency test.
//! Every object is canonicalized (primitive normals, sorted lists, lines and
//! equations in reduced echelon form) so that derived `PartialEq` is set
//! equality.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{dim_check, Error, Result};
use crate::lattice::{primitive, IntMatrix};
use crate::linalg::{rank, rref, solve};
use crate::num::{ceil, floor, gcd_all, lcm_denoms, rat_int, Int, IntVector, Rat, RatVector};

// ---------------------------------------------------------------------------
// double description core

fn normalize_int(v: IntVector) -> IntVector {
    let g = gcd_all(&v.0);
    if g.is_zero() || g.is_one() {
        v
    } else {
        IntVector(v.0.into_iter().map(|x| x / &g).collect())
    }
}

/// `s0 * v - s * pivot`, normalized; `s0 > 0`.
fn eliminate(v: &IntVector, s: &Int, pivot: &IntVector, s0: &Int) -> IntVector {
    normalize_int(v.scale(s0).sub(&pivot.scale(s)))
}

fn adjacent(p: &IntVector, n: &IntVector, processed: &[IntVector], target_rank: usize) -> bool {
    let tight: Vec<Vec<Rat>> = processed
        .iter()
        .filter(|c| c.dot(p).is_zero() && c.dot(n).is_zero())
        .map(|c| c.to_rat().0)
        .collect();
    if tight.len() < target_rank {
        return false;
    }
    let ncols = p.len();
    rank(&tight, ncols) == target_rank
}

/// Generators `(rays, lines)` of `{y : <a, y> >= 0 for a in ineqs, <a, y> = 0 for a in eqs}`.
pub(crate) fn dd_cone(
    dim: usize,
    ineqs: &[IntVector],
    eqs: &[IntVector],
) -> (Vec<IntVector>, Vec<IntVector>) {
    let mut lines: Vec<IntVector> = (0..dim).map(|i| IntVector::unit(dim, i)).collect();
    let mut rays: Vec<IntVector> = Vec::new();
    let mut processed: Vec<IntVector> = Vec::new();
    let constraints = eqs
        .iter()
        .map(|a| (a, true))
        .chain(ineqs.iter().map(|a| (a, false)));
    for (a, is_eq) in constraints {
        debug_assert_eq!(a.len(), dim);
        if a.is_zero() {
            continue;
        }
        if let Some(idx) = lines.iter().position(|l| !a.dot(l).is_zero()) {
            let mut l0 = lines.remove(idx);
            let mut s0 = a.dot(&l0);
            if s0.is_negative() {
                l0 = l0.neg();
                s0 = -s0;
            }
            for l in lines.iter_mut() {
                let s = a.dot(l);
                if !s.is_zero() {
                    *l = eliminate(l, &s, &l0, &s0);
                }
            }
            for r in rays.iter_mut() {
                let s = a.dot(r);
                if !s.is_zero() {
                    *r = eliminate(r, &s, &l0, &s0);
                }
            }
            if !is_eq {
                rays.push(normalize_int(l0));
            }
        } else {
            let vals: Vec<Int> = rays.iter().map(|r| a.dot(r)).collect();
            let mut next: Vec<IntVector> = Vec::new();
            for (r, v) in rays.iter().zip(&vals) {
                if v.is_zero() || (!is_eq && v.is_positive()) {
                    next.push(r.clone());
                }
            }
            if dim >= lines.len() + 2 {
                let target = dim - lines.len() - 2;
                for (p, vp) in rays.iter().zip(&vals).filter(|(_, v)| v.is_positive()) {
                    for (n, vn) in rays.iter().zip(&vals).filter(|(_, v)| v.is_negative()) {
                        if adjacent(p, n, &processed, target) {
                            // vp * n - vn * p, both coefficients positive
                            next.push(normalize_int(n.scale(vp).sub(&p.scale(vn))));
                        }
                    }
                }
            }
            rays = next;
        }
        processed.push(a.clone());
    }
    let mut seen = BTreeSet::new();
    rays.retain(|r| !r.is_zero() && seen.insert(r.clone()));
    (rays, lines)
}

// ---------------------------------------------------------------------------
// canonical forms

fn to_rat_rows(v: &[IntVector]) -> Vec<Vec<Rat>> {
    v.iter().map(|x| x.to_rat().0).collect()
}

/// Reduced echelon basis of a subspace, each row scaled to a primitive integer vector.
fn canonical_subspace(basis: &[IntVector], dim: usize) -> Vec<IntVector> {
    let (m, _) = rref(&to_rat_rows(basis), dim);
    m.into_iter()
        .map(|r| RatVector(r).primitive_multiple())
        .collect()
}

/// Orthogonal projection of `v` onto the complement of `span(basis)`.
fn orth_reduce(v: &[Rat], basis: &[Vec<Rat>]) -> (Vec<Rat>, Vec<Rat>) {
    if basis.is_empty() {
        return (v.to_vec(), vec![]);
    }
    let k = basis.len();
    let dot = |a: &[Rat], b: &[Rat]| a.iter().zip(b).fold(Rat::zero(), |s, (x, y)| s + x * y);
    let gram: Vec<Vec<Rat>> = (0..k)
        .map(|i| (0..k).map(|j| dot(&basis[i], &basis[j])).collect())
        .collect();
    let rhs: Vec<Rat> = basis.iter().map(|b| dot(b, v)).collect();
    let c = solve(&gram, &rhs, k).expect("independent basis");
    let mut out = v.to_vec();
    for (ci, b) in c.iter().zip(basis) {
        for (o, x) in out.iter_mut().zip(b) {
            *o -= ci * x;
        }
    }
    (out, c)
}

// ---------------------------------------------------------------------------
// cones

/// Rational polyhedral cone `cone(rays) + span(lines)`, equivalently
/// `{y : <f, y> >= 0 for f in facets, <q, y> = 0 for q in equations}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatCone {
    dim: usize,
    rays: Vec<IntVector>,
    lines: Vec<IntVector>,
    facets: Vec<IntVector>,
    equations: Vec<IntVector>,
}

impl RatCone {
    pub fn from_generators(dim: usize, rays: &[IntVector], lines: &[IntVector]) -> Result<Self> {
        for v in rays.iter().chain(lines) {
            dim_check(dim, v.len())?;
        }
        let (facets, equations) = dd_cone(dim, rays, lines);
        Ok(Self::from_both(dim, facets, equations))
    }

    pub fn from_inequalities(
        dim: usize,
        facets: &[IntVector],
        equations: &[IntVector],
    ) -> Result<Self> {
        for v in facets.iter().chain(equations) {
            dim_check(dim, v.len())?;
        }
        let (rays, lines) = dd_cone(dim, facets, equations);
        let (f, e) = dd_cone(dim, &rays, &lines);
        Ok(Self::from_both(dim, f, e))
    }

    /// Builds from an irredundant-or-not H description by regenerating both sides.
    fn from_both(dim: usize, facets: Vec<IntVector>, equations: Vec<IntVector>) -> Self {
        let (rays, lines) = dd_cone(dim, &facets, &equations);
        let lines = canonical_subspace(&lines, dim);
        let equations = canonical_subspace(&equations, dim);
        let lr = to_rat_rows(&lines);
        let er = to_rat_rows(&equations);
        let mut rays: Vec<IntVector> = rays
            .iter()
            .map(|r| RatVector(orth_reduce(&r.to_rat().0, &lr).0).primitive_multiple())
            .filter(|r| !r.is_zero())
            .collect();
        let mut facets: Vec<IntVector> = facets
            .iter()
            .map(|f| RatVector(orth_reduce(&f.to_rat().0, &er).0).primitive_multiple())
            .filter(|f| !f.is_zero())
            .collect();
        rays.sort();
        rays.dedup();
        facets.sort();
        facets.dedup();
        // drop redundant facets: those not supporting a face of codimension one
        let cone_dim = dim - equations.len();
        let facets = facets
            .into_iter()
            .filter(|f| {
                let tight: Vec<IntVector> = rays.iter().filter(|r| f.dot(r).is_zero()).cloned().collect();
                let mut gens = tight;
                gens.extend(lines.iter().cloned());
                crate::linalg::rank_int(&gens, dim) + 1 == cone_dim
            })
            .collect();
        RatCone {
            dim,
            rays,
            lines,
            facets,
            equations,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_generators(dim, &[], &[]).expect("dimension is consistent")
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    pub fn lines(&self) -> &[IntVector] {
        &self.lines
    }

    pub fn facets(&self) -> &[IntVector] {
        &self.facets
    }

    pub fn equations(&self) -> &[IntVector] {
        &self.equations
    }

    pub fn dimension(&self) -> usize {
        self.dim - self.equations.len()
    }

    pub fn is_pointed(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn is_full_dim(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.rays.is_empty() && self.lines.is_empty()
    }

    pub fn contains(&self, v: &RatVector) -> bool {
        self.equations.iter().all(|q| q.dot_rat(v).is_zero())
            && self.facets.iter().all(|f| !f.dot_rat(v).is_negative())
    }

    pub fn contains_int(&self, v: &IntVector) -> bool {
        self.contains(&v.to_rat())
    }

    /// Strict interior membership; false for cones that are not full-dimensional.
    pub fn interior_contains(&self, v: &RatVector) -> bool {
        self.is_full_dim() && self.facets.iter().all(|f| f.dot_rat(v).is_positive())
    }

    pub fn relative_interior_contains(&self, v: &RatVector) -> bool {
        self.equations.iter().all(|q| q.dot_rat(v).is_zero())
            && self.facets.iter().all(|f| f.dot_rat(v).is_positive())
    }

    /// Dual cone `{m : <m, v> >= 0 for v in self}`.
    pub fn dual(&self) -> RatCone {
        RatCone {
            dim: self.dim,
            rays: self.facets.clone(),
            lines: self.equations.clone(),
            facets: self.rays.clone(),
            equations: self.lines.clone(),
        }
    }

    pub fn intersect(&self, other: &RatCone) -> Result<RatCone> {
        dim_check(self.dim, other.dim)?;
        let mut f = self.facets.clone();
        f.extend(other.facets.iter().cloned());
        let mut e = self.equations.clone();
        e.extend(other.equations.iter().cloned());
        RatCone::from_inequalities(self.dim, &f, &e)
    }

    /// `self ∩ {<phi, y> >= 0}`.
    pub fn intersect_halfspace(&self, phi: &IntVector) -> Result<RatCone> {
        let mut f = self.facets.clone();
        f.push(phi.clone());
        RatCone::from_inequalities(self.dim, &f, &self.equations)
    }

    /// `self ∩ phi^⊥`.
    pub fn intersect_hyperplane(&self, phi: &IntVector) -> Result<RatCone> {
        let mut e = self.equations.clone();
        e.push(phi.clone());
        RatCone::from_inequalities(self.dim, &self.facets, &e)
    }

    pub fn contains_cone(&self, other: &RatCone) -> bool {
        other.rays.iter().all(|r| self.contains_int(r))
            && other
                .lines
                .iter()
                .all(|l| self.contains_int(l) && self.contains_int(&l.neg()))
    }

    /// Pairs of ray indices spanning a two-dimensional face (pointed cones).
    pub fn two_faces(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let target = self.dim.saturating_sub(2);
        for i in 0..self.rays.len() {
            for j in i + 1..self.rays.len() {
                let mut tight: Vec<IntVector> = self
                    .facets
                    .iter()
                    .filter(|f| f.dot(&self.rays[i]).is_zero() && f.dot(&self.rays[j]).is_zero())
                    .cloned()
                    .collect();
                tight.extend(self.equations.iter().cloned());
                if self.dim >= 2 && crate::linalg::rank_int(&tight, self.dim) == target {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Rays of the smallest face containing `v` (which must lie in the cone).
    pub fn minimal_face_rays(&self, v: &RatVector) -> Vec<usize> {
        let tight: Vec<&IntVector> = self
            .facets
            .iter()
            .filter(|f| f.dot_rat(v).is_zero())
            .collect();
        (0..self.rays.len())
            .filter(|&i| tight.iter().all(|f| f.dot(&self.rays[i]).is_zero()))
            .collect()
    }

    /// The image under a linear map given by an integer matrix.
    pub fn image(&self, m: &IntMatrix) -> Result<RatCone> {
        dim_check(self.dim, m.ncols())?;
        let rays: Vec<IntVector> = self
            .rays
            .iter()
            .map(|r| m.mul_vec(r))
            .filter(|r| !r.is_zero())
            .map(|r| primitive(&r).expect("nonzero"))
            .collect();
        let lines: Vec<IntVector> = self.lines.iter().map(|l| m.mul_vec(l)).collect();
        RatCone::from_generators(m.nrows(), &rays, &lines)
    }

    /// The preimage `{y : m y ∈ self}`.
    pub fn preimage(&self, m: &IntMatrix) -> Result<RatCone> {
        dim_check(self.dim, m.nrows())?;
        let f: Vec<IntVector> = self.facets.iter().map(|f| m.vec_mul(f)).collect();
        let e: Vec<IntVector> = self.equations.iter().map(|q| m.vec_mul(q)).collect();
        RatCone::from_inequalities(m.ncols(), &f, &e)
    }

    /// Sum of the rays (an interior point of the cone's relative interior
    /// when the cone is pointed).
    pub fn ray_sum(&self) -> IntVector {
        self.rays
            .iter()
            .fold(IntVector::zeros(self.dim), |s, r| s.add(r))
    }
}

// ---------------------------------------------------------------------------
// polyhedra

/// The halfspace `<normal, x> >= offset` (or the hyperplane when used as an equation).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace {
    pub normal: IntVector,
    pub offset: Rat,
}

impl Halfspace {
    pub fn new(normal: IntVector, offset: Rat) -> Self {
        Halfspace { normal, offset }
    }

    /// From a rational normal, rescaled positively to a primitive integer normal.
    pub fn from_rational(normal: &RatVector, offset: &Rat) -> Self {
        let l = lcm_denoms(&normal.0);
        let scaled = normal.scale(&rat_int(&l));
        let n = scaled.to_int().expect("denominators cleared");
        let g = gcd_all(&n.0);
        if g.is_zero() {
            return Halfspace::new(n, offset.clone());
        }
        let factor = rat_int(&l) / rat_int(&g);
        Halfspace::new(
            IntVector(n.0.iter().map(|x| x / &g).collect()),
            offset * factor,
        )
    }

    pub fn value(&self, x: &RatVector) -> Rat {
        self.normal.dot_rat(x)
    }

    pub fn satisfied(&self, x: &RatVector) -> bool {
        self.value(x) >= self.offset
    }

    fn homogenized(&self) -> IntVector {
        // <n, x> - c t >= 0, cleared of the denominator of c
        let d = self.offset.denom().clone();
        let mut v: Vec<Int> = self.normal.0.iter().map(|x| x * &d).collect();
        v.push(-self.offset.numer().clone());
        normalize_int(IntVector(v))
    }
}

/// Exact rational polyhedron `conv(vertices) + cone(rays) + span(lines)`,
/// stored together with its irredundant H-representation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatPolyhedron {
    dim: usize,
    vertices: Vec<RatVector>,
    rays: Vec<IntVector>,
    lines: Vec<IntVector>,
    ineqs: Vec<Halfspace>,
    eqs: Vec<Halfspace>,
}

fn homogenize_point(v: &RatVector) -> IntVector {
    let l = lcm_denoms(&v.0);
    let mut out: Vec<Int> = v.0.iter().map(|x| (x * rat_int(&l)).to_integer()).collect();
    out.push(l);
    normalize_int(IntVector(out))
}

fn extend_zero(v: &IntVector) -> IntVector {
    let mut out = v.0.clone();
    out.push(Int::zero());
    IntVector(out)
}

fn split_last(v: &IntVector) -> (IntVector, Int) {
    let mut c = v.0.clone();
    let t = c.pop().expect("homogeneous vector");
    (IntVector(c), t)
}

impl RatPolyhedron {
    pub fn empty(dim: usize) -> Self {
        RatPolyhedron {
            dim,
            vertices: vec![],
            rays: vec![],
            lines: vec![],
            ineqs: vec![Halfspace::new(IntVector::zeros(dim), Rat::one())],
            eqs: vec![],
        }
    }

    pub fn from_vrep(
        dim: usize,
        vertices: &[RatVector],
        rays: &[IntVector],
        lines: &[IntVector],
    ) -> Result<Self> {
        for v in vertices {
            dim_check(dim, v.len())?;
        }
        for r in rays.iter().chain(lines) {
            dim_check(dim, r.len())?;
        }
        if vertices.is_empty() {
            return Ok(Self::empty(dim));
        }
        let (ineqs, eqs) = Self::vrep_to_hrep(dim, vertices, rays, lines);
        Ok(Self::from_hrep_unchecked(dim, &ineqs, &eqs))
    }

    pub fn from_hrep(dim: usize, ineqs: &[Halfspace], eqs: &[Halfspace]) -> Result<Self> {
        for h in ineqs.iter().chain(eqs) {
            dim_check(dim, h.normal.len())?;
        }
        Ok(Self::from_hrep_unchecked(dim, ineqs, eqs))
    }

    fn from_hrep_unchecked(dim: usize, ineqs: &[Halfspace], eqs: &[Halfspace]) -> Self {
        let (vertices, rays, lines) = Self::hrep_to_vrep(dim, ineqs, eqs);
        if vertices.is_empty() {
            return Self::empty(dim);
        }
        let (ineqs, eqs) = Self::vrep_to_hrep(dim, &vertices, &rays, &lines);
        Self::canonical(dim, vertices, rays, lines, ineqs, eqs)
    }

    fn hrep_to_vrep(
        dim: usize,
        ineqs: &[Halfspace],
        eqs: &[Halfspace],
    ) -> (Vec<RatVector>, Vec<IntVector>, Vec<IntVector>) {
        let mut hi: Vec<IntVector> = ineqs.iter().map(|h| h.homogenized()).collect();
        hi.push(IntVector::unit(dim + 1, dim));
        let he: Vec<IntVector> = eqs.iter().map(|h| h.homogenized()).collect();
        let (gens, lines) = dd_cone(dim + 1, &hi, &he);
        let mut vertices = Vec::new();
        let mut rays = Vec::new();
        for g in gens {
            let (x, t) = split_last(&g);
            if t.is_zero() {
                rays.push(x);
            } else {
                let tr = rat_int(&t);
                vertices.push(RatVector(x.0.iter().map(|c| rat_int(c) / &tr).collect()));
            }
        }
        let lines = lines.iter().map(|l| split_last(l).0).collect();
        (vertices, rays, lines)
    }

    fn vrep_to_hrep(
        dim: usize,
        vertices: &[RatVector],
        rays: &[IntVector],
        lines: &[IntVector],
    ) -> (Vec<Halfspace>, Vec<Halfspace>) {
        let mut gens: Vec<IntVector> = vertices.iter().map(homogenize_point).collect();
        gens.extend(rays.iter().map(extend_zero));
        let hl: Vec<IntVector> = lines.iter().map(extend_zero).collect();
        let (dual_rays, dual_lines) = dd_cone(dim + 1, &gens, &hl);
        let to_half = |g: &IntVector| {
            let (a, s) = split_last(g);
            (a, rat_int(&-s))
        };
        let ineqs = dual_rays
            .iter()
            .map(to_half)
            .filter(|(a, _)| !a.is_zero())
            .map(|(a, c)| Halfspace::from_rational(&a.to_rat(), &c))
            .collect();
        let eqs = dual_lines
            .iter()
            .map(to_half)
            .filter(|(a, _)| !a.is_zero())
            .map(|(a, c)| Halfspace::from_rational(&a.to_rat(), &c))
            .collect();
        (ineqs, eqs)
    }

    fn canonical(
        dim: usize,
        vertices: Vec<RatVector>,
        rays: Vec<IntVector>,
        lines: Vec<IntVector>,
        ineqs: Vec<Halfspace>,
        eqs: Vec<Halfspace>,
    ) -> Self {
        let lines = canonical_subspace(&lines, dim);
        let lr = to_rat_rows(&lines);
        let mut vertices: Vec<RatVector> = vertices
            .iter()
            .map(|v| RatVector(orth_reduce(&v.0, &lr).0))
            .collect();
        vertices.sort();
        vertices.dedup();
        let mut rays: Vec<IntVector> = rays
            .iter()
            .map(|r| RatVector(orth_reduce(&r.to_rat().0, &lr).0).primitive_multiple())
            .filter(|r| !r.is_zero())
            .collect();
        rays.sort();
        rays.dedup();

        // equations: echelon form of the augmented system [n | c]
        let aug: Vec<Vec<Rat>> = eqs
            .iter()
            .map(|h| {
                let mut r = h.normal.to_rat().0;
                r.push(h.offset.clone());
                r
            })
            .collect();
        let (ech, _) = rref(&aug, dim + 1);
        let eqs: Vec<Halfspace> = ech
            .iter()
            .map(|r| Halfspace::from_rational(&RatVector(r[..dim].to_vec()), &r[dim]))
            .collect();
        let er: Vec<Vec<Rat>> = eqs.iter().map(|h| h.normal.to_rat().0).collect();
        let mut ineqs: Vec<Halfspace> = ineqs
            .iter()
            .map(|h| {
                let (n, c) = orth_reduce(&h.normal.to_rat().0, &er);
                let off = c
                    .iter()
                    .zip(&eqs)
                    .fold(h.offset.clone(), |o, (ci, e)| o - ci * &e.offset);
                Halfspace::from_rational(&RatVector(n), &off)
            })
            .filter(|h| !h.normal.is_zero())
            .collect();
        ineqs.sort();
        ineqs.dedup();
        RatPolyhedron {
            dim,
            vertices,
            rays,
            lines,
            ineqs,
            eqs,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[RatVector] {
        &self.vertices
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    pub fn lines(&self) -> &[IntVector] {
        &self.lines
    }

    pub fn inequalities(&self) -> &[Halfspace] {
        &self.ineqs
    }

    pub fn equations(&self) -> &[Halfspace] {
        &self.eqs
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_compact(&self) -> bool {
        self.rays.is_empty() && self.lines.is_empty()
    }

    pub fn is_full_dim(&self) -> bool {
        !self.is_empty() && self.eqs.is_empty()
    }

    pub fn affine_dim(&self) -> Option<usize> {
        (!self.is_empty()).then(|| self.dim - self.eqs.len())
    }

    pub fn contains(&self, x: &RatVector) -> bool {
        !self.is_empty()
            && self.eqs.iter().all(|h| h.value(x) == h.offset)
            && self.ineqs.iter().all(|h| h.satisfied(x))
    }

    pub fn contains_origin(&self) -> bool {
        self.contains(&RatVector::zeros(self.dim))
    }

    /// True iff every inequality is strict at `x`; the polyhedron must be
    /// full-dimensional.
    pub fn strict_interior_contains(&self, x: &RatVector) -> Result<bool> {
        dim_check(self.dim, x.len())?;
        if !self.is_full_dim() {
            return Err(Error::NotFullDimensional);
        }
        Ok(self.ineqs.iter().all(|h| h.value(x) > h.offset))
    }

    /// `min <c, x>` over the polyhedron; `None` when unbounded below.
    /// Panics on the empty polyhedron.
    pub fn min_value(&self, c: &RatVector) -> Option<Rat> {
        assert!(!self.is_empty(), "linear program over an empty polyhedron");
        if self.lines.iter().any(|l| !l.dot_rat(c).is_zero())
            || self.rays.iter().any(|r| r.dot_rat(c).is_negative())
        {
            return None;
        }
        self.vertices.iter().map(|v| v.dot(c)).min()
    }

    /// `max <c, x>`; `None` when unbounded above.
    pub fn max_value(&self, c: &RatVector) -> Option<Rat> {
        self.min_value(&c.neg()).map(|v| -v)
    }

    pub fn minkowski_sum(&self, other: &RatPolyhedron) -> Result<RatPolyhedron> {
        dim_check(self.dim, other.dim)?;
        if self.is_empty() || other.is_empty() {
            return Ok(Self::empty(self.dim));
        }
        let mut verts = Vec::new();
        for a in &self.vertices {
            for b in &other.vertices {
                verts.push(a.add(b));
            }
        }
        let mut rays = self.rays.clone();
        rays.extend(other.rays.iter().cloned());
        let mut lines = self.lines.clone();
        lines.extend(other.lines.iter().cloned());
        Self::from_vrep(self.dim, &verts, &rays, &lines)
    }

    /// `t * P` for `t >= 0` (`0 * P` is the origin plus the recession cone).
    pub fn scale(&self, t: &Rat) -> RatPolyhedron {
        assert!(!t.is_negative(), "negative scaling");
        if self.is_empty() {
            return self.clone();
        }
        let verts: Vec<RatVector> = if t.is_zero() {
            vec![RatVector::zeros(self.dim)]
        } else {
            self.vertices.iter().map(|v| v.scale(t)).collect()
        };
        Self::from_vrep(self.dim, &verts, &self.rays, &self.lines).expect("same dimension")
    }

    pub fn translate(&self, v: &RatVector) -> RatPolyhedron {
        let verts: Vec<RatVector> = self.vertices.iter().map(|x| x.add(v)).collect();
        if verts.is_empty() {
            return self.clone();
        }
        Self::from_vrep(self.dim, &verts, &self.rays, &self.lines).expect("same dimension")
    }

    pub fn intersect(&self, other: &RatPolyhedron) -> Result<RatPolyhedron> {
        dim_check(self.dim, other.dim)?;
        let mut i = self.ineqs.clone();
        i.extend(other.ineqs.iter().cloned());
        let mut e = self.eqs.clone();
        e.extend(other.eqs.iter().cloned());
        Self::from_hrep(self.dim, &i, &e)
    }

    /// Image under `x ↦ m x`.
    pub fn image(&self, m: &IntMatrix) -> Result<RatPolyhedron> {
        dim_check(self.dim, m.ncols())?;
        let k = m.nrows();
        if self.is_empty() {
            return Ok(Self::empty(k));
        }
        let apply = |v: &RatVector| {
            RatVector(
                (0..k)
                    .map(|i| m.row(i).dot_rat(v))
                    .collect(),
            )
        };
        let verts: Vec<RatVector> = self.vertices.iter().map(apply).collect();
        let rays: Vec<IntVector> = self.rays.iter().map(|r| m.mul_vec(r)).collect();
        let lines: Vec<IntVector> = self.lines.iter().map(|l| m.mul_vec(l)).collect();
        Self::from_vrep(k, &verts, &rays, &lines)
    }

    /// Preimage `{y : m y ∈ P}`.
    pub fn preimage(&self, m: &IntMatrix) -> Result<RatPolyhedron> {
        dim_check(self.dim, m.nrows())?;
        if self.is_empty() {
            return Ok(Self::empty(m.ncols()));
        }
        let pull = |h: &Halfspace| Halfspace::new(m.vec_mul(&h.normal), h.offset.clone());
        let i: Vec<Halfspace> = self.ineqs.iter().map(pull).collect();
        let e: Vec<Halfspace> = self.eqs.iter().map(pull).collect();
        Self::from_hrep(m.ncols(), &i, &e)
    }

    /// `{y : <x, y> >= -1 for all x in P}`; needs `0 ∈ P`.
    pub fn polar_dual(&self) -> Result<RatPolyhedron> {
        if !self.contains_origin() {
            return Err(Error::OriginNotContained);
        }
        let minus_one = -Rat::one();
        let mut ineqs: Vec<Halfspace> = self
            .vertices
            .iter()
            .filter(|v| !v.is_zero())
            .map(|v| Halfspace::from_rational(v, &minus_one))
            .collect();
        ineqs.extend(self.rays.iter().map(|r| Halfspace::new(r.clone(), Rat::zero())));
        let eqs: Vec<Halfspace> = self
            .lines
            .iter()
            .map(|l| Halfspace::new(l.clone(), Rat::zero()))
            .collect();
        Self::from_hrep(self.dim, &ineqs, &eqs)
    }

    pub fn recession_cone(&self) -> RatCone {
        RatCone::from_generators(self.dim, &self.rays, &self.lines).expect("same dimension")
    }

    /// `cone(P) = ∪_{t>0} tP` for a polyhedron containing the origin.
    pub fn conic_hull(&self) -> RatCone {
        let mut rays: Vec<IntVector> = self
            .vertices
            .iter()
            .filter(|v| !v.is_zero())
            .map(|v| v.primitive_multiple())
            .collect();
        rays.extend(self.rays.iter().cloned());
        RatCone::from_generators(self.dim, &rays, &self.lines).expect("same dimension")
    }

    /// Minkowski gauge `inf{t > 0 : x ∈ tP}`; `None` encodes `+∞`.
    pub fn gauge(&self, x: &RatVector) -> Result<Option<Rat>> {
        dim_check(self.dim, x.len())?;
        if !self.is_compact() {
            return Err(Error::Unbounded);
        }
        if !self.contains_origin() {
            return Err(Error::OriginNotContained);
        }
        if self.eqs.iter().any(|h| !h.value(x).is_zero()) {
            return Ok(None);
        }
        let mut t = Rat::zero();
        for h in &self.ineqs {
            let v = h.value(x);
            if h.offset.is_zero() {
                if v.is_negative() {
                    return Ok(None);
                }
            } else {
                // offset < 0 since 0 ∈ P
                let need = v / &h.offset;
                if need > t {
                    t = need;
                }
            }
        }
        Ok(Some(t))
    }

    /// Exact image interval of a functional.
    pub fn interval_image(&self, phi: &IntVector) -> Result<Interval> {
        dim_check(self.dim, phi.len())?;
        let c = phi.to_rat();
        let lo = self.min_value(&c);
        let hi = self.max_value(&c);
        Ok(Interval::new(lo, hi))
    }

    /// Integer points of a compact polyhedron in lexicographic order.
    pub fn lattice_points(&self) -> Result<Vec<IntVector>> {
        if !self.is_compact() {
            return Err(Error::Unbounded);
        }
        if self.is_empty() {
            return Ok(vec![]);
        }
        let lo: Vec<Int> = (0..self.dim)
            .map(|i| self.vertices.iter().map(|v| ceil(&v[i])).min().expect("nonempty"))
            .collect();
        let hi: Vec<Int> = (0..self.dim)
            .map(|i| self.vertices.iter().map(|v| floor(&v[i])).max().expect("nonempty"))
            .collect();
        let mut out = Vec::new();
        let mut cur = IntVector::zeros(self.dim);
        if self.dim == 0 {
            return Ok(vec![cur]);
        }
        self.scan(0, &lo, &hi, &mut cur, &mut out);
        Ok(out)
    }

    /// Integer range of the last coordinate with the others fixed by `cur`.
    fn last_coordinate_range(&self, cur: &IntVector, lo: &Int, hi: &Int) -> Option<(Int, Int)> {
        let last = self.dim - 1;
        let (mut a, mut b) = (lo.clone(), hi.clone());
        let partial = |n: &IntVector| -> Rat {
            (0..last).fold(Rat::zero(), |s, j| s + Rat::from_integer(&n[j] * &cur[j]))
        };
        for h in &self.eqs {
            let rest = &h.offset - partial(&h.normal);
            let c = &h.normal[last];
            if c.is_zero() {
                if !rest.is_zero() {
                    return None;
                }
            } else {
                let x = rest / Rat::from_integer(c.clone());
                if !x.is_integer() {
                    return None;
                }
                let x = x.to_integer();
                a = a.max(x.clone());
                b = b.min(x);
            }
        }
        for h in &self.ineqs {
            // c x ≥ rest
            let rest = &h.offset - partial(&h.normal);
            let c = &h.normal[last];
            if c.is_zero() {
                if rest.is_positive() {
                    return None;
                }
            } else if c.is_positive() {
                a = a.max(ceil(&(rest / Rat::from_integer(c.clone()))));
            } else {
                b = b.min(floor(&(rest / Rat::from_integer(c.clone()))));
            }
        }
        (a <= b).then_some((a, b))
    }

    fn scan(&self, i: usize, lo: &[Int], hi: &[Int], cur: &mut IntVector, out: &mut Vec<IntVector>) {
        if i + 1 == self.dim {
            if let Some((a, b)) = self.last_coordinate_range(cur, &lo[i], &hi[i]) {
                let mut x = a;
                while x <= b {
                    cur.0[i] = x.clone();
                    out.push(cur.clone());
                    x += 1;
                }
            }
            return;
        }
        let mut x = lo[i].clone();
        while x <= hi[i] {
            cur.0[i] = x.clone();
            self.scan(i + 1, lo, hi, cur, out);
            x += 1;
        }
    }
}

/// Where the origin sits relative to an interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OriginPosition {
    Interior,
    Boundary,
    Outside,
}

/// A closed interval with possibly infinite ends (`None`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Option<Rat>,
    pub hi: Option<Rat>,
    pub origin: OriginPosition,
}

impl Interval {
    pub fn new(lo: Option<Rat>, hi: Option<Rat>) -> Self {
        let zero = Rat::zero();
        let below = lo.as_ref().map_or(true, |l| l < &zero);
        let above = hi.as_ref().map_or(true, |h| h > &zero);
        let touches = lo.as_ref() == Some(&zero) || hi.as_ref() == Some(&zero);
        let origin = if below && above {
            OriginPosition::Interior
        } else if touches {
            OriginPosition::Boundary
        } else {
            OriginPosition::Outside
        };
        Interval { lo, hi, origin }
    }

    pub fn length(&self) -> Option<Rat> {
        match (&self.lo, &self.hi) {
            (Some(l), Some(h)) => Some(h - l),
            _ => None,
        }
    }
}

/// A finite nonempty set of points in `M_Q` without duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SupportSet {
    points: Vec<RatVector>,
}

impl SupportSet {
    pub fn new(mut points: Vec<RatVector>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidPair("support set must be nonempty".into()));
        };
        let d = first.len();
        for p in &points {
            dim_check(d, p.len())?;
        }
        points.sort();
        points.dedup();
        Ok(SupportSet { points })
    }

    pub fn origin(dim: usize) -> Self {
        SupportSet {
            points: vec![RatVector::zeros(dim)],
        }
    }

    pub fn points(&self) -> &[RatVector] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// `h_A(e) = min_{a ∈ A} <a, e>`.
    pub fn support_value(&self, e: &RatVector) -> Result<Rat> {
        dim_check(self.dim(), e.len())?;
        Ok(self.points.iter().map(|a| a.dot(e)).min().expect("nonempty"))
    }

    pub fn support_value_int(&self, e: &IntVector) -> Result<Rat> {
        self.support_value(&e.to_rat())
    }

    pub fn minkowski_sum(&self, other: &SupportSet) -> Result<SupportSet> {
        dim_check(self.dim(), other.dim())?;
        let mut pts = Vec::with_capacity(self.points.len() * other.points.len());
        for a in &self.points {
            for b in &other.points {
                pts.push(a.add(b));
            }
        }
        SupportSet::new(pts)
    }

    pub fn scale(&self, t: &Rat) -> SupportSet {
        SupportSet::new(self.points.iter().map(|p| p.scale(t)).collect()).expect("nonempty")
    }

    pub fn translate(&self, v: &RatVector) -> SupportSet {
        SupportSet::new(self.points.iter().map(|p| p.add(v)).collect()).expect("nonempty")
    }

    /// Image under the restriction map `m ↦ m ∘ k` (k given by columns in the ambient lattice).
    pub fn restrict(&self, basis: &[IntVector]) -> SupportSet {
        SupportSet::new(
            self.points
                .iter()
                .map(|p| RatVector(basis.iter().map(|b| b.dot_rat(p)).collect()))
                .collect(),
        )
        .expect("nonempty")
    }

    pub fn convex_hull(&self) -> RatPolyhedron {
        RatPolyhedron::from_vrep(self.dim(), &self.points, &[], &[]).expect("consistent dims")
    }

    pub fn is_integral(&self) -> bool {
        self.points.iter().all(|p| p.to_int().is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    fn simplex2() -> RatPolyhedron {
        RatPolyhedron::from_vrep(
            2,
            &[
                RatVector::from_i64(&[0, 0]),
                RatVector::from_i64(&[1, 0]),
                RatVector::from_i64(&[0, 1]),
            ],
            &[],
            &[],
        )
        .unwrap()
    }

    #[test]
    fn dd_positive_quadrant() {
        let (rays, lines) = dd_cone(
            2,
            &[IntVector::from_i64(&[1, 0]), IntVector::from_i64(&[0, 1])],
            &[],
        );
        assert!(lines.is_empty());
        let set: BTreeSet<_> = rays.into_iter().collect();
        assert_eq!(
            set,
            [IntVector::from_i64(&[1, 0]), IntVector::from_i64(&[0, 1])]
                .into_iter()
                .collect()
        );
    }

    #[test]
    fn square_dual_is_cross_polytope() {
        let sq = RatPolyhedron::from_vrep(
            2,
            &[
                RatVector::from_i64(&[1, 1]),
                RatVector::from_i64(&[1, -1]),
                RatVector::from_i64(&[-1, 1]),
                RatVector::from_i64(&[-1, -1]),
            ],
            &[],
            &[],
        )
        .unwrap();
        let cross = RatPolyhedron::from_vrep(
            2,
            &[
                RatVector::from_i64(&[1, 0]),
                RatVector::from_i64(&[-1, 0]),
                RatVector::from_i64(&[0, 1]),
                RatVector::from_i64(&[0, -1]),
            ],
            &[],
            &[],
        )
        .unwrap();
        assert_eq!(sq.polar_dual().unwrap(), cross);
        assert_eq!(cross.polar_dual().unwrap(), sq);
    }

    #[test]
    fn shifted_orthant_dual() {
        let bx = RatPolyhedron::from_vrep(
            2,
            &[RatVector::from_i64(&[-1, -1])],
            &[IntVector::from_i64(&[1, 0]), IntVector::from_i64(&[0, 1])],
            &[],
        )
        .unwrap();
        assert_eq!(bx.polar_dual().unwrap(), simplex2());
    }

    #[test]
    fn half_line_dual_is_segment() {
        let a = rat(2, 3);
        let p = RatPolyhedron::from_vrep(1, &[RatVector(vec![-a.clone()])], &[IntVector::from_i64(&[1])], &[])
            .unwrap();
        let u = p.polar_dual().unwrap();
        assert!(u.is_compact());
        assert_eq!(
            u.vertices(),
            &[RatVector(vec![rat(0, 1)]), RatVector(vec![rat(3, 2)])]
        );
    }

    #[test]
    fn polar_needs_origin() {
        let p = RatPolyhedron::from_vrep(1, &[RatVector::from_i64(&[1]), RatVector::from_i64(&[2])], &[], &[])
            .unwrap();
        assert_eq!(p.polar_dual(), Err(Error::OriginNotContained));
    }

    #[test]
    fn roundtrip_square_and_orthant() {
        let sq = RatPolyhedron::from_hrep(
            2,
            &[
                Halfspace::new(IntVector::from_i64(&[1, 0]), rat(0, 1)),
                Halfspace::new(IntVector::from_i64(&[0, 1]), rat(0, 1)),
                Halfspace::new(IntVector::from_i64(&[-1, 0]), rat(-1, 1)),
                Halfspace::new(IntVector::from_i64(&[0, -1]), rat(-1, 1)),
            ],
            &[],
        )
        .unwrap();
        assert_eq!(sq.vertices().len(), 4);
        let again = RatPolyhedron::from_vrep(2, sq.vertices(), sq.rays(), sq.lines()).unwrap();
        assert_eq!(again, sq);

        let orthant = RatPolyhedron::from_vrep(
            2,
            &[RatVector::zeros(2)],
            &[IntVector::from_i64(&[1, 0]), IntVector::from_i64(&[0, 1])],
            &[],
        )
        .unwrap();
        let again = RatPolyhedron::from_hrep(2, orthant.inequalities(), orthant.equations()).unwrap();
        assert_eq!(again, orthant);
    }

    #[test]
    fn gauge_examples() {
        let s = simplex2();
        assert_eq!(s.gauge(&RatVector::from_i64(&[1, 1])).unwrap(), Some(rat(2, 1)));
        assert_eq!(s.gauge(&RatVector::from_i64(&[1, 0])).unwrap(), Some(rat(1, 1)));
        assert_eq!(s.gauge(&RatVector::from_i64(&[-1, 0])).unwrap(), None);
        let orthant = RatPolyhedron::from_vrep(2, &[RatVector::zeros(2)], &[IntVector::from_i64(&[1, 0])], &[])
            .unwrap();
        assert_eq!(orthant.gauge(&RatVector::from_i64(&[1, 0])), Err(Error::Unbounded));
    }

    #[test]
    fn interval_examples() {
        let u = RatPolyhedron::from_vrep(
            2,
            &[
                RatVector::from_i64(&[0, 0]),
                RatVector::from_i64(&[1, -1]),
                RatVector::from_i64(&[0, 1]),
                RatVector::from_i64(&[-1, 1]),
            ],
            &[],
            &[],
        )
        .unwrap();
        let i = u.interval_image(&IntVector::from_i64(&[1, 1])).unwrap();
        assert_eq!((i.lo.clone(), i.hi.clone()), (Some(rat(0, 1)), Some(rat(1, 1))));
        assert_eq!(i.origin, OriginPosition::Boundary);
        let i = u.interval_image(&IntVector::from_i64(&[1, 0])).unwrap();
        assert_eq!((i.lo.clone(), i.hi.clone()), (Some(rat(-1, 1)), Some(rat(1, 1))));
        assert_eq!(i.origin, OriginPosition::Interior);
        let i = u.interval_image(&IntVector::from_i64(&[0, 0])).unwrap();
        assert_eq!((i.lo, i.hi), (Some(rat(0, 1)), Some(rat(0, 1))));
    }

    #[test]
    fn lattice_point_examples() {
        let s = simplex2();
        assert_eq!(
            s.lattice_points().unwrap(),
            vec![
                IntVector::from_i64(&[0, 0]),
                IntVector::from_i64(&[0, 1]),
                IntVector::from_i64(&[1, 0])
            ]
        );
        assert_eq!(s.scale(&rat(2, 1)).lattice_points().unwrap().len(), 6);
        assert!(RatPolyhedron::empty(2).lattice_points().unwrap().is_empty());
    }

    #[test]
    fn strict_interior_examples() {
        let s = simplex2();
        assert!(s.strict_interior_contains(&RatVector::from_ratios(&[(1, 3), (1, 3)])).unwrap());
        assert!(!s.strict_interior_contains(&RatVector::from_i64(&[1, 0])).unwrap());
        assert!(!s.strict_interior_contains(&RatVector::zeros(2)).unwrap());
        let seg = RatPolyhedron::from_vrep(2, &[RatVector::zeros(2), RatVector::from_i64(&[1, 0])], &[], &[])
            .unwrap();
        assert_eq!(
            seg.strict_interior_contains(&RatVector::zeros(2)),
            Err(Error::NotFullDimensional)
        );
    }

    #[test]
    fn support_values() {
        let a = SupportSet::new(vec![RatVector::from_i64(&[1, 0]), RatVector::from_i64(&[0, 1])]).unwrap();
        assert_eq!(a.support_value(&RatVector::from_i64(&[2, 3])).unwrap(), rat(2, 1));
        let single = SupportSet::new(vec![RatVector::from_ratios(&[(1, 2), (-3, 1)])]).unwrap();
        let e = RatVector::from_i64(&[4, 1]);
        assert_eq!(single.support_value(&e).unwrap(), rat(-1, 1));
        assert!(a.support_value(&RatVector::from_i64(&[1])).is_err());
    }

    #[test]
    fn cone_two_faces_of_octant() {
        let c = RatCone::from_generators(
            3,
            &[
                IntVector::from_i64(&[1, 0, 0]),
                IntVector::from_i64(&[0, 1, 0]),
                IntVector::from_i64(&[0, 0, 1]),
            ],
            &[],
        )
        .unwrap();
        assert_eq!(c.two_faces().len(), 3);
        let sq = RatCone::from_generators(
            3,
            &[
                IntVector::from_i64(&[1, 0, 1]),
                IntVector::from_i64(&[0, 1, 1]),
                IntVector::from_i64(&[-1, 0, 1]),
                IntVector::from_i64(&[0, -1, 1]),
            ],
            &[],
        )
        .unwrap();
        assert_eq!(sq.two_faces().len(), 4);
        assert_eq!(sq.facets().len(), 4);
    }

    #[test]
    fn cone_with_lineality() {
        // x + y >= 0 in the plane
        let h = RatCone::from_inequalities(2, &[IntVector::from_i64(&[1, 1])], &[]).unwrap();
        assert_eq!(h.lines().len(), 1);
        assert_eq!(h.rays().len(), 1);
        assert!(h.contains_int(&IntVector::from_i64(&[5, -5])));
        assert!(!h.contains_int(&IntVector::from_i64(&[-1, 0])));
        let d = h.dual();
        assert_eq!(d.rays(), &[IntVector::from_i64(&[1, 1])]);
        assert!(d.lines().is_empty());
    }
}
