//! Exact integer lattice algebra: Hermite and Smith normal forms, kernels,
//! saturated sublattices, quotient presentations and extension of
//! homomorphisms from a direct summand.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{dim_check, Error, Result};
use crate::num::{gcd_all, Int, IntVector};

/// Dense integer matrix stored by rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: Vec<Vec<Int>>,
    ncols: usize,
}

impl IntMatrix {
    pub fn new(rows: Vec<Vec<Int>>, ncols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged matrix");
        IntMatrix { rows, ncols }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| Int::from(x)).collect())
                .collect(),
            ncols,
        )
    }

    pub fn from_rows(rows: &[IntVector], ncols: usize) -> Self {
        Self::new(rows.iter().map(|r| r.0.clone()).collect(), ncols)
    }

    pub fn from_columns(cols: &[IntVector], nrows: usize) -> Self {
        Self::from_rows(cols, nrows).transpose()
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::new(vec![vec![Int::zero(); ncols]; nrows], ncols)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i][i] = Int::one();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.rows[i][j]
    }

    pub fn row(&self, i: usize) -> IntVector {
        IntVector(self.rows[i].clone())
    }

    pub fn rows(&self) -> Vec<IntVector> {
        self.rows.iter().map(|r| IntVector(r.clone())).collect()
    }

    pub fn column(&self, j: usize) -> IntVector {
        IntVector(self.rows.iter().map(|r| r[j].clone()).collect())
    }

    pub fn columns(&self) -> Vec<IntVector> {
        (0..self.ncols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> IntMatrix {
        let rows = (0..self.ncols)
            .map(|j| self.rows.iter().map(|r| r[j].clone()).collect())
            .collect();
        IntMatrix::new(rows, self.nrows())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.ncols, other.nrows(), "dimension mismatch");
        let rows = self
            .rows
            .iter()
            .map(|r| {
                (0..other.ncols)
                    .map(|j| r.iter().zip(&other.rows).map(|(a, o)| a * &o[j]).sum())
                    .collect()
            })
            .collect();
        IntMatrix::new(rows, other.ncols)
    }

    pub fn mul_vec(&self, v: &IntVector) -> IntVector {
        assert_eq!(self.ncols, v.len(), "dimension mismatch");
        IntVector(self.rows.iter().map(|r| IntVector(r.clone()).dot(v)).collect())
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &IntVector) -> IntVector {
        assert_eq!(self.nrows(), v.len(), "dimension mismatch");
        IntVector(
            (0..self.ncols)
                .map(|j| self.rows.iter().zip(&v.0).map(|(r, x)| &r[j] * x).sum())
                .collect(),
        )
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.rows.swap(a, b);
    }

    /// row[i] -= q * row[p]
    fn sub_row(&mut self, i: usize, p: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        let src = self.rows[p].clone();
        for (x, s) in self.rows[i].iter_mut().zip(&src) {
            *x -= q * s;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.rows[i].iter_mut() {
            *x = -&*x;
        }
    }

    pub fn determinant(&self) -> Int {
        assert_eq!(self.nrows(), self.ncols, "determinant of non-square matrix");
        let (h, u) = hnf(self);
        // det(U) * det(self) = det(H), det(U) = +-1
        let det_h: Int = (0..self.ncols).map(|i| h.rows[i][i].clone()).product();
        if det_h.is_zero() {
            return det_h;
        }
        let det_u = unimodular_sign(&u);
        det_h * det_u
    }
}

fn unimodular_sign(u: &IntMatrix) -> Int {
    // Fraction-free elimination on a copy; only the sign is needed.
    let n = u.nrows();
    let mut m: Vec<Vec<num_rational::BigRational>> = u
        .rows
        .iter()
        .map(|r| r.iter().map(|x| num_rational::BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut det = num_rational::BigRational::one();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero()).expect("singular unimodular matrix");
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c].clone();
        for i in c + 1..n {
            let f = &m[i][c] / &m[c][c];
            for j in c..n {
                let t = &m[c][j] * &f;
                m[i][j] -= t;
            }
        }
    }
    det.to_integer()
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", IntVector(r.clone()))?;
        }
        write!(f, "]")
    }
}

/// Row Hermite normal form: returns `(H, U)` with `U * m = H`, `U` unimodular,
/// positive pivots, entries above a pivot reduced into `[0, pivot)` and zero
/// rows at the bottom.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let nr = m.nrows();
    let nc = m.ncols();
    let mut h = m.clone();
    let mut u = IntMatrix::identity(nr);
    let mut pr = 0;
    for col in 0..nc {
        if pr == nr {
            break;
        }
        loop {
            let best = (pr..nr)
                .filter(|&i| !h.rows[i][col].is_zero())
                .min_by(|&a, &b| h.rows[a][col].abs().cmp(&h.rows[b][col].abs()));
            let Some(b) = best else { break };
            h.swap_rows(pr, b);
            u.swap_rows(pr, b);
            let mut clean = true;
            for i in pr + 1..nr {
                if !h.rows[i][col].is_zero() {
                    let q = h.rows[i][col].div_floor(&h.rows[pr][col]);
                    h.sub_row(i, pr, &q);
                    u.sub_row(i, pr, &q);
                    if !h.rows[i][col].is_zero() {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if h.rows[pr][col].is_zero() {
            continue;
        }
        if h.rows[pr][col].is_negative() {
            h.negate_row(pr);
            u.negate_row(pr);
        }
        for i in 0..pr {
            let q = h.rows[i][col].div_floor(&h.rows[pr][col]);
            h.sub_row(i, pr, &q);
            u.sub_row(i, pr, &q);
        }
        pr += 1;
    }
    (h, u)
}

/// Elementary divisors (nonzero diagonal of the Smith normal form).
pub fn elementary_divisors(m: &IntMatrix) -> Vec<Int> {
    let mut d = m.clone();
    // Alternate row and column Hermite reductions until diagonal.
    for _ in 0..64 {
        d = hnf(&d).0;
        d = hnf(&d.transpose()).0.transpose();
        let diagonal = d
            .rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.iter().enumerate().all(|(j, x)| i == j || x.is_zero()));
        if diagonal {
            break;
        }
    }
    let mut diag: Vec<Int> = (0..d.nrows().min(d.ncols()))
        .map(|i| d.rows[i][i].abs())
        .filter(|x| !x.is_zero())
        .collect();
    // enforce the divisibility chain
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let g = diag[i].gcd(&diag[j]);
            let l = diag[i].lcm(&diag[j]);
            diag[i] = g;
            diag[j] = l;
        }
    }
    diag
}

/// Basis of the integer kernel `{x in Z^n : m x = 0}`; the result is saturated.
pub fn int_kernel(m: &IntMatrix) -> Vec<IntVector> {
    let (h, u) = hnf(&m.transpose());
    (0..h.nrows())
        .filter(|&i| h.rows[i].iter().all(|x| x.is_zero()))
        .map(|i| u.row(i))
        .collect()
}

/// Basis of the lattice generated by the columns of `m`.
pub fn column_lattice_basis(m: &IntMatrix) -> Vec<IntVector> {
    let (h, _) = hnf(&m.transpose());
    h.rows()
        .into_iter()
        .filter(|r| !r.is_zero())
        .collect()
}

/// Inverse of a unimodular square matrix.
pub fn unimodular_inverse(w: &IntMatrix) -> Option<IntMatrix> {
    let (h, u) = hnf(w);
    if h == IntMatrix::identity(w.nrows()) {
        Some(u)
    } else {
        None
    }
}

/// `v / gcd(v)`.
pub fn primitive(v: &IntVector) -> Result<IntVector> {
    let g = gcd_all(&v.0);
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(IntVector(v.0.iter().map(|x| x / &g).collect()))
}

pub fn is_primitive(v: &IntVector) -> bool {
    gcd_all(&v.0).is_one()
}

/// A sublattice of `Z^ambient`, stored by its row HNF basis so that equality
/// is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sublattice {
    ambient: usize,
    basis: IntMatrix,
}

impl Sublattice {
    /// Lattice generated by the given vectors.
    pub fn generated_by(ambient: usize, gens: &[IntVector]) -> Result<Self> {
        for g in gens {
            dim_check(ambient, g.len())?;
        }
        let (h, _) = hnf(&IntMatrix::from_rows(gens, ambient));
        let rows: Vec<IntVector> = h.rows().into_iter().filter(|r| !r.is_zero()).collect();
        Ok(Sublattice {
            ambient,
            basis: IntMatrix::from_rows(&rows, ambient),
        })
    }

    /// Saturation `Z^n ∩ span_Q(gens)`.
    pub fn saturation_of(ambient: usize, gens: &[IntVector]) -> Result<Self> {
        for g in gens {
            dim_check(ambient, g.len())?;
        }
        if gens.is_empty() {
            return Self::generated_by(ambient, &[]);
        }
        let perp = int_kernel(&IntMatrix::from_rows(gens, ambient));
        if perp.is_empty() {
            return Self::generated_by(ambient, &IntMatrix::identity(ambient).rows());
        }
        let sat = int_kernel(&IntMatrix::from_rows(&perp, ambient));
        Self::generated_by(ambient, &sat)
    }

    pub fn whole(ambient: usize) -> Self {
        Sublattice {
            ambient,
            basis: IntMatrix::identity(ambient),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> Vec<IntVector> {
        self.basis.rows()
    }

    pub fn basis_matrix(&self) -> &IntMatrix {
        &self.basis
    }

    /// Coordinates of `v` in the stored basis, if `v` lies in the lattice.
    pub fn coords(&self, v: &IntVector) -> Option<IntVector> {
        if v.len() != self.ambient {
            return None;
        }
        let mut rest = v.clone();
        let mut y = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            let row = self.basis.row(i);
            let p = row.0.iter().position(|x| !x.is_zero()).expect("zero basis row");
            let (q, r) = rest[p].div_rem(&row[p]);
            if !r.is_zero() {
                return None;
            }
            rest = rest.sub(&row.scale(&q));
            y.push(q);
        }
        rest.is_zero().then_some(IntVector(y))
    }

    pub fn contains(&self, v: &IntVector) -> bool {
        self.coords(v).is_some()
    }

    /// Basis combination `sum_i c_i b_i`.
    pub fn embed(&self, c: &IntVector) -> IntVector {
        self.basis.vec_mul(c)
    }

    pub fn is_saturated(&self) -> bool {
        elementary_divisors(&self.basis).iter().all(|d| d.is_one())
    }
}

/// A lattice homomorphism `Z^source -> Z^target` (rows = target rank).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeHom {
    pub matrix: IntMatrix,
}

impl LatticeHom {
    pub fn new(matrix: IntMatrix) -> Self {
        LatticeHom { matrix }
    }

    /// Rank-one homomorphism given by a functional.
    pub fn functional(phi: &IntVector) -> Self {
        LatticeHom::new(IntMatrix::from_rows(std::slice::from_ref(phi), phi.len()))
    }

    pub fn source_rank(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn target_rank(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, v: &IntVector) -> IntVector {
        self.matrix.mul_vec(v)
    }

    /// Pullback of a functional on the target: `m ↦ m ∘ self`.
    pub fn pullback(&self, m: &IntVector) -> IntVector {
        self.matrix.vec_mul(m)
    }

    pub fn elementary_divisors(&self) -> Vec<Int> {
        elementary_divisors(&self.matrix)
    }

    pub fn is_surjective(&self) -> bool {
        let ed = self.elementary_divisors();
        ed.len() == self.target_rank() && ed.iter().all(|d| d.is_one())
    }

    /// A lattice right inverse `s` with `self * s = id`, if surjective.
    pub fn section(&self) -> Option<IntMatrix> {
        if !self.is_surjective() {
            return None;
        }
        let k = self.target_rank();
        let (_, u) = hnf(&self.matrix.transpose());
        let rows: Vec<IntVector> = (0..k).map(|i| u.row(i)).collect();
        let s = IntMatrix::from_rows(&rows, self.source_rank()).transpose();
        debug_assert_eq!(self.matrix.mul(&s), IntMatrix::identity(k));
        Some(s)
    }

    /// Descends a functional on the source through this surjection:
    /// returns `m̄` with `pullback(m̄) = m`, if it exists.
    pub fn descend(&self, m: &IntVector) -> Option<IntVector> {
        let s = self.section()?;
        let bar = s.vec_mul(m);
        (self.pullback(&bar) == *m).then_some(bar)
    }
}

/// `ker φ` for a surjective functional `φ: Z^n -> Z`.
pub fn kernel_sublattice(phi: &LatticeHom) -> Result<Sublattice> {
    if phi.target_rank() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: phi.target_rank(),
        });
    }
    if !phi.is_surjective() {
        return Err(Error::NotPrimitive(format!(
            "functional {} has elementary divisors {:?}",
            phi.matrix.row(0),
            phi.elementary_divisors()
        )));
    }
    Sublattice::generated_by(phi.source_rank(), &int_kernel(&phi.matrix))
}

/// `N -> N/S` presented by a surjective projection with a lattice section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientPresentation {
    pub projection: LatticeHom,
    pub section: IntMatrix,
}

pub fn quotient_by_span(ambient: usize, s: &Sublattice) -> Result<QuotientPresentation> {
    dim_check(ambient, s.ambient())?;
    if !s.is_saturated() {
        return Err(Error::NotSaturated);
    }
    let r = s.rank();
    let (_, u) = hnf(&s.basis_matrix().transpose());
    let uinv = unimodular_inverse(&u).expect("transform is unimodular");
    let proj_rows: Vec<IntVector> = (r..ambient).map(|i| u.row(i)).collect();
    let projection = LatticeHom::new(IntMatrix::from_rows(&proj_rows, ambient));
    let sec_cols: Vec<IntVector> = (r..ambient).map(|j| uinv.column(j)).collect();
    let section = IntMatrix::from_columns(&sec_cols, ambient);
    Ok(QuotientPresentation {
        projection,
        section,
    })
}

/// Extends `φ₀` (given by its values on the stored basis of `sub`) to the
/// ambient lattice, taking the value 0 on the complement generators coming
/// from the quotient section.
pub fn extend_hom(sub: &Sublattice, values: &IntVector) -> Result<IntVector> {
    dim_check(sub.rank(), values.len())?;
    let n = sub.ambient();
    let q = quotient_by_span(n, sub)?;
    let mut rows = sub.basis();
    rows.extend(q.section.columns());
    let w = IntMatrix::from_rows(&rows, n);
    let winv = unimodular_inverse(&w).expect("basis completion is unimodular");
    let mut rhs = values.0.clone();
    rhs.resize(n, Int::zero());
    let phi2 = winv.mul_vec(&IntVector(rhs));
    debug_assert!(sub
        .basis()
        .iter()
        .zip(values.iter())
        .all(|(b, v)| &phi2.dot(b) == v));
    Ok(phi2)
}
