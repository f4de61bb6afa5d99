//! Search for an invariant hyperplane section `P ∈ H ⊂ Y` with
//! `(X, B + γ f*H + 𝐃_X)` g-lc and `γ ≥ γ(d, mld)`.
//!
//! The search follows the induction on `l = dim N - dim σ₀`: a functional of
//! small width on `U'` either touches the origin at an endpoint (the
//! hyperplane is read off directly) or cuts `U` through the origin, in which
//! case the problem is restricted to the slice `φ^⊥`, solved there and the
//! answer extended back.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{dim_check, Error, Result};
use crate::lattice::{is_primitive, kernel_sublattice, IntMatrix, LatticeHom, Sublattice};
use crate::linalg::solve;
use crate::num::{ceil, fmt_rat, rat_int, Int, IntVector, Rat};
use crate::polyhedral::{RatCone, RatPolyhedron};
use crate::toric::{
    box_square, is_glc, lc_quotient, log_discrepancy, mld_over_fiber, BoxData, Fan, GPair, Mld,
    ToricContraction,
};

/// `γ(1, a) = a`, `γ(d, a) = γ(d - 1, a² / d²)`.
pub fn gamma(d: u32, a: &Rat) -> Rat {
    assert!(d >= 1, "gamma needs d >= 1");
    let mut a = a.clone();
    for k in (2..=d).rev() {
        let kk = Rat::from_integer(Int::from(k * k));
        a = &a * &a / kk;
    }
    a
}

/// `a^(2^(d-1)) / ∏_{i=1}^d i^(2^(i-1))`.
pub fn gamma_closed_form(d: u32, a: &Rat) -> Rat {
    assert!(d >= 1, "gamma needs d >= 1");
    let num = num_traits::pow(a.clone(), 1usize << (d - 1));
    let den = (1..=d).fold(Int::one(), |acc, i| {
        acc * num_traits::pow(Int::from(i), 1usize << (i - 1))
    });
    num / rat_int(&den)
}

/// The cone of g-lc places `σ₀`, the recession cone of `U`.
pub fn lc_places_cone(bd: &BoxData) -> Result<RatCone> {
    Ok(bd.sigma0()?.clone())
}

/// Where the origin sits in `φ(U)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum WidthCase {
    /// `φ(U) = [0, w]`.
    Boundary,
    /// `φ(U) = [-w₋, w₊]` with both ends nonzero.
    Interior,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WidthResult {
    pub phi: IntVector,
    pub lo: Rat,
    pub hi: Rat,
    pub w: Rat,
    pub w_minus: Rat,
    pub w_plus: Rat,
    pub case: WidthCase,
}

impl WidthResult {
    fn from_interval(phi: IntVector, lo: Rat, hi: Rat) -> Self {
        let case = if lo.is_zero() {
            WidthCase::Boundary
        } else {
            WidthCase::Interior
        };
        WidthResult {
            phi,
            w: &hi - &lo,
            w_minus: -lo.clone(),
            w_plus: hi.clone(),
            lo,
            hi,
            case,
        }
    }
}

fn interval_of(p: &RatPolyhedron, phi: &IntVector) -> Option<(Rat, Rat)> {
    let c = phi.to_rat();
    Some((p.min_value(&c)?, p.max_value(&c)?))
}

/// Norm cap for the width search: any `φ` with `length φ(U) ≤ bound` has
/// `|φ_j| ≤ bound · Σ_i |(D⁻¹)_{ji}|` where the rows of `D` are independent
/// vertex differences of `U`.
fn norm_cap(u: &RatPolyhedron, bound: &Rat) -> Int {
    let l = u.ambient_dim();
    let v = u.vertices();
    let mut diffs: Vec<Vec<Rat>> = Vec::new();
    for x in &v[1..] {
        let d = x.sub(&v[0]).0;
        let mut trial = diffs.clone();
        trial.push(d.clone());
        if crate::linalg::rank(&trial, l) == trial.len() {
            diffs = trial;
        }
        if diffs.len() == l {
            break;
        }
    }
    assert_eq!(diffs.len(), l, "U is full-dimensional");
    let mut cap = Int::one();
    for j in 0..l {
        let mut e = vec![Rat::zero(); l];
        e[j] = Rat::one();
        // column j of D⁻¹ solves D x = e_j; row j of D⁻¹ is needed, so solve Dᵀ y = e_j
        let dt: Vec<Vec<Rat>> = (0..l).map(|r| (0..l).map(|c| diffs[c][r].clone()).collect()).collect();
        let y = solve(&dt, &e, l).expect("invertible");
        let s = y.iter().fold(Rat::zero(), |s, x| s + x.abs());
        let c = ceil(&(s * bound));
        if c > cap {
            cap = c;
        }
    }
    cap
}

fn vectors_of_norm(l: usize, k: i64) -> Vec<IntVector> {
    let mut out = Vec::new();
    let mut cur = vec![-k; l];
    loop {
        if cur.iter().any(|x| x.abs() == k) {
            let v = IntVector::from_i64(&cur);
            if is_primitive(&v) {
                out.push(v);
            }
        }
        let mut i = l;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < k {
                cur[i] += 1;
                for x in cur.iter_mut().skip(i + 1) {
                    *x = -k;
                }
                break;
            }
        }
    }
}

fn l1(v: &IntVector) -> Int {
    v.iter().map(|x| x.abs()).sum()
}

/// A primitive functional with `length φ(U) ≤ l²/t`, searched by sup-norm.
///
/// At the first norm level holding a candidate, candidates with the origin at
/// an endpoint win, then smaller width, then smaller ℓ¹ norm, then the
/// lexicographically greatest vector. Endpoint candidates are oriented so the
/// interval reads `[0, w]`.
pub fn width_functional(u: &RatPolyhedron, t: &Rat, l: usize) -> Result<WidthResult> {
    dim_check(l, u.ambient_dim())?;
    if !u.is_compact() || !u.is_full_dim() {
        return Err(Error::Hypothesis("width search needs a full-dimensional polytope".into()));
    }
    if !t.is_positive() {
        return Err(Error::Hypothesis("width search needs t > 0".into()));
    }
    let bound = Rat::from_integer(Int::from(l * l)) / t;
    let cap = norm_cap(u, &bound);
    let cap_i64: i64 = i64::try_from(&cap).map_err(|_| {
        Error::WidthBoundViolated(format!("norm cap {cap} is out of range"))
    })?;
    for k in 1..=cap_i64 {
        let mut best: Option<WidthResult> = None;
        for phi in vectors_of_norm(l, k) {
            let (lo, hi) = interval_of(u, &phi).expect("compact");
            let cand = WidthResult::from_interval(phi, lo, hi);
            if cand.w > bound || (cand.case == WidthCase::Interior && cand.hi.is_zero()) {
                continue;
            }
            let better = match &best {
                None => true,
                Some(b) => (cand.case, &cand.w, l1(&cand.phi), std::cmp::Reverse(&cand.phi))
                    < (b.case, &b.w, l1(&b.phi), std::cmp::Reverse(&b.phi)),
            };
            if better {
                best = Some(cand);
            }
        }
        if let Some(b) = best {
            return Ok(b);
        }
    }
    Err(Error::WidthBoundViolated(format!(
        "no primitive functional of sup-norm <= {cap} has width <= {}",
        fmt_rat(&bound)
    )))
}

/// A ray added by the subdivision along `φ^⊥`, with `q · ray = φ(e₂)e₁ - φ(e₁)e₂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewRay {
    pub ray: IntVector,
    pub q: Int,
    pub e1: usize,
    pub e2: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivision {
    pub fan: Fan,
    pub new_rays: Vec<NewRay>,
}

/// The fan `Δ'` of cones `σ ∩ φ^{≥0}`, `σ ∩ φ^{≤0}` (and their faces).
pub fn subdivide_fan(fan: &Fan, phi: &IntVector) -> Result<Subdivision> {
    dim_check(fan.rank(), phi.len())?;
    if phi.is_zero() {
        return Err(Error::ZeroFunctional);
    }
    let n = fan.rank();
    let mut halves: Vec<RatCone> = Vec::new();
    for c in fan.cones() {
        for s in [phi.clone(), phi.neg()] {
            let h = c.intersect_halfspace(&s)?;
            if h.is_full_dim() && !halves.contains(&h) {
                halves.push(h);
            }
        }
    }
    let mut rays: Vec<IntVector> = fan.rays().to_vec();
    for h in &halves {
        for r in h.rays() {
            if !rays.contains(r) {
                rays.push(r.clone());
            }
        }
    }
    let cones: Vec<Vec<usize>> = halves
        .iter()
        .map(|h| {
            h.rays()
                .iter()
                .map(|r| rays.iter().position(|x| x == r).expect("collected"))
                .collect()
        })
        .collect();

    let mut new_rays = Vec::new();
    for (i, j) in fan.two_cones() {
        let (pi, pj) = (phi.dot(&fan.rays()[i]), phi.dot(&fan.rays()[j]));
        let (e1, e2, p1, p2) = if pi.is_negative() && pj.is_positive() {
            (i, j, pi, pj)
        } else if pj.is_negative() && pi.is_positive() {
            (j, i, pj, pi)
        } else {
            continue;
        };
        let v = fan.rays()[e1].scale(&p2).sub(&fan.rays()[e2].scale(&p1));
        let q = v.content();
        let ray = IntVector(v.0.iter().map(|x| x / &q).collect());
        new_rays.push(NewRay { ray, q, e1, e2 });
    }
    let expected: BTreeSet<&IntVector> = fan
        .rays()
        .iter()
        .chain(new_rays.iter().map(|r| &r.ray))
        .collect();
    let got: BTreeSet<&IntVector> = rays.iter().collect();
    if expected != got {
        return Err(Error::LemmaViolation {
            level: 0,
            check: "rays of the subdivision".into(),
            detail: format!("computed {} rays, predicted {}", got.len(), expected.len()),
        });
    }
    let fan = Fan::new(n, rays, cones)?;
    Ok(Subdivision { fan, new_rays })
}

/// The slice over `N₀ = ker φ` with rescaled boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceData {
    pub kernel: Sublattice,
    pub contraction: ToricContraction,
    pub pair: GPair,
    pub lambda: Rat,
    /// `λ⁻¹ (U ∩ φ^⊥)` in the coordinates of `N₀`.
    pub u_check: RatPolyhedron,
    /// `U ∩ φ^⊥` in the coordinates of `N₀`.
    pub u0: RatPolyhedron,
    /// Columns: a basis of `π(N₀)` in `N̄`.
    pub base_embedding: IntMatrix,
    pub box_data: BoxData,
    pub mld: Rat,
    pub subdivision: Subdivision,
    pub max_discrepancy: Rat,
}

fn violation(level: usize, check: &str, detail: impl Into<String>) -> Error {
    Error::LemmaViolation {
        level,
        check: check.into(),
        detail: detail.into(),
    }
}

fn relevel(e: Error, level: usize) -> Error {
    match e {
        Error::LemmaViolation { check, detail, .. } => Error::LemmaViolation {
            level,
            check,
            detail,
        },
        other => other,
    }
}

/// Builds the slice pair and validates it: boundary coefficients in [0,1],
/// nef, `U` of the slice equal to `λ⁻¹(U ∩ φ^⊥)`, invariant point on `Y₁`,
/// and mld at least `λ t`.
pub fn slice(
    tc: &ToricContraction,
    bd: &BoxData,
    width: &WidthResult,
    lambda: &Rat,
    t: &Rat,
    level: usize,
) -> Result<SliceData> {
    let n = tc.rank();
    let phi = &width.phi;
    let u = bd.u()?;
    if width.case != WidthCase::Interior || !width.w_minus.is_positive() || !width.w_plus.is_positive() {
        return Err(Error::Hypothesis("slice needs 0 inside φ(U)".into()));
    }
    if !lambda.is_positive() || lambda * &width.w > Rat::one() {
        return Err(Error::Hypothesis("slice needs 0 < λ <= 1/w".into()));
    }
    let one = Rat::one();
    if width.w_minus.clone().max(width.w_plus.clone()) < one || width.w <= one {
        return Err(violation(level, "w > 1", format!("w = {}", fmt_rat(&width.w))));
    }

    let subdivision = subdivide_fan(tc.fan(), phi).map_err(|e| relevel(e, level))?;
    let mut max_discrepancy = Rat::zero();
    for e in subdivision.fan.rays() {
        let a = log_discrepancy(tc, bd, e)?;
        if a > width.w {
            return Err(violation(
                level,
                "discrepancies on the subdivision are at most w",
                format!("a({e}) = {} > w = {}", fmt_rat(&a), fmt_rat(&width.w)),
            ));
        }
        if a > max_discrepancy {
            max_discrepancy = a;
        }
    }

    let kernel = kernel_sublattice(&LatticeHom::functional(phi))?;
    let kmat = kernel.basis_matrix().transpose();
    let n0 = n - 1;

    // Δ₀ = {σ ∩ φ^⊥} of full dimension in φ^⊥
    let mut rays0: Vec<IntVector> = Vec::new();
    let mut rays0_ambient: Vec<IntVector> = Vec::new();
    let mut cones0: Vec<Vec<usize>> = Vec::new();
    for c in tc.fan().cones() {
        let s = c.intersect_hyperplane(phi)?;
        if s.dimension() != n0 {
            continue;
        }
        let mut idx = Vec::new();
        for r in s.rays() {
            let pos = match rays0_ambient.iter().position(|x| x == r) {
                Some(p) => p,
                None => {
                    rays0_ambient.push(r.clone());
                    rays0.push(kernel.coords(r).expect("ray lies in ker φ"));
                    rays0.len() - 1
                }
            };
            idx.push(pos);
        }
        idx.sort_unstable();
        if !cones0.contains(&idx) {
            cones0.push(idx);
        }
    }
    let fan0 = Fan::new(n0, rays0, cones0).map_err(|e| violation(level, "slice fan", e.to_string()))?;

    let mut b0 = Vec::with_capacity(rays0_ambient.len());
    for e in &rays0_ambient {
        let b = Rat::one() - lambda * log_discrepancy(tc, bd, e)?;
        if b.is_negative() || b > Rat::one() {
            return Err(violation(
                level,
                "slice boundary is effective",
                format!("coefficient {} on {e}", fmt_rat(&b)),
            ));
        }
        b0.push(b);
    }
    let a0 = bd.pair.bdiv().restrict(&kernel.basis()).scale(lambda);

    // π₀: N₀ -> π(N₀) and the embedding u: π(N₀) -> N̄
    let pk = tc.pi().matrix.mul(&kmat);
    let nbar0 = Sublattice::generated_by(tc.base_rank(), &pk.columns())?;
    if nbar0.rank() == 0 {
        return Err(violation(level, "invariant point on Y₁", "π(N₀) = 0"));
    }
    let umat = nbar0.basis_matrix().transpose();
    let pi0_cols: Vec<IntVector> = pk
        .columns()
        .iter()
        .map(|c| nbar0.coords(c).expect("column of πK lies in π(N₀)"))
        .collect();
    let pi0 = IntMatrix::from_columns(&pi0_cols, nbar0.rank());
    let sigma_bar0 = tc.sigma_bar().preimage(&umat)?;
    if !sigma_bar0.is_pointed() || !sigma_bar0.is_full_dim() {
        return Err(violation(
            level,
            "invariant point on Y₁",
            "σ̄ ∩ π(N₀) is not a full-dimensional pointed cone",
        ));
    }
    let contraction = ToricContraction::new(fan0, LatticeHom::new(pi0), Some(sigma_bar0.rays()))
        .map_err(|e| violation(level, "slice contraction", e.to_string()))?;
    let pair = GPair::new(&contraction, b0, a0, vec![])
        .map_err(|e| violation(level, "slice pair", e.to_string()))?;
    let box_data = box_square(&contraction, &pair)
        .map_err(|e| violation(level, "slice is nef and Cartier", e.to_string()))?;

    let u0 = u.preimage(&kmat)?;
    let u_check = u0.scale(&(Rat::one() / lambda));
    let slice_u = box_data
        .u()
        .map_err(|_| violation(level, "slice U", "slice pair is not g-lc"))?;
    if *slice_u != u_check {
        return Err(violation(level, "slice U equals λ⁻¹(U ∩ φ^⊥)", "polyhedra differ"));
    }
    let l0 = box_data.l()?;
    if l0 + 1 != bd.l()? {
        return Err(violation(level, "slice has l - 1", format!("l = {}, slice l = {l0}", bd.l()?)));
    }
    let mld = match mld_over_fiber(&contraction, &box_data)? {
        Mld::Positive { value, .. } => value,
        Mld::NotPositive => return Err(violation(level, "slice mld", "not positive")),
    };
    if mld < lambda * t {
        return Err(violation(
            level,
            "slice mld >= λt",
            format!("{} < {}", fmt_rat(&mld), fmt_rat(&(lambda * t))),
        ));
    }
    Ok(SliceData {
        kernel,
        contraction,
        pair,
        lambda: lambda.clone(),
        u_check,
        u0,
        base_embedding: umat,
        box_data,
        mld,
        subdivision,
        max_discrepancy,
    })
}

/// Which extremal value of `c` was used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `w₋ ≤ w₊`: `c` is the minimum over generators with `φ(e) < 0`.
    MinusShorter,
    /// `w₊ < w₋`: `c` is the maximum over generators with `φ(e) > 0`.
    PlusShorter,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionTrace {
    pub phi1: IntVector,
    pub phi2: IntVector,
    pub phi_prime: IntVector,
    pub q: Int,
    pub c: Rat,
    pub generator: usize,
    pub branch: Branch,
    pub w_minus: Rat,
    pub w_plus: Rat,
    pub l0: Rat,
}

/// Extends `φ₀ ≥ 0` on `C ∩ φ^⊥` to `φ'` on the whole lattice with
/// `φ'|_{Λ₀} = q φ₀`, `1 ≤ q < w` and `φ'(C) ⊆ [0, w l₀]`.
///
/// `phi0` is given by its values on the basis of `ker φ` returned by
/// [`kernel_sublattice`].
pub fn extend_functional(
    generators: &[IntVector],
    c: &RatPolyhedron,
    phi: &IntVector,
    phi0: &IntVector,
    l0: &Rat,
) -> Result<ExtensionTrace> {
    let n = c.ambient_dim();
    dim_check(n, phi.len())?;
    let kernel = kernel_sublattice(&LatticeHom::functional(phi))?;
    dim_check(kernel.rank(), phi0.len())?;
    if !c.contains_origin() {
        return Err(Error::Hypothesis("C must contain the origin".into()));
    }
    for (i, e) in generators.iter().enumerate() {
        dim_check(n, e.len())?;
        if !c.contains(&e.to_rat()) {
            return Err(Error::Hypothesis(format!("generator {i} = {e} is not in C")));
        }
    }
    let (lo, hi) = interval_of(c, phi)
        .ok_or_else(|| Error::Hypothesis("φ(C) is not compact".into()))?;
    let (w_minus, w_plus) = (-lo, hi);
    if !w_minus.is_positive() || !w_plus.is_positive() {
        return Err(Error::Hypothesis("0 is not interior to φ(C)".into()));
    }
    let w = &w_minus + &w_plus;
    let kmat = kernel.basis_matrix().transpose();
    let c0 = c.preimage(&kmat)?;
    match interval_of(&c0, phi0) {
        Some((a, b)) if a.is_zero() && &b == l0 && l0.is_positive() => {}
        _ => return Err(Error::Hypothesis("φ₀(C₀) is not [0, l₀] with l₀ > 0".into())),
    }

    let phi2 = crate::lattice::extend_hom(&kernel, phi0)?;
    let branch = if w_minus <= w_plus {
        Branch::MinusShorter
    } else {
        Branch::PlusShorter
    };
    let mut pick: Option<(Rat, usize)> = None;
    for (i, e) in generators.iter().enumerate() {
        let p1 = phi.dot(e);
        let p2 = rat_int(&phi2.dot(e));
        let val = match branch {
            Branch::MinusShorter if p1.is_negative() => p2 / rat_int(&-p1),
            Branch::PlusShorter if p1.is_positive() => -p2 / rat_int(&p1),
            _ => continue,
        };
        let better = match (&pick, branch) {
            (None, _) => true,
            (Some((b, _)), Branch::MinusShorter) => &val < b,
            (Some((b, _)), Branch::PlusShorter) => &val > b,
        };
        if better {
            pick = Some((val, i));
        }
    }
    let (cval, gi) = pick.ok_or_else(|| {
        Error::Hypothesis("generators do not reach both sides of φ^⊥".into())
    })?;
    let e = &generators[gi];
    let p1 = phi.dot(e);
    let p2 = phi2.dot(e);
    let (q, phi_prime) = match branch {
        Branch::MinusShorter => {
            let q = -p1;
            (q.clone(), phi.scale(&p2).add(&phi2.scale(&q)))
        }
        Branch::PlusShorter => {
            let q = p1;
            (q.clone(), phi.scale(&-p2).add(&phi2.scale(&q)))
        }
    };

    let qr = rat_int(&q);
    if qr < Rat::one() || qr >= w {
        return Err(violation(0, "1 <= q < w", format!("q = {q}, w = {}", fmt_rat(&w))));
    }
    for (b, v) in kernel.basis().iter().zip(phi0.iter()) {
        if phi_prime.dot(b) != &q * v {
            return Err(violation(0, "φ'|Λ₀ = qφ₀", format!("fails on {b}")));
        }
    }
    match interval_of(c, &phi_prime) {
        Some((a, b)) if !a.is_negative() && b <= &w * l0 => {}
        other => {
            return Err(violation(
                0,
                "φ'(C) ⊆ [0, w l₀]",
                format!("{other:?} against {}", fmt_rat(&(&w * l0))),
            ))
        }
    }
    Ok(ExtensionTrace {
        phi1: phi.clone(),
        phi2,
        phi_prime,
        q,
        c: cval,
        generator: gi,
        branch,
        w_minus,
        w_plus,
        l0: l0.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lift {
    pub phi_bar: IntVector,
    pub gamma: Rat,
    pub trace: ExtensionTrace,
}

/// Lifts a slice hyperplane `(φ̄₀, γ₁)` to `Y` with coefficient `γ₁/(λw)`.
pub fn lift_hyperplane(
    tc: &ToricContraction,
    bd: &BoxData,
    sd: &SliceData,
    width: &WidthResult,
    phibar0: &IntVector,
    gamma1: &Rat,
    level: usize,
) -> Result<Lift> {
    let u = bd.u()?;
    let phi0 = sd.contraction.pi().pullback(phibar0);
    let l0 = sd
        .u0
        .max_value(&phi0.to_rat())
        .ok_or_else(|| violation(level, "slice functional bounded on U₀", "unbounded"))?;
    if l0 > &sd.lambda / gamma1 {
        return Err(violation(level, "l₀ <= λ/γ₁", fmt_rat(&l0)));
    }
    let trace = extend_functional(tc.fan().rays(), u, &width.phi, &phi0, &l0)
        .map_err(|e| relevel(e, level))?;
    let phibar = tc
        .pi()
        .descend(&trace.phi_prime)
        .ok_or_else(|| Error::DescentFailed(format!("{} is not a pullback", trace.phi_prime)))?;
    if !tc.sigma_bar().dual().contains_int(&phibar) {
        return Err(violation(level, "φ̄ ∈ σ̄^∨", phibar.to_string()));
    }
    if sd.base_embedding.vec_mul(&phibar) != phibar0.scale(&trace.q) {
        return Err(violation(level, "u*H = qH₁", phibar.to_string()));
    }
    let mut gamma = gamma1 / (&sd.lambda * &width.w);
    let g = phibar.content();
    let phibar = IntVector(phibar.0.iter().map(|x| x / &g).collect());
    gamma *= rat_int(&g);
    let pulled = tc.pi().pullback(&phibar).to_rat().scale(&-gamma.clone());
    if !bd.square.contains(&pulled) {
        return Err(violation(level, "-γφ ∈ □", phibar.to_string()));
    }
    Ok(Lift {
        phi_bar: phibar,
        gamma,
        trace,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LevelCase {
    /// `l = 1`: the functional is determined by `σ₀` up to sign.
    Line,
    Boundary,
    Interior,
}

/// Summary of the slice built at an interior level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceSummary {
    pub rank: usize,
    pub rays: usize,
    pub max_cones: usize,
    pub base_rank: usize,
    pub mld: Rat,
    pub lambda: Rat,
    pub new_rays: Vec<NewRay>,
    pub max_discrepancy: Rat,
    pub u_matches: bool,
    pub invariant_point: bool,
}

/// One level of the recursion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelRecord {
    pub level: usize,
    pub rank: usize,
    pub l: usize,
    pub t: Rat,
    pub case: LevelCase,
    pub phi: IntVector,
    pub lo: Rat,
    pub hi: Rat,
    pub w: Rat,
    pub slice: Option<SliceSummary>,
    pub extension: Option<ExtensionTrace>,
    pub phi_bar: IntVector,
    pub gamma: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperplaneCertificate {
    pub phi_bar: IntVector,
    pub gamma: Rat,
    pub mld: Rat,
    pub d: usize,
    pub transcript: Vec<LevelRecord>,
}

pub fn find_hyperplane(tc: &ToricContraction, pair: &GPair) -> Result<HyperplaneCertificate> {
    let bd = box_square(tc, pair)?;
    if !is_glc(&bd) {
        return Err(Error::NotGlc);
    }
    let a = match mld_over_fiber(tc, &bd)? {
        Mld::Positive { value, .. } => value,
        Mld::NotPositive => return Err(Error::MldNotPositive),
    };
    let mut transcript = Vec::new();
    let (phi_bar, gamma) = search_level(tc, &bd, &a, 0, &mut transcript)?;
    let d = tc.rank();
    if gamma < self::gamma(d as u32, &a) {
        return Err(violation(0, "γ >= γ(d, a)", fmt_rat(&gamma)));
    }
    Ok(HyperplaneCertificate {
        phi_bar,
        gamma,
        mld: a,
        d,
        transcript,
    })
}

fn descend_functional(tc: &ToricContraction, phi: &IntVector, level: usize) -> Result<IntVector> {
    let phibar = tc
        .pi()
        .descend(phi)
        .ok_or_else(|| Error::DescentFailed(format!("{phi} is not a pullback")))?;
    if !tc.sigma_bar().dual().contains_int(&phibar) {
        return Err(violation(level, "φ̄ ∈ σ̄^∨", phibar.to_string()));
    }
    Ok(phibar)
}

fn search_level(
    tc: &ToricContraction,
    bd: &BoxData,
    t: &Rat,
    level: usize,
    transcript: &mut Vec<LevelRecord>,
) -> Result<(IntVector, Rat)> {
    let l = bd.l()?;
    if l == 0 {
        return Err(Error::MldNotPositive);
    }
    let u = bd.u()?;
    let lq = lc_quotient(tc, bd)?;
    let lr = Rat::from_integer(Int::from(l));
    let floor_gamma = gamma(l as u32, t);

    if l == 1 {
        let mut phi = lq.projection.row(0);
        let (mut lo, mut hi) = interval_of(u, &phi)
            .ok_or_else(|| violation(level, "φ(U) compact", phi.to_string()))?;
        if !lo.is_zero() {
            if hi.is_zero() {
                phi = phi.neg();
                (lo, hi) = (-hi, -lo);
            } else {
                return Err(Error::Hypothesis(format!(
                    "level {level}: neither orientation of {phi} puts U on one side"
                )));
            }
        }
        let w = &hi - &lo;
        if t * &w > Rat::one() {
            return Err(violation(level, "tU' ⊆ [0,1]", fmt_rat(&(t * &w))));
        }
        let phibar = descend_functional(tc, &phi, level)?;
        let gamma = Rat::one() / &w;
        transcript.push(LevelRecord {
            level,
            rank: tc.rank(),
            l,
            t: t.clone(),
            case: LevelCase::Line,
            phi,
            lo,
            hi,
            w,
            slice: None,
            extension: None,
            phi_bar: phibar.clone(),
            gamma: gamma.clone(),
        });
        return Ok((phibar, gamma));
    }

    let wr_prime = width_functional(&lq.u_prime, t, l)?;
    let phi = lq.projection.vec_mul(&wr_prime.phi);
    let (lo, hi) = interval_of(u, &phi).expect("φ vanishes on σ₀");
    let wr = WidthResult::from_interval(phi.clone(), lo, hi);
    if &wr.w * t > &lr * &lr {
        return Err(Error::WidthBoundViolated(format!("level {level}: {}", fmt_rat(&wr.w))));
    }

    match wr.case {
        WidthCase::Boundary => {
            let phibar = descend_functional(tc, &phi, level)?;
            let gamma = Rat::one() / &wr.w;
            if gamma < floor_gamma {
                return Err(violation(level, "1/w >= γ(l,t)", fmt_rat(&gamma)));
            }
            transcript.push(LevelRecord {
                level,
                rank: tc.rank(),
                l,
                t: t.clone(),
                case: LevelCase::Boundary,
                phi,
                lo: wr.lo,
                hi: wr.hi,
                w: wr.w,
                slice: None,
                extension: None,
                phi_bar: phibar.clone(),
                gamma: gamma.clone(),
            });
            Ok((phibar, gamma))
        }
        WidthCase::Interior => {
            let lambda = Rat::one() / &wr.w;
            let sd = slice(tc, bd, &wr, &lambda, t, level)?;
            let t1 = t * &lambda;
            if gamma(l as u32 - 1, &t1) < floor_gamma {
                return Err(violation(level, "γ(l-1, t/w) >= γ(l, t)", fmt_rat(&t1)));
            }
            let idx = transcript.len();
            transcript.push(LevelRecord {
                level,
                rank: tc.rank(),
                l,
                t: t.clone(),
                case: LevelCase::Interior,
                phi: phi.clone(),
                lo: wr.lo.clone(),
                hi: wr.hi.clone(),
                w: wr.w.clone(),
                slice: Some(SliceSummary {
                    rank: sd.contraction.rank(),
                    rays: sd.contraction.fan().rays().len(),
                    max_cones: sd.contraction.fan().max_cones().len(),
                    base_rank: sd.contraction.base_rank(),
                    mld: sd.mld.clone(),
                    lambda: lambda.clone(),
                    new_rays: sd.subdivision.new_rays.clone(),
                    max_discrepancy: sd.max_discrepancy.clone(),
                    u_matches: true,
                    invariant_point: true,
                }),
                extension: None,
                phi_bar: IntVector::zeros(tc.base_rank()),
                gamma: Rat::zero(),
            });
            let (phibar0, gamma1) = search_level(&sd.contraction, &sd.box_data, &t1, level + 1, transcript)?;
            let lift = lift_hyperplane(tc, bd, &sd, &wr, &phibar0, &gamma1, level)?;
            if lift.gamma < floor_gamma {
                return Err(violation(level, "γ >= γ(l,t)", fmt_rat(&lift.gamma)));
            }
            let rec = &mut transcript[idx];
            rec.extension = Some(lift.trace);
            rec.phi_bar = lift.phi_bar.clone();
            rec.gamma = lift.gamma.clone();
            Ok((lift.phi_bar, lift.gamma))
        }
    }
}

/// Result of an independent certificate check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub ok: bool,
    pub reasons: Vec<String>,
}

/// Re-checks `(φ̄, γ)` from scratch, ignoring the transcript.
pub fn verify_certificate(
    tc: &ToricContraction,
    pair: &GPair,
    phi_bar: &IntVector,
    gamma_claim: &Rat,
) -> Verification {
    let mut reasons = Vec::new();
    let bd = match box_square(tc, pair) {
        Ok(bd) => bd,
        Err(e) => {
            return Verification {
                ok: false,
                reasons: vec![format!("cannot build □: {e}")],
            }
        }
    };
    if phi_bar.len() != tc.base_rank() {
        reasons.push(format!("φ̄ has length {}, base rank is {}", phi_bar.len(), tc.base_rank()));
        return Verification { ok: false, reasons };
    }
    if phi_bar.is_zero() {
        reasons.push("φ̄ is zero".into());
    } else if !is_primitive(phi_bar) {
        reasons.push(format!("φ̄ = {phi_bar} is not primitive"));
    }
    if !tc.sigma_bar().dual().contains_int(phi_bar) {
        reasons.push(format!("φ̄ = {phi_bar} is not in the dual of the base cone"));
    }
    if !gamma_claim.is_positive() {
        reasons.push("γ is not positive".into());
    }
    let m = tc.pi().pullback(phi_bar).to_rat().scale(&-gamma_claim.clone());
    if !bd.square.contains(&m) {
        reasons.push(format!("-γ π*φ̄ = {m} is not in □"));
    }
    match mld_over_fiber(tc, &bd) {
        Ok(Mld::Positive { value, .. }) => {
            let floor = gamma(tc.rank() as u32, &value);
            if gamma_claim < &floor {
                reasons.push(format!(
                    "γ = {} is below γ(d, mld) = {}",
                    fmt_rat(gamma_claim),
                    fmt_rat(&floor)
                ));
            }
        }
        Ok(Mld::NotPositive) => reasons.push("mld over the central fiber is not positive".into()),
        Err(e) => reasons.push(format!("cannot compute mld: {e}")),
    }
    Verification {
        ok: reasons.is_empty(),
        reasons,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, RatVector};
    use crate::polyhedral::SupportSet;

    fn iv(v: &[i64]) -> IntVector {
        IntVector::from_i64(v)
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(1, &rat(7, 5)), rat(7, 5));
        assert_eq!(gamma(2, &rat(1, 1)), rat(1, 4));
        assert_eq!(gamma(3, &rat(1, 1)), rat(1, 324));
        for d in 1..=6 {
            assert_eq!(gamma(d, &rat(3, 7)), gamma_closed_form(d, &rat(3, 7)));
        }
    }

    #[test]
    fn width_examples() {
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
        let w = width_functional(&u, &rat(1, 1), 2).unwrap();
        assert_eq!(w.phi, iv(&[1, 1]));
        assert_eq!((w.lo, w.hi), (rat(0, 1), rat(1, 1)));

        let s = RatPolyhedron::from_vrep(
            2,
            &[
                RatVector::from_i64(&[0, 0]),
                RatVector::from_i64(&[1, 0]),
                RatVector::from_i64(&[0, 1]),
            ],
            &[],
            &[],
        )
        .unwrap();
        let w = width_functional(&s, &rat(2, 1), 2).unwrap();
        assert_eq!(w.phi, iv(&[1, 0]));
        assert_eq!(w.w, rat(1, 1));

        let seg = RatPolyhedron::from_vrep(1, &[RatVector::zeros(1), RatVector::from_ratios(&[(3, 2)])], &[], &[])
            .unwrap();
        let w = width_functional(&seg, &rat(2, 3), 1).unwrap();
        assert_eq!(w.phi, iv(&[1]));
        assert_eq!(w.w, rat(3, 2));
    }

    #[test]
    fn subdivision_of_quadrant() {
        let fan = Fan::new(2, vec![iv(&[0, 1]), iv(&[1, 0])], vec![vec![0, 1]]).unwrap();
        let sd = subdivide_fan(&fan, &iv(&[1, -1])).unwrap();
        assert_eq!(sd.new_rays.len(), 1);
        assert_eq!(sd.new_rays[0].ray, iv(&[1, 1]));
        assert_eq!(sd.new_rays[0].q, Int::one());
        assert_eq!(sd.fan.max_cones().len(), 2);

        let unchanged = subdivide_fan(&fan, &iv(&[1, 1])).unwrap();
        assert!(unchanged.new_rays.is_empty());
        assert_eq!(unchanged.fan.rays().len(), 2);
    }

    #[test]
    fn subdivision_with_multiplicity() {
        let fan = Fan::new(2, vec![iv(&[0, 1]), iv(&[2, -1])], vec![vec![0, 1]]).unwrap();
        let sd = subdivide_fan(&fan, &iv(&[1, 1])).unwrap();
        // φ(e₁) = 1 on (0,1), φ(e₂) = 1 on (2,-1): no crossing
        assert!(sd.new_rays.is_empty());
        let sd = subdivide_fan(&fan, &iv(&[0, 1])).unwrap();
        // φ(2,-1) = -1 < 0 < 1 = φ(0,1): 1·(2,-1) + 1·(0,1) = (2,0) = 2·(1,0)
        assert_eq!(sd.new_rays[0].ray, iv(&[1, 0]));
        assert_eq!(sd.new_rays[0].q, Int::from(2));
    }

    #[test]
    fn extension_hand_trace() {
        let c = RatPolyhedron::from_vrep(
            2,
            &[
                RatVector::from_i64(&[0, 0]),
                RatVector::from_i64(&[1, 0]),
                RatVector::from_i64(&[0, 1]),
            ],
            &[],
            &[],
        )
        .unwrap();
        let gens = vec![iv(&[1, 0]), iv(&[0, 1])];
        // ker(1,-1) has HNF basis (1,1); φ₀((1,1)) = 1, C₀ = [0, 1/2]·(1,1)
        let tr = extend_functional(&gens, &c, &iv(&[1, -1]), &iv(&[1]), &rat(1, 2)).unwrap();
        assert_eq!(tr.q, Int::one());
        assert_eq!(tr.phi_prime, iv(&[1, 0]));
        let tr2 = extend_functional(&gens, &c, &iv(&[1, -1]), &iv(&[2]), &rat(1, 1)).unwrap();
        assert_eq!(tr2.q, Int::one());
        assert_eq!(tr2.phi_prime, iv(&[2, 0]));
    }

    fn affine_space(n: usize) -> ToricContraction {
        let rays: Vec<IntVector> = (0..n).map(|i| IntVector::unit(n, i)).collect();
        let fan = Fan::new(n, rays, vec![(0..n).collect()]).unwrap();
        ToricContraction::new(fan, LatticeHom::new(IntMatrix::identity(n)), None).unwrap()
    }

    #[test]
    fn find_on_affine_plane() {
        let tc = affine_space(2);
        let pair = GPair::trivial(&tc);
        let cert = find_hyperplane(&tc, &pair).unwrap();
        assert_eq!(cert.phi_bar, iv(&[1, 0]));
        assert_eq!(cert.gamma, rat(1, 1));
        assert_eq!(cert.transcript[0].case, LevelCase::Boundary);
        assert!(verify_certificate(&tc, &pair, &cert.phi_bar, &cert.gamma).ok);
    }

    #[test]
    fn find_on_affine_space() {
        let tc = affine_space(3);
        let pair = GPair::trivial(&tc);
        let cert = find_hyperplane(&tc, &pair).unwrap();
        assert_eq!(cert.mld, rat(3, 1));
        assert!(cert.gamma >= gamma(3, &rat(3, 1)));
        assert!(verify_certificate(&tc, &pair, &cert.phi_bar, &cert.gamma).ok);
    }

    #[test]
    fn find_on_halfplane() {
        let fan = Fan::new(
            2,
            vec![iv(&[1, -1]), iv(&[0, 1]), iv(&[-1, 1])],
            vec![vec![0, 1], vec![1, 2]],
        )
        .unwrap();
        let tc = ToricContraction::new(fan, LatticeHom::new(IntMatrix::from_i64(&[&[1, 1]])), None)
            .unwrap();
        let pair = GPair::trivial(&tc);
        let cert = find_hyperplane(&tc, &pair).unwrap();
        assert_eq!(cert.phi_bar, iv(&[1]));
        assert_eq!(cert.gamma, rat(1, 1));
        assert_eq!(cert.transcript[0].phi, iv(&[1, 1]));
    }

    #[test]
    fn find_on_line_germ() {
        let tc = affine_space(1);
        for (p, q) in [(1, 3), (1, 2), (2, 3)] {
            let a = rat(p, q);
            let pair = GPair::new(&tc, vec![Rat::one() - &a], SupportSet::origin(1), vec![]).unwrap();
            let cert = find_hyperplane(&tc, &pair).unwrap();
            assert_eq!(cert.gamma, a);
            assert_eq!(cert.transcript[0].case, LevelCase::Line);
        }
    }

    #[test]
    fn verify_rejects_large_gamma() {
        let tc = affine_space(2);
        let pair = GPair::trivial(&tc);
        let v = verify_certificate(&tc, &pair, &iv(&[1, 0]), &rat(3, 2));
        assert!(!v.ok);
        let v = verify_certificate(&tc, &pair, &iv(&[-1, 0]), &rat(1, 2));
        assert!(!v.ok);
    }
}
