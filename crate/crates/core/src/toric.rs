//! Toric contraction germs `f: X -> Y ∋ P` and generalized pair structures
//! on them: Cartier and nef tests, the polyhedron □ with its polar U, log
//! discrepancies, log canonicity, the mld over the central fiber and log
//! canonical thresholds of pulled back hyperplanes.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{dim_check, Error, Result};
use crate::lattice::{is_primitive, quotient_by_span, IntMatrix, LatticeHom, Sublattice};
use crate::linalg::solve;
use crate::num::{Int, IntVector, Rat, RatVector};
use crate::polyhedral::{Halfspace, RatCone, RatPolyhedron, SupportSet};

/// A fan whose maximal cones are full-dimensional and pointed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    rank: usize,
    rays: Vec<IntVector>,
    max_cones: Vec<Vec<usize>>,
    cones: Vec<RatCone>,
}

impl Fan {
    pub fn new(rank: usize, rays: Vec<IntVector>, max_cones: Vec<Vec<usize>>) -> Result<Self> {
        for (i, r) in rays.iter().enumerate() {
            dim_check(rank, r.len())?;
            if !is_primitive(r) {
                return Err(Error::InvalidFan(format!("ray {i} = {r} is not primitive")));
            }
        }
        let distinct: BTreeSet<&IntVector> = rays.iter().collect();
        if distinct.len() != rays.len() {
            return Err(Error::InvalidFan("repeated ray".into()));
        }
        if max_cones.is_empty() {
            return Err(Error::InvalidFan("no maximal cones".into()));
        }
        let mut used = vec![false; rays.len()];
        let mut cones = Vec::with_capacity(max_cones.len());
        let mut normalized = Vec::with_capacity(max_cones.len());
        for (ci, c) in max_cones.iter().enumerate() {
            let mut idx = c.clone();
            idx.sort_unstable();
            idx.dedup();
            if let Some(&bad) = idx.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::InvalidFan(format!("cone {ci} uses unknown ray {bad}")));
            }
            let gens: Vec<IntVector> = idx.iter().map(|&i| rays[i].clone()).collect();
            let cone = RatCone::from_generators(rank, &gens, &[])?;
            if !cone.is_pointed() {
                return Err(Error::InvalidFan(format!("cone {ci} is not strongly convex")));
            }
            if !cone.is_full_dim() {
                return Err(Error::InvalidFan(format!("maximal cone {ci} is not full-dimensional")));
            }
            let extremal: BTreeSet<&IntVector> = cone.rays().iter().collect();
            let given: BTreeSet<&IntVector> = gens.iter().collect();
            if extremal != given {
                return Err(Error::InvalidFan(format!(
                    "cone {ci} lists generators that are not extremal rays"
                )));
            }
            for &i in &idx {
                used[i] = true;
            }
            cones.push(cone);
            normalized.push(idx);
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::InvalidFan(format!("ray {i} lies in no maximal cone")));
        }
        let fan = Fan {
            rank,
            rays,
            max_cones: normalized,
            cones,
        };
        fan.check_face_intersections()?;
        Ok(fan)
    }

    fn check_face_intersections(&self) -> Result<()> {
        for i in 0..self.cones.len() {
            for j in i + 1..self.cones.len() {
                let inter = self.cones[i].intersect(&self.cones[j])?;
                if inter.is_zero() {
                    continue;
                }
                let p = inter.ray_sum().to_rat();
                for (a, b) in [(i, j), (j, i)] {
                    let face = self.cones[a].minimal_face_rays(&p);
                    if face
                        .iter()
                        .any(|&k| !self.cones[b].contains_int(&self.cones[a].rays()[k]))
                    {
                        return Err(Error::InvalidFan(format!(
                            "cones {i} and {j} do not meet along a common face"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn cone(&self, i: usize) -> &RatCone {
        &self.cones[i]
    }

    pub fn cones(&self) -> &[RatCone] {
        &self.cones
    }

    pub fn ray_index(&self, v: &IntVector) -> Option<usize> {
        self.rays.iter().position(|r| r == v)
    }

    pub fn support_contains(&self, v: &RatVector) -> bool {
        self.cones.iter().any(|c| c.contains(v))
    }

    pub fn containing_cone(&self, v: &RatVector) -> Option<usize> {
        self.cones.iter().position(|c| c.contains(v))
    }

    /// Pairs of ray indices spanning a two-dimensional cone of the fan.
    pub fn two_cones(&self) -> Vec<(usize, usize)> {
        let mut out = BTreeSet::new();
        for c in &self.cones {
            for (a, b) in c.two_faces() {
                let ia = self.ray_index(&c.rays()[a]).expect("ray of the fan");
                let ib = self.ray_index(&c.rays()[b]).expect("ray of the fan");
                out.insert((ia.min(ib), ia.max(ib)));
            }
        }
        out.into_iter().collect()
    }
}

/// A proper toric contraction given by `π: N -> N̄` with `|Δ| = π⁻¹(σ̄)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricContraction {
    fan: Fan,
    pi: LatticeHom,
    sigma_bar: RatCone,
    support: RatCone,
}

impl ToricContraction {
    /// `sigma_bar` defaults to the cone generated by the images of the rays.
    pub fn new(fan: Fan, pi: LatticeHom, sigma_bar: Option<&[IntVector]>) -> Result<Self> {
        dim_check(fan.rank(), pi.source_rank())?;
        let k = pi.target_rank();
        if k == 0 {
            return Err(Error::ZeroDimensionalBase);
        }
        if !pi.is_surjective() {
            return Err(Error::InvalidContraction("projection is not surjective".into()));
        }
        let sigma_bar = match sigma_bar {
            Some(gens) => RatCone::from_generators(k, gens, &[])?,
            None => {
                let imgs: Vec<IntVector> = fan
                    .rays()
                    .iter()
                    .map(|r| pi.apply(r))
                    .filter(|v| !v.is_zero())
                    .collect();
                RatCone::from_generators(k, &imgs, &[])?
            }
        };
        if !sigma_bar.is_pointed() {
            return Err(Error::InvalidContraction("base cone is not strongly convex".into()));
        }
        if !sigma_bar.is_full_dim() {
            return Err(Error::InvalidContraction(
                "base cone is not full-dimensional (no invariant point)".into(),
            ));
        }
        let support = sigma_bar.preimage(&pi.matrix)?;
        let tc = ToricContraction {
            fan,
            pi,
            sigma_bar,
            support,
        };
        tc.check_support()?;
        Ok(tc)
    }

    /// `|Δ| = π⁻¹(σ̄)`: every ray maps into σ̄ and every wall of a maximal
    /// cone either lies on the boundary of π⁻¹(σ̄) or is shared.
    fn check_support(&self) -> Result<()> {
        for (i, r) in self.fan.rays().iter().enumerate() {
            if !self.support.contains_int(r) {
                return Err(Error::InvalidContraction(format!(
                    "support condition fails: ray {i} = {r} maps outside the base cone"
                )));
            }
        }
        for (ci, cone) in self.fan.cones().iter().enumerate() {
            for f in cone.facets() {
                let wall: Vec<usize> = cone
                    .rays()
                    .iter()
                    .filter(|r| f.dot(r).is_zero())
                    .map(|r| self.fan.ray_index(r).expect("ray of the fan"))
                    .collect();
                let on_boundary = self.support.facets().iter().any(|g| {
                    wall.iter()
                        .all(|&w| g.dot(&self.fan.rays()[w]).is_zero())
                });
                if on_boundary {
                    continue;
                }
                let shared = self
                    .fan
                    .max_cones()
                    .iter()
                    .enumerate()
                    .any(|(cj, c)| cj != ci && wall.iter().all(|w| c.contains(w)));
                if !shared {
                    return Err(Error::InvalidContraction(format!(
                        "support condition fails: |Δ| ≠ π⁻¹(σ̄) near a wall of cone {ci}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn pi(&self) -> &LatticeHom {
        &self.pi
    }

    pub fn sigma_bar(&self) -> &RatCone {
        &self.sigma_bar
    }

    /// The support `|Δ|` as a cone.
    pub fn support(&self) -> &RatCone {
        &self.support
    }

    pub fn rank(&self) -> usize {
        self.fan.rank()
    }

    pub fn base_rank(&self) -> usize {
        self.pi.target_rank()
    }

    /// Valuations with center inside the central fiber are the lattice points
    /// of `int |Δ|`.
    pub fn centered_in_fiber(&self, e: &IntVector) -> bool {
        self.support.interior_contains(&e.to_rat())
    }
}

/// A general boundary term `b_j · S_j` with `S_j` general in the system given by `A_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralTerm {
    pub coeff: Rat,
    pub set: SupportSet,
}

/// Invariant boundary coefficients on the rays, the finite set `A` inducing
/// the b-divisor `𝐃`, and general boundaries still to be folded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GPair {
    b: Vec<Rat>,
    a: SupportSet,
    general: Vec<GeneralTerm>,
}

impl GPair {
    pub fn new(tc: &ToricContraction, b: Vec<Rat>, a: SupportSet, general: Vec<GeneralTerm>) -> Result<Self> {
        let n = tc.rank();
        if b.len() != tc.fan().rays().len() {
            return Err(Error::InvalidPair(format!(
                "{} boundary coefficients for {} rays",
                b.len(),
                tc.fan().rays().len()
            )));
        }
        for (i, x) in b.iter().enumerate() {
            if x.is_negative() || x > &Rat::one() {
                return Err(Error::InvalidPair(format!(
                    "coefficient of ray {i} is {} (must lie in [0,1])",
                    crate::num::fmt_rat(x)
                )));
            }
        }
        dim_check(n, a.dim())?;
        for (j, g) in general.iter().enumerate() {
            dim_check(n, g.set.dim())?;
            if !g.set.is_integral() {
                return Err(Error::InvalidPair(format!("general term {j} has non-integral points")));
            }
        }
        Ok(GPair { b, a, general })
    }

    /// `B = 0`, `A = {0}`.
    pub fn trivial(tc: &ToricContraction) -> Self {
        GPair {
            b: vec![Rat::zero(); tc.fan().rays().len()],
            a: SupportSet::origin(tc.rank()),
            general: vec![],
        }
    }

    pub fn boundary(&self) -> &[Rat] {
        &self.b
    }

    pub fn bdiv(&self) -> &SupportSet {
        &self.a
    }

    pub fn general(&self) -> &[GeneralTerm] {
        &self.general
    }

    pub fn is_folded(&self) -> bool {
        self.general.is_empty()
    }
}

/// Fixed part (coefficients on the rays) and mobile part of the invariant
/// linear system induced by `A` and the divisor with coefficients `l`.
pub fn fix_mov(fan: &Fan, a: &SupportSet, l: &[Rat]) -> Result<(Vec<Rat>, SupportSet)> {
    dim_check(fan.rank(), a.dim())?;
    dim_check(fan.rays().len(), l.len())?;
    let fix = fan
        .rays()
        .iter()
        .zip(l)
        .map(|(e, li)| Ok(a.support_value_int(e)? + li))
        .collect::<Result<Vec<Rat>>>()?;
    Ok((fix, a.clone()))
}

/// Replaces general boundaries by generalized ones: fixed parts go into the
/// invariant boundary and `A` absorbs `b_j A_j`. Each `A_j` is read with
/// `L = 0`, so it must consist of characters regular on `X`.
pub fn fold_general(tc: &ToricContraction, pair: &GPair) -> Result<GPair> {
    let fan = tc.fan();
    let mut b = pair.b.clone();
    let mut a = pair.a.clone();
    let zero_l = vec![Rat::zero(); fan.rays().len()];
    for (j, g) in pair.general.iter().enumerate() {
        if g.coeff.is_negative() {
            return Err(Error::InvalidPair(format!("general coefficient {j} is negative")));
        }
        for p in g.set.points() {
            if !tc.support().dual().contains(p) {
                return Err(Error::InvalidPair(format!(
                    "general term {j}: character {p} is not regular on X"
                )));
            }
        }
        let (fix, mov) = fix_mov(fan, &g.set, &zero_l)?;
        for (bi, fi) in b.iter_mut().zip(&fix) {
            *bi += &g.coeff * fi;
        }
        a = a.minkowski_sum(&mov.scale(&g.coeff))?;
    }
    if let Some(i) = b.iter().position(|x| x > &Rat::one()) {
        return Err(Error::InvalidPair(format!(
            "folding pushes the coefficient of ray {i} above 1"
        )));
    }
    Ok(GPair {
        b,
        a,
        general: vec![],
    })
}

/// `ψ_σ` for every maximal cone, with `⟨ψ_σ, e_i⟩ - h_A(e_i) = 1 - b_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartierData {
    pub psi: Vec<RatVector>,
}

fn ray_targets(tc: &ToricContraction, pair: &GPair) -> Result<Vec<Rat>> {
    tc.fan()
        .rays()
        .iter()
        .zip(&pair.b)
        .map(|(e, b)| Ok(Rat::one() - b + pair.a.support_value_int(e)?))
        .collect()
}

pub fn cartier_psi(tc: &ToricContraction, pair: &GPair) -> Result<CartierData> {
    let pair = fold_general(tc, pair)?;
    let targets = ray_targets(tc, &pair)?;
    let n = tc.rank();
    let mut psi = Vec::new();
    for (ci, cone) in tc.fan().max_cones().iter().enumerate() {
        let rows: Vec<Vec<Rat>> = cone.iter().map(|&i| tc.fan().rays()[i].to_rat().0).collect();
        let rhs: Vec<Rat> = cone.iter().map(|&i| targets[i].clone()).collect();
        let sol = solve(&rows, &rhs, n).ok_or(Error::NotCartier(ci))?;
        psi.push(RatVector(sol));
    }
    Ok(CartierData { psi })
}

/// `-(K+B+𝐃_X)` is nef over Y: `⟨ψ_σ, e⟩ ≤ 1 - b_e + h_A(e)` for all σ and rays e.
pub fn is_f_nef(tc: &ToricContraction, pair: &GPair, psi: &CartierData) -> Result<bool> {
    let pair = fold_general(tc, pair)?;
    let targets = ray_targets(tc, &pair)?;
    Ok(psi.psi.iter().all(|p| {
        tc.fan()
            .rays()
            .iter()
            .zip(&targets)
            .all(|(e, t)| &e.dot_rat(p) <= t)
    }))
}

/// The polar side of □, available when the pair is g-lc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualData {
    pub u: RatPolyhedron,
    pub sigma0: RatCone,
    pub l: usize,
}

/// □ together with everything derived from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxData {
    pub pair: GPair,
    pub psi: CartierData,
    pub square: RatPolyhedron,
    pub dual: Option<DualData>,
}

impl BoxData {
    pub fn dual(&self) -> Result<&DualData> {
        self.dual.as_ref().ok_or(Error::NotGlc)
    }

    pub fn u(&self) -> Result<&RatPolyhedron> {
        Ok(&self.dual()?.u)
    }

    pub fn sigma0(&self) -> Result<&RatCone> {
        Ok(&self.dual()?.sigma0)
    }

    pub fn l(&self) -> Result<usize> {
        Ok(self.dual()?.l)
    }
}

/// `□_{-K-B-𝐃_X} = {m : ⟨m, e_i⟩ ≥ -(1 - b_i + h_A(e_i))}`.
pub fn anticanonical_polyhedron(tc: &ToricContraction, pair: &GPair) -> Result<RatPolyhedron> {
    let targets = ray_targets(tc, pair)?;
    let ineqs: Vec<Halfspace> = tc
        .fan()
        .rays()
        .iter()
        .zip(&targets)
        .map(|(e, t)| Halfspace::new(e.clone(), -t))
        .collect();
    RatPolyhedron::from_hrep(tc.rank(), &ineqs, &[])
}

pub fn box_square(tc: &ToricContraction, pair: &GPair) -> Result<BoxData> {
    let pair = fold_general(tc, pair)?;
    let psi = cartier_psi(tc, &pair)?;
    if !is_f_nef(tc, &pair, &psi)? {
        return Err(Error::NotNef);
    }
    let square = pair
        .a
        .convex_hull()
        .minkowski_sum(&anticanonical_polyhedron(tc, &pair)?)?;
    let dual = if square.contains_origin() {
        let u = square.polar_dual()?;
        let sigma0 = u.recession_cone();
        let l = tc.rank() - sigma0.dimension();
        Some(DualData { u, sigma0, l })
    } else {
        None
    };
    Ok(BoxData {
        pair,
        psi,
        square,
        dual,
    })
}

/// Prop: g-lc iff `0 ∈ □`.
pub fn is_glc(bd: &BoxData) -> bool {
    bd.square.contains_origin()
}

/// `a_{E_e} = -h_□(e)` for `e ∈ |Δ|`.
pub fn log_discrepancy(tc: &ToricContraction, bd: &BoxData, e: &IntVector) -> Result<Rat> {
    dim_check(tc.rank(), e.len())?;
    if !tc.support().contains_int(e) {
        return Err(Error::NotInSupport(e.to_string()));
    }
    let h = bd
        .square
        .min_value(&e.to_rat())
        .expect("□ is bounded below on |Δ|");
    Ok(-h)
}

/// The same value from the per-cone formula `⟨ψ_σ, e⟩ - h_A(e)`.
pub fn log_discrepancy_by_cone(tc: &ToricContraction, bd: &BoxData, e: &IntVector) -> Result<Rat> {
    dim_check(tc.rank(), e.len())?;
    let er = e.to_rat();
    let ci = tc
        .fan()
        .containing_cone(&er)
        .ok_or_else(|| Error::NotInSupport(e.to_string()))?;
    Ok(bd.psi.psi[ci].dot(&er) - bd.pair.a.support_value(&er)?)
}

/// The quotient `p: N -> N' = N / N ∩ (σ₀ - σ₀)` and the image `U' = p(U)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LcQuotient {
    pub projection: IntMatrix,
    pub section: IntMatrix,
    pub u_prime: RatPolyhedron,
}

pub fn lc_quotient(tc: &ToricContraction, bd: &BoxData) -> Result<LcQuotient> {
    let d = bd.dual()?;
    let mut gens: Vec<IntVector> = d.sigma0.rays().to_vec();
    gens.extend(d.sigma0.lines().iter().cloned());
    let sat = Sublattice::saturation_of(tc.rank(), &gens)?;
    let q = quotient_by_span(tc.rank(), &sat)?;
    let projection = q.projection.matrix.clone();
    let u_prime = d.u.image(&projection)?;
    Ok(LcQuotient {
        projection,
        section: q.section,
        u_prime,
    })
}

/// Outcome of the mld computation over the central fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mld {
    /// The value and a lattice point of `N'` attaining it.
    Positive { value: Rat, witness: IntVector },
    NotPositive,
}

impl Mld {
    pub fn value(&self) -> Option<&Rat> {
        match self {
            Mld::Positive { value, .. } => Some(value),
            Mld::NotPositive => None,
        }
    }
}

/// g-mld over `f⁻¹P`, computed in the quotient `N'` where `U'` is compact.
///
/// For `x ∈ int cone(U')` membership `x ∈ int(tU')` is `gauge(x) < t`, and
/// `N ∩ int(tU) = ∅` iff `N' ∩ int(tU') = ∅` (the forward direction is the
/// lifting argument, the converse holds because `p` maps `int(tU)` into
/// `int(tU')`). So the mld is the least gauge of a lattice point of
/// `int cone(U')`.
pub fn mld_over_fiber(tc: &ToricContraction, bd: &BoxData) -> Result<Mld> {
    let d = bd.dual()?;
    if d.l == 0 {
        return Ok(Mld::NotPositive);
    }
    let lq = lc_quotient(tc, bd)?;
    let up = &lq.u_prime;
    if !up.is_compact() || !up.is_full_dim() {
        return Err(Error::Hypothesis("projected U is not a full-dimensional polytope".into()));
    }
    let origin = RatVector::zeros(d.l);
    if up.strict_interior_contains(&origin)? {
        return Ok(Mld::NotPositive);
    }
    let cone = up.conic_hull();
    let mut t: Option<Rat> = None;
    let candidates = tc
        .fan()
        .rays()
        .iter()
        .cloned()
        .chain(tc.fan().cones().iter().map(|c| c.ray_sum()));
    for x in candidates {
        let x = lq.projection.mul_vec(&x).to_rat();
        if x.is_zero() || !cone.interior_contains(&x) {
            continue;
        }
        if let Some(g) = up.gauge(&x)? {
            if t.as_ref().map_or(true, |b| &g < b) {
                t = Some(g);
            }
        }
    }
    let t = t.ok_or_else(|| Error::Hypothesis("no interior witness in cone(U')".into()))?;
    let region = up.scale(&t);
    let mut best: Option<(Rat, IntVector)> = None;
    for x in region.lattice_points()? {
        if x.is_zero() || !cone.interior_contains(&x.to_rat()) {
            continue;
        }
        let g = up.gauge(&x.to_rat())?.expect("interior point has finite gauge");
        if best.as_ref().map_or(true, |(b, _)| &g < b) {
            best = Some((g, x));
        }
    }
    let (value, witness) = best.expect("the witness itself qualifies");
    Ok(Mld::Positive { value, witness })
}

/// `sup{γ ≥ 0 : -γ π*(φ̄) ∈ □}`.
pub fn lct_pullback(tc: &ToricContraction, bd: &BoxData, phibar: &IntVector) -> Result<Rat> {
    dim_check(tc.base_rank(), phibar.len())?;
    if phibar.is_zero() {
        return Err(Error::ZeroFunctional);
    }
    if !tc.sigma_bar().dual().contains_int(phibar) {
        return Err(Error::UnboundedThreshold(format!(
            "{phibar} is not in the dual of the base cone"
        )));
    }
    if !is_glc(bd) {
        return Err(Error::NotGlc);
    }
    let phi = tc.pi().pullback(phibar).to_rat();
    let mut best: Option<Rat> = None;
    for h in bd.square.equations() {
        if !h.normal.dot_rat(&phi).is_zero() {
            return Ok(Rat::zero());
        }
    }
    for h in bd.square.inequalities() {
        let s = h.normal.dot_rat(&phi);
        if s.is_positive() {
            let bound = -&h.offset / s;
            if best.as_ref().map_or(true, |b| &bound < b) {
                best = Some(bound);
            }
        }
    }
    best.ok_or_else(|| Error::UnboundedThreshold(format!("no constraint bounds {phibar}")))
}

/// Brute-force mld: minimum log discrepancy over primitive points of
/// `[-r, r]^n ∩ int |Δ|`, with an attaining point.
pub fn oracle_mld(tc: &ToricContraction, bd: &BoxData, r: u32) -> Result<Option<(Rat, IntVector)>> {
    let n = tc.rank();
    let r = Int::from(r);
    let mut best: Option<(Rat, IntVector)> = None;
    let mut cur = IntVector(vec![-r.clone(); n]);
    loop {
        if is_primitive(&cur) && tc.centered_in_fiber(&cur) {
            let a = log_discrepancy(tc, bd, &cur)?;
            if best.as_ref().map_or(true, |(b, _)| &a < b) {
                best = Some((a, cur.clone()));
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(best);
            }
            i -= 1;
            if cur.0[i] < r {
                cur.0[i] += 1;
                for j in i + 1..n {
                    cur.0[j] = -r.clone();
                }
                break;
            }
        }
    }
}
