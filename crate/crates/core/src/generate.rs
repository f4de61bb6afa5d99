//! Seeded random instances of rank at most 3 satisfying the hypotheses of
//! the hyperplane search (nef over the base, g-lc, positive mld).

use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hyperplane::subdivide_fan;
use crate::lattice::{is_primitive, IntMatrix, LatticeHom};
use crate::linalg::rank_int;
use crate::num::{rat, IntVector, Rat, RatVector};
use crate::polyhedral::SupportSet;
use crate::toric::{box_square, is_glc, mld_over_fiber, Fan, GPair, GeneralTerm, Mld, ToricContraction};

/// Instance families; [`random_instance`] picks one from the seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Independent boundary coefficients and a random `A`.
    Generic,
    /// Coefficients from a random convex piecewise-linear function.
    Convex,
    /// Convex coefficients pinching `U` along the fiber.
    Pinched,
}

impl Family {
    pub fn for_seed(seed: u64) -> Self {
        [Family::Generic, Family::Convex, Family::Pinched][(seed % 3) as usize]
    }
}

#[derive(Clone, Debug)]
pub struct GenParams {
    pub max_rank: usize,
    pub max_cuts: usize,
    pub max_tries: usize,
    /// Probability of cutting a tall ray into a fibered fan.
    pub tall_ratio: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_rank: 3,
            max_cuts: 2,
            max_tries: 200,
            tall_ratio: 0.5,
        }
    }
}

fn random_primitive(rng: &mut ChaCha8Rng, n: usize, r: i64) -> IntVector {
    loop {
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-r..=r)).collect();
        let v = IntVector::from_i64(&v);
        if is_primitive(&v) {
            return v;
        }
    }
}

/// Generators of a random simplicial full-dimensional cone in `ℤ^k`.
fn random_base_cone(rng: &mut ChaCha8Rng, k: usize) -> Vec<IntVector> {
    if k == 1 {
        return vec![IntVector::from_i64(&[1])];
    }
    loop {
        let gens: Vec<IntVector> = (0..k)
            .map(|i| {
                let mut v = random_primitive(rng, k, 1);
                v.0[i] = 1.into();
                if is_primitive(&v) {
                    v
                } else {
                    IntVector::unit(k, i)
                }
            })
            .collect();
        if rank_int(&gens, k) == k {
            return gens;
        }
    }
}

/// A fibered fan over `σ̄` in `ℤ^n`: the product of `σ̄` with the complete
/// fan of coordinate orthants in the fiber, sheared along the base and cut
/// by random hyperplanes.
fn random_contraction(rng: &mut ChaCha8Rng, p: &GenParams, family: Family) -> Option<ToricContraction> {
    let pinched = family == Family::Pinched;
    let n = rng.gen_range(if pinched { 2 } else { 1 }..=p.max_rank.max(2));
    let k = rng.gen_range(1..=if pinched { n - 1 } else { n });
    let f = n - k;
    let base = random_base_cone(rng, k);
    let shear: Vec<Vec<i64>> = (0..f).map(|_| (0..k).map(|_| rng.gen_range(-1..=1)).collect()).collect();
    let mut rays = Vec::new();
    for g in &base {
        let mut v = g.0.clone();
        for row in &shear {
            let s: i64 = row
                .iter()
                .zip(g.iter())
                .map(|(c, x)| c * i64::try_from(x).expect("small"))
                .sum();
            v.push(s.into());
        }
        rays.push(IntVector(v));
    }
    for j in 0..f {
        rays.push(IntVector::unit(n, k + j));
        let mut m = IntVector::unit(n, k + j);
        m.0[k + j] = (-1).into();
        rays.push(m);
    }
    let mut cones = Vec::new();
    for mask in 0..(1usize << f) {
        let mut c: Vec<usize> = (0..k).collect();
        for j in 0..f {
            c.push(k + 2 * j + ((mask >> j) & 1));
        }
        cones.push(c);
    }
    let mut fan = Fan::new(n, rays, cones).ok()?;
    if f > 0 && family == Family::Generic && rng.gen_bool(p.tall_ratio) {
        // a steep wall through the first fiber direction yields a tall ray
        let mut phi = vec![0i64; n];
        phi[0] = 1;
        phi[k] = -rng.gen_range(2..=6);
        fan = subdivide_fan(&fan, &IntVector::from_i64(&phi)).ok()?.fan;
    }
    let cuts = rng.gen_range(0..=if pinched { 1 } else { p.max_cuts });
    for _ in 0..cuts {
        let r = rng.gen_range(1..=4);
        let phi = random_primitive(rng, n, r);
        if phi.is_zero() {
            continue;
        }
        fan = subdivide_fan(&fan, &phi).ok()?.fan;
    }
    let mut pi = IntMatrix::identity(n).rows();
    pi.truncate(k);
    ToricContraction::new(fan, LatticeHom::new(IntMatrix::from_rows(&pi, n)), Some(&base)).ok()
}

fn random_pair(rng: &mut ChaCha8Rng, tc: &ToricContraction) -> Option<GPair> {
    let n = tc.rank();
    let coeffs = [
        rat(0, 1),
        rat(0, 1),
        rat(0, 1),
        rat(1, 4),
        rat(1, 3),
        rat(1, 2),
        rat(2, 3),
        rat(3, 4),
        rat(4, 5),
        rat(9, 10),
    ];
    let high = [rat(3, 4), rat(4, 5), rat(5, 6), rat(9, 10)];
    let b: Vec<Rat> = tc
        .fan()
        .rays()
        .iter()
        .map(|r| {
            let h = tc.pi().apply(r).iter().map(|x| x.abs()).max().unwrap_or_default();
            if h >= 2.into() && rng.gen_bool(0.7) {
                high.choose(rng).expect("nonempty").clone()
            } else {
                coeffs.choose(rng).expect("nonempty").clone()
            }
        })
        .collect();
    let mut pts = vec![RatVector::zeros(n)];
    if rng.gen_bool(0.4) {
        let halves = [rat(-1, 2), rat(0, 1), rat(1, 2), rat(-1, 3), rat(1, 3)];
        pts.push(RatVector((0..n).map(|_| halves.choose(rng).expect("nonempty").clone()).collect()));
    }
    let a = SupportSet::new(pts).ok()?;
    let mut general = Vec::new();
    if rng.gen_bool(0.2) {
        // χ^{π*m} for m a generator of the dual of σ̄ is regular on X
        let dual = tc.sigma_bar().dual();
        let m = dual.rays().choose(rng)?.clone();
        let pt = tc.pi().pullback(&m);
        general.push(GeneralTerm {
            coeff: [rat(1, 4), rat(1, 2)].choose(rng).expect("nonempty").clone(),
            set: SupportSet::new(vec![pt.to_rat()]).ok()?,
        });
    }
    GPair::new(tc, b, a, general).ok()
}

fn admissible(tc: &ToricContraction, pair: &GPair) -> bool {
    let Ok(bd) = box_square(tc, pair) else {
        return false;
    };
    is_glc(&bd) && matches!(mld_over_fiber(tc, &bd), Ok(Mld::Positive { .. }))
}

/// `1 - b_e = max_j ⟨u_j, e⟩` on the rays, after refining the fan along the
/// walls `u_i = u_j` so the maximum is linear on every cone.
fn convex_pair(rng: &mut ChaCha8Rng, tc: &ToricContraction, pinched: bool) -> Option<(ToricContraction, GPair)> {
    let n = tc.rank();
    let vals = [
        rat(-1, 1),
        rat(-1, 2),
        rat(-1, 5),
        rat(-1, 6),
        rat(0, 1),
        rat(1, 6),
        rat(1, 5),
        rat(1, 4),
        rat(1, 2),
        rat(1, 1),
    ];
    let k = tc.base_rank();
    let mut us: Vec<RatVector> = Vec::new();
    if pinched {
        // opposite unit slopes in the fiber pinch U there; base parts
        // summing to a small δ make U long over the base
        let small = [rat(1, 6), rat(1, 5), rat(1, 4)];
        let deltas = [rat(1, 30), rat(1, 20), rat(1, 12), rat(1, 10)];
        let signs: Vec<Rat> = (k..n).map(|_| [rat(-1, 1), rat(1, 1)].choose(rng).expect("nonempty").clone()).collect();
        let v: Vec<Rat> = (0..k).map(|_| small.choose(rng).expect("nonempty").clone()).collect();
        let d = deltas.choose(rng).expect("nonempty");
        let mut u1 = v.clone();
        u1.extend(signs.iter().cloned());
        let mut u2: Vec<Rat> = v.iter().map(|x| d - x).collect();
        u2.extend(signs.iter().map(|x| -x));
        us.push(RatVector(u1));
        us.push(RatVector(u2));
    }
    let count = if us.is_empty() { rng.gen_range(1..=3) } else { rng.gen_range(0..=1) };
    for _ in 0..count {
        us.push(RatVector((0..n).map(|_| vals.choose(rng).expect("nonempty").clone()).collect()));
    }
    let count = us.len();
    let mut fan = tc.fan().clone();
    for i in 0..count {
        for j in i + 1..count {
            let wall = us[i].sub(&us[j]);
            if !wall.is_zero() {
                fan = subdivide_fan(&fan, &wall.primitive_multiple()).ok()?.fan;
            }
        }
    }
    let tc = ToricContraction::new(fan, tc.pi().clone(), Some(tc.sigma_bar().rays())).ok()?;
    let mut b = Vec::new();
    for r in tc.fan().rays() {
        let g = us.iter().map(|u| r.dot_rat(u)).max().expect("nonempty");
        if g.is_negative() || g > rat(1, 1) {
            return None;
        }
        b.push(rat(1, 1) - g);
    }
    let pair = GPair::new(&tc, b, SupportSet::origin(n), vec![]).ok()?;
    Some((tc, pair))
}

/// A random instance for `seed` from [`Family::for_seed`]; `None` if no
/// admissible instance appeared within `max_tries` draws.
pub fn random_instance(seed: u64, p: &GenParams) -> Option<(ToricContraction, GPair)> {
    random_instance_in(Family::for_seed(seed), seed, p)
}

pub fn random_instance_in(family: Family, seed: u64, p: &GenParams) -> Option<(ToricContraction, GPair)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..p.max_tries {
        let Some(tc) = random_contraction(&mut rng, p, family) else {
            continue;
        };
        let drawn = match family {
            Family::Generic => random_pair(&mut rng, &tc).map(|pair| (tc, pair)),
            Family::Convex => convex_pair(&mut rng, &tc, false),
            Family::Pinched => convex_pair(&mut rng, &tc, true),
        };
        let Some((tc, pair)) = drawn else {
            continue;
        };
        if admissible(&tc, &pair) {
            return Some((tc, pair));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_reproducible() {
        let p = GenParams::default();
        for seed in 0..5 {
            let a = random_instance(seed, &p).expect("admissible instance");
            let b = random_instance(seed, &p).unwrap();
            assert_eq!(a, b);
        }
    }
}
