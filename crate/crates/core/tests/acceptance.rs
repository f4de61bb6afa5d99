//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_mld, int_vec, load, CORPUS};
use toricmld::generate::{random_instance, GenParams};
use toricmld::hyperplane::{
    extend_functional, find_hyperplane, gamma, gamma_closed_form, slice, subdivide_fan,
    verify_certificate, LevelCase, WidthCase, WidthResult,
};
use toricmld::lattice::{is_primitive, kernel_sublattice, LatticeHom};
use toricmld::num::{fmt_rat, rat, IntVector, Rat, RatVector};
use toricmld::toric::{box_square, lct_pullback, log_discrepancy, mld_over_fiber, oracle_mld, Mld};
use toricmld::{Fan, GPair, IntMatrix, RatCone, RatPolyhedron, SupportSet, ToricContraction};

type Outcome = Result<String, String>;

const RANDOM_INSTANCES: u64 = 120;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_rat(rng: &mut ChaCha8Rng) -> Rat {
    rat(rng.gen_range(1..=40), rng.gen_range(1..=17))
}

fn affine_space(n: usize) -> ToricContraction {
    let rays: Vec<IntVector> = (0..n).map(|i| IntVector::unit(n, i)).collect();
    let fan = Fan::new(n, rays, vec![(0..n).collect()]).unwrap();
    ToricContraction::new(fan, LatticeHom::new(IntMatrix::identity(n)), None).unwrap()
}

fn mld_of(tc: &ToricContraction, pair: &GPair) -> Result<Rat, String> {
    let bd = box_square(tc, pair).map_err(|e| e.to_string())?;
    match mld_over_fiber(tc, &bd).map_err(|e| e.to_string())? {
        Mld::Positive { value, .. } => Ok(value),
        Mld::NotPositive => Err("mld not positive".into()),
    }
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let a = random_rat(&mut rng);
        ensure(gamma(1, &a) == a, || format!("γ(1,{}) ≠ a", fmt_rat(&a)))?;
    }
    ensure(gamma(2, &rat(1, 1)) == rat(1, 4), || "γ(2,1) ≠ 1/4".into())?;
    ensure(gamma(3, &rat(1, 1)) == rat(1, 324), || "γ(3,1) ≠ 1/324".into())?;
    let mut checked = 0;
    for _ in 0..20 {
        let a = random_rat(&mut rng);
        for d in 1..=6 {
            // independent closed form: a^(2^(d-1)) / ∏ i^(2^(i-1))
            let mut num = a.clone();
            for _ in 1..d {
                num = &num * &num;
            }
            let mut den = Rat::one();
            for i in 1..=d {
                let mut f = rat(i as i64, 1);
                for _ in 1..i {
                    f = &f * &f;
                }
                den *= f;
            }
            let expect = num / den;
            ensure(gamma(d, &a) == expect && gamma_closed_form(d, &a) == expect, || {
                format!("d = {d}, a = {}", fmt_rat(&a))
            })?;
            ensure(gamma(d, &(&a + rat(1, 7))) > gamma(d, &a), || "γ not increasing".into())?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (d, a) pairs exact"))
}

fn criterion_2() -> Outcome {
    for d in 1..=3 {
        let tc = affine_space(d);
        let m = mld_of(&tc, &GPair::trivial(&tc))?;
        ensure(m == rat(d as i64, 1), || format!("mld of A^{d} is {}", fmt_rat(&m)))?;
    }
    for (name, a) in [
        ("a1_family_third.json", rat(1, 3)),
        ("a1_family_half.json", rat(1, 2)),
        ("a1_family.json", rat(2, 3)),
    ] {
        let (_, tc, pair) = load(name);
        let m = mld_of(&tc, &pair)?;
        ensure(m == a, || format!("{name}: mld {}", fmt_rat(&m)))?;
        let bd = box_square(&tc, &pair).unwrap();
        let l = lct_pullback(&tc, &bd, &int_vec(&[1])).map_err(|e| e.to_string())?;
        ensure(l == a, || format!("{name}: lct {}", fmt_rat(&l)))?;
    }
    let (_, tc, pair) = load("cax4.json");
    let m = mld_of(&tc, &pair)?;
    ensure(m == rat(2, 1), || format!("cax4 mld {}", fmt_rat(&m)))?;
    Ok("A^1..A^3, a1 family at 1/3, 1/2, 2/3, cax4".into())
}

/// Case-2 levels collected for criterion 6.
struct Case2Level {
    tc: ToricContraction,
    pair: GPair,
    phi: IntVector,
    w: Rat,
    max_discrepancy: Rat,
    u_matches: bool,
    invariant_point: bool,
    t: Rat,
}

fn instances() -> Vec<(String, ToricContraction, GPair)> {
    let mut out: Vec<(String, ToricContraction, GPair)> = CORPUS
        .iter()
        .map(|(name, _)| {
            let (_, tc, pair) = load(name);
            (name.to_string(), tc, pair)
        })
        .collect();
    let p = GenParams::default();
    for seed in 0..RANDOM_INSTANCES {
        let (tc, pair) = random_instance(seed, &p).unwrap_or_else(|| panic!("seed {seed} produced no instance"));
        out.push((format!("seed {seed}"), tc, pair));
    }
    out
}

fn criterion_3(all: &[(String, ToricContraction, GPair)], case2: &mut Vec<Case2Level>) -> Outcome {
    let start = Instant::now();
    let mut interior = 0;
    for (name, tc, pair) in all {
        let cert = find_hyperplane(tc, pair).map_err(|e| format!("{name}: {e}"))?;
        let v = verify_certificate(tc, pair, &cert.phi_bar, &cert.gamma);
        ensure(v.ok, || format!("{name}: {:?}", v.reasons))?;
        let a = mld_of(tc, pair)?;
        ensure(cert.mld == a, || format!("{name}: certificate mld differs"))?;
        ensure(cert.gamma >= gamma_closed_form(tc.rank() as u32, &a), || {
            format!("{name}: γ = {} below bound", fmt_rat(&cert.gamma))
        })?;
        let bd = box_square(tc, pair).unwrap();
        let lct = lct_pullback(tc, &bd, &cert.phi_bar).map_err(|e| format!("{name}: {e}"))?;
        ensure(lct >= cert.gamma, || format!("{name}: lct {} < γ", fmt_rat(&lct)))?;
        let top = &cert.transcript[0];
        if top.case == LevelCase::Interior {
            interior += 1;
            let s = top.slice.as_ref().expect("interior levels record a slice");
            case2.push(Case2Level {
                tc: tc.clone(),
                pair: pair.clone(),
                phi: top.phi.clone(),
                w: top.w.clone(),
                max_discrepancy: s.max_discrepancy.clone(),
                u_matches: s.u_matches,
                invariant_point: s.invariant_point,
                t: top.t.clone(),
            });
        }
        for rec in cert.transcript.iter().skip(1).filter(|r| r.case == LevelCase::Interior) {
            let s = rec.slice.as_ref().expect("interior levels record a slice");
            ensure(rec.w > Rat::one() && s.max_discrepancy <= rec.w && s.u_matches && s.invariant_point, || {
                format!("{name}: nested level {} check failed", rec.level)
            })?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} instances ({} corpus, {RANDOM_INSTANCES} random), {interior} with an interior top level, {:.1}s",
        all.len(),
        CORPUS.len(),
        elapsed.as_secs_f64()
    ))
}

fn criterion_4() -> Outcome {
    for (name, radius) in CORPUS {
        let (file, tc, pair) = load(name);
        let m = mld_of(&tc, &pair)?;
        let bd = box_square(&tc, &pair).unwrap();
        let (o, _) = oracle_mld(&tc, &bd, *radius)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("{name}: empty box"))?;
        let (b, at) = brute_mld(&file, *radius as i64).ok_or_else(|| format!("{name}: empty box"))?;
        ensure(m == o && m == b, || {
            format!("{name}: mld {} oracle {} brute {} at {at:?}", fmt_rat(&m), fmt_rat(&o), fmt_rat(&b))
        })?;
    }
    Ok(format!("{} corpus instances, radii 2 to 4", CORPUS.len()))
}

fn random_primitive(rng: &mut ChaCha8Rng, n: usize, r: i64) -> IntVector {
    loop {
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-r..=r)).collect();
        let v = int_vec(&v);
        if is_primitive(&v) {
            return v;
        }
    }
}

fn eval(phi: &IntVector, x: &RatVector) -> Rat {
    phi.iter()
        .zip(x.iter())
        .fold(Rat::zero(), |s, (a, b)| s + Rat::from_integer(a.clone()) * b)
}

/// One random input for the extension: a cone `σ` with generators, `C` the
/// hull of the origin and scaled generators, a functional `φ` changing sign
/// on the generators and `φ₀ = m|ker φ` nonnegative on `σ ∩ φ^⊥`.
struct ExtInput {
    gens: Vec<IntVector>,
    points: Vec<RatVector>,
    c: RatPolyhedron,
    phi: IntVector,
    m: IntVector,
}

fn random_ext_input(rng: &mut ChaCha8Rng) -> Option<ExtInput> {
    let n = rng.gen_range(2..=3);
    let gens: Vec<IntVector> = (0..n + rng.gen_range(0..=1)).map(|_| random_primitive(rng, n, 2)).collect();
    let sigma = RatCone::from_generators(n, &gens, &[]).ok()?;
    if !sigma.is_pointed() || !sigma.is_full_dim() || sigma.rays().len() != gens.len() {
        return None;
    }
    let phi = random_primitive(rng, n, 2);
    let vals: Vec<i64> = gens.iter().map(|g| i64::try_from(&phi.dot(g)).unwrap()).collect();
    if !vals.iter().any(|v| *v < 0) || !vals.iter().any(|v| *v > 0) {
        return None;
    }
    let m = random_primitive(rng, n, 3);
    let slice = sigma.intersect_hyperplane(&phi).ok()?;
    if slice.rays().iter().any(|r| m.dot(r).is_negative()) || slice.rays().iter().all(|r| m.dot(r).is_zero()) {
        return None;
    }
    let scales = [rat(1, 1), rat(3, 2), rat(2, 1), rat(5, 2)];
    let mut points = vec![RatVector::zeros(n)];
    for g in &gens {
        points.push(g.to_rat().scale(&scales[rng.gen_range(0..scales.len())]));
    }
    let c = RatPolyhedron::from_vrep(n, &points, &[], &[]).ok()?;
    Some(ExtInput { gens, points, c, phi, m })
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut done, mut enumerated, mut small) = (0, 0, 0);
    while done < 500 {
        let Some(inp) = random_ext_input(&mut rng) else {
            continue;
        };
        let n = inp.phi.len();
        let kernel = kernel_sublattice(&LatticeHom::functional(&inp.phi)).unwrap();
        let phi0: IntVector = IntVector(kernel.basis().iter().map(|b| inp.m.dot(b)).collect());
        let k = IntMatrix::from_columns(&kernel.basis(), n);
        let c0 = inp.c.preimage(&k).unwrap();
        let l0 = c0.max_value(&phi0.to_rat()).unwrap();
        let tr = extend_functional(&inp.gens, &inp.c, &inp.phi, &phi0, &l0)
            .map_err(|e| format!("input {done}: {e}"))?;
        done += 1;

        // independent checks on the generating points of C
        let vals: Vec<Rat> = inp.points.iter().map(|p| eval(&inp.phi, p)).collect();
        let w = vals.iter().max().unwrap() - vals.iter().min().unwrap();
        let q = Rat::from_integer(tr.q.clone());
        ensure(q >= Rat::one() && q < w, || format!("q = {} with w = {}", tr.q, fmt_rat(&w)))?;
        let img: Vec<Rat> = inp.points.iter().map(|p| eval(&tr.phi_prime, p)).collect();
        ensure(img.iter().all(|v| !v.is_negative() && v <= &(&w * &l0)), || {
            format!("φ'(C) leaves [0, w l₀] for {}", tr.phi_prime)
        })?;
        let box_pts = box_vectors(n, 4);
        for v in box_pts.iter().filter(|v| inp.phi.dot(v).is_zero()) {
            ensure(tr.phi_prime.dot(v) == &tr.q * inp.m.dot(v), || {
                format!("φ' ≠ qφ₀ on {v}")
            })?;
        }

        // exhaustive search over primitive functionals of sup-norm ≤ 5
        let mut witnesses = Vec::new();
        for cand in box_vectors(n, 5).into_iter().filter(is_primitive) {
            let vals: Vec<Rat> = inp.points.iter().map(|p| eval(&cand, p)).collect();
            if vals.iter().any(|v| v.is_negative() || v > &(&w * &l0)) {
                continue;
            }
            let ker: Vec<&IntVector> = box_pts.iter().filter(|v| inp.phi.dot(v).is_zero()).collect();
            let mut qs = (1..).take_while(|qq| Rat::from_integer((*qq).into()) < w);
            if qs.any(|qq: i64| ker.iter().all(|v| cand.dot(v) == inp.m.dot(v) * qq)) {
                witnesses.push(cand);
            }
        }
        if !witnesses.is_empty() {
            enumerated += 1;
        }
        let g = tr.phi_prime.content();
        let prim = IntVector(tr.phi_prime.iter().map(|x| x / &g).collect());
        if prim.sup_norm() <= 5.into() && g == num_bigint::BigInt::one() {
            small += 1;
            ensure(witnesses.contains(&prim), || {
                format!("exhaustive search misses {}", tr.phi_prime)
            })?;
        }
    }
    Ok(format!(
        "{done} inputs; exhaustive search found extensions for {enumerated}, and contains the constructed one in all {small} primitive small cases"
    ))
}

fn box_vectors(n: usize, r: i64) -> Vec<IntVector> {
    let mut out = Vec::new();
    let mut cur = vec![-r; n];
    loop {
        out.push(int_vec(&cur));
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < r {
                cur[i] += 1;
                for v in cur.iter_mut().skip(i + 1) {
                    *v = -r;
                }
                break;
            }
        }
    }
}

fn criterion_6(levels: &[Case2Level]) -> Outcome {
    ensure(!levels.is_empty(), || "no interior levels were reached".into())?;
    for (i, lv) in levels.iter().enumerate() {
        ensure(lv.w > Rat::one(), || format!("level {i}: w = {}", fmt_rat(&lv.w)))?;
        ensure(lv.max_discrepancy <= lv.w && lv.u_matches && lv.invariant_point, || {
            format!("level {i}: recorded checks failed")
        })?;
        // recompute the subdivision and its discrepancies from scratch
        let bd = box_square(&lv.tc, &lv.pair).unwrap();
        let sd = subdivide_fan(lv.tc.fan(), &lv.phi).map_err(|e| e.to_string())?;
        for nr in &sd.new_rays {
            let (e1, e2) = (&lv.tc.fan().rays()[nr.e1], &lv.tc.fan().rays()[nr.e2]);
            let v = e1.scale(&lv.phi.dot(e2)).sub(&e2.scale(&lv.phi.dot(e1)));
            ensure(v == nr.ray.scale(&nr.q), || format!("level {i}: q·e' mismatch"))?;
        }
        for e in sd.fan.rays() {
            let a = log_discrepancy(&lv.tc, &bd, e).unwrap();
            ensure(a <= lv.w, || format!("level {i}: a({e}) = {} > w", fmt_rat(&a)))?;
        }
        // slice U against the rescaled section of U
        let u = bd.u().unwrap();
        let (lo, hi) = (
            u.min_value(&lv.phi.to_rat()).unwrap(),
            u.max_value(&lv.phi.to_rat()).unwrap(),
        );
        let width = WidthResult {
            phi: lv.phi.clone(),
            w: &hi - &lo,
            w_minus: -lo.clone(),
            w_plus: hi.clone(),
            lo,
            hi,
            case: WidthCase::Interior,
        };
        let lambda = Rat::one() / &lv.w;
        let s = slice(&lv.tc, &bd, &width, &lambda, &lv.t, 0).map_err(|e| format!("level {i}: {e}"))?;
        let k = IntMatrix::from_columns(&s.kernel.basis(), lv.tc.rank());
        let section = u.preimage(&k).unwrap().scale(&lv.w);
        ensure(s.box_data.u().unwrap() == &section, || format!("level {i}: slice U differs"))?;
        ensure(s.contraction.sigma_bar().is_full_dim() && s.contraction.sigma_bar().is_pointed(), || {
            format!("level {i}: no invariant point on the slice base")
        })?;
    }
    Ok(format!("{} interior levels, zero violations", levels.len()))
}

fn criterion_7(all: &[(String, ToricContraction, GPair)]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut polars = 0;
    for _ in 0..60 {
        let n = rng.gen_range(1..=3);
        let mut pts: Vec<RatVector> = (0..n)
            .flat_map(|i| {
                let mut a = RatVector::zeros(n);
                a.0[i] = rat(rng.gen_range(1..=4), rng.gen_range(1..=3));
                let mut b = RatVector::zeros(n);
                b.0[i] = rat(-rng.gen_range(1..=4), rng.gen_range(1..=3));
                [a, b]
            })
            .collect();
        for _ in 0..rng.gen_range(0..4) {
            pts.push(RatVector((0..n).map(|_| rat(rng.gen_range(-5..=5), rng.gen_range(1..=3))).collect()));
        }
        let p = RatPolyhedron::from_vrep(n, &pts, &[], &[]).unwrap();
        let dd = p.polar_dual().and_then(|d| d.polar_dual()).map_err(|e| e.to_string())?;
        ensure(dd == p, || "double polar differs".into())?;
        polars += 1;
    }
    for (name, tc, pair) in all.iter().take(40) {
        let bd = box_square(tc, pair).unwrap();
        let dd = bd.square.polar_dual().and_then(|d| d.polar_dual()).map_err(|e| e.to_string())?;
        ensure(dd == bd.square, || format!("{name}: □** ≠ □"))?;
        polars += 1;
    }
    let mut sums = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=3);
        let mut draw = |k: usize| {
            SupportSet::new(
                (0..k)
                    .map(|_| RatVector((0..n).map(|_| rat(rng.gen_range(-6..=6), rng.gen_range(1..=4))).collect()))
                    .collect(),
            )
            .unwrap()
        };
        let (a, b) = (draw(3), draw(2));
        let s = a.minkowski_sum(&b).unwrap();
        let e = RatVector((0..n).map(|_| rat(rng.gen_range(-5..=5), 1)).collect());
        let lhs = s.support_value(&e).unwrap();
        // independent minima over the point lists
        let min = |set: &SupportSet| set.points().iter().map(|p| p.dot(&e)).min().unwrap();
        ensure(lhs == min(&a) + min(&b), || "support function is not additive".into())?;
        sums += 1;
    }
    let mut lcts = 0;
    for (name, tc, pair) in all {
        let bd = box_square(tc, pair).unwrap();
        let a = mld_of(tc, pair)?;
        let mut tests: Vec<IntVector> = tc.sigma_bar().dual().rays().to_vec();
        let s: IntVector = tests.iter().fold(IntVector::zeros(tc.base_rank()), |s, v| s.add(v));
        tests.push(s);
        for phibar in tests {
            let l = lct_pullback(tc, &bd, &phibar).map_err(|e| format!("{name}: {e}"))?;
            ensure(a >= l, || format!("{name}: mld {} < lct {} at {phibar}", fmt_rat(&a), fmt_rat(&l)))?;
            lcts += 1;
        }
    }
    Ok(format!("{polars} double polars, {sums} support sums, {lcts} (mld, lct) comparisons"))
}

fn main() {
    let all = instances();
    let mut case2 = Vec::new();
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "gamma recursion and closed form", criterion_1()),
        (2, "worked germs exact", criterion_2()),
        (3, "hyperplane certificates end to end", criterion_3(&all, &mut case2)),
        (4, "mld equals brute-force oracle on the corpus", criterion_4()),
        (5, "extension property suite", criterion_5()),
        (6, "invariants along interior levels", criterion_6(&case2)),
        (7, "structural duality suite", criterion_7(&all)),
    ];
    let mut failed = 0;
    for (i, desc, r) in &results {
        match r {
            Ok(detail) => println!("criterion {i}: PASS {desc}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {i}: FAIL {desc}: {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
