#![allow(dead_code)]

use std::path::PathBuf;

use num_traits::{One, Signed, Zero};
use toricmld::instance::{load_instance, InstanceFile};
use toricmld::num::{IntVector, Rat};
use toricmld::{GPair, ToricContraction};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Corpus files with the box radius at which the brute-force search
/// reaches the mld.
pub const CORPUS: &[(&str, u32)] = &[
    ("a1_family.json", 2),
    ("a1_family_half.json", 2),
    ("a1_family_third.json", 2),
    ("a2_identity.json", 3),
    ("a3_identity.json", 3),
    ("halfplane.json", 3),
    ("cax4.json", 4),
];

pub fn read(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(name)).expect("corpus file")
}

pub fn load(name: &str) -> (InstanceFile, ToricContraction, GPair) {
    load_instance(&read(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn r(v: i64) -> Rat {
    Rat::from_integer(v.into())
}

/// Solves `Σ c_i g_i = x` for square systems by elimination; `None` if singular.
fn coordinates(gens: &[Vec<Rat>], x: &[Rat]) -> Option<Vec<Rat>> {
    let n = x.len();
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|row| {
            let mut v: Vec<Rat> = gens.iter().map(|g| g[row].clone()).collect();
            v.push(x[row].clone());
            v
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = Rat::one() / &m[c][c];
        for v in m[c].iter_mut() {
            *v *= &inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=n {
                    let t = &m[c][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Log discrepancy of a lattice point for `A = {0}` on a simplicial fan:
/// linear on each cone with value `1 - b_i` on the ray `e_i`.
pub fn simplicial_discrepancy(file: &InstanceFile, e: &[i64]) -> Option<Rat> {
    let x: Vec<Rat> = e.iter().map(|&v| r(v)).collect();
    for cone in &file.max_cones {
        if cone.len() != file.rank {
            continue;
        }
        let gens: Vec<Vec<Rat>> = cone
            .iter()
            .map(|&i| file.rays[i].iter().map(|v| Rat::from_integer(v.clone())).collect())
            .collect();
        let Some(c) = coordinates(&gens, &x) else {
            continue;
        };
        if c.iter().any(|v| v.is_negative()) {
            continue;
        }
        let mut a = r(0);
        for (ci, &i) in c.iter().zip(cone) {
            let b = file.b.get(&i).cloned().unwrap_or_else(|| r(0));
            a += ci * (r(1) - b);
        }
        return Some(a);
    }
    None
}

/// `x` lies in the interior of `π⁻¹(cone(π(rays)))`, checked on the base with
/// the simplicial base cones of the corpus.
fn centered(file: &InstanceFile, e: &[i64]) -> bool {
    let k = file.pi.len();
    let img: Vec<Rat> = file
        .pi
        .iter()
        .map(|row| row.iter().zip(e).fold(r(0), |s, (a, b)| s + Rat::from_integer(a * b)))
        .collect();
    let gens: Vec<Vec<Rat>> = match &file.sigma_bar {
        Some(g) => g.iter().map(|v| v.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect(),
        None => {
            let mut out: Vec<Vec<Rat>> = Vec::new();
            for ray in &file.rays {
                let v: Vec<Rat> = file
                    .pi
                    .iter()
                    .map(|row| Rat::from_integer(row.iter().zip(ray.iter()).map(|(a, b)| a * b).sum()))
                    .collect();
                if v.iter().any(|x| !x.is_zero()) && !out.contains(&v) {
                    out.push(v);
                }
            }
            out
        }
    };
    if gens.len() != k {
        panic!("brute-force oracle needs a simplicial base cone");
    }
    let c = coordinates(&gens, &img).expect("independent generators");
    c.iter().all(|v| v.is_positive())
}

/// Brute-force mld over primitive points of `[-r, r]^n` centered in the fiber.
pub fn brute_mld(file: &InstanceFile, radius: i64) -> Option<(Rat, Vec<i64>)> {
    assert!(file.bdiv_a.iter().all(|p| p.is_zero()) && file.general.is_empty());
    let n = file.rank;
    let mut best: Option<(Rat, Vec<i64>)> = None;
    let mut cur = vec![-radius; n];
    loop {
        let g = cur.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
        if g == 1 && centered(file, &cur) {
            let a = simplicial_discrepancy(file, &cur).expect("point in the support");
            if best.as_ref().map_or(true, |(b, _)| &a < b) {
                best = Some((a, cur.clone()));
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if cur[i] < radius {
                cur[i] += 1;
                for v in cur.iter_mut().skip(i + 1) {
                    *v = -radius;
                }
                break;
            }
        }
    }
}

pub fn int_vec(v: &[i64]) -> IntVector {
    IntVector::from_i64(v)
}
