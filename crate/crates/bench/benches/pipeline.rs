use criterion::{black_box, criterion_group, criterion_main, Criterion};
use toricmld::toric::{box_square, mld_over_fiber};
use toricmld::{find_hyperplane, verify_certificate};
use toricmld_bench::{corpus_instance, seeded, CORPUS};

fn corpus(c: &mut Criterion) {
    for name in CORPUS {
        let (tc, pair) = corpus_instance(name);
        c.bench_function(&format!("mld/{name}"), |b| {
            b.iter(|| {
                let bd = box_square(&tc, &pair).unwrap();
                black_box(mld_over_fiber(&tc, &bd).unwrap())
            })
        });
        c.bench_function(&format!("find/{name}"), |b| b.iter(|| black_box(find_hyperplane(&tc, &pair).unwrap())));
    }
}

fn random(c: &mut Criterion) {
    let instances = seeded(0..24);
    c.bench_function("find+verify/seeds 0..24", |b| {
        b.iter(|| {
            for (_, tc, pair) in &instances {
                let cert = find_hyperplane(tc, pair).unwrap();
                assert!(verify_certificate(tc, pair, &cert.phi_bar, &cert.gamma).ok);
            }
        })
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = corpus, random
}
criterion_main!(benches);
