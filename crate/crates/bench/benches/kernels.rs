use criterion::{black_box, criterion_group, criterion_main, Criterion};

use stdvb::bundle::{cocycle_build, cocycle_extract};
use stdvb::random::{self, monomial_section, random_bundle, random_matrix};
use stdvb::{verify, ProjSite, RingDesc};

fn matrices(c: &mut Criterion) {
    let ring = RingDesc::new(&["t", "s"], &["t"]).unwrap();
    let mut rng = random::rng(1);
    let a = random_matrix(&mut rng, &ring, 3, 3, 2);
    let b = random_matrix(&mut rng, &ring, 3, 3, 2);
    c.bench_function("kron 3x3", |bn| bn.iter(|| black_box(&a).kron(black_box(&b)).unwrap()));
    c.bench_function("matmul 3x3", |bn| bn.iter(|| black_box(&a).matmul(black_box(&b)).unwrap()));
    c.bench_function("det 3x3", |bn| bn.iter(|| black_box(&a).det().unwrap()));
}

fn bundles(c: &mut Criterion) {
    let ps = ProjSite::new(2, &RingDesc::rationals()).unwrap();
    let mut rng = random::rng(2);
    let e = random_bundle(&mut rng, &ps, 2, 2).unwrap();
    let f = random_bundle(&mut rng, &ps, 2, 2).unwrap();
    c.bench_function("tensor rank 2 on P2", |bn| bn.iter(|| e.tensor(&f).unwrap()));
    c.bench_function("direct sum rank 2 on P2", |bn| bn.iter(|| e.direct_sum(&f).unwrap()));

    let cover = ps.chart_cover(0);
    let tr = cocycle_extract(&e, &cover).unwrap();
    c.bench_function("cocycle extract", |bn| bn.iter(|| cocycle_extract(&e, &cover).unwrap()));
    c.bench_function("cocycle build", |bn| bn.iter(|| cocycle_build(ps.site(), &tr).unwrap()));

    let o3 = ps.twisted_bundle(3).unwrap();
    let s = monomial_section(&ps, o3.presheaf(), &[1, 1, 1]).unwrap();
    let u0 = ps.chart(0, &[0]).unwrap();
    let to_p = ps.site().arrows_between(u0, ps.terminal()).next().unwrap();
    let s = o3.presheaf().section_pullback(&s, to_p).unwrap();
    c.bench_function("unit inverse on O(3)", |bn| bn.iter(|| o3.presheaf().unit_inverse(&s).unwrap()));
}

fn claims(c: &mut Criterion) {
    let mut g = c.benchmark_group("claims");
    g.sample_size(10);
    for id in ["tp-assoc", "sheaf-equiv", "cocycle-roundtrip"] {
        g.bench_function(id, |bn| bn.iter(|| verify::run(id, 0, 4, false).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, matrices, bundles, claims);
criterion_main!(benches);
