use criterion::{black_box, criterion_group, criterion_main, Criterion};

use nto1_bench::{field, gouzao_shape};
use nto1_core::lowdeg::{cubic_sweep, quartic_3to1_search};
use nto1_core::theorems::{verify_theorem, RunOptions};
use nto1_core::walsh::{char_sum_from, WalshSpectrum};
use nto1_core::{classify_poly, FieldSpec, PhiGadget, PolyMap};

fn arithmetic(c: &mut Criterion) {
    let f = field(2, 12);
    let (a, b) = (f.beta_pow(100), f.beta_pow(2000));
    c.bench_function("mul GF(2^12)", |bch| bch.iter(|| f.mul(black_box(&a), black_box(&b))));
    c.bench_function("inv GF(2^12)", |bch| bch.iter(|| f.inv(black_box(&a))));
    let g = field(3, 6);
    let x = g.beta_pow(77);
    c.bench_function("pow GF(3^6) e=4374", |bch| bch.iter(|| g.pow(black_box(&x), 4374)));
}

fn classification(c: &mut Criterion) {
    let f = gouzao_shape();
    c.bench_function("classify gouzao shape GF(3^6)", |bch| bch.iter(|| classify_poly(black_box(&f))));
    let g = field(2, 12);
    let cube = PolyMap::monomial(&g, 3, g.one());
    c.bench_function("classify x^3 GF(2^12)", |bch| bch.iter(|| classify_poly(black_box(&cube))));
}

fn walsh(c: &mut Criterion) {
    let f = field(3, 3);
    let poly = PolyMap::new(&f, [(9, f.one()), (1, f.scalar(-1))]).unwrap();
    let phi2 = PhiGadget::phi2(3, 3, 1).unwrap();
    c.bench_function("walsh spectrum GF(27)", |bch| bch.iter(|| WalshSpectrum::new(black_box(&poly))));
    let spec = WalshSpectrum::new(&poly).unwrap();
    c.bench_function("char sum phi2 GF(27)", |bch| bch.iter(|| char_sum_from(black_box(&spec), &phi2)));
}

fn sweeps(c: &mut Criterion) {
    let f27 = field(3, 3);
    c.bench_function("cubic sweep GF(27)", |bch| bch.iter(|| cubic_sweep(black_box(&f27))));
    let f13 = field(13, 1);
    c.bench_function("quartic search GF(13)", |bch| bch.iter(|| quartic_3to1_search(black_box(&f13), 0)));
    let opts = RunOptions { field: Some(FieldSpec::new(13, 1)), ..Default::default() };
    c.bench_function("miu3 class sweep GF(13)", |bch| bch.iter(|| verify_theorem("miu3", black_box(&opts))));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = arithmetic, classification, walsh, sweeps
}
criterion_main!(benches);
