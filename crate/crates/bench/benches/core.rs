use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qbar_bench::{dihedral_tower, quadratic_tower, schedule};
use qbar_core::factor::factor_over_q;
use qbar_core::model_check::witness_stages;
use qbar_core::{eval_finite, extend_tower, parse, GaloisTree, PathPrefix, QPoly, Tower};

fn factoring(c: &mut Criterion) {
    let swinnerton_dyer: QPoly = "x^8 - 40*x^6 + 352*x^4 - 960*x^2 + 576".parse().unwrap();
    let product: QPoly = "x^6 - 6*x^4 - 4*x^3 + 12*x^2 - 24*x - 4".parse().unwrap();
    c.bench_function("factor_over_q/swinnerton_dyer_8", |b| b.iter(|| factor_over_q(black_box(&swinnerton_dyer))));
    c.bench_function("factor_over_q/degree_6", |b| b.iter(|| factor_over_q(black_box(&product))));
}

fn towers(c: &mut Criterion) {
    let base = Tower::from_schedule(&schedule(&["x^2-2", "x^2-3"])).unwrap();
    let x5: QPoly = "x^2-5".parse().unwrap();
    c.bench_function("extend_tower/third_quadratic", |b| b.iter(|| extend_tower(black_box(&base), &x5)));
    let q2 = Tower::from_schedule(&schedule(&["x^2-2"])).unwrap();
    let x4: QPoly = "x^4-2".parse().unwrap();
    c.bench_function("extend_tower/fourth_root", |b| b.iter(|| extend_tower(black_box(&q2), &x4)));
    let t = quadratic_tower();
    c.bench_function("galois_tree/new_height_3", |b| b.iter(|| GaloisTree::new(black_box(&t))));
}

fn checking(c: &mut Criterion) {
    let t = dihedral_tower();
    let tree = GaloisTree::new(&t).unwrap();
    let commuting = parse("forall G. forall H. exists K. G*H = H*K").unwrap();
    c.bench_function("eval_finite/three_quantifiers_16", |b| {
        b.iter(|| eval_finite(&tree, black_box(&commuting), 3, &[]))
    });
    let h = PathPrefix::rightmost(&tree, 3).unwrap();
    let a0 = h.compose(&tree, &h).unwrap();
    let roots = parse("exists G. G*G = a0").unwrap();
    c.bench_function("witness_stages/square_root_depth_3", |b| {
        b.iter(|| witness_stages(&tree, black_box(&roots), std::slice::from_ref(&a0), 3))
    });
}

criterion_group!(benches, factoring, towers, checking);
criterion_main!(benches);
