//! Parallel against sequential execution of the hot kernels. Each group runs
//! the same input twice, toggling `par::set_parallel`.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ivpp_core::ivpp::{builtin_gamma_table, verify_ivpp, VerifyOptions};
use ivpp_core::mapkit::{builtin_toda3, iterate, DEFAULT_TERM_CEILING};
use ivpp_core::par;
use ivpp_core::sigma::builtin_toda_param;
use ivpp_core::symcore::{substitute_cleared, Poly, RatFunc};

const MODES: [(&str, bool); 2] = [("sequential", false), ("parallel", true)];

fn dense(n: u32) -> Poly {
    // (1 + x + y + z + w)^n has C(n+4, 4) terms and large coefficients.
    let m = builtin_toda3();
    let v = m.vars();
    let mut s = Poly::one(v);
    for i in 0..4 {
        s = s.add(&Poly::var(v, i));
    }
    s.pow(n)
}

fn multiplication(c: &mut Criterion) {
    let a = dense(12);
    let b = dense(11);
    let mut g = c.benchmark_group("poly_mul");
    g.sample_size(10);
    for (name, on) in MODES {
        par::set_parallel(on);
        g.bench_function(BenchmarkId::new(name, "deg12*deg11"), |bch| bch.iter(|| black_box(a.mul(&b))));
    }
    par::set_parallel(true);
    g.finish();
}

fn substitution(c: &mut Criterion) {
    // A degree-12 factor of the fourth iterate restricted to the singular
    // variety, as in the step-4 trace.
    let it = iterate(&builtin_toda3(), 4, DEFAULT_TERM_CEILING).unwrap();
    let fb = it.factor_base();
    let p = (0..fb.len()).map(|i| fb.poly(i)).max_by_key(|p| p.nterms()).unwrap().clone();
    let param = builtin_toda_param();
    let vals: Vec<Option<RatFunc>> = param.values.iter().cloned().map(Some).collect();
    let mut g = c.benchmark_group("substitute");
    g.sample_size(10);
    for (name, on) in MODES {
        par::set_parallel(on);
        g.bench_function(BenchmarkId::new(name, format!("{}_terms", p.nterms())), |bch| {
            bch.iter(|| black_box(substitute_cleared(&p, &vals, &param.hvars).unwrap()))
        });
    }
    par::set_parallel(true);
    g.finish();
}

fn iterates(c: &mut Criterion) {
    let m = builtin_toda3();
    let mut g = c.benchmark_group("iterate");
    g.sample_size(10);
    for (name, on) in MODES {
        par::set_parallel(on);
        g.bench_function(BenchmarkId::new(name, "F^4"), |bch| {
            bch.iter(|| black_box(iterate(&m, 4, DEFAULT_TERM_CEILING).unwrap()))
        });
    }
    par::set_parallel(true);
    g.finish();
}

fn verification(c: &mut Criterion) {
    let m = builtin_toda3();
    let cand = builtin_gamma_table().remove(2);
    let opts = VerifyOptions {
        samples: 8,
        ..Default::default()
    };
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    for (name, on) in MODES {
        par::set_parallel(on);
        g.bench_function(BenchmarkId::new(name, "period5_x8"), |bch| {
            bch.iter(|| black_box(verify_ivpp(&m, &cand, &opts).unwrap()))
        });
    }
    par::set_parallel(true);
    g.finish();
}

criterion_group!(benches, multiplication, substitution, iterates, verification);
criterion_main!(benches);
