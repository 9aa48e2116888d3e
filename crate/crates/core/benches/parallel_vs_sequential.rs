use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use taulab::cauchydet::growth_check;
use taulab::hardedge::tau_oracle;
use taulab::hypergeom::{HgKernel, HgParams};
use taulab::numkit::GridPolicy;

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    vec![("1 thread", one), ("default", all)]
}

fn bench(c: &mut Criterion) {
    let policy = GridPolicy::default();
    let hg = HgKernel::new(HgParams::reference()).unwrap();
    let mut g = c.benchmark_group("grid evaluation");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new("hard-edge oracle", name), |b| {
            b.iter(|| pool.install(|| tau_oracle(0.0, 0.5, &policy).unwrap()))
        });
        g.bench_function(BenchmarkId::new("hypergeometric tau curve", name), |b| {
            b.iter(|| pool.install(|| hg.tau_curve(&[1.5, 2.0, 2.5], 16).unwrap()))
        });
        g.bench_function(BenchmarkId::new("Toeplitz growth table", name), |b| {
            b.iter(|| pool.install(|| growth_check(1.0, 1.0, &[16, 32, 64, 128]).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
