use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hmod_core::campaign::{run_campaign, CampaignConfig, CampaignTask};
use hmod_core::generate::{Dims, GenConfig};
use hmod_core::inequality::InequalityId;
use hmod_core::par::Execution;
use hmod_core::search::{search, SearchConfig};
use hmod_core::tolerance::ToleranceConfig;

fn campaign(c: &mut Criterion) {
    let cfg = CampaignConfig {
        seed: 42,
        trials: 40,
        profiles: vec![Dims { m: 4, d: 2, n: 2 }, Dims { m: 8, d: 2, n: 4 }],
        tasks: InequalityId::ALL
            .into_iter()
            .map(|id| CampaignTask {
                id,
                template: GenConfig::new(0, 1, 1, 1),
            })
            .collect(),
        tol: ToleranceConfig::default(),
        keep_rows: false,
    };
    let mut group = c.benchmark_group("campaign");
    group.sample_size(10);
    for (name, exec) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::default()),
    ] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_campaign(&cfg, exec).unwrap())
        });
    }
    group.finish();
}

fn tightness_search(c: &mut Criterion) {
    let cfg = SearchConfig {
        restarts: 8,
        steps_per_restart: 100,
        ..SearchConfig::new(InequalityId::Mpf, GenConfig::new(0, 6, 2, 3), 1)
    };
    let tol = ToleranceConfig::default();
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    for (name, exec) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::default()),
    ] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| search(&cfg, &tol, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, campaign, tightness_search);
criterion_main!(benches);
