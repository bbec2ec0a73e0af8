use std::sync::Arc;

use ibm_exit::bm_exit::{BatchCache, ExitSampler};
use ibm_exit::domains::{Domain, StartPoint};
use ibm_exit::iterated::{moment_estimates, survival_curve, IteratedMethod, ProcessKind, Sampling};
use ibm_exit::rng::StreamId;
use ibm_exit::series::SeriesParams;
use rayon::prelude::*;

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
}

fn triangle() -> Domain {
    Domain::equilateral_triangle(2.0 * 3f64.sqrt()).unwrap()
}

#[test]
fn estimates_do_not_depend_on_the_thread_count() {
    let d = triangle();
    let z = StartPoint::new(vec![0.2, 0.3]);
    let p = SeriesParams::default();
    let s = Sampling::new(600, StreamId::new(99, 4)).with_dt(1e-3).with_chunk(64);
    let ts = [0.1, 0.5, 2.0];
    let run = |threads| {
        pool(threads).install(|| {
            let curve =
                survival_curve(&d, &z, ProcessKind::Ibm, &ts, &IteratedMethod::Conditional(s), &p, None).unwrap();
            let pathwise = IteratedMethod::Pathwise { sampling: Sampling { count: 200, ..s }, dt_y: 1e-2 };
            let paths = survival_curve(&d, &z, ProcessKind::Btbm, &ts, &pathwise, &p, None).unwrap();
            let moments = moment_estimates(&d, &z, ProcessKind::Btbm, &[1.0, 2.5], &s, &p, None).unwrap();
            (curve, paths, moments)
        })
    };
    let one = run(1);
    for threads in [2, 5] {
        assert_eq!(one, run(threads), "{threads} threads");
    }
}

#[test]
fn concurrent_cache_requests_share_one_batch() {
    let cache = BatchCache::new();
    let d = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
    let z = StartPoint::origin(2);
    let sampler = ExitSampler::euler(&d, &z, 1e-3).unwrap();
    let seed = StreamId::new(5, 6);
    let batches: Vec<_> = pool(4).install(|| {
        (0..16).into_par_iter().map(|_| cache.get_or_generate(&sampler, &d, &z, 300, seed).unwrap()).collect()
    });
    assert_eq!(cache.len(), 1);
    assert!(batches.windows(2).all(|w| Arc::ptr_eq(&w[0], &w[1])));

    // IBM and BTBM draws from one start share the minus-side batch.
    let p = SeriesParams::default();
    let s = Sampling::new(300, StreamId::new(5, 7)).with_dt(1e-3);
    let cache = BatchCache::new();
    let ibm =
        survival_curve(&d, &z, ProcessKind::Ibm, &[0.3], &IteratedMethod::Conditional(s), &p, Some(&cache)).unwrap();
    assert_eq!(cache.len(), 2);
    let btbm =
        survival_curve(&d, &z, ProcessKind::Btbm, &[0.3], &IteratedMethod::Conditional(s), &p, Some(&cache)).unwrap();
    assert_eq!(cache.len(), 2);
    assert!((0.0..=1.0).contains(&ibm[0].value) && (0.0..=1.0).contains(&btbm[0].value));
}
