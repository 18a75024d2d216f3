//! Properties of the dominance pipeline on random instances.

mod common;

use common::{close, instance, rng};
use domscan::oracle::brute_force;
use domscan::{run, Backend, Count, FastPath, Max, Min, PipelineConfig, Point, Sum, Variant};
use proptest::prelude::*;
use rand::Rng;

fn cfg(m: usize, variant: Variant) -> PipelineConfig {
    PipelineConfig::new(m).variant(variant)
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Basic), Just(Variant::Improved)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_oracle(seed in any::<u64>(), m in 1usize..=4, nd in 0usize..120, nq in 0usize..80, gridded in any::<bool>(), v in variant()) {
        let mut r = rng(seed);
        let inst = instance(&mut r, nd, nq, m, gridded, |r| r.gen_range(-20i64..=20));
        let got = run(&inst.0, &inst.1, &Sum::<i64>::new(), &cfg(m, v)).unwrap();
        prop_assert_eq!(got.results, brute_force(&inst.0, &inst.1, &Sum::<i64>::new()));

        let inst = instance(&mut r, nd, nq, m, gridded, |r| r.gen::<f64>() * 10.0);
        let got = run(&inst.0, &inst.1, &Sum::<f64>::new(), &cfg(m, v).backend(Backend::Parallel { threads: 3 }).min_chunk(8)).unwrap();
        prop_assert!(close(&got.results, &brute_force(&inst.0, &inst.1, &Sum::<f64>::new())));
    }

    #[test]
    fn variants_agree(seed in any::<u64>(), m in 1usize..=4, gridded in any::<bool>()) {
        let inst = instance(&mut rng(seed), 80, 60, m, gridded, |r| r.gen_range(-100i64..100));
        let basic = run(&inst.0, &inst.1, &Max::<i64>::new(), &cfg(m, Variant::Basic)).unwrap();
        let improved = run(&inst.0, &inst.1, &Max::<i64>::new(), &cfg(m, Variant::Improved)).unwrap();
        prop_assert_eq!(basic.results, improved.results);
    }

    #[test]
    fn fast_path_matches_general_path(seed in any::<u64>(), m in 1usize..=3, v in variant()) {
        let mut r = rng(seed);
        let inst = instance(&mut r, 70, 50, m, true, |r| r.gen_range(0i64..50));
        for fast in [FastPath::On, FastPath::Off] {
            prop_assert_eq!(run(&inst.0, &inst.1, &Sum::<i64>::new(), &cfg(m, v).fast_path(fast)).unwrap().stats.fast_path, fast == FastPath::On);
        }
        let on = run(&inst.0, &inst.1, &Sum::<i64>::new(), &cfg(m, v).fast_path(FastPath::On)).unwrap();
        let off = run(&inst.0, &inst.1, &Sum::<i64>::new(), &cfg(m, v)).unwrap();
        prop_assert_eq!(on.results, off.results);
        let on = run(&inst.0, &inst.1, &Min::<i64>::new(), &cfg(m, v).fast_path(FastPath::On)).unwrap();
        let off = run(&inst.0, &inst.1, &Min::<i64>::new(), &cfg(m, v)).unwrap();
        prop_assert_eq!(on.results, off.results);
    }

    #[test]
    fn shared_coordinates_never_contribute(seed in any::<u64>(), m in 1usize..=4, v in variant()) {
        let mut r = rng(seed);
        let (data, _) = instance(&mut r, 40, 0, m, true, |_| 1u64);
        // each query copies one coordinate of a data point and is far above it elsewhere
        let queries: Vec<Point<f64, u64>> = data
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let k = i % m;
                let coords = (0..m).map(|j| if j == k { d.coords[j] } else { 100.0 }).collect();
                Point::query(1000 + i as u64, coords)
            })
            .collect();
        let got = run(&data, &queries, &Count, &cfg(m, v)).unwrap();
        for (q, res) in queries.iter().zip(&got.results) {
            let k = (q.id - 1000) as usize % m;
            let cut = q.coords[k];
            let strictly_below = data.iter().filter(|d| d.coords[k] < cut).count() as u64;
            prop_assert!(res.value <= strictly_below);
        }
        prop_assert_eq!(got.results, brute_force(&data, &queries, &Count));
    }

    #[test]
    fn one_dimension_is_a_sorted_prefix_sum(seed in any::<u64>(), v in variant()) {
        let inst = instance(&mut rng(seed), 100, 40, 1, true, |r| r.gen_range(0i64..9));
        let got = run(&inst.0, &inst.1, &Sum::<i64>::new(), &cfg(1, v)).unwrap();
        let mut sorted: Vec<(f64, i64)> = inst.0.iter().map(|d| (d.coords[0], d.weight)).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut prefix = vec![0i64];
        for (_, w) in &sorted {
            prefix.push(prefix.last().unwrap() + w);
        }
        for res in &got.results {
            let q = inst.1.iter().find(|q| q.id == res.id).unwrap();
            let below = sorted.partition_point(|(x, _)| *x < q.coords[0]);
            prop_assert_eq!(res.value, prefix[below]);
        }
    }

    #[test]
    fn count_is_monotone(seed in any::<u64>(), m in 1usize..=3, v in variant()) {
        let mut r = rng(seed);
        let (data, base) = instance(&mut r, 60, 30, m, true, |_| 1u64);
        let raised: Vec<Point<f64, u64>> = base
            .iter()
            .map(|q| Point::query(q.id + 1000, q.coords.iter().map(|x| x + f64::from(r.gen_range(0..3u32))).collect()))
            .collect();
        let all: Vec<_> = base.iter().chain(&raised).cloned().collect();
        let got = run(&data, &all, &Count, &cfg(m, v)).unwrap().results;
        let value = |id: u64| got.iter().find(|r| r.id == id).unwrap().value;
        for q in &base {
            prop_assert!(value(q.id) <= value(q.id + 1000));
        }
    }

    #[test]
    fn extra_queries_change_nothing(seed in any::<u64>(), m in 1usize..=3, v in variant()) {
        let mut r = rng(seed);
        let (data, queries) = instance(&mut r, 60, 30, m, true, |r| r.gen_range(-5i64..5));
        let (_, extra) = instance(&mut r, 0, 25, m, true, |_| 0i64);
        let extra: Vec<_> = extra.into_iter().map(|q| Point { id: q.id + 500, ..q }).collect();
        let alone = run(&data, &queries, &Min::<i64>::new(), &cfg(m, v)).unwrap().results;
        let all: Vec<_> = queries.iter().chain(&extra).cloned().collect();
        let together = run(&data, &all, &Min::<i64>::new(), &cfg(m, v)).unwrap().results;
        let kept: Vec<_> = together.into_iter().filter(|r| r.id < 500).collect();
        prop_assert_eq!(alone, kept);
    }

    #[test]
    fn expansion_respects_its_bound(seed in any::<u64>(), m in 1usize..=4, n in 1usize..150, gridded in any::<bool>(), v in variant()) {
        let inst = instance(&mut rng(seed), n, n / 2, m, gridded, |_| 1u64);
        let stats = run(&inst.0, &inst.1, &Count, &cfg(m, v)).unwrap().stats;
        prop_assert!(stats.expanded as u128 <= stats.expansion_bound());
        let ranked = if v == Variant::Basic { m } else { m - 1 };
        prop_assert_eq!(stats.widths.len(), ranked);
    }
}

#[test]
fn duplicate_points_each_contribute() {
    let d = vec![
        Point::data(0, vec![1.0, 1.0], 2i64),
        Point::data(1, vec![1.0, 1.0], 3),
        Point::data(2, vec![1.0, 1.0], 5),
    ];
    let q = vec![Point::query(3, vec![2.0, 2.0]), Point::query(4, vec![1.0, 2.0])];
    for v in [Variant::Basic, Variant::Improved] {
        let got = run(&d, &q, &Sum::<i64>::new(), &cfg(2, v)).unwrap().results;
        assert_eq!(got.iter().map(|r| r.value).collect::<Vec<_>>(), [10, 0]);
    }
}

#[test]
fn f32_coordinates() {
    let d = vec![Point::data(0, vec![0.5f32, 0.25], 1u64), Point::data(1, vec![0.75, 0.75], 1)];
    let q = vec![Point::query(2, vec![0.8f32, 0.8])];
    let got = run(&d, &q, &Count, &cfg(2, Variant::Improved)).unwrap().results;
    assert_eq!(got[0].value, 2);
}
