use nalgebra::DMatrix;
use num_rational::Ratio;
use proptest::prelude::*;

use xxnet::analysis::{detect_period, period_prediction};
use xxnet::community::{community_census, greedy_coloring, lpa_detect};
use xxnet::metrics::{
    degree_stats, mean_pairwise_wasserstein, node_metrics, rescaled_weight_distribution, wasserstein_1d,
};
use xxnet::network::{adjacency, build_network, build_network_with, NetworkOptions, Reach, WeightedNetwork};

/// Random symmetric weights in (0, 1] on a random edge set.
fn weighted_graph() -> impl Strategy<Value = WeightedNetwork> {
    (2usize..14).prop_flat_map(|n| {
        prop::collection::vec(prop::option::weighted(0.45, 0.01f64..1.0), n * (n - 1) / 2).prop_map(move |ws| {
            let mut m = DMatrix::zeros(n, n);
            let mut it = ws.into_iter();
            for a in 0..n {
                for b in a + 1..n {
                    if let Some(w) = it.next().unwrap() {
                        m[(a, b)] = w;
                        m[(b, a)] = w;
                    }
                }
            }
            WeightedNetwork::from_dense(m, 0.0).unwrap()
        })
    })
}

fn sorted_sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..3.0, 1..12).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn local_measures_stay_in_range(net in weighted_graph()) {
        let m = node_metrics(&net);
        for a in 0..net.len() {
            let d = m.degree[a];
            prop_assert!((0.0..=1.0).contains(&m.clustering[a]));
            prop_assert!((0.0..=1.0 + 1e-12).contains(&m.weighted_clustering[a]));
            // the geometric mean of weights never exceeds the largest one
            prop_assert!(m.weighted_clustering[a] <= m.clustering[a] + 1e-12);
            match m.disparity[a] {
                Some(y) => {
                    prop_assert!(y >= 1.0 / d as f64 - 1e-12 && y <= 1.0 + 1e-12);
                }
                None => prop_assert_eq!(d, 0),
            }
        }
    }

    #[test]
    fn degree_spread_vanishes_only_when_regular(net in weighted_graph()) {
        let m = node_metrics(&net);
        let regular = m.degree.iter().all(|&d| d == m.degree[0]);
        let s = degree_stats(&net);
        prop_assert_eq!(s.std_dev == 0.0, regular);
        let mean = m.degree.iter().sum::<usize>() as f64 / net.len() as f64;
        prop_assert!((s.mean - mean).abs() < 1e-12);
    }

    #[test]
    fn rescaled_weights_have_unit_mean(net in weighted_graph()) {
        for a in 0..net.len() {
            if let Ok(r) = rescaled_weight_distribution(&net, a) {
                let mean = r.values.iter().sum::<f64>() / r.values.len() as f64;
                prop_assert!((mean - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn wasserstein_is_a_metric(a in sorted_sample(), b in sorted_sample(), c in sorted_sample()) {
        let ab = wasserstein_1d(&a, &b).unwrap();
        prop_assert_eq!(ab, wasserstein_1d(&b, &a).unwrap());
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(wasserstein_1d(&a, &a).unwrap(), 0.0);
        let via = wasserstein_1d(&a, &c).unwrap() + wasserstein_1d(&c, &b).unwrap();
        prop_assert!(ab <= via + 1e-12);
    }

    #[test]
    fn wasserstein_matches_mean_shift(a in sorted_sample(), shift in 0.0f64..2.0) {
        let moved: Vec<f64> = a.iter().map(|x| x + shift).collect();
        prop_assert!((wasserstein_1d(&a, &moved).unwrap() - shift).abs() < 1e-12);
    }

    #[test]
    fn coloring_is_proper(net in weighted_graph()) {
        let adj = adjacency(&net);
        let c = greedy_coloring(&adj);
        let n = net.len();
        for a in 0..n {
            for b in 0..n {
                if a != b && adj[(a, b)] != 0 {
                    prop_assert_ne!(c.colors[a], c.colors[b]);
                }
            }
        }
        let total: usize = c.classes.iter().map(Vec::len).sum();
        prop_assert_eq!(total, n);
    }

    #[test]
    fn labels_form_a_deterministic_partition(net in weighted_graph(), weighted in any::<bool>()) {
        let Ok(lab) = lpa_detect(&net, weighted) else {
            return Ok(());
        };
        prop_assert_eq!(lpa_detect(&net, weighted).unwrap(), lab.clone());
        prop_assert!(lab.labels.iter().all(|&l| (1..=net.len()).contains(&l)));
        let with = community_census(&lab, true);
        prop_assert_eq!(with.sizes.iter().sum::<usize>(), net.len());
        let without = community_census(&lab, false);
        prop_assert_eq!(without.sizes.iter().sum::<usize>(), net.len() - lab.isolated.len());
        prop_assert_eq!(with.n_c, without.n_c + lab.isolated.len());
        // a node never keeps a label no neighbour carries, unless it is isolated
        for a in 0..net.len() {
            if !lab.isolated.contains(&a) {
                prop_assert!(net.neighbors(a).any(|(b, _)| lab.labels[b] == lab.labels[a]));
            }
        }
    }

    #[test]
    fn prediction_ignores_representation(p in 2i64..200, q in 1i64..50, mult in 1i64..20) {
        prop_assume!(Ratio::new(p, q) > Ratio::from_integer(1));
        let reduced = period_prediction(Ratio::new(p, q)).unwrap();
        let scaled = period_prediction(Ratio::new(p * mult, q * mult)).unwrap();
        prop_assert_eq!(&reduced, &scaled);
        prop_assert_eq!(num_integer_gcd(reduced.p, reduced.q), 1);
        prop_assert!((0.0..1.0).contains(&reduced.f));
        prop_assert_eq!(reduced.group_size, reduced.p);
    }

    #[test]
    fn periodic_series_are_found(period in 1usize..8, reps in 3usize..6, base in prop::collection::vec(0.1f64..1.0, 8)) {
        let values: Vec<f64> = (0..period * reps).map(|t| base[t % period]).collect();
        let found = detect_period(&values).unwrap().unwrap();
        prop_assert!(found <= period && period % found == 0);
    }
}

fn num_integer_gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { num_integer_gcd(b, a % b) }
}

#[test]
fn quiet_run_reproduces_full_rows() {
    for n in [60usize, 101] {
        for k in 0..=n {
            let full = build_network(n, k).unwrap();
            let quiet = build_network_with(n, k, &NetworkOptions { reach: Reach::QuietRun(8), ..Default::default() }).unwrap();
            assert_eq!(full, quiet, "N = {n}, k = {k}");
        }
    }
}

#[test]
fn half_filling_is_a_nearest_neighbour_chain() {
    let net = build_network(200, 100).unwrap();
    for a in 0..200 {
        let mut nb: Vec<usize> = net.neighbors(a).map(|(b, _)| b).collect();
        nb.sort();
        let expected: Vec<usize> = [a.checked_sub(1), (a + 1 < 200).then_some(a + 1)].into_iter().flatten().collect();
        assert_eq!(nb, expected, "node {a}");
    }
}

#[test]
fn mirror_sectors_share_links() {
    for k in [7usize, 30, 55] {
        let lower = adjacency(&build_network(120, k).unwrap());
        let upper = adjacency(&build_network(120, 120 - k).unwrap());
        assert_eq!(lower, upper, "k = {k}");
    }
}

#[test]
fn k1_wasserstein_is_small_but_nonzero() {
    let w = mean_pairwise_wasserstein(&build_network(60, 1).unwrap()).unwrap();
    assert_eq!(w.excluded, 0);
    assert_eq!(w.pairs, 60 * 59 / 2);
    assert!(w.mean > 0.0 && w.mean < 0.05);
}
