use proptest::prelude::*;
use rand::Rng as _;
use stga_core::genetic::*;
use stga_core::learners::{Algorithm, LearnerSpec};
use stga_core::{rng, synthetic};

fn onemax(ch: &Chromosome) -> f64 {
    ch.count_ones() as f64 / ch.len() as f64
}

fn assert_monotone(run: &GaRun) {
    for w in run.best_per_generation().windows(2) {
        assert!(w[1] >= w[0], "best fitness fell: {w:?}");
    }
}

#[test]
fn crossover_exhaustive_over_cut_pairs() {
    let a = Chromosome::parse("101100").unwrap();
    let b = Chromosome::parse("010111").unwrap();
    for p in 0..=6 {
        for q in p + 1..=6 {
            let (x, y) = crossover_with_cuts(&a, &b, p, q);
            for i in 0..6 {
                let inside = p <= i && i < q;
                assert_eq!(x.bits[i], if inside { b.bits[i] } else { a.bits[i] }, "cuts ({p},{q}) bit {i}");
                assert_eq!(y.bits[i], if inside { a.bits[i] } else { b.bits[i] }, "cuts ({p},{q}) bit {i}");
            }
        }
    }
    let (x, y) = crossover_with_cuts(&a, &b, 0, 6);
    assert_eq!((x, y), (b.clone(), a.clone()));
    let (x, y) = crossover_with_cuts(&a, &a, 1, 5);
    assert_eq!((x, y), (a.clone(), a));
}

#[test]
fn random_cuts_cover_every_pair() {
    let a = Chromosome::ones(6);
    let b = Chromosome::new(vec![false; 6]);
    let mut rng = rng::rng_from_seed(3);
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..5000 {
        let (x, _) = crossover_double_point(&a, &b, &mut rng);
        let zeros: Vec<usize> = (0..6).filter(|&i| !x.bits[i]).collect();
        let p = zeros.first().copied().unwrap_or(0);
        assert!(zeros.windows(2).all(|w| w[1] == w[0] + 1), "segment must be contiguous");
        seen.insert((p, p + zeros.len()));
    }
    // 21 cut pairs; the empty segment never occurs because p < q.
    assert_eq!(seen.len(), 21);
}

#[test]
fn mutation_flip_count_is_binomial() {
    let mut rng = rng::rng_from_seed(5);
    let ch = Chromosome::new(vec![false; 1000]);
    let trials = 1000;
    let mut total = 0usize;
    for _ in 0..trials {
        let m = mutate_bit_inversion(&ch, 0.1, &mut rng);
        let flips = m.count_ones();
        // 5 sigma of Binomial(1000, 0.1) is about 47.
        assert!((flips as f64 - 100.0).abs() <= 5.0 * 90f64.sqrt(), "{flips}");
        total += flips;
    }
    let mean = total as f64 / trials as f64;
    assert!((mean - 100.0).abs() <= 10.0, "{mean}");
}

#[test]
fn mutation_edge_rates() {
    let mut rng = rng::rng_from_seed(6);
    let ch = Chromosome::parse("1100101").unwrap();
    assert_eq!(mutate_bit_inversion(&ch, 0.0, &mut rng), ch);
    assert_eq!(mutate_bit_inversion(&ch, 1.0, &mut rng).to_string(), "0011010");
    let full = Chromosome::ones(5);
    let flipped = mutate_bit_inversion(&full, 1.0, &mut rng);
    assert_eq!(flipped.count_ones(), 1);
}

#[test]
fn roulette_frequencies() {
    let mut rng = rng::rng_from_seed(7);
    let draws = roulette_select(&[1.0, 1.0], 100_000, &mut rng).unwrap();
    let share = draws.iter().filter(|&&i| i == 0).count() as f64 / 1e5;
    assert!((share - 0.5).abs() < 0.01, "{share}");
    let draws = roulette_select(&[1.0, 3.0, 0.0, 4.0], 100_000, &mut rng).unwrap();
    for (i, expect) in [(0, 0.125), (1, 0.375), (2, 0.0), (3, 0.5)] {
        let share = draws.iter().filter(|&&d| d == i).count() as f64 / 1e5;
        assert!((share - expect).abs() < 0.01, "index {i}: {share}");
    }
    assert_eq!(roulette_select(&[0.0, 2.0], 50, &mut rng).unwrap(), vec![1; 50]);
    assert!(roulette_select(&[1.0], 0, &mut rng).unwrap().is_empty());
    assert!(roulette_select(&[0.0, 0.0], 1, &mut rng).is_err());
}

#[test]
fn rank_scale_matches_closed_form() {
    for n in [2usize, 3, 10] {
        for sp in [1.0, 1.3, 1.7, 2.0] {
            // Distinct fitnesses in scrambled order.
            let fit: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % n) as f64).collect();
            let w = rank_scale(&fit, sp);
            for i in 0..n {
                let r = fit[i] as usize + 1;
                let expect = 2.0 - sp + 2.0 * (sp - 1.0) * (r - 1) as f64 / (n - 1) as f64;
                assert!((w[i] - expect).abs() < 1e-12, "n={n} sp={sp} i={i}");
            }
            assert!((w.iter().sum::<f64>() - n as f64).abs() < 1e-9);
        }
    }
}

#[test]
fn rank_scale_averages_ties() {
    let w = rank_scale(&[0.2, 0.5, 0.2, 0.9], 2.0);
    // Ranks 1 and 2 tie: weights 0 and 2/3 average to 1/3.
    assert!((w[0] - 1.0 / 3.0).abs() < 1e-12 && w[0] == w[2]);
    assert!((w[1] - 4.0 / 3.0).abs() < 1e-12);
    assert!((w[3] - 2.0).abs() < 1e-12);
}

#[test]
fn onemax_reaches_optimum() {
    let mut hits = 0;
    for seed in 0..100 {
        let cfg = GaConfig { seed, ..GaConfig::default() };
        let run = run_ga(&cfg, 30, &onemax).unwrap();
        assert_monotone(&run);
        assert!(run.generations <= 100);
        if run.best_fitness == 1.0 {
            hits += 1;
        }
    }
    assert!(hits >= 95, "optimum found in {hits}/100 runs");
}

#[test]
fn run_bookkeeping() {
    let cfg = GaConfig { seed: 9, ..GaConfig::default() };
    let run = run_ga(&cfg, 12, &onemax).unwrap();
    assert!(run.final_population.iter().all(|p| p.len() == cfg.nind));
    assert_eq!(run.final_population.len(), cfg.subpop);
    assert_eq!(run.history.len(), (run.generations + 1) * cfg.subpop);
    assert_eq!(run.evaluations, cfg.nind * cfg.subpop * (run.generations + 1));
    assert!(run.distinct_evaluations <= run.evaluations);
    let max_seen = run.history.iter().map(|h| h.best).fold(0.0, f64::max);
    assert_eq!(run.best_fitness, max_seen);
    let csv = run.history_csv();
    assert!(csv.starts_with("generation,subpop,best,mean\n"));
    assert_eq!(csv.lines().count(), run.history.len() + 1);
}

#[test]
fn constant_fitness_stays_constant() {
    let cfg = GaConfig { seed: 2, stall_generations: None, ..GaConfig::default() };
    let run = run_ga(&cfg, 8, &|_: &Chromosome| 0.5).unwrap();
    assert_eq!(run.generations, 100);
    assert!(run.history.iter().all(|h| h.best == 0.5 && h.mean == 0.5));
    // Ties resolve to the fewest set bits.
    assert_eq!(run.best_chromosome.count_ones(), 1);
}

#[test]
fn early_stop_after_stall() {
    let cfg = GaConfig { seed: 2, ..GaConfig::default() };
    let run = run_ga(&cfg, 8, &|_: &Chromosome| 0.5).unwrap();
    assert_eq!(run.generations, 25);
    assert!(run.stopped_early);
}

#[test]
fn memoization_is_transparent() {
    let ds = synthetic::single_informative::<f64>(150, 5, 0.5, 3);
    let wrapper = LearnerSpec::new(Algorithm::LogisticRegression);
    let base = GaConfig { seed: 4, maxgen: 15, ..GaConfig::default() };
    let cached = select_features(&base, &ds, &wrapper, 5).unwrap();
    let uncached = select_features(&GaConfig { memoize: false, ..base }, &ds, &wrapper, 5).unwrap();
    assert_eq!(cached.best_chromosome, uncached.best_chromosome);
    assert_eq!(cached.history, uncached.history);
    assert!(cached.distinct_evaluations < uncached.distinct_evaluations);
}

#[test]
fn wrapper_fitness_prefers_the_informative_feature() {
    let ds = synthetic::single_informative::<f64>(400, 3, 0.3, 17);
    let wrapper = LearnerSpec::new(Algorithm::LogisticRegression);
    let f = WrapperFitness::new(&ds, wrapper.clone(), 5, 1).unwrap();
    let on0 = f.evaluate(&Chromosome::parse("100").unwrap()).unwrap();
    let on1 = f.evaluate(&Chromosome::parse("010").unwrap()).unwrap();
    assert!(on0 > on1 + 0.2, "{on0} vs {on1}");
    // Repeat evaluation is bit-identical.
    assert_eq!(on0, f.evaluate(&Chromosome::parse("100").unwrap()).unwrap());
    assert_eq!(on0, fitness(&Chromosome::parse("100").unwrap(), &ds, &wrapper, 5, 1).unwrap());
}

#[test]
fn init_population_shape_and_determinism() {
    let cfg = GaConfig::default();
    let a = init_population(&cfg, 8, &mut rng::rng_from_seed(1));
    let b = init_population(&cfg, 8, &mut rng::rng_from_seed(1));
    assert_eq!(a, b);
    assert_eq!(a.len(), 5);
    assert!(a.iter().all(|g| g.len() == 20 && g.iter().all(|c| c.count_ones() >= 1)));
}

#[test]
fn migration_of_identical_individuals_is_a_no_op() {
    let same = Individual { chromosome: Chromosome::parse("0110").unwrap(), fitness: 0.7 };
    let mut pops = vec![vec![same.clone(); 20]; 5];
    let before = pops.clone();
    migrate(&mut pops, 0.2);
    assert_eq!(pops, before);
}

fn arb_pop(n: usize) -> impl Strategy<Value = Vec<Individual>> {
    prop::collection::vec((prop::collection::vec(any::<bool>(), 6), 0.0..1.0f64), n).prop_map(|v| {
        v.into_iter().map(|(bits, fitness)| Individual { chromosome: Chromosome::new(bits), fitness }).collect()
    })
}

proptest! {
    #[test]
    fn reinsertion_preserves_size_and_best(parents in arb_pop(20), kids in arb_pop(20), insr in 0.01..=1.0f64) {
        let out = reinsert_fitness_based(&parents, &kids, insr);
        prop_assert_eq!(out.len(), 20);
        let n_ins = (insr * 20.0 + 1e-9).floor() as usize;
        let mut sorted_kids = kids.clone();
        sorted_kids.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
        let best_in = parents.iter().chain(sorted_kids.iter().take(n_ins)).map(|i| i.fitness).fold(f64::MIN, f64::max);
        prop_assert_eq!(out.iter().map(|i| i.fitness).fold(f64::MIN, f64::max), best_in);
    }

    #[test]
    fn migration_preserves_sizes(pops in prop::collection::vec(arb_pop(10), 1..6), migr in 0.01..=1.0f64) {
        let mut p = pops.clone();
        migrate(&mut p, migr);
        prop_assert_eq!(p.iter().map(Vec::len).collect::<Vec<_>>(), pops.iter().map(Vec::len).collect::<Vec<_>>());
    }

    #[test]
    fn rank_weights_sum_to_n(fit in prop::collection::vec(0.0..1.0f64, 1..40), sp in 1.0..=2.0f64) {
        let w = rank_scale(&fit, sp);
        prop_assert!((w.iter().sum::<f64>() - fit.len() as f64).abs() < 1e-9);
        prop_assert!(w.iter().all(|&x| x >= -1e-12));
    }

    #[test]
    fn crossover_offspring_take_each_bit_from_a_parent(seed in any::<u64>(), len in 2usize..20) {
        let mut rng = rng::rng_from_seed(seed);
        let a = Chromosome::new((0..len).map(|_| rng.random::<bool>()).collect());
        let b = Chromosome::new((0..len).map(|_| rng.random::<bool>()).collect());
        let (x, y) = crossover_double_point(&a, &b, &mut rng);
        for i in 0..len {
            prop_assert!((x.bits[i] == a.bits[i] && y.bits[i] == b.bits[i]) || (x.bits[i] == b.bits[i] && y.bits[i] == a.bits[i]));
        }
    }
}
