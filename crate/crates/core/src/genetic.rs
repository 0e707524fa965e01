//! Island-model genetic algorithm over binary feature masks.
//!
//! Each generation, per subpopulation: linear-ranking weights, roulette
//! selection, double-point crossover, bit-inversion mutation, fitness
//! evaluation and fitness-based reinsertion. Every `miggen` generations the
//! best individuals migrate one step around a ring of subpopulations.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::dataset::{fold_plan_for_labels, Dataset, FoldPlan};
use crate::error::{Error, Result};
use crate::learners::{self, LearnerSpec};
use crate::num::Float;
use crate::rng::{self, Rng};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Chromosome {
    pub bits: Vec<bool>,
}

impl Chromosome {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn ones(len: usize) -> Self {
        Self { bits: vec![true; len] }
    }

    /// Parses a string such as `"10110"`.
    pub fn parse(s: &str) -> Option<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Indices of set bits.
    pub fn selected(&self) -> Vec<usize> {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }

    /// Sets one uniformly chosen bit if none is set.
    pub fn repair(&mut self, rng: &mut Rng) {
        if !self.bits.is_empty() && self.count_ones() == 0 {
            let i = rng.random_range(0..self.bits.len());
            self.bits[i] = true;
        }
    }
}

impl std::fmt::Display for Chromosome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.bits {
            f.write_char(if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    /// Column count including the label; recorded only.
    pub nvar: usize,
    /// Real-coded precision; inert for binary masks.
    pub preci: usize,
    pub nind: usize,
    pub maxgen: usize,
    pub migr: f64,
    pub insr: f64,
    pub subpop: usize,
    pub miggen: usize,
    /// Per-bit flip probability; `None` means `1 / chromosome length`.
    pub mutation_rate: Option<f64>,
    pub crossover_rate: f64,
    pub selective_pressure: f64,
    /// Stop after this many generations without a better best fitness.
    pub stall_generations: Option<usize>,
    pub memoize: bool,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            nvar: 9,
            preci: 20,
            nind: 20,
            maxgen: 100,
            migr: 0.2,
            insr: 0.95,
            subpop: 5,
            miggen: 20,
            mutation_rate: None,
            crossover_rate: 0.9,
            selective_pressure: 2.0,
            stall_generations: Some(25),
            memoize: true,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("ga: {m}")));
        if !(self.migr > 0.0 && self.migr <= 1.0) {
            return bad(format!("migr must be in (0, 1], got {}", self.migr));
        }
        if !(self.insr > 0.0 && self.insr <= 1.0) {
            return bad(format!("insr must be in (0, 1], got {}", self.insr));
        }
        if self.subpop < 1 || self.miggen < 1 || self.maxgen < 1 {
            return bad("subpop, miggen and maxgen must be at least 1".into());
        }
        if self.nind < 2 {
            return bad(format!("nind must be at least 2, got {}", self.nind));
        }
        if !(1.0..=2.0).contains(&self.selective_pressure) {
            return bad(format!("selective_pressure must be in [1, 2], got {}", self.selective_pressure));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad(format!("crossover_rate must be in [0, 1], got {}", self.crossover_rate));
        }
        if let Some(r) = self.mutation_rate {
            if !(0.0..=1.0).contains(&r) {
                return bad(format!("mutation_rate must be in [0, 1], got {r}"));
            }
        }
        Ok(())
    }

    /// Migrants per subpopulation per migration event.
    pub fn migrants(&self) -> usize {
        migrant_count(self.migr, self.nind)
    }
}

fn migrant_count(migr: f64, nind: usize) -> usize {
    ((migr * nind as f64 - 1e-9).ceil() as usize).clamp(1, nind)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub chromosome: Chromosome,
    pub fitness: f64,
}

/// `a` ranks above `b`: higher fitness, then fewer set bits, then the
/// lexicographically smaller mask.
pub fn better(a: &Individual, b: &Individual) -> bool {
    rank_order(a, b) == Ordering::Less
}

fn rank_order(a: &Individual, b: &Individual) -> Ordering {
    b.fitness
        .total_cmp(&a.fitness)
        .then(a.chromosome.count_ones().cmp(&b.chromosome.count_ones()))
        .then(a.chromosome.bits.cmp(&b.chromosome.bits))
}

/// Scores a mask. Implemented for closures returning the fitness directly.
pub trait FitnessFn {
    fn evaluate(&self, ch: &Chromosome) -> Result<f64>;
}

impl<T: Fn(&Chromosome) -> f64> FitnessFn for T {
    fn evaluate(&self, ch: &Chromosome) -> Result<f64> {
        Ok(self(ch))
    }
}

/// Mean stratified k-fold accuracy of a wrapper learner on the masked columns.
pub struct WrapperFitness<'a, F: Float> {
    ds: &'a Dataset<F>,
    wrapper: LearnerSpec,
    plan: FoldPlan,
}

impl<'a, F: Float> WrapperFitness<'a, F> {
    pub fn new(ds: &'a Dataset<F>, wrapper: LearnerSpec, cv_k: usize, seed: u64) -> Result<Self> {
        wrapper.validate()?;
        let plan = fold_plan_for_labels(ds.labels(), cv_k, true, seed)?;
        for fold in 0..cv_k {
            if !ds.subset(&plan.train_indices(fold)).has_both_classes() {
                return Err(Error::DegenerateFold {
                    fold,
                    message: "wrapper training part holds a single class".into(),
                });
            }
        }
        Ok(Self { ds, wrapper, plan })
    }

    pub fn dataset(&self) -> &Dataset<F> {
        self.ds
    }
}

impl<F: Float> FitnessFn for WrapperFitness<'_, F> {
    fn evaluate(&self, ch: &Chromosome) -> Result<f64> {
        if ch.len() != self.ds.n_features() {
            return Err(Error::ShapeMismatch { expected: self.ds.n_features(), got: ch.len() });
        }
        let cols = ch.selected();
        if cols.is_empty() {
            return Err(Error::Config("cannot evaluate an empty feature mask".into()));
        }
        let masked = self.ds.select_features(&cols);
        let mut total = 0.0;
        for fold in 0..self.plan.k {
            let train = masked.subset(&self.plan.train_indices(fold));
            let test = masked.subset(&self.plan.test_indices(fold));
            let model = learners::train(&self.wrapper, &train)?;
            let pred = model.predict(test.features())?;
            let hits = pred.iter().zip(test.labels()).filter(|(a, b)| a == b).count();
            total += hits as f64 / test.n_samples() as f64;
        }
        Ok(total / self.plan.k as f64)
    }
}

/// Wrapper fitness of one mask.
pub fn fitness<F: Float>(
    ch: &Chromosome,
    ds: &Dataset<F>,
    wrapper: &LearnerSpec,
    cv_k: usize,
    seed: u64,
) -> Result<f64> {
    WrapperFitness::new(ds, wrapper.clone(), cv_k, seed)?.evaluate(ch)
}

/// `subpop` groups of `nind` random masks of `len` bits, all-zero masks repaired.
pub fn init_population(config: &GaConfig, len: usize, rng: &mut Rng) -> Vec<Vec<Chromosome>> {
    (0..config.subpop)
        .map(|_| {
            (0..config.nind)
                .map(|_| {
                    let mut ch = Chromosome::new((0..len).map(|_| rng.random::<bool>()).collect());
                    ch.repair(rng);
                    ch
                })
                .collect()
        })
        .collect()
}

/// Linear-ranking selection weights. The worst individual has rank 1 and
/// weight `2 - sp`; the best has rank `N` and weight `sp`. Tied fitnesses
/// share the mean weight of their rank block. Weights sum to `N`.
pub fn rank_scale(fitnesses: &[f64], selective_pressure: f64) -> Vec<f64> {
    let n = fitnesses.len();
    if n <= 1 {
        return vec![1.0; n];
    }
    let sp = selective_pressure;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| fitnesses[a].total_cmp(&fitnesses[b]));
    let weight = |r: usize| 2.0 - sp + 2.0 * (sp - 1.0) * (r - 1) as f64 / (n - 1) as f64;
    let mut out = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && fitnesses[order[end]] == fitnesses[order[start]] {
            end += 1;
        }
        let mean = (start + 1..=end).map(weight).sum::<f64>() / (end - start) as f64;
        for &i in &order[start..end] {
            out[i] = mean;
        }
        start = end;
    }
    out
}

/// `count` indices drawn with replacement, each with probability
/// proportional to its weight.
pub fn roulette_select(weights: &[f64], count: usize, rng: &mut Rng) -> Result<Vec<usize>> {
    if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return Err(Error::Config("roulette weights must be finite and non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::Config("roulette weights are all zero".into()));
    }
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for &w in weights {
        acc += w;
        cumulative.push(acc);
    }
    let last = weights.iter().rposition(|&w| w > 0.0).expect("a positive weight exists");
    Ok((0..count)
        .map(|_| {
            let u = rng.random::<f64>() * total;
            // First slot whose cumulative weight exceeds u; zero-weight slots never qualify.
            cumulative.partition_point(|&c| c <= u).min(last)
        })
        .collect())
}

/// Swaps the segment `[p, q)` between the parents.
pub fn crossover_with_cuts(a: &Chromosome, b: &Chromosome, p: usize, q: usize) -> (Chromosome, Chromosome) {
    let mut x = a.clone();
    let mut y = b.clone();
    x.bits[p..q].copy_from_slice(&b.bits[p..q]);
    y.bits[p..q].copy_from_slice(&a.bits[p..q]);
    (x, y)
}

/// Double-point crossover with two distinct cut points `p < q` drawn
/// uniformly from `0..=len`. Parents shorter than 2 come back unchanged.
pub fn crossover_double_point(a: &Chromosome, b: &Chromosome, rng: &mut Rng) -> (Chromosome, Chromosome) {
    let len = a.len();
    if len < 2 || b.len() != len {
        return (a.clone(), b.clone());
    }
    let cuts = rand::seq::index::sample(rng, len + 1, 2);
    let (p, q) = (cuts.index(0).min(cuts.index(1)), cuts.index(0).max(cuts.index(1)));
    crossover_with_cuts(a, b, p, q)
}

/// Flips each bit with probability `rate`, then repairs an all-zero result.
pub fn mutate_bit_inversion(ch: &Chromosome, rate: f64, rng: &mut Rng) -> Chromosome {
    let mut out = ch.clone();
    for b in &mut out.bits {
        if rng.random::<f64>() < rate {
            *b = !*b;
        }
    }
    out.repair(rng);
    out
}

fn sort_best_first(pop: &mut [Individual]) {
    pop.sort_by(rank_order);
}

/// Replaces the `floor(insr * N)` least-fit parents with the fittest
/// offspring. If that would drop the best parent below every survivor, it
/// takes the place of the weakest survivor.
pub fn reinsert_fitness_based(parents: &[Individual], offspring: &[Individual], insr: f64) -> Vec<Individual> {
    let n = parents.len();
    let n_ins = ((insr * n as f64 + 1e-9).floor() as usize).min(offspring.len()).min(n);
    let mut kept = parents.to_vec();
    sort_best_first(&mut kept);
    let best_parent = kept.first().cloned();
    kept.truncate(n - n_ins);
    let mut kids = offspring.to_vec();
    sort_best_first(&mut kids);
    kept.extend(kids.into_iter().take(n_ins));
    sort_best_first(&mut kept);
    if let Some(bp) = best_parent {
        if kept.first().is_some_and(|top| better(&bp, top)) {
            kept.pop();
            kept.insert(0, bp);
        }
    }
    kept
}

/// Ring migration: subpopulation `i` sends copies of its best
/// `ceil(migr * nind)` individuals to subpopulation `i + 1`, where they
/// replace the worst. All emigrants are chosen before any are placed.
pub fn migrate(pops: &mut [Vec<Individual>], migr: f64) {
    let s = pops.len();
    if s < 2 {
        return;
    }
    let emigrants: Vec<Vec<Individual>> = pops
        .iter()
        .map(|pop| {
            let mut sorted = pop.clone();
            sort_best_first(&mut sorted);
            sorted.truncate(migrant_count(migr, pop.len()));
            sorted
        })
        .collect();
    for (i, group) in emigrants.into_iter().enumerate() {
        let dest = &mut pops[(i + 1) % s];
        sort_best_first(dest);
        let keep = dest.len() - group.len();
        dest.truncate(keep);
        dest.extend(group);
        sort_best_first(dest);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub subpop: usize,
    pub best: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaRun {
    pub best_chromosome: Chromosome,
    pub best_fitness: f64,
    /// One entry per (generation, subpopulation); generation 0 is the initial population.
    pub history: Vec<GenerationStats>,
    /// Fitness requests, cache hits included.
    pub evaluations: usize,
    /// Requests that actually ran the fitness function.
    pub distinct_evaluations: usize,
    pub generations: usize,
    pub stopped_early: bool,
    pub final_population: Vec<Vec<Individual>>,
}

impl GaRun {
    /// Best fitness across subpopulations at each recorded generation.
    pub fn best_per_generation(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for h in &self.history {
            if h.generation == out.len() {
                out.push(h.best);
            } else {
                let last = out.last_mut().expect("generation entries are contiguous");
                *last = last.max(h.best);
            }
        }
        out
    }

    /// Share of the final population that includes each feature.
    pub fn selection_frequency(&self) -> Vec<f64> {
        let len = self.best_chromosome.len();
        let mut counts = vec![0usize; len];
        let mut total = 0usize;
        for ind in self.final_population.iter().flatten() {
            total += 1;
            for i in ind.chromosome.selected() {
                counts[i] += 1;
            }
        }
        counts.into_iter().map(|c| c as f64 / total.max(1) as f64).collect()
    }

    pub fn history_csv(&self) -> String {
        let mut s = String::from("generation,subpop,best,mean\n");
        for h in &self.history {
            let _ = writeln!(s, "{},{},{},{}", h.generation, h.subpop, h.best, h.mean);
        }
        s
    }

    /// JSON list of the selected feature names.
    pub fn mask_json(&self, feature_names: &[String]) -> Result<String> {
        let names: Vec<&String> = self.best_chromosome.selected().into_iter().map(|i| &feature_names[i]).collect();
        Ok(serde_json::to_string_pretty(&names)?)
    }
}

struct Evaluator<'a, T: FitnessFn + ?Sized> {
    f: &'a T,
    cache: Option<HashMap<Chromosome, f64>>,
    requests: usize,
    computed: usize,
    best: Option<Individual>,
}

impl<T: FitnessFn + ?Sized> Evaluator<'_, T> {
    fn eval(&mut self, ch: Chromosome) -> Result<Individual> {
        self.requests += 1;
        let cached = self.cache.as_ref().and_then(|c| c.get(&ch).copied());
        let fitness = match cached {
            Some(v) => v,
            None => {
                self.computed += 1;
                let v = self.f.evaluate(&ch)?;
                if let Some(c) = self.cache.as_mut() {
                    c.insert(ch.clone(), v);
                }
                v
            }
        };
        let ind = Individual { chromosome: ch, fitness };
        if self.best.as_ref().is_none_or(|b| better(&ind, b)) {
            self.best = Some(ind.clone());
        }
        Ok(ind)
    }
}

fn stats(generation: usize, subpop: usize, pop: &[Individual]) -> GenerationStats {
    let best = pop.iter().map(|i| i.fitness).fold(f64::NEG_INFINITY, f64::max);
    let mean = pop.iter().map(|i| i.fitness).sum::<f64>() / pop.len() as f64;
    GenerationStats { generation, subpop, best, mean }
}

/// Runs the island GA over masks of `len` bits.
pub fn run_ga<T: FitnessFn + ?Sized>(config: &GaConfig, len: usize, fitness: &T) -> Result<GaRun> {
    config.validate()?;
    if len == 0 {
        return Err(Error::Config("ga: chromosome length must be at least 1".into()));
    }
    let mut rng = rng::rng_from_seed(config.seed);
    let mutation_rate = config.mutation_rate.unwrap_or(1.0 / len as f64);
    let mut ev =
        Evaluator { f: fitness, cache: config.memoize.then(HashMap::new), requests: 0, computed: 0, best: None };
    let mut pops: Vec<Vec<Individual>> = Vec::with_capacity(config.subpop);
    for group in init_population(config, len, &mut rng) {
        pops.push(group.into_iter().map(|c| ev.eval(c)).collect::<Result<_>>()?);
    }
    let mut history: Vec<GenerationStats> = pops.iter().enumerate().map(|(s, p)| stats(0, s, p)).collect();
    let mut best_so_far = ev.best.as_ref().expect("population is non-empty").fitness;
    let mut stall = 0;
    let mut generations = 0;
    let mut stopped_early = false;
    for gen in 1..=config.maxgen {
        generations = gen;
        for pop in pops.iter_mut() {
            let weights = rank_scale(&pop.iter().map(|i| i.fitness).collect::<Vec<_>>(), config.selective_pressure);
            let picks = roulette_select(&weights, pop.len(), &mut rng)?;
            let mut kids = Vec::with_capacity(pop.len());
            for pair in picks.chunks(2) {
                let a = &pop[pair[0]].chromosome;
                match pair.get(1) {
                    Some(&j) => {
                        let b = &pop[j].chromosome;
                        let (x, y) = if rng.random::<f64>() < config.crossover_rate {
                            crossover_double_point(a, b, &mut rng)
                        } else {
                            (a.clone(), b.clone())
                        };
                        kids.push(x);
                        kids.push(y);
                    }
                    None => kids.push(a.clone()),
                }
            }
            let kids: Vec<Individual> = kids
                .into_iter()
                .map(|c| ev.eval(mutate_bit_inversion(&c, mutation_rate, &mut rng)))
                .collect::<Result<_>>()?;
            *pop = reinsert_fitness_based(pop, &kids, config.insr);
        }
        if gen % config.miggen == 0 {
            migrate(&mut pops, config.migr);
        }
        history.extend(pops.iter().enumerate().map(|(s, p)| stats(gen, s, p)));
        let current = ev.best.as_ref().expect("evaluated").fitness;
        if current > best_so_far {
            best_so_far = current;
            stall = 0;
        } else {
            stall += 1;
        }
        if config.stall_generations.is_some_and(|limit| stall >= limit) {
            stopped_early = gen < config.maxgen;
            break;
        }
    }
    let best = ev.best.clone().expect("evaluated");
    Ok(GaRun {
        best_chromosome: best.chromosome,
        best_fitness: best.fitness,
        history,
        evaluations: ev.requests,
        distinct_evaluations: ev.computed,
        generations,
        stopped_early,
        final_population: pops,
    })
}

/// GA feature selection on `ds` with a cross-validated wrapper learner.
pub fn select_features<F: Float>(
    config: &GaConfig,
    ds: &Dataset<F>,
    wrapper: &LearnerSpec,
    cv_k: usize,
) -> Result<GaRun> {
    let f = WrapperFitness::new(ds, wrapper.clone(), cv_k, rng::derive_seed(config.seed, 1))?;
    run_ga(config, ds.n_features(), &f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ind(bits: &str, fitness: f64) -> Individual {
        Individual { chromosome: Chromosome::parse(bits).unwrap(), fitness }
    }

    #[test]
    fn rank_scale_examples() {
        assert_eq!(rank_scale(&[0.1, 0.9], 2.0), vec![0.0, 2.0]);
        assert_eq!(rank_scale(&[0.3, 0.1, 0.2], 1.0), vec![1.0; 3]);
        assert_eq!(rank_scale(&[0.5, 0.5], 2.0), vec![1.0, 1.0]);
        assert_eq!(rank_scale(&[7.0], 2.0), vec![1.0]);
    }

    #[test]
    fn crossover_example() {
        let (x, y) = crossover_with_cuts(&Chromosome::ones(6), &Chromosome::new(vec![false; 6]), 2, 4);
        assert_eq!((x.to_string(), y.to_string()), ("110011".into(), "001100".into()));
    }

    #[test]
    fn short_parents_are_unchanged() {
        let mut rng = rng::rng_from_seed(0);
        let a = Chromosome::ones(1);
        let b = Chromosome::new(vec![false]);
        assert_eq!(crossover_double_point(&a, &b, &mut rng), (a, b));
    }

    #[test]
    fn single_bit_population_is_repaired() {
        let mut rng = rng::rng_from_seed(4);
        let pops = init_population(&GaConfig::default(), 1, &mut rng);
        assert_eq!(pops.len(), 5);
        assert!(pops.iter().all(|p| p.len() == 20 && p.iter().all(|c| c.bits == [true])));
    }

    #[test]
    fn reinsertion_keeps_best_parent() {
        let parents: Vec<Individual> = (0..20).map(|i| ind("1", i as f64)).collect();
        let kids: Vec<Individual> = (0..20).map(|i| ind("1", i as f64 * 0.1)).collect();
        let out = reinsert_fitness_based(&parents, &kids, 0.95);
        assert_eq!(out.len(), 20);
        assert_eq!(out[0].fitness, 19.0);
        assert_eq!(out.iter().filter(|i| i.fitness >= 2.0).count(), 1);
    }

    #[test]
    fn reinsertion_edge_rates() {
        let parents = vec![ind("10", 0.2), ind("01", 0.3)];
        let kids = vec![ind("11", 0.8), ind("11", 0.9)];
        let same = reinsert_fitness_based(&parents, &kids, 0.1);
        assert_eq!(same.iter().map(|i| i.fitness).collect::<Vec<_>>(), vec![0.3, 0.2]);
        let all = reinsert_fitness_based(&parents, &kids, 1.0);
        assert_eq!(all.iter().map(|i| i.fitness).collect::<Vec<_>>(), vec![0.9, 0.8]);
    }

    #[test]
    fn migration_counts() {
        let cfg = GaConfig::default();
        assert_eq!(cfg.migrants(), 4);
        assert_eq!(migrant_count(0.01, 20), 1);
        let mut pops: Vec<Vec<Individual>> =
            (0..2).map(|s| (0..5).map(|i| ind("1", (s * 10 + i) as f64)).collect()).collect();
        migrate(&mut pops, 0.2);
        assert_eq!(pops[1].iter().map(|i| i.fitness).collect::<Vec<_>>(), vec![14.0, 13.0, 12.0, 11.0, 4.0]);
        assert_eq!(pops[0].iter().map(|i| i.fitness).collect::<Vec<_>>(), vec![14.0, 4.0, 3.0, 2.0, 1.0]);
    }

    #[test]
    fn best_prefers_fewer_bits_then_lexicographic() {
        assert!(better(&ind("100", 0.5), &ind("110", 0.5)));
        assert!(better(&ind("010", 0.5), &ind("100", 0.5)));
        assert!(better(&ind("111", 0.6), &ind("100", 0.5)));
    }

    #[test]
    fn config_validation() {
        assert!(GaConfig::default().validate().is_ok());
        assert!(GaConfig { migr: 0.0, ..GaConfig::default() }.validate().is_err());
        assert!(GaConfig { nind: 1, ..GaConfig::default() }.validate().is_err());
        assert!(GaConfig { selective_pressure: 2.5, ..GaConfig::default() }.validate().is_err());
    }
}
