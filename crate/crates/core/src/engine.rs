//! Generational GP with strict offspring selection.
//!
//! Each generation starts from a copy of the best member and is filled only
//! with children that are strictly better than the better of their two
//! parents. The number of evaluations spent filling a generation, divided by
//! the population size, is the generation's selection pressure. A run stops
//! when that pressure exceeds its maximum or the evaluation budget is spent.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::genops::{ptc2, single_point_mutation, CrossoverKind};
use crate::interp::{MemoEvaluator, Quality};
use crate::problems::Problem;
use crate::runlog::{GenerationLog, RunLog, Termination};
use crate::trees::ExpressionTree;

/// Offspring-selection parameters. Elitism is fixed at one individual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OsParams {
    pub population_size: usize,
    pub mutation_rate: f64,
    pub crossover: CrossoverKind,
    pub max_selection_pressure: f64,
    pub max_evaluations: u64,
}

impl OsParams {
    pub const ELITISM: usize = 1;

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::config("population_size", "must be at least 2"));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::config(
                "mutation_rate",
                format!("{} is not a probability in [0, 1]", self.mutation_rate),
            ));
        }
        if !(self.max_selection_pressure > 1.0 && self.max_selection_pressure.is_finite()) {
            return Err(Error::config(
                "max_selection_pressure",
                format!("{} must be finite and > 1", self.max_selection_pressure),
            ));
        }
        if self.max_evaluations == 0 {
            return Err(Error::config("max_evaluations", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub tree: ExpressionTree,
    pub quality: Quality,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation: usize,
}

impl Population {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Index of the best member; ties go to the lowest index.
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, m) in self.members.iter().enumerate().skip(1) {
            if m.quality < self.members[best].quality {
                best = i;
            }
        }
        best
    }

    pub fn best(&self) -> &Individual {
        &self.members[self.best_index()]
    }

    pub fn average_tree_size(&self) -> f64 {
        let total: usize = self.members.iter().map(|m| m.tree.len()).sum();
        total as f64 / self.members.len() as f64
    }

    pub fn qualities(&self) -> Vec<Quality> {
        self.members.iter().map(|m| m.quality).collect()
    }
}

/// Fitness-proportional sampler for a minimized quality. Member `i` gets
/// weight `worst_finite - q_i`; members at the worst sentinel get zero.
/// When every weight is zero the draw is uniform.
#[derive(Clone, Debug)]
pub struct ProportionalSampler {
    cumulative: Vec<f64>,
    len: usize,
}

impl ProportionalSampler {
    pub fn new(qualities: &[Quality]) -> Result<Self> {
        if qualities.is_empty() {
            return Err(Error::PopulationTooSmall { needed: 1, got: 0 });
        }
        let finite = || qualities.iter().filter(|q| !q.is_worst()).map(|q| q.value());
        let worst = finite().fold(f64::NEG_INFINITY, f64::max);
        let best = finite().fold(f64::INFINITY, f64::min);
        let len = qualities.len();
        if !(worst > best) {
            return Ok(ProportionalSampler {
                cumulative: Vec::new(),
                len,
            });
        }
        // Normalizing by the spread keeps the weights in [0, 1] even for
        // qualities near f64::MAX.
        let spread = worst - best;
        let mut acc = 0.0;
        let cumulative = qualities
            .iter()
            .map(|q| {
                if !q.is_worst() {
                    acc += (worst - q.value()) / spread;
                }
                acc
            })
            .collect();
        Ok(ProportionalSampler { cumulative, len })
    }

    pub fn is_uniform(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match self.cumulative.last() {
            None => rng.random_range(0..self.len),
            Some(&total) => {
                let u = rng.random::<f64>() * total;
                let i = self.cumulative.partition_point(|&c| c <= u);
                // u < total, so i < len; skip zero-weight members sharing
                // the same cumulative value
                i.min(self.len - 1)
            }
        }
    }
}

pub fn proportional_select<R: Rng + ?Sized>(pop: &Population, rng: &mut R) -> Result<usize> {
    Ok(ProportionalSampler::new(&pop.qualities())?.sample(rng))
}

/// First parent fitness-proportional, second uniform. They may coincide.
pub fn select_parents<R: Rng + ?Sized>(pop: &Population, rng: &mut R) -> Result<(usize, usize)> {
    if pop.len() < 2 {
        return Err(Error::PopulationTooSmall {
            needed: 2,
            got: pop.len(),
        });
    }
    let sampler = ProportionalSampler::new(&pop.qualities())?;
    Ok(select_with(&sampler, pop.len(), rng))
}

fn select_with<R: Rng + ?Sized>(sampler: &ProportionalSampler, n: usize, rng: &mut R) -> (usize, usize) {
    let first = sampler.sample(rng);
    let second = rng.random_range(0..n);
    (first, second)
}

/// One candidate child and how it came about.
#[derive(Clone, Debug)]
pub struct Offspring {
    pub individual: Individual,
    /// Strictly better than the better parent.
    pub success: bool,
    pub parents: (usize, usize),
    pub parent_qualities: (Quality, Quality),
    pub operator: CrossoverKind,
    pub mutated: bool,
}

/// Mutable state shared by all evaluations of one run.
#[derive(Debug)]
pub struct EvalContext<'a> {
    pub problem: &'a Problem,
    evaluator: MemoEvaluator<'a>,
    evaluations: u64,
}

impl<'a> EvalContext<'a> {
    pub fn new(problem: &'a Problem) -> Self {
        EvalContext {
            problem,
            evaluator: MemoEvaluator::new(&problem.dataset),
            evaluations: 0,
        }
    }

    /// Total fitness evaluations performed so far.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn evaluate(&mut self, tree: &ExpressionTree) -> Result<Quality> {
        self.evaluations += 1;
        self.evaluator.fitness(tree)
    }
}

/// Selects parents, recombines, maybe mutates, and evaluates the child
/// exactly once.
pub fn try_create_offspring<R: Rng + ?Sized>(
    pop: &Population,
    sampler: &ProportionalSampler,
    params: &OsParams,
    ctx: &mut EvalContext<'_>,
    rng: &mut R,
) -> Result<Offspring> {
    let (i, j) = select_with(sampler, pop.len(), rng);
    let (p1, p2) = (&pop.members[i], &pop.members[j]);
    let (mut child, operator) = params.crossover.apply(&p1.tree, &p2.tree, rng);
    let mutated = rng.random_bool(params.mutation_rate);
    if mutated {
        child = single_point_mutation(&child, rng, &ctx.problem.prims).tree;
    }
    let quality = ctx.evaluate(&child)?;
    let better_parent = p1.quality.min(p2.quality);
    Ok(Offspring {
        individual: Individual {
            tree: child,
            quality,
        },
        success: quality.is_better_than(better_parent),
        parents: (i, j),
        parent_qualities: (p1.quality, p2.quality),
        operator,
        mutated,
    })
}

/// Hooks for inspecting a run as it progresses.
pub trait Observer {
    fn offspring(&mut self, _offspring: &Offspring) {}

    /// Called for the initial population and after every completed
    /// generation.
    fn generation(&mut self, _population: &Population, _log: &GenerationLog) {}
}

impl Observer for () {}

#[derive(Debug)]
pub struct GenerationOutcome {
    /// The new generation, or the unchanged input when filling was aborted.
    pub population: Population,
    pub log: GenerationLog,
    /// Evaluations spent on this generation.
    pub evaluations: u64,
    pub terminated: Option<Termination>,
}

/// Fills one generation. Filling aborts, keeping `pop`, once the spent
/// evaluations divided by the population size exceed the maximum selection
/// pressure, or once the run's evaluation budget is used up.
pub fn run_generation<R: Rng + ?Sized, O: Observer + ?Sized>(
    pop: &Population,
    params: &OsParams,
    ctx: &mut EvalContext<'_>,
    rng: &mut R,
    observer: &mut O,
) -> Result<GenerationOutcome> {
    let size = params.population_size;
    let sampler = ProportionalSampler::new(&pop.qualities())?;
    let mut next = Vec::with_capacity(size);
    next.push(pop.best().clone());

    let start = ctx.evaluations();
    let spent = |ctx: &EvalContext<'_>| ctx.evaluations() - start;
    let mut terminated = None;
    while next.len() < size {
        if ctx.evaluations() >= params.max_evaluations {
            terminated = Some(Termination::EvaluationBudget);
            break;
        }
        let off = try_create_offspring(pop, &sampler, params, ctx, rng)?;
        observer.offspring(&off);
        if off.success {
            next.push(off.individual);
        }
        if next.len() < size && spent(ctx) as f64 / size as f64 > params.max_selection_pressure {
            terminated = Some(Termination::SelectionPressure);
            break;
        }
    }

    let evaluations = spent(ctx);
    let population = if terminated.is_some() {
        Population {
            members: pop.members.clone(),
            generation: pop.generation,
        }
    } else {
        Population {
            members: next,
            generation: pop.generation + 1,
        }
    };
    let log = GenerationLog {
        generation: pop.generation + 1,
        evaluations: ctx.evaluations(),
        best_quality: population.best().quality.value(),
        avg_tree_size: population.average_tree_size(),
        selection_pressure: evaluations as f64 / size as f64,
    };
    Ok(GenerationOutcome {
        population,
        log,
        evaluations,
        terminated,
    })
}

/// Random initial population: PTC2 trees with target sizes uniform in
/// `init_size`, each evaluated once.
pub fn initialize<R: Rng + ?Sized>(
    params: &OsParams,
    init_size: (usize, usize),
    ctx: &mut EvalContext<'_>,
    rng: &mut R,
) -> Result<Population> {
    let mut members = Vec::with_capacity(params.population_size);
    for _ in 0..params.population_size {
        let target = rng.random_range(init_size.0..=init_size.1);
        let tree = ptc2(rng, target, &ctx.problem.prims);
        let quality = ctx.evaluate(&tree)?;
        members.push(Individual { tree, quality });
    }
    Ok(Population {
        members,
        generation: 0,
    })
}

/// Runs a configured experiment with the given seed.
pub fn run(config: &RunConfig, seed: u64) -> Result<RunLog> {
    run_observed(config, seed, &mut ())
}

pub fn run_observed<O: Observer + ?Sized>(config: &RunConfig, seed: u64, observer: &mut O) -> Result<RunLog> {
    config.validate()?;
    let problem = config.build_problem(seed)?;
    let (population, mut log) = evolve(
        &problem,
        &config.params(),
        (config.init_min_size, config.init_max_size),
        seed,
        observer,
    )?;
    let best = population.best();
    log.best_tree = problem.prims.render(&best.tree);
    log.config = config.clone();
    Ok(log)
}

/// Core loop: initialize, then fill generations until a stop condition.
/// Returns the final population and a log whose `config` is the default
/// for the problem; [`run`] fills in the real one.
pub fn evolve<O: Observer + ?Sized>(
    problem: &Problem,
    params: &OsParams,
    init_size: (usize, usize),
    seed: u64,
    observer: &mut O,
) -> Result<(Population, RunLog)> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ctx = EvalContext::new(problem);
    let mut pop = initialize(params, init_size, &mut ctx, &mut rng)?;
    let size = params.population_size;
    let first = GenerationLog {
        generation: 0,
        evaluations: ctx.evaluations(),
        best_quality: pop.best().quality.value(),
        avg_tree_size: pop.average_tree_size(),
        selection_pressure: ctx.evaluations() as f64 / size as f64,
    };
    observer.generation(&pop, &first);
    let mut generations = vec![first];

    let termination = loop {
        if ctx.evaluations() >= params.max_evaluations {
            break Termination::EvaluationBudget;
        }
        let outcome = run_generation(&pop, params, &mut ctx, &mut rng, observer)?;
        generations.push(outcome.log.clone());
        if let Some(reason) = outcome.terminated {
            break reason;
        }
        observer.generation(&outcome.population, &outcome.log);
        pop = outcome.population;
    };

    let best = pop.best();
    let log = RunLog {
        config: RunConfig {
            population_size: params.population_size,
            mutation_rate: params.mutation_rate,
            crossover: params.crossover,
            max_selection_pressure: params.max_selection_pressure,
            max_evaluations: params.max_evaluations,
            init_min_size: init_size.0,
            init_max_size: init_size.1,
            seed,
            ..RunConfig::new(problem.kind)
        },
        seed,
        generations,
        best_tree: problem.prims.render(&best.tree),
        best_quality: best.quality.value(),
        total_evaluations: ctx.evaluations(),
        termination,
    };
    Ok((pop, log))
}
