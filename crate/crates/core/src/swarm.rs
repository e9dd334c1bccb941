//! Binary particle swarm search over secondary-link activations.
//!
//! Each particle carries a continuous position and velocity per link. Velocity
//! follows the inertia/cognitive/social update, position integrates velocity,
//! and the bit vector is resampled through a sigmoid transfer of the position.
//! Personal and global bests are tracked on the penalized fitness.
//!
//! Random draws come from a single ChaCha8 stream in a fixed order so runs
//! replay exactly:
//!
//! * initialization, particle by particle: `M` position draws in `[-1, 1]`,
//!   then `M` binarization draws;
//! * every iteration, particle by particle: `M` draws of `r1`, `M` draws of
//!   `r2`, then `M` binarization draws.
//!
//! Within an iteration every particle uses the global best from the end of
//! the previous iteration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;
use crate::sharing::{ActivationVector, GainTable, SharingInstance, SharingSolution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoConfig<T> {
    pub swarm_size: usize,
    pub iterations: usize,
    pub inertia: T,
    pub cognitive: T,
    pub social: T,
    pub velocity_clamp: T,
    /// Fitness deducted per violated constraint. `None` uses ten times the
    /// interference-free capacity bound of the instance.
    pub infeasibility_penalty: Option<T>,
    pub seed: u64,
}

impl<T: Real> Default for PsoConfig<T> {
    fn default() -> Self {
        Self {
            swarm_size: 40,
            iterations: 200,
            inertia: T::lit(0.7),
            cognitive: T::lit(1.5),
            social: T::lit(1.5),
            velocity_clamp: T::lit(4.0),
            infeasibility_penalty: None,
            seed: 0,
        }
    }
}

impl<T: Real> PsoConfig<T> {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.swarm_size == 0 {
            return Err(Error::Config("swarm_size must be at least 1".into()));
        }
        if !(self.inertia >= T::zero() && self.inertia <= T::one()) {
            return Err(Error::domain(
                "inertia",
                "in [0, 1]",
                self.inertia.to_f64_lossy(),
            ));
        }
        if !(self.cognitive >= T::zero()) {
            return Err(Error::domain(
                "cognitive coefficient",
                ">= 0",
                self.cognitive.to_f64_lossy(),
            ));
        }
        if !(self.social >= T::zero()) {
            return Err(Error::domain(
                "social coefficient",
                ">= 0",
                self.social.to_f64_lossy(),
            ));
        }
        if !(self.velocity_clamp > T::zero()) {
            return Err(Error::domain(
                "velocity clamp",
                "> 0",
                self.velocity_clamp.to_f64_lossy(),
            ));
        }
        if let Some(p) = self.infeasibility_penalty {
            if !(p >= T::zero()) {
                return Err(Error::domain(
                    "infeasibility penalty",
                    ">= 0",
                    p.to_f64_lossy(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle<T> {
    pub position: Vec<T>,
    pub velocity: Vec<T>,
    pub bits: ActivationVector,
    pub pbest_bits: ActivationVector,
    pub pbest_fitness: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState<T> {
    pub particles: Vec<Particle<T>>,
    pub gbest_bits: ActivationVector,
    pub gbest_fitness: T,
    pub iteration: usize,
}

/// `v' = ω v + c1 r1 (pbest - y) + c2 r2 (gbest - y)`, clamped componentwise.
pub fn update_velocity<T: Real>(
    velocity: &[T],
    position: &[T],
    pbest: &[T],
    gbest: &[T],
    cfg: &PsoConfig<T>,
    r1: &[T],
    r2: &[T],
) -> Vec<T> {
    let clamp = cfg.velocity_clamp;
    (0..velocity.len())
        .map(|d| {
            let v = cfg.inertia * velocity[d]
                + cfg.cognitive * r1[d] * (pbest[d] - position[d])
                + cfg.social * r2[d] * (gbest[d] - position[d]);
            v.max(-clamp).min(clamp)
        })
        .collect()
}

/// `y' = y + v'`.
pub fn update_position<T: Real>(position: &[T], velocity: &[T]) -> Vec<T> {
    position
        .iter()
        .zip(velocity)
        .map(|(&y, &v)| y + v)
        .collect()
}

#[inline]
fn sigmoid<T: Real>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

/// Bit `d` is set iff `draws[d] < sigmoid(position[d])`.
pub fn binarize<T: Real>(position: &[T], draws: &[T]) -> ActivationVector {
    ActivationVector::from_bits(
        position
            .iter()
            .zip(draws)
            .map(|(&y, &u)| u < sigmoid(y))
            .collect(),
    )
}

fn bits_as_reals<T: Real>(bits: &ActivationVector) -> Vec<T> {
    bits.iter()
        .map(|b| if b { T::one() } else { T::zero() })
        .collect()
}

/// Penalized objective used to rank particles.
#[derive(Debug, Clone)]
pub struct Fitness<T> {
    table: GainTable<T>,
    penalty: T,
}

impl<T: Real> Fitness<T> {
    pub fn new(instance: &SharingInstance<T>, penalty: Option<T>) -> Self {
        let table = instance.gains();
        let penalty = penalty.unwrap_or_else(|| T::lit(10.0) * table.interference_free_bound());
        Self { table, penalty }
    }

    pub fn penalty(&self) -> T {
        self.penalty
    }

    pub fn table(&self) -> &GainTable<T> {
        &self.table
    }

    pub fn eval(&self, bits: &ActivationVector) -> T {
        let (objective, violations) = self.table.score(bits.as_slice());
        if violations == 0 {
            objective
        } else {
            objective - self.penalty * T::lit(violations as f64)
        }
    }
}

/// Objective if feasible, otherwise objective minus `penalty` per violated
/// constraint. `None` selects the default penalty.
pub fn fitness<T: Real>(
    instance: &SharingInstance<T>,
    bits: &ActivationVector,
    penalty: Option<T>,
) -> Result<T> {
    if bits.len() != instance.secondary_count() {
        return Err(Error::LengthMismatch {
            expected: instance.secondary_count(),
            got: bits.len(),
        });
    }
    Ok(Fitness::new(instance, penalty).eval(bits))
}

pub struct Swarm<T> {
    cfg: PsoConfig<T>,
    fitness: Fitness<T>,
    state: SwarmState<T>,
    rng: ChaCha8Rng,
}

fn uniform_vec<T: Real>(rng: &mut ChaCha8Rng, len: usize) -> Vec<T> {
    (0..len).map(|_| T::lit(rng.random::<f64>())).collect()
}

impl<T: Real> Swarm<T> {
    pub fn new(instance: &SharingInstance<T>, cfg: PsoConfig<T>) -> Result<Self> {
        cfg.validate()?;
        instance.validate()?;
        let m = instance.secondary_count();
        if m == 0 {
            return Err(Error::NoSecondaryLinks);
        }
        let fitness = Fitness::new(instance, cfg.infeasibility_penalty);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

        let mut particles = Vec::with_capacity(cfg.swarm_size);
        for _ in 0..cfg.swarm_size {
            let position: Vec<T> = (0..m)
                .map(|_| T::lit(rng.random_range(-1.0..=1.0)))
                .collect();
            let draws = uniform_vec(&mut rng, m);
            let bits = binarize(&position, &draws);
            let f = fitness.eval(&bits);
            particles.push(Particle {
                position,
                velocity: vec![T::zero(); m],
                pbest_bits: bits.clone(),
                bits,
                pbest_fitness: f,
            });
        }
        let (gbest_bits, gbest_fitness) = best_of(&particles);
        Ok(Self {
            cfg,
            fitness,
            state: SwarmState {
                particles,
                gbest_bits,
                gbest_fitness,
                iteration: 0,
            },
            rng,
        })
    }

    pub fn state(&self) -> &SwarmState<T> {
        &self.state
    }

    pub fn fitness(&self) -> &Fitness<T> {
        &self.fitness
    }

    /// Advances one iteration and returns the global best fitness.
    pub fn step(&mut self) -> T {
        let m = self.state.gbest_bits.len();
        let gbest = bits_as_reals::<T>(&self.state.gbest_bits);
        for p in &mut self.state.particles {
            let r1 = uniform_vec::<T>(&mut self.rng, m);
            let r2 = uniform_vec::<T>(&mut self.rng, m);
            let pbest = bits_as_reals::<T>(&p.pbest_bits);
            p.velocity = update_velocity(
                &p.velocity,
                &p.position,
                &pbest,
                &gbest,
                &self.cfg,
                &r1,
                &r2,
            );
            p.position = update_position(&p.position, &p.velocity);
            let draws = uniform_vec::<T>(&mut self.rng, m);
            p.bits = binarize(&p.position, &draws);
            let f = self.fitness.eval(&p.bits);
            if f > p.pbest_fitness {
                p.pbest_fitness = f;
                p.pbest_bits = p.bits.clone();
            }
        }
        let (bits, f) = best_of(&self.state.particles);
        if f > self.state.gbest_fitness {
            self.state.gbest_bits = bits;
            self.state.gbest_fitness = f;
        }
        self.state.iteration += 1;
        self.state.gbest_fitness
    }

    pub fn run(&mut self) {
        while self.state.iteration < self.cfg.iterations {
            self.step();
        }
    }

    /// The global best, evaluated without penalty.
    pub fn solution(&self) -> SharingSolution<T> {
        SharingSolution::from_activation(self.fitness.table(), self.state.gbest_bits.clone())
    }
}

fn best_of<T: Real>(particles: &[Particle<T>]) -> (ActivationVector, T) {
    let mut best = &particles[0];
    for p in &particles[1..] {
        if p.pbest_fitness > best.pbest_fitness {
            best = p;
        }
    }
    (best.pbest_bits.clone(), best.pbest_fitness)
}

/// Runs the configured number of iterations and returns the global best.
pub fn optimize<T: Real>(
    instance: &SharingInstance<T>,
    cfg: &PsoConfig<T>,
) -> Result<SharingSolution<T>> {
    let mut swarm = Swarm::new(instance, cfg.clone())?;
    swarm.run();
    Ok(swarm.solution())
}
