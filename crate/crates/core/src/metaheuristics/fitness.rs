use rand::Rng;
use thiserror::Error;

use crate::grid::{polyline_length, segment_clear, Coord, GridMap};
use crate::Scalar;

/// Fitness multiplier applied to paths whose segments cross an obstacle.
pub const INFEASIBLE_PENALTY: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessParams<T> {
    /// Constant bonus term `R`; defaults to 0 so fitness is deterministic.
    pub r_term: T,
}

impl<T: Scalar> Default for FitnessParams<T> {
    fn default() -> Self {
        Self { r_term: T::zero() }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitnessError {
    #[error("path needs at least 2 waypoints, got {0}")]
    TooFewWaypoints(usize),
    #[error("path length must be positive, got {0}")]
    ZeroLength(f64),
    #[error("binary chromosomes carry no path to evaluate")]
    NotAPath,
    #[error("R term must be nonnegative")]
    NegativeR,
}

/// `(1/d) (1 + 1/sqrt(n - 1) + R)` for a path of length `d` through `n` waypoints.
pub fn fitness_value<T: Scalar>(d: T, n: usize, fp: &FitnessParams<T>) -> Result<T, FitnessError> {
    if n < 2 {
        return Err(FitnessError::TooFewWaypoints(n));
    }
    if !(d > T::zero()) {
        return Err(FitnessError::ZeroLength(d.to_f64_lossy()));
    }
    if fp.r_term < T::zero() {
        return Err(FitnessError::NegativeR);
    }
    let n1 = T::from_count(n - 1);
    Ok((T::one() + T::one() / n1.sqrt() + fp.r_term) / d)
}

/// Evaluated waypoint path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation<T> {
    pub fitness: T,
    /// Euclidean polyline length.
    pub length: T,
    pub feasible: bool,
}

/// Whether every straight segment of the polyline avoids obstacles.
pub fn polyline_clear(map: &GridMap, waypoints: &[Coord]) -> bool {
    waypoints.iter().all(|&c| map.is_free(c)) && waypoints.windows(2).all(|w| segment_clear(map, w[0], w[1]))
}

/// Fitness of a waypoint polyline; infeasible paths are scaled by
/// [`INFEASIBLE_PENALTY`].
pub fn evaluate_waypoints<T: Scalar>(
    map: &GridMap,
    waypoints: &[Coord],
    fp: &FitnessParams<T>,
) -> Result<Evaluation<T>, FitnessError> {
    let length = polyline_length::<T>(waypoints);
    let raw = fitness_value(length, waypoints.len(), fp)?;
    let feasible = polyline_clear(map, waypoints);
    Ok(Evaluation {
        fitness: if feasible { raw } else { raw * T::lit(INFEASIBLE_PENALTY) },
        length,
        feasible,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Genes {
    Binary(Vec<bool>),
    Waypoints(Vec<Coord>),
}

impl Genes {
    pub fn len(&self) -> usize {
        match self {
            Genes::Binary(b) => b.len(),
            Genes::Waypoints(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome<T> {
    pub genes: Genes,
    pub eval: Option<Evaluation<T>>,
}

impl<T: Scalar> Chromosome<T> {
    pub fn binary(bits: Vec<bool>) -> Self {
        Self {
            genes: Genes::Binary(bits),
            eval: None,
        }
    }

    pub fn waypoints(w: Vec<Coord>) -> Self {
        Self {
            genes: Genes::Waypoints(w),
            eval: None,
        }
    }

    /// Parses a `0`/`1` string. Test helper.
    pub fn from_bits(s: &str) -> Self {
        Self::binary(s.chars().map(|c| c == '1').collect())
    }

    pub fn bits_string(&self) -> Option<String> {
        match &self.genes {
            Genes::Binary(b) => Some(b.iter().map(|&x| if x { '1' } else { '0' }).collect()),
            Genes::Waypoints(_) => None,
        }
    }

    pub fn as_waypoints(&self) -> Option<&[Coord]> {
        match &self.genes {
            Genes::Waypoints(w) => Some(w),
            Genes::Binary(_) => None,
        }
    }

    pub fn fitness(&self) -> Option<T> {
        self.eval.map(|e| e.fitness)
    }

    pub fn evaluate(&mut self, map: &GridMap, fp: &FitnessParams<T>) -> Result<Evaluation<T>, FitnessError> {
        let w = self.as_waypoints().ok_or(FitnessError::NotAPath)?;
        let e = evaluate_waypoints(map, w, fp)?;
        self.eval = Some(e);
        Ok(e)
    }
}

/// Fitness of a chromosome.
pub fn fitness<T: Scalar>(c: &Chromosome<T>, map: &GridMap, fp: &FitnessParams<T>) -> Result<T, FitnessError> {
    let w = c.as_waypoints().ok_or(FitnessError::NotAPath)?;
    evaluate_waypoints(map, w, fp).map(|e| e.fitness)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperatorError {
    #[error("population is empty")]
    EmptyPopulation,
    #[error("chromosome {0} has not been evaluated")]
    Unevaluated(usize),
    #[error("parents differ in length or encoding ({0} vs {1})")]
    Mismatch(usize, usize),
    #[error("segment [{start}, {end}) does not fit chromosomes of length {len}")]
    Segment { start: usize, end: usize, len: usize },
}

/// Normalized fitness strictly above the draw survives; index `elite` always does.
pub fn survivors<T: Scalar>(normalized: &[T], draws: &[T], elite: usize) -> Vec<bool> {
    normalized
        .iter()
        .zip(draws)
        .enumerate()
        .map(|(i, (&f, &r))| i == elite || f > r)
        .collect()
}

/// Selection by comparison with a fresh uniform draw per individual.
///
/// Fitness is divided by the population maximum, an individual survives
/// when its normalized fitness exceeds its draw in `[0, 1)`, and the fittest
/// always survives. The population is refilled to its original size with
/// clones of uniformly chosen survivors.
pub fn select<T: Scalar, R: Rng + ?Sized>(
    pop: &[Chromosome<T>],
    rng: &mut R,
) -> Result<Vec<Chromosome<T>>, OperatorError> {
    if pop.is_empty() {
        return Err(OperatorError::EmptyPopulation);
    }
    let fits: Vec<T> = pop
        .iter()
        .enumerate()
        .map(|(i, c)| c.fitness().ok_or(OperatorError::Unevaluated(i)))
        .collect::<Result<_, _>>()?;
    let (elite, max) = fits
        .iter()
        .copied()
        .enumerate()
        .fold((0, T::neg_infinity()), |best, (i, f)| if f > best.1 { (i, f) } else { best });
    let normalized: Vec<T> = fits
        .iter()
        .map(|&f| if max > T::zero() { f / max } else { T::zero() })
        .collect();
    let draws: Vec<T> = (0..pop.len()).map(|_| T::lit(rng.random::<f64>())).collect();
    let keep = survivors(&normalized, &draws, elite);

    let mut out: Vec<Chromosome<T>> = pop
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(c, _)| c.clone())
        .collect();
    let retained = out.len();
    while out.len() < pop.len() {
        let pick = rng.random_range(0..retained);
        out.push(out[pick].clone());
    }
    // Survivors keep their relative order; the elite goes first.
    let elite_pos = pop[..elite].iter().zip(&keep).filter(|(_, &k)| k).count();
    out.swap(0, elite_pos);
    Ok(out)
}

/// Swaps genes `[start, end)` between two parents of equal length.
pub fn crossover_segment<T: Scalar>(
    a: &Chromosome<T>,
    b: &Chromosome<T>,
    start: usize,
    end: usize,
) -> Result<(Chromosome<T>, Chromosome<T>), OperatorError> {
    let (la, lb) = (a.genes.len(), b.genes.len());
    if la != lb {
        return Err(OperatorError::Mismatch(la, lb));
    }
    if start > end || end > la {
        return Err(OperatorError::Segment { start, end, len: la });
    }
    let (ga, gb) = match (&a.genes, &b.genes) {
        (Genes::Binary(x), Genes::Binary(y)) => {
            let (mut x, mut y) = (x.clone(), y.clone());
            x[start..end].swap_with_slice(&mut y[start..end]);
            (Genes::Binary(x), Genes::Binary(y))
        }
        (Genes::Waypoints(x), Genes::Waypoints(y)) => {
            let (mut x, mut y) = (x.clone(), y.clone());
            x[start..end].swap_with_slice(&mut y[start..end]);
            (Genes::Waypoints(x), Genes::Waypoints(y))
        }
        _ => return Err(OperatorError::Mismatch(la, lb)),
    };
    Ok((
        Chromosome { genes: ga, eval: None },
        Chromosome { genes: gb, eval: None },
    ))
}

/// Two-point crossover with a uniformly chosen segment `start <= end`.
/// Children must be re-evaluated (which also re-checks feasibility).
pub fn crossover<T: Scalar, R: Rng + ?Sized>(
    a: &Chromosome<T>,
    b: &Chromosome<T>,
    rng: &mut R,
) -> Result<(Chromosome<T>, Chromosome<T>), OperatorError> {
    let len = a.genes.len();
    if len != b.genes.len() {
        return Err(OperatorError::Mismatch(len, b.genes.len()));
    }
    let i = rng.random_range(0..=len);
    let j = rng.random_range(0..=len);
    crossover_segment(a, b, i.min(j), i.max(j))
}

/// Independent bit flips with probability `rate`.
pub fn mutate_bits<T: Scalar, R: Rng + ?Sized>(c: &Chromosome<T>, rate: f64, rng: &mut R) -> Chromosome<T> {
    match &c.genes {
        Genes::Binary(bits) => Chromosome::binary(
            bits.iter()
                .map(|&b| if rng.random::<f64>() < rate { !b } else { b })
                .collect(),
        ),
        Genes::Waypoints(_) => c.clone(),
    }
}
