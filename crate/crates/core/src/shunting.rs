//! Shunting neural field planner.
//!
//! One neuron per cell obeys
//!
//! ```text
//! dx_i/dt = -A x_i + (B - x_i) ([I_i]⁺ + Σ_j w_ij [x_j]⁺) - (D + x_i) [I_i]⁻
//! ```
//!
//! with `I = +E` at the target, `-E` on obstacles and `0` elsewhere, and
//! lateral weights `w_ij = mu / d_ij` for cells within `r0`. The settled
//! activity peaks at the target and decays with free-space distance, so the
//! path is read out by greedy ascent. No learning is involved.

use thiserror::Error;

use crate::grid::{Coord, GridMap, Neighborhood, Path};
use crate::numfmt::sig6;
use crate::{neg_part, pos_part, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShuntingParams<T> {
    /// Passive decay rate `A`.
    pub a: T,
    /// Upper activity bound `B`.
    pub b: T,
    /// Lower activity bound `D` (activity stays above `-D`).
    pub d: T,
    /// External input magnitude `E`.
    pub e: T,
    /// Lateral weight gain.
    pub mu: T,
    /// Lateral receptive radius in cells. With `r0 >= 2` excitation jumps
    /// across one-cell walls, which leaves greedy ascent stuck against them.
    pub r0: T,
    pub dt: T,
    pub tol: T,
    pub max_iters: usize,
}

impl<T: Scalar> Default for ShuntingParams<T> {
    fn default() -> Self {
        Self {
            a: T::lit(10.0),
            b: T::one(),
            d: T::one(),
            e: T::lit(100.0),
            mu: T::one(),
            r0: T::one(),
            dt: T::lit(0.005),
            tol: T::lit(1e-6),
            max_iters: 100_000,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShuntingError {
    #[error("parameter `{0}` must be positive")]
    NonPositive(&'static str),
    #[error("explicit Euler guard violated: dt*(A + E + mu*B*{neighbors}) = {value} must be < 1")]
    Unstable { neighbors: usize, value: f64 },
    #[error("input has {found} cells, field has {expected}")]
    InputSize { expected: usize, found: usize },
}

impl<T: Scalar> ShuntingParams<T> {
    /// Lateral kernel: offsets within `r0` (excluding the center) with weight `mu/d`.
    pub fn kernel(&self) -> Vec<(isize, isize, T)> {
        let r0 = self.r0.to_f64_lossy();
        let reach = r0.floor().max(0.0) as isize;
        let mut out = Vec::new();
        for dr in -reach..=reach {
            for dc in -reach..=reach {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let dist = T::from_isize(dr * dr + dc * dc).expect("small integer").sqrt();
                if dist <= self.r0 {
                    out.push((dr, dc, self.mu / dist));
                }
            }
        }
        out
    }

    /// Positivity plus `dt (A + E + mu B n) < 1`, where `n` counts cells in
    /// the receptive disc. This keeps each Euler update a monotone map of
    /// `x_i`, which preserves `[-D, B]`.
    pub fn validate(&self) -> Result<(), ShuntingError> {
        for (name, v) in [
            ("A", self.a),
            ("B", self.b),
            ("D", self.d),
            ("E", self.e),
            ("mu", self.mu),
            ("r0", self.r0),
            ("dt", self.dt),
            ("tol", self.tol),
        ] {
            if !(v > T::zero()) {
                return Err(ShuntingError::NonPositive(name));
            }
        }
        let n = self.kernel().len();
        let value = self.dt * (self.a + self.e + self.mu * self.b * T::from_count(n));
        if !(value < T::one()) {
            return Err(ShuntingError::Unstable {
                neighbors: n,
                value: value.to_f64_lossy(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActivityField<T> {
    rows: usize,
    cols: usize,
    x: Vec<T>,
    iteration: usize,
}

impl<T: Scalar> ActivityField<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_values(rows, cols, vec![T::zero(); rows * cols])
    }

    pub fn from_values(rows: usize, cols: usize, x: Vec<T>) -> Self {
        assert_eq!(x.len(), rows * cols, "activity matrix size");
        Self {
            rows,
            cols,
            x,
            iteration: 0,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn values(&self) -> &[T] {
        &self.x
    }

    #[inline]
    pub fn get(&self, c: Coord) -> T {
        self.x[c.row * self.cols + c.col]
    }

    pub fn min(&self) -> T {
        self.x.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.x.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Matrix dump at 6 significant digits.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for row in self.x.chunks(self.cols) {
            let line: Vec<String> = row.iter().map(|v| sig6(v.to_f64_lossy())).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Σ_j w_ij g([x_j]) over the kernel, with out-of-grid cells skipped.
    fn lateral(&self, i: usize, kernel: &[(isize, isize, T)], gate: impl Fn(T) -> T) -> T {
        let (r, c) = ((i / self.cols) as isize, (i % self.cols) as isize);
        let mut acc = T::zero();
        for &(dr, dc, w) in kernel {
            let (rr, cc) = (r + dr, c + dc);
            if rr >= 0 && cc >= 0 && (rr as usize) < self.rows && (cc as usize) < self.cols {
                acc += w * gate(self.x[rr as usize * self.cols + cc as usize]);
            }
        }
        acc
    }
}

/// `+E` at the target, `-E` on obstacles, zero elsewhere (row-major).
pub fn external_input<T: Scalar>(map: &GridMap, p: &ShuntingParams<T>) -> Vec<T> {
    map.coords()
        .map(|c| {
            if c == map.target() {
                p.e
            } else if map.is_obstacle(c) {
                -p.e
            } else {
                T::zero()
            }
        })
        .collect()
}

/// Right-hand side of the shunting equation for every cell.
pub fn derivative<T: Scalar>(field: &ActivityField<T>, input: &[T], p: &ShuntingParams<T>) -> Vec<T> {
    let kernel = p.kernel();
    (0..field.x.len())
        .map(|i| {
            let xi = field.x[i];
            let excite = pos_part(input[i]) + field.lateral(i, &kernel, pos_part);
            let inhibit = neg_part(input[i]);
            -p.a * xi + (p.b - xi) * excite - (p.d + xi) * inhibit
        })
        .collect()
}

/// One synchronous explicit Euler step.
pub fn step<T: Scalar>(
    field: &ActivityField<T>,
    input: &[T],
    p: &ShuntingParams<T>,
) -> Result<ActivityField<T>, ShuntingError> {
    if input.len() != field.x.len() {
        return Err(ShuntingError::InputSize {
            expected: field.x.len(),
            found: input.len(),
        });
    }
    p.validate()?;
    let dx = derivative(field, input, p);
    Ok(ActivityField {
        rows: field.rows,
        cols: field.cols,
        x: field.x.iter().zip(dx).map(|(&x, d)| x + p.dt * d).collect(),
        iteration: field.iteration + 1,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settled<T> {
    pub field: ActivityField<T>,
    /// Largest per-cell change seen in the last step (`+inf` if none ran).
    pub last_change: T,
    pub converged: bool,
}

/// Integrates from the zero field until the largest per-cell change drops
/// below `tol` or `max_iters` steps have run.
pub fn settle<T: Scalar>(map: &GridMap, p: &ShuntingParams<T>) -> Result<Settled<T>, ShuntingError> {
    p.validate()?;
    let input = external_input(map, p);
    let mut field = ActivityField::zeros(map.rows(), map.cols());
    let mut last_change = T::infinity();
    for _ in 0..p.max_iters {
        let next = step(&field, &input, p)?;
        last_change = field
            .x
            .iter()
            .zip(&next.x)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max);
        field = next;
        if last_change < p.tol {
            return Ok(Settled {
                field,
                last_change,
                converged: true,
            });
        }
    }
    Ok(Settled {
        field,
        last_change,
        converged: false,
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractError {
    #[error("start {0} is outside the map or blocked")]
    InvalidStart(Coord),
    #[error("ascent stalled at {} after {} steps", .partial.last().unwrap_or_default(), .partial.steps())]
    Stalled { partial: Path },
}

/// Greedy ascent over the 8-neighborhood: step to the passable neighbor
/// with the highest activity, provided it beats the current cell. Ties go
/// to the first neighbor in canonical order.
pub fn extract_path<T: Scalar>(field: &ActivityField<T>, map: &GridMap, start: Coord) -> Result<Path, ExtractError> {
    if !map.is_free(start) {
        return Err(ExtractError::InvalidStart(start));
    }
    let cap = 4 * map.len();
    let mut at = start;
    let mut waypoints = vec![at];
    while at != map.target() && waypoints.len() <= cap {
        let here = field.get(at);
        let mut best: Option<(T, Coord)> = None;
        for n in map.moves(at, Neighborhood::Eight) {
            let v = field.get(n);
            if v > here && best.is_none_or(|(b, _)| v > b) {
                best = Some((v, n));
            }
        }
        match best {
            Some((_, n)) => {
                waypoints.push(n);
                at = n;
            }
            None => break,
        }
    }
    if at == map.target() {
        Ok(Path::new(waypoints))
    } else {
        Err(ExtractError::Stalled {
            partial: Path::new(waypoints),
        })
    }
}

/// Output nonlinearity `g` of the scene-switched dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFn {
    /// `clamp(s, 0, B)`
    #[default]
    LinearSaturating,
    /// `1 / (1 + e^-s)`
    Logistic,
}

impl OutputFn {
    pub fn apply<T: Scalar>(self, s: T, upper: T) -> T {
        match self {
            OutputFn::LinearSaturating => s.max(T::zero()).min(upper),
            OutputFn::Logistic => T::one() / (T::one() + (-s).exp()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scene {
    /// Relaxation driven by neighbor output only.
    #[default]
    Scene1,
    /// Adds the constant drive.
    Scene2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneParams<T> {
    /// Per-scene gain `D_i(T)`, held fixed.
    pub gain: T,
    /// Constant drive `I`, used in `Scene2` only.
    pub drive: T,
    pub scene: Scene,
    pub output: OutputFn,
}

impl<T: Scalar> Default for SceneParams<T> {
    fn default() -> Self {
        Self {
            gain: T::one(),
            drive: T::zero(),
            scene: Scene::Scene1,
            output: OutputFn::LinearSaturating,
        }
    }
}

/// One synchronous Euler step of
/// `x_i' = -A x_i + gain * g(Σ_{j in NE_i} w_ij x_j) [+ I in scene 2]`,
/// where `NE_i` is the receptive disc of radius `r0` and `g` saturates at `B`.
pub fn step_scene<T: Scalar>(
    field: &ActivityField<T>,
    sp: &SceneParams<T>,
    p: &ShuntingParams<T>,
) -> Result<ActivityField<T>, ShuntingError> {
    p.validate()?;
    let kernel = p.kernel();
    let drive = match sp.scene {
        Scene::Scene1 => T::zero(),
        Scene::Scene2 => sp.drive,
    };
    let x = (0..field.x.len())
        .map(|i| {
            let y = sp.output.apply(field.lateral(i, &kernel, |v| v), p.b);
            let xi = field.x[i];
            xi + p.dt * (-p.a * xi + sp.gain * y + drive)
        })
        .collect();
    Ok(ActivityField {
        rows: field.rows,
        cols: field.cols,
        x,
        iteration: field.iteration + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn isolated(input: f64) -> (ActivityField<f64>, Vec<f64>, ShuntingParams<f64>) {
        let p = ShuntingParams::<f64> {
            max_iters: 200_000,
            tol: 1e-12,
            ..Default::default()
        };
        (ActivityField::zeros(1, 1), vec![input], p)
    }

    fn run(mut f: ActivityField<f64>, input: &[f64], p: &ShuntingParams<f64>, steps: usize) -> ActivityField<f64> {
        for _ in 0..steps {
            f = step(&f, input, p).unwrap();
        }
        f
    }

    #[test]
    fn default_params_pass_the_guard() {
        let p = ShuntingParams::<f64>::default();
        assert_eq!(p.kernel().len(), 4);
        p.validate().unwrap();
        let bad = ShuntingParams::<f64> { dt: 0.01, ..p };
        assert!(matches!(bad.validate(), Err(ShuntingError::Unstable { neighbors: 4, .. })));
        let wide = ShuntingParams::<f64> { r0: 2.0, ..p };
        assert_eq!(wide.kernel().len(), 12);
        wide.validate().unwrap();
        let neg = ShuntingParams::<f64> { a: 0.0, ..p };
        assert_eq!(neg.validate(), Err(ShuntingError::NonPositive("A")));
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let p = ShuntingParams::<f64>::default();
        let f = ActivityField::zeros(3, 3);
        let next = step(&f, &[0.0; 9], &p).unwrap();
        assert!(next.values().iter().all(|&v| v == 0.0));
        assert_eq!(next.iteration(), 1);
    }

    #[test]
    fn isolated_neuron_equilibria() {
        // -A x + (B - x) I = 0  ->  x = B I / (A + I)
        let (f, input, p) = isolated(100.0);
        let x = run(f, &input, &p, 5000).get(Coord::new(0, 0));
        assert!((x - 100.0 / 110.0).abs() < 1e-9, "{x}");
        // -A x - (D + x)|I| = 0  ->  x = -D |I| / (A + |I|)
        let (f, input, p) = isolated(-100.0);
        let x = run(f, &input, &p, 5000).get(Coord::new(0, 0));
        assert!((x + 100.0 / 110.0).abs() < 1e-9, "{x}");
    }

    #[test]
    fn input_layout() {
        let p = ShuntingParams::<f64>::default();
        let map = GridMap::open(3, 3, Coord::new(0, 0), Coord::new(1, 1)).unwrap();
        let input = external_input(&map, &p);
        assert_eq!(input.iter().sum::<f64>(), p.e);
        assert_eq!(input[4], p.e);
        assert_eq!(input.iter().filter(|&&v| v == 0.0).count(), 8);

        let walls: Vec<Coord> = map.coords().filter(|&c| c != map.target() && c != map.start()).collect();
        let blocked = map.with_obstacles(walls).unwrap();
        let input = external_input(&blocked, &p);
        assert_eq!(input.iter().filter(|&&v| v == -p.e).count(), 7);
    }

    #[test]
    fn input_size_is_checked() {
        let p = ShuntingParams::<f64>::default();
        assert!(matches!(
            step(&ActivityField::zeros(2, 2), &[0.0; 3], &p),
            Err(ShuntingError::InputSize { expected: 4, found: 3 })
        ));
    }

    #[test]
    fn settle_single_cell() {
        let p = ShuntingParams::<f64>::default();
        let map = GridMap::open(1, 1, Coord::new(0, 0), Coord::new(0, 0)).unwrap();
        let s = settle(&map, &p).unwrap();
        assert!(s.converged);
        let x = s.field.get(Coord::new(0, 0));
        assert!((x - p.b * p.e / (p.a + p.e)).abs() < 1e-4, "{x}");
    }

    #[test]
    fn settle_zero_budget_is_flagged() {
        let p = ShuntingParams::<f64> {
            max_iters: 0,
            ..Default::default()
        };
        let map = GridMap::open(2, 2, Coord::new(0, 0), Coord::new(1, 1)).unwrap();
        let s = settle(&map, &p).unwrap();
        assert!(!s.converged);
        assert!(s.field.values().iter().all(|&v| v == 0.0));
        assert_eq!(s.field.iteration(), 0);
    }

    #[test]
    fn target_is_strict_maximum() {
        let p = ShuntingParams::<f64>::default();
        let map = GridMap::open(5, 5, Coord::new(0, 0), Coord::new(2, 3)).unwrap();
        let s = settle(&map, &p).unwrap();
        assert!(s.converged);
        let peak = s.field.get(map.target());
        for c in map.coords().filter(|&c| c != map.target()) {
            assert!(s.field.get(c) < peak);
        }
    }

    #[test]
    fn corridor_readout() {
        let p = ShuntingParams::<f64>::default();
        let map = GridMap::from_ascii(&["S...T"]).unwrap();
        let s = settle(&map, &p).unwrap();
        let v = s.field.values();
        assert!(v.windows(2).all(|w| w[0] < w[1]), "{v:?}");
        let path = extract_path(&s.field, &map, map.start()).unwrap();
        assert_eq!(path.len(), 5);
        assert_eq!(
            extract_path(&s.field, &map, map.target()).unwrap().waypoints,
            vec![map.target()]
        );
    }

    #[test]
    fn enclosed_start_stalls() {
        let p = ShuntingParams::<f64>::default();
        let map = GridMap::from_ascii(&["S#..", "##..", "...T"]).unwrap();
        let s = settle(&map, &p).unwrap();
        match extract_path(&s.field, &map, map.start()) {
            Err(ExtractError::Stalled { partial }) => assert_eq!(partial.waypoints, vec![map.start()]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scene_dynamics() {
        let p = ShuntingParams::<f64>::default();
        let zero = ActivityField::zeros(3, 3);
        let s1 = SceneParams::default();
        assert!(step_scene(&zero, &s1, &p).unwrap().values().iter().all(|&v| v == 0.0));

        let s2 = SceneParams {
            gain: 0.0,
            drive: 3.0,
            scene: Scene::Scene2,
            output: OutputFn::LinearSaturating,
        };
        let one = step_scene(&zero, &s2, &p).unwrap();
        assert!(one.values().iter().all(|&v| (v - p.dt * 3.0).abs() < 1e-15));

        let decay = SceneParams { gain: 0.0, ..s1 };
        let x0 = ActivityField::from_values(1, 3, vec![0.5, -0.25, 1.0]);
        let x1 = step_scene(&x0, &decay, &p).unwrap();
        for (a, b) in x0.values().iter().zip(x1.values()) {
            assert_eq!(*b, (1.0 - p.a * p.dt) * a);
        }
    }

    #[test]
    fn output_functions() {
        assert_eq!(OutputFn::LinearSaturating.apply(2.5, 1.0), 1.0);
        assert_eq!(OutputFn::LinearSaturating.apply(-2.5, 1.0), 0.0);
        assert_eq!(OutputFn::LinearSaturating.apply(0.25, 1.0), 0.25);
        assert_eq!(OutputFn::Logistic.apply(0.0, 1.0), 0.5);
        assert!(OutputFn::Logistic.apply(-800.0_f64, 1.0) >= 0.0);
    }

    #[test]
    fn dump_has_six_digits() {
        let f = ActivityField::from_values(1, 2, vec![100.0 / 110.0, -0.5]);
        assert_eq!(f.to_table(), "0.909091 -0.5\n");
    }

    #[test]
    fn works_in_f32() {
        let p = ShuntingParams::<f32>::default();
        let map = GridMap::from_ascii(&["S..T"]).unwrap();
        let s = settle(&map, &p).unwrap();
        assert!(s.converged);
        assert!(extract_path(&s.field, &map, map.start()).is_ok());
    }
}
