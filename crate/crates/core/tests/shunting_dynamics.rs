mod common;

use gridnav_core::shunting::{derivative, external_input, settle, step, ActivityField, ShuntingParams};
use gridnav_core::{Coord, GridMap};

fn add(x: &[f64], k: &[f64], h: f64) -> Vec<f64> {
    x.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

/// Classical RK4 reference over `t` with `n` substeps.
fn rk4(map: &GridMap, p: &ShuntingParams<f64>, t: f64, n: usize) -> Vec<f64> {
    let input = external_input(map, p);
    let (rows, cols) = (map.rows(), map.cols());
    let f = |x: &[f64]| derivative(&ActivityField::from_values(rows, cols, x.to_vec()), &input, p);
    let h = t / n as f64;
    let mut x = vec![0.0; map.len()];
    for _ in 0..n {
        let k1 = f(&x);
        let k2 = f(&add(&x, &k1, h / 2.0));
        let k3 = f(&add(&x, &k2, h / 2.0));
        let k4 = f(&add(&x, &k3, h));
        for i in 0..x.len() {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    x
}

fn euler(map: &GridMap, p: &ShuntingParams<f64>, t: f64) -> Vec<f64> {
    let input = external_input(map, p);
    let steps = (t / p.dt).round() as usize;
    let mut f = ActivityField::zeros(map.rows(), map.cols());
    for _ in 0..steps {
        f = step(&f, &input, p).unwrap();
    }
    f.values().to_vec()
}

#[test]
fn euler_error_is_first_order() {
    let map = GridMap::from_ascii(&["S..#.", ".#...", "...#T"]).unwrap();
    let t = 0.05;
    let reference = rk4(&map, &ShuntingParams::default(), t, 4000);
    let err = |dt: f64| {
        let p = ShuntingParams { dt, ..ShuntingParams::default() };
        euler(&map, &p, t)
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let (e1, e2, e3) = (err(0.004), err(0.002), err(0.001));
    assert!(e1 > 0.0);
    for ratio in [e1 / e2, e2 / e3] {
        assert!((1.6..2.4).contains(&ratio), "halving dt changed the error by {ratio}");
    }
}

#[test]
fn activity_stays_in_bounds_on_random_maps() {
    for seed in 0..30 {
        let map = common::random_map(12, 12, 0.3, seed);
        let p = ShuntingParams::<f64>::default();
        let input = external_input(&map, &p);
        let mut f = ActivityField::zeros(map.rows(), map.cols());
        for _ in 0..400 {
            f = step(&f, &input, &p).unwrap();
            assert!(f.min() >= -p.d - 1e-12 && f.max() <= p.b + 1e-12);
        }
    }
}

#[test]
fn free_cells_are_excited_and_obstacles_inhibited() {
    let map = GridMap::from_ascii(&["S....", ".###.", "....T"]).unwrap();
    let s = settle(&map, &ShuntingParams::<f64>::default()).unwrap();
    assert!(s.converged);
    for c in map.coords() {
        let x = s.field.get(c);
        if map.is_obstacle(c) {
            assert!(x < 0.0, "{c}: {x}");
        } else {
            assert!(x > 0.0, "{c}: {x}");
        }
    }
    assert!(s.field.get(Coord::new(0, 0)) < s.field.get(Coord::new(0, 4)));
}
