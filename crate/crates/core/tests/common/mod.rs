//! Integrands with closed-form integrals for the bound sweeps.

use optiquad::expr::{parse, ExprNode};
use optiquad::rules::Interval;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Case {
    pub label: String,
    pub f: ExprNode,
    pub iv: Interval,
    pub exact: f64,
}

fn random_interval(rng: &mut ChaCha8Rng) -> Interval {
    let a: f64 = rng.gen_range(-1.5..1.0);
    Interval::new(a, a + rng.gen_range(0.05..2.0)).unwrap()
}

fn polynomial(rng: &mut ChaCha8Rng) -> Case {
    let iv = random_interval(rng);
    let degree = rng.gen_range(0..=6usize);
    let coeffs: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let text = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| format!("({c:?})*t^{k}"))
        .collect::<Vec<_>>()
        .join(" + ");
    let exact = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let p = k as i32 + 1;
            c * (iv.b().powi(p) - iv.a().powi(p)) / p as f64
        })
        .sum();
    Case {
        label: text.clone(),
        f: parse(&text).unwrap(),
        iv,
        exact,
    }
}

fn transcendental(rng: &mut ChaCha8Rng, family: usize) -> Case {
    let iv = random_interval(rng);
    let (a, b) = (iv.a(), iv.b());
    let c: f64 = rng.gen_range(0.3..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    // shift keeping t + d ≥ 0.5 on the interval
    let d = 0.5 - a + rng.gen_range(0.0..1.0);
    let (text, anti): (String, Box<dyn Fn(f64) -> f64>) = match family % 10 {
        0 => (format!("exp(({c:?})*t)"), Box::new(move |t| (c * t).exp() / c)),
        1 => (format!("sin(({c:?})*t + {d:?})"), Box::new(move |t| -(c * t + d).cos() / c)),
        2 => (format!("cos(({c:?})*t)"), Box::new(move |t| (c * t).sin() / c)),
        3 => (format!("1/(t + {d:?})"), Box::new(move |t| (t + d).ln())),
        4 => (format!("sqrt(t + {d:?})"), Box::new(move |t| 2.0 / 3.0 * (t + d).powf(1.5))),
        5 => ("t*exp(t)".into(), Box::new(|t: f64| (t - 1.0) * t.exp())),
        6 => ("exp(t)*sin(t)".into(), Box::new(|t: f64| t.exp() * (t.sin() - t.cos()) / 2.0)),
        7 => (format!("log(t + {d:?})"), Box::new(move |t| (t + d) * (t + d).ln() - (t + d))),
        8 => ("t*cos(t)".into(), Box::new(|t: f64| t.cos() + t * t.sin())),
        _ => ("1/(1 + t^2)".into(), Box::new(|t: f64| t.atan())),
    };
    Case {
        label: text.clone(),
        f: parse(&text).unwrap(),
        iv,
        exact: anti(b) - anti(a),
    }
}

/// 100 random polynomials of degree at most 6 and 20 smooth
/// transcendental integrands, each on a random interval of length ≤ 2.
pub fn sweep_corpus(seed: u64) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Case> = (0..100).map(|_| polynomial(&mut rng)).collect();
    out.extend((0..20).map(|k| transcendental(&mut rng, k)));
    out
}
