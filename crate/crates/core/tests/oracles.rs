//! Independent oracles for the assembled operators.

use frac_orlicz::quadrature::GaussRule;
use frac_orlicz::solver::{linear_oracle, mass_normalized_distance, solve_sequence, SolverConfig};
use frac_orlicz::{GalerkinBasis, Kernel, Problem, QuadConfig, Source};

/// `∬ (f(x) − f(y))² / |x − y|^{1+2s} dx dy` over the box `[α − L, β + L]²`
/// for a hat combination `f`: the translation form
/// `2 ∫₀^∞ h^{−1−2s} ∫ (f(x+h) − f(x))² dx dh` over the whole plane, minus the
/// pairs with one point beyond the box, which only see `f(x)²`.
fn translation_energy(basis: &GalerkinBasis, coeffs: &[f64], s: f64, radius: f64) -> f64 {
    let z = basis.nodes().to_vec();
    let hm = basis.mesh_size();
    let f = |x: f64| basis.eval_combination(coeffs, x).unwrap();
    let g3 = GaussRule::new(3);
    let overlap = |h: f64| {
        let mut br: Vec<f64> = z.iter().flat_map(|&p| [p, p - h]).collect();
        br.sort_by(f64::total_cmp);
        br.windows(2).map(|w| g3.integrate(w[0], w[1], |x| (f(x + h) - f(x)).powi(2))).sum::<f64>()
    };
    let l2: f64 = z.windows(2).map(|w| g3.integrate(w[0], w[1], |x| f(x) * f(x))).sum();
    let width = basis.beta() - basis.alpha();
    let panels = (width / hm).round() as usize;
    let g = GaussRule::new(40);
    // h = hm·v⁶ on the first panel absorbs the h^{1−2s} behaviour at zero.
    let q = 6.0;
    let mut e = g.integrate(0.0, 1.0, |v: f64| {
        let h = hm * v.powf(q);
        overlap(h) * h.powf(-1.0 - 2.0 * s) * hm * q * v.powf(q - 1.0)
    });
    for m in 1..panels {
        e += g.integrate(m as f64 * hm, (m + 1) as f64 * hm, |h| overlap(h) * h.powf(-1.0 - 2.0 * s));
    }
    let (lo, hi) = (basis.alpha() - radius, basis.beta() + radius);
    let outside: f64 = z
        .windows(2)
        .map(|w| g3.integrate(w[0], w[1], |x| f(x) * f(x) * ((hi - x).powf(-2.0 * s) + (x - lo).powf(-2.0 * s)) / (2.0 * s)))
        .sum();
    2.0 * e + 2.0 * (2.0 * l2) * width.powf(-2.0 * s) / (2.0 * s) - 2.0 * outside
}

fn unit(k: usize, j: usize) -> Vec<f64> {
    let mut v = vec![0.0; k];
    v[j] = 1.0;
    v
}

fn linear_problem(s: f64) -> Problem {
    Problem::new(0.0, 1.0, s, Kernel::parse("plap:2").unwrap(), Source::parse("power:2").unwrap())
}

#[test]
fn stiffness_matches_translation_oracle() {
    for s in [0.5, 0.3, 0.75] {
        let k = 5;
        let quad = QuadConfig { gauss_order: 5, ..QuadConfig::default() };
        let ctx = linear_problem(s).with_quad(quad).context(k).unwrap();
        let km = ctx.bilinear_stiffness().unwrap();
        let basis = ctx.basis();
        let radius = ctx.quadrature().tail_radius();
        let energy = |v: &[f64]| translation_energy(basis, v, s, radius);
        let diag: Vec<f64> = (0..k).map(|j| energy(&unit(k, j))).collect();
        for j in 0..k {
            for l in 0..k {
                let oracle = if j == l {
                    diag[j]
                } else {
                    let mut v = unit(k, j);
                    v[l] = 1.0;
                    0.5 * (energy(&v) - diag[j] - diag[l])
                };
                let scale = km[(j, j)].max(km[(l, l)]);
                assert!(
                    (km[(j, l)] - oracle).abs() <= 1e-6 * scale,
                    "s={s} K[{j},{l}] = {} vs oracle {oracle}",
                    km[(j, l)]
                );
            }
        }
        assert!((&km - km.transpose()).norm() <= 1e-12 * km.norm());
    }
}

#[test]
fn mass_matrix_closed_form() {
    let ctx = linear_problem(0.5).context(7).unwrap();
    let b = ctx.mass_matrix();
    let h = ctx.basis().mesh_size();
    for j in 0..7usize {
        for l in 0..7 {
            let exact = match j.abs_diff(l) {
                0 => 2.0 * h / 3.0,
                1 => h / 6.0,
                _ => 0.0,
            };
            assert!((b[(j, l)] - exact).abs() <= 1e-14, "B[{j},{l}]");
        }
    }
}

#[test]
fn quadratic_forms_in_the_linear_case() {
    let ctx = linear_problem(0.5).context(6).unwrap();
    let km = ctx.bilinear_stiffness().unwrap();
    let b = ctx.mass_matrix();
    let u = nalgebra::DVector::from_vec(vec![0.4, -1.0, 0.3, 0.8, -0.2, 0.5]);
    let ku = &km * &u;
    let grad = ctx.grad_a(u.as_slice()).unwrap();
    for (g, e) in grad.iter().zip(ku.iter()) {
        assert!((g - e).abs() <= 1e-12 * ku.amax());
    }
    let a = ctx.energy_a(u.as_slice()).unwrap();
    assert!((a - 0.5 * u.dot(&ku)).abs() <= 1e-12 * a);
    let g = ctx.energy_g(u.as_slice()).unwrap();
    assert!((g - 0.5 * u.dot(&(&b * &u))).abs() <= 1e-14);
}

#[test]
fn deflated_sequence_reproduces_oracle() {
    let ctx = linear_problem(0.5).context(10).unwrap();
    let seq = solve_sequence(&ctx, 3, &SolverConfig::default()).unwrap();
    assert!(seq.failure.is_none());
    let oracle = linear_oracle(&ctx).unwrap();
    for (p, o) in seq.pairs.iter().zip(&oracle) {
        assert!((p.lambda - o.lambda).abs() <= 1e-8 * o.lambda);
        assert!(mass_normalized_distance(&ctx, &p.coeffs, &o.coeffs).unwrap() <= 1e-6);
        assert!(!p.order_violation && !p.cluster);
    }
}

#[test]
fn oracle_refinement_trend() {
    let l1: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&k| linear_oracle(&linear_problem(0.5).context(k).unwrap()).unwrap()[0].lambda)
        .collect();
    assert!(l1[0] > l1[1] && l1[1] > l1[2]);
    assert!((l1[1] - l1[2]).abs() < (l1[0] - l1[1]).abs());
}
