//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; the process exits non-zero
//! if any criterion fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fracvar::examples::{
    convergence_table, euler_energy, example1_family, example1_reference_family, example2_extremal,
    example2_seed, ExampleFixture, ExampleId, EXAMPLE1_UPSILON,
};
use fracvar::fracdiff::{integration_by_parts_defect, power_rule_exact};
use fracvar::noether::{
    classical_conservation_defect, classical_noether_density, classical_noether_quantity, d_gamma,
    noether_density, velocity, Generator,
};
use fracvar::special::gamma;
use fracvar::varproblem::{
    el_residual, evaluate_functional, solve_extremal, ClassicalLagrangian, FracProblem, Lagrangian,
    SolverConfig,
};
use fracvar::{FracOperator, FracOrder, Grid, SampledSignal, Scheme, Side, VectorPath};

type Check = Result<(bool, String), String>;

fn grid(n: usize) -> Grid {
    Grid::new(0.0, 1.0, n).unwrap()
}

fn op(order: f64, side: Side, scheme: Scheme, g: &Grid) -> FracOperator {
    FracOperator::build(FracOrder::new(order).unwrap(), side, scheme, g).unwrap()
}

/// Max-abs of `a - b` over interior nodes where both are valid.
fn max_diff(a: &SampledSignal, b: &SampledSignal, lo: usize, hi: usize) -> f64 {
    (lo..=hi)
        .filter(|&k| a.is_valid(k) && b.is_valid(k))
        .map(|k| (a.values()[k] - b.values()[k]).abs())
        .fold(0.0, f64::max)
}

fn bits_equal(a: &SampledSignal, b: &SampledSignal) -> bool {
    a.values()
        .iter()
        .zip(b.values())
        .all(|(x, y)| x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()))
}

/// Max relative error against the power rule over nodes in `[0.1, 1]`.
fn power_rule_error(p: f64, u: f64, scheme: Scheme, n: usize) -> f64 {
    let g = grid(n);
    let f = SampledSignal::sample(&g, |t| t.powf(u));
    let d = op(p, Side::Left, scheme, &g).apply(&f).unwrap();
    (0..=n)
        .filter(|&k| g.node(k) >= 0.1 - 1e-12)
        .map(|k| {
            let exact = power_rule_exact(p, u, 0.0, g.node(k)).unwrap();
            ((d.values()[k] - exact) / exact).abs()
        })
        .fold(0.0, f64::max)
}

fn criterion_1() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for scheme in [Scheme::Gl, Scheme::L1] {
        let need = if scheme == Scheme::Gl { 0.8 } else { 1.2 };
        for p in [0.3, 0.5, 0.9] {
            for u in [0.8, 1.0, 1.7] {
                let coarse = power_rule_error(p, u, scheme, 512);
                let fine = power_rule_error(p, u, scheme, 4096);
                let rate = (coarse / fine).ln() / 8f64.ln();
                // A scheme that is exact on this profile has no measurable order.
                let exact = fine < 1e-12;
                let good = fine < 2e-2 && (exact || rate >= need);
                ok &= good;
                if !good {
                    notes.push(format!("{scheme:?} p={p} u={u}: err={fine:.2e} order={rate:.3}"));
                }
                println!(
                    "    {scheme:?} p={p} u={u}: err512={coarse:.3e} err4096={fine:.3e} order={}",
                    if exact { "exact".to_string() } else { format!("{rate:.3}") }
                );
            }
        }
    }
    let detail = if notes.is_empty() {
        "all 18 cases within 2e-2 with required order".into()
    } else {
        format!("failing: {}", notes.join("; "))
    };
    Ok((ok, detail))
}

fn criterion_2() -> Check {
    let n = 1000;
    let g = grid(n);
    let profiles: [(&str, fn(f64) -> f64); 3] = [
        ("t^2", |t| t * t),
        ("sin", f64::sin),
        ("exp(-t)cos(3t)", |t| (-t).exp() * (3.0 * t).cos()),
    ];
    let mut worst: f64 = 0.0;
    for (name, f) in profiles {
        let s = SampledSignal::sample(&g, f);
        let central = velocity(&s).unwrap();
        let left = op(1.0, Side::Left, Scheme::Gl, &g).apply(&s).unwrap();
        let right = op(1.0, Side::Right, Scheme::Gl, &g).apply(&s).unwrap();
        let el = max_diff(&left, &central, 1, n - 1);
        let er = max_diff(&right, &central.scale(-1.0), 1, n - 1);
        println!("    {name}: left {el:.3e}, right {er:.3e}");
        worst = worst.max(el).max(er);
    }
    Ok((worst < 5e-3, format!("max deviation {worst:.3e} (limit 5e-3)")))
}

fn criterion_3() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();

    // Linearity.
    let g = grid(1024);
    let f = SampledSignal::sample(&g, |t| t.sin() + t * t);
    let h = SampledSignal::sample(&g, |t| (2.0 * t).cos() - 1.0);
    let mut lin_dev: f64 = 0.0;
    let mut scaled_exact = true;
    for (order, side, scheme) in [
        (0.5, Side::Left, Scheme::Gl),
        (0.5, Side::Right, Scheme::Gl),
        (0.3, Side::Left, Scheme::L1),
        (-0.5, Side::Left, Scheme::Gl),
    ] {
        let o = op(order, side, scheme, &g);
        let fa = o.apply_masked(&f).unwrap();
        let ha = o.apply_masked(&h).unwrap();
        let sum = o.apply_masked(&f.add(&h).unwrap()).unwrap();
        let scale = fa.max_abs().unwrap().max(ha.max_abs().unwrap()).max(1.0);
        lin_dev = lin_dev.max(max_diff(&sum, &fa.add(&ha).unwrap(), 0, g.n()) / scale);
        scaled_exact &= bits_equal(&o.apply_masked(&f.scale(4.0)).unwrap(), &fa.scale(4.0));
    }
    let lin_ok = lin_dev <= 1e-13 && scaled_exact;
    ok &= lin_ok;
    parts.push(format!(
        "linearity: sum dev {lin_dev:.1e} (rel), power-of-two scaling bit-exact={scaled_exact}"
    ));

    // Semigroup on integrals.
    let g = grid(2048);
    let s = SampledSignal::sample(&g, f64::sin);
    let mut semi: f64 = 0.0;
    for (p, q) in [(0.7, 0.3), (0.9, 0.4), (0.5, 0.2), (1.0, 0.5)] {
        let integral = op(-q, Side::Left, Scheme::Gl, &g).apply(&s).unwrap();
        let composed = op(p, Side::Left, Scheme::Gl, &g).apply(&integral).unwrap();
        let direct = op(p - q, Side::Left, Scheme::Gl, &g).apply(&s).unwrap();
        let d = max_diff(&composed, &direct, 0, g.n());
        println!("    semigroup p={p} q={q}: {d:.3e}");
        semi = semi.max(d);
    }
    ok &= semi < 2e-2;
    parts.push(format!("semigroup {semi:.2e}"));

    // Derivative undoes the integral.
    let mut fund: f64 = 0.0;
    for p in [0.5, 0.3, 0.8] {
        for (side, f) in [
            (Side::Left, SampledSignal::sample(&g, f64::sin)),
            (Side::Right, SampledSignal::sample(&g, |t| (1.0 - t).sin())),
        ] {
            let integral = op(-p, side, Scheme::Gl, &g).apply(&f).unwrap();
            let back = op(p, side, Scheme::Gl, &g).apply(&integral).unwrap();
            let d = max_diff(&back, &f, 1, g.n() - 1);
            println!("    inverse p={p} {side:?}: {d:.3e}");
            fund = fund.max(d);
        }
    }
    ok &= fund < 1e-2;
    parts.push(format!("inverse {fund:.2e}"));

    // Integration by parts.
    let g = grid(1024);
    let ibp = integration_by_parts_defect(
        &SampledSignal::sample(&g, |t| t * (1.0 - t)),
        &SampledSignal::sample(&g, |t| 1.0 - t),
        FracOrder::new(0.5).unwrap(),
    )
    .map_err(|e| e.to_string())?;
    ok &= ibp < 1e-2;
    parts.push(format!("by-parts {ibp:.2e}"));

    Ok((ok, parts.join(", ")))
}

fn criterion_4() -> Check {
    let g = grid(4096);
    let one = SampledSignal::constant(&g, 1.0);
    let d = op(0.5, Side::Left, Scheme::Gl, &g).apply(&one).unwrap();
    let rg = 1.0 / gamma(0.5);
    let err = (0..=g.n())
        .filter(|&k| g.node(k) >= 0.1 - 1e-12)
        .map(|k| {
            let exact = g.node(k).powf(-0.5) * rg;
            ((d.values()[k] - exact) / exact).abs()
        })
        .fold(0.0, f64::max);
    Ok((
        err < 2e-2,
        format!("max relative error {err:.3e} (limit 2e-2), value at t=1 {:.5}", d.values()[g.n()]),
    ))
}

fn criterion_5() -> Check {
    let one = FracOrder::new(1.0).unwrap();
    let half = FracOrder::new(0.5).unwrap();

    let g = grid(1024);
    let f = SampledSignal::sample(&g, |t| t.sin() + 0.5);
    let h = SampledSignal::sample(&g, |t| 1.0 + t * t);
    let product = velocity(&f.mul(&h).unwrap()).unwrap();
    let dg = d_gamma(&f, &h, one).unwrap();
    let prod_err = max_diff(&dg, &product, 1, g.n() - 1);

    let f2 = SampledSignal::sample(&g, |t| (3.0 * t).cos());
    let mut bil_dev: f64 = 0.0;
    let mut scaled_exact = true;
    for gam in [half, one] {
        let base = d_gamma(&f, &h, gam).unwrap();
        let other = d_gamma(&f2, &h, gam).unwrap();
        let sum_first = d_gamma(&f.add(&f2).unwrap(), &h, gam).unwrap();
        let sum_second = d_gamma(&h, &f.add(&f2).unwrap(), gam).unwrap();
        let split_second = d_gamma(&h, &f, gam)
            .unwrap()
            .add(&d_gamma(&h, &f2, gam).unwrap())
            .unwrap();
        let scale = base.max_abs().unwrap().max(other.max_abs().unwrap()).max(1.0);
        bil_dev = bil_dev
            .max(max_diff(&sum_first, &base.add(&other).unwrap(), 0, g.n()) / scale)
            .max(max_diff(&sum_second, &split_second, 0, g.n()) / scale);
        scaled_exact &= bits_equal(&d_gamma(&f.scale(2.0), &h, gam).unwrap(), &base.scale(2.0));
        scaled_exact &= bits_equal(&d_gamma(&f, &h.scale(0.5), gam).unwrap(), &base.scale(0.5));
    }

    let g = grid(512);
    let t = SampledSignal::sample(&g, |t| t);
    let c = SampledSignal::constant(&g, 1.0);
    let fg = d_gamma(&t, &c, half).unwrap();
    let gf = d_gamma(&c, &t, half).unwrap();
    let gap = max_diff(&fg, &gf, 0, g.n());

    let ok = prod_err < 1e-2 && bil_dev <= 1e-13 && scaled_exact && gap > 0.1;
    Ok((
        ok,
        format!(
            "product rule {prod_err:.2e} (limit 1e-2), bilinearity dev {bil_dev:.1e} (rel), \
             power-of-two scaling bit-exact={scaled_exact}, non-commutativity gap {gap:.3} (> 0.1)"
        ),
    ))
}

/// Smooth two-dimensional Lagrangian with random coefficients, together
/// with an independently written classical reduction `L(t, q, v, -v)`.
fn random_lagrangian(rng: &mut ChaCha8Rng) -> (Lagrangian, ClassicalLagrangian) {
    let c: Arc<Vec<f64>> = Arc::new((0..8).map(|_| rng.random_range(-1.0..1.0)).collect());
    let k = c.clone();
    let lag = Lagrangian::new(2, move |t, q, dl, dr| {
        0.5 * k[0] * dl[0] * dl[0]
            + k[1] * dl[0] * dr[1]
            + 0.5 * k[2] * dr[0] * dr[0]
            + k[3] * q[0] * dl[1]
            + k[4] * q[1].sin() * dr[0]
            + k[5] * t * q[0] * q[1]
            + k[6] * (dl[1] - dr[1]).powi(3) / 3.0
            + k[7] * t * t * dl[0]
    })
    .unwrap();
    let k = c.clone();
    let lag = lag
        .with_partials(
            Arc::new(move |t, q, dl, dr| {
                vec![
                    k[3] * dl[1] + k[5] * t * q[1],
                    k[4] * q[1].cos() * dr[0] + k[5] * t * q[0],
                ]
            }),
            {
                let k = c.clone();
                Arc::new(move |t, q, dl, dr| {
                    vec![
                        k[0] * dl[0] + k[1] * dr[1] + k[7] * t * t,
                        k[3] * q[0] + k[6] * (dl[1] - dr[1]).powi(2),
                    ]
                })
            },
            {
                let k = c.clone();
                Arc::new(move |_, q, dl, dr| {
                    vec![
                        k[2] * dr[0] + k[4] * q[1].sin(),
                        k[1] * dl[0] - k[6] * (dl[1] - dr[1]).powi(2),
                    ]
                })
            },
        )
        .unwrap();
    let k = c.clone();
    let classical = ClassicalLagrangian::new(2, move |t, q, v| {
        0.5 * k[0] * v[0] * v[0] - k[1] * v[0] * v[1]
            + 0.5 * k[2] * v[0] * v[0]
            + k[3] * q[0] * v[1]
            - k[4] * q[1].sin() * v[0]
            + k[5] * t * q[0] * q[1]
            + k[6] * 8.0 * v[1].powi(3) / 3.0
            + k[7] * t * t * v[0]
    })
    .unwrap();
    let k = c;
    let classical = classical.with_dv(move |t, q, v| {
        vec![
            k[0] * v[0] - k[1] * v[1] + k[2] * v[0] - k[4] * q[1].sin() + k[7] * t * t,
            -k[1] * v[0] + k[3] * q[0] + 8.0 * k[6] * v[1] * v[1],
        ]
    });
    (lag, classical)
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let g = grid(200);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for _ in 0..3 {
        let (lag, classical) = random_lagrangian(&mut rng);
        let gc: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (t0, t1) = (gc[0], gc[1]);
        let gen = Generator::new(
            2,
            move |t, _| t0 + t1 * t,
            move |t, q| vec![gc[2] * q[1] + gc[3], gc[4] * q[0] + gc[5] * t],
        )
        .unwrap();
        for _ in 0..20 {
            let amp: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            let path = VectorPath::new(vec![
                SampledSignal::sample(&g, |t| amp[0] + amp[1] * (2.0 * t).sin() + amp[2] * t * t),
                SampledSignal::sample(&g, |t| amp[3] * t.exp() + amp[4] * (3.0 * t).cos() + amp[5]),
            ])
            .unwrap();
            let prob = FracProblem::with_path_boundary(lag.clone(), 1.0, 1.0, &path).unwrap();
            let dl = prob.derivatives(&path).unwrap().left;
            for _ in 0..20 {
                let k = rng.random_range(1..g.n());
                let t = g.node(k);
                let q = path.state(k);
                let v: Vec<f64> = dl.iter().map(|s| s.values()[k]).collect();
                let minus: Vec<f64> = v.iter().map(|x| -x).collect();
                let frac = noether_density(&lag, 1.0, 1.0, &gen, t, &q, &v, &minus).unwrap();
                let classic = classical_noether_density(&classical, &gen, t, &q, &v);
                worst = worst.max((frac - classic).abs());
                scale = scale.max(classic.abs());
            }
        }
    }
    Ok((
        worst < 1e-10,
        format!("max pointwise gap {worst:.2e} (limit 1e-10, values up to {scale:.2})"),
    ))
}

fn criterion_7() -> Check {
    let alpha = 0.5;
    let n = 2048;
    let trim = 0.1;
    let g = grid(n);
    let (lo, hi) = g.window(trim, trim);
    let fixture = ExampleFixture::example1(alpha).map_err(|e| e.to_string())?;

    // Family built with the discrete operators: an exact discrete extremal.
    let profile = SampledSignal::sample(&g, |t| t.powf(EXAMPLE1_UPSILON));
    let family = example1_family(&profile, alpha).map_err(|e| e.to_string())?;
    let r = el_residual(&fixture.problem(&family).unwrap(), &family).map_err(|e| e.to_string())?;
    let res_family = r.max_abs_in(1, n - 1).unwrap_or(f64::NAN);

    // Family built with the exact operators; the discrete residual carries
    // the discretization error, with endpoint layers outside the window.
    let reference = example1_reference_family(&g, EXAMPLE1_UPSILON, alpha).map_err(|e| e.to_string())?;
    let r = el_residual(&fixture.problem(&reference).unwrap(), &reference).map_err(|e| e.to_string())?;
    let res_window = r.max_abs_in(lo, hi).unwrap_or(f64::NAN);
    let res_interior = r.max_abs_in(1, n - 1).unwrap_or(f64::NAN);

    let report = fixture.verify(&family, 5e-2, trim).map_err(|e| e.to_string())?;
    let quantity = fixture
        .expected_quantity(&family)
        .map_err(|e| e.to_string())?
        .max_abs_in(lo, hi)
        .unwrap_or(f64::NAN);

    let table = convergence_table(ExampleId::One, alpha, &[256, 512, 1024, 2048], trim)
        .map_err(|e| e.to_string())?;
    for row in &table {
        println!(
            "    N={:5} residual={:.3e} defect={:.3e}",
            row.n, row.el_residual, row.conservation_defect
        );
    }
    let decreasing = table.windows(2).all(|w| {
        w[1].el_residual < w[0].el_residual && w[1].conservation_defect <= w[0].conservation_defect
    });
    let ok = res_family < 5e-2
        && res_window < 5e-2
        && report.max_defect() < 5e-2
        && report.reconstruction_error < 5e-2
        && quantity < 5e-2
        && decreasing;
    Ok((
        ok,
        format!(
            "residual {res_family:.2e} on all interior nodes, exact-operator family {res_window:.2e} \
             on the window ({res_interior:.2e} with endpoint layers), pair defects {:.2e}, quantity {quantity:.2e}, table decreasing={decreasing}",
            report.max_defect()
        ),
    ))
}

fn criterion_8() -> Check {
    let n = 1024;
    let g = grid(n);
    let fixture = ExampleFixture::example2(1.0).map_err(|e| e.to_string())?;
    let classical = ClassicalLagrangian::from_fractional(&fixture.lagrangian);
    let wrong = fracvar::catalog::generator("example2_wrong", 4).map_err(|e| e.to_string())?;
    let seeds: [(&str, fn(f64) -> f64); 3] = [
        ("cubic", example2_seed),
        ("exp", |t| (0.5 * t).exp()),
        ("cos", |t| 2.0 + (1.5 * t).cos()),
    ];
    let mut worst: f64 = 0.0;
    let mut control = f64::INFINITY;
    for (name, seed) in seeds {
        let ext = example2_extremal(&SampledSignal::sample(&g, seed), 1.0).map_err(|e| e.to_string())?;
        let prob = fixture.problem(&ext.path).map_err(|e| e.to_string())?;
        let init = VectorPath::new(
            ext.path
                .components()
                .iter()
                .map(|c| {
                    let (a, b) = (c.values()[0], c.values()[n]);
                    SampledSignal::sample(&g, move |t| a + (b - a) * t)
                })
                .collect(),
        )
        .unwrap();
        let sol = solve_extremal(&prob, &init, &SolverConfig::default()).map_err(|e| e.to_string())?;
        let c = fixture.classical_quantity(&sol.path).map_err(|e| e.to_string())?;
        let defect = classical_conservation_defect(&c);
        let bad = classical_conservation_defect(
            &classical_noether_quantity(&classical, &wrong, &sol.path).map_err(|e| e.to_string())?,
        );
        println!(
            "    seed {name}: {} iterations, defect {defect:.3e}, wrong-sign generator {bad:.3e}",
            sol.iterations
        );
        worst = worst.max(defect);
        control = control.min(bad);
    }
    Ok((
        worst < 1e-2 && control > 10.0 * worst,
        format!("max defect {worst:.3e} (limit 1e-2), weakest negative control {control:.3e}"),
    ))
}

fn criterion_9() -> Check {
    let n = 1024;
    let g = grid(n);
    let cfg = SolverConfig::default();

    let free = fracvar::catalog::lagrangian("free_particle").unwrap();
    let prob = FracProblem::new(free.clone(), 1.0, 1.0, g, vec![0.0], vec![1.0]).unwrap();
    let init = VectorPath::scalar(SampledSignal::sample(&g, |t| t * t));
    let sol = solve_extremal(&prob, &init, &cfg).map_err(|e| e.to_string())?;
    let translation = fracvar::catalog::generator("translation", 1).unwrap();
    let momentum = classical_noether_quantity(&ClassicalLagrangian::from_fractional(&free), &translation, &sol.path)
        .map_err(|e| e.to_string())?;
    let p_defect = classical_conservation_defect(&momentum);

    let harmonic = fracvar::catalog::lagrangian("harmonic").unwrap();
    let s1 = 1f64.sin();
    let prob = FracProblem::new(harmonic.clone(), 1.0, 1.0, g, vec![0.0], vec![s1]).unwrap();
    let init = VectorPath::scalar(SampledSignal::sample(&g, |t| s1 * t + t * (1.0 - t)));
    let sol = solve_extremal(&prob, &init, &cfg).map_err(|e| e.to_string())?;
    let energy = euler_energy(&ClassicalLagrangian::from_fractional(&harmonic), &sol.path)
        .map_err(|e| e.to_string())?;
    let e_defect = classical_conservation_defect(&energy);
    let e_spread = energy.max_abs_in(0, n).unwrap() - energy.values().iter().cloned().fold(f64::INFINITY, f64::min);

    let kinetic = ClassicalLagrangian::new(1, |_, _, v| 0.5 * v[0] * v[0])
        .unwrap()
        .with_dv(|_, _, v| vec![v[0]]);
    let parabola = VectorPath::scalar(SampledSignal::sample(&g, |t| t * t));
    let control = classical_conservation_defect(&euler_energy(&kinetic, &parabola).unwrap());

    let ok = p_defect < 1e-3 && e_defect < 1e-3 && control > 0.5;
    Ok((
        ok,
        format!(
            "momentum defect {p_defect:.2e}, energy defect {e_defect:.2e} (spread {e_spread:.2e}), \
             non-extremal control {control:.3}"
        ),
    ))
}

fn bump(t: f64) -> f64 {
    if t <= 0.1 || t >= 0.9 {
        return 0.0;
    }
    let x = (t - 0.1) / 0.8;
    64.0 * (x * (1.0 - x)).powi(3)
}

fn criterion_10() -> Check {
    let n = 512;
    let g = grid(n);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let c: Vec<f64> = (0..4).map(|_| rng.random_range(0.5..1.5)).collect();
    let lag = Lagrangian::new(1, move |t, q, dl, dr| {
        0.5 * c[0] * dl[0] * dl[0] + c[1] * q[0] * dr[0] + c[2] * t * q[0] * q[0] + c[3] * (dl[0] * dr[0]).sin()
    })
    .unwrap();
    let q = VectorPath::scalar(SampledSignal::sample(&g, |t| t * (1.0 - t) * (1.0 + t)));
    let prob = FracProblem::with_path_boundary(lag, 0.5, 0.7, &q).map_err(|e| e.to_string())?;
    let r = el_residual(&prob, &q).map_err(|e| e.to_string())?;
    let eps = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let freq = rng.random_range(1.0..10.0);
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        let v = SampledSignal::sample(&g, |t| bump(t) * (freq * t + phase).sin());
        let shifted = |s: f64| VectorPath::scalar(q.component(0).add(&v.scale(s)).unwrap());
        let plus = evaluate_functional(&prob, &shifted(eps)).map_err(|e| e.to_string())?;
        let minus = evaluate_functional(&prob, &shifted(-eps)).map_err(|e| e.to_string())?;
        let directional = (plus - minus) / (2.0 * eps);
        let inner: f64 = (1..n).map(|k| r.component(0).values()[k] * v.values()[k] * g.h()).sum();
        let rel = (directional - inner).abs() / directional.abs();
        println!("    freq={freq:.2} phase={phase:.2}: directional {directional:.6e}, inner {inner:.6e}, rel {rel:.2e}");
        worst = if rel.is_nan() { f64::NAN } else { worst.max(rel) };
    }
    Ok((worst < 1e-3, format!("max relative gap {worst:.3e} (limit 1e-3)")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("power-rule oracle", criterion_1),
        ("integer-order reduction", criterion_2),
        ("operator identities", criterion_3),
        ("derivative of a constant", criterion_4),
        ("pairing operator", criterion_5),
        ("fractional/classical Noether bridge", criterion_6),
        ("example 1 extremal family", criterion_7),
        ("example 2 classical limit", criterion_8),
        ("classical Noether suite", criterion_9),
        ("functional-gradient consistency", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| *f == id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {id} ({name}): {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
