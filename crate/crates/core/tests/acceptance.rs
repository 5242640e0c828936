//! Acceptance criteria 1-11. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. The MNIST-backed criteria read the bundled subset in
//! `data/mnist-subset` at the workspace root.

use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

use iqgan::artifacts::{metrics_csv, trace_csv};
use iqgan::autodiff::{finite_diff_grad, gan_loss, param_shift_grad, GradTarget, LossContext};
use iqgan::circuits::{
    build_generator, gan_circuit_cost, generator_param_count, hardware_cost, swap_test_p0, Ansatz,
    EncoderMode, EncoderParams, GeneratorParams, Scheme,
};
use iqgan::data::{filter_classes, fit_pca, load_idx, PcaModel, Sample};
use iqgan::noise::{density_evolve, noisy_fidelity, DensityMatrix, NoiseSpec};
use iqgan::qsim::{fidelity, Circuit, Gate, GateKind, StateVector};
use iqgan::training::{
    ablation_run, hs_distance, noise_sweep, pretrain_encoder, train_gan, PretrainConfig,
    SweepConfig, TrainConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: [u64; 3] = [0, 1, 2];

type Criterion<'a> = (
    u32,
    &'static str,
    Option<Duration>,
    Box<dyn Fn() -> Verdict + 'a>,
);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn random_circuit(n: usize, len: usize, rng: &mut ChaCha8Rng) -> Circuit {
    let kinds: Vec<GateKind> = GateKind::ALL
        .iter()
        .copied()
        .filter(|k| k.arity() <= n)
        .collect();
    let mut c = Circuit::new(n);
    for _ in 0..len {
        let kind = kinds[rng.random_range(0..kinds.len())];
        let mut qubits: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            qubits.swap(i, rng.random_range(0..=i));
        }
        let params = (0..kind.num_params())
            .map(|_| rng.random_range(-PI..PI))
            .collect();
        c.push(Gate::new(kind, params, qubits[..kind.arity()].to_vec()).unwrap())
            .unwrap();
    }
    c
}

fn random_generator(
    ansatz: Ansatz,
    n: usize,
    blocks: usize,
    rng: &mut ChaCha8Rng,
) -> GeneratorParams {
    let theta = (0..generator_param_count(ansatz, n, blocks))
        .map(|_| rng.random_range(-PI..PI))
        .collect();
    GeneratorParams::new(ansatz, n, blocks, theta).unwrap()
}

fn random_batch(n: usize, size: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..size)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

fn c1_swap_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let n = 1 + i % 3;
        let a = random_circuit(n, 6, &mut rng);
        let b = random_circuit(n, 6, &mut rng);
        let f = fidelity(&a.run(None).unwrap(), &b.run(None).unwrap()).unwrap();
        let p0 = swap_test_p0(&a, &b, n).unwrap();
        worst = worst.max((p0 - (1.0 + f) / 2.0).abs());
    }
    verdict(
        worst < 1e-10,
        format!("max |P0 - (1+F)/2| = {worst:.1e} over 200 pairs, n in 1..=3"),
    )
}

fn c2_gradient_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let ansatz = Ansatz::ALL[i % 5];
        let n = 2 + i % 2;
        let blocks = 1 + (i / 5) % 2;
        let generator = random_generator(ansatz, n, blocks, &mut rng);
        let scales = (0..n).map(|_| rng.random_range(0.3..0.9)).collect();
        let encoder = EncoderParams::trainable(scales).unwrap();
        let batch = random_batch(n, 3, &mut rng);
        let ctx = LossContext::new(&batch, encoder, generator);
        for which in [GradTarget::Generator, GradTarget::Encoder] {
            let exact = param_shift_grad(&ctx, which).unwrap().values;
            let fd = finite_diff_grad(&ctx, which, 1e-5).unwrap();
            let diff = exact
                .iter()
                .zip(&fd)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            let scale = fd.iter().map(|b| b * b).sum::<f64>().sqrt().max(1e-3);
            worst = worst.max(diff / scale);
        }
    }
    verdict(
        worst < 1e-5,
        format!("max relative |shift - FD| = {worst:.1e} over 50 contexts, 5 ansatz kinds"),
    )
}

fn c3_periodicity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let (mut worst, mut controlled) = (0.0f64, 0usize);
    for ansatz in Ansatz::ALL {
        for _ in 0..4 {
            let generator = random_generator(ansatz, 2, 2, &mut rng);
            let circuit = build_generator(&generator).unwrap();
            assert_eq!(circuit.param_values(), generator.theta_g);
            let batch = random_batch(2, 4, &mut rng);
            let base = gan_loss(&LossContext::new(
                &batch,
                EncoderParams::unit(2),
                generator.clone(),
            ))
            .unwrap();
            for k in 0..generator.theta_g.len() {
                // A controlled rotation at 2π is a controlled −I, which is not a global
                // phase; its angles are 4π-periodic.
                let period = if circuit.slot_gate_kind(k).is_controlled_rotation() {
                    controlled += 1;
                    4.0 * PI
                } else {
                    2.0 * PI
                };
                let mut theta = generator.theta_g.clone();
                theta[k] += period;
                let shifted = generator.with_theta(theta).unwrap();
                let l =
                    gan_loss(&LossContext::new(&batch, EncoderParams::unit(2), shifted)).unwrap();
                worst = worst.max((l - base).abs());
            }
        }
    }
    verdict(
        worst < 1e-12,
        format!("max |L(θ + T e_k) - L(θ)| = {worst:.1e}; T = 2π, or 4π on {controlled} controlled-rotation angles"),
    )
}

fn c4_cost_model() -> Verdict {
    // Table rows restated as (n·b, n, b, 1) coefficient vectors.
    let table: [(Scheme, [[usize; 4]; 4]); 3] = [
        (
            Scheme::Qugan21,
            [[0, 2, 0, 1], [1, 0, 0, 1], [4, 0, 0, 0], [5, 0, 0, 0]],
        ),
        (
            Scheme::EqGan,
            [[0, 2, 0, 1], [2, 1, 0, 2], [1, 1, 0, 0], [2, 0, 0, 0]],
        ),
        (
            Scheme::Iqgan,
            [[0, 2, 0, 1], [2, 1, 0, 2], [0, 1, 0, 0], [2, 0, 0, 0]],
        ),
    ];
    let mut mismatches = Vec::new();
    for n in 1..=8 {
        for b in 1..=4 {
            let eval = |c: [usize; 4]| c[0] * n * b + c[1] * n + c[2] * b + c[3];
            for (scheme, rows) in table {
                let r = hardware_cost(scheme, n, b).unwrap();
                let want = rows.map(eval);
                if [r.qubits, r.one_qubit_gates, r.two_qubit_gates, r.parameters] != want {
                    mismatches.push(format!("{scheme} n={n} b={b}"));
                }
            }
            let built =
                gan_circuit_cost(&GeneratorParams::zeros(Ansatz::NoEntangler, n, b).unwrap())
                    .unwrap();
            let r = hardware_cost(Scheme::Iqgan, n, b).unwrap();
            if [
                built.qubits,
                built.one_qubit_gates,
                built.two_qubit_gates,
                built.parameters,
            ] != [r.qubits, r.one_qubit_gates, r.two_qubit_gates, r.parameters]
            {
                mismatches.push(format!("built none n={n} b={b}"));
            }
        }
    }
    verdict(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "3 schemes and built no-entangler circuits exact on (n,b) in 1..8 x 1..4".to_string()
        } else {
            format!("mismatches: {}", mismatches.join(", "))
        },
    )
}

struct Mnist {
    samples: Vec<Sample>,
}

impl Mnist {
    fn load() -> Self {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/mnist-subset");
        let samples = load_idx(dir.join("images-idx3-ubyte"), dir.join("labels-idx1-ubyte"))
            .expect("bundled subset");
        Self { samples }
    }

    fn pixels(&self, classes: &[u8]) -> Vec<Vec<f64>> {
        filter_classes(&self.samples, classes)
            .into_iter()
            .map(|s| s.pixels)
            .collect()
    }

    fn all_pixels(&self) -> Vec<Vec<f64>> {
        self.samples.iter().map(|s| s.pixels.clone()).collect()
    }

    /// PCA to two features, fitted on every class.
    fn pca(&self) -> PcaModel {
        fit_pca(&self.all_pixels(), 2).unwrap()
    }

    fn project(&self, pca: &PcaModel, classes: &[u8]) -> Vec<Vec<f64>> {
        self.pixels(classes)
            .iter()
            .map(|p| pca.project(p).unwrap())
            .collect()
    }
}

fn default_train(seed: u64) -> TrainConfig {
    TrainConfig {
        seed,
        allow_unpretrained: true,
        ..TrainConfig::default()
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter()
        .map(|f| format!("{f:.4}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn c5_convergence(mnist: &Mnist) -> Verdict {
    let coords = mnist.project(&mnist.pca(), &[0]);
    let finals: Vec<f64> = SEEDS
        .iter()
        .map(|&s| {
            train_gan(&coords, &EncoderParams::unit(2), &default_train(s))
                .unwrap()
                .final_fidelity()
        })
        .collect();
    let hits = finals.iter().filter(|&&f| f >= 0.90).count();
    verdict(
        coords.len() >= 256 && hits >= 2,
        format!(
            "digit 0, {} samples; final fidelity [{}], {hits}/3 >= 0.90",
            coords.len(),
            fmt_list(&finals)
        ),
    )
}

fn c6_te_vs_fe(mnist: &Mnist) -> Verdict {
    let pca = mnist.pca();
    let target = mnist.project(&pca, &[0]);
    let classes = vec![mnist.project(&pca, &[0]), mnist.project(&pca, &[1])];
    let (mut te, mut fe) = (Vec::new(), Vec::new());
    for &seed in &SEEDS {
        let pre = pretrain_encoder(
            &classes,
            &EncoderParams::unit(2),
            &PretrainConfig {
                seed,
                ..PretrainConfig::default()
            },
        )
        .unwrap();
        let cfg = TrainConfig {
            seed,
            ..TrainConfig::default()
        };
        te.push(
            train_gan(&target, &pre.encoder, &cfg)
                .unwrap()
                .final_fidelity(),
        );
        let cfg = TrainConfig {
            encoder: EncoderMode::Fixed,
            ..cfg
        };
        fe.push(
            train_gan(&target, &EncoderParams::fixed(2), &cfg)
                .unwrap()
                .final_fidelity(),
        );
    }
    let wins = te
        .iter()
        .zip(&fe)
        .filter(|(t, f)| **t >= **f - 0.01)
        .count();
    verdict(
        wins >= 2,
        format!(
            "pretrained TE [{}] vs FE [{}]; {wins}/3 seeds TE >= FE - 0.01",
            fmt_list(&te),
            fmt_list(&fe)
        ),
    )
}

fn c7_ablation(mnist: &Mnist) -> Verdict {
    let coords = mnist.project(&mnist.pca(), &[0]);
    let rows = ablation_run(
        &coords,
        &EncoderParams::unit(2),
        &default_train(0),
        &[Ansatz::NoEntangler, Ansatz::Cnot],
        &SEEDS,
    )
    .unwrap();
    let (none, cnot) = (&rows[0], &rows[1]);
    let two_qubit = build_generator(&GeneratorParams::zeros(Ansatz::NoEntangler, 2, 1).unwrap())
        .unwrap()
        .gate_counts()
        .1;
    verdict(
        none.mean_fidelity >= cnot.mean_fidelity - 0.02 && two_qubit == 0,
        format!(
            "none {:.4} (sd {:.4}) vs cnot {:.4} (sd {:.4}); no-entangler generator 2q gates = {two_qubit}",
            none.mean_fidelity, none.stddev, cnot.mean_fidelity, cnot.stddev
        ),
    )
}

fn c8_noise_trend(mnist: &Mnist) -> Verdict {
    let sweep = SweepConfig {
        sizes: vec![2, 4, 6, 8],
        noise: NoiseSpec::new(0.01, 0.01).unwrap(),
        trajectories: 1000,
        eval_samples: 4,
    };
    let rows = noise_sweep(
        &mnist.all_pixels(),
        &mnist.pixels(&[0]),
        &sweep,
        &default_train(0),
    )
    .unwrap();
    let strict = rows.last().unwrap().fidelity < rows[0].fidelity;
    let monotone = rows.windows(2).all(|w| {
        let tol = 2.0 * (w[0].std_err.powi(2) + w[1].std_err.powi(2)).sqrt();
        w[1].fidelity <= w[0].fidelity + tol
    });
    let text = rows
        .iter()
        .map(|r| format!("n={} {:.4}±{:.4}", r.n, r.fidelity, r.std_err))
        .collect::<Vec<_>>();
    verdict(
        strict && monotone,
        format!(
            "{}; F(8) < F(2): {strict}, non-increasing within 2 se: {monotone}",
            text.join(", ")
        ),
    )
}

fn c9_trajectory_vs_density() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut circuits: Vec<Circuit> = Ansatz::ALL
        .iter()
        .map(|&a| build_generator(&random_generator(a, 2, 1, &mut rng)).unwrap())
        .collect();
    circuits.push(build_generator(&random_generator(Ansatz::NoEntangler, 1, 2, &mut rng)).unwrap());
    let mut bell = Circuit::new(2);
    bell.push(Gate::h(0))
        .unwrap()
        .push(Gate::cnot(0, 1))
        .unwrap();
    circuits.push(bell);
    circuits.push(random_circuit(2, 8, &mut rng));
    let specs = [(0.05, 0.0), (0.0, 0.05), (0.03, 0.07)];
    let (mut worst, mut checked) = (0.0f64, 0);
    for (i, c) in circuits.iter().enumerate() {
        let ideal = c.run(None).unwrap();
        for (j, &(pb, pp)) in specs.iter().enumerate() {
            let spec = NoiseSpec::new(pb, pp).unwrap();
            let exact = density_evolve(c, &spec)
                .unwrap()
                .fidelity_with_pure(&ideal)
                .unwrap();
            let est = noisy_fidelity(c, &ideal, &spec, 10_000, (i * 10 + j) as u64).unwrap();
            let z = (est.mean - exact).abs() / est.std_err.max(1e-12);
            worst = worst.max(z);
            checked += 1;
        }
    }
    verdict(worst < 3.0, format!("max |traj - density| / se = {worst:.2} over {checked} circuit/noise pairs, 1e4 trajectories"))
}

fn c10_pretraining(rng_seed: u64) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let cluster = |c: f64, rng: &mut ChaCha8Rng| {
        (0..40)
            .map(|_| vec![c + rng.random_range(-0.05..0.05)])
            .collect::<Vec<_>>()
    };
    let classes = vec![cluster(-0.8, &mut rng), cluster(0.8, &mut rng)];
    let init = EncoderParams::trainable(vec![0.1]).unwrap();
    let result = pretrain_encoder(&classes, &init, &PretrainConfig::default()).unwrap();

    let pure = |gates: &[Gate]| {
        let mut s = StateVector::zero(1).unwrap();
        for g in gates {
            s.apply(g).unwrap();
        }
        DensityMatrix::from_pure(&s).unwrap()
    };
    let (zero, one, plus) = (pure(&[]), pure(&[Gate::rx(PI, 0)]), pure(&[Gate::h(0)]));
    let units = [
        hs_distance(&zero, &zero).unwrap(),
        hs_distance(&zero, &one).unwrap(),
        hs_distance(&zero, &plus).unwrap(),
    ];
    let units_ok = (units[0] - 0.0).abs() < 1e-10
        && (units[1] - 2.0).abs() < 1e-10
        && (units[2] - 1.0).abs() < 1e-10;
    verdict(
        result.final_objective > result.initial_objective && units_ok,
        format!(
            "separation {:.4} -> {:.4} (θs 0.1 -> {:.4}); hs units [{}]",
            result.initial_objective,
            result.final_objective,
            result.encoder.theta_s[0],
            units
                .iter()
                .map(|u| format!("{u:.1e}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn c11_determinism(mnist: &Mnist) -> Verdict {
    let coords = mnist.project(&mnist.pca(), &[0]);
    let train = || {
        metrics_csv(
            &train_gan(&coords, &EncoderParams::unit(2), &default_train(7))
                .unwrap()
                .records,
        )
    };
    let classes = vec![
        mnist.project(&mnist.pca(), &[0]),
        mnist.project(&mnist.pca(), &[1]),
    ];
    let pre = || {
        trace_csv(
            &pretrain_encoder(
                &classes,
                &EncoderParams::unit(2),
                &PretrainConfig {
                    seed: 7,
                    ..PretrainConfig::default()
                },
            )
            .unwrap()
            .trace,
        )
    };
    let same_train = train() == train();
    let same_pre = pre() == pre();
    verdict(
        same_train && same_pre,
        format!("metrics CSV identical: {same_train}; pretrain trace identical: {same_pre}"),
    )
}

fn main() {
    let mnist = Mnist::load();
    let criteria: Vec<Criterion> = vec![
        (
            1,
            "swap-test identity",
            Some(Duration::from_secs(10)),
            Box::new(c1_swap_identity),
        ),
        (
            2,
            "gradient oracle",
            Some(Duration::from_secs(60)),
            Box::new(c2_gradient_oracle),
        ),
        (
            3,
            "loss periodicity",
            Some(Duration::from_secs(5)),
            Box::new(c3_periodicity),
        ),
        (
            4,
            "cost model",
            Some(Duration::from_secs(1)),
            Box::new(c4_cost_model),
        ),
        (
            5,
            "convergence",
            Some(Duration::from_secs(300)),
            Box::new(|| c5_convergence(&mnist)),
        ),
        (
            6,
            "TE vs FE",
            Some(Duration::from_secs(600)),
            Box::new(|| c6_te_vs_fe(&mnist)),
        ),
        (
            7,
            "ablation ordering",
            Some(Duration::from_secs(900)),
            Box::new(|| c7_ablation(&mnist)),
        ),
        (
            8,
            "noise trend",
            Some(Duration::from_secs(1800)),
            Box::new(|| c8_noise_trend(&mnist)),
        ),
        (
            9,
            "trajectory/density equivalence",
            Some(Duration::from_secs(60)),
            Box::new(c9_trajectory_vs_density),
        ),
        (
            10,
            "pretraining ascent",
            Some(Duration::from_secs(30)),
            Box::new(|| c10_pretraining(10)),
        ),
        (
            11,
            "determinism",
            None,
            Box::new(|| c11_determinism(&mnist)),
        ),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in &criteria {
        let start = Instant::now();
        let v = run();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took <= l);
        let pass = v.pass && in_time;
        failed += usize::from(!pass);
        let budget = limit
            .map(|l| format!(" / {}s", l.as_secs()))
            .unwrap_or_default();
        println!(
            "{} criterion {id:>2} {name}: {} [{:.2}s{budget}]",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            took.as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
