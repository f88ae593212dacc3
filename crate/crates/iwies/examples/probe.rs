use iwies::engine::*;
use iwies::env::*;
use iwies::objective::*;
use iwies::parallel::mix_seeds;
use iwies::policy::*;
use iwies::weighting::*;

fn mean(v: &[f64]) -> f64 { v.iter().sum::<f64>() / v.len() as f64 }
fn se(v: &[f64]) -> f64 {
    let m = mean(v);
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64;
    (var / v.len() as f64).sqrt()
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let case: &str = args.get(1).map(|s| s.as_str()).unwrap_or("case1");
    let alpha: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.02);
    let rho0: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let gens: usize = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(200);
    let runs: usize = args.get(5).and_then(|s| s.parse().ok()).unwrap_or(10);
    let hidden: usize = args.get(6).and_then(|s| s.parse().ok()).unwrap_or(32);
    let seed: u64 = args.get(7).and_then(|s| s.parse().ok()).unwrap_or(42);

    let (kind, region) = match case {
        "case1" => (TaskKind::GoalNav, Rect::new(Point2::new(0.0, 0.0), Point2::new(0.5, 0.5)).unwrap()),
        "case2" => (TaskKind::ObstacleNav, Rect::arena()),
        "puddle" => (TaskKind::PuddleNav, Rect::arena()),
        _ => panic!("unknown case"),
    };
    let arch = MlpArchitecture::new(2, vec![hidden, hidden], 2, 0.1).unwrap();
    let methods = [Method::Fs, Method::Ca, Method::IwiesN, Method::IwiesQu, Method::IwiesMix];

    let mut avg: Vec<Vec<f64>> = vec![Vec::new(); methods.len()];
    let mut gen0: Vec<Vec<f64>> = vec![Vec::new(); methods.len()];

    for r in 0..runs {
        let t1 = sample_task::<f64>(kind, mix_seeds(seed, (r * 2) as u64), region).unwrap();
        let t2 = sample_task::<f64>(kind, mix_seeds(seed, (r * 2 + 1) as u64), region).unwrap();
        let base = EsConfig {
            population: 16,
            sigma: 0.05,
            alpha,
            generations: gens,
            weighting: WeightingConfig { metric: WeightMetric::Uniform, rho0, delta_rho: 0.01, normalize_metrics: true },
            fitness_shaping: FitnessShaping::CenteredRank,
            master_seed: mix_seeds(seed, 1000 + r as u64),
        };
        // shared phase 1
        let obj1 = NavigationObjective::new(&arch, &t1);
        let cfg1 = EsConfig { master_seed: phase_seed(base.master_seed, 0), ..base.clone() };
        let p1 = train_from_scratch(&obj1, &cfg1, 2).unwrap();

        let obj2 = NavigationObjective::new(&arch, &t2);
        for (mi, &method) in methods.iter().enumerate() {
            let cfg2 = EsConfig {
                master_seed: phase_seed(base.master_seed, 1),
                weighting: WeightingConfig { metric: method.metric(), ..base.weighting },
                ..base.clone()
            };
            let p2 = if method == Method::Fs {
                train_from_scratch(&obj2, &cfg2, 2).unwrap()
            } else {
                adapt(&p1.theta_star, p1.bc_star.as_ref(), &obj2, &cfg2, 2).unwrap()
            };
            avg[mi].push(p2.average_return);
            gen0[mi].push(p2.reports[0].unperturbed_return);
        }
        eprint!(".");
    }
    eprintln!();
    println!("case={case} alpha={alpha} rho0={rho0} gens={gens} runs={runs} hidden={hidden} seed={seed}");
    for (mi, m) in methods.iter().enumerate() {
        println!("{:9}  avg {:8.2} ± {:5.2}   gen0 {:8.2} ± {:5.2}",
            m.tag(), mean(&avg[mi]), se(&avg[mi]), mean(&gen0[mi]), se(&gen0[mi]));
    }
}
