use dcrp::datagen::*;
use dcrp::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

#[test]
fn expected_crp_table_count() {
    let params = ProcessParams::new(1.0, TimeKernel::Step).unwrap();
    let counts: Vec<f64> = (0..100)
        .map(|seed| {
            let data = sample_mixture(&MixtureSpec::gaussian(2, 1.0, params, seed)).unwrap();
            data.iter().map(|r| r.true_cluster).max().unwrap() as f64
        })
        .collect();
    let expected: f64 = (1..=1000).map(|n| 1.0 / n as f64).sum();
    assert!((expected - 7.485).abs() < 1e-3);
    let mean = counts.iter().sum::<f64>() / 100.0;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / 99.0;
    let se = (var / 100.0).sqrt();
    assert!(
        (mean - expected).abs() < 3.0 * se,
        "mean {mean} expected {expected} se {se}"
    );
}

#[test]
fn within_cluster_variance_matches_noise() {
    // pooled over 32 coordinates so the 5% band is several standard errors wide
    let params = ProcessParams::new(1.1, TimeKernel::Step).unwrap();
    let mut checked = 0;
    for seed in 0..5 {
        let mut spec = MixtureSpec::gaussian(32, 10.0, params, seed);
        spec.sigma_o = 1.5;
        let data = sample_mixture(&spec).unwrap();
        let mut groups: HashMap<usize, Vec<Vec<f64>>> = HashMap::new();
        for r in &data {
            groups
                .entry(r.true_cluster)
                .or_default()
                .push(r.observation.to_real());
        }
        for pts in groups.values().filter(|g| g.len() >= 200) {
            let n = pts.len() as f64;
            let mut total = 0.0;
            for d in 0..32 {
                let m = pts.iter().map(|p| p[d]).sum::<f64>() / n;
                total += pts.iter().map(|p| (p[d] - m).powi(2)).sum::<f64>() / (n - 1.0);
            }
            let var = total / 32.0;
            assert!((var / 2.25 - 1.0).abs() < 0.05, "variance {var}");
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn labels_follow_first_appearance() {
    for kernel in [TimeKernel::Step, TimeKernel::exponential(10.0).unwrap()] {
        let data = sample_mixture(&MixtureSpec::vmf(
            3,
            20.0,
            ProcessParams::new(3.0, kernel).unwrap(),
            3,
        ))
        .unwrap();
        let mut max = 0;
        for r in &data {
            assert!(r.true_cluster <= max + 1);
            max = max.max(r.true_cluster);
        }
        assert!(data.windows(2).all(|w| w[1].time > w[0].time));
    }
}

#[test]
fn uniform_vmf_has_no_preferred_direction() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut sum = [0.0; 3];
    let n = 100_000;
    for _ in 0..n {
        let x = sample_vmf_with(&[0.0, 0.0, 1.0], 0.0, &mut rng).unwrap();
        for d in 0..3 {
            sum[d] += x[d];
        }
    }
    let r = (sum.iter().map(|s| s * s).sum::<f64>()).sqrt() / n as f64;
    assert!(r < 0.01, "resultant {r}");
}

#[test]
fn concentrated_vmf_points_along_its_mean() {
    let mu = [0.48, 0.6, 0.64];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut sum = [0.0; 3];
    let n = 100_000;
    for _ in 0..n {
        let x = sample_vmf_with(&mu, 50.0, &mut rng).unwrap();
        for d in 0..3 {
            sum[d] += x[d];
        }
    }
    let norm = (sum.iter().map(|s| s * s).sum::<f64>()).sqrt();
    let cos: f64 = sum.iter().zip(&mu).map(|(s, m)| s * m).sum::<f64>() / norm;
    assert!(cos.min(1.0).acos().to_degrees() < 2.0);
    // mean resultant length is A_3(50) = coth(50) - 1/50
    let a3 = 1.0 / 50f64.tanh() - 1.0 / 50.0;
    assert!((norm / n as f64 - a3).abs() < 2e-3);
}

#[test]
fn gridworld_invariants() {
    for seed in 0..5 {
        let env = generate_gridworld(&GridworldSpec::new(4, seed)).unwrap();
        assert_eq!(env.rooms.len(), 4);
        for l in &env.landmarks {
            let inside_rooms = env
                .rooms
                .iter()
                .filter(|r| r.rect.contains(l.position))
                .count();
            let inside_halls = env
                .hallways
                .iter()
                .filter(|h| h.rect.contains(l.position))
                .count();
            assert_eq!(
                inside_rooms + usize::from(inside_rooms == 0 && inside_halls > 0),
                1
            );
        }
        let json = serde_json::to_value(&env).unwrap();
        let keys: Vec<&String> = json.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["hallways", "landmarks", "rooms", "view_radius"]);
        let back: GridworldEnv = serde_json::from_value(json).unwrap();
        assert_eq!(back, env);
    }
}

#[test]
fn trajectory_observations() {
    let env = generate_gridworld(&GridworldSpec::new(4, 3)).unwrap();
    let data = simulate_trajectory(&env, 3).unwrap();
    assert_eq!(data, simulate_trajectory(&env, 3).unwrap());
    let width = env.landmarks.len();
    let r2 = env.view_radius * env.view_radius;
    let max_density = env
        .landmarks
        .iter()
        .map(|a| {
            env.landmarks
                .iter()
                .filter(|b| {
                    (a.position[0] - b.position[0]).powi(2)
                        + (a.position[1] - b.position[1]).powi(2)
                        <= 4.0 * r2
                })
                .count()
        })
        .max()
        .unwrap();
    for w in data.windows(2) {
        let a = w[0].observation.as_binary().unwrap();
        let b = w[1].observation.as_binary().unwrap();
        assert_eq!(a.len(), width);
        if w[0].true_cluster == w[1].true_cluster {
            let flips = a.iter().zip(b).filter(|(x, y)| x != y).count();
            assert!(flips <= max_density);
        }
    }
    // visible landmarks always share the agent's region
    let hallway_label = data
        .iter()
        .find(|r| {
            let bits = r.observation.as_binary().unwrap();
            bits.iter()
                .zip(&env.landmarks)
                .any(|(&b, l)| b == 1 && l.region == HALLWAY_REGION)
        })
        .map(|r| r.true_cluster);
    for r in &data {
        let bits = r.observation.as_binary().unwrap();
        let regions: Vec<usize> = bits
            .iter()
            .zip(&env.landmarks)
            .filter(|(&b, _)| b == 1)
            .map(|(_, l)| l.region)
            .collect();
        assert!(regions.windows(2).all(|p| p[0] == p[1]));
        if regions.first() == Some(&HALLWAY_REGION) {
            assert_eq!(Some(r.true_cluster), hallway_label);
        }
    }
    let _ = r2;
}
