use localview::Network;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `count` connectivity networks with `1..=max_users` users; each ordered
/// pair carries a cross link with a per-network density.
pub fn random_networks(seed: u64, count: usize, max_users: usize) -> Vec<Network> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=max_users);
            let p = [0.15, 0.3, 0.45, 0.6][rng.gen_range(0..4)];
            let edges: Vec<(usize, usize)> = (0..k)
                .flat_map(|i| (0..k).map(move |j| (i, j)))
                .filter(|&(i, j)| i != j)
                .filter(|_| rng.gen_bool(p))
                .collect();
            Network::new(k, edges).unwrap()
        })
        .collect()
}
