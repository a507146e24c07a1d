use eigenphase::{deflate, ParameterSet};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::time::Instant;

fn main() {
    // spec envelope: random mixed, no exact pairs, n <= 12 (plus margin to 16)
    for (lo, hi, trials, seed) in [(2usize, 12usize, 300usize, 7u64), (13, 16, 100, 8)] {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut ok = 0; let mut fail = 0;
        let t = Instant::now();
        for _ in 0..trials {
            let n = rng.gen_range(lo..=hi);
            let alphas: Vec<f64> = (0..n).map(|_| {
                let m = rng.gen_range(0.1..3.0);
                if rng.gen_bool(0.4) { -m } else { m }
            }).collect();
            let p = ParameterSet::new(alphas.clone()).unwrap();
            if !deflate(&p).pairs.is_empty() { continue; }
            match eigenphase::solve_spectrum(&p, 1e-13) {
                Ok(r) => { assert_eq!(r.total_multiplicity, n); ok += 1; }
                Err(e) => { fail += 1; if fail <= 3 { println!("  n={n} {e}: {alphas:?}"); } }
            }
        }
        println!("n in {lo}..{hi}: {ok} ok, {fail} failed in {:?}", t.elapsed());
    }
}
