use kmpmd::harness::*;
fn main() {
    let mut bad = 0;
    let mut runs = 0;
    let mut ratio_max: f64 = 0.0;
    for seed in 0..20000u64 {
        let n = 2 + (seed % 9) as usize;
        let k = 5 + ((seed / 9) % 2) as usize;
        let count = k * (1 + (seed / 18) as usize % 2);
        let (t, r) = random_instance(seed + 1_000_000, n, k, count).unwrap();
        let run = run_pipeline(&t, &r, seed, Some(10_000_000)).unwrap();
        runs += run.audit.harmful_runs;
        ratio_max = ratio_max.max(run.record.ratio.unwrap());
        if !run.audit.passed() {
            bad += 1;
            if bad < 5 {
                println!("seed {seed}: {:?}", run.audit.violations);
            }
        }
    }
    println!("bad {bad} runs {runs} maxratio {ratio_max}");
}
