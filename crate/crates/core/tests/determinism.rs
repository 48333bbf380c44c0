use gapforge::exactroots::{enumerate_cells, GammaInterval};
use gapforge::gapseq::{ciura_sequence, gamma_sequence, tokuda_sequence};
use gapforge::sortbench::{run_bench, TrialSet};

fn in_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn bench_is_independent_of_thread_count() {
    let seqs = vec![
        tokuda_sequence(5000),
        ciura_sequence(5000, true),
        gamma_sequence(&"2.243609061420001".parse().unwrap(), 5000),
    ];
    let trials = TrialSet::new(2024, 64, 3000).unwrap();
    let one = in_pool(1, || run_bench(&seqs, &trials).unwrap());
    let four = in_pool(4, || run_bench(&seqs, &trials).unwrap());
    for (a, b) in one.iter().zip(&four) {
        assert_eq!(a.per_trial, b.per_trial);
        assert_eq!(a.total_comparisons, b.total_comparisons);
        assert_eq!(a.mean_comparisons.to_bits(), b.mean_comparisons.to_bits());
        assert_eq!(a.variance.to_bits(), b.variance.to_bits());
    }
}

#[test]
fn enumeration_is_independent_of_thread_count() {
    let run = |threads| {
        in_pool(threads, || enumerate_cells(&GammaInterval::parse("2.24", "2.26").unwrap(), 50_000))
    };
    let (one, three) = (run(1), run(3));
    assert_eq!(one.len(), three.len());
    for (a, b) in one.iter().zip(&three) {
        assert_eq!(a.sequence, b.sequence);
        let key = |c: &gapforge::exactroots::SequenceCell| c.label.as_ref().map(|l| (l.k(), l.h()));
        assert_eq!(key(a), key(b));
    }
}

#[test]
fn same_seed_same_trials() {
    let a = TrialSet::new(7, 5, 100).unwrap();
    let b = TrialSet::new(7, 5, 100).unwrap();
    let c = TrialSet::new(8, 5, 100).unwrap();
    assert!(a.iter().zip(b.iter()).all(|(x, y)| x == y));
    assert!(a.iter().zip(c.iter()).any(|(x, y)| x != y));
}
