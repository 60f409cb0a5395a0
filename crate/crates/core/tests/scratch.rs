//! temporary experiment

use beatkit_core::eval::fmeasure_times;
use beatkit_core::pipeline::{plpdp_pipeline, PlpdpParams};
use beatkit_core::synth::{synth_corpus, synth_track, CorpusSpec, TempoTrajectory};
use beatkit_core::trackers::{hmm_track, HmmConfig};

#[test]
#[ignore]
fn flexibility_sweep() {
    let spec = CorpusSpec {
        n_tracks: 50,
        duration_sec: 60.0,
        ..CorpusSpec::default()
    };
    let corpus = synth_corpus(&spec).unwrap();
    let mut rows = Vec::new();
    for track in corpus
        .iter()
        .filter(|t| matches!(t.trajectory.family(), "ramp" | "rubato"))
    {
        let refs = track.reference.times_sec();
        let plpdp = plpdp_pipeline(&track.activation, &PlpdpParams::default()).unwrap();
        let r_plpdp = fmeasure_times(&plpdp.beats.times_sec(), &refs, 0.07).recall;
        let hmm100 = hmm_track(&track.activation, &HmmConfig::default()).unwrap();
        let r_hmm100 = fmeasure_times(&hmm100.times_sec(), &refs, 0.07).recall;
        let hmm0 = hmm_track(
            &track.activation,
            &HmmConfig {
                lambda_trans: 0.0,
                ..HmmConfig::default()
            },
        )
        .unwrap();
        let r_hmm0 = fmeasure_times(&hmm0.times_sec(), &refs, 0.07).recall;
        println!(
            "{}: plpdp {:.3} hmm100 {:.3} hmm0 {:.3}",
            track.name, r_plpdp, r_hmm100, r_hmm0
        );
        rows.push((r_plpdp, r_hmm100, r_hmm0));
    }
    let n = rows.len() as f64;
    let mean = |f: fn(&(f64, f64, f64)) -> f64| rows.iter().map(f).sum::<f64>() / n;
    println!(
        "MEANS plpdp {:.4} hmm100 {:.4} hmm0 {:.4} over {} tracks",
        mean(|r| r.0),
        mean(|r| r.1),
        mean(|r| r.2),
        rows.len()
    );
}

#[test]
#[ignore]
fn hmm0_miss_diagnosis() {
    let spec = CorpusSpec {
        n_tracks: 8,
        duration_sec: 60.0,
        ..CorpusSpec::default()
    };
    let corpus = synth_corpus(&spec).unwrap();
    for track in &corpus {
        let refs = track.reference.times_sec();
        let hmm0 = hmm_track(
            &track.activation,
            &HmmConfig {
                lambda_trans: 0.0,
                ..HmmConfig::default()
            },
        )
        .unwrap();
        let est = hmm0.times_sec();
        let missed: Vec<f64> = refs
            .iter()
            .copied()
            .filter(|&r| !est.iter().any(|&e| (e - r).abs() <= 0.07))
            .collect();
        let track_len = refs.len();
        println!(
            "{}: {} refs, missed {:?} (last ref {:.2})",
            track.name,
            track_len,
            missed,
            refs.last().unwrap()
        );
        if !missed.is_empty() {
            let m = missed[0];
            let near: Vec<f64> = est
                .iter()
                .copied()
                .filter(|&e| (e - m).abs() < 0.6)
                .collect();
            println!("   est near first miss: {near:?}");
        }
    }
}

#[test]
#[ignore]
fn pipeline_sweep() {
    for bpm in [50.0f64, 60.0, 75.0, 100.0, 120.0, 150.0, 187.5, 200.0] {
        let track = synth_track(
            format!("c{bpm}"),
            TempoTrajectory::Constant { bpm },
            40.0,
            100,
            1e-6,
        )
        .unwrap();
        let out = plpdp_pipeline(&track.activation, &PlpdpParams::default()).unwrap();
        let refs: Vec<f64> = track
            .reference
            .times_sec()
            .into_iter()
            .filter(|&t| t >= 5.0 && t <= 37.0)
            .collect();
        let est: Vec<f64> = out
            .beats
            .times_sec()
            .into_iter()
            .filter(|&t| t >= 5.0 && t <= 37.0)
            .collect();
        let r = fmeasure_times(&est, &refs, 0.07);
        // inspect the combined-curve peak gaps too
        let v = out.combined.values();
        let peaks: Vec<usize> = (1..v.len() - 1)
            .filter(|&i| v[i] > v[i - 1] && v[i] > v[i + 1] && v[i] > 0.1)
            .filter(|&i| i > 500 && i + 500 < v.len())
            .collect();
        let gaps: Vec<usize> = peaks.windows(2).map(|w| w[1] - w[0]).collect();
        let gmin = gaps.iter().min().copied().unwrap_or(0);
        let gmax = gaps.iter().max().copied().unwrap_or(0);
        println!(
            "bpm {bpm:7.1} period {:5.1} | F1 {:.3} P {:.3} R {:.3} | com gaps [{gmin},{gmax}]",
            6000.0 / bpm,
            r.f1,
            r.precision,
            r.recall
        );
    }
}
