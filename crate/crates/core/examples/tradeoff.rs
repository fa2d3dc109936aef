//! Trains every property configuration on a synthetic corpus and prints the
//! semantic / morphological scores side by side.
//!
//! cargo run --release -p propvec --example tradeoff -- [seed] [sentences]
//!
//! Generator settings can be overridden with TAG_PEAK, PURITY, TAG_ZIPF,
//! ZIPF, LEMMAS, CLUSTERS and SENT_LEN.

use std::thread;

use propvec::eval::{ag_score, morpho_sim_avg, Sample};
use propvec::synth::{synthesize, SynthConfig};
use propvec::{train_sentences, AnalysisChoice, PropertyConfig, TrainConfig};

fn main() -> propvec::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(1, |s| s.parse().unwrap());
    let n_sentences: usize = args.next().map_or(100_000, |s| s.parse().unwrap());

    let dir = tempfile::tempdir()?;
    let mut config = SynthConfig {
        n_sentences,
        ..SynthConfig::default()
    }
    .with_seed(seed);
    // Generator overrides for exploring the design space.
    let env = |k: &str| std::env::var(k).ok().map(|v| v.parse::<f64>().unwrap());
    if let Some(v) = env("TAG_PEAK") {
        config.language.tag_peak = v;
    }
    if let Some(v) = env("PURITY") {
        config.language.cluster_purity = v;
    }
    if let Some(v) = env("TAG_ZIPF") {
        config.language.tag_zipf = v;
    }
    if let Some(v) = env("ZIPF") {
        config.language.zipf = v;
    }
    if let Some(v) = env("LEMMAS") {
        config.language.lemmas_per_cluster = v as usize;
    }
    if let Some(v) = env("CLUSTERS") {
        config.language.n_clusters = v as usize;
    }
    if let Some(v) = env("SENT_LEN") {
        config.sentence_len = v as usize;
    }
    let data = synthesize(dir.path(), &config)?;
    let sentences: Vec<_> =
        propvec::corpus::parse_corpus(std::io::BufReader::new(std::fs::File::open(&data.files[0])?))
            .collect::<propvec::Result<_>>()?;

    let configs = ["W", "L", "WL", "WM", "LM", "WLM", "ngrams"];
    let rows: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = configs
            .iter()
            .map(|name| {
                let sentences = &sentences;
                let data = &data;
                s.spawn(move || {
                    let props: PropertyConfig = if *name == "ngrams" {
                        PropertyConfig::ngrams(3, 6, 200_000).unwrap()
                    } else {
                        name.parse().unwrap()
                    };
                    let tc = TrainConfig {
                        props,
                        dim: 50,
                        epochs: 5,
                        seed,
                        ..TrainConfig::default()
                    };
                    let (model, stats) = train_sentences(sentences, &tc).unwrap();
                    let wv = model.word_vectors(AnalysisChoice::MostFrequent);
                    let ss = ag_score(&model, &data.eval.common_triples).unwrap();
                    let ssr = ag_score(&model, &data.eval.rare_triples).unwrap();
                    let ms = morpho_sim_avg(
                        &wv,
                        model.vocab(),
                        &Sample::Random {
                            n: 100,
                            min_count: 5,
                            seed,
                        },
                        10,
                    )
                    .unwrap();
                    let msr =
                        morpho_sim_avg(&wv, model.vocab(), &Sample::Words(data.eval.rare_targets.clone()), 10).unwrap();
                    (name.to_string(), ss, ssr, ms.mean, msr.mean, stats.wall_time)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    println!(
        "{:<7} {:>6} {:>6} {:>6} {:>6}  {:>9}",
        "model", "SS", "SSR", "MS", "MSR", "time"
    );
    for (name, ss, ssr, ms, msr, time) in rows {
        println!(
            "{name:<7} {:>6.3} {:>6.3} {:>6.3} {:>6.3}  {:>8.1}s  (cov {}/{}, {}/{})",
            ss.score,
            ssr.score,
            ms,
            msr,
            time.as_secs_f64(),
            ss.covered,
            ss.covered + ss.skipped,
            ssr.covered,
            ssr.covered + ssr.skipped
        );
    }
    Ok(())
}
