//! Drives the evaluation tasks over a prepared store and assembles a report.

use crate::config::{Provider, RunConfig};
use crate::corpus::{load_corpus, Corpus};
use crate::embed::{hash_embed_all, load_store, normalize_store, remote_embed, resolve_endpoint, RemoteConfig, Store};
use crate::error::{Error, Result};
use crate::linguistic::{AntonymLexicon, LexiconTagger, PreTagged, Tagger};
use crate::metrics::{
    aop, capability_matrix, category_means, mrr, nnk_ret, pairwise_similarity_stats, t100, RankOutcome, Thresholds,
};
use crate::perturb::{
    category_of, expand_codes, with_reserved, Annotator, DocumentVariant, Perturber, CODE_TITLE, CODE_TITLE_ABSTRACT,
};
use crate::report::{
    round_mrr, round_pct, AopCategoryRow, AopRow, CapabilitySection, EvalReport, KValue, NnRetCategoryRow, NnRetRow,
    RetrievalRow, RunMetadata, SimilarityRow,
};
use crate::retrieval::{build_aop, build_nn_ret, build_task1, build_task2, rank_queries, TaskId, TaskSetup};
use crate::scalar::Scalar;

pub const CAPABILITY_K: usize = 20;

pub fn load_config_corpus(config: &RunConfig) -> Result<Corpus> {
    let path = config.corpus.as_deref().ok_or_else(|| Error::Validation("no corpus given".into()))?;
    load_corpus(path, &config.dataset_name())
}

/// Perturber from the config's tagger, tag fixture and antonym lexicon.
pub fn build_perturber(config: &RunConfig) -> Result<Perturber> {
    let tagger = match &config.tagger {
        Some(p) => LexiconTagger::load(p)?,
        None => LexiconTagger::bundled(),
    };
    let lexicon = match &config.antonyms {
        Some(p) => AntonymLexicon::load(p)?,
        None => AntonymLexicon::starter(),
    };
    let annotator: Box<dyn Annotator> = match &config.tags {
        Some(p) => Box::new(PreTagged::load(p, Box::new(tagger) as Box<dyn Tagger>)?),
        None => Box::new(tagger),
    };
    Ok(Perturber::new(annotator, lexicon, config.seed))
}

/// Selected codes plus T and T+A for every document.
pub fn generate_variants(corpus: &Corpus, config: &RunConfig) -> Result<Vec<DocumentVariant>> {
    let codes = expand_codes(&config.codes)?;
    build_perturber(config)?.generate(corpus, &with_reserved(&codes))
}

/// Embeds variants with the configured provider; `file` loads the configured store.
pub fn embed_variants(variants: &[DocumentVariant], config: &RunConfig) -> Result<Store<f32>> {
    let mut store = match config.provider {
        Provider::Hash => hash_embed_all(variants, config.hash_dimension)?,
        Provider::File => {
            let path =
                config.store.as_deref().ok_or_else(|| Error::Validation("provider file needs a store path".into()))?;
            load_store(path)?
        }
        Provider::Remote => {
            let endpoint = resolve_endpoint(config.embed_url.as_deref())?;
            let mut rc = RemoteConfig::new(endpoint, config.model_name());
            if let Some(t) = config.threads {
                rc.parallelism = t.max(1);
            }
            remote_embed(variants, &rc)?
        }
    };
    if let Some(m) = &config.model {
        store.set_model_name(m.clone());
    } else if store.model_name().is_empty() {
        store.set_model_name(config.model_name());
    }
    Ok(store)
}

fn retrieval_row<S: Scalar>(setup: &TaskSetup, store: &Store<S>) -> Result<RetrievalRow> {
    let outcomes = rank_queries(setup, store)?;
    Ok(RetrievalRow {
        task: setup.task,
        queries: setup.queries.len(),
        candidates_per_query: setup.queries.first().map_or(0, |q| setup.candidate_count(q)),
        mrr: round_mrr(mrr(&outcomes)?),
        t100: round_pct(t100(&outcomes)?),
    })
}

/// Normalizes `store` per the config, then runs every selected task.
pub fn evaluate<S: Scalar>(corpus: &Corpus, raw: &Store<S>, config: &RunConfig) -> Result<EvalReport> {
    config.validate()?;
    let store = normalize_store(&raw.cast::<f64>(), config.normalization, None)?;
    let codes = expand_codes(&config.codes)?;
    let mut report = EvalReport {
        metadata: RunMetadata {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            dataset: config.dataset_name(),
            corpus_documents: corpus.len(),
            model: if raw.model_name().is_empty() { config.model_name() } else { raw.model_name().to_string() },
            dimension: raw.dimension(),
            normalization: config.normalization,
            seed: config.seed,
            pair_cap: config.pair_cap,
            aggregation: "single dataset".into(),
            generated_at: None,
            config_digest: config.digest(),
            config: RunConfig { output_dir: None, threads: None, ..config.clone() },
        },
        retrieval: Vec::new(),
        nn_ret: Vec::new(),
        nn_ret_by_category: Vec::new(),
        aop: Vec::new(),
        aop_by_category: Vec::new(),
        similarity: Vec::new(),
        capability: None,
    };

    for task in &config.tasks {
        match task {
            TaskId::Task1 => {
                let s = build_task1(corpus, &store, config.task_sample, config.seed)?;
                report.retrieval.push(retrieval_row(&s, &store)?);
            }
            TaskId::Task2 => {
                let s = build_task2(corpus, &store, config.task_sample, config.seed)?;
                report.retrieval.push(retrieval_row(&s, &store)?);
            }
            TaskId::NnRet => nn_ret_section(corpus, &store, &codes, config, &mut report)?,
            TaskId::Aop => aop_section(corpus, &store, &codes, config, &mut report)?,
        }
    }
    Ok(report)
}

fn nn_ret_section(
    corpus: &Corpus,
    store: &Store<f64>,
    codes: &[&str],
    config: &RunConfig,
    report: &mut EvalReport,
) -> Result<()> {
    let setup = build_nn_ret(corpus, store, codes)?;
    let outcomes = rank_queries(&setup, store)?;
    let mut ks = config.nn_k.clone();
    ks.sort_unstable();
    ks.dedup();
    let per_doc = corpus.len();
    for (i, code) in codes.iter().enumerate() {
        let slice: &[RankOutcome] = &outcomes[i * per_doc..(i + 1) * per_doc];
        debug_assert!(slice.iter().all(|o| o.query.code == *code));
        let values = ks.iter().map(|&k| Ok(KValue { k, value: nnk_ret(slice, k)? })).collect::<Result<Vec<_>>>()?;
        report.nn_ret.push(NnRetRow {
            code: code.to_string(),
            category: category_of(code).expect("registry code"),
            queries: slice.len(),
            candidates: setup.candidates.len(),
            values,
        });
    }
    let mut by_cat: Vec<NnRetCategoryRow> = Vec::new();
    for &k in &ks {
        let vals: Vec<(&str, f64)> = report
            .nn_ret
            .iter()
            .map(|r| (r.code.as_str(), r.values.iter().find(|v| v.k == k).unwrap().value))
            .collect();
        for (cat, mean) in category_means(vals)? {
            let codes_in = report.nn_ret.iter().filter(|r| r.category == cat).count();
            match by_cat.iter_mut().find(|r| r.category == cat) {
                Some(row) => row.values.push(KValue { k, value: mean }),
                None => by_cat.push(NnRetCategoryRow {
                    category: cat,
                    codes: codes_in,
                    values: vec![KValue { k, value: mean }],
                }),
            }
        }
    }
    for row in report.nn_ret.iter_mut() {
        row.values.iter_mut().for_each(|v| v.value = round_pct(v.value));
    }
    for row in by_cat.iter_mut() {
        row.values.iter_mut().for_each(|v| v.value = round_pct(v.value));
    }
    report.nn_ret_by_category = by_cat;

    let mut sim_codes = vec![CODE_TITLE_ABSTRACT, CODE_TITLE];
    sim_codes.extend(codes.iter().copied());
    for code in sim_codes {
        let vectors: Vec<&[f64]> =
            corpus.documents.iter().map(|d| store.require(&crate::Key::new(&d.id, code))).collect::<Result<_>>()?;
        if vectors.len() < 2 {
            continue;
        }
        let mut stats = pairwise_similarity_stats(&vectors, Some(config.pair_cap), config.seed)?;
        stats.percent_above_mean = round_pct(stats.percent_above_mean);
        report.similarity.push(SimilarityRow { code: code.to_string(), category: category_of(code), stats });
    }
    Ok(())
}

fn aop_section(
    corpus: &Corpus,
    store: &Store<f64>,
    codes: &[&str],
    config: &RunConfig,
    report: &mut EvalReport,
) -> Result<()> {
    let mut ks = config.aop_k.clone();
    ks.sort_unstable();
    ks.dedup();
    let kmax = *ks.last().ok_or_else(|| Error::Validation("no AOP k values".into()))?;
    let mut raw: Vec<(String, usize, f64)> = Vec::new();
    for code in codes {
        let setup = build_aop(corpus, store, code, config.aop_sample, kmax, config.seed)?;
        for &k in &ks {
            let value = aop(setup.pairs.iter().map(|p| (&p.variant_nn[..k], &p.original_nn[..k])), k)?;
            raw.push((code.to_string(), k, value));
            report.aop.push(AopRow {
                code: code.to_string(),
                category: category_of(code).expect("registry code"),
                k,
                pairs: setup.pairs.len(),
                candidates: setup.candidate_count,
                aop: round_pct(value),
            });
        }
    }
    for &k in &ks {
        let means = category_means(raw.iter().filter(|r| r.1 == k).map(|r| (r.0.as_str(), r.2)))?;
        for (cat, mean) in &means {
            report.aop_by_category.push(AopCategoryRow {
                category: *cat,
                k,
                codes: report.aop.iter().filter(|a| a.k == k && a.category == *cat).count(),
                aop: round_pct(*mean),
            });
        }
        if k == CAPABILITY_K && means.len() == 5 {
            report.capability = Some(CapabilitySection {
                k,
                aggregation: report.metadata.aggregation.clone(),
                matrix: capability_matrix(&means, &Thresholds::default())?,
            });
        }
    }
    report.aop_by_category.sort_by_key(|a| (a.category, a.k));
    Ok(())
}
