use std::path::{Path, PathBuf};

use nbr_core::config::{Provider, RunConfig};
use nbr_core::corpus::corpus_stats;
use nbr_core::embed::{load_store, save_store};
use nbr_core::perturb::{read_variants, write_variants};
use nbr_core::pipeline::{embed_variants, evaluate, generate_variants, load_config_corpus};
use nbr_core::report::{emit, EvalReport, Format};
use nbr_core::{write_atomic, Error, Result};

use crate::args::{AllArgs, Command, Common, EmbedArgs, EvalArgs, IngestArgs, PerturbArgs, ReportArgs};

pub const VARIANTS_FILE: &str = "variants.jsonl";
pub const STORE_FILE: &str = "store.nbrv";

pub fn run(command: &Command, common: &Common) -> Result<()> {
    let mut config = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(t) = common.threads {
        if t == 0 {
            return Err(Error::Validation("--threads must be at least 1".into()));
        }
        config.threads = Some(t);
    }
    if let Some(t) = config.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match command {
        Command::Ingest(a) => ingest(a, config),
        Command::Perturb(a) => perturb(a, config),
        Command::Embed(a) => embed(a, config),
        Command::Eval(a) => eval(a, config),
        Command::Report(a) => report(a),
        Command::All(a) => all(a, config),
    }
}

fn ingest(a: &IngestArgs, mut config: RunConfig) -> Result<()> {
    a.corpus.apply(&mut config);
    let corpus = load_config_corpus(&config)?;
    let stats = corpus_stats(&corpus)?;
    let text = serde_json::to_string_pretty(&stats)? + "\n";
    match &a.out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn perturb(a: &PerturbArgs, mut config: RunConfig) -> Result<()> {
    a.corpus.apply(&mut config);
    a.selection.apply(&mut config);
    a.linguistic.apply(&mut config);
    let corpus = load_config_corpus(&config)?;
    let variants = generate_variants(&corpus, &config)?;
    write_variants(&a.out, &variants)?;
    eprintln!("wrote {} variants for {} documents to {}", variants.len(), corpus.len(), a.out.display());
    Ok(())
}

fn embed(a: &EmbedArgs, mut config: RunConfig) -> Result<()> {
    a.provider.apply(&mut config);
    if let Some(s) = &a.store {
        config.store = Some(s.display().to_string());
        if a.provider.provider.is_none() {
            config.provider = Provider::File;
        }
    }
    let variants = match (&a.variants, config.provider) {
        (Some(p), _) => read_variants(p)?,
        (None, Provider::File) => Vec::new(),
        (None, _) => return Err(Error::Validation("--variants is required for this provider".into())),
    };
    let store = embed_variants(&variants, &config)?;
    save_store(&store, &a.out)?;
    eprintln!(
        "wrote {} vectors of dimension {} ({}) to {}",
        store.len(),
        store.dimension(),
        store.model_name(),
        a.out.display()
    );
    Ok(())
}

fn eval(a: &EvalArgs, mut config: RunConfig) -> Result<()> {
    a.corpus.apply(&mut config);
    a.selection.apply(&mut config);
    a.eval.apply(&mut config);
    if let Some(s) = &a.store {
        config.store = Some(s.display().to_string());
    }
    if let Some(m) = &a.model {
        config.model = Some(m.clone());
    }
    config.provider = Provider::File;
    let path = config.store.clone().ok_or_else(|| Error::Validation("--store is required".into()))?;
    let corpus = load_config_corpus(&config)?;
    let mut store = load_store(&path)?;
    if let Some(m) = &config.model {
        store.set_model_name(m.clone());
    }
    let report = evaluate(&corpus, &store, &config)?;
    summarize(&report);
    let text = report.to_json()?;
    match &a.out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report(a: &ReportArgs) -> Result<()> {
    let reports = a.inputs.iter().map(EvalReport::load).collect::<Result<Vec<_>>>()?;
    std::fs::create_dir_all(&a.out).map_err(|e| io_error(&a.out, e))?;
    for f in &a.format {
        for p in emit(&reports, *f, &a.out)? {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn all(a: &AllArgs, mut config: RunConfig) -> Result<()> {
    a.corpus.apply(&mut config);
    a.selection.apply(&mut config);
    a.linguistic.apply(&mut config);
    a.provider.apply(&mut config);
    a.eval.apply(&mut config);
    if let Some(s) = &a.store {
        config.store = Some(s.display().to_string());
        if a.provider.provider.is_none() {
            config.provider = Provider::File;
        }
    }
    if let Some(o) = &a.out {
        config.output_dir = Some(o.display().to_string());
    }
    let out = PathBuf::from(config.output_dir.as_deref().ok_or_else(|| Error::Validation("--out is required".into()))?);
    std::fs::create_dir_all(&out).map_err(|e| io_error(&out, e))?;

    let corpus = load_config_corpus(&config)?;
    let variants = if config.provider == Provider::File {
        Vec::new()
    } else {
        let v = generate_variants(&corpus, &config)?;
        write_variants(out.join(VARIANTS_FILE), &v)?;
        eprintln!("wrote {} variants to {}", v.len(), out.join(VARIANTS_FILE).display());
        v
    };
    let store = embed_variants(&variants, &config)?;
    if config.provider != Provider::File {
        save_store(&store, out.join(STORE_FILE))?;
    }
    let report = evaluate(&corpus, &store, &config)?;
    summarize(&report);
    let mut formats = a.format.clone();
    if !formats.contains(&Format::Json) {
        formats.insert(0, Format::Json);
    }
    for f in formats {
        for p in emit(std::slice::from_ref(&report), f, &out)? {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn summarize(report: &EvalReport) {
    let m = &report.metadata;
    eprintln!("{} / {} ({} documents, dim {})", m.dataset, m.model, m.corpus_documents, m.dimension);
    for r in &report.retrieval {
        eprintln!("  {}: MRR {:.3}  T100 {:.2}", r.task, r.mrr, r.t100);
    }
    for r in &report.nn_ret_by_category {
        let vals: Vec<String> = r.values.iter().map(|v| format!("NN{}_Ret {:.2}", v.k, v.value)).collect();
        eprintln!("  {}: {}", r.category, vals.join("  "));
    }
    for r in &report.aop_by_category {
        eprintln!("  {}: AOP-{} {:.2}", r.category, r.k, r.aop);
    }
    if let Some(c) = &report.capability {
        let opt: Vec<String> = c.matrix.optimal().iter().map(|c| c.to_string()).collect();
        eprintln!("  optimal at AOP-{}: {{{}}}", c.k, opt.join(", "));
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}
