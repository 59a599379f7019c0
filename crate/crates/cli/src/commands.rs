use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use cogtwin_core::formation::{default_counts, form_all, load_corpus, save_corpus, synth_corpus, SchemaQuery};
use cogtwin_core::graph::io::{parse_subgraphs, write_subgraphs};
use cogtwin_core::graph::LabeledGraph;
use cogtwin_core::numerics::NumericsError;
use cogtwin_core::sgcnn::io::{load_model, save_model};
use cogtwin_core::sgcnn::{ModelConfig, ModelError, SgcnnModel};
use cogtwin_core::training::{
    evaluate, format_confusion, format_table, predict, stratified_split, train, TrainConfig, TrainError,
};

use crate::files::{read, to_json, write_atomic, Paths};
use crate::query::{embed_all, rank};
use crate::{Cli, CliError, Command, EvalArgs, FormArgs, PredictArgs, QueryArgs, SynthArgs, TrainArgs};

/// Contents of the `train --config` file. Both sections are optional and
/// default field by field; command-line flags override them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub train: TrainConfig,
}

#[derive(Serialize)]
struct PredictionRecord<'a> {
    id: &'a str,
    label: String,
    probabilities: Vec<f64>,
}

#[derive(Serialize)]
struct Predictions<'a> {
    labels: &'a [String],
    predictions: Vec<PredictionRecord<'a>>,
}

struct Ctx {
    paths: Paths,
    verbose: bool,
}

impl Ctx {
    fn log(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("{}", msg.as_ref());
        }
    }
}

pub(crate) fn execute(cli: &Cli) -> Result<(), CliError> {
    let ctx = Ctx {
        paths: Paths::new(cli.data_dir.clone()),
        verbose: cli.verbose,
    };
    match &cli.command {
        Command::CorpusSynth(a) => corpus_synth(&ctx, a),
        Command::Form(a) => form(&ctx, a),
        Command::Train(a) => train_cmd(&ctx, a),
        Command::Eval(a) => eval(&ctx, a),
        Command::Predict(a) => predict_cmd(&ctx, a),
        Command::Query(a) => query(&ctx, a),
    }
}

fn invalid(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{}: {e}", path.display()))
}

fn from_train(e: TrainError) -> CliError {
    match e {
        TrainError::NonFinite { .. }
        | TrainError::Model(ModelError::Numerics(NumericsError::NonFinite { .. })) => {
            CliError::Numerical(e.to_string())
        }
        other => CliError::Validation(other.to_string()),
    }
}

fn from_model(e: ModelError) -> CliError {
    from_train(TrainError::Model(e))
}

fn read_graphs(ctx: &Ctx, path: &Path) -> Result<Vec<LabeledGraph>, CliError> {
    let graphs = parse_subgraphs(&read(path)?).map_err(|e| invalid(path, e))?;
    if graphs.is_empty() {
        return Err(invalid(path, "contains no graphs"));
    }
    ctx.log(format!("read {} graphs from {}", graphs.len(), path.display()));
    Ok(graphs)
}

fn read_model(path: &Path) -> Result<SgcnnModel, CliError> {
    load_model(read(path)?.as_slice()).map_err(|e| invalid(path, e))
}

fn graphs_bytes(graphs: &[LabeledGraph]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_subgraphs(&mut buf, graphs).expect("writing to a Vec cannot fail");
    buf
}

fn corpus_synth(ctx: &Ctx, a: &SynthArgs) -> Result<(), CliError> {
    let out = ctx.paths.output(&a.out)?;
    let counts = a.counts.as_ref().map_or_else(default_counts, |c| c.0.clone());
    let corpus = synth_corpus(a.seed, &counts, a.vocab_strength).map_err(|e| CliError::Validation(e.to_string()))?;
    let mut buf = Vec::new();
    save_corpus(&corpus, &mut buf).expect("writing to a Vec cannot fail");
    write_atomic(&out, &buf)?;
    ctx.log(format!("wrote {} records to {}", corpus.len(), out.display()));
    Ok(())
}

fn form(ctx: &Ctx, a: &FormArgs) -> Result<(), CliError> {
    let corpus_path = ctx.paths.input(&a.corpus)?;
    let schema_path = a.schema.as_deref().map(|p| ctx.paths.input(p)).transpose()?;
    let out = ctx.paths.output(&a.out)?;

    let schema = match &schema_path {
        Some(p) => {
            let text = String::from_utf8(read(p)?).map_err(|e| invalid(p, e))?;
            SchemaQuery::from_json(&text).map_err(|e| invalid(p, e))?
        }
        None => SchemaQuery::default(),
    };
    let corpus = load_corpus(read(&corpus_path)?.as_slice()).map_err(|e| invalid(&corpus_path, e))?;
    let graphs = form_all(corpus.records(), &schema).map_err(|e| invalid(&corpus_path, e))?;
    write_atomic(&out, &graphs_bytes(&graphs))?;
    ctx.log(format!("wrote {} graphs to {}", graphs.len(), out.display()));
    Ok(())
}

fn train_cmd(ctx: &Ctx, a: &TrainArgs) -> Result<(), CliError> {
    let graphs_path = ctx.paths.input(&a.graphs)?;
    let config_path = a.config.as_deref().map(|p| ctx.paths.input(p)).transpose()?;
    let out = ctx.paths.output(&a.out)?;
    let report_path = a.report.as_deref().map(|p| ctx.paths.output(p)).transpose()?;
    let test_path = a.test_out.as_deref().map(|p| ctx.paths.output(p)).transpose()?;

    let mut config = match &config_path {
        Some(p) => serde_json::from_slice::<RunConfig>(&read(p)?).map_err(|e| invalid(p, e))?,
        None => RunConfig::default(),
    };
    if let Some(seed) = a.seed {
        config.train.seed = seed;
    }
    if let Some(epochs) = a.epochs {
        config.train.epochs = epochs;
    }
    if let Some(bs) = a.batch_size {
        config.train.batch_size = bs;
    }
    if let Some(lr) = a.lr {
        config.train.optimizer = config.train.optimizer.with_lr(lr);
    }
    if let Some(f) = a.split_fraction {
        config.train.split_fraction = f;
    }
    if let Some(n) = a.layers {
        let first = *config
            .model
            .conv
            .first()
            .ok_or_else(|| CliError::Validation("model config has no conv layers".into()))?;
        config.model.conv = vec![first; n];
    }
    config.train.validate().map_err(from_train)?;

    let graphs = read_graphs(ctx, &graphs_path)?;
    let dim = graphs[0].graph.feature_dim();
    if config.model.embed_dim != dim {
        ctx.log(format!("using the graphs' feature dimension {dim} as embed_dim"));
        config.model.embed_dim = dim;
    }
    let mut labels = BTreeSet::new();
    for g in &graphs {
        let label = g
            .label
            .as_ref()
            .ok_or_else(|| invalid(&graphs_path, format!("graph `{}` has no label", g.id)))?;
        labels.insert(label.clone());
    }
    let labels: Vec<String> = labels.into_iter().collect();

    let seed = config.train.seed;
    let (train_set, test_set) =
        stratified_split(&graphs, config.train.split_fraction, seed).map_err(from_train)?;
    ctx.log(format!("{} training / {} held-out samples", train_set.len(), test_set.len()));
    let mut model = SgcnnModel::init(&config.model, &labels, seed).map_err(from_model)?;

    let result = train(&mut model, &train_set, Some(&test_set), &config.train);
    let mut report = match result {
        Ok(r) => r,
        Err(TrainError::NonFinite { epoch, batch, report }) => {
            if let Some(p) = &report_path {
                let mut partial = *report;
                partial.wall_clock_seconds = None;
                write_atomic(p, &to_json(&partial))?;
            }
            return Err(CliError::Numerical(format!(
                "non-finite loss at epoch {epoch}, batch {batch}; no model written"
            )));
        }
        Err(e) => return Err(from_train(e)),
    };
    if let Some(secs) = report.wall_clock_seconds.take() {
        ctx.log(format!("trained in {secs:.1} s"));
    }

    let mut model_bytes = Vec::new();
    save_model(&model, &mut model_bytes).map_err(|e| CliError::Validation(e.to_string()))?;
    write_atomic(&out, &model_bytes)?;
    report.model_path = Some(out.display().to_string());
    if let Some(p) = &report_path {
        write_atomic(p, &to_json(&report))?;
    }
    if let Some(p) = &test_path {
        write_atomic(p, &graphs_bytes(&test_set))?;
    }
    print!("{}", format_table(&report));
    Ok(())
}

fn eval(ctx: &Ctx, a: &EvalArgs) -> Result<(), CliError> {
    let graphs_path = ctx.paths.input(&a.graphs)?;
    let model_path = ctx.paths.input(&a.model)?;
    let out = a.out.as_deref().map(|p| ctx.paths.output(p)).transpose()?;

    let graphs = read_graphs(ctx, &graphs_path)?;
    let model = read_model(&model_path)?;
    let metrics = evaluate(&model, &graphs).map_err(from_train)?;
    println!("samples   {}", metrics.total());
    println!("loss      {:.6}", metrics.loss);
    println!("accuracy  {:.4}", metrics.accuracy);
    print!("{}", format_confusion(&metrics));
    if let Some(p) = &out {
        write_atomic(p, &to_json(&metrics))?;
    }
    Ok(())
}

fn predict_cmd(ctx: &Ctx, a: &PredictArgs) -> Result<(), CliError> {
    let graphs_path = ctx.paths.input(&a.graphs)?;
    let model_path = ctx.paths.input(&a.model)?;
    let out = a.out.as_deref().map(|p| ctx.paths.output(p)).transpose()?;

    let graphs = read_graphs(ctx, &graphs_path)?;
    let model = read_model(&model_path)?;
    let predictions = graphs
        .iter()
        .map(|g| {
            let p = predict(&model, &g.graph).map_err(from_train)?;
            Ok(PredictionRecord {
                id: &g.id,
                label: p.label,
                probabilities: p.probabilities,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let doc = to_json(&Predictions {
        labels: &model.labels,
        predictions,
    });
    emit(out.as_deref(), &doc)
}

fn query(ctx: &Ctx, a: &QueryArgs) -> Result<(), CliError> {
    let graphs_path = ctx.paths.input(&a.graphs)?;
    let model_path = ctx.paths.input(&a.model)?;
    let out = a.out.as_deref().map(|p| ctx.paths.output(p)).transpose()?;

    let graphs = read_graphs(ctx, &graphs_path)?;
    if !graphs.iter().any(|g| g.id == a.like) {
        return Err(invalid(&graphs_path, format!("no product with id `{}`", a.like)));
    }
    let model = read_model(&model_path)?;
    let items = embed_all(&model, &graphs).map_err(from_train)?;
    let result = rank(&items, &a.like, a.top_n).expect("anchor checked above");
    emit(out.as_deref(), &to_json(&result))
}

fn emit(out: Option<&Path>, doc: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => write_atomic(p, doc),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(doc)
                .map_err(|e| CliError::Validation(format!("stdout: {e}")))
        }
    }
}
