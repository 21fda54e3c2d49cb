use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::json;

use hbx_core::explain::write_parallel_coordinates_csv;
use hbx_core::io::{read_csv_with_schema, write_csv, DEFAULT_MISSING_TOKENS};
use hbx_core::{
    cross_validate, decision_boundary_grid, edit_samples, explain, export_parallel_coordinates, grid_search,
    load_model, merge_models, prune, read_csv, save_model, scaler_fit, ClassLabel, Dataset, DatasetSchema, GridParam,
    HyperboxError, LearnerConfig, Model, PruneOptions, ScalerState, TrainedModel,
};

use crate::args::{
    parse_gamma, BoundaryArgs, Command, CvArgs, DataArgs, EditArgs, EvalArgs, ExplainArgs, FitArgs, GridArgs,
    MergeArgs, PredictArgs, PruneArgs,
};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: Command) -> Result<()> {
    let learner = match &command {
        Command::Fit(a) => Some(a.learner.config()?),
        Command::Cv(a) => Some(a.learner.config()?),
        Command::Gridsearch(a) => Some(a.learner.config()?),
        Command::Edit(a) => Some(a.learner.config()?),
        _ => None,
    };
    let echo = json!({ "run": &command, "learner": &learner });
    eprintln!("config: {echo}");
    match command {
        Command::Fit(a) => fit(&a, learner.expect("learner config")),
        Command::Predict(a) => predict(&a),
        Command::Eval(a) => eval(&a),
        Command::Cv(a) => cv(&a, learner.expect("learner config")),
        Command::Gridsearch(a) => gridsearch(&a, learner.expect("learner config")),
        Command::Prune(a) => prune_cmd(&a),
        Command::Edit(a) => edit(&a, learner.expect("learner config")),
        Command::Merge(a) => merge(&a),
        Command::Explain(a) => explain_cmd(&a),
        Command::Boundary(a) => boundary(&a),
    }
}

struct Training {
    raw: Dataset,
    data: Dataset,
    schema: DatasetSchema,
    scaler: Option<ScalerState>,
}

fn load_training(args: &DataArgs, config: &LearnerConfig) -> Result<Training> {
    let (raw, schema) = read_csv(&args.data, &args.label, &DEFAULT_MISSING_TOKENS)?;
    if raw.is_empty() {
        return Err(HyperboxError::EmptyData.into());
    }
    config.validate(raw.n_features())?;
    let (data, scaler) = if args.no_scale {
        raw.check_normalized()?;
        (raw.clone(), None)
    } else {
        let scaler = scaler_fit(&raw.samples)?;
        (scaler.transform_dataset(&raw)?, Some(scaler))
    };
    Ok(Training { raw, data, schema, scaler })
}

/// Reads a CSV laid out like the model's training data and applies its scaler.
fn load_for_model(model: &Model, path: &Path) -> Result<(Dataset, bool)> {
    let schema = model.schema().ok_or_else(|| HyperboxError::InvalidInput("model has no dataset schema".into()))?;
    let (raw, labelled) = read_csv_with_schema(path, schema, &DEFAULT_MISSING_TOKENS)?;
    let data = match model.scaler() {
        Some(s) => s.transform_dataset(&raw)?,
        None => {
            raw.check_normalized()?;
            raw
        }
    };
    Ok((data, labelled))
}

fn class_name(model: &Model, label: ClassLabel) -> String {
    model.schema().and_then(|s| s.class_name(label)).map(str::to_string).unwrap_or_else(|| label.code().to_string())
}

fn single(model: Model, what: &str) -> Result<TrainedModel> {
    match model {
        Model::Single(m) => Ok(m),
        Model::Ensemble(_) => {
            Err(HyperboxError::InvalidInput(format!("{what} needs a single model, not an ensemble")).into())
        }
    }
}

fn fit(args: &FitArgs, config: LearnerConfig) -> Result<()> {
    let t = load_training(&args.data, &config)?;
    let mut model = config.fit(&t.data)?;
    model.attach(t.scaler, Some(t.schema));
    save_model(&model, &args.out)?;
    println!("samples {}", t.raw.len());
    println!("boxes {}", model.box_count());
    Ok(())
}

fn predict(args: &PredictArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let (data, _) = load_for_model(&model, &args.data)?;
    let mut text = String::from("row,predicted,membership\n");
    for (i, x) in data.samples.iter().enumerate() {
        let (label, membership) = model.predict(x)?;
        text.push_str(&format!("{i},{},{membership}\n", csv_field(&class_name(&model, label))));
    }
    match &args.out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn eval(args: &EvalArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let (data, labelled) = load_for_model(&model, &args.data)?;
    if !labelled {
        return Err(HyperboxError::InvalidInput("evaluation data has no label column".into()).into());
    }
    let mut correct = 0usize;
    let mut total = 0usize;
    for (x, truth) in data.iter().filter(|(_, l)| l.is_labeled()) {
        total += 1;
        if model.predict(x)?.0 == truth {
            correct += 1;
        }
    }
    if total == 0 {
        return Err(HyperboxError::InvalidInput("evaluation data has no labelled rows".into()).into());
    }
    println!("accuracy {}", correct as f64 / total as f64);
    println!("correct {correct}/{total}");
    Ok(())
}

fn cv(args: &CvArgs, config: LearnerConfig) -> Result<()> {
    let t = load_training(&args.data, &config)?;
    let report = cross_validate(&t.data, &config, args.k, args.learner.seed)?;
    for (i, (score, boxes)) in report.fold_scores.iter().zip(&report.box_counts).enumerate() {
        println!("fold {} {score} boxes {boxes}", i + 1);
    }
    println!("mean {}", report.mean);
    println!("std {}", report.std);
    Ok(())
}

fn parse_axis(text: &str) -> Result<(GridParam, Vec<f64>)> {
    let usage = || CliError::Usage(format!("grid axis `{text}` must look like name=v1,v2,..."));
    let (name, values) = text.split_once('=').ok_or_else(usage)?;
    let param: GridParam = name.trim().parse().map_err(|_| usage())?;
    let values = values
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| usage())?;
    Ok((param, values))
}

fn format_cell(values: &[(GridParam, f64)]) -> String {
    values.iter().map(|(p, v)| format!("{p}={v}")).collect::<Vec<_>>().join(" ")
}

fn gridsearch(args: &GridArgs, config: LearnerConfig) -> Result<()> {
    let grid = args.grid.iter().map(|a| parse_axis(a)).collect::<Result<Vec<_>>>()?;
    let t = load_training(&args.data, &config)?;
    let result = grid_search(&t.data, &config, &grid, args.k, args.learner.seed)?;
    for cell in &result.cells {
        println!("cell {} mean {} std {}", format_cell(&cell.values), cell.report.mean, cell.report.std);
    }
    let best =
        result.cells.iter().find(|c| c.config == result.best).map(|c| format_cell(&c.values)).unwrap_or_default();
    println!("best {best} mean {} std {}", result.report.mean, result.report.std);
    println!("best_config {}", serde_json::to_string(&result.best).map_err(HyperboxError::from)?);
    Ok(())
}

fn prune_cmd(args: &PruneArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let (validation, labelled) = load_for_model(&model, &args.data)?;
    if !labelled {
        return Err(HyperboxError::InvalidInput("validation data has no label column".into()).into());
    }
    let model = single(model, "pruning")?;
    let opts = PruneOptions { min_accuracy: args.min_acc, keep_unused: args.keep_unused };
    let mut pruned = prune(&model, &validation, opts)?;
    pruned.scaler = model.scaler.clone();
    pruned.schema = model.schema.clone();
    save_model(&Model::Single(pruned.clone()), &args.out)?;
    println!("boxes {} -> {}", model.boxes.len(), pruned.boxes.len());
    Ok(())
}

fn edit(args: &EditArgs, config: LearnerConfig) -> Result<()> {
    let t = load_training(&args.data, &config)?;
    let result = edit_samples(&t.data, &config, args.k, args.repeats, args.threshold, args.learner.seed)?;
    write_csv(&args.out, &t.raw.subset(&result.kept), &t.schema)?;
    println!("kept {}", result.kept.len());
    println!("removed {}", result.removed.len());
    Ok(())
}

fn merge(args: &MergeArgs) -> Result<()> {
    let gamma = parse_gamma(&args.gamma)?;
    let cfg = args.agglo.config(args.theta, gamma);
    let mut members = Vec::new();
    let mut context: Option<(Option<ScalerState>, Option<DatasetSchema>)> = None;
    for path in &args.models {
        let model = load_model(path)?;
        let ctx = (model.scaler().cloned(), model.schema().cloned());
        match &context {
            None => context = Some(ctx),
            Some(first) if *first != ctx => {
                return Err(HyperboxError::InvalidInput(format!(
                    "{} was trained with a different scaler or schema",
                    path.display()
                ))
                .into())
            }
            Some(_) => {}
        }
        match model {
            Model::Single(m) => members.push(m),
            Model::Ensemble(e) => {
                if e.feature_subsets.iter().any(|s| s.len() != e.n_features) {
                    return Err(HyperboxError::InvalidInput(
                        "members trained on feature subsets cannot be merged".into(),
                    )
                    .into());
                }
                members.extend(e.members);
            }
        }
    }
    let n = members.first().map_or(0, |m| m.n_features);
    cfg.validate(n)?;
    let boxes_in: usize = members.iter().map(|m| m.boxes.len()).sum();
    let mut merged = Model::Single(merge_models(&members, &cfg)?);
    let (scaler, schema) = context.unwrap_or((None, None));
    merged.attach(scaler, schema);
    save_model(&merged, &args.out)?;
    println!("boxes {boxes_in} -> {}", merged.box_count());
    Ok(())
}

fn explain_cmd(args: &ExplainArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let (data, _) = load_for_model(&model, &args.data)?;
    let x = data.samples.get(args.row).ok_or_else(|| {
        HyperboxError::InvalidInput(format!("row {} is out of range ({} rows)", args.row, data.len()))
    })?;
    let model = single(model, "explanation")?;
    let expl = explain(&model, x)?;
    if let Some(path) = &args.parallel {
        let rows = export_parallel_coordinates(&expl)?;
        write_parallel_coordinates_csv(&rows, fs::File::create(path)?)?;
    }
    println!("{}", serde_json::to_string_pretty(&expl).map_err(HyperboxError::from)?);
    Ok(())
}

fn boundary(args: &BoundaryArgs) -> Result<()> {
    let model = single(load_model(&args.model)?, "a decision boundary")?;
    let grid = decision_boundary_grid(&model, args.resolution)?;
    let wrapped = Model::Single(model);
    let mut text = String::from("row,col,x,y,class\n");
    let centre = |i: usize| (i as f64 + 0.5) / grid.resolution as f64;
    for row in 0..grid.resolution {
        for col in 0..grid.resolution {
            let label = ClassLabel::new(grid.at(row, col));
            let name = csv_field(&class_name(&wrapped, label));
            text.push_str(&format!("{row},{col},{},{},{name}\n", centre(col), centre(row)));
        }
    }
    fs::write(&args.out, text)?;
    if let Some(path) = &args.boxes {
        let mut json = serde_json::to_string_pretty(&grid.boxes).map_err(HyperboxError::from)?;
        json.push('\n');
        fs::write(path, json)?;
    }
    println!("cells {}", grid.labels.len());
    Ok(())
}
