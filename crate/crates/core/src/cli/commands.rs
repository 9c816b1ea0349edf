use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};

use super::config::RunConfig;
use super::{Command, ModelCommand, SweepArgs, TransientArgs, EXIT_NOT_CONVERGED, EXIT_SUCCESS};
use crate::arnoldi::aggregation::hessenberg_step;
use crate::arnoldi::measures::{
    bound_profile_from_rows, closed_form_error, naive_criteria_from_rows,
};
use crate::arnoldi::{persist, ArnoldiAggregation, ArnoldiOptions, ArnoldiState, Expansion};
use crate::convergence::adaptive::check_prefix;
use crate::convergence::{run_adaptive, write_trace_csv, CriterionConfig};
use crate::markov::mtx;
use crate::markov::sparse::SparseStochasticMatrix;
use crate::markov::vector::l1_distance;
use crate::models::catalog::CATALOG;
use crate::Error;

pub const SWEEP_CSV_HEADER: &str = "# arnagg-sweep v1";
pub const BENCH_CSV_HEADER: &str = "# arnagg-bench v1";
pub const TRANSIENT_CSV_HEADER: &str = "# arnagg-transient v1";

pub(crate) fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Aggregate(args) => aggregate(&RunConfig::resolve(&args)?, out),
        Command::Sweep(args) => sweep(&args, out, err),
        Command::Transient(args) => transient(&args, out),
        Command::Bench(args) => bench(&RunConfig::resolve(&args)?, out),
        Command::Model(ModelCommand::Export(args)) => {
            let cfg = RunConfig::resolve(&args)?;
            let model = cfg.load_model()?;
            model.export(&cfg.out)?;
            writeln!(
                out,
                "wrote {} ({} states)",
                cfg.out.display(),
                model.state_count()
            )?;
            Ok(EXIT_SUCCESS)
        }
        Command::Model(ModelCommand::Describe(args)) => {
            let model = RunConfig::resolve(&args)?.load_model()?;
            writeln!(out, "{}", serde_json::to_string_pretty(&model.descriptor)?)?;
            Ok(EXIT_SUCCESS)
        }
        Command::Model(ModelCommand::List) => {
            for name in CATALOG {
                writeln!(out, "{name}")?;
            }
            writeln!(
                out,
                "identity:N\nlumpable:S1,S2,..[@SEED]\nrandom:N[,PER_ROW][@SEED]"
            )?;
            Ok(EXIT_SUCCESS)
        }
    }
}

struct Problem {
    p: SparseStochasticMatrix,
    p0: Vec<f64>,
}

fn load_problem(cfg: &RunConfig) -> Result<Problem> {
    let model = cfg.load_model()?;
    let (p, _) = model.stochastic(cfg.rate)?;
    let p0 = cfg.initial_distribution(&model)?.as_slice().to_vec();
    Ok(Problem { p, p0 })
}

fn criterion_config(cfg: &RunConfig, epsilon: f64) -> CriterionConfig {
    CriterionConfig {
        check_every: cfg.check_every,
        max_dimension: cfg.max_dim,
        seed: cfg.seed,
        eigensolver: cfg.eigensolver,
        arnoldi: arnoldi_options(cfg),
        ..CriterionConfig::new(epsilon)
    }
}

fn arnoldi_options(cfg: &RunConfig) -> ArnoldiOptions {
    ArnoldiOptions {
        reorthogonalize: cfg.reorthogonalize,
        ..ArnoldiOptions::default()
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), |x| format!("{x:e}"))
}

fn aggregate(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let epsilon = cfg.require_epsilon()?;
    let problem = load_problem(cfg)?;
    let run = run_adaptive(&problem.p0, &problem.p, &criterion_config(cfg, epsilon))?;

    std::fs::create_dir_all(&cfg.out)?;
    persist::save(&run.aggregation, cfg.out.join("aggregation"))?;
    write_trace_csv(
        &run.trace,
        run.stop_reason,
        create(&cfg.out.join("trace.csv"))?,
    )?;
    if let Some(ev) = &run.eigenvector {
        mtx::write_vector_file(ev.vector(), cfg.out.join("pi.txt"))?;
    }
    writeln!(out, "stop_reason={}", run.stop_reason)?;
    writeln!(out, "j={}", run.aggregation.dimension())?;
    writeln!(out, "criterion={}", fmt_opt(run.criterion))?;
    let share =
        run.criterion_time.as_secs_f64() / run.total_time.as_secs_f64().max(f64::MIN_POSITIVE);
    writeln!(out, "criterion_time_share={share:.4}")?;
    Ok(if run.converged() {
        EXIT_SUCCESS
    } else {
        EXIT_NOT_CONVERGED
    })
}

/// `p_k` for every horizon, in the order of `horizons`, from one pass to the largest.
pub(crate) fn naive_at(
    p0: &[f64],
    p: &SparseStochasticMatrix,
    horizons: &[usize],
) -> crate::Result<Vec<Vec<f64>>> {
    let mut order: Vec<usize> = (0..horizons.len()).collect();
    order.sort_by_key(|&i| horizons[i]);
    let mut out = vec![Vec::new(); horizons.len()];
    let mut v = p0.to_vec();
    let mut scratch = vec![0.0; p.n()];
    let mut step = 0;
    for i in order {
        while step < horizons[i] {
            p.left_mul_into(&v, &mut scratch)?;
            std::mem::swap(&mut v, &mut scratch);
            step += 1;
        }
        out[i] = v.clone();
    }
    Ok(out)
}

/// `p̃_k` for every horizon, in the order of `horizons`.
pub(crate) fn aggregated_at(agg: &ArnoldiAggregation, horizons: &[usize]) -> Vec<Vec<f64>> {
    let mut order: Vec<usize> = (0..horizons.len()).collect();
    order.sort_by_key(|&i| horizons[i]);
    let mut out = vec![Vec::new(); horizons.len()];
    let mut pi = agg.initial().to_vec();
    let mut step = 0;
    for i in order {
        while step < horizons[i] {
            pi = hessenberg_step(agg.hessenberg(), &pi);
            step += 1;
        }
        out[i] = agg.lift(&pi).into_vec();
    }
    out
}

fn sweep(args: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = RunConfig::resolve(&args.run)?;
    if cfg.dims.is_empty() {
        bail!(Error::InvalidArgument("sweep needs --dims".into()));
    }
    if cfg.dims.windows(2).any(|w| w[0] >= w[1]) || cfg.dims[0] == 0 {
        bail!(Error::InvalidArgument(
            "--dims must be positive and strictly ascending".into()
        ));
    }
    let problem = load_problem(&cfg)?;
    let n = problem.p.n();
    let criterion_cfg = criterion_config(&cfg, 0.0);
    let exact = naive_at(&problem.p0, &problem.p, &cfg.horizons)?;

    std::fs::create_dir_all(&cfg.out)?;
    let mut csv = create(&cfg.out.join("sweep.csv"))?;
    writeln!(csv, "{SWEEP_CSV_HEADER}")?;
    let mut header = vec!["j".to_string()];
    header.extend(cfg.horizons.iter().map(|k| format!("err_{k}")));
    if args.closed_form {
        header.extend(cfg.horizons.iter().map(|k| format!("closed_form_{k}")));
        header.extend(cfg.horizons.iter().map(|k| format!("bound_{k}")));
    }
    header.extend(
        [
            "criterion",
            "residual_l1",
            "h_next",
            "dyn_residual_inf",
            "build_ns",
            "eval_ns",
        ]
        .map(String::from),
    );
    writeln!(csv, "{}", header.join(","))?;

    let start = Instant::now();
    let mut state = ArnoldiState::new(&problem.p0, &problem.p, arnoldi_options(&cfg))?;
    let mut rows = 0;
    for &j in &cfg.dims {
        if j > n {
            writeln!(err, "warning: skipping j = {j} > n = {n}")?;
            continue;
        }
        while state.dimension() < j {
            if state.expand(&problem.p)? == Expansion::Invariant {
                break;
            }
        }
        if state.dimension() < j {
            writeln!(
                err,
                "warning: skipping j = {j}: the Krylov space is invariant at dimension {}",
                state.dimension()
            )?;
            continue;
        }
        let build_ns = start.elapsed().as_nanos();
        let agg = state.snapshot(j)?;
        let b = state.residual_row_sums(j)?;
        let check = check_prefix(&state, j, &criterion_cfg, start)?;

        let t = Instant::now();
        let approx = aggregated_at(&agg, &cfg.horizons);
        let eval_ns = t.elapsed().as_nanos();

        let mut fields = vec![j.to_string()];
        fields.extend(
            approx
                .iter()
                .zip(&exact)
                .map(|(a, e)| format!("{:e}", l1_distance(a, e))),
        );
        if args.closed_form {
            for &k in &cfg.horizons {
                fields.push(format!("{:e}", closed_form_error(&agg, &problem.p, k)?));
            }
            let kmax = cfg.horizons.iter().copied().max().unwrap_or(0);
            let profile = bound_profile_from_rows(&agg, &b, kmax);
            fields.extend(cfg.horizons.iter().map(|&k| format!("{:e}", profile[k])));
        }
        let naive = naive_criteria_from_rows(&agg, &b);
        fields.push(fmt_opt(check.row.criterion));
        fields.push(format!("{:e}", naive.residual_l1));
        fields.push(format!("{:e}", agg.boundary_coefficient()));
        fields.push(format!("{:e}", naive.dynamic_residual_inf));
        fields.push(build_ns.to_string());
        fields.push(eval_ns.to_string());
        writeln!(csv, "{}", fields.join(","))?;
        rows += 1;
    }
    csv.flush()?;
    writeln!(
        out,
        "wrote {} rows to {}",
        rows,
        cfg.out.join("sweep.csv").display()
    )?;
    Ok(EXIT_SUCCESS)
}

fn transient(args: &TransientArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = RunConfig::resolve(&args.run)?;
    if args.aggregation.is_none() && !args.naive {
        bail!(Error::InvalidArgument(
            "transient needs --aggregation DIR and/or --naive".into()
        ));
    }
    let approx = match &args.aggregation {
        Some(dir) => {
            let agg = persist::load(dir)
                .with_context(|| format!("cannot load aggregation from {}", dir.display()))?;
            Some(aggregated_at(&agg, &cfg.horizons))
        }
        None => None,
    };
    let exact = if args.naive {
        let problem = load_problem(&cfg)?;
        if let Some(a) = &approx {
            if a[0].len() != problem.p.n() {
                bail!(Error::DimensionMismatch {
                    expected: problem.p.n(),
                    found: a[0].len()
                });
            }
        }
        Some(naive_at(&problem.p0, &problem.p, &cfg.horizons)?)
    } else {
        None
    };

    std::fs::create_dir_all(&cfg.out)?;
    let mut csv = create(&cfg.out.join("transient.csv"))?;
    writeln!(csv, "{TRANSIENT_CSV_HEADER}")?;
    writeln!(csv, "k,l1_difference")?;
    for (i, &k) in cfg.horizons.iter().enumerate() {
        if let Some(e) = &exact {
            mtx::write_vector_file(&e[i], cfg.out.join(format!("p_{k}.txt")))?;
        }
        if let Some(a) = &approx {
            mtx::write_vector_file(&a[i], cfg.out.join(format!("ptilde_{k}.txt")))?;
        }
        let diff = match (&exact, &approx) {
            (Some(e), Some(a)) => Some(l1_distance(&e[i], &a[i])),
            _ => None,
        };
        writeln!(csv, "{k},{}", fmt_opt(diff))?;
        if let Some(d) = diff {
            writeln!(out, "k={k} l1_difference={d:e}")?;
        }
    }
    csv.flush()?;
    Ok(EXIT_SUCCESS)
}

fn median(mut samples: Vec<Duration>) -> u128 {
    samples.sort();
    let m = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[m].as_nanos()
    } else {
        (samples[m - 1].as_nanos() + samples[m].as_nanos()) / 2
    }
}

fn timed<T>(reps: usize, mut f: impl FnMut() -> crate::Result<T>) -> crate::Result<(u128, T)> {
    let mut samples = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps {
        let t = Instant::now();
        let value = f()?;
        samples.push(t.elapsed());
        last = Some(value);
    }
    Ok((median(samples), last.expect("reps is at least one")))
}

struct BenchRow {
    kind: &'static str,
    j: Option<usize>,
    k: Option<usize>,
    median_ns: u128,
    ratio: Option<f64>,
}

/// Timing rows:
///
/// * `expand`: the plain iteration from scratch to each of `--dims`;
/// * `evaluate`: `p̃_k` from that aggregation for each horizon;
/// * `adaptive`: the criterion-driven run (needs `--epsilon`), `ratio` = criterion share;
/// * `adaptive-evaluate`: `p̃_k` from the adaptive aggregation;
/// * `naive`: `p_k` by repeated products;
/// * `speedup`: naive time over adaptive plus evaluation time.
fn bench(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let problem = load_problem(cfg)?;
    let (p, p0) = (&problem.p, problem.p0.as_slice());
    let reps = cfg.reps;
    let mut rows = Vec::new();

    for &j in &cfg.dims {
        if j == 0 || j > p.n() {
            continue;
        }
        let (ns, agg) = timed(reps, || {
            let mut state = ArnoldiState::new(p0, p, arnoldi_options(cfg))?;
            state.expand_to(p, j)?;
            state.to_aggregation()
        })?;
        rows.push(BenchRow {
            kind: "expand",
            j: Some(agg.dimension()),
            k: None,
            median_ns: ns,
            ratio: None,
        });
        for &k in &cfg.horizons {
            let (ns, _) = timed(reps, || Ok(agg.approx_transient(k)))?;
            rows.push(BenchRow {
                kind: "evaluate",
                j: Some(agg.dimension()),
                k: Some(k),
                median_ns: ns,
                ratio: None,
            });
        }
    }

    let mut naive_ns = Vec::new();
    for &k in &cfg.horizons {
        let (ns, _) = timed(reps, || naive_at(p0, p, &[k]))?;
        naive_ns.push(ns);
        rows.push(BenchRow {
            kind: "naive",
            j: None,
            k: Some(k),
            median_ns: ns,
            ratio: None,
        });
    }

    if let Some(epsilon) = cfg.epsilon {
        let ccfg = criterion_config(cfg, epsilon);
        let mut shares = Vec::with_capacity(reps);
        let (ns, run) = timed(reps, || {
            let run = run_adaptive(p0, p, &ccfg)?;
            shares.push(
                run.criterion_time.as_secs_f64()
                    / run.total_time.as_secs_f64().max(f64::MIN_POSITIVE),
            );
            Ok(run)
        })?;
        shares.sort_by(f64::total_cmp);
        let j = run.aggregation.dimension();
        rows.push(BenchRow {
            kind: "adaptive",
            j: Some(j),
            k: None,
            median_ns: ns,
            ratio: Some(shares[shares.len() / 2]),
        });
        for (i, &k) in cfg.horizons.iter().enumerate() {
            let (eval, _) = timed(reps, || Ok(run.aggregation.approx_transient(k)))?;
            rows.push(BenchRow {
                kind: "adaptive-evaluate",
                j: Some(j),
                k: Some(k),
                median_ns: eval,
                ratio: None,
            });
            let speedup = naive_ns[i] as f64 / (ns + eval).max(1) as f64;
            rows.push(BenchRow {
                kind: "speedup",
                j: Some(j),
                k: Some(k),
                median_ns: ns + eval,
                ratio: Some(speedup),
            });
        }
    }

    std::fs::create_dir_all(&cfg.out)?;
    let mut csv = create(&cfg.out.join("bench.csv"))?;
    writeln!(csv, "{BENCH_CSV_HEADER}")?;
    writeln!(csv, "kind,j,k,reps,median_ns,ratio,low_confidence")?;
    let low = reps < 3;
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.kind,
            r.j.map_or(String::new(), |v| v.to_string()),
            r.k.map_or(String::new(), |v| v.to_string()),
            reps,
            r.median_ns,
            r.ratio.map_or(String::new(), |v| format!("{v:.6}")),
            low
        )?;
        if r.kind == "speedup" || r.kind == "adaptive" {
            writeln!(
                out,
                "{} j={} ratio={}",
                r.kind,
                r.j.unwrap_or(0),
                r.ratio.unwrap_or(f64::NAN)
            )?;
        }
    }
    csv.flush()?;
    writeln!(
        out,
        "wrote {} rows to {}",
        rows.len(),
        cfg.out.join("bench.csv").display()
    )?;
    Ok(EXIT_SUCCESS)
}
