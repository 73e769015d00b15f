use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::Context;
use fbgain::verify::{all_passed, run_suite_with};
use fbgain::{
    db_grid, eval_point, find_peak, sweep_curve, to_db, ChannelConfig, CurvePoint, Fault,
    GainError, SampleSpec, SolverSettings, Users,
};
use serde_json::json;

use crate::render::{csv, key_values, num, quantize, users_csv, users_json};
use crate::svg::{line_chart, Series};
use crate::{
    CliError, CurveArgs, FigureArgs, Format, OutputArgs, PeakArgs, Sabotage, SolveArgs, VerifyArgs,
    Which,
};

type CliResult = Result<ExitCode, CliError>;

const LAMBDA_CAPTION: &str = "Power gain factor λ* vs. π";
const F_CAPTION: &str = "Capacity gain factor F(π) vs. π";

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .context("writing to standard output")?;
            stdout.flush().context("writing to standard output")?;
        }
    }
    Ok(())
}

fn format_for(
    output: &OutputArgs,
    default: Format,
    allowed: &[Format],
) -> Result<Format, CliError> {
    let format = output.format.unwrap_or_else(|| {
        match output
            .out
            .as_ref()
            .and_then(|p| p.extension())
            .and_then(|e| e.to_str())
        {
            Some("svg") if allowed.contains(&Format::Svg) => Format::Svg,
            Some("json") if allowed.contains(&Format::Json) => Format::Json,
            Some("csv") if allowed.contains(&Format::Csv) => Format::Csv,
            _ => default,
        }
    });
    if !allowed.contains(&format) {
        return Err(usage(format!(
            "format {format:?} is not available for this command"
        )));
    }
    Ok(format)
}

fn check_range(from_db: f64, to_db: f64, step_db: f64) -> Result<(), CliError> {
    db_grid(from_db, to_db, step_db)
        .map(|_| ())
        .map_err(|e| usage(e.to_string()))
}

fn failure(e: GainError) -> CliError {
    CliError::Failure(e.into())
}

fn json_text(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn run_solve(args: &SolveArgs) -> CliResult {
    let users = args.who.users();
    let format = format_for(
        &args.output,
        Format::Text,
        &[Format::Text, Format::Csv, Format::Json],
    )?;
    let prec = args.output.precision as usize;

    let config = match (users, args.power.power_db, args.power.total_power_db) {
        (Users::Massive, Some(_), _) => {
            return Err(usage(
                "--massive needs --total-power-db; per-user power vanishes in the limit",
            ))
        }
        (_, Some(db), _) | (_, None, Some(db)) if !db.is_finite() => {
            return Err(usage(format!("power must be a finite dB value, got {db}")))
        }
        (Users::Finite(k), Some(db), _) => ChannelConfig::finite_per_user(k, fbgain::from_db(db)),
        (Users::Finite(k), None, Some(db)) => ChannelConfig::finite_total(k, fbgain::from_db(db)),
        (Users::Massive, None, Some(db)) => ChannelConfig::massive(fbgain::from_db(db)),
        (_, None, None) => unreachable!("clap requires one power flag"),
    }
    .map_err(|e| usage(e.to_string()))?;

    let sol = eval_point(&config, &SolverSettings::default()).map_err(failure)?;
    let pi = sol.total_power();
    let pi_db = to_db(pi).map_err(failure)?;
    let lambda_db = to_db(sol.lambda_star).map_err(failure)?;
    let per_user = config.per_user_power();

    let text = match format {
        Format::Text => {
            let mut pairs = vec![
                ("K", users_csv(users)),
                ("pi", num(pi, prec)),
                ("pi_db", num(pi_db, prec)),
            ];
            if let Some(p) = per_user {
                pairs.push(("P", num(p, prec)));
            }
            pairs.extend([
                ("lambda", num(sol.lambda_star, prec)),
                ("lambda_db", num(lambda_db, prec)),
                ("C_nats", num(sol.capacity_nofb, prec)),
                ("C_FB_nats", num(sol.capacity_fb, prec)),
            ]);
            if args.bits {
                pairs.push((
                    "C_bits",
                    num(sol.capacity_nofb * std::f64::consts::LOG2_E, prec),
                ));
                pairs.push((
                    "C_FB_bits",
                    num(sol.capacity_fb * std::f64::consts::LOG2_E, prec),
                ));
            }
            pairs.push(("F", num(sol.gain_f, prec)));
            key_values(&pairs)
        }
        Format::Csv => csv(
            &[
                "K",
                "pi_db",
                "pi",
                "P",
                "lambda",
                "lambda_db",
                "C_nats",
                "C_FB_nats",
                "F",
            ],
            [vec![
                users_csv(users),
                num(pi_db, prec),
                num(pi, prec),
                per_user.map(|p| num(p, prec)).unwrap_or_default(),
                num(sol.lambda_star, prec),
                num(lambda_db, prec),
                num(sol.capacity_nofb, prec),
                num(sol.capacity_fb, prec),
                num(sol.gain_f, prec),
            ]],
        ),
        Format::Json => json_text(&json!({
            "K": users_json(users),
            "pi_db": quantize(pi_db, prec),
            "pi": quantize(pi, prec),
            "P": per_user.map(|p| quantize(p, prec)),
            "lambda": quantize(sol.lambda_star, prec),
            "lambda_db": quantize(lambda_db, prec),
            "C_nats": quantize(sol.capacity_nofb, prec),
            "C_FB_nats": quantize(sol.capacity_fb, prec),
            "F": quantize(sol.gain_f, prec),
            "residual": sol.residual,
            "iterations": sol.iterations,
        })),
        Format::Svg => unreachable!("rejected by format_for"),
    };
    emit(args.output.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn curve_svg(which: Which, series: &[(Users, Vec<CurvePoint>)]) -> String {
    let series: Vec<Series> = series
        .iter()
        .map(|(users, pts)| Series {
            label: format!("K={users}").replace("inf", "∞"),
            points: pts
                .iter()
                .map(|p| {
                    (
                        p.pi_db,
                        if which == Which::Pfactor {
                            p.lambda_db
                        } else {
                            p.gain_f
                        },
                    )
                })
                .collect(),
        })
        .collect();
    match which {
        Which::Pfactor => line_chart(LAMBDA_CAPTION, "π [dB]", "λ* [dB]", &series),
        Which::Cfactor => line_chart(F_CAPTION, "π [dB]", "F(π)", &series),
    }
}

pub fn run_curve(args: &CurveArgs) -> CliResult {
    let users = args.who.users();
    let format = format_for(
        &args.output,
        Format::Csv,
        &[Format::Csv, Format::Json, Format::Svg],
    )?;
    let prec = args.output.precision as usize;
    check_range(args.range.from_db, args.range.to_db, args.step_db)?;

    let points = sweep_curve(
        users,
        args.range.from_db,
        args.range.to_db,
        args.step_db,
        &SolverSettings::default(),
    )
    .map_err(failure)?;
    let text = match format {
        Format::Csv => csv(
            &["pi_db", "pi", "K", "lambda", "lambda_db", "F"],
            points.iter().map(|p| {
                vec![
                    num(p.pi_db, prec),
                    num(p.pi, prec),
                    users_csv(p.users),
                    num(p.lambda, prec),
                    num(p.lambda_db, prec),
                    num(p.gain_f, prec),
                ]
            }),
        ),
        Format::Json => json_text(&serde_json::Value::Array(
            points
                .iter()
                .map(|p| {
                    json!({
                        "pi_db": quantize(p.pi_db, prec),
                        "pi": quantize(p.pi, prec),
                        "K": users_json(p.users),
                        "lambda": quantize(p.lambda, prec),
                        "lambda_db": quantize(p.lambda_db, prec),
                        "F": quantize(p.gain_f, prec),
                    })
                })
                .collect(),
        )),
        Format::Svg => curve_svg(args.which, &[(users, points)]),
        Format::Text => unreachable!("rejected by format_for"),
    };
    emit(args.output.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

pub fn run_peak(args: &PeakArgs) -> CliResult {
    let users = args.who.users();
    let format = format_for(
        &args.output,
        Format::Text,
        &[Format::Text, Format::Csv, Format::Json],
    )?;
    let prec = args.output.precision as usize;
    let (from_db, to_db) = (args.range.from_db, args.range.to_db);
    if from_db >= to_db || !from_db.is_finite() || !to_db.is_finite() {
        return Err(usage(format!("invalid range [{from_db}, {to_db}] dB")));
    }

    let peak = find_peak(users, from_db, to_db, &SolverSettings::default()).map_err(failure)?;
    let text = match format {
        Format::Text => {
            let bracket = peak
                .bracket
                .iter()
                .map(|b| format!("({}, {})", num(b.pi_db, 1), num(b.gain_f, prec)))
                .collect::<Vec<_>>()
                .join(" ");
            key_values(&[
                ("K", users_csv(users)),
                ("pi_star", num(peak.pi_star, prec)),
                ("pi_star_db", num(peak.pi_star_db, prec)),
                ("F_star", num(peak.f_star, prec)),
                ("lambda_at_peak", num(peak.lambda_at_peak, prec)),
                ("bracket", bracket),
            ])
        }
        Format::Csv => csv(
            &["K", "pi_star_db", "pi_star", "F_star", "lambda_at_peak"],
            [vec![
                users_csv(users),
                num(peak.pi_star_db, prec),
                num(peak.pi_star, prec),
                num(peak.f_star, prec),
                num(peak.lambda_at_peak, prec),
            ]],
        ),
        Format::Json => json_text(&json!({
            "K": users_json(users),
            "pi_star_db": quantize(peak.pi_star_db, prec),
            "pi_star": quantize(peak.pi_star, prec),
            "F_star": quantize(peak.f_star, prec),
            "lambda_at_peak": quantize(peak.lambda_at_peak, prec),
            "bracket": peak.bracket.iter().map(|b| json!({
                "pi_db": quantize(b.pi_db, prec),
                "F": quantize(b.gain_f, prec),
            })).collect::<Vec<_>>(),
        })),
        Format::Svg => unreachable!("rejected by format_for"),
    };
    emit(args.output.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

pub fn run_verify(args: &VerifyArgs) -> CliResult {
    let sample = SampleSpec::new(args.seed, args.samples as usize);
    let fault = match args.sabotage {
        Some(Sabotage::NegateResidual) => Fault::NegateResidual,
        None => Fault::None,
    };
    let reports = run_suite_with(&sample, &SolverSettings::default(), fault);
    let mut text: String = reports.iter().map(|r| format!("{r}\n")).collect();
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if failed == 0 {
        text.push_str(&format!("all {} checks passed\n", reports.len()));
    } else {
        text.push_str(&format!("{failed} of {} checks FAILED\n", reports.len()));
    }
    emit(args.out.as_deref(), &text)?;
    Ok(if all_passed(&reports) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn run_figure(args: &FigureArgs) -> CliResult {
    let format = format_for(
        &args.output,
        Format::Csv,
        &[Format::Csv, Format::Json, Format::Svg],
    )?;
    let prec = args.output.precision as usize;
    if args.users.is_empty() {
        return Err(usage("--users must name at least one user count"));
    }
    check_range(args.range.from_db, args.range.to_db, args.step_db)?;

    let settings = SolverSettings::default();
    let mut series = Vec::with_capacity(args.users.len());
    for &users in &args.users {
        let pts = sweep_curve(
            users,
            args.range.from_db,
            args.range.to_db,
            args.step_db,
            &settings,
        )
        .map_err(failure)?;
        series.push((users, pts));
    }

    let text = match format {
        Format::Csv => {
            let mut out = String::new();
            for (users, pts) in &series {
                out.push_str(&format!("# K={}\n", users_csv(*users)));
                let block = match args.which {
                    Which::Pfactor => csv(
                        &["pi_db", "lambda", "lambda_db"],
                        pts.iter().map(|p| {
                            vec![
                                num(p.pi_db, prec),
                                num(p.lambda, prec),
                                num(p.lambda_db, prec),
                            ]
                        }),
                    ),
                    Which::Cfactor => csv(
                        &["pi_db", "F"],
                        pts.iter()
                            .map(|p| vec![num(p.pi_db, prec), num(p.gain_f, prec)]),
                    ),
                };
                out.push_str(&block);
            }
            out
        }
        Format::Json => json_text(&json!({
            "which": match args.which { Which::Pfactor => "pfactor", Which::Cfactor => "cfactor" },
            "series": series.iter().map(|(users, pts)| json!({
                "K": users_json(*users),
                "points": pts.iter().map(|p| match args.which {
                    Which::Pfactor => json!({
                        "pi_db": quantize(p.pi_db, prec),
                        "lambda": quantize(p.lambda, prec),
                        "lambda_db": quantize(p.lambda_db, prec),
                    }),
                    Which::Cfactor => json!({
                        "pi_db": quantize(p.pi_db, prec),
                        "F": quantize(p.gain_f, prec),
                    }),
                }).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })),
        Format::Svg => curve_svg(args.which, &series),
        Format::Text => unreachable!("rejected by format_for"),
    };
    emit(args.output.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}
