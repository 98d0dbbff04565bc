use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qam_core::analysis::{
    self, pass_probs, rounds_needed, subset_sum_oracle, worst_case_soundness, SoundnessReport,
    DEFAULT_ENUMERATION_LIMIT,
};
use qam_core::exact::{check_completeness, OperationElement};
use qam_core::machine::{
    run_pass_exact, run_protocol_exact, ExpectedPasses, FixedResponses, PassResult, ProverStrategy, Sampler,
};
use qam_core::protocol::{
    closed_form_state, encode_instance, operators, spec, step_cap, trace_with_prover,
};
use qam_core::reduction::{brute_sat, map_witness, reduce_3sat, Cnf, DEFAULT_SAT_LIMIT};
use qam_core::report::{approx, Format, Report};
use qam_core::{ExactScalar, Instance, PassAnalysis, TapeString, WitnessSubset};

use crate::prover::ExternalProver;
use crate::{CliError, Outcome};

pub struct Context {
    pub format: Format,
    pub prover_timeout: Duration,
}

pub enum InputSource {
    Instance(String),
    InstanceFile(PathBuf),
    Tape(String),
}

pub enum WitnessSource {
    Inline(String),
    Oracle,
    Prover(String),
}

enum Tape {
    Valid(TapeString),
    /// Fails the form check; the verifier rejects it before any quantum step.
    Invalid(String),
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load(input: &InputSource) -> Result<Tape, CliError> {
    let inst: Instance = match input {
        InputSource::Instance(s) => s.parse()?,
        InputSource::InstanceFile(p) => {
            let text = read(p)?;
            let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
            line.parse()?
        }
        InputSource::Tape(raw) => {
            return match TapeString::parse(raw) {
                Ok(t) => Ok(Tape::Valid(t)),
                Err(qam_core::Error::InvalidForm(_)) => Ok(Tape::Invalid(raw.clone())),
                Err(e) => Err(e.into()),
            }
        }
    };
    Ok(Tape::Valid(encode_instance(&inst)))
}

fn render(ctx: &Context, report: &Report, ok: bool) -> Outcome {
    Outcome { text: report.render(ctx.format), ok }
}

fn invalid_form(ctx: &Context, raw: &str) -> Result<Outcome, CliError> {
    let p = run_pass_exact(spec(), raw, &[], step_cap(raw.len()).max(1))?;
    let mut r = Report::new();
    r.push("tape", raw);
    r.push("form", "invalid");
    r.push("notice", "deterministic reject: tape is not of the form ({0,1}+#)({0,1}+#)+");
    r.push_exact("p_reject", &p.p_reject);
    Ok(render(ctx, &r, true))
}

/// A fixed selection and where it came from.
struct Chosen {
    selection: WitnessSubset,
    source: &'static str,
    sweep: Option<SoundnessReport>,
}

/// The oracle source uses a witness when one exists and otherwise the fixed
/// selection with the lowest overall rejection. An external prover is asked
/// once, in a pass of its own, and its answers are taken as its selection.
fn choose(ctx: &Context, tape: &TapeString, source: &WitnessSource, sweep: bool) -> Result<Chosen, CliError> {
    let inst = tape.decode();
    match source {
        WitnessSource::Inline(s) => {
            let selection: WitnessSubset = s.parse()?;
            selection.check_len(inst.len())?;
            Ok(Chosen { selection, source: "inline", sweep: None })
        }
        WitnessSource::Oracle => {
            let found = subset_sum_oracle(&inst, DEFAULT_ENUMERATION_LIMIT)?;
            let sweep = if sweep || found.is_none() {
                Some(worst_case_soundness(&inst, DEFAULT_ENUMERATION_LIMIT)?)
            } else {
                None
            };
            let selection = match (&found, &sweep) {
                (Some(w), _) => w.clone(),
                (None, Some(s)) => s.worst_row().selection.clone(),
                (None, None) => unreachable!("a nonmember always gets a sweep"),
            };
            Ok(Chosen { selection, source: "oracle", sweep })
        }
        WitnessSource::Prover(cmd) => {
            let mut prover = ExternalProver::spawn(cmd, ctx.prover_timeout)?;
            let trace = trace_with_prover(tape, &mut prover)?;
            Ok(Chosen { selection: trace.selection, source: "prover", sweep: None })
        }
    }
}

pub fn validate_ops(ctx: &Context, corrupt: Option<&str>) -> Result<Outcome, CliError> {
    let mut ops = operators::protocol_operators();
    if let Some(name) = corrupt {
        let names: Vec<String> = ops.iter().map(|o| o.name.clone()).collect();
        let Some(op) = ops.iter_mut().find(|o| o.name == name) else {
            return Err(CliError::Usage(format!(
                "unknown operator {name:?}; expected one of {}",
                names.join(", ")
            )));
        };
        let first = &op.elements[0];
        let mut m = first.matrix().clone();
        m.0[0][0] = &m.0[0][0] + &ExactScalar::new(1, 3);
        op.elements[0] = OperationElement::new(m, first.label());
    }
    let results: Vec<(String, bool)> = ops.iter().map(|o| (o.name.clone(), check_completeness(o))).collect();
    let failed = results.iter().filter(|(_, ok)| !ok).count();
    let mut text = String::new();
    match ctx.format {
        Format::Structured => {
            for (name, ok) in &results {
                text.push_str(&format!("operator={name} complete={ok}\n"));
            }
        }
        Format::Human => {
            let width = results.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
            for (name, ok) in &results {
                let status = if *ok { "complete" } else { "INCOMPLETE" };
                text.push_str(&format!("{name:<width$}  {status}\n"));
            }
            if failed == 0 {
                text.push_str(&format!("all {} operators satisfy sum E^T E = I\n", results.len()));
            } else {
                text.push_str(&format!("{failed} of {} operators fail sum E^T E = I\n", results.len()));
            }
        }
    }
    Ok(Outcome { text, ok: failed == 0 })
}

fn push_probs(r: &mut Report, p: &PassAnalysis) {
    r.push_exact("p_accept", &p.p_accept);
    r.push_exact("p_reject", &p.p_reject);
    r.push_exact("p_restart", &p.p_restart);
}

pub fn analyze(ctx: &Context, input: &InputSource, witness: &WitnessSource) -> Result<Outcome, CliError> {
    let tape = match load(input)? {
        Tape::Valid(t) => t,
        Tape::Invalid(raw) => return invalid_form(ctx, &raw),
    };
    let inst = tape.decode();
    let chosen = choose(ctx, &tape, witness, true)?;
    let sel = &chosen.selection;
    let mut r = Report::new();
    r.push("instance", &inst);
    r.push("tape", &tape);
    r.push("source", chosen.source);
    r.push("selection", sel);
    r.push("selected_sum", inst.selected_sum(sel)?);
    r.push("witness", inst.is_witness(sel));
    let p = pass_probs(&inst, sel)?;
    push_probs(&mut r, &p);
    let v = run_protocol_exact(&p)?;
    r.push_exact("overall_accept", &v.overall_accept);
    r.push_exact("overall_reject", &v.overall_reject);
    match &v.expected_passes {
        ExpectedPasses::Finite(n) => {
            r.push_exact("expected_passes", n);
            let per_pass = ExactScalar::from_integer(tape.len() as i64 + 2);
            r.push_exact("max_expected_symbol_reads", &(&per_pass * n));
        }
        ExpectedPasses::Infinite => {
            r.push("expected_passes", "infinite");
        }
    }
    if let Some(s) = &chosen.sweep {
        r.push("membership", if s.oracle_membership { "member" } else { "nonmember" });
        r.extend("soundness", &s.to_report());
    }
    Ok(render(ctx, &r, true))
}

pub fn trace(ctx: &Context, input: &InputSource, witness: &WitnessSource) -> Result<Outcome, CliError> {
    let tape = match load(input)? {
        Tape::Valid(t) => t,
        Tape::Invalid(raw) => return invalid_form(ctx, &raw),
    };
    let mut prover: Box<dyn ProverStrategy> = match witness {
        WitnessSource::Prover(cmd) => Box::new(ExternalProver::spawn(cmd, ctx.prover_timeout)?),
        other => Box::new(FixedResponses(choose(ctx, &tape, other, false)?.selection.choices())),
    };
    let t = trace_with_prover(&tape, prover.as_mut())?;
    drop(prover);
    let expected = closed_form_state(&tape, &t.selection)?;
    let matched = t.final_state == expected;
    let verdict = if matched { "MATCH" } else { "MISMATCH" };
    let inst = tape.decode();
    let diff = signed_gap(&inst, &t.selection)?;
    let closed = format!("(1/3)^{} * (1, {diff}, 0) = {expected}", tape.len());

    let mut text = String::new();
    match ctx.format {
        Format::Structured => {
            let mut r = Report::new();
            r.push("tape", &tape);
            r.push("selection", &t.selection);
            for line in &t.lines {
                let k = format!("step.{}", line.position);
                r.push(format!("{k}.symbol"), line.symbol);
                r.push(format!("{k}.ops"), line.ops.join(","));
                r.push(format!("{k}.state"), &line.state);
                r.push_exact(format!("{k}.restart_mass"), &line.restart_mass);
            }
            r.push("final_state", &t.final_state);
            r.push("closed_form", &expected);
            r.push("result", verdict);
            text = r.to_structured();
        }
        Format::Human => {
            text.push_str(&format!("tape {tape}, selection {}\n", t.selection));
            let ops: Vec<String> = t.lines.iter().map(|l| l.ops.join(" ")).collect();
            let states: Vec<String> = t.lines.iter().map(|l| l.state.to_string()).collect();
            let ow = ops.iter().map(|s| s.len()).max().unwrap_or(0).max(3);
            let sw = states.iter().map(|s| s.len()).max().unwrap_or(0).max(5);
            text.push_str(&format!("{:>4}  {}  {:<ow$}  {:<sw$}  restart mass\n", "pos", "sym", "ops", "state"));
            for ((line, ops), state) in t.lines.iter().zip(&ops).zip(&states) {
                text.push_str(&format!(
                    "{:>4}  {:<3}  {ops:<ow$}  {state:<sw$}  {} (≈ {})\n",
                    line.position,
                    line.symbol,
                    line.restart_mass,
                    approx(&line.restart_mass)
                ));
            }
            text.push_str(&format!("final state  {}\n", t.final_state));
            text.push_str(&format!("closed form  {closed}\n"));
            text.push_str(&format!("{verdict}\n"));
        }
    }
    Ok(Outcome { text, ok: matched })
}

fn signed_gap(inst: &Instance, sel: &WitnessSubset) -> Result<String, CliError> {
    let t = inst.selected_sum(sel)?;
    Ok(if t <= inst.target {
        (&inst.target - &t).to_string()
    } else {
        format!("-{}", &t - &inst.target)
    })
}

/// `|f - p| <= 3 sqrt(p (1 - p) / n)`, squared so it stays exact.
fn within_three_sigma(freq: &ExactScalar, p: &ExactScalar, n: &ExactScalar) -> bool {
    let d = freq - p;
    let lhs = &(&d * &d) * n;
    let rhs = &(&ExactScalar::from_integer(9) * p) * &(&ExactScalar::one() - p);
    lhs <= rhs
}

pub fn sample(
    ctx: &Context,
    input: &InputSource,
    witness: &WitnessSource,
    passes: u64,
    seed: u64,
) -> Result<Outcome, CliError> {
    if passes == 0 {
        return Err(CliError::Usage("--passes must be at least 1".into()));
    }
    let n = i64::try_from(passes).map_err(|_| CliError::Usage("--passes is too large".into()))?;
    let mut r = Report::new();
    let (w, reference, mut prover): (String, PassAnalysis, Box<dyn ProverStrategy>) = match load(input)? {
        Tape::Valid(tape) => {
            let inst = tape.decode();
            let chosen = choose(ctx, &tape, witness, false)?;
            r.push("tape", &tape);
            r.push("source", chosen.source);
            r.push("selection", &chosen.selection);
            let reference = pass_probs(&inst, &chosen.selection)?;
            let prover: Box<dyn ProverStrategy> = match witness {
                WitnessSource::Prover(cmd) => Box::new(ExternalProver::spawn(cmd, ctx.prover_timeout)?),
                _ => Box::new(FixedResponses(chosen.selection.choices())),
            };
            (tape.as_str().to_string(), reference, prover)
        }
        Tape::Invalid(raw) => {
            r.push("tape", &raw);
            r.push("form", "invalid");
            let reference = run_pass_exact(spec(), &raw, &[], step_cap(raw.len()))?;
            (raw, reference, Box::new(FixedResponses(Vec::new())))
        }
    };
    r.push("passes", passes);
    r.push("seed", seed);

    let mut sampler = Sampler::new(spec(), &w, step_cap(w.len()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = [0i64; 4];
    for _ in 0..passes {
        let slot = match sampler.sample_pass(&mut rng, prover.as_mut())?.result {
            PassResult::Accept => 0,
            PassResult::Reject => 1,
            PassResult::Restart => 2,
            PassResult::Truncated => 3,
        };
        counts[slot] += 1;
    }
    drop(prover);

    let total = ExactScalar::from_integer(n);
    let mut ok = counts[3] == 0;
    for (slot, (name, p)) in
        [("accept", &reference.p_accept), ("reject", &reference.p_reject), ("restart", &reference.p_restart)]
            .into_iter()
            .enumerate()
    {
        let freq = ExactScalar::new(counts[slot], n);
        let within = within_three_sigma(&freq, p, &total);
        ok &= within;
        r.push(format!("{name}.count"), counts[slot]);
        r.push_exact(format!("{name}.frequency"), &freq);
        r.push_exact(format!("{name}.exact"), p);
        if ctx.format == Format::Human {
            let var = p.to_f64() * (1.0 - p.to_f64()) / passes as f64;
            let z = (freq.to_f64() - p.to_f64()) / var.sqrt();
            let z = if z.is_finite() { format!("{z:.3}") } else if freq == *p { "0".into() } else { "inf".into() };
            r.push(format!("{name}.sigmas"), format!("≈ {z}"));
        }
        r.push(format!("{name}.within_3sigma"), within);
    }
    r.push("truncated.count", counts[3]);
    Ok(render(ctx, &r, ok))
}

fn read_cnf(path: &Path) -> Result<Cnf, CliError> {
    Ok(read(path)?.parse()?)
}

pub fn reduce(ctx: &Context, path: &Path) -> Result<Outcome, CliError> {
    let cnf = read_cnf(path)?;
    let out = reduce_3sat(&cnf)?;
    let mut r = Report::new();
    r.push("variables", cnf.num_vars);
    r.push("clauses", cnf.clauses.len());
    r.push("columns", out.columns);
    r.push("values", out.instance.len());
    r.push("target", &out.instance.target);
    for (i, (v, role)) in out.instance.values.iter().zip(&out.roles).enumerate() {
        r.push(format!("row.{}.value", i + 1), v);
        r.push(format!("row.{}.role", i + 1), role);
    }
    r.push("instance", &out.instance);
    r.push("tape", encode_instance(&out.instance));
    Ok(render(ctx, &r, true))
}

pub fn end_to_end(ctx: &Context, path: &Path) -> Result<Outcome, CliError> {
    let cnf = read_cnf(path)?;
    let out = reduce_3sat(&cnf)?;
    let inst = &out.instance;
    let model = brute_sat(&cnf, DEFAULT_SAT_LIMIT)?;
    let member = subset_sum_oracle(inst, DEFAULT_ENUMERATION_LIMIT)?;
    let agree = model.is_some() == member.is_some();
    let mut r = Report::new();
    r.push("instance", inst);
    r.push("satisfiable", model.is_some());
    r.push("subset_sum_member", member.is_some());
    r.push("classical_agreement", agree);
    let ok = match model {
        Some(model) => {
            let assignment: Vec<String> =
                model.iter().enumerate().map(|(i, b)| format!("x{}={b}", i + 1)).collect();
            let selection = map_witness(&cnf, &model)?;
            let v = analysis::overall_verdict(inst, &selection)?;
            r.push("assignment", assignment.join(","));
            r.push("selection", &selection);
            r.push_exact("overall_accept", &v.overall_accept);
            r.push("result", format!("SAT; protocol accepts with probability {}", v.overall_accept));
            agree && v.overall_accept.is_one()
        }
        None => {
            let s = worst_case_soundness(inst, DEFAULT_ENUMERATION_LIMIT)?;
            r.extend("soundness", &s.to_report());
            r.push(
                "result",
                format!("UNSAT; worst-case rejection ≥ 9/10 (exactly {})", s.worst_fixed_rejection),
            );
            agree && s.worst_fixed_rejection >= ExactScalar::new(9, 10) && s.adaptive_bound_holds
        }
    };
    Ok(render(ctx, &r, ok))
}

pub fn amplify(ctx: &Context, rounds: u32, base: &str, target: Option<&str>) -> Result<Outcome, CliError> {
    let base: ExactScalar = base.parse()?;
    let err = analysis::amplify(&base, rounds)?;
    let mut r = Report::new();
    r.push_exact("base_error", &base);
    r.push("rounds", rounds);
    r.push_exact("error", &err);
    if let Some(t) = target {
        let t: ExactScalar = t.parse()?;
        r.push_exact("target", &t);
        r.push("rounds_needed", rounds_needed(&base, &t)?);
    }
    Ok(render(ctx, &r, true))
}
