use crate::files::{self, Certificate, Envelope};
use crate::output::{cache_dir, cache_name, write_atomic};
use crate::specs::{named_spec, parse_symbol};
use crate::{Ctx, Labeling, Mode, OdometerOp, Status, XstKind};
use anyhow::{bail, Context, Result};
use flowcert::certificates::{
    amenability_probe, expansion_certificate, folner_search, parse_ratio, reference_f2_pieces, tarski_report,
    xst_certificate, xt_patch_from_expansion, ExpansionOutcome, ProbeOptions, ProbeOutcome,
};
use flowcert::compressible::{run_pipeline, select_parameters, BuilderMode, WitnessOutcome};
use flowcert::flow::{
    f2_orbit_check, format_bits, format_digits, format_tail_word, odometer_compression, odometer_decompression,
    odometer_step, parse_bits, parse_digits, Direction, OdometerStep, OrbitOutcome,
};
use flowcert::group::{ball, Element, GroupSpec};
use flowcert::subshift::{
    clopen_generator_check, extend_search, patch_check, GeneratorCheckResult, Patch, PatchCheck, PatchFile, PatchSource,
};
use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

fn group(ctx: &mut Ctx, s: &str) -> Result<GroupSpec> {
    let g = GroupSpec::parse_descriptor(s).with_context(|| format!("group descriptor `{s}`"))?;
    ctx.report.group = Some(g.to_string());
    Ok(g)
}

fn headline(env: &Envelope) -> String {
    match &env.body {
        Certificate::Folner(b) => format!("amenable side: Følner set at radius {} with ratio {}", b.radius, b.ratio),
        Certificate::Expansion(b) => format!("non-amenable side: 2-to-1 expansion map onto ball({})", b.radius),
        Certificate::Paradox(b) => format!("{:?} paradox patch on ball({})", b.paradox_kind, b.radius),
        Certificate::CompressibleWitness(b) => format!("compressible witness on ball({}) with n = {}", b.radius, b.n),
    }
}

/// A previously written cache entry, used only if it still re-verifies.
fn from_cache(ctx: &Ctx, out: &Option<PathBuf>, name: &str) -> Option<Envelope> {
    if out.is_some() {
        return None;
    }
    let text = std::fs::read_to_string(cache_dir().join(name)).ok()?;
    let env = Envelope::from_json(&text).ok()?;
    files::verify(&env, ctx.cap).ok()?;
    Some(env)
}

/// Serialises, re-reads and re-verifies the certificate before writing it atomically.
fn emit(ctx: &mut Ctx, env: &Envelope, out: Option<PathBuf>, name: &str) -> Result<()> {
    let text = env.to_json();
    let back = Envelope::from_json(&text)?;
    if &back != env {
        bail!("certificate does not survive a serialisation round trip");
    }
    let facts = files::verify(&back, ctx.cap).context("emitted certificate fails re-verification")?;
    let path = out.unwrap_or_else(|| cache_dir().join(name));
    write_atomic(&path, &text)?;
    show(ctx, env, &path, facts);
    Ok(())
}

fn show(ctx: &mut Ctx, env: &Envelope, path: &Path, facts: Vec<String>) {
    ctx.report.line(headline(env));
    for f in facts {
        ctx.report.line(format!("  {f}"));
    }
    ctx.report.line(format!("{} certificate: {}", env.kind(), path.display()));
    ctx.report.files.push(path.display().to_string());
}

/// Cache hit or fresh computation; `build` returns `None` when nothing was certified.
fn certify(
    ctx: &mut Ctx,
    out: Option<PathBuf>,
    name: &str,
    build: impl FnOnce(&mut Ctx) -> Result<Option<Envelope>>,
) -> Result<Option<Envelope>> {
    if let Some(env) = from_cache(ctx, &out, name) {
        let facts = files::verify(&env, ctx.cap)?;
        show(ctx, &env, &cache_dir().join(name), facts);
        return Ok(Some(env));
    }
    let Some(env) = build(ctx)? else { return Ok(None) };
    emit(ctx, &env, out, name)?;
    Ok(Some(env))
}

pub fn ball_cmd(ctx: &mut Ctx, g: &str, radius: usize, list: bool) -> Result<Status> {
    let g = group(ctx, g)?;
    ctx.report.param("radius", radius);
    let b = ball(&g, &g.standard_generating_set(), radius, ctx.cap)?;
    ctx.report.outcome = "enumerated".into();
    ctx.report.line(format!("|ball({radius})| = {} in {g}", b.len()));
    if list {
        let mut out = std::io::stdout().lock();
        for (i, x) in b.iter().enumerate() {
            // a closed pipe (e.g. `| head`) just ends the listing
            if writeln!(out, "{}\t{x}", b.length_at(i)).is_err() {
                break;
            }
        }
    }
    Ok(Status::Ok)
}

pub fn probe_cmd(ctx: &mut Ctx, g: &str, budget: usize, epsilon: &str, out: Option<PathBuf>) -> Result<Status> {
    let g = group(ctx, g)?;
    let epsilon = parse_ratio(epsilon)?;
    ctx.report.param("budget", budget);
    ctx.report.param("epsilon", epsilon.to_string());
    let name = cache_name(&["probe", &g.to_string(), &format!("b{budget}"), &epsilon.to_string()]);
    let options = ProbeOptions { budget, epsilon, cap: ctx.cap, ..ProbeOptions::default() };
    let found = certify(ctx, out, &name, |_| {
        Ok(match amenability_probe(&g, &options)? {
            ProbeOutcome::Folner(c) => Some(Envelope::new(files::folner_body(&c))),
            ProbeOutcome::Expansion(c) => Some(Envelope::new(files::expansion_body(&c))),
            ProbeOutcome::Exhausted { .. } => None,
        })
    })?;
    match found {
        Some(env) => {
            ctx.report.outcome = env.kind().into();
            Ok(Status::Ok)
        }
        None => {
            ctx.report.outcome = "exhausted".into();
            ctx.report.line(format!("inconclusive: no certificate within {} rounds", budget + 1));
            Ok(Status::Inconclusive)
        }
    }
}

pub fn folner_cmd(ctx: &mut Ctx, g: &str, epsilon: &str, budget: usize, out: Option<PathBuf>) -> Result<Status> {
    let g = group(ctx, g)?;
    let epsilon = parse_ratio(epsilon)?;
    ctx.report.param("epsilon", epsilon.to_string());
    ctx.report.param("budget", budget);
    let name = cache_name(&["folner", &g.to_string(), &format!("b{budget}"), &epsilon.to_string()]);
    let s = g.unit_ball_set();
    let found = certify(ctx, out, &name, |ctx| {
        Ok(folner_search(&g, &s, epsilon, budget, ctx.cap)?.map(|c| Envelope::new(files::folner_body(&c))))
    })?;
    if found.is_some() {
        ctx.report.outcome = "folner".into();
        Ok(Status::Ok)
    } else {
        ctx.report.outcome = "exhausted".into();
        ctx.report.line(format!("inconclusive: no set with ratio < {epsilon} up to radius {budget}"));
        Ok(Status::Inconclusive)
    }
}

pub fn expand_cmd(ctx: &mut Ctx, g: &str, radius: usize, out: Option<PathBuf>) -> Result<Status> {
    let g = group(ctx, g)?;
    ctx.report.param("radius", radius);
    let name = cache_name(&["expansion", &g.to_string(), &format!("r{radius}")]);
    let mut violator = None;
    let found =
        certify(ctx, out, &name, |ctx| match expansion_certificate(&g, &g.unit_ball_set(), radius, ctx.cap)? {
            ExpansionOutcome::Certificate(c) => Ok(Some(Envelope::new(files::expansion_body(&c)))),
            ExpansionOutcome::Violator(v) => {
                violator = Some(v);
                Ok(None)
            }
        })?;
    if found.is_some() {
        ctx.report.outcome = "expansion".into();
        return Ok(Status::Ok);
    }
    let v = violator.expect("no certificate means a violator");
    ctx.report.outcome = "violator".into();
    ctx.report.line(format!(
        "no 2-to-1 map onto ball({}): {} elements of ball({}) have only {} neighbours in the domain",
        radius,
        v.set.len(),
        v.radius,
        v.neighborhood
    ));
    Ok(Status::Failed)
}

pub fn xst_cmd(ctx: &mut Ctx, g: &str, kind: XstKind, radius: usize, out: Option<PathBuf>) -> Result<Status> {
    let g = group(ctx, g)?;
    ctx.report.param("kind", format!("{kind:?}").to_lowercase());
    ctx.report.param("radius", radius);
    let name = cache_name(&[&format!("{kind:?}").to_lowercase(), &g.to_string(), &format!("r{radius}")]);
    let found = certify(ctx, out, &name, |ctx| {
        let cert = match kind {
            XstKind::Xst => {
                let (f2, s, t, pieces) = reference_f2_pieces();
                if g != f2 {
                    bail!("the built-in X_{{S,T}} pieces live on F2, not {g}");
                }
                xst_certificate(&f2, &s, &t, &pieces, radius, ctx.cap)?
            }
            XstKind::Xt => match expansion_certificate(&g, &g.unit_ball_set(), radius, ctx.cap)? {
                ExpansionOutcome::Certificate(c) => xt_patch_from_expansion(&c, ctx.cap)?,
                ExpansionOutcome::Violator(_) => return Ok(None),
            },
        };
        Ok(Some(Envelope::new(files::paradox_body(&cert))))
    })?;
    let Some(env) = found else {
        ctx.report.outcome = "violator".into();
        ctx.report.line(format!("no 2-to-1 map onto ball({radius}), so no X_T patch"));
        return Ok(Status::Failed);
    };
    let Certificate::Paradox(body) = &env.body else { bail!("cache entry {name} is not a paradox certificate") };
    let cert = rebuild_paradox(body)?;
    let t = tarski_report(&[cert], ctx.cap)?;
    let bound = |b: Option<usize>| b.map_or("-".to_string(), |v| format!("≤ {v}"));
    ctx.report.line(format!("tarski bounds: k {}, l {}", bound(t.k_upper), bound(t.l_upper)));
    ctx.report.outcome = "paradox".into();
    Ok(Status::Ok)
}

fn rebuild_paradox(b: &files::ParadoxBody) -> Result<flowcert::certificates::ParadoxCertificate> {
    use flowcert::certificates::{ParadoxCertificate, PieceLabel};
    let g = &b.group;
    let parse = |xs: &[String]| xs.iter().map(|s| g.parse_element(s)).collect::<flowcert::Result<Vec<Element>>>();
    let cells = b
        .cells
        .iter()
        .map(|(x, l)| Ok((g.parse_element(x)?, PieceLabel::parse(g, l)?)))
        .collect::<flowcert::Result<Vec<_>>>()?;
    Ok(ParadoxCertificate {
        kind: b.paradox_kind,
        group: g.clone(),
        s: parse(&b.s)?,
        t: parse(&b.t)?,
        radius: b.radius,
        interior_radius: b.interior_radius,
        cells,
    })
}

pub fn build_compressible_cmd(
    ctx: &mut Ctx,
    g: &str,
    mode: Mode,
    rho: usize,
    n: u64,
    radius: usize,
    out: Option<PathBuf>,
) -> Result<Status> {
    let g = group(ctx, g)?;
    ctx.report.param("mode", format!("{mode:?}").to_lowercase());
    ctx.report.param("rho", rho);
    let builder_mode = match mode {
        Mode::Toy => BuilderMode::Toy,
        Mode::Faithful => BuilderMode::Faithful,
    };
    let params = select_parameters(&g, rho, builder_mode, n, ctx.cap)?;
    ctx.report.param("n", params.n);
    ctx.report.line(format!(
        "parameters: |S| = {}, n = {}, r = {}, |S'| = {}, T = ball({})",
        params.s_size,
        params.n,
        params.r,
        params.s_prime.len(),
        params.t_radius()
    ));
    if mode == Mode::Faithful {
        ctx.report.outcome = "parameters".into();
        ctx.report.line("witness patches are built in toy mode only");
        return Ok(Status::Ok);
    }
    ctx.report.param("radius", radius);
    let name = cache_name(&["witness", &g.to_string(), &format!("rho{rho}"), &format!("n{n}"), &format!("r{radius}")]);
    let mut failure: Option<(Status, String)> = None;
    let found = certify(ctx, out, &name, |ctx| {
        let report = run_pipeline(&params, radius, ctx.cap)?;
        let w = match report.outcome {
            WitnessOutcome::Witness(w) => w,
            WitnessOutcome::HallFailure { radius, points } => {
                failure = Some((
                    Status::Inconclusive,
                    format!(
                        "no 2-to-1 support map on ball({radius}): Hall's condition fails on {} support points",
                        points.len()
                    ),
                ));
                return Ok(None);
            }
        };
        let checks = report.checks.expect("a witness is always checked");
        if !checks.all_pass() {
            failure = Some((Status::Failed, format!("witness fails its checks: {checks:?}")));
            return Ok(None);
        }
        let ev = checks.compression.expect("checked above");
        let code = checks.code.expect("checked above");
        Ok(Some(Envelope::new(files::witness_body(
            &w,
            ev.table.len(),
            (code.detection_checked, code.support_detected),
            code.phi_injective,
        ))))
    })?;
    if found.is_some() {
        ctx.report.outcome = "witness".into();
        return Ok(Status::Ok);
    }
    let (status, msg) = failure.expect("no witness without a reason");
    ctx.report.outcome = if status == Status::Failed { "check-failed".into() } else { "hall-failure".into() };
    ctx.report.line(msg);
    Ok(status)
}

fn read_patch_file(path: &Path) -> Result<PatchFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(PatchFile::from_json(&text)?)
}

pub fn subshift_check_cmd(ctx: &mut Ctx, spec_name: &str, g: &str, path: &Path) -> Result<Status> {
    let g = group(ctx, g)?;
    let spec = named_spec(spec_name, &g)?;
    ctx.report.param("spec", spec_name);
    let file = read_patch_file(path)?;
    let patch = file.to_patch(&spec, |s| parse_symbol(&spec, s))?;
    ctx.report.files.push(path.display().to_string());
    match patch_check(&spec, &patch)? {
        PatchCheck::Ok => {
            ctx.report.outcome = "admissible".into();
            ctx.report
                .line(format!("admissible: {} cells, every window inside the domain accepted", patch.cells().len()));
            Ok(Status::Ok)
        }
        PatchCheck::ViolatedWindow(at) => {
            ctx.report.outcome = "violated".into();
            ctx.report.line(format!("rejected: window at {at} is forbidden"));
            Ok(Status::Failed)
        }
    }
}

pub fn subshift_extend_cmd(
    ctx: &mut Ctx,
    spec: &str,
    g: &str,
    patch: Option<PathBuf>,
    radius: usize,
    out: Option<PathBuf>,
) -> Result<Status> {
    let g = group(ctx, g)?;
    let spec = named_spec(spec, &g)?;
    ctx.report.param("radius", radius);
    let start = match &patch {
        Some(p) => read_patch_file(p)?.to_patch(&spec, |s| parse_symbol(&spec, s))?,
        None => Patch::empty(),
    };
    let b = ball(&g, &g.standard_generating_set(), radius, ctx.cap)?;
    let mut target: BTreeSet<Element> = b.iter().cloned().collect();
    target.extend(start.domain().iter().cloned());
    match extend_search(&spec, &start, &target, ctx.node_cap)? {
        Some(p) => {
            let file = PatchFile::from_patch(&spec, &p);
            let back = PatchFile::from_json(&file.to_json())?.to_patch(&spec, |s| parse_symbol(&spec, s))?;
            if patch_check(&spec, &back)? != PatchCheck::Ok {
                bail!("emitted patch fails re-verification");
            }
            let path =
                out.unwrap_or_else(|| cache_dir().join(cache_name(&["patch", &g.to_string(), &format!("r{radius}")])));
            let mut text = file.to_json();
            text.push('\n');
            write_atomic(&path, &text)?;
            ctx.report.outcome = "extended".into();
            ctx.report.line(format!("admissible extension to {} cells", p.cells().len()));
            ctx.report.line(format!("patch: {}", path.display()));
            ctx.report.files.push(path.display().to_string());
            Ok(Status::Ok)
        }
        None => {
            ctx.report.outcome = "no-extension".into();
            ctx.report.line(format!("no admissible extension to ball({radius})"));
            Ok(Status::Failed)
        }
    }
}

pub fn gen_check_cmd(
    ctx: &mut Ctx,
    spec: &str,
    g: &str,
    depth: usize,
    window: usize,
    labeling: Labeling,
    max_patches: usize,
) -> Result<Status> {
    let g = group(ctx, g)?;
    let spec = named_spec(spec, &g)?;
    ctx.report.param("depth", depth);
    ctx.report.param("window", window);
    ctx.report.param("labeling", format!("{labeling:?}").to_lowercase());
    let k = spec.alphabet.len();
    let index = |a: &u8| spec.alphabet.iter().position(|b| b == a).expect("symbol from the alphabet");
    let cells = ball(&g, &g.standard_generating_set(), depth, ctx.cap)?.len();
    let labels = match labeling {
        Labeling::Centre => k,
        Labeling::Pattern => k
            .checked_pow(cells as u32)
            .filter(|&v| v as u64 <= ctx.node_cap)
            .ok_or(flowcert::Error::ResourceLimit { what: "pattern labels".into(), cap: ctx.node_cap })?,
    };
    let labeler = |p: &[u8]| match labeling {
        Labeling::Centre => index(&p[0]),
        Labeling::Pattern => p.iter().fold(0, |acc, a| acc * k + index(a)),
    };
    let source = PatchSource::Enumerate { max_patches, node_cap: ctx.node_cap };
    match clopen_generator_check(&spec, depth, labels, &labeler, window, &source)? {
        GeneratorCheckResult::SeparatesAtRadius(w) => {
            ctx.report.outcome = "separates".into();
            ctx.report.line(format!("label maps on ball({w}) separate patches that differ at the identity"));
            Ok(Status::Ok)
        }
        GeneratorCheckResult::Counterexample(p, q) => {
            ctx.report.outcome = "counterexample".into();
            ctx.report.line(format!("not separated at window {window}; two patches with equal labels:"));
            for patch in [p, q] {
                let cells: Vec<String> = patch.cells().iter().map(|(x, a)| format!("{x}:{a}")).collect();
                ctx.report.line(format!("  {}", cells.join(" ")));
            }
            Ok(Status::Inconclusive)
        }
    }
}

pub fn verify_cmd(ctx: &mut Ctx, path: &Path, spec: Option<&str>) -> Result<Status> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).context("file is not JSON")?;
    ctx.report.files.push(path.display().to_string());
    if value.get("kind").and_then(|k| k.as_str()) == Some("patch") {
        let file = PatchFile::from_json(&text)?;
        let g = group(ctx, &file.group)?;
        let Some(name) = spec else { bail!("patch files need --spec to name their subshift") };
        let spec = named_spec(name, &g)?;
        let patch = file.to_patch(&spec, |s| parse_symbol(&spec, s))?;
        return match patch_check(&spec, &patch)? {
            PatchCheck::Ok => {
                ctx.report.outcome = "verified".into();
                ctx.report.line(format!("verified patch: {} cells admissible for {name}", patch.cells().len()));
                Ok(Status::Ok)
            }
            PatchCheck::ViolatedWindow(at) => {
                ctx.report.outcome = "rejected".into();
                ctx.report.line(format!("rejected: window at {at} is forbidden"));
                Ok(Status::Failed)
            }
        };
    }
    let env = Envelope::from_json(&text)?;
    ctx.report.group = Some(match &env.body {
        Certificate::Folner(b) => b.group.to_string(),
        Certificate::Expansion(b) => b.group.to_string(),
        Certificate::Paradox(b) => b.group.to_string(),
        Certificate::CompressibleWitness(b) => b.group.to_string(),
    });
    match files::verify(&env, ctx.cap) {
        Ok(facts) => {
            ctx.report.outcome = "verified".into();
            ctx.report.line(format!("verified {} certificate", env.kind()));
            ctx.report.line(headline(&env));
            for f in facts {
                ctx.report.line(format!("  {f}"));
            }
            Ok(Status::Ok)
        }
        Err(e) => {
            let status = crate::error_status(&e);
            ctx.report.outcome = "rejected".into();
            ctx.report.line(format!("rejected {} certificate: {e:#}", env.kind()));
            Ok(status)
        }
    }
}

pub fn f2_orbit_cmd(ctx: &mut Ctx, x: &str, y: &str, depth: usize) -> Result<Status> {
    let (bx, by) = (parse_bits(x)?, parse_bits(y)?);
    ctx.report.param("x", x);
    ctx.report.param("y", y);
    ctx.report.param("depth", depth);
    let r = f2_orbit_check(&bx, &by, depth)?;
    let tail = format!(
        "tail: x[{}..] vs y[{}..] over {} symbols: {}",
        r.tail.m,
        r.tail.n,
        r.tail.length,
        if r.tail.consistent { "equal" } else { "different" }
    );
    match r.outcome {
        OrbitOutcome::Connected { word } => {
            let shown = if word.is_empty() { "e".to_string() } else { format_tail_word(&word) };
            ctx.report.line(format!("connected: ({shown})·{} = {}", format_bits(&bx), format_bits(&by)));
            ctx.report.line(tail);
            if r.tail.consistent {
                ctx.report.outcome = "connected".into();
                Ok(Status::Ok)
            } else {
                ctx.report.outcome = "tail-mismatch".into();
                Ok(Status::Failed)
            }
        }
        OrbitOutcome::NotWithinDepth { visited, boundary_hits } => {
            ctx.report.outcome = "not-within-depth".into();
            ctx.report.line(format!(
                "not connected within depth {depth}: {visited} strings visited, {boundary_hits} rewrites ran past the end"
            ));
            ctx.report.line(tail);
            Ok(Status::Inconclusive)
        }
    }
}

pub fn odometer_cmd(ctx: &mut Ctx, digits: &str, op: OdometerOp, tail_from: Option<usize>) -> Result<Status> {
    let x = parse_digits(digits)?;
    ctx.report.param("digits", digits);
    ctx.report.param("op", format!("{op:?}").to_lowercase());
    let value = match op {
        OdometerOp::Up | OdometerOp::Down => {
            let dir = if op == OdometerOp::Up { Direction::Up } else { Direction::Down };
            match odometer_step(&x, dir)? {
                OdometerStep::Value(v) => v,
                OdometerStep::CarryOverflow => {
                    ctx.report.outcome = "carry-overflow".into();
                    ctx.report.line("carry leaves the truncation; the result depends on later digits");
                    return Ok(Status::Inconclusive);
                }
            }
        }
        OdometerOp::Compress => odometer_compression(&x, tail_from)?,
        OdometerOp::Decompress => odometer_decompression(&x)?,
    };
    ctx.report.outcome = "value".into();
    ctx.report.line(format_digits(&value));
    Ok(Status::Ok)
}
