use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use nto1_core::agw::{check_diagram, random_diagram, DiagramJson, DiagramSpec};
use nto1_core::families::{
    build_l1l2l3, build_psi_family, build_xr_hxs, construct_binary, construct_gouzao, construct_miu2, construct_miu3,
    construct_nmiu3, trace_corollary, zcriterion, BinaryVariant, FamilyInstance, GouzaoVariant, Mode, PiecewiseSpec,
    PsiParams,
};
use nto1_core::lowdeg::{cubic_sweep, quartic_3to1_search};
use nto1_core::poly::parse_poly;
use nto1_core::theorems::{verify_theorem, RunOptions, TheoremReport, DESK_GATE, THEOREM_IDS};
use nto1_core::walsh::{char_sum_from, WalshSpectrum};
use nto1_core::{classify_poly, Error, FFElement, FieldCtx, FieldSpec, PhiGadget, PolyMap};

#[derive(Parser)]
#[command(name = "nto1", version, about = "Exhaustive n-to-1 checks over small finite fields")]
struct Cli {
    /// Seed for every randomized corpus.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Lift the size gates (also NTO1_NIGHTLY=1).
    #[arg(long, global = true)]
    nightly: bool,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the resolved field (modulus and primitive element) as JSON.
    Field {
        #[arg(long)]
        field: String,
    },
    /// Classify a polynomial over its whole field.
    Classify {
        #[arg(long)]
        field: String,
        #[arg(long)]
        poly: String,
    },
    /// W_F(0, v) table and the characterization sum.
    Walsh {
        #[arg(long)]
        field: String,
        #[arg(long)]
        poly: String,
        #[arg(long, value_enum, default_value_t = Phi::Phi2)]
        phi: Phi,
        /// For phi2: n = p^k.
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Degree 3 or 4 sweep.
    Lowdeg {
        #[arg(long)]
        field: String,
        #[arg(long)]
        degree: u8,
    },
    /// Check a diagram from a JSON file, or a random one.
    Diagram {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 30)]
        max_a: usize,
    },
    /// Build one family instance and compare its predicate with brute force.
    Construct {
        family: String,
        #[arg(long)]
        field: Option<String>,
        /// k=v pairs separated by commas.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long)]
        q1: Option<u64>,
        /// q = q1^m for the trace-shift families.
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        delta: Option<String>,
        /// Record failed hypotheses as warnings instead of rejecting.
        #[arg(long)]
        permissive: bool,
    },
    /// One CSV row per parameter point of a family sweep.
    Sweep {
        family: String,
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        q1: Option<u64>,
    },
    /// Run a named check; exits 1 on any disagreement.
    VerifyTheorem {
        id: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        q1: Option<u64>,
        /// Write one <id>.csv per check here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Phi {
    Phi1,
    Phi2,
}

enum Failure {
    Usage(String),
    Gate(String),
    Disagreement(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::GateExceeded(_)
            | Error::DomainTooLarge { .. }
            | Error::FieldTooLarge { .. }
            | Error::SetTooLarge { .. } => Failure::Gate(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Out = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let nightly = cli.nightly || std::env::var("NTO1_NIGHTLY").is_ok_and(|v| v == "1");
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let ctx = Run { seed: cli.seed, nightly };
    match ctx.dispatch(cli.cmd) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(Failure::Disagreement(w)) => {
            eprintln!("disagreement: {w}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Gate(m)) => {
            eprintln!("gate exceeded: {m}");
            ExitCode::from(3)
        }
    }
}

struct Run {
    seed: u64,
    nightly: bool,
}

impl Run {
    fn dispatch(&self, cmd: Cmd) -> Out {
        match cmd {
            Cmd::Field { field } => {
                let ctx = self.field(&field)?;
                let v = json!({ "order": ctx.order(), "spec": ctx.to_spec() });
                Ok(format!("{v}\n"))
            }
            Cmd::Classify { field, poly } => {
                let ctx = self.field(&field)?;
                let f = parse_poly(&ctx, &poly)?;
                Ok(format!("{}\n", classify_poly(&f)?.to_json(&ctx)))
            }
            Cmd::Walsh { field, poly, phi, k } => self.walsh(&field, &poly, phi, k),
            Cmd::Lowdeg { field, degree } => self.lowdeg(&field, degree),
            Cmd::Diagram { input, max_a } => self.diagram(input, max_a),
            Cmd::Construct { family, field, params, q1, m, delta, permissive } => {
                let mut kv = parse_params(&params)?;
                if let Some(q1) = q1 {
                    kv.push(("q1".into(), q1.to_string()));
                }
                if let Some(d) = delta {
                    kv.push(("delta".into(), d));
                }
                let ctx = match field {
                    Some(f) => self.field(&f)?,
                    None => self.trace_shift_field(&family, q1, m.unwrap_or(1))?,
                };
                let mode = if permissive { Mode::Permissive } else { Mode::Strict };
                let inst = construct(&ctx, &family, &Params(kv), mode)?;
                let v = inst.to_json()?;
                if v["agree"] == Value::Bool(false) {
                    println!("{v}");
                    return Err(Failure::Disagreement(format!("{family} at {params}")));
                }
                Ok(format!("{v}\n"))
            }
            Cmd::Sweep { family, field, q1 } => {
                let id = sweep_id(&family)?;
                let rep = verify_theorem(id, &self.options(field.as_deref(), q1)?)?;
                let csv = rep.to_csv().replacen(&format!("verify-theorem/{id}/"), &format!("sweep/{family}/"), 1);
                self.verdict(vec![rep], csv)
            }
            Cmd::VerifyTheorem { id, all, field, q1, out } => {
                let ids: Vec<&str> = match (id.as_deref(), all) {
                    (None, true) => THEOREM_IDS.to_vec(),
                    (Some(i), false) => vec![THEOREM_IDS
                        .iter()
                        .copied()
                        .find(|t| *t == i)
                        .ok_or_else(|| Failure::Usage(format!("unknown theorem id '{i}'")))?],
                    _ => return Err(Failure::Usage("give exactly one of <id> or --all".into())),
                };
                let opts = self.options(field.as_deref(), q1)?;
                let mut reports = Vec::new();
                let mut text = String::new();
                for id in ids {
                    let r = verify_theorem(id, &opts)?;
                    eprintln!("{} {id}: {}", if r.pass { "PASS" } else { "FAIL" }, r.summary);
                    match &out {
                        Some(dir) => {
                            std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(e.to_string()))?;
                            std::fs::write(dir.join(format!("{id}.csv")), r.to_csv())
                                .map_err(|e| Failure::Usage(e.to_string()))?;
                        }
                        None => text.push_str(&r.to_csv()),
                    }
                    reports.push(r);
                }
                self.verdict(reports, text)
            }
        }
    }

    /// Prints the output, then fails with the first witness if any report failed.
    fn verdict(&self, reports: Vec<TheoremReport>, text: String) -> Out {
        let failed: Vec<&TheoremReport> = reports.iter().filter(|r| !r.pass).collect();
        if failed.is_empty() {
            return Ok(text);
        }
        print!("{text}");
        let w: Vec<String> =
            failed.iter().map(|r| format!("{}: {}", r.id, r.witness.as_deref().unwrap_or("-"))).collect();
        Err(Failure::Disagreement(w.join("; ")))
    }

    fn options(&self, field: Option<&str>, q1: Option<u64>) -> Result<RunOptions, Failure> {
        Ok(RunOptions {
            seed: self.seed,
            nightly: self.nightly,
            field: field.map(parse_field_spec).transpose()?,
            q1,
        })
    }

    fn field(&self, text: &str) -> Result<Arc<FieldCtx>, Failure> {
        let spec = parse_field_spec(text)?;
        self.gate(&spec)?;
        Ok(FieldCtx::from_spec(&spec)?)
    }

    fn gate(&self, spec: &FieldSpec) -> Result<(), Failure> {
        let order = (spec.p as u128).checked_pow(spec.m as u32).unwrap_or(u128::MAX);
        if !self.nightly && order > DESK_GATE as u128 {
            return Err(Failure::Gate(format!("field of order {order} exceeds {DESK_GATE}; pass --nightly")));
        }
        Ok(())
    }

    /// GF(q^2) with q = q1^m, for the trace-shift families.
    fn trace_shift_field(&self, family: &str, q1: Option<u64>, m: u32) -> Result<Arc<FieldCtx>, Failure> {
        let q1 = q1.ok_or_else(|| Failure::Usage(format!("{family} needs --field or --q1")))?;
        let p = (2..=q1).find(|d| q1 % d == 0).ok_or_else(|| Failure::Usage("q1 must be at least 2".into()))?;
        let mut e = 0usize;
        let mut rest = q1;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        if rest != 1 {
            return Err(Failure::Usage(format!("q1 = {q1} is not a prime power")));
        }
        let spec = FieldSpec::new(p, 2 * e * m as usize);
        self.gate(&spec)?;
        Ok(FieldCtx::from_spec(&spec)?)
    }

    fn walsh(&self, field: &str, poly: &str, phi: Phi, k: u32) -> Out {
        let ctx = self.field(field)?;
        let f = parse_poly(&ctx, poly)?;
        let spec = WalshSpectrum::new(&f)?;
        let m = ctx.degree() as u32;
        let g = match phi {
            Phi::Phi1 => PhiGadget::phi1(ctx.p(), m)?,
            Phi::Phi2 => PhiGadget::phi2(ctx.p(), m, k)?,
        };
        let sum = char_sum_from(&spec, &g)?;
        let mut out = String::from("#schema=walsh/v1\nv,walsh\n");
        for (i, w) in spec.values().iter().enumerate() {
            let coeffs: Vec<String> = w.coeffs().iter().map(i128::to_string).collect();
            let _ = writeln!(out, "\"{}\",\"[{}]\"", ctx.element(i as u64), coeffs.join(","));
        }
        let _ = writeln!(out, "#char_sum={},bound={},n={}", fraction(&sum), fraction(&g.bound()), g.n());
        Ok(out)
    }

    fn lowdeg(&self, field: &str, degree: u8) -> Out {
        let ctx = self.field(field)?;
        match degree {
            3 => {
                let mut out = String::from("#schema=lowdeg/3/v1\na,b,predicted,brute_force,agree\n");
                let mut bad = None;
                for r in cubic_sweep(&ctx)? {
                    let _ = writeln!(
                        out,
                        "\"{}\",\"{}\",{},{},{}",
                        r.a,
                        r.b,
                        r.predicted,
                        r.brute_force,
                        r.agree()
                    );
                    if !r.agree() && bad.is_none() {
                        bad = Some(format!("a={} b={}", r.a, r.b));
                    }
                }
                match bad {
                    None => Ok(out),
                    Some(w) => {
                        print!("{out}");
                        Err(Failure::Disagreement(w))
                    }
                }
            }
            4 => {
                let s = quartic_3to1_search(&ctx, self.seed)?;
                let mut out = String::from("#schema=lowdeg/4/v1\na,b,c,predicted,brute_force,agree\n");
                for (a, b, c) in &s.hits {
                    let _ = writeln!(out, "\"{a}\",\"{b}\",\"{c}\",false,true,false");
                }
                let _ = writeln!(out, "#triples_checked={},sampled={}", s.triples_checked, s.sampled);
                match s.hits.first() {
                    None => Ok(out),
                    Some((a, b, c)) => {
                        print!("{out}");
                        Err(Failure::Disagreement(format!("x^4 + {a} x^3 + {b} x^2 + {c} x is 3-to-1")))
                    }
                }
            }
            _ => Err(Failure::Usage("--degree must be 3 or 4".into())),
        }
    }

    fn diagram(&self, input: Option<PathBuf>, max_a: usize) -> Out {
        let d = match input {
            Some(path) => {
                let text = std::fs::read_to_string(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                let j: DiagramJson = serde_json::from_str(&text).map_err(|e| Failure::Usage(e.to_string()))?;
                DiagramSpec::from_json(&j)?
            }
            None if max_a < 4 => return Err(Failure::Usage("--max-a must be at least 4".into())),
            None => random_diagram(&mut ChaCha8Rng::seed_from_u64(self.seed), max_a),
        };
        let v = check_diagram(&d)?;
        let out = json!({
            "n": d.n(),
            "f_is_n": v.f_is_n,
            "g_is_n": v.g_is_n,
            "condition3": v.condition3,
            "forward_holds": v.forward_holds,
            "backward_holds": v.backward_holds,
            "equivalent": v.equivalent(),
        });
        if v.forward_holds && v.backward_holds {
            Ok(format!("{out}\n"))
        } else {
            println!("{out}");
            Err(Failure::Disagreement("transfer implication fails".into()))
        }
    }
}

fn fraction(r: &num_rational::BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn sweep_id(family: &str) -> Result<&'static str, Failure> {
    Ok(match family {
        "miu2" => "miu2",
        "miu3" => "miu3",
        "nmiu3" => "nmiu3",
        "piecewise" | "piecewisegenerel" => "piecewisegenerel",
        "gouzao1" => "gouzao1",
        "gouzao2" => "gouzao2",
        "gouzao3" => "gouzao3",
        "2gouzao1" => "2gouzao1",
        "2gouzao2" => "2gouzao2",
        "zcriterion" => "zcriterion",
        "cubic3" => "de3p3",
        "cubic" => "de3pne3",
        _ => return Err(Failure::Usage(format!("no sweep for family '{family}'"))),
    })
}

/// Splits on commas outside brackets.
fn split_top(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out.into_iter().map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn parse_params(text: &str) -> Result<Vec<(String, String)>, Failure> {
    split_top(text)
        .into_iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Failure::Usage(format!("expected key=value, got '{kv}'")))
        })
        .collect()
}

/// `p=3,m=3[,modulus=[..]][,beta=[..]]`, or a path to a JSON field spec.
fn parse_field_spec(text: &str) -> Result<FieldSpec, Failure> {
    if !text.contains('=') {
        let body = std::fs::read_to_string(text).map_err(|e| Failure::Usage(format!("{text}: {e}")))?;
        return serde_json::from_str(&body).map_err(|e| Failure::Usage(format!("{text}: {e}")));
    }
    let kv = Params(parse_params(text)?);
    let mut spec = FieldSpec::new(kv.num("p")?, kv.num::<usize>("m")?);
    if let Some(v) = kv.get("modulus") {
        spec.modulus = Some(serde_json::from_str(v).map_err(|e| Failure::Usage(format!("modulus: {e}")))?);
    }
    if let Some(v) = kv.get("beta") {
        spec.beta = Some(serde_json::from_str(v).map_err(|e| Failure::Usage(format!("beta: {e}")))?);
    }
    Ok(spec)
}

struct Params(Vec<(String, String)>);

impl Params {
    fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn need(&self, key: &str) -> Result<&str, Failure> {
        self.get(key).ok_or_else(|| Failure::Usage(format!("missing parameter '{key}'")))
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> Result<T, Failure> {
        self.need(key)?.parse().map_err(|_| Failure::Usage(format!("parameter '{key}' is not a number")))
    }

    fn list(&self, key: &str) -> Result<Vec<u64>, Failure> {
        serde_json::from_str(self.need(key)?).map_err(|e| Failure::Usage(format!("parameter '{key}': {e}")))
    }

    fn elem(&self, ctx: &Arc<FieldCtx>, key: &str) -> Result<FFElement, Failure> {
        let f = parse_poly(ctx, self.need(key)?)?;
        if !f.is_constant() {
            return Err(Failure::Usage(format!("parameter '{key}' must be a field element")));
        }
        Ok(f.coeff(0))
    }

    fn poly(&self, ctx: &Arc<FieldCtx>, key: &str) -> Result<PolyMap, Failure> {
        Ok(parse_poly(ctx, self.need(key)?)?)
    }
}

fn construct(ctx: &Arc<FieldCtx>, family: &str, kv: &Params, mode: Mode) -> Result<FamilyInstance, Failure> {
    let e = |k: &str| kv.elem(ctx, k);
    let inst = match family {
        "miu2" => construct_miu2(ctx, kv.num("r")?, &e("a")?, &e("b")?, mode)?,
        "miu3" => construct_miu3(ctx, kv.num("r")?, &e("a")?, &e("b")?, &e("c")?, mode)?,
        "nmiu3" => {
            let v = [e("a")?, e("b")?, e("c")?, e("d")?];
            construct_nmiu3(ctx, kv.num("r")?, [&v[0], &v[1], &v[2], &v[3]], mode)?
        }
        "gouzao1" | "gouzao2" | "gouzao3" => {
            let variant = match family {
                "gouzao1" => GouzaoVariant::V1,
                "gouzao2" => GouzaoVariant::V2,
                _ => GouzaoVariant::V3,
            };
            construct_gouzao(ctx, variant, kv.num("q1")?, &e("delta")?, mode)?
        }
        "2gouzao1" => construct_binary(ctx, BinaryVariant::A, kv.num("q1")?, &e("delta")?, mode)?,
        "2gouzao2" => construct_binary(ctx, BinaryVariant::B, kv.num("q1").unwrap_or(2), &e("delta")?, mode)?,
        "xrhxs" => build_xr_hxs(ctx, kv.num("r")?, kv.num("s")?, &kv.poly(ctx, "h")?, kv.num("n")?, mode)?,
        "piecewise" => {
            let spec = PiecewiseSpec::new(
                ctx,
                kv.num("ell")?,
                kv.num("n")?,
                kv.num("r")?,
                kv.list("a")?,
                kv.list("m")?,
            )?;
            spec.instance(mode)?
        }
        "trace" => trace_corollary(
            ctx,
            kv.num("k")?,
            &e("a")?,
            kv.num("d")?,
            &kv.poly(ctx, "g")?,
            kv.num("n")?,
            mode,
        )?,
        "zcriterion" => zcriterion(
            ctx,
            kv.num("d")?,
            kv.num("k")?,
            &e("delta")?,
            &e("c")?,
            &kv.poly(ctx, "g")?,
            kv.num("n")?,
            mode,
        )?,
        "l1l2l3" => build_l1l2l3(
            &kv.poly(ctx, "l1")?,
            &kv.poly(ctx, "l2")?,
            &kv.poly(ctx, "l3")?,
            &kv.poly(ctx, "g")?,
            kv.num("k")?,
            kv.num("n")?,
            mode,
        )?,
        "psi" => {
            let polys = ["psi", "phi", "psibar", "h", "g"]
                .iter()
                .map(|k| kv.poly(ctx, k))
                .collect::<Result<Vec<_>, _>>()?;
            let params = PsiParams {
                psi: &polys[0],
                phi: &polys[1],
                psibar: &polys[2],
                h: &polys[3],
                g: &polys[4],
                k: kv.num("k")?,
                n: kv.num("n")?,
            };
            build_psi_family(&params, mode)?
        }
        _ => return Err(Failure::Usage(format!("unknown family '{family}'"))),
    };
    Ok(inst)
}
