//! `blsces`: issuer, holder and verifier workflows over JSON files.
//!
//! Exit codes: 0 accept, 1 reject, 2 malformed input, 3 I/O error. Every run
//! prints one JSON diagnostic on stdout.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use blsces::bls::{aggregate, keygen, KeyPair};
use blsces::ces::{
    ces_extract, ces_reextract, ces_verify, ExtractOptions, ExtractedPresentation, SignedCredential,
};
use blsces::credential::{ceas_contains, BlindingMode, Ceas, Credential, ExtractionSet};
use blsces::group::{BaseField, G2Point, Scalar};
use blsces::vectors::{golden_vectors, seeded_keypair, toy_vectors, GOLDEN_SEED};
use blsces::wire::{ProofBundle, Wire};
use blsces::zk::{
    build_statement, hash_to_curve_witness, prove_extraction, zk_verify, PredicateSpec, ProverBackend,
    Transparent, ZkError,
};

const BACKEND_ENV: &str = "BLSCES_BACKEND";
const DEFAULT_BACKEND: &str = "transparent";

#[derive(Parser)]
#[command(name = "blsces", version, about = "Selectively disclosable credentials with BLS content extraction signatures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an issuer key pair.
    Keygen {
        #[arg(long)]
        sk: PathBuf,
        #[arg(long)]
        pk: PathBuf,
        /// Derive the key from a seed instead of the OS generator.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sign a credential under a CEAS.
    Issue {
        #[arg(long)]
        sk: PathBuf,
        #[arg(long)]
        credential: PathBuf,
        #[arg(long)]
        ceas: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract a presentation from a signed credential or a re-extractable presentation.
    Extract {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        indices: Indices,
        /// Keep the per-claim signatures so the presentation can be extracted again.
        #[arg(long)]
        reextractable: bool,
        /// Blind properties as well as values of hidden claims.
        #[arg(long)]
        blind_properties: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a presentation.
    Verify {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        presentation: PathBuf,
    },
    /// Write proof-system parameters for the selected backend.
    Setup {
        #[arg(long, default_value_t = 128)]
        security_param: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Prove that hidden claims hash to public points and satisfy a predicate.
    Prove {
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        signed: PathBuf,
        #[command(flatten)]
        indices: Indices,
        /// none, range:INDEX:MIN:MAX or eq:INDEX:VALUE
        #[arg(long, default_value = "none")]
        predicate: PredicateSpec,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a proof bundle.
    ZkVerify {
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        bundle: PathBuf,
        /// Reject unless the bundle proves exactly this predicate.
        #[arg(long)]
        predicate: Option<PredicateSpec>,
    },
    /// Print or write deterministic test vectors.
    GenVectors {
        #[arg(long, default_value_t = GOLDEN_SEED)]
        seed: u64,
        /// Vectors over the 11-element toy field instead.
        #[arg(long)]
        toy: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a quick sign, extract and verify round trip.
    SelfTest {
        #[arg(long)]
        toy: bool,
    },
}

#[derive(Args)]
struct Indices {
    /// Comma-separated claim indices to disclose, e.g. 0,2.
    #[arg(long, value_delimiter = ',', required = true)]
    indices: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    backend: String,
    security_param: u32,
}

enum Failure {
    Reject { code: String, message: String, extra: Map<String, Value> },
    Malformed { message: String, extra: Map<String, Value> },
    Io { path: PathBuf, message: String },
}

impl Failure {
    fn malformed(message: impl ToString) -> Self {
        Failure::Malformed {
            message: message.to_string(),
            extra: Map::new(),
        }
    }

    fn reject(code: &str, message: impl ToString) -> Self {
        Failure::Reject {
            code: code.to_string(),
            message: message.to_string(),
            extra: Map::new(),
        }
    }
}

type Outcome = Result<Map<String, Value>, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn load<T: Wire>(path: &Path) -> Result<T, Failure> {
    T::from_json(&read(path)?).map_err(|e| Failure::Malformed {
        message: format!("{}: {e}", path.display()),
        extra: Map::from_iter([("path".to_string(), json!(path))]),
    })
}

fn fields(pairs: impl IntoIterator<Item = (&'static str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn extraction_set(indices: &[usize], n: usize) -> Result<ExtractionSet, Failure> {
    if let Some(&index) = indices.iter().find(|&&i| i >= n) {
        return Err(Failure::Malformed {
            message: format!("index {index} is out of range for a credential with {n} claims"),
            extra: fields([("index", json!(index))]),
        });
    }
    ExtractionSet::new(indices.iter().copied()).map_err(Failure::malformed)
}

fn backend_name() -> String {
    std::env::var(BACKEND_ENV).unwrap_or_else(|_| DEFAULT_BACKEND.to_string())
}

/// The selected backend, checked against a parameter file when one is given.
fn backend(params: Option<&Path>) -> Result<Transparent, Failure> {
    let name = backend_name();
    if name != Transparent.id() {
        return Err(Failure::malformed(format!("unknown backend {name:?} in {BACKEND_ENV}")));
    }
    if let Some(path) = params {
        let p: ParamsFile = serde_json::from_str(&read(path)?).map_err(Failure::malformed)?;
        if p.backend != name {
            return Err(Failure::malformed(format!(
                "parameters are for backend {:?}, selected backend is {name:?}",
                p.backend
            )));
        }
    }
    Ok(Transparent)
}

fn keygen_cmd(sk: &Path, pk: &Path, seed: Option<u64>) -> Outcome {
    let kp = match seed {
        Some(s) => seeded_keypair(s),
        None => keygen(&mut rand::rngs::OsRng),
    };
    write(sk, &kp.sk.to_json())?;
    write(pk, &kp.pk.to_json())?;
    Ok(fields([("public_key", json!(kp.pk.to_dto().public_key))]))
}

fn issue_cmd(sk: &Path, cred: &Path, ceas: &Path, out: &Path) -> Outcome {
    let sk: Scalar = load(sk)?;
    let cred: Credential = load(cred)?;
    let ceas: Ceas = load(ceas)?;
    let sc = blsces::ces::ces_sign(&sk, &cred, &ceas).map_err(Failure::malformed)?;
    write(out, &sc.to_json())?;
    Ok(fields([("claims", json!(sc.cred.len())), ("counters", json!(sc.counters))]))
}

fn extract_cmd(input: &Path, indices: &[usize], reextractable: bool, blind_properties: bool, out: &Path) -> Outcome {
    let text = read(input)?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| Failure::malformed(format!("{}: {e}", input.display())))?;
    let opts = ExtractOptions {
        reextractable,
        blinding: if blind_properties {
            BlindingMode::PropertyAndValue
        } else {
            BlindingMode::ValueOnly
        },
    };
    let bad = |e: blsces::wire::WireError| Failure::malformed(format!("{}: {e}", input.display()));
    let (pres, x) = if doc.get("signatures").is_some() {
        let sc = SignedCredential::from_json(&text).map_err(bad)?;
        let x = extraction_set(indices, sc.cred.len())?;
        (ces_extract(&sc, &x, opts), x)
    } else {
        let p = ExtractedPresentation::from_json(&text).map_err(bad)?;
        let x = extraction_set(indices, p.sub_cred.len())?;
        (ces_reextract(&p, &x, opts), x)
    };
    let pres = pres.map_err(Failure::malformed)?;
    let in_ceas = ceas_contains(&pres.ext_sig.ceas, &x).map_err(Failure::malformed)?;
    write(out, &pres.to_json())?;
    Ok(fields([("extraction", json!(indices)), ("in_ceas", json!(in_ceas))]))
}

fn verify_cmd(pk: &Path, presentation: &Path) -> Outcome {
    let pk: G2Point = load(pk)?;
    let pres: ExtractedPresentation = load(presentation)?;
    ces_verify(&pk, &pres).map_err(|r| Failure::reject(r.code(), r))?;
    Ok(Map::new())
}

fn setup_cmd(security_param: u32, out: &Path) -> Outcome {
    backend(None)?;
    let p = ParamsFile {
        backend: backend_name(),
        security_param,
    };
    write(out, &(serde_json::to_string_pretty(&p).expect("serializable") + "\n"))?;
    Ok(fields([("backend", json!(p.backend))]))
}

fn prove_cmd(params: Option<&Path>, signed: &Path, indices: &[usize], predicate: &PredicateSpec, out: &Path) -> Outcome {
    let backend = backend(params)?;
    let sc: SignedCredential = load(signed)?;
    let x = extraction_set(indices, sc.cred.len())?;
    let (proof, inputs) = prove_extraction(&backend, &backend.setup(0), &sc.cred, &sc.ceas, &x, predicate)
        .map_err(|e| match e {
            ZkError::Unsatisfied { .. } => Failure::reject("unsatisfied", e),
            e => Failure::malformed(e),
        })?;
    let picked: Vec<_> = x.iter().map(|i| sc.sigs[i]).collect();
    let sigma = aggregate(&picked).map_err(Failure::malformed)?;
    let bundle = ProofBundle { inputs, sigma, proof };
    write(out, &bundle.to_json())?;
    Ok(fields([
        ("backend", json!(bundle.proof.backend)),
        ("proof_bytes", json!(bundle.proof.bytes.len())),
    ]))
}

fn zk_verify_cmd(params: Option<&Path>, pk: &Path, bundle: &Path, expected: Option<&PredicateSpec>) -> Outcome {
    let backend = backend(params)?;
    let pk: G2Point = load(pk)?;
    let bundle: ProofBundle = load(bundle)?;
    if let Some(p) = expected {
        if *p != bundle.inputs.predicate {
            return Err(Failure::reject(
                "predicate_mismatch",
                format!("bundle proves {}, expected {p}", bundle.inputs.predicate),
            ));
        }
    }
    let verdict = zk_verify(&backend, &backend.setup(0), &pk, &bundle.sigma, &bundle.proof, &bundle.inputs);
    let conjuncts: Map<String, Value> = [("b1", &verdict.b1), ("b2", &verdict.b2), ("b3", &verdict.b3)]
        .into_iter()
        .map(|(k, r)| (k.to_string(), r.as_ref().map_or_else(|e| json!(e.code()), |_| json!("ok"))))
        .collect();
    match verdict.failures().first() {
        None => Ok(fields([("conjuncts", Value::Object(conjuncts))])),
        Some((_, first)) => Err(Failure::Reject {
            code: first.code().to_string(),
            message: verdict
                .failures()
                .iter()
                .map(|(k, e)| format!("{k}: {e}"))
                .collect::<Vec<_>>()
                .join("; "),
            extra: fields([("conjuncts", Value::Object(conjuncts))]),
        }),
    }
}

fn gen_vectors_cmd(seed: u64, toy: bool, out: Option<&Path>) -> Outcome {
    let vectors = if toy {
        serde_json::to_value(toy_vectors(16).map_err(Failure::malformed)?)
    } else {
        serde_json::to_value(golden_vectors(seed).map_err(Failure::malformed)?)
    }
    .expect("serializable");
    match out {
        Some(path) => {
            write(path, &(serde_json::to_string_pretty(&vectors).expect("serializable") + "\n"))?;
            Ok(Map::new())
        }
        None => Ok(fields([("vectors", vectors)])),
    }
}

fn self_test_cmd(toy: bool) -> Outcome {
    if toy {
        let field = BaseField::toy();
        let cred = blsces::vectors::sample_credential();
        let ceas = blsces::vectors::sample_ceas();
        let x = ExtractionSet::new([0, 1]).expect("non-empty");
        let witnesses = x
            .iter()
            .map(|i| hash_to_curve_witness(&field, i, &cred.claims()[i], cred.len(), &ceas).map(|(_, w)| w))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::reject("self_test_failed", e))?;
        let st = build_statement(&field, &cred, &ceas, &witnesses, &x, &PredicateSpec::True)
            .map_err(|e| Failure::reject("self_test_failed", e))?;
        if !st.cs.is_satisfied(&st.assignment) {
            return Err(Failure::reject("self_test_failed", "toy statement is not satisfied"));
        }
        return Ok(fields([("constraints", json!(st.cs.num_constraints()))]));
    }
    let KeyPair { sk, pk } = seeded_keypair(GOLDEN_SEED);
    let sc = blsces::ces::ces_sign(&sk, &blsces::vectors::sample_credential(), &blsces::vectors::sample_ceas())
        .map_err(|e| Failure::reject("self_test_failed", e))?;
    let x = ExtractionSet::new([0, 1]).expect("non-empty");
    let pres = ces_extract(&sc, &x, ExtractOptions::default()).map_err(|e| Failure::reject("self_test_failed", e))?;
    ces_verify(&pk, &pres).map_err(|e| Failure::reject("self_test_failed", e))?;
    let mut forged = pres.clone();
    forged.ext_sig.counters.swap(0, 1);
    if ces_verify(&pk, &forged).is_ok() {
        return Err(Failure::reject("self_test_failed", "tampered presentation accepted"));
    }
    Ok(Map::new())
}

fn run(cmd: &Command) -> Outcome {
    match cmd {
        Command::Keygen { sk, pk, seed } => keygen_cmd(sk, pk, *seed),
        Command::Issue { sk, credential, ceas, out } => issue_cmd(sk, credential, ceas, out),
        Command::Extract {
            input,
            indices,
            reextractable,
            blind_properties,
            out,
        } => extract_cmd(input, &indices.indices, *reextractable, *blind_properties, out),
        Command::Verify { pk, presentation } => verify_cmd(pk, presentation),
        Command::Setup { security_param, out } => setup_cmd(*security_param, out),
        Command::Prove {
            params,
            signed,
            indices,
            predicate,
            out,
        } => prove_cmd(params.as_deref(), signed, &indices.indices, predicate, out),
        Command::ZkVerify {
            params,
            pk,
            bundle,
            predicate,
        } => zk_verify_cmd(params.as_deref(), pk, bundle, predicate.as_ref()),
        Command::GenVectors { seed, toy, out } => gen_vectors_cmd(*seed, *toy, out.as_deref()),
        Command::SelfTest { toy } => self_test_cmd(*toy),
    }
}

fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Keygen { .. } => "keygen",
        Command::Issue { .. } => "issue",
        Command::Extract { .. } => "extract",
        Command::Verify { .. } => "verify",
        Command::Setup { .. } => "setup",
        Command::Prove { .. } => "prove",
        Command::ZkVerify { .. } => "zk-verify",
        Command::GenVectors { .. } => "gen-vectors",
        Command::SelfTest { .. } => "self-test",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut report = fields([("command", json!(name(&cli.command)))]);
    let code = match run(&cli.command) {
        Ok(extra) => {
            report.insert("status".into(), json!("ok"));
            report.extend(extra);
            0
        }
        Err(Failure::Reject { code, message, extra }) => {
            report.insert("status".into(), json!("reject"));
            report.insert("code".into(), json!(code));
            report.insert("message".into(), json!(message));
            report.extend(extra);
            1
        }
        Err(Failure::Malformed { message, extra }) => {
            report.insert("status".into(), json!("malformed"));
            report.insert("message".into(), json!(message));
            report.extend(extra);
            2
        }
        Err(Failure::Io { path, message }) => {
            report.insert("status".into(), json!("io_error"));
            report.insert("path".into(), json!(path));
            report.insert("message".into(), json!(message));
            3
        }
    };
    println!("{}", Value::Object(report));
    ExitCode::from(code)
}
