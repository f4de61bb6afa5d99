use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use toricmld::generate::{random_instance, GenParams};
use toricmld::hyperplane::{gamma, gamma_closed_form, verify_certificate};
use toricmld::instance::{load_instance, CertificateFile, InstanceFile};
use toricmld::num::{fmt_rat, parse_rat, rat, IntVector};
use toricmld::toric::{box_square, is_glc, lct_pullback, mld_over_fiber, oracle_mld, Mld};
use toricmld::{find_hyperplane, Error, GPair, ToricContraction};

#[derive(Parser)]
#[command(name = "toricmld", version, about = "Exact mld, lct and hyperplane certificates for toric contraction germs")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Source {
    /// Instance file (JSON).
    instance: Option<PathBuf>,
    /// Use the seeded random instance instead of a file.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate an instance.
    Check(Source),
    /// Minimal log discrepancy over the central fiber.
    Mld(Source),
    /// Whether the pair is generalized log canonical.
    Lc(Source),
    /// Log canonical threshold of the pullback of a base hyperplane.
    Lct {
        #[command(flatten)]
        src: Source,
        /// Functional on the base lattice, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        phibar: String,
    },
    /// Search for a hyperplane certificate.
    Find {
        #[command(flatten)]
        src: Source,
        /// Write the certificate here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check a certificate against an instance.
    Verify {
        instance: PathBuf,
        certificate: PathBuf,
    },
    /// Brute-force mld over primitive points of [-R,R]^n.
    OracleMld {
        #[command(flatten)]
        src: Source,
        #[arg(long = "box", default_value_t = 3)]
        radius: u32,
    },
    /// γ(d, a) by the recursion and the closed form.
    Gamma {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        mld: String,
    },
}

/// Failure carrying its exit code.
struct Exit(u8, anyhow::Error);

impl From<anyhow::Error> for Exit {
    fn from(e: anyhow::Error) -> Self {
        let code = match e.downcast_ref::<Error>() {
            Some(Error::MldNotPositive | Error::NotGlc | Error::UnboundedThreshold(_)) => 1,
            Some(Error::LemmaViolation { .. } | Error::DescentFailed(_) | Error::WidthBoundViolated(_)) => 1,
            _ => 2,
        };
        Exit(code, e)
    }
}

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn load(src: &Source) -> anyhow::Result<(InstanceFile, ToricContraction, GPair)> {
    match (&src.instance, src.seed) {
        (Some(_), Some(_)) => bail!("give either an instance file or --seed, not both"),
        (None, None) => bail!("missing instance file (or --seed)"),
        (None, Some(seed)) => {
            let (tc, pair) = random_instance(seed, &GenParams::default())
                .ok_or_else(|| anyhow!("no admissible instance for seed {seed}"))?;
            let file = InstanceFile::from_parts(&tc, &pair, Some(format!("random instance, seed {seed}")));
            Ok((file, tc, pair))
        }
        (Some(path), None) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            load_instance(&text).with_context(|| format!("invalid instance {}", path.display()))
        }
    }
}

fn parse_vector(s: &str) -> anyhow::Result<IntVector> {
    let v: Result<Vec<i64>, _> = s.split(',').map(|x| x.trim().parse::<i64>()).collect();
    Ok(IntVector::from_i64(&v.with_context(|| format!("bad vector {s:?}"))?))
}

fn ints(v: &IntVector) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn run(cli: Cli) -> Result<u8, Exit> {
    let json_out = cli.json;
    match cli.cmd {
        Cmd::Check(src) => {
            let (_, tc, pair) = load(&src)?;
            box_square(&tc, &pair).context("nef test")?;
            if json_out {
                println!("{}", json!({"valid": true}));
            } else {
                println!("valid");
            }
            Ok(0)
        }
        Cmd::Mld(src) => {
            let (_, tc, pair) = load(&src)?;
            let bd = box_square(&tc, &pair)?;
            if !is_glc(&bd) {
                return Err(Exit(1, anyhow!(Error::NotGlc)));
            }
            match mld_over_fiber(&tc, &bd)? {
                Mld::Positive { value, witness } => {
                    if json_out {
                        println!("{}", json!({"mld": fmt_rat(&value), "witness": ints(&witness)}));
                    } else {
                        println!("{}", fmt_rat(&value));
                    }
                    Ok(0)
                }
                Mld::NotPositive => {
                    if json_out {
                        println!("{}", json!({"mld": null}));
                    } else {
                        println!("not positive");
                    }
                    Ok(1)
                }
            }
        }
        Cmd::Lc(src) => {
            let (_, tc, pair) = load(&src)?;
            let bd = box_square(&tc, &pair)?;
            let glc = is_glc(&bd);
            if json_out {
                println!("{}", json!({"glc": glc}));
            } else {
                println!("{glc}");
            }
            Ok(if glc { 0 } else { 1 })
        }
        Cmd::Lct { src, phibar } => {
            let (_, tc, pair) = load(&src)?;
            let phibar = parse_vector(&phibar)?;
            let bd = box_square(&tc, &pair)?;
            let v = lct_pullback(&tc, &bd, &phibar)?;
            if json_out {
                println!("{}", json!({"lct": fmt_rat(&v)}));
            } else {
                println!("{}", fmt_rat(&v));
            }
            Ok(0)
        }
        Cmd::Find { src, out } => {
            let (_, tc, pair) = load(&src)?;
            let cert = find_hyperplane(&tc, &pair)?;
            let text = CertificateFile::from_certificate(&cert).to_json();
            match out {
                Some(path) => {
                    fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
                    if !json_out {
                        println!("phi_bar = {}, gamma = {}", cert.phi_bar, fmt_rat(&cert.gamma));
                    }
                }
                None => print!("{text}"),
            }
            Ok(0)
        }
        Cmd::Verify { instance, certificate } => {
            let (_, tc, pair) = load(&Source {
                instance: Some(instance),
                seed: None,
            })?;
            let text = fs::read_to_string(&certificate)
                .with_context(|| format!("reading {}", certificate.display()))?;
            let cert = CertificateFile::parse(&text).context("invalid certificate")?;
            let v = verify_certificate(&tc, &pair, &cert.phi_bar, &cert.gamma);
            if json_out {
                println!("{}", json!({"ok": v.ok, "reasons": v.reasons}));
            } else if v.ok {
                println!("certificate accepted");
            } else {
                for r in &v.reasons {
                    println!("rejected: {r}");
                }
            }
            Ok(if v.ok { 0 } else { 1 })
        }
        Cmd::OracleMld { src, radius } => {
            if radius == 0 {
                return Err(Exit(2, anyhow!("--box must be positive")));
            }
            let (_, tc, pair) = load(&src)?;
            let bd = box_square(&tc, &pair)?;
            let found = oracle_mld(&tc, &bd, radius)?;
            let exact = mld_over_fiber(&tc, &bd).ok().and_then(|m| m.value().cloned());
            let agrees = match (&found, &exact) {
                (Some((v, _)), Some(e)) => Some(v == e),
                _ => None,
            };
            if json_out {
                println!(
                    "{}",
                    json!({
                        "oracle_mld": found.as_ref().map(|(v, _)| fmt_rat(v)),
                        "point": found.as_ref().map(|(_, p)| ints(p)),
                        "box": radius,
                        "agrees_with_mld": agrees,
                    })
                );
            } else {
                match &found {
                    Some((v, p)) => println!("{} at {p}", fmt_rat(v)),
                    None => println!("no primitive point of the box lies in the interior of the support"),
                }
                match agrees {
                    Some(true) => println!("agrees with the exact mld"),
                    Some(false) => println!(
                        "exact mld is {} (the box is too small; the oracle is an upper bound)",
                        fmt_rat(exact.as_ref().expect("compared"))
                    ),
                    None => {}
                }
            }
            Ok(if found.is_some() { 0 } else { 1 })
        }
        Cmd::Gamma { dim, mld } => {
            let a = parse_rat(&mld).ok_or_else(|| Exit(2, anyhow!("invalid rational {mld:?}")))?;
            if dim == 0 || a <= rat(0, 1) {
                return Err(Exit(2, anyhow!("need d >= 1 and a > 0")));
            }
            let r = gamma(dim, &a);
            let c = gamma_closed_form(dim, &a);
            if json_out {
                println!(
                    "{}",
                    json!({"gamma": fmt_rat(&r), "closed_form": fmt_rat(&c), "agree": r == c})
                );
            } else {
                println!("{}", fmt_rat(&r));
                println!("closed form {} ({})", fmt_rat(&c), if r == c { "agrees" } else { "DIFFERS" });
            }
            Ok(if r == c { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
