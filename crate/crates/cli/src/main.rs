//! `gqd`: constructions, maps, searches and verifiers for generalized
//! quadrangles with ovoids and designs with local resolution systems.

mod formats;
mod report;

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use gqdesign::canon::{are_isomorphic, canonical_form, check_isomorphism, ColoredIncidenceGraph};
use gqdesign::correspondence::{
    check_prop32, check_replicated, mu, nu, roundtrip_design, roundtrip_gq, CorrespondenceError, RoundTrip,
};
use gqdesign::field::prime_power;
use gqdesign::geometry::{build_h3, build_q4, build_w, payne_derivation, GeometryError};
use gqdesign::search::{find_ntlrs, find_ovoids, Budget, NtlrsOptions, SearchStatus};
use gqdesign::sprott::{affine_plane, sprott_design, sprott_lrs};
use gqdesign::structures::{
    verify_balance, verify_bibd, verify_gq, verify_lrs, verify_non_triangular, verify_ovoid, Design,
    IncidenceStructure, LocalResolutionSystem, Ovoid, Quadrangle,
};

use formats::Document;
use report::Report;

#[derive(Parser)]
#[command(name = "gqd", version, about = "Generalized quadrangles, ovoids and designs with local resolution systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write a key=value report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Worker threads for the resolution search.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Branching-order seed; 0 keeps the natural order.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Wall-clock budget for searches, in seconds.
    #[arg(long, global = true)]
    budget: Option<f64>,
    /// Stop a search after this many solutions.
    #[arg(long, global = true)]
    limit: Option<usize>,
    /// Accept quadrangles with s = 1 or t = 1 in the maps.
    #[arg(long, global = true)]
    allow_degenerate: bool,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "verbatim")]
enum Family {
    W,
    Q4,
    H3,
    AG,
    #[value(name = "sprott")]
    Sprott,
}

#[derive(Subcommand)]
enum Command {
    /// Build a known quadrangle or design.
    Construct {
        #[arg(long, value_enum, ignore_case = true)]
        family: Family,
        #[arg(long)]
        q: u32,
        /// Block size of the developed design (sprott only; default q + 2).
        #[arg(long)]
        lambda: Option<usize>,
        /// Also write the explicit local resolution system (sprott only).
        #[arg(long)]
        with_lrs: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        lrs_out: Option<PathBuf>,
    },
    /// Check a structure against its definition.
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
    /// Search for ovoids of a quadrangle.
    Ovoids {
        gq: PathBuf,
        /// Write the first ovoid here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write every ovoid found into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Quadrangle and ovoid to design and local resolution system.
    MapN {
        gq: PathBuf,
        ovoid: PathBuf,
        #[arg(long)]
        design_out: PathBuf,
        #[arg(long)]
        lrs_out: PathBuf,
    },
    /// Design and non-triangular system to quadrangle and ovoid.
    MapM {
        design: PathBuf,
        lrs: PathBuf,
        #[arg(long)]
        inc_out: PathBuf,
        #[arg(long)]
        ovoid_out: PathBuf,
    },
    /// Search for non-triangular local resolution systems of a design.
    Ntlrs {
        design: PathBuf,
        /// Write the first system here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write every system found into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Swap points and lines.
    Dual {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Derive a quadrangle of order (q-1, q+1) at a regular point.
    Payne {
        file: PathBuf,
        #[arg(long)]
        point: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canonical certificate digest of an incidence structure or design.
    Canon {
        file: PathBuf,
        /// Color the points of this ovoid.
        #[arg(long)]
        ovoid: Option<PathBuf>,
    },
    /// Decide isomorphism, with an explicit verified bijection.
    Iso {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        ovoid_a: Option<PathBuf>,
        #[arg(long)]
        ovoid_b: Option<PathBuf>,
    },
    /// Apply both maps and compare with the input.
    Roundtrip {
        #[command(subcommand)]
        from: Roundtrip,
    },
    /// Check the regular-pair condition on an ovoid and the induced design.
    Prop32 { gq: PathBuf, ovoid: PathBuf },
    /// Detect a design made of copies of one design.
    Replicated {
        design: PathBuf,
        /// Write one copy here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Verify {
    Gq { file: PathBuf },
    Bibd { file: PathBuf },
    Ovoid { gq: PathBuf, ovoid: PathBuf },
    Lrs { design: PathBuf, lrs: PathBuf },
    Ntlrs { design: PathBuf, lrs: PathBuf },
}

#[derive(Subcommand)]
enum Roundtrip {
    /// mu after nu, starting from a quadrangle and ovoid.
    Gq { gq: PathBuf, ovoid: PathBuf },
    /// nu after mu, starting from a design and system.
    Design { design: PathBuf, lrs: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Success,
    Failed,
    Budget,
}

impl Outcome {
    fn code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::Failed => 1,
            Outcome::Budget => 3,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::Failed => "failed",
            Outcome::Budget => "budget-exceeded",
        }
    }

    fn from_search(status: SearchStatus, found: usize) -> Self {
        match status {
            SearchStatus::BudgetExceeded | SearchStatus::Cancelled => Outcome::Budget,
            SearchStatus::LimitReached => Outcome::Success,
            SearchStatus::Exhausted if found > 0 => Outcome::Success,
            SearchStatus::Exhausted => Outcome::Failed,
        }
    }
}

struct Run {
    report: Report,
    /// Set when a document went to stdout; the report then goes to stderr.
    stdout_used: bool,
    budget: Budget,
    limit: Option<usize>,
    threads: usize,
    seed: u64,
    allow_degenerate: bool,
}

impl Run {
    fn read(&mut self, name: &str, path: &Path) -> Result<Document> {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        self.report.input(name, path, &bytes);
        let text = String::from_utf8(bytes).map_err(|_| anyhow!("{}: not UTF-8 text", path.display()))?;
        formats::parse_any(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
    }

    fn incidence(&mut self, name: &str, path: &Path) -> Result<IncidenceStructure> {
        match self.read(name, path)? {
            Document::Incidence(s) => Ok(s),
            Document::Design(d) => Ok(d.to_incidence()),
            other => bail!("{}: expected an incidence or design file, found `{}`", path.display(), other.kind()),
        }
    }

    fn design(&mut self, name: &str, path: &Path) -> Result<Design> {
        match self.read(name, path)? {
            Document::Design(d) => Ok(d),
            other => bail!("{}: expected a design file, found `{}`", path.display(), other.kind()),
        }
    }

    fn ovoid(&mut self, name: &str, path: &Path) -> Result<Ovoid> {
        match self.read(name, path)? {
            Document::Ovoid(o) => Ok(o),
            other => bail!("{}: expected an ovoid file, found `{}`", path.display(), other.kind()),
        }
    }

    fn lrs(&mut self, name: &str, path: &Path) -> Result<LocalResolutionSystem> {
        match self.read(name, path)? {
            Document::Lrs(l) => Ok(l),
            other => bail!("{}: expected an lrs file, found `{}`", path.display(), other.kind()),
        }
    }

    /// The quadrangle in a file, or the axiom failure recorded in the report.
    fn quadrangle(&mut self, name: &str, path: &Path) -> Result<Option<Quadrangle>> {
        let inc = self.incidence(name, path)?;
        match Quadrangle::new(inc) {
            Ok(gq) => {
                self.report.set("gq.params", gq.params());
                Ok(Some(gq))
            }
            Err(e) => {
                self.report.set("gq.valid", false);
                self.report.set("gq.axiom", e.axiom());
                self.report.set("gq.witness", &e);
                Ok(None)
            }
        }
    }

    fn emit(&mut self, name: &str, out: Option<&Path>, text: &str) -> Result<()> {
        match out {
            Some(path) => {
                fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
                self.report.set(format!("output.{name}"), path.display());
            }
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                self.stdout_used = true;
            }
        }
        Ok(())
    }

    fn emit_all(&mut self, dir: &Path, stem: &str, texts: &[String]) -> Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for (i, text) in texts.iter().enumerate() {
            let path = dir.join(format!("{stem}-{i:04}.txt"));
            fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        }
        self.report.set(format!("output.{stem}_dir"), dir.display());
        Ok(())
    }

    fn correspondence_failure(&mut self, e: CorrespondenceError) -> Result<Outcome> {
        if let CorrespondenceError::Internal(_) = e {
            bail!(e);
        }
        self.report.set("error", e);
        Ok(Outcome::Failed)
    }

    fn roundtrip(&mut self, rt: RoundTrip) -> Outcome {
        self.report.set("roundtrip.holds", rt.holds);
        if let Some(m) = rt.mismatch {
            self.report.set("roundtrip.mismatch", m);
        }
        if rt.holds {
            Outcome::Success
        } else {
            Outcome::Failed
        }
    }
}

fn construct(
    run: &mut Run,
    family: Family,
    q: u32,
    lambda: Option<usize>,
    with_lrs: bool,
    out: Option<&Path>,
    lrs_out: Option<&Path>,
) -> Result<Outcome> {
    if (lambda.is_some() || with_lrs) && !matches!(family, Family::Sprott) {
        bail!("--lambda and --with-lrs apply to the sprott family only");
    }
    run.report.set("construct.q", q);
    let text = match family {
        Family::W | Family::Q4 | Family::H3 => {
            let (name, inc) = match family {
                Family::W => ("W", build_w(q)),
                Family::Q4 => ("Q4", build_q4(q)),
                _ => ("H3", build_h3(q)),
            };
            let inc = inc.map_err(|e: GeometryError| anyhow!(e))?;
            run.report.set("construct.family", name);
            let params = verify_gq(&inc).map_err(|e| anyhow!("construction failed to verify: {e}"))?;
            run.report.set("gq.params", params);
            run.report.set("gq.points", inc.point_count());
            run.report.set("gq.lines", inc.line_count());
            formats::print_incidence(&inc)
        }
        Family::AG => {
            let d = affine_plane(q)?;
            run.report.set("construct.family", "AG");
            run.report.set("design.params", verify_balance(&d)?);
            formats::print_design(&d)
        }
        Family::Sprott => {
            let (p, a) = prime_power(q).ok_or_else(|| anyhow!("q = {q} is not a prime power"))?;
            let k = lambda.unwrap_or(q as usize + 2);
            run.report.set("construct.family", "sprott");
            run.report.set("construct.field_order", (q as u64).pow(2));
            run.report.set("construct.lambda", k);
            let d = if with_lrs {
                if k != q as usize + 2 {
                    bail!("--with-lrs needs --lambda {} (q + 2)", q + 2);
                }
                let path = lrs_out.ok_or_else(|| anyhow!("--with-lrs needs --lrs-out"))?;
                let (sd, lrs) = sprott_lrs(q)?;
                verify_lrs(&sd.design, &lrs).map_err(|e| anyhow!("construction failed to verify: {e}"))?;
                verify_non_triangular(&sd.design, &lrs).map_err(|e| anyhow!("construction is triangular: {e}"))?;
                run.report.set("lrs.non_triangular", true);
                run.emit("lrs", Some(path), &formats::print_lrs(&lrs))?;
                sd.design
            } else {
                sprott_design(p, 2 * a, k)?.design
            };
            run.report.set("design.params", verify_bibd(&d).map_err(|e| anyhow!("construction failed: {e}"))?);
            formats::print_design(&d)
        }
    };
    run.emit("main", out, &text)?;
    Ok(Outcome::Success)
}

fn verify(run: &mut Run, what: &Verify) -> Result<Outcome> {
    let ok = match what {
        Verify::Gq { file } => match run.quadrangle("file", file)? {
            Some(gq) => {
                run.report.set("gq.valid", true);
                run.report.set("gq.points", gq.point_count());
                run.report.set("gq.lines", gq.structure().line_count());
                true
            }
            None => false,
        },
        Verify::Bibd { file } => {
            let d = run.design("file", file)?;
            match verify_bibd(&d) {
                Ok(params) => {
                    run.report.set("bibd.valid", true);
                    run.report.set("bibd.params", params);
                    true
                }
                Err(e) => {
                    run.report.set("bibd.valid", false);
                    if let Some(params) = e.degenerate_params() {
                        run.report.set("bibd.params", params);
                    }
                    run.report.set("bibd.witness", e);
                    false
                }
            }
        }
        Verify::Ovoid { gq, ovoid } => {
            let Some(gq) = run.quadrangle("gq", gq)? else { return Ok(Outcome::Failed) };
            let o = run.ovoid("ovoid", ovoid)?;
            let result = verify_ovoid(&gq, &o);
            run.report.set("ovoid.valid", result.is_ok());
            if let Err(e) = result {
                run.report.set("ovoid.witness", e);
                false
            } else {
                run.report.set("ovoid.size", o.len());
                true
            }
        }
        Verify::Lrs { design, lrs } | Verify::Ntlrs { design, lrs } => {
            let d = run.design("design", design)?;
            let l = run.lrs("lrs", lrs)?;
            let valid = verify_lrs(&d, &l);
            run.report.set("lrs.valid", valid.is_ok());
            if let Err(e) = valid {
                run.report.set("lrs.witness", e);
                false
            } else if matches!(what, Verify::Ntlrs { .. }) {
                let nt = verify_non_triangular(&d, &l);
                run.report.set("lrs.non_triangular", nt.is_ok());
                if let Err(w) = nt {
                    run.report.set("lrs.triangle", w);
                }
                if let Ok(params) = verify_bibd(&d) {
                    run.report.set("bibd.params", params);
                }
                nt.is_ok()
            } else {
                true
            }
        }
    };
    Ok(if ok { Outcome::Success } else { Outcome::Failed })
}

fn ovoids(run: &mut Run, gq: &Path, out: Option<&Path>, out_dir: Option<&Path>) -> Result<Outcome> {
    let Some(gq) = run.quadrangle("gq", gq)? else { return Ok(Outcome::Failed) };
    let found = find_ovoids(&gq, run.limit, run.budget.clone());
    run.report.set("search.status", format!("{:?}", found.status));
    run.report.set("search.exhausted", found.exhausted());
    run.report.set("search.nodes", found.nodes);
    run.report.set("ovoids.found", found.solutions.len());
    if let Some(o) = found.solutions.first() {
        run.report.set("ovoids.size", o.len());
        if let Some(path) = out {
            run.emit("ovoid", Some(path), &formats::print_ovoid(o))?;
        }
    }
    if let Some(dir) = out_dir {
        let texts: Vec<String> = found.solutions.iter().map(formats::print_ovoid).collect();
        run.emit_all(dir, "ovoid", &texts)?;
    }
    Ok(Outcome::from_search(found.status, found.solutions.len()))
}

fn map_n(run: &mut Run, gq: &Path, ovoid: &Path, design_out: &Path, lrs_out: &Path) -> Result<Outcome> {
    let Some(gq) = run.quadrangle("gq", gq)? else { return Ok(Outcome::Failed) };
    let o = run.ovoid("ovoid", ovoid)?;
    let out = match nu(&gq, &o, run.allow_degenerate) {
        Ok(out) => out,
        Err(e) => return run.correspondence_failure(e),
    };
    run.report.set("design.params", out.params);
    run.report.set("lrs.non_triangular", true);
    run.emit("design", Some(design_out), &formats::print_design(&out.design))?;
    run.emit("lrs", Some(lrs_out), &formats::print_lrs(&out.lrs))?;
    Ok(Outcome::Success)
}

fn map_m(run: &mut Run, design: &Path, lrs: &Path, inc_out: &Path, ovoid_out: &Path) -> Result<Outcome> {
    let d = run.design("design", design)?;
    let l = run.lrs("lrs", lrs)?;
    let out = match mu(&d, &l, run.allow_degenerate) {
        Ok(out) => out,
        Err(e) => return run.correspondence_failure(e),
    };
    run.report.set("gq.params", out.gq.params());
    run.report.set("ovoid.size", out.ovoid.len());
    run.emit("inc", Some(inc_out), &formats::print_incidence(out.gq.structure()))?;
    run.emit("ovoid", Some(ovoid_out), &formats::print_ovoid(&out.ovoid))?;
    Ok(Outcome::Success)
}

fn ntlrs(run: &mut Run, design: &Path, out: Option<&Path>, out_dir: Option<&Path>) -> Result<Outcome> {
    let d = run.design("design", design)?;
    let opts = NtlrsOptions { limit: run.limit, budget: run.budget.clone(), seed: run.seed, threads: run.threads };
    run.report.set("search.seed", run.seed);
    run.report.set("search.threads", run.threads);
    let found = find_ntlrs(&d, &opts);
    run.report.set("search.status", format!("{:?}", found.status));
    run.report.set("search.exhausted", found.exhausted());
    run.report.set("search.nodes", found.nodes);
    run.report.set("ntlrs.found", found.solutions.len());
    // Isomorphism classes of the quadrangles the systems produce.
    let digests: Option<BTreeSet<String>> = found
        .solutions
        .iter()
        .map(|l| {
            mu(&d, l, run.allow_degenerate).ok().map(|m| {
                let g = ColoredIncidenceGraph::from_structure(m.gq.structure());
                canonical_form(&g).certificate.digest()
            })
        })
        .collect();
    if let Some(digests) = digests.filter(|s| !s.is_empty()) {
        run.report.set("ntlrs.gq_isomorphism_classes", digests.len());
    }
    if let (Some(path), Some(l)) = (out, found.solutions.first()) {
        run.emit("lrs", Some(path), &formats::print_lrs(l))?;
    }
    if let Some(dir) = out_dir {
        let texts: Vec<String> = found.solutions.iter().map(formats::print_lrs).collect();
        run.emit_all(dir, "lrs", &texts)?;
    }
    Ok(Outcome::from_search(found.status, found.solutions.len()))
}

fn colored(run: &mut Run, name: &str, file: &Path, ovoid: Option<&Path>) -> Result<ColoredIncidenceGraph> {
    let g = match run.read(name, file)? {
        Document::Incidence(s) => ColoredIncidenceGraph::from_structure(&s),
        Document::Design(d) => ColoredIncidenceGraph::from_design(&d),
        other => bail!("{}: cannot canonicalize a `{}` file", file.display(), other.kind()),
    };
    match ovoid {
        Some(path) => {
            let o = run.ovoid(&format!("{name}.ovoid"), path)?;
            if let Some(&x) = o.points().iter().find(|&&x| x >= g.point_count()) {
                bail!("{}: point {x} out of range", path.display());
            }
            Ok(g.with_ovoid(&o))
        }
        None => Ok(g),
    }
}

fn dispatch(run: &mut Run, command: &Command) -> Result<Outcome> {
    match command {
        Command::Construct { family, q, lambda, with_lrs, out, lrs_out } => {
            construct(run, *family, *q, *lambda, *with_lrs, out.as_deref(), lrs_out.as_deref())
        }
        Command::Verify { what } => verify(run, what),
        Command::Ovoids { gq, out, out_dir } => ovoids(run, gq, out.as_deref(), out_dir.as_deref()),
        Command::MapN { gq, ovoid, design_out, lrs_out } => map_n(run, gq, ovoid, design_out, lrs_out),
        Command::MapM { design, lrs, inc_out, ovoid_out } => map_m(run, design, lrs, inc_out, ovoid_out),
        Command::Ntlrs { design, out, out_dir } => ntlrs(run, design, out.as_deref(), out_dir.as_deref()),
        Command::Dual { file, out } => {
            let inc = run.incidence("file", file)?;
            let dual = inc.dual();
            run.report.set("dual.points", dual.point_count());
            run.report.set("dual.lines", dual.line_count());
            run.emit("inc", out.as_deref(), &formats::print_incidence(&dual))?;
            Ok(Outcome::Success)
        }
        Command::Payne { file, point, out } => {
            let Some(gq) = run.quadrangle("file", file)? else { return Ok(Outcome::Failed) };
            match payne_derivation(&gq, *point) {
                Ok(inc) => {
                    let params = verify_gq(&inc).map_err(|e| anyhow!("derivation failed to verify: {e}"))?;
                    run.report.set("payne.params", params);
                    run.report.set("payne.points", inc.point_count());
                    run.report.set("payne.lines", inc.line_count());
                    run.emit("inc", out.as_deref(), &formats::print_incidence(&inc))?;
                    Ok(Outcome::Success)
                }
                Err(e @ (GeometryError::NotRegular { .. } | GeometryError::NotOrderQ { .. })) => {
                    run.report.set("error", e);
                    Ok(Outcome::Failed)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Canon { file, ovoid } => {
            let g = colored(run, "file", file, ovoid.as_deref())?;
            run.report.set("canon.points", g.point_count());
            run.report.set("canon.lines", g.line_count());
            run.report.set("canon.digest", canonical_form(&g).certificate.digest());
            Ok(Outcome::Success)
        }
        Command::Iso { a, b, ovoid_a, ovoid_b } => {
            let ga = colored(run, "a", a, ovoid_a.as_deref())?;
            let gb = colored(run, "b", b, ovoid_b.as_deref())?;
            run.report.set("canon.a.digest", canonical_form(&ga).certificate.digest());
            run.report.set("canon.b.digest", canonical_form(&gb).certificate.digest());
            let iso = are_isomorphic(&ga, &gb).filter(|iso| check_isomorphism(&ga, &gb, iso));
            run.report.set("isomorphic", iso.is_some());
            if let Some(iso) = &iso {
                let map: Vec<String> = iso.point_map.iter().map(usize::to_string).collect();
                run.report.set("iso.point_map", map.join(" "));
            }
            Ok(if iso.is_some() { Outcome::Success } else { Outcome::Failed })
        }
        Command::Roundtrip { from: Roundtrip::Gq { gq, ovoid } } => {
            let Some(gq) = run.quadrangle("gq", gq)? else { return Ok(Outcome::Failed) };
            let o = run.ovoid("ovoid", ovoid)?;
            match roundtrip_gq(&gq, &o, run.allow_degenerate) {
                Ok(rt) => Ok(run.roundtrip(rt)),
                Err(e) => run.correspondence_failure(e),
            }
        }
        Command::Roundtrip { from: Roundtrip::Design { design, lrs } } => {
            let d = run.design("design", design)?;
            let l = run.lrs("lrs", lrs)?;
            match roundtrip_design(&d, &l, run.allow_degenerate) {
                Ok(rt) => Ok(run.roundtrip(rt)),
                Err(e) => run.correspondence_failure(e),
            }
        }
        Command::Prop32 { gq, ovoid } => {
            let Some(gq) = run.quadrangle("gq", gq)? else { return Ok(Outcome::Failed) };
            let o = run.ovoid("ovoid", ovoid)?;
            let r = match check_prop32(&gq, &o) {
                Ok(r) => r,
                Err(e) => return run.correspondence_failure(e),
            };
            run.report.set("prop32.holds", r.holds);
            if let Some(x) = r.failing_point {
                run.report.set("prop32.failing_point", x);
            }
            run.report.set("prop32.distinct_blocks", r.multiplicities.len());
            let mults: BTreeSet<usize> = r.multiplicities.values().copied().collect();
            let mults: Vec<String> = mults.iter().map(usize::to_string).collect();
            run.report.set("prop32.multiplicities", mults.join(" "));
            run.report.set("prop32.multiplicity_ok", r.multiplicity_ok);
            run.report.set("prop32.blocks_are_traces", r.blocks_are_traces);
            let ok = r.holds && r.multiplicity_ok && r.blocks_are_traces;
            Ok(if ok { Outcome::Success } else { Outcome::Failed })
        }
        Command::Replicated { design, out } => {
            let d = run.design("design", design)?;
            match check_replicated(&d) {
                Some((base, copies)) => {
                    run.report.set("replicated", true);
                    run.report.set("replicated.copies", copies);
                    run.report.set("replicated.base_blocks", base.block_count());
                    if let Ok(params) = verify_balance(&base) {
                        run.report.set("replicated.base_params", params);
                    }
                    if let Some(path) = out {
                        run.emit("design", Some(path), &formats::print_design(&base))?;
                    }
                    Ok(Outcome::Success)
                }
                None => {
                    run.report.set("replicated", false);
                    Ok(Outcome::Failed)
                }
            }
        }
    }
}

fn budget(seconds: Option<f64>) -> Result<Budget> {
    match seconds {
        None => Ok(Budget::unlimited()),
        Some(s) if s.is_finite() && s >= 0.0 => Ok(Budget::unlimited().with_time(Duration::from_secs_f64(s))),
        Some(s) => bail!("--budget must be a non-negative number of seconds, got {s}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut run = Run {
        report: Report::default(),
        stdout_used: false,
        budget: Budget::unlimited(),
        limit: cli.limit,
        threads: cli.threads.max(1),
        seed: cli.seed,
        allow_degenerate: cli.allow_degenerate,
    };
    let args: Vec<String> = std::env::args().skip(1).collect();
    run.report.set("command", args.join(" "));
    let result = budget(cli.budget).and_then(|b| {
        run.budget = b;
        dispatch(&mut run, &cli.command)
    });
    let code = match result {
        Ok(outcome) => {
            run.report.set("status", outcome.label());
            outcome.code()
        }
        Err(e) => {
            run.report.set("status", "error");
            run.report.set("error", format!("{e:#}"));
            eprintln!("error: {e:#}");
            2
        }
    };
    run.report.set("elapsed_ms", start.elapsed().as_millis());
    let human = if run.stdout_used || code == 2 {
        run.report.human(&mut std::io::stderr())
    } else {
        run.report.human(&mut std::io::stdout())
    };
    if human.is_err() {
        return ExitCode::from(2);
    }
    if let Some(path) = &cli.report {
        if let Err(e) = fs::write(path, run.report.machine()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
