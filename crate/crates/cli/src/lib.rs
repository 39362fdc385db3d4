//! Command-line front end for building towers, browsing the Galois tree and
//! checking sentences against its finite levels.

pub mod params;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qbar_core::galois_tree;
use qbar_core::model_check::{existential_theory, witness_stages, SnapshotKind, WitnessRun};
use qbar_core::{
    classify, eval_finite, extend_tower, parse, FieldElement, Formula, GaloisTree, PathPrefix, QPoly, SearchOutcome,
    TheoryVerdict, Tower, VerdictRecord,
};

use params::{parse_selector, ParamBuilder};

pub const DEFAULT_TOWER: &str = "qbar-tower.json";

/// Exit status for errors raised while running a command.
pub const EXIT_ERROR: i32 = 3;
/// Exit status for malformed command lines.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "qbar", version, about = "Number-field towers, their Galois tree, and bounded model checking")]
pub struct Cli {
    /// Tower cache file.
    #[arg(long, global = true, default_value = DEFAULT_TOWER)]
    pub tower: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Record,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create, extend or describe the cached tower.
    #[command(subcommand)]
    Tower(TowerCmd),
    /// List or draw levels of the Galois tree.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Group operations on nodes given as `level:index`.
    #[command(subcommand)]
    Aut(AutCmd),
    /// Parse a sentence and print its canonical form and classes.
    Formula { sentence: String },
    /// Evaluate, search or decide a sentence.
    #[command(subcommand)]
    Check(CheckCmd),
}

#[derive(Debug, Subcommand)]
pub enum TowerCmd {
    /// Start over from the rationals.
    Build,
    /// Adjoin the roots of a polynomial irreducible over Q, e.g. "x^2-2".
    Extend { poly: String },
    Show,
}

#[derive(Debug, Subcommand)]
pub enum TreeCmd {
    List {
        level: usize,
    },
    Dot {
        /// Deepest level drawn; defaults to the tower height.
        #[arg(long)]
        max_level: Option<usize>,
        /// Label edges with the image of the generator.
        #[arg(long)]
        annotate: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum AutCmd {
    Compose { f: String, g: String },
    Invert { f: String },
    /// Apply a node to an element written as a polynomial in `z`.
    Apply { f: String, element: String },
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub sentence: String,
    /// Level to check up to; defaults to the tower height.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Parameter paths, e.g. `a0=leftmost,a1=1:0/2:3` or `square:random`.
    #[arg(long)]
    pub params: Vec<String>,
    /// Seed for `random` parameter paths.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum CheckCmd {
    /// Truth in the finite group at the given depth.
    Eval(CheckArgs),
    /// Stage construction followed by a search for a witness chain.
    Witness(CheckArgs),
    /// Print every stage of the construction.
    Stages(CheckArgs),
    /// Bounded decision for existential and universal sentences.
    Theory(CheckArgs),
}

pub struct Workspace {
    pub tower_path: PathBuf,
    pub tower: Tower,
    pub config: Config,
}

pub struct Config {
    pub max_depth: usize,
    pub schedule: Vec<String>,
}

impl Workspace {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read {} (run `qbar tower build` first)", path.display()))?;
        let tower = Tower::from_json(&text).with_context(|| format!("invalid tower cache {}", path.display()))?;
        Ok(Self::with_tower(path, tower))
    }

    fn with_tower(path: &Path, tower: Tower) -> Self {
        let config = Config {
            max_depth: tower.height(),
            schedule: tower
                .levels()
                .iter()
                .filter_map(|l| l.generator_used.as_ref().map(|g| g.to_string()))
                .collect(),
        };
        Self {
            tower_path: path.to_path_buf(),
            tower,
            config,
        }
    }

    pub fn save(&self) -> Result<()> {
        fs::write(&self.tower_path, self.tower.to_json())
            .with_context(|| format!("cannot write {}", self.tower_path.display()))
    }
}

/// Runs a parsed command, writing the report to `out`; returns the exit status.
pub fn run(cli: &Cli, out: &mut String) -> Result<i32> {
    match &cli.command {
        Command::Tower(cmd) => tower_cmd(cli, cmd, out),
        Command::Tree(cmd) => {
            let ws = Workspace::load(&cli.tower)?;
            let tree = GaloisTree::new(&ws.tower)?;
            tree_cmd(&tree, cmd, out)
        }
        Command::Aut(cmd) => {
            let ws = Workspace::load(&cli.tower)?;
            let tree = GaloisTree::new(&ws.tower)?;
            aut_cmd(&tree, cmd, out)
        }
        Command::Formula { sentence } => {
            let f = parse(sentence)?;
            writeln!(out, "{f}")?;
            let tags: Vec<String> = classify(&f).iter().map(|c| c.to_string()).collect();
            writeln!(out, "classes: {}", tags.join(", "))?;
            Ok(0)
        }
        Command::Check(cmd) => {
            let ws = Workspace::load(&cli.tower)?;
            let tree = GaloisTree::new(&ws.tower)?;
            check_cmd(&ws, &tree, cmd, cli.format, out)
        }
    }
}

fn tower_cmd(cli: &Cli, cmd: &TowerCmd, out: &mut String) -> Result<i32> {
    match cmd {
        TowerCmd::Build => {
            let ws = Workspace::with_tower(&cli.tower, Tower::new());
            ws.save()?;
            writeln!(out, "degrees {:?}", ws.tower.degrees())?;
        }
        TowerCmd::Extend { poly } => {
            let mut ws = Workspace::load(&cli.tower)?;
            let p: QPoly = poly.parse().with_context(|| format!("cannot parse polynomial `{poly}`"))?;
            ws.tower = extend_tower(&ws.tower, &p)?;
            ws = Workspace::with_tower(&cli.tower, ws.tower);
            ws.save()?;
            writeln!(out, "degrees {:?}", ws.tower.degrees())?;
        }
        TowerCmd::Show => {
            let ws = Workspace::load(&cli.tower)?;
            let t = &ws.tower;
            writeln!(out, "tower {}", t.id())?;
            writeln!(out, "height {}", t.height())?;
            writeln!(out, "degrees {:?}", t.degrees())?;
            writeln!(out, "schedule [{}]", ws.config.schedule.join(", "))?;
            for (n, l) in t.levels().iter().enumerate() {
                write!(
                    out,
                    "level {n}: degree {}, minpoly {}, conjugates {}",
                    l.degree(),
                    l.minpoly_of_z(),
                    l.conjugates_of_z.len()
                )?;
                if n > 0 {
                    write!(out, ", z{} = {}", n - 1, l.embed_prev.display_in(&format!("z{n}")))?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(0)
}

fn tree_cmd(tree: &GaloisTree, cmd: &TreeCmd, out: &mut String) -> Result<i32> {
    match cmd {
        TreeCmd::List { level } => {
            let tab = tree.level(*level)?;
            for (i, node) in tab.nodes().iter().enumerate() {
                write!(out, "{level}:{i}  z{level} -> {}", node.image_of_z.display_in(&format!("z{level}")))?;
                if *level > 0 {
                    write!(out, "  parent {}:{}", level - 1, tree.parent(*level, i))?;
                }
                if i == tab.identity() {
                    write!(out, "  identity")?;
                }
                writeln!(out)?;
            }
        }
        TreeCmd::Dot { max_level, annotate } => {
            out.push_str(&tree.to_dot(max_level.unwrap_or(tree.height()), *annotate)?);
        }
    }
    Ok(0)
}

fn selector(tree: &GaloisTree, s: &str) -> Result<(usize, usize)> {
    let (n, i) = parse_selector(s)?;
    let size = tree.level(n)?.size();
    if i >= size {
        bail!("level {n} has {size} nodes; there is no node {n}:{i}");
    }
    Ok((n, i))
}

fn aut_cmd(tree: &GaloisTree, cmd: &AutCmd, out: &mut String) -> Result<i32> {
    match cmd {
        AutCmd::Compose { f, g } => {
            let (n, i) = selector(tree, f)?;
            let (m, j) = selector(tree, g)?;
            if n != m {
                return Err(qbar_core::Error::LevelMismatch { left: n, right: m }.into());
            }
            writeln!(out, "{n}:{}", tree.table(n).compose(i, j))?;
        }
        AutCmd::Invert { f } => {
            let (n, i) = selector(tree, f)?;
            writeln!(out, "{n}:{}", tree.table(n).invert(i))?;
        }
        AutCmd::Apply { f, element } => {
            let (n, i) = selector(tree, f)?;
            let field = tree.tower().field(n)?;
            let p = QPoly::parse_in(element, "z").with_context(|| format!("cannot parse element `{element}`"))?;
            let e: FieldElement = field.from_poly(&p);
            let node = &tree.table(n).nodes()[i];
            let image = galois_tree::apply(tree.tower(), node, &e)?;
            writeln!(out, "{}", image.display_in("z"))?;
        }
    }
    Ok(0)
}

struct Prepared {
    sentence: Formula,
    depth: usize,
    params: Vec<PathPrefix>,
}

fn prepare(tree: &GaloisTree, args: &CheckArgs) -> Result<Prepared> {
    let sentence = parse(&args.sentence)?;
    let depth = args.depth.unwrap_or(tree.height());
    tree.level(depth)?;
    let params = ParamBuilder::new(tree, depth, args.seed).list(&args.params)?;
    sentence.check_params(params.len())?;
    Ok(Prepared { sentence, depth, params })
}

fn chain_of(run: &WitnessRun) -> Option<Vec<Vec<usize>>> {
    match &run.outcome {
        SearchOutcome::WitnessPrefix(chain, _) => Some(chain.iter().map(|p| p.entries.clone()).collect()),
        _ => None,
    }
}

fn outcome_code(o: &SearchOutcome) -> (&'static str, i32) {
    match o {
        SearchOutcome::WitnessPrefix(..) => ("witness", 0),
        SearchOutcome::RefutedFinite(_) => ("refuted", 1),
        SearchOutcome::DepthExhausted(_) => ("exhausted", 2),
    }
}

fn tuple(entries: &[usize], level: usize) -> String {
    let parts: Vec<String> = entries.iter().map(|i| format!("{level}:{i}")).collect();
    format!("({})", parts.join(", "))
}

fn describe_outcome(run: &WitnessRun, out: &mut String) -> Result<()> {
    match &run.outcome {
        SearchOutcome::WitnessPrefix(chain, d) => {
            writeln!(out, "witness certified to depth {d}")?;
            for p in chain {
                writeln!(out, "  {}", tuple(&p.entries, p.level))?;
            }
        }
        SearchOutcome::RefutedFinite(n) => writeln!(out, "refuted: no candidate survives at stage {n}")?,
        SearchOutcome::DepthExhausted(n) => writeln!(out, "undecided: search reached level {n}")?,
    }
    if let Some(s0) = run.s0 {
        writeln!(out, "last reset at stage {s0}")?;
    }
    Ok(())
}

fn check_cmd(ws: &Workspace, tree: &GaloisTree, cmd: &CheckCmd, format: Format, out: &mut String) -> Result<i32> {
    let (args, kind) = match cmd {
        CheckCmd::Eval(a) => (a, 0),
        CheckCmd::Witness(a) => (a, 1),
        CheckCmd::Stages(a) => (a, 2),
        CheckCmd::Theory(a) => (a, 3),
    };
    let p = prepare(tree, args)?;
    let mut text = String::new();
    let mut record = VerdictRecord {
        sentence: p.sentence.to_string(),
        tower_id: ws.tower.id(),
        depth: p.depth,
        verdict: String::new(),
        witness: None,
        s0: None,
        reset_history: Vec::new(),
    };
    let code = match kind {
        0 => {
            let v = eval_finite(tree, &p.sentence, p.depth, &p.params)?;
            record.verdict = v.to_string();
            writeln!(text, "{v} at level {}", p.depth)?;
            if v {
                0
            } else {
                1
            }
        }
        1 | 2 => {
            let run = witness_stages(tree, &p.sentence, &p.params, p.depth)?;
            if kind == 2 {
                for st in &run.states {
                    match &st.gamma {
                        Some(g) => {
                            write!(
                                text,
                                "stage {}: anchor {} disjunct {}",
                                st.stage,
                                tuple(&g.entries, g.level),
                                st.disjunct_index.unwrap_or(0)
                            )?;
                            let sizes: Vec<String> = st
                                .snapshot
                                .iter()
                                .map(|l| {
                                    let tag = match l.kind {
                                        SnapshotKind::Prefix => "p",
                                        SnapshotKind::Satisfying => "s",
                                        SnapshotKind::Trivial => "t",
                                    };
                                    format!("{}{tag}", l.members.len())
                                })
                                .collect();
                            writeln!(text, " levels [{}]", sizes.join(" "))?;
                        }
                        None => writeln!(text, "stage {}: no anchor", st.stage)?,
                    }
                }
            }
            describe_outcome(&run, &mut text)?;
            let (verdict, code) = outcome_code(&run.outcome);
            record.verdict = verdict.into();
            record.witness = chain_of(&run);
            record.s0 = run.s0;
            record.reset_history = run.final_state().reset_history.clone();
            code
        }
        _ => {
            let v = existential_theory(tree, &p.sentence, &p.params, p.depth)?;
            let (verdict, code) = match v {
                TheoryVerdict::True => ("true", 0),
                TheoryVerdict::False => ("false", 1),
                TheoryVerdict::Unknown => ("unknown", 2),
            };
            record.verdict = verdict.into();
            writeln!(text, "{verdict} (evidence from levels 0..={})", p.depth)?;
            code
        }
    };
    if format == Format::Text {
        out.push_str(&text);
    }
    out.push_str(&record.to_json());
    out.push('\n');
    Ok(code)
}
