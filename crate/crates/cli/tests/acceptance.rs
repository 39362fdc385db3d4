//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{tower, Gen, Oracle, Shape};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use qbar_core::galois_tree;
use qbar_core::model_check::{existential_theory, transfer_check, witness_stages, StageConstruction};
use qbar_core::{
    eval_finite, parse, FieldElement, Formula, GaloisTree, PathPrefix, ProductNode, QPoly, SearchOutcome,
    SubtreeSpec, TheoryVerdict, Tower,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Numeric agreement when matching complex roots.
const ROOT_TOL: f64 = 1e-6;
/// Distance from an integer allowed for numerically expanded coefficients.
const COEFF_TOL: f64 = 1e-9;
const SEED: u64 = 20240611;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn to_c(q: &qbar_core::Rational) -> Complex64 {
    Complex64::new(q.to_f64().unwrap(), 0.0)
}

/// All complex roots of a monic polynomial by Durand-Kerner iteration.
fn roots(p: &QPoly) -> Vec<Complex64> {
    let c: Vec<Complex64> = p.coeffs().iter().map(to_c).collect();
    let d = c.len() - 1;
    let bound = 1.0 + c[..d].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..d).map(|k| seed.powu(k as u32) * bound / 2.0).collect();
    let eval = |x: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * x + a);
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn at(e: &FieldElement, r: Complex64) -> Complex64 {
    e.coords.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * r + to_c(a))
}

/// Every conjugate, evaluated at one numeric root, lands on a distinct root.
fn numeric_conjugates_ok(t: &Tower, n: usize) -> Result<(), String> {
    let level = t.level(n).unwrap();
    let rs = roots(level.minpoly_of_z());
    let r0 = rs[0];
    let mut used = vec![false; rs.len()];
    for c in &level.conjugates_of_z {
        let v = at(c, r0);
        let hit = rs
            .iter()
            .enumerate()
            .find(|(k, r)| !used[*k] && (**r - v).norm() < ROOT_TOL * (1.0 + r.norm()));
        match hit {
            Some((k, _)) => used[k] = true,
            None => return Err(format!("level {n}: conjugate {c:?} is not a fresh root")),
        }
    }
    ensure(used.iter().all(|u| *u), || format!("level {n}: some root has no conjugate"))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let t = tower(&["x^2-2", "x^2-3", "x^2-5"]);
    let tree = GaloisTree::new(&t).unwrap();
    let elapsed = start.elapsed();
    let sizes: Vec<usize> = (0..=3).map(|n| tree.size(n)).collect();
    ensure(sizes == [1, 2, 4, 8], || format!("sizes {sizes:?}"))?;
    for n in 0..3 {
        for i in 0..tree.size(n) {
            ensure(tree.children(n, i).len() == 2, || format!("node {n}:{i} has {} children", tree.children(n, i).len()))?;
        }
    }
    t.validate().map_err(|e| e.to_string())?;
    for n in 0..=3 {
        ensure(t.level(n).unwrap().conjugates_of_z.len() == t.level(n).unwrap().degree(), || {
            format!("level {n} is not normal")
        })?;
        if n > 0 {
            numeric_conjugates_ok(&t, n)?;
        }
    }
    ensure(elapsed < Duration::from_secs(5), || format!("build took {elapsed:?}"))?;
    Ok(format!("sizes {sizes:?}, build {:.2} s", elapsed.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let t = tower(&["x^2-2", "x^2-3"]);
    let m = t.level(2).unwrap().minpoly_of_z().clone();
    // expand the product of x - (±√2 ± √3) numerically
    let (a, b) = (2f64.sqrt(), 3f64.sqrt());
    let mut poly = vec![1.0f64];
    for r in [a + b, a - b, -a + b, -a - b] {
        let mut next = vec![0.0; poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= r * c;
        }
        poly = next;
    }
    let mut rounded = Vec::new();
    for c in &poly {
        ensure((c - c.round()).abs() < COEFF_TOL, || format!("coefficient {c} is not integral"))?;
        rounded.push(c.round() as i64);
    }
    let oracle = QPoly::from_ints(&rounded);
    ensure(m == oracle, || format!("got {m}, oracle {oracle}"))?;
    ensure(m == QPoly::from_ints(&[1, 0, -10, 0, 1]), || format!("got {m}"))?;
    Ok(format!("minimal polynomial {m}"))
}

fn criterion_3() -> Outcome {
    let mut checked = 0usize;
    for schedule in [&["x^2-2", "x^2-3", "x^2-5"][..], &["x^3-2"][..], &["x^4-2"][..]] {
        let t = tower(schedule);
        let tree = GaloisTree::new(&t).unwrap();
        let oracle = Oracle::new(&t, t.height());
        for n in 0..=t.height() {
            let tab = tree.table(n);
            let k = tab.size();
            if k > 16 {
                continue;
            }
            let e = tab.identity();
            ensure(e == oracle.identity[n], || format!("{schedule:?} level {n}: identity"))?;
            for a in 0..k {
                ensure(tab.compose(e, a) == a && tab.compose(a, e) == a, || "identity law".into())?;
                ensure(tab.compose(a, tab.invert(a)) == e && tab.compose(tab.invert(a), a) == e, || {
                    "inverse law".into()
                })?;
                for b in 0..k {
                    let ab = tab.compose(a, b);
                    ensure(ab == oracle.mul[n][a][b], || format!("{schedule:?} level {n}: {a}*{b} disagrees"))?;
                    for c in 0..k {
                        ensure(tab.compose(ab, c) == tab.compose(a, tab.compose(b, c)), || {
                            format!("{schedule:?} level {n}: associativity at {a},{b},{c}")
                        })?;
                    }
                    for m in 0..n {
                        let lhs = tree.restrict(n, ab, m);
                        let rhs = tree.table(m).compose(tree.restrict(n, a, m), tree.restrict(n, b, m));
                        ensure(lhs == rhs, || format!("{schedule:?}: restriction {n}->{m} not multiplicative"))?;
                    }
                }
                for m in 0..n {
                    let field = galois_tree::restrict(&t, &tab.nodes()[a], m).unwrap();
                    ensure(tree.index_of(&field).unwrap() == tree.restrict(n, a, m), || {
                        format!("{schedule:?}: cached restriction of {n}:{a} to {m}")
                    })?;
                    ensure(
                        tree.restrict(n, tab.invert(a), m) == tree.table(m).invert(tree.restrict(n, a, m)),
                        || "restriction does not commute with inverse".into(),
                    )?;
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} levels across 3 schedules"))
}

fn strip_first_block(f: &Formula) -> (Vec<String>, Formula) {
    let mut vars = Vec::new();
    let mut cur = f;
    let first = matches!(f, Formula::Exists(..));
    loop {
        match cur {
            Formula::Exists(v, g) if first => {
                vars.push(v.clone());
                cur = g;
            }
            Formula::Forall(v, g) if !first => {
                vars.push(v.clone());
                cur = g;
            }
            _ => return (vars, cur.clone()),
        }
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(SEED) };
    let towers = [
        tower(&["x^2-2", "x^2-3"]),
        tower(&["x^2-2", "x^2-3", "x^2-5"]),
        tower(&["x^3-2"]),
        tower(&["x^4-2"]),
    ];
    let mut sentences = 0;
    let mut violations = Vec::new();
    for round in 0..15 {
        for t in &towers {
            let tree = GaloisTree::new(t).unwrap();
            let oracle = Oracle::new(t, t.height());
            let shape = Shape {
                positive: true,
                blocks: 1 + round % 2,
                params: round % 3,
            };
            let f = g.sentence(&shape);
            let params: Vec<PathPrefix> = (0..shape.params).map(|_| g.path(&tree, t.height())).collect();
            sentences += 1;
            let values: Vec<bool> = (0..=t.height()).map(|n| oracle.eval(&f, n, &params)).collect();
            if values.windows(2).any(|w| w[1] && !w[0]) {
                violations.push(format!("persistence (oracle): {f}"));
            }
            if !transfer_check(&tree, &f, &params, t.height()).unwrap() {
                violations.push(format!("persistence: {f}"));
            }
            let (vars, body) = strip_first_block(&f);
            if vars.is_empty() {
                continue;
            }
            let spec = SubtreeSpec::new(body.clone(), vars.clone(), params.clone()).unwrap();
            if !qbar_core::model_check::check_subtree_closure(&tree, &spec, t.height()).unwrap() {
                violations.push(format!("closure: {f}"));
            }
            // the same closure property, checked by the oracle
            for n in 1..=t.height() {
                for m in spec.members(&tree, n).unwrap() {
                    let up = m.restrict(&tree, n - 1);
                    let mut env: HashMap<String, usize> =
                        vars.iter().cloned().zip(up.entries.iter().copied()).collect();
                    let p: Vec<usize> = params.iter().map(|a| a.at(n - 1)).collect();
                    if !oracle.holds(&body, n - 1, &mut env, &p) {
                        violations.push(format!("closure (oracle): {f}"));
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(sentences >= 50, || format!("only {sentences} sentences"))?;
    ensure(violations.is_empty(), || format!("{} violations, first {}", violations.len(), violations[0]))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{sentences} positive sentences, 0 violations, {:.2} s", elapsed.as_secs_f64()))
}

fn criterion_5() -> Outcome {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(SEED + 5) };
    let towers = [
        tower(&["x^2-2", "x^2-3"]),
        tower(&["x^2-2", "x^2-3", "x^2-5"]),
        tower(&["x^3-2"]),
        tower(&["x^4-2"]),
    ];
    let trees: Vec<GaloisTree> = towers.iter().map(|t| GaloisTree::new(t).unwrap()).collect();
    let oracles: Vec<Oracle> = towers.iter().map(|t| Oracle::new(t, t.height())).collect();
    let mut trues = 0;
    for k in 0..200 {
        let which = k % towers.len();
        let (t, tree, oracle) = (&towers[which], &trees[which], &oracles[which]);
        let n = (k / towers.len()) % (t.height() + 1);
        if tree.size(n) > 8 {
            return Err(format!("level {n} has more than 8 elements"));
        }
        let shape = Shape {
            positive: false,
            blocks: k % 3,
            params: (k / 3) % 3,
        };
        let f = g.sentence(&shape);
        let params: Vec<PathPrefix> = (0..shape.params).map(|_| g.path(tree, t.height())).collect();
        let lib = eval_finite(tree, &f, n, &params).map_err(|e| e.to_string())?;
        let want = oracle.eval(&f, n, &params);
        ensure(lib == want, || format!("disagree on `{f}` at level {n}: {lib} vs {want}"))?;
        trues += lib as usize;
    }
    Ok(format!("200 sentences agree ({trues} true)"))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let t = tower(&["x^2-2", "x^4-2", "x^2-3"]);
    let tree = GaloisTree::new(&t).unwrap();
    let oracle = Oracle::new(&t, 3);
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(SEED + 6) };
    let f = parse("exists G. G*G = a0").unwrap();
    let mut nontrivial = 0;
    for _ in 0..10 {
        let h = g.path(&tree, 3);
        let a0 = PathPrefix::new(&tree, (0..=3).map(|n| oracle.mul[n][h.at(n)][h.at(n)]).collect()).unwrap();
        nontrivial += (a0.at(3) != oracle.identity[3]) as usize;
        let run = witness_stages(&tree, &f, std::slice::from_ref(&a0), 3).map_err(|e| e.to_string())?;
        let SearchOutcome::WitnessPrefix(chain, 3) = &run.outcome else {
            return Err(format!("no witness for h = {:?}: {:?}", h.indices(), run.outcome));
        };
        for (n, node) in chain.iter().enumerate() {
            let gi = node.entries[0];
            ensure(node.level == n && oracle.mul[n][gi][gi] == a0.at(n), || {
                format!("g*g != a0 at level {n} for h = {:?}", h.indices())
            })?;
            if n > 0 {
                let field = galois_tree::restrict(&t, &oracle.nodes[n][gi], n - 1).unwrap();
                ensure(field == oracle.nodes[n - 1][chain[n - 1].entries[0]], || "chain is not a path".into())?;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("10 paths ({nontrivial} with nontrivial square), {:.2} s", elapsed.as_secs_f64()))
}

fn criterion_7() -> Outcome {
    let t = tower(&["x^2-2", "x^4-2", "x^2-3"]);
    let tree = GaloisTree::new(&t).unwrap();
    let oracle = Oracle::new(&t, 3);
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(SEED + 7) };
    let left = PathPrefix::leftmost(&tree, 3).unwrap();
    let r1 = g.path(&tree, 3);
    let r2 = g.path(&tree, 3);
    let r3 = g.path(&tree, 3);
    let sq = PathPrefix::new(&tree, (0..=3).map(|n| oracle.mul[n][r3.at(n)][r3.at(n)]).collect()).unwrap();
    let cases: Vec<(&str, Vec<PathPrefix>)> = vec![
        ("exists G. forall H. G*H = H*G", vec![]),
        ("exists G. forall H. (~(G = e) & G*H = H*G)", vec![]),
        ("exists G. (~(G = e) & G*G = e)", vec![]),
        ("exists G1. exists G2. (~(G1 = G2) & G1*G2 = G2*G1)", vec![]),
        ("exists G. forall H. (~(G = a0) & G*H = H*G)", vec![left.clone()]),
        ("exists G. (~(G = a0) & ~(G = a1))", vec![r1.clone(), r2.clone()]),
        ("exists G1. exists G2. (~(G1 = e) & ~(G2 = e) & ~(G1 = G2))", vec![]),
        ("exists G. G*G = a0", vec![sq]),
        ("exists G. forall H. (~(G*a0 = e) & G*H*G^-1 = H)", vec![r1]),
        ("exists G. forall H. (~(G = e) & H*H*G = G*H*H)", vec![]),
    ];
    let mut s0s = Vec::new();
    for (text, params) in &cases {
        let psi = parse(text).unwrap();
        ensure(oracle.eval(&psi, 3, params), || format!("`{text}` is false at level 3"))?;
        let c = StageConstruction::sigma2(&tree, &psi, params, 3).map_err(|e| e.to_string())?;
        let states = c.run(3).map_err(|e| e.to_string())?;
        let last = states.last().unwrap();
        let gamma = last.gamma.clone().ok_or_else(|| format!("`{text}`: no anchor at the last stage"))?;
        let s0 = *last.reset_history.last().ok_or_else(|| format!("`{text}`: no reset recorded"))?;
        ensure(s0 <= 3, || format!("`{text}`: s0 = {s0}"))?;
        s0s.push(s0);
        // a replaced anchor never comes back
        let seq: Vec<_> = states.iter().map(|s| (s.gamma.clone(), s.disjunct_index)).collect();
        for i in 0..seq.len() {
            for j in i + 1..seq.len() {
                if seq[i].0.is_some() && seq[j] == seq[i] && seq[i + 1..j].iter().any(|x| *x != seq[i]) {
                    return Err(format!("`{text}`: anchor returns at stage {j}"));
                }
            }
        }
        // the direct definition of the witness subtree above the anchor
        let (vars, body) = strip_first_block(&psi);
        let (vars, body) = if matches!(psi, Formula::Exists(..)) { (vars, body) } else { (vec![], psi.clone()) };
        for n in 0..=3 {
            let level = &last.snapshot[n];
            let want: Vec<ProductNode> = if n <= gamma.level {
                vec![gamma.restrict(&tree, n)]
            } else {
                qbar_core::galois_tree::level_tuples(&tree, n, vars.len())
                    .into_iter()
                    .filter(|d| d.extends(&tree, &gamma))
                    .filter(|d| {
                        let mut env: HashMap<String, usize> =
                            vars.iter().cloned().zip(d.entries.iter().copied()).collect();
                        let p: Vec<usize> = params.iter().map(|a| a.at(n)).collect();
                        oracle.holds(&body, n, &mut env, &p)
                    })
                    .collect()
            };
            ensure(level.members == want, || format!("`{text}`: snapshot differs at level {n}"))?;
        }
    }
    Ok(format!("10 sentences stable, s0 = {s0s:?}"))
}

fn criterion_8() -> Outcome {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(SEED + 8) };
    let towers = [tower(&["x^2-2", "x^2-3"]), tower(&["x^2-2", "x^2-3", "x^2-5"])];
    let mut counts = [0usize; 3];
    for (ti, t) in towers.iter().enumerate() {
        let tree = GaloisTree::new(t).unwrap();
        let oracle = Oracle::new(t, t.height());
        let d = t.height();
        for k in 0..120 {
            let shape = Shape {
                positive: false,
                blocks: 1,
                params: k % 3,
            };
            let f = g.sentence(&shape);
            let params: Vec<PathPrefix> = (0..shape.params).map(|_| g.path(&tree, d)).collect();
            let v = existential_theory(&tree, &f, &params, d).map_err(|e| format!("{f}: {e}"))?;
            let truth = oracle.eval(&f, d, &params);
            match v {
                TheoryVerdict::True => ensure(truth, || format!("false True on `{f}` (tower {ti})"))?,
                TheoryVerdict::False => ensure(!truth, || format!("false False on `{f}` (tower {ti})"))?,
                TheoryVerdict::Unknown => {}
            }
            counts[match v {
                TheoryVerdict::True => 0,
                TheoryVerdict::False => 1,
                TheoryVerdict::Unknown => 2,
            }] += 1;
        }
    }
    ensure(counts[0] > 0 && counts[1] > 0, || format!("corpus decides too little: {counts:?}"))?;
    Ok(format!("true {}, false {}, unknown {}; no disagreement", counts[0], counts[1], counts[2]))
}

fn qbar(dir: &Path, args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_qbar"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("run qbar");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn cli_session(dir: &Path) -> (Vec<(i32, Vec<u8>)>, Vec<u8>) {
    let script: Vec<Vec<&str>> = vec![
        vec!["tower", "build"],
        vec!["tower", "extend", "x^2-2"],
        vec!["tower", "extend", "x^4-2"],
        vec!["tower", "show"],
        vec!["tree", "list", "2"],
        vec!["tree", "dot", "--annotate"],
        vec!["aut", "compose", "2:3", "2:5"],
        vec!["aut", "apply", "2:3", "z^3 - 1/2*z"],
        vec!["check", "eval", "exists G1. exists G2. ~(G1=G2)", "--depth", "1"],
        vec!["--format", "record", "check", "witness", "exists G. G*G = a0", "--params", "a0=square:random", "--seed", "11"],
        vec!["check", "stages", "exists G. forall H. (~(G = a0) & G*H = H*G)", "--params", "leftmost"],
        vec!["check", "theory", "forall G. G=e", "--depth", "1"],
    ];
    let outputs = script.iter().map(|a| qbar(dir, a)).collect();
    (outputs, std::fs::read(dir.join(qbar_cli::DEFAULT_TOWER)).unwrap())
}

fn criterion_9() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (out_a, file_a) = cli_session(a.path());
    let (out_b, file_b) = cli_session(b.path());
    for (i, (x, y)) in out_a.iter().zip(&out_b).enumerate() {
        ensure(x == y, || format!("command {i} differs between runs"))?;
        ensure(x.0 <= 1, || format!("command {i} exited with {}", x.0))?;
    }
    ensure(file_a == file_b, || "tower files differ".into())?;
    let text = String::from_utf8(file_a.clone()).unwrap();
    let reloaded = Tower::from_json(&text).map_err(|e| e.to_string())?;
    ensure(reloaded.to_json().as_bytes() == file_a.as_slice(), || "cache does not round-trip".into())?;
    let (code, _) = qbar(a.path(), &["tower", "show"]);
    ensure(code == 0 && std::fs::read(a.path().join(qbar_cli::DEFAULT_TOWER)).unwrap() == file_a, || {
        "show modified the cache".into()
    })?;
    Ok(format!("{} commands byte-identical, {} byte cache round-trips", out_a.len(), file_a.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("tower correctness", criterion_1),
        ("primitive element", criterion_2),
        ("group and restriction laws", criterion_3),
        ("persistence corpus", criterion_4),
        ("oracle equivalence", criterion_5),
        ("square-root witness", criterion_6),
        ("stage stabilization", criterion_7),
        ("bounded decisions", criterion_8),
        ("cli determinism and cache", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("acceptance {} {name}: PASS ({detail}) [{secs:.2} s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("acceptance {} {name}: FAIL ({why}) [{secs:.2} s]", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
