//! Acceptance criteria, one line each.
//!
//! Runs without libtest so every line is printed. Pass `--ignored` to include
//! the slow tier and the known-bad pinned literal; any other argument filters
//! by substring.

use dworklab::arith::{PadicModulus, Rational, Ring};
use dworklab::cy::{
    alpha3_ratio, canonical_coordinate, frobenius_lambda0, p_integral, preset_family,
    preset_operator, quintic_period_oracle, standard_solutions, yukawa_and_instantons,
};
use dworklab::harness::{curve_poly, run_suite, JobSpec, Suite};
use dworklab::hasse_witt::{lambda_unit_root, newton_polytope, Precision};
use dworklab::laurent::FrobeniusLift;
use dworklab::par::Execution;
use dworklab::polytope::OpenSubset;
use num_bigint::BigInt;
use std::time::{Duration, Instant};

type Check = fn() -> Result<String, String>;

struct Criterion {
    id: &'static str,
    name: &'static str,
    budget: Duration,
    ignored: bool,
    check: Check,
}

const EXEC: Execution = Execution::Parallel;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn int(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

fn suite(s: Suite) -> Result<String, String> {
    let report = run_suite(s, &JobSpec::for_suite(s), EXEC).map_err(|e| e.to_string())?;
    if let Some(c) = report.failures().next() {
        return Err(format!(
            "{}: {}",
            report.summary(),
            serde_json::to_string(c).unwrap()
        ));
    }
    ensure(report.passed(), report.summary())?;
    Ok(report.summary())
}

fn quintic_golden() -> Result<String, String> {
    let op = preset_operator("quintic", 4).map_err(|e| e.to_string())?;
    let sols = standard_solutions(&op, 20).map_err(|e| e.to_string())?;
    let mirror = canonical_coordinate(&sols, 20).map_err(|e| e.to_string())?;
    let inst = yukawa_and_instantons(&sols, &mirror, 4).map_err(|e| e.to_string())?;
    let y = inst.yukawa.coeffs();
    ensure(
        y[0] == int(1) && y[1] == int(575) && y[2] == int(975375),
        format!("Y = {:?}", &y[..3]),
    )?;
    let golden = [2875i64, 609250, 317206375, 242467530000];
    for (d, (n, g)) in inst.numbers.iter().zip(golden).enumerate() {
        ensure(
            n * int(5) == int(g),
            format!("5N_{} = {}", d + 1, n * int(5)),
        )?;
    }
    Ok("Y = 1 + 575q + 975375q², 5N_1..4 exact".into())
}

fn quintic_f0() -> Result<String, String> {
    let op = preset_operator("quintic", 4).map_err(|e| e.to_string())?;
    let sols = standard_solutions(&op, 20).map_err(|e| e.to_string())?;
    let f0 = sols[0].components[0].coeffs();
    ensure(f0[..3] == [int(1), int(120), int(113400)], "F_0 head")?;
    let oracle = quintic_period_oracle(20);
    for (k, (a, b)) in f0.iter().zip(oracle.coeffs()).enumerate() {
        ensure(
            *a == Rational::from_integer(b.clone()),
            format!("t^{k}: {a} vs {b}"),
        )?;
    }
    Ok("F_0 = Σ (5n)!/n!⁵ tⁿ to t^20".into())
}

fn asd() -> Result<String, String> {
    let summary = suite(Suite::Asd)?;
    let lam = pinned_lambda()?;
    // Hensel lift of the unit root 3 of X² + 2X + 5 mod 5
    ensure(lam == 13, format!("Λ = {lam} mod 25"))?;
    Ok(format!("{summary}; Λ ≡ 13 mod 25 for (−1,0), p = 5"))
}

fn pinned_lambda() -> Result<i64, String> {
    let f = curve_poly(-1, 0);
    let mu = OpenSubset::interior(&newton_polytope(&f).map_err(|e| e.to_string())?);
    let lam = lambda_unit_root(
        &f,
        &mu,
        5,
        &FrobeniusLift::Identity,
        2,
        Precision::new(5, 2),
    )
    .map_err(|e| e.to_string())?;
    let v = lam.at_zero().get(0, 0).value().clone();
    Ok(i64::try_from(v).expect("small"))
}

fn pinned_literal() -> Result<String, String> {
    let lam = pinned_lambda()?;
    ensure(
        lam == 23,
        format!("Λ = {lam} mod 25; 23 is not a root of X² + 2X + 5 mod 25"),
    )?;
    Ok("Λ ≡ 23 mod 25".into())
}

fn lambda0_structure() -> Result<String, String> {
    let preset = preset_family("simplicial", 2).map_err(|e| e.to_string())?;
    let op = preset_operator("simplicial", 2).map_err(|e| e.to_string())?;
    for p in [5u64, 7] {
        let r = frobenius_lambda0(&preset, &op, p, 1, 10, EXEC).map_err(|e| e.to_string())?;
        ensure(r.constant, format!("p = {p}: Λ_0 not t-constant"))?;
        ensure(
            r.is_diagonal_mod(2) == Some(true),
            format!("p = {p}: Λ_0 ≢ diag(1, p) mod p²"),
        )?;
        let a1 = &r.alphas[0];
        ensure(
            a1.value.as_ref().is_some_and(|a| a.is_zero()),
            format!("p = {p}: α_1 = {:?}", a1.value),
        )?;
        ensure(
            r.ode_residual_ok,
            format!("p = {p}: Frobenius ODE residual"),
        )?;
    }
    Ok("Λ_0 ≡ diag(1, p), α_1 = 0, residual ≡ 0 mod (p², t^10)".into())
}

fn integrality() -> Result<String, String> {
    let op = preset_operator("quintic", 4).map_err(|e| e.to_string())?;
    let sols = standard_solutions(&op, 17).map_err(|e| e.to_string())?;
    let mirror = canonical_coordinate(&sols, 17).map_err(|e| e.to_string())?;
    let inst = yukawa_and_instantons(&sols, &mirror, 15).map_err(|e| e.to_string())?;
    ensure(inst.numbers.len() == 15, "N_1..N_15")?;
    for p in [7u64, 11, 13] {
        ensure(
            p_integral(mirror.q.coeffs(), p),
            format!("q(t) not {p}-integral"),
        )?;
        ensure(
            p_integral(&inst.numbers, p),
            format!("N_d not {p}-integral"),
        )?;
    }
    Ok("q(t) and N_1..N_15 are 7, 11, 13-integral".into())
}

fn alpha3() -> Result<String, String> {
    let simp = (
        preset_family("simplicial", 4).unwrap(),
        preset_operator("simplicial", 4).unwrap(),
    );
    let hyp = (
        preset_family("hyperoctahedral", 4).unwrap(),
        preset_operator("hyperoctahedral", 4).unwrap(),
    );
    let r = alpha3_ratio((&simp.0, &simp.1), (&hyp.0, &hyp.1), 7, 2, EXEC)
        .map_err(|e| e.to_string())?;
    let md = PadicModulus::new(7, 1).unwrap();
    // 24/25 ≡ 6 mod 7
    let expected = md.element(6);
    let ratio = r
        .ratio
        .ok_or("α_3 of the hyperoctahedral family is not a unit")?;
    ensure(ratio == expected, format!("ratio = {}", ratio.value()))?;
    Ok("α_3 ratio ≡ 24/25 mod 7".into())
}

fn criteria() -> Vec<Criterion> {
    let c = |id, name, secs, check| Criterion {
        id,
        name,
        budget: Duration::from_secs(secs),
        ignored: false,
        check,
    };
    let mut list = vec![
        c("1", "quintic golden values", 5, quintic_golden as Check),
        c("2", "quintic F_0", 5, quintic_f0),
        c("3", "hhw suite", 60, || suite(Suite::Hhw)),
        c("4", "asd suite", 60, asd),
        c("5", "dwork suite", 60, || suite(Suite::Dwork)),
        c("6", "gauss suite", 30, || suite(Suite::Gauss)),
        c("7", "super suite", 30, || suite(Suite::Super)),
        c("8", "zeta crosscheck", 60, || suite(Suite::Crosscheck)),
        c("9", "higher hasse-witt", 120, || suite(Suite::HigherHw)),
        c("10", "route equivalence", 120, || suite(Suite::Routes)),
        c("11", "lambda_0 structure", 600, lambda0_structure),
        c("12", "p-integrality", 10, integrality),
    ];
    list.push(Criterion {
        ignored: true,
        ..c("4*", "asd pinned literal 23", 60, pinned_literal)
    });
    list.push(Criterion {
        ignored: true,
        ..c("13", "alpha_3 ratio (slow tier)", 3600 * 4, alpha3)
    });
    list
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let with_ignored = args
        .iter()
        .any(|a| a == "--ignored" || a == "--include-ignored");
    let filters: Vec<&String> = args.iter().filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for c in criteria() {
        let label = format!("criterion {:<3} {}", c.id, c.name);
        if !filters.is_empty() && !filters.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        if c.ignored && !with_ignored {
            println!("{label:<40} ignored");
            continue;
        }
        let start = Instant::now();
        let result = (c.check)();
        let took = start.elapsed();
        let result = result.and_then(|msg| {
            ensure(
                took <= c.budget,
                format!("took {took:.1?}, budget {:?}", c.budget),
            )
            .map(|_| msg)
        });
        match result {
            Ok(msg) => println!("{label:<40} PASS ({:.2} s) {msg}", took.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("{label:<40} FAIL ({:.2} s) {msg}", took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
