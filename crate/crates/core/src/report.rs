//! Claim-by-claim run reports for the `bistoch` binary.
//!
//! Each command returns a [`RunReport`]; the binary prints it as JSON on
//! stdout and a one-line-per-claim summary on stderr. Every pass/fail line
//! carries the residual or slack that decided it.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::birkhoff::{katz_block, katz_extreme_point, segment_point, KatzPartition, Permutation};
use crate::cp::{
    as_unitary_mixture, choi_distance, extract_schur, hermitian_kraus, map_properties, proposition4_pipeline,
    self_dual_part, symmetrize_mixture_2x2, KrausMap, MixedHermitianUnitary, PipelineStatus,
};
use crate::cut::{
    bgp_from_distribution, check_bgp, cut_membership, estimate_rho, rank_one_terms, CutMembership,
    RealCorrelationMatrix, MAX_CUT_N,
};
use crate::hull::{
    condition_crossing, estimate_lambda, estimate_lambda_n, necessary_conditions, paper_witnesses, witness_unitary_3,
};
use crate::linalg::{square_json, ComplexMatrix, RealMatrix};
use crate::{Error, Result};

pub const EQUALITY_TOL: f64 = 1e-9;
pub const IDENTITY_TOL: f64 = 1e-12;
pub const CHOI_TOL: f64 = 1e-10;
pub const MAX_LAMBDA_N: usize = 8;
/// Offset past `2/3` used by the rejection checks.
pub const REJECTION_STEP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimStatus {
    Pass,
    Fail,
    Bracket,
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimResult {
    pub id: String,
    pub status: ClaimStatus,
    pub values: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub results: Vec<ClaimResult>,
    pub certificates: BTreeMap<String, Value>,
    pub seed: u64,
    pub elapsed_ms: u64,
}

impl RunReport {
    fn new(command: &str, inputs: Value, seed: u64) -> Self {
        Self {
            command: command.into(),
            inputs,
            results: Vec::new(),
            certificates: BTreeMap::new(),
            seed,
            elapsed_ms: 0,
        }
    }

    fn push(&mut self, id: &str, status: ClaimStatus, values: Value) {
        let values = match values {
            Value::Object(map) => map.into_iter().collect(),
            other => BTreeMap::from([("value".to_string(), other)]),
        };
        self.results.push(ClaimResult { id: id.into(), status, values });
    }

    /// Pass iff `residual <= tol`.
    fn check_le(&mut self, id: &str, residual: f64, tol: f64) -> bool {
        let ok = residual <= tol;
        self.push(id, pass_fail(ok), json!({ "residual": residual, "tolerance": tol }));
        ok
    }

    fn certify<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.certificates.insert(name.into(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.status != ClaimStatus::Fail)
    }

    /// 0 when no claim failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn claim(&self, id: &str) -> Option<&ClaimResult> {
        self.results.iter().find(|r| r.id == id)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Human-readable lines for stderr.
    pub fn summary(&self) -> String {
        let mut out = format!("{} ({} ms)\n", self.command, self.elapsed_ms);
        for r in &self.results {
            let status = match r.status {
                ClaimStatus::Pass => "PASS",
                ClaimStatus::Fail => "FAIL",
                ClaimStatus::Bracket => "BRACKET",
                ClaimStatus::Info => "INFO",
            };
            let values: Vec<String> = r.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!("  [{status}] {}: {}\n", r.id, values.join(" ")));
        }
        out
    }
}

fn pass_fail(ok: bool) -> ClaimStatus {
    if ok {
        ClaimStatus::Pass
    } else {
        ClaimStatus::Fail
    }
}

fn timed(start: Instant, mut report: RunReport) -> RunReport {
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

/// The 3×3 witness, its image and the trace bound either side of `2/3`.
/// `tamper` perturbs one witness entry (negative control).
pub fn verify_lambda3(tamper: bool) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = RunReport::new("verify-lambda3", json!({ "tamper": tamper }), 0);
    let mut u = witness_unitary_3().matrix().clone();
    if tamper {
        let z = u.get(0, 1);
        u.set(0, 1, z + 1e-3);
    }
    let b3 = katz_block(3)?;
    let target = segment_point(&b3, 2.0 / 3.0)?;

    let hu_dev = u.hermitian_deviation().max(u.unitary_deviation());
    report.check_le("witness_is_hermitian_unitary", hu_dev, IDENTITY_TOL);
    let image_residual = u.abs_squared().max_abs_diff(target.matrix());
    report.check_le("witness_image_equals_segment_point", image_residual, IDENTITY_TOL);

    let at = necessary_conditions(&target);
    let slack = at[0].slack;
    report.push(
        "trace_bound_holds_at_two_thirds",
        pass_fail(slack.abs() <= IDENTITY_TOL),
        json!({ "trace": at[0].value, "slack": slack }),
    );
    let beyond = segment_point(&b3, 2.0 / 3.0 + REJECTION_STEP)?;
    let c = &necessary_conditions(&beyond)[0];
    report.push(
        "trace_bound_rejects_beyond_two_thirds",
        pass_fail(!c.satisfied && c.slack < 0.0),
        json!({ "k": 2.0 / 3.0 + REJECTION_STEP, "trace": c.value, "slack": c.slack }),
    );
    let (crossing, reason) = condition_crossing(&b3)?;
    report.push(
        "lambda3_bracket",
        ClaimStatus::Bracket,
        json!({ "lower": if image_residual <= IDENTITY_TOL { 2.0 / 3.0 } else { 0.0 }, "upper": crossing, "upper_reason": reason }),
    );
    report.certify("witness_unitary", &u)?;
    report.certify("segment_point", &target)?;
    Ok(timed(start, report))
}

/// The 4×4 decomposition `¼X + ¾Y` and the diagonal functional either side of `2/3`.
pub fn verify_lambda4() -> Result<RunReport> {
    let start = Instant::now();
    let mut report = RunReport::new("verify-lambda4", json!({}), 0);
    let witnesses = paper_witnesses(4)?;
    let find = |name: &str| witnesses.iter().find(|w| w.name == name).expect("witness present");
    let (x, y, combined) = (find("X"), find("Y"), find("quarter_X_plus_three_quarter_Y"));

    report.check_le("x_is_mean_of_pairing_images", x.reconstruct().max_abs_diff(x.matrix.matrix()), IDENTITY_TOL);
    report.check_le("y_is_image_of_witness_plus_one", y.reconstruct().max_abs_diff(y.matrix.matrix()), IDENTITY_TOL);
    let m = katz_extreme_point(&"3,1".parse()?, &Permutation::identity(4))?;
    let target = segment_point(&m, 2.0 / 3.0)?;
    let mix = x.matrix.matrix().lin_comb(0.25, y.matrix.matrix(), 0.75);
    report.check_le("quarter_x_three_quarter_y_is_segment_point", mix.max_abs_diff(target.matrix()), IDENTITY_TOL);
    report.check_le("combined_terms_reconstruct", combined.reconstruct().max_abs_diff(target.matrix()), IDENTITY_TOL);

    let at = necessary_conditions(&target);
    let tight = at.iter().map(|c| c.slack.abs()).fold(f64::INFINITY, f64::min);
    let min_slack = at.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
    report.push(
        "functional_tight_at_two_thirds",
        pass_fail(tight <= IDENTITY_TOL && min_slack >= -IDENTITY_TOL),
        json!({ "min_abs_slack": tight, "min_slack": min_slack }),
    );
    let beyond = necessary_conditions(&segment_point(&m, 2.0 / 3.0 + REJECTION_STEP)?);
    let worst = beyond.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
    report.push(
        "functional_rejects_beyond_two_thirds",
        pass_fail(worst < 0.0),
        json!({ "k": 2.0 / 3.0 + REJECTION_STEP, "min_slack": worst }),
    );
    let (crossing, reason) = condition_crossing(&m)?;
    report.push("lambda4_bracket", ClaimStatus::Bracket, json!({ "lower": 2.0 / 3.0, "upper": crossing, "upper_reason": reason }));
    report.certify("decomposition", combined)?;
    Ok(timed(start, report))
}

pub fn read_json_file<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// Parse a real correlation matrix given either as `{"n","entries"}` or as nested rows.
pub fn parse_correlation(text: &str) -> Result<RealCorrelationMatrix> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
    let matrix = if value.is_array() {
        serde_json::from_value::<RealMatrix>(value).map_err(|e| Error::Input(e.to_string()))?
    } else {
        square_json::deserialize(value).map_err(|e| Error::Input(e.to_string()))?
    };
    RealCorrelationMatrix::new(matrix)
}

pub fn cut_membership_report(c: &RealCorrelationMatrix, shrink: Option<f64>, tol: f64) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = RunReport::new("cut-membership", json!({ "n": c.n(), "shrink": shrink, "tol": tol }), 0);
    let target = match shrink {
        Some(t) => c.shrink(t)?,
        None => c.clone(),
    };
    match cut_membership(&target, tol)? {
        CutMembership::Infeasible { phase1_objective } => {
            report.push("membership", ClaimStatus::Info, json!({ "feasible": false, "phase1_objective": phase1_objective }));
        }
        CutMembership::Feasible { distribution, residual } => {
            report.push("membership", ClaimStatus::Info, json!({ "feasible": true, "moment_residual": residual }));
            let f = bgp_from_distribution(&distribution);
            let check = check_bgp(&f, &target, 10.0 * tol)?;
            report.push(
                "certificate_verifies",
                pass_fail(check.passed),
                json!({ "empty_set_error": check.empty_set_error, "pair_residual": check.pair_residual, "walsh_min": check.walsh_min }),
            );
            let recon = rank_one_terms(&distribution)
                .iter()
                .fold(RealMatrix::zeros(target.n(), target.n()), |acc, (w, m)| acc.lin_comb(1.0, m.matrix(), *w));
            report.check_le("rank_one_terms_reconstruct", recon.max_abs_diff(target.matrix()), 1e-8);
            report.certify("distribution", &distribution)?;
            report.certify("bgp", &f)?;
        }
    }
    report.certify("target", &target)?;
    Ok(timed(start, report))
}

/// λ of this segment for `n <= 4`: `2/3` when some block is odd of size at least 3, else 1.
fn known_lambda(p: &KatzPartition) -> Option<f64> {
    if p.n() > 4 {
        return None;
    }
    Some(if p.parts().iter().any(|&k| k >= 3) { 2.0 / 3.0 } else { 1.0 })
}

pub fn estimate_lambda_report(
    n: usize,
    partition: &KatzPartition,
    samples: usize,
    seed: u64,
    resolution: f64,
) -> Result<RunReport> {
    let start = Instant::now();
    if n > MAX_LAMBDA_N {
        return Err(Error::DimensionCap { n, cap: MAX_LAMBDA_N });
    }
    if partition.n() != n {
        return Err(Error::InvalidKatzBlock(partition.n()));
    }
    let mut report = RunReport::new(
        "estimate-lambda",
        json!({ "n": n, "partition": partition.to_string(), "samples": samples, "resolution": resolution }),
        seed,
    );
    let m = katz_extreme_point(partition, &Permutation::identity(n))?;
    let bracket = estimate_lambda(n, &m, samples, seed, resolution)?;
    report.push(
        "lambda_bracket",
        ClaimStatus::Bracket,
        json!({ "lower": bracket.lower, "upper": bracket.upper, "upper_reason": bracket.upper_reason, "generator_count": bracket.generator_count }),
    );
    if let Some(cert) = &bracket.certificate {
        let err = cert.reconstruction_error.unwrap_or(f64::INFINITY);
        report.check_le("lower_certificate_reconstructs", err, crate::hull::RECONSTRUCTION_TOL);
    }
    if let Some(lambda) = known_lambda(partition) {
        let ok = bracket.lower <= lambda + 1e-9 && lambda <= bracket.upper + 1e-9;
        report.push(
            "bracket_contains_known_value",
            pass_fail(ok),
            json!({ "expected": lambda, "lower": bracket.lower, "upper": bracket.upper }),
        );
    }
    report.certify("bracket", &bracket)?;
    Ok(timed(start, report))
}

pub fn pipeline_report(m: usize, q: usize, rho: f64) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = RunReport::new("pipeline", json!({ "m": m, "q": q, "rho": rho }), 0);
    let r = proposition4_pipeline(m, q, rho)?;
    report.check_le("shift_identity", r.shift_identity_residual, crate::cp::PIPELINE_SHIFT_TOL);
    match r.status {
        PipelineStatus::Infeasible => {
            report.push(
                "cut_lp_feasible",
                ClaimStatus::Info,
                json!({ "feasible": false, "phase1_objective": r.cut_phase1_objective }),
            );
        }
        PipelineStatus::Success | PipelineStatus::Failed => {
            let bgp = r.bgp_check.clone().expect("set on feasible runs");
            report.push(
                "cut_lp_feasible",
                pass_fail(bgp.passed),
                json!({ "feasible": true, "pair_residual": bgp.pair_residual, "walsh_min": bgp.walsh_min }),
            );
            report.check_le("delta_identity", r.delta_residual.unwrap_or(f64::INFINITY), crate::cp::PIPELINE_DELTA_TOL);
            report.check_le(
                "kraus_terms_hermitian_unitary",
                r.hermitian_unitary_deviation.unwrap_or(f64::INFINITY),
                crate::cp::PIPELINE_HU_TOL,
            );
            report.check_le("delta_is_image_mixture", r.hull_reconstruction_error.unwrap_or(f64::INFINITY), 1e-8);
            report.push(
                "necessary_conditions",
                pass_fail(r.necessary_conditions_hold == Some(true)),
                json!({ "hold": r.necessary_conditions_hold }),
            );
            report.certify("decomposition", &r.decomposition)?;
            report.certify("distribution", &r.distribution)?;
        }
    }
    report.certify("target", &r.target)?;
    Ok(timed(start, report))
}

/// Properties, Hermitian Kraus family and, for maps fixing the diagonal, the
/// cut-polytope test deciding whether a mixed Hermitian unitary form exists.
pub fn selfdual_report(phi: &KrausMap, tol: f64) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = RunReport::new("selfdual-check", json!({ "n": phi.n(), "terms": phi.len(), "tol": tol }), 0);
    let props = map_properties(phi, tol)?;
    report.push("map_properties", ClaimStatus::Info, serde_json::to_value(&props)?);
    report.push(
        "mixed_unitary_form",
        ClaimStatus::Info,
        json!({ "given_as_unitary_mixture": as_unitary_mixture(phi, tol).is_some() }),
    );
    if props.self_dual {
        let h = hermitian_kraus(phi, tol)?;
        let herm = h.terms().iter().map(|t| t.op.hermitian_deviation()).fold(0.0, f64::max);
        report.check_le("hermitian_kraus_operators_hermitian", herm, CHOI_TOL);
        report.check_le("hermitian_kraus_choi_equal", choi_distance(&h, phi), CHOI_TOL);
        report.certify("hermitian_kraus", &h)?;
    }
    if let Ok(c) = extract_schur(phi, tol) {
        report.certify("schur_matrix", &c)?;
        let real = c.max_imag() <= tol;
        let corr = if real { RealCorrelationMatrix::new(c.real_part()).ok() } else { None };
        match corr {
            Some(corr) if corr.n() <= MAX_CUT_N => {
                let verdict = cut_membership(&corr, tol)?;
                report.push(
                    "mixed_hermitian_unitary",
                    ClaimStatus::Info,
                    json!({ "schur_map": true, "possible": verdict.is_feasible(), "impossible": !verdict.is_feasible() }),
                );
                if let Some(d) = verdict.distribution() {
                    let mhu = MixedHermitianUnitary::from_cut_distribution(d)?;
                    report.check_le("mixed_hermitian_unitary_choi_equal", choi_distance(&mhu.to_kraus(), phi), 1e-8);
                    report.certify("mixed_hermitian_unitary", &mhu)?;
                }
            }
            _ => report.push("mixed_hermitian_unitary", ClaimStatus::Info, json!({ "schur_map": true, "real": real })),
        }
    }
    Ok(timed(start, report))
}

/// Input for `decompose-2x2`: a unitary matrix or a Kraus map.
pub fn parse_2x2_input(text: &str) -> Result<KrausMap> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
    if value.get("terms").is_some() {
        return serde_json::from_value(value).map_err(|e| Error::Input(e.to_string()));
    }
    let u: ComplexMatrix = serde_json::from_value(value).map_err(|e| Error::Input(e.to_string()))?;
    crate::cp::conjugation_map(&u)
}

pub fn decompose_2x2_report(phi: &KrausMap) -> Result<RunReport> {
    let start = Instant::now();
    if phi.n() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: phi.n() });
    }
    let mut report = RunReport::new("decompose-2x2", json!({ "terms": phi.len() }), 0);
    let target = self_dual_part(phi);
    match as_unitary_mixture(phi, EQUALITY_TOL) {
        Some(parts) => {
            let mhu = symmetrize_mixture_2x2(&parts)?;
            let hu = mhu.terms().iter().map(|(_, u)| u.matrix().hermitian_deviation().max(u.matrix().unitary_deviation()));
            report.check_le("terms_hermitian_unitary", hu.fold(0.0, f64::max), EQUALITY_TOL);
            report.check_le("choi_matches_symmetrized_map", choi_distance(&mhu.to_kraus(), &target), CHOI_TOL);
            let weights: Vec<f64> = mhu.terms().iter().map(|(w, _)| *w).collect();
            report.push("weights", ClaimStatus::Info, json!({ "p": weights }));
            report.certify("mixed_hermitian_unitary", &mhu)?;
        }
        None => {
            // only the Hermitian Kraus step is available for general input
            let h = hermitian_kraus(&target, EQUALITY_TOL)?;
            report.check_le("hermitian_kraus_choi_equal", choi_distance(&h, &target), CHOI_TOL);
            report.push("mixed_hermitian_unitary", ClaimStatus::Info, json!({ "synthesised": false }));
            report.certify("hermitian_kraus", &h)?;
        }
    }
    Ok(timed(start, report))
}

/// Brackets for `λ_n` and `ρ_{n,2}` side by side; equality is not asserted.
pub fn compare_conjecture_report(n: usize, samples: usize, seed: u64, resolution: f64) -> Result<RunReport> {
    let start = Instant::now();
    if n > MAX_LAMBDA_N {
        return Err(Error::DimensionCap { n, cap: MAX_LAMBDA_N });
    }
    let mut report = RunReport::new(
        "compare-conjecture",
        json!({ "n": n, "samples": samples, "resolution": resolution }),
        seed,
    );
    let (lo, hi) = estimate_lambda_n(n, samples, seed, resolution.max(1e-6))?;
    report.push("lambda_n_bracket", ClaimStatus::Bracket, json!({ "lower": lo, "upper": hi }));
    let rho = estimate_rho(n, 2, samples.min(20), seed, resolution)?;
    report.push("rho_n2_bracket", ClaimStatus::Bracket, json!({ "lower": rho.lower, "upper": rho.upper }));
    let overlap = lo.max(rho.lower) <= hi.min(rho.upper) + 1e-9;
    report.push("brackets_overlap", ClaimStatus::Info, json!({ "overlap": overlap }));
    Ok(timed(start, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strip_time(r: &RunReport) -> String {
        let mut r = r.clone();
        r.elapsed_ms = 0;
        r.to_json().unwrap()
    }

    #[test]
    fn lambda3_passes_and_tamper_fails() {
        let r = verify_lambda3(false).unwrap();
        assert!(r.passed(), "{}", r.summary());
        let t = verify_lambda3(true).unwrap();
        assert_eq!(t.exit_code(), 1);
        let c = t.claim("witness_image_equals_segment_point").unwrap();
        assert_eq!(c.status, ClaimStatus::Fail);
        assert!(c.values["residual"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn lambda4_passes() {
        let r = verify_lambda4().unwrap();
        assert!(r.passed(), "{}", r.summary());
    }

    #[test]
    fn cut_membership_reports() {
        let c3 = crate::cut::cosine_correlation(3).unwrap();
        let r = cut_membership_report(&c3, None, 1e-9).unwrap();
        assert_eq!(r.claim("membership").unwrap().values["feasible"], json!(false));
        let r = cut_membership_report(&c3, Some(0.5), 1e-9).unwrap();
        assert_eq!(r.claim("membership").unwrap().values["feasible"], json!(true));
        assert!(r.passed());
        assert!(r.certificates.contains_key("bgp"));
    }

    #[test]
    fn estimate_lambda_reports() {
        let r = estimate_lambda_report(3, &"3".parse().unwrap(), 20, 1, 1e-3).unwrap();
        assert!(r.passed(), "{}", r.summary());
        let b = &r.claim("lambda_bracket").unwrap().values;
        assert!(b["lower"].as_f64().unwrap() >= 0.66);
        assert!(b["upper"].as_f64().unwrap() <= 0.6667);
        let r = estimate_lambda_report(2, &"2".parse().unwrap(), 5, 1, 1e-3).unwrap();
        let b = &r.claim("lambda_bracket").unwrap().values;
        assert_eq!((b["lower"].as_f64().unwrap(), b["upper"].as_f64().unwrap()), (1.0, 1.0));
        assert!(matches!(estimate_lambda_report(9, &"9".parse().unwrap(), 1, 1, 1e-3), Err(Error::DimensionCap { .. })));
    }

    #[test]
    fn deterministic_by_seed() {
        let a = estimate_lambda_report(4, &"3,1".parse().unwrap(), 10, 42, 1e-3).unwrap();
        let b = estimate_lambda_report(4, &"3,1".parse().unwrap(), 10, 42, 1e-3).unwrap();
        assert_eq!(strip_time(&a), strip_time(&b));
    }

    #[test]
    fn pipeline_and_selfdual_reports() {
        assert!(pipeline_report(3, 2, 0.5).unwrap().passed());
        let r = pipeline_report(3, 1, 1.0).unwrap();
        assert!(r.passed());
        assert_eq!(r.claim("cut_lp_feasible").unwrap().values["feasible"], json!(false));

        let c3 = crate::cut::cosine_correlation(3).unwrap();
        let phi = crate::cp::schur_map(&c3.matrix().to_complex()).unwrap();
        let r = selfdual_report(&phi, 1e-9).unwrap();
        assert!(r.passed(), "{}", r.summary());
        let v = &r.claim("mixed_hermitian_unitary").unwrap().values;
        assert_eq!(v["impossible"], json!(true));
    }

    #[test]
    fn decompose_2x2_diag_i_one() {
        let phi = parse_2x2_input(r#"{"n":2,"entries":[[0,1],[0,0],[0,0],[1,0]]}"#).unwrap();
        let r = decompose_2x2_report(&phi).unwrap();
        assert!(r.passed(), "{}", r.summary());
        let p = r.claim("weights").unwrap().values["p"][0].as_f64().unwrap();
        assert!((p - 0.5).abs() < 1e-15);
    }
}
