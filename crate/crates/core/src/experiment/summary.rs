use std::fmt::Write as _;

use crate::analysis::CheckReport;

/// Human-readable name of the result a check confronts.
pub fn result_label(check: &str) -> &'static str {
    match check {
        "efron" => "Efron identity",
        "extended_efron" => "Extended Efron inequality",
        "margin_transfer" => "Margin transfer to missing volume",
        "hausdorff_domination" => "Symmetric difference vs Hausdorff",
        "projection_density" => "Projected-ball density bound",
        "deviation_tail" => "Exponential deviation tail",
        "rate_missing_mass" => "Missing-mass rate",
        "rate_Vn" => "Missing-volume rate",
        "rate_Rn" => "Vertex-count rate",
        "affine_invariance" => "Affine invariance",
        "worst_case_uniform" => "Uniform law is worst case for R_n",
        _ => "Other",
    }
}

/// Pass/fail matrix over the given reports.
pub fn report_summary(reports: &[CheckReport]) -> String {
    if reports.is_empty() {
        return "no checks requested\n".to_string();
    }
    let rows: Vec<[String; 4]> = reports
        .iter()
        .map(|r| {
            let detail = match r.first_failure().or(r.rows.first()) {
                Some(row) => format!(
                    "{}: {:.6} vs {:.6} (n={}, q={})",
                    row.label, row.estimate, row.bound_or_target, row.n, row.q
                ),
                None => String::new(),
            };
            [
                result_label(&r.check_name).to_string(),
                r.check_name.clone(),
                if r.pass { "PASS" } else { "FAIL" }.to_string(),
                detail,
            ]
        })
        .collect();
    let header = ["result", "check", "status", "statistic"];
    let widths: Vec<usize> =
        (0..3).map(|i| rows.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0)).collect();
    let mut out = String::new();
    let line = |out: &mut String, cells: [&str; 4]| {
        let _ = writeln!(
            out,
            "{:<w0$}  {:<w1$}  {:<w2$}  {}",
            cells[0],
            cells[1],
            cells[2],
            cells[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2]
        );
    };
    line(&mut out, header);
    for r in &rows {
        line(&mut out, [&r[0], &r[1], &r[2], &r[3]]);
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    let _ = writeln!(out, "{passed}/{} checks passed", reports.len());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::ReportRow;
    use crate::sampling::RngStream;

    fn report(name: &str, pass: bool) -> CheckReport {
        let mut r = CheckReport::new(name, RngStream::new(1, 0));
        r.row(ReportRow {
            label: "x".into(),
            n: 10,
            q: 1.0,
            estimate: 0.5,
            stderr: 0.1,
            bound_or_target: 0.4,
            pass,
            reps: 3,
        });
        r
    }

    #[test]
    fn empty_summary() {
        assert_eq!(report_summary(&[]), "no checks requested\n");
    }

    #[test]
    fn failures_are_flagged() {
        let s = report_summary(&[report("efron", true), report("rate_Vn", false)]);
        assert!(s.contains("Efron identity") && s.contains("PASS"));
        assert!(s.lines().any(|l| l.contains("rate_Vn") && l.contains("FAIL") && l.contains("0.5")));
        assert!(s.contains("1/2 checks passed"));
    }
}
