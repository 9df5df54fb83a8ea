use super::pairing::MethodValue;

/// One computed method entry inside a report.
#[derive(Clone, Debug)]
pub struct ReportRow {
    pub model: String,
    pub class: String,
    pub method: String,
    pub value_re: f64,
    pub value_im: f64,
    pub rounded: i64,
    pub gap: f64,
    pub tolerance: f64,
    pub runtime_ms: u128,
    pub diagnostics: String,
}

/// Aggregated per-run index report: per-method values, rounding gaps and the
/// agreement verdict.
#[derive(Clone, Debug, Default)]
pub struct IndexReport {
    pub rows: Vec<ReportRow>,
}

impl IndexReport {
    pub fn push(
        &mut self,
        model: &str,
        class: &str,
        method: &str,
        value: &MethodValue,
        tolerance: f64,
        runtime_ms: u128,
    ) {
        self.rows.push(ReportRow {
            model: model.to_string(),
            class: class.to_string(),
            method: method.to_string(),
            value_re: value.value.re,
            value_im: value.value.im,
            rounded: value.rounded,
            gap: value.gap,
            tolerance,
            runtime_ms,
            diagnostics: value.diagnostics.clone(),
        });
    }

    /// true iff every computed method rounds to the same integer and every
    /// gap stays below its tolerance.
    pub fn verdict(&self) -> bool {
        if self.rows.is_empty() {
            return true;
        }
        let first = self.rows[0].rounded;
        self.rows.iter().all(|r| r.rounded == first && r.gap <= r.tolerance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    #[test]
    fn verdict_logic() {
        let mut rep = IndexReport::default();
        assert!(rep.verdict());
        let v1 = MethodValue::from_complex(C64::new(-0.98, 0.001), "a".into());
        rep.push("m", "c", "one", &v1, 0.1, 3);
        let v2 = MethodValue::from_int(-1, "b".into());
        rep.push("m", "c", "two", &v2, 0.1, 4);
        assert!(rep.verdict());
        let v3 = MethodValue::from_int(2, "c".into());
        rep.push("m", "c", "three", &v3, 0.1, 5);
        assert!(!rep.verdict());
    }
}
