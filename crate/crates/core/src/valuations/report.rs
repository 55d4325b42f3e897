use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::Serialize;

use super::{
    differential_verify_with, enumerate_definable, is_residue_real_closed, tower_depth,
    verify_thm_defblrcf, Checks, DifferentialConfig, Mismatch, Thm26Report,
};
use crate::convex::{
    convex_cuts_bounded, g_pn, is_dp_minimal, labels_of, max_divisible, max_p_divisible_map, n_p,
    n_p_map, non_definability_certificate, special_primes_for, Convention, ConvexCut, CutRule,
};
use crate::error::Result;
use crate::hahn::HahnField;
use crate::oag::{ComponentKind, LexWord, QuotientExponent};
use crate::primes::{nth_prime, prime_index, PrimeSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NpEntry {
    pub p: u64,
    pub n_p: QuotientExponent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NpPiece {
    pub primes: PrimeSet,
    pub n_p: QuotientExponent,
}

/// `n_p` at the display primes, and in closed form for every prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NpTable {
    pub display: Vec<NpEntry>,
    pub all_primes: Vec<NpPiece>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GpPiece {
    pub primes: PrimeSet,
    pub cut: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutStatus {
    Definable,
    NotDefinable,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutRow {
    pub cut: String,
    pub status: CutStatus,
    /// `(p,n)` labels realising the cut.
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DefinableRow {
    pub cut: String,
    pub labels: Vec<String>,
    pub formula: &'static str,
    /// The trivial valuation, `v_(p,n_p)`.
    pub trivial: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessRow {
    pub primes: PrimeSet,
    pub low: String,
    pub high: String,
    pub convention: Convention,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateRow {
    pub cut: String,
    pub witnesses: Vec<WitnessRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueFlag {
    pub cut: String,
    pub real_closed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DifferentialSummary {
    pub p: u64,
    pub n: u32,
    pub samples: usize,
    pub boundary: usize,
    /// Candidates per `forall` in the clause refutation, `0` when skipped.
    pub witness_samples: usize,
    pub refuted: usize,
    pub unrefuted: usize,
    pub mismatches: Vec<Mismatch>,
}

/// Everything known about the henselian valuations of `R((G))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub group: String,
    pub effective: bool,
    pub np_table: NpTable,
    pub g_p: Vec<GpPiece>,
    pub g0: String,
    pub cuts: Vec<CutRow>,
    pub definable: Vec<DefinableRow>,
    pub certificates: Vec<CertificateRow>,
    pub residue_flags: Vec<ResidueFlag>,
    pub thm26: Thm26Report,
    pub dp_minimal: bool,
    pub differential: Vec<DifferentialSummary>,
    pub notes: Vec<String>,
    /// Violations of a proven statement. Empty unless something is wrong.
    pub red_flags: Vec<String>,
}

impl ClassificationReport {
    /// No red flags and no differential mismatches.
    pub fn passed(&self) -> bool {
        self.red_flags.is_empty() && self.differential.iter().all(|d| d.mismatches.is_empty())
    }
}

/// `(p,n)`, `(3,0)`, `(p in {2,3},1..2)` and so on.
pub(crate) fn pn_label(primes: &PrimeSet, lo: u32, hi: u32) -> String {
    let p = match primes {
        s if s.is_all() => "p".to_string(),
        PrimeSet::Finite(s) if s.len() == 1 => s.first().unwrap().to_string(),
        s => format!("p in {s}"),
    };
    if lo == hi {
        format!("({p},{lo})")
    } else {
        format!("({p},{lo}..{hi})")
    }
}

/// Primes at which a closed-form answer is re-checked concretely.
fn probe_primes(w: &LexWord, cuts: &[ConvexCut], display: &[u64]) -> Vec<u64> {
    let mut s: BTreeSet<u64> = special_primes_for(w, cuts);
    s.extend(display);
    let past = s.iter().map(|&p| prime_index(p)).max().unwrap_or(0) + 3;
    s.insert(nth_prime(past));
    s.into_iter().collect()
}

/// Settings for [`classification_report_with`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportConfig {
    pub display_primes: Vec<u64>,
    /// Random series per differential run; `0` skips the runs.
    pub samples: usize,
    /// Candidates per `forall` when refuting clauses; `0`, the default,
    /// skips that step.
    pub witness_samples: usize,
    pub seed: u64,
    /// Precision of the series field, as a multiple of the leading unit.
    pub cutoff: i64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            display_primes: vec![2, 3, 5, 7],
            samples: 200,
            witness_samples: 0,
            seed: 42,
            cutoff: 8,
        }
    }
}

/// Assembles the classification of the henselian valuations of `R((G))`.
///
/// The differential suite runs for every display prime `p` and
/// `0 <= n <= n_p` when the group is effective and `samples > 0`.
///
/// ```
/// use arclab::oag::parse_group;
/// use arclab::valuations::classification_report;
/// let r = classification_report(&parse_group("lex(Z, Q)").unwrap(), &[2, 3], 0, 42).unwrap();
/// assert_eq!(r.certificates[0].cut, "Bottom");
/// assert!(r.passed());
/// ```
pub fn classification_report(
    w: &LexWord,
    display: &[u64],
    samples: usize,
    seed: u64,
) -> Result<ClassificationReport> {
    let cfg = ReportConfig {
        display_primes: display.to_vec(),
        samples,
        witness_samples: 0,
        seed,
        ..ReportConfig::default()
    };
    classification_report_with(w, &cfg)
}

pub fn classification_report_with(w: &LexWord, cfg: &ReportConfig) -> Result<ClassificationReport> {
    let (display, samples, seed) = (&cfg.display_primes[..], cfg.samples, cfg.seed);
    let mut red_flags = Vec::new();
    let mut notes = Vec::new();

    let np_table = NpTable {
        display: display
            .iter()
            .map(|&p| Ok(NpEntry { p, n_p: n_p(w, p)? }))
            .collect::<Result<_>>()?,
        all_primes: n_p_map(w)
            .partition()
            .into_iter()
            .map(|(primes, n_p)| NpPiece { primes, n_p })
            .collect(),
    };
    let g_p = max_p_divisible_map(w)
        .partition()
        .into_iter()
        .map(|(primes, rule)| GpPiece {
            primes,
            cut: rule.label(w),
        })
        .collect();
    let g0 = max_divisible(w);

    let chain = convex_cuts_bounded(w, tower_depth(display));
    let definable = enumerate_definable(w, display);
    let symbolic: Vec<_> = definable.iter().filter(|d| d.cut.is_none()).collect();

    let mut cuts = Vec::new();
    let mut certificates = Vec::new();
    let mut residue_flags = Vec::new();
    let probes = probe_primes(w, &chain, display);
    for &c in &chain {
        // symbolic tower families go right after the tower they live in
        for d in &symbolic {
            if let CutRule::TowerTail { seg } = d.rule {
                if c == ConvexCut::seg(seg + 1) {
                    let labels = d
                        .labels
                        .iter()
                        .map(|l| pn_label(&l.primes, l.n_lo, l.n_hi))
                        .collect();
                    cuts.push(CutRow {
                        cut: d.label(w),
                        status: CutStatus::Definable,
                        labels,
                    });
                }
            }
        }
        let name = c.label(w);
        let labels: Vec<String> = labels_of(w, c)
            .iter()
            .map(|(s, n)| pn_label(s, *n, *n))
            .collect();
        let cert = non_definability_certificate(w, c)?;
        let status = match (labels.is_empty(), &cert) {
            (false, None) => CutStatus::Definable,
            (true, Some(_)) => CutStatus::NotDefinable,
            (false, Some(_)) => {
                red_flags.push(format!(
                    "{name} is definable yet has a non-definability certificate"
                ));
                CutStatus::Undecided
            }
            (true, None) => {
                red_flags.push(format!(
                    "{name} is outside the definable image but has no certificate"
                ));
                CutStatus::Undecided
            }
        };
        if let Some(cert) = cert {
            for &p in &probes {
                if !cert.holds_at(w, p) {
                    red_flags.push(format!("certificate for {name} fails at p = {p}"));
                }
            }
            if cert
                .entries
                .iter()
                .any(|e| e.convention == Convention::BottomDivisible)
            {
                notes.push(format!(
                    "{name} is certified with the trivial subgroup as lower end of the witness (bottom_divisible convention)"
                ));
            }
            let witnesses = cert
                .entries
                .iter()
                .map(|e| WitnessRow {
                    primes: e.primes.clone(),
                    low: e.low.label(w),
                    high: e.high.label(w),
                    convention: e.convention,
                })
                .collect();
            certificates.push(CertificateRow {
                cut: name.clone(),
                witnesses,
            });
        }
        residue_flags.push(ResidueFlag {
            cut: name.clone(),
            real_closed: is_residue_real_closed(w, c)?,
        });
        cuts.push(CutRow {
            cut: name,
            status,
            labels,
        });
    }

    // v_0 is the coarsest valuation with real closed residue field
    let shallowest = chain
        .iter()
        .zip(&residue_flags)
        .find(|(_, f)| f.real_closed)
        .map(|(c, _)| *c);
    if shallowest != Some(g0) {
        red_flags.push(format!(
            "G_0 = {} is not the shallowest cut with divisible subgroup",
            g0.label(w)
        ));
    }

    let thm26 = verify_thm_defblrcf(w);
    if !thm26.consistent {
        red_flags.push("the three conditions for a definable valuation with real closed residue field disagree".into());
    }

    let mut differential = Vec::new();
    if !w.is_effective() {
        notes.push(
            "schematic group: elements cannot be sampled, so the differential checks are skipped"
                .into(),
        );
    } else if samples > 0 {
        let k = HahnField::new(w.clone(), cfg.cutoff)?;
        let witness_samples = cfg.witness_samples;
        for &p in display {
            let top = n_p(w, p)?.finite().unwrap_or(0);
            for n in 0..=top {
                // φ_p only needs checking once per prime
                let checks = if n == 0 { Checks::Both } else { Checks::PhiPn };
                let r = differential_verify_with(
                    &k,
                    p,
                    n,
                    DifferentialConfig {
                        samples,
                        seed,
                        witness_samples,
                        checks,
                    },
                )?;
                differential.push(DifferentialSummary {
                    p,
                    n,
                    samples,
                    boundary: r.boundary,
                    witness_samples,
                    refuted: r.refuted,
                    unrefuted: r.unrefuted,
                    mismatches: r.mismatches,
                });
            }
        }
    }

    if w.components.iter().any(ComponentKind::is_tower) {
        notes.push(
            "omega_tower is ordered lexicographically with its first summand most significant; this order is an assumption"
                .into(),
        );
    }
    if let Some(note) = rank_two_note(w, display)? {
        notes.push(note);
    }

    let definable = definable
        .iter()
        .map(|d| DefinableRow {
            cut: d.label(w),
            labels: d
                .labels
                .iter()
                .map(|l| pn_label(&l.primes, l.n_lo, l.n_hi))
                .collect(),
            formula: d.formula(),
            trivial: d.is_trivial(),
        })
        .collect();

    Ok(ClassificationReport {
        group: w.to_string(),
        effective: w.is_effective(),
        np_table,
        g_p,
        g0: g0.label(w),
        cuts,
        definable,
        certificates,
        residue_flags,
        thm26,
        dp_minimal: is_dp_minimal(w),
        differential,
        notes,
        red_flags,
    })
}

/// For a word with a rank-two real component the coincidences among
/// `v_(p,0)`, `v_(p,1)` and `v_(p,2)` are easy to misstate; print what the
/// computation gives.
fn rank_two_note(w: &LexWord, display: &[u64]) -> Result<Option<String>> {
    if !w
        .components
        .iter()
        .any(|c| matches!(c, ComponentKind::FreeReal(g) if g.len() == 2))
    {
        return Ok(None);
    }
    let mut rows: Vec<(u64, [ConvexCut; 3])> = Vec::new();
    for &p in display {
        rows.push((p, [g_pn(w, p, 0)?, g_pn(w, p, 1)?, g_pn(w, p, 2)?]));
    }
    let Some(&(_, first)) = rows.first() else {
        return Ok(None);
    };
    let uniform = rows.iter().all(|(_, r)| *r == first);
    let mut s = String::new();
    if uniform {
        let ps: Vec<String> = rows.iter().map(|(p, _)| p.to_string()).collect();
        let _ = write!(
            s,
            "at p in {{{}}}: G_(p,0) = {}, G_(p,1) = {}, G_(p,2) = {}",
            ps.join(","),
            first[0].label(w),
            first[1].label(w),
            first[2].label(w)
        );
    } else {
        for (p, r) in &rows {
            let _ = write!(
                s,
                "p = {p}: G_(p,0..2) = {}, {}, {}; ",
                r[0].label(w),
                r[1].label(w),
                r[2].label(w)
            );
        }
    }
    let one_is_two = rows.iter().all(|(_, r)| r[1] == r[2]);
    let zero_is_one = rows.iter().all(|(_, r)| r[0] == r[1]);
    if !one_is_two {
        let _ = write!(
            s,
            ". Discrepancy flag: the coincidence v_(p,1) = v_(p,2) stated for this kind of field does not match; \
             the computation gives {}",
            if zero_is_one { "v_(p,0) = v_(p,1) with v_(p,2) trivial" } else { "distinct valuations" }
        );
    }
    Ok(Some(s))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl fmt::Display for ClassificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "group: {}", self.group)?;
        let np: Vec<String> = self
            .np_table
            .display
            .iter()
            .map(|e| format!("n_{} = {}", e.p, e.n_p))
            .collect();
        writeln!(f, "n_p: {}", np.join(", "))?;
        for piece in &self.np_table.all_primes {
            writeln!(f, "  n_p = {} for p in {}", piece.n_p, piece.primes)?;
        }
        for g in &self.g_p {
            writeln!(f, "G_p = {} for p in {}", g.cut, g.primes)?;
        }
        writeln!(f, "G_0 = {}", self.g0)?;
        writeln!(f, "dp-minimal: {}", yes(self.dp_minimal))?;
        let t = &self.thm26;
        writeln!(
            f,
            "definable valuation with real closed residue field: cond1 {} cond2 {} cond3 {} (consistent: {}; primes with G_p = G_0: {})",
            yes(t.cond1),
            yes(t.cond2),
            yes(t.cond3),
            yes(t.consistent),
            t.primes
        )?;
        writeln!(f, "cuts:")?;
        for (i, c) in self.cuts.iter().enumerate() {
            let status = match c.status {
                CutStatus::Definable => "definable",
                CutStatus::NotDefinable => "not definable",
                CutStatus::Undecided => "UNDECIDED",
            };
            let rc = self
                .residue_flags
                .iter()
                .find(|r| r.cut == c.cut)
                .map(|r| r.real_closed);
            let rc = match rc {
                Some(true) => ", residue field real closed",
                _ => "",
            };
            let labels = if c.labels.is_empty() {
                String::new()
            } else {
                format!(" {}", c.labels.join(" "))
            };
            writeln!(f, "  {i:>2}. {:<36} {status}{labels}{rc}", c.cut)?;
        }
        writeln!(f, "definable valuations:")?;
        for d in &self.definable {
            let trivial = if d.trivial {
                " (trivial valuation)"
            } else {
                ""
            };
            writeln!(
                f,
                "  {:<36} {} via {}{trivial}",
                d.cut,
                d.labels.join(" "),
                d.formula
            )?;
        }
        if !self.certificates.is_empty() {
            writeln!(f, "non-definability certificates:")?;
            for c in &self.certificates {
                writeln!(f, "  {}", c.cut)?;
                for wr in &c.witnesses {
                    let conv = match wr.convention {
                        Convention::Straddle => "straddle",
                        Convention::BottomDivisible => "bottom_divisible",
                    };
                    writeln!(
                        f,
                        "    p in {}: {} .. {} is p-regular [{conv}]",
                        wr.primes, wr.low, wr.high
                    )?;
                }
            }
        }
        if !self.differential.is_empty() {
            writeln!(f, "differential checks:")?;
            for d in &self.differential {
                write!(
                    f,
                    "  p = {} n = {}: {} samples + {} boundary, {} mismatches",
                    d.p,
                    d.n,
                    d.samples,
                    d.boundary,
                    d.mismatches.len()
                )?;
                if d.witness_samples > 0 {
                    write!(
                        f,
                        ", {} clause refutations found, {} not found",
                        d.refuted, d.unrefuted
                    )?;
                }
                writeln!(f)?;
                for m in &d.mismatches {
                    writeln!(
                        f,
                        "    MISMATCH {} at x = {}: expected {}, got {}",
                        m.check, m.x, m.expected, m.got
                    )?;
                }
            }
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        for r in &self.red_flags {
            writeln!(f, "RED FLAG: {r}")?;
        }
        Ok(())
    }
}
