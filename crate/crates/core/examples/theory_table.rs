//! The percent-relative-efficiency table and the efficiency-ordering
//! conditions, under both moment conventions.
//!
//! The "reported" column carries the efficiency figures published for this
//! parameterization in the study it comes from; they are not reproducible
//! from the rates and are displayed purely for comparison.

use poismean::model::MomentConvention;
use poismean::theory::{self, reference};

fn main() -> poismean::Result<()> {
    let g = reference::gammas();
    let n = reference::SAMPLE_SIZE;
    println!(
        "rates ({}, {}, {}), n = {n}; rho from the rates = {:.4} (reported {:.3})\n",
        reference::GAMMA1,
        reference::GAMMA2,
        reference::GAMMA3,
        g.moments().rho,
        reference::REPORTED_RHO
    );

    for conv in MomentConvention::ALL {
        let table = theory::pre_table(&g, n, conv)?;
        println!(
            "== {conv} convention (Var(mean) = {:.4}) ==",
            table.base_variance
        );
        println!(
            "{:<16} {:>12} {:>12} {:>9} {:>9}",
            "estimator", "bias", "mse", "pre", "reported"
        );
        for row in &table.rows {
            println!(
                "{:<16} {:>12.5} {:>12.5} {:>9.3} {:>9}",
                row.label,
                row.bias,
                row.mse,
                row.pre,
                row.reported_pre
                    .map(|v| format!("{v:.2}"))
                    .unwrap_or_default(),
            );
        }
        if let Some(note) = &table.as_printed_note {
            println!("note: {note}");
        }
        println!();
    }

    let eff = theory::efficiency_report(&g, n, MomentConvention::AsPrinted);
    println!("efficiency conditions:");
    for c in &eff.conditions {
        println!(
            "  {:<24} lhs = {:>10.3}  rhs = {:>10.3}  holds = {}{}",
            c.id,
            c.lhs,
            c.rhs,
            c.holds,
            c.note
                .as_deref()
                .map(|s| format!("  [{s}]"))
                .unwrap_or_default()
        );
    }
    Ok(())
}
