use std::fmt::Write;

use anyhow::Result;

use rgdiff::bounds::{published_discrepancy, table_general, table_m2, table_m2_n1, table_m3_n1};

use crate::report::{derivation_text, GeneralOut, M2N1Out, M2Out, M3N1Out, TablesReport};

pub fn report() -> Result<TablesReport> {
    Ok(TablesReport {
        kind: "tables",
        m2_n1: table_m2_n1()
            .into_iter()
            .map(|c| M2N1Out {
                h: c.h,
                length: c.h + 1,
                weight: c.weight.to_string(),
                ord_c2: derivation_text(&c.ord_c2),
                ord_c3: derivation_text(&c.ord_c3),
                note: published_discrepancy(2, 1, c.h),
            })
            .collect(),
        m2: table_m2()?
            .into_iter()
            .map(|r| M2Out {
                n: r.n,
                h: r.h,
                length: r.length,
                weight: r.weight.to_string(),
                ord_c2: derivation_text(&r.ord_c2),
                ord_c3: derivation_text(&r.ord_c3),
                note: r.note,
            })
            .collect(),
        m3_n1: table_m3_n1()?
            .into_iter()
            .map(|r| M3N1Out {
                h: r.h,
                c: r.c,
                length: r.length,
                weight: r.weight.to_string(),
            })
            .collect(),
        general: table_general()?
            .into_iter()
            .map(|r| GeneralOut {
                m: r.m,
                n: r.n,
                h: r.h,
                length: r.length,
                weight: r.weight.to_string(),
            })
            .collect(),
    })
}

fn row(out: &mut String, cells: &[String], widths: &[usize]) {
    let line: Vec<String> = cells.iter().zip(widths).map(|(c, w)| format!("{c:>w$}")).collect();
    writeln!(out, "{}", line.join("  ")).unwrap();
}

fn table(out: &mut String, title: &str, header: &[&str], rows: &[Vec<String>], notes: &[String]) {
    let widths: Vec<usize> = (0..header.len())
        .map(|i| rows.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
        .collect();
    writeln!(out, "{title}").unwrap();
    row(out, &header.iter().map(|s| s.to_string()).collect::<Vec<_>>(), &widths);
    for r in rows {
        row(out, r, &widths);
    }
    for n in notes {
        writeln!(out, "* {n}").unwrap();
    }
    out.push('\n');
}

pub fn text() -> Result<String> {
    let rep = report()?;
    let mut out = String::new();

    let rows: Vec<Vec<String>> = rep
        .m2_n1
        .iter()
        .map(|c| {
            let mark = if c.note.is_some() { "*" } else { "" };
            vec![c.h.to_string(), c.length.to_string(), format!("{}{mark}", c.weight), c.ord_c2.clone(), c.ord_c3.clone()]
        })
        .collect();
    let notes: Vec<String> = rep.m2_n1.iter().filter_map(|c| c.note.map(|n| format!("h={}: {n}", c.h))).collect();
    table(
        &mut out,
        "m=2, n=1: L = h+1, weight f(1,h)_{h+2}",
        &["h", "L", "weight", "ord c1=2", "ord c1=3"],
        &rows,
        &notes,
    );

    let rows: Vec<Vec<String>> = rep
        .m2
        .iter()
        .map(|r| {
            let mark = if r.note.is_some() { "*" } else { "" };
            vec![
                r.n.to_string(),
                r.h.to_string(),
                format!("{}{mark}", r.length),
                r.weight.clone(),
                r.ord_c2.clone(),
                r.ord_c3.clone(),
            ]
        })
        .collect();
    let notes: Vec<String> = rep
        .m2
        .iter()
        .filter_map(|r| r.note.as_ref().map(|n| format!("n={}, h={}: {n}", r.n, r.h)))
        .collect();
    table(
        &mut out,
        "m=2: L = b_n, weight f(n,h)_{b_n+1}",
        &["n", "h", "b_n", "weight", "ord c1=2", "ord c1=3"],
        &rows,
        &notes,
    );

    let rows: Vec<Vec<String>> = rep
        .m3_n1
        .iter()
        .map(|r| {
            let c: Vec<String> = r.c.iter().map(u64::to_string).collect();
            vec![r.h.to_string(), c.join(","), r.length.to_string(), r.weight.clone()]
        })
        .collect();
    table(
        &mut out,
        "m=3, n=1: L = c_h, weight h*fib(c_h+1)",
        &["h", "c_1..c_h", "L", "weight"],
        &rows,
        &[],
    );

    let rows: Vec<Vec<String>> = rep
        .general
        .iter()
        .map(|r| vec![r.m.to_string(), r.n.to_string(), r.h.to_string(), r.length.to_string(), r.weight.clone()])
        .collect();
    table(
        &mut out,
        "general: L = psi_n, weight h*fib(L+1)",
        &["m", "n", "h", "L", "weight"],
        &rows,
        &[],
    );
    Ok(out)
}
