use std::io::{self, Write};

use super::Envelope;

/// Writes `xi1,…,xim,value,envelope` rows; `∞` is written as `inf`.
pub fn write_csv<W: Write>(out: &mut W, env: &Envelope) -> io::Result<()> {
    let m = env.input.dim();
    let mut header: Vec<String> = (1..=m).map(|k| format!("xi{k}")).collect();
    header.push("value".into());
    header.push("envelope".into());
    writeln!(out, "{}", header.join(","))?;
    for ((p, v), e) in env.input.points.iter().zip(&env.input.values).zip(&env.values) {
        let coords: Vec<String> = p.iter().map(|x| format!("{x}")).collect();
        writeln!(out, "{},{},{}", coords.join(","), v, e)?;
    }
    Ok(())
}
