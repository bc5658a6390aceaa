use std::io::Write;

use serde::Serialize;

use crate::density::MacroDensity;
use crate::interface::MacroInterface;
use crate::MacroError;

/// Run parameters written as `# key=value` lines above a profile.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct ProfileMeta {
    pub j: f64,
    pub delta: f64,
    pub t: f64,
}

fn header<W: Write>(out: &mut W, h: f64, window: (f64, f64), meta: &ProfileMeta) -> std::io::Result<()> {
    writeln!(out, "# h={h}")?;
    writeln!(out, "# window={},{}", window.0, window.1)?;
    writeln!(out, "# j={}", meta.j)?;
    writeln!(out, "# delta={}", meta.delta)?;
    writeln!(out, "# t={}", meta.t)
}

/// `r,rho` at cell midpoints, with one cell of tail on each side.
pub fn write_density_csv<W: Write>(mut out: W, rho: &MacroDensity, meta: &ProfileMeta) -> Result<(), MacroError> {
    header(&mut out, rho.h(), rho.window(), meta)?;
    writeln!(out, "r,rho")?;
    let n = rho.cells().len() as i64;
    for k in (rho.first() - 1)..=(rho.first() + n) {
        writeln!(out, "{},{}", (k as f64 + 0.5) * rho.h(), rho.cell(k))?;
    }
    Ok(())
}

/// `r,phi` at the nodes of the window and one node beyond each end.
pub fn write_interface_csv<W: Write>(mut out: W, phi: &MacroInterface, meta: &ProfileMeta) -> Result<(), MacroError> {
    header(&mut out, phi.h(), phi.window(), meta)?;
    writeln!(out, "# offset={}", phi.offset())?;
    writeln!(out, "r,phi")?;
    let (lo, hi) = phi.node_range();
    for k in (lo - 1)..=(hi + 1) {
        writeln!(out, "{},{}", k as f64 * phi.h(), phi.node(k))?;
    }
    Ok(())
}

pub fn write_json<W: Write, T: Serialize>(out: W, value: &T) -> Result<(), MacroError> {
    serde_json::to_writer_pretty(out, value)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let rho = MacroDensity::stationary(1.0, 0.05).unwrap();
        let mut buf = Vec::new();
        write_density_csv(&mut buf, &rho, &ProfileMeta { j: 1.0, delta: 0.1, t: 0.0 }).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "r,rho");
        assert_eq!(rows.len(), 1 + 10 + 2);
        assert!(text.contains("# j=1"));

        let phi = MacroInterface::stationary(1.0, 0.05).unwrap();
        let mut buf = Vec::new();
        write_interface_csv(&mut buf, &phi, &ProfileMeta::default()).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains("r,phi"));
    }
}
