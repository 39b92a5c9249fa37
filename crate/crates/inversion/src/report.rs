use std::io::Write;
use std::path::Path;

use crate::{InversionState, Result};

/// Writes the per-iteration inversion report:
/// `iter,misfit,grad_norm,step[,model_mae]`.
pub fn write_report_csv(path: &Path, state: &InversionState) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    let with_mae = state.rows.iter().any(|r| r.model_mae.is_some());
    if with_mae {
        writeln!(f, "iter,misfit,grad_norm,step,model_mae")?;
    } else {
        writeln!(f, "iter,misfit,grad_norm,step")?;
    }
    for r in &state.rows {
        if with_mae {
            writeln!(
                f,
                "{},{:e},{:e},{:e},{:e}",
                r.iter,
                r.misfit,
                r.grad_norm,
                r.step,
                r.model_mae.unwrap_or(f64::NAN)
            )?;
        } else {
            writeln!(f, "{},{:e},{:e},{:e}", r.iter, r.misfit, r.grad_norm, r.step)?;
        }
    }
    f.flush()?;
    Ok(())
}
