use std::fs;
use std::io::{self, Write};
use std::path::Path;

use harvest_core::ResultRow;

use crate::config::Format;

pub const CSV_HEADER: &str =
    "axis_value,C_per_lambda2,I_per_lambda2,absE_per_lambda2,L_AA,L_BB,abs_L_AB,abs_M,converged,rungs";

pub fn render(rows: &[ResultRow], format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str(CSV_HEADER);
            s.push('\n');
            for r in rows {
                s.push_str(&format!(
                    "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{}\n",
                    r.axis_value,
                    r.c_per_lambda2,
                    r.i_per_lambda2,
                    r.abs_e_per_lambda2,
                    r.l_aa,
                    r.l_bb,
                    r.abs_l_ab,
                    r.abs_m,
                    r.converged,
                    r.rungs
                ));
            }
        }
        Format::Jsonl => {
            for r in rows {
                // serde_json writes non-finite floats as null
                s.push_str(&serde_json::to_string(r).expect("rows serialize"));
                s.push('\n');
            }
        }
    }
    s
}

/// Writes through a sibling temporary file so readers never see a
/// half-written table.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = path.with_file_name(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}
