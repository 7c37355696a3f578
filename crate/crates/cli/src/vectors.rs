use anyhow::Context;
use volga_core::vectors;

use crate::args::VectorsArgs;
use crate::{CliError, EXIT_FAILURE, EXIT_OK};

pub fn run(args: VectorsArgs) -> Result<i32, CliError> {
    let files = vectors::all();
    if args.check {
        let mut mismatches = 0;
        for f in &files {
            let path = args.out.join(&f.name);
            match std::fs::read(&path) {
                Ok(bytes) if bytes == f.contents.as_bytes() => {}
                Ok(_) => {
                    eprintln!("differs: {}", path.display());
                    mismatches += 1;
                }
                Err(e) => {
                    eprintln!("missing: {}: {e}", path.display());
                    mismatches += 1;
                }
            }
        }
        println!("{} of {} vector files match", files.len() - mismatches, files.len());
        return Ok(if mismatches == 0 { EXIT_OK } else { EXIT_FAILURE });
    }
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    for f in &files {
        let path = args.out.join(&f.name);
        std::fs::write(&path, &f.contents).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(EXIT_OK)
}
