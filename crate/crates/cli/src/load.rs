use std::path::{Path, PathBuf};

use oilcast_core::data::{parse_frame_csv, read_csv_file, AlignedFrame, CSV_HEADER};
use oilcast_core::Error;

/// Expands directories to the `.csv` files they contain, in name order.
pub fn expand(paths: &[PathBuf]) -> Result<Vec<PathBuf>, Error> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(path)
                .map_err(|e| Error::Io { path: path.clone(), source: e })?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "csv"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(path.clone());
        }
    }
    if files.is_empty() {
        let shown: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
        return Err(Error::Config(format!("no .csv files in {}", shown.join(", "))));
    }
    Ok(files)
}

fn is_bar_file(path: &Path) -> Result<bool, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
    let header: Vec<&str> = text.lines().next().unwrap_or("").split(',').map(str::trim).collect();
    Ok(header.len() >= 5 && header[..5] == CSV_HEADER[..5])
}

/// Loads bar files (`date,open,high,low,close[,volume]`, symbol from the file stem)
/// and wide frame files (`date,<columns>`) and inner-joins them on date.
pub fn load_frame(paths: &[PathBuf]) -> Result<AlignedFrame, Error> {
    let mut frames = Vec::new();
    for file in expand(paths)? {
        let frame = if is_bar_file(&file)? {
            read_csv_file(&file)?.to_frame()?
        } else {
            let f = std::fs::File::open(&file).map_err(|e| Error::Io { path: file.clone(), source: e })?;
            parse_frame_csv(f)?
        };
        frames.push(frame);
    }
    if frames.len() == 1 {
        Ok(frames.pop().expect("one frame"))
    } else {
        AlignedFrame::join(&frames)
    }
}
