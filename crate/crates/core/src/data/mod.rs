//! Market series parsing, date alignment, scaling and supervised windowing.

mod frame;
mod scaler;
mod series;
mod windows;

pub use frame::{align, parse_frame_csv, serialize_frame_csv, split_by_date, AlignedFrame};
pub use scaler::{apply_scaler, fit_scaler, invert_scaler, ColumnRange, ScalerParams};
pub use series::{parse_csv, read_csv_file, serialize_csv, OhlcvBar, OhlcvSeries, CSV_HEADER};
pub use windows::{make_supervised_windows, SupervisedTensors};
