//! File formats: PPM images, the cipher container and plotting exports.

mod bundle;
mod export;
mod ppm;

pub use bundle::{
    bundle_from_bytes, bundle_len, bundle_to_bytes, read_bundle, write_bundle, BundleHeader,
    HEADER_LEN, MAGIC, VERSION,
};
pub use export::{
    histogram_csv, permutations_csv, pgm_bytes, scatter_csv, trajectory_csv, write_pgm,
};
pub use ppm::{decode_ppm, encode_ppm, load_ppm, save_ppm};
