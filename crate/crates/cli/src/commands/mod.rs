pub mod certify;
pub mod heat;
pub mod sharpness;
