pub mod bounds;
pub mod conditions;
pub mod error;
pub mod functionals;
pub mod instance;
pub mod jensen;
pub mod parallel;
pub mod sample;
pub mod space;
pub mod sharpness;
