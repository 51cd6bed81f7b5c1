#![allow(dead_code)]

pub mod quat;
