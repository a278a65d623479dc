#![allow(dead_code)]

pub mod fredholm;
