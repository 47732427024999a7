pub mod placeholder_tmp {}
