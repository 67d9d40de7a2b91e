//! Exit statuses.

pub const TYPECHECK: u8 = 1;
pub const STORE_FORMAT: u8 = 2;
pub const INVARIANT: u8 = 3;
pub const ILLEGAL_EDIT: u8 = 4;
pub const USAGE: u8 = 64;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Failure {
        Failure { code, error: error.into() }
    }

    pub fn msg(code: u8, msg: impl std::fmt::Display) -> Failure {
        Failure { code, error: anyhow::anyhow!("{msg}") }
    }
}

pub trait OrExit<T> {
    fn or_exit(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> OrExit<T> for Result<T, E> {
    fn or_exit(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure::new(code, e))
    }
}
