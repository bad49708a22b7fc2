use serde_json::json;

use rigid_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    Validation { message: String, key: Option<String> },
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn validation(message: String, key: Option<&str>) -> Self {
        CliError::Validation { message, key: key.map(str::to_string) }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }

    pub fn to_json(&self) -> String {
        let v = match self {
            CliError::Validation { message, key } => json!({"error": "validation", "message": message, "key": key}),
            CliError::Numerical(m) => json!({"error": "numerical", "message": m}),
            CliError::Io(m) => json!({"error": "io", "message": m}),
        };
        v.to_string()
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        if e.is_validation() {
            CliError::Validation { message: e.to_string(), key: None }
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
