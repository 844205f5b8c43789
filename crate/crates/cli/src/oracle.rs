use std::io::{BufRead, Write};
use std::sync::Arc;

use goalign::alignment::{parse_yes_no, AnswerCache, Oracle, OracleError};
use goalign::pddl::FluentTable;
use goalign::task::FluentId;

/// Asks a person on the terminal. Prompts go to stderr so stdout stays
/// clean for the session summary.
pub struct InteractiveOracle<R> {
    input: R,
    table: Arc<FluentTable>,
    cache: AnswerCache,
}

impl<R: BufRead> InteractiveOracle<R> {
    pub fn new(input: R, table: Arc<FluentTable>) -> Self {
        InteractiveOracle {
            input,
            table,
            cache: AnswerCache::default(),
        }
    }
}

pub fn prompt_text(atom: &str) -> String {
    format!("Is it part of your goal that {atom}? [y/n] ")
}

impl<R: BufRead> Oracle for InteractiveOracle<R> {
    fn answer(&mut self, fluent: FluentId) -> Result<bool, OracleError> {
        let atom = self.table.render(fluent);
        let input = &mut self.input;
        self.cache.get_or_ask(fluent, || loop {
            eprint!("{}", prompt_text(&atom));
            std::io::stderr().flush().ok();
            let mut line = String::new();
            match input.read_line(&mut line) {
                Ok(0) => return Err(OracleError::Io("input closed before an answer".into())),
                Ok(_) => {
                    if let Some(a) = parse_yes_no(&line) {
                        return Ok(a);
                    }
                    eprintln!("please answer y or n");
                }
                Err(e) => return Err(OracleError::Io(e.to_string())),
            }
        })
    }

    fn query_count(&self) -> usize {
        self.cache.len()
    }
}
