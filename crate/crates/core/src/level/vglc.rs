use super::{Level, LevelError, TileType, CELLS, COLS, ROWS};

/// Line-ending convention of a VGLC text file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TextLayout {
    pub crlf: bool,
    pub trailing_newline: bool,
}

impl TextLayout {
    /// LF line endings with a final newline; what [`render_text`] emits.
    pub const CANONICAL: TextLayout = TextLayout { crlf: false, trailing_newline: true };

    pub fn detect(text: &str) -> Self {
        TextLayout { crlf: text.contains("\r\n"), trailing_newline: text.ends_with('\n') }
    }

    pub fn render(self, level: &Level) -> String {
        let eol = if self.crlf { "\r\n" } else { "\n" };
        let mut out = String::with_capacity(CELLS + ROWS * 2);
        for (i, row) in level.rows().enumerate() {
            out.extend(row.iter().map(|t| t.vglc_char()));
            if i + 1 < ROWS || self.trailing_newline {
                out.push_str(eol);
            }
        }
        out
    }
}

/// Parses a 22-line, 32-column VGLC Lode Runner level.
///
/// Accepts LF or CRLF line endings and an optional final newline.
pub fn parse_vglc(text: &str) -> Result<Level, LevelError> {
    let body = text.strip_suffix("\r\n").or_else(|| text.strip_suffix('\n')).unwrap_or(text);
    let lines: Vec<&str> = if body.is_empty() {
        Vec::new()
    } else {
        body.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).collect()
    };
    if lines.len() != ROWS {
        return Err(LevelError::WrongRowCount { expected: ROWS, found: lines.len() });
    }

    let mut tiles = [TileType::Empty; CELLS];
    for (row, line) in lines.iter().enumerate() {
        let width = line.chars().count();
        if width != COLS {
            return Err(LevelError::WrongRowLength { row, expected: COLS, found: width });
        }
        for (col, ch) in line.chars().enumerate() {
            tiles[row * COLS + col] = TileType::from_vglc(ch).ok_or(LevelError::UnknownCharacter { row, col, ch })?;
        }
    }
    Ok(Level::from_tiles(tiles))
}

/// Renders a level as VGLC text with LF endings and a trailing newline.
pub fn render_text(level: &Level) -> String {
    TextLayout::CANONICAL.render(level)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_text(ch: char) -> String {
        let line: String = std::iter::repeat_n(ch, COLS).collect();
        format!("{}\n", vec![line; ROWS].join("\n"))
    }

    #[test]
    fn table_mapping_on_one_row() {
        let mut text = String::from("B#.G-Eb");
        text.push_str(&".".repeat(COLS - 7));
        text.push('\n');
        text.push_str(&uniform_text('.')[COLS + 1..]);
        let level = parse_vglc(&text).unwrap();
        let row0: Vec<u8> = level.to_int_grid()[0][..7].to_vec();
        assert_eq!(row0, vec![6, 4, 0, 1, 5, 2, 3]);
    }

    #[test]
    fn all_dots_is_all_empty() {
        let level = parse_vglc(&uniform_text('.')).unwrap();
        assert_eq!(level, Level::filled(TileType::Empty));
    }

    #[test]
    fn renders_uniform_levels() {
        assert_eq!(render_text(&Level::filled(TileType::Empty)), uniform_text('.'));
        assert_eq!(render_text(&Level::filled(TileType::Gold)), uniform_text('G'));
    }

    #[test]
    fn twenty_one_lines_is_wrong_dimensions() {
        let text = uniform_text('.');
        let short: String = text.lines().take(ROWS - 1).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse_vglc(&short), Err(LevelError::WrongRowCount { found: 21, .. })));
        assert!(parse_vglc("").unwrap_err().is_wrong_dimensions());
    }

    #[test]
    fn reports_bad_row_length_and_character() {
        let mut lines: Vec<String> = uniform_text('.').lines().map(str::to_owned).collect();
        lines[4].pop();
        assert!(matches!(parse_vglc(&lines.join("\n")), Err(LevelError::WrongRowLength { row: 4, found: 31, .. })));
        lines[4].push('x');
        assert!(matches!(
            parse_vglc(&lines.join("\n")),
            Err(LevelError::UnknownCharacter { row: 4, col: 31, ch: 'x' })
        ));
    }

    #[test]
    fn crlf_and_missing_newline_round_trip() {
        let lf = uniform_text('b');
        let crlf = lf.replace('\n', "\r\n");
        let bare = lf.trim_end().to_owned();
        for text in [lf, crlf, bare] {
            let level = parse_vglc(&text).unwrap();
            assert_eq!(TextLayout::detect(&text).render(&level), text);
        }
    }
}
