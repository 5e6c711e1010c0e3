//! Terminal game against the engine.

use std::io::{self, BufRead, Write};
use std::path::Path;
use std::process::ExitCode;

use sqgame::{Player, Position};
use sqgame_service::{Session, StatusLabel, Tables};

pub fn run(n: usize, human: Player, strategy_dir: Option<&Path>) -> ExitCode {
    let tables = match Tables::load(strategy_dir) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let stdin = io::stdin();
    match game_loop(n, human, &tables, stdin.lock(), io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn glyph(ch: char) -> char {
    match ch {
        '1' => 'O',
        '2' => 'X',
        _ => '.',
    }
}

fn render(s: &Session, out: &mut impl Write) -> io::Result<()> {
    let snap = s.snapshot(None);
    let n = snap.n;
    write!(out, "   ")?;
    for c in 0..n {
        write!(out, " {c}")?;
    }
    writeln!(out)?;
    let cells: Vec<char> = snap.state.chars().collect();
    for r in 0..n {
        write!(out, " {r} ")?;
        for c in 0..n {
            write!(out, " {}", glyph(cells[r * n + c]))?;
        }
        writeln!(out)?;
    }
    let list = |ps: &[Position]| ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ");
    if !snap.threats.p1.is_empty() {
        writeln!(out, "O threatens: {}", list(&snap.threats.p1))?;
    }
    if !snap.threats.p2.is_empty() {
        writeln!(out, "X threatens: {}", list(&snap.threats.p2))?;
    }
    Ok(())
}

fn parse_move(line: &str) -> Option<(usize, usize)> {
    let mut parts = line.split(|ch: char| ch.is_whitespace() || ch == ',').filter(|s| !s.is_empty());
    let r = parts.next()?.parse().ok()?;
    let c = parts.next()?.parse().ok()?;
    parts.next().is_none().then_some((r, c))
}

pub fn game_loop(n: usize, human: Player, tables: &Tables, input: impl BufRead, mut out: impl Write) -> io::Result<()> {
    let (mut session, opening) = Session::start(n, human, tables)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    let glyph_of = |p: Player| if p == Player::One { 'O' } else { 'X' };
    writeln!(
        out,
        "You play {} ({}). Enter moves as \"row col\", q to quit.",
        human,
        glyph_of(human)
    )?;
    if session.guarantee() {
        writeln!(out, "The engine plays a verified strategy on this board.")?;
    }
    if let Some(p) = opening {
        writeln!(out, "Engine plays {p}")?;
    }
    render(&session, &mut out)?;
    let mut lines = input.lines();
    loop {
        let snap = session.snapshot(None);
        if snap.status != StatusLabel::Ongoing {
            match snap.winner {
                Some(p) if p == human => writeln!(out, "You win.")?,
                Some(_) => writeln!(out, "The engine wins.")?,
                None => writeln!(out, "Draw.")?,
            }
            if let Some(sq) = snap.winning_square {
                let vs: Vec<String> = sq.vertices.iter().map(|v| v.to_string()).collect();
                writeln!(out, "Square: {}", vs.join(" "))?;
            }
            return Ok(());
        }
        write!(out, "> ")?;
        out.flush()?;
        let Some(line) = lines.next() else {
            writeln!(out)?;
            return Ok(());
        };
        let line = line?;
        let line = line.trim();
        if matches!(line, "q" | "quit" | "exit") {
            return Ok(());
        }
        let Some((r, c)) = parse_move(line) else {
            writeln!(out, "Enter a move as \"row col\", e.g. \"0 2\".")?;
            continue;
        };
        match session.submit(r, c) {
            Ok(reply) => {
                if let Some(p) = reply {
                    writeln!(out, "Engine plays {p}")?;
                }
                render(&session, &mut out)?;
            }
            Err(e) => writeln!(out, "{e}")?,
        }
    }
}
