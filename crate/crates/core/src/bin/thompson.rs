use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use thompson_psl2::circle_maps::{
    diagram_from_plmap, inn_question, plmap_from_diagram, PlMap, PpMap,
};
use thompson_psl2::farey::{minkowski_inv, minkowski_q, Dyadic, ExtRational};
use thompson_psl2::harness::{
    bfs_length_abc, free_subgroup_report, length_bounds_report, render_tree, verify_all,
};
use thompson_psl2::psl2z::NormalWord;
use thompson_psl2::seq::{is_k_good, seq_from_plmap};
use thompson_psl2::thin::{diagram_to_word, is_member, word_to_diagram};
use thompson_psl2::tree_pairs::TreePairDiagram;
use thompson_psl2::Error;

/// Thompson's group T and its modular subgroup PSL2(Z).
///
/// Elements are given as normal words in a, b, B (`abaB`, `e` for the
/// identity), as tree pair diagrams `source:rot:target` with preorder
/// bitstrings (`10100:3:10100`), or as PL maps `x,y; x,y; ...`.
#[derive(Parser)]
#[command(name = "thompson", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rewrite a word in a, b, B to normal form.
    Normalize { word: String },
    /// Reduced tree pair diagram of a word.
    ToDiagram { word: String },
    /// Normal word of a diagram in the modular subgroup.
    ToWord { diagram: String },
    /// Run both membership tests on an element.
    Member { element: String },
    /// Product of two elements, left factor applied first.
    Compose { first: String, second: String },
    /// Minkowski question mark of p/q.
    Minkowski {
        #[arg(allow_hyphen_values = true)]
        value: String,
    },
    /// Inverse of the question mark on a dyadic in [0, 1).
    MinkowskiInv { value: String },
    /// Conjugate a piecewise-PSL2(Z) map by the question mark.
    Conjugate { ppmap: String },
    /// Slope sequence of an element.
    Seq { element: String },
    /// Caret count against word length for all words up to k syllables.
    Lengths {
        #[arg(long, default_value_t = 8)]
        max_k: usize,
    },
    /// Words in g = abab, h = aBaB and their images.
    FreeSubgroup {
        #[arg(long, default_value_t = 5)]
        max_len: usize,
    },
    /// Word length in A, B, C by breadth-first search.
    Bfs {
        #[arg(long, default_value_t = 5)]
        radius: usize,
        element: String,
    },
    /// Graphviz rendering of a diagram.
    Render {
        element: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the verification sweeps.
    Verify {
        #[arg(long, default_value_t = 6)]
        max_k: usize,
        #[arg(long, default_value_t = 5)]
        radius: usize,
    },
}

enum Failure {
    Verification(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::ExceedsBound(..) | Error::OutOfRange(_) => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Verification(e.to_string()),
        }
    }
}

fn parse_element(s: &str) -> Result<TreePairDiagram, Failure> {
    if s.contains(':') {
        Ok(s.parse::<TreePairDiagram>()?.reduce())
    } else if s.contains(',') {
        Ok(diagram_from_plmap(&s.parse::<PlMap>()?)?)
    } else {
        Ok(word_to_diagram(&s.parse::<NormalWord>()?))
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Normalize { word } => println!("{}", word.parse::<NormalWord>()?),
        Command::ToDiagram { word } => println!("{}", word_to_diagram(&word.parse()?)),
        Command::ToWord { diagram } => {
            let d = diagram.parse::<TreePairDiagram>()?.reduce();
            match diagram_to_word(&d) {
                Some(w) => println!("{w}"),
                None => return Err(Failure::Verification(format!("{d} is not in PSL2(Z)"))),
            }
        }
        Command::Member { element } => {
            let d = parse_element(&element)?;
            let by_trees = is_member(&d)?;
            let by_slopes = is_k_good(&seq_from_plmap(&plmap_from_diagram(&d)));
            if by_trees != by_slopes {
                return Err(Failure::Verification(format!(
                    "{d}: tree test says {by_trees}, slope test says {by_slopes}"
                )));
            }
            println!("{d} {}", if by_trees { "member" } else { "non-member" });
        }
        Command::Compose { first, second } => {
            if !first.contains([':', ',']) && !second.contains([':', ',']) {
                let (x, y): (NormalWord, NormalWord) = (first.parse()?, second.parse()?);
                println!("{}", x.mul(&y));
            } else {
                println!(
                    "{}",
                    parse_element(&first)?.multiply(&parse_element(&second)?)
                );
            }
        }
        Command::Minkowski { value } => println!("{}", minkowski_q(&value.parse::<ExtRational>()?)),
        Command::MinkowskiInv { value } => {
            println!("{}", minkowski_inv(&value.parse::<Dyadic>()?)?)
        }
        Command::Conjugate { ppmap } => println!("{}", inn_question(&ppmap.parse::<PpMap>()?)?),
        Command::Seq { element } => {
            let s = seq_from_plmap(&plmap_from_diagram(&parse_element(&element)?));
            println!("{s}");
            println!("slopes {}", s.slopes());
            println!("{}", if is_k_good(&s) { "good" } else { "not good" });
        }
        Command::Lengths { max_k } => {
            let report = length_bounds_report(max_k, None)?;
            println!("{report}");
            if !report.passed() {
                return Err(Failure::Verification("length bounds violated".into()));
            }
        }
        Command::FreeSubgroup { max_len } => {
            let report = free_subgroup_report(max_len)?;
            println!("{report}");
            if !report.trivial.is_empty() {
                return Err(Failure::Verification(format!(
                    "trivial words: {}",
                    report.trivial.join(" ")
                )));
            }
        }
        Command::Bfs { radius, element } => {
            match bfs_length_abc(&parse_element(&element)?, radius)? {
                Some(n) => println!("{n}"),
                None => println!("beyond radius {radius}"),
            }
        }
        Command::Render { element, output } => {
            let dot = render_tree(&parse_element(&element)?);
            match output {
                Some(path) => std::fs::write(&path, dot)
                    .map_err(|e| Failure::Verification(format!("{}: {e}", path.display())))?,
                None => print!("{dot}"),
            }
        }
        Command::Verify { max_k, radius } => {
            let summary = verify_all(max_k, radius)?;
            println!("{summary}");
            if !summary.passed() {
                return Err(Failure::Verification("verification failed".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
