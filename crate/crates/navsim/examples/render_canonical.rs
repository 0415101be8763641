//! Prints the canonical benchmark scenario in the .chs format.
//! Regenerate the committed file with:
//! cargo run -p navsim --example render_canonical > scenarios/canonical.chs

fn main() {
    print!("{}", navsim::scenario::render_scenario(&navsim::scenario::canonical_scenario()));
}
