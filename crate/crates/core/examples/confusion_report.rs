//! Builds a confusion matrix from actual and assigned labels and renders it
//! as a percentage table with the easiest and hardest classes.
//!
//! ```bash
//! cargo run -p voxemo --example confusion_report
//! ```

use voxemo::eval::{build_confusion, render_confusion_percent};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pairs = [
        ("Neutral", "Neutral", 9),
        ("Neutral", "Sadness", 3),
        ("Happiness", "Happiness", 7),
        ("Happiness", "Neutral", 2),
        ("Happiness", "Anger", 1),
        ("Sadness", "Sadness", 10),
        ("Sadness", "Neutral", 1),
        ("Anger", "Anger", 6),
        ("Anger", "Happiness", 3),
    ];
    let (mut actual, mut assigned) = (Vec::new(), Vec::new());
    for (a, p, n) in pairs {
        for _ in 0..n {
            actual.push(a);
            assigned.push(p);
        }
    }
    let classes = ["Neutral", "Happiness", "Sadness", "Anger"].map(String::from);
    let m = build_confusion(&actual, &assigned, &classes)?;
    let table = render_confusion_percent(&m);
    print!("{}", table.to_text());

    let summary = m.overall_accuracy()?;
    println!(
        "\naccuracy {:.1}% ({} / {})",
        100.0 * summary.accuracy,
        m.trace(),
        m.total()
    );
    let (min, max) = table.rate_range();
    if let (Some((lo, lo_rate)), Some((hi, hi_rate))) = (min, max) {
        println!("hardest {lo} {lo_rate:.1}, easiest {hi} {hi_rate:.1}");
    }
    Ok(())
}
