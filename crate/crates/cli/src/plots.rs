//! gnuplot scripts written next to the data they plot.

pub fn operator(title: &str, csv: &str) -> String {
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset title '{title}'\nset xlabel 'x'\n\
plot '{csv}' using 1:2 with lines lw 2 lc rgb 'blue', \\\n\
     '' using 1:3 with lines lw 2 lc rgb 'orange', \\\n\
     '' using 1:4 with lines dt 2 lc rgb 'blue', \\\n\
     '' using 1:5 with lines dt 2 lc rgb 'orange'\n"
    )
}

pub fn columns(title: &str, csv: &str, n_columns: usize, ylabel: &str) -> String {
    let mut s = format!(
        "set datafile separator ','\nset key autotitle columnhead\nset title '{title}'\nset xlabel 'x'\nset ylabel '{ylabel}'\nplot "
    );
    let curves: Vec<String> = (2..=n_columns)
        .map(|c| format!("'{csv}' using 1:{c} with lines lw 2"))
        .collect();
    s.push_str(&curves.join(", \\\n     "));
    s.push('\n');
    s
}

pub fn wigner(title: &str, csv: &str) -> String {
    format!(
        "set datafile separator ','\nset title '{title}'\nset xlabel 'x'\nset ylabel 'p'\nset view map\nset size ratio -1\n\
set palette defined (-1 'blue', 0 'white', 1 'red')\nset dgrid3d 161,161\n\
splot '{csv}' using 1:2:3 every ::1 with pm3d notitle\n"
    )
}

pub fn sweep(csv: &str) -> String {
    format!(
        "set datafile separator ','\nset xlabel 's'\nset ylabel 'fidelity'\nset y2label 'probability'\nset y2tics\nset logscale y2\n\
plot '{csv}' using 1:(strcol(2) eq 'two_step' ? $3 : 1/0) every ::1 with linespoints dt 2 lc rgb 'black' title 'fidelity (two step)', \\\n\
     '' using 1:(strcol(2) eq 'three_step' ? $3 : 1/0) every ::1 with linespoints dt 2 lc rgb 'gray' title 'fidelity (three step)', \\\n\
     '' using 1:(strcol(2) eq 'two_step' ? $4 : 1/0) every ::1 axes x1y2 with linespoints lc rgb 'black' title 'probability (two step)', \\\n\
     '' using 1:(strcol(2) eq 'three_step' ? $4 : 1/0) every ::1 axes x1y2 with linespoints lc rgb 'gray' title 'probability (three step)'\n"
    )
}

pub fn points(title: &str, csv: &str, xlabel: &str, ylabel: &str) -> String {
    format!(
        "set datafile separator ','\nset title '{title}'\nset xlabel '{xlabel}'\nset ylabel '{ylabel}'\n\
plot '{csv}' using 1:2 every ::1 with linespoints lw 2 notitle\n"
    )
}
