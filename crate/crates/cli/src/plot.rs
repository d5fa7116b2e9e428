//! Gnuplot scripts for the emitted tables. Plain text, run from the
//! output directory with `gnuplot <script>`.

pub fn infidelity(files: &[(String, String)]) -> String {
    let mut s = String::from(
        "set datafile separator ','\nset logscale xy\nset key left top\n\
         set xlabel 'time (1/gamma_e)'\nset ylabel 'infidelity'\n\
         set terminal pngcairo size 900,650\nset output 'infidelity.png'\nplot \\\n",
    );
    let lines: Vec<String> = files
        .iter()
        .map(|(file, title)| format!("  '{file}' using 1:2 every ::1 with lines title '{title}'"))
        .collect();
    s.push_str(&lines.join(", \\\n"));
    s.push('\n');
    s
}

pub fn logical_rates(schemes: &[String], sizes: &[usize]) -> String {
    let mut s = String::from(
        "set datafile separator ','\nset logscale xy\nset key left top\n\
         set xlabel 'gamma_e / gamma_c'\nset ylabel 'p_L'\nset terminal pngcairo size 900,650\n",
    );
    for scheme in schemes {
        s.push_str(&format!("set output 'p_l_{scheme}.png'\nset title '{scheme}'\nplot \\\n"));
        let lines: Vec<String> = sizes
            .iter()
            .map(|n| {
                format!("  'p_l.csv' using ((strcol(1) eq '{scheme}' && $2 == {n}) ? $3 : NaN):4 with linespoints title 'n = {n}'")
            })
            .collect();
        s.push_str(&lines.join(", \\\n"));
        s.push('\n');
    }
    s
}

pub fn lambda(schemes: &[String]) -> String {
    let mut s = String::from(
        "set datafile separator ','\nset key left top\n\
         set xlabel 'gamma_c / gamma_e'\nset ylabel 'Lambda'\n\
         set terminal pngcairo size 900,650\nset output 'lambda.png'\nplot \\\n",
    );
    let lines: Vec<String> = schemes
        .iter()
        .map(|sc| format!("  'lambda.csv' using ((strcol(1) eq '{sc}') ? 1/$2 : NaN):3 with points title '{sc}'"))
        .collect();
    s.push_str(&lines.join(", \\\n"));
    s.push('\n');
    s
}

pub fn rates() -> String {
    "set datafile separator ','\nset key right top\n\
     set xlabel 'coset weight'\nset ylabel 'rate / peak'\n\
     set terminal pngcairo size 900,650\nset output 'rates.png'\n\
     plot 'rate_profile.csv' using 1:2 every ::1 with lines title 'engineered rate', \\\n\
     \x20 'rates.csv' using 1:4 every ::1 with points pt 7 title 'desired', \\\n\
     \x20 'rates.csv' using 1:5 every ::1 with points pt 5 title 'undesired'\n"
        .into()
}
