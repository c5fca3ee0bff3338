//! Synthetic corpus generation shared by the benchmarks.

use formula_miner_core::SourceUnit;

/// Deterministic xorshift-style generator.
pub struct Gen(u64);

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen(seed | 1)
    }

    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn pick(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

/// One synthetic Java file of roughly 150 lines mixing matching loops,
/// nested loops and non-matching noise.
pub fn java_file(idx: usize, g: &mut Gen) -> String {
    let mut s = String::with_capacity(7_000);
    s.push_str(&format!("public class B{idx:05} {{\n"));
    for m in 0..14 {
        let salt = g.pick(97) + 2;
        match (idx + m) % 3 {
            0 => s.push_str(&format!(
                "    static long sum{m}(long[] a, int n) {{\n        long s = {salt};\n        for (int i = 0; i < n; i++) {{\n            s += a[i];\n        }}\n        return s * 2;\n    }}\n\n"
            )),
            1 => s.push_str(&format!(
                "    static int noise{m}(int x) {{\n        int acc = x + {salt};\n        String tag = \"for (int q = 0; q < 3; q++) acc += q;\";\n        acc = acc * 31 + tag.length();\n        while (acc > 1000) {{\n            acc /= 2;\n        }}\n        return acc;\n    }}\n\n"
            )),
            _ => s.push_str(&format!(
                "    static int grid{m}(int[][] cells, int rows, int cols) {{\n        int total = {salt};\n        for (int i = 0; i < rows; i++) {{\n            for (int j = 0; j < cols; j++) {{\n                total += cells[i][j];\n            }}\n        }}\n        return total;\n    }}\n\n"
            )),
        }
    }
    s.push_str("}\n");
    s
}

/// A batch of in-memory source units.
pub fn units(count: usize) -> Vec<SourceUnit> {
    let mut g = Gen::new(42);
    (0..count)
        .map(|i| SourceUnit::from_text("bench", &format!("B{i:05}.java"), &java_file(i, &mut g)))
        .collect()
}
