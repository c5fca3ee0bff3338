//! Shared helpers for the integration suites: exact rational arithmetic,
//! a deterministic generator, and a tiny interpreter for the opaque
//! expression leaves produced by the fixture generator.

/// Exact rational number over i128, always reduced, positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rat {
    pub num: i128,
    pub den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs().max(1)
}

impl Rat {
    pub fn new(num: i128, den: i128) -> Rat {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den);
        Rat {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn int(v: i64) -> Rat {
        Rat {
            num: v as i128,
            den: 1,
        }
    }

    pub fn add(self, o: Rat) -> Rat {
        Rat::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }

    pub fn sub(self, o: Rat) -> Rat {
        Rat::new(self.num * o.den - o.num * self.den, self.den * o.den)
    }

    pub fn mul(self, o: Rat) -> Rat {
        Rat::new(self.num * o.num, self.den * o.den)
    }

    pub fn div(self, o: Rat) -> Rat {
        assert!(o.num != 0, "division by zero");
        Rat::new(self.num * o.den, self.den * o.num)
    }

    pub fn to_int(self) -> i64 {
        assert_eq!(self.den, 1, "not an integer: {self:?}");
        self.num as i64
    }
}

/// Small deterministic generator (64-bit LCG).
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Lcg {
        Lcg(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1))
    }

    pub fn next(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0 >> 33
    }

    /// Uniform-ish integer in `lo..=hi`.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        let span = (hi - lo + 1) as u64;
        lo + (self.next() % span) as i64
    }
}

/// Evaluates the restricted expression grammar the generator emits:
/// integers, `i`, `a[expr]`, `+`, `-`, `*`.
pub fn eval_mini_expr(expr: &str, arr: &[i64], i: Option<i64>) -> Rat {
    struct Parser<'a> {
        bytes: &'a [u8],
        pos: usize,
        arr: &'a [i64],
        i: Option<i64>,
    }
    impl<'a> Parser<'a> {
        fn ws(&mut self) {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
        }
        fn peek(&mut self) -> Option<u8> {
            self.ws();
            self.bytes.get(self.pos).copied()
        }
        fn expr(&mut self) -> Rat {
            let mut acc = self.term();
            loop {
                match self.peek() {
                    Some(b'+') => {
                        self.pos += 1;
                        acc = acc.add(self.term());
                    }
                    Some(b'-') => {
                        self.pos += 1;
                        acc = acc.sub(self.term());
                    }
                    _ => return acc,
                }
            }
        }
        fn term(&mut self) -> Rat {
            let mut acc = self.atom();
            while self.peek() == Some(b'*') {
                self.pos += 1;
                acc = acc.mul(self.atom());
            }
            acc
        }
        fn atom(&mut self) -> Rat {
            match self.peek() {
                Some(b'a') => {
                    self.pos += 1;
                    assert_eq!(self.peek(), Some(b'['), "array access expected");
                    self.pos += 1;
                    let idx = self.expr().to_int();
                    assert_eq!(self.peek(), Some(b']'));
                    self.pos += 1;
                    Rat::int(self.arr[idx as usize])
                }
                Some(b'i') => {
                    self.pos += 1;
                    Rat::int(self.i.expect("no loop index in scope"))
                }
                Some(c) if c.is_ascii_digit() => {
                    let start = self.pos;
                    while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
                        self.pos += 1;
                    }
                    let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                    Rat::int(text.parse().unwrap())
                }
                other => panic!(
                    "unexpected token {other:?} in {:?}",
                    std::str::from_utf8(self.bytes)
                ),
            }
        }
    }
    let mut p = Parser {
        bytes: expr.as_bytes(),
        pos: 0,
        arr,
        i,
    };
    let v = p.expr();
    p.ws();
    assert_eq!(p.pos, p.bytes.len(), "trailing input in {expr:?}");
    v
}

/// One synthetic Java file of roughly 150 lines mixing sum loops, nested
/// loops and non-matching noise.
pub fn synthetic_java_file(idx: usize, rng: &mut Lcg) -> String {
    let mut s = String::with_capacity(7_000);
    s.push_str(&format!("public class F{idx:05} {{\n"));
    for m in 0..14 {
        let salt = rng.range(2, 97);
        match (idx + m) % 3 {
            0 => s.push_str(&format!(
                "    static long sum{m}(long[] a, int n) {{\n\
                 \x20       long s = {salt};\n\
                 \x20       // accumulate the window\n\
                 \x20       for (int i = 0; i < n; i++) {{\n\
                 \x20           s += a[i];\n\
                 \x20       }}\n\
                 \x20       long t = s * 2;\n\
                 \x20       if (t > {salt}) {{\n\
                 \x20           t = t - 1;\n\
                 \x20       }}\n\
                 \x20       return t;\n\
                 \x20   }}\n\n"
            )),
            1 => s.push_str(&format!(
                "    static int noise{m}(int x, int y) {{\n\
                 \x20       int acc = x + y + {salt};\n\
                 \x20       String tag = \"for (int q = 0; q < 3; q++) acc += q;\";\n\
                 \x20       acc = acc * 31 + tag.length();\n\
                 \x20       while (acc > 1000) {{\n\
                 \x20           acc /= 2;\n\
                 \x20       }}\n\
                 \x20       /* block\n\
                 \x20          comment */\n\
                 \x20       return acc;\n\
                 \x20   }}\n\n"
            )),
            _ => s.push_str(&format!(
                "    static int grid{m}(int[][] cells, int rows, int cols) {{\n\
                 \x20       int total = {salt};\n\
                 \x20       for (int i = 0; i < rows; i++) {{\n\
                 \x20           for (int j = 0; j < cols; j++) {{\n\
                 \x20               total += cells[i][j];\n\
                 \x20           }}\n\
                 \x20       }}\n\
                 \x20       return total;\n\
                 \x20   }}\n\n"
            )),
        }
    }
    s.push_str("}\n");
    s
}
