use crate::logic::Regex;

/// Thompson automaton with ε-moves; state 0 is initial, `accept` is final.
#[derive(Debug, Clone)]
pub struct Nfa {
    pub(crate) eps: Vec<Vec<usize>>,
    pub(crate) moves: Vec<Vec<(String, usize)>>,
    pub(crate) accept: usize,
}

impl Nfa {
    pub fn from_regex(r: &Regex) -> Self {
        let mut nfa = Nfa {
            eps: vec![Vec::new()],
            moves: vec![Vec::new()],
            accept: 0,
        };
        let end = nfa.build(r, 0);
        nfa.accept = end;
        nfa
    }

    pub fn state_count(&self) -> usize {
        self.eps.len()
    }

    fn fresh(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.moves.push(Vec::new());
        self.eps.len() - 1
    }

    /// Adds the fragment for `r` starting at `from`; returns its exit state.
    fn build(&mut self, r: &Regex, from: usize) -> usize {
        match r {
            Regex::Empty => self.fresh(),
            Regex::Epsilon => from,
            Regex::Symbol(s) => {
                let to = self.fresh();
                self.moves[from].push((s.clone(), to));
                to
            }
            Regex::Concat(a, b) => {
                let mid = self.build(a, from);
                self.build(b, mid)
            }
            Regex::Union(a, b) => {
                let (sa, sb) = (self.fresh(), self.fresh());
                self.eps[from].extend([sa, sb]);
                let (ea, eb) = (self.build(a, sa), self.build(b, sb));
                let end = self.fresh();
                self.eps[ea].push(end);
                self.eps[eb].push(end);
                end
            }
            Regex::Star(a) => {
                let start = self.fresh();
                self.eps[from].push(start);
                let end = self.build(a, start);
                self.eps[end].push(start);
                let exit = self.fresh();
                self.eps[start].push(exit);
                exit
            }
        }
    }

    /// ε-closure of `states`, in place.
    pub fn close(&self, states: &mut Vec<usize>, seen: &mut [bool]) {
        let mut i = 0;
        while i < states.len() {
            let q = states[i];
            for &p in &self.eps[q] {
                if !seen[p] {
                    seen[p] = true;
                    states.push(p);
                }
            }
            i += 1;
        }
    }

    /// Word membership by subset simulation.
    pub fn accepts(&self, word: &[&str]) -> bool {
        let n = self.state_count();
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut current = vec![0];
        self.close(&mut current, &mut seen);
        for sym in word {
            let mut seen = vec![false; n];
            let mut next = Vec::new();
            for &q in &current {
                for (s, p) in &self.moves[q] {
                    if s == sym && !seen[*p] {
                        seen[*p] = true;
                        next.push(*p);
                    }
                }
            }
            self.close(&mut next, &mut seen);
            current = next;
        }
        current.contains(&self.accept)
    }
}
