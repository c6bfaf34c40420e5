#pragma once

// Straight-line interpreter of the switching decode loop, written without
// any library code so it can serve as an independent oracle. Greedy policy
// only; logits come straight from a script (entry i drives step i + 1).

#include <cmath>
#include <cstddef>
#include <deque>
#include <string>
#include <vector>

namespace oracle {

struct ControllerParams {
  std::size_t window_e2l = 512;
  std::size_t window_l2e = 0;
  std::size_t c_max = 1;
  std::size_t answer_budget = 1;
  std::vector<int> end_think;
  std::vector<int> final_prefix;
  int eos = 0;
  std::size_t t_max = 1;
};

struct ControllerStep {
  char mode = 'L';   // 'L' or 'E'
  char kind = 'l';   // 's' sampled, 'i' injected, 'l' latent
  int token = 0;     // fed id, or argmax for latent steps
  bool mixed = false;
};

struct ControllerRun {
  std::vector<ControllerStep> steps;
  std::size_t switches = 0;
  std::vector<int> injected;
  std::string stop;  // "eos", "budget", "max_steps"
  // Index of the step where the termination trigger fired, if it did.
  long termination_step = -1;
};

inline std::vector<long double> softmax_ld(const std::vector<double>& logits) {
  long double m = logits[0];
  for (double x : logits) m = x > m ? x : m;
  std::vector<long double> p(logits.size());
  long double s = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(static_cast<long double>(logits[i]) - m);
    s += p[i];
  }
  for (auto& x : p) x /= s;
  return p;
}

inline long double entropy_ld(const std::vector<long double>& p) {
  long double h = 0;
  for (long double x : p)
    if (x > 0) h -= x * std::log(x);
  return h;
}

inline int argmax_ld(const std::vector<long double>& p) {
  int best = 0;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = static_cast<int>(i);
  return best;
}

inline ControllerRun run_reference(const std::vector<std::vector<double>>& script,
                                       const ControllerParams& a) {
  ControllerRun r;
  char m = 'L';
  std::size_t C = 0;
  std::deque<int> Q;
  long b = -1;
  bool locked = false;
  long double Hbar = 0;
  std::size_t dt = 0;
  std::vector<int> discrete;
  std::vector<std::size_t> fired;

  auto marker_done = [&] {
    const auto& e = a.end_think;
    if (discrete.size() < e.size()) return false;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (discrete[discrete.size() - e.size() + i] != e[i]) return false;
    return true;
  };

  for (std::size_t t = 1; t <= a.t_max; ++t) {
    const auto p = softmax_ld(script[t - 1]);
    const long double H = entropy_ld(p);
    ControllerStep s;

    if (!Q.empty()) {
      const int x = Q.front();
      Q.pop_front();
      s.mode = locked ? 'E' : m;
      s.kind = 'i';
      s.token = x;
      r.injected.push_back(x);
      discrete.push_back(x);
      r.steps.push_back(s);
      if (x == a.eos) { r.stop = "eos"; break; }
      if (t == a.t_max) { r.stop = "max_steps"; break; }
      continue;
    }

    if (locked) {
      const int x = argmax_ld(p);
      s.mode = 'E';
      s.kind = 's';
      s.token = x;
      discrete.push_back(x);
      r.steps.push_back(s);
      if (x == a.eos) { r.stop = "eos"; break; }
      --b;
      if (b == 0) { r.stop = "budget"; break; }
      if (t == a.t_max) { r.stop = "max_steps"; break; }
      continue;
    }

    if (t == 1) {
      Hbar = H;
      dt = 0;
    }
    bool to_explicit = false;
    if (m == 'L' && H < Hbar && dt >= a.window_l2e) {
      m = 'E';
      Hbar = H;
      dt = 0;
      ++C;
      to_explicit = true;
    } else if (m == 'E' && H > Hbar && dt >= a.window_e2l) {
      m = 'L';
      Hbar = H;
      dt = 0;
    } else {
      ++dt;
    }

    bool triggered = false;
    if (to_explicit) {
      if (C > a.c_max) {
        for (int x : a.final_prefix) Q.push_back(x);
        b = static_cast<long>(a.answer_budget);
        locked = true;
        triggered = true;
        r.termination_step = static_cast<long>(r.steps.size());
      } else if (2 * C >= a.c_max) {
        bool seen = false;
        for (auto f : fired) seen = seen || f == C;
        if (!seen) {
          fired.push_back(C);
          for (int x : a.end_think) Q.push_back(x);
          triggered = true;
        }
      }
    }

    s.mode = m;
    if (m == 'E' && dt > 0) {
      const int x = argmax_ld(p);
      s.kind = 's';
      s.token = x;
      discrete.push_back(x);
      r.steps.push_back(s);
      if (x == a.eos) { r.stop = "eos"; break; }
      if (marker_done()) locked = true;
    } else {
      s.kind = 'l';
      s.token = argmax_ld(p);
      s.mixed = (m == 'L' && dt == 0) || (m == 'E' && dt == 0 && !triggered);
      r.steps.push_back(s);
    }
    if (t == a.t_max) { r.stop = "max_steps"; break; }
  }
  r.switches = C;
  return r;
}

}  // namespace oracle
